//! Command-line front end.
//!
//! [`run`] parses an argument vector, dispatches to the library and returns a
//! [`RunReport`]; the binary only prints it and exits with
//! [`RunReport::exit_code`]: 0 on pass, 1 when a verification fails, 2 on a
//! usage error. JSON output carries `"schema": "fgflip/1"` and no timing, so
//! identical invocations produce identical bytes.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use serde_json::{json, Value};

use crate::braidgraph::{self, graph_from_word, snake_reduce_doubled, standard_graph, BraidWord, FaceId, Family};
use crate::modulardata::{self, ModularError};
use crate::qdilog::{self, QdParams, Suite};
use crate::skewspace::qi;
use crate::triangle::{self, pairing_table_report, Triangle};
use crate::wordalgebra::{self as wa, braided_pentagon_sides, rewriting_oracle, FlipAlgebra, Report};
use crate::SCHEMA;

#[derive(Parser, Debug)]
#[command(name = "fgflip", version, about = "Fock-Goncharov flip: combinatorics, pentagon proofs and quantum dilogarithm checks")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// `N` given either positionally or as `--N`.
#[derive(Args, Debug, Clone)]
pub struct RankArg {
    /// Rank parameter N (at least 2).
    #[arg(value_name = "N")]
    pub pos: Option<usize>,
    #[arg(long = "N", value_name = "N", conflicts_with = "pos")]
    pub flag: Option<usize>,
}

impl RankArg {
    fn get(&self) -> Result<usize, String> {
        match self.pos.or(self.flag) {
            None => Err("missing N".into()),
            Some(n) if n < 2 => Err(format!("N must be at least 2, got {n}")),
            Some(n) => Ok(n),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pairing matrix, distinguished vectors and pairing-law checks of ∇_N.
    Triangle {
        #[command(flatten)]
        n: RankArg,
        #[arg(long)]
        pairings: bool,
        #[arg(long)]
        vectors: bool,
        /// Default when no other view is requested.
        #[arg(long)]
        verify: bool,
    },
    /// Colored braid graphs.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
    /// Symbolic verifications.
    Verify {
        #[arg(value_enum)]
        what: VerifyKind,
        #[command(flatten)]
        n: RankArg,
        /// Seed of the random mutation walk (zmut).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// State budget of the search oracle (pentagon).
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
    },
    /// Doubled snake-path reduction P_n(2) → P_n.
    Snake {
        /// Size n ≥ 1 of the snake matrix.
        n: usize,
    },
    /// Quantum dilogarithm numerics.
    Qdilog {
        #[command(subcommand)]
        cmd: QdCmd,
    },
    /// Modular data of the quantum Borel group.
    Modular {
        #[command(flatten)]
        n: RankArg,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        hbar: f64,
    },
    /// Batteries of checks.
    Suite {
        #[arg(value_enum)]
        level: Level,
        /// Add 1 to ε between basis vectors I and J of every ∇_N large
        /// enough, before the pairing-law checks (negative control).
        #[arg(long, value_name = "I,J")]
        perturb: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GraphCmd {
    /// Unlabeled graph of a braid word such as `3:1,2,1`.
    Build { word: String },
    /// Standard labeled graph Γ_E or Γ_F.
    Standard {
        #[command(flatten)]
        n: RankArg,
        #[arg(long, default_value = "E")]
        family: Family,
    },
    /// Mutates one face of a standard graph and checks the partition functions.
    Mutate {
        #[command(flatten)]
        n: RankArg,
        #[arg(long, default_value = "E")]
        family: Family,
        /// Face as `strip,cell`; defaults to the first mutable face.
        #[arg(long)]
        face: Option<String>,
    },
    /// Partition function from level r to level s.
    Partition {
        big_n: usize,
        r: usize,
        s: usize,
        #[arg(long, default_value = "E")]
        family: Family,
    },
}

#[derive(Subcommand, Debug)]
pub enum QdCmd {
    /// W_θ and V_θ at a point of the strip.
    Eval {
        #[arg(long)]
        theta: f64,
        /// Point `x`, `x+yi` or `yi`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Also evaluate φ_ℏ(z).
        #[arg(long, allow_negative_numbers = true)]
        hbar: Option<f64>,
    },
    /// Residuals of the functional equations.
    Check {
        #[arg(long)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = QdSuite::Quick)]
        suite: QdSuite,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyKind {
    Pentagon,
    Mu,
    Zmut,
    Serre,
    #[value(name = "r-eq-f")]
    REqF,
    Decomposition,
    Symmetry,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum QdSuite {
    Quick,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub command: String,
    pub status: Status,
    pub format: Format,
    pub payload: Value,
    pub text: String,
    pub csv: Option<String>,
    pub elapsed: Duration,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "status": self.status.as_str(),
            "payload": self.payload,
        })
    }

    /// The document printed on stdout.
    pub fn render(&self) -> String {
        match self.format {
            Format::Json => serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n",
            Format::Csv => self.csv.clone().unwrap_or_else(|| self.text.clone()),
            Format::Text => {
                let mut s = self.text.clone();
                if !s.is_empty() && !s.ends_with('\n') {
                    s.push('\n');
                }
                if self.status != Status::Error && !self.payload.is_null() {
                    let _ = writeln!(s, "status: {} ({:.2?})", self.status.as_str(), self.elapsed);
                }
                s
            }
        }
    }
}

/// Output of one dispatched command before timing is attached.
struct Out {
    passed: bool,
    payload: Value,
    text: String,
    csv: Option<String>,
}

impl Out {
    fn info(payload: Value, text: String) -> Out {
        Out { passed: true, payload, text, csv: None }
    }

    fn report(r: &Report) -> Out {
        Out { passed: r.passed(), payload: r.to_json(), text: r.to_string(), csv: Some(report_csv(r)) }
    }
}

fn report_csv(r: &Report) -> String {
    let mut s = String::from("label,passed,detail\n");
    for c in &r.checks {
        let _ = writeln!(s, "{},{},{}", csv_field(&c.label), c.passed, csv_field(&c.detail));
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Errors that are the caller's fault (exit 2) vs. anything else.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn run<I, T>(argv: I) -> RunReport
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let command = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    let start = Instant::now();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return RunReport {
                command,
                status: if informational { Status::Pass } else { Status::Error },
                format: Format::Text,
                payload: Value::Null,
                text: e.render().to_string(),
                csv: None,
                elapsed: start.elapsed(),
            };
        }
    };
    let format = cli.format;
    let (status, payload, text, csv) = match dispatch(&cli.command) {
        Ok(o) => (if o.passed { Status::Pass } else { Status::Fail }, o.payload, o.text, o.csv),
        Err(Failure::Usage(m)) => (Status::Error, json!({"error": m, "kind": "usage"}), format!("error: {m}\n"), None),
        // Library errors after a successful parse come from arguments the
        // library rejects (out-of-range faces, θ ≤ 0, ...).
        Err(Failure::Runtime(m)) => (Status::Error, json!({"error": m, "kind": "runtime"}), format!("error: {m}\n"), None),
    };
    RunReport { command, status, format, payload, text, csv, elapsed: start.elapsed() }
}

fn dispatch(cmd: &Command) -> Result<Out, Failure> {
    match cmd {
        Command::Triangle { n, pairings, vectors, verify } => {
            let n = n.get().map_err(usage)?;
            triangle_cmd(n, *pairings, *vectors, *verify || !(*pairings || *vectors))
        }
        Command::Graph { cmd } => graph_cmd(cmd),
        Command::Verify { what, n, seed, budget } => {
            let n = n.get().map_err(usage)?;
            verify_cmd(*what, n, *seed, *budget)
        }
        Command::Snake { n } => {
            if *n == 0 {
                return Err(usage("n must be at least 1"));
            }
            snake_cmd(*n)
        }
        Command::Qdilog { cmd } => qdilog_cmd(cmd),
        Command::Modular { n, hbar } => {
            let n = n.get().map_err(usage)?;
            if *hbar == 0.0 || !hbar.is_finite() {
                return Err(usage(format!("ℏ must be finite and nonzero, got {hbar}")));
            }
            let r = modulardata::modular_report(n, *hbar).map_err(|e| match e {
                ModularError::Hbar(_) => usage(e.to_string()),
                other => Failure::Runtime(other.to_string()),
            })?;
            Ok(Out { passed: r.passed(), payload: r.to_json(), text: r.table(), csv: Some(report_csv(&r.checks)) })
        }
        Command::Suite { level, perturb } => {
            let p = match perturb {
                None => None,
                Some(s) => Some(parse_pair(s).ok_or_else(|| usage(format!("--perturb expects I,J, got {s:?}")))?),
            };
            suite(*level, p)
        }
    }
}

fn parse_pair(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

// ---------------------------------------------------------------------------

fn triangle_cmd(big_n: usize, pairings: bool, vectors: bool, verify: bool) -> Result<Out, Failure> {
    let t = Triangle::new(big_n)?;
    let mut payload = json!({"N": big_n, "labels": t.space().labels().iter().map(|l| l.to_string()).collect::<Vec<_>>()});
    let mut text = String::new();
    let mut passed = true;
    if pairings {
        let m = t.space().matrix();
        payload["pairings"] = json!(m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
        let labels: Vec<String> = t.space().labels().iter().map(|l| l.to_string()).collect();
        let w = labels.iter().map(|l| l.len()).max().unwrap_or(1).max(4);
        let _ = write!(text, "{:>w$}", "");
        for l in &labels {
            let _ = write!(text, " {l:>w$}");
        }
        text.push('\n');
        for (l, row) in labels.iter().zip(m) {
            let _ = write!(text, "{l:>w$}");
            for x in row {
                let _ = write!(text, " {:>w$}", x.to_string());
            }
            text.push('\n');
        }
    }
    if vectors {
        let vs = t.special_vectors();
        payload["vectors"] = Value::Object(vs.iter().map(|(k, v)| (k.clone(), v.to_json())).collect());
        for (k, v) in &vs {
            let _ = writeln!(text, "{k} = {v}");
        }
    }
    if verify {
        let mut r = Report::new(format!("triangle ∇_{big_n}"));
        let tables = pairing_table_report(&t);
        r.check("pairing-law tables", tables.passed(), tables.first_mismatch.clone().unwrap_or_else(|| format!("{} pairings", tables.checked)));
        let det = t.borel_nondegeneracy();
        r.check("B⁻ × B⁺ pairing nondegenerate", triangle::is_nonzero(&det), format!("det = {det}"));
        let sh = t.check_shorthand_identities();
        r.check("shorthand identities", sh.is_ok(), sh.err().unwrap_or_default());
        let fw = triangle::check_fundamental_weight_pairings(&t);
        r.check("fundamental weight pairings", fw.is_ok(), fw.err().unwrap_or_default());
        passed = r.passed();
        payload["verify"] = r.to_json();
        text += &r.to_string();
        return Ok(Out { passed, payload, text, csv: Some(report_csv(&r)) });
    }
    Ok(Out { passed, payload, text, csv: None })
}

fn graph_cmd(cmd: &GraphCmd) -> Result<Out, Failure> {
    match cmd {
        GraphCmd::Build { word } => {
            let w: BraidWord = word.parse().map_err(|e: braidgraph::BraidError| usage(e.to_string()))?;
            let g = graph_from_word(&w);
            let j = g.to_json();
            let text = format!(
                "word {w}: {} vertices, {} edges, {} faces\n",
                j["vertices"].as_array().map_or(0, Vec::len),
                j["edges"].as_array().map_or(0, Vec::len),
                j["faces"].as_array().map_or(0, Vec::len)
            );
            Ok(Out::info(json!({"schema": SCHEMA, "word": w.to_string(), "graph": j}), text))
        }
        GraphCmd::Standard { n, family } => {
            let t = Triangle::new(n.get().map_err(usage)?)?;
            let g = standard_graph(&t, *family);
            let ok = g.check_coloring();
            let mut text = g.to_string();
            let _ = writeln!(text, "coloring: {}", ok.as_ref().map_or_else(|e| e.clone(), |_| "ok".into()));
            Ok(Out { passed: ok.is_ok(), payload: g.to_json(), text, csv: None })
        }
        GraphCmd::Mutate { n, family, face } => {
            let t = Triangle::new(n.get().map_err(usage)?)?;
            let g = standard_graph(&t, *family);
            let f = match face {
                Some(s) => {
                    let (a, b) = parse_pair(s).ok_or_else(|| usage(format!("--face expects strip,cell, got {s:?}")))?;
                    FaceId::new(a, b)
                }
                None => g.mutable_faces().first().map(|x| x.0).ok_or_else(|| Failure::Runtime("no mutable face".into()))?,
            };
            let kind = g.move_kind(f)?;
            let h = g.mutate(f)?;
            let mut r = Report::new(format!("mutation of {f} ({kind:?})"));
            let col = h.check_coloring();
            r.check("mutated graph is a coloring", col.is_ok(), col.err().unwrap_or_default());
            for a in 1..=t.big_n() {
                for b in a + 1..=t.big_n() {
                    let c = wa::verify_zmut(&g, f, a, b)?;
                    r.check(c.label, c.passed, c.detail);
                }
            }
            let text = format!("{h}{r}");
            Ok(Out { passed: r.passed(), payload: json!({"schema": SCHEMA, "face": f.to_string(), "graph": h.to_json(), "checks": r.to_json()}), text, csv: Some(report_csv(&r)) })
        }
        GraphCmd::Partition { big_n, r, s, family } => {
            if *big_n < 2 {
                return Err(usage(format!("N must be at least 2, got {big_n}")));
            }
            let t = Triangle::new(*big_n)?;
            let z = standard_graph(&t, *family).partition_function(*r, *s).map_err(|e| usage(e.to_string()))?;
            Ok(Out::info(json!({"schema": SCHEMA, "N": big_n, "r": r, "s": s, "sum": z.to_json()}), format!("{z}\n")))
        }
    }
}

fn pentagon_report(big_n: usize, budget: usize) -> Result<(Report, Value), Failure> {
    let trace = wa::verify_braided_pentagon(big_n)?;
    let mut r = Report::new(format!("braided pentagon, N={big_n}"));
    r.check("trace", !trace.is_empty(), trace.summary());
    r.check("replay recomputes every pairing", trace.replay().is_ok(), "");
    if big_n <= 3 {
        let fa = FlipAlgebra::new(big_n)?;
        let (l, rhs) = braided_pentagon_sides(&fa);
        let o = rewriting_oracle(&l, &rhs, rhs.len(), budget)?;
        r.check(
            "search oracle reaches the right side",
            o.found,
            format!("{} states, {} pentagon moves", o.states, o.distance.map_or("-".into(), |d| d.to_string())),
        );
    }
    Ok((r, trace.to_json()))
}

fn verify_cmd(what: VerifyKind, big_n: usize, seed: u64, budget: usize) -> Result<Out, Failure> {
    let r = match what {
        VerifyKind::Pentagon => {
            let (r, trace) = pentagon_report(big_n, budget)?;
            let mut o = Out::report(&r);
            o.payload = json!({"schema": SCHEMA, "report": r.to_json(), "trace": trace});
            return Ok(o);
        }
        VerifyKind::Mu => {
            let m = wa::verify_mu_pentagon(big_n)?;
            let mut o = Out::report(&m.report);
            o.payload = m.to_json();
            return Ok(o);
        }
        VerifyKind::Zmut => {
            let mut r = wa::verify_zmut_standard(big_n)?;
            let t = Triangle::new(big_n)?;
            r.absorb("walk: ", wa::verify_zmut_walk(&standard_graph(&t, Family::E), 12, seed)?);
            r
        }
        VerifyKind::Serre => {
            if big_n < 3 {
                return Err(usage("Serre relations need N ≥ 3"));
            }
            let mut r = Report::new(format!("Serre relations, N={big_n}"));
            for i in 2..big_n {
                r.absorb("", wa::verify_serre(big_n, i)?);
            }
            r
        }
        VerifyKind::REqF => wa::verify_r_equals_f(big_n)?,
        VerifyKind::Decomposition => wa::verify_rank_one_decomposition(big_n)?,
        VerifyKind::Symmetry => wa::verify_symmetry_maps(big_n)?,
    };
    Ok(Out::report(&r))
}

fn snake_cmd(n: usize) -> Result<Out, Failure> {
    let red = snake_reduce_doubled(n)?;
    let mut r = Report::new(format!("snake reduction, n={n}"));
    r.check("P_n(2) admissible", red.initial.is_admissible(), "");
    r.check("terminates at P_n with original weights", red.reached_target(), format!("{} mutations", red.schedule.len()));
    let text = format!("P_{n}(2):\n{}\nreduced:\n{}\n{r}", red.initial, red.result);
    Ok(Out {
        passed: r.passed(),
        payload: json!({
            "schema": SCHEMA,
            "n": n,
            "schedule": red.schedule,
            "initial": red.initial.to_json(),
            "result": red.result.to_json(),
            "checks": r.to_json(),
        }),
        text,
        csv: Some(report_csv(&r)),
    })
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn qdilog_cmd(cmd: &QdCmd) -> Result<Out, Failure> {
    match cmd {
        QdCmd::Eval { theta, z, hbar } => {
            let p = QdParams::new(*theta).map_err(|e| usage(e.to_string()))?;
            let z: Complex64 = z.trim().parse().map_err(|_| usage(format!("cannot parse complex number {z:?}")))?;
            let w = qdilog::w_complex(&p, z)?;
            let v = qdilog::v(&p, z)?;
            let mut payload = json!({"schema": SCHEMA, "theta": theta, "z": c_json(z), "W": c_json(w), "V": c_json(v)});
            let mut text = format!("θ = {theta}, z = {z}\nW = {w}\nV = {v}\n|V| = {}\n", v.norm());
            if z.im == 0.0 {
                let wr = qdilog::w_real(&p, z.re)?;
                payload["W_log_form"] = json!(wr.log_form);
                payload["discrepancy"] = json!(wr.discrepancy);
                let _ = writeln!(text, "W (log form) = {}, discrepancy {:e}", wr.log_form, wr.discrepancy);
            }
            if let Some(h) = hbar {
                if *h == 0.0 || !h.is_finite() {
                    return Err(usage("ℏ must be finite and nonzero"));
                }
                let ph = qdilog::phi_complex(*h, z)?;
                payload["phi"] = c_json(ph);
                let _ = writeln!(text, "φ_ℏ = {ph} (ℏ = {h})");
            }
            let csv = format!("theta,re,im,W_re,W_im,V_re,V_im\n{theta},{},{},{},{},{},{}\n", z.re, z.im, w.re, w.im, v.re, v.im);
            Ok(Out { passed: true, payload, text, csv: Some(csv) })
        }
        QdCmd::Check { theta, suite } => {
            QdParams::new(*theta).map_err(|e| usage(e.to_string()))?;
            let s = match suite {
                QdSuite::Quick => Suite::Quick,
                QdSuite::All => Suite::All,
            };
            let rep = qdilog::check_functional_equations(*theta, s)?;
            let mut text = format!("functional equations, θ = {theta}\n");
            for id in rep.identities() {
                let worst = rep.max_residual(Some(&id));
                let tol = rep.residuals.iter().find(|r| r.identity == id).map_or(0.0, |r| r.tolerance);
                let _ = writeln!(text, "  [{}] {id:<22} max residual {worst:.3e} (tol {tol:.0e})", if worst < tol { "ok" } else { "FAIL" });
            }
            let mut payload = serde_json::to_value(&rep)?;
            payload["schema"] = json!(SCHEMA);
            payload["passed"] = json!(rep.passed());
            Ok(Out { passed: rep.passed(), payload, text, csv: Some(rep.to_csv()) })
        }
    }
}

// ---------------------------------------------------------------------------
// Suites

const THETAS: [f64; 5] = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0];

fn call<T>(f: impl FnOnce() -> T) -> T {
    f()
}

fn absorb_item(r: &mut Report, label: String, res: Result<Report, Failure>) {
    match res {
        Ok(sub) => {
            let fails: Vec<String> = sub.failures().iter().map(|c| c.label.clone()).collect();
            let detail = if fails.is_empty() {
                format!("{} checks", sub.checks.len())
            } else {
                format!("failed: {}", fails.join("; "))
            };
            r.check(label, sub.passed(), detail);
        }
        Err(Failure::Usage(m) | Failure::Runtime(m)) => r.check(label, false, m),
    }
}

/// quick: N ≤ 3 verifications and a reduced qdilog grid; full: pentagon
/// N ≤ 4, pairing tables N ≤ 6, snake n ≤ 5, all qdilog identities.
pub fn suite_report(level: Level, perturb: Option<(usize, usize)>) -> Report {
    let full = level == Level::Full;
    let mut r = Report::new(format!("suite {}", if full { "full" } else { "quick" }));
    let table_max = if full { 6 } else { 3 };
    let word_max = if full { 4 } else { 3 };

    for n in 2..=table_max {
        let res = call(|| -> Result<Report, Failure> {
            let mut t = Triangle::new(n)?;
            if let Some((i, j)) = perturb.filter(|&(i, j)| i.max(j) < t.space().dim()) {
                t = t.perturbed(i, j, qi(1))?;
            }
            let mut sub = Report::new("");
            let tr = pairing_table_report(&t);
            sub.check("tables", tr.passed(), tr.first_mismatch.unwrap_or_default());
            sub.check("B⁻ × B⁺ nondegenerate", triangle::is_nonzero(&t.borel_nondegeneracy()), "");
            let fw = triangle::check_fundamental_weight_pairings(&t);
            sub.check("fundamental weights", fw.is_ok(), fw.err().unwrap_or_default());
            Ok(sub)
        });
        absorb_item(&mut r, format!("triangle N={n}"), res);
    }
    for n in 2..=word_max {
        let res = call(|| wa::verify_zmut_standard(n).map_err(Failure::from));
        absorb_item(&mut r, format!("zmut N={n}"), res);
        let res = call(|| pentagon_report(n, 1_000_000).map(|x| x.0));
        absorb_item(&mut r, format!("braided pentagon N={n}"), res);
        let res = call(|| wa::verify_mu_pentagon(n).map(|m| m.report).map_err(Failure::from));
        absorb_item(&mut r, format!("multiplicative unitary N={n}"), res);
        let res = call(|| wa::verify_r_equals_f(n).map_err(Failure::from));
        absorb_item(&mut r, format!("R = F N={n}"), res);
        let res = call(|| wa::verify_symmetry_maps(n).map_err(Failure::from));
        absorb_item(&mut r, format!("symmetries N={n}"), res);
    }
    for n in 2..=if full { 5 } else { 3 } {
        let res = call(|| wa::verify_rank_one_decomposition(n).map_err(Failure::from));
        absorb_item(&mut r, format!("rank-one decomposition N={n}"), res);
    }
    for n in 3..=word_max {
        for i in 2..n {
            let res = call(|| wa::verify_serre(n, i).map_err(Failure::from));
            absorb_item(&mut r, format!("Serre N={n} i={i}"), res);
        }
    }
    for n in 1..=if full { 5 } else { 3 } {
        let res = call(|| snake_cmd(n).map(|o| {
            let mut s = Report::new("");
            s.check("reduction", o.passed, "");
            s
        }));
        absorb_item(&mut r, format!("snake n={n}"), res);
    }
    let thetas: &[f64] = if full { &THETAS } else { &[0.5, 1.0, 2.0] };
    for &th in thetas {
        let res = call(|| -> Result<Report, Failure> {
            let rep = qdilog::check_functional_equations(th, if full { Suite::All } else { Suite::Quick })?;
            let mut s = Report::new("");
            for id in rep.identities() {
                let ok = rep.residuals.iter().filter(|x| x.identity == id).all(|x| x.passed());
                s.check(id.clone(), ok, format!("{:.1e}", rep.max_residual(Some(&id))));
            }
            Ok(s)
        });
        absorb_item(&mut r, format!("qdilog θ={th:.4}"), res);
    }
    let hbars: &[f64] = if full { &[1.0 / 3.0, 0.5, 1.0, 2.0, 3.0, -0.5] } else { &[0.5, 1.0] };
    for n in 2..=if full { 5 } else { 3 } {
        for &h in hbars {
            let res = call(|| modulardata::modular_report(n, h).map(|m| m.checks).map_err(Failure::from));
            absorb_item(&mut r, format!("modular N={n} ℏ={h:.4}"), res);
        }
    }
    r
}

fn suite(level: Level, perturb: Option<(usize, usize)>) -> Result<Out, Failure> {
    if let Some((i, j)) = perturb {
        let d = Triangle::new(if level == Level::Full { 6 } else { 3 })?.space().dim();
        if i == j || i >= d || j >= d {
            return Err(usage(format!("--perturb indices must be distinct and below {d}")));
        }
    }
    Ok(Out::report(&suite_report(level, perturb)))
}
