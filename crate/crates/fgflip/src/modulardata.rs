//! Modular data of the quantum Borel group in closed form.
//!
//! Exponents depending on ℏ are all of the form `c·u` with
//! `c = 1 + |ℏ|⁻¹` and `u` an exact vector of ∇_N. We store `u` and `c`
//! separately so every identity is checked over ℚ:
//!
//! * `2d_l = c Σ_{(a,b,c)∈neC} ac e_{abc} = c Σ_{k<s} (N−s) ne_{s,k}`;
//! * `2d_r = −c Σ ab e_{abc} = −c Σ (N−s) sw_{s,k}`;
//! * `δ = L_δ^{−2c}`, so the δ-exponent is `−2c Σ ϖ̂_i` and equals `2d_r − 2d_l`;
//! * `τ_n = Σ s(N−s) = C(n+2,3)`, `β = sgn ℏ (|ℏ|^{1/2}+|ℏ|^{−1/2})²`,
//!   `ν = e^{−2πβτ_n}`;
//! * the unitary antipode and ρ: `ne_{s,k} ↦ −sw_{s,k}` on B⁻.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg;
use crate::qdilog;
use crate::skewspace::{qi, SkewVector, Q};
use crate::triangle::{Side, Triangle, TriangleError};
use crate::wordalgebra::{FlipAlgebra, Letter, Report, Symmetry, Variant};
use crate::SCHEMA;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModularError {
    #[error("ℏ must be finite and nonzero, got {0}")]
    Hbar(f64),
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error(transparent)]
    Numeric(#[from] qdilog::QdError),
}

/// `C(n+2, 3)`.
pub fn tetrahedral(n: u64) -> u64 {
    n * (n + 1) * (n + 2) / 6
}

/// `Σ_{s=1..n} s(N−s)`, the form the number takes in the computation.
pub fn tau_by_sum(big_n: u64) -> u64 {
    (1..big_n).map(|s| s * (big_n - s)).sum()
}

/// `c = 1 + |ℏ|⁻¹`.
pub fn exponent_scale(hbar: f64) -> f64 {
    1.0 + 1.0 / hbar.abs()
}

pub fn beta(hbar: f64) -> f64 {
    hbar.signum() * (hbar.abs().sqrt() + 1.0 / hbar.abs().sqrt()).powi(2)
}

/// `ν = e^{−2πβτ_n}`.
pub fn scaling_constant(big_n: usize, hbar: f64) -> f64 {
    (-2.0 * PI * beta(hbar) * tetrahedral(big_n as u64 - 1) as f64).exp()
}

/// Linear map on B⁻ in the basis `e_{abc}`, `(a,b,c) ∈ neC_N`.
#[derive(Clone, Debug)]
pub struct BorelMap {
    images: BTreeMap<usize, SkewVector>,
}

impl BorelMap {
    /// The map sending `ne_{s,k} ↦ −sw_{s,k}` for `0 ≤ k ≤ s ≤ n`.
    pub fn antipode(t: &Triangle) -> BorelMap {
        let n = t.n();
        let basis: Vec<usize> = t.ne_cone().iter().map(|&(a, b, c)| t.index(a, b, c).unwrap()).collect();
        let pos: BTreeMap<usize, usize> = basis.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let mut src = Vec::new();
        let mut dst = Vec::new();
        for s in 1..=n {
            for k in 0..=s {
                src.push(t.ne(s, k));
                dst.push(-t.sw(s, k));
            }
        }
        // Columns: coordinates of the ne_{s,k} in the e-basis of B⁻.
        let d = basis.len();
        let mut m = vec![vec![Q::zero(); d]; d];
        for (j, v) in src.iter().enumerate() {
            for (i, x) in v.terms() {
                m[pos[&i]][j] = x;
            }
        }
        let inv = linalg::inverse(&m).expect("the ne_{s,k} form a basis of B⁻");
        let images = basis
            .iter()
            .enumerate()
            .map(|(r, &e)| {
                let mut img = t.space().zero();
                for (j, w) in dst.iter().enumerate() {
                    if !inv[j][r].is_zero() {
                        img += &w.scale(inv[j][r]);
                    }
                }
                (e, img)
            })
            .collect();
        BorelMap { images }
    }

    /// `None` when `v` leaves B⁻.
    pub fn apply(&self, v: &SkewVector) -> Option<SkewVector> {
        let mut out = v.space().zero();
        for (i, x) in v.terms() {
            out += &self.images.get(&i)?.scale(x);
        }
        Some(out)
    }

    pub fn table(&self, t: &Triangle) -> Vec<(String, String)> {
        self.images.iter().map(|(&i, v)| (format!("{}", t.space().label(i)), v.to_string())).collect()
    }
}

/// Exponent vectors and identities for one `(N, ℏ)`.
#[derive(Clone, Debug)]
pub struct ModularReport {
    pub big_n: usize,
    pub hbar: f64,
    /// `c = 1 + |ℏ|⁻¹`.
    pub scale: f64,
    /// `2d_l / c`.
    pub two_dl: SkewVector,
    /// `2d_r / c`.
    pub two_dr: SkewVector,
    /// δ-exponent `/ c`.
    pub delta_exp: SkewVector,
    /// Exponent of `Q̂` (over c) in the first leg.
    pub q_hat: SkewVector,
    /// Exponent of `Q` (over c) in the second leg.
    pub q: SkewVector,
    /// Exponent of the generator of the scaling group (over c).
    pub scaling_generator: SkewVector,
    pub tau: u64,
    pub beta: f64,
    pub nu: f64,
    pub antipode: Vec<(String, String)>,
    pub checks: Report,
}

impl ModularReport {
    pub fn passed(&self) -> bool {
        self.checks.passed()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "N": self.big_n,
            "hbar": self.hbar,
            "scale": self.scale,
            "two_d_l": self.two_dl.to_json(),
            "two_d_r": self.two_dr.to_json(),
            "delta_exponent": self.delta_exp.to_json(),
            "q_hat": self.q_hat.to_json(),
            "q": self.q.to_json(),
            "scaling_generator": self.scaling_generator.to_json(),
            "tau": self.tau,
            "beta": self.beta,
            "nu": self.nu,
            "antipode": self.antipode.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "checks": self.checks.to_json(),
        })
    }

    pub fn table(&self) -> String {
        let c = self.scale;
        let mut s = format!("modular data, N={}, ℏ={}\n", self.big_n, self.hbar);
        s += &format!("  c = 1+|ℏ|⁻¹ = {c}\n");
        s += &format!("  2d_l = c·({})\n", self.two_dl);
        s += &format!("  2d_r = c·({})\n", self.two_dr);
        s += &format!("  δ-exponent = c·({})\n", self.delta_exp);
        s += &format!("  Q̂ exponent = c·({}),  Q exponent = c·({})\n", self.q_hat, self.q);
        s += &format!("  τ_n = {},  β = {},  ν = {:e}\n", self.tau, self.beta, self.nu);
        s += "  unitary antipode:\n";
        for (a, b) in &self.antipode {
            s += &format!("    {a} ↦ {b}\n");
        }
        s += &self.checks.to_string();
        s
    }
}

fn sum(vs: &[SkewVector], t: &Triangle) -> SkewVector {
    vs.iter().fold(t.space().zero(), |acc, v| &acc + v)
}

/// `d_l` characterised by `(d_l, z) = −c Σ(ϖ^se_i, z)` for `z ∈ B⁺`, solved
/// directly from the nondegenerate B⁻ × B⁺ pairing (over c, doubled).
pub fn solve_two_dl(t: &Triangle) -> SkewVector {
    let bm = t.b_minus();
    let bp = t.b_plus();
    let target = sum(&t.fundamental_weights(Side::Se), t).scale(qi(-2));
    let d = bm.len();
    let rows: Vec<Vec<Q>> =
        bp.iter().map(|z| bm.iter().map(|x| x.pair(z)).chain(std::iter::once(target.pair(z))).collect()).collect();
    let mut m = linalg::to_big_matrix(&rows);
    let piv = linalg::rref(&mut m);
    assert!(!piv.contains(&d), "B⁻ × B⁺ pairing is degenerate");
    let mut out = t.space().zero();
    for (row, &col) in piv.iter().enumerate() {
        out += &bm[col].scale(linalg::from_big(&m[row][d]));
    }
    out
}

pub fn modular_report(big_n: usize, hbar: f64) -> Result<ModularReport, ModularError> {
    if !(hbar != 0.0 && hbar.is_finite()) {
        return Err(ModularError::Hbar(hbar));
    }
    let t = Triangle::new(big_n)?;
    let (n, nn) = (t.n(), big_n);
    let c = exponent_scale(hbar);
    let mut r = Report::new(format!("modular data, N={big_n}, ℏ={hbar}"));

    let mut dl_cone = t.space().zero();
    let mut dr_cone = t.space().zero();
    for (a, b, cc) in t.ne_cone() {
        dl_cone += &t.e(a, b, cc).scale(qi((a * cc) as i64));
        dr_cone -= &t.e(a, b, cc).scale(qi((a * b) as i64));
    }
    let mut dl = t.space().zero();
    let mut dr = t.space().zero();
    for s in 1..=n {
        for k in 0..s {
            dl += &t.ne(s, k).scale(qi((nn - s) as i64));
            dr -= &t.sw(s, k).scale(qi((nn - s) as i64));
        }
    }
    r.check("2d_l: Σ ac e_abc = Σ (N−s) ne_{s,k}", dl == dl_cone, dl.to_string());
    r.check("2d_r: −Σ ab e_abc = −Σ (N−s) sw_{s,k}", dr == dr_cone, dr.to_string());
    let solved = solve_two_dl(&t);
    r.check("2d_l is the solution of (d_l, z) = −c Σ(ϖ^se_i, z) on B⁺", solved == dl, solved.to_string());

    let wne = t.fundamental_weights(Side::Ne);
    let wsum = sum(&wne, &t);
    let delta_exp = wsum.scale(qi(-2));
    r.check("2d_r − 2d_l = −2c Σ ϖ̂_i (δ-exponent)", &dr - &dl == delta_exp, delta_exp.to_string());
    let mut ssum = t.space().zero();
    for s in 1..=n {
        ssum += &t.ne_full(s).scale(qi(((nn - s) * s) as i64));
    }
    r.check("Σ (N−s)(sw_{s,k}+ne_{s,k}) = Σ (N−s)s ne_s", &dl - &dr == ssum, "");
    r.check("υ(d_l) = d_r", Symmetry::Upsilon.apply(&t, &dl) == dr, "");

    let grouplike = (1..=n).all(|s| (0..s).all(|k| t.t_minus().iter().all(|v| t.nw(s, k).pair(v).is_zero())));
    r.check("(nw_{s,k}, v) = 0 for v ∈ T⁻ (group-like)", grouplike, "");

    let tau = tetrahedral(n as u64);
    let mut pair_sum = Q::zero();
    for s in 1..=n {
        for k in 0..s {
            for w in &wne {
                pair_sum += t.ne(s, k).pair(w) * qi(2 * (nn - s) as i64);
            }
        }
    }
    r.check("2 Σ (N−s)(ne_{s,k}, ϖ̂_t) = τ_n", pair_sum == qi(tau as i64), format!("{pair_sum} vs {tau}"));
    r.check("τ_n = Σ s(N−s) = C(n+2,3)", tau_by_sum(nn as u64) == tau, tau.to_string());

    // |ℏ (2d_l, δ-exponent)| = β τ_n, with the exact pairing times c².
    let exact = dl.pair(&delta_exp);
    let value = (hbar * c * c * (*exact.numer() as f64 / *exact.denom() as f64)).abs();
    let b = beta(hbar);
    r.check(
        "|ℏ (2d_l, δ-exponent)| = |β| τ_n",
        (value - b.abs() * tau as f64).abs() < 1e-12 * value.max(1.0),
        format!("{value} vs {}", b.abs() * tau as f64),
    );
    let nu = scaling_constant(nn, hbar);
    let nu_neg = scaling_constant(nn, -hbar);
    r.check("ν(ℏ)ν(−ℏ) = 1", (nu * nu_neg - 1.0).abs() < 1e-12, format!("{nu:e}"));

    let anti = BorelMap::antipode(&t);
    let mut inv = true;
    let mut on_ne = true;
    for s in 1..=n {
        for k in 0..=s {
            let img = anti.apply(&t.ne(s, k)).unwrap();
            on_ne &= img == -t.sw(s, k);
            inv &= anti.apply(&img) == Some(t.ne(s, k));
        }
    }
    r.check("R(ne_{s,k}) = −sw_{s,k} on B⁻", on_ne, "");
    r.check("R² = id", inv && t.b_minus().iter().all(|e| anti.apply(&anti.apply(e).unwrap()).as_ref() == Some(e)), "");
    let full = (1..=n).all(|s| anti.apply(&t.ne_full(s)) == Some(-t.ne_full(s)) && t.sw(s, s) == t.ne_full(s));
    r.check("R(ne_s) = −ne_s, since sw_s = ne_s", full, "");
    r.check("ρ(d_l) = d_r", anti.apply(&dl) == Some(dr.clone()), "");
    let bm = t.b_minus();
    let skew = bm.iter().all(|v| {
        let rv = anti.apply(v).unwrap();
        bm.iter().all(|w| rv.pair(w) == -v.pair(&anti.apply(w).unwrap()))
    });
    r.check("(ρv, w) = −(v, ρw) on B⁻", skew, "");

    let basis = t.space().basis_vectors();
    let comp = basis.iter().all(|v| {
        Symmetry::Upsilon.apply(&t, v)
            == Symmetry::Theta.apply(&t, &Symmetry::VarTheta.apply(&t, &Symmetry::Theta.apply(&t, v)))
    });
    r.check("υ = θϑ⁻¹θ", comp, "");

    // Q̂ ⊗ Q against the flip: Q̂ = L_δ^c, Q = K_δ^{−c}.
    let q_hat = wsum.clone();
    let q = -sum(&t.fundamental_weights(Side::Se), &t);
    let fa = FlipAlgebra::from_triangle(t.clone());
    let qq = fa.pair2(&q_hat, &q);
    let ft = fa.factors(Variant::FTilde);
    let dilogs_ok = ft.letters().iter().filter_map(Letter::vector).all(|v| v.pair(&qq).is_zero());
    r.check("Q̂⊗Q exponent pairs to zero with every flip letter", dilogs_ok, format!("{} letters", ft.len() - 1));
    let k_ok = ft.letters()[0].gaussian().is_some_and(|g| g.fixes(&qq));
    r.check("Q̂⊗Q exponent fixed by 𝒦", k_ok, "");

    // φ_{1/ℏ}(z/|ℏ|) = φ_ℏ(z): the coefficient map v ↦ v/ℏ, sign carried by sgn(ℏ).
    let mut dual_err = 0.0f64;
    for x in [-2.0, -0.5, 0.0, 1.0, 3.0] {
        let a = qdilog::phi(1.0 / hbar, x / hbar.abs())?;
        let b = qdilog::phi(hbar, x)?;
        dual_err = dual_err.max((a - b).norm());
    }
    r.check("modular duality φ_{1/ℏ}(z/|ℏ|) = φ_ℏ(z)", dual_err < 1e-8, format!("max residual {dual_err:e}"));

    Ok(ModularReport {
        big_n,
        hbar,
        scale: c,
        two_dl: dl,
        two_dr: dr,
        delta_exp,
        q_hat,
        q,
        scaling_generator: wsum.scale(qi(2)),
        tau,
        beta: b,
        nu,
        antipode: anti.table(&t),
        checks: r,
    })
}
