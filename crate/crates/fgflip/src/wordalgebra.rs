//! Words in quantum dilogarithms and Gaussians, their rewriting rules, and
//! executable versions of the pentagon and factorization arguments.
//!
//! Words are stored left to right as printed, so `[a, b, c]` is the operator
//! `a·b·c`. Letters are
//!
//! * `φ(v)`, `φ(v)*` and `φ̄(v)`: quantum dilogarithms of an exponent `v`;
//! * `𝒢(Σ xᵢ⊗yᵢ)`: a Gaussian. It acts on exponents by
//!   `Ad(w) = w + Σ (yᵢ,w)xᵢ + (xᵢ,w)yᵢ`, and `𝒢φ(w) = φ(Ad w)𝒢`.
//!
//! The rewriting rules are commuting swaps (pairing 0), the pentagon
//! `φ(v)φ(w) = φ(w)φ(v+w)φ(v)` for `(v,w) = 1`, and Gaussian pushes.
//! Gaussians are compared through their adjoint action only. Scalar phases
//! are not tracked.
//!
//! Form sums: conjugation `φ(u)·S·φ(u)*` of `S = ⊞ E(x)` splits every term
//! with `(u,x) = 1` into `E(x) ⊞ E(x+u)`, merges every pair `{y, y+u}` with
//! `(u,y) = −1` into `E(y)`, and fixes pairing-0 terms. The orientation is
//! the one under which the mutated graph's partition function comes out
//! (see [`verify_zmut`]). Merging is forced by the form-sum rule for
//! `−1`-commuting pairs. Splitting is its inverse read on the mutated graph.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use thiserror::Error;

use crate::braidgraph::{
    letters_commute, lex_normal_form, standard_graph, BraidError, BraidWord, FaceId, Family, FormSum,
    LabeledBraidGraph,
};
use crate::linalg;
use crate::skewspace::{conjugate, direct_sum, inject, project, qi, SkewVector, Space, Q};
use crate::triangle::{EmbeddingVN, Side, Triangle, TriangleError};
use crate::SCHEMA;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WordError {
    #[error("{rule} at position {position}: expected pairing {expected}, found {found}")]
    Pairing { rule: Rule, position: usize, expected: Q, found: Q },
    #[error("{rule} at position {position}: {reason}")]
    Shape { rule: Rule, position: usize, reason: String },
    #[error("term {term} has pairing {pairing} with {u}; expected 0 or ±1")]
    Ungrouped { term: String, u: String, pairing: Q },
    #[error("term {0} has no partner")]
    Unpartnered(String),
    #[error("invalid Gaussian: {0}")]
    Gaussian(String),
    #[error("unknown flip variant {0:?}")]
    UnknownVariant(String),
    #[error("hypothesis not established: {0}")]
    Hypothesis(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("search budget of {0} states exhausted")]
    Budget(usize),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error(transparent)]
    Space(#[from] crate::skewspace::SkewError),
}

// ---------------------------------------------------------------------------
// Letters

/// `𝒢(Σ xᵢ ⊗ yᵢ)` with all `xᵢ, yⱼ` mutually orthogonal, legs already placed
/// in the ambient space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gaussian {
    pairs: Vec<(SkewVector, SkewVector)>,
    conj: bool,
}

impl Gaussian {
    pub fn new(pairs: Vec<(SkewVector, SkewVector)>) -> Result<Self, WordError> {
        let Some((x0, _)) = pairs.first() else {
            return Err(WordError::Gaussian("empty tensor".into()));
        };
        let id = x0.space().id();
        if pairs.iter().any(|(x, y)| x.space().id() != id || y.space().id() != id) {
            return Err(WordError::Gaussian("tensor factors live in different spaces".into()));
        }
        let all: Vec<&SkewVector> = pairs.iter().flat_map(|(x, y)| [x, y]).collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                let p = a.pair(b);
                if !p.is_zero() {
                    return Err(WordError::Gaussian(format!("factors {a} and {b} pair to {p}")));
                }
            }
        }
        Ok(Gaussian { pairs, conj: false })
    }

    /// Same tensor, marked as the Gaussian of the conjugate representation.
    pub fn conjugated(mut self) -> Self {
        self.conj = !self.conj;
        self
    }

    pub fn is_conj(&self) -> bool {
        self.conj
    }

    pub fn pairs(&self) -> &[(SkewVector, SkewVector)] {
        &self.pairs
    }

    pub fn space(&self) -> &Space {
        self.pairs[0].0.space()
    }

    pub fn ad(&self, w: &SkewVector) -> SkewVector {
        let mut out = w.clone();
        for (x, y) in &self.pairs {
            out += &x.scale(y.pair(w));
            out += &y.scale(x.pair(w));
        }
        out
    }

    /// Inverse action; the shift is nilpotent of order two.
    pub fn ad_inv(&self, w: &SkewVector) -> SkewVector {
        let mut out = w.clone();
        for (x, y) in &self.pairs {
            out -= &x.scale(y.pair(w));
            out -= &y.scale(x.pair(w));
        }
        out
    }

    pub fn fixes(&self, w: &SkewVector) -> bool {
        self.pairs.iter().all(|(x, y)| x.pair(w).is_zero() && y.pair(w).is_zero())
    }

    /// Coefficients of `Σ xᵢ⊗yᵢ + yᵢ⊗xᵢ`; equal tensors give equal actions.
    pub fn symmetric_tensor(&self) -> BTreeMap<(usize, usize), Q> {
        let mut t: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (x, y) in &self.pairs {
            for (i, a) in x.terms() {
                for (j, b) in y.terms() {
                    *t.entry((i, j)).or_insert_with(Q::zero) += a * b;
                    *t.entry((j, i)).or_insert_with(Q::zero) += a * b;
                }
            }
        }
        t.retain(|_, v| !v.is_zero());
        t
    }

    /// One Gaussian carrying all the tensor terms of `gs`.
    pub fn merge(gs: &[&Gaussian]) -> Result<Gaussian, WordError> {
        Gaussian::new(gs.iter().flat_map(|g| g.pairs.iter().cloned()).collect())
    }

    fn to_json(&self) -> Value {
        json!({
            "conj": self.conj,
            "pairs": self.pairs.iter().map(|(x, y)| json!([x.to_json(), y.to_json()])).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.pairs.iter().map(|(x, y)| format!("({x})⊗({y})")).collect();
        write!(f, "{}({})", if self.conj { "𝒢̄" } else { "𝒢" }, terms.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Dilog(SkewVector),
    DilogInv(SkewVector),
    /// `φ̄(v)`, the dilogarithm with conjugated coefficients.
    DilogConj(SkewVector),
    Gauss(Gaussian),
}

impl Letter {
    pub fn vector(&self) -> Option<&SkewVector> {
        match self {
            Letter::Dilog(v) | Letter::DilogInv(v) | Letter::DilogConj(v) => Some(v),
            Letter::Gauss(_) => None,
        }
    }

    pub fn gaussian(&self) -> Option<&Gaussian> {
        match self {
            Letter::Gauss(g) => Some(g),
            _ => None,
        }
    }

    pub fn space(&self) -> &Space {
        match self {
            Letter::Gauss(g) => g.space(),
            l => l.vector().unwrap().space(),
        }
    }

    /// Same kind of dilogarithm with a new exponent.
    pub fn with_vector(&self, v: SkewVector) -> Letter {
        match self {
            Letter::Dilog(_) => Letter::Dilog(v),
            Letter::DilogInv(_) => Letter::DilogInv(v),
            Letter::DilogConj(_) => Letter::DilogConj(v),
            Letter::Gauss(_) => panic!("a Gaussian has no exponent vector"),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Letter::Dilog(v) => json!({"kind": "dilog", "v": v.to_json()}),
            Letter::DilogInv(v) => json!({"kind": "dilog_inv", "v": v.to_json()}),
            Letter::DilogConj(v) => json!({"kind": "dilog_conj", "v": v.to_json()}),
            Letter::Gauss(g) => json!({"kind": "gauss", "tensor": g.to_json()}),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Dilog(v) => write!(f, "φ({v})"),
            Letter::DilogInv(v) => write!(f, "φ({v})*"),
            Letter::DilogConj(v) => write!(f, "φ̄({v})"),
            Letter::Gauss(g) => write!(f, "{g}"),
        }
    }
}

/// Exact commutation: dilogarithms with pairing 0, a Gaussian and a
/// dilogarithm it fixes, or Gaussians whose factors are all orthogonal.
pub fn commutes(a: &Letter, b: &Letter) -> bool {
    match (a, b) {
        (Letter::Gauss(g), Letter::Gauss(h)) => g.pairs.iter().all(|(x, y)| {
            h.pairs.iter().all(|(u, v)| [x.pair(u), x.pair(v), y.pair(u), y.pair(v)].iter().all(Q::is_zero))
        }),
        (Letter::Gauss(g), l) | (l, Letter::Gauss(g)) => g.fixes(l.vector().unwrap()),
        _ => a.vector().unwrap().pair(b.vector().unwrap()).is_zero(),
    }
}

// ---------------------------------------------------------------------------
// Words and rewriting

#[derive(Clone, Debug)]
pub struct OperatorWord {
    space: Space,
    letters: Vec<Letter>,
}

impl PartialEq for OperatorWord {
    fn eq(&self, other: &Self) -> bool {
        self.space.id() == other.space.id() && self.letters == other.letters
    }
}

impl Eq for OperatorWord {}

impl OperatorWord {
    pub fn new(space: &Space, letters: Vec<Letter>) -> Result<Self, WordError> {
        if let Some(l) = letters.iter().find(|l| l.space().id() != space.id()) {
            return Err(WordError::Mismatch(format!("letter {l} is not over the word's space")));
        }
        Ok(OperatorWord { space: space.clone(), letters })
    }

    pub fn dilogs(space: &Space, vs: impl IntoIterator<Item = SkewVector>) -> Result<Self, WordError> {
        OperatorWord::new(space, vs.into_iter().map(Letter::Dilog).collect())
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &OperatorWord) -> Result<OperatorWord, WordError> {
        let mut l = self.letters.clone();
        l.extend(other.letters.iter().cloned());
        OperatorWord::new(&self.space, l)
    }

    /// Lexicographic normal form of the trace (commutation) class.
    pub fn canonical(&self) -> Vec<Letter> {
        lex_normal_form(&self.letters, commutes)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.letters.iter().map(Letter::to_json).collect())
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" · "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Swap,
    PentagonForward,
    PentagonBackward,
    /// `φ(w)·𝒢 → 𝒢·φ(Ad⁻¹w)`.
    PushLeft,
    /// `𝒢·φ(w) → φ(Ad w)·𝒢`.
    PushRight,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Swap => "swap",
            Rule::PentagonForward => "pentagon",
            Rule::PentagonBackward => "pentagon-inverse",
            Rule::PushLeft => "push-left",
            Rule::PushRight => "push-right",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Rule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "swap" => Ok(Rule::Swap),
            "pentagon" => Ok(Rule::PentagonForward),
            "pentagon-inverse" => Ok(Rule::PentagonBackward),
            "push-left" => Ok(Rule::PushLeft),
            "push-right" => Ok(Rule::PushRight),
            _ => Err(format!("unknown rule {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Push {
    Left,
    Right,
}

struct Rewrite {
    consumed: usize,
    replacement: Vec<Letter>,
    pairing: Option<Q>,
}

fn plain_dilog(l: &Letter) -> Option<&SkewVector> {
    match l {
        Letter::Dilog(v) => Some(v),
        _ => None,
    }
}

/// Applies one rule at `pos`, checking its precondition from scratch.
fn rewrite(letters: &[Letter], rule: Rule, pos: usize) -> Result<Rewrite, WordError> {
    let shape = |reason: &str| WordError::Shape { rule, position: pos, reason: reason.to_string() };
    let need = match rule {
        Rule::PentagonBackward => 3,
        _ => 2,
    };
    if pos + need > letters.len() {
        return Err(shape("window runs past the end of the word"));
    }
    let w = &letters[pos..pos + need];
    match rule {
        Rule::Swap => {
            let pairing = match (w[0].vector(), w[1].vector()) {
                (Some(a), Some(b)) => Some(a.pair(b)),
                _ => None,
            };
            if !commutes(&w[0], &w[1]) {
                return Err(match pairing {
                    Some(p) => WordError::Pairing { rule, position: pos, expected: Q::zero(), found: p },
                    None => shape("the Gaussian does not commute with its neighbour"),
                });
            }
            Ok(Rewrite { consumed: 2, replacement: vec![w[1].clone(), w[0].clone()], pairing })
        }
        Rule::PentagonForward => {
            let (Some(v), Some(u)) = (plain_dilog(&w[0]), plain_dilog(&w[1])) else {
                return Err(shape("needs two dilogarithms"));
            };
            let p = v.pair(u);
            if p != Q::one() {
                return Err(WordError::Pairing { rule, position: pos, expected: Q::one(), found: p });
            }
            let replacement = vec![Letter::Dilog(u.clone()), Letter::Dilog(v + u), Letter::Dilog(v.clone())];
            Ok(Rewrite { consumed: 2, replacement, pairing: Some(p) })
        }
        Rule::PentagonBackward => {
            let (Some(u), Some(m), Some(v)) = (plain_dilog(&w[0]), plain_dilog(&w[1]), plain_dilog(&w[2])) else {
                return Err(shape("needs three dilogarithms"));
            };
            let p = v.pair(u);
            if p != Q::one() {
                return Err(WordError::Pairing { rule, position: pos, expected: Q::one(), found: p });
            }
            if *m != v + u {
                return Err(shape("middle exponent is not the sum of the outer ones"));
            }
            Ok(Rewrite { consumed: 3, replacement: vec![Letter::Dilog(v.clone()), Letter::Dilog(u.clone())], pairing: Some(p) })
        }
        Rule::PushLeft => {
            let (Some(v), Letter::Gauss(g)) = (w[0].vector(), &w[1]) else {
                return Err(shape("needs a dilogarithm followed by a Gaussian"));
            };
            let moved = w[0].with_vector(g.ad_inv(v));
            Ok(Rewrite { consumed: 2, replacement: vec![w[1].clone(), moved], pairing: None })
        }
        Rule::PushRight => {
            let (Letter::Gauss(g), Some(v)) = (&w[0], w[1].vector()) else {
                return Err(shape("needs a Gaussian followed by a dilogarithm"));
            };
            let moved = w[1].with_vector(g.ad(v));
            Ok(Rewrite { consumed: 2, replacement: vec![moved, w[0].clone()], pairing: None })
        }
    }
}

fn splice(word: &OperatorWord, pos: usize, r: Rewrite) -> OperatorWord {
    let mut l = word.letters[..pos].to_vec();
    l.extend(r.replacement);
    l.extend(word.letters[pos + r.consumed..].iter().cloned());
    OperatorWord { space: word.space.clone(), letters: l }
}

pub fn apply_pentagon(word: &OperatorWord, position: usize, direction: Direction) -> Result<OperatorWord, WordError> {
    let rule = match direction {
        Direction::Forward => Rule::PentagonForward,
        Direction::Backward => Rule::PentagonBackward,
    };
    Ok(splice(word, position, rewrite(&word.letters, rule, position)?))
}

/// Moves the Gaussian of the pair starting at `position` across its
/// dilogarithm neighbour.
pub fn gauss_push(word: &OperatorWord, position: usize, direction: Push) -> Result<OperatorWord, WordError> {
    let rule = match direction {
        Push::Left => Rule::PushLeft,
        Push::Right => Rule::PushRight,
    };
    Ok(splice(word, position, rewrite(&word.letters, rule, position)?))
}

pub fn swap(word: &OperatorWord, position: usize) -> Result<OperatorWord, WordError> {
    Ok(splice(word, position, rewrite(&word.letters, Rule::Swap, position)?))
}

/// Equality modulo swaps of adjacent commuting letters.
pub fn trace_monoid_equal(a: &OperatorWord, b: &OperatorWord) -> bool {
    if a.space.id() != b.space.id() || a.len() != b.len() {
        return false;
    }
    let mut x = a.letters.clone();
    let mut y = b.letters.clone();
    x.sort();
    y.sort();
    x == y && a.canonical() == b.canonical()
}

#[derive(Clone, Debug)]
pub struct Step {
    pub rule: Rule,
    pub position: usize,
    /// Pairing of the two exponents involved, when the rule has one.
    pub pairing: Option<Q>,
    pub before: Vec<Letter>,
    pub after: Vec<Letter>,
}

/// Log of a rewriting derivation. Every step is checked as it is applied
/// and again by [`RewriteTrace::replay`].
#[derive(Clone, Debug)]
pub struct RewriteTrace {
    initial: OperatorWord,
    current: OperatorWord,
    steps: Vec<Step>,
    marks: Vec<(usize, String)>,
}

impl RewriteTrace {
    pub fn new(word: OperatorWord) -> Self {
        RewriteTrace { current: word.clone(), initial: word, steps: Vec::new(), marks: Vec::new() }
    }

    pub fn initial(&self) -> &OperatorWord {
        &self.initial
    }

    pub fn current(&self) -> &OperatorWord {
        &self.current
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn marks(&self) -> &[(usize, String)] {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.steps.iter().filter(|s| s.rule == rule).count()
    }

    pub fn mark(&mut self, label: impl Into<String>) {
        self.marks.push((self.steps.len(), label.into()));
    }

    pub fn apply(&mut self, rule: Rule, position: usize) -> Result<(), WordError> {
        let r = rewrite(&self.current.letters, rule, position)?;
        let before = self.current.letters[position..position + r.consumed].to_vec();
        let step = Step { rule, position, pairing: r.pairing, before, after: r.replacement.clone() };
        self.current = splice(&self.current, position, r);
        self.steps.push(step);
        Ok(())
    }

    /// Rearranges `current[start..start+target.len()]` into `target` by
    /// adjacent commuting swaps.
    pub fn commute_window(&mut self, start: usize, target: &[Letter]) -> Result<(), WordError> {
        let end = start + target.len();
        if end > self.current.len() {
            return Err(WordError::Mismatch(format!("window {start}..{end} runs past the end of the word")));
        }
        for (i, t) in target.iter().enumerate() {
            let p = start + i;
            let j = (p..end)
                .find(|&j| self.current.letters[j] == *t)
                .ok_or_else(|| WordError::Mismatch(format!("letter {t} not found in positions {p}..{end}")))?;
            for q in (p..j).rev() {
                self.apply(Rule::Swap, q)?;
            }
        }
        Ok(())
    }

    pub fn commute_to(&mut self, target: &[Letter]) -> Result<(), WordError> {
        if target.len() != self.current.len() {
            return Err(WordError::Mismatch(format!(
                "target has {} letters, word has {}",
                target.len(),
                self.current.len()
            )));
        }
        self.commute_window(0, target)
    }

    /// Moves every Gaussian to the left until it meets another Gaussian or
    /// the start of the word; Gaussians keep their relative order.
    pub fn push_gaussians_left(&mut self) -> Result<(), WordError> {
        let mut settled = 0;
        let mut i = 0;
        while i < self.current.len() {
            if matches!(self.current.letters[i], Letter::Gauss(_)) {
                let mut p = i;
                while p > settled {
                    self.apply(Rule::PushLeft, p - 1)?;
                    p -= 1;
                }
                settled += 1;
            }
            i += 1;
        }
        Ok(())
    }

    /// Re-executes every step from the initial word, recomputing pairings.
    pub fn replay(&self) -> Result<OperatorWord, WordError> {
        let mut w = self.initial.clone();
        for (k, s) in self.steps.iter().enumerate() {
            let r = rewrite(&w.letters, s.rule, s.position)?;
            let before = &w.letters[s.position..s.position + r.consumed];
            if before != s.before.as_slice() || r.replacement != s.after || r.pairing != s.pairing {
                return Err(WordError::Mismatch(format!("step {k} ({}) does not replay", s.rule)));
            }
            w = splice(&w, s.position, r);
        }
        if w != self.current {
            return Err(WordError::Mismatch("replay ends at a different word".into()));
        }
        Ok(w)
    }

    pub fn to_json(&self) -> Value {
        let q = |p: &Option<Q>| p.map(|x| Value::String(x.to_string())).unwrap_or(Value::Null);
        json!({
            "schema": SCHEMA,
            "initial": self.initial.to_json(),
            "final": self.current.to_json(),
            "steps": self.steps.iter().map(|s| json!({
                "rule": s.rule.to_string(),
                "position": s.position,
                "pairing": q(&s.pairing),
                "before": s.before.iter().map(Letter::to_json).collect::<Vec<_>>(),
                "after": s.after.iter().map(Letter::to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "marks": self.marks.iter().map(|(i, l)| json!({"step": i, "label": l})).collect::<Vec<_>>(),
        })
    }

    pub fn summary(&self) -> String {
        format!(
            "{} steps: {} swaps, {} pentagons, {} inverse pentagons, {} Gaussian pushes",
            self.len(),
            self.count(Rule::Swap),
            self.count(Rule::PentagonForward),
            self.count(Rule::PentagonBackward),
            self.count(Rule::PushLeft) + self.count(Rule::PushRight)
        )
    }
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), checks: Vec::new() }
    }

    pub fn check(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { label: label.into(), passed, detail: detail.into() });
    }

    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for c in other.checks {
            self.checks.push(Check { label: format!("{prefix}{}", c.label), ..c });
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "title": self.title,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({"label": c.label, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.title, if self.passed() { "pass" } else { "FAIL" })?;
        for c in &self.checks {
            write!(f, "  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.label)?;
            if !c.detail.is_empty() {
                write!(f, " ({})", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Form sums and graph mutations

/// `φ(u)·S·φ(u)*` (forward) or `φ(u)*·S·φ(u)` (backward), see the module
/// documentation.
pub fn conjugate_formsum_by_dilog(s: &FormSum, u: &SkewVector, direction: Direction) -> Result<FormSum, WordError> {
    let (split, merge) = match direction {
        Direction::Forward => (Q::one(), -Q::one()),
        Direction::Backward => (-Q::one(), Q::one()),
    };
    let mut out = Vec::new();
    let mut pool: BTreeMap<SkewVector, usize> = BTreeMap::new();
    for t in s.terms() {
        let p = u.pair(t);
        if p.is_zero() {
            out.push(t.clone());
        } else if p == split {
            out.push(t.clone());
            out.push(t + u);
        } else if p == merge {
            *pool.entry(t.clone()).or_default() += 1;
        } else {
            return Err(WordError::Ungrouped { term: t.to_string(), u: u.to_string(), pairing: p });
        }
    }
    // Terms y, y+u, y+2u, ... form chains; pair them up from the chain start.
    let take = |pool: &mut BTreeMap<SkewVector, usize>, v: &SkewVector| -> bool {
        match pool.get_mut(v) {
            Some(c) => {
                *c -= 1;
                if *c == 0 {
                    pool.remove(v);
                }
                true
            }
            None => false,
        }
    };
    while let Some(y) = pool.keys().find(|y| !pool.contains_key(&(*y - u))).cloned() {
        take(&mut pool, &y);
        if !take(&mut pool, &(&y + u)) {
            return Err(WordError::Unpartnered(y.to_string()));
        }
        out.push(y);
    }
    Ok(FormSum::new(s.space(), out))
}

/// Lemma check for one face and boundary pair: conjugating `Z(Γ; a, b)` by
/// the face's dilogarithm gives `Z(μ(Γ); a, b)`.
pub fn verify_zmut(g: &LabeledBraidGraph, face: FaceId, a: usize, b: usize) -> Result<Check, WordError> {
    let u = g.label(face)?.clone();
    let mutated = g.mutate(face)?;
    let before = g.partition_function(a, b)?;
    let after = mutated.partition_function(a, b)?;
    let conj = conjugate_formsum_by_dilog(&before, &u, Direction::Forward)?;
    Ok(Check {
        label: format!("face {face}, boundaries ({a},{b})"),
        passed: conj == after,
        detail: if conj == after { format!("{} terms", after.len()) } else { format!("got {conj}, expected {after}") },
    })
}

/// [`verify_zmut`] for every mutable face of `g` and every boundary pair.
pub fn verify_zmut_graph(g: &LabeledBraidGraph, name: &str) -> Result<Report, WordError> {
    let mut r = Report::new(format!("mutation conjugation on {name}"));
    let m = g.strands();
    for (face, kind) in g.mutable_faces() {
        for a in 1..m {
            for b in a + 1..=m {
                let mut c = verify_zmut(g, face, a, b)?;
                c.label = format!("{name} {kind:?} {}", c.label);
                r.checks.push(c);
            }
        }
    }
    Ok(r)
}

/// All mutable faces of `Γ_𝔼` and `Γ_𝔽`.
pub fn verify_zmut_standard(big_n: usize) -> Result<Report, WordError> {
    let t = Triangle::new(big_n)?;
    let mut r = Report::new(format!("mutation conjugation, N={big_n}"));
    for fam in [Family::E, Family::F] {
        let g = standard_graph(&t, fam);
        r.absorb("", verify_zmut_graph(&g, &format!("Γ_{fam:?}"))?);
    }
    Ok(r)
}

/// Random walk of `steps` mutations from `g`, checking every mutable face
/// of every visited graph. Deterministic in `seed`.
pub fn verify_zmut_walk(g: &LabeledBraidGraph, steps: usize, seed: u64) -> Result<Report, WordError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut r = Report::new(format!("mutation conjugation along a random walk (seed {seed})"));
    let mut cur = g.clone();
    for k in 0..=steps {
        r.absorb(&format!("step {k}: "), verify_zmut_graph(&cur, "Γ")?);
        let faces = cur.mutable_faces();
        if faces.is_empty() || k == steps {
            break;
        }
        let (f, _) = faces[rng.random_range(0..faces.len())];
        cur = cur.mutate(f)?;
    }
    Ok(r)
}

/// Breadth-first search over braid and Demazure moves for a graph whose
/// word satisfies `goal`. Returns the faces mutated, in order.
pub fn search_moves(
    g: &LabeledBraidGraph,
    goal: impl Fn(&BraidWord) -> bool,
    budget: usize,
) -> Result<Vec<FaceId>, WordError> {
    type Key = (Vec<usize>, Vec<Vec<SkewVector>>);
    let key = |h: &LabeledBraidGraph| -> Key { (h.word().canonical().letters().to_vec(), h.labels().to_vec()) };
    let mut seen: HashSet<Key> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(key(g));
    queue.push_back((g.clone(), Vec::new()));
    while let Some((h, path)) = queue.pop_front() {
        if goal(h.word()) {
            return Ok(path);
        }
        for (f, _) in h.mutable_faces() {
            let next = h.mutate(f)?;
            if seen.insert(key(&next)) {
                if seen.len() > budget {
                    return Err(WordError::Budget(budget));
                }
                let mut p = path.clone();
                p.push(f);
                queue.push_back((next, p));
            }
        }
    }
    Err(WordError::Hypothesis("no sequence of moves reaches the goal".into()))
}

/// The word equals `σ₁σ₂⋯σ_{m−1}·i'` modulo commutation, with `σ_{m−1} ∉ i'`.
pub fn has_staircase_prefix(w: &BraidWord) -> bool {
    let m = w.strands();
    let mut rest = w.letters().to_vec();
    for p in 1..m {
        let Some(idx) = rest.iter().position(|&x| x == p) else {
            return false;
        };
        if !rest[..idx].iter().all(|&x| letters_commute(x, p)) {
            return false;
        }
        rest.remove(idx);
    }
    !rest.contains(&(m - 1))
}

/// Establishes the prefix hypothesis of the product expansion by finding
/// the moves; returns them.
pub fn prefix_hypothesis(g: &LabeledBraidGraph) -> Result<Vec<FaceId>, WordError> {
    search_moves(g, has_staircase_prefix, 100_000)
        .map_err(|e| WordError::Hypothesis(format!("word {}: {e}", g.word())))
}

/// `F̄(Z_{Γ₁×Γ₂})` as the product of `φ(w_{p₁} ⊕ w_{p₂})` over path pairs
/// from the top line to the bottom line, smallest pair right-most.
/// `ambient` must be a two-summand direct sum matching the label spaces.
pub fn dilog_product_expansion(
    g1: &LabeledBraidGraph,
    g2: &LabeledBraidGraph,
    ambient: &Space,
) -> Result<OperatorWord, WordError> {
    let blocks = ambient.blocks();
    if blocks.len() != 2 || blocks[0].1 != g1.space().dim() || blocks[1].1 != g2.space().dim() {
        return Err(WordError::Mismatch("ambient space is not V₁ ⊕ V₂".into()));
    }
    prefix_hypothesis(g1)?;
    prefix_hypothesis(g2)?;
    let mut p1 = g1.enumerate_paths(1, g1.strands())?;
    let mut p2 = g2.enumerate_paths(1, g2.strands())?;
    p1.sort_by(|x, y| x.order(y));
    p2.sort_by(|x, y| x.order(y));
    let mut letters = Vec::with_capacity(p1.len() * p2.len());
    for a in &p1 {
        for b in &p2 {
            letters.push(Letter::Dilog(&inject(ambient, 0, &a.weight) + &inject(ambient, 1, &b.weight)));
        }
    }
    letters.reverse();
    OperatorWord::new(ambient, letters)
}

/// Cor. (Serre relations): both pairs of generators become single
/// exponentials with pairing 1/2 after suitable moves on `Γ_{𝔼_{i−1,i+1}}`.
pub fn verify_serre(big_n: usize, i: usize) -> Result<Report, WordError> {
    if !(2 <= i && i < big_n) {
        return Err(WordError::Mismatch(format!("need 2 ≤ i ≤ N−1, got i={i}, N={big_n}")));
    }
    let t = Triangle::new(big_n)?;
    let g = standard_graph(&t, Family::E).subgraph(i - 1, i + 1)?;
    let mut r = Report::new(format!("Serre relations, N={big_n}, i={i}"));
    // (target word, first boundary pair, second boundary pair)
    let cases = [
        (vec![2, 1, 2], (1, 3), (1, 2), "(E_{i-1,i+1}, E_{i-1,i})"),
        (vec![1, 2, 1], (2, 3), (1, 3), "(E_{i,i+1}, E_{i-1,i+1})"),
    ];
    for (target, first, second, name) in cases {
        let target = BraidWord::new(3, target)?;
        let moves = search_moves(&g, |w| w.commutation_equivalent(&target), 100_000)?;
        let mut cur = g.clone();
        let mut z1 = cur.partition_function(first.0, first.1)?;
        let mut z2 = cur.partition_function(second.0, second.1)?;
        let mut consistent = true;
        for f in &moves {
            let u = cur.label(*f)?.clone();
            cur = cur.mutate(*f)?;
            z1 = conjugate_formsum_by_dilog(&z1, &u, Direction::Forward)?;
            z2 = conjugate_formsum_by_dilog(&z2, &u, Direction::Forward)?;
            consistent &= z1 == cur.partition_function(first.0, first.1)?
                && z2 == cur.partition_function(second.0, second.1)?;
        }
        r.check(format!("{name}: conjugations match the mutated graphs"), consistent, format!("{} moves", moves.len()));
        if z1.len() != 1 || z2.len() != 1 {
            r.check(format!("{name}: single exponentials"), false, format!("{z1} and {z2}"));
            continue;
        }
        let p = z1.terms()[0].pair(&z2.terms()[0]);
        r.check(format!("{name}: pairing 1/2"), p == Q::new(1, 2), format!("({}, {}) = {p}", z1.terms()[0], z2.terms()[0]));
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Flip factorizations

/// Index orders of the products defining the braided flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipForm {
    /// r, then b ≥ r, then i ≤ r (the defining order).
    F1,
    /// b, then r ≤ b, then i ≤ r.
    F2,
    /// b, then r ≤ n−b+1, then i ≤ r, letter `B^{n−r+i, b+i−1, i}`.
    F3,
    /// r, then j ≤ r, then c ≤ n−r+1, letter `B^{n−c+1, r, r−j+1}`.
    F4,
    /// b, then r ≤ n−b+1, then i ≤ r, letter `B^{b+r−1, b+i−1, i}`.
    F5,
}

pub fn flip_form_indices(n: usize, form: FlipForm) -> Vec<(usize, usize, usize)> {
    let mut v = Vec::new();
    match form {
        FlipForm::F1 => {
            for r in 1..=n {
                for b in r..=n {
                    for i in 1..=r {
                        v.push((b, r, i));
                    }
                }
            }
        }
        FlipForm::F2 => {
            for b in 1..=n {
                for r in 1..=b {
                    for i in 1..=r {
                        v.push((b, r, i));
                    }
                }
            }
        }
        FlipForm::F3 | FlipForm::F5 => {
            for b in 1..=n {
                for r in 1..=n - b + 1 {
                    for i in 1..=r {
                        v.push(if form == FlipForm::F3 { (n - r + i, b + i - 1, i) } else { (b + r - 1, b + i - 1, i) });
                    }
                }
            }
        }
        FlipForm::F4 => {
            for r in 1..=n {
                for j in 1..=r {
                    for c in 1..=n - r + 1 {
                        v.push((n - c + 1, r, r - j + 1));
                    }
                }
            }
        }
    }
    v
}

/// Leg placement in a triple tensor product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Legs {
    L12,
    L13,
    L23,
}

impl Legs {
    fn parts(self) -> (usize, usize) {
        match self {
            Legs::L12 => (0, 1),
            Legs::L13 => (0, 2),
            Legs::L23 => (1, 2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// The braided flip 𝔽.
    F,
    /// 𝔽'' with 𝔽̃ = 𝔽''𝒦.
    FDoublePrime,
    K,
    /// 𝔽̃ = 𝒦𝔽.
    FTilde,
    /// The modular partner's 𝔽' (first leg conjugate).
    TildeFPrime,
    /// The modular partner's 𝔽''.
    TildeFDoublePrime,
    /// The modular partner's Gaussian.
    TildeK,
    /// The dual flip 𝒦̂𝔽̂.
    Dual,
}

impl FromStr for Variant {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, WordError> {
        Ok(match s {
            "F" => Variant::F,
            "F''" | "Fpp" => Variant::FDoublePrime,
            "K" => Variant::K,
            "Ft" | "FTilde" | "tildeF" => Variant::FTilde,
            "tF'" | "tildeF'" | "tFp" => Variant::TildeFPrime,
            "tF''" | "tildeF''" | "tFpp" => Variant::TildeFDoublePrime,
            "tK" | "tildeK" => Variant::TildeK,
            "dual" => Variant::Dual,
            _ => return Err(WordError::UnknownVariant(s.to_string())),
        })
    }
}

/// ∇_N together with the tensor-power spaces the flip words live in.
#[derive(Clone, Debug)]
pub struct FlipAlgebra {
    t: Triangle,
    two: Space,
    three: Space,
    /// `∇̄_N ⊕ ∇_N`, for the modular partner.
    bar_two: Space,
}

impl FlipAlgebra {
    pub fn new(big_n: usize) -> Result<Self, WordError> {
        Ok(Self::from_triangle(Triangle::new(big_n)?))
    }

    pub fn from_triangle(t: Triangle) -> Self {
        let s = t.space().clone();
        let two = direct_sum(&[s.clone(), s.clone()], &[]).expect("direct sum");
        let three = direct_sum(&[s.clone(), s.clone(), s.clone()], &[]).expect("direct sum");
        let bar_two = direct_sum(&[conjugate(&s), s], &[]).expect("direct sum");
        FlipAlgebra { t, two, three, bar_two }
    }

    pub fn triangle(&self) -> &Triangle {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.t.n()
    }

    pub fn two(&self) -> &Space {
        &self.two
    }

    pub fn three(&self) -> &Space {
        &self.three
    }

    pub fn bar_two(&self) -> &Space {
        &self.bar_two
    }

    /// `(ne_{b−i+1,b−r}, se_{n−b+i,n−b})`, the legs of `B^{b,r,i}`.
    pub fn b_vectors(&self, b: usize, r: usize, i: usize) -> (SkewVector, SkewVector) {
        let n = self.n();
        assert!(1 <= i && i <= r && r <= b && b <= n, "B^{{{b},{r},{i}}} out of range");
        (self.t.ne(b - i + 1, b - r), self.t.se(n - b + i, n - b))
    }

    pub fn pair2(&self, x: &SkewVector, y: &SkewVector) -> SkewVector {
        &inject(&self.two, 0, x) + &inject(&self.two, 1, y)
    }

    fn legs3(&self, legs: Legs, x: &SkewVector, y: &SkewVector) -> SkewVector {
        let (p, q) = legs.parts();
        &inject(&self.three, p, x) + &inject(&self.three, q, y)
    }

    pub fn b(&self, b: usize, r: usize, i: usize) -> Letter {
        let (x, y) = self.b_vectors(b, r, i);
        Letter::Dilog(self.pair2(&x, &y))
    }

    /// `B^{b,r,i}` placed on two of three legs.
    pub fn b_legs(&self, legs: Legs, b: usize, r: usize, i: usize) -> Letter {
        let (x, y) = self.b_vectors(b, r, i);
        Letter::Dilog(self.legs3(legs, &x, &y))
    }

    /// `B_{[13]}^{b,r,i} = φ(ne_{b−i+1,b−r} ⊕ ne_{b−i+1} ⊕ se_{n−b+i,n−b})`.
    pub fn b13(&self, b: usize, r: usize, i: usize) -> Letter {
        let (x, y) = self.b_vectors(b, r, i);
        let mid = self.t.ne_full(b - i + 1);
        Letter::Dilog(&self.legs3(Legs::L13, &x, &y) + &inject(&self.three, 1, &mid))
    }

    pub fn f_word(&self, form: FlipForm) -> OperatorWord {
        let l = flip_form_indices(self.n(), form).into_iter().map(|(b, r, i)| self.b(b, r, i)).collect();
        OperatorWord::new(&self.two, l).expect("letters over ∇⊕∇")
    }

    pub fn f_legs(&self, legs: Legs, form: FlipForm) -> Vec<Letter> {
        flip_form_indices(self.n(), form).into_iter().map(|(b, r, i)| self.b_legs(legs, b, r, i)).collect()
    }

    pub fn f_braided13(&self, form: FlipForm) -> Vec<Letter> {
        flip_form_indices(self.n(), form).into_iter().map(|(b, r, i)| self.b13(b, r, i)).collect()
    }

    /// The second displayed form: r, s, k with 0 ≤ (n−r)−k ≤ n−s.
    pub fn f_by_s_k(&self) -> OperatorWord {
        let (n, nn) = (self.n(), self.t.big_n());
        let mut l = Vec::new();
        for r in 1..=n {
            for s in 1..=n {
                for k in 0..s {
                    if k <= n - r && n - r - k <= n - s {
                        l.push(Letter::Dilog(self.pair2(&self.t.ne(s, k), &self.t.se(nn - s, n - r - k))));
                    }
                }
            }
        }
        OperatorWord::new(&self.two, l).unwrap()
    }

    /// The third displayed form, with the roles of the indices exchanged.
    pub fn f_by_s_k_swapped(&self) -> OperatorWord {
        let (n, nn) = (self.n(), self.t.big_n());
        let mut l = Vec::new();
        for r in 1..=n {
            for s in 1..=n {
                for k in 0..s {
                    if k <= n - r && n - r - k <= n - s {
                        l.push(Letter::Dilog(self.pair2(&self.t.ne(nn - s, n - r - k), &self.t.se(s, k))));
                    }
                }
            }
        }
        OperatorWord::new(&self.two, l).unwrap()
    }

    /// `∏_{(s,k) ∈ I₁} ∏_{r=s..n} φ(ne_{s,k} ⊕ se_{N−s,n−r})` in the order of I.
    pub fn f_by_index_set(&self) -> OperatorWord {
        let (n, nn) = (self.n(), self.t.big_n());
        let mut l = Vec::new();
        for i in crate::triangle::ordered_index_set(n).into_iter().filter(|i| !i.is_i0()) {
            for r in i.s..=n {
                l.push(Letter::Dilog(self.pair2(&self.t.ne(i.s, i.k), &self.t.se(nn - i.s, n - r))));
            }
        }
        OperatorWord::new(&self.two, l).unwrap()
    }

    fn k_terms(&self) -> Vec<(SkewVector, SkewVector)> {
        let w = self.t.fundamental_weights(Side::Ne);
        let nn = self.t.big_n();
        (1..=self.n()).map(|t| (w[t - 1].scale(qi(2)), self.t.se_full(nn - t))).collect()
    }

    /// `𝒦 = 𝒢(2 Σ_t ϖ̂_t ⊗ se_{N−t})`.
    pub fn k(&self) -> Gaussian {
        let pairs = self.k_terms().iter().map(|(x, y)| (inject(&self.two, 0, x), inject(&self.two, 1, y))).collect();
        Gaussian::new(pairs).expect("the legs of 𝒦 are orthogonal")
    }

    pub fn k_legs(&self, legs: Legs) -> Gaussian {
        let (p, q) = legs.parts();
        let pairs = self.k_terms().iter().map(|(x, y)| (inject(&self.three, p, x), inject(&self.three, q, y))).collect();
        Gaussian::new(pairs).expect("the legs of 𝒦 are orthogonal")
    }

    /// `C^{b,r,i} = φ(−sw_{b−i+1,r−i} ⊕ −nw_{n−b+i,i−1})`.
    pub fn c(&self, b: usize, r: usize, i: usize) -> Letter {
        let n = self.n();
        let x = -self.t.sw(b - i + 1, r - i);
        let y = -self.t.nw(n - b + i, i - 1);
        Letter::Dilog(self.pair2(&x, &y))
    }

    fn bar_pair(&self, x: &SkewVector, y: &SkewVector) -> SkewVector {
        &inject(&self.bar_two, 0, x) + &inject(&self.bar_two, 1, y)
    }

    pub fn factors(&self, variant: Variant) -> OperatorWord {
        let (n, nn) = (self.n(), self.t.big_n());
        let t = &self.t;
        match variant {
            Variant::F => self.f_word(FlipForm::F1),
            Variant::K => OperatorWord::new(&self.two, vec![Letter::Gauss(self.k())]).unwrap(),
            Variant::FTilde => {
                let mut l = vec![Letter::Gauss(self.k())];
                l.extend(self.f_word(FlipForm::F1).letters);
                OperatorWord::new(&self.two, l).unwrap()
            }
            Variant::FDoublePrime => {
                let l = flip_form_indices(n, FlipForm::F1).into_iter().map(|(b, r, i)| self.c(b, r, i)).collect();
                OperatorWord::new(&self.two, l).unwrap()
            }
            Variant::TildeK => {
                let w = t.fundamental_weights(Side::Ne);
                let pairs = (1..=n)
                    .map(|s| (inject(&self.bar_two, 0, &w[s - 1].scale(qi(2))), inject(&self.bar_two, 1, &t.nw(nn - s, nn - s))))
                    .collect();
                OperatorWord::new(&self.bar_two, vec![Letter::Gauss(Gaussian::new(pairs).expect("orthogonal legs"))]).unwrap()
            }
            Variant::TildeFPrime | Variant::TildeFDoublePrime => {
                let mut l = Vec::new();
                for r in 1..=n {
                    for s in 1..=n {
                        for k in 0..s {
                            let v = if variant == Variant::TildeFPrime {
                                if k > n - r || n - r - k > n - s {
                                    continue;
                                }
                                self.bar_pair(&t.ne(s, k), &-t.nw(nn - s, n - r - k))
                            } else {
                                if r < k + 1 || r - k - 1 > n - s {
                                    continue;
                                }
                                self.bar_pair(&-t.sw(s, k), &t.se(nn - s, r - k - 1))
                            };
                            l.push(Letter::DilogConj(v));
                        }
                    }
                }
                OperatorWord::new(&self.bar_two, l).unwrap()
            }
            Variant::Dual => {
                let w = t.fundamental_weights(Side::Nw);
                let pairs = (1..=n)
                    .map(|s| {
                        (inject(&self.two, 0, &w[s - 1].scale(qi(-2))), inject(&self.two, 1, &-t.sw(nn - s, nn - s)))
                    })
                    .collect();
                let mut l = vec![Letter::Gauss(Gaussian::new(pairs).expect("orthogonal legs").conjugated())];
                for r in 1..=n {
                    for s in 1..=n {
                        for k in 0..s {
                            if k <= n - r && n - r - k <= n - s {
                                l.push(Letter::DilogConj(self.pair2(&-t.nw(nn - s, n - r - k), &-t.sw(s, k))));
                            }
                        }
                    }
                }
                OperatorWord::new(&self.two, l).unwrap()
            }
        }
    }
}

/// The letter list of a flip factorization over a fresh [`FlipAlgebra`].
pub fn flip_factors(big_n: usize, variant: Variant) -> Result<OperatorWord, WordError> {
    Ok(FlipAlgebra::new(big_n)?.factors(variant))
}

/// The displayed factorizations of 𝔽 agree modulo commuting swaps, and the
/// alternative Gaussian placements `𝒦𝔽 = 𝔽''𝒦`, `𝒦̃𝔽̃' = 𝔽̃''𝒦̃` hold.
pub fn verify_flip_forms(big_n: usize) -> Result<Report, WordError> {
    let fa = FlipAlgebra::new(big_n)?;
    let mut r = Report::new(format!("flip factorizations, N={big_n}"));
    let f1 = fa.f_word(FlipForm::F1);
    let forms = [
        ("ordered by (b, r, i)", fa.f_word(FlipForm::F2)),
        ("ordered by (b, r, i) with B^{n−r+i,b+i−1,i}", fa.f_word(FlipForm::F3)),
        ("ordered by (r, j, c)", fa.f_word(FlipForm::F4)),
        ("ordered by (b, r, i) with B^{b+r−1,b+i−1,i}", fa.f_word(FlipForm::F5)),
        ("indexed by (r, s, k)", fa.f_by_s_k()),
        ("indexed by (r, s, k), legs exchanged", fa.f_by_s_k_swapped()),
        ("ordered by the index set I", fa.f_by_index_set()),
    ];
    for (name, w) in forms {
        r.check(format!("𝔽 {name} ≡ 𝔽"), trace_monoid_equal(&w, &f1), format!("{} letters", w.len()));
    }
    r.check(
        "𝔽 by (r, s, k) equals 𝔽 letterwise after sorting each r-block",
        {
            let mut a = f1.letters().to_vec();
            let mut b = fa.f_by_s_k().letters().to_vec();
            a.sort();
            b.sort();
            a == b
        },
        "",
    );

    // 𝒦𝔽 → 𝔽''𝒦 by pushing 𝒦 right.
    let kf = fa.factors(Variant::FTilde);
    let pushed = push_first_gaussian_right(kf)?;
    let fpp = fa.factors(Variant::FDoublePrime);
    let body = OperatorWord::new(fa.two(), pushed.current().letters()[..fpp.len()].to_vec())?;
    r.check("𝒦𝔽 = 𝔽''𝒦", body == fpp || trace_monoid_equal(&body, &fpp), pushed.summary());

    let tk = fa.factors(Variant::TildeK);
    let tfp = fa.factors(Variant::TildeFPrime);
    let tfpp = fa.factors(Variant::TildeFDoublePrime);
    let pushed = push_first_gaussian_right(tk.concat(&tfp)?)?;
    let body = OperatorWord::new(fa.bar_two(), pushed.current().letters()[..tfpp.len()].to_vec())?;
    r.check("𝒦̃𝔽̃' = 𝔽̃''𝒦̃", body == tfpp || trace_monoid_equal(&body, &tfpp), pushed.summary());
    Ok(r)
}

fn push_first_gaussian_right(w: OperatorWord) -> Result<RewriteTrace, WordError> {
    let mut tr = RewriteTrace::new(w);
    for p in 0..tr.current().len() - 1 {
        tr.apply(Rule::PushRight, p)?;
    }
    Ok(tr)
}

// ---------------------------------------------------------------------------
// Braided pentagon

/// `3`-leg products appearing in the proof, with the starting offsets of the
/// `a`-blocks.
struct Stage {
    letters: Vec<Letter>,
    blocks: Vec<usize>,
}

impl FlipAlgebra {
    fn b12(&self, b: isize, r: isize, i: isize) -> Letter {
        self.b_legs(Legs::L12, idx(b), idx(r), idx(i))
    }

    fn b23(&self, b: isize, r: isize, i: isize) -> Letter {
        self.b_legs(Legs::L23, idx(b), idx(r), idx(i))
    }

    fn b13i(&self, b: isize, r: isize, i: isize) -> Letter {
        self.b13(idx(b), idx(r), idx(i))
    }

    /// The expression reached after `s` steps.
    fn stage(&self, s: usize) -> Stage {
        let n = self.n() as isize;
        let s = s as isize;
        let mut l = Vec::new();
        for b in 1..=s {
            for r in 1..=b {
                for i in 1..=n - b + 1 {
                    l.push(self.b12(n - i + 1, b, b - r + 1));
                }
            }
        }
        for b in 1..=n - s - 1 {
            for r in 1..=b {
                for i in 1..=r {
                    l.push(self.b23(b, r, i));
                }
            }
        }
        let mut blocks = Vec::new();
        for a in 1..=s + 1 {
            blocks.push(l.len());
            for r in 1..=n - s {
                for i in 1..=r {
                    l.push(self.b23(n + a - s - 1, r, i));
                }
            }
            for r in 1..=n - s {
                for i in 1..=r {
                    l.push(self.b12(n - r + i, s + i, s + i - a + 1));
                }
            }
            for r in n - s + 1..=n - a + 1 {
                for i in 1..=r {
                    l.push(self.b13i(a + r - 1, a + i - 1, i));
                }
            }
        }
        for b in s + 2..=n {
            for r in 1..=n - b + 1 {
                for i in 1..=r {
                    l.push(self.b12(n - r + i, b + i - 1, i));
                }
            }
        }
        for r in n - s + 1..=n {
            for b in r..=n {
                for i in 1..=r {
                    l.push(self.b23(b, r, i));
                }
            }
        }
        Stage { letters: l, blocks }
    }

    /// Executes the key lemma on the window starting at `start`, for step
    /// `s` and block `a` (so `c = s − a`).
    fn lemma_step(&self, tr: &mut RewriteTrace, start: usize, s: isize, a: isize) -> Result<(), WordError> {
        let n = self.n() as isize;
        let c = s - a;
        let m = n - s;
        let three = &self.three;
        let t = &self.t;
        let c12 = |r: isize, i: isize| self.b12(n - r + i, s + i, c + i + 1);
        let c23 = |r: isize, i: isize| self.b23(n - c - 1, r, i);
        let c13 = |r: isize, i: isize| {
            let mid = &t.se(idx(c + r + 1), idx(r - i)) + &t.ne(idx(n - c - i), idx(n - c - r - 1));
            Letter::Dilog(
                &(&inject(three, 0, &t.ne(idx(n - c - r), idx(n - s - r))) + &inject(three, 1, &mid))
                    + &inject(three, 2, &t.se(idx(c + i + 1), idx(c + 1))),
            )
        };
        let tri = |r: isize| (1..=r).map(move |i| (r, i));
        let all: Vec<(isize, isize)> = (1..=m).flat_map(tri).collect();

        let mut lhs: Vec<Letter> = all.iter().map(|&(r, i)| c23(r, i)).collect();
        lhs.extend(all.iter().map(|&(r, i)| c12(r, i)));
        let len = lhs.len();
        if tr.current().letters()[start..start + len] != lhs[..] {
            return Err(WordError::Mismatch(format!("step s={s}, a={a}: window does not match the lemma")));
        }
        tr.mark(format!("lemma s={s} a={a}: interleave"));
        let inter: Vec<Letter> = all.iter().flat_map(|&(r, i)| [c23(r, i), c12(r, i)]).collect();
        tr.commute_window(start, &inter)?;
        tr.mark(format!("lemma s={s} a={a}: pentagons"));
        for p in (0..all.len()).rev() {
            tr.apply(Rule::PentagonForward, start + 2 * p)?;
        }
        let triples: Vec<Letter> = all.iter().flat_map(|&(r, i)| [c12(r, i), c13(r, i), c23(r, i)]).collect();
        if tr.current().letters()[start..start + triples.len()] != triples[..] {
            return Err(WordError::Mismatch(format!("step s={s}, a={a}: pentagon middles differ from C13")));
        }
        for r in 1..=m {
            if c13(r, r) != self.b13i(n - c - 1, s + r - c - 1, r) {
                return Err(WordError::Mismatch(format!("C13^{{{r},{r}}} is not the expected B13 letter")));
            }
        }
        tr.mark(format!("lemma s={s} a={a}: regroup"));
        let mut shown = Vec::new();
        let mut starts = Vec::new();
        for r in 1..=m {
            shown.push(c12(r, 1));
        }
        for k in 1..m {
            shown.push(c13(k, k));
            for j in 1..=k {
                starts.push(shown.len());
                shown.extend([c23(k, j), c13(k + 1, j), c12(k + 1, j + 1)]);
            }
        }
        shown.push(c13(m, m));
        for i in 1..=m {
            shown.push(c23(m, i));
        }
        tr.commute_window(start, &shown)?;
        tr.mark(format!("lemma s={s} a={a}: inverse pentagons"));
        for &p in starts.iter().rev() {
            tr.apply(Rule::PentagonBackward, start + p)?;
        }
        let mut rhs = Vec::new();
        for r in 1..=m {
            rhs.push(self.b12(n - r + 1, s + 1, c + 2));
        }
        for r in 1..m {
            for i in 1..=r {
                rhs.push(self.b12(n - r + i, s + i + 1, c + i + 2));
            }
        }
        for r in 1..=m {
            rhs.push(self.b13i(n - c - 1, s + r - c - 1, r));
        }
        for r in 1..m {
            for i in 1..=r {
                rhs.push(self.b23(n - c - 1, r, i));
            }
        }
        for i in 1..=m {
            rhs.push(self.b23(n - c - 1, m, i));
        }
        tr.commute_window(start, &rhs)?;
        Ok(())
    }
}

fn idx(x: isize) -> usize {
    usize::try_from(x).expect("index out of range")
}

fn braided_pentagon_on(fa: &FlipAlgebra) -> Result<RewriteTrace, WordError> {
    let n = fa.n();
    let mut lhs = fa.f_legs(Legs::L23, FlipForm::F1);
    lhs.extend(fa.f_legs(Legs::L12, FlipForm::F1));
    let mut tr = RewriteTrace::new(OperatorWord::new(fa.three(), lhs)?);
    let mut e0 = fa.f_legs(Legs::L23, FlipForm::F2);
    e0.extend(fa.f_legs(Legs::L12, FlipForm::F3));
    if fa.stage(0).letters != e0 {
        return Err(WordError::Mismatch("stage 0 is not 𝔽₂₃𝔽₁₂ in the reordered forms".into()));
    }
    tr.mark("reorder both factors");
    tr.commute_to(&e0)?;
    for s in 0..n {
        let stage = fa.stage(s);
        if tr.current().letters() != stage.letters.as_slice() {
            return Err(WordError::Mismatch(format!("word differs from stage {s}")));
        }
        for (k, &start) in stage.blocks.iter().enumerate().rev() {
            fa.lemma_step(&mut tr, start, s as isize, k as isize + 1)?;
        }
        tr.mark(format!("regroup into stage {}", s + 1));
        tr.commute_to(&fa.stage(s + 1).letters)?;
    }
    let mut end = fa.f_legs(Legs::L12, FlipForm::F4);
    end.extend(fa.f_braided13(FlipForm::F5));
    end.extend(fa.f_legs(Legs::L23, FlipForm::F1));
    if fa.stage(n).letters != end {
        return Err(WordError::Mismatch("final stage is not 𝔽₁₂𝔽₁₃𝔽₂₃ in the reordered forms".into()));
    }
    let mut rhs = fa.f_legs(Legs::L12, FlipForm::F1);
    rhs.extend(fa.f_braided13(FlipForm::F1));
    rhs.extend(fa.f_legs(Legs::L23, FlipForm::F1));
    tr.mark("reorder into the defining order");
    tr.commute_to(&rhs)?;
    Ok(tr)
}

/// `𝔽_{[23]}𝔽_{[12]} = 𝔽_{[12]}𝔽_{[13]}𝔽_{[23]}` by the step-by-step
/// argument: every pentagon asserts pairing 1, every swap pairing 0.
pub fn verify_braided_pentagon(big_n: usize) -> Result<RewriteTrace, WordError> {
    braided_pentagon_on(&FlipAlgebra::new(big_n)?)
}

/// Both sides of the braided pentagon as words over ∇^{⊕3}.
pub fn braided_pentagon_sides(fa: &FlipAlgebra) -> (OperatorWord, OperatorWord) {
    let mut lhs = fa.f_legs(Legs::L23, FlipForm::F1);
    lhs.extend(fa.f_legs(Legs::L12, FlipForm::F1));
    let mut rhs = fa.f_legs(Legs::L12, FlipForm::F1);
    rhs.extend(fa.f_braided13(FlipForm::F1));
    rhs.extend(fa.f_legs(Legs::L23, FlipForm::F1));
    (OperatorWord::new(fa.three(), lhs).unwrap(), OperatorWord::new(fa.three(), rhs).unwrap())
}

// ---------------------------------------------------------------------------
// Independent search oracle

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub found: bool,
    pub states: usize,
    /// Number of pentagon moves on the connecting path.
    pub distance: Option<usize>,
}

struct Interner {
    vecs: Vec<SkewVector>,
    ids: HashMap<SkewVector, u32>,
    pairs: HashMap<(u32, u32), Q>,
}

impl Interner {
    fn id(&mut self, v: SkewVector) -> u32 {
        if let Some(&i) = self.ids.get(&v) {
            return i;
        }
        let i = self.vecs.len() as u32;
        self.ids.insert(v.clone(), i);
        self.vecs.push(v);
        i
    }

    fn pair(&mut self, a: u32, b: u32) -> Q {
        if let Some(&p) = self.pairs.get(&(a, b)) {
            return p;
        }
        let p = self.vecs[a as usize].pair(&self.vecs[b as usize]);
        self.pairs.insert((a, b), p);
        self.pairs.insert((b, a), -p);
        p
    }

    fn commute(&mut self, a: u32, b: u32) -> bool {
        self.pair(a, b).is_zero()
    }

    fn canonical(&mut self, w: &[u32]) -> Vec<u32> {
        for &a in w {
            for &b in w {
                self.pair(a, b);
            }
        }
        let pairs = &self.pairs;
        lex_normal_form(w, |a, b| pairs[&(*a, *b)].is_zero())
    }

    /// Rearranges `w` by commuting swaps so that the letters at `pos`
    /// (increasing) become consecutive; returns the new word and the
    /// position of the block.
    fn make_adjacent(&mut self, w: &[u32], pos: &[usize]) -> Option<(Vec<u32>, usize)> {
        let mut w = w.to_vec();
        let mut pos = pos.to_vec();
        for t in 1..pos.len() {
            let (bs, be, target) = (pos[0], pos[t - 1], pos[t]);
            let span = be + 1..target;
            let mut after = vec![false; w.len()];
            for k in span.clone() {
                after[k] = (bs..=be).any(|q| !self.commute(w[q], w[k]))
                    || (be + 1..k).any(|q| after[q] && !self.commute(w[q], w[k]));
            }
            let mut before = vec![false; w.len()];
            for k in span.clone().rev() {
                before[k] = !self.commute(w[k], w[target])
                    || (k + 1..target).any(|q| before[q] && !self.commute(w[k], w[q]));
            }
            if span.clone().any(|k| after[k] && before[k]) {
                return None;
            }
            let free: Vec<u32> = span.clone().filter(|&k| !after[k]).map(|k| w[k]).collect();
            let stuck: Vec<u32> = span.clone().filter(|&k| after[k]).map(|k| w[k]).collect();
            let mut nw = w[..bs].to_vec();
            nw.extend(&free);
            nw.extend(&w[bs..=be]);
            nw.push(w[target]);
            nw.extend(&stuck);
            nw.extend(&w[target + 1..]);
            let shift = free.len();
            for p in pos.iter_mut().take(t) {
                *p += shift;
            }
            pos[t] = pos[t - 1] + 1;
            w = nw;
        }
        Some((w, pos[0]))
    }

    fn neighbours(&mut self, w: &[u32], max_len: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let l = w.len();
        if l < max_len {
            for i in 0..l {
                for j in i + 1..l {
                    if self.pair(w[i], w[j]) != Q::one() {
                        continue;
                    }
                    if let Some((mut nw, p)) = self.make_adjacent(w, &[i, j]) {
                        let (v, u) = (nw[p], nw[p + 1]);
                        let sum = self.id(&self.vecs[v as usize] + &self.vecs[u as usize]);
                        nw.splice(p..p + 2, [u, sum, v]);
                        out.push(self.canonical(&nw));
                    }
                }
            }
        }
        for i in 0..l {
            for k in i + 2..l {
                if self.pair(w[k], w[i]) != Q::one() {
                    continue;
                }
                let sum = &self.vecs[w[i] as usize] + &self.vecs[w[k] as usize];
                let Some(&mid) = self.ids.get(&sum) else { continue };
                for j in i + 1..k {
                    if w[j] != mid {
                        continue;
                    }
                    if let Some((mut nw, p)) = self.make_adjacent(w, &[i, j, k]) {
                        let (u, v) = (nw[p], nw[p + 2]);
                        nw.splice(p..p + 3, [v, u]);
                        out.push(self.canonical(&nw));
                    }
                }
            }
        }
        out
    }
}

/// Bidirectional breadth-first search over commutation classes, with
/// forward and inverse pentagon moves on any pair or triple that can be made
/// adjacent. Independent of the step-by-step proof.
pub fn rewriting_oracle(
    lhs: &OperatorWord,
    rhs: &OperatorWord,
    max_len: usize,
    budget: usize,
) -> Result<OracleResult, WordError> {
    let mut it = Interner { vecs: Vec::new(), ids: HashMap::new(), pairs: HashMap::new() };
    let mut enc = |w: &OperatorWord| -> Result<Vec<u32>, WordError> {
        w.letters()
            .iter()
            .map(|l| plain_dilog(l).cloned().ok_or_else(|| WordError::Mismatch("oracle words must be dilogarithms".into())))
            .map(|v| v.map(|v| it.id(v)))
            .collect()
    };
    let a = enc(lhs)?;
    let b = enc(rhs)?;
    let a = it.canonical(&a);
    let b = it.canonical(&b);
    if a == b {
        return Ok(OracleResult { found: true, states: 1, distance: Some(0) });
    }
    let mut seen: [HashMap<Vec<u32>, usize>; 2] = [HashMap::new(), HashMap::new()];
    let mut frontier: [Vec<Vec<u32>>; 2] = [vec![a.clone()], vec![b.clone()]];
    seen[0].insert(a, 0);
    seen[1].insert(b, 0);
    loop {
        if frontier[0].is_empty() || frontier[1].is_empty() {
            return Ok(OracleResult { found: false, states: seen[0].len() + seen[1].len(), distance: None });
        }
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        let mut next = Vec::new();
        for w in std::mem::take(&mut frontier[side]) {
            let d = seen[side][&w];
            for nb in it.neighbours(&w, max_len) {
                if let Some(&e) = seen[1 - side].get(&nb) {
                    let states = seen[0].len() + seen[1].len();
                    return Ok(OracleResult { found: true, states, distance: Some(d + 1 + e) });
                }
                if !seen[side].contains_key(&nb) {
                    seen[side].insert(nb.clone(), d + 1);
                    next.push(nb);
                    if seen[0].len() + seen[1].len() > budget {
                        return Err(WordError::Budget(budget));
                    }
                }
            }
        }
        frontier[side] = next;
    }
}

// ---------------------------------------------------------------------------
// Gaussian pentagon and the multiplicative unitary

/// Adjoint action of a Gaussian product `g₁g₂⋯` as a map on basis vectors.
fn ad_product(gs: &[&Gaussian], w: &SkewVector) -> SkewVector {
    gs.iter().rev().fold(w.clone(), |acc, g| g.ad(&acc))
}

pub fn verify_k_pentagon(big_n: usize) -> Result<Report, WordError> {
    Ok(k_pentagon_on(&FlipAlgebra::new(big_n)?))
}

fn k_pentagon_on(fa: &FlipAlgebra) -> Report {
    let t = fa.triangle();
    let mut r = Report::new(format!("Gaussian pentagon, N={}", t.big_n()));
    let k = fa.k();
    let two = fa.two();
    for s in 1..=fa.n() {
        let se = t.se_full(s);
        let lhs = k.ad(&inject(two, 0, &se));
        let rhs = fa.pair2(&se, &se);
        r.check(format!("𝒦(E(se_{s})⊗1)𝒦* = E(se_{s}⊕se_{s})"), lhs == rhs, lhs.to_string());
    }
    let fixed = t.t_minus().iter().all(|v| k.fixes(&inject(two, 0, v)));
    r.check("E(v⊗1), v ∈ T⁻, fixed by 𝒦", fixed, "");
    let (k12, k13, k23) = (fa.k_legs(Legs::L12), fa.k_legs(Legs::L13), fa.k_legs(Legs::L23));
    let mut bad = Vec::new();
    for (i, e) in fa.three().basis_vectors().iter().enumerate() {
        if ad_product(&[&k23, &k12], e) != ad_product(&[&k12, &k13, &k23], e) {
            bad.push(i);
        }
    }
    r.check(
        "Ad(𝒦₂₃𝒦₁₂) = Ad(𝒦₁₂𝒦₁₃𝒦₂₃) on every basis exponent",
        bad.is_empty(),
        if bad.is_empty() { format!("{} basis vectors; phases not tracked", fa.three().dim()) } else { format!("differs at {bad:?}") },
    );
    r
}

pub struct MuProof {
    pub lhs: RewriteTrace,
    pub rhs: RewriteTrace,
    pub pentagon: RewriteTrace,
    pub report: Report,
}

impl MuProof {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "report": self.report.to_json(),
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "pentagon": self.pentagon.to_json(),
        })
    }
}

/// `𝔽̃₂₃𝔽̃₁₂ = 𝔽̃₁₂𝔽̃₁₃𝔽̃₂₃`: push the Gaussians to the left on both sides,
/// then discharge the dilogarithm part by the braided pentagon and the
/// Gaussian part by [`verify_k_pentagon`].
pub fn verify_mu_pentagon(big_n: usize) -> Result<MuProof, WordError> {
    let fa = FlipAlgebra::new(big_n)?;
    let mut report = Report::new(format!("multiplicative unitary pentagon, N={big_n}"));
    let g = |legs| Letter::Gauss(fa.k_legs(legs));
    let f = |legs| fa.f_legs(legs, FlipForm::F1);
    let nf = f(Legs::L12).len();

    let mut lw = vec![g(Legs::L23)];
    lw.extend(f(Legs::L23));
    lw.push(g(Legs::L12));
    lw.extend(f(Legs::L12));
    let mut lhs = RewriteTrace::new(OperatorWord::new(fa.three(), lw)?);
    lhs.push_gaussians_left()?;
    let cur = lhs.current().letters();
    report.check("left side: Gaussians 𝒦₂₃𝒦₁₂ in front", cur[..2] == [g(Legs::L23), g(Legs::L12)], "");
    let mut expect = f(Legs::L23);
    expect.extend(f(Legs::L12));
    report.check("left side: 𝒦₁₂ passes 𝔽₂₃ unchanged", cur[2..] == expect[..], lhs.summary());

    // The sub-check on its own: 𝔽₁₂ letters against 𝒦₁₃ then 𝒦₂₃.
    let (k13, k23) = (fa.k_legs(Legs::L13), fa.k_legs(Legs::L23));
    let nn = fa.triangle().big_n();
    let mut sub_ok = true;
    for (b, r, i) in flip_form_indices(fa.n(), FlipForm::F1) {
        let w = fa.b_legs(Legs::L12, b, r, i);
        let w = w.vector().unwrap();
        let mid = k13.ad_inv(w);
        let s = b - i + 1;
        sub_ok &= mid == w + &inject(fa.three(), 2, &fa.triangle().se_full(nn - s));
        sub_ok &= k23.ad_inv(&mid) == *w;
    }
    report.check("𝔽₁₂ commutes with 𝒦₁₃𝒦₂₃ (intermediate ne⊕se⊕se_{N−s})", sub_ok, "");

    let mut rw = vec![g(Legs::L12)];
    rw.extend(f(Legs::L12));
    rw.push(g(Legs::L13));
    rw.extend(f(Legs::L13));
    rw.push(g(Legs::L23));
    rw.extend(f(Legs::L23));
    let mut rhs = RewriteTrace::new(OperatorWord::new(fa.three(), rw)?);
    rhs.push_gaussians_left()?;
    let cur = rhs.current().letters();
    report.check("right side: Gaussians 𝒦₁₂𝒦₁₃𝒦₂₃ in front", cur[..3] == [g(Legs::L12), g(Legs::L13), g(Legs::L23)], "");
    report.check("right side: 𝔽₁₂ unchanged", cur[3..3 + nf] == f(Legs::L12)[..], "");
    report.check("right side: 𝔽₁₃ becomes 𝔽_{[13]}", cur[3 + nf..3 + 2 * nf] == fa.f_braided13(FlipForm::F1)[..], "");
    report.check("right side: 𝔽₂₃ unchanged", cur[3 + 2 * nf..] == f(Legs::L23)[..], rhs.summary());

    let pentagon = braided_pentagon_on(&fa)?;
    let (pl, pr) = braided_pentagon_sides(&fa);
    report.check(
        "dilogarithm parts related by the braided pentagon",
        pentagon.initial() == &pl && pentagon.current() == &pr && pl.letters() == &lhs.current().letters()[2..]
            && pr.letters() == &rhs.current().letters()[3..],
        pentagon.summary(),
    );
    report.absorb("", k_pentagon_on(&fa));
    Ok(MuProof { lhs, rhs, pentagon, report })
}

// ---------------------------------------------------------------------------
// R-matrix factorization

/// `Γ_{𝔽^{[k]}_{a;a+1}}`: strip `a` of `Γ_𝔽` with only its `k`-th vertical.
pub fn conditional_f_strip(t: &Triangle, a: usize, k: usize) -> Result<LabeledBraidGraph, WordError> {
    let g = standard_graph(t, Family::F).subgraph(a, a + 1)?;
    let walls = g.word().positions(1);
    if k == 0 || k > walls.len() {
        return Err(WordError::Braid(BraidError::Position(k)));
    }
    let del: Vec<usize> = walls.iter().enumerate().filter(|&(j, _)| j + 1 != k).map(|(_, &p)| p).collect();
    Ok(g.merge_labels(&del)?)
}

/// The right-hand factorization of ℛ, expanded into dilogarithms:
/// `∏_{k=n..1} ∏_{a=k..n} F̄(𝔽^{[k]}_{a;a+1} ⊗ 𝔼_{a,a+1})`.
pub fn r_matrix_word(fa: &FlipAlgebra) -> Result<OperatorWord, WordError> {
    let t = fa.triangle();
    let n = fa.n();
    let ge = standard_graph(t, Family::E);
    let mut letters = Vec::new();
    for k in (1..=n).rev() {
        for a in k..=n {
            let g1 = conditional_f_strip(t, a, k)?;
            let g2 = ge.subgraph(a, a + 1)?;
            letters.extend(dilog_product_expansion(&g1, &g2, fa.two())?.letters);
        }
    }
    OperatorWord::new(fa.two(), letters)
}

pub fn verify_r_equals_f(big_n: usize) -> Result<Report, WordError> {
    let fa = FlipAlgebra::new(big_n)?;
    let rw = r_matrix_word(&fa)?;
    let fw = fa.f_word(FlipForm::F1);
    let mut r = Report::new(format!("R-matrix factorization equals the braided flip, N={big_n}"));
    let mut a = rw.letters().to_vec();
    let mut b = fw.letters().to_vec();
    a.sort();
    b.sort();
    r.check("same multiset of letters", a == b, format!("{} and {} letters", rw.len(), fw.len()));
    let eq = trace_monoid_equal(&rw, &fw);
    let detail = if eq {
        String::new()
    } else {
        first_obstruction(&rw, &fw)
    };
    r.check("equal modulo commuting swaps", eq, detail);
    Ok(r)
}

/// Describes where `commute_to` gets stuck, for error reports.
fn first_obstruction(a: &OperatorWord, b: &OperatorWord) -> String {
    let mut tr = RewriteTrace::new(a.clone());
    match tr.commute_to(b.letters()) {
        Ok(()) => "no obstruction".into(),
        Err(e) => e.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Rank-one decomposition

/// Coefficients of `v` in the span of `gens`, if it lies there.
fn express(gens: &[SkewVector], v: &SkewVector) -> Option<Vec<Q>> {
    let d = v.space().dim();
    let g = gens.len();
    let rows: Vec<Vec<Q>> = (0..d)
        .map(|i| gens.iter().map(|x| x.coeff(i)).chain(std::iter::once(v.coeff(i))).collect())
        .collect();
    let mut m = linalg::to_big_matrix(&rows);
    let piv = linalg::rref(&mut m);
    if piv.contains(&g) {
        return None;
    }
    let mut x = vec![Q::zero(); g];
    for (row, &c) in piv.iter().enumerate() {
        x[c] = linalg::from_big(&m[row][g]);
    }
    Some(x)
}

/// `𝔽̃ = ∏_{i∈I} 𝕌^{(i)}` in the symplectic model `V_N ⊕ ∇_N`.
pub fn verify_rank_one_decomposition(big_n: usize) -> Result<Report, WordError> {
    let emb = EmbeddingVN::new(big_n)?;
    let t = emb.triangle.clone();
    let (n, nn) = (t.n(), big_n);
    let mut r = Report::new(format!("rank-one decomposition, N={big_n}"));
    r.check("embedding preserves pairings", emb.verify().is_ok(), emb.verify().err().unwrap_or_default());
    let sum_ne = emb.check_sum_ne();
    r.check("f + 2Σ(se,se)ϖ = ne for every (s,k), r", sum_ne.is_ok(), format!("{sum_ne:?}"));
    let sw = emb.check_sum_weights();
    r.check("Σ_k ϖ_(s,k) = ϖ̂_s", sw.is_ok(), sw.err().unwrap_or_default());

    let amb = direct_sum(&[emb.space.clone(), t.space().clone()], &[])?;
    let leg2 = |v: &SkewVector| inject(&amb, 1, v);
    let leg1 = |v: &SkewVector| inject(&amb, 0, v);
    let mut letters = Vec::new();
    for i in &emb.order {
        let g = Gaussian::new(vec![(leg1(&emb.varpi(*i).scale(qi(2))), leg2(&t.se_full(nn - i.s)))])?;
        letters.push(Letter::Gauss(g));
        if !i.is_i0() {
            for rr in i.s..=n {
                letters.push(Letter::Dilog(&leg1(&emb.f(*i)) + &leg2(&t.se(nn - i.s, n - rr))));
            }
        }
    }
    let mut tr = RewriteTrace::new(OperatorWord::new(&amb, letters)?);
    tr.push_gaussians_left()?;
    let ng = emb.order.len();
    let cur = tr.current().letters().to_vec();
    let gs: Vec<&Gaussian> = cur[..ng].iter().filter_map(Letter::gaussian).collect();
    let l = Gaussian::merge(&gs)?;
    let body = OperatorWord::new(&amb, cur[ng..].to_vec())?;

    // Transport 𝔽̃ from ∇ ⊕ ∇ along the embedding of the first leg.
    let fa = FlipAlgebra::from_triangle(t.clone());
    let gens = emb.generators();
    let srcs: Vec<SkewVector> = gens.iter().map(|g| g.1.clone()).collect();
    let transport = |v: &SkewVector| -> Result<SkewVector, WordError> {
        let a = project(fa.two(), 0, t.space(), v);
        let b = project(fa.two(), 1, t.space(), v);
        let c = express(&srcs, &a).ok_or_else(|| WordError::Mismatch(format!("{a} is outside the embedded span")))?;
        let mut img = amb.zero();
        for (x, g) in c.iter().zip(&gens) {
            img += &leg1(&g.2).scale(*x);
        }
        Ok(&img + &leg2(&b))
    };
    let ft = fa.factors(Variant::FTilde);
    let k = ft.letters()[0].gaussian().unwrap();
    let kt = Gaussian::new(k.pairs().iter().map(|(x, y)| Ok((transport(x)?, transport(y)?))).collect::<Result<_, WordError>>()?)?;
    r.check("collected Gaussian equals 𝒦", l.symmetric_tensor() == kt.symmetric_tensor(), format!("{} tensor terms", l.pairs().len()));
    let by_index = fa
        .f_by_index_set()
        .letters()
        .iter()
        .map(|x| Ok(Letter::Dilog(transport(x.vector().unwrap())?)))
        .collect::<Result<Vec<_>, WordError>>()?;
    r.check("dilogarithms become φ(ne_{s,k} ⊕ se_{N−s,n−r}) in the order of I", body.letters() == by_index.as_slice(), tr.summary());
    let f_t = ft.letters()[1..]
        .iter()
        .map(|x| Ok(Letter::Dilog(transport(x.vector().unwrap())?)))
        .collect::<Result<Vec<_>, WordError>>()?;
    let f_t = OperatorWord::new(&amb, f_t)?;
    r.check("dilogarithm part ≡ 𝔽 modulo commuting swaps", trace_monoid_equal(&body, &f_t), "");
    Ok(r)
}

// ---------------------------------------------------------------------------
// Symmetries

/// Linear maps ∇_N → ∇̄_N given on the basis by a signed permutation of
/// the coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// `e_{abc} ↦ −e_{bac}`.
    Theta,
    /// `e_{abc} ↦ −e_{cba}`.
    VarTheta,
    /// `e_{abc} ↦ −e_{acb}`.
    Upsilon,
}

impl Symmetry {
    /// The image, as a vector with the same coordinates in ∇_N (its form is
    /// the negative of the form of ∇̄_N).
    pub fn apply(self, t: &Triangle, v: &SkewVector) -> SkewVector {
        let mut out = t.space().zero();
        for (i, x) in v.terms() {
            let (a, b, c) = t.triple(i);
            let (a, b, c) = match self {
                Symmetry::Theta => (b, a, c),
                Symmetry::VarTheta => (c, b, a),
                Symmetry::Upsilon => (a, c, b),
            };
            out.add_coeff(t.index(a, b, c).expect("permuted node"), -x);
        }
        out
    }
}

/// Applies a symmetry on each leg of a word over `∇ ⊕ ∇`, turning conjugate
/// letters into plain ones (the image lives in the conjugate space).
fn map_word(fa: &FlipAlgebra, sym: Symmetry, w: &OperatorWord) -> (Vec<Gaussian>, Vec<Letter>) {
    let t = fa.triangle();
    let m = |v: &SkewVector| {
        let a = project(fa.two(), 0, t.space(), v);
        let b = project(fa.two(), 1, t.space(), v);
        fa.pair2(&sym.apply(t, &a), &sym.apply(t, &b))
    };
    let mut gs = Vec::new();
    let mut ds = Vec::new();
    for l in w.letters() {
        match l {
            Letter::Gauss(g) => gs.push(Gaussian::new(g.pairs().iter().map(|(x, y)| (m(x), m(y))).collect()).unwrap()),
            other => ds.push(Letter::Dilog(m(other.vector().unwrap()))),
        }
    }
    (gs, ds)
}

pub fn verify_symmetry_maps(big_n: usize) -> Result<Report, WordError> {
    let fa = FlipAlgebra::new(big_n)?;
    let t = fa.triangle();
    let n = t.n();
    let mut r = Report::new(format!("symmetries, N={big_n}"));
    let basis = t.space().basis_vectors();
    for sym in [Symmetry::Theta, Symmetry::VarTheta, Symmetry::Upsilon] {
        let rev = basis.iter().all(|v| basis.iter().all(|w| sym.apply(t, v).pair(&sym.apply(t, w)) == -v.pair(w)));
        r.check(format!("{sym:?} is an isomorphism onto the conjugate space"), rev, "");
        let inv = basis.iter().all(|v| sym.apply(t, &sym.apply(t, v)) == *v);
        r.check(format!("{sym:?} is an involution"), inv, "");
    }
    let comp = basis.iter().all(|v| {
        let x = Symmetry::Theta.apply(t, &Symmetry::VarTheta.apply(t, &Symmetry::Theta.apply(t, v)));
        Symmetry::Upsilon.apply(t, v) == x
    });
    r.check("υ = θ∘ϑ⁻¹∘θ", comp, "");
    let mut ok = true;
    for s in 1..=n {
        for k in 0..=s {
            ok &= Symmetry::Theta.apply(t, &-t.sw(s, k)) == t.se(s, k);
            ok &= Symmetry::Theta.apply(t, &-t.nw(s, k)) == t.ne(s, k);
        }
    }
    r.check("θ(−sw_{s,k}) = se_{s,k} and θ(−nw_{s,k}) = ne_{s,k}", ok, "");

    let ft = fa.factors(Variant::FTilde);
    let dual = fa.factors(Variant::Dual);
    for (name, src, tgt) in [("(θ⊗θ)(dual flip) = flip", &dual, &ft), ("(θ⊗θ)(flip) = dual flip", &ft, &dual)] {
        let (gs, ds) = map_word(&fa, Symmetry::Theta, src);
        let tg: Vec<&Gaussian> = tgt.letters().iter().filter_map(Letter::gaussian).collect();
        let gauss_ok = gs.len() == 1 && tg.len() == 1 && gs[0].symmetric_tensor() == tg[0].symmetric_tensor();
        let td: Vec<Letter> =
            tgt.letters().iter().filter_map(|l| l.vector().map(|v| Letter::Dilog(v.clone()))).collect();
        let a = OperatorWord::new(fa.two(), ds)?;
        let b = OperatorWord::new(fa.two(), td)?;
        r.check(format!("{name}: Gaussian"), gauss_ok, "");
        r.check(format!("{name}: dilogarithms modulo commuting swaps"), trace_monoid_equal(&a, &b), format!("{} letters", a.len()));
    }
    r.absorb("", verify_flip_forms(big_n)?);
    Ok(r)
}
