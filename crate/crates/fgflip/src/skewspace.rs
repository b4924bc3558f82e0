//! Exact-rational skew-symmetric spaces.
//!
//! A [`SkewSpace`] is a labeled basis with an antisymmetric rational form ε.
//! [`SkewVector`]s are sparse coordinate maps that carry a handle to their
//! space, so pairings and arithmetic can check that operands agree.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::Arc;

use num::rational::Rational64;
use num::{One, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::linalg;

pub type Q = Rational64;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn half() -> Q {
    Q::new(1, 2)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkewError {
    #[error("vectors belong to different skew spaces")]
    SpaceMismatch,
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("pairing is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

/// Basis label. `Tri` is a node (a, b, c) of a triangle diagram; `Part`
/// tags a label with its summand in a direct sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisLabel {
    Tri(u32, u32, u32),
    Named(String),
    Part(usize, Box<BasisLabel>),
}

impl BasisLabel {
    pub fn named(s: impl Into<String>) -> Self {
        BasisLabel::Named(s.into())
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Tri(a, b, c) if *a < 10 && *b < 10 && *c < 10 => write!(f, "e{a}{b}{c}"),
            BasisLabel::Tri(a, b, c) => write!(f, "e[{a},{b},{c}]"),
            BasisLabel::Named(s) => write!(f, "{s}"),
            BasisLabel::Part(k, l) => write!(f, "{k}:{l}"),
        }
    }
}

impl FromStr for BasisLabel {
    type Err = SkewError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((head, rest)) = s.split_once(':') {
            if let Ok(k) = head.parse::<usize>() {
                return Ok(BasisLabel::Part(k, Box::new(rest.parse()?)));
            }
        }
        if let Some(body) = s.strip_prefix('e') {
            if body.len() == 3 && body.bytes().all(|b| b.is_ascii_digit()) {
                let d: Vec<u32> = body.bytes().map(|b| (b - b'0') as u32).collect();
                return Ok(BasisLabel::Tri(d[0], d[1], d[2]));
            }
            if let Some(inner) = body.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
                let parts: Result<Vec<u32>, _> = inner.split(',').map(|x| x.trim().parse()).collect();
                if let Ok(p) = parts {
                    if p.len() == 3 {
                        return Ok(BasisLabel::Tri(p[0], p[1], p[2]));
                    }
                }
            }
        }
        if s.is_empty() {
            return Err(SkewError::Parse("empty label".into()));
        }
        Ok(BasisLabel::Named(s.to_string()))
    }
}

/// Skew-symmetric space over Q with a labeled basis.
#[derive(Debug)]
pub struct SkewSpace {
    id: u64,
    labels: Vec<BasisLabel>,
    index: HashMap<BasisLabel, usize>,
    eps: Vec<Vec<Q>>,
    /// (offset, dimension) of each summand when built by [`direct_sum`].
    blocks: Vec<(usize, usize)>,
}

pub type Space = Arc<SkewSpace>;

impl PartialEq for SkewSpace {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.labels == other.labels && self.eps == other.eps
    }
}

impl SkewSpace {
    /// Builds a space from labels and a full pairing matrix.
    pub fn new(labels: Vec<BasisLabel>, eps: Vec<Vec<Q>>) -> Result<Space, SkewError> {
        Self::with_blocks(labels, eps, Vec::new())
    }

    fn with_blocks(labels: Vec<BasisLabel>, eps: Vec<Vec<Q>>, blocks: Vec<(usize, usize)>) -> Result<Space, SkewError> {
        let n = labels.len();
        if eps.len() != n || eps.iter().any(|r| r.len() != n) {
            return Err(SkewError::Shape(format!("pairing must be {n}x{n}")));
        }
        for i in 0..n {
            for j in i..n {
                if eps[i][j] != -eps[j][i] {
                    return Err(SkewError::NotAntisymmetric(i, j));
                }
            }
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(SkewError::DuplicateLabel(l.to_string()));
            }
        }
        let mut h = DefaultHasher::new();
        for l in &labels {
            l.hash(&mut h);
        }
        for row in &eps {
            for x in row {
                x.numer().hash(&mut h);
                x.denom().hash(&mut h);
            }
        }
        Ok(Arc::new(SkewSpace { id: h.finish(), labels, index, eps, blocks }))
    }

    /// Builds a space from a sparse list of entries ε(i, j) = x for i ≠ j;
    /// the antisymmetric partner is filled in.
    pub fn from_entries(labels: Vec<BasisLabel>, entries: &[(usize, usize, Q)]) -> Result<Space, SkewError> {
        let n = labels.len();
        let mut eps = vec![vec![Q::zero(); n]; n];
        for &(i, j, x) in entries {
            if i >= n || j >= n || i == j {
                return Err(SkewError::Shape(format!("bad entry ({i}, {j})")));
            }
            let prev = eps[i][j];
            if !prev.is_zero() && prev != x {
                return Err(SkewError::NotAntisymmetric(i, j));
            }
            eps[i][j] = x;
            eps[j][i] = -x;
        }
        Self::new(labels, eps)
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &BasisLabel {
        &self.labels[i]
    }

    pub fn index_of(&self, l: &BasisLabel) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn eps(&self, i: usize, j: usize) -> Q {
        self.eps[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Q>] {
        &self.eps
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn zero(self: &Arc<Self>) -> SkewVector {
        SkewVector { space: Arc::clone(self), coeffs: BTreeMap::new() }
    }

    pub fn basis(self: &Arc<Self>, i: usize) -> SkewVector {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(i, Q::one());
        SkewVector { space: Arc::clone(self), coeffs }
    }

    pub fn basis_vectors(self: &Arc<Self>) -> Vec<SkewVector> {
        (0..self.dim()).map(|i| self.basis(i)).collect()
    }

    pub fn vector_of(self: &Arc<Self>, l: &BasisLabel) -> Result<SkewVector, SkewError> {
        self.index_of(l).map(|i| self.basis(i)).ok_or_else(|| SkewError::UnknownLabel(l.to_string()))
    }

    pub fn from_coeffs(self: &Arc<Self>, items: impl IntoIterator<Item = (usize, Q)>) -> SkewVector {
        let mut v = self.zero();
        for (i, x) in items {
            assert!(i < self.dim(), "basis index out of range");
            v.add_coeff(i, x);
        }
        v
    }

    pub fn from_dense(self: &Arc<Self>, xs: &[Q]) -> SkewVector {
        self.from_coeffs(xs.iter().copied().enumerate())
    }

    /// Pairing matrix (ε(v_i, w_j))_{ij}.
    pub fn pairing_matrix(&self, vs: &[SkewVector], ws: &[SkewVector]) -> Vec<Vec<Q>> {
        vs.iter().map(|v| ws.iter().map(|w| v.pair(w)).collect()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": crate::SCHEMA,
            "labels": self.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "pairing": self.eps.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Space, SkewError> {
        let labels = v["labels"]
            .as_array()
            .ok_or_else(|| SkewError::Parse("missing labels".into()))?
            .iter()
            .map(|l| l.as_str().ok_or_else(|| SkewError::Parse("label must be a string".into()))?.parse())
            .collect::<Result<Vec<BasisLabel>, _>>()?;
        let eps = v["pairing"]
            .as_array()
            .ok_or_else(|| SkewError::Parse("missing pairing".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| SkewError::Parse("pairing row".into()))?
                    .iter()
                    .map(|x| parse_q(x.as_str().unwrap_or("")))
                    .collect::<Result<Vec<Q>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        SkewSpace::new(labels, eps)
    }
}

pub fn parse_q(s: &str) -> Result<Q, SkewError> {
    s.trim().parse::<Q>().map_err(|_| SkewError::Parse(format!("not a rational: `{s}`")))
}

/// Sparse exact vector in a [`SkewSpace`].
#[derive(Clone)]
pub struct SkewVector {
    space: Space,
    coeffs: BTreeMap<usize, Q>,
}

impl SkewVector {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(&i).copied().unwrap_or_else(Q::zero)
    }

    pub fn coeff_of(&self, l: &BasisLabel) -> Q {
        self.space.index_of(l).map(|i| self.coeff(i)).unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, Q)> + '_ {
        self.coeffs.iter().map(|(&i, &x)| (i, x))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn same_space(&self, other: &SkewVector) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space
    }

    pub fn add_coeff(&mut self, i: usize, x: Q) {
        if x.is_zero() {
            return;
        }
        let e = self.coeffs.entry(i).or_insert_with(Q::zero);
        *e += x;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    /// ε(self, other); panics if the spaces differ (see [`pair`] for the
    /// checked form).
    pub fn pair(&self, other: &SkewVector) -> Q {
        assert!(self.same_space(other), "pairing across different skew spaces");
        let mut acc = Q::zero();
        for (&i, &x) in &self.coeffs {
            let row = &self.space.eps[i];
            for (&j, &y) in &other.coeffs {
                let e = row[j];
                if !e.is_zero() {
                    acc += x * y * e;
                }
            }
        }
        acc
    }

    pub fn scale(&self, c: Q) -> SkewVector {
        if c.is_zero() {
            return self.space.zero();
        }
        SkewVector { space: Arc::clone(&self.space), coeffs: self.coeffs.iter().map(|(&i, &x)| (i, x * c)).collect() }
    }

    pub fn checked_add(&self, other: &SkewVector) -> Result<SkewVector, SkewError> {
        if !self.same_space(other) {
            return Err(SkewError::SpaceMismatch);
        }
        let mut out = self.clone();
        for (&i, &x) in &other.coeffs {
            out.add_coeff(i, x);
        }
        Ok(out)
    }

    /// Dense coordinate list.
    pub fn dense(&self) -> Vec<Q> {
        (0..self.space.dim()).map(|i| self.coeff(i)).collect()
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (&i, x) in &self.coeffs {
            m.insert(self.space.labels[i].to_string(), Value::String(x.to_string()));
        }
        Value::Object(m)
    }

    pub fn from_json(space: &Space, v: &Value) -> Result<SkewVector, SkewError> {
        let obj = v.as_object().ok_or_else(|| SkewError::Parse("vector must be an object".into()))?;
        let mut out = space.zero();
        for (k, x) in obj {
            let l: BasisLabel = k.parse()?;
            let i = space.index_of(&l).ok_or_else(|| SkewError::UnknownLabel(k.clone()))?;
            let val = match x {
                Value::String(s) => parse_q(s)?,
                Value::Number(n) => qi(n.as_i64().ok_or_else(|| SkewError::Parse(n.to_string()))?),
                _ => return Err(SkewError::Parse("coefficient must be \"p/q\"".into())),
            };
            out.add_coeff(i, val);
        }
        Ok(out)
    }
}

impl PartialEq for SkewVector {
    fn eq(&self, other: &Self) -> bool {
        self.space.id == other.space.id && self.coeffs == other.coeffs
    }
}

impl Eq for SkewVector {}

impl Hash for SkewVector {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.space.id.hash(state);
        for (i, x) in &self.coeffs {
            i.hash(state);
            x.numer().hash(state);
            x.denom().hash(state);
        }
    }
}

impl PartialOrd for SkewVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SkewVector {
    /// Lexicographic order on the sparse coefficient lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.space.id.cmp(&other.space.id).then_with(|| self.coeffs.iter().cmp(other.coeffs.iter()))
    }
}

impl fmt::Display for SkewVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&i, &x) in &self.coeffs {
            let l = &self.space.labels[i];
            let neg = x < Q::zero();
            let a = if neg { -x } else { x };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if a.is_one() {
                write!(f, "{l}")?;
            } else {
                write!(f, "{a}*{l}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for SkewVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SkewVector({self})")
    }
}

impl Add for &SkewVector {
    type Output = SkewVector;
    fn add(self, rhs: &SkewVector) -> SkewVector {
        self.checked_add(rhs).expect("adding vectors of different skew spaces")
    }
}

impl Add for SkewVector {
    type Output = SkewVector;
    fn add(self, rhs: SkewVector) -> SkewVector {
        &self + &rhs
    }
}

impl Sub for &SkewVector {
    type Output = SkewVector;
    fn sub(self, rhs: &SkewVector) -> SkewVector {
        self + &(-rhs)
    }
}

impl Sub for SkewVector {
    type Output = SkewVector;
    fn sub(self, rhs: SkewVector) -> SkewVector {
        &self - &rhs
    }
}

impl Neg for &SkewVector {
    type Output = SkewVector;
    fn neg(self) -> SkewVector {
        self.scale(-Q::one())
    }
}

impl Neg for SkewVector {
    type Output = SkewVector;
    fn neg(self) -> SkewVector {
        -&self
    }
}

impl Mul<&SkewVector> for Q {
    type Output = SkewVector;
    fn mul(self, rhs: &SkewVector) -> SkewVector {
        rhs.scale(self)
    }
}

impl AddAssign<&SkewVector> for SkewVector {
    fn add_assign(&mut self, rhs: &SkewVector) {
        assert!(self.same_space(rhs), "adding vectors of different skew spaces");
        for (&i, &x) in &rhs.coeffs {
            self.add_coeff(i, x);
        }
    }
}

impl SubAssign<&SkewVector> for SkewVector {
    fn sub_assign(&mut self, rhs: &SkewVector) {
        *self += &(-rhs);
    }
}

/// Sums an iterator of vectors; `space` supplies the zero.
pub fn sum<'a>(space: &Space, it: impl IntoIterator<Item = &'a SkewVector>) -> SkewVector {
    let mut acc = space.zero();
    for v in it {
        acc += v;
    }
    acc
}

/// Checked pairing ε(v, w) in `space`.
pub fn pair(space: &Space, v: &SkewVector, w: &SkewVector) -> Result<Q, SkewError> {
    if v.space.id != space.id || w.space.id != space.id {
        return Err(SkewError::SpaceMismatch);
    }
    Ok(v.pair(w))
}

/// Basis of the radical {v | ε(v, ·) = 0}.
pub fn radical(space: &Space) -> Vec<SkewVector> {
    linalg::nullspace(space.matrix(), space.dim()).iter().map(|x| space.from_dense(x)).collect()
}

/// The conjugate space (V, −ε), with the same labels.
pub fn conjugate(space: &Space) -> Space {
    let eps = space.eps.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    SkewSpace::with_blocks(space.labels.clone(), eps, space.blocks.clone()).expect("negation preserves antisymmetry")
}

/// Off-diagonal block of a direct sum: ε between summand `i` and summand `j`
/// (`i < j`), given as a dim_i × dim_j matrix.
#[derive(Clone, Debug)]
pub struct CrossBlock {
    pub i: usize,
    pub j: usize,
    pub block: Vec<Vec<Q>>,
}

/// Direct sum of spaces, optionally twisted by cross blocks. Labels are tagged
/// with their summand index.
pub fn direct_sum(parts: &[Space], cross: &[CrossBlock]) -> Result<Space, SkewError> {
    let mut labels = Vec::new();
    let mut blocks = Vec::new();
    for (k, p) in parts.iter().enumerate() {
        blocks.push((labels.len(), p.dim()));
        labels.extend(p.labels.iter().map(|l| BasisLabel::Part(k, Box::new(l.clone()))));
    }
    let n = labels.len();
    let mut eps = vec![vec![Q::zero(); n]; n];
    for (k, p) in parts.iter().enumerate() {
        let off = blocks[k].0;
        for i in 0..p.dim() {
            for j in 0..p.dim() {
                eps[off + i][off + j] = p.eps[i][j];
            }
        }
    }
    for cb in cross {
        if cb.i >= parts.len() || cb.j >= parts.len() || cb.i == cb.j {
            return Err(SkewError::Shape(format!("cross block ({}, {}) out of range", cb.i, cb.j)));
        }
        let (oi, di) = blocks[cb.i];
        let (oj, dj) = blocks[cb.j];
        if cb.block.len() != di || cb.block.iter().any(|r| r.len() != dj) {
            return Err(SkewError::Shape(format!("cross block ({}, {}) must be {di}x{dj}", cb.i, cb.j)));
        }
        for a in 0..di {
            for b in 0..dj {
                eps[oi + a][oj + b] = cb.block[a][b];
                eps[oj + b][oi + a] = -cb.block[a][b];
            }
        }
    }
    SkewSpace::with_blocks(labels, eps, blocks)
}

/// Embeds `v` (a vector of summand `part`) into the direct sum.
pub fn inject(sum: &Space, part: usize, v: &SkewVector) -> SkewVector {
    let (off, d) = sum.blocks[part];
    assert_eq!(d, v.space.dim(), "summand dimension mismatch");
    sum.from_coeffs(v.terms().map(|(i, x)| (off + i, x)))
}

/// Component of `v` in summand `part`, as a vector of `target`.
pub fn project(sum: &Space, part: usize, target: &Space, v: &SkewVector) -> SkewVector {
    let (off, d) = sum.blocks[part];
    assert_eq!(d, target.dim(), "summand dimension mismatch");
    target.from_coeffs(v.terms().filter(|(i, _)| *i >= off && *i < off + d).map(|(i, x)| (i - off, x)))
}

/// Builds x_0 ⊕ x_1 ⊕ ... in a direct sum.
pub fn oplus(sum: &Space, parts: &[&SkewVector]) -> SkewVector {
    assert_eq!(parts.len(), sum.blocks.len(), "one component per summand");
    let mut out = sum.zero();
    for (k, v) in parts.iter().enumerate() {
        out += &inject(sum, k, v);
    }
    out
}

/// Subspace spanned by a subset of basis vectors, with restricted form.
pub fn restrict(space: &Space, indices: &[usize]) -> Result<Space, SkewError> {
    let labels = indices.iter().map(|&i| space.labels[i].clone()).collect();
    let eps = indices.iter().map(|&i| indices.iter().map(|&j| space.eps[i][j]).collect()).collect();
    SkewSpace::new(labels, eps)
}

/// Splits V = rad ⊕ W with W spanned by basis vectors (a complement), and
/// returns (radical basis, complement indices, det of ε restricted to W).
pub fn radical_decomposition(space: &Space) -> (Vec<SkewVector>, Vec<usize>, num::BigRational) {
    let rad = radical(space);
    // Pick complement basis vectors greedily: extend the radical to a basis.
    let mut rows: Vec<Vec<Q>> = rad.iter().map(|v| v.dense()).collect();
    let mut comp = Vec::new();
    let mut r = linalg::rank(&rows);
    for i in 0..space.dim() {
        let mut trial = rows.clone();
        trial.push(space.basis(i).dense());
        let tr = linalg::rank(&trial);
        if tr > r {
            rows = trial;
            r = tr;
            comp.push(i);
        }
    }
    let sub: Vec<Vec<Q>> = comp.iter().map(|&i| comp.iter().map(|&j| space.eps[i][j]).collect()).collect();
    (rad, comp, linalg::determinant(&sub))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symplectic2() -> Space {
        SkewSpace::from_entries(vec![BasisLabel::named("e"), BasisLabel::named("f")], &[(0, 1, qi(1))]).unwrap()
    }

    #[test]
    fn label_roundtrip() {
        for l in [
            BasisLabel::Tri(1, 0, 2),
            BasisLabel::Tri(12, 0, 3),
            BasisLabel::named("phi_3"),
            BasisLabel::Part(2, Box::new(BasisLabel::Tri(0, 1, 1))),
        ] {
            assert_eq!(l.to_string().parse::<BasisLabel>().unwrap(), l);
        }
    }

    #[test]
    fn rejects_non_antisymmetric() {
        let labels = vec![BasisLabel::named("a"), BasisLabel::named("b")];
        let e = SkewSpace::new(labels.clone(), vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]]);
        assert_eq!(e.unwrap_err(), SkewError::NotAntisymmetric(0, 1));
        let d = SkewSpace::new(vec![labels[0].clone(), labels[0].clone()], vec![vec![qi(0); 2]; 2]);
        assert!(matches!(d, Err(SkewError::DuplicateLabel(_))));
    }

    #[test]
    fn trivial_form_radical_is_everything() {
        let s = SkewSpace::new(vec![BasisLabel::named("a"), BasisLabel::named("b")], vec![vec![qi(0); 2]; 2]).unwrap();
        assert_eq!(radical(&s).len(), 2);
    }

    #[test]
    fn symplectic_radical_is_empty() {
        assert!(radical(&symplectic2()).is_empty());
    }

    #[test]
    fn mismatched_space_is_an_error() {
        let a = symplectic2();
        let b = conjugate(&a);
        assert_eq!(pair(&a, &a.basis(0), &b.basis(1)), Err(SkewError::SpaceMismatch));
    }

    #[test]
    fn conjugate_negates() {
        let a = symplectic2();
        let b = conjugate(&a);
        assert_eq!(b.basis(0).pair(&b.basis(1)), -a.basis(0).pair(&a.basis(1)));
        assert_eq!(conjugate(&b).id(), a.id());
    }

    #[test]
    fn untwisted_sum_is_orthogonal() {
        let a = symplectic2();
        let s = direct_sum(&[a.clone(), a.clone()], &[]).unwrap();
        for v in a.basis_vectors() {
            for w in a.basis_vectors() {
                assert_eq!(inject(&s, 0, &v).pair(&inject(&s, 1, &w)), qi(0));
            }
        }
        let v = oplus(&s, &[&a.basis(0), &a.basis(1)]);
        assert_eq!(project(&s, 1, &a, &v), a.basis(1));
    }

    #[test]
    fn twisted_sum_and_shape_check() {
        let a = symplectic2();
        let cb = CrossBlock { i: 0, j: 1, block: vec![vec![qi(0), half()], vec![qi(0), qi(0)]] };
        let s = direct_sum(&[a.clone(), a.clone()], &[cb]).unwrap();
        assert_eq!(inject(&s, 0, &a.basis(0)).pair(&inject(&s, 1, &a.basis(1))), half());
        assert_eq!(inject(&s, 1, &a.basis(1)).pair(&inject(&s, 0, &a.basis(0))), -half());
        let bad = CrossBlock { i: 0, j: 1, block: vec![vec![qi(0)]] };
        assert!(matches!(direct_sum(&[a.clone(), a], &[bad]), Err(SkewError::Shape(_))));
    }

    #[test]
    fn json_roundtrip() {
        let a = symplectic2();
        let b = SkewSpace::from_json(&a.to_json()).unwrap();
        assert_eq!(*a, *b);
        let v = &a.basis(0).scale(q(3, 2)) - &a.basis(1);
        assert_eq!(SkewVector::from_json(&a, &v.to_json()).unwrap(), v);
    }

    #[test]
    fn vector_arithmetic_drops_zeros() {
        let a = symplectic2();
        let v = &a.basis(0) + &a.basis(1);
        let w = &v - &a.basis(1);
        assert_eq!(w, a.basis(0));
        assert_eq!(w.support().count(), 1);
        assert!((&w - &w).is_zero());
    }
}
