//! The triangle spaces ∇_N.
//!
//! Basis vectors e_{a,b,c} are indexed by C_N = {a+b+c = N}. The form pairs
//! e_{abc} with its three "forward" neighbours e_{a+1,b-1,c}, e_{a,b+1,c-1},
//! e_{a-1,b,c+1}: the value is 1, or 1/2 if the index the two labels share is 0.
//!
//! Throughout, `big_n` is N and `n = N - 1` is the rank.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigRational, One, Zero};
use thiserror::Error;

use crate::linalg;
use crate::skewspace::{self, half, qi, BasisLabel, SkewSpace, SkewVector, Space, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangleError {
    #[error("N must be at least 2 (got {0})")]
    NTooSmall(usize),
    #[error("label ({0}, {1}, {2}) is not in C_{3}")]
    OutOfCone(i64, i64, i64, usize),
    #[error("index out of range: {0}")]
    IndexRange(String),
}

/// Step direction of a straight run ⟨start → end⟩ in C_N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// b+1, c−1 (a fixed)
    BUpCDown,
    /// c+1, b−1 (a fixed)
    CUpBDown,
    /// c+1, a−1 (b fixed)
    CUpADown,
    /// a+1, c−1 (b fixed)
    AUpCDown,
    /// a+1, b−1 (c fixed)
    AUpBDown,
    /// b+1, a−1 (c fixed)
    BUpADown,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::BUpCDown,
        Direction::CUpBDown,
        Direction::CUpADown,
        Direction::AUpCDown,
        Direction::AUpBDown,
        Direction::BUpADown,
    ];

    pub fn delta(self) -> (i64, i64, i64) {
        match self {
            Direction::BUpCDown => (0, 1, -1),
            Direction::CUpBDown => (0, -1, 1),
            Direction::CUpADown => (-1, 0, 1),
            Direction::AUpCDown => (1, 0, -1),
            Direction::AUpBDown => (1, -1, 0),
            Direction::BUpADown => (-1, 1, 0),
        }
    }
}

/// Which family of fundamental weights: built from ne_s, se_s, nw_s or sw_s.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Ne,
    Se,
    Nw,
    Sw,
}

/// ∇_N together with its distinguished label subsets.
#[derive(Clone, Debug)]
pub struct Triangle {
    big_n: usize,
    space: Space,
}

impl Triangle {
    pub fn new(big_n: usize) -> Result<Self, TriangleError> {
        if big_n < 2 {
            return Err(TriangleError::NTooSmall(big_n));
        }
        let nn = big_n as u32;
        let mut labels = Vec::new();
        for a in (0..=nn).rev() {
            for b in (0..=nn - a).rev() {
                labels.push(BasisLabel::Tri(a, b, nn - a - b));
            }
        }
        let index = |a: i64, b: i64, c: i64| -> Option<usize> {
            if a < 0 || b < 0 || c < 0 {
                return None;
            }
            labels.iter().position(|l| *l == BasisLabel::Tri(a as u32, b as u32, c as u32))
        };
        let mut entries = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            let BasisLabel::Tri(a, b, c) = *l else { unreachable!() };
            let (a, b, c) = (a as i64, b as i64, c as i64);
            // (target, shared index)
            for (t, common) in [((a + 1, b - 1, c), c), ((a, b + 1, c - 1), a), ((a - 1, b, c + 1), b)] {
                if let Some(j) = index(t.0, t.1, t.2) {
                    let val = if common == 0 { half() } else { qi(1) };
                    entries.push((i, j, val));
                }
            }
        }
        let space = SkewSpace::from_entries(labels, &entries).expect("triangle pairing is antisymmetric");
        Ok(Triangle { big_n, space })
    }

    /// The same basis with `ε_{ij} += x`, `ε_{ji} −= x`.
    pub fn perturbed(&self, i: usize, j: usize, x: Q) -> Result<Triangle, TriangleError> {
        let d = self.space.dim();
        if i >= d || j >= d || i == j {
            return Err(TriangleError::IndexRange(format!("entry ({i}, {j}) of a {d}x{d} form")));
        }
        let mut eps = self.space.matrix().to_vec();
        eps[i][j] += x;
        eps[j][i] -= x;
        let space = SkewSpace::new(self.space.labels().to_vec(), eps).expect("perturbation keeps antisymmetry");
        Ok(Triangle { big_n: self.big_n, space })
    }

    pub fn big_n(&self) -> usize {
        self.big_n
    }

    /// The rank n = N − 1.
    pub fn n(&self) -> usize {
        self.big_n - 1
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn index(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        if a + b + c != self.big_n {
            return None;
        }
        self.space.index_of(&BasisLabel::Tri(a as u32, b as u32, c as u32))
    }

    /// Basis vector e_{a,b,c}; panics outside C_N.
    pub fn e(&self, a: usize, b: usize, c: usize) -> SkewVector {
        let i = self.index(a, b, c).unwrap_or_else(|| panic!("({a},{b},{c}) not in C_{}", self.big_n));
        self.space.basis(i)
    }

    pub fn triple(&self, i: usize) -> (usize, usize, usize) {
        match self.space.label(i) {
            BasisLabel::Tri(a, b, c) => (*a as usize, *b as usize, *c as usize),
            _ => unreachable!("triangle labels are triples"),
        }
    }

    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        (0..self.space.dim()).map(|i| self.triple(i)).collect()
    }

    fn select(&self, pred: impl Fn(usize, usize, usize) -> bool) -> Vec<(usize, usize, usize)> {
        self.triples().into_iter().filter(|&(a, b, c)| pred(a, b, c)).collect()
    }

    /// C'_N: C_N without its three corners.
    pub fn c_prime(&self) -> Vec<(usize, usize, usize)> {
        let nn = self.big_n;
        self.select(|a, b, c| a != nn && b != nn && c != nn)
    }

    /// neC_N = {1 ≤ a ≤ n}.
    pub fn ne_cone(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n();
        self.select(|a, _, _| (1..=n).contains(&a))
    }

    /// neC_N with the c = 0 line removed.
    pub fn wne_cone(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n();
        self.select(|a, _, c| (1..=n).contains(&a) && c > 0)
    }

    /// seC_N = {1 ≤ b ≤ n}.
    pub fn se_cone(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n();
        self.select(|_, b, _| (1..=n).contains(&b))
    }

    /// seC_N with the a = 0 line removed.
    pub fn wse_cone(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n();
        self.select(|a, b, _| (1..=n).contains(&b) && a > 0)
    }

    fn vectors(&self, ts: &[(usize, usize, usize)]) -> Vec<SkewVector> {
        ts.iter().map(|&(a, b, c)| self.e(a, b, c)).collect()
    }

    /// Basis of B⁻ (labels neC_N).
    pub fn b_minus(&self) -> Vec<SkewVector> {
        self.vectors(&self.ne_cone())
    }

    /// Basis of B⁺ (labels seC_N).
    pub fn b_plus(&self) -> Vec<SkewVector> {
        self.vectors(&self.se_cone())
    }

    pub fn n_minus(&self) -> Vec<SkewVector> {
        self.vectors(&self.wne_cone())
    }

    pub fn n_plus(&self) -> Vec<SkewVector> {
        self.vectors(&self.wse_cone())
    }

    /// T⁻ = span{ne_s | 1 ≤ s ≤ n}.
    pub fn t_minus(&self) -> Vec<SkewVector> {
        (1..=self.n()).map(|s| self.ne_full(s)).collect()
    }

    /// T⁺ = span{se_s | 1 ≤ s ≤ n}.
    pub fn t_plus(&self) -> Vec<SkewVector> {
        (1..=self.n()).map(|s| self.se_full(s)).collect()
    }

    /// The ∇'_N subspace (corners removed) as its own skew space.
    pub fn snubbed(&self) -> Space {
        let idx: Vec<usize> = self.c_prime().iter().map(|&(a, b, c)| self.index(a, b, c).unwrap()).collect();
        skewspace::restrict(&self.space, &idx).expect("restriction of a valid space")
    }

    /// ⟨start → start + k·dir⟩: sum of the k+1 labels along the run.
    pub fn gfr(&self, start: (usize, usize, usize), k: usize, dir: Direction) -> Result<SkewVector, TriangleError> {
        let (a, b, c) = (start.0 as i64, start.1 as i64, start.2 as i64);
        if a + b + c != self.big_n as i64 {
            return Err(TriangleError::OutOfCone(a, b, c, self.big_n));
        }
        let (da, db, dc) = dir.delta();
        let mut v = self.space.zero();
        for j in 0..=k as i64 {
            let (x, y, z) = (a + j * da, b + j * db, c + j * dc);
            if x < 0 || y < 0 || z < 0 {
                return Err(TriangleError::OutOfCone(x, y, z, self.big_n));
            }
            v += &self.e(x as usize, y as usize, z as usize);
        }
        Ok(v)
    }

    /// ⟨start → end⟩ for two labels on a common line.
    pub fn gfr_to(&self, start: (usize, usize, usize), end: (usize, usize, usize)) -> Result<SkewVector, TriangleError> {
        if start == end {
            return self.gfr(start, 0, Direction::BUpCDown);
        }
        let d = (end.0 as i64 - start.0 as i64, end.1 as i64 - start.1 as i64, end.2 as i64 - start.2 as i64);
        for dir in Direction::ALL {
            let (da, db, dc) = dir.delta();
            let k = if da != 0 { d.0 / da } else { d.1 / db };
            if k > 0 && (k * da, k * db, k * dc) == d {
                return self.gfr(start, k as usize, dir);
            }
        }
        Err(TriangleError::IndexRange(format!("{start:?} and {end:?} are not on a common line")))
    }

    fn check_sk(&self, s: usize, k: usize) -> Result<(), TriangleError> {
        if k > s || s > self.big_n {
            return Err(TriangleError::IndexRange(format!("need 0 <= k <= s <= N, got s={s}, k={k}")));
        }
        Ok(())
    }

    /// ne_{s,k} = ⟨N−s,0,s → N−s,k,s−k⟩.
    pub fn try_ne(&self, s: usize, k: usize) -> Result<SkewVector, TriangleError> {
        self.check_sk(s, k)?;
        self.gfr((self.big_n - s, 0, s), k, Direction::BUpCDown)
    }

    /// se_{s,k} = ⟨s,N−s,0 → s−k,N−s,k⟩.
    pub fn try_se(&self, s: usize, k: usize) -> Result<SkewVector, TriangleError> {
        self.check_sk(s, k)?;
        self.gfr((s, self.big_n - s, 0), k, Direction::CUpADown)
    }

    /// nw_{s,k} = ⟨0,N−s,s → k,N−s,s−k⟩.
    pub fn try_nw(&self, s: usize, k: usize) -> Result<SkewVector, TriangleError> {
        self.check_sk(s, k)?;
        self.gfr((0, self.big_n - s, s), k, Direction::AUpCDown)
    }

    /// sw_{s,k} = ⟨N−s,s,0 → N−s,s−k,k⟩.
    pub fn try_sw(&self, s: usize, k: usize) -> Result<SkewVector, TriangleError> {
        self.check_sk(s, k)?;
        self.gfr((self.big_n - s, s, 0), k, Direction::CUpBDown)
    }

    pub fn ne(&self, s: usize, k: usize) -> SkewVector {
        self.try_ne(s, k).unwrap()
    }

    pub fn se(&self, s: usize, k: usize) -> SkewVector {
        self.try_se(s, k).unwrap()
    }

    pub fn nw(&self, s: usize, k: usize) -> SkewVector {
        self.try_nw(s, k).unwrap()
    }

    pub fn sw(&self, s: usize, k: usize) -> SkewVector {
        self.try_sw(s, k).unwrap()
    }

    /// ne_s = ne_{s,s}.
    pub fn ne_full(&self, s: usize) -> SkewVector {
        self.ne(s, s)
    }

    /// se_s = se_{s,s}.
    pub fn se_full(&self, s: usize) -> SkewVector {
        self.se(s, s)
    }

    /// All named vectors ne_{s,k}, se_{s,k}, nw_{s,k}, sw_{s,k} (0 ≤ k ≤ s ≤ N)
    /// and their diagonal shorthands, keyed as e.g. "ne_{2,1}" and "ne_2".
    pub fn special_vectors(&self) -> BTreeMap<String, SkewVector> {
        let mut out = BTreeMap::new();
        for s in 0..=self.big_n {
            for k in 0..=s {
                out.insert(format!("ne_{{{s},{k}}}"), self.ne(s, k));
                out.insert(format!("se_{{{s},{k}}}"), self.se(s, k));
                out.insert(format!("nw_{{{s},{k}}}"), self.nw(s, k));
                out.insert(format!("sw_{{{s},{k}}}"), self.sw(s, k));
            }
            out.insert(format!("ne_{s}"), self.ne(s, s));
            out.insert(format!("se_{s}"), self.se(s, s));
            out.insert(format!("nw_{s}"), self.nw(s, s));
            out.insert(format!("sw_{s}"), self.sw(s, s));
        }
        out
    }

    /// Checks sw_s = ne_s, nw_s = se_s and the difference identities for
    /// sw_{s,k}, nw_{s,k}. Returns the first failure.
    pub fn check_shorthand_identities(&self) -> Result<(), String> {
        for s in 0..=self.big_n {
            if self.sw(s, s) != self.ne(s, s) {
                return Err(format!("sw_{s} != ne_{s}"));
            }
            if self.nw(s, s) != self.se(s, s) {
                return Err(format!("nw_{s} != se_{s}"));
            }
            for k in 0..s {
                if self.sw(s, k) != &self.ne_full(s) - &self.ne(s, s - k - 1) {
                    return Err(format!("sw_{{{s},{k}}} != ne_{s} - ne_{{{s},{}}}", s - k - 1));
                }
                if self.nw(s, k) != &self.se_full(s) - &self.se(s, s - k - 1) {
                    return Err(format!("nw_{{{s},{k}}} != se_{s} - se_{{{s},{}}}", s - k - 1));
                }
            }
        }
        Ok(())
    }

    /// Fundamental weights ϖ_s = Σ_t (B⁻¹)_{st} ne_t (or se_t), s = 1..n,
    /// returned at position s − 1.
    pub fn fundamental_weights(&self, side: Side) -> Vec<SkewVector> {
        let n = self.n();
        let binv = linalg::inverse(&cartan(n)).expect("Cartan matrix of type A is invertible");
        (0..n)
            .map(|s| {
                let mut v = self.space.zero();
                for t in 0..n {
                    let base = match side {
                        Side::Ne => self.ne_full(t + 1),
                        Side::Se => self.se_full(t + 1),
                        Side::Nw => self.nw(t + 1, t + 1),
                        Side::Sw => self.sw(t + 1, t + 1),
                    };
                    v += &base.scale(binv[s][t]);
                }
                v
            })
            .collect()
    }

    /// Determinant of the B⁻ × B⁺ pairing matrix.
    pub fn borel_nondegeneracy(&self) -> BigRational {
        let m = self.space.pairing_matrix(&self.b_minus(), &self.b_plus());
        linalg::determinant(&m)
    }
}

/// Cartan matrix of type A_n.
pub fn cartan(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|r| {
            (0..n)
                .map(|s| {
                    if r == s {
                        qi(2)
                    } else if r.abs_diff(s) == 1 {
                        qi(-1)
                    } else {
                        Q::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn build_triangle(big_n: usize) -> Result<Triangle, TriangleError> {
    Triangle::new(big_n)
}

fn delta(x: bool) -> Q {
    if x {
        Q::one()
    } else {
        Q::zero()
    }
}

// Closed forms of the pairing tables, used as the expected side of the
// exhaustive comparison. Each returns None outside its stated index range.

fn same_nil_direct(s: usize, k: usize, s2: usize, k2: usize) -> Option<Q> {
    if s2 == s && k2 > k {
        Some(qi(1))
    } else if s2 == s + 1 && k2 <= k {
        Some(half())
    } else if s2 + 1 == s && k2 < k {
        Some(half())
    } else if s.abs_diff(s2) >= 2 {
        Some(Q::zero())
    } else {
        None
    }
}

/// (ne_{s,k}, ne_{s',k'}) = (se_{s,k}, se_{s',k'}); cases not listed follow
/// from skew-symmetry.
pub fn table_same_nil(s: usize, k: usize, s2: usize, k2: usize) -> Q {
    if (s, k) == (s2, k2) {
        return Q::zero();
    }
    same_nil_direct(s, k, s2, k2)
        .or_else(|| same_nil_direct(s2, k2, s, k).map(|x| -x))
        .expect("every index pair is covered directly or by skew-symmetry")
}

/// (ne_s, ne_{s',k'}) = (se_s, se_{s',k'}).
pub fn table_same_car(s: usize, s2: usize) -> Q {
    match s.abs_diff(s2) {
        0 => qi(-1),
        1 => half(),
        _ => Q::zero(),
    }
}

/// (ne_{s,k}, se_{s',k'}).
pub fn table_diff_nil(big_n: usize, s: usize, k: usize, s2: usize, k2: usize) -> Q {
    let n = big_n - 1;
    delta(k + k2 + 1 == s) * (delta(k + s2 == n) - delta(k + s2 == big_n))
}

/// (ne_s, se_{s',k'}) and (ne_s, se_t).
pub fn table_diff_car(big_n: usize, s: usize, s2: usize) -> Q {
    match s2.abs_diff(big_n - s) {
        0 => qi(1),
        1 => -half(),
        _ => Q::zero(),
    }
}

/// Outcome of an exhaustive table comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableReport {
    pub big_n: usize,
    pub checked: usize,
    pub first_mismatch: Option<String>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Compares the direct pairing with all seven closed-form families over
/// every admissible index.
pub fn verify_pairing_tables(big_n: usize) -> Result<TableReport, TriangleError> {
    Ok(pairing_table_report(&Triangle::new(big_n)?))
}

/// [`verify_pairing_tables`] against an arbitrary form on the `C_N` basis
/// (used with [`Triangle::perturbed`] as a negative control).
pub fn pairing_table_report(t: &Triangle) -> TableReport {
    let big_n = t.big_n();
    let n = t.n();
    let mut checked = 0usize;
    let mut first: Option<String> = None;
    let mut check = |name: &str, got: Q, want: Q| {
        checked += 1;
        if got != want && first.is_none() {
            first = Some(format!("{name}: got {got}, expected {want}"));
        }
    };
    for s in 1..=n {
        for k in 0..s {
            for s2 in 1..=n {
                for k2 in 0..s2 {
                    let want = table_same_nil(s, k, s2, k2);
                    check(&format!("EqSameNil ne ({s},{k};{s2},{k2})"), t.ne(s, k).pair(&t.ne(s2, k2)), want);
                    check(&format!("EqSameNil se ({s},{k};{s2},{k2})"), t.se(s, k).pair(&t.se(s2, k2)), want);
                    check(
                        &format!("EqDiffNil ({s},{k};{s2},{k2})"),
                        t.ne(s, k).pair(&t.se(s2, k2)),
                        table_diff_nil(big_n, s, k, s2, k2),
                    );
                }
            }
        }
    }
    for s in 0..=big_n {
        for s2 in 1..=n {
            for k2 in 0..s2 {
                let want = table_same_car(s, s2);
                check(&format!("EqSameCar ne ({s};{s2},{k2})"), t.ne_full(s).pair(&t.ne(s2, k2)), want);
                check(&format!("EqSameCar se ({s};{s2},{k2})"), t.se_full(s).pair(&t.se(s2, k2)), want);
                check(
                    &format!("EqDiffCar ({s};{s2},{k2})"),
                    t.ne_full(s).pair(&t.se(s2, k2)),
                    table_diff_car(big_n, s, s2),
                );
            }
        }
        for s2 in 0..=big_n {
            check(&format!("EqVanishing ne ({s};{s2})"), t.ne_full(s).pair(&t.ne_full(s2)), Q::zero());
            check(&format!("EqVanishing se ({s};{s2})"), t.se_full(s).pair(&t.se_full(s2)), Q::zero());
        }
    }
    for s in 1..=n {
        for k in 0..s {
            for s2 in 0..=big_n {
                check(&format!("EqDiffCarOpp ({s},{k};{s2})"), t.ne(s, k).pair(&t.se_full(s2)), Q::zero());
            }
        }
        for u in 1..=n {
            check(&format!("EqDiffCart ({s};{u})"), t.ne_full(s).pair(&t.se_full(u)), table_diff_car(big_n, s, u));
        }
    }
    TableReport { big_n, checked, first_mismatch: first }
}

/// Checks the pairings of the fundamental weights with the ne/se vectors and
/// with each other. Returns the first failure.
pub fn check_fundamental_weight_pairings(t: &Triangle) -> Result<(), String> {
    let n = t.n();
    let big_n = t.big_n();
    let hat = t.fundamental_weights(Side::Ne);
    let chk = t.fundamental_weights(Side::Se);
    for s in 1..=n {
        for s2 in 1..=n {
            for k2 in 0..s2 {
                let d = -half() * delta(s == s2);
                if hat[s - 1].pair(&t.ne(s2, k2)) != d || chk[s - 1].pair(&t.se(s2, k2)) != d {
                    return Err(format!("(w_{s}, ne/se_{{{s2},{k2}}}) != {d}"));
                }
                let d2 = half() * delta(s + s2 == big_n);
                if hat[s - 1].pair(&t.se(s2, k2)) != d2 {
                    return Err(format!("(w^ne_{s}, se_{{{s2},{k2}}}) != {d2}"));
                }
            }
            if hat[s - 1].pair(&hat[s2 - 1]) != Q::zero() || chk[s - 1].pair(&chk[s2 - 1]) != Q::zero() {
                return Err(format!("weights {s},{s2} not orthogonal"));
            }
            let d3 = half() * delta(s + s2 == big_n);
            if hat[s2 - 1].pair(&t.se_full(s)) != d3 || t.ne_full(s2).pair(&chk[s - 1]) != d3 {
                return Err(format!("(w_{s2}, se_{s}) != {d3}"));
            }
        }
    }
    Ok(())
}

/// The Heisenberg-type twisted sum ∇'_N ⊕~ conj(∇'_N) over the basis
/// B⁻ ∪ T⁺ (e_{abc} for abc ∈ neC_N, then se_1..se_n): the cross form is
/// (u, v̄) = (w, z̄) = 0, (u, z̄) = −(u, z), (w, v̄) = (w, v) for u, v ∈ B⁻ and
/// w, z ∈ T⁺.
pub struct HeisenbergDouble {
    pub triangle: Triangle,
    pub space: Space,
    /// Vectors of ∇_N spanning the first summand, in basis order.
    pub basis: Vec<SkewVector>,
    /// Number of B⁻ basis vectors (the rest are T⁺).
    pub n_borel: usize,
}

impl HeisenbergDouble {
    pub fn new(big_n: usize) -> Result<Self, TriangleError> {
        let t = Triangle::new(big_n)?;
        let mut basis = t.b_minus();
        let n_borel = basis.len();
        basis.extend(t.t_plus());
        let mut labels: Vec<BasisLabel> = t.ne_cone().iter().map(|&(a, b, c)| BasisLabel::Tri(a as u32, b as u32, c as u32)).collect();
        labels.extend((1..=t.n()).map(|s| BasisLabel::named(format!("se_{s}"))));
        let eps = t.space().pairing_matrix(&basis, &basis);
        let first = SkewSpace::new(labels, eps).expect("restricted form is antisymmetric");
        let second = skewspace::conjugate(&first);
        let d = basis.len();
        let mut cross = vec![vec![Q::zero(); d]; d];
        for x in 0..d {
            for y in 0..d {
                let p = basis[x].pair(&basis[y]);
                cross[x][y] = match (x < n_borel, y < n_borel) {
                    (true, false) => -p,
                    (false, true) => p,
                    _ => Q::zero(),
                };
            }
        }
        let space = skewspace::direct_sum(&[first, second], &[skewspace::CrossBlock { i: 0, j: 1, block: cross }])
            .map_err(|e| TriangleError::IndexRange(e.to_string()))?;
        Ok(HeisenbergDouble { triangle: t, space, basis, n_borel })
    }

    /// Coordinates of a vector of ∇'_N in the B⁻ ∪ T⁺ basis.
    pub fn coordinates(&self, v: &SkewVector) -> Vec<Q> {
        let t = &self.triangle;
        let n = t.n();
        let mut rest = v.clone();
        let mut out = vec![Q::zero(); self.basis.len()];
        // Only se_s meets the a = 0 line, at (0, N−s, s).
        for s in 1..=n {
            let c = rest.coeff(t.index(0, t.big_n() - s, s).unwrap());
            out[self.n_borel + s - 1] = c;
            rest -= &t.se_full(s).scale(c);
        }
        for (i, &(a, b, c)) in t.ne_cone().iter().enumerate() {
            let idx = t.index(a, b, c).unwrap();
            out[i] = rest.coeff(idx);
            rest -= &t.space().basis(idx).scale(out[i]);
        }
        assert!(rest.is_zero(), "vector is not in the span of B- and T+");
        out
    }

    /// v ⊕ 0 (`bar = false`) or 0 ⊕ v̄ (`bar = true`).
    pub fn embed(&self, v: &SkewVector, bar: bool) -> SkewVector {
        let d = self.basis.len();
        let off = if bar { d } else { 0 };
        self.space.from_coeffs(self.coordinates(v).into_iter().enumerate().map(|(i, x)| (off + i, x)))
    }
}

/// Index of the symplectic model: (s, s) ∈ I₀ or (s, k), k < s, in I₁.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IIndex {
    pub s: usize,
    pub k: usize,
}

impl IIndex {
    pub fn is_i0(&self) -> bool {
        self.s == self.k
    }

    /// neC_N label (N−s, k, s−k) of an I₁ index.
    pub fn label(&self, big_n: usize) -> (usize, usize, usize) {
        (big_n - self.s, self.k, self.s - self.k)
    }
}

/// The total order on I: I₀ ascending, then I₁ by (s−k) ascending and, on
/// ties, by s descending.
pub fn i_order_cmp(x: &IIndex, y: &IIndex) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    match (x.is_i0(), y.is_i0()) {
        (true, true) => x.s.cmp(&y.s),
        (true, false) => Less,
        (false, true) => Greater,
        (false, false) => (x.s - x.k).cmp(&(y.s - y.k)).then(y.s.cmp(&x.s)),
    }
}

pub fn ordered_index_set(n: usize) -> Vec<IIndex> {
    let mut v: Vec<IIndex> = (1..=n).flat_map(|s| (0..=s).map(move |k| IIndex { s, k })).collect();
    v.sort_by(i_order_cmp);
    v
}

/// Embedding of span(neC_N) into V_N = ⊕_i (R f_i ⊕ R ϖ_i), (f_i, ϖ_i) = 1/2,
/// extended by se_s = −f_{N−s}.
pub struct EmbeddingVN {
    pub triangle: Triangle,
    pub order: Vec<IIndex>,
    pub space: Space,
    /// Image of ne_{s,k} for (s,k) ∈ I₁.
    pub ne_rows: BTreeMap<IIndex, SkewVector>,
    /// Image of ϖ̂_s at position s − 1.
    pub weight_rows: Vec<SkewVector>,
    /// Image of se_s at position s − 1.
    pub se_rows: Vec<SkewVector>,
}

impl EmbeddingVN {
    /// Solves for the coordinates, last index first. Row i has f_i (I₁) or
    /// ϖ_i (I₀) at its own slot and multiples of ϖ_j at later I₁ slots; those
    /// multiples are fixed by pairing with the rows already solved.
    pub fn new(big_n: usize) -> Result<Self, TriangleError> {
        let t = Triangle::new(big_n)?;
        let n = t.n();
        let order = ordered_index_set(n);
        let mut labels = Vec::new();
        for i in &order {
            labels.push(BasisLabel::named(format!("f({},{})", i.s, i.k)));
            labels.push(BasisLabel::named(format!("w({},{})", i.s, i.k)));
        }
        let entries: Vec<_> = (0..order.len()).map(|p| (2 * p, 2 * p + 1, half())).collect();
        let space = SkewSpace::from_entries(labels, &entries).expect("symplectic model");
        let hat = t.fundamental_weights(Side::Ne);
        let source = |i: &IIndex| if i.is_i0() { hat[i.s - 1].clone() } else { t.ne(i.s, i.k) };

        let mut rows: Vec<Option<SkewVector>> = vec![None; order.len()];
        for p in (0..order.len()).rev() {
            let i = order[p];
            let own = if i.is_i0() { 2 * p + 1 } else { 2 * p };
            let mut row = space.basis(own);
            for q in p + 1..order.len() {
                if order[q].is_i0() {
                    continue;
                }
                // (row, row_q) = −½ · x_q since row_q has f_q at slot q.
                let x = qi(-2) * source(&i).pair(&source(&order[q]));
                row.add_coeff(2 * q + 1, x);
            }
            rows[p] = Some(row);
        }
        let rows: Vec<SkewVector> = rows.into_iter().map(Option::unwrap).collect();
        let pos = |i: IIndex| order.iter().position(|&x| x == i).unwrap();
        let ne_rows = order.iter().enumerate().filter(|(_, i)| !i.is_i0()).map(|(p, &i)| (i, rows[p].clone())).collect();
        let weight_rows = (1..=n).map(|s| rows[pos(IIndex { s, k: s })].clone()).collect();
        let se_rows = (1..=n).map(|s| -space.basis(2 * pos(IIndex { s: big_n - s, k: big_n - s }))).collect();
        Ok(EmbeddingVN { triangle: t, order, space, ne_rows, weight_rows, se_rows })
    }

    pub fn position(&self, i: IIndex) -> usize {
        self.order.iter().position(|&x| x == i).expect("index in I")
    }

    pub fn f(&self, i: IIndex) -> SkewVector {
        self.space.basis(2 * self.position(i))
    }

    pub fn varpi(&self, i: IIndex) -> SkewVector {
        self.space.basis(2 * self.position(i) + 1)
    }

    /// Pairs of (∇ vector, V_N image) for every embedded generator.
    pub fn generators(&self) -> Vec<(String, SkewVector, SkewVector)> {
        let t = &self.triangle;
        let hat = t.fundamental_weights(Side::Ne);
        let mut out = Vec::new();
        for (i, row) in &self.ne_rows {
            out.push((format!("ne_{{{},{}}}", i.s, i.k), t.ne(i.s, i.k), row.clone()));
        }
        for s in 1..=t.n() {
            out.push((format!("w^_{s}"), hat[s - 1].clone(), self.weight_rows[s - 1].clone()));
            out.push((format!("se_{s}"), t.se_full(s), self.se_rows[s - 1].clone()));
        }
        out
    }

    /// Coordinates satisfy the triangularity rules and every pairing is
    /// preserved.
    pub fn verify(&self) -> Result<(), String> {
        for (p, i) in self.order.iter().enumerate() {
            let row = if i.is_i0() { &self.weight_rows[i.s - 1] } else { &self.ne_rows[i] };
            for (slot, x) in row.terms() {
                let q = slot / 2;
                let is_f = slot % 2 == 0;
                if q < p {
                    return Err(format!("row {i:?} has a component before its own index"));
                }
                if q == p && (x != Q::one() || is_f == i.is_i0()) {
                    return Err(format!("row {i:?} has the wrong own component"));
                }
                if q > p && (is_f || (i.is_i0() && self.order[q].is_i0())) {
                    return Err(format!("row {i:?} has a forbidden later component"));
                }
            }
        }
        let gens = self.generators();
        for (na, va, ia) in &gens {
            for (nb, vb, ib) in &gens {
                if va.pair(vb) != ia.pair(ib) {
                    return Err(format!("pairing ({na}, {nb}) not preserved"));
                }
            }
        }
        Ok(())
    }

    /// f_{(s,k)} + 2 Σ_{(s',k') > (s,k)} (se_{N−s,n−r}, se_{N−s'}) ϖ_{(s',k')}
    /// equals the image of ne_{s,k} for every r = s..n.
    pub fn check_sum_ne(&self) -> Result<usize, String> {
        let t = &self.triangle;
        let (big_n, n) = (t.big_n(), t.n());
        let mut checked = 0;
        for (p, i) in self.order.iter().enumerate() {
            if i.is_i0() {
                continue;
            }
            for r in i.s..=n {
                let mut v = self.f(*i);
                for j in &self.order[p + 1..] {
                    if j.is_i0() {
                        continue;
                    }
                    let c = qi(2) * t.se(big_n - i.s, n - r).pair(&t.se_full(big_n - j.s));
                    v += &self.varpi(*j).scale(c);
                }
                if v != self.ne_rows[i] {
                    return Err(format!("sum identity fails at (s,k)=({},{}), r={r}", i.s, i.k));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    /// Σ_{k ≤ s} ϖ_{(s,k)} equals the image of ϖ̂_s.
    pub fn check_sum_weights(&self) -> Result<(), String> {
        for s in 1..=self.triangle.n() {
            let mut v = self.space.zero();
            for k in 0..=s {
                v += &self.varpi(IIndex { s, k });
            }
            if v != self.weight_rows[s - 1] {
                return Err(format!("weight sum fails at s={s}"));
            }
        }
        Ok(())
    }
}

pub fn embed_into_vn(big_n: usize) -> Result<EmbeddingVN, TriangleError> {
    EmbeddingVN::new(big_n)
}

/// Vector whose coefficients are polynomials in the formal symbol
/// t = 1 + |ℏ|⁻¹; `coeffs[d]` is the coefficient of t^d.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVector {
    pub space: Space,
    pub coeffs: Vec<SkewVector>,
}

impl PolyVector {
    pub fn zero(space: &Space) -> Self {
        PolyVector { space: Arc::clone(space), coeffs: Vec::new() }
    }

    /// t^deg · v.
    pub fn monomial(v: &SkewVector, deg: usize) -> Self {
        let mut coeffs = vec![v.space().zero(); deg + 1];
        coeffs[deg] = v.clone();
        PolyVector { space: Arc::clone(v.space()), coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn add(&self, other: &PolyVector) -> PolyVector {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|d| {
                let mut c = self.coeffs.get(d).cloned().unwrap_or_else(|| self.space.zero());
                if let Some(o) = other.coeffs.get(d) {
                    c += o;
                }
                c
            })
            .collect();
        PolyVector { space: Arc::clone(&self.space), coeffs }.trimmed()
    }

    pub fn scale(&self, c: Q) -> PolyVector {
        PolyVector { space: Arc::clone(&self.space), coeffs: self.coeffs.iter().map(|v| v.scale(c)).collect() }.trimmed()
    }

    pub fn sub(&self, other: &PolyVector) -> PolyVector {
        self.add(&other.scale(-Q::one()))
    }

    /// Applies a linear map coefficientwise.
    pub fn map(&self, f: impl Fn(&SkewVector) -> SkewVector) -> PolyVector {
        PolyVector { space: Arc::clone(&self.space), coeffs: self.coeffs.iter().map(f).collect() }.trimmed()
    }

    /// Pairing as a polynomial in t (coefficient list).
    pub fn pair(&self, other: &PolyVector) -> Vec<Q> {
        let len = (self.coeffs.len() + other.coeffs.len()).saturating_sub(1);
        let mut out = vec![Q::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a.pair(b);
            }
        }
        while out.last().is_some_and(|x| x.is_zero()) {
            out.pop();
        }
        out
    }

    /// Evaluates at a numeric t.
    pub fn eval(&self, t: f64) -> Vec<(usize, f64)> {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (d, v) in self.coeffs.iter().enumerate() {
            for (i, x) in v.terms() {
                *acc.entry(i).or_default() += t.powi(d as i32) * (*x.numer() as f64 / *x.denom() as f64);
            }
        }
        acc.into_iter().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// 2d_l and 2d_r with each computed in both closed forms.
#[derive(Clone, Debug)]
pub struct WeightExponents {
    pub two_d_l: PolyVector,
    pub two_d_r: PolyVector,
    /// The ne/sw-sum forms, kept so callers can compare.
    pub two_d_l_alt: PolyVector,
    pub two_d_r_alt: PolyVector,
}

/// 2d_l = t Σ_{neC} ac e_{abc} = t Σ (N−s) ne_{s,k}; 2d_r = −t Σ ab e_{abc}
/// = −t Σ (N−s) sw_{s,k}, sums over 1 ≤ s ≤ n, 0 ≤ k < s.
pub fn weight_exponents(t: &Triangle) -> WeightExponents {
    let sp = t.space();
    let mut dl = sp.zero();
    let mut dr = sp.zero();
    for (a, b, c) in t.ne_cone() {
        dl += &t.e(a, b, c).scale(qi((a * c) as i64));
        dr -= &t.e(a, b, c).scale(qi((a * b) as i64));
    }
    let mut dl2 = sp.zero();
    let mut dr2 = sp.zero();
    for s in 1..=t.n() {
        for k in 0..s {
            let w = qi((t.big_n() - s) as i64);
            dl2 += &t.ne(s, k).scale(w);
            dr2 -= &t.sw(s, k).scale(w);
        }
    }
    WeightExponents {
        two_d_l: PolyVector::monomial(&dl, 1),
        two_d_r: PolyVector::monomial(&dr, 1),
        two_d_l_alt: PolyVector::monomial(&dl2, 1),
        two_d_r_alt: PolyVector::monomial(&dr2, 1),
    }
}

/// Checks (2d_l, z) = −2t Σ_i (ϖ̌_i, z) for every basis z of B⁺.
pub fn check_dl_characterization(t: &Triangle) -> Result<(), String> {
    let w = weight_exponents(t);
    let chk = t.fundamental_weights(Side::Se);
    let total = skewspace::sum(t.space(), chk.iter());
    for z in t.b_plus() {
        let lhs = w.two_d_l.pair(&PolyVector::monomial(&z, 0));
        let rhs = PolyVector::monomial(&total.scale(qi(-2)), 1).pair(&PolyVector::monomial(&z, 0));
        if lhs != rhs {
            return Err(format!("(2d_l, {z}) = {lhs:?}, expected {rhs:?}"));
        }
    }
    Ok(())
}

impl From<TriangleError> for String {
    fn from(e: TriangleError) -> String {
        e.to_string()
    }
}

pub fn is_nonzero(x: &BigRational) -> bool {
    linalg::is_nonzero(x)
}
