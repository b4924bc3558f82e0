//! Numerical quantum dilogarithm.
//!
//! `W_θ` is evaluated in three independent ways:
//!
//! * the hyperbolic-gamma form
//!   `W_θ(t) = π²(θ+θ⁻¹)/12 + θt²/4 − 2π W̃(t)` with the real integral
//!   `W̃(t) = ∫₀^∞ dy/y (sin 2yt / (2 sinh 2πy sinh(2πy/θ)) − θt/(4π²y))`;
//! * the logarithmic form `W_θ(t) = ∫₀^∞ ln(1+s^{−θ})/(s+e^{−t}) ds`,
//!   integrated in `u = ln s`;
//! * the contour integral
//!   `W_θ(z) = −(πi/2) ∫_Ω dy/y e^{−2iyz}/(sinh 2πy sinh(2πy/θ))` over
//!   `(−R,−δ] ∪ {|y| = δ, Im y ≥ 0} ∪ [δ,R)`, valid in the strip
//!   `|Im z| < π(1+θ⁻¹)`.
//!
//! From `W` we get `V_θ(z) = exp(W_θ(z)/2πi)`, `φ_ℏ(z) = exp(i sgn(ℏ) W_{1/|ℏ|}(z)/2π)`
//! and `F_ℏ(r) = conj φ_ℏ(ln r)`.
//!
//! All integrals use adaptive Gauss–Kronrod (7/15) panels.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num::complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QdError {
    #[error("θ must be finite and positive, got {0}")]
    Theta(f64),
    #[error("ℏ must be finite and nonzero, got {0}")]
    Hbar(f64),
    #[error("point {re}{im:+}i lies outside the strip |Im z| < {bound}")]
    Strip { re: f64, im: f64, bound: f64 },
    #[error("quadrature did not reach tolerance {tol:e} (estimate {err:e}) after {evals} evaluations")]
    NoConvergence { tol: f64, err: f64, evals: usize },
    #[error("argument must be positive, got {0}")]
    Domain(f64),
}

type Result<T> = std::result::Result<T, QdError>;

// ---------------------------------------------------------------------------
// Quadrature

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    val: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Adaptive integral of `f` over consecutive `breaks`; bisects the panel
/// with the largest error estimate until the total is below `tol`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, breaks: &[f64], tol: f64) -> Result<Complex64> {
    const MAX_PANELS: usize = 20_000;
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (val, err) = gk15(&f, w[0], w[1]);
            heap.push(Panel { a: w[0], b: w[1], val, err });
        }
    }
    let mut panels = heap.len();
    loop {
        let err: f64 = heap.iter().map(|p| p.err).sum();
        // Below this floor the estimate is rounding noise.
        let floor = 64.0 * f64::EPSILON * heap.iter().map(|p| p.val.norm()).sum::<f64>();
        if err <= tol.max(floor) {
            break;
        }
        if panels >= MAX_PANELS {
            return Err(QdError::NoConvergence { tol, err, evals: panels * 15 });
        }
        let p = heap.pop().unwrap();
        let m = 0.5 * (p.a + p.b);
        for (a, b) in [(p.a, m), (m, p.b)] {
            let (val, err) = gk15(&f, a, b);
            heap.push(Panel { a, b, val, err });
        }
        panels += 1;
    }
    Ok(heap.iter().map(|p| p.val).sum())
}

// ---------------------------------------------------------------------------
// Parameters

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QdParams {
    pub theta: f64,
    /// Absolute tolerance handed to every quadrature.
    pub tol: f64,
    /// Radius of the bump around the origin; default `min(π, πθ)/8`.
    pub delta: Option<f64>,
    /// Cutoff of the contour; default from the exponential tail bound.
    pub cutoff: Option<f64>,
}

impl QdParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(QdError::Theta(theta));
        }
        Ok(QdParams { theta, tol: 1e-12, delta: None, cutoff: None })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn strip_half_width(&self) -> f64 {
        PI * (1.0 + 1.0 / self.theta)
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(PI * self.theta.min(1.0) / 8.0)
    }

    /// `χ = π(θ+θ⁻¹)/24`.
    pub fn chi(&self) -> f64 {
        PI * (self.theta + 1.0 / self.theta) / 24.0
    }

    fn cutoff(&self, im: f64) -> f64 {
        let rate = 2.0 * (self.strip_half_width() - im.abs());
        self.cutoff.unwrap_or(((1.0 / self.tol).ln() + 10.0) / rate).min(500.0)
    }
}

// ---------------------------------------------------------------------------
// W, V, φ, F

/// Both real formulas for `W_θ(t)` and their discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WReal {
    /// Hyperbolic-gamma form.
    pub value: f64,
    /// Logarithmic form.
    pub log_form: f64,
    pub discrepancy: f64,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `ln(1 + eˣ)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `sinh(x)/x − 1`.
fn sinhc_m1(x: f64) -> f64 {
    let u = x * x;
    if u < 0.25 {
        u / 6.0 * (1.0 + u / 20.0 * (1.0 + u / 42.0 * (1.0 + u / 72.0 * (1.0 + u / 110.0))))
    } else {
        x.sinh() / x - 1.0
    }
}

/// `sin(x)/x − 1`.
fn sinc_m1(x: f64) -> f64 {
    let u = x * x;
    if u < 0.25 {
        -u / 6.0 * (1.0 - u / 20.0 * (1.0 - u / 42.0 * (1.0 - u / 72.0 * (1.0 - u / 110.0))))
    } else {
        x.sin() / x - 1.0
    }
}

/// `W̃(t)` for `a₊ = 2π`, `a₋ = 2π/θ`.
pub fn w_tilde(p: &QdParams, t: f64) -> Result<f64> {
    let (a, b) = (2.0 * PI, 2.0 * PI / p.theta);
    let c = t / (a * b);
    // Beyond y_max the hyperbolic part is below e^{−45}.
    let ymax = 45.0 / (a + b);
    // sin(2yt)/(2y sinh(ay) sinh(by)) − c/y² = (c/y²)(sinc(2yt) − P)/P with
    // P = shc(ay)·shc(by); the differences are formed without cancellation.
    let f = |y: f64| {
        let (ea, eb) = (sinhc_m1(a * y), sinhc_m1(b * y));
        let pm1 = ea + eb + ea * eb;
        real(c / (y * y) * (sinc_m1(2.0 * y * t) - pm1) / (1.0 + pm1))
    };
    let mut breaks = vec![0.0];
    // Resolve the oscillation of sin(2yt).
    let pieces = ((ymax * t.abs()) / PI).ceil().max(1.0) as usize;
    breaks.extend((1..=pieces).map(|k| ymax * k as f64 / pieces as f64));
    let head = integrate(f, &breaks, p.tol)?.re;
    Ok(head - c / ymax)
}

fn w_alt(p: &QdParams, t: f64) -> Result<f64> {
    let th = p.theta;
    Ok(PI * PI * (th + 1.0 / th) / 12.0 + th * t * t / 4.0 - 2.0 * PI * w_tilde(p, t)?)
}

/// `∫ ln(1+s^{−θ})/(s+e^{−t}) ds` in the variable `u = ln s`.
pub fn w_log_form(p: &QdParams, t: f64) -> Result<f64> {
    let th = p.theta;
    let f = |u: f64| real(softplus(-th * u) * sigmoid(u + t));
    let lo = 0f64.min(-t) - 60.0;
    let hi = 0f64.max(-t) + 45.0 / th.min(1.0) + 10.0;
    let mut breaks = vec![lo, 0f64.min(-t), 0f64.max(-t), hi];
    breaks.dedup();
    Ok(integrate(f, &breaks, p.tol)?.re)
}

pub fn w_real(p: &QdParams, t: f64) -> Result<WReal> {
    let value = w_alt(p, t)?;
    let log_form = w_log_form(p, t)?;
    Ok(WReal { value, log_form, discrepancy: (value - log_form).abs() })
}

/// `W_θ(z)` in the strip, by the contour integral.
pub fn w_complex(p: &QdParams, z: Complex64) -> Result<Complex64> {
    let bound = p.strip_half_width();
    if z.im.abs() >= bound {
        return Err(QdError::Strip { re: z.re, im: z.im, bound });
    }
    let (a, b) = (2.0 * PI, 2.0 * PI / p.theta);
    let den = |y: Complex64| y * (y * a).sinh() * (y * b).sinh();
    let delta = p.delta();
    let r = p.cutoff(z.im).max(2.0 * delta);
    let i = Complex64::i();
    // The two real half-lines combined: (e^{−2iyz} − e^{2iyz})/(y s(y)).
    let line = |y: f64| {
        let yc = real(y);
        -2.0 * i * (yc * z * 2.0).sin() / den(yc)
    };
    let pieces = ((r * z.re.abs()) / PI).ceil().max(1.0) as usize;
    let mut breaks = vec![delta];
    breaks.extend((1..=pieces).map(|k| delta + (r - delta) * k as f64 / pieces as f64));
    let straight = integrate(line, &breaks, p.tol)?;
    // Upper semicircle from −δ to δ.
    let arc = |phi: f64| {
        let y = Complex64::from_polar(delta, phi);
        -(i * y) * (-2.0 * i * y * z).exp() / den(y)
    };
    let semi = integrate(arc, &[0.0, PI / 2.0, PI], p.tol)?;
    Ok(-0.5 * PI * i * (straight + semi))
}

/// `V_θ(z) = exp(W_θ(z)/2πi)`.
pub fn v(p: &QdParams, z: Complex64) -> Result<Complex64> {
    Ok((w_complex(p, z)? / (2.0 * PI * Complex64::i())).exp())
}

fn hbar_params(hbar: f64, tol: f64) -> Result<QdParams> {
    if !(hbar.is_finite() && hbar != 0.0) {
        return Err(QdError::Hbar(hbar));
    }
    Ok(QdParams::new(1.0 / hbar.abs())?.with_tol(tol))
}

/// `φ_ℏ(t)` on the real line.
pub fn phi(hbar: f64, t: f64) -> Result<Complex64> {
    let p = hbar_params(hbar, 1e-12)?;
    let w = hbar.signum() * w_alt(&p, t)?;
    Ok(Complex64::from_polar(1.0, w / (2.0 * PI)))
}

/// `φ_ℏ(z)` in the strip `|Im z| < π(1+|ℏ|)`.
pub fn phi_complex(hbar: f64, z: Complex64) -> Result<Complex64> {
    let p = hbar_params(hbar, 1e-12)?;
    let w = w_complex(&p, z)? * hbar.signum();
    Ok((Complex64::i() * w / (2.0 * PI)).exp())
}

/// `F_ℏ(r) = conj φ_ℏ(ln r)`, extended by `F(0) = 1`.
pub fn quantum_exp(hbar: f64, r: f64) -> Result<Complex64> {
    if r < 0.0 || r.is_nan() {
        return Err(QdError::Domain(r));
    }
    if r == 0.0 {
        hbar_params(hbar, 1e-12)?;
        return Ok(real(1.0));
    }
    Ok(phi(hbar, r.ln())?.conj())
}

// ---------------------------------------------------------------------------
// Functional equations

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    pub identity: String,
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub tolerance: f64,
}

impl Residual {
    pub fn passed(&self) -> bool {
        self.residual < self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub theta: f64,
    pub params: QdParams,
    pub residuals: Vec<Residual>,
}

impl FunctionalReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(Residual::passed)
    }

    /// Largest residual of one identity (all identities when `None`).
    pub fn max_residual(&self, identity: Option<&str>) -> f64 {
        self.residuals
            .iter()
            .filter(|r| identity.is_none_or(|id| r.identity == id))
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }

    pub fn identities(&self) -> Vec<String> {
        let mut ids: Vec<String> = Vec::new();
        for r in &self.residuals {
            if !ids.contains(&r.identity) {
                ids.push(r.identity.clone());
            }
        }
        ids
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,identity,re,im,residual,tolerance,passed\n");
        for r in &self.residuals {
            s.push_str(&format!(
                "{},{},{},{},{:e},{:e},{}\n",
                self.theta,
                r.identity,
                r.re,
                r.im,
                r.residual,
                r.tolerance,
                r.passed()
            ));
        }
        s
    }
}

/// Which identities to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// The real-line and strip identities on a reduced grid.
    Quick,
    All,
}

pub const DUAL_FORMULA: &str = "dual-formula";
pub const UNIMODULAR: &str = "unimodular";
pub const REAL_AXIS: &str = "real-on-axis";
pub const CONTOUR_VS_REAL: &str = "contour-vs-real";
pub const W_AT_ZERO: &str = "W(0)";
pub const V_AT_ZERO: &str = "V(0)";
pub const COMPLEX_CONJ: &str = "complex-conjugation";
pub const MOD_DUALITY: &str = "modular-duality";
pub const VALUE_SHIFT: &str = "value-shift";
pub const F_AT_ZERO: &str = "F-at-zero";
pub const W_TAIL: &str = "W-tail";
pub const FUNCT_EQ1: &str = "shift-2πi";
pub const FUNCT_EQ2: &str = "shift-2πi/θ";
pub const ESTIMATE: &str = "left-asymptotics";

/// Points where `|F_ℏ(r) − 1|` and `|W_θ(t)|` are probed. Both decay like
/// `e^{min(1,θ)t}`, so the probe moves left as θ drops below 1.
pub fn tail_probe(theta: f64, t: f64) -> f64 {
    t / theta.min(1.0)
}

pub fn check_functional_equations(theta: f64, suite: Suite) -> Result<FunctionalReport> {
    let p = QdParams::new(theta)?;
    let hbar = 1.0 / theta;
    let mut out = Vec::new();
    let mut push = |id: &str, z: Complex64, residual: f64, tolerance: f64| {
        out.push(Residual { identity: id.into(), re: z.re, im: z.im, residual, tolerance })
    };
    let grid: Vec<f64> = match suite {
        Suite::All => (-20..=20).map(|k| k as f64 * 0.5).collect(),
        Suite::Quick => (-4..=4).map(|k| k as f64 * 2.5).collect(),
    };
    let i = Complex64::i();
    let chi = p.chi();

    for &t in &grid {
        let w = w_real(&p, t)?;
        push(DUAL_FORMULA, real(t), w.discrepancy, 1e-9);
        let ph = phi(hbar, t)?;
        push(UNIMODULAR, real(t), (ph.norm() - 1.0).abs(), 1e-8);
        let wc = w_complex(&p, real(t))?;
        push(REAL_AXIS, real(t), wc.im.abs(), 1e-10);
        push(CONTOUR_VS_REAL, real(t), (wc.re - w.value).abs(), 1e-8);
    }
    let w0 = w_real(&p, 0.0)?.value;
    push(W_AT_ZERO, real(0.0), (w0 - PI * PI * (theta + 1.0 / theta) / 12.0).abs(), 1e-9);
    let v0 = v(&p, real(0.0))?;
    push(V_AT_ZERO, real(0.0), (v0 - Complex64::from_polar(1.0, -chi)).norm(), 1e-8);

    // V(z)V(−z) e^{2iχ} e^{iθz²/4π} = 1 and V(z)/conj V(−z̄) = the same.
    let h = p.strip_half_width();
    let conj_pts = [
        real(0.0),
        real(1.0),
        real(-1.0),
        real(2.5),
        real(-2.5),
        Complex64::new(1.0, 0.3 * h),
        Complex64::new(-0.7, -0.5 * h),
    ];
    for z in conj_pts {
        let rhs = (-2.0 * i * chi - i * theta * z * z / (4.0 * PI)).exp();
        let (vz, vm) = (v(&p, z)?, v(&p, -z)?);
        push(COMPLEX_CONJ, z, (vz * vm / rhs - 1.0).norm(), 1e-8);
        let vc = v(&p, -z.conj())?.conj();
        push(COMPLEX_CONJ, z, (vz / vc / rhs - 1.0).norm(), 1e-8);
    }

    let dual = QdParams::new(1.0 / theta)?;
    for &x in grid.iter().step_by(2) {
        let a = v(&dual, real(x))?;
        let b = v(&p, real(x / theta))?;
        push(MOD_DUALITY, real(x), (a - b).norm(), 1e-8);
        // φ_{1/ℏ}(z/ℏ) = φ_ℏ(z)
        let a = phi(1.0 / hbar, x / hbar)?;
        let b = phi(hbar, x)?;
        push(MOD_DUALITY, real(x), (a - b).norm(), 1e-8);
    }

    for x in [-2.0, 0.0, 2.0] {
        let z = Complex64::new(x, PI * hbar);
        let lhs = phi_complex(hbar, z)?.norm();
        push(VALUE_SHIFT, z, (lhs - (1.0 + f64::exp(x)).powf(-0.5)).abs(), 1e-6);
    }

    let r0 = 10f64.powf(tail_probe(theta, -8.0));
    push(F_AT_ZERO, real(r0), (quantum_exp(hbar, r0)? - 1.0).norm(), 1e-6);
    let t0 = tail_probe(theta, -30.0);
    push(W_TAIL, real(t0), w_real(&p, t0)?.value.abs(), 1e-6);

    if suite == Suite::All {
        // Both sides in the strip: Im z = −π (shift 2πi), Im z = −π/θ (shift 2πi/θ).
        for &x in &[-3.0, -1.0, 0.0, 0.5, 2.0] {
            let z = Complex64::new(x, -PI);
            let lhs = v(&p, z + 2.0 * PI * i)?;
            let rhs = (1.0 + (i * PI * theta).exp() * (theta * z).exp()) * v(&p, z)?;
            push(FUNCT_EQ1, z, (lhs - rhs).norm(), 1e-6);
            let z = Complex64::new(x, -PI / theta);
            let lhs = v(&p, z + 2.0 * PI * i / theta)?;
            let rhs = (1.0 + (i * PI / theta).exp() * z.exp()) * v(&p, z)?;
            push(FUNCT_EQ2, z, (lhs - rhs).norm(), 1e-6);
        }
        // |V(x) − 1| e^{−ρx} stays bounded for x ≤ −10, ρ = 0.9 min(1,θ).
        let rho = 0.9 * theta.min(1.0);
        let ratio = |x: f64| -> Result<f64> { Ok((v(&p, real(x))? - 1.0).norm() * (-rho * x).exp()) };
        let c = ratio(-10.0)?;
        for x in [-15.0, -20.0, -25.0] {
            let excess = (ratio(x)? - 2.0 * c).max(0.0);
            push(ESTIMATE, real(x), excess, 1e-12);
        }
    }
    Ok(FunctionalReport { theta, params: p, residuals: out })
}

/// `|F_ℏ(r) − 1|` at `r = 10⁻⁸` exactly, without moving the probe.
pub fn f_deviation_at(hbar: f64, r: f64) -> Result<f64> {
    Ok((quantum_exp(hbar, r)? - 1.0).norm())
}

/// Spread of the contour value of `W_θ(z)` over bump radii
/// `δ·{1/2, 3/4, 1, 5/4}`; the result should not depend on δ.
pub fn delta_sensitivity(theta: f64, z: Complex64) -> Result<f64> {
    let p = QdParams::new(theta)?;
    let d = p.delta();
    let vals = [0.5, 0.75, 1.0, 1.25]
        .iter()
        .map(|k| w_complex(&p.with_delta(d * k), z))
        .collect::<Result<Vec<_>>>()?;
    Ok(vals.iter().map(|x| (x - vals[2]).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_exact() {
        let v = integrate(|x| real(x.powi(5) - 3.0 * x * x), &[0.0, 2.0], 1e-14).unwrap();
        assert!((v.re - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn softplus_stable() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-1000.0) >= 0.0);
    }
}
