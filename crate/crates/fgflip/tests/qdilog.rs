use std::f64::consts::PI;

use fgflip::qdilog::*;
use num::complex::Complex64;

const THETAS: [f64; 5] = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0];

#[test]
fn value_at_zero() {
    for th in THETAS {
        let p = QdParams::new(th).unwrap();
        let w = w_real(&p, 0.0).unwrap();
        let expected = PI * PI * (th + 1.0 / th) / 12.0;
        assert!((w.value - expected).abs() < 1e-10, "θ={th}: {}", w.value);
        assert!((w.log_form - expected).abs() < 1e-10, "θ={th}: {}", w.log_form);
        let v0 = v(&p, Complex64::new(0.0, 0.0)).unwrap();
        assert!((v0 - Complex64::from_polar(1.0, -p.chi())).norm() < 1e-10);
    }
}

#[test]
fn dual_formulas_agree_on_grid() {
    for th in [1.0 / 3.0, 1.0, 2.0] {
        let p = QdParams::new(th).unwrap();
        for k in -20..=20 {
            let t = k as f64 * 0.5;
            let w = w_real(&p, t).unwrap();
            assert!(w.discrepancy < 1e-9, "θ={th} t={t}: {w:?}");
        }
    }
}

#[test]
fn w_vanishes_on_the_left() {
    // W_θ(t) ~ e^{min(1,θ) t}: at t = −30 it is below 10⁻⁶ once θ ≥ 1/2.
    for th in [0.5, 1.0, 2.0, 3.0] {
        let p = QdParams::new(th).unwrap();
        assert!(w_real(&p, -30.0).unwrap().value.abs() < 1e-6, "θ={th}");
    }
    let p = QdParams::new(1.0 / 3.0).unwrap();
    let w = w_real(&p, -30.0).unwrap().value;
    // For θ = 1/3 the decay rate is 1/3: W(−30) ≈ C e^{−10}.
    assert!(w > 1e-6 && w < 1e-3, "{w}");
    assert!(w_real(&p, -90.0).unwrap().value.abs() < 1e-6);
}

#[test]
fn quantum_exponential_at_zero() {
    for hbar in [1.0, 0.5, 1.0 / 3.0] {
        assert!(f_deviation_at(hbar, 1e-8).unwrap() < 1e-6, "ℏ={hbar}");
    }
    // ℏ > 1 means θ < 1 and the approach to 1 is like r^θ.
    for hbar in [2.0, 3.0] {
        let d8 = f_deviation_at(hbar, 1e-8).unwrap();
        let d16 = f_deviation_at(hbar, 1e-16).unwrap();
        let rate = (d8 / d16).log10() / 8.0;
        assert!((rate - 1.0 / hbar).abs() < 0.05, "ℏ={hbar}: rate {rate}");
        assert!(f_deviation_at(hbar, 10f64.powf(-8.0 * hbar)).unwrap() < 1e-6);
    }
    assert_eq!(quantum_exp(2.0, 0.0).unwrap(), Complex64::new(1.0, 0.0));
    assert!(quantum_exp(2.0, -1.0).is_err());
}

#[test]
fn phi_unimodular_and_sign_of_hbar() {
    for t in [-5.0, -1.0, 0.0, 0.7, 4.0] {
        let a = phi(0.5, t).unwrap();
        let b = phi(-0.5, t).unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert!((a * b - 1.0).norm() < 1e-12);
    }
    assert!(phi(0.0, 1.0).is_err());
}

#[test]
fn strip_is_enforced() {
    let p = QdParams::new(2.0).unwrap();
    let h = p.strip_half_width();
    assert!(matches!(w_complex(&p, Complex64::new(0.0, h)), Err(QdError::Strip { .. })));
    assert!(QdParams::new(-1.0).is_err());
}

#[test]
fn contour_independent_of_bump_radius() {
    for th in [0.5, 2.0] {
        for z in [Complex64::new(0.3, 0.0), Complex64::new(-1.0, 1.2)] {
            assert!(delta_sensitivity(th, z).unwrap() < 1e-9);
        }
    }
}

#[test]
fn functional_equation_battery() {
    for th in THETAS {
        let r = check_functional_equations(th, Suite::All).unwrap();
        let fails: Vec<_> = r.residuals.iter().filter(|x| !x.passed()).collect();
        assert!(fails.is_empty(), "θ={th}: {fails:?}");
        for id in [DUAL_FORMULA, UNIMODULAR, COMPLEX_CONJ, MOD_DUALITY, VALUE_SHIFT, FUNCT_EQ1, FUNCT_EQ2, ESTIMATE] {
            assert!(r.residuals.iter().any(|x| x.identity == id), "θ={th}: {id} missing");
        }
    }
}

#[test]
fn csv_has_a_row_per_residual() {
    let r = check_functional_equations(2.0, Suite::Quick).unwrap();
    assert_eq!(r.to_csv().lines().count(), r.residuals.len() + 1);
}
