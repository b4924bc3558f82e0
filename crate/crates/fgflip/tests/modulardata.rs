use fgflip::modulardata::*;
use fgflip::skewspace::{q, qi};
use fgflip::triangle::Triangle;
use std::f64::consts::PI;

const HBARS: [f64; 6] = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0, -0.5];

#[test]
fn tetrahedral_numbers() {
    // brute-force count of lattice points a+b+c = s, s < n
    for n in 1..=20u64 {
        let count: u64 = (0..n).map(|s| (s + 1) * (s + 2) / 2).sum();
        assert_eq!(tetrahedral(n), count, "n = {n}");
        assert_eq!(tau_by_sum(n + 1), count, "N = {}", n + 1);
    }
    assert_eq!(tetrahedral(3), 10);
}

#[test]
fn beta_and_nu_small_cases() {
    assert!((beta(1.0) - 4.0).abs() < 1e-15);
    assert!((scaling_constant(2, 1.0) - (-8.0 * PI).exp()).abs() < 1e-25);
    assert!((beta(2.0) - 4.5).abs() < 1e-14);
    assert!((beta(-2.0) + 4.5).abs() < 1e-14);
    for h in HBARS {
        let prod = scaling_constant(4, h) * scaling_constant(4, -h);
        assert!((prod - 1.0).abs() < 1e-12, "ℏ = {h}");
    }
}

#[test]
fn every_report_passes() {
    for n in 2..=5 {
        for h in HBARS {
            let r = modular_report(n, h).unwrap();
            assert!(r.passed(), "N = {n}, ℏ = {h}\n{}", r.checks);
        }
    }
}

#[test]
fn pairing_identity_against_tau() {
    for n in 2..=5usize {
        for h in HBARS {
            let r = modular_report(n, h).unwrap();
            let c = 1.0 + 1.0 / h.abs();
            let p = r.two_dl.pair(&r.delta_exp);
            let p = *p.numer() as f64 / *p.denom() as f64;
            let lhs = (h * c * c * p).abs();
            let tau = tetrahedral(n as u64 - 1) as f64;
            assert!((lhs - beta(h).abs() * tau).abs() < 1e-9 * lhs.max(1.0), "N = {n}, ℏ = {h}: {lhs}");
        }
    }
}

#[test]
fn n2_example() {
    let t = Triangle::new(2).unwrap();
    let r = modular_report(2, 1.0).unwrap();
    assert_eq!(r.two_dl, t.e(1, 0, 1));
    assert_eq!(r.two_dr, -t.e(1, 1, 0));
    assert_eq!(r.delta_exp, -(&t.e(1, 0, 1) + &t.e(1, 1, 0)));
    assert_eq!(&r.two_dr - &r.two_dl, r.delta_exp);
    assert_eq!(r.tau, 1);
    let rho = BorelMap::antipode(&t);
    assert_eq!(rho.apply(&t.e(1, 0, 1)).unwrap(), -t.e(1, 1, 0));
    assert_eq!(rho.apply(&t.e(1, 1, 0)).unwrap(), -t.e(1, 0, 1));
    // e011 is not in B⁻
    assert!(rho.apply(&t.e(0, 1, 1)).is_none());
}

#[test]
fn solved_dl_matches_closed_form() {
    for n in 2..=6 {
        let t = Triangle::new(n).unwrap();
        let closed = (1..n).flat_map(|s| (0..s).map(move |k| (s, k))).fold(t.space().zero(), |acc, (s, k)| {
            &acc + &t.ne(s, k).scale(qi((n - s) as i64))
        });
        assert_eq!(solve_two_dl(&t), closed, "N = {n}");
    }
}

#[test]
fn antipode_is_an_involution() {
    for n in 2..=5 {
        let t = Triangle::new(n).unwrap();
        let rho = BorelMap::antipode(&t);
        for v in t.b_minus() {
            let w = rho.apply(&v).unwrap();
            assert_eq!(rho.apply(&w).unwrap(), v);
            assert_eq!(w.pair(&w), q(0, 1));
        }
    }
}

#[test]
fn bad_hbar_rejected() {
    assert!(matches!(modular_report(3, 0.0), Err(ModularError::Hbar(_))));
    assert!(matches!(modular_report(3, f64::NAN), Err(ModularError::Hbar(_))));
    assert!(modular_report(1, 1.0).is_err());
}

#[test]
fn json_is_stable() {
    let a = modular_report(3, 0.5).unwrap().to_json().to_string();
    let b = modular_report(3, 0.5).unwrap().to_json().to_string();
    assert_eq!(a, b);
    assert!(a.contains("\"schema\":\"fgflip/1\""));
}
