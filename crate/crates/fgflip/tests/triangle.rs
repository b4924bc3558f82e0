use fgflip::skewspace::{half, q, qi, radical, radical_decomposition, SkewSpace};
use fgflip::triangle::*;
use fgflip::BasisLabel;

#[test]
fn q_comm_examples() {
    let t2 = Triangle::new(2).unwrap();
    assert_eq!(t2.e(1, 0, 1).pair(&t2.e(1, 1, 0)), qi(1));
    assert_eq!(t2.e(1, 1, 0).pair(&t2.e(1, 1, 0)), qi(0));
    assert_eq!(t2.e(2, 0, 0).pair(&t2.e(1, 0, 1)), half());
    assert_eq!(t2.e(1, 1, 0).pair(&t2.e(0, 1, 1)), qi(1));
    // e_{011} -> e_{020} is a dashed arrow (shared index a = 0), so the
    // pairing in this direction is -1/2.
    assert_eq!(t2.e(0, 1, 1).pair(&t2.e(0, 2, 0)), half());
    assert_eq!(t2.e(0, 2, 0).pair(&t2.e(0, 1, 1)), -half());
}

#[test]
fn antisymmetric_for_all_n() {
    for n in 2..=6 {
        let t = Triangle::new(n).unwrap();
        let m = t.space().matrix();
        for i in 0..m.len() {
            for j in 0..m.len() {
                assert_eq!(m[i][j], -m[j][i]);
            }
        }
    }
}

#[test]
fn gfr_examples() {
    let t = Triangle::new(5).unwrap();
    assert_eq!(t.gfr_to((3, 0, 2), (3, 1, 1)).unwrap(), &t.e(3, 0, 2) + &t.e(3, 1, 1));
    assert_eq!(
        t.gfr_to((3, 2, 0), (1, 2, 2)).unwrap(),
        &(&t.e(3, 2, 0) + &t.e(2, 2, 1)) + &t.e(1, 2, 2)
    );
    assert_eq!(t.gfr((2, 2, 1), 0, Direction::AUpBDown).unwrap(), t.e(2, 2, 1));
}

#[test]
fn special_vector_examples() {
    let t = Triangle::new(2).unwrap();
    assert_eq!(t.ne(1, 0), t.e(1, 0, 1));
    assert_eq!(t.sw(1, 0), t.e(1, 1, 0));
    let sv = t.special_vectors();
    assert_eq!(sv["ne_{1,0}"], t.e(1, 0, 1));
    assert_eq!(sv["ne_1"], &t.e(1, 0, 1) + &t.e(1, 1, 0));
    for n in 2..=6 {
        Triangle::new(n).unwrap().check_shorthand_identities().unwrap();
    }
}

#[test]
fn radical_of_snubbed_n2_is_one_dimensional() {
    let t = Triangle::new(2).unwrap();
    let s = t.snubbed();
    assert_eq!(s.dim(), 3);
    assert_eq!(radical(&s).len(), 1);
}

#[test]
fn radical_complement_is_nondegenerate() {
    for n in 2..=5 {
        let t = Triangle::new(n).unwrap();
        for sp in [t.space().clone(), t.snubbed()] {
            let (rad, comp, det) = radical_decomposition(&sp);
            assert_eq!(rad.len() + comp.len(), sp.dim());
            assert!(is_nonzero(&det));
        }
    }
}

#[test]
fn pairing_tables_n2_to_6() {
    for n in 2..=6 {
        let r = verify_pairing_tables(n).unwrap();
        assert!(r.passed(), "{:?}", r.first_mismatch);
        assert!(r.checked > 0);
    }
    let t = Triangle::new(2).unwrap();
    assert_eq!(t.ne(1, 0).pair(&t.se(1, 0)), qi(1));
    for n in 2..=5 {
        let t = Triangle::new(n).unwrap();
        for s in 1..t.n() {
            assert_eq!(t.ne_full(s).pair(&t.ne(s, 0)), qi(-1));
        }
    }
}

#[test]
fn borel_determinants() {
    for n in 2..=6 {
        assert!(is_nonzero(&Triangle::new(n).unwrap().borel_nondegeneracy()), "N={n}");
    }
    // control: a space whose B-/B+ analogue contains a radical vector
    let s = SkewSpace::from_entries(
        vec![BasisLabel::named("x"), BasisLabel::named("y"), BasisLabel::named("z")],
        &[(0, 1, qi(1))],
    )
    .unwrap();
    let m = s.pairing_matrix(&[s.basis(0), s.basis(2)], &[s.basis(1), s.basis(2)]);
    assert!(!is_nonzero(&fgflip::linalg::determinant(&m)));
}

#[test]
fn fundamental_weights() {
    let t2 = Triangle::new(2).unwrap();
    assert_eq!(t2.fundamental_weights(Side::Ne)[0], t2.ne_full(1).scale(half()));
    for n in 2..=6 {
        check_fundamental_weight_pairings(&Triangle::new(n).unwrap()).unwrap();
    }
}

#[test]
fn heisenberg_cross_form() {
    for n in 2..=5 {
        let h = HeisenbergDouble::new(n).unwrap();
        let t = &h.triangle;
        let f = |a: usize, b: usize, c: usize| h.embed(&(-&t.e(c, b, a)), true);
        for (a, b, c) in t.wse_cone() {
            for (a2, b2, c2) in t.wse_cone() {
                let got = h.embed(&t.e(a, b, c), false).pair(&f(a2, b2, c2));
                let want = if c != 0 || c2 != 0 {
                    qi(0)
                } else {
                    match a.abs_diff(a2) {
                        0 => qi(1),
                        1 => -half(),
                        _ => qi(0),
                    }
                };
                assert_eq!(got, want, "N={n} e{a}{b}{c} f{a2}{b2}{c2}");
            }
        }
    }
}

#[test]
fn embedding_into_vn() {
    for n in 2..=6 {
        let e = embed_into_vn(n).unwrap();
        e.verify().unwrap();
        if n <= 5 {
            assert!(e.check_sum_ne().unwrap() > 0);
            e.check_sum_weights().unwrap();
        }
        for s in 1..n {
            let i0 = IIndex { s: n - s, k: n - s };
            assert_eq!(e.se_rows[s - 1], -e.f(i0));
        }
    }
}

#[test]
fn index_order_is_total() {
    use std::cmp::Ordering::*;
    for n in 1..=6 {
        let set = ordered_index_set(n);
        for x in &set {
            assert_eq!(i_order_cmp(x, x), Equal);
            for y in &set {
                assert_eq!(i_order_cmp(x, y), i_order_cmp(y, x).reverse());
                if x != y {
                    assert_ne!(i_order_cmp(x, y), Equal);
                }
                for z in &set {
                    if i_order_cmp(x, y) == Less && i_order_cmp(y, z) == Less {
                        assert_eq!(i_order_cmp(x, z), Less);
                    }
                }
            }
        }
    }
}

#[test]
fn weight_exponent_forms() {
    let t2 = Triangle::new(2).unwrap();
    let w = weight_exponents(&t2);
    assert_eq!(w.two_d_l.coeffs, vec![t2.space().zero(), t2.e(1, 0, 1)]);
    for n in 2..=6 {
        let t = Triangle::new(n).unwrap();
        let w = weight_exponents(&t);
        assert_eq!(w.two_d_l, w.two_d_l_alt);
        assert_eq!(w.two_d_r, w.two_d_r_alt);
        check_dl_characterization(&t).unwrap();
    }
    let _ = q(1, 2);
}
