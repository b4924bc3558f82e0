use fgflip::braidgraph::{standard_graph, Family, FormSum};
use fgflip::skewspace::{qi, BasisLabel, SkewSpace, SkewVector, Space, Q};
use fgflip::triangle::Triangle;
use fgflip::wordalgebra::*;
use num::{One, Zero};
use proptest::prelude::*;

/// Basis a, b, u with (u, a) = 1, (u, b) = −1, (a, b) = 0.
fn abu() -> (Space, SkewVector, SkewVector, SkewVector) {
    let labels = ["a", "b", "u"].iter().map(|s| BasisLabel::named(*s)).collect();
    let s = SkewSpace::from_entries(labels, &[(2, 0, qi(1)), (2, 1, qi(-1))]).unwrap();
    let (a, b, u) = (s.basis(0), s.basis(1), s.basis(2));
    (s, a, b, u)
}

fn d(v: &SkewVector) -> Letter {
    Letter::Dilog(v.clone())
}

#[test]
fn pentagon_rule_on_a_heisenberg_pair() {
    let (s, a, _, u) = abu();
    let w = OperatorWord::new(&s, vec![d(&u), d(&a)]).unwrap();
    let f = apply_pentagon(&w, 0, Direction::Forward).unwrap();
    assert_eq!(f.letters(), &[d(&a), d(&(&u + &a)), d(&u)]);
    let back = apply_pentagon(&f, 0, Direction::Backward).unwrap();
    assert_eq!(back, w);
}

#[test]
fn pentagon_rejects_wrong_pairing() {
    let (s, a, _, u) = abu();
    let w = OperatorWord::new(&s, vec![d(&a), d(&u)]).unwrap();
    match apply_pentagon(&w, 0, Direction::Forward) {
        Err(WordError::Pairing { expected, found, .. }) => {
            assert_eq!(expected, Q::one());
            assert_eq!(found, qi(-1));
        }
        other => panic!("expected a pairing error, got {other:?}"),
    }
    let w = OperatorWord::new(&s, vec![d(&u), d(&(&u + &a)), d(&a)]).unwrap();
    assert!(matches!(apply_pentagon(&w, 0, Direction::Backward), Err(WordError::Pairing { .. })));
    let w = OperatorWord::new(&s, vec![d(&a), d(&a), d(&u)]).unwrap();
    assert!(matches!(apply_pentagon(&w, 0, Direction::Backward), Err(WordError::Shape { .. })));
}

#[test]
fn swap_requires_commuting_letters() {
    let (s, a, b, u) = abu();
    let w = OperatorWord::new(&s, vec![d(&a), d(&b), d(&u)]).unwrap();
    assert_eq!(swap(&w, 0).unwrap().letters(), &[d(&b), d(&a), d(&u)]);
    assert!(matches!(swap(&w, 1), Err(WordError::Pairing { .. })));
}

#[test]
fn gaussian_validation_and_action() {
    let (_, a, b, u) = abu();
    assert!(matches!(Gaussian::new(vec![]), Err(WordError::Gaussian(_))));
    assert!(matches!(Gaussian::new(vec![(u.clone(), a.clone())]), Err(WordError::Gaussian(_))));
    let g = Gaussian::new(vec![(a.clone(), b.clone())]).unwrap();
    // Ad(u) = u + (b,u)a + (a,u)b = u + a − b
    assert_eq!(g.ad(&u), &(&u + &a) - &b);
    assert_eq!(g.ad_inv(&g.ad(&u)), u);
    assert!(g.fixes(&a) && !g.fixes(&u));
    let t = g.symmetric_tensor();
    assert_eq!(t.len(), 2);
    assert_eq!(t[&(0, 1)], Q::one());
}

#[test]
fn gauss_push_round_trip() {
    let (s, a, b, u) = abu();
    let g = Letter::Gauss(Gaussian::new(vec![(a.clone(), b.clone())]).unwrap());
    let w = OperatorWord::new(&s, vec![g.clone(), d(&u)]).unwrap();
    let r = gauss_push(&w, 0, Push::Right).unwrap();
    assert_eq!(r.letters()[1], g);
    assert_eq!(r.letters()[0], d(&(&(&u + &a) - &b)));
    assert_eq!(gauss_push(&r, 0, Push::Left).unwrap(), w);
}

#[test]
fn formsum_split_and_merge() {
    let (s, a, b, u) = abu();
    let sum = FormSum::new(&s, vec![a.clone()]);
    let split = conjugate_formsum_by_dilog(&sum, &u, Direction::Forward).unwrap();
    assert_eq!(split, FormSum::new(&s, vec![a.clone(), &a + &u]));
    assert_eq!(conjugate_formsum_by_dilog(&split, &u, Direction::Backward).unwrap(), sum);
    let pair = FormSum::new(&s, vec![b.clone(), &b + &u]);
    assert_eq!(conjugate_formsum_by_dilog(&pair, &u, Direction::Forward).unwrap(), FormSum::new(&s, vec![b.clone()]));
    let lonely = FormSum::new(&s, vec![b.clone()]);
    assert!(matches!(conjugate_formsum_by_dilog(&lonely, &u, Direction::Forward), Err(WordError::Unpartnered(_))));
    let far = FormSum::new(&s, vec![a.scale(qi(2))]);
    assert!(matches!(conjugate_formsum_by_dilog(&far, &u, Direction::Forward), Err(WordError::Ungrouped { .. })));
}

#[test]
fn mutation_conjugation_on_standard_graphs() {
    for n in 2..=5 {
        let r = verify_zmut_standard(n).unwrap();
        assert!(r.passed(), "{r}");
    }
    assert!(verify_zmut_standard(4).unwrap().checks.len() > 0);
}

#[test]
fn mutation_conjugation_along_random_walks() {
    let t = Triangle::new(4).unwrap();
    for (fam, seed) in [(Family::E, 1), (Family::F, 2), (Family::E, 3)] {
        let r = verify_zmut_walk(&standard_graph(&t, fam), 15, seed).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn braided_pentagon_derivation() {
    for n in 2..=5 {
        let tr = verify_braided_pentagon(n).unwrap();
        assert_eq!(tr.replay().unwrap(), *tr.current());
        let fa = FlipAlgebra::new(n).unwrap();
        let (l, r) = braided_pentagon_sides(&fa);
        assert_eq!(tr.initial(), &l);
        assert_eq!(tr.current(), &r);
        for s in tr.steps() {
            let expected = match s.rule {
                Rule::Swap => Q::zero(),
                Rule::PentagonForward | Rule::PentagonBackward => Q::one(),
                _ => panic!("unexpected rule {}", s.rule),
            };
            assert_eq!(s.pairing, Some(expected));
        }
        // Every forward pentagon adds a letter, every inverse one removes it.
        let grow = tr.count(Rule::PentagonForward) - tr.count(Rule::PentagonBackward);
        assert_eq!(l.len() + grow, r.len());
        // One pentagon per B13 letter.
        assert_eq!(grow, n * (n - 1) * (n + 1) / 6);
    }
}

#[test]
fn search_oracle_agrees_with_the_derivation() {
    for n in 2..=3 {
        let fa = FlipAlgebra::new(n).unwrap();
        let (l, r) = braided_pentagon_sides(&fa);
        let res = rewriting_oracle(&l, &r, r.len(), 1_000_000).unwrap();
        assert!(res.found, "N={n}: {res:?}");
        // Reversing the right side gives a word in a different class.
        let rev = OperatorWord::new(fa.three(), r.letters().iter().rev().cloned().collect()).unwrap();
        let neg = rewriting_oracle(&l, &rev, r.len(), 1_000_000).unwrap();
        assert!(!neg.found, "N={n}: reversed word reached");
    }
}

#[test]
fn multiplicative_unitary_pentagon() {
    for n in 2..=4 {
        let m = verify_mu_pentagon(n).unwrap();
        assert!(m.passed(), "{}", m.report);
        m.lhs.replay().unwrap();
        m.rhs.replay().unwrap();
        assert!(verify_k_pentagon(n).unwrap().passed());
    }
}

#[test]
fn r_matrix_equals_flip() {
    for n in 2..=4 {
        let r = verify_r_equals_f(n).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn rank_one_decomposition() {
    for n in 2..=5 {
        let r = verify_rank_one_decomposition(n).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn serre_relations() {
    for (n, i) in [(3, 2), (4, 2), (4, 3), (5, 3)] {
        let r = verify_serre(n, i).unwrap();
        assert!(r.passed(), "{r}");
    }
    assert!(verify_serre(3, 1).is_err());
}

#[test]
fn symmetries_and_flip_forms() {
    for n in 2..=4 {
        let r = verify_symmetry_maps(n).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn flip_factor_variants() {
    assert_eq!(flip_factors(3, Variant::F).unwrap().len(), 4);
    assert_eq!(flip_factors(3, "Ft".parse().unwrap()).unwrap().len(), 5);
    assert!(matches!("nope".parse::<Variant>(), Err(WordError::UnknownVariant(_))));
    // N=2: the flip is the single dilogarithm φ(ne_{1,0} ⊕ se_{1,0}).
    let fa = FlipAlgebra::new(2).unwrap();
    let t = fa.triangle();
    let v = fa.pair2(&t.ne(1, 0), &t.se(1, 0));
    assert_eq!(fa.factors(Variant::F).letters(), &[Letter::Dilog(v)]);
}

#[test]
fn trace_json_round_shape() {
    let tr = verify_braided_pentagon(3).unwrap();
    let j = tr.to_json();
    assert_eq!(j["steps"].as_array().unwrap().len(), tr.len());
    assert_eq!(j["schema"], fgflip::SCHEMA);
}

fn random_word(s: &Space, picks: &[(usize, i64)]) -> OperatorWord {
    OperatorWord::dilogs(s, picks.iter().map(|&(i, c)| s.basis(i % 3).scale(qi(c)))).unwrap()
}

proptest! {
    #[test]
    fn swaps_preserve_the_trace_class(picks in prop::collection::vec((0usize..3, -1i64..=1), 1..8), pos in prop::collection::vec(0usize..8, 0..12)) {
        let (s, ..) = abu();
        let w = random_word(&s, &picks);
        let mut tr = RewriteTrace::new(w.clone());
        for p in pos {
            if p + 1 < tr.current().len() {
                let _ = tr.apply(Rule::Swap, p);
            }
        }
        prop_assert!(trace_monoid_equal(&w, tr.current()));
        prop_assert_eq!(&tr.replay().unwrap(), tr.current());
    }

    #[test]
    fn pentagon_round_trip(picks in prop::collection::vec((0usize..3, -1i64..=1), 2..7)) {
        let (s, ..) = abu();
        let w = random_word(&s, &picks);
        for p in 0..w.len() - 1 {
            if let Ok(f) = apply_pentagon(&w, p, Direction::Forward) {
                prop_assert_eq!(f.len(), w.len() + 1);
                prop_assert_eq!(apply_pentagon(&f, p, Direction::Backward).unwrap(), w.clone());
            }
        }
    }
}
