use fgflip::braidgraph::*;
use fgflip::triangle::Triangle;
use fgflip::SkewVector;

fn tri(n: usize) -> Triangle {
    Triangle::new(n).unwrap()
}

fn fs(t: &Triangle, vs: Vec<SkewVector>) -> FormSum {
    FormSum::new(t.space(), vs)
}

#[test]
fn n3_standard_generators() {
    let t = tri(3);
    let e = |r, s| standard_generator(&t, Family::E, r, s).unwrap();
    let f = |r, s| standard_generator(&t, Family::F, r, s).unwrap();
    assert_eq!(e(1, 2), fs(&t, vec![t.se(2, 0), t.se(2, 1)]));
    assert_eq!(e(2, 3), fs(&t, vec![t.se(1, 0)]));
    assert_eq!(e(1, 3), fs(&t, vec![&t.se(2, 0) + &t.se(1, 0)]));
    assert_eq!(f(1, 2), fs(&t, vec![t.ne(1, 0)]));
    assert_eq!(f(2, 3), fs(&t, vec![t.ne(2, 0), t.ne(2, 1)]));
    assert_eq!(f(1, 3), fs(&t, vec![&t.ne(1, 0) + &t.ne(2, 1)]));
}

#[test]
fn n4_figure_labels() {
    let t = tri(4);
    let ge = standard_graph(&t, Family::E);
    assert_eq!(ge.strip_labels(1), &[t.e(3, 1, 0), t.e(2, 1, 1), t.e(1, 1, 2), t.e(0, 1, 3)]);
    assert_eq!(ge.word().positions(1), vec![0, 3, 5]);
    let gf = standard_graph(&t, Family::F);
    assert_eq!(gf.strip_labels(3), &[t.e(1, 0, 3), t.e(1, 1, 2), t.e(1, 2, 1), t.e(1, 3, 0)]);
    assert_eq!(gf.word().positions(3), vec![0, 3, 5]);
    assert_eq!(gf.word().positions(1), vec![2]);
}

#[test]
fn standard_graphs_are_colorings() {
    for n in 2..=6 {
        let t = tri(n);
        for fam in [Family::E, Family::F] {
            standard_graph(&t, fam).check_coloring().unwrap_or_else(|e| panic!("N={n} {fam:?}: {e}"));
        }
    }
}

#[test]
fn wrong_label_breaks_coloring() {
    let t = tri(3);
    let g = standard_graph(&t, Family::E);
    let mut labels = g.labels().to_vec();
    labels[0].swap(0, 1);
    let bad = LabeledBraidGraph::new(g.word().clone(), t.space().clone(), labels).unwrap();
    assert!(bad.check_coloring().is_err());
}

/// Weight of the boundary-to-boundary path along line `b`: all faces below it.
fn below_line(g: &LabeledBraidGraph, b: usize) -> SkewVector {
    let mut s = g.space().zero();
    for j in b..g.strands() {
        for v in g.strip_labels(j) {
            s += v;
        }
    }
    s
}

#[test]
fn mutations_preserve_coloring_and_boundary_path_weights() {
    for n in 2..=5 {
        let t = tri(n);
        for fam in [Family::E, Family::F] {
            let g = standard_graph(&t, fam);
            assert_eq!(g.partition_function(1, n).unwrap().len(), 1);
            for (face, _) in g.mutable_faces() {
                let h = g.mutate(face).unwrap();
                h.check_coloring().unwrap_or_else(|e| panic!("N={n} {fam:?} face {face}: {e}"));
                for b in 1..=n {
                    assert_eq!(below_line(&h, b), below_line(&g, b));
                }
            }
        }
    }
}

#[test]
fn demazure_on_s1s1() {
    let t = tri(3);
    let (v1, v, v2) = (t.e(2, 1, 0), t.e(1, 1, 1), t.e(0, 1, 2));
    let g = LabeledBraidGraph::new(BraidWord::new(2, vec![1, 1]).unwrap(), t.space().clone(), vec![vec![
        v1.clone(),
        v.clone(),
        v2.clone(),
    ]])
    .unwrap();
    let face = FaceId::new(1, 1);
    assert_eq!(g.move_kind(face).unwrap(), MoveKind::Demazure);
    let h = g.mutate(face).unwrap();
    assert_eq!(h.word().letters(), &[1]);
    assert_eq!(h.strip_labels(1), &[v1, &v2 + &v]);
}

#[test]
fn braid_move_and_back() {
    let t = tri(3);
    let g = standard_graph(&t, Family::E);
    let face = FaceId::new(1, 1);
    assert_eq!(g.move_kind(face).unwrap(), MoveKind::BraidUp);
    let h = g.mutate(face).unwrap();
    assert_eq!(h.word().letters(), &[2, 1, 2]);
    // Reverse move at the new middle face of strip 2.
    let back_face = FaceId::new(2, 1);
    assert_eq!(h.move_kind(back_face).unwrap(), MoveKind::BraidDown);
    let k = h.mutate(back_face).unwrap();
    assert!(k.word().commutation_equivalent(g.word()));
    assert_ne!(k.labels(), g.labels());
    k.check_coloring().unwrap();
}

#[test]
fn not_mutable_errors() {
    let t = tri(4);
    let g = standard_graph(&t, Family::E);
    assert!(matches!(g.mutate(FaceId::new(1, 0)), Err(BraidError::NotMutable { .. })));
    let interior = LabeledBraidGraph::new(
        BraidWord::new(4, vec![2, 2]).unwrap(),
        t.space().clone(),
        vec![vec![t.space().zero()], vec![t.space().zero(); 3], vec![t.space().zero()]],
    )
    .unwrap();
    let err = interior.mutate(FaceId::new(2, 1)).unwrap_err();
    assert!(err.to_string().contains("interior"), "{err}");
}

#[test]
fn commutation_leaves_graph_equal() {
    let t = tri(4);
    let g = standard_graph(&t, Family::E);
    // σ1σ2σ3σ1σ2σ1 ~ σ1σ2σ1σ3σ2σ1 via σ3σ1 = σ1σ3.
    let w = BraidWord::new(4, vec![1, 2, 1, 3, 2, 1]).unwrap();
    let h = LabeledBraidGraph::new(w, t.space().clone(), g.labels().to_vec()).unwrap();
    assert_eq!(g, h);
    h.check_coloring().unwrap();
}

#[test]
fn merging() {
    let t = tri(4);
    let g = conditional_e(&t, 1, 3, 2).unwrap();
    assert_eq!(g.strip_labels(1), &[&t.e(3, 1, 0) + &t.e(2, 1, 1), &t.e(1, 1, 2) + &t.e(0, 1, 3)]);
    assert_eq!(g.strip_labels(2), &[t.e(2, 2, 0), t.e(1, 2, 1), t.e(0, 2, 2)]);
    g.check_coloring().unwrap();
    let full = standard_graph(&t, Family::E);
    let all: Vec<usize> = (0..full.word().len()).collect();
    let m = full.merge_labels(&all).unwrap();
    for j in 1..4 {
        let mut s = t.space().zero();
        for v in full.strip_labels(j) {
            s += v;
        }
        assert_eq!(m.strip_labels(j), &[s]);
    }
    let f1 = conditional_f(&t, 2, 4, true).unwrap();
    assert_eq!(f1.word().count(1), 1);
    f1.check_coloring().unwrap();
}

#[test]
fn conditional_sums_recover_generators() {
    for n in 3..=5 {
        let t = tri(n);
        for a in 1..n {
            for b in a + 1..=n {
                let e = standard_generator(&t, Family::E, a, b).unwrap();
                let mut acc = FormSum::new(t.space(), vec![]);
                for j in 1..=n - a {
                    acc = acc.union(&conditional_z(&conditional_e(&t, a, b, j).unwrap()));
                }
                assert_eq!(acc, e, "E N={n} ({a},{b})");
                let f = standard_generator(&t, Family::F, a, b).unwrap();
                let split = conditional_z(&conditional_f(&t, a, b, true).unwrap())
                    .union(&conditional_z(&conditional_f(&t, a, b, false).unwrap()));
                assert_eq!(split, f, "F N={n} ({a},{b})");
            }
        }
    }
}

#[test]
fn path_counts_and_order() {
    let g1 = LabeledBraidGraph::new(
        BraidWord::new(2, vec![1]).unwrap(),
        tri(2).space().clone(),
        vec![vec![tri(2).e(1, 1, 0), tri(2).e(0, 1, 1)]],
    )
    .unwrap();
    assert_eq!(g1.enumerate_paths(1, 2).unwrap().len(), 1);
    let t = tri(3);
    let g = standard_graph(&t, Family::E);
    let ps = g.enumerate_paths(1, 2).unwrap();
    assert_eq!(ps.len(), 2);
    // The path going down first is the smaller one.
    assert!(ps[0].descents[0].position < ps[1].descents[0].position);
    assert_eq!(ps[0].order(&ps[1]), std::cmp::Ordering::Less);
    assert_eq!(ps[0].adjusted, t.se(2, 0));
}

fn snake_row(sp: &SnakeSpace, m: &SnakeMatrix, i: usize) -> Vec<SkewVector> {
    let _ = sp;
    m.row_labels(i)
}

#[test]
fn snake_reduction_reaches_reduced_word() {
    for n in 1..=5 {
        let r = snake_reduce_doubled(n).unwrap();
        assert!(r.initial.is_admissible(), "n={n}");
        assert!(r.result.is_admissible(), "n={n}");
        assert!(r.reached_target(), "n={n}:\n{}\nexpected\n{}", r.result, r.target);
        assert!(r.result.first_mutable().is_none());
    }
}

#[test]
fn snake_n3_figure() {
    let sp = SnakeSpace::new(3);
    let p2 = sp.doubled();
    // Top row of P_3(2): se30 se31 se32 sf30; middle: se20 se21 sf20 sf31; bottom: se10 sf10 sf21 sf32.
    let w = |k: usize, l: usize| p2.weights[k][l].clone().unwrap();
    assert_eq!([w(3, 0), w(3, 1), w(3, 2), w(3, 3)], [sp.se(3, 0), sp.se(3, 1), sp.se(3, 2), sp.sf(3, 0)]);
    assert_eq!([w(2, 0), w(2, 1), w(2, 2), w(2, 3)], [sp.se(2, 0), sp.se(2, 1), sp.sf(2, 0), sp.sf(3, 1)]);
    assert_eq!([w(1, 0), w(1, 1), w(1, 2), w(1, 3)], [sp.se(1, 0), sp.sf(1, 0), sp.sf(2, 1), sp.sf(3, 2)]);
    let r = snake_reduce_doubled(3).unwrap();
    let p = &r.result;
    let v = |k: usize, l: usize| (p.values[k][l], p.weights[k][l].clone());
    assert_eq!(v(3, 0), (1, Some(sp.se(3, 0))));
    assert_eq!(v(2, 0), (2, Some(sp.se(2, 0))));
    assert_eq!(v(2, 1), (1, Some(sp.se(3, 1))));
    assert_eq!(v(1, 0), (3, Some(sp.se(1, 0))));
    assert_eq!(v(1, 1), (2, Some(sp.se(2, 1))));
    assert_eq!(v(1, 2), (1, Some(sp.se(3, 2))));
    for (k, l) in [(3, 1), (3, 2), (3, 3), (2, 2), (2, 3), (1, 3)] {
        assert_eq!(v(k, l), (0, None));
    }
}

#[test]
fn snake_graph_form_n4() {
    // Row labels of the doubled and reduced matrices are the face labels of the
    // doubled graph and of Γ_E restricted to its ∇-faces.
    let sp = SnakeSpace::new(3);
    let t = &sp.triangle;
    let lift = |a, b, c| sp.space.from_coeffs(t.e(a, b, c).terms());
    let before = sp.doubled();
    let r = snake_reduce_doubled(3).unwrap();
    let expect = [
        vec![lift(3, 1, 0), lift(2, 1, 1), lift(1, 1, 2)],
        vec![lift(2, 2, 0), lift(1, 2, 1)],
        vec![lift(1, 3, 0)],
    ];
    for i in 1..=3 {
        let row0 = snake_row(&sp, &before, i);
        let row1 = snake_row(&sp, &r.result, i);
        assert_eq!(row0[..expect[i - 1].len()], expect[i - 1][..], "doubled row {i}");
        assert_eq!(row1, expect[i - 1], "reduced row {i}");
    }
}

#[test]
fn graph_json_roundtrip() {
    let t = tri(3);
    let g = standard_graph(&t, Family::F);
    let j = g.to_json();
    let h = LabeledBraidGraph::from_json(&j).unwrap();
    assert_eq!(h, g);
    assert_eq!(graph_from_word(g.word()).to_json()["faces"].as_array().unwrap().len(), 5);
}
