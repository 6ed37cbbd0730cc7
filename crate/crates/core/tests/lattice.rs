mod common;

use peelkit_core::lattice::*;
use peelkit_core::peel::{peel, PeelParams};
use peelkit_core::Error;
use proptest::prelude::*;

fn ev(v: &[u64]) -> ExpVec {
    ExpVec::new(v.to_vec()).unwrap()
}

/// Brute-force enumeration over the box `[0, m]^n`.
fn all_of_degree(n: usize, m: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let total = (m + 1).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let v: Vec<u64> = (0..n)
            .map(|_| {
                let d = c % (m + 1);
                c /= m + 1;
                d
            })
            .collect();
        if v.iter().sum::<u64>() == m {
            out.push(v);
        }
    }
    out.sort();
    out
}

#[test]
fn simplex_lattice_examples() {
    assert_eq!(simplex_lattice(1, 4).unwrap(), vec![ev(&[4])]);
    let two: Vec<_> = simplex_lattice(2, 3).unwrap();
    assert_eq!(two, vec![ev(&[3, 0]), ev(&[2, 1]), ev(&[1, 2]), ev(&[0, 3])]);
    assert_eq!(simplex_lattice(3, 2).unwrap().len(), 6);
    for (n, m) in [(2, 5), (3, 4), (4, 3), (5, 2)] {
        let mut got: Vec<Vec<u64>> = simplex_lattice(n, m).unwrap().iter().map(|e| e.exponents().to_vec()).collect();
        got.sort();
        assert_eq!(got, all_of_degree(n, m));
        assert_eq!(lattice_count(n as u64, m) as usize, got.len());
    }
    assert!(simplex_lattice(0, 1).is_err() && simplex_lattice(2, 0).is_err());
}

#[test]
fn simplex_polytope_examples() {
    let seg = simplex_polytope(2, 3).unwrap();
    assert_eq!(seg.dim(), 1);
    let mut v = seg.ambient_vertices();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let want = [[0.0, 3.0], [3.0, 0.0]];
    assert!(v.iter().zip(&want).all(|(a, b)| common::dist(a, b) < 1e-12));
    let tri = simplex_polytope(3, 1).unwrap();
    assert_eq!((tri.dim(), tri.vertices().len()), (2, 3));
    let s = simplex_polytope(4, 5).unwrap();
    let pts = simplex_lattice(4, 5).unwrap();
    assert_eq!(pts.len(), 56);
    assert!(pts.iter().all(|p| s.contains_point(&p.to_point(), 1e-9)));
    // off-degree points are outside the hull
    assert!(!s.contains_point(&[1.0, 1.0, 1.0, 1.0], 1e-9));
}

#[test]
fn assignment_partitions_lattice() {
    let params = PeelParams::default();
    let p = simplex_polytope(3, 6).unwrap();
    let dec = peel(&p, &params).unwrap();
    let pts = simplex_lattice(3, 6).unwrap();
    let map = assign_pieces(&pts, &dec, 1e-9).unwrap();
    assert_eq!(map.len(), 28);
    for (a, &i) in &map {
        let x = a.to_point();
        assert!(dec.pieces[i].body.contains_point(&x, 1e-8));
        // no earlier piece contains it
        assert!(dec.pieces[..i].iter().all(|pc| !pc.body.contains_point(&x, 1e-8)));
    }
    let one = peel(&simplex_polytope(2, 1).unwrap(), &params).unwrap();
    let map = assign_pieces(&simplex_lattice(2, 1).unwrap(), &one, 1e-9).unwrap();
    assert!(map.values().all(|&i| i == 0));
}

#[test]
fn shared_boundary_goes_to_first_piece() {
    use peelkit_core::geometry::Polytope;
    use peelkit_core::peel::PeelPiece;
    let params = PeelParams::default();
    let mut dec = peel(&simplex_polytope(2, 1).unwrap(), &params).unwrap();
    let seg = |a: [f64; 2], b: [f64; 2]| Polytope::from_vertices(&[a.to_vec(), b.to_vec()], 1e-9).unwrap();
    let piece = |body, i| PeelPiece {
        body,
        stage: 1,
        cut_plane: None,
        order_index: i,
    };
    // point (1,1) sits on the shared end of pieces 1 and 2
    dec.pieces = vec![
        piece(seg([2.0, 0.0], [1.5, 0.5]), 0),
        piece(seg([1.5, 0.5], [1.0, 1.0]), 1),
        piece(seg([1.0, 1.0], [0.0, 2.0]), 2),
    ];
    let map = assign_pieces(&simplex_lattice(2, 2).unwrap(), &dec, 1e-9).unwrap();
    assert_eq!(map[&ev(&[1, 1])], 1);
    assert_eq!(map[&ev(&[2, 0])], 0);
    assert_eq!(map[&ev(&[0, 2])], 2);
    dec.pieces.pop();
    assert_eq!(assign_pieces(&simplex_lattice(2, 2).unwrap(), &dec, 1e-9), Err(Error::Unassigned));
}

#[test]
fn rewrite_step_examples() {
    let mut ar = TagArena::new();
    let t = (ev(&[2, 1]), ar.fresh(3, vec![]));
    let (a, tag) = rewrite_step(&mut ar, &t, 0, 1).unwrap();
    assert_eq!((a, tag.depth, tag.lineage), (ev(&[1, 2]), 2, vec![t.1.id]));
    let z = (ev(&[0, 1]), ar.fresh(5, vec![]));
    assert_eq!(rewrite_step(&mut ar, &z, 0, 1), Err(Error::ZeroExponent { index: 0 }));
    let d = (ev(&[1, 1]), ar.fresh(0, vec![]));
    assert!(matches!(rewrite_step(&mut ar, &d, 0, 1), Err(Error::DepthShortfall { .. })));
}

#[test]
fn rewrite_to_examples() {
    let mut ar = TagArena::new();
    let t = (ev(&[2, 1, 0]), ar.fresh(3, vec![]));
    let ((b, tag), rep) = rewrite_to(&mut ar, &t, &ev(&[0, 1, 2]), 1).unwrap();
    assert_eq!((b, tag.depth, rep.steps), (ev(&[0, 1, 2]), 1, 2));
    let (same, rep) = rewrite_to(&mut ar, &t, &ev(&[2, 1, 0]), 1).unwrap();
    assert_eq!((same, rep.steps), (t.clone(), 0));
    // vertices of K with ell = 1 and n = 3: depth 7 >= 2 n ell = 6
    let deep = (ev(&[1, 0, 0]), ar.fresh(7, vec![]));
    assert!(rewrite_to(&mut ar, &deep, &ev(&[0, 0, 1]), 1).unwrap().1.bound_sufficient);
    assert!(!rewrite_to(&mut ar, &deep, &ev(&[0, 0, 1]), 2).unwrap().1.bound_sufficient);
    assert!(matches!(
        rewrite_to(&mut ar, &t, &ev(&[1, 1, 0]), 1),
        Err(Error::DegreeMismatch { from: 3, to: 2 })
    ));
    let shallow = (ev(&[3, 0, 0]), ar.fresh(2, vec![]));
    assert_eq!(
        rewrite_to(&mut ar, &shallow, &ev(&[0, 0, 3]), 1),
        Err(Error::DepthShortfall {
            at: vec![3, 0, 0],
            needed: 3,
            available: 2
        })
    );
}

#[test]
fn collapse_examples() {
    let mut ar = TagArena::new();
    let one = ar.fresh(5, vec![]);
    let rep = MonomialRep::from_terms(2, [(ev(&[3, 0]), one.clone()), (ev(&[2, 1]), ar.fresh(5, vec![]))]).unwrap();
    let oracle = NilOracle::Constant(2);
    let c = collapse_piece(&mut ar, &rep, &[ev(&[3, 0])], &ev(&[3, 0]), &oracle).unwrap();
    assert_eq!((c.term.1.clone(), c.nil_index), (one, 2));
    let c = collapse_piece(&mut ar, &rep, &[ev(&[3, 0]), ev(&[2, 1])], &ev(&[3, 0]), &oracle).unwrap();
    assert_eq!((c.term.0.clone(), c.term.1.depth, c.nil_index, c.max_steps), (ev(&[3, 0]), 4, 2, 1));
    assert_eq!(c.term.1.lineage.len(), 2);
    assert!(collapse_piece(&mut ar, &rep, &[ev(&[2, 1])], &ev(&[3, 0]), &oracle).is_err());
}

#[test]
fn collapse_first_piece_of_peeled_segment() {
    let params = PeelParams::default();
    let (n, m) = (2usize, 6u64);
    let dec = peel(&simplex_polytope(n, m).unwrap(), &params).unwrap();
    let pts = simplex_lattice(n, m).unwrap();
    let map = assign_pieces(&pts, &dec, 1e-9).unwrap();
    let mut ar = TagArena::new();
    let rep = MonomialRep::from_terms(n, pts.iter().map(|a| (a.clone(), ar.fresh(2 * n as u64 + 1, vec![])))).unwrap();
    let region: Vec<ExpVec> = pts.iter().filter(|a| map[*a] == 0).cloned().collect();
    assert!(!region.is_empty());
    // distance oracle over all region pairs
    let worst = region
        .iter()
        .flat_map(|a| region.iter().map(move |b| a.l1_distance(b)))
        .max()
        .unwrap();
    assert!(worst <= 2 * n as u64);
    let c = collapse_piece(&mut ar, &rep, &region, &region[0], &NilOracle::Constant(2)).unwrap();
    assert!(c.max_steps <= n as u64 && c.term.1.depth >= 2 * n as u64 + 1 - c.max_steps);
}

#[test]
fn homogenize_examples() {
    let mut ar = TagArena::new();
    let h = MonomialRep::from_terms(2, [(ev(&[2, 1]), ar.fresh(1, vec![])), (ev(&[0, 3]), ar.fresh(0, vec![]))]).unwrap();
    assert_eq!(homogenize(&mut ar, &h, 4).unwrap(), h);
    let rep = MonomialRep::from_terms(
        3,
        [
            (ev(&[1, 2, 2]), ar.fresh(2, vec![])),
            (ev(&[0, 3, 3]), ar.fresh(3, vec![])),
            (ev(&[4, 1, 2]), ar.fresh(2, vec![])),
        ],
    )
    .unwrap();
    let out = homogenize(&mut ar, &rep, 2).unwrap();
    assert_eq!(out.length(), Some(1));
    let got: Vec<(Vec<u64>, u64)> = out.terms().map(|(a, t)| (a.exponents().to_vec(), t.depth)).collect();
    assert_eq!(got, vec![(vec![1, 3, 3], 2), (vec![3, 2, 2], 0), (vec![4, 1, 2], 2)]);
    assert!(homogenize(&mut ar, &rep, 1).is_err());
    let shallow = MonomialRep::from_terms(2, [(ev(&[1, 0]), ar.fresh(0, vec![])), (ev(&[1, 1]), ar.fresh(0, vec![]))]).unwrap();
    assert!(matches!(homogenize(&mut ar, &shallow, 3), Err(Error::DepthShortfall { .. })));
}

#[test]
fn homogenize_matches_degree_m_support_pattern() {
    // a representation of mixed degrees becomes one supported on |alpha| = D
    let mut ar = TagArena::new();
    let terms: Vec<_> = (1..=3u64)
        .flat_map(|d| simplex_lattice(3, d).unwrap())
        .map(|a| (a, ar.fresh(5, vec![])))
        .collect();
    let rep = MonomialRep::from_terms(3, terms.clone()).unwrap();
    let out = homogenize(&mut ar, &rep, 3).unwrap();
    assert!(out.terms().all(|(a, _)| a.degree() == 3));
    assert!(out.len() <= rep.len());
    let lattice: Vec<ExpVec> = simplex_lattice(3, 3).unwrap();
    assert!(out.terms().all(|(a, _)| lattice.contains(a)));
}

#[test]
fn nil_oracle_is_deterministic() {
    let mut ar = TagArena::new();
    let tags: Vec<CoeffTag> = (0..200).map(|_| ar.fresh(1, vec![])).collect();
    let o = NilOracle::Seeded { max: 5, seed: 9 };
    let ks: Vec<u64> = tags.iter().map(|t| o.index(t)).collect();
    assert!(ks.iter().all(|&k| (1..=5).contains(&k)));
    assert!((1..=5).all(|k| ks.contains(&k)));
    assert_eq!(ks, tags.iter().map(|t| o.index(t)).collect::<Vec<_>>());
    assert_eq!(NilOracle::default().index(&tags[0]), 2);
    assert!(NilOracle::Constant(0).validate().is_err());
}

#[test]
fn chain_on_peeled_simplex() {
    let params = PeelParams::default();
    let p = simplex_polytope(3, 4).unwrap();
    let dec = peel(&p, &params).unwrap();
    for piece in dec.pieces.iter().step_by(97) {
        for ell in [1, 2, 5] {
            let r = inequality_chain(&piece.body, ell, 1.0, 1e-6).unwrap();
            assert!(r.passed(1e-6), "{r:?}");
            // oracle: every pair by direct enumeration
            let pts = lattice_points_in(&piece.body, ell, 1e-9).unwrap();
            let mut worst = 0;
            for a in &pts {
                for b in &pts {
                    worst = worst.max(a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum::<u64>());
                }
            }
            assert_eq!(worst, r.max_l1);
            assert!(pts.iter().all(|q| q.iter().sum::<i64>() == 4 * ell as i64));
        }
    }
}

fn arb_exp(n: usize) -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(0u64..6, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rewrites_conserve_degree_and_never_gain_depth(a in arb_exp(3), b in arb_exp(3), depth in 0u64..12) {
        let mut b = b;
        // shift b onto the degree of a
        let (da, db) = (a.iter().sum::<u64>(), b.iter().sum::<u64>());
        if db < da {
            b[0] += da - db;
        }
        prop_assume!(b.iter().sum::<u64>() == da);
        let mut ar = TagArena::new();
        let t = (ev(&a), ar.fresh(depth, vec![]));
        let target = ev(&b);
        let path = rewrite_path(&t.0, &target).unwrap();
        prop_assert_eq!(path.len() as u64, t.0.l1_distance(&target) / 2);
        let mut cur = t.clone();
        let mut stepped = Ok(());
        for &(i, j) in &path {
            match rewrite_step(&mut ar, &cur, i, j) {
                Ok(next) => {
                    prop_assert_eq!(next.0.degree(), da);
                    prop_assert!(next.1.depth < cur.1.depth);
                    cur = next;
                }
                Err(e) => { stepped = Err(e); break; }
            }
        }
        match rewrite_to(&mut ar, &t, &target, 1) {
            Ok(((beta, tag), rep)) => {
                prop_assert!(stepped.is_ok());
                prop_assert_eq!(&beta, &target);
                prop_assert_eq!(tag.depth, cur.1.depth);
                prop_assert_eq!(tag.depth + rep.steps, depth);
            }
            Err(Error::DepthShortfall { .. }) => prop_assert!(stepped.is_err()),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn collapse_depth_is_min_after_rewriting(
        depths in proptest::collection::vec(3u64..9, 1..5),
    ) {
        let pts = simplex_lattice(2, 3).unwrap();
        let mut ar = TagArena::new();
        let rep = MonomialRep::from_terms(2, pts.iter().zip(&depths).map(|(a, &d)| (a.clone(), ar.fresh(d, vec![])))).unwrap();
        let region: Vec<ExpVec> = pts.iter().take(depths.len()).cloned().collect();
        let anchor = region[0].clone();
        let c = collapse_piece(&mut ar, &rep, &region, &anchor, &NilOracle::Constant(3)).unwrap();
        let expect = region.iter().zip(&depths).map(|(a, &d)| d - a.l1_distance(&anchor) / 2).min().unwrap();
        prop_assert_eq!(c.term.1.depth, expect);
        prop_assert!(c.term.1.depth <= *depths.iter().min().unwrap());
        prop_assert_eq!(c.term.0.degree(), 3);
    }

    #[test]
    fn homogenize_is_flat_and_not_larger(
        raw in proptest::collection::vec((arb_exp(3), 0u64..10), 1..12),
    ) {
        let mut ar = TagArena::new();
        let mut rep = MonomialRep::new(3).unwrap();
        for (a, d) in raw {
            rep.insert(ev(&a), ar.fresh(d, vec![])).unwrap();
        }
        let top = rep.degree().unwrap();
        match homogenize(&mut ar, &rep, 15) {
            Ok(out) => {
                prop_assert_eq!(out.length(), Some(1));
                prop_assert!(out.len() <= rep.len());
                prop_assert_eq!(out.degree(), Some(top));
            }
            Err(Error::DepthShortfall { at, needed, available }) => {
                prop_assert!(available < needed);
                prop_assert_eq!(top - at.iter().sum::<u64>(), needed);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
