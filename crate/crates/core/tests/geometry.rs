mod common;

use common::*;
use peelkit_core::geometry::*;
use peelkit_core::{Error, DEFAULT_TOL};
use rand::Rng;
use std::f64::consts::{FRAC_PI_4, SQRT_2};

const TOL: f64 = DEFAULT_TOL;

fn square() -> Polytope {
    Polytope::from_vertices(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], TOL).unwrap()
}

fn sorted_vertices(p: &Polytope) -> Vec<Vec<f64>> {
    let mut v = p.ambient_vertices();
    for x in v.iter_mut() {
        for c in x.iter_mut() {
            *c = (*c * 1e9).round() / 1e9 + 0.0;
        }
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn hull_of_random_points_matches_elimination_rank() {
    let mut r = rng(1);
    let pts = points_in_ball(&mut r, 3, 20, 5.0);
    let h = affine_hull(&pts, TOL).unwrap();
    let centered: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect()).collect();
    assert_eq!(h.dim(), rank(centered, 1e-9));
    assert_eq!(h.dim(), 3);
}

#[test]
fn square_from_vertices() {
    let p = square();
    assert_eq!(p.vertices().len(), 4);
    assert_eq!(p.facets().len(), 4);
    assert_eq!(p.dim(), 2);
    for (f, inc) in p.facets().iter().zip(p.incidence()) {
        assert_eq!(inc.len(), 2);
        for &v in inc {
            assert!(f.slack(&p.vertices()[v]).abs() < 1e-12);
        }
    }
}

#[test]
fn collinear_points_give_segment() {
    let p = Polytope::from_vertices(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]], TOL).unwrap();
    assert_eq!(p.dim(), 1);
    assert_eq!(sorted_vertices(&p), vec![vec![0.0, 0.0], vec![2.0, 0.0]]);
}

#[test]
fn cube_with_center_against_extremality_oracle() {
    let mut pts = Vec::new();
    for i in 0..8 {
        pts.push((0..3).map(|b| ((i >> b) & 1) as f64).collect::<Vec<f64>>());
    }
    pts.push(vec![0.5, 0.5, 0.5]);
    let p = Polytope::from_vertices(&pts, TOL).unwrap();
    assert_eq!(p.vertices().len(), 8);
    assert_eq!(p.facets().len(), 6);
    let expected: Vec<&Vec<f64>> = pts.iter().filter(|v| is_extreme(v, &pts)).collect();
    assert_eq!(expected.len(), 8);
    for v in p.ambient_vertices() {
        assert!(expected.iter().any(|e| dist(e, &v) < 1e-9));
    }
}

#[test]
fn random_hulls_agree_with_extremality_oracle() {
    let mut r = rng(3);
    for d in 2..=4 {
        for _ in 0..5 {
            let pts = points_in_ball(&mut r, d, 12, 3.0);
            let p = Polytope::from_vertices(&pts, TOL).unwrap();
            let ext: Vec<&Vec<f64>> = pts.iter().filter(|v| is_extreme(v, &pts)).collect();
            assert_eq!(ext.len(), p.vertices().len(), "dim {d}");
            for q in &pts {
                assert!(p.contains_point(q, 1e-9));
            }
        }
    }
}

#[test]
fn square_from_halfspaces() {
    let hs = vec![
        Halfspace::new(vec![1.0, 0.0], 1.0).unwrap(),
        Halfspace::new(vec![-1.0, 0.0], 0.0).unwrap(),
        Halfspace::new(vec![0.0, 1.0], 1.0).unwrap(),
        Halfspace::new(vec![0.0, -1.0], 0.0).unwrap(),
    ];
    let p = Polytope::from_halfspaces(&hs, AffineHull::ambient(2), TOL).unwrap();
    assert_eq!(sorted_vertices(&p), sorted_vertices(&square()));
}

#[test]
fn strip_is_unbounded() {
    let hs = vec![
        Halfspace::new(vec![1.0, 0.0], 1.0).unwrap(),
        Halfspace::new(vec![-1.0, 0.0], 0.0).unwrap(),
    ];
    assert!(matches!(
        Polytope::from_halfspaces(&hs, AffineHull::ambient(2), TOL),
        Err(Error::Unbounded)
    ));
    let cone = vec![
        Halfspace::new(vec![-1.0, 0.0], 0.0).unwrap(),
        Halfspace::new(vec![0.0, -1.0], 0.0).unwrap(),
    ];
    assert!(matches!(
        Polytope::from_halfspaces(&cone, AffineHull::ambient(2), TOL),
        Err(Error::Unbounded)
    ));
}

#[test]
fn contradictory_system_is_empty() {
    let hs = vec![
        Halfspace::new(vec![1.0], -1.0).unwrap(),
        Halfspace::new(vec![-1.0], -1.0).unwrap(),
    ];
    assert!(matches!(
        Polytope::from_halfspaces(&hs, AffineHull::ambient(1), TOL),
        Err(Error::EmptySystem)
    ));
}

#[test]
fn random_halfspace_system_checked_by_evaluation() {
    let mut r = rng(4);
    let hs: Vec<Halfspace> = (0..10)
        .map(|_| Halfspace::new(unit(&mut r, 3), 1.0 + r.random::<f64>()).unwrap())
        .collect();
    let p = Polytope::from_halfspaces(&hs, AffineHull::ambient(3), TOL).unwrap();
    assert!(p.vertices().len() >= 4);
    for v in p.ambient_vertices() {
        let slacks: Vec<f64> = hs.iter().map(|h| h.offset - dot(&h.normal, &v)).collect();
        assert!(slacks.iter().all(|&s| s >= -1e-9));
        assert!(slacks.iter().filter(|s| s.abs() <= 1e-9).count() >= 3);
    }
}

#[test]
fn halfspace_roundtrip_on_random_polytopes() {
    let mut r = rng(5);
    for d in 2..=4 {
        for _ in 0..5 {
            let p = Polytope::from_vertices(&points_in_ball(&mut r, d, 12, 2.0), TOL).unwrap();
            let q = Polytope::from_halfspaces(p.facets(), p.hull().clone(), TOL).unwrap();
            assert!(p.same_vertices(&q, 1e-9));
        }
    }
}

#[test]
fn square_cuts() {
    let p = square();
    let (near, far) = cut(&p, &Hyperplane::new(vec![1.0, 0.0], 0.5).unwrap(), TOL);
    let near = near.unwrap();
    let far = far.unwrap();
    assert_eq!(
        sorted_vertices(&near),
        vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.0], vec![0.5, 1.0]]
    );
    assert_eq!(
        sorted_vertices(&far),
        vec![vec![0.5, 0.0], vec![0.5, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]
    );
    assert_eq!(near.facets().len(), 4);
    let (near, far) = cut(&p, &Hyperplane::new(vec![1.0, 0.0], 2.0).unwrap(), TOL);
    assert!(near.unwrap().same_vertices(&p, 1e-12));
    assert!(far.is_none());
    // touching plane gives the shared edge on the far side
    let (_, far) = cut(&p, &Hyperplane::new(vec![1.0, 0.0], 1.0).unwrap(), TOL);
    assert_eq!(far.unwrap().dim(), 1);
}

#[test]
fn simplex_cut_validated_by_sampling() {
    let pts = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    let p = Polytope::from_vertices(&pts, TOL).unwrap();
    let n = {
        let v: Vec<f64> = vec![0.3, -0.5, 0.81];
        let l = norm(&v);
        v.iter().map(|x| x / l).collect::<Vec<f64>>()
    };
    let h = Hyperplane::new(n.clone(), 0.05).unwrap();
    let (near, far) = cut(&p, &h, TOL);
    let (near, far) = (near.unwrap(), far.unwrap());
    let mut r = rng(6);
    for _ in 0..10_000 {
        let x = convex_combo(&mut r, &pts);
        let s = dot(&n, &x) - 0.05;
        if s <= -1e-9 {
            assert!(near.contains_point(&x, 1e-9) && !far.contains_point(&x, -1e-9));
        } else if s >= 1e-9 {
            assert!(far.contains_point(&x, 1e-9) && !near.contains_point(&x, -1e-9));
        }
        assert!(near.contains_point(&x, 1e-9) || far.contains_point(&x, 1e-9));
    }
    // pieces stay inside the parent: check a sample of their own points
    for piece in [&near, &far] {
        let verts = piece.ambient_vertices();
        for _ in 0..1000 {
            assert!(p.contains_point(&convex_combo(&mut r, &verts), 1e-9));
        }
    }
}

#[test]
fn intersections() {
    let p = square();
    let pp = intersect(&p, &p, TOL).unwrap().unwrap();
    assert!(pp.same_vertices(&p, 1e-12));
    let shifted = Polytope::from_vertices(
        &[vec![0.5, 0.5], vec![1.5, 0.5], vec![0.5, 1.5], vec![1.5, 1.5]],
        TOL,
    )
    .unwrap();
    let q = intersect(&p, &shifted, TOL).unwrap().unwrap();
    assert_eq!(
        sorted_vertices(&q),
        vec![vec![0.5, 0.5], vec![0.5, 1.0], vec![1.0, 0.5], vec![1.0, 1.0]]
    );
    let far = Polytope::from_vertices(&[vec![5.0, 5.0], vec![6.0, 5.0], vec![5.0, 6.0]], TOL).unwrap();
    assert!(intersect(&p, &far, TOL).unwrap().is_none());
}

#[test]
fn random_intersections_against_sampling_oracle() {
    let mut r = rng(7);
    for d in 2..=3 {
        let a_pts = points_in_ball(&mut r, d, 10, 2.0);
        let b_pts: Vec<Vec<f64>> = points_in_ball(&mut r, d, 10, 2.0)
            .into_iter()
            .map(|p| p.iter().map(|x| x + 0.5).collect())
            .collect();
        let a = Polytope::from_vertices(&a_pts, TOL).unwrap();
        let b = Polytope::from_vertices(&b_pts, TOL).unwrap();
        let ab = intersect(&a, &b, TOL).unwrap().unwrap();
        let ba = intersect(&b, &a, TOL).unwrap().unwrap();
        assert!(ab.same_vertices(&ba, 1e-8));
        let verts = ab.ambient_vertices();
        for _ in 0..2000 {
            let x = convex_combo(&mut r, &verts);
            assert!(a.contains_point(&x, 1e-9) && b.contains_point(&x, 1e-9));
        }
        // points of a that lie in b lie in the intersection
        for _ in 0..2000 {
            let x = convex_combo(&mut r, &a_pts);
            if b.contains_point(&x, 0.0) {
                assert!(ab.contains_point(&x, 1e-9));
            }
        }
    }
}

#[test]
fn scaling() {
    let p = square();
    assert!(scale(&p, 1.0).unwrap().same_vertices(&p, 0.0));
    let p3 = scale(&p, 3.0).unwrap();
    assert_eq!(
        sorted_vertices(&p3),
        vec![vec![0.0, 0.0], vec![0.0, 3.0], vec![3.0, 0.0], vec![3.0, 3.0]]
    );
    let a = scale(&scale(&p, 2.0).unwrap(), 3.0).unwrap();
    assert!(a.same_vertices(&scale(&p, 6.0).unwrap(), 1e-12));
    assert!(scale(&p, 0.0).is_err());
    assert!(scale(&p, -1.0).is_err());
}

#[test]
fn minkowski_examples() {
    let seg = Polytope::from_vertices(&[vec![0.0], vec![1.0]], TOL).unwrap();
    let (s2, rep) = minkowski_scaled_sum(&seg, 1, 1, 100, 0, TOL).unwrap();
    assert_eq!(sorted_vertices(&s2), vec![vec![0.0], vec![2.0]]);
    assert!(rep.passed());
    let (sq5, rep) = minkowski_scaled_sum(&square(), 2, 3, 100, 0, TOL).unwrap();
    assert_eq!(
        sorted_vertices(&sq5),
        vec![vec![0.0, 0.0], vec![0.0, 5.0], vec![5.0, 0.0], vec![5.0, 5.0]]
    );
    assert!(rep.passed());
    assert!(minkowski_scaled_sum(&seg, 0, 1, 1, 0, TOL).is_err());
}

#[test]
fn minkowski_triangle_support_oracle() {
    let mut r = rng(8);
    let tri = points_in_ball(&mut r, 2, 3, 2.0);
    let p = Polytope::from_vertices(&tri, TOL).unwrap();
    let (p3, rep) = minkowski_scaled_sum(&p, 2, 1, 1000, 1, TOL).unwrap();
    assert!(rep.passed());
    let h = |pts: &[Vec<f64>], u: &[f64], s: f64| pts.iter().map(|v| s * dot(u, v)).fold(f64::MIN, f64::max);
    for _ in 0..100 {
        let u = unit(&mut r, 2);
        assert!((h(&tri, &u, 2.0) + h(&tri, &u, 1.0) - p3.support(&u)).abs() <= 1e-9 * 3.0);
    }
}

#[test]
fn enclosing_ball_invariants() {
    let mut r = rng(9);
    for d in 2..=4 {
        let pts = points_in_ball(&mut r, d, 30, 4.0);
        let eb = min_enclosing_ball(&pts, 0.0).unwrap();
        assert!(eb.support.len() <= d + 1 && !eb.support.is_empty());
        for p in &pts {
            assert!(dist(p, &eb.ball.center) <= eb.ball.radius + 1e-9);
        }
        for &s in &eb.support {
            assert!((dist(&pts[s], &eb.ball.center) - eb.ball.radius).abs() <= 1e-9);
        }
        // dropping a non-support point leaves the ball unchanged
        let drop = (0..pts.len()).find(|i| !eb.support.contains(i)).unwrap();
        let rest: Vec<Vec<f64>> = pts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, p)| p.clone()).collect();
        let eb2 = min_enclosing_ball(&rest, 0.0).unwrap();
        assert!((eb2.ball.radius - eb.ball.radius).abs() <= 1e-9);
        assert!(dist(&eb2.ball.center, &eb.ball.center) <= 1e-7);
    }
}

#[test]
fn nets_cover() {
    assert_eq!(sphere_net(1, 0.7).unwrap(), vec![vec![1.0], vec![-1.0]]);
    let net = sphere_net(2, FRAC_PI_4).unwrap();
    assert_eq!(net.len(), 4);
    assert!(net_covering_witness(&net, FRAC_PI_4 + 1e-12, 100_000, 1).is_none());
    let net = sphere_net(3, 0.3).unwrap();
    assert!(net_covering_witness(&net, 0.3, 100_000, 2).is_none());
    assert!(sphere_net(2, 2.0).is_err());
}

#[test]
fn sandwich_examples() {
    let d = sandwich_polytope(&[0.0, 0.0], 1.0, SQRT_2, 2).unwrap();
    assert_eq!(d.vertices().len(), 4);
    for v in d.vertices() {
        assert!((norm(v) - SQRT_2).abs() < 1e-9);
    }
    let theta = covering_angle(1.0, 1.01);
    assert!((theta - 0.1409).abs() < 1e-4);
    let d = sandwich_polytope(&[0.0, 0.0], 1.0, 1.01, 2).unwrap();
    assert!(d.facets().len() >= 23);
    for v in d.vertices() {
        assert!(norm(v) <= 1.01 + 1e-9);
    }
    assert!(d.contains_ball(&Ball::new(vec![0.0, 0.0], 1.0).unwrap(), 1e-12));
    assert!(sandwich_polytope(&[0.0, 0.0], 2.0, 1.0, 2).is_err());
}

#[test]
fn sandwich_in_higher_dimensions() {
    for d in 3..=4 {
        let c: Vec<f64> = (0..d).map(|i| i as f64 * 0.25).collect();
        let p = sandwich_polytope(&c, 1.0, 1.1, d).unwrap();
        assert!(p.contains_ball(&Ball::new(c.clone(), 1.0).unwrap(), 1e-12));
        assert!(p.inside_ball(&Ball::new(c.clone(), 1.1).unwrap(), 1e-9));
        for (f, inc) in p.facets().iter().zip(p.incidence()) {
            assert!(inc.len() >= d);
            for &v in inc {
                assert!(f.slack(&p.vertices()[v]).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn containment_predicates() {
    let p = square();
    assert!(p.contains_point(&[0.5, 0.5], 0.0));
    assert!(!p.contains_point(&[2.0, 2.0], TOL));
    assert!(p.contains_ball(&Ball::new(vec![0.5, 0.5], 0.4).unwrap(), TOL));
    assert!(!p.contains_ball(&Ball::new(vec![0.5, 0.5], 0.6).unwrap(), TOL));
    assert!(p.inside_ball(&Ball::new(vec![0.5, 0.5], 0.75).unwrap(), TOL));
}
