use std::f64::consts::PI;

use proptest::prelude::*;
use rodtaper::geometry::{polygon_moments, principal_frame, shapes, taper_eval, Point2, Polygon, RodProfile, Taper};
use rodtaper::mesh::{refine, triangulate, triangulate_levels};

/// ∫x², ∫y², ∫xy over a triangle by the vertex formula.
fn tri_moments(p: [Point2; 3]) -> [f64; 4] {
    let a = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
    let q = |i: usize, j: usize| {
        let mut s = 0.0;
        for u in 0..3 {
            for v in 0..3 {
                s += p[u][i] * p[v][j] * if u == v { 2.0 } else { 1.0 };
            }
        }
        s * a / 12.0
    };
    [a, q(0, 0), q(1, 1), q(0, 1)]
}

/// Area and second moments summed over a fan of triangles.
fn dense_moments(poly: &Polygon) -> [f64; 4] {
    // a fan from vertex 0 is valid for the convex polygons used here
    let v = poly.vertices();
    let mut m = [0.0; 4];
    for k in 1..v.len() - 1 {
        let t = tri_moments([v[0], v[k], v[k + 1]]);
        for i in 0..4 {
            m[i] += t[i];
        }
    }
    m
}

fn rotate(p: Point2, a: f64) -> Point2 {
    [a.cos() * p[0] - a.sin() * p[1], a.sin() * p[0] + a.cos() * p[1]]
}

#[test]
fn rectangle_moments_and_rotation() {
    let r = shapes::rectangle(2.0, 1.0).unwrap();
    let m = polygon_moments(&r).unwrap();
    assert!((m.area - 2.0).abs() < 1e-15);
    assert!((m.second[0] - 2.0 / 3.0).abs() < 1e-15 && (m.second[1] - 1.0 / 6.0).abs() < 1e-15);
    let a = PI / 6.0;
    let rot = Polygon::new(r.vertices().iter().map(|&p| rotate(p, a)).collect()).unwrap();
    let mr = polygon_moments(&rot).unwrap();
    let d = dense_moments(&rot);
    assert!((mr.area - d[0]).abs() < 1e-14);
    for k in 0..3 {
        assert!((mr.second[k] - d[k + 1]).abs() < 1e-14, "{k}");
    }
    let s = principal_frame(&rot).unwrap();
    assert!((s.inertia1 - 2.0 / 3.0).abs() < 1e-10 && (s.inertia2 - 1.0 / 6.0).abs() < 1e-10);
    assert!(s.rotation_applied > -PI / 2.0 && s.rotation_applied <= PI / 2.0);
}

#[test]
fn translated_square_records_shift() {
    let sq = shapes::rectangle(1.0, 1.0).unwrap();
    let moved = Polygon::new(sq.vertices().iter().map(|p| [p[0] + 3.0, p[1] - 2.0]).collect()).unwrap();
    let s = principal_frame(&moved).unwrap();
    assert!((s.centroid_shift[0] - 3.0).abs() < 1e-12 && (s.centroid_shift[1] + 2.0).abs() < 1e-12);
    assert_eq!(s.rotation_applied, 0.0);
    assert!((s.inertia1 - 1.0 / 12.0).abs() < 1e-12 && (s.inertia2 - 1.0 / 12.0).abs() < 1e-12);
}

fn star_polygon() -> impl Strategy<Value = Polygon> {
    prop::collection::vec(0.5f64..1.5, 5..12).prop_map(|r| {
        let n = r.len();
        let v = r.iter().enumerate().map(|(k, &rk)| {
            let t = 2.0 * PI * k as f64 / n as f64;
            [rk * t.cos(), rk * t.sin()]
        });
        Polygon::new(v.collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn central_moments_are_translation_invariant(p in star_polygon(), dx in -10.0f64..10.0, dy in -10.0f64..10.0) {
        let q = Polygon::new(p.vertices().iter().map(|v| [v[0] + dx, v[1] + dy]).collect()).unwrap();
        let (a, b) = (polygon_moments(&p).unwrap().central(), polygon_moments(&q).unwrap().central());
        let scale = a[0].abs() + a[1].abs();
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() <= 1e-12 * scale * (1.0 + dx.abs() + dy.abs()).powi(2));
        }
    }

    #[test]
    fn moments_rotate_as_a_tensor(p in star_polygon(), angle in -PI..PI) {
        let q = Polygon::new(p.vertices().iter().map(|&v| rotate(v, angle)).collect()).unwrap();
        let m = polygon_moments(&p).unwrap().second;
        let r = polygon_moments(&q).unwrap().second;
        let (c, s) = (angle.cos(), angle.sin());
        let xx = c * c * m[0] - 2.0 * c * s * m[2] + s * s * m[1];
        let yy = s * s * m[0] + 2.0 * c * s * m[2] + c * c * m[1];
        let xy = c * s * (m[0] - m[1]) + (c * c - s * s) * m[2];
        let scale = m[0] + m[1];
        prop_assert!((r[0] - xx).abs() <= 1e-10 * scale);
        prop_assert!((r[1] - yy).abs() <= 1e-10 * scale);
        prop_assert!((r[2] - xy).abs() <= 1e-10 * scale);
    }

    #[test]
    fn principal_frame_is_idempotent(p in star_polygon()) {
        let s = principal_frame(&p).unwrap();
        let m = polygon_moments(&s.polygon).unwrap();
        let scale = s.inertia1 + s.inertia2;
        prop_assert!(m.first[0].abs() <= 1e-10 * scale && m.first[1].abs() <= 1e-10 * scale);
        prop_assert!(m.second[2].abs() <= 1e-10 * scale);
        prop_assert!(s.inertia1 >= s.inertia2);
        let t = principal_frame(&s.polygon).unwrap();
        prop_assert!(t.centroid_shift[0].abs() < 1e-12 && t.centroid_shift[1].abs() < 1e-12);
        prop_assert!(t.rotation_applied.abs() < 1e-9);
    }

    #[test]
    fn limit_taper_lies_below(eps in 0.01f64..0.49, x in 0.0f64..1.0) {
        let p = RodProfile::new(1.0, eps).unwrap();
        prop_assert!(p.rho(x) <= p.rho_eps(x));
    }
}

#[test]
fn taper_values() {
    let p = RodProfile::new(1.0, 0.1).unwrap();
    assert_eq!(taper_eval(&p, 0.0, Taper::Eps).unwrap(), 1.0);
    assert!((taper_eval(&p, 1.0, Taper::Eps).unwrap() - 0.1).abs() < 1e-15);
    assert_eq!(taper_eval(&p, 1.0, Taper::Limit).unwrap(), 0.0);
    assert!(taper_eval(&p, 1.5, Taper::Eps).is_err());
}

#[test]
fn square_mesh_counts() {
    let s = principal_frame(&shapes::rectangle(1.0, 1.0).unwrap()).unwrap();
    let m = triangulate(&s, 1.0).unwrap();
    assert_eq!((m.triangle_count(), m.node_count()), (2, 4));
    let m = triangulate(&s, 0.5).unwrap();
    assert_eq!((m.triangle_count(), m.node_count()), (8, 9));
    assert_eq!(refine(&m).triangle_count(), 32);
}

#[test]
fn refinement_invariants() {
    for poly in [shapes::rectangle(1.0, 1.0).unwrap(), shapes::ellipse(2.0, 1.0, 40).unwrap()] {
        let s = principal_frame(&poly).unwrap();
        let mut m = triangulate_levels(&s, 0).unwrap();
        for _ in 0..4 {
            let c = m.check();
            assert!(c.conforming && c.min_signed_area > 0.0);
            assert_eq!(c.euler, 1);
            assert!((m.area() - s.area).abs() <= 1e-12 * s.area);
            let r = refine(&m);
            assert!((r.max_edge() - 0.5 * m.max_edge()).abs() < 1e-12 * m.max_edge());
            assert_eq!(r.boundary_edges.len(), 2 * m.boundary_edges.len());
            assert_eq!(r.boundary_nodes().len(), 2 * m.boundary_nodes().len());
            m = r;
        }
    }
}
