use super::mesh::TriangleRecord;
use super::*;
use crate::simplex::DuffyRule;
use crate::spectral1d::GaussRule;
use core::f64::consts::FRAC_PI_2;

fn quarter_disk(radius: f64) -> CurvedTriangle {
    let arc = EdgeCurve::fit(24, |t| {
        [
            radius * (FRAC_PI_2 * t).cos(),
            radius * (FRAC_PI_2 * t).sin(),
        ]
    })
    .unwrap();
    let p = [[radius, 0.0], [0.0, radius], [0.0, 0.0]];
    CurvedTriangle::new(
        p,
        [
            arc,
            EdgeCurve::straight(p[1], p[2]),
            EdgeCurve::straight(p[2], p[0]),
        ],
    )
    .unwrap()
}

/// Sector element r ∈ [1, 2] cut along a diagonal: inner arc bulges inward.
fn inner_arc_element() -> CurvedTriangle {
    let (a0, a1) = (0.3f64, 0.8f64);
    let arc = EdgeCurve::fit(24, |t| {
        let a = a1 + (a0 - a1) * t;
        [a.cos(), a.sin()]
    })
    .unwrap();
    let p = [
        [a1.cos(), a1.sin()],
        [a0.cos(), a0.sin()],
        [2.0 * a0.cos(), 2.0 * a0.sin()],
    ];
    CurvedTriangle::new(
        p,
        [
            arc,
            EdgeCurve::straight(p[1], p[2]),
            EdgeCurve::straight(p[2], p[0]),
        ],
    )
    .unwrap()
}

#[test]
fn affine_reduction() {
    let p = [[0.2, -0.1], [1.7, 0.4], [0.5, 1.9]];
    let t = CurvedTriangle::straight(p).unwrap();
    assert!(t.is_affine());
    let c = t.map(1.0 / 3.0, 1.0 / 3.0).unwrap();
    let expect = [
        (p[0][0] + p[1][0] + p[2][0]) / 3.0,
        (p[0][1] + p[1][1] + p[2][1]) / 3.0,
    ];
    assert!(dist(c, expect) < 1e-15);
    let j = t.jacobian(0.1, 0.7).unwrap();
    assert_eq!(
        j,
        [
            [p[1][0] - p[0][0], p[2][0] - p[0][0]],
            [p[1][1] - p[0][1], p[2][1] - p[0][1]]
        ]
    );
}

#[test]
fn straight_jacobians() {
    let t = CurvedTriangle::straight([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    assert_eq!(t.jacobian(0.3, 0.3).unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
    let t = CurvedTriangle::straight([[0.0, 0.0], [2.0, 0.0], [0.0, 3.0]]).unwrap();
    for (u, v) in [(0.0, 0.0), (0.5, 0.2), (0.1, 0.9)] {
        assert!((t.jacobian_det(0, u, v).unwrap() - 6.0).abs() < 1e-15);
    }
}

#[test]
fn rejects_points_outside_reference() {
    let t = quarter_disk(1.0);
    assert!(t.map(0.7, 0.4).is_err());
    assert!(t.map(-0.1, 0.2).is_err());
    assert!(t.map(1.0 + 1e-13, 0.0).is_ok());
}

#[test]
fn edge_reproduction() {
    for el in [quarter_disk(1.0), quarter_disk(2.0), inner_arc_element()] {
        for e in 0..3 {
            for k in 0..20 {
                let t = k as f64 / 19.0;
                let [u, v] = CurvedTriangle::reference_edge_point(e, t);
                let mapped = el.map(u, v).unwrap();
                assert!(dist(mapped, el.edge(e).point(t)) <= 1e-12, "edge {e} t {t}");
            }
        }
    }
}

#[test]
fn curved_map_matches_extended_precision_oracle() {
    // blend formula evaluated with the exact arc at 40 digits
    let x = quarter_disk(1.0).map(0.25, 0.25).unwrap();
    assert!((x[0] - 0.610_117_126_561_357_5).abs() <= 1e-12);
    assert!((x[1] - 0.346_304_124_277_121_2).abs() <= 1e-12);
}

#[test]
fn jacobian_matches_finite_differences() {
    let h = 1e-6;
    for el in [quarter_disk(1.0), inner_arc_element()] {
        for &(u, v) in &[(0.25, 0.25), (0.1, 0.6), (0.7, 0.1), (0.4, 0.4)] {
            let j = el.jacobian(u, v).unwrap();
            let du = el.map(u + h, v).unwrap();
            let dm = el.map(u - h, v).unwrap();
            let dv = el.map(u, v + h).unwrap();
            let dn = el.map(u, v - h).unwrap();
            let scale = j.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
            for c in 0..2 {
                assert!(((du[c] - dm[c]) / (2.0 * h) - j[c][0]).abs() <= 1e-8 * scale);
                assert!(((dv[c] - dn[c]) / (2.0 * h) - j[c][1]).abs() <= 1e-8 * scale);
            }
        }
    }
}

#[test]
fn map_is_smooth_at_corner_opposite_curved_edge() {
    // the Jacobian at vertex 3 must not depend on the approach direction
    let el = inner_arc_element();
    let j0 = el.jacobian(0.0, 1.0).unwrap();
    for &(du, dv) in &[(1e-7, -1e-7), (0.0, -2e-7), (1e-7, -2e-7)] {
        let j = el.jacobian(du, 1.0 + dv).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((j[r][c] - j0[r][c]).abs() < 1e-5);
            }
        }
    }
}

#[test]
fn edge_traces() {
    let t = CurvedTriangle::straight([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    let (p, n, s) = t.edge_trace(0, 0.3).unwrap();
    assert!(dist(p, [0.3, 0.0]) < 1e-15);
    assert!(dist(n, [0.0, -1.0]) < 1e-15);
    assert!((s - 1.0).abs() < 1e-15);
    assert!(t.edge_trace(3, 0.5).is_err());

    let t = CurvedTriangle::straight([[0.0, 0.0], [1.0, 1.0], [0.0, 2.0]]).unwrap();
    let (_, n, s) = t.edge_trace(2, 0.5).unwrap();
    assert!((s - 2.0).abs() < 1e-15);
    assert!(dist(n, [-1.0, 0.0]) < 1e-15);

    let q = quarter_disk(2.0);
    for k in 0..=10 {
        let (p, n, s) = q.edge_trace(0, k as f64 / 10.0).unwrap();
        let r = p[0].hypot(p[1]);
        assert!(dist(n, [p[0] / r, p[1] / r]) <= 1e-10);
        assert!((s - 2.0 * FRAC_PI_2).abs() <= 1e-10);
    }
}

#[test]
fn subdivision() {
    let kids = RefCell::UNIT.subdivide();
    for k in &kids {
        assert_eq!(k.area(), 0.125);
    }
    let cell = RefCell::new([[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]).unwrap();
    let total: f64 = cell.subdivide().iter().map(|c| c.area()).sum();
    assert_eq!(total, cell.area());
    let cells = RefCell::UNIT.subdivide_uniform(3);
    assert_eq!(cells.len(), 64);
    assert_eq!(cells.iter().map(|c| c.area()).sum::<f64>(), 0.5);
    assert!(RefCell::new([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
}

/// (1/2) ∮ (x dy − y dx) along the three physical edges.
fn boundary_area(el: &CurvedTriangle) -> f64 {
    let g = GaussRule::new(30).unwrap();
    (0..3)
        .map(|e| {
            g.integrate(0.0, 1.0, |t| {
                let c = el.edge(e);
                let p = c.point(t);
                let d = c.tangent(t);
                0.5 * (p[0] * d[1] - p[1] * d[0])
            })
        })
        .sum()
}

#[test]
fn area_identity() {
    let rule = DuffyRule::new(20).unwrap();
    for el in [quarter_disk(1.0), quarter_disk(2.0), inner_arc_element()] {
        let a2d: f64 = rule.integrate(&RefCell::UNIT.vertices, |p| {
            det2(&el.jacobian(p[0], p[1]).unwrap())
        });
        let a1d = boundary_area(&el);
        assert!((a2d - a1d).abs() <= 1e-10 * a1d, "{a2d} {a1d}");
    }
    assert!((boundary_area(&quarter_disk(1.0)) - core::f64::consts::FRAC_PI_4).abs() < 1e-13);
}

fn unit_vertices() -> alloc::vec::Vec<Point2> {
    alloc::vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
}

#[test]
fn mesh_single_triangle() {
    let m = Mesh::from_records(
        &unit_vertices(),
        &[],
        &[TriangleRecord {
            vertices: [1, 2, 4],
            edges: [0, 0, 0],
        }],
    )
    .unwrap();
    assert_eq!(m.len(), 1);
    assert!(m.elements()[0].is_affine());
    assert_eq!(m.boundary_edges().len(), 3);
    assert!(m.adjacency().is_empty());
}

#[test]
fn mesh_adjacency() {
    let tris = [
        TriangleRecord {
            vertices: [1, 2, 3],
            edges: [0, 0, 0],
        },
        TriangleRecord {
            vertices: [1, 3, 4],
            edges: [0, 0, 0],
        },
    ];
    let m = Mesh::from_records(&unit_vertices(), &[], &tris).unwrap();
    assert_eq!(
        m.adjacency(),
        &[SharedEdge {
            first: (0, 2),
            second: (1, 0)
        }]
    );
    assert_eq!(m.boundary_edges().len(), 4);
}

#[test]
fn mesh_rejects_bad_curve_endpoint() {
    let bad = EdgeCurve::straight([0.0, 0.0], [1.0, 1e-3]);
    let err = Mesh::from_records(
        &unit_vertices(),
        &[(7, bad)],
        &[TriangleRecord {
            vertices: [1, 2, 4],
            edges: [7, 0, 0],
        }],
    )
    .unwrap_err();
    match err {
        Error::Geometry(msg) => assert!(msg.contains("curve 7"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn mesh_reversed_curve_reference() {
    // curve stored from vertex 2 to vertex 1, used by the triangle as 1 -> 2
    let c = EdgeCurve::fit(8, |t| [1.0 - t, -0.1 * t * (1.0 - t)]).unwrap();
    let m = Mesh::from_records(
        &unit_vertices(),
        &[(3, c)],
        &[TriangleRecord {
            vertices: [1, 2, 4],
            edges: [-3, 0, 0],
        }],
    )
    .unwrap();
    let p = m.elements()[0].edge(0).point(0.5);
    assert!(dist(p, [0.5, -0.025]) < 1e-14);
}

#[test]
fn mesh_rejects_clockwise_and_inverted() {
    assert!(Mesh::from_records(
        &unit_vertices(),
        &[],
        &[TriangleRecord {
            vertices: [1, 4, 2],
            edges: [0, 0, 0]
        }]
    )
    .is_err());
    // an edge bulging far past the opposite vertex folds the element
    let fold = EdgeCurve::fit(12, |t| [t, 3.0 * t * (1.0 - t) * 4.0]).unwrap();
    let err = Mesh::from_records(
        &unit_vertices(),
        &[(1, fold)],
        &[TriangleRecord {
            vertices: [1, 2, 4],
            edges: [1, 0, 0],
        }],
    )
    .unwrap_err();
    assert!(
        matches!(err, Error::InvalidElement { element: 0, .. }),
        "{err:?}"
    );
}

#[test]
fn mesh_from_elements() {
    let a = CurvedTriangle::straight([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
    let b = CurvedTriangle::straight([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let m = Mesh::new(alloc::vec![a, b]).unwrap();
    assert_eq!(m.adjacency().len(), 1);
}
