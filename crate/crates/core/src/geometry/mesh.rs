use alloc::format;
use alloc::vec::Vec;

use super::{dist, signed_area, CurvedTriangle, EdgeCurve, Point2, EDGE_VERTS};
use crate::error::{Error, Result};
use crate::simplex;

/// Degree of the node set used to validate Jacobians at load time.
const VALIDATION_DEGREE: usize = 12;

/// Two element edges traversing the same physical curve in opposite directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedEdge {
    pub first: (usize, usize),
    pub second: (usize, usize),
}

/// One triangle as it appears in an indexed mesh description.
///
/// Vertex ids are 1-based. Edge entries are curve ids, `0` for a straight
/// edge, or a negated id to traverse the curve from `t = 1` to `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleRecord {
    pub vertices: [usize; 3],
    pub edges: [i64; 3],
}

/// Immutable collection of validated curved triangles.
#[derive(Debug, Clone)]
pub struct Mesh {
    elements: Vec<CurvedTriangle>,
    vertex_ids: Vec<[usize; 3]>,
    adjacency: Vec<SharedEdge>,
    boundary: Vec<(usize, usize)>,
}

impl Mesh {
    /// Builds a mesh from an indexed description, validating every element.
    pub fn from_records(
        vertices: &[Point2],
        curves: &[(i64, EdgeCurve)],
        triangles: &[TriangleRecord],
    ) -> Result<Mesh> {
        let mut elements = Vec::with_capacity(triangles.len());
        let mut vertex_ids = Vec::with_capacity(triangles.len());
        for (ti, tri) in triangles.iter().enumerate() {
            let mut pts = [[0.0; 2]; 3];
            for (k, &id) in tri.vertices.iter().enumerate() {
                if id == 0 || id > vertices.len() {
                    return Err(Error::Geometry(format!(
                        "triangle {}: vertex id {id} out of range",
                        ti + 1
                    )));
                }
                pts[k] = vertices[id - 1];
            }
            let mut edges = Vec::with_capacity(3);
            for (e, &(a, b)) in EDGE_VERTS.iter().enumerate() {
                let id = tri.edges[e];
                let curve = if id == 0 {
                    EdgeCurve::straight(pts[a], pts[b])
                } else {
                    let found =
                        curves
                            .iter()
                            .find(|(cid, _)| *cid == id.abs())
                            .ok_or_else(|| {
                                Error::Geometry(format!(
                                    "triangle {}: unknown curve id {}",
                                    ti + 1,
                                    id.abs()
                                ))
                            })?;
                    let c = if id > 0 {
                        found.1.clone()
                    } else {
                        found.1.reversed()
                    };
                    let mismatch = dist(c.start(), pts[a]).max(dist(c.end(), pts[b]));
                    if mismatch > 1e-9 {
                        return Err(Error::Geometry(format!(
                            "curve {} endpoints miss vertices {} and {} of triangle {} by {mismatch:e}",
                            id.abs(),
                            tri.vertices[a],
                            tri.vertices[b],
                            ti + 1
                        )));
                    }
                    c
                };
                edges.push(curve);
            }
            let edges: [EdgeCurve; 3] = edges
                .try_into()
                .map_err(|_| Error::Contract("three edges".into()))?;
            let el = CurvedTriangle::new(pts, edges)
                .map_err(|e| Error::Geometry(format!("triangle {}: {e}", ti + 1)))?;
            elements.push(el);
            vertex_ids.push(tri.vertices);
        }
        Self::assemble(elements, vertex_ids)
    }

    /// Builds a mesh from elements, identifying vertices by coordinates.
    pub fn new(elements: Vec<CurvedTriangle>) -> Result<Mesh> {
        let mut unique: Vec<Point2> = Vec::new();
        let mut vertex_ids = Vec::with_capacity(elements.len());
        for el in &elements {
            let mut ids = [0usize; 3];
            for (k, &p) in el.vertices().iter().enumerate() {
                ids[k] = match unique.iter().position(|&q| dist(p, q) <= 1e-12) {
                    Some(i) => i + 1,
                    None => {
                        unique.push(p);
                        unique.len()
                    }
                };
            }
            vertex_ids.push(ids);
        }
        Self::assemble(elements, vertex_ids)
    }

    fn assemble(elements: Vec<CurvedTriangle>, vertex_ids: Vec<[usize; 3]>) -> Result<Mesh> {
        if elements.is_empty() {
            return Err(Error::Geometry("mesh has no elements".into()));
        }
        let nodes = simplex::nodes_on(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], VALIDATION_DEGREE);
        for (i, el) in elements.iter().enumerate() {
            for p in &nodes {
                el.jacobian_det(i, p[0], p[1])?;
            }
            for e in 0..3 {
                for k in 0..=10 {
                    el.edge_trace(e, k as f64 / 10.0).map_err(|_| Error::Cusp {
                        element: i,
                        edge: e,
                        t: k as f64 / 10.0,
                    })?;
                }
            }
        }

        // match edges by unordered vertex id pairs
        let mut keyed: Vec<((usize, usize), usize, usize)> = Vec::with_capacity(3 * elements.len());
        for (i, ids) in vertex_ids.iter().enumerate() {
            for (e, &(a, b)) in EDGE_VERTS.iter().enumerate() {
                let (p, q) = (ids[a], ids[b]);
                keyed.push(((p.min(q), p.max(q)), i, e));
            }
        }
        keyed.sort();
        let mut adjacency = Vec::new();
        let mut boundary = Vec::new();
        let mut k = 0;
        while k < keyed.len() {
            let mut run = k + 1;
            while run < keyed.len() && keyed[run].0 == keyed[k].0 {
                run += 1;
            }
            match run - k {
                1 => boundary.push((keyed[k].1, keyed[k].2)),
                2 => {
                    let first = (keyed[k].1, keyed[k].2);
                    let second = (keyed[k + 1].1, keyed[k + 1].2);
                    check_coincident(&elements, first, second)?;
                    adjacency.push(SharedEdge { first, second });
                }
                _ => {
                    return Err(Error::Geometry(format!(
                        "edge between vertices {} and {} is shared by {} elements",
                        keyed[k].0 .0,
                        keyed[k].0 .1,
                        run - k
                    )))
                }
            }
            k = run;
        }
        boundary.sort();
        check_centroids(&elements)?;
        Ok(Mesh {
            elements,
            vertex_ids,
            adjacency,
            boundary,
        })
    }

    pub fn elements(&self) -> &[CurvedTriangle] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn vertex_ids(&self) -> &[[usize; 3]] {
        &self.vertex_ids
    }

    pub fn adjacency(&self) -> &[SharedEdge] {
        &self.adjacency
    }

    /// Smallest distance from `p` to the mesh, sampled at the validation nodes.
    pub fn min_distance_to(&self, p: Point2) -> f64 {
        let nodes = simplex::nodes_on(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], VALIDATION_DEGREE);
        let mut rmin = f64::INFINITY;
        for el in &self.elements {
            for q in &nodes {
                rmin = rmin.min(dist(el.map_unchecked(q[0], q[1]), p));
            }
        }
        rmin
    }

    /// `(element, edge)` pairs on the outer boundary, sorted.
    pub fn boundary_edges(&self) -> &[(usize, usize)] {
        &self.boundary
    }
}

fn check_coincident(
    elements: &[CurvedTriangle],
    a: (usize, usize),
    b: (usize, usize),
) -> Result<()> {
    let ca = elements[a.0].edge(a.1);
    let cb = elements[b.0].edge(b.1);
    for k in 0..10 {
        let t = k as f64 / 9.0;
        let gap = dist(ca.point(t), cb.point(1.0 - t));
        if gap > 1e-10 {
            return Err(Error::Geometry(format!(
                "shared edge of elements {} and {} does not coincide (gap {gap:e} at t = {t})",
                a.0, b.0
            )));
        }
    }
    Ok(())
}

/// Flags elements whose centroid lies well inside another element's vertex triangle.
fn check_centroids(elements: &[CurvedTriangle]) -> Result<()> {
    if elements.len() > 5000 {
        return Ok(());
    }
    let centroids: Vec<Point2> = elements
        .iter()
        .map(|e| e.map_unchecked(1.0 / 3.0, 1.0 / 3.0))
        .collect();
    for (i, &c) in centroids.iter().enumerate() {
        for (j, other) in elements.iter().enumerate() {
            if i == j {
                continue;
            }
            let v = other.vertices();
            let area = signed_area(v);
            let l = [
                signed_area(&[c, v[1], v[2]]) / area,
                signed_area(&[v[0], c, v[2]]) / area,
                signed_area(&[v[0], v[1], c]) / area,
            ];
            if l.iter().all(|&x| x > 0.1) {
                return Err(Error::Geometry(format!("elements {i} and {j} overlap")));
            }
        }
    }
    Ok(())
}
