//! Built-in test domains.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use oscquad_core::geometry::{EdgeCurve, TriangleRecord};

use crate::meshio::MeshFile;

/// Chebyshev coefficients used for circular arcs.
pub const ARC_COEFFICIENTS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// The triangle (0,0), (1,0), (0,1).
    RefTri,
    /// The unit square split along its diagonal.
    UnitSquare,
    /// Annular sector `1 ≤ r ≤ 2`, `π/12 ≤ θ ≤ 5π/12`, four curved triangles.
    Resonance,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::RefTri, Domain::UnitSquare, Domain::Resonance];

    pub fn name(self) -> &'static str {
        match self {
            Domain::RefTri => "reftri",
            Domain::UnitSquare => "unitsquare",
            Domain::Resonance => "resonance",
        }
    }

    pub fn mesh_file(self) -> MeshFile {
        match self {
            Domain::RefTri => MeshFile {
                vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
                curves: vec![],
                triangles: vec![TriangleRecord {
                    vertices: [1, 2, 3],
                    edges: [0; 3],
                }],
            },
            Domain::UnitSquare => MeshFile {
                vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
                curves: vec![],
                triangles: vec![
                    TriangleRecord {
                        vertices: [1, 2, 3],
                        edges: [0; 3],
                    },
                    TriangleRecord {
                        vertices: [1, 3, 4],
                        edges: [0; 3],
                    },
                ],
            },
            Domain::Resonance => resonance(),
        }
    }

    /// Exact area.
    pub fn area(self) -> f64 {
        match self {
            Domain::RefTri => 0.5,
            Domain::UnitSquare => 1.0,
            Domain::Resonance => 0.5 * PI,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Domain::ALL
            .iter()
            .copied()
            .find(|d| d.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Domain::ALL.iter().map(|d| d.name()).collect();
                format!("unknown domain '{s}'; available: {}", names.join(", "))
            })
    }
}

fn polar(r: f64, a: f64) -> [f64; 2] {
    [r * a.cos(), r * a.sin()]
}

fn arc(r: f64, a0: f64, a1: f64) -> EdgeCurve {
    EdgeCurve::fit(ARC_COEFFICIENTS, |t| polar(r, a0 + (a1 - a0) * t)).expect("arc fit")
}

fn resonance() -> MeshFile {
    let (a0, am, a1) = (PI / 12.0, PI / 4.0, 5.0 * PI / 12.0);
    // 1 A, 2 E, 3 B on the inner arc; 4 D, 5 F, 6 C on the outer arc
    let vertices = vec![
        polar(1.0, a0),
        polar(1.0, am),
        polar(1.0, a1),
        polar(2.0, a0),
        polar(2.0, am),
        polar(2.0, a1),
    ];
    let curves = vec![
        (1, arc(1.0, a0, am)),
        (2, arc(1.0, am, a1)),
        (3, arc(2.0, a0, am)),
        (4, arc(2.0, am, a1)),
    ];
    let triangles = vec![
        TriangleRecord {
            vertices: [2, 1, 4],
            edges: [-1, 0, 0],
        },
        TriangleRecord {
            vertices: [3, 2, 5],
            edges: [-2, 0, 0],
        },
        TriangleRecord {
            vertices: [4, 5, 2],
            edges: [3, 0, 0],
        },
        TriangleRecord {
            vertices: [5, 6, 3],
            edges: [4, 0, 0],
        },
    ];
    MeshFile {
        vertices,
        curves,
        triangles,
    }
}
