//! Plain-text mesh format.
//!
//! ```text
//! MESHTRI 1
//! vertices 3
//! 0 0
//! 1 0
//! 0 1
//! curves 1
//! 7 3            # id, coefficient count
//! 0.5 0.5 0      # x coefficients (Chebyshev, t in [0, 1])
//! -0.05 0 0.05   # y coefficients
//! triangles 1
//! 1 2 3 7 0 0    # vertex ids, then edge curve ids (0 straight, -id reversed)
//! ```
//!
//! Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use oscquad_core::geometry::{EdgeCurve, Mesh, Point2, TriangleRecord};

#[derive(Debug, thiserror::Error)]
pub enum MeshIoError {
    #[error("cannot read mesh file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] oscquad_core::Error),
}

/// Indexed mesh description as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshFile {
    pub vertices: Vec<Point2>,
    pub curves: Vec<(i64, EdgeCurve)>,
    pub triangles: Vec<TriangleRecord>,
}

impl MeshFile {
    pub fn build(&self) -> Result<Mesh, oscquad_core::Error> {
        Mesh::from_records(&self.vertices, &self.curves, &self.triangles)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("MESHTRI 1\n");
        let _ = writeln!(s, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:e} {:e}", v[0], v[1]);
        }
        let _ = writeln!(s, "curves {}", self.curves.len());
        for (id, c) in &self.curves {
            let cx = c.x().coefficients();
            let cy = c.y().coefficients();
            let n = cx.len().max(cy.len());
            let _ = writeln!(s, "{id} {n}");
            for coeffs in [cx, cy] {
                let row: Vec<String> = (0..n)
                    .map(|i| format!("{:e}", coeffs.get(i).copied().unwrap_or(0.0)))
                    .collect();
                let _ = writeln!(s, "{}", row.join(" "));
            }
        }
        let _ = writeln!(s, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(
                s,
                "{} {} {} {} {} {}",
                t.vertices[0], t.vertices[1], t.vertices[2], t.edges[0], t.edges[1], t.edges[2]
            );
        }
        s
    }

    pub fn parse(text: &str) -> Result<MeshFile, MeshIoError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| MeshIoError::Parse {
                line: text.lines().count() + 1,
                message: format!("unexpected end of file, expected {what}"),
            })
        };

        let (ln, header) = next("header")?;
        if header.split_whitespace().collect::<Vec<_>>() != ["MESHTRI", "1"] {
            return Err(perr(
                ln,
                format!("expected header 'MESHTRI 1', found '{header}'"),
            ));
        }

        let nv = section(next("vertices section")?, "vertices")?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = next("vertex coordinates")?;
            let v: Vec<f64> = numbers(ln, l)?;
            if v.len() != 2 {
                return Err(perr(
                    ln,
                    format!("vertex needs 2 coordinates, found {}", v.len()),
                ));
            }
            vertices.push([v[0], v[1]]);
        }

        let nc = section(next("curves section")?, "curves")?;
        let mut curves: Vec<(i64, EdgeCurve)> = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (ln, l) = next("curve header")?;
            let h: Vec<i64> = numbers(ln, l)?;
            if h.len() != 2 || h[0] <= 0 || h[1] <= 0 {
                return Err(perr(
                    ln,
                    "curve header needs a positive id and a positive coefficient count".into(),
                ));
            }
            if curves.iter().any(|(id, _)| *id == h[0]) {
                return Err(perr(ln, format!("duplicate curve id {}", h[0])));
            }
            let mut xy = Vec::with_capacity(2);
            for axis in ["x", "y"] {
                let (ln, l) = next("curve coefficients")?;
                let c: Vec<f64> = numbers(ln, l)?;
                if c.len() != h[1] as usize {
                    return Err(perr(
                        ln,
                        format!(
                            "curve {} needs {} {axis} coefficients, found {}",
                            h[0],
                            h[1],
                            c.len()
                        ),
                    ));
                }
                xy.push((ln, c));
            }
            let (cy_line, cy) = xy.pop().unwrap();
            let (_, cx) = xy.pop().unwrap();
            let curve = EdgeCurve::from_coefficients(cx, cy)
                .map_err(|e| perr(cy_line, format!("curve {}: {e}", h[0])))?;
            curves.push((h[0], curve));
        }

        let nt = section(next("triangles section")?, "triangles")?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = next("triangle")?;
            let t: Vec<i64> = numbers(ln, l)?;
            if t.len() != 6 {
                return Err(perr(
                    ln,
                    format!(
                        "triangle needs 3 vertex ids and 3 edge ids, found {} fields",
                        t.len()
                    ),
                ));
            }
            for &id in &t[..3] {
                if id < 1 || id as usize > vertices.len() {
                    return Err(perr(
                        ln,
                        format!("vertex id {id} out of range 1..={}", vertices.len()),
                    ));
                }
            }
            for &id in &t[3..] {
                if id != 0 && !curves.iter().any(|(c, _)| *c == id.abs()) {
                    return Err(perr(ln, format!("unknown curve id {}", id.abs())));
                }
            }
            triangles.push(TriangleRecord {
                vertices: [t[0] as usize, t[1] as usize, t[2] as usize],
                edges: [t[3], t[4], t[5]],
            });
        }
        if let Ok((ln, l)) = next("") {
            return Err(perr(ln, format!("unexpected trailing content '{l}'")));
        }
        Ok(MeshFile {
            vertices,
            curves,
            triangles,
        })
    }
}

fn perr(line: usize, message: String) -> MeshIoError {
    MeshIoError::Parse { line, message }
}

fn section((ln, l): (usize, &str), name: &str) -> Result<usize, MeshIoError> {
    let mut it = l.split_whitespace();
    match (it.next(), it.next().map(str::parse::<usize>), it.next()) {
        (Some(k), Some(Ok(n)), None) if k == name => Ok(n),
        _ => Err(perr(ln, format!("expected '{name} <count>', found '{l}'"))),
    }
}

fn numbers<T: std::str::FromStr>(ln: usize, l: &str) -> Result<Vec<T>, MeshIoError> {
    l.split_whitespace()
        .map(|w| {
            w.parse::<T>()
                .map_err(|_| perr(ln, format!("cannot parse number '{w}'")))
        })
        .collect()
}

/// Reads and validates a mesh file.
pub fn load_mesh(path: &Path) -> Result<Mesh, MeshIoError> {
    let text = fs::read_to_string(path).map_err(|source| MeshIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(MeshFile::parse(&text)?.build()?)
}
