//! Fixed triangulation of the unit disk.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector2;

use crate::error::{Error, Result};

/// Tolerance on `| |v| - 1 |` for boundary vertices.
pub const BOUNDARY_RADIUS_TOL: f64 = 1e-12;

/// Quasi-uniform triangulation `B_h` of the unit disk whose boundary vertices lie
/// on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskMesh {
    vertices: Vec<Vector2<f64>>,
    triangles: Vec<[usize; 3]>,
    /// Boundary vertices in counterclockwise order; edge `k` joins entries `k` and `k + 1`.
    boundary_loop: Vec<usize>,
    /// Triangle owning boundary edge `k`.
    boundary_triangles: Vec<usize>,
    interior_index: Vec<Option<usize>>,
    n_interior: usize,
}

impl DiskMesh {
    /// Builds a mesh and checks every invariant: counterclockwise triangles,
    /// a single boundary cycle, boundary vertices on the unit circle, and
    /// Euler characteristic one.
    pub fn new(vertices: Vec<Vector2<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&v| v >= nv) {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("triangle {t} references vertex {bad}, only {nv} vertices"),
                });
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("triangle {t} repeats a vertex"),
                });
            }
            let area = signed_area(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(Error::Orientation { triangle: t, area });
            }
        }

        // edge -> (count, owning triangle, oriented as it appears in that triangle)
        let mut edges: HashMap<(usize, usize), (usize, usize, (usize, usize))> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let entry = edges.entry(key).or_insert((0, t, (a, b)));
                entry.0 += 1;
            }
        }
        let n_edges = edges.len();
        let chi = nv as i64 - n_edges as i64 + triangles.len() as i64;
        if chi != 1 {
            return Err(Error::Euler {
                chi,
                vertices: nv,
                edges: n_edges,
                triangles: triangles.len(),
            });
        }
        if let Some((key, _)) = edges.iter().find(|(_, e)| e.0 > 2) {
            return Err(Error::BoundaryLoop(format!(
                "edge {key:?} is shared by more than two triangles"
            )));
        }

        // Boundary edges inherit the counterclockwise orientation of their triangle.
        let mut next: HashMap<usize, (usize, usize)> = HashMap::new();
        for &(count, t, (a, b)) in edges.values() {
            if count == 1 && next.insert(a, (b, t)).is_some() {
                return Err(Error::BoundaryLoop(format!("vertex {a} starts two boundary edges")));
            }
        }
        if next.is_empty() {
            return Err(Error::BoundaryLoop("mesh has no boundary".into()));
        }
        let start = *next.keys().min().expect("nonempty");
        let mut boundary_loop = vec![start];
        let mut boundary_triangles = Vec::with_capacity(next.len());
        let mut current = start;
        loop {
            let (b, t) = *next
                .get(&current)
                .ok_or_else(|| Error::BoundaryLoop(format!("boundary chain breaks at vertex {current}")))?;
            boundary_triangles.push(t);
            if b == start {
                break;
            }
            if boundary_loop.len() > next.len() {
                return Err(Error::BoundaryLoop("boundary chain does not close".into()));
            }
            boundary_loop.push(b);
            current = b;
        }
        if boundary_loop.len() != next.len() {
            return Err(Error::BoundaryLoop(format!(
                "boundary has {} edges but the loop through vertex {start} covers {}",
                next.len(),
                boundary_loop.len()
            )));
        }

        let mut interior_index = vec![None; nv];
        for &v in &boundary_loop {
            let radius = vertices[v].norm();
            if (radius - 1.0).abs() > BOUNDARY_RADIUS_TOL {
                return Err(Error::BoundaryRadius { vertex: v, radius });
            }
        }
        let mut is_boundary = vec![false; nv];
        for &v in &boundary_loop {
            is_boundary[v] = true;
        }
        let mut n_interior = 0;
        for (v, slot) in interior_index.iter_mut().enumerate() {
            if !is_boundary[v] {
                *slot = Some(n_interior);
                n_interior += 1;
            }
        }

        Ok(Self {
            vertices,
            triangles,
            boundary_loop,
            boundary_triangles,
            interior_index,
            n_interior,
        })
    }

    pub fn vertices(&self) -> &[Vector2<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_loop(&self) -> &[usize] {
        &self.boundary_loop
    }

    /// Boundary edges as `(start, end, owning triangle)` in counterclockwise order.
    pub fn boundary_edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.boundary_loop.len();
        (0..n).map(move |k| {
            (
                self.boundary_loop[k],
                self.boundary_loop[(k + 1) % n],
                self.boundary_triangles[k],
            )
        })
    }

    /// Unknown index of a vertex, `None` on the boundary.
    pub fn interior_index(&self, vertex: usize) -> Option<usize> {
        self.interior_index[vertex]
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(&self.vertices[a], &self.vertices[b], &self.vertices[c])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn n_edges(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                seen.insert((a.min(b), a.max(b)));
            }
        }
        seen.len()
    }

    /// Longest edge of a triangle.
    pub fn triangle_diameter(&self, t: usize) -> f64 {
        let tri = self.triangles[t];
        (0..3)
            .map(|k| (self.vertices[tri[k]] - self.vertices[tri[(k + 1) % 3]]).norm())
            .fold(0.0, f64::max)
    }

    /// Text format: `V T`, then `V` lines `x y`, then `T` lines `i j k`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {}", self.vertices.len(), self.triangles.len()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{:.16e} {:.16e}", v.x, v.y).unwrap();
        }
        for t in &self.triangles {
            writeln!(s, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty mesh file".into(),
        })?;
        let counts: Vec<usize> = parse_fields(line, header)?;
        let [nv, nt] = counts[..] else {
            return Err(Error::Parse {
                line,
                message: format!("expected `V T`, found `{header}`"),
            });
        };
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (line, l) = lines.next().ok_or(Error::Parse {
                line: 0,
                message: format!("expected {nv} vertex lines"),
            })?;
            let xy: Vec<f64> = parse_fields(line, l)?;
            let [x, y] = xy[..] else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `x y`, found `{l}`"),
                });
            };
            vertices.push(Vector2::new(x, y));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (line, l) = lines.next().ok_or(Error::Parse {
                line: 0,
                message: format!("expected {nt} triangle lines"),
            })?;
            let ijk: Vec<usize> = parse_fields(line, l)?;
            let [i, j, k] = ijk[..] else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `i j k`, found `{l}`"),
                });
            };
            triangles.push([i, j, k]);
        }
        if let Some((line, l)) = lines.next() {
            return Err(Error::Parse {
                line,
                message: format!("trailing content `{l}`"),
            });
        }
        Self::new(vertices, triangles)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

fn parse_fields<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<T>().map_err(|_| Error::Parse {
                line,
                message: format!("cannot parse `{tok}`"),
            })
        })
        .collect()
}

pub fn signed_area(a: &Vector2<f64>, b: &Vector2<f64>, c: &Vector2<f64>) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))
}

/// Concentric-ring mesh: ring `k` carries `6k` equally spaced vertices at radius
/// `k / level`, and neighbouring rings are zipped together by angle. Gives
/// `1 + 3 level (level + 1)` vertices and `6 level²` triangles. Level 0 is
/// treated as level 1.
pub fn generate_disk_mesh(level: usize) -> DiskMesh {
    let level = level.max(1);
    let mut vertices = vec![Vector2::zeros()];
    let mut ring_start = vec![0usize];
    for k in 1..=level {
        ring_start.push(vertices.len());
        let n = 6 * k;
        let r = k as f64 / level as f64;
        for m in 0..n {
            let theta = std::f64::consts::TAU * m as f64 / n as f64;
            let v = if k == level {
                Vector2::new(theta.cos(), theta.sin())
            } else {
                Vector2::new(r * theta.cos(), r * theta.sin())
            };
            vertices.push(v);
        }
    }

    let mut triangles = Vec::with_capacity(6 * level * level);
    for m in 0..6 {
        triangles.push([0, 1 + m, 1 + (m + 1) % 6]);
    }
    for k in 2..=level {
        let (n_in, n_out) = (6 * (k - 1), 6 * k);
        let (s_in, s_out) = (ring_start[k - 1], ring_start[k]);
        let inner = |i: usize| s_in + i % n_in;
        let outer = |j: usize| s_out + j % n_out;
        let (mut i, mut j) = (0usize, 0usize);
        while i < n_in || j < n_out {
            // compare angles (i+1)/n_in and (j+1)/n_out exactly; ties advance the outer ring
            let advance_outer = j < n_out && (i == n_in || (j + 1) * n_in <= (i + 1) * n_out);
            if advance_outer {
                triangles.push([inner(i), outer(j), outer(j + 1)]);
                j += 1;
            } else {
                triangles.push([inner(i), outer(j), inner(i + 1)]);
                i += 1;
            }
        }
    }
    DiskMesh::new(vertices, triangles).expect("ring mesh satisfies all invariants")
}
