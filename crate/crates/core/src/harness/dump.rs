use std::fmt::Write as _;

use crate::mesh::{StaggeredMesh, Subdomain};
use crate::polybasis::Point;
use crate::spaces::FeSpace;

/// A discrete field to be written out.
#[derive(Debug, Clone, Copy)]
pub struct DumpField<'a> {
    pub name: &'a str,
    pub space: &'a FeSpace,
    pub coeffs: &'a [f64],
}

/// Points `v0 + (i/k)(v1 - v0) + (j/k)(v2 - v0)`, `i + j ≤ k`, `i` outer.
/// Degree 0 uses the centroid.
pub fn lattice_points(v: [Point; 3], degree: usize) -> Vec<Point> {
    if degree == 0 {
        return vec![[(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0]];
    }
    let k = degree as f64;
    let mut out = Vec::new();
    for i in 0..=degree {
        for j in 0..=degree - i {
            let (a, b) = (i as f64 / k, j as f64 / k);
            out.push([
                v[0][0] + a * (v[1][0] - v[0][0]) + b * (v[2][0] - v[0][0]),
                v[0][1] + a * (v[1][1] - v[0][1]) + b * (v[2][1] - v[0][1]),
            ]);
        }
    }
    out
}

fn corners(mesh: &StaggeredMesh, t: usize) -> [Point; 3] {
    mesh.tris[t].verts.map(|v| mesh.points[v])
}

/// Per-subtriangle ASCII dump. Each field is stored by its values on the
/// degree-`k` lattice of every subtriangle it lives on, which determines the
/// polynomial exactly.
pub fn write_field_dump(mesh: &StaggeredMesh, time: f64, fields: &[DumpField<'_>]) -> String {
    let mut s = String::from("field-dump v1\n");
    let _ = writeln!(s, "time {time:.9}");
    let _ = writeln!(s, "# lattice node (i, j), i outer: x = v0 + i/k (v1 - v0) + j/k (v2 - v0)");
    for f in fields {
        let degree = f.space.kind.poly_degree(f.space.k);
        let nc = f.space.components();
        let _ = writeln!(
            s,
            "field {} components {} degree {} subtriangles {}",
            f.name,
            nc,
            degree,
            f.space.tris.len()
        );
        for &t in &f.space.tris {
            let v = corners(mesh, t);
            let sub = match mesh.tris[t].subdomain {
                Subdomain::Brinkman => 'B',
                Subdomain::Darcy => 'D',
            };
            let _ = write!(s, "{t} {sub}");
            for p in v {
                let _ = write!(s, " {:.9} {:.9}", p[0], p[1]);
            }
            for x in lattice_points(v, degree) {
                let val = f.space.eval(mesh, t, f.coeffs, x);
                for c in val.iter().take(nc) {
                    let _ = write!(s, " {c:.12e}");
                }
            }
            s.push('\n');
        }
    }
    s
}

/// Finds the subtriangle containing a point using a bucket grid.
#[derive(Debug, Clone)]
pub struct Locator {
    origin: Point,
    cell: Point,
    n: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    pub fn new(mesh: &StaggeredMesh) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &mesh.points {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let side = (mesh.tris.len() as f64).sqrt().ceil().max(1.0) as usize;
        let n = [side, side];
        let cell = [((hi[0] - lo[0]) / side as f64).max(1e-300), ((hi[1] - lo[1]) / side as f64).max(1e-300)];
        let mut buckets = vec![Vec::new(); side * side];
        let idx = |v: f64, d: usize| (((v - lo[d]) / cell[d]).floor().max(0.0) as usize).min(n[d] - 1);
        for (t, tri) in mesh.tris.iter().enumerate() {
            let v = tri.verts.map(|i| mesh.points[i]);
            let (x0, x1) = (v.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min), v.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max));
            let (y0, y1) = (v.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min), v.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max));
            for i in idx(x0, 0)..=idx(x1, 0) {
                for j in idx(y0, 1)..=idx(y1, 1) {
                    buckets[j * n[0] + i].push(t);
                }
            }
        }
        Self { origin: lo, cell, n, buckets }
    }

    pub fn locate(&self, mesh: &StaggeredMesh, x: Point) -> Option<usize> {
        let mut ij = [0; 2];
        for d in 0..2 {
            let f = ((x[d] - self.origin[d]) / self.cell[d]).floor();
            if f < -1e-9 || f > self.n[d] as f64 + 1e-9 {
                return None;
            }
            ij[d] = (f.max(0.0) as usize).min(self.n[d] - 1);
        }
        self.buckets[ij[1] * self.n[0] + ij[0]]
            .iter()
            .copied()
            .find(|&t| mesh.tris[t].simplex.barycentric(x).iter().all(|&l| l >= -1e-12))
    }
}

/// Samples fields on an `nx × ny` grid of cell midpoints over the bounding
/// box; points outside a field's subdomain are written as `NA`.
pub fn sample_grid(mesh: &StaggeredMesh, fields: &[DumpField<'_>], nx: usize, ny: usize) -> String {
    let loc = Locator::new(mesh);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &mesh.points {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let mut s = String::from("x,y");
    for f in fields {
        let nc = f.space.components();
        if nc == 1 {
            let _ = write!(s, ",{}", f.name);
        } else {
            for c in 0..nc {
                let _ = write!(s, ",{}_{}", f.name, c);
            }
        }
    }
    s.push('\n');
    for j in 0..ny {
        for i in 0..nx {
            let x = [
                lo[0] + (i as f64 + 0.5) * (hi[0] - lo[0]) / nx as f64,
                lo[1] + (j as f64 + 0.5) * (hi[1] - lo[1]) / ny as f64,
            ];
            let _ = write!(s, "{:.6},{:.6}", x[0], x[1]);
            let t = loc.locate(mesh, x);
            for f in fields {
                let nc = f.space.components();
                match t.filter(|&t| f.space.contains(t)) {
                    Some(t) => {
                        let v = f.space.eval(mesh, t, f.coeffs, x);
                        for c in v.iter().take(nc) {
                            let _ = write!(s, ",{c:.9e}");
                        }
                    }
                    None => {
                        for _ in 0..nc {
                            s.push_str(",NA");
                        }
                    }
                }
            }
            s.push('\n');
        }
    }
    s
}
