use std::collections::BTreeMap;

use super::primal::{edge_key, BoundaryTag, PrimalMesh, Subdomain};
use crate::polybasis::{dist, Point, Simplex};

/// Edge taxonomy of the dual subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    /// Primal edge shared by two cells of one subdomain.
    PrimalInterior,
    /// Primal edge on `∂Ω` (tag `GB` or `GD`).
    PrimalBoundary,
    /// Primal edge on `Γ`.
    Interface,
    /// Segment from a cell center to one of its corners.
    Dual,
}

impl EdgeClass {
    pub fn is_primal(self) -> bool {
        !matches!(self, EdgeClass::Dual)
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    /// Sorted global vertex indices; vertex ids at and beyond the primal
    /// vertex count denote cell centers.
    pub verts: [usize; 2],
    pub class: EdgeClass,
    /// `None` for interface edges.
    pub subdomain: Option<Subdomain>,
    /// Unit normal, pointing out of `tris[0]`.
    pub normal: Point,
    /// `(-n_y, n_x)`.
    pub tangent: Point,
    pub length: f64,
    pub midpoint: Point,
    /// Adjacent subtriangles; ascending ids, except that on the interface
    /// the Brinkman side comes first.
    pub tris: Vec<usize>,
    /// Primal edges only: the boundary tag, if any.
    pub tag: Option<BoundaryTag>,
}

impl Edge {
    /// Point at `s ∈ [-1, 1]`, running from `verts[0]` to `verts[1]`.
    pub fn point(&self, mesh: &StaggeredMesh, s: f64) -> Point {
        let a = mesh.points[self.verts[0]];
        let b = mesh.points[self.verts[1]];
        let t = 0.5 * (1.0 + s);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    pub fn is_boundary(&self) -> bool {
        self.class == EdgeClass::PrimalBoundary
    }
}

/// One of the triangles `(a, b, ν)` obtained by joining a cell center to the
/// cell corners.
#[derive(Debug, Clone)]
pub struct SubTriangle {
    /// Counter-clockwise; `(verts[0], verts[1])` is the primal edge and
    /// `verts[2]` the cell center.
    pub verts: [usize; 3],
    pub parent: usize,
    pub subdomain: Subdomain,
    /// `[primal (v0,v1), dual (v1,ν), dual (ν,v0)]`.
    pub edges: [usize; 3],
    /// `+1` where the stored edge normal is outward for this triangle.
    pub signs: [f64; 3],
    pub simplex: Simplex,
}

impl SubTriangle {
    pub fn area(&self) -> f64 {
        self.simplex.area()
    }

    pub fn primal_edge(&self) -> usize {
        self.edges[0]
    }

    pub fn outward_normal(&self, mesh: &StaggeredMesh, local: usize) -> Point {
        let n = mesh.edges[self.edges[local]].normal;
        [self.signs[local] * n[0], self.signs[local] * n[1]]
    }
}

/// Dual subdivision of a [`PrimalMesh`] with classified edges.
#[derive(Debug, Clone)]
pub struct StaggeredMesh {
    pub primal: PrimalMesh,
    /// Primal vertices followed by one center per primal cell.
    pub points: Vec<Point>,
    pub tris: Vec<SubTriangle>,
    pub edges: Vec<Edge>,
    /// Interior point `ν` of every primal cell.
    pub centers: Vec<Point>,
    /// Largest subtriangle diameter.
    pub h: f64,
}

/// Splits every primal cell at its center.
pub fn subdivide(primal: &PrimalMesh) -> StaggeredMesh {
    let nv = primal.vertices.len();
    let centers: Vec<Point> = (0..primal.cells.len()).map(|c| primal.cell_center(c)).collect();
    let mut points = primal.vertices.clone();
    points.extend(centers.iter().copied());

    let mut tris = Vec::new();
    let mut edge_tris: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (c, cell) in primal.cells.iter().enumerate() {
        let n = cell.verts.len();
        let nu = nv + c;
        for i in 0..n {
            let (a, b) = (cell.verts[i], cell.verts[(i + 1) % n]);
            let id = tris.len();
            for k in [edge_key(a, b), edge_key(b, nu), edge_key(nu, a)] {
                edge_tris.entry(k).or_default().push(id);
            }
            tris.push(SubTriangle {
                verts: [a, b, nu],
                parent: c,
                subdomain: cell.subdomain,
                edges: [0; 3],
                signs: [1.0; 3],
                simplex: Simplex::new([points[a], points[b], points[nu]]),
            });
        }
    }

    let mut edges = Vec::with_capacity(edge_tris.len());
    let mut index = BTreeMap::new();
    for (key, mut adj) in edge_tris {
        let (a, b) = key;
        let dual = b >= nv;
        let tag = if dual { None } else { primal.boundary.get(&key).copied() };
        let class = match (dual, tag) {
            (true, _) => EdgeClass::Dual,
            (false, Some(BoundaryTag::Interface)) => EdgeClass::Interface,
            (false, Some(_)) => EdgeClass::PrimalBoundary,
            (false, None) => EdgeClass::PrimalInterior,
        };
        adj.sort_unstable();
        if class == EdgeClass::Interface && tris[adj[0]].subdomain != Subdomain::Brinkman {
            adj.swap(0, 1);
        }
        let (pa, pb) = (points[a], points[b]);
        let length = dist(pa, pb);
        let d = [(pb[0] - pa[0]) / length, (pb[1] - pa[1]) / length];
        let mut normal = [d[1], -d[0]];
        // orient outward from tris[0]
        let t0 = &tris[adj[0]];
        let c0 = t0.simplex.centroid();
        let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        if normal[0] * (mid[0] - c0[0]) + normal[1] * (mid[1] - c0[1]) < 0.0 {
            normal = [-normal[0], -normal[1]];
        }
        let subdomain = match class {
            EdgeClass::Interface => None,
            _ => Some(t0.subdomain),
        };
        index.insert(key, edges.len());
        edges.push(Edge {
            verts: [a, b],
            class,
            subdomain,
            normal,
            tangent: [-normal[1], normal[0]],
            length,
            midpoint: mid,
            tris: adj,
            tag,
        });
    }

    for (id, t) in tris.iter_mut().enumerate() {
        let [a, b, nu] = t.verts;
        t.edges = [index[&edge_key(a, b)], index[&edge_key(b, nu)], index[&edge_key(nu, a)]];
        for l in 0..3 {
            t.signs[l] = if edges[t.edges[l]].tris[0] == id { 1.0 } else { -1.0 };
        }
    }

    let h = tris.iter().map(|t| t.simplex.diameter()).fold(0.0, f64::max);
    StaggeredMesh {
        primal: primal.clone(),
        points,
        tris,
        edges,
        centers,
        h,
    }
}

impl StaggeredMesh {
    pub fn edges_of_class(&self, class: EdgeClass) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.class == class)
            .map(|(i, _)| i)
    }

    /// `D(e)`: the union of subtriangles adjacent to edge `e`.
    pub fn patch(&self, e: usize) -> &[usize] {
        &self.edges[e].tris
    }

    pub fn subdomain_area(&self, sub: Subdomain) -> f64 {
        self.tris
            .iter()
            .filter(|t| t.subdomain == sub)
            .map(|t| t.area())
            .sum()
    }

    /// Subtriangles of one subdomain, in id order.
    pub fn tris_in(&self, sub: Subdomain) -> impl Iterator<Item = usize> + '_ {
        self.tris
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.subdomain == sub)
            .map(|(i, _)| i)
    }

    /// Subtriangle containing `x`, if any.
    pub fn locate(&self, x: Point) -> Option<usize> {
        self.tris.iter().position(|t| {
            let l = t.simplex.barycentric(x);
            l.iter().all(|&v| v >= -1e-12)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rectangular_primal, CellKind, PrimalCell, Rect};

    fn ex1(nx: usize, ny: usize, kind: CellKind) -> StaggeredMesh {
        let m = build_rectangular_primal(
            Rect::new(0.0, 0.5, 0.0, 1.0),
            Rect::new(0.5, 1.0, 0.0, 1.0),
            nx,
            ny,
            kind,
        )
        .unwrap();
        subdivide(&m)
    }

    #[test]
    fn single_triangle() {
        let p = PrimalMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![PrimalCell {
                verts: vec![0, 1, 2],
                subdomain: Subdomain::Brinkman,
            }],
            [(0, 1), (1, 2), (0, 2)]
                .into_iter()
                .map(|k| (k, BoundaryTag::Brinkman))
                .collect(),
        )
        .unwrap();
        let s = subdivide(&p);
        assert_eq!(s.tris.len(), 3);
        assert_eq!(s.edges_of_class(EdgeClass::Dual).count(), 3);
        assert_eq!(s.edges_of_class(EdgeClass::PrimalBoundary).count(), 3);
        assert_eq!(s.centers[0], [1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn quad_counts_and_area() {
        let s = ex1(2, 2, CellKind::Quad);
        let nb = s.tris_in(Subdomain::Brinkman).count();
        assert_eq!(nb, 16);
        let dual_b = s
            .edges
            .iter()
            .filter(|e| e.class == EdgeClass::Dual && e.subdomain == Some(Subdomain::Brinkman))
            .count();
        assert_eq!(dual_b, 16);
        assert!((s.subdomain_area(Subdomain::Brinkman) - 0.5).abs() < 1e-14);
        assert_eq!(s.centers[0], [0.125, 0.25]);
    }

    #[test]
    fn edge_structure() {
        for kind in [CellKind::Quad, CellKind::Triangle] {
            let s = ex1(3, 4, kind);
            for (i, e) in s.edges.iter().enumerate() {
                match e.class {
                    EdgeClass::Dual => {
                        assert_eq!(e.tris.len(), 2);
                        assert_eq!(s.tris[e.tris[0]].parent, s.tris[e.tris[1]].parent);
                    }
                    EdgeClass::PrimalInterior => {
                        assert_eq!(e.tris.len(), 2);
                        assert_ne!(s.tris[e.tris[0]].parent, s.tris[e.tris[1]].parent);
                        assert!(e.tris[0] < e.tris[1]);
                    }
                    EdgeClass::Interface => {
                        assert_eq!(s.tris[e.tris[0]].subdomain, Subdomain::Brinkman);
                        assert_eq!(s.tris[e.tris[1]].subdomain, Subdomain::Darcy);
                        assert!((e.normal[0] - 1.0).abs() < 1e-15);
                    }
                    EdgeClass::PrimalBoundary => {
                        assert_eq!(e.tris.len(), 1);
                        // outward from the unit square
                        let m = e.midpoint;
                        let out = [m[0] - 0.5, m[1] - 0.5];
                        assert!(e.normal[0] * out[0] + e.normal[1] * out[1] > 0.0);
                    }
                }
                // normal consistency
                let signs: Vec<f64> = e
                    .tris
                    .iter()
                    .map(|&t| {
                        let l = s.tris[t].edges.iter().position(|&x| x == i).unwrap();
                        s.tris[t].signs[l]
                    })
                    .collect();
                assert_eq!(signs[0], 1.0);
                if signs.len() == 2 {
                    assert_eq!(signs[1], -1.0);
                }
            }
            for t in &s.tris {
                assert!(s.edges[t.edges[0]].class.is_primal());
                assert_eq!(s.edges[t.edges[1]].class, EdgeClass::Dual);
                assert_eq!(s.edges[t.edges[2]].class, EdgeClass::Dual);
                assert!(t.simplex.signed_area() > 0.0);
            }
        }
    }

    #[test]
    fn refinement_halves_edges() {
        let c = ex1(2, 2, CellKind::Triangle);
        let f = ex1(4, 4, CellKind::Triangle);
        let mut lc: Vec<f64> = c.edges.iter().map(|e| e.length).collect();
        let mut lf: Vec<f64> = f.edges.iter().map(|e| e.length).collect();
        lc.sort_by(f64::total_cmp);
        lc.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        lf.sort_by(f64::total_cmp);
        lf.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        assert_eq!(lc.len(), lf.len());
        for (a, b) in lc.iter().zip(&lf) {
            assert!((a - 2.0 * b).abs() < 1e-14);
        }
        assert!((c.h - 2.0 * f.h).abs() < 1e-14);
    }
}
