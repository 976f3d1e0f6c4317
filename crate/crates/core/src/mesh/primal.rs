use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::polybasis::{Point, Simplex};

/// Which flow model governs a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subdomain {
    Brinkman,
    Darcy,
}

impl Subdomain {
    pub fn code(self) -> &'static str {
        match self {
            Subdomain::Brinkman => "B",
            Subdomain::Darcy => "D",
        }
    }
}

/// Tag carried by every edge of `∂Ω ∪ Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// `Γ_B = ∂Ω_B \ Γ`
    Brinkman,
    /// `Γ_D = ∂Ω_D \ Γ`
    Darcy,
    /// The interface `Γ`.
    Interface,
}

impl BoundaryTag {
    pub fn code(self) -> &'static str {
        match self {
            BoundaryTag::Brinkman => "GB",
            BoundaryTag::Darcy => "GD",
            BoundaryTag::Interface => "IF",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "GB" => Some(Self::Brinkman),
            "GD" => Some(Self::Darcy),
            "IF" => Some(Self::Interface),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Triangle,
    Quad,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalCell {
    /// Counter-clockwise corner indices (3 or 4).
    pub verts: Vec<usize>,
    pub subdomain: Subdomain,
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Initial partition of `Ω_B ∪ Ω_D` into triangles and quadrilaterals.
#[derive(Debug, Clone)]
pub struct PrimalMesh {
    pub vertices: Vec<Point>,
    pub cells: Vec<PrimalCell>,
    /// Tags keyed by sorted vertex pair.
    pub boundary: BTreeMap<(usize, usize), BoundaryTag>,
    warnings: Vec<String>,
}

impl PrimalMesh {
    /// Builds and validates a primal mesh.
    pub fn new(
        vertices: Vec<Point>,
        cells: Vec<PrimalCell>,
        boundary: BTreeMap<(usize, usize), BoundaryTag>,
    ) -> Result<Self> {
        let mut mesh = Self {
            vertices,
            cells,
            boundary,
            warnings: Vec::new(),
        };
        mesh.warnings = mesh.validate()?;
        for w in &mesh.warnings {
            log::warn!("{w}");
        }
        Ok(mesh)
    }

    /// Non-fatal findings from validation (e.g. small angles).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        let v = &self.cells[c].verts;
        let n = v.len();
        0.5 * (0..n)
            .map(|i| {
                let p = self.vertices[v[i]];
                let q = self.vertices[v[(i + 1) % n]];
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
    }

    /// Interior point `ν`: centroid of a triangle, center of a quadrilateral.
    pub fn cell_center(&self, c: usize) -> Point {
        let v = &self.cells[c].verts;
        let n = v.len() as f64;
        let s = v.iter().fold([0.0, 0.0], |acc, &i| {
            [acc[0] + self.vertices[i][0], acc[1] + self.vertices[i][1]]
        });
        [s[0] / n, s[1] / n]
    }

    /// Number of distinct primal edges.
    pub fn edge_count(&self) -> usize {
        self.edge_uses().len()
    }

    fn edge_uses(&self) -> BTreeMap<(usize, usize), Vec<(usize, bool)>> {
        let mut uses: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (c, cell) in self.cells.iter().enumerate() {
            let n = cell.verts.len();
            for i in 0..n {
                let (a, b) = (cell.verts[i], cell.verts[(i + 1) % n]);
                uses.entry(edge_key(a, b)).or_default().push((c, a < b));
            }
        }
        uses
    }

    /// Checks every structural invariant; returns warnings on success.
    pub fn validate(&self) -> Result<Vec<String>> {
        let nv = self.vertices.len();
        let mut warnings = Vec::new();
        let (mut thin, mut thinnest) = (0usize, (f64::INFINITY, 0usize));
        if self.cells.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        if let Some(i) = self.vertices.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::InvalidMesh(format!("vertex {i} has non-finite coordinates")));
        }
        let mut total_area = 0.0;
        let mut scale: f64 = 0.0;
        for (c, cell) in self.cells.iter().enumerate() {
            let n = cell.verts.len();
            if n != 3 && n != 4 {
                return Err(Error::InvalidCell {
                    cell: c,
                    msg: format!("{n} corners; only triangles and quadrilaterals are supported"),
                });
            }
            if let Some(&bad) = cell.verts.iter().find(|&&v| v >= nv) {
                return Err(Error::InvalidCell {
                    cell: c,
                    msg: format!("vertex index {bad} out of range (have {nv} vertices)"),
                });
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    if cell.verts[i] == cell.verts[j] {
                        return Err(Error::InvalidCell {
                            cell: c,
                            msg: "repeated vertex".into(),
                        });
                    }
                }
            }
            let area = self.cell_area(c);
            let diam = cell
                .verts
                .iter()
                .flat_map(|&a| cell.verts.iter().map(move |&b| (a, b)))
                .map(|(a, b)| crate::polybasis::dist(self.vertices[a], self.vertices[b]))
                .fold(0.0, f64::max);
            scale = scale.max(diam);
            if area.abs() <= 1e-14 * diam * diam {
                return Err(Error::InvalidCell {
                    cell: c,
                    msg: "degenerate (zero area)".into(),
                });
            }
            if area < 0.0 {
                return Err(Error::InvalidCell {
                    cell: c,
                    msg: "clockwise orientation".into(),
                });
            }
            // every subtriangle (corner, corner, center) must be positively oriented
            let nu = self.cell_center(c);
            for i in 0..n {
                let t = Simplex::new([self.vertices[cell.verts[i]], self.vertices[cell.verts[(i + 1) % n]], nu]);
                if t.signed_area() <= 1e-14 * diam * diam {
                    return Err(Error::InvalidCell {
                        cell: c,
                        msg: "cell is not star-shaped with respect to its center".into(),
                    });
                }
                let angle = t.min_angle_degrees();
                if angle < 10.0 {
                    thin += 1;
                    if angle < thinnest.0 {
                        thinnest = (angle, c);
                    }
                }
            }
            total_area += area;
        }
        if thin > 0 {
            warnings.push(format!(
                "{thin} subtriangles have a minimum angle below 10 deg (smallest {:.2} deg, cell {})",
                thinnest.0, thinnest.1
            ));
        }

        let uses = self.edge_uses();
        let mut enclosed = 0.0;
        for (&(a, b), u) in &uses {
            match u.as_slice() {
                [(c, fwd)] => {
                    let tag = self.boundary.get(&(a, b)).ok_or_else(|| Error::InvalidCell {
                        cell: *c,
                        msg: format!("boundary edge ({a}, {b}) has no tag"),
                    })?;
                    let want = match self.cells[*c].subdomain {
                        Subdomain::Brinkman => BoundaryTag::Brinkman,
                        Subdomain::Darcy => BoundaryTag::Darcy,
                    };
                    if *tag != want {
                        return Err(Error::InvalidCell {
                            cell: *c,
                            msg: format!(
                                "boundary edge ({a}, {b}) tagged {} but expected {}",
                                tag.code(),
                                want.code()
                            ),
                        });
                    }
                    let (p, q) = if *fwd { (a, b) } else { (b, a) };
                    let (p, q) = (self.vertices[p], self.vertices[q]);
                    enclosed += 0.5 * (p[0] * q[1] - q[0] * p[1]);
                }
                [(c0, f0), (c1, f1)] => {
                    if f0 == f1 {
                        return Err(Error::InvalidCell {
                            cell: *c1,
                            msg: format!("overlaps cell {c0} across edge ({a}, {b})"),
                        });
                    }
                    let s0 = self.cells[*c0].subdomain;
                    let s1 = self.cells[*c1].subdomain;
                    let tag = self.boundary.get(&(a, b));
                    if s0 != s1 && tag != Some(&BoundaryTag::Interface) {
                        return Err(Error::InvalidCell {
                            cell: *c1,
                            msg: format!("edge ({a}, {b}) separates subdomains but is not tagged IF"),
                        });
                    }
                    if s0 == s1 && tag.is_some() {
                        return Err(Error::InvalidCell {
                            cell: *c1,
                            msg: format!("interior edge ({a}, {b}) carries a boundary tag"),
                        });
                    }
                }
                many => {
                    return Err(Error::InvalidCell {
                        cell: many[2].0,
                        msg: format!("edge ({a}, {b}) is shared by {} cells", many.len()),
                    });
                }
            }
        }
        if let Some((&(a, b), _)) = self.boundary.iter().find(|(k, _)| !uses.contains_key(k)) {
            return Err(Error::InvalidMesh(format!(
                "tagged edge ({a}, {b}) is not an edge of any cell"
            )));
        }
        if (enclosed - total_area).abs() > 1e-10 * scale * scale.max(1.0) * self.cells.len() as f64 {
            return Err(Error::InvalidMesh(format!(
                "cells overlap: total cell area {total_area} differs from enclosed area {enclosed}"
            )));
        }
        Ok(warnings)
    }
}

/// Structured partition of two axis-aligned rectangles sharing one full edge.
///
/// Each subdomain is split into `nx × ny` rectangles; with
/// [`CellKind::Triangle`] every rectangle is further cut along its
/// lower-left/upper-right diagonal.
pub fn build_rectangular_primal(
    brinkman: Rect,
    darcy: Rect,
    nx: usize,
    ny: usize,
    kind: CellKind,
) -> Result<PrimalMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::Argument(format!("cell counts must be positive (nx={nx}, ny={ny})")));
    }
    build_rectangular_with_counts(brinkman, darcy, (nx, ny), (nx, ny), kind)
}

/// Structured partition with rectangles of side `h` (rounded to fit).
pub fn build_uniform_primal(brinkman: Rect, darcy: Rect, h: f64, kind: CellKind) -> Result<PrimalMesh> {
    if !(h > 0.0) {
        return Err(Error::Argument(format!("mesh size must be positive, got {h}")));
    }
    let count = |len: f64| ((len / h).round() as usize).max(1);
    build_rectangular_with_counts(
        brinkman,
        darcy,
        (count(brinkman.width()), count(brinkman.height())),
        (count(darcy.width()), count(darcy.height())),
        kind,
    )
}

fn build_rectangular_with_counts(
    brinkman: Rect,
    darcy: Rect,
    nb: (usize, usize),
    nd: (usize, usize),
    kind: CellKind,
) -> Result<PrimalMesh> {
    if nb.0 == 0 || nb.1 == 0 || nd.0 == 0 || nd.1 == 0 {
        return Err(Error::Argument("cell counts must be positive".into()));
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
    let vertical = (close(brinkman.x1, darcy.x0) || close(brinkman.x0, darcy.x1))
        && close(brinkman.y0, darcy.y0)
        && close(brinkman.y1, darcy.y1);
    let horizontal = (close(brinkman.y1, darcy.y0) || close(brinkman.y0, darcy.y1))
        && close(brinkman.x0, darcy.x0)
        && close(brinkman.x1, darcy.x1);
    if !vertical && !horizontal {
        return Err(Error::Config(
            "Brinkman and Darcy rectangles must share exactly one full edge".into(),
        ));
    }
    if (vertical && nb.1 != nd.1) || (horizontal && nb.0 != nd.0) {
        return Err(Error::Config(
            "subdomain partitions do not match along the interface".into(),
        ));
    }

    let mut vertices: Vec<Point> = Vec::new();
    let mut lookup: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vid = |p: Point, vertices: &mut Vec<Point>| -> usize {
        let key = ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64);
        *lookup.entry(key).or_insert_with(|| {
            vertices.push(p);
            vertices.len() - 1
        })
    };
    let mut cells = Vec::new();
    for (rect, (nx, ny), sub) in [
        (brinkman, nb, Subdomain::Brinkman),
        (darcy, nd, Subdomain::Darcy),
    ] {
        let dx = rect.width() / nx as f64;
        let dy = rect.height() / ny as f64;
        let pt = |i: usize, j: usize| -> Point {
            let x = if i == nx { rect.x1 } else { rect.x0 + i as f64 * dx };
            let y = if j == ny { rect.y1 } else { rect.y0 + j as f64 * dy };
            [x, y]
        };
        for j in 0..ny {
            for i in 0..nx {
                let v00 = vid(pt(i, j), &mut vertices);
                let v10 = vid(pt(i + 1, j), &mut vertices);
                let v11 = vid(pt(i + 1, j + 1), &mut vertices);
                let v01 = vid(pt(i, j + 1), &mut vertices);
                match kind {
                    CellKind::Quad => cells.push(PrimalCell {
                        verts: vec![v00, v10, v11, v01],
                        subdomain: sub,
                    }),
                    CellKind::Triangle => {
                        cells.push(PrimalCell {
                            verts: vec![v00, v10, v11],
                            subdomain: sub,
                        });
                        cells.push(PrimalCell {
                            verts: vec![v00, v11, v01],
                            subdomain: sub,
                        });
                    }
                }
            }
        }
    }

    // tag by use count and subdomain
    let mut uses: BTreeMap<(usize, usize), Vec<Subdomain>> = BTreeMap::new();
    for cell in &cells {
        let n = cell.verts.len();
        for i in 0..n {
            uses.entry(edge_key(cell.verts[i], cell.verts[(i + 1) % n]))
                .or_default()
                .push(cell.subdomain);
        }
    }
    let boundary = uses
        .into_iter()
        .filter_map(|(k, s)| match s.as_slice() {
            [Subdomain::Brinkman] => Some((k, BoundaryTag::Brinkman)),
            [Subdomain::Darcy] => Some((k, BoundaryTag::Darcy)),
            [a, b] if a != b => Some((k, BoundaryTag::Interface)),
            _ => None,
        })
        .collect();
    PrimalMesh::new(vertices, cells, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1_rects() -> (Rect, Rect) {
        (Rect::new(0.0, 0.5, 0.0, 1.0), Rect::new(0.5, 1.0, 0.0, 1.0))
    }

    #[test]
    fn two_by_two_quads() {
        let (b, d) = ex1_rects();
        let m = build_rectangular_primal(b, d, 2, 2, CellKind::Quad).unwrap();
        let nb = m.cells.iter().filter(|c| c.subdomain == Subdomain::Brinkman).count();
        assert_eq!(nb, 4);
        assert_eq!(m.cells.len(), 8);
        let nif = m.boundary.values().filter(|t| **t == BoundaryTag::Interface).count();
        assert_eq!(nif, 2);
        for (&(a, b), t) in &m.boundary {
            if *t == BoundaryTag::Interface {
                assert_eq!(m.vertices[a][0], 0.5);
                assert_eq!(m.vertices[b][0], 0.5);
            }
        }
    }

    #[test]
    fn zero_cells_rejected() {
        let (b, d) = ex1_rects();
        assert!(matches!(
            build_rectangular_primal(b, d, 0, 2, CellKind::Quad),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn non_adjacent_rejected() {
        let b = Rect::new(0.0, 0.5, 0.0, 1.0);
        let d = Rect::new(0.6, 1.0, 0.0, 1.0);
        assert!(matches!(
            build_rectangular_primal(b, d, 2, 2, CellKind::Quad),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn refinement_quadruples_cells() {
        let (b, d) = ex1_rects();
        for kind in [CellKind::Quad, CellKind::Triangle] {
            let c = build_rectangular_primal(b, d, 2, 3, kind).unwrap();
            let f = build_rectangular_primal(b, d, 4, 6, kind).unwrap();
            assert_eq!(4 * c.cells.len(), f.cells.len());
        }
    }

    #[test]
    fn uniform_ladder_counts() {
        let (b, d) = ex1_rects();
        let m = build_uniform_primal(b, d, 0.5, CellKind::Quad).unwrap();
        // (0,1/2)x(0,1) with h=1/2: one column, two rows per subdomain
        assert_eq!(m.cells.len(), 4);
    }

    #[test]
    fn clockwise_cell_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let cells = vec![PrimalCell {
            verts: vec![0, 2, 1],
            subdomain: Subdomain::Brinkman,
        }];
        let tags = [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .map(|k| (k, BoundaryTag::Brinkman))
            .collect();
        assert!(matches!(
            PrimalMesh::new(v, cells, tags),
            Err(Error::InvalidCell { cell: 0, .. })
        ));
    }
}
