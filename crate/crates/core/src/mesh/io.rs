use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::primal::{edge_key, BoundaryTag, PrimalCell, PrimalMesh, Subdomain};
use crate::error::{Error, Result};

const HEADER: &str = "staggered-mesh v1";

/// Reads a mesh in the `staggered-mesh v1` text format.
///
/// ```text
/// staggered-mesh v1
/// vertices N
/// x y            (N lines)
/// cells M
/// ncorners i0 i1 [i2 [i3]] subdomain   (M lines, subdomain B or D)
/// boundary K
/// i j tag        (K lines, tag GB, GD or IF)
/// ```
///
/// Blank lines and lines starting with `#` are ignored.
pub fn ingest_primal(path: impl AsRef<Path>) -> Result<PrimalMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_primal(&text, path)
}

/// Parses mesh text; `path` is used only for error messages.
pub fn parse_primal(text: &str, path: &Path) -> Result<PrimalMesh> {
    let mut cur = Cursor {
        lines: text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect(),
        pos: 0,
        last: text.lines().count(),
        path,
    };
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut next = |what: &str| cur.next(what);

    let (ln, header) = next("header")?;
    if header != HEADER {
        return Err(err(ln, format!("expected header `{HEADER}`, found `{header}`")));
    }

    let count = |key: &str, (ln, l): (usize, &str)| -> Result<usize> {
        let mut it = l.split_whitespace();
        if it.next() != Some(key) {
            return Err(err(ln, format!("expected `{key} <count>`")));
        }
        let n = it
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| err(ln, format!("invalid {key} count")))?;
        if it.next().is_some() {
            return Err(err(ln, "trailing tokens".into()));
        }
        Ok(n)
    };

    let nv = count("vertices", next("vertices")?)?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next("vertex")?;
        let v: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(ln, format!("bad coordinate: {e}")))?;
        if v.len() != 2 {
            return Err(err(ln, format!("expected 2 coordinates, found {}", v.len())));
        }
        vertices.push([v[0], v[1]]);
    }

    let nc = count("cells", next("cells")?)?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (ln, l) = next("cell")?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        let n: usize = tok
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(ln, "bad corner count".into()))?;
        if n != 3 && n != 4 {
            return Err(err(ln, format!("corner count must be 3 or 4, found {n}")));
        }
        if tok.len() != n + 2 {
            return Err(err(ln, format!("expected {} tokens, found {}", n + 2, tok.len())));
        }
        let verts: Vec<usize> = tok[1..=n]
            .iter()
            .map(|s| s.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(ln, format!("bad vertex index: {e}")))?;
        let subdomain = match tok[n + 1] {
            "B" => Subdomain::Brinkman,
            "D" => Subdomain::Darcy,
            s => return Err(err(ln, format!("unknown subdomain `{s}`"))),
        };
        cells.push(PrimalCell { verts, subdomain });
    }

    let nb = count("boundary", next("boundary")?)?;
    let mut boundary = BTreeMap::new();
    for _ in 0..nb {
        let (ln, l) = next("boundary edge")?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 3 {
            return Err(err(ln, format!("expected `i j tag`, found {} tokens", tok.len())));
        }
        let i: usize = tok[0].parse().map_err(|_| err(ln, "bad vertex index".into()))?;
        let j: usize = tok[1].parse().map_err(|_| err(ln, "bad vertex index".into()))?;
        let tag = BoundaryTag::parse(tok[2]).ok_or_else(|| err(ln, format!("unknown tag `{}`", tok[2])))?;
        if boundary.insert(edge_key(i, j), tag).is_some() {
            return Err(err(ln, format!("edge ({i}, {j}) tagged twice")));
        }
    }
    if let Ok((ln, l)) = next("end") {
        return Err(err(ln, format!("unexpected content `{l}`")));
    }
    PrimalMesh::new(vertices, cells, boundary)
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let l = self.lines.get(self.pos).copied().ok_or_else(|| Error::Parse {
            path: self.path.to_path_buf(),
            line: self.last,
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        self.pos += 1;
        Ok(l)
    }
}

/// Serializes a mesh in the format read by [`ingest_primal`].
pub fn write_primal(mesh: &PrimalMesh) -> String {
    let mut s = String::new();
    writeln!(s, "{HEADER}").unwrap();
    writeln!(s, "vertices {}", mesh.vertices.len()).unwrap();
    for v in &mesh.vertices {
        writeln!(s, "{:?} {:?}", v[0], v[1]).unwrap();
    }
    writeln!(s, "cells {}", mesh.cells.len()).unwrap();
    for c in &mesh.cells {
        let idx: Vec<String> = c.verts.iter().map(usize::to_string).collect();
        writeln!(s, "{} {} {}", c.verts.len(), idx.join(" "), c.subdomain.code()).unwrap();
    }
    writeln!(s, "boundary {}", mesh.boundary.len()).unwrap();
    for (&(i, j), t) in &mesh.boundary {
        writeln!(s, "{i} {j} {}", t.code()).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rectangular_primal, CellKind, Rect};

    const SQUARE: &str = "staggered-mesh v1
vertices 4
0 0
1 0
1 1
0 1
cells 2
3 0 1 2 B
3 0 2 3 B
boundary 4
0 1 GB
1 2 GB
2 3 GB
3 0 GB
";

    fn parse(s: &str) -> Result<PrimalMesh> {
        parse_primal(s, Path::new("test.mesh"))
    }

    #[test]
    fn unit_square() {
        let m = parse(SQUARE).unwrap();
        assert_eq!(m.cells.len(), 2);
        assert_eq!(m.edge_count(), 5);
    }

    #[test]
    fn degenerate_triangle_names_cell() {
        let s = SQUARE.replace("3 0 2 3 B", "3 0 2 0 B");
        assert!(matches!(parse(&s), Err(Error::InvalidCell { cell: 1, .. })));
        let s = "staggered-mesh v1\nvertices 3\n0 0\n1 0\n2 0\ncells 1\n3 0 1 2 B\nboundary 3\n0 1 GB\n1 2 GB\n0 2 GB\n";
        match parse(s) {
            Err(Error::InvalidCell { cell, msg }) => {
                assert_eq!(cell, 0);
                assert!(msg.contains("degenerate"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line() {
        let s = SQUARE.replace("1 1\n", "1 x\n");
        assert!(matches!(parse(&s), Err(Error::Parse { line: 5, .. })));
        assert!(matches!(parse("mesh v2\n"), Err(Error::Parse { line: 1, .. })));
        let s = SQUARE.replace("2 3 GB", "2 3 XX");
        assert!(matches!(parse(&s), Err(Error::Parse { line: 13, .. })));
    }

    #[test]
    fn missing_tag_rejected() {
        let s = SQUARE.replace("boundary 4", "boundary 3").replace("3 0 GB\n", "");
        assert!(matches!(parse(&s), Err(Error::InvalidCell { .. })));
    }

    #[test]
    fn overlap_rejected() {
        // second triangle duplicates the first with the same orientation
        let s = SQUARE.replace("3 0 2 3 B", "3 1 2 0 B");
        assert!(matches!(parse(&s), Err(Error::InvalidCell { .. } | Error::InvalidMesh(_))));
    }

    #[test]
    fn round_trip() {
        let m = build_rectangular_primal(
            Rect::new(0.0, 1.0, 0.5, 1.0),
            Rect::new(0.0, 1.0, 0.0, 0.5),
            3,
            2,
            CellKind::Quad,
        )
        .unwrap();
        let text = write_primal(&m);
        let back = parse(&text).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.cells, m.cells);
        assert_eq!(back.boundary, m.boundary);
    }
}
