use super::{FeSpace, SpaceKind, Value};
use crate::error::Result;
use crate::mesh::{EdgeClass, StaggeredMesh, Subdomain};
use crate::polybasis::edge_rule;

/// Largest violation of the space's inter-element conditions.
///
/// Evaluates both traces at edge quadrature points and measures the jump
/// the space is required to kill: `⟦q⟧` on primal edges for `QB`/`UH`,
/// `⟦v·n⟧` on dual edges for `HB`/`WH`, `⟦v·n⟧` on interior edges for `HD`,
/// and `⟦Gn⟧`, `⟦(Gn)·t⟧`, `Gn|∂Ω_B` for `WB`.
pub fn continuity_residual(space: &FeSpace, mesh: &StaggeredMesh, coeffs: &[f64]) -> Result<f64> {
    let rule = edge_rule(2 * space.k + 1)?;
    let mut worst: f64 = 0.0;
    for (id, e) in mesh.edges.iter().enumerate() {
        let in_space: Vec<usize> = e.tris.iter().copied().filter(|&t| space.contains(t)).collect();
        let measure = |v: &Value| -> Vec<f64> {
            let n = e.normal;
            let t = e.tangent;
            match (space.kind, e.class) {
                (SpaceKind::QB | SpaceKind::UH, EdgeClass::PrimalInterior | EdgeClass::Interface) => vec![v[0]],
                (SpaceKind::HB | SpaceKind::WH, EdgeClass::Dual) => vec![v[0] * n[0] + v[1] * n[1]],
                (SpaceKind::HD, EdgeClass::Dual | EdgeClass::PrimalInterior) => vec![v[0] * n[0] + v[1] * n[1]],
                (SpaceKind::WB, EdgeClass::Dual) => {
                    let gn = [v[0] * n[0] + v[1] * n[1], v[2] * n[0] + v[3] * n[1]];
                    vec![gn[0] * t[0] + gn[1] * t[1]]
                }
                (SpaceKind::WB, _) => vec![v[0] * n[0] + v[1] * n[1], v[2] * n[0] + v[3] * n[1]],
                _ => Vec::new(),
            }
        };
        let wb_boundary = space.kind == SpaceKind::WB
            && matches!(e.class, EdgeClass::PrimalBoundary | EdgeClass::Interface)
            && e.tris.iter().any(|&t| mesh.tris[t].subdomain == Subdomain::Brinkman)
            && space.edge_dofs(id).is_empty();
        for (s, _) in rule.iter() {
            let x = e.point(mesh, s[0]);
            match in_space.as_slice() {
                [a, b] => {
                    let va = measure(&space.eval(mesh, *a, coeffs, x));
                    let vb = measure(&space.eval(mesh, *b, coeffs, x));
                    for (p, q) in va.iter().zip(&vb) {
                        worst = worst.max((p - q).abs());
                    }
                }
                [a] if wb_boundary => {
                    for v in measure(&space.eval(mesh, *a, coeffs, x)) {
                        worst = worst.max(v.abs());
                    }
                }
                _ => {}
            }
        }
    }
    Ok(worst)
}
