use super::FlowSpaces;
use crate::assembly::{edge_form, volume_form, volume_rhs, Rules};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::mesh::{EdgeClass, StaggeredMesh, Subdomain};
use crate::sparse::SparseMatrix;

/// The bilinear forms of the coupled discrete system.
///
/// Each block is stored with test functions as rows and trial functions as
/// columns.
#[derive(Debug, Clone)]
pub struct FlowForms {
    /// `(ε⁻¹ L, G)`: WB × WB.
    pub m_eps: SparseMatrix,
    /// `B_h(L, v)`: HB × WB.
    pub b: SparseMatrix,
    /// `B_h*(u, G)`: WB × HB.
    pub b_star: SparseMatrix,
    /// `(α u, v)`: HB × HB.
    pub m_alpha: SparseMatrix,
    /// `b_h*(p, v)`: HB × QB.
    pub c_star: SparseMatrix,
    /// `b_h(u, q)`: QB × HB.
    pub c: SparseMatrix,
    /// `I_h(p_B, v_D) = Σ_Γ (v_D·n_D, p_B)`: HD × QB.
    pub i: SparseMatrix,
    /// `(K_D⁻¹ u, v)`: HD × HD.
    pub m_k: SparseMatrix,
    /// `A_h(v, p) = (p, ∇·v)`: HD × QD.
    pub a: SparseMatrix,
    /// `∫ q` for every QB basis function.
    pub mean: Vec<f64>,
}

pub(crate) fn edges_where(mesh: &StaggeredMesh, f: impl Fn(EdgeClass, Option<Subdomain>) -> bool) -> Vec<usize> {
    (0..mesh.edges.len())
        .filter(|&e| f(mesh.edges[e].class, mesh.edges[e].subdomain))
        .collect()
}

/// Assembles every block of the flow system.
pub fn assemble_forms(
    mesh: &StaggeredMesh,
    spaces: &FlowSpaces,
    epsilon: f64,
    alpha: &Coefficient,
    k_darcy: &Coefficient,
) -> Result<FlowForms> {
    spaces.check_mesh(mesh)?;
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let FlowSpaces { wb, hb, qb, hd, qd, dirichlet_edges, .. } = spaces;
    let rules = Rules::for_degree(spaces.k)?;
    let tb: Vec<usize> = mesh.tris_in(Subdomain::Brinkman).collect();
    let td: Vec<usize> = mesh.tris_in(Subdomain::Darcy).collect();
    let b_sub = Some(Subdomain::Brinkman);
    let pr_b = edges_where(mesh, |c, s| c == EdgeClass::PrimalInterior && s == b_sub);
    let dl_b = edges_where(mesh, |c, s| c == EdgeClass::Dual && s == b_sub);
    let all_pr_b = edges_where(mesh, |c, s| {
        c == EdgeClass::Interface || (c.is_primal() && s == b_sub)
    });
    let iface = edges_where(mesh, |c, _| c == EdgeClass::Interface);

    let inv_eps = 1.0 / epsilon;
    let m_eps = volume_form(mesh, wb, wb, &tb, &rules.tri, |_, _, g, l| {
        inv_eps * (0..4).map(|c| g.v[c] * l.v[c]).sum::<f64>()
    });

    // B_h(L, v) = (L, ∇_h v) - Σ_pr0 (Ln, [v]) - Σ_dl ((Ln)·t, [v·t]) - Σ_dir (Ln, v)
    let mut b = volume_form(mesh, hb, wb, &tb, &rules.tri, |_, _, v, l| {
        l.v[0] * v.g[0][0] + l.v[1] * v.g[0][1] + l.v[2] * v.g[1][0] + l.v[3] * v.g[1][1]
    });
    b = b.add(&edge_form(mesh, hb, wb, pr_b.iter().copied(), &rules.edge, |p, sv, v, sl, l| {
        let ln = l.tn(p.normal);
        -sv.sign * (ln[0] * v.v[0] + ln[1] * v.v[1]) / sl.count as f64
    }));
    b = b.add(&edge_form(mesh, hb, wb, dl_b.iter().copied(), &rules.edge, |p, sv, v, sl, l| {
        let ln = l.tn(p.normal);
        let lt = ln[0] * p.tangent[0] + ln[1] * p.tangent[1];
        -sv.sign * lt * v.dot2(p.tangent) / sl.count as f64
    }));
    b = b.add(&edge_form(mesh, hb, wb, dirichlet_edges.iter().copied(), &rules.edge, |p, _, v, _, l| {
        let ln = l.tn(p.normal);
        -(ln[0] * v.v[0] + ln[1] * v.v[1])
    }));

    // B_h*(u, G) = Σ_dl ([Gn]·n)(u·n) - (div_h G, u)
    let mut b_star = volume_form(mesh, wb, hb, &tb, &rules.tri, |_, _, g, u| {
        let d = g.row_div();
        -(d[0] * u.v[0] + d[1] * u.v[1])
    });
    b_star = b_star.add(&edge_form(mesh, wb, hb, dl_b.iter().copied(), &rules.edge, |p, sg, g, su, u| {
        let gn = g.tn(p.normal);
        sg.sign * (gn[0] * p.normal[0] + gn[1] * p.normal[1]) * u.dot2(p.normal) / su.count as f64
    }));

    let m_alpha = volume_form(mesh, hb, hb, &tb, &rules.tri, |t, x, v, u| {
        let a = alpha.eval(mesh.tris[t].parent, x);
        let au = [a[0][0] * u.v[0] + a[0][1] * u.v[1], a[1][0] * u.v[0] + a[1][1] * u.v[1]];
        au[0] * v.v[0] + au[1] * v.v[1]
    });

    // b_h*(p, v) = Σ_τ Σ_{primal e ⊂ ∂τ} (v·n_out, p) - (p, ∇·v)
    let mut c_star = volume_form(mesh, hb, qb, &tb, &rules.tri, |_, _, v, p| -p.v[0] * v.div());
    c_star = c_star.add(&edge_form(mesh, hb, qb, all_pr_b.iter().copied(), &rules.edge, |_, sv, v, sp, p| {
        if sv.pos == sp.pos {
            v.dot2(sv.n_out) * p.v[0]
        } else {
            0.0
        }
    }));

    // b_h(u, q) = -Σ_dl (u·n, [q]) + (u, ∇_h q)
    let mut c = volume_form(mesh, qb, hb, &tb, &rules.tri, |_, _, q, u| {
        u.v[0] * q.g[0][0] + u.v[1] * q.g[0][1]
    });
    c = c.add(&edge_form(mesh, qb, hb, dl_b.iter().copied(), &rules.edge, |p, sq, q, su, u| {
        -sq.sign * q.v[0] * u.dot2(p.normal) / su.count as f64
    }));

    let i = edge_form(mesh, hd, qb, iface.iter().copied(), &rules.edge, |_, sv, v, _, p| {
        v.dot2(sv.n_out) * p.v[0]
    });

    let m_k = volume_form(mesh, hd, hd, &td, &rules.tri, |t, x, v, u| {
        let k = k_darcy.eval_inverse(mesh.tris[t].parent, x);
        let ku = [k[0][0] * u.v[0] + k[0][1] * u.v[1], k[1][0] * u.v[0] + k[1][1] * u.v[1]];
        ku[0] * v.v[0] + ku[1] * v.v[1]
    });

    let a = volume_form(mesh, hd, qd, &td, &rules.tri, |_, _, v, p| p.v[0] * v.div());

    let mut mean = vec![0.0; qb.ndofs];
    volume_rhs(mesh, qb, &tb, &rules.tri, &mut mean, |_, _, q| q.v[0]);

    Ok(FlowForms {
        m_eps,
        b,
        b_star,
        m_alpha,
        c_star,
        c,
        i,
        m_k,
        a,
        mean,
    })
}
