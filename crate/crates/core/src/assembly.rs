//! Global matrices, load vectors, boundary dofs and Dirichlet elimination.

use alloc::vec;
use alloc::vec::Vec;

use crate::fe::{gauss_legendre_unit, p2_hessians, reference_barycentric_gradients, DofLayout, QuadratureRule, RefElement};
use crate::mesh::{BoundaryTag, TagSet, TriMesh};
use crate::sparse::{Coo, Csr, SparseLu};
use crate::{Error, Result};

/// Time-independent matrices of the three-field discretization.
#[derive(Debug, Clone)]
pub struct FormMatrices {
    /// μ(ε(u), ε(v)) on the vector P2 space.
    pub a_eps: Csr,
    /// (ξ, div v): rows are displacement dofs, columns P1 dofs.
    pub b_div: Csr,
    /// (div u, φ): rows P1, columns displacement; assembled on its own.
    pub b_div_t: Csr,
    /// P1 mass matrix (ψ, φ).
    pub mass: Csr,
    /// (K/μ_f)(∇ψ, ∇φ) on P1.
    pub stiffness: Csr,
    /// (K/μ_f)(∇ div u, ∇ψ) with the gradient of div u taken elementwise.
    pub mixed: Csr,
}

/// Builds all form matrices with a rule exact to `quad_degree`.
pub fn assemble_forms(mesh: &TriMesh, layout: &DofLayout, mu: f64, mobility: f64, quad_degree: usize) -> Result<FormMatrices> {
    let rule = QuadratureRule::with_degree(quad_degree)?;
    let p2 = RefElement::new(2)?;
    let p1 = RefElement::new(1)?;
    let tab2 = p2.tabulate(&rule);
    let tab1 = p1.tabulate(&rule);
    let nu = layout.u_len();
    let np = layout.p1_count;
    let nt = mesh.num_triangles();
    let mut a = Coo::with_capacity(nu, nu, nt * 144);
    let mut b = Coo::with_capacity(nu, np, nt * 36);
    let mut bt = Coo::with_capacity(np, nu, nt * 36);
    let mut m = Coo::with_capacity(np, np, nt * 9);
    let mut s = Coo::with_capacity(np, np, nt * 9);
    let mut x = Coo::with_capacity(np, nu, nt * 36);
    let ref_bary = reference_barycentric_gradients();

    for t in 0..nt {
        let map = mesh.affine_map(t)?;
        let scale = map.det;
        let d2 = &layout.cell_p2[t];
        let d1 = &layout.cell_p1[t];
        let bary = [
            map.physical_gradient(ref_bary[0]),
            map.physical_gradient(ref_bary[1]),
            map.physical_gradient(ref_bary[2]),
        ];
        let mut ka = [[0.0; 12]; 12];
        let mut kb = [[0.0; 3]; 12];
        let mut kbt = [[0.0; 12]; 3];
        let mut km = [[0.0; 3]; 3];
        for q in 0..rule.len() {
            let w = rule.weights[q] * scale;
            let g2: Vec<[f64; 2]> = tab2.grads_at(q).iter().map(|g| map.physical_gradient(*g)).collect();
            let v1 = tab1.values_at(q);
            for k in 0..6 {
                for l in 0..6 {
                    let gg = g2[k][0] * g2[l][0] + g2[k][1] * g2[l][1];
                    for c in 0..2 {
                        for d in 0..2 {
                            let delta = if c == d { gg } else { 0.0 };
                            ka[2 * k + c][2 * l + d] += w * mu * 0.5 * (delta + g2[k][d] * g2[l][c]);
                        }
                    }
                }
                for j in 0..3 {
                    for c in 0..2 {
                        kb[2 * k + c][j] += w * v1[j] * g2[k][c];
                    }
                }
            }
            // the transpose is accumulated from its own loop over test functions
            for (j, &vj) in v1.iter().enumerate() {
                for k in 0..6 {
                    for c in 0..2 {
                        kbt[j][2 * k + c] += w * g2[k][c] * vj;
                    }
                }
                for i in 0..3 {
                    km[j][i] += w * vj * v1[i];
                }
            }
        }
        let area = map.area();
        let hess = p2_hessians(&bary);
        for k in 0..6 {
            for l in 0..6 {
                for c in 0..2 {
                    for d in 0..2 {
                        a.push(layout.u_dof(c, d2[k]), layout.u_dof(d, d2[l]), ka[2 * k + c][2 * l + d]);
                    }
                }
            }
            for j in 0..3 {
                for c in 0..2 {
                    b.push(layout.u_dof(c, d2[k]), d1[j], kb[2 * k + c][j]);
                    bt.push(d1[j], layout.u_dof(c, d2[k]), kbt[j][2 * k + c]);
                    // ∇(∂_c N_k) is the c-th column of the constant Hessian
                    let grad_div = [hess[k][0][c], hess[k][1][c]];
                    let v = mobility * area * (grad_div[0] * bary[j][0] + grad_div[1] * bary[j][1]);
                    x.push(d1[j], layout.u_dof(c, d2[k]), v);
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                m.push(d1[i], d1[j], km[i][j]);
                let v = mobility * area * (bary[i][0] * bary[j][0] + bary[i][1] * bary[j][1]);
                s.push(d1[i], d1[j], v);
            }
        }
    }
    Ok(FormMatrices {
        a_eps: a.to_csr(),
        b_div: b.to_csr(),
        b_div_t: bt.to_csr(),
        mass: m.to_csr(),
        stiffness: s.to_csr(),
        mixed: x.to_csr(),
    })
}

/// Data entering the right-hand sides at one time level.
pub trait LoadData {
    /// Body force f.
    fn body_force(&self, x: [f64; 2]) -> [f64; 2];
    /// Boundary traction f₁ on the edges of `tag`.
    fn traction(&self, x: [f64; 2], tag: BoundaryTag) -> [f64; 2];
    /// Fluid source φ.
    fn source(&self, x: [f64; 2]) -> f64;
    /// Boundary flux φ₁ on the edges of `tag`.
    fn flux(&self, _x: [f64; 2], _tag: BoundaryTag) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadVectors {
    /// (f, v) + <f₁, v> over the displacement dofs.
    pub u: Vec<f64>,
    /// (φ, ψ) + <φ₁, ψ> over the P1 dofs.
    pub p1: Vec<f64>,
}

pub fn assemble_load(
    mesh: &TriMesh,
    layout: &DofLayout,
    data: &dyn LoadData,
    traction_tags: TagSet,
    flux_tags: TagSet,
    quad_degree: usize,
) -> Result<LoadVectors> {
    let rule = QuadratureRule::with_degree(quad_degree)?;
    let p2 = RefElement::new(2)?;
    let p1 = RefElement::new(1)?;
    let tab2 = p2.tabulate(&rule);
    let tab1 = p1.tabulate(&rule);
    let mut fu = vec![0.0; layout.u_len()];
    let mut fp = vec![0.0; layout.p1_count];
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine_map(t)?;
        let d2 = &layout.cell_p2[t];
        let d1 = &layout.cell_p1[t];
        for (q, pt) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * map.det;
            let xq = map.to_physical(*pt);
            let f = data.body_force(xq);
            let phi = data.source(xq);
            for (k, &n) in tab2.values_at(q).iter().enumerate() {
                fu[layout.u_dof(0, d2[k])] += w * f[0] * n;
                fu[layout.u_dof(1, d2[k])] += w * f[1] * n;
            }
            for (j, &n) in tab1.values_at(q).iter().enumerate() {
                fp[d1[j]] += w * phi * n;
            }
        }
    }
    let (gx, gw) = gauss_legendre_unit((quad_degree + 2) / 2);
    let nv = mesh.num_vertices();
    for &(e, tag) in &mesh.boundary_edges {
        let want_u = traction_tags.contains(tag);
        let want_p = flux_tags.contains(tag);
        if !want_u && !want_p {
            continue;
        }
        let [a, b] = mesh.edges[e];
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let len = libm::hypot(pb[0] - pa[0], pb[1] - pa[1]);
        for (&s, &w) in gx.iter().zip(&gw) {
            let xq = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            let w = w * len;
            // 1D quadratic Lagrange basis on the edge: a, b, midpoint
            let n2 = [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)];
            let dofs = [a, b, nv + e];
            if want_u {
                let g = data.traction(xq, tag);
                for (k, &n) in n2.iter().enumerate() {
                    fu[layout.u_dof(0, dofs[k])] += w * g[0] * n;
                    fu[layout.u_dof(1, dofs[k])] += w * g[1] * n;
                }
            }
            if want_p {
                let g = data.flux(xq, tag);
                fp[a] += w * g * (1.0 - s);
                fp[b] += w * g * s;
            }
        }
    }
    Ok(LoadVectors { u: fu, p1: fp })
}

/// (K/μ_f)(ρ_f g, ∇ψ) for a constant vector `rho_g`.
pub fn gravity_load(mesh: &TriMesh, layout: &DofLayout, mobility: f64, rho_g: [f64; 2]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; layout.p1_count];
    if rho_g == [0.0, 0.0] {
        return Ok(out);
    }
    let ref_bary = reference_barycentric_gradients();
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine_map(t)?;
        for (j, &dof) in layout.cell_p1[t].iter().enumerate() {
            let g = map.physical_gradient(ref_bary[j]);
            out[dof] += mobility * map.area() * (rho_g[0] * g[0] + rho_g[1] * g[1]);
        }
    }
    Ok(out)
}

/// Scalar P2 nodes (vertices and edge dofs) lying on the boundary parts in `tags`.
pub fn boundary_p2_nodes(mesh: &TriMesh, tags: TagSet) -> Vec<usize> {
    let nv = mesh.num_vertices();
    let mut nodes: Vec<usize> = (0..nv).filter(|&v| mesh.vertex_tags[v].intersects(tags)).collect();
    nodes.extend(mesh.boundary_edges.iter().filter(|(_, tag)| tags.contains(*tag)).map(|(e, _)| nv + e));
    nodes
}

/// Mesh vertices (= P1 dofs) lying on the boundary parts in `tags`.
pub fn boundary_p1_nodes(mesh: &TriMesh, tags: TagSet) -> Vec<usize> {
    (0..mesh.num_vertices()).filter(|&v| mesh.vertex_tags[v].intersects(tags)).collect()
}

/// Global dofs constrained by the boundary conditions: both displacement
/// components on `u_tags`, and ξ, η on `scalar_tags`.
pub fn compute_boundary_dofs(mesh: &TriMesh, layout: &DofLayout, u_tags: TagSet, scalar_tags: TagSet) -> Vec<usize> {
    let mut dofs = Vec::new();
    for c in 0..2 {
        dofs.extend(boundary_p2_nodes(mesh, u_tags).into_iter().map(|k| layout.u_dof(c, k)));
    }
    let p1 = boundary_p1_nodes(mesh, scalar_tags);
    dofs.extend(p1.iter().map(|&k| layout.xi_dof(k)));
    dofs.extend(p1.iter().map(|&k| layout.eta_dof(k)));
    dofs
}

/// Prescribed dof values; setting a dof twice to different values is an error.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraints {
    pub dofs: Vec<usize>,
    pub values: Vec<f64>,
}

impl Constraints {
    pub fn new() -> Constraints {
        Constraints::default()
    }

    pub fn set(&mut self, dof: usize, value: f64) -> Result<()> {
        if let Some(p) = self.dofs.iter().position(|&d| d == dof) {
            let first = self.values[p];
            let tol = 1e-12 * first.abs().max(value.abs()).max(1.0);
            if (first - value).abs() > tol {
                return Err(Error::ConflictingConstraint { dof, first, second: value });
            }
            return Ok(());
        }
        self.dofs.push(dof);
        self.values.push(value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }
}

/// A matrix with Dirichlet rows and columns replaced by the identity, and
/// the eliminated columns kept for lifting right-hand sides.
#[derive(Debug, Clone)]
pub struct DirichletSystem {
    pub matrix: Csr,
    lift: Csr,
    constrained: Vec<bool>,
    dofs: Vec<usize>,
}

impl DirichletSystem {
    pub fn new(a: &Csr, dofs: &[usize]) -> Result<DirichletSystem> {
        let n = a.nrows;
        let mut constrained = vec![false; n];
        let mut sorted: Vec<usize> = dofs.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &d in &sorted {
            if d >= n {
                return Err(Error::DimensionMismatch { expected: n, found: d });
            }
            constrained[d] = true;
        }
        let mut m = Coo::with_capacity(n, n, a.nnz());
        let mut lift = Coo::new(n, n);
        for i in 0..n {
            if constrained[i] {
                m.push(i, i, 1.0);
                continue;
            }
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if constrained[j] {
                    lift.push(i, j, v);
                } else {
                    m.push(i, j, v);
                }
            }
        }
        Ok(DirichletSystem { matrix: m.to_csr(), lift: lift.to_csr(), constrained, dofs: sorted })
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn constrained_dofs(&self) -> &[usize] {
        &self.dofs
    }

    /// Rewrites `rhs` for the modified matrix: the constrained entries take
    /// their prescribed values and the free rows lose the lifted columns.
    pub fn apply(&self, rhs: &mut [f64], c: &Constraints) -> Result<()> {
        let mut g = vec![0.0; rhs.len()];
        let mut seen = 0;
        for (&d, &v) in c.dofs.iter().zip(&c.values) {
            if d >= rhs.len() || !self.constrained[d] {
                return Err(Error::Config(alloc::format!("dof {d} is not a Dirichlet dof of this system")));
            }
            g[d] = v;
            seen += 1;
        }
        if seen != self.dofs.len() {
            return Err(Error::DimensionMismatch { expected: self.dofs.len(), found: seen });
        }
        self.lift.matvec_add(-1.0, &g, rhs);
        for &d in &self.dofs {
            rhs[d] = g[d];
        }
        Ok(())
    }
}

/// Nodal interpolant on the scalar P2 nodes.
pub fn interpolate_p2(mesh: &TriMesh, layout: &DofLayout, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
    layout.p2_coordinates(mesh).into_iter().map(f).collect()
}

/// Nodal interpolant on the P1 nodes (mesh vertices).
pub fn interpolate_p1(mesh: &TriMesh, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
    mesh.vertices.iter().map(|&x| f(x)).collect()
}

/// Right-hand side (f, ψ) of the L2 projection onto P1.
pub fn p1_moments(mesh: &TriMesh, layout: &DofLayout, f: &dyn Fn([f64; 2]) -> f64, quad_degree: usize) -> Result<Vec<f64>> {
    let rule = QuadratureRule::with_degree(quad_degree)?;
    let tab = RefElement::new(1)?.tabulate(&rule);
    let mut out = vec![0.0; layout.p1_count];
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine_map(t)?;
        for (q, pt) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * map.det * f(map.to_physical(*pt));
            for (j, &n) in tab.values_at(q).iter().enumerate() {
                out[layout.cell_p1[t][j]] += w * n;
            }
        }
    }
    Ok(out)
}

/// L2 projection onto P1 given a factorized mass matrix.
pub fn l2_project_p1(
    mesh: &TriMesh,
    layout: &DofLayout,
    mass_lu: &SparseLu,
    f: &dyn Fn([f64; 2]) -> f64,
    quad_degree: usize,
) -> Result<Vec<f64>> {
    let rhs = p1_moments(mesh, layout, f, quad_degree)?;
    mass_lu.solve(&rhs)
}

/// Moments (μ ε(w), ε(v)) of a smooth vector field given its gradient,
/// used as the right-hand side of the elastic (Ritz) projection.
pub fn strain_moments(
    mesh: &TriMesh,
    layout: &DofLayout,
    mu: f64,
    grad: &dyn Fn([f64; 2]) -> [[f64; 2]; 2],
    quad_degree: usize,
) -> Result<Vec<f64>> {
    let rule = QuadratureRule::with_degree(quad_degree)?;
    let tab = RefElement::new(2)?.tabulate(&rule);
    let mut out = vec![0.0; layout.u_len()];
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine_map(t)?;
        for (q, pt) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * map.det;
            let g = grad(map.to_physical(*pt));
            // ε(w)
            let e = [[g[0][0], 0.5 * (g[0][1] + g[1][0])], [0.5 * (g[0][1] + g[1][0]), g[1][1]]];
            for (k, rg) in tab.grads_at(q).iter().enumerate() {
                let gn = map.physical_gradient(*rg);
                // ε(N e_c) : ε(w) = Σ_d ∂_d N ε_cd
                for c in 0..2 {
                    out[layout.u_dof(c, layout.cell_p2[t][k])] += w * mu * (gn[0] * e[c][0] + gn[1] * e[c][1]);
                }
            }
        }
    }
    Ok(out)
}
