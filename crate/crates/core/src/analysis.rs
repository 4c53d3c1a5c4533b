//! Error norms against exact solutions, maxima over time and observed orders.

use alloc::vec::Vec;

use crate::fe::{DofLayout, QuadratureRule, RefElement};
use crate::mesh::TriMesh;
use crate::mms::ExactSolution;
use crate::{Error, Result};

/// Default exactness of the rule used for error integrals.
pub const ERROR_QUADRATURE: usize = 7;

/// L² error and full H¹ error (not the seminorm) of one field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldError {
    pub l2: f64,
    pub h1: f64,
}

/// Errors of a P1 field against `f` with gradient `grad_f`.
pub fn p1_error(
    mesh: &TriMesh,
    layout: &DofLayout,
    coeffs: &[f64],
    f: &dyn Fn([f64; 2]) -> f64,
    grad_f: &dyn Fn([f64; 2]) -> [f64; 2],
    quad_degree: usize,
) -> Result<FieldError> {
    let rule = QuadratureRule::with_degree(quad_degree)?;
    let tab = RefElement::new(1)?.tabulate(&rule);
    let (mut l2, mut semi) = (0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine_map(t)?;
        let dofs = &layout.cell_p1[t];
        let g: Vec<[f64; 2]> = tab.grads_at(0).iter().map(|g| map.physical_gradient(*g)).collect();
        let mut gh = [0.0; 2];
        for j in 0..3 {
            gh[0] += coeffs[dofs[j]] * g[j][0];
            gh[1] += coeffs[dofs[j]] * g[j][1];
        }
        for (q, pt) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * map.det;
            let x = map.to_physical(*pt);
            let vh: f64 = tab.values_at(q).iter().zip(dofs).map(|(n, &d)| n * coeffs[d]).sum();
            let e = f(x) - vh;
            let ge = grad_f(x);
            l2 += w * e * e;
            let (a, b) = (ge[0] - gh[0], ge[1] - gh[1]);
            semi += w * (a * a + b * b);
        }
    }
    Ok(FieldError { l2: libm::sqrt(l2), h1: libm::sqrt(l2 + semi) })
}

/// Errors of a vector P2 field against `f` with gradient `grad_f[c][d] = ∂_d f_c`.
pub fn p2_vector_error(
    mesh: &TriMesh,
    layout: &DofLayout,
    coeffs: &[f64],
    f: &dyn Fn([f64; 2]) -> [f64; 2],
    grad_f: &dyn Fn([f64; 2]) -> [[f64; 2]; 2],
    quad_degree: usize,
) -> Result<FieldError> {
    let rule = QuadratureRule::with_degree(quad_degree)?;
    let tab = RefElement::new(2)?.tabulate(&rule);
    let (mut l2, mut semi) = (0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let map = mesh.affine_map(t)?;
        let dofs = &layout.cell_p2[t];
        for (q, pt) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * map.det;
            let x = map.to_physical(*pt);
            let ex = f(x);
            let gx = grad_f(x);
            for c in 0..2 {
                let mut vh = 0.0;
                let mut gh = [0.0; 2];
                for (k, (n, rg)) in tab.values_at(q).iter().zip(tab.grads_at(q)).enumerate() {
                    let coef = coeffs[layout.u_dof(c, dofs[k])];
                    let g = map.physical_gradient(*rg);
                    vh += coef * n;
                    gh[0] += coef * g[0];
                    gh[1] += coef * g[1];
                }
                let e = ex[c] - vh;
                l2 += w * e * e;
                let (a, b) = (gx[c][0] - gh[0], gx[c][1] - gh[1]);
                semi += w * (a * a + b * b);
            }
        }
    }
    Ok(FieldError { l2: libm::sqrt(l2), h1: libm::sqrt(l2 + semi) })
}

/// Displacement and pressure errors at one time node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub u: FieldError,
    pub p: FieldError,
}

impl ErrorNorms {
    pub fn get(&self, field: Field, norm: Norm) -> f64 {
        let f = match field {
            Field::U => &self.u,
            Field::P => &self.p,
        };
        match norm {
            Norm::L2 => f.l2,
            Norm::H1 => f.h1,
        }
    }

    fn max(&self, other: &ErrorNorms) -> ErrorNorms {
        let m = |a: FieldError, b: FieldError| FieldError { l2: a.l2.max(b.l2), h1: a.h1.max(b.h1) };
        ErrorNorms { u: m(self.u, other.u), p: m(self.p, other.p) }
    }
}

pub fn error_norms(
    mesh: &TriMesh,
    layout: &DofLayout,
    u: &[f64],
    p: &[f64],
    exact: &dyn ExactSolution,
    t: f64,
    quad_degree: usize,
) -> Result<ErrorNorms> {
    Ok(ErrorNorms {
        u: p2_vector_error(mesh, layout, u, &|x| exact.u(x, t), &|x| exact.grad_u(x, t), quad_degree)?,
        p: p1_error(mesh, layout, p, &|x| exact.p(x, t), &|x| exact.grad_p(x, t), quad_degree)?,
    })
}

/// Errors of one time node of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub h: f64,
    pub tau: f64,
    pub t: f64,
    pub norms: ErrorNorms,
}

/// Componentwise maximum over all records, R(h, τ).
pub fn max_over_time(records: &[ErrorRecord]) -> Result<ErrorNorms> {
    let first = records.first().ok_or(Error::EmptyInput)?;
    Ok(records.iter().skip(1).fold(first.norms, |acc, r| acc.max(&r.norms)))
}

/// log(e_coarse / e_fine) / log(ratio).
pub fn observed_order(e_coarse: f64, e_fine: f64, ratio: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) || !(e_coarse.is_finite() && e_fine.is_finite()) {
        return Err(Error::OrderUndefined);
    }
    Ok(libm::log(e_coarse / e_fine) / libm::log(ratio))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    U,
    P,
}

impl Field {
    pub fn label(self) -> &'static str {
        match self {
            Field::U => "u",
            Field::P => "p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Norm {
    L2,
    H1,
}

impl Norm {
    pub fn label(self) -> &'static str {
        match self {
            Norm::L2 => "L2",
            Norm::H1 => "H1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub tau: f64,
    pub error: f64,
    /// Order against the previous row; `None` on the first row or when undefined.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub field: Field,
    pub norm: Norm,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Rows from (h, τ, R) triples ordered from coarse to fine; the
    /// refinement ratio of each pair is taken from whichever of h, τ changed.
    pub fn new(field: Field, norm: Norm, levels: &[(f64, f64, ErrorNorms)]) -> ConvergenceTable {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
        for (k, &(h, tau, norms)) in levels.iter().enumerate() {
            let error = norms.get(field, norm);
            let order = if k == 0 {
                None
            } else {
                let prev = &rows[k - 1];
                let ratio = if prev.h != h { prev.h / h } else { prev.tau / tau };
                observed_order(prev.error, error, ratio).ok()
            };
            rows.push(ConvergenceRow { h, tau, error, order });
        }
        ConvergenceTable { field, norm, rows }
    }

    pub fn last_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order)
    }
}
