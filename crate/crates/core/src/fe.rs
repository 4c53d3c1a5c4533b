//! Lagrange reference elements, triangle quadrature and Taylor–Hood dof layout.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::mesh::TriMesh;
use crate::{Error, Result};

/// Lagrange element of order 1 or 2 on the reference triangle.
///
/// Nodes are ordered as the three vertices followed (for P2) by the
/// midpoints of edges (v0,v1), (v1,v2), (v2,v0).
#[derive(Debug, Clone, PartialEq)]
pub struct RefElement {
    order: usize,
    nodes: Vec<[f64; 2]>,
}

// gradients of the barycentric coordinates λ0 = 1 − x − y, λ1 = x, λ2 = y
const BARY_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
const EDGE_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

fn barycentric(p: [f64; 2]) -> [f64; 3] {
    [1.0 - p[0] - p[1], p[0], p[1]]
}

impl RefElement {
    pub fn new(order: usize) -> Result<RefElement> {
        let mut nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        match order {
            1 => {}
            2 => nodes.extend_from_slice(&[[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]]),
            _ => return Err(Error::Config(format!("unsupported Lagrange order {order}"))),
        }
        Ok(RefElement { order, nodes })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn eval(&self, p: [f64; 2], out: &mut [f64]) {
        let l = barycentric(p);
        if self.order == 1 {
            out[..3].copy_from_slice(&l);
            return;
        }
        for i in 0..3 {
            out[i] = l[i] * (2.0 * l[i] - 1.0);
        }
        for (k, &(i, j)) in EDGE_PAIRS.iter().enumerate() {
            out[3 + k] = 4.0 * l[i] * l[j];
        }
    }

    pub fn grad(&self, p: [f64; 2], out: &mut [[f64; 2]]) {
        if self.order == 1 {
            out[..3].copy_from_slice(&BARY_GRAD);
            return;
        }
        let l = barycentric(p);
        for i in 0..3 {
            let s = 4.0 * l[i] - 1.0;
            out[i] = [s * BARY_GRAD[i][0], s * BARY_GRAD[i][1]];
        }
        for (k, &(i, j)) in EDGE_PAIRS.iter().enumerate() {
            out[3 + k] = [
                4.0 * (l[i] * BARY_GRAD[j][0] + l[j] * BARY_GRAD[i][0]),
                4.0 * (l[i] * BARY_GRAD[j][1] + l[j] * BARY_GRAD[i][1]),
            ];
        }
    }

    /// Values and reference gradients at every point of `rule`.
    pub fn tabulate(&self, rule: &QuadratureRule) -> Tabulation {
        let nb = self.node_count();
        let nq = rule.len();
        let mut values = vec![0.0; nq * nb];
        let mut grads = vec![[0.0; 2]; nq * nb];
        for (q, &p) in rule.points.iter().enumerate() {
            self.eval(p, &mut values[q * nb..(q + 1) * nb]);
            self.grad(p, &mut grads[q * nb..(q + 1) * nb]);
        }
        Tabulation { nb, values, grads }
    }
}

/// Constant physical Hessians of the six P2 basis functions, given the
/// physical gradients of the barycentric coordinates.
pub fn p2_hessians(bary_grads: &[[f64; 2]; 3]) -> [[[f64; 2]; 2]; 6] {
    let outer = |a: [f64; 2], b: [f64; 2]| [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]];
    let mut h = [[[0.0; 2]; 2]; 6];
    for i in 0..3 {
        let o = outer(bary_grads[i], bary_grads[i]);
        for r in 0..2 {
            for c in 0..2 {
                h[i][r][c] = 4.0 * o[r][c];
            }
        }
    }
    for (k, &(i, j)) in EDGE_PAIRS.iter().enumerate() {
        let a = outer(bary_grads[i], bary_grads[j]);
        let b = outer(bary_grads[j], bary_grads[i]);
        for r in 0..2 {
            for c in 0..2 {
                h[3 + k][r][c] = 4.0 * (a[r][c] + b[r][c]);
            }
        }
    }
    h
}

pub fn reference_barycentric_gradients() -> [[f64; 2]; 3] {
    BARY_GRAD
}

/// Basis values and reference gradients at quadrature points, row-major by point.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub nb: usize,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

impl Tabulation {
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.nb..(q + 1) * self.nb]
    }

    pub fn grads_at(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.nb..(q + 1) * self.nb]
    }
}

/// Quadrature rule on the reference triangle; weights sum to its area 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

pub const MAX_QUADRATURE_DEGREE: usize = 12;

impl QuadratureRule {
    /// A rule exact for all polynomials of total degree `min_degree`.
    ///
    /// Degrees 1, 2 and 3–5 use the centroid, the 3-point and the 7-point
    /// Radon rules; higher degrees use a collapsed Gauss–Legendre product.
    pub fn with_degree(min_degree: usize) -> Result<QuadratureRule> {
        match min_degree {
            1 => Ok(QuadratureRule {
                points: vec![[1.0 / 3.0, 1.0 / 3.0]],
                weights: vec![0.5],
                exactness_degree: 1,
            }),
            2 => {
                let (a, b) = (1.0 / 6.0, 2.0 / 3.0);
                Ok(QuadratureRule {
                    points: vec![[a, a], [b, a], [a, b]],
                    weights: vec![1.0 / 6.0; 3],
                    exactness_degree: 2,
                })
            }
            3..=5 => Ok(radon7()),
            6..=MAX_QUADRATURE_DEGREE => Ok(collapsed_gauss(min_degree)),
            _ => Err(Error::Config(format!(
                "no triangle quadrature of degree {min_degree} (supported 1..={MAX_QUADRATURE_DEGREE})"
            ))),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn radon7() -> QuadratureRule {
    let s15 = libm::sqrt(15.0);
    let a1 = (6.0 - s15) / 21.0;
    let a2 = (6.0 + s15) / 21.0;
    let w1 = (155.0 - s15) / 2400.0;
    let w2 = (155.0 + s15) / 2400.0;
    let (b1, b2) = (1.0 - 2.0 * a1, 1.0 - 2.0 * a2);
    QuadratureRule {
        points: vec![
            [1.0 / 3.0, 1.0 / 3.0],
            [a1, a1],
            [b1, a1],
            [a1, b1],
            [a2, a2],
            [b2, a2],
            [a2, b2],
        ],
        weights: vec![9.0 / 80.0, w1, w1, w1, w2, w2, w2],
        exactness_degree: 5,
    }
}

/// Duffy-collapsed tensor product of Gauss–Legendre rules:
/// x = s, y = r(1 − s), dA = (1 − s) ds dr.
fn collapsed_gauss(degree: usize) -> QuadratureRule {
    let ms = (degree + 3) / 2;
    let mr = (degree + 2) / 2;
    let (sx, sw) = gauss_legendre_unit(ms);
    let (rx, rw) = gauss_legendre_unit(mr);
    let mut points = Vec::with_capacity(ms * mr);
    let mut weights = Vec::with_capacity(ms * mr);
    for (s, ws) in sx.iter().zip(&sw) {
        for (r, wr) in rx.iter().zip(&rw) {
            points.push([*s, r * (1.0 - s)]);
            weights.push(ws * wr * (1.0 - s));
        }
    }
    QuadratureRule { points, weights, exactness_degree: degree }
}

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on P_m.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m > 0);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let pi = core::f64::consts::PI;
    let legendre = |z: f64| {
        // (P_m(z), P_m'(z))
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=m {
            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        if m == 1 {
            (z, 1.0)
        } else {
            (p1, m as f64 * (z * p1 - p0) / (z * z - 1.0))
        }
    };
    for i in 0..(m + 1) / 2 {
        let mut z = libm::cos(pi * (i as f64 + 0.75) / (m as f64 + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre(z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(z).1;
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [0, 1].
pub fn gauss_legendre_unit(m: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    (x.iter().map(|v| 0.5 * (v + 1.0)).collect(), w.iter().map(|v| 0.5 * v).collect())
}

/// Degree-of-freedom layout of the block vector `[u_x | u_y | ξ | η]`.
///
/// Scalar P2 dofs are the mesh vertices followed by one dof per edge
/// midpoint (keyed by global edge index); P1 dofs are the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    pub r: usize,
    pub p2_count: usize,
    pub p1_count: usize,
    pub xi_offset: usize,
    pub eta_offset: usize,
    pub total: usize,
    pub cell_p2: Vec<[usize; 6]>,
    pub cell_p1: Vec<[usize; 3]>,
}

impl DofLayout {
    pub fn new(mesh: &TriMesh, r: usize) -> Result<DofLayout> {
        if r != 1 {
            return Err(Error::Config(format!(
                "Taylor-Hood pair with r = {r} is not available (only r = 1, P2/P1)"
            )));
        }
        let nv = mesh.num_vertices();
        let p2_count = nv + mesh.num_edges();
        let p1_count = nv;
        let cell_p2 = mesh
            .triangles
            .iter()
            .zip(&mesh.triangle_edges)
            .map(|(t, e)| [t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]])
            .collect();
        let cell_p1 = mesh.triangles.clone();
        let xi_offset = 2 * p2_count;
        let eta_offset = xi_offset + p1_count;
        Ok(DofLayout {
            r,
            p2_count,
            p1_count,
            xi_offset,
            eta_offset,
            total: eta_offset + p1_count,
            cell_p2,
            cell_p1,
        })
    }

    pub fn u_len(&self) -> usize {
        2 * self.p2_count
    }

    /// Global index of displacement component `c` at scalar P2 node `k`.
    pub fn u_dof(&self, c: usize, k: usize) -> usize {
        c * self.p2_count + k
    }

    pub fn xi_dof(&self, k: usize) -> usize {
        self.xi_offset + k
    }

    pub fn eta_dof(&self, k: usize) -> usize {
        self.eta_offset + k
    }

    /// Coordinates of every scalar P2 node.
    pub fn p2_coordinates(&self, mesh: &TriMesh) -> Vec<[f64; 2]> {
        let mut pts = mesh.vertices.clone();
        pts.extend((0..mesh.num_edges()).map(|e| mesh.edge_midpoint(e)));
        pts
    }
}
