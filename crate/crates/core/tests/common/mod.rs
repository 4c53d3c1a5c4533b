#![allow(dead_code)]

use poroelastic_core::mms::{derive_params, ExactSolution, PhysicalParams, RawParams};
use poroelastic_core::sparse::Csr;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Parameters of order one, so that every block of the system is visible.
pub fn balanced_params() -> PhysicalParams {
    derive_params(RawParams {
        lambda_star: 0.3,
        young: 10.0,
        poisson: 0.3,
        alpha: 0.8,
        c0: 0.4,
        permeability: 0.7,
        fluid_viscosity: 1.3,
        rho_g: [0.0, 0.0],
    })
    .unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// u = (1+t)(a₀ + a₁x + a₂y, b₀ + b₁x + b₂y), p = c(1+t): affine in space and
/// time, so ξ and η are constant in space.
#[derive(Debug, Clone, Copy)]
pub struct AffineSolution {
    pub params: PhysicalParams,
    pub a: [[f64; 3]; 2],
    pub c: f64,
}

impl ExactSolution for AffineSolution {
    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn u(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let s = 1.0 + t;
        [0, 1].map(|k| s * (self.a[k][0] + self.a[k][1] * x[0] + self.a[k][2] * x[1]))
    }

    fn grad_u(&self, _x: [f64; 2], t: f64) -> [[f64; 2]; 2] {
        let s = 1.0 + t;
        [0, 1].map(|k| [s * self.a[k][1], s * self.a[k][2]])
    }

    fn p(&self, _x: [f64; 2], t: f64) -> f64 {
        self.c * (1.0 + t)
    }

    fn grad_p(&self, _x: [f64; 2], _t: f64) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn div_u_t(&self, _x: [f64; 2], _t: f64) -> f64 {
        self.a[0][1] + self.a[1][2]
    }

    fn body_force(&self, _x: [f64; 2], _t: f64) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn source(&self, x: [f64; 2], t: f64) -> f64 {
        let r = &self.params.raw;
        r.c0 * self.c + r.alpha * self.div_u_t(x, t)
    }
}

/// Dense Cholesky; false if a pivot is not positive.
pub fn is_positive_definite(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if d <= 0.0 {
            return false;
        }
        l[j][j] = d.sqrt();
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / l[j][j];
        }
    }
    true
}

/// Dense submatrix on the kept indices.
pub fn restrict(a: &Csr, keep: &[usize]) -> Vec<Vec<f64>> {
    keep.iter().map(|&i| keep.iter().map(|&j| a.get(i, j)).collect()).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
