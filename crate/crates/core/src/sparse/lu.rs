//! Left-looking sparse LU with threshold partial pivoting (Gilbert–Peierls).
//!
//! Rows are equilibrated to unit max-norm before factorization and the
//! columns are permuted by nested dissection. The factorization satisfies
//! `P · R · A · Q = L · U` with `R` the row scaling.

use alloc::vec;
use alloc::vec::Vec;

use super::{nested_dissection, Csr};
use crate::{Error, Result};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuOptions {
    /// A diagonal pivot is kept when it is at least this fraction of the
    /// largest candidate in its column.
    pub pivot_threshold: f64,
    /// Number of iterative refinement sweeps applied by [`SparseLu::solve`].
    pub refinement_steps: usize,
}

impl Default for LuOptions {
    fn default() -> LuOptions {
        LuOptions { pivot_threshold: 1e-3, refinement_steps: 1 }
    }
}

// compressed columns, built by appending
struct Factor {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

pub struct SparseLu {
    n: usize,
    a: Csr,
    row_scale: Vec<f64>,
    // pinv[i] = pivot position of original row i
    pinv: Vec<usize>,
    q: Vec<usize>,
    l: Factor,
    u: Factor,
    options: LuOptions,
}

impl core::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SparseLu")
            .field("n", &self.n)
            .field("nnz_l", &self.l.val.len())
            .field("nnz_u", &self.u.val.len())
            .finish()
    }
}

impl SparseLu {
    pub fn factorize(a: &Csr) -> Result<SparseLu> {
        SparseLu::factorize_with(a, None, LuOptions::default())
    }

    /// Factorizes `a`; `priority` is forwarded to the ordering.
    pub fn factorize_with(a: &Csr, priority: Option<&[u8]>, options: LuOptions) -> Result<SparseLu> {
        if a.nrows != a.ncols {
            return Err(Error::DimensionMismatch { expected: a.nrows, found: a.ncols });
        }
        let n = a.nrows;
        let mut row_scale = vec![0.0; n];
        for (i, s) in row_scale.iter_mut().enumerate() {
            let m = a.row(i).1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m == 0.0 || !m.is_finite() {
                return Err(Error::SingularMatrix { column: i });
            }
            *s = 1.0 / m;
        }
        let q = nested_dissection(a, priority);
        // column-compressed copy of R·A
        let at = a.transpose();
        let col = |j: usize| {
            let (rows, vals) = at.row(j);
            rows.iter().zip(vals).map(|(&i, &v)| (i, v * row_scale[i]))
        };

        let mut pinv = vec![NONE; n];
        let mut l = Factor { ptr: Vec::with_capacity(n + 1), idx: Vec::new(), val: Vec::new() };
        let mut u = Factor { ptr: Vec::with_capacity(n + 1), idx: Vec::new(), val: Vec::new() };
        let mut x = vec![0.0; n];
        let mut xi = vec![0usize; 2 * n];
        let mut pstack = vec![0usize; n];
        let mut mark = vec![0usize; n];
        let mut generation = 0usize;

        for k in 0..n {
            l.ptr.push(l.idx.len());
            u.ptr.push(u.idx.len());
            let c = q[k];
            generation += 1;
            // nonzero pattern of L \ A(:, c), in topological order xi[top..n]
            let mut top = n;
            for (i, _) in col(c) {
                if mark[i] != generation {
                    top = reach_dfs(i, &l, &pinv, top, &mut xi, &mut pstack, &mut mark, generation);
                }
            }
            for &i in &xi[top..n] {
                x[i] = 0.0;
            }
            for (i, v) in col(c) {
                x[i] = v;
            }
            for px in top..n {
                let j = xi[px];
                let jj = pinv[j];
                if jj == NONE {
                    continue;
                }
                // unit diagonal stored first
                let xj = x[j];
                for p in l.ptr[jj] + 1..l.ptr[jj + 1] {
                    x[l.idx[p]] -= l.val[p] * xj;
                }
            }
            let mut ipiv = NONE;
            let mut amax = -1.0f64;
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    let t = x[i].abs();
                    if t > amax {
                        amax = t;
                        ipiv = i;
                    }
                } else {
                    u.idx.push(pinv[i]);
                    u.val.push(x[i]);
                }
            }
            if ipiv == NONE || amax <= 0.0 || !amax.is_finite() {
                return Err(Error::SingularMatrix { column: c });
            }
            if pinv[c] == NONE && x[c].abs() >= amax * options.pivot_threshold {
                ipiv = c;
            }
            let pivot = x[ipiv];
            u.idx.push(k);
            u.val.push(pivot);
            pinv[ipiv] = k;
            l.idx.push(ipiv);
            l.val.push(1.0);
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    l.idx.push(i);
                    l.val.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
        }
        l.ptr.push(l.idx.len());
        u.ptr.push(u.idx.len());
        for r in l.idx.iter_mut() {
            *r = pinv[*r];
        }
        Ok(SparseLu { n, a: a.clone(), row_scale, pinv, q, l, u, options })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries in L and U.
    pub fn fill(&self) -> usize {
        self.l.val.len() + self.u.val.len()
    }

    fn solve_once(&self, b: &[f64], out: &mut [f64], work: &mut [f64]) {
        for i in 0..self.n {
            work[self.pinv[i]] = b[i] * self.row_scale[i];
        }
        for j in 0..self.n {
            let xj = work[j];
            if xj != 0.0 {
                for p in self.l.ptr[j] + 1..self.l.ptr[j + 1] {
                    work[self.l.idx[p]] -= self.l.val[p] * xj;
                }
            }
        }
        for j in (0..self.n).rev() {
            let last = self.u.ptr[j + 1] - 1;
            work[j] /= self.u.val[last];
            let xj = work[j];
            if xj != 0.0 {
                for p in self.u.ptr[j]..last {
                    work[self.u.idx[p]] -= self.u.val[p] * xj;
                }
            }
        }
        for k in 0..self.n {
            out[self.q[k]] = work[k];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: b.len() });
        }
        let mut x = vec![0.0; self.n];
        let mut work = vec![0.0; self.n];
        self.solve_once(b, &mut x, &mut work);
        let mut r = vec![0.0; self.n];
        let mut dx = vec![0.0; self.n];
        for _ in 0..self.options.refinement_steps {
            self.a.matvec_into(&x, &mut r);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri = bi - *ri;
            }
            self.solve_once(&r, &mut dx, &mut work);
            for (xi, d) in x.iter_mut().zip(&dx) {
                *xi += d;
            }
        }
        Ok(x)
    }

    /// ‖b − A x‖∞ / (‖A‖∞ ‖x‖∞ + ‖b‖∞), the normwise backward error.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.a.matvec(x);
        let res = ax.iter().zip(b).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let anorm = (0..self.n)
            .map(|i| self.a.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let denom = anorm * super::norm_inf(x) + super::norm_inf(b);
        if denom == 0.0 {
            res
        } else {
            res / denom
        }
    }
}

// Depth-first search from original row `j` through the columns of L that
// are already pivotal; pushes finished vertices onto xi[..top] from the top.
#[allow(clippy::too_many_arguments)]
fn reach_dfs(
    j: usize,
    l: &Factor,
    pinv: &[usize],
    mut top: usize,
    xi: &mut [usize],
    pstack: &mut [usize],
    mark: &mut [usize],
    generation: usize,
) -> usize {
    let mut head = 0usize;
    xi[0] = j;
    loop {
        let j = xi[head];
        let jj = pinv[j];
        if mark[j] != generation {
            mark[j] = generation;
            pstack[head] = if jj == NONE { 0 } else { l.ptr[jj] + 1 };
        }
        let end = if jj == NONE { 0 } else { l.ptr[jj + 1] };
        let mut done = true;
        let mut p = pstack[head];
        while p < end {
            let i = l.idx[p];
            p += 1;
            if mark[i] != generation {
                pstack[head] = p;
                head += 1;
                xi[head] = i;
                done = false;
                break;
            }
        }
        if done {
            top -= 1;
            xi[top] = j;
            if head == 0 {
                return top;
            }
            head -= 1;
        }
    }
}
