//! Structured five-point operators on cell grids and a preconditioned
//! conjugate gradient solver with an aggregation multigrid V-cycle.
//!
//! Cells are indexed column-major, `c = i·ny + j`, so each grid column is
//! contiguous. Reductions run over fixed-size chunks whose partial sums are
//! combined in index order, which makes every result independent of the
//! number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

const CHUNK: usize = 4096;

/// Symmetric five-point operator
/// `(Au)_c = diag_c u_c − Σ g_face u_neighbor`.
#[derive(Clone, Debug)]
pub struct Operator<T> {
    pub nx: usize,
    pub ny: usize,
    /// Conductance between `(i, j)` and `(i + 1, j)`, at `i·ny + j`.
    pub gx: Vec<T>,
    /// Conductance between `(i, j)` and `(i, j + 1)`, at `i·(ny−1) + j`.
    pub gy: Vec<T>,
    pub diag: Vec<T>,
    /// Inactive cells are decoupled identity rows.
    pub active: Vec<bool>,
}

impl<T: Real> Operator<T> {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    fn gx_at(&self, i: usize, j: usize) -> T {
        self.gx[i * self.ny + j]
    }

    #[inline]
    fn gy_at(&self, i: usize, j: usize) -> T {
        self.gy[i * (self.ny - 1) + j]
    }

    /// `out = A u`.
    pub fn apply(&self, u: &[T], out: &mut [T]) {
        let ny = self.ny;
        let nx = self.nx;
        out.par_chunks_mut(ny).enumerate().for_each(|(i, col)| {
            let base = i * ny;
            for j in 0..ny {
                let c = base + j;
                let mut acc = self.diag[c] * u[c];
                if i > 0 {
                    acc = acc - self.gx_at(i - 1, j) * u[c - ny];
                }
                if i + 1 < nx {
                    acc = acc - self.gx_at(i, j) * u[c + ny];
                }
                if j > 0 {
                    acc = acc - self.gy_at(i, j - 1) * u[c - 1];
                }
                if j + 1 < ny {
                    acc = acc - self.gy_at(i, j) * u[c + 1];
                }
                col[j] = acc;
            }
        });
    }

    /// Galerkin coarsening with piecewise-constant 2×2 aggregates.
    fn coarsen(&self) -> Operator<T> {
        let (nx, ny) = (self.nx, self.ny);
        let ncx = nx.div_ceil(2);
        let ncy = ny.div_ceil(2);
        let mut diag = vec![T::zero(); ncx * ncy];
        let mut active = vec![false; ncx * ncy];
        let mut gx = vec![T::zero(); ncx.saturating_sub(1) * ncy];
        let mut gy = vec![T::zero(); ncx * ncy.saturating_sub(1)];
        for i in 0..nx {
            for j in 0..ny {
                let c = i * ny + j;
                if !self.active[c] {
                    continue;
                }
                let cc = (i / 2) * ncy + j / 2;
                active[cc] = true;
                diag[cc] = diag[cc] + self.diag[c];
            }
        }
        for i in 0..nx.saturating_sub(1) {
            for j in 0..ny {
                let g = self.gx_at(i, j);
                if g == T::zero() {
                    continue;
                }
                let (ia, ib) = (i / 2, (i + 1) / 2);
                let jc = j / 2;
                if ia == ib {
                    let cc = ia * ncy + jc;
                    diag[cc] = diag[cc] - g - g;
                } else {
                    gx[ia * ncy + jc] = gx[ia * ncy + jc] + g;
                }
            }
        }
        for i in 0..nx {
            for j in 0..ny.saturating_sub(1) {
                let g = self.gy_at(i, j);
                if g == T::zero() {
                    continue;
                }
                let (ja, jb) = (j / 2, (j + 1) / 2);
                let ic = i / 2;
                if ja == jb {
                    let cc = ic * ncy + ja;
                    diag[cc] = diag[cc] - g - g;
                } else {
                    gy[ic * (ncy - 1) + ja] = gy[ic * (ncy - 1) + ja] + g;
                }
            }
        }
        for (d, a) in diag.iter_mut().zip(&active) {
            if !*a {
                *d = T::one();
            }
        }
        Operator {
            nx: ncx,
            ny: ncy,
            gx,
            gy,
            diag,
            active,
        }
    }

    /// Solves the tridiagonal system of column `i` in place:
    /// `u_col = T_i^{-1} (rhs_col + x-coupling)`.
    fn column_solve(
        &self,
        i: usize,
        f: &[T],
        u_left: Option<&[T]>,
        u_right: Option<&[T]>,
        col: &mut [T],
        work: &mut [T],
    ) {
        let ny = self.ny;
        let base = i * ny;
        // Thomas algorithm; `work` holds the modified super-diagonal.
        let mut prev_c = T::zero();
        let mut prev_d = T::zero();
        for j in 0..ny {
            let c = base + j;
            let mut rhs = f[c];
            if let Some(l) = u_left {
                rhs = rhs + self.gx_at(i - 1, j) * l[j];
            }
            if let Some(r) = u_right {
                rhs = rhs + self.gx_at(i, j) * r[j];
            }
            let lower = if j > 0 {
                -self.gy_at(i, j - 1)
            } else {
                T::zero()
            };
            let upper = if j + 1 < ny {
                -self.gy_at(i, j)
            } else {
                T::zero()
            };
            let denom = self.diag[c] - lower * prev_c;
            let cj = upper / denom;
            let dj = (rhs - lower * prev_d) / denom;
            work[j] = cj;
            col[j] = dj;
            prev_c = cj;
            prev_d = dj;
        }
        for j in (0..ny.saturating_sub(1)).rev() {
            col[j] = col[j] - work[j] * col[j + 1];
        }
    }

    /// One zebra line Gauss–Seidel sweep over columns of the given parity
    /// order.
    fn zebra(&self, f: &[T], u: &mut [T], order: [usize; 2]) {
        let ny = self.ny;
        let nx = self.nx;
        for parity in order {
            // Columns of one colour only couple to the other colour.
            let snapshot: Vec<T> = u.to_vec();
            u.par_chunks_mut(ny)
                .enumerate()
                .filter(|(i, _)| i % 2 == parity)
                .for_each_init(
                    || vec![T::zero(); ny],
                    |work, (i, col)| {
                        let left = (i > 0).then(|| &snapshot[(i - 1) * ny..i * ny]);
                        let right = (i + 1 < nx).then(|| &snapshot[(i + 1) * ny..(i + 2) * ny]);
                        self.column_solve(i, f, left, right, col, work);
                    },
                );
        }
    }
}

/// Dense Cholesky factor of a small SPD operator.
struct DenseCholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Real> DenseCholesky<T> {
    fn new(op: &Operator<T>) -> Result<Self> {
        let n = op.len();
        let mut a = vec![T::zero(); n * n];
        let ny = op.ny;
        for i in 0..op.nx {
            for j in 0..ny {
                let c = i * ny + j;
                a[c * n + c] = op.diag[c];
                if i + 1 < op.nx {
                    let g = op.gx_at(i, j);
                    a[c * n + c + ny] = -g;
                    a[(c + ny) * n + c] = -g;
                }
                if j + 1 < ny {
                    let g = op.gy_at(i, j);
                    a[c * n + c + 1] = -g;
                    a[(c + 1) * n + c] = -g;
                }
            }
        }
        for k in 0..n {
            let mut d = a[k * n + k];
            for m in 0..k {
                d = d - a[k * n + m] * a[k * n + m];
            }
            if d <= T::zero() {
                return Err(Error::Solver(
                    "coarse operator is not positive definite".into(),
                ));
            }
            let d = d.sqrt();
            a[k * n + k] = d;
            for r in (k + 1)..n {
                let mut s = a[r * n + k];
                for m in 0..k {
                    s = s - a[r * n + m] * a[k * n + m];
                }
                a[r * n + k] = s / d;
            }
        }
        Ok(Self { n, l: a })
    }

    fn solve(&self, b: &[T], x: &mut [T]) {
        let n = self.n;
        for r in 0..n {
            let mut s = b[r];
            for m in 0..r {
                s = s - self.l[r * n + m] * x[m];
            }
            x[r] = s / self.l[r * n + r];
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for m in (r + 1)..n {
                s = s - self.l[m * n + r] * x[m];
            }
            x[r] = s / self.l[r * n + r];
        }
    }
}

/// Aggregation multigrid hierarchy used as a CG preconditioner.
pub struct Multigrid<T> {
    levels: Vec<Operator<T>>,
    coarse: DenseCholesky<T>,
    /// Over-correction factor for the coarse-grid update.
    pub alpha: T,
}

const COARSEST: usize = 512;

impl<T: Real> Multigrid<T> {
    pub fn new(fine: Operator<T>) -> Result<Self> {
        let mut levels = vec![fine];
        loop {
            let last = levels.last().expect("nonempty");
            if last.len() <= COARSEST || (last.nx <= 2 && last.ny <= 2) {
                break;
            }
            let next = last.coarsen();
            levels.push(next);
        }
        let coarse = DenseCholesky::new(levels.last().expect("nonempty"))?;
        Ok(Self {
            levels,
            coarse,
            alpha: T::lit(1.8),
        })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn fine(&self) -> &Operator<T> {
        &self.levels[0]
    }

    /// `z ≈ A⁻¹ r` by one symmetric V-cycle.
    pub fn precondition(&self, r: &[T], z: &mut [T]) {
        self.vcycle(0, r, z);
    }

    fn vcycle(&self, level: usize, f: &[T], u: &mut [T]) {
        if level + 1 == self.levels.len() {
            self.coarse.solve(f, u);
            return;
        }
        let op = &self.levels[level];
        u.iter_mut().for_each(|x| *x = T::zero());
        op.zebra(f, u, [0, 1]);
        let mut au = vec![T::zero(); op.len()];
        op.apply(u, &mut au);
        let coarse = &self.levels[level + 1];
        let mut fc = vec![T::zero(); coarse.len()];
        restrict(op, coarse, f, &au, &mut fc);
        let mut uc = vec![T::zero(); coarse.len()];
        self.vcycle(level + 1, &fc, &mut uc);
        prolong_add(op, coarse, &uc, self.alpha, u);
        op.zebra(f, u, [1, 0]);
    }
}

fn restrict<T: Real>(fine: &Operator<T>, coarse: &Operator<T>, f: &[T], au: &[T], fc: &mut [T]) {
    let ny = fine.ny;
    let ncy = coarse.ny;
    fc.par_chunks_mut(ncy).enumerate().for_each(|(ic, col)| {
        for i in [2 * ic, 2 * ic + 1] {
            if i >= fine.nx {
                continue;
            }
            for j in 0..ny {
                let c = i * ny + j;
                if fine.active[c] {
                    col[j / 2] = col[j / 2] + f[c] - au[c];
                }
            }
        }
    });
}

fn prolong_add<T: Real>(fine: &Operator<T>, coarse: &Operator<T>, uc: &[T], alpha: T, u: &mut [T]) {
    let ny = fine.ny;
    let ncy = coarse.ny;
    u.par_chunks_mut(ny).enumerate().for_each(|(i, col)| {
        let base = i * ny;
        for j in 0..ny {
            if fine.active[base + j] {
                col[j] = col[j] + alpha * uc[(i / 2) * ncy + j / 2];
            }
        }
    });
}

/// Dot product with a fixed reduction order.
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let partial: Vec<T> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).fold(T::zero(), |acc, (&p, &q)| acc + p * q))
        .collect();
    partial.into_iter().fold(T::zero(), |acc, v| acc + v)
}

fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(yc, xc)| {
            yc.iter_mut()
                .zip(xc)
                .for_each(|(a, &b)| *a = *a + alpha * b)
        });
}

/// Convergence record of a CG solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Preconditioned conjugate gradients from `u = 0`.
pub fn pcg<T: Real>(
    mg: &Multigrid<T>,
    b: &[T],
    rtol: f64,
    max_iter: usize,
) -> Result<(Vec<T>, SolveStats)> {
    let op = mg.fine();
    let n = op.len();
    let mut u = vec![T::zero(); n];
    let bnorm = dot(b, b).sqrt();
    if bnorm == T::zero() {
        return Ok((
            u,
            SolveStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let tol = T::lit(rtol) * bnorm;
    let mut r = b.to_vec();
    let mut z = vec![T::zero(); n];
    mg.precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    for it in 1..=max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            return Err(Error::Solver(
                "operator or preconditioner lost definiteness".into(),
            ));
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut u);
        axpy(-alpha, &ap, &mut r);
        let rnorm = dot(&r, &r).sqrt();
        if rnorm <= tol {
            return Ok((
                u,
                SolveStats {
                    iterations: it,
                    relative_residual: (rnorm / bnorm).as_f64(),
                },
            ));
        }
        mg.precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_chunks_mut(CHUNK)
            .zip(z.par_chunks(CHUNK))
            .for_each(|(pc, zc)| {
                pc.iter_mut()
                    .zip(zc)
                    .for_each(|(pv, &zv)| *pv = zv + beta * *pv)
            });
    }
    Err(Error::Solver(format!(
        "no convergence after {max_iter} iterations"
    )))
}
