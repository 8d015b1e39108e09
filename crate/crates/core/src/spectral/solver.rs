//! Dense real-symmetric eigensolvers.
//!
//! Two independent routes are provided: cyclic Jacobi rotations, and
//! Householder tridiagonalization followed by the implicit QL iteration.
//! [`Solver::Auto`] uses Jacobi up to [`JACOBI_AUTO_LIMIT`] rows and the
//! tridiagonal route above it, where Jacobi's per-sweep cost dominates.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::par::{self, Execution};

use super::eigensystem::{grouping_tolerance, EigenSystem, Spectrum};

pub const JACOBI_AUTO_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Jacobi,
    Householder,
    Auto,
}

#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    /// Symmetry tolerance and Jacobi stopping threshold, both relative to `‖A‖_F`.
    pub tol: f64,
    pub max_sweeps: usize,
    pub solver: Solver,
    pub exec: Execution,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_sweeps: 100,
            solver: Solver::Auto,
            exec: Execution::default(),
        }
    }
}

impl EigOptions {
    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    fn resolve(&self, n: usize) -> Solver {
        match self.solver {
            Solver::Auto if n <= JACOBI_AUTO_LIMIT => Solver::Jacobi,
            Solver::Auto => Solver::Householder,
            s => s,
        }
    }
}

/// Full eigen-decomposition with the default solver choice.
pub fn symmetric_eig(a: &Matrix<f64>, tol: f64) -> Result<EigenSystem> {
    symmetric_eig_with(
        a,
        &EigOptions {
            tol,
            ..EigOptions::default()
        },
    )
}

pub fn symmetric_eig_with(a: &Matrix<f64>, opts: &EigOptions) -> Result<EigenSystem> {
    let norm = validate(a, opts.tol)?;
    let (values, vectors) = match opts.resolve(a.rows()) {
        Solver::Jacobi => jacobi(a, norm, opts, true)?,
        _ => householder_ql(a, opts.exec, true)?,
    };
    EigenSystem::from_pairs(&values, &vectors.expect("vectors requested"), grouping_tolerance(norm))
}

/// Eigenvalues only (no vector accumulation), grouped.
pub fn symmetric_spectrum(a: &Matrix<f64>, opts: &EigOptions) -> Result<Spectrum> {
    let norm = validate(a, opts.tol)?;
    let (values, _) = match opts.resolve(a.rows()) {
        Solver::Jacobi => jacobi(a, norm, opts, false)?,
        _ => householder_ql(a, opts.exec, false)?,
    };
    Ok(Spectrum::from_values(&values, grouping_tolerance(norm)))
}

fn validate(a: &Matrix<f64>, tol: f64) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let norm = a.frobenius_norm();
    let asym = a.max_asymmetry();
    if asym > tol * norm.max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(norm)
}

type Decomposition = (Vec<f64>, Option<Matrix<f64>>);

/// Cyclic Jacobi; stops when the off-diagonal Frobenius norm drops below
/// `tol · ‖A‖_F`.
fn jacobi(a0: &Matrix<f64>, norm: f64, opts: &EigOptions, want_vectors: bool) -> Result<Decomposition> {
    let n = a0.rows();
    let mut a = a0.clone();
    let mut v = want_vectors.then(|| Matrix::identity(n));
    let threshold = opts.tol * norm;
    let mut converged = false;
    for _ in 0..opts.max_sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += 2.0 * a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_columns(&mut a, p, q, c, s);
                rotate_rows(&mut a, p, q, c, s);
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, p, q, c, s);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(opts.max_sweeps));
    }
    let values = (0..n).map(|i| a[(i, i)]).collect();
    Ok((values, v))
}

fn rotate_columns(m: &mut Matrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.rows() {
        let row = m.row_mut(k);
        let (xp, xq) = (row[p], row[q]);
        row[p] = c * xp - s * xq;
        row[q] = s * xp + c * xq;
    }
}

fn rotate_rows(m: &mut Matrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let cols = m.cols();
    let data = m.as_mut_slice();
    let (head, tail) = data.split_at_mut(q * cols);
    let rp = &mut head[p * cols..(p + 1) * cols];
    let rq = &mut tail[..cols];
    for (xp, xq) in rp.iter_mut().zip(rq.iter_mut()) {
        let (a, b) = (*xp, *xq);
        *xp = c * a - s * b;
        *xq = s * a + c * b;
    }
}

/// Householder reduction to tridiagonal form and implicit QL with Wilkinson
/// shifts. Works on `z`, which holds the transformation transposed: row `j`
/// of `z` is column `j` of the orthogonal factor, so every inner loop walks
/// contiguous memory.
fn householder_ql(a: &Matrix<f64>, exec: Execution, want_vectors: bool) -> Result<Decomposition> {
    let n = a.rows();
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(|| Matrix::zeros(0, 0))));
    }
    // a is symmetric, so its transpose is itself.
    let mut z = a.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut z, n, &mut d, &mut e, exec, want_vectors);
    tql(&mut z, n, &mut d, &mut e, want_vectors)?;
    let vectors = want_vectors.then(|| Matrix::from_fn(n, n, |k, j| z[j * n + k]));
    Ok((d, vectors))
}

fn tridiagonalize(z: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], exec: Execution, want_vectors: bool) {
    // v(k, j) = z[j * n + k]
    for j in 0..n {
        d[j] = z[j * n + (n - 1)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = z[j * n + (i - 1)];
                z[j * n + i] = 0.0;
                z[i * n + j] = 0.0;
            }
        } else {
            for x in d[..i].iter_mut() {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);
            for j in 0..i {
                f = d[j];
                z[i * n + j] = f;
                let col = &z[j * n..j * n + i];
                g = e[j] + col[j] * f;
                for k in j + 1..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            {
                let (dd, ee) = (&*d, &*e);
                par::for_each_row(exec, &mut z[..i * n], n, |j, col| {
                    let (f, g) = (dd[j], ee[j]);
                    for k in j..i {
                        col[k] -= f * ee[k] + g * dd[k];
                    }
                });
            }
            for j in 0..i {
                d[j] = z[j * n + (i - 1)];
                z[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }

    if !want_vectors {
        for i in 0..n {
            d[i] = z[i * n + i];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        z[i * n + (n - 1)] = z[i * n + i];
        z[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = z[(i + 1) * n + k] / h;
            }
            let (head, tail) = z.split_at_mut((i + 1) * n);
            let pivot = &tail[..n];
            let dd = &*d;
            par::for_each_row(exec, &mut head[..(i + 1) * n], n, |_, col| {
                let g: f64 = (0..=i).map(|k| pivot[k] * col[k]).sum();
                for k in 0..=i {
                    col[k] -= g * dd[k];
                }
            });
        }
        for k in 0..=i {
            z[(i + 1) * n + k] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = z[j * n + (n - 1)];
        z[j * n + (n - 1)] = 0.0;
    }
    z[(n - 1) * n + (n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql(z: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], want_vectors: bool) -> Result<()> {
    const MAX_ITER: usize = 60;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_ITER {
                    return Err(Error::NoConvergence(MAX_ITER));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in d[l + 2..].iter_mut() {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if want_vectors {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let vi = &mut lo[i * n..];
                        let vi1 = &mut hi[..n];
                        for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Matrix<f64> {
        Matrix::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn diagonal_input() {
        let a = Matrix::from_vec(2, 2, vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        for solver in [Solver::Jacobi, Solver::Householder] {
            let s = symmetric_eig_with(&a, &EigOptions::default().with_solver(solver)).unwrap();
            assert_eq!(s.values(), &[3.0, 1.0]);
            assert!((s.vector(0)[0] - 1.0).abs() < 1e-15);
            assert!((s.vector(1)[1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn k2_spectrum() {
        for solver in [Solver::Jacobi, Solver::Householder] {
            let s = symmetric_eig_with(&k2(), &EigOptions::default().with_solver(solver)).unwrap();
            assert!((s.values()[0] - 1.0).abs() < 1e-14);
            assert!((s.values()[1] + 1.0).abs() < 1e-14);
            assert!(s.max_residual(&k2()) < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let a = Matrix::from_vec(2, 2, vec![0.0, 1.0, 0.5, 0.0]).unwrap();
        assert!(matches!(symmetric_eig(&a, 1e-12), Err(Error::NotSymmetric(_))));
        let b = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(symmetric_eig(&b, 1e-12), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn jacobi_sweep_cap() {
        let a = Matrix::from_vec(3, 3, vec![1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]).unwrap();
        let opts = EigOptions {
            max_sweeps: 1,
            solver: Solver::Jacobi,
            ..EigOptions::default()
        };
        assert!(matches!(symmetric_eig_with(&a, &opts), Err(Error::NoConvergence(1))));
    }

    #[test]
    fn empty_and_scalar() {
        let a = Matrix::from_vec(1, 1, vec![-2.5]).unwrap();
        for solver in [Solver::Jacobi, Solver::Householder] {
            let s = symmetric_eig_with(&a, &EigOptions::default().with_solver(solver)).unwrap();
            assert_eq!(s.values(), &[-2.5]);
        }
    }

    #[test]
    fn spectrum_only_matches_full() {
        let n = 40;
        let a = Matrix::from_fn(n, n, |i, j| ((i * 7 + j * 7 + i * j) % 11) as f64 - 5.0);
        for solver in [Solver::Jacobi, Solver::Householder] {
            let opts = EigOptions::default().with_solver(solver);
            let full = symmetric_eig_with(&a, &opts).unwrap();
            let vals = symmetric_spectrum(&a, &opts).unwrap();
            assert!(full.spectrum().max_abs_diff(&vals).unwrap() < 1e-10);
            assert!(full.max_residual(&a) < 1e-10);
            assert!(full.orthonormality_error() < 1e-12);
        }
    }
}
