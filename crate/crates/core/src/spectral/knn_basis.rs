//! Explicit eigenbasis of `K_{n,n}` and of its total graph.
//!
//! Root vertices `0..n` are the first part (`1..n`), `n..2n` the second part
//! (`1'..n'`); edge `e_{i,j}` (1-based) has index `(i − 1) n + (j − 1)`.

use crate::error::{Error, Result};
use crate::graph::{complete_bipartite, incidence_matrix, Graph};
use crate::matrix::Matrix;

use super::eigensystem::{grouping_tolerance, EigenSystem};
use super::total::{theta_pair, total_eigenvectors_regular};

#[derive(Debug, Clone)]
pub struct KnnEigenbasis {
    n: usize,
    /// Eigenvalue `n`: uniform vector.
    pub top: Vec<f64>,
    /// Eigenvalue `0`: `v_1..v_{n-1}` followed by `v_{1'}..v_{(n-1)'}`.
    pub zero_space: Vec<Vec<f64>>,
    /// Eigenvalue `−n`: `+1` on the first part, `−1` on the second.
    pub bottom: Vec<f64>,
    pub theta0_plus: f64,
    pub theta0_minus: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
}

/// `v_k` on `n` slots (1-based `k < n`): `√(k/(k+1)) (|k+1⟩ − Σ_{i≤k} |i⟩ / k)`.
fn staircase(n: usize, k: usize) -> Vec<f64> {
    let kf = k as f64;
    let scale = (kf / (kf + 1.0)).sqrt();
    let mut v = vec![0.0; n];
    for x in v.iter_mut().take(k) {
        *x = -scale / kf;
    }
    v[k] = scale;
    v
}

/// `h_{i,j} = ij / (ij + i + j + 1)`.
pub fn kernel_weight(i: usize, j: usize) -> f64 {
    let (i, j) = (i as f64, j as f64);
    i * j / (i * j + i + j + 1.0)
}

impl KnnEigenbasis {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize("K_{n,n} eigenbasis needs n >= 2".into()));
        }
        let nf = n as f64;
        let s = 1.0 / (2.0 * nf).sqrt();
        let top = vec![s; 2 * n];
        let bottom: Vec<f64> = (0..2 * n).map(|i| if i < n { s } else { -s }).collect();

        let mut zero_space = Vec::with_capacity(2 * n - 2);
        for k in 1..n {
            let mut v = staircase(n, k);
            v.resize(2 * n, 0.0);
            zero_space.push(v);
        }
        for k in 1..n {
            let mut v = vec![0.0; n];
            v.extend(staircase(n, k));
            zero_space.push(v);
        }

        let disc = (nf * nf + 4.0).sqrt();
        Ok(Self {
            n,
            top,
            zero_space,
            bottom,
            theta0_plus: (nf - 2.0 + disc) / 2.0,
            theta0_minus: (nf - 2.0 - disc) / 2.0,
            delta_plus: (nf * nf + 4.0 + (2.0 - nf) * disc) / 2.0,
            delta_minus: (nf * nf + 4.0 - (2.0 - nf) * disc) / 2.0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root_graph(&self) -> Graph {
        complete_bipartite(self.n, self.n).expect("n >= 2")
    }

    /// Root eigenpairs `(λ, v)`: `n`, then the `2n − 2` zero vectors, then `−n`.
    pub fn root_pairs(&self) -> Vec<(f64, &[f64])> {
        let nf = self.n as f64;
        let mut out = vec![(nf, self.top.as_slice())];
        out.extend(self.zero_space.iter().map(|v| (0.0, v.as_slice())));
        out.push((-nf, self.bottom.as_slice()));
        out
    }

    pub fn root_eigensystem(&self) -> EigenSystem {
        let pairs = self.root_pairs();
        let dim = 2 * self.n;
        let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let basis = Matrix::from_fn(dim, pairs.len(), |i, k| pairs[k].1[i]);
        EigenSystem::from_pairs(&values, &basis, grouping_tolerance(self.n as f64)).expect("shapes agree")
    }

    /// Kernel of the incidence matrix, `w_{i,j}` for `i, j ∈ 1..n-1`,
    /// ordered with `i` major.
    pub fn kernel(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let m = n * n;
        let mut kernel = Vec::with_capacity((n - 1) * (n - 1));
        for i in 1..n {
            for j in 1..n {
                let h = kernel_weight(i, j).sqrt();
                let mut w = vec![0.0; m];
                for k1 in 1..=i + 1 {
                    for k2 in 1..=j + 1 {
                        let a = if k1 == i + 1 { -(i as f64) } else { 1.0 };
                        let b = if k2 == j + 1 { -(j as f64) } else { 1.0 };
                        w[(k1 - 1) * n + (k2 - 1)] = h * a * b / (i * j) as f64;
                    }
                }
                kernel.push(w);
            }
        }
        kernel
    }

    /// Kernel vectors as columns of an `n² × (n − 1)²` matrix.
    pub fn kernel_matrix(&self) -> Matrix<f64> {
        let m = self.n * self.n;
        let kernel = self.kernel();
        Matrix::from_fn(m, kernel.len(), |i, c| kernel[c][i])
    }

    /// Closed-form eigensystem of `T(K_{n,n})`.
    pub fn total_eigensystem(&self) -> Result<EigenSystem> {
        total_eigenvectors_regular(&self.root_graph(), &self.root_eigensystem(), &self.kernel_matrix())
    }

    /// Named eigenvectors of `T(K_{n,n})` written directly in terms of the
    /// root basis: `X_n^+` (2n), `X_n^-` (n − 2), `X_{0,k}^±` (θ₀^±), `Z` (−n)
    /// and `Y_{i,j}` (−2).
    pub fn total_vectors(&self) -> Vec<NamedVector> {
        let n = self.n;
        let nf = n as f64;
        let inc = incidence_matrix(&self.root_graph()).to_f64();
        let lift = |coef: f64, v: &[f64], norm_sq: f64| -> Vec<f64> {
            let s = 1.0 / norm_sq.sqrt();
            let mut x: Vec<f64> = v.iter().map(|a| coef * a * s).collect();
            x.extend((0..n * n).map(|j| (0..2 * n).map(|i| inc[(i, j)] * v[i]).sum::<f64>() * s));
            x
        };
        let mut out = vec![
            NamedVector {
                name: "X_n^+".into(),
                value: 2.0 * nf,
                vector: lift(2.0, &self.top, 4.0 + 2.0 * nf),
            },
            NamedVector {
                name: "X_n^-".into(),
                value: nf - 2.0,
                vector: lift(-nf, &self.top, nf * nf + 2.0 * nf),
            },
        ];
        for (idx, v) in self.zero_space.iter().enumerate() {
            let tag = if idx < n - 1 {
                format!("{}", idx + 1)
            } else {
                format!("{}'", idx + 2 - n)
            };
            out.push(NamedVector {
                name: format!("X_0,{tag}^+"),
                value: self.theta0_plus,
                vector: lift(-self.theta0_minus, v, self.delta_plus),
            });
            out.push(NamedVector {
                name: format!("X_0,{tag}^-"),
                value: self.theta0_minus,
                vector: lift(-self.theta0_plus, v, self.delta_minus),
            });
        }
        let mut z = self.bottom.clone();
        z.resize(2 * n + n * n, 0.0);
        out.push(NamedVector {
            name: "Z".into(),
            value: -nf,
            vector: z,
        });
        for (c, w) in self.kernel().iter().enumerate() {
            let mut y = vec![0.0; 2 * n];
            y.extend_from_slice(w);
            out.push(NamedVector {
                name: format!("Y_{},{}", c / (n - 1) + 1, c % (n - 1) + 1),
                value: -2.0,
                vector: y,
            });
        }
        out
    }

    /// `(θ^+, θ^-)` of the root eigenvalue `n`: `(2n, n − 2)`.
    pub fn top_pair(&self) -> (f64, f64) {
        let nf = self.n as f64;
        theta_pair(nf, nf)
    }
}

#[derive(Debug, Clone)]
pub struct NamedVector {
    pub name: String,
    pub value: f64,
    pub vector: Vec<f64>,
}
