//! Closed-form spectra and eigenvectors of total graphs of regular roots.
//!
//! For an `r`-regular connected root with eigenpairs `(λ_i, v_i)` each root
//! eigenvalue produces two total-graph eigenvalues
//!
//! ```text
//! θ_i^± = λ_i − 1 + r/2 ± √(λ_i + 1 + r²/4)
//! ```
//!
//! with eigenvectors `X_i^± = c^{-1/2} ((2 − r − λ_i + θ_i^±) v_i ; Rᵀ v_i)`,
//! `c = (2 − r − λ_i + θ_i^±)² + λ_i + r`. The kernel of the incidence matrix
//! contributes `−2` eigenvectors `(0 ; y)`. A bipartite root has `λ = −r`,
//! whose `X^+` vector vanishes; it is replaced by `Z = (J_1 ; −J_2 ; 0)`
//! (eigenvalue `−r`) and the kernel grows by one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::json_f64;
use crate::graph::{incidence_matrix, Graph};
use crate::matrix::Matrix;

use super::eigensystem::{grouping_tolerance, EigenSystem, Spectrum};
use super::solver::{symmetric_spectrum, EigOptions};

/// `(θ^+, θ^-)` for root eigenvalue `lambda` of an `r`-regular root.
pub fn theta_pair(lambda: f64, r: f64) -> (f64, f64) {
    let centre = lambda - 1.0 + r / 2.0;
    let root = (lambda + 1.0 + r * r / 4.0).max(0.0).sqrt();
    (centre + root, centre - root)
}

/// Vertex-block coefficient `2 − r − λ + θ` of `X`.
pub fn x_coefficient(lambda: f64, r: f64, theta: f64) -> f64 {
    2.0 - r - lambda + theta
}

/// Squared norm `c` of the unnormalized `X`.
pub fn x_norm_sq(lambda: f64, r: f64, theta: f64) -> f64 {
    x_coefficient(lambda, r, theta).powi(2) + lambda + r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "branch")]
pub enum LevelSource {
    ThetaPlus {
        #[serde(serialize_with = "json_f64")]
        root_value: f64,
    },
    ThetaMinus {
        #[serde(serialize_with = "json_f64")]
        root_value: f64,
    },
    IncidenceKernel,
    BipartiteMinusR,
}

/// One distinct total-graph eigenvalue and the branches that produce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormLevel {
    #[serde(serialize_with = "json_f64")]
    pub value: f64,
    pub multiplicity: usize,
    pub sources: Vec<(LevelSource, usize)>,
}

/// Total-graph spectrum derived from the root spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalSpectrumClosedForm {
    pub r: usize,
    pub n: usize,
    pub m: usize,
    pub bipartite: bool,
    pub minus_two_multiplicity: usize,
    pub levels: Vec<ClosedFormLevel>,
}

impl TotalSpectrumClosedForm {
    pub fn spectrum(&self) -> Spectrum {
        let flat: Vec<(f64, usize)> = self.levels.iter().map(|l| (l.value, l.multiplicity)).collect();
        Spectrum::from_levels(&flat, self.tolerance())
    }

    pub fn dimension(&self) -> usize {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }

    /// Half the total-graph degree sum `n·2r + m·2r`.
    pub fn total_edge_count(&self) -> usize {
        self.r * (self.n + self.m)
    }

    fn tolerance(&self) -> f64 {
        grouping_tolerance(((2 * self.total_edge_count()) as f64).sqrt())
    }
}

/// Applies the total-graph map to a root spectrum.
pub fn total_spectrum_from_root(
    root: &Spectrum,
    r: usize,
    m: usize,
    bipartite: bool,
) -> Result<TotalSpectrumClosedForm> {
    let n = root.dimension();
    if r < 2 {
        return Err(Error::DegreeTooSmall(r));
    }
    let rf = r as f64;
    let root_tol = grouping_tolerance(rf);
    let mut raw: Vec<(f64, usize, LevelSource)> = Vec::new();
    let mut saw_minus_r = false;
    for (&lambda, &mult) in root.values().iter().zip(root.multiplicities()) {
        if bipartite && (lambda + rf).abs() <= root_tol {
            if mult != 1 {
                return Err(Error::NotConnected);
            }
            saw_minus_r = true;
            raw.push((-rf, 1, LevelSource::BipartiteMinusR));
            continue;
        }
        let (tp, tm) = theta_pair(lambda, rf);
        raw.push((tp, mult, LevelSource::ThetaPlus { root_value: lambda }));
        raw.push((tm, mult, LevelSource::ThetaMinus { root_value: lambda }));
    }
    if bipartite && !saw_minus_r {
        return Err(Error::InvalidGraph(
            "bipartite root spectrum lacks the eigenvalue -r".into(),
        ));
    }
    let kernel = (m + usize::from(bipartite))
        .checked_sub(n)
        .ok_or_else(|| Error::InvalidGraph("fewer edges than vertices".into()))?;
    if kernel > 0 {
        raw.push((-2.0, kernel, LevelSource::IncidenceKernel));
    }

    raw.sort_by(|a, b| b.0.total_cmp(&a.0));
    let tol = grouping_tolerance(((2 * r * (n + m)) as f64).sqrt());
    let mut levels: Vec<ClosedFormLevel> = Vec::new();
    for (value, mult, source) in raw {
        match levels.last_mut() {
            Some(last) if (last.value - value).abs() <= tol => {
                last.multiplicity += mult;
                last.sources.push((source, mult));
            }
            _ => levels.push(ClosedFormLevel {
                value,
                multiplicity: mult,
                sources: vec![(source, mult)],
            }),
        }
    }
    Ok(TotalSpectrumClosedForm {
        r,
        n,
        m,
        bipartite,
        minus_two_multiplicity: kernel,
        levels,
    })
}

/// Regular degree of a connected root with `r ≥ 2`.
pub fn check_regular_root(g: &Graph) -> Result<usize> {
    let r = g.regular_degree().ok_or(Error::NotRegular)?;
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    if r < 2 {
        return Err(Error::DegreeTooSmall(r));
    }
    Ok(r)
}

/// Closed-form total spectrum of a regular connected root; the root spectrum
/// itself is computed numerically.
pub fn total_spectrum_regular(g: &Graph) -> Result<TotalSpectrumClosedForm> {
    let r = check_regular_root(g)?;
    let root = symmetric_spectrum(&g.adjacency_f64(), &EigOptions::default())?;
    total_spectrum_from_root(&root, r, g.m(), g.is_bipartite())
}

/// `(X^+, X^-)` for one root eigenpair. Refuses `λ = −r` on a bipartite root,
/// where `X^+` degenerates.
pub fn x_vectors(
    incidence: &Matrix<f64>,
    r: usize,
    lambda: f64,
    v: &[f64],
    bipartite: bool,
) -> Result<[(f64, Vec<f64>); 2]> {
    let rf = r as f64;
    if bipartite && (lambda + rf).abs() <= grouping_tolerance(rf) {
        return Err(Error::BipartiteExclusion(lambda));
    }
    let n = incidence.rows();
    let m = incidence.cols();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let rtv: Vec<f64> = (0..m).map(|j| (0..n).map(|i| incidence[(i, j)] * v[i]).sum()).collect();
    let (tp, tm) = theta_pair(lambda, rf);
    let build = |theta: f64| {
        let coef = x_coefficient(lambda, rf, theta);
        let scale = 1.0 / x_norm_sq(lambda, rf, theta).sqrt();
        let mut x = Vec::with_capacity(n + m);
        x.extend(v.iter().map(|vi| coef * vi * scale));
        x.extend(rtv.iter().map(|y| y * scale));
        (theta, x)
    };
    Ok([build(tp), build(tm)])
}

/// Number of kernel vectors the incidence matrix of a connected root has.
pub fn kernel_dimension(g: &Graph) -> usize {
    (g.m() + usize::from(g.is_bipartite())).saturating_sub(g.n())
}

/// Full closed-form eigenbasis of `T(G)` from the root eigensystem and an
/// orthonormal basis of `ker R` (columns of `kernel`, `m` rows).
pub fn total_eigenvectors_regular(g: &Graph, root: &EigenSystem, kernel: &Matrix<f64>) -> Result<EigenSystem> {
    let r = check_regular_root(g)?;
    let (n, m) = (g.n(), g.m());
    if root.dimension() != n || root.eigenvalues().len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: root.dimension(),
        });
    }
    let expected = kernel_dimension(g);
    if kernel.rows() != m || kernel.cols() != expected {
        return Err(Error::KernelDimension {
            expected,
            found: if kernel.rows() == m { kernel.cols() } else { 0 },
        });
    }
    let colouring = g.bipartition();
    let bipartite = colouring.is_some();
    let incidence = incidence_matrix(g).to_f64();
    let rf = r as f64;

    let mut values = Vec::with_capacity(n + m);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n + m);
    for (k, &lambda) in root.eigenvalues().iter().enumerate() {
        if bipartite && (lambda + rf).abs() <= grouping_tolerance(rf) {
            let colour = colouring.as_ref().unwrap();
            let s = 1.0 / (n as f64).sqrt();
            let mut z: Vec<f64> = colour.iter().map(|&c| if c { -s } else { s }).collect();
            z.resize(n + m, 0.0);
            values.push(-rf);
            columns.push(z);
            continue;
        }
        for (theta, x) in x_vectors(&incidence, r, lambda, &root.vector(k), bipartite)? {
            values.push(theta);
            columns.push(x);
        }
    }
    for j in 0..kernel.cols() {
        let mut y = vec![0.0; n];
        y.extend(kernel.column(j));
        values.push(-2.0);
        columns.push(y);
    }
    let dim = n + m;
    let basis = Matrix::from_fn(dim, columns.len(), |i, k| columns[k][i]);
    let tol = grouping_tolerance(((2 * r * dim) as f64).sqrt());
    EigenSystem::from_pairs(&values, &basis, tol)
}

/// Orthonormal basis of `ker R` obtained numerically from `RᵀR`.
pub fn incidence_kernel_basis(g: &Graph) -> Result<Matrix<f64>> {
    let r = incidence_matrix(g).to_f64();
    let rtr = r.transpose().matmul(&r);
    let eig = super::solver::symmetric_eig(&rtr, 1e-12)?;
    let tol = 1e-8 * rtr.frobenius_norm().max(1.0);
    let cols: Vec<usize> = eig
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() <= tol)
        .map(|(k, _)| k)
        .collect();
    Ok(Matrix::from_fn(g.m(), cols.len(), |i, c| eig.basis()[(i, cols[c])]))
}
