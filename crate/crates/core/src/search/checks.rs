//! Eigenvectors of `H` that miss `|w⟩` are eigenvectors of `−γA`, and the
//! ones that see `|w⟩` have eigenvalues outside `σ(−γA)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::json_f64;
use crate::matrix::norm;
use crate::spectral::{grouping_tolerance, EigenSystem};

use super::dynamics::SearchSetup;

pub const ZERO_OVERLAP: f64 = 1e-10;
pub const FORWARD_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct ZeroOverlapCheck {
    /// Levels of `H` with `‖P|w⟩‖ ≤ 1e−10`.
    pub zero_levels: usize,
    /// Largest `‖(−γA)v − λv‖` among their basis vectors.
    #[serde(serialize_with = "json_f64")]
    pub max_residual: f64,
    pub overlapping_levels: usize,
    /// Overlapping levels whose value sits on a level of `−γA`.
    pub collisions: usize,
}

impl ZeroOverlapCheck {
    pub fn passed(&self) -> bool {
        self.max_residual <= FORWARD_RESIDUAL && self.collisions == 0
    }
}

/// `h` must be the eigensystem of `setup.hamiltonian()`; `a_values` are the
/// distinct eigenvalues of the adjacency matrix.
pub fn check_zero_overlap(setup: &SearchSetup, h: &EigenSystem, a_values: &[f64]) -> Result<ZeroOverlapCheck> {
    let dim = setup.dimension();
    if h.dimension() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: h.dimension(),
        });
    }
    let gamma = setup.gamma();
    let a = setup.adjacency();
    let w = setup.marked();
    let basis = h.basis();
    let tol = grouping_tolerance(setup.hamiltonian().frobenius_norm());
    let mut out = ZeroOverlapCheck {
        zero_levels: 0,
        max_residual: 0.0,
        overlapping_levels: 0,
        collisions: 0,
    };
    for (l, &lambda) in h.values().iter().enumerate() {
        let range = h.group(l);
        let overlap = range.clone().map(|k| basis[(w, k)].powi(2)).sum::<f64>().sqrt();
        if overlap <= ZERO_OVERLAP {
            out.zero_levels += 1;
            for k in range {
                let v = basis.column(k);
                let av = a.mul_vec(&v);
                let r: Vec<f64> = av.iter().zip(&v).map(|(x, y)| -gamma * x - lambda * y).collect();
                out.max_residual = out.max_residual.max(norm(&r));
            }
        } else {
            out.overlapping_levels += 1;
            if a_values.iter().any(|&phi| (lambda + gamma * phi).abs() <= tol) {
                out.collisions += 1;
            }
        }
    }
    Ok(out)
}
