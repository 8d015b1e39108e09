use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::json_f64_seq;
use crate::graph::{ElementLabel, Graph};
use crate::spectral::{
    check_regular_root, grouping_tolerance, kernel_dimension, theta_pair, x_coefficient, x_norm_sq, EigenSystem,
};

/// The adjacency spectrum as seen from the marked element `w` and the
/// initial state `ψ(0)`: for each distinct eigenvalue `φ_ℓ` (decreasing),
/// `‖P_ℓ|w⟩‖²` and `⟨ψ(0)|P_ℓ|w⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelWeights {
    #[serde(serialize_with = "json_f64_seq")]
    values: Vec<f64>,
    multiplicities: Vec<usize>,
    #[serde(serialize_with = "json_f64_seq")]
    weights: Vec<f64>,
    #[serde(serialize_with = "json_f64_seq")]
    cross: Vec<f64>,
    #[serde(serialize_with = "crate::format::json_f64")]
    initial_principal_mass: f64,
    dimension: usize,
}

/// `‖P_ℓ e_w‖²` for every level of `eig`.
pub fn projector_weights(eig: &EigenSystem, w: usize) -> Result<Vec<f64>> {
    eig.basis_weights(w)
}

impl LevelWeights {
    pub fn new(
        values: Vec<f64>,
        multiplicities: Vec<usize>,
        weights: Vec<f64>,
        cross: Vec<f64>,
        initial_principal_mass: f64,
        dimension: usize,
    ) -> Result<Self> {
        let len = values.len();
        for other in [multiplicities.len(), weights.len(), cross.len()] {
            if other != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    found: other,
                });
            }
        }
        if values.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Assumption("level values must be strictly decreasing".into()));
        }
        Ok(Self {
            values,
            multiplicities,
            weights,
            cross,
            initial_principal_mass,
            dimension,
        })
    }

    /// From a numerical eigensystem of the adjacency matrix.
    pub fn from_eigensystem(eig: &EigenSystem, w: usize, initial: &[f64]) -> Result<Self> {
        let weights = eig.basis_weights(w)?;
        let cross = eig.cross_weights(initial, w)?;
        let p0 = eig.projector_apply(0, initial)?;
        let mass = p0.iter().map(|x| x * x).sum();
        Self::new(
            eig.values().to_vec(),
            eig.multiplicities().to_vec(),
            weights,
            cross,
            mass,
            eig.dimension(),
        )
    }

    /// Closed-form levels of `T(G)` for a regular connected root, computed
    /// from the root eigensystem alone, with the uniform initial state.
    ///
    /// For a marked root vertex `u` the `θ^±` weight of root level `λ` is
    /// `(2 − r − λ + θ)² / c · ‖P_λ e_u‖²`; for a marked edge `{a, b}` it is
    /// `‖P_λ (e_a + e_b)‖² / c`. The `−2` level carries the rest of an edge's
    /// mass and none of a vertex's.
    pub fn closed_form_total(root: &Graph, root_eig: &EigenSystem, marked: ElementLabel) -> Result<Self> {
        let r = check_regular_root(root)?;
        marked.validate(root)?;
        if root_eig.dimension() != root.n() {
            return Err(Error::DimensionMismatch {
                expected: root.n(),
                found: root_eig.dimension(),
            });
        }
        let rf = r as f64;
        let bipartite = root.is_bipartite();
        let basis = root_eig.basis();
        let mut raw: Vec<(f64, usize, f64)> = Vec::new();
        let mut edge_range_mass = 0.0;
        for (l, (&lambda, &mult)) in root_eig.values().iter().zip(root_eig.multiplicities()).enumerate() {
            let mass: f64 = root_eig
                .group(l)
                .map(|k| match marked {
                    ElementLabel::Vertex(u) => basis[(u, k)].powi(2),
                    ElementLabel::Edge(j) => {
                        let (a, b) = root.edges()[j];
                        (basis[(a, k)] + basis[(b, k)]).powi(2)
                    }
                })
                .sum();
            if bipartite && (lambda + rf).abs() <= grouping_tolerance(rf) {
                let weight = if marked.is_vertex() { mass } else { 0.0 };
                raw.push((-rf, mult, weight));
                continue;
            }
            let (tp, tm) = theta_pair(lambda, rf);
            for theta in [tp, tm] {
                let c = x_norm_sq(lambda, rf, theta);
                let weight = match marked {
                    ElementLabel::Vertex(_) => x_coefficient(lambda, rf, theta).powi(2) / c * mass,
                    ElementLabel::Edge(_) => mass / c,
                };
                raw.push((theta, mult, weight));
            }
            edge_range_mass += mass / (lambda + rf);
        }
        let kernel = kernel_dimension(root);
        if kernel > 0 {
            let weight = match marked {
                ElementLabel::Vertex(_) => 0.0,
                ElementLabel::Edge(_) => (1.0 - edge_range_mass).max(0.0),
            };
            raw.push((-2.0, kernel, weight));
        }

        raw.sort_by(|a, b| b.0.total_cmp(&a.0));
        let dim = root.n() + root.m();
        let tol = grouping_tolerance(((2 * r * dim) as f64).sqrt());
        let mut values: Vec<f64> = Vec::new();
        let mut multiplicities: Vec<usize> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (value, mult, weight) in raw {
            match values.last() {
                Some(&last) if (last - value).abs() <= tol => {
                    *multiplicities.last_mut().unwrap() += mult;
                    *weights.last_mut().unwrap() += weight;
                }
                _ => {
                    values.push(value);
                    multiplicities.push(mult);
                    weights.push(weight);
                }
            }
        }
        // The uniform state spans the principal (2r) eigenspace of the
        // regular connected total graph.
        let mut cross = vec![0.0; values.len()];
        cross[0] = 1.0 / (dim as f64).sqrt();
        Self::new(values, multiplicities, weights, cross, 1.0, dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `⟨ψ(0)|P_ℓ|w⟩`.
    pub fn cross(&self) -> &[f64] {
        &self.cross
    }

    /// `‖P_0 ψ(0)‖²`.
    pub fn initial_principal_mass(&self) -> f64 {
        self.initial_principal_mass
    }

    /// `N`, the dimension of the state space.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `‖P_0|w⟩‖`.
    pub fn principal_norm(&self) -> f64 {
        self.weights[0].sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, total_graph};
    use crate::matrix::Matrix;
    use crate::spectral::{symmetric_eig, KnnEigenbasis};

    #[test]
    fn diagonal_basis_element() {
        let a = Matrix::from_vec(3, 3, vec![2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        let eig = symmetric_eig(&a, 1e-12).unwrap();
        assert_eq!(projector_weights(&eig, 1).unwrap(), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn closed_form_matches_dense_k33() {
        let root = complete_bipartite(3, 3).unwrap();
        let t = total_graph(&root);
        let dense = symmetric_eig(&t.graph().adjacency_f64(), 1e-12).unwrap();
        let root_eig = KnnEigenbasis::new(3).unwrap().root_eigensystem();
        let psi = vec![1.0 / (15f64).sqrt(); 15];
        for label in [ElementLabel::Vertex(2), ElementLabel::Edge(8), ElementLabel::Edge(1)] {
            let cf = LevelWeights::closed_form_total(&root, &root_eig, label).unwrap();
            let w = t.index_of(label).unwrap();
            let num = LevelWeights::from_eigensystem(&dense, w, &psi).unwrap();
            assert_eq!(cf.multiplicities(), num.multiplicities());
            for (a, b) in cf.values().iter().zip(num.values()) {
                assert!((a - b).abs() < 1e-10);
            }
            for (a, b) in cf.weights().iter().zip(num.weights()) {
                assert!((a - b).abs() < 1e-10, "{label}: {cf:?} vs {num:?}");
            }
            for (a, b) in cf.cross().iter().zip(num.cross()) {
                assert!((a - b).abs() < 1e-12);
            }
            assert!((num.weight_sum() - 1.0).abs() < 1e-12);
            assert!((num.initial_principal_mass() - 1.0).abs() < 1e-12);
            assert!((cf.weights()[0] - 1.0 / 15.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_unsorted_levels() {
        assert!(LevelWeights::new(vec![1.0, 2.0], vec![1, 1], vec![0.5, 0.5], vec![0.0, 0.0], 1.0, 2).is_err());
        assert!(LevelWeights::new(vec![2.0], vec![1, 1], vec![1.0], vec![0.0], 1.0, 2).is_err());
    }
}
