use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::json_f64_seq;
use crate::matrix::Matrix;

/// Relative tolerance for merging numerically equal eigenvalues.
pub const GROUPING_RTOL: f64 = 1e-8;

/// Merge tolerance for a matrix of (Frobenius) norm `norm`.
pub fn grouping_tolerance(norm: f64) -> f64 {
    GROUPING_RTOL * norm.max(1.0)
}

/// Distinct eigenvalues in strictly decreasing order with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    #[serde(serialize_with = "json_f64_seq")]
    values: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl Spectrum {
    /// Groups a list of eigenvalues (any order). Values closer than `tol` to
    /// the first member of the current group join it; the group value is the
    /// member mean.
    pub fn from_values(values: &[f64], tol: f64) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let groups = group_sorted(&sorted, tol);
        let mut out = Spectrum {
            values: Vec::with_capacity(groups.len()),
            multiplicities: Vec::with_capacity(groups.len()),
        };
        for (start, end) in groups {
            let mean = sorted[start..end].iter().sum::<f64>() / (end - start) as f64;
            out.values.push(mean);
            out.multiplicities.push(end - start);
        }
        out
    }

    /// Builds from already-distinct values and multiplicities; values are
    /// re-sorted and merged with `tol`.
    pub fn from_levels(levels: &[(f64, usize)], tol: f64) -> Self {
        let mut flat = Vec::new();
        for &(v, k) in levels {
            flat.extend(std::iter::repeat_n(v, k));
        }
        Self::from_values(&flat, tol)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn level_count(&self) -> usize {
        self.values.len()
    }

    pub fn dimension(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Every eigenvalue repeated by multiplicity, decreasing.
    pub fn flatten(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&v, &k)| std::iter::repeat_n(v, k))
            .collect()
    }

    /// `Σ mult · φ`.
    pub fn trace(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.multiplicities)
            .map(|(v, &k)| v * k as f64)
            .sum()
    }

    /// `Σ mult · φ²`.
    pub fn trace_of_square(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.multiplicities)
            .map(|(v, &k)| v * v * k as f64)
            .sum()
    }

    /// Largest elementwise gap between the sorted flattened spectra, or
    /// `None` when dimensions differ.
    pub fn max_abs_diff(&self, other: &Spectrum) -> Option<f64> {
        let a = self.flatten();
        let b = other.flatten();
        (a.len() == b.len()).then(|| a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectrum serializes")
    }
}

fn group_sorted(sorted_desc: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=sorted_desc.len() {
        if i == sorted_desc.len() || (sorted_desc[start] - sorted_desc[i]).abs() > tol {
            groups.push((start, i));
            start = i;
        }
    }
    groups
}

/// Eigen-decomposition of a real symmetric matrix, grouped by distinct value.
///
/// Column `k` of `basis` is a unit eigenvector; columns of group `ℓ` occupy
/// `offsets[ℓ]..offsets[ℓ + 1]` and together span the eigenspace, which
/// defines the orthogonal projector `P_ℓ`. Each column's first entry with
/// magnitude above `1e-10` is positive.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    spectrum: Spectrum,
    basis: Matrix<f64>,
    offsets: Vec<usize>,
    eigenvalues: Vec<f64>,
}

impl EigenSystem {
    /// Sorts `values[k]` / `vectors[:, k]` decreasingly, groups values within
    /// `tol`, and normalizes column signs.
    pub fn from_pairs(values: &[f64], vectors: &Matrix<f64>, tol: f64) -> Result<Self> {
        let dim = vectors.rows();
        if values.len() != vectors.cols() {
            return Err(Error::DimensionMismatch {
                expected: vectors.cols(),
                found: values.len(),
            });
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let sorted: Vec<f64> = order.iter().map(|&k| values[k]).collect();
        let groups = group_sorted(&sorted, tol);

        let mut basis = Matrix::zeros(dim, order.len());
        for (new, &old) in order.iter().enumerate() {
            let first = (0..dim)
                .map(|i| vectors[(i, old)])
                .find(|x| x.abs() > 1e-10)
                .unwrap_or(1.0);
            let sign = if first < 0.0 { -1.0 } else { 1.0 };
            for i in 0..dim {
                basis[(i, new)] = sign * vectors[(i, old)];
            }
        }

        let mut offsets = Vec::with_capacity(groups.len() + 1);
        let mut spectrum = Spectrum {
            values: Vec::with_capacity(groups.len()),
            multiplicities: Vec::with_capacity(groups.len()),
        };
        for &(start, end) in &groups {
            offsets.push(start);
            spectrum
                .values
                .push(sorted[start..end].iter().sum::<f64>() / (end - start) as f64);
            spectrum.multiplicities.push(end - start);
        }
        offsets.push(sorted.len());
        Ok(Self {
            spectrum,
            basis,
            offsets,
            eigenvalues: sorted,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn values(&self) -> &[f64] {
        self.spectrum.values()
    }

    pub fn multiplicities(&self) -> &[usize] {
        self.spectrum.multiplicities()
    }

    pub fn level_count(&self) -> usize {
        self.spectrum.level_count()
    }

    /// Ambient dimension (length of each eigenvector).
    pub fn dimension(&self) -> usize {
        self.basis.rows()
    }

    /// Individual eigenvalues matching the basis columns (decreasing).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &Matrix<f64> {
        &self.basis
    }

    pub fn group(&self, level: usize) -> std::ops::Range<usize> {
        self.offsets[level]..self.offsets[level + 1]
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.basis.column(k)
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level >= self.level_count() {
            return Err(Error::IndexOutOfRange {
                index: level,
                len: self.level_count(),
            });
        }
        Ok(())
    }

    /// `⟨v_k|x⟩` for every basis column.
    pub fn coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.basis.cols()];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.basis.row(i)) {
                *o += xi * b;
            }
        }
        Ok(out)
    }

    /// `P_ℓ x = Σ_{v ∈ group ℓ} v ⟨v|x⟩`.
    pub fn projector_apply(&self, level: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.check_level(level)?;
        let coords = self.coordinates(x)?;
        let range = self.group(level);
        Ok((0..self.dimension())
            .map(|i| {
                let row = &self.basis.row(i)[range.clone()];
                row.iter().zip(&coords[range.clone()]).map(|(b, c)| b * c).sum()
            })
            .collect())
    }

    /// `‖P_ℓ e_w‖²` for every level, for the standard basis vector `e_w`.
    pub fn basis_weights(&self, w: usize) -> Result<Vec<f64>> {
        if w >= self.dimension() {
            return Err(Error::IndexOutOfRange {
                index: w,
                len: self.dimension(),
            });
        }
        let row = self.basis.row(w);
        Ok((0..self.level_count())
            .map(|l| row[self.group(l)].iter().map(|x| x * x).sum())
            .collect())
    }

    /// `⟨y|P_ℓ|e_w⟩` for every level.
    pub fn cross_weights(&self, y: &[f64], w: usize) -> Result<Vec<f64>> {
        let coords = self.coordinates(y)?;
        let row = self.basis.row(w);
        Ok((0..self.level_count())
            .map(|l| {
                let g = self.group(l);
                row[g.clone()].iter().zip(&coords[g]).map(|(a, b)| a * b).sum()
            })
            .collect())
    }

    /// `max ‖A v − φ v‖` over all columns.
    pub fn max_residual(&self, a: &Matrix<f64>) -> f64 {
        let mut worst = 0.0f64;
        for (k, &phi) in self.eigenvalues.iter().enumerate() {
            let v = self.basis.column(k);
            let av = a.mul_vec(&v);
            let r: f64 = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - phi * y).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    /// `max |(VᵀV − I)_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.basis.transpose().matmul(&self.basis);
        let mut worst = 0.0f64;
        for i in 0..gram.rows() {
            for j in 0..gram.cols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// JSON export `{values, multiplicities, dimension, basis?}` with the basis
    /// as a flat row-major array.
    pub fn to_json(&self, include_basis: bool) -> String {
        #[derive(Serialize)]
        struct Export<'a> {
            #[serde(serialize_with = "json_f64_seq")]
            values: &'a [f64],
            multiplicities: &'a [usize],
            dimension: usize,
            #[serde(skip_serializing_if = "Option::is_none")]
            #[serde(serialize_with = "opt_seq")]
            basis: Option<&'a [f64]>,
        }
        fn opt_seq<S: serde::Serializer>(x: &Option<&[f64]>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match x {
                Some(v) => json_f64_seq(v, s),
                None => s.serialize_none(),
            }
        }
        serde_json::to_string(&Export {
            values: self.values(),
            multiplicities: self.multiplicities(),
            dimension: self.dimension(),
            basis: include_basis.then(|| self.basis.as_slice()),
        })
        .expect("eigensystem serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_system() -> EigenSystem {
        let v = Matrix::identity(3);
        EigenSystem::from_pairs(&[1.0, 3.0, 1.0], &v, 1e-8).unwrap()
    }

    #[test]
    fn grouping_and_order() {
        let s = diag_system();
        assert_eq!(s.values(), &[3.0, 1.0]);
        assert_eq!(s.multiplicities(), &[1, 2]);
        assert_eq!(s.vector(0), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn projector_examples() {
        let s = diag_system();
        let x = [0.0, 2.0, 0.0];
        assert_eq!(s.projector_apply(0, &x).unwrap(), x.to_vec());
        assert_eq!(s.projector_apply(1, &x).unwrap(), vec![0.0; 3]);
        assert!(s.projector_apply(2, &x).is_err());
        assert_eq!(s.basis_weights(2).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn sign_convention() {
        let v = Matrix::from_vec(2, 2, vec![-1.0, 0.0, 0.0, -1.0]).unwrap();
        let s = EigenSystem::from_pairs(&[2.0, 1.0], &v, 1e-8).unwrap();
        assert_eq!(s.vector(0), vec![1.0, 0.0]);
        assert_eq!(s.vector(1), vec![0.0, 1.0]);
    }

    #[test]
    fn spectrum_merging_and_traces() {
        let s = Spectrum::from_levels(&[(-2.0, 1), (4.0, 1), (-2.0 + 1e-12, 1)], 1e-8);
        assert_eq!(s.multiplicities(), &[1, 2]);
        assert!((s.trace() - 0.0).abs() < 1e-11);
        assert!((s.trace_of_square() - 24.0).abs() < 1e-10);
        let j = s.to_json();
        assert!(j.starts_with(r#"{"values":[4.0000000000000000e0,"#));
    }

    #[test]
    fn json_export() {
        let s = diag_system();
        let j = s.to_json(true);
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["multiplicities"], serde_json::json!([1, 2]));
        assert_eq!(v["basis"].as_array().unwrap().len(), 9);
        let j = s.to_json(false);
        assert!(!j.contains("basis"));
    }
}
