//! Eigenvalues of `H = −γA − |w⟩⟨w|` that are not in `σ(−γA)`.
//!
//! They are the roots of
//!
//! ```text
//! f(λ) = 1 + Σ_ℓ ‖P_ℓ|w⟩‖² / (λ + γφ_ℓ) = 0.
//! ```
//!
//! With poles `p_ℓ = −γφ_ℓ` increasing, `f` decreases strictly between
//! consecutive poles from `+∞` to `−∞`, so each gap holds exactly one root,
//! and one more root lies below `p_0`. Levels with zero weight contribute no
//! pole and are dropped.

use crate::error::{Error, Result};

use super::levels::LevelWeights;

/// Weights at or below this are treated as exact zeros.
pub const ZERO_WEIGHT: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct SecularEquation {
    gamma: f64,
    phi: Vec<f64>,
    weight: Vec<f64>,
    level_index: Vec<usize>,
}

impl SecularEquation {
    pub fn new(levels: &LevelWeights, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Assumption(format!("gamma must be positive, got {gamma}")));
        }
        if levels.weights()[0] <= ZERO_WEIGHT {
            return Err(Error::Assumption(
                "marked element has no weight on the principal level".into(),
            ));
        }
        let mut eq = Self {
            gamma,
            phi: Vec::new(),
            weight: Vec::new(),
            level_index: Vec::new(),
        };
        for (l, (&phi, &w)) in levels.values().iter().zip(levels.weights()).enumerate() {
            if w > ZERO_WEIGHT {
                eq.phi.push(phi);
                eq.weight.push(w);
                eq.level_index.push(l);
            }
        }
        Ok(eq)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Indices (into the full level list) of the levels kept as poles.
    pub fn level_index(&self) -> &[usize] {
        &self.level_index
    }

    /// Pole positions `−γφ_ℓ`, increasing.
    pub fn poles(&self) -> Vec<f64> {
        self.phi.iter().map(|p| -self.gamma * p).collect()
    }

    pub fn residual(&self, lambda: f64) -> f64 {
        1.0 + self
            .phi
            .iter()
            .zip(&self.weight)
            .map(|(p, w)| w / (lambda + self.gamma * p))
            .sum::<f64>()
    }

    /// `Σ_ℓ ‖P_ℓ|w⟩‖² / (λ + γφ_ℓ)²`, which equals `1 / |⟨w|λ⟩|²` at a root.
    pub fn inverse_overlap_sq(&self, lambda: f64) -> f64 {
        self.phi
            .iter()
            .zip(&self.weight)
            .map(|(p, w)| w / (lambda + self.gamma * p).powi(2))
            .sum()
    }

    /// `⟨w|λ⟩ ≥ 0` for a root `λ`.
    pub fn overlap_w(&self, lambda: f64) -> f64 {
        1.0 / self.inverse_overlap_sq(lambda).sqrt()
    }

    /// `⟨y|λ⟩` for a root, given `cross[ℓ] = ⟨y|P_ℓ|w⟩` over *all* levels.
    pub fn overlap_with(&self, lambda: f64, cross: &[f64]) -> f64 {
        let s: f64 = self
            .level_index
            .iter()
            .zip(&self.phi)
            .map(|(&l, p)| cross[l] / (lambda + self.gamma * p))
            .sum();
        -self.overlap_w(lambda) * s
    }

    fn scale(&self) -> f64 {
        let s = self.gamma * self.phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        if s > 0.0 {
            s
        } else {
            self.gamma
        }
    }

    /// Left end of a bracket just above pole `p`.
    fn above(&self, p: f64) -> Result<f64> {
        let mut delta = 1e-14 * self.scale();
        for _ in 0..60 {
            let x = p + delta;
            if x > p && self.residual(x) > 0.0 {
                return Ok(x);
            }
            delta *= 0.25;
        }
        Err(Error::Bracket(format!("no positive value just above pole {p}")))
    }

    /// Right end of a bracket just below pole `p`.
    fn below(&self, p: f64) -> Result<f64> {
        let mut delta = 1e-14 * self.scale();
        for _ in 0..60 {
            let x = p - delta;
            if x < p && self.residual(x) < 0.0 {
                return Ok(x);
            }
            delta *= 0.25;
        }
        Err(Error::Bracket(format!("no negative value just below pole {p}")))
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        if !(self.residual(lo) > 0.0 && self.residual(hi) < 0.0) {
            return Err(Error::Bracket(format!("no sign change on [{lo}, {hi}]")));
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.residual(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(if self.residual(lo).abs() <= self.residual(hi).abs() {
            lo
        } else {
            hi
        })
    }

    /// `(λ⁻, λ⁺)`: the roots straddling `−γφ_0`.
    pub fn lambda_pm(&self) -> Result<(f64, f64)> {
        let poles = self.poles();
        if poles.len() < 2 {
            return Err(Error::Assumption(
                "marked element overlaps a single level; no λ⁺ exists".into(),
            ));
        }
        Ok((self.lambda_minus(poles[0])?, self.root_between(poles[0], poles[1])?))
    }

    fn lambda_minus(&self, p0: f64) -> Result<f64> {
        let hi = self.below(p0)?;
        let mut span = self.scale().max(1.0);
        for _ in 0..200 {
            let lo = p0 - span;
            if self.residual(lo) > 0.0 {
                return self.bisect(lo, hi);
            }
            span *= 2.0;
        }
        Err(Error::Bracket("could not bracket λ⁻".into()))
    }

    fn root_between(&self, a: f64, b: f64) -> Result<f64> {
        self.bisect(self.above(a)?, self.below(b)?)
    }

    /// Every root, increasing: `λ⁻`, `λ⁺`, then one per further pole gap.
    pub fn all_roots(&self) -> Result<Vec<f64>> {
        let poles = self.poles();
        let mut roots = Vec::with_capacity(poles.len());
        roots.push(self.lambda_minus(poles[0])?);
        for w in poles.windows(2) {
            roots.push(self.root_between(w[0], w[1])?);
        }
        Ok(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(weights: [f64; 2], values: [f64; 2]) -> LevelWeights {
        LevelWeights::new(values.to_vec(), vec![1, 1], weights.to_vec(), vec![0.0, 0.0], 1.0, 2).unwrap()
    }

    #[test]
    fn k2_closed_form() {
        // A = [[0,1],[1,0]], w = e_0: weights ½ at φ = ±1.
        let eq = SecularEquation::new(&toy([0.5, 0.5], [1.0, -1.0]), 0.5).unwrap();
        let (lm, lp) = eq.lambda_pm().unwrap();
        let s2 = 2f64.sqrt();
        assert!((lp - (-1.0 + s2) / 2.0).abs() < 1e-13);
        assert!((lm - (-1.0 - s2) / 2.0).abs() < 1e-13);
        assert!(eq.residual(lp).abs() < 1e-12);
        assert!(eq.residual(lm).abs() < 1e-12);
    }

    #[test]
    fn k2_general_gamma() {
        for gamma in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let eq = SecularEquation::new(&toy([0.5, 0.5], [1.0, -1.0]), gamma).unwrap();
            let (lm, lp) = eq.lambda_pm().unwrap();
            let d = (1.0 + 4.0 * gamma * gamma).sqrt();
            assert!((lp - (-1.0 + d) / 2.0).abs() < 1e-12 * gamma.max(1.0));
            assert!((lm - (-1.0 - d) / 2.0).abs() < 1e-12 * gamma.max(1.0));
            assert!(lm < -gamma && -gamma < lp && lp < gamma);
        }
    }

    #[test]
    fn separation_grows_with_gamma() {
        let mut last = 0.0;
        for gamma in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let eq = SecularEquation::new(&toy([0.5, 0.5], [1.0, -1.0]), gamma).unwrap();
            let (lm, lp) = eq.lambda_pm().unwrap();
            assert!(lp - lm > last);
            last = lp - lm;
        }
    }

    #[test]
    fn failures_are_reported() {
        assert!(SecularEquation::new(&toy([0.0, 1.0], [1.0, -1.0]), 1.0).is_err());
        assert!(SecularEquation::new(&toy([0.5, 0.5], [1.0, -1.0]), -1.0).is_err());
        let single = SecularEquation::new(&toy([1.0, 0.0], [1.0, -1.0]), 1.0).unwrap();
        assert!(single.lambda_pm().is_err());
    }
}
