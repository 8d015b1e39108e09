use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{json_f64, json_f64_seq};

use super::levels::LevelWeights;
use super::secular::{SecularEquation, ZERO_WEIGHT};

/// Leakage above this marks the two-level reduction as unreliable.
pub const LEAKAGE_THRESHOLD: f64 = 0.05;

/// `(S₁, S₂)`: sums of `‖P_ℓ|w⟩‖² / (φ₀ − φ_ℓ)^k` over `ℓ ≥ 1`, `k = 1, 2`.
pub fn s_sums(weights: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if weights.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: values.len(),
            found: weights.len(),
        });
    }
    let Some(&phi0) = values.first() else {
        return Err(Error::Assumption("no levels".into()));
    };
    if values[1..].iter().any(|&v| v >= phi0) {
        return Err(Error::Assumption("φ₀ must be the strictly largest level".into()));
    }
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for (&w, &phi) in weights.iter().zip(values).skip(1) {
        if w <= ZERO_WEIGHT {
            continue;
        }
        let d = phi0 - phi;
        s1 += w / d;
        s2 += w / (d * d);
    }
    Ok((s1, s2))
}

pub fn gamma_opt(s1: f64) -> f64 {
    s1
}

/// `ε = S₁ ‖P₀|w⟩‖ / √S₂`.
pub fn epsilon(s1: f64, s2: f64, principal_norm: f64) -> Result<f64> {
    if s2.is_nan() || s2 <= 0.0 {
        return Err(Error::Assumption(format!("S2 must be positive, got {s2}")));
    }
    Ok(s1 * principal_norm / s2.sqrt())
}

/// Exact `(λ⁻, λ⁺)` for coupling `γ`.
pub fn lambda_pm_exact(levels: &LevelWeights, gamma: f64) -> Result<(f64, f64)> {
    SecularEquation::new(levels, gamma)?.lambda_pm()
}

/// A broken assumption of the two-level analysis. Reported, not fatal.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "flag", rename_all = "snake_case")]
pub enum AssumptionFlag {
    /// `φ₀` is degenerate, so `P₀|w⟩` need not be the uniform direction.
    PrincipalDegenerate { multiplicity: usize },
    /// `ψ(0)` is not inside the principal eigenspace.
    InitialOutsidePrincipal {
        #[serde(serialize_with = "json_f64")]
        mass: f64,
    },
    /// Projector weights do not sum to one.
    Incomplete {
        #[serde(serialize_with = "json_f64")]
        weight_sum: f64,
    },
    /// Too much amplitude outside the `λ±` pair.
    TwoLevelLeakage {
        #[serde(serialize_with = "json_f64")]
        leakage: f64,
        #[serde(serialize_with = "json_f64")]
        threshold: f64,
    },
}

impl std::fmt::Display for AssumptionFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PrincipalDegenerate { multiplicity } => {
                write!(f, "principal eigenvalue has multiplicity {multiplicity}")
            }
            Self::InitialOutsidePrincipal { mass } => {
                write!(f, "initial state has only {mass} of its mass on the principal level")
            }
            Self::Incomplete { weight_sum } => write!(f, "projector weights sum to {weight_sum}"),
            Self::TwoLevelLeakage { leakage, threshold } => {
                write!(f, "leakage {leakage} exceeds {threshold}")
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    #[serde(rename = "N")]
    pub dimension: usize,
    #[serde(serialize_with = "json_f64_seq")]
    pub level_values: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// `‖P_ℓ|w⟩‖²` per level.
    #[serde(serialize_with = "json_f64_seq")]
    pub weights: Vec<f64>,
    #[serde(serialize_with = "json_f64")]
    pub s1: f64,
    #[serde(serialize_with = "json_f64")]
    pub s2: f64,
    #[serde(serialize_with = "json_f64")]
    pub gamma_opt: f64,
    /// Coupling actually used for `λ±` and the overlaps.
    #[serde(serialize_with = "json_f64")]
    pub gamma: f64,
    #[serde(serialize_with = "json_f64")]
    pub phi0: f64,
    /// Perturbative gap `S₁ ‖P₀|w⟩‖ / √S₂`.
    #[serde(serialize_with = "json_f64")]
    pub epsilon: f64,
    #[serde(serialize_with = "json_f64")]
    pub lambda_plus: f64,
    #[serde(serialize_with = "json_f64")]
    pub lambda_minus: f64,
    /// `(λ⁺ − λ⁻) / 2`.
    #[serde(serialize_with = "json_f64")]
    pub half_gap: f64,
    #[serde(serialize_with = "json_f64")]
    pub overlap_w_plus: f64,
    #[serde(serialize_with = "json_f64")]
    pub overlap_w_minus: f64,
    #[serde(serialize_with = "json_f64")]
    pub overlap_init_plus: f64,
    #[serde(serialize_with = "json_f64")]
    pub overlap_init_minus: f64,
    /// `S₁ / √(2 S₂)`.
    #[serde(serialize_with = "json_f64")]
    pub overlap_w_asymptotic: f64,
    /// `−1 / (√(2N) ‖P₀|w⟩‖)`, the `λ⁺` value; `λ⁻` has the opposite sign.
    #[serde(serialize_with = "json_f64")]
    pub overlap_init_asymptotic: f64,
    /// `⟨λ⁺|ψ(0)⟩⟨w|λ⁺⟩`.
    #[serde(serialize_with = "json_f64")]
    pub product_plus: f64,
    /// `⟨λ⁻|ψ(0)⟩⟨w|λ⁻⟩`.
    #[serde(serialize_with = "json_f64")]
    pub product_minus: f64,
    /// Fraction of `Σ_λ |⟨w|λ⟩⟨λ|ψ(0)⟩|` outside `λ±`.
    #[serde(serialize_with = "json_f64")]
    pub leakage: f64,
    /// `max |f(λ±)|` of the secular function.
    #[serde(serialize_with = "json_f64")]
    pub secular_residual: f64,
    #[serde(serialize_with = "json_f64")]
    pub t_opt: f64,
    #[serde(serialize_with = "json_f64")]
    pub p_succ: f64,
    #[serde(serialize_with = "json_f64")]
    pub t_run_amplified: f64,
    pub flags: Vec<AssumptionFlag>,
}

impl SearchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `λ± + γφ₀`.
    pub fn eps_pm(&self) -> (f64, f64) {
        let centre = self.gamma * self.phi0;
        (self.lambda_plus + centre, self.lambda_minus + centre)
    }

    pub fn has_flags(&self) -> bool {
        !self.flags.is_empty()
    }
}

/// Full two-level analysis. `gamma` defaults to `S₁`.
pub fn report(levels: &LevelWeights, gamma: Option<f64>) -> Result<SearchReport> {
    let values = levels.values();
    let weights = levels.weights();
    let (s1, s2) = s_sums(weights, values)?;
    let g_opt = gamma_opt(s1);
    let gamma = gamma.unwrap_or(g_opt);
    let p0 = levels.principal_norm();
    let eps = epsilon(s1, s2, p0)?;
    let n = levels.dimension();
    let nf = n as f64;

    let eq = SecularEquation::new(levels, gamma)?;
    let roots = eq.all_roots()?;
    if roots.len() < 2 {
        return Err(Error::Assumption(
            "marked element overlaps a single level; no λ⁺ exists".into(),
        ));
    }
    let (lm, lp) = (roots[0], roots[1]);
    let cross = levels.cross();
    let ow_p = eq.overlap_w(lp);
    let ow_m = eq.overlap_w(lm);
    let oi_p = eq.overlap_with(lp, cross);
    let oi_m = eq.overlap_with(lm, cross);

    let amplitudes: Vec<f64> = roots
        .iter()
        .map(|&l| eq.overlap_w(l) * eq.overlap_with(l, cross))
        .collect();
    let total: f64 = amplitudes.iter().map(|a| a.abs()).sum();
    let outside: f64 = amplitudes[2..].iter().map(|a| a.abs()).sum();
    let leakage = if total > 0.0 { outside / total } else { 0.0 };

    let mut flags = Vec::new();
    if levels.multiplicities()[0] > 1 {
        flags.push(AssumptionFlag::PrincipalDegenerate {
            multiplicity: levels.multiplicities()[0],
        });
    }
    let mass = levels.initial_principal_mass();
    if (mass - 1.0).abs() > 1e-10 {
        flags.push(AssumptionFlag::InitialOutsidePrincipal { mass });
    }
    let weight_sum = levels.weight_sum();
    if (weight_sum - 1.0).abs() > 1e-10 {
        flags.push(AssumptionFlag::Incomplete { weight_sum });
    }
    if leakage > LEAKAGE_THRESHOLD {
        flags.push(AssumptionFlag::TwoLevelLeakage {
            leakage,
            threshold: LEAKAGE_THRESHOLD,
        });
    }

    Ok(SearchReport {
        dimension: n,
        level_values: values.to_vec(),
        multiplicities: levels.multiplicities().to_vec(),
        weights: weights.to_vec(),
        s1,
        s2,
        gamma_opt: g_opt,
        gamma,
        phi0: values[0],
        epsilon: eps,
        lambda_plus: lp,
        lambda_minus: lm,
        half_gap: 0.5 * (lp - lm),
        overlap_w_plus: ow_p,
        overlap_w_minus: ow_m,
        overlap_init_plus: oi_p,
        overlap_init_minus: oi_m,
        overlap_w_asymptotic: s1 / (2.0 * s2).sqrt(),
        overlap_init_asymptotic: -1.0 / ((2.0 * nf).sqrt() * p0),
        product_plus: ow_p * oi_p,
        product_minus: ow_m * oi_m,
        leakage,
        secular_residual: eq.residual(lp).abs().max(eq.residual(lm).abs()),
        t_opt: PI / (2.0 * eps),
        p_succ: 4.0 * oi_p * oi_p * ow_p * ow_p,
        t_run_amplified: PI * s2 / (2.0 * s1 * s1) * nf.sqrt(),
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // K₂ with w = e₀ and the uniform initial state.
    fn two_level() -> LevelWeights {
        let c = 0.5f64.sqrt();
        LevelWeights::new(vec![1.0, -1.0], vec![1, 1], vec![0.5, 0.5], vec![c, 0.0], 1.0, 2).unwrap()
    }

    #[test]
    fn two_level_sums() {
        let (s1, s2) = s_sums(&[0.5, 0.5], &[1.0, -1.0]).unwrap();
        assert!((s1 - 0.25).abs() < 1e-15);
        assert!((s2 - 0.125).abs() < 1e-15);
    }

    #[test]
    fn unit_gap() {
        assert_eq!(gamma_opt(1.0), 1.0);
        assert!((epsilon(1.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(epsilon(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn zero_weights_skipped() {
        let (s1, s2) = s_sums(&[0.5, 0.0, 0.5], &[1.0, 0.0, -1.0]).unwrap();
        assert!((s1 - 0.25).abs() < 1e-15 && (s2 - 0.125).abs() < 1e-15);
        assert!(s_sums(&[0.5, 0.5], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn k2_report() {
        let r = report(&two_level(), None).unwrap();
        assert!((r.gamma - 0.25).abs() < 1e-15);
        let d = (1.0f64 + 4.0 * 0.0625).sqrt();
        assert!((r.lambda_plus - (-1.0 + d) / 2.0).abs() < 1e-13);
        assert!(r.secular_residual < 1e-12);
        assert!(r.lambda_minus < -r.gamma * r.phi0 && -r.gamma * r.phi0 < r.lambda_plus);
        // the two roots carry all of ⟨w|ψ(0)⟩ here
        assert!((r.product_plus + r.product_minus - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.leakage, 0.0);
        assert!((r.t_opt - PI / (2.0 * r.epsilon)).abs() < 1e-12);
    }

    #[test]
    fn t_opt_arithmetic() {
        // ε = S₁ ‖P₀w‖ / √S₂ = 0.01 with S₁ = 0.01, S₂ = 1, ‖P₀w‖ = 1
        let eps = epsilon(0.01, 1.0, 1.0).unwrap();
        assert!((PI / (2.0 * eps) - 50.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn flags_serialize() {
        let f = AssumptionFlag::PrincipalDegenerate { multiplicity: 2 };
        assert_eq!(
            serde_json::to_string(&f).unwrap(),
            r#"{"flag":"principal_degenerate","multiplicity":2}"#
        );
    }
}
