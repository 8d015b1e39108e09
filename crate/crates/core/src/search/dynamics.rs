use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::sci17;
use crate::graph::{ElementLabel, TotalGraph};
use crate::matrix::{dot, norm, Matrix};
use crate::par::{self, Execution};
use crate::spectral::{symmetric_eig_with, EigOptions, EigenSystem};

use super::secular::SecularEquation;

/// `H = −γA − |w⟩⟨w|` with its initial state.
#[derive(Debug, Clone)]
pub struct SearchSetup {
    adjacency: Matrix<f64>,
    marked: usize,
    label: Option<ElementLabel>,
    gamma: f64,
    initial: Vec<f64>,
}

impl SearchSetup {
    /// Uniform initial state.
    pub fn new(adjacency: Matrix<f64>, marked: usize, gamma: f64) -> Result<Self> {
        if !adjacency.is_square() {
            return Err(Error::NotSquare {
                rows: adjacency.rows(),
                cols: adjacency.cols(),
            });
        }
        let dim = adjacency.rows();
        if marked >= dim {
            return Err(Error::IndexOutOfRange {
                index: marked,
                len: dim,
            });
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Assumption(format!("gamma must be positive, got {gamma}")));
        }
        let u = 1.0 / (dim as f64).sqrt();
        Ok(Self {
            adjacency,
            marked,
            label: None,
            gamma,
            initial: vec![u; dim],
        })
    }

    /// Walk on `T(G)` with the marked element given by its root label.
    pub fn on_total_graph(t: &TotalGraph, label: ElementLabel, gamma: f64) -> Result<Self> {
        let w = t.index_of(label)?;
        let mut s = Self::new(t.graph().adjacency_f64(), w, gamma)?;
        s.label = Some(label);
        Ok(s)
    }

    pub fn with_initial(mut self, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: initial.len(),
            });
        }
        let nrm = norm(&initial);
        if (nrm - 1.0).abs() > 1e-10 {
            return Err(Error::Assumption(format!("initial state has norm {nrm}")));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Assumption(format!("gamma must be positive, got {gamma}")));
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn adjacency(&self) -> &Matrix<f64> {
        &self.adjacency
    }

    pub fn marked(&self) -> usize {
        self.marked
    }

    pub fn label(&self) -> Option<ElementLabel> {
        self.label
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn dimension(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn hamiltonian(&self) -> Matrix<f64> {
        let mut h = self.adjacency.map(|a| -self.gamma * a);
        let w = self.marked;
        let d = self.dimension();
        h.as_mut_slice()[w * d + w] -= 1.0;
        h
    }

    pub fn diagonalize(&self, opts: &EigOptions) -> Result<EigenSystem> {
        symmetric_eig_with(&self.hamiltonian(), opts)
    }
}

/// `⟨w|ψ(t)⟩ = Σ_k c_k e^{−i λ_k t}`, with `c_k = ⟨w|λ_k⟩⟨λ_k|ψ(0)⟩`.
#[derive(Debug, Clone)]
pub struct SpectralAmplitudes {
    frequencies: Vec<f64>,
    coefficients: Vec<f64>,
}

impl SpectralAmplitudes {
    pub fn new(frequencies: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        if frequencies.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: frequencies.len(),
                found: coefficients.len(),
            });
        }
        Ok(Self {
            frequencies,
            coefficients,
        })
    }

    /// From a dense eigensystem of `H`.
    pub fn from_eigensystem(h: &EigenSystem, w: usize, initial: &[f64]) -> Result<Self> {
        let dim = h.dimension();
        if initial.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: initial.len(),
            });
        }
        if w >= dim {
            return Err(Error::IndexOutOfRange { index: w, len: dim });
        }
        let basis = h.basis();
        let mut proj = vec![0.0; dim];
        for (i, &x) in initial.iter().enumerate() {
            if x != 0.0 {
                for (p, b) in proj.iter_mut().zip(basis.row(i)) {
                    *p += b * x;
                }
            }
        }
        let coefficients = basis.row(w).iter().zip(&proj).map(|(a, b)| a * b).collect();
        Self::new(h.eigenvalues().to_vec(), coefficients)
    }

    /// From the secular roots alone; only the eigenvectors outside
    /// `σ(−γA)` overlap `|w⟩`, so these carry the whole amplitude.
    pub fn from_secular(eq: &SecularEquation, cross: &[f64]) -> Result<Self> {
        let roots = eq.all_roots()?;
        let coefficients = roots
            .iter()
            .map(|&l| eq.overlap_w(l) * eq.overlap_with(l, cross))
            .collect();
        Self::new(roots, coefficients)
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `⟨w|ψ(0)⟩`.
    pub fn total(&self) -> f64 {
        self.coefficients.iter().sum()
    }

    pub fn amplitude(&self, t: f64) -> Complex64 {
        self.frequencies
            .iter()
            .zip(&self.coefficients)
            .map(|(&f, &c)| Complex64::from_polar(c, -f * t))
            .sum()
    }

    pub fn probability(&self, t: f64) -> f64 {
        self.amplitude(t).norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityMax {
    #[serde(serialize_with = "crate::format::json_f64")]
    pub t: f64,
    #[serde(serialize_with = "crate::format::json_f64")]
    pub p: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    times: Vec<f64>,
    amplitudes: Vec<Complex64>,
    probabilities: Vec<f64>,
    argmax: usize,
}

impl EvolutionTrace {
    fn from_amplitudes(times: Vec<f64>, amplitudes: Vec<Complex64>) -> Self {
        let probabilities: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
        let argmax = probabilities
            .iter()
            .enumerate()
            .fold(0, |best, (i, &p)| if p > probabilities[best] { i } else { best });
        Self {
            times,
            amplitudes,
            probabilities,
            argmax,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Best sample on the grid.
    pub fn max(&self) -> Option<ProbabilityMax> {
        (!self.times.is_empty()).then(|| ProbabilityMax {
            t: self.times[self.argmax],
            p: self.probabilities[self.argmax],
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["t", "re_amp", "im_amp", "p"])?;
        for ((t, a), p) in self.times.iter().zip(&self.amplitudes).zip(&self.probabilities) {
            wtr.write_record([sci17(*t), sci17(a.re), sci17(a.im), sci17(*p)])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Assumption("time grid must be finite and sorted".into()));
    }
    Ok(())
}

/// Exact evolution of the marked amplitude through the eigensystem of `H`.
pub fn evolve(setup: &SearchSetup, h: &EigenSystem, times: &[f64], exec: Execution) -> Result<EvolutionTrace> {
    if h.dimension() != setup.dimension() {
        return Err(Error::DimensionMismatch {
            expected: setup.dimension(),
            found: h.dimension(),
        });
    }
    let model = SpectralAmplitudes::from_eigensystem(h, setup.marked(), setup.initial())?;
    evolve_model(&model, times, exec)
}

pub fn evolve_model(model: &SpectralAmplitudes, times: &[f64], exec: Execution) -> Result<EvolutionTrace> {
    check_times(times)?;
    let amps = par::map(exec, times, |&t| model.amplitude(t));
    Ok(EvolutionTrace::from_amplitudes(times.to_vec(), amps))
}

/// Full state `ψ(t) = Σ_k e^{−iλ_k t} |λ_k⟩⟨λ_k|ψ(0)⟩`.
pub fn state_at(h: &EigenSystem, initial: &[f64], t: f64) -> Result<Vec<Complex64>> {
    let coords = h.coordinates(initial)?;
    let basis = h.basis();
    let phases: Vec<Complex64> = h
        .eigenvalues()
        .iter()
        .zip(&coords)
        .map(|(&l, &c)| Complex64::from_polar(c, -l * t))
        .collect();
    Ok((0..h.dimension())
        .map(|i| basis.row(i).iter().zip(&phases).map(|(&b, &p)| p * b).sum())
        .collect())
}

/// `samples` evenly spaced points on `[0, t_end]`.
pub fn uniform_grid(t_end: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let step = t_end / (samples - 1) as f64;
            (0..samples).map(|k| k as f64 * step).collect()
        }
    }
}

pub const PMAX_SAMPLES: usize = 2001;
pub const PMAX_RTOL: f64 = 1e-6;

/// Maximum of `p(t)` on `[0, t_end]`: best of `samples` grid points, then
/// golden-section refinement on the neighbouring cells.
pub fn maximize_probability(
    model: &SpectralAmplitudes,
    t_end: f64,
    samples: usize,
    exec: Execution,
) -> Result<ProbabilityMax> {
    if !(t_end > 0.0 && t_end.is_finite()) || samples < 3 {
        return Err(Error::Assumption(
            "need a positive horizon and at least 3 samples".into(),
        ));
    }
    let trace = evolve_model(model, &uniform_grid(t_end, samples), exec)?;
    let best = trace.max().expect("non-empty grid");
    let k = trace.argmax;
    let lo = trace.times[k.saturating_sub(1)];
    let hi = trace.times[(k + 1).min(samples - 1)];
    let refined = golden_max(|t| model.probability(t), lo, hi, PMAX_RTOL * best.t.max(hi));
    Ok(if refined.p >= best.p { refined } else { best })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> ProbabilityMax {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    ProbabilityMax { t, p: f(t) }
}

/// `(⟨w|λ⟩, ⟨ψ(0)|λ⟩)` for the `H` level closest to `lambda`, with the
/// phase chosen so `⟨w|λ⟩ ≥ 0`.
pub fn dense_overlaps(h: &EigenSystem, w: usize, initial: &[f64], lambda: f64) -> Result<(f64, f64)> {
    let level = h
        .values()
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - lambda).abs().total_cmp(&(b.1 - lambda).abs()))
        .map(|(l, _)| l)
        .ok_or_else(|| Error::Assumption("empty eigensystem".into()))?;
    let mut ew = vec![0.0; h.dimension()];
    ew[w] = 1.0;
    let pw = h.projector_apply(level, &ew)?;
    let ow = norm(&pw);
    if ow == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok((ow, dot(initial, &pw) / ow))
}
