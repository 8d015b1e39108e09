//! Closed forms for `T(K_{n,n})` and `T(K_n)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::json_f64;
use crate::graph::{complete_bipartite, complete_graph, total_graph, ElementLabel, Graph};
use crate::par::Execution;
use crate::search::{
    maximize_probability, report, uniform_grid, LevelWeights, SearchReport, SearchSetup, SpectralAmplitudes,
    PMAX_SAMPLES,
};
use crate::spectral::{
    symmetric_eig, symmetric_eig_with, total_spectrum_from_root, EigOptions, KnnEigenbasis, Spectrum,
    TotalSpectrumClosedForm,
};

/// Attached to every `K_{n,n}` output: the eigenvalue `n − 2` is the one that
/// passes the trace identities.
pub const ERRATUM_NOTE: &str = "phi_2 = n - 2 with X^- coefficient -n and norm^2 n^2 + 2n; \
     the alternative n - 4 (coefficient -2 - n, norm^2 n^2 + 6n + 4) violates \
     sum(mult * phi) = 0 and sum(mult * phi^2) = 2|E(T)|";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkedKind {
    Vertex,
    Edge,
}

impl MarkedKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Vertex => "vertex",
            Self::Edge => "edge",
        }
    }
}

impl std::fmt::Display for MarkedKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MarkedKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertex" => Ok(Self::Vertex),
            "edge" => Ok(Self::Edge),
            other => Err(Error::Parse(format!("unknown marked kind `{other}`"))),
        }
    }
}

/// `|n⟩` or `|e_{n,n}⟩` as a root label.
pub fn knn_marked(n: usize, kind: MarkedKind) -> ElementLabel {
    match kind {
        MarkedKind::Vertex => ElementLabel::Vertex(n - 1),
        MarkedKind::Edge => ElementLabel::Edge(n * n - 1),
    }
}

/// `N = n² + 2n`.
pub fn knn_dimension(n: usize) -> usize {
    n * n + 2 * n
}

/// The six levels `2n, θ₀⁺, φ₂, θ₀⁻, −2, −n` with their multiplicities,
/// for a caller-supplied `φ₂`.
pub fn knn_levels_with_phi2(n: usize, phi2: f64) -> Vec<(f64, usize)> {
    let nf = n as f64;
    let disc = (nf * nf + 4.0).sqrt();
    vec![
        (2.0 * nf, 1),
        ((nf - 2.0 + disc) / 2.0, 2 * (n - 1)),
        (phi2, 1),
        ((nf - 2.0 - disc) / 2.0, 2 * (n - 1)),
        (-2.0, (n - 1) * (n - 1)),
        (-nf, 1),
    ]
}

/// Closed-form spectrum of `T(K_{n,n})`, collisions merged.
pub fn knn_total_spectrum(n: usize) -> Result<TotalSpectrumClosedForm> {
    if n < 2 {
        return Err(Error::InvalidSize("T(K_{n,n}) needs n >= 2".into()));
    }
    let nf = n as f64;
    let root = Spectrum::from_levels(&[(nf, 1), (0.0, 2 * n - 2), (-nf, 1)], 1e-12);
    total_spectrum_from_root(&root, n, n * n, true)
}

/// Exact levels of `T(K_{n,n})` seen from the marked element.
pub fn knn_levels(n: usize, kind: MarkedKind) -> Result<LevelWeights> {
    let basis = KnnEigenbasis::new(n)?;
    LevelWeights::closed_form_total(&basis.root_graph(), &basis.root_eigensystem(), knn_marked(n, kind))
}

#[derive(Debug, Clone, Serialize)]
pub struct KnnSearchAsymptotics {
    pub n: usize,
    pub kind: MarkedKind,
    #[serde(rename = "N")]
    pub dimension: usize,
    #[serde(serialize_with = "json_f64")]
    pub s1_series: f64,
    #[serde(serialize_with = "json_f64")]
    pub s1_exact: f64,
    #[serde(serialize_with = "json_f64")]
    pub s2_series: f64,
    #[serde(serialize_with = "json_f64")]
    pub s2_exact: f64,
    /// Series for `ε√N`.
    #[serde(serialize_with = "json_f64")]
    pub eps_sqrt_n_series: f64,
    #[serde(serialize_with = "json_f64")]
    pub eps_sqrt_n_exact: f64,
    #[serde(serialize_with = "json_f64")]
    pub p_succ_series: f64,
    /// `4 |⟨λ⁺|ψ(0)⟩|² |⟨w|λ⁺⟩|²` at the exact roots.
    #[serde(serialize_with = "json_f64")]
    pub p_succ_exact: f64,
    /// `π√N / 2`.
    #[serde(serialize_with = "json_f64")]
    pub t_opt_series: f64,
    #[serde(serialize_with = "json_f64")]
    pub t_opt_exact: f64,
    #[serde(serialize_with = "json_f64")]
    pub theta0_plus: f64,
    #[serde(serialize_with = "json_f64")]
    pub theta0_minus: f64,
    #[serde(serialize_with = "json_f64")]
    pub delta_plus: f64,
    #[serde(serialize_with = "json_f64")]
    pub delta_minus: f64,
    pub erratum_note: &'static str,
}

/// `(S₁, S₂, ε√N, p_succ)` series to the orders known in closed form.
pub fn knn_series(n: usize, kind: MarkedKind) -> (f64, f64, f64, f64) {
    let nf = n as f64;
    let s2 = 1.0 / (4.0 * nf * nf);
    match kind {
        MarkedKind::Vertex => (
            1.0 / (2.0 * nf) + 5.0 / (12.0 * nf * nf),
            s2,
            1.0 - 7.0 / (9.0 * nf),
            1.0 - 14.0 / (9.0 * nf),
        ),
        MarkedKind::Edge => (
            1.0 / (2.0 * nf) + 1.0 / (2.0 * nf * nf),
            s2,
            1.0 - 1.0 / nf,
            1.0 - 2.0 / nf,
        ),
    }
}

pub fn knn_search_asymptotics(n: usize, kind: MarkedKind) -> Result<KnnSearchAsymptotics> {
    if n < 3 {
        return Err(Error::InvalidSize("asymptotics need n >= 3".into()));
    }
    let basis = KnnEigenbasis::new(n)?;
    let rep = report(&knn_levels(n, kind)?, None)?;
    let (s1, s2, eps, p) = knn_series(n, kind);
    let dim = knn_dimension(n);
    let sqrt_n = (dim as f64).sqrt();
    Ok(KnnSearchAsymptotics {
        n,
        kind,
        dimension: dim,
        s1_series: s1,
        s1_exact: rep.s1,
        s2_series: s2,
        s2_exact: rep.s2,
        eps_sqrt_n_series: eps,
        eps_sqrt_n_exact: rep.epsilon * sqrt_n,
        p_succ_series: p,
        p_succ_exact: rep.p_succ,
        t_opt_series: PI * sqrt_n / 2.0,
        t_opt_exact: rep.t_opt,
        theta0_plus: basis.theta0_plus,
        theta0_minus: basis.theta0_minus,
        delta_plus: basis.delta_plus,
        delta_minus: basis.delta_minus,
        erratum_note: ERRATUM_NOTE,
    })
}

/// `J(v, 2)`: 2-subsets of `0..v` in lexicographic order, adjacent when they
/// share exactly one element.
pub fn johnson_graph(v: usize, k: usize) -> Result<Graph> {
    if k != 2 {
        return Err(Error::InvalidSize("only J(v, 2) is supported".into()));
    }
    if v < 2 {
        return Err(Error::InvalidSize("J(v, 2) needs v >= 2".into()));
    }
    let subsets = pairs(v);
    let mut edges = Vec::new();
    for (a, &(p, q)) in subsets.iter().enumerate() {
        for (b, &(s, t)) in subsets.iter().enumerate().skip(a + 1) {
            let shared = usize::from(p == s || p == t) + usize::from(q == s || q == t);
            if shared == 1 {
                edges.push((a, b));
            }
        }
    }
    Graph::new(subsets.len(), edges)
}

fn pairs(v: usize) -> Vec<(usize, usize)> {
    (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect()
}

fn pair_index(v: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * v - a * (a + 1) / 2 + (b - a - 1)
}

/// `T(K_n) → J(n+1, 2)`: vertex `i ↦ {i, n}`, edge `{i, j} ↦ {i, j}`.
#[derive(Debug, Clone, Serialize)]
pub struct JohnsonBijection {
    pub n: usize,
    /// `map[t]` is the Johnson vertex of total-graph element `t`.
    pub map: Vec<usize>,
}

pub fn total_kn_johnson_isomorphism(n: usize) -> Result<JohnsonBijection> {
    if n < 2 {
        return Err(Error::InvalidSize("T(K_n) isomorphism needs n >= 2".into()));
    }
    let root = complete_graph(n)?;
    let t = total_graph(&root);
    let j = johnson_graph(n + 1, 2)?;
    let map: Vec<usize> = t
        .labels()
        .iter()
        .map(|&label| match label {
            ElementLabel::Vertex(i) => pair_index(n + 1, i, n),
            ElementLabel::Edge(e) => {
                let (a, b) = root.edges()[e];
                pair_index(n + 1, a, b)
            }
        })
        .collect();
    let mut seen = vec![false; j.n()];
    for &x in &map {
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::AdjacencyMismatch(
                format!("johnson vertex {x}"),
                "hit twice".into(),
            ));
        }
    }
    let labels = t.labels();
    for a in 0..map.len() {
        for b in a + 1..map.len() {
            if t.graph().is_adjacent(a, b) != j.is_adjacent(map[a], map[b]) {
                return Err(Error::AdjacencyMismatch(labels[a].to_string(), labels[b].to_string()));
            }
        }
    }
    Ok(JohnsonBijection { n, map })
}

/// Full-dynamics search on `T(K_n)` with a marked vertex at `γ = S₁`.
#[derive(Debug, Clone, Serialize)]
pub struct KnSearchProfile {
    pub n: usize,
    pub report: SearchReport,
    /// `p(π√N/2)`.
    #[serde(serialize_with = "json_f64")]
    pub p_at_t_run: f64,
    pub p_max: crate::search::ProbabilityMax,
    /// Pearson correlation of `p(t)` with `p_succ sin²(εt)` on `[0, t_opt]`.
    #[serde(serialize_with = "json_f64")]
    pub sin2_correlation: f64,
}

pub fn kn_search_profile(n: usize, exec: Execution) -> Result<KnSearchProfile> {
    if n < 3 {
        return Err(Error::InvalidSize("K_n search needs n >= 3".into()));
    }
    let root = complete_graph(n)?;
    let root_eig = symmetric_eig(&root.adjacency_f64(), 1e-12)?;
    let label = ElementLabel::Vertex(0);
    let rep = report(&LevelWeights::closed_form_total(&root, &root_eig, label)?, None)?;
    let t = total_graph(&root);
    let setup = SearchSetup::on_total_graph(&t, label, rep.gamma)?;
    let h = symmetric_eig_with(&setup.hamiltonian(), &EigOptions::default().with_exec(exec))?;
    let model = SpectralAmplitudes::from_eigensystem(&h, setup.marked(), setup.initial())?;
    let sqrt_n = (t.dimension() as f64).sqrt();
    let p_max = maximize_probability(&model, 2.0 * rep.t_opt, PMAX_SAMPLES, exec)?;
    let grid = uniform_grid(rep.t_opt, PMAX_SAMPLES);
    let actual: Vec<f64> = grid.iter().map(|&t| model.probability(t)).collect();
    let ideal: Vec<f64> = grid
        .iter()
        .map(|&t| rep.p_succ * (rep.epsilon * t).sin().powi(2))
        .collect();
    Ok(KnSearchProfile {
        n,
        p_at_t_run: model.probability(PI * sqrt_n / 2.0),
        p_max,
        sin2_correlation: pearson(&actual, &ideal),
        report: rep,
    })
}

/// Sample Pearson correlation; `NaN` when either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// `T(K_{n,n})` as an explicit graph.
pub fn knn_total_graph(n: usize) -> Result<crate::graph::TotalGraph> {
    Ok(total_graph(&complete_bipartite(n, n)?))
}
