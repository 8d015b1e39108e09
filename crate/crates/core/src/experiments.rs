//! Sweeps, fits and hypothesis checks over graph families.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{json_f64, sci17};
use crate::graph::{complete_bipartite, complete_graph, cycle_graph, total_graph, ElementLabel, Graph};
use crate::knn::{knn_marked, knn_series, MarkedKind, ERRATUM_NOTE};
use crate::par::{self, Execution};
use crate::search::{
    evolve, maximize_probability, report, uniform_grid, EvolutionTrace, LevelWeights, ProbabilityMax, SearchReport,
    SearchSetup, PMAX_SAMPLES,
};
use crate::spectral::{
    symmetric_eig, symmetric_spectrum, total_spectrum_regular, EigOptions, EigenSystem, KnnEigenbasis, Spectrum,
    TotalSpectrumClosedForm,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `K_n`
    Kn,
    /// `K_{n,n}`
    Knn,
    /// `C_n`
    Cycle,
}

impl Family {
    pub fn min_n(self) -> usize {
        match self {
            Self::Kn | Self::Cycle => 3,
            Self::Knn => 2,
        }
    }

    pub fn root(self, n: usize) -> Result<Graph> {
        if n < self.min_n() {
            return Err(Error::InvalidSize(format!(
                "{self:?} needs n >= {}, got {n}",
                self.min_n()
            )));
        }
        match self {
            Self::Kn => complete_graph(n),
            Self::Knn => complete_bipartite(n, n),
            Self::Cycle => cycle_graph(n),
        }
    }

    /// Root eigensystem, analytic for `K_{n,n}`.
    pub fn root_eigensystem(self, root: &Graph) -> Result<EigenSystem> {
        match self {
            Self::Knn => Ok(KnnEigenbasis::new(root.n() / 2)?.root_eigensystem()),
            _ => symmetric_eig(&root.adjacency_f64(), 1e-12),
        }
    }

    /// The last vertex or the last edge of the root.
    pub fn marked(self, root: &Graph, kind: MarkedKind) -> ElementLabel {
        match self {
            Self::Knn => knn_marked(root.n() / 2, kind),
            _ => match kind {
                MarkedKind::Vertex => ElementLabel::Vertex(root.n() - 1),
                MarkedKind::Edge => ElementLabel::Edge(root.m() - 1),
            },
        }
    }

    /// `ε√N` predicted in closed form.
    pub fn eps_sqrt_n_series(self, n: usize, kind: MarkedKind) -> Option<f64> {
        match self {
            Self::Knn if n >= 3 => Some(knn_series(n, kind).2),
            Self::Kn => Some(1.0),
            _ => None,
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kn" => Ok(Self::Kn),
            "knn" => Ok(Self::Knn),
            "cycle" => Ok(Self::Cycle),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkedSelection {
    Vertex,
    Edge,
    Both,
}

impl MarkedSelection {
    pub fn kinds(self) -> Vec<MarkedKind> {
        match self {
            Self::Vertex => vec![MarkedKind::Vertex],
            Self::Edge => vec![MarkedKind::Edge],
            Self::Both => vec![MarkedKind::Vertex, MarkedKind::Edge],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Family,
    pub n_min: usize,
    pub n_max: usize,
    pub step: usize,
    pub marked: MarkedSelection,
    pub format: OutputFormat,
    /// Time samples for dynamics runs.
    pub time_samples: usize,
    pub output: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            family: Family::Knn,
            n_min: 5,
            n_max: 100,
            step: 2,
            marked: MarkedSelection::Both,
            format: OutputFormat::Csv,
            time_samples: PMAX_SAMPLES,
            output: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_min < self.family.min_n() {
            return Err(Error::InvalidSize(format!(
                "n_min must be at least {} for {:?}",
                self.family.min_n(),
                self.family
            )));
        }
        if self.step == 0 {
            return Err(Error::InvalidSize("step must be at least 1".into()));
        }
        if self.n_max < self.n_min {
            return Err(Error::InvalidSize("n_max must be at least n_min".into()));
        }
        if self.time_samples < 3 {
            return Err(Error::InvalidSize("time_samples must be at least 3".into()));
        }
        Ok(())
    }

    pub fn sizes(&self) -> Vec<usize> {
        (self.n_min..=self.n_max).step_by(self.step.max(1)).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Levels of `T(root)` seen from the marked element, by closed form.
pub fn family_levels(family: Family, n: usize, kind: MarkedKind) -> Result<LevelWeights> {
    let root = family.root(n)?;
    let eig = family.root_eigensystem(&root)?;
    LevelWeights::closed_form_total(&root, &eig, family.marked(&root, kind))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub dimension: usize,
    pub kind: MarkedKind,
    #[serde(serialize_with = "json_f64")]
    pub gamma: f64,
    #[serde(serialize_with = "json_f64")]
    pub phi0: f64,
    #[serde(serialize_with = "json_f64")]
    pub s1: f64,
    #[serde(serialize_with = "json_f64")]
    pub s2: f64,
    #[serde(serialize_with = "json_f64")]
    pub lambda_plus: f64,
    #[serde(serialize_with = "json_f64")]
    pub lambda_minus: f64,
    /// `λ⁺ + γφ₀`
    #[serde(serialize_with = "json_f64")]
    pub eps_plus: f64,
    /// `λ⁻ + γφ₀`
    #[serde(serialize_with = "json_f64")]
    pub eps_minus: f64,
    #[serde(serialize_with = "json_f64")]
    pub half_gap: f64,
    /// `S₁ ‖P₀|w⟩‖ / √S₂`
    #[serde(serialize_with = "json_f64")]
    pub eps_method: f64,
    #[serde(serialize_with = "json_f64")]
    pub eps_series: f64,
    /// `|ε⁺ + ε⁻| / half_gap`
    #[serde(serialize_with = "json_f64")]
    pub asymmetry: f64,
    #[serde(serialize_with = "json_f64")]
    pub prod_plus: f64,
    #[serde(serialize_with = "json_f64")]
    pub prod_minus: f64,
    #[serde(serialize_with = "json_f64")]
    pub prod_sum: f64,
    #[serde(serialize_with = "json_f64")]
    pub leakage: f64,
    #[serde(serialize_with = "json_f64")]
    pub p_succ: f64,
    #[serde(serialize_with = "json_f64")]
    pub t_opt: f64,
}

pub const SWEEP_COLUMNS: [&str; 21] = [
    "n",
    "N",
    "kind",
    "gamma",
    "phi0",
    "s1",
    "s2",
    "lambda_plus",
    "lambda_minus",
    "eps_plus",
    "eps_minus",
    "half_gap",
    "eps_method",
    "eps_series",
    "asymmetry",
    "prod_plus",
    "prod_minus",
    "prod_sum",
    "leakage",
    "p_succ",
    "t_opt",
];

impl SweepRow {
    pub fn from_report(n: usize, kind: MarkedKind, rep: &SearchReport, eps_sqrt_n_series: Option<f64>) -> Self {
        let (eps_plus, eps_minus) = rep.eps_pm();
        let sqrt_n = (rep.dimension as f64).sqrt();
        Self {
            n,
            dimension: rep.dimension,
            kind,
            gamma: rep.gamma,
            phi0: rep.phi0,
            s1: rep.s1,
            s2: rep.s2,
            lambda_plus: rep.lambda_plus,
            lambda_minus: rep.lambda_minus,
            eps_plus,
            eps_minus,
            half_gap: rep.half_gap,
            eps_method: rep.epsilon,
            eps_series: eps_sqrt_n_series.map_or(f64::NAN, |e| e / sqrt_n),
            asymmetry: (eps_plus + eps_minus).abs() / rep.half_gap,
            prod_plus: rep.product_plus,
            prod_minus: rep.product_minus,
            prod_sum: rep.product_plus + rep.product_minus,
            leakage: rep.leakage,
            p_succ: rep.p_succ,
            t_opt: rep.t_opt,
        }
    }

    fn record(&self) -> Vec<String> {
        let mut out = vec![self.n.to_string(), self.dimension.to_string(), self.kind.to_string()];
        out.extend(
            [
                self.gamma,
                self.phi0,
                self.s1,
                self.s2,
                self.lambda_plus,
                self.lambda_minus,
                self.eps_plus,
                self.eps_minus,
                self.half_gap,
                self.eps_method,
                self.eps_series,
                self.asymmetry,
                self.prod_plus,
                self.prod_minus,
                self.prod_sum,
                self.leakage,
                self.p_succ,
                self.t_opt,
            ]
            .map(sci17),
        );
        out
    }
}

/// One row per `(n, kind)`, sorted by `(n, kind)` whatever the execution order.
pub fn sweep(config: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let points: Vec<(usize, MarkedKind)> = config
        .sizes()
        .into_iter()
        .flat_map(|n| config.marked.kinds().into_iter().map(move |k| (n, k)))
        .collect();
    let family = config.family;
    let rows = par::map(exec, &points, |&(n, kind)| -> Result<SweepRow> {
        let rep = report(&family_levels(family, n, kind)?, None)?;
        Ok(SweepRow::from_report(n, kind, &rep, family.eps_sqrt_n_series(n, kind)))
    });
    let mut rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.kind));
    Ok(rows)
}

pub fn write_rows_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(SWEEP_COLUMNS)?;
    for row in rows {
        wtr.write_record(row.record())?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_rows_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn rows_to_json(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    #[serde(serialize_with = "json_f64")]
    pub slope: f64,
    #[serde(serialize_with = "json_f64")]
    pub intercept: f64,
    /// Root-mean-square residual in log₁₀ units.
    #[serde(serialize_with = "json_f64")]
    pub rms: f64,
    pub points: usize,
}

/// Least-squares line through `(log₁₀ x, log₁₀ |y|)`.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            found: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| *v == 0.0 || !v.is_finite()) || x.iter().any(|v| *v < 0.0) {
        return Err(Error::Assumption(
            "log-log fit needs positive x and nonzero finite y".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().log10()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Assumption("all x values coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(FitResult {
        slope,
        intercept,
        rms,
        points: lx.len(),
    })
}

/// Fits `column` against `N` in a sweep CSV, optionally for one marked kind.
pub fn fit_csv<R: Read>(input: R, column: &str, kind: Option<MarkedKind>) -> Result<FitResult> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column `{name}`")))
    };
    let xi = find("N")?;
    let yi = find(column)?;
    let ki = headers.iter().position(|h| h == "kind");
    let mut x = Vec::new();
    let mut y = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if let (Some(kind), Some(ki)) = (kind, ki) {
            if record.get(ki) != Some(kind.as_str()) {
                continue;
            }
        }
        let parse = |i: usize| -> Result<f64> {
            let field = record.get(i).unwrap_or("");
            field
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{field}`")))
        };
        x.push(parse(xi)?);
        y.push(parse(yi)?);
    }
    fit_loglog(&x, &y)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Largest normalized violation metric observed.
    #[serde(serialize_with = "json_f64")]
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct KindChecks {
    pub kind: MarkedKind,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisSummary {
    pub family: Family,
    pub passed: bool,
    pub kinds: Vec<KindChecks>,
}

/// `n` from which the second-order symmetry bound is enforced.
pub const SYMMETRY_FROM_N: usize = 10;
/// Largest allowed leakage for the two-level check.
pub const DOMINANCE_THRESHOLD: f64 = crate::search::LEAKAGE_THRESHOLD;

fn non_increasing(values: &[f64]) -> Option<usize> {
    values
        .windows(2)
        .position(|w| w[1] > w[0] * (1.0 + 1e-9) + f64::MIN_POSITIVE)
}

/// Gap symmetry: `|ε⁺ + ε⁻| / ε ≤ 10ε` for `n ≥ 10` and the normalized
/// asymmetry non-increasing in `n`, with `ε` the half gap.
pub fn check_gap_symmetry(rows: &[&SweepRow]) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for r in rows.iter().filter(|r| r.n >= SYMMETRY_FROM_N) {
        let ratio = r.asymmetry / (10.0 * r.half_gap);
        worst = worst.max(ratio);
        if ratio > 1.0 {
            bad.push(r.n);
        }
    }
    let asym: Vec<f64> = rows.iter().map(|r| r.asymmetry).collect();
    let trend = non_increasing(&asym);
    let mut detail = String::new();
    if !bad.is_empty() {
        detail.push_str(&format!("bound exceeded at n = {bad:?}; "));
    }
    if let Some(i) = trend {
        detail.push_str(&format!(
            "asymmetry rises from n = {} to n = {}",
            rows[i].n,
            rows[i + 1].n
        ));
    }
    CheckOutcome {
        name: "gap_symmetry",
        passed: bad.is_empty() && trend.is_none(),
        worst,
        detail,
    }
}

/// Overlap antisymmetry: `|⟨λ⁺|ψ⟩⟨w|λ⁺⟩ + ⟨λ⁻|ψ⟩⟨w|λ⁻⟩|` non-increasing in
/// `n`. `worst` is the largest `√N · |sum|`.
pub fn check_overlap_antisymmetry(rows: &[&SweepRow]) -> CheckOutcome {
    let sums: Vec<f64> = rows.iter().map(|r| r.prod_sum.abs()).collect();
    let worst = rows
        .iter()
        .map(|r| r.prod_sum.abs() * (r.dimension as f64).sqrt())
        .fold(0.0, f64::max);
    let trend = non_increasing(&sums);
    CheckOutcome {
        name: "overlap_antisymmetry",
        passed: trend.is_none(),
        worst,
        detail: trend.map_or_else(String::new, |i| {
            format!("product sum rises from n = {} to n = {}", rows[i].n, rows[i + 1].n)
        }),
    }
}

/// Two-level dominance: leakage at most [`DOMINANCE_THRESHOLD`] everywhere.
pub fn check_two_level_dominance(rows: &[&SweepRow]) -> CheckOutcome {
    let worst = rows.iter().map(|r| r.leakage).fold(0.0, f64::max);
    let bad: Vec<usize> = rows
        .iter()
        .filter(|r| r.leakage > DOMINANCE_THRESHOLD)
        .map(|r| r.n)
        .collect();
    CheckOutcome {
        name: "two_level_dominance",
        passed: bad.is_empty(),
        worst,
        detail: if bad.is_empty() {
            String::new()
        } else {
            format!("leakage above {DOMINANCE_THRESHOLD} at n = {bad:?}")
        },
    }
}

pub fn check_rows(family: Family, rows: &[SweepRow]) -> HypothesisSummary {
    let mut kinds = Vec::new();
    for kind in [MarkedKind::Vertex, MarkedKind::Edge] {
        let subset: Vec<&SweepRow> = rows.iter().filter(|r| r.kind == kind).collect();
        if subset.is_empty() {
            continue;
        }
        kinds.push(KindChecks {
            kind,
            checks: vec![
                check_gap_symmetry(&subset),
                check_overlap_antisymmetry(&subset),
                check_two_level_dominance(&subset),
            ],
        });
    }
    let passed = kinds.iter().all(|k| k.checks.iter().all(|c| c.passed));
    HypothesisSummary { family, passed, kinds }
}

pub fn check_hypotheses(config: &SweepConfig, exec: Execution) -> Result<HypothesisSummary> {
    Ok(check_rows(config.family, &sweep(config, exec)?))
}

/// Closed-form total spectrum next to the dense one.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumComparison {
    pub family: Family,
    pub n: usize,
    pub closed_form: TotalSpectrumClosedForm,
    pub closed_form_spectrum: Spectrum,
    pub oracle: Spectrum,
    /// `None` when the multiplicity patterns differ.
    #[serde(serialize_with = "crate::format::json_opt_f64")]
    pub max_diff: Option<f64>,
    pub multiplicities_match: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erratum_note: Option<&'static str>,
}

pub fn compare_spectrum(family: Family, n: usize, exec: Execution) -> Result<SpectrumComparison> {
    let root = family.root(n)?;
    let closed_form = total_spectrum_regular(&root)?;
    let cf = closed_form.spectrum();
    let t = total_graph(&root);
    let oracle = symmetric_spectrum(&t.graph().adjacency_f64(), &EigOptions::default().with_exec(exec))?;
    let max_diff = cf.max_abs_diff(&oracle);
    Ok(SpectrumComparison {
        family,
        n,
        multiplicities_match: cf.multiplicities() == oracle.multiplicities(),
        closed_form,
        closed_form_spectrum: cf,
        oracle,
        max_diff,
        erratum_note: (family == Family::Knn).then_some(ERRATUM_NOTE),
    })
}

/// Dense-dynamics search on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub family: Family,
    pub n: usize,
    pub kind: MarkedKind,
    pub label: ElementLabel,
    pub report: SearchReport,
    pub p_max: ProbabilityMax,
    /// `π√N / 2`.
    #[serde(serialize_with = "json_f64")]
    pub t_reference: f64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub trace: EvolutionTrace,
}

/// Builds `H` at `γ` (default `S₁`), diagonalizes it, samples `p(t)` on
/// `[0, 2 t_opt]` and refines the maximum.
pub fn search_instance(
    family: Family,
    n: usize,
    kind: MarkedKind,
    gamma: Option<f64>,
    samples: usize,
    exec: Execution,
) -> Result<SearchOutcome> {
    let root = family.root(n)?;
    let label = family.marked(&root, kind);
    let rep = report(
        &LevelWeights::closed_form_total(&root, &family.root_eigensystem(&root)?, label)?,
        gamma,
    )?;
    let t = total_graph(&root);
    let setup = SearchSetup::on_total_graph(&t, label, rep.gamma)?;
    let h = setup.diagonalize(&EigOptions::default().with_exec(exec))?;
    let horizon = 2.0 * rep.t_opt;
    let trace = evolve(&setup, &h, &uniform_grid(horizon, samples), exec)?;
    let model = crate::search::SpectralAmplitudes::from_eigensystem(&h, setup.marked(), setup.initial())?;
    let p_max = maximize_probability(&model, horizon, samples, exec)?;
    let warnings = rep.flags.iter().map(ToString::to_string).collect();
    Ok(SearchOutcome {
        family,
        n,
        kind,
        label,
        t_reference: PI * (t.dimension() as f64).sqrt() / 2.0,
        report: rep,
        p_max,
        warnings,
        trace,
    })
}
