//! The cross-check battery and its report.
//!
//! `analyze` runs every static check on one digraph: component structure vs
//! the rank of `L`, spectrum localization, and agreement of the three
//! projector routes (forest enumeration, resolvent, long-run Perron limit).
//! `dynamics_checks` extends the battery with trajectory checks; the `fuzz`
//! subcommand runs both over random graphs. Every check carries its fixed
//! threshold and the measured discrepancy.

use crate::components::{self, ComponentDecomposition};
use crate::digraph::{laplacian, Digraph, LaplacianMatrix};
use crate::dynamics::{self, DynamicsError, LongRunMode, PerronMatrix};
use crate::forests::{self, ForestError};
use crate::spectral::{self, SpectralError, SpectralReport};
use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};
use std::fmt::Write as _;
use thiserror::Error;

pub const TOL_LAPLACIAN_ROW_SUM: f64 = 1e-12;
pub const TOL_FOREST_ROW_SUM: f64 = 1e-12;
pub const TOL_IDEMPOTENT: f64 = 1e-10;
pub const TOL_COMMUTE: f64 = 1e-10;
pub const TOL_FOREST_VS_RESOLVENT: f64 = 1e-6;
pub const TOL_FOREST_VS_POWER: f64 = 1e-8;
pub const TOL_FOREST_VS_CESARO: f64 = 1e-4;
pub const TOL_PRIMITIVE_LIMIT: f64 = 1e-8;
pub const TOL_NORMALIZATION: f64 = 1e-12;
pub const TOL_TRAJECTORY: f64 = 1e-6;
pub const TOL_CONSERVATION: f64 = 1e-10;
pub const TOL_MONOTONE: f64 = 1e-12;
/// Singular values of an exact projector are either 0 or at least 1, so any
/// threshold strictly between works.
pub const PROJECTOR_RANK_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub tau: f64,
    pub epsilon: Option<f64>,
    pub tolerance: Option<f64>,
    pub enumeration_limit: usize,
    pub forest_budget: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            tau: spectral::DEFAULT_RESOLVENT_TAU,
            epsilon: None,
            tolerance: None,
            enumeration_limit: forests::DEFAULT_ENUMERATION_LIMIT,
            forest_budget: forests::DEFAULT_FAMILY_BUDGET,
        }
    }
}

/// One named cross-check: what it measured, against which threshold.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub discrepancy: f64,
    pub threshold: f64,
}

impl CheckResult {
    fn measured(name: &'static str, discrepancy: f64, threshold: f64) -> Self {
        Self {
            name,
            pass: discrepancy <= threshold,
            discrepancy,
            threshold,
        }
    }

    fn boolean(name: &'static str, pass: bool) -> Self {
        Self {
            name,
            pass,
            discrepancy: if pass { 0.0 } else { 1.0 },
            threshold: 0.0,
        }
    }
}

/// Summary of the enumerated forest family, with its matrix.
#[derive(Debug, Clone)]
pub struct ForestSummary {
    pub dimension: usize,
    pub max_arc_count: usize,
    pub forest_count: usize,
    pub total_weight: f64,
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct PerronSummary {
    pub epsilon: f64,
    pub stochastic: bool,
    pub positive_diagonal: bool,
    pub primitive: bool,
    pub unit_modulus_count: usize,
}

/// Everything `analyze` computed for one digraph.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub n: usize,
    pub arc_count: usize,
    pub decomposition: ComponentDecomposition,
    pub structural_dimension: usize,
    pub has_spanning_converging_tree: bool,
    pub forest: Option<ForestSummary>,
    pub forest_skip_reason: Option<String>,
    pub spectral: SpectralReport,
    /// The naive prediction `n - scc_count` for the rank, reported because
    /// it is wrong whenever some SCC is not a sink; the correct law is
    /// `rank = n - d`.
    pub naive_scc_rank_prediction: i64,
    pub naive_prediction_matches: bool,
    pub perron: PerronSummary,
    pub resolvent_tau: f64,
    pub resolvent: DMatrix<f64>,
    pub long_run: Option<(LongRunMode, DMatrix<f64>)>,
    pub max_route_discrepancy: f64,
    pub checks: Vec<CheckResult>,
}

impl AnalysisReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The most trusted projector available: exact enumeration when the
    /// graph is small enough, otherwise the long-run limit, otherwise the
    /// resolvent approximation.
    pub fn best_projector(&self) -> &DMatrix<f64> {
        if let Some(f) = &self.forest {
            &f.matrix
        } else if let Some((_, m)) = &self.long_run {
            m
        } else {
            &self.resolvent
        }
    }
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Runs the full static battery on one digraph.
pub fn analyze(g: &Digraph, opts: &AnalysisOptions) -> Result<AnalysisReport, AnalysisError> {
    let n = g.n();
    let l = laplacian(g);
    let decomposition = components::decompose(g);
    let d = components::forest_dimension_structural(&decomposition);
    let has_tree = components::has_spanning_converging_tree(g);

    let (forest, forest_skip_reason) =
        match forests::enumerate_maximal_in_forests_bounded(g, opts.enumeration_limit, opts.forest_budget) {
            Ok(family) => {
                let matrix = forests::forest_matrix(&family).matrix().clone();
                (
                    Some(ForestSummary {
                        dimension: family.dimension(),
                        max_arc_count: family.max_arc_count(),
                        forest_count: family.forests().len(),
                        total_weight: family.total_weight(),
                        matrix,
                    }),
                    None,
                )
            }
            Err(err @ ForestError::GraphTooLarge { .. })
            | Err(err @ ForestError::FamilyTooLarge { .. }) => (None, Some(err.to_string())),
        };

    let spectral_report = spectral::spectrum(&l, opts.tolerance)?;
    let resolvent = spectral::eigenprojector_resolvent(&l, opts.tau)?;
    let perron = dynamics::perron(&l, opts.epsilon)?;

    let long_run = compute_long_run(&perron);

    let perron_summary = PerronSummary {
        epsilon: perron.epsilon(),
        stochastic: perron.is_stochastic(),
        positive_diagonal: perron.has_positive_diagonal(),
        primitive: perron.is_primitive(),
        unit_modulus_count: perron.unit_modulus_count(),
    };

    let mut checks = Vec::new();
    static_checks(
        &mut checks,
        g,
        &l,
        &decomposition,
        d,
        has_tree,
        forest.as_ref(),
        &spectral_report,
        &resolvent,
        long_run.as_ref(),
        &perron,
    )?;

    let mut routes: Vec<&DMatrix<f64>> = vec![&resolvent];
    if let Some(f) = &forest {
        routes.push(&f.matrix);
    }
    if let Some((_, m)) = &long_run {
        routes.push(m);
    }
    let mut max_route_discrepancy: f64 = 0.0;
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            max_route_discrepancy = max_route_discrepancy.max(max_abs_diff(routes[i], routes[j]));
        }
    }

    let naive = n as i64 - decomposition.scc_count as i64;

    Ok(AnalysisReport {
        n,
        arc_count: g.arc_count(),
        naive_prediction_matches: naive == spectral_report.numerical_rank as i64,
        naive_scc_rank_prediction: naive,
        decomposition,
        structural_dimension: d,
        has_spanning_converging_tree: has_tree,
        forest,
        forest_skip_reason,
        spectral: spectral_report,
        perron: perron_summary,
        resolvent_tau: opts.tau,
        resolvent,
        long_run,
        max_route_discrepancy,
        checks,
    })
}

fn compute_long_run(p: &PerronMatrix) -> Option<(LongRunMode, DMatrix<f64>)> {
    if !p.is_stochastic() {
        return None;
    }
    if p.has_positive_diagonal() {
        if let Ok(m) = dynamics::long_run_matrix(p, LongRunMode::Power, None, None) {
            return Some((LongRunMode::Power, m));
        }
    }
    dynamics::long_run_matrix(p, LongRunMode::Cesaro, None, None)
        .ok()
        .map(|m| (LongRunMode::Cesaro, m))
}

#[allow(clippy::too_many_arguments)]
fn static_checks(
    checks: &mut Vec<CheckResult>,
    g: &Digraph,
    l: &LaplacianMatrix,
    decomposition: &ComponentDecomposition,
    d: usize,
    has_tree: bool,
    forest: Option<&ForestSummary>,
    spectral_report: &SpectralReport,
    resolvent: &DMatrix<f64>,
    long_run: Option<&(LongRunMode, DMatrix<f64>)>,
    perron: &PerronMatrix,
) -> Result<(), AnalysisError> {
    let n = g.n();
    let scale = l.max_diagonal().max(1.0);

    let worst_row_sum = (0..n)
        .map(|i| l.matrix().row(i).sum().abs())
        .fold(0.0, f64::max);
    checks.push(CheckResult::measured(
        "laplacian_row_sums_zero",
        worst_row_sum,
        TOL_LAPLACIAN_ROW_SUM * scale,
    ));

    checks.push(CheckResult::boolean(
        "weak_components_le_d_le_strong_components",
        decomposition.wcc_count <= d && d <= decomposition.scc_count,
    ));

    checks.push(CheckResult::boolean(
        "spanning_converging_tree_iff_d_is_one",
        has_tree == (d == 1),
    ));

    if let Some(f) = forest {
        checks.push(CheckResult::measured(
            "enumerative_dimension_matches_sink_count",
            (f.dimension as f64 - d as f64).abs(),
            0.0,
        ));
    }

    checks.push(CheckResult::boolean(
        "rank_law_rank_equals_n_minus_d",
        spectral::check_rank_law(spectral_report, d),
    ));
    checks.push(CheckResult::boolean(
        "zero_eigenvalue_semisimple",
        spectral_report.zero_is_semisimple(),
    ));
    checks.push(CheckResult::boolean(
        "spectrum_localization",
        spectral::check_spectrum_localization(spectral_report, spectral_report.tolerance),
    ));

    // Projector algebra runs on the most accurate available route: the
    // exact forest matrix, else the long-run limit. The raw resolvent
    // carries an O(1/tau) bias that the 1e-10 algebra tolerances do not
    // absorb, so it is only used as a cross-route comparand.
    let algebra_target: Option<&DMatrix<f64>> = match (forest, long_run) {
        (Some(f), _) => Some(&f.matrix),
        (None, Some((_, m))) => Some(m),
        (None, None) => None,
    };
    if let Some(jbar) = algebra_target {
        let row_sum_err = (0..n)
            .map(|i| (jbar.row(i).sum() - 1.0).abs())
            .fold(0.0, f64::max);
        checks.push(CheckResult::measured(
            "projector_rows_sum_to_one",
            row_sum_err,
            TOL_NORMALIZATION,
        ));
        checks.push(CheckResult::measured(
            "projector_idempotent",
            max_abs_diff(&(jbar * jbar), jbar),
            TOL_IDEMPOTENT,
        ));
        let lj = (l.matrix() * jbar).abs().max();
        let jl = (jbar * l.matrix()).abs().max();
        checks.push(CheckResult::measured(
            "projector_annihilates_laplacian",
            lj.max(jl),
            TOL_COMMUTE,
        ));
        let jbar_rank = spectral::numerical_rank(jbar, PROJECTOR_RANK_TOL)?;
        checks.push(CheckResult::measured(
            "projector_rank_equals_d",
            (jbar_rank as f64 - d as f64).abs(),
            0.0,
        ));
    }

    if let Some(f) = forest {
        checks.push(CheckResult::measured(
            "forest_vs_resolvent",
            max_abs_diff(&f.matrix, resolvent),
            TOL_FOREST_VS_RESOLVENT,
        ));
        if let Some((mode, m)) = long_run {
            let tol = match mode {
                LongRunMode::Power => TOL_FOREST_VS_POWER,
                LongRunMode::Cesaro => TOL_FOREST_VS_CESARO,
            };
            checks.push(CheckResult::measured(
                "forest_vs_long_run",
                max_abs_diff(&f.matrix, m),
                tol,
            ));
        }
    }
    if let Some((mode, m)) = long_run {
        let tol = TOL_FOREST_VS_RESOLVENT
            + match mode {
                LongRunMode::Power => TOL_FOREST_VS_POWER,
                LongRunMode::Cesaro => TOL_FOREST_VS_CESARO,
            };
        checks.push(CheckResult::measured(
            "resolvent_vs_long_run",
            max_abs_diff(resolvent, m),
            tol,
        ));
    }

    if perron.is_stochastic() && perron.is_primitive() {
        if let Some((LongRunMode::Power, power)) = long_run {
            let lim = dynamics::primitive_limit(perron)?;
            checks.push(CheckResult::measured(
                "primitive_power_limit_is_rank_one",
                max_abs_diff(&lim.outer, power),
                TOL_PRIMITIVE_LIMIT,
            ));
            checks.push(CheckResult::measured(
                "primitive_limit_normalization",
                (lim.left.dot(&lim.right) - 1.0).abs(),
                TOL_NORMALIZATION,
            ));
        }
    }

    Ok(())
}

/// Trajectory battery: discrete and continuous convergence to the projected
/// initial state, conservation of left null functionals, and the monotone
/// contraction of the state envelope under a stochastic update.
pub fn dynamics_checks(
    g: &Digraph,
    x0: &DVector<f64>,
    opts: &AnalysisOptions,
) -> Result<Vec<CheckResult>, AnalysisError> {
    let l = laplacian(g);
    let decomposition = components::decompose(g);
    let d = components::forest_dimension_structural(&decomposition);
    let perron = dynamics::perron(&l, opts.epsilon)?;
    let spectral_report = spectral::spectrum(&l, opts.tolerance)?;
    let mut checks = Vec::new();

    // Horizon long enough for ~e^-40 geometric decay of the subdominant
    // modes, with a floor covering nilpotent transients.
    let subdominant = perron.subdominant_modulus();
    let steps = if subdominant <= 0.0 {
        2 * g.n()
    } else {
        ((40.0 / -subdominant.ln()).ceil() as usize).clamp(2 * g.n(), 200_000)
    };

    let discrete = dynamics::simulate_discrete(&perron, x0, steps)?;
    checks.push(CheckResult::measured(
        "discrete_trajectory_reaches_projected_limit",
        discrete.final_deviation(),
        TOL_TRAJECTORY,
    ));

    let t_end = spectral_report
        .min_positive_real_part
        .map(|re| 20.0 / re)
        .unwrap_or(1.0);
    let dt = if l.max_diagonal() > 0.0 {
        0.25 / l.max_diagonal()
    } else {
        t_end / 10.0
    };
    let continuous = dynamics::simulate_continuous(&l, x0, t_end, dt)?;
    checks.push(CheckResult::measured(
        "continuous_trajectory_reaches_projected_limit",
        continuous.final_deviation(),
        TOL_TRAJECTORY,
    ));

    // w^T x is conserved for every left null vector w of L; take the d
    // null directions of L^T from its SVD.
    let x_scale = x0.abs().max().max(1.0);
    let svd = l
        .matrix()
        .transpose()
        .try_svd(false, true, f64::EPSILON, 100_000)
        .ok_or(SpectralError::NonConvergence {
            decomposition: "SVD",
        })?;
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let mut conservation_err: f64 = 0.0;
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > spectral_report.tolerance {
            continue;
        }
        let w = v_t.row(i).transpose();
        let mut prev = w.dot(&discrete.states[0]);
        for state in &discrete.states[1..] {
            let cur = w.dot(state);
            conservation_err = conservation_err.max((cur - prev).abs());
            prev = cur;
        }
    }
    checks.push(CheckResult::measured(
        "left_null_functionals_conserved",
        conservation_err,
        TOL_CONSERVATION * x_scale,
    ));

    if perron.is_stochastic() {
        let mut monotone_err: f64 = 0.0;
        let mut prev_max = discrete.states[0].max();
        let mut prev_min = discrete.states[0].min();
        for state in &discrete.states[1..] {
            let (cur_max, cur_min) = (state.max(), state.min());
            monotone_err = monotone_err.max(cur_max - prev_max).max(prev_min - cur_min);
            prev_max = cur_max;
            prev_min = cur_min;
        }
        checks.push(CheckResult::measured(
            "stochastic_update_contracts_envelope",
            monotone_err.max(0.0),
            TOL_MONOTONE * x_scale,
        ));
    }

    if d == 1 {
        let spread = |state: &DVector<f64>| state.max() - state.min();
        let final_spread = spread(discrete.states.last().unwrap())
            .max(spread(continuous.states.last().unwrap()));
        checks.push(CheckResult::measured(
            "consensus_spread_vanishes_when_d_is_one",
            final_spread,
            TOL_TRAJECTORY,
        ));
    }

    Ok(checks)
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn matrix_json(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| Value::String(fmt(m[(i, j)]))).collect()))
            .collect(),
    )
}

impl AnalysisReport {
    /// JSON with every floating-point number rendered as its shortest
    /// round-tripping decimal string.
    pub fn to_json(&self) -> Value {
        let eigenvalues: Vec<Value> = self
            .spectral
            .eigenvalues
            .iter()
            .map(|ev| json!({ "re": fmt(ev.re), "im": fmt(ev.im) }))
            .collect();
        let forest = match &self.forest {
            Some(f) => json!({
                "within_enumeration_limit": true,
                "dimension": f.dimension,
                "max_arc_count": f.max_arc_count,
                "maximal_forest_count": f.forest_count,
                "total_weight": fmt(f.total_weight),
                "matrix": matrix_json(&f.matrix),
            }),
            None => json!({
                "within_enumeration_limit": false,
                "skip_reason": self.forest_skip_reason,
            }),
        };
        let long_run = match &self.long_run {
            Some((mode, m)) => json!({
                "available": true,
                "mode": match mode {
                    LongRunMode::Power => "power",
                    LongRunMode::Cesaro => "cesaro",
                },
                "matrix": matrix_json(m),
            }),
            None => json!({ "available": false }),
        };
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "pass": c.pass,
                    "discrepancy": fmt(c.discrepancy),
                    "threshold": fmt(c.threshold),
                })
            })
            .collect();
        json!({
            "graph": { "n": self.n, "arc_count": self.arc_count },
            "components": {
                "scc_count": self.decomposition.scc_count,
                "wcc_count": self.decomposition.wcc_count,
                "sink_count": self.decomposition.sink_count,
                "forest_dimension": self.structural_dimension,
                "has_spanning_converging_tree": self.has_spanning_converging_tree,
            },
            "forest": forest,
            "spectral": {
                "tolerance": fmt(self.spectral.tolerance),
                "eigenvalues": eigenvalues,
                "numerical_rank": self.spectral.numerical_rank,
                "zero_multiplicity": self.spectral.zero_multiplicity,
                "min_positive_real_part": self.spectral.min_positive_real_part.map(fmt),
                "rank_prediction_n_minus_d": self.n - self.structural_dimension,
                "naive_rank_prediction_n_minus_scc": self.naive_scc_rank_prediction,
                "naive_prediction_matches_rank": self.naive_prediction_matches,
            },
            "perron": {
                "epsilon": fmt(self.perron.epsilon),
                "stochastic": self.perron.stochastic,
                "positive_diagonal": self.perron.positive_diagonal,
                "primitive": self.perron.primitive,
                "unit_modulus_count": self.perron.unit_modulus_count,
            },
            "projector": {
                "resolvent_tau": fmt(self.resolvent_tau),
                "resolvent": matrix_json(&self.resolvent),
                "long_run": long_run,
                "max_route_discrepancy": fmt(self.max_route_discrepancy),
            },
            "checks": checks,
            "all_checks_pass": self.all_pass(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph: n = {}, arcs = {}", self.n, self.arc_count);
        let _ = writeln!(
            out,
            "components: strong = {}, weak = {}, sinks = {}",
            self.decomposition.scc_count, self.decomposition.wcc_count, self.decomposition.sink_count
        );
        let _ = writeln!(
            out,
            "in-forest dimension d = {} (structural); spanning converging tree: {}",
            self.structural_dimension,
            if self.has_spanning_converging_tree { "yes" } else { "no" }
        );
        match &self.forest {
            Some(f) => {
                let _ = writeln!(
                    out,
                    "forests: d = {} by enumeration, {} maximal in-forest(s) of {} arc(s), total weight {}",
                    f.dimension, f.forest_count, f.max_arc_count, f.total_weight
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "forests: skipped ({})",
                    self.forest_skip_reason.as_deref().unwrap_or("unavailable")
                );
            }
        }
        let _ = writeln!(
            out,
            "rank(L) = {} (numerical), n - d = {} (law), zero multiplicity = {}",
            self.spectral.numerical_rank,
            self.n - self.structural_dimension,
            self.spectral.zero_multiplicity
        );
        let verdict = if self.naive_prediction_matches {
            "matches here (every strong component is a sink)"
        } else {
            "INCORRECT for this graph; the correct law is rank = n - d"
        };
        let _ = writeln!(
            out,
            "naive prediction n - c = {}: {}",
            self.naive_scc_rank_prediction, verdict
        );
        let eigen_list = self
            .spectral
            .eigenvalues
            .iter()
            .map(|ev| {
                if ev.im == 0.0 {
                    format!("{}", ev.re)
                } else {
                    format!("{}{}{}i", ev.re, if ev.im < 0.0 { "-" } else { "+" }, ev.im.abs())
                }
            })
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(out, "eigenvalues: [{eigen_list}]");
        let localization = self
            .checks
            .iter()
            .find(|c| c.name == "spectrum_localization")
            .map(|c| c.pass)
            .unwrap_or(false);
        let _ = writeln!(
            out,
            "localization (nontrivial eigenvalues in the open right half-plane): {}",
            if localization { "pass" } else { "FAIL" }
        );
        let _ = writeln!(
            out,
            "perron: epsilon = {}, stochastic = {}, positive diagonal = {}, primitive = {}",
            self.perron.epsilon,
            self.perron.stochastic,
            self.perron.positive_diagonal,
            self.perron.primitive
        );
        let routes = 1 + self.forest.is_some() as usize + self.long_run.is_some() as usize;
        let _ = writeln!(
            out,
            "projector routes available: {} (max pairwise discrepancy {:.3e})",
            routes, self.max_route_discrepancy
        );
        let _ = writeln!(out, "checks:");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  [{}] {} (discrepancy {:.3e}, threshold {:.3e})",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.discrepancy,
                c.threshold
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.all_pass() { "all checks pass" } else { "CHECK FAILURE" }
        );
        out
    }
}
