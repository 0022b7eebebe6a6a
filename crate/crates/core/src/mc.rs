//! Greedy Monte Carlo parameter search and the paired-instance ensemble
//! harness.
//!
//! Each step perturbs one randomly chosen parameter by a uniform draw from
//! `[-delta_max, delta_max]` and keeps the move only if the objective
//! strictly improves. For protocol C, constraint strengths are eligible only
//! every `c_update_period`-th step (and on those steps only strengths are
//! proposed); they are clamped at zero. Runs are pure functions of their
//! seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lhz::{build_layout, AncillaMode, LhzLayout};
use crate::problem::{generate_instance, LogicalProblem};
use crate::protocol::{prepare_state, Evaluator, ParamSet, ProtocolKind, ProtocolSpec};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    MinimizeE,
    MaximizeF,
}

impl Objective {
    pub fn label(self) -> &'static str {
        match self {
            Objective::MinimizeE => "minimize_e",
            Objective::MaximizeF => "maximize_f",
        }
    }

    fn improves(self, new: f64, old: f64) -> bool {
        match self {
            Objective::MinimizeE => new < old,
            Objective::MaximizeF => new > old,
        }
    }

    fn pick(self, e: f64, f: f64) -> f64 {
        match self {
            Objective::MinimizeE => e,
            Objective::MaximizeF => f,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    /// Proposal budget M.
    pub steps: usize,
    /// Perturbation half-width.
    pub delta_max: f64,
    pub objective: Objective,
    /// Constraint-strength updates are attempted every this many steps.
    pub c_update_period: usize,
    pub seed: u64,
    pub angles_init: f64,
    pub c_init: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            steps: 4000,
            delta_max: 1.0,
            objective: Objective::MinimizeE,
            c_update_period: 10,
            seed: 0,
            angles_init: 1.0,
            c_init: 2.0,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        // NaN must fail validation too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.delta_max > 0.0) {
            return Err(Error::invalid("delta_max must be > 0"));
        }
        if self.c_update_period == 0 {
            return Err(Error::invalid("c_update_period must be >= 1"));
        }
        Ok(())
    }
}

/// History of one greedy optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// Objective value after each proposal (length = steps); monotone.
    pub accepted_objective: Vec<f64>,
    pub best_params: ParamSet,
    pub final_e: f64,
    pub final_f: f64,
    pub accept_count: usize,
}

// Parameter slots addressed by the proposal draw.
#[derive(Clone, Copy)]
enum Slot {
    Gamma(usize),
    Beta(usize),
    Omega(usize),
    Strength(usize),
}

fn angle_slots(params: &ParamSet) -> Vec<Slot> {
    let mut slots = Vec::new();
    slots.extend((0..params.gammas.len()).map(Slot::Gamma));
    slots.extend((0..params.betas.len()).map(Slot::Beta));
    slots.extend((0..params.omegas.len()).map(Slot::Omega));
    slots
}

/// Greedy Monte Carlo descent over the protocol parameters.
pub fn mc_optimize(
    problem: &LogicalProblem,
    layout: &LhzLayout,
    spec: &ProtocolSpec,
    config: &McConfig,
) -> Result<RunTrace> {
    config.validate()?;
    let evaluator = Evaluator::new(problem, layout, spec)?;
    let mut params = ParamSet::initial(spec, layout, config.angles_init, config.c_init);
    params.validate(spec, layout)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let angle_slots = angle_slots(&params);

    let state = prepare_state(problem, layout, spec, &params)?;
    let (mut e, mut f) = evaluator.evaluate(&state)?;
    let mut current = config.objective.pick(e, f);

    let mut trace = RunTrace {
        accepted_objective: Vec::with_capacity(config.steps),
        best_params: params.clone(),
        final_e: e,
        final_f: f,
        accept_count: 0,
    };

    for step in 1..=config.steps {
        let strength_step = spec.kind == ProtocolKind::C
            && !params.c_l.is_empty()
            && step % config.c_update_period == 0;
        let slot = if strength_step {
            Slot::Strength(rng.random_range(0..params.c_l.len()))
        } else {
            angle_slots[rng.random_range(0..angle_slots.len())]
        };
        let delta = rng.random_range(-config.delta_max..=config.delta_max);
        let old = match slot {
            Slot::Gamma(i) => {
                let v = params.gammas[i];
                params.gammas[i] += delta;
                v
            }
            Slot::Beta(i) => {
                let v = params.betas[i];
                params.betas[i] += delta;
                v
            }
            Slot::Omega(i) => {
                let v = params.omegas[i];
                params.omegas[i] += delta;
                v
            }
            Slot::Strength(i) => {
                let v = params.c_l[i];
                params.c_l[i] = (v + delta).max(0.0);
                v
            }
        };

        let state = prepare_state(problem, layout, spec, &params)?;
        let (new_e, new_f) = evaluator.evaluate(&state)?;
        let proposed = config.objective.pick(new_e, new_f);
        if config.objective.improves(proposed, current) {
            current = proposed;
            e = new_e;
            f = new_f;
            trace.accept_count += 1;
        } else {
            match slot {
                Slot::Gamma(i) => params.gammas[i] = old,
                Slot::Beta(i) => params.betas[i] = old,
                Slot::Omega(i) => params.omegas[i] = old,
                Slot::Strength(i) => params.c_l[i] = old,
            }
        }
        trace.accepted_objective.push(current);
    }

    trace.best_params = params;
    trace.final_e = e;
    trace.final_f = f;
    Ok(trace)
}

/// Ensemble experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub n_logical: usize,
    pub m_values: Vec<usize>,
    pub protocols: Vec<ProtocolKind>,
    /// Instance count L.
    pub n_instances: usize,
    pub mc: McConfig,
    pub ancilla_mode: AncillaMode,
    pub block_mode: crate::protocol::ConstraintBlockMode,
    pub fidelity_mode: crate::protocol::FidelityMode,
    pub c_ref: f64,
    /// Seed base for instance generation; instance l uses seed base + l.
    pub instance_seed: u64,
    pub histogram_bins: usize,
}

impl EnsembleConfig {
    pub fn new(n_logical: usize) -> Self {
        Self {
            n_logical,
            m_values: vec![1, 2, 3],
            protocols: vec![ProtocolKind::A, ProtocolKind::B, ProtocolKind::C],
            n_instances: 2000,
            mc: McConfig::default(),
            ancilla_mode: AncillaMode::Augmented,
            block_mode: Default::default(),
            fidelity_mode: Default::default(),
            c_ref: 2.0,
            instance_seed: 1,
            histogram_bins: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n_logical < 2 {
            problems.push("n_logical must be >= 2".to_string());
        }
        if self.n_instances == 0 {
            problems.push("n_instances must be >= 1".to_string());
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            problems.push("m_values must be nonempty positive integers".to_string());
        }
        if self.protocols.is_empty() {
            problems.push("protocols must be nonempty".to_string());
        }
        // NaN must fail validation too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.c_ref > 0.0) {
            problems.push("c_ref must be > 0".to_string());
        }
        if self.histogram_bins == 0 {
            problems.push("histogram_bins must be >= 1".to_string());
        }
        if let Err(e) = self.mc.validate() {
            problems.push(e.to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(problems.join("; ")))
        }
    }

    fn spec(&self, kind: ProtocolKind, m: usize) -> Result<ProtocolSpec> {
        let mut spec = ProtocolSpec::new(kind, m, self.c_ref)?;
        spec.block_mode = self.block_mode;
        spec.fidelity_mode = self.fidelity_mode;
        Ok(spec)
    }
}

/// One (instance, protocol, m) cell of the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub instance: usize,
    pub protocol: ProtocolKind,
    pub m: usize,
    pub final_e: f64,
    pub final_f: f64,
    pub accepts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub protocol: ProtocolKind,
    pub m: usize,
    pub mean_f: f64,
    pub stderr_f: f64,
    pub mean_e: f64,
    pub stderr_e: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub protocol: ProtocolKind,
    pub m: usize,
    /// Normalized bin masses over [0, 1]; sums to 1.
    pub masses: Vec<f64>,
}

/// Provenance recorded in every report output.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub instance_seed: u64,
    pub mc_seed: u64,
    pub steps: usize,
    pub n_instances: usize,
    pub delta_max: f64,
    pub objective: Objective,
    pub rng: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub cells: Vec<CellResult>,
    pub summary: Vec<SummaryRow>,
    pub histograms: Vec<Histogram>,
    pub provenance: Provenance,
}

impl EnsembleReport {
    /// Final fidelities of one (protocol, m) column, instance order.
    pub fn fidelity_column(&self, protocol: ProtocolKind, m: usize) -> Vec<f64> {
        let mut rows: Vec<&CellResult> = self
            .cells
            .iter()
            .filter(|c| c.protocol == protocol && c.m == m)
            .collect();
        rows.sort_by_key(|c| c.instance);
        rows.iter().map(|c| c.final_f).collect()
    }

    pub fn summary_for(&self, protocol: ProtocolKind, m: usize) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.protocol == protocol && r.m == m)
    }
}

// splitmix64; per-cell seeds depend only on indices, never on scheduling.
fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    let mut x = base;
    for &p in parts {
        x = x.wrapping_add(0x9e3779b97f4a7c15).wrapping_add(p);
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        x ^= x >> 31;
    }
    x
}

fn protocol_index(kind: ProtocolKind) -> u64 {
    match kind {
        ProtocolKind::A => 0,
        ProtocolKind::B => 1,
        ProtocolKind::C => 2,
    }
}

/// Histogram of fidelities over fixed bins on [0, 1], masses summing to 1.
pub fn fidelity_histogram(values: &[f64], bins: usize) -> Vec<f64> {
    let mut masses = vec![0.0; bins];
    if values.is_empty() {
        return masses;
    }
    let w = 1.0 / values.len() as f64;
    for &v in values {
        let idx = ((v * bins as f64) as usize).min(bins - 1);
        masses[idx] += w;
    }
    masses
}

/// Run every (protocol, m) combination on the same L instances.
///
/// Instance l uses problem seed `instance_seed + l`; the MC seed of each
/// cell is derived from `(mc.seed, l, protocol, m)`, so competing protocols
/// see identical instances and the whole report is reproducible.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleReport> {
    config.validate()?;
    let layout = build_layout(config.n_logical, config.ancilla_mode)?;

    let cells: Vec<CellResult> = (0..config.n_instances)
        .into_par_iter()
        .map(|l| -> Result<Vec<CellResult>> {
            let problem = generate_instance(
                config.n_logical,
                config.instance_seed.wrapping_add(l as u64),
            )?;
            let mut out = Vec::new();
            for &kind in &config.protocols {
                for &m in &config.m_values {
                    let spec = config.spec(kind, m)?;
                    let mut mc = config.mc.clone();
                    mc.seed = mix_seed(config.mc.seed, &[l as u64, protocol_index(kind), m as u64]);
                    let trace = mc_optimize(&problem, &layout, &spec, &mc)?;
                    out.push(CellResult {
                        instance: l,
                        protocol: kind,
                        m,
                        final_e: trace.final_e,
                        final_f: trace.final_f,
                        accepts: trace.accept_count,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut summary = Vec::new();
    let mut histograms = Vec::new();
    for &kind in &config.protocols {
        for &m in &config.m_values {
            let fs: Vec<f64> = cells
                .iter()
                .filter(|c| c.protocol == kind && c.m == m)
                .map(|c| c.final_f)
                .collect();
            let es: Vec<f64> = cells
                .iter()
                .filter(|c| c.protocol == kind && c.m == m)
                .map(|c| c.final_e)
                .collect();
            summary.push(SummaryRow {
                protocol: kind,
                m,
                mean_f: stats::mean(&fs),
                stderr_f: stats::std_err(&fs),
                mean_e: stats::mean(&es),
                stderr_e: stats::std_err(&es),
            });
            histograms.push(Histogram {
                protocol: kind,
                m,
                masses: fidelity_histogram(&fs, config.histogram_bins),
            });
        }
    }

    Ok(EnsembleReport {
        cells,
        summary,
        histograms,
        provenance: Provenance {
            instance_seed: config.instance_seed,
            mc_seed: config.mc.seed,
            steps: config.mc.steps,
            n_instances: config.n_instances,
            delta_max: config.mc.delta_max,
            objective: config.mc.objective,
            rng: crate::problem::RNG_ID,
            version: env!("CARGO_PKG_VERSION"),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_setup() -> (LogicalProblem, LhzLayout, ProtocolSpec) {
        let problem = generate_instance(4, 12).unwrap();
        let layout = build_layout(4, AncillaMode::Augmented).unwrap();
        let spec = ProtocolSpec::new(ProtocolKind::B, 1, 2.0).unwrap();
        (problem, layout, spec)
    }

    #[test]
    fn zero_steps_returns_initial_point() {
        let (problem, layout, spec) = small_setup();
        let config = McConfig {
            steps: 0,
            ..Default::default()
        };
        let trace = mc_optimize(&problem, &layout, &spec, &config).unwrap();
        assert!(trace.accepted_objective.is_empty());
        assert_eq!(trace.accept_count, 0);
        assert_eq!(
            trace.best_params,
            ParamSet::initial(&spec, &layout, 1.0, 2.0)
        );
        let state = prepare_state(&problem, &layout, &spec, &trace.best_params).unwrap();
        let ev = Evaluator::new(&problem, &layout, &spec).unwrap();
        let (e, _) = ev.evaluate(&state).unwrap();
        assert_eq!(trace.final_e, e);
    }

    #[test]
    fn traces_are_monotone() {
        let (problem, layout, spec) = small_setup();
        for objective in [Objective::MinimizeE, Objective::MaximizeF] {
            let config = McConfig {
                steps: 150,
                objective,
                seed: 5,
                ..Default::default()
            };
            let trace = mc_optimize(&problem, &layout, &spec, &config).unwrap();
            assert_eq!(trace.accepted_objective.len(), 150);
            for w in trace.accepted_objective.windows(2) {
                match objective {
                    Objective::MinimizeE => assert!(w[1] <= w[0]),
                    Objective::MaximizeF => assert!(w[1] >= w[0]),
                }
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let (problem, layout, spec) = small_setup();
        let config = McConfig {
            steps: 60,
            seed: 9,
            ..Default::default()
        };
        let a = mc_optimize(&problem, &layout, &spec, &config).unwrap();
        let b = mc_optimize(&problem, &layout, &spec, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn greedy_descent_improves_energy() {
        // Kind A, m=1: the initial point is essentially never stationary.
        let layout = build_layout(4, AncillaMode::Augmented).unwrap();
        let spec = ProtocolSpec::new(ProtocolKind::A, 1, 2.0).unwrap();
        let mut improved = 0;
        let total = 100;
        for seed in 0..total {
            let problem = generate_instance(4, 1000 + seed).unwrap();
            let config = McConfig {
                steps: 500,
                seed,
                ..Default::default()
            };
            let ev = Evaluator::new(&problem, &layout, &spec).unwrap();
            let init = ParamSet::initial(&spec, &layout, 1.0, 2.0);
            let state = prepare_state(&problem, &layout, &spec, &init).unwrap();
            let (e0, _) = ev.evaluate(&state).unwrap();
            let trace = mc_optimize(&problem, &layout, &spec, &config).unwrap();
            if trace.final_e < e0 {
                improved += 1;
            }
        }
        assert!(improved >= 95, "only {improved}/{total} runs improved");
    }

    #[test]
    fn strength_updates_only_on_period_steps() {
        let problem = generate_instance(4, 3).unwrap();
        let layout = build_layout(4, AncillaMode::Augmented).unwrap();
        let spec = ProtocolSpec::new(ProtocolKind::C, 1, 2.0).unwrap();
        // With period > steps the strengths can never move.
        let config = McConfig {
            steps: 40,
            c_update_period: 1000,
            seed: 2,
            ..Default::default()
        };
        let trace = mc_optimize(&problem, &layout, &spec, &config).unwrap();
        assert_eq!(trace.best_params.c_l, vec![2.0; layout.n_constraints()]);
    }

    #[test]
    fn single_instance_ensemble_means_equal_finals() {
        let mut config = EnsembleConfig::new(4);
        config.n_instances = 1;
        config.m_values = vec![1];
        config.protocols = vec![ProtocolKind::A, ProtocolKind::B];
        config.mc.steps = 30;
        let report = run_ensemble(&config).unwrap();
        assert_eq!(report.cells.len(), 2);
        for row in &report.summary {
            let cell = report
                .cells
                .iter()
                .find(|c| c.protocol == row.protocol && c.m == row.m)
                .unwrap();
            assert_eq!(row.mean_f, cell.final_f);
            assert_eq!(row.mean_e, cell.final_e);
        }
        let masses: f64 = report.histograms[0].masses.iter().sum();
        assert!((masses - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ensemble_is_reproducible() {
        let mut config = EnsembleConfig::new(4);
        config.n_instances = 4;
        config.m_values = vec![1];
        config.mc.steps = 25;
        let a = run_ensemble(&config).unwrap();
        let b = run_ensemble(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation_lists_all_problems() {
        let mut config = EnsembleConfig::new(1);
        config.n_instances = 0;
        config.c_ref = 0.0;
        let err = run_ensemble(&config).unwrap_err().to_string();
        assert!(err.contains("n_logical"));
        assert!(err.contains("n_instances"));
        assert!(err.contains("c_ref"));
    }

    #[test]
    fn histogram_edges() {
        let masses = fidelity_histogram(&[0.0, 0.999, 1.0, 0.05], 10);
        assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(masses[0], 0.5);
        assert_eq!(masses[9], 0.5);
    }
}
