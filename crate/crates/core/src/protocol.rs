//! The three quench protocols and their (E, F) evaluation.
//!
//! Each cycle applies a diagonal step followed by the mixer
//! `U_x(beta) = prod_i exp(-i beta X_i)` over the labeled qubits:
//!
//! * kind A: one phase `exp(-i gamma_k H)` with the full evaluation
//!   Hamiltonian `H = sum J_i Z_i - C_ref sum_l Z..Z` (field rotations plus
//!   constraint phases tied to gamma),
//! * kind B: `U_z(gamma_k)` then `U_c(Omega_k)` at uniform strength `C_ref`,
//! * kind C: as B but with per-plaquette variational strengths `c_l`.
//!
//! Constraint phases run either as the decomposed CNOT schedule or as direct
//! multi-Z phases; both realize the same unitary. Energies are always
//! measured against the fixed `C_ref` reference Hamiltonian, never against
//! the variational `c_l`.

use std::fmt::Write as _;

use crate::circuit::{build_constraint_block, Gate};
use crate::error::{Error, Result};
use crate::lhz::{encode, local_fields, LhzLayout};
use crate::problem::{brute_force_ground, LogicalProblem};
use crate::statevector::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    /// Quench with the full problem Hamiltonian (angles gamma, beta).
    A,
    /// Split local fields and constraints (angles gamma, Omega, beta).
    B,
    /// As B, with the constraint strengths c_l as extra variational
    /// parameters.
    C,
}

impl ProtocolKind {
    pub fn label(self) -> &'static str {
        match self {
            ProtocolKind::A => "a",
            ProtocolKind::B => "b",
            ProtocolKind::C => "c",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "a" => Some(ProtocolKind::A),
            "b" => Some(ProtocolKind::B),
            "c" => Some(ProtocolKind::C),
            _ => None,
        }
    }

    pub fn uses_omega(self) -> bool {
        !matches!(self, ProtocolKind::A)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstraintBlockMode {
    /// Direct multi-Z phases, one per plaquette.
    #[default]
    DirectDiagonal,
    /// Decomposed CNOT + Rz parallel schedule.
    Decomposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FidelityMode {
    /// Summed probability over the encoded ground set.
    #[default]
    Probability,
    /// Overlap magnitude (square root of the summed probability).
    Amplitude,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    /// Iteration cycles m.
    pub cycles: usize,
    pub block_mode: ConstraintBlockMode,
    pub fidelity_mode: FidelityMode,
    /// Reference constraint strength used for evaluation and for the fixed
    /// strengths of kinds A and B.
    pub c_ref: f64,
    /// Prepend one extra diagonal step before the first cycle (sensitivity
    /// studies); gammas and omegas then carry m+1 entries.
    pub leading_diagonal: bool,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind, cycles: usize, c_ref: f64) -> Result<Self> {
        let spec = Self {
            kind,
            cycles,
            block_mode: ConstraintBlockMode::default(),
            fidelity_mode: FidelityMode::default(),
            c_ref,
            leading_diagonal: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycles == 0 {
            return Err(Error::invalid("cycle count m must be >= 1"));
        }
        // A NaN reference strength must fail validation too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.c_ref > 0.0) {
            return Err(Error::invalid("C_ref must be > 0"));
        }
        Ok(())
    }

    /// Number of diagonal steps (cycles plus the optional leading one).
    fn n_diagonal(&self) -> usize {
        self.cycles + usize::from(self.leading_diagonal)
    }
}

/// Variational parameters of a protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Constraint angles, kinds B and C only.
    pub omegas: Vec<f64>,
    /// Per-plaquette constraint strengths, kind C only; nonnegative.
    pub c_l: Vec<f64>,
}

impl ParamSet {
    /// All angles at `angles_init`, all strengths at `c_init`, shaped for
    /// `(spec, layout)`.
    pub fn initial(spec: &ProtocolSpec, layout: &LhzLayout, angles_init: f64, c_init: f64) -> Self {
        let nd = spec.n_diagonal();
        Self {
            gammas: vec![angles_init; nd],
            betas: vec![angles_init; spec.cycles],
            omegas: if spec.kind.uses_omega() {
                vec![angles_init; nd]
            } else {
                Vec::new()
            },
            c_l: if spec.kind == ProtocolKind::C {
                vec![c_init; layout.n_constraints()]
            } else {
                Vec::new()
            },
        }
    }

    pub fn zeros(spec: &ProtocolSpec, layout: &LhzLayout) -> Self {
        Self::initial(spec, layout, 0.0, 0.0)
    }

    pub fn validate(&self, spec: &ProtocolSpec, layout: &LhzLayout) -> Result<()> {
        let nd = spec.n_diagonal();
        if self.gammas.len() != nd {
            return Err(Error::invalid(format!(
                "expected {nd} gammas, got {}",
                self.gammas.len()
            )));
        }
        if self.betas.len() != spec.cycles {
            return Err(Error::invalid(format!(
                "expected {} betas, got {}",
                spec.cycles,
                self.betas.len()
            )));
        }
        let expect_omegas = if spec.kind.uses_omega() { nd } else { 0 };
        if self.omegas.len() != expect_omegas {
            return Err(Error::invalid(format!(
                "expected {expect_omegas} omegas for protocol {}, got {}",
                spec.kind.label(),
                self.omegas.len()
            )));
        }
        let expect_c = if spec.kind == ProtocolKind::C {
            layout.n_constraints()
        } else {
            0
        };
        if self.c_l.len() != expect_c {
            return Err(Error::invalid(format!(
                "expected {expect_c} constraint strengths, got {}",
                self.c_l.len()
            )));
        }
        if self.c_l.iter().any(|&c| c < 0.0) {
            return Err(Error::invalid("constraint strengths must be >= 0"));
        }
        Ok(())
    }

    /// Structured-text block: named arrays, one per line.
    pub fn to_text(&self) -> String {
        let fmt = |v: &[f64]| {
            let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("[{}]", items.join(","))
        };
        let mut out = String::new();
        writeln!(out, "gamma={}", fmt(&self.gammas)).unwrap();
        writeln!(out, "beta={}", fmt(&self.betas)).unwrap();
        writeln!(out, "omega={}", fmt(&self.omegas)).unwrap();
        writeln!(out, "c={}", fmt(&self.c_l)).unwrap();
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut gammas = None;
        let mut betas = None;
        let mut omegas = None;
        let mut c_l = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, "expected `name=[..]`"))?;
            let inner = value
                .trim()
                .strip_prefix('[')
                .and_then(|v| v.strip_suffix(']'))
                .ok_or_else(|| Error::parse(line_no, "expected a bracketed array"))?;
            let vals: Vec<f64> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse()
                            .map_err(|_| Error::parse(line_no, format!("bad number `{x}`")))
                    })
                    .collect::<Result<_>>()?
            };
            match key.trim() {
                "gamma" => gammas = Some(vals),
                "beta" => betas = Some(vals),
                "omega" => omegas = Some(vals),
                "c" => c_l = Some(vals),
                other => return Err(Error::parse(line_no, format!("unknown array `{other}`"))),
            }
        }
        match (gammas, betas) {
            (Some(gammas), Some(betas)) => Ok(Self {
                gammas,
                betas,
                omegas: omegas.unwrap_or_default(),
                c_l: c_l.unwrap_or_default(),
            }),
            _ => Err(Error::parse(1, "missing gamma or beta array")),
        }
    }
}

/// The quench start state |s>: equal superposition over the K labeled
/// qubits, ancillas fixed to |0>. Ancillas are never driven by the mixer,
/// so their bits are conserved throughout every protocol.
pub fn initial_state(layout: &LhzLayout) -> Result<StateVector> {
    let k = layout.n_labeled();
    let total = layout.n_qubits();
    let uniform = StateVector::uniform(k)?;
    if total == k {
        return Ok(uniform);
    }
    // Labeled qubits occupy the low-order bits, ancillas the high ones.
    let mut amps = vec![num_complex::Complex64::ZERO; 1 << total];
    amps[..1 << k].copy_from_slice(uniform.amplitudes());
    StateVector::from_amplitudes(amps, total)
}

/// Apply one constraint-phase block with the given per-plaquette angles.
fn apply_constraint_phases(
    state: &mut StateVector,
    layout: &LhzLayout,
    alphas: &[f64],
    mode: ConstraintBlockMode,
) -> Result<()> {
    match mode {
        ConstraintBlockMode::DirectDiagonal => {
            for (p, &alpha) in layout.constraints().iter().zip(alphas) {
                state.apply_gate(&Gate::ZProdPhase {
                    qubits: p.members(),
                    alpha,
                })?;
            }
            Ok(())
        }
        ConstraintBlockMode::Decomposed => {
            let block = build_constraint_block(layout, alphas)?;
            state.apply_circuit(&block)
        }
    }
}

/// Run the protocol quench from the uniform superposition.
pub fn prepare_state(
    problem: &LogicalProblem,
    layout: &LhzLayout,
    spec: &ProtocolSpec,
    params: &ParamSet,
) -> Result<StateVector> {
    spec.validate()?;
    params.validate(spec, layout)?;
    let fields = local_fields(problem, layout)?;
    let mut state = initial_state(layout)?;

    let mut alphas = vec![0.0; layout.n_constraints()];
    let mut diagonal_step = |state: &mut StateVector, step: usize| -> Result<()> {
        let gamma = params.gammas[step];
        for (q, &j) in fields.iter().enumerate() {
            if j != 0.0 {
                state.apply_gate(&Gate::Rz {
                    qubit: q,
                    phi: 2.0 * gamma * j,
                })?;
            }
        }
        // Constraint phase angle per plaquette. The minus sign matches the
        // evaluation convention where positive strengths reward even parity:
        // kind A applies exactly exp(-i gamma H) with H the evaluation
        // Hamiltonian at C_ref.
        match spec.kind {
            ProtocolKind::A => alphas.fill(-gamma * spec.c_ref),
            ProtocolKind::B => alphas.fill(-params.omegas[step] * spec.c_ref),
            ProtocolKind::C => {
                let omega = params.omegas[step];
                for (a, &c) in alphas.iter_mut().zip(&params.c_l) {
                    *a = -omega * c;
                }
            }
        }
        apply_constraint_phases(state, layout, &alphas, spec.block_mode)
    };

    let lead = usize::from(spec.leading_diagonal);
    if spec.leading_diagonal {
        diagonal_step(&mut state, 0)?;
    }
    for k in 0..spec.cycles {
        diagonal_step(&mut state, lead + k)?;
        for q in 0..layout.n_qubits() {
            if !layout.is_ancilla(q) {
                state.apply_gate(&Gate::Rx {
                    qubit: q,
                    theta: 2.0 * params.betas[k],
                })?;
            }
        }
    }
    Ok(state)
}

/// Precomputed evaluation context for repeated (E, F) measurements.
#[derive(Debug, Clone)]
pub struct Evaluator {
    fields: Vec<f64>,
    constraint_masks: Vec<usize>,
    c_ref: f64,
    fidelity_mode: FidelityMode,
    /// Basis indices of the encoded logical ground configurations.
    targets: Vec<usize>,
    ground_energy: f64,
}

impl Evaluator {
    pub fn new(problem: &LogicalProblem, layout: &LhzLayout, spec: &ProtocolSpec) -> Result<Self> {
        spec.validate()?;
        let fields = local_fields(problem, layout)?;
        let constraint_masks = layout
            .constraints()
            .iter()
            .map(|p| p.members().iter().fold(0usize, |m, &q| m | (1 << q)))
            .collect();
        let (ground_energy, configs) = brute_force_ground(problem)?;
        let mut targets: Vec<usize> = configs
            .iter()
            .map(|c| Ok(encode(c, layout)?.basis_index()))
            .collect::<Result<_>>()?;
        targets.sort_unstable();
        targets.dedup();
        Ok(Self {
            fields,
            constraint_masks,
            c_ref: spec.c_ref,
            fidelity_mode: spec.fidelity_mode,
            targets,
            ground_energy,
        })
    }

    /// Encoded ground-state basis indices (the fidelity target set).
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// `(E, F)`: energy against the C_ref reference Hamiltonian, fidelity
    /// against the encoded ground set.
    pub fn evaluate(&self, state: &StateVector) -> Result<(f64, f64)> {
        let mut e = 0.0;
        for (q, &j) in self.fields.iter().enumerate() {
            if j != 0.0 {
                e += j * state.z_expectation(q)?;
            }
        }
        for &mask in &self.constraint_masks {
            e -= self.c_ref * state.zprod_expectation(mask)?;
        }
        let p = state.overlap_probability(&self.targets)?;
        let f = match self.fidelity_mode {
            FidelityMode::Probability => p,
            FidelityMode::Amplitude => p.sqrt(),
        };
        Ok((e, f))
    }
}

/// One-shot evaluation; see [`Evaluator`] for the reusable form.
pub fn evaluate(
    state: &StateVector,
    problem: &LogicalProblem,
    layout: &LhzLayout,
    spec: &ProtocolSpec,
) -> Result<(f64, f64)> {
    Evaluator::new(problem, layout, spec)?.evaluate(state)
}
