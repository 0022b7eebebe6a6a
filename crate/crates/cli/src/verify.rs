//! Schedule verification: structural checks plus unitary equivalence against
//! directly applied plaquette phases.
//!
//! The per-plaquette angles are reconstructed from the RZ gates in the file
//! (each plaquette's rotation sits on the end qubit of its CNOT path, with
//! φ = 2α), so a tampered schedule fails either the structural scan or the
//! state comparison.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use parity_qaoa::circuit::{Circuit, Gate};
use parity_qaoa::lhz::{build_layout, AncillaMode, LhzLayout};
use parity_qaoa::statevector::StateVector;

/// Largest logical size for which the state-level equivalence check runs.
const MAX_SIMULATED_N: usize = 6;
const TOLERANCE: f64 = 1e-9;

/// Check a constraint-schedule circuit for `n_logical` spins. Returns a
/// human-readable summary, or a failure description.
pub fn verify_schedule(circuit: &Circuit, n_logical: usize) -> Result<String, String> {
    let layout = build_layout(n_logical, AncillaMode::Augmented)
        .map_err(|e| format!("cannot build layout: {e}"))?;
    if circuit.qubit_count != layout.n_qubits() {
        return Err(format!(
            "qubit count mismatch: circuit has {}, the N={n_logical} layout has {}",
            circuit.qubit_count,
            layout.n_qubits()
        ));
    }
    for (i, layer) in circuit.layers.iter().enumerate() {
        if !layer.is_disjoint() {
            return Err(format!("layer {i} has gates with overlapping support"));
        }
    }
    let alphas = reconstruct_alphas(circuit, &layout)?;

    if n_logical > MAX_SIMULATED_N {
        return Ok(format!(
            "{} layers, disjoint; equivalence check skipped for N > {MAX_SIMULATED_N}",
            circuit.depth()
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let state = random_state(layout.n_qubits(), &mut rng);
        let mut evolved = state.clone();
        evolved
            .apply_circuit(circuit)
            .map_err(|e| format!("cannot apply circuit: {e}"))?;
        let mut direct = state;
        for (p, &alpha) in layout.constraints().iter().zip(&alphas) {
            direct
                .apply_gate(&Gate::ZProdPhase {
                    qubits: p.members(),
                    alpha,
                })
                .map_err(|e| format!("cannot apply reference gate: {e}"))?;
        }
        worst = worst.max(evolved.max_deviation(&direct));
    }
    if worst > TOLERANCE {
        return Err(format!(
            "schedule does not match its plaquette phases: max amplitude deviation {worst:.3e}"
        ));
    }
    Ok(format!(
        "{} layers, disjoint; matches {} plaquette phases (max deviation {worst:.3e})",
        circuit.depth(),
        alphas.len()
    ))
}

/// Recover one angle per plaquette from the RZ gates of a decomposed block.
fn reconstruct_alphas(circuit: &Circuit, layout: &LhzLayout) -> Result<Vec<f64>, String> {
    // The rotation of plaquette l sits on the last qubit of its member path,
    // which is unique to l (it is the south corner).
    let mut plaquette_of = vec![None; layout.n_qubits()];
    for (l, p) in layout.constraints().iter().enumerate() {
        let end = *p.members().last().expect("plaquettes are nonempty");
        plaquette_of[end] = Some(l);
    }
    let mut alphas = vec![0.0; layout.n_constraints()];
    for gate in circuit.gates() {
        match gate {
            Gate::Cnot { .. } => {}
            Gate::Rz { qubit, phi } => match plaquette_of.get(*qubit).copied().flatten() {
                Some(l) => alphas[l] += phi / 2.0,
                None => {
                    return Err(format!(
                        "RZ on qubit {qubit}, which is not a rotation site of any plaquette"
                    ))
                }
            },
            other => return Err(format!("unexpected gate in constraint schedule: {other:?}")),
        }
    }
    Ok(alphas)
}

fn random_state(n_qubits: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let dim = 1usize << n_qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps, n_qubits).expect("normalized by construction")
}
