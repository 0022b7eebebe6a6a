//! Dense complex statevector engine and diagonal-Hamiltonian evaluation.
//!
//! Qubit 0 is the least significant bit of the basis index; bit value 0 is
//! the sigma_z = +1 eigenstate.

use std::io::{Read as _, Write as _};
use std::path::Path;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::lhz::LhzLayout;

/// Hard cap on simulated qubits (dense double-precision storage).
pub const MAX_QUBITS: usize = 26;

const DUMP_MAGIC: &[u8; 8] = b"LHZSTVEC";

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n_qubits: usize,
}

impl StateVector {
    /// Equal superposition over all basis states.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let dim = 1usize << n_qubits;
        let amp = Complex64::new((dim as f64).recip().sqrt(), 0.0);
        Ok(Self {
            amps: vec![amp; dim],
            n_qubits,
        })
    }

    /// Computational basis state |index>.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::invalid(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(Self { amps, n_qubits })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>, n_qubits: usize) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::invalid("amplitude count must be 2^K"));
        }
        Ok(Self { amps, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max |a - b| over amplitudes; states must have equal qubit counts.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::invalid(format!(
                "qubit {q} out of range for {}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        match gate {
            Gate::Rx { qubit, theta } => {
                self.check_qubit(*qubit)?;
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let mis = Complex64::new(0.0, -s);
                let bit = 1usize << qubit;
                for i0 in indices_with_clear_bit(self.dim(), bit) {
                    let i1 = i0 | bit;
                    let (a0, a1) = (self.amps[i0], self.amps[i1]);
                    self.amps[i0] = c * a0 + mis * a1;
                    self.amps[i1] = c * a1 + mis * a0;
                }
            }
            Gate::Rz { qubit, phi } => {
                self.check_qubit(*qubit)?;
                let p0 = Complex64::from_polar(1.0, -phi / 2.0);
                let p1 = Complex64::from_polar(1.0, phi / 2.0);
                let bit = 1usize << qubit;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & bit == 0 { p0 } else { p1 };
                }
            }
            Gate::Cnot { control, target } => {
                self.check_qubit(*control)?;
                self.check_qubit(*target)?;
                if control == target {
                    return Err(Error::invalid("CNOT control equals target"));
                }
                let (cbit, tbit) = (1usize << control, 1usize << target);
                for i0 in indices_with_clear_bit(self.dim(), tbit) {
                    if i0 & cbit != 0 {
                        self.amps.swap(i0, i0 | tbit);
                    }
                }
            }
            Gate::ZProdPhase { qubits, alpha } => {
                let mut mask = 0usize;
                for &q in qubits {
                    self.check_qubit(q)?;
                    mask |= 1 << q;
                }
                // Parity +1 (even popcount) picks up e^{-i alpha}.
                let even = Complex64::from_polar(1.0, -alpha);
                let odd = Complex64::from_polar(1.0, *alpha);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if (i & mask).count_ones().is_multiple_of(2) {
                        even
                    } else {
                        odd
                    };
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.qubit_count > self.n_qubits {
            return Err(Error::invalid(format!(
                "circuit spans {} qubits, state has {}",
                circuit.qubit_count, self.n_qubits
            )));
        }
        for gate in circuit.gates() {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    /// <Z_q>.
    pub fn z_expectation(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if i & bit == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }

    /// <Z x ... x Z> over the qubits set in `mask`.
    pub fn zprod_expectation(&self, mask: usize) -> Result<f64> {
        if mask >= self.dim() {
            return Err(Error::invalid("mask references qubits out of range"));
        }
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if (i & mask).count_ones().is_multiple_of(2) {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }

    /// Summed probability over a set of basis indices.
    pub fn overlap_probability(&self, basis_indices: &[usize]) -> Result<f64> {
        for &i in basis_indices {
            if i >= self.dim() {
                return Err(Error::invalid(format!("basis index {i} out of range")));
            }
        }
        Ok(basis_indices.iter().map(|&i| self.amps[i].norm_sqr()).sum())
    }

    /// <psi|H|psi> for a diagonal Hamiltonian.
    pub fn expectation(&self, diag: &DiagonalHamiltonian) -> Result<f64> {
        if diag.energies.len() != self.dim() {
            return Err(Error::invalid("diagonal dimension mismatch"));
        }
        Ok(self
            .amps
            .iter()
            .zip(&diag.energies)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum())
    }
}

fn indices_with_clear_bit(dim: usize, bit: usize) -> impl Iterator<Item = usize> {
    (0..dim).filter(move |i| i & bit == 0)
}

/// Energies of all 2^K basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalHamiltonian {
    energies: Vec<f64>,
}

impl DiagonalHamiltonian {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, basis_index: usize) -> f64 {
        self.energies[basis_index]
    }
}

/// Evaluation Hamiltonian of the parity-encoded problem:
/// `E(b) = sum_i J_i z_i(b) - sum_l C_l prod_{q in l} z_q(b)`.
/// Positive constraint strengths reward constraint-satisfying states.
pub fn build_diagonal(
    layout: &LhzLayout,
    fields: &[f64],
    constraint_strengths: &[f64],
) -> Result<DiagonalHamiltonian> {
    if fields.len() != layout.n_qubits() {
        return Err(Error::invalid(format!(
            "expected {} local fields, got {}",
            layout.n_qubits(),
            fields.len()
        )));
    }
    if constraint_strengths.len() != layout.n_constraints() {
        return Err(Error::invalid(format!(
            "expected {} constraint strengths, got {}",
            layout.n_constraints(),
            constraint_strengths.len()
        )));
    }
    let k = layout.n_qubits();
    if k > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "layout has {k} qubits, cap is {MAX_QUBITS}"
        )));
    }
    let masks: Vec<usize> = layout
        .constraints()
        .iter()
        .map(|p| p.members().iter().fold(0usize, |m, &q| m | (1 << q)))
        .collect();
    let energies = (0..1usize << k)
        .map(|b| {
            let mut e = 0.0;
            for (q, &j) in fields.iter().enumerate() {
                if j != 0.0 {
                    e += if b & (1 << q) == 0 { j } else { -j };
                }
            }
            for (&mask, &c) in masks.iter().zip(constraint_strengths) {
                e -= if (b & mask).count_ones() % 2 == 0 {
                    c
                } else {
                    -c
                };
            }
            e
        })
        .collect();
    Ok(DiagonalHamiltonian { energies })
}

/// Binary state dump: 8-byte magic, 8-byte little-endian qubit count, then
/// 2^K little-endian (re, im) double pairs.
pub fn write_state(state: &StateVector, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(DUMP_MAGIC)?;
    f.write_all(&(state.n_qubits() as u64).to_le_bytes())?;
    for a in state.amplitudes() {
        f.write_all(&a.re.to_le_bytes())?;
        f.write_all(&a.im.to_le_bytes())?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_state(path: &Path) -> Result<StateVector> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut header = [0u8; 16];
    f.read_exact(&mut header)?;
    if &header[..8] != DUMP_MAGIC {
        return Err(Error::invalid("bad state dump magic"));
    }
    let k = u64::from_le_bytes(header[8..].try_into().unwrap()) as usize;
    if k == 0 || k > MAX_QUBITS {
        return Err(Error::invalid(format!("bad qubit count {k} in state dump")));
    }
    let mut amps = Vec::with_capacity(1 << k);
    let mut buf = [0u8; 16];
    for _ in 0..1usize << k {
        f.read_exact(&mut buf)?;
        amps.push(Complex64::new(
            f64::from_le_bytes(buf[..8].try_into().unwrap()),
            f64::from_le_bytes(buf[8..].try_into().unwrap()),
        ));
    }
    StateVector::from_amplitudes(amps, k)
}
