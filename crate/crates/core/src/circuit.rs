//! Gate-level circuit IR, the CNOT+Rz plaquette decomposition, and the
//! depth-bounded parallel constraint schedule.
//!
//! Conventions: `RX(theta) = exp(-i theta X / 2)`, `RZ(phi) = exp(-i phi Z / 2)`,
//! CNOT standard, and `ZPROD_PHASE(qs, alpha) = exp(-i alpha Z x ... x Z)`,
//! i.e. basis state |b> picks up `exp(-i alpha p(b))` with
//! `p(b) = prod (-1)^(b_q)`.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lhz::{AncillaMode, LhzLayout};

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Rx { qubit: usize, theta: f64 },
    Rz { qubit: usize, phi: f64 },
    Cnot { control: usize, target: usize },
    ZProdPhase { qubits: Vec<usize>, alpha: f64 },
}

impl Gate {
    pub fn support(&self) -> Vec<usize> {
        match self {
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::ZProdPhase { qubits, .. } => qubits.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Gate::Cnot { control, target } if control == target => {
                Err(Error::invalid("CNOT control equals target"))
            }
            Gate::ZProdPhase { qubits, .. } => {
                if qubits.is_empty() || qubits.len() > 4 {
                    return Err(Error::invalid("ZPROD_PHASE takes 1..=4 qubits"));
                }
                let set: HashSet<_> = qubits.iter().collect();
                if set.len() != qubits.len() {
                    return Err(Error::invalid("ZPROD_PHASE qubits must be distinct"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Gates with pairwise disjoint supports, executable in parallel.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    pub gates: Vec<Gate>,
}

impl Layer {
    pub fn is_disjoint(&self) -> bool {
        let mut seen = HashSet::new();
        self.gates
            .iter()
            .flat_map(|g| g.support())
            .all(|q| seen.insert(q))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    pub layers: Vec<Layer>,
    pub qubit_count: usize,
    pub name: String,
}

impl Circuit {
    pub fn new(qubit_count: usize, name: impl Into<String>) -> Self {
        Self {
            layers: Vec::new(),
            qubit_count,
            name: name.into(),
        }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| l.gates.iter())
    }

    pub fn n_gates(&self) -> usize {
        self.layers.iter().map(|l| l.gates.len()).sum()
    }

    fn validate_refs(&self) -> Result<()> {
        for g in self.gates() {
            g.validate()?;
            if let Some(&q) = g.support().iter().find(|&&q| q >= self.qubit_count) {
                return Err(Error::invalid(format!(
                    "gate references qubit {q} >= qubit count {}",
                    self.qubit_count
                )));
            }
        }
        Ok(())
    }
}

/// True iff every layer's gate supports are pairwise disjoint.
pub fn verify_layers(circuit: &Circuit) -> bool {
    circuit.layers.iter().all(Layer::is_disjoint)
}

/// Decompose one plaquette phase `exp(-i alpha Z...Z)` into CNOTs along the
/// given path, an `RZ(2 alpha)` on the last path qubit, and the CNOTs in
/// reverse. Exact (no residual global phase).
pub fn decompose_plaquette(qubit_path: &[usize], alpha: f64) -> Result<Vec<Gate>> {
    if !(3..=4).contains(&qubit_path.len()) {
        return Err(Error::invalid("plaquette path must have 3 or 4 qubits"));
    }
    let set: HashSet<_> = qubit_path.iter().collect();
    if set.len() != qubit_path.len() {
        return Err(Error::invalid("plaquette path qubits must be distinct"));
    }
    let mut gates = Vec::with_capacity(2 * qubit_path.len() - 1);
    for w in qubit_path.windows(2) {
        gates.push(Gate::Cnot {
            control: w[0],
            target: w[1],
        });
    }
    gates.push(Gate::Rz {
        qubit: *qubit_path.last().unwrap(),
        phi: 2.0 * alpha,
    });
    for w in qubit_path.windows(2).rev() {
        gates.push(Gate::Cnot {
            control: w[0],
            target: w[1],
        });
    }
    Ok(gates)
}

/// Compile all constraint phases `prod_l exp(-i alpha_l Z..Z)` into disjoint
/// parallel layers.
///
/// In augmented mode the plaquettes split into four interleaved passes by the
/// parity of their anchor row and column; within a pass all plaquette
/// supports are disjoint, so each pass compiles to exactly 7 layers (3 CNOT
/// layers along the z-path, one Rz layer, 3 reversed CNOT layers). Total
/// depth is at most 4 x 7 = 28, independent of system size. Bare layouts use
/// greedy ASAP packing with no depth guarantee.
pub fn build_constraint_block(layout: &LhzLayout, alpha_per_plaquette: &[f64]) -> Result<Circuit> {
    if alpha_per_plaquette.len() != layout.n_constraints() {
        return Err(Error::invalid(format!(
            "expected {} plaquette angles, got {}",
            layout.n_constraints(),
            alpha_per_plaquette.len()
        )));
    }
    let mut circuit = Circuit::new(layout.n_qubits(), "constraint-block");
    match layout.mode() {
        AncillaMode::Augmented => {
            // Pass index from anchor parity; the anchor is the north corner.
            let mut passes: [Vec<usize>; 4] = Default::default();
            for (l, p) in layout.constraints().iter().enumerate() {
                let anchor = &layout.qubits()[p.north];
                passes[(anchor.row % 2) * 2 + anchor.col % 2].push(l);
            }
            for pass in passes.iter().filter(|p| !p.is_empty()) {
                let mut layers = vec![Layer::default(); 7];
                for &l in pass {
                    let path = layout.constraints()[l].members();
                    debug_assert_eq!(path.len(), 4);
                    let gates = decompose_plaquette(&path, alpha_per_plaquette[l])?;
                    for (layer, gate) in layers.iter_mut().zip(gates) {
                        layer.gates.push(gate);
                    }
                }
                circuit.layers.extend(layers);
            }
        }
        AncillaMode::Bare => {
            // ASAP packing: a gate lands in the first layer after the last
            // layer touching any of its qubits, preserving per-qubit order.
            let mut ready = vec![0usize; layout.n_qubits()];
            for (l, p) in layout.constraints().iter().enumerate() {
                for gate in decompose_plaquette(&p.members(), alpha_per_plaquette[l])? {
                    let at = gate.support().iter().map(|&q| ready[q]).max().unwrap();
                    if at == circuit.layers.len() {
                        circuit.layers.push(Layer::default());
                    }
                    for &q in &gate.support() {
                        ready[q] = at + 1;
                    }
                    circuit.layers[at].gates.push(gate);
                }
            }
        }
    }
    debug_assert!(verify_layers(&circuit));
    Ok(circuit)
}

/// Line-oriented circuit text: `QUBITS <n>` header, `LAYER` delimiters,
/// gate lines `RX q theta`, `RZ q phi`, `CNOT c t`, `ZPHASE q... alpha`.
pub fn emit_text(circuit: &Circuit) -> String {
    let mut out = String::new();
    if !circuit.name.is_empty() {
        writeln!(out, "# {}", circuit.name).unwrap();
    }
    writeln!(out, "QUBITS {}", circuit.qubit_count).unwrap();
    for layer in &circuit.layers {
        writeln!(out, "LAYER").unwrap();
        for gate in &layer.gates {
            match gate {
                Gate::Rx { qubit, theta } => writeln!(out, "RX {qubit} {theta}").unwrap(),
                Gate::Rz { qubit, phi } => writeln!(out, "RZ {qubit} {phi}").unwrap(),
                Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}").unwrap(),
                Gate::ZProdPhase { qubits, alpha } => {
                    let qs: Vec<String> = qubits.iter().map(|q| q.to_string()).collect();
                    writeln!(out, "ZPHASE {} {alpha}", qs.join(" ")).unwrap()
                }
            }
        }
    }
    out
}

/// Parse the format emitted by [`emit_text`]. Errors carry line numbers.
pub fn parse_text(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            // A leading comment carries the circuit name.
            if circuit.is_none() {
                circuit = Some(Circuit::new(0, comment.trim()));
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        let parse_qubit = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::parse(line_no, format!("bad qubit index `{s}`")))
        };
        let parse_angle = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(line_no, format!("bad angle `{s}`")))
        };
        match head {
            "QUBITS" => {
                let [n] = rest[..] else {
                    return Err(Error::parse(line_no, "expected `QUBITS <n>`"));
                };
                let n = parse_qubit(n)?;
                match circuit.as_mut() {
                    Some(c) if c.qubit_count == 0 && c.layers.is_empty() => c.qubit_count = n,
                    Some(_) => return Err(Error::parse(line_no, "duplicate QUBITS header")),
                    None => circuit = Some(Circuit::new(n, "")),
                }
            }
            _ => {
                let c = circuit
                    .as_mut()
                    .filter(|c| c.qubit_count > 0)
                    .ok_or_else(|| Error::parse(line_no, "missing QUBITS header"))?;
                match head {
                    "LAYER" => c.layers.push(Layer::default()),
                    "RX" | "RZ" | "CNOT" | "ZPHASE" => {
                        let layer = c
                            .layers
                            .last_mut()
                            .ok_or_else(|| Error::parse(line_no, "gate before first LAYER"))?;
                        let gate = match head {
                            "RX" | "RZ" => {
                                let [q, a] = rest[..] else {
                                    return Err(Error::parse(
                                        line_no,
                                        format!("expected `{head} <qubit> <angle>`"),
                                    ));
                                };
                                let qubit = parse_qubit(q)?;
                                let angle = parse_angle(a)?;
                                if head == "RX" {
                                    Gate::Rx {
                                        qubit,
                                        theta: angle,
                                    }
                                } else {
                                    Gate::Rz { qubit, phi: angle }
                                }
                            }
                            "CNOT" => {
                                let [ctl, tgt] = rest[..] else {
                                    return Err(Error::parse(
                                        line_no,
                                        "expected `CNOT <control> <target>`",
                                    ));
                                };
                                Gate::Cnot {
                                    control: parse_qubit(ctl)?,
                                    target: parse_qubit(tgt)?,
                                }
                            }
                            _ => {
                                if rest.len() < 2 || rest.len() > 5 {
                                    return Err(Error::parse(
                                        line_no,
                                        "expected `ZPHASE <q...> <alpha>`",
                                    ));
                                }
                                let (angle, qs) = rest.split_last().unwrap();
                                let qubits = qs
                                    .iter()
                                    .map(|q| parse_qubit(q))
                                    .collect::<Result<Vec<_>>>()?;
                                Gate::ZProdPhase {
                                    qubits,
                                    alpha: parse_angle(angle)?,
                                }
                            }
                        };
                        gate.validate()
                            .map_err(|e| Error::parse(line_no, e.to_string()))?;
                        layer.gates.push(gate);
                    }
                    other => {
                        return Err(Error::parse(
                            line_no,
                            format!("unknown directive `{other}`"),
                        ))
                    }
                }
            }
        }
    }
    let circuit = circuit.ok_or_else(|| Error::parse(1, "missing QUBITS header"))?;
    if circuit.qubit_count == 0 {
        return Err(Error::parse(1, "missing QUBITS header"));
    }
    circuit.validate_refs().map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::parse(text.lines().count(), msg),
        e => e,
    })?;
    Ok(circuit)
}
