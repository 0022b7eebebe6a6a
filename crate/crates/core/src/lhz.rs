//! LHZ parity layout: one physical qubit per spin pair, plaquette parity
//! constraints, and the encode/decode maps between logical configurations
//! and physical bit strings.
//!
//! Qubit `(i, j)` (0-based, `i < j`) sits at grid position `(row=i, col=j)`,
//! which realigns the triangular parity arrangement to a square lattice.
//! Constraints are the unit plaquettes with corners
//! `(i,j) (i,j+1) (i+1,j) (i+1,j+1)`. The diagonal corner `(d,d)` is not a
//! pair label; in `augmented` mode it is filled by an ancilla fixed to +1 so
//! every constraint is 4-body, in `bare` mode those boundary constraints are
//! 3-body.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::problem::{LogicalProblem, SpinConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitLabel {
    /// Physical qubit carrying the relative orientation of spins i and j.
    Pair(usize, usize),
    /// Fixed +1 ancilla completing a boundary plaquette.
    Ancilla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutQubit {
    pub id: usize,
    pub label: QubitLabel,
    pub row: usize,
    pub col: usize,
}

/// Boundary handling mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AncillaMode {
    /// Append N-2 fixed ancillas so every constraint is a 4-body plaquette
    /// and the uniform parallel schedule applies everywhere.
    #[default]
    Augmented,
    /// Minimal qubit count; boundary constraints are 3-body.
    Bare,
}

/// One parity constraint. Member roles follow the plaquette geometry:
/// north `(i,j)`, east `(i,j+1)`, west `(i+1,j)`, south `(i+1,j+1)`.
/// `west` is absent for 3-body boundary constraints in bare mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Plaquette {
    pub north: usize,
    pub east: usize,
    pub west: Option<usize>,
    pub south: usize,
}

impl Plaquette {
    /// Member qubit ids in z-path order north, east, west, south.
    pub fn members(&self) -> Vec<usize> {
        match self.west {
            Some(w) => vec![self.north, self.east, w, self.south],
            None => vec![self.north, self.east, self.south],
        }
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.north == qubit || self.east == qubit || self.south == qubit || self.west == Some(qubit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhzLayout {
    n_logical: usize,
    qubits: Vec<LayoutQubit>,
    constraints: Vec<Plaquette>,
    n_ancillas: usize,
    mode: AncillaMode,
}

impl LhzLayout {
    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    /// Total qubit count including ancillas.
    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Labeled (non-ancilla) qubit count K = N(N-1)/2.
    pub fn n_labeled(&self) -> usize {
        self.qubits.len() - self.n_ancillas
    }

    pub fn n_ancillas(&self) -> usize {
        self.n_ancillas
    }

    pub fn mode(&self) -> AncillaMode {
        self.mode
    }

    pub fn qubits(&self) -> &[LayoutQubit] {
        &self.qubits
    }

    pub fn constraints(&self) -> &[Plaquette] {
        &self.constraints
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Id of the qubit labeled (i, j), i < j.
    pub fn pair_qubit(&self, i: usize, j: usize) -> usize {
        assert!(i < j && j < self.n_logical, "bad pair ({i},{j})");
        i * self.n_logical - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn is_ancilla(&self, qubit: usize) -> bool {
        self.qubits[qubit].label == QubitLabel::Ancilla
    }
}

/// Build the LHZ layout for `n_logical` spins.
#[allow(clippy::needless_range_loop)] // lattice coordinates double as indices
pub fn build_layout(n_logical: usize, mode: AncillaMode) -> Result<LhzLayout> {
    if n_logical < 2 {
        return Err(Error::invalid(format!(
            "n_logical must be >= 2, got {n_logical}"
        )));
    }
    let n = n_logical;
    let mut qubits = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            qubits.push(LayoutQubit {
                id: qubits.len(),
                label: QubitLabel::Pair(i, j),
                row: i,
                col: j,
            });
        }
    }
    // Diagonal ancillas at (d, d), one per 3-body boundary plaquette.
    let mut ancilla_at = vec![None; n];
    let n_ancillas = if mode == AncillaMode::Augmented && n >= 3 {
        for d in 1..n - 1 {
            ancilla_at[d] = Some(qubits.len());
            qubits.push(LayoutQubit {
                id: qubits.len(),
                label: QubitLabel::Ancilla,
                row: d,
                col: d,
            });
        }
        n - 2
    } else {
        0
    };

    let layout_stub = LhzLayout {
        n_logical: n,
        qubits: qubits.clone(),
        constraints: Vec::new(),
        n_ancillas,
        mode,
    };
    let mut constraints = Vec::new();
    for i in 0..n.saturating_sub(2) {
        for j in i + 1..n - 1 {
            let north = layout_stub.pair_qubit(i, j);
            let east = layout_stub.pair_qubit(i, j + 1);
            let south = layout_stub.pair_qubit(i + 1, j + 1);
            let west = if j > i + 1 {
                Some(layout_stub.pair_qubit(i + 1, j))
            } else {
                ancilla_at[j]
            };
            constraints.push(Plaquette {
                north,
                east,
                west,
                south,
            });
        }
    }

    Ok(LhzLayout {
        constraints,
        ..layout_stub
    })
}

/// Physical bit string over the layout, sigma_z eigenvalues (+1 is |0>).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhysicalBits(Vec<i8>);

impl PhysicalBits {
    pub fn new(bits: Vec<i8>, layout: &LhzLayout) -> Result<Self> {
        if bits.len() != layout.n_qubits() {
            return Err(Error::invalid(format!(
                "bit string length {} != qubit count {}",
                bits.len(),
                layout.n_qubits()
            )));
        }
        if bits.iter().any(|&b| b != 1 && b != -1) {
            return Err(Error::invalid("bits must be +1 or -1"));
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &[i8] {
        &self.0
    }

    /// Basis index with qubit 0 as least significant bit; bit set means -1.
    pub fn basis_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (q, &b)| if b < 0 { acc | (1 << q) } else { acc })
    }
}

/// Local field vector: `J_i` of qubit (i,j) is the coupling `J_ij`, ancillas 0.
pub fn local_fields(problem: &LogicalProblem, layout: &LhzLayout) -> Result<Vec<f64>> {
    if problem.n_spins() != layout.n_logical() {
        return Err(Error::invalid(format!(
            "problem N={} does not match layout N={}",
            problem.n_spins(),
            layout.n_logical()
        )));
    }
    Ok(layout
        .qubits()
        .iter()
        .map(|q| match q.label {
            QubitLabel::Pair(i, j) => problem.coupling(i, j),
            QubitLabel::Ancilla => 0.0,
        })
        .collect())
}

/// Encode a logical configuration: qubit (i,j) carries `s_i * s_j`.
pub fn encode(config: &SpinConfig, layout: &LhzLayout) -> Result<PhysicalBits> {
    if config.len() != layout.n_logical() {
        return Err(Error::invalid(format!(
            "config length {} != N={}",
            config.len(),
            layout.n_logical()
        )));
    }
    let s = config.spins();
    let bits = layout
        .qubits()
        .iter()
        .map(|q| match q.label {
            QubitLabel::Pair(i, j) => s[i] * s[j],
            QubitLabel::Ancilla => 1,
        })
        .collect();
    PhysicalBits::new(bits, layout)
}

/// Decode along the (0, j) star, normalizing to `s_0 = +1`, and count
/// violated constraints. Violations are reported, never fatal.
pub fn decode(bits: &PhysicalBits, layout: &LhzLayout) -> Result<(SpinConfig, usize)> {
    if bits.bits().len() != layout.n_qubits() {
        return Err(Error::invalid("bit string does not match layout"));
    }
    let mut spins = Vec::with_capacity(layout.n_logical());
    spins.push(1);
    for j in 1..layout.n_logical() {
        spins.push(bits.bits()[layout.pair_qubit(0, j)]);
    }
    let n_violated = constraint_parities(bits, layout)
        .iter()
        .filter(|&&p| p != 1)
        .count();
    Ok((SpinConfig::new(spins)?, n_violated))
}

/// Per-plaquette bit products.
pub fn constraint_parities(bits: &PhysicalBits, layout: &LhzLayout) -> Vec<i8> {
    layout
        .constraints()
        .iter()
        .map(|p| p.members().iter().map(|&q| bits.bits()[q]).product())
        .collect()
}

/// Layout dump: one `id row col label` line per qubit, then one
/// `l: id id id [id]` line per constraint.
pub fn format_layout(layout: &LhzLayout) -> String {
    let mut out = String::new();
    for q in layout.qubits() {
        let label = match q.label {
            QubitLabel::Pair(i, j) => format!("{i},{j}"),
            QubitLabel::Ancilla => "A".to_string(),
        };
        writeln!(out, "{} {} {} {}", q.id, q.row, q.col, label).unwrap();
    }
    for (l, p) in layout.constraints().iter().enumerate() {
        let ids: Vec<String> = p.members().iter().map(|q| q.to_string()).collect();
        writeln!(out, "{l}: {}", ids.join(" ")).unwrap();
    }
    out
}
