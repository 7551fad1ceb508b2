//! Variational circuits: gate programs with named parameter slots.
//!
//! A circuit is a reference product state plus a flat list of gate
//! operations, each referencing parameter slots by index. Three families are
//! provided:
//!
//! * **Number-preserving brickwork** ([`build_np_ansatz`]) — a Z-rotation
//!   prelude, then per layer one pair gate on every site's (up, down) pair
//!   followed by pair gates on both spin species of every lattice bond,
//!   grouped as odd-column horizontal, odd-row vertical, even-column
//!   horizontal, even-row vertical. Non-adjacent pairs are routed with
//!   fermionic-swap chains that are emitted and exactly undone around each
//!   gate, so the circuit is a strict chain circuit.
//! * **Phase-split ladder** ([`build_ep_ansatz`]) — Z-rotation layers before
//!   and after, with per layer one phase-split pair gate on each ascending
//!   adjacent qubit pair; hardware-style, ignorant of the lattice.
//! * **Unitary coupled cluster** ([`build_uccsd_ansatz`]) — exact
//!   single/double excitation factors from the reference occupation, spin
//!   conserving. Factors act on arbitrary mode subsets, so this family
//!   evaluates on the dense backend only.
//!
//! Parameter slots are allocated in emission order and each slot is
//! referenced by exactly one gate; the closed-form counts are exposed as
//! [`np_param_count`] and [`ep_param_count`].

use crate::dense::{apply_ucc_factor, DenseState};
use crate::error::{Error, Result};
use crate::gates::{ep_gate, fswap, np_gate, rz};
use crate::lattice::{checkerboard_occupation, Bond, LatticeGeometry, QubitLayout, Spin};
use crate::mps::MpsState;

/// One gate in a circuit; parameter fields are slot indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateOp {
    /// Z rotation on one qubit.
    Rz { qubit: usize, slot: usize },
    /// Number-preserving pair gate on `(qa, qb)`, `qa` the left/first qubit.
    Np { qa: usize, qb: usize, theta: usize, phi: usize },
    /// Phase-split pair gate.
    Ep { qa: usize, qb: usize, theta: usize, phi: usize },
    /// Parameter-free fermionic swap (routing).
    Fswap { qa: usize, qb: usize },
    /// Exact single-excitation factor `exp(theta (c_v^dag c_o - h.c.))`.
    UccSingle { o: usize, v: usize, slot: usize },
    /// Exact double-excitation factor for `(o1, o2) -> (v1, v2)`.
    UccDouble { o1: usize, o2: usize, v1: usize, v2: usize, slot: usize },
}

/// A parametrized circuit over a fixed qubit count and reference state.
#[derive(Clone, Debug)]
pub struct Circuit {
    n_qubits: usize,
    n_params: usize,
    initial_occupations: Vec<u8>,
    ops: Vec<GateOp>,
}

impl Circuit {
    /// Assemble a circuit from raw parts. Every gate must address qubits in
    /// range, and the parameter slots referenced by the gates must form the
    /// contiguous range `0..n_params`.
    pub fn new(initial_occupations: Vec<u8>, ops: Vec<GateOp>) -> Result<Self> {
        let n_qubits = initial_occupations.len();
        if n_qubits == 0 {
            return Err(Error::domain("circuit needs at least one qubit"));
        }
        if initial_occupations.iter().any(|&b| b > 1) {
            return Err(Error::domain("occupations must be 0 or 1"));
        }
        let mut slots: Vec<usize> = Vec::new();
        let mut qubits: Vec<usize> = Vec::new();
        for op in &ops {
            match *op {
                GateOp::Rz { qubit, slot } => {
                    qubits.push(qubit);
                    slots.push(slot);
                }
                GateOp::Np { qa, qb, theta, phi } | GateOp::Ep { qa, qb, theta, phi } => {
                    qubits.extend([qa, qb]);
                    slots.extend([theta, phi]);
                }
                GateOp::Fswap { qa, qb } => qubits.extend([qa, qb]),
                GateOp::UccSingle { o, v, slot } => {
                    qubits.extend([o, v]);
                    slots.push(slot);
                }
                GateOp::UccDouble { o1, o2, v1, v2, slot } => {
                    qubits.extend([o1, o2, v1, v2]);
                    slots.push(slot);
                }
            }
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::domain(format!("gate qubit {q} out of range")));
        }
        let n_params = slots.iter().map(|&s| s + 1).max().unwrap_or(0);
        let mut seen = vec![false; n_params];
        for &s in &slots {
            seen[s] = true;
        }
        if let Some(gap) = seen.iter().position(|&s| !s) {
            return Err(Error::domain(format!(
                "parameter slot {gap} is never referenced"
            )));
        }
        Ok(Circuit {
            n_qubits,
            n_params,
            initial_occupations,
            ops,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn initial_occupations(&self) -> &[u8] {
        &self.initial_occupations
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    /// Evaluate on the tensor-network backend. Every pair gate must be
    /// chain-adjacent (the provided builders guarantee that); excitation
    /// factors are not chain-local and are rejected.
    pub fn evaluate_mps(&self, params: &[f64], chi_max: usize, cutoff: f64) -> Result<MpsState> {
        self.check_params(params)?;
        let mut state = MpsState::product_state(&self.initial_occupations, chi_max, cutoff)?;
        for op in &self.ops {
            match *op {
                GateOp::Rz { qubit, slot } => {
                    state.apply_one_qubit_gate(qubit, rz(params[slot]).as_ref())?;
                }
                GateOp::Np { qa, qb, theta, phi } => {
                    self.require_adjacent(qa, qb)?;
                    state.apply_two_qubit_gate(qa, np_gate(params[theta], params[phi]).as_ref())?;
                }
                GateOp::Ep { qa, qb, theta, phi } => {
                    self.require_adjacent(qa, qb)?;
                    state.apply_two_qubit_gate(qa, ep_gate(params[theta], params[phi]).as_ref())?;
                }
                GateOp::Fswap { qa, qb } => {
                    self.require_adjacent(qa, qb)?;
                    state.apply_two_qubit_gate(qa, fswap().as_ref())?;
                }
                GateOp::UccSingle { .. } | GateOp::UccDouble { .. } => {
                    return Err(Error::capability(
                        "excitation factors are not chain-local; use the dense backend",
                    ));
                }
            }
        }
        Ok(state)
    }

    /// Evaluate on the dense statevector backend (capability-limited in
    /// qubit count); supports every gate kind.
    pub fn evaluate_dense(&self, params: &[f64]) -> Result<DenseState> {
        self.check_params(params)?;
        let mut state = DenseState::from_occupations(&self.initial_occupations)?;
        for op in &self.ops {
            match *op {
                GateOp::Rz { qubit, slot } => {
                    state.apply_one_qubit_gate(qubit, rz(params[slot]).as_ref())?;
                }
                GateOp::Np { qa, qb, theta, phi } => {
                    state.apply_two_qubit_gate(qa, qb, np_gate(params[theta], params[phi]).as_ref())?;
                }
                GateOp::Ep { qa, qb, theta, phi } => {
                    state.apply_two_qubit_gate(qa, qb, ep_gate(params[theta], params[phi]).as_ref())?;
                }
                GateOp::Fswap { qa, qb } => {
                    state.apply_two_qubit_gate(qa, qb, fswap().as_ref())?;
                }
                GateOp::UccSingle { o, v, slot } => {
                    apply_ucc_factor(&mut state, &[o], &[v], params[slot])?;
                }
                GateOp::UccDouble { o1, o2, v1, v2, slot } => {
                    apply_ucc_factor(&mut state, &[o1, o2], &[v1, v2], params[slot])?;
                }
            }
        }
        Ok(state)
    }

    /// Plain-text listing: a header, then one line per gate.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "qubits={} params={} gates={}\n",
            self.n_qubits,
            self.n_params,
            self.ops.len()
        );
        let occ: String = self
            .initial_occupations
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect();
        out.push_str(&format!("initial={occ}\n"));
        for op in &self.ops {
            let line = match *op {
                GateOp::Rz { qubit, slot } => format!("rz q{qubit} p{slot}"),
                GateOp::Np { qa, qb, theta, phi } => {
                    format!("np q{qa} q{qb} p{theta} p{phi}")
                }
                GateOp::Ep { qa, qb, theta, phi } => {
                    format!("ep q{qa} q{qb} p{theta} p{phi}")
                }
                GateOp::Fswap { qa, qb } => format!("fswap q{qa} q{qb}"),
                GateOp::UccSingle { o, v, slot } => format!("ucc1 m{o} m{v} p{slot}"),
                GateOp::UccDouble { o1, o2, v1, v2, slot } => {
                    format!("ucc2 m{o1} m{o2} m{v1} m{v2} p{slot}")
                }
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::domain(format!(
                "expected {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::domain(format!("non-finite parameter {bad}")));
        }
        Ok(())
    }

    fn require_adjacent(&self, qa: usize, qb: usize) -> Result<()> {
        if qb != qa + 1 {
            return Err(Error::domain(format!(
                "pair gate on ({qa},{qb}) is not chain-adjacent"
            )));
        }
        Ok(())
    }
}

/// Closed-form parameter count of the number-preserving ansatz.
pub fn np_param_count(geometry: &LatticeGeometry, layers: usize) -> usize {
    let n = geometry.n_sites();
    let b = geometry.bonds().len();
    2 * n + layers * (2 * n + 4 * b)
}

/// Closed-form parameter count of the phase-split ladder ansatz.
pub fn ep_param_count(geometry: &LatticeGeometry, layers: usize) -> usize {
    let nq = geometry.n_qubits();
    2 * nq + 2 * layers * (nq - 1)
}

/// Emission helper carrying the running slot counter.
struct Builder {
    ops: Vec<GateOp>,
    next_slot: usize,
}

impl Builder {
    fn new() -> Self {
        Builder {
            ops: Vec::new(),
            next_slot: 0,
        }
    }

    fn rz(&mut self, qubit: usize) {
        let slot = self.next_slot;
        self.next_slot += 1;
        self.ops.push(GateOp::Rz { qubit, slot });
    }

    /// Pair gate on possibly distant qubits, routed to adjacency with
    /// fermionic swaps that are exactly undone afterwards.
    fn routed_np(&mut self, qa: usize, qb: usize) {
        assert!(qa < qb, "pair gates are emitted with qa < qb");
        let theta = self.next_slot;
        let phi = self.next_slot + 1;
        self.next_slot += 2;
        for p in (qa + 1..qb).rev() {
            self.ops.push(GateOp::Fswap { qa: p, qb: p + 1 });
        }
        self.ops.push(GateOp::Np {
            qa,
            qb: qa + 1,
            theta,
            phi,
        });
        for p in qa + 1..qb {
            self.ops.push(GateOp::Fswap { qa: p, qb: p + 1 });
        }
    }

    fn ep(&mut self, qa: usize) {
        let theta = self.next_slot;
        let phi = self.next_slot + 1;
        self.next_slot += 2;
        self.ops.push(GateOp::Ep {
            qa,
            qb: qa + 1,
            theta,
            phi,
        });
    }
}

/// Build the number-preserving brickwork ansatz for a lattice: a global
/// Z-rotation prelude, then `layers` repetitions of (onsite, odd-column
/// horizontal, odd-row vertical, even-column horizontal, even-row vertical)
/// pair-gate groups over both spin species.
pub fn build_np_ansatz(geometry: &LatticeGeometry, layers: usize) -> Circuit {
    let layout = QubitLayout::interleaved(geometry.n_sites());
    let n_qubits = geometry.n_qubits();
    let initial = checkerboard_occupation(geometry, &layout);
    let mut b = Builder::new();
    for q in 0..n_qubits {
        b.rz(q);
    }
    let bond_pairs = |bonds: Vec<Bond>| -> Vec<(usize, usize)> {
        let mut pairs = Vec::with_capacity(bonds.len() * 2);
        for bond in bonds {
            for spin in [Spin::Up, Spin::Down] {
                pairs.push((layout.qubit(bond.a, spin), layout.qubit(bond.b, spin)));
            }
        }
        pairs
    };
    for _ in 0..layers {
        for lin in 1..=geometry.n_sites() {
            b.routed_np(layout.qubit(lin, Spin::Up), layout.qubit(lin, Spin::Down));
        }
        for group in [
            geometry.h1_bonds(),
            geometry.v1_bonds(),
            geometry.h2_bonds(),
            geometry.v2_bonds(),
        ] {
            for (qa, qb) in bond_pairs(group) {
                b.routed_np(qa, qb);
            }
        }
    }
    debug_assert_eq!(b.next_slot, np_param_count(geometry, layers));
    Circuit {
        n_qubits,
        n_params: b.next_slot,
        initial_occupations: initial,
        ops: b.ops,
    }
}

/// Build the phase-split ladder ansatz: Z rotations on every qubit, `layers`
/// sweeps of pair gates on ascending adjacent pairs, Z rotations again.
pub fn build_ep_ansatz(geometry: &LatticeGeometry, layers: usize) -> Circuit {
    let layout = QubitLayout::interleaved(geometry.n_sites());
    let n_qubits = geometry.n_qubits();
    let initial = checkerboard_occupation(geometry, &layout);
    let mut b = Builder::new();
    for q in 0..n_qubits {
        b.rz(q);
    }
    for _ in 0..layers {
        for qa in 0..n_qubits - 1 {
            b.ep(qa);
        }
    }
    for q in 0..n_qubits {
        b.rz(q);
    }
    debug_assert_eq!(b.next_slot, ep_param_count(geometry, layers));
    Circuit {
        n_qubits,
        n_params: b.next_slot,
        initial_occupations: initial,
        ops: b.ops,
    }
}

/// Build the unitary coupled-cluster circuit from the checkerboard
/// reference: all spin-conserving single excitations in ascending
/// `(occupied, virtual)` order, then all spin-conserving double excitations
/// in ascending `(o1, o2, v1, v2)` order, one exact factor each.
pub fn build_uccsd_ansatz(geometry: &LatticeGeometry) -> Circuit {
    let layout = QubitLayout::interleaved(geometry.n_sites());
    let n_qubits = geometry.n_qubits();
    let initial = checkerboard_occupation(geometry, &layout);
    let occupied: Vec<usize> = (0..n_qubits).filter(|&m| initial[m] == 1).collect();
    let virtuals: Vec<usize> = (0..n_qubits).filter(|&m| initial[m] == 0).collect();
    let spin = |m: usize| m % 2;

    let mut b = Builder::new();
    for &o in &occupied {
        for &v in &virtuals {
            if spin(o) == spin(v) {
                let slot = b.next_slot;
                b.next_slot += 1;
                b.ops.push(GateOp::UccSingle { o, v, slot });
            }
        }
    }
    for (i, &o1) in occupied.iter().enumerate() {
        for &o2 in &occupied[i + 1..] {
            for (j, &v1) in virtuals.iter().enumerate() {
                for &v2 in &virtuals[j + 1..] {
                    let spins_match = (spin(o1) + spin(o2)) == (spin(v1) + spin(v2));
                    if spins_match {
                        let slot = b.next_slot;
                        b.next_slot += 1;
                        b.ops.push(GateOp::UccDouble { o1, o2, v1, v2, slot });
                    }
                }
            }
        }
    }
    Circuit {
        n_qubits,
        n_params: b.next_slot,
        initial_occupations: initial,
        ops: b.ops,
    }
}
