//! Pauli-string operators with real coefficients.
//!
//! Every operator produced by the Jordan–Wigner map of a Hermitian
//! second-quantized Hamiltonian has real Pauli coefficients, so [`PauliSum`]
//! stores `f64` weights; attempting to add a complex weight is a type error
//! by construction. Terms are kept merged (one entry per distinct string)
//! and near-zero weights are dropped as they appear.
//!
//! Statevector conventions (shared with the dense backend): amplitudes are
//! little-endian, qubit `q` is bit `q` of the basis index, `|1>` means the
//! mode is occupied, and `Z |1> = -|1>`.

use std::collections::BTreeMap;
use std::fmt;

use faer::Mat;

use crate::error::{Error, Result};
use crate::C64;

/// Threshold below which merged coefficients are considered exact
/// cancellations and removed.
const DROP_TOL: f64 = 1e-14;

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// One-letter name.
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A merged sum of Pauli strings with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<Vec<Pauli>, f64>,
}

impl PauliSum {
    /// Empty operator on `n_qubits`.
    pub fn new(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    /// Number of qubits the operator acts on.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of distinct stored strings.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when no terms are stored (the zero operator).
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `coeff * string`, merging with an existing identical string.
    /// The string must cover every qubit (use [`Pauli::I`] for bystanders).
    pub fn add(&mut self, coeff: f64, ops: Vec<Pauli>) -> Result<()> {
        if ops.len() != self.n_qubits {
            return Err(Error::domain(format!(
                "Pauli string length {} does not match operator size {}",
                ops.len(),
                self.n_qubits
            )));
        }
        if !coeff.is_finite() {
            return Err(Error::domain(format!("non-finite coefficient {coeff}")));
        }
        let merged = self.terms.get(&ops).copied().unwrap_or(0.0) + coeff;
        if merged.abs() < DROP_TOL {
            self.terms.remove(&ops);
        } else {
            self.terms.insert(ops, merged);
        }
        Ok(())
    }

    /// Convenience: add `coeff` times single-qubit operators at given
    /// positions (identity elsewhere).
    pub fn add_sparse(&mut self, coeff: f64, placed: &[(usize, Pauli)]) -> Result<()> {
        let mut ops = vec![Pauli::I; self.n_qubits];
        for &(q, p) in placed {
            if q >= self.n_qubits {
                return Err(Error::domain(format!(
                    "qubit {q} out of range for {}-qubit operator",
                    self.n_qubits
                )));
            }
            if ops[q] != Pauli::I {
                return Err(Error::domain(format!("duplicate qubit {q} in sparse term")));
            }
            ops[q] = p;
        }
        self.add(coeff, ops)
    }

    /// Iterate `(coefficient, string)` in deterministic (lexicographic)
    /// order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &[Pauli])> {
        self.terms.iter().map(|(k, &v)| (v, k.as_slice()))
    }

    /// Coefficient of the all-identity string (the scalar offset).
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .get(&vec![Pauli::I; self.n_qubits])
            .copied()
            .unwrap_or(0.0)
    }

    /// Add another sum, scaled.
    pub fn add_scaled(&mut self, scale: f64, other: &PauliSum) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::domain("operator sizes differ"));
        }
        for (coeff, ops) in other.iter() {
            self.add(scale * coeff, ops.to_vec())?;
        }
        Ok(())
    }

    /// Apply to a little-endian statevector (matrix-free).
    pub fn apply_to_statevector(&self, psi: &[C64]) -> Result<Vec<C64>> {
        let dim = 1usize
            .checked_shl(self.n_qubits as u32)
            .ok_or_else(|| Error::capability("statevector dimension overflows"))?;
        if psi.len() != dim {
            return Err(Error::domain(format!(
                "statevector length {} does not match 2^{}",
                psi.len(),
                self.n_qubits
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (coeff, ops) in self.iter() {
            // Precompute which qubits flip and which contribute phases.
            let mut flip_mask = 0usize;
            for (q, &p) in ops.iter().enumerate() {
                if matches!(p, Pauli::X | Pauli::Y) {
                    flip_mask |= 1 << q;
                }
            }
            for (b, &amp) in psi.iter().enumerate() {
                if amp == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut phase = C64::new(coeff, 0.0);
                for (q, &p) in ops.iter().enumerate() {
                    let bit = (b >> q) & 1;
                    match p {
                        Pauli::I | Pauli::X => {}
                        Pauli::Y => {
                            // Y|0> = i|1>, Y|1> = -i|0>
                            phase *= if bit == 0 {
                                C64::new(0.0, 1.0)
                            } else {
                                C64::new(0.0, -1.0)
                            };
                        }
                        Pauli::Z => {
                            if bit == 1 {
                                phase = -phase;
                            }
                        }
                    }
                }
                out[b ^ flip_mask] += phase * amp;
            }
        }
        Ok(out)
    }

    /// `<psi| H |psi> / <psi|psi>` for a dense state. The imaginary part is
    /// a pure numerical residual for Hermitian input and must stay tiny.
    pub fn expectation_statevector(&self, psi: &[C64]) -> Result<f64> {
        let h_psi = self.apply_to_statevector(psi)?;
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0f64;
        for (a, b) in psi.iter().zip(h_psi.iter()) {
            num += a.conj() * b;
            den += a.norm_sqr();
        }
        if den == 0.0 {
            return Err(Error::domain("expectation of the zero vector"));
        }
        let val = num / den;
        if val.im.abs() >= 1e-9 {
            return Err(Error::numerical(format!(
                "expectation has imaginary part {:.3e}",
                val.im
            )));
        }
        Ok(val.re)
    }

    /// Dense matrix form, little-endian. Guarded to small systems — the
    /// dense form is for oracles and tests, not production paths.
    pub fn to_dense(&self) -> Result<Mat<C64>> {
        if self.n_qubits > 10 {
            return Err(Error::capability(format!(
                "dense operator limited to 10 qubits, got {}",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut mat = Mat::<C64>::zeros(dim, dim);
        // Column j of the matrix is H applied to basis state j.
        let mut basis = vec![C64::new(0.0, 0.0); dim];
        for j in 0..dim {
            basis[j] = C64::new(1.0, 0.0);
            let col = self.apply_to_statevector(&basis)?;
            basis[j] = C64::new(0.0, 0.0);
            for (i, &v) in col.iter().enumerate() {
                mat[(i, j)] = v;
            }
        }
        Ok(mat)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (coeff, ops) in self.iter() {
            if !first {
                write!(f, " ")?;
            }
            let sign = if coeff >= 0.0 { "+" } else { "-" };
            let string: String = ops.iter().map(|p| p.symbol()).collect();
            write!(f, "{sign} {:.6} {string}", coeff.abs())?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn merging_and_cancellation() {
        let mut h = PauliSum::new(2);
        h.add(0.5, vec![Pauli::X, Pauli::I]).unwrap();
        h.add(0.25, vec![Pauli::X, Pauli::I]).unwrap();
        h.add(1.0, vec![Pauli::Z, Pauli::Z]).unwrap();
        h.add(-1.0, vec![Pauli::Z, Pauli::Z]).unwrap();
        assert_eq!(h.len(), 1);
        let (coeff, ops) = h.iter().next().unwrap();
        assert_eq!(coeff, 0.75);
        assert_eq!(ops, &[Pauli::X, Pauli::I]);
        assert!(h.add(1.0, vec![Pauli::X]).is_err());
    }

    #[test]
    fn single_qubit_matrices_are_textbook() {
        for (p, want) in [
            (Pauli::X, [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]]),
            (Pauli::Y, [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]]),
            (Pauli::Z, [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]]),
        ] {
            let mut h = PauliSum::new(1);
            h.add(1.0, vec![p]).unwrap();
            let m = h.to_dense().unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(m[(i, j)], want[i][j], "{p:?} entry ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn little_endian_qubit_order() {
        // Z on qubit 0 of two qubits: diagonal (+1, -1, +1, -1) over b = 0..3
        let mut h = PauliSum::new(2);
        h.add_sparse(1.0, &[(0, Pauli::Z)]).unwrap();
        let m = h.to_dense().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);

        // X on qubit 1 maps |00> -> |10> i.e. index 0 -> 2
        let mut h = PauliSum::new(2);
        h.add_sparse(1.0, &[(1, Pauli::X)]).unwrap();
        let psi = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = h.apply_to_statevector(&psi).unwrap();
        assert_eq!(out[2], c(1.0, 0.0));
        assert_eq!(out[0], c(0.0, 0.0));
    }

    #[test]
    fn matvec_matches_dense_on_random_state() {
        let mut h = PauliSum::new(3);
        h.add_sparse(0.7, &[(0, Pauli::X), (1, Pauli::Y)]).unwrap();
        h.add_sparse(-0.3, &[(1, Pauli::Z), (2, Pauli::Y)]).unwrap();
        h.add_sparse(0.11, &[(0, Pauli::Z), (1, Pauli::X), (2, Pauli::X)])
            .unwrap();
        h.add_sparse(1.3, &[]).unwrap();
        let m = h.to_dense().unwrap();

        let mut rng = crate::rng::rng_from_seed(11);
        let psi: Vec<C64> = (0..8)
            .map(|_| {
                c(
                    crate::rng::standard_normal(&mut rng),
                    crate::rng::standard_normal(&mut rng),
                )
            })
            .collect();
        let fast = h.apply_to_statevector(&psi).unwrap();
        for i in 0..8 {
            let mut slow = c(0.0, 0.0);
            for j in 0..8 {
                slow += m[(i, j)] * psi[j];
            }
            assert!((slow - fast[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn expectation_is_real_and_normalized() {
        let mut h = PauliSum::new(1);
        h.add(2.0, vec![Pauli::Z]).unwrap();
        // unnormalized |0> scaled by 3: expectation still +2
        let psi = vec![c(3.0, 0.0), c(0.0, 0.0)];
        assert!((h.expectation_statevector(&psi).unwrap() - 2.0).abs() < 1e-14);
        let psi1 = vec![c(0.0, 0.0), c(1.0, 0.0)];
        assert!((h.expectation_statevector(&psi1).unwrap() + 2.0).abs() < 1e-14);
        assert!(h.expectation_statevector(&[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn dense_form_is_capability_limited() {
        let h = PauliSum::new(11);
        assert!(matches!(h.to_dense(), Err(Error::Capability(_))));
    }
}
