//! Jordan–Wigner transformation of Hubbard models onto qubit operators.
//!
//! Conventions: qubit `q` carries the mode the layout assigns to it, bit 1
//! is occupied, `n = (I - Z)/2`, and the parity strings run along qubit
//! order. The symmetrized hopping maps as
//!
//! ```text
//! amp (c†_p c_q + c†_q c_p)  ->  amp/2 (X_lo Z... X_hi + Y_lo Z... Y_hi)
//! ```
//!
//! with `Z` on every qubit strictly between `lo = min(p,q)` and
//! `hi = max(p,q)`; the symmetrization cancels any direction-dependent sign.
//! Density terms are diagonal and map to `I`/`Z` combinations, so every
//! coefficient stays real. The module's tests validate all of this against
//! the occupation-algebra oracle in [`crate::dense`] rather than against a
//! second Pauli implementation.

use crate::error::{Error, Result};
use crate::lattice::{QubitLayout, Spin};
use crate::model::{mode_index, FermionTerm, HubbardModel};
use crate::pauli::{Pauli, PauliSum};

/// Add `amp (c†_p c_q + h.c.)` in qubit indices to `h`.
fn add_hopping(h: &mut PauliSum, p: usize, q: usize, amp: f64) -> Result<()> {
    let (lo, hi) = (p.min(q), p.max(q));
    let mut x_string = vec![Pauli::I; h.n_qubits()];
    let mut y_string = vec![Pauli::I; h.n_qubits()];
    x_string[lo] = Pauli::X;
    x_string[hi] = Pauli::X;
    y_string[lo] = Pauli::Y;
    y_string[hi] = Pauli::Y;
    for z in lo + 1..hi {
        x_string[z] = Pauli::Z;
        y_string[z] = Pauli::Z;
    }
    h.add(amp / 2.0, x_string)?;
    h.add(amp / 2.0, y_string)
}

/// Add `amp * n_q` (qubit index) to `h`.
fn add_number(h: &mut PauliSum, q: usize, amp: f64) -> Result<()> {
    h.add_sparse(amp / 2.0, &[])?;
    h.add_sparse(-amp / 2.0, &[(q, Pauli::Z)])
}

/// Add `amp * n_p n_q` (distinct qubit indices) to `h`.
fn add_number_number(h: &mut PauliSum, p: usize, q: usize, amp: f64) -> Result<()> {
    h.add_sparse(amp / 4.0, &[])?;
    h.add_sparse(-amp / 4.0, &[(p, Pauli::Z)])?;
    h.add_sparse(-amp / 4.0, &[(q, Pauli::Z)])?;
    h.add_sparse(amp / 4.0, &[(p, Pauli::Z), (q, Pauli::Z)])
}

/// Jordan–Wigner image of the model under a layout. The scalar piece of the
/// interaction terms is kept, so eigenvalues of the result are absolute
/// energies, directly comparable across encodings.
pub fn jordan_wigner(model: &HubbardModel, layout: &QubitLayout) -> Result<PauliSum> {
    let nq = model.n_qubits();
    if layout.n_qubits() != nq {
        return Err(Error::domain("layout size does not match model"));
    }
    let mut h = PauliSum::new(nq);
    for term in model.terms() {
        match term {
            FermionTerm::Hop { a, b, amp } => {
                add_hopping(&mut h, layout.qubit_of_mode(a), layout.qubit_of_mode(b), amp)?;
            }
            FermionTerm::Occ { mode, amp } => {
                add_number(&mut h, layout.qubit_of_mode(mode), amp)?;
            }
            FermionTerm::OccOcc { a, b, amp } => {
                add_number_number(
                    &mut h,
                    layout.qubit_of_mode(a),
                    layout.qubit_of_mode(b),
                    amp,
                )?;
            }
        }
    }
    Ok(h)
}

/// Occupation-number operator `n_q` for one qubit.
pub fn number_operator(n_qubits: usize, qubit: usize) -> Result<PauliSum> {
    let mut h = PauliSum::new(n_qubits);
    add_number(&mut h, qubit, 1.0)?;
    Ok(h)
}

/// Total particle number `Σ_q n_q`.
pub fn total_number_operator(n_qubits: usize) -> Result<PauliSum> {
    let mut h = PauliSum::new(n_qubits);
    for q in 0..n_qubits {
        add_number(&mut h, q, 1.0)?;
    }
    Ok(h)
}

/// `S_z` of one lattice site: `(n_up - n_down)/2 = (Z_down - Z_up)/4`.
pub fn spin_z_operator(layout: &QubitLayout, lin: usize) -> Result<PauliSum> {
    let mut h = PauliSum::new(layout.n_qubits());
    h.add_sparse(0.25, &[(layout.qubit(lin, Spin::Down), Pauli::Z)])?;
    h.add_sparse(-0.25, &[(layout.qubit(lin, Spin::Up), Pauli::Z)])?;
    Ok(h)
}

/// Spin correlator `S_z(i) S_z(j)`, valid for `i == j` as well (where
/// `Z² = I` collapses the product to `(I - Z_up Z_down)/8`).
pub fn spin_z_correlation_operator(
    layout: &QubitLayout,
    site_i: usize,
    site_j: usize,
) -> Result<PauliSum> {
    let nq = layout.n_qubits();
    let mut h = PauliSum::new(nq);
    if site_i == site_j {
        h.add_sparse(0.125, &[])?;
        h.add_sparse(
            -0.125,
            &[
                (layout.qubit(site_i, Spin::Up), Pauli::Z),
                (layout.qubit(site_i, Spin::Down), Pauli::Z),
            ],
        )?;
        return Ok(h);
    }
    // (Z_d - Z_u)_i (Z_d - Z_u)_j / 16, four cross terms
    for (spin_i, sign_i) in [(Spin::Down, 1.0), (Spin::Up, -1.0)] {
        for (spin_j, sign_j) in [(Spin::Down, 1.0), (Spin::Up, -1.0)] {
            h.add_sparse(
                sign_i * sign_j / 16.0,
                &[
                    (layout.qubit(site_i, spin_i), Pauli::Z),
                    (layout.qubit(site_j, spin_j), Pauli::Z),
                ],
            )?;
        }
    }
    Ok(h)
}

/// Mode-occupation operator addressed by `(site, spin)` under a layout.
pub fn site_number_operator(layout: &QubitLayout, lin: usize, spin: Spin) -> Result<PauliSum> {
    number_operator(layout.n_qubits(), layout.qubit(lin, spin))
}

/// Convenience re-export of the canonical mode indexing for callers that
/// work with raw modes.
pub fn canonical_mode(lin: usize, spin: Spin) -> usize {
    mode_index(lin, spin)
}
