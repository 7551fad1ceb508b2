//! The parametrized gate set used by the variational circuits.
//!
//! All gates conserve particle number, so they are block-diagonal over the
//! occupation sectors `{00}, {01, 10}, {11}` of a qubit pair (two-qubit
//! basis index `p_left * 2 + p_right`). Chain-adjacent qubits host adjacent
//! fermionic modes under the Jordan-Wigner convention, which makes these
//! small matrices exact fermionic operations with no string corrections:
//!
//! * [`np_gate`] — `exp(i theta (c_p^dag c_q + h.c.)) * exp(i phi n_p n_q)`
//!   for adjacent modes: a hopping rotation in the single-particle sector
//!   plus an interaction phase on double occupation.
//! * [`ep_gate`] — the phase-split variant used by the hardware-efficient
//!   family, identical to `np_gate(-theta/2, -phi)`.
//! * [`fswap`] — swaps two adjacent modes with the fermionic minus sign on
//!   double occupation; routing non-adjacent operations through chains of
//!   these preserves exact fermionic statistics.
//! * [`rz`] — the diagonal one-qubit Z rotation.

use faer::Mat;

use crate::linalg::mat_from_row_major;
use crate::C64;

/// Number-preserving pair gate
/// `exp(i theta (c_p^dag c_q + c_q^dag c_p)) * exp(i phi n_p n_q)` for
/// chain-adjacent modes `(p, q) = (left, right)`.
pub fn np_gate(theta: f64, phi: f64) -> Mat<C64> {
    let zero = C64::new(0.0, 0.0);
    let c = C64::new(theta.cos(), 0.0);
    let s = C64::new(0.0, theta.sin());
    let phase = C64::new(0.0, phi).exp();
    mat_from_row_major(
        4,
        4,
        &[
            C64::new(1.0, 0.0), zero, zero, zero,
            zero, c, s, zero,
            zero, s, c, zero,
            zero, zero, zero, phase,
        ],
    )
}

/// Phase-split pair gate: hopping angle `-theta/2` and interaction phase
/// `-phi`, i.e. exactly [`np_gate`]`(-theta / 2.0, -phi)`.
pub fn ep_gate(theta: f64, phi: f64) -> Mat<C64> {
    np_gate(-theta / 2.0, -phi)
}

/// Fermionic swap of two adjacent modes: a plain swap with a minus sign
/// when both modes are occupied. Involutory.
pub fn fswap() -> Mat<C64> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    mat_from_row_major(
        4,
        4,
        &[
            one, zero, zero, zero,
            zero, zero, one, zero,
            zero, one, zero, zero,
            zero, zero, zero, -one,
        ],
    )
}

/// One-qubit Z rotation `diag(exp(-i theta / 2), exp(i theta / 2))`.
pub fn rz(theta: f64) -> Mat<C64> {
    let zero = C64::new(0.0, 0.0);
    mat_from_row_major(
        2,
        2,
        &[
            C64::new(0.0, -theta / 2.0).exp(), zero,
            zero, C64::new(0.0, theta / 2.0).exp(),
        ],
    )
}

/// Derivative of [`np_gate`] in `theta`.
pub fn np_gate_dtheta(theta: f64, _phi: f64) -> Mat<C64> {
    let zero = C64::new(0.0, 0.0);
    let dc = C64::new(-theta.sin(), 0.0);
    let ds = C64::new(0.0, theta.cos());
    mat_from_row_major(
        4,
        4,
        &[
            zero, zero, zero, zero,
            zero, dc, ds, zero,
            zero, ds, dc, zero,
            zero, zero, zero, zero,
        ],
    )
}

/// Derivative of [`np_gate`] in `phi`.
pub fn np_gate_dphi(_theta: f64, phi: f64) -> Mat<C64> {
    let mut m = Mat::<C64>::zeros(4, 4);
    m[(3, 3)] = C64::new(0.0, 1.0) * C64::new(0.0, phi).exp();
    m
}

/// Derivative of [`ep_gate`] in `theta` (chain rule through the
/// `(-theta/2, -phi)` reparametrization).
pub fn ep_gate_dtheta(theta: f64, phi: f64) -> Mat<C64> {
    let mut m = np_gate_dtheta(-theta / 2.0, -phi);
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] *= C64::new(-0.5, 0.0);
        }
    }
    m
}

/// Derivative of [`ep_gate`] in `phi`.
pub fn ep_gate_dphi(theta: f64, phi: f64) -> Mat<C64> {
    let mut m = np_gate_dphi(-theta / 2.0, -phi);
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] *= C64::new(-1.0, 0.0);
        }
    }
    m
}

/// Derivative of [`rz`] in `theta`.
pub fn rz_dtheta(theta: f64) -> Mat<C64> {
    let zero = C64::new(0.0, 0.0);
    let half_i = C64::new(0.0, 0.5);
    mat_from_row_major(
        2,
        2,
        &[
            -half_i * C64::new(0.0, -theta / 2.0).exp(), zero,
            zero, half_i * C64::new(0.0, theta / 2.0).exp(),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{apply_np_pair, DenseState};
    use crate::rng::{rng_from_seed, standard_normal};

    fn random_dense(n: usize, seed: u64) -> DenseState {
        let mut rng = rng_from_seed(seed);
        let dim = 1 << n;
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(standard_normal(&mut rng), standard_normal(&mut rng)))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<C64> = amps.into_iter().map(|a| a / norm).collect();
        DenseState::from_amplitudes(n, amps).unwrap()
    }

    fn assert_close(a: &DenseState, b: &DenseState, tol: f64, what: &str) {
        for (i, (x, y)) in a.amplitudes().iter().zip(b.amplitudes().iter()).enumerate() {
            let d = (x - y).norm();
            assert!(d <= tol, "{what}: amplitude {i} differs by {d:.3e}");
        }
    }

    #[test]
    fn np_gate_is_the_adjacent_fermionic_pair_rotation() {
        for (seed, theta, phi) in [(1u64, 0.37, -0.9), (2, -1.2, 0.45), (3, 2.6, 1.7)] {
            let mut via_gate = random_dense(2, seed);
            let mut via_fermions = via_gate.clone();
            via_gate
                .apply_two_qubit_gate(0, 1, np_gate(theta, phi).as_ref())
                .unwrap();
            apply_np_pair(&mut via_fermions, 0, 1, theta, phi).unwrap();
            assert_close(&via_gate, &via_fermions, 1e-12, "adjacent pair");
        }
    }

    #[test]
    fn fswap_routing_reaches_distant_modes() {
        // conjugating by fermionic swaps must reproduce the exact
        // string-corrected pair rotation between non-adjacent modes
        let (theta, phi) = (0.81, -0.33);

        // distance 2: bring mode 2 next to mode 0
        let mut routed = random_dense(3, 11);
        let mut direct = routed.clone();
        routed.apply_two_qubit_gate(1, 2, fswap().as_ref()).unwrap();
        routed
            .apply_two_qubit_gate(0, 1, np_gate(theta, phi).as_ref())
            .unwrap();
        routed.apply_two_qubit_gate(1, 2, fswap().as_ref()).unwrap();
        apply_np_pair(&mut direct, 0, 2, theta, phi).unwrap();
        assert_close(&routed, &direct, 1e-12, "distance 2");

        // distance 3, occupied spectator modes in between
        let mut routed = random_dense(4, 12);
        let mut direct = routed.clone();
        routed.apply_two_qubit_gate(2, 3, fswap().as_ref()).unwrap();
        routed.apply_two_qubit_gate(1, 2, fswap().as_ref()).unwrap();
        routed
            .apply_two_qubit_gate(0, 1, np_gate(theta, phi).as_ref())
            .unwrap();
        routed.apply_two_qubit_gate(1, 2, fswap().as_ref()).unwrap();
        routed.apply_two_qubit_gate(2, 3, fswap().as_ref()).unwrap();
        apply_np_pair(&mut direct, 0, 3, theta, phi).unwrap();
        assert_close(&routed, &direct, 1e-12, "distance 3");
    }

    #[test]
    fn ep_gate_is_the_rescaled_np_gate() {
        for (theta, phi) in [(0.7, 0.2), (-1.9, 1.4), (3.3, -0.6)] {
            let ep = ep_gate(theta, phi);
            let np = np_gate(-theta / 2.0, -phi);
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(ep[(i, j)], np[(i, j)], "entry ({i},{j})");
                }
            }
        }
    }

    fn assert_identity(m: &Mat<C64>, tol: f64, what: &str) {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                let dev = (m[(i, j)] - C64::new(want, 0.0)).norm();
                assert!(dev <= tol, "{what}: deviates at ({i},{j}) by {dev:.3e}");
            }
        }
    }

    #[test]
    fn gates_are_unitary_and_fswap_is_involutory() {
        for g in [np_gate(0.9, -1.3), ep_gate(2.1, 0.4), fswap()] {
            let gh_g = g.adjoint() * &g;
            assert_identity(&gh_g, 1e-14, "pair gate");
        }
        let r = rz(1.1);
        let rh_r = r.adjoint() * &r;
        assert_identity(&rh_r, 1e-14, "z rotation");

        let f = fswap();
        let f2 = &f * &f;
        assert_identity(&f2, 0.0, "fswap squared");
    }

    #[test]
    fn rz_applies_opposite_half_phases() {
        let r = rz(0.8);
        assert_eq!(r[(0, 0)], C64::new(0.0, -0.4).exp());
        assert_eq!(r[(1, 1)], C64::new(0.0, 0.4).exp());
        assert_eq!(r[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn gate_derivatives_match_central_differences() {
        let h = 1e-6;
        let fd = |plus: Mat<C64>, minus: Mat<C64>| -> Mat<C64> {
            Mat::from_fn(plus.nrows(), plus.ncols(), |i, j| {
                (plus[(i, j)] - minus[(i, j)]) / C64::new(2.0 * h, 0.0)
            })
        };
        let assert_matches = |analytic: &Mat<C64>, numeric: &Mat<C64>, what: &str| {
            for i in 0..analytic.nrows() {
                for j in 0..analytic.ncols() {
                    let dev = (analytic[(i, j)] - numeric[(i, j)]).norm();
                    assert!(dev < 1e-8, "{what}: entry ({i},{j}) off by {dev:.3e}");
                }
            }
        };
        for (theta, phi) in [(0.43, -0.8), (-1.7, 2.2)] {
            assert_matches(
                &np_gate_dtheta(theta, phi),
                &fd(np_gate(theta + h, phi), np_gate(theta - h, phi)),
                "np d/dtheta",
            );
            assert_matches(
                &np_gate_dphi(theta, phi),
                &fd(np_gate(theta, phi + h), np_gate(theta, phi - h)),
                "np d/dphi",
            );
            assert_matches(
                &ep_gate_dtheta(theta, phi),
                &fd(ep_gate(theta + h, phi), ep_gate(theta - h, phi)),
                "ep d/dtheta",
            );
            assert_matches(
                &ep_gate_dphi(theta, phi),
                &fd(ep_gate(theta, phi + h), ep_gate(theta, phi - h)),
                "ep d/dphi",
            );
            assert_matches(
                &rz_dtheta(theta),
                &fd(rz(theta + h), rz(theta - h)),
                "rz d/dtheta",
            );
        }
    }
}
