//! Matrix-product operators with exact particle-number flux labels.
//!
//! Operators arrive as Pauli sums. `X` and `Y` are not number-sharp on their
//! own (each is a sum of a raising and a lowering part), so every Pauli
//! string is first expanded in the `{I, Z, sigma+, sigma-}` basis where each
//! site factor carries a definite charge flux. For number-conserving
//! operators the non-conserving pieces of that expansion cancel exactly
//! between partner strings (e.g. the `XZ..ZX` and `YZ..ZY` halves of a
//! hopping term), and anything left over is rejected as a domain error: this
//! backend is deliberately U(1)-symmetric, like the MPS engine it feeds.
//!
//! Construction places each operator string on its own automaton rail
//! between a shared identity rail (before the string starts) and a shared
//! finished rail (after it ends), then compresses with one exact blocked-QR
//! sweep and one truncating blocked-SVD sweep. Every wire keeps a flux
//! label — the net charge the operator adds to the sites left of the bond —
//! so all factorizations stay charge-blocked and operator application
//! preserves the state's exact bond charges.

use std::collections::BTreeMap;

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{qr_blocked, svd_blocked, Truncation};
use crate::mps::MpsState;
use crate::pauli::{Pauli, PauliSum};
use crate::tensor::{Tensor3, Tensor4, PHYS_DIM};
use crate::C64;

/// Coefficients below this are dropped after the charge-sharp expansion;
/// matches the Pauli-sum merge tolerance.
const SHARP_DROP_TOL: f64 = 1e-14;

/// Relative singular-value cutoff for operator compression. Tighter than the
/// state default because operator compression errors bias every later energy.
const COMPRESS_CUTOFF: f64 = 1e-14;

/// Largest output for [`Mpo::to_dense`]: `4^n` chain contractions.
const MAX_DENSE_MPO_QUBITS: usize = 8;

/// Site factors with definite charge flux.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum SharpOp {
    I,
    Z,
    /// sigma+ = |1><0| (adds a particle, flux +1)
    Plus,
    /// sigma- = |0><1| (removes a particle, flux -1)
    Minus,
}

impl SharpOp {
    fn flux(self) -> i64 {
        match self {
            SharpOp::I | SharpOp::Z => 0,
            SharpOp::Plus => 1,
            SharpOp::Minus => -1,
        }
    }

    /// Matrix element `<p_out| op |p_in>` in the occupation basis.
    fn entry(self, p_out: usize, p_in: usize) -> C64 {
        let v = match (self, p_out, p_in) {
            (SharpOp::I, 0, 0) | (SharpOp::I, 1, 1) => 1.0,
            (SharpOp::Z, 0, 0) => 1.0,
            (SharpOp::Z, 1, 1) => -1.0,
            (SharpOp::Plus, 1, 0) => 1.0,
            (SharpOp::Minus, 0, 1) => 1.0,
            _ => 0.0,
        };
        C64::new(v, 0.0)
    }
}

/// Expand a Pauli sum into merged charge-sharp strings.
fn sharp_strings(h: &PauliSum) -> Result<BTreeMap<Vec<SharpOp>, C64>> {
    let mut merged: BTreeMap<Vec<SharpOp>, C64> = BTreeMap::new();
    for (coeff, ops) in h.iter() {
        // branch over the raising/lowering parts of each X and Y
        let mut partial: Vec<(Vec<SharpOp>, C64)> =
            vec![(Vec::with_capacity(ops.len()), C64::new(coeff, 0.0))];
        for &p in ops {
            let choices: &[(SharpOp, C64)] = match p {
                Pauli::I => &[(SharpOp::I, C64::new(1.0, 0.0))],
                Pauli::Z => &[(SharpOp::Z, C64::new(1.0, 0.0))],
                Pauli::X => &[
                    (SharpOp::Plus, C64::new(1.0, 0.0)),
                    (SharpOp::Minus, C64::new(1.0, 0.0)),
                ],
                Pauli::Y => &[
                    (SharpOp::Plus, C64::new(0.0, 1.0)),
                    (SharpOp::Minus, C64::new(0.0, -1.0)),
                ],
            };
            let mut next = Vec::with_capacity(partial.len() * choices.len());
            for (prefix, c) in &partial {
                for &(op, factor) in choices {
                    let mut s = prefix.clone();
                    s.push(op);
                    next.push((s, c * factor));
                }
            }
            partial = next;
        }
        for (s, c) in partial {
            let slot = merged.entry(s).or_insert(C64::new(0.0, 0.0));
            *slot += c;
        }
    }
    merged.retain(|_, c| c.norm() >= SHARP_DROP_TOL);
    for s in merged.keys() {
        let net: i64 = s.iter().map(|op| op.flux()).sum();
        if net != 0 {
            return Err(Error::domain(
                "operator does not conserve particle number",
            ));
        }
    }
    Ok(merged)
}

/// A matrix-product operator over qubits.
#[derive(Clone, Debug)]
pub struct Mpo {
    tensors: Vec<Tensor4>,
    /// `n + 1` label vectors; `flux[i][w]` is the net charge the operator
    /// adds to sites left of bond `i` along wire `w`. Edges are `[0]`.
    flux: Vec<Vec<i64>>,
}

impl Mpo {
    /// Build a compressed MPO from a number-conserving Pauli sum.
    pub fn from_pauli_sum(h: &PauliSum) -> Result<Self> {
        let n = h.n_qubits();
        if n == 0 {
            return Err(Error::domain("operator needs at least one qubit"));
        }
        let strings = sharp_strings(h)?;

        // --- automaton assembly -----------------------------------------
        // Wire 0 on every bond is the identity rail S (term not yet
        // started); wire 1 on interior bonds is the finished rail F. The
        // left edge holds only S, the right edge only F.
        let mut flux: Vec<Vec<i64>> = Vec::with_capacity(n + 1);
        flux.push(vec![0]);
        for _ in 1..n {
            flux.push(vec![0, 0]);
        }
        flux.push(vec![0]);
        let f_idx = |bond: usize| if bond == n { 0 } else { 1 };

        // transitions[site] = (row, col, op, scale)
        let mut transitions: Vec<Vec<(usize, usize, SharpOp, C64)>> = vec![Vec::new(); n];
        let one = C64::new(1.0, 0.0);
        for site in 0..n {
            if site + 1 < n {
                transitions[site].push((0, 0, SharpOp::I, one));
            }
            if site >= 1 {
                transitions[site].push((f_idx(site), f_idx(site + 1), SharpOp::I, one));
            }
        }
        for (ops, &coeff) in &strings {
            let first = ops.iter().position(|&op| op != SharpOp::I);
            match first {
                None => {
                    // pure identity: complete immediately at site 0
                    transitions[0].push((0, f_idx(1), SharpOp::I, coeff));
                }
                Some(s0) => {
                    let s1 = ops.iter().rposition(|&op| op != SharpOp::I).unwrap();
                    if s0 == s1 {
                        transitions[s0].push((0, f_idx(s0 + 1), ops[s0], coeff));
                    } else {
                        // dedicated rail through bonds s0+1 ..= s1
                        let mut running_flux = ops[s0].flux();
                        let mut prev_state = flux[s0 + 1].len();
                        flux[s0 + 1].push(running_flux);
                        transitions[s0].push((0, prev_state, ops[s0], coeff));
                        for s in s0 + 1..s1 {
                            running_flux += ops[s].flux();
                            let next_state = flux[s + 1].len();
                            flux[s + 1].push(running_flux);
                            transitions[s].push((prev_state, next_state, ops[s], one));
                            prev_state = next_state;
                        }
                        transitions[s1].push((prev_state, f_idx(s1 + 1), ops[s1], one));
                    }
                }
            }
        }

        let mut tensors: Vec<Tensor4> = Vec::with_capacity(n);
        for site in 0..n {
            let mut w = Tensor4::zeros(flux[site].len(), flux[site + 1].len());
            for &(row, col, op, scale) in &transitions[site] {
                for p_out in 0..PHYS_DIM {
                    for p_in in 0..PHYS_DIM {
                        let e = op.entry(p_out, p_in);
                        if e != C64::new(0.0, 0.0) {
                            let idx = w.index(row, p_out, p_in, col);
                            w.data[idx] += scale * e;
                        }
                    }
                }
            }
            tensors.push(w);
        }

        let mut mpo = Mpo { tensors, flux };
        mpo.compress()?;
        Ok(mpo)
    }

    /// Row labels of a site tensor's left-matrix form, `(wl, p_out, p_in)`
    /// grouped: nonzero entries satisfy
    /// `flux(wl) + p_out - p_in == flux(wr)`.
    fn left_row_labels(&self, site: usize) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.flux[site].len() * 4);
        for &f in &self.flux[site] {
            for p_out in 0..PHYS_DIM {
                for p_in in 0..PHYS_DIM {
                    out.push(f + p_out as i64 - p_in as i64);
                }
            }
        }
        out
    }

    /// Column labels of a site tensor's right-matrix form,
    /// `(p_out, p_in, wr)` grouped.
    fn right_col_labels(&self, site: usize) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.flux[site + 1].len() * 4);
        for p_out in 0..PHYS_DIM {
            for p_in in 0..PHYS_DIM {
                for &f in &self.flux[site + 1] {
                    out.push(f - p_out as i64 + p_in as i64);
                }
            }
        }
        out
    }

    /// One exact rank-reducing sweep left-to-right, then one truncating
    /// sweep right-to-left; both flux-blocked.
    fn compress(&mut self) -> Result<()> {
        let n = self.n_sites();
        for i in 0..n.saturating_sub(1) {
            let m = self.tensors[i].as_left_matrix();
            let rows = self.left_row_labels(i);
            let cols = self.flux[i + 1].clone();
            let qr = qr_blocked(m.as_ref(), &rows, &cols)?;
            self.tensors[i] = Tensor4::from_left_matrix(qr.q.as_ref());
            self.flux[i + 1] = qr.bond_charges;
            let rm = self.tensors[i + 1].as_right_matrix();
            let absorbed = &qr.r * &rm;
            self.tensors[i + 1] = Tensor4::from_right_matrix(absorbed.as_ref());
        }
        for i in (1..n).rev() {
            let m = self.tensors[i].as_right_matrix();
            let rows = self.flux[i].clone();
            let cols = self.right_col_labels(i);
            let svd = svd_blocked(
                m.as_ref(),
                &rows,
                &cols,
                Truncation::new(usize::MAX, COMPRESS_CUTOFF),
            )?;
            self.tensors[i] = Tensor4::from_right_matrix(svd.vh.as_ref());
            self.flux[i] = svd.bond_charges.clone();
            let k = svd.s.len();
            let mut us = Mat::<C64>::zeros(svd.u.nrows(), k);
            for r in 0..svd.u.nrows() {
                for c in 0..k {
                    us[(r, c)] = svd.u[(r, c)] * C64::new(svd.s[c], 0.0);
                }
            }
            let lm = self.tensors[i - 1].as_left_matrix();
            let absorbed = &lm * &us;
            self.tensors[i - 1] = Tensor4::from_left_matrix(absorbed.as_ref());
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn bond_dim(&self, bond: usize) -> usize {
        self.flux[bond].len()
    }

    pub fn max_bond_dim(&self) -> usize {
        (0..=self.n_sites()).map(|b| self.bond_dim(b)).max().unwrap_or(1)
    }

    pub fn flux_labels(&self, bond: usize) -> &[i64] {
        &self.flux[bond]
    }

    pub(crate) fn tensor(&self, site: usize) -> &Tensor4 {
        &self.tensors[site]
    }

    /// `<psi| O |psi>`, which must be real (Hermitian, number-conserving
    /// observables); a non-negligible imaginary part is a numerical-
    /// consistency error.
    pub fn expectation(&self, psi: &MpsState) -> Result<f64> {
        let n = self.n_sites();
        if psi.n_sites() != n {
            return Err(Error::domain("operator/state length mismatch"));
        }
        let mut env = Mat::<C64>::identity(1, 1);
        for i in 0..n {
            env = transfer_left(env.as_ref(), psi.tensor(i), &self.tensors[i], psi.tensor(i));
        }
        let val = env[(0, 0)];
        if !val.re.is_finite() || !val.im.is_finite() {
            return Err(Error::numerical("expectation value is not finite"));
        }
        if val.im.abs() >= 1e-9 {
            return Err(Error::numerical(format!(
                "expectation value has imaginary part {:.3e}",
                val.im
            )));
        }
        Ok(val.re)
    }

    /// Apply the operator to a state by a left-to-right zip-up sweep,
    /// truncating each new bond under `trunc`. Returns the result normalized
    /// to 1 together with its norm `|O psi|`; mid-sweep truncation is most
    /// faithful when `psi` arrives right-canonical (center at site 0).
    pub fn apply(&self, psi: &MpsState, trunc: Truncation) -> Result<(MpsState, f64)> {
        let n = self.n_sites();
        if psi.n_sites() != n {
            return Err(Error::domain("operator/state length mismatch"));
        }
        let mut tensors: Vec<Tensor3> = Vec::with_capacity(n);
        let mut bond_charges: Vec<Vec<i64>> = Vec::with_capacity(n + 1);
        bond_charges.push(vec![0]);
        // carry C[k, (w, r)] holds everything already contracted
        let mut carry = Mat::<C64>::identity(1, 1);
        let mut carry_labels: Vec<i64> = vec![0];
        let mut rel_discard = 0.0;
        for i in 0..n {
            let m = psi.tensor(i);
            let w = &self.tensors[i];
            let (kd, dd, rd) = (carry.nrows(), w.dl, m.dl);
            let (d2, r2) = (w.dr, m.dr);
            debug_assert_eq!(carry.ncols(), dd * rd);

            // contract the carry with the site tensor over r, per p_in
            let mut c_resh = Mat::<C64>::zeros(kd * dd, rd);
            for k in 0..kd {
                for wl in 0..dd {
                    for r in 0..rd {
                        c_resh[(k * dd + wl, r)] = carry[(k, wl * rd + r)];
                    }
                }
            }
            let t1: Vec<Mat<C64>> = (0..PHYS_DIM)
                .map(|p_in| {
                    let mp = m.phys_slice(p_in);
                    &c_resh * &mp
                })
                .collect();

            // contract with the operator tensor over (wl, p_in)
            let mut g = Mat::<C64>::zeros(kd * r2, PHYS_DIM * dd);
            for k in 0..kd {
                for wl in 0..dd {
                    for (p_in, t) in t1.iter().enumerate() {
                        for r in 0..r2 {
                            g[(k * r2 + r, wl * PHYS_DIM + p_in)] = t[(k * dd + wl, r)];
                        }
                    }
                }
            }
            let mut wmat = Mat::<C64>::zeros(PHYS_DIM * dd, PHYS_DIM * d2);
            for wl in 0..dd {
                for p_out in 0..PHYS_DIM {
                    for p_in in 0..PHYS_DIM {
                        for wr in 0..d2 {
                            wmat[(wl * PHYS_DIM + p_in, p_out * d2 + wr)] =
                                w.get(wl, p_out, p_in, wr);
                        }
                    }
                }
            }
            let h2 = &g * &wmat;

            // regroup to theta[(k, p_out), (wr, r')]
            let mut theta = Mat::<C64>::zeros(kd * PHYS_DIM, d2 * r2);
            for k in 0..kd {
                for r in 0..r2 {
                    for p_out in 0..PHYS_DIM {
                        for wr in 0..d2 {
                            theta[(k * PHYS_DIM + p_out, wr * r2 + r)] =
                                h2[(k * r2 + r, p_out * d2 + wr)];
                        }
                    }
                }
            }

            if i + 1 == n {
                debug_assert_eq!(d2 * r2, 1);
                tensors.push(Tensor3::from_left_matrix(theta.as_ref()));
                let edge = self.flux[n][0] + psi.bond_charge_labels(n)[0];
                bond_charges.push(vec![edge]);
            } else {
                let mut row_labels = Vec::with_capacity(kd * PHYS_DIM);
                for &c in &carry_labels {
                    for p in 0..PHYS_DIM {
                        row_labels.push(c + p as i64);
                    }
                }
                let mut col_labels = Vec::with_capacity(d2 * r2);
                for &f in &self.flux[i + 1] {
                    for &q in psi.bond_charge_labels(i + 1) {
                        col_labels.push(f + q);
                    }
                }
                let svd = svd_blocked(theta.as_ref(), &row_labels, &col_labels, trunc)?;
                let kept_sq: f64 = svd.s.iter().map(|s| s * s).sum();
                if svd.discarded_weight > 0.0 {
                    rel_discard += svd.discarded_weight / (kept_sq + svd.discarded_weight);
                }
                tensors.push(Tensor3::from_left_matrix(svd.u.as_ref()));
                bond_charges.push(svd.bond_charges.clone());
                carry_labels = svd.bond_charges;
                let k2 = svd.s.len();
                let mut sv = Mat::<C64>::zeros(k2, d2 * r2);
                for a in 0..k2 {
                    for b in 0..d2 * r2 {
                        sv[(a, b)] = C64::new(svd.s[a], 0.0) * svd.vh[(a, b)];
                    }
                }
                carry = sv;
            }
        }

        let norm = tensors[n - 1].norm();
        if norm == 0.0 {
            return Err(Error::domain("operator annihilates the state"));
        }
        tensors[n - 1].scale(C64::new(1.0 / norm, 0.0));
        let chi = tensors
            .iter()
            .map(|t| t.dl.max(t.dr))
            .max()
            .unwrap_or(1)
            .max(psi.chi_max());
        let mut out = MpsState::from_raw_parts(tensors, bond_charges, n - 1, chi, psi.cutoff())?;
        out.add_truncation_weight(rel_discard);
        Ok((out, norm))
    }

    /// Dense matrix form for small systems (test oracle).
    pub fn to_dense(&self) -> Result<Mat<C64>> {
        let n = self.n_sites();
        if n > MAX_DENSE_MPO_QUBITS {
            return Err(Error::capability(format!(
                "dense operator export supports at most {MAX_DENSE_MPO_QUBITS} qubits, got {n}"
            )));
        }
        let dim = 1usize << n;
        let mut out = Mat::<C64>::zeros(dim, dim);
        for out_idx in 0..dim {
            for in_idx in 0..dim {
                let mut v = Mat::<C64>::identity(1, 1);
                for (site, w) in self.tensors.iter().enumerate() {
                    let p_out = (out_idx >> site) & 1;
                    let p_in = (in_idx >> site) & 1;
                    let slice = w.wire_slice(p_out, p_in);
                    v = &v * &slice;
                }
                out[(out_idx, in_idx)] = v[(0, 0)];
            }
        }
        Ok(out)
    }
}

/// Advance a bra/operator/ket environment one site to the right.
///
/// `env` has rows `(a_bra, w)` and columns `b_ket` for the bond left of the
/// site; the result has the same layout for the bond right of it. The bra
/// tensor enters conjugated.
pub(crate) fn transfer_left(
    env: MatRef<'_, C64>,
    bra: &Tensor3,
    w: &Tensor4,
    ket: &Tensor3,
) -> Mat<C64> {
    let (a, d, b) = (bra.dl, w.dl, ket.dl);
    let (a2, d2, b2) = (bra.dr, w.dr, ket.dr);
    debug_assert_eq!(env.nrows(), a * d);
    debug_assert_eq!(env.ncols(), b);

    let t1: Vec<Mat<C64>> = (0..PHYS_DIM)
        .map(|p_in| {
            let kp = ket.phys_slice(p_in);
            env * kp.as_ref()
        })
        .collect();
    let mut g = Mat::<C64>::zeros(a * b2, PHYS_DIM * d);
    for ai in 0..a {
        for wl in 0..d {
            for (p_in, t) in t1.iter().enumerate() {
                for bj in 0..b2 {
                    g[(ai * b2 + bj, wl * PHYS_DIM + p_in)] = t[(ai * d + wl, bj)];
                }
            }
        }
    }
    let mut wmat = Mat::<C64>::zeros(PHYS_DIM * d, PHYS_DIM * d2);
    for wl in 0..d {
        for p_out in 0..PHYS_DIM {
            for p_in in 0..PHYS_DIM {
                for wr in 0..d2 {
                    wmat[(wl * PHYS_DIM + p_in, p_out * d2 + wr)] = w.get(wl, p_out, p_in, wr);
                }
            }
        }
    }
    let h2 = &g * &wmat;
    let mut k = Mat::<C64>::zeros(a * PHYS_DIM, d2 * b2);
    for ai in 0..a {
        for bj in 0..b2 {
            for p_out in 0..PHYS_DIM {
                for wr in 0..d2 {
                    k[(ai * PHYS_DIM + p_out, wr * b2 + bj)] =
                        h2[(ai * b2 + bj, p_out * d2 + wr)];
                }
            }
        }
    }
    let al = bra.as_left_matrix();
    let ep = al.adjoint() * &k;
    let mut out = Mat::<C64>::zeros(a2 * d2, b2);
    for ai in 0..a2 {
        for wr in 0..d2 {
            for bj in 0..b2 {
                out[(ai * d2 + wr, bj)] = ep[(ai, wr * b2 + bj)];
            }
        }
    }
    out
}

/// Advance a bra/operator/ket environment one site to the left: the mirror
/// of [`transfer_left`], with the same `(a_bra, w) x b_ket` layout.
pub(crate) fn transfer_right(
    env: MatRef<'_, C64>,
    bra: &Tensor3,
    w: &Tensor4,
    ket: &Tensor3,
) -> Mat<C64> {
    let (a, d, b) = (bra.dl, w.dl, ket.dl);
    let (a2, d2, b2) = (bra.dr, w.dr, ket.dr);
    debug_assert_eq!(env.nrows(), a2 * d2);
    debug_assert_eq!(env.ncols(), b2);

    // contract ket over its right bond: t1[p_in][(a2, w2), b]
    let t1: Vec<Mat<C64>> = (0..PHYS_DIM)
        .map(|p_in| {
            let kp = ket.phys_slice(p_in); // b x b2
            let kt = Mat::from_fn(b2, b, |i, j| kp[(j, i)]);
            env * kt.as_ref()
        })
        .collect();
    let mut g = Mat::<C64>::zeros(a2 * b, PHYS_DIM * d2);
    for ai in 0..a2 {
        for w2 in 0..d2 {
            for (p_in, t) in t1.iter().enumerate() {
                for bi in 0..b {
                    g[(ai * b + bi, w2 * PHYS_DIM + p_in)] = t[(ai * d2 + w2, bi)];
                }
            }
        }
    }
    let mut wmat = Mat::<C64>::zeros(PHYS_DIM * d2, PHYS_DIM * d);
    for w2 in 0..d2 {
        for p_out in 0..PHYS_DIM {
            for p_in in 0..PHYS_DIM {
                for wl in 0..d {
                    wmat[(w2 * PHYS_DIM + p_in, p_out * d + wl)] = w.get(wl, p_out, p_in, w2);
                }
            }
        }
    }
    let h2 = &g * &wmat;
    // rows regrouped to (p_out, a2) to match the bra's right-matrix columns
    let mut k = Mat::<C64>::zeros(PHYS_DIM * a2, d * b);
    for ai in 0..a2 {
        for bi in 0..b {
            for p_out in 0..PHYS_DIM {
                for wl in 0..d {
                    k[(p_out * a2 + ai, wl * b + bi)] = h2[(ai * b + bi, p_out * d + wl)];
                }
            }
        }
    }
    let ar = bra.as_right_matrix(); // a x (p_out, a2)
    let ar_conj = Mat::from_fn(ar.nrows(), ar.ncols(), |i, j| ar[(i, j)].conj());
    let ep = &ar_conj * &k; // a x (wl, b)
    let mut out = Mat::<C64>::zeros(a * d, b);
    for ai in 0..a {
        for wl in 0..d {
            for bi in 0..b {
                out[(ai * d + wl, bi)] = ep[(ai, wl * b + bi)];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jw::jordan_wigner;
    use crate::lattice::QubitLayout;
    use crate::linalg::test_gates::{random_np_gate, random_phase_gate};
    use crate::model::ModelConfig;
    use crate::rng::rng_from_seed;

    fn chain_model(nx: usize, ny: usize, u: f64, v: f64, d: f64, seed: u64) -> crate::model::HubbardModel {
        ModelConfig {
            nx,
            ny,
            t: 1.0,
            u,
            v,
            d,
            seed,
        }
        .realize()
        .unwrap()
    }

    /// An entangled random state driven by number-conserving gates.
    fn random_state(n: usize, occ: &[u8], seed: u64) -> MpsState {
        let mut mps = MpsState::product_state(occ, 1 << (n / 2 + 1), 0.0).unwrap();
        let mut rng = rng_from_seed(seed);
        for pass in 0..2 {
            for q in 0..n - 1 {
                let g = random_np_gate(&mut rng);
                mps.apply_two_qubit_gate(q, g.as_ref()).unwrap();
            }
            let g = random_phase_gate(&mut rng);
            mps.apply_one_qubit_gate(pass % n, g.as_ref()).unwrap();
        }
        mps
    }

    #[test]
    fn dimer_mpo_matches_dense_hamiltonian() {
        let model = chain_model(1, 2, 4.0, 0.0, 0.0, 1);
        let h = jordan_wigner(&model, &QubitLayout::interleaved(2)).unwrap();
        let mpo = Mpo::from_pauli_sum(&h).unwrap();
        let want = h.to_dense().unwrap();
        let got = mpo.to_dense().unwrap();
        for i in 0..want.nrows() {
            for j in 0..want.ncols() {
                assert!(
                    (want[(i, j)] - got[(i, j)]).norm() < 1e-12,
                    "entry ({i},{j}) differs"
                );
            }
        }
        assert_eq!(mpo.flux_labels(0), &[0]);
        assert_eq!(mpo.flux_labels(4), &[0]);
    }

    #[test]
    fn disordered_chain_expectation_matches_statevector() {
        let model = chain_model(1, 3, 3.7, 0.9, 0.05, 7);
        let n = 6;
        let h = jordan_wigner(&model, &QubitLayout::interleaved(n / 2)).unwrap();
        let mpo = Mpo::from_pauli_sum(&h).unwrap();
        let psi = random_state(n, &[1, 0, 0, 1, 1, 0], 11);
        let want = h
            .expectation_statevector(&psi.to_statevector().unwrap())
            .unwrap();
        let got = mpo.expectation(&psi).unwrap();
        assert!(
            (want - got).abs() < 1e-10,
            "expectation {got} vs statevector {want}"
        );
    }

    #[test]
    fn zip_up_apply_matches_dense_matvec() {
        let model = chain_model(1, 3, 2.5, 0.0, 0.1, 3);
        let n = 6;
        let h = jordan_wigner(&model, &QubitLayout::interleaved(n / 2)).unwrap();
        let mpo = Mpo::from_pauli_sum(&h).unwrap();
        let mut psi = random_state(n, &[0, 1, 1, 0, 1, 0], 13);
        psi.move_center_to(0).unwrap();
        let (lambda, norm) = mpo.apply(&psi, Truncation::exact(1 << n)).unwrap();
        lambda.check_invariants().unwrap();
        let want = h
            .apply_to_statevector(&psi.to_statevector().unwrap())
            .unwrap();
        let got = lambda.to_statevector().unwrap();
        for (i, (g, w)) in got.iter().zip(want.iter()).enumerate() {
            let diff = (g * C64::new(norm, 0.0) - w).norm();
            assert!(diff < 1e-10, "amplitude {i} differs by {diff:.3e}");
        }
    }

    #[test]
    fn chain_hamiltonian_compresses_tightly() {
        let model = chain_model(1, 4, 6.0, 0.0, 0.0, 1);
        let h = jordan_wigner(&model, &QubitLayout::interleaved(4)).unwrap();
        let mpo = Mpo::from_pauli_sum(&h).unwrap();
        assert!(
            mpo.max_bond_dim() <= 8,
            "hubbard chain operator should compress to a small bond dimension, got {}",
            mpo.max_bond_dim()
        );
        let interior: Vec<i64> = mpo.flux_labels(3).to_vec();
        assert!(interior.contains(&1) && interior.contains(&-1),
            "hopping must put charge flux on interior bonds: {interior:?}");
    }

    #[test]
    fn non_conserving_operator_is_rejected() {
        let mut h = PauliSum::new(2);
        h.add_sparse(1.0, &[(0, Pauli::X)]).unwrap();
        assert!(matches!(Mpo::from_pauli_sum(&h), Err(Error::Domain(_))));
    }

    #[test]
    fn single_site_operator_works() {
        let mut h = PauliSum::new(1);
        h.add_sparse(0.5, &[]).unwrap();
        h.add_sparse(0.25, &[(0, Pauli::Z)]).unwrap();
        let mpo = Mpo::from_pauli_sum(&h).unwrap();
        let dense = mpo.to_dense().unwrap();
        assert!((dense[(0, 0)] - C64::new(0.75, 0.0)).norm() < 1e-14);
        assert!((dense[(1, 1)] - C64::new(0.25, 0.0)).norm() < 1e-14);
        let psi = MpsState::product_state(&[1], 1, 0.0).unwrap();
        assert!((mpo.expectation(&psi).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn transfer_directions_agree() {
        // contracting <psi|H|psi> from the left must equal contracting from
        // the right
        let model = chain_model(1, 2, 1.5, 0.4, 0.0, 2);
        let n = 4;
        let h = jordan_wigner(&model, &QubitLayout::interleaved(n / 2)).unwrap();
        let mpo = Mpo::from_pauli_sum(&h).unwrap();
        let psi = random_state(n, &[1, 0, 1, 0], 17);
        let mut left = Mat::<C64>::identity(1, 1);
        for i in 0..n {
            left = transfer_left(left.as_ref(), psi.tensor(i), mpo.tensor(i), psi.tensor(i));
        }
        let mut right = Mat::<C64>::identity(1, 1);
        for i in (0..n).rev() {
            right = transfer_right(right.as_ref(), psi.tensor(i), mpo.tensor(i), psi.tensor(i));
        }
        assert!((left[(0, 0)] - right[(0, 0)]).norm() < 1e-11);
    }
}
