//! Matrix-product states with exact particle-number bookkeeping.
//!
//! Every bond carries one charge label per bond index: the total number of
//! electrons to the left of that bond for the amplitudes flowing through the
//! index. States start as occupation-basis product states (labels are exact
//! cumulative sums) and every supported gate conserves particle number, so
//! the labels stay exact through the whole simulation — no amplitude ever
//! leaks between charge sectors. All factorizations exploit this through the
//! blocked SVD/QR in [`crate::linalg`], which is where the engine wins its
//! speed: the largest charge block of a bond is far smaller than the bond.
//!
//! Gates that would break number conservation (anything mixing occupation
//! sectors) are rejected as domain errors; this engine is deliberately
//! U(1)-symmetric rather than general.
//!
//! Canonical form: tensors strictly left of `center` are left-isometric,
//! tensors strictly right are right-isometric, and the center tensor carries
//! the norm, which is held at 1 (two-site gates renormalize away any
//! truncation loss, and record the lost weight separately).

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{
    debug_check_unitary, eigh, lq_blocked, qr_blocked, svd_blocked, Truncation,
};
use crate::tensor::{Tensor3, PHYS_DIM};
use crate::C64;

/// Largest supported statevector export, matching the dense backend.
use crate::dense::MAX_DENSE_QUBITS;

/// Occupation sector of each two-qubit gate basis index `p_left * 2 +
/// p_right`.
const GATE_SECTOR: [u8; 4] = [0, 1, 1, 2];

/// Tolerance for declaring a gate entry "structurally zero" when validating
/// number conservation. Analytic gates have exact zeros; this only tolerates
/// representation noise.
const GATE_STRUCTURE_TOL: f64 = 1e-12;

/// A matrix-product state over qubits (physical dimension 2).
#[derive(Clone, Debug)]
pub struct MpsState {
    tensors: Vec<Tensor3>,
    /// `n + 1` label vectors; `bond_charges[i][a]` is the electron count to
    /// the left of bond `i` carried by bond index `a`.
    bond_charges: Vec<Vec<i64>>,
    center: usize,
    chi_max: usize,
    cutoff: f64,
    /// Accumulated relative truncation weight (sum over gate applications,
    /// each normalized by the pre-truncation weight).
    truncation_weight: f64,
}

impl MpsState {
    /// Occupation-basis product state with all bonds of dimension 1.
    pub fn product_state(occupations: &[u8], chi_max: usize, cutoff: f64) -> Result<Self> {
        let n = occupations.len();
        if n == 0 {
            return Err(Error::domain("state needs at least one site"));
        }
        if chi_max == 0 {
            return Err(Error::domain("bond-dimension cap must be at least 1"));
        }
        if !(0.0..1.0).contains(&cutoff) {
            return Err(Error::domain(format!(
                "truncation cutoff must lie in [0, 1), got {cutoff}"
            )));
        }
        let mut tensors = Vec::with_capacity(n);
        let mut bond_charges = Vec::with_capacity(n + 1);
        let mut running = 0i64;
        bond_charges.push(vec![0]);
        for (q, &bit) in occupations.iter().enumerate() {
            if bit > 1 {
                return Err(Error::domain(format!("occupation at site {q} must be 0 or 1")));
            }
            let mut t = Tensor3::zeros(1, 1);
            t.set(0, bit as usize, 0, C64::new(1.0, 0.0));
            tensors.push(t);
            running += bit as i64;
            bond_charges.push(vec![running]);
        }
        Ok(MpsState {
            tensors,
            bond_charges,
            center: 0,
            chi_max,
            cutoff,
            truncation_weight: 0.0,
        })
    }

    /// Assemble a state from prebuilt tensors and labels. For solver code
    /// (MPO application, DMRG) that constructs canonical forms itself; only
    /// shape consistency is validated here — callers guarantee the canonical
    /// and charge invariants, which tests enforce via
    /// [`Self::check_invariants`].
    pub(crate) fn from_raw_parts(
        tensors: Vec<Tensor3>,
        bond_charges: Vec<Vec<i64>>,
        center: usize,
        chi_max: usize,
        cutoff: f64,
    ) -> Result<Self> {
        let n = tensors.len();
        if n == 0 || bond_charges.len() != n + 1 || center >= n {
            return Err(Error::domain("inconsistent tensor/label/center shapes"));
        }
        for (i, t) in tensors.iter().enumerate() {
            if t.dl != bond_charges[i].len() || t.dr != bond_charges[i + 1].len() {
                return Err(Error::domain(format!(
                    "site {i}: tensor dims do not match bond label counts"
                )));
            }
        }
        Ok(MpsState {
            tensors,
            bond_charges,
            center,
            chi_max,
            cutoff,
            truncation_weight: 0.0,
        })
    }

    pub(crate) fn add_truncation_weight(&mut self, w: f64) {
        self.truncation_weight += w;
    }

    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn chi_max(&self) -> usize {
        self.chi_max
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// Dimension of bond `i` (left of site `i`), `0..=n_sites`.
    pub fn bond_dim(&self, bond: usize) -> usize {
        self.bond_charges[bond].len()
    }

    /// Largest interior bond dimension.
    pub fn max_bond_dim(&self) -> usize {
        (0..=self.n_sites()).map(|b| self.bond_dim(b)).max().unwrap_or(1)
    }

    /// Charge labels on bond `i`.
    pub fn bond_charge_labels(&self, bond: usize) -> &[i64] {
        &self.bond_charges[bond]
    }

    /// Accumulated relative truncation weight over all gate applications.
    pub fn truncation_weight(&self) -> f64 {
        self.truncation_weight
    }

    /// Raise (or lower) the bond cap for future operations; existing bonds
    /// above a lowered cap are not retroactively truncated.
    pub fn set_chi_max(&mut self, chi_max: usize) -> Result<()> {
        if chi_max == 0 {
            return Err(Error::domain("bond-dimension cap must be at least 1"));
        }
        self.chi_max = chi_max;
        Ok(())
    }

    /// Direct access to a site tensor (read-only; used by solvers and
    /// gradient environments).
    pub fn tensor(&self, site: usize) -> &Tensor3 {
        &self.tensors[site]
    }

    /// Replace a site tensor and its adjacent bond labels. For solver code
    /// (DMRG) that builds tensors itself; the caller is responsible for
    /// keeping the canonical/charge invariants, which stay enforced by
    /// [`Self::check_invariants`] in tests and debug paths.
    pub(crate) fn replace_site(
        &mut self,
        site: usize,
        tensor: Tensor3,
        left_labels: Option<Vec<i64>>,
        right_labels: Option<Vec<i64>>,
    ) {
        if let Some(l) = left_labels {
            self.bond_charges[site] = l;
        }
        if let Some(r) = right_labels {
            self.bond_charges[site + 1] = r;
        }
        self.tensors[site] = tensor;
    }

    pub(crate) fn set_center(&mut self, site: usize) {
        debug_assert!(site < self.n_sites());
        self.center = site;
    }

    /// Charge labels of the `(l, p)`-grouped rows of a site's left matrix.
    fn left_row_charges(&self, site: usize) -> Vec<i64> {
        let ql = &self.bond_charges[site];
        let mut out = Vec::with_capacity(ql.len() * PHYS_DIM);
        for &c in ql {
            for p in 0..PHYS_DIM {
                out.push(c + p as i64);
            }
        }
        out
    }

    /// Charge labels of the `(p, r)`-grouped columns of a site's right
    /// matrix.
    fn right_col_charges(&self, site: usize) -> Vec<i64> {
        let qr = &self.bond_charges[site + 1];
        let mut out = Vec::with_capacity(qr.len() * PHYS_DIM);
        for p in 0..PHYS_DIM {
            for &c in qr {
                out.push(c - p as i64);
            }
        }
        out
    }

    /// Move the orthogonality center to `site` by QR (rightward) / LQ
    /// (leftward) sweeps. Exact: no truncation happens here.
    pub fn move_center_to(&mut self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            return Err(Error::domain(format!("center target {site} out of range")));
        }
        while self.center < site {
            let i = self.center;
            let m = self.tensors[i].as_left_matrix();
            let row_charges = self.left_row_charges(i);
            let col_charges = self.bond_charges[i + 1].clone();
            let qr = qr_blocked(m.as_ref(), &row_charges, &col_charges)?;
            self.tensors[i] = Tensor3::from_left_matrix(qr.q.as_ref());
            let rm = self.tensors[i + 1].as_right_matrix();
            let absorbed = &qr.r * &rm;
            self.tensors[i + 1] = Tensor3::from_right_matrix(absorbed.as_ref());
            self.bond_charges[i + 1] = qr.bond_charges;
            self.center = i + 1;
        }
        while self.center > site {
            let i = self.center;
            let m = self.tensors[i].as_right_matrix();
            let row_charges = self.bond_charges[i].clone();
            let col_charges = self.right_col_charges(i);
            let lq = lq_blocked(m.as_ref(), &row_charges, &col_charges)?;
            self.tensors[i] = Tensor3::from_right_matrix(lq.q.as_ref());
            let lm = self.tensors[i - 1].as_left_matrix();
            let absorbed = &lm * &lq.l;
            self.tensors[i - 1] = Tensor3::from_left_matrix(absorbed.as_ref());
            self.bond_charges[i] = lq.bond_charges;
            self.center = i - 1;
        }
        Ok(())
    }

    /// Apply a 2x2 gate to one site. The gate must be unitary (debug-checked)
    /// and number-conserving, i.e. diagonal; phases never disturb canonical
    /// form, so no center movement is needed.
    pub fn apply_one_qubit_gate(&mut self, site: usize, g: MatRef<'_, C64>) -> Result<()> {
        if site >= self.n_sites() {
            return Err(Error::domain(format!("site {site} out of range")));
        }
        if g.nrows() != 2 || g.ncols() != 2 {
            return Err(Error::domain("one-qubit gate must be 2x2"));
        }
        if g[(0, 1)].norm() > GATE_STRUCTURE_TOL || g[(1, 0)].norm() > GATE_STRUCTURE_TOL {
            return Err(Error::domain(
                "one-qubit gate must conserve occupation (diagonal in the number basis)",
            ));
        }
        debug_check_unitary(g, "one-qubit gate");
        let t = &mut self.tensors[site];
        for l in 0..t.dl {
            for p in 0..PHYS_DIM {
                for r in 0..t.dr {
                    let v = t.get(l, p, r) * g[(p, p)];
                    t.set(l, p, r, v);
                }
            }
        }
        Ok(())
    }

    /// Apply a 4x4 gate to the adjacent pair `(site, site + 1)`; gate basis
    /// index is `p_left * 2 + p_right`. The gate must be unitary
    /// (debug-checked) and block-diagonal over occupation sectors
    /// `{00}, {01, 10}, {11}`. Splits back with the blocked SVD under the
    /// state's `(chi_max, cutoff)` policy and renormalizes, accumulating the
    /// relative discarded weight.
    pub fn apply_two_qubit_gate(&mut self, site: usize, g: MatRef<'_, C64>) -> Result<()> {
        let n = self.n_sites();
        if site + 1 >= n {
            return Err(Error::domain(format!(
                "two-qubit gate needs adjacent pair ({site},{}) inside 0..{n}",
                site + 1
            )));
        }
        if g.nrows() != 4 || g.ncols() != 4 {
            return Err(Error::domain("two-qubit gate must be 4x4"));
        }
        for i in 0..4 {
            for j in 0..4 {
                if GATE_SECTOR[i] != GATE_SECTOR[j] && g[(i, j)].norm() > GATE_STRUCTURE_TOL {
                    return Err(Error::domain(
                        "two-qubit gate must conserve particle number (no mixing between occupation sectors)",
                    ));
                }
            }
        }
        debug_check_unitary(g, "two-qubit gate");

        if self.center < site {
            self.move_center_to(site)?;
        } else if self.center > site + 1 {
            self.move_center_to(site + 1)?;
        }

        // theta[(l, p1), (p2, r)] via one matmul of the two reshapes
        let a = self.tensors[site].as_left_matrix();
        let b = self.tensors[site + 1].as_right_matrix();
        let theta = &a * &b;
        let dl = self.tensors[site].dl;
        let dr = self.tensors[site + 1].dr;

        // contract the gate over the two physical indices
        let mut theta2 = Mat::<C64>::zeros(dl * PHYS_DIM, PHYS_DIM * dr);
        for l in 0..dl {
            for r in 0..dr {
                let mut v_in = [C64::new(0.0, 0.0); 4];
                for p1 in 0..PHYS_DIM {
                    for p2 in 0..PHYS_DIM {
                        v_in[p1 * 2 + p2] = theta[(l * 2 + p1, p2 * dr + r)];
                    }
                }
                for p_out in 0..4 {
                    let mut acc = C64::new(0.0, 0.0);
                    for (p_in, &v) in v_in.iter().enumerate() {
                        acc += g[(p_out, p_in)] * v;
                    }
                    theta2[(l * 2 + p_out / 2, (p_out % 2) * dr + r)] = acc;
                }
            }
        }

        self.set_two_site(
            site,
            theta2.as_ref(),
            Truncation::new(self.chi_max, self.cutoff),
            true,
        )?;
        Ok(())
    }

    /// Split a two-site wavefunction matrix `theta[(l, p1), (p2, r)]` back
    /// into the chain at `(site, site+1)`, truncating the new bond under
    /// `trunc`. The kept spectrum is rescaled so the state norm is
    /// unchanged; the orthogonality center lands on `site+1` when
    /// `center_right`, on `site` otherwise. Returns the relative discarded
    /// weight of this split.
    pub(crate) fn set_two_site(
        &mut self,
        site: usize,
        theta: MatRef<'_, C64>,
        trunc: Truncation,
        center_right: bool,
    ) -> Result<f64> {
        let dl = self.tensors[site].dl;
        let dr = self.tensors[site + 1].dr;
        debug_assert_eq!(theta.nrows(), dl * PHYS_DIM);
        debug_assert_eq!(theta.ncols(), PHYS_DIM * dr);
        let row_charges = self.left_row_charges(site);
        let col_charges = self.right_col_charges(site + 1);
        let svd = svd_blocked(theta, &row_charges, &col_charges, trunc)?;

        // renormalize the kept spectrum so the state norm is preserved
        let kept_sq: f64 = svd.s.iter().map(|s| s * s).sum();
        let total_sq = kept_sq + svd.discarded_weight;
        let scale = (total_sq / kept_sq).sqrt();
        let rel_discard = if svd.discarded_weight > 0.0 {
            svd.discarded_weight / total_sq
        } else {
            0.0
        };
        self.truncation_weight += rel_discard;

        let k = svd.s.len();
        if center_right {
            let mut sv = Mat::<C64>::zeros(k, PHYS_DIM * dr);
            for i in 0..k {
                let si = C64::new(svd.s[i] * scale, 0.0);
                for j in 0..PHYS_DIM * dr {
                    sv[(i, j)] = si * svd.vh[(i, j)];
                }
            }
            self.tensors[site] = Tensor3::from_left_matrix(svd.u.as_ref());
            self.tensors[site + 1] = Tensor3::from_right_matrix(sv.as_ref());
            self.center = site + 1;
        } else {
            let mut us = Mat::<C64>::zeros(dl * PHYS_DIM, k);
            for j in 0..k {
                let sj = C64::new(svd.s[j] * scale, 0.0);
                for i in 0..dl * PHYS_DIM {
                    us[(i, j)] = svd.u[(i, j)] * sj;
                }
            }
            self.tensors[site] = Tensor3::from_left_matrix(us.as_ref());
            self.tensors[site + 1] = Tensor3::from_right_matrix(svd.vh.as_ref());
            self.center = site;
        }
        self.bond_charges[site + 1] = svd.bond_charges;
        Ok(rel_discard)
    }

    /// Like [`MpsState::set_two_site`], but enriches the basis kept on the
    /// center's far side with the directions of `noise` before truncating:
    /// the split keeps the dominant eigenvectors of
    /// `theta thetaᴴ + noise noiseᴴ` over rows when moving right, and of
    /// `thetaᴴ theta + noiseᴴ noise` over columns when moving left. `noise`
    /// must share `theta`'s charge structure on the enriched index and
    /// arrive pre-scaled (its squared Frobenius norm is the weight added to
    /// the density matrix). The sweeping ground-state search uses this to
    /// nucleate bond directions that plain truncation locks out.
    pub(crate) fn set_two_site_mixed(
        &mut self,
        site: usize,
        theta: MatRef<'_, C64>,
        noise: MatRef<'_, C64>,
        trunc: Truncation,
        center_right: bool,
    ) -> Result<f64> {
        let dl = self.tensors[site].dl;
        let dr = self.tensors[site + 1].dr;
        debug_assert_eq!(theta.nrows(), dl * PHYS_DIM);
        debug_assert_eq!(theta.ncols(), PHYS_DIM * dr);
        if center_right {
            debug_assert_eq!(noise.nrows(), dl * PHYS_DIM);
        } else {
            debug_assert_eq!(noise.ncols(), PHYS_DIM * dr);
        }

        // indices of the enriched side, grouped by charge
        let labels = if center_right {
            self.left_row_charges(site)
        } else {
            self.right_col_charges(site + 1)
        };
        let mut groups: std::collections::BTreeMap<i64, Vec<usize>> =
            std::collections::BTreeMap::new();
        for (i, &q) in labels.iter().enumerate() {
            groups.entry(q).or_default().push(i);
        }

        // per charge block: eigendecompose the mixed density matrix
        struct Block {
            charge: i64,
            idx: Vec<usize>,
            vals: Vec<f64>,
            vecs: Mat<C64>,
        }
        let mut blocks: Vec<Block> = Vec::with_capacity(groups.len());
        for (&charge, idx) in &groups {
            let m = idx.len();
            let rho = if center_right {
                let t = Mat::from_fn(m, theta.ncols(), |a, j| theta[(idx[a], j)]);
                let nz = Mat::from_fn(m, noise.ncols(), |a, j| noise[(idx[a], j)]);
                let tt = &t * t.adjoint();
                let nn = &nz * nz.adjoint();
                &tt + &nn
            } else {
                let t = Mat::from_fn(theta.nrows(), m, |i, a| theta[(i, idx[a])]);
                let nz = Mat::from_fn(noise.nrows(), m, |i, a| noise[(i, idx[a])]);
                let tt = t.as_ref().adjoint() * t.as_ref();
                let nn = nz.as_ref().adjoint() * nz.as_ref();
                &tt + &nn
            };
            let (vals, vecs) = eigh(rho.as_ref())?;
            blocks.push(Block {
                charge,
                idx: idx.clone(),
                vals,
                vecs,
            });
        }

        // global keep list, mirroring the blocked-SVD ordering with
        // lambda = sigma^2 (eigh returns ascending, so walk from the top)
        let mut cands: Vec<(usize, usize, f64)> = Vec::new();
        for (bi, b) in blocks.iter().enumerate() {
            let m = b.vals.len();
            for li in 0..m {
                cands.push((bi, li, b.vals[m - 1 - li].max(0.0)));
            }
        }
        cands.sort_by(|a, b| {
            b.2.partial_cmp(&a.2)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(blocks[a.0].charge.cmp(&blocks[b.0].charge))
                .then(a.1.cmp(&b.1))
        });
        let lambda_max = cands.first().map(|c| c.2).unwrap_or(0.0);
        let threshold = trunc.rel_cutoff * trunc.rel_cutoff * lambda_max;
        let mut kept: Vec<(usize, usize, f64)> = Vec::new();
        for c in &cands {
            if kept.len() < trunc.max_dim && c.2 > 0.0 && c.2 >= threshold {
                kept.push(*c);
            }
        }
        if kept.is_empty() {
            kept.push(cands[0]);
        }

        // embed the kept eigenvectors into the full enriched index
        let k = kept.len();
        let n_idx = labels.len();
        let mut basis = Mat::<C64>::zeros(n_idx, k);
        let mut bond_charges = Vec::with_capacity(k);
        for (out, &(bi, li, _)) in kept.iter().enumerate() {
            let b = &blocks[bi];
            let m = b.vals.len();
            for (a, &gi) in b.idx.iter().enumerate() {
                basis[(gi, out)] = b.vecs[(a, m - 1 - li)];
            }
            bond_charges.push(b.charge);
        }

        let total_sq: f64 = (0..theta.nrows())
            .map(|i| (0..theta.ncols()).map(|j| theta[(i, j)].norm_sqr()).sum::<f64>())
            .sum();
        if center_right {
            // B = basisᴴ theta carries the center; basis is left-isometric
            let bmat = basis.as_ref().adjoint() * theta;
            let kept_sq: f64 = (0..k)
                .map(|i| (0..bmat.ncols()).map(|j| bmat[(i, j)].norm_sqr()).sum::<f64>())
                .sum();
            let scale = C64::new((total_sq / kept_sq).sqrt(), 0.0);
            let mut bs = Mat::<C64>::zeros(k, PHYS_DIM * dr);
            for i in 0..k {
                for j in 0..PHYS_DIM * dr {
                    bs[(i, j)] = bmat[(i, j)] * scale;
                }
            }
            self.tensors[site] = Tensor3::from_left_matrix(basis.as_ref());
            self.tensors[site + 1] = Tensor3::from_right_matrix(bs.as_ref());
            self.center = site + 1;
            let rel = 1.0 - kept_sq / total_sq;
            self.truncation_weight += rel.max(0.0);
            self.bond_charges[site + 1] = bond_charges;
            Ok(rel.max(0.0))
        } else {
            // A = theta basis carries the center; basisᴴ is right-isometric
            let amat = theta * basis.as_ref();
            let kept_sq: f64 = (0..amat.nrows())
                .map(|i| (0..k).map(|j| amat[(i, j)].norm_sqr()).sum::<f64>())
                .sum();
            let scale = C64::new((total_sq / kept_sq).sqrt(), 0.0);
            let mut asc = Mat::<C64>::zeros(dl * PHYS_DIM, k);
            for i in 0..dl * PHYS_DIM {
                for j in 0..k {
                    asc[(i, j)] = amat[(i, j)] * scale;
                }
            }
            let vh = Mat::from_fn(k, PHYS_DIM * dr, |i, j| basis[(j, i)].conj());
            self.tensors[site] = Tensor3::from_left_matrix(asc.as_ref());
            self.tensors[site + 1] = Tensor3::from_right_matrix(vh.as_ref());
            self.center = site;
            let rel = 1.0 - kept_sq / total_sq;
            self.truncation_weight += rel.max(0.0);
            self.bond_charges[site + 1] = bond_charges;
            Ok(rel.max(0.0))
        }
    }

    /// `<self|other>`; zero (not an error) when the states live in different
    /// charge sectors.
    pub fn inner_product(&self, other: &MpsState) -> Result<C64> {
        let n = self.n_sites();
        if other.n_sites() != n {
            return Err(Error::domain("inner product of different-length chains"));
        }
        let mut env = Mat::<C64>::identity(1, 1);
        for i in 0..n {
            let a = &self.tensors[i];
            let b = &other.tensors[i];
            let mut next = Mat::<C64>::zeros(a.dr, b.dr);
            for p in 0..PHYS_DIM {
                let ap = a.phys_slice(p);
                let bp = b.phys_slice(p);
                let env_b = &env * &bp;
                let term = ap.adjoint() * &env_b;
                next = &next + &term;
            }
            env = next;
        }
        Ok(env[(0, 0)])
    }

    /// Norm of the state; equals the center tensor's Frobenius norm in
    /// canonical form, computed that way here (cheap).
    pub fn norm(&self) -> f64 {
        self.tensors[self.center].norm()
    }

    /// Scale the center tensor so the norm is exactly 1.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::domain("cannot normalize the zero state"));
        }
        self.tensors[self.center].scale(C64::new(1.0 / n, 0.0));
        Ok(())
    }

    /// Export as a little-endian statevector; capability-limited like the
    /// dense backend. Peak memory stays at one `2^k x chi` panel, which is
    /// bounded by `2^n` entries.
    pub fn to_statevector(&self) -> Result<Vec<C64>> {
        let n = self.n_sites();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::capability(format!(
                "statevector export supports at most {MAX_DENSE_QUBITS} qubits, got {n}"
            )));
        }
        // amplitudes[cfg][r]: contraction of sites 0..i for each bit pattern
        let mut amps: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
        for i in 0..n {
            let t = &self.tensors[i];
            let mut next: Vec<Vec<C64>> =
                vec![vec![C64::new(0.0, 0.0); t.dr]; amps.len() * 2];
            for (cfg, row) in amps.iter().enumerate() {
                for p in 0..PHYS_DIM {
                    // little-endian: site i contributes bit i
                    let out_cfg = cfg | (p << i);
                    let dst = &mut next[out_cfg];
                    for (l, &al) in row.iter().enumerate() {
                        if al == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for r in 0..t.dr {
                            dst[r] += al * t.get(l, p, r);
                        }
                    }
                }
            }
            amps = next;
        }
        Ok(amps.into_iter().map(|row| row[0]).collect())
    }

    /// Verify all structural invariants. Used by tests and after bulk
    /// operations; returns a numerical-consistency error naming the first
    /// violation.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n_sites();
        if self.bond_charges.len() != n + 1 {
            return Err(Error::numerical("bond label count mismatch"));
        }
        if self.bond_charges[0] != vec![0] {
            return Err(Error::numerical("left edge must carry charge [0]"));
        }
        if self.bond_charges[n].len() != 1 {
            return Err(Error::numerical("right edge must have bond dimension 1"));
        }
        for (i, t) in self.tensors.iter().enumerate() {
            if t.dl != self.bond_charges[i].len() || t.dr != self.bond_charges[i + 1].len() {
                return Err(Error::numerical(format!(
                    "site {i}: tensor dims ({}, {}) do not match label counts ({}, {})",
                    t.dl,
                    t.dr,
                    self.bond_charges[i].len(),
                    self.bond_charges[i + 1].len()
                )));
            }
            if t.dl > self.chi_max || t.dr > self.chi_max {
                return Err(Error::numerical(format!(
                    "site {i}: bond dimension exceeds cap {}",
                    self.chi_max
                )));
            }
            // charge structure
            for l in 0..t.dl {
                for p in 0..PHYS_DIM {
                    for r in 0..t.dr {
                        let consistent =
                            self.bond_charges[i][l] + p as i64 == self.bond_charges[i + 1][r];
                        if !consistent && t.get(l, p, r).norm() > 1e-12 {
                            return Err(Error::numerical(format!(
                                "site {i}: entry ({l},{p},{r}) violates charge structure"
                            )));
                        }
                    }
                }
            }
        }
        // isometries
        for (i, t) in self.tensors.iter().enumerate() {
            if i < self.center {
                let m = t.as_left_matrix();
                let gram = m.adjoint() * &m;
                for a in 0..t.dr {
                    for b in 0..t.dr {
                        let want = if a == b { 1.0 } else { 0.0 };
                        if (gram[(a, b)] - C64::new(want, 0.0)).norm() > 1e-10 {
                            return Err(Error::numerical(format!(
                                "site {i}: not left-isometric"
                            )));
                        }
                    }
                }
            }
            if i > self.center {
                let m = t.as_right_matrix();
                let gram = &m * m.adjoint();
                for a in 0..t.dl {
                    for b in 0..t.dl {
                        let want = if a == b { 1.0 } else { 0.0 };
                        if (gram[(a, b)] - C64::new(want, 0.0)).norm() > 1e-10 {
                            return Err(Error::numerical(format!(
                                "site {i}: not right-isometric"
                            )));
                        }
                    }
                }
            }
        }
        let norm = self.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::numerical(format!("state norm {norm} drifted from 1")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseState;
    use crate::linalg::mat_from_row_major;
    use crate::linalg::test_gates::{random_np_gate, random_phase_gate};
    use crate::rng::rng_from_seed;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_states_match(mps: &MpsState, dense: &DenseState, tol: f64, what: &str) {
        let sv = mps.to_statevector().unwrap();
        for (i, (a, b)) in sv.iter().zip(dense.amplitudes().iter()).enumerate() {
            let d = (a - b).norm();
            assert!(d <= tol, "{what}: amplitude {i} differs by {d:.3e}");
        }
    }

    #[test]
    fn product_state_matches_dense_and_labels_are_cumulative() {
        let occ = [1u8, 0, 0, 1, 1, 0];
        let mps = MpsState::product_state(&occ, 8, 0.0).unwrap();
        let dense = DenseState::from_occupations(&occ).unwrap();
        assert_states_match(&mps, &dense, 1e-15, "product state");
        let want_labels: Vec<i64> = vec![0, 1, 1, 1, 2, 3, 3];
        for (bond, &want) in want_labels.iter().enumerate() {
            assert_eq!(mps.bond_charge_labels(bond), &[want]);
        }
        mps.check_invariants().unwrap();
    }

    #[test]
    fn random_number_conserving_circuit_matches_dense() {
        let n = 6;
        let occ = [1u8, 0, 1, 0, 0, 1];
        let mut mps = MpsState::product_state(&occ, 1 << (n / 2), 0.0).unwrap();
        let mut dense = DenseState::from_occupations(&occ).unwrap();
        let mut rng = rng_from_seed(21);
        for step in 0..24 {
            if step % 3 == 2 {
                let q = (rng_usize(&mut rng)) % n;
                let g = random_phase_gate(&mut rng);
                mps.apply_one_qubit_gate(q, g.as_ref()).unwrap();
                dense.apply_one_qubit_gate(q, g.as_ref()).unwrap();
            } else {
                let q = (rng_usize(&mut rng)) % (n - 1);
                let g = random_np_gate(&mut rng);
                mps.apply_two_qubit_gate(q, g.as_ref()).unwrap();
                dense.apply_two_qubit_gate(q, q + 1, g.as_ref()).unwrap();
            }
        }
        assert_states_match(&mps, &dense, 1e-12, "random circuit");
        mps.check_invariants().unwrap();
        assert_eq!(mps.truncation_weight(), 0.0, "full chi must be exact");
    }

    fn rng_usize(rng: &mut ChaCha12Rng) -> usize {
        use rand_core::RngCore;
        rng.next_u64() as usize
    }

    #[test]
    fn center_moves_preserve_the_state_exactly() {
        let occ = [1u8, 0, 1, 0, 1];
        let mut mps = MpsState::product_state(&occ, 8, 0.0).unwrap();
        let mut rng = rng_from_seed(33);
        for q in 0..4 {
            let g = random_np_gate(&mut rng);
            mps.apply_two_qubit_gate(q, g.as_ref()).unwrap();
        }
        let before = mps.to_statevector().unwrap();
        for target in [0usize, 4, 2, 3, 0, 1] {
            mps.move_center_to(target).unwrap();
            assert_eq!(mps.center(), target);
            mps.check_invariants().unwrap();
            let after = mps.to_statevector().unwrap();
            for (a, b) in before.iter().zip(after.iter()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inner_product_matches_dense() {
        let occ = [1u8, 0, 0, 1];
        let mut rng = rng_from_seed(44);
        let mut mps_a = MpsState::product_state(&occ, 4, 0.0).unwrap();
        let mut mps_b = MpsState::product_state(&occ, 4, 0.0).unwrap();
        let mut dense_a = DenseState::from_occupations(&occ).unwrap();
        let mut dense_b = DenseState::from_occupations(&occ).unwrap();
        for q in [0usize, 2, 1, 0] {
            let ga = random_np_gate(&mut rng);
            let gb = random_np_gate(&mut rng);
            mps_a.apply_two_qubit_gate(q, ga.as_ref()).unwrap();
            dense_a.apply_two_qubit_gate(q, q + 1, ga.as_ref()).unwrap();
            mps_b.apply_two_qubit_gate(q, gb.as_ref()).unwrap();
            dense_b.apply_two_qubit_gate(q, q + 1, gb.as_ref()).unwrap();
        }
        let want = dense_a.inner(&dense_b).unwrap();
        let got = mps_a.inner_product(&mps_b).unwrap();
        assert!((want - got).norm() < 1e-12, "inner product {got} vs {want}");

        // states in different sectors overlap to exactly zero
        let other = MpsState::product_state(&[1, 1, 0, 1], 4, 0.0).unwrap();
        let z = mps_a.inner_product(&other).unwrap();
        assert_eq!(z, c(0.0, 0.0));
    }

    #[test]
    fn entangling_gate_splits_charges_on_the_bond() {
        // |01> on two sites (site 0 empty, site 1 occupied), rotate the
        // single-particle sector: the middle bond then carries one index of
        // charge 0 (particle still right) and one of charge 1 (moved left).
        let mut mps = MpsState::product_state(&[0, 1], 2, 0.0).unwrap();
        let theta = std::f64::consts::FRAC_PI_4;
        let g = mat_from_row_major(
            4,
            4,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(theta.cos(), 0.0), c(0.0, theta.sin()), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, theta.sin()), c(theta.cos(), 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            ],
        );
        mps.apply_two_qubit_gate(0, g.as_ref()).unwrap();
        assert_eq!(mps.bond_dim(1), 2);
        assert_eq!(mps.bond_charge_labels(1), &[0, 1]);
        mps.check_invariants().unwrap();
    }

    #[test]
    fn truncation_caps_bonds_and_keeps_norm() {
        let occ = [1u8, 0, 1, 0, 1, 0];
        let mut mps = MpsState::product_state(&occ, 2, 0.0).unwrap();
        let mut rng = rng_from_seed(55);
        for pass in 0..3 {
            for q in 0..5 {
                let g = random_np_gate(&mut rng);
                mps.apply_two_qubit_gate(q, g.as_ref()).unwrap();
            }
            let _ = pass;
        }
        assert!(mps.max_bond_dim() <= 2);
        assert!((mps.norm() - 1.0).abs() < 1e-12);
        assert!(mps.truncation_weight() > 0.0, "this circuit must truncate");
        mps.check_invariants().unwrap();
    }

    #[test]
    fn charge_violating_gates_are_rejected() {
        let mut mps = MpsState::product_state(&[0, 1], 4, 0.0).unwrap();
        // X gate mixes occupation
        let x = mat_from_row_major(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        assert!(matches!(
            mps.apply_one_qubit_gate(0, x.as_ref()),
            Err(Error::Domain(_))
        ));
        // Hadamard on the left qubit of a pair mixes sectors
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h_i = mat_from_row_major(
            4,
            4,
            &[
                c(s, 0.), c(0., 0.), c(s, 0.), c(0., 0.),
                c(0., 0.), c(s, 0.), c(0., 0.), c(s, 0.),
                c(s, 0.), c(0., 0.), c(-s, 0.), c(0., 0.),
                c(0., 0.), c(s, 0.), c(0., 0.), c(-s, 0.),
            ],
        );
        assert!(matches!(
            mps.apply_two_qubit_gate(0, h_i.as_ref()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn adjacency_and_range_are_enforced() {
        let mut mps = MpsState::product_state(&[0, 1, 0], 4, 0.0).unwrap();
        let g = Mat::<C64>::identity(4, 4);
        assert!(mps.apply_two_qubit_gate(2, g.as_ref()).is_err());
        let g1 = Mat::<C64>::identity(2, 2);
        assert!(mps.apply_one_qubit_gate(3, g1.as_ref()).is_err());
        assert!(MpsState::product_state(&[], 4, 0.0).is_err());
        assert!(MpsState::product_state(&[0, 1], 0, 0.0).is_err());
        assert!(MpsState::product_state(&[0, 1], 4, 1.5).is_err());
    }
}
