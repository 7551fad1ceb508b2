//! Exact diagonalization restricted to a particle-number sector.
//!
//! The Hamiltonian conserves the electron count of each spin species, so the
//! ground state can be found inside the `(n_up, n_down)` sector alone. Basis
//! states are occupation bitmasks over the canonical modes with fixed
//! per-spin particle counts; the Hamiltonian acts directly in this fermionic
//! representation with explicit parity signs (the same convention as the
//! dense statevector backend — no Pauli detour, which keeps this solver an
//! independent reference for everything built on the Jordan-Wigner map).
//!
//! Small sectors are diagonalized densely; large ones use a thick-restart
//! Lanczos iteration with full reorthogonalization, which handles the
//! near-degenerate low ends that Hubbard spectra develop at weak coupling.
//!
//! Statevector export (for fidelity benchmarks) maps each sector basis state
//! to its qubit configuration under a layout. Reordering fermionic modes
//! into qubit positions is a signed permutation: the amplitude picks up the
//! parity of the permutation restricted to occupied modes.

use std::collections::HashMap;

use faer::Mat;

use crate::dense::parity_below;
use crate::error::{Error, Result};
use crate::lattice::QubitLayout;
use crate::linalg::eigh;
use crate::model::{FermionTerm, HubbardModel};
use crate::pauli::PauliSum;
use crate::rng::{rng_from_seed, standard_normal};
use crate::C64;

/// Hard capability limits for this backend.
pub const MAX_ED_QUBITS: usize = 24;
pub const MAX_SECTOR_DIM: usize = 1_000_000;
/// Full statevectors are exported only up to this many qubits.
const MAX_EXPORT_QUBITS: usize = 16;
/// Sectors up to this dimension are diagonalized densely.
const DENSE_SECTOR_CUTOFF: usize = 400;
/// Full-space iteration (Pauli operators) is limited separately.
const MAX_PAULI_ED_QUBITS: usize = 16;

/// Lanczos policy: basis span per restart cycle, retained Ritz pairs,
/// relative residual target, and the restart budget.
const LANCZOS_SPAN: usize = 48;
const LANCZOS_KEEP: usize = 8;
const LANCZOS_TOL: f64 = 1e-11;
const LANCZOS_CYCLES: usize = 400;
/// Fixed seed for the (deterministic) starting vector.
const LANCZOS_SEED: u64 = 0xED5EED;

/// Ground-state result of a sector diagonalization.
#[derive(Clone, Debug)]
pub struct EdGroundState {
    pub energy: f64,
    pub n_up: usize,
    pub n_down: usize,
    pub sector_dim: usize,
    /// "dense" or "lanczos".
    pub method: &'static str,
    /// Little-endian statevector in the layout's qubit order, normalized,
    /// global phase fixed (largest amplitude real positive). `None` above
    /// the export size limit.
    pub statevector: Option<Vec<C64>>,
}

/// Occupation-bitmask basis of one `(n_up, n_down)` sector, canonical mode
/// ordering (up/down interleaved, site-major).
struct SectorBasis {
    masks: Vec<usize>,
    index: HashMap<usize, usize>,
}

impl SectorBasis {
    fn new(n_sites: usize, n_up: usize, n_down: usize) -> Result<Self> {
        if n_up > n_sites || n_down > n_sites {
            return Err(Error::domain(format!(
                "sector ({n_up},{n_down}) does not fit {n_sites} sites"
            )));
        }
        let ups = combinations(n_sites, n_up);
        let downs = combinations(n_sites, n_down);
        let dim = ups.len() * downs.len();
        if dim > MAX_SECTOR_DIM {
            return Err(Error::capability(format!(
                "sector dimension {dim} exceeds the limit {MAX_SECTOR_DIM}"
            )));
        }
        let mut masks = Vec::with_capacity(dim);
        for &up in &ups {
            for &down in &downs {
                masks.push(spread(up) | (spread(down) << 1));
            }
        }
        let index: HashMap<usize, usize> =
            masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(SectorBasis { masks, index })
    }

    fn dim(&self) -> usize {
        self.masks.len()
    }
}

/// All `k`-subsets of `n` items as bitmasks, ascending.
fn combinations(n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut pick = |mask: usize| out.push(mask);
    fn recurse(start: usize, n: usize, left: usize, mask: usize, pick: &mut impl FnMut(usize)) {
        if left == 0 {
            pick(mask);
            return;
        }
        for i in start..=n - left {
            recurse(i + 1, n, left - 1, mask | (1 << i), pick);
        }
    }
    if k == 0 {
        pick(0);
    } else {
        recurse(0, n, k, 0, &mut pick);
    }
    out
}

/// Spread site bits to even mode positions: bit `i` -> bit `2 i`.
fn spread(site_mask: usize) -> usize {
    let mut out = 0usize;
    let mut m = site_mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1 << (2 * i);
        m &= m - 1;
    }
    out
}

/// The model's action inside one sector: a precomputed diagonal plus
/// directed hops with parity signs.
struct SectorHamiltonian<'a> {
    basis: &'a SectorBasis,
    diagonal: Vec<f64>,
    /// `(p, q, amp)` meaning `amp * c_p^dag c_q`; both directions present.
    hops: Vec<(usize, usize, f64)>,
}

impl<'a> SectorHamiltonian<'a> {
    fn new(model: &HubbardModel, basis: &'a SectorBasis) -> Self {
        let mut hops = Vec::new();
        let mut occ_amps: Vec<(usize, f64)> = Vec::new();
        let mut occocc_amps: Vec<(usize, usize, f64)> = Vec::new();
        for term in model.terms() {
            match term {
                FermionTerm::Hop { a, b, amp } => {
                    hops.push((a, b, amp));
                    hops.push((b, a, amp));
                }
                FermionTerm::Occ { mode, amp } => occ_amps.push((mode, amp)),
                FermionTerm::OccOcc { a, b, amp } => occocc_amps.push((a, b, amp)),
            }
        }
        let diagonal: Vec<f64> = basis
            .masks
            .iter()
            .map(|&mask| {
                let mut e = 0.0;
                for &(m, amp) in &occ_amps {
                    if mask & (1 << m) != 0 {
                        e += amp;
                    }
                }
                for &(a, b, amp) in &occocc_amps {
                    if mask & (1 << a) != 0 && mask & (1 << b) != 0 {
                        e += amp;
                    }
                }
                e
            })
            .collect();
        SectorHamiltonian {
            basis,
            diagonal,
            hops,
        }
    }

    fn matvec(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.basis.dim());
        out.fill(C64::new(0.0, 0.0));
        for (j, &mask) in self.basis.masks.iter().enumerate() {
            let a = v[j];
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            out[j] += a * self.diagonal[j];
            for &(p, q, amp) in &self.hops {
                let bp = 1usize << p;
                let bq = 1usize << q;
                if mask & bq != 0 && mask & bp == 0 {
                    let sign_q = parity_below(mask, q);
                    let m1 = mask & !bq;
                    let sign_p = parity_below(m1, p);
                    let target = m1 | bp;
                    let idx = self.basis.index[&target];
                    out[idx] += a * (amp * sign_q * sign_p);
                }
            }
        }
    }
}

/// Ground state in the checkerboard sector of a model.
pub fn ground_state(model: &HubbardModel, layout: &QubitLayout) -> Result<EdGroundState> {
    let (n_up, n_down) = model.checkerboard_sector();
    ground_state_in_sector(model, layout, n_up, n_down)
}

/// Ground state in an explicit `(n_up, n_down)` sector.
pub fn ground_state_in_sector(
    model: &HubbardModel,
    layout: &QubitLayout,
    n_up: usize,
    n_down: usize,
) -> Result<EdGroundState> {
    let nq = model.n_qubits();
    if nq > MAX_ED_QUBITS {
        return Err(Error::capability(format!(
            "exact diagonalization supports at most {MAX_ED_QUBITS} qubits, got {nq}"
        )));
    }
    if layout.n_qubits() != nq {
        return Err(Error::domain("layout size does not match model"));
    }
    let basis = SectorBasis::new(model.geometry.n_sites(), n_up, n_down)?;
    let h = SectorHamiltonian::new(model, &basis);
    let dim = basis.dim();

    let (energy, vector, method) = if dim <= DENSE_SECTOR_CUTOFF {
        let (e, v) = dense_lowest(dim, |x, y| h.matvec(x, y))?;
        (e, v, "dense")
    } else {
        let mut rng = rng_from_seed(LANCZOS_SEED);
        let v0: Vec<C64> = (0..dim)
            .map(|_| C64::new(standard_normal(&mut rng), standard_normal(&mut rng)))
            .collect();
        let (e, v) =
            lanczos_lowest(dim, |x, y| h.matvec(x, y), v0, LANCZOS_SPAN, LANCZOS_TOL, LANCZOS_CYCLES)?;
        (e, v, "lanczos")
    };

    let statevector = if nq <= MAX_EXPORT_QUBITS {
        Some(embed_sector_vector(&basis, &vector, layout, nq))
    } else {
        None
    };
    Ok(EdGroundState {
        energy,
        n_up,
        n_down,
        sector_dim: dim,
        method,
        statevector,
    })
}

/// Lowest eigenpair of a number-conserving Pauli operator over the span of
/// the full-space basis states selected by `keep` (e.g. one charge sector).
/// The iteration stays in that span because the operator maps it to itself;
/// test-oriented and capability-limited.
pub fn ground_state_pauli(
    h: &PauliSum,
    keep: impl Fn(usize) -> bool,
) -> Result<(f64, Vec<C64>)> {
    let nq = h.n_qubits();
    if nq > MAX_PAULI_ED_QUBITS {
        return Err(Error::capability(format!(
            "full-space diagonalization supports at most {MAX_PAULI_ED_QUBITS} qubits, got {nq}"
        )));
    }
    let dim = 1usize << nq;
    let mut rng = rng_from_seed(LANCZOS_SEED);
    let mut v0: Vec<C64> = (0..dim)
        .map(|_| C64::new(standard_normal(&mut rng), standard_normal(&mut rng)))
        .collect();
    let mut any = false;
    for (i, a) in v0.iter_mut().enumerate() {
        if keep(i) {
            any = true;
        } else {
            *a = C64::new(0.0, 0.0);
        }
    }
    if !any {
        return Err(Error::domain("sector filter keeps no basis states"));
    }
    let matvec = |x: &[C64], y: &mut [C64]| {
        let hx = h.apply_to_statevector(x).expect("matvec dimension is fixed");
        y.copy_from_slice(&hx);
    };
    lanczos_lowest(dim, matvec, v0, LANCZOS_SPAN, LANCZOS_TOL, LANCZOS_CYCLES)
}

/// Embed a sector vector into the full qubit space under a layout,
/// including fermionic reordering signs; normalized, phase-canonical.
fn embed_sector_vector(
    basis: &SectorBasis,
    vector: &[C64],
    layout: &QubitLayout,
    nq: usize,
) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); 1usize << nq];
    for (j, &mask) in basis.masks.iter().enumerate() {
        if vector[j] == C64::new(0.0, 0.0) {
            continue;
        }
        // occupied modes in ascending canonical order
        let mut qubits = Vec::new();
        let mut m = mask;
        while m != 0 {
            let mode = m.trailing_zeros() as usize;
            qubits.push(layout.qubit_of_mode(mode));
            m &= m - 1;
        }
        // parity of the permutation sorting modes into qubit order
        let mut inversions = 0usize;
        for i in 0..qubits.len() {
            for k in i + 1..qubits.len() {
                if qubits[i] > qubits[k] {
                    inversions += 1;
                }
            }
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        let idx: usize = qubits.iter().map(|&q| 1usize << q).sum();
        out[idx] = vector[j] * sign;
    }
    canonicalize_phase(&mut out);
    out
}

/// Normalize and rotate the global phase so the largest amplitude is real
/// positive (lowest index on ties), making exports deterministic.
fn canonicalize_phase(v: &mut [C64]) {
    let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let mut best = 0usize;
    for (i, a) in v.iter().enumerate() {
        if a.norm() > v[best].norm() + 1e-15 {
            best = i;
        }
    }
    let phase = v[best] / v[best].norm();
    let scale = phase.conj() / norm;
    for a in v.iter_mut() {
        *a *= scale;
    }
}

/// Dense lowest eigenpair via full diagonalization of the operator built
/// column by column from the matvec.
fn dense_lowest(
    dim: usize,
    matvec: impl Fn(&[C64], &mut [C64]),
) -> Result<(f64, Vec<C64>)> {
    let mut h = Mat::<C64>::zeros(dim, dim);
    let mut unit = vec![C64::new(0.0, 0.0); dim];
    let mut col = vec![C64::new(0.0, 0.0); dim];
    for j in 0..dim {
        unit[j] = C64::new(1.0, 0.0);
        matvec(&unit, &mut col);
        unit[j] = C64::new(0.0, 0.0);
        for i in 0..dim {
            h[(i, j)] = col[i];
        }
    }
    let (vals, vecs) = eigh(h.as_ref())?;
    let mut v: Vec<C64> = (0..dim).map(|i| vecs[(i, 0)]).collect();
    canonicalize_phase(&mut v);
    Ok((vals[0], v))
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Thick-restart Lanczos with full reorthogonalization for the lowest
/// eigenpair of a Hermitian operator given by `matvec`. `span` bounds the
/// basis size per restart cycle, `rel_tol` is the residual target relative
/// to `max(1, |lowest Ritz value|)`, and `max_cycles` caps the restarts.
/// Also the local eigensolver of the sweeping ground-state search: starting
/// from a vector with exact block structure, the iteration never leaves
/// that block (the basis is built purely from operator applications).
pub(crate) fn lanczos_lowest(
    dim: usize,
    matvec: impl Fn(&[C64], &mut [C64]),
    v0: Vec<C64>,
    span: usize,
    rel_tol: f64,
    max_cycles: usize,
) -> Result<(f64, Vec<C64>)> {
    let span = span.min(dim);
    let n0 = norm(&v0);
    if n0 == 0.0 {
        return Err(Error::domain("starting vector is zero"));
    }
    let mut v_cur: Vec<C64> = v0.iter().map(|a| a / n0).collect();

    // locked Ritz pairs from previous cycles: values, coupling to v_cur,
    // and their vectors at the front of the basis
    let mut locked_vals: Vec<f64> = Vec::new();
    let mut locked_coupling: Vec<f64> = Vec::new();
    let mut basis: Vec<Vec<C64>> = Vec::new();

    let mut w = vec![C64::new(0.0, 0.0); dim];
    for _cycle in 0..max_cycles {
        let nl = locked_vals.len();
        basis.truncate(nl);
        basis.push(v_cur.clone());
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let (beta_res, v_res) = loop {
            let j = basis.len() - 1;
            matvec(&basis[j], &mut w);
            let mut alpha = 0.0;
            // two-pass full reorthogonalization; the first-pass projection
            // onto the current vector is the Ritz diagonal
            for pass in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let c = dot(b, &w);
                    if pass == 0 && i == j {
                        alpha = c.re;
                    }
                    for (wi, bi) in w.iter_mut().zip(b.iter()) {
                        *wi -= c * bi;
                    }
                }
            }
            alphas.push(alpha);
            let beta = norm(&w);
            if basis.len() - nl >= span || beta < 1e-13 {
                let v_res = if beta < 1e-13 {
                    None
                } else {
                    Some(w.iter().map(|a| a / beta).collect::<Vec<C64>>())
                };
                break (beta, v_res);
            }
            betas.push(beta);
            basis.push(w.iter().map(|a| a / beta).collect());
        };

        // assemble the small projected matrix: locked arrowhead + tridiagonal
        let m = basis.len();
        let mut t = Mat::<C64>::zeros(m, m);
        for i in 0..nl {
            t[(i, i)] = C64::new(locked_vals[i], 0.0);
            t[(i, nl)] = C64::new(locked_coupling[i], 0.0);
            t[(nl, i)] = C64::new(locked_coupling[i], 0.0);
        }
        for (r, &a) in alphas.iter().enumerate() {
            t[(nl + r, nl + r)] = C64::new(a, 0.0);
        }
        for (r, &b) in betas.iter().enumerate() {
            t[(nl + r, nl + r + 1)] = C64::new(b, 0.0);
            t[(nl + r + 1, nl + r)] = C64::new(b, 0.0);
        }
        let (vals, vecs) = eigh(t.as_ref())?;

        let ritz = |k: usize| -> Vec<C64> {
            let mut u = vec![C64::new(0.0, 0.0); dim];
            for (i, b) in basis.iter().enumerate() {
                let s = vecs[(i, k)];
                if s != C64::new(0.0, 0.0) {
                    for (ui, bi) in u.iter_mut().zip(b.iter()) {
                        *ui += s * bi;
                    }
                }
            }
            u
        };

        let resid = beta_res * vecs[(m - 1, 0)].norm();
        if resid <= rel_tol * vals[0].abs().max(1.0) {
            let mut u = ritz(0);
            let nu = norm(&u);
            for a in u.iter_mut() {
                *a /= nu;
            }
            canonicalize_phase(&mut u);
            return Ok((vals[0], u));
        }

        match v_res {
            Some(next) => {
                // thick restart: keep the lowest Ritz pairs plus the residual
                let keep = LANCZOS_KEEP.min(m.saturating_sub(1)).max(1);
                let mut new_basis = Vec::with_capacity(keep);
                let mut new_vals = Vec::with_capacity(keep);
                let mut new_coupling = Vec::with_capacity(keep);
                for k in 0..keep {
                    let mut u = ritz(k);
                    let nu = norm(&u);
                    if nu < 1e-13 {
                        continue;
                    }
                    for a in u.iter_mut() {
                        *a /= nu;
                    }
                    new_basis.push(u);
                    new_vals.push(vals[k]);
                    new_coupling.push(beta_res * vecs[(m - 1, k)].re);
                }
                basis = new_basis;
                locked_vals = new_vals;
                locked_coupling = new_coupling;
                v_cur = next;
            }
            None => {
                // Krylov space became invariant but the residual target was
                // not met: the lowest Ritz value is exact on this subspace,
                // so accept it.
                let mut u = ritz(0);
                let nu = norm(&u);
                for a in u.iter_mut() {
                    *a /= nu;
                }
                canonicalize_phase(&mut u);
                return Ok((vals[0], u));
            }
        }
    }
    Err(Error::numerical(
        "eigensolver did not converge within the restart budget",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jw::jordan_wigner;
    use crate::model::ModelConfig;

    fn model(nx: usize, ny: usize, t: f64, u: f64, v: f64, d: f64, seed: u64) -> HubbardModel {
        ModelConfig {
            nx,
            ny,
            t,
            u,
            v,
            d,
            seed,
        }
        .realize()
        .unwrap()
    }

    /// Open-chain free-fermion ground energy at `(n_up, n_down)` filling.
    fn free_chain_energy(l: usize, n_up: usize, n_down: usize, t: f64) -> f64 {
        let mut levels: Vec<f64> = (1..=l)
            .map(|j| -2.0 * t * (std::f64::consts::PI * j as f64 / (l as f64 + 1.0)).cos())
            .collect();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels[..n_up].iter().sum::<f64>() + levels[..n_down].iter().sum::<f64>()
    }

    #[test]
    fn dimer_ground_energy_is_analytic() {
        for u in [2.0, 4.0, 8.0] {
            let m = model(1, 2, 1.0, u, 0.0, 0.0, 1);
            let got = ground_state(&m, &QubitLayout::interleaved(2)).unwrap();
            let want = (u - (u * u + 16.0).sqrt()) / 2.0;
            assert!(
                (got.energy - want).abs() < 1e-12,
                "dimer U={u}: {} vs {}",
                got.energy,
                want
            );
            assert_eq!((got.n_up, got.n_down), (1, 1));
            assert_eq!(got.method, "dense");
        }
    }

    #[test]
    fn free_fermion_chains_match_band_filling() {
        // 1x6 fits the dense path, 1x8 exercises the Lanczos path; both
        // must match the open-chain single-particle spectrum
        for (l, expect_method) in [(6usize, "dense"), (8, "lanczos")] {
            let m = model(1, l, 1.0, 0.0, 0.0, 0.0, 1);
            let got = ground_state(&m, &QubitLayout::interleaved(l)).unwrap();
            let want = free_chain_energy(l, l / 2, l / 2, 1.0);
            assert!(
                (got.energy - want).abs() < 1e-9,
                "1x{l}: {} vs {}",
                got.energy,
                want
            );
            assert_eq!(got.method, expect_method, "1x{l} solver path");
        }
    }

    #[test]
    fn layouts_agree_and_exports_satisfy_the_pauli_oracle() {
        let m = model(1, 3, 1.0, 5.0, 0.7, 0.1, 3);
        let layouts = [QubitLayout::interleaved(3), QubitLayout::blocked(3)];
        let results: Vec<EdGroundState> = layouts
            .iter()
            .map(|l| ground_state(&m, l).unwrap())
            .collect();
        assert!(
            (results[0].energy - results[1].energy).abs() < 1e-10,
            "energy must be layout-invariant"
        );
        for (layout, result) in layouts.iter().zip(results.iter()) {
            let sv = result.statevector.as_ref().unwrap();
            let h = jordan_wigner(&m, layout).unwrap();
            let e = h.expectation_statevector(sv).unwrap();
            assert!(
                (e - result.energy).abs() < 1e-9,
                "exported state must reproduce the energy through the qubit operator"
            );
        }
    }

    #[test]
    fn pauli_iteration_agrees_with_the_sector_solver() {
        let m = model(1, 3, 1.0, 4.0, 0.0, 0.2, 9);
        let layout = QubitLayout::interleaved(3);
        let sector = ground_state(&m, &layout).unwrap();
        let h = jordan_wigner(&m, &layout).unwrap();
        // interleaved layout: up modes sit on even qubits
        let (n_up, n_down) = m.checkerboard_sector();
        let keep = move |idx: usize| {
            let mut up = 0;
            let mut down = 0;
            for q in 0..6 {
                if idx & (1 << q) != 0 {
                    if q % 2 == 0 {
                        up += 1;
                    } else {
                        down += 1;
                    }
                }
            }
            (up, down) == (n_up, n_down)
        };
        let (e, v) = ground_state_pauli(&h, keep).unwrap();
        assert!((e - sector.energy).abs() < 1e-9, "{e} vs {}", sector.energy);
        let sv = sector.statevector.as_ref().unwrap();
        let overlap: C64 = crate::ed::dot(sv, &v);
        assert!(
            (overlap.norm() - 1.0).abs() < 1e-8,
            "eigenvectors must coincide up to phase, overlap {}",
            overlap.norm()
        );
    }

    #[test]
    fn results_are_deterministic() {
        let m = model(1, 8, 1.0, 3.0, 0.0, 0.05, 4);
        let layout = QubitLayout::interleaved(8);
        let a = ground_state(&m, &layout).unwrap();
        let b = ground_state(&m, &layout).unwrap();
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        let (sa, sb) = (a.statevector.unwrap(), b.statevector.unwrap());
        assert_eq!(sa.len(), sb.len());
        for (x, y) in sa.iter().zip(sb.iter()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn capability_limits_are_enforced() {
        let m = model(4, 4, 1.0, 4.0, 0.0, 0.0, 1);
        // 32 qubits is beyond the backend
        assert!(matches!(
            ground_state(&m, &QubitLayout::interleaved(16)),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn disorder_shifts_the_spectrum_deterministically() {
        let clean = model(1, 4, 1.0, 2.0, 0.0, 0.0, 7);
        let noisy = model(1, 4, 1.0, 2.0, 0.0, 0.3, 7);
        let layout = QubitLayout::interleaved(4);
        let e0 = ground_state(&clean, &layout).unwrap().energy;
        let e1 = ground_state(&noisy, &layout).unwrap().energy;
        assert!((e0 - e1).abs() > 1e-6, "disorder must move the energy");
    }
}
