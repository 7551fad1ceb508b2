//! Dense complex linear algebra built on `faer`, plus charge-blocked
//! factorizations.
//!
//! Tensor-network states in this crate carry an exact particle-number label
//! on every bond index, which makes every matrix that reaches an SVD or QR
//! block-diagonal after grouping rows and columns by charge. Factorizing the
//! blocks independently is exact and much faster than the dense
//! factorization (the largest charge block is far smaller than the full
//! matrix), so all splits go through [`svd_blocked`] / [`qr_blocked`] /
//! [`lq_blocked`]. Dense, unlabeled inputs use the same entry points with a
//! constant charge vector.
//!
//! Determinism: `faer`'s Householder kernels are deterministic in this
//! build (sequential, no runtime dispatch on thread count), and on top of
//! that every factorization is brought to a canonical form — each right
//! singular vector is rescaled so its largest-magnitude entry is real and
//! positive, and each QR is rescaled so the diagonal of `R` is real and
//! non-negative. Identical inputs therefore produce bit-identical factors.

use std::collections::BTreeMap;

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::C64;

/// Build a `faer` matrix from a row-major slice.
pub fn mat_from_row_major(rows: usize, cols: usize, data: &[C64]) -> Mat<C64> {
    assert_eq!(data.len(), rows * cols, "row-major buffer has wrong length");
    Mat::from_fn(rows, cols, |i, j| data[i * cols + j])
}

/// Flatten a matrix into a row-major buffer.
pub fn mat_to_row_major(m: MatRef<'_, C64>) -> Vec<C64> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Debug-build unitarity guard for gate matrices; a non-unitary gate is a
/// caller contract violation, checked where it is cheap relative to the
/// surrounding work.
pub(crate) fn debug_check_unitary(g: MatRef<'_, C64>, what: &str) {
    if cfg!(debug_assertions) {
        let n = g.nrows();
        debug_assert_eq!(n, g.ncols(), "{what}: gate matrix must be square");
        let gh_g = g.adjoint() * g;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                let dev = (gh_g[(i, j)] - C64::new(want, 0.0)).norm();
                debug_assert!(
                    dev < 1e-10,
                    "{what}: gate is not unitary (G†G deviates at ({i},{j}) by {dev:.3e})"
                );
            }
        }
    }
}

/// Largest entry magnitude; zero for empty matrices.
pub fn max_abs(m: MatRef<'_, C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

/// Truncation policy for singular-value splits.
#[derive(Clone, Copy, Debug)]
pub struct Truncation {
    /// Hard cap on the number of kept singular values (at least 1).
    pub max_dim: usize,
    /// Relative cutoff: values with `sigma < rel_cutoff * sigma_max` are
    /// dropped. Zero keeps everything up to the cap.
    pub rel_cutoff: f64,
}

impl Truncation {
    /// New policy; `max_dim` must be positive and `rel_cutoff` in `[0, 1]`.
    pub fn new(max_dim: usize, rel_cutoff: f64) -> Self {
        assert!(max_dim >= 1, "truncation cap must be at least 1");
        assert!(
            (0.0..=1.0).contains(&rel_cutoff),
            "relative cutoff must lie in [0, 1], got {rel_cutoff}"
        );
        Truncation { max_dim, rel_cutoff }
    }

    /// Keep everything up to `max_dim` (no relative cutoff).
    pub fn exact(max_dim: usize) -> Self {
        Truncation::new(max_dim, 0.0)
    }
}

/// Result of a blocked, truncated SVD: `A ≈ U · diag(s) · Vh` with `U`
/// column-isometric and `Vh` row-isometric.
#[derive(Clone, Debug)]
pub struct BlockSvd {
    /// `rows × k`; column `j` has support only on rows of charge
    /// `bond_charges[j]`.
    pub u: Mat<C64>,
    /// Kept singular values, descending (ties broken by charge, then by
    /// position inside the block).
    pub s: Vec<f64>,
    /// `k × cols`; row `j` has support only on columns of charge
    /// `bond_charges[j]`.
    pub vh: Mat<C64>,
    /// Charge label of each kept singular value.
    pub bond_charges: Vec<i64>,
    /// Sum of the squared discarded singular values (unnormalized).
    pub discarded_weight: f64,
}

struct ChargeBlock {
    charge: i64,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

/// Group row/column indices by charge and keep the charges present on both
/// sides. Entries of `mat` outside these blocks must be structural zeros;
/// debug builds verify that.
fn charge_blocks(
    mat: MatRef<'_, C64>,
    row_charges: &[i64],
    col_charges: &[i64],
) -> Result<Vec<ChargeBlock>> {
    if row_charges.len() != mat.nrows() || col_charges.len() != mat.ncols() {
        return Err(Error::domain(format!(
            "charge labels ({} rows, {} cols) do not match matrix shape {}x{}",
            row_charges.len(),
            col_charges.len(),
            mat.nrows(),
            mat.ncols()
        )));
    }
    let mut rows_by: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &c) in row_charges.iter().enumerate() {
        rows_by.entry(c).or_default().push(i);
    }
    let mut cols_by: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (j, &c) in col_charges.iter().enumerate() {
        cols_by.entry(c).or_default().push(j);
    }

    #[cfg(debug_assertions)]
    {
        // Charge conservation makes off-block entries exact zeros; a large
        // off-block entry means a label-bookkeeping bug upstream.
        let scale = max_abs(mat).max(1.0);
        for i in 0..mat.nrows() {
            for j in 0..mat.ncols() {
                if row_charges[i] != col_charges[j] {
                    debug_assert!(
                        mat[(i, j)].norm() <= 1e-12 * scale,
                        "off-block entry ({i},{j}) = {} breaks charge structure",
                        mat[(i, j)]
                    );
                }
            }
        }
    }

    let blocks: Vec<ChargeBlock> = rows_by
        .into_iter()
        .filter_map(|(charge, rows)| {
            cols_by.get(&charge).map(|cols| ChargeBlock {
                charge,
                rows,
                cols: cols.clone(),
            })
        })
        .collect();
    if blocks.is_empty() {
        return Err(Error::domain(
            "matrix has no charge-compatible blocks (row and column labels are disjoint)",
        ));
    }
    Ok(blocks)
}

fn extract_block(mat: MatRef<'_, C64>, block: &ChargeBlock) -> Mat<C64> {
    Mat::from_fn(block.rows.len(), block.cols.len(), |a, b| {
        mat[(block.rows[a], block.cols[b])]
    })
}

/// Canonical phase fixing: scale each right singular vector (row of `vh`)
/// so its largest-magnitude entry (lowest index on ties) is real positive,
/// compensating in the matching column of `u`.
fn fix_svd_signs(u: &mut Mat<C64>, s: &[f64], vh: &mut Mat<C64>) {
    for k in 0..s.len() {
        let mut best_j = 0usize;
        let mut best_mag = 0.0f64;
        for j in 0..vh.ncols() {
            let mag = vh[(k, j)].norm();
            if mag > best_mag {
                best_mag = mag;
                best_j = j;
            }
        }
        if best_mag == 0.0 {
            continue;
        }
        let alpha = vh[(k, best_j)] / best_mag; // unit modulus
        let alpha_conj = alpha.conj();
        for j in 0..vh.ncols() {
            vh[(k, j)] *= alpha_conj;
        }
        for i in 0..u.nrows() {
            u[(i, k)] *= alpha;
        }
    }
}

/// Truncated SVD of a charge-block-diagonal matrix, factorized block by
/// block. Exact (up to truncation) for matrices whose off-block entries are
/// zero; see [`charge_blocks`].
///
/// Kept values are selected globally: all blocks' singular values are merged,
/// sorted descending (ties: lower charge first, then position in block), the
/// relative cutoff and the cap are applied, and at least one value is always
/// kept so the factorization never collapses to an empty bond.
pub fn svd_blocked(
    mat: MatRef<'_, C64>,
    row_charges: &[i64],
    col_charges: &[i64],
    trunc: Truncation,
) -> Result<BlockSvd> {
    let blocks = charge_blocks(mat, row_charges, col_charges)?;

    struct Factored {
        charge: i64,
        rows: Vec<usize>,
        cols: Vec<usize>,
        u: Mat<C64>,
        s: Vec<f64>,
        vh: Mat<C64>,
    }
    let mut factored = Vec::with_capacity(blocks.len());
    for block in &blocks {
        let sub = extract_block(mat, block);
        let svd = sub
            .thin_svd()
            .map_err(|e| Error::numerical(format!("SVD did not converge: {e:?}")))?;
        let k = svd.S().column_vector().nrows();
        let s: Vec<f64> = (0..k).map(|i| svd.S().column_vector()[i].re).collect();
        let mut u = svd.U().to_owned();
        let mut vh = svd.V().adjoint().to_owned();
        fix_svd_signs(&mut u, &s, &mut vh);
        factored.push(Factored {
            charge: block.charge,
            rows: block.rows.clone(),
            cols: block.cols.clone(),
            u,
            s,
            vh,
        });
    }

    // Global candidate list: (block index, local index, sigma).
    let mut cands: Vec<(usize, usize, f64)> = Vec::new();
    for (bi, f) in factored.iter().enumerate() {
        for (li, &sigma) in f.s.iter().enumerate() {
            cands.push((bi, li, sigma));
        }
    }
    cands.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(factored[a.0].charge.cmp(&factored[b.0].charge))
            .then(a.1.cmp(&b.1))
    });

    let sigma_max = cands.first().map(|c| c.2).unwrap_or(0.0);
    let threshold = trunc.rel_cutoff * sigma_max;
    let mut kept: Vec<(usize, usize, f64)> = Vec::new();
    let mut discarded_weight = 0.0f64;
    for c in &cands {
        if kept.len() < trunc.max_dim && c.2 > 0.0 && c.2 >= threshold {
            kept.push(*c);
        } else {
            discarded_weight += c.2 * c.2;
        }
    }
    if kept.is_empty() {
        // Degenerate (all-zero) input: keep the single largest value so the
        // bond survives; its weight was counted above, take it back.
        let first = cands[0];
        discarded_weight -= first.2 * first.2;
        kept.push(first);
    }

    let k = kept.len();
    let mut u = Mat::<C64>::zeros(mat.nrows(), k);
    let mut vh = Mat::<C64>::zeros(k, mat.ncols());
    let mut s = Vec::with_capacity(k);
    let mut bond_charges = Vec::with_capacity(k);
    for (out, &(bi, li, sigma)) in kept.iter().enumerate() {
        let f = &factored[bi];
        for (a, &ri) in f.rows.iter().enumerate() {
            u[(ri, out)] = f.u[(a, li)];
        }
        for (a, &ci) in f.cols.iter().enumerate() {
            vh[(out, ci)] = f.vh[(li, a)];
        }
        s.push(sigma);
        bond_charges.push(f.charge);
    }

    Ok(BlockSvd {
        u,
        s,
        vh,
        bond_charges,
        discarded_weight,
    })
}

/// Truncated SVD without charge labels (single block of charge 0).
pub fn svd_trunc(mat: MatRef<'_, C64>, trunc: Truncation) -> Result<BlockSvd> {
    let rc = vec![0i64; mat.nrows()];
    let cc = vec![0i64; mat.ncols()];
    svd_blocked(mat, &rc, &cc, trunc)
}

/// Result of a blocked thin QR: `A = Q · R` with `Qᴴ Q = I`.
#[derive(Clone, Debug)]
pub struct BlockQr {
    /// `rows × k` column isometry.
    pub q: Mat<C64>,
    /// `k × cols` upper factor (block-wise upper triangular).
    pub r: Mat<C64>,
    /// Charge label of each of the `k` new bond indices.
    pub bond_charges: Vec<i64>,
}

/// Blocked thin QR of a charge-block-diagonal matrix. The new bond carries
/// `min(block rows, block cols)` indices per charge, ordered by ascending
/// charge. The diagonal of each block's `R` is made real non-negative, which
/// pins the factorization uniquely for full-rank blocks.
pub fn qr_blocked(
    mat: MatRef<'_, C64>,
    row_charges: &[i64],
    col_charges: &[i64],
) -> Result<BlockQr> {
    let blocks = charge_blocks(mat, row_charges, col_charges)?;

    struct Factored {
        charge: i64,
        rows: Vec<usize>,
        cols: Vec<usize>,
        q: Mat<C64>,
        r: Mat<C64>,
    }
    let mut factored = Vec::with_capacity(blocks.len());
    let mut k_total = 0usize;
    for block in &blocks {
        let sub = extract_block(mat, block);
        let qr = sub.qr();
        let mut q = qr.compute_thin_Q();
        let mut r = qr.thin_R().to_owned();
        let k = r.nrows();
        // Canonical form: real non-negative R diagonal.
        for d in 0..k.min(r.ncols()) {
            let v = r[(d, d)];
            let mag = v.norm();
            if mag == 0.0 {
                continue;
            }
            let alpha = v / mag;
            let alpha_conj = alpha.conj();
            for j in 0..r.ncols() {
                r[(d, j)] *= alpha_conj;
            }
            for i in 0..q.nrows() {
                q[(i, d)] *= alpha;
            }
        }
        k_total += k;
        factored.push(Factored {
            charge: block.charge,
            rows: block.rows.clone(),
            cols: block.cols.clone(),
            q,
            r,
        });
    }

    let mut q = Mat::<C64>::zeros(mat.nrows(), k_total);
    let mut r = Mat::<C64>::zeros(k_total, mat.ncols());
    let mut bond_charges = Vec::with_capacity(k_total);
    let mut offset = 0usize;
    for f in &factored {
        let k = f.r.nrows();
        for local in 0..k {
            for (a, &ri) in f.rows.iter().enumerate() {
                q[(ri, offset + local)] = f.q[(a, local)];
            }
            for (a, &ci) in f.cols.iter().enumerate() {
                r[(offset + local, ci)] = f.r[(local, a)];
            }
            bond_charges.push(f.charge);
        }
        offset += k;
    }

    Ok(BlockQr { q, r, bond_charges })
}

/// Result of a blocked thin LQ: `A = L · Q` with `Q Qᴴ = I`.
#[derive(Clone, Debug)]
pub struct BlockLq {
    /// `rows × k` lower factor.
    pub l: Mat<C64>,
    /// `k × cols` row isometry.
    pub q: Mat<C64>,
    /// Charge label of each of the `k` new bond indices.
    pub bond_charges: Vec<i64>,
}

/// Blocked thin LQ, implemented as the adjoint of [`qr_blocked`] applied to
/// `Aᴴ`.
pub fn lq_blocked(
    mat: MatRef<'_, C64>,
    row_charges: &[i64],
    col_charges: &[i64],
) -> Result<BlockLq> {
    let mh = mat.adjoint().to_owned();
    let qr = qr_blocked(mh.as_ref(), col_charges, row_charges)?;
    Ok(BlockLq {
        l: qr.r.adjoint().to_owned(),
        q: qr.q.adjoint().to_owned(),
        bond_charges: qr.bond_charges,
    })
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvector columns.
pub fn eigh(mat: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    if mat.nrows() != mat.ncols() {
        return Err(Error::domain(format!(
            "eigh needs a square matrix, got {}x{}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    let eig = mat
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::numerical(format!("Hermitian eigensolve failed: {e:?}")))?;
    let n = mat.nrows();
    let vals: Vec<f64> = (0..n).map(|i| eig.S().column_vector()[i].re).collect();
    Ok((vals, eig.U().to_owned()))
}

/// Test-only builders for random number-conserving gates, shared by the
/// engine test suites.
#[cfg(test)]
pub(crate) mod test_gates {
    use super::{eigh, mat_from_row_major, Mat};
    use crate::rng::standard_normal;
    use crate::C64;
    use rand_chacha::ChaCha12Rng;

    /// Random unitary diagonal 2x2 (number-conserving one-qubit gate).
    pub(crate) fn random_phase_gate(rng: &mut ChaCha12Rng) -> Mat<C64> {
        let a = standard_normal(rng);
        let b = standard_normal(rng);
        let zero = C64::new(0.0, 0.0);
        mat_from_row_major(
            2,
            2,
            &[C64::new(0.0, a).exp(), zero, zero, C64::new(0.0, b).exp()],
        )
    }

    /// Random number-conserving two-qubit unitary: `exp(i H)` of a random
    /// Hermitian H that is block-diagonal over the occupation sectors
    /// `{00}, {01, 10}, {11}`.
    pub(crate) fn random_np_gate(rng: &mut ChaCha12Rng) -> Mat<C64> {
        let c = |re: f64, im: f64| C64::new(re, im);
        let mut h = Mat::<C64>::zeros(4, 4);
        h[(0, 0)] = c(standard_normal(rng), 0.0);
        h[(3, 3)] = c(standard_normal(rng), 0.0);
        h[(1, 1)] = c(standard_normal(rng), 0.0);
        h[(2, 2)] = c(standard_normal(rng), 0.0);
        let off = c(standard_normal(rng), standard_normal(rng));
        h[(1, 2)] = off;
        h[(2, 1)] = off.conj();
        let (vals, vecs) = eigh(h.as_ref()).unwrap();
        let mut expd = Mat::<C64>::zeros(4, 4);
        for (k, &lambda) in vals.iter().enumerate() {
            expd[(k, k)] = c(0.0, lambda).exp();
        }
        let ve = &vecs * &expd;
        &ve * vecs.adjoint()
    }
}
