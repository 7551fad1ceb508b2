//! Two-site DMRG ground-state search over a matrix-product operator.
//!
//! Each bond update contracts the fixed left/right environments with the
//! two operator tensors into an effective two-site Hamiltonian, solves its
//! lowest eigenpair by Lanczos started from the current wavefunction, and
//! splits the result back with a charge-blocked SVD. Because the Lanczos
//! basis is generated purely by operator applications, the iteration stays
//! exactly inside the particle-number sector of the starting state.
//!
//! The bond-dimension cap follows a doubling schedule (16, 32, 64, ... up
//! to the configured maximum), which keeps early sweeps cheap while they fix
//! the gross structure of the state.
//!
//! One pitfall of this qubit chain is inherited from the fermion encoding:
//! every hopping term acts on qubits two apart, so its Pauli string spans
//! three chain sites. Inside a two-site window a hop therefore contributes
//! only through environment fluctuations — for an exact product state those
//! vanish identically and the sweep has nothing to improve (the product
//! state is a fixed point of the update, stable to machine precision). The
//! model-level driver therefore starts from the checkerboard configuration
//! passed through a short deterministic sweep of number-conserving
//! entangling gates, which puts fluctuations on every bond without leaving
//! the sector. Callers supplying their own start should avoid exact product
//! states for the same reason.

use faer::{Mat, MatRef};

use crate::ed::lanczos_lowest;
use crate::error::{Error, Result};
use crate::gates::np_gate;
use crate::jw::jordan_wigner;
use crate::lattice::{checkerboard_occupation, QubitLayout};
use crate::linalg::Truncation;
use crate::model::HubbardModel;
use crate::mpo::{transfer_left, transfer_right, Mpo};
use crate::mps::MpsState;
use crate::tensor::Tensor4;
use crate::C64;

/// Knobs for a DMRG run.
#[derive(Clone, Copy, Debug)]
pub struct DmrgOptions {
    /// Bond-dimension cap reached by the doubling schedule.
    pub chi_max: usize,
    /// Maximum number of full (right+left) sweeps.
    pub max_sweeps: usize,
    /// Convergence threshold on the energy change between sweeps, checked
    /// only once the schedule has reached `chi_max`.
    pub energy_tol: f64,
    /// Relative singular-value cutoff for bond truncations.
    pub cutoff: f64,
}

impl Default for DmrgOptions {
    fn default() -> Self {
        DmrgOptions {
            chi_max: 128,
            max_sweeps: 24,
            energy_tol: 1e-10,
            cutoff: 1e-14,
        }
    }
}

/// Result of a DMRG run.
#[derive(Clone, Debug)]
pub struct DmrgOutcome {
    /// `<psi|H|psi>` of the final state (exact recontraction, not the last
    /// local eigenvalue).
    pub energy: f64,
    pub state: MpsState,
    /// Local ground energy at the end of each full sweep.
    pub sweep_energies: Vec<f64>,
    /// Whether the energy change fell below `energy_tol` at full bond
    /// dimension before the sweep budget ran out.
    pub converged: bool,
}

/// Local Lanczos policy: a modest span is plenty because every solve warm
/// starts from the current two-site wavefunction.
const LOCAL_SPAN: usize = 24;
const LOCAL_CYCLES: usize = 20;

/// Density-matrix mixing weight added while the bond cap binds, and the
/// number of capped sweeps it anneals over. Truncation under a hard cap can
/// lock in a suboptimal charge distribution across bonds (each block's
/// singular values only compete locally); mixing in the
/// partially-applied-operator directions lets starved sectors nucleate.
const MIX_BASE: f64 = 1e-3;
const MIX_CAP_SWEEPS: usize = 4;
/// A sweep whose total relative discarded weight stays below this is
/// treated as exact (float dust only), which switches mixing off.
const EXACT_DISCARD: f64 = 1e-13;

fn chi_for_sweep(sweep: usize, cap: usize) -> usize {
    (16usize << sweep.min(24)).min(cap)
}

/// Ground-state DMRG for a Hubbard model: builds the qubit operator, the
/// warm start, and sweeps under `opts`.
pub fn ground_state_for_model(
    model: &HubbardModel,
    layout: &QubitLayout,
    opts: &DmrgOptions,
) -> Result<DmrgOutcome> {
    let h = jordan_wigner(model, layout)?;
    let mpo = Mpo::from_pauli_sum(&h)?;
    let occ = checkerboard_occupation(&model.geometry, layout);
    let start = entangled_start(&occ, opts.chi_max, opts.cutoff)?;
    ground_state(&mpo, &start, opts)
}

/// Checkerboard product state passed through one up and one down sweep of
/// fixed-angle number-conserving pair rotations. Entirely deterministic;
/// the varying angles avoid accidental symmetries between bonds.
pub fn entangled_start(occupations: &[u8], chi_max: usize, cutoff: f64) -> Result<MpsState> {
    let mut psi = MpsState::product_state(occupations, chi_max, cutoff)?;
    let n = psi.n_sites();
    for q in 0..n.saturating_sub(1) {
        let g = np_gate(0.30 + 0.05 * (q % 3) as f64, 0.0);
        psi.apply_two_qubit_gate(q, g.as_ref())?;
    }
    for q in (0..n.saturating_sub(1)).rev() {
        let g = np_gate(0.25 + 0.05 * (q % 2) as f64, 0.0);
        psi.apply_two_qubit_gate(q, g.as_ref())?;
    }
    Ok(psi)
}

/// Two-site DMRG on an explicit operator and starting state.
pub fn ground_state(h: &Mpo, start: &MpsState, opts: &DmrgOptions) -> Result<DmrgOutcome> {
    let n = h.n_sites();
    if start.n_sites() != n {
        return Err(Error::domain("operator/state length mismatch"));
    }
    if n < 2 {
        return Err(Error::domain("two-site sweeps need at least two sites"));
    }
    let mut psi = start.clone();
    psi.set_chi_max(opts.chi_max)?;
    psi.move_center_to(0)?;

    // environments around the active window: left[i] covers sites < i,
    // right[i] covers sites >= i; both edges are scalar seeds
    let mut left: Vec<Mat<C64>> = vec![Mat::identity(1, 1); n + 1];
    let mut right: Vec<Mat<C64>> = vec![Mat::identity(1, 1); n + 1];
    for i in (1..n).rev() {
        right[i] = transfer_right(
            right[i + 1].as_ref(),
            psi.tensor(i),
            h.tensor(i),
            psi.tensor(i),
        );
    }

    let mut sweep_energies: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut prev_exact = false;
    let mut prev_clean = false;
    let mut prev_e = f64::NAN;
    let mut cap_sweeps = 0usize;
    for sweep in 0..opts.max_sweeps {
        let chi = chi_for_sweep(sweep, opts.chi_max);
        let at_cap = chi >= opts.chi_max;
        if at_cap {
            cap_sweeps += 1;
        }
        let trunc = Truncation::new(chi, opts.cutoff);
        // anneal the mixing: full strength while the schedule still grows,
        // decaying over the first capped sweeps, off once the state is
        // effectively exact or the annealing is finished
        let alpha = if prev_exact {
            0.0
        } else if !at_cap {
            MIX_BASE
        } else if cap_sweeps <= MIX_CAP_SWEEPS {
            MIX_BASE * 0.3f64.powi(cap_sweeps as i32)
        } else {
            0.0
        };
        let clean = alpha == 0.0;
        // local solves only need full accuracy once mixing is over
        let tol = if clean { 1e-12 } else { 1e-9 };

        let mut e = f64::NAN;
        let mut discard = 0.0f64;
        for i in 0..n - 1 {
            let (le, ld) = local_update(
                &mut psi,
                h,
                left[i].as_ref(),
                right[i + 2].as_ref(),
                i,
                trunc,
                true,
                tol,
                alpha,
            )?;
            e = le;
            discard += ld;
            left[i + 1] = transfer_left(
                left[i].as_ref(),
                psi.tensor(i),
                h.tensor(i),
                psi.tensor(i),
            );
        }
        for i in (0..n - 1).rev() {
            let (le, ld) = local_update(
                &mut psi,
                h,
                left[i].as_ref(),
                right[i + 2].as_ref(),
                i,
                trunc,
                false,
                tol,
                alpha,
            )?;
            e = le;
            discard += ld;
            right[i + 1] = transfer_right(
                right[i + 2].as_ref(),
                psi.tensor(i + 1),
                h.tensor(i + 1),
                psi.tensor(i + 1),
            );
        }
        sweep_energies.push(e);

        if clean && prev_clean && (e - prev_e).abs() < opts.energy_tol {
            converged = true;
            break;
        }
        prev_e = e;
        prev_clean = clean;
        prev_exact = discard <= EXACT_DISCARD;
    }

    let energy = h.expectation(&psi)?;
    Ok(DmrgOutcome {
        energy,
        state: psi,
        sweep_energies,
        converged,
    })
}

/// Solve the effective two-site problem at `(site, site+1)` and write the
/// result back; returns the local ground energy and the relative weight
/// discarded by the split.
#[allow(clippy::too_many_arguments)]
fn local_update(
    psi: &mut MpsState,
    h: &Mpo,
    lenv: MatRef<'_, C64>,
    renv: MatRef<'_, C64>,
    site: usize,
    trunc: Truncation,
    center_right: bool,
    tol: f64,
    alpha: f64,
) -> Result<(f64, f64)> {
    let a = psi.tensor(site).as_left_matrix();
    let b = psi.tensor(site + 1).as_right_matrix();
    let theta0 = &a * &b;
    let dl = psi.tensor(site).dl;
    let dr = psi.tensor(site + 1).dr;
    let w1 = h.tensor(site);
    let w2 = h.tensor(site + 1);

    let dim = dl * 4 * dr;
    let mut v0 = Vec::with_capacity(dim);
    for row in 0..dl * 2 {
        for col in 0..2 * dr {
            v0.push(theta0[(row, col)]);
        }
    }
    let matvec = |x: &[C64], y: &mut [C64]| apply_heff(lenv, renv, w1, w2, dl, dr, x, y);
    let (energy, v) = lanczos_lowest(dim, matvec, v0, LOCAL_SPAN, tol, LOCAL_CYCLES)?;

    let theta = Mat::from_fn(dl * 2, 2 * dr, |row, col| v[row * 2 * dr + col]);
    let discard = if alpha > 0.0 {
        let mut noise = if center_right {
            expansion_right(lenv, w1, dl, dr, &v)
        } else {
            expansion_left(renv, w2, dl, dr, &v)
        };
        let tr: f64 = (0..noise.nrows())
            .map(|i| (0..noise.ncols()).map(|j| noise[(i, j)].norm_sqr()).sum::<f64>())
            .sum();
        if tr > 1e-300 {
            // theta is normalized, so this adds exactly alpha to the trace
            let s = C64::new((alpha / tr).sqrt(), 0.0);
            for i in 0..noise.nrows() {
                for j in 0..noise.ncols() {
                    noise[(i, j)] *= s;
                }
            }
            psi.set_two_site_mixed(site, theta.as_ref(), noise.as_ref(), trunc, center_right)?
        } else {
            psi.set_two_site(site, theta.as_ref(), trunc, center_right)?
        }
    } else {
        psi.set_two_site(site, theta.as_ref(), trunc, center_right)?
    };
    Ok((energy, discard))
}

/// Directions for enriching the left basis of a right-moving split: the
/// images of the wavefunction under the left environment and first operator
/// tensor, one column group per middle operator wire,
/// `out[(l', p1'), (wm, p2, r)]`.
fn expansion_right(
    lenv: MatRef<'_, C64>,
    w1: &Tensor4,
    dl: usize,
    dr: usize,
    x: &[C64],
) -> Mat<C64> {
    let d0 = w1.dl;
    let d1 = w1.dr;
    let xm = Mat::from_fn(dl, 4 * dr, |l, c| x[l * 4 * dr + c]);
    let xl = lenv * xm.as_ref();
    let mut x2 = Mat::<C64>::zeros(dl * 2 * dr, d0 * 2);
    for l in 0..dl {
        for wl in 0..d0 {
            for p1 in 0..2 {
                for p2 in 0..2 {
                    for r in 0..dr {
                        x2[((l * 2 + p2) * dr + r, wl * 2 + p1)] =
                            xl[(l * d0 + wl, (p1 * 2 + p2) * dr + r)];
                    }
                }
            }
        }
    }
    let mut w1m = Mat::<C64>::zeros(d0 * 2, 2 * d1);
    for wl in 0..d0 {
        for po in 0..2 {
            for pi in 0..2 {
                for wm in 0..d1 {
                    w1m[(wl * 2 + pi, po * d1 + wm)] = w1.get(wl, po, pi, wm);
                }
            }
        }
    }
    let ym = &x2 * &w1m;
    let mut xp = Mat::<C64>::zeros(dl * 2, d1 * 2 * dr);
    for l in 0..dl {
        for p1o in 0..2 {
            for p2 in 0..2 {
                for r in 0..dr {
                    for wm in 0..d1 {
                        xp[(l * 2 + p1o, (wm * 2 + p2) * dr + r)] =
                            ym[((l * 2 + p2) * dr + r, p1o * d1 + wm)];
                    }
                }
            }
        }
    }
    xp
}

/// Mirror of [`expansion_right`] for a left-moving split: images under the
/// right environment and second operator tensor, one row group per middle
/// operator wire, `out[(wm, l, p1), (p2', r')]`.
fn expansion_left(
    renv: MatRef<'_, C64>,
    w2: &Tensor4,
    dl: usize,
    dr: usize,
    x: &[C64],
) -> Mat<C64> {
    let d1 = w2.dl;
    let d2 = w2.dr;
    let xm = Mat::from_fn(dl * 4, dr, |row, r| x[row * dr + r]);
    let mut rm = Mat::<C64>::zeros(dr, d2 * dr);
    for r in 0..dr {
        for wr in 0..d2 {
            for rp in 0..dr {
                rm[(r, wr * dr + rp)] = renv[(rp * d2 + wr, r)];
            }
        }
    }
    let g = &xm * &rm; // rows (l, p1, p2), cols (wr, r')
    let mut f2 = Mat::<C64>::zeros(dl * 2 * dr, 2 * d2);
    for l in 0..dl {
        for p1 in 0..2 {
            for p2 in 0..2 {
                for rp in 0..dr {
                    for wr in 0..d2 {
                        f2[((l * 2 + p1) * dr + rp, p2 * d2 + wr)] =
                            g[((l * 2 + p1) * 2 + p2, wr * dr + rp)];
                    }
                }
            }
        }
    }
    let mut w2n = Mat::<C64>::zeros(2 * d2, d1 * 2);
    for wm in 0..d1 {
        for po in 0..2 {
            for pi in 0..2 {
                for wr in 0..d2 {
                    w2n[(pi * d2 + wr, wm * 2 + po)] = w2.get(wm, po, pi, wr);
                }
            }
        }
    }
    let h = &f2 * &w2n; // rows (l, p1, r'), cols (wm, p2')
    let mut zp = Mat::<C64>::zeros(d1 * dl * 2, 2 * dr);
    for wm in 0..d1 {
        for l in 0..dl {
            for p1 in 0..2 {
                for po in 0..2 {
                    for rp in 0..dr {
                        zp[((wm * dl + l) * 2 + p1, po * dr + rp)] =
                            h[((l * 2 + p1) * dr + rp, wm * 2 + po)];
                    }
                }
            }
        }
    }
    zp
}

/// `y = H_eff x` for the two-site window, with
/// `x[l, p1, p2, r]` flattened row-major. The contraction order is
/// left environment, first operator tensor, second operator tensor, right
/// environment; each step is one matrix product between permuted copies.
fn apply_heff(
    lenv: MatRef<'_, C64>,
    renv: MatRef<'_, C64>,
    w1: &Tensor4,
    w2: &Tensor4,
    dl: usize,
    dr: usize,
    x: &[C64],
    y: &mut [C64],
) {
    let d0 = w1.dl;
    let d1 = w1.dr;
    let d2 = w2.dr;
    debug_assert_eq!(w2.dl, d1);
    debug_assert_eq!(lenv.nrows(), dl * d0);
    debug_assert_eq!(lenv.ncols(), dl);
    debug_assert_eq!(renv.nrows(), dr * d2);
    debug_assert_eq!(renv.ncols(), dr);
    debug_assert_eq!(x.len(), dl * 4 * dr);
    debug_assert_eq!(y.len(), dl * 4 * dr);

    // xl[(l', wl), (p1, p2, r)] = sum_l L[(l', wl), l] x[l, p1, p2, r]
    let xm = Mat::from_fn(dl, 4 * dr, |l, c| x[l * 4 * dr + c]);
    let xl = lenv * xm.as_ref();

    // regroup and contract the first operator tensor over (wl, p1)
    let mut x2 = Mat::<C64>::zeros(dl * 2 * dr, d0 * 2);
    for l in 0..dl {
        for wl in 0..d0 {
            for p1 in 0..2 {
                for p2 in 0..2 {
                    for r in 0..dr {
                        x2[((l * 2 + p2) * dr + r, wl * 2 + p1)] =
                            xl[(l * d0 + wl, (p1 * 2 + p2) * dr + r)];
                    }
                }
            }
        }
    }
    let mut w1m = Mat::<C64>::zeros(d0 * 2, 2 * d1);
    for wl in 0..d0 {
        for po in 0..2 {
            for pi in 0..2 {
                for wm in 0..d1 {
                    w1m[(wl * 2 + pi, po * d1 + wm)] = w1.get(wl, po, pi, wm);
                }
            }
        }
    }
    let ym = &x2 * &w1m; // rows (l', p2, r), cols (p1', wm)

    // regroup and contract the second operator tensor over (wm, p2)
    let mut y2 = Mat::<C64>::zeros(dl * 2 * dr, d1 * 2);
    for l in 0..dl {
        for p1o in 0..2 {
            for p2 in 0..2 {
                for r in 0..dr {
                    for wm in 0..d1 {
                        y2[((l * 2 + p1o) * dr + r, wm * 2 + p2)] =
                            ym[((l * 2 + p2) * dr + r, p1o * d1 + wm)];
                    }
                }
            }
        }
    }
    let mut w2m = Mat::<C64>::zeros(d1 * 2, 2 * d2);
    for wm in 0..d1 {
        for po in 0..2 {
            for pi in 0..2 {
                for wr in 0..d2 {
                    w2m[(wm * 2 + pi, po * d2 + wr)] = w2.get(wm, po, pi, wr);
                }
            }
        }
    }
    let zm = &y2 * &w2m; // rows (l', p1', r), cols (p2', wr)

    // regroup and close with the right environment over (wr, r)
    let mut z2 = Mat::<C64>::zeros(dl * 4, d2 * dr);
    for l in 0..dl {
        for p1o in 0..2 {
            for p2o in 0..2 {
                for r in 0..dr {
                    for wr in 0..d2 {
                        z2[((l * 2 + p1o) * 2 + p2o, wr * dr + r)] =
                            zm[((l * 2 + p1o) * dr + r, p2o * d2 + wr)];
                    }
                }
            }
        }
    }
    let mut rm = Mat::<C64>::zeros(d2 * dr, dr);
    for rp in 0..dr {
        for wr in 0..d2 {
            for r in 0..dr {
                rm[(wr * dr + r, rp)] = renv[(rp * d2 + wr, r)];
            }
        }
    }
    let om = &z2 * &rm; // rows (l', p1', p2'), cols r'
    for row in 0..dl * 4 {
        for rp in 0..dr {
            y[row * dr + rp] = om[(row, rp)];
        }
    }
}
