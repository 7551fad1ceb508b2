//! Limited-memory BFGS with a strong-Wolfe line search.
//!
//! A self-contained minimizer for smooth objectives of a few thousand
//! parameters, written against a gradient-providing closure so callers pay
//! one evaluation for the value and gradient together (exactly the cost
//! profile of adjoint-differentiated circuit energies).
//!
//! The line search implements the bracket + zoom scheme with cubic
//! interpolation and safeguarded bisection. A search that only manages
//! sufficient decrease (never the curvature condition) still advances to
//! its best point, skipping the curvature-pair update; a search that cannot
//! even find a decrease stops the run and reports it, which callers treat
//! as a trapped restart rather than an error.

use crate::error::Result;

/// Options for [`minimize`].
#[derive(Clone, Copy, Debug)]
pub struct LbfgsOptions {
    /// Number of curvature pairs retained for the two-loop recursion.
    pub memory: usize,
    /// Iteration cap (accepted steps).
    pub max_iters: usize,
    /// Stop when the gradient infinity-norm falls below this.
    pub grad_tol: f64,
    /// Stop when the decrease of an accepted step falls below this.
    pub energy_tol: f64,
    /// Sufficient-decrease (Armijo) constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    /// Objective-evaluation budget per line search.
    pub max_line_evals: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 10,
            max_iters: 1000,
            grad_tol: 1e-6,
            energy_tol: 1e-7,
            c1: 1e-4,
            c2: 0.9,
            max_line_evals: 30,
        }
    }
}

/// Why the minimizer stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Gradient infinity-norm under `grad_tol`.
    GradientNorm,
    /// Accepted step decreased the objective by less than `energy_tol`.
    EnergyChange,
    /// Iteration budget exhausted.
    MaxIters,
    /// No decrease found along the search direction.
    LineSearchFailure,
}

/// Result of a minimization run.
#[derive(Clone, Debug)]
pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub gradient: Vec<f64>,
    /// Accepted steps taken.
    pub iterations: usize,
    pub stop: StopReason,
    /// Objective value at the start and after every accepted step;
    /// non-increasing by construction.
    pub trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimize `objective(x, grad_out) -> f` starting from `x0`. The closure
/// must fill `grad_out` with the gradient at `x` and may fail (the error is
/// propagated).
pub fn minimize(
    mut objective: impl FnMut(&[f64], &mut [f64]) -> Result<f64>,
    x0: &[f64],
    opts: &LbfgsOptions,
) -> Result<LbfgsOutcome> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = objective(&x, &mut g)?;
    let mut trace = vec![f];

    // curvature pairs, most recent last
    let mut s_list: Vec<Vec<f64>> = Vec::new();
    let mut y_list: Vec<Vec<f64>> = Vec::new();
    let mut rho_list: Vec<f64> = Vec::new();
    let mut gamma = 1.0f64;

    let mut iterations = 0usize;
    let stop = loop {
        if inf_norm(&g) < opts.grad_tol {
            break StopReason::GradientNorm;
        }
        if iterations >= opts.max_iters {
            break StopReason::MaxIters;
        }

        // two-loop recursion for d = -H g
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let m = s_list.len();
        let mut alphas = vec![0.0; m];
        for i in (0..m).rev() {
            let a = rho_list[i] * dot(&s_list[i], &d);
            alphas[i] = a;
            for (dj, yj) in d.iter_mut().zip(&y_list[i]) {
                *dj -= a * yj;
            }
        }
        for dj in d.iter_mut() {
            *dj *= gamma;
        }
        for i in 0..m {
            let b = rho_list[i] * dot(&y_list[i], &d);
            for (dj, sj) in d.iter_mut().zip(&s_list[i]) {
                *dj += (alphas[i] - b) * sj;
            }
        }

        let mut dg = dot(&d, &g);
        if dg >= 0.0 {
            // numerically spoiled curvature memory: restart from steepest
            // descent
            s_list.clear();
            y_list.clear();
            rho_list.clear();
            gamma = 1.0;
            d = g.iter().map(|v| -v).collect();
            dg = dot(&d, &g);
            if dg >= 0.0 {
                // the gradient is exactly zero: a stationary point
                break StopReason::GradientNorm;
            }
        }

        // first step is conservative until a curvature scale exists
        let alpha0 = if s_list.is_empty() && iterations == 0 {
            (1.0 / inf_norm(&g).max(1.0)).min(1.0)
        } else {
            1.0
        };
        let search = line_search(&mut objective, &x, f, &g, &d, dg, alpha0, opts)?;
        let (alpha, f_new, g_new, curvature_ok) = match search {
            Some(step) => step,
            None => break StopReason::LineSearchFailure,
        };

        let mut s = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n {
            s[i] = alpha * d[i];
            x[i] += s[i];
            y[i] = g_new[i] - g[i];
        }
        let decrease = f - f_new;
        f = f_new;
        g = g_new;
        iterations += 1;
        trace.push(f);

        // store the pair only when the search certified curvature and the
        // pair is numerically sound
        let sy = dot(&s, &y);
        if curvature_ok && sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            gamma = sy / dot(&y, &y);
            s_list.push(s);
            y_list.push(y);
            rho_list.push(1.0 / sy);
            if s_list.len() > opts.memory {
                s_list.remove(0);
                y_list.remove(0);
                rho_list.remove(0);
            }
        }

        if decrease.abs() < opts.energy_tol {
            break StopReason::EnergyChange;
        }
    };

    Ok(LbfgsOutcome {
        x,
        f,
        gradient: g,
        iterations,
        stop,
        trace,
    })
}

/// One point evaluated along the ray `x + alpha d`.
struct Probe {
    alpha: f64,
    f: f64,
    /// Directional derivative at the point.
    df: f64,
    g: Vec<f64>,
}

/// Strong-Wolfe line search (bracket, then zoom with cubic interpolation).
/// Returns `(alpha, f, gradient, curvature_ok)` or `None` when no point
/// with sufficient decrease was found within the budget.
#[allow(clippy::too_many_arguments)]
fn line_search(
    objective: &mut impl FnMut(&[f64], &mut [f64]) -> Result<f64>,
    x: &[f64],
    f0: f64,
    g0_vec: &[f64],
    d: &[f64],
    df0: f64,
    alpha0: f64,
    opts: &LbfgsOptions,
) -> Result<Option<(f64, f64, Vec<f64>, bool)>> {
    debug_assert!(df0 < 0.0, "search directions must be descent directions");
    let n = x.len();
    let mut evals = 0usize;
    let mut trial_x = vec![0.0; n];
    let mut best: Option<Probe> = None;

    let mut probe = |alpha: f64,
                     evals: &mut usize,
                     best: &mut Option<Probe>|
     -> Result<Probe> {
        let mut g = vec![0.0; n];
        let mut tx = std::mem::take(&mut trial_x);
        for i in 0..n {
            tx[i] = x[i] + alpha * d[i];
        }
        let f = objective(&tx, &mut g)?;
        trial_x = tx;
        *evals += 1;
        let df = dot(&g, d);
        if f < best.as_ref().map_or(f0, |b| b.f) && f < f0 + opts.c1 * alpha * df0 {
            *best = Some(Probe {
                alpha,
                f,
                df,
                g: g.clone(),
            });
        }
        Ok(Probe { alpha, f, df, g })
    };

    let armijo = |p: &Probe| p.f <= f0 + opts.c1 * p.alpha * df0;
    let curvature = |p: &Probe| p.df.abs() <= opts.c2 * df0.abs();

    // bracketing phase
    const ALPHA_MAX: f64 = 1e6;
    let mut prev = Probe {
        alpha: 0.0,
        f: f0,
        df: df0,
        g: g0_vec.to_vec(),
    };
    let mut alpha = alpha0;
    let mut bracket: Option<(Probe, Probe)> = None;
    while evals < opts.max_line_evals {
        let cur = probe(alpha, &mut evals, &mut best)?;
        if !cur.f.is_finite() {
            // retreat from a blow-up
            alpha = 0.5 * (prev.alpha + alpha) * 0.5;
            if alpha <= f64::EPSILON {
                break;
            }
            continue;
        }
        if !armijo(&cur) || (prev.alpha > 0.0 && cur.f >= prev.f) {
            bracket = Some((prev, cur));
            break;
        }
        if curvature(&cur) {
            return Ok(Some((cur.alpha, cur.f, cur.g, true)));
        }
        if cur.df >= 0.0 {
            bracket = Some((cur, prev));
            break;
        }
        if alpha >= ALPHA_MAX {
            break;
        }
        let next = (2.0 * alpha).min(ALPHA_MAX);
        prev = cur;
        alpha = next;
    }

    // zoom phase: lo satisfies Armijo, the minimum is bracketed by lo/hi
    if let Some((mut lo, mut hi)) = bracket {
        while evals < opts.max_line_evals {
            let span = (hi.alpha - lo.alpha).abs();
            if span < f64::EPSILON * lo.alpha.abs().max(1.0) {
                break;
            }
            let mut a = cubic_minimizer(&lo, &hi);
            let (lo_a, hi_a) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
            let margin = 0.1 * span;
            if !a.is_finite() || a <= lo_a + margin || a >= hi_a - margin {
                a = 0.5 * (lo.alpha + hi.alpha);
            }
            let cur = probe(a, &mut evals, &mut best)?;
            if !armijo(&cur) || cur.f >= lo.f {
                hi = cur;
            } else {
                if curvature(&cur) {
                    return Ok(Some((cur.alpha, cur.f, cur.g, true)));
                }
                if cur.df * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = cur;
            }
        }
    }

    // budget exhausted: settle for the best sufficient-decrease point
    Ok(best.map(|b| (b.alpha, b.f, b.g, false)))
}

/// Minimizer of the cubic interpolant through two points with values and
/// directional derivatives.
fn cubic_minimizer(a: &Probe, b: &Probe) -> f64 {
    let d1 = a.df + b.df - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.df * b.df;
    if disc < 0.0 {
        return f64::NAN;
    }
    let d2 = disc.sqrt().copysign(b.alpha - a.alpha);
    b.alpha - (b.alpha - a.alpha) * (b.df + d2 - d1) / (b.df - a.df + 2.0 * d2)
}
