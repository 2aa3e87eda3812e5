//! Solves the implicit relation `E = f_δ(E, S̄)` for the strain.
//!
//! Picard iteration from the initial guess, falling back to a damped
//! Newton method on `g(E) = E − f_δ(E, S̄)` when the Picard residual stops
//! contracting. The Hencky/Cauchy variant `H = f_δ(H, T)` is the same
//! problem with different labels.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::symtensor::SymTensor;

const PICARD_MAX: usize = 20;
const MAX_ITER: usize = 200;
const SLOW_RATIO: f64 = 0.9;
const MAX_HALVINGS: usize = 30;
const FD_STEP: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Picard,
    Newton,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub solution: SymTensor,
    pub iterations: usize,
    /// `|E − f_δ(E, S̄)|` at the returned solution.
    pub residual: f64,
    pub method: Method,
    /// Whether `B(E_δ, rδ) ⊆ U_δ` with `rδ = strain_radius/2`.
    pub interior_ball_ok: bool,
}

/// Absolute residual tolerance used by the solver at a given δ.
pub fn tolerance(delta: f64) -> f64 {
    1e-13 * delta.max(1.0)
}

/// Solves `E = f_δ(E, S̄)` starting from `guess` (zero when absent).
pub fn solve_implicit(
    spec: &FamilySpec,
    delta: f64,
    sbar: &SymTensor,
    guess: Option<SymTensor>,
) -> Result<SolveReport> {
    spec.check_delta(delta)?;
    let dom = spec.domain();
    if !dom.contains_stress(sbar) {
        return Err(Error::OutOfDomain {
            what: "stress",
            norm: sbar.frobenius(),
            radius: dom.stress_radius,
        });
    }
    let tol = tolerance(delta);
    let map = |e: &SymTensor| spec.eval(delta, e, sbar);
    let finish = |solution: SymTensor, iterations: usize, residual: f64, method: Method| {
        let interior_ball_ok =
            solution.frobenius() + dom.interior_radius(delta) <= dom.strain_radius(delta);
        SolveReport {
            solution,
            iterations,
            residual,
            method,
            interior_ball_ok,
        }
    };

    let mut e = guess.unwrap_or(SymTensor::ZERO);
    if spec.is_strain_independent() {
        let next = map(&e)?;
        let residual = (next - map(&next)?).frobenius();
        return Ok(finish(next, 1, residual, Method::Picard));
    }

    let mut fe = map(&e)?;
    let mut residual = (e - fe).frobenius();
    let mut iterations = 0;
    let mut best = residual;

    // Picard phase
    while residual > tol && iterations < PICARD_MAX {
        let next = fe;
        let f_next = match map(&next) {
            Ok(v) => v,
            // left the domain: hand over to Newton from the last good iterate
            Err(Error::OutOfDomain { .. }) => break,
            Err(err) => return Err(err),
        };
        let next_residual = (next - f_next).frobenius();
        iterations += 1;
        let ratio = next_residual / residual;
        e = next;
        fe = f_next;
        residual = next_residual;
        best = best.min(residual);
        if ratio > SLOW_RATIO {
            break;
        }
    }
    if residual <= tol {
        return Ok(finish(e, iterations, residual, Method::Picard));
    }

    // Newton phase
    while iterations < MAX_ITER {
        let g = (e - fe).components();
        let jac = jacobian(spec, delta, sbar, &e)?;
        let step = solve6(jac, g.map(|x| -x)).ok_or(Error::NoConvergence {
            iterations,
            best_residual: best,
        })?;
        let step = SymTensor::from_components(step);

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = e + step * lambda;
            if let Ok(f_trial) = map(&trial) {
                let r = (trial - f_trial).frobenius();
                if r < residual || r <= tol {
                    accepted = Some((trial, f_trial, r));
                    break;
                }
            }
            lambda *= 0.5;
        }
        iterations += 1;
        let Some((trial, f_trial, r)) = accepted else {
            // no admissible decrease: either the iterate is pinned at the
            // boundary of U_δ or the residual cannot be reduced further
            let trial = e + step;
            if let Err(err @ Error::OutOfDomain { .. }) = map(&trial) {
                return Err(err);
            }
            return Err(Error::NoConvergence {
                iterations,
                best_residual: best,
            });
        };
        e = trial;
        fe = f_trial;
        residual = r;
        best = best.min(residual);
        if residual <= tol {
            return Ok(finish(e, iterations, residual, Method::Newton));
        }
    }

    Err(Error::NoConvergence {
        iterations,
        best_residual: best,
    })
}

/// Solves `H = f_δ(H, T)` for the Hencky strain given Cauchy stress `T`.
pub fn solve_implicit_hencky(
    spec: &FamilySpec,
    delta: f64,
    t: &SymTensor,
    guess: Option<SymTensor>,
) -> Result<SolveReport> {
    solve_implicit(spec, delta, t, guess)
}

/// Central-difference Jacobian of `g(E) = E − f_δ(E, S̄)` in the six
/// component coordinates.
fn jacobian(spec: &FamilySpec, delta: f64, sbar: &SymTensor, e: &SymTensor) -> Result<[[f64; 6]; 6]> {
    let h = FD_STEP * e.frobenius().max(1.0);
    let x = e.components();
    let mut jac = [[0.0; 6]; 6];
    for j in 0..6 {
        let mut plus = x;
        let mut minus = x;
        plus[j] += h;
        minus[j] -= h;
        let (ep, em) = (SymTensor::from_components(plus), SymTensor::from_components(minus));
        let gp = (ep - spec.eval_unchecked(delta, &ep, sbar)?).components();
        let gm = (em - spec.eval_unchecked(delta, &em, sbar)?).components();
        for i in 0..6 {
            jac[i][j] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Gaussian elimination with partial pivoting.
fn solve6(mut a: [[f64; 6]; 6], mut b: [f64; 6]) -> Option<[f64; 6]> {
    for col in 0..6 {
        let pivot = (col..6).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..6 {
            let factor = a[row][col] / a[col][col];
            for k in col..6 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 6];
    for row in (0..6).rev() {
        let tail: f64 = ((row + 1)..6).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}
