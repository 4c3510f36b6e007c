//! 1D total-variation denoising.
//!
//! Minimizes `½‖u − f‖² + λ Σ|u[i+1] − u[i]|` through its dual: with `D` the
//! forward difference, `u = f − Dᵀp` and `p` is kept in the box `|p| ≤ λ`.
//! Each iteration takes a projected gradient step of size 1/4 on
//! `½‖f − Dᵀp‖²`, which is below `1/‖D‖²` for every length.
//!
//! The primal point recovered from the dual iterate does not decrease the
//! objective monotonically, so the solver reports the best primal iterate
//! seen so far. Both converge to the same minimizer.

use crate::error::{param, Result};
use crate::volume::ScanVolume;

use super::map_ascans;

const STEP: f64 = 0.25;

/// `½‖u − f‖² + λ·TV(u)`.
pub fn rof_objective(u: &[f64], f: &[f64], lambda: f64) -> f64 {
    let fidelity: f64 = u.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum();
    let tv: f64 = u.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    0.5 * fidelity + lambda * tv
}

/// Stepwise dual solver for one signal.
#[derive(Debug, Clone)]
pub struct Rof1d<'a> {
    f: &'a [f64],
    lambda: f64,
    p: Vec<f64>,
    /// Primal point of the current dual iterate.
    current: Vec<f64>,
    best: Vec<f64>,
    best_objective: f64,
}

impl<'a> Rof1d<'a> {
    pub fn new(f: &'a [f64], lambda: f64) -> Self {
        Self {
            f,
            lambda,
            p: vec![0.0; f.len().saturating_sub(1)],
            current: f.to_vec(),
            best: f.to_vec(),
            best_objective: rof_objective(f, f, lambda),
        }
    }

    /// The lowest-objective primal point so far.
    pub fn u(&self) -> &[f64] {
        &self.best
    }

    pub fn objective(&self) -> f64 {
        self.best_objective
    }

    /// The primal point of the latest dual iterate.
    pub fn dual_primal(&self) -> &[f64] {
        &self.current
    }

    pub fn into_u(self) -> Vec<f64> {
        self.best
    }

    /// One projected gradient step; returns `max |Δu|` of the dual-derived
    /// primal point.
    pub fn step(&mut self) -> f64 {
        let (p, u, f) = (&mut self.p, &mut self.current, self.f);
        if p.is_empty() {
            return 0.0;
        }
        // The dual gradient is D(Dᵀp − f) = −Du, so descent moves p along +Du.
        for (i, pi) in p.iter_mut().enumerate() {
            let du = u[i + 1] - u[i];
            *pi = (*pi + STEP * du).clamp(-self.lambda, self.lambda);
        }
        let n = f.len();
        let mut change = 0.0f64;
        for i in 0..n {
            // (Dᵀp)[i] = p[i-1] − p[i], with p[-1] = p[n-1] = 0.
            let left = if i > 0 { p[i - 1] } else { 0.0 };
            let right = if i + 1 < n { p[i] } else { 0.0 };
            let next = f[i] - (left - right);
            change = change.max((next - u[i]).abs());
            u[i] = next;
        }
        let objective = rof_objective(u, f, self.lambda);
        if objective <= self.best_objective {
            self.best_objective = objective;
            self.best.copy_from_slice(u);
        }
        change
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TvOutcome {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn tv_denoise_signal(f: &[f64], lambda: f64, max_iter: usize, tol: f64) -> TvOutcome {
    let mut solver = Rof1d::new(f, lambda);
    if lambda == 0.0 {
        return TvOutcome {
            u: solver.into_u(),
            iterations: 0,
            converged: true,
        };
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        if solver.step() < tol {
            converged = true;
            break;
        }
    }
    TvOutcome {
        u: solver.into_u(),
        iterations,
        converged,
    }
}

pub fn tv_denoise_1d(
    vol: &ScanVolume,
    lambda: f64,
    max_iter: usize,
    tol: f64,
) -> Result<ScanVolume> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return param(format!("tv lambda must be nonnegative, got {lambda}"));
    }
    if max_iter == 0 {
        return param("tv max_iter must be positive");
    }
    if !(tol.is_finite() && tol > 0.0) {
        return param(format!("tv tol must be positive, got {tol}"));
    }
    Ok(map_ascans(vol, |f, out| {
        out.copy_from_slice(&tv_denoise_signal(f, lambda, max_iter, tol).u)
    }))
}
