//! The ZFK phase-plane system in original coordinates.
//!
//! The travelling-wave ansatz `theta(x, t) = theta(z)`, `z = x + c t`, turns
//! the PDE into the planar system
//!
//! ```text
//! theta' = eta,
//! eta'   = c eta - omega(theta, eps),      omega = (1/2 eps^2) theta (1-theta) e^{-(1-theta)/eps},
//! ```
//!
//! with equilibria `p- = (0, 0)` (unburnt) and `p+ = (1, 0)` (burnt). `p-` is
//! a proper unstable node for all relevant parameters and `p+` is a saddle.
//! The system carries the reversal symmetry `(eta, z, c) <-> (-eta, -z, -c)`.
//!
//! All exponential factors are assembled in log space and exponentiated once:
//! `eps^-2 e^{-(1-theta)/eps}` spans hundreds of orders of magnitude over
//! `theta in [0, 1]` at small `eps`, and the product form would produce
//! `0 * inf` where the log-space form underflows gracefully to zero.

use crate::shooting::WaveProfile;
use thiserror::Error;

/// Default admissible overshoot past `theta = 1`, in units of `eps`.
///
/// Shooting trajectories briefly visit `theta = 1 + O(eps)`; anything beyond
/// `1 + eps * THETA_OVERSHOOT_DEFAULT` indicates a runaway trajectory.
pub const THETA_OVERSHOOT_DEFAULT: f64 = 50.0;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("theta = {theta} outside admissible domain [0, {max}]")]
    ThetaOutOfDomain { theta: f64, max: f64 },
    #[error("eps = {eps} must be > 0 here")]
    NonPositiveEps { eps: f64 },
    #[error("eps must be >= 0, got {eps}")]
    NegativeEps { eps: f64 },
    #[error("wave speed c = {c} must be > 0")]
    NonPositiveSpeed { c: f64 },
    #[error("normalised field has no limit on the switching line theta = 1 at eps = 0")]
    SingularLimit,
    #[error("p- is not a node at (c, eps) = ({c}, {eps}): discriminant {disc} < 0")]
    NotANode { c: f64, eps: f64, disc: f64 },
}

/// The parameter pair `(c, eps)` shared by every computation.
///
/// `eps = 0` selects the limiting systems and is accepted only by operations
/// documented as limit-aware.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub c: f64,
    pub eps: f64,
}

impl Params {
    pub fn new(c: f64, eps: f64) -> Result<Self, ModelError> {
        if !(c > 0.0) {
            return Err(ModelError::NonPositiveSpeed { c });
        }
        if !(eps >= 0.0) {
            return Err(ModelError::NegativeEps { eps });
        }
        Ok(Params { c, eps })
    }
}

/// A state `(theta, d theta / d z)` of the phase-plane system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub theta: f64,
    pub eta: f64,
}

impl PhasePoint {
    pub fn new(theta: f64, eta: f64) -> Self {
        PhasePoint { theta, eta }
    }
}

/// Eigenvalues and eigendirections of the node `p-`.
///
/// Eigenvectors are unit length with positive first component, so the slope
/// `v[1] / v[0]` equals the corresponding eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct Linearisation {
    pub lambda_strong: f64,
    pub lambda_weak: f64,
    pub v_strong: [f64; 2],
    pub v_weak: [f64; 2],
}

/// Reaction rate without domain guards; total on `theta` real, `eps >= 0`.
///
/// The sign is split off so the magnitude can be assembled in log space.
/// At `eps = 0` this is the pointwise limit: `0` for `theta < 1`, signed
/// infinity for `theta > 1`.
pub fn reaction_omega_raw(theta: f64, eps: f64) -> f64 {
    if theta == 0.0 || theta == 1.0 {
        return 0.0;
    }
    let sign = if (0.0..=1.0).contains(&theta) {
        1.0
    } else {
        -1.0
    };
    if eps == 0.0 {
        return if theta < 1.0 {
            0.0
        } else {
            sign * f64::INFINITY
        };
    }
    let log_mag =
        theta.abs().ln() + (1.0 - theta).abs().ln() - (1.0 - theta) / eps - (2.0 * eps * eps).ln();
    sign * log_mag.exp()
}

/// Reaction rate on the unit interval, one exponential per call.
///
/// For `theta <= 1` the exponent is non-positive, so the plain product form
/// cannot overflow and underflows gracefully; this is the bulk evaluator for
/// grid sweeps. Agrees with [`reaction_omega_raw`] on `[0, 1]` to rounding.
#[inline]
pub fn reaction_omega_unit(theta: f64, eps: f64) -> f64 {
    0.5 / (eps * eps) * theta * (1.0 - theta) * ((theta - 1.0) / eps).exp()
}

/// Reaction rate `omega(theta, 1/eps)` with a configurable overshoot guard.
pub fn reaction_omega_guarded(theta: f64, eps: f64, overshoot: f64) -> Result<f64, ModelError> {
    if !(eps > 0.0) {
        return Err(ModelError::NonPositiveEps { eps });
    }
    let max = 1.0 + eps * overshoot;
    if !(0.0..=1.0 + eps * overshoot).contains(&theta) {
        return Err(ModelError::ThetaOutOfDomain { theta, max });
    }
    Ok(reaction_omega_raw(theta, eps))
}

/// Reaction rate with the default overshoot guard.
pub fn reaction_omega(theta: f64, eps: f64) -> Result<f64, ModelError> {
    reaction_omega_guarded(theta, eps, THETA_OVERSHOOT_DEFAULT)
}

/// Right-hand side `(eta, c eta - omega)` of the phase-plane system.
pub fn vector_field(p: PhasePoint, params: Params) -> Result<(f64, f64), ModelError> {
    let omega = reaction_omega(p.theta, params.eps)?;
    Ok((p.eta, params.c * p.eta - omega))
}

/// Unguarded right-hand side, for integrator closures.
pub fn vector_field_raw(p: PhasePoint, params: Params) -> (f64, f64) {
    let omega = reaction_omega_raw(p.theta, params.eps);
    (p.eta, params.c * p.eta - omega)
}

/// Phase-plane field divided by the positive factor
/// `eps^-2 (1 + (1/2) e^{(theta-1)/eps})`.
///
/// Same orbits as [`vector_field`] under a rescaled independent variable. The
/// division keeps the right-hand side bounded through `theta > 1` and has a
/// piecewise-smooth limit as `eps -> 0`: `(0, theta (theta - 1))` for
/// `theta > 1` and `(0, 0)` for `theta < 1`, with `theta = 1` the switching
/// line where no limit exists.
pub fn normalized_vector_field(p: PhasePoint, params: Params) -> Result<(f64, f64), ModelError> {
    let (c, eps) = (params.c, params.eps);
    if eps < 0.0 {
        return Err(ModelError::NegativeEps { eps });
    }
    if eps == 0.0 {
        if p.theta == 1.0 {
            return Err(ModelError::SingularLimit);
        }
        return if p.theta > 1.0 {
            Ok((0.0, p.theta * (p.theta - 1.0)))
        } else {
            Ok((0.0, 0.0))
        };
    }
    let x = (p.theta - 1.0) / eps;
    // w = eps^2 / (1 + e^x / 2), sig = (e^x / 2) / (1 + e^x / 2); both forms
    // rearranged so the exponential never overflows.
    let (w, sig) = if x <= 0.0 {
        let ex = x.exp();
        let den = 1.0 + 0.5 * ex;
        (eps * eps / den, 0.5 * ex / den)
    } else {
        let emx = (-x).exp();
        (eps * eps * emx / (emx + 0.5), 1.0 / (1.0 + 2.0 * emx))
    };
    // omega * w telescopes to theta (1 - theta) * sig exactly
    Ok((p.eta * w, c * p.eta * w - p.theta * (1.0 - p.theta) * sig))
}

/// Eigenpairs of the Jacobian at `p- = (0, 0)`.
///
/// Computed from the Jacobian `[[0, 1], [-d, c]]`, `d = (1/2 eps^2) e^{-1/eps}`,
/// rather than from a transcribed closed form; the trace and determinant
/// identities `lambda_s + lambda_w = c`, `lambda_s lambda_w = d` arbitrate.
/// In double precision with `e^{-1/eps}` underflowed this returns
/// `lambda_s = c`, `lambda_w = 0`, `v_s = (1, c)/|.|`, `v_w = (1, 0)`.
pub fn linearize_pminus(params: Params) -> Result<Linearisation, ModelError> {
    let (c, eps) = (params.c, params.eps);
    if !(eps > 0.0) {
        return Err(ModelError::NonPositiveEps { eps });
    }
    // d omega / d theta at theta = 0, in log space
    let d = (-1.0 / eps - (2.0 * eps * eps).ln()).exp();
    let disc = c * c - 4.0 * d;
    if disc < 0.0 {
        return Err(ModelError::NotANode { c, eps, disc });
    }
    let lambda_strong = 0.5 * (c + disc.sqrt());
    // product form avoids cancellation in the small eigenvalue
    let lambda_weak = 2.0 * d / (c + disc.sqrt());
    let unit = |lambda: f64| {
        let n = lambda.hypot(1.0);
        [1.0 / n, lambda / n]
    };
    Ok(Linearisation {
        lambda_strong,
        lambda_weak,
        v_strong: unit(lambda_strong),
        v_weak: unit(lambda_weak),
    })
}

/// The reversal symmetry `(eta, z, c) <-> (-eta, -z, -c)` applied to a profile.
///
/// Samples are re-ordered so `z` stays increasing; applying the map twice
/// reproduces the input bit for bit.
pub fn apply_symmetry(profile: &WaveProfile) -> WaveProfile {
    WaveProfile {
        z: profile.z.iter().rev().map(|&z| -z).collect(),
        theta: profile.theta.iter().rev().copied().collect(),
        eta: profile.eta.iter().rev().map(|&e| -e).collect(),
        segments: profile.segments.iter().rev().copied().collect(),
        c: -profile.c,
        eps: profile.eps,
        slow_truncated: profile.slow_truncated,
        near_minimal_weak: profile.near_minimal_weak,
    }
}
