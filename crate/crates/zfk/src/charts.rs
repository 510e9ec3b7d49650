//! The reactive-diffusive rescaling `K2`, the blow-up chart `K1`, and the
//! corner normal form.
//!
//! `K2` writes `theta = 1 + eps theta2` and yields the regular perturbation
//! problem
//!
//! ```text
//! theta2' = eta,
//! eta'    = (1/2) theta2 e^{theta2} + eps (c eta + (1/2) theta2^2 e^{theta2}),
//! ```
//!
//! whose `eps = 0` limit is Hamiltonian with
//! `H = eta^2/2 - (theta2 - 1) e^{theta2} / 2` and saddle separatrices
//! `h^{s,u}(theta2) = -+ sign(theta2) sqrt(1 + (theta2 - 1) e^{theta2})`.
//!
//! `K1` covers the matching corner between the convective-diffusive zone and
//! `K2` via `(theta, eta, eps) = (1 - r1, eta, r1 eps1)`. The fibered change
//! `eta = -c r1 + f1(y1, eps1)` straightens the invariant manifolds near the
//! corner point; the single passage map is, to first order in `eps1`,
//! `y1 -> y1 + eps1 rho Int_0^delta s^-2 F1(0, y1, s, c) ds` with an
//! infinitely flat drift coefficient `F1`.

use crate::model::{ModelError, Params, PhasePoint};
use crate::quad::{self, QuadError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("eps = {eps} must be > 0 for this chart change")]
    NonPositiveEps { eps: f64 },
    #[error("theta2 = {theta2} exceeds the overflow guard (700)")]
    Overflow { theta2: f64 },
    #[error("sign-domain violation: {what}")]
    SignDomain { what: String },
    #[error("radicand {radicand} < 0 in f1(y1 = {y1}, eps1 = {eps1})")]
    RadicandNegative { y1: f64, eps1: f64, radicand: f64 },
    #[error("denominator f1 - c r1 vanishes in the drift coefficient")]
    DenominatorZero,
    #[error("eta = {eta} too close to 0 for the eta-divided corner field")]
    EtaNearZero { eta: f64 },
    #[error("corner coordinate out of corridor: {what}")]
    OutOfCorridor { what: String },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A state in the reactive-diffusive rescaling `theta = 1 + eps theta2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K2Point {
    pub theta2: f64,
    pub eta: f64,
}

impl K2Point {
    pub fn new(theta2: f64, eta: f64) -> Self {
        K2Point { theta2, eta }
    }
}

/// A state in the blow-up chart `(theta, eta, eps) = (1 - r1, eta, r1 eps1)`.
///
/// The product `eps = r1 * eps1` is conserved along chart flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K1Point {
    pub r1: f64,
    pub eta: f64,
    pub eps1: f64,
}

impl K1Point {
    pub fn new(r1: f64, eta: f64, eps1: f64) -> Self {
        K1Point { r1, eta, eps1 }
    }
}

/// A state in the corner normal-form coordinates `(r1, y1, eps1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormPoint {
    pub r1: f64,
    pub y1: f64,
    pub eps1: f64,
}

/// Corridor and section parameters for the corner passage.
///
/// The entry section is `{r1 = rho}`, the exit section `{eps1 = delta}`, and
/// `y1` is tracked on `I = [1 - beta, 1 + beta]`. Any small positive values
/// work; these defaults keep every positivity precondition satisfied for
/// `eps <= 0.1`.
#[derive(Debug, Clone, Copy)]
pub struct CornerConfig {
    pub rho: f64,
    pub delta: f64,
    pub beta: f64,
}

impl Default for CornerConfig {
    fn default() -> Self {
        CornerConfig {
            rho: 0.1,
            delta: 0.5,
            beta: 0.5,
        }
    }
}

/// `(e1^-1 + 1) e^{-1/e1}`, assembled in log space; exactly 0 at `e1 = 0`.
fn flat_weight(eps1: f64) -> f64 {
    if eps1 == 0.0 {
        0.0
    } else {
        ((1.0 / eps1).ln_1p() - 1.0 / eps1).exp()
    }
}

/// `theta -> theta2 = (theta - 1) / eps`.
pub fn to_k2(p: PhasePoint, eps: f64) -> Result<K2Point, ChartError> {
    if !(eps > 0.0) {
        return Err(ChartError::NonPositiveEps { eps });
    }
    Ok(K2Point::new((p.theta - 1.0) / eps, p.eta))
}

/// `theta2 -> theta = 1 + eps theta2`.
pub fn from_k2(q: K2Point, eps: f64) -> Result<PhasePoint, ChartError> {
    if !(eps > 0.0) {
        return Err(ChartError::NonPositiveEps { eps });
    }
    Ok(PhasePoint::new(1.0 + eps * q.theta2, q.eta))
}

/// Right-hand side of the `K2` system; smooth in `eps >= 0`.
pub fn k2_vector_field(q: K2Point, params: Params) -> Result<(f64, f64), ChartError> {
    if q.theta2 > 700.0 {
        return Err(ChartError::Overflow { theta2: q.theta2 });
    }
    let e = q.theta2.exp();
    Ok((
        q.eta,
        0.5 * q.theta2 * e + params.eps * (params.c * q.eta + 0.5 * q.theta2 * q.theta2 * e),
    ))
}

/// First integral `H = eta^2/2 - (theta2 - 1) e^{theta2} / 2` of the
/// `eps = 0` limit.
pub fn hamiltonian(q: K2Point) -> Result<f64, ChartError> {
    if q.theta2 > 700.0 {
        return Err(ChartError::Overflow { theta2: q.theta2 });
    }
    Ok(0.5 * q.eta * q.eta - 0.5 * (q.theta2 - 1.0) * q.theta2.exp())
}

fn separatrix_radicand(theta2: f64) -> f64 {
    let rad = 1.0 + (theta2 - 1.0) * theta2.exp();
    // touches zero only at theta2 = 0; rounding may dip a hair below
    debug_assert!(rad >= -1e-14, "separatrix radicand {rad} at {theta2}");
    rad.max(0.0)
}

/// Stable separatrix `h^s` of the saddle `(0, 0)` on the level `H = 1/2`.
pub fn separatrix_hs(theta2: f64) -> f64 {
    -theta2.signum() * separatrix_radicand(theta2).sqrt()
}

/// Unstable separatrix `h^u = -h^s`.
pub fn separatrix_hu(theta2: f64) -> f64 {
    -separatrix_hs(theta2)
}

/// `1 - h^s(theta2)` for `theta2 <= 0`, without cancellation in the tail.
///
/// Uses `1 - sqrt(1 - w) = w / (1 + sqrt(1 - w))` with
/// `w = (1 - theta2) e^{theta2}`.
pub fn separatrix_hs_deficit(theta2: f64) -> f64 {
    debug_assert!(theta2 <= 0.0);
    let w = (1.0 - theta2) * theta2.exp();
    w / (1.0 + (1.0 - w).max(0.0).sqrt())
}

/// Cylindrical blow-up `(r, theta_bar, eps_bar) -> (theta, eps)` with
/// `(theta_bar, eps_bar)` on the half-circle `eps_bar >= 0`.
pub fn blowup_map(r: f64, theta_bar: f64, eps_bar: f64) -> Result<(f64, f64), ChartError> {
    if r < 0.0 || eps_bar < 0.0 {
        return Err(ChartError::SignDomain {
            what: format!("blow-up needs r >= 0, eps_bar >= 0 (got r = {r}, eps_bar = {eps_bar})"),
        });
    }
    let s = theta_bar * theta_bar + eps_bar * eps_bar;
    if (s - 1.0).abs() > 1e-12 {
        return Err(ChartError::SignDomain {
            what: format!("(theta_bar, eps_bar) not on the unit circle: |.|^2 = {s}"),
        });
    }
    Ok((1.0 + r * theta_bar, r * eps_bar))
}

/// Chart change `K1 -> K2`: returns `(theta2, eps) = (-1/eps1, r1 eps1)`.
pub fn kappa12(r1: f64, eps1: f64) -> Result<(f64, f64), ChartError> {
    if !(eps1 > 0.0) {
        return Err(ChartError::SignDomain {
            what: format!("kappa12 requires eps1 > 0, got {eps1}"),
        });
    }
    Ok((-1.0 / eps1, r1 * eps1))
}

/// Chart change `K2 -> K1`: returns `(r1, eps1) = (-eps theta2, -1/theta2)`.
pub fn kappa21(theta2: f64, eps: f64) -> Result<(f64, f64), ChartError> {
    if !(theta2 < 0.0) {
        return Err(ChartError::SignDomain {
            what: format!("kappa21 requires theta2 < 0, got {theta2}"),
        });
    }
    Ok((-eps * theta2, -1.0 / theta2))
}

/// `K1` field after desingularisation (right-hand side times `r1`):
/// `(-r1 eta, c r1 eta - (1/2) eps1^-2 (1 - r1) e^{-1/eps1}, eps1 eta)`.
///
/// The flat term is exactly 0 at `eps1 = 0`, making the field smooth on
/// `r1 >= 0`, `eps1 >= 0`.
pub fn k1_vector_field(p: K1Point, params: Params) -> (f64, f64, f64) {
    let flat = if p.eps1 == 0.0 {
        0.0
    } else {
        (-1.0 / p.eps1 - 2.0 * p.eps1.ln() - std::f64::consts::LN_2).exp()
    };
    (
        -p.r1 * p.eta,
        params.c * p.r1 * p.eta - flat * (1.0 - p.r1),
        p.eps1 * p.eta,
    )
}

/// The `K1` field divided by `eta`, valid near the corner where `eta` is
/// positive and order one.
pub fn k1_vector_field_divided(p: K1Point, params: Params) -> Result<(f64, f64, f64), ChartError> {
    if p.eta.abs() < 1e-6 {
        return Err(ChartError::EtaNearZero { eta: p.eta });
    }
    let (dr, de, d1) = k1_vector_field(p, params);
    Ok((dr / p.eta, de / p.eta, d1 / p.eta))
}

/// Normal-form coordinate
/// `y1 = sqrt((eta + c r1)^2 + (eps1^-1 + 1) e^{-1/eps1})`.
pub fn y1_coordinate(p: K1Point, c: f64) -> f64 {
    let a = p.eta + c * p.r1;
    (a * a + flat_weight(p.eps1)).sqrt()
}

/// Inverse offset `f1(y1, eps1) = y1 sqrt(1 - y1^-2 (eps1^-1 + 1) e^{-1/eps1})`,
/// so that `eta = -c r1 + f1(y1, eps1)`.
///
/// On the level `y1 = 1` this is the stable separatrix seen from `K1`:
/// `f1(1, eps1) = h^s(-1/eps1)`.
pub fn f1(y1: f64, eps1: f64) -> Result<f64, ChartError> {
    let radicand = 1.0 - flat_weight(eps1) / (y1 * y1);
    if radicand < 0.0 {
        return Err(ChartError::RadicandNegative { y1, eps1, radicand });
    }
    Ok(y1 * radicand.sqrt())
}

/// Flat drift coefficient of the corner normal form,
/// `F1 = (1/2) y1^-1 eps1^-2 e^{-1/eps1} (f1 - c) / (f1 - c r1)`.
///
/// Infinitely flat in `eps1 -> 0`; exactly 0 at `eps1 = 0`.
pub fn drift_coefficient(r1: f64, y1: f64, eps1: f64, c: f64) -> Result<f64, ChartError> {
    if eps1 == 0.0 {
        return Ok(0.0);
    }
    let f = f1(y1, eps1)?;
    let den = f - c * r1;
    if den == 0.0 {
        return Err(ChartError::DenominatorZero);
    }
    let flat = (-1.0 / eps1 - 2.0 * eps1.ln() - std::f64::consts::LN_2).exp();
    Ok(flat / y1 * (f - c) / den)
}

/// `Int_0^delta s^-2 F1(0, y1, s, c) ds`, the first-order corner correction.
///
/// Substituting `u = 1/s` gives `Int_{1/delta}^inf F1(0, y1, 1/u, c) du` with
/// an integrand decaying like `u^2 e^{-u}`; the upper limit is truncated where
/// the analytic bound `(1/2 y1) B (U^2 + 2U + 2) e^{-U}` falls below `tol`,
/// `B` a crude bound on `|f1 - c| / f1`.
pub fn corner_drift_integral(y1: f64, c: f64, delta: f64, tol: f64) -> Result<f64, ChartError> {
    if !(delta > 0.0) || !(y1 > 0.0) {
        return Err(ChartError::OutOfCorridor {
            what: format!("need delta > 0, y1 > 0 (got delta = {delta}, y1 = {y1})"),
        });
    }
    let a = 1.0 / delta;
    let mut upper = (a + 10.0).max(30.0);
    loop {
        // on [upper, inf): f1(y1, 1/u) >= y1 sqrt(1 - q) with q the flat weight there
        let q = flat_weight(1.0 / upper) / (y1 * y1);
        if q < 0.5 {
            let bound_ratio = (y1 + c) / (y1 * (1.0 - q).sqrt());
            let tail =
                0.5 / y1 * bound_ratio * (upper * upper + 2.0 * upper + 2.0) * (-upper).exp();
            if tail < 0.1 * tol {
                break;
            }
        }
        upper += 10.0;
        if upper > 800.0 {
            break; // e^{-800} underflows; nothing left to bound
        }
    }
    let mut inner_err: Option<ChartError> = None;
    let value = quad::integrate(
        |u| match drift_coefficient(0.0, y1, 1.0 / u, c) {
            Ok(v) => v,
            Err(e) => {
                if inner_err.is_none() {
                    inner_err = Some(e);
                }
                f64::NAN
            }
        },
        a,
        upper,
        tol,
        tol,
    );
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(value?)
}

/// First-order corner passage applied to a full normal-form point on the
/// entry section `{r1 = rho}`: the exit point is
/// `((rho/delta) eps1, Y(y1, eps1, c), delta)` with the first component
/// exact by conservation of `eps = r1 eps1`.
pub fn transition_map_point(
    p: NormalFormPoint,
    c: f64,
    corner: &CornerConfig,
) -> Result<NormalFormPoint, ChartError> {
    if (p.r1 - corner.rho).abs() > 1e-12 {
        return Err(ChartError::OutOfCorridor {
            what: format!("entry section needs r1 = rho, got r1 = {}", p.r1),
        });
    }
    Ok(NormalFormPoint {
        r1: corner.rho / corner.delta * p.eps1,
        y1: transition_map_leading(p.y1, p.eps1, c, corner)?,
        eps1: corner.delta,
    })
}

/// First-order corner passage: the `y1` value on the exit section
/// `{eps1 = delta}` for entry `(rho, y1, eps1)`, truncated at `O(eps1^2)`:
/// `Y = y1 + eps1 rho Int_0^delta s^-2 F1(0, y1, s, c) ds`.
pub fn transition_map_leading(
    y1: f64,
    eps1: f64,
    c: f64,
    corner: &CornerConfig,
) -> Result<f64, ChartError> {
    if !(y1 >= 1.0 - corner.beta && y1 <= 1.0 + corner.beta) {
        return Err(ChartError::OutOfCorridor {
            what: format!("y1 = {y1} outside [1 - beta, 1 + beta]"),
        });
    }
    if !(0.0..=corner.delta).contains(&eps1) {
        return Err(ChartError::OutOfCorridor {
            what: format!("eps1 = {eps1} outside [0, delta]"),
        });
    }
    if eps1 == 0.0 {
        return Ok(y1);
    }
    let correction = corner_drift_integral(y1, c, corner.delta, 1e-13)?;
    Ok(y1 + eps1 * corner.rho * correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn k2_translation_origin() {
        let q = to_k2(PhasePoint::new(1.0, 0.3), 0.05).unwrap();
        assert_eq!(q.theta2, 0.0);
        let q = to_k2(PhasePoint::new(0.9, 0.0), 0.01).unwrap();
        assert_relative_eq!(q.theta2, -10.0, max_relative = 1e-13);
    }

    #[test]
    fn k2_roundtrip_bit_exact_for_pow2_eps() {
        // exact on 1/2 <= theta <= 2, where theta - 1 is computed exactly
        for &eps in &[0.5, 0.25, 0.0625] {
            for &theta in &[0.7, 0.875, 1.25] {
                let p = PhasePoint::new(theta, 0.7);
                let back = from_k2(to_k2(p, eps).unwrap(), eps).unwrap();
                assert_eq!(back.theta.to_bits(), p.theta.to_bits());
                assert_eq!(back.eta.to_bits(), p.eta.to_bits());
            }
        }
        assert!(to_k2(PhasePoint::new(0.5, 0.0), 0.0).is_err());
    }

    #[test]
    fn k2_field_values() {
        let params = Params::new(1.0, 0.0).unwrap();
        assert_eq!(
            k2_vector_field(K2Point::new(0.0, 0.0), params).unwrap(),
            (0.0, 0.0)
        );
        // eps = 0 on the axis: (0, theta2 e^{theta2} / 2)
        for &t2 in &[-2.0, -0.5, 1.0] {
            let (dt, de) = k2_vector_field(K2Point::new(t2, 0.0), params).unwrap();
            assert_eq!(dt, 0.0);
            assert_relative_eq!(de, 0.5 * t2 * t2.exp(), max_relative = 1e-15);
        }
        // independent arithmetic: -e^-1/2 + 0.1 (1 + e^-1/2)
        let params = Params::new(1.0, 0.1).unwrap();
        let (dt, de) = k2_vector_field(K2Point::new(-1.0, 1.0), params).unwrap();
        assert_eq!(dt, 1.0);
        let expected = -0.5 * (-1.0f64).exp() + 0.1 * (1.0 + 0.5 * (-1.0f64).exp());
        assert_relative_eq!(de, expected, max_relative = 1e-14);
        assert!(k2_vector_field(K2Point::new(701.0, 0.0), params).is_err());
    }

    #[test]
    fn hamiltonian_values() {
        assert_eq!(hamiltonian(K2Point::new(0.0, 0.0)).unwrap(), 0.5);
        assert_eq!(hamiltonian(K2Point::new(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(hamiltonian(K2Point::new(0.0, 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn separatrix_values() {
        assert_eq!(separatrix_hs(0.0), 0.0);
        assert_eq!(separatrix_hs(1.0), -1.0);
        // sqrt(1 - 2/e), checked against direct arithmetic
        let expected = (1.0 - 2.0 * (-1.0f64).exp()).sqrt();
        assert_relative_eq!(separatrix_hs(-1.0), expected, max_relative = 1e-15);
        assert_eq!(separatrix_hu(-1.0), -separatrix_hs(-1.0));
        // h^s -> 1 as theta2 -> -inf
        assert!((separatrix_hs(-40.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separatrix_deficit_matches_direct_form() {
        for &t2 in &[-0.5, -2.0, -8.0] {
            assert_relative_eq!(
                separatrix_hs_deficit(t2),
                1.0 - separatrix_hs(t2),
                max_relative = 1e-12
            );
        }
        // far tail: bounded by (|x| + 2) e^{x} / 2
        let x = -40.0;
        let d = separatrix_hs_deficit(x);
        assert!(d <= 2.1e-16 && d > 0.0);
    }

    #[test]
    fn blowup_collapses_origin() {
        for &(tb, eb) in &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (-0.6, 0.8)] {
            assert_eq!(blowup_map(0.0, tb, eb).unwrap(), (1.0, 0.0));
        }
        let (theta, eps) = blowup_map(0.1, -0.6, 0.8).unwrap();
        assert_relative_eq!(theta, 0.94, max_relative = 1e-15);
        assert_relative_eq!(eps, 0.08, max_relative = 1e-15);
        assert!(blowup_map(0.1, 0.5, 0.5).is_err());
        assert!(blowup_map(-0.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn chart_changes_invert() {
        for &eps1 in &[0.1, 0.5, 1.0] {
            for &r1 in &[0.05, 0.2] {
                let (theta2, eps) = kappa12(r1, eps1).unwrap();
                let (r1b, eps1b) = kappa21(theta2, eps).unwrap();
                assert_relative_eq!(r1b, r1, max_relative = 1e-14);
                assert_relative_eq!(eps1b, eps1, max_relative = 1e-14);
            }
        }
        // worked example: theta2 = -10 at eps = 0.01 sits at (r1, eps1) = (0.1, 0.1)
        let (r1, eps1) = kappa21(-10.0, 0.01).unwrap();
        assert_relative_eq!(r1, 0.1, max_relative = 1e-15);
        assert_relative_eq!(eps1, 0.1, max_relative = 1e-15);
        assert!(kappa21(0.5, 0.01).is_err());
        assert!(kappa12(0.1, 0.0).is_err());
    }

    #[test]
    fn k1_field_on_invariant_line() {
        let params = Params::new(1.0, 0.0).unwrap();
        // the corner point q = (0, 1, 0) sits on the line of equilibria
        assert_eq!(
            k1_vector_field(K1Point::new(0.0, 1.0, 0.0), params),
            (0.0, 0.0, 0.0)
        );
        // flat term identically zero at eps1 = 0
        assert_eq!(
            k1_vector_field(K1Point::new(0.1, 1.0, 0.0), params),
            (-0.1, 0.1, 0.0)
        );
        assert!(k1_vector_field_divided(K1Point::new(0.1, 1e-9, 0.2), params).is_err());
    }

    #[test]
    fn y1_f1_inverse_pair() {
        // f1(y1(0, eta, eps1), eps1) = eta on the corridor
        for &eps1 in &[0.2, 0.4, 0.8] {
            for &eta in &[0.6, 0.9, 1.2] {
                let y1 = y1_coordinate(K1Point::new(0.0, eta, eps1), 1.0);
                let back = f1(y1, eps1).unwrap();
                assert_relative_eq!(back, eta, max_relative = 1e-12);
            }
        }
        // base point: r1 = 0, eta = 1, eps1 -> 0 gives y1 -> 1
        assert_eq!(y1_coordinate(K1Point::new(0.0, 1.0, 0.0), 1.3), 1.0);
    }

    #[test]
    fn f1_matches_separatrix_on_unit_level() {
        for &eps1 in &[0.05, 0.2, 0.5, 1.0] {
            let lhs = f1(1.0, eps1).unwrap();
            let rhs = separatrix_hs(-1.0 / eps1);
            assert!(
                (lhs - rhs).abs() <= 1e-12,
                "f1(1, {eps1}) = {lhs} vs h^s = {rhs}"
            );
        }
    }

    #[test]
    fn f1_radicand_guard() {
        // small y1 at moderate eps1 pushes the radicand negative
        assert!(matches!(
            f1(0.3, 1.0),
            Err(ChartError::RadicandNegative { .. })
        ));
    }

    #[test]
    fn drift_coefficient_value() {
        // 0.5 * 0.5^-2 * e^-2 * (f1(1, 0.5) - 1) / f1(1, 0.5); frozen from a
        // high-precision evaluation of that expression
        let v = drift_coefficient(0.0, 1.0, 0.5, 1.0).unwrap();
        assert_relative_eq!(v, -0.080525746512717, max_relative = 1e-12);
        assert_eq!(drift_coefficient(0.2, 1.0, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn drift_flatness_probe() {
        // |F1| <= e^{-1/(2 eps1)}: on the unit level the drift factor
        // (f1 - c) is itself flat, so the bound holds up to eps1 = 0.2;
        // across the corridor the polynomial prefactor needs eps1 <= 0.1
        for &eps1 in &[0.2, 0.1, 0.05] {
            let v = drift_coefficient(0.0, 1.0, eps1, 1.0).unwrap().abs();
            assert!(v <= (-0.5 / eps1).exp(), "flatness fails at eps1={eps1}");
        }
        for &eps1 in &[0.1, 0.05, 0.02] {
            for &y1 in &[0.6, 1.0, 1.4] {
                let v = drift_coefficient(0.0, y1, eps1, 1.0).unwrap().abs();
                assert!(
                    v <= (-0.5 / eps1).exp(),
                    "flatness fails at eps1={eps1}, y1={y1}"
                );
            }
        }
    }

    #[test]
    fn transition_map_identity_at_zero() {
        let corner = CornerConfig::default();
        assert_eq!(transition_map_leading(1.1, 0.0, 1.0, &corner).unwrap(), 1.1);
        assert!(transition_map_leading(2.0, 0.1, 1.0, &corner).is_err());
        assert!(transition_map_leading(1.0, 0.6, 1.0, &corner).is_err());
        // full map shape: exit at ((rho/delta) eps1, Y, delta)
        let p = NormalFormPoint {
            r1: corner.rho,
            y1: 1.0,
            eps1: 0.02,
        };
        let q = transition_map_point(p, 1.0, &corner).unwrap();
        assert_relative_eq!(q.r1, corner.rho / corner.delta * 0.02, max_relative = 1e-15);
        assert_eq!(q.eps1, corner.delta);
        assert!((q.y1 - 1.0).abs() < 1e-3);
    }
}
