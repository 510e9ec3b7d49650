//! The flat slow-manifold series, the slow flow it induces, and the
//! quadratures behind the minimal-speed expansion.
//!
//! The repelling critical manifold `{eta = 0, theta in [0, 1)}` perturbs to an
//! exponentially flat invariant graph
//!
//! ```text
//! eta = h(theta, eps) = sum_k 2^-k F_k(theta, eps) eps^{-3k+1} e^{-k (1-theta)/eps},
//! ```
//!
//! with `F_1 = theta (1 - theta) / c` and the remaining coefficients fixed by
//! the recursion `c F_k = sum_{j<k} (eps d_theta F_j + j F_j) F_{k-j}`. The
//! series is asymptotic, not convergent: the magnitude of the last retained
//! term is reported alongside every evaluation as a truncation proxy.
//!
//! The same module hosts the minimal-speed slope quadratures: the stable
//! separatrix tail integral `I = Int_{-inf}^0 (1 - h^s)` with
//! `cbar'(0) = I - 1`, the delta-independent derivative of the bifurcation
//! function, and the first-order bifurcation residual used to cross-check the
//! shooting result.

use crate::charts::{self, ChartError};
use crate::model::Params;
use crate::quad::{self, QuadError};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error(
        "series domain: theta = {theta} must lie in [0, {max}] (validity breaks near theta = 1)"
    )]
    ThetaOutOfRange { theta: f64, max: f64 },
    #[error("eps = {eps} must be > 0 for the slow-manifold series")]
    NonPositiveEps { eps: f64 },
    #[error("invalid argument: {what}")]
    BadArgument { what: String },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

/// Finitely supported polynomial in `(theta, eps)`.
///
/// Coefficients are keyed by `(theta degree, eps degree)`; the map is ordered
/// so iteration, printing and equality are deterministic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivarPoly {
    coeffs: BTreeMap<(u32, u32), f64>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(coeff: f64, theta_deg: u32, eps_deg: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(coeff, theta_deg, eps_deg);
        p
    }

    pub fn add_term(&mut self, coeff: f64, theta_deg: u32, eps_deg: u32) {
        if coeff == 0.0 {
            return;
        }
        let slot = self.coeffs.entry((theta_deg, eps_deg)).or_insert(0.0);
        *slot += coeff;
        if *slot == 0.0 {
            self.coeffs.remove(&(theta_deg, eps_deg));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, theta_deg: u32, eps_deg: u32) -> f64 {
        self.coeffs
            .get(&(theta_deg, eps_deg))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &f64)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), &c) in other.coeffs.iter() {
            out.add_term(c, i, j);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in self.coeffs.iter() {
            out.add_term(c * factor, i, j);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i1, j1), &c1) in self.coeffs.iter() {
            for (&(i2, j2), &c2) in other.coeffs.iter() {
                out.add_term(c1 * c2, i1 + i2, j1 + j2);
            }
        }
        out
    }

    /// Partial derivative in `theta`.
    pub fn dtheta(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in self.coeffs.iter() {
            if i > 0 {
                out.add_term(c * i as f64, i - 1, j);
            }
        }
        out
    }

    pub fn eval(&self, theta: f64, eps: f64) -> f64 {
        // Horner in theta over coefficient polynomials in eps would be
        // overkill at these degrees; direct powi is exact enough
        self.coeffs
            .iter()
            .map(|(&(i, j), &c)| c * theta.powi(i as i32) * eps.powi(j as i32))
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Exact division by `theta * (1 - theta)`, when the factor divides.
    pub fn div_theta_one_minus_theta(&self) -> Option<Self> {
        // divide by theta: every term needs theta degree >= 1
        let mut by_theta = Self::zero();
        for (&(i, j), &c) in self.coeffs.iter() {
            if i == 0 {
                return None;
            }
            by_theta.add_term(c, i - 1, j);
        }
        // divide by (1 - theta): per eps power, b_i = a_i + b_{i-1}; exact
        // when the highest cumulative sum vanishes
        let mut out = Self::zero();
        let mut eps_degrees: Vec<u32> = by_theta.coeffs.keys().map(|&(_, j)| j).collect();
        eps_degrees.dedup();
        eps_degrees.sort_unstable();
        eps_degrees.dedup();
        for j in eps_degrees {
            let max_i = by_theta
                .coeffs
                .keys()
                .filter(|&&(_, jj)| jj == j)
                .map(|&(i, _)| i)
                .max()
                .unwrap();
            let mut carry = 0.0;
            for i in 0..=max_i {
                carry += by_theta.coeff(i, j);
                if i < max_i {
                    out.add_term(carry, i, j);
                } else if carry != 0.0 {
                    return None; // nonzero remainder
                }
            }
        }
        Some(out)
    }
}

/// Monomial rendering used by the series printer: `th`, `eps` as symbols.
impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), &c) in self.coeffs.iter() {
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            let mut wrote = false;
            if (a - 1.0).abs() > 0.0 || (i, j) == (0, 0) {
                write!(f, "{a}")?;
                wrote = true;
            }
            if i > 0 {
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "th")?;
                if i > 1 {
                    write!(f, "^{i}")?;
                }
                wrote = true;
            }
            if j > 0 {
                if wrote {
                    write!(f, "*")?;
                }
                write!(f, "eps")?;
                if j > 1 {
                    write!(f, "^{j}")?;
                }
            }
        }
        Ok(())
    }
}

/// One evaluation of the truncated slow-manifold series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEval {
    pub eta: f64,
    /// Magnitude of the last retained term: the truncation-error proxy.
    pub last_term: f64,
}

/// The truncated series `F_1 .. F_K` for the flat slow manifold.
///
/// The wave-speed power is factored out: internally the integer-coefficient
/// polynomials `P_k = c^{2k-1} F_k` are stored, which keeps the recursion
/// exact in floating point.
#[derive(Debug, Clone)]
pub struct SlowSeries {
    c: f64,
    /// `P_k` for k = 1..=K; index 0 holds `P_1`.
    p: Vec<BivarPoly>,
}

impl SlowSeries {
    /// Build the series up to order `k_max >= 1` at wave speed `c > 0`.
    pub fn build(c: f64, k_max: usize) -> Result<Self, AsymptoticsError> {
        if !(c > 0.0) || k_max == 0 {
            return Err(AsymptoticsError::BadArgument {
                what: format!("need c > 0 and K >= 1 (got c = {c}, K = {k_max})"),
            });
        }
        // P_1 = theta (1 - theta)
        let mut p = vec![BivarPoly::term(1.0, 1, 0).add(&BivarPoly::term(-1.0, 2, 0))];
        for k in 2..=k_max {
            // P_k = sum_{j=1}^{k-1} (eps d_theta P_j + j P_j) P_{k-j}
            let mut pk = BivarPoly::zero();
            for j in 1..k {
                let mut lhs = p[j - 1].dtheta();
                lhs = lhs
                    .iter()
                    .fold(BivarPoly::zero(), |mut acc, (&(i, jj), &cc)| {
                        acc.add_term(cc, i, jj + 1);
                        acc
                    });
                let lhs = lhs.add(&p[j - 1].scale(j as f64));
                pk = pk.add(&lhs.mul(&p[k - j - 1]));
            }
            p.push(pk);
        }
        Ok(SlowSeries { c, p })
    }

    pub fn order(&self) -> usize {
        self.p.len()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The stored integer-coefficient polynomial `P_k = c^{2k-1} F_k`.
    pub fn p_poly(&self, k: usize) -> &BivarPoly {
        &self.p[k - 1]
    }

    /// The series coefficient `F_k = P_k / c^{2k-1}` as a polynomial.
    pub fn f_poly(&self, k: usize) -> BivarPoly {
        self.p[k - 1].scale(self.c.powi(-(2 * k as i32 - 1)))
    }

    /// Evaluate `F_k(theta, eps)`.
    pub fn f_eval(&self, k: usize, theta: f64, eps: f64) -> f64 {
        self.p[k - 1].eval(theta, eps) * self.c.powi(-(2 * k as i32 - 1))
    }

    /// The k-th series term `2^-k F_k eps^{-3k+1} e^{-k(1-theta)/eps}`,
    /// with the flat prefactor assembled in log space.
    pub fn term(&self, k: usize, theta: f64, eps: f64) -> f64 {
        let kf = k as f64;
        let log_flat = -kf * (1.0 - theta) / eps
            - (3.0 * kf - 1.0) * eps.ln()
            - kf * std::f64::consts::LN_2
            - (2.0 * kf - 1.0) * self.c.ln();
        self.p[k - 1].eval(theta, eps) * log_flat.exp()
    }

    /// Theta-derivative of the k-th series term.
    pub fn term_dtheta(&self, k: usize, theta: f64, eps: f64) -> f64 {
        let kf = k as f64;
        let log_flat = -kf * (1.0 - theta) / eps
            - (3.0 * kf - 1.0) * eps.ln()
            - kf * std::f64::consts::LN_2
            - (2.0 * kf - 1.0) * self.c.ln();
        let p = &self.p[k - 1];
        (p.dtheta().eval(theta, eps) + p.eval(theta, eps) * kf / eps) * log_flat.exp()
    }

    /// Max relative residual of the recursion `c F_k = sum (eps d F_j + j F_j) F_{k-j}`
    /// evaluated in the floating-point `F`-scaled coefficients.
    pub fn recursion_residual(&self, k: usize) -> f64 {
        if k < 2 {
            return 0.0;
        }
        let lhs = self.f_poly(k).scale(self.c);
        let mut rhs = BivarPoly::zero();
        for j in 1..k {
            let fj = self.f_poly(j);
            let mut d = fj.dtheta();
            d = d
                .iter()
                .fold(BivarPoly::zero(), |mut acc, (&(i, jj), &cc)| {
                    acc.add_term(cc, i, jj + 1);
                    acc
                });
            let lhs_j = d.add(&fj.scale(j as f64));
            rhs = rhs.add(&lhs_j.mul(&self.f_poly(k - j)));
        }
        let diff = lhs.sub(&rhs);
        let scale = lhs.max_abs_coeff().max(rhs.max_abs_coeff());
        if scale == 0.0 {
            0.0
        } else {
            diff.max_abs_coeff() / scale
        }
    }

    /// Truncated slow-manifold height `eta = h_K(theta, eps)` with the
    /// last-term magnitude as truncation proxy.
    ///
    /// Valid on `theta in [0, 1 - kappa]`; the default margin
    /// `kappa = min(10 eps, 0.3)` keeps away from `theta = 1`, where the
    /// ordering of successive terms degenerates, without emptying the domain
    /// at the largest eps.
    pub fn eta(&self, theta: f64, eps: f64) -> Result<SeriesEval, AsymptoticsError> {
        self.eta_with_margin(theta, eps, (10.0 * eps).min(0.3))
    }

    pub fn eta_with_margin(
        &self,
        theta: f64,
        eps: f64,
        kappa: f64,
    ) -> Result<SeriesEval, AsymptoticsError> {
        if !(eps > 0.0) {
            return Err(AsymptoticsError::NonPositiveEps { eps });
        }
        let max = 1.0 - kappa;
        if !(0.0..=max).contains(&theta) {
            return Err(AsymptoticsError::ThetaOutOfRange { theta, max });
        }
        let mut eta = 0.0;
        let mut last = 0.0;
        for k in 1..=self.order() {
            last = self.term(k, theta, eps);
            eta += last;
        }
        Ok(SeriesEval {
            eta,
            last_term: last.abs(),
        })
    }
}

/// Slow-manifold height via a freshly built series of order `k_max`.
pub fn slow_manifold_eta(
    theta: f64,
    params: Params,
    k_max: usize,
) -> Result<SeriesEval, AsymptoticsError> {
    SlowSeries::build(params.c, k_max)?.eta(theta, params.eps)
}

/// The reduced flow `d theta / d z = h(theta, eps)` on the slow manifold;
/// positive between the equilibria.
pub fn slow_flow(theta: f64, params: Params, k_max: usize) -> Result<f64, AsymptoticsError> {
    Ok(slow_manifold_eta(theta, params, k_max)?.eta)
}

/// `I = Int_{-inf}^0 (1 - h^s(x)) dx` by adaptive quadrature.
///
/// The lower limit is truncated at `-L` with the analytic tail bound
/// `Int_{-inf}^{-L} (1 - h^s) <= (L + 2) e^{-L} / 2 < tolerance / 2`; the
/// integrand is evaluated in the cancellation-free deficit form.
pub fn hs_tail_integral(tolerance: f64) -> Result<f64, AsymptoticsError> {
    if !(tolerance > 0.0) {
        return Err(AsymptoticsError::BadArgument {
            what: format!("tolerance must be > 0, got {tolerance}"),
        });
    }
    let mut big_l = 5.0f64;
    while (big_l + 2.0) * (-big_l).exp() * 0.5 >= 0.5 * tolerance {
        big_l += 5.0;
        if big_l > 700.0 {
            break;
        }
    }
    let value = quad::integrate(
        charts::separatrix_hs_deficit,
        -big_l,
        0.0,
        0.25 * tolerance,
        1e-14,
    )?;
    Ok(value)
}

fn cached_tail_integral() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| hs_tail_integral(1e-10).expect("tail integral converges"))
}

/// The slope `cbar'(0) = I - 1` of the minimal wave speed at `eps = 0`.
pub fn cbar_slope() -> f64 {
    cached_tail_integral() - 1.0
}

/// Linear approximation `cbar(eps) ~ 1 + (I - 1) eps` of the minimal speed.
pub fn cbar_linear(eps: f64) -> f64 {
    1.0 + cbar_slope() * eps
}

/// The eps-derivative of the bifurcation function at the organising point,
///
/// ```text
/// 1 - f1(1, delta)/delta - (1/2) Int_0^delta s^-4 e^{-1/s} / f1(1, s) ds
///   + Int_delta^inf s^-2 f1(1, s) ds,
/// ```
///
/// which is independent of `delta` and equals `-(I - 1)`. Both integrals are
/// computed after the substitution `u = 1/s`: the first becomes
/// `(1/2) Int_{1/delta}^inf u^2 e^{-u} / h^s(-u) du` (truncated with the
/// `(U^2+2U+2) e^{-U}` tail bound), the second `Int_0^{1/delta} h^s(-u) du`
/// on a finite interval.
pub fn b_eps_derivative(delta: f64, tolerance: f64) -> Result<f64, AsymptoticsError> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(AsymptoticsError::BadArgument {
            what: format!("delta must lie in (0, 1], got {delta}"),
        });
    }
    if !(tolerance > 0.0) {
        return Err(AsymptoticsError::BadArgument {
            what: format!("tolerance must be > 0, got {tolerance}"),
        });
    }
    let a = 1.0 / delta;
    // h^s(-u) >= h^s(-1) ~ 0.514 on [1/delta, inf) since delta <= 1
    let mut upper = a + 20.0;
    while (upper * upper + 2.0 * upper + 2.0) * (-upper).exp() / 0.5 >= 0.1 * tolerance {
        upper += 10.0;
        if upper > 700.0 {
            break;
        }
    }
    let steep = quad::integrate(
        |u| 0.5 * u * u * (-u).exp() / charts::separatrix_hs(-u),
        a,
        upper,
        0.25 * tolerance,
        1e-14,
    )?;
    let flank = quad::integrate(
        |u| charts::separatrix_hs(-u),
        0.0,
        a,
        0.25 * tolerance,
        1e-14,
    )?;
    let f1d = charts::f1(1.0, delta)?;
    Ok(1.0 - f1d / delta - steep + flank)
}

/// First-order bifurcation residual at `(c, eps)`:
/// `B(X, c, eps)` truncated at `O(eps^2)` with
/// `X = c + eps Int_0^delta s^-2 F1(0, c, s, c) ds`.
///
/// Trusted only to `O(eps^2)`; the shooting module is the primary truth and
/// this residual is the cross-check.
pub fn bifurcation_residual_order1(c: f64, eps: f64, delta: f64) -> Result<f64, AsymptoticsError> {
    if !(c > 0.5 && c < 1.5) {
        return Err(AsymptoticsError::BadArgument {
            what: format!("c = {c} outside the corridor (0.5, 1.5)"),
        });
    }
    if !(0.0..=0.1).contains(&eps) {
        return Err(AsymptoticsError::BadArgument {
            what: format!("eps = {eps} outside [0, 0.1]"),
        });
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(AsymptoticsError::BadArgument {
            what: format!("delta must lie in (0, 1], got {delta}"),
        });
    }
    let x = c + eps * charts::corner_drift_integral(c, c, delta, 1e-13)?;
    let a = 1.0 / delta;
    // Int_delta^inf s^-2 f1(1, s) ds = Int_0^{1/delta} h^s(-u) du
    let flank = quad::integrate(|u| charts::separatrix_hs(-u), 0.0, a, 1e-13, 1e-13)?;
    // (1/2) Int_delta^inf s^-4 e^{-1/s} ds has antiderivative; total over
    // (0, inf) is 1
    let half_flat = 1.0 - 0.5 * (a * a + 2.0 * a + 2.0) * (-a).exp();
    let q = c * flank + half_flat;
    let f1x = charts::f1(x, delta)?;
    Ok(0.5 * (x * x - 1.0) - eps * (c / delta * f1x - q))
}

/// Root in `c` of [`bifurcation_residual_order1`] at fixed `(eps, delta)`,
/// by bisection on `(0.9, 1.1 + eps)`.
pub fn bifurcation_speed_order1(eps: f64, delta: f64) -> Result<f64, AsymptoticsError> {
    let mut lo = 0.9;
    let mut hi = 1.1 + eps;
    let flo = bifurcation_residual_order1(lo, eps, delta)?;
    let fhi = bifurcation_residual_order1(hi, eps, delta)?;
    if flo.signum() == fhi.signum() {
        return Err(AsymptoticsError::BadArgument {
            what: format!("no sign change of the residual on [{lo}, {hi}]"),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = bifurcation_residual_order1(mid, eps, delta)?;
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
