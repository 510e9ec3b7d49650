//! Two-sided heteroclinic shooting for the minimal wave speed and full wave
//! profiles.
//!
//! The matching section sits in the rescaled chart at `theta2 = -Theta`,
//! i.e. `theta = 1 - eps Theta`, where the backward continuation of the
//! stable manifold of `p+` is a regular integration and the strong unstable
//! manifold of `p-` arrives along the graph `eta = c theta` plus an
//! exponentially small remainder. The signed gap
//!
//! ```text
//! D(c, eps) = eta_u(c) - eta_s(c)
//! ```
//!
//! is positive exactly in the weak-connection regime `c > cbar(eps)` and
//! vanishes at the strong connection, so a bracketed root-find in `c`
//! delivers `cbar(eps)`.
//!
//! By default the unstable side is continued by numerical integration from a
//! seed on the strong eigendirection rather than by the analytic graph: the
//! graph drops a remainder of size `~ (Theta + 1) e^{-Theta} / 2` at the
//! section (not flat in eps), which moves the root by a few 1e-5 at
//! `Theta = 12` and breaks Theta-robustness of the result. The analytic graph
//! remains available as [`UnstableSide::Graph`] and through
//! [`unstable_eta_at_match`]; [`unstable_eta_validated`] quantifies the
//! difference.

use crate::asymptotics::{AsymptoticsError, SlowSeries};
use crate::charts;
use crate::integrate::{self, Event, IntegrateError, IntegratorConfig, Trajectory};
use crate::model::{self, ModelError, Params, PhasePoint};
use crate::quad;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ShootError {
    #[error("shooting configuration: {what}")]
    Config { what: String },
    #[error("stable-manifold trajectory escaped the corridor at eta = {eta} (c = {c}); c is far outside the bracket")]
    CorridorEscape { c: f64, eta: f64 },
    #[error("stable manifold landed on the slow manifold at theta = {theta} before reaching the section (c = {c})")]
    LandedBeforeSection { c: f64, theta: f64, eta: f64 },
    #[error("trajectory did not reach the matching section (c = {c})")]
    SectionNotReached { c: f64 },
    #[error("no sign change of the gap on [{lo}, {hi}] (gaps {gap_lo:.3e}, {gap_hi:.3e}); configuration error")]
    NoSignChange {
        lo: f64,
        hi: f64,
        gap_lo: f64,
        gap_hi: f64,
    },
    #[error("root iteration stagnated at c = {c} with |gap| = {gap:.3e}")]
    RootStagnation { c: f64, gap: f64 },
    #[error("gap not strictly increasing across the bracket at c = {c1} .. {c2}")]
    GapNotMonotone { c1: f64, c2: f64 },
    #[error("no heteroclinic connection at c = {c}: gap = {gap:.3e} < 0")]
    NoConnection { c: f64, gap: f64 },
    #[error("profile assembly: {what}")]
    Assembly { what: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Chart(#[from] charts::ChartError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
}

/// How the unstable side of the gap is evaluated at the section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnstableSide {
    /// Analytic strong-manifold graph `eta = c theta`, remainder dropped.
    Graph,
    /// Numerical continuation from a seed on the strong eigendirection.
    Integrated,
}

/// Sections, seeds and tolerances for the shooting computations.
#[derive(Debug, Clone)]
pub struct ShootConfig {
    /// Matching-section location `Theta`: the section is `theta2 = -Theta`.
    pub theta_match: f64,
    /// Seed distance from `p-` along `eta = c theta`.
    pub delta0: f64,
    /// Seed distance from `p+` along the stable eigendirection.
    pub delta1: f64,
    /// Initial bracket for the minimal speed; `None` selects `[1, 1 + 4 eps]`.
    pub c_bracket: Option<(f64, f64)>,
    /// Gap tolerance at the root.
    pub root_tol: f64,
    /// Upper end of the bracket expansion.
    pub sigma: f64,
    pub unstable_side: UnstableSide,
    /// Truncation order of the slow-manifold series used for landings.
    pub series_order: usize,
    /// Relative margin for the landing test `eta <= h(theta) (1 + margin)`.
    pub landing_margin: f64,
    /// Absolute floor below which `eta` counts as landed regardless of the
    /// series value (the series underflows at small eps).
    pub landing_eta_floor: f64,
    /// Verify gap monotonicity on a 5-point grid before root-finding.
    pub check_monotone: bool,
    pub integrator: IntegratorConfig,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            theta_match: 12.0,
            delta0: 1e-4,
            delta1: 1e-6,
            c_bracket: None,
            root_tol: 1e-10,
            sigma: 5.0,
            unstable_side: UnstableSide::Integrated,
            series_order: 3,
            landing_margin: 1e-3,
            landing_eta_floor: 1e-9,
            check_monotone: true,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl ShootConfig {
    fn validate(&self, eps: f64) -> Result<(), ShootError> {
        if !(self.theta_match >= 8.0) {
            return Err(ShootError::Config {
                what: format!("Theta = {} must be >= 8", self.theta_match),
            });
        }
        if eps > 0.0 && eps * self.theta_match >= 0.9 {
            return Err(ShootError::Config {
                what: format!(
                    "section theta = 1 - eps Theta = {} too deep; lower Theta for eps = {eps}",
                    1.0 - eps * self.theta_match
                ),
            });
        }
        if !(self.delta1 > 0.0 && self.delta1 < 1e-2) {
            return Err(ShootError::Config {
                what: format!("delta1 = {} must be small and positive", self.delta1),
            });
        }
        if !(self.delta0 > 0.0 && self.root_tol > 0.0) {
            return Err(ShootError::Config {
                what: "delta0 and root_tol must be positive".into(),
            });
        }
        if let Some((lo, hi)) = self.c_bracket {
            if !(lo < hi) {
                return Err(ShootError::Config {
                    what: format!("degenerate bracket [{lo}, {hi}]"),
                });
            }
        }
        Ok(())
    }
}

/// Minimal-speed result with the root-finding trace.
#[derive(Debug, Clone)]
pub struct SpeedResult {
    pub cbar: f64,
    pub gap_at_root: f64,
    /// Every `(c, gap)` evaluation in order.
    pub bracket_history: Vec<(f64, f64)>,
    pub eps: f64,
}

/// Per-sample segment labels of an assembled profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Slow,
    Fast,
    Inner,
}

impl Segment {
    pub fn as_str(self) -> &'static str {
        match self {
            Segment::Slow => "slow",
            Segment::Fast => "fast",
            Segment::Inner => "inner",
        }
    }
}

/// A sampled heteroclinic wave profile `(z, theta(z), eta(z))`.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub z: Vec<f64>,
    pub theta: Vec<f64>,
    pub eta: Vec<f64>,
    pub segments: Vec<Segment>,
    pub c: f64,
    pub eps: f64,
    /// Whether the slow tail was cut by the z budget (its true extent is
    /// exponentially large).
    pub slow_truncated: bool,
    /// Weak profile with `c` close to 1, where the convergence statement to
    /// the singular orbit carries no guarantee.
    pub near_minimal_weak: bool,
}

impl WaveProfile {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Check the structural invariants; used by tests and the verifier.
    pub fn validate(&self) -> Result<(), ShootError> {
        let n = self.len();
        if n < 2 || self.theta.len() != n || self.eta.len() != n || self.segments.len() != n {
            return Err(ShootError::Assembly {
                what: "inconsistent sample arrays".into(),
            });
        }
        for i in 1..n {
            if !(self.z[i] > self.z[i - 1]) {
                return Err(ShootError::Assembly {
                    what: format!("z not increasing at index {i}"),
                });
            }
            if self.theta[i] < self.theta[i - 1] - 1e-12 {
                return Err(ShootError::Assembly {
                    what: format!("theta decreasing at index {i}"),
                });
            }
        }
        let eps = self.eps;
        for (i, (&t, &e)) in self.theta.iter().zip(self.eta.iter()).enumerate() {
            if !(-1e-12..=1.0 + 5.0 * eps).contains(&t) {
                return Err(ShootError::Assembly {
                    what: format!("theta[{i}] = {t} out of [0, 1 + 5 eps]"),
                });
            }
            if e < -1e-9 {
                return Err(ShootError::Assembly {
                    what: format!("eta[{i}] = {e} < -1e-9"),
                });
            }
        }
        if !self.slow_truncated && self.theta[0] > 1e-3 {
            return Err(ShootError::Assembly {
                what: format!("left boundary theta[0] = {} > 1e-3", self.theta[0]),
            });
        }
        if (self.theta[n - 1] - 1.0).abs() > 5.0 * eps || self.eta[n - 1] > 1e-3 {
            return Err(ShootError::Assembly {
                what: "right boundary not at the burnt state".into(),
            });
        }
        Ok(())
    }
}

/// Stable eigenvalue of the saddle `p+` in the rescaled chart:
/// `(eps c - sqrt(eps^2 c^2 + 2)) / 2`.
pub fn k2_stable_eigenvalue(params: Params) -> f64 {
    let ec = params.eps * params.c;
    0.5 * (ec - (ec * ec + 2.0).sqrt())
}

enum StableOutcome {
    Section { eta: f64 },
    Landed { theta: f64, eta: f64 },
}

/// Landing threshold `max(h(theta) (1 + margin), floor)`, total in `theta`.
///
/// The series height is trusted only where its own truncation proxy is a
/// small fraction of the value; outside that region (too close to
/// `theta = 1`, or underflowed at small eps) the absolute floor applies.
fn landing_threshold(series: &SlowSeries, theta: f64, eps: f64, cfg: &ShootConfig) -> f64 {
    let kappa = (10.0 * eps).min(0.3);
    if eps <= 0.0 || theta <= 0.0 || theta >= 1.0 - kappa {
        return cfg.landing_eta_floor;
    }
    match series.eta_with_margin(theta, eps, kappa) {
        Ok(v) if v.eta > 0.0 && v.last_term <= 0.1 * v.eta => {
            (v.eta * (1.0 + cfg.landing_margin)).max(cfg.landing_eta_floor)
        }
        _ => cfg.landing_eta_floor,
    }
}

/// Backward continuation of the stable manifold of `p+` in the rescaled
/// chart, down to the section `theta2 = -Theta` or to a slow-manifold
/// landing, whichever comes first.
fn stable_backward(
    params: Params,
    config: &ShootConfig,
) -> Result<(Trajectory, StableOutcome), ShootError> {
    let (c, eps) = (params.c, params.eps);
    let theta_cap = config.theta_match;
    let lambda = k2_stable_eigenvalue(params);
    let seed = [-config.delta1, -lambda * config.delta1];
    let series = SlowSeries::build(c, config.series_order)?;

    let field = |_z2: f64, y: &[f64], dy: &mut [f64]| match charts::k2_vector_field(
        charts::K2Point::new(y[0], y[1]),
        params,
    ) {
        Ok((a, b)) => {
            dy[0] = a;
            dy[1] = b;
        }
        Err(_) => {
            dy[0] = f64::NAN;
            dy[1] = f64::NAN;
        }
    };
    let events = [
        Event::terminal(move |_z2: f64, y: &[f64]| y[0] + theta_cap),
        Event::terminal(|_z2: f64, y: &[f64]| {
            y[1] - landing_threshold(&series, 1.0 + eps * y[0], eps, config)
        }),
        Event::terminal(move |_z2: f64, y: &[f64]| y[1] - (c + 1.0)),
    ];
    // saddle escape takes ~ sqrt(2) ln(1/delta1); the travel time is bounded
    // by the landing event, so a generous span suffices
    let span = (0.0, -(2.0e4));
    let traj = integrate::integrate(field, &seed, span, &config.integrator, &events)?;
    if !traj.terminated_by_event {
        return Err(ShootError::SectionNotReached { c });
    }
    let hit = traj
        .event_hits
        .last()
        .expect("terminated_by_event implies a hit");
    let outcome = match hit.event_index {
        0 => StableOutcome::Section { eta: hit.state[1] },
        1 => StableOutcome::Landed {
            theta: 1.0 + eps * hit.state[0],
            eta: hit.state[1],
        },
        _ => {
            return Err(ShootError::CorridorEscape {
                c,
                eta: hit.state[1],
            })
        }
    };
    Ok((traj, outcome))
}

/// Strong-manifold graph value `eta = c (1 - eps Theta)` at the section,
/// flat remainder dropped.
pub fn unstable_eta_at_match(params: Params, config: &ShootConfig) -> f64 {
    params.c * (1.0 - params.eps * config.theta_match)
}

/// Numerical continuation of the strong unstable manifold to the section.
///
/// At `eps = 0` the outer system is exactly linear along the fiber and the
/// value is `c` with no integration.
fn unstable_integrated(params: Params, config: &ShootConfig) -> Result<f64, ShootError> {
    let (c, eps) = (params.c, params.eps);
    if eps == 0.0 {
        return Ok(c);
    }
    let theta_m = 1.0 - eps * config.theta_match;
    let seed = [config.delta0, c * config.delta0];
    let field = |_z: f64, y: &[f64], dy: &mut [f64]| {
        let (a, b) = model::vector_field_raw(PhasePoint::new(y[0], y[1]), params);
        dy[0] = a;
        dy[1] = b;
    };
    let events = [Event::terminal(move |_z: f64, y: &[f64]| y[0] - theta_m)];
    let t_end = 3.0 * (theta_m / config.delta0).ln() / c + 20.0;
    let traj = integrate::integrate(field, &seed, (0.0, t_end), &config.integrator, &events)?;
    if !traj.terminated_by_event {
        return Err(ShootError::SectionNotReached { c });
    }
    Ok(traj.event_hits.last().unwrap().state[1])
}

/// Graph value, integrated value and their discrepancy at the section.
#[derive(Debug, Clone, Copy)]
pub struct UnstableValidation {
    pub graph: f64,
    pub integrated: f64,
    pub discrepancy: f64,
}

/// Validation mode of the strong-unstable continuation: quantifies the
/// dropped remainder at the section.
pub fn unstable_eta_validated(
    params: Params,
    config: &ShootConfig,
) -> Result<UnstableValidation, ShootError> {
    let graph = unstable_eta_at_match(params, config);
    let integrated = unstable_integrated(params, config)?;
    Ok(UnstableValidation {
        graph,
        integrated,
        discrepancy: (graph - integrated).abs(),
    })
}

/// Stable-manifold height `eta_s` at the section `theta2 = -Theta`.
pub fn stable_eta_at_match(params: Params, config: &ShootConfig) -> Result<f64, ShootError> {
    config.validate(params.eps)?;
    match stable_backward(params, config)? {
        (_, StableOutcome::Section { eta }) => Ok(eta),
        (_, StableOutcome::Landed { theta, eta }) => Err(ShootError::LandedBeforeSection {
            c: params.c,
            theta,
            eta,
        }),
    }
}

/// The stable manifold of `p+` traced backward in the original `(theta, eta)`
/// plane, ordered by increasing `theta`. Past the matching section the trace
/// is continued with the full system until it lands on the slow manifold,
/// exits at `theta = delta0`, or dives past `eta = -1/4` (sub-minimal
/// speeds). At `eps = 0` the chart part degenerates to the vertical line
/// `theta = 1` carrying the separatrix heights.
pub fn stable_manifold_trace(
    params: Params,
    config: &ShootConfig,
) -> Result<Vec<(f64, f64)>, ShootError> {
    config.validate(params.eps)?;
    let eps = params.eps;
    let (traj, outcome) = stable_backward(params, config)?;
    let mut points: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(traj.states.iter())
        .rev()
        .map(|(_, y)| (1.0 + eps * y[0], y[1]))
        .collect();
    if eps > 0.0 {
        if let StableOutcome::Section { eta: eta_m } = outcome {
            let series = SlowSeries::build(params.c, config.series_order)?;
            let theta_m = 1.0 - eps * config.theta_match;
            let field = |_z: f64, y: &[f64], dy: &mut [f64]| {
                let (a, b) = model::vector_field_raw(PhasePoint::new(y[0], y[1]), params);
                dy[0] = a;
                dy[1] = b;
            };
            let delta0 = config.delta0;
            let events = [
                Event::terminal(move |_z: f64, y: &[f64]| y[0] - delta0),
                Event::terminal(|_z: f64, y: &[f64]| {
                    y[1] - landing_threshold(&series, y[0], eps, config)
                }),
                Event::terminal(|_z: f64, y: &[f64]| y[1] + 0.25),
            ];
            let cont = integrate::integrate(
                field,
                &[theta_m, eta_m],
                (0.0, -400.0),
                &config.integrator,
                &events,
            )?;
            let mut prefix: Vec<(f64, f64)> = cont
                .times
                .iter()
                .zip(cont.states.iter())
                .rev()
                .map(|(_, y)| (y[0], y[1]))
                .collect();
            prefix.pop(); // duplicate of the section point
            prefix.extend(points);
            points = prefix;
        }
    }
    Ok(points)
}

/// The strong unstable manifold of `p-` integrated forward from the
/// eigendirection seed until `theta` reaches `theta_stop` (or `eta` turns
/// negative past the fold for sub-minimal speeds).
pub fn unstable_manifold_trace(
    params: Params,
    config: &ShootConfig,
    theta_stop: f64,
) -> Result<Vec<(f64, f64)>, ShootError> {
    let (c, eps) = (params.c, params.eps);
    if eps == 0.0 {
        // exact fiber eta = c theta in the outer limit
        let n = 200;
        return Ok((0..=n)
            .map(|i| {
                let theta = theta_stop * i as f64 / n as f64;
                (theta, c * theta)
            })
            .collect());
    }
    let seed = [config.delta0, c * config.delta0];
    let field = |_z: f64, y: &[f64], dy: &mut [f64]| {
        let (a, b) = model::vector_field_raw(PhasePoint::new(y[0], y[1]), params);
        dy[0] = a;
        dy[1] = b;
    };
    let events = [
        Event::terminal(move |_z: f64, y: &[f64]| y[0] - theta_stop),
        Event::terminal(|_z: f64, y: &[f64]| y[1] + 1e-6),
    ];
    let t_end = 3.0 * (theta_stop.max(1.0) / config.delta0).ln() / c + 40.0;
    let traj = integrate::integrate(field, &seed, (0.0, t_end), &config.integrator, &events)?;
    Ok(traj
        .times
        .iter()
        .zip(traj.states.iter())
        .map(|(_, y)| (y[0], y[1]))
        .collect())
}

/// Signed matching gap `D(c, eps) = eta_u - eta_s` at the section.
///
/// `D > 0` in the weak-connection regime (`c > cbar`), `D = 0` at the strong
/// connection. A stable side that lands on the slow manifold before reaching
/// the section counts with its landing height, which keeps `D` positive and
/// the bracket search usable far above `cbar`.
pub fn gap(c: f64, eps: f64, config: &ShootConfig) -> Result<f64, ShootError> {
    let params = Params::new(c, eps)?;
    config.validate(eps)?;
    let eta_u = match config.unstable_side {
        UnstableSide::Graph => unstable_eta_at_match(params, config),
        UnstableSide::Integrated => unstable_integrated(params, config)?,
    };
    let eta_s = match stable_backward(params, config)? {
        (_, StableOutcome::Section { eta }) => eta,
        (_, StableOutcome::Landed { eta, .. }) => eta,
    };
    Ok(eta_u - eta_s)
}

/// Minimal wave speed `cbar(eps)` by bracketed bisection-then-secant on the
/// matching gap.
pub fn find_min_speed(eps: f64, config: &ShootConfig) -> Result<SpeedResult, ShootError> {
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(ShootError::Config {
            what: format!("find_min_speed needs eps in (0, 0.1], got {eps}"),
        });
    }
    config.validate(eps)?;
    let mut history: Vec<(f64, f64)> = Vec::new();
    let eval = |c: f64, history: &mut Vec<(f64, f64)>| -> Result<f64, ShootError> {
        let g = gap(c, eps, config)?;
        history.push((c, g));
        Ok(g)
    };

    let (mut lo, mut hi) = config.c_bracket.unwrap_or((1.0, 1.0 + 4.0 * eps));
    let mut g_lo = eval(lo, &mut history)?;
    let mut g_hi = eval(hi, &mut history)?;

    // expand downward to 1 - eps and upward to sigma if the bracket misses
    let floor = 1.0 - eps;
    while g_lo > 0.0 && lo > floor {
        hi = lo;
        g_hi = g_lo;
        lo = (lo - 2.0 * eps).max(floor);
        g_lo = eval(lo, &mut history)?;
    }
    while g_hi < 0.0 && hi < config.sigma {
        lo = hi;
        g_lo = g_hi;
        hi = (hi + 2.0 * (hi - 1.0).max(eps)).min(config.sigma);
        g_hi = eval(hi, &mut history)?;
    }
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(ShootError::NoSignChange {
            lo,
            hi,
            gap_lo: g_lo,
            gap_hi: g_hi,
        });
    }

    if config.check_monotone {
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..5 {
            let c = lo + (hi - lo) * i as f64 / 4.0;
            let g = eval(c, &mut history)?;
            if let Some((pc, pg)) = prev {
                if g <= pg {
                    return Err(ShootError::GapNotMonotone { c1: pc, c2: c });
                }
            }
            prev = Some((c, g));
        }
    }

    // bisection for robustness, then secant for the tail
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        let g_mid = eval(mid, &mut history)?;
        if g_mid.abs() <= config.root_tol {
            return Ok(SpeedResult {
                cbar: mid,
                gap_at_root: g_mid,
                bracket_history: history,
                eps,
            });
        }
        if g_mid < 0.0 {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    let (mut a, mut ga, mut b, mut gb) = (lo, g_lo, hi, g_hi);
    for _ in 0..100 {
        if gb.abs() <= config.root_tol {
            return Ok(SpeedResult {
                cbar: b,
                gap_at_root: gb,
                bracket_history: history,
                eps,
            });
        }
        let mut c_new = b - gb * (b - a) / (gb - ga);
        if !c_new.is_finite() || c_new <= lo || c_new >= hi {
            c_new = 0.5 * (lo + hi);
        }
        if c_new == b || c_new == a {
            c_new = 0.5 * (lo + hi);
            if c_new == a || c_new == b {
                // bracket exhausted at f64 resolution
                return Ok(SpeedResult {
                    cbar: b,
                    gap_at_root: gb,
                    bracket_history: history,
                    eps,
                });
            }
        }
        let g_new = eval(c_new, &mut history)?;
        if g_new < 0.0 {
            lo = c_new;
        } else {
            hi = c_new;
        }
        a = b;
        ga = gb;
        b = c_new;
        gb = g_new;
    }
    Err(ShootError::RootStagnation { c: b, gap: gb })
}

/// [`find_min_speed`] plus the section-robustness check: the root is
/// recomputed with `Theta + 4` and the shift is returned alongside.
pub fn find_min_speed_refined(
    eps: f64,
    config: &ShootConfig,
) -> Result<(SpeedResult, f64), ShootError> {
    let base = find_min_speed(eps, config)?;
    let deeper = ShootConfig {
        theta_match: config.theta_match + 4.0,
        c_bracket: Some((base.cbar - 1e-3, base.cbar + 1e-3)),
        check_monotone: false,
        ..config.clone()
    };
    let refined = find_min_speed(eps, &deeper)?;
    let shift = (refined.cbar - base.cbar).abs();
    Ok((base, shift))
}

/// Assemble the wave profile for speed `c >= cbar(eps)`.
///
/// Three pieces: the stable manifold integrated backward in the rescaled
/// chart (inner), the full system integrated backward from the matched state
/// until it lands on the slow manifold or reaches `theta = delta0` (fast),
/// and, in the weak case, the scalar reduced flow continued down towards
/// `theta = 1e-3` with `z` recovered by quadrature of `d theta / h(theta)`
/// (slow). `z_span` caps the slow tail's extent; the true extent is
/// exponentially large and the cut is reported via `slow_truncated`, not as
/// an error. Samples are shifted so `theta(0) = 1/2`.
pub fn build_profile(
    c: f64,
    eps: f64,
    config: &ShootConfig,
    z_span: f64,
) -> Result<WaveProfile, ShootError> {
    let params = Params::new(c, eps)?;
    config.validate(eps)?;
    if !(eps > 0.0) {
        return Err(ShootError::Config {
            what: "profiles need eps > 0".into(),
        });
    }
    if !(z_span > 0.0) {
        return Err(ShootError::Config {
            what: "z_span must be positive".into(),
        });
    }
    let g = gap(c, eps, config)?;
    if g < -config.root_tol {
        return Err(ShootError::NoConnection { c, gap: g });
    }

    // --- inner: rescaled chart, backward to the section (or to a landing) ---
    let (inner_traj, inner_outcome) = stable_backward(params, config)?;
    let mut z = Vec::new();
    let mut theta = Vec::new();
    let mut eta = Vec::new();
    let mut segments = Vec::new();
    // backward trajectory: reverse so z increases; seed (last pushed) sits at z = 0
    for (t2, y) in inner_traj.times.iter().zip(inner_traj.states.iter()).rev() {
        z.push(eps * t2);
        theta.push(1.0 + eps * y[0]);
        eta.push(y[1]);
        segments.push(Segment::Inner);
    }

    let mut slow_truncated = false;
    let mut weak_case = false;
    let series = SlowSeries::build(c, config.series_order)?;

    let (land_theta, land_z) = match inner_outcome {
        StableOutcome::Landed { theta: th, .. } => {
            weak_case = true;
            (Some(th), z[0])
        }
        StableOutcome::Section { eta: eta_m } => {
            // --- fast: full system backward from the matched state ---
            let theta_m = 1.0 - eps * config.theta_match;
            let field = |_zt: f64, y: &[f64], dy: &mut [f64]| {
                let (a, b) = model::vector_field_raw(PhasePoint::new(y[0], y[1]), params);
                dy[0] = a;
                dy[1] = b;
            };
            let delta0 = config.delta0;
            let events = [
                Event::terminal(move |_zt: f64, y: &[f64]| y[0] - delta0),
                Event::terminal(|_zt: f64, y: &[f64]| {
                    y[1] - landing_threshold(&series, y[0], eps, config)
                }),
            ];
            let traj = integrate::integrate(
                field,
                &[theta_m, eta_m],
                (0.0, -400.0),
                &config.integrator,
                &events,
            )?;
            if !traj.terminated_by_event {
                return Err(ShootError::SectionNotReached { c });
            }
            let hit_index = traj.event_hits.last().unwrap().event_index;
            let z_anchor = z[0]; // section z in profile coordinates
            let mut fast_z = Vec::new();
            let mut fast_theta = Vec::new();
            let mut fast_eta = Vec::new();
            for (zt, y) in traj.times.iter().zip(traj.states.iter()).rev() {
                fast_z.push(z_anchor + zt);
                fast_theta.push(y[0]);
                fast_eta.push(y[1]);
            }
            // prepend fast samples (skip the duplicated match state at the joint)
            let keep = fast_z.len().saturating_sub(1);
            let mut all_z = fast_z[..keep].to_vec();
            let mut all_theta = fast_theta[..keep].to_vec();
            let mut all_eta = fast_eta[..keep].to_vec();
            let mut all_seg = vec![Segment::Fast; keep];
            all_z.extend_from_slice(&z);
            all_theta.extend_from_slice(&theta);
            all_eta.extend_from_slice(&eta);
            all_seg.extend_from_slice(&segments);
            z = all_z;
            theta = all_theta;
            eta = all_eta;
            segments = all_seg;
            if hit_index == 1 {
                weak_case = true;
                (Some(theta[0]), z[0])
            } else {
                (None, z[0])
            }
        }
    };

    // --- slow: reduced flow, weak case only ---
    if let Some(theta_land) = land_theta {
        let mut slow_z = Vec::new();
        let mut slow_theta = Vec::new();
        let mut slow_eta = Vec::new();
        let mut theta_cur = theta_land;
        let mut z_cur = land_z;
        let dz_target = z_span / 60.0;
        let theta_stop = 1e-3;
        loop {
            if theta_cur <= theta_stop {
                break;
            }
            if land_z - z_cur >= z_span {
                slow_truncated = true;
                break;
            }
            let h_cur = series.eta(theta_cur, eps).map(|v| v.eta).unwrap_or(0.0);
            let d_theta = h_cur * dz_target;
            if d_theta < theta_cur * 1e-15 {
                // no representable progress: the tail is flat on this window
                slow_truncated = true;
                let remaining = z_span - (land_z - z_cur);
                let steps = 40;
                for s in 1..=steps {
                    slow_z.push(z_cur - remaining * s as f64 / steps as f64);
                    slow_theta.push(theta_cur);
                    slow_eta.push(h_cur);
                }
                break;
            }
            let theta_next = (theta_cur - d_theta).max(theta_stop);
            let dz = quad::integrate(
                |t| 1.0 / series.eta(t, eps).map(|v| v.eta).unwrap_or(f64::INFINITY),
                theta_next,
                theta_cur,
                0.0,
                1e-10,
            )
            .map_err(AsymptoticsError::from)?;
            z_cur -= dz;
            theta_cur = theta_next;
            slow_z.push(z_cur);
            slow_theta.push(theta_cur);
            slow_eta.push(series.eta(theta_cur, eps).map(|v| v.eta).unwrap_or(0.0));
        }
        // slow samples were produced walking left; reverse and prepend
        let mut all_z: Vec<f64> = slow_z.iter().rev().copied().collect();
        let mut all_theta: Vec<f64> = slow_theta.iter().rev().copied().collect();
        let mut all_eta: Vec<f64> = slow_eta.iter().rev().copied().collect();
        let mut all_seg = vec![Segment::Slow; all_z.len()];
        all_z.extend_from_slice(&z);
        all_theta.extend_from_slice(&theta);
        all_eta.extend_from_slice(&eta);
        all_seg.extend_from_slice(&segments);
        z = all_z;
        theta = all_theta;
        eta = all_eta;
        segments = all_seg;
    }

    // --- centre: theta(0) = 1/2 ---
    let idx = theta.partition_point(|&t| t < 0.5);
    if idx == 0 || idx >= theta.len() {
        return Err(ShootError::Assembly {
            what: "profile does not straddle theta = 1/2".into(),
        });
    }
    let (t0, t1) = (theta[idx - 1], theta[idx]);
    let frac = if t1 > t0 { (0.5 - t0) / (t1 - t0) } else { 0.0 };
    let z_half = z[idx - 1] + frac * (z[idx] - z[idx - 1]);
    for v in z.iter_mut() {
        *v -= z_half;
    }

    // strictly increasing z: drop any coincident joints left by event hits
    let mut zz = Vec::with_capacity(z.len());
    let mut tt = Vec::with_capacity(z.len());
    let mut ee = Vec::with_capacity(z.len());
    let mut ss = Vec::with_capacity(z.len());
    for i in 0..z.len() {
        if let Some(&last) = zz.last() {
            if !(z[i] > last) {
                continue;
            }
        }
        zz.push(z[i]);
        tt.push(theta[i]);
        ee.push(eta[i]);
        ss.push(segments[i]);
    }

    Ok(WaveProfile {
        z: zz,
        theta: tt,
        eta: ee,
        segments: ss,
        c,
        eps,
        slow_truncated,
        near_minimal_weak: weak_case && c < 1.1,
    })
}

/// Distance from a point to the singular heteroclinic
/// `Gamma(c) = Gamma^0 u Gamma^1 u Gamma^2` in the `(theta, eta)` plane:
/// the slow segment `[0, 1 - 1/c] x {0}`, the fast fiber from
/// `(1 - 1/c, 0)` to `(1, 1)`, and the inner segment `{1} x [0, 1]`.
pub fn gamma_distance(theta: f64, eta: f64, c: f64) -> f64 {
    fn seg_dist(px: f64, py: f64, ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
        let (vx, vy) = (bx - ax, by - ay);
        let len2 = vx * vx + vy * vy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((px - ax) * vx + (py - ay) * vy) / len2).clamp(0.0, 1.0)
        };
        let (dx, dy) = (ax + t * vx - px, ay + t * vy - py);
        (dx * dx + dy * dy).sqrt()
    }
    let t_land = (1.0 - 1.0 / c).max(0.0);
    let d0 = seg_dist(theta, eta, 0.0, 0.0, t_land, 0.0);
    let d1 = seg_dist(theta, eta, t_land, 0.0, 1.0, 1.0);
    let d2 = seg_dist(theta, eta, 1.0, 0.0, 1.0, 1.0);
    d0.min(d1).min(d2)
}

/// One-sided Hausdorff distance of a profile trace to `Gamma(c)`:
/// the largest distance of any sample from the singular set.
pub fn profile_gamma_distance(profile: &WaveProfile) -> f64 {
    profile
        .theta
        .iter()
        .zip(profile.eta.iter())
        .map(|(&t, &e)| gamma_distance(t, e, profile.c))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> ShootConfig {
        ShootConfig::default()
    }

    #[test]
    fn unstable_graph_values() {
        let config = cfg();
        // eps = 0: the section sits at theta = 1
        assert_eq!(
            unstable_eta_at_match(Params::new(1.5, 0.0).unwrap(), &config),
            1.5
        );
        assert_relative_eq!(
            unstable_eta_at_match(Params::new(1.0, 0.01).unwrap(), &config),
            0.88,
            max_relative = 1e-15
        );
    }

    #[test]
    fn unstable_validation_small_discrepancy() {
        // the dropped remainder is ~ (Theta + 1) e^{-Theta} / 2 at the section
        let config = cfg();
        let v = unstable_eta_validated(Params::new(1.0, 0.05).unwrap(), &config).unwrap();
        assert!(v.discrepancy <= 1e-4, "discrepancy = {}", v.discrepancy);
        assert!(v.discrepancy > 1e-6, "remainder should be visible");
    }

    #[test]
    fn stable_matches_separatrix_at_limit() {
        // eps = 0: pure Hamiltonian flow; eta at the section equals h^s(-Theta)
        let config = cfg();
        let eta = stable_eta_at_match(Params::new(1.0, 0.0).unwrap(), &config).unwrap();
        let expected = charts::separatrix_hs(-12.0);
        assert!(
            (eta - expected).abs() < 1e-8,
            "eta = {eta} vs h^s(-12) = {expected}"
        );
        // and the whole backward orbit lies on the level H = 1/2
        let params = Params::new(1.0, 0.0).unwrap();
        let (traj, _) = stable_backward(params, &config).unwrap();
        for y in traj.states.iter().step_by(7) {
            let h = charts::hamiltonian(charts::K2Point::new(y[0], y[1])).unwrap();
            assert!((h - 0.5).abs() < 1e-8, "H drift: {}", (h - 0.5).abs());
        }
    }

    #[test]
    fn stable_seed_tangency() {
        // at eps = 0 the seed direction is (1, -1/sqrt 2); the eps-perturbed
        // eigenvalue deviates by O(eps)
        let l0 = k2_stable_eigenvalue(Params::new(1.0, 0.0).unwrap());
        assert_relative_eq!(l0, -1.0 / 2.0f64.sqrt(), max_relative = 1e-15);
        let l = k2_stable_eigenvalue(Params::new(1.0, 0.02).unwrap());
        assert!((l - l0).abs() < 0.02 && (l - l0).abs() > 1e-4);
    }

    #[test]
    fn gap_values_at_limit() {
        let config = cfg();
        // frozen from the separatrix formula: 1 - h^s(-12)
        let g = gap(1.0, 0.0, &config).unwrap();
        let expected = 1.0 - charts::separatrix_hs(-12.0);
        assert!((g - expected).abs() < 1e-8);
        assert!((expected - 3.9938e-5).abs() < 1e-9);
        let g15 = gap(1.5, 0.0, &config).unwrap();
        assert!((g15 - (1.5 - charts::separatrix_hs(-12.0))).abs() < 1e-8);
    }

    #[test]
    fn gap_brackets_minimal_speed() {
        let config = cfg();
        let eps = 0.01;
        let below = crate::asymptotics::cbar_linear(eps) - 0.5 * eps;
        let above = crate::asymptotics::cbar_linear(eps) + 0.5 * eps;
        assert!(gap(below, eps, &config).unwrap() < 0.0);
        assert!(gap(above, eps, &config).unwrap() > 0.0);
    }

    #[test]
    fn min_speed_at_desk_scale() {
        let config = cfg();
        let r = find_min_speed(0.01, &config).unwrap();
        assert!(r.gap_at_root.abs() <= config.root_tol);
        assert!((r.cbar - 1.0034405).abs() < 5e-4, "cbar = {}", r.cbar);
        assert!(r.cbar > 1.0);
        // history records a sign change across the final bracket
        let has_neg = r.bracket_history.iter().any(|&(_, g)| g < 0.0);
        let has_pos = r.bracket_history.iter().any(|&(_, g)| g > 0.0);
        assert!(has_neg && has_pos);
    }

    #[test]
    fn profile_strong_two_segments() {
        let config = cfg();
        let eps = 0.02;
        let r = find_min_speed(eps, &config).unwrap();
        let p = build_profile(r.cbar, eps, &config, 30.0).unwrap();
        p.validate().unwrap();
        assert!(!p.segments.contains(&Segment::Slow));
        assert!(p.segments.contains(&Segment::Fast));
        assert!(p.segments.contains(&Segment::Inner));
        assert!(!p.slow_truncated);
        // monotone rise from ~0 to ~1 and centred at 1/2
        assert!(p.theta[0] <= 1e-3);
        let idx = p.theta.partition_point(|&t| t < 0.5);
        assert!(p.z[idx - 1] <= 0.0 && p.z[idx] >= 0.0);
        // strong case hugs the fiber eta = c theta on the way up
        for (&t, &e) in p.theta.iter().zip(p.eta.iter()) {
            if t > config.delta0 * 2.0 && t < 0.5 {
                assert!(
                    (e - r.cbar * t).abs() < 1e-6,
                    "strong tangency off at theta = {t}"
                );
            }
        }
    }

    #[test]
    fn profile_weak_three_segments_truncated() {
        let config = cfg();
        let p = build_profile(1.5, 0.02, &config, 30.0).unwrap();
        assert!(p.segments.contains(&Segment::Slow));
        assert!(p.segments.contains(&Segment::Fast));
        assert!(p.segments.contains(&Segment::Inner));
        assert!(p.slow_truncated, "slow tail extent is exponentially large");
        assert!(!p.near_minimal_weak);
        p.validate().unwrap();
    }

    #[test]
    fn profile_rejects_subminimal_speed() {
        let config = cfg();
        let err = build_profile(0.9, 0.01, &config, 30.0).unwrap_err();
        assert!(matches!(err, ShootError::NoConnection { .. }));
    }

    #[test]
    fn gamma_distance_pieces() {
        // points on each piece have distance zero
        assert_eq!(gamma_distance(0.2, 0.0, 1.5), 0.0);
        assert!(gamma_distance(0.5, 1.5 * 0.5 - 0.5, 1.5) < 1e-15);
        assert_eq!(gamma_distance(1.0, 0.7, 1.5), 0.0);
        // interior point: nearest piece wins
        let d = gamma_distance(0.9, 0.0, 1.5);
        let fiber = (0.9f64 * 1.5 - 0.5 - 0.0).abs() / (1.0f64 + 1.5 * 1.5).sqrt();
        assert!(d <= fiber + 1e-15);
    }

    #[test]
    fn config_validation() {
        let mut config = cfg();
        config.theta_match = 6.0;
        assert!(config.validate(0.01).is_err());
        let mut config = cfg();
        config.theta_match = 12.0;
        assert!(config.validate(0.1).is_err(), "eps Theta too deep");
        assert!(find_min_speed(0.2, &cfg()).is_err());
    }
}
