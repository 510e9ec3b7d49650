//! Adaptive explicit Runge–Kutta integration with embedded error estimation
//! and event (section-crossing) detection.
//!
//! The stepper is the Dormand–Prince 5(4) pair (FSAL, 7 stages) with an
//! elementary controller. Event functions are scalar; each sign change over
//! an accepted step is localised by bisection on the step's dense output,
//! which comes for free from the stage derivatives and keeps the reported
//! event state on the trajectory to integration accuracy. Backward
//! integration (`t1 < t0`) is supported throughout.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("step size underflow at t = {t} (h = {h:.3e} < h_min = {h_min:.3e}); stiffness or a singularity")]
    StepUnderflow { t: f64, h: f64, h_min: f64 },
    #[error("max_steps = {max_steps} exceeded at t = {t}")]
    MaxStepsExceeded { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("invalid integrator configuration: {what}")]
    BadConfig { what: String },
}

/// Tolerances and step bounds for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_init: 1e-4,
            h_min: 1e-14,
            h_max: 10.0,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), IntegrateError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(IntegrateError::BadConfig {
                what: format!(
                    "tolerances must be > 0 (rel {}, abs {})",
                    self.rel_tol, self.abs_tol
                ),
            });
        }
        if !(0.0 < self.h_min && self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return Err(IntegrateError::BadConfig {
                what: format!(
                    "need 0 < h_min <= h_init <= h_max (got {}, {}, {})",
                    self.h_min, self.h_init, self.h_max
                ),
            });
        }
        if self.max_steps == 0 {
            return Err(IntegrateError::BadConfig {
                what: "max_steps must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// Scalar event function of `(t, y)`.
pub type EventFn<'a> = Box<dyn Fn(f64, &[f64]) -> f64 + 'a>;

/// A scalar event function; a sign change triggers localisation.
pub struct Event<'a> {
    pub g: EventFn<'a>,
    pub terminal: bool,
}

impl<'a> Event<'a> {
    pub fn terminal(g: impl Fn(f64, &[f64]) -> f64 + 'a) -> Self {
        Event {
            g: Box::new(g),
            terminal: true,
        }
    }
    pub fn observer(g: impl Fn(f64, &[f64]) -> f64 + 'a) -> Self {
        Event {
            g: Box::new(g),
            terminal: false,
        }
    }
}

/// A localised event crossing.
#[derive(Debug, Clone)]
pub struct EventHit {
    pub event_index: usize,
    pub time: f64,
    pub state: Vec<f64>,
}

/// Accepted steps of one integration, in integration order.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub event_hits: Vec<EventHit>,
    /// Set when a terminal event stopped the run before the span end.
    pub terminated_by_event: bool,
}

impl Trajectory {
    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }
    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }
}

// Dormand-Prince 5(4) tableau
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// difference between the 5th- and 4th-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// dense-output weights of the 5(4) pair (the interpolant's extra polynomial
// comes free from the seven stages)
const D: [f64; 7] = [
    -12_715_105_075.0 / 11_282_082_432.0,
    0.0,
    87_487_479_700.0 / 32_700_410_799.0,
    -10_690_763_975.0 / 1_880_347_072.0,
    701_980_252_875.0 / 199_316_789_632.0,
    -1_453_857_185.0 / 822_651_844.0,
    69_997_945.0 / 29_380_423.0,
];

/// Fourth-order dense output over one accepted step, built from the stage
/// derivatives; accurate to the same order as the step itself, which keeps
/// event states on the trajectory to integration tolerance.
struct DenseStep {
    c1: Vec<f64>,
    c2: Vec<f64>,
    c3: Vec<f64>,
    c4: Vec<f64>,
    c5: Vec<f64>,
}

impl DenseStep {
    fn new(h: f64, y0: &[f64], y1: &[f64], k: &[Vec<f64>]) -> Self {
        let n = y0.len();
        let mut c1 = vec![0.0; n];
        let mut c2 = vec![0.0; n];
        let mut c3 = vec![0.0; n];
        let mut c4 = vec![0.0; n];
        let mut c5 = vec![0.0; n];
        for i in 0..n {
            let ydiff = y1[i] - y0[i];
            let bspl = h * k[0][i] - ydiff;
            c1[i] = y0[i];
            c2[i] = ydiff;
            c3[i] = bspl;
            c4[i] = ydiff - h * k[6][i] - bspl;
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += D[j] * kj[i];
            }
            c5[i] = h * acc;
        }
        DenseStep { c1, c2, c3, c4, c5 }
    }

    fn eval(&self, theta: f64, out: &mut [f64]) {
        let s1 = 1.0 - theta;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.c1[i]
                + theta * (self.c2[i] + s1 * (self.c3[i] + theta * (self.c4[i] + s1 * self.c5[i])));
        }
    }
}

/// Integrate `dy/dt = field(t, y)` over `span`, recording every accepted step.
///
/// Each sign change of an event function is localised to `|dt| <= 1e-12` on
/// the step interpolant and recorded; the first terminal event truncates the
/// trajectory at the hit.
pub fn integrate<F>(
    mut field: F,
    y0: &[f64],
    span: (f64, f64),
    config: &IntegratorConfig,
    events: &[Event],
) -> Result<Trajectory, IntegrateError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    config.validate()?;
    let (t0, t1) = span;
    if t0 == t1 {
        return Err(IntegrateError::BadConfig {
            what: "degenerate span".into(),
        });
    }
    let dir = (t1 - t0).signum();
    let n = y0.len();

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f_now = vec![0.0; n];
    field(t, &y, &mut f_now);
    if !f_now.iter().all(|v| v.is_finite()) {
        return Err(IntegrateError::NonFiniteState { t });
    }

    let mut traj = Trajectory {
        times: vec![t],
        states: vec![y.clone()],
        event_hits: Vec::new(),
        terminated_by_event: false,
    };
    let mut g_now: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();

    let mut h = dir * config.h_init.min((t1 - t0).abs());
    let mut k = vec![vec![0.0; n]; 7];
    k[0].copy_from_slice(&f_now);
    let mut y_stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut steps = 0usize;

    loop {
        if (t - t1) * dir >= 0.0 {
            return Ok(traj);
        }
        if steps >= config.max_steps {
            return Err(IntegrateError::MaxStepsExceeded {
                t,
                max_steps: config.max_steps,
            });
        }
        steps += 1;

        // clip the last step to land on t1 exactly
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }

        // stages 2..7 (k[0] is FSAL from the previous step)
        for s in 0..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    acc += A[s][j] * kj[i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            let ts = t + C[s] * h;
            let (head, tail) = k.split_at_mut(s + 1);
            let _ = head;
            field(ts, &y_stage, &mut tail[0]);
        }
        // 5th-order solution is stage 7's argument (b row == a7 row)
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                acc += A[5][j] * kj[i];
            }
            y_new[i] = y[i] + h * acc;
        }

        if !y_new.iter().all(|v| v.is_finite()) {
            // retry with a smaller step before giving up
            h *= 0.25;
            if h.abs() < config.h_min {
                return Err(IntegrateError::NonFiniteState { t });
            }
            field(t, &y, &mut k[0]);
            continue;
        }

        // embedded error estimate
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let scale = config.abs_tol + config.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            // accepted; k[6] is f(t + h, y_new) by the FSAL property
            let t_new = t + h;
            let f_new = k[6].clone();

            let mut earliest: Option<f64> = None;
            let mut hits_this_step: Vec<(f64, usize, Vec<f64>)> = Vec::new();
            let mut dense: Option<DenseStep> = None;
            for (ie, ev) in events.iter().enumerate() {
                let g1 = (ev.g)(t_new, &y_new);
                if g_now[ie] != 0.0 && (g_now[ie] < 0.0) != (g1 < 0.0) {
                    let dense = dense.get_or_insert_with(|| DenseStep::new(h, &y, &y_new, &k));
                    // bisect on the dense interpolant
                    let (mut lo, mut hi) = (0.0f64, 1.0f64);
                    let mut glo = g_now[ie];
                    let mut y_mid = vec![0.0; n];
                    while (hi - lo) * h.abs() > 1e-13 {
                        let mid = 0.5 * (lo + hi);
                        dense.eval(mid, &mut y_mid);
                        let gm = (ev.g)(t + mid * h, &y_mid);
                        if (gm < 0.0) == (glo < 0.0) {
                            lo = mid;
                            glo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                    let theta_hit = 0.5 * (lo + hi);
                    dense.eval(theta_hit, &mut y_mid);
                    hits_this_step.push((theta_hit, ie, y_mid.clone()));
                    if ev.terminal {
                        match earliest {
                            Some(th) if th <= theta_hit => {}
                            _ => earliest = Some(theta_hit),
                        }
                    }
                }
                g_now[ie] = g1;
            }
            hits_this_step.sort_by(|a, b| a.0.total_cmp(&b.0));

            if let Some(theta_term) = earliest {
                for (th, ie, ys) in hits_this_step {
                    if th <= theta_term {
                        traj.event_hits.push(EventHit {
                            event_index: ie,
                            time: t + th * h,
                            state: ys.clone(),
                        });
                        if th == theta_term {
                            traj.times.push(t + th * h);
                            traj.states.push(ys);
                        }
                    }
                }
                traj.terminated_by_event = true;
                return Ok(traj);
            }
            for (th, ie, ys) in hits_this_step {
                traj.event_hits.push(EventHit {
                    event_index: ie,
                    time: t + th * h,
                    state: ys,
                });
            }

            t = t_new;
            y.copy_from_slice(&y_new);
            f_now.copy_from_slice(&f_new);
            k[0].copy_from_slice(&f_now);
            traj.times.push(t);
            traj.states.push(y.clone());
        }

        // step-size update (both accepted and rejected)
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() > config.h_max {
            h = dir * config.h_max;
        }
        if h.abs() < config.h_min {
            return Err(IntegrateError::StepUnderflow {
                t,
                h: h.abs(),
                h_min: config.h_min,
            });
        }
    }
}

/// Largest per-step defect of a sampled solution against `field`.
///
/// For each consecutive sample pair, re-integrates the step at tolerances a
/// hundredfold tighter and returns the max component mismatch at the step end.
/// This is the honest "samples satisfy the ODE" measure for adaptively spaced
/// output.
pub fn max_step_defect<F>(
    field: F,
    times: &[f64],
    states: &[Vec<f64>],
    config: &IntegratorConfig,
) -> Result<f64, IntegrateError>
where
    F: FnMut(f64, &[f64], &mut [f64]) + Copy,
{
    let tight = IntegratorConfig {
        rel_tol: (config.rel_tol * 1e-2).max(1e-15),
        abs_tol: (config.abs_tol * 1e-2).max(1e-16),
        h_init: config.h_init.min(1e-6),
        ..*config
    };
    let mut worst = 0.0f64;
    for i in 0..times.len() - 1 {
        if times[i] == times[i + 1] {
            continue;
        }
        let traj = integrate(field, &states[i], (times[i], times[i + 1]), &tight, &[])?;
        let end = traj.last_state();
        for (a, b) in end.iter().zip(states[i + 1].iter()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -y[0];
    }

    #[test]
    fn scalar_decay() {
        let cfg = IntegratorConfig::default();
        let traj = integrate(decay, &[1.0], (0.0, 1.0), &cfg, &[]).unwrap();
        let exact = (-1.0f64).exp();
        assert!((traj.last_state()[0] - exact).abs() < 10.0 * cfg.rel_tol);
        assert_eq!(traj.last_time(), 1.0);
    }

    #[test]
    fn backward_forward_roundtrip() {
        let cfg = IntegratorConfig::default();
        let field = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let fwd = integrate(field, &[1.0, 0.0], (0.0, 3.0), &cfg, &[]).unwrap();
        let back = integrate(field, fwd.last_state(), (3.0, 0.0), &cfg, &[]).unwrap();
        let y = back.last_state();
        assert!((y[0] - 1.0).abs() < 100.0 * cfg.rel_tol);
        assert!(y[1].abs() < 100.0 * cfg.rel_tol);
    }

    #[test]
    fn self_convergence_under_tightening() {
        // halving both tolerances never worsens the terminal error against a
        // much tighter reference
        let stiffish = |t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = (t * y[0]).sin() - 0.5 * y[0];
        };
        let reference = {
            let cfg = IntegratorConfig {
                rel_tol: 1e-13,
                abs_tol: 1e-15,
                ..Default::default()
            };
            integrate(stiffish, &[1.0], (0.0, 5.0), &cfg, &[])
                .unwrap()
                .last_state()[0]
        };
        let mut errs = Vec::new();
        for k in 0..4 {
            let scale = 0.5f64.powi(k);
            let cfg = IntegratorConfig {
                rel_tol: 1e-8 * scale,
                abs_tol: 1e-10 * scale,
                ..Default::default()
            };
            let v = integrate(stiffish, &[1.0], (0.0, 5.0), &cfg, &[])
                .unwrap()
                .last_state()[0];
            errs.push((v - reference).abs());
        }
        for w in errs.windows(2) {
            assert!(
                w[1] <= w[0].max(1e-13),
                "tightening worsened error: {errs:?}"
            );
        }
    }

    #[test]
    fn event_localisation() {
        // y' = 1, event at y = 0.5: hit at t = 0.5 exactly
        let cfg = IntegratorConfig::default();
        let field = |_t: f64, _y: &[f64], dy: &mut [f64]| {
            dy[0] = 1.0;
        };
        let ev = [Event::terminal(|_t, y: &[f64]| y[0] - 0.5)];
        let traj = integrate(field, &[0.0], (0.0, 2.0), &cfg, &ev).unwrap();
        assert!(traj.terminated_by_event);
        let hit = &traj.event_hits[0];
        assert!((hit.time - 0.5).abs() < 1e-12);
        assert!((hit.state[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn observer_event_does_not_stop() {
        let cfg = IntegratorConfig::default();
        let field = |t: f64, _y: &[f64], dy: &mut [f64]| {
            dy[0] = t.cos();
        };
        // y = sin t crosses 0.5 twice in (0, pi)
        let ev = [Event::observer(|_t, y: &[f64]| y[0] - 0.5)];
        let traj = integrate(field, &[0.0], (0.0, std::f64::consts::PI), &cfg, &ev).unwrap();
        assert!(!traj.terminated_by_event);
        assert_eq!(traj.event_hits.len(), 2);
        for hit in &traj.event_hits {
            assert!((hit.state[0] - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn nonfinite_state_detected() {
        let cfg = IntegratorConfig {
            h_min: 1e-10,
            ..Default::default()
        };
        // finite-time blow-up: y' = y^2, y(0) = 1 blows up at t = 1
        let field = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0] * y[0];
        };
        let err = integrate(field, &[1.0], (0.0, 2.0), &cfg, &[]).unwrap_err();
        assert!(matches!(
            err,
            IntegrateError::StepUnderflow { .. } | IntegrateError::NonFiniteState { .. }
        ));
    }

    #[test]
    fn max_steps_guard() {
        let cfg = IntegratorConfig {
            max_steps: 5,
            h_max: 1e-3,
            h_init: 1e-3,
            ..Default::default()
        };
        let err = integrate(decay, &[1.0], (0.0, 1.0), &cfg, &[]).unwrap_err();
        assert!(matches!(err, IntegrateError::MaxStepsExceeded { .. }));
    }

    #[test]
    fn config_validation() {
        let bad = IntegratorConfig {
            h_min: 1.0,
            h_init: 0.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn step_defect_small_on_own_output() {
        let cfg = IntegratorConfig::default();
        let field = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let traj = integrate(field, &[1.0, 0.0], (0.0, 2.0), &cfg, &[]).unwrap();
        let defect = max_step_defect(field, &traj.times, &traj.states, &cfg).unwrap();
        assert!(defect < 100.0 * cfg.rel_tol, "defect = {defect}");
    }
}
