//! A desk resting on two rods with dry friction. The left rod engages at once, the right one
//! after a delay; too long a delay pushes the desk's center of gravity off the rods.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OscError {
    #[error("invalid parameter {name}: {value}")]
    InvalidParams { name: &'static str, value: f64 },
    #[error("center of gravity at {x} m is outside the span of ±{d} m")]
    OutOfSpan { x: f64, d: f64 },
    #[error("catastrophe at t = {at} s precedes t = {t} s")]
    CatastropheBeforeT { at: f64, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscParams {
    /// Desk mass, kg.
    pub mass: f64,
    /// Half the distance between the rods, m.
    pub half_span: f64,
    pub mu: f64,
    /// m/s².
    pub g: f64,
    /// Engagement delay of the right rod, s.
    pub delta: f64,
    /// Catastrophe bound as a fraction of the half span.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Extra inertia of the rods, carried as added desk mass, kg.
    #[serde(default)]
    pub rod_inertia_mass: Option<f64>,
}

fn default_threshold() -> f64 {
    1.0
}

impl Default for OscParams {
    fn default() -> Self {
        OscParams {
            mass: 1.0,
            half_span: 0.5,
            mu: 0.2,
            g: 9.81,
            delta: 0.5,
            threshold: 1.0,
            rod_inertia_mass: None,
        }
    }
}

impl OscParams {
    pub fn validate(&self) -> Result<(), OscError> {
        let positive = [
            ("mass", self.mass),
            ("half_span", self.half_span),
            ("mu", self.mu),
            ("g", self.g),
            ("threshold", self.threshold),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(OscError::InvalidParams { name, value });
            }
        }
        if self.threshold > 1.0 {
            return Err(OscError::InvalidParams {
                name: "threshold",
                value: self.threshold,
            });
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(OscError::InvalidParams {
                name: "delta",
                value: self.delta,
            });
        }
        if let Some(m) = self.rod_inertia_mass {
            if !(m.is_finite() && m > 0.0) {
                return Err(OscError::InvalidParams {
                    name: "rod_inertia_mass",
                    value: m,
                });
            }
        }
        Ok(())
    }

    pub fn with_delta(self, delta: f64) -> Self {
        OscParams { delta, ..self }
    }

    /// Gravity scaled by the share of the moving mass the weight acts on.
    fn g_eff(&self) -> f64 {
        match self.rod_inertia_mass {
            Some(m) => self.g * self.mass / (self.mass + m),
            None => self.g,
        }
    }

    fn bound(&self) -> f64 {
        self.threshold * self.half_span
    }
}

/// Angular frequency with both rods engaged, rad/s.
pub fn natural_frequency(p: &OscParams) -> f64 {
    (p.mu * p.g_eff() / p.half_span).sqrt()
}

/// Angular frequency of the ramp while only the left rod acts, rad/s.
pub fn one_rod_frequency(p: &OscParams) -> f64 {
    (p.mu * p.g_eff() / (2.0 * p.half_span)).sqrt()
}

/// Normal forces of the left and right rods with the center of gravity at `x`.
pub fn normal_forces(p: &OscParams, x: f64) -> Result<(f64, f64), OscError> {
    let d = p.half_span;
    if x.abs() > d {
        return Err(OscError::OutOfSpan { x, d });
    }
    let weight = p.mass * p.g;
    Ok((weight * (d - x) / (2.0 * d), weight * (d + x) / (2.0 * d)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    OneRod,
    TwoRod,
    Catastrophe,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::OneRod => "one_rod",
            Phase::TwoRod => "two_rod",
            Phase::Catastrophe => "catastrophe",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscState {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<OscState>,
    pub catastrophe_time: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &OscState {
        self.samples.last().expect("trajectory has a start sample")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["t", "x", "v", "phase"]).expect("in-memory write");
        for s in &self.samples {
            w.write_record([s.t.to_string(), s.x.to_string(), s.v.to_string(), s.phase.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
    }
}

/// Acceleration in each phase.
fn accel(p: &OscParams, phase: Phase, x: f64) -> f64 {
    let w2 = natural_frequency(p).powi(2);
    match phase {
        Phase::OneRod => w2 * (p.half_span - x) / 2.0,
        Phase::TwoRod | Phase::Catastrophe => -w2 * x,
    }
}

fn rk4(p: &OscParams, phase: Phase, x: f64, v: f64, h: f64) -> (f64, f64) {
    let a = |x| accel(p, phase, x);
    let (k1x, k1v) = (v, a(x));
    let (k2x, k2v) = (v + 0.5 * h * k1v, a(x + 0.5 * h * k1x));
    let (k3x, k3v) = (v + 0.5 * h * k2v, a(x + 0.5 * h * k2x));
    let (k4x, k4v) = (v + h * k3v, a(x + h * k3x));
    (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Smallest sub-step in (0, h] at which `f` of the state becomes true, by bisection.
fn refine(p: &OscParams, phase: Phase, x: f64, v: f64, h: f64, f: impl Fn(f64, f64) -> bool) -> f64 {
    let (mut lo, mut hi) = (0.0, h);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let (xm, vm) = rk4(p, phase, x, v, mid);
        if f(xm, vm) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn run(p: &OscParams, dt: f64, t_max: f64, record: bool) -> Trajectory {
    let bound = p.bound();
    let mut t = 0.0;
    let (mut x, mut v) = (0.0, 0.0);
    let phase_at = |t: f64| if t < p.delta { Phase::OneRod } else { Phase::TwoRod };
    let mut samples = vec![OscState {
        t,
        x,
        v,
        phase: phase_at(t),
    }];
    let mut catastrophe_time = None;
    while t < t_max {
        let phase = phase_at(t);
        let mut h = dt.min(t_max - t);
        if phase == Phase::OneRod && t + h > p.delta {
            h = p.delta - t;
        }
        let (nx, nv) = rk4(p, phase, x, v, h);
        let crossed = nx.abs() >= bound;
        // A turning point inside the step may peak beyond the bound between samples.
        let turned = v != 0.0 && nv.signum() != v.signum();
        let hit = if crossed {
            Some(refine(p, phase, x, v, h, |xm, _| xm.abs() >= bound))
        } else if turned {
            let turn = refine(p, phase, x, v, h, |_, vm| vm.signum() != v.signum());
            let (xt, _) = rk4(p, phase, x, v, turn);
            (xt.abs() >= bound).then_some(turn)
        } else {
            None
        };
        if let Some(sub) = hit {
            let (cx, cv) = rk4(p, phase, x, v, sub);
            t += sub;
            catastrophe_time = Some(t);
            samples.push(OscState {
                t,
                x: cx,
                v: cv,
                phase: Phase::Catastrophe,
            });
            break;
        }
        t += h;
        if phase == Phase::OneRod && t + 1e-15 * p.delta.max(1.0) >= p.delta {
            t = p.delta;
        }
        x = nx;
        v = nv;
        if record {
            samples.push(OscState {
                t,
                x,
                v,
                phase: phase_at(t),
            });
        }
    }
    if !record && catastrophe_time.is_none() {
        samples.push(OscState {
            t,
            x,
            v,
            phase: phase_at(t),
        });
    }
    Trajectory {
        samples,
        catastrophe_time,
    }
}

/// Integrates from rest at the origin with a fixed-step 4th-order Runge-Kutta scheme, landing
/// exactly on the engagement time, until `t_max` or the catastrophe bound.
pub fn simulate(p: &OscParams, dt: f64, t_max: f64) -> Result<Trajectory, OscError> {
    p.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(OscError::InvalidParams { name: "dt", value: dt });
    }
    Ok(run(p, dt, t_max, true))
}

/// State at the engagement time, from the one-rod ramp.
fn engagement_state(p: &OscParams) -> (f64, f64) {
    let w1 = one_rod_frequency(p);
    let d = p.half_span;
    (d * (1.0 - (w1 * p.delta).cos()), d * w1 * (w1 * p.delta).sin())
}

/// Amplitude of the two-rod oscillation.
pub fn amplitude(p: &OscParams) -> f64 {
    let (x, v) = engagement_state(p);
    (x * x + (v / natural_frequency(p)).powi(2)).sqrt()
}

/// First time the center of gravity reaches the bound, if ever.
pub fn analytic_catastrophe_time(p: &OscParams) -> Option<f64> {
    let bound = p.bound();
    let d = p.half_span;
    let w1 = one_rod_frequency(p);
    // The ramp x = d(1 - cos) reaches the bound at arccos(1 - threshold).
    let ramp_hit = (1.0 - bound / d).acos() / w1;
    if ramp_hit <= p.delta {
        return Some(ramp_hit);
    }
    let a = amplitude(p);
    if a < bound {
        return None;
    }
    let w = natural_frequency(p);
    let (x, v) = engagement_state(p);
    // x = A cos(w tau - phi); find the first tau >= 0 with |cos| >= bound / A.
    let phi = (v / w).atan2(x);
    let alpha = (bound / a).min(1.0).acos();
    let m = (-phi).rem_euclid(PI);
    let tau = if m <= alpha || m >= PI - alpha {
        0.0
    } else {
        (PI - alpha - m) / w
    };
    Some(p.delta + tau)
}

/// Piecewise analytic position and velocity at `t`.
pub fn closed_form(p: &OscParams, t: f64) -> Result<(f64, f64), OscError> {
    p.validate()?;
    if let Some(at) = analytic_catastrophe_time(p) {
        if at < t {
            return Err(OscError::CatastropheBeforeT { at, t });
        }
    }
    let d = p.half_span;
    let w1 = one_rod_frequency(p);
    if t <= p.delta {
        return Ok((d * (1.0 - (w1 * t).cos()), d * w1 * (w1 * t).sin()));
    }
    let (x0, v0) = engagement_state(p);
    let w = natural_frequency(p);
    let tau = t - p.delta;
    Ok((
        x0 * (w * tau).cos() + v0 / w * (w * tau).sin(),
        -x0 * w * (w * tau).sin() + v0 * (w * tau).cos(),
    ))
}

/// Harmonic invariant ½(v² + ω²x²) of the two-rod phase.
pub fn energy(p: &OscParams, x: f64, v: f64) -> f64 {
    0.5 * (v * v + natural_frequency(p).powi(2) * x * x)
}

/// Largest safe delay from the amplitude condition A = threshold·d; exact when the bound is
/// first reached in the two-rod phase, which holds for every threshold in (0, 1].
pub fn analytic_delta_max(p: &OscParams) -> f64 {
    let t = p.threshold;
    (2.0 - (1.0 + 2.0 * t * t).sqrt()).acos() / one_rod_frequency(p)
}

/// Largest delay without catastrophe, found by bisection on the simulated catastrophe flag.
pub fn delta_max(p: &OscParams, tol: f64) -> Result<f64, OscError> {
    p.validate()?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(OscError::InvalidParams { name: "tol", value: tol });
    }
    let w = natural_frequency(p);
    let period = 2.0 * PI / w;
    let dt = period / 4000.0;
    let catastrophic = |delta: f64| {
        let q = p.with_delta(delta);
        run(&q, dt, delta + period, false).catastrophe_time.is_some()
    };
    let mut lo = 0.0;
    // By half a ramp period the desk has travelled 2d.
    let mut hi = PI / one_rod_frequency(p);
    debug_assert!(catastrophic(hi));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if catastrophic(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}
