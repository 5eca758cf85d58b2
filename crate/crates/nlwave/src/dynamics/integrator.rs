//! Time-stepping strategies behind a common trait, selected by name.
//!
//! `strang` composes the exact nonlinear kick (u is constant along the kick
//! subflow, so the half-steps are exact) with the exact linear propagator;
//! `rk4` is the classical four-stage scheme on the full right-hand side,
//! kept as an independent reference; `linear` drops the nonlinearity and
//! steps with the propagator alone.

use super::{linear_propagate, nonlinear_rhs, EvolutionParams, State};
use crate::dealias::dealias_pow;
use crate::error::{Error, Result};
use crate::field::Field;

pub trait Integrator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Advances the state by `dt` (in unscaled time).
    fn step(&self, st: &State, dt: f64, prm: &EvolutionParams) -> Result<State>;
}

/// Second-order splitting: half nonlinear kick, exact linear drift, half kick.
pub struct StrangSplit;

/// Classical fourth-order Runge-Kutta on the full right-hand side.
pub struct ClassicalRk4;

/// The exact linear flow with the nonlinear term dropped.
pub struct ExactLinear;

fn half_kick(st: &State, dt_half: f64, prm: &EvolutionParams) -> Result<State> {
    if !st.u.all_finite() {
        return Err(Error::BlowupDetected { t: st.time });
    }
    let pw = dealias_pow(&st.u, prm.power + 1);
    if !pw.all_finite() {
        return Err(Error::BlowupDetected { t: st.time });
    }
    let kick = prm.kernel.apply_deriv(&pw);
    Ok(State {
        u: st.u.clone(),
        v: st.v.axpy(dt_half * prm.eps_pow(), &kick),
        time: st.time,
    })
}

impl Integrator for StrangSplit {
    fn name(&self) -> &'static str {
        "strang"
    }

    fn step(&self, st: &State, dt: f64, prm: &EvolutionParams) -> Result<State> {
        let st = half_kick(st, dt / 2.0, prm)?;
        let st = linear_propagate(&st, dt, prm, false);
        half_kick(&st, dt / 2.0, prm)
    }
}

impl Integrator for ClassicalRk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn step(&self, st: &State, dt: f64, prm: &EvolutionParams) -> Result<State> {
        let eval = |u: &Field, v: &Field, t: f64| {
            let s = State {
                u: u.clone(),
                v: v.clone(),
                time: t,
            };
            nonlinear_rhs(&s, prm)
        };
        let (k1u, k1v) = eval(&st.u, &st.v, st.time)?;
        let (k2u, k2v) = eval(
            &st.u.axpy(dt / 2.0, &k1u),
            &st.v.axpy(dt / 2.0, &k1v),
            st.time,
        )?;
        let (k3u, k3v) = eval(
            &st.u.axpy(dt / 2.0, &k2u),
            &st.v.axpy(dt / 2.0, &k2v),
            st.time,
        )?;
        let (k4u, k4v) = eval(&st.u.axpy(dt, &k3u), &st.v.axpy(dt, &k3v), st.time)?;
        let comb = |y: &Field, a: &Field, b: &Field, c: &Field, d: &Field| {
            y.axpy(dt / 6.0, a)
                .axpy(dt / 3.0, b)
                .axpy(dt / 3.0, c)
                .axpy(dt / 6.0, d)
        };
        Ok(State {
            u: comb(&st.u, &k1u, &k2u, &k3u, &k4u),
            v: comb(&st.v, &k1v, &k2v, &k3v, &k4v),
            time: st.time + dt,
        })
    }
}

impl Integrator for ExactLinear {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn step(&self, st: &State, dt: f64, prm: &EvolutionParams) -> Result<State> {
        Ok(linear_propagate(st, dt, prm, false))
    }
}

pub fn integrator_names() -> &'static [&'static str] {
    &["strang", "rk4", "linear"]
}

/// Looks up a stepping strategy by name.
pub fn integrator_by_name(name: &str) -> Result<Box<dyn Integrator>> {
    match name {
        "strang" => Ok(Box::new(StrangSplit)),
        "rk4" => Ok(Box::new(ClassicalRk4)),
        "linear" => Ok(Box::new(ExactLinear)),
        other => Err(Error::Config(format!(
            "unknown integrator '{other}'; valid names: {}",
            integrator_names().join(", ")
        ))),
    }
}

/// One Strang step (convenience wrapper over the strategy).
pub fn step_strang(st: &State, dt: f64, prm: &EvolutionParams) -> Result<State> {
    StrangSplit.step(st, dt, prm)
}

/// One classical Runge-Kutta step.
pub fn step_rk4(st: &State, dt: f64, prm: &EvolutionParams) -> Result<State> {
    ClassicalRk4.step(st, dt, prm)
}
