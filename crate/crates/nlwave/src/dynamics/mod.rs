//! The first-order evolution system, its exact linear propagator, nonlinear
//! and linearized right-hand sides, and initial-data conversion.
//!
//! The flow is `u_t = K v_x`, `v_t = K u_x + eps^p K (u^{p+1})_x`; in Fourier
//! space the linear part rotates each mode pair with angular rate
//! `theta = xi sqrt(beta_hat)` (divided by `eps^p` in scaled time), which the
//! propagator applies exactly.

mod integrator;
mod lattice;
mod linearized;

pub use integrator::{
    integrator_by_name, integrator_names, step_rk4, step_strang, ClassicalRk4, ExactLinear,
    Integrator, StrangSplit,
};
pub use lattice::{lattice_laplacian, lattice_rhs};
pub use linearized::{solve_linearized, LinearizedSample, ReferenceField};

use crate::dealias::dealias_pow;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::kernel::Kernel;
use rustfft::num_complex::Complex64;

/// The artifact's fixed base Sobolev index (any value above 1/2 works; this
/// one is pinned so diagnostics are reproducible).
pub const S0: f64 = 0.6;

/// The pair `(u, v)` at one instant.
#[derive(Debug, Clone)]
pub struct State {
    pub u: Field,
    pub v: Field,
    pub time: f64,
}

impl State {
    pub fn new(u: Field, v: Field, time: f64) -> Result<State> {
        if u.grid() != v.grid() {
            return Err(Error::Config(
                "state components live on different grids".into(),
            ));
        }
        Ok(State { u, v, time })
    }

    /// Product norm `|u|_{H^s} + |v|_{H^s}`.
    pub fn xs_norm(&self, s: f64) -> f64 {
        self.u.h_norm(s) + self.v.h_norm(s)
    }

    /// Quadratic pair norm `(|u|_{H^s}^2 + |v|_{H^s}^2)^{1/2}`: the exact
    /// invariant of the per-mode rotation (the sum norm is equivalent to it
    /// within sqrt(2) but oscillates as energy moves between components).
    pub fn quadratic_norm(&self, s: f64) -> f64 {
        self.u.h_norm(s).hypot(self.v.h_norm(s))
    }

    pub fn all_finite(&self) -> bool {
        self.u.all_finite() && self.v.all_finite()
    }
}

/// Fixed data of one evolution problem.
#[derive(Clone)]
pub struct EvolutionParams {
    pub kernel: Kernel,
    pub epsilon: f64,
    pub power: u32,
    /// Sobolev index used for diagnostics; must be at least `S0 + 1`.
    pub sobolev_index: f64,
}

impl EvolutionParams {
    pub fn new(kernel: Kernel, epsilon: f64, power: u32, sobolev_index: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if power < 1 {
            return Err(Error::Config("power p must be at least 1".into()));
        }
        if sobolev_index < S0 + 1.0 {
            return Err(Error::Config(format!(
                "sobolev index s must be at least {}, got {sobolev_index}",
                S0 + 1.0
            )));
        }
        Ok(EvolutionParams {
            kernel,
            epsilon,
            power,
            sobolev_index,
        })
    }

    pub fn eps_pow(&self) -> f64 {
        self.epsilon.powi(self.power as i32)
    }
}

/// Exact solution of the linear system over any time increment: per-mode
/// rotation `(u, v) -> (cos(theta dt) u + i sin(theta dt) v,
/// i sin(theta dt) u + cos(theta dt) v)` with `theta = xi sqrt(beta_hat)`
/// (divided by `eps^p` when `scaled`). The unpaired Nyquist mode does not
/// rotate. The per-mode modulus is conserved exactly, so this is a group of
/// isometries of every discrete `X^s` norm.
pub fn linear_propagate(st: &State, dt: f64, prm: &EvolutionParams, scaled: bool) -> State {
    let grid = st.u.grid().clone();
    let nyq = grid.nyquist_index();
    let rate = if scaled { 1.0 / prm.eps_pow() } else { 1.0 };
    let n = grid.n_points();
    let mut us = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for (m, &xi) in grid.wavenumbers().iter().enumerate() {
        let theta = if m == nyq {
            0.0
        } else {
            rate * xi * prm.kernel.beta_hat(xi).max(0.0).sqrt()
        };
        let (sin, cos) = (theta * dt).sin_cos();
        let cu = st.u.spectrum()[m];
        let cv = st.v.spectrum()[m];
        let is = Complex64::new(0.0, sin);
        us.push(cos * cu + is * cv);
        vs.push(is * cu + cos * cv);
    }
    State {
        u: Field::from_spectrum_unchecked(&grid, us),
        v: Field::from_spectrum_unchecked(&grid, vs),
        time: st.time + dt,
    }
}

/// Alias-free `u^{p+1}` with a finiteness check; overflow surfaces as a
/// blow-up signal carrying the state's time.
fn checked_power(u: &Field, q: u32, t: f64) -> Result<Field> {
    if !u.all_finite() {
        return Err(Error::BlowupDetected { t });
    }
    let p = dealias_pow(u, q);
    if !p.all_finite() {
        return Err(Error::BlowupDetected { t });
    }
    Ok(p)
}

/// Full right-hand side: `du = K v_x`, `dv = K u_x + eps^p K (u^{p+1})_x`.
pub fn nonlinear_rhs(st: &State, prm: &EvolutionParams) -> Result<(Field, Field)> {
    let du = prm.kernel.apply_deriv(&st.v);
    let pw = checked_power(&st.u, prm.power + 1, st.time)?;
    let dv = prm
        .kernel
        .apply_deriv(&st.u)
        .axpy(prm.eps_pow(), &prm.kernel.apply_deriv(&pw));
    Ok((du, dv))
}

/// The nonlinear term in left-hand-side form:
/// `N[u] = (0, -eps^p K (u^{p+1})_x)`.
pub fn nonlinear_term(st: &State, prm: &EvolutionParams) -> Result<(Field, Field)> {
    let pw = checked_power(&st.u, prm.power + 1, st.time)?;
    let second = prm.kernel.apply_deriv(&pw).scale(-prm.eps_pow());
    Ok((Field::zeros(st.u.grid()), second))
}

/// Derivative of the nonlinear term:
/// `N_u[u] phi = (0, -(p+1) eps^p K (u^p phi_2)_x)`.
pub fn jacobian_apply(st: &State, phi: &(Field, Field), prm: &EvolutionParams) -> (Field, Field) {
    let grid = st.u.grid();
    let p = prm.power;
    let up = dealias_pow(&st.u, p);
    let prod = crate::dealias::dealias_product(&[&up, &phi.1]).expect("shared grid");
    let coeff = -((p + 1) as f64) * prm.eps_pow();
    (
        Field::zeros(grid),
        prm.kernel.apply_deriv(&prod).scale(coeff),
    )
}

/// Second derivative of the nonlinear term:
/// `N_uu[u](phi, psi) = (0, -p(p+1) eps^p K (u^{p-1} phi_2 psi_2)_x)`;
/// symmetric in `(phi, psi)`.
pub fn hessian_apply(
    st: &State,
    phi: &(Field, Field),
    psi: &(Field, Field),
    prm: &EvolutionParams,
) -> (Field, Field) {
    let grid = st.u.grid();
    let p = prm.power;
    let prod = if p == 1 {
        crate::dealias::dealias_product(&[&phi.1, &psi.1]).expect("shared grid")
    } else {
        let um1 = dealias_pow(&st.u, p - 1);
        crate::dealias::dealias_product(&[&um1, &phi.1, &psi.1]).expect("shared grid")
    };
    let coeff = -((p * (p + 1)) as f64) * prm.eps_pow();
    (
        Field::zeros(grid),
        prm.kernel.apply_deriv(&prod).scale(coeff),
    )
}

/// How the initial velocity of the second-order problem is supplied.
pub enum InitialVelocity<'a> {
    /// `u_1 = (w_0)_x`: requires an elliptic kernel, `v_0 = K^{-1} w_0`.
    Potential(&'a Field),
    /// `v_0` given directly (`u_1 = K (v_0)_x`); works for any kernel.
    Direct(&'a Field),
}

/// Converts second-order initial data `(u_0, u_1)` to system data
/// `(u_0, v_0)` so the two formulations evolve the same `u`.
pub fn convert_initial_data(
    u0: &Field,
    velocity: InitialVelocity<'_>,
    kernel: &Kernel,
) -> Result<State> {
    let v0 = match velocity {
        InitialVelocity::Potential(w0) => kernel.apply_inverse(w0)?,
        InitialVelocity::Direct(v0) => v0.clone(),
    };
    State::new(u0.clone(), v0, 0.0)
}
