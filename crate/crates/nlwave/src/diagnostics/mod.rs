//! Energy functionals, hyperbolicity checks, the data functional driving the
//! a-priori estimates, and empirical probes of the functional inequalities.

mod nashmoser;
mod probes;

pub use nashmoser::{nash_moser_params, optimize_pmin, NashMoserParams};
pub use probes::{
    calibrate_algebra_constant, kato_probe, moser_probe, nonlinear_estimate_probe, probe_suite,
    random_band_limited, NonlinearEstimate, ProbeKind, ProbeReport,
};

use crate::dealias::dealias_product;
use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::field::Field;
use serde::Serialize;

/// Energy evaluation outcome: the value, the product norm it is compared
/// against, and whether the two-sided equivalence held.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub s: f64,
    pub es: f64,
    pub xs_norm: f64,
    pub equivalence_ok: bool,
    pub epsilon_used: f64,
}

/// Quadratic energy `E_s^2 = (|u|_s^2 + |v|_s^2 + eps^p <u, w u>_s) / 2`
/// with the product `w u` dealiased. Fails with `HyperbolicityLost` when the
/// form is not positive semidefinite (epsilon too large for this `w`).
///
/// `equivalence_ok` records the two-sided comparison
/// `(1/(2 sqrt 2)) (|u|+|v|) <= E_s <= (sqrt 3 / 2) (|u|+|v|)`.
pub fn energy_es(st: &State, w: &Field, eps: f64, p: u32, s: f64) -> Result<EnergyReport> {
    let wu = dealias_product(&[w, &st.u])?;
    let cross = st.u.hs_inner(&wu, s);
    let nu = st.u.h_norm(s);
    let nv = st.v.h_norm(s);
    let es2 = 0.5 * (nu * nu + nv * nv + eps.powi(p as i32) * cross);
    if es2 < 0.0 {
        return Err(Error::HyperbolicityLost {
            es_squared: es2,
            epsilon: eps,
        });
    }
    let es = es2.sqrt();
    let xs = nu + nv;
    let lo = xs / (2.0 * 2f64.sqrt());
    let hi = 3f64.sqrt() / 2.0 * xs;
    // exact-zero states satisfy the sandwich trivially
    let equivalence_ok = es >= lo - 1e-14 * xs.max(1.0) && es <= hi + 1e-14 * xs.max(1.0);
    Ok(EnergyReport {
        s,
        es,
        xs_norm: xs,
        equivalence_ok,
        epsilon_used: eps,
    })
}

/// Pointwise hyperbolicity margin: returns `min_x (1 + eps^p w)` and whether
/// it is positive.
pub fn hyperbolicity_check(w: &Field, eps: f64, p: u32) -> (f64, bool) {
    let min = 1.0 + eps.powi(p as i32) * w.min_sample();
    (min, min > 0.0)
}

/// Largest admissible epsilon for the energy equivalence:
/// `eps0 = (1 / (2 C |w|_{H^s}))^{1/p}` with the calibrated algebra
/// constant `c_hat`. Returns infinity when `w` vanishes.
pub fn epsilon0_estimate(w: &Field, s: f64, p: u32, c_hat: f64) -> f64 {
    let norm = w.h_norm(s);
    if norm == 0.0 {
        return f64::INFINITY;
    }
    (1.0 / (2.0 * c_hat * norm)).powf(1.0 / p as f64)
}

/// Conserved quantity of the exact flow:
/// `H = int (u^2/2 + v^2/2 + eps^p u^{p+2}/(p+2)) dx` by trapezoid
/// quadrature on the periodic box.
pub fn hamiltonian(st: &State, eps: f64, p: u32) -> f64 {
    let epsp = eps.powi(p as i32);
    let q = p as i32 + 2;
    st.u.quadrature(|u| 0.5 * u * u + epsp / q as f64 * u.powi(q))
        + st.v.quadrature(|v| 0.5 * v * v)
}

/// Data functional `|g|_{X^s} + int_0^t sup_{t' <= t''} |f(t')|_{X^s} dt''`,
/// evaluated by a running maximum and trapezoid quadrature over a uniform
/// sample lattice with spacing `dt_sample`.
pub fn data_functional(
    g: (&Field, &Field),
    f_series: &[(Field, Field)],
    dt_sample: f64,
    s: f64,
    t: f64,
) -> Result<f64> {
    let t_max = (f_series.len().saturating_sub(1)) as f64 * dt_sample;
    if t < 0.0 || t > t_max + 1e-12 * t_max.max(1.0) {
        return Err(Error::OutOfRange { t, t_max });
    }
    let g_norm = g.0.h_norm(s) + g.1.h_norm(s);
    if f_series.is_empty() || t == 0.0 {
        return Ok(g_norm);
    }
    let n = (t / dt_sample).round() as usize;
    let mut running_max = 0.0f64;
    let mut integral = 0.0;
    let mut prev = 0.0;
    for (j, (f1, f2)) in f_series.iter().enumerate().take(n + 1) {
        running_max = running_max.max(f1.h_norm(s) + f2.h_norm(s));
        if j > 0 {
            integral += 0.5 * (prev + running_max) * dt_sample;
        }
        prev = running_max;
    }
    Ok(g_norm + integral)
}
