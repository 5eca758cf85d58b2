//! Parameter arithmetic of the iteration scheme: the loss-of-derivative
//! constants are fixed at `m = 3`, `d1 = 1`, `d1' = 0`, giving
//! `delta = 3`, `q = D - 3` and the regularity overhead
//! `P_min(D) = 3 + D/(D-3) (sqrt 3 + sqrt(2D))^2`.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct NashMoserParams {
    pub m: u32,
    pub d1: u32,
    pub d1_prime: u32,
    pub d: f64,
    pub delta: f64,
    pub q: f64,
    pub p_min: f64,
}

/// Evaluates the parameter arithmetic at a given `D > 3`.
pub fn nash_moser_params(d: f64) -> Result<NashMoserParams> {
    if !(d.is_finite() && d > 3.0) {
        return Err(Error::Domain(format!(
            "P_min has a pole at D = 3; need D > 3, got {d}"
        )));
    }
    Ok(NashMoserParams {
        m: 3,
        d1: 1,
        d1_prime: 0,
        d,
        delta: 3.0,
        q: d - 3.0,
        p_min: p_min(d),
    })
}

/// `(sqrt 3 + sqrt(2D))^2` expanded as `3 + 2D + 2 sqrt(6D)` so that
/// rational `D` with perfect-square `6D` evaluate exactly.
fn p_min(d: f64) -> f64 {
    3.0 + d / (d - 3.0) * (3.0 + 2.0 * d + 2.0 * (6.0 * d).sqrt())
}

/// Minimizes `P_min` over `D in (3, 100]` by golden-section search to 1e-6
/// in `D`; returns `(D*, P*)`.
pub fn optimize_pmin() -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = 3.0 + 1e-9;
    let mut b = 100.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = p_min(c);
    let mut fd = p_min(d);
    while b - a > 1e-6 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = p_min(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = p_min(d);
        }
    }
    let d_star = 0.5 * (a + b);
    (d_star, p_min(d_star))
}
