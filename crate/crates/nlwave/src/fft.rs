//! Shared FFT plan cache.
//!
//! Plans are looked up from a single process-wide planner so that repeated
//! transforms of the same length (including the padded lengths used for
//! dealiasing) reuse their twiddle tables.

use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;

static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

pub(crate) fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_forward(n)
}

pub(crate) fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_inverse(n)
}

/// Unnormalized forward DFT in place: F_m = sum_j z_j e^{-2 pi i j m / n}.
pub(crate) fn forward(buf: &mut [Complex64]) {
    forward_plan(buf.len()).process(buf);
}

/// Unnormalized inverse DFT in place: z_j = sum_m F_m e^{+2 pi i j m / n}.
pub(crate) fn inverse(buf: &mut [Complex64]) {
    inverse_plan(buf.len()).process(buf);
}
