//! Uniform periodic grid on `[-L, L)` and its discrete wavenumber set.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug)]
struct GridInner {
    half_length: f64,
    n_points: usize,
    nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
}

/// Uniform periodic grid: nodes `x_j = -L + 2Lj/N` and wavenumbers
/// `xi_k = pi k / L` for `k = -N/2 .. N/2 - 1`, stored in FFT index order
/// (`k = m` for `m < N/2`, `k = m - N` otherwise).
///
/// Cheap to clone; fields sharing a grid compare equal by `(L, N)`.
#[derive(Debug, Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl Grid {
    /// Builds a grid with half-length `L` and `N` nodes. `N` must be even
    /// and at least 8; `L` must be positive.
    pub fn new(half_length: f64, n_points: usize) -> Result<Grid> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::Config(format!(
                "grid half-length L must be positive, got {half_length}"
            )));
        }
        if n_points % 2 != 0 {
            return Err(Error::Config(format!(
                "N must be even, got {n_points}"
            )));
        }
        if n_points < 8 {
            return Err(Error::Config(format!(
                "N must be at least 8, got {n_points}"
            )));
        }
        let n = n_points;
        let dx = 2.0 * half_length / n as f64;
        let nodes = (0..n).map(|j| -half_length + j as f64 * dx).collect();
        let wavenumbers = (0..n)
            .map(|m| PI * mode_number(m, n) as f64 / half_length)
            .collect();
        Ok(Grid {
            inner: Arc::new(GridInner {
                half_length,
                n_points: n,
                nodes,
                wavenumbers,
            }),
        })
    }

    pub fn half_length(&self) -> f64 {
        self.inner.half_length
    }

    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.inner.half_length / self.inner.n_points as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.inner.nodes
    }

    /// Wavenumbers in FFT index order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    /// Largest resolved |xi| (the Nyquist wavenumber magnitude).
    pub fn xi_max(&self) -> f64 {
        PI * (self.inner.n_points / 2) as f64 / self.inner.half_length
    }

    /// Index of the unpaired Nyquist mode `k = -N/2`.
    pub fn nyquist_index(&self) -> usize {
        self.inner.n_points / 2
    }

    /// Signed mode number `k` for storage index `m`.
    pub fn mode_number(&self, m: usize) -> i64 {
        mode_number(m, self.inner.n_points)
    }

    /// Storage index for signed mode number `k` in `-N/2 ..= N/2 - 1`.
    pub fn index_of_mode(&self, k: i64) -> usize {
        let n = self.inner.n_points as i64;
        debug_assert!(k >= -n / 2 && k < n / 2);
        k.rem_euclid(n) as usize
    }
}

fn mode_number(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.half_length == other.inner.half_length
            && self.inner.n_points == other.inner.n_points
    }
}
