//! Real scalar fields with synchronized physical samples and spectrum.

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;
use rustfft::num_complex::Complex64;

/// One real-valued field on a [`Grid`].
///
/// Samples and spectrum are kept mutually consistent under the convention
/// `c_k = (1/N) sum_j u_j exp(-i xi_k x_j)`, with coefficients stored in FFT
/// index order. Because the node origin sits at `-L`, the DFT of the sample
/// vector picks up an alternating phase: `c[m] = (-1)^m FFT(u)[m] / N`
/// (valid for even `N`).
///
/// Fields are immutable after construction; every operation returns a fresh
/// field, so concurrent use is safe.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid,
    samples: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Field {
        Field {
            grid: grid.clone(),
            samples: vec![0.0; grid.n_points()],
            spectrum: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn from_samples(grid: &Grid, samples: Vec<f64>) -> Result<Field> {
        if samples.len() != grid.n_points() {
            return Err(Error::Config(format!(
                "sample vector has length {}, grid has {} nodes",
                samples.len(),
                grid.n_points()
            )));
        }
        let spectrum = samples_to_spectrum(grid, &samples);
        Ok(Field {
            grid: grid.clone(),
            samples,
            spectrum,
        })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Field {
        let samples: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
        let spectrum = samples_to_spectrum(grid, &samples);
        Field {
            grid: grid.clone(),
            samples,
            spectrum,
        }
    }

    /// Builds a field from spectral coefficients, verifying the realness
    /// pairing `c_{-k} = conj(c_k)` (Nyquist and mean modes must be real).
    pub fn from_spectrum(grid: &Grid, spectrum: Vec<Complex64>) -> Result<Field> {
        if spectrum.len() != grid.n_points() {
            return Err(Error::Config(format!(
                "spectrum has length {}, grid has {} modes",
                spectrum.len(),
                grid.n_points()
            )));
        }
        let n = grid.n_points();
        let scale = spectrum.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * scale.max(1e-300);
        for m in 1..n / 2 {
            let diff = (spectrum[m].conj() - spectrum[n - m]).norm();
            if diff > tol {
                return Err(Error::Config(format!(
                    "spectrum violates realness pairing at mode {m}: |conj(c_k) - c_-k| = {diff:e}"
                )));
            }
        }
        if spectrum[0].im.abs() > tol || spectrum[n / 2].im.abs() > tol {
            return Err(Error::Config(
                "spectrum violates realness: mean or Nyquist coefficient is not real".into(),
            ));
        }
        Ok(Self::from_spectrum_unchecked(grid, spectrum))
    }

    /// Internal constructor for spectra already known to satisfy the realness
    /// pairing (multiplier outputs, propagator outputs).
    pub(crate) fn from_spectrum_unchecked(grid: &Grid, spectrum: Vec<Complex64>) -> Field {
        let samples = spectrum_to_samples(grid, &spectrum);
        Field {
            grid: grid.clone(),
            samples,
            spectrum,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Spectral coefficients in FFT index order.
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// Coefficient of signed mode `k`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.spectrum[self.grid.index_of_mode(k)]
    }

    /// Discrete Sobolev norm `(2L sum_k (1+xi_k^2)^s |c_k|^2)^{1/2}`.
    /// `s = 0` coincides with the L2 norm on the box.
    pub fn h_norm(&self, s: f64) -> f64 {
        let two_l = 2.0 * self.grid.half_length();
        let sum: f64 = self
            .spectrum
            .iter()
            .zip(self.grid.wavenumbers())
            .map(|(c, &xi)| (1.0 + xi * xi).powf(s) * c.norm_sqr())
            .sum();
        (two_l * sum).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.h_norm(0.0)
    }

    /// Discrete H^s inner product `2L sum_k (1+xi_k^2)^s conj(a_k) b_k`
    /// (real part; exact for real fields).
    pub fn hs_inner(&self, other: &Field, s: f64) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let two_l = 2.0 * self.grid.half_length();
        let sum: f64 = self
            .spectrum
            .iter()
            .zip(&other.spectrum)
            .zip(self.grid.wavenumbers())
            .map(|((a, b), &xi)| (1.0 + xi * xi).powf(s) * (a.conj() * b).re)
            .sum();
        two_l * sum
    }

    pub fn l2_inner(&self, other: &Field) -> f64 {
        self.hs_inner(other, 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|u| u.abs()).fold(0.0, f64::max)
    }

    pub fn min_sample(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn all_finite(&self) -> bool {
        self.samples.iter().all(|u| u.is_finite())
    }

    /// Trapezoid quadrature of `sum g(u_j) dx` over the periodic box.
    pub fn quadrature(&self, g: impl Fn(f64) -> f64) -> f64 {
        let dx = self.grid.dx();
        self.samples.iter().map(|&u| g(u)).sum::<f64>() * dx
    }

    /// Pointwise map of the samples (no dealiasing; used for nodal operations
    /// such as the lattice right-hand side).
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Field {
        let samples: Vec<f64> = self.samples.iter().map(|&u| g(u)).collect();
        let spectrum = samples_to_spectrum(&self.grid, &samples);
        Field {
            grid: self.grid.clone(),
            samples,
            spectrum,
        }
    }

    pub fn scale(&self, a: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|u| a * u).collect(),
            spectrum: self.spectrum.iter().map(|c| a * c).collect(),
        }
    }

    /// `self + a * other`, computed on samples and spectrum consistently.
    pub fn axpy(&self, a: f64, other: &Field) -> Field {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Field {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| x + a * y)
                .collect(),
            spectrum: self
                .spectrum
                .iter()
                .zip(&other.spectrum)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }
}

impl std::ops::Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.axpy(1.0, rhs)
    }
}

impl std::ops::Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.axpy(-1.0, rhs)
    }
}

fn samples_to_spectrum(grid: &Grid, samples: &[f64]) -> Vec<Complex64> {
    let n = grid.n_points();
    let mut buf: Vec<Complex64> = samples.iter().map(|&u| Complex64::new(u, 0.0)).collect();
    fft::forward(&mut buf);
    let scale = 1.0 / n as f64;
    for (m, c) in buf.iter_mut().enumerate() {
        let phase = if m % 2 == 0 { scale } else { -scale };
        *c *= phase;
    }
    buf
}

fn spectrum_to_samples(grid: &Grid, spectrum: &[Complex64]) -> Vec<f64> {
    let _ = grid;
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(m, c)| if m % 2 == 0 { *c } else { -*c })
        .collect();
    fft::inverse(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Naive O(N^2) evaluation of the documented transform definition,
    /// independent of the FFT path.
    fn naive_spectrum(grid: &Grid, samples: &[f64]) -> Vec<Complex64> {
        let n = grid.n_points();
        (0..n)
            .map(|m| {
                let xi = grid.wavenumbers()[m];
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &u) in samples.iter().enumerate() {
                    let x = grid.nodes()[j];
                    acc += u * Complex64::new(0.0, -xi * x).exp();
                }
                acc / n as f64
            })
            .collect()
    }

    #[test]
    fn fft_matches_naive_dft() {
        let g = Grid::new(1.7, 16).unwrap();
        let f = Field::from_fn(&g, |x| (0.9 * x).sin() + 0.3 * (1.4 * x + 0.2).cos());
        let naive = naive_spectrum(&g, f.samples());
        for (a, b) in f.spectrum().iter().zip(&naive) {
            assert!((a - b).norm() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn sine_has_expected_modes() {
        let g = Grid::new(PI, 32).unwrap();
        let f = Field::from_fn(&g, |x| x.sin());
        // sin x = (e^{ix} - e^{-ix}) / 2i: c_1 = -i/2, c_{-1} = i/2
        assert!((f.coeff(1) - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        assert!((f.coeff(-1) - Complex64::new(0.0, 0.5)).norm() < 1e-14);
        for k in [0i64, 2, 3, 5, -7] {
            assert!(f.coeff(k).norm() < 1e-14);
        }
    }

    #[test]
    fn sobolev_norm_of_sine() {
        let g = Grid::new(PI, 64).unwrap();
        let f = Field::from_fn(&g, |x| x.sin());
        assert!((f.h_norm(0.0) - PI.sqrt()).abs() < 1e-12);
        assert!((f.h_norm(1.0) - (2.0 * PI).sqrt()).abs() < 1e-12);
        let zero = Field::zeros(&g);
        assert_eq!(zero.h_norm(2.0), 0.0);
    }

    #[test]
    fn h1_norm_matches_quadrature_of_u_and_ux() {
        // ||f||_{H^1}^2 = int f^2 + f_x^2 for band-limited f
        let g = Grid::new(PI, 64).unwrap();
        let f = Field::from_fn(&g, |x| x.sin());
        let fx = Field::from_fn(&g, |x| x.cos());
        let q = f.quadrature(|u| u * u) + fx.quadrature(|u| u * u);
        assert!((f.h_norm(1.0).powi(2) - q).abs() < 1e-10);
    }

    #[test]
    fn from_spectrum_validates_pairing() {
        let g = Grid::new(PI, 16).unwrap();
        let mut spec = vec![Complex64::new(0.0, 0.0); 16];
        spec[1] = Complex64::new(1.0, 0.5);
        assert!(Field::from_spectrum(&g, spec.clone()).is_err());
        spec[15] = spec[1].conj();
        let f = Field::from_spectrum(&g, spec).unwrap();
        assert!(f.all_finite());
    }

    #[test]
    fn grid_mismatch_length_rejected() {
        let g = Grid::new(PI, 16).unwrap();
        assert!(Field::from_samples(&g, vec![0.0; 15]).is_err());
    }
}
