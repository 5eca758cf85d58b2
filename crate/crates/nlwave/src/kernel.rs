//! Convolution kernels given by their Fourier symbol `beta_hat`, the
//! square-root operator `K` built from them, and validation of the symbol
//! conditions (nonnegativity, boundedness, ellipticity, decay rate).
//!
//! Kernels are strategies behind the [`KernelSymbol`] trait: the built-ins
//! are registered by name and custom symbols can be supplied as tabulated
//! `(xi, beta_hat)` pairs.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::multiplier::Multiplier;
use serde::Serialize;
use std::sync::Arc;

/// Ellipticity floor: the symbol must stay above this on the resolved band
/// for `K` to be treated as invertible there.
pub const ELLIPTICITY_FLOOR: f64 = 1e-8;

/// A convolution kernel described by its (even, nonnegative) Fourier symbol.
pub trait KernelSymbol: Send + Sync {
    fn name(&self) -> &str;

    /// The symbol `beta_hat(xi)`. Must be even and nonnegative.
    fn beta_hat(&self, xi: f64) -> f64;

    /// Declared decay exponent `r` in `beta_hat <= C (1+xi^2)^{-r/2}`, when
    /// the kernel family states one.
    fn decay_rate(&self) -> Option<f64> {
        None
    }

    /// Whether the symbol is claimed to be bounded below away from zero.
    fn elliptic_claim(&self) -> bool {
        false
    }

    /// Upper bound `C` with `0 <= beta_hat <= C`.
    fn bound(&self) -> f64 {
        1.0
    }
}

/// Identity-operator kernel (`beta_hat = 1`): the local wave equation.
pub struct Dirac;

impl KernelSymbol for Dirac {
    fn name(&self) -> &str {
        "dirac"
    }
    fn beta_hat(&self, _xi: f64) -> f64 {
        1.0
    }
    fn decay_rate(&self) -> Option<f64> {
        Some(0.0)
    }
    fn elliptic_claim(&self) -> bool {
        true
    }
}

/// Exponential kernel `beta(x) = e^{-|x|}/2` with symbol `1/(1+xi^2)`:
/// the improved Boussinesq equation.
pub struct Exponential;

impl KernelSymbol for Exponential {
    fn name(&self) -> &str {
        "exponential"
    }
    fn beta_hat(&self, xi: f64) -> f64 {
        1.0 / (1.0 + xi * xi)
    }
    fn decay_rate(&self) -> Option<f64> {
        Some(2.0)
    }
    fn elliptic_claim(&self) -> bool {
        true
    }
}

/// Triangular kernel `beta(x) = (1-|x|)_+` with symbol
/// `(4/xi^2) sin^2(xi/2)`: the lattice equation. Vanishes at `xi = 2 pi n`,
/// so it is not elliptic once the grid resolves those wavenumbers.
pub struct Triangular;

impl KernelSymbol for Triangular {
    fn name(&self) -> &str {
        "triangular"
    }
    fn beta_hat(&self, xi: f64) -> f64 {
        let t = 0.5 * xi;
        if t.abs() < 1e-4 {
            // (sin t / t)^2 = 1 - t^2/3 + 2 t^4/45 - ...
            let t2 = t * t;
            1.0 - t2 / 3.0 + 2.0 * t2 * t2 / 45.0
        } else {
            let s = t.sin() / t;
            s * s
        }
    }
    fn decay_rate(&self) -> Option<f64> {
        Some(2.0)
    }
    fn elliptic_claim(&self) -> bool {
        false
    }
}

/// Kernel tabulated as strictly increasing `(xi, beta_hat)` pairs with
/// `xi >= 0`; evaluated by linear interpolation with even extension and
/// last-value continuation beyond the table.
pub struct Tabulated {
    name: String,
    xi: Vec<f64>,
    values: Vec<f64>,
}

impl Tabulated {
    pub fn new(name: impl Into<String>, xi: Vec<f64>, values: Vec<f64>) -> Result<Tabulated> {
        if xi.len() != values.len() || xi.len() < 2 {
            return Err(Error::Config(
                "tabulated kernel needs at least two (xi, beta_hat) pairs".into(),
            ));
        }
        if xi[0] < 0.0 {
            return Err(Error::Config(
                "tabulated kernel abscissae must start at xi >= 0".into(),
            ));
        }
        if xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "tabulated kernel abscissae must be strictly increasing".into(),
            ));
        }
        let name = name.into();
        if let Some((&x, &v)) = xi.iter().zip(&values).find(|(_, &v)| v < 0.0) {
            return Err(Error::NegativeSymbol {
                name,
                xi: x,
                value: v,
            });
        }
        Ok(Tabulated {
            name,
            xi,
            values,
        })
    }
}

impl Tabulated {
    /// Parses CSV rows `xi,beta_hat` (strictly increasing `xi >= 0`; even
    /// extension implied). `#` lines and an optional `xi,...` header are
    /// skipped.
    pub fn from_csv(name: impl Into<String>, text: &str) -> Result<Tabulated> {
        let mut xi = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("xi") {
                continue;
            }
            let (a, b) = line.split_once(',').ok_or_else(|| {
                Error::Config(format!("kernel csv line {}: expected 'xi,beta_hat'", lineno + 1))
            })?;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::Config(format!("kernel csv line {}: bad number '{s}'", lineno + 1))
                })
            };
            xi.push(parse(a)?);
            values.push(parse(b)?);
        }
        Tabulated::new(name, xi, values)
    }
}

impl KernelSymbol for Tabulated {
    fn name(&self) -> &str {
        &self.name
    }
    fn beta_hat(&self, xi: f64) -> f64 {
        let x = xi.abs();
        if x <= self.xi[0] {
            return self.values[0];
        }
        if x >= *self.xi.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let j = self.xi.partition_point(|&t| t <= x);
        let (x0, x1) = (self.xi[j - 1], self.xi[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }
    fn bound(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

type KernelCtor = fn() -> Kernel;

/// Built-in kernel registry: name, constructor.
static BUILTIN_KERNELS: &[(&str, KernelCtor)] = &[
    ("dirac", || Kernel::new(Dirac)),
    ("exponential", || Kernel::new(Exponential)),
    ("triangular", || Kernel::new(Triangular)),
];

pub fn builtin_kernel_names() -> Vec<&'static str> {
    BUILTIN_KERNELS.iter().map(|(n, _)| *n).collect()
}

/// Looks up a built-in kernel by name.
pub fn builtin_kernel(name: &str) -> Result<Kernel> {
    BUILTIN_KERNELS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, ctor)| ctor())
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown kernel '{name}'; valid names: {}",
                builtin_kernel_names().join(", ")
            ))
        })
}

/// Shared handle to a kernel symbol plus the operators built from it.
#[derive(Clone)]
pub struct Kernel {
    symbol: Arc<dyn KernelSymbol>,
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Kernel").field("name", &self.name()).finish()
    }
}

/// Outcome of checking a kernel against a grid's wavenumber set.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub kernel: String,
    /// max of beta_hat over the grid band (estimate of the bound C)
    pub c_max: f64,
    /// min of beta_hat over the grid band (ellipticity constant when positive)
    pub c_min: f64,
    /// wavenumber where the minimum is attained
    pub xi_at_min: f64,
    pub elliptic: bool,
    /// decay exponent fitted by log-log least squares over the top octave
    /// of the band (None when too few usable points)
    pub fitted_r: Option<f64>,
    /// modes excluded from the fit because the symbol vanished there
    pub excluded_modes: usize,
}

impl Kernel {
    pub fn new(symbol: impl KernelSymbol + 'static) -> Kernel {
        Kernel {
            symbol: Arc::new(symbol),
        }
    }

    pub fn name(&self) -> &str {
        self.symbol.name()
    }

    pub fn beta_hat(&self, xi: f64) -> f64 {
        self.symbol.beta_hat(xi)
    }

    pub fn decay_rate(&self) -> Option<f64> {
        self.symbol.decay_rate()
    }

    pub fn elliptic_claim(&self) -> bool {
        self.symbol.elliptic_claim()
    }

    pub fn bound(&self) -> f64 {
        self.symbol.bound()
    }

    /// Checks nonnegativity on the grid band, reports the observed bounds,
    /// the ellipticity verdict, and the fitted decay exponent.
    pub fn validate(&self, grid: &Grid) -> Result<ValidationReport> {
        let mut c_max = f64::NEG_INFINITY;
        let mut c_min = f64::INFINITY;
        let mut xi_at_min = 0.0;
        for &xi in grid.wavenumbers() {
            let b = self.beta_hat(xi);
            if b < 0.0 {
                return Err(Error::NegativeSymbol {
                    name: self.name().to_string(),
                    xi,
                    value: b,
                });
            }
            if b > c_max {
                c_max = b;
            }
            if b < c_min {
                c_min = b;
                xi_at_min = xi;
            }
        }
        let (fitted_r, excluded) = self.fit_decay(grid);
        Ok(ValidationReport {
            kernel: self.name().to_string(),
            c_max,
            c_min,
            xi_at_min,
            elliptic: c_min >= ELLIPTICITY_FLOOR,
            fitted_r,
            excluded_modes: excluded,
        })
    }

    /// Least squares of `log beta_hat` against `log(1+xi^2)` over the top
    /// octave `|xi| >= xi_max / 2`. Modes where the symbol sits within
    /// rounding of zero carry no usable logarithm and are excluded;
    /// oscillatory symbols still make this a rough estimate.
    fn fit_decay(&self, grid: &Grid) -> (Option<f64>, usize) {
        let cutoff = grid.xi_max() / 2.0;
        let floor = 1e-12
            * grid
                .wavenumbers()
                .iter()
                .map(|&xi| self.beta_hat(xi))
                .fold(0.0f64, f64::max);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut excluded = 0;
        for &xi in grid.wavenumbers() {
            if xi.abs() < cutoff {
                continue;
            }
            let b = self.beta_hat(xi);
            if b > floor {
                xs.push((1.0 + xi * xi).ln());
                ys.push(b.ln());
            } else {
                excluded += 1;
            }
        }
        if xs.len() < 2 {
            return (None, excluded);
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx == 0.0 {
            return (None, excluded);
        }
        (Some(-2.0 * sxy / sxx), excluded)
    }

    fn sqrt_symbol(&self) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let symbol = self.symbol.clone();
        move |xi| symbol.beta_hat(xi).max(0.0).sqrt()
    }

    /// `K f`: the multiplier `sqrt(beta_hat)`.
    pub fn apply(&self, f: &Field) -> Field {
        let s = self.sqrt_symbol();
        Multiplier::even_real(s).apply(f).expect("even-real symbol")
    }

    /// `K f_x`: the odd-imaginary multiplier `i xi sqrt(beta_hat)`
    /// (Nyquist zeroed).
    pub fn apply_deriv(&self, f: &Field) -> Field {
        let s = self.sqrt_symbol();
        Multiplier::odd_imaginary(move |xi| xi * s(xi))
            .apply(f)
            .expect("odd-imaginary symbol")
    }

    /// `K^{-1} f`: requires the symbol to stay above [`ELLIPTICITY_FLOOR`]
    /// on the grid band.
    pub fn apply_inverse(&self, f: &Field) -> Result<Field> {
        let grid = f.grid();
        for &xi in grid.wavenumbers() {
            let b = self.beta_hat(xi);
            if b < ELLIPTICITY_FLOOR {
                return Err(Error::NonElliptic {
                    name: self.name().to_string(),
                    xi,
                    value: b,
                    floor: ELLIPTICITY_FLOOR,
                });
            }
        }
        let s = self.sqrt_symbol();
        Multiplier::even_real(move |xi| 1.0 / s(xi)).apply(f)
    }

    /// Whether the symbol clears the ellipticity floor on this grid's band.
    pub fn elliptic_on(&self, grid: &Grid) -> bool {
        grid.wavenumbers()
            .iter()
            .all(|&xi| self.beta_hat(xi) >= ELLIPTICITY_FLOOR)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(builtin_kernel("dirac").unwrap().name(), "dirac");
        assert!((builtin_kernel("exponential").unwrap().beta_hat(1.0) - 0.5).abs() < 1e-15);
        let err = builtin_kernel("box").unwrap_err().to_string();
        assert!(err.contains("dirac") && err.contains("exponential") && err.contains("triangular"));
    }

    #[test]
    fn triangular_symbol_limit_and_zero() {
        let k = builtin_kernel("triangular").unwrap();
        assert!((k.beta_hat(0.0) - 1.0).abs() < 1e-15);
        assert!((k.beta_hat(1e-6) - 1.0).abs() < 1e-12);
        assert!(k.beta_hat(2.0 * PI).abs() < 1e-15);
        // symbol identity xi^2 beta_hat = 2 - 2 cos xi
        for &xi in &[0.3, 1.0, 2.5, 7.9, 31.4] {
            let lhs = xi * xi * k.beta_hat(xi);
            let rhs = 2.0 - 2.0 * xi.cos();
            assert!((lhs - rhs).abs() < 1e-12, "xi = {xi}");
        }
    }

    #[test]
    fn validation_of_builtins() {
        let g = Grid::new(16.0, 512).unwrap();
        let dirac = builtin_kernel("dirac").unwrap().validate(&g).unwrap();
        assert_eq!(dirac.c_max, 1.0);
        assert_eq!(dirac.c_min, 1.0);
        assert!(dirac.elliptic);
        assert!(dirac.fitted_r.unwrap().abs() < 1e-12);

        let exp = builtin_kernel("exponential").unwrap().validate(&g).unwrap();
        assert!(exp.elliptic);
        assert!((exp.c_min - 1.0 / (1.0 + g.xi_max().powi(2))).abs() < 1e-15);
        assert!((exp.fitted_r.unwrap() - 2.0).abs() < 0.1);

        // the grid resolves xi = 2 pi (k = 32), where the symbol vanishes
        let tri = builtin_kernel("triangular").unwrap().validate(&g).unwrap();
        assert!(!tri.elliptic);
        assert!((tri.fitted_r.unwrap() - 2.0).abs() < 0.2, "{:?}", tri.fitted_r);
        assert!(tri.excluded_modes > 0);
    }

    #[test]
    fn negative_symbol_rejected() {
        let g = Grid::new(PI, 32).unwrap();
        let bad = Kernel::new(TestSymbol);
        assert!(matches!(
            bad.validate(&g),
            Err(Error::NegativeSymbol { .. })
        ));
    }

    struct TestSymbol;
    impl KernelSymbol for TestSymbol {
        fn name(&self) -> &str {
            "cosine"
        }
        fn beta_hat(&self, xi: f64) -> f64 {
            xi.cos()
        }
    }

    #[test]
    fn dirac_k_is_identity() {
        let g = Grid::new(PI, 64).unwrap();
        let f = Field::from_fn(&g, |x| x.sin() + 0.2 * (3.0 * x).cos());
        let k = builtin_kernel("dirac").unwrap();
        assert!(max_diff(&k.apply(&f), &f) < 1e-14);
        assert!(max_diff(&k.apply_inverse(&f).unwrap(), &f) < 1e-14);
    }

    #[test]
    fn exponential_eigenmode_arithmetic() {
        let g = Grid::new(PI, 64).unwrap();
        let f = Field::from_fn(&g, |x| x.sin());
        let k = builtin_kernel("exponential").unwrap();
        let kf = k.apply(&f);
        let expect = Field::from_fn(&g, |x| x.sin() / 2f64.sqrt());
        assert!(max_diff(&kf, &expect) < 1e-13);
        let kdx = k.apply_deriv(&f);
        let expect_dx = Field::from_fn(&g, |x| x.cos() / 2f64.sqrt());
        assert!(max_diff(&kdx, &expect_dx) < 1e-13);
        let kinv = k.apply_inverse(&f).unwrap();
        let expect_inv = Field::from_fn(&g, |x| 2f64.sqrt() * x.sin());
        assert!(max_diff(&kinv, &expect_inv) < 1e-13);
    }

    #[test]
    fn derivative_kills_constants() {
        let g = Grid::new(5.0, 32).unwrap();
        let c = Field::from_fn(&g, |_| 3.25);
        for name in ["dirac", "exponential", "triangular"] {
            let k = builtin_kernel(name).unwrap();
            assert!(k.apply_deriv(&c).max_abs() < 1e-13);
        }
    }

    #[test]
    fn triangular_inverse_rejected_on_resonant_grid() {
        // L = 16 resolves xi = 2 pi exactly (mode k = 32)
        let g = Grid::new(16.0, 512).unwrap();
        let f = Field::from_fn(&g, |x| (PI * x / 16.0).sin());
        let k = builtin_kernel("triangular").unwrap();
        match k.apply_inverse(&f) {
            Err(Error::NonElliptic { xi, .. }) => {
                assert!((xi.abs() / (2.0 * PI)).fract().abs() < 1e-9)
            }
            other => panic!("expected NonElliptic, got {other:?}"),
        }
    }

    #[test]
    fn triangular_matches_box_average() {
        // K u = average of u over [x - 1/2, x + 1/2]; oracle: composite
        // Simpson quadrature of the trigonometric interpolant.
        let g = Grid::new(PI, 32).unwrap();
        let f = Field::from_fn(&g, |x| x.sin() + 0.3 * (2.0 * x).cos());
        let k = builtin_kernel("triangular").unwrap();
        let kf = k.apply(&f);
        let eval = |x: f64| -> f64 {
            // direct mode summation of the interpolant
            let mut acc = 0.0;
            for (m, &xi) in g.wavenumbers().iter().enumerate() {
                let c = f.spectrum()[m];
                acc += (c * rustfft::num_complex::Complex64::from_polar(1.0, xi * x)).re;
            }
            acc
        };
        let panels = 400;
        for (j, &x) in g.nodes().iter().enumerate().step_by(5) {
            let a = x - 0.5;
            let h = 1.0 / panels as f64;
            let mut integral = eval(a) + eval(a + 1.0);
            for i in 1..panels {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                integral += w * eval(a + i as f64 * h);
            }
            integral *= h / 3.0;
            assert!(
                (integral - kf.samples()[j]).abs() < 1e-10,
                "node {j}: {integral} vs {}",
                kf.samples()[j]
            );
        }
    }

    #[test]
    fn tabulated_interpolation_and_validation() {
        let xi: Vec<f64> = (0..100).map(|i| i as f64 * 0.5).collect();
        let vals: Vec<f64> = xi.iter().map(|x| 1.0 / (1.0 + x * x)).collect();
        let k = Kernel::new(Tabulated::new("tabulated-exp", xi, vals).unwrap());
        assert!((k.beta_hat(0.25) - (1.0 + 1.0 / 1.25) / 2.0).abs() < 1e-12);
        assert!((k.beta_hat(-0.25) - k.beta_hat(0.25)).abs() < 1e-15);
        let g = Grid::new(PI, 64).unwrap();
        let rep = k.validate(&g).unwrap();
        assert!(rep.elliptic);
        assert!(Tabulated::new("bad", vec![0.0, 1.0], vec![1.0, -0.5]).is_err());
        assert!(Tabulated::new("bad", vec![1.0, 0.5], vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn tabulated_csv_parsing() {
        let text = "# comment\nxi,beta_hat\n0.0,1.0\n1.0,0.5\n2.0,0.2\n";
        let k = Kernel::new(Tabulated::from_csv("custom", text).unwrap());
        assert!((k.beta_hat(1.0) - 0.5).abs() < 1e-15);
        assert!((k.beta_hat(1.5) - 0.35).abs() < 1e-15);
        assert!(Tabulated::from_csv("bad", "0.0;1.0\n").is_err());
        assert!(Tabulated::from_csv("bad", "0.0,abc\n1.0,1.0\n").is_err());
    }
}
