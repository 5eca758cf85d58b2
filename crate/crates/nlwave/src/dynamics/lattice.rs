//! The unit-shift discrete Laplacian and the lattice-equation right-hand
//! side used to cross-validate the triangular-kernel simulation.

use crate::error::{Error, Result};
use crate::field::Field;

/// Number of grid nodes per unit length, when `1/dx` is an integer.
fn nodes_per_unit(f: &Field) -> Result<usize> {
    let inv_dx = 1.0 / f.grid().dx();
    let m = inv_dx.round();
    if (inv_dx - m).abs() > 1e-9 * inv_dx.max(1.0) || m < 1.0 {
        return Err(Error::Config(format!(
            "lattice operations need 1/dx integer; this grid has 1/dx = {inv_dx}"
        )));
    }
    Ok(m as usize)
}

/// `z(x-1) - 2 z(x) + z(x+1)` by index shifting with periodic wrap.
pub fn lattice_laplacian(f: &Field) -> Result<Field> {
    let m = nodes_per_unit(f)?;
    let n = f.grid().n_points();
    let s = f.samples();
    let out: Vec<f64> = (0..n)
        .map(|j| s[(j + n - m) % n] - 2.0 * s[j] + s[(j + m) % n])
        .collect();
    Field::from_samples(f.grid(), out)
}

/// Method-of-lines right-hand side for the lattice equation
/// `u_tt = Delta^d (u + eps^p u^{p+1})` as the system `(u, y)' = (y, ...)`,
/// with the power taken pointwise at the nodes.
pub fn lattice_rhs(u: &Field, y: &Field, eps: f64, p: u32) -> Result<(Field, Field)> {
    let epsp = eps.powi(p as i32);
    let arg = u.map(|x| x + epsp * x.powi(p as i32 + 1));
    Ok((y.clone(), lattice_laplacian(&arg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    #[test]
    fn delta_stencil_values() {
        // one node set to 1; neighbors at distance 1 in x receive 1, the
        // center -2
        let g = Grid::new(8.0, 64).unwrap(); // dx = 1/4, m = 4
        let mut s = vec![0.0; 64];
        s[10] = 1.0;
        let f = Field::from_samples(&g, s).unwrap();
        let lap = lattice_laplacian(&f).unwrap();
        assert_eq!(lap.samples()[10], -2.0);
        assert_eq!(lap.samples()[6], 1.0);
        assert_eq!(lap.samples()[14], 1.0);
        assert_eq!(lap.samples()[11], 0.0);
    }

    #[test]
    fn constants_are_annihilated() {
        let g = Grid::new(8.0, 64).unwrap();
        let c = Field::from_fn(&g, |_| 4.2);
        assert!(lattice_laplacian(&c).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn single_mode_eigenvalue() {
        // e^{i xi x} has eigenvalue 2 cos(xi) - 2
        let g = Grid::new(8.0, 128).unwrap();
        for k in [1i64, 5, 12] {
            let xi = PI * k as f64 / 8.0;
            let f = Field::from_fn(&g, |x| (xi * x).cos());
            let lap = lattice_laplacian(&f).unwrap();
            let lam = 2.0 * xi.cos() - 2.0;
            let expect = f.scale(lam);
            let diff = lap
                .samples()
                .iter()
                .zip(expect.samples())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "k = {k}: {diff}");
        }
    }

    #[test]
    fn incompatible_grid_rejected() {
        let g = Grid::new(20.0, 512).unwrap(); // 1/dx = 12.8
        let f = Field::zeros(&g);
        assert!(lattice_laplacian(&f).is_err());
    }

    #[test]
    fn spectral_k2d2_equals_stencil() {
        // multiplier -xi^2 beta_hat(xi) with the triangular kernel matches
        // the shift stencil on any 1/dx-integer grid
        use crate::kernel::builtin_kernel;
        use crate::multiplier::Multiplier;
        let g = Grid::new(16.0, 256).unwrap(); // dx = 1/8
        let k = builtin_kernel("triangular").unwrap();
        let f = Field::from_fn(&g, |x| (-x * x / 4.0).exp() + 0.3 * (PI * x / 4.0).sin());
        let kb = k.clone();
        let spectral = Multiplier::even_real(move |xi| -xi * xi * kb.beta_hat(xi))
            .apply(&f)
            .unwrap();
        let stencil = lattice_laplacian(&f).unwrap();
        let diff = spectral
            .samples()
            .iter()
            .zip(stencil.samples())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12, "max deviation {diff}");
    }
}
