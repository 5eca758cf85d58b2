//! Alias-free products via zero-padded transforms.
//!
//! A product of `q` factors band-limited to `|k| <= N/2` carries modes up to
//! `q N/2`; evaluating it pointwise on the original grid folds those back
//! into the resolved band. Padding to `M >= (q+1) N/2 + 1` points keeps every
//! aliased image outside the retained band, so the truncated result is exact
//! there. The unpaired Nyquist coefficient is split evenly across `±N/2` on
//! the padded grid and folded back on truncation.

use crate::error::{Error, Result};
use crate::fft;
use crate::field::Field;
use crate::grid::Grid;
use rustfft::num_complex::Complex64;

/// Smallest even padded length that keeps the retained band alias-free for a
/// `q`-fold product.
fn padded_len(n: usize, q: usize) -> usize {
    let min = (q + 1) * n / 2 + 1;
    (min + 1) & !1
}

fn embed(spec: &[Complex64], grid: &Grid, m: usize) -> Vec<Complex64> {
    let _n = grid.n_points();
    let mut big = vec![Complex64::new(0.0, 0.0); m];
    for (idx, &c) in spec.iter().enumerate() {
        let k = grid.mode_number(idx);
        if idx == grid.nyquist_index() {
            big[(k.rem_euclid(m as i64)) as usize] += 0.5 * c;
            big[((-k).rem_euclid(m as i64)) as usize] += 0.5 * c;
        } else {
            big[(k.rem_euclid(m as i64)) as usize] = c;
        }
    }
    big
}

fn truncate(big: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    let n = grid.n_points();
    let m = big.len();
    (0..n)
        .map(|idx| {
            let k = grid.mode_number(idx);
            if idx == grid.nyquist_index() {
                big[(k.rem_euclid(m as i64)) as usize] + big[((-k).rem_euclid(m as i64)) as usize]
            } else {
                big[(k.rem_euclid(m as i64)) as usize]
            }
        })
        .collect()
}

/// Inverse transform on the padded grid (unnormalized layout matching the
/// field convention, with the alternating node-origin phase).
fn padded_samples(big: &[Complex64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = big
        .iter()
        .enumerate()
        .map(|(m, c)| if m % 2 == 0 { *c } else { -*c })
        .collect();
    fft::inverse(&mut buf);
    buf
}

fn padded_spectrum(mut buf: Vec<Complex64>) -> Vec<Complex64> {
    let m = buf.len();
    fft::forward(&mut buf);
    let scale = 1.0 / m as f64;
    for (i, c) in buf.iter_mut().enumerate() {
        let phase = if i % 2 == 0 { scale } else { -scale };
        *c *= phase;
    }
    buf
}

/// Pointwise product of the given fields, computed alias-free on a padded
/// grid and truncated back. All fields must share one grid.
pub fn dealias_product(fields: &[&Field]) -> Result<Field> {
    let first = fields
        .first()
        .ok_or_else(|| Error::Config("dealias_product needs at least one factor".into()))?;
    let grid = first.grid();
    for f in fields {
        if f.grid() != grid {
            return Err(Error::Config(
                "dealias_product factors live on different grids".into(),
            ));
        }
    }
    if fields.len() == 1 {
        return Ok((*first).clone());
    }
    let q = fields.len();
    let m = padded_len(grid.n_points(), q);
    let mut prod: Option<Vec<Complex64>> = None;
    for f in fields {
        let phys = padded_samples(&embed(f.spectrum(), grid, m));
        prod = Some(match prod {
            None => phys,
            Some(mut acc) => {
                for (a, b) in acc.iter_mut().zip(&phys) {
                    *a = Complex64::new(a.re * b.re, 0.0);
                }
                acc
            }
        });
    }
    let spec = truncate(&padded_spectrum(prod.unwrap()), grid);
    Ok(Field::from_spectrum_unchecked(grid, spec))
}

/// Alias-free integer power `f^q` (one padded round trip).
pub fn dealias_pow(f: &Field, q: u32) -> Field {
    if q == 1 {
        return f.clone();
    }
    let grid = f.grid();
    if q == 0 {
        return Field::from_fn(grid, |_| 1.0);
    }
    let m = padded_len(grid.n_points(), q as usize);
    let phys = padded_samples(&embed(f.spectrum(), grid, m));
    let powered: Vec<Complex64> = phys
        .iter()
        .map(|z| Complex64::new(z.re.powi(q as i32), 0.0))
        .collect();
    let spec = truncate(&padded_spectrum(powered), grid);
    Field::from_spectrum_unchecked(grid, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Oracle: evaluate the product on a 4x finer grid and truncate back.
    fn product_on_fine_grid(fields: &[&Field]) -> Field {
        let grid = fields[0].grid();
        let m = 4 * grid.n_points();
        let mut prod: Option<Vec<Complex64>> = None;
        for f in fields {
            let phys = padded_samples(&embed(f.spectrum(), grid, m));
            prod = Some(match prod {
                None => phys,
                Some(mut acc) => {
                    for (a, b) in acc.iter_mut().zip(&phys) {
                        *a = Complex64::new(a.re * b.re, 0.0);
                    }
                    acc
                }
            });
        }
        let spec = truncate(&padded_spectrum(prod.unwrap()), grid);
        Field::from_spectrum_unchecked(grid, spec)
    }

    #[test]
    fn zero_times_anything_is_zero() {
        let g = Grid::new(PI, 16).unwrap();
        let z = Field::zeros(&g);
        let f = Field::from_fn(&g, |x| x.sin());
        let p = dealias_product(&[&z, &f]).unwrap();
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn sine_squared_identity() {
        let g = Grid::new(PI, 32).unwrap();
        let f = Field::from_fn(&g, |x| x.sin());
        let p = dealias_product(&[&f, &f]).unwrap();
        let expect = Field::from_fn(&g, |x| (1.0 - (2.0 * x).cos()) / 2.0);
        assert!(max_diff(&p, &expect) < 1e-12);
        let by_pow = dealias_pow(&f, 2);
        assert!(max_diff(&p, &by_pow) < 1e-14);
    }

    #[test]
    fn high_mode_square_aliases_without_padding() {
        // On N = 8, mode 3 squared carries modes 0 and ±6; the nodal product
        // folds ±6 onto ∓2. The padded product must match the fine-grid oracle.
        let g = Grid::new(PI, 8).unwrap();
        let f = Field::from_fn(&g, |x| (3.0 * x).cos());
        let padded = dealias_pow(&f, 2);
        let oracle = product_on_fine_grid(&[&f, &f]);
        assert!(max_diff(&padded, &oracle) < 1e-13);
        // the naive nodal square genuinely differs (alias energy at |k| = 2)
        let nodal = f.map(|u| u * u);
        assert!((nodal.coeff(2) - padded.coeff(2)).norm() > 1e-3);
    }

    #[test]
    fn triple_product_matches_fine_grid() {
        let g = Grid::new(2.0, 64).unwrap();
        let a = Field::from_fn(&g, |x| (PI * x / 2.0).sin() + 0.3);
        let b = Field::from_fn(&g, |x| (3.0 * PI * x / 2.0).cos());
        let c = Field::from_fn(&g, |x| 0.5 * (5.0 * PI * x / 2.0).sin());
        let p = dealias_product(&[&a, &b, &c]).unwrap();
        let oracle = product_on_fine_grid(&[&a, &b, &c]);
        assert!(max_diff(&p, &oracle) < 1e-13);
    }

    #[test]
    fn mixed_grids_rejected() {
        let g1 = Grid::new(PI, 16).unwrap();
        let g2 = Grid::new(PI, 32).unwrap();
        let a = Field::zeros(&g1);
        let b = Field::zeros(&g2);
        assert!(dealias_product(&[&a, &b]).is_err());
        assert!(dealias_product(&[]).is_err());
    }
}
