//! The scalar map `f(x) = 2x² - 2x + 1` that drives the last coordinate.

use crate::error::{QsoError, Result};

#[inline]
pub(crate) fn f(x: f64) -> f64 {
    2.0 * x * x - 2.0 * x + 1.0
}

fn check_domain(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(QsoError::OutOfDomain(x))
    }
}

/// `f(x)` for `x ∈ [0, 1]`; the image lies in `[1/2, 1]`.
pub fn scalar_f(x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(f(x))
}

/// The `n`-fold composition `f^n(x)`.
pub fn scalar_f_iterate(x: f64, n: usize) -> Result<f64> {
    check_domain(x)?;
    Ok((0..n).fold(x, |acc, _| f(acc)))
}

/// Roots of `f^n(x) = x` on `[0, 1]`, found by scanning `samples` grid
/// intervals for sign changes (or exact zeros) and bisecting each one.
/// Roots closer than `tol` are merged.
pub fn iterate_fixed_points(n: usize, samples: usize, tol: f64) -> Vec<f64> {
    let g = |x: f64| (0..n).fold(x, |acc, _| f(acc)) - x;
    let samples = samples.max(1);
    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|last| (r - last).abs() > tol) {
            roots.push(r);
        }
    };
    let mut x0 = 0.0;
    let mut g0 = g(x0);
    if g0 == 0.0 {
        push(x0, &mut roots);
    }
    for i in 1..=samples {
        let x1 = i as f64 / samples as f64;
        let g1 = g(x1);
        if g1 == 0.0 {
            push(x1, &mut roots);
        } else if g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0) {
            let (mut lo, mut hi, mut glo) = (x0, x1, g0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (gm < 0.0) == (glo < 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            push(0.5 * (lo + hi), &mut roots);
        }
        x0 = x1;
        g0 = g1;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_f_examples() {
        assert_eq!(scalar_f(0.0).unwrap(), 1.0);
        assert_eq!(scalar_f(1.0).unwrap(), 1.0);
        assert_eq!(scalar_f(0.5).unwrap(), 0.5);
        assert!((scalar_f(0.3).unwrap() - 0.58).abs() < 1e-15);
        assert!(matches!(scalar_f(-0.1), Err(QsoError::OutOfDomain(_))));
        assert!(matches!(scalar_f(f64::NAN), Err(QsoError::OutOfDomain(_))));
    }

    #[test]
    fn scalar_f_iterate_examples() {
        for n in [0, 1, 5, 100] {
            assert_eq!(scalar_f_iterate(1.0, n).unwrap(), 1.0);
        }
        assert!((scalar_f_iterate(0.9, 50).unwrap() - 0.5).abs() <= 1e-12);
        assert!((scalar_f_iterate(0.3, 2).unwrap() - 0.5128).abs() < 1e-15);
        assert_eq!(scalar_f_iterate(0.3, 0).unwrap(), 0.3);
        assert!(scalar_f_iterate(1.5, 1).is_err());
    }

    #[test]
    fn range_is_half_to_one() {
        for i in 0..=10_000 {
            let x = i as f64 / 10_000.0;
            let y = f(x);
            assert!((0.5..=1.0).contains(&y));
            if x != 0.5 {
                assert!(y > 0.5);
            }
        }
    }

    #[test]
    fn only_fixed_points_of_iterates_are_half_and_one() {
        for n in 1..=6 {
            let roots = iterate_fixed_points(n, 20_000, 1e-9);
            assert_eq!(roots.len(), 2, "n={n}: {roots:?}");
            assert!((roots[0] - 0.5).abs() < 1e-9);
            assert_eq!(roots[1], 1.0);
        }
    }
}
