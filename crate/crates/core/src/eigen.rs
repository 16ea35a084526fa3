//! Eigenvalues of small dense real matrices.
//!
//! Householder reduction to upper Hessenberg form followed by the implicit
//! double-shift (Francis) QR iteration. Only eigenvalues are computed.

use num_complex::Complex64;

use crate::error::{QsoError, Result};

/// Dense row-major square matrix.
pub type Matrix = Vec<Vec<f64>>;

pub const DEFAULT_MAX_SWEEPS: usize = 500;

/// Reduces `a` in place to upper Hessenberg form by orthogonal similarity.
pub fn hessenberg(a: &mut Matrix) {
    let n = a.len();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let norm = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] > 0.0 { -norm } else { norm };
        for i in 0..n {
            v[i] = if i > k { a[i][k] } else { 0.0 };
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in v.iter_mut().skip(k + 1) {
            *vi /= vnorm;
        }
        // A <- (I - 2vv^T) A
        for j in 0..n {
            let s: f64 = (k + 1..n).map(|i| v[i] * a[i][j]).sum();
            for i in k + 1..n {
                a[i][j] -= 2.0 * v[i] * s;
            }
        }
        // A <- A (I - 2vv^T)
        for row in a.iter_mut() {
            let s: f64 = (k + 1..n).map(|j| row[j] * v[j]).sum();
            for j in k + 1..n {
                row[j] -= 2.0 * s * v[j];
            }
        }
        a[k + 1][k] = alpha;
        for row in a.iter_mut().skip(k + 2) {
            row[k] = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix (destroyed in the process).
///
/// `max_sweeps` bounds the QR sweeps spent on any single eigenvalue.
pub fn hessenberg_eigenvalues(a: &mut Matrix, max_sweeps: usize) -> Result<Vec<Complex64>> {
    let n = a.len();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut shift = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // small subdiagonal element splits the matrix
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= f64::EPSILON * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + shift;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += shift;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its >= max_sweeps {
                return Err(QsoError::EigenNoConvergence(max_sweeps));
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                shift += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // look for two consecutive small subdiagonal elements
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }

            // double QR step on rows l..=nu and columns m..=nu
            let mut k = m;
            while k < nu {
                let mut scale = 0.0;
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k + 1 != nu { a[k + 2][k - 1] } else { 0.0 };
                    scale = p.abs() + q.abs() + r.abs();
                    if scale != 0.0 {
                        p /= scale;
                        q /= scale;
                        r /= scale;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * scale;
                    }
                    p += s;
                    let hx = p / s;
                    let hy = q / s;
                    let hz = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut t = a[k][j] + q * a[k + 1][j];
                        if k + 1 != nu {
                            t += r * a[k + 2][j];
                            a[k + 2][j] -= t * hz;
                        }
                        a[k + 1][j] -= t * hy;
                        a[k][j] -= t * hx;
                    }
                    let last = nu.min(k + 3);
                    for row in a.iter_mut().take(last + 1).skip(l) {
                        let mut t = hx * row[k] + hy * row[k + 1];
                        if k + 1 != nu {
                            t += hz * row[k + 2];
                            row[k + 2] -= t * r;
                        }
                        row[k + 1] -= t * q;
                        row[k] -= t;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}

/// Eigenvalues of a general square matrix.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(QsoError::InvalidArgument("matrix is not square".into()));
    }
    if a.iter().flatten().any(|v| !v.is_finite()) {
        return Err(QsoError::InvalidArgument("matrix has non-finite entries".into()));
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    hessenberg_eigenvalues(&mut h, DEFAULT_MAX_SWEEPS)
}

/// Greedy nearest-neighbour matching; returns the worst pair distance.
pub fn max_matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
