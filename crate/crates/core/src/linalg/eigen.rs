//! Eigenvalues of a dense real non-symmetric matrix: diagonal balancing,
//! Householder reduction to upper Hessenberg form, then the implicit
//! double-shift (Francis) QR iteration. Eigenvalues only, no vectors.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::Matrix;
use crate::math::sqrt;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// All eigenvalues of `a`, complex pairs adjacent with positive imaginary
/// part first. Conjugate pairs are exact conjugates of each other.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            what: "eigenvalue input (columns)",
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries"));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    balance(&mut h);
    to_hessenberg(&mut h);
    hqr(&mut h)
}

fn balance(a: &mut Matrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

fn to_hessenberg(a: &mut Matrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let scale: f64 = (k + 1..n).map(|i| a[(i, k)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut norm2 = 0.0;
        for i in k + 1..n {
            v[i] = a[(i, k)] / scale;
            norm2 += v[i] * v[i];
        }
        let alpha = if v[k + 1] > 0.0 { -sqrt(norm2) } else { sqrt(norm2) };
        // H = I - v v^T / beta with v = x - alpha e1
        let beta = norm2 - v[k + 1] * alpha;
        v[k + 1] -= alpha;
        if beta == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum();
            let f = dot / beta;
            for i in k + 1..n {
                a[(i, j)] -= f * v[i];
            }
        }
        for i in 0..n {
            let dot: f64 = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum();
            let f = dot / beta;
            for j in k + 1..n {
                a[(i, j)] -= f * v[j];
            }
        }
        a[(k + 1, k)] = alpha * scale;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
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

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
fn hqr(a: &mut Matrix) -> Result<Vec<Complex64>> {
    let n = a.rows() as isize;
    let at = |i: isize, j: isize| (i as usize, j as usize);
    let mut wr = vec![Complex64::new(0.0, 0.0); n as usize];
    let eps = f64::EPSILON;

    let mut anorm = 0.0;
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm += a[at(i, j)].abs();
        }
    }

    let mut nn = n - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l > 0 {
                let mut s = a[at(l - 1, l - 1)].abs() + a[at(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[at(l, l - 1)].abs() <= eps * s {
                    a[at(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[at(nn, nn)];
            if l == nn {
                wr[nn as usize] = Complex64::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[at(nn - 1, nn - 1)];
            let mut w = a[at(nn, nn - 1)] * a[at(nn - 1, nn)];
            if l == nn - 1 {
                let p2 = 0.5 * (y - x);
                let q2 = p2 * p2 + w;
                let mut z = sqrt(q2.abs());
                x += t;
                if q2 >= 0.0 {
                    z = p2 + sign(z, p2);
                    let lo = x + z;
                    let hi = if z != 0.0 { x - w / z } else { lo };
                    wr[(nn - 1) as usize] = Complex64::new(lo, 0.0);
                    wr[nn as usize] = Complex64::new(hi, 0.0);
                } else {
                    wr[(nn - 1) as usize] = Complex64::new(x + p2, z);
                    wr[nn as usize] = Complex64::new(x + p2, -z);
                }
                nn -= 2;
                break;
            }
            if its == MAX_SWEEPS {
                return Err(Error::EigenNoConvergence {
                    size: n as usize,
                });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 0..=nn {
                    a[at(i, i)] -= x;
                }
                let s = a[at(nn, nn - 1)].abs() + a[at(nn - 1, nn - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let mut m = nn - 2;
            loop {
                let z = a[at(m, m)];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / a[at(m + 1, m)] + a[at(m, m + 1)];
                q = a[at(m + 1, m + 1)] - z - r - s;
                r = a[at(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[at(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[at(m - 1, m - 1)].abs() + z.abs() + a[at(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nn - 1 {
                a[at(i + 2, i)] = 0.0;
                if i != m {
                    a[at(i + 2, i - 1)] = 0.0;
                }
            }
            for k in m..nn {
                if k != m {
                    p = a[at(k, k - 1)];
                    q = a[at(k + 1, k - 1)];
                    r = if k + 1 != nn { a[at(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign(sqrt(p * p + q * q + r * r), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[at(k, k - 1)] = -a[at(k, k - 1)];
                    }
                } else {
                    a[at(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    let mut pp = a[at(k, j)] + q * a[at(k + 1, j)];
                    if k + 1 != nn {
                        pp += r * a[at(k + 2, j)];
                        a[at(k + 2, j)] -= pp * z;
                    }
                    a[at(k + 1, j)] -= pp * y;
                    a[at(k, j)] -= pp * x;
                }
                let mmin = if nn < k + 3 { nn } else { k + 3 };
                for i in l..=mmin {
                    let mut pp = x * a[at(i, k)] + y * a[at(i, k + 1)];
                    if k + 1 != nn {
                        pp += z * a[at(i, k + 2)];
                        a[at(i, k + 2)] -= pp * r;
                    }
                    a[at(i, k + 1)] -= pp * q;
                    a[at(i, k)] -= pp;
                }
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok(wr)
}
