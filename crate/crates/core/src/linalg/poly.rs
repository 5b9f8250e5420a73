//! Polynomial roots as companion-matrix eigenvalues.
//!
//! Real coefficients go through the real Francis iteration so that complex
//! roots come out as exact conjugate pairs. Complex coefficients use a
//! single-shift complex QR iteration on the (already Hessenberg) companion
//! matrix.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{eigenvalues, Matrix};
use crate::{Error, Result};

const MAX_ITERS_PER_ROOT: usize = 100;

/// Roots of `c[0] z^n + c[1] z^(n-1) + ... + c[n]`. The leading coefficient
/// must be nonzero.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let Some((&lead, tail)) = coeffs.split_first() else {
        return Err(Error::InvalidArgument("empty polynomial"));
    };
    if lead == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("leading coefficient is zero"));
    }
    let n = tail.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if tail.iter().all(|c| c.im == 0.0) && lead.im == 0.0 {
        let mut m = Matrix::zeros(n, n);
        for (j, c) in tail.iter().enumerate() {
            m[(0, j)] = -c.re / lead.re;
        }
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        return eigenvalues(&m);
    }
    let mut h = vec![Complex64::new(0.0, 0.0); n * n];
    for (j, c) in tail.iter().enumerate() {
        h[j] = -c / lead;
    }
    for i in 1..n {
        h[i * n + i - 1] = Complex64::new(1.0, 0.0);
    }
    complex_hessenberg_eigenvalues(n, &mut h)
}

/// Eigenvalues of an `n x n` complex upper Hessenberg matrix stored
/// row-major in `h` (overwritten).
pub fn complex_hessenberg_eigenvalues(n: usize, h: &mut [Complex64]) -> Result<Vec<Complex64>> {
    assert_eq!(h.len(), n * n);
    let zero = Complex64::new(0.0, 0.0);
    let idx = |i: usize, j: usize| i * n + j;
    let mut eig = vec![zero; n];
    if n == 0 {
        return Ok(eig);
    }
    let mut hi = n - 1;
    let mut its = 0;
    let mut rot: Vec<(Complex64, Complex64)> = vec![(zero, zero); n];
    loop {
        if hi == 0 {
            eig[0] = h[idx(0, 0)];
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let s = h[idx(lo - 1, lo - 1)].l1_norm() + h[idx(lo, lo)].l1_norm();
            if h[idx(lo, lo - 1)].l1_norm() <= f64::EPSILON * s {
                h[idx(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[idx(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        if its == MAX_ITERS_PER_ROOT {
            return Err(Error::EigenNoConvergence { size: n });
        }
        its += 1;

        let shift = if its % 11 == 0 {
            // exceptional shift breaks rare cycles
            h[idx(hi, hi)] + Complex64::new(h[idx(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(
                h[idx(hi - 1, hi - 1)],
                h[idx(hi - 1, hi)],
                h[idx(hi, hi - 1)],
                h[idx(hi, hi)],
            )
        };
        for i in lo..=hi {
            h[idx(i, i)] -= shift;
        }
        // QR by Givens on the active block, then RQ.
        for k in lo..hi {
            let a = h[idx(k, k)];
            let b = h[idx(k + 1, k)];
            let r = crate::math::hypot(a.norm(), b.norm());
            let (c, s) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), zero)
            } else {
                (a / r, b / r)
            };
            rot[k] = (c, s);
            for j in k..=hi {
                let x = h[idx(k, j)];
                let y = h[idx(k + 1, j)];
                h[idx(k, j)] = c.conj() * x + s.conj() * y;
                h[idx(k + 1, j)] = -s * x + c * y;
            }
        }
        for k in lo..hi {
            let (c, s) = rot[k];
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let x = h[idx(i, k)];
                let y = h[idx(i, k + 1)];
                h[idx(i, k)] = x * c + y * s;
                h[idx(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }
        for i in lo..=hi {
            h[idx(i, i)] += shift;
        }
    }
    Ok(eig)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let e1 = tr_half + disc;
    let e2 = tr_half - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}
