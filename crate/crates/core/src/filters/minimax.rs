//! Minimax (complex Chebyshev) fractional delay design.
//!
//! Minimise `t` subject to `|sum_k l_k e^{-j w_i k} - e^{-j w_i delta}| <= t`
//! on a frequency grid and `sum_k l_k = 1`. The equality is eliminated by
//! writing `l_0 = 1 - sum_{k>0} l_k`, leaving `K` free taps plus `t`. Each
//! grid point contributes one second-order cone constraint, handled with the
//! logarithmic barrier `-log(t^2 - |e_i|^2)` and damped Newton steps along
//! the central path, seeded at the Lagrange design.

use alloc::vec;
use alloc::vec::Vec;

use super::{band_error, lagrange_coeffs, uniform_grid, DesignMethod, FirCoefficients, MAX_ORDER};
use crate::linalg::solve_in_place;
use crate::math::{cos, sin, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxOptions {
    /// Upper band edge as a fraction of the sample rate (`0.25` = quarter
    /// rate).
    pub band_fraction: f64,
    pub grid_size: usize,
    /// Target bound on the duality gap `2 m / tau`.
    pub gap_tolerance: f64,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        Self {
            band_fraction: 0.25,
            grid_size: 512,
            gap_tolerance: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxDesign {
    pub coefficients: FirCoefficients,
    /// Realised worst-case grid error of the returned taps.
    pub objective: f64,
    /// Epigraph variable at termination.
    pub epigraph: f64,
    /// Duality gap bound at termination.
    pub duality_gap: f64,
    pub newton_steps: usize,
}

const MAX_NEWTON_PER_CENTER: usize = 200;
const TAU_GROWTH: f64 = 8.0;
const PATH_GAP: f64 = 1e-10;
const MAX_ACTIVE_SET_CHANGES: usize = 32;
const KKT_ITERATIONS: usize = 50;

pub fn minimax_coeffs(delta: f64, order: usize, opts: &MinimaxOptions) -> Result<MinimaxDesign> {
    if order == 0 {
        return Err(Error::InvalidOrder {
            order,
            reason: "minimax design needs at least two taps",
        });
    }
    if order > MAX_ORDER {
        return Err(Error::InvalidOrder {
            order,
            reason: "order exceeds the supported maximum",
        });
    }
    if !(opts.band_fraction > 0.0 && opts.band_fraction <= 0.5) {
        return Err(Error::InvalidArgument("band fraction must lie in (0, 0.5]"));
    }
    if opts.grid_size < 2 {
        return Err(Error::InvalidArgument("minimax grid needs at least two points"));
    }
    if opts.gap_tolerance.is_nan() || opts.gap_tolerance <= 0.0 {
        return Err(Error::InvalidArgument("gap tolerance must be positive"));
    }
    let seed = lagrange_coeffs(delta, order)?;
    let u0: Vec<f64> = seed.taps()[1..].to_vec();
    let start = band_error(seed.taps(), delta, opts.band_fraction, opts.grid_size);
    if start <= 1e-15 {
        // the target is reproduced exactly (integer delay)
        return Ok(finish(delta, &u0, opts, start, 0.0, 0));
    }
    let problem = Problem::new(delta, order, opts)?;
    let central = problem.follow_central_path(problem.to_local(&u0), start)?;
    let steps = central.steps;
    let pol = problem.polish(&central);
    if let Some(polished) = pol {
        if polished.gap <= opts.gap_tolerance.max(central.gap) {
            return Ok(finish(delta, &problem.to_taps(&polished.u), opts, polished.t, polished.gap, steps));
        }
    }
    if central.gap > opts.gap_tolerance.max(1e-8) {
        return Err(Error::SolverNoConvergence {
            gap: central.gap,
            decrement: central.decrement,
        });
    }
    Ok(finish(delta, &problem.to_taps(&central.u), opts, central.t, central.gap, steps))
}

fn finish(delta: f64, u: &[f64], opts: &MinimaxOptions, t: f64, gap: f64, steps: usize) -> MinimaxDesign {
    let mut taps = Vec::with_capacity(u.len() + 1);
    taps.push(1.0 - u.iter().sum::<f64>());
    taps.extend_from_slice(u);
    let objective = band_error(&taps, delta, opts.band_fraction, opts.grid_size);
    MinimaxDesign {
        coefficients: FirCoefficients {
            taps,
            method: DesignMethod::Minimax,
            delta,
        },
        objective,
        epigraph: t,
        duality_gap: gap,
        newton_steps: steps,
    }
}

/// Point on (or near) the central path.
struct Central {
    u: Vec<f64>,
    t: f64,
    tau: f64,
    gap: f64,
    decrement: f64,
    steps: usize,
}

struct Polished {
    u: Vec<f64>,
    t: f64,
    gap: f64,
}

/// Error at one grid point as an affine map of the free taps:
/// `e = p + Q u`, with `Q` stored as real and imaginary rows.
struct GridPoint {
    p: [f64; 2],
    q_re: Vec<f64>,
    q_im: Vec<f64>,
}

/// The free taps `u = (l_1, ..., l_K)` are handled in the coordinates
/// `v = R u`, where `[Re Q; Im Q] = Q' R` is a thin QR factorisation of the
/// stacked design matrix. Over a narrow band the raw columns are nearly
/// collinear and the barrier Hessian would be hopelessly conditioned.
struct Problem {
    order: usize,
    points: Vec<GridPoint>,
    /// Upper triangular `K x K`, row-major.
    r: Vec<f64>,
}

impl Problem {
    fn new(delta: f64, order: usize, opts: &MinimaxOptions) -> Result<Self> {
        let grid = uniform_grid(2.0 * core::f64::consts::PI * opts.band_fraction, opts.grid_size);
        let mut points: Vec<GridPoint> = grid
            .into_iter()
            .map(|w| GridPoint {
                // l_0 = 1 contributes e^0 = 1; target is e^{-j w delta}
                p: [1.0 - cos(w * delta), sin(w * delta)],
                q_re: (1..=order).map(|k| cos(w * k as f64) - 1.0).collect(),
                q_im: (1..=order).map(|k| -sin(w * k as f64)).collect(),
            })
            .collect();

        // modified Gram-Schmidt, two passes per column
        let mut r = vec![0.0; order * order];
        let dot = |pts: &[GridPoint], a: usize, b: usize| -> f64 {
            pts.iter().map(|p| p.q_re[a] * p.q_re[b] + p.q_im[a] * p.q_im[b]).sum()
        };
        for j in 0..order {
            for _ in 0..2 {
                for i in 0..j {
                    let c = dot(&points, i, j);
                    r[i * order + j] += c;
                    for p in points.iter_mut() {
                        p.q_re[j] -= c * p.q_re[i];
                        p.q_im[j] -= c * p.q_im[i];
                    }
                }
            }
            let norm = sqrt(dot(&points, j, j));
            if norm.is_nan() || norm <= 1e-13 * r[0].max(norm) {
                return Err(Error::InvalidArgument("frequency grid too coarse for the filter order"));
            }
            r[j * order + j] = norm;
            for p in points.iter_mut() {
                p.q_re[j] /= norm;
                p.q_im[j] /= norm;
            }
        }
        Ok(Self { order, points, r })
    }

    fn to_local(&self, u: &[f64]) -> Vec<f64> {
        let k = self.order;
        (0..k).map(|i| (i..k).map(|j| self.r[i * k + j] * u[j]).sum()).collect()
    }

    fn to_taps(&self, v: &[f64]) -> Vec<f64> {
        let k = self.order;
        let mut u = vec![0.0; k];
        for i in (0..k).rev() {
            let tail: f64 = (i + 1..k).map(|j| self.r[i * k + j] * u[j]).sum();
            u[i] = (v[i] - tail) / self.r[i * k + i];
        }
        u
    }

    fn residual(pt: &GridPoint, u: &[f64]) -> [f64; 2] {
        let mut re = pt.p[0];
        let mut im = pt.p[1];
        for ((a, b), x) in pt.q_re.iter().zip(&pt.q_im).zip(u) {
            re += a * x;
            im += b * x;
        }
        [re, im]
    }

    fn max_error(&self, u: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|pt| {
                let r = Self::residual(pt, u);
                crate::math::hypot(r[0], r[1])
            })
            .fold(0.0, f64::max)
    }

    fn strictly_feasible(&self, u: &[f64], t: f64) -> bool {
        t > 0.0
            && self.points.iter().all(|pt| {
                let r = Self::residual(pt, u);
                crate::math::hypot(r[0], r[1]) < t
            })
    }

    /// Barrier phase: damped Newton centring for increasing `tau` until
    /// the gap bound drops below `PATH_GAP` or the Newton decrement stops
    /// improving in floating point.
    fn follow_central_path(&self, mut u: Vec<f64>, start: f64) -> Result<Central> {
        let k = self.order;
        let m = self.points.len() as f64;
        let mut t = 1.5 * start;
        let mut tau = 2.0 * m / start;
        let mut steps = 0;
        let mut last: Option<Central> = None;
        loop {
            let mut decrement = f64::INFINITY;
            let mut best = f64::INFINITY;
            let mut stalled = 0;
            let mut centred = false;
            for _ in 0..MAX_NEWTON_PER_CENTER {
                let (dir, lambda2) = self.newton_direction(&u, t, tau)?;
                decrement = sqrt(lambda2.max(0.0));
                if decrement <= 1e-6 {
                    centred = true;
                    break;
                }
                if decrement < 0.5 * best {
                    best = decrement;
                    stalled = 0;
                } else {
                    stalled += 1;
                    if stalled > 8 && decrement < 1e-3 {
                        break;
                    }
                }
                let mut alpha = if decrement > 0.25 { 1.0 / (1.0 + decrement) } else { 1.0 };
                let mut moved = false;
                for _ in 0..64 {
                    let cand: Vec<f64> = u.iter().zip(&dir).map(|(a, d)| a + alpha * d).collect();
                    let ct = t + alpha * dir[k];
                    if self.strictly_feasible(&cand, ct) {
                        u = cand;
                        t = ct;
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                steps += 1;
                if !moved {
                    break;
                }
            }
            let gap = 2.0 * m / tau;
            let here = Central {
                u: u.clone(),
                t,
                tau,
                gap,
                decrement,
                steps,
            };
            if !centred && decrement > 1e-3 {
                // lost the central path; the previous centre is the answer
                return last.ok_or(Error::SolverNoConvergence { gap, decrement });
            }
            if !centred || gap <= PATH_GAP {
                return Ok(here);
            }
            last = Some(here);
            tau *= TAU_GROWTH;
        }
    }

    /// Active-set Newton on the optimality conditions
    /// `|e_i|^2 = t^2` (i active), `sum mu_i Q_i^T e_i = 0`, `t sum mu_i = 1`,
    /// started from the barrier point and its implied multipliers.
    fn polish(&self, c: &Central) -> Option<Polished> {
        let two_t = 2.0 * c.t;
        let errors: Vec<f64> = self
            .points
            .iter()
            .map(|pt| {
                let r = Self::residual(pt, &c.u);
                crate::math::hypot(r[0], r[1])
            })
            .collect();
        // Barrier weight of each grid point, pooled onto the local maximum of
        // the grid error it climbs to. Neighbouring points on one error peak
        // would otherwise enter as near-duplicate constraints.
        let m = errors.len();
        let mut pooled = vec![0.0; m];
        for (i, e) in errors.iter().enumerate() {
            let s = (c.t - e) * (c.t + e);
            let mut j = i;
            loop {
                if j + 1 < m && errors[j + 1] > errors[j] {
                    j += 1;
                } else if j > 0 && errors[j - 1] > errors[j] {
                    j -= 1;
                } else {
                    break;
                }
            }
            pooled[j] += two_t / (c.tau * s);
        }
        let total: f64 = pooled.iter().sum();
        let mut active: Vec<usize> = (0..m).filter(|&i| pooled[i] > 1e-4 * total).collect();
        let mut mu: Vec<f64> = active.iter().map(|&i| pooled[i] / (c.t * total)).collect();

        for _ in 0..MAX_ACTIVE_SET_CHANGES {
            let (u, t, new_mu) = self.kkt_newton(&active, c.u.clone(), c.t, mu.clone())?;
            if let Some((pos, _)) = new_mu
                .iter()
                .enumerate()
                .filter(|(_, &m)| m < 0.0)
                .min_by(|a, b| a.1.total_cmp(b.1))
            {
                active.remove(pos);
                mu = new_mu;
                mu.remove(pos);
                continue;
            }
            let worst = self
                .points
                .iter()
                .enumerate()
                .map(|(i, pt)| {
                    let r = Self::residual(pt, &u);
                    (i, crate::math::hypot(r[0], r[1]))
                })
                .max_by(|a, b| a.1.total_cmp(&b.1))?;
            if worst.1 > t * (1.0 + 1e-13) && !active.contains(&worst.0) {
                active.push(worst.0);
                mu = new_mu;
                mu.push(0.0);
                continue;
            }
            let gap = self.dual_gap(&active, &new_mu, &u, t)?;
            return Some(Polished { u, t: t.max(worst.1), gap });
        }
        None
    }

    fn kkt_newton(
        &self,
        active: &[usize],
        mut u: Vec<f64>,
        mut t: f64,
        mut mu: Vec<f64>,
    ) -> Option<(Vec<f64>, f64, Vec<f64>)> {
        let k = self.order;
        let na = active.len();
        let n = k + 1 + na;
        if na == 0 {
            return None;
        }
        let mut prev_norm = f64::INFINITY;
        for _ in 0..KKT_ITERATIONS {
            let mut jac = vec![0.0; n * n];
            let mut rhs = vec![0.0; n];
            // rows 0..k: sum mu_i Q_i^T r_i ; row k: 1 - t sum mu ; rows k+1..: (|r|^2 - t^2)/2
            let mu_sum: f64 = mu.iter().sum();
            rhs[k] = 1.0 - t * mu_sum;
            jac[k * n + k] = -mu_sum;
            for (a, (&i, &m)) in active.iter().zip(&mu).enumerate() {
                let pt = &self.points[i];
                let r = Self::residual(pt, &u);
                let row = k + 1 + a;
                rhs[row] = 0.5 * (r[0] * r[0] + r[1] * r[1] - t * t);
                for j in 0..k {
                    let qtr = pt.q_re[j] * r[0] + pt.q_im[j] * r[1];
                    rhs[j] += m * qtr;
                    for l in 0..k {
                        jac[j * n + l] += m * (pt.q_re[j] * pt.q_re[l] + pt.q_im[j] * pt.q_im[l]);
                    }
                    jac[j * n + row] = qtr;
                    jac[row * n + j] = qtr;
                }
                jac[row * n + k] = -t;
                jac[k * n + row] = -t;
            }
            let norm = rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if norm <= 1e-16 || (norm >= prev_norm && norm < 1e-12) {
                break;
            }
            prev_norm = norm;
            let mut step: Vec<f64> = rhs.iter().map(|v| -v).collect();
            solve_in_place(n, &mut jac, &mut step).ok()?;
            for j in 0..k {
                u[j] += step[j];
            }
            t += step[k];
            for (a, m) in mu.iter_mut().enumerate() {
                *m += step[k + 1 + a];
            }
        }
        if !u.iter().all(|v| v.is_finite()) || !t.is_finite() {
            return None;
        }
        Some((u, t, mu))
    }

    /// `t` minus the lower bound `sum w_i z_i . p_i` from unit directions
    /// `z_i = e_i / |e_i|` and weights `w_i = t mu_i` that cancel the
    /// dependence on the free taps.
    fn dual_gap(&self, active: &[usize], mu: &[f64], u: &[f64], t: f64) -> Option<f64> {
        let mut bound = 0.0;
        let mut stationarity = vec![0.0; self.order];
        for (&i, &m) in active.iter().zip(mu) {
            let pt = &self.points[i];
            let r = Self::residual(pt, u);
            let norm = crate::math::hypot(r[0], r[1]);
            if norm == 0.0 {
                return None;
            }
            let w = t * m;
            let z = [r[0] / norm, r[1] / norm];
            bound += w * (z[0] * pt.p[0] + z[1] * pt.p[1]);
            for j in 0..self.order {
                stationarity[j] += w * (pt.q_re[j] * z[0] + pt.q_im[j] * z[1]);
            }
        }
        // an imperfect cancellation loosens the bound by at most |residual| |u|-scale
        let slack: f64 = stationarity.iter().zip(u).map(|(s, x)| (s * x).abs()).sum();
        Some((self.max_error(u) - bound).abs() + slack)
    }

    /// Newton step for `tau t - sum log(t^2 - |e_i|^2)` and the squared
    /// Newton decrement.
    fn newton_direction(&self, u: &[f64], t: f64, tau: f64) -> Result<(Vec<f64>, f64)> {
        let k = self.order;
        let n = k + 1;
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        grad[k] = tau;
        let mut g = vec![0.0; n];
        for pt in &self.points {
            let r = Self::residual(pt, u);
            let norm = crate::math::hypot(r[0], r[1]);
            let s = (t - norm) * (t + norm);
            // g = grad of s
            for j in 0..k {
                g[j] = -2.0 * (pt.q_re[j] * r[0] + pt.q_im[j] * r[1]);
            }
            g[k] = 2.0 * t;
            let inv_s = 1.0 / s;
            for a in 0..n {
                grad[a] -= g[a] * inv_s;
                for b in 0..n {
                    hess[a * n + b] += g[a] * g[b] * inv_s * inv_s;
                }
            }
            for a in 0..k {
                for b in 0..k {
                    hess[a * n + b] +=
                        2.0 * (pt.q_re[a] * pt.q_re[b] + pt.q_im[a] * pt.q_im[b]) * inv_s;
                }
            }
            hess[k * n + k] -= 2.0 * inv_s;
        }
        let mut dir: Vec<f64> = grad.iter().map(|v| -v).collect();
        solve_in_place(n, &mut hess, &mut dir)?;
        let lambda2 = -grad.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>();
        Ok((dir, lambda2))
    }
}
