//! Poisson–Dirichlet distributions.
//!
//! * [`sample_pd`] / [`StickBreaking`] draw the sorted stick-breaking sequence with
//!   sticks `1 - U^(1/theta)`.
//! * [`solve_dickman`] and [`solve_gtheta`] tabulate Dickman's `rho` and its
//!   `theta` analogue `g_theta` by integrating the differentiated delay equations
//!   `t rho'(t) = -rho(t-1)` and `t g'(t) = (theta-1) g(t) - theta g(t-1)` with
//!   classical RK4, reading the delayed argument from the table being built
//!   (cubic interpolation on half steps).
//! * [`PdDistribution`] bundles a table with the finite-dimensional densities
//!   `f_{theta,k}` and the distribution functions built on them.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{gamma, stream_rng, CompensatedSum, EULER_MASCHERONI};
use crate::quad::Quadrature;

/// Parameter of PD(theta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdParams {
    theta: f64,
}

impl PdParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(format!("theta must be positive and finite, got {theta}")));
        }
        Ok(PdParams { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `e^{-gamma theta} / Gamma(theta)`, the constant of `g_theta` on `(0, 1]`.
    pub fn g_constant(&self) -> f64 {
        (-EULER_MASCHERONI * self.theta).exp() / gamma(self.theta)
    }
}

/// Leading parts `X_1 >= ... >= X_k` of one PD draw and the mass not in them.
#[derive(Debug, Clone, PartialEq)]
pub struct StickSample {
    pub parts: Vec<f64>,
    /// `1 - sum(parts)`, accumulated from the discarded sticks and the unbroken remainder.
    pub residual: f64,
}

pub const DEFAULT_STICK_EPSILON: f64 = 1e-9;

/// Stick-breaking generator for PD(theta).
#[derive(Debug, Clone, Copy)]
pub struct StickBreaking {
    params: PdParams,
    epsilon: f64,
}

impl StickBreaking {
    pub fn new(params: PdParams) -> Self {
        StickBreaking { params, epsilon: DEFAULT_STICK_EPSILON }
    }

    pub fn with_epsilon(params: PdParams, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::domain(format!("stick threshold must lie in (0,1), got {epsilon}")));
        }
        Ok(StickBreaking { params, epsilon })
    }

    pub fn params(&self) -> PdParams {
        self.params
    }

    /// Breaks sticks until the unbroken remainder is below the threshold and
    /// below the k-th largest stick, so no later stick can enter the top k.
    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<StickSample> {
        if k == 0 {
            return Err(Error::domain("number of parts must be at least 1"));
        }
        let inv_theta = 1.0 / self.params.theta;
        let mut sticks: Vec<f64> = Vec::with_capacity(4 * k + 16);
        let mut remaining = 1.0f64;
        loop {
            let v = rng.random::<f64>().powf(inv_theta);
            sticks.push(remaining * (1.0 - v));
            remaining *= v;
            if remaining < self.epsilon && sticks.len() >= k {
                sticks.sort_unstable_by(|a, b| b.total_cmp(a));
                if sticks[k - 1] > remaining {
                    break;
                }
            }
        }
        let mut residual: CompensatedSum = sticks[k..].iter().copied().collect();
        residual.add(remaining);
        sticks.truncate(k);
        Ok(StickSample { parts: sticks, residual: residual.value() })
    }

    /// All sticks strictly above `threshold` (unsorted order is discarded; the
    /// result is non-increasing).
    pub fn points_above<R: Rng + ?Sized>(&self, threshold: f64, rng: &mut R) -> Vec<f64> {
        let inv_theta = 1.0 / self.params.theta;
        let mut out = Vec::new();
        let mut remaining = 1.0f64;
        while remaining > threshold {
            let v = rng.random::<f64>().powf(inv_theta);
            let stick = remaining * (1.0 - v);
            if stick > threshold {
                out.push(stick);
            }
            remaining *= v;
        }
        out.sort_unstable_by(|a, b| b.total_cmp(a));
        out
    }
}

/// First `k` sorted parts of one PD(theta) realization, deterministic in `seed`.
pub fn sample_pd(params: PdParams, k: usize, seed: u64) -> Result<StickSample> {
    StickBreaking::new(params).sample(k, &mut stream_rng(seed, 0))
}

/// `count` independent draws; replicate `r` uses stream `r` of `seed`.
pub fn sample_pd_replicates(params: PdParams, k: usize, seed: u64, count: usize) -> Result<Vec<StickSample>> {
    let sampler = StickBreaking::new(params);
    (0..count as u64)
        .into_par_iter()
        .map(|r| sampler.sample(k, &mut stream_rng(seed, r)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableKind {
    DickmanRho,
    GTheta { theta: f64 },
}

/// Tabulated `rho` or `g_theta` on the uniform grid `t_i = i / steps_per_unit`.
///
/// Evaluation between grid points uses a four-point Lagrange stencil kept
/// inside the unit interval `[j, j+1]` containing the argument, so it never
/// straddles the breakpoints at the integers. Arguments beyond the table are an
/// error; on the initial closed-form branch the exact expression is used.
#[derive(Debug, Clone)]
pub struct FunctionTable {
    kind: TableKind,
    steps_per_unit: usize,
    values: Vec<f64>,
    t_max: f64,
}

fn steps_per_unit(step: f64) -> Result<usize> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::domain(format!("step must lie in (0, 1), got {step}")));
    }
    if step > 1e-3 {
        return Err(Error::domain(format!("step must be at most 1e-3, got {step}")));
    }
    let n = (1.0 / step).round();
    if ((n * step) - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("1/step must be an integer, got step {step}")));
    }
    Ok(n as usize)
}

fn last_index(t_max: f64, n: usize) -> usize {
    let m = (t_max * n as f64 - 1e-9).ceil() as usize;
    // keep at least four points in the last (partial) unit interval
    m.max((t_max.floor() as usize) * n + 3)
}

/// Cubic Lagrange interpolation of `values` at fractional index `x`, with the
/// stencil confined to `[lo, hi]`.
fn interpolate(values: &[f64], x: f64, lo: usize, hi: usize) -> f64 {
    let base = x.floor() as isize - 1;
    let i0 = base.clamp(lo as isize, hi as isize - 3) as usize;
    let mut acc = 0.0;
    for a in 0..4 {
        let xa = (i0 + a) as f64;
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                let xb = (i0 + b) as f64;
                w *= (x - xb) / (xa - xb);
            }
        }
        acc += w * values[i0 + a];
    }
    acc
}

/// `g_theta` on `(0, 2]` in closed form. On `(1, 2]` the delay equation is a
/// linear first-order ODE whose forcing integral is an incomplete beta
/// function `B(x; theta, 0) = sum_k x^(theta+k) / (theta+k)`, `x = (t-1)/t`.
pub fn g_theta_initial(params: PdParams, t: f64) -> f64 {
    let theta = params.theta;
    let c = params.g_constant();
    if t <= 1.0 {
        return c * t.powf(theta - 1.0);
    }
    let x = (t - 1.0) / t;
    let mut sum = 0.0;
    let mut xk = 1.0;
    for k in 0..200 {
        let term = xk / (theta + k as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        xk *= x;
    }
    c * t.powf(theta - 1.0) * (1.0 - theta * x.powf(theta) * sum)
}

impl FunctionTable {
    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn step(&self) -> f64 {
        1.0 / self.steps_per_unit as f64
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    fn first_index(&self) -> usize {
        match self.kind {
            TableKind::DickmanRho => 0,
            TableKind::GTheta { .. } => 1,
        }
    }

    /// `(t, value)` grid pairs up to `t_max`.
    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.steps_per_unit as f64;
        let t_max = self.t_max;
        (self.first_index()..self.values.len())
            .map(move |i| (i as f64 / n, self.values[i]))
            .take_while(move |&(t, _)| t <= t_max + 1e-12)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::range(format!("argument {t} below table start")));
        }
        let n = self.steps_per_unit;
        let x = t * n as f64;
        let top = self.values.len() - 1;
        if x > top as f64 + 1e-9 {
            return Err(Error::range(format!("argument {t} beyond table end {}", self.t_max)));
        }
        match self.kind {
            TableKind::DickmanRho if t <= 1.0 => return Ok(1.0),
            TableKind::GTheta { theta } if t <= 2.0 => {
                if t == 0.0 {
                    return Err(Error::range("g_theta is defined on t > 0"));
                }
                return Ok(g_theta_initial(PdParams { theta }, t));
            }
            _ => {}
        }
        let nearest = x.round();
        if (x - nearest).abs() < 1e-9 {
            return Ok(self.values[nearest as usize]);
        }
        let unit = t.floor() as usize;
        let lo = unit * n;
        let hi = ((unit + 1) * n).min(top);
        Ok(interpolate(&self.values, x, lo, hi))
    }

    /// Two-column CSV `t,value`, twelve significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"])?;
        for (t, v) in self.grid() {
            w.write_record([format!("{t:.11e}"), format!("{v:.11e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Dickman's `rho` on `[0, t_max]`.
pub fn solve_dickman(t_max: f64, step: f64) -> Result<FunctionTable> {
    if !(t_max >= 1.0 && t_max.is_finite()) {
        return Err(Error::domain(format!("t_max must be at least 1, got {t_max}")));
    }
    let n = steps_per_unit(step)?;
    let m = last_index(t_max, n);
    let h = 1.0 / n as f64;
    let mut values = vec![1.0; m + 1];
    // rho(s - 1) for s in [1, t]; grid or half-grid points only
    let history = |values: &[f64], idx2: usize| -> f64 {
        // idx2 is twice the grid index of s - 1
        if idx2 <= 2 * n {
            return 1.0;
        }
        if idx2 % 2 == 0 {
            return values[idx2 / 2];
        }
        let x = idx2 as f64 / 2.0;
        let unit = idx2 / (2 * n);
        interpolate(values, x, unit * n, (unit + 1) * n)
    };
    for i in n..m {
        let t = i as f64 * h;
        let j2 = 2 * (i - n);
        // the right-hand side does not depend on rho(t), so RK4 reduces to Simpson
        let k1 = -history(&values, j2) / t;
        let k23 = -history(&values, j2 + 1) / (t + 0.5 * h);
        let k4 = -history(&values, j2 + 2) / (t + h);
        values[i + 1] = values[i] + h / 6.0 * (k1 + 4.0 * k23 + k4);
    }
    Ok(FunctionTable { kind: TableKind::DickmanRho, steps_per_unit: n, values, t_max })
}

/// `g_theta` on `(0, t_max]`.
pub fn solve_gtheta(params: PdParams, t_max: f64, step: f64) -> Result<FunctionTable> {
    if !(t_max >= 1.0 && t_max.is_finite()) {
        return Err(Error::domain(format!("t_max must be at least 1, got {t_max}")));
    }
    let n = steps_per_unit(step)?;
    let m = last_index(t_max, n);
    let h = 1.0 / n as f64;
    let theta = params.theta;
    let mut values = vec![0.0; m + 1];
    values[0] = match theta {
        t if t < 1.0 => f64::INFINITY,
        t if t == 1.0 => params.g_constant(),
        _ => 0.0,
    };
    let closed_end = (2 * n).min(m);
    for (i, v) in values.iter_mut().enumerate().take(closed_end + 1).skip(1) {
        *v = g_theta_initial(params, i as f64 * h);
    }
    // On [2, 3] the delayed term has a non-smooth start at t = 2 (for non-integer
    // theta), which costs RK4 its order. March the exact integral form
    // (t^(1-theta) g)' = -theta t^(-theta) g(t-1) at half steps instead, with
    // adaptive quadrature against the closed-form history.
    let quad = Quadrature::with_tol(1e-15);
    let linear_end = (3 * n).min(m);
    let mut mids = Vec::with_capacity(n);
    if m > 2 * n {
        let mut s = 2.0;
        let mut y = values[2 * n];
        for k in 0..2 * (linear_end - 2 * n) {
            let s_next = 2.0 + (k + 1) as f64 * 0.5 * h;
            let forcing = quad.integrate(|u: f64| u.powf(-theta) * g_theta_initial(params, u - 1.0), s, s_next);
            y = s_next.powf(theta - 1.0) * (s.powf(1.0 - theta) * y - theta * forcing);
            if k % 2 == 0 {
                mids.push(y);
            } else {
                values[2 * n + (k + 1) / 2] = y.max(0.0);
            }
            s = s_next;
        }
    }
    let history = |values: &[f64], idx2: usize| -> f64 {
        if idx2 <= 4 * n {
            return g_theta_initial(params, idx2 as f64 * 0.5 * h);
        }
        if idx2 % 2 == 0 {
            return values[idx2 / 2];
        }
        if idx2 < 6 * n {
            return mids[(idx2 - 4 * n - 1) / 2];
        }
        let x = idx2 as f64 / 2.0;
        let unit = idx2 / (2 * n);
        interpolate(values, x, unit * n, (unit + 1) * n)
    };
    let rhs = |t: f64, y: f64, delayed: f64| ((theta - 1.0) * y - theta * delayed) / t;
    for i in linear_end..m {
        let t = i as f64 * h;
        let j2 = 2 * (i - n);
        let d0 = history(&values, j2);
        let d1 = history(&values, j2 + 1);
        let d2 = history(&values, j2 + 2);
        let y = values[i];
        let k1 = rhs(t, y, d0);
        let k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1, d1);
        let k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2, d1);
        let k4 = rhs(t + h, y + h * k3, d2);
        values[i + 1] = (y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).max(0.0);
    }
    Ok(FunctionTable { kind: TableKind::GTheta { theta }, steps_per_unit: n, values, t_max })
}

/// Joint density of the leading `k = x.len()` PD(theta) parts, read from a
/// `g_theta` table (or a Dickman table when `theta = 1`). Zero off the support
/// `1 >= x_1 >= ... >= x_k > 0, sum <= 1`.
pub fn density_f_theta_k(params: PdParams, x: &[f64], table: &FunctionTable) -> Result<f64> {
    let theta = params.theta;
    match table.kind {
        TableKind::DickmanRho if theta != 1.0 => {
            return Err(Error::domain("a Dickman table only serves theta = 1"));
        }
        TableKind::GTheta { theta: t } if t != theta => {
            return Err(Error::domain(format!("table built for theta = {t}, requested {theta}")));
        }
        _ => {}
    }
    let k = x.len();
    if k == 0 {
        return Err(Error::domain("density needs at least one coordinate"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Ok(0.0);
    }
    if x[0] > 1.0 || x[k - 1] <= 0.0 || x.windows(2).any(|w| w[1] > w[0]) {
        return Ok(0.0);
    }
    let sum: f64 = x.iter().sum();
    if sum > 1.0 {
        return Ok(0.0);
    }
    let last = x[k - 1];
    let arg = ((1.0 - sum) / last).max(0.0);
    let product: f64 = x.iter().product();
    match table.kind {
        TableKind::DickmanRho => Ok(table.eval(arg)? / product),
        TableKind::GTheta { .. } => {
            if arg == 0.0 {
                // boundary of the simplex: g_theta(0+) limit
                return Ok(if theta > 1.0 { 0.0 } else if theta == 1.0 { theta.powi(k as i32) / product } else { f64::INFINITY });
            }
            let prefactor = (EULER_MASCHERONI * theta).exp() * theta.powi(k as i32) * gamma(theta);
            Ok(prefactor * last.powf(theta - 1.0) / product * table.eval(arg)?)
        }
    }
}

/// PD(theta) with its tabulated `g_theta` (or `rho`) and quadrature settings.
#[derive(Debug, Clone)]
pub struct PdDistribution {
    params: PdParams,
    table: FunctionTable,
    quad: Quadrature,
}

pub const DEFAULT_TABLE_STEP: f64 = 1e-3;

impl PdDistribution {
    /// Tables cover `[0, t_max]`; CDFs are available for arguments `>= 1/t_max`.
    pub fn new(params: PdParams, t_max: f64) -> Result<Self> {
        let table = if params.theta == 1.0 {
            solve_dickman(t_max, DEFAULT_TABLE_STEP)?
        } else {
            solve_gtheta(params, t_max, DEFAULT_TABLE_STEP)?
        };
        Ok(PdDistribution { params, table, quad: Quadrature::with_tol(1e-10) })
    }

    pub fn from_table(params: PdParams, table: FunctionTable) -> Result<Self> {
        let ok = match table.kind {
            TableKind::DickmanRho => params.theta == 1.0,
            TableKind::GTheta { theta } => theta == params.theta,
        };
        if !ok {
            return Err(Error::domain("table kind does not match theta"));
        }
        Ok(PdDistribution { params, table, quad: Quadrature::with_tol(1e-10) })
    }

    /// Absolute tolerance of the CDF quadratures (default `1e-10`).
    pub fn with_tolerance(mut self, abs_tol: f64) -> Self {
        self.quad = Quadrature::with_tol(abs_tol);
        self
    }

    pub fn params(&self) -> PdParams {
        self.params
    }

    pub fn table(&self) -> &FunctionTable {
        &self.table
    }

    pub fn density(&self, x: &[f64]) -> Result<f64> {
        density_f_theta_k(self.params, x, &self.table)
    }

    /// `Pr(X_1 <= t)`: `rho(1/t)` for theta = 1, otherwise one minus the
    /// integral of `f_{theta,1}` over `[t, 1]`.
    pub fn largest_part_cdf(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain(format!("largest part CDF needs t > 0, got {t}")));
        }
        if t >= 1.0 {
            return Ok(1.0);
        }
        if self.params.theta == 1.0 {
            return match self.table.kind {
                TableKind::DickmanRho => self.table.eval(1.0 / t),
                TableKind::GTheta { .. } => Ok(self.table.eval(1.0 / t)? * EULER_MASCHERONI.exp()),
            };
        }
        Ok((1.0 - self.largest_part_tail(t)?).clamp(0.0, 1.0))
    }

    /// `Pr(X_1 > t)` by quadrature of the one-dimensional density.
    fn largest_part_tail(&self, t: f64) -> Result<f64> {
        if (1.0 - t) / t > self.table.t_max() {
            return Err(Error::range(format!(
                "largest part CDF at {t} needs a table up to {}, have {}",
                (1.0 - t) / t,
                self.table.t_max()
            )));
        }
        let mut failure = None;
        let mut f = |x: f64| match self.density(&[x]) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let split = t.max(0.5);
        let mut total = 0.0;
        if t < 0.5 {
            let breaks: Vec<f64> = (2..)
                .map(|j| 1.0 / j as f64)
                .take_while(|&b| b > t)
                .collect();
            total += self.quad.integrate_pieces(&mut f, t, 0.5, &breaks);
        }
        total += self.face_integral(&mut f, split, 1.0);
        match failure {
            Some(e) => Err(e),
            None => Ok(total),
        }
    }

    /// `int_lo^face h(x) dx` for an integrand with a `(face - x)^(theta-1)`
    /// factor at the upper end, via `x = face - w^(1/theta)`.
    fn face_integral(&self, f: &mut dyn FnMut(f64) -> f64, lo: f64, face: f64) -> f64 {
        if !(face > lo) {
            return 0.0;
        }
        let theta = self.params.theta;
        let inv = 1.0 / theta;
        let w_max = (face - lo).powf(theta);
        self.quad.integrate(
            |w: f64| {
                if w <= 0.0 {
                    return 0.0;
                }
                let x = face - w.powf(inv);
                f(x) * inv * w.powf(inv - 1.0)
            },
            0.0,
            w_max,
        )
    }

    /// `Pr(X_j > z_j for j = 1..m)` for a non-increasing threshold vector with
    /// `m <= 3` and all thresholds positive.
    pub fn upper_orthant(&self, z: &[f64]) -> Result<f64> {
        let m = z.len();
        if m == 0 {
            return Ok(1.0);
        }
        if m > 3 {
            return Err(Error::domain("upper orthant probabilities are limited to three coordinates"));
        }
        if z.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::domain("thresholds must be positive"));
        }
        if z.iter().any(|&v| v >= 1.0) || z.iter().sum::<f64>() >= 1.0 {
            return Ok(0.0);
        }
        if m == 1 {
            return if self.params.theta == 1.0 {
                Ok(1.0 - self.largest_part_cdf(z[0])?)
            } else {
                self.largest_part_tail(z[0])
            };
        }
        let min_z = z.iter().copied().fold(f64::INFINITY, f64::min);
        if 1.0 / min_z > self.table.t_max() {
            return Err(Error::range(format!(
                "threshold {min_z} needs a table up to {}, have {}",
                1.0 / min_z,
                self.table.t_max()
            )));
        }
        let mut failure: Option<Error> = None;
        let mut x = vec![0.0; m];
        let value = self.orthant_level(z, 0, 0.0, 1.0, &mut x, &mut failure);
        match failure {
            Some(e) => Err(e),
            None => Ok(value.max(0.0)),
        }
    }

    fn orthant_level(
        &self,
        z: &[f64],
        level: usize,
        used: f64,
        previous: f64,
        x: &mut Vec<f64>,
        failure: &mut Option<Error>,
    ) -> f64 {
        let m = z.len();
        let face = 1.0 - used;
        // remaining coordinates each need more than their threshold
        let reserve: f64 = z[level + 1..].iter().sum();
        let hi = previous.min(face - reserve);
        let lo = z[level];
        if !(hi > lo) {
            return 0.0;
        }
        if level + 1 == m {
            let mut f = |v: f64| {
                x[level] = v;
                match self.density(x) {
                    Ok(d) => d,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            };
            // kinks of g where (face - v) / v crosses an integer
            let breaks: Vec<f64> = (1..).map(|j| face / (j + 1) as f64).take_while(|&b| b > lo).collect();
            if self.params.theta < 1.0 && hi >= face - 1e-15 {
                let split = (0.5 * face).max(lo);
                let head = self.quad.integrate_pieces(&mut f, lo, split, &breaks);
                return head + self.face_integral(&mut f, split, face);
            }
            return self.quad.integrate_pieces(&mut f, lo, hi, &breaks);
        }
        let inner = |v: f64, x: &mut Vec<f64>, failure: &mut Option<Error>| {
            x[level] = v;
            self.orthant_level(z, level + 1, used + v, v, x, failure)
        };
        let mut g = |v: f64| inner(v, x, failure);
        self.quad.integrate(&mut g, lo, hi)
    }

    /// `Pr(X_1 <= y_1, ..., X_k <= y_k)` for `k <= 3`, by inclusion–exclusion
    /// over upper orthants.
    pub fn joint_cdf(&self, y: &[f64]) -> Result<f64> {
        let k = y.len();
        if k == 0 || k > 3 {
            return Err(Error::domain("joint CDF needs between one and three coordinates"));
        }
        if y.iter().any(|&v| v <= 0.0) {
            return Ok(0.0);
        }
        if k == 1 {
            return self.largest_part_cdf(y[0]);
        }
        let mut total = 1.0;
        for mask in 1u32..(1 << k) {
            let top = 32 - mask.leading_zeros() as usize;
            let mut z = vec![0.0; top];
            let mut running: f64 = 0.0;
            for j in (0..top).rev() {
                if mask & (1 << j) != 0 {
                    running = running.max(y[j]);
                }
                z[j] = running;
            }
            let sign = if mask.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            total += sign * self.upper_orthant(&z)?;
        }
        Ok(total.clamp(0.0, 1.0))
    }
}

/// `Pr(X_1 <= t)` for PD(theta) using a freshly built table.
pub fn largest_part_cdf(params: PdParams, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("largest part CDF needs t > 0, got {t}")));
    }
    let t_max = (1.0 / t).ceil().max(2.0) + 1.0;
    PdDistribution::new(params, t_max)?.largest_part_cdf(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn params_reject_nonpositive() {
        assert!(PdParams::new(0.0).is_err());
        assert!(PdParams::new(-1.0).is_err());
        assert!(PdParams::new(f64::NAN).is_err());
    }

    #[test]
    fn dickman_known_values() {
        let rho = solve_dickman(5.0, 1e-3).unwrap();
        assert_eq!(rho.eval(0.0).unwrap(), 1.0);
        assert_eq!(rho.eval(1.0).unwrap(), 1.0);
        assert!((rho.eval(2.0).unwrap() - (1.0 - 2f64.ln())).abs() < 1e-12);
        // independent oracle: rho(t) = rho(2) - int_2^t (1 - ln(u-1))/u du on [2,3]
        let oracle = |t: f64| 1.0 - 2f64.ln() - simpson(|u| (1.0 - (u - 1.0).ln()) / u, 2.0, t, 2000);
        assert!((rho.eval(3.0).unwrap() - oracle(3.0)).abs() < 1e-10);
        assert!((rho.eval(2.5).unwrap() - oracle(2.5)).abs() < 1e-10);
        // mpmath reference values
        assert!((rho.eval(3.0).unwrap() - 0.048_608_388_291_131_57).abs() < 1e-10);
        assert!((rho.eval(2.5).unwrap() - 0.130_319_561_832_250_7).abs() < 1e-10);
    }

    #[test]
    fn dickman_satisfies_integral_equation_off_grid() {
        let rho = solve_dickman(6.0, 1e-3).unwrap();
        for &t in &[3.3, 4.71, 5.5] {
            let rhs = simpson(|u| rho.eval(u).unwrap(), t - 1.0, t, 4000);
            // pieces straddle integer kinks, so Simpson is only accurate to ~1e-8
            assert!((t * rho.eval(t).unwrap() - rhs).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn dickman_step_validation() {
        assert!(matches!(solve_dickman(3.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(solve_dickman(3.0, 0.01), Err(Error::Domain(_))));
        assert!(matches!(solve_dickman(3.0, 3e-4), Err(Error::Domain(_))));
        assert!(matches!(solve_dickman(0.5, 1e-3), Err(Error::Domain(_))));
        let rho = solve_dickman(2.5, 1e-3).unwrap();
        assert!(matches!(rho.eval(2.6), Err(Error::Range(_))));
        assert!(matches!(rho.eval(-0.1), Err(Error::Range(_))));
    }

    #[test]
    fn gtheta_reference_values() {
        let cases: [(f64, [(f64, f64); 3]); 2] = [
            (2.0, [(1.5, 0.404_639_368_410_440_2), (2.5, 0.300_060_822_285_349_2), (3.0, 0.198_535_143_801_939_3)]),
            (0.5, [(1.5, 0.117_884_342_088_230_7), (2.5, 0.009_094_685_701_539_354), (3.0, 0.002_004_232_941_656_323)]),
        ];
        for (theta, points) in cases {
            let g = solve_gtheta(PdParams::new(theta).unwrap(), 4.0, 1e-3).unwrap();
            for (t, expected) in points {
                let got = g.eval(t).unwrap();
                assert!((got - expected).abs() < 1e-9, "theta={theta} t={t}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn g1_is_scaled_rho() {
        let rho = solve_dickman(5.0, 1e-3).unwrap();
        let g = solve_gtheta(PdParams::new(1.0).unwrap(), 5.0, 1e-3).unwrap();
        let c = (-EULER_MASCHERONI).exp();
        assert!((g.eval(0.5).unwrap() - 0.561_459_483_566_885_2).abs() < 1e-10);
        for (t, v) in g.grid() {
            assert!((v - c * rho.eval(t).unwrap()).abs() < 1e-8, "t = {t}");
        }
        for &t in &[2.5, 3.1415, 4.999] {
            assert!((g.eval(t).unwrap() - c * rho.eval(t).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn gtheta_satisfies_integral_equation() {
        for &theta in &[0.7, 2.0, 3.5] {
            let params = PdParams::new(theta).unwrap();
            let g = solve_gtheta(params, 6.0, 1e-3).unwrap();
            for &t in &[3.25, 4.5, 5.75] {
                let rhs = theta * simpson(|u| g.eval(u).unwrap(), t - 1.0, t, 4000);
                assert!((t * g.eval(t).unwrap() - rhs).abs() < 1e-7, "theta={theta} t={t}");
            }
        }
    }

    #[test]
    fn density_examples() {
        let params = PdParams::new(1.0).unwrap();
        let rho = solve_dickman(5.0, 1e-3).unwrap();
        let v = density_f_theta_k(params, &[0.7], &rho).unwrap();
        assert!((v - 1.0 / 0.7).abs() < 1e-12);
        assert_eq!(density_f_theta_k(params, &[0.6, 0.5], &rho).unwrap(), 0.0);
        assert_eq!(density_f_theta_k(params, &[0.3, 0.4], &rho).unwrap(), 0.0);
        let p2 = PdParams::new(2.0).unwrap();
        assert!(density_f_theta_k(p2, &[0.5], &rho).is_err());
        // theta=2 on x > 1/2: theta (1-x)^(theta-1) / x
        let g2 = solve_gtheta(p2, 5.0, 1e-3).unwrap();
        let v = density_f_theta_k(p2, &[0.8], &g2).unwrap();
        assert!((v - 2.0 * 0.2 / 0.8).abs() < 1e-10);
        assert!(matches!(density_f_theta_k(p2, &[0.1], &solve_gtheta(p2, 3.0, 1e-3).unwrap()), Err(Error::Range(_))));
    }

    #[test]
    fn densities_normalize() {
        for &theta in &[1.0, 2.0, 0.6] {
            let pd = PdDistribution::new(PdParams::new(theta).unwrap(), 40.0).unwrap();
            let tail = pd.largest_part_tail(1.0 / 40.0).unwrap();
            assert!((tail - 1.0).abs() < 1e-6, "theta={theta}: {tail}");
        }
    }

    #[test]
    fn largest_part_cdf_examples() {
        let p1 = PdParams::new(1.0).unwrap();
        assert_eq!(largest_part_cdf(p1, 1.0).unwrap(), 1.0);
        assert!((largest_part_cdf(p1, 0.5).unwrap() - (1.0 - 2f64.ln())).abs() < 1e-10);
        assert!((largest_part_cdf(p1, 0.6).unwrap() - (1.0 + 0.6f64.ln())).abs() < 1e-10);
        assert!(matches!(largest_part_cdf(p1, 0.0), Err(Error::Domain(_))));
        // quadrature route at theta = 1 through a g table agrees with rho(1/t)
        let g1 = solve_gtheta(p1, 30.0, 1e-3).unwrap();
        let pd = PdDistribution::from_table(p1, g1).unwrap();
        assert!((1.0 - pd.largest_part_tail(0.6).unwrap() - (1.0 + 0.6f64.ln())).abs() < 1e-6);
        assert!((1.0 - pd.largest_part_tail(0.3).unwrap() - pd.largest_part_cdf(0.3).unwrap()).abs() < 1e-6);

        let pd2 = PdDistribution::new(PdParams::new(2.0).unwrap(), 40.0).unwrap();
        let mut last = 0.0;
        for i in 5..=100 {
            let t = i as f64 / 100.0;
            let v = pd2.largest_part_cdf(t).unwrap();
            assert!(v >= last - 1e-12 && (0.0..=1.0).contains(&v));
            last = v;
        }
        assert_eq!(last, 1.0);
        // theta=2, t >= 1/2: 1 - 2 int_t^1 (1-x)/x dx = 1 + 2 ln t + 2 (1 - t)
        let t: f64 = 0.7;
        assert!((pd2.largest_part_cdf(t).unwrap() - (1.0 + 2.0 * t.ln() + 2.0 * (1.0 - t))).abs() < 1e-9);
    }

    #[test]
    fn joint_cdf_properties() {
        let pd = PdDistribution::new(PdParams::new(1.0).unwrap(), 12.0).unwrap();
        // y2 >= y1 reduces to the marginal of X1
        let a = pd.joint_cdf(&[0.5, 0.7]).unwrap();
        assert!((a - pd.largest_part_cdf(0.5).unwrap()).abs() < 1e-12);
        // f_{1,2} oracle: Pr(X1 > 0.4, X2 > 0.25) by brute Simpson over the triangle
        let rho = solve_dickman(12.0, 1e-3).unwrap();
        let inner = |x1: f64| {
            let hi = x1.min(1.0 - x1);
            if hi <= 0.25 {
                return 0.0;
            }
            simpson(|x2| rho.eval((1.0 - x1 - x2) / x2).unwrap() / (x1 * x2), 0.25, hi, 400)
        };
        let oracle = simpson(inner, 0.4, 0.75, 400);
        let got = pd.upper_orthant(&[0.4, 0.25]).unwrap();
        assert!((got - oracle).abs() < 1e-5, "{got} vs {oracle}");
        let mut prev = 0.0;
        for i in 1..=5 {
            let y = 0.1 * i as f64 + 0.05;
            let v = pd.joint_cdf(&[0.6, y]).unwrap();
            assert!(v >= prev - 1e-9 && v <= 1.0);
            prev = v;
        }
    }

    #[test]
    fn stick_sample_sums_to_one() {
        for &theta in &[0.3, 1.0, 2.5] {
            let params = PdParams::new(theta).unwrap();
            for seed in 0..50 {
                let s = sample_pd(params, 5, seed).unwrap();
                let total: f64 = s.parts.iter().sum::<f64>() + s.residual;
                assert!((total - 1.0).abs() < 1e-12);
                assert!(s.parts.windows(2).all(|w| w[0] >= w[1]));
                assert!(s.parts[4] > 0.0);
            }
        }
        assert_eq!(sample_pd(PdParams::new(1.0).unwrap(), 3, 9).unwrap(), sample_pd(PdParams::new(1.0).unwrap(), 3, 9).unwrap());
        assert!(sample_pd(PdParams::new(1.0).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn stick_points_above_threshold() {
        let sb = StickBreaking::new(PdParams::new(2.0).unwrap());
        let mut rng = stream_rng(7, 0);
        let pts = sb.points_above(0.05, &mut rng);
        assert!(pts.iter().all(|&p| p > 0.05));
        assert!(pts.iter().sum::<f64>() <= 1.0 + 1e-12);
    }

    #[test]
    fn csv_export_twelve_digits() {
        let rho = solve_dickman(2.0, 1e-3).unwrap();
        let mut buf = Vec::new();
        rho.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,value"));
        assert_eq!(lines.next(), Some("0.00000000000e0,1.00000000000e0"));
        let last = text.lines().last().unwrap();
        assert_eq!(last, "2.00000000000e0,3.06852819440e-1");
    }
}
