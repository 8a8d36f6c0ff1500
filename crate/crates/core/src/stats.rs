//! Distributional comparisons between sampled scaled-size sequences and
//! PD(theta): Kolmogorov–Smirnov distances on the largest part, joint CDF
//! deviations for up to three leading parts, and chi-squared tests of sampled
//! count profiles against exact profile probabilities.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::moments::ProfileDistribution;
use crate::numeric::{rational_to_f64, CompensatedSum};
use crate::pd::{PdDistribution, PdParams, DEFAULT_TABLE_STEP};
use crate::quad::Quadrature;
use crate::samplers::{CountVector, ScaledSizeSeq};

/// Fewest samples accepted by the KS and joint CDF checks.
pub const MIN_KS_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub sample_size: usize,
    pub reference: String,
}

/// A distribution function with left limits.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    /// `lim_{y -> x-} F(y)`; equal to `cdf` for continuous distributions.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

/// Empirical distribution function of a sample.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("empirical CDF needs a non-empty sample without NaN"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }
}

impl Cdf for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.sorted.len() as f64
    }
}

/// `sup_x |F_n(x) - F(x)|` for any non-decreasing `F` from 0 to 1. Ties and
/// atoms of `F` are handled through left limits at the sample points.
pub fn ks_distance(sample: &EmpiricalCdf, reference: &impl Cdf) -> f64 {
    let xs = sample.sorted();
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == v {
            j += 1;
        }
        let below = i as f64 / n;
        let at = j as f64 / n;
        d = d.max((at - reference.cdf(v)).abs()).max((below - reference.cdf_left(v)).abs());
        i = j;
    }
    d
}

/// `Pr(X_1 <= t)` for PD(theta), tabulated on a uniform grid over
/// `[floor, 1]` and linearly interpolated. Below `floor` the CDF is reported
/// as 0; the neglected mass is `floor_mass`.
#[derive(Debug, Clone)]
pub struct LargestPartCdf {
    dist: PdDistribution,
    floor: f64,
    floor_mass: f64,
    step: f64,
    /// Tail masses `Pr(X_1 > floor + i step)`; empty when theta = 1.
    tail: Vec<f64>,
}

/// Grid spacing of the tabulated largest-part CDF.
pub const LARGEST_PART_GRID: f64 = 1e-4;
const FLOOR_MASS_TARGET: f64 = 1e-9;

impl LargestPartCdf {
    pub fn new(params: PdParams) -> Result<Self> {
        let mut t_max: f64 = 20.0;
        let (dist, floor, floor_mass) = loop {
            let dist = PdDistribution::new(params, t_max)?;
            let floor = 1.0 / t_max;
            let mass = dist.largest_part_cdf(floor)?;
            if mass < FLOOR_MASS_TARGET || t_max >= 640.0 {
                break (dist, floor, mass);
            }
            t_max *= 2.0;
        };
        let mut out = LargestPartCdf { dist, floor, floor_mass, step: LARGEST_PART_GRID, tail: Vec::new() };
        if params.theta() != 1.0 {
            out.tabulate()?;
        }
        Ok(out)
    }

    fn tabulate(&mut self) -> Result<()> {
        let cells = ((1.0 - self.floor) / self.step).ceil() as usize;
        let point = |i: usize| (self.floor + i as f64 * self.step).min(1.0);
        let mut tail = vec![0.0; cells + 1];
        // the top cell carries the (1 - x)^(theta - 1) endpoint behaviour
        tail[cells - 1] = 1.0 - self.dist.largest_part_cdf(point(cells - 1))?;
        let quad = Quadrature::with_tol(1e-13);
        let mut failure = None;
        let mut f = |x: f64| match self.dist.density(&[x]) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let mut acc = CompensatedSum::default();
        acc.add(tail[cells - 1]);
        for i in (0..cells - 1).rev() {
            let (lo, hi) = (point(i), point(i + 1));
            // kinks of g_theta((1 - x) / x) at x = 1/j
            let breaks: Vec<f64> = (2..=((1.0 / lo).floor() as usize + 1))
                .map(|j| 1.0 / j as f64)
                .filter(|&b| b > lo && b < hi)
                .collect();
            acc.add(quad.integrate_pieces(&mut f, lo, hi, &breaks));
            tail[i] = acc.value();
        }
        if let Some(e) = failure {
            return Err(e);
        }
        self.tail = tail;
        Ok(())
    }

    pub fn params(&self) -> PdParams {
        self.dist.params()
    }

    pub fn distribution(&self) -> &PdDistribution {
        &self.dist
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn floor_mass(&self) -> f64 {
        self.floor_mass
    }

    pub fn describe(&self) -> String {
        let theta = self.params().theta();
        if theta == 1.0 {
            format!("PD(1) largest part: rho(1/t), Dickman table step {DEFAULT_TABLE_STEP}")
        } else {
            format!(
                "PD({theta}) largest part: 1 - int_t^1 f_theta,1, grid step {}, mass below {:.4} is {:.1e}",
                self.step, self.floor, self.floor_mass
            )
        }
    }
}

impl Cdf for LargestPartCdf {
    fn cdf(&self, t: f64) -> f64 {
        if t >= 1.0 {
            return 1.0;
        }
        if t < self.floor {
            return 0.0;
        }
        if self.tail.is_empty() {
            return self.dist.largest_part_cdf(t).expect("table covers [floor, 1]");
        }
        let cells = self.tail.len() - 1;
        let pos = (t - self.floor) / self.step;
        let i = (pos.floor() as usize).min(cells - 1);
        if i == cells - 1 {
            return self.dist.largest_part_cdf(t).expect("table covers [floor, 1]");
        }
        let w = pos - i as f64;
        (1.0 - ((1.0 - w) * self.tail[i] + w * self.tail[i + 1])).clamp(0.0, 1.0)
    }
}

fn largest_parts(samples: &[ScaledSizeSeq]) -> Vec<f64> {
    samples.iter().map(|s| s.get(1)).collect()
}

/// KS distance between the empirical law of `L_1` and a PD largest-part CDF.
pub fn ks_against(samples: &[ScaledSizeSeq], reference: &LargestPartCdf) -> Result<KsResult> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::domain(format!(
            "KS comparison needs at least {MIN_KS_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let empirical = EmpiricalCdf::new(&largest_parts(samples))?;
    Ok(KsResult {
        statistic: ks_distance(&empirical, reference),
        sample_size: samples.len(),
        reference: reference.describe(),
    })
}

/// KS distance between sampled `L_1` values and PD(theta)'s largest part.
pub fn ks_largest_part(samples: &[ScaledSizeSeq], params: PdParams) -> Result<KsResult> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::domain(format!(
            "KS comparison needs at least {MIN_KS_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    ks_against(samples, &LargestPartCdf::new(params)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfPoint {
    pub t: f64,
    pub empirical_cdf: f64,
    pub theoretical_cdf: f64,
}

/// Empirical and reference CDFs of `L_1` on a grid, for plotting.
pub fn cdf_curve(samples: &[ScaledSizeSeq], reference: &LargestPartCdf, grid: &[f64]) -> Result<Vec<CdfPoint>> {
    let empirical = EmpiricalCdf::new(&largest_parts(samples))?;
    Ok(grid
        .iter()
        .map(|&t| CdfPoint { t, empirical_cdf: empirical.cdf(t), theoretical_cdf: reference.cdf(t) })
        .collect())
}

pub fn write_cdf_csv<W: Write>(out: W, points: &[CdfPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "empirical_cdf", "theoretical_cdf"])?;
    for p in points {
        w.write_record([format!("{:.6}", p.t), format!("{:.11e}", p.empirical_cdf), format!("{:.11e}", p.theoretical_cdf)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointCdfPoint {
    pub y: Vec<f64>,
    pub empirical: f64,
    pub theoretical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointCdfReport {
    pub k: usize,
    pub sample_size: usize,
    pub points: Vec<JointCdfPoint>,
    pub max_deviation: f64,
}

/// Tolerance of the joint CDF quadratures.
pub const JOINT_CDF_TOL: f64 = 1e-7;

/// Largest `|empirical - theoretical|` joint CDF of `(L_1, ..., L_k)` over
/// every point of `grid^k`.
pub fn joint_cdf_check(samples: &[ScaledSizeSeq], reference: &LargestPartCdf, k: usize, grid: &[f64]) -> Result<JointCdfReport> {
    if k == 0 || k > 3 {
        return Err(Error::domain(format!("joint CDF checks support k = 1, 2, 3; got {k}")));
    }
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::domain(format!(
            "joint CDF check needs at least {MIN_KS_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if grid.is_empty() || grid.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
        return Err(Error::domain("grid values must lie in (0, 1]"));
    }
    if grid.iter().any(|&v| v < reference.floor()) {
        return Err(Error::domain(format!("grid values must be at least {}", reference.floor())));
    }
    let dist = reference.distribution().clone().with_tolerance(JOINT_CDF_TOL);
    let mut points = Vec::new();
    let mut index = vec![0usize; k];
    'outer: loop {
        let y: Vec<f64> = index.iter().map(|&i| grid[i]).collect();
        let empirical = samples
            .iter()
            .filter(|s| y.iter().enumerate().all(|(j, &yj)| s.get(j + 1) <= yj))
            .count() as f64
            / samples.len() as f64;
        let theoretical = if k == 1 { reference.cdf(y[0]) } else { dist.joint_cdf(&y)? };
        points.push(JointCdfPoint { y, empirical, theoretical });
        for pos in (0..k).rev() {
            index[pos] += 1;
            if index[pos] < grid.len() {
                continue 'outer;
            }
            index[pos] = 0;
        }
        break;
    }
    let max_deviation = points.iter().map(|p| (p.empirical - p.theoretical).abs()).fold(0.0, f64::max);
    Ok(JointCdfReport { k, sample_size: samples.len(), points, max_deviation })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Cells after pooling.
    pub cells: usize,
    pub sample_size: usize,
}

/// Smallest expected count kept as its own cell.
pub const MIN_EXPECTED: f64 = 5.0;

/// Pearson chi-squared test of observed profiles against exact profile
/// probabilities. Cells with expected count below 5 are pooled.
pub fn chi_square_profiles(observed: &[CountVector], exact: &ProfileDistribution) -> Result<ChiSquareResult> {
    if observed.is_empty() {
        return Err(Error::domain("chi-squared test needs at least one observation"));
    }
    let index: HashMap<&[u32], usize> = exact.profiles.iter().enumerate().map(|(i, (c, _))| (c.as_slice(), i)).collect();
    let mut counts = vec![0u64; exact.profiles.len()];
    for cv in observed {
        if cv.n() != exact.n {
            return Err(Error::domain(format!("observation of size {} against a size {} distribution", cv.n(), exact.n)));
        }
        let i = index
            .get(cv.counts())
            .ok_or_else(|| Error::domain(format!("observed profile {:?} has probability zero", cv.counts())))?;
        counts[*i] += 1;
    }
    let total = observed.len() as f64;
    let mut cells: Vec<(f64, f64)> = exact
        .profiles
        .iter()
        .zip(&counts)
        .map(|((_, w), &o)| (total * rational_to_f64(&(w / &exact.total)), o as f64))
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut pending = (0.0, 0.0);
    for (e, o) in cells {
        if e < MIN_EXPECTED || pending.0 > 0.0 && pending.0 < MIN_EXPECTED {
            pending = (pending.0 + e, pending.1 + o);
            if pending.0 >= MIN_EXPECTED {
                pooled.push(pending);
                pending = (0.0, 0.0);
            }
        } else {
            pooled.push((e, o));
        }
    }
    if pending.0 > 0.0 {
        match pooled.first_mut() {
            Some(first) => {
                first.0 += pending.0;
                first.1 += pending.1;
            }
            None => pooled.push(pending),
        }
    }
    let statistic: f64 = pooled.iter().map(|(e, o)| (o - e) * (o - e) / e).sum();
    let dof = pooled.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let chi = ChiSquared::new(dof as f64).map_err(|e| Error::domain(e.to_string()))?;
        chi.sf(statistic)
    };
    Ok(ChiSquareResult { statistic, degrees_of_freedom: dof, p_value, cells: pooled.len(), sample_size: observed.len() })
}

/// Sample mean of `C_{i_1} ... C_{i_k}` and its standard error.
pub fn sample_moment(observed: &[CountVector], indices: &[usize]) -> (f64, f64) {
    let values: Vec<f64> = observed
        .iter()
        .map(|cv| indices.iter().map(|&i| cv.count(i) as f64).product())
        .collect();
    mean_and_std_error(&values)
}

/// Mean and standard error `s / sqrt(N)`.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().copied().collect::<CompensatedSum>().value() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).collect::<CompensatedSum>().value() / (n - 1.0);
    (mean, (var / n).sqrt())
}
