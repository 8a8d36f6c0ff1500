//! Multi-intensities `E prod_j |A_n ∩ I_j|` of scaled-size configurations:
//! exact sums of mixed moments, Monte Carlo estimates, and the comparison
//! values
//!
//! ```text
//! rhs_theta  = theta^k / ((1 - sum a)^alpha (1 - sum b)^beta) prod log(b_j / a_j)
//! rhs_master = sum over index boxes of theta^k / (1 - s/n)^(1-theta) / (i_1 ... i_k)
//! ```
//!
//! An index `i` belongs to `I_j = [a_j, b_j]` at size `n` when `a_j n < i <= b_j n`,
//! decided in exact rational arithmetic.

use std::io::Write;

use num_bigint::BigUint;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_guard, Error, Result};
use crate::families::{Construction, FamilySpec};
use crate::moments::{master_rhs, MomentEngine};
use crate::numeric::{parse_rational, rational_string, rational_to_f64, stream_rng, CompensatedSum};
use crate::pd::StickBreaking;
use crate::quad::Quadrature;
use crate::samplers::{CountVector, PrimeFactorSampler, StructureSampler};

/// Disjoint intervals `I_j = [a_j, b_j]` in `(0, 1]` with `sum b_j < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalFamily {
    intervals: Vec<(Rational64, Rational64)>,
}

fn to_small(x: &BigRational) -> Result<Rational64> {
    match (x.numer().to_i64(), x.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Rational64::new(n, d)),
        _ => Err(Error::domain(format!("interval endpoint {} has too many digits", rational_string(x)))),
    }
}

impl IntervalFamily {
    pub fn new(intervals: Vec<(Rational64, Rational64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::domain("at least one interval is required"));
        }
        let zero = Rational64::zero();
        let one = Rational64::from_integer(1);
        for &(a, b) in &intervals {
            if a <= zero || b > one || a > b {
                return Err(Error::domain(format!("interval [{a}, {b}] must satisfy 0 < a <= b <= 1")));
            }
        }
        let mut sorted = intervals.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[1].0 <= w[0].1) {
            return Err(Error::domain("intervals must be pairwise disjoint"));
        }
        let total_b: Rational64 = intervals.iter().map(|&(_, b)| b).sum();
        if total_b >= one {
            return Err(Error::domain(format!("sum of right endpoints is {total_b}, must be below 1")));
        }
        Ok(IntervalFamily { intervals })
    }

    /// Parses `"0.1:0.2,0.3:0.4"` (decimals or `p/q`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("interval {part:?} should look like a:b")))?;
            out.push((to_small(&parse_rational(a)?)?, to_small(&parse_rational(b)?)?));
        }
        Self::new(out)
    }

    pub fn k(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(Rational64, Rational64)] {
        &self.intervals
    }

    pub fn bounds_f64(&self) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .map(|&(a, b)| (*a.numer() as f64 / *a.denom() as f64, *b.numer() as f64 / *b.denom() as f64))
            .collect()
    }

    /// Integer sizes `i` with `a n < i <= b n`.
    pub fn index_range(&self, j: usize, n: usize) -> std::ops::RangeInclusive<usize> {
        let (a, b) = self.intervals[j];
        let n = n as i128;
        let lo = (*a.numer() as i128 * n).div_euclid(*a.denom() as i128) + 1;
        let hi = (*b.numer() as i128 * n).div_euclid(*b.denom() as i128);
        (lo as usize)..=(hi.max(lo - 1) as usize)
    }

    /// `prod_j log(b_j / a_j)`.
    pub fn log_product(&self) -> f64 {
        self.bounds_f64().iter().map(|(a, b)| (b / a).ln()).product()
    }

    /// The comparison value with exponents `alpha` on `1 - sum a` and `beta` on `1 - sum b`.
    pub fn rhs_theta(&self, theta: f64, alpha: f64, beta: f64) -> f64 {
        let bounds = self.bounds_f64();
        let sa: f64 = bounds.iter().map(|p| p.0).sum();
        let sb: f64 = bounds.iter().map(|p| p.1).sum();
        theta.powi(self.k() as i32) / ((1.0 - sa).powf(alpha) * (1.0 - sb).powf(beta)) * self.log_product()
    }

    /// Both exponent assignments: `(1 - theta, 0)` and `(0, 1 - theta)`.
    pub fn rhs_theta_pair(&self, theta: f64) -> [RhsTheta; 2] {
        [(1.0 - theta, 0.0), (0.0, 1.0 - theta)].map(|(alpha, beta)| RhsTheta {
            alpha,
            beta,
            value: self.rhs_theta(theta, alpha, beta),
        })
    }

    pub fn describe(&self) -> String {
        self.intervals.iter().map(|(a, b)| format!("({a},{b}]")).collect::<Vec<_>>().join(" ")
    }

    fn box_size(&self, n: usize) -> u128 {
        (0..self.k()).map(|j| self.index_range(j, n).count() as u128).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhsTheta {
    pub alpha: f64,
    pub beta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntensityReport {
    pub source: String,
    pub n: Option<u64>,
    pub k: usize,
    pub intervals: String,
    pub theta: f64,
    pub empirical: f64,
    /// Monte Carlo standard error; absent for exact evaluations.
    pub std_error: Option<f64>,
    pub replicates: Option<usize>,
    pub rhs_theta: [RhsTheta; 2],
    pub rhs_master: f64,
    pub exact: Option<String>,
}

impl IntensityReport {
    pub fn rhs_theta_lo(&self) -> f64 {
        self.rhs_theta[0].value.min(self.rhs_theta[1].value)
    }

    pub fn rhs_theta_hi(&self) -> f64 {
        self.rhs_theta[0].value.max(self.rhs_theta[1].value)
    }
}

/// Index boxes above this many tuples are refused by the exact paths.
pub const INTENSITY_TUPLE_LIMIT: u128 = 4_000_000;

/// Discrete master sum over all index tuples in the boxes at size `n`.
pub fn master_sum(theta: f64, n: usize, intervals: &IntervalFamily) -> Result<f64> {
    check_guard(format!("summing the master expression over the boxes at n = {n}"), intervals.box_size(n), INTENSITY_TUPLE_LIMIT)?;
    let mut total = CompensatedSum::default();
    for_each_tuple(intervals, n, |tuple| {
        total.add(master_rhs(theta, n, tuple).expect("tuples from disjoint boxes are valid"));
    });
    Ok(total.value())
}

fn for_each_tuple(intervals: &IntervalFamily, n: usize, mut visit: impl FnMut(&[usize])) {
    let ranges: Vec<_> = (0..intervals.k()).map(|j| intervals.index_range(j, n)).collect();
    if ranges.iter().any(|r| r.is_empty()) {
        return;
    }
    let mut tuple: Vec<usize> = ranges.iter().map(|r| *r.start()).collect();
    loop {
        visit(&tuple);
        let mut pos = 0;
        loop {
            if pos == tuple.len() {
                return;
            }
            if tuple[pos] < *ranges[pos].end() {
                tuple[pos] += 1;
                break;
            }
            tuple[pos] = *ranges[pos].start();
            pos += 1;
        }
    }
}

/// Exact `E prod_j sum_{i in I_j} C_i` as a sum of mixed moments.
pub fn exact_intensity(family: &FamilySpec, n: usize, intervals: &IntervalFamily) -> Result<BigRational> {
    check_guard(
        format!("exact intensity over the index boxes at n = {n}; use the Monte Carlo path"),
        intervals.box_size(n),
        INTENSITY_TUPLE_LIMIT,
    )?;
    let engine = MomentEngine::new(family, n)?;
    let index_sum_bound: usize = (0..intervals.k()).map(|j| *intervals.index_range(j, n).end()).sum();
    if family.kind() == Construction::Assembly && index_sum_bound <= n {
        // moment = (c_{n-s}/c_n) prod w_i: convolve the per-interval weights by index sum
        let mut by_sum: Vec<BigRational> = vec![BigRational::zero(); n + 1];
        by_sum[0] = BigRational::from_integer(1.into());
        for j in 0..intervals.k() {
            let mut next = vec![BigRational::zero(); n + 1];
            for (s, acc) in by_sum.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                for i in intervals.index_range(j, n) {
                    if s + i <= n {
                        next[s + i] += acc * engine.assembly_weight(i);
                    }
                }
            }
            by_sum = next;
        }
        let mut total = BigRational::zero();
        for (s, weight) in by_sum.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            total += weight * engine.assembly_ratio(s);
        }
        return Ok(total);
    }
    let mut total = BigRational::zero();
    let mut failure = None;
    for_each_tuple(intervals, n, |tuple| match engine.moment(tuple) {
        Ok(v) => total += v,
        Err(e) => {
            failure.get_or_insert(e);
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Where Monte Carlo replicates come from.
#[derive(Debug, Clone, Copy)]
pub enum IntensitySource<'a> {
    /// Tilted structures; `theta` is the limiting PD parameter.
    Structures { sampler: &'a StructureSampler, theta: f64 },
    /// Prime factors of uniform integers (PD(1) limit).
    PrimeFactors(&'a PrimeFactorSampler),
    /// PD(theta) stick-breaking directly.
    PoissonDirichlet(StickBreaking),
}

impl IntensitySource<'_> {
    fn theta(&self) -> f64 {
        match self {
            IntensitySource::Structures { theta, .. } => *theta,
            IntensitySource::PrimeFactors(_) => 1.0,
            IntensitySource::PoissonDirichlet(sb) => sb.params().theta(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            IntensitySource::Structures { .. } => "structures",
            IntensitySource::PrimeFactors(_) => "prime-factors",
            IntensitySource::PoissonDirichlet(_) => "poisson-dirichlet",
        }
    }

    fn n(&self) -> Option<u64> {
        match self {
            IntensitySource::Structures { sampler, .. } => Some(sampler.n() as u64),
            IntensitySource::PrimeFactors(s) => Some(s.n()),
            IntensitySource::PoissonDirichlet(_) => None,
        }
    }
}

/// `prod_j |A ∩ I_j|` for one structure.
pub fn structure_interval_product(cv: &CountVector, intervals: &IntervalFamily) -> u64 {
    (0..intervals.k())
        .map(|j| intervals.index_range(j, cv.n()).map(|i| cv.count(i) as u64).sum::<u64>())
        .product()
}

/// Integer bounds `(floor(n^a), floor(n^b))`: a prime `p` has `a < log p / log n <= b`
/// exactly when `floor(n^a) < p <= floor(n^b)`.
pub fn prime_bounds(n: u64, intervals: &IntervalFamily) -> Vec<(u64, u64)> {
    let floor_power = |x: Rational64| -> u64 {
        let (r, s) = (*x.numer() as u32, *x.denom() as u32);
        let value = num_traits::pow(BigUint::from(n), r as usize).nth_root(s);
        value.to_u64().unwrap_or(u64::MAX)
    };
    intervals.intervals().iter().map(|&(a, b)| (floor_power(a), floor_power(b))).collect()
}

/// `(sum, sum of squares)` of per-replicate values, reduced in replicate order.
fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().copied().collect::<CompensatedSum>().value() / r;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).collect::<CompensatedSum>().value() / (r - 1.0);
    (mean, (var / r).sqrt())
}

/// Continuous analogue of the master sum for PD(theta):
/// `int_box theta^k (1 - sum x)^(theta-1) / prod x_j dx` (`k <= 3`).
pub fn pd_intensity(theta: f64, intervals: &IntervalFamily) -> Result<f64> {
    let k = intervals.k();
    if k > 3 {
        return Err(Error::domain("PD intensities are integrated for at most three intervals"));
    }
    let bounds = intervals.bounds_f64();
    let quad = Quadrature::with_tol(1e-11);
    fn level(quad: &Quadrature, bounds: &[(f64, f64)], used: f64, theta: f64) -> f64 {
        let (a, b) = bounds[0];
        if bounds.len() == 1 {
            return quad.integrate(|x: f64| (1.0 - used - x).powf(theta - 1.0) / x, a, b);
        }
        quad.integrate(|x: f64| level(quad, &bounds[1..], used + x, theta) / x, a, b)
    }
    Ok(theta.powi(k as i32) * level(&quad, &bounds, 0.0, theta))
}

/// Monte Carlo estimate of the multi-intensity with the comparison values.
pub fn mc_intensity(source: IntensitySource<'_>, intervals: &IntervalFamily, replicates: usize, seed: u64) -> Result<IntensityReport> {
    if replicates < 1000 {
        return Err(Error::domain(format!("at least 1000 replicates are required, got {replicates}")));
    }
    let theta = source.theta();
    let values: Vec<f64> = match source {
        IntensitySource::Structures { sampler, .. } => (0..replicates as u64)
            .into_par_iter()
            .map(|r| structure_interval_product(&sampler.sample(&mut stream_rng(seed, r)), intervals) as f64)
            .collect(),
        IntensitySource::PrimeFactors(sampler) => {
            let bounds = prime_bounds(sampler.n(), intervals);
            (0..replicates as u64)
                .into_par_iter()
                .map(|r| {
                    let x = sampler.draw(&mut stream_rng(seed, r));
                    let factors = sampler.factor(x);
                    bounds
                        .iter()
                        .map(|&(lo, hi)| factors.iter().filter(|&&p| p > lo && p <= hi).count() as f64)
                        .product()
                })
                .collect()
        }
        IntensitySource::PoissonDirichlet(sb) => {
            let bounds = intervals.bounds_f64();
            let threshold = bounds.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            (0..replicates as u64)
                .into_par_iter()
                .map(|r| {
                    let points = sb.points_above(threshold, &mut stream_rng(seed, r));
                    bounds
                        .iter()
                        .map(|&(a, b)| points.iter().filter(|&&x| x > a && x <= b).count() as f64)
                        .product()
                })
                .collect()
        }
    };
    let (empirical, std_error) = mean_and_error(&values);
    let rhs_master = match source.n() {
        Some(n) if !matches!(source, IntensitySource::PrimeFactors(_)) => master_sum(theta, n as usize, intervals)?,
        _ => pd_intensity(theta, intervals)?,
    };
    Ok(IntensityReport {
        source: source.name().into(),
        n: source.n(),
        k: intervals.k(),
        intervals: intervals.describe(),
        theta,
        empirical,
        std_error: Some(std_error),
        replicates: Some(replicates),
        rhs_theta: intervals.rhs_theta_pair(theta),
        rhs_master,
        exact: None,
    })
}

/// Exact intensity packaged as a report.
pub fn exact_report(family: &FamilySpec, n: usize, intervals: &IntervalFamily) -> Result<IntensityReport> {
    let theta = family
        .pd_theta()
        .ok_or_else(|| Error::domain(format!("{} carries no singular data", family.full_name())))?;
    let exact = exact_intensity(family, n, intervals)?;
    Ok(IntensityReport {
        source: family.full_name(),
        n: Some(n as u64),
        k: intervals.k(),
        intervals: intervals.describe(),
        theta,
        empirical: rational_to_f64(&exact),
        std_error: None,
        replicates: None,
        rhs_theta: intervals.rhs_theta_pair(theta),
        rhs_master: master_sum(theta, n, intervals)?,
        exact: Some(rational_string(&exact)),
    })
}

/// Sweep table `n,k,intervals,empirical,sigma,rhs_theta_lo,rhs_theta_hi,rhs_master`.
pub fn write_sweep_csv<W: Write>(out: W, reports: &[IntensityReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "k", "intervals", "empirical", "sigma", "rhs_theta_lo", "rhs_theta_hi", "rhs_master"])?;
    for r in reports {
        w.write_record([
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            r.k.to_string(),
            r.intervals.clone(),
            format!("{:.11e}", r.empirical),
            r.std_error.map(|s| format!("{s:.11e}")).unwrap_or_default(),
            format!("{:.11e}", r.rhs_theta_lo()),
            format!("{:.11e}", r.rhs_theta_hi()),
            format!("{:.11e}", r.rhs_master),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::builtin_family;
    use crate::pd::PdParams;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn harmonic(lo: usize, hi: usize) -> BigRational {
        (lo..=hi).map(|j| BigRational::new(1.into(), (j as i64).into())).sum()
    }

    #[test]
    fn interval_validation() {
        assert!(IntervalFamily::parse("0.1:0.2,0.3:0.4").is_ok());
        assert!(IntervalFamily::parse("0.1:0.5,0.4:0.45").is_err());
        assert!(IntervalFamily::parse("0.3:0.6,0.7:0.8").is_err());
        assert!(IntervalFamily::parse("0:0.2").is_err());
        assert!(IntervalFamily::parse("0.2").is_err());
        let f = IntervalFamily::parse("1/10:1/5").unwrap();
        assert_eq!(f.intervals()[0], (q(1, 10), q(1, 5)));
    }

    #[test]
    fn half_open_index_ranges() {
        let f = IntervalFamily::parse("0.4:0.6").unwrap();
        assert_eq!(f.index_range(0, 1000), 401..=600);
        assert_eq!(f.index_range(0, 7), 3..=4);
    }

    #[test]
    fn permutation_intensity_is_harmonic() {
        let perm = builtin_family("permutation", BigRational::from_integer(1.into())).unwrap();
        let one = IntervalFamily::parse("0.4:0.6").unwrap();
        let v = exact_intensity(&perm, 1000, &one).unwrap();
        assert_eq!(v, harmonic(401, 600));
        assert!((rational_to_f64(&v) - 1.5f64.ln()).abs() < 2e-3);
        let two = IntervalFamily::parse("0.1:0.2,0.3:0.4").unwrap();
        let v = exact_intensity(&perm, 500, &two).unwrap();
        assert_eq!(v, harmonic(51, 100) * harmonic(151, 200));
    }

    #[test]
    fn ewens_intensity_matches_tuple_sum() {
        let ewens = builtin_family("permutation", BigRational::new(3.into(), 2.into())).unwrap();
        let f = IntervalFamily::parse("0.1:0.25,0.3:0.4").unwrap();
        let engine = MomentEngine::new(&ewens, 60).unwrap();
        let mut direct = BigRational::zero();
        for_each_tuple(&f, 60, |t| direct += engine.moment(t).unwrap());
        assert_eq!(exact_intensity(&ewens, 60, &f).unwrap(), direct);
    }

    #[test]
    fn master_sum_at_theta_one_is_harmonic_product() {
        let f = IntervalFamily::parse("0.1:0.2,0.3:0.4").unwrap();
        let expected = rational_to_f64(&(harmonic(51, 100) * harmonic(151, 200)));
        assert!((master_sum(1.0, 500, &f).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn rhs_theta_pair() {
        let f = IntervalFamily::parse("0.2:0.5").unwrap();
        let [lo, hi] = f.rhs_theta_pair(2.0);
        let l = 2.5f64.ln();
        assert!((lo.value - 2.0 * 0.8 * l).abs() < 1e-14);
        assert!((hi.value - 2.0 * 0.5 * l).abs() < 1e-14);
        // PD(2): 2 (log(b/a) - (b - a)) lies in between
        let exact = pd_intensity(2.0, &f).unwrap();
        assert!((exact - 2.0 * (l - 0.3)).abs() < 1e-10);
        assert!(exact < lo.value && exact > hi.value);
    }

    #[test]
    fn prime_thresholds_are_exact() {
        let f = IntervalFamily::parse("0.2:0.5").unwrap();
        // 10^6^(1/5) = 15.8..., 10^6^(1/2) = 1000
        assert_eq!(prime_bounds(1_000_000, &f), vec![(15, 1000)]);
        let g = IntervalFamily::parse("1/3:1/2").unwrap();
        assert_eq!(prime_bounds(1_000_000, &g), vec![(100, 1000)]);
    }

    #[test]
    fn mc_requires_replicates() {
        let sb = StickBreaking::new(PdParams::new(1.0).unwrap());
        let f = IntervalFamily::parse("0.2:0.5").unwrap();
        assert!(mc_intensity(IntensitySource::PoissonDirichlet(sb), &f, 10, 1).is_err());
        let r = mc_intensity(IntensitySource::PoissonDirichlet(sb), &f, 20_000, 1).unwrap();
        assert!((r.empirical - 2.5f64.ln()).abs() < 4.0 * r.std_error.unwrap());
    }
}
