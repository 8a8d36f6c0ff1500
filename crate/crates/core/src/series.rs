//! Exact coefficient series of `Q(x, phi)` for the three constructions, and
//! the exp-log asymptotics of their coefficients.
//!
//! Recurrences (all exact over the rationals):
//!
//! * assemblies, `Q = exp(phi M)` with `M = sum m_i x^i / i!`: on the
//!   exponential scale `c_n = q(n)/n!`,
//!   `n c_n = phi sum_j m_j / (j-1)! c_{n-j}`;
//! * multisets, `n q(n) = sum_j b_j q(n-j)` with `b_j = sum_{d|j} d m_d phi^(j/d)`;
//! * selections, the same with `b_j = sum_{d|j} (-1)^(j/d+1) d m_d phi^(j/d)`.

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{check_guard, Error, Result};
use crate::families::{Construction, FamilySpec};
use crate::numeric::{divisors, ln_biguint, ln_factorials, ln_gamma, ln_rational_abs, rational_string, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Ordinary,
    Exponential,
}

/// Coefficients `c_0..c_N` of a power series. For exponential normalization
/// `c_n = q(n)/n!`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeries {
    normalization: Normalization,
    coeffs: Vec<BigRational>,
}

impl CoeffSeries {
    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Power-series coefficient `c_n`; zero for negative or out-of-range `n`
    /// below zero is the caller's concern.
    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `q_phi(n)`: the coefficient times `n!` for exponential normalization.
    pub fn count(&self, n: usize) -> BigRational {
        match self.normalization {
            Normalization::Ordinary => self.coeffs[n].clone(),
            Normalization::Exponential => {
                let fact: BigUint = (1..=n as u64).map(BigUint::from).product();
                &self.coeffs[n] * BigRational::from_integer(BigInt::from(fact))
            }
        }
    }

    /// CSV dump `n,q_phi_n` with exact decimal strings (`p/q` for non-integers).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "q_phi_n"])?;
        let mut fact = BigUint::one();
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                fact *= BigUint::from(n);
            }
            let q = match self.normalization {
                Normalization::Ordinary => c.clone(),
                Normalization::Exponential => c * BigRational::from_integer(BigInt::from(fact.clone())),
            };
            w.write_record([n.to_string(), rational_string(&q)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_inputs(m: &[BigUint], phi: &BigRational, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("series degree must be at least 1"));
    }
    if m.len() <= n {
        return Err(Error::range(format!("need m_1..m_{n}, have {}", m.len().saturating_sub(1))));
    }
    if !phi.is_positive() {
        return Err(Error::domain("phi must be positive"));
    }
    Ok(())
}

fn big(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// Exponential-scale coefficients of `exp(phi M(x))`; `m[i] = m_i`, `m[0]` ignored.
pub fn assembly_series(m: &[BigUint], phi: &BigRational, n: usize) -> Result<CoeffSeries> {
    check_inputs(m, phi, n)?;
    // w_j = phi m_j / (j-1)!
    let mut weights = vec![BigRational::zero(); n + 1];
    let mut fact = BigUint::one();
    for j in 1..=n {
        if j > 1 {
            fact *= BigUint::from(j - 1);
        }
        if !m[j].is_zero() {
            weights[j] = phi * BigRational::new(BigInt::from(m[j].clone()), BigInt::from(fact.clone()));
        }
    }
    Ok(CoeffSeries { normalization: Normalization::Exponential, coeffs: log_derivative_recurrence(&weights, n) })
}

/// `c_n = (1/n) sum_j w_j c_{n-j}`, `c_0 = 1`.
fn log_derivative_recurrence(weights: &[BigRational], n: usize) -> Vec<BigRational> {
    let support: Vec<usize> = (1..=n).filter(|&j| !weights[j].is_zero()).collect();
    let mut c = Vec::with_capacity(n + 1);
    c.push(BigRational::one());
    for k in 1..=n {
        let mut acc = BigRational::zero();
        for &j in support.iter().take_while(|&&j| j <= k) {
            if !c[k - j].is_zero() {
                acc += &weights[j] * &c[k - j];
            }
        }
        c.push(acc / BigRational::from_integer(BigInt::from(k)));
    }
    c
}

fn power_sum_weights(m: &[BigUint], phi: &BigRational, n: usize, alternating: bool) -> Vec<BigRational> {
    let phi_pows: Vec<BigRational> = std::iter::successors(Some(BigRational::one()), |p| Some(p * phi)).take(n + 1).collect();
    let mut b = vec![BigRational::zero(); n + 1];
    for (j, slot) in b.iter_mut().enumerate().skip(1) {
        let mut acc = BigRational::zero();
        for d in divisors(j) {
            if m[d].is_zero() {
                continue;
            }
            let term = big(&m[d]) * BigRational::from_integer(d.into()) * &phi_pows[j / d];
            if alternating && (j / d) % 2 == 0 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        *slot = acc;
    }
    b
}

/// Ordinary coefficients of `prod (1 - phi x^i)^(-m_i)`.
pub fn multiset_series(m: &[BigUint], phi: &BigRational, n: usize) -> Result<CoeffSeries> {
    check_inputs(m, phi, n)?;
    let b = power_sum_weights(m, phi, n, false);
    Ok(CoeffSeries { normalization: Normalization::Ordinary, coeffs: log_derivative_recurrence(&b, n) })
}

/// Ordinary coefficients of `prod (1 + phi x^i)^(m_i)`.
pub fn selection_series(m: &[BigUint], phi: &BigRational, n: usize) -> Result<CoeffSeries> {
    check_inputs(m, phi, n)?;
    let b = power_sum_weights(m, phi, n, true);
    Ok(CoeffSeries { normalization: Normalization::Ordinary, coeffs: log_derivative_recurrence(&b, n) })
}

/// Largest size for which exact family series are built.
pub const SERIES_SIZE_LIMIT: u128 = 10_000;

pub fn family_series(family: &FamilySpec, n: usize) -> Result<CoeffSeries> {
    check_guard(format!("exact coefficients up to size {n}"), n as u128, SERIES_SIZE_LIMIT)?;
    let m = family.m_prefix(n)?;
    match family.kind() {
        Construction::Assembly => assembly_series(&m, family.phi(), n),
        Construction::Multiset => multiset_series(&m, family.phi(), n),
        Construction::Selection => selection_series(&m, family.phi(), n),
    }
}

/// Singular behaviour `G(z) = theta log 1/(1 - z/rho) + lambda + o(1)` of the
/// irreducible series, together with the tilt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularData {
    pub rho: f64,
    pub theta: f64,
    pub lambda: f64,
    pub phi: f64,
}

impl SingularData {
    pub fn new(rho: f64, theta: f64, lambda: f64, phi: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::domain(format!("rho must lie in (0, 1], got {rho}")));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(format!("theta must be positive, got {theta}")));
        }
        if !(phi > 0.0 && phi.is_finite()) {
            return Err(Error::domain(format!("phi must be positive, got {phi}")));
        }
        if !lambda.is_finite() {
            return Err(Error::domain("lambda must be finite"));
        }
        Ok(SingularData { rho, theta, lambda, phi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaEstimate {
    pub value: f64,
    pub deltas: [f64; 2],
    pub values: [f64; 2],
    /// Whether the two evaluations agree within `1e-6`.
    pub agree: bool,
}

pub const LAMBDA_DELTAS: [f64; 2] = [1e-8, 1e-9];

/// `lambda` as the limit of `G(rho (1 - delta)) - theta log(1/delta)`.
///
/// Writing `log(1/delta) = sum_i (1 - delta)^i / i` turns the difference into
/// `sum_i (g_i rho^i - theta/i) (1 - delta)^i`, whose coefficients are small,
/// so the two large terms never need to be formed. It is evaluated at two
/// values of `delta` and extrapolated to `delta = 0`.
pub fn estimate_lambda(m: &[BigUint], normalization: Normalization, rho: f64, theta: f64) -> Result<LambdaEstimate> {
    if m.len() < 2 {
        return Err(Error::domain("lambda estimation needs at least m_1"));
    }
    let n = m.len() - 1;
    let ln_fact = ln_factorials(n);
    let ln_rho = rho.ln();
    let excess: Vec<f64> = (1..=n)
        .map(|i| {
            let ln_g = match normalization {
                Normalization::Ordinary => ln_biguint(&m[i]),
                Normalization::Exponential => ln_biguint(&m[i]) - ln_fact[i],
            };
            (ln_g + i as f64 * ln_rho).exp() - theta / i as f64
        })
        .collect();
    let at = |delta: f64| -> f64 {
        let damp = (-delta).ln_1p();
        excess.iter().enumerate().map(|(k, a)| a * (damp * (k + 1) as f64).exp()).collect::<CompensatedSum>().value()
    };
    let values = [at(LAMBDA_DELTAS[0]), at(LAMBDA_DELTAS[1])];
    // the bias is linear in delta; one Richardson step removes it
    let r = LAMBDA_DELTAS[0] / LAMBDA_DELTAS[1];
    let value = (r * values[1] - values[0]) / (r - 1.0);
    Ok(LambdaEstimate { value, deltas: LAMBDA_DELTAS, values, agree: (values[0] - values[1]).abs() < 1e-6 })
}

/// `[z^n] G(z) ~ theta rho^(-n) / n`.
pub fn predict_coeff_g(sd: &SingularData, n: usize) -> f64 {
    sd.theta * sd.rho.powi(-(n as i32)) / n as f64
}

/// A constant defined by a truncated series, with the truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesConstant {
    /// The constant `C = exp(sum)`.
    pub value: f64,
    pub log_value: f64,
    pub terms: usize,
    pub tail_bound: f64,
}

const TAIL_TOLERANCE: f64 = 1e-12;

/// `C = exp(R(rho))`, `R(rho) = sum_{j >= 2} phi^j G(rho^j) / j`.
///
/// Successive terms shrink at least by the factor `phi rho`, so the remainder
/// after term `J` is at most `term_J phi rho / (1 - phi rho)`.
pub fn multiset_constant(m: &[BigUint], phi: f64, rho: f64) -> Result<SeriesConstant> {
    if phi * rho >= 1.0 {
        return Err(Error::domain(format!(
            "multisets need phi < 1/rho: phi rho = {} makes R(rho) diverge",
            phi * rho
        )));
    }
    if rho >= 1.0 {
        return Err(Error::domain("R(rho) needs rho < 1"));
    }
    let n = m.len() - 1;
    let ln_m: Vec<f64> = m.iter().map(ln_biguint).collect();
    let g_at = |j: usize| -> f64 {
        let ln_z = j as f64 * rho.ln();
        (1..=n).map(|i| (ln_m[i] + i as f64 * ln_z).exp()).collect::<CompensatedSum>().value()
    };
    let ratio = phi * rho;
    let mut sum = CompensatedSum::default();
    let mut tail = f64::INFINITY;
    let mut terms = 0;
    for j in 2..=10_000usize {
        let term = phi.powi(j as i32) * g_at(j) / j as f64;
        sum.add(term);
        terms = j - 1;
        tail = term * ratio / (1.0 - ratio);
        if term < 1e-14 * sum.value().abs() && tail < TAIL_TOLERANCE {
            break;
        }
    }
    if tail >= TAIL_TOLERANCE {
        return Err(Error::domain(format!("R(rho) did not converge (tail bound {tail:e})")));
    }
    let r = sum.value();
    Ok(SeriesConstant { value: r.exp(), log_value: r, terms, tail_bound: tail })
}

/// `C = S(rho) = exp(sum_i m_i (log(1 + phi rho^i) - phi rho^i))`.
///
/// Each summand lies in `[-(phi rho^i)^2 m_i / 2, 0]`; with `B` the largest
/// `m_i rho^i` seen, the remainder after index `I` is below
/// `phi^2 B rho^(I+1) / (2 (1 - rho))`.
pub fn selection_constant(m: &[BigUint], phi: f64, rho: f64) -> Result<SeriesConstant> {
    if rho >= 1.0 {
        return Err(Error::domain("S(rho) needs rho < 1"));
    }
    let n = m.len() - 1;
    let mut sum = CompensatedSum::default();
    let mut bound: f64 = 0.0;
    let mut tail = f64::INFINITY;
    let mut terms = 0;
    for (i, mi) in m.iter().enumerate().skip(1) {
        if mi.is_zero() {
            continue;
        }
        let u = phi * rho.powi(i as i32);
        bound = bound.max((ln_biguint(mi) + i as f64 * rho.ln()).exp());
        // u - log(1 + u) without cancellation for small u
        let gap = if u < 1e-4 { u * u * (0.5 - u / 3.0 + u * u / 4.0) } else { u - u.ln_1p() };
        let term = -(ln_biguint(mi) + gap.ln()).exp();
        sum.add(term);
        terms = i;
        tail = phi * phi * bound * rho.powi(i as i32 + 1) / (2.0 * (1.0 - rho));
        if term.abs() < 1e-14 * sum.value().abs() && tail < TAIL_TOLERANCE {
            break;
        }
    }
    if tail >= TAIL_TOLERANCE {
        return Err(Error::range(format!("S(rho) needs more than {n} counts (tail bound {tail:e})")));
    }
    let s = sum.value();
    Ok(SeriesConstant { value: s.exp(), log_value: s, terms, tail_bound: tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    pub n: usize,
    pub predicted: f64,
    pub exact: f64,
    pub ratio: f64,
    pub log_predicted: f64,
    pub log_exact: f64,
}

/// Number of counts used to evaluate `C`.
const CONSTANT_TERMS: usize = 400;

/// Precomputed constants of `[z^n] F(z) ~ C e^(phi lambda) / Gamma(phi theta) n^(phi theta - 1) rho^(-n)`.
#[derive(Debug, Clone)]
pub struct FsPredictor {
    sd: SingularData,
    kind: Construction,
    constant: SeriesConstant,
    log_prefactor: f64,
}

impl FsPredictor {
    pub fn new(sd: SingularData, kind: Construction, m: &[BigUint]) -> Result<Self> {
        let constant = match kind {
            Construction::Assembly => SeriesConstant { value: 1.0, log_value: 0.0, terms: 0, tail_bound: 0.0 },
            Construction::Multiset => multiset_constant(m, sd.phi, sd.rho)?,
            Construction::Selection => selection_constant(m, sd.phi, sd.rho)?,
        };
        let pt = sd.phi * sd.theta;
        let log_prefactor = constant.log_value + sd.phi * sd.lambda - ln_gamma(pt);
        Ok(FsPredictor { sd, kind, constant, log_prefactor })
    }

    pub fn for_family(family: &FamilySpec) -> Result<Self> {
        let sd = *family
            .singular()
            .ok_or_else(|| Error::domain(format!("{} carries no singular data", family.name())))?;
        let m = match family.m().limit() {
            Some(limit) => family.m_prefix(limit.min(CONSTANT_TERMS))?,
            None => family.m_prefix(CONSTANT_TERMS)?,
        };
        Self::new(sd, family.kind(), &m)
    }

    pub fn constant(&self) -> SeriesConstant {
        self.constant
    }

    pub fn kind(&self) -> Construction {
        self.kind
    }

    pub fn log_predicted(&self, n: usize) -> f64 {
        let pt = self.sd.phi * self.sd.theta;
        self.log_prefactor + (pt - 1.0) * (n as f64).ln() - n as f64 * self.sd.rho.ln()
    }

    /// Compares with the exact coefficient `[z^n] F` (`c_n` on the series' own scale).
    pub fn compare(&self, n: usize, exact_coeff: &BigRational) -> AsymptoticPrediction {
        let log_predicted = self.log_predicted(n);
        let log_exact = ln_rational_abs(exact_coeff);
        AsymptoticPrediction {
            n,
            predicted: log_predicted.exp(),
            exact: log_exact.exp(),
            ratio: (log_exact - log_predicted).exp(),
            log_predicted,
            log_exact,
        }
    }
}

/// Prediction for `[z^n] F` with the exact coefficient computed alongside.
pub fn predict_coeff_f(sd: &SingularData, kind: Construction, n: usize, m: &[BigUint]) -> Result<AsymptoticPrediction> {
    let predictor = FsPredictor::new(*sd, kind, m)?;
    let phi = rational_from_f64(sd.phi)?;
    let series = match kind {
        Construction::Assembly => assembly_series(m, &phi, n)?,
        Construction::Multiset => multiset_series(m, &phi, n)?,
        Construction::Selection => selection_series(m, &phi, n)?,
    };
    Ok(predictor.compare(n, series.coeff(n)))
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::domain(format!("{x} is not a finite number")))
}

/// Floating-point coefficients for large degrees: stores `t_n = c_n sigma^n`
/// with a running bound on the relative error of each entry.
#[derive(Debug, Clone)]
pub struct FloatSeries {
    normalization: Normalization,
    scale: f64,
    values: Vec<f64>,
    rel_err: Vec<f64>,
}

impl FloatSeries {
    /// `scale` should be close to the radius of convergence so the stored
    /// values stay near unit size.
    pub fn new(kind: Construction, m: &[BigUint], phi: f64, scale: f64, n: usize) -> Result<Self> {
        if m.len() <= n {
            return Err(Error::range(format!("need m_1..m_{n}, have {}", m.len().saturating_sub(1))));
        }
        if !(phi > 0.0 && scale > 0.0) {
            return Err(Error::domain("phi and scale must be positive"));
        }
        let ln_m: Vec<f64> = m.iter().map(ln_biguint).collect();
        let ln_s = scale.ln();
        let ln_phi = phi.ln();
        let mut w = vec![0.0; n + 1];
        match kind {
            Construction::Assembly => {
                for j in 1..=n {
                    w[j] = (ln_phi + ln_m[j] - ln_gamma(j as f64) + j as f64 * ln_s).exp();
                }
            }
            Construction::Multiset | Construction::Selection => {
                for (j, slot) in w.iter_mut().enumerate().skip(1) {
                    let mut acc = 0.0;
                    for d in divisors(j) {
                        if ln_m[d] == f64::NEG_INFINITY {
                            continue;
                        }
                        let e = j / d;
                        let t = ((d as f64).ln() + ln_m[d] + e as f64 * ln_phi + j as f64 * ln_s).exp();
                        acc += if kind == Construction::Selection && e % 2 == 0 { -t } else { t };
                    }
                    *slot = acc;
                }
            }
        }
        let eps = f64::EPSILON;
        let mut values = vec![1.0];
        let mut rel_err = vec![0.0];
        for k in 1..=n {
            let mut acc = 0.0;
            let mut magnitude = 0.0;
            let mut err = 0.0;
            for j in 1..=k {
                let term = w[j] * values[k - j];
                acc += term;
                magnitude += term.abs();
                err += term.abs() * (rel_err[k - j] + 4.0 * eps);
            }
            let value = acc / k as f64;
            // accumulated rounding in the sum is bounded by k eps times the absolute mass
            let abs_err = (err + k as f64 * eps * magnitude) / k as f64;
            values.push(value);
            rel_err.push(if value != 0.0 { abs_err / value.abs() } else { f64::INFINITY });
        }
        Ok(FloatSeries { normalization: kind.normalization(), scale, values, rel_err })
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    /// `ln c_n`.
    pub fn ln_coeff(&self, n: usize) -> f64 {
        self.values[n].abs().ln() - n as f64 * self.scale.ln()
    }

    pub fn scaled_value(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// Certified bound on the relative error of `c_n`.
    pub fn relative_error(&self, n: usize) -> f64 {
        self.rel_err[n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::necklace_counts;
    use num_traits::ToPrimitive;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn perm_m(n: usize) -> Vec<BigUint> {
        let mut m = vec![BigUint::zero()];
        let mut f = BigUint::one();
        for i in 1..=n {
            m.push(f.clone());
            f *= BigUint::from(i);
        }
        m
    }

    #[test]
    fn permutations_count_factorials() {
        let s = assembly_series(&perm_m(60), &int(1), 60).unwrap();
        let mut fact = BigUint::one();
        for n in 1..=60usize {
            fact *= BigUint::from(n);
            assert_eq!(s.count(n), BigRational::from_integer(BigInt::from(fact.clone())));
        }
        assert_eq!(s.count(5), int(120));
        // sum over S_3 of 2^cycles = 2*2 + 3*4 + 1*8
        let s2 = assembly_series(&perm_m(3), &int(2), 3).unwrap();
        assert_eq!(s2.count(3), int(24));
    }

    #[test]
    fn trivial_universes() {
        let mut m = vec![BigUint::zero(); 11];
        m[1] = BigUint::one();
        let a = assembly_series(&m, &int(1), 10).unwrap();
        let ms = multiset_series(&m, &int(1), 10).unwrap();
        for n in 0..=10 {
            assert_eq!(a.count(n), int(1));
            assert_eq!(ms.count(n), int(1));
        }
        m[1] = BigUint::from(7u32);
        let sel = selection_series(&m, &int(1), 10).unwrap();
        for n in 0..=10u64 {
            let expected = crate::numeric::binomial(7, n);
            assert_eq!(sel.count(n as usize), big(&expected));
        }
    }

    #[test]
    fn small_universe_counts() {
        let m = vec![BigUint::zero(), BigUint::from(2u32), BigUint::one(), BigUint::zero(), BigUint::zero()];
        assert_eq!(multiset_series(&m, &int(1), 4).unwrap().count(4), int(9));
        assert_eq!(selection_series(&m, &int(1), 3).unwrap().count(3), int(2));
    }

    #[test]
    fn polynomial_counts() {
        for q in [2i64, 3] {
            let m = necklace_counts(q as u64, 60).unwrap();
            let ms = multiset_series(&m, &int(1), 60).unwrap();
            let sel = selection_series(&m, &int(1), 60).unwrap();
            for n in 2..=60usize {
                let qn = num_traits::pow(int(q), n);
                assert_eq!(ms.count(n), qn);
                assert_eq!(sel.count(n), &qn - num_traits::pow(int(q), n - 1));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let m = perm_m(5);
        assert!(assembly_series(&m, &int(1), 6).is_err());
        assert!(assembly_series(&m, &int(0), 5).is_err());
        assert!(assembly_series(&m, &int(1), 0).is_err());
    }

    #[test]
    fn csv_dump_exact() {
        let s = assembly_series(&perm_m(4), &BigRational::new(1.into(), 2.into()), 3).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        // q_{1/2}(n) = (1/2)(1/2 + 1)...(1/2 + n - 1)
        assert_eq!(String::from_utf8(buf).unwrap(), "n,q_phi_n\n0,1\n1,1/2\n2,3/4\n3,15/8\n");
    }

    #[test]
    fn coeff_g_prediction() {
        let sd = SingularData::new(0.5, 1.0, 0.0, 1.0).unwrap();
        assert!((predict_coeff_g(&sd, 20) - 52428.8).abs() < 1e-9);
        let m = necklace_counts(2, 20).unwrap();
        assert_eq!(m[20].to_u64(), Some(52377));
        let perm = SingularData::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((predict_coeff_g(&perm, 7) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_of_permutations_is_zero() {
        let est = estimate_lambda(&perm_m(50), Normalization::Exponential, 1.0, 1.0).unwrap();
        assert!(est.value.abs() < 1e-14);
        assert!(est.agree);
    }

    #[test]
    fn f2_constants_cancel() {
        // Q = 1/(1-2z) for multisets and (1-2z^2)/(1-2z) for selections, so
        // C e^lambda is exactly 1 and 1/2 respectively.
        let m = necklace_counts(2, 400).unwrap();
        let lambda = estimate_lambda(&m, Normalization::Ordinary, 0.5, 1.0).unwrap();
        assert!(lambda.agree);
        let cm = multiset_constant(&m, 1.0, 0.5).unwrap();
        assert!((cm.log_value + lambda.value).abs() < 1e-10);
        let cs = selection_constant(&m, 1.0, 0.5).unwrap();
        assert!((cs.log_value + lambda.value - 0.5f64.ln()).abs() < 1e-10);
        assert!(cm.tail_bound < 1e-12 && cs.tail_bound < 1e-12);
        assert!(multiset_constant(&m, 2.0, 0.5).is_err());
    }

    #[test]
    fn predictions_for_f2_families() {
        let m = necklace_counts(2, 400).unwrap();
        let lambda = estimate_lambda(&m, Normalization::Ordinary, 0.5, 1.0).unwrap().value;
        let sd = SingularData::new(0.5, 1.0, lambda, 1.0).unwrap();
        for kind in [Construction::Multiset, Construction::Selection] {
            let p = predict_coeff_f(&sd, kind, 50, &m).unwrap();
            assert!((p.ratio - 1.0).abs() < 0.05, "{kind:?}: {}", p.ratio);
        }
        let perm = SingularData::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let p = predict_coeff_f(&perm, Construction::Assembly, 30, &perm_m(30)).unwrap();
        assert!((p.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn float_series_tracks_exact() {
        let m = necklace_counts(2, 300).unwrap();
        let fs = FloatSeries::new(Construction::Multiset, &m, 1.0, 0.5, 300).unwrap();
        for n in [10, 100, 300] {
            assert!((fs.scaled_value(n) - 1.0).abs() < fs.relative_error(n) + 1e-15);
            assert!(fs.relative_error(n) < 1e-10);
        }
        let sel = FloatSeries::new(Construction::Selection, &m, 1.0, 0.5, 300).unwrap();
        assert!((sel.scaled_value(200) - 0.5).abs() <= sel.relative_error(200) * 0.5 + 1e-15);
        let pm = perm_m(200);
        let ew = FloatSeries::new(Construction::Assembly, &pm, 2.0, 1.0, 200).unwrap();
        // Ewens phi = 2: c_n = n + 1
        assert!((ew.scaled_value(200) / 201.0 - 1.0).abs() <= ew.relative_error(200) + 1e-15);
    }
}
