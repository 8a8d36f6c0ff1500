//! Floating-point moments for sizes where exact rationals are too slow, with
//! a bound on the relative error carried through from the coefficients.

use serde::Serialize;

use crate::error::{check_guard, Error, Result};
use crate::families::{Construction, FamilySpec};
use crate::numeric::{ln_biguint, ln_gamma, rational_string};
use crate::series::{FloatSeries, SERIES_SIZE_LIMIT};

use super::{master_rhs, validate_indices};

/// Rounding allowance, in ulps of the largest logarithm, for each logarithm
/// and log-gamma evaluation.
const LOG_ULPS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloatMoment {
    pub value: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloatMomentRecord {
    pub family: String,
    pub phi: String,
    pub n: usize,
    pub indices: Vec<usize>,
    pub value: f64,
    pub relative_error: f64,
    pub master_rhs: Option<f64>,
    pub ratio: Option<f64>,
}

/// Moments from [`FloatSeries`] coefficients `t_j = c_j sigma^j`, with
/// `sigma` the radius of convergence when the family carries one.
#[derive(Debug, Clone)]
pub struct FloatMomentEngine {
    family: FamilySpec,
    n: usize,
    series: FloatSeries,
    ln_m: Vec<f64>,
    ln_phi: f64,
    ln_scale: f64,
}

impl FloatMomentEngine {
    pub fn new(family: &FamilySpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("total size must be at least 1"));
        }
        check_guard(format!("float coefficients up to size {n}"), n as u128, SERIES_SIZE_LIMIT)?;
        let m = family.m_prefix(n)?;
        let scale = family.singular().map_or(1.0, |sd| sd.rho);
        let series = FloatSeries::new(family.kind(), &m, family.phi_f64(), scale, n)?;
        let top = series.scaled_value(n);
        if top == 0.0 {
            return Err(Error::domain(format!("no structures of size {n}")));
        }
        if !top.is_finite() || !series.relative_error(n).is_finite() {
            return Err(Error::range(format!("coefficients up to size {n} leave the f64 range; use exact moments")));
        }
        Ok(FloatMomentEngine {
            family: family.clone(),
            n,
            series,
            ln_m: m.iter().map(ln_biguint).collect(),
            ln_phi: family.phi_f64().ln(),
            ln_scale: scale.ln(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ln (c_{n-u} / c_n)` and the sum of the magnitudes of its parts, or
    /// `None` when `c_{n-u} = 0`.
    fn ln_coeff_ratio(&self, u: usize) -> Option<(f64, f64)> {
        let t = self.series.scaled_value(self.n - u);
        (t != 0.0).then(|| {
            let parts = [t.abs().ln(), -self.series.scaled_value(self.n).abs().ln(), u as f64 * self.ln_scale];
            (parts.iter().sum(), parts.iter().map(|p| p.abs()).sum())
        })
    }

    pub fn moment(&self, indices: &[usize]) -> Result<FloatMoment> {
        validate_indices(self.n, indices)?;
        let s: usize = indices.iter().sum();
        let zero = FloatMoment { value: 0.0, relative_error: 0.0 };
        if s > self.n || indices.iter().any(|&i| self.ln_m[i] == f64::NEG_INFINITY) {
            return Ok(zero);
        }
        let eps = f64::EPSILON;
        let top_err = self.series.relative_error(self.n);
        if self.family.kind() == Construction::Assembly {
            let Some((ln_ratio, mut magnitude)) = self.ln_coeff_ratio(s) else { return Ok(zero) };
            let mut ln_value = ln_ratio;
            for &i in indices {
                let ln_fact = ln_gamma(i as f64 + 1.0);
                ln_value += self.ln_phi + self.ln_m[i] - ln_fact;
                magnitude += self.ln_phi.abs() + self.ln_m[i] + ln_fact;
            }
            let relative_error = self.series.relative_error(self.n - s) + top_err + LOG_ULPS * eps * (magnitude + 1.0);
            return Ok(FloatMoment { value: ln_value.exp(), relative_error });
        }
        let alternating = self.family.kind() == Construction::Selection;
        let ln_prefix: f64 = indices.iter().map(|&i| self.ln_m[i]).sum();
        let k = indices.len();
        let mut h = vec![1usize; k];
        let mut used = s;
        let (mut total, mut mass, mut err) = (0.0f64, 0.0f64, 0.0f64);
        let mut terms = 0usize;
        loop {
            let h_total: usize = h.iter().sum();
            if let Some((ln_ratio, magnitude)) = self.ln_coeff_ratio(used) {
                let ln_power = h_total as f64 * self.ln_phi;
                let ln_term = ln_prefix + ln_power + ln_ratio;
                let magnitude = ln_prefix + ln_power.abs() + magnitude;
                let term = ln_term.exp();
                let negative = alternating && (h_total + k) % 2 == 1;
                total += if negative { -term } else { term };
                mass += term;
                err += term * (self.series.relative_error(self.n - used) + top_err + LOG_ULPS * eps * (magnitude + 1.0));
                terms += 1;
            }
            // odometer over h >= 1 with h.i <= n
            let mut pos = 0;
            loop {
                if pos == k {
                    let abs_err = err + terms as f64 * eps * mass;
                    let relative_error = if total != 0.0 { abs_err / total.abs() } else { f64::INFINITY };
                    return Ok(FloatMoment { value: total, relative_error });
                }
                if used + indices[pos] <= self.n {
                    h[pos] += 1;
                    used += indices[pos];
                    break;
                }
                used -= (h[pos] - 1) * indices[pos];
                h[pos] = 1;
                pos += 1;
            }
        }
    }

    pub fn record(&self, indices: &[usize]) -> Result<FloatMomentRecord> {
        let m = self.moment(indices)?;
        let s: usize = indices.iter().sum();
        let master = match self.family.pd_theta() {
            Some(theta) if s < self.n => Some(master_rhs(theta, self.n, indices)?),
            _ => None,
        };
        Ok(FloatMomentRecord {
            family: self.family.full_name(),
            phi: rational_string(self.family.phi()),
            n: self.n,
            indices: indices.to_vec(),
            value: m.value,
            relative_error: m.relative_error,
            master_rhs: master,
            ratio: master.map(|rhs| m.value / rhs),
        })
    }
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    use super::*;
    use crate::families::builtin_family;
    use crate::moments::MomentEngine;

    #[test]
    fn agrees_with_exact_moments() {
        let cases = [
            ("permutation", BigRational::new(1.into(), 2.into())),
            ("permutation", BigRational::new(3.into(), 1.into())),
            ("polynomial-multiset-F2", BigRational::new(3.into(), 2.into())),
            ("polynomial-selection-F2", BigRational::new(2.into(), 1.into())),
            ("polynomial-selection-F3", BigRational::new(1.into(), 3.into())),
        ];
        for (name, phi) in cases {
            let family = builtin_family(name, phi).unwrap();
            let exact = MomentEngine::new(&family, 300).unwrap();
            let float = FloatMomentEngine::new(&family, 300).unwrap();
            for indices in [vec![1], vec![7, 40], vec![60, 90, 100], vec![150, 151]] {
                let want = exact.moment(&indices).unwrap().to_f64().unwrap();
                let got = float.moment(&indices).unwrap();
                assert!(got.relative_error < 1e-9, "{name} {indices:?}: {}", got.relative_error);
                let tol = got.relative_error * want.abs() + 1e-300;
                assert!((got.value - want).abs() <= tol, "{name} {indices:?}: {} vs {want}", got.value);
            }
        }
    }

    #[test]
    fn vanishing_cases() {
        let family = builtin_family("permutation", BigRational::new(1.into(), 1.into())).unwrap();
        let e = FloatMomentEngine::new(&family, 20).unwrap();
        assert_eq!(e.moment(&[11, 12]).unwrap().value, 0.0);
        assert!(e.moment(&[3, 3]).is_err());
        let r = e.record(&[3, 7]).unwrap();
        assert!((r.value - 1.0 / 21.0).abs() < 1e-14);
    }
}
