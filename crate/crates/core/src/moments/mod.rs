//! Exact mixed moments `E{C_{i_1} ... C_{i_k}}` of component counts under the
//! tilted measure (weight `phi^K`), and the asymptotic comparison value.
//!
//! * assemblies: `(c_{n-s}/c_n) prod_j phi m_{i_j} / i_j!`, with `c` the
//!   exponential-scale coefficients and `s = i_1 + ... + i_k`;
//! * multisets: `(prod m_{i_j} / q(n)) sum_{h >= 1} phi^{|h|} q(n - h.i)`;
//! * selections: the same sum with sign `(-1)^(|h| + k)`.
//!
//! Terms with `n - h.i < 0` vanish.

mod enumerate;
mod float;

pub use enumerate::{brute_force_moment, enumerate_profiles, ProfileDistribution};
pub use float::{FloatMoment, FloatMomentEngine, FloatMomentRecord};

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{Construction, FamilySpec};
use crate::numeric::{rational_string, rational_to_f64};
use crate::series::{family_series, CoeffSeries};

/// A moment request: total size and distinct component sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentQuery {
    pub n: usize,
    pub indices: Vec<usize>,
}

impl MomentQuery {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        validate_indices(n, &indices)?;
        Ok(MomentQuery { n, indices })
    }

    pub fn index_sum(&self) -> usize {
        self.indices.iter().sum()
    }
}

fn validate_indices(n: usize, indices: &[usize]) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("total size must be at least 1"));
    }
    if indices.is_empty() {
        return Err(Error::domain("at least one index is required"));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::domain(format!("index {bad} outside 1..={n}")));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain(format!("indices must be distinct, got {indices:?}")));
    }
    Ok(())
}

/// Exact moment together with the comparison value.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentResult {
    pub exact: BigRational,
    pub master_rhs: Option<f64>,
    pub ratio: Option<f64>,
}

/// JSON record of one moment evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRecord {
    pub family: String,
    pub phi: String,
    pub n: usize,
    pub indices: Vec<usize>,
    pub exact: String,
    pub exact_float: f64,
    pub master_rhs: Option<f64>,
    pub ratio: Option<f64>,
}

/// `theta^k / (1 - s/n)^(1-theta) / (i_1 ... i_k)`, `s` the index sum.
pub fn master_rhs(theta: f64, n: usize, indices: &[usize]) -> Result<f64> {
    validate_indices(n, indices)?;
    let s: usize = indices.iter().sum();
    if s >= n {
        return Err(Error::domain(format!("index sum {s} must be below n = {n}")));
    }
    let k = indices.len() as i32;
    let product: f64 = indices.iter().map(|&i| i as f64).product();
    let gap = 1.0 - s as f64 / n as f64;
    Ok(theta.powi(k) / gap.powf(1.0 - theta) / product)
}

/// Unreduced fraction with `i128` parts.
type SmallFraction = (i128, i128);

fn small(x: &BigRational) -> Option<SmallFraction> {
    Some((x.numer().to_i128()?, x.denom().to_i128()?))
}

/// Coefficient tables for one `(family, n)`; answers any number of queries.
#[derive(Debug, Clone)]
pub struct MomentEngine {
    family: FamilySpec,
    n: usize,
    m: Arc<Vec<BigUint>>,
    series: CoeffSeries,
    phi_pows: Vec<BigRational>,
    /// assemblies: `c_{n-s}/c_n` for `s = 0..=n`
    ratios: Vec<BigRational>,
    /// assemblies: `phi m_i / i!`
    weights: Vec<BigRational>,
    small_ratios: Vec<Option<SmallFraction>>,
    small_weights: Vec<Option<SmallFraction>>,
}

impl MomentEngine {
    pub fn new(family: &FamilySpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("total size must be at least 1"));
        }
        let series = family_series(family, n)?;
        let m = family.m_prefix(n)?;
        let phi = family.phi().clone();
        let phi_pows: Vec<BigRational> = std::iter::successors(Some(BigRational::one()), |p| Some(p * &phi)).take(n + 1).collect();
        let (ratios, weights) = if family.kind() == Construction::Assembly {
            let top = series.coeff(n);
            if top.is_zero() {
                return Err(Error::domain(format!("no structures of size {n}")));
            }
            let ratios: Vec<BigRational> = (0..=n).map(|s| series.coeff(n - s) / top).collect();
            let mut weights = vec![BigRational::zero(); n + 1];
            let mut fact = BigUint::one();
            for i in 1..=n {
                fact *= BigUint::from(i);
                weights[i] = &phi * BigRational::new(BigInt::from(m[i].clone()), BigInt::from(fact.clone()));
            }
            (ratios, weights)
        } else {
            if series.coeff(n).is_zero() {
                return Err(Error::domain(format!("no structures of size {n}")));
            }
            (Vec::new(), Vec::new())
        };
        let small_ratios = ratios.iter().map(small).collect();
        let small_weights = weights.iter().map(small).collect();
        Ok(MomentEngine { family: family.clone(), n, m, series, phi_pows, ratios, weights, small_ratios, small_weights })
    }

    pub fn family(&self) -> &FamilySpec {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn series(&self) -> &CoeffSeries {
        &self.series
    }

    /// Assemblies: `phi m_i / i!`.
    pub fn assembly_weight(&self, i: usize) -> &BigRational {
        &self.weights[i]
    }

    /// Assemblies: `c_{n-s} / c_n`.
    pub fn assembly_ratio(&self, s: usize) -> &BigRational {
        &self.ratios[s]
    }

    /// Exact `E{C_{i_1} ... C_{i_k}}`.
    pub fn moment(&self, indices: &[usize]) -> Result<BigRational> {
        validate_indices(self.n, indices)?;
        let s: usize = indices.iter().sum();
        if s > self.n {
            return Ok(BigRational::zero());
        }
        match self.family.kind() {
            Construction::Assembly => {
                let mut value = self.ratios[s].clone();
                for &i in indices {
                    value *= &self.weights[i];
                }
                Ok(value)
            }
            Construction::Multiset | Construction::Selection => {
                Ok(self.prefactor(indices) * self.h_sum(indices))
            }
        }
    }

    /// Assembly moment as an unreduced `i128` fraction, when every factor fits.
    pub fn moment_small(&self, indices: &[usize]) -> Option<SmallFraction> {
        if self.family.kind() != Construction::Assembly {
            return None;
        }
        let s: usize = indices.iter().sum();
        if s > self.n {
            return Some((0, 1));
        }
        let (mut num, mut den) = self.small_ratios[s]?;
        for &i in indices {
            let (a, b) = self.small_weights[i]?;
            num = num.checked_mul(a)?;
            den = den.checked_mul(b)?;
        }
        Some((num, den))
    }

    fn prefactor(&self, indices: &[usize]) -> BigRational {
        let prod: BigUint = indices.iter().map(|&i| self.m[i].clone()).product();
        BigRational::from_integer(BigInt::from(prod)) / self.series.coeff(self.n)
    }

    /// Visits every term of the multiset/selection `h`-sum as
    /// `(is_leading, signed term)`; `h = (1, ..., 1)` is the leading term.
    fn for_each_h_term(&self, indices: &[usize], mut visit: impl FnMut(bool, BigRational)) {
        let k = indices.len();
        let alternating = self.family.kind() == Construction::Selection;
        let mut h = vec![1usize; k];
        let mut used: usize = indices.iter().sum();
        loop {
            let h_total: usize = h.iter().sum();
            let mut term = &self.phi_pows[h_total] * self.series.coeff(self.n - used);
            if alternating && (h_total + k) % 2 == 1 {
                term = -term;
            }
            visit(h.iter().all(|&v| v == 1), term);
            // odometer over h >= 1 with h.i <= n
            let mut pos = 0;
            loop {
                if pos == k {
                    return;
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

    fn h_sum(&self, indices: &[usize]) -> BigRational {
        let mut total = BigRational::zero();
        self.for_each_h_term(indices, |_, term| total += term);
        total
    }

    /// For multisets and selections: `sum |non-leading terms| / leading term`
    /// of the `h`-sum (`None` for assemblies or a vanishing leading term).
    pub fn leading_term_dominance(&self, indices: &[usize]) -> Result<Option<f64>> {
        validate_indices(self.n, indices)?;
        if self.family.kind() == Construction::Assembly || indices.iter().sum::<usize>() > self.n {
            return Ok(None);
        }
        let mut leading = BigRational::zero();
        let mut others = BigRational::zero();
        self.for_each_h_term(indices, |is_leading, term| {
            if is_leading {
                leading = term;
            } else {
                others += term.abs();
            }
        });
        if leading.is_zero() {
            return Ok(None);
        }
        Ok(Some(rational_to_f64(&(others / leading.abs()))))
    }

    /// Moment plus comparison with the master right-hand side (when the
    /// family has singular data and `s < n`).
    pub fn evaluate(&self, indices: &[usize]) -> Result<MomentResult> {
        let exact = self.moment(indices)?;
        let s: usize = indices.iter().sum();
        let master = match self.family.pd_theta() {
            Some(theta) if s < self.n => Some(master_rhs(theta, self.n, indices)?),
            _ => None,
        };
        let ratio = master.map(|rhs| rational_to_f64(&exact) / rhs);
        Ok(MomentResult { exact, master_rhs: master, ratio })
    }

    pub fn record(&self, indices: &[usize]) -> Result<MomentRecord> {
        let r = self.evaluate(indices)?;
        Ok(MomentRecord {
            family: self.family.full_name(),
            phi: rational_string(self.family.phi()),
            n: self.n,
            indices: indices.to_vec(),
            exact: rational_string(&r.exact),
            exact_float: rational_to_f64(&r.exact),
            master_rhs: r.master_rhs,
            ratio: r.ratio,
        })
    }
}

fn kind_moment(family: &FamilySpec, kind: Construction, q: &MomentQuery) -> Result<BigRational> {
    if family.kind() != kind {
        return Err(Error::domain(format!("{} is not a {}", family.full_name(), kind.name())));
    }
    MomentEngine::new(family, q.n)?.moment(&q.indices)
}

pub fn assembly_moment(family: &FamilySpec, q: &MomentQuery) -> Result<BigRational> {
    kind_moment(family, Construction::Assembly, q)
}

pub fn multiset_moment(family: &FamilySpec, q: &MomentQuery) -> Result<BigRational> {
    kind_moment(family, Construction::Multiset, q)
}

pub fn selection_moment(family: &FamilySpec, q: &MomentQuery) -> Result<BigRational> {
    kind_moment(family, Construction::Selection, q)
}

/// Dispatches on the family's construction.
pub fn exact_moment(family: &FamilySpec, q: &MomentQuery) -> Result<BigRational> {
    MomentEngine::new(family, q.n)?.moment(&q.indices)
}
