//! Exact random generation of tilted structures and of prime factorizations.
//!
//! [`StructureSampler`] draws the count profile by sequential conditioning:
//! with `P_i(w)` the total tilted weight of structures of weight `w` built from
//! components of size at most `i`,
//!
//! ```text
//! Pr(C_i = c | remaining weight w) = omega_i(c) P_{i-1}(w - c i) / P_i(w)
//! ```
//!
//! where `omega_i(c)` is `(phi m_i / i!)^c / c!` (assemblies, exponential
//! scale), `binom(m_i + c - 1, c) phi^c` (multisets) or `binom(m_i, c) phi^c`
//! (selections). The table is kept as natural logarithms.

use std::io::Write;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{check_guard, Error, Result};
use crate::families::{Construction, FamilySpec};
use crate::numeric::{ln_biguint, ln_factorials, log_add_exp, stream_rng};

/// Component counts `C_1..C_n` of one structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    n: usize,
    counts: Vec<u32>,
}

impl CountVector {
    /// `counts[i - 1]` is `C_i`; the weights must add up to `n`.
    pub fn new(n: usize, counts: Vec<u32>) -> Result<Self> {
        if counts.len() > n {
            return Err(Error::domain(format!("{} counts for total size {n}", counts.len())));
        }
        let weight: usize = counts.iter().enumerate().map(|(i, &c)| (i + 1) * c as usize).sum();
        if weight != n {
            return Err(Error::domain(format!("sum of i C_i is {weight}, expected {n}")));
        }
        let mut counts = counts;
        counts.resize(n, 0);
        Ok(CountVector { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// `C_i` (zero outside `1..=n`).
    pub fn count(&self, i: usize) -> u32 {
        if i == 0 || i > self.n {
            0
        } else {
            self.counts[i - 1]
        }
    }

    /// Number of components `K`.
    pub fn components(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Component sizes, largest first.
    pub fn sizes(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.components() as usize);
        for i in (1..=self.n).rev() {
            out.extend(std::iter::repeat(i).take(self.counts[i - 1] as usize));
        }
        out
    }
}

/// Non-increasing scaled sizes `L_1 >= L_2 >= ...`, zero padded.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSizeSeq {
    values: Vec<f64>,
}

impl ScaledSizeSeq {
    /// Sorts the values and pads with zeros to at least `pad` entries.
    pub fn new(mut values: Vec<f64>, pad: usize) -> Result<Self> {
        if values.iter().any(|v| !(*v >= 0.0 && *v <= 1.0 + 1e-12)) {
            return Err(Error::domain("scaled sizes must lie in [0, 1]"));
        }
        values.sort_unstable_by(|a, b| b.total_cmp(a));
        if values.len() < pad {
            values.resize(pad, 0.0);
        }
        Ok(ScaledSizeSeq { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `L_i` for `i >= 1`, zero beyond the stored entries.
    pub fn get(&self, i: usize) -> f64 {
        self.values.get(i - 1).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Sizes divided by `n`, padded with zeros to `pad` entries.
pub fn scaled_sizes(cv: &CountVector, pad: usize) -> ScaledSizeSeq {
    let n = cv.n as f64;
    let mut values: Vec<f64> = cv.sizes().into_iter().map(|s| s as f64 / n).collect();
    if values.len() < pad {
        values.resize(pad, 0.0);
    }
    ScaledSizeSeq { values }
}

/// Default guard on the structure size.
pub const STRUCTURE_SIZE_LIMIT: u128 = 10_000;

/// Sequential-conditioning sampler for one `(family, n)`.
#[derive(Debug, Clone)]
pub struct StructureSampler {
    n: usize,
    /// `ln omega_i(c)` for `c = 0..=n/i`, indexed by `i`
    log_weights: Vec<Vec<f64>>,
    /// `ln P_i(w)` for `0 <= i <= w <= n`, row `w` at offset `w (w + 1) / 2`
    log_table: Vec<f64>,
}

/// `ln binom(m + c - 1, c)` (multisets) or `ln binom(m, c)` (selections) for
/// `c = 0..=c_max`; accurate for astronomically large `m`.
fn log_binomials(m: &BigUint, c_max: usize, with_repetition: bool, ln_fact: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(c_max + 1);
    out.push(0.0);
    if m.is_zero() {
        out.resize(c_max + 1, f64::NEG_INFINITY);
        return out;
    }
    let ln_m = ln_biguint(m);
    let small_m = if ln_m < 40.0 { Some(m.iter_u64_digits().next().unwrap_or(0)) } else { None };
    let mut acc = 0.0;
    for c in 1..=c_max {
        let t = (c - 1) as f64;
        let factor = if with_repetition {
            ln_m + (t * (-ln_m).exp()).ln_1p()
        } else {
            if let Some(ms) = small_m {
                if (c as u64) > ms {
                    out.resize(c_max + 1, f64::NEG_INFINITY);
                    return out;
                }
            }
            ln_m + (-t * (-ln_m).exp()).ln_1p()
        };
        acc += factor;
        out.push(acc - ln_fact[c]);
    }
    out
}

impl StructureSampler {
    pub fn new(family: &FamilySpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("structure size must be at least 1"));
        }
        check_guard(format!("sampling structures of size {n}"), n as u128, STRUCTURE_SIZE_LIMIT)?;
        let m = family.m_prefix(n)?;
        let ln_phi = family.phi_f64().ln();
        let ln_fact = ln_factorials(n);
        let mut log_weights = vec![Vec::new(); n + 1];
        for i in 1..=n {
            let c_max = n / i;
            log_weights[i] = match family.kind() {
                Construction::Assembly => {
                    let per = ln_phi + ln_biguint(&m[i]) - ln_fact[i];
                    (0..=c_max)
                        .map(|c| if c == 0 { 0.0 } else { c as f64 * per - ln_fact[c] })
                        .collect()
                }
                kind => {
                    let binoms = log_binomials(&m[i], c_max, kind == Construction::Multiset, &ln_fact);
                    binoms.into_iter().enumerate().map(|(c, b)| b + c as f64 * ln_phi).collect()
                }
            };
        }
        let mut log_table = vec![f64::NEG_INFINITY; (n + 1) * (n + 2) / 2];
        let at = |w: usize, i: usize| w * (w + 1) / 2 + i.min(w);
        log_table[0] = 0.0;
        for w in 1..=n {
            // P_0(w) = 0 for w > 0; P_i(w) for i >= 1
            for i in 1..=w {
                let mut acc = f64::NEG_INFINITY;
                for (c, &lw) in log_weights[i].iter().enumerate().take(w / i + 1) {
                    if lw == f64::NEG_INFINITY {
                        continue;
                    }
                    let rest = w - c * i;
                    let prev = log_table[at(rest, i - 1)];
                    acc = log_add_exp(acc, lw + prev);
                }
                log_table[at(w, i)] = acc;
            }
        }
        if log_table[at(n, n)] == f64::NEG_INFINITY {
            return Err(Error::domain(format!("{} has no structures of size {n}", family.full_name())));
        }
        Ok(StructureSampler { n, log_weights, log_table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn log_p(&self, i: usize, w: usize) -> f64 {
        self.log_table[w * (w + 1) / 2 + i.min(w)]
    }

    /// `ln q_phi(n)` (ordinary) or `ln (q_phi(n)/n!)` (assemblies).
    pub fn log_normalizer(&self) -> f64 {
        self.log_p(self.n, self.n)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CountVector {
        let mut counts = vec![0u32; self.n];
        let mut w = self.n;
        for i in (1..=self.n).rev() {
            if i > w {
                continue;
            }
            if w == 0 {
                break;
            }
            let total = self.log_p(i, w);
            let u: f64 = rng.random();
            let mut cumulative = 0.0;
            let mut chosen = None;
            let mut last_feasible = 0;
            for (c, &lw) in self.log_weights[i].iter().enumerate().take(w / i + 1) {
                let prev = self.log_p(i - 1, w - c * i);
                if lw == f64::NEG_INFINITY || prev == f64::NEG_INFINITY {
                    continue;
                }
                last_feasible = c;
                cumulative += (lw + prev - total).exp();
                if u < cumulative {
                    chosen = Some(c);
                    break;
                }
            }
            // rounding can leave the cumulative sum a hair below u
            let c = chosen.unwrap_or(last_feasible);
            counts[i - 1] = c as u32;
            w -= c * i;
        }
        debug_assert_eq!(w, 0);
        let cv = CountVector { n: self.n, counts };
        assert_eq!(
            cv.counts.iter().enumerate().map(|(i, &c)| (i + 1) * c as usize).sum::<usize>(),
            self.n,
            "sampled profile has the wrong weight"
        );
        cv
    }

    /// `count` structures; replicate `r` uses stream `r` of `seed`.
    pub fn sample_replicates(&self, seed: u64, count: usize) -> Vec<CountVector> {
        (0..count as u64).into_par_iter().map(|r| self.sample(&mut stream_rng(seed, r))).collect()
    }
}

/// One tilted structure of size `n`.
pub fn sample_structure(family: &FamilySpec, n: usize, seed: u64) -> Result<CountVector> {
    Ok(StructureSampler::new(family, n)?.sample(&mut stream_rng(seed, 0)))
}

/// Default guard on the integer range for factorization.
pub const FACTORIZATION_LIMIT: u128 = 1_000_000_000;

/// Primes up to `limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for p in 2..=limit {
        if composite[p] {
            continue;
        }
        primes.push(p as u64);
        let mut q = p * p;
        while q <= limit {
            composite[q] = true;
            q += p;
        }
    }
    primes
}

/// Uniform integers in `[1, n]` and their prime factorizations.
#[derive(Debug, Clone)]
pub struct PrimeFactorSampler {
    n: u64,
    primes: Vec<u64>,
}

impl PrimeFactorSampler {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("n must be at least 2, got {n}")));
        }
        check_guard(format!("factorizing integers up to {n}"), n as u128, FACTORIZATION_LIMIT)?;
        Ok(PrimeFactorSampler { n, primes: primes_up_to(n.sqrt()) })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Prime factors of `x <= n` with multiplicity, non-increasing.
    pub fn factor(&self, mut x: u64) -> Vec<u64> {
        let mut out = Vec::new();
        for &p in &self.primes {
            if p * p > x {
                break;
            }
            while x % p == 0 {
                out.push(p);
                x /= p;
            }
        }
        if x > 1 {
            out.push(x);
        }
        out.reverse();
        out
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(1..=self.n)
    }

    /// `log p / log n` over the prime factors of `x`, padded.
    pub fn scaled(&self, x: u64, pad: usize) -> ScaledSizeSeq {
        let ln_n = (self.n as f64).ln();
        let mut values: Vec<f64> = self.factor(x).into_iter().map(|p| (p as f64).ln() / ln_n).collect();
        if values.len() < pad {
            values.resize(pad, 0.0);
        }
        ScaledSizeSeq { values }
    }

    pub fn sample<R: Rng + ?Sized>(&self, pad: usize, rng: &mut R) -> ScaledSizeSeq {
        let x = self.draw(rng);
        self.scaled(x, pad)
    }

    pub fn sample_replicates(&self, pad: usize, seed: u64, count: usize) -> Vec<ScaledSizeSeq> {
        (0..count as u64).into_par_iter().map(|r| self.sample(pad, &mut stream_rng(seed, r))).collect()
    }
}

/// Scaled prime factors of one uniform integer in `[1, n]`.
pub fn sample_prime_factors(n: u64, seed: u64, pad: usize) -> Result<ScaledSizeSeq> {
    Ok(PrimeFactorSampler::new(n)?.sample(pad, &mut stream_rng(seed, 0)))
}

/// CSV rows `replicate,L_1,...,L_k`.
pub fn write_scaled_csv<W: Write>(out: W, samples: &[ScaledSizeSeq], k: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["replicate".to_string()];
    header.extend((1..=k).map(|i| format!("L_{i}")));
    w.write_record(&header)?;
    for (r, s) in samples.iter().enumerate() {
        let mut row = vec![r.to_string()];
        row.extend((1..=k).map(|i| format!("{:.11e}", s.get(i))));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Sparse CSV rows `replicate,i,C_i` for the nonzero counts.
pub fn write_counts_csv<W: Write>(out: W, samples: &[CountVector]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replicate", "i", "C_i"])?;
    for (r, cv) in samples.iter().enumerate() {
        for (i, &c) in cv.counts.iter().enumerate() {
            if c > 0 {
                w.write_record([r.to_string(), (i + 1).to_string(), c.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::builtin_family;
    use crate::numeric::ln_rational_abs;
    use crate::series::family_series;
    use num_rational::BigRational;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn count_vector_validation() {
        assert!(CountVector::new(8, vec![0, 1, 2]).is_ok());
        assert!(CountVector::new(8, vec![0, 1, 1]).is_err());
        let cv = CountVector::new(8, vec![0, 1, 2]).unwrap();
        assert_eq!(cv.sizes(), vec![3, 3, 2]);
        assert_eq!(scaled_sizes(&cv, 4).values(), &[0.375, 0.375, 0.25, 0.0]);
        let single = CountVector::new(5, vec![0, 0, 0, 0, 1]).unwrap();
        assert_eq!(scaled_sizes(&single, 3).values(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn normalizers_match_exact_series() {
        for (name, phi) in [
            ("permutation", r(1, 1)),
            ("permutation", r(5, 2)),
            ("polynomial-multiset-F2", r(3, 2)),
            ("polynomial-selection-F3", r(4, 1)),
        ] {
            let fam = builtin_family(name, phi).unwrap();
            for n in [1usize, 7, 60] {
                let s = StructureSampler::new(&fam, n).unwrap();
                let exact = ln_rational_abs(family_series(&fam, n).unwrap().coeff(n));
                assert!((s.log_normalizer() - exact).abs() < 1e-10 * exact.abs().max(1.0), "{name} n={n}");
            }
        }
    }

    #[test]
    fn size_one_is_deterministic() {
        let fam = builtin_family("polynomial-selection-F2", r(1, 1)).unwrap();
        let cv = sample_structure(&fam, 1, 3).unwrap();
        assert_eq!(cv.counts(), &[1]);
    }

    #[test]
    fn samples_have_correct_weight_and_repeat() {
        let fam = builtin_family("polynomial-multiset-F2", r(1, 1)).unwrap();
        let s = StructureSampler::new(&fam, 40).unwrap();
        let a = s.sample_replicates(11, 200);
        let b = s.sample_replicates(11, 200);
        assert_eq!(a, b);
        for cv in &a {
            assert!((scaled_sizes(cv, 1).total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn structure_guard() {
        let perm = builtin_family("permutation", r(1, 1)).unwrap();
        assert!(matches!(StructureSampler::new(&perm, 20_000), Err(Error::Guard { .. })));
    }

    #[test]
    fn factorization() {
        let s = PrimeFactorSampler::new(100).unwrap();
        assert_eq!(s.factor(12), vec![3, 2, 2]);
        assert_eq!(s.factor(97), vec![97]);
        assert!(s.factor(1).is_empty());
        let seq = s.scaled(12, 4);
        let ln100 = 100f64.ln();
        assert_eq!(seq.values(), &[3f64.ln() / ln100, 2f64.ln() / ln100, 2f64.ln() / ln100, 0.0]);
        assert!((seq.total() - 12f64.ln() / ln100).abs() < 1e-15);
        assert!(PrimeFactorSampler::new(1).is_err());
        assert!(matches!(PrimeFactorSampler::new(10_000_000_000), Err(Error::Guard { .. })));
        let big = PrimeFactorSampler::new(1_000_000_000).unwrap();
        assert_eq!(big.factor(999_999_937), vec![999_999_937]);
        assert_eq!(big.factor(1_000_000_000).len(), 18);
    }

    #[test]
    fn primes() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(primes_up_to(1).is_empty());
    }
}
