//! Prime factors of uniform integers: Mertens sums over [n^a, n^b] and the
//! largest prime factor against Dickman's rho.

use pd_limits::intensity::{prime_bounds, IntervalFamily};
use pd_limits::samplers::{primes_up_to, PrimeFactorSampler};

fn main() -> pd_limits::error::Result<()> {
    let intervals = IntervalFamily::parse("0.2:0.5")?;
    let target = 2.5f64.ln();
    let primes = primes_up_to(10_000_000);
    println!("sum of 1/p over n^0.2 < p <= n^0.5 against log 2.5 = {target:.5}");
    for exp in [6, 8, 10, 12, 14] {
        let n = 10u64.pow(exp);
        let (lo, hi) = prime_bounds(n, &intervals)[0];
        let sum: f64 = primes.iter().filter(|&&p| p > lo && p <= hi).map(|&p| 1.0 / p as f64).sum();
        println!("  n = 1e{exp:<2}: primes in ({lo}, {hi}]  sum {sum:.5}  ({:+.2}%)", 100.0 * (sum / target - 1.0));
    }

    let rho2 = 1.0 - 2f64.ln();
    for n in [10_000u64, 1_000_000, 100_000_000] {
        let sampler = PrimeFactorSampler::new(n)?;
        let samples = sampler.sample_replicates(1, 5, 50_000);
        let below = samples.iter().filter(|s| s.get(1) <= 0.5).count() as f64 / samples.len() as f64;
        println!("n = {n:>9}: Pr(L_1 <= 1/2) = {below:.4} (rho(2) = {rho2:.4})");
    }
    Ok(())
}
