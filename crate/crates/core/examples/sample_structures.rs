//! Exact sampling of tilted structures and prime factorizations.

use num_rational::BigRational;
use pd_limits::families::builtin_family;
use pd_limits::numeric::{parse_rational, stream_rng};
use pd_limits::samplers::{scaled_sizes, PrimeFactorSampler, StructureSampler};
use pd_limits::stats::sample_moment;

fn main() -> pd_limits::error::Result<()> {
    let mut rng = stream_rng(2024, 0);
    for (name, phi, n) in [("permutation", "1", 30), ("polynomial-multiset-F2", "1", 30), ("polynomial-selection-F3", "4", 30)] {
        let family = builtin_family(name, parse_rational(phi)?)?;
        let sampler = StructureSampler::new(&family, n)?;
        let cv = sampler.sample(&mut rng);
        let sizes: Vec<String> = cv.sizes().iter().map(|s| s.to_string()).collect();
        let scaled = scaled_sizes(&cv, 3);
        println!("{name} (phi = {phi}), n = {n}: components {} -> L = {:.3?}", sizes.join("+"), scaled.values());
    }

    let perm = builtin_family("permutation", BigRational::from_integer(1.into()))?;
    let samples = StructureSampler::new(&perm, 50)?.sample_replicates(7, 20_000);
    let (mean, se) = sample_moment(&samples, &[2]);
    println!("\npermutations, n = 50, 20000 draws: E C_2 = {mean:.4} +- {se:.4} (exact 1/2)");

    let primes = PrimeFactorSampler::new(1_000_000)?;
    let mut rng = stream_rng(2024, 1);
    for _ in 0..5 {
        let x = primes.draw(&mut rng);
        let s = primes.scaled(x, 3);
        println!("N = {x:>7} = {:?}: L = {:.3?}, sum {:.3}", primes.factor(x), s.values(), s.total());
    }
    Ok(())
}
