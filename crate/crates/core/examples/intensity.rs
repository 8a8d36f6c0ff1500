//! Multi-intensity E prod |A_n cap I_j|: exact sums, Monte Carlo, and the
//! PD(theta) right-hand sides.

use num_rational::BigRational;
use pd_limits::families::builtin_family;
use pd_limits::intensity::{exact_report, mc_intensity, pd_intensity, IntensitySource, IntervalFamily};
use pd_limits::pd::{PdParams, StickBreaking};
use pd_limits::samplers::StructureSampler;

fn main() -> pd_limits::error::Result<()> {
    let intervals = IntervalFamily::parse("0.1:0.2,0.3:0.4")?;
    println!("intervals {}, log product {:.6}", intervals.describe(), intervals.log_product());
    let perm = builtin_family("permutation", BigRational::from_integer(1.into()))?;
    for n in [100, 500, 2000] {
        let r = exact_report(&perm, n, &intervals)?;
        println!("permutations, n = {n:>4}: exact {:.6}", r.empirical);
    }
    let sampler = StructureSampler::new(&perm, 2000)?;
    let mc = mc_intensity(IntensitySource::Structures { sampler: &sampler, theta: 1.0 }, &intervals, 20_000, 3)?;
    println!("permutations, n = 2000, 20000 draws: {:.5} +- {:.5}", mc.empirical, mc.std_error.unwrap_or(0.0));

    println!("\nPD(theta) stick-breaking, 100000 draws");
    for theta in [0.5, 1.0, 2.0, 4.0] {
        let source = IntensitySource::PoissonDirichlet(StickBreaking::new(PdParams::new(theta)?));
        let r = mc_intensity(source, &intervals, 100_000, 4)?;
        println!(
            "  theta = {theta}: {:.5} +- {:.5}, limit {:.5}, bounds [{:.5}, {:.5}]",
            r.empirical,
            r.std_error.unwrap_or(0.0),
            pd_intensity(theta, &intervals)?,
            r.rhs_theta_lo(),
            r.rhs_theta_hi()
        );
    }
    Ok(())
}
