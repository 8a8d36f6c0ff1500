//! Exact coefficients against the singularity-analysis predictions.

use num_bigint::BigInt;
use num_rational::BigRational;
use pd_limits::families::{builtin_family, necklace_counts};
use pd_limits::numeric::{parse_rational, rational_to_f64};
use pd_limits::series::{family_series, predict_coeff_g, FsPredictor, SingularData};

fn main() -> pd_limits::error::Result<()> {
    let sizes = [10, 25, 50, 100, 200, 400];

    let m = necklace_counts(2, 400)?;
    let sd = SingularData::new(0.5, 1.0, 0.0, 1.0)?;
    let ratios: Vec<String> = sizes
        .iter()
        .map(|&n| {
            let exact = rational_to_f64(&BigRational::from_integer(BigInt::from(m[n].clone())));
            format!("{n}: {:.6}", exact / predict_coeff_g(&sd, n))
        })
        .collect();
    println!("irreducible polynomials over F_2, m_n / (2^n / n)\n  {}", ratios.join("  "));

    for (name, phi) in [
        ("permutation", "1"),
        ("permutation", "5/2"),
        ("polynomial-multiset-F2", "1"),
        ("polynomial-multiset-F2", "1/2"),
        ("polynomial-selection-F2", "1"),
        ("polynomial-selection-F2", "3"),
    ] {
        let family = builtin_family(name, parse_rational(phi)?)?;
        let predictor = FsPredictor::for_family(&family)?;
        let series = family_series(&family, *sizes.last().unwrap())?;
        let c = predictor.constant();
        println!("{name}, phi = {phi}: C = {:.10} ({} terms, tail < {:.0e})", c.value, c.terms, c.tail_bound);
        let ratios: Vec<String> =
            sizes.iter().map(|&n| format!("{n}: {:.6}", predictor.compare(n, series.coeff(n)).ratio)).collect();
        println!("  exact / predicted  {}", ratios.join("  "));
    }
    Ok(())
}
