//! Dickman's rho, g_theta, and the law of the largest PD(theta) part.

use pd_limits::numeric::EULER_MASCHERONI;
use pd_limits::pd::{solve_dickman, solve_gtheta, PdDistribution, PdParams};

fn main() -> pd_limits::error::Result<()> {
    let rho = solve_dickman(6.0, 1e-3)?;
    let g1 = solve_gtheta(PdParams::new(1.0)?, 6.0, 1e-3)?;
    println!("{:>4}  {:>14}  {:>14}", "t", "rho(t)", "e^g g_1(t)");
    for t in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0] {
        let scaled = EULER_MASCHERONI.exp() * g1.eval(t)?;
        println!("{t:>4.1}  {:>14.11}  {:>14.11}", rho.eval(t)?, scaled);
    }
    println!("1 - log 2 = {:.11}", 1.0 - 2f64.ln());

    println!("\nPr(X_1 <= t) for PD(theta)");
    println!("{:>5}  {:>9}  {:>9}  {:>9}", "t", "0.5", "1", "2");
    let laws: Vec<PdDistribution> =
        [0.5, 1.0, 2.0].iter().map(|&th| PdDistribution::new(PdParams::new(th)?, 12.0)).collect::<Result<_, _>>()?;
    for t in [0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0] {
        let row: Vec<String> =
            laws.iter().map(|d| d.largest_part_cdf(t).map(|v| format!("{v:9.6}"))).collect::<Result<_, _>>()?;
        println!("{t:>5.2}  {}", row.join("  "));
    }
    Ok(())
}
