//! Exact mixed moments of component counts, checked against enumeration and
//! compared with the master right-hand side.

use num_rational::BigRational;
use pd_limits::families::builtin_family;
use pd_limits::moments::{brute_force_moment, FloatMomentEngine, MomentEngine};
use pd_limits::numeric::parse_rational;

fn main() -> pd_limits::error::Result<()> {
    let one = BigRational::from_integer(1.into());
    let perm = MomentEngine::new(&builtin_family("permutation", one.clone())?, 100)?;
    println!("permutations, n = 100: E C_3 C_7 = {}", perm.moment(&[3, 7])?);

    for (name, phi, n, indices) in [
        ("permutation", "2", 7, vec![1, 2]),
        ("polynomial-multiset-F2", "1", 8, vec![5]),
        ("polynomial-selection-F2", "3", 9, vec![1, 3]),
        ("polynomial-multiset-F3", "1/2", 6, vec![1, 2, 3]),
    ] {
        let family = builtin_family(name, parse_rational(phi)?)?;
        let formula = MomentEngine::new(&family, n)?.moment(&indices)?;
        let enumerated = brute_force_moment(&family, n, &indices)?;
        println!("{name}, phi = {phi}, n = {n}, {indices:?}: {formula} (enumeration {enumerated})");
    }

    println!("\nEwens(theta) at n = 5000, indices (1000, 1750): exact / master right-hand side");
    for phi in ["1/2", "1", "2", "5"] {
        let family = builtin_family("permutation", parse_rational(phi)?)?;
        let r = FloatMomentEngine::new(&family, 5000)?.record(&[1000, 1750])?;
        println!("  theta = {phi:>3}: ratio {:.6} (relative error {:.1e})", r.ratio.unwrap_or(f64::NAN), r.relative_error);
    }

    let f2 = MomentEngine::new(&builtin_family("polynomial-selection-F2", one)?, 200)?;
    for indices in [[40, 60], [45, 90]] {
        let eps = f2.leading_term_dominance(&indices)?.unwrap_or(0.0);
        println!("squarefree F_2, n = 200, {indices:?}: non-leading / leading = {eps:.3e}");
    }
    Ok(())
}
