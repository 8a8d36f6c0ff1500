//! Monte Carlo and asymptotic checks against independent oracles.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use pd_limits::families::{builtin_family, necklace_counts, Construction, FamilySpec, MSequence};
use pd_limits::intensity::{exact_intensity, mc_intensity, pd_intensity, IntensitySource, IntervalFamily};
use pd_limits::moments::{FloatMomentEngine, MomentEngine};
use pd_limits::pd::{sample_pd_replicates, solve_dickman, PdParams, StickBreaking};
use pd_limits::samplers::{StructureSampler, ScaledSizeSeq};
use pd_limits::series::{
    assembly_series, family_series, multiset_constant, multiset_series, predict_coeff_g, selection_series,
    FsPredictor, SingularData,
};
use pd_limits::stats::{joint_cdf_check, mean_and_std_error, sample_moment, LargestPartCdf};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

fn binom(n: &BigUint, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..k {
        acc = acc * BigRational::from_integer((n + BigUint::from(j)).into()) / BigRational::from_integer((j + 1).into());
    }
    acc
}

fn binom_down(n: &BigUint, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..k {
        if *n < BigUint::from(j + 1) {
            return BigRational::zero();
        }
        acc = acc * BigRational::from_integer((n - BigUint::from(j)).into()) / BigRational::from_integer((j + 1).into());
    }
    acc
}

fn mul_trunc(a: &[BigRational], b: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n + 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `prod_i (sum_c weight(i, c) x^(i c))` truncated at degree `n`.
fn product_expansion(n: usize, weight: impl Fn(usize, usize) -> BigRational) -> Vec<BigRational> {
    let mut acc = vec![BigRational::zero(); n + 1];
    acc[0] = BigRational::one();
    for i in 1..=n {
        let mut factor = vec![BigRational::zero(); n + 1];
        for c in 0..=n / i {
            factor[i * c] = weight(i, c);
        }
        acc = mul_trunc(&acc, &factor, n);
    }
    acc
}

/// `exp(phi sum m_i x^i / i!)` as `sum_k (phi M)^k / k!`, truncated at degree `n`.
fn exp_expansion(m: &[BigUint], phi: &BigRational, n: usize) -> Vec<BigRational> {
    let mut factorial = BigRational::one();
    let mut base = vec![BigRational::zero(); n + 1];
    for i in 1..=n {
        factorial *= BigRational::from_integer(i.into());
        base[i] = phi * BigRational::from_integer(m[i].clone().into()) / &factorial;
    }
    let mut out = vec![BigRational::zero(); n + 1];
    let mut power = out.clone();
    power[0] = BigRational::one();
    let mut k_fact = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            power = mul_trunc(&power, &base, n);
            k_fact *= BigRational::from_integer(k.into());
        }
        for d in 0..=n {
            out[d] += &power[d] / &k_fact;
        }
    }
    out
}

fn sample_sets(n: usize) -> Vec<Vec<BigUint>> {
    let mut factorials = vec![BigUint::zero(), BigUint::one()];
    for i in 2..=n {
        let next = &factorials[i - 1] * BigUint::from(i - 1);
        factorials.push(next);
    }
    let mut explicit = vec![BigUint::zero()];
    explicit.extend((1..=n).map(|i| BigUint::from((i * 7 + 3) % 5)));
    vec![necklace_counts(2, n).unwrap(), necklace_counts(3, n).unwrap(), factorials, explicit]
}

#[test]
fn recurrences_equal_direct_expansion() {
    let n = 30;
    for phi in [rat(1, 1), rat(1, 2), rat(3, 1), rat(2, 3)] {
        for m in sample_sets(n) {
            let phi_pow = |c: usize| (0..c).fold(BigRational::one(), |acc, _| acc * &phi);
            let multiset = product_expansion(n, |i, c| binom(&m[i], c) * phi_pow(c));
            assert_eq!(multiset_series(&m, &phi, n).unwrap().coeffs(), &multiset[..]);
            let selection = product_expansion(n, |i, c| binom_down(&m[i], c) * phi_pow(c));
            assert_eq!(selection_series(&m, &phi, n).unwrap().coeffs(), &selection[..]);
            let assembly = exp_expansion(&m, &phi, n);
            assert_eq!(assembly_series(&m, &phi, n).unwrap().coeffs(), &assembly[..]);
        }
    }
}

#[test]
fn stick_breaking_largest_part_law() {
    let samples = sample_pd_replicates(PdParams::new(1.0).unwrap(), 1, 77, 1_000_000).unwrap();
    let x1: Vec<f64> = samples.iter().map(|s| s.parts[0]).collect();
    let rho = solve_dickman(1.0 / 0.01, 1e-3).unwrap();
    for t in [0.5, 0.6, 0.8] {
        let p = rho.eval(1.0 / t).unwrap();
        assert!((p - (1.0 + t.ln())).abs() < 1e-8);
        let hits = x1.iter().filter(|&&x| x <= t).count() as f64 / x1.len() as f64;
        let sigma = (p * (1.0 - p) / x1.len() as f64).sqrt();
        assert!((hits - p).abs() < 4.0 * sigma, "t = {t}: {hits} vs {p}");
    }
    // E X_1 = 1 - int_0^1 rho(1/t) dt, by Simpson's rule on [0.01, 1]
    let cells = 99_000;
    let h = 0.99 / cells as f64;
    let f = |t: f64| rho.eval(1.0 / t).unwrap();
    let mut integral = f(0.01) + f(1.0);
    for j in 1..cells {
        integral += f(0.01 + j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    let expected = 1.0 - integral * h / 3.0;
    assert!((expected - 0.6243).abs() < 1e-4, "{expected}");
    let (mean, se) = mean_and_std_error(&x1);
    assert!((mean - expected).abs() < 3.0 * se, "{mean} vs {expected} (se {se})");
}

#[test]
fn multiset_constant_tail_bound_holds() {
    let m = necklace_counts(2, 400).unwrap();
    for phi in [0.5, 1.0, 1.5, 1.9] {
        let c = multiset_constant(&m, phi, 0.5).unwrap();
        // the same series summed far past the truncation point
        let ln_m: Vec<f64> = m.iter().map(|x| x.to_f64().unwrap().ln()).collect();
        let term = |j: usize| {
            let ln_phi_j = j as f64 * phi.ln();
            (1..=400).map(|i| (ln_phi_j + ln_m[i] + (i * j) as f64 * 0.5f64.ln()).exp()).sum::<f64>() / j as f64
        };
        let oracle: f64 = (2..2000).map(term).sum();
        assert!((c.log_value - oracle).abs() <= c.tail_bound + 1e-13, "phi = {phi}: {} vs {oracle}, {c:?}", c.log_value);
        assert!(c.tail_bound < 1e-12);
    }
    assert!(multiset_constant(&m, 2.0, 0.5).is_err());
    assert!(multiset_constant(&m, 3.0, 0.5).is_err());
}

#[test]
fn irreducible_count_prediction_trends_to_one() {
    let sd = SingularData::new(0.5, 1.0, 0.0, 1.0).unwrap();
    assert!((predict_coeff_g(&sd, 20) - 52428.8).abs() < 1e-9);
    let m = necklace_counts(2, 1000).unwrap();
    assert_eq!(m[20], BigUint::from(52377u32));
    let gap = |n: usize| (to_f64(&BigRational::from_integer(m[n].clone().into())) / predict_coeff_g(&sd, n) - 1.0).abs();
    let sweep = [10, 20, 50, 100, 1000];
    for w in sweep.windows(2) {
        assert!(gap(w[1]) <= gap(w[0]), "n = {} vs {}", w[0], w[1]);
    }
}

#[test]
fn fs_ratios_stay_in_band_and_tighten() {
    for name in ["polynomial-multiset-F2", "polynomial-selection-F2", "permutation"] {
        let family = builtin_family(name, BigRational::one()).unwrap();
        let predictor = FsPredictor::for_family(&family).unwrap();
        let series = family_series(&family, 400).unwrap();
        let ratios: Vec<f64> =
            [50, 100, 200, 400].iter().map(|&n| predictor.compare(n, series.coeff(n)).ratio).collect();
        assert!((ratios[0] - 1.0).abs() <= 0.05, "{name}: {ratios:?}");
        assert!(ratios.iter().all(|r| (0.8..=1.25).contains(r)), "{name}: {ratios:?}");
        assert!((ratios[3] - 1.0).abs() <= (ratios[0] - 1.0).abs(), "{name}: {ratios:?}");
    }
}

#[test]
fn ewens_assembly_ratio_band() {
    let n: usize = 5000;
    let indices = [n.div_ceil(5), (7 * n).div_ceil(20)];
    for phi in [rat(1, 2), rat(1, 1), rat(2, 1)] {
        let family = builtin_family("permutation", phi.clone()).unwrap();
        let r = FloatMomentEngine::new(&family, n).unwrap().record(&indices).unwrap();
        assert!(r.relative_error < 1e-8, "phi = {phi}: {}", r.relative_error);
        let ratio = r.ratio.unwrap();
        assert!((ratio - 1.0).abs() <= 0.1, "phi = {phi}: ratio {ratio}");
    }
}

#[test]
fn leading_term_dominates_for_f2_families() {
    let n = 200;
    for name in ["polynomial-multiset-F2", "polynomial-selection-F2"] {
        let family = builtin_family(name, BigRational::one()).unwrap();
        let engine = MomentEngine::new(&family, n).unwrap();
        for indices in [vec![40], vec![40, 60], vec![45, 70], vec![40, 50, 60]] {
            let eps = engine.leading_term_dominance(&indices).unwrap().unwrap();
            // the h = 2 terms are smaller by about 2^-min(indices)
            assert!(eps < 1e-9, "{name} {indices:?}: {eps:e}");
        }
    }
}

#[test]
fn sampled_cycle_counts_match_exact_moments() {
    let family = builtin_family("permutation", BigRational::one()).unwrap();
    let sampler = StructureSampler::new(&family, 50).unwrap();
    let samples = sampler.sample_replicates(5, 10_000);
    let (mean, se) = sample_moment(&samples, &[2]);
    assert!((mean - 0.5).abs() < 4.0 * se, "{mean} ± {se}");

    let ewens = builtin_family("permutation", rat(2, 1)).unwrap();
    let engine = MomentEngine::new(&ewens, 60).unwrap();
    let sampler = StructureSampler::new(&ewens, 60).unwrap();
    let samples = sampler.sample_replicates(6, 20_000);
    for indices in [vec![1, 2], vec![3, 10], vec![5, 20]] {
        let exact = to_f64(&engine.moment(&indices).unwrap());
        let (mean, se) = sample_moment(&samples, &indices);
        assert!((mean - exact).abs() < 4.0 * se, "{indices:?}: {mean} ± {se} vs {exact}");
    }
}

#[test]
fn mc_intensity_agrees_with_exact_and_scales() {
    let intervals = IntervalFamily::parse("0.1:0.2,0.3:0.4").unwrap();
    let family = builtin_family("permutation", BigRational::one()).unwrap();
    let exact = to_f64(&exact_intensity(&family, 500, &intervals).unwrap());
    let sampler = StructureSampler::new(&family, 500).unwrap();
    let mc = mc_intensity(IntensitySource::Structures { sampler: &sampler, theta: 1.0 }, &intervals, 20_000, 8).unwrap();
    let se = mc.std_error.unwrap();
    assert!((mc.empirical - exact).abs() < 4.0 * se, "{} ± {se} vs {exact}", mc.empirical);

    let stick = || IntensitySource::PoissonDirichlet(StickBreaking::new(PdParams::new(1.5).unwrap()));
    let small = mc_intensity(stick(), &intervals, 20_000, 9).unwrap();
    let large = mc_intensity(stick(), &intervals, 40_000, 9).unwrap();
    let factor = small.std_error.unwrap() / large.std_error.unwrap();
    let root2 = 2f64.sqrt();
    assert!((factor - root2).abs() <= 0.1 * root2, "sigma ratio {factor}");
}

#[test]
fn pd_intensity_is_bracketed() {
    let intervals = IntervalFamily::parse("0.1:0.2,0.3:0.4").unwrap();
    for (theta, seed) in [(0.5, 11), (1.0, 12), (2.0, 13)] {
        let source = IntensitySource::PoissonDirichlet(StickBreaking::new(PdParams::new(theta).unwrap()));
        let r = mc_intensity(source, &intervals, 100_000, seed).unwrap();
        let se = r.std_error.unwrap();
        // the bound that holds for this side of theta = 1
        let (alpha, beta) = if theta <= 1.0 { (1.0 - theta, 0.0) } else { (0.0, 1.0 - theta) };
        let bound = intervals.rhs_theta(theta, alpha, beta);
        assert!(r.empirical >= bound - 4.0 * se, "theta {theta}: {} < {bound}", r.empirical);
        assert!(r.empirical >= r.rhs_theta_lo() - 4.0 * se && r.empirical <= r.rhs_theta_hi() + 4.0 * se);
        let exact = pd_intensity(theta, &intervals).unwrap();
        assert!((r.empirical - exact).abs() < 4.0 * se, "theta {theta}: {} vs {exact}", r.empirical);
    }
}

fn stick_sequences(theta: f64, k: usize, seed: u64, count: usize) -> Vec<ScaledSizeSeq> {
    sample_pd_replicates(PdParams::new(theta).unwrap(), k, seed, count)
        .unwrap()
        .into_iter()
        .map(|s| ScaledSizeSeq::new(s.parts, k).unwrap())
        .collect()
}

#[test]
fn joint_law_of_two_largest_parts() {
    let samples = stick_sequences(1.0, 2, 21, 100_000);
    let reference = LargestPartCdf::new(PdParams::new(1.0).unwrap()).unwrap();
    let grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0];
    let report = joint_cdf_check(&samples, &reference, 2, &grid).unwrap();
    assert!(report.max_deviation < 0.02, "{}", report.max_deviation);

    // boxes with x_2 > x_1 carry no mass on either side
    let at = |y1: f64, y2: f64| report.points.iter().find(|p| p.y == [y1, y2]).unwrap();
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i + 1..] {
            let (diag, above) = (at(a, a), at(a, b));
            assert_eq!(above.empirical, diag.empirical);
            assert!((above.theoretical - diag.theoretical).abs() < 1e-6, "({a}, {b})");
        }
    }
}

#[test]
fn uniform_generator_counts_partitions() {
    let family = FamilySpec::custom(Construction::Multiset, MSequence::uniform(1), BigRational::one()).unwrap();
    let series = family_series(&family, 30).unwrap();
    // prod (1 - x^i)^-1 counts integer partitions
    assert_eq!(series.count(30), BigRational::from_integer(5604.into()));
}
