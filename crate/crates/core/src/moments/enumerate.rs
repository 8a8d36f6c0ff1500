//! Exhaustive enumeration oracles. Structures are generated one by one and
//! grouped by their count profile `(C_1, ..., C_n)`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{check_guard, Error, Result};
use crate::families::{Construction, FamilySpec};
use crate::numeric::rational_to_f64;
use crate::series::family_series;

use super::validate_indices;

/// Bell(10) set partitions: the default assembly enumeration limit.
const ASSEMBLY_LIMIT: u128 = 115_975;
/// Structures times profile length for multisets and selections.
const UNIVERSE_LIMIT: u128 = 5_000_000;

/// Exact tilted distribution of the count profile at size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileDistribution {
    pub n: usize,
    /// `(C_1..C_n, number of structures with this profile times phi^K)`, sorted by profile.
    pub profiles: Vec<(Vec<u32>, BigRational)>,
    pub total: BigRational,
}

impl ProfileDistribution {
    pub fn probabilities(&self) -> Vec<(Vec<u32>, f64)> {
        self.profiles.iter().map(|(c, w)| (c.clone(), rational_to_f64(&(w / &self.total)))).collect()
    }

    pub fn moment(&self, indices: &[usize]) -> BigRational {
        let mut acc = BigRational::zero();
        for (counts, w) in &self.profiles {
            let prod: u64 = indices.iter().map(|&i| counts[i - 1] as u64).product();
            if prod != 0 {
                acc += w * BigRational::from_integer(prod.into());
            }
        }
        acc / &self.total
    }
}

fn bell(n: usize) -> u128 {
    // Bell triangle
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("non-empty row"));
        for &v in &row {
            let last = *next.last().expect("non-empty row");
            next.push(last.saturating_add(v));
        }
        row = next;
    }
    row[0]
}

/// Enumerates every structure of size `n` (subject to the size guards).
pub fn enumerate_profiles(family: &FamilySpec, n: usize) -> Result<ProfileDistribution> {
    if n == 0 {
        return Err(Error::domain("total size must be at least 1"));
    }
    let m = family.m_prefix(n)?;
    let grouped: BTreeMap<Vec<u32>, BigUint> = match family.kind() {
        Construction::Assembly => {
            check_guard(format!("enumerating set partitions of {n}"), bell(n), ASSEMBLY_LIMIT)?;
            let partitions = set_partition_profiles(n);
            partitions
                .into_iter()
                .map(|(counts, number)| {
                    let mut weight = BigUint::from(number);
                    for (i, &c) in counts.iter().enumerate() {
                        weight *= num_traits::pow(m[i + 1].clone(), c as usize);
                    }
                    (counts, weight)
                })
                .collect()
        }
        kind @ (Construction::Multiset | Construction::Selection) => {
            let unit = FamilySpec::custom(kind, family.m().clone(), BigRational::one())?;
            let structures = family_series(&unit, n)?.count(n).to_integer().to_u128().unwrap_or(u128::MAX);
            let kinds: u128 = m[..=n].iter().map(|v| v.to_u128().unwrap_or(u128::MAX)).fold(0u128, u128::saturating_add);
            let estimate = structures.saturating_mul(n as u128).saturating_add(kinds);
            check_guard(format!("enumerating {} of weight {n}", kind.name()), estimate, UNIVERSE_LIMIT)?;
            let sizes: Vec<usize> = (1..=n)
                .flat_map(|i| std::iter::repeat(i).take(m[i].to_usize().unwrap_or(0)))
                .collect();
            let mut out = BTreeMap::new();
            let mut counts = vec![0u32; n];
            universe_dfs(&sizes, kind == Construction::Selection, 0, n, &mut counts, &mut out);
            out.into_iter().map(|(c, number)| (c, BigUint::from(number))).collect()
        }
    };
    let phi = family.phi();
    let mut total = BigRational::zero();
    let profiles: Vec<(Vec<u32>, BigRational)> = grouped
        .into_iter()
        .map(|(counts, number)| {
            let k: u32 = counts.iter().sum();
            let w = BigRational::from_integer(BigInt::from(number)) * num_traits::pow(phi.clone(), k as usize);
            total += &w;
            (counts, w)
        })
        .collect();
    if profiles.is_empty() {
        return Err(Error::domain(format!("no structures of size {n}")));
    }
    Ok(ProfileDistribution { n, profiles, total })
}

/// Set partitions of `[n]` via restricted growth strings, grouped by block-size profile.
fn set_partition_profiles(n: usize) -> BTreeMap<Vec<u32>, u64> {
    fn visit(pos: usize, n: usize, blocks: &mut Vec<usize>, out: &mut BTreeMap<Vec<u32>, u64>) {
        if pos == n {
            let mut counts = vec![0u32; n];
            for &size in blocks.iter() {
                counts[size - 1] += 1;
            }
            *out.entry(counts).or_insert(0) += 1;
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] += 1;
            visit(pos + 1, n, blocks, out);
            blocks[b] -= 1;
        }
        blocks.push(1);
        visit(pos + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = BTreeMap::new();
    visit(0, n, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Multisets (or sets) of distinct irreducible kinds with the given weights,
/// generated as non-decreasing (strictly increasing) kind sequences.
fn universe_dfs(
    sizes: &[usize],
    distinct: bool,
    start: usize,
    remaining: usize,
    counts: &mut Vec<u32>,
    out: &mut BTreeMap<Vec<u32>, u64>,
) {
    if remaining == 0 {
        *out.entry(counts.clone()).or_insert(0) += 1;
        return;
    }
    for kind in start..sizes.len() {
        let size = sizes[kind];
        if size > remaining {
            break;
        }
        counts[size - 1] += 1;
        let next = if distinct { kind + 1 } else { kind };
        universe_dfs(sizes, distinct, next, remaining - size, counts, out);
        counts[size - 1] -= 1;
    }
}

/// Moment by exhaustive enumeration: the `phi^K`-weighted average of
/// `C_{i_1} ... C_{i_k}` over all structures of size `n`.
pub fn brute_force_moment(family: &FamilySpec, n: usize, indices: &[usize]) -> Result<BigRational> {
    validate_indices(n, indices)?;
    Ok(enumerate_profiles(family, n)?.moment(indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin_family, MSequence};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn bell_numbers() {
        let b: Vec<u128> = (0..8).map(bell).collect();
        assert_eq!(b, vec![1, 1, 2, 5, 15, 52, 203, 877]);
        assert_eq!(bell(10), ASSEMBLY_LIMIT);
    }

    #[test]
    fn permutations_of_six() {
        let perm = builtin_family("permutation", r(1, 1)).unwrap();
        assert_eq!(brute_force_moment(&perm, 6, &[2, 3]).unwrap(), r(1, 6));
        assert_eq!(brute_force_moment(&perm, 6, &[2, 5]).unwrap(), r(0, 1));
        let dist = enumerate_profiles(&perm, 6).unwrap();
        assert_eq!(dist.total, r(720, 1));
        assert_eq!(dist.profiles.len(), 11);
    }

    #[test]
    fn ewens_two_at_six() {
        let ewens = builtin_family("permutation", r(2, 1)).unwrap();
        assert_eq!(brute_force_moment(&ewens, 6, &[1, 2]).unwrap(), r(8, 7));
    }

    #[test]
    fn small_universes() {
        let m = MSequence::explicit(vec![2u32.into(), 1u32.into(), 0u32.into(), 0u32.into()]);
        let ms = FamilySpec::custom(Construction::Multiset, m.clone(), r(1, 1)).unwrap();
        let dist = enumerate_profiles(&ms, 4).unwrap();
        assert_eq!(dist.total, r(9, 1));
        let sel = FamilySpec::custom(Construction::Selection, m, r(1, 1)).unwrap();
        assert_eq!(enumerate_profiles(&sel, 3).unwrap().total, r(2, 1));
        // subsets of {a, b, c} with weight 3: {a, c}, {b, c}
        assert_eq!(brute_force_moment(&sel, 3, &[1, 2]).unwrap(), r(1, 1));
    }

    #[test]
    fn f2_profiles_at_eight() {
        let fam = builtin_family("polynomial-multiset-F2", r(1, 1)).unwrap();
        let dist = enumerate_profiles(&fam, 8).unwrap();
        assert_eq!(dist.total, r(256, 1));
        assert_eq!(dist.profiles.len(), 22);
        let sq = builtin_family("polynomial-selection-F2", r(1, 1)).unwrap();
        assert_eq!(enumerate_profiles(&sq, 6).unwrap().total, r(32, 1));
    }

    #[test]
    fn guard_refuses_large_requests() {
        let perm = builtin_family("permutation", r(1, 1)).unwrap();
        match enumerate_profiles(&perm, 11) {
            Err(Error::Guard { estimated, .. }) => assert_eq!(estimated, 678_570),
            other => panic!("expected guard refusal, got {other:?}"),
        }
        let fam = builtin_family("polynomial-multiset-F3", r(1, 1)).unwrap();
        assert!(matches!(enumerate_profiles(&fam, 20), Err(Error::Guard { .. })));
    }
}
