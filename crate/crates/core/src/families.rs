//! Combinatorial families: the construction, the irreducible counts `m_i`, the
//! tilt `phi` and, for the built-in universes, the singularity data.
//!
//! Count sequences are indexed from 1: `m[i]` is `m_i` and `m[0]` is always 0.

use std::io::Read;
use std::path::Path;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{divisors, mobius, parse_rational, rational_string, rational_to_f64};
use crate::series::{estimate_lambda, Normalization, SingularData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Assembly,
    Multiset,
    Selection,
}

impl Construction {
    pub fn normalization(self) -> Normalization {
        match self {
            Construction::Assembly => Normalization::Exponential,
            Construction::Multiset | Construction::Selection => Normalization::Ordinary,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Construction::Assembly => "assembly",
            Construction::Multiset => "multiset",
            Construction::Selection => "selection",
        }
    }
}

impl std::str::FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assembly" => Ok(Construction::Assembly),
            "multiset" => Ok(Construction::Multiset),
            "selection" => Ok(Construction::Selection),
            other => Err(Error::Parse(format!("unknown construction {other:?}"))),
        }
    }
}

/// Irreducible counts `m_i = (1/i) sum_{d | i} mu(d) q^(i/d)` of monic
/// irreducible polynomials over `F_q`, for `i = 1..=n`.
pub fn necklace_counts(q: u64, n: usize) -> Result<Vec<BigUint>> {
    if q < 2 {
        return Err(Error::domain(format!("field size must be at least 2, got {q}")));
    }
    let qb = BigUint::from(q);
    let powers: Vec<BigUint> = std::iter::successors(Some(BigUint::one()), |p| Some(p * &qb)).take(n + 1).collect();
    let mut m = vec![BigUint::zero(); n + 1];
    for (i, slot) in m.iter_mut().enumerate().skip(1) {
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for d in divisors(i) {
            match mobius(d as u64) {
                1 => plus += &powers[i / d],
                -1 => minus += &powers[i / d],
                _ => {}
            }
        }
        *slot = (plus - minus) / BigUint::from(i);
    }
    Ok(m)
}

#[derive(Debug, Clone)]
enum Generator {
    /// `m_i = (i-1)!`
    Permutation,
    Necklace(u64),
    Uniform(BigUint),
    Explicit(Arc<Vec<BigUint>>),
}

/// Lazily extended, memoized irreducible-count sequence.
#[derive(Debug)]
pub struct MSequence {
    generator: Generator,
    cache: RwLock<Arc<Vec<BigUint>>>,
}

impl Clone for MSequence {
    fn clone(&self) -> Self {
        let cache = self.cache.read().expect("m cache poisoned").clone();
        MSequence { generator: self.generator.clone(), cache: RwLock::new(cache) }
    }
}

impl MSequence {
    fn with_generator(generator: Generator) -> Self {
        let initial = match &generator {
            Generator::Explicit(v) => v.clone(),
            _ => Arc::new(vec![BigUint::zero()]),
        };
        MSequence { generator, cache: RwLock::new(initial) }
    }

    pub fn permutation() -> Self {
        Self::with_generator(Generator::Permutation)
    }

    pub fn necklace(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::domain(format!("field size must be at least 2, got {q}")));
        }
        Ok(Self::with_generator(Generator::Necklace(q)))
    }

    pub fn uniform(c: u64) -> Self {
        Self::with_generator(Generator::Uniform(BigUint::from(c)))
    }

    /// A fixed finite sequence `m_1..m_N` (given without the leading zero).
    pub fn explicit(values: Vec<BigUint>) -> Self {
        let mut m = Vec::with_capacity(values.len() + 1);
        m.push(BigUint::zero());
        m.extend(values);
        Self::with_generator(Generator::Explicit(Arc::new(m)))
    }

    /// Reads `i,m_i` rows (header optional); indices must run 1, 2, ..., N.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Parse(format!("row {}: expected columns i,m_i", row + 1)));
            }
            let (i_text, m_text) = (&record[0], &record[1]);
            if row == 0 && i_text.parse::<i64>().is_err() {
                continue;
            }
            let i: usize = i_text.parse().map_err(|_| Error::Parse(format!("row {}: bad index {i_text:?}", row + 1)))?;
            if m_text.starts_with('-') {
                return Err(Error::domain(format!("m_{i} is negative")));
            }
            let m: BigUint = m_text.parse().map_err(|_| Error::Parse(format!("row {}: bad count {m_text:?}", row + 1)))?;
            if i != values.len() + 1 {
                return Err(Error::Parse(format!("row {}: expected index {}, got {i}", row + 1, values.len() + 1)));
            }
            values.push(m);
        }
        if values.is_empty() {
            return Err(Error::Parse("no m_i rows".into()));
        }
        Ok(Self::explicit(values))
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    /// Largest available index, `None` when unbounded.
    pub fn limit(&self) -> Option<usize> {
        match &self.generator {
            Generator::Explicit(v) => Some(v.len() - 1),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.generator {
            Generator::Permutation => "permutation".into(),
            Generator::Necklace(q) => format!("necklace-F{q}"),
            Generator::Uniform(c) => format!("uniform-{c}"),
            Generator::Explicit(v) => format!("explicit-{}", v.len() - 1),
        }
    }

    /// `m[0..=n]`, extending the memo as needed.
    pub fn prefix(&self, n: usize) -> Result<Arc<Vec<BigUint>>> {
        {
            let cached = self.cache.read().expect("m cache poisoned");
            if cached.len() > n {
                return Ok(cached.clone());
            }
        }
        let extended = match &self.generator {
            Generator::Explicit(v) => {
                return Err(Error::range(format!("m_i supplied up to i = {}, requested {n}", v.len() - 1)));
            }
            Generator::Permutation => {
                let mut m = vec![BigUint::zero(); n + 1];
                let mut fact = BigUint::one();
                for (i, slot) in m.iter_mut().enumerate().skip(1) {
                    *slot = fact.clone();
                    fact *= BigUint::from(i);
                }
                m
            }
            Generator::Necklace(q) => necklace_counts(*q, n)?,
            Generator::Uniform(c) => {
                let mut m = vec![c.clone(); n + 1];
                m[0] = BigUint::zero();
                m
            }
        };
        let extended = Arc::new(extended);
        let mut cache = self.cache.write().expect("m cache poisoned");
        if cache.len() <= n {
            *cache = extended;
        }
        Ok(cache.clone())
    }
}

/// A construction together with its counts, tilt and optional singular data.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    name: String,
    kind: Construction,
    m: Arc<MSequence>,
    phi: BigRational,
    singular: Option<SingularData>,
    field: Option<u64>,
    uniform: Option<u64>,
}

impl FamilySpec {
    pub fn new(
        name: impl Into<String>,
        kind: Construction,
        m: MSequence,
        phi: BigRational,
        singular: Option<SingularData>,
    ) -> Result<Self> {
        if phi <= BigRational::zero() {
            return Err(Error::domain(format!("phi must be positive, got {}", rational_string(&phi))));
        }
        if let Some(sd) = &singular {
            if kind == Construction::Multiset && sd.phi * sd.rho >= 1.0 {
                return Err(Error::domain(format!(
                    "multisets require phi < 1/rho (phi = {}, rho = {})",
                    sd.phi, sd.rho
                )));
            }
        }
        Ok(FamilySpec { name: name.into(), kind, m: Arc::new(m), phi, singular, field: None, uniform: None })
    }

    /// A family without singular data; asymptotic operations are unavailable.
    pub fn custom(kind: Construction, m: MSequence, phi: BigRational) -> Result<Self> {
        let name = format!("custom-{}", kind.name());
        Self::new(name, kind, m, phi, None)
    }

    /// `m_i = c` for every `i`, under any construction.
    pub fn uniform(kind: Construction, c: u64, phi: BigRational) -> Result<Self> {
        if c == 0 {
            return Err(Error::domain("uniform families need c >= 1"));
        }
        let mut family = Self::new(format!("uniform-{c}"), kind, MSequence::uniform(c), phi, None)?;
        family.uniform = Some(c);
        Ok(family)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Construction {
        self.kind
    }

    pub fn phi(&self) -> &BigRational {
        &self.phi
    }

    pub fn phi_f64(&self) -> f64 {
        rational_to_f64(&self.phi)
    }

    pub fn singular(&self) -> Option<&SingularData> {
        self.singular.as_ref()
    }

    pub fn m(&self) -> &MSequence {
        &self.m
    }

    /// `m[0..=n]`.
    pub fn m_prefix(&self, n: usize) -> Result<Arc<Vec<BigUint>>> {
        self.m.prefix(n)
    }

    /// Limiting Poisson–Dirichlet parameter `phi * theta`, when known.
    pub fn pd_theta(&self) -> Option<f64> {
        self.singular.as_ref().map(|sd| sd.phi * sd.theta)
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        FamilyDescriptor {
            kind: self.kind,
            phi: rational_string(&self.phi),
            source: if self.uniform.is_some() { "uniform".into() } else { self.name.clone() },
            q: self.field,
            c: self.uniform,
            path: None,
        }
    }
}

/// JSON form of a [`FamilySpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub kind: Construction,
    pub phi: String,
    /// A built-in name, `uniform` together with `c`, or `custom-csv` together with `path`.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    /// The constant of a `uniform` family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

pub fn family_from_descriptor(desc: &FamilyDescriptor) -> Result<FamilySpec> {
    let phi = parse_rational(&desc.phi)?;
    if desc.source == "custom-csv" {
        let path = desc
            .path
            .as_deref()
            .ok_or_else(|| Error::Parse("custom-csv descriptor needs a path".into()))?;
        return FamilySpec::custom(desc.kind, MSequence::from_csv_path(Path::new(path))?, phi);
    }
    if desc.source == "uniform" {
        let c = desc.c.ok_or_else(|| Error::Parse("uniform descriptor needs c".into()))?;
        return FamilySpec::uniform(desc.kind, c, phi);
    }
    let name = match (desc.source.as_str(), desc.q) {
        ("polynomial-multiset" | "polynomial-selection", Some(q)) => format!("{}-F{q}", desc.source),
        _ => desc.source.clone(),
    };
    let family = builtin_family(&name, phi)?;
    if family.kind != desc.kind {
        return Err(Error::domain(format!("{} is a {}, descriptor says {}", name, family.kind.name(), desc.kind.name())));
    }
    Ok(family)
}

/// Number of count terms used to estimate `lambda` for the polynomial families.
const LAMBDA_TERMS: usize = 256;

/// Built-in universes: `permutation` (Ewens when `phi != 1`),
/// `polynomial-multiset-F<q>` and `polynomial-selection-F<q>`.
pub fn builtin_family(name: &str, phi: BigRational) -> Result<FamilySpec> {
    let phi_f = rational_to_f64(&phi);
    if name == "permutation" {
        let sd = SingularData::new(1.0, 1.0, 0.0, phi_f)?;
        return FamilySpec::new(name, Construction::Assembly, MSequence::permutation(), phi, Some(sd));
    }
    let (kind, q_text) = if let Some(rest) = name.strip_prefix("polynomial-multiset-F") {
        (Construction::Multiset, rest)
    } else if let Some(rest) = name.strip_prefix("polynomial-selection-F") {
        (Construction::Selection, rest)
    } else if name == "custom-csv" {
        return Err(Error::domain("custom-csv families are built from a file; use a descriptor with a path"));
    } else {
        return Err(Error::domain(format!("unknown family {name:?}")));
    };
    let q: u64 = q_text
        .parse()
        .map_err(|_| Error::domain(format!("unknown family {name:?}: expected a field size after F")))?;
    let m = MSequence::necklace(q)?;
    if kind == Construction::Multiset && phi >= BigRational::from_integer(q.into()) {
        return Err(Error::domain(format!(
            "multisets require phi < 1/rho = {q}; got phi = {}",
            rational_string(&phi)
        )));
    }
    let rho = 1.0 / q as f64;
    let lambda = estimate_lambda(&m.prefix(LAMBDA_TERMS)?, Normalization::Ordinary, rho, 1.0)?;
    let sd = SingularData::new(rho, 1.0, lambda.value, phi_f)?;
    let mut family = FamilySpec::new(name, kind, m, phi, Some(sd))?;
    family.field = Some(q);
    family.name = match kind {
        Construction::Multiset => "polynomial-multiset".into(),
        _ => "polynomial-selection".into(),
    };
    Ok(family)
}

impl FamilySpec {
    /// Display name including the field size for polynomial families.
    pub fn full_name(&self) -> String {
        match self.field {
            Some(q) => format!("{}-F{q}", self.name),
            None => self.name.clone(),
        }
    }

    /// The field size of a polynomial family.
    pub fn field_size(&self) -> Option<u64> {
        self.field
    }
}

/// `m_i` as `f64`, saturating to infinity for astronomically large counts.
pub fn m_as_f64(m: &BigUint) -> f64 {
    m.to_f64().unwrap_or(f64::INFINITY)
}
