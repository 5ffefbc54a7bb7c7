//! Exact arithmetic in graded commutative coefficient rings.
//!
//! A [`Ring`] is either of characteristic 0 (exact rational scalars) or of
//! prime characteristic p (least non-negative residues).  Named generators
//! carry integer degrees; invertible generators admit negative (Laurent)
//! exponents.  Elements are stored in canonical form: a sparse map from
//! exponent vectors to nonzero scalars.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative description of a coefficient ring, the JSON-facing form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub characteristic: u64,
    pub generators: Vec<GeneratorSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: i64,
    pub invertible: bool,
}

impl RingSpec {
    pub fn new(characteristic: u64, generators: Vec<(&str, i64, bool)>) -> Self {
        RingSpec {
            characteristic,
            generators: generators
                .into_iter()
                .map(|(name, degree, invertible)| GeneratorSpec {
                    name: name.to_string(),
                    degree,
                    invertible,
                })
                .collect(),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A validated ring handle.  Cheap to clone; read-only after construction.
#[derive(Clone)]
pub struct Ring(Arc<RingSpec>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring(char {}", self.0.characteristic)?;
        for g in &self.0.generators {
            write!(f, ", {}:{}", g.name, g.degree)?;
        }
        write!(f, ")")
    }
}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Ring> {
        if spec.characteristic != 0 && !is_prime(spec.characteristic) {
            return Err(Error::NonPrimeCharacteristic(spec.characteristic));
        }
        let mut seen = std::collections::HashSet::new();
        for g in &spec.generators {
            if !seen.insert(g.name.clone()) {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Ring(Arc::new(spec)))
    }

    /// The rationals, used transiently for characteristic-0 constructions.
    pub fn rationals() -> Ring {
        Ring::new(RingSpec::new(0, vec![])).expect("valid spec")
    }

    /// The prime field F_p with no generators.
    pub fn prime_field(p: u64) -> Result<Ring> {
        Ring::new(RingSpec::new(p, vec![]))
    }

    /// The Morava K(n) coefficient ring F_p[v_n, v_n^{-1}] with |v_n| = -2(p^n - 1).
    pub fn morava_k(p: u64, n: u32) -> Result<Ring> {
        let name = format!("v{n}");
        let degree = -2 * ((p as i64).pow(n) - 1);
        Ring::new(RingSpec {
            characteristic: p,
            generators: vec![GeneratorSpec {
                name,
                degree,
                invertible: true,
            }],
        })
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0
    }

    pub fn characteristic(&self) -> u64 {
        self.0.characteristic
    }

    pub fn generator_count(&self) -> usize {
        self.0.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.0
            .generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn generator_spec(&self, idx: usize) -> &GeneratorSpec {
        &self.0.generators[idx]
    }

    pub fn zero(&self) -> CoeffElement {
        CoeffElement {
            ring: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> CoeffElement {
        self.scalar_i64(1)
    }

    pub fn scalar_i64(&self, value: i64) -> CoeffElement {
        let exps = vec![0; self.generator_count()];
        let mut terms = BTreeMap::new();
        let s = Scalar::from_i64(self, value);
        if !s.is_zero() {
            terms.insert(exps, s);
        }
        CoeffElement {
            ring: self.clone(),
            terms,
        }
    }

    pub fn scalar_rational(&self, value: BigRational) -> CoeffElement {
        debug_assert_eq!(self.characteristic(), 0);
        let exps = vec![0; self.generator_count()];
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(exps, Scalar::Rat(value));
        }
        CoeffElement {
            ring: self.clone(),
            terms,
        }
    }

    pub fn generator(&self, name: &str) -> Result<CoeffElement> {
        self.monomial(&[(name, 1)], 1)
    }

    /// c * prod gen_i^{e_i} as an element.
    pub fn monomial(&self, gens: &[(&str, i64)], scalar: i64) -> Result<CoeffElement> {
        let mut exps = vec![0i64; self.generator_count()];
        for (name, e) in gens {
            let idx = self.generator_index(name)?;
            exps[idx] += e;
        }
        for (idx, &e) in exps.iter().enumerate() {
            let g = self.generator_spec(idx);
            if e < 0 && !g.invertible {
                return Err(Error::NegativeExponent {
                    name: g.name.clone(),
                    exponent: e,
                });
            }
        }
        let s = Scalar::from_i64(self, scalar);
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(exps, s);
        }
        Ok(CoeffElement {
            ring: self.clone(),
            terms,
        })
    }
}

/// A scalar: residue mod p or an exact rational, depending on the ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Fp(u64),
    Rat(BigRational),
}

impl Scalar {
    fn from_i64(ring: &Ring, value: i64) -> Scalar {
        let p = ring.characteristic();
        if p == 0 {
            Scalar::Rat(BigRational::from(BigInt::from(value)))
        } else {
            Scalar::Fp(value.rem_euclid(p as i64) as u64)
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp(r) => *r == 0,
            Scalar::Rat(q) => q.is_zero(),
        }
    }

    fn add(&self, other: &Scalar, p: u64) -> Scalar {
        match (self, other) {
            (Scalar::Fp(a), Scalar::Fp(b)) => Scalar::Fp((a + b) % p),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => unreachable!("scalar kinds fixed by the ring"),
        }
    }

    fn neg(&self, p: u64) -> Scalar {
        match self {
            Scalar::Fp(a) => Scalar::Fp(if *a == 0 { 0 } else { p - a }),
            Scalar::Rat(q) => Scalar::Rat(-q),
        }
    }

    fn mul(&self, other: &Scalar, p: u64) -> Scalar {
        match (self, other) {
            (Scalar::Fp(a), Scalar::Fp(b)) => Scalar::Fp((a * b) % p),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => unreachable!("scalar kinds fixed by the ring"),
        }
    }

    fn inverse(&self, p: u64) -> Result<Scalar> {
        match self {
            Scalar::Fp(a) => {
                if *a == 0 {
                    return Err(Error::DivisionByZero);
                }
                // Fermat: a^(p-2) mod p
                let mut result = 1u64;
                let mut base = *a % p;
                let mut e = p - 2;
                while e > 0 {
                    if e & 1 == 1 {
                        result = result * base % p;
                    }
                    base = base * base % p;
                    e >>= 1;
                }
                Ok(Scalar::Fp(result))
            }
            Scalar::Rat(q) => {
                if q.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Scalar::Rat(q.recip()))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp(r) => write!(f, "{r}"),
            Scalar::Rat(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

/// Homogeneity of an element with respect to the generator grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    /// The zero element, compatible with every degree.
    Zero,
    Homogeneous(i64),
    Inhomogeneous,
}

impl Degree {
    /// Merge two degree verdicts, as when adding elements.
    pub fn combine(self, other: Degree) -> Degree {
        match (self, other) {
            (Degree::Zero, d) | (d, Degree::Zero) => d,
            (Degree::Homogeneous(a), Degree::Homogeneous(b)) if a == b => Degree::Homogeneous(a),
            _ => Degree::Inhomogeneous,
        }
    }
}

/// Element of a graded coefficient ring in canonical form: no zero scalars
/// are stored and non-invertible generators never carry negative exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffElement {
    ring: Ring,
    terms: BTreeMap<Vec<i64>, Scalar>,
}

impl CoeffElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == self.ring.one()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Scalar)> {
        self.terms.iter()
    }

    fn check_ring(&self, other: &CoeffElement) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &CoeffElement) -> Result<CoeffElement> {
        self.check_ring(other)?;
        let p = self.ring.characteristic();
        let mut terms = self.terms.clone();
        for (exps, s) in &other.terms {
            match terms.get_mut(exps) {
                Some(existing) => {
                    let sum = existing.add(s, p);
                    if sum.is_zero() {
                        terms.remove(exps);
                    } else {
                        *existing = sum;
                    }
                }
                None => {
                    terms.insert(exps.clone(), s.clone());
                }
            }
        }
        Ok(CoeffElement {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn neg(&self) -> CoeffElement {
        let p = self.ring.characteristic();
        CoeffElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, s)| (e.clone(), s.neg(p)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &CoeffElement) -> Result<CoeffElement> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CoeffElement) -> Result<CoeffElement> {
        self.check_ring(other)?;
        let p = self.ring.characteristic();
        let mut terms: BTreeMap<Vec<i64>, Scalar> = BTreeMap::new();
        for (ea, sa) in &self.terms {
            for (eb, sb) in &other.terms {
                let exps: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let prod = sa.mul(sb, p);
                match terms.get_mut(&exps) {
                    Some(existing) => {
                        let sum = existing.add(&prod, p);
                        if sum.is_zero() {
                            terms.remove(&exps);
                        } else {
                            *existing = sum;
                        }
                    }
                    None => {
                        if !prod.is_zero() {
                            terms.insert(exps, prod);
                        }
                    }
                }
            }
        }
        Ok(CoeffElement {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn mul_i64(&self, value: i64) -> CoeffElement {
        self.mul(&self.ring.scalar_i64(value))
            .expect("same ring by construction")
    }

    /// Inverse of a monomial unit: a single term whose generators are all
    /// invertible.  Anything else is an error.
    pub fn inverse(&self) -> Result<CoeffElement> {
        if self.terms.len() != 1 {
            return Err(Error::NotInvertible);
        }
        let (exps, s) = self.terms.iter().next().expect("one term");
        for (idx, &e) in exps.iter().enumerate() {
            if e != 0 && !self.ring.generator_spec(idx).invertible {
                return Err(Error::NotInvertible);
            }
        }
        let inv_exps: Vec<i64> = exps.iter().map(|e| -e).collect();
        let inv_s = s.inverse(self.ring.characteristic())?;
        let mut terms = BTreeMap::new();
        terms.insert(inv_exps, inv_s);
        Ok(CoeffElement {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn pow(&self, e: u32) -> CoeffElement {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            base = base.mul(&base).expect("same ring");
            e >>= 1;
        }
        acc
    }

    /// Cohomological degree, as printed in generator specs.
    pub fn degree(&self) -> Degree {
        let mut verdict = Degree::Zero;
        for exps in self.terms.keys() {
            let d: i64 = exps
                .iter()
                .enumerate()
                .map(|(i, e)| e * self.ring.generator_spec(i).degree)
                .sum();
            verdict = verdict.combine(Degree::Homogeneous(d));
        }
        verdict
    }

    /// Parity of the total degree across all terms, if consistent.
    /// Needed for commutation signs; zero is compatible with either parity.
    pub fn degree_parity(&self) -> Option<i64> {
        let mut parity: Option<i64> = None;
        for exps in self.terms.keys() {
            let d: i64 = exps
                .iter()
                .enumerate()
                .map(|(i, e)| e * self.ring.generator_spec(i).degree)
                .sum();
            match parity {
                None => parity = Some(d.rem_euclid(2)),
                Some(q) if q == d.rem_euclid(2) => {}
                Some(_) => return None,
            }
        }
        parity.or(Some(0))
    }

    /// Reduce a characteristic-0 element into a target ring of prime
    /// characteristic with the same generator list.  Fails if a denominator
    /// is divisible by p.
    pub fn reduce_mod_p(&self, target: &Ring) -> Result<CoeffElement> {
        let p = target.characteristic();
        debug_assert!(p > 0);
        debug_assert_eq!(self.ring.characteristic(), 0);
        let big_p = BigInt::from(p);
        let mut terms = BTreeMap::new();
        for (exps, s) in &self.terms {
            let q = match s {
                Scalar::Rat(q) => q,
                Scalar::Fp(_) => unreachable!("char 0 stores rationals"),
            };
            if (q.denom() % &big_p).is_zero() {
                return Err(Error::NotPIntegral {
                    value: s.to_string(),
                    p,
                });
            }
            let num = ((q.numer() % &big_p) + &big_p) % &big_p;
            let den = ((q.denom() % &big_p) + &big_p) % &big_p;
            let num: u64 = num.try_into().expect("residue fits");
            let den: u64 = den.try_into().expect("residue fits");
            let den_inv = match Scalar::Fp(den).inverse(p)? {
                Scalar::Fp(r) => r,
                _ => unreachable!(),
            };
            let r = num * den_inv % p;
            if r != 0 {
                terms.insert(exps.clone(), Scalar::Fp(r));
            }
        }
        Ok(CoeffElement {
            ring: target.clone(),
            terms,
        })
    }

    /// The rational value of a generator-free characteristic-0 element.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.terms.len() != 1 {
            return None;
        }
        let (exps, s) = self.terms.iter().next()?;
        if exps.iter().any(|&e| e != 0) {
            return None;
        }
        match s {
            Scalar::Rat(q) => Some(q),
            Scalar::Fp(_) => None,
        }
    }
}

impl fmt::Display for CoeffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, s) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut parts: Vec<String> = Vec::new();
            let scalar_one = match s {
                Scalar::Fp(r) => *r == 1,
                Scalar::Rat(q) => q.is_one(),
            };
            let has_gens = exps.iter().any(|&e| e != 0);
            if !scalar_one || !has_gens {
                let neg = match s {
                    Scalar::Rat(q) => q.is_negative(),
                    Scalar::Fp(_) => false,
                };
                if neg {
                    parts.push(format!("({s})"));
                } else {
                    parts.push(s.to_string());
                }
            }
            for (idx, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = &self.ring.generator_spec(idx).name;
                if e == 1 {
                    parts.push(name.clone());
                } else {
                    parts.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

/// Serialized term: generator exponents by name, scalar as a decimal string
/// (rationals as "a/b").
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffTermData {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gens: BTreeMap<String, i64>,
    pub value: String,
}

impl CoeffElement {
    pub fn to_data(&self) -> Vec<CoeffTermData> {
        self.terms
            .iter()
            .map(|(exps, s)| {
                let gens = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e != 0)
                    .map(|(i, e)| (self.ring.generator_spec(i).name.clone(), *e))
                    .collect();
                CoeffTermData {
                    gens,
                    value: s.to_string(),
                }
            })
            .collect()
    }

    pub fn from_data(ring: &Ring, data: &[CoeffTermData]) -> Result<CoeffElement> {
        let mut acc = ring.zero();
        for term in data {
            let scalar = parse_scalar(ring, &term.value)?;
            let mut mono = ring.one();
            for (name, e) in &term.gens {
                let idx = ring.generator_index(name)?;
                let g = ring.generator_spec(idx);
                if *e < 0 && !g.invertible {
                    return Err(Error::NegativeExponent {
                        name: g.name.clone(),
                        exponent: *e,
                    });
                }
                let mut exps = vec![0i64; ring.generator_count()];
                exps[idx] = *e;
                let mut terms = BTreeMap::new();
                terms.insert(exps, Scalar::from_i64(ring, 1));
                let gen_pow = CoeffElement {
                    ring: ring.clone(),
                    terms,
                };
                mono = mono.mul(&gen_pow)?;
            }
            acc = acc.add(&mono.mul(&scalar)?)?;
        }
        Ok(acc)
    }
}

fn parse_scalar(ring: &Ring, text: &str) -> Result<CoeffElement> {
    let bad = || Error::BadData(format!("bad scalar `{text}`"));
    if ring.characteristic() == 0 {
        let q = if let Some((num, den)) = text.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            BigRational::new(num, den)
        } else {
            BigRational::from(text.trim().parse::<BigInt>().map_err(|_| bad())?)
        };
        Ok(ring.scalar_rational(q))
    } else {
        let v: i64 = text.trim().parse().map_err(|_| bad())?;
        Ok(ring.scalar_i64(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_make_rejects_non_prime() {
        let err = Ring::new(RingSpec::new(4, vec![])).unwrap_err();
        assert_eq!(err, Error::NonPrimeCharacteristic(4));
    }

    #[test]
    fn ring_make_rejects_duplicate_generators() {
        let err =
            Ring::new(RingSpec::new(3, vec![("v1", -4, true), ("v1", -4, true)])).unwrap_err();
        assert_eq!(err, Error::DuplicateGenerator("v1".into()));
    }

    #[test]
    fn morava_k1_at_3_has_degree_minus_4() {
        // |v_1| = -2(p - 1) = -4 at p = 3
        let ring = Ring::morava_k(3, 1).unwrap();
        assert_eq!(ring.generator_spec(0).degree, -4);
        let v1 = ring.generator("v1").unwrap();
        assert_eq!(v1.degree(), Degree::Homogeneous(-4));
    }

    #[test]
    fn characteristic_zero_empty_ring_is_integers() {
        let z = Ring::rationals();
        let two = z.scalar_i64(2);
        let three = z.scalar_i64(3);
        assert_eq!(two.add(&three).unwrap(), z.scalar_i64(5));
    }

    #[test]
    fn add_in_char_3_wraps_to_zero() {
        let ring = Ring::morava_k(3, 1).unwrap();
        let v1 = ring.generator("v1").unwrap();
        let sum = v1.add(&v1.mul_i64(2)).unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn degree_of_one_is_zero_and_mixed_is_inhomogeneous() {
        let ring = Ring::morava_k(3, 1).unwrap();
        assert_eq!(ring.one().degree(), Degree::Homogeneous(0));
        let v1 = ring.generator("v1").unwrap();
        let mixed = v1.add(&ring.one()).unwrap();
        assert_eq!(mixed.degree(), Degree::Inhomogeneous);
    }

    #[test]
    fn non_invertible_generator_rejects_negative_exponent() {
        let ring = Ring::new(RingSpec::new(3, vec![("g1", -2, false)])).unwrap();
        let err = ring.monomial(&[("g1", -1)], 1).unwrap_err();
        assert!(matches!(err, Error::NegativeExponent { .. }));
    }

    #[test]
    fn monomial_unit_inverse() {
        let ring = Ring::morava_k(3, 1).unwrap();
        let v1 = ring.generator("v1").unwrap();
        let inv = v1.inverse().unwrap();
        assert!(v1.mul(&inv).unwrap().is_one());
        let sum = v1.add(&ring.one()).unwrap();
        assert_eq!(sum.inverse().unwrap_err(), Error::NotInvertible);
    }

    #[test]
    fn frobenius_additivity_char_p() {
        // (x + y)^p = x^p + y^p over F_p rings
        let ring = Ring::new(RingSpec::new(5, vec![("a", 2, false), ("b", -2, true)])).unwrap();
        let x = ring
            .monomial(&[("a", 1)], 2)
            .unwrap()
            .add(&ring.scalar_i64(3))
            .unwrap();
        let y = ring
            .monomial(&[("b", -2)], 4)
            .unwrap()
            .add(&ring.monomial(&[("a", 3)], 1).unwrap())
            .unwrap();
        let lhs = x.add(&y).unwrap().pow(5);
        let rhs = x.pow(5).add(&y.pow(5)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduce_mod_p_detects_bad_denominator() {
        let q = Ring::rationals();
        let f3 = Ring::prime_field(3).unwrap();
        let half = q.scalar_rational(BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(half.reduce_mod_p(&f3).unwrap(), f3.scalar_i64(2));
        let third = q.scalar_rational(BigRational::new(BigInt::from(1), BigInt::from(3)));
        assert!(matches!(
            third.reduce_mod_p(&f3).unwrap_err(),
            Error::NotPIntegral { .. }
        ));
    }

    #[test]
    fn json_round_trip() {
        let ring = Ring::morava_k(3, 2).unwrap();
        let x = ring
            .monomial(&[("v2", -3)], 2)
            .unwrap()
            .add(&ring.one())
            .unwrap();
        let data = x.to_data();
        let back = CoeffElement::from_data(&ring, &data).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn ring_spec_json_schema() {
        let spec = RingSpec::new(3, vec![("v1", -4, true)]);
        let json = serde_json::to_value(&spec).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "characteristic": 3,
                "generators": [{"name": "v1", "degree": -4, "invertible": true}]
            })
        );
    }
}
