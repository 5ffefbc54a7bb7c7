//! The bigraded co-operation algebra: normal forms for monomials in e, b_i,
//! and the bracket symbols [v_i^F]; the two sides of the p-series identity
//! `b([p]_E(s)) = [p]_F(b(s))` in the additive quotient; the relation-deriving
//! recursion; and loop heights computed by rewriting.
//!
//! The engine works in the free bidegree-graded commutative model on {b_i}
//! and {[v_i^F]} over the coefficient ring: only relations derivable from
//! the p-series identity (or supplied explicitly) are imposed.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::{CoeffElement, Degree, Ring};
use crate::error::{Error, Result};
use crate::fgl::{FormalGroupLaw, PSeriesData};
use crate::series::{Monomial, Series};

/// (homological degree, space label).  Homology degrees are the negatives of
/// the printed cohomological ones; the flip happens here, in the coop layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bidegree {
    pub hom: i64,
    pub label: i64,
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.hom, self.label)
    }
}

/// Symbol part of a co-operation monomial: `e^a * prod b_i^{c_i} * prod [v_i^F]^{d_i}`.
/// b_0 is the unit and is never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CoopKey {
    pub e_exp: u32,
    pub b_exps: BTreeMap<u32, u32>,
    pub v_exps: BTreeMap<u32, u32>,
}

impl CoopKey {
    pub fn one() -> CoopKey {
        CoopKey::default()
    }

    pub fn e(a: u32) -> CoopKey {
        CoopKey {
            e_exp: a,
            ..Default::default()
        }
    }

    pub fn b(i: u32, c: u32) -> CoopKey {
        debug_assert!(i >= 1);
        let mut b_exps = BTreeMap::new();
        if c > 0 {
            b_exps.insert(i, c);
        }
        CoopKey {
            b_exps,
            ..Default::default()
        }
    }

    pub fn v(i: u32, d: u32) -> CoopKey {
        debug_assert!(i >= 1);
        let mut v_exps = BTreeMap::new();
        if d > 0 {
            v_exps.insert(i, d);
        }
        CoopKey {
            v_exps,
            ..Default::default()
        }
    }

    pub fn is_one(&self) -> bool {
        self.e_exp == 0 && self.b_exps.is_empty() && self.v_exps.is_empty()
    }

    pub fn mul(&self, other: &CoopKey) -> CoopKey {
        let mut out = self.clone();
        out.e_exp += other.e_exp;
        for (i, c) in &other.b_exps {
            *out.b_exps.entry(*i).or_insert(0) += c;
        }
        for (i, d) in &other.v_exps {
            *out.v_exps.entry(*i).or_insert(0) += d;
        }
        out
    }

    /// Componentwise divisibility: self = other * quotient for some quotient.
    pub fn divisible_by(&self, other: &CoopKey) -> bool {
        if self.e_exp < other.e_exp {
            return false;
        }
        for (i, c) in &other.b_exps {
            if self.b_exps.get(i).copied().unwrap_or(0) < *c {
                return false;
            }
        }
        for (i, d) in &other.v_exps {
            if self.v_exps.get(i).copied().unwrap_or(0) < *d {
                return false;
            }
        }
        true
    }

    pub fn div_exact(&self, other: &CoopKey) -> CoopKey {
        debug_assert!(self.divisible_by(other));
        let mut out = CoopKey {
            e_exp: self.e_exp - other.e_exp,
            ..Default::default()
        };
        for (i, c) in &self.b_exps {
            let rest = c - other.b_exps.get(i).copied().unwrap_or(0);
            if rest > 0 {
                out.b_exps.insert(*i, rest);
            }
        }
        for (i, d) in &self.v_exps {
            let rest = d - other.v_exps.get(i).copied().unwrap_or(0);
            if rest > 0 {
                out.v_exps.insert(*i, rest);
            }
        }
        out
    }

    /// Total symbol degree, the first component of the term order.
    pub fn total_symbol_degree(&self) -> u64 {
        self.e_exp as u64
            + self.b_exps.values().map(|&c| c as u64).sum::<u64>()
            + self.v_exps.values().map(|&d| d as u64).sum::<u64>()
    }

    /// Bidegree contributed by the symbols alone, at the prime p.
    pub fn symbol_bidegree(&self, p: u64) -> Bidegree {
        let mut hom = self.e_exp as i64;
        let mut label = self.e_exp as i64;
        for (i, c) in &self.b_exps {
            hom += 2 * (*i as i64) * (*c as i64);
            label += 2 * (*c as i64);
        }
        for (i, d) in &self.v_exps {
            label += -2 * ((p as i64).pow(*i) - 1) * (*d as i64);
        }
        Bidegree { hom, label }
    }

    /// The additive-quotient identification b_1 = e^2, leaving other symbols
    /// untouched.
    pub fn to_e_form(&self) -> CoopKey {
        let mut out = self.clone();
        if let Some(c) = out.b_exps.remove(&1) {
            out.e_exp += 2 * c;
        }
        out
    }

    /// Parity of hom + label over the symbols; identically even on this
    /// generator set (see the bidegree table above), independent of p.
    pub fn symbol_total_parity(&self) -> i64 {
        let e = self.e_exp as i64 * 2;
        let b: i64 = self
            .b_exps
            .iter()
            .map(|(i, c)| (2 * *i as i64 + 2) * *c as i64)
            .sum();
        (e + b).rem_euclid(2)
    }
}

/// Degree-lex term order with `e > b_1 > b_2 > ... > [v_1] > [v_2] > ...`
impl Ord for CoopKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.total_symbol_degree().cmp(&other.total_symbol_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match self.e_exp.cmp(&other.e_exp) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match lex_cmp(&self.b_exps, &other.b_exps) {
            Ordering::Equal => {}
            ord => return ord,
        }
        lex_cmp(&self.v_exps, &other.v_exps)
    }
}

impl PartialOrd for CoopKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lex over sparse exponent maps: lower index is the more significant symbol.
fn lex_cmp(a: &BTreeMap<u32, u32>, b: &BTreeMap<u32, u32>) -> std::cmp::Ordering {
    let indices: std::collections::BTreeSet<u32> = a.keys().chain(b.keys()).copied().collect();
    for i in indices {
        let ea = a.get(&i).copied().unwrap_or(0);
        let eb = b.get(&i).copied().unwrap_or(0);
        match ea.cmp(&eb) {
            std::cmp::Ordering::Equal => {}
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

impl fmt::Display for CoopKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.e_exp == 1 {
            parts.push("e".to_string());
        } else if self.e_exp > 1 {
            parts.push(format!("e^{}", self.e_exp));
        }
        for (i, c) in &self.b_exps {
            if *c == 1 {
                parts.push(format!("b{i}"));
            } else {
                parts.push(format!("b{i}^{c}"));
            }
        }
        for (i, d) in &self.v_exps {
            if *d == 1 {
                parts.push(format!("[vF{i}]"));
            } else {
                parts.push(format!("[vF{i}]^{d}"));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Canonical sum of co-operation monomials with coefficients in the target
/// coefficient ring; no zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoopElement {
    ring: Ring,
    terms: BTreeMap<CoopKey, CoeffElement>,
}

impl CoopElement {
    pub fn zero(ring: &Ring) -> CoopElement {
        CoopElement {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> CoopElement {
        CoopElement::from_key(ring, CoopKey::one())
    }

    pub fn from_key(ring: &Ring, key: CoopKey) -> CoopElement {
        CoopElement::term(ring, key, ring.one())
    }

    pub fn term(ring: &Ring, key: CoopKey, coeff: CoeffElement) -> CoopElement {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(key, coeff);
        }
        CoopElement {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn scalar(c: CoeffElement) -> CoopElement {
        let ring = c.ring().clone();
        CoopElement::term(&ring, CoopKey::one(), c)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&CoopKey, &CoeffElement)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&CoopKey, &CoeffElement)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, key: CoopKey, coeff: CoeffElement) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.add(&coeff).expect("same ring");
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn add(&self, other: &CoopElement) -> CoopElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> CoopElement {
        CoopElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &CoopElement) -> CoopElement {
        self.add(&other.neg())
    }

    /// The circle product.  Normalisation moves the right coefficient left
    /// past the symbols of the left factor, at Koszul sign
    /// (-1)^{T(coeff) T(symbols)} in the total (hom + label) parity; every
    /// symbol here has even total bidegree (e is (1,1), b_i is (2i,2),
    /// `[v_i]` is (0, -2(p^i-1)), so the sign evaluates to +1 and transposing
    /// symbols among themselves contributes nothing either.
    pub fn mul(&self, other: &CoopElement) -> Result<CoopElement> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let mut out = CoopElement::zero(&self.ring);
        for (ka, ca) in &self.terms {
            let wa_parity = ka.symbol_total_parity();
            for (kb, cb) in &other.terms {
                let cb_parity = cb
                    .degree_parity()
                    .ok_or_else(|| Error::BidegreeUndefined(format!("{cb}")))?;
                let sign_negative = (cb_parity * wa_parity).rem_euclid(2) == 1;
                let mut c = ca.mul(cb)?;
                if sign_negative {
                    c = c.neg();
                }
                out.add_term(ka.mul(kb), c);
            }
        }
        Ok(out)
    }

    pub fn mul_key(&self, key: &CoopKey) -> CoopElement {
        CoopElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(key), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &CoeffElement) -> Result<CoopElement> {
        let mut out = CoopElement::zero(&self.ring);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), a.mul(c)?);
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<CoopElement> {
        let mut acc = CoopElement::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Bidegree of the whole element; `None` for zero, error when mixed.
    pub fn bidegree(&self, p: u64) -> Result<Option<Bidegree>> {
        let mut result: Option<Bidegree> = None;
        for (k, c) in &self.terms {
            let mut bd = k.symbol_bidegree(p);
            match c.degree() {
                Degree::Zero => continue,
                Degree::Homogeneous(d) => bd.hom += -d,
                Degree::Inhomogeneous => return Err(Error::BidegreeUndefined(format!("{c}"))),
            }
            match result {
                None => result = Some(bd),
                Some(prev) if prev == bd => {}
                Some(prev) => {
                    return Err(Error::BidegreeUndefined(format!(
                        "mixed bidegrees {prev} and {bd}"
                    )))
                }
            }
        }
        Ok(result)
    }

    /// The augmentation: kills e and every b_k with k > 0, keeps scalars.
    /// Bare bracket monomials have no canonical image without a self-model
    /// identification, so they are an error.
    pub fn augment(&self) -> Result<CoeffElement> {
        let mut out = self.ring.zero();
        for (k, c) in &self.terms {
            if k.e_exp > 0 || !k.b_exps.is_empty() {
                continue;
            }
            if !k.v_exps.is_empty() {
                return Err(Error::AugmentationUndefined);
            }
            out = out.add(c)?;
        }
        Ok(out)
    }

    /// Apply b_1 = e^2 termwise (the additive-quotient identification).
    pub fn to_e_form(&self) -> CoopElement {
        let mut out = CoopElement::zero(&self.ring);
        for (k, c) in &self.terms {
            out.add_term(k.to_e_form(), c.clone());
        }
        out
    }
}

impl fmt::Display for CoopElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{k}")?;
            } else if c.term_count() > 1 {
                write!(f, "({c})*{k}")?;
            } else {
                write!(f, "{c}*{k}")?;
            }
        }
        Ok(())
    }
}

/// Serialized co-operation term: exponents by symbol family, coefficient in
/// the coeff-ring JSON form.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct CoopTermData {
    #[serde(default)]
    pub e: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub b: BTreeMap<u32, u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub v: BTreeMap<u32, u32>,
    pub coeff: Vec<crate::coeff::CoeffTermData>,
}

impl CoopElement {
    pub fn to_data(&self) -> Vec<CoopTermData> {
        self.terms
            .iter()
            .map(|(k, c)| CoopTermData {
                e: k.e_exp,
                b: k.b_exps.clone(),
                v: k.v_exps.clone(),
                coeff: c.to_data(),
            })
            .collect()
    }

    pub fn from_data(ring: &Ring, data: &[CoopTermData]) -> Result<CoopElement> {
        let mut out = CoopElement::zero(ring);
        for term in data {
            let key = CoopKey {
                e_exp: term.e,
                b_exps: term
                    .b
                    .iter()
                    .filter(|(_, c)| **c > 0)
                    .map(|(i, c)| (*i, *c))
                    .collect(),
                v_exps: term
                    .v
                    .iter()
                    .filter(|(_, c)| **c > 0)
                    .map(|(i, c)| (*i, *c))
                    .collect(),
            };
            out.add_term(
                key,
                crate::coeff::CoeffElement::from_data(ring, &term.coeff)?,
            );
        }
        Ok(out)
    }
}

/// The sign for commuting e past an element of bidegree (j, k), per the
/// structure of the suspension element.
pub fn e_commutation_sign(bd: Bidegree) -> i64 {
    if (bd.hom + bd.label).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The unstable identification of the second Chern-class coefficient for a
/// strict orientation: b_1 = -e.e.
pub fn b1_as_e_square(ring: &Ring) -> CoopElement {
    CoopElement::from_key(ring, CoopKey::e(2)).neg()
}

/// Sign in the quotient of a circle product to the regraded additive
/// co-operations: q_{i+j}(a . b) = (-1)^{j |a|} q_i(a) q_j(b) for a of
/// homological degree |a| and b carrying space label j.
pub fn additive_quotient_sign(a_hom_degree: i64, b_label: i64) -> i64 {
    if (a_hom_degree * b_label).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Coproduct of b_k: sum over i + j = k of b_i (x) b_j, with b_0 = 1.
pub fn b_coproduct(ring: &Ring, k: u32) -> Vec<(CoopElement, CoopElement)> {
    (0..=k)
        .map(|i| {
            (
                CoopElement::from_key(ring, CoopKey::b(i.max(1), u32::from(i >= 1))),
                CoopElement::from_key(ring, CoopKey::b((k - i).max(1), u32::from(k - i >= 1))),
            )
        })
        .collect()
}

/// Coproduct of the suspension element: e (x) 1 + 1 (x) e.
pub fn e_coproduct(ring: &Ring) -> Vec<(CoopElement, CoopElement)> {
    vec![
        (
            CoopElement::from_key(ring, CoopKey::e(1)),
            CoopElement::one(ring),
        ),
        (
            CoopElement::one(ring),
            CoopElement::from_key(ring, CoopKey::e(1)),
        ),
    ]
}

// ---------------------------------------------------------------------------
// One-variable series with CoopElement coefficients
// ---------------------------------------------------------------------------

/// Power series in s whose coefficients are co-operation elements, truncated
/// at the stated precision (degrees 0..=N retained).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoopSeries {
    ring: Ring,
    precision: u32,
    coeffs: BTreeMap<u32, CoopElement>,
}

impl CoopSeries {
    pub fn zero(ring: &Ring, precision: u32) -> CoopSeries {
        CoopSeries {
            ring: ring.clone(),
            precision,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&u32, &CoopElement)> {
        self.coeffs.iter()
    }

    pub fn add_term(&mut self, degree: u32, c: CoopElement) {
        if degree > self.precision || c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&degree) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.coeffs.remove(&degree);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.coeffs.insert(degree, c);
            }
        }
    }

    /// Coefficient of s^d; an error beyond the precision, zero when absent.
    pub fn coefficient(&self, d: u32) -> Result<CoopElement> {
        if d > self.precision {
            return Err(Error::BeyondPrecision {
                degree: d,
                precision: self.precision,
            });
        }
        Ok(self
            .coeffs
            .get(&d)
            .cloned()
            .unwrap_or_else(|| CoopElement::zero(&self.ring)))
    }

    pub fn lowest_degree(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn constant_term(&self) -> CoopElement {
        self.coeffs
            .get(&0)
            .cloned()
            .unwrap_or_else(|| CoopElement::zero(&self.ring))
    }

    pub fn add(&self, other: &CoopSeries) -> CoopSeries {
        let precision = self.precision.min(other.precision);
        let mut out = CoopSeries::zero(&self.ring, precision);
        for (d, c) in &self.coeffs {
            out.add_term(*d, c.clone());
        }
        for (d, c) in &other.coeffs {
            out.add_term(*d, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &CoopSeries) -> CoopSeries {
        let mut neg = other.clone();
        neg.coeffs = neg.coeffs.into_iter().map(|(d, c)| (d, c.neg())).collect();
        self.add(&neg)
    }

    pub fn mul(&self, other: &CoopSeries) -> Result<CoopSeries> {
        let precision = self.precision.min(other.precision);
        let mut out = CoopSeries::zero(&self.ring, precision);
        for (da, ca) in &self.coeffs {
            if *da > precision {
                break;
            }
            for (db, cb) in &other.coeffs {
                if da + db > precision {
                    break;
                }
                out.add_term(da + db, ca.mul(cb)?);
            }
        }
        Ok(out)
    }

    fn window(&self, w: u64) -> CoopSeries {
        CoopSeries {
            ring: self.ring.clone(),
            precision: self.precision,
            coeffs: self
                .coeffs
                .iter()
                .take_while(|(d, _)| **d as u64 <= w)
                .map(|(d, c)| (*d, c.clone()))
                .collect(),
        }
    }

    /// Binary powering with the same valuation window as scalar series: a
    /// partial power of exponent j keeps only degrees <= N - (e - j) * val.
    pub fn pow(&self, e: u32) -> Result<CoopSeries> {
        if e == 0 {
            let mut one = CoopSeries::zero(&self.ring, self.precision);
            one.add_term(0, CoopElement::one(&self.ring));
            return Ok(one);
        }
        let n = self.precision as u64;
        let val = self.lowest_degree().map(u64::from).unwrap_or(n + 1);
        if val.saturating_mul(e as u64) > n {
            return Ok(CoopSeries::zero(&self.ring, self.precision));
        }
        let window = |j: u64| n - (e as u64 - j) * val;
        let mut acc: Option<(u64, CoopSeries)> = None;
        for bit in (0..=31 - e.leading_zeros()).rev() {
            if let Some((j, s)) = acc.take() {
                acc = Some((2 * j, s.mul(&s)?.window(window(2 * j))));
            }
            if (e >> bit) & 1 == 1 {
                acc = Some(match acc.take() {
                    None => (1, self.window(window(1))),
                    Some((j, s)) => (j + 1, s.mul(self)?.window(window(j + 1))),
                });
            }
        }
        Ok(acc.expect("e >= 1").1)
    }

    pub fn scale(&self, c: &CoopElement) -> Result<CoopSeries> {
        let mut out = CoopSeries::zero(&self.ring, self.precision);
        for (d, a) in &self.coeffs {
            out.add_term(*d, a.mul(c)?);
        }
        Ok(out)
    }

    /// Augmentation applied termwise, producing a scalar series in s.
    pub fn augment(&self) -> Result<Series> {
        let mut out = Series::zero(&self.ring, &["s"], self.precision);
        for (d, c) in &self.coeffs {
            out.add_term_pub(Monomial::new(vec![*d]), c.augment()?);
        }
        Ok(out)
    }
}

impl fmt::Display for CoopSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let needs_parens = c.term_count() > 1;
            let body = if needs_parens {
                format!("({c})")
            } else {
                format!("{c}")
            };
            match d {
                0 => write!(f, "{body}")?,
                1 => write!(f, "{body}*s")?,
                _ => write!(f, "{body}*s^{d}")?,
            }
        }
        Ok(())
    }
}

/// b(s) = sum_{i >= 0} b_i s^i with b_0 = 1, to order N.
pub fn b_series(ring: &Ring, precision: u32) -> CoopSeries {
    let mut out = CoopSeries::zero(ring, precision);
    out.add_term(0, CoopElement::one(ring));
    for i in 1..=precision {
        out.add_term(i, CoopElement::from_key(ring, CoopKey::b(i, 1)));
    }
    out
}

/// The additive-quotient image of b(s): the constant term b_0 dies there.
pub fn b_series_additive(ring: &Ring, precision: u32) -> CoopSeries {
    let mut out = b_series(ring, precision);
    out.coeffs.remove(&0);
    out
}

/// Substitute a scalar series with zero constant term into b(s):
/// sum_k b_k r(s)^k.
pub fn b_series_compose(
    ring: &Ring,
    r: &Series,
    precision: u32,
    additive: bool,
) -> Result<CoopSeries> {
    if !r.constant_term().is_zero() {
        return Err(Error::NonzeroConstantTerm("s".into()));
    }
    let mut out = CoopSeries::zero(ring, precision);
    if !additive {
        out.add_term(0, CoopElement::one(ring));
    }
    let mut r_pow = Series::one(r.ring(), &["s"], precision);
    let r = r.rename_vars(&["s"]).truncate(precision);
    for k in 1..=precision {
        r_pow = r_pow.mul(&r)?;
        if r_pow.is_zero() {
            break;
        }
        let bk = CoopKey::b(k, 1);
        for (m, c) in r_pow.terms() {
            out.add_term(m.degree(), CoopElement::term(ring, bk.clone(), c.clone()));
        }
    }
    Ok(out)
}

/// Express a coefficient of the source theory as a bracket monomial: each
/// generator must be part of the v-family (`v<i>`) with non-negative
/// exponent; scalars pass through.
pub fn embed_bracket(c: &CoeffElement, target: &Ring) -> Result<CoopElement> {
    let mut out = CoopElement::zero(target);
    for (exps, scalar) in c.terms() {
        let mut key = CoopKey::one();
        for (idx, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = &c.ring().generator_spec(idx).name;
            let index: Option<u32> = name.strip_prefix('v').and_then(|rest| rest.parse().ok());
            match index {
                Some(i) if e > 0 => {
                    *key.v_exps.entry(i).or_insert(0) += e as u32;
                }
                _ => return Err(Error::BracketEmbedding(format!("{name}^{e}"))),
            }
        }
        let value = match scalar {
            crate::coeff::Scalar::Fp(r) => target.scalar_i64(*r as i64),
            crate::coeff::Scalar::Rat(_) => {
                return Err(Error::BracketEmbedding(
                    "rational coefficients have no bracket image".into(),
                ))
            }
        };
        out.add_term(key, value);
    }
    Ok(out)
}

/// Formal sum of co-operation series under the source theory's group law,
/// with the law's coefficients acting through bracket symbols on the right.
pub fn coop_formal_sum(
    fgl: &FormalGroupLaw,
    terms: &[CoopSeries],
    ring: &Ring,
    precision: u32,
) -> Result<CoopSeries> {
    let mut iter = terms.iter();
    let mut acc = match iter.next() {
        None => return Ok(CoopSeries::zero(ring, precision)),
        Some(t) => t.clone(),
    };
    for t in iter {
        acc = coop_plus(fgl, t, &acc, ring, precision)?;
    }
    Ok(acc)
}

fn coop_plus(
    fgl: &FormalGroupLaw,
    a: &CoopSeries,
    b: &CoopSeries,
    ring: &Ring,
    precision: u32,
) -> Result<CoopSeries> {
    if !a.constant_term().is_zero() || !b.constant_term().is_zero() {
        return Err(Error::NonzeroConstantTerm("s".into()));
    }
    let mut out = CoopSeries::zero(ring, precision);
    // power caches over the two slots
    let mut pow_a: Vec<Option<CoopSeries>> = vec![None; precision as usize + 1];
    let mut pow_b: Vec<Option<CoopSeries>> = vec![None; precision as usize + 1];
    for (m, c) in fgl.series().terms() {
        if m.degree() > precision {
            break;
        }
        let (i, j) = (m.exps()[0], m.exps()[1]);
        let lowest = i * a.lowest_degree().unwrap_or(precision + 1)
            + j * b.lowest_degree().unwrap_or(precision + 1);
        if lowest > precision {
            continue;
        }
        let pa = cached_pow(&mut pow_a, a, i, precision)?;
        let pb = cached_pow(&mut pow_b, b, j, precision)?;
        let bracket = embed_bracket(c, ring)?;
        let prod = pa.mul(&pb)?.scale(&bracket)?;
        out = out.add(&prod);
    }
    Ok(out)
}

fn cached_pow(
    cache: &mut [Option<CoopSeries>],
    base: &CoopSeries,
    e: u32,
    precision: u32,
) -> Result<CoopSeries> {
    if let Some(v) = &cache[e as usize] {
        return Ok(v.clone());
    }
    let v = if e == 0 {
        let mut one = CoopSeries::zero(base.ring(), precision);
        one.add_term(0, CoopElement::one(base.ring()));
        one
    } else {
        base.pow(e)?
    };
    cache[e as usize] = Some(v.clone());
    Ok(v)
}

// ---------------------------------------------------------------------------
// The two sides of the p-series identity in the additive quotient
// ---------------------------------------------------------------------------

/// Left-hand side `b([p]_E(s))`: the additive b-series composed with the
/// target theory's mod-p p-series.  The result's precision never exceeds
/// that of the supplied p-series.
pub fn rw_lhs(e_data: &PSeriesData, ring: &Ring, precision: u32) -> Result<CoopSeries> {
    let precision = precision.min(e_data.p_series.precision());
    let need = e_data
        .v_coeffs
        .keys()
        .next()
        .map(|&i| (e_data.p as u32).pow(i))
        .unwrap_or(0);
    if precision < need {
        return Err(Error::PrecisionTooLow {
            precision,
            needed: need,
        });
    }
    let r = e_data.p_series.truncate(precision);
    b_series_compose(ring, &r, precision, true)
}

/// Right-hand side: the formal sum over the source law of
/// `b(s)^{p^i} . [v_i^F]` for each nonzero v_i.
pub fn rw_rhs(
    f_fgl: &FormalGroupLaw,
    f_data: &PSeriesData,
    ring: &Ring,
    precision: u32,
) -> Result<CoopSeries> {
    let p = f_data.p;
    let precision = precision.min(f_fgl.precision());
    if let Some(&first) = f_data
        .v_coeffs
        .keys()
        .find(|i| !f_data.v_coeffs[i].is_zero())
    {
        let need = (p as u32).pow(first);
        if precision < need {
            return Err(Error::PrecisionTooLow {
                precision,
                needed: need,
            });
        }
    }
    let b_add = b_series_additive(ring, precision);
    let mut terms = Vec::new();
    for (i, v) in &f_data.v_coeffs {
        if v.is_zero() {
            continue;
        }
        let pi = p.pow(*i);
        if pi > precision as u64 {
            break;
        }
        let bracket = embed_bracket(v, ring)?;
        terms.push(b_add.pow(pi as u32)?.scale(&bracket)?);
    }
    coop_formal_sum(f_fgl, &terms, ring, precision)
}

/// Verify q(b(s)^{*p}) = p b(s) via the iterated quotient Leibniz rule
/// q(a_1 * ... * a_m) = sum_i (prod_{j != i} eps(a_j)) a_i; every factor here
/// has even degree so no signs appear.
pub fn hopf_quotient_leibniz(factors: &[CoopSeries]) -> Result<CoopSeries> {
    let first = factors
        .first()
        .ok_or_else(|| Error::BadData("empty * product".into()))?;
    let ring = first.ring().clone();
    let precision = factors.iter().map(|f| f.precision()).min().unwrap();
    let mut out = CoopSeries::zero(&ring, precision);
    for i in 0..factors.len() {
        let mut scalar = Series::one(&ring, &["s"], precision);
        for (j, f) in factors.iter().enumerate() {
            if j != i {
                scalar = scalar.mul(&f.augment()?)?;
            }
        }
        // scalar series times coop series
        let mut contribution = CoopSeries::zero(&ring, precision);
        for (m, c) in scalar.terms() {
            for (d, coop) in factors[i].coeffs() {
                if m.degree() + d > precision {
                    break;
                }
                contribution.add_term(m.degree() + d, coop.scale(c)?);
            }
        }
        out = out.add(&contribution);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct HopfQuotientReport {
    pub p: u64,
    pub precision: u32,
    pub reduced: CoopSeries,
    pub pass: bool,
}

/// The q(b(s)^{*p}) = 0 check in characteristic p.
pub fn hopf_quotient_check(ring: &Ring, p: u64, precision: u32) -> Result<HopfQuotientReport> {
    let b = b_series(ring, precision);
    let factors = vec![b; p as usize];
    let reduced = hopf_quotient_leibniz(&factors)?;
    // p * b(s) should be zero because the ring has characteristic p
    let pass = reduced.is_zero() && ring.characteristic() == p;
    Ok(HopfQuotientReport {
        p,
        precision,
        reduced,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::FormalGroupLaw;

    fn generic_ring(p: u64, n: u32) -> Ring {
        let degree = -2 * ((p as i64).pow(n) - 1);
        let name = format!("vE{n}");
        Ring::new(crate::coeff::RingSpec::new(
            p,
            vec![(name.as_str(), degree, true)],
        ))
        .unwrap()
    }

    #[test]
    fn e_squared_normalizes_unambiguously() {
        let ring = Ring::prime_field(3).unwrap();
        let e = CoopElement::from_key(&ring, CoopKey::e(1));
        let e2 = e.mul(&e).unwrap();
        assert_eq!(e2, CoopElement::from_key(&ring, CoopKey::e(2)));
        // e has bidegree (1, 1), so the commutation sign is +1
        assert_eq!(e_commutation_sign(Bidegree { hom: 1, label: 1 }), 1);
    }

    #[test]
    fn b1_commutes_past_e_with_plus_sign() {
        let ring = Ring::prime_field(3).unwrap();
        let b1 = CoopElement::from_key(&ring, CoopKey::b(1, 1));
        let e = CoopElement::from_key(&ring, CoopKey::e(1));
        // b_1 has bidegree (2, 2): sign (-1)^{2+2} = +1
        assert_eq!(e_commutation_sign(Bidegree { hom: 2, label: 2 }), 1);
        assert_eq!(b1.mul(&e).unwrap(), e.mul(&b1).unwrap());
    }

    #[test]
    fn additive_quotient_sends_b1_to_e_squared() {
        let ring = Ring::prime_field(3).unwrap();
        let b1 = CoopElement::from_key(&ring, CoopKey::b(1, 1));
        assert_eq!(b1.to_e_form(), CoopElement::from_key(&ring, CoopKey::e(2)));
    }

    #[test]
    fn quotient_sign_turns_minus_e_square_into_plus() {
        // b_1 = -e.e unstably, yet q(b_1) = e^2: quotienting e.e picks up
        // (-1)^{1*1} and the two signs cancel
        let ring = Ring::prime_field(3).unwrap();
        let b1 = b1_as_e_square(&ring);
        let sign = additive_quotient_sign(1, 1);
        assert_eq!(sign, -1);
        let q_image = if sign < 0 {
            b1.to_e_form().neg()
        } else {
            b1.to_e_form()
        };
        assert_eq!(q_image, CoopElement::from_key(&ring, CoopKey::e(2)));
    }

    #[test]
    fn coproducts_of_b_and_e() {
        let ring = Ring::prime_field(3).unwrap();
        let psi = b_coproduct(&ring, 2);
        // b_2 (x) 1 + b_1 (x) b_1 + 1 (x) b_2
        assert_eq!(psi.len(), 3);
        assert_eq!(psi[0].0, CoopElement::one(&ring));
        assert_eq!(psi[1].0, CoopElement::from_key(&ring, CoopKey::b(1, 1)));
        assert_eq!(psi[1].1, CoopElement::from_key(&ring, CoopKey::b(1, 1)));
        // counit: applying the augmentation to one slot recovers b_k
        let recovered = psi
            .iter()
            .map(|(a, b)| b.scale(&a.augment().unwrap()).unwrap())
            .fold(CoopElement::zero(&ring), |acc, x| acc.add(&x));
        assert_eq!(recovered, CoopElement::from_key(&ring, CoopKey::b(2, 1)));
        let psi_e = e_coproduct(&ring);
        assert_eq!(psi_e.len(), 2);
        // the augmentation kills e in both slots
        for (a, b) in &psi_e {
            let prod = a.mul(b).unwrap();
            assert!(prod.augment().unwrap().is_zero());
        }
    }

    #[test]
    fn bidegree_formulas() {
        let ring = generic_ring(3, 1);
        let p = 3;
        // b_1: (2, 2)
        let b1 = CoopElement::from_key(&ring, CoopKey::b(1, 1));
        assert_eq!(
            b1.bidegree(p).unwrap().unwrap(),
            Bidegree { hom: 2, label: 2 }
        );
        // [v_1^F]: (0, -4) at p = 3
        let v = CoopElement::from_key(&ring, CoopKey::v(1, 1));
        assert_eq!(
            v.bidegree(p).unwrap().unwrap(),
            Bidegree { hom: 0, label: -4 }
        );
        // the scalar v_1^E has homology degree +4
        let ve = CoopElement::scalar(ring.generator("vE1").unwrap());
        assert_eq!(
            ve.bidegree(p).unwrap().unwrap(),
            Bidegree { hom: 4, label: 0 }
        );
    }

    #[test]
    fn b_series_starts_with_one_and_b1() {
        let ring = Ring::prime_field(3).unwrap();
        let b = b_series(&ring, 5);
        assert_eq!(b.coefficient(0).unwrap(), CoopElement::one(&ring));
        assert_eq!(
            b.coefficient(1).unwrap(),
            CoopElement::from_key(&ring, CoopKey::b(1, 1))
        );
        // termwise augmentation is the constant series 1
        let eps = b.augment().unwrap();
        assert_eq!(eps, Series::one(&ring, &["s"], 5));
    }

    #[test]
    fn rw_lhs_leading_term_at_k1() {
        // E = K(1) at p = 3: b(v_1 s^3) has leading term v_1 b_1 s^3
        let f = FormalGroupLaw::morava_k(3, 1, 9).unwrap();
        let data = f.extract_v().unwrap();
        let ring = f.ring().clone();
        let lhs = rw_lhs(&data, &ring, 9).unwrap();
        assert_eq!(lhs.lowest_degree(), Some(3));
        let v1 = ring.generator("v1").unwrap();
        assert_eq!(
            lhs.coefficient(3).unwrap(),
            CoopElement::term(&ring, CoopKey::b(1, 1), v1)
        );
    }

    #[test]
    fn rw_rhs_leading_term_at_k1() {
        // leading term b_1^p [v_1^F] s^p
        let f = FormalGroupLaw::morava_k(3, 1, 9).unwrap();
        let data = f.extract_v().unwrap();
        let ring = f.ring().clone();
        let rhs = rw_rhs(&f, &data, &ring, 9).unwrap();
        assert_eq!(rhs.lowest_degree(), Some(3));
        let expected = CoopElement::from_key(&ring, CoopKey::b(1, 3).mul(&CoopKey::v(1, 1)));
        assert_eq!(rhs.coefficient(3).unwrap(), expected);
    }

    #[test]
    fn rw_sides_augment_equally() {
        // the augmentation kills all b_{k>0} terms, so both sides vanish
        let f = FormalGroupLaw::morava_k(3, 1, 9).unwrap();
        let data = f.extract_v().unwrap();
        let ring = f.ring().clone();
        let lhs = rw_lhs(&data, &ring, 9).unwrap();
        let rhs = rw_rhs(&f, &data, &ring, 9).unwrap();
        assert_eq!(lhs.augment().unwrap(), rhs.augment().unwrap());
    }

    #[test]
    fn rw_rhs_with_two_nonzero_v_terms() {
        // a p-typical law with v_1 = v_2 = 1 exercises the formal-sum fold
        // over two bracket terms
        let f = FormalGroupLaw::p_typical(3, &[1, 1], 12).unwrap();
        let r = f.ring().clone();
        let data = f.extract_v().unwrap();
        let nonzero = data.v_coeffs.values().filter(|v| !v.is_zero()).count();
        assert!(nonzero >= 2, "p-typical law should have two v terms");
        let rhs = rw_rhs(&f, &data, &r, 12).unwrap();
        // leading term is b_1^p s^p with v_1 = 1 embedded as a scalar
        let expected = CoopElement::from_key(&r, CoopKey::b(1, 3));
        assert_eq!(rhs.coefficient(3).unwrap(), expected);
        // the s^{p^2} coefficient mixes the b(s)^{p^2} head with cross terms
        // from the fold; it must contain the b_1^9 monomial
        let at_9 = rhs.coefficient(9).unwrap();
        let b1_9 = CoopKey::b(1, 9);
        assert!(at_9.terms().any(|(k, _)| *k == b1_9));
    }

    #[test]
    fn hopf_quotient_vanishes_mod_p() {
        let ring = Ring::prime_field(3).unwrap();
        let report = hopf_quotient_check(&ring, 3, 5).unwrap();
        assert!(report.pass, "q(b(s)^{{*3}}) = 3 b(s) = 0 mod 3");
    }

    #[test]
    fn hopf_quotient_single_factor_is_identity() {
        let ring = Ring::prime_field(3).unwrap();
        let b = b_series(&ring, 5);
        let out = hopf_quotient_leibniz(std::slice::from_ref(&b)).unwrap();
        assert_eq!(out, b);
    }

    #[test]
    fn hopf_quotient_of_one_star_one() {
        // q(1 * 1) = eps(1) 1 + eps(1) 1 = 2
        let ring = Ring::prime_field(5).unwrap();
        let mut one = CoopSeries::zero(&ring, 4);
        one.add_term(0, CoopElement::one(&ring));
        let out = hopf_quotient_leibniz(&[one.clone(), one]).unwrap();
        assert_eq!(
            out.coefficient(0).unwrap(),
            CoopElement::scalar(ring.scalar_i64(2))
        );
    }

    #[test]
    fn term_order_is_graded() {
        let big = CoopKey::b(1, 12).mul(&CoopKey::v(2, 1)); // 13 symbols
        let small = CoopKey::b(1, 4); // 4 symbols
        assert!(big > small);
        // e outranks b_1 at equal total degree
        assert!(CoopKey::e(1) > CoopKey::b(1, 1));
        // b_1 outranks b_2 at equal total degree
        assert!(CoopKey::b(1, 1) > CoopKey::b(2, 1));
        // b's outrank v's
        assert!(CoopKey::b(2, 1) > CoopKey::v(1, 1));
    }
}
