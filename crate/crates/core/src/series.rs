//! Truncated multivariate formal power series over a coefficient ring.
//!
//! A `Series` stores terms of total degree <= N (the precision) in a sparse
//! map keyed by exponent vector; the map is graded-lex ordered so iteration
//! runs in ascending total degree and truncated products can break early.
//! Coefficient queries beyond the precision are an explicit error, never a
//! silent zero.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeff::{CoeffElement, CoeffTermData, Ring};
use crate::error::{Error, Result};

/// Exponent vector with cached total degree.  The derived `Ord` compares the
/// degree first, giving the graded ordering the arithmetic kernels rely on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Monomial {
        let degree = exps.iter().sum();
        Monomial { degree, exps }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree + other.degree,
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    ring: Ring,
    vars: Arc<Vec<String>>,
    precision: u32,
    terms: BTreeMap<Monomial, CoeffElement>,
}

impl Series {
    pub fn zero(ring: &Ring, vars: &[&str], precision: u32) -> Series {
        Series {
            ring: ring.clone(),
            vars: Arc::new(vars.iter().map(|s| s.to_string()).collect()),
            precision,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, vars: &[&str], c: CoeffElement, precision: u32) -> Series {
        let mut s = Series::zero(ring, vars, precision);
        s.add_term(Monomial::new(vec![0; s.vars.len()]), c);
        s
    }

    pub fn one(ring: &Ring, vars: &[&str], precision: u32) -> Series {
        Series::constant(ring, vars, ring.one(), precision)
    }

    /// The series `name` itself.
    pub fn variable(ring: &Ring, vars: &[&str], name: &str, precision: u32) -> Result<Series> {
        let mut s = Series::zero(ring, vars, precision);
        let idx = s.var_index(name)?;
        let mut exps = vec![0; s.vars.len()];
        exps[idx] = 1;
        s.add_term(Monomial::new(exps), ring.one());
        Ok(s)
    }

    /// c * prod vars^exps.
    pub fn monomial(
        ring: &Ring,
        vars: &[&str],
        exps: &[u32],
        c: CoeffElement,
        precision: u32,
    ) -> Series {
        let mut s = Series::zero(ring, vars, precision);
        s.add_term(Monomial::new(exps.to_vec()), c);
        s
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CoeffElement)> {
        self.terms.iter()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Add c * m into the series, truncating and keeping canonical form.
    pub fn add_term_pub(&mut self, m: Monomial, c: CoeffElement) {
        self.add_term(m, c);
    }

    fn add_term(&mut self, m: Monomial, c: CoeffElement) {
        if m.degree > self.precision || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.add(&c).expect("same ring");
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_compatible(&self, other: &Series) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.vars != other.vars && *self.vars != *other.vars {
            return Err(Error::VariableMismatch);
        }
        Ok(())
    }

    pub fn truncate(&self, precision: u32) -> Series {
        let precision = precision.min(self.precision);
        Series {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            precision,
            terms: self
                .terms
                .iter()
                .take_while(|(m, _)| m.degree <= precision)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_compatible(other)?;
        let precision = self.precision.min(other.precision);
        let mut out = self.truncate(precision);
        for (m, c) in &other.terms {
            if m.degree > precision {
                break;
            }
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Series {
        Series {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            precision: self.precision,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CoeffElement) -> Result<Series> {
        if self.ring != *c.ring() {
            return Err(Error::RingMismatch);
        }
        let mut out = Series::zero_like(self, self.precision);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c)?);
        }
        Ok(out)
    }

    fn zero_like(template: &Series, precision: u32) -> Series {
        Series {
            ring: template.ring.clone(),
            vars: template.vars.clone(),
            precision,
            terms: BTreeMap::new(),
        }
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_compatible(other)?;
        let precision = self.precision.min(other.precision);
        let mut out = Series::zero_like(self, precision);
        // Graded iteration lets the inner loop stop once degrees overflow.
        for (ma, ca) in &self.terms {
            if ma.degree > precision {
                break;
            }
            for (mb, cb) in &other.terms {
                if ma.degree + mb.degree > precision {
                    break;
                }
                out.add_term(ma.mul(mb), ca.mul(cb)?);
            }
        }
        Ok(out)
    }

    /// Drop terms above the window without touching the precision.
    fn window(&self, w: u64) -> Series {
        Series {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            precision: self.precision,
            terms: self
                .terms
                .iter()
                .take_while(|(m, _)| m.degree() as u64 <= w)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Binary powering.  A partial power of exponent j is windowed at
    /// N - (e - j) * val: the remaining factors each contribute at least the
    /// valuation, so nothing that survives the final truncation is lost.
    pub fn pow(&self, e: u32) -> Result<Series> {
        let vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        if e == 0 {
            return Ok(Series::one(&self.ring, &vars, self.precision));
        }
        let n = self.precision as u64;
        let val = self.lowest_degree().map(u64::from).unwrap_or(n + 1);
        if val.saturating_mul(e as u64) > n {
            return Ok(Series::zero(&self.ring, &vars, self.precision));
        }
        let window = |j: u64| n - (e as u64 - j) * val;
        let mut acc: Option<(u64, Series)> = None;
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

    /// Stored coefficient or zero; degrees beyond the precision are an error
    /// ("unknown", not zero).
    pub fn coefficient(&self, exps: &[u32]) -> Result<CoeffElement> {
        let m = Monomial::new(exps.to_vec());
        if m.degree > self.precision {
            return Err(Error::BeyondPrecision {
                degree: m.degree,
                precision: self.precision,
            });
        }
        Ok(self
            .terms
            .get(&m)
            .cloned()
            .unwrap_or_else(|| self.ring.zero()))
    }

    pub fn constant_term(&self) -> CoeffElement {
        let m = Monomial::new(vec![0; self.vars.len()]);
        self.terms
            .get(&m)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree)
    }

    /// Sum of all coefficients of total degree d, as a quick homogeneous-slice view.
    pub fn coefficient_of_total_degree(&self, d: u32) -> Vec<(Monomial, CoeffElement)> {
        self.terms
            .iter()
            .filter(|(m, _)| m.degree == d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }

    /// Substitute series for variables.  Unassigned variables map to
    /// themselves in the target variable space (taken from any assigned
    /// series, or this one when the assignment is empty).  Every assigned
    /// series must share one ring and variable set and have zero constant
    /// term.
    pub fn substitute(&self, assignment: &BTreeMap<String, Series>) -> Result<Series> {
        let template = match assignment.values().next() {
            Some(s) => s.clone(),
            None => self.clone(),
        };
        for s in assignment.values() {
            template.check_compatible(s)?;
        }
        if self.ring != template.ring {
            return Err(Error::RingMismatch);
        }
        for (name, s) in assignment {
            if !s.constant_term().is_zero() {
                return Err(Error::NonzeroConstantTerm(name.clone()));
            }
            self.var_index(name)?;
        }
        let precision = assignment
            .values()
            .map(|s| s.precision)
            .fold(self.precision, u32::min);

        let tvars: Vec<&str> = template.vars.iter().map(|s| s.as_str()).collect();
        // Images of this series' variables in the target space.
        let mut images: Vec<Series> = Vec::with_capacity(self.vars.len());
        for v in self.vars.iter() {
            match assignment.get(v) {
                Some(s) => images.push(s.truncate(precision)),
                None => images.push(Series::variable(&self.ring, &tvars, v, precision)?),
            }
        }

        // Per-variable power caches, filled in ascending exponent order with
        // binary powering across the gaps.
        let mut needed: Vec<Vec<u32>> = vec![Vec::new(); self.vars.len()];
        for m in self.terms.keys() {
            for (i, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    needed[i].push(e);
                }
            }
        }
        let mut caches: Vec<BTreeMap<u32, Series>> = Vec::with_capacity(self.vars.len());
        for (i, exps) in needed.iter_mut().enumerate() {
            exps.sort_unstable();
            exps.dedup();
            caches.push(power_cache(&images[i], exps, precision)?);
        }

        let mut out = Series::zero(&self.ring, &tvars, precision);
        for (m, c) in &self.terms {
            let mut prod = Series::constant(&self.ring, &tvars, c.clone(), precision);
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                prod = prod.mul(&caches[i][&e])?;
                if prod.is_zero() {
                    break;
                }
            }
            for (pm, pc) in prod.terms {
                out.add_term(pm, pc);
            }
        }
        Ok(out)
    }

    /// Compositional inverse of a one-variable series with zero constant
    /// term and invertible linear coefficient: returns g with f(g(x)) = x.
    pub fn reversion(&self) -> Result<Series> {
        debug_assert_eq!(self.vars.len(), 1, "reversion is one-variable only");
        let var = self.vars[0].clone();
        let one_exp = [1u32];
        let f1 = self.coefficient(&one_exp)?;
        let f1_inv = f1.inverse()?;
        if !self.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm(var));
        }
        let n = self.precision;
        let vars: Vec<&str> = vec![&var];
        let mut g = Series::monomial(&self.ring, &vars, &[1], f1_inv.clone(), n);
        // Solve degree by degree: with g correct below degree d the error
        // coefficient of f(g) at degree d is linear in the correction.
        loop {
            let mut assignment = BTreeMap::new();
            assignment.insert(var.clone(), g.clone());
            let err = self
                .substitute(&assignment)?
                .sub(&Series::variable(&self.ring, &vars, &var, n)?)?;
            match err.lowest_degree() {
                None => return Ok(g),
                Some(d) => {
                    debug_assert!(d >= 2, "linear term already matched");
                    let e = err.coefficient(&[d])?;
                    let delta = e.mul(&f1_inv)?.neg();
                    g.add_term(Monomial::new(vec![d]), delta);
                }
            }
        }
    }

    /// Map all coefficients through a characteristic-p reduction.
    pub fn reduce_mod_p(&self, target: &Ring) -> Result<Series> {
        let vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        let mut out = Series::zero(target, &vars, self.precision);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.reduce_mod_p(target)?);
        }
        Ok(out)
    }

    /// Divide exactly by the named variable; every term must contain it.
    pub fn div_exact_by_var(&self, name: &str) -> Result<Series> {
        let idx = self.var_index(name)?;
        let mut out = Series::zero_like(self, self.precision);
        for (m, c) in &self.terms {
            if m.exps[idx] == 0 {
                return Err(Error::BadData(format!(
                    "term {} not divisible by {name}",
                    DisplayMonomial(m, &self.vars)
                )));
            }
            let mut exps = m.exps.clone();
            exps[idx] -= 1;
            out.add_term(Monomial::new(exps), c.clone());
        }
        Ok(out)
    }

    /// Rename variables without touching terms (arity must match).
    pub fn rename_vars(&self, vars: &[&str]) -> Series {
        debug_assert_eq!(vars.len(), self.vars.len());
        Series {
            ring: self.ring.clone(),
            vars: Arc::new(vars.iter().map(|s| s.to_string()).collect()),
            precision: self.precision,
            terms: self.terms.clone(),
        }
    }
}

fn power_cache(base: &Series, exponents: &[u32], precision: u32) -> Result<BTreeMap<u32, Series>> {
    let mut cache: BTreeMap<u32, Series> = BTreeMap::new();
    if exponents.is_empty() {
        return Ok(cache);
    }
    // Powers of a zero-constant-term series of exponent > precision vanish;
    // keep them as zero series so lookups stay uniform.
    let mut current: Option<(u32, Series)> = None;
    for &e in exponents {
        let next = match &current {
            None => base.pow(e)?,
            Some((prev_e, prev)) => {
                let gap = e - prev_e;
                prev.mul(&base.pow(gap)?)?
            }
        };
        let next = next.truncate(precision);
        cache.insert(e, next.clone());
        current = Some((e, next));
    }
    Ok(cache)
}

struct DisplayMonomial<'a>(&'a Monomial, &'a [String]);

impl fmt::Display for DisplayMonomial<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &e) in self.0.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if e == 1 {
                parts.push(self.1[i].clone());
            } else {
                parts.push(format!("{}^{}", self.1[i], e));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = DisplayMonomial(m, &self.vars);
            if m.degree == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else if c.term_count() > 1 {
                write!(f, "({c})*{mono}")?;
            } else {
                write!(f, "{c}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[N={}]({})", self.precision, self)
    }
}

// ---------------------------------------------------------------------------
// JSON form: {vars, precision, terms: [{exps, coeff}]}
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesData {
    pub vars: Vec<String>,
    pub precision: u32,
    pub terms: Vec<SeriesTermData>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesTermData {
    pub exps: Vec<u32>,
    pub coeff: Vec<CoeffTermData>,
}

impl Series {
    pub fn to_data(&self) -> SeriesData {
        SeriesData {
            vars: self.vars.to_vec(),
            precision: self.precision,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| SeriesTermData {
                    exps: m.exps.clone(),
                    coeff: c.to_data(),
                })
                .collect(),
        }
    }

    pub fn from_data(ring: &Ring, data: &SeriesData) -> Result<Series> {
        let vars: Vec<&str> = data.vars.iter().map(|s| s.as_str()).collect();
        let mut out = Series::zero(ring, &vars, data.precision);
        for term in &data.terms {
            if term.exps.len() != vars.len() {
                return Err(Error::BadData(format!(
                    "exponent vector {:?} does not match {} variables",
                    term.exps,
                    vars.len()
                )));
            }
            let c = CoeffElement::from_data(ring, &term.coeff)?;
            out.add_term(Monomial::new(term.exps.clone()), c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RingSpec;

    fn f3() -> Ring {
        Ring::prime_field(3).unwrap()
    }

    #[test]
    fn add_doubles_a_variable() {
        let r = f3();
        let s = Series::variable(&r, &["s"], "s", 10).unwrap();
        let sum = s.add(&s).unwrap();
        assert_eq!(sum.coefficient(&[1]).unwrap(), r.scalar_i64(2));
    }

    #[test]
    fn truncation_kills_high_degree_products() {
        // s * s^2 at N = 2 is 0
        let r = f3();
        let s = Series::variable(&r, &["s"], "s", 2).unwrap();
        let s2 = s.mul(&s).unwrap();
        assert!(s.mul(&s2).unwrap().is_zero());
    }

    #[test]
    fn hand_expansion_one_plus_s_times_one_minus_s() {
        let r = Ring::rationals();
        let one = Series::one(&r, &["s"], 5);
        let s = Series::variable(&r, &["s"], "s", 5).unwrap();
        let prod = one.add(&s).unwrap().mul(&one.sub(&s).unwrap()).unwrap();
        let expected = one.sub(&s.mul(&s).unwrap()).unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn substitute_square_of_s_plus_s_squared() {
        // f = x^2, x -> s + s^2 at N = 3 gives s^2 + 2 s^3
        let r = Ring::rationals();
        let x = Series::variable(&r, &["x"], "x", 3).unwrap();
        let f = x.mul(&x).unwrap();
        let s = Series::variable(&r, &["s"], "s", 3).unwrap();
        let arg = s.add(&s.mul(&s).unwrap()).unwrap();
        let mut assignment = BTreeMap::new();
        assignment.insert("x".to_string(), arg);
        let result = f.substitute(&assignment).unwrap();
        assert_eq!(result.coefficient(&[2]).unwrap(), r.scalar_i64(1));
        assert_eq!(result.coefficient(&[3]).unwrap(), r.scalar_i64(2));
        assert_eq!(result.term_count(), 2);
    }

    #[test]
    fn identity_substitution_is_identity() {
        let r = f3();
        let x = Series::variable(&r, &["x"], "x", 6).unwrap();
        let f = x.pow(2).unwrap().add(&x).unwrap();
        let mut assignment = BTreeMap::new();
        assignment.insert("x".to_string(), x.clone());
        assert_eq!(f.substitute(&assignment).unwrap(), f);
    }

    #[test]
    fn substitute_monomial_shape_of_p_series() {
        // f = x, x -> v_n s^{p^n} comes back unchanged
        let ring = Ring::morava_k(3, 1).unwrap();
        let x = Series::variable(&ring, &["x"], "x", 9).unwrap();
        let v1 = ring.generator("v1").unwrap();
        let image = Series::monomial(&ring, &["s"], &[3], v1, 9);
        let mut assignment = BTreeMap::new();
        assignment.insert("x".to_string(), image.clone());
        assert_eq!(x.substitute(&assignment).unwrap(), image);
    }

    #[test]
    fn substitution_rejects_nonzero_constant_term() {
        let r = f3();
        let x = Series::variable(&r, &["x"], "x", 4).unwrap();
        let bad = Series::one(&r, &["s"], 4);
        let mut assignment = BTreeMap::new();
        assignment.insert("x".to_string(), bad);
        assert!(matches!(
            x.substitute(&assignment).unwrap_err(),
            Error::NonzeroConstantTerm(_)
        ));
    }

    #[test]
    fn coefficient_of_s_p_in_x_p_under_x_to_s() {
        let r = f3();
        let x = Series::variable(&r, &["x"], "x", 9).unwrap();
        let f = x.pow(3).unwrap();
        let s = Series::variable(&r, &["s"], "s", 9).unwrap();
        let mut assignment = BTreeMap::new();
        assignment.insert("x".to_string(), s);
        let g = f.substitute(&assignment).unwrap();
        assert_eq!(g.coefficient(&[3]).unwrap(), r.one());
    }

    #[test]
    fn coefficient_beyond_precision_is_an_error() {
        let r = f3();
        let s = Series::variable(&r, &["s"], "s", 4).unwrap();
        assert_eq!(
            s.coefficient(&[5]).unwrap_err(),
            Error::BeyondPrecision {
                degree: 5,
                precision: 4
            }
        );
    }

    #[test]
    fn variable_mismatch_is_an_error() {
        let r = f3();
        let s = Series::variable(&r, &["s"], "s", 4).unwrap();
        let t = Series::variable(&r, &["t"], "t", 4).unwrap();
        assert_eq!(s.add(&t).unwrap_err(), Error::VariableMismatch);
    }

    #[test]
    fn reversion_of_geometric_like_series() {
        // f = x + x^2; g must satisfy f(g(x)) = x
        let r = Ring::rationals();
        let x = Series::variable(&r, &["x"], "x", 8).unwrap();
        let f = x.add(&x.pow(2).unwrap()).unwrap();
        let g = f.reversion().unwrap();
        let mut assignment = BTreeMap::new();
        assignment.insert("x".to_string(), g);
        assert_eq!(f.substitute(&assignment).unwrap(), x);
    }

    #[test]
    fn json_round_trip() {
        let ring = Ring::new(RingSpec::new(5, vec![("v2", -48, true)])).unwrap();
        let v2 = ring.generator("v2").unwrap();
        let s = Series::monomial(&ring, &["x1", "x2"], &[1, 2], v2, 7);
        let s = s.add(&Series::one(&ring, &["x1", "x2"], 7)).unwrap();
        let data = s.to_data();
        let back = Series::from_data(&ring, &data).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn display_matches_cli_format() {
        let ring = Ring::morava_k(3, 1).unwrap();
        let v1 = ring.generator("v1").unwrap();
        let s = Series::monomial(&ring, &["s"], &[3], v1, 9);
        assert_eq!(s.to_string(), "v1*s^3");
    }
}
