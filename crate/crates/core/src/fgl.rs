//! Formal group laws and their derived series: construction, axiom checking,
//! formal sums, n-series and p-series, mod-p v-coefficient extraction,
//! height, and the tail decomposition F = x1 + x2*R1(x1,x2).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use crate::coeff::{CoeffElement, Degree, Ring};
use crate::error::{Error, Result};
use crate::series::{Monomial, Series};

pub const VAR_X: &str = "x";
pub const VAR_X1: &str = "x1";
pub const VAR_X2: &str = "x2";

/// A two-variable series over a base ring satisfying the group law axioms
/// to the stated precision.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw {
    ring: Ring,
    series: Series,
    precision: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AxiomCheck {
    Pass,
    Fail {
        axiom: &'static str,
        monomial: String,
    },
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        matches!(self, AxiomCheck::Pass)
    }
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub unital: AxiomCheck,
    pub commutative: AxiomCheck,
    pub associative: AxiomCheck,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.unital.passed() && self.commutative.passed() && self.associative.passed()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, check) in [
            ("unitality", &self.unital),
            ("commutativity", &self.commutative),
            ("associativity", &self.associative),
        ] {
            match check {
                AxiomCheck::Pass => writeln!(f, "{name}: pass")?,
                AxiomCheck::Fail { monomial, .. } => writeln!(f, "{name}: FAIL at {monomial}")?,
            }
        }
        Ok(())
    }
}

/// How far the height search could see given the precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Height {
    Exact(u32),
    /// All v_i vanish for i below this bound; the true height is >= it.
    AtLeast(u32),
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Exact(n) => write!(f, "{n}"),
            Height::AtLeast(n) => write!(f, ">= {n}"),
        }
    }
}

/// The p-series of a formal group law together with the mod-p v-coefficients
/// peeled from it and the resulting height.
#[derive(Clone, Debug)]
pub struct PSeriesData {
    pub p: u64,
    pub p_series: Series,
    pub v_coeffs: BTreeMap<u32, CoeffElement>,
    pub height: Height,
    /// Largest index i with p^i <= precision; the search bound.
    pub n_max: u32,
}

impl FormalGroupLaw {
    /// Validate a candidate two-variable series as a formal group law.
    pub fn from_series(series: Series) -> Result<FormalGroupLaw> {
        if series.vars() != [VAR_X1.to_string(), VAR_X2.to_string()] {
            return Err(Error::BadData(
                "formal group law must be a series in x1, x2".into(),
            ));
        }
        let fgl = FormalGroupLaw {
            ring: series.ring().clone(),
            precision: series.precision(),
            series,
        };
        let report = fgl.check_axioms()?;
        if !report.all_pass() {
            return Err(Error::AxiomFailure(format!("{report}")));
        }
        Ok(fgl)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// F = x1 + x2.
    pub fn additive(p: u64, precision: u32) -> Result<FormalGroupLaw> {
        let ring = if p == 0 {
            Ring::rationals()
        } else {
            Ring::prime_field(p)?
        };
        Self::additive_over(&ring, precision)
    }

    pub fn additive_over(ring: &Ring, precision: u32) -> Result<FormalGroupLaw> {
        let x1 = Series::variable(ring, &[VAR_X1, VAR_X2], VAR_X1, precision)?;
        let x2 = Series::variable(ring, &[VAR_X1, VAR_X2], VAR_X2, precision)?;
        FormalGroupLaw::from_series(x1.add(&x2)?)
    }

    /// F = x1 + x2 + x1*x2, from (1+x)(1+y) - 1.
    pub fn multiplicative(p: u64, precision: u32) -> Result<FormalGroupLaw> {
        let ring = if p == 0 {
            Ring::rationals()
        } else {
            Ring::prime_field(p)?
        };
        let x1 = Series::variable(&ring, &[VAR_X1, VAR_X2], VAR_X1, precision)?;
        let x2 = Series::variable(&ring, &[VAR_X1, VAR_X2], VAR_X2, precision)?;
        FormalGroupLaw::from_series(x1.add(&x2)?.add(&x1.mul(&x2)?)?)
    }

    /// The height-n Honda group law over the rationals, built from its
    /// logarithm l(x) = sum_i x^{p^{ni}} / p^i and the compositional inverse.
    /// The axiom check over Q is expensive at large precision; `honda` below
    /// validates the mod-p reduction instead.
    pub fn honda_rational(p: u64, n: u32, precision: u32) -> Result<FormalGroupLaw> {
        FormalGroupLaw::from_series(honda_rational_series(p, n, precision)?)
    }

    /// Honda group law reduced mod p; every coefficient must be p-integral.
    pub fn honda(p: u64, n: u32, precision: u32) -> Result<FormalGroupLaw> {
        let rational = honda_rational_series(p, n, precision)?;
        let fp = Ring::prime_field(p)?;
        FormalGroupLaw::from_series(rational.reduce_mod_p(&fp)?)
    }

    /// A p-typical group law over F_p with prescribed scalar values for the
    /// v-coefficients, through the functional-equation logarithm
    /// `l_0 = 1, l_i = (1/p) sum_{j<i} l_j v_{i-j}^{p^j}`.  With v_n = 1 and
    /// the rest zero this reproduces the Honda law; mixed values give
    /// p-series with several nonzero v_i.
    pub fn p_typical(p: u64, v_values: &[i64], precision: u32) -> Result<FormalGroupLaw> {
        Ring::prime_field(p)?;
        let q = Ring::rationals();
        let depth = log_floor(precision, p) as usize;
        let value = |i: usize| -> BigRational {
            if i >= 1 && i <= v_values.len() {
                BigRational::from(BigInt::from(v_values[i - 1]))
            } else {
                BigRational::from(BigInt::from(0))
            }
        };
        let mut l: Vec<BigRational> = vec![BigRational::one()];
        for i in 1..=depth {
            let mut acc = BigRational::from(BigInt::from(0));
            for (j, lj) in l.iter().enumerate() {
                let exp = BigInt::from(p).pow(j as u32);
                let v = value(i - j);
                acc += lj * pow_rational(&v, &exp);
            }
            l.push(acc / BigRational::from(BigInt::from(p)));
        }
        let mut log = Series::zero(&q, &[VAR_X], precision);
        for (i, li) in l.iter().enumerate() {
            let d = p.pow(i as u32);
            if d > precision as u64 {
                break;
            }
            log.add_term_pub(Monomial::new(vec![d as u32]), q.scalar_rational(li.clone()));
        }
        let exp = log.reversion()?;
        let l1 = one_var_into(&log, VAR_X1, precision)?;
        let l2 = one_var_into(&log, VAR_X2, precision)?;
        let mut assignment = BTreeMap::new();
        assignment.insert(VAR_X.to_string(), l1.add(&l2)?);
        let rational = exp.substitute(&assignment)?;
        let fp = Ring::prime_field(p)?;
        FormalGroupLaw::from_series(rational.reduce_mod_p(&fp)?)
    }

    /// The Morava K(n) group law over F_p[v_n, v_n^{-1}]: the Honda law with
    /// each degree-d monomial weighted by v_n^{(d-1)/(p^n-1)}.
    pub fn morava_k(p: u64, n: u32, precision: u32) -> Result<FormalGroupLaw> {
        let rational = honda_rational_series(p, n, precision)?;
        let fp = Ring::prime_field(p)?;
        let plain = rational.reduce_mod_p(&fp)?;
        let ring = Ring::morava_k(p, n)?;
        let vn_name = format!("v{n}");
        let period = (p as i64).pow(n) - 1;
        let mut out = Series::zero(&ring, &[VAR_X1, VAR_X2], precision);
        for (m, c) in plain.terms() {
            let d = m.degree() as i64;
            debug_assert_eq!((d - 1) % period, 0, "Honda law is graded mod p^n - 1");
            let weight = (d - 1) / period;
            let mut coeff = ring.monomial(&[(vn_name.as_str(), weight)], 1)?;
            // carry the scalar over from the F_p coefficient
            let scalar = fp_scalar_value(c);
            coeff = coeff.mul_i64(scalar as i64);
            out.add_term_pub(m.clone(), coeff);
        }
        FormalGroupLaw::from_series(out)
    }

    /// Pass/fail per axiom, reporting the first offending monomial.
    pub fn check_axioms(&self) -> Result<AxiomReport> {
        Ok(AxiomReport {
            unital: self.check_unital()?,
            commutative: self.check_commutative(),
            associative: self.check_associative()?,
        })
    }

    fn check_unital(&self) -> Result<AxiomCheck> {
        // F(x,0) = x and F(0,y) = y exactly: the x2-free slice must be x1
        // alone with coefficient 1, and symmetrically.
        for (slice_var, keep) in [(0usize, 1usize), (1, 0)] {
            for (m, c) in self.series.terms() {
                if m.exps()[keep] != 0 {
                    continue;
                }
                if m.exps()[slice_var] != 1 || !c.is_one() {
                    return Ok(AxiomCheck::Fail {
                        axiom: "unitality",
                        monomial: format!("x{}^{}", slice_var + 1, m.exps()[slice_var]),
                    });
                }
            }
            // the linear term itself must be present
            let mut exps = vec![0u32; 2];
            exps[slice_var] = 1;
            if !self.series.coefficient(&exps)?.is_one() {
                return Ok(AxiomCheck::Fail {
                    axiom: "unitality",
                    monomial: format!("x{}", slice_var + 1),
                });
            }
        }
        Ok(AxiomCheck::Pass)
    }

    fn check_commutative(&self) -> AxiomCheck {
        for (m, c) in self.series.terms() {
            let swapped = Monomial::new(vec![m.exps()[1], m.exps()[0]]);
            let other = self
                .series
                .coefficient(swapped.exps())
                .expect("within precision");
            if other != *c {
                return AxiomCheck::Fail {
                    axiom: "commutativity",
                    monomial: format!("x1^{}*x2^{}", m.exps()[0], m.exps()[1]),
                };
            }
        }
        AxiomCheck::Pass
    }

    fn check_associative(&self) -> Result<AxiomCheck> {
        let vars = [VAR_X1, VAR_X2, "x3"];
        let n = self.precision;
        let x1 = Series::variable(&self.ring, &vars, VAR_X1, n)?;
        let x2 = Series::variable(&self.ring, &vars, VAR_X2, n)?;
        let x3 = Series::variable(&self.ring, &vars, "x3", n)?;
        let inner_12 = self.plus(&x1, &x2)?;
        let inner_23 = self.plus(&x2, &x3)?;
        let lhs = self.plus(&inner_12, &x3)?;
        let rhs = self.plus(&x1, &inner_23)?;
        let diff = lhs.sub(&rhs)?;
        let verdict = match diff.terms().next() {
            None => AxiomCheck::Pass,
            Some((m, _)) => AxiomCheck::Fail {
                axiom: "associativity",
                monomial: format!("x1^{}*x2^{}*x3^{}", m.exps()[0], m.exps()[1], m.exps()[2]),
            },
        };
        Ok(verdict)
    }

    /// F(a, b) by substitution; a and b must live in a common variable space
    /// and have zero constant terms.
    pub fn plus(&self, a: &Series, b: &Series) -> Result<Series> {
        let mut assignment = BTreeMap::new();
        assignment.insert(VAR_X1.to_string(), a.clone());
        assignment.insert(VAR_X2.to_string(), b.clone());
        self.series.substitute(&assignment)
    }

    /// Left fold of the group law over the terms; the empty sum is 0.
    pub fn formal_sum(&self, terms: &[Series]) -> Result<Series> {
        let mut iter = terms.iter();
        let mut acc = match iter.next() {
            None => {
                return Ok(Series::zero(&self.ring, &[VAR_X], self.precision));
            }
            Some(first) => first.clone(),
        };
        for t in iter {
            acc = self.plus(t, &acc)?;
        }
        Ok(acc)
    }

    /// The formal inverse: the unique series i(x) with F(x, i(x)) = 0 to
    /// precision, found by raising the lowest error term degree by degree.
    pub fn inverse(&self) -> Result<Series> {
        let n = self.precision;
        let x = Series::variable(&self.ring, &[VAR_X], VAR_X, n)?;
        let mut iota = x.neg();
        loop {
            let err = self.plus(&x, &iota)?;
            match err.lowest_degree() {
                None => return Ok(iota),
                Some(d) => {
                    let c = err.coefficient(&[d])?;
                    iota.add_term_pub(Monomial::new(vec![d]), c.neg());
                }
            }
        }
    }

    /// `[n]_F(x)`: `[0] = 0`, `[1] = x`, `[n] = F(x, [n-1])`; negatives through the
    /// formal inverse.
    pub fn n_series(&self, n: i64) -> Result<Series> {
        let x = Series::variable(&self.ring, &[VAR_X], VAR_X, self.precision)?;
        if n == 0 {
            return Ok(Series::zero(&self.ring, &[VAR_X], self.precision));
        }
        let mut acc = x.clone();
        for _ in 1..n.unsigned_abs() {
            acc = self.plus(&x, &acc)?;
        }
        if n < 0 {
            let iota = self.inverse()?;
            let mut assignment = BTreeMap::new();
            assignment.insert(VAR_X.to_string(), acc);
            acc = iota.substitute(&assignment)?;
        }
        Ok(acc)
    }

    /// Peel the v-coefficients out of `[p]_F` over a characteristic-p base:
    /// the residual after formally subtracting v_i x^{p^i} must always have
    /// its lowest term at a p-power degree.
    pub fn extract_v(&self) -> Result<PSeriesData> {
        let p = self.ring.characteristic();
        if p == 0 {
            return Err(Error::BadData(
                "v-extraction requires a characteristic-p base ring".into(),
            ));
        }
        let p_series = self.n_series(p as i64)?;
        let n_max = log_floor(self.precision, p);
        let iota = self.inverse()?;
        let mut v_coeffs: BTreeMap<u32, CoeffElement> = BTreeMap::new();
        let mut residual = p_series.clone();
        let mut extracted_max = 0u32;
        while let Some(d) = residual.lowest_degree() {
            let j = match p_power_index(d, p) {
                Some(j) if j >= 1 => j,
                _ => return Err(Error::LowestTermNotPPower { degree: d, p }),
            };
            let vj = residual.coefficient(&[d])?;
            self.check_v_degree(j, &vj)?;
            v_coeffs.insert(j, vj.clone());
            extracted_max = j;
            // residual -_F v_j x^{p^j}
            let mono = Series::monomial(&self.ring, &[VAR_X], &[d], vj, self.precision);
            let mut assignment = BTreeMap::new();
            assignment.insert(VAR_X.to_string(), mono);
            let neg = iota.substitute(&assignment)?;
            residual = self.plus(&residual, &neg)?;
            if let Some(d2) = residual.lowest_degree() {
                debug_assert!(d2 > d, "formal difference must cancel the lowest term");
            }
        }
        let height = match v_coeffs.keys().next() {
            Some(&j) => Height::Exact(j),
            None => Height::AtLeast(n_max + 1),
        };
        // fill explicit zeros below the last extracted index for reporting
        for i in 1..extracted_max {
            v_coeffs.entry(i).or_insert_with(|| self.ring.zero());
        }
        Ok(PSeriesData {
            p,
            p_series,
            v_coeffs,
            height,
            n_max,
        })
    }

    fn check_v_degree(&self, i: u32, v: &CoeffElement) -> Result<()> {
        if self.ring.generator_count() == 0 {
            return Ok(());
        }
        let expected = -2 * ((self.ring.characteristic() as i64).pow(i) - 1);
        match v.degree() {
            Degree::Zero | Degree::Homogeneous(_) if v.is_zero() => Ok(()),
            Degree::Homogeneous(d) if d == expected => Ok(()),
            other => Err(Error::BadData(format!(
                "v_{i} has degree {other:?}, expected {expected}"
            ))),
        }
    }

    /// F = x1 + x2*R1(x1,x2) = x2 + x1*R2(x1,x2); division is exact because
    /// of strict unitality.
    pub fn tail_decompose(&self) -> Result<(Series, Series)> {
        let x1 = Series::variable(&self.ring, &[VAR_X1, VAR_X2], VAR_X1, self.precision)?;
        let x2 = Series::variable(&self.ring, &[VAR_X1, VAR_X2], VAR_X2, self.precision)?;
        let r1 = self.series.sub(&x1)?.div_exact_by_var(VAR_X2)?;
        let r2 = self.series.sub(&x2)?.div_exact_by_var(VAR_X1)?;
        Ok((r1, r2))
    }

    /// Conjugate by a strict coordinate change phi (one-variable, zero
    /// constant term, linear coefficient 1): phi(F(phi^{-1} x1, phi^{-1} x2)).
    pub fn coordinate_change(&self, phi: &Series) -> Result<FormalGroupLaw> {
        if !phi.coefficient(&[1]).map(|c| c.is_one()).unwrap_or(false) {
            return Err(Error::BadData(
                "coordinate change must be strict (linear coefficient 1)".into(),
            ));
        }
        let n = self.precision;
        let phi_inv = phi.reversion()?;
        let g1 = one_var_into(&phi_inv, VAR_X1, n)?;
        let g2 = one_var_into(&phi_inv, VAR_X2, n)?;
        let core = self.plus(&g1, &g2)?;
        let mut assignment = BTreeMap::new();
        assignment.insert(phi.vars()[0].clone(), core);
        let series = phi.substitute(&assignment)?.rename_vars(&[VAR_X1, VAR_X2]);
        FormalGroupLaw::from_series(series)
    }
}

/// The raw Honda series exp(log x1 + log x2) over Q, not axiom-checked.
fn honda_rational_series(p: u64, n: u32, precision: u32) -> Result<Series> {
    Ring::prime_field(p)?; // validates that p is prime
    if n == 0 {
        return Err(Error::HeightIndexZero);
    }
    let q = Ring::rationals();
    let log = honda_log(&q, p, n, precision)?;
    let exp = log.reversion()?;
    let l1 = one_var_into(&log, VAR_X1, precision)?;
    let l2 = one_var_into(&log, VAR_X2, precision)?;
    let sum = l1.add(&l2)?;
    let mut assignment = BTreeMap::new();
    assignment.insert(VAR_X.to_string(), sum);
    exp.substitute(&assignment)
}

/// The Honda logarithm sum_{i >= 0, p^{ni} <= N} x^{p^{ni}} / p^i over Q.
fn honda_log(q: &Ring, p: u64, n: u32, precision: u32) -> Result<Series> {
    let mut log = Series::zero(q, &[VAR_X], precision);
    let mut exponent: u64 = 1;
    let mut denom = BigRational::one();
    let step = p.pow(n);
    let p_big = BigRational::from(BigInt::from(p));
    loop {
        if exponent > precision as u64 {
            break;
        }
        log.add_term_pub(
            Monomial::new(vec![exponent as u32]),
            q.scalar_rational(denom.clone()),
        );
        match exponent.checked_mul(step) {
            Some(next) => exponent = next,
            None => break,
        }
        denom /= &p_big;
    }
    Ok(log)
}

/// Image of a one-variable series under renaming its variable to `target`
/// inside the (x1, x2) space.
fn one_var_into(f: &Series, target: &str, precision: u32) -> Result<Series> {
    let var = Series::variable(f.ring(), &[VAR_X1, VAR_X2], target, precision)?;
    let mut assignment = BTreeMap::new();
    assignment.insert(f.vars()[0].clone(), var);
    f.substitute(&assignment)
}

fn pow_rational(base: &BigRational, exp: &BigInt) -> BigRational {
    use num_traits::ToPrimitive;
    let mut e = exp.to_u64().expect("exponent fits at these precisions");
    let mut acc = BigRational::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = b.clone() * &b;
        }
    }
    acc
}

fn log_floor(n: u32, p: u64) -> u32 {
    let mut k = 0;
    let mut power = p;
    while power <= n as u64 {
        k += 1;
        match power.checked_mul(p) {
            Some(next) => power = next,
            None => break,
        }
    }
    k
}

fn p_power_index(d: u32, p: u64) -> Option<u32> {
    let mut power = 1u64;
    let mut i = 0u32;
    while power < d as u64 {
        power = power.checked_mul(p)?;
        i += 1;
    }
    (power == d as u64).then_some(i)
}

fn fp_scalar_value(c: &CoeffElement) -> u64 {
    debug_assert!(c.term_count() <= 1);
    match c.terms().next() {
        Some((_, crate::coeff::Scalar::Fp(r))) => *r,
        Some(_) => unreachable!("mod-p series carry Fp scalars"),
        None => 0,
    }
}

/// A strict coordinate change x + a_2 x^2 + ... + a_D x^D with random
/// coefficients, homogeneous when the ring is graded.
pub fn random_strict_coordinate_change<R: Rng>(
    ring: &Ring,
    max_degree: u32,
    precision: u32,
    rng: &mut R,
) -> Result<Series> {
    let p = ring.characteristic();
    debug_assert!(p > 0);
    let mut phi = Series::variable(ring, &[VAR_X], VAR_X, precision)?;
    for d in 2..=max_degree {
        let scalar = rng.gen_range(0..p) as i64;
        if scalar == 0 {
            continue;
        }
        let coeff = if ring.generator_count() == 0 {
            ring.scalar_i64(scalar)
        } else if ring.generator_count() == 1 && ring.generator_spec(0).invertible {
            // degree of a_d must be a generator multiple for a graded change
            let gen_name = ring.generator_spec(0).name.clone();
            let gen_degree = ring.generator_spec(0).degree;
            let wanted = -2 * (d as i64 - 1);
            if gen_degree != 0 && wanted % gen_degree == 0 {
                let k = wanted / gen_degree;
                ring.monomial(&[(gen_name.as_str(), k)], scalar)?
            } else {
                continue;
            }
        } else {
            continue;
        };
        phi.add_term_pub(Monomial::new(vec![d]), coeff);
    }
    Ok(phi)
}
