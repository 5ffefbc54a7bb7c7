//! Oriented rewrite rules over co-operation elements, the recursion that
//! derives them by equating powers of s in the p-series identity, and the
//! loop heights computed by rewriting.
//!
//! Rules are monomial-oriented: an element reduces by replacing any monomial
//! divisible by a rule's left-hand side.  Every rule strictly decreases the
//! degree-lex term order, so reduction terminates.

use std::fmt;

use crate::coeff::{CoeffElement, Ring, RingSpec};
use crate::coop::{b_series_additive, rw_lhs, CoopElement, CoopKey, CoopSeries};
use crate::error::{Error, Result};
use crate::fgl::{Height, PSeriesData};
use crate::series::Series;

/// One oriented rewrite: lhs-monomial -> rhs-element, bidegree-homogeneous
/// and strictly decreasing in the term order.
#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub name: String,
    pub lhs: CoopKey,
    pub rhs: CoopElement,
}

impl RewriteRule {
    pub fn new(name: &str, lhs: CoopKey, rhs: CoopElement, p: u64) -> Result<RewriteRule> {
        let rule = RewriteRule {
            name: name.to_string(),
            lhs,
            rhs,
        };
        rule.validate(p)?;
        Ok(rule)
    }

    fn validate(&self, p: u64) -> Result<()> {
        let lhs_elt = CoopElement::from_key(self.rhs.ring(), self.lhs.clone());
        let lhs_bd = lhs_elt.bidegree(p)?.expect("monomial is nonzero");
        if let Some(rhs_bd) = self.rhs.bidegree(p)? {
            if rhs_bd != lhs_bd {
                return Err(Error::InhomogeneousRule {
                    name: self.name.clone(),
                    lhs: format!("{} at {lhs_bd}", self.lhs),
                    rhs: format!("{} at {rhs_bd}", self.rhs),
                });
            }
        }
        for (key, _) in self.rhs.terms() {
            if *key >= self.lhs {
                return Err(Error::NonDecreasingRule(self.name.clone()));
            }
        }
        Ok(())
    }

    pub fn is_zero_rule(&self) -> bool {
        self.rhs.is_zero()
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// A set of oriented rewrites together with the derivation context it came
/// from: the prime, the height, the invertible leading coefficient of the
/// target theory's p-series, and the pi-values pi_m = (p^m - 1)/(p - 1).
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub ring: Ring,
    pub p: u64,
    pub n: u32,
    pub vn_e: CoeffElement,
    pub rules: Vec<RewriteRule>,
    pub pi: Vec<u64>,
}

impl RelationSet {
    pub fn empty(ring: &Ring, p: u64, n: u32, vn_e: CoeffElement) -> RelationSet {
        RelationSet {
            ring: ring.clone(),
            p,
            n,
            vn_e,
            rules: Vec::new(),
            pi: (1..=n + 1).map(|m| pi_value(p, m)).collect(),
        }
    }

    /// Apply b_1 = e^2 to every rule, staying in the additive quotient.
    pub fn to_e_form(&self) -> Result<RelationSet> {
        let mut out = self.clone();
        out.rules = self
            .rules
            .iter()
            .map(|r| {
                RewriteRule::new(
                    &format!("{}(e)", r.name),
                    r.lhs.to_e_form(),
                    r.rhs.to_e_form(),
                    self.p,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(out)
    }

    pub fn merged_with(&self, extra: &RelationSet) -> RelationSet {
        let mut out = self.clone();
        out.rules.extend(extra.rules.iter().cloned());
        out
    }
}

/// pi_m = (p^m - 1)/(p - 1).
pub fn pi_value(p: u64, m: u32) -> u64 {
    (p.pow(m) - 1) / (p - 1)
}

/// Reduce to normal form, largest reducible monomial first, rules in order.
pub fn reduce(x: &CoopElement, rules: &[RewriteRule]) -> CoopElement {
    reduce_with_choice(x, rules, &mut |n_candidates: usize| n_candidates - 1)
}

/// Reduction with an explicit strategy: the chooser picks which of the
/// currently reducible (monomial, rule) pairs to fire.  Used to check
/// confluence on random strategies.
pub fn reduce_with_choice(
    x: &CoopElement,
    rules: &[RewriteRule],
    chooser: &mut dyn FnMut(usize) -> usize,
) -> CoopElement {
    let mut current = x.clone();
    loop {
        let mut candidates: Vec<(CoopKey, CoeffElement, usize)> = Vec::new();
        for (key, coeff) in current.terms() {
            for (ri, rule) in rules.iter().enumerate() {
                if key.divisible_by(&rule.lhs) {
                    candidates.push((key.clone(), coeff.clone(), ri));
                }
            }
        }
        if candidates.is_empty() {
            return current;
        }
        let pick = chooser(candidates.len()).min(candidates.len() - 1);
        let (key, coeff, ri) = candidates.swap_remove(pick);
        let quotient = key.div_exact(&rules[ri].lhs);
        let replacement = rules[ri]
            .rhs
            .mul_key(&quotient)
            .scale(&coeff)
            .expect("same ring");
        let mut removed = CoopElement::zero(current.ring());
        removed.add_term(key, coeff.neg());
        current = current.add(&removed).add(&replacement);
    }
}

/// What happened at stage m of the derivation, for reporting.
#[derive(Clone, Debug)]
pub struct DerivationStage {
    pub m: u32,
    /// s-degree at which coefficients were equated.
    pub degree: u32,
    /// Left side coefficient after multiplying through by b_1^{pi_m - 1}.
    pub lhs: CoopElement,
    /// Right side leading coefficient at the same stage.
    pub rhs: CoopElement,
    /// Divisibility certificates for the terms discarded via earlier rules.
    pub discards: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Derivation {
    pub relations: RelationSet,
    pub stages: Vec<DerivationStage>,
}

impl Derivation {
    pub fn intermediate_rules(&self) -> Vec<&RewriteRule> {
        self.relations
            .rules
            .iter()
            .filter(|r| r.is_zero_rule())
            .collect()
    }

    pub fn final_rule(&self) -> &RewriteRule {
        self.relations
            .rules
            .last()
            .expect("derivation emits at least the terminal rule")
    }
}

/// The generic target coefficient ring `F_p[vE_n, vE_n^{-1}]` used when only
/// (p, n) are given: exactly the data the derivation consumes.
pub fn generic_e_ring(p: u64, n: u32) -> Result<Ring> {
    let name = format!("vE{n}");
    let degree = -2 * ((p as i64).pow(n) - 1);
    Ring::new(RingSpec {
        characteristic: p,
        generators: vec![crate::coeff::GeneratorSpec {
            name,
            degree,
            invertible: true,
        }],
    })
}

/// Generic p-series data for a height-n target: `[p]_E(s) = vE_n s^{p^n}`.
pub fn generic_e_data(ring: &Ring, p: u64, n: u32, precision: u32) -> Result<PSeriesData> {
    let vn = ring.generator(&format!("vE{n}"))?;
    let d = p.pow(n);
    if d > precision as u64 {
        return Err(Error::PrecisionTooLow {
            precision,
            needed: d as u32,
        });
    }
    let p_series = Series::monomial(ring, &["s"], &[d as u32], vn.clone(), precision);
    let mut v_coeffs = std::collections::BTreeMap::new();
    v_coeffs.insert(n, vn);
    Ok(PSeriesData {
        p,
        p_series,
        v_coeffs,
        height: Height::Exact(n),
        n_max: n,
    })
}

/// Run the coefficient-equating recursion against a generic height-n target.
pub fn derive_relations(p: u64, n: u32, precision: u32) -> Result<Derivation> {
    let ring = generic_e_ring(p, n)?;
    let e_data = generic_e_data(&ring, p, n, precision)?;
    derive_relations_from(&e_data, &ring, n, precision)
}

/// The recursion itself, against explicit target p-series data.
///
/// Stage m multiplies the identity through by b_1^{pi_m - 1}.  Terms with
/// index j < m are discarded because any monomial they contribute is
/// divisible by the already-derived rule `b_1^{pi_{j+1}-1}[v_j] -> 0` (the
/// multiplier alone supplies the b_1 power); the certificate for each
/// discard is checked mechanically.  What remains has its s^{p^m}
/// coefficient computed exactly on both sides, and equating them either
/// emits the next zero rule (m < n) or terminates with the binomial
/// relation `vE_n b_1^{pi_n} = b_1^{pi_{n+1}-1}[v_n]`, oriented to rewrite
/// the bracket side down to the scalar side.
pub fn derive_relations_from(
    e_data: &PSeriesData,
    ring: &Ring,
    n: u32,
    precision: u32,
) -> Result<Derivation> {
    let p = e_data.p;
    if p < 3 {
        return Err(Error::EvenOrNonPrime(p));
    }
    if n == 0 {
        return Err(Error::HeightIndexZero);
    }
    let needed = p.pow(n);
    if needed > precision as u64 {
        return Err(Error::PrecisionTooLow {
            precision,
            needed: needed as u32,
        });
    }
    // leading coefficient of the E-side must be invertible
    let vn_e = match e_data.v_coeffs.get(&n) {
        Some(v) => v.clone(),
        None => return Err(Error::LeadingCoefficientNotInvertible(n)),
    };
    if vn_e.inverse().is_err() {
        return Err(Error::LeadingCoefficientNotInvertible(n));
    }
    for (i, v) in &e_data.v_coeffs {
        if *i < n && !v.is_zero() {
            return Err(Error::BadData(format!(
                "target p-series has v_{i} != 0 below the stated height {n}"
            )));
        }
    }

    let lhs_series = rw_lhs(e_data, ring, needed as u32)?;
    let mut relations = RelationSet::empty(ring, p, n, vn_e.clone());
    let mut stages = Vec::new();

    for m in 1..=n {
        let pi_m = pi_value(p, m);
        let pi_m1 = pi_value(p, m + 1);
        let degree = p.pow(m) as u32;
        let multiplier = CoopKey::b(1, (pi_m - 1) as u32);

        // discard certificates for the earlier bracket terms
        let mut discards = Vec::new();
        for j in 1..m {
            let witness = multiplier.mul(&CoopKey::v(j, 1));
            let rule = &relations.rules[(j - 1) as usize];
            if !witness.divisible_by(&rule.lhs) {
                return Err(Error::BadData(format!(
                    "stage {m}: discard witness {witness} not divisible by {}",
                    rule.lhs
                )));
            }
            discards.push(format!(
                "b(s)^{{p^{j}}}[vF{j}] terms die: {witness} reduces by `{}`",
                rule.name
            ));
        }

        // left side: coefficient of s^{p^m} in b([p]_E(s)), times the multiplier
        let lhs_coeff = lhs_series.coefficient(degree)?.mul_key(&multiplier);

        // right side: the surviving head is b_1^{p^m}[v_m]; the s^{p^m}
        // coefficient of b(s)^{p^m} is computed with a window sharp enough
        // that only genuine contributions appear
        let head = lowest_power_coefficient(ring, degree)?;
        let expected_head = CoopElement::from_key(ring, CoopKey::b(1, degree));
        debug_assert_eq!(head, expected_head);
        let rhs_coeff = head.mul_key(&CoopKey::v(m, 1)).mul_key(&multiplier);

        stages.push(DerivationStage {
            m,
            degree,
            lhs: lhs_coeff.clone(),
            rhs: rhs_coeff.clone(),
            discards,
        });

        let rhs_key = CoopKey::b(1, (pi_m1 - 1) as u32).mul(&CoopKey::v(m, 1));
        if m < n {
            if !lhs_coeff.is_zero() {
                return Err(Error::CoefficientMismatch {
                    degree,
                    lhs: lhs_coeff.to_string(),
                    rhs: "0".to_string(),
                });
            }
            let rule = RewriteRule::new(&format!("zero_{m}"), rhs_key, CoopElement::zero(ring), p)?;
            relations.rules.push(rule);
        } else {
            // the left side must be vE_n b_1^{pi_n}
            let expected = CoopElement::term(ring, CoopKey::b(1, pi_m as u32), vn_e.clone());
            if lhs_coeff != expected {
                return Err(Error::CoefficientMismatch {
                    degree,
                    lhs: lhs_coeff.to_string(),
                    rhs: expected.to_string(),
                });
            }
            let rule = RewriteRule::new("loop_height", rhs_key, expected, p)?;
            relations.rules.push(rule);
        }
    }

    Ok(Derivation { relations, stages })
}

/// Coefficient of s^k in the additive b(s)^k.  b(s) has valuation 1, so a
/// partial power b^j only needs its terms of degree <= j: the remaining
/// k - j factors contribute at least k - j.  Binary powering under that
/// truncation keeps every intermediate a single term.
fn lowest_power_coefficient(ring: &Ring, k: u32) -> Result<CoopElement> {
    debug_assert!(k >= 1);
    let base = b_series_additive(ring, k);
    let mut acc: Option<(u32, CoopSeries)> = None;
    for bit in (0..=31 - k.leading_zeros()).rev() {
        if let Some((j, s)) = acc.take() {
            acc = Some((2 * j, truncate_coop(&s.mul(&s)?, 2 * j)));
        }
        if (k >> bit) & 1 == 1 {
            acc = Some(match acc.take() {
                None => (1, truncate_coop(&base, 1)),
                Some((j, s)) => (j + 1, truncate_coop(&s.mul(&base)?, j + 1)),
            });
        }
    }
    let (j, s) = acc.expect("k >= 1");
    debug_assert_eq!(j, k);
    s.coefficient(k)
}

/// Drop terms above the window but keep the original precision, so later
/// products may still grow past the window.
fn truncate_coop(s: &CoopSeries, window: u32) -> CoopSeries {
    let mut out = CoopSeries::zero(s.ring(), s.precision());
    for (d, c) in s.coeffs() {
        if *d <= window {
            out.add_term(*d, c.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Loop heights
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct HeightReport {
    pub h: u32,
    /// The search bound 2 pi_n from the derived relation.
    pub search_bound: u32,
    /// True when h equals the free-model maximum 2 pi_n and no extra
    /// relations were supplied; the value is then the best derivable bound,
    /// not a claim of minimality in any particular target algebra.
    pub at_free_model_bound: bool,
    /// Normal forms of the failed candidates below h.
    pub residuals: Vec<(u32, CoopElement)>,
}

/// Smallest positive h <= 2 pi_n with `vE_n e^h = e^{2(p^n-1)+h}[v_n]` under
/// the given relations (converted to e-form) plus any extra relations.
pub fn additive_loop_height(
    rel: &RelationSet,
    extra: Option<&RelationSet>,
    p: u64,
    n: u32,
) -> Result<(u32, HeightReport)> {
    let mut rules = rel.to_e_form()?;
    if let Some(extra) = extra {
        rules = rules.merged_with(extra);
    }
    let bound = (2 * pi_value(p, n)) as u32;
    let shift = 2 * (p.pow(n) - 1) as u32;
    let mut residuals = Vec::new();
    for h in 1..=bound {
        let lhs = CoopElement::term(&rules.ring, CoopKey::e(h), rel.vn_e.clone());
        let rhs = CoopElement::from_key(&rules.ring, CoopKey::e(shift + h).mul(&CoopKey::v(n, 1)));
        let diff = reduce(&lhs.sub(&rhs), &rules.rules);
        if diff.is_zero() {
            let report = HeightReport {
                h,
                search_bound: bound,
                at_free_model_bound: h == bound && extra.is_none(),
                residuals,
            };
            return Ok((h, report));
        }
        residuals.push((h, diff));
    }
    Err(Error::BadData(format!(
        "no loop-height identity derivable within the bound {bound}"
    )))
}

/// The unstable loop height brackets the additive one from above by one.
pub fn unstable_height_bounds(h_add: u32) -> (u32, u32) {
    (h_add, h_add + 1)
}

/// The global unstable bound 2 (p^n - 1)/(p - 1) + 1.
pub fn unstable_global_bound(p: u64, n: u32) -> u32 {
    (2 * pi_value(p, n) + 1) as u32
}

/// The height-h identity `vE e^h = e^{2(p^n-1)+h}[v_n]` as an oriented rule,
/// for targets where the height is known externally (the K(n) self case has
/// h = 1).
pub fn height_identity_rule(
    ring: &Ring,
    p: u64,
    n: u32,
    h: u32,
    vn_e: &CoeffElement,
) -> Result<RewriteRule> {
    let shift = 2 * (p.pow(n) - 1) as u32;
    let lhs = CoopKey::e(shift + h).mul(&CoopKey::v(n, 1));
    let rhs = CoopElement::term(ring, CoopKey::e(h), vn_e.clone());
    RewriteRule::new(&format!("height_{h}"), lhs, rhs, p)
}

/// The K(n) self model's extra relation set carrying only the h = 1 rule.
pub fn kn_self_relations(ring: &Ring, p: u64, n: u32, vn_e: &CoeffElement) -> Result<RelationSet> {
    let mut set = RelationSet::empty(ring, p, n, vn_e.clone());
    set.rules.push(height_identity_rule(ring, p, n, 1, vn_e)?);
    Ok(set)
}
