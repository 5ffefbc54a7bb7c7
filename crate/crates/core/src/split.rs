//! The idempotent splitting of the co-operation algebra and the
//! destabilisation map: s = (v_n^E)^{-1} e^{2(p^n-1)} [v_n^F] projects onto
//! the ideal where iterated suspension is invertible, and stable classes are
//! modelled as level-tagged representatives under signed e-shift
//! equivalence.

use std::fmt;

use crate::coeff::{CoeffElement, Ring};
use crate::coop::{CoopElement, CoopKey};
use crate::error::{Error, Result};
use crate::relations::{height_identity_rule, reduce, RelationSet};

/// The idempotent co-operation and its companion, valid for odd p and
/// unstable loop height h < 2(p^n - 1).
#[derive(Clone, Debug)]
pub struct IdempotentS {
    pub p: u64,
    pub n: u32,
    pub h: u32,
    pub vn_e: CoeffElement,
    /// (v_n^E)^{-1} e^{2(p^n-1)} [v_n^F]
    pub element: CoopElement,
    /// s' = (v_n^E)^{-1} e^{2(p^n-1)-h} [v_n^F], with e^h s' = s
    pub companion: CoopElement,
}

impl IdempotentS {
    pub fn new(ring: &Ring, p: u64, n: u32, h: u32, vn_e: &CoeffElement) -> Result<IdempotentS> {
        if p < 3 || ring.characteristic() != p {
            return Err(Error::EvenOrNonPrime(p));
        }
        if n == 0 {
            return Err(Error::HeightIndexZero);
        }
        let width = 2 * (p.pow(n) - 1) as u32;
        if h == 0 || h >= width {
            return Err(Error::HeightOutOfRange { h, bound: width });
        }
        let vn_inv = vn_e.inverse()?;
        let element = CoopElement::term(
            ring,
            CoopKey::e(width).mul(&CoopKey::v(n, 1)),
            vn_inv.clone(),
        );
        let companion =
            CoopElement::term(ring, CoopKey::e(width - h).mul(&CoopKey::v(n, 1)), vn_inv);
        Ok(IdempotentS {
            p,
            n,
            h,
            vn_e: vn_e.clone(),
            element,
            companion,
        })
    }

    /// The relation set containing exactly the height-h identity this
    /// idempotent needs: v_n^E e^h = e^{2(p^n-1)+h} [v_n^F].
    pub fn height_relations(&self, ring: &Ring) -> Result<RelationSet> {
        let mut set = RelationSet::empty(ring, self.p, self.n, self.vn_e.clone());
        set.rules.push(height_identity_rule(
            ring, self.p, self.n, self.h, &self.vn_e,
        )?);
        Ok(set)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PropertyCheck {
    Pass,
    Fail { difference: String },
}

impl PropertyCheck {
    pub fn passed(&self) -> bool {
        matches!(self, PropertyCheck::Pass)
    }

    fn from_difference(diff: CoopElement) -> PropertyCheck {
        if diff.is_zero() {
            PropertyCheck::Pass
        } else {
            PropertyCheck::Fail {
                difference: diff.to_string(),
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdempotentReport {
    /// s . s = s
    pub idempotent: PropertyCheck,
    /// e . s = s . e (s has both indices zero)
    pub central: PropertyCheck,
    /// e^h . s = e^h = s . e^h
    pub absorbs_suspension: PropertyCheck,
    /// e^h . s' = s
    pub companion_factors: PropertyCheck,
}

impl IdempotentReport {
    pub fn all_pass(&self) -> bool {
        self.idempotent.passed()
            && self.central.passed()
            && self.absorbs_suspension.passed()
            && self.companion_factors.passed()
    }
}

impl fmt::Display for IdempotentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, check) in [
            ("s.s = s", &self.idempotent),
            ("e.s = s.e", &self.central),
            ("e^h.s = e^h", &self.absorbs_suspension),
            ("e^h.s' = s", &self.companion_factors),
        ] {
            match check {
                PropertyCheck::Pass => writeln!(f, "{name}: pass")?,
                PropertyCheck::Fail { difference } => {
                    writeln!(f, "{name}: FAIL, irreducible difference {difference}")?
                }
            }
        }
        Ok(())
    }
}

/// Check the four defining properties of s by rewriting under `rel`, which
/// must contain the height-h identity for the checks to close.
pub fn verify_idempotent(s: &IdempotentS, rel: &RelationSet) -> Result<IdempotentReport> {
    let rules = &rel.rules;
    let ss = s.element.mul(&s.element)?;
    let idempotent = PropertyCheck::from_difference(reduce(&ss.sub(&s.element), rules));

    let e = CoopElement::from_key(s.element.ring(), CoopKey::e(1));
    let es = e.mul(&s.element)?;
    let se = s.element.mul(&e)?;
    let central = PropertyCheck::from_difference(reduce(&es.sub(&se), rules));

    let eh = CoopElement::from_key(s.element.ring(), CoopKey::e(s.h));
    let ehs = eh.mul(&s.element)?;
    let seh = s.element.mul(&eh)?;
    let left = reduce(&ehs.sub(&eh), rules);
    let right = reduce(&seh.sub(&eh), rules);
    let absorbs_suspension = PropertyCheck::from_difference(left.add(&right));

    let ehs_prime = eh.mul(&s.companion)?;
    let companion_factors =
        PropertyCheck::from_difference(reduce(&ehs_prime.sub(&s.element), rules));

    Ok(IdempotentReport {
        idempotent,
        central,
        absorbs_suspension,
        companion_factors,
    })
}

/// Project x onto the s-ideal and its complement: (s.x, x - s.x).
pub fn split_project(
    x: &CoopElement,
    s: &IdempotentS,
    rel: &RelationSet,
) -> Result<(CoopElement, CoopElement)> {
    let s_part = reduce(&s.element.mul(x)?, &rel.rules);
    let complement = reduce(&x.sub(&s_part), &rel.rules);
    Ok((s_part, complement))
}

/// A stable class: a representative at a space level, identified with its
/// signed suspensions (k, x) ~ (k+1, (-1)^k e.x).
#[derive(Clone, Debug)]
pub struct StableClass {
    pub level: i64,
    pub rep: CoopElement,
}

impl StableClass {
    /// The representative must be homogeneous of space label equal to the
    /// level (zero is compatible with any level).
    pub fn new(level: i64, rep: CoopElement, p: u64) -> Result<StableClass> {
        match rep.bidegree(p)? {
            Some(bd) if bd.label != level => Err(Error::BadClassLabel(level)),
            _ => Ok(StableClass { level, rep }),
        }
    }

    /// Suspend the representative up to the given level, with the signs
    /// (-1)^j accumulated one shift at a time.
    pub fn shift_to(&self, level: i64) -> Result<StableClass> {
        if level < self.level {
            return Err(Error::LevelUnreachable(level));
        }
        let t = (level - self.level) as u32;
        let sign = suspension_sign_product(self.level, level);
        let mut rep = self.rep.mul_key(&CoopKey::e(t));
        if sign < 0 {
            rep = rep.neg();
        }
        Ok(StableClass { level, rep })
    }
}

/// Sign of the single suspension out of the given level: (-1)^level.
pub fn suspension_sign(level: i64) -> i64 {
    if level.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Product of the suspension signs for shifts from..to (exclusive at to).
fn suspension_sign_product(from: i64, to: i64) -> i64 {
    let mut sign = 1;
    let mut j = from;
    while j < to {
        sign *= suspension_sign(j);
        j += 1;
    }
    sign
}

/// Colimit equality: shift to a common level and compare s-projections in
/// normal form (the (1-s)-part dies under enough suspensions).
pub fn class_eq(
    a: &StableClass,
    b: &StableClass,
    s: &IdempotentS,
    rel: &RelationSet,
) -> Result<bool> {
    let level = a.level.max(b.level);
    let a = a.shift_to(level)?;
    let b = b.shift_to(level)?;
    let pa = reduce(&s.element.mul(&a.rep)?, &rel.rules);
    let pb = reduce(&s.element.mul(&b.rep)?, &rel.rules);
    Ok(pa == pb)
}

/// The destabilisation map: represent the class on the s-ideal, then invert
/// the e-shift down to the target level.  Raising a monomial's e-power by
/// 2(p^n-1) at the cost of one bracket and one (v_n^E)^{-1} is an equality
/// under the height identity and is what makes the division possible; it
/// needs e-exponent >= h, which holds on s-ideal normal forms.
pub fn destabilise(
    c: &StableClass,
    target_level: i64,
    s: &IdempotentS,
    rel: &RelationSet,
) -> Result<CoopElement> {
    if c.rep.is_zero() {
        return Ok(CoopElement::zero(c.rep.ring()));
    }
    let work = if c.level >= target_level {
        c.clone()
    } else {
        c.shift_to(target_level)?
    };
    let t = (work.level - target_level) as u32;
    let z = reduce(&s.element.mul(&work.rep)?, &rel.rules);
    let raised = raise_to_min_e(&z, t + s.h, s)?;
    let sign = suspension_sign_product(target_level, work.level);
    let mut out = CoopElement::zero(z.ring());
    for (key, coeff) in raised.terms() {
        debug_assert!(key.e_exp >= t);
        let mut stripped = key.clone();
        stripped.e_exp -= t;
        let c = if sign < 0 { coeff.neg() } else { coeff.clone() };
        out.add_term(stripped, c);
    }
    Ok(reduce(&out, &rel.rules))
}

/// Rewrite every monomial, using the height identity upward, until each has
/// e-exponent at least `min_e`.  Monomials below e^h are out of reach.
fn raise_to_min_e(x: &CoopElement, min_e: u32, s: &IdempotentS) -> Result<CoopElement> {
    let width = 2 * (s.p.pow(s.n) - 1) as u32;
    let vn_inv = s.vn_e.inverse()?;
    let mut out = CoopElement::zero(x.ring());
    for (key, coeff) in x.terms() {
        let mut key = key.clone();
        let mut coeff = coeff.clone();
        while key.e_exp < min_e {
            if key.e_exp < s.h {
                return Err(Error::LevelUnreachable(min_e as i64));
            }
            key.e_exp += width;
            key = key.mul(&CoopKey::v(s.n, 1));
            coeff = coeff.mul(&vn_inv)?;
        }
        out.add_term(key, coeff);
    }
    Ok(out)
}

/// Witness that x lies in the image of the h-fold suspension: on normal
/// forms this means every monomial carries e^h, and the witness is x with
/// that factor stripped.
pub fn suspension_image_witness(x: &CoopElement, h: u32, rel: &RelationSet) -> Option<CoopElement> {
    let nf = reduce(x, &rel.rules);
    let mut out = CoopElement::zero(nf.ring());
    for (key, coeff) in nf.terms() {
        if key.e_exp < h {
            return None;
        }
        let mut stripped = key.clone();
        stripped.e_exp -= h;
        out.add_term(stripped, coeff.clone());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kn_model(p: u64, n: u32, h: u32) -> (Ring, IdempotentS, RelationSet) {
        let ring = Ring::morava_k(p, n).unwrap();
        let vn = ring.generator(&format!("v{n}")).unwrap();
        let s = IdempotentS::new(&ring, p, n, h, &vn).unwrap();
        let rel = s.height_relations(&ring).unwrap();
        (ring, s, rel)
    }

    #[test]
    fn idempotent_properties_hold_in_kn_self_model() {
        let (_, s, rel) = kn_model(3, 1, 1);
        let report = verify_idempotent(&s, &rel).unwrap();
        assert!(report.all_pass(), "{report}");
    }

    #[test]
    fn s_has_both_indices_zero() {
        let (_, s, _) = kn_model(3, 1, 1);
        let bd = s.element.bidegree(3).unwrap().unwrap();
        assert_eq!((bd.hom, bd.label), (0, 0));
    }

    #[test]
    fn dropping_the_height_relation_breaks_idempotence() {
        let (ring, s, _) = kn_model(3, 1, 1);
        let empty = RelationSet::empty(&ring, 3, 1, s.vn_e.clone());
        let report = verify_idempotent(&s, &empty).unwrap();
        assert!(!report.idempotent.passed());
    }

    #[test]
    fn constructor_rejects_out_of_range_height() {
        let ring = Ring::morava_k(3, 1).unwrap();
        let vn = ring.generator("v1").unwrap();
        // 2(p^n - 1) = 4, so h = 4 is out of range
        assert!(matches!(
            IdempotentS::new(&ring, 3, 1, 4, &vn).unwrap_err(),
            Error::HeightOutOfRange { .. }
        ));
        assert!(IdempotentS::new(&ring, 3, 1, 3, &vn).is_ok());
    }

    #[test]
    fn split_of_eh_is_all_s_part() {
        let (ring, s, rel) = kn_model(3, 1, 1);
        let eh = CoopElement::from_key(&ring, CoopKey::e(1));
        let (s_part, complement) = split_project(&eh, &s, &rel).unwrap();
        assert_eq!(s_part, eh);
        assert!(complement.is_zero());
    }

    #[test]
    fn split_of_one_is_s_and_one_minus_s() {
        let (ring, s, rel) = kn_model(3, 1, 1);
        let one = CoopElement::one(&ring);
        let (s_part, complement) = split_project(&one, &s, &rel).unwrap();
        assert_eq!(s_part, s.element);
        assert_eq!(complement, one.sub(&s.element));
    }

    #[test]
    fn projection_is_idempotent_on_monomials() {
        let (ring, s, rel) = kn_model(3, 2, 1);
        let x = CoopElement::from_key(&ring, CoopKey::e(3).mul(&CoopKey::v(2, 1)));
        let (sx, _) = split_project(&x, &s, &rel).unwrap();
        let (ssx, _) = split_project(&sx, &s, &rel).unwrap();
        assert_eq!(ssx, sx);
    }

    #[test]
    fn destabilise_round_trips_e_powers() {
        // classes of e^t: sigma(delta(c)) = c
        let (ring, s, rel) = kn_model(3, 1, 1);
        for t in 1..=4u32 {
            let rep = CoopElement::from_key(&ring, CoopKey::e(t));
            let c = StableClass::new(t as i64, rep, 3).unwrap();
            let y = destabilise(&c, 0, &s, &rel).unwrap();
            let back = StableClass::new(0, y, 3).unwrap();
            assert!(class_eq(&back, &c, &s, &rel).unwrap(), "t = {t}");
        }
    }

    #[test]
    fn destabilise_zero_class() {
        let (ring, s, rel) = kn_model(3, 1, 1);
        let zero = StableClass::new(5, CoopElement::zero(&ring), 3).unwrap();
        assert!(destabilise(&zero, 0, &s, &rel).unwrap().is_zero());
    }

    #[test]
    fn destabilised_classes_lie_in_suspension_image() {
        let (ring, s, rel) = kn_model(3, 1, 1);
        let rep = CoopElement::from_key(&ring, CoopKey::e(3));
        let c = StableClass::new(3, rep, 3).unwrap();
        let y = destabilise(&c, 1, &s, &rel).unwrap();
        assert!(suspension_image_witness(&y, s.h, &rel).is_some());
    }

    #[test]
    fn class_label_mismatch_is_rejected() {
        let ring = Ring::morava_k(3, 1).unwrap();
        let rep = CoopElement::from_key(&ring, CoopKey::e(2));
        assert!(matches!(
            StableClass::new(5, rep, 3).unwrap_err(),
            Error::BadClassLabel(5)
        ));
    }

    #[test]
    fn suspension_signs_alternate() {
        assert_eq!(suspension_sign(0), 1);
        assert_eq!(suspension_sign(1), -1);
        assert_eq!(suspension_sign(-1), -1);
        assert_eq!(suspension_sign(-2), 1);
    }
}
