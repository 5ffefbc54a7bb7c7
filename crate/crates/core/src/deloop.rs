//! The explicit component calculus of the delooping map: for an unstable
//! operation at source degree k and stable degree l, the m-th component of
//! its delooping is (-1)^{lm} (v_n^E)^{-i} (Omega^j r_k) (v_n^F)^i with
//! j >= h and m - k = 2(p^n-1) i - j, unique up to the periodicity move
//! (i, j) -> (i+1, j + 2(p^n-1)).

use std::fmt;

use crate::coeff::CoeffElement;
use crate::error::{Error, Result};

/// Period of the v-conjugation move, 2(p^n - 1).
pub fn period(p: u64, n: u32) -> u32 {
    2 * (p.pow(n) - 1) as u32
}

/// One component of a delooped operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeloopComponent {
    /// Source degree of the unstable operation.
    pub k: i64,
    /// Stable degree of the operation.
    pub l: i64,
    /// Component degree being reconstructed.
    pub m: i64,
    /// Power of (v_n^E)^{-1} on the left.
    pub i: u64,
    /// Number of loops applied to the given component.
    pub j: u64,
    /// (-1)^{l m}, the sign in the operation view.
    pub sign: i64,
}

impl DeloopComponent {
    /// The three defining constraints.
    pub fn satisfies_constraints(&self, h: u32, p: u64, n: u32) -> bool {
        let period = period(p, n) as i64;
        self.j >= h as u64
            && self.m - self.k == period * self.i as i64 - self.j as i64
            && self.sign == minus_one_pow(self.l * self.m)
    }
}

impl fmt::Display for DeloopComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign < 0 { "-" } else { "" };
        write!(
            f,
            "{sign}(vE)^-{} (Omega^{} r_{}) (vF)^{}",
            self.i, self.j, self.k, self.i
        )
    }
}

fn minus_one_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The canonical minimal (i, j): the smallest j >= h with
/// j = (k - m) mod 2(p^n-1) and i = (m - k + j) / 2(p^n-1) >= 0.
pub fn deloop_component(k: i64, l: i64, m: i64, h: u32, p: u64, n: u32) -> DeloopComponent {
    let period = period(p, n) as i64;
    let (i, j) = canonical_pair(m - k, h, period);
    DeloopComponent {
        k,
        l,
        m,
        i,
        j,
        sign: minus_one_pow(l * m),
    }
}

/// Minimal valid (i, j) for the difference d = m - k: j >= max(h, -d) in the
/// congruence class -d mod period.
fn canonical_pair(d: i64, h: u32, period: i64) -> (u64, u64) {
    let base = (-d).rem_euclid(period);
    let min_j = (h as i64).max(-d);
    let j = if base >= min_j {
        base
    } else {
        base + period * ((min_j - base + period - 1).div_euclid(period))
    };
    let i = (d + j).div_euclid(period);
    debug_assert!(i >= 0);
    debug_assert_eq!(d, period * i - j);
    (i as u64, j as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    NotEqual,
}

/// Verdict plus the canonical forms of both presentations.
pub type NormalizeOutcome = (Verdict, (u64, u64), (u64, u64));

/// Decide equality of two (i, j) presentations of the same operation data by
/// reducing both modulo the periodicity move to the canonical minimal pair.
/// Presentations with different i*period - j values sit in different
/// congruence classes and are never equal.
pub fn deloop_normalize(
    a: (u64, u64),
    b: (u64, u64),
    h: u32,
    period_value: u32,
) -> Result<NormalizeOutcome> {
    if period_value == 0 {
        return Err(Error::IncompatibleDegrees("zero period".into()));
    }
    let p = period_value as i64;
    let canon = |(i, j): (u64, u64)| -> Result<(u64, u64)> {
        if j < h as u64 {
            return Err(Error::IncompatibleDegrees(format!(
                "loop count {j} below the height {h}"
            )));
        }
        let d = p * i as i64 - j as i64;
        Ok(canonical_pair(d, h, p))
    };
    let ca = canon(a)?;
    let cb = canon(b)?;
    let verdict = if ca == cb {
        Verdict::Equal
    } else {
        Verdict::NotEqual
    };
    Ok((verdict, ca, cb))
}

/// A symbolic unstable map between theory levels: source level k, target
/// level k + l, with a name standing in for the underlying map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSpec {
    pub name: String,
    pub source_level: i64,
    pub degree: i64,
    pub height: u32,
}

/// A fully aligned symbolic component word
/// (v_left)^{-i} Omega^j (name) (v_right)^i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentWord {
    pub i: u64,
    pub j: u64,
    pub names: Vec<String>,
}

impl fmt::Display for ComponentWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(vE)^-{} (Omega^{} {}) (vG)^{}",
            self.i,
            self.j,
            self.names.join("."),
            self.i
        )
    }
}

#[derive(Clone, Debug)]
pub struct ComposeReport {
    /// The aligned product after cancelling the middle v-brackets.
    pub product: ComponentWord,
    /// The expected component of the delooped composite.
    pub expected: ComponentWord,
    pub verdict: Verdict,
}

/// Verify the composition law componentwise: the m-component of the
/// delooped composite equals the composite of the delooped factors, after
/// aligning both factors with periodicity moves, cancelling the middle
/// (v^F)^i (v^F)^{-i}, and merging equal loop counts.
pub fn deloop_compose(
    outer: &MapSpec,
    inner: &MapSpec,
    composite_height: u32,
    p: u64,
    n: u32,
    m: i64,
) -> Result<ComposeReport> {
    if inner.source_level + inner.degree != outer.source_level {
        return Err(Error::IncompatibleDegrees(format!(
            "inner lands at level {}, outer starts at {}",
            inner.source_level + inner.degree,
            outer.source_level
        )));
    }
    let period_value = period(p, n);
    // components composed at matching levels: the inner m-component lands at
    // level m + inner.degree, which is where the outer component is taken
    let outer_c = deloop_component(
        outer.source_level,
        outer.degree,
        m + inner.degree,
        outer.height,
        p,
        n,
    );
    let inner_c = deloop_component(inner.source_level, inner.degree, m, inner.height, p, n);

    // both sit in the same congruence class; raise the lower loop count
    let target_j = outer_c.j.max(inner_c.j);
    let raise = |c: &DeloopComponent| -> (u64, u64) {
        let steps = (target_j - c.j) / period_value as u64;
        debug_assert_eq!((target_j - c.j) % period_value as u64, 0);
        (c.i + steps, c.j + steps * period_value as u64)
    };
    let (oi, oj) = raise(&outer_c);
    let (ii, ij) = raise(&inner_c);
    if oj != ij || oi != ii {
        return Err(Error::IncompatibleDegrees(format!(
            "components failed to align: ({oi},{oj}) vs ({ii},{ij})"
        )));
    }
    // middle (v^F)^{oi} (v^F)^{-ii} cancels; equal loop counts merge
    let mut names = Vec::new();
    for part in [&outer.name, &inner.name] {
        if !part.is_empty() {
            names.push(part.clone());
        }
    }
    let product = ComponentWord {
        i: oi,
        j: oj,
        names: names.clone(),
    };

    let composite = deloop_component(
        inner.source_level,
        outer.degree + inner.degree,
        m,
        composite_height,
        p,
        n,
    );
    let expected = ComponentWord {
        i: composite.i,
        j: composite.j,
        names,
    };
    let (verdict, ..) = deloop_normalize(
        (product.i, product.j),
        (expected.i, expected.j),
        composite_height.min(outer.height).min(inner.height),
        period_value,
    )?;
    Ok(ComposeReport {
        product,
        expected,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Views and signs
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum View {
    Operation,
    Class,
    Functional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueTag {
    /// Signs decorating the restriction maps between the three rows.
    Restriction,
    /// Signs decorating the looping maps between the three columns.
    Looping,
}

/// The sign relating the same datum seen in two views: (-1)^{kl} between the
/// operation and class rows under restriction, (-1)^k between the class and
/// functional rows in both diagrams, and no sign between operations and
/// classes under looping.
pub fn view_convert(from: View, to: View, k: i64, l: i64, tag: ValueTag) -> i64 {
    fn row(v: View) -> i32 {
        match v {
            View::Operation => 0,
            View::Class => 1,
            View::Functional => 2,
        }
    }
    let (a, b) = (row(from).min(row(to)), row(from).max(row(to)));
    let mut sign = 1;
    // operation <-> class
    if a == 0 && b >= 1 {
        sign *= match tag {
            ValueTag::Restriction => minus_one_pow(k * l),
            ValueTag::Looping => 1,
        };
    }
    // class <-> functional
    if b == 2 && a <= 1 {
        sign *= minus_one_pow(k);
    }
    sign
}

/// The sign picked up by a single looping, independent of all degrees.
pub fn looping_diagram_sign() -> i64 {
    -1
}

// ---------------------------------------------------------------------------
// Based and constant operations
// ---------------------------------------------------------------------------

/// An unstable operation decomposed as a constant plus a based part; looping
/// factors through the based projection, so constants loop to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct UnstableOp {
    /// The based part, named symbolically; `None` when the operation is a
    /// pure constant.
    pub based_part: Option<String>,
    /// The value v_r of the operation on zero.
    pub constant: Option<CoeffElement>,
    pub loops: u32,
}

impl UnstableOp {
    pub fn named(name: &str) -> UnstableOp {
        UnstableOp {
            based_part: Some(name.to_string()),
            constant: None,
            loops: 0,
        }
    }

    pub fn constant(v: CoeffElement) -> UnstableOp {
        UnstableOp {
            based_part: None,
            constant: Some(v),
            loops: 0,
        }
    }

    pub fn with_constant(mut self, v: CoeffElement) -> UnstableOp {
        self.constant = Some(v);
        self
    }

    /// r - v_r 1: drop the constant.
    pub fn based_projection(&self) -> UnstableOp {
        UnstableOp {
            based_part: self.based_part.clone(),
            constant: None,
            loops: self.loops,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.based_part.is_none() && self.constant.is_none()
    }

    /// Loop once: project to the based part first.
    pub fn loop_once(&self) -> UnstableOp {
        let mut based = self.based_projection();
        if based.based_part.is_some() {
            based.loops += 1;
        }
        based
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Ring;

    #[test]
    fn m_equals_k_gives_the_printed_special_case() {
        // (k=0, l=0, m=0, h=1, p=3, n=1): i = 1, j = 2(p^n-1) = 4, sign +1
        let c = deloop_component(0, 0, 0, 1, 3, 1);
        assert_eq!((c.i, c.j, c.sign), (1, 4, 1));
        assert!(c.satisfies_constraints(1, 3, 1));
    }

    #[test]
    fn m_below_k_minus_h_is_plain_looping() {
        // (k=2, l=5, m=0, h=1): i = 0, j = k - m = 2, sign (-1)^{5*0} = +1
        let c = deloop_component(2, 5, 0, 1, 3, 1);
        assert_eq!((c.i, c.j, c.sign), (0, 2, 1));
    }

    #[test]
    fn congruence_case_with_odd_sign() {
        // (k=0, l=1, m=3, h=1, p=3, n=1): j = 1 mod 4, j >= 1, i = 1, sign -1
        let c = deloop_component(0, 1, 3, 1, 3, 1);
        assert_eq!((c.i, c.j, c.sign), (1, 1, -1));
    }

    #[test]
    fn constraints_hold_on_a_small_grid() {
        for k in -4..=4 {
            for l in -2..=2 {
                for m in -4..=4 {
                    for h in [1u32, 2] {
                        let c = deloop_component(k, l, m, h, 3, 1);
                        assert!(c.satisfies_constraints(h, 3, 1), "{c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn normalize_identifies_periodic_presentations() {
        let (v, ca, cb) = deloop_normalize((1, 4), (2, 8), 1, 4).unwrap();
        assert_eq!(v, Verdict::Equal);
        assert_eq!(ca, cb);
        let (v, ..) = deloop_normalize((0, 1), (0, 1), 1, 4).unwrap();
        assert_eq!(v, Verdict::Equal);
        let (v, ..) = deloop_normalize((1, 4), (1, 5), 1, 4).unwrap();
        assert_eq!(v, Verdict::NotEqual);
    }

    #[test]
    fn composition_reproduces_the_j_component_identity() {
        // sigma_k: F_k -> E_{k+l}, rho_j: G_j -> F_k
        let outer = MapSpec {
            name: "sigma".into(),
            source_level: 2,
            degree: 3,
            height: 1,
        };
        let inner = MapSpec {
            name: "rho".into(),
            source_level: -1,
            degree: 3,
            height: 1,
        };
        // at the inner source level both factors take their m = k form,
        // so the product has i = 1 and j = period
        let report = deloop_compose(&outer, &inner, 1, 3, 1, -1).unwrap();
        assert_eq!(report.verdict, Verdict::Equal);
        assert_eq!(report.product.i, 1);
        assert_eq!(report.product.j, period(3, 1) as u64);
    }

    #[test]
    fn composition_with_identity_is_the_original() {
        let outer = MapSpec {
            name: String::new(), // the identity operation
            source_level: 3,
            degree: 0,
            height: 1,
        };
        let inner = MapSpec {
            name: "rho".into(),
            source_level: 0,
            degree: 3,
            height: 1,
        };
        for m in -3..=3 {
            let report = deloop_compose(&outer, &inner, 1, 3, 1, m).unwrap();
            assert_eq!(report.verdict, Verdict::Equal);
            let plain = deloop_component(0, 3, m, 1, 3, 1);
            let (v, ..) = deloop_normalize(
                (report.product.i, report.product.j),
                (plain.i, plain.j),
                1,
                period(3, 1),
            )
            .unwrap();
            assert_eq!(v, Verdict::Equal);
            assert_eq!(report.product.names, vec!["rho".to_string()]);
        }
    }

    #[test]
    fn random_compositions_normalize_equal() {
        // brute force over small level/degree data at (p, n, h) = (3, 1, 1)
        for k_in in -3..=3i64 {
            for l_in in -2..=2i64 {
                for l_out in -2..=2i64 {
                    let inner = MapSpec {
                        name: "rho".into(),
                        source_level: k_in,
                        degree: l_in,
                        height: 1,
                    };
                    let outer = MapSpec {
                        name: "sigma".into(),
                        source_level: k_in + l_in,
                        degree: l_out,
                        height: 1,
                    };
                    for m in -4..=4 {
                        let report = deloop_compose(&outer, &inner, 1, 3, 1, m).unwrap();
                        assert_eq!(report.verdict, Verdict::Equal);
                    }
                }
            }
        }
    }

    #[test]
    fn delooping_is_left_inverse_to_restriction() {
        // Build the periodic family of a stable operation from its k-level
        // component, restrict at another level k2, deloop that restriction,
        // and compare: the exponents compose additively and must normalize
        // to the family's own m-component.
        let (p, n, h) = (3u64, 1u32, 1u32);
        let period_value = period(p, n);
        for (k, l) in [(0i64, 0i64), (2, 3), (-1, 5)] {
            for k2 in [k - 2, k + 3] {
                let restricted = deloop_component(k, l, k2, h, p, n);
                for m in -5..=5 {
                    let family = deloop_component(k, l, m, h, p, n);
                    let redone = deloop_component(k2, l, m, h, p, n);
                    let combined = (restricted.i + redone.i, restricted.j + redone.j);
                    let (v, ..) =
                        deloop_normalize(combined, (family.i, family.j), h, period_value).unwrap();
                    assert_eq!(v, Verdict::Equal, "k={k} k2={k2} m={m}");
                }
            }
        }
    }

    #[test]
    fn mismatched_levels_are_rejected() {
        let outer = MapSpec {
            name: "sigma".into(),
            source_level: 2,
            degree: 0,
            height: 1,
        };
        let inner = MapSpec {
            name: "rho".into(),
            source_level: 0,
            degree: 1,
            height: 1,
        };
        assert!(matches!(
            deloop_compose(&outer, &inner, 1, 3, 1, 0).unwrap_err(),
            Error::IncompatibleDegrees(_)
        ));
    }

    #[test]
    fn view_conversion_signs() {
        // operation -> class at (k=1, l=1) is -1 under restriction
        assert_eq!(
            view_convert(View::Operation, View::Class, 1, 1, ValueTag::Restriction),
            -1
        );
        // class -> functional at k = 2 is +1
        assert_eq!(
            view_convert(View::Class, View::Functional, 2, 0, ValueTag::Restriction),
            1
        );
        // identity conversion
        assert_eq!(
            view_convert(
                View::Operation,
                View::Operation,
                5,
                7,
                ValueTag::Restriction
            ),
            1
        );
        // looping has no operation/class sign but keeps the (-1)^k square
        assert_eq!(
            view_convert(View::Operation, View::Class, 3, 5, ValueTag::Looping),
            1
        );
        assert_eq!(
            view_convert(View::Class, View::Functional, 3, 0, ValueTag::Looping),
            -1
        );
        assert_eq!(looping_diagram_sign(), -1);
    }

    #[test]
    fn constants_loop_to_zero() {
        let ring = Ring::prime_field(3).unwrap();
        let c = UnstableOp::constant(ring.scalar_i64(2));
        assert!(c.loop_once().is_zero());
        // looping an unbased operation first projects away its constant
        let r = UnstableOp::named("r").with_constant(ring.scalar_i64(2));
        let looped = r.loop_once();
        assert_eq!(looped.based_part, Some("r".to_string()));
        assert_eq!(looped.constant, None);
        assert_eq!(looped.loops, 1);
    }
}
