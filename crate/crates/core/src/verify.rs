//! Self-contained runners for the verification suite: each check returns a
//! report with per-case details, and `run_all` drives every one of them.
//! The integration test target asserts on these, and the CLI `verify-all`
//! subcommand prints them.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::Ring;
use crate::coop::{hopf_quotient_check, CoopElement, CoopKey};
use crate::deloop::{deloop_component, deloop_compose, deloop_normalize, period, MapSpec, Verdict};
use crate::error::Result;
use crate::fgl::{random_strict_coordinate_change, FormalGroupLaw, Height, VAR_X};
use crate::relations::{
    additive_loop_height, derive_relations, kn_self_relations, pi_value, reduce,
    unstable_global_bound, unstable_height_bounds,
};
use crate::series::Series;
use crate::split::{
    class_eq, destabilise, split_project, suspension_image_witness, verify_idempotent, IdempotentS,
    StableClass,
};

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub details: Vec<String>,
}

impl CriterionReport {
    fn new(id: u32, name: &'static str) -> CriterionReport {
        CriterionReport {
            id,
            name,
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.pass = false;
        }
        self.details
            .push(format!("{} {detail}", if ok { "ok " } else { "FAIL" }));
    }

    fn fail(&mut self, detail: String) {
        self.pass = false;
        self.details.push(format!("FAIL {detail}"));
    }
}

const GRID: [(u64, u32); 6] = [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2)];

fn run<T>(report: &mut CriterionReport, label: &str, f: impl FnOnce() -> Result<T>) -> Option<T> {
    match f() {
        Ok(v) => Some(v),
        Err(e) => {
            report.fail(format!("{label}: {e}"));
            None
        }
    }
}

/// 1. Additive, multiplicative, and Honda laws pass the axiom suite exactly
///    at precision p^{n+1} across the (p, n) grid.
pub fn criterion_1_fgl_axioms() -> CriterionReport {
    let mut r = CriterionReport::new(1, "formal group law axiom suite");
    for (p, n) in GRID {
        let prec = (p as u32).pow(n + 1);
        let cases: [(&str, Result<FormalGroupLaw>); 3] = [
            ("additive", FormalGroupLaw::additive(p, prec)),
            ("multiplicative", FormalGroupLaw::multiplicative(p, prec)),
            ("honda", FormalGroupLaw::honda(p, n, prec)),
        ];
        for (label, fgl) in cases {
            match fgl.and_then(|f| f.check_axioms()) {
                Ok(report) => r.check(
                    report.all_pass(),
                    format!("{label}(p={p}, n={n}, N={prec}) axioms"),
                ),
                Err(e) => r.fail(format!("{label}(p={p}, n={n}, N={prec}): {e}")),
            }
        }
    }
    r
}

/// 2. p-series: multiplicative gives x^p with v_1 = 1 and height 1; the
///    Honda law gives `x^{p^n}` exactly; the K(n) preset gives `v_n x^{p^n}`.
pub fn criterion_2_p_series() -> CriterionReport {
    let mut r = CriterionReport::new(2, "p-series of the presets");
    for (p, n) in GRID {
        let prec = (p as u32).pow(n + 1);
        if let Some(f) = run(&mut r, "multiplicative", || {
            FormalGroupLaw::multiplicative(p, prec)
        }) {
            let ring = f.ring().clone();
            let expect = Series::monomial(&ring, &[VAR_X], &[p as u32], ring.one(), prec);
            let ps = f.n_series(p as i64);
            r.check(
                ps.as_ref().map(|s| *s == expect).unwrap_or(false),
                format!("multiplicative(p={p}): [p](x) = x^{p}"),
            );
            if let Some(data) = run(&mut r, "extract", || f.extract_v()) {
                r.check(
                    data.height == Height::Exact(1) && data.v_coeffs[&1].is_one(),
                    format!("multiplicative(p={p}): v_1 = 1, height 1"),
                );
            }
        }
        if let Some(f) = run(&mut r, "honda", || FormalGroupLaw::honda(p, n, prec)) {
            let ring = f.ring().clone();
            let d = (p as u32).pow(n);
            let expect = Series::monomial(&ring, &[VAR_X], &[d], ring.one(), prec);
            r.check(
                f.n_series(p as i64).map(|s| s == expect).unwrap_or(false),
                format!("honda(p={p}, n={n}): [p](x) = x^{{p^{n}}} exactly"),
            );
        }
        if let Some(f) = run(&mut r, "morava", || FormalGroupLaw::morava_k(p, n, prec)) {
            let ring = f.ring().clone();
            let d = (p as u32).pow(n);
            let vn = ring.generator(&format!("v{n}")).expect("preset generator");
            let expect = Series::monomial(&ring, &[VAR_X], &[d], vn.clone(), prec);
            r.check(
                f.n_series(p as i64).map(|s| s == expect).unwrap_or(false),
                format!("K({n}) preset (p={p}): [p](s) = v_{n} s^{{p^{n}}}"),
            );
            if let Some(data) = run(&mut r, "extract", || f.extract_v()) {
                r.check(
                    data.height == Height::Exact(n) && data.v_coeffs[&n] == vn,
                    format!("K({n}) preset (p={p}): v_{n} is the generator, height {n}"),
                );
            }
        }
    }
    r
}

/// 3. Reassembly round trip on 20 randomized strict coordinate changes of
///    the presets: the formal sum of the extracted `v_i x^{p^i}` reproduces
///    `[p]` exactly.
pub fn criterion_3_v_round_trip(seed: u64) -> CriterionReport {
    let mut r = CriterionReport::new(3, "v-extraction round trip on random twists");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prec = 27;
    for case in 0..20 {
        let preset = case % 4;
        let outcome = (|| -> Result<bool> {
            let base = match preset {
                0 => FormalGroupLaw::multiplicative(3, prec)?,
                1 => FormalGroupLaw::honda(3, 1, prec)?,
                2 => FormalGroupLaw::honda(3, 2, prec)?,
                _ => FormalGroupLaw::morava_k(3, 1, prec)?,
            };
            let ring = base.ring().clone();
            let phi = random_strict_coordinate_change(&ring, 7, prec, &mut rng)?;
            let twisted = base.coordinate_change(&phi)?;
            let data = twisted.extract_v()?;
            let terms: Vec<Series> = data
                .v_coeffs
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| Series::monomial(&ring, &[VAR_X], &[3u32.pow(*i)], v.clone(), prec))
                .collect();
            Ok(twisted.formal_sum(&terms)? == data.p_series)
        })();
        match outcome {
            Ok(ok) => r.check(ok, format!("case {case} (preset {preset}) round trip")),
            Err(e) => r.fail(format!("case {case}: {e}")),
        }
    }
    r
}

/// 4. The derivation reproduces the intermediate and terminal relations
///    with the right pi-exponents, all bidegree-homogeneous.
pub fn criterion_4_relation_derivation() -> CriterionReport {
    let mut r = CriterionReport::new(4, "co-operation relation derivation");
    for p in [3u64, 5, 7] {
        for n in [1u32, 2, 3] {
            let prec = (p as u32).pow(n);
            let Some(d) = run(&mut r, "derive", || derive_relations(p, n, prec)) else {
                continue;
            };
            let ring = d.relations.ring.clone();
            // intermediates: 0 = b_1^{pi_{j+1}-1}[v_j] for 1 <= j < n
            for j in 1..n {
                let rule = &d.relations.rules[(j - 1) as usize];
                let expected =
                    CoopKey::b(1, (pi_value(p, j + 1) - 1) as u32).mul(&CoopKey::v(j, 1));
                r.check(
                    rule.is_zero_rule() && rule.lhs == expected,
                    format!("(p={p}, n={n}) intermediate j={j}"),
                );
            }
            // final: vE_n b_1^{pi_n} = b_1^{pi_{n+1}-1}[v_n]
            let last = d.final_rule();
            let expected_lhs =
                CoopKey::b(1, (pi_value(p, n + 1) - 1) as u32).mul(&CoopKey::v(n, 1));
            let expected_rhs = CoopElement::term(
                &ring,
                CoopKey::b(1, pi_value(p, n) as u32),
                ring.generator(&format!("vE{n}"))
                    .expect("generic generator"),
            );
            r.check(
                last.lhs == expected_lhs && last.rhs == expected_rhs,
                format!("(p={p}, n={n}) terminal relation"),
            );
            // pi values from the closed formula
            let pis: Vec<u64> = (1..=n + 1).map(|m| pi_value(p, m)).collect();
            r.check(
                d.relations.pi == pis,
                format!("(p={p}, n={n}) pi values {pis:?}"),
            );
            // homogeneity of every emitted rule
            for rule in &d.relations.rules {
                let lhs = CoopElement::from_key(&ring, rule.lhs.clone());
                let hom = (|| -> Result<bool> {
                    let lhs_bd = lhs.bidegree(p)?.expect("nonzero");
                    Ok(match rule.rhs.bidegree(p)? {
                        None => true,
                        Some(rhs_bd) => rhs_bd == lhs_bd,
                    })
                })();
                r.check(
                    hom.unwrap_or(false),
                    format!("(p={p}, n={n}) rule `{}` homogeneous", rule.name),
                );
            }
        }
    }
    r
}

/// 5. q(b(s)^{*p}) = 0 in characteristic p at N = 12.
pub fn criterion_5_hopf_quotient() -> CriterionReport {
    let mut r = CriterionReport::new(5, "Hopf quotient of the p-fold * power");
    for p in [3u64, 5, 7] {
        match Ring::prime_field(p).and_then(|ring| hopf_quotient_check(&ring, p, 12)) {
            Ok(report) => r.check(report.pass, format!("q(b(s)^{{*{p}}}) = 0 at N = 12")),
            Err(e) => r.fail(format!("p = {p}: {e}")),
        }
    }
    r
}

fn random_monomial(ring: &Ring, p: u64, n: u32, rng: &mut ChaCha8Rng) -> CoopElement {
    let name = format!("v{n}");
    let key = CoopKey::e(rng.gen_range(0..6))
        .mul(&CoopKey::b(1 + rng.gen_range(0..3), rng.gen_range(0..3)))
        .mul(&CoopKey::v(n, rng.gen_range(0..3)));
    let scalar = 1 + rng.gen_range(0..(p - 1)) as i64;
    let coeff = ring
        .monomial(&[(name.as_str(), rng.gen_range(-2i64..3))], scalar)
        .expect("valid monomial");
    CoopElement::term(ring, key, coeff)
}

/// 6. The idempotent suite over the K(n) self model with h = 1: the four
///    defining properties, plus projection idempotence and
///    multiplicativity on 100 random monomials.
pub fn criterion_6_idempotent(seed: u64) -> CriterionReport {
    let mut r = CriterionReport::new(6, "idempotent splitting properties");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (p, n) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2)] {
        let outcome = (|| -> Result<()> {
            let ring = Ring::morava_k(p, n)?;
            let vn = ring.generator(&format!("v{n}"))?;
            let s = IdempotentS::new(&ring, p, n, 1, &vn)?;
            let rel = s.height_relations(&ring)?;
            let report = verify_idempotent(&s, &rel)?;
            r.check(
                report.all_pass(),
                format!("(p={p}, n={n}) four properties of s"),
            );
            let mut all_proj = true;
            let mut all_mult = true;
            for _ in 0..100 {
                let x = random_monomial(&ring, p, n, &mut rng);
                let y = random_monomial(&ring, p, n, &mut rng);
                let (sx, _) = split_project(&x, &s, &rel)?;
                let (ssx, _) = split_project(&sx, &s, &rel)?;
                all_proj &= ssx == sx;
                let (sy, _) = split_project(&y, &s, &rel)?;
                let (sxy, _) = split_project(&x.mul(&y)?, &s, &rel)?;
                all_mult &= reduce(&sx.mul(&sy)?, &rel.rules) == sxy;
            }
            r.check(all_proj, format!("(p={p}, n={n}) S(S(x)) = S(x) x100"));
            r.check(all_mult, format!("(p={p}, n={n}) S(x.y) = S(x).S(y) x100"));
            Ok(())
        })();
        if let Err(e) = outcome {
            r.fail(format!("(p={p}, n={n}): {e}"));
        }
    }
    r
}

fn random_stable_class(ring: &Ring, p: u64, n: u32, rng: &mut ChaCha8Rng) -> Result<StableClass> {
    let name = format!("v{n}");
    let a = rng.gen_range(0..6u32);
    let d = rng.gen_range(0..3u32);
    let scalar = 1 + rng.gen_range(0..(p - 1)) as i64;
    let coeff = ring.monomial(&[(name.as_str(), rng.gen_range(-2i64..3))], scalar)?;
    let key = CoopKey::e(a).mul(&CoopKey::v(n, d));
    let rep = CoopElement::term(ring, key, coeff);
    let level = a as i64 - 2 * ((p as i64).pow(n) - 1) * d as i64;
    StableClass::new(level, rep, p)
}

/// 7. sigma(delta(c)) = c on 50 random stable classes; the image of delta
///    agrees with the image of the h-fold suspension; delta is an algebra
///    map in the (0,0) case.
pub fn criterion_7_splitting(seed: u64) -> CriterionReport {
    let mut r = CriterionReport::new(7, "destabilisation right-inverse and image");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, n) = (3u64, 1u32);
    let outcome = (|| -> Result<()> {
        let ring = Ring::morava_k(p, n)?;
        let vn = ring.generator("v1")?;
        let s = IdempotentS::new(&ring, p, n, 1, &vn)?;
        let rel = s.height_relations(&ring)?;
        let mut all_round = true;
        let mut all_image = true;
        for _ in 0..50 {
            let c = random_stable_class(&ring, p, n, &mut rng)?;
            let target = c.level - rng.gen_range(0..4i64);
            let y = destabilise(&c, target, &s, &rel)?;
            let back = StableClass::new(target, y.clone(), p)?;
            all_round &= class_eq(&back, &c, &s, &rel)?;
            all_image &= y.is_zero() || suspension_image_witness(&y, s.h, &rel).is_some();
        }
        r.check(all_round, "sigma(delta(c)) = c on 50 random classes".into());
        r.check(all_image, "delta lands in the image of Sigma^h".into());

        // the reverse inclusion: h-fold suspensions project to themselves
        let mut all_rev = true;
        for _ in 0..20 {
            let c = random_stable_class(&ring, p, n, &mut rng)?;
            let x = reduce(&c.rep.mul_key(&CoopKey::e(s.h)), &rel.rules);
            if x.is_zero() {
                continue;
            }
            let cls = StableClass::new(c.level + s.h as i64, x.clone(), p)?;
            let y = destabilise(&cls, cls.level, &s, &rel)?;
            all_rev &= y == x;
        }
        r.check(all_rev, "Sigma^h classes destabilise to themselves".into());

        // delta multiplicative on bidegree-(0,0) classes
        let mut all_mult = true;
        for _ in 0..20 {
            let t1 = rng.gen_range(1..3u32);
            let t2 = rng.gen_range(1..3u32);
            let m1 = s.element.pow(t1)?;
            let m2 = s.element.pow(t2)?;
            let c1 = StableClass::new(0, m1.clone(), p)?;
            let c2 = StableClass::new(0, m2.clone(), p)?;
            let d1 = destabilise(&c1, 0, &s, &rel)?;
            let d2 = destabilise(&c2, 0, &s, &rel)?;
            let prod_class = StableClass::new(0, m1.mul(&m2)?, p)?;
            let dp = destabilise(&prod_class, 0, &s, &rel)?;
            all_mult &= reduce(&d1.mul(&d2)?, &rel.rules) == dp;
        }
        r.check(all_mult, "delta is multiplicative at bidegree (0,0)".into());
        Ok(())
    })();
    if let Err(e) = outcome {
        r.fail(format!("{e}"));
    }
    r
}

/// 8. The component formulas on an exhaustive grid, well-definedness under
///    periodicity, the printed special cases, and the composition law.
pub fn criterion_8_delooping() -> CriterionReport {
    let mut r = CriterionReport::new(8, "delooping component calculus");
    for (p, n) in [(3u64, 1u32), (3, 2), (5, 1)] {
        let period_value = period(p, n);
        for h in [1u32, 2] {
            let mut constraints = true;
            let mut well_defined = true;
            for k in -10..=10i64 {
                for l in -10..=10i64 {
                    for m in -10..=10i64 {
                        let c = deloop_component(k, l, m, h, p, n);
                        constraints &= c.satisfies_constraints(h, p, n);
                        // every valid presentation normalizes to the same pair
                        for extra in 1..=2u64 {
                            let other = (c.i + extra, c.j + extra * period_value as u64);
                            match deloop_normalize((c.i, c.j), other, h, period_value) {
                                Ok((v, ..)) => well_defined &= v == Verdict::Equal,
                                Err(_) => well_defined = false,
                            }
                        }
                    }
                }
            }
            r.check(
                constraints,
                format!("(p={p}, n={n}, h={h}) constraints on the full grid"),
            );
            r.check(
                well_defined,
                format!("(p={p}, n={n}, h={h}) periodic presentations normalize equal"),
            );
        }
        // printed special cases
        for k in [-3i64, 0, 4] {
            let c = deloop_component(k, 2, k, 1, p, n);
            r.check(
                (c.i, c.j) == (1, period_value as u64),
                format!("(p={p}, n={n}) m = k gives (1, {period_value})"),
            );
            let m = k - 3; // any m <= k - h
            let c = deloop_component(k, 2, m, 1, p, n);
            r.check(
                (c.i, c.j) == (0, (k - m) as u64),
                format!("(p={p}, n={n}) m <= k - h gives (0, k - m)"),
            );
        }
        // composition law at matched components
        let outer = MapSpec {
            name: "sigma".into(),
            source_level: 1,
            degree: 2,
            height: 1,
        };
        let inner = MapSpec {
            name: "rho".into(),
            source_level: -2,
            degree: 3,
            height: 1,
        };
        let mut compose_ok = true;
        for m in -6..=6 {
            match deloop_compose(&outer, &inner, 1, p, n, m) {
                Ok(report) => compose_ok &= report.verdict == Verdict::Equal,
                Err(_) => compose_ok = false,
            }
        }
        r.check(
            compose_ok,
            format!("(p={p}, n={n}) composition law componentwise"),
        );
    }
    r
}

/// 9. Loop heights: the free model realises the maximum 2 pi_n with
///    unstable bound 2 pi_n + 1; the K(n) self relation brings it to 1.
pub fn criterion_9_loop_heights() -> CriterionReport {
    let mut r = CriterionReport::new(9, "additive and unstable loop heights");
    for (p, n) in GRID {
        let outcome = (|| -> Result<()> {
            let prec = (p as u32).pow(n);
            let d = derive_relations(p, n, prec)?;
            let bound = (2 * pi_value(p, n)) as u32;
            let (h, report) = additive_loop_height(&d.relations, None, p, n)?;
            r.check(
                h == bound && report.at_free_model_bound,
                format!("(p={p}, n={n}) free-model height = 2 pi_n = {bound}"),
            );
            let (lo, hi) = unstable_height_bounds(h);
            r.check(
                lo == bound && hi == bound + 1 && hi == unstable_global_bound(p, n),
                format!("(p={p}, n={n}) unstable bound {hi}"),
            );
            let extra = kn_self_relations(&d.relations.ring, p, n, &d.relations.vn_e)?;
            let (h_self, _) = additive_loop_height(&d.relations, Some(&extra), p, n)?;
            r.check(h_self == 1, format!("(p={p}, n={n}) self-model height 1"));
            Ok(())
        })();
        if let Err(e) = outcome {
            r.fail(format!("(p={p}, n={n}): {e}"));
        }
    }
    r
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    vec![
        criterion_1_fgl_axioms(),
        criterion_2_p_series(),
        criterion_3_v_round_trip(seed),
        criterion_4_relation_derivation(),
        criterion_5_hopf_quotient(),
        criterion_6_idempotent(seed),
        criterion_7_splitting(seed),
        criterion_8_delooping(),
        criterion_9_loop_heights(),
    ]
}
