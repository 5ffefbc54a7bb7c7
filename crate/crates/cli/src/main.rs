//! Command-line front end: formal group law queries, the co-operation
//! relation derivation, the idempotent splitting checks, the delooping
//! component calculus, and the full verification suite.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
//! configuration errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use opcalc_core::coeff::{Ring, RingSpec};
use opcalc_core::coop::{b_series, rw_lhs, rw_rhs, CoopElement, CoopKey};

use opcalc_core::deloop::{deloop_component, period};
use opcalc_core::error::Error;
use opcalc_core::fgl::{FormalGroupLaw, PSeriesData};
use opcalc_core::relations::{
    additive_loop_height, derive_relations, derive_relations_from, kn_self_relations, reduce,
    unstable_global_bound, unstable_height_bounds, RewriteRule,
};
use opcalc_core::series::SeriesData;
use opcalc_core::split::{destabilise, verify_idempotent, IdempotentS, StableClass};

#[derive(Parser)]
#[command(
    name = "opcalc",
    version,
    about = "Formal group law and cohomology operation calculus"
)]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized checks in verify-all.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Formal group law construction and p-series queries.
    Fgl {
        #[command(subcommand)]
        cmd: FglCmd,
    },
    /// Co-operation algebra: b-series, the p-series identity, relations.
    Coop {
        #[command(subcommand)]
        cmd: CoopCmd,
    },
    /// Idempotent splitting and destabilisation.
    Split {
        #[command(subcommand)]
        cmd: SplitCmd,
    },
    /// Components of a delooped operation: {i, j, sign}.
    Deloop(DeloopArgs),
    /// Run the whole verification suite.
    VerifyAll,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Law {
    Additive,
    Mult,
    Honda,
    Kn,
    File,
}

#[derive(Args, Clone)]
struct LawArgs {
    /// Which group law to use.
    #[arg(long, value_enum, default_value_t = Law::Kn)]
    law: Law,
    /// The odd prime p.
    #[arg(long, default_value_t = 3)]
    p: u64,
    /// The height parameter n (for honda and kn).
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Truncation precision; defaults to p^{n+1}.
    #[arg(long)]
    prec: Option<u32>,
    /// JSON file with {ring, series} for --law file.
    #[arg(long)]
    file: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum FglCmd {
    /// Check the group law axioms.
    Check(LawArgs),
    /// The n-series `[times]_F(x)`.
    Nseries {
        #[command(flatten)]
        law: LawArgs,
        /// Which multiple to compute.
        #[arg(long, default_value_t = 2)]
        times: i64,
    },
    /// The p-series `[p]_F(s)`.
    Pseries(LawArgs),
    /// The mod-p v-coefficients of the p-series.
    Vcoeffs(LawArgs),
    /// The height of the group law.
    Height(LawArgs),
    /// The tail decomposition F = x1 + x2 R1 = x2 + x1 R2.
    Tail(LawArgs),
}

#[derive(Subcommand)]
enum CoopCmd {
    /// The series b(s) with its augmentation.
    Bseries {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 8)]
        prec: u32,
    },
    /// Both sides of the p-series identity for the K(n) self model.
    Rwcheck {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Derive the co-operation relations for a generic height-n target.
    Derive {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Additive loop height from the derived relations.
    Height {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        prec: Option<u32>,
        /// Also impose the K(n) self-model height-1 identity.
        #[arg(long)]
        self_model: bool,
    },
}

#[derive(Subcommand)]
enum SplitCmd {
    /// Verify the four defining properties of the idempotent s.
    Verify {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Unstable loop height (1 for the K(n) self model).
        #[arg(long, default_value_t = 1)]
        h: u32,
    },
    /// Destabilise the class of `c e^a [v_n]^d` down to a target level.
    Destab {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        h: u32,
        /// e-exponent of the representative.
        #[arg(long, default_value_t = 2)]
        e_power: u32,
        /// Bracket exponent of the representative.
        #[arg(long, default_value_t = 0)]
        v_power: u32,
        /// Target space level.
        #[arg(long, default_value_t = 0)]
        target: i64,
    },
}

#[derive(Args)]
struct DeloopArgs {
    /// Source degree of the unstable operation.
    #[arg(long, allow_hyphen_values = true)]
    k: i64,
    /// Stable degree.
    #[arg(long, allow_hyphen_values = true)]
    l: i64,
    /// Component degree to reconstruct.
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Unstable loop height.
    #[arg(long, default_value_t = 1)]
    h: u32,
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    n: u32,
}

/// Configuration failures exit with status 2, verification failures with 1.
enum Failure {
    Config(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Config(e.to_string())
    }
}

fn validate(p: u64, n: u32, prec: Option<u32>) -> Result<u32, Failure> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Failure::Config(format!("p must be an odd prime, got {p}")));
    }
    Ring::prime_field(p).map_err(|e| Failure::Config(e.to_string()))?;
    if n == 0 {
        return Err(Failure::Config("n must be at least 1".into()));
    }
    let floor = p.pow(n);
    let default = floor.saturating_mul(p);
    if default > u32::MAX as u64 {
        return Err(Failure::Config(format!(
            "p^{{n+1}} = {default} is too large"
        )));
    }
    let prec = prec.unwrap_or(default as u32);
    if (prec as u64) < floor {
        return Err(Failure::Config(format!(
            "precision {prec} is below p^n = {floor}"
        )));
    }
    Ok(prec)
}

fn build_law(args: &LawArgs) -> Result<(FormalGroupLaw, u32), Failure> {
    let prec = validate(args.p, args.n, args.prec)?;
    let law = match args.law {
        Law::Additive => FormalGroupLaw::additive(args.p, prec)?,
        Law::Mult => FormalGroupLaw::multiplicative(args.p, prec)?,
        Law::Honda => FormalGroupLaw::honda(args.p, args.n, prec)?,
        Law::Kn => FormalGroupLaw::morava_k(args.p, args.n, prec)?,
        Law::File => {
            let path = args
                .file
                .as_ref()
                .ok_or_else(|| Failure::Config("--law file requires --file PATH".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let data: FglFile = serde_json::from_str(&text)
                .map_err(|e| Failure::Config(format!("bad FGL file: {e}")))?;
            let ring = Ring::new(data.ring)?;
            let series = opcalc_core::series::Series::from_data(&ring, &data.series)?;
            // axiom-checked before use
            FormalGroupLaw::from_series(series)?
        }
    };
    Ok((law, prec))
}

#[derive(serde::Deserialize)]
struct FglFile {
    ring: RingSpec,
    series: SeriesData,
}

fn series_json(s: &opcalc_core::series::Series) -> serde_json::Value {
    json!({
        "string": s.to_string(),
        "data": serde_json::to_value(s.to_data()).expect("serializable"),
    })
}

fn coop_json(x: &CoopElement) -> serde_json::Value {
    json!({
        "string": x.to_string(),
        "terms": serde_json::to_value(x.to_data()).expect("serializable"),
    })
}

fn rule_json(rule: &RewriteRule) -> serde_json::Value {
    json!({
        "name": rule.name,
        "lhs": CoopElement::from_key(rule.rhs.ring(), rule.lhs.clone()).to_string(),
        "rhs": rule.rhs.to_string(),
        "lhs_terms": serde_json::to_value(
            CoopElement::from_key(rule.rhs.ring(), rule.lhs.clone()).to_data()
        ).expect("serializable"),
        "rhs_terms": serde_json::to_value(rule.rhs.to_data()).expect("serializable"),
    })
}

fn run_fgl(cmd: &FglCmd, json_out: bool) -> Result<(), Failure> {
    match cmd {
        FglCmd::Check(args) => {
            let (law, prec) = build_law(args)?;
            let report = law.check_axioms()?;
            if json_out {
                println!(
                    "{}",
                    json!({
                        "precision": prec,
                        "unital": report.unital.passed(),
                        "commutative": report.commutative.passed(),
                        "associative": report.associative.passed(),
                    })
                );
            } else {
                print!("{report}");
            }
            if !report.all_pass() {
                return Err(Failure::Verification("axiom check failed".into()));
            }
        }
        FglCmd::Nseries { law, times } => {
            let (law, _) = build_law(law)?;
            let series = law.n_series(*times)?.rename_vars(&["s"]);
            if json_out {
                println!(
                    "{}",
                    json!({
                        "times": times,
                        "series": series.to_string(),
                        "data": serde_json::to_value(series.to_data()).expect("serializable"),
                    })
                );
            } else {
                println!("[{times}](s) = {series}");
            }
        }
        FglCmd::Pseries(args) => {
            let (law, _) = build_law(args)?;
            let series = law.n_series(args.p as i64)?.rename_vars(&["s"]);
            if json_out {
                println!(
                    "{}",
                    json!({
                        "series": series.to_string(),
                        "data": serde_json::to_value(series.to_data()).expect("serializable"),
                    })
                );
            } else {
                println!("[{}](s) = {series}", args.p);
            }
        }
        FglCmd::Vcoeffs(args) => {
            let (law, _) = build_law(args)?;
            let data = law.extract_v()?;
            if json_out {
                let coeffs: serde_json::Map<String, serde_json::Value> = data
                    .v_coeffs
                    .iter()
                    .map(|(i, v)| (format!("v{i}"), json!(v.to_string())))
                    .collect();
                println!(
                    "{}",
                    json!({ "v_coeffs": coeffs, "height": data.height.to_string(), "n_max": data.n_max })
                );
            } else {
                for (i, v) in &data.v_coeffs {
                    println!("v_{i} = {v}");
                }
                println!("height: {}", data.height);
            }
        }
        FglCmd::Height(args) => {
            let (law, _) = build_law(args)?;
            let data = law.extract_v()?;
            if json_out {
                println!(
                    "{}",
                    json!({ "height": data.height.to_string(), "n_max": data.n_max })
                );
            } else {
                println!("height: {} (searched i <= {})", data.height, data.n_max);
            }
        }
        FglCmd::Tail(args) => {
            let (law, _) = build_law(args)?;
            let (r1, r2) = law.tail_decompose()?;
            if json_out {
                println!(
                    "{}",
                    json!({ "r1": series_json(&r1), "r2": series_json(&r2) })
                );
            } else {
                println!("R1 = {r1}");
                println!("R2 = {r2}");
            }
        }
    }
    Ok(())
}

fn kn_model(p: u64, n: u32, prec: u32) -> Result<(FormalGroupLaw, PSeriesData, Ring), Failure> {
    let law = FormalGroupLaw::morava_k(p, n, prec)?;
    let data = law.extract_v()?;
    let ring = law.ring().clone();
    Ok((law, data, ring))
}

fn run_coop(cmd: &CoopCmd, json_out: bool) -> Result<(), Failure> {
    match cmd {
        CoopCmd::Bseries { p, prec } => {
            let ring = Ring::prime_field(*p)?;
            let b = b_series(&ring, *prec);
            let eps = b.augment()?;
            if json_out {
                println!(
                    "{}",
                    json!({ "b_series": b.to_string(), "augmentation": eps.to_string() })
                );
            } else {
                println!("b(s) = {b}");
                println!("eps b(s) = {eps}");
            }
        }
        CoopCmd::Rwcheck { p, n, prec } => {
            // the expansion of b(s)^{p^i} grows like partition counts in the
            // precision, and the check only needs the s^{p^n} coefficient,
            // so the default here is the tight p^n rather than p^{n+1}
            let tight = u32::try_from(p.pow(*n))
                .map_err(|_| Failure::Config(format!("p^{n} is too large")))?;
            let prec = validate(*p, *n, Some(prec.unwrap_or(tight)))?;
            let (law, data, ring) = kn_model(*p, *n, prec)?;
            let lhs = rw_lhs(&data, &ring, prec)?;
            let rhs = rw_rhs(&law, &data, &ring, prec)?;
            let d = p.pow(*n) as u32;
            let lhs_lead = lhs.coefficient(d)?;
            let rhs_lead = rhs.coefficient(d)?;
            let derivation = derive_relations_from(&data, &ring, *n, prec)?;
            // equating the s^{p^n} coefficients only becomes derivable after
            // multiplying through by b_1^{pi_n - 1}, which is where the
            // terminal relation lives
            let pi_n = derivation.relations.pi[*n as usize - 1];
            let multiplier = CoopKey::b(1, pi_n as u32 - 1);
            let diff = reduce(
                &lhs_lead.sub(&rhs_lead).mul_key(&multiplier),
                &derivation.relations.rules,
            );
            let eps_equal = lhs.augment()? == rhs.augment()?;
            let pass = diff.is_zero() && eps_equal;
            if json_out {
                println!(
                    "{}",
                    json!({
                        "degree": d,
                        "lhs_leading": coop_json(&lhs_lead),
                        "rhs_leading": coop_json(&rhs_lead),
                        "multiplier": multiplier.to_string(),
                        "difference_after_rewriting": diff.to_string(),
                        "augmentations_equal": eps_equal,
                        "pass": pass,
                    })
                );
            } else {
                println!("leading coefficient at s^{d}:");
                println!("  lhs: {lhs_lead}");
                println!("  rhs: {rhs_lead}");
                println!("  multiplied by {multiplier}, difference after rewriting: {diff}");
                println!("augmentations equal: {eps_equal}");
            }
            if !pass {
                return Err(Failure::Verification("rw check failed".into()));
            }
        }
        CoopCmd::Derive { p, n, prec } => {
            let prec = validate(*p, *n, *prec)?;
            let derivation = derive_relations(*p, *n, prec)?;
            let intermediates: Vec<_> = derivation
                .intermediate_rules()
                .iter()
                .map(|r| rule_json(r))
                .collect();
            if json_out {
                println!(
                    "{}",
                    json!({
                        "p": p,
                        "n": n,
                        "pi_values": derivation.relations.pi,
                        "intermediate_relations": intermediates,
                        "final_relation": rule_json(derivation.final_rule()),
                    })
                );
            } else {
                println!("pi values: {:?}", derivation.relations.pi);
                for stage in &derivation.stages {
                    println!(
                        "stage m={} (s^{}): lhs {} | rhs {}",
                        stage.m, stage.degree, stage.lhs, stage.rhs
                    );
                    for d in &stage.discards {
                        println!("  {d}");
                    }
                }
                for rule in &derivation.relations.rules {
                    println!("relation: {rule}");
                }
            }
        }
        CoopCmd::Height {
            p,
            n,
            prec,
            self_model,
        } => {
            let prec = validate(*p, *n, *prec)?;
            let derivation = derive_relations(*p, *n, prec)?;
            let extra = if *self_model {
                Some(kn_self_relations(
                    &derivation.relations.ring,
                    *p,
                    *n,
                    &derivation.relations.vn_e,
                )?)
            } else {
                None
            };
            let (h, report) = additive_loop_height(&derivation.relations, extra.as_ref(), *p, *n)?;
            let (lo, hi) = unstable_height_bounds(h);
            if json_out {
                println!(
                    "{}",
                    json!({
                        "additive_height": h,
                        "at_free_model_bound": report.at_free_model_bound,
                        "search_bound": report.search_bound,
                        "unstable_bounds": [lo, hi],
                        "unstable_global_bound": unstable_global_bound(*p, *n),
                    })
                );
            } else {
                println!("additive loop height: {h}");
                if report.at_free_model_bound {
                    println!(
                        "(equals the free-model maximum 2 pi_n = {})",
                        report.search_bound
                    );
                }
                println!("unstable loop height in [{lo}, {hi}]");
                println!("global unstable bound: {}", unstable_global_bound(*p, *n));
            }
        }
    }
    Ok(())
}

fn run_split(cmd: &SplitCmd, json_out: bool) -> Result<(), Failure> {
    match cmd {
        SplitCmd::Verify { p, n, h } => {
            validate(*p, *n, None)?;
            let ring = Ring::morava_k(*p, *n)?;
            let vn = ring.generator(&format!("v{n}"))?;
            let s = IdempotentS::new(&ring, *p, *n, *h, &vn)?;
            let rel = s.height_relations(&ring)?;
            let report = verify_idempotent(&s, &rel)?;
            if json_out {
                println!(
                    "{}",
                    json!({
                        "s": s.element.to_string(),
                        "companion": s.companion.to_string(),
                        "idempotent": report.idempotent.passed(),
                        "central": report.central.passed(),
                        "absorbs_suspension": report.absorbs_suspension.passed(),
                        "companion_factors": report.companion_factors.passed(),
                    })
                );
            } else {
                println!("s = {}", s.element);
                print!("{report}");
            }
            if !report.all_pass() {
                return Err(Failure::Verification("idempotent check failed".into()));
            }
        }
        SplitCmd::Destab {
            p,
            n,
            h,
            e_power,
            v_power,
            target,
        } => {
            validate(*p, *n, None)?;
            let ring = Ring::morava_k(*p, *n)?;
            let vn = ring.generator(&format!("v{n}"))?;
            let s = IdempotentS::new(&ring, *p, *n, *h, &vn)?;
            let rel = s.height_relations(&ring)?;
            let key = CoopKey::e(*e_power).mul(&CoopKey::v(*n, *v_power));
            let rep = CoopElement::from_key(&ring, key);
            let level = *e_power as i64 - 2 * ((*p as i64).pow(*n) - 1) * *v_power as i64;
            let class = StableClass::new(level, rep.clone(), *p)?;
            let image = destabilise(&class, *target, &s, &rel)?;
            let back = StableClass::new(*target, image.clone(), *p)?;
            let round_trip = opcalc_core::split::class_eq(&back, &class, &s, &rel)?;
            if json_out {
                println!(
                    "{}",
                    json!({
                        "class_level": level,
                        "representative": rep.to_string(),
                        "target_level": target,
                        "destabilised": coop_json(&image),
                        "round_trip": round_trip,
                    })
                );
            } else {
                println!("class at level {level}: {rep}");
                println!("delta at level {target}: {image}");
                println!("sigma(delta(c)) = c: {round_trip}");
            }
            if !round_trip {
                return Err(Failure::Verification(
                    "destabilisation round trip failed".into(),
                ));
            }
        }
    }
    Ok(())
}

fn run_deloop(args: &DeloopArgs, json_out: bool) -> Result<(), Failure> {
    validate(args.p, args.n, None)?;
    if args.h == 0 {
        return Err(Failure::Config("h must be at least 1".into()));
    }
    let c = deloop_component(args.k, args.l, args.m, args.h, args.p, args.n);
    debug_assert!(c.satisfies_constraints(args.h, args.p, args.n));
    if json_out {
        println!("{}", json!({ "i": c.i, "j": c.j, "sign": c.sign }));
    } else {
        println!(
            "component m={} of the delooping of r_{} (degree {}): {c}",
            args.m, args.k, args.l
        );
        println!("periodicity: (i, j) ~ (i+1, j+{})", period(args.p, args.n));
    }
    Ok(())
}

fn run_verify_all(seed: u64, json_out: bool) -> Result<(), Failure> {
    let reports = opcalc_core::verify::run_all(seed);
    let all_pass = reports.iter().all(|r| r.pass);
    if json_out {
        let items: Vec<_> = reports
            .iter()
            .map(|r| {
                json!({
                    "id": r.id,
                    "name": r.name,
                    "pass": r.pass,
                    "details": r.details,
                })
            })
            .collect();
        println!(
            "{}",
            json!({ "criteria": items, "all_pass": all_pass, "seed": seed })
        );
    } else {
        for r in &reports {
            println!(
                "criterion {} ({}): {}",
                r.id,
                r.name,
                if r.pass { "PASS" } else { "FAIL" }
            );
            if !r.pass {
                for d in &r.details {
                    eprintln!("  {d}");
                }
            }
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Verification("verification suite failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fgl { cmd } => run_fgl(cmd, cli.json),
        Command::Coop { cmd } => run_coop(cmd, cli.json),
        Command::Split { cmd } => run_split(cmd, cli.json),
        Command::Deloop(args) => run_deloop(args, cli.json),
        Command::VerifyAll => run_verify_all(cli.seed, cli.json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
