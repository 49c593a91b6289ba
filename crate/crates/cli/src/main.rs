//! Command-line entry point.
//!
//! Exit codes: 0 success; 2 precondition or validation failure (with a
//! machine-readable error object on stderr); 3 uniqueness violation or an
//! irrational-laws / infinite-exponent flag escalated by --strict.

use clap::{Args, Parser, Subcommand};
use dioph_cli::inputs::{self, Family};
use dioph_cli::report::{float_str, Report};
use dioph_cli::selftest::Selftest;
use dioph_core::error::Error;
use dioph_core::liealg::{self, growth_exponent, laws_ideal};
use dioph_core::pencil::{pencil_contains, rationals_json, subspace_from_json, Pencil};
use dioph_core::qlinalg::{rat_parse, rat_string};
use dioph_core::repthy;
use dioph_core::sampler::RationalSampler;
use dioph_empirical::{
    dani_systole, estimate_beta, geometric_schedule, heisenberg_word_min, slope::slope_csv, Exec,
    MatF, QuasiNormF,
};
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "dioph", about = "Exact diophantine exponents of rational matrix manifolds and nilpotent groups, with empirical cross-checks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for every sampled computation (env DIOPH_SEED, default 1).
    #[arg(long, env = "DIOPH_SEED", default_value_t = 1)]
    seed: u64,
    /// Worker threads for the enumeration loops; 1 forces the sequential
    /// path.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Escalate uniqueness violations and irrationality flags to exit 3.
    #[arg(long, default_value_t = false)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form exponent tables as CSV (k, alpha, eta, beta, decimal).
    Formula {
        /// heisenberg | step2 | metabelian | us | free | veronese
        family: String,
        #[arg(long)]
        k: Option<u64>,
        /// Inclusive upper end of a k-range (CSV table).
        #[arg(long)]
        k_max: Option<u64>,
        #[arg(long)]
        s: Option<u64>,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        d1: Option<u64>,
        #[arg(long)]
        d2: Option<u64>,
        #[arg(long)]
        dim_last: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact exponent of a manifold: τ over its candidate family.
    Exponent {
        /// Manifold JSON path (see /schemas/manifold.schema.json).
        #[arg(long)]
        manifold: Option<String>,
        /// Built-in generator: heisenberg | us | free | abelian | veronese | wedge.
        #[arg(long)]
        family: Option<String>,
        /// Letters for evaluation families.
        #[arg(long)]
        k: Option<usize>,
        /// Step (u(s)) or generator count etc., per family.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// Veronese degree.
        #[arg(long)]
        p: Option<usize>,
        /// Veronese host: matrix algebra size.
        #[arg(long)]
        matrix_size: Option<usize>,
        /// Veronese host: split algebra dimension.
        #[arg(long)]
        split: Option<usize>,
        /// Use the Carnot–Carathéodory metric instead of Riemannian.
        #[arg(long, default_value_t = false)]
        cc_metric: bool,
        /// Write the manifold JSON actually used to this path.
        #[arg(long)]
        emit_manifold: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// The laws ideal of an algebra on k letters, with certificate.
    Laws {
        /// Built-in name (heisenberg, u(s), free(d,s), abelian(d)) or a
        /// JSON path.
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        k: usize,
        /// Degree cutoff; defaults to the algebra's step.
        #[arg(long)]
        s: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Membership of a manifold in a pencil P_{W,a,b}.
    PencilCheck {
        #[arg(long)]
        manifold: String,
        /// Pencil JSON path (see /schemas/pencil.schema.json).
        #[arg(long)]
        pencil: String,
        #[command(flatten)]
        common: Common,
    },
    /// Slope estimate of the exponent of a real matrix family member.
    Empirical {
        /// veronese-row | wedge | random
        #[arg(long, default_value = "veronese-row")]
        family: String,
        /// Degree of the veronese row (1, t, …, t^p).
        #[arg(long, default_value_t = 2)]
        p: usize,
        /// Rows for --family random.
        #[arg(long, default_value_t = 2)]
        rows: usize,
        /// Columns for --family random.
        #[arg(long, default_value_t = 3)]
        cols: usize,
        #[arg(long, default_value_t = 1e4)]
        qmax: f64,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Systole trace of the diagonal flow for a line (1, θ).
    Dani {
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 25.0)]
        tmax: f64,
        #[arg(long, default_value_t = 26)]
        tpoints: usize,
        #[arg(long, default_value_t = 1_000_000)]
        radius: i64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        common: Common,
    },
    /// The Heisenberg word-map experiment.
    Heisenberg {
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 60)]
        bound: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance criteria and print one line per criterion.
    Selftest {
        /// Comma-separated criterion ids; default all.
        #[arg(long)]
        criteria: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn exec_of(common: &Common) -> Exec {
    if common.threads == 1 {
        Exec::Sequential
    } else {
        dioph_empirical::configure_threads(common.threads);
        Exec::Auto
    }
}

fn fail(err: &dyn std::fmt::Display, code: i32) -> i32 {
    eprintln!("{}", json!({"error": err.to_string(), "exit": code}));
    code
}

fn run(cli: Cli) -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    match cli.command {
        Command::Formula { family, k, k_max, s, d, d1, d2, dim_last, p, m, common: _ } => {
            match formula_rows(&family, k, k_max, s, d, d1, d2, dim_last, p, m) {
                Ok(csv) => {
                    print!("{csv}");
                    0
                }
                Err(e) => fail(&e, 2),
            }
        }
        Command::Exponent {
            manifold,
            family,
            k,
            s,
            d,
            p,
            matrix_size,
            split,
            cc_metric,
            emit_manifold,
            common,
        } => {
            let mut report = Report::new("exponent", &argv, common.seed);
            let mut sampler = RationalSampler::new(common.seed);
            let loaded = match (&manifold, &family) {
                (Some(path), None) => match std::fs::read_to_string(path) {
                    Ok(raw) => {
                        report.add_input("manifold", Some(path), &raw);
                        inputs::parse_manifold(&raw)
                    }
                    Err(e) => return fail(&e, 2),
                },
                (None, Some(name)) => {
                    let fam = match name.as_str() {
                        "veronese" => Family::Veronese { p: p.unwrap_or(3), matrix_size, split },
                        "wedge" => Family::Wedge { k: k.unwrap_or(4) },
                        "heisenberg" => {
                            Family::Eval { algebra: "heisenberg".into(), k: k.unwrap_or(3), cc_metric }
                        }
                        "us" => Family::Eval {
                            algebra: format!("u({})", s.unwrap_or(3)),
                            k: k.unwrap_or(3),
                            cc_metric,
                        },
                        "free" => Family::Eval {
                            algebra: format!("free({},{})", d.unwrap_or(3), s.unwrap_or(3)),
                            k: k.unwrap_or(3),
                            cc_metric,
                        },
                        "abelian" => Family::Eval {
                            algebra: format!("abelian({})", d.unwrap_or(2)),
                            k: k.unwrap_or(2),
                            cc_metric,
                        },
                        other => return fail(&Error::Parse(format!("unknown family {other:?}")), 2),
                    };
                    inputs::generate_manifold(&fam, &mut sampler)
                }
                _ => return fail(&Error::Parse("need exactly one of --manifold or --family".into()), 2),
            };
            let m = match loaded {
                Ok(m) => m,
                Err(e) => return fail(&e, 2),
            };
            if let Some(path) = emit_manifold {
                let pretty = serde_json::to_string_pretty(&m.to_json()).unwrap();
                if let Err(e) = std::fs::write(&path, pretty) {
                    return fail(&e, 2);
                }
            }
            match m.tau(&mut sampler) {
                Ok(tau) => {
                    report.add_result("tau", tau.to_json());
                    report.flags = tau.flags.clone();
                    println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
                    if common.strict && !tau.flags.is_empty() {
                        3
                    } else {
                        0
                    }
                }
                Err(e @ Error::DuplicateArgmax { .. }) => fail(&e, 3),
                Err(e) => fail(&e, 2),
            }
        }
        Command::Laws { algebra, k, s, common } => {
            let mut report = Report::new("laws", &argv, common.seed);
            let g = if algebra.ends_with(".json") {
                match std::fs::read_to_string(&algebra) {
                    Ok(raw) => {
                        report.add_input("algebra", Some(&algebra), &raw);
                        match inputs::parse_lie_algebra(&raw) {
                            Ok((g, _)) => g,
                            Err(e) => return fail(&e, 2),
                        }
                    }
                    Err(e) => return fail(&e, 2),
                }
            } else {
                match liealg::builtin(&algebra) {
                    Ok(g) => g,
                    Err(e) => return fail(&e, 2),
                }
            };
            let step = s.unwrap_or_else(|| g.step().max(1));
            let mut sampler = RationalSampler::new(common.seed);
            match laws_ideal(&g, k, step, &mut sampler) {
                Ok(rf) => {
                    report.add_result(
                        "laws",
                        json!({
                            "dimension": rf.laws.dim(),
                            "basis": rf.laws.basis_rows().iter().map(|r| rationals_json(r)).collect::<Vec<_>>(),
                            "quotient_dims": rf.quotient_dims,
                            "growth_exponent": growth_exponent(&rf),
                        }),
                    );
                    report.add_certificate(
                        "samples",
                        json!(rf
                            .sample_log
                            .iter()
                            .map(|tuple| tuple.iter().map(|v| rationals_json(v)).collect::<Vec<_>>())
                            .collect::<Vec<_>>()),
                    );
                    if rf.irrational_flag {
                        report.flags.push("possible-irrational-laws".into());
                    }
                    println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
                    if common.strict && rf.irrational_flag {
                        3
                    } else {
                        0
                    }
                }
                Err(e) => fail(&e, 2),
            }
        }
        Command::PencilCheck { manifold, pencil, common } => {
            let mut report = Report::new("pencil-check", &argv, common.seed);
            let m = match std::fs::read_to_string(&manifold) {
                Ok(raw) => {
                    report.add_input("manifold", Some(&manifold), &raw);
                    match inputs::parse_manifold(&raw) {
                        Ok(m) => m,
                        Err(e) => return fail(&e, 2),
                    }
                }
                Err(e) => return fail(&e, 2),
            };
            let p = match std::fs::read_to_string(&pencil) {
                Ok(raw) => {
                    report.add_input("pencil", Some(&pencil), &raw);
                    match parse_pencil(&raw, &m.qv) {
                        Ok(p) => p,
                        Err(e) => return fail(&e, 2),
                    }
                }
                Err(e) => return fail(&e, 2),
            };
            let mut sampler = RationalSampler::new(common.seed);
            match pencil_contains(&m.map, &p, &m.qv, &m.qe, &mut sampler) {
                Ok(cert) => {
                    report.add_result(
                        "pencil",
                        json!({
                            "contains": cert.contains,
                            "psi_m": rat_string(&cert.psi_m),
                            "phi_m": rat_string(&cert.phi_m),
                            "a": rat_string(&p.a),
                            "b": rat_string(&p.b),
                        }),
                    );
                    report.add_certificate(
                        "samples",
                        json!(cert.samples.iter().map(|s| rationals_json(s)).collect::<Vec<_>>()),
                    );
                    println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());
                    0
                }
                Err(e) => fail(&e, 2),
            }
        }
        Command::Empirical { family, p, rows, cols, qmax, points, tolerance, common } => {
            let exec = exec_of(&common);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let (x, qv, qe, label) = match family.as_str() {
                "veronese-row" => {
                    let t: f64 = rng.random_range(0.1..0.9);
                    let row: Vec<f64> = (0..=p).map(|i| t.powi(i as i32)).collect();
                    let d = row.len();
                    (
                        MatF::from_rows(vec![row]),
                        QuasiNormF::unweighted(d),
                        QuasiNormF::unweighted(1),
                        format!("veronese-row(p={p}, t={t})"),
                    )
                }
                "wedge" => {
                    let params: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
                    (
                        dioph_cli::selftest::wedge_matrix(&params),
                        QuasiNormF::unweighted(6),
                        QuasiNormF::unweighted(3),
                        "wedge(k=4)".to_string(),
                    )
                }
                "random" => {
                    let x = MatF::from_rows(
                        (0..rows)
                            .map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect())
                            .collect(),
                    );
                    (
                        x,
                        QuasiNormF::unweighted(cols),
                        QuasiNormF::unweighted(rows),
                        format!("random({rows}×{cols})"),
                    )
                }
                other => return fail(&Error::Parse(format!("unknown family {other:?}")), 2),
            };
            let _ = tolerance;
            let ratio = (qmax / 16.0).powf(1.0 / (points.max(2) - 1) as f64);
            let schedule = geometric_schedule(16.0_f64.min(qmax), ratio.max(1.05), points);
            match estimate_beta(&x, &qv, &qe, &schedule, exec) {
                Ok(fit) => {
                    print!("{}", slope_csv(&fit));
                    let mut report = Report::new("empirical", &argv, common.seed);
                    report.add_result(
                        "fit",
                        json!({
                            "family": label,
                            "slope": float_str(fit.slope),
                            "intercept": float_str(fit.intercept),
                            "r2": float_str(fit.r2),
                            "excluded": fit.excluded,
                        }),
                    );
                    report.flags = fit.flags.clone();
                    eprintln!("{}", report.to_json());
                    0
                }
                Err(e) => fail(&e, 2),
            }
        }
        Command::Dani { theta, beta, tmax, tpoints, radius, tolerance, common } => {
            let exec = exec_of(&common);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let theta = theta.unwrap_or_else(|| rng.random_range(0.05..0.95));
            let x = MatF::from_rows(vec![vec![1.0, theta]]);
            let qv = QuasiNormF::unweighted(2);
            let qe = QuasiNormF::unweighted(1);
            let grid: Vec<f64> = (0..tpoints)
                .map(|i| tmax * i as f64 / (tpoints.max(2) - 1) as f64)
                .collect();
            match dani_systole(&x, &qv, &qe, beta, &grid, radius, tolerance, exec) {
                Ok(trace) => {
                    print!("{}", trace.csv());
                    let mut report = Report::new("dani", &argv, common.seed);
                    report.add_result(
                        "trace",
                        json!({
                            "theta": float_str(theta),
                            "beta": float_str(beta),
                            "radius": trace.radius,
                            "cond": float_str(trace.cond),
                        }),
                    );
                    if trace.cond_flag {
                        report.flags.push("rank-tolerance-ambiguous".into());
                    }
                    eprintln!("{}", report.to_json());
                    0
                }
                Err(e) => fail(&e, 2),
            }
        }
        Command::Heisenberg { k, bound, common } => {
            let exec = exec_of(&common);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let tuple: Vec<(f64, f64, f64)> = (0..k)
                .map(|_| {
                    (
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    )
                })
                .collect();
            match heisenberg_word_min(&tuple, bound, exec) {
                Ok(fit) => {
                    print!("{}", slope_csv(&fit));
                    let mut report = Report::new("heisenberg", &argv, common.seed);
                    report.add_result(
                        "fit",
                        json!({
                            "k": k,
                            "bound": bound,
                            "slope": float_str(fit.slope),
                            "r2": float_str(fit.r2),
                        }),
                    );
                    report.flags = fit.flags.clone();
                    eprintln!("{}", report.to_json());
                    0
                }
                Err(e) => fail(&e, 2),
            }
        }
        Command::Selftest { criteria, common } => {
            let exec = exec_of(&common);
            let ids: Vec<usize> = match criteria {
                None => (1..=dioph_cli::selftest::CRITERIA_COUNT).collect(),
                Some(list) => match list.split(',').map(|t| t.trim().parse()).collect() {
                    Ok(ids) => ids,
                    Err(e) => return fail(&e, 2),
                },
            };
            let mut driver = Selftest::new(common.seed, exec);
            let mut all_passed = true;
            for id in ids {
                let outcome = driver.run(id);
                println!("{}", outcome.line());
                all_passed &= outcome.passed;
            }
            if all_passed {
                0
            } else {
                1
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn formula_rows(
    family: &str,
    k: Option<u64>,
    k_max: Option<u64>,
    s: Option<u64>,
    d: Option<u64>,
    d1: Option<u64>,
    d2: Option<u64>,
    dim_last: Option<u64>,
    p: Option<u64>,
    m: Option<u64>,
) -> Result<String, Error> {
    let need = |o: Option<u64>, name: &str| {
        o.ok_or_else(|| Error::Precondition(format!("{family} needs --{name}")))
    };
    if family == "veronese" {
        let p = need(p, "p")?;
        let m = need(m, "m")?;
        let beta = repthy::veronese_beta(p, m)?;
        let dec = beta.to_f64().map(|x| format!("{x:.12e}")).unwrap_or_default();
        return Ok(format!("p,m,beta,beta_decimal\n{p},{m},{},{dec}\n", rat_string(&beta)));
    }
    let k0 = need(k, "k")?;
    let k1 = k_max.unwrap_or(k0).max(k0);
    let mut rows = Vec::new();
    for kk in k0..=k1 {
        let v = match family {
            "heisenberg" => repthy::heisenberg_beta(kk)?,
            "step2" => repthy::step2_beta(need(d1, "d1")?, need(d2, "d2")?, kk)?,
            "metabelian" => repthy::metabelian_beta(need(s, "s")?, need(dim_last, "dim-last")?, kk)?,
            "us" => repthy::us_beta(need(s, "s")?, kk)?,
            "free" => repthy::free_beta(need(d, "d")?, need(s, "s")?, kk)?,
            other => return Err(Error::Parse(format!("unknown formula family {other:?}"))),
        };
        rows.push(v);
    }
    Ok(repthy::formula_csv(&rows))
}

fn parse_pencil(raw: &str, qv: &dioph_core::pencil::QuasiNorm) -> Result<Pencil, Error> {
    let v: Value = serde_json::from_str(raw).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
    inputs::check_required(inputs::PENCIL_SCHEMA, &v, "pencil")?;
    let w = subspace_from_json(&v["w"])?;
    let a = rat_parse(v["a"].as_str().ok_or_else(|| Error::Parse("pencil missing a".into()))?)?;
    let b = rat_parse(v["b"].as_str().ok_or_else(|| Error::Parse("pencil missing b".into()))?)?;
    Pencil::new(w, a, b, qv)
}
