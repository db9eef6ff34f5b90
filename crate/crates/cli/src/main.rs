//! Batch front end. Every subcommand prints one machine-readable report
//! (JSON by default, CSV or text on request) and exits 0 when all requested
//! verdicts pass, 2 on pass-with-skips, 1 on any failed verdict, 64 on usage
//! errors and 65 on computational errors (which print the module error name
//! verbatim).

use clap::{Args, Parser, Subcommand};
use kodaira_core::{
    closed_form, closed_form_totals, compare_table, empirical_global, enumerate_exact,
    estimate_mc, global_density_formula, pushforward_uniformity, rat_str, run_tate,
    zeta_truncated, zeta_value, CensusMode, FieldSpec, FormTag, TateOutcome,
    WeierstrassCurve,
};
use kodaira_core::global::rel_close;
use kodaira_core::density::admissible_keys;
use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_SKIPS: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_ERROR: u8 = 65;

#[derive(Parser)]
#[command(name = "kodaira", version, about = "Local and global densities of Kodaira types over function fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Residue field size Q = p^n (stock moduli for 2,3,4,5,7,8,9,16,25,27)
    #[arg(long)]
    q: u64,
    /// Override modulus: comma-separated coefficients low-to-high, monic
    #[arg(long)]
    modulus: Option<String>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format
    #[arg(long, default_value = "json", value_parser = ["json", "csv", "text"])]
    format: String,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    /// Worker threads (default: all cores, or KODAIRA_WORKERS)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Run Tate's algorithm on one curve
    Tate {
        #[command(flatten)]
        field: FieldArgs,
        /// Curve as [a1, a2, a3, a4, a6] in the local-ring grammar
        #[arg(long)]
        curve: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact density enumeration with closed-form bracketing verdicts
    DensityExact {
        #[command(flatten)]
        field: FieldArgs,
        /// Coefficient form: G1 (p>=5), G2 (p=3), G3 (p=2) or LONG
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Class-visit budget
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo density estimates with sigma distances to the table
    DensityMc {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        form: String,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 16)]
        tail_depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Dump the closed-form density table
    Table {
        #[command(flatten)]
        field: FieldArgs,
        /// Largest I_n / I_n* index to include
        #[arg(long, default_value_t = 8)]
        max_n: u32,
        /// Largest iteration count to include
        #[arg(long, default_value_t = 1)]
        max_k: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Measure-preservation of the reduction map at finite depth
    Uniformity {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 1 << 26)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Zeta value of F_q(t), optionally checked against the Euler product
    Zeta {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        s: usize,
        /// Also evaluate the truncated Euler product to this degree
        #[arg(long)]
        euler_to: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Closed-form global density for S given by place degrees
    GlobalFormula {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Comma-separated degrees of the places in S, e.g. "1" or "1,2"
        #[arg(long)]
        s_degrees: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Census over curves with bounded-degree coefficients
    GlobalCensus {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long)]
        dmax: usize,
        /// Sample this many curves per degree instead of exhausting
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1 << 26)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap distinguishes help/version from real usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_PASS),
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn configure_workers(out: &OutputArgs) {
    #[cfg(feature = "parallel")]
    {
        let n = out
            .workers
            .or_else(|| std::env::var("KODAIRA_WORKERS").ok().and_then(|v| v.parse().ok()));
        if let Some(n) = n {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = out;
    }
}

fn resolve_field(args: &FieldArgs) -> Result<Arc<FieldSpec>, String> {
    match &args.modulus {
        None => FieldSpec::with_default_modulus(args.q).map_err(|e| e.to_string()),
        Some(text) => {
            let coeffs: Result<Vec<u64>, _> =
                text.split(',').map(|c| c.trim().parse::<u64>()).collect();
            let coeffs = coeffs.map_err(|e| format!("InvalidField: bad modulus: {e}"))?;
            let (p, n) = factor_prime_power(args.q)
                .ok_or_else(|| format!("InvalidField: {} is not a prime power", args.q))?;
            FieldSpec::new(p, n, &coeffs, "g").map_err(|e| e.to_string())
        }
    }
}

fn factor_prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut v = q;
            let mut n = 0;
            while v.is_multiple_of(p) {
                v /= p;
                n += 1;
            }
            return (v == 1).then_some((p, n));
        }
        p += 1;
    }
    Some((q, 1))
}

fn parse_form(s: &str) -> Result<FormTag, String> {
    match s.to_ascii_uppercase().as_str() {
        "G1" => Ok(FormTag::G1),
        "G2" => Ok(FormTag::G2),
        "G3" => Ok(FormTag::G3),
        "LONG" => Ok(FormTag::Long),
        other => Err(format!("UsageError: unknown form {other:?} (G1, G2, G3, LONG)")),
    }
}

struct Rendered {
    json: serde_json::Value,
    csv: String,
    text: String,
}

fn emit(out: &OutputArgs, r: &Rendered) -> Result<(), String> {
    let body = match out.format.as_str() {
        "json" => format!("{:#}\n", r.json),
        "csv" => r.csv.clone(),
        _ => r.text.clone(),
    };
    match &out.output {
        Some(path) => {
            let mut fh = std::fs::File::create(path).map_err(|e| format!("IoError: {e}"))?;
            fh.write_all(body.as_bytes()).map_err(|e| format!("IoError: {e}"))?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Tate { field, curve, out } => {
            configure_workers(&out);
            let f = resolve_field(&field)?;
            let e = WeierstrassCurve::parse(&f, &curve).map_err(|e| e.to_string())?;
            let outcome = run_tate(&e).map_err(|e| e.to_string())?;
            let json = serde_json::to_value(&outcome).unwrap();
            let (csv, text) = match &outcome {
                TateOutcome::Decided { kodaira, tamagawa, iterations, v_min_delta } => {
                    let vm = v_min_delta.map_or(String::new(), |v| v.to_string());
                    (
                        format!(
                            "kodaira,tamagawa,iterations,v_min_delta\n{kodaira},{tamagawa},{iterations},{vm}\n"
                        ),
                        format!(
                            "type {kodaira}, c = {tamagawa}, iterations = {iterations}, v(min Delta) = {vm}\n"
                        ),
                    )
                }
                TateOutcome::Undecided { blocking_reason, suggested_depth, .. } => (
                    format!("undecided,suggested_depth\n\"{blocking_reason}\",{suggested_depth}\n"),
                    format!("undecided: {blocking_reason}; retry with depth {suggested_depth}\n"),
                ),
            };
            emit(&out, &Rendered { json, csv, text })?;
            Ok(EXIT_PASS)
        }
        Command::DensityExact { field, form, depth, budget, out } => {
            configure_workers(&out);
            let f = resolve_field(&field)?;
            let form = parse_form(&form)?;
            let report = enumerate_exact(form, &f, depth, budget).map_err(|e| e.to_string())?;
            let checks = compare_table(&report);
            let mut json = report.to_json();
            json["checks"] =
                serde_json::Value::Array(checks.iter().map(|c| c.to_json()).collect());
            let mut csv = String::from("kodaira,tamagawa,iterations,mass,closed,verdict\n");
            let mut text = format!(
                "form {} over Q = {}, depth {}, visited {} classes, undecided mass {}\n",
                report.form,
                report.q,
                report.depth,
                report.classes_visited,
                rat_str(&report.undecided)
            );
            let mut fails = 0usize;
            let mut skips = 0usize;
            for c in &checks {
                let verdict = match c.verdict {
                    kodaira_core::TableVerdict::Pass => "pass",
                    kodaira_core::TableVerdict::Fail => {
                        fails += 1;
                        "fail"
                    }
                    kodaira_core::TableVerdict::Skip => {
                        skips += 1;
                        "skip"
                    }
                };
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.key.kodaira,
                    c.key.tamagawa,
                    c.key.iterations,
                    rat_str(&c.decided),
                    rat_str(&c.closed),
                    verdict
                ));
                if c.verdict != kodaira_core::TableVerdict::Skip {
                    text.push_str(&format!(
                        "  ({}, c={}, k={}): decided {} vs closed {} -> {}\n",
                        c.key.kodaira,
                        c.key.tamagawa,
                        c.key.iterations,
                        rat_str(&c.decided),
                        rat_str(&c.closed),
                        verdict
                    ));
                }
            }
            let exit = if fails > 0 {
                EXIT_FAIL
            } else if skips > 0 {
                EXIT_SKIPS
            } else {
                EXIT_PASS
            };
            emit(&out, &Rendered { json, csv, text })?;
            Ok(exit)
        }
        Command::DensityMc { field, form, samples, tail_depth, seed, out } => {
            configure_workers(&out);
            let f = resolve_field(&field)?;
            let form = parse_form(&form)?;
            let report =
                estimate_mc(form, &f, samples, tail_depth, seed).map_err(|e| e.to_string())?;
            let mut entries = Vec::new();
            let mut csv = String::from(
                "kodaira,tamagawa,iterations,hits,estimate,std_error,closed,sigma_distance,verdict\n",
            );
            let mut fails = 0usize;
            let mut skips = 0usize;
            for (key, &hits) in &report.hits {
                let est = report.estimate(key);
                let se = report.std_error(key);
                let closed = closed_form(report.q, key).ok();
                let (closed_s, sigma, verdict) = match &closed {
                    Some(cf) => {
                        let cfv = kodaira_core::rat_to_f64(cf);
                        let sigma = if se > 0.0 { (est - cfv).abs() / se } else { f64::INFINITY };
                        // few-hit keys carry no statistical weight
                        if hits < 10 {
                            skips += 1;
                            (rat_str(cf), sigma, "skip")
                        } else if sigma <= 5.0 {
                            (rat_str(cf), sigma, "pass")
                        } else {
                            fails += 1;
                            (rat_str(cf), sigma, "fail")
                        }
                    }
                    None => {
                        fails += 1;
                        (String::from(""), f64::NAN, "fail")
                    }
                };
                entries.push(serde_json::json!({
                    "kodaira": key.kodaira.to_string(),
                    "tamagawa": key.tamagawa,
                    "iterations": key.iterations,
                    "hits": hits,
                    "estimate": est,
                    "std_error": se,
                    "closed": closed_s,
                    "sigma_distance": if sigma.is_finite() { serde_json::json!(sigma) } else { serde_json::json!(null) },
                    "verdict": verdict,
                }));
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    key.kodaira, key.tamagawa, key.iterations, hits, est, se, closed_s, sigma, verdict
                ));
            }
            let mut json = report.to_json();
            json["entries"] = serde_json::Value::Array(entries);
            let text = format!(
                "{} samples over Q = {} (form {}), {} unresolved; see entries\n",
                report.samples, report.q, report.form, report.unresolved
            );
            let exit = if fails > 0 {
                EXIT_FAIL
            } else if skips > 0 {
                EXIT_SKIPS
            } else {
                EXIT_PASS
            };
            emit(&out, &Rendered { json, csv, text })?;
            Ok(exit)
        }
        Command::Table { field, max_n, max_k, out } => {
            configure_workers(&out);
            // only Q matters for the table; the field is validated for the
            // stock moduli but never constructed for custom Q values
            let q = field.q;
            if factor_prime_power(q).is_none() {
                return Err(format!("InvalidField: {q} is not a prime power"));
            }
            let mut entries = Vec::new();
            let mut csv = String::from("kodaira,tamagawa,iterations,mass\n");
            let mut text = format!("closed-form table for Q = {q}\n");
            for key in admissible_keys(max_n, max_k) {
                let mass = closed_form(q, &key).expect("admissible");
                entries.push(serde_json::json!({
                    "kodaira": key.kodaira.to_string(),
                    "tamagawa": key.tamagawa,
                    "iterations": key.iterations,
                    "mass": rat_str(&mass),
                }));
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    key.kodaira,
                    key.tamagawa,
                    key.iterations,
                    rat_str(&mass)
                ));
                if key.iterations == 0 {
                    text.push_str(&format!(
                        "  {} c={}: {}\n",
                        key.kodaira,
                        key.tamagawa,
                        rat_str(&mass)
                    ));
                }
            }
            let totals = closed_form_totals(q);
            let json = serde_json::json!({
                "Q": q,
                "max_n": max_n,
                "max_k": max_k,
                "entries": entries,
                "totals": serde_json::to_value(&totals).unwrap(),
            });
            emit(&out, &Rendered { json, csv, text })?;
            Ok(EXIT_PASS)
        }
        Command::Uniformity { field, depth, budget, out } => {
            configure_workers(&out);
            let f = resolve_field(&field)?;
            let dev = pushforward_uniformity(&f, depth, budget).map_err(|e| e.to_string())?;
            let pass = dev == num_rational::BigRational::from_integer(0.into());
            let json = serde_json::json!({
                "Q": f.q(),
                "depth": depth,
                "max_deviation": rat_str(&dev),
                "pass": pass,
            });
            let csv = format!("Q,depth,max_deviation,pass\n{},{},{},{}\n", f.q(), depth, rat_str(&dev), pass);
            let text = format!(
                "reduction pushforward over Q = {} at depth {}: max deviation {} -> {}\n",
                f.q(),
                depth,
                rat_str(&dev),
                if pass { "uniform" } else { "NOT uniform" }
            );
            let exit = if pass { EXIT_PASS } else { EXIT_FAIL };
            emit(&out, &Rendered { json, csv, text })?;
            Ok(exit)
        }
        Command::Zeta { q, s, euler_to, out } => {
            configure_workers(&out);
            let closed = zeta_value(q, s).map_err(|e| e.to_string())?;
            let mut json = serde_json::json!({
                "q": q,
                "s": s,
                "zeta": rat_str(&closed),
            });
            let mut exit = EXIT_PASS;
            let mut extra_text = String::new();
            if let Some(dmax) = euler_to {
                let f = resolve_field(&FieldArgs { q, modulus: None })?;
                let trunc = zeta_truncated(&f, s, dmax, 1 << 26).map_err(|e| e.to_string())?;
                let monotone = trunc.windows(2).all(|w| w[0].1 <= w[1].1);
                let within = rel_close(&trunc.last().unwrap().1, &closed, 1, 1_000_000_000);
                json["euler_truncated_to"] = serde_json::json!(dmax);
                json["euler_monotone"] = serde_json::json!(monotone);
                json["euler_within_1e9"] = serde_json::json!(within);
                if !(monotone && within) {
                    exit = EXIT_FAIL;
                }
                extra_text = format!(
                    "Euler product to degree {dmax}: monotone = {monotone}, within 1e-9 = {within}\n"
                );
            }
            let csv = format!("q,s,zeta\n{q},{s},{}\n", rat_str(&closed));
            let text = format!("zeta_K({s}) over F_{q}(t) = {}\n{extra_text}", rat_str(&closed));
            emit(&out, &Rendered { json, csv, text })?;
            Ok(exit)
        }
        Command::GlobalFormula { q, k, s_degrees, out } => {
            configure_workers(&out);
            let degrees: Result<Vec<u32>, _> =
                s_degrees.split(',').map(|d| d.trim().parse::<u32>()).collect();
            let degrees = degrees.map_err(|e| format!("UsageError: bad degree list: {e}"))?;
            let density = global_density_formula(q, &degrees, k).map_err(|e| e.to_string())?;
            let json = serde_json::json!({
                "q": q,
                "k": k,
                "s_degrees": degrees,
                "density": rat_str(&density),
            });
            let csv = format!("q,k,s_degrees,density\n{q},{k},\"{s_degrees}\",{}\n", rat_str(&density));
            let text = format!(
                "density of everywhere-(<= {k} iterations) curves, S of degrees {degrees:?} over F_{q}(t): {}\n",
                rat_str(&density)
            );
            emit(&out, &Rendered { json, csv, text })?;
            Ok(EXIT_PASS)
        }
        Command::GlobalCensus { field, k, dmax, sample, seed, budget, out } => {
            configure_workers(&out);
            let f = resolve_field(&field)?;
            let mode = match sample {
                Some(n) => CensusMode::Sampled { n, seed },
                None => CensusMode::Exhaustive,
            };
            let res = empirical_global(&f, k, dmax, mode, budget).map_err(|e| e.to_string())?;
            let json = res.to_json();
            let mut csv = String::from("d,total,singular,pass,fraction,formula\n");
            let mut text = format!("census over F_{}(t), k = {k}\n", f.q());
            for row in &res.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.d,
                    row.total,
                    row.singular,
                    row.pass,
                    rat_str(&row.fraction),
                    rat_str(&row.formula)
                ));
                text.push_str(&format!(
                    "  deg <= {}: {} curves, {} singular, {} pass, fraction {} (formula {})\n",
                    row.d,
                    row.total,
                    row.singular,
                    row.pass,
                    rat_str(&row.fraction),
                    rat_str(&row.formula)
                ));
            }
            emit(&out, &Rendered { json, csv, text })?;
            Ok(EXIT_PASS)
        }
    }
}
