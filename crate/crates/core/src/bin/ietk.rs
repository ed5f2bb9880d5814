//! Command-line front end: class and reduction queries, induction traces, triple detection and
//! production, target families, Monte Carlo experiments and the Liouville construction.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use ietk::harness::{
    dichotomy_experiment, target_measure_sweep, volume_mc, zorich_growth_estimate, ExperimentConfig,
};
use ietk::iet::{parse_rational, render_rational, AnyIet, IetJson};
use ietk::induction::{trace, Mode};
use ietk::reduction::color_set;
use ietk::triples::{
    build_reference_path, detected_triples, enumerate_targets, enumerate_targets_b, liouville_builder,
    produce_triples, PairKind, Phi,
};
use ietk::{DecoratedClass, Error, Letter, Path, Permutation, RauzyClass, Result, Scalar};

#[derive(Parser)]
#[command(name = "ietk", version, about = "Interval exchange transformations and reduced triples")]
struct Cli {
    /// Exit with a nonzero status when a built-in check fails.
    #[arg(long, global = true)]
    check: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rauzy class of a permutation.
    Class {
        #[arg(long)]
        perm: String,
    },
    /// Decorated class and reduction for a color set.
    Reduce {
        #[arg(long)]
        perm: String,
        /// Comma-separated colored letters.
        #[arg(long)]
        colors: String,
    },
    /// Induction trace.
    Induct {
        #[command(flatten)]
        iet: IetArgs,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = TraceMode::Plain)]
        mode: TraceMode,
    },
    /// Reduced triples detected by the induction.
    Detect {
        #[command(flatten)]
        iet: IetArgs,
        #[arg(long, default_value_t = 100)]
        n_max: u64,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
    },
    /// Reduced triples produced at occurrences of a reference path.
    Produce {
        #[command(flatten)]
        iet: IetArgs,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 2_000)]
        max_steps: usize,
        #[arg(long, default_value_t = 12)]
        max_prefix: usize,
    },
    /// Shrinking-target families.
    Targets {
        #[arg(long)]
        perm: String,
        /// Avoided letter `W` (or `V` with `--b`).
        #[arg(long)]
        avoid: String,
        /// Comma-separated list of `ε` values.
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long, default_value_t = 200_000)]
        nodes: usize,
        /// Property-B refinement with letters `L,α`.
        #[arg(long)]
        b: Option<String>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Monte Carlo check of path volumes.
    VolumeMc {
        #[arg(long)]
        perm: String,
        #[arg(long, default_value_t = 5)]
        max_len: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Khinchin dichotomy experiment.
    Dichotomy {
        /// JSON configuration; flags override its fields.
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Per-sample CSV destination.
        #[arg(long)]
        output: Option<String>,
    },
    /// Empirical growth constant along occurrences of a path.
    ZorichEstimate {
        #[arg(long)]
        perm: String,
        /// Path as a string of `t` and `b`.
        #[arg(long)]
        eta: String,
        #[arg(long, default_value_t = 200)]
        samples: u64,
        #[arg(long, default_value_t = 2_000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Explicit mod-φ Liouville transformation.
    Liouville {
        #[arg(long)]
        perm: String,
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 3)]
        rounds: usize,
        #[arg(long, default_value_t = 100_000)]
        nodes: usize,
    },
}

#[derive(Args)]
struct IetArgs {
    /// JSON file with `{perm, lengths, backend}`.
    #[arg(long, conflicts_with_all = ["perm", "lengths"])]
    iet: Option<String>,
    #[arg(long, requires = "lengths")]
    perm: Option<String>,
    /// Comma-separated lengths, rationals `p/q` or decimals.
    #[arg(long)]
    lengths: Option<String>,
    #[arg(long, default_value = "exact")]
    backend: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceMode {
    Plain,
    Normalized,
    Zorich,
}

impl IetArgs {
    fn load(&self) -> Result<AnyIet> {
        let j = match (&self.iet, &self.perm, &self.lengths) {
            (Some(file), _, _) => {
                let text = fs::read_to_string(file).map_err(|e| Error::Parse(format!("{file}: {e}")))?;
                serde_json::from_str::<IetJson>(&text).map_err(|e| Error::Parse(e.to_string()))?
            }
            (None, Some(perm), Some(lengths)) => IetJson {
                perm: perm.clone(),
                lengths: lengths.split(',').map(|s| s.trim().to_string()).collect(),
                backend: self.backend.clone(),
            },
            _ => return Err(Error::Parse("give --iet or --perm with --lengths".into())),
        };
        AnyIet::from_json(&j)
    }
}

fn letter(pi: &Permutation, name: &str) -> Result<Letter> {
    pi.alphabet()
        .letter(name.trim())
        .ok_or_else(|| Error::Parse(format!("unknown letter {name}")))
}

fn letters(pi: &Permutation, list: &str) -> Result<Vec<Letter>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(|s| letter(pi, s)).collect()
}

fn rationals(list: &str) -> Result<Vec<BigRational>> {
    list.split(',').map(parse_rational).collect()
}

fn triple_json(pi: &Permutation, beta: Letter, alpha: Letter, n: u64, gap: String) -> Value {
    json!({"beta": pi.name(beta), "alpha": pi.name(alpha), "n": n, "gap": gap})
}

/// Output of one subcommand and whether its built-in check passed.
struct Outcome {
    text: String,
    ok: bool,
}

fn json_out(v: Value, ok: bool) -> Outcome {
    Outcome { text: serde_json::to_string_pretty(&v).expect("JSON values serialize"), ok }
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Class { perm } => {
            let pi = Permutation::parse(&perm)?;
            let class = RauzyClass::of(&pi)?;
            Ok(json_out(
                json!({
                    "size": class.len(),
                    "standard": class.find_standard().map(|p| p.to_string()),
                    "elements": class.elements().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                }),
                true,
            ))
        }
        Command::Reduce { perm, colors } => {
            let pi = Permutation::parse(&perm)?;
            let set = color_set(pi.d(), &letters(&pi, &colors)?);
            let dc = DecoratedClass::new(&pi, &set)?;
            Ok(json_out(serde_json::to_value(dc.summary()).expect("summary serializes"), true))
        }
        Command::Induct { iet, steps, mode } => {
            let mode = match mode {
                TraceMode::Plain => Mode::Plain,
                TraceMode::Normalized => Mode::Normalized,
                TraceMode::Zorich => Mode::Zorich,
            };
            let (rows, stop) = match iet.load()? {
                AnyIet::Exact(t) => trace(&t, steps, mode),
                AnyIet::Float(t) => trace(&t, steps, mode),
            };
            Ok(json_out(json!({"steps": rows, "stopped": stop.map(|e| e.to_string())}), true))
        }
        Command::Detect { iet, n_max, max_steps } => {
            let t = iet.load()?.exact();
            let pi = t.perm().clone();
            let found = detected_triples(&t, n_max, max_steps)?;
            let mut ok = true;
            let mut brute_count = None;
            if t.has_connection_up_to(n_max)?.is_none() {
                let brute = t.reduced_triples_up_to(n_max)?;
                ok = brute == found;
                brute_count = Some(brute.len());
            }
            let rows: Vec<Value> =
                found.iter().map(|(tr, g)| triple_json(&pi, tr.beta, tr.alpha, tr.n, g.render())).collect();
            Ok(json_out(json!({"triples": rows, "brute_force_count": brute_count, "agree": ok}), ok))
        }
        Command::Produce { iet, beta, alpha, max_steps, max_prefix } => {
            let t = iet.load()?.exact();
            let pi = t.perm().clone();
            let class = RauzyClass::of(&pi)?;
            let eta = build_reference_path(&class, &pi, letter(&pi, &beta)?, letter(&pi, &alpha)?, max_prefix)?;
            let produced = produce_triples(&t, &eta, max_steps)?;
            let ok = produced.iter().all(|(p, _)| p.reduced);
            let kind = match eta.kind {
                PairKind::A => "A".to_string(),
                PairKind::B { v, l } => format!("B(V={}, L={})", pi.name(v), pi.name(l)),
            };
            let rows: Vec<Value> = produced
                .iter()
                .map(|(p, _)| serde_json::to_value(p).expect("rows serialize"))
                .collect();
            Ok(json_out(json!({"reference_path": eta.path.kind_string(), "kind": kind, "produced": rows}), ok))
        }
        Command::Targets { perm, avoid, eps, depth, nodes, b, workers } => {
            let pi = Permutation::parse(&perm)?;
            let w = letter(&pi, &avoid)?;
            let grid = rationals(&eps)?;
            match b {
                None => {
                    let sweep = target_measure_sweep(&pi, w, &grid, depth, nodes, workers)?;
                    let mut ok = true;
                    let mut families = Vec::new();
                    for e in &grid {
                        let fam = enumerate_targets(&pi, w, e, depth, nodes)?;
                        ok &= fam.containment_violations(None) == 0 && fam.total() == BigRational::from_integer(1.into());
                        families.push(serde_json::to_value(fam.summary()).expect("summary serializes"));
                    }
                    Ok(json_out(json!({"sweep": sweep, "families": families}), ok))
                }
                Some(extra) => {
                    let ls = letters(&pi, &extra)?;
                    let [l, alpha] = ls[..] else {
                        return Err(Error::Parse("--b expects L,alpha".into()));
                    };
                    let mut ok = true;
                    let mut families = Vec::new();
                    for e in &grid {
                        let fam = enumerate_targets_b(&pi, w, l, alpha, e, depth, nodes)?;
                        ok &= fam.containment_violations(Some(l)) == 0;
                        let mut v = serde_json::to_value(fam.summary()).expect("summary serializes");
                        v["min_block_mass"] = json!(fam.min_block_mass.as_ref().map(render_rational));
                        families.push(v);
                    }
                    Ok(json_out(json!({"families": families}), ok))
                }
            }
        }
        Command::VolumeMc { perm, max_len, samples, seed, workers } => {
            let pi = Permutation::parse(&perm)?;
            let rows = volume_mc(&pi, max_len, samples, seed, workers)?;
            let ok = rows.iter().all(|r| r.z.abs() <= 4.0);
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            Ok(Outcome { text: String::from_utf8_lossy(&bytes).into_owned(), ok })
        }
        Command::Dichotomy { config, samples, n_max, seed, workers, output } => {
            let mut cfg = match config {
                Some(file) => {
                    let text = fs::read_to_string(&file).map_err(|e| Error::Parse(format!("{file}: {e}")))?;
                    serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| Error::Parse(e.to_string()))?
                }
                None => ExperimentConfig::default(),
            };
            cfg.samples = samples.unwrap_or(cfg.samples);
            cfg.n_max = n_max.unwrap_or(cfg.n_max);
            cfg.master_seed = seed.unwrap_or(cfg.master_seed);
            cfg.workers = workers.unwrap_or(cfg.workers);
            cfg.output = output.or(cfg.output);
            let report = dichotomy_experiment(&cfg)?;
            if let Some(path) = &cfg.output {
                fs::write(path, report.to_csv()?).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            }
            let ok = report.checks().iter().all(|c| c.1);
            Ok(json_out(serde_json::to_value(&report).expect("report serializes"), ok))
        }
        Command::ZorichEstimate { perm, eta, samples, steps, seed, workers } => {
            let pi = Permutation::parse(&perm)?;
            let eta = Path::parse(&pi, &eta)?;
            let report = zorich_growth_estimate(&eta, samples, steps, seed, workers)?;
            let ok = report.sup.is_some_and(|s| s.is_finite() && s > 1.0);
            Ok(json_out(serde_json::to_value(&report).expect("report serializes"), ok))
        }
        Command::Liouville { perm, phi, rounds, nodes } => {
            let pi = Permutation::parse(&perm)?;
            let phi: Phi = phi.parse()?;
            let class = RauzyClass::of(&pi)?;
            let res = liouville_builder(&class, &pi, &phi, rounds, nodes)?;
            let ok = res.certificates.iter().all(|c| c.reduced && c.below_phi);
            Ok(json_out(
                json!({
                    "iet": res.iet.to_json(),
                    "path": res.path.kind_string(),
                    "certificates": res.certificates,
                }),
                ok,
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            // A closed pipe is not an error for a filter-style tool.
            let _ = writeln!(std::io::stdout(), "{}", out.text);
            if cli.check && !out.ok {
                eprintln!("check failed");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
