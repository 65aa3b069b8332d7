//! Command-line surface over the entropy library: generators, exact
//! counting, Monte Carlo estimation, trail statistics, condition checkers
//! and the switching laboratory, all emitting reproducible reports.
//!
//! Reports embed the resolved configuration and the tool version; reruns
//! with an identical configuration are byte-identical, whatever the thread
//! count.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use euler_entropy::generators::DEFAULT_SEED;
use euler_entropy::orientations::DEFAULT_EDGE_CAP;
use euler_entropy::partitions::DEFAULT_ENUMERATION_CAP;
use euler_entropy::spectra::DEFAULT_EIGEN_TOL;
use euler_entropy::trails::DEFAULT_TRAIL_BUDGET;
use euler_entropy::{generate, Error, GeneratorSpec, MultiGraph};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the default enumeration caps (partition
/// enumeration and trail-search budget). Explicit flags win over it.
const BUDGET_ENV: &str = "EULER_ENTROPY_BUDGET";

#[derive(Parser)]
#[command(name = "euler-entropy", version, about = "Residual entropy of Eulerian orientations: exact counts, sampling estimates, and the checkers around them", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GraphSource {
    /// Generator DSL, e.g. cycle:6, torus:3x3, circulant:6:1,2, rr:20:4:7,
    /// product:(cycle:5),(cycle:5)
    #[arg(long, conflicts_with = "file")]
    graph: Option<String>,
    /// Edge-list file: header "n m", then one "u v" line per edge
    #[arg(long)]
    file: Option<std::path::PathBuf>,
}

impl GraphSource {
    fn load(&self) -> Result<(MultiGraph, String), Error> {
        match (&self.graph, &self.file) {
            (Some(spec), None) => {
                let g = generate(&GeneratorSpec::parse(spec)?)?;
                Ok((g, spec.clone()))
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidParam(format!("cannot read {}: {e}", path.display())))?;
                Ok((MultiGraph::parse_edge_list(&text)?, format!("file:{}", path.display())))
            }
            _ => Err(Error::InvalidParam("provide exactly one of --graph or --file".into())),
        }
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph as an edge list
    Gen {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact Eulerian-orientation count and residual entropy
    Eo {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
        /// Edge cap for the exact backtracking
        #[arg(long, default_value_t = DEFAULT_EDGE_CAP)]
        max_edges: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Pauling estimate for an even degree
    Pauling {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo entropy estimate from uniform random pairings
    Mc {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Closed-trail count table (CSV)
    Trails {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 8)]
        lmax: usize,
        /// Override the short-trail vertex cap k
        #[arg(long)]
        k: Option<usize>,
        /// Constant C of the growth bound C e^-(ell+1) d^(ell-1) n
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        /// Search-state budget for the trail DFS
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check the short-trail growth hypothesis (CSV, same schema as trails)
    CheckTheorem {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 8)]
        lmax: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Adjacency spectrum with exact multiplicities
    Spectrum {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = DEFAULT_EIGEN_TOL)]
        tol: f64,
        /// json or csv
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Spectral outlier report at threshold d^(1-delta)
    CheckSpectral {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
    },
    /// Girth report
    CheckGirth {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Concentration bound for a Cartesian product with the given factor degrees
    CheckProduct {
        /// Comma-separated regular factor degrees, e.g. 1,1,2,3
        #[arg(long, conflicts_with = "ones")]
        degrees: Option<String>,
        /// Shorthand for t factors of degree 1
        #[arg(long)]
        ones: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build the switching instance and evaluate the class-mass bound and tails
    Switchlab {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
        /// Vertex cap for short trails (default: n)
        #[arg(long)]
        k: Option<usize>,
        /// Profile length cap (default: min(C(k,2), m))
        #[arg(long = "L")]
        l: Option<usize>,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        /// Threshold M of the split (default: M0 + 1)
        #[arg(long = "M")]
        m: Option<f64>,
        /// Partition-enumeration cap
        #[arg(long)]
        cap: Option<u64>,
        /// json (full instance + reports) or csv (tail table only)
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Exact integer identity between partition and orientation counts
    Identity {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_EDGE_CAP)]
        max_edges: usize,
    },
    /// Per-vertex trail-count law: exact convolution vs brute force
    Xlaw {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        output: OutputArgs,
        /// Emit a single PMF ("theory" or "brute") in value,prob_num,prob_den
        /// form instead of the comparison table
        #[arg(long)]
        pmf: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version output is a success path.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 2 } else { 1 })
        }
    }
}

fn env_budget() -> Option<u64> {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.parse().ok())
}

fn resolve_cap(flag: Option<u64>, default: u64) -> u64 {
    flag.or_else(env_budget).unwrap_or(default)
}

fn write_output(out: &Option<std::path::PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::InvalidParam(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| Error::InvalidParam(format!("cannot write stdout: {e}"))),
    }
}

fn json_report(config: serde_json::Value, body: serde_json::Value) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("version".into(), json!(VERSION));
    doc.insert("config".into(), config);
    if let serde_json::Value::Object(map) = body {
        for (k, v) in map {
            doc.insert(k, v);
        }
    }
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("serializable");
    s.push('\n');
    s
}

fn csv_report(config: serde_json::Value, body: &str) -> String {
    format!("# version: {VERSION}\n# config: {config}\n{body}")
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Gen { source, output } => {
            let (g, label) = source.load()?;
            let config = json!({"command": "gen", "graph": label});
            let body = format!("# version: {VERSION}\n# config: {config}\n{}", g.to_edge_list());
            write_output(&output.out, &body)
        }

        Command::Eo { source, output, max_edges, threads } => {
            let (g, label) = source.load()?;
            let config = json!({
                "command": "eo", "graph": label, "max_edges": max_edges, "threads": threads,
            });
            let body = if g.regular_degree().is_some_and(|d| d % 2 == 0) && g.n() > 0 {
                let rep = euler_entropy::orientations::lieb_wu_check(&g, max_edges, threads)?;
                json!({
                    "n": rep.n, "m": rep.m, "d": rep.d,
                    "eo_decimal_string": rep.eo_decimal_string,
                    "rho": rep.rho, "rho_hat": rep.rho_hat, "gap": rep.gap,
                })
            } else {
                let count =
                    euler_entropy::orientations::count_eulerian_orientations_capped(&g, max_edges, threads)?;
                json!({
                    "n": count.n, "m": count.m, "d": null,
                    "eo_decimal_string": count.eo.to_string(),
                    "rho": count.rho, "rho_hat": null, "gap": null,
                })
            };
            write_output(&output.out, &json_report(config, body))
        }

        Command::Pauling { d, output } => {
            let rho_hat = euler_entropy::orientations::pauling_estimate(d)?;
            let config = json!({"command": "pauling", "d": d});
            write_output(&output.out, &json_report(config, json!({"d": d, "rho_hat": rho_hat})))
        }

        Command::Mc { source, output, samples, seed, threads } => {
            let (g, label) = source.load()?;
            let config = json!({
                "command": "mc", "graph": label, "samples": samples, "seed": seed, "threads": threads,
            });
            let est = euler_entropy::partitions::mc_estimate(&g, samples, seed, threads)?;
            let body = serde_json::to_value(&est).expect("serializable");
            write_output(&output.out, &json_report(config, body))
        }

        Command::Trails { source, output, lmax, k, c, budget }
        | Command::CheckTheorem { source, output, lmax, k, c, budget } => {
            let (g, label) = source.load()?;
            let budget = resolve_cap(budget, DEFAULT_TRAIL_BUDGET);
            let config = json!({
                "command": "check-theorem", "graph": label, "lmax": lmax,
                "k": k, "C": c, "budget": budget,
            });
            let report = check_theorem_with_k(&g, c, lmax, k, budget)?;
            let mut body = report.to_csv();
            body.push_str(&format!(
                "# k: {} L: {} degenerate: {} all_pass: {}\n",
                report.params.k, report.params.l, report.degenerate, report.all_pass
            ));
            write_output(&output.out, &csv_report(config, &body))
        }

        Command::Spectrum { source, output, tol, format } => {
            let (g, label) = source.load()?;
            let config = json!({"command": "spectrum", "graph": label, "tol": tol, "format": format});
            let s = euler_entropy::spectra::eigenvalues(&g, tol)?;
            match format.as_str() {
                "json" => {
                    let values: Vec<serde_json::Value> = s
                        .entries
                        .iter()
                        .map(|(v, m)| json!({"value": v, "multiplicity": m.to_string()}))
                        .collect();
                    let body = json!({"n": g.n(), "values": values});
                    write_output(&output.out, &json_report(config, body))
                }
                "csv" => {
                    let mut rows = String::from("value,multiplicity\n");
                    for (v, m) in &s.entries {
                        rows.push_str(&format!("{v},{m}\n"));
                    }
                    write_output(&output.out, &csv_report(config, &rows))
                }
                other => Err(Error::InvalidParam(format!("unknown format {other:?}"))),
            }
        }

        Command::CheckSpectral { source, output, delta } => {
            let (g, label) = source.load()?;
            let config = json!({"command": "check-spectral", "graph": label, "delta": delta});
            let rep = euler_entropy::spectra::check_corollary_spectral(&g, delta)?;
            let body = serde_json::to_value(&rep).expect("serializable");
            write_output(&output.out, &json_report(config, body))
        }

        Command::CheckGirth { source, output } => {
            let (g, label) = source.load()?;
            let config = json!({"command": "check-girth", "graph": label});
            let body = json!({"n": g.n(), "m": g.m(), "girth": g.girth()});
            write_output(&output.out, &json_report(config, body))
        }

        Command::CheckProduct { degrees, ones, delta, output } => {
            let h: Vec<u64> = match (degrees, ones) {
                (Some(list), None) => list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| Error::InvalidParam(format!("bad degree {t:?}")))
                    })
                    .collect::<Result<_, _>>()?,
                (None, Some(t)) => vec![1; t],
                _ => return Err(Error::InvalidParam("provide exactly one of --degrees or --ones".into())),
            };
            let config = json!({"command": "check-product", "degrees": h, "delta": delta});
            let bound = euler_entropy::spectra::hoeffding_tail_bound(&h, delta)?;
            let d: u64 = h.iter().sum();
            let sum_sq: u64 = h.iter().map(|x| x * x).sum();
            let body = json!({
                "t": h.len(),
                "d": d,
                "sum_squares": sum_sq,
                "delta": delta,
                "deviation_threshold": (d as f64).powf(1.0 - delta / 4.0),
                "tail_bound": bound,
            });
            write_output(&output.out, &json_report(config, body))
        }

        Command::Switchlab { source, output, k, l, c, m, cap, format } => {
            let (g, label) = source.load()?;
            let cap = resolve_cap(cap, DEFAULT_ENUMERATION_CAP);
            let k = k.unwrap_or(g.n());
            let l = l.unwrap_or_else(|| (k * (k - 1) / 2).min(g.m()).max(3));
            let inst = euler_entropy::switching::build_switching_graph(&g, k, l, c, cap)?;
            let m = m.unwrap_or(inst.params.m0 + 1.0);
            let config = json!({
                "command": "switchlab", "graph": label, "k": k, "L": l, "C": c, "M": m, "cap": cap,
                "format": format,
            });
            let bound = euler_entropy::switching::check_switching_bound(&inst, m, inst.params.m0)?;
            let tail = euler_entropy::switching::tail_report(&g, k, c, m.ceil() as u64, cap)?;
            match format.as_str() {
                "json" => {
                    let body = json!({
                        "instance": inst.dump_json(),
                        "bound": bound_json(&bound),
                        "tail": tail_json(&tail),
                    });
                    write_output(&output.out, &json_report(config, body))
                }
                "csv" => write_output(&output.out, &csv_report(config, &tail.to_csv())),
                other => Err(Error::InvalidParam(format!("unknown format {other:?}"))),
            }
        }

        Command::Identity { source, output, cap, max_edges } => {
            let (g, label) = source.load()?;
            let cap = resolve_cap(cap, DEFAULT_ENUMERATION_CAP);
            let config = json!({
                "command": "identity", "graph": label, "cap": cap, "max_edges": max_edges,
            });
            let r = euler_entropy::partitions::exact_e2t(&g, cap, max_edges)?;
            let body = json!({
                "n": g.n(),
                "d": g.regular_degree(),
                "sum_2T": r.sum_2t.to_string(),
                "num_partitions": r.num_partitions.to_string(),
                "eo": r.eo.to_string(),
                "lhs": r.identity_lhs.to_string(),
                "rhs": r.identity_rhs.to_string(),
                "equal": r.identity_holds,
                "mean_2T": euler_entropy::partitions::rational_to_f64(&r.mean),
            });
            write_output(&output.out, &json_report(config, body))
        }

        Command::Xlaw { d, output, pmf } => {
            let config = json!({"command": "xlaw", "d": d, "pmf": pmf});
            let theory = euler_entropy::partitions::xi_pmf_theoretical(d)?;
            match pmf.as_deref() {
                Some("theory") => write_output(&output.out, &csv_report(config, &theory.to_csv())),
                Some("brute") => {
                    let brute = euler_entropy::partitions::xi_pmf_bruteforce(d)?;
                    write_output(&output.out, &csv_report(config, &brute.to_csv()))
                }
                Some(other) => Err(Error::InvalidParam(format!("unknown pmf {other:?}"))),
                None => {
                    let brute = euler_entropy::partitions::xi_pmf_bruteforce(d)?;
                    let mut rows = String::from("value,theory_num,theory_den,brute_num,brute_den,equal\n");
                    let values: std::collections::BTreeSet<u32> = theory
                        .probs
                        .iter()
                        .chain(&brute.probs)
                        .map(|(v, _)| *v)
                        .collect();
                    for v in values {
                        let t = theory.probs.iter().find(|(x, _)| *x == v).map(|(_, p)| p);
                        let b = brute.probs.iter().find(|(x, _)| *x == v).map(|(_, p)| p);
                        let fmt_num = |p: Option<&num_rational::BigRational>| {
                            p.map(|p| p.numer().to_string()).unwrap_or_else(|| "0".into())
                        };
                        let fmt_den = |p: Option<&num_rational::BigRational>| {
                            p.map(|p| p.denom().to_string()).unwrap_or_else(|| "1".into())
                        };
                        rows.push_str(&format!(
                            "{v},{},{},{},{},{}\n",
                            fmt_num(t),
                            fmt_den(t),
                            fmt_num(b),
                            fmt_den(b),
                            t == b
                        ));
                    }
                    write_output(&output.out, &csv_report(config, &rows))
                }
            }
        }
    }
}

fn check_theorem_with_k(
    g: &MultiGraph,
    c: f64,
    lmax: usize,
    k_override: Option<usize>,
    budget: u64,
) -> Result<euler_entropy::trails::TheoremReport, Error> {
    match k_override {
        None => euler_entropy::trails::check_theorem_hypothesis(g, c, lmax, budget),
        Some(k) => {
            // Same report, but with the vertex cap forced and L = C(k,2).
            let mut report = euler_entropy::trails::check_theorem_hypothesis(g, c, lmax, budget)?;
            let l = k * (k - 1) / 2;
            let d = report.d;
            let n = report.n;
            report.params = euler_entropy::trails::KLParams { k, l, lmax, d };
            report.degenerate = k < 3;
            let short = if k >= 3 && l >= 3 {
                Some(euler_entropy::trails::count_short_closed_trails(g, l, k, budget)?)
            } else {
                None
            };
            let table = euler_entropy::trails::count_closed_trails(g, lmax, budget)?;
            let top = lmax.max(if short.is_some() { l } else { 0 });
            let mut rows = Vec::new();
            let mut all_pass = true;
            for ell in 3..=top {
                let c_ell = table.c(ell).cloned();
                let c_k_ell = short.as_ref().and_then(|s| s.c(ell)).cloned();
                let bound = c * (-(ell as f64 + 1.0)).exp() * (d as f64).powi(ell as i32 - 1) * n as f64;
                let ok = [&c_ell, &c_k_ell]
                    .into_iter()
                    .flatten()
                    .all(|count| num_traits::ToPrimitive::to_f64(count).unwrap_or(f64::INFINITY) <= bound);
                all_pass &= ok;
                rows.push(euler_entropy::trails::HypothesisRow { ell, c_ell, c_k_ell, bound, pass: ok });
            }
            report.rows = rows;
            report.all_pass = all_pass;
            Ok(report)
        }
    }
}

fn bound_json(b: &euler_entropy::switching::BoundReport) -> serde_json::Value {
    let factor = b.bound.as_ref().and_then(|pb| pb.factor.as_ref());
    json!({
        "M": b.m,
        "M0": b.m0,
        "mass_Y": b.mass_y,
        "mass_Z": b.mass_z,
        "admissible": b.admissible,
        "violation": b.violation,
        "factor": factor.map(euler_entropy::partitions::rational_to_f64),
        "factor_num": factor.map(|f| f.numer().to_string()),
        "factor_den": factor.map(|f| f.denom().to_string()),
        "holds": b.holds,
        "vacuous": b.vacuous,
        "closed_form_applicable": b.closed_form_applicable,
        "closed_form": b.closed_form,
        "closed_form_holds": b.closed_form_holds,
    })
}

fn tail_json(t: &euler_entropy::switching::TailReport) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = t
        .rows
        .iter()
        .map(|r| json!({"M": r.m, "exact_tail": r.exact_tail, "bound": r.bound, "vacuous": r.vacuous}))
        .collect();
    json!({
        "M0": t.m0,
        "max_short_total": t.max_short_total,
        "lambda": t.lambda,
        "exact_mgf": t.exact_mgf,
        "mgf_closed_form": t.mgf_closed_form,
        "mgf_guaranteed": t.mgf_guaranteed,
        "rows": rows,
    })
}
