//! Command-line front end. [`run`] is the whole program minus process exit,
//! so tests can drive it with in-memory streams.

use std::ffi::OsString;
use std::fs::File;
use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::auction::load_instance;
use crate::error::{Error, Result};
use crate::forward::random::{large_hotel_specs, medium_hotel_specs, random_instance, RandomSpec};
use crate::forward::{build_model, export_lp, run_benchmark, ObjectiveMode, SolveLimits, SolverKind};
use crate::money::Money;
use crate::reverse::{empirical_distribution, optimize_price, profit_curve, ratio_f64};
use crate::rules::{
    evaluate_estimator, generate_synthetic, mine_rules, read_dataset, write_dataset_to,
    write_ruleset, MinerConfig,
};
use crate::service::{arrival_entries, serve, Service};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hotel-auction", version, about = "Hotel-room auction clearing and pricing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clear a forward auction read from a JSON instance file.
    OptimizeForward {
        instance: PathBuf,
        #[arg(long, default_value = "exact")]
        solver: SolverKind,
        #[arg(long, default_value = "income")]
        objective: ObjectiveMode,
        /// Seconds the exact solver may run before reporting its gap.
        #[arg(long, default_value_t = 30.0)]
        time_limit: f64,
        /// Relative gap at which the exact solver may stop.
        #[arg(long, default_value_t = 0.0)]
        gap: f64,
    },
    /// Write the winner-determination model in CPLEX LP format.
    ExportLp {
        instance: PathBuf,
        #[arg(long, default_value = "income")]
        objective: ObjectiveMode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Profit-maximizing reverse-auction offer from past accepted prices.
    ///
    /// The history is a tab-separated file with an `accepted_price` column.
    ReversePrice {
        history: PathBuf,
        /// Cost per night, in currency units.
        #[arg(long)]
        cost: Money,
        /// Also print the expected-profit curve.
        #[arg(long)]
        curve: bool,
    },
    /// Mine price rules from a dataset of accepted offers.
    MineRules {
        dataset: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        support: f64,
        #[arg(long, default_value_t = 0.9)]
        confidence: f64,
        #[arg(long, default_value_t = 3)]
        max_antecedents: usize,
        #[arg(long, default_value_t = 8)]
        bins: usize,
        /// Emit JSON instead of one rule per line.
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a synthetic dataset of accepted offers.
    GenSynthetic {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Mine on a training set and report price-estimation errors on a test set.
    Evaluate {
        train: PathBuf,
        test: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        support: f64,
        #[arg(long, default_value_t = 0.9)]
        confidence: f64,
        #[arg(long, default_value_t = 3)]
        max_antecedents: usize,
        #[arg(long, default_value_t = 8)]
        bins: usize,
        /// Cost per night fed to the fallback optimizer, in currency units.
        #[arg(long, default_value = "0")]
        cost: Money,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API over a store file (created if missing).
    Serve {
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
    /// Time every solver on seeded random instances.
    Bench {
        /// `medium` or `large` hotel configurations.
        #[arg(long, default_value = "medium")]
        scale: String,
        /// Instances per configuration.
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value = "exact,greedy,fcfs", value_delimiter = ',')]
        solvers: Vec<SolverKind>,
        #[arg(long, default_value = "income")]
        objective: ObjectiveMode,
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
    },
    /// Write a seeded random forward-auction instance.
    GenForward {
        #[arg(long)]
        customers: u32,
        #[arg(long)]
        days: u32,
        /// Rooms per room type, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        capacities: Vec<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Runs the program with `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let doc = json!({ "error": "usage", "message": e.render().to_string().trim_end() });
            let _ = writeln!(err, "{doc}");
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let doc = json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(err, "{doc}");
            EXIT_DOMAIN
        }
    }
}

fn limits(time_limit: f64, gap: f64) -> Result<SolveLimits> {
    if !(time_limit.is_finite() && time_limit > 0.0) {
        return Err(Error::InvalidParameter(format!("time limit must be positive, got {time_limit}")));
    }
    if !(0.0..1.0).contains(&gap) {
        return Err(Error::InvalidParameter(format!("gap must be in [0, 1), got {gap}")));
    }
    Ok(SolveLimits {
        gap_tolerance: gap,
        ..SolveLimits::default().with_time_budget(Duration::from_secs_f64(time_limit))
    })
}

fn put(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

/// Runs `f` against the output file, or stdout when none is given.
fn with_output(
    path: Option<&Path>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut file = File::create(p).map_err(|e| Error::io(p, e))?;
            f(&mut file)?;
            file.flush().map_err(|e| Error::io(p, e))
        }
        None => f(out),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::OptimizeForward {
            instance,
            solver,
            objective,
            time_limit,
            gap,
        } => {
            let limits = limits(time_limit, gap)?;
            let inst = load_instance(&instance)?;
            let model = build_model(&inst.auction, &inst.bids, objective)?;
            let result = solver.solve(&model, &inst, limits)?;
            let horizon = inst.auction.horizon();
            let accepted: Vec<_> = result
                .solution
                .accepted
                .iter()
                .map(|(c, &a)| {
                    json!({
                        "bidid": c.0,
                        "arrival": horizon.date_at(a).map(|d| d.to_string()),
                        "arrival_index": a,
                    })
                })
                .collect();
            let doc = json!({
                "currency": inst.currency,
                "solver": solver,
                "objective_mode": objective,
                "status": result.status,
                "objective": result.solution.objective,
                "best_bound": result.best_bound,
                "nodes_explored": result.nodes_explored,
                "wall_time_ms": result.wall_time.as_secs_f64() * 1000.0,
                "accepted": accepted,
                "response": arrival_entries(&inst, &result.solution),
            });
            put(out, &format!("{}\n", serde_json::to_string_pretty(&doc)?))
        }
        Command::ExportLp {
            instance,
            objective,
            output,
        } => {
            let inst = load_instance(&instance)?;
            let model = build_model(&inst.auction, &inst.bids, objective)?;
            let lp = export_lp(&model);
            with_output(output.as_deref(), out, |w| put(w, &lp))
        }
        Command::ReversePrice {
            history,
            cost,
            curve,
        } => {
            let prices = read_accepted_prices(&history)?;
            let dist = empirical_distribution(&prices)?;
            let best = optimize_price(&dist, cost);
            let mut doc = json!({
                "cost": cost,
                "price": best.price,
                "expected_profit": ratio_f64(best.expected_profit),
                "acceptance_probability": ratio_f64(best.acceptance_probability),
                "abstain": best.abstain,
                "summary": format!(
                    "π*={} E[P]={}",
                    best.price,
                    Money::from_cents(ratio_f64(best.expected_profit).round() as i64)
                ),
            });
            if curve {
                doc["curve"] = json!(profit_curve(&dist, cost));
            }
            put(out, &format!("{}\n", serde_json::to_string_pretty(&doc)?))
        }
        Command::MineRules {
            dataset,
            support,
            confidence,
            max_antecedents,
            bins,
            json,
            output,
        } => {
            let data = read_dataset(&dataset)?;
            let config = MinerConfig {
                support,
                confidence,
                max_antecedents,
                bins,
            };
            let rules = mine_rules(&data, &config)?;
            with_output(output.as_deref(), out, |w| {
                if json {
                    put(w, &format!("{}\n", serde_json::to_string_pretty(&rules)?))
                } else {
                    write_ruleset(w, &rules)
                }
            })
        }
        Command::GenSynthetic { n, seed, output } => {
            if n == 0 {
                return Err(Error::InvalidParameter("n must be at least 1".into()));
            }
            let data = generate_synthetic(n, seed);
            with_output(output.as_deref(), out, |w| write_dataset_to(w, &data))
        }
        Command::Evaluate {
            train,
            test,
            support,
            confidence,
            max_antecedents,
            bins,
            cost,
            json,
        } => {
            let train = read_dataset(&train)?;
            let test = read_dataset(&test)?;
            let config = MinerConfig {
                support,
                confidence,
                max_antecedents,
                bins,
            };
            let ev = evaluate_estimator(&train, &test, &config, cost)?;
            if json {
                return put(out, &format!("{}\n", serde_json::to_string_pretty(&ev)?));
            }
            let mut text = String::from(
                "period\trating\tdistance\tbeds\tbreakfast\tsites\testimate(actual)\n",
            );
            for c in &ev.cases {
                text.push_str(&c.row());
                text.push('\n');
            }
            text.push_str(&format!(
                "rules\t{}\nconflicts\t{}\nMAE\t{:.2}\nMAPE\t{:.1}%\nbaseline MAE\t{:.2}\nbaseline MAPE\t{:.1}%\n",
                ev.rules,
                ev.conflicts,
                ev.mae,
                ev.mape * 100.0,
                ev.baseline_mae,
                ev.baseline_mape * 100.0
            ));
            put(out, &text)
        }
        Command::Serve { store, port, host } => {
            let service = Service::open(&store)?;
            let addr = SocketAddr::new(host, port);
            let rt = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| Error::io("<runtime>", e))?;
            put(out, &format!("listening on http://{addr}\n"))?;
            out.flush().map_err(|e| Error::io("<stdout>", e))?;
            rt.block_on(serve(service, addr))
        }
        Command::Bench {
            scale,
            seeds,
            solvers,
            objective,
            time_limit,
        } => {
            let specs = match scale.as_str() {
                "medium" => medium_hotel_specs(),
                "large" => large_hotel_specs(),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown scale {other:?} (expected medium|large)"
                    )))
                }
            };
            let instances = bench_instances(&specs, seeds);
            let rows = run_benchmark(&instances, &solvers, objective, limits(time_limit, 0.0)?)?;
            let mut text = format!("{}\n", crate::forward::BenchRow::HEADER);
            for r in rows {
                text.push_str(&r.tsv());
                text.push('\n');
            }
            put(out, &text)
        }
        Command::GenForward {
            customers,
            days,
            capacities,
            seed,
            output,
        } => {
            if days == 0 || capacities.is_empty() {
                return Err(Error::InvalidParameter("need at least one day and one room type".into()));
            }
            let inst = random_instance(&RandomSpec::new(customers, days, capacities), seed);
            let text = format!("{}\n", inst.to_json_pretty());
            with_output(output.as_deref(), out, |w| put(w, &text))
        }
    }
}

fn bench_instances(specs: &[RandomSpec], seeds: u64) -> Vec<(String, crate::auction::Instance)> {
    let mut out = Vec::new();
    for spec in specs {
        for seed in 0..seeds {
            let caps: Vec<String> = spec.capacities.iter().map(|c| c.to_string()).collect();
            let name = format!(
                "c{}-d{}-r{}-s{seed}",
                spec.customers,
                spec.days,
                caps.join("x")
            );
            out.push((name, random_instance(spec, seed)));
        }
    }
    out
}

/// Reads the `accepted_price` column of a tab-separated file with a header.
pub fn read_accepted_prices(path: &Path) -> Result<Vec<Money>> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h == "accepted_price")
        .ok_or_else(|| Error::Parse {
            location: format!("{}:1", path.display()),
            message: "no accepted_price column".into(),
        })?;
    let mut prices = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let cell = row.get(col).unwrap_or("");
        let price = cell.parse().map_err(|e| Error::Parse {
            location: format!("{}:{}", path.display(), i + 2),
            message: format!("accepted_price {cell:?}: {e}"),
        })?;
        prices.push(price);
    }
    Ok(prices)
}
