//! Argument definitions and subcommand implementations.
//!
//! Each command renders its whole report into a `String` so the binary only
//! has to print it; errors carry their exit status.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ngcost_core::{
    behavior_of, chsh_optimal_strategy, classical_optima, evaluate_quantum_strategy,
    hardy_strategy, make_chsh_game, make_family_game, make_hardy_game, ns_lower_bound,
    optimize_hardy_theta, seesaw_upper_bound, Behavior, DeterministicStrategy, Error,
    FamilyParams, Game, QuantumStrategy, SeesawConfig,
};
use serde_json::{json, Value};

use crate::formats::{read_game, strategy_to_json, parse_strategy};
use crate::sweep::{
    cap_csv, parse_number, run_hardy_cap_sweep, run_sweep, sweep_csv, threads_from_env, CapSpec,
    GridRange, Solvers, SweepSpec,
};
use crate::{fmt_float, CliError};

/// Optima listed in text output before eliding the rest.
const MAX_LISTED_OPTIMA: usize = 64;

fn number_arg(s: &str) -> Result<f64, String> {
    parse_number(s).map_err(|e| e.to_string())
}

fn cap_arg(s: &str) -> Result<CapSpec, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn range_arg(s: &str) -> Result<GridRange, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn solvers_arg(s: &str) -> Result<Solvers, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "ngcost", version, about = "Classical, quantum and non-signalling costs of non-local games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    Chsh,
    Hardy,
    Family,
}

#[derive(Debug, Clone, Args)]
pub struct GameSource {
    /// Built-in game.
    #[arg(long, value_enum, conflicts_with = "game")]
    pub builtin: Option<Builtin>,
    /// Game file in JSON.
    #[arg(long)]
    pub game: Option<PathBuf>,
    /// Hardy cost T of the possible event.
    #[arg(long = "T", default_value_t = 1.0, value_parser = number_arg)]
    pub t_cost: f64,
    /// Family angle φ in [0, π/2]; accepts `pi/N`.
    #[arg(long, value_parser = number_arg)]
    pub phi: Option<f64>,
    /// Family weight w ≥ 0.
    #[arg(long, value_parser = number_arg)]
    pub w: Option<f64>,
}

impl GameSource {
    pub fn load(&self) -> Result<(String, Game), CliError> {
        let usage = |e: Error| CliError::Usage(e.to_string());
        match (self.builtin, &self.game) {
            (Some(Builtin::Chsh), _) => Ok(("chsh".into(), make_chsh_game())),
            (Some(Builtin::Hardy), _) => Ok((
                format!("hardy(T={})", fmt_float(self.t_cost)),
                make_hardy_game(self.t_cost).map_err(usage)?,
            )),
            (Some(Builtin::Family), _) => {
                let (Some(phi), Some(w)) = (self.phi, self.w) else {
                    return Err(CliError::Usage("--builtin family requires --phi and --w".into()));
                };
                let p = FamilyParams::new(phi, w).map_err(usage)?;
                Ok((
                    format!("family(phi={}, w={})", fmt_float(phi), fmt_float(w)),
                    make_family_game(p),
                ))
            }
            (None, Some(path)) => Ok((path.display().to_string(), read_game(path)?)),
            (None, None) => Err(CliError::Usage("one of --builtin or --game is required".into())),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SeesawArgs {
    /// Alice's local dimension.
    #[arg(long, default_value_t = 2)]
    pub dim_a: usize,
    /// Bob's local dimension.
    #[arg(long, default_value_t = 2)]
    pub dim_b: usize,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Stop a restart once an iteration improves by less than this.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl SeesawArgs {
    pub fn config(&self) -> Result<SeesawConfig, CliError> {
        let cfg = SeesawConfig {
            d_a: self.dim_a,
            d_b: self.dim_b,
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed: self.seed,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal classical cost by exhaustive enumeration.
    Classical {
        #[command(flatten)]
        source: GameSource,
        #[arg(long)]
        json: bool,
    },
    /// Cost of a given quantum strategy.
    Quantum {
        #[command(flatten)]
        source: GameSource,
        /// `chsh-optimal`, `hardy:<theta>`, `hardy:opt` or a strategy file.
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        json: bool,
    },
    /// See-saw upper bound on the quantum cost.
    Seesaw {
        #[command(flatten)]
        source: GameSource,
        #[command(flatten)]
        seesaw: SeesawArgs,
        /// Replacement for infinite costs, or `auto` for twice the largest finite cost.
        #[arg(long, value_parser = cap_arg)]
        cap: Option<CapSpec>,
        /// Write the best strategy to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Non-signalling lower bound.
    Ns {
        #[command(flatten)]
        source: GameSource,
        #[arg(long)]
        json: bool,
    },
    /// CSV sweep over the (phi, w) family.
    Sweep {
        /// `start,end,steps`; endpoints accept `pi/N`.
        #[arg(long, value_parser = range_arg)]
        phi_range: GridRange,
        #[arg(long, value_parser = range_arg)]
        w_range: GridRange,
        #[arg(long, value_parser = cap_arg)]
        cap: Option<CapSpec>,
        /// Comma-separated subset of `classical,seesaw,ns`.
        #[arg(long, default_value = "all", value_parser = solvers_arg)]
        solvers: Solvers,
        #[command(flatten)]
        seesaw: SeesawArgs,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV sweep over finite caps of the Hardy game.
    HardyCapSweep {
        #[arg(long = "T", default_value_t = 1.0, value_parser = number_arg)]
        t_cost: f64,
        /// Comma-separated caps.
        #[arg(long, value_delimiter = ',', value_parser = number_arg, conflicts_with = "cap_range")]
        caps: Vec<f64>,
        /// `start,end,steps` range of caps.
        #[arg(long, value_parser = range_arg)]
        cap_range: Option<GridRange>,
        #[arg(long, default_value = "all", value_parser = solvers_arg)]
        solvers: Solvers,
        #[command(flatten)]
        seesaw: SeesawArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Angle maximizing the probability of Hardy's possible event.
    HardyTheta {
        #[arg(long)]
        json: bool,
    },
}

pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Classical { source, json } => cmd_classical(&source, json),
        Command::Quantum {
            source,
            strategy,
            json,
        } => cmd_quantum(&source, &strategy, json),
        Command::Seesaw {
            source,
            seesaw,
            cap,
            out,
            json,
        } => cmd_seesaw(&source, &seesaw, cap, out.as_deref(), json),
        Command::Ns { source, json } => cmd_ns(&source, json),
        Command::Sweep {
            phi_range,
            w_range,
            cap,
            solvers,
            seesaw,
            out,
        } => {
            let spec = SweepSpec {
                phi: phi_range,
                w: w_range,
                cap: cap.unwrap_or_default(),
                seesaw: seesaw.config()?,
                solvers,
            };
            let csv = sweep_csv(&run_sweep(&spec, threads_from_env()?)?);
            emit(csv, out.as_deref())
        }
        Command::HardyCapSweep {
            t_cost,
            caps,
            cap_range,
            solvers,
            seesaw,
            out,
        } => {
            let caps = match cap_range {
                Some(r) => r.points(),
                None => caps,
            };
            let rows = run_hardy_cap_sweep(t_cost, &caps, &seesaw.config()?, solvers, threads_from_env()?)?;
            emit(cap_csv(t_cost, &rows), out.as_deref())
        }
        Command::HardyTheta { json } => Ok(cmd_hardy_theta(json)),
    }
}

fn emit(text: String, out: Option<&Path>) -> Result<String, CliError> {
    match out {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn json_cost(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn fmt_assignment(xs: &[usize]) -> String {
    let items: Vec<String> = xs.iter().map(usize::to_string).collect();
    format!("[{}]", items.join(","))
}

fn strategy_json(st: &DeterministicStrategy) -> Value {
    json!({ "alpha": st.alpha, "beta": st.beta })
}

pub fn cmd_classical(source: &GameSource, as_json: bool) -> Result<String, CliError> {
    let (name, g) = source.load()?;
    let (cost, optima) = classical_optima(&g)?;
    let cost = cost.value();
    if as_json {
        return Ok(pretty(&json!({
            "game": name,
            "classical_cost": json_cost(cost),
            "witness": strategy_json(&optima[0]),
            "optima": optima.iter().map(strategy_json).collect::<Vec<_>>(),
        })));
    }
    let mut out = String::new();
    let _ = writeln!(out, "game: {name}");
    let _ = writeln!(out, "classical cost: {}", fmt_float(cost));
    let w = &optima[0];
    let _ = writeln!(out, "witness: alpha={} beta={}", fmt_assignment(&w.alpha), fmt_assignment(&w.beta));
    let _ = writeln!(out, "optimal deterministic strategies: {}", optima.len());
    for st in optima.iter().take(MAX_LISTED_OPTIMA) {
        let _ = writeln!(out, "  alpha={} beta={}", fmt_assignment(&st.alpha), fmt_assignment(&st.beta));
    }
    if optima.len() > MAX_LISTED_OPTIMA {
        let _ = writeln!(out, "  ... {} more", optima.len() - MAX_LISTED_OPTIMA);
    }
    Ok(out)
}

fn load_strategy(spec: &str) -> Result<(String, QuantumStrategy), CliError> {
    if spec == "chsh-optimal" {
        return Ok((spec.into(), chsh_optimal_strategy()));
    }
    if let Some(arg) = spec.strip_prefix("hardy:") {
        let theta = if arg == "opt" {
            optimize_hardy_theta().0
        } else {
            parse_number(arg)?
        };
        let qs = hardy_strategy(theta).map_err(|e| CliError::Usage(e.to_string()))?;
        return Ok((format!("hardy(theta={})", fmt_float(theta)), qs));
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read strategy {}: {e}", path.display())))?;
    Ok((path.display().to_string(), parse_strategy(&text)?))
}

fn behavior_table(b: &Behavior) -> String {
    let mut out = String::from("  s t a b p\n");
    for s in 0..b.n_s() {
        for t in 0..b.n_t() {
            for a in 0..b.n_a() {
                for bb in 0..b.n_b() {
                    let _ = writeln!(out, "  {s} {t} {a} {bb} {}", fmt_float(b.p(s, t, a, bb)));
                }
            }
        }
    }
    out
}

fn behavior_json(b: &Behavior) -> Value {
    let nested: Vec<Vec<Vec<Vec<f64>>>> = (0..b.n_s())
        .map(|s| {
            (0..b.n_t())
                .map(|t| (0..b.n_a()).map(|a| (0..b.n_b()).map(|bb| b.p(s, t, a, bb)).collect()).collect())
                .collect()
        })
        .collect();
    json!(nested)
}

pub fn cmd_quantum(source: &GameSource, strategy: &str, as_json: bool) -> Result<String, CliError> {
    let (name, g) = source.load()?;
    let (label, qs) = load_strategy(strategy)?;
    let cost = evaluate_quantum_strategy(&g, &qs)?.value();
    let behavior = behavior_of(&qs)?;
    if as_json {
        return Ok(pretty(&json!({
            "game": name,
            "strategy": label,
            "quantum_cost": json_cost(cost),
            "behavior": behavior_json(&behavior),
        })));
    }
    let mut out = String::new();
    let _ = writeln!(out, "game: {name}");
    let _ = writeln!(out, "strategy: {label}");
    let _ = writeln!(out, "quantum cost: {}", fmt_float(cost));
    out.push_str("behavior p(a,b|s,t):\n");
    out.push_str(&behavior_table(&behavior));
    Ok(out)
}

pub fn cmd_seesaw(
    source: &GameSource,
    args: &SeesawArgs,
    cap: Option<CapSpec>,
    out: Option<&Path>,
    as_json: bool,
) -> Result<String, CliError> {
    let (name, g) = source.load()?;
    let cfg = args.config()?;
    if g.has_infinite_costs() && cap.is_none() {
        return Err(Error::InfiniteCost.into());
    }
    let g = cap.unwrap_or_default().apply(&g)?;
    let report = seesaw_upper_bound(&g, &cfg)?;

    let mut finals: Vec<f64> = report.traces.iter().filter_map(|t| t.last().copied()).collect();
    let iterations: Vec<usize> = report.traces.iter().map(|t| t.len() - 1).collect();
    let hits = finals.iter().filter(|&&c| c <= report.best_cost + 1e-6).count();
    finals.sort_by(f64::total_cmp);
    let worst = finals.last().copied().unwrap_or(report.best_cost);
    let median = finals[finals.len() / 2];
    let mean_iters = iterations.iter().sum::<usize>() as f64 / iterations.len() as f64;

    if let Some(path) = out {
        write_file(path, &strategy_to_json(&report.best_strategy))?;
    }
    if as_json {
        return Ok(pretty(&json!({
            "game": name,
            "best_cost": report.best_cost,
            "best_restart": report.best_restart,
            "restarts": cfg.restarts,
            "restarts_within_1e-6": hits,
            "median_cost": median,
            "worst_cost": worst,
            "mean_iterations": mean_iters,
            "seed": cfg.seed,
        })));
    }
    let mut text = String::new();
    let _ = writeln!(text, "game: {name}");
    let _ = writeln!(text, "see-saw best cost: {}", fmt_float(report.best_cost));
    let _ = writeln!(text, "best restart: {} of {}", report.best_restart, cfg.restarts);
    let _ = writeln!(text, "restarts within 1e-6 of best: {hits}");
    let _ = writeln!(text, "median restart cost: {}", fmt_float(median));
    let _ = writeln!(text, "worst restart cost: {}", fmt_float(worst));
    let _ = writeln!(text, "mean iterations: {mean_iters}");
    if let Some(path) = out {
        let _ = writeln!(text, "best strategy written to {}", path.display());
    }
    Ok(text)
}

fn infeasibility_report(name: &str, g: &Game) -> String {
    let mut out = format!("infeasible: no non-signalling behavior avoids every infinite-cost event in {name}\n");
    out.push_str("forbidden events with positive input weight (s t a b):\n");
    for s in 0..g.n_s() {
        for t in 0..g.n_t() {
            if g.prob(s, t) == 0.0 {
                continue;
            }
            for a in 0..g.n_a() {
                for b in 0..g.n_b() {
                    if g.cost(s, t, a, b).is_infinite() {
                        let _ = writeln!(out, "  {s} {t} {a} {b}");
                    }
                }
            }
        }
    }
    out.pop();
    out
}

pub fn cmd_ns(source: &GameSource, as_json: bool) -> Result<String, CliError> {
    let (name, g) = source.load()?;
    let (value, behavior) = match ns_lower_bound(&g) {
        Ok(v) => v,
        Err(Error::Infeasible) => return Err(CliError::Infeasible(infeasibility_report(&name, &g))),
        Err(e) => return Err(e.into()),
    };
    if as_json {
        return Ok(pretty(&json!({
            "game": name,
            "ns_cost": value,
            "behavior": behavior_json(&behavior),
        })));
    }
    let mut out = String::new();
    let _ = writeln!(out, "game: {name}");
    let _ = writeln!(out, "non-signalling cost: {}", fmt_float(value));
    out.push_str("witness behavior p(a,b|s,t):\n");
    out.push_str(&behavior_table(&behavior));
    Ok(out)
}

pub fn cmd_hardy_theta(as_json: bool) -> String {
    let (theta, p) = optimize_hardy_theta();
    let cos2 = theta.cos().powi(2);
    if as_json {
        return pretty(&json!({ "theta": theta, "p": p, "cos2_theta": cos2 }));
    }
    format!(
        "theta*: {}\np*: {}\ncos^2(theta*): {}\n",
        fmt_float(theta),
        fmt_float(p),
        fmt_float(cos2)
    )
}
