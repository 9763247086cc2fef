//! Parameter sweeps over the `G(φ, w)` family and over Hardy cost caps.
//!
//! Grid points are evaluated on a rayon pool, but rows are collected in grid
//! order and every solver is deterministic, so the CSV does not depend on
//! the worker count.

use std::fmt::Write as _;
use std::str::FromStr;

use ngcost_core::{
    cap_infinities, classical_cost, make_family_game, make_hardy_game, ns_lower_bound,
    seesaw_upper_bound, FamilyParams, Game, SeesawConfig,
};
use rayon::prelude::*;

use crate::{fmt_float, CliError};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "NGCOST_THREADS";

/// Parses a float, also accepting `pi`, `pi/N` and `K*pi/N`.
pub fn parse_number(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let bad = || CliError::Usage(format!("cannot parse number {text:?}"));
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t, 1.0),
    };
    let factor = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(k) => k.trim_end_matches('*').trim().parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(factor * std::f64::consts::PI / den)
}

/// `start,end,steps` with `steps` evenly spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.end
                } else {
                    self.start + (self.end - self.start) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

impl FromStr for GridRange {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(',').collect();
        let [start, end, steps] = parts[..] else {
            return Err(CliError::Usage(format!("range {s:?} must be start,end,steps")));
        };
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid step count in {s:?}")))?;
        if steps == 0 {
            return Err(CliError::Usage("range steps must be at least 1".into()));
        }
        Ok(GridRange {
            start: parse_number(start)?,
            end: parse_number(end)?,
            steps,
        })
    }
}

/// How infinite costs are replaced before running the see-saw.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CapSpec {
    #[default]
    None,
    /// Twice the largest finite cost.
    Auto,
    Value(f64),
}

impl FromStr for CapSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(CapSpec::Auto)
        } else {
            Ok(CapSpec::Value(parse_number(s)?))
        }
    }
}

impl CapSpec {
    /// Returns `g` with infinities capped, or `g` itself when it has none.
    pub fn apply(&self, g: &Game) -> Result<Game, CliError> {
        if !g.has_infinite_costs() {
            return Ok(g.clone());
        }
        let cap = match *self {
            CapSpec::None => return Ok(g.clone()),
            CapSpec::Auto => match g.max_finite_cost() {
                Some(m) if m > 0.0 => 2.0 * m,
                _ => 1.0,
            },
            CapSpec::Value(v) => v,
        };
        cap_infinities(g, cap).map_err(CliError::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solvers {
    pub classical: bool,
    pub seesaw: bool,
    pub ns: bool,
}

impl Default for Solvers {
    fn default() -> Self {
        Solvers {
            classical: true,
            seesaw: true,
            ns: true,
        }
    }
}

impl FromStr for Solvers {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut out = Solvers {
            classical: false,
            seesaw: false,
            ns: false,
        };
        for name in s.split(',').map(str::trim) {
            match name {
                "classical" => out.classical = true,
                "seesaw" => out.seesaw = true,
                "ns" => out.ns = true,
                "all" => out = Solvers::default(),
                other => return Err(CliError::Usage(format!("unknown solver {other:?}"))),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub phi: GridRange,
    pub w: GridRange,
    pub cap: CapSpec,
    pub seesaw: SeesawConfig,
    pub solvers: Solvers,
}

impl SweepSpec {
    /// Grid points in row order (φ outer, w inner), validated.
    pub fn grid(&self) -> Result<Vec<FamilyParams>, CliError> {
        let mut out = Vec::new();
        for phi in self.phi.points() {
            for w in self.w.points() {
                out.push(FamilyParams::new(phi, w).map_err(|e| CliError::Usage(e.to_string()))?);
            }
        }
        Ok(out)
    }
}

/// Solver outputs for one game. `None` marks a solver that was not run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverRow {
    pub classical: Option<f64>,
    pub seesaw: Option<f64>,
    pub ns: Option<f64>,
}

impl SolverRow {
    pub fn gap(&self) -> Option<f64> {
        Some(self.classical? - self.seesaw?)
    }

    fn csv_fields(&self, out: &mut String) {
        let field = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
        let _ = write!(
            out,
            "{},{},{},{}",
            field(self.classical),
            field(self.seesaw),
            field(self.ns),
            field(self.gap())
        );
    }
}

/// Exact classical and NS values on `exact`, see-saw on `for_seesaw`.
pub fn solve_all(
    exact: &Game,
    for_seesaw: &Game,
    cfg: &SeesawConfig,
    solvers: Solvers,
) -> Result<SolverRow, CliError> {
    let classical = if solvers.classical {
        Some(classical_cost(exact)?.0.value())
    } else {
        None
    };
    let seesaw = if solvers.seesaw {
        Some(seesaw_upper_bound(for_seesaw, cfg)?.best_cost)
    } else {
        None
    };
    let ns = if solvers.ns {
        Some(ns_lower_bound(exact)?.0)
    } else {
        None
    };
    Ok(SolverRow {
        classical,
        seesaw,
        ns,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub phi: f64,
    pub w: f64,
    pub values: SolverRow,
}

/// Worker count from `NGCOST_THREADS`, defaulting to rayon's choice.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<SweepRow>, CliError> {
    spec.seesaw.validate()?;
    let grid = spec.grid()?;
    if spec.solvers.seesaw && spec.cap == CapSpec::None {
        if let Some(p) = grid.iter().find(|p| make_family_game(**p).has_infinite_costs()) {
            return Err(CliError::Usage(format!(
                "infinite costs require --cap (grid point phi={}, w={})",
                p.phi(),
                p.w()
            )));
        }
    }
    with_pool(threads, || {
        grid.par_iter()
            .map(|p| {
                let g = make_family_game(*p);
                let capped = spec.cap.apply(&g)?;
                let values = solve_all(&g, &capped, &spec.seesaw, spec.solvers)?;
                Ok(SweepRow {
                    phi: p.phi(),
                    w: p.w(),
                    values,
                })
            })
            .collect()
    })?
}

pub const SWEEP_HEADER: &str = "phi,w,classical,seesaw,ns,quantum_classical_gap";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},{},", fmt_float(r.phi), fmt_float(r.w));
        r.values.csv_fields(&mut out);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapRow {
    pub cap: f64,
    pub values: SolverRow,
}

/// Solves `cap_infinities(make_hardy_game(t_cost), M)` for every cap `M`.
pub fn run_hardy_cap_sweep(
    t_cost: f64,
    caps: &[f64],
    cfg: &SeesawConfig,
    solvers: Solvers,
    threads: Option<usize>,
) -> Result<Vec<CapRow>, CliError> {
    cfg.validate()?;
    let hardy = make_hardy_game(t_cost).map_err(|e| CliError::Usage(e.to_string()))?;
    if caps.is_empty() {
        return Err(CliError::Usage("no caps given".into()));
    }
    if let Some(bad) = caps.iter().find(|&&m| !(m > t_cost && m.is_finite())) {
        return Err(CliError::Usage(format!("cap {bad} must be finite and exceed T = {t_cost}")));
    }
    with_pool(threads, || {
        caps.par_iter()
            .map(|&cap| {
                let g = cap_infinities(&hardy, cap)?;
                let values = solve_all(&g, &g, cfg, solvers)?;
                Ok(CapRow { cap, values })
            })
            .collect()
    })?
}

pub const CAP_HEADER: &str = "T,cap,classical,seesaw,ns,quantum_classical_gap";

pub fn cap_csv(t_cost: f64, rows: &[CapRow]) -> String {
    let mut out = String::from(CAP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},{},", fmt_float(t_cost), fmt_float(r.cap));
        r.values.csv_fields(&mut out);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHSH_QUANTUM: f64 = 0.14644660940672627;

    #[test]
    fn numbers_with_pi() {
        assert_eq!(parse_number("0.5").unwrap(), 0.5);
        assert_eq!(parse_number("pi").unwrap(), std::f64::consts::PI);
        assert_eq!(parse_number("pi/2").unwrap(), std::f64::consts::FRAC_PI_2);
        assert_eq!(parse_number("pi/4").unwrap(), std::f64::consts::FRAC_PI_4);
        assert!((parse_number("3*pi/8").unwrap() - 3.0 * std::f64::consts::PI / 8.0).abs() < 1e-15);
        assert!(parse_number("tau").is_err());
        assert!(parse_number("").is_err());
    }

    #[test]
    fn grid_ranges() {
        let r: GridRange = "0,pi/2,3".parse().unwrap();
        assert_eq!(r.points(), vec![0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2]);
        let r: GridRange = "1,2,1".parse().unwrap();
        assert_eq!(r.points(), vec![1.0]);
        assert!("0,1,0".parse::<GridRange>().is_err());
        assert!("0,1".parse::<GridRange>().is_err());
    }

    #[test]
    fn cap_spec() {
        let hardy = make_hardy_game(1.0).unwrap();
        let auto = CapSpec::Auto.apply(&hardy).unwrap();
        assert_eq!(auto.max_finite_cost(), Some(2.0));
        assert!(CapSpec::Value(0.5).apply(&hardy).is_err());
        assert!(CapSpec::None.apply(&hardy).unwrap().has_infinite_costs());
        assert_eq!("auto".parse::<CapSpec>().unwrap(), CapSpec::Auto);
        assert_eq!("10".parse::<CapSpec>().unwrap(), CapSpec::Value(10.0));
    }

    #[test]
    fn solver_selection() {
        let s: Solvers = "classical,ns".parse().unwrap();
        assert!(s.classical && s.ns && !s.seesaw);
        assert!("lp".parse::<Solvers>().is_err());
    }

    #[test]
    fn sweep_contains_chsh_endpoint() {
        let spec = SweepSpec {
            phi: "0,0,1".parse().unwrap(),
            w: "0.5,1,2".parse().unwrap(),
            cap: CapSpec::None,
            seesaw: SeesawConfig::default(),
            solvers: Solvers::default(),
        };
        let rows = run_sweep(&spec, Some(2)).unwrap();
        assert_eq!(rows.len(), 2);
        let chsh = rows[1];
        assert_eq!((chsh.phi, chsh.w), (0.0, 1.0));
        assert_eq!(chsh.values.classical, Some(0.25));
        assert!((chsh.values.seesaw.unwrap() - CHSH_QUANTUM).abs() < 1e-4);
        assert!(chsh.values.ns.unwrap().abs() < 1e-9);
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with(SWEEP_HEADER));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn sweep_needs_cap_for_w_zero() {
        let spec = SweepSpec {
            phi: "pi/4,pi/4,1".parse().unwrap(),
            w: "0,0,1".parse().unwrap(),
            cap: CapSpec::None,
            seesaw: SeesawConfig::default(),
            solvers: Solvers::default(),
        };
        assert!(matches!(run_sweep(&spec, Some(1)), Err(CliError::Usage(_))));

        let capped = SweepSpec { cap: CapSpec::Auto, ..spec.clone() };
        let rows = run_sweep(&capped, Some(1)).unwrap();
        let v = rows[0].values;
        // Uncapped classical: Hardy with T = cos(π/4).
        assert!((v.classical.unwrap() - std::f64::consts::FRAC_1_SQRT_2 / 4.0).abs() < 1e-15);
        assert!(v.seesaw.unwrap() <= v.classical.unwrap() + 1e-6);
        assert!(v.ns.unwrap() <= v.seesaw.unwrap() + 1e-6);
        assert!(sweep_csv(&rows).lines().nth(1).unwrap().starts_with("0.7853981633974483,0,"));

        let classical_only = SweepSpec {
            solvers: "classical".parse().unwrap(),
            ..spec
        };
        let rows = run_sweep(&classical_only, Some(1)).unwrap();
        assert!(sweep_csv(&rows).lines().nth(1).unwrap().ends_with(",,,"));
    }

    #[test]
    fn invalid_grid_rejected() {
        let spec = SweepSpec {
            phi: "0,2,3".parse().unwrap(),
            w: "1,1,1".parse().unwrap(),
            cap: CapSpec::None,
            seesaw: SeesawConfig::default(),
            solvers: Solvers::default(),
        };
        assert!(matches!(run_sweep(&spec, None), Err(CliError::Usage(_))));
    }

    #[test]
    fn infinite_classical_rendered_as_inf() {
        let inf_row = SolverRow {
            classical: Some(f64::INFINITY),
            seesaw: Some(0.2),
            ns: Some(0.1),
        };
        let rows = [SweepRow { phi: 0.0, w: 0.0, values: inf_row }];
        assert_eq!(sweep_csv(&rows).lines().nth(1).unwrap(), "0,0,inf,0.2,0.1,inf");
    }

    #[test]
    fn cap_sweep_rows() {
        let cfg = SeesawConfig::default();
        let rows = run_hardy_cap_sweep(1.0, &[1.5, 10.0, 100.0], &cfg, Solvers::default(), Some(2)).unwrap();
        for r in &rows {
            assert_eq!(r.values.classical, Some(0.25));
            assert!(r.values.seesaw.unwrap() <= 0.2274576);
            assert!(r.values.gap().unwrap() > 0.0);
        }
        assert!(run_hardy_cap_sweep(1.0, &[1.0], &cfg, Solvers::default(), None).is_err());
        assert!(run_hardy_cap_sweep(1.0, &[], &cfg, Solvers::default(), None).is_err());
        assert!(cap_csv(1.0, &rows).starts_with(CAP_HEADER));
    }
}
