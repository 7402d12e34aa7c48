//! Command-line front end.
//!
//! Every numeric option may come from a flag or from a flat `key=value`
//! config file using the flag names without dashes; flags win. Each command
//! writes its artifacts into `--out` and prints one summary line.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::critical::{self, find_critical, sweep_gap, CriticalResult, GcRow};
use crate::dynamics::{
    imbalance_trace, limiting_profile, limiting_profile_from, smoothed_imbalance_trace,
    TimeGrid,
};
use crate::error::{Error, Result};
use crate::fock::{SiteIndex, DEFAULT_MAX_BOSONS};
use crate::fourlevel::{
    checked_spectrum, four_level_gc, four_level_imbalance, four_level_limiting, four_level_params,
};
use crate::model::ModelParams;
use crate::output::{self, Cell, Format, Table};
use crate::spectral::decompose;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cavity-qst",
    version,
    about = "Exact dynamics of an anharmonic vibrational dimer in a single-mode cavity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Evolve,
    Limiting,
    LatticeMap,
    Critical,
    SweepA,
    TableNb,
    Fourlevel,
    Compare,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels over a coupling grid (spectrum and gap tables)
    Spectrum(Opts),
    /// Exact and two-level population traces
    Evolve(Opts),
    /// Limiting probabilities at one coupling, or over a coupling grid
    Limiting(Opts),
    /// Limiting probability of every lattice site
    LatticeMap(Opts),
    /// Locate the critical coupling
    Critical(Opts),
    /// Critical coupling over an anharmonicity grid
    SweepA(Opts),
    /// Critical coupling for N_B = 1..=nb
    TableNb(Opts),
    /// Four-level model population traces
    Fourlevel(Opts),
    /// Exact limiting probabilities and gap against the four-level model
    Compare(Opts),
}

impl Command {
    fn split(&self) -> (CommandKind, &Opts) {
        match self {
            Command::Spectrum(o) => (CommandKind::Spectrum, o),
            Command::Evolve(o) => (CommandKind::Evolve, o),
            Command::Limiting(o) => (CommandKind::Limiting, o),
            Command::LatticeMap(o) => (CommandKind::LatticeMap, o),
            Command::Critical(o) => (CommandKind::Critical, o),
            Command::SweepA(o) => (CommandKind::SweepA, o),
            Command::TableNb(o) => (CommandKind::TableNb, o),
            Command::Fourlevel(o) => (CommandKind::Fourlevel, o),
            Command::Compare(o) => (CommandKind::Compare, o),
        }
    }
}

/// Raw options; values are validated after merging with the config file.
#[derive(Debug, Default, Args)]
pub struct Opts {
    /// Total boson number N_B
    #[arg(long, allow_hyphen_values = true)]
    pub nb: Option<String>,
    /// Anharmonicity A
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Dipole hopping J
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    /// Light-matter coupling G, or `gc` for the critical coupling
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Vibrational frequency
    #[arg(long, allow_hyphen_values = true)]
    pub omega0: Option<String>,
    /// Cavity frequency (defaults to omega0)
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gmin: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gmax: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gsteps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub amin: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub amax: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub asteps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<String>,
    /// Number of time steps (default step min(0.05, 0.1 pi / spectral range))
    #[arg(long, allow_hyphen_values = true)]
    pub tsteps: Option<String>,
    /// Initial site `v,p` (default N_B,0)
    #[arg(long)]
    pub initial: Option<String>,
    /// Degeneracy tolerance for limiting probabilities
    #[arg(long = "eps-deg", allow_hyphen_values = true)]
    pub eps_deg: Option<String>,
    /// Worker threads (default: logical cores)
    #[arg(long, allow_hyphen_values = true)]
    pub threads: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// Flat key=value file with defaults for the options above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: [&str; 19] = [
    "nb", "a", "j", "g", "omega0", "omega", "gmin", "gmax", "gsteps", "amin", "amax", "asteps",
    "tmax", "tsteps", "initial", "eps-deg", "threads", "out", "format",
];

impl Opts {
    fn flag(&self, key: &str) -> Option<&String> {
        match key {
            "nb" => self.nb.as_ref(),
            "a" => self.a.as_ref(),
            "j" => self.j.as_ref(),
            "g" => self.g.as_ref(),
            "omega0" => self.omega0.as_ref(),
            "omega" => self.omega.as_ref(),
            "gmin" => self.gmin.as_ref(),
            "gmax" => self.gmax.as_ref(),
            "gsteps" => self.gsteps.as_ref(),
            "amin" => self.amin.as_ref(),
            "amax" => self.amax.as_ref(),
            "asteps" => self.asteps.as_ref(),
            "tmax" => self.tmax.as_ref(),
            "tsteps" => self.tsteps.as_ref(),
            "initial" => self.initial.as_ref(),
            "eps-deg" => self.eps_deg.as_ref(),
            "threads" => self.threads.as_ref(),
            "out" => self.out.as_ref(),
            "format" => self.format.as_ref(),
            _ => None,
        }
    }
}

/// Parses a flat `key=value` file. Blank lines and `#` comments are skipped;
/// `eps_deg` is accepted for `eps-deg`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config("--config", format!("line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::config("--config", format!("line {}: unknown key `{key}`", lineno + 1)));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

/// Coupling given as a number or as the critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingSpec {
    Value(f64),
    Critical,
}

/// Evenly spaced grid `min + i (max - min) / steps`, `i = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl LinearGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 0 {
            return vec![self.min];
        }
        (0..=self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / self.steps as f64)
            .collect()
    }
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    /// Model parameters; the coupling is a placeholder when `coupling` is critical.
    pub params: ModelParams,
    pub coupling: CouplingSpec,
    /// Present when any of `--gmin/--gmax/--gsteps` was given.
    pub g_grid: Option<LinearGrid>,
    pub a_grid: LinearGrid,
    pub tmax: f64,
    pub tsteps: Option<usize>,
    pub initial: SiteIndex,
    pub eps_deg: Option<f64>,
    pub threads: Option<usize>,
    pub out: PathBuf,
    pub format: Format,
}

struct Source<'a> {
    opts: &'a Opts,
    file: BTreeMap<String, String>,
}

impl Source<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.opts
            .flag(key)
            .map(String::as_str)
            .or_else(|| self.file.get(key).map(String::as_str))
    }

    fn has(&self, key: &str) -> bool {
        self.raw(key).is_some()
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| Error::config(format!("--{key}"), format!("`{s}`: {e}")))
            })
            .transpose()
    }

    fn real(&self, key: &str, default: f64) -> Result<f64> {
        let x = self.parse::<f64>(key)?.unwrap_or(default);
        if !x.is_finite() {
            return Err(Error::config(format!("--{key}"), "must be finite"));
        }
        Ok(x)
    }
}

fn ensure(cond: bool, key: &str, reason: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::config(format!("--{key}"), reason))
    }
}

impl RunConfig {
    /// Merges flags with the optional config file and validates every value.
    pub fn from_opts(command: CommandKind, opts: &Opts) -> Result<Self> {
        let file = match &opts.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::config("--config", format!("{}: {e}", path.display()))
                })?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let src = Source { opts, file };

        let nb = src.parse::<usize>("nb")?.unwrap_or(3);
        ensure(
            (1..=DEFAULT_MAX_BOSONS).contains(&nb),
            "nb",
            format!("N_B = {nb} must lie in 1..={DEFAULT_MAX_BOSONS}"),
        )?;
        let a = src.real("a", 4.0)?;
        ensure(a >= 0.0, "a", format!("A = {a} must be >= 0"))?;
        let j = src.real("j", 1.0)?;
        let omega0 = src.real("omega0", 0.0)?;
        let omega = src.real("omega", omega0)?;
        let coupling = match src.raw("g") {
            Some(s) if s.eq_ignore_ascii_case("gc") => CouplingSpec::Critical,
            _ => {
                let g = src.real("g", 0.0)?;
                ensure(g >= 0.0, "g", format!("G = {g} must be >= 0"))?;
                CouplingSpec::Value(g)
            }
        };
        let params = ModelParams {
            n_bosons: nb,
            omega0,
            omega,
            anharm: a,
            hop: j,
            coupling: match coupling {
                CouplingSpec::Value(g) => g,
                CouplingSpec::Critical => 0.0,
            },
        };

        let g_grid = if ["gmin", "gmax", "gsteps"].iter().any(|k| src.has(k)) {
            let min = src.real("gmin", 0.0)?;
            let max = src.real("gmax", 3.0 * critical::empirical_gc(nb, a, j))?;
            let steps = src.parse::<usize>("gsteps")?.unwrap_or(200);
            ensure(min >= 0.0, "gmin", "must be >= 0")?;
            ensure(max > min, "gmax", format!("must exceed gmin = {min}"))?;
            ensure(steps >= 1, "gsteps", "must be at least 1")?;
            Some(LinearGrid { min, max, steps })
        } else {
            None
        };
        let a_grid = LinearGrid {
            min: src.real("amin", 1.0)?,
            max: src.real("amax", 8.0)?,
            steps: src.parse::<usize>("asteps")?.unwrap_or(7),
        };
        ensure(a_grid.min >= 0.0, "amin", "must be >= 0")?;
        ensure(a_grid.max >= a_grid.min, "amax", "must be >= amin")?;

        let tmax = src.real("tmax", 250.0)?;
        ensure(tmax > 0.0, "tmax", "must be positive")?;
        let tsteps = src.parse::<usize>("tsteps")?;
        ensure(tsteps != Some(0), "tsteps", "must be at least 1")?;

        let initial = match src.raw("initial") {
            Some(s) => parse_site(s, nb)?,
            None => SiteIndex::new(nb, 0),
        };
        let eps_deg = src.parse::<f64>("eps-deg")?;
        if let Some(e) = eps_deg {
            ensure(e > 0.0 && e.is_finite(), "eps-deg", "must be positive")?;
        }
        let threads = src.parse::<usize>("threads")?;
        ensure(threads != Some(0), "threads", "must be at least 1")?;
        let out = PathBuf::from(src.raw("out").unwrap_or("."));
        let format = src.parse::<Format>("format")?.unwrap_or_default();

        Ok(Self {
            command,
            params,
            coupling,
            g_grid,
            a_grid,
            tmax,
            tsteps,
            initial,
            eps_deg,
            threads,
            out,
            format,
        })
    }

    /// Path of the artifact `stem` in the output directory.
    pub fn artifact(&self, stem: &str) -> PathBuf {
        self.out.join(format!("{stem}.{}", self.format.extension()))
    }

    fn emit(&self, stem: &str, table: &Table) -> Result<PathBuf> {
        output::emit_table(table, &self.artifact(stem), self.format)
    }

    fn g_points(&self) -> Vec<f64> {
        self.g_grid
            .unwrap_or(LinearGrid {
                min: 0.0,
                max: 3.0 * critical::empirical_gc(self.params.n_bosons, self.params.anharm, self.params.hop),
                steps: 200,
            })
            .points()
    }

    /// Model parameters with the coupling resolved.
    fn resolved(&self) -> Result<(ModelParams, Option<CriticalResult>)> {
        match self.coupling {
            CouplingSpec::Value(_) => Ok((self.params, None)),
            CouplingSpec::Critical => {
                let r = find_critical(&self.params, None)?;
                Ok((self.params.with_coupling(r.g_c), Some(r)))
            }
        }
    }

    fn time_grid(&self, params: &ModelParams) -> Result<TimeGrid> {
        match self.tsteps {
            Some(n) => TimeGrid::new(self.tmax, n),
            None => TimeGrid::default_for(&decompose(params)?, self.tmax),
        }
    }
}

fn parse_site(s: &str, nb: usize) -> Result<SiteIndex> {
    let bad = |reason: String| Error::config("--initial", reason);
    let (v, p) = s
        .split_once(',')
        .ok_or_else(|| bad(format!("`{s}`: expected v,p")))?;
    let v: usize = v.trim().parse().map_err(|e| bad(format!("`{s}`: {e}")))?;
    let p: usize = p.trim().parse().map_err(|e| bad(format!("`{s}`: {e}")))?;
    if p > v || v > nb {
        return Err(bad(format!("site ({v},{p}) is outside the lattice for N_B = {nb}")));
    }
    Ok(SiteIndex::new(v, p))
}

/// Executes a validated configuration and returns the summary line.
pub fn run(cfg: &RunConfig) -> Result<String> {
    std::fs::create_dir_all(&cfg.out).map_err(|source| Error::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::config("--threads", e.to_string()))?;
    pool.install(|| dispatch(cfg))
}

fn dispatch(cfg: &RunConfig) -> Result<String> {
    match cfg.command {
        CommandKind::Spectrum => cmd_spectrum(cfg),
        CommandKind::Evolve => cmd_evolve(cfg),
        CommandKind::Limiting => cmd_limiting(cfg),
        CommandKind::LatticeMap => cmd_lattice_map(cfg),
        CommandKind::Critical => cmd_critical(cfg),
        CommandKind::SweepA => cmd_sweep_a(cfg),
        CommandKind::TableNb => cmd_table_nb(cfg),
        CommandKind::Fourlevel => cmd_fourlevel(cfg),
        CommandKind::Compare => cmd_compare(cfg),
    }
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<String> {
    let rows = sweep_gap(&cfg.params, &cfg.g_points(), true)?;
    cfg.emit("spectrum", &output::spectrum_table(&rows)?)?;
    cfg.emit("gap", &output::gap_table(&rows))?;
    let min = rows
        .iter()
        .min_by(|a, b| a.gap.total_cmp(&b.gap))
        .expect("nonempty grid");
    Ok(format!(
        "{} couplings, smallest gap dE = {:e} at G = {}",
        rows.len(),
        min.gap,
        min.g
    ))
}

fn cmd_evolve(cfg: &RunConfig) -> Result<String> {
    let (params, _) = cfg.resolved()?;
    let grid = cfg.time_grid(&params)?;
    let exact = imbalance_trace(&params, cfg.initial, &grid)?;
    let smooth = smoothed_imbalance_trace(&params, cfg.initial, &grid)?;
    cfg.emit("evolve", &output::timeseries_table(&exact))?;
    cfg.emit("evolve_smoothed", &output::timeseries_table(&smooth))?;
    let dp = exact.imbalance();
    let mean = dp.iter().sum::<f64>() / dp.len() as f64;
    let min = dp.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(format!(
        "G = {}: {} samples, mean dP = {mean:.6}, min dP = {min:.6}",
        params.coupling,
        dp.len()
    ))
}

fn cmd_limiting(cfg: &RunConfig) -> Result<String> {
    if let Some(grid) = cfg.g_grid {
        let points = grid.points();
        let rows: Vec<Result<Vec<Cell>>> = {
            use rayon::prelude::*;
            points
                .par_iter()
                .map(|&g| {
                    let p = limiting_profile(&cfg.params.with_coupling(g), cfg.initial, cfg.eps_deg)?;
                    Ok(vec![g.into(), p.pi_s.into(), p.pi_t.into(), p.pi_2.into(), p.pi_0.into()])
                })
                .collect()
        };
        let mut table = Table::new(["G", "S", "T", "E2", "E0"]);
        for r in rows {
            table.push(r?);
        }
        cfg.emit("limiting_sweep", &table)?;
        return Ok(format!("limiting probabilities at {} couplings", points.len()));
    }
    let (params, _) = cfg.resolved()?;
    let prof = limiting_profile(&params, cfg.initial, cfg.eps_deg)?;
    cfg.emit("limiting", &output::profile_table(&prof))?;
    cfg.emit("classes", &output::classes_table(&prof))?;
    Ok(format!(
        "G = {}: pi_S = {:.6}, pi_T = {:.6e}, pi_2 = {:.6}, pi_0 = {:.6}",
        params.coupling, prof.pi_s, prof.pi_t, prof.pi_2, prof.pi_0
    ))
}

fn cmd_lattice_map(cfg: &RunConfig) -> Result<String> {
    let (params, _) = cfg.resolved()?;
    let prof = limiting_profile(&params, cfg.initial, cfg.eps_deg)?;
    output::emit_lattice_map(&prof, &cfg.artifact("lattice_map"), cfg.format)?;
    // first site wins ties
    let (k, best) = prof
        .values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let site = params.lattice().site(k)?;
    Ok(format!("G = {}: largest limiting probability {best:.6} at {site}", params.coupling))
}

fn critical_row(r: &CriticalResult, params: &ModelParams) -> Vec<Cell> {
    vec![
        params.n_bosons.into(),
        params.anharm.into(),
        params.hop.into(),
        r.g_c.into(),
        r.gap_at_gc.into(),
        r.kind.label().into(),
        r.bracket.0.into(),
        r.bracket.1.into(),
        r.iterations.into(),
        critical::empirical_gc(params.n_bosons, params.anharm, params.hop).into(),
    ]
}

const CRITICAL_COLUMNS: [&str; 10] = [
    "N_B", "A", "J", "G_c", "gap", "kind", "G_lo", "G_hi", "iterations", "empirical",
];

fn cmd_critical(cfg: &RunConfig) -> Result<String> {
    let bracket = cfg.g_grid.map(|g| (g.min, g.max));
    let r = find_critical(&cfg.params, bracket)?;
    let mut table = Table::new(CRITICAL_COLUMNS);
    table.push(critical_row(&r, &cfg.params));
    cfg.emit("critical", &table)?;
    Ok(format!(
        "G_c = {:.5} ({:.10}, {}, gap {:e})",
        r.g_c,
        r.g_c,
        r.kind.label(),
        r.gap_at_gc
    ))
}

fn gc_table(rows: &[GcRow]) -> Table {
    let mut table = Table::new(["N_B", "A", "J", "G_c", "gap", "kind", "empirical", "rel_dev", "status"]);
    for row in rows {
        let head: Vec<Cell> = vec![row.n_bosons.into(), row.anharm.into(), row.hop.into()];
        let tail: Vec<Cell> = match &row.result {
            Ok(r) => vec![
                r.g_c.into(),
                r.gap_at_gc.into(),
                r.kind.label().into(),
                row.empirical.into(),
                ((row.empirical - r.g_c) / r.g_c).into(),
                "ok".into(),
            ],
            Err(e) => vec![
                f64::NAN.into(),
                f64::NAN.into(),
                "".into(),
                row.empirical.into(),
                f64::NAN.into(),
                e.to_string().into(),
            ],
        };
        table.push(head.into_iter().chain(tail).collect());
    }
    table
}

fn failures(rows: &[GcRow]) -> usize {
    rows.iter().filter(|r| r.result.is_err()).count()
}

fn cmd_sweep_a(cfg: &RunConfig) -> Result<String> {
    let rows = critical::sweep_gc_vs_a(&cfg.params, &cfg.a_grid.points());
    cfg.emit("sweep_a", &gc_table(&rows))?;
    Ok(format!("{} anharmonicities, {} failed", rows.len(), failures(&rows)))
}

fn cmd_table_nb(cfg: &RunConfig) -> Result<String> {
    let rows = critical::table_gc_vs_nb(&cfg.params, 1..=cfg.params.n_bosons);
    cfg.emit("table_nb", &gc_table(&rows))?;
    Ok(format!("N_B = 1..={}, {} failed", cfg.params.n_bosons, failures(&rows)))
}

fn cmd_fourlevel(cfg: &RunConfig) -> Result<String> {
    let p = &cfg.params;
    let g = match cfg.coupling {
        CouplingSpec::Value(g) => g,
        CouplingSpec::Critical => four_level_gc(p.n_bosons, p.anharm, p.hop)?
            .ok_or_else(|| Error::domain("the four-level model has no critical coupling here"))?,
    };
    let fp = four_level_params(p.n_bosons, p.anharm, p.hop, g)?;
    let spec = checked_spectrum(&fp)?;
    let grid = match cfg.tsteps {
        Some(n) => TimeGrid::new(cfg.tmax, n)?,
        None => {
            let range = spec.sorted()[3] - spec.sorted()[0];
            TimeGrid::with_step(cfg.tmax, TimeGrid::default_step(range))?
        }
    };
    let ts = four_level_imbalance(&fp, &grid);
    cfg.emit("fourlevel", &output::timeseries_table(&ts))?;
    Ok(format!(
        "G = {g}: J_g = {}, J_e = {}, Delta = {}, lowest gap {:e}",
        fp.j_g,
        fp.j_e,
        fp.delta,
        spec.gap()
    ))
}

fn cmd_compare(cfg: &RunConfig) -> Result<String> {
    let p = cfg.params;
    let points = match cfg.coupling {
        CouplingSpec::Critical if cfg.g_grid.is_none() => vec![find_critical(&p, None)?.g_c],
        CouplingSpec::Value(g) if cfg.g_grid.is_none() && g > 0.0 => vec![g],
        _ => cfg.g_points(),
    };
    let rows: Vec<Result<Vec<Cell>>> = {
        use rayon::prelude::*;
        points
            .par_iter()
            .map(|&g| {
                let exact_params = p.with_coupling(g);
                let d = decompose(&exact_params)?;
                let prof = limiting_profile_from(&exact_params, &d, cfg.initial, cfg.eps_deg)?;
                let fp = four_level_params(p.n_bosons, p.anharm, p.hop, g)?;
                let spec = checked_spectrum(&fp)?;
                let eps = cfg.eps_deg.unwrap_or_else(|| d.default_eps_deg());
                let degenerate = (spec.w_s_minus - spec.w_a_minus).abs() <= eps;
                let (ms, mt) = four_level_limiting(&fp, degenerate, eps)?;
                Ok(vec![
                    g.into(),
                    prof.pi_s.into(),
                    prof.pi_t.into(),
                    ms.into(),
                    mt.into(),
                    d.gap()?.into(),
                    spec.gap().into(),
                ])
            })
            .collect()
    };
    let mut table = Table::new(["G", "S_exact", "T_exact", "S_model", "T_model", "dE_exact", "dE_model"]);
    for r in rows {
        table.push(r?);
    }
    cfg.emit("compare", &table)?;
    Ok(format!("exact vs four-level model at {} couplings", points.len()))
}

/// Parses `args`, runs the command and reports; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (kind, opts) = cli.command.split();
    let result = RunConfig::from_opts(kind, opts).and_then(|cfg| run(&cfg));
    match result {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_COMPUTE
            }
        }
    }
}
