//! Command implementations behind the `pdsel` binary.
//!
//! ```text
//! pdsel simulate --config F [--reps R] [--seed S] --out DIR
//! pdsel grid --config F --out DIR
//! pdsel apply --data F --method NAME [--alpha A | --penalty P [--tau T] [--scale S]]
//!             [--sweep tau|alpha] [--drop-var NAME] [--track-var NAME] --out DIR
//! pdsel replicate {table1|table2|fig2|fig3-6|fig7-10|fig12} --out DIR
//! pdsel rerun --manifest DIR/manifest.json [--out DIR]
//! ```
//!
//! Every job writes its reports and a `manifest.json` holding the full
//! configuration, from which `rerun` reproduces the reports exactly.

mod apply;
mod config;
mod growth;
mod output;
mod presets;

pub use apply::{
    alpha_grid, apply, tau_grid, without_control, ApplyOptions, ApplyReport, DropRow,
    EstimateRow, SweepRow, TstatRow,
};
pub use config::{
    method_string, parse_method, parse_penalty, Command, ConfigFile, Emit, FileSection,
    RunConfig, Sweep,
};
pub use growth::{
    default_growth_path, load_growth_csv, parse_growth_csv, CONTROLS, DATA_ENV, OUTCOME,
    TREATMENT,
};
pub use output::{ensure_writable, Manifest, Writer, MANIFEST};
pub use presets::{
    figure_roster, preset, psi_d_grid, rho_grid, table1_roster, table2_roster, PRESETS,
    PRESET_SEED,
};

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::estimators::{Family, MethodSpec};
use crate::simlab::{experiment_grid, run_monte_carlo, GridCell, LongRow};

#[derive(Debug, Parser)]
#[command(name = "pdsel", version, about = "Treatment-effect estimation after control selection")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration; command-line flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub emit: Option<Emit>,
    /// `FAMILY[:TUNING]`, repeatable.
    #[arg(long = "method")]
    pub methods: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Monte Carlo on one design.
    Simulate(Common),
    /// Monte Carlo over a (rho, psi_d) grid.
    Grid(Common),
    /// Estimate on a dataset.
    Apply(ApplyArgs),
    /// Run a replication recipe.
    Replicate {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        recipe: String,
        #[arg(long)]
        out: PathBuf,
        /// Override the recipe's replication count.
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Growth data for the empirical recipes.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_enum)]
        emit: Option<Emit>,
    },
    /// Re-run a job from its manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        /// Write here instead of the original directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Target size for GETS methods given without tuning.
    #[arg(long, conflicts_with = "penalty")]
    pub alpha: Option<f64>,
    /// Penalty for Lasso methods given without tuning.
    #[arg(long, value_parser = ["bya", "bcch", "min", "1se"])]
    pub penalty: Option<String>,
    #[arg(long, requires = "penalty")]
    pub tau: Option<f64>,
    #[arg(long, requires = "penalty")]
    pub scale: Option<f64>,
    #[arg(long, value_enum)]
    pub sweep: Vec<Sweep>,
    #[arg(long)]
    pub drop_var: Option<String>,
    #[arg(long)]
    pub track_var: Option<String>,
    #[arg(long)]
    pub level: Option<f64>,
}

fn section(common: &Common, command: Command) -> Result<FileSection> {
    Ok(match &common.config {
        Some(p) => ConfigFile::load(p)?.section(command).clone(),
        None => FileSection::default(),
    })
}

fn fill_common(
    cfg: &mut RunConfig,
    common: &Common,
    file: &FileSection,
    method: impl Fn(&str) -> Result<MethodSpec>,
) -> Result<()> {
    cfg.reps = common.reps.or(file.reps).unwrap_or(cfg.reps);
    cfg.seed = common.seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.emit = common.emit.or(file.emit).unwrap_or_default();
    if let Some(out) = common.out.clone().or_else(|| file.out.clone()) {
        cfg.out_dir = out;
    } else {
        return Err(Error::Usage("--out is required".into()));
    }
    cfg.methods = if common.methods.is_empty() {
        file.methods()?
    } else {
        common
            .methods
            .iter()
            .map(|m| method(m))
            .collect::<Result<_>>()?
    };
    Ok(())
}

fn apply_method(text: &str, args: &ApplyArgs) -> Result<MethodSpec> {
    if text.contains(':') {
        return parse_method(text);
    }
    let family = Family::from_name(text)
        .ok_or_else(|| Error::Usage(format!("unknown method `{text}`")))?;
    let tuned = if family.is_lasso() {
        let token = args
            .penalty
            .as_deref()
            .ok_or_else(|| Error::Usage(format!("`{text}` needs --penalty")))?;
        let mut pen = parse_penalty(token)?;
        if let Some(t) = args.tau {
            pen = pen.with_tau(t);
        }
        if let Some(s) = args.scale {
            pen = pen.with_scale(s);
        }
        MethodSpec::from_parts(family, Some(pen), None)
    } else if family.is_gets() {
        let a = args
            .alpha
            .ok_or_else(|| Error::Usage(format!("`{text}` needs --alpha")))?;
        MethodSpec::from_parts(family, None, Some(a))
    } else {
        MethodSpec::from_parts(family, None, None)
    };
    tuned.map_err(|e| Error::Usage(e.to_string()))
}

/// Turn parsed arguments into a job.
pub fn build_config(cmd: Cmd) -> Result<RunConfig> {
    // A malformed or inconsistent job description is a usage error.
    job_config(cmd).map_err(|e| match e {
        Error::Config(m) => Error::Usage(m),
        Error::Toml(t) => Error::Usage(t.to_string()),
        other => other,
    })
}

fn job_config(cmd: Cmd) -> Result<RunConfig> {
    let cfg = match cmd {
        Cmd::Simulate(common) => {
            let file = section(&common, Command::Simulate)?;
            let mut cfg = RunConfig::new(Command::Simulate, PathBuf::new());
            fill_common(&mut cfg, &common, &file, parse_method)?;
            cfg.dgp = Some(file.dgp());
            cfg
        }
        Cmd::Grid(common) => {
            let file = section(&common, Command::Grid)?;
            let mut cfg = RunConfig::new(Command::Grid, PathBuf::new());
            cfg.reps = presets::GRID_REPS;
            fill_common(&mut cfg, &common, &file, parse_method)?;
            cfg.dgp = Some(file.dgp());
            cfg.rho_grid = file.rho_grid.clone().unwrap_or_else(rho_grid);
            cfg.psi_d_grid = file.psi_d_grid.clone().unwrap_or_else(|| vec![4.0]);
            cfg
        }
        Cmd::Apply(args) => {
            let file = section(&args.common, Command::Apply)?;
            let mut cfg = RunConfig::new(Command::Apply, PathBuf::new());
            fill_common(&mut cfg, &args.common, &file, |m| apply_method(m, &args))?;
            cfg.data_path = args
                .data
                .clone()
                .or_else(|| file.data.clone())
                .or_else(default_growth_path);
            cfg.sweeps = args.sweep.clone();
            cfg.drop_var = args.drop_var.clone();
            cfg.track_var = args.track_var.clone();
            cfg.level = args.level.or(file.level).unwrap_or(cfg.level);
            cfg
        }
        Cmd::Replicate {
            recipe,
            out,
            reps,
            seed,
            data,
            emit,
        } => {
            let mut cfg = preset(&recipe, out, data)?;
            if let Some(r) = reps {
                cfg.reps = r;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.emit = emit.unwrap_or_default();
            cfg
        }
        Cmd::Rerun { manifest, out } => {
            let mut cfg = Manifest::load(&manifest)?.config;
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            cfg
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// What a finished job reports back.
#[derive(Clone, Debug)]
pub struct JobOutcome {
    pub manifest: Manifest,
}

enum Kind {
    Simulate,
    Grid,
    Apply,
}

fn kind(cfg: &RunConfig) -> Kind {
    match cfg.command {
        Command::Simulate => Kind::Simulate,
        Command::Grid => Kind::Grid,
        Command::Apply => Kind::Apply,
        Command::Replicate if cfg.data_path.is_some() => Kind::Apply,
        Command::Replicate if !cfg.rho_grid.is_empty() => Kind::Grid,
        Command::Replicate => Kind::Simulate,
    }
}

fn write_cells(w: &mut Writer, cfg: &RunConfig, stem: &str, cells: &[GridCell]) -> Result<()> {
    if cfg.emit.csv() {
        let mut buf = Vec::new();
        crate::simlab::write_long_csv(&mut buf, &LongRow::from_cells(cells))?;
        w.bytes(&format!("{stem}.csv"), &buf)?;
    }
    if cfg.emit.json() {
        w.json(&format!("{stem}.json"), &cells)?;
    }
    Ok(())
}

fn incidence_csv(report: &ApplyReport) -> Vec<u8> {
    let mut s = String::from("variable");
    for m in &report.incidence_methods {
        s.push(',');
        s.push_str(&csv_field(m));
    }
    s.push('\n');
    for (name, flags) in &report.incidence {
        s.push_str(&csv_field(name));
        for &f in flags {
            s.push_str(if f { ",1" } else { ",0" });
        }
        s.push('\n');
    }
    s.into_bytes()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Run a validated job, writing every report plus the manifest.
pub fn execute(cfg: &RunConfig) -> Result<JobOutcome> {
    let start = Instant::now();
    let mut w = Writer::new(&cfg.out_dir)?;
    let failures = match kind(cfg) {
        Kind::Simulate => {
            let dgp = cfg.dgp.as_ref().expect("validated");
            let report = run_monte_carlo(dgp, &cfg.methods, cfg.reps, cfg.seed)?;
            let failures = report.failures();
            let cells = [GridCell {
                rho: dgp.rho,
                psi_d: dgp.psi_d,
                report,
            }];
            let stem = cfg.preset.as_deref().unwrap_or("simulate");
            write_cells(&mut w, cfg, stem, &cells)?;
            failures
        }
        Kind::Grid => {
            let dgp = cfg.dgp.as_ref().expect("validated");
            let cells = experiment_grid(
                dgp,
                &cfg.rho_grid,
                &cfg.psi_d_grid,
                &cfg.methods,
                cfg.reps,
                cfg.seed,
            )?;
            let failures = cells.iter().map(|c| c.report.failures()).sum();
            let stem = cfg.preset.as_deref().unwrap_or("grid");
            write_cells(&mut w, cfg, stem, &cells)?;
            failures
        }
        Kind::Apply => {
            let path = cfg.data_path.as_ref().expect("validated");
            let data = load_growth_csv(path)?;
            let opts = ApplyOptions {
                seed: cfg.seed,
                level: cfg.level,
                drop_var: cfg.drop_var.as_deref(),
                track_var: cfg.track_var.as_deref(),
                sweep_tau: cfg.sweeps.contains(&Sweep::Tau),
                sweep_alpha: cfg.sweeps.contains(&Sweep::Alpha),
            };
            let report = apply(&data, &cfg.methods, &opts)?;
            if cfg.emit.csv() {
                if !report.estimates.is_empty() {
                    w.csv("estimates.csv", &report.estimates)?;
                    w.bytes("selection.csv", &incidence_csv(&report))?;
                }
                if !report.tstats.is_empty() {
                    w.csv("tstats.csv", &report.tstats)?;
                }
                if !report.dropped.is_empty() {
                    w.csv("drop.csv", &report.dropped)?;
                }
                if !report.sweep.is_empty() {
                    w.csv("sweep.csv", &report.sweep)?;
                }
            }
            if cfg.emit.json() {
                w.json("apply.json", &report)?;
            }
            report.failures.len()
        }
    };
    let mut manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        seed: cfg.seed,
        threads: rayon::current_num_threads(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        failures,
        files: w.files().to_vec(),
    };
    manifest.files.push(MANIFEST.to_string());
    w.json(MANIFEST, &manifest)?;
    Ok(JobOutcome { manifest })
}

/// Exit status: 0 on a clean run, 1 on an error, 2 on a usage error and
/// 3 when the reports were written but some evaluations failed.
pub fn run(cli: Cli) -> i32 {
    let job = || -> Result<JobOutcome> {
        let cfg = build_config(cli.command)?;
        execute(&cfg)
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(job),
            Err(e) => Err(Error::Config(format!("cannot start {t} threads: {e}"))),
        },
        None => job(),
    };
    match result {
        Ok(out) if out.manifest.failures == 0 => 0,
        Ok(out) => {
            eprintln!("pdsel: {} evaluation(s) failed", out.manifest.failures);
            3
        }
        Err(e @ Error::Usage(_)) => {
            eprintln!("pdsel: {e}");
            2
        }
        Err(e) => {
            eprintln!("pdsel: {e}");
            1
        }
    }
}
