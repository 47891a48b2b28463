mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use periodic_invasion::floquet::{principal_eigenpair, ZeroPotential};
use periodic_invasion::invasion::{self, translating_eigenvalue};
use periodic_invasion::simulate::{classify_invasion, coupled_run};
use periodic_invasion::steady::{periodic_steady_state_with, SteadyOptions};
use periodic_invasion::{full_report, Error, Scenario, Species};
use rayon::prelude::*;
use serde_json::{Map, Value};

use output::{emit, num, opt_num};

#[derive(Parser)]
#[command(
    name = "invasion",
    version,
    about = "Invasion analysis for competing species on moving intervals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Principal periodic eigenvalues mu1, mu2 of the linear operators.
    Eigen {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        species: Which,
    },
    /// Periodic single-species states u1*, u2*.
    Steady {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        species: Which,
    },
    /// Every analytic invasion condition plus the linearization criterion.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Coupled simulation from (u1*, eps sin) with empirical classification.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues, verdicts and empirical class over the [sweep] grid.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV fields.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "grid-M")]
    grid_m: Option<usize>,
    #[arg(long = "grid-Nt")]
    grid_nt: Option<usize>,
    #[arg(long)]
    periods: Option<usize>,
    #[arg(long)]
    seed_amplitude: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

impl Which {
    fn species(self) -> Vec<Species> {
        match self {
            Which::One => vec![Species::One],
            Which::Two => vec![Species::Two],
            Which::Both => vec![Species::One, Species::Two],
        }
    }
}

impl Common {
    fn scenario(&self) -> Result<Scenario> {
        let base = Scenario::load(&self.config)?;
        let mut overrides = Vec::new();
        if let Some(m) = self.grid_m {
            overrides.push(("grid.M", m as f64));
        }
        if let Some(nt) = self.grid_nt {
            overrides.push(("grid.Nt", nt as f64));
        }
        if let Some(p) = self.periods {
            overrides.push(("run.periods", p as f64));
        }
        if let Some(a) = self.seed_amplitude {
            overrides.push(("run.seed_amplitude", a));
        }
        let scenario = base.with_overrides(&overrides)?;
        eprintln!("# resolved configuration");
        eprint!("{}", scenario.config().to_toml()?);
        Ok(scenario)
    }

    fn out_dir(&self) -> Result<Option<&Path>> {
        match &self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
                Ok(Some(dir.as_path()))
            }
            None => Ok(None),
        }
    }
}

fn header(command: &str) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("command".into(), command.into());
    obj
}

fn eigen(common: &Common, which: Which) -> Result<()> {
    let s = common.scenario()?;
    let out = common.out_dir()?;
    for species in which.species() {
        let d = s.model.diffusivity(species);
        let result = principal_eigenpair(d, &s.domain, s.grid, ZeroPotential)?;
        let mut obj = header("eigen");
        obj.insert("species".into(), species.index().into());
        obj.insert("diffusivity".into(), num(d));
        obj.insert("mu".into(), num(result.mu));
        obj.insert("iterations".into(), result.iterations.into());
        obj.insert("residual".into(), num(result.residual));
        let exact = s
            .domain
            .is_rigid()
            .then(|| translating_eigenvalue(d, s.domain.speed(), s.domain.length(0.0)));
        obj.insert("mu_exact".into(), opt_num(exact));
        if s.domain.speed() == 0.0 {
            let b = invasion::eigenvalue_bounds(d, &s.domain);
            obj.insert("bounds".into(), output::bounds_json(&b));
        }
        if let Some(dir) = out {
            output::write_field(dir, &format!("phi{}.csv", species.index()), &result.phi)?;
        }
        emit(obj)?;
    }
    Ok(())
}

fn steady(common: &Common, which: Which) -> Result<()> {
    let s = common.scenario()?;
    let out = common.out_dir()?;
    for species in which.species() {
        let state = periodic_steady_state_with(
            species,
            &s.model,
            &s.domain,
            s.grid,
            SteadyOptions::default(),
            None,
        )?;
        let mut obj = header("steady");
        obj.insert("species".into(), species.index().into());
        obj.insert("mu".into(), num(state.mu));
        obj.insert("rate".into(), num(s.model.rate(species)));
        obj.insert("extinct".into(), state.extinct.into());
        obj.insert("capacity".into(), num(s.model.capacity(species)));
        obj.insert("periods".into(), state.periods().into());
        obj.insert("final_delta".into(), opt_num(state.final_delta()));
        obj.insert("min".into(), num(state.field.min()));
        obj.insert("max".into(), num(state.field.max()));
        if let Some(dir) = out {
            output::write_field(dir, &format!("u{}star.csv", species.index()), &state.field)?;
        }
        emit(obj)?;
    }
    Ok(())
}

fn check(common: &Common) -> Result<()> {
    let s = common.scenario()?;
    let out = common.out_dir()?;
    let report = full_report(&s)?;
    let mut obj = header("check");
    obj.extend(output::report_json(&report, s.model.r2));
    if let Some(dir) = out {
        output::write_field(dir, "u1star.csv", &report.u1star.field)?;
        output::write_field(dir, "u2star.csv", &report.u2star.field)?;
        output::write_field(dir, "phi_hat.csv", &report.mu_hat.phi)?;
    }
    emit(obj)
}

fn simulate(common: &Common) -> Result<()> {
    let s = common.scenario()?;
    let out = common.out_dir()?;
    let options = SteadyOptions::default();
    let u1star =
        periodic_steady_state_with(Species::One, &s.model, &s.domain, s.grid, options, None)?;
    let mu_hat = invasion::mu_hat(&s.model, &s.domain, s.grid, &u1star.field)?;
    let trajectory = coupled_run(
        &s.model,
        &s.domain,
        s.grid,
        &u1star.field,
        s.seed_amplitude,
        s.periods,
    )?;
    let last = trajectory
        .records
        .last()
        .expect("at least the initial record");

    let mut obj = header("simulate");
    obj.insert("mu_hat".into(), num(mu_hat.mu));
    obj.insert(
        "predicted_log_growth_per_period".into(),
        num((s.model.r2 - mu_hat.mu) * s.grid.period()),
    );
    obj.insert("seed_amplitude".into(), num(s.seed_amplitude));
    obj.insert("periods".into(), s.periods.into());
    obj.insert("final_u2_sup".into(), num(last.u2_sup));
    obj.insert("final_u1_deviation".into(), num(last.u1_deviation));
    match classify_invasion(&trajectory, Some(s.growth_margin)) {
        Ok(c) => {
            obj.insert("classification".into(), output::classification_json(&c));
        }
        Err(e) => {
            obj.insert("classification".into(), Value::Null);
            obj.insert("classification_error".into(), e.to_string().into());
        }
    }
    if let Some(dir) = out {
        output::write_trajectory(dir, &trajectory)?;
        output::write_final_profiles(dir, &s.grid, &trajectory)?;
    }
    emit(obj)
}

fn sweep_row(scenario: &Scenario) -> Result<Map<String, Value>> {
    let report = full_report(scenario)?;
    let mut row = output::report_json(&report, scenario.model.r2);
    let empirical = coupled_run(
        &scenario.model,
        &scenario.domain,
        scenario.grid,
        &report.u1star.field,
        scenario.seed_amplitude,
        scenario.periods,
    )
    .and_then(|t| classify_invasion(&t, Some(scenario.growth_margin)));
    match empirical {
        Ok(c) => {
            row.insert("empirical".into(), output::classification_json(&c));
        }
        Err(e) => {
            row.insert("empirical".into(), Value::Null);
            row.insert("empirical_error".into(), e.to_string().into());
        }
    }
    Ok(row)
}

fn sweep(common: &Common) -> Result<bool> {
    let s = common.scenario()?;
    let points = s.sweep_points()?;
    let rows: Vec<(Map<String, Value>, bool)> = points
        .par_iter()
        .enumerate()
        .map(|(index, point)| {
            let mut obj = header("sweep");
            obj.insert("index".into(), index.into());
            let params: Map<String, Value> = point
                .parameters
                .iter()
                .map(|(k, v)| (k.clone(), num(*v)))
                .collect();
            obj.insert("parameters".into(), params.into());
            match sweep_row(&point.scenario) {
                Ok(row) => {
                    obj.extend(row);
                    (obj, true)
                }
                Err(e) => {
                    obj.extend(error_json(&e));
                    (obj, false)
                }
            }
        })
        .collect();
    let mut all_ok = true;
    for (row, ok) in rows {
        all_ok &= ok;
        emit(row)?;
    }
    Ok(all_ok)
}

fn error_json(e: &anyhow::Error) -> Map<String, Value> {
    let kind = match e.downcast_ref::<Error>() {
        Some(inner) => inner.kind(),
        None if e.downcast_ref::<std::io::Error>().is_some() => "io",
        None => "cli",
    };
    let mut obj = Map::new();
    obj.insert("error".into(), format!("{e:#}").into());
    obj.insert("kind".into(), kind.into());
    obj
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eigen { common, species } => eigen(common, *species).map(|_| true),
        Command::Steady { common, species } => steady(common, *species).map(|_| true),
        Command::Check { common } => check(common).map(|_| true),
        Command::Simulate { common } => simulate(common).map(|_| true),
        Command::Sweep { common } => sweep(common),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let _ = emit(error_json(&e));
            ExitCode::FAILURE
        }
    }
}
