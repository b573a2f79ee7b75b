// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mrfbound_cli::config::{lp_var_cap_from_env, parse_class, Check, ExperimentConfig, IntRange};
use mrfbound_cli::suite::{
    bounds_table, generate_cases, instance_files, load_cases, lp_rev_table, ocrs_hard_table, ocrs_table,
    prophet_hard_table, prophet_table, save_cases, verify_all, BoundSelection, Case, Family, Policy, Table,
    VerifyAllConfig,
};
use mrfbound_core::coretail::Setting;

#[derive(Parser)]
#[command(
    name = "mrfbound",
    version,
    about = "Exact checks of revenue, prophet and OCRS bounds on small MRF instances"
)]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random instance files.
    Gen {
        #[command(flatten)]
        source: GenArgs,
        #[arg(long, value_enum, default_value_t = FamilyArg::Revenue)]
        family: FamilyArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Revenue bounds against the LP optimum.
    Bounds {
        #[command(flatten)]
        source: SourceArgs,
        /// Comma-separated subset of `theorems,lemmas`.
        #[arg(long, default_value = "theorems,lemmas", value_delimiter = ',')]
        checks: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Optimal revenue and simple-mechanism revenues.
    LpRev {
        #[command(flatten)]
        source: SourceArgs,
        /// Directory for one TOML menu file per instance.
        #[arg(long)]
        menu_dir: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Threshold stopping rules and the hard chain.
    Prophet {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, default_value_t = PolicyArg::Levels)]
        policy: PolicyArg,
        /// Check the hard chain at each `--delta` instead of random or stored instances.
        #[arg(long)]
        hard_instance: bool,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        delta: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Contention resolution on binary MRFs and the hard path.
    Ocrs {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        hard_instance: bool,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0])]
        delta: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Every suite with the default pools, one CSV per suite in `--out`.
    VerifyAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated subset of `conditioning,theorems,lemmas,lp-rev,prophet,ocrs`.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Instances per random pool, overriding every default count.
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Item count range, e.g. `1..=3`.
    #[arg(long, default_value = "1..=3")]
    n: IntRange,
    /// Per-item support size range.
    #[arg(long, default_value = "2..=3")]
    support: IntRange,
    /// Potentials are uniform in `[-cap, cap]`.
    #[arg(long, default_value_t = 1.0)]
    potential_cap: f64,
    /// `additive`, `unit-demand` or `subadditive`.
    #[arg(long, default_value = "additive")]
    class: String,
}

#[derive(Args)]
struct SourceArgs {
    /// Instance file or directory of `.toml` files; random instances otherwise.
    #[arg(long)]
    instances: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
    /// Also store the generated instances here.
    #[arg(long)]
    save_instances: Option<PathBuf>,
}

#[derive(Args)]
struct OutArgs {
    /// CSV destination; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Revenue,
    Prophet,
    Ocrs,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Levels,
    BestSingle,
}

impl GenArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            seed: self.seed,
            count: self.count,
            n: self.n,
            support: self.support,
            potential_cap: self.potential_cap,
            class: parse_class(&self.class)?,
            lp_var_cap: lp_var_cap_from_env()?,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SourceArgs {
    fn cases(&self, family: Family) -> Result<Vec<Case>> {
        let cases = match &self.instances {
            Some(p) if p.is_dir() => load_cases(&instance_files(p)?)?,
            Some(p) => load_cases(std::slice::from_ref(p))?,
            None => {
                let cfg = self.gen.config()?;
                generate_cases(&cfg, family, &prefix(family, &cfg))
            }
        };
        if let Some(dir) = &self.save_instances {
            save_cases(&cases, dir)?;
        }
        Ok(cases)
    }
}

fn prefix(family: Family, cfg: &ExperimentConfig) -> String {
    match family {
        Family::Revenue => Setting::of(cfg.class).as_str().to_string(),
        Family::Prophet => "prophet".into(),
        Family::Ocrs => "ocrs".into(),
    }
}

fn emit(table: &Table, out: &OutArgs) -> Result<()> {
    match &out.output {
        Some(path) => table.write_csv_file(path)?,
        None => table.write_csv(std::io::stdout().lock())?,
    }
    report(table, None);
    Ok(())
}

fn report(table: &Table, label: Option<&str>) {
    for e in &table.errors {
        eprintln!("error: {e}");
    }
    for line in table.summary() {
        match label {
            Some(l) => eprintln!("[{l}] {line}"),
            None => eprintln!("{line}"),
        }
    }
}

fn parse_checks(names: &[String]) -> Result<Vec<Check>> {
    names.iter().filter(|s| !s.is_empty()).map(|s| s.parse()).collect()
}

fn write_instances(source: &GenArgs, family: FamilyArg, out: &Path) -> Result<bool> {
    let family = match family {
        FamilyArg::Revenue => Family::Revenue,
        FamilyArg::Prophet => Family::Prophet,
        FamilyArg::Ocrs => Family::Ocrs,
    };
    let cfg = source.config()?;
    let cases = generate_cases(&cfg, family, &prefix(family, &cfg));
    save_cases(&cases, out)?;
    let mut ok = true;
    for c in &cases {
        if let Err(e) = &c.instance {
            eprintln!("error: {}: {e}", c.id);
            ok = false;
        }
    }
    eprintln!(
        "wrote {} instances to {}",
        cases.len() - cases.iter().filter(|c| c.instance.is_err()).count(),
        out.display()
    );
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    let started = Instant::now();
    let pass = match cli.command {
        Command::Gen { source, family, out } => write_instances(&source, family, &out)?,
        Command::Bounds { source, checks, out } => {
            let checks = parse_checks(&checks)?;
            if let Some(c) = checks.iter().find(|c| !matches!(c, Check::Theorems | Check::Lemmas)) {
                bail!("bounds runs only `theorems` and `lemmas`, not `{}`", c.as_str());
            }
            let table = bounds_table(
                &source.cases(Family::Revenue)?,
                BoundSelection::from_checks(&checks),
                lp_var_cap_from_env()?,
            );
            emit(&table, &out)?;
            table.all_pass()
        }
        Command::LpRev { source, menu_dir, out } => {
            if let Some(dir) = &menu_dir {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let table = lp_rev_table(&source.cases(Family::Revenue)?, lp_var_cap_from_env()?, menu_dir.as_deref());
            emit(&table, &out)?;
            table.all_pass()
        }
        Command::Prophet { source, policy, hard_instance, delta, out } => {
            let policy = match policy {
                PolicyArg::Levels => Policy::Levels,
                PolicyArg::BestSingle => Policy::BestSingle,
            };
            let table = if hard_instance {
                prophet_hard_table(&delta, policy)
            } else {
                prophet_table(&source.cases(Family::Prophet)?, policy)
            };
            emit(&table, &out)?;
            table.all_pass()
        }
        Command::Ocrs { source, hard_instance, delta, out } => {
            let table = if hard_instance { ocrs_hard_table(&delta) } else { ocrs_table(&source.cases(Family::Ocrs)?) };
            emit(&table, &out)?;
            table.all_pass()
        }
        Command::VerifyAll { seed, out, checks, count } => {
            let mut cfg = VerifyAllConfig { seed, lp_var_cap: lp_var_cap_from_env()?, ..Default::default() };
            if let Some(names) = checks {
                cfg.checks = parse_checks(&names)?;
            }
            if let Some(c) = count {
                cfg.conditioning_count = c;
                cfg.revenue_count = c;
                cfg.prophet_count = c;
                cfg.ocrs_count = c;
            }
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut pass = true;
            for (name, table) in verify_all(&cfg) {
                table.write_csv_file(&out.join(name))?;
                report(&table, Some(name));
                pass &= table.all_pass();
            }
            pass
        }
    };
    eprintln!("finished in {:.2}s", started.elapsed().as_secs_f64());
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
