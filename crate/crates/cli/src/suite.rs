// SPDX-License-Identifier: Apache-2.0

//! Check runners producing fixed-schema CSV tables.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mrfbound_core::coretail::{check_lemmas, check_theorems, Benchmarks, Setting};
use mrfbound_core::format::Instance;
use mrfbound_core::mechanisms::optimal_rev_with_cap;
use mrfbound_core::mrf::{check_conditioning_bounds, max_weighted_degree, ConditioningOptions};
use mrfbound_core::ocrs::{
    check_adaptive_scheme, hard_ocrs_instance, hard_ocrs_params, max_alpha, search_schemes, verify_ocrs_separation,
    OcrsInstance,
};
use mrfbound_core::prophet::{
    evaluate_policy, evaluate_threshold, expected_max, hard_instance, level_policy, optimal_online, verify_lower_bound,
    ProphetInstance,
};
use mrfbound_core::report::{BoundReport, Relation};
use mrfbound_core::valuation::{ValuationDistribution, ValuationKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Check, ExperimentConfig, IntRange};
use crate::generate::{generate_instance, generate_ocrs_instance, generate_prophet_instance};

pub const CONDITIONING_HEADER: &[&str] = &[
    "instance_id",
    "delta_computed",
    "lower",
    "upper",
    "min_ratio",
    "max_ratio",
    "pairs_checked",
    "exhaustive",
    "pass",
];
pub const BOUNDS_HEADER: &[&str] =
    &["instance_id", "setting", "delta_nominal", "delta_computed", "bound_name", "lhs", "rhs", "slack", "pass"];
pub const LP_REV_HEADER: &[&str] = &["instance_id", "rev_opt", "srev", "brev", "srev_prime", "lp_iterations"];
pub const PROPHET_HEADER: &[&str] =
    &["instance_id", "delta_nominal", "delta_computed", "e_max", "alg_value", "opt_online", "ratio", "bound", "pass"];
pub const OCRS_HEADER: &[&str] = &[
    "instance_id",
    "delta_nominal",
    "delta_computed",
    "alpha_scheme",
    "selectability",
    "max_alpha_hard",
    "bound_4e_minus_delta",
    "pass",
];

/// Outcome of one named check on one instance, for the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub check: String,
    pub pass: bool,
    /// `rhs - lhs` for inequalities, `-|lhs - rhs|` for identities.
    pub slack: f64,
}

impl Outcome {
    fn error() -> Self {
        Self { check: "error".into(), pass: false, slack: f64::NAN }
    }

    fn of(r: &BoundReport) -> Self {
        let slack = match r.relation {
            Relation::Le => r.slack,
            Relation::Eq { .. } => -(r.lhs - r.rhs).abs(),
        };
        Self { check: r.name.clone(), pass: r.pass, slack }
    }
}

/// Rows of one CSV file plus per-check outcomes and error messages.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
    pub outcomes: Vec<Outcome>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryLine {
    pub check: String,
    pub passed: usize,
    pub total: usize,
    pub worst_slack: f64,
}

impl fmt::Display for SummaryLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}/{} pass, worst slack {}", self.check, self.passed, self.total, self.worst_slack)
    }
}

/// Result for one instance: its rows, outcomes and any error message.
type Part = (Vec<Vec<String>>, Vec<Outcome>, Option<String>);

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self { header, rows: Vec::new(), outcomes: Vec::new(), errors: Vec::new() }
    }

    fn push_part(&mut self, (rows, outcomes, error): Part) {
        self.rows.extend(rows);
        self.outcomes.extend(outcomes);
        self.errors.extend(error);
    }

    fn from_parts(header: &'static [&'static str], parts: Vec<Part>) -> Self {
        let mut t = Self::new(header);
        for p in parts {
            t.push_part(p);
        }
        t
    }

    pub fn extend(&mut self, other: Table) {
        debug_assert_eq!(self.header, other.header);
        self.rows.extend(other.rows);
        self.outcomes.extend(other.outcomes);
        self.errors.extend(other.errors);
    }

    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }

    /// One line per check name, in order of first appearance.
    pub fn summary(&self) -> Vec<SummaryLine> {
        let mut order: Vec<String> = Vec::new();
        let mut acc: BTreeMap<String, SummaryLine> = BTreeMap::new();
        for o in &self.outcomes {
            let line = acc.entry(o.check.clone()).or_insert_with(|| {
                order.push(o.check.clone());
                SummaryLine { check: o.check.clone(), passed: 0, total: 0, worst_slack: f64::INFINITY }
            });
            line.total += 1;
            line.passed += o.pass as usize;
            if o.slack < line.worst_slack || o.slack.is_nan() {
                line.worst_slack = o.slack;
            }
        }
        order.into_iter().map(|k| acc.remove(&k).unwrap()).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.header)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

fn error_row(header: &[&str], id: &str, marker: Option<(usize, &str)>) -> Vec<String> {
    let mut row = vec![String::new(); header.len()];
    row[0] = id.to_string();
    if let Some((col, text)) = marker {
        row[col] = text.to_string();
    }
    if header.last() == Some(&"pass") {
        *row.last_mut().unwrap() = "false".into();
    }
    row
}

fn failed(header: &[&str], id: &str, marker: Option<(usize, &str)>, err: impl fmt::Display) -> Part {
    (vec![error_row(header, id, marker)], vec![Outcome::error()], Some(format!("{id}: {err}")))
}

/// An instance to check, or the reason it could not be produced.
#[derive(Debug, Clone)]
pub struct Case {
    pub id: String,
    pub instance: std::result::Result<Instance, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// MRF plus a valuation of the configured class.
    Revenue,
    /// MRF plus additive singleton values and an arrival order.
    Prophet,
    /// Binary MRF with total activity at most one and an arrival order.
    Ocrs,
}

pub fn generate_cases(cfg: &ExperimentConfig, family: Family, prefix: &str) -> Vec<Case> {
    (0..cfg.count)
        .into_par_iter()
        .map(|index| {
            let id = format!("{prefix}-{index:04}");
            let seed = cfg.instance_seed(index);
            let made = match family {
                Family::Revenue => generate_instance(cfg, seed),
                Family::Prophet => generate_prophet_instance(cfg, seed),
                Family::Ocrs => generate_ocrs_instance(cfg, seed),
            };
            let instance = made.map(|mut i| {
                i.id = Some(id.clone());
                i
            });
            Case { id, instance: instance.map_err(|e| e.to_string()) }
        })
        .collect()
}

/// Instance files in `dir` with extension `toml`, sorted by file name.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "toml"));
    files.sort();
    Ok(files)
}

/// Loads instance files; the id is the stored one or else the file stem.
pub fn load_cases(paths: &[PathBuf]) -> Result<Vec<Case>> {
    paths
        .iter()
        .map(|p| {
            let inst = Instance::read(p).with_context(|| format!("loading {}", p.display()))?;
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(Case { id: inst.id.clone().unwrap_or(stem), instance: Ok(inst) })
        })
        .collect()
}

pub fn save_cases(cases: &[Case], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for c in cases {
        if let Ok(inst) = &c.instance {
            inst.write(&dir.join(format!("{}.toml", c.id)))?;
        }
    }
    Ok(())
}

fn run_cases(
    header: &'static [&'static str],
    marker: Option<(usize, &str)>,
    cases: &[Case],
    f: impl Fn(&str, &Instance) -> Part + Sync,
) -> Table {
    let parts = cases
        .par_iter()
        .map(|c| match &c.instance {
            Ok(inst) => f(&c.id, inst),
            Err(e) => failed(header, &c.id, marker, e),
        })
        .collect();
    Table::from_parts(header, parts)
}

pub fn conditioning_table(cases: &[Case], opts: &ConditioningOptions) -> Table {
    run_cases(CONDITIONING_HEADER, None, cases, |id, inst| {
        let joint = match inst.mrf.joint_table() {
            Ok(j) => j,
            Err(e) => return failed(CONDITIONING_HEADER, id, None, e),
        };
        let delta = max_weighted_degree(&inst.mrf).delta;
        let r = check_conditioning_bounds(&joint, delta, opts);
        let row = vec![
            id.to_string(),
            num(delta),
            num(r.lower),
            num(r.upper),
            num(r.min_ratio),
            num(r.max_ratio),
            r.pairs_checked.to_string(),
            r.exhaustive.to_string(),
            r.pass.to_string(),
        ];
        let slack = (r.upper - r.max_ratio).min(r.min_ratio - r.lower);
        (vec![row], vec![Outcome { check: "conditioning".into(), pass: r.pass, slack }], None)
    })
}

fn distribution(inst: &Instance) -> Result<ValuationDistribution> {
    let g = inst.valuation.clone().context("instance has no valuation")?;
    Ok(ValuationDistribution::new(inst.mrf.joint_table()?, g)?)
}

/// Which groups of revenue bounds to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundSelection {
    pub theorems: bool,
    pub lemmas: bool,
}

impl BoundSelection {
    pub fn from_checks(checks: &[Check]) -> Self {
        Self { theorems: checks.contains(&Check::Theorems), lemmas: checks.contains(&Check::Lemmas) }
    }

    pub fn any(self) -> bool {
        self.theorems || self.lemmas
    }
}

const BOUNDS_ERROR: Option<(usize, &str)> = Some((4, "error"));

pub fn bounds_table(cases: &[Case], sel: BoundSelection, lp_var_cap: usize) -> Table {
    if !sel.any() {
        return Table::new(BOUNDS_HEADER);
    }
    run_cases(BOUNDS_HEADER, BOUNDS_ERROR, cases, |id, inst| {
        let setting = inst.valuation.as_ref().map(|g| Setting::of(g.kind()).as_str()).unwrap_or("");
        let marker = BOUNDS_ERROR;
        let d = match distribution(inst) {
            Ok(d) => d,
            Err(e) => return failed(BOUNDS_HEADER, id, marker, format!("{e:#}")),
        };
        let delta = max_weighted_degree(&inst.mrf).delta;
        let reports = Benchmarks::compute_with_cap(&d, lp_var_cap).and_then(|bench| {
            let mut out = Vec::new();
            if sel.theorems {
                out.extend(check_theorems(&d, delta, &bench));
            }
            if sel.lemmas {
                out.extend(check_lemmas(&d, delta, &bench)?);
            }
            Ok(out)
        });
        let reports = match reports {
            Ok(r) => r,
            Err(e) => return failed(BOUNDS_HEADER, id, marker, e),
        };
        let rows = reports
            .iter()
            .map(|r| {
                vec![
                    id.to_string(),
                    setting.to_string(),
                    String::new(),
                    num(delta),
                    r.name.clone(),
                    num(r.lhs),
                    num(r.rhs),
                    num(r.slack),
                    r.pass.to_string(),
                ]
            })
            .collect();
        (rows, reports.iter().map(Outcome::of).collect(), None)
    })
}

#[derive(Debug, Clone, Serialize)]
struct MenuFile {
    instance_id: String,
    revenue: f64,
    lp_iterations: usize,
    lp_vars: usize,
    lp_rows: usize,
    option: Vec<MenuEntry>,
}

#[derive(Debug, Clone, Serialize)]
struct MenuEntry {
    type_outcome: Vec<usize>,
    type_prob: f64,
    price: f64,
    lottery: Vec<LotteryEntry>,
}

#[derive(Debug, Clone, Serialize)]
struct LotteryEntry {
    items: Vec<usize>,
    prob: f64,
}

const LP_REV_ERROR: Option<(usize, &str)> = Some((1, "error"));

/// Optimal revenue and simple benchmarks per instance, with each optimal menu
/// written as TOML to `menu_dir` when given.
pub fn lp_rev_table(cases: &[Case], lp_var_cap: usize, menu_dir: Option<&Path>) -> Table {
    run_cases(LP_REV_HEADER, LP_REV_ERROR, cases, |id, inst| {
        let res = distribution(inst).and_then(|d| {
            let bench = Benchmarks::compute_with_cap(&d, lp_var_cap)?;
            if let Some(dir) = menu_dir {
                let opt = optimal_rev_with_cap(&d, lp_var_cap)?;
                let file = MenuFile {
                    instance_id: id.to_string(),
                    revenue: opt.revenue,
                    lp_iterations: opt.iterations,
                    lp_vars: opt.lp_vars,
                    lp_rows: opt.lp_rows,
                    option: opt
                        .menu
                        .options
                        .iter()
                        .zip(opt.type_outcomes.iter().zip(&opt.type_probs))
                        .map(|(o, (s, &p))| MenuEntry {
                            type_outcome: s.clone(),
                            type_prob: p,
                            price: o.price,
                            lottery: o
                                .lottery
                                .iter()
                                .filter(|l| l.1 > 0.0)
                                .map(|&(set, prob)| LotteryEntry { items: set.iter().collect(), prob })
                                .collect(),
                        })
                        .collect(),
                };
                let path = dir.join(format!("{id}.menu.toml"));
                std::fs::write(&path, toml::to_string(&file)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(bench)
        });
        match res {
            Ok(b) => {
                let row = vec![
                    id.to_string(),
                    num(b.rev),
                    num(b.srev),
                    num(b.brev),
                    num(b.srev_prime),
                    b.lp_iterations.to_string(),
                ];
                (vec![row], vec![Outcome { check: "lp_rev".into(), pass: true, slack: 0.0 }], None)
            }
            Err(e) => failed(LP_REV_HEADER, id, LP_REV_ERROR, format!("{e:#}")),
        }
    })
}

/// Threshold rule evaluated by the `prophet` runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Geometric levels around the expected maximum, chosen uniformly.
    #[default]
    Levels,
    /// Best single threshold among the attainable values.
    BestSingle,
}

impl Policy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "levels" => Some(Policy::Levels),
            "best-single" => Some(Policy::BestSingle),
            _ => None,
        }
    }
}

fn policy_value(inst: &ProphetInstance, policy: Policy, delta: f64) -> Result<f64> {
    Ok(match policy {
        Policy::Levels => evaluate_policy(inst, &level_policy(inst, delta)?),
        Policy::BestSingle => {
            let mut taus: Vec<f64> = inst.values().iter().flatten().copied().collect();
            taus.sort_by(f64::total_cmp);
            taus.dedup();
            taus.iter().map(|&t| evaluate_threshold(inst, t)).fold(0.0, f64::max)
        }
    })
}

fn prophet_instance(inst: &Instance) -> Result<ProphetInstance> {
    let g = inst.valuation.as_ref().context("instance has no values")?;
    anyhow::ensure!(
        matches!(g.kind(), ValuationKind::Additive | ValuationKind::UnitDemand),
        "prophet instances need singleton values"
    );
    Ok(ProphetInstance::new(inst.mrf.clone(), g.singletons().to_vec(), inst.order_or_identity())?)
}

/// Random instances: `ratio = E[max] / E[ALG]` against `20 delta + 15`.
pub fn prophet_table(cases: &[Case], policy: Policy) -> Table {
    run_cases(PROPHET_HEADER, None, cases, |id, inst| {
        let res = prophet_instance(inst).and_then(|p| {
            let delta = p.delta();
            let alg = policy_value(&p, policy, delta)?;
            Ok((delta, expected_max(&p), alg, optimal_online(&p)?))
        });
        match res {
            Ok((delta, emax, alg, opt)) => {
                let bound = 20.0 * delta + 15.0;
                let r = BoundReport::le("prophet_threshold", emax, bound * alg, "");
                let row = vec![
                    id.to_string(),
                    String::new(),
                    num(delta),
                    num(emax),
                    num(alg),
                    num(opt),
                    num(emax / alg),
                    num(bound),
                    r.pass.to_string(),
                ];
                let online = BoundReport::le("prophet_online_sandwich", alg, opt, "");
                let upper = BoundReport::le("prophet_online_le_max", opt, emax, "");
                (vec![row], vec![Outcome::of(&r), Outcome::of(&online), Outcome::of(&upper)], None)
            }
            Err(e) => failed(PROPHET_HEADER, id, None, format!("{e:#}")),
        }
    })
}

/// Hard chains: `ratio = E[max] / OPT_online` against `(delta + 1) / 2`.
pub fn prophet_hard_table(deltas: &[f64], policy: Policy) -> Table {
    let parts = deltas
        .par_iter()
        .map(|&delta| {
            let id = format!("prophet-hard-{delta}");
            let res = hard_instance(delta).map_err(anyhow::Error::from).and_then(|(inst, cf)| {
                let reports = verify_lower_bound(&inst, &cf)?;
                let alg = policy_value(&inst, policy, inst.delta())?;
                Ok((inst.delta(), expected_max(&inst), alg, optimal_online(&inst)?, reports))
            });
            match res {
                Ok((computed, emax, alg, opt, reports)) => {
                    let pass = reports.iter().all(|r| r.pass);
                    let row = vec![
                        id,
                        num(delta),
                        num(computed),
                        num(emax),
                        num(alg),
                        num(opt),
                        num(emax / opt),
                        num((delta + 1.0) / 2.0),
                        pass.to_string(),
                    ];
                    (vec![row], reports.iter().map(Outcome::of).collect(), None)
                }
                Err(e) => failed(PROPHET_HEADER, &id, None, format!("{e:#}")),
            }
        })
        .collect();
    Table::from_parts(PROPHET_HEADER, parts)
}

/// Random instances: adaptive scheme at `1 / (1 + e^{4 delta})`.
pub fn ocrs_table(cases: &[Case]) -> Table {
    run_cases(OCRS_HEADER, None, cases, |id, inst| {
        let res = OcrsInstance::from_mrf(inst.mrf.clone(), inst.order_or_identity())
            .and_then(|o| Ok((o.delta(), check_adaptive_scheme(&o)?)));
        match res {
            Ok((delta, reports)) => {
                let alpha = 1.0 / (1.0 + (4.0 * delta).exp());
                let sel = reports.iter().find(|r| r.name == "ocrs_selectability").map(|r| r.lhs);
                let row = vec![
                    id.to_string(),
                    String::new(),
                    num(delta),
                    num(alpha),
                    sel.map(num).unwrap_or_default(),
                    String::new(),
                    String::new(),
                    reports.iter().all(|r| r.pass).to_string(),
                ];
                (vec![row], reports.iter().map(Outcome::of).collect(), None)
            }
            Err(e) => failed(OCRS_HEADER, id, None, e),
        }
    })
}

/// Hard paths: best scheme found and the closed-form ceiling against `4 e^{-delta}`.
pub fn ocrs_hard_table(deltas: &[f64]) -> Table {
    let parts = deltas
        .par_iter()
        .map(|&delta| {
            let id = format!("ocrs-hard-{delta}");
            let res = hard_ocrs_instance(delta).and_then(|inst| {
                let reports = verify_ocrs_separation(delta)?;
                let (p, q) = hard_ocrs_params(delta);
                let search = search_schemes(&inst, 16, 10_000, delta.to_bits())?;
                Ok((inst.delta(), max_alpha(p, q, inst.len() - 1), search.best, reports))
            });
            match res {
                Ok((computed, ceiling, best, reports)) => {
                    let row = vec![
                        id,
                        num(delta),
                        num(computed),
                        num(1.0 / (1.0 + (4.0 * computed).exp())),
                        num(best),
                        num(ceiling),
                        num(4.0 * (-delta).exp()),
                        reports.iter().all(|r| r.pass).to_string(),
                    ];
                    (vec![row], reports.iter().map(Outcome::of).collect(), None)
                }
                Err(e) => failed(OCRS_HEADER, &id, None, e),
            }
        })
        .collect();
    Table::from_parts(OCRS_HEADER, parts)
}

/// Pools and counts used by `verify-all`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyAllConfig {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub conditioning_count: usize,
    pub revenue_count: usize,
    pub prophet_count: usize,
    pub ocrs_count: usize,
    pub prophet_deltas: Vec<f64>,
    pub ocrs_deltas: Vec<f64>,
    pub lp_var_cap: usize,
}

impl Default for VerifyAllConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            checks: Check::ALL.to_vec(),
            conditioning_count: 200,
            revenue_count: 100,
            prophet_count: 200,
            ocrs_count: 100,
            prophet_deltas: vec![0.5, 1.0, 2.0],
            ocrs_deltas: vec![1.0, 2.0, 3.0],
            lp_var_cap: mrfbound_core::mechanisms::DEFAULT_LP_VAR_CAP,
        }
    }
}

pub const CLASSES: [ValuationKind; 3] =
    [ValuationKind::Additive, ValuationKind::UnitDemand, ValuationKind::SubadditiveTable];

impl VerifyAllConfig {
    fn base(&self, count: usize, salt: u64) -> ExperimentConfig {
        ExperimentConfig {
            seed: self.seed.wrapping_add(salt.wrapping_mul(0x1000_0000_01B3)),
            count,
            lp_var_cap: self.lp_var_cap,
            ..Default::default()
        }
    }

    /// MRFs with two to four vertices, supports up to three and potentials in `[-2, 2]`.
    pub fn conditioning_config(&self) -> ExperimentConfig {
        ExperimentConfig { n: IntRange { lo: 2, hi: 4 }, potential_cap: 2.0, ..self.base(self.conditioning_count, 1) }
    }

    pub fn revenue_config(&self, class: ValuationKind) -> ExperimentConfig {
        let salt = 2 + CLASSES.iter().position(|&c| c == class).unwrap_or(0) as u64;
        ExperimentConfig { class, ..self.base(self.revenue_count, salt) }
    }

    pub fn prophet_config(&self) -> ExperimentConfig {
        ExperimentConfig { n: IntRange { lo: 1, hi: 4 }, ..self.base(self.prophet_count, 5) }
    }

    pub fn ocrs_config(&self) -> ExperimentConfig {
        ExperimentConfig { n: IntRange { lo: 1, hi: 6 }, potential_cap: 2.0, ..self.base(self.ocrs_count, 6) }
    }

    pub fn revenue_cases(&self) -> Vec<Case> {
        CLASSES
            .iter()
            .flat_map(|&c| generate_cases(&self.revenue_config(c), Family::Revenue, Setting::of(c).as_str()))
            .collect()
    }
}

/// Every suite as `(file name, table)`; unselected checks give header-only tables.
pub fn verify_all(cfg: &VerifyAllConfig) -> Vec<(&'static str, Table)> {
    let on = |c: Check| cfg.checks.contains(&c);
    let conditioning = if on(Check::Conditioning) {
        let cases = generate_cases(&cfg.conditioning_config(), Family::Revenue, "mrf");
        conditioning_table(&cases, &ConditioningOptions::default())
    } else {
        Table::new(CONDITIONING_HEADER)
    };
    let sel = BoundSelection::from_checks(&cfg.checks);
    let revenue = if sel.any() || on(Check::LpRev) { cfg.revenue_cases() } else { Vec::new() };
    let bounds = bounds_table(&revenue, sel, cfg.lp_var_cap);
    let lp_rev =
        if on(Check::LpRev) { lp_rev_table(&revenue, cfg.lp_var_cap, None) } else { Table::new(LP_REV_HEADER) };
    let prophet = if on(Check::Prophet) {
        let mut t = prophet_table(&generate_cases(&cfg.prophet_config(), Family::Prophet, "prophet"), Policy::Levels);
        t.extend(prophet_hard_table(&cfg.prophet_deltas, Policy::Levels));
        t
    } else {
        Table::new(PROPHET_HEADER)
    };
    let ocrs = if on(Check::Ocrs) {
        let mut t = ocrs_table(&generate_cases(&cfg.ocrs_config(), Family::Ocrs, "ocrs"));
        t.extend(ocrs_hard_table(&cfg.ocrs_deltas));
        t
    } else {
        Table::new(OCRS_HEADER)
    };
    vec![
        ("conditioning.csv", conditioning),
        ("bounds.csv", bounds),
        ("lp_rev.csv", lp_rev),
        ("prophet.csv", prophet),
        ("ocrs.csv", ocrs),
    ]
}
