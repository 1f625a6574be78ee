use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::config::{key, KeySpec, RunConfig};
use super::persist::{diagnostics_csv, report_csv, trajectory_csv, verdict_line, write_atomic, write_report};
use crate::error::{Error, Result};
use crate::evolution::{evolve, invariant_report, EquationParams, EvolutionConfig, PerturbationReading};
use crate::experiments::{
    deep_water, product_bound_audit, qdelta_scan, s0, shallow_water, strichartz_exponents, Check, Criterion,
    ExperimentReport, Provenance, SolverParams, CODE_VERSION,
};
use crate::gauge::{gauged_residual, mean_normalize_trajectory, smoothing_deficit};
use crate::normalform::{ratio_estimate, AuditConfig};
use crate::spectral::{norm, Norm};

/// Files written by a command, relative to the output directory.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            files: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        write_atomic(&self.dir.join(name), contents.as_bytes())?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// `<stem>.json`, `<stem>.csv` (rows of `metric`) and `verdict`.
    pub fn write_report(&mut self, stem: &str, report: &ExperimentReport, metric: &str) -> Result<()> {
        let json = format!("{stem}.json");
        write_report(&self.dir.join(&json), report)?;
        self.files.push(json);
        self.write(&format!("{stem}.csv"), &report_csv(report, metric)?)?;
        self.write("verdict", &verdict_line(report))
    }
}

/// What a command reports back besides its files.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Execution {
    /// `None` when the command asserts nothing.
    pub passed: Option<bool>,
    /// Lines for standard output.
    pub summary: Vec<String>,
}

impl Execution {
    fn from_report(report: &ExperimentReport) -> Self {
        let mut summary: Vec<String> = report
            .verdicts
            .iter()
            .map(|v| {
                format!(
                    "{} {}: {:e}",
                    if v.passed { "PASS" } else { "FAIL" },
                    v.criterion,
                    v.observed
                )
            })
            .collect();
        for (k, v) in &report.slopes {
            summary.push(format!("slope[{k}] = {v}"));
        }
        Self {
            passed: (!report.verdicts.is_empty()).then(|| report.passed()),
            summary,
        }
    }
}

/// A named subcommand of the `ilw-lab` binary.
pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// Accepted keys besides the common ones, with their defaults.
    fn keys(&self) -> &'static [KeySpec];
    fn execute(&self, cfg: &RunConfig, out: &mut Outputs) -> Result<Execution>;
}

/// Name → command.
pub struct CommandRegistry {
    commands: BTreeMap<&'static str, Arc<dyn Command>>,
}

impl CommandRegistry {
    pub fn empty() -> Self {
        Self {
            commands: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, cmd: Arc<dyn Command>) {
        self.commands.insert(cmd.name(), cmd);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Command>> {
        self.commands.get(name).cloned().ok_or_else(|| Error::UnknownName {
            kind: "command",
            name: name.to_string(),
            known: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.keys().copied().collect()
    }

    pub fn global() -> &'static CommandRegistry {
        static REGISTRY: OnceLock<CommandRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| {
            let mut r = Self::empty();
            r.register(Arc::new(Simulate));
            r.register(Arc::new(DeepWater));
            r.register(Arc::new(ShallowWater));
            r.register(Arc::new(QScan));
            r.register(Arc::new(GaugeAudit));
            r.register(Arc::new(NfAudit));
            r.register(Arc::new(IneqAudit));
            r.register(Arc::new(Exponents));
            r
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    /// The solver blew up; the listed outputs are whatever was written before.
    Diverged,
}

/// Record of one run; its `config` table alone reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub code_version: String,
    pub started: String,
    pub finished: String,
    pub status: RunStatus,
    pub partial: bool,
    /// `pass`, `fail` or `none`.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<String>,
    pub config: BTreeMap<String, String>,
}

pub const MANIFEST_FILE: &str = "manifest.toml";

impl RunManifest {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        toml::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Format(e.to_string()))
    }

    /// The configuration that produced this manifest.
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            command: self.command.clone(),
            values: self.config.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub summary: Vec<String>,
}

impl RunOutcome {
    /// 0 on success, 1 when a verdict failed, 3 on divergence.
    pub fn exit_code(&self) -> i32 {
        match (self.manifest.status, self.manifest.verdict.as_str()) {
            (RunStatus::Diverged, _) => 3,
            (_, "fail") => 1,
            _ => 0,
        }
    }
}

/// Exit status for a run that stopped with `err`.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::UnknownName { .. }
        | Error::Precondition(_)
        | Error::Range(_)
        | Error::Shape(_) => 2,
        Error::Divergence { .. } => 3,
        _ => 1,
    }
}

/// Resolves `command` with the given file contents and overrides.
pub fn resolve_config(command: &str, file: Option<&str>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let cmd = CommandRegistry::global().get(command)?;
    RunConfig::resolve(command, cmd.keys(), file, overrides)
}

/// Executes the configured command and writes its manifest.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let cmd = CommandRegistry::global().get(&cfg.command)?;
    let dir = cfg.out_dir()?;
    std::fs::create_dir_all(&dir)?;
    let started = chrono::Utc::now().to_rfc3339();
    let mut out = Outputs::new(&dir);
    let (status, exec, error) = match cmd.execute(cfg, &mut out) {
        Ok(exec) => (RunStatus::Complete, exec, None),
        Err(e @ Error::Divergence { .. }) => (RunStatus::Diverged, Execution::default(), Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let manifest = RunManifest {
        command: cfg.command.clone(),
        code_version: CODE_VERSION.to_string(),
        started,
        finished: chrono::Utc::now().to_rfc3339(),
        status,
        partial: status == RunStatus::Diverged,
        verdict: match exec.passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "none",
        }
        .to_string(),
        error,
        outputs: out.files().to_vec(),
        config: cfg.values.clone(),
    };
    write_atomic(&dir.join(MANIFEST_FILE), manifest.to_toml()?.as_bytes())?;
    let mut summary = exec.summary;
    if let Some(e) = &manifest.error {
        summary.push(format!("diverged: {e}"));
    }
    Ok(RunOutcome { manifest, summary })
}

fn solver(cfg: &RunConfig) -> Result<SolverParams> {
    Ok(SolverParams {
        dt: cfg.f64("dt")?,
        t_final: cfg.f64("t_final")?,
        dealias: cfg.dealias()?,
        snapshot_stride: cfg.usize("stride")?,
    })
}

fn reading(cfg: &RunConfig) -> Result<PerturbationReading> {
    match cfg.str("reading")? {
        "second_order" => Ok(PerturbationReading::SecondOrder),
        "first_order" => Ok(PerturbationReading::FirstOrder),
        other => Err(Error::config(format!(
            "key `reading`: expected second_order or first_order, got `{other}`"
        ))),
    }
}

fn evolution_config(cfg: &RunConfig) -> Result<EvolutionConfig> {
    let sp = solver(cfg)?;
    let params = EquationParams {
        delta: Some(cfg.f64("delta")?),
        reading: reading(cfg)?,
    };
    let ec = EvolutionConfig::new(cfg.str("equation")?, cfg.grid()?, sp.dt, sp.t_final)
        .with_params(params)
        .with_dealias(sp.dealias)
        .with_stride(sp.snapshot_stride);
    ec.validate()?;
    ec.model()?;
    Ok(ec)
}

macro_rules! solver_keys {
    ($n:expr, $dt:expr, $t:expr, $stride:expr, $u0:expr) => {
        [
            key("grid.n", $n, "number of lattice modes"),
            key("grid.period", "2pi", "spatial period"),
            key("dt", $dt, "time step"),
            key("t_final", $t, "final time"),
            key("dealias", "two_thirds", "off, two_thirds or padded"),
            key("stride", $stride, "steps between stored snapshots"),
            key("u0", $u0, "initial data as cos:k:a / sin:k:a terms"),
        ]
    };
}

const fn concat<const A: usize, const B: usize, const C: usize>(a: [KeySpec; A], b: [KeySpec; B]) -> [KeySpec; C] {
    let mut out = [key("", "", ""); C];
    let mut i = 0;
    while i < A {
        out[i] = a[i];
        i += 1;
    }
    while i < A + B {
        out[i] = b[i - A];
        i += 1;
    }
    out
}

struct Simulate;

const SIMULATE_KEYS: [KeySpec; 11] = concat(
    [
        key("equation", "ilw", "equation name"),
        key("delta", "1", "depth parameter"),
        key("reading", "second_order", "perturbation reading for bo_perturbed"),
        key("s", "0.25", "Sobolev index of the hs diagnostic"),
    ],
    solver_keys!("256", "1e-3", "1", "10", "cos:1:0.3"),
);

impl Command for Simulate {
    fn name(&self) -> &'static str {
        "simulate"
    }
    fn about(&self) -> &'static str {
        "evolve one equation and write its trajectory"
    }
    fn keys(&self) -> &'static [KeySpec] {
        &SIMULATE_KEYS
    }
    fn execute(&self, cfg: &RunConfig, out: &mut Outputs) -> Result<Execution> {
        let ec = evolution_config(cfg)?;
        let s = cfg.f64("s")?;
        let u0 = cfg.initial_data(ec.grid)?;
        let traj = evolve(&u0, &ec)?;
        out.write("trajectory.csv", &trajectory_csv(&traj))?;
        let inv = invariant_report(&traj)?;
        let hs = traj
            .states
            .iter()
            .map(|u| norm(u, Norm::Hs { s }))
            .collect::<Result<Vec<_>>>()?;
        let rows = traj.times.iter().enumerate().flat_map(|(i, &t)| {
            [(t, "mean", inv.means[i]), (t, "l2", inv.l2_norms[i]), (t, "hs", hs[i])]
        });
        out.write("diagnostics.csv", &diagnostics_csv(rows))?;
        Ok(Execution {
            passed: None,
            summary: vec![
                format!("snapshots = {}", traj.len()),
                format!("mean_drift = {:e}", inv.mean_drift),
                format!("l2_relative_drift = {:e}", inv.l2_relative_drift),
            ],
        })
    }
}

struct DeepWater;

const DEEPWATER_KEYS: [KeySpec; 10] = concat(
    [
        key("s", "0.25", "Sobolev index of the error"),
        key("deltas", "1,2,4,8,16,32,inf", "increasing depth grid; inf is the BO sentinel"),
        key("linear", "false", "drop the quadratic term and compare with the closed form"),
    ],
    solver_keys!("256", "1e-3", "1", "10", "cos:1:1,sin:2:0.5"),
);

impl Command for DeepWater {
    fn name(&self) -> &'static str {
        "deepwater"
    }
    fn about(&self) -> &'static str {
        "ILW against BO as the depth grows"
    }
    fn keys(&self) -> &'static [KeySpec] {
        &DEEPWATER_KEYS
    }
    fn execute(&self, cfg: &RunConfig, out: &mut Outputs) -> Result<Execution> {
        let u0 = cfg.initial_data(cfg.grid()?)?;
        let r = deep_water(&u0, cfg.f64("s")?, &cfg.f64_list("deltas")?, &solver(cfg)?, cfg.bool("linear")?)?;
        out.write_report("deepwater", &r, "error")?;
        Ok(Execution::from_report(&r))
    }
}

struct ShallowWater;

const SHALLOWWATER_KEYS: [KeySpec; 10] = concat(
    [
        key("s", "0.25", "Sobolev index of the error"),
        key("deltas", "1,0.5,0.25,0.125", "decreasing depth grid"),
        key("linear", "false", "drop the quadratic term and compare with the closed form"),
    ],
    solver_keys!("256", "1e-3", "1", "10", "cos:1:0.3"),
);

impl Command for ShallowWater {
    fn name(&self) -> &'static str {
        "shallowwater"
    }
    fn about(&self) -> &'static str {
        "scaled ILW against KdV with coefficient 1/3 as the depth shrinks"
    }
    fn keys(&self) -> &'static [KeySpec] {
        &SHALLOWWATER_KEYS
    }
    fn execute(&self, cfg: &RunConfig, out: &mut Outputs) -> Result<Execution> {
        let u0 = cfg.initial_data(cfg.grid()?)?;
        let r = shallow_water(&u0, cfg.f64("s")?, &cfg.f64_list("deltas")?, &solver(cfg)?, cfg.bool("linear")?)?;
        out.write_report("shallowwater", &r, "error")?;
        Ok(Execution::from_report(&r))
    }
}

struct QScan;

const QSCAN_KEYS: [KeySpec; 4] = [
    key("s_list", "0,0.25", "Sobolev indices"),
    key("deltas", "0.25,0.5,1,2,4,8,16,32,64", "depth grid"),
    key("grid.n", "256", "number of lattice modes"),
    key("grid.period", "2pi", "spatial period"),
];

impl Command for QScan {
    fn name(&self) -> &'static str {
        "qscan"
    }
    fn about(&self) -> &'static str {
        "exact lattice norms of Q_delta and Q_delta d/dx"
    }
    fn keys(&self) -> &'static [KeySpec] {
        &QSCAN_KEYS
    }
    fn execute(&self, cfg: &RunConfig, out: &mut Outputs) -> Result<Execution> {
        let r = qdelta_scan(&cfg.f64_list("s_list")?, &cfg.f64_list("deltas")?, &cfg.grid()?)?;
        out.write_report("qscan", &r, "ratio")?;
        Ok(Execution::from_report(&r))
    }
}

struct GaugeAudit;

const GAUGE_KEYS: [KeySpec; 13] = concat(
    [
        key("equation", "ilw", "ilw, bo_perturbed or bo"),
        key("delta", "1", "depth parameter"),
        key("reading", "second_order", "perturbation reading for bo_perturbed"),
        key("s", "0.25", "Sobolev index of the smoothing deficit"),
        key("eps", "0.25", "extra smoothing of the deficit norm"),
        key("tolerance", "1e-4", "bound on the normalised residual"),
    ],
    solver_keys!("256", "5e-4", "0.5", "1", "cos:1:0.3"),
);

impl Command for GaugeAudit {
    fn name(&self) -> &'static str {
        "gauge-audit"
    }
    fn about(&self) -> &'static str {
        "residual of the gauged equation and the smoothing deficit"
    }
    fn keys(&self) -> &'static [KeySpec] {
        &GAUGE_KEYS
    }
    fn execute(&self, cfg: &RunConfig, out: &mut Outputs) -> Result<Execution> {
        let ec = evolution_config(cfg)?;
        let u0 = cfg.initial_data(ec.grid)?;
        let traj = evolve(&u0, &ec)?;
        let res = gauged_residual(&traj)?;
        let deficit = smoothing_deficit(&mean_normalize_trajectory(&traj)?, cfg.f64("s")?, cfg.f64("eps")?)?;

        let mut rows: Vec<(f64, &str, f64)> = Vec::new();
        for (i, &t) in res.times.iter().enumerate() {
            rows.push((t, "residual_consistent", res.consistent[i]));
            rows.push((t, "residual_literal", res.literal[i]));
        }
        for (&t, &d) in deficit.times.iter().zip(&deficit.values) {
            rows.push((t, "deficit", d));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.write("gauge-audit_series.csv", &diagnostics_csv(rows))?;

        let provenance = Provenance::new(cfg.seed()?, serde_json::to_value(&cfg.values).map_err(|e| Error::Internal(e.to_string()))?);
        let mut r = ExperimentReport::new("gauge-audit", "t", res.times.clone(), provenance);
        r.metrics.insert("residual_consistent".into(), res.consistent.clone());
        r.metrics.insert("residual_literal".into(), res.literal.clone());
        r.scalars.insert("deficit_max".into(), deficit.max());
        r.criteria.push(Criterion::new(
            "gauged residual",
            Check::MaxAtMost {
                metric: "residual_consistent".into(),
                bound: cfg.f64("tolerance")?,
            },
        ));
        let r = r.finalize()?;
        out.write_report("gauge-audit", &r, "residual_consistent")?;
        Ok(Execution::from_report(&r))
    }
}

fn audit_report(experiment: &str, cfg: &AuditConfig, operator: &str) -> Result<ExperimentReport> {
    let rr = ratio_estimate(operator, cfg)?;
    let provenance = Provenance::new(
        cfg.seed,
        serde_json::json!({"operator": operator, "audit": cfg}),
    );
    let mut r = ExperimentReport::new(experiment, rr.parameter.clone(), rr.params.clone(), provenance);
    r.metrics.insert("max_ratio".into(), rr.max_ratios.clone());
    r.slopes.insert("max_ratio".into(), rr.slope);
    r.scalars.insert("bound_exponent".into(), rr.bound_exponent);
    r.scalars.insert("n_modes".into(), rr.n_modes as f64);
    r.criteria.push(Criterion::new(
        "slope <= bound exponent + 0.1",
        Check::SlopeAtMost {
            slope: "max_ratio".into(),
            bound: rr.bound_exponent + 0.1,
        },
    ));
    r.finalize()
}

struct NfAudit;

const NF_KEYS: [KeySpec; 7] = [
    key("operator", "N1_leqM", "audited operator"),
    key("M", "", "comma-separated parameter grid (operator default when empty)"),
    key("s", "0.2", "Sobolev index"),
    key("theta", "0", "smoothing gain"),
    key("samples", "1000", "random draws per parameter"),
    key("n_modes", "auto", "lattice size (operator default when auto)"),
    key("refine", "true", "coordinate ascent from the best draw"),
];

impl Command for NfAudit {
    fn name(&self) -> &'static str {
        "nf-audit"
    }
    fn about(&self) -> &'static str {
        "randomized norm ratios of the normal-form operators"
    }
    fn keys(&self) -> &'static [KeySpec] {
        &NF_KEYS
    }
    fn execute(&self, cfg: &RunConfig, out: &mut Outputs) -> Result<Execution> {
        let mut ac = AuditConfig::new(cfg.usize("samples")?, cfg.seed()?);
        ac.params = cfg.f64_list("M")?;
        ac.s = cfg.f64("s")?;
        ac.theta = cfg.f64("theta")?;
        ac.refine = cfg.bool("refine")?;
        ac.n_modes = match cfg.str("n_modes")? {
            "auto" => None,
            _ => Some(cfg.usize("n_modes")?),
        };
        let r = audit_report("nf-audit", &ac, cfg.str("operator")?)?;
        out.write_report("nf-audit", &r, "max_ratio")?;
        Ok(Execution::from_report(&r))
    }
}

struct IneqAudit;

const INEQ_KEYS: [KeySpec; 3] = [
    key("s", "0.3", "Sobolev index in (1/4, 1/2)"),
    key("N", "8,16,32,64,128", "dyadic output shells"),
    key("samples", "1000", "random draws per shell"),
];

impl Command for IneqAudit {
    fn name(&self) -> &'static str {
        "ineq-audit"
    }
    fn about(&self) -> &'static str {
        "randomized audit of the localized product bound"
    }
    fn keys(&self) -> &'static [KeySpec] {
        &INEQ_KEYS
    }
    fn execute(&self, cfg: &RunConfig, out: &mut Outputs) -> Result<Execution> {
        let r = product_bound_audit(cfg.f64("s")?, &cfg.u64_list("N")?, cfg.usize("samples")?, cfg.seed()?)?;
        out.write_report("ineq-audit", &r, "max_ratio")?;
        Ok(Execution::from_report(&r))
    }
}

struct Exponents;

const EXPONENT_KEYS: [KeySpec; 2] = [
    key("s", "0.25", "Sobolev index"),
    key("p", "4", "Lebesgue exponent in [2, inf]"),
];

impl Command for Exponents {
    fn name(&self) -> &'static str {
        "exponents"
    }
    fn about(&self) -> &'static str {
        "refined Strichartz exponents alpha(s,p), beta(s,p) and s0"
    }
    fn keys(&self) -> &'static [KeySpec] {
        &EXPONENT_KEYS
    }
    fn execute(&self, cfg: &RunConfig, out: &mut Outputs) -> Result<Execution> {
        let (s, p) = (cfg.f64("s")?, cfg.f64("p")?);
        let (alpha, beta) = strichartz_exponents(s, p)?;
        let provenance = Provenance::new(cfg.seed()?, serde_json::json!({"s": s, "p": p.to_string()}));
        let mut r = ExperimentReport::new("exponents", "p", vec![p], provenance);
        r.scalars.insert("alpha".into(), alpha);
        r.scalars.insert("beta".into(), beta);
        r.scalars.insert("s0".into(), s0());
        let r = r.finalize()?;
        let json = "exponents.json".to_string();
        write_report(&out.dir().join(&json), &r)?;
        out.files.push(json);
        Ok(Execution {
            passed: None,
            summary: vec![format!("alpha={alpha} beta={beta} s0={}", s0())],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_every_command() {
        assert_eq!(
            CommandRegistry::global().names(),
            vec![
                "deepwater",
                "exponents",
                "gauge-audit",
                "ineq-audit",
                "nf-audit",
                "qscan",
                "shallowwater",
                "simulate"
            ]
        );
        assert!(matches!(
            CommandRegistry::global().get("plot"),
            Err(Error::UnknownName { .. })
        ));
    }

    #[test]
    fn key_tables_have_no_blanks_or_duplicates() {
        for name in CommandRegistry::global().names() {
            let cmd = CommandRegistry::global().get(name).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for k in cmd.keys() {
                assert!(!k.name.is_empty(), "{name}");
                assert!(seen.insert(k.name), "{name}: duplicate {}", k.name);
            }
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(
            exit_code(&Error::Divergence {
                time: 1.0,
                reason: "x".into()
            }),
            3
        );
        assert_eq!(exit_code(&Error::Format("x".into())), 1);
    }
}
