//! Command implementations behind the `skipfree` binary.
//!
//! Every command returns a [`Report`]. Each agreement flag stores the value,
//! the reference interval and the tolerance it was judged with, so a report
//! can be re-audited from its own numbers via [`Report::audit`].

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::{summarize, WalkSummary};
use crate::chains::{prob_negative_parity, separable_ruin, AbsorbingChainSpec, ParityProbabilities};
use crate::distributions::{DistributionSpec, IncrementDistribution};
use crate::error::{Error, ErrorClass, Result};
use crate::montecarlo::{simulate_summary, Quantity, SimulationConfig, SimulationEstimate};
use crate::oracle::{series_brackets, SeriesBracket, DEFAULT_TERMS};

pub const SCHEMA_VERSION: u32 = 1;
/// Series brackets wider than this produce a warning.
pub const WIDE_BRACKET: f64 = 1e-6;
/// Censored fractions above this produce a warning.
pub const HEAVY_CENSORING: f64 = 0.01;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_DISAGREEMENT: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack on containment of the analytic value in the series bracket.
    pub series: f64,
    /// Standard errors allowed between analytic values and Monte Carlo.
    pub monte_carlo_z: f64,
    /// Worked example quoted to six decimals.
    pub paper_exact: f64,
    /// Worked example quoted to three decimals.
    pub paper_rounded: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { series: 1e-8, monte_carlo_z: 3.0, paper_exact: 1e-5, paper_rounded: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    SeriesBracket,
    MonteCarlo,
    PaperExample,
}

/// `pass` iff `reference.0 - tolerance ≤ value ≤ reference.1 + tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementFlag {
    pub quantity: String,
    pub check: Check,
    pub value: f64,
    pub reference: (f64, f64),
    pub tolerance: f64,
    pub pass: bool,
}

impl AgreementFlag {
    pub fn new(quantity: impl Into<String>, check: Check, value: f64, reference: (f64, f64), tolerance: f64) -> Self {
        let mut flag = Self { quantity: quantity.into(), check, value, reference, tolerance, pass: false };
        flag.pass = flag.recompute();
        flag
    }

    pub fn recompute(&self) -> bool {
        self.value >= self.reference.0 - self.tolerance && self.value <= self.reference.1 + self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleBrackets {
    pub terms: usize,
    pub rho: SeriesBracket<f64>,
    pub rho_odd: SeriesBracket<f64>,
}

/// Transition blocks of both parity chains for one start level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMatrices {
    pub start_k: u64,
    pub even: AbsorbingChainSpec<f64>,
    pub odd: AbsorbingChainSpec<f64>,
}

/// Simulation settings echoed in reports. The stream count is left out on
/// purpose: it does not affect results and must not affect the output bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub trials: u64,
    pub horizon: u64,
    pub seed: u64,
    pub escape_tolerance: f64,
}

impl From<&SimulationConfig> for SimulationSettings {
    fn from(cfg: &SimulationConfig) -> Self {
        Self { trials: cfg.trials, horizon: cfg.horizon, seed: cfg.seed, escape_tolerance: cfg.escape_tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub input_spec: Option<serde_json::Value>,
    pub walk_summary: Option<WalkSummary<f64>>,
    pub parity: Vec<ParityProbabilities<f64>>,
    pub chains: Vec<ChainMatrices>,
    pub oracle_brackets: Option<OracleBrackets>,
    pub simulation_settings: Option<SimulationSettings>,
    pub simulation: Vec<SimulationEstimate>,
    pub agreement_flags: Vec<AgreementFlag>,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input_spec: None,
            walk_summary: None,
            parity: Vec::new(),
            chains: Vec::new(),
            oracle_brackets: None,
            simulation_settings: None,
            simulation: Vec::new(),
            agreement_flags: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.agreement_flags.iter().all(|f| f.pass)
    }

    /// Whether every stored `pass` matches its recomputation.
    pub fn audit(&self) -> bool {
        self.agreement_flags.iter().all(|f| f.pass == f.recompute())
    }

    pub fn exit_code(&self) -> u8 {
        if self.all_pass() {
            EXIT_OK
        } else {
            EXIT_DISAGREEMENT
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

pub fn exit_code_for(error: &Error) -> u8 {
    match error.class() {
        ErrorClass::Input => EXIT_INPUT,
        ErrorClass::Numeric => EXIT_NUMERIC,
    }
}

/// Reads a distribution spec file; returns the raw JSON and the parsed spec.
pub fn load_spec(path: &Path) -> Result<(serde_json::Value, DistributionSpec)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let spec = DistributionSpec::from_json(&text)?;
    Ok((raw, spec))
}

fn analytic_part(
    report: &mut Report,
    dist: &IncrementDistribution<f64>,
    ks: &[u64],
    tol: &Tolerances,
) -> Result<WalkSummary<f64>> {
    let summary = summarize(dist)?;
    for &k in ks {
        report.parity.push(prob_negative_parity(dist, k, &summary)?);
        report.chains.push(ChainMatrices {
            start_k: k,
            even: AbsorbingChainSpec::even_chain(&summary, k)?,
            odd: AbsorbingChainSpec::odd_chain(&summary, k)?,
        });
    }
    let (rho, rho_odd) = series_brackets(dist, DEFAULT_TERMS, summary.rho)?;
    for (name, value, bracket) in [("rho", summary.rho, &rho), ("rho_odd", summary.rho_odd, &rho_odd)] {
        report.agreement_flags.push(AgreementFlag::new(
            name,
            Check::SeriesBracket,
            value,
            (bracket.lower, bracket.upper),
            tol.series,
        ));
        if bracket.width() > WIDE_BRACKET {
            report.warnings.push(format!(
                "wide series bracket for {name}: width {:.3e} after {} terms",
                bracket.width(),
                bracket.terms_used
            ));
        }
    }
    if summary.multiple_roots {
        report.warnings.push("g(y) = -1 had several roots in [-rho, 0); picked by the series bracket".into());
    }
    report.oracle_brackets = Some(OracleBrackets { terms: DEFAULT_TERMS, rho, rho_odd });
    report.walk_summary = Some(summary.clone());
    Ok(summary)
}

fn simulation_part(
    report: &mut Report,
    dist: &IncrementDistribution<f64>,
    ks: &[u64],
    cfg: &SimulationConfig,
) -> Result<()> {
    for (i, &k) in ks.iter().enumerate() {
        let estimates = simulate_summary(dist, k, cfg)?;
        // Quantities at the origin do not depend on k; keep the first run's.
        report
            .simulation
            .extend(estimates.into_iter().filter(|e| i == 0 || matches!(e.quantity, Quantity::PEven(_) | Quantity::POdd(_) | Quantity::PBoth(_))));
    }
    for e in &report.simulation {
        if e.censored_fraction > HEAVY_CENSORING {
            report.warnings.push(format!(
                "{}: {:.1}% of trajectories censored at horizon {}",
                e.quantity,
                100.0 * e.censored_fraction,
                cfg.horizon
            ));
        }
    }
    report.simulation_settings = Some(SimulationSettings::from(cfg));
    Ok(())
}

fn distinct(ks: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for &k in ks {
        if !out.contains(&k) {
            out.push(k);
        }
    }
    if out.is_empty() {
        out.push(0);
    }
    out
}

/// Closed forms, chain matrices and series brackets for each start level.
pub fn cmd_analyze(spec_path: &Path, ks: &[u64]) -> Result<Report> {
    let (raw, spec) = load_spec(spec_path)?;
    let dist = spec.build::<f64>()?;
    let mut report = Report::new("analyze");
    report.input_spec = Some(raw);
    analytic_part(&mut report, &dist, &distinct(ks), &Tolerances::default())?;
    Ok(report)
}

/// Monte Carlo estimates only; bytes depend on the flags but not on `streams`.
pub fn cmd_simulate(spec_path: &Path, ks: &[u64], cfg: &SimulationConfig) -> Result<Report> {
    let (raw, spec) = load_spec(spec_path)?;
    let dist = spec.build::<f64>()?;
    let mut report = Report::new("simulate");
    report.input_spec = Some(raw);
    simulation_part(&mut report, &dist, &distinct(ks), cfg)?;
    Ok(report)
}

fn monte_carlo_tolerance(e: &SimulationEstimate, z: f64) -> f64 {
    z * e.std_error + z * z / e.sample_size.max(1) as f64 + 1e-12
}

fn analytic_value(summary: &WalkSummary<f64>, parity: &[ParityProbabilities<f64>], q: Quantity) -> Option<f64> {
    let at = |k: u64| parity.iter().find(|p| p.start_k == k);
    match q {
        Quantity::Rho => Some(summary.rho),
        Quantity::RhoOdd => Some(summary.rho_odd),
        Quantity::Sigma => Some(summary.sigma),
        Quantity::Tau => Some(summary.tau),
        Quantity::TauOdd => Some(summary.tau_odd),
        Quantity::PEven(k) => at(k).map(|p| p.p_even),
        Quantity::POdd(k) => at(k).map(|p| p.p_odd),
        Quantity::PBoth(k) => at(k).map(|p| p.p_both),
        Quantity::Ruin(_) => None,
    }
}

/// Analytic values against the series brackets and Monte Carlo.
///
/// A Monte Carlo flag passes when the analytic value is inside the
/// censoring bracket `[p̂ - bias, p̂ + censored + bias]` widened by
/// `z · SE + z² / n`. With no censoring this is `|a - p̂| ≤ z · SE` up to
/// the `z² / n` term, which keeps all-or-nothing samples (where the Wald
/// standard error is zero) from failing on counting noise.
pub fn cmd_compare(spec_path: &Path, ks: &[u64], cfg: &SimulationConfig) -> Result<Report> {
    let (raw, spec) = load_spec(spec_path)?;
    let dist = spec.build::<f64>()?;
    let ks = distinct(ks);
    let tol = Tolerances::default();
    let mut report = Report::new("compare");
    report.input_spec = Some(raw);
    let summary = analytic_part(&mut report, &dist, &ks, &tol)?;
    simulation_part(&mut report, &dist, &ks, cfg)?;
    let mut flags = Vec::new();
    for e in &report.simulation {
        if let Some(value) = analytic_value(&summary, &report.parity, e.quantity) {
            flags.push(AgreementFlag::new(
                e.quantity.to_string(),
                Check::MonteCarlo,
                value,
                e.censoring_bracket(),
                monte_carlo_tolerance(e, tol.monte_carlo_z),
            ));
        }
    }
    report.agreement_flags.extend(flags);
    Ok(report)
}

/// Values printed in the two worked examples for the walk with
/// `X + 1 ~ Poisson(1.5)`.
pub mod paper {
    pub const LAMBDA: f64 = 1.5;
    pub const RHO: f64 = 0.417188;
    pub const SIGMA: f64 = 0.311713;
    pub const TAU: f64 = 0.465157;
    pub const RHO_ODD: f64 = 0.706513;
    pub const TAU_ODD: f64 = 0.817032;
    pub const HALF_SIGMA: f64 = 0.156;
    pub const ALTERNATING_BASE: f64 = -0.413;
    pub const EXCURSION_DENOMINATOR: f64 = 0.915;
    pub const RUIN_FROM_0: f64 = 0.317;
    pub const RUIN_FROM_2: f64 = 0.059;
}

/// Reproduces both worked examples; every flag compares against the printed value.
pub fn cmd_paper_examples() -> Result<Report> {
    let tol = Tolerances::default();
    let spec = DistributionSpec::PoissonShifted { lambda: paper::LAMBDA };
    let dist = spec.build::<f64>()?;
    let mut report = Report::new("paper-examples");
    report.input_spec = Some(serde_json::to_value(&spec).map_err(|e| Error::Parse(e.to_string()))?);
    let summary = analytic_part(&mut report, &dist, &[0, 2], &tol)?;

    let mut flag = |name: &str, value: f64, quoted: f64, t: f64| {
        report.agreement_flags.push(AgreementFlag::new(name, Check::PaperExample, value, (quoted, quoted), t));
    };
    flag("rho", summary.rho, paper::RHO, tol.paper_exact);
    flag("sigma", summary.sigma, paper::SIGMA, tol.paper_exact);
    flag("tau", summary.tau, paper::TAU, tol.paper_exact);
    flag("rho_odd", summary.rho_odd, paper::RHO_ODD, tol.paper_exact);
    flag("tau_odd", summary.tau_odd, paper::TAU_ODD, tol.paper_exact);
    flag("sigma/2", summary.sigma / 2.0, paper::HALF_SIGMA, tol.paper_rounded);
    flag("1-2rho_odd", 1.0 - 2.0 * summary.rho_odd, paper::ALTERNATING_BASE, tol.paper_rounded);
    flag("1-tau(1-tau_odd)", summary.excursion_denominator(), paper::EXCURSION_DENOMINATOR, tol.paper_rounded);
    flag("separable_ruin(0)", separable_ruin(&dist, 0)?, paper::RUIN_FROM_0, tol.paper_rounded);
    flag("separable_ruin(2)", separable_ruin(&dist, 2)?, paper::RUIN_FROM_2, tol.paper_rounded);
    Ok(report)
}

fn fmt_num(x: f64) -> String {
    format!("{x:.10}")
}

/// Fixed-width text table: analytic values, series brackets, Monte Carlo and flags.
pub fn render_table(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", report.command);
    if let Some(s) = &report.walk_summary {
        let _ = writeln!(out, "\n{:<20} {:>16}", "quantity", "analytic");
        for (name, v) in [
            ("rho", s.rho),
            ("sigma", s.sigma),
            ("tau", s.tau),
            ("rho_odd", s.rho_odd),
            ("tau_odd", s.tau_odd),
            ("y_star", s.y_star),
        ] {
            let _ = writeln!(out, "{name:<20} {:>16}", fmt_num(v));
        }
        for p in &report.parity {
            for (name, v) in [("p_even", p.p_even), ("p_odd", p.p_odd), ("p_both", p.p_both)] {
                let _ = writeln!(out, "{:<20} {:>16}", format!("{name}({})", p.start_k), fmt_num(v));
            }
        }
    }
    if let Some(b) = &report.oracle_brackets {
        let _ = writeln!(out, "\n{:<20} {:>16} {:>16} {:>10}", "series (N terms)", "lower", "upper", "terms");
        for (name, br) in [("rho", &b.rho), ("rho_odd", &b.rho_odd)] {
            let _ = writeln!(out, "{name:<20} {:>16} {:>16} {:>10}", fmt_num(br.lower), fmt_num(br.upper), br.terms_used);
        }
    }
    if !report.simulation.is_empty() {
        let _ = writeln!(
            out,
            "\n{:<20} {:>14} {:>12} {:>14} {:>14} {:>10}",
            "monte carlo", "estimate", "std_error", "ci95_lo", "ci95_hi", "censored"
        );
        for e in &report.simulation {
            let _ = writeln!(
                out,
                "{:<20} {:>14.8} {:>12.3e} {:>14.8} {:>14.8} {:>10.2e}",
                e.quantity.to_string(),
                e.estimate,
                e.std_error,
                e.ci95.0,
                e.ci95.1,
                e.censored_fraction
            );
        }
    }
    if !report.agreement_flags.is_empty() {
        let _ = writeln!(
            out,
            "\n{:<20} {:<14} {:>16} {:>16} {:>16} {:>10} {:>5}",
            "flag", "check", "value", "ref_lo", "ref_hi", "tolerance", "pass"
        );
        for f in &report.agreement_flags {
            let check = serde_json::to_value(f.check).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{:<20} {:<14} {:>16} {:>16} {:>16} {:>10.1e} {:>5}",
                f.quantity,
                check,
                fmt_num(f.value),
                fmt_num(f.reference.0),
                fmt_num(f.reference.1),
                f.tolerance,
                if f.pass { "ok" } else { "FAIL" }
            );
        }
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

/// One row per Monte Carlo quantity: analytic, series bracket (where one
/// exists), estimate, interval and the flag outcome.
pub fn render_csv(report: &Report) -> String {
    let mut out = String::from("quantity,analytic,series_lower,series_upper,mc_estimate,mc_std_error,ci95_lower,ci95_upper,censored_fraction,pass\n");
    let brackets = report.oracle_brackets.as_ref();
    for e in &report.simulation {
        let name = e.quantity.to_string();
        let analytic = report.walk_summary.as_ref().and_then(|s| analytic_value(s, &report.parity, e.quantity));
        let bracket = match (e.quantity, brackets) {
            (Quantity::Rho, Some(b)) => Some(&b.rho),
            (Quantity::RhoOdd, Some(b)) => Some(&b.rho_odd),
            _ => None,
        };
        let pass = report
            .agreement_flags
            .iter()
            .filter(|f| f.quantity == name)
            .all(|f| f.pass);
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{name},{},{},{},{:e},{:e},{:e},{:e},{:e},{pass}",
            opt(analytic),
            opt(bracket.map(|b| b.lower)),
            opt(bracket.map(|b| b.upper)),
            e.estimate,
            e.std_error,
            e.ci95.0,
            e.ci95.1,
            e.censored_fraction
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn spec_file(json: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(json.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flag_pass_is_recomputable() {
        let f = AgreementFlag::new("rho", Check::SeriesBracket, 0.5, (0.4, 0.49), 0.02);
        assert!(f.pass);
        let g = AgreementFlag::new("rho", Check::SeriesBracket, 0.5, (0.4, 0.49), 0.001);
        assert!(!g.pass);
        assert_eq!(g.pass, g.recompute());
    }

    #[test]
    fn analyze_poisson() {
        let f = spec_file(r#"{"family": "poisson_shifted", "lambda": 1.5}"#);
        let r = cmd_analyze(f.path(), &[0]).unwrap();
        let s = r.walk_summary.as_ref().unwrap();
        assert!((s.rho - paper::RHO).abs() < 1e-5);
        assert!((s.tau_odd - paper::TAU_ODD).abs() < 1e-5);
        assert!(r.all_pass() && r.audit());
        assert_eq!(r.chains.len(), 1);
    }

    #[test]
    fn analyze_rejects_bad_mass() {
        let f = spec_file(r#"{"family": "finite", "pmf": [[-1, 0.3], [1, 0.5]]}"#);
        let err = cmd_analyze(f.path(), &[0]).unwrap_err();
        assert!(matches!(err, Error::MassNotOne { .. }));
        assert_eq!(exit_code_for(&err), EXIT_INPUT);
    }

    #[test]
    fn missing_file_is_input_error() {
        let err = cmd_analyze(Path::new("/nonexistent/spec.json"), &[0]).unwrap_err();
        assert_eq!(exit_code_for(&err), EXIT_INPUT);
    }

    #[test]
    fn negative_drift_is_numeric_error() {
        let f = spec_file(r#"{"family": "finite", "pmf": [[-1, 0.6], [1, 0.4]]}"#);
        assert_eq!(exit_code_for(&cmd_analyze(f.path(), &[0]).unwrap_err()), EXIT_NUMERIC);
    }

    #[test]
    fn paper_examples_pass() {
        let r = cmd_paper_examples().unwrap();
        let quoted = r.agreement_flags.iter().filter(|f| f.check == Check::PaperExample).count();
        assert_eq!(quoted, 10);
        assert!(r.all_pass(), "{}", render_table(&r));
        assert_eq!(r.exit_code(), EXIT_OK);
    }

    #[test]
    fn compare_simple_walk_and_round_trip() {
        let f = spec_file(r#"{"family": "finite", "pmf": [[-1, 0.3], [1, 0.7]]}"#);
        let cfg = SimulationConfig { trials: 20_000, ..SimulationConfig::default() };
        let r = cmd_compare(f.path(), &[0, 1], &cfg).unwrap();
        assert!(r.all_pass(), "{}", render_table(&r));
        assert!(r.audit());
        let tau_odd = r.simulation.iter().find(|e| e.quantity == Quantity::TauOdd).unwrap();
        assert_eq!(tau_odd.estimate, 0.0);
        assert_eq!(Report::from_json(&r.to_json().unwrap()).unwrap(), r);
        let csv = render_csv(&r);
        assert_eq!(csv.lines().count(), 1 + 8 + 3);
    }
}
