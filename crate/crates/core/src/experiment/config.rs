//! Experiment configuration: TOML text with `[section]` headers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{GeneralizedKernel, Kernel, PoissonKernel};
use crate::nodes::{generate_lattice, generate_perturbed, kadec_bound, NodeSet, PerturbationRule, RELAXED_BOUND_2D};
use crate::spaces::{jinc_function, radial_poly_function, BandlimitedFunction, RECOVERY_RATIO};
use crate::spectral::GridSpec;

/// Largest window accepted; `(2W+1)²` stays below about 4000 nodes.
pub const MAX_WINDOW: u32 = 31;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSection,
    pub band: BandSection,
    pub nodes: NodesSection,
    #[serde(default)]
    pub kernel: KernelSection,
    pub sweep: SweepSection,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_study: Option<WindowStudySection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    /// Half-width of the band square `S_δ`.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileName {
    Indicator,
    RadialPolynomial,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSection {
    pub beta: f64,
    #[serde(default = "default_profile")]
    pub profile: ProfileName,
    #[serde(default = "one")]
    pub c0: f64,
    #[serde(default)]
    pub c1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKindName {
    Lattice,
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodesSection {
    pub kind: NodeKindName,
    pub window: u32,
    /// Perturbation radius `L`.
    #[serde(default)]
    pub radius: f64,
    #[serde(default)]
    pub seed: u64,
    /// Admit `L ≤ 1/20` instead of the Kadec-type bound.
    #[serde(default)]
    pub allow_relaxed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelName {
    Poisson,
    Generalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    #[serde(rename = "type")]
    pub kind: KernelName,
    #[serde(default = "one")]
    pub omega: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            kind: KernelName::Poisson,
            omega: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alpha: Vec<f64>,
    /// Lower end of the slope fit; defaults to `A_δ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_min_alpha: Option<f64>,
    /// Fixed annulus count; chosen automatically when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_m: Option<usize>,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_solve_tol")]
    pub solve: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solve: default_solve_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowStudySection {
    pub windows: Vec<u32>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            prefix: default_prefix(),
        }
    }
}

fn default_profile() -> ProfileName {
    ProfileName::Indicator
}
fn one() -> f64 {
    1.0
}
fn default_slack() -> f64 {
    crate::interp::DEFAULT_SLACK
}
fn default_solve_tol() -> f64 {
    crate::interp::SOLVE_TOL
}
fn default_dir() -> String {
    "out".to_string()
}
fn default_prefix() -> String {
    "sweep".to_string()
}

/// Regression baseline: jinc(0.25) on the `W = 8` lattice for `δ = π`.
pub const ACCEPTANCE_PRESET: &str = r#"
[problem]
delta = 3.141592653589793

[band]
beta = 0.25
profile = "indicator"

[nodes]
kind = "lattice"
window = 8

[sweep]
alpha = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]

[grid]
extent = 5.0
points = 41
"#;

/// `δ = π`, `β = π/6`, nodes perturbed by up to `L = 0.04` under the
/// relaxed 1/20 rule.
pub const PERTURBED_PRESET: &str = r#"
[problem]
delta = 3.141592653589793

[band]
beta = 0.5235987755982988
profile = "indicator"

[nodes]
kind = "perturbed"
window = 8
radius = 0.04
seed = 2024
allow_relaxed = true

[sweep]
alpha = [0.5, 1.0, 1.5, 2.0]

[grid]
extent = 5.0
points = 41
"#;

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let prefix = &text[..offset.min(text.len())];
    let line = prefix.matches('\n').count() + 1;
    let column = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let problems = config.violations();
    if problems.is_empty() {
        Ok(config)
    } else {
        Err(Error::InvalidConfig(problems))
    }
}

impl ExperimentConfig {
    pub fn acceptance_preset() -> Self {
        parse_config(ACCEPTANCE_PRESET).expect("preset is valid")
    }

    pub fn perturbed_preset() -> Self {
        parse_config(PERTURBED_PRESET).expect("preset is valid")
    }

    /// Every violated constraint, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let delta = self.problem.delta;
        if !(delta.is_finite() && delta > 0.0) {
            v.push(format!("problem.delta must be positive (got {delta})"));
        }
        let beta = self.band.beta;
        if !(beta.is_finite() && beta > 0.0) {
            v.push(format!("band.beta must be positive (got {beta})"));
        } else if delta > 0.0 && beta >= delta {
            v.push(format!("band.beta must be below problem.delta (beta = {beta}, delta = {delta})"));
        }
        if self.band.profile == ProfileName::RadialPolynomial && self.band.c0 == 0.0 && self.band.c1 == 0.0 {
            v.push("band.c0 and band.c1 must not both be zero".to_string());
        }
        if !(self.band.c0.is_finite() && self.band.c1.is_finite()) {
            v.push("band.c0 and band.c1 must be finite".to_string());
        }
        let n = &self.nodes;
        if n.window > MAX_WINDOW {
            v.push(format!("nodes.window must be at most {MAX_WINDOW} (got {})", n.window));
        }
        match n.kind {
            NodeKindName::Lattice => {
                if n.radius != 0.0 {
                    v.push("nodes.radius must be 0 for a lattice".to_string());
                }
            }
            NodeKindName::Perturbed => {
                let rule = self.perturbation_rule();
                if !(n.radius.is_finite() && n.radius >= 0.0) {
                    v.push(format!("nodes.radius must be non-negative (got {})", n.radius));
                } else if rule == PerturbationRule::Kadec && n.radius >= kadec_bound(2) {
                    v.push(format!(
                        "nodes.radius = {} is not below the Kadec-type bound {:.6}; set nodes.allow_relaxed = true to use the 1/20 rule",
                        n.radius,
                        kadec_bound(2)
                    ));
                } else if n.radius > RELAXED_BOUND_2D {
                    v.push(format!("nodes.radius = {} exceeds 1/20", n.radius));
                }
            }
        }
        let k = &self.kernel;
        match k.kind {
            KernelName::Poisson if k.omega != 1.0 => {
                v.push("kernel.omega must be 1 for the Poisson kernel".to_string());
            }
            KernelName::Generalized if !(k.omega > 0.0 && k.omega <= 2.0) => {
                v.push(format!("kernel.omega must lie in (0, 2] (got {})", k.omega));
            }
            _ => {}
        }
        let s = &self.sweep;
        if s.alpha.is_empty() {
            v.push("sweep.alpha must not be empty".to_string());
        }
        if s.alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            v.push("sweep.alpha values must be positive".to_string());
        }
        if s.alpha.windows(2).any(|w| !(w[0] < w[1])) {
            v.push("sweep.alpha must be strictly ascending".to_string());
        }
        if let Some(m) = s.truncation_m {
            if m < 2 {
                v.push(format!("sweep.truncation_m must be at least 2 (got {m})"));
            }
        }
        if !(s.slack >= 1.0) {
            v.push(format!("sweep.slack must be at least 1 (got {})", s.slack));
        }
        if !(self.grid.extent.is_finite() && self.grid.extent > 0.0) || self.grid.points == 0 {
            v.push("grid.extent must be positive and grid.points at least 1".to_string());
        }
        if !(self.tolerances.solve > 0.0 && self.tolerances.solve < 1.0) {
            v.push(format!("tolerances.solve must lie in (0, 1) (got {})", self.tolerances.solve));
        }
        if let Some(w) = &self.window_study {
            if w.windows.is_empty() || w.windows.windows(2).any(|p| !(p[0] < p[1])) {
                v.push("window_study.windows must be non-empty and strictly ascending".to_string());
            }
            if w.windows.iter().any(|&x| x > MAX_WINDOW) {
                v.push(format!("window_study.windows must be at most {MAX_WINDOW}"));
            }
            if !(w.alpha.is_finite() && w.alpha > 0.0) {
                v.push("window_study.alpha must be positive".to_string());
            }
        }
        v
    }

    /// Non-fatal remarks about the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.recovery_hypothesis() {
            w.push(format!(
                "beta = {} is not below (3 - sqrt 8) delta = {:.6}: the recovery hypothesis fails; interpolation is still well posed for every alpha > 0",
                self.band.beta,
                self.recovery_threshold()
            ));
        }
        if self.nodes.kind == NodeKindName::Perturbed && self.nodes.radius >= kadec_bound(2) {
            w.push(format!(
                "nodes.radius = {} uses the relaxed 1/20 rule (Kadec-type bound {:.6})",
                self.nodes.radius,
                kadec_bound(2)
            ));
        }
        w
    }

    /// `(3 - √8) δ`.
    pub fn recovery_threshold(&self) -> f64 {
        RECOVERY_RATIO * self.problem.delta
    }

    pub fn recovery_hypothesis(&self) -> bool {
        self.band.beta < self.recovery_threshold()
    }

    fn perturbation_rule(&self) -> PerturbationRule {
        if self.nodes.allow_relaxed {
            PerturbationRule::RelaxedTwentieth
        } else {
            PerturbationRule::Kadec
        }
    }

    pub fn function(&self) -> Result<BandlimitedFunction> {
        let b = &self.band;
        match b.profile {
            ProfileName::Indicator => jinc_function(b.beta),
            ProfileName::RadialPolynomial => radial_poly_function(b.beta, b.c0, b.c1),
            ProfileName::Zero => BandlimitedFunction::zero(b.beta),
        }
    }

    pub fn node_set(&self) -> Result<NodeSet> {
        self.node_set_with_window(self.nodes.window)
    }

    /// Same node family, different window.
    pub fn node_set_with_window(&self, window: u32) -> Result<NodeSet> {
        let n = &self.nodes;
        match n.kind {
            NodeKindName::Lattice => generate_lattice(self.problem.delta, window),
            NodeKindName::Perturbed => generate_perturbed(
                self.problem.delta,
                window,
                n.radius,
                n.seed,
                self.perturbation_rule(),
            ),
        }
    }

    pub fn kernel(&self, alpha: f64) -> Result<Kernel> {
        Ok(match self.kernel.kind {
            KernelName::Poisson => PoissonKernel::new(alpha)?.into(),
            KernelName::Generalized => GeneralizedKernel::new(alpha, self.kernel.omega)?.into(),
        })
    }

    /// `β + δ(√8 - 3)`.
    pub fn bound_slope(&self) -> f64 {
        self.band.beta + self.problem.delta * (8f64.sqrt() - 3.0)
    }

    /// Normalized configuration with every default filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// `π/6`, the band radius of the perturbed-lattice preset.
pub const PERTURBED_BETA: f64 = PI / 6.0;

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[problem]
delta = 3.141592653589793
[band]
beta = 0.25
[nodes]
kind = "lattice"
window = 2
[sweep]
alpha = [1.0]
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.band.profile, ProfileName::Indicator);
        assert_eq!(c.kernel.kind, KernelName::Poisson);
        assert_eq!(c.grid, GridSpec::default());
        assert_eq!(c.tolerances.solve, 1e-12);
        assert_eq!(c.sweep.slack, 1.2);
        assert!(c.recovery_hypothesis());
        assert!(c.warnings().is_empty());
        let echo = c.to_toml();
        assert_eq!(parse_config(&echo).unwrap(), c);
    }

    #[test]
    fn beta_at_delta_is_rejected() {
        let text = MINIMAL.replace("beta = 0.25", "beta = 3.5");
        match parse_config(&text) {
            Err(Error::InvalidConfig(v)) => {
                assert_eq!(v.len(), 1);
                assert!(v[0].contains("band.beta must be below problem.delta"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_violation_is_listed() {
        let text = MINIMAL
            .replace("beta = 0.25", "beta = -1.0")
            .replace("alpha = [1.0]", "alpha = [2.0, 1.0]")
            .replace("window = 2", "window = 99");
        match parse_config(&text) {
            Err(Error::InvalidConfig(v)) => assert_eq!(v.len(), 3, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn beta_above_recovery_threshold_warns() {
        let text = MINIMAL.replace("beta = 0.25", "beta = 1.0");
        let c = parse_config(&text).unwrap();
        assert!(!c.recovery_hypothesis());
        assert_eq!(c.warnings().len(), 1);
    }

    #[test]
    fn unknown_key_reports_position() {
        let text = MINIMAL.replace("window = 2", "window = 2\ncolour = 3");
        match parse_config(&text) {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!(line, 9);
                assert_eq!(column, 1);
                assert!(message.contains("colour"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        let text = MINIMAL.replace("window = 2", "window = = 2");
        match parse_config(&text) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 8);
                assert_eq!(column, 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn perturbation_needs_override_above_kadec() {
        let text = MINIMAL.replace("kind = \"lattice\"", "kind = \"perturbed\"\nradius = 0.04");
        assert!(matches!(parse_config(&text), Err(Error::InvalidConfig(_))));
        let relaxed = text.replace("radius = 0.04", "radius = 0.04\nallow_relaxed = true");
        let c = parse_config(&relaxed).unwrap();
        assert_eq!(c.warnings().len(), 1);
        assert!(c.node_set().unwrap().max_displacement() <= 0.04 + 1e-15);
    }

    #[test]
    fn presets() {
        let a = ExperimentConfig::acceptance_preset();
        assert_eq!(a.node_set().unwrap().len(), 289);
        assert!((a.bound_slope() + 0.289012084452647).abs() < 1e-14);
        let e = ExperimentConfig::perturbed_preset();
        assert!(e.recovery_hypothesis());
        assert!((e.band.beta - std::f64::consts::FRAC_PI_6).abs() < 1e-15);
        assert!((e.recovery_threshold() - 0.539012084452647).abs() < 1e-14);
        assert!((e.bound_slope() + 0.0154133088543483).abs() < 1e-14);
        assert_eq!(PERTURBED_BETA, e.band.beta);
    }
}
