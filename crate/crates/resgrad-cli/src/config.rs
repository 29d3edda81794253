//! Run configuration: defaults, config-file parsing, flag merging and
//! validation.
//!
//! Precedence is defaults < config file < flags. The file format is UTF-8
//! text with one `key = value` pair per line and `#` comments; keys mirror the
//! flag names. Unknown keys are a hard parse error.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use resgrad::{
    DampedOscillatorParams, DuffingParams, Scheme, State, SystemSpec, VanDerPolParams,
};

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Simulate,
    Order,
    Compare,
    Exact,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Simulate => "simulate",
            CommandKind::Order => "order",
            CommandKind::Compare => "compare",
            CommandKind::Exact => "exact",
        }
    }

    fn default_out(&self) -> PathBuf {
        match self {
            CommandKind::Simulate => PathBuf::from("simulate.csv"),
            CommandKind::Order => PathBuf::from("order_out"),
            CommandKind::Compare => PathBuf::from("compare.csv"),
            CommandKind::Exact => PathBuf::from("exact.csv"),
        }
    }
}

/// Unresolved option values collected from flags or a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub system: Option<String>,
    pub b: Option<f64>,
    pub k: Option<f64>,
    pub mu: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub integrators: Option<Vec<String>>,
    pub q0: Option<f64>,
    pub p0: Option<f64>,
    pub w0: Option<f64>,
    pub h: Option<f64>,
    pub h0: Option<f64>,
    pub h_set: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub fp_tol: Option<f64>,
    pub fp_max_iter: Option<u32>,
    pub out: Option<PathBuf>,
}

impl RawConfig {
    /// Parse config-file text. One `key = value` per line, `#` comments,
    /// unknown keys fail fast.
    pub fn from_file_text(text: &str) -> Result<RawConfig> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            let parse_f64 = |field: &str| -> Result<f64> {
                value
                    .parse::<f64>()
                    .map_err(|_| anyhow!("line {}: {field} must be a number, got `{value}`", lineno + 1))
            };
            match key {
                "system" => raw.system = Some(value.to_string()),
                "b" => raw.b = Some(parse_f64("b")?),
                "k" => raw.k = Some(parse_f64("k")?),
                "mu" => raw.mu = Some(parse_f64("mu")?),
                "alpha" => raw.alpha = Some(parse_f64("alpha")?),
                "beta" => raw.beta = Some(parse_f64("beta")?),
                "integrator" => {
                    raw.integrators = Some(
                        value
                            .split(',')
                            .map(|s| s.trim().to_string())
                            .filter(|s| !s.is_empty())
                            .collect(),
                    )
                }
                "q0" => raw.q0 = Some(parse_f64("q0")?),
                "p0" => raw.p0 = Some(parse_f64("p0")?),
                "w0" => raw.w0 = Some(parse_f64("w0")?),
                "h" => raw.h = Some(parse_f64("h")?),
                "h0" => raw.h0 = Some(parse_f64("h0")?),
                "h-set" => {
                    let mut set = Vec::new();
                    for token in value.split(',') {
                        let token = token.trim();
                        set.push(token.parse::<f64>().map_err(|_| {
                            anyhow!("line {}: h-set entry must be a number, got `{token}`", lineno + 1)
                        })?);
                    }
                    raw.h_set = Some(set);
                }
                "t-end" => raw.t_end = Some(parse_f64("t-end")?),
                "fp-tol" => raw.fp_tol = Some(parse_f64("fp-tol")?),
                "fp-max-iter" => {
                    raw.fp_max_iter = Some(value.parse::<u32>().map_err(|_| {
                        anyhow!(
                            "line {}: fp-max-iter must be a positive integer, got `{value}`",
                            lineno + 1
                        )
                    })?)
                }
                "out" => raw.out = Some(PathBuf::from(value)),
                other => bail!("line {}: unknown config key `{other}`", lineno + 1),
            }
        }
        Ok(raw)
    }

    /// Overlay `self` (higher precedence) on `base`.
    pub fn over(self, base: RawConfig) -> RawConfig {
        RawConfig {
            system: self.system.or(base.system),
            b: self.b.or(base.b),
            k: self.k.or(base.k),
            mu: self.mu.or(base.mu),
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            integrators: self.integrators.or(base.integrators),
            q0: self.q0.or(base.q0),
            p0: self.p0.or(base.p0),
            w0: self.w0.or(base.w0),
            h: self.h.or(base.h),
            h0: self.h0.or(base.h0),
            h_set: self.h_set.or(base.h_set),
            t_end: self.t_end.or(base.t_end),
            fp_tol: self.fp_tol.or(base.fp_tol),
            fp_max_iter: self.fp_max_iter.or(base.fp_max_iter),
            out: self.out.or(base.out),
        }
    }

    /// Apply defaults, build the system and integrator list, validate
    /// everything.
    pub fn resolve(&self, command: CommandKind) -> Result<RunConfig> {
        let system_name = self.system.as_deref().unwrap_or("dho");
        let reject = |name: &str, value: Option<f64>| -> Result<()> {
            if value.is_some() {
                bail!("parameter `{name}` does not apply to system `{system_name}`");
            }
            Ok(())
        };
        let system = match system_name {
            "dho" => {
                reject("mu", self.mu)?;
                reject("alpha", self.alpha)?;
                reject("beta", self.beta)?;
                let params = DampedOscillatorParams::new(
                    self.b.unwrap_or(0.1),
                    self.k.unwrap_or(1.0),
                )
                .map_err(|e| anyhow!("{e}"))?;
                SystemSpec::DampedHarmonicOscillator(params)
            }
            "duffing" => {
                reject("k", self.k)?;
                reject("mu", self.mu)?;
                SystemSpec::Duffing(DuffingParams {
                    alpha: self.alpha.unwrap_or(1.0),
                    beta: self.beta.unwrap_or(1.0),
                    b: self.b.unwrap_or(0.1),
                })
            }
            "vdp" => {
                reject("b", self.b)?;
                reject("k", self.k)?;
                reject("alpha", self.alpha)?;
                reject("beta", self.beta)?;
                SystemSpec::VanDerPol(VanDerPolParams {
                    mu: self.mu.unwrap_or(1.0),
                })
            }
            other => bail!("unknown system `{other}` (known: dho, duffing, vdp)"),
        };

        let integrator_specs = match &self.integrators {
            Some(list) if !list.is_empty() => list.clone(),
            _ => match command {
                CommandKind::Compare => {
                    vec!["moddg".to_string(), "pqplf".to_string(), "erk4".to_string()]
                }
                _ => vec!["moddg".to_string()],
            },
        };
        let integrators = integrator_specs
            .iter()
            .map(|s| Scheme::parse(s).map_err(|e| anyhow!("{e}")))
            .collect::<Result<Vec<_>>>()?;

        let positive = |name: &str, value: f64| -> Result<f64> {
            if !(value.is_finite() && value > 0.0) {
                bail!("{name} must be positive, got {value}");
            }
            Ok(value)
        };
        let finite = |name: &str, value: f64| -> Result<f64> {
            if !value.is_finite() {
                bail!("{name} must be finite, got {value}");
            }
            Ok(value)
        };

        let h = positive("h", self.h.unwrap_or(0.01))?;
        let h0 = positive("h0", self.h0.unwrap_or(0.001))?;
        let t_end = positive("t-end", self.t_end.unwrap_or(20.0))?;
        let fp_tol = positive("fp-tol", self.fp_tol.unwrap_or(1e-14))?;
        let fp_max_iter = self.fp_max_iter.unwrap_or(500);
        if fp_max_iter == 0 {
            bail!("fp-max-iter must be at least 1");
        }
        let h_set = self
            .h_set
            .clone()
            .unwrap_or_else(|| resgrad::analysis::REFERENCE_H_SET.to_vec());
        for &hh in &h_set {
            positive("h-set entry", hh)?;
        }
        let q0 = finite("q0", self.q0.unwrap_or(2.3))?;
        let p0 = finite("p0", self.p0.unwrap_or(-3.1))?;
        let w0 = finite("w0", self.w0.unwrap_or(0.0))?;

        Ok(RunConfig {
            command,
            system,
            integrators,
            ics: State::new(0.0, q0, p0, w0),
            h,
            h0,
            h_set,
            t_end,
            fp_tol,
            fp_max_iter,
            out: self.out.clone().unwrap_or_else(|| command.default_out()),
        })
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub system: SystemSpec,
    pub integrators: Vec<Scheme>,
    pub ics: State,
    pub h: f64,
    pub h0: f64,
    pub h_set: Vec<f64>,
    pub t_end: f64,
    pub fp_tol: f64,
    pub fp_max_iter: u32,
    pub out: PathBuf,
}

/// Resolve a config from optional file text plus flag values; flags win.
pub fn parse_config(
    command: CommandKind,
    flags: RawConfig,
    file_text: Option<&str>,
) -> Result<RunConfig> {
    let from_file = match file_text {
        Some(text) => RawConfig::from_file_text(text).context("invalid config file")?,
        None => RawConfig::default(),
    };
    flags.over(from_file).resolve(command)
}

fn integrator_spec(scheme: &Scheme) -> String {
    match scheme {
        Scheme::ModDg(v) => format!("moddg:{}", v.label()),
        Scheme::PqpLf => "pqplf".to_string(),
        Scheme::Erk4 => "erk4".to_string(),
    }
}

/// Render a resolved config as config-file text; `parse_config` on the result
/// reproduces the config.
pub fn render(config: &RunConfig) -> String {
    let mut out = String::new();
    out.push_str("# resgrad run configuration\n");
    out.push_str(&format!("system = {}\n", config.system.name()));
    match &config.system {
        SystemSpec::DampedHarmonicOscillator(p) => {
            out.push_str(&format!("b = {}\n", p.b));
            out.push_str(&format!("k = {}\n", p.k));
        }
        SystemSpec::Duffing(p) => {
            out.push_str(&format!("alpha = {}\n", p.alpha));
            out.push_str(&format!("beta = {}\n", p.beta));
            out.push_str(&format!("b = {}\n", p.b));
        }
        SystemSpec::VanDerPol(p) => {
            out.push_str(&format!("mu = {}\n", p.mu));
        }
    }
    let integrators: Vec<String> = config.integrators.iter().map(integrator_spec).collect();
    out.push_str(&format!("integrator = {}\n", integrators.join(",")));
    out.push_str(&format!("q0 = {}\n", config.ics.q));
    out.push_str(&format!("p0 = {}\n", config.ics.p));
    out.push_str(&format!("w0 = {}\n", config.ics.w));
    out.push_str(&format!("h = {}\n", config.h));
    out.push_str(&format!("h0 = {}\n", config.h0));
    let h_set: Vec<String> = config.h_set.iter().map(|h| h.to_string()).collect();
    out.push_str(&format!("h-set = {}\n", h_set.join(",")));
    out.push_str(&format!("t-end = {}\n", config.t_end));
    out.push_str(&format!("fp-tol = {}\n", config.fp_tol));
    out.push_str(&format!("fp-max-iter = {}\n", config.fp_max_iter));
    out.push_str(&format!("out = {}\n", config.out.display()));
    out
}
