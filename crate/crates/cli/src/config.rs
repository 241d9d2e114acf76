//! Experiment configuration: a flat JSON file with a `suite` discriminator,
//! overridable field-by-field from command-line flags. The resolved config
//! is echoed verbatim into every artifact.

use lcpoly::LogConcaveMeasure;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    MainBound,
    Sweep,
    CarberyWright,
    Moments,
    ReversePoincare,
    Poincare,
    DensityVariance,
    EstimateConstant,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        Some(match name {
            "main-bound" => Suite::MainBound,
            "sweep" => Suite::Sweep,
            "carbery-wright" => Suite::CarberyWright,
            "moments" => Suite::Moments,
            "reverse-poincare" => Suite::ReversePoincare,
            "poincare" => Suite::Poincare,
            "density-variance" => Suite::DensityVariance,
            "estimate-constant" => Suite::EstimateConstant,
            "all" => Suite::All,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::MainBound => "main-bound",
            Suite::Sweep => "sweep",
            Suite::CarberyWright => "carbery-wright",
            Suite::Moments => "moments",
            Suite::ReversePoincare => "reverse-poincare",
            Suite::Poincare => "poincare",
            Suite::DensityVariance => "density-variance",
            Suite::EstimateConstant => "estimate-constant",
            Suite::All => "all",
        }
    }
}

/// Flat experiment configuration. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    /// Full measure descriptor; takes precedence over the flag-built one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<LogConcaveMeasure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    /// Direction components for reverse-poincare (normalized on use).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<f64>>,
    /// Delta grid spec, e.g. "1e-3:1e-1:10log" or "0.1,0.2,0.5".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<String>,
    /// Threshold grid for carbery-wright, same syntax as deltas.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_json: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

impl ExperimentConfig {
    /// Overlay `other` (flag values) on top of `self` (file values).
    pub fn overlay(mut self, other: ExperimentConfig) -> ExperimentConfig {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field; })*
            };
        }
        take!(
            suite, measure, f, g, h, e, deltas, t_grid, q, d, trials, coefficient_scale, n, seed,
            bins, out_json, out_csv, svg
        );
        self
    }
}

/// Parse a grid spec: either "lo:hi:COUNTlog" / "lo:hi:COUNTlin" or a
/// comma-separated list of values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid '{spec}' must be lo:hi:COUNT[log|lin]"));
        }
        let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid start '{}'", parts[0]))?;
        let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid end '{}'", parts[1]))?;
        let (count_str, log) = if let Some(c) = parts[2].strip_suffix("log") {
            (c, true)
        } else if let Some(c) = parts[2].strip_suffix("lin") {
            (c, false)
        } else {
            (parts[2], false)
        };
        let count: usize = count_str.parse().map_err(|_| format!("bad grid count '{count_str}'"))?;
        if count < 2 || !(hi > lo) {
            return Err(format!("grid '{spec}' needs hi > lo and count >= 2"));
        }
        if log {
            if !(lo > 0.0) {
                return Err("log grid needs lo > 0".into());
            }
            Ok((0..count)
                .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (count - 1) as f64).exp())
                .collect())
        } else {
            Ok((0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect())
        }
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad grid value '{s}'")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        let g = parse_grid("1e-3:1e-1:10log").unwrap();
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1e-3).abs() < 1e-12);
        assert!((g[9] - 1e-1).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));

        let lin = parse_grid("0:1:5lin").unwrap();
        assert_eq!(lin, vec![0.0, 0.25, 0.5, 0.75, 1.0]);

        let list = parse_grid("0.1, 0.2, 0.5").unwrap();
        assert_eq!(list, vec![0.1, 0.2, 0.5]);

        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("x").is_err());
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let r: Result<ExperimentConfig, _> = serde_json::from_str(r#"{"suite":"sweep","bogus":1}"#);
        assert!(r.is_err());
    }

    #[test]
    fn overlay_prefers_flag_values() {
        let file: ExperimentConfig =
            serde_json::from_str(r#"{"suite":"sweep","n":1000,"seed":1}"#).unwrap();
        let flags = ExperimentConfig { n: Some(5000), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.n, Some(5000));
        assert_eq!(merged.seed, Some(1));
        assert_eq!(merged.suite, Some(Suite::Sweep));
    }
}
