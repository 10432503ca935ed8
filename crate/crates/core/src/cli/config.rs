//! Run configuration: a JSON document validated against every precondition
//! of the operations it will drive.

use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalCase;
use crate::error::{Error, Result};
use crate::field::{Perturbation, QuadraticFactor};
use crate::quadverify::MIN_RESOLUTION;

pub const MAX_AMPLITUDE: f64 = 0.05;
pub const MAX_RESOLUTION: usize = 64;
pub const MAX_SAMPLES: usize = 10_000;
pub const MAX_SWEEP_CELLS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Canonical,
    Identities,
    Sweep,
    Cone,
}

/// Which conformal factor a run examines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    /// The factor built from `case`, `sigma` and `h`.
    #[default]
    Canonical,
    Quadratic { a: f64, c: f64, y: Vec<f64> },
    /// `(1 + |x|^2)/2 + amplitude * shape` unless another base is given.
    Perturbed {
        shape: Perturbation,
        amplitude: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<QuadraticFactor>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JetMode {
    #[default]
    Analytic,
    /// Central differences at `step`, compared against `step / 2`.
    FiniteDifference { step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Interior pointwise identities.
    #[serde(default = "default_pointwise")]
    pub pointwise: f64,
    /// Boundary identities, which include one tangential difference quotient.
    #[serde(default = "default_boundary")]
    pub boundary: f64,
    #[serde(default = "default_quadrature")]
    pub quadrature: f64,
}

fn default_pointwise() -> f64 {
    1e-8
}
fn default_boundary() -> f64 {
    1e-7
}
fn default_quadrature() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { pointwise: default_pointwise(), boundary: default_boundary(), quadrature: default_quadrature() }
    }
}

/// `count` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub cases: Vec<CanonicalCase>,
    pub sigma: Grid,
    pub h: Grid,
    /// Defaults to the configured `k` alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    /// Query text, see [`crate::cli::parse_cone_queries`].
    pub queries: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Ambient dimension n+1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<CanonicalCase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default)]
    pub field: FieldSpec,
    #[serde(default)]
    pub jets: JetMode,
    #[serde(default = "default_resolution")]
    pub quadrature_n: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_samples")]
    pub sample_points: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_resolution() -> usize {
    32
}
fn default_samples() -> usize {
    20
}

fn bad<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

/// Parses and structurally validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Argument(format!("config: {e}")))?;
    cfg.validate_common()?;
    Ok(cfg)
}

fn positive_finite(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return bad(format!("{name} must be positive and finite, got {v}"));
    }
    Ok(())
}

impl RunConfig {
    fn validate_common(&self) -> Result<()> {
        if let Some(d) = self.dimension {
            if !(3..=5).contains(&d) {
                return bad(format!("dimension must be 3, 4 or 5, got {d}"));
            }
            if let Some(k) = self.k {
                if k == 0 || k >= d {
                    return bad(format!("k must lie in 1..={} for dimension {d}, got {k}", d - 1));
                }
            }
        }
        for (name, v) in [("sigma", self.sigma), ("h", self.h)] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return bad(format!("{name} must be finite"));
                }
            }
        }
        if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&self.quadrature_n) {
            return bad(format!("quadrature_n must lie in {MIN_RESOLUTION}..={MAX_RESOLUTION}, got {}", self.quadrature_n));
        }
        positive_finite("tolerances.pointwise", self.tolerances.pointwise)?;
        positive_finite("tolerances.boundary", self.tolerances.boundary)?;
        positive_finite("tolerances.quadrature", self.tolerances.quadrature)?;
        if self.sample_points == 0 || self.sample_points > MAX_SAMPLES {
            return bad(format!("sample_points must lie in 1..={MAX_SAMPLES}"));
        }
        if let JetMode::FiniteDifference { step } = self.jets {
            positive_finite("jets.step", step)?;
            if step > 0.1 {
                return bad(format!("jets.step {step} is too coarse (at most 0.1)"));
            }
        }
        match &self.field {
            FieldSpec::Canonical => {}
            FieldSpec::Quadratic { a, c, y } => {
                if !(a.is_finite() && c.is_finite() && y.iter().all(|v| v.is_finite())) {
                    return bad("quadratic coefficients must be finite");
                }
                self.check_len("field.y", y.len())?;
            }
            FieldSpec::Perturbed { amplitude, base, .. } => {
                if !(amplitude.is_finite() && amplitude.abs() <= MAX_AMPLITUDE) {
                    return bad(format!("perturbation amplitude must satisfy |amplitude| <= {MAX_AMPLITUDE}"));
                }
                if let Some(b) = base {
                    if !(b.a.is_finite() && b.c.is_finite() && b.y.iter().all(|v| v.is_finite())) {
                        return bad("base coefficients must be finite");
                    }
                    self.check_len("field.base.y", b.y.len())?;
                }
            }
        }
        if let Some(s) = &self.sweep {
            if s.cases.is_empty() {
                return bad("sweep.cases is empty");
            }
            for (name, g) in [("sweep.sigma", s.sigma), ("sweep.h", s.h)] {
                if g.count == 0 || !g.min.is_finite() || !g.max.is_finite() || g.min > g.max {
                    return bad(format!("{name} needs count >= 1 and finite min <= max"));
                }
            }
            let ks = s.ks.as_ref().map_or(1, |v| v.len());
            if ks == 0 {
                return bad("sweep.ks is empty");
            }
            let cells = s.sigma.count.saturating_mul(s.h.count).saturating_mul(ks).saturating_mul(s.cases.len());
            if cells > MAX_SWEEP_CELLS {
                return bad(format!("sweep has {cells} cells, limit {MAX_SWEEP_CELLS}"));
            }
        }
        Ok(())
    }

    fn check_len(&self, name: &str, len: usize) -> Result<()> {
        match self.dimension {
            Some(d) if d != len => bad(format!("{name} has {len} coordinates, dimension is {d}")),
            _ => Ok(()),
        }
    }

    pub fn require_dimension(&self) -> Result<usize> {
        self.dimension.map_or_else(|| bad("dimension is required"), Ok)
    }

    pub fn require_k(&self) -> Result<usize> {
        self.k.map_or_else(|| bad("k is required"), Ok)
    }

    /// `(case, sigma, h)`, all required.
    pub fn require_targets(&self) -> Result<(CanonicalCase, f64, f64)> {
        match (self.case, self.sigma, self.h) {
            (Some(c), Some(s), Some(h)) => Ok((c, s, h)),
            _ => bad("case, sigma and h are required"),
        }
    }

    /// Checks that everything `command` needs is present.
    pub fn validate_for(&self, command: Command) -> Result<()> {
        self.validate_common()?;
        match command {
            Command::Canonical => {
                self.require_dimension()?;
                self.require_k()?;
                self.require_targets()?;
            }
            Command::Identities => {
                self.require_dimension()?;
                self.require_k()?;
                if self.field == FieldSpec::Canonical {
                    self.require_targets()?;
                }
            }
            Command::Sweep => {
                self.require_dimension()?;
                if self.sweep.is_none() {
                    return bad("sweep section is required");
                }
                if self.sweep.as_ref().is_some_and(|s| s.ks.is_none()) {
                    self.require_k()?;
                }
                let d = self.require_dimension()?;
                for &k in self.sweep.as_ref().and_then(|s| s.ks.as_ref()).into_iter().flatten() {
                    if k == 0 || k >= d {
                        return bad(format!("sweep k = {k} outside 1..={}", d - 1));
                    }
                }
            }
            Command::Cone => {
                if self.cone.is_none() {
                    return bad("cone section is required");
                }
            }
        }
        Ok(())
    }
}
