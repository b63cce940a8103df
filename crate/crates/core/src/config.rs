//! Experiment configuration.
//!
//! A config file is TOML restricted to the sections below; unknown sections
//! and keys are rejected. See `docs/config.md` for the grammar.
//!
//! ```toml
//! [system]
//! n = 1
//! p = [2, "3/2"]
//!
//! [data]
//! shape = "gaussian"
//! amplitude = 1.0
//! width = 1.0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::campaign::{Campaign, Experiment};
use crate::chain::LaplacianFactor;
use crate::error::{Error, Result};
use crate::exponents::{parse_rational, SystemParams};
use crate::ode::OdeSystemSpec;
use crate::pde::{InitialData, Shape};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn text(&self) -> String {
        match self {
            Number::Int(v) => v.to_string(),
            Number::Float(v) => v.to_string(),
            Number::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn expand(&self, k: usize) -> Result<Vec<f64>> {
        match self {
            OneOrMany::One(v) => Ok(vec![*v; k]),
            OneOrMany::Many(v) if v.len() == k => Ok(v.clone()),
            OneOrMany::Many(v) => Err(Error::Config(format!("expected {k} values, got {}", v.len()))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub n: u32,
    pub p: Vec<Number>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(default = "default_shape")]
    pub shape: String,
    #[serde(default = "default_one")]
    pub amplitude: OneOrMany,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default)]
    pub center: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub h: Option<f64>,
    pub outer: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub horizon: Option<f64>,
    pub eps: Option<f64>,
    pub eta: Option<f64>,
    pub diffusion_fraction: Option<f64>,
    /// `"doubled"` or `"sharp"`.
    pub factor: Option<String>,
    /// One-based.
    pub j0: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeSection {
    pub coefficients: Option<OneOrMany>,
    #[serde(default)]
    pub lambda_tilde: f64,
    pub initial: OneOrMany,
    #[serde(default = "default_ode_horizon")]
    pub horizon: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    pub eps_min: f64,
    pub eps_max: f64,
    pub points: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub jitter: f64,
    pub slope_tolerance: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestfnSection {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl Default for TestfnSection {
    fn default() -> Self {
        Self { radii: default_radii(), points: default_points() }
    }
}

fn default_shape() -> String {
    "gaussian".into()
}
fn default_one() -> OneOrMany {
    OneOrMany::One(1.0)
}
fn one() -> f64 {
    1.0
}
fn default_ode_horizon() -> f64 {
    100.0
}
fn default_rel_tol() -> f64 {
    1e-8
}
fn default_replicates() -> usize {
    1
}
fn default_radii() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 8.0]
}
fn default_points() -> usize {
    201
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemSection,
    pub data: Option<DataSection>,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub run: RunSection,
    pub ode: Option<OdeSection>,
    pub campaign: Option<CampaignSection>,
    #[serde(default)]
    pub testfn: TestfnSection,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn params(&self) -> Result<SystemParams> {
        let p = self
            .system
            .p
            .iter()
            .map(|v| parse_rational(&v.text()))
            .collect::<Result<Vec<_>>>()?;
        SystemParams::new(self.system.n, p)
    }

    pub fn factor(&self) -> Result<LaplacianFactor> {
        match self.run.factor.as_deref() {
            None | Some("doubled") => Ok(LaplacianFactor::Doubled),
            Some("sharp") => Ok(LaplacianFactor::Sharp),
            Some(other) => Err(Error::Config(format!("factor must be \"doubled\" or \"sharp\", got {other:?}"))),
        }
    }

    pub fn initial_data(&self) -> Result<InitialData> {
        let k = self.params()?.k();
        let d = self
            .data
            .as_ref()
            .ok_or_else(|| Error::Config("missing [data] section".into()))?;
        let shape = match d.shape.as_str() {
            "gaussian" => Shape::Gaussian,
            "bump" => Shape::Bump,
            other => return Err(Error::Config(format!("unknown shape {other:?}"))),
        };
        InitialData::new(shape, d.amplitude.expand(k)?, d.width, d.center)
    }

    pub fn experiment(&self) -> Result<Experiment> {
        let mut exp = Experiment::new(self.params()?, self.initial_data()?)?;
        if let Some(h) = self.mesh.h {
            if !(h > 0.0) {
                return Err(Error::Config("mesh.h must be positive".into()));
            }
            exp.h = h;
        }
        exp.outer = self.mesh.outer;
        exp.horizon = self.run.horizon;
        if let Some(eta) = self.run.eta {
            exp.eta = eta;
        }
        if let Some(d) = self.run.diffusion_fraction {
            exp.diffusion_fraction = d;
        }
        exp.factor = self.factor()?;
        exp.j0 = match self.run.j0 {
            Some(0) => return Err(Error::Config("run.j0 is one-based".into())),
            Some(j) => Some(j - 1),
            None => None,
        };
        Ok(exp)
    }

    pub fn eps(&self) -> f64 {
        self.run.eps.unwrap_or(1.0)
    }

    pub fn ode_spec(&self) -> Result<(OdeSystemSpec, f64, f64)> {
        let params = self.params()?;
        let k = params.k();
        let o = self
            .ode
            .as_ref()
            .ok_or_else(|| Error::Config("missing [ode] section".into()))?;
        let coefficients = match &o.coefficients {
            Some(c) => c.expand(k)?,
            None => vec![1.0; k],
        };
        let spec = OdeSystemSpec::new(params.p_f64(), coefficients, o.lambda_tilde, o.initial.expand(k)?)?;
        Ok((spec, o.horizon, o.rel_tol))
    }

    /// Campaign with `seed` and `jobs` taken from the arguments when given.
    pub fn campaign(&self, seed: Option<u64>, jobs: Option<usize>) -> Result<Campaign> {
        let c = self
            .campaign
            .as_ref()
            .ok_or_else(|| Error::Config("missing [campaign] section".into()))?;
        let mut out = Campaign::new(self.experiment()?, c.eps_min, c.eps_max, c.points);
        out.replicates = c.replicates;
        out.jitter = c.jitter;
        if let Some(t) = c.slope_tolerance {
            out.slope_tolerance = t;
        }
        out.seed = seed.or(c.seed).unwrap_or(0);
        out.jobs = jobs.unwrap_or(0);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::rat;

    const FULL: &str = r#"
[system]
n = 1
p = [2, "3/2", 2.5]

[data]
shape = "bump"
amplitude = [1.0, 2.0, 0.5]
width = 2.0

[mesh]
h = 0.01

[run]
eps = 0.5
factor = "sharp"
j0 = 2

[ode]
initial = [0.0, 5.0, 0.0]
lambda_tilde = 1.0

[campaign]
eps_min = 0.01
eps_max = 1.0
points = 7
"#;

    #[test]
    fn parses_every_section() {
        let c = Config::parse(FULL).unwrap();
        let params = c.params().unwrap();
        assert_eq!(params.exponents(), &[rat(2, 1), rat(3, 2), rat(5, 2)]);
        let exp = c.experiment().unwrap();
        assert_eq!(exp.h, 0.01);
        assert_eq!(exp.j0, Some(1));
        assert_eq!(exp.factor, LaplacianFactor::Sharp);
        assert_eq!(exp.data.amplitude, vec![1.0, 2.0, 0.5]);
        assert_eq!(c.eps(), 0.5);
        let (spec, horizon, tol) = c.ode_spec().unwrap();
        assert_eq!(spec.coefficients, vec![1.0; 3]);
        assert_eq!((horizon, tol), (100.0, 1e-8));
        let camp = c.campaign(Some(3), None).unwrap();
        assert_eq!((camp.points, camp.seed), (7, 3));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("[system]\nn = 1\np = [2]\nq = 3\n").is_err());
        assert!(Config::parse("[system]\nn = 1\np = [2]\n[extra]\n").is_err());
        let c = Config::parse("[system]\nn = 1\np = [2, 3]\n[data]\namplitude = [1.0]\n").unwrap();
        assert!(c.initial_data().is_err());
        let c = Config::parse("[system]\nn = 1\np = [2]\n[run]\nfactor = \"triple\"\n").unwrap();
        assert!(c.factor().is_err());
        let c = Config::parse("[system]\nn = 1\np = [\"x\"]\n").unwrap();
        assert!(c.params().is_err());
    }

    #[test]
    fn scalar_amplitude_broadcasts() {
        let c = Config::parse("[system]\nn = 2\np = [2, 3]\n[data]\namplitude = 3.0\n").unwrap();
        assert_eq!(c.initial_data().unwrap().amplitude, vec![3.0, 3.0]);
    }
}
