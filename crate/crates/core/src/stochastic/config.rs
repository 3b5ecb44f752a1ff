use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::parse_kappa;
use crate::homology::Field;
use crate::io::float_or_inf;

/// Experiments available to [`super::run_experiment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Slln,
    Mass,
    Clt,
    Support,
    Stability,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [Self::Slln, Self::Mass, Self::Clt, Self::Support, Self::Stability];

    pub fn name(self) -> &'static str {
        match self {
            Self::Slln => "slln",
            Self::Mass => "mass",
            Self::Clt => "clt",
            Self::Support => "support",
            Self::Stability => "stability",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(vec![format!("experiment: unknown name `{s}`")]))
    }
}

/// Point process driving an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProcessSpec {
    Poisson {
        lambda: f64,
    },
    /// Marks uniform on `[0, r0]`.
    MarkedPoisson {
        lambda: f64,
        r0: f64,
    },
    PerturbedLattice {
        jitter: f64,
    },
}

impl ProcessSpec {
    /// Expected number of points per unit volume.
    pub fn intensity(&self) -> f64 {
        match *self {
            Self::Poisson { lambda } | Self::MarkedPoisson { lambda, .. } => lambda,
            Self::PerturbedLattice { .. } => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub l: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    pub r: f64,
    pub s: f64,
}

fn infinite() -> f64 {
    f64::INFINITY
}

fn default_field() -> u32 {
    2
}

/// Experiment configuration, read from JSON.
///
/// `t_max` accepts a number or `"inf"` and defaults to ∞. `seed` may be left
/// out when it is supplied separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    pub kappa: String,
    pub q: usize,
    pub dim: usize,
    pub windows: Vec<f64>,
    #[serde(with = "float_or_inf", default = "infinite")]
    pub t_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    pub replications: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<QuerySpec>,
    /// Perturbation radius for the stability experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Window whose standardized sample is tested for normality (defaults to the largest).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normality_window: Option<f64>,
    #[serde(default = "default_field")]
    pub field: u32,
}

impl ExperimentConfig {
    /// Parses JSON; syntax and schema problems come back as [`Error::Config`].
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(vec![format!("config: {e}")]))
    }

    pub fn field(&self) -> Result<Field> {
        Field::new(self.field)
    }

    /// Checks the fields shared by every experiment, then the ones specific to
    /// `experiment`. All problems are reported together.
    pub fn validate(&self, experiment: Experiment) -> Result<()> {
        let mut bad = Vec::new();
        let mut flag = |field: &str, msg: String| bad.push(format!("{field}: {msg}"));

        match self.process {
            ProcessSpec::Poisson { lambda } | ProcessSpec::MarkedPoisson { lambda, .. }
                if !(lambda > 0.0 && lambda.is_finite()) =>
            {
                flag("process.lambda", format!("{lambda} must be positive and finite"))
            }
            _ => {}
        }
        if let ProcessSpec::MarkedPoisson { r0, .. } = self.process {
            if !(r0 >= 0.0 && r0.is_finite()) {
                flag("process.r0", format!("{r0} must be finite and >= 0"));
            }
        }
        if let ProcessSpec::PerturbedLattice { jitter } = self.process {
            if !(0.0..0.5).contains(&jitter) {
                flag("process.jitter", format!("{jitter} must lie in [0, 0.5)"));
            }
        }
        let kappa = parse_kappa(&self.kappa);
        if let Err(e) = &kappa {
            flag("kappa", e.to_string());
        }
        if self.dim == 0 {
            flag("dim", "must be >= 1".into());
        }
        if self.windows.is_empty() {
            flag("windows", "at least one window is required".into());
        }
        if let Some(w) = self.windows.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            flag("windows", format!("side {w} must be positive and finite"));
        }
        if self.t_max.is_nan() || self.t_max < 0.0 {
            flag("t_max", format!("{} must be >= 0", self.t_max));
        }
        if self.replications == 0 {
            flag("replications", "must be >= 1".into());
        }
        if self.seed.is_none() {
            flag("seed", "no seed given".into());
        }
        if let Err(e) = self.field() {
            flag("field", e.to_string());
        }
        if let Some(g) = self.grid {
            if let Err(e) = crate::diagram::BinnedMeasure::zero(g.l, g.h, 1.0, self.t_max) {
                flag("grid", e.to_string());
            } else if self.t_max > g.l {
                flag("t_max", format!("{} exceeds grid L = {}", self.t_max, g.l));
            }
        }
        if let Some(eps) = self.epsilon {
            if !(eps >= 0.0 && eps.is_finite()) {
                flag("epsilon", format!("{eps} must be finite and >= 0"));
            }
        }
        if let Some(nw) = self.normality_window {
            if !self.windows.contains(&nw) {
                flag("normality_window", format!("{nw} is not one of the windows"));
            }
        }

        match experiment {
            Experiment::Slln => {
                if self.windows.len() < 2 {
                    flag("windows", "the SLLN experiment needs at least 2 windows".into());
                }
                if self.replications < 2 {
                    flag(
                        "replications",
                        "the SLLN experiment needs at least 2 replications".into(),
                    );
                }
                if self.grid.is_none() {
                    flag("grid", "required for the SLLN experiment".into());
                }
                if self.t_max.is_infinite() {
                    flag("t_max", "must be finite for the SLLN experiment".into());
                }
            }
            Experiment::Mass => {
                if self.q >= 1 && self.t_max.is_finite() {
                    flag(
                        "t_max",
                        "total mass in degree >= 1 needs the untruncated diagram; omit t_max".into(),
                    );
                }
            }
            Experiment::Clt => match self.query {
                None => flag("query", "required for the CLT experiment".into()),
                Some(QuerySpec { r, s }) => {
                    for (name, v) in [("query.r", r), ("query.s", s)] {
                        if !(v >= 0.0 && v <= self.t_max && v.is_finite()) {
                            flag(name, format!("{v} must lie in [0, t_max]"));
                        }
                    }
                }
            },
            Experiment::Support => {
                if self.kappa != "cech" {
                    flag("kappa", "the support check is defined for unmarked `cech`".into());
                }
                if self.dim != 2 {
                    flag("dim", "the support check is defined for dim = 2".into());
                }
            }
            Experiment::Stability => {
                if let Ok(k) = &kappa {
                    if k.lipschitz().is_none() {
                        flag("kappa", format!("`{}` has no Lipschitz constant", self.kappa));
                    }
                }
                if self.epsilon.is_none() {
                    flag("epsilon", "required for the stability experiment".into());
                }
                if self.t_max.is_finite() {
                    flag(
                        "t_max",
                        "the stability experiment compares untruncated diagrams; omit t_max".into(),
                    );
                }
                if self.q > 2 {
                    flag("q", "the stability experiment supports q <= 2".into());
                }
            }
        }

        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SLLN: &str = r#"{
        "process": {"kind": "poisson", "lambda": 1.0},
        "kappa": "rips", "q": 1, "dim": 2, "windows": [8, 24],
        "t_max": 1.5, "grid": {"L": 2.0, "h": 0.25},
        "replications": 20, "seed": 17
    }"#;

    #[test]
    fn parses_and_validates() {
        let c = ExperimentConfig::from_json(SLLN).unwrap();
        assert_eq!(c.process, ProcessSpec::Poisson { lambda: 1.0 });
        assert_eq!(c.grid, Some(GridSpec { l: 2.0, h: 0.25 }));
        c.validate(Experiment::Slln).unwrap();
    }

    #[test]
    fn infinite_threshold_round_trips() {
        let mut c = ExperimentConfig::from_json(SLLN).unwrap();
        c.t_max = f64::INFINITY;
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains(r#""t_max":"inf""#));
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn offending_fields_are_listed() {
        let mut c = ExperimentConfig::from_json(SLLN).unwrap();
        c.replications = 1;
        c.kappa = "nope".into();
        c.t_max = 3.0;
        let Err(Error::Config(msgs)) = c.validate(Experiment::Slln) else {
            panic!("expected config error")
        };
        for field in ["replications", "kappa", "t_max"] {
            assert!(
                msgs.iter().any(|m| m.starts_with(field)),
                "{field} missing from {msgs:?}"
            );
        }
    }

    #[test]
    fn experiment_specific_requirements() {
        let c = ExperimentConfig::from_json(SLLN).unwrap();
        assert!(c.validate(Experiment::Clt).is_err());
        assert!(c.validate(Experiment::Mass).is_err());
        assert!(c.validate(Experiment::Support).is_err());
        assert!(c.validate(Experiment::Stability).is_err());
    }

    #[test]
    fn unknown_fields_and_names_rejected() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"bogus": 1}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!("nope".parse::<Experiment>(), Err(Error::Config(_))));
        assert_eq!("clt".parse::<Experiment>().unwrap(), Experiment::Clt);
    }
}
