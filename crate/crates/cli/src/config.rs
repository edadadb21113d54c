//! Experiment configuration: a TOML file whose sections are all optional.
//!
//! Unknown keys are rejected. Missing keys take the per-experiment defaults
//! of [`ExperimentConfig::defaults`]; the fully resolved configuration is what
//! gets hashed into the CSV provenance header.
//!
//! ```toml
//! experiment = "frontier"   # optional; must match the subcommand
//! seed = 7                  # mandatory in files for `cascade` and `lines`
//!
//! [grid]
//! dim = 1                   # 1 or 3
//! n = 2048                  # sites per axis (power of two)
//! dx = 0.01
//!
//! [system]
//! kind = "dirac"            # "dirac" or "weyl"
//! mass = 1.0
//! chirality = "+"           # "+" or "-"
//!
//! [state]
//! recipe = "bump"           # bump | tent | late-change | gaussian | shell | random
//! center = 0.0
//! width = 0.5
//! tau = 0.0                 # tent construction time shift
//! delta = 0.0               # tent space shift / contraction strip half width
//! orientation = "+"         # late-change orientation ς
//! sigma = 0.12              # momentum width of gaussian / random states
//! count = 50                # number of random states
//! slice = 0.4               # late-change slice width
//! r_in = 1.0                # momentum shell radii of the shell recipe
//! r_out = 2.0
//!
//! [region]
//! radius = 1.0              # ball radius of localization regions
//!
//! [schedule]
//! times = [0.0, 0.5]        # explicit times (otherwise t_max / steps)
//! t_max = 2.0
//! steps = 40
//! rhos = [0.5, 1.0]
//! ns = [1.0, 2.0]
//!
//! [tolerances]
//! edge = 1e-6               # support-edge tail mass τ
//! tent_cells = 2.0          # tent residual bound in grid cells
//! norm = 1e-10
//! leak = 1e-8
//! probability = 1e-5
//! pol = 1e-12
//! z = 3.0                   # |z-score| bound of Monte Carlo targets
//! negative = 0.05           # negative-energy fraction bound
//! energy = 0.02             # relative energy-growth error bound
//!
//! [lines]
//! samples = 10000000
//! half_width = 2.0
//! target = "2pi2over9"      # 2pi2over9 | 4pi2over45 | a number
//! ```
//!
//! For `radial`, `grid.n` is the number of radial nodes and `state.width`
//! the support radius of the profile.

use std::f64::consts::PI;

use causalab::algebra::{Kind, Sign};
use causalab::{Error, Result};
use serde::{Deserialize, Serialize};

/// The experiments exposed as subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Evolve,
    Frontier,
    Boost,
    Contract,
    Radial,
    Pol,
    Cascade,
    Lattice,
    Lines,
    Selftest,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Evolve => "evolve",
            Experiment::Frontier => "frontier",
            Experiment::Boost => "boost",
            Experiment::Contract => "contract",
            Experiment::Radial => "radial",
            Experiment::Pol => "pol",
            Experiment::Cascade => "cascade",
            Experiment::Lattice => "lattice",
            Experiment::Lines => "lines",
            Experiment::Selftest => "selftest",
        }
    }

    /// Experiments driven by a random number generator.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Experiment::Cascade | Experiment::Lines)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: Option<usize>,
    pub n: Option<usize>,
    pub dx: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub kind: Option<String>,
    pub mass: Option<f64>,
    pub chirality: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub recipe: Option<String>,
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub tau: Option<f64>,
    pub delta: Option<f64>,
    pub orientation: Option<String>,
    pub sigma: Option<f64>,
    pub count: Option<usize>,
    pub slice: Option<f64>,
    pub r_in: Option<f64>,
    pub r_out: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSection {
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub times: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub rhos: Option<Vec<f64>>,
    pub ns: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub edge: Option<f64>,
    pub tent_cells: Option<f64>,
    pub norm: Option<f64>,
    pub leak: Option<f64>,
    pub probability: Option<f64>,
    pub pol: Option<f64>,
    pub z: Option<f64>,
    pub negative: Option<f64>,
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinesSection {
    pub samples: Option<u64>,
    pub half_width: Option<f64>,
    pub target: Option<String>,
}

/// A (possibly partial) experiment configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub region: RegionSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub lines: LinesSection,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::ConfigError(msg.into())
}

macro_rules! fill {
    ($dst:expr, $src:expr) => {
        if $dst.is_none() {
            $dst = $src;
        }
    };
}

impl ExperimentConfig {
    /// Parse a TOML document, rejecting unknown keys.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| cfg_err(e.to_string()))
    }

    /// Built-in defaults of an experiment (a complete configuration).
    pub fn defaults(exp: Experiment) -> Self {
        Self::defaults_for(exp, None)
    }

    /// Defaults of an experiment for a given state recipe (the `pol`
    /// experiment's `shell` recipe needs a momentum-resolving grid).
    pub fn defaults_for(exp: Experiment, recipe: Option<&str>) -> Self {
        let mut c = ExperimentConfig {
            experiment: Some(exp.name().into()),
            tolerances: Tolerances {
                edge: Some(1e-6),
                tent_cells: Some(2.0),
                norm: Some(1e-10),
                leak: Some(1e-8),
                probability: Some(1e-5),
                pol: Some(1e-12),
                z: Some(3.0),
                negative: Some(0.05),
                energy: Some(0.02),
            },
            ..Default::default()
        };
        let dirac = SystemSection { kind: Some("dirac".into()), mass: Some(1.0), chirality: None };
        let one_d = GridSection { dim: Some(1), n: Some(2048), dx: Some(0.01) };
        match exp {
            Experiment::Evolve => {
                c.grid = one_d;
                c.system = dirac;
                c.state = StateSection {
                    recipe: Some("bump".into()),
                    center: Some(0.0),
                    width: Some(1.0),
                    ..Default::default()
                };
                c.schedule = ScheduleSection { t_max: Some(2.0), steps: Some(8), ..Default::default() };
            }
            Experiment::Frontier => {
                c.grid = one_d;
                c.system = dirac;
                c.state = StateSection {
                    recipe: Some("tent".into()),
                    center: Some(0.0),
                    width: Some(0.5),
                    tau: Some(0.2),
                    delta: Some(0.3),
                    ..Default::default()
                };
                c.schedule = ScheduleSection { t_max: Some(3.0), steps: Some(40), ..Default::default() };
            }
            Experiment::Boost | Experiment::Contract => {
                c.grid = one_d;
                c.system = dirac;
                c.state = StateSection {
                    recipe: Some("late-change".into()),
                    center: Some(0.0),
                    width: Some(0.5),
                    slice: Some(0.4),
                    delta: (exp == Experiment::Contract).then_some(0.1),
                    orientation: Some("+".into()),
                    ..Default::default()
                };
                c.schedule = ScheduleSection {
                    rhos: Some(if exp == Experiment::Boost {
                        vec![0.5, 1.0, 2.0, 3.0]
                    } else {
                        vec![0.0, 0.5, 1.0, 2.0, 3.0]
                    }),
                    ..Default::default()
                };
                if exp == Experiment::Contract {
                    c.tolerances.probability = Some(1e-3);
                }
            }
            Experiment::Radial => {
                c.grid = GridSection { dim: Some(3), n: Some(4096), dx: None };
                c.system = SystemSection { kind: Some("weyl".into()), mass: None, chirality: Some("+".into()) };
                c.state = StateSection { recipe: Some("bump".into()), width: Some(1.0), ..Default::default() };
                c.schedule = ScheduleSection {
                    times: Some(vec![-40.0, -10.0, -5.0, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 40.0]),
                    ..Default::default()
                };
                c.tolerances.probability = Some(1e-3);
            }
            Experiment::Pol if recipe == Some("shell") => {
                c.grid = GridSection { dim: Some(3), n: Some(64), dx: Some(2.0 * PI / 6.4) };
                c.system = dirac;
                c.state = StateSection {
                    recipe: Some("shell".into()),
                    r_in: Some(1.0),
                    r_out: Some(2.0),
                    ..Default::default()
                };
                c.schedule = ScheduleSection {
                    ns: Some(vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]),
                    ..Default::default()
                };
            }
            Experiment::Pol => {
                c.grid = GridSection { dim: Some(3), n: Some(64), dx: Some(4.0) };
                c.system = dirac;
                c.state = StateSection { recipe: Some("gaussian".into()), sigma: Some(0.12), ..Default::default() };
                c.region = RegionSection { radius: Some(1.0) };
                c.schedule = ScheduleSection {
                    ns: Some(vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]),
                    ..Default::default()
                };
                c.tolerances.probability = Some(0.01);
            }
            Experiment::Cascade => {
                c.seed = Some(1);
                c.grid = GridSection { dim: Some(3), n: Some(32), dx: Some(0.25) };
                c.system = dirac;
                c.state = StateSection {
                    recipe: Some("random".into()),
                    sigma: Some(1.5),
                    count: Some(50),
                    ..Default::default()
                };
                c.region = RegionSection { radius: Some(1.0) };
                c.schedule = ScheduleSection { steps: Some(8), ..Default::default() };
            }
            Experiment::Lattice => {}
            Experiment::Lines => {
                c.seed = Some(2024);
                c.lines = LinesSection {
                    samples: Some(10_000_000),
                    half_width: Some(2.0),
                    target: Some("2pi2over9".into()),
                };
            }
            Experiment::Selftest => {
                c.seed = Some(1);
            }
        }
        c
    }

    /// Fill every unset key from `base`.
    pub fn merged_over(mut self, base: &Self) -> Self {
        let b = base.clone();
        fill!(self.experiment, b.experiment);
        fill!(self.seed, b.seed);
        fill!(self.grid.dim, b.grid.dim);
        fill!(self.grid.n, b.grid.n);
        fill!(self.grid.dx, b.grid.dx);
        fill!(self.system.kind, b.system.kind);
        fill!(self.system.mass, b.system.mass);
        fill!(self.system.chirality, b.system.chirality);
        fill!(self.state.recipe, b.state.recipe);
        fill!(self.state.center, b.state.center);
        fill!(self.state.width, b.state.width);
        fill!(self.state.tau, b.state.tau);
        fill!(self.state.delta, b.state.delta);
        fill!(self.state.orientation, b.state.orientation);
        fill!(self.state.sigma, b.state.sigma);
        fill!(self.state.count, b.state.count);
        fill!(self.state.slice, b.state.slice);
        fill!(self.state.r_in, b.state.r_in);
        fill!(self.state.r_out, b.state.r_out);
        fill!(self.region.radius, b.region.radius);
        fill!(self.schedule.times, b.schedule.times);
        fill!(self.schedule.t_max, b.schedule.t_max);
        fill!(self.schedule.steps, b.schedule.steps);
        fill!(self.schedule.rhos, b.schedule.rhos);
        fill!(self.schedule.ns, b.schedule.ns);
        fill!(self.tolerances.edge, b.tolerances.edge);
        fill!(self.tolerances.tent_cells, b.tolerances.tent_cells);
        fill!(self.tolerances.norm, b.tolerances.norm);
        fill!(self.tolerances.leak, b.tolerances.leak);
        fill!(self.tolerances.probability, b.tolerances.probability);
        fill!(self.tolerances.pol, b.tolerances.pol);
        fill!(self.tolerances.z, b.tolerances.z);
        fill!(self.tolerances.negative, b.tolerances.negative);
        fill!(self.tolerances.energy, b.tolerances.energy);
        fill!(self.lines.samples, b.lines.samples);
        fill!(self.lines.half_width, b.lines.half_width);
        fill!(self.lines.target, b.lines.target);
        self
    }

    /// Resolve a user configuration (if any) against the experiment
    /// defaults. Stochastic experiments need an explicit seed in a file.
    pub fn resolve(user: Option<Self>, exp: Experiment) -> Result<Self> {
        let Some(user) = user else {
            return Ok(Self::defaults(exp));
        };
        let defaults = Self::defaults_for(exp, user.state.recipe.as_deref());
        if let Some(name) = &user.experiment {
            if name != exp.name() {
                return Err(cfg_err(format!("config is for experiment '{name}', not '{}'", exp.name())));
            }
        }
        if exp.is_stochastic() && user.seed.is_none() {
            return Err(cfg_err(format!("experiment '{}' needs a seed", exp.name())));
        }
        Ok(user.merged_over(&defaults))
    }

    /// Canonical TOML text of the configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn system(&self) -> Result<Kind> {
        match self.system.kind.as_deref() {
            Some("dirac") => {
                let m = self.system.mass.unwrap_or(1.0);
                if !(m >= 0.0 && m.is_finite()) {
                    return Err(cfg_err(format!("mass {m} must be ≥ 0")));
                }
                Ok(Kind::Dirac { mass: m })
            }
            Some("weyl") => Ok(Kind::Weyl { chirality: parse_sign(self.system.chirality.as_deref().unwrap_or("+"))? }),
            other => Err(cfg_err(format!("unknown system kind {other:?}"))),
        }
    }

    /// Explicit times, or the symmetric grid `[−t_max, t_max]` with `steps`
    /// intervals on each side.
    pub fn times(&self) -> Result<Vec<f64>> {
        if let Some(t) = &self.schedule.times {
            if t.is_empty() {
                return Err(cfg_err("schedule.times is empty"));
            }
            return Ok(t.clone());
        }
        let (t_max, k) = (self.f(self.schedule.t_max, "schedule.t_max")?, self.schedule.steps.unwrap_or(40));
        if k == 0 || !(t_max > 0.0) {
            return Err(cfg_err("schedule needs t_max > 0 and steps > 0"));
        }
        Ok(causalab::frontier::symmetric_times(t_max, k))
    }

    /// A required numeric key.
    pub fn f(&self, v: Option<f64>, key: &str) -> Result<f64> {
        match v {
            Some(x) if x.is_finite() => Ok(x),
            Some(x) => Err(cfg_err(format!("{key} = {x} is not finite"))),
            None => Err(cfg_err(format!("{key} is required"))),
        }
    }

    pub fn recipe(&self) -> &str {
        self.state.recipe.as_deref().unwrap_or("bump")
    }

    pub fn orientation(&self) -> Result<Sign> {
        parse_sign(self.state.orientation.as_deref().unwrap_or("+"))
    }

    pub fn tol(&self, v: Option<f64>, key: &str) -> Result<f64> {
        let x = self.f(v, key)?;
        if x < 0.0 {
            return Err(cfg_err(format!("tolerance {key} = {x} is negative")));
        }
        Ok(x)
    }

    /// Target constant of the line-measure experiment.
    pub fn lines_target(&self) -> Result<f64> {
        parse_target(self.lines.target.as_deref().unwrap_or("2pi2over9"))
    }
}

pub fn parse_sign(s: &str) -> Result<Sign> {
    match s {
        "+" | "plus" | "+1" => Ok(Sign::Plus),
        "-" | "minus" | "-1" => Ok(Sign::Minus),
        _ => Err(cfg_err(format!("'{s}' is not a sign"))),
    }
}

/// Named constants `2pi2over9`, `4pi2over45` or a literal number.
pub fn parse_target(s: &str) -> Result<f64> {
    match s {
        "2pi2over9" => Ok(2.0 * PI * PI / 9.0),
        "4pi2over45" => Ok(4.0 * PI * PI / 45.0),
        _ => s.parse::<f64>().map_err(|_| cfg_err(format!("unknown target '{s}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(ExperimentConfig::parse("bogus = 1"), Err(Error::ConfigError(_))));
        assert!(matches!(ExperimentConfig::parse("[grid]\nsize = 4"), Err(Error::ConfigError(_))));
        assert!(ExperimentConfig::parse("[grid]\nn = 64").is_ok());
    }

    #[test]
    fn defaults_are_complete_and_merge_keeps_user_values() {
        let user = ExperimentConfig::parse("seed = 3\n[lines]\nsamples = 1000").unwrap();
        let r = ExperimentConfig::resolve(Some(user), Experiment::Lines).unwrap();
        assert_eq!((r.seed, r.lines.samples), (Some(3), Some(1000)));
        assert_eq!(r.lines.half_width, Some(2.0));
        assert_eq!(r.tolerances.z, Some(3.0));
    }

    #[test]
    fn stochastic_files_need_a_seed_and_matching_experiment() {
        let no_seed = ExperimentConfig::parse("[lines]\nsamples = 1000").unwrap();
        assert!(matches!(ExperimentConfig::resolve(Some(no_seed), Experiment::Lines), Err(Error::ConfigError(_))));
        let wrong = ExperimentConfig::parse("experiment = \"pol\"").unwrap();
        assert!(matches!(ExperimentConfig::resolve(Some(wrong), Experiment::Radial), Err(Error::ConfigError(_))));
        assert!(ExperimentConfig::resolve(None, Experiment::Cascade).unwrap().seed.is_some());
    }

    #[test]
    fn targets_and_signs_parse() {
        assert!((parse_target("4pi2over45").unwrap() - 0.877298).abs() < 1e-6);
        assert!((parse_target("2pi2over9").unwrap() - 2.193245).abs() < 1e-6);
        assert_eq!(parse_target("1.5").unwrap(), 1.5);
        assert!(parse_target("pi").is_err());
        assert_eq!(parse_sign("-").unwrap(), Sign::Minus);
        assert!(parse_sign("0").is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        let c = ExperimentConfig::defaults(Experiment::Frontier);
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
    }
}
