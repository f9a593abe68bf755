use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{BridgeError, Result};
use crate::potentials::{Flat, MuellerPoint, MuellerSurface, PotentialSurface, QuarticWell};
use crate::solvers::{InitKind, SchemeKind, SolverConfig, SweepKind};
use crate::spectral::SpectralConfig;
use crate::trajectory::BridgeProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    QuarticCompare,
    Mueller,
    Instanton,
    FreeBridge,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::QuarticCompare => "quartic-compare",
            Experiment::Mueller => "mueller",
            Experiment::Instanton => "instanton",
            Experiment::FreeBridge => "free-bridge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    Quartic,
    Mueller,
    Flat,
}

/// A named Mueller stationary point, or explicit coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Scalar(f64),
    Coords(Vec<f64>),
    Named(String),
}

impl Endpoint {
    /// Parses `A`, `-1`, or `0.1,0.2`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Ok(x) = text.parse::<f64>() {
            return Ok(Endpoint::Scalar(x));
        }
        if text.contains(',') {
            let coords = text
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| BridgeError::InvalidConfig(format!("bad endpoint '{text}': {e}")))?;
            return Ok(Endpoint::Coords(coords));
        }
        Ok(Endpoint::Named(text.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitChoice {
    Free,
    Cumulant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub surface: SurfaceKind,
    pub from: Endpoint,
    pub to: Endpoint,
    pub t_f: f64,
    pub dt: f64,
    pub gamma: f64,
    pub temperatures: Vec<f64>,
    /// Pairs per temperature, ensemble size, or number of bridges.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub scheme: SchemeKind,
    pub tol: f64,
    pub max_iter: usize,
    pub stride: usize,
    pub init: InitChoice,
    pub sweep: SweepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_order: Option<usize>,
}

impl SolverSection {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            integral_stride: self.stride,
            quadrature_order: self.quadrature_order,
            init: match self.init {
                InitChoice::Free => InitKind::FreeBridge,
                InitChoice::Cumulant => InitKind::CumulantTrajectory,
            },
            sweep: self.sweep,
        }
    }
}

/// Everything needed to re-create a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub out: PathBuf,
    pub problem: ProblemSection,
    pub solver: SolverSection,
    pub spectral: SpectralConfig,
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let surface = match experiment {
            Experiment::Mueller => SurfaceKind::Mueller,
            Experiment::FreeBridge => SurfaceKind::Flat,
            _ => SurfaceKind::Quartic,
        };
        let (from, to, t_f, dt) = surface_defaults(surface);
        let (temperatures, count) = match experiment {
            Experiment::QuarticCompare => (vec![0.05, 0.5, 2.0], 100),
            Experiment::Mueller => (vec![0.2, 1.0, 2.0], 100),
            Experiment::Instanton => (vec![0.0], 1),
            Experiment::FreeBridge => (vec![0.5], 100),
        };
        Self {
            experiment,
            seed: 42,
            out: PathBuf::from(format!("runs/{}", experiment.name())),
            problem: ProblemSection {
                surface,
                from,
                to,
                t_f,
                dt,
                gamma: 1.0,
                temperatures,
                count,
            },
            solver: SolverSection {
                scheme: if experiment == Experiment::Instanton {
                    SchemeKind::ZeroTemperature
                } else {
                    SchemeKind::WeakDispersion
                },
                tol: 1e-6,
                max_iter: 20_000,
                stride: 1,
                init: InitChoice::Free,
                sweep: SweepKind::Jacobi,
                quadrature_order: None,
            },
            spectral: SpectralConfig::default(),
        }
    }

    /// Defaults for `experiment`, overlaid with the sections present in `text`.
    pub fn from_toml(experiment: Experiment, text: &str) -> Result<Self> {
        let mut base = toml::Table::try_from(Self::defaults(experiment))
            .map_err(|e| BridgeError::InvalidConfig(format!("cannot encode defaults: {e}")))?;
        let file: toml::Table =
            toml::from_str(text).map_err(|e| BridgeError::InvalidConfig(format!("config file: {e}")))?;
        if let Some(kind) = file.get("experiment") {
            if kind.as_str() != Some(experiment.name()) {
                return Err(BridgeError::InvalidConfig(format!(
                    "config file is for experiment {kind}, not {}",
                    experiment.name()
                )));
            }
        }
        merge(&mut base, file);
        toml::Value::Table(base)
            .try_into()
            .map_err(|e: toml::de::Error| BridgeError::InvalidConfig(format!("config file: {e}")))
    }

    pub fn load(experiment: Experiment, path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::defaults(experiment)),
            Some(p) => Self::from_toml(experiment, &std::fs::read_to_string(p)?),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration always encodes")
    }

    /// Applies the defaults of `surface` to the endpoints and grid.
    pub fn set_surface(&mut self, surface: SurfaceKind) {
        let (from, to, t_f, dt) = surface_defaults(surface);
        self.problem.surface = surface;
        self.problem.from = from;
        self.problem.to = to;
        self.problem.t_f = t_f;
        self.problem.dt = dt;
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        if p.count == 0 {
            return Err(BridgeError::InvalidConfig("count (pairs) must be ≥ 1".into()));
        }
        if p.temperatures.is_empty() {
            return Err(BridgeError::InvalidConfig("at least one temperature is required".into()));
        }
        if let Some(t) = p.temperatures.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(BridgeError::InvalidConfig(format!("temperature {t} must be finite and ≥ 0")));
        }
        if self.experiment == Experiment::QuarticCompare {
            if p.surface == SurfaceKind::Mueller {
                return Err(BridgeError::InvalidConfig("the paired comparison needs a 1D surface".into()));
            }
            if p.temperatures.iter().any(|&t| t <= 0.0) {
                return Err(BridgeError::InvalidConfig("the paired comparison needs T > 0".into()));
            }
        }
        self.solver.solver_config().validate()?;
        self.spectral.validate()?;
        let surface = self.surface();
        self.problem(&surface, p.temperatures[0])?;
        Ok(())
    }

    pub fn surface(&self) -> Surface {
        match self.problem.surface {
            SurfaceKind::Quartic => Surface::Quartic(QuarticWell),
            SurfaceKind::Mueller => Surface::Mueller(MuellerSurface::default()),
            SurfaceKind::Flat => Surface::Flat(Flat::new(self.endpoint_dim())),
        }
    }

    fn endpoint_dim(&self) -> usize {
        match (&self.problem.from, &self.problem.to) {
            (Endpoint::Coords(c), _) | (_, Endpoint::Coords(c)) => c.len().max(1),
            _ => 1,
        }
    }

    /// The bridge problem at `temperature`, endpoints resolved on `surface`.
    pub fn problem(&self, surface: &Surface, temperature: f64) -> Result<BridgeProblem> {
        let r_i = resolve_endpoint(surface, &self.problem.from)?;
        let r_f = resolve_endpoint(surface, &self.problem.to)?;
        BridgeProblem::new(r_i, r_f, self.problem.t_f, self.problem.dt, temperature, self.problem.gamma)
    }
}

fn surface_defaults(surface: SurfaceKind) -> (Endpoint, Endpoint, f64, f64) {
    match surface {
        SurfaceKind::Mueller => (Endpoint::Named("A".into()), Endpoint::Named("C".into()), 0.03, 1e-4),
        SurfaceKind::Quartic | SurfaceKind::Flat => (Endpoint::Scalar(-1.0), Endpoint::Scalar(1.0), 3.0, 1e-3),
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// A built-in surface chosen at run time.
#[derive(Debug, Clone)]
pub enum Surface {
    Quartic(QuarticWell),
    Mueller(MuellerSurface),
    Flat(Flat),
}

impl Surface {
    pub fn as_dyn(&self) -> &dyn PotentialSurface {
        match self {
            Surface::Quartic(s) => s,
            Surface::Mueller(s) => s,
            Surface::Flat(s) => s,
        }
    }
}

fn resolve_endpoint(surface: &Surface, endpoint: &Endpoint) -> Result<Vec<f64>> {
    let dim = surface.as_dyn().dimension();
    let r = match endpoint {
        Endpoint::Scalar(x) => vec![*x],
        Endpoint::Coords(c) => c.clone(),
        Endpoint::Named(name) => match (surface, MuellerPoint::parse(name)) {
            (Surface::Mueller(m), Some(point)) => m.locate(point)?.to_vec(),
            _ => {
                return Err(BridgeError::InvalidConfig(format!(
                    "unknown endpoint '{name}' (named points A, B, C, F, G exist on the Mueller surface only)"
                )))
            }
        },
    };
    if r.len() != dim {
        return Err(BridgeError::DimensionMismatch {
            expected: dim,
            got: r.len(),
        });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        for e in [
            Experiment::QuarticCompare,
            Experiment::Mueller,
            Experiment::Instanton,
            Experiment::FreeBridge,
        ] {
            let c = RunConfig::defaults(e);
            c.validate().unwrap();
            let back = RunConfig::from_toml(e, &c.to_toml()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn file_overrides_defaults() {
        let text = "seed = 7\n[problem]\ntemperatures = [0.1]\ncount = 3\n[spectral]\ngrid_points = 512\n";
        let c = RunConfig::from_toml(Experiment::QuarticCompare, text).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.problem.temperatures, vec![0.1]);
        assert_eq!(c.problem.count, 3);
        assert_eq!(c.problem.t_f, 3.0);
        assert_eq!(c.spectral.grid_points, 512);
        assert_eq!(c.spectral.x_min, -3.0);
    }

    #[test]
    fn bad_files_rejected() {
        assert!(RunConfig::from_toml(Experiment::Mueller, "experiment = \"instanton\"\n").is_err());
        assert!(RunConfig::from_toml(Experiment::Mueller, "[problem]\nbogus = 1\n").is_err());
        assert!(RunConfig::from_toml(Experiment::Mueller, "seed = \"x\"\n").is_err());
        let mut c = RunConfig::defaults(Experiment::QuarticCompare);
        c.problem.count = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn endpoints() {
        assert_eq!(Endpoint::parse("-1").unwrap(), Endpoint::Scalar(-1.0));
        assert_eq!(Endpoint::parse("0.5, 1").unwrap(), Endpoint::Coords(vec![0.5, 1.0]));
        assert_eq!(Endpoint::parse("c").unwrap(), Endpoint::Named("c".into()));
        let c = RunConfig::defaults(Experiment::Mueller);
        let p = c.problem(&c.surface(), 0.2).unwrap();
        assert!((p.r_i()[0] + 0.558).abs() < 1e-2 && (p.r_f()[1] - 0.028).abs() < 1e-2);
        let mut q = RunConfig::defaults(Experiment::Instanton);
        q.problem.from = Endpoint::Named("A".into());
        assert!(q.validate().is_err());
    }
}
