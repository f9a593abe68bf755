use serde::{Deserialize, Serialize};

use crate::error::{BridgeError, Result};
use crate::trajectory::Trajectory;

/// Which approximation of the conditioned drift is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Instanton: `∇V₀`, no noise.
    ZeroTemperature,
    /// `∇V₀` plus noise.
    LowTemperature,
    /// `∇V(·, T)` plus noise.
    WeakDispersion,
    /// Gaussian-smeared `∇V(·, T)` around the chord to `r_f`, plus noise.
    Cumulant,
}

impl SchemeKind {
    /// Temperature at which `∇V` is evaluated in the memory integral.
    pub fn gradient_temperature(self, temperature: f64) -> f64 {
        match self {
            SchemeKind::ZeroTemperature | SchemeKind::LowTemperature => 0.0,
            SchemeKind::WeakDispersion | SchemeKind::Cumulant => temperature,
        }
    }

    pub fn uses_noise(self) -> bool {
        !matches!(self, SchemeKind::ZeroTemperature)
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ZeroTemperature => "zero-temperature",
            SchemeKind::LowTemperature => "low-temperature",
            SchemeKind::WeakDispersion => "weak-dispersion",
            SchemeKind::Cumulant => "cumulant",
        }
    }
}

/// How the fixed-point sweep reads the previous iterate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// Point `k+1` of sweep `n+1` reads only iterate `n`.
    #[default]
    Jacobi,
    /// The local (chord and position) terms read the already-updated point
    /// `k`; the memory integral still reads iterate `n`.
    GaussSeidel,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub enum InitKind {
    #[default]
    FreeBridge,
    CumulantTrajectory,
    UserSupplied(Trajectory),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub integral_stride: usize,
    /// Gauss–Hermite points per axis; `None` picks 21 in 1D, 9 in 2D, 5 above.
    pub quadrature_order: Option<usize>,
    pub init: InitKind,
    pub sweep: SweepKind,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 20_000,
            integral_stride: 1,
            quadrature_order: None,
            init: InitKind::FreeBridge,
            sweep: SweepKind::Jacobi,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(BridgeError::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(BridgeError::InvalidConfig("max_iter must be ≥ 1".into()));
        }
        if self.integral_stride == 0 {
            return Err(BridgeError::InvalidConfig("integral_stride must be ≥ 1".into()));
        }
        if self.quadrature_order == Some(0) {
            return Err(BridgeError::InvalidConfig("quadrature_order must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn quadrature_order_for(&self, dim: usize) -> usize {
        self.quadrature_order.unwrap_or(match dim {
            1 => 21,
            2 => 9,
            _ => 5,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Max over grid points of the Euclidean change between the last two iterates.
    pub final_residual: f64,
    pub converged: bool,
    pub wall_time: f64,
    pub noise_checksum: u64,
}
