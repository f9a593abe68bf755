use serde::{Deserialize, Serialize};

use crate::error::{BridgeError, Result};

/// Physical and numerical parameters of one conditioning task.
///
/// `t_f` is snapped to an exact multiple of `dt` on construction; the
/// requested value is kept for the run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeProblem {
    r_i: Vec<f64>,
    r_f: Vec<f64>,
    t_f: f64,
    t_f_requested: f64,
    dt: f64,
    steps: usize,
    temperature: f64,
    gamma: f64,
}

impl BridgeProblem {
    pub fn new(
        r_i: Vec<f64>,
        r_f: Vec<f64>,
        t_f: f64,
        dt: f64,
        temperature: f64,
        gamma: f64,
    ) -> Result<Self> {
        if r_i.is_empty() || r_i.len() != r_f.len() {
            return Err(BridgeError::DimensionMismatch {
                expected: r_i.len(),
                got: r_f.len(),
            });
        }
        let scalars = [t_f, dt, temperature, gamma];
        if r_i.iter().chain(&r_f).chain(&scalars).any(|v| !v.is_finite()) {
            return Err(BridgeError::NonFinite("bridge problem parameters".into()));
        }
        if t_f <= 0.0 || dt <= 0.0 {
            return Err(BridgeError::InvalidProblem(format!(
                "t_f and dt must be positive (t_f = {t_f}, dt = {dt})"
            )));
        }
        if temperature < 0.0 {
            return Err(BridgeError::NegativeTemperature(temperature));
        }
        if gamma <= 0.0 {
            return Err(BridgeError::InvalidProblem(format!("friction must be positive, got {gamma}")));
        }
        let steps = (t_f / dt).round();
        if steps < 2.0 || steps > u32::MAX as f64 {
            return Err(BridgeError::InvalidProblem(format!(
                "t_f / dt = {} gives {steps} steps; need at least 2",
                t_f / dt
            )));
        }
        let steps = steps as usize;
        Ok(Self {
            r_i,
            r_f,
            t_f: steps as f64 * dt,
            t_f_requested: t_f,
            dt,
            steps,
            temperature,
            gamma,
        })
    }

    /// Same problem at a different temperature.
    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(
            self.r_i.clone(),
            self.r_f.clone(),
            self.t_f,
            self.dt,
            temperature,
            self.gamma,
        )
        .map(|mut p| {
            p.t_f_requested = self.t_f_requested;
            p
        })
    }

    pub fn dim(&self) -> usize {
        self.r_i.len()
    }
    pub fn r_i(&self) -> &[f64] {
        &self.r_i
    }
    pub fn r_f(&self) -> &[f64] {
        &self.r_f
    }
    pub fn t_f(&self) -> f64 {
        self.t_f
    }
    pub fn t_f_requested(&self) -> f64 {
        self.t_f_requested
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    /// Number of intervals `I`; the grid has `I + 1` points.
    pub fn steps(&self) -> usize {
        self.steps
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    /// Einstein relation `D = T/γ`.
    pub fn diffusion(&self) -> f64 {
        self.temperature / self.gamma
    }
    pub fn beta(&self) -> Option<f64> {
        (self.temperature > 0.0).then(|| 1.0 / self.temperature)
    }
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
    /// `t_f − k·dt`, computed as `(I − k)·dt` so the last interval is exactly `dt`.
    pub fn remaining(&self, k: usize) -> f64 {
        (self.steps - k) as f64 * self.dt
    }
    /// `sqrt(2·D·dt)`.
    pub fn noise_amplitude(&self) -> f64 {
        (2.0 * self.diffusion() * self.dt).sqrt()
    }
}
