use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::BridgeProblem;

/// Stream generator recorded in run reports.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.9: seed_from_u64(seed), set_stream(stream)); StandardNormal ziggurat (rand_distr 0.5)";

/// `I` standard-normal `N`-vectors, stored flat (`xi[k*N + a]`).
///
/// The stream is a pure function of `(seed, stream)`. Ensemble member `j`
/// of a run with master seed `s` uses `(s, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    seed: u64,
    stream: u64,
    dim: usize,
    xi: Vec<f64>,
}

impl NoisePath {
    pub fn generate(problem: &BridgeProblem, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let n = problem.steps() * problem.dim();
        let xi = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Self {
            seed,
            stream,
            dim: problem.dim(),
            xi,
        }
    }

    /// Noise for ensemble member `index` under `master_seed`.
    pub fn member(problem: &BridgeProblem, master_seed: u64, index: u64) -> Self {
        Self::generate(problem, master_seed, index)
    }

    pub fn zeros(problem: &BridgeProblem) -> Self {
        Self {
            seed: 0,
            stream: 0,
            dim: problem.dim(),
            xi: vec![0.0; problem.steps() * problem.dim()],
        }
    }

    /// Wraps explicit increments; `xi.len()` must be `steps·dim` and finite.
    pub fn from_raw(problem: &BridgeProblem, xi: Vec<f64>) -> crate::error::Result<Self> {
        let n = problem.steps() * problem.dim();
        if xi.len() != n {
            return Err(crate::error::BridgeError::DimensionMismatch {
                expected: n,
                got: xi.len(),
            });
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(crate::error::BridgeError::NonFinite("noise increments".into()));
        }
        Ok(Self {
            seed: 0,
            stream: 0,
            dim: problem.dim(),
            xi,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn stream(&self) -> u64 {
        self.stream
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn steps(&self) -> usize {
        self.xi.len() / self.dim
    }
    /// `ξ(k)`.
    pub fn at(&self, k: usize) -> &[f64] {
        &self.xi[k * self.dim..(k + 1) * self.dim]
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.xi
    }

    pub fn matches(&self, problem: &BridgeProblem) -> bool {
        self.dim == problem.dim() && self.xi.len() == problem.steps() * problem.dim()
    }

    /// FNV-1a over the bit patterns of every entry.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in &self.xi {
            for b in v.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }
}

/// Noise path for `problem` from a single seed (stream 0).
pub fn make_noise(problem: &BridgeProblem, seed: u64) -> NoisePath {
    NoisePath::generate(problem, seed, 0)
}
