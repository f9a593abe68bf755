use super::PotentialSurface;

/// `U ≡ 0` in `dim` dimensions; every derivative and `V` vanish identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flat {
    pub dim: usize,
}

impl Flat {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl PotentialSurface for Flat {
    fn dimension(&self) -> usize {
        self.dim
    }
    fn energy(&self, _r: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _r: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn hessian(&self, _r: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn laplacian(&self, _r: &[f64]) -> f64 {
        0.0
    }
    fn laplacian_gradient(&self, _r: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn effective_potential(&self, _r: &[f64], _temperature: f64) -> f64 {
        0.0
    }
    fn effective_gradient(&self, _r: &[f64], _temperature: f64, out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// Isotropic harmonic well `U = k|r|²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub dim: usize,
    pub stiffness: f64,
}

impl Harmonic {
    pub fn new(dim: usize, stiffness: f64) -> Self {
        Self { dim, stiffness }
    }
}

impl PotentialSurface for Harmonic {
    fn dimension(&self) -> usize {
        self.dim
    }
    fn energy(&self, r: &[f64]) -> f64 {
        0.5 * self.stiffness * r.iter().map(|x| x * x).sum::<f64>()
    }
    fn gradient(&self, r: &[f64], out: &mut [f64]) {
        for (o, x) in out.iter_mut().zip(r) {
            *o = self.stiffness * x;
        }
    }
    fn hessian(&self, _r: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for i in 0..self.dim {
            out[i * self.dim + i] = self.stiffness;
        }
    }
    fn laplacian(&self, _r: &[f64]) -> f64 {
        self.stiffness * self.dim as f64
    }
    fn laplacian_gradient(&self, _r: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn effective_gradient(&self, r: &[f64], _temperature: f64, out: &mut [f64]) {
        let k2 = 0.5 * self.stiffness * self.stiffness;
        for (o, x) in out.iter_mut().zip(r) {
            *o = k2 * x;
        }
    }
}
