use super::PotentialSurface;

/// Symmetric double well `U(x) = (x² − 1)²/4`: minima at ±1, barrier 1/4 at 0.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuarticWell;

impl QuarticWell {
    #[inline]
    fn d1(x: f64) -> f64 {
        x * x * x - x
    }
    #[inline]
    fn d2(x: f64) -> f64 {
        3.0 * x * x - 1.0
    }
}

impl PotentialSurface for QuarticWell {
    fn dimension(&self) -> usize {
        1
    }

    fn energy(&self, r: &[f64]) -> f64 {
        let s = r[0] * r[0] - 1.0;
        0.25 * s * s
    }

    fn gradient(&self, r: &[f64], out: &mut [f64]) {
        out[0] = Self::d1(r[0]);
    }

    fn hessian(&self, r: &[f64], out: &mut [f64]) {
        out[0] = Self::d2(r[0]);
    }

    fn laplacian(&self, r: &[f64]) -> f64 {
        Self::d2(r[0])
    }

    fn laplacian_gradient(&self, r: &[f64], out: &mut [f64]) {
        out[0] = 6.0 * r[0];
    }

    fn effective_potential(&self, r: &[f64], temperature: f64) -> f64 {
        let g = Self::d1(r[0]);
        0.25 * g * g - 0.5 * temperature * Self::d2(r[0])
    }

    fn effective_gradient(&self, r: &[f64], temperature: f64, out: &mut [f64]) {
        let x = r[0];
        out[0] = 0.5 * Self::d2(x) * Self::d1(x) - 3.0 * temperature * x;
    }
}
