use serde::{Deserialize, Serialize};

use super::PotentialSurface;

/// Coefficients of the four exponential-quadratic terms
/// `A_i exp(a_i dx² + b_i dx dy + c_i dy²)`, `dx = x − x0_i`, `dy = y − y0_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuellerParams {
    pub amplitude: [f64; 4],
    pub a: [f64; 4],
    pub b: [f64; 4],
    pub c: [f64; 4],
    pub x0: [f64; 4],
    pub y0: [f64; 4],
}

impl Default for MuellerParams {
    fn default() -> Self {
        Self {
            amplitude: [-200.0, -100.0, -170.0, 15.0],
            a: [-1.0, -1.0, -6.5, 0.7],
            b: [0.0, 0.0, 11.0, 0.6],
            c: [-10.0, -10.0, -6.5, 0.7],
            x0: [1.0, 0.0, -0.5, -1.0],
            y0: [0.0, 0.5, 1.5, 1.0],
        }
    }
}

/// Named stationary points of the standard surface: minima A, B, C and
/// the saddles F (between A and B) and G (between B and C).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MuellerPoint {
    A,
    B,
    C,
    F,
    G,
}

impl MuellerPoint {
    /// Approximate coordinates used as the refinement seed.
    pub fn seed(self) -> [f64; 2] {
        match self {
            MuellerPoint::A => [-0.558, 1.442],
            MuellerPoint::B => [-0.05, 0.467],
            MuellerPoint::C => [0.623, 0.028],
            MuellerPoint::F => [-0.793, 0.656],
            MuellerPoint::G => [0.198, 0.291],
        }
    }

    pub fn is_minimum(self) -> bool {
        matches!(self, MuellerPoint::A | MuellerPoint::B | MuellerPoint::C)
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.trim().to_ascii_uppercase().as_str() {
            "A" => Some(MuellerPoint::A),
            "B" => Some(MuellerPoint::B),
            "C" => Some(MuellerPoint::C),
            "F" => Some(MuellerPoint::F),
            "G" => Some(MuellerPoint::G),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MuellerSurface {
    pub params: MuellerParams,
}

/// Per-term quantities shared by every derivative.
struct Term {
    e: f64,
    qx: f64,
    qy: f64,
    a2: f64,
    b: f64,
    c2: f64,
}

impl MuellerSurface {
    pub fn new(params: MuellerParams) -> Self {
        Self { params }
    }

    /// Refines the named point's seed to a stationary point of this surface.
    pub fn locate(&self, point: MuellerPoint) -> crate::error::Result<[f64; 2]> {
        let seed = point.seed();
        let r = if point.is_minimum() {
            super::refine_minimum(self, &seed)?
        } else {
            super::refine_stationary_point(self, &seed)?
        };
        Ok([r[0], r[1]])
    }

    #[inline]
    fn terms(&self, r: &[f64]) -> impl Iterator<Item = Term> + '_ {
        let (x, y) = (r[0], r[1]);
        let p = &self.params;
        (0..4).map(move |i| {
            let dx = x - p.x0[i];
            let dy = y - p.y0[i];
            let q = p.a[i] * dx * dx + p.b[i] * dx * dy + p.c[i] * dy * dy;
            Term {
                e: p.amplitude[i] * q.exp(),
                qx: 2.0 * p.a[i] * dx + p.b[i] * dy,
                qy: p.b[i] * dx + 2.0 * p.c[i] * dy,
                a2: 2.0 * p.a[i],
                b: p.b[i],
                c2: 2.0 * p.c[i],
            }
        })
    }
}

impl PotentialSurface for MuellerSurface {
    fn dimension(&self) -> usize {
        2
    }

    fn energy(&self, r: &[f64]) -> f64 {
        self.terms(r).map(|t| t.e).sum()
    }

    fn gradient(&self, r: &[f64], out: &mut [f64]) {
        let (mut gx, mut gy) = (0.0, 0.0);
        for t in self.terms(r) {
            gx += t.e * t.qx;
            gy += t.e * t.qy;
        }
        out[0] = gx;
        out[1] = gy;
    }

    fn hessian(&self, r: &[f64], out: &mut [f64]) {
        let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
        for t in self.terms(r) {
            xx += t.e * (t.qx * t.qx + t.a2);
            xy += t.e * (t.qx * t.qy + t.b);
            yy += t.e * (t.qy * t.qy + t.c2);
        }
        out[0] = xx;
        out[1] = xy;
        out[2] = xy;
        out[3] = yy;
    }

    fn laplacian(&self, r: &[f64]) -> f64 {
        self.terms(r)
            .map(|t| t.e * (t.qx * t.qx + t.qy * t.qy + t.a2 + t.c2))
            .sum()
    }

    fn laplacian_gradient(&self, r: &[f64], out: &mut [f64]) {
        let (mut lx, mut ly) = (0.0, 0.0);
        for t in self.terms(r) {
            let l0 = t.qx * t.qx + t.qy * t.qy + t.a2 + t.c2;
            lx += t.e * (t.qx * l0 + 2.0 * t.qx * t.a2 + 2.0 * t.qy * t.b);
            ly += t.e * (t.qy * l0 + 2.0 * t.qx * t.b + 2.0 * t.qy * t.c2);
        }
        out[0] = lx;
        out[1] = ly;
    }

    fn effective_potential(&self, r: &[f64], temperature: f64) -> f64 {
        let (mut gx, mut gy, mut lap) = (0.0, 0.0, 0.0);
        for t in self.terms(r) {
            gx += t.e * t.qx;
            gy += t.e * t.qy;
            lap += t.e * (t.qx * t.qx + t.qy * t.qy + t.a2 + t.c2);
        }
        0.25 * (gx * gx + gy * gy) - 0.5 * temperature * lap
    }

    fn effective_gradient(&self, r: &[f64], temperature: f64, out: &mut [f64]) {
        let (mut gx, mut gy) = (0.0, 0.0);
        let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
        let (mut lx, mut ly) = (0.0, 0.0);
        for t in self.terms(r) {
            gx += t.e * t.qx;
            gy += t.e * t.qy;
            xx += t.e * (t.qx * t.qx + t.a2);
            xy += t.e * (t.qx * t.qy + t.b);
            yy += t.e * (t.qy * t.qy + t.c2);
            if temperature != 0.0 {
                let l0 = t.qx * t.qx + t.qy * t.qy + t.a2 + t.c2;
                lx += t.e * (t.qx * l0 + 2.0 * t.qx * t.a2 + 2.0 * t.qy * t.b);
                ly += t.e * (t.qy * l0 + 2.0 * t.qx * t.b + 2.0 * t.qy * t.c2);
            }
        }
        out[0] = 0.5 * (xx * gx + xy * gy) - 0.5 * temperature * lx;
        out[1] = 0.5 * (xy * gx + yy * gy) - 0.5 * temperature * ly;
    }
}
