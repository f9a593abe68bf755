//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts).

use crate::error::{BridgeError, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenpairs of a symmetric tridiagonal matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    /// Row `n` (contiguous, length `M`) is the unit-norm eigenvector for
    /// `values[n]`. Empty when vectors were not requested.
    pub vectors: Vec<f64>,
}

impl TridiagonalEigen {
    pub fn vector(&self, n: usize) -> &[f64] {
        let m = self.values.len();
        &self.vectors[n * m..(n + 1) * m]
    }
}

/// Diagonalizes the matrix with diagonal `diag` and sub/super-diagonal `off`
/// (`off.len() == diag.len() − 1`).
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64], vectors: bool) -> Result<TridiagonalEigen> {
    let n = diag.len();
    assert!(n == 0 || off.len() == n - 1, "off-diagonal must have length n − 1");
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    // z[i*n + k]: component k of the i-th basis vector being rotated
    let mut z = if vectors {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    } else {
        Vec::new()
    };

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(BridgeError::EigenNoConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if vectors {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for k in 0..n {
                        let f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = if vectors {
        let mut out = Vec::with_capacity(n * n);
        for &i in &order {
            out.extend_from_slice(&z[i * n..(i + 1) * n]);
        }
        out
    } else {
        Vec::new()
    };
    Ok(TridiagonalEigen { values, vectors })
}

/// `LU` factors of a shifted tridiagonal matrix with partial pivoting
/// (second superdiagonal `du2` from row interchanges).
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swap: Vec<bool>,
}

impl TridiagonalLu {
    /// Factors `T − shift·I`; exactly zero pivots are replaced by `tiny`.
    fn new(diag: &[f64], off: &[f64], shift: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swap[i] = true;
            }
        }
        if let Some(last) = d.last_mut() {
            if *last == 0.0 {
                *last = tiny;
            }
        }
        Self { dl, d, du, du2, swap }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

const CLUSTER_GAP: f64 = 1e-6;

const INVERSE_ITERATIONS: usize = 3;

/// Unit eigenvectors for the ascending eigenvalues `values` by inverse
/// iteration, returned row-major like [`TridiagonalEigen::vectors`].
///
/// Vectors whose eigenvalues are closer than `1e-6·‖T‖₁` are
/// reorthogonalized against each other.
pub fn tridiagonal_eigenvectors(diag: &[f64], off: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert!(n > 0 && off.len() == n - 1, "off-diagonal must have length n − 1");
    let norm1 = (0..n)
        .map(|i| {
            diag[i].abs() + if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max);
    let tiny = f64::EPSILON * norm1.max(f64::MIN_POSITIVE);
    let cluster = CLUSTER_GAP * norm1;
    let mut out = vec![0.0; values.len() * n];
    let mut cluster_start = 0;
    for (k, &lambda) in values.iter().enumerate() {
        if !lambda.is_finite() {
            return Err(BridgeError::EigenNoConvergence(k));
        }
        if k > 0 && lambda - values[k - 1] > cluster {
            cluster_start = k;
        }
        let lu = TridiagonalLu::new(diag, off, lambda, tiny);
        let (done, rest) = out.split_at_mut(k * n);
        let v = &mut rest[..n];
        // deterministic start with components of both signs
        let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (k as u64);
        for x in v.iter_mut() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            *x = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        }
        for _ in 0..INVERSE_ITERATIONS {
            lu.solve(v);
            if v.iter().any(|x| !x.is_finite()) {
                return Err(BridgeError::EigenNoConvergence(k));
            }
            normalize(v);
            for j in cluster_start..k {
                let u = &done[j * n..(j + 1) * n];
                let dot: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
            }
            normalize(v);
        }
    }
    Ok(out)
}
