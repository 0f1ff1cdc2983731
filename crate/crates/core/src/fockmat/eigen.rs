//! Dense complex eigenvalues: Householder reduction to upper Hessenberg
//! form followed by single-shift QR sweeps with Wilkinson shifts.

use crate::base::{Cx, ZERO};
use crate::error::{Error, Result};

use super::{TruncatedMatrix, MAX_EIGEN_DIM};

/// Sweeps allowed per eigenvalue before giving up.
const SWEEPS_PER_EIGENVALUE: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenvalues {
    /// Sorted by descending modulus. When `converged` is false the
    /// unconverged part holds the current diagonal of the active block.
    pub values: Vec<Cx>,
    pub converged: bool,
}

struct Dense {
    n: usize,
    a: Vec<Cx>,
}

impl Dense {
    fn at(&self, i: usize, j: usize) -> Cx {
        self.a[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Cx) {
        self.a[i * self.n + j] = v;
    }

    fn hessenberg(&mut self) {
        let n = self.n;
        let mut v = vec![ZERO; n];
        for k in 0..n.saturating_sub(2) {
            let norm: f64 = (k + 1..n).map(|i| self.at(i, k).norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = self.at(k + 1, k);
            let phase = if x0 == ZERO { Cx::new(1.0, 0.0) } else { x0 / x0.norm() };
            let alpha = -phase * norm;
            for i in k + 1..n {
                v[i] = self.at(i, k);
            }
            v[k + 1] -= alpha;
            let vn: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
            if vn == 0.0 {
                continue;
            }
            for x in v.iter_mut().skip(k + 1) {
                *x /= vn;
            }
            // A ← (I − 2vvᴴ) A
            for j in k..n {
                let s: Cx = (k + 1..n).map(|i| v[i].conj() * self.at(i, j)).sum();
                for i in k + 1..n {
                    let val = self.at(i, j) - v[i] * s * 2.0;
                    self.set(i, j, val);
                }
            }
            // A ← A (I − 2vvᴴ)
            for i in 0..n {
                let s: Cx = (k + 1..n).map(|j| self.at(i, j) * v[j]).sum();
                for j in k + 1..n {
                    let val = self.at(i, j) - s * v[j].conj() * 2.0;
                    self.set(i, j, val);
                }
            }
            for i in k + 2..n {
                self.set(i, k, ZERO);
            }
            self.set(k + 1, k, alpha);
        }
    }

    /// Eigenvalue of the trailing 2×2 block of rows/columns (hi−1, hi)
    /// closest to its last diagonal entry.
    fn wilkinson(&self, hi: usize) -> Cx {
        let (a, b) = (self.at(hi - 1, hi - 1), self.at(hi - 1, hi));
        let (c, d) = (self.at(hi, hi - 1), self.at(hi, hi));
        let half = (a - d) * 0.5;
        let disc = (half * half + b * c).sqrt();
        let mid = (a + d) * 0.5;
        let (l1, l2) = (mid + disc, mid - disc);
        if (l1 - d).norm() <= (l2 - d).norm() {
            l1
        } else {
            l2
        }
    }

    /// One shifted QR sweep H − μI = QR, H ← RQ + μI on rows/columns lo..=hi.
    fn sweep(&mut self, lo: usize, hi: usize, mu: Cx) {
        for k in lo..=hi {
            let v = self.at(k, k) - mu;
            self.set(k, k, v);
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let x = self.at(k, k);
            let y = self.at(k + 1, k);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (Cx::new(1.0, 0.0), ZERO)
            } else {
                (x / r, y / r)
            };
            for j in k..=hi {
                let (hk, hk1) = (self.at(k, j), self.at(k + 1, j));
                self.set(k, j, c.conj() * hk + s.conj() * hk1);
                self.set(k + 1, j, -s * hk + c * hk1);
            }
            rots.push((c, s));
        }
        for (idx, (c, s)) in rots.into_iter().enumerate() {
            let k = lo + idx;
            for i in lo..=(k + 2).min(hi) {
                let (hk, hk1) = (self.at(i, k), self.at(i, k + 1));
                self.set(i, k, hk * c + hk1 * s);
                self.set(i, k + 1, -hk * s.conj() + hk1 * c.conj());
            }
        }
        for k in lo..=hi {
            let v = self.at(k, k) + mu;
            self.set(k, k, v);
        }
    }
}

/// All eigenvalues of a dense matrix of dimension at most 256.
pub fn eigenvalues(m: &TruncatedMatrix) -> Result<Eigenvalues> {
    let n = m.dim();
    if n > MAX_EIGEN_DIM {
        return Err(Error::Dimension(n));
    }
    let mut h = Dense {
        n,
        a: (0..n * n).map(|idx| m.entry(idx / n, idx % n)).collect(),
    };
    h.hessenberg();
    let scale = h.a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = f64::EPSILON * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let mut values = vec![ZERO; n];
    let mut converged = true;
    let mut hi = n as isize - 1;
    let mut since_deflation = 0usize;
    let mut budget = SWEEPS_PER_EIGENVALUE * n.max(1);
    while hi >= 0 {
        let h_idx = hi as usize;
        let mut lo = h_idx;
        while lo > 0 {
            let sub = h.at(lo, lo - 1).norm();
            let diag = h.at(lo, lo).norm() + h.at(lo - 1, lo - 1).norm();
            if sub <= f64::EPSILON * diag || sub <= floor {
                h.set(lo, lo - 1, ZERO);
                break;
            }
            lo -= 1;
        }
        if lo == h_idx {
            values[h_idx] = h.at(h_idx, h_idx);
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if budget == 0 {
            converged = false;
            for k in 0..=h_idx {
                values[k] = h.at(k, k);
            }
            break;
        }
        budget -= 1;
        since_deflation += 1;
        let mu = if since_deflation % 11 == 0 {
            // exceptional shift to break cycles
            let e = h.at(h_idx, h_idx - 1).norm()
                + if h_idx >= 2 { h.at(h_idx - 1, h_idx - 2).norm() } else { 0.0 };
            h.at(h_idx, h_idx) + Cx::new(0.75 * e, -0.4375 * e)
        } else {
            h.wilkinson(h_idx)
        };
        h.sweep(lo, h_idx, mu);
    }
    values.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    Ok(Eigenvalues { values, converged })
}
