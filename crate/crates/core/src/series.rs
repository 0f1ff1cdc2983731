//! Truncated Taylor series of entire functions at the origin.

use std::ops::{Add, Mul};

use crate::base::{ln_factorials, AffineSymbol, Cx, ONE, ZERO};

pub const DEFAULT_DEGREE: usize = 128;

/// c_0 + c_1 z + … + c_D z^D with a fixed truncation degree D.
///
/// Operations whose exact result would exceed D keep degrees ≤ D and set
/// the `truncated` flag instead of silently discarding information.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries {
    coeffs: Vec<Cx>,
    cap: usize,
    truncated: bool,
}

impl TaylorSeries {
    /// Series with the default truncation degree (raised if `coeffs` is longer).
    pub fn new(coeffs: Vec<Cx>) -> Self {
        let cap = DEFAULT_DEGREE.max(coeffs.len().saturating_sub(1));
        Self::with_cap(coeffs, cap)
    }

    pub fn with_cap(mut coeffs: Vec<Cx>, cap: usize) -> Self {
        let truncated = coeffs.len() > cap + 1 && coeffs[cap + 1..].iter().any(|c| *c != ZERO);
        coeffs.truncate(cap + 1);
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self {
            coeffs,
            cap,
            truncated,
        }
    }

    pub fn constant(c: Cx) -> Self {
        Self::new(vec![c])
    }

    /// zᵐ
    pub fn monomial(m: usize) -> Self {
        let mut coeffs = vec![ZERO; m + 1];
        coeffs[m] = ONE;
        Self::new(coeffs)
    }

    /// K_w(z) = exp(conj(w) z) truncated at `degree`.
    pub fn kernel(w: Cx, degree: usize) -> Self {
        let wc = w.conj();
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut c = ONE;
        for j in 0..=degree {
            coeffs.push(c);
            c = c * wc / (j + 1) as f64;
        }
        let mut s = Self::with_cap(coeffs, degree);
        s.truncated = w != ZERO;
        s
    }

    /// k_w = K_w / ‖K_w‖₂ = exp(-|w|²/2) K_w.
    pub fn normalized_kernel(w: Cx, degree: usize) -> Self {
        let mut s = Self::kernel(w, degree);
        let f = (-0.5 * w.norm_sqr()).exp();
        s.coeffs.iter_mut().for_each(|c| *c *= f);
        s
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Cx {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Marks the series as the truncation of an entire function whose
    /// tail beyond the cap is nonzero.
    pub fn mark_truncated(mut self) -> Self {
        self.truncated = true;
        self
    }

    /// Index of the highest nonzero coefficient (0 for the zero series).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }

    pub fn eval(&self, z: Cx) -> Cx {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn scale(&self, s: Cx) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            cap: self.cap,
            truncated: self.truncated,
        }
    }

    /// Drops the highest nonzero coefficient.
    pub fn drop_top(&self) -> Self {
        let mut out = self.clone();
        let d = self.degree();
        out.coeffs[d] = ZERO;
        out
    }

    /// f ↦ f∘ψ for affine ψ. Degree is preserved, so no truncation occurs.
    pub fn compose_affine(&self, psi: &AffineSymbol) -> Self {
        let d = self.degree();
        let mut acc = vec![ZERO; d + 1];
        acc[0] = self.coeffs[d];
        // Horner: acc ← acc·(a z + b) + c_k
        for k in (0..d).rev() {
            let len = d - k;
            for j in (0..=len).rev() {
                let lower = if j > 0 { acc[j - 1] } else { ZERO };
                acc[j] = acc[j] * psi.b + lower * psi.a;
            }
            acc[0] += self.coeffs[k];
        }
        Self {
            coeffs: acc,
            cap: self.cap,
            truncated: self.truncated,
        }
    }

    /// √(Σ |c_n|² n!), the F₂ norm of the retained polynomial.
    pub fn f2_norm(&self) -> f64 {
        let lf = ln_factorials(self.coeffs.len());
        self.coeffs
            .iter()
            .zip(&lf)
            .filter(|(c, _)| **c != ZERO)
            .map(|(c, l)| (2.0 * c.norm().ln() + l).exp())
            .sum::<f64>()
            .sqrt()
    }

    /// Coefficients in the orthonormal basis zⁿ/√(n!).
    pub fn normalized_coeffs(&self) -> Vec<Cx> {
        let lf = ln_factorials(self.coeffs.len());
        self.coeffs
            .iter()
            .zip(&lf)
            .map(|(c, l)| {
                if *c == ZERO {
                    ZERO
                } else {
                    c * (0.5 * l).exp()
                }
            })
            .collect()
    }

    /// Inverse of [`normalized_coeffs`](Self::normalized_coeffs).
    pub fn from_normalized(scaled: &[Cx]) -> Self {
        let lf = ln_factorials(scaled.len());
        Self::new(
            scaled
                .iter()
                .zip(&lf)
                .map(|(c, l)| if *c == ZERO { ZERO } else { c * (-0.5 * l).exp() })
                .collect(),
        )
    }
}

impl Add for &TaylorSeries {
    type Output = TaylorSeries;

    fn add(self, rhs: &TaylorSeries) -> TaylorSeries {
        let cap = self.cap.min(rhs.cap);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs: Vec<Cx> = (0..len).map(|n| self.coeff(n) + rhs.coeff(n)).collect();
        let mut out = TaylorSeries::with_cap(coeffs, cap);
        out.truncated |= self.truncated || rhs.truncated;
        out
    }
}

impl Mul for &TaylorSeries {
    type Output = TaylorSeries;

    fn mul(self, rhs: &TaylorSeries) -> TaylorSeries {
        let cap = self.cap.min(rhs.cap);
        let (m, n) = (self.degree(), rhs.degree());
        let full = m + n;
        let keep = full.min(cap);
        let mut coeffs = vec![ZERO; keep + 1];
        for (i, x) in self.coeffs.iter().enumerate().take(m + 1) {
            if *x == ZERO {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate().take(n + 1) {
                if i + j > keep {
                    break;
                }
                coeffs[i + j] += x * y;
            }
        }
        let dropped = full > cap
            && (0..=m).any(|i| {
                self.coeffs[i] != ZERO && (0..=n).any(|j| i + j > cap && rhs.coeffs[j] != ZERO)
            });
        let mut out = TaylorSeries::with_cap(coeffs, cap);
        out.truncated = dropped || self.truncated || rhs.truncated;
        out
    }
}
