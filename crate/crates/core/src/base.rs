//! Value types shared by every other module: complex scalars, affine
//! symbols, weights and the Fock exponent.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::TaylorSeries;

pub type Cx = Complex64;

/// Tolerance used when a classification dichotomizes on an exact
/// condition such as `a = 1` or `|a| = 1`.
pub const DEFAULT_TOL: f64 = 1e-12;

pub(crate) const ZERO: Cx = Cx::new(0.0, 0.0);
pub(crate) const ONE: Cx = Cx::new(1.0, 0.0);

pub(crate) fn is_finite(z: Cx) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn check_finite(z: Cx, what: &'static str) -> Result<Cx> {
    if is_finite(z) {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `ln(k!)` for `k = 0..len`.
pub fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0f64;
    for k in 0..len {
        if k > 1 {
            acc += (k as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Comparison policy for exact-looking conditions on user-supplied
/// floating-point parameters. `eps = 0` demands bitwise exactness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eps: DEFAULT_TOL }
    }
}

impl Tolerance {
    pub const EXACT: Tolerance = Tolerance { eps: 0.0 };

    pub const fn new(eps: f64) -> Self {
        Self { eps }
    }

    pub fn is_zero(&self, z: Cx) -> bool {
        z.norm() <= self.eps
    }

    pub fn near(&self, x: Cx, y: Cx) -> bool {
        (x - y).norm() <= self.eps
    }

    pub fn is_one(&self, a: Cx) -> bool {
        self.near(a, ONE)
    }

    pub fn is_unimodular(&self, a: Cx) -> bool {
        (a.norm() - 1.0).abs() <= self.eps
    }

    pub fn real_eq(&self, x: f64, y: f64) -> bool {
        (x - y).abs() <= self.eps
    }
}

/// The fixed point of an affine symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint {
    pub point: Cx,
    /// Set for the identity symbol, where every point is fixed and `point`
    /// is the distinguished value 0.
    pub every_point_fixed: bool,
}

/// ψ(z) = a·z + b.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineSymbol {
    pub a: Cx,
    pub b: Cx,
}

impl AffineSymbol {
    pub fn new(a: Cx, b: Cx) -> Result<Self> {
        Ok(Self {
            a: check_finite(a, "symbol coefficient a")?,
            b: check_finite(b, "symbol coefficient b")?,
        })
    }

    pub const fn identity() -> Self {
        Self { a: ONE, b: ZERO }
    }

    pub fn eval(&self, z: Cx) -> Cx {
        self.a * z + self.b
    }

    /// `self ∘ inner`, i.e. z ↦ self(inner(z)).
    pub fn compose(&self, inner: &AffineSymbol) -> AffineSymbol {
        AffineSymbol {
            a: self.a * inner.a,
            b: self.a * inner.b + self.b,
        }
    }

    pub fn fixed_point(&self, tol: Tolerance) -> Result<FixedPoint> {
        if tol.is_one(self.a) {
            if tol.is_zero(self.b) {
                Ok(FixedPoint {
                    point: ZERO,
                    every_point_fixed: true,
                })
            } else {
                Err(Error::NoFixedPoint { b: self.b })
            }
        } else {
            Ok(FixedPoint {
                point: self.b / (ONE - self.a),
                every_point_fixed: false,
            })
        }
    }
}

/// (|ψ(z)|² − |z|²)/2, the Gaussian part of the growth quantity.
pub fn symbol_exponent_growth(psi: &AffineSymbol, z: Cx) -> f64 {
    0.5 * (psi.eval(z).norm_sqr() - z.norm_sqr())
}

pub fn eval_symbol(psi: &AffineSymbol, z: Cx) -> Cx {
    psi.eval(z)
}

pub fn fixed_point(psi: &AffineSymbol, tol: Tolerance) -> Result<FixedPoint> {
    psi.fixed_point(tol)
}

/// Multiplier u of the operator f ↦ u·(f∘ψ).
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    /// u(z) = u0·exp(conj(w)·z), a multiple of the reproducing kernel K_w.
    Kernel { u0: Cx, w: Cx },
    /// u(z) = exp(a0 + a1·z + a2·z²).
    ExpQuad { a0: Cx, a1: Cx, a2: Cx },
    /// Polynomial given by its Taylor coefficients at 0.
    Taylor { coeffs: Vec<Cx> },
}

impl Weight {
    pub fn kernel(u0: Cx, w: Cx) -> Result<Self> {
        Ok(Weight::Kernel {
            u0: check_finite(u0, "kernel weight u0")?,
            w: check_finite(w, "kernel weight index w")?,
        })
    }

    pub fn exp_quad(a0: Cx, a1: Cx, a2: Cx) -> Result<Self> {
        Ok(Weight::ExpQuad {
            a0: check_finite(a0, "exp-quadratic a0")?,
            a1: check_finite(a1, "exp-quadratic a1")?,
            a2: check_finite(a2, "exp-quadratic a2")?,
        })
    }

    pub fn taylor(coeffs: Vec<Cx>) -> Result<Self> {
        if coeffs.iter().any(|c| !is_finite(*c)) {
            return Err(Error::NonFinite("Taylor weight coefficient"));
        }
        Ok(Weight::Taylor { coeffs })
    }

    /// The constant weight u ≡ c.
    pub fn constant(c: Cx) -> Self {
        Weight::Kernel { u0: c, w: ZERO }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Weight::Kernel { .. } => "kernel",
            Weight::ExpQuad { .. } => "exp_quad",
            Weight::Taylor { .. } => "taylor",
        }
    }

    pub fn eval(&self, z: Cx) -> Result<Cx> {
        let v = match self {
            Weight::Kernel { u0, w } => *u0 * (w.conj() * z).exp(),
            Weight::ExpQuad { a0, a1, a2 } => (*a0 + *a1 * z + *a2 * z * z).exp(),
            Weight::Taylor { coeffs } => coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c),
        };
        if is_finite(v) {
            Ok(v)
        } else {
            Err(Error::Range("weight"))
        }
    }

    pub fn value_at_zero(&self) -> Cx {
        match self {
            Weight::Kernel { u0, .. } => *u0,
            Weight::ExpQuad { a0, .. } => a0.exp(),
            Weight::Taylor { coeffs } => coeffs.first().copied().unwrap_or(ZERO),
        }
    }

    /// Exponent coefficients (a0, a1, a2) when u = exp(quadratic). Kernel
    /// weights with u0 ≠ 0 use the principal logarithm of u0.
    pub fn exp_quad_coeffs(&self) -> Option<(Cx, Cx, Cx)> {
        match self {
            Weight::Kernel { u0, w } if *u0 != ZERO => Some((u0.ln(), w.conj(), ZERO)),
            Weight::ExpQuad { a0, a1, a2 } => Some((*a0, *a1, *a2)),
            _ => None,
        }
    }

    /// Whether u has no zeros in ℂ.
    pub fn is_nonvanishing(&self) -> bool {
        match self {
            Weight::Kernel { u0, .. } => *u0 != ZERO,
            Weight::ExpQuad { .. } => true,
            Weight::Taylor { coeffs } => {
                coeffs.first().is_some_and(|c| *c != ZERO) && coeffs.iter().skip(1).all(|c| *c == ZERO)
            }
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            Weight::Kernel { u0, .. } => *u0 == ZERO,
            Weight::ExpQuad { .. } => false,
            Weight::Taylor { coeffs } => coeffs.iter().all(|c| *c == ZERO),
        }
    }

    /// Raw Taylor coefficients at 0 up to `degree`.
    pub fn taylor_series(&self, degree: usize) -> TaylorSeries {
        let coeffs = match self {
            Weight::Kernel { u0, w } => {
                let wc = w.conj();
                let mut out = Vec::with_capacity(degree + 1);
                let mut c = *u0;
                for j in 0..=degree {
                    out.push(c);
                    c = c * wc / (j + 1) as f64;
                }
                out
            }
            Weight::ExpQuad { a0, a1, a2 } => {
                // f' = (a1 + 2 a2 z) f
                let mut out = vec![ZERO; degree + 1];
                out[0] = a0.exp();
                for j in 0..degree {
                    let mut s = *a1 * out[j];
                    if j >= 1 {
                        s += *a2 * 2.0 * out[j - 1];
                    }
                    out[j + 1] = s / (j + 1) as f64;
                }
                out
            }
            Weight::Taylor { coeffs } => coeffs.iter().take(degree + 1).copied().collect(),
        };
        TaylorSeries::with_cap(coeffs, degree)
    }

    /// Coefficients of u in the orthonormal basis zⁿ/√(n!) of F₂, for
    /// n = 0..len. Computed directly in the scaled basis so nothing
    /// overflows or underflows for large n.
    pub fn normalized_coeffs(&self, len: usize) -> Vec<Cx> {
        let mut out = vec![ZERO; len];
        if len == 0 {
            return out;
        }
        match self {
            Weight::Kernel { u0, w } => {
                let wc = w.conj();
                out[0] = *u0;
                for j in 1..len {
                    out[j] = out[j - 1] * wc / (j as f64).sqrt();
                }
            }
            Weight::ExpQuad { a0, a1, a2 } => {
                out[0] = a0.exp();
                for j in 0..len - 1 {
                    let jf = j as f64;
                    let mut s = *a1 * out[j] / (jf + 1.0).sqrt();
                    if j >= 1 {
                        s += *a2 * 2.0 * out[j - 1] * (jf / (jf + 1.0)).sqrt();
                    }
                    out[j + 1] = s;
                }
            }
            Weight::Taylor { coeffs } => {
                let lf = ln_factorials(len);
                for (j, c) in coeffs.iter().take(len).enumerate() {
                    out[j] = *c * (0.5 * lf[j]).exp();
                }
            }
        }
        out
    }
}

pub fn eval_weight(u: &Weight, z: Cx) -> Result<Cx> {
    u.eval(z)
}

/// Exponent p of the Fock space F_p, with p = ∞ as its own tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FockParams {
    Finite(f64),
    Infinite,
}

impl FockParams {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(FockParams::Finite(p))
        } else if p == f64::INFINITY {
            Ok(FockParams::Infinite)
        } else {
            Err(Error::Domain(format!("Fock exponent must satisfy p >= 1, got {p}")))
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            FockParams::Finite(p) => *p,
            FockParams::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, FockParams::Infinite)
    }
}

/// The pair (u, ψ) defining W f = u·(f∘ψ).
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComposition {
    pub weight: Weight,
    pub symbol: AffineSymbol,
}

impl WeightedComposition {
    pub fn new(weight: Weight, symbol: AffineSymbol) -> Self {
        Self { weight, symbol }
    }

    /// (W f)(z) for an arbitrary function value provider `f`.
    pub fn apply_at<F: Fn(Cx) -> Cx>(&self, f: F, z: Cx) -> Result<Cx> {
        Ok(self.weight.eval(z)? * f(self.symbol.eval(z)))
    }
}
