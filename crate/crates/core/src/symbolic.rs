//! Closed forms for the iterates Wⁿ = W_(u_n, ψⁿ), where
//! u_n = ∏_{j<n} u∘ψ^j.
//!
//! Three parameter regimes admit a closed form:
//!
//! * `A1`: a = 1 with the forced kernel weight u = u(0)K_{-b}; then
//!   u_n = u(0)ⁿ e^{-|b|² n(n-1)/2} K_{-nb}.
//! * `U`: |a| = 1, a ≠ 1 with u = u(0)K_{-conj(a)b}; then u_n = u(0)ⁿ e^{h_n}
//!   with h_n affine in z.
//! * `C`: |a| < 1 with an exp-quadratic weight; then u_n = e^{S_n}, S_n
//!   quadratic in z.
//!
//! Everything else is regime `P`: no closed form, evaluate the literal
//! product.

use crate::base::{AffineSymbol, Cx, Tolerance, Weight, WeightedComposition, ONE, ZERO};
use crate::error::{Error, Result};

/// Σ_{j<n} a^j
pub fn geometric_sum(a: Cx, n: usize) -> Cx {
    if (ONE - a).norm() < 1e-3 && n <= 1 << 20 {
        let mut acc = ZERO;
        let mut pow = ONE;
        for _ in 0..n {
            acc += pow;
            pow *= a;
        }
        acc
    } else {
        (ONE - a.powu(n as u32)) / (ONE - a)
    }
}

/// ψⁿ, with ψ⁰ the identity.
pub fn symbol_iterate(psi: &AffineSymbol, n: usize) -> AffineSymbol {
    if n == 0 {
        return AffineSymbol::identity();
    }
    AffineSymbol {
        a: psi.a.powu(n as u32),
        b: psi.b * geometric_sum(psi.a, n),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// a = 1, kernel weight.
    A1,
    /// |a| = 1, a ≠ 1, kernel weight.
    U,
    /// |a| < 1, exp-quadratic weight.
    C,
    /// No closed form.
    P,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::A1 => "A1",
            Regime::U => "U",
            Regime::C => "C",
            Regime::P => "P",
        }
    }
}

/// log u_n(z) = constant + linear·z + quadratic·z².
///
/// The constant may carry real part −∞ when u(0) = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterateExponent {
    pub constant: Cx,
    pub linear: Cx,
    pub quadratic: Cx,
}

impl IterateExponent {
    pub const ZERO: IterateExponent = IterateExponent {
        constant: ZERO,
        linear: ZERO,
        quadratic: ZERO,
    };

    pub fn log_eval(&self, z: Cx) -> Cx {
        self.constant + self.linear * z + self.quadratic * z * z
    }

    pub fn eval(&self, z: Cx) -> Cx {
        let e = self.log_eval(z);
        if e.re == f64::NEG_INFINITY {
            ZERO
        } else {
            e.exp()
        }
    }
}

/// Regime-specific pieces of the closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IteratePayload {
    Translation {
        /// u(0)ⁿ
        scalar: Cx,
        /// −|b|² n(n−1)/2
        gaussian_exponent: f64,
        /// −n b
        kernel_index: Cx,
    },
    Rotation {
        scalar: Cx,
        /// h_n(z) = h_constant + h_linear·z
        h_constant: Cx,
        h_linear: Cx,
    },
    Contraction {
        constant: Cx,
        linear: Cx,
        quadratic: Cx,
    },
    Product,
}

/// Closed-form description of u_n and ψⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateForm {
    pub n: usize,
    pub regime: Regime,
    pub symbol: AffineSymbol,
    pub payload: IteratePayload,
    exponent: Option<IterateExponent>,
}

impl IterateForm {
    /// log u_n as a quadratic polynomial; `None` in regime P.
    pub fn exponent(&self) -> Option<IterateExponent> {
        self.exponent
    }

    /// u_n(z) from the closed form. Evaluation is done on the exponent so
    /// that |u(0)|ⁿ underflow and e^{h_n} overflow cancel before exponentiating.
    pub fn eval(&self, z: Cx) -> Result<Cx> {
        let e = self.exponent.ok_or(Error::WrongRegime {
            expected: "A1, U or C",
            found: "P",
        })?;
        let v = e.eval(z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Range("closed-form iterate weight"))
        }
    }
}

/// n·ln(u0) with principal branch; real part −∞ when u0 = 0.
fn scaled_log(u0: Cx, n: usize) -> Cx {
    if n == 0 {
        return ZERO;
    }
    if u0 == ZERO {
        return Cx::new(f64::NEG_INFINITY, 0.0);
    }
    u0.ln() * n as f64
}

/// Regime of (u, ψ) and, for kernel weights on |a| = 1, a consistency
/// check of the kernel index.
pub fn regime_of(op: &WeightedComposition, tol: Tolerance) -> Result<Regime> {
    let a = op.symbol.a;
    let b = op.symbol.b;
    let unimodular = tol.is_unimodular(a);
    match &op.weight {
        Weight::Kernel { w, .. } if unimodular => {
            let expected = -(a.conj() * b);
            if (*w - expected).norm() > tol.eps.max(1e-12) * (1.0 + expected.norm()) {
                return Err(Error::KernelIndexMismatch { expected, found: *w });
            }
            Ok(if tol.is_one(a) { Regime::A1 } else { Regime::U })
        }
        Weight::ExpQuad { .. } if a.norm() < 1.0 && !unimodular => Ok(Regime::C),
        Weight::Kernel { u0, .. } if a.norm() < 1.0 && !unimodular && *u0 != ZERO => Ok(Regime::C),
        _ => Ok(Regime::P),
    }
}

pub fn weight_iterate_closed(op: &WeightedComposition, n: usize, tol: Tolerance) -> Result<IterateForm> {
    let regime = regime_of(op, tol)?;
    let psi = op.symbol;
    let symbol = symbol_iterate(&psi, n);
    let (a, b) = (psi.a, psi.b);
    let nf = n as f64;
    let (payload, exponent) = match regime {
        Regime::A1 => {
            let u0 = op.weight.value_at_zero();
            let gaussian_exponent = -b.norm_sqr() * nf * (nf - 1.0) / 2.0;
            let kernel_index = -b * nf;
            let e = IterateExponent {
                constant: scaled_log(u0, n) + gaussian_exponent,
                linear: kernel_index.conj(),
                quadratic: ZERO,
            };
            (
                IteratePayload::Translation {
                    scalar: u0.powu(n as u32),
                    gaussian_exponent,
                    kernel_index,
                },
                Some(e),
            )
        }
        Regime::U => {
            let u0 = op.weight.value_at_zero();
            let g1 = geometric_sum(a, n);
            let lead = -(a * b.conj());
            let h_linear = lead * g1;
            let h_constant = -(a * b.norm_sqr()) / (ONE - a) * (Cx::from(nf) - g1);
            let e = IterateExponent {
                constant: scaled_log(u0, n) + h_constant,
                linear: h_linear,
                quadratic: ZERO,
            };
            (
                IteratePayload::Rotation {
                    scalar: u0.powu(n as u32),
                    h_constant,
                    h_linear,
                },
                Some(e),
            )
        }
        Regime::C => {
            let (a0, a1, a2) = op.weight.exp_quad_coeffs().expect("regime C weight is exp-quadratic");
            let e = contraction_exponent(a, b, a0, a1, a2, n);
            (
                IteratePayload::Contraction {
                    constant: e.constant,
                    linear: e.linear,
                    quadratic: e.quadratic,
                },
                Some(e),
            )
        }
        Regime::P => (IteratePayload::Product, None),
    };
    Ok(IterateForm {
        n,
        regime,
        symbol,
        payload,
        exponent,
    })
}

/// S_n for ψ(z) = az + b and u = exp(a0 + a1 z + a2 z²), |a| < 1.
fn contraction_exponent(a: Cx, b: Cx, a0: Cx, a1: Cx, a2: Cx, n: usize) -> IterateExponent {
    if n == 0 {
        return IterateExponent::ZERO;
    }
    let nf = Cx::from(n as f64);
    let z0 = b / (ONE - a);
    let g1 = geometric_sum(a, n);
    let g2 = geometric_sum(a * a, n);
    IterateExponent {
        constant: a0 * nf + a1 * z0 * (nf - g1) + a2 * z0 * z0 * (nf - g1 * 2.0 + g2),
        linear: a1 * g1 + a2 * z0 * (g1 - g2) * 2.0,
        quadratic: a2 * g2,
    }
}

/// Literal product ∏_{j<n} u(ψ^j(z)); the oracle for every closed form.
pub fn weight_iterate_product(op: &WeightedComposition, n: usize, z: Cx) -> Result<Cx> {
    let mut acc = ONE;
    let mut zj = z;
    for _ in 0..n {
        acc *= op.weight.eval(zj)?;
        zj = op.symbol.eval(zj);
    }
    if acc.re.is_finite() && acc.im.is_finite() {
        Ok(acc)
    } else {
        Err(Error::Range("iterate product"))
    }
}

/// (c_n, t_n, p_n, q_n) with
/// M(u_n, ψⁿ) = e^{c_n} sup_z e^{Re(t_n z) + Re(p_n z²) − q_n |z|²}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterateCoefficients {
    pub c: f64,
    pub t: Cx,
    pub p: Cx,
    pub q: f64,
}

pub fn iterate_coefficients(op: &WeightedComposition, n: usize, tol: Tolerance) -> Result<IterateCoefficients> {
    let regime = regime_of(op, tol)?;
    if regime != Regime::C {
        return Err(Error::WrongRegime {
            expected: "C",
            found: regime.name(),
        });
    }
    let (a, b) = (op.symbol.a, op.symbol.b);
    let (a0, a1, a2) = op.weight.exp_quad_coeffs().expect("regime C weight is exp-quadratic");
    let s = contraction_exponent(a, b, a0, a1, a2, n);
    let an = a.powu(n as u32);
    let shift = b * geometric_sum(a, n);
    Ok(IterateCoefficients {
        c: s.constant.re + 0.5 * shift.norm_sqr(),
        t: s.linear + shift.conj() * an,
        p: a2 * geometric_sum(a * a, n),
        q: 0.5 * (1.0 - an.norm_sqr()),
    })
}

const U_INF_TOL: f64 = 1e-10;

/// The limit u_∞ = ∏_{j≥0} u∘ψ^j for |a| < 1 and u(z₀) = 1 on the zero
/// branch of log u(z₀).
pub fn u_infinity(op: &WeightedComposition, tol: Tolerance) -> Result<Weight> {
    let (a, b) = (op.symbol.a, op.symbol.b);
    if !(a.norm() < 1.0) || tol.is_unimodular(a) {
        return Err(Error::Domain(format!("u_infinity requires |a| < 1, got |a| = {}", a.norm())));
    }
    let (a0, a1, a2) = op.weight.exp_quad_coeffs().ok_or(Error::WrongRegime {
        expected: "exp-quadratic weight",
        found: op.weight.variant_name(),
    })?;
    let z0 = b / (ONE - a);
    let at_fixed = a0 + a1 * z0 + a2 * z0 * z0;
    let value = at_fixed.exp();
    if (value - ONE).norm() > U_INF_TOL {
        return Err(Error::ProductDiverges { value });
    }
    if at_fixed.norm() > U_INF_TOL {
        return Err(Error::BranchMismatch { exponent: at_fixed });
    }
    // n-linear part of S_n is n·log u(z₀) = 0; the rest converges as aⁿ → 0.
    let g1 = ONE / (ONE - a);
    let g2 = ONE / (ONE - a * a);
    Weight::exp_quad(
        -(a1 * z0 * g1) + a2 * z0 * z0 * (g2 - g1 * 2.0),
        a1 * g1 + a2 * z0 * (g1 - g2) * 2.0,
        a2 * g2,
    )
}

/// |1−a²|/(1−|a|²) − |1−a^{2n}|/(1−|a|^{2n}), nonnegative for |a| < 1.
pub fn techlemma_margin(a: Cx, n: usize) -> Result<f64> {
    let r2 = a.norm_sqr();
    if r2 >= 1.0 {
        return Err(Error::Domain(format!("techlemma_margin requires |a| < 1, got |a| = {}", a.norm())));
    }
    if n == 0 {
        return Err(Error::Domain("techlemma_margin requires n >= 1".into()));
    }
    let a2 = a * a;
    let lhs = (ONE - a2).norm() / (1.0 - r2);
    let rhs = (ONE - a2.powu(n as u32)).norm() / (1.0 - r2.powi(n as i32));
    Ok(lhs - rhs)
}
