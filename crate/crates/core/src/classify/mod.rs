//! Decision procedures for boundedness, compactness, power boundedness,
//! iterate norms, spectra and mean ergodicity of W = W_(u,ψ).
//!
//! Every answer is a [`Verdict`] carrying a human-readable reason and a
//! short anchor naming the criterion that decided it.

mod ergodic;
mod growth;
mod spectrum;

pub use ergodic::{ergodicity, ergodicity_with, ErgodicLimit, ErgodicVerdict};
pub use growth::{
    growth_sup, log_growth_at, numeric_log_sup, polar_grid_max, refine_max, ring_maxima, GrowthExponent, GrowthSup,
};
pub use spectrum::{
    root_of_unity_order, rotation_eigenvalue, spectrum, spectrum_with, SpectrumDescriptor, DEFAULT_MAX_ORDER,
    ROOT_OF_UNITY_TOL,
};

use crate::base::{symbol_exponent_growth, Cx, FockParams, Tolerance, Weight, WeightedComposition, ONE, ZERO};
use crate::error::{Error, Result};
use crate::symbolic::{iterate_coefficients, regime_of, symbol_iterate, weight_iterate_product, Regime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictValue {
    Yes,
    No,
    Undetermined,
}

impl VerdictValue {
    pub fn name(&self) -> &'static str {
        match self {
            VerdictValue::Yes => "yes",
            VerdictValue::No => "no",
            VerdictValue::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub value: VerdictValue,
    pub reason: String,
    pub anchor: &'static str,
    /// Set when the decision rests on a grid search instead of a closed form.
    pub numeric_only: bool,
}

impl Verdict {
    fn new(value: VerdictValue, anchor: &'static str, reason: impl Into<String>) -> Self {
        Self {
            value,
            reason: reason.into(),
            anchor,
            numeric_only: false,
        }
    }

    pub fn yes(anchor: &'static str, reason: impl Into<String>) -> Self {
        Self::new(VerdictValue::Yes, anchor, reason)
    }

    pub fn no(anchor: &'static str, reason: impl Into<String>) -> Self {
        Self::new(VerdictValue::No, anchor, reason)
    }

    pub fn undetermined(anchor: &'static str, reason: impl Into<String>) -> Self {
        Self::new(VerdictValue::Undetermined, anchor, reason)
    }

    fn numeric(mut self) -> Self {
        self.numeric_only = true;
        self
    }

    pub fn is_yes(&self) -> bool {
        self.value == VerdictValue::Yes
    }
}

pub const ANCHOR_BOUNDED: &str = "growth-quantity boundedness criterion";
pub const ANCHOR_COMPACT: &str = "exp-quadratic compactness criterion";
pub const ANCHOR_PB_UNIMODULAR: &str = "unimodular-dilation power-boundedness criterion";
pub const ANCHOR_PB_COMPACT: &str = "compact power-boundedness criterion";
pub const ANCHOR_PB_SUFFICIENT: &str = "fixed-point sufficient condition";
pub const ANCHOR_PB_NECESSARY: &str = "fixed-point necessary condition";
pub const ANCHOR_PB_SUP_NORM: &str = "sup-norm fixed-point criterion";
pub const ANCHOR_NORM_EXACT: &str = "unimodular iterate-norm identity";
pub const ANCHOR_NORM_SUP: &str = "sup-norm iterate-norm identity";
pub const ANCHOR_NORM_SANDWICH: &str = "iterate-norm sandwich";

/// Boundedness on every F_p, 1 ≤ p ≤ ∞: |a| ≤ 1 and M(u,ψ) < ∞. The
/// criterion does not depend on p.
pub fn is_bounded(op: &WeightedComposition, tol: Tolerance) -> Verdict {
    let a = op.symbol.a;
    if op.weight.is_identically_zero() {
        return Verdict::yes(ANCHOR_BOUNDED, "zero weight gives the zero operator");
    }
    if a.norm() > 1.0 && !tol.is_unimodular(a) {
        return Verdict::no(ANCHOR_BOUNDED, format!("|a| = {} exceeds 1", a.norm()));
    }
    let m = growth_sup(op, tol);
    let v = if m.is_finite() {
        Verdict::yes(ANCHOR_BOUNDED, format!("M(u,psi) = {} is finite", m.value))
    } else {
        Verdict::no(ANCHOR_BOUNDED, "M(u,psi) is infinite")
    };
    if m.numeric_only {
        v.numeric()
    } else {
        v
    }
}

/// Compactness on every F_p; like boundedness it does not depend on p.
pub fn is_compact(op: &WeightedComposition, tol: Tolerance) -> Verdict {
    let a = op.symbol.a;
    if op.weight.is_identically_zero() {
        return Verdict::yes(ANCHOR_COMPACT, "zero operator");
    }
    if !is_bounded(op, tol).is_yes() {
        return Verdict::no(ANCHOR_COMPACT, "operator is unbounded");
    }
    if tol.is_unimodular(a) || a.norm() >= 1.0 {
        return Verdict::no(ANCHOR_COMPACT, "compactness forces |a| < 1");
    }
    let q = 0.5 * (1.0 - a.norm_sqr());
    match &op.weight {
        Weight::Kernel { .. } => Verdict::yes(ANCHOR_COMPACT, "kernel weight with |a| < 1 (a2 = 0)"),
        Weight::ExpQuad { a2, .. } => {
            if q - a2.norm() > tol.eps {
                Verdict::yes(ANCHOR_COMPACT, format!("|a2| = {} < (1-|a|^2)/2 = {q}", a2.norm()))
            } else {
                Verdict::no(ANCHOR_COMPACT, format!("|a2| = {} >= (1-|a|^2)/2 = {q}", a2.norm()))
            }
        }
        Weight::Taylor { .. } => {
            let rings = ring_maxima(|z| log_growth_at(op, z), &[10.0, 20.0, 40.0], 512);
            let decaying = rings.windows(2).all(|w| w[1] < w[0]) && rings[2] < -30.0;
            let v = if decaying {
                Verdict::yes(ANCHOR_COMPACT, "growth integrand decays along |z| = R")
            } else {
                Verdict::no(ANCHOR_COMPACT, "growth integrand does not decay along |z| = R")
            };
            v.numeric()
        }
    }
}

fn abs_weight_at_fixed_point(op: &WeightedComposition) -> f64 {
    let z0 = op.symbol.b / (ONE - op.symbol.a);
    op.weight.eval(z0).map_or(f64::INFINITY, |v| v.norm())
}

/// sup_n ‖Wⁿ‖ < ∞ on F_p.
pub fn power_bounded(op: &WeightedComposition, p: FockParams, tol: Tolerance) -> Verdict {
    let (a, b) = (op.symbol.a, op.symbol.b);
    if !is_bounded(op, tol).is_yes() {
        return Verdict::no(ANCHOR_BOUNDED, "operator is unbounded");
    }
    if op.weight.is_identically_zero() {
        return Verdict::yes(ANCHOR_PB_UNIMODULAR, "zero operator");
    }
    if tol.is_unimodular(a) {
        let u0 = op.weight.value_at_zero().norm();
        let threshold = (-0.5 * b.norm_sqr()).exp();
        let text = format!("|u(0)| = {u0} vs e^(-|b|^2/2) = {threshold}");
        return if u0 <= threshold * (1.0 + tol.eps) {
            Verdict::yes(ANCHOR_PB_UNIMODULAR, text)
        } else {
            Verdict::no(ANCHOR_PB_UNIMODULAR, text)
        };
    }
    let uz0 = abs_weight_at_fixed_point(op);
    let slack = 1.0 + tol.eps;
    if is_compact(op, tol).is_yes() && op.weight.is_nonvanishing() {
        let text = format!("compact, non-vanishing weight, |u(z0)| = {uz0}");
        return if uz0 <= slack {
            Verdict::yes(ANCHOR_PB_COMPACT, text)
        } else {
            Verdict::no(ANCHOR_PB_COMPACT, text)
        };
    }
    let pv = match p {
        FockParams::Infinite => {
            let text = format!("p = inf, |u(z0)| = {uz0}");
            return if uz0 <= slack {
                Verdict::yes(ANCHOR_PB_SUP_NORM, text)
            } else {
                Verdict::no(ANCHOR_PB_SUP_NORM, text)
            };
        }
        FockParams::Finite(p) => p,
    };
    if uz0 > slack {
        return Verdict::no(ANCHOR_PB_NECESSARY, format!("|u(z0)| = {uz0} > 1"));
    }
    if tol.is_zero(a) {
        return Verdict::undetermined(
            ANCHOR_PB_SUFFICIENT,
            "a = 0 makes the sufficient condition |u(z0)| <= |a|^(2/p) vacuous",
        );
    }
    let threshold = a.norm().powf(2.0 / pv);
    if uz0 <= threshold * slack {
        Verdict::yes(ANCHOR_PB_SUFFICIENT, format!("|u(z0)| = {uz0} <= |a|^(2/p) = {threshold}"))
    } else {
        Verdict::undetermined(
            ANCHOR_PB_SUFFICIENT,
            format!("|a|^(2/p) = {threshold} < |u(z0)| = {uz0} <= 1: neither condition decides"),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormBound {
    Exact(f64),
    Bounds { lo: f64, hi: f64 },
}

impl NormBound {
    pub fn upper(&self) -> f64 {
        match self {
            NormBound::Exact(v) => *v,
            NormBound::Bounds { hi, .. } => *hi,
        }
    }

    pub fn lower(&self) -> f64 {
        match self {
            NormBound::Exact(v) => *v,
            NormBound::Bounds { lo, .. } => *lo,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormClosed {
    pub bound: NormBound,
    pub anchor: &'static str,
    /// Set when M(u_n, ψⁿ) came from a grid search.
    pub numeric_only: bool,
}

/// M(u_n, ψⁿ), closed form where the iterate weight is exp-quadratic.
pub fn iterate_growth_sup(op: &WeightedComposition, n: usize, tol: Tolerance) -> Result<GrowthSup> {
    if op.weight.is_identically_zero() {
        return Ok(GrowthSup {
            value: 0.0,
            numeric_only: false,
        });
    }
    match regime_of(op, tol)? {
        Regime::C => {
            let k = iterate_coefficients(op, n, tol)?;
            let g = GrowthExponent {
                k: k.c,
                t: k.t,
                p: k.p,
                q: k.q,
            };
            Ok(GrowthSup {
                value: g.sup(tol).exp(),
                numeric_only: false,
            })
        }
        _ => {
            let psi_n = symbol_iterate(&op.symbol, n);
            let f = |z: Cx| {
                let u = weight_iterate_product(op, n, z).map_or(f64::INFINITY, |v| v.norm());
                u.ln() + symbol_exponent_growth(&psi_n, z)
            };
            Ok(GrowthSup {
                value: numeric_log_sup(f).exp(),
                numeric_only: true,
            })
        }
    }
}

/// ‖Wⁿ‖ on F_p: exact for |a| = 1 and for p = ∞, a two-sided bound otherwise.
pub fn norm_closed(op: &WeightedComposition, n: usize, p: FockParams, tol: Tolerance) -> Result<NormClosed> {
    if n == 0 {
        return Err(Error::Domain("norm_closed requires n >= 1".into()));
    }
    if !is_bounded(op, tol).is_yes() {
        return Err(Error::Domain("norm_closed requires a bounded operator".into()));
    }
    let (a, b) = (op.symbol.a, op.symbol.b);
    if tol.is_unimodular(a) {
        let u0 = op.weight.value_at_zero();
        let v = if u0 == ZERO {
            0.0
        } else {
            (n as f64 * (u0.norm().ln() + 0.5 * b.norm_sqr())).exp()
        };
        return Ok(NormClosed {
            bound: NormBound::Exact(v),
            anchor: ANCHOR_NORM_EXACT,
            numeric_only: false,
        });
    }
    let m = iterate_growth_sup(op, n, tol)?;
    let an = a.norm().powi(n as i32);
    let (bound, anchor) = match p {
        FockParams::Infinite => (NormBound::Exact(m.value), ANCHOR_NORM_SUP),
        FockParams::Finite(p) => (
            NormBound::Bounds {
                lo: m.value,
                hi: if an == 0.0 { f64::INFINITY } else { an.powf(-2.0 / p) * m.value },
            },
            ANCHOR_NORM_SANDWICH,
        ),
    };
    Ok(NormClosed {
        bound,
        anchor,
        numeric_only: m.numeric_only,
    })
}
