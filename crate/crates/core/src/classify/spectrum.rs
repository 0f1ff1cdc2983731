//! Spectra of bounded weighted composition operators with affine symbols.

use crate::base::{Cx, Tolerance, WeightedComposition, ONE, ZERO};
use crate::error::{Error, Result};

use super::{is_bounded, is_compact, VerdictValue};

pub const ROOT_OF_UNITY_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ORDER: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumDescriptor {
    Finite { points: Vec<Cx> },
    /// {0} ∪ {base·ratio^m : m ≥ 0}, |ratio| < 1.
    GeometricWithZero { base: Cx, ratio: Cx },
    /// {λ : |λ| = radius}.
    Circle { radius: f64 },
}

impl SpectrumDescriptor {
    pub fn tag(&self) -> &'static str {
        match self {
            SpectrumDescriptor::Finite { .. } => "finite",
            SpectrumDescriptor::GeometricWithZero { .. } => "geometric_with_zero",
            SpectrumDescriptor::Circle { .. } => "circle",
        }
    }

    /// Up to `count` explicit points of the set. For a geometric sequence
    /// the accumulation point 0 is listed last; a circle is sampled at
    /// equally spaced angles starting on the positive real axis.
    pub fn points(&self, count: usize) -> Vec<Cx> {
        match self {
            SpectrumDescriptor::Finite { points } => points.iter().take(count).copied().collect(),
            SpectrumDescriptor::GeometricWithZero { base, ratio } => {
                if count == 0 {
                    return Vec::new();
                }
                let mut out: Vec<Cx> = (0..count - 1).map(|m| base * ratio.powu(m as u32)).collect();
                out.push(ZERO);
                out
            }
            SpectrumDescriptor::Circle { radius } => (0..count)
                .map(|m| Cx::from_polar(*radius, std::f64::consts::TAU * m as f64 / count as f64))
                .collect(),
        }
    }

    /// Spectral radius.
    pub fn max_modulus(&self) -> f64 {
        match self {
            SpectrumDescriptor::Finite { points } => points.iter().map(|z| z.norm()).fold(0.0, f64::max),
            SpectrumDescriptor::GeometricWithZero { base, .. } => base.norm(),
            SpectrumDescriptor::Circle { radius } => *radius,
        }
    }
}

/// Smallest N ≤ `max_order` with |aᴺ − 1| ≤ 1e−9.
pub fn root_of_unity_order(a: Cx, max_order: usize) -> Result<Option<usize>> {
    if (a.norm() - 1.0).abs() > ROOT_OF_UNITY_TOL {
        return Err(Error::Domain(format!("root_of_unity_order requires |a| = 1, got |a| = {}", a.norm())));
    }
    let mut pow = ONE;
    for n in 1..=max_order {
        pow *= a;
        if (pow - ONE).norm() <= ROOT_OF_UNITY_TOL {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// The eigenvalue u(0)e^{a|b|²/(a−1)} = u(z₀) shared by all rotation cases.
pub fn rotation_eigenvalue(op: &WeightedComposition) -> Cx {
    let (a, b) = (op.symbol.a, op.symbol.b);
    op.weight.value_at_zero() * (a * b.norm_sqr() / (a - ONE)).exp()
}

/// Spectrum with the default root-of-unity search bound.
pub fn spectrum(op: &WeightedComposition, tol: Tolerance) -> Result<SpectrumDescriptor> {
    spectrum_with(op, tol, DEFAULT_MAX_ORDER)
}

pub fn spectrum_with(op: &WeightedComposition, tol: Tolerance, max_order: usize) -> Result<SpectrumDescriptor> {
    if is_bounded(op, tol).value != VerdictValue::Yes {
        return Err(Error::Domain("spectrum requires a bounded operator".into()));
    }
    let (a, b) = (op.symbol.a, op.symbol.b);
    let u0 = op.weight.value_at_zero();
    if op.weight.is_identically_zero() {
        return Ok(SpectrumDescriptor::Finite { points: vec![ZERO] });
    }
    if tol.is_unimodular(a) {
        if tol.is_one(a) {
            return Ok(if tol.is_zero(b) {
                SpectrumDescriptor::Finite { points: vec![u0] }
            } else {
                SpectrumDescriptor::Circle {
                    radius: u0.norm() * (0.5 * b.norm_sqr()).exp(),
                }
            });
        }
        let lambda = rotation_eigenvalue(op);
        return Ok(match root_of_unity_order(a, max_order)? {
            Some(order) => SpectrumDescriptor::Finite {
                points: (0..order).map(|m| lambda * a.powu(m as u32)).collect(),
            },
            None => SpectrumDescriptor::Circle {
                radius: u0.norm() * (0.5 * b.norm_sqr()).exp(),
            },
        });
    }
    if is_compact(op, tol).value != VerdictValue::Yes {
        return Err(Error::NotCovered(
            "bounded, non-compact operator with |a| < 1 has no known spectrum formula".into(),
        ));
    }
    let z0 = b / (ONE - a);
    let base = op.weight.eval(z0)?;
    if tol.is_zero(a) {
        let mut points = vec![ZERO];
        if base != ZERO {
            points.push(base);
        }
        return Ok(SpectrumDescriptor::Finite { points });
    }
    Ok(SpectrumDescriptor::GeometricWithZero { base, ratio: a })
}
