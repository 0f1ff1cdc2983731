//! Mean and uniform mean ergodicity, decided by a first-match table over
//! the known cases.

use crate::base::{Cx, FockParams, Tolerance, Weight, WeightedComposition, ONE};
use crate::symbolic::u_infinity;

use super::spectrum::{root_of_unity_order, ROOT_OF_UNITY_TOL};
use super::{is_bounded, is_compact, power_bounded, Verdict, DEFAULT_MAX_ORDER};

/// Limit of the Cesàro means (1/n)Σ_{k≤n} Wᵏ, when one is known.
#[derive(Clone, Debug, PartialEq)]
pub enum ErgodicLimit {
    Zero,
    /// f ↦ f(z₀)·u_∞.
    RankOne { u_inf: Weight, z0: Cx },
    Identity,
    /// (1/N)Σ_{k<N} Wᵏ for the period N of W.
    PeriodicAverage { period: usize },
    /// f ↦ f(0).
    EvalAtZero,
    Unknown,
}

impl ErgodicLimit {
    pub fn tag(&self) -> &'static str {
        match self {
            ErgodicLimit::Zero => "zero",
            ErgodicLimit::RankOne { .. } => "rank_one",
            ErgodicLimit::Identity => "identity",
            ErgodicLimit::PeriodicAverage { .. } => "periodic_average",
            ErgodicLimit::EvalAtZero => "eval_at_zero",
            ErgodicLimit::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicVerdict {
    pub mean: Verdict,
    pub uniform: Verdict,
    pub limit: ErgodicLimit,
    /// Row of the decision table that fired (1 to 7, 0 for unbounded input).
    pub case: u8,
}

const A_MULT: &str = "multiplication-operator ergodicity";
const A_COMPACT: &str = "compact power-bounded ergodicity";
const A_STRICT: &str = "strict unimodular decay";
const A_PERIODIC: &str = "periodic rotation";
const A_ROTATION: &str = "rotation without unimodular eigenvalue one";
const A_NOT_UNIFORM: &str = "spectral accumulation on the unit circle";
const A_OTHER: &str = "not covered";

fn both(mean: Verdict, uniform: Verdict, limit: ErgodicLimit, case: u8) -> ErgodicVerdict {
    ErgodicVerdict {
        mean,
        uniform,
        limit,
        case,
    }
}

pub fn ergodicity(op: &WeightedComposition, p: FockParams, tol: Tolerance) -> ErgodicVerdict {
    ergodicity_with(op, p, tol, DEFAULT_MAX_ORDER)
}

fn unimodular_order(z: Cx, max_order: usize) -> Option<usize> {
    if (z.norm() - 1.0).abs() > ROOT_OF_UNITY_TOL {
        return None;
    }
    root_of_unity_order(z, max_order).ok().flatten()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn ergodicity_with(op: &WeightedComposition, p: FockParams, tol: Tolerance, max_order: usize) -> ErgodicVerdict {
    let (a, b) = (op.symbol.a, op.symbol.b);
    let u0 = op.weight.value_at_zero();
    if !is_bounded(op, tol).is_yes() {
        let r = "operator is unbounded";
        return both(Verdict::no(A_OTHER, r), Verdict::no(A_OTHER, r), ErgodicLimit::Unknown, 0);
    }
    let unimodular = tol.is_unimodular(a);

    // 1. multiplication by the constant u(0)
    if tol.is_one(a) && tol.is_zero(b) {
        if u0.norm() <= 1.0 + tol.eps {
            let limit = if tol.is_one(u0) {
                ErgodicLimit::Identity
            } else {
                ErgodicLimit::Zero
            };
            let r = format!("|u(0)| = {} <= 1", u0.norm());
            return both(Verdict::yes(A_MULT, &r), Verdict::yes(A_MULT, r), limit, 1);
        }
        let r = format!("|u(0)| = {} > 1", u0.norm());
        return both(Verdict::no(A_MULT, &r), Verdict::no(A_MULT, r), ErgodicLimit::Unknown, 1);
    }

    // 2. compact and power bounded
    if is_compact(op, tol).is_yes() && op.weight.is_nonvanishing() && power_bounded(op, p, tol).is_yes() {
        let z0 = b / (ONE - a);
        let uz0 = op.weight.eval(z0).unwrap_or(Cx::new(f64::INFINITY, 0.0));
        let limit = if tol.is_one(uz0) {
            match u_infinity(op, tol) {
                Ok(u_inf) => ErgodicLimit::RankOne { u_inf, z0 },
                Err(_) => ErgodicLimit::Unknown,
            }
        } else {
            // 1 lies outside {0} ∪ {u(z₀)aᵐ}, so the means tend to 0.
            ErgodicLimit::Zero
        };
        let r = format!("compact and power bounded, u(z0) = {uz0}");
        return both(Verdict::yes(A_COMPACT, &r), Verdict::yes(A_COMPACT, r), limit, 2);
    }

    let threshold = (-0.5 * b.norm_sqr()).exp();

    // 3. strictly inside the power-boundedness threshold
    if unimodular && u0.norm() < threshold * (1.0 - tol.eps) {
        let r = format!("|u(0)| = {} < e^(-|b|^2/2) = {threshold}", u0.norm());
        return both(Verdict::yes(A_STRICT, &r), Verdict::yes(A_STRICT, r), ErgodicLimit::Zero, 3);
    }

    let a_order = if unimodular { unimodular_order(a, max_order) } else { None };
    let caveat = format!("root-of-unity search up to order {max_order}");

    if unimodular && tol.is_zero(b) {
        let u_order = unimodular_order(u0, max_order);
        // 4. both roots of unity: W is periodic
        if let (Some(na), Some(nu)) = (a_order, u_order) {
            let period = na / gcd(na, nu) * nu;
            let r = format!("a and u(0) are roots of unity of orders {na} and {nu}");
            return both(
                Verdict::yes(A_PERIODIC, &r),
                Verdict::yes(A_PERIODIC, r),
                ErgodicLimit::PeriodicAverage { period },
                4,
            );
        }
        // 5. power bounded rotation, at most one of a, u(0) a root of unity
        if (u0.norm() - 1.0).abs() <= tol.eps.max(ROOT_OF_UNITY_TOL) {
            let mut pow = u0;
            let mut hits_one = false;
            for _ in 0..=max_order {
                if (pow - ONE).norm() <= ROOT_OF_UNITY_TOL {
                    hits_one = true;
                    break;
                }
                pow *= a;
            }
            let limit = if !hits_one {
                Some(ErgodicLimit::Zero)
            } else if tol.is_one(u0) && a_order.is_none() {
                Some(ErgodicLimit::EvalAtZero)
            } else {
                None
            };
            if let Some(limit) = limit {
                let why = match limit {
                    ErgodicLimit::Zero => "u(0)a^m != 1 for all m",
                    _ => "u(0) = 1 and a is not a root of unity",
                };
                let uniform = Verdict::no(A_ROTATION, format!("{why}; eigenvalues accumulate on the unit circle; {caveat}"));
                return match p {
                    FockParams::Finite(_) => both(
                        Verdict::yes(A_ROTATION, format!("{why}; {caveat}")),
                        uniform,
                        limit,
                        5,
                    ),
                    FockParams::Infinite => both(
                        Verdict::no(A_ROTATION, format!("{why}; Cesaro means do not converge on F_inf")),
                        uniform,
                        ErgodicLimit::Unknown,
                        5,
                    ),
                };
            }
        }
    }

    // 6. equality case with an irrational rotation
    if unimodular && !tol.is_one(a) && a_order.is_none() && tol.real_eq(u0.norm(), threshold) {
        let z0 = b / (ONE - a);
        if op.weight.eval(z0).is_ok_and(|v| tol.is_one(v)) {
            let uniform = Verdict::no(A_NOT_UNIFORM, format!("a is not a root of unity; {caveat}"));
            let mean = match p {
                FockParams::Finite(pv) if pv > 1.0 => {
                    Verdict::yes(A_NOT_UNIFORM, "power bounded on a reflexive space")
                }
                _ => Verdict::undetermined(A_NOT_UNIFORM, "F_1 and F_inf are not reflexive"),
            };
            return both(mean, uniform, ErgodicLimit::Unknown, 6);
        }
    }

    let r = "not covered by the known cases";
    both(
        Verdict::undetermined(A_OTHER, r),
        Verdict::undetermined(A_OTHER, r),
        ErgodicLimit::Unknown,
        7,
    )
}
