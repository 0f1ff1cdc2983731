//! JSON encodings of core types. Non-finite reals become the strings
//! "inf", "-inf" and "nan" since JSON numbers cannot carry them.

use fock_wco::classify::{ErgodicLimit, ErgodicVerdict, NormBound, NormClosed, SpectrumDescriptor, Verdict};
use fock_wco::{Cx, Weight};
use serde_json::{json, Value};

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn cx(z: Cx) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn weight(w: &Weight) -> Value {
    match w {
        Weight::Kernel { u0, w } => json!({"variant": "kernel", "u0": cx(*u0), "w": cx(*w)}),
        Weight::ExpQuad { a0, a1, a2 } => json!({"variant": "exp_quad", "a0": cx(*a0), "a1": cx(*a1), "a2": cx(*a2)}),
        Weight::Taylor { coeffs } => {
            json!({"variant": "taylor", "coeffs": coeffs.iter().map(|c| cx(*c)).collect::<Vec<_>>()})
        }
    }
}

pub fn verdict(v: &Verdict) -> Value {
    json!({
        "value": v.value.name(),
        "reason": v.reason,
        "anchor": v.anchor,
        "numeric_only": v.numeric_only,
    })
}

pub fn limit(l: &ErgodicLimit) -> Value {
    match l {
        ErgodicLimit::RankOne { u_inf, z0 } => json!({"tag": l.tag(), "u_inf": weight(u_inf), "z0": cx(*z0)}),
        ErgodicLimit::PeriodicAverage { period } => json!({"tag": l.tag(), "period": period}),
        _ => json!({"tag": l.tag()}),
    }
}

pub fn ergodicity(e: &ErgodicVerdict) -> Value {
    json!({
        "mean": verdict(&e.mean),
        "uniform": verdict(&e.uniform),
        "limit": limit(&e.limit),
        "case": e.case,
    })
}

pub fn norm_closed(n: &NormClosed) -> Value {
    let closed = match n.bound {
        NormBound::Exact(v) => json!({"kind": "exact", "value": num(v)}),
        NormBound::Bounds { lo, hi } => json!({"kind": "bounds", "lo": num(lo), "hi": num(hi)}),
    };
    json!({"closed": closed, "anchor": n.anchor, "numeric_only": n.numeric_only})
}

pub fn spectrum(s: &SpectrumDescriptor) -> Value {
    let params = match s {
        SpectrumDescriptor::Finite { points } => json!({"count": points.len()}),
        SpectrumDescriptor::GeometricWithZero { base, ratio } => json!({"base": cx(*base), "ratio": cx(*ratio)}),
        SpectrumDescriptor::Circle { radius } => json!({"radius": num(*radius)}),
    };
    json!({
        "tag": s.tag(),
        "params": params,
        "points": s.points(8).into_iter().map(cx).collect::<Vec<_>>(),
        "spectral_radius": num(s.max_modulus()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(num(f64::NAN), json!("nan"));
        assert_eq!(num(0.25), json!(0.25));
        assert_eq!(cx(Cx::new(1.0, -2.0)), json!([1.0, -2.0]));
    }

    #[test]
    fn geometric_spectrum_lists_zero_last() {
        let s = SpectrumDescriptor::GeometricWithZero {
            base: Cx::new(1.0, 0.0),
            ratio: Cx::new(0.5, 0.0),
        };
        let v = spectrum(&s);
        assert_eq!(v["tag"], "geometric_with_zero");
        assert_eq!(v["points"].as_array().unwrap().len(), 8);
        assert_eq!(v["points"][1], json!([0.5, 0.0]));
        assert_eq!(v["points"][7], json!([0.0, 0.0]));
    }
}
