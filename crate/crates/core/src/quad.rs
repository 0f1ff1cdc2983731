//! F_p norms: the coefficient formula for p = 2, polar Gauss–Legendre
//! quadrature for general p, closed forms for exponentials of quadratics,
//! and the pointwise growth estimate.

use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::base::{Cx, FockParams, Tolerance, WeightedComposition, ZERO};
use crate::classify::GrowthExponent;
use crate::error::{Error, Result};
use crate::series::TaylorSeries;
use crate::symbolic::{weight_iterate_closed, IterateExponent};

pub const DEFAULT_RADIAL: usize = 400;
pub const DEFAULT_ANGULAR: usize = 256;

/// Largest radius the adaptive cutoff will try.
const MAX_RADIUS: f64 = 120.0;
/// ln(1e-14): relative size of the discarded tail.
const LN_TAIL: f64 = -32.236_191_301_916_64;

/// Tensor grid on the disc |z| ≤ R: Gauss–Legendre in r, uniform in θ.
#[derive(Clone, Debug)]
pub struct PolarGrid {
    /// Gauss–Legendre nodes and weights mapped to [0, 1].
    unit: Vec<(f64, f64)>,
    angular: usize,
    /// Fixed cutoff; `None` picks R per integrand.
    radius: Option<f64>,
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self::new(DEFAULT_RADIAL, DEFAULT_ANGULAR, None)
    }
}

impl PolarGrid {
    /// # Panics
    /// If `radial` or `angular` is zero.
    pub fn new(radial: usize, angular: usize, radius: Option<f64>) -> Self {
        assert!(angular > 0, "angular node count must be positive");
        let gl = GaussLegendre::new(NonZeroUsize::new(radial).expect("radial node count must be positive"));
        let unit = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        Self { unit, angular, radius }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn radial_count(&self) -> usize {
        self.unit.len()
    }

    pub fn angular_count(&self) -> usize {
        self.angular
    }

    pub fn fixed_radius(&self) -> Option<f64> {
        self.radius
    }

    fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.angular as f64
    }

    fn ring_max<F: Fn(Cx) -> f64>(&self, log_abs: &F, r: f64) -> f64 {
        (0..self.angular)
            .map(|j| log_abs(Cx::from_polar(r, self.angle(j))))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cutoff radius for ∫|f|^p e^{−p|z|²/2} (or the weighted sup when
    /// `p = None`): the first R past the peak where the ring value drops
    /// 1e−14 below the largest ring value seen, plus a unit margin.
    pub fn cutoff<F: Fn(Cx) -> f64>(&self, log_abs: &F, p: Option<f64>) -> Result<f64> {
        if let Some(r) = self.radius {
            return Ok(r);
        }
        let weight = p.unwrap_or(1.0);
        let ring = |r: f64| {
            let base = weight * (self.ring_max(log_abs, r) - 0.5 * r * r);
            if p.is_some() {
                base + r.max(1e-300).ln()
            } else {
                base
            }
        };
        let mut peak = ring(0.0).max(ring(0.5));
        let mut r = 1.0;
        while r <= MAX_RADIUS {
            let v = ring(r);
            if v > peak {
                peak = v;
            } else if v <= peak + LN_TAIL {
                return Ok(r + 1.0);
            }
            r += 0.5;
        }
        Err(Error::TruncationUnreliable { radius: MAX_RADIUS })
    }

    /// ((p/2π) ∫ |f|^p e^{−p|z|²/2} dA)^{1/p} for f given through log|f|.
    pub fn integrate_norm<F: Fn(Cx) -> f64>(&self, log_abs: &F, p: f64, radius: f64) -> f64 {
        let dtheta = TAU / self.angular as f64;
        let mut terms = Vec::with_capacity(self.unit.len() * self.angular);
        for &(x, w) in &self.unit {
            let r = radius * x;
            let lw = (w * radius * r * dtheta).ln() - 0.5 * p * r * r;
            for j in 0..self.angular {
                terms.push(lw + p * log_abs(Cx::from_polar(r, self.angle(j))));
            }
        }
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return 0.0;
        }
        let s: f64 = terms.iter().map(|t| (t - top).exp()).sum();
        (((p / TAU).ln() + top + s.ln()) / p).exp()
    }

    /// sup |f(z)| e^{−|z|²/2} over the grid, polished by golden-section
    /// search in r and θ around the best node.
    pub fn weighted_sup<F: Fn(Cx) -> f64>(&self, log_abs: &F, radius: f64) -> f64 {
        let g = |r: f64, t: f64| log_abs(Cx::from_polar(r, t)) - 0.5 * r * r;
        let mut best = (g(0.0, 0.0), 0.0, 0.0);
        for &(x, _) in &self.unit {
            let r = radius * x;
            for j in 0..self.angular {
                let t = self.angle(j);
                let v = g(r, t);
                if v > best.0 {
                    best = (v, r, t);
                }
            }
        }
        let (mut v, mut r, mut t) = best;
        let mut dr = radius / self.unit.len() as f64 * 4.0;
        let mut dt = TAU / self.angular as f64 * 2.0;
        for _ in 0..6 {
            let (rv, rr) = golden_max(|s| g(s, t), (r - dr).max(0.0), r + dr);
            if rv > v {
                v = rv;
                r = rr;
            }
            let (tv, tt) = golden_max(|s| g(r, s), t - dt, t + dt);
            if tv > v {
                v = tv;
                t = tt;
            }
            dr *= 0.25;
            dt *= 0.25;
        }
        v.exp()
    }
}

/// Golden-section maximization of a unimodal function on [lo, hi].
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (f1, x1)
    } else {
        (f2, x2)
    }
}

/// √(Σ |c_n|² n!) via log-space terms; +∞ on overflow.
pub fn norm2_coeff(f: &TaylorSeries) -> f64 {
    f.f2_norm()
}

fn log_abs_series(f: &TaylorSeries) -> impl Fn(Cx) -> f64 + '_ {
    move |z| f.eval(z).norm().ln()
}

/// Rejects a truncated series whose last retained term is not negligible
/// against |f| on the cutoff circle.
fn check_truncation(f: &TaylorSeries, radius: f64, grid: &PolarGrid) -> Result<()> {
    if !f.is_truncated() {
        return Ok(());
    }
    let d = f.coeffs().len() - 1;
    let top = f.coeff(d);
    if top == ZERO {
        return Ok(());
    }
    let tail = top.norm().ln() + d as f64 * radius.ln();
    let ring = grid.ring_max(&log_abs_series(f), radius);
    if tail > ring + LN_TAIL + 4.6 {
        Err(Error::TruncationUnreliable { radius })
    } else {
        Ok(())
    }
}

/// ‖f‖_p by quadrature (p < ∞) or weighted grid supremum (p = ∞).
pub fn norm_p(f: &TaylorSeries, p: FockParams, grid: &PolarGrid) -> Result<f64> {
    let la = log_abs_series(f);
    let pv = match p {
        FockParams::Finite(v) => Some(v),
        FockParams::Infinite => None,
    };
    let radius = grid.cutoff(&la, pv)?;
    check_truncation(f, radius, grid)?;
    Ok(match pv {
        Some(v) => grid.integrate_norm(&la, v, radius),
        None => grid.weighted_sup(&la, radius),
    })
}

/// ‖f‖_p for any f given through log|f|, without truncation checks.
pub fn norm_p_log_abs<F: Fn(Cx) -> f64>(log_abs: F, p: FockParams, grid: &PolarGrid) -> Result<f64> {
    let pv = match p {
        FockParams::Finite(v) => Some(v),
        FockParams::Infinite => None,
    };
    let radius = grid.cutoff(&log_abs, pv)?;
    Ok(match pv {
        Some(v) => grid.integrate_norm(&log_abs, v, radius),
        None => grid.weighted_sup(&log_abs, radius),
    })
}

/// ln‖e^{c0 + c1 z + c2 z²}‖_p in closed form; +∞ when |c2| ≥ 1/2
/// (for p < ∞, and for p = ∞ unless the degenerate direction is flat).
pub fn exp_quad_log_norm(e: &IterateExponent, p: FockParams) -> f64 {
    let k = e.constant.re;
    if k == f64::NEG_INFINITY {
        return k;
    }
    let g = GrowthExponent {
        k,
        t: e.linear,
        p: e.quadratic,
        q: 0.5,
    };
    match p {
        FockParams::Infinite => g.sup(Tolerance::default()),
        FockParams::Finite(pv) => {
            let m = e.quadratic.norm();
            if m >= 0.5 {
                return f64::INFINITY;
            }
            let t = e.linear * Cx::from_polar(1.0, -0.5 * e.quadratic.arg());
            let (c1, c2) = (0.5 - m, 0.5 + m);
            let gauss = (pv / TAU).ln() + PI.ln() - 0.5 * (pv * c1).ln() - 0.5 * (pv * c2).ln();
            k + gauss / pv + t.re * t.re / (4.0 * c1) + t.im * t.im / (4.0 * c2)
        }
    }
}

/// ‖u_n‖_p for n = 1..=nmax with a growth-trend flag.
#[derive(Clone, Debug, PartialEq)]
pub struct UnNormSequence {
    pub values: Vec<f64>,
    pub log_values: Vec<f64>,
    /// `false` when the tail keeps growing at a non-decaying rate.
    pub bounded: bool,
}

/// Trend test on ln‖u_n‖: growth is persistent when the late slope is
/// positive and at least half the slope around n/2.
fn bounded_trend(logs: &[f64]) -> bool {
    let n = logs.len();
    if logs.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return false;
    }
    if n < 4 {
        return logs.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    }
    let k = (n / 8).max(1);
    let mid = n / 2;
    let late = (logs[n - 1] - logs[n - 1 - k]) / k as f64;
    let early = (logs[mid] - logs[mid - k]) / k as f64;
    !(late > 1e-9 && late >= 0.5 * early)
}

pub fn un_norm_sequence(op: &WeightedComposition, p: FockParams, nmax: usize, tol: Tolerance) -> Result<UnNormSequence> {
    let mut log_values = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let form = weight_iterate_closed(op, n, tol)?;
        let e = form.exponent().ok_or(Error::WrongRegime {
            expected: "A1, U or C",
            found: "P",
        })?;
        log_values.push(exp_quad_log_norm(&e, p));
    }
    Ok(UnNormSequence {
        values: log_values.iter().map(|l| l.exp()).collect(),
        bounded: bounded_trend(&log_values),
        log_values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointwiseCheck {
    pub holds: bool,
    /// B^p − |f(z)|^p for p < ∞ and B − |f(z)| for p = ∞, where B is the
    /// right-hand side of the estimate.
    pub slack: f64,
    pub bound: f64,
}

/// |f(z)| ≤ (2π/p)^{1/p} e^{|z|²/2} ‖f‖_p, with constant 1 for p = ∞.
pub fn pointwise_bound_check(f: &TaylorSeries, p: FockParams, z: Cx, grid: &PolarGrid) -> Result<PointwiseCheck> {
    let norm = match p {
        FockParams::Finite(2.0) if !f.is_truncated() => norm2_coeff(f),
        _ => norm_p(f, p, grid)?,
    };
    let lhs = f.eval(z).norm();
    let gauss = (0.5 * z.norm_sqr()).exp();
    let (bound, slack) = match p {
        FockParams::Finite(pv) => {
            let b = (TAU / pv).powf(1.0 / pv) * gauss * norm;
            (b, b.powf(pv) - lhs.powf(pv))
        }
        FockParams::Infinite => {
            let b = gauss * norm;
            (b, b - lhs)
        }
    };
    Ok(PointwiseCheck {
        holds: lhs <= bound * (1.0 + 1e-12),
        slack,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{AffineSymbol, Weight, ONE};

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    const P1: FockParams = FockParams::Finite(1.0);
    const P2: FockParams = FockParams::Finite(2.0);

    #[test]
    fn gaussian_mass_matches_closed_form() {
        let grid = PolarGrid::default();
        for p in [1.0, 2.0, 3.5] {
            let r = grid.cutoff(&|_| 0.0, Some(p)).unwrap();
            // ‖1‖_p = 1 ⇔ ∫ e^{−p r²/2} dA = 2π/p
            let v = grid.integrate_norm(&|_| 0.0, p, r);
            assert!((v - 1.0).abs() < 1e-10, "p={p} v={v}");
        }
    }

    #[test]
    fn coefficient_norms() {
        assert_eq!(norm2_coeff(&TaylorSeries::constant(ONE)), 1.0);
        for w in [c(1.0, 0.0), c(0.6, 0.8)] {
            let k = TaylorSeries::kernel(w, 120);
            assert!((norm2_coeff(&k) - 0.5f64.exp()).abs() < 1e-10);
        }
        let f5 = TaylorSeries::monomial(5);
        assert!((norm2_coeff(&f5) - 120f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn quadrature_norms_of_simple_functions() {
        let grid = PolarGrid::default();
        for p in [P1, P2, FockParams::Infinite] {
            assert!((norm_p(&TaylorSeries::constant(ONE), p, &grid).unwrap() - 1.0).abs() < 1e-10);
        }
        let z = TaylorSeries::monomial(1);
        assert!((norm_p(&z, P2, &grid).unwrap() - norm2_coeff(&z)).abs() < 1e-10);
    }

    #[test]
    fn normalized_kernels_have_unit_norm() {
        let grid = PolarGrid::default();
        for w in [ZERO, c(1.0, 0.0), c(0.0, 2.0), c(-1.2, 1.6)] {
            let k = TaylorSeries::normalized_kernel(w, 128);
            for p in [P1, P2, FockParams::Infinite] {
                let v = norm_p(&k, p, &grid).unwrap();
                assert!((v - 1.0).abs() < 1e-6, "w={w} p={p:?} v={v}");
            }
        }
    }

    #[test]
    fn truncation_too_short_is_rejected() {
        let k = TaylorSeries::normalized_kernel(c(3.0, 0.0), 12);
        assert!(matches!(norm_p(&k, P2, &PolarGrid::default()), Err(Error::TruncationUnreliable { .. })));
    }

    #[test]
    fn closed_form_exp_quadratic_norms() {
        let grid = PolarGrid::default();
        let cases = [
            IterateExponent {
                constant: c(0.2, 1.0),
                linear: c(0.7, -0.4),
                quadratic: ZERO,
            },
            IterateExponent {
                constant: c(-0.3, 0.0),
                linear: c(0.2, 0.5),
                quadratic: c(0.1, -0.15),
            },
        ];
        for e in &cases {
            for p in [P1, P2, FockParams::Finite(3.0), FockParams::Infinite] {
                let closed = exp_quad_log_norm(e, p).exp();
                let numeric = norm_p_log_abs(|z| e.log_eval(z).re, p, &grid).unwrap();
                assert!((closed - numeric).abs() < 1e-8 * closed, "{e:?} {p:?}: {closed} vs {numeric}");
            }
        }
        // ‖C e^{γz}‖_p = |C| e^{|γ|²/2} for every p
        let e = cases[0];
        let want = (e.constant.re + 0.5 * e.linear.norm_sqr()).exp();
        for p in [P1, P2, FockParams::Infinite] {
            assert!((exp_quad_log_norm(&e, p).exp() - want).abs() < 1e-13 * want);
        }
    }

    fn circle(u0: f64) -> WeightedComposition {
        WeightedComposition::new(
            Weight::kernel(Cx::from(u0), c(-1.0, 0.0)).unwrap(),
            AffineSymbol::new(ONE, ONE).unwrap(),
        )
    }

    #[test]
    fn iterate_norm_sequences() {
        let tol = Tolerance::default();
        let eq = un_norm_sequence(&circle((-0.5f64).exp()), P2, 20, tol).unwrap();
        assert!(eq.bounded);
        assert!(eq.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let grow = un_norm_sequence(&circle(1.0), P2, 20, tol).unwrap();
        assert!(!grow.bounded);
        for (n, v) in grow.log_values.iter().enumerate() {
            assert!((v - 0.5 * (n + 1) as f64).abs() < 1e-10);
        }
        let ones = WeightedComposition::new(Weight::constant(ONE), AffineSymbol::new(c(0.5, 0.0), ONE).unwrap());
        let s = un_norm_sequence(&ones, FockParams::Finite(3.0), 10, tol).unwrap();
        assert!(s.bounded && s.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let compact = WeightedComposition::new(
            Weight::exp_quad(c(-0.4, 0.0), ZERO, c(0.1, 0.0)).unwrap(),
            AffineSymbol::new(c(0.5, 0.0), ONE).unwrap(),
        );
        assert!(un_norm_sequence(&compact, P2, 30, tol).unwrap().bounded);
    }

    #[test]
    fn closed_iterate_norms_match_quadrature() {
        let grid = PolarGrid::default();
        let tol = Tolerance::default();
        let a = Cx::from_polar(1.0, 1.1);
        let b = c(0.4, 0.3);
        let rot = WeightedComposition::new(
            Weight::kernel(c(0.7, 0.2), -(a.conj() * b)).unwrap(),
            AffineSymbol::new(a, b).unwrap(),
        );
        let seq = un_norm_sequence(&rot, P1, 4, tol).unwrap();
        for (i, v) in seq.values.iter().enumerate() {
            let form = weight_iterate_closed(&rot, i + 1, tol).unwrap();
            let e = form.exponent().unwrap();
            let q = norm_p_log_abs(|z| e.log_eval(z).re, P1, &grid).unwrap();
            assert!((v - q).abs() < 1e-8 * v);
        }
    }

    #[test]
    fn pointwise_examples() {
        let grid = PolarGrid::default();
        let one = pointwise_bound_check(&TaylorSeries::constant(ONE), P2, ZERO, &grid).unwrap();
        assert!(one.holds);
        assert!((one.slack - (PI - 1.0)).abs() < 1e-12);
        let w = c(1.5, -0.5);
        let k = TaylorSeries::normalized_kernel(w, 128);
        for p in [P1, P2, FockParams::Infinite] {
            let chk = pointwise_bound_check(&k, p, w, &grid).unwrap();
            assert!(chk.holds && chk.slack >= -1e-9, "{p:?} {chk:?}");
        }
    }
}
