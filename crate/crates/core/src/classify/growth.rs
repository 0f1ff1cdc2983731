//! The growth quantity M(u,ψ) = sup_z |u(z)| e^{(|ψ(z)|²−|z|²)/2}.

use crate::base::{symbol_exponent_growth, AffineSymbol, Cx, Tolerance, Weight, WeightedComposition, ZERO};

/// log(|u(z)| e^{(|ψ(z)|²−|z|²)/2}) = k + Re(t z) + Re(p z²) − q|z|².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthExponent {
    pub k: f64,
    pub t: Cx,
    pub p: Cx,
    pub q: f64,
}

impl GrowthExponent {
    /// Exponent of (u, ψ) for u = exp(a0 + a1 z + a2 z²).
    pub fn from_exp_quad(a0: Cx, a1: Cx, a2: Cx, psi: &AffineSymbol) -> Self {
        let (a, b) = (psi.a, psi.b);
        Self {
            k: a0.re + 0.5 * b.norm_sqr(),
            t: a1 + a * b.conj(),
            p: a2,
            q: 0.5 * (1.0 - a.norm_sqr()),
        }
    }

    /// `None` for Taylor weights and for the zero kernel weight.
    pub fn assemble(op: &WeightedComposition) -> Option<Self> {
        let (a0, a1, a2) = op.weight.exp_quad_coeffs()?;
        Some(Self::from_exp_quad(a0, a1, a2, &op.symbol))
    }

    pub fn eval(&self, z: Cx) -> f64 {
        self.k + (self.t * z).re + (self.p * z * z).re - self.q * z.norm_sqr()
    }

    /// Supremum of the exponent over ℂ, +∞ when the quadratic form is not
    /// bounded above.
    pub fn sup(&self, tol: Tolerance) -> f64 {
        self.maximizer(tol).map_or(f64::INFINITY, |(v, _)| v)
    }

    /// (max, argmax) of the exponent, or `None` when unbounded.
    ///
    /// With φ = arg p and z = e^{−iφ/2}ζ, ζ = x + iy, the exponent splits as
    /// k + (t'_r x − (q−|p|)x²) + (−t'_i y − (q+|p|)y²) with t' = t e^{−iφ/2}.
    pub fn maximizer(&self, tol: Tolerance) -> Option<(f64, Cx)> {
        let pm = self.p.norm();
        let rot = Cx::from_polar(1.0, -0.5 * self.p.arg());
        let tp = self.t * rot;
        let slack = tol.eps.max(1e-14);
        let axis = |lin: f64, curv: f64| -> Option<(f64, f64)> {
            if curv > slack {
                Some((lin * lin / (4.0 * curv), lin / (2.0 * curv)))
            } else if curv >= -slack && lin.abs() <= slack * (1.0 + self.t.norm()) {
                Some((0.0, 0.0))
            } else {
                None
            }
        };
        let (vx, x) = axis(tp.re, self.q - pm)?;
        let (vy, y) = axis(-tp.im, self.q + pm)?;
        Some((self.k + vx + vy, rot * Cx::new(x, y)))
    }
}

/// M(u,ψ) with its provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthSup {
    /// The supremum; +∞ for unbounded growth.
    pub value: f64,
    /// Set when the value comes from a grid search rather than the closed form.
    pub numeric_only: bool,
}

impl GrowthSup {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// log(|u(z)| e^{(|ψ(z)|²−|z|²)/2}) evaluated pointwise; −∞ at zeros of u.
pub fn log_growth_at(op: &WeightedComposition, z: Cx) -> f64 {
    log_abs_weight(&op.weight, z) + symbol_exponent_growth(&op.symbol, z)
}

fn log_abs_weight(u: &Weight, z: Cx) -> f64 {
    match u {
        Weight::Kernel { u0, w } => {
            if *u0 == ZERO {
                f64::NEG_INFINITY
            } else {
                u0.norm().ln() + (w.conj() * z).re
            }
        }
        Weight::ExpQuad { a0, a1, a2 } => (*a0 + *a1 * z + *a2 * z * z).re,
        Weight::Taylor { coeffs } => coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c).norm().ln(),
    }
}

/// Largest value of `f` on the polar grid {r e^{iθ}} with `n_r` uniform radii
/// in [0, radius] and `n_theta` angles, together with its location.
pub fn polar_grid_max<F: Fn(Cx) -> f64>(f: F, radius: f64, n_r: usize, n_theta: usize) -> (f64, Cx) {
    let mut best = (f(ZERO), ZERO);
    for i in 1..=n_r {
        let r = radius * i as f64 / n_r as f64;
        for j in 0..n_theta {
            let z = Cx::from_polar(r, std::f64::consts::TAU * j as f64 / n_theta as f64);
            let v = f(z);
            if v > best.0 {
                best = (v, z);
            }
        }
    }
    best
}

/// Zooms into a local maximum of `f` near `z` with successively finer
/// square grids, starting at spacing `h`.
pub fn refine_max<F: Fn(Cx) -> f64>(f: F, z: Cx, h: f64, rounds: usize) -> (f64, Cx) {
    const HALF: i32 = 5;
    let mut best = (f(z), z);
    let mut step = h;
    for _ in 0..rounds {
        let centre = best.1;
        for i in -HALF..=HALF {
            for j in -HALF..=HALF {
                let c = centre + Cx::new(i as f64 * step, j as f64 * step);
                let v = f(c);
                if v > best.0 {
                    best = (v, c);
                }
            }
        }
        if best.1 == centre {
            step /= 4.0;
        }
    }
    best
}

/// Ring maxima of `f` on |z| = r for the given radii.
pub fn ring_maxima<F: Fn(Cx) -> f64>(f: F, radii: &[f64], n_theta: usize) -> Vec<f64> {
    radii
        .iter()
        .map(|&r| {
            (0..n_theta)
                .map(|j| f(Cx::from_polar(r, std::f64::consts::TAU * j as f64 / n_theta as f64)))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

const PROBE_RADII: [f64; 4] = [10.0, 20.0, 30.0, 40.0];

/// Grid-based growth verdict for an arbitrary log-growth function: the
/// supremum over |z| ≤ 40 when the outer rings stop growing, +∞ otherwise.
pub fn numeric_log_sup<F: Fn(Cx) -> f64>(f: F) -> f64 {
    let rings = ring_maxima(&f, &PROBE_RADII, 512);
    let growing = rings.windows(2).all(|w| w[1] > w[0]) && rings[3] - rings[1] > 1.0;
    if growing {
        return f64::INFINITY;
    }
    let (v, z) = polar_grid_max(&f, PROBE_RADII[3], 400, 256);
    refine_max(&f, z, 0.1, 60).0.max(v)
}

/// M(u,ψ): closed form for kernel and exp-quadratic weights, grid search
/// for Taylor weights.
pub fn growth_sup(op: &WeightedComposition, tol: Tolerance) -> GrowthSup {
    if op.weight.is_identically_zero() {
        return GrowthSup {
            value: 0.0,
            numeric_only: false,
        };
    }
    match GrowthExponent::assemble(op) {
        Some(g) => GrowthSup {
            value: g.sup(tol).exp(),
            numeric_only: false,
        },
        None => GrowthSup {
            value: numeric_log_sup(|z| log_growth_at(op, z)).exp(),
            numeric_only: true,
        },
    }
}
