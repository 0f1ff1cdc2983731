//! Cesàro means T_n = (1/n)Σ_{k=1}^{n} Mᵏ of a truncated matrix and the
//! rank-one limit predicted for compact ergodic operators.

use nalgebra::DMatrix;

use crate::base::{Cx, Tolerance, WeightedComposition, ONE, ZERO};
use crate::error::{Error, Result};
use crate::symbolic::u_infinity;

use super::{build_matrix, TruncatedMatrix};

/// Entry size at which a Cesàro run is declared divergent.
pub const DIVERGENCE_CAP: f64 = 1e12;

/// Running state of T_n = ((n−1)T_{n−1} + Mⁿ)/n.
#[derive(Clone, Debug)]
pub struct CesaroState {
    base: DMatrix<Cx>,
    n: usize,
    power: DMatrix<Cx>,
    mean: DMatrix<Cx>,
    diverged: bool,
}

impl CesaroState {
    /// State at n = 0 (no terms yet).
    pub fn new(m: &TruncatedMatrix) -> Self {
        let d = m.dim();
        Self {
            base: m.matrix().clone(),
            n: 0,
            power: DMatrix::identity(d, d),
            mean: DMatrix::from_element(d, d, ZERO),
            diverged: false,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diverged(&self) -> bool {
        self.diverged
    }

    /// Mⁿ for the current n.
    pub fn power(&self) -> TruncatedMatrix {
        TruncatedMatrix {
            data: self.power.clone(),
        }
    }

    /// T_n for the current n.
    pub fn mean(&self) -> TruncatedMatrix {
        TruncatedMatrix { data: self.mean.clone() }
    }

    pub fn mean_entry(&self, i: usize, j: usize) -> Cx {
        self.mean[(i, j)]
    }

    /// Advances to n + 1. Returns `false` and leaves the state unchanged
    /// once some entry of Mⁿ exceeds [`DIVERGENCE_CAP`].
    pub fn step(&mut self) -> bool {
        if self.diverged {
            return false;
        }
        let next = &self.base * &self.power;
        if next.iter().any(|z| !(z.norm() <= DIVERGENCE_CAP)) {
            self.diverged = true;
            return false;
        }
        let k = (self.n + 1) as f64;
        let prev = self.n as f64;
        self.mean = (&self.mean * Cx::from(prev) + &next) / Cx::from(k);
        self.power = next;
        self.n += 1;
        true
    }

    /// Steps until n reaches `target` or the run diverges.
    pub fn advance_to(&mut self, target: usize) -> &mut Self {
        while self.n < target && self.step() {}
        self
    }
}

/// Result of [`cesaro`]; on divergence `mean` is the last finite T_n.
#[derive(Clone, Debug)]
pub struct CesaroRun {
    pub mean: TruncatedMatrix,
    pub n_reached: usize,
    pub diverged: bool,
}

/// T_n of the N×N truncation of W.
pub fn cesaro(op: &WeightedComposition, dim: usize, n: usize) -> Result<CesaroRun> {
    if n == 0 {
        return Err(Error::Domain("cesaro requires n >= 1".into()));
    }
    let m = build_matrix(op, dim)?;
    let mut st = CesaroState::new(&m);
    st.advance_to(n);
    Ok(CesaroRun {
        mean: st.mean(),
        n_reached: st.n(),
        diverged: st.diverged(),
    })
}

/// Matrix of f ↦ f(z₀)·u_∞: column n is u_∞'s normalized coefficients
/// times z₀ⁿ/√(n!).
pub fn ergodic_limit_matrix(op: &WeightedComposition, dim: usize, tol: Tolerance) -> Result<TruncatedMatrix> {
    if dim == 0 || dim > super::MAX_BUILD_DIM {
        return Err(Error::Dimension(dim));
    }
    let u_inf = u_infinity(op, tol)?;
    let z0 = op.symbol.b / (ONE - op.symbol.a);
    let coeffs = u_inf.normalized_coeffs(dim);
    let mut eval = vec![ONE; dim];
    for n in 1..dim {
        eval[n] = eval[n - 1] * z0 / (n as f64).sqrt();
    }
    let data = DMatrix::from_fn(dim, dim, |m, n| coeffs[m] * eval[n]);
    Ok(TruncatedMatrix { data })
}
