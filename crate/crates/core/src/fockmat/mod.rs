//! Truncated matrices of W on the orthonormal monomial basis
//! e_n = zⁿ/√(n!) of F₂, and the numeric checks built on them.

mod cesaro;
mod csv_io;
mod eigen;

pub use cesaro::{cesaro, ergodic_limit_matrix, CesaroRun, CesaroState, DIVERGENCE_CAP};
pub use csv_io::{read_csv, write_csv, BASIS_LABEL};
pub use eigen::{eigenvalues, Eigenvalues};

use nalgebra::DMatrix;

use crate::base::{ln_factorials, Cx, WeightedComposition, ZERO};
use crate::error::{Error, Result};

pub const MAX_BUILD_DIM: usize = 512;
pub const MAX_EIGEN_DIM: usize = 256;
pub const MAX_POWER_ITERATIONS: usize = 10_000;

/// Compression of an operator onto span{e_0, …, e_{N−1}}; column n holds
/// the coefficients of W e_n.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMatrix {
    data: DMatrix<Cx>,
}

impl TruncatedMatrix {
    pub fn from_matrix(data: DMatrix<Cx>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::Dimension(data.nrows()));
        }
        Ok(Self { data })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn entry(&self, m: usize, n: usize) -> Cx {
        self.data[(m, n)]
    }

    pub fn matrix(&self) -> &DMatrix<Cx> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Cx> {
        self.data
    }

    pub fn mul(&self, rhs: &TruncatedMatrix) -> TruncatedMatrix {
        TruncatedMatrix {
            data: &self.data * &rhs.data,
        }
    }

    /// k-th power by repeated squaring; the zeroth power is the identity.
    pub fn pow(&self, k: usize) -> TruncatedMatrix {
        let mut result = DMatrix::identity(self.dim(), self.dim());
        let mut base = self.data.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        TruncatedMatrix { data: result }
    }

    /// Matrix times coefficient vector (coefficients in the e_n basis).
    pub fn apply(&self, coeffs: &[Cx]) -> Vec<Cx> {
        let n = self.dim();
        (0..n)
            .map(|m| (0..n.min(coeffs.len())).map(|j| self.data[(m, j)] * coeffs[j]).sum())
            .collect()
    }

    pub fn leading_block(&self, k: usize) -> TruncatedMatrix {
        TruncatedMatrix {
            data: self.data.view((0, 0), (k, k)).into_owned(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sub(&self, rhs: &TruncatedMatrix) -> TruncatedMatrix {
        TruncatedMatrix {
            data: &self.data - &rhs.data,
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_BUILD_DIM {
        Err(Error::Dimension(n))
    } else {
        Ok(())
    }
}

fn finish(data: DMatrix<Cx>) -> Result<TruncatedMatrix> {
    if data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(TruncatedMatrix { data })
    } else {
        Err(Error::Range("truncated matrix entry"))
    }
}

/// N×N compression of W. Columns follow c_n = (a·S + b)c_{n−1}/√n with
/// c_0 the normalized Taylor coefficients of u and S the raising operator
/// (S c)_m = √m·c_{m−1}, which is z·(·) in the normalized basis.
pub fn build_matrix(op: &WeightedComposition, n: usize) -> Result<TruncatedMatrix> {
    check_dim(n)?;
    let (a, b) = (op.symbol.a, op.symbol.b);
    let mut data = DMatrix::from_element(n, n, ZERO);
    let mut col = op.weight.normalized_coeffs(n);
    let sqrt: Vec<f64> = (0..n).map(|m| (m as f64).sqrt()).collect();
    for j in 0..n {
        if j > 0 {
            let inv = 1.0 / sqrt[j];
            let jf = j as f64;
            for m in (0..n).rev() {
                // √(m/j) rather than √m/√j keeps the diagonal exact when ψ(z) = z
                let raised = if m > 0 { col[m - 1] * (m as f64 / jf).sqrt() } else { ZERO };
                col[m] = a * raised + b * col[m] * inv;
            }
        }
        for m in 0..n {
            data[(m, j)] = col[m];
        }
    }
    finish(data)
}

/// Same matrix through the binomial expansion of (az+b)ⁿ times the Taylor
/// series of u, with all factorial scaling in log space. Slower and less
/// accurate than [`build_matrix`]; kept as an independent check.
pub fn build_matrix_binomial(op: &WeightedComposition, n: usize) -> Result<TruncatedMatrix> {
    binomial_parts(op, n).map(|(m, _)| m)
}

/// [`build_matrix_binomial`] together with the matrix of Σ|terms| for each
/// entry. Cancellation in the expansion makes its rounding error scale with
/// the second matrix rather than with the result.
pub fn build_matrix_binomial_with_magnitude(op: &WeightedComposition, n: usize) -> Result<(TruncatedMatrix, TruncatedMatrix)> {
    binomial_parts(op, n)
}

fn binomial_parts(op: &WeightedComposition, n: usize) -> Result<(TruncatedMatrix, TruncatedMatrix)> {
    check_dim(n)?;
    let (a, b) = (op.symbol.a, op.symbol.b);
    let lf = ln_factorials(n);
    let ut = op.weight.normalized_coeffs(n);
    let mut data = DMatrix::from_element(n, n, ZERO);
    let mut mag = DMatrix::from_element(n, n, ZERO);
    // a^k and b^(j-k) by repeated multiplication so that 0^0 = 1
    let mut apow = vec![Cx::new(1.0, 0.0); n];
    let mut bpow = vec![Cx::new(1.0, 0.0); n];
    for k in 1..n {
        apow[k] = apow[k - 1] * a;
        bpow[k] = bpow[k - 1] * b;
    }
    for j in 0..n {
        for m in 0..n {
            let mut s = ZERO;
            let mut abs = 0.0;
            for k in 0..=j.min(m) {
                let coef = ut[m - k] * apow[k] * bpow[j - k];
                if coef == ZERO {
                    continue;
                }
                let scale = lf[j] - lf[k] - lf[j - k] + 0.5 * (lf[m] - lf[j] - lf[m - k]);
                let term = coef * scale.exp();
                s += term;
                abs += term.norm();
            }
            data[(m, j)] = s;
            mag[(m, j)] = Cx::new(abs, 0.0);
        }
    }
    Ok((finish(data)?, finish(mag)?))
}

/// Largest singular value by power iteration on G = MᴴM from the normalized
/// all-ones vector; stops once the extrapolated remaining change of the
/// Rayleigh estimate xᴴGx is at most `tol` relative.
///
/// Near-isometric truncations have singular values clustered within 1e-7 of
/// the top, where plain iteration stalls. Every [`SQUARING_PERIOD`] steps the
/// iterated operator is replaced by its normalized square, so the iterate
/// stays G^k·x₀ for a fixed start while k grows geometrically.
pub fn op_norm2(m: &TruncatedMatrix, tol: f64) -> Result<f64> {
    if tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Domain(format!("op_norm2 requires tol > 0, got {tol}")));
    }
    let n = m.dim();
    let g = m.data.adjoint() * &m.data;
    if g.iter().all(|z| *z == ZERO) {
        return Ok(0.0);
    }
    let mut h = g.clone();
    let mut x = nalgebra::DVector::from_element(n, Cx::new(1.0 / (n as f64).sqrt(), 0.0));
    let rayleigh = |x: &nalgebra::DVector<Cx>| x.dotc(&(&g * x)).re;
    let mut est = rayleigh(&x);
    let mut squarings = 0;
    let mut prev_delta = 0.0f64;
    for step in 1..=MAX_POWER_ITERATIONS {
        let mut y = &h * &x;
        let mut yn = y.norm();
        if yn == 0.0 {
            // the start vector lies in the kernel; use a fixed generic one
            y = nalgebra::DVector::from_fn(n, |k, _| Cx::new(1.0, (k + 1) as f64));
            yn = y.norm();
        }
        x = y / Cx::from(yn);
        let next = rayleigh(&x);
        // The Rayleigh quotients of power iterates increase geometrically
        // towards the top eigenvalue; extrapolating the tail from the ratio of
        // successive increments guards against stopping early on clusters.
        let delta = (next - est).abs();
        let rho = if prev_delta > 0.0 { (delta / prev_delta).min(0.99) } else { 0.0 };
        if delta / (1.0 - rho) <= tol * next || delta <= 4.0 * f64::EPSILON * next {
            return Ok(next.max(0.0).sqrt());
        }
        prev_delta = delta;
        est = next;
        if step % SQUARING_PERIOD == 0 && squarings < MAX_SQUARINGS {
            let sq = &h * &h;
            let scale = sq.norm();
            if scale > 0.0 && scale.is_finite() {
                h = sq / Cx::from(scale);
                squarings += 1;
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_POWER_ITERATIONS,
        estimate: est.max(0.0).sqrt(),
    })
}

/// Steps between squarings of the iterated Gram operator in [`op_norm2`].
pub const SQUARING_PERIOD: usize = 64;
const MAX_SQUARINGS: usize = 40;

/// ‖(MᴴM − I) restricted to the leading k×k block‖₂.
pub fn isometry_defect(m: &TruncatedMatrix, k: usize) -> Result<f64> {
    if k == 0 || k > m.dim() {
        return Err(Error::Dimension(k));
    }
    let cols = m.data.columns(0, k);
    let gram = cols.adjoint() * cols - DMatrix::<Cx>::identity(k, k);
    if gram.iter().all(|z| *z == ZERO) {
        return Ok(0.0);
    }
    op_norm2(&TruncatedMatrix { data: gram }, 1e-13)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{AffineSymbol, Weight, ONE};

    fn c(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    fn op(w: Weight, a: Cx, b: Cx) -> WeightedComposition {
        WeightedComposition::new(w, AffineSymbol::new(a, b).unwrap())
    }

    #[test]
    fn diagonal_composition() {
        let m = build_matrix(&op(Weight::constant(ONE), c(0.5, 0.0), ZERO), 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.5f64.powi(i as i32) } else { 0.0 };
                assert_eq!(m.entry(i, j), Cx::from(want));
            }
        }
    }

    #[test]
    fn first_column_of_affine_symbol() {
        let (a, b) = (c(0.3, -0.4), c(1.2, 0.5));
        let m = build_matrix(&op(Weight::constant(ONE), a, b), 6).unwrap();
        assert!((m.entry(0, 1) - b).norm() < 1e-15);
        assert!((m.entry(1, 1) - a).norm() < 1e-15);
        for r in 2..6 {
            assert_eq!(m.entry(r, 1), ZERO);
        }
    }

    #[test]
    fn kernel_column_has_kernel_norm() {
        let w = c(0.8, -0.6);
        let m = build_matrix(&op(Weight::kernel(ONE, w).unwrap(), ONE, ZERO), 80).unwrap();
        let lf = ln_factorials(80);
        let mut norm2 = 0.0;
        for r in 0..80 {
            let want = w.conj().powu(r as u32) * (-0.5 * lf[r]).exp();
            assert!((m.entry(r, 0) - want).norm() < 1e-14);
            norm2 += m.entry(r, 0).norm_sqr();
        }
        assert!((norm2 - w.norm_sqr().exp()).abs() < 1e-12);
    }

    #[test]
    fn recurrence_matches_binomial_route() {
        let cases = [
            op(Weight::exp_quad(c(-0.4, 0.0), ZERO, c(0.1, 0.0)).unwrap(), c(0.5, 0.0), ONE),
            op(Weight::kernel(c(0.6, 0.1), c(-0.2, 0.7)).unwrap(), Cx::from_polar(1.0, 0.7), c(0.3, 0.2)),
            op(Weight::taylor(vec![ONE, c(0.0, 1.0), c(0.5, 0.0)]).unwrap(), c(0.2, 0.3), c(-1.0, 0.0)),
        ];
        for w in &cases {
            let fast = build_matrix(w, 40).unwrap();
            let slow = build_matrix_binomial(w, 40).unwrap();
            let diff = fast.sub(&slow).frobenius();
            assert!(diff <= 1e-10 * (1.0 + fast.frobenius()), "{diff}");
        }
    }

    #[test]
    fn dimension_limits() {
        let w = op(Weight::constant(ONE), ONE, ZERO);
        assert!(build_matrix(&w, 0).is_err());
        assert!(build_matrix(&w, 513).is_err());
        assert!(build_matrix(&w, 512).is_ok());
    }

    #[test]
    fn norm_of_diagonal() {
        let m = build_matrix(&op(Weight::constant(ONE), c(0.5, 0.0), ZERO), 3).unwrap();
        assert!((op_norm2(&m, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert!(op_norm2(&m, 0.0).is_err());
    }

    #[test]
    fn unitary_rotation_has_no_defect() {
        let m = build_matrix(&op(Weight::constant(ONE), c(0.0, 1.0), ZERO), 20).unwrap();
        assert!(isometry_defect(&m, 20).unwrap() < 1e-14);
    }

    #[test]
    fn power_by_squaring() {
        let m = build_matrix(&op(Weight::exp_quad(ZERO, c(0.1, 0.0), ZERO).unwrap(), c(0.6, 0.0), c(0.2, 0.0)), 12)
            .unwrap();
        let direct = m.mul(&m).mul(&m).mul(&m).mul(&m);
        assert!(m.pow(5).sub(&direct).frobenius() < 1e-13);
        assert_eq!(m.pow(0), TruncatedMatrix::identity(12));
    }
}
