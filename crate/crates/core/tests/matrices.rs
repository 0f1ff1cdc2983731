use fock_wco::fockmat::{build_matrix, build_matrix_binomial, eigenvalues, op_norm2, TruncatedMatrix};
use fock_wco::symbolic::{symbol_iterate, weight_iterate_closed};
use fock_wco::{AffineSymbol, Cx, TaylorSeries, Tolerance, Weight, WeightedComposition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

fn random_disc(rng: &mut ChaCha8Rng, r: f64) -> Cx {
    Cx::from_polar(r * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
}

fn sample_operators() -> Vec<WeightedComposition> {
    let sym = |a, b| AffineSymbol::new(a, b).unwrap();
    vec![
        WeightedComposition::new(Weight::kernel(c(0.6, 0.2), c(-0.5, 0.3)).unwrap(), sym(c(1.0, 0.0), c(0.5, -0.3))),
        WeightedComposition::new(Weight::kernel(c(1.0, 0.0), c(-0.2, 0.3)).unwrap(), sym(c(0.0, 1.0), c(0.3, 0.2))),
        WeightedComposition::new(Weight::exp_quad(c(-0.4, 0.0), c(0.0, 0.0), c(0.1, 0.0)).unwrap(), sym(c(0.5, 0.0), c(1.0, 0.0))),
        WeightedComposition::new(Weight::exp_quad(c(0.1, 0.3), c(0.2, -0.4), c(-0.05, 0.1)).unwrap(), sym(c(0.3, 0.5), c(-0.4, 0.2))),
        WeightedComposition::new(Weight::taylor(vec![c(1.0, 0.0), c(0.5, -0.2), c(0.0, 0.3)]).unwrap(), sym(c(0.6, 0.1), c(0.2, 0.0))),
    ]
}

/// Applying the matrix to the coefficients of f and summing the series
/// reproduces u(z)·f(ψ(z)).
#[test]
fn matrix_matches_function_action() {
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for op in sample_operators() {
        let m = build_matrix(&op, n).unwrap();
        for _ in 0..8 {
            let coeffs: Vec<Cx> = (0..=n / 2).map(|_| random_disc(&mut rng, 1.0)).collect();
            let f = TaylorSeries::from_normalized(&coeffs);
            let mut padded = coeffs.clone();
            padded.resize(n, c(0.0, 0.0));
            let image = TaylorSeries::from_normalized(&m.apply(&padded));
            for _ in 0..6 {
                let z = random_disc(&mut rng, 2.0);
                let want = op.apply_at(|x| f.eval(x), z).unwrap();
                let got = image.eval(z);
                assert!((got - want).norm() <= 1e-8 * want.norm().max(1e-300), "{:?} z={z}: {got} vs {want}", op.weight);
            }
        }
    }
}

#[test]
fn recurrence_matches_binomial_oracle() {
    for op in sample_operators() {
        let a = build_matrix(&op, 48).unwrap();
        let b = build_matrix_binomial(&op, 48).unwrap();
        assert!(a.sub(&b).frobenius() <= 1e-10 * b.frobenius());
    }
}

/// The truncation of Wⁿ built from the closed-form iterate weight agrees
/// with the n-th power of the truncation of W on low degrees.
#[test]
fn powers_commute_with_truncation_on_low_degrees() {
    let dim = 64;
    for op in sample_operators().into_iter().take(4) {
        let m = build_matrix(&op, dim).unwrap();
        for n in 1..=5 {
            let form = weight_iterate_closed(&op, n, Tolerance::default()).unwrap();
            let e = form.exponent().unwrap();
            let iterate = WeightedComposition::new(
                Weight::exp_quad(e.constant, e.linear, e.quadratic).unwrap(),
                symbol_iterate(&op.symbol, n),
            );
            let direct = build_matrix(&iterate, dim).unwrap().leading_block(dim / 2);
            let powered = m.pow(n).leading_block(dim / 2);
            let err = direct.sub(&powered).frobenius() / direct.frobenius();
            assert!(err <= 1e-6, "{:?} n={n}: rel err {err}", op.weight);
        }
    }
}

#[test]
fn op_norm_grows_with_dimension() {
    for op in sample_operators() {
        let mut prev = 0.0;
        for n in [8, 16, 24, 32, 48, 64] {
            let s = op_norm2(&build_matrix(&op, n).unwrap(), 1e-13).unwrap_or_else(|e| panic!("{:?} N={n}: {e:?}", op.weight));
            assert!(s >= prev - 1e-10, "{:?}: N={n} {s} < {prev}", op.weight);
            prev = s;
        }
    }
}

#[test]
fn compact_eigenvalues_follow_the_geometric_law() {
    let ops = [
        (c(0.5, 0.0), c(1.0, 0.0), [c(-0.4, 0.0), c(0.0, 0.0), c(0.1, 0.0)]),
        (c(0.4, 0.3), c(-0.2, 0.5), [c(0.1, 0.2), c(0.3, 0.0), c(0.0, 0.05)]),
        (c(-0.6, 0.0), c(0.3, 0.0), [c(0.0, 0.0), c(0.2, 0.1), c(0.0, 0.0)]),
    ];
    for (a, b, [a0, a1, a2]) in ops {
        let op = WeightedComposition::new(Weight::exp_quad(a0, a1, a2).unwrap(), AffineSymbol::new(a, b).unwrap());
        let z0 = b / (c(1.0, 0.0) - a);
        let uz0 = op.weight.eval(z0).unwrap();
        let eig = eigenvalues(&build_matrix(&op, 64).unwrap()).unwrap();
        assert!(eig.converged);
        for j in 0..=6 {
            let want = uz0 * a.powi(j as i32);
            let tol = f64::max(1e-3, 1e-3 * want.norm());
            let found = eig.values.iter().any(|v| (v - want).norm() <= tol);
            assert!(found, "a={a}: missing eigenvalue {want}");
        }
    }
}

#[test]
fn kernel_columns_have_unit_norm() {
    for w in [c(0.0, 0.0), c(1.0, 0.0), c(-1.2, 1.6), c(0.3, -2.5)] {
        let k = TaylorSeries::normalized_kernel(w, 160);
        assert!((fock_wco::quad::norm2_coeff(&k) - 1.0).abs() < 1e-10);
        let rank_one = build_matrix(
            &WeightedComposition::new(Weight::kernel(c(1.0, 0.0), w).unwrap(), AffineSymbol::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap()),
            120,
        )
        .unwrap();
        let col: f64 = (0..120).map(|m| rank_one.entry(m, 0).norm_sqr()).sum::<f64>().sqrt();
        assert!((col - (0.5 * w.norm_sqr()).exp()).abs() < 1e-10 * col);
    }
}

#[test]
fn identity_is_preserved() {
    let id = WeightedComposition::new(Weight::constant(c(1.0, 0.0)), AffineSymbol::identity());
    assert_eq!(build_matrix(&id, 20).unwrap(), TruncatedMatrix::identity(20));
}

#[test]
fn op_norm_matches_dense_svd() {
    for op in sample_operators() {
        for n in [16, 48] {
            let m = build_matrix(&op, n).unwrap();
            let sv = m.matrix().clone().singular_values().max();
            let s = op_norm2(&m, 1e-13).unwrap();
            assert!((s - sv).abs() <= 1e-9 * sv, "{:?} N={n}: {s} vs {sv}", op.weight);
        }
    }
}
