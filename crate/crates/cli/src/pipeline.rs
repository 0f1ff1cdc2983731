//! Runs the tasks of one job and assembles its report.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::time::Instant;

use fock_wco::classify::{
    ergodicity_with, growth_sup, is_bounded, is_compact, log_growth_at, norm_closed, numeric_log_sup, power_bounded,
    ring_maxima, spectrum_with, ErgodicLimit, ErgodicVerdict, NormBound, SpectrumDescriptor, Verdict,
};
use fock_wco::fockmat::{
    build_matrix, build_matrix_binomial_with_magnitude, eigenvalues, ergodic_limit_matrix, isometry_defect, op_norm2, write_csv,
    CesaroState, TruncatedMatrix, BASIS_LABEL, MAX_EIGEN_DIM,
};
use fock_wco::quad::{pointwise_bound_check, PolarGrid};
use fock_wco::symbolic::{regime_of, weight_iterate_closed, weight_iterate_product, Regime};
use fock_wco::{Cx, Error, FockParams, TaylorSeries, Tolerance, WeightedComposition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::{JobConfig, Task};
use crate::json;

/// Relative stopping tolerance of every power-iteration norm in a report.
pub const POWER_ITERATION_TOL: f64 = 1e-12;
pub const TOL_ITERATE: f64 = 1e-9;
pub const TOL_BINOMIAL: f64 = 1e-11;
pub const TOL_MATRIX_ACTION: f64 = 1e-8;
pub const TOL_GROWTH: f64 = 1e-6;
/// Empirical truncation allowance for exact norms of non-compact operators.
pub const TOL_NORM_TRUNCATION: f64 = 0.02;
pub const TOL_NORM_UPPER: f64 = 1e-9;
pub const TOL_EIGEN: f64 = 1e-3;
pub const TOL_ISOMETRY: f64 = 1e-6;
/// ln(1e6): how far the grid must climb before an infinite claim counts.
pub const LN_GROWTH_CONFIRM: f64 = 13.815510557964274;
const ITERATE_CHECK_MAX_N: usize = 20;
const EVIDENCE: &str = "F2-truncation evidence";

/// Result of [`run`]: the report, the CSV of a `matrix` task and the
/// process exit code (0 all good, 1 failed check or numeric error, 2 usage).
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub matrix_csv: Option<String>,
    pub exit_code: i32,
}

impl Outcome {
    /// Pretty JSON with keys in sorted order and a trailing newline.
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report is plain JSON");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug)]
struct Check {
    name: &'static str,
    delta: f64,
    tolerance: f64,
    /// `true` when the check is delta ≥ tolerance instead of delta ≤ tolerance.
    lower: bool,
    detail: Value,
}

impl Check {
    fn le(name: &'static str, delta: f64, tolerance: f64, detail: Value) -> Self {
        Self { name, delta, tolerance, lower: false, detail }
    }

    fn ge(name: &'static str, delta: f64, tolerance: f64, detail: Value) -> Self {
        Self { name, delta, tolerance, lower: true, detail }
    }

    fn pass(&self) -> bool {
        if self.lower {
            self.delta >= self.tolerance
        } else {
            self.delta <= self.tolerance
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "delta": json::num(self.delta),
            "tolerance": json::num(self.tolerance),
            "relation": if self.lower { "delta >= tolerance" } else { "delta <= tolerance" },
            "pass": self.pass(),
            "detail": self.detail,
        })
    }
}

struct Verdicts {
    bounded: Verdict,
    compact: Verdict,
    power_bounded: Verdict,
    ergodic: ErgodicVerdict,
}

struct Ctx<'a> {
    cfg: &'a JobConfig,
    op: WeightedComposition,
    p: FockParams,
    tol: Tolerance,
    matrix: OnceCell<Result<TruncatedMatrix, String>>,
    verdicts: OnceCell<Verdicts>,
    spectrum: OnceCell<Result<SpectrumDescriptor, Error>>,
    errors: Vec<Value>,
}

impl<'a> Ctx<'a> {
    fn matrix(&self) -> Result<&TruncatedMatrix, String> {
        self.matrix
            .get_or_init(|| build_matrix(&self.op, self.cfg.options.dim).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn verdicts(&self) -> &Verdicts {
        self.verdicts.get_or_init(|| Verdicts {
            bounded: is_bounded(&self.op, self.tol),
            compact: is_compact(&self.op, self.tol),
            power_bounded: power_bounded(&self.op, self.p, self.tol),
            ergodic: ergodicity_with(&self.op, self.p, self.tol, self.cfg.options.max_order),
        })
    }

    fn bounded(&self) -> bool {
        self.verdicts().bounded.is_yes()
    }

    fn spectrum(&self) -> &Result<SpectrumDescriptor, Error> {
        self.spectrum
            .get_or_init(|| spectrum_with(&self.op, self.tol, self.cfg.options.max_order))
    }

    fn error(&mut self, task: &str, msg: impl std::fmt::Display) {
        self.errors.push(json!({"task": task, "error": msg.to_string()}));
    }
}

fn usage_outcome(cfg: &JobConfig, msg: &str) -> Outcome {
    let echo = serde_json::to_value(cfg).unwrap_or(Value::Null);
    Outcome {
        report: json!({"config": echo, "errors": [{"task": "config", "error": msg}], "exit_code": 2}),
        matrix_csv: None,
        exit_code: 2,
    }
}

/// Runs the requested tasks: classify, spectrum and ergodic first, then
/// verify (which reuses their results), then matrix export. The truncated
/// matrix is built once and shared.
pub fn run(cfg: &JobConfig) -> Outcome {
    if let Err(e) = cfg.validate() {
        return usage_outcome(cfg, &e.0);
    }
    let op = cfg.operator().expect("validated");
    let mut ctx = Ctx {
        cfg,
        op,
        p: cfg.params().expect("validated"),
        tol: cfg.tolerance(),
        matrix: OnceCell::new(),
        verdicts: OnceCell::new(),
        spectrum: OnceCell::new(),
        errors: Vec::new(),
    };
    let mut report = Map::new();
    let mut timing = BTreeMap::new();
    let mut matrix_csv = None;
    let mut checks_failed = false;

    for task in Task::ALL {
        if !cfg.has(task) {
            continue;
        }
        let start = Instant::now();
        match task {
            Task::Classify => {
                report.insert("verdicts".into(), verdicts_section(&ctx));
                report.insert("norms".into(), norms_section(&mut ctx));
            }
            Task::Spectrum => {
                report.insert("spectrum".into(), spectrum_section(&mut ctx));
            }
            Task::Ergodic => {
                report.insert("ergodic".into(), ergodic_section(&mut ctx));
            }
            Task::Verify => {
                if !cfg.has(Task::Classify) {
                    report.insert("verdicts".into(), verdicts_section(&ctx));
                }
                let (section, ok) = verify_section(&mut ctx);
                checks_failed |= !ok;
                report.insert("verification".into(), section);
            }
            Task::Matrix => match matrix_section(&mut ctx) {
                Some((section, csv)) => {
                    report.insert("matrix".into(), section);
                    matrix_csv = Some(csv);
                }
                None => {
                    report.insert("matrix".into(), Value::Null);
                }
            },
        }
        timing.insert(format!("{}_ms", task.name()), json::num(start.elapsed().as_secs_f64() * 1e3));
    }

    let exit_code = if checks_failed || !ctx.errors.is_empty() { 1 } else { 0 };
    report.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    report.insert("errors".into(), Value::Array(std::mem::take(&mut ctx.errors)));
    report.insert("exit_code".into(), json!(exit_code));
    report.insert("tool".into(), json!({"name": "fockwco", "version": env!("CARGO_PKG_VERSION")}));
    if cfg.options.timing {
        report.insert("timing".into(), Value::Object(timing.into_iter().collect()));
    }
    // Round trip through a string so that every nested map ends up in the
    // sorted representation regardless of how it was built.
    let report: Value = serde_json::from_str(&Value::Object(report).to_string()).expect("valid JSON");
    Outcome {
        report,
        matrix_csv,
        exit_code,
    }
}

fn verdicts_section(ctx: &Ctx) -> Value {
    let v = ctx.verdicts();
    let g = growth_sup(&ctx.op, ctx.tol);
    json!({
        "bounded": json::verdict(&v.bounded),
        "compact": json::verdict(&v.compact),
        "power_bounded": json::verdict(&v.power_bounded),
        "ergodicity": json::ergodicity(&v.ergodic),
        "growth_sup": {"value": json::num(g.value), "numeric_only": g.numeric_only},
        "tolerance": json::num(ctx.tol.eps),
    })
}

fn norms_section(ctx: &mut Ctx) -> Value {
    if !ctx.bounded() {
        return json!({"skipped": "operator is not bounded"});
    }
    let nmax = ctx.cfg.options.nmax;
    let numeric_ok = ctx.p == FockParams::Finite(2.0);
    let mut power: Option<TruncatedMatrix> = None;
    let mut rows = Vec::new();
    for n in 1..=nmax {
        let mut row = match norm_closed(&ctx.op, n, ctx.p, ctx.tol) {
            Ok(c) => json::norm_closed(&c),
            Err(e) => {
                ctx.error("classify", format!("norm_closed(n={n}): {e}"));
                json!({"closed": Value::Null})
            }
        };
        row["n"] = json!(n);
        row["numeric"] = Value::Null;
        if numeric_ok {
            match ctx.matrix().cloned() {
                Ok(m) => {
                    let next = match power.take() {
                        None => m,
                        Some(prev) => prev.mul(&m),
                    };
                    match op_norm2(&next, POWER_ITERATION_TOL) {
                        Ok(v) => {
                            row["numeric"] = json!({
                                "matrix_op_norm2": json::num(v),
                                "N": ctx.cfg.options.dim,
                                "tol": POWER_ITERATION_TOL,
                                "label": EVIDENCE,
                            })
                        }
                        Err(e) => ctx.error("classify", format!("op_norm2(n={n}): {e}")),
                    }
                    power = Some(next);
                }
                Err(e) => ctx.error("classify", format!("build_matrix: {e}")),
            }
        }
        rows.push(row);
    }
    json!({"p": json::num(ctx.p.value()), "values": rows})
}

fn spectrum_section(ctx: &mut Ctx) -> Value {
    match ctx.spectrum() {
        Ok(s) => {
            let mut v = json::spectrum(s);
            v["max_order"] = json!(ctx.cfg.options.max_order);
            v["root_of_unity_tol"] = json!(fock_wco::classify::ROOT_OF_UNITY_TOL);
            v
        }
        Err(Error::NotCovered(reason)) => json!({"tag": "not_covered", "reason": reason}),
        Err(e) => {
            let msg = e.to_string();
            ctx.error("spectrum", &msg);
            json!({"tag": "error", "reason": msg})
        }
    }
}

/// Matrix the Cesàro means should approach, when the limit is known.
fn limit_matrix(ctx: &Ctx, limit: &ErgodicLimit, m: &TruncatedMatrix) -> Result<Option<TruncatedMatrix>, Error> {
    let d = m.dim();
    let zero = || m.matrix() * Cx::new(0.0, 0.0);
    let out = match limit {
        ErgodicLimit::Zero => zero(),
        ErgodicLimit::Identity => TruncatedMatrix::identity(d).into_matrix(),
        ErgodicLimit::EvalAtZero => {
            let mut data = zero();
            data[(0, 0)] = Cx::new(1.0, 0.0);
            data
        }
        ErgodicLimit::RankOne { .. } => return Ok(Some(ergodic_limit_matrix(&ctx.op, d, ctx.tol)?)),
        ErgodicLimit::PeriodicAverage { period } => {
            // (1/k)·Σ_{j=1}^{k} Mʲ, the mean over one period of the truncation
            let mut acc = zero();
            let mut pw = TruncatedMatrix::identity(d);
            for _ in 0..*period {
                pw = pw.mul(m);
                acc += pw.matrix();
            }
            acc / Cx::new(*period as f64, 0.0)
        }
        ErgodicLimit::Unknown => return Ok(None),
    };
    TruncatedMatrix::from_matrix(out).map(Some)
}

fn ergodic_section(ctx: &mut Ctx) -> Value {
    let e = ctx.verdicts().ergodic.clone();
    let mut out = json::ergodicity(&e);
    let o = &ctx.cfg.options;
    let (d, n) = (o.cesaro_dim, o.cesaro_n);
    let m = match build_matrix(&ctx.op, d) {
        Ok(m) => m,
        Err(err) => {
            ctx.error("ergodic", format!("build_matrix: {err}"));
            out["cesaro"] = Value::Null;
            return out;
        }
    };
    let limit = match limit_matrix(ctx, &e.limit, &m) {
        Ok(l) => l,
        Err(err) => {
            ctx.error("ergodic", format!("limit matrix: {err}"));
            None
        }
    };
    let mut checkpoints: Vec<usize> = [n / 8, n / 4, n / 2, n].into_iter().filter(|&k| k >= 1).collect();
    checkpoints.dedup();
    let mut st = CesaroState::new(&m);
    let mut distances = Vec::new();
    let mut mean_norms = Vec::new();
    for &k in &checkpoints {
        st.advance_to(k);
        if st.n() < k {
            distances.push(Value::Null);
            mean_norms.push(Value::Null);
            continue;
        }
        let mean = st.mean();
        mean_norms.push(norm_or_null(ctx, &mean));
        distances.push(match &limit {
            Some(l) => norm_or_null(ctx, &mean.sub(l)),
            None => Value::Null,
        });
    }
    out["cesaro"] = json!({
        "N": d,
        "checkpoints": checkpoints,
        "distance_to_limit": distances,
        "mean_norm": mean_norms,
        "diverged": st.diverged(),
        "n_reached": st.n(),
        "tol": POWER_ITERATION_TOL,
        "label": EVIDENCE,
    });
    out
}

fn norm_or_null(ctx: &mut Ctx, m: &TruncatedMatrix) -> Value {
    match op_norm2(m, POWER_ITERATION_TOL) {
        Ok(v) => json::num(v),
        Err(e) => {
            ctx.error("ergodic", format!("op_norm2: {e}"));
            Value::Null
        }
    }
}

fn matrix_section(ctx: &mut Ctx) -> Option<(Value, String)> {
    let m = match ctx.matrix() {
        Ok(m) => m.clone(),
        Err(e) => {
            ctx.error("matrix", format!("build_matrix: {e}"));
            return None;
        }
    };
    let mut buf = Vec::new();
    if let Err(e) = write_csv(&m, &mut buf) {
        ctx.error("matrix", e);
        return None;
    }
    let section = json!({
        "N": m.dim(),
        "basis": BASIS_LABEL,
        "frobenius": json::num(m.frobenius()),
        "max_abs_entry": json::num(m.max_abs_entry()),
    });
    Some((section, String::from_utf8(buf).expect("csv is UTF-8")))
}

fn random_disc(rng: &mut ChaCha8Rng, r: f64) -> Cx {
    Cx::from_polar(r * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
}

/// Runs every applicable oracle comparison; returns the section and whether
/// all checks passed.
fn verify_section(ctx: &mut Ctx) -> (Value, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.options.seed);
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let mut skip = |name: &str, why: &str| skipped.push(json!({"name": name, "reason": why}));

    match iterate_check(ctx, &mut rng) {
        Ok(Some(c)) => checks.push(c),
        Ok(None) => skip("iterate_closed_vs_product", "no closed form for this weight"),
        Err(e) => ctx.error("verify", format!("iterate check: {e}")),
    }

    match ctx.matrix().cloned() {
        Ok(m) => {
            match build_matrix_binomial_with_magnitude(&ctx.op, m.dim()) {
                Ok((b, mag)) => {
                    let scale = mag.frobenius().max(f64::MIN_POSITIVE);
                    let delta = m.sub(&b).frobenius() / scale;
                    checks.push(Check::le(
                        "matrix_recurrence_vs_binomial",
                        delta,
                        TOL_BINOMIAL,
                        json!({"N": m.dim(), "scale": "Frobenius norm of the summed term magnitudes"}),
                    ));
                }
                Err(e) => ctx.error("verify", format!("binomial matrix: {e}")),
            }
            if ctx.bounded() {
                checks.push(matrix_action_check(ctx, &m, &mut rng));
                norm_checks(ctx, &m, &mut checks);
                eigen_checks(ctx, &m, &mut checks, &mut skip);
                if let Some(c) = isometry_check(ctx, &m) {
                    checks.push(c);
                }
            } else {
                skip("matrix_function_consistency", "operator is not bounded");
                skip("norm_vs_closed", "operator is not bounded");
            }
        }
        Err(e) => ctx.error("verify", format!("build_matrix: {e}")),
    }

    match growth_check(ctx) {
        Some(c) => checks.push(c),
        None => skip("growth_sup_analytic_vs_grid", "supremum is itself a grid estimate"),
    }

    match pointwise_check(ctx, &mut rng) {
        Ok(c) => checks.push(c),
        Err(e) => ctx.error("verify", format!("pointwise check: {e}")),
    }

    let all_pass = checks.iter().all(Check::pass);
    let section = json!({
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "skipped": skipped,
        "all_pass": all_pass,
        "seed": ctx.cfg.options.seed,
        "truncation": {
            "N": ctx.cfg.options.dim,
            "eigen_max_dim": MAX_EIGEN_DIM,
            "power_iteration_tol": POWER_ITERATION_TOL,
            "label": EVIDENCE,
        },
    });
    (section, all_pass)
}

fn iterate_check(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Option<Check>, Error> {
    if regime_of(&ctx.op, ctx.tol)? == Regime::P {
        return Ok(None);
    }
    let nmax = ctx.cfg.options.nmax.min(ITERATE_CHECK_MAX_N);
    let points: Vec<Cx> = (0..25).map(|_| random_disc(rng, 3.0)).collect();
    let mut worst = 0.0f64;
    for n in 1..=nmax {
        let form = weight_iterate_closed(&ctx.op, n, ctx.tol)?;
        for &z in &points {
            let closed = form.eval(z)?;
            let product = weight_iterate_product(&ctx.op, n, z)?;
            let pn = product.norm();
            let d = (closed - product).norm();
            let rel = if pn > 0.0 { d / pn } else { d };
            worst = worst.max(rel);
        }
    }
    Ok(Some(Check::le(
        "iterate_closed_vs_product",
        worst,
        TOL_ITERATE,
        json!({"nmax": nmax, "points": 25, "radius": 3.0, "regime": regime_of(&ctx.op, ctx.tol)?.name()}),
    )))
}

fn matrix_action_check(ctx: &Ctx, m: &TruncatedMatrix, rng: &mut ChaCha8Rng) -> Check {
    let d = m.dim();
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let mut coeffs: Vec<Cx> = (0..=d / 2).map(|_| random_disc(rng, 1.0)).collect();
        let f = TaylorSeries::from_normalized(&coeffs);
        coeffs.resize(d, Cx::new(0.0, 0.0));
        let image = TaylorSeries::from_normalized(&m.apply(&coeffs));
        for _ in 0..4 {
            let z = random_disc(rng, 2.0);
            let got = image.eval(z);
            let rel = match ctx.op.apply_at(|x| f.eval(x), z) {
                Ok(want) if want.norm() > 0.0 => (got - want).norm() / want.norm(),
                Ok(_) => got.norm(),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(rel);
        }
    }
    Check::le("matrix_function_consistency", worst, TOL_MATRIX_ACTION, json!({"functions": 3, "points": 4, "radius": 2.0}))
}

fn norm_checks(ctx: &mut Ctx, m: &TruncatedMatrix, checks: &mut Vec<Check>) {
    let nmax = ctx.cfg.options.nmax.min(3);
    let mut power = m.clone();
    let mut exact_worst: Option<f64> = None;
    let mut upper_worst: Option<f64> = None;
    let mut values = Vec::new();
    for n in 1..=nmax {
        if n > 1 {
            power = power.mul(m);
        }
        let closed = match norm_closed(&ctx.op, n, FockParams::Finite(2.0), ctx.tol) {
            Ok(c) => c,
            Err(e) => {
                ctx.error("verify", format!("norm_closed(n={n}): {e}"));
                return;
            }
        };
        let numeric = match op_norm2(&power, POWER_ITERATION_TOL) {
            Ok(v) => v,
            Err(e) => {
                ctx.error("verify", format!("op_norm2(n={n}): {e}"));
                return;
            }
        };
        match closed.bound {
            NormBound::Exact(v) if v > 0.0 => {
                let d = (numeric - v).abs() / v;
                exact_worst = Some(exact_worst.map_or(d, |w: f64| w.max(d)));
            }
            NormBound::Exact(_) => {
                exact_worst = Some(exact_worst.map_or(numeric, |w: f64| w.max(numeric)));
            }
            NormBound::Bounds { hi, .. } => {
                let d = if hi > 0.0 { numeric / hi - 1.0 } else { numeric };
                upper_worst = Some(upper_worst.map_or(d, |w: f64| w.max(d)));
            }
        }
        values.push(json!({"n": n, "closed": json::norm_closed(&closed)["closed"], "matrix_op_norm2": json::num(numeric)}));
    }
    let detail = json!({"N": m.dim(), "p": 2, "values": values, "label": EVIDENCE});
    if let Some(d) = exact_worst {
        let mut detail = detail.clone();
        detail["note"] = json!("tolerance is an empirical truncation allowance");
        checks.push(Check::le("norm_equality_truncated", d, TOL_NORM_TRUNCATION, detail));
    }
    if let Some(d) = upper_worst {
        checks.push(Check::le("norm_below_upper_bound", d, TOL_NORM_UPPER, detail));
    }
}

fn eigen_checks(ctx: &mut Ctx, m: &TruncatedMatrix, checks: &mut Vec<Check>, skip: &mut impl FnMut(&str, &str)) {
    if m.dim() > MAX_EIGEN_DIM {
        skip("compact_eigenvalues", "truncation too large for the dense eigensolver");
        return;
    }
    let eig = match eigenvalues(m) {
        Ok(e) => e,
        Err(e) => {
            ctx.error("verify", format!("eigenvalues: {e}"));
            return;
        }
    };
    let mut moduli: Vec<f64> = eig.values.iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    let max_mod = moduli.last().copied().unwrap_or(0.0);
    let median = moduli[moduli.len() / 2];
    if let Ok(upper) = norm_closed(&ctx.op, 1, FockParams::Finite(2.0), ctx.tol).map(|c| c.bound.upper()) {
        checks.push(Check::le(
            "eigenvalues_within_norm",
            max_mod - upper,
            1e-9,
            json!({"max_modulus": json::num(max_mod), "median_modulus": json::num(median), "norm_upper": json::num(upper), "converged": eig.converged}),
        ));
    }
    let spec = match ctx.spectrum() {
        Ok(SpectrumDescriptor::GeometricWithZero { base, ratio }) => Some((*base, *ratio)),
        _ => None,
    };
    let Some((base, ratio)) = spec else {
        skip("compact_eigenvalues", "spectrum is not a geometric sequence");
        return;
    };
    let mut deltas = Vec::new();
    let mut worst = 0.0f64;
    for j in 0..6 {
        let want = base * ratio.powu(j);
        let dist = eig.values.iter().map(|v| (v - want).norm()).fold(f64::INFINITY, f64::min);
        let rel = dist / want.norm().max(1.0);
        worst = worst.max(rel);
        deltas.push(json::num(rel));
    }
    checks.push(Check::le(
        "compact_eigenvalues",
        worst,
        TOL_EIGEN,
        json!({"N": m.dim(), "deltas": deltas, "converged": eig.converged, "scale": "max(1, |expected|)"}),
    ));
}

fn isometry_check(ctx: &Ctx, m: &TruncatedMatrix) -> Option<Check> {
    if !ctx.tol.is_unimodular(ctx.op.symbol.a) {
        return None;
    }
    let c = norm_closed(&ctx.op, 1, FockParams::Finite(2.0), ctx.tol).ok()?;
    let NormBound::Exact(v) = c.bound else { return None };
    if (v - 1.0).abs() > 1e-12 {
        return None;
    }
    let k = (m.dim() / 4).max(1);
    let defect = isometry_defect(m, k).ok()?;
    Some(Check::le("isometry_defect", defect, TOL_ISOMETRY, json!({"N": m.dim(), "k": k})))
}

fn growth_check(ctx: &Ctx) -> Option<Check> {
    let claim = growth_sup(&ctx.op, ctx.tol);
    if claim.numeric_only {
        return None;
    }
    let f = |z: Cx| log_growth_at(&ctx.op, z);
    if claim.is_finite() {
        let grid = numeric_log_sup(f).exp();
        let scale = claim.value.max(f64::MIN_POSITIVE);
        Some(Check::le(
            "growth_sup_analytic_vs_grid",
            (grid - claim.value).abs() / scale,
            TOL_GROWTH,
            json!({"analytic": json::num(claim.value), "grid": json::num(grid)}),
        ))
    } else {
        let radii = [10.0, 20.0, 40.0, 80.0, 160.0];
        let rings = ring_maxima(f, &radii, 256);
        let top = rings.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Check::ge(
            "growth_sup_infinite_confirmed",
            top,
            LN_GROWTH_CONFIRM,
            json!({"radii": radii, "log_ring_max": rings.into_iter().map(json::num).collect::<Vec<_>>()}),
        ))
    }
}

fn pointwise_check(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Check, Error> {
    let grid = PolarGrid::new(200, 128, None);
    let mut worst = f64::INFINITY;
    for _ in 0..8 {
        let m = rng.random_range(0..20);
        let z = random_disc(rng, 4.0);
        let c = pointwise_bound_check(&TaylorSeries::monomial(m), ctx.p, z, &grid)?;
        let rel = if c.holds { c.slack.max(0.0) / c.bound.max(f64::MIN_POSITIVE) } else { -1.0 };
        worst = worst.min(rel);
    }
    Ok(Check::ge(
        "pointwise_estimate",
        worst,
        0.0,
        json!({"trials": 8, "p": json::num(ctx.p.value()), "functions": "monomials of degree < 20"}),
    ))
}

/// Compact summary of a report for sweep tables.
pub fn key_verdicts(report: &Value) -> [String; 5] {
    let get = |path: &[&str]| {
        let mut v = report;
        for k in path {
            v = &v[*k];
        }
        v.as_str().unwrap_or("").to_string()
    };
    [
        get(&["verdicts", "bounded", "value"]),
        get(&["verdicts", "compact", "value"]),
        get(&["verdicts", "power_bounded", "value"]),
        get(&["verdicts", "ergodicity", "mean", "value"]),
        get(&["verdicts", "ergodicity", "uniform", "value"]),
    ]
}

/// Largest `delta` among verification checks, if any ran.
pub fn max_delta(report: &Value) -> Option<f64> {
    report["verification"]["checks"]
        .as_array()?
        .iter()
        .filter_map(|c| c["delta"].as_f64())
        .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.max(d))))
}
