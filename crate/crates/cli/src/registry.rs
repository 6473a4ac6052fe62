//! The fixed identity registry: one entry per checkable identity, each with
//! a single-case evaluator and a default parameter grid.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use tvhp_core::boson::{self, ExactCheck};
use tvhp_core::fock::{self, FockCutoff, SqueezeParam};
use tvhp_core::hermite::{self, GenParams};
use tvhp_core::quad::{self, GaussianIntegralSpec};
use tvhp_core::Error;

use crate::report::{Measure, Verdict, VerificationReport, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    GenfuncSingle,
    GenfuncDouble,
    GenfuncFixedM,
    LaguerreGenfunc,
    LaguerreRelation,
    OpNormal,
    OpAntinormalScaled,
    OpReciprocal,
    OpSingleMode,
    OpAntinormalSingle,
    FactorNormal,
    FactorAntinormal,
    OpLaguerre,
    IntForward,
    IntReciprocal,
    IntGaussian,
    IntLaguerreProduct,
    PsvState,
    PsvNorm,
    Completeness,
}

/// Tolerance class; fixes the default tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckClass {
    /// Symbolic: zero coefficient difference.
    Exact,
    /// Quadrature that is exact for the integrand: `1e-12` relative.
    ExactQuadrature,
    /// Series truncation and truncated Fock space: `1e-8` relative.
    Truncated,
}

impl CheckClass {
    pub fn default_tolerance(self) -> Measure {
        match self {
            CheckClass::Exact => Measure::EXACT,
            CheckClass::ExactQuadrature => Measure::Value(1e-12),
            CheckClass::Truncated => Measure::Value(1e-8),
        }
    }
}

use IdentityId::*;

impl IdentityId {
    pub const ALL: [IdentityId; 20] = [
        GenfuncSingle,
        GenfuncDouble,
        GenfuncFixedM,
        LaguerreGenfunc,
        LaguerreRelation,
        OpNormal,
        OpAntinormalScaled,
        OpReciprocal,
        OpSingleMode,
        OpAntinormalSingle,
        FactorNormal,
        FactorAntinormal,
        OpLaguerre,
        IntForward,
        IntReciprocal,
        IntGaussian,
        IntLaguerreProduct,
        PsvState,
        PsvNorm,
        Completeness,
    ];

    pub fn key(self) -> &'static str {
        match self {
            GenfuncSingle => "genfunc-single",
            GenfuncDouble => "genfunc-double",
            GenfuncFixedM => "genfunc-fixed-m",
            LaguerreGenfunc => "laguerre-genfunc",
            LaguerreRelation => "laguerre-relation",
            OpNormal => "op-normal",
            OpAntinormalScaled => "op-antinormal-scaled",
            OpReciprocal => "op-reciprocal",
            OpSingleMode => "op-single-mode",
            OpAntinormalSingle => "op-antinormal-single",
            FactorNormal => "factor-normal",
            FactorAntinormal => "factor-antinormal",
            OpLaguerre => "op-laguerre",
            IntForward => "int-forward",
            IntReciprocal => "int-reciprocal",
            IntGaussian => "int-gaussian",
            IntLaguerreProduct => "int-laguerre-product",
            PsvState => "psv-state",
            PsvNorm => "psv-norm",
            Completeness => "completeness",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.key() == key)
    }

    pub fn module(self) -> &'static str {
        match self {
            GenfuncSingle | GenfuncDouble | GenfuncFixedM | LaguerreGenfunc | LaguerreRelation => "hermite-core",
            OpNormal | OpAntinormalScaled | OpReciprocal | OpSingleMode | OpAntinormalSingle | FactorNormal
            | FactorAntinormal | OpLaguerre => "boson-algebra",
            IntForward | IntReciprocal | IntGaussian | IntLaguerreProduct => "gauss-quad",
            PsvState | PsvNorm | Completeness => "fock-numeric",
        }
    }

    pub fn class(self) -> CheckClass {
        match self {
            LaguerreRelation | OpNormal | OpAntinormalScaled | OpReciprocal | OpSingleMode | OpAntinormalSingle
            | FactorNormal | FactorAntinormal | OpLaguerre => CheckClass::Exact,
            IntForward | IntReciprocal | IntLaguerreProduct | Completeness => CheckClass::ExactQuadrature,
            GenfuncSingle | GenfuncDouble | GenfuncFixedM | LaguerreGenfunc | IntGaussian | PsvState | PsvNorm => {
                CheckClass::Truncated
            }
        }
    }

    /// Generating-function checks truncated at a series order.
    pub fn is_series(self) -> bool {
        matches!(self, GenfuncSingle | GenfuncDouble | GenfuncFixedM | LaguerreGenfunc)
    }

    /// Parameter names this identity reads from a [`Case`].
    pub fn parameter_names(self) -> &'static [&'static str] {
        match self {
            GenfuncSingle => &["t", "t_prime", "xi", "order"],
            GenfuncDouble => &["s", "t", "x", "y", "xp", "yp", "order"],
            GenfuncFixedM => &["m", "t", "x", "y", "xp", "yp", "order"],
            LaguerreGenfunc => &["s", "x", "order"],
            LaguerreRelation => &["m"],
            OpNormal | OpAntinormalScaled | OpReciprocal | OpSingleMode | OpAntinormalSingle => &["m", "n"],
            FactorNormal | FactorAntinormal => &["max_degree"],
            OpLaguerre => &["m", "max_degree"],
            IntForward | IntReciprocal => &["m", "n", "alpha", "quad_order"],
            IntGaussian => &["eta", "f", "g", "quad_order"],
            IntLaguerreProduct => &["m", "tau", "quad_order"],
            PsvState | PsvNorm => &["m", "tau", "cutoff"],
            Completeness => &["basis_max", "quad_order"],
        }
    }

    fn default_order(self) -> u32 {
        match self {
            GenfuncFixedM => 40,
            LaguerreGenfunc => 60,
            _ => 30,
        }
    }

    fn default_quad_order(self) -> usize {
        match self {
            IntLaguerreProduct => 12,
            _ => 24,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One fully specified parameter point. Fields an identity does not use are
/// ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub m: u32,
    pub n: u32,
    pub t: Complex64,
    pub t_prime: Complex64,
    pub s: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub xp: Complex64,
    pub yp: Complex64,
    pub xi: Complex64,
    pub alpha: Complex64,
    pub eta: Complex64,
    pub f: Complex64,
    pub g: Complex64,
    pub tau: f64,
    /// Series truncation order `M`; `None` uses the identity's default.
    pub order: Option<u32>,
    pub cutoff: u32,
    /// Quadrature points per axis; `None` uses the identity's default.
    pub quad_order: Option<usize>,
    pub max_degree: u32,
    pub basis_max: u32,
}

impl Default for Case {
    fn default() -> Self {
        Self {
            m: 3,
            n: 2,
            t: c(0.3, 0.0),
            t_prime: c(0.4, 0.0),
            s: c(0.3, 0.0),
            x: c(0.5, 0.2),
            y: c(-0.3, 0.4),
            xp: c(0.7, -0.1),
            yp: c(0.2, 0.6),
            xi: c(0.6, -0.8),
            alpha: c(0.7, 0.3),
            eta: c(-1.0, 0.0),
            f: c(0.5, 0.5),
            g: c(-0.3, 0.2),
            tau: 0.5,
            order: None,
            cutoff: 40,
            quad_order: None,
            max_degree: 8,
            basis_max: 4,
        }
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

impl Case {
    fn param(&self, id: IdentityId, name: &str) -> Value {
        match name {
            "m" => json!(self.m),
            "n" => json!(self.n),
            "t" => complex_json(self.t),
            "t_prime" => complex_json(self.t_prime),
            "s" => complex_json(self.s),
            "x" => complex_json(self.x),
            "y" => complex_json(self.y),
            "xp" => complex_json(self.xp),
            "yp" => complex_json(self.yp),
            "xi" => complex_json(self.xi),
            "alpha" => complex_json(self.alpha),
            "eta" => complex_json(self.eta),
            "f" => complex_json(self.f),
            "g" => complex_json(self.g),
            "tau" => json!(self.tau),
            "order" => json!(self.order(id)),
            "cutoff" => json!(self.cutoff),
            "quad_order" => json!(self.quad_order(id)),
            "max_degree" => json!(self.max_degree),
            "basis_max" => json!(self.basis_max),
            other => unreachable!("unknown parameter {other}"),
        }
    }

    pub fn parameters(&self, id: IdentityId) -> BTreeMap<String, Value> {
        id.parameter_names().iter().map(|&k| (k.to_string(), self.param(id, k))).collect()
    }

    fn order(&self, id: IdentityId) -> u32 {
        self.order.unwrap_or_else(|| id.default_order())
    }

    fn quad_order(&self, id: IdentityId) -> usize {
        self.quad_order.unwrap_or_else(|| id.default_quad_order())
    }

    fn label(&self, id: IdentityId) -> String {
        self.parameters(id)
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Result of evaluating one case.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseOutcome {
    pub residual: Measure,
    pub notes: Vec<String>,
}

impl CaseOutcome {
    fn value(r: f64) -> Self {
        Self { residual: Measure::Value(r), notes: Vec::new() }
    }

    /// Exact outcome: `"exact"` when nothing differs, otherwise the number
    /// of nonzero coefficients in the difference.
    fn exact(differing: usize) -> Self {
        let residual = if differing == 0 { Measure::EXACT } else { Measure::Value(differing as f64) };
        Self { residual, notes: Vec::new() }
    }
}

/// `|a - b| / max(1, |b|)`.
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// `Σ_{n ≥ m} [n!/(n-m)!]² τ^{2n}` summed until the terms stop mattering.
pub fn psv_closed_sum(m: u32, tau: f64) -> f64 {
    let mut sum = 0.0;
    for n in m..5000 {
        let falling: f64 = (n - m + 1..=n).map(f64::from).product();
        let term = (falling * tau.powi(n as i32)).powi(2);
        sum += term;
        if n > 2 * m + 10 && term < 1e-20 * sum {
            break;
        }
    }
    sum
}

/// Evaluates one identity at one parameter point.
pub fn evaluate(id: IdentityId, case: &Case) -> tvhp_core::Result<CaseOutcome> {
    let order = case.order(id);
    let q = case.quad_order(id);
    Ok(match id {
        GenfuncSingle => {
            let p = GenParams { t: case.t, t_prime: case.t_prime, ..Default::default() };
            CaseOutcome::value(hermite::residual_genfunc_single(&p, case.xi, case.xi.conj(), order))
        }
        GenfuncDouble => {
            let p = GenParams { t: case.t, s: case.s, ..Default::default() };
            CaseOutcome::value(hermite::residual_genfunc_double(&p, case.x, case.y, case.xp, case.yp, order)?)
        }
        GenfuncFixedM => CaseOutcome::value(hermite::residual_genfunc_fixed_m(
            case.m, case.t, case.x, case.y, case.xp, case.yp, order,
        )?),
        LaguerreGenfunc => CaseOutcome::value(hermite::residual_laguerre_genfunc(case.s, case.x, order)?),
        LaguerreRelation => CaseOutcome::exact(hermite::laguerre_relation_difference(case.m).len()),
        OpNormal => CaseOutcome::exact(boson::check_identity_normal(case.m, case.n).difference_terms()),
        OpAntinormalScaled => {
            CaseOutcome::exact(boson::check_identity_antinormal_scaled(case.m, case.n).difference_terms())
        }
        OpReciprocal => CaseOutcome::exact(boson::check_identity_reciprocal(case.m, case.n).difference_terms()),
        OpSingleMode => CaseOutcome::exact(boson::check_identity_single_mode(case.m, case.n).difference_terms()),
        OpAntinormalSingle => {
            CaseOutcome::exact(boson::check_identity_antinormal_single(case.m, case.n).difference_terms())
        }
        FactorNormal => CaseOutcome::exact(boson::check_factorization_normal(case.max_degree).difference_terms()),
        FactorAntinormal => {
            CaseOutcome::exact(boson::check_factorization_antinormal(case.max_degree).difference_terms())
        }
        OpLaguerre => match boson::check_identity_laguerre_operator(case.m, case.max_degree) {
            Ok(check) => CaseOutcome::exact(check.difference_terms()),
            Err(e @ Error::NegativePowerSurvives { .. }) => CaseOutcome {
                residual: Measure::Value(1.0),
                notes: vec![e.to_string()],
            },
            Err(e) => return Err(e),
        },
        IntForward => {
            let got = quad::integral_tvhp_forward(case.m, case.n, case.alpha, q)?;
            let want = case.alpha.powu(case.m) * case.alpha.conj().powu(case.n);
            CaseOutcome::value(relative_error(got, want))
        }
        IntReciprocal => {
            let got = quad::integral_tvhp_reciprocal(case.m, case.n, case.alpha, q)?;
            let mi = c(0.0, -1.0);
            let want = c(0.0, 1.0).powu(case.m + case.n)
                * hermite::hermite_eval(case.m, case.n, mi * case.alpha, mi * case.alpha.conj());
            CaseOutcome::value(relative_error(got, want))
        }
        IntGaussian => {
            let spec = GaussianIntegralSpec { eta: case.eta, f: case.f, g: case.g };
            let got = quad::gaussian_integral_numeric(&spec, q)?;
            let want = quad::gaussian_integral_analytic(&spec)?;
            CaseOutcome::value(relative_error(got, want))
        }
        IntLaguerreProduct => {
            let sq = SqueezeParam::from_tau(case.tau)?;
            let r = quad::integral_laguerre_product(case.m, &sq, q)?;
            let residual = (r.numeric - r.corrected_value).abs() / r.corrected_value.abs();
            CaseOutcome {
                residual: Measure::Value(residual),
                notes: vec![format!(
                    "m={} tau={}: numeric {:.15}, published closed form {:.15}, cosh^2(lambda) x published = {:.15}",
                    case.m, case.tau, r.numeric, r.paper_value, r.corrected_value
                )],
            }
        }
        PsvState => {
            let sq = SqueezeParam::from_tau(case.tau)?;
            CaseOutcome::value(fock::psv_state_residual(case.m, &sq, FockCutoff::new(case.cutoff)?)?)
        }
        PsvNorm => {
            let sq = SqueezeParam::from_tau(case.tau)?;
            let r = fock::psv_norm_squared(case.m, &sq, FockCutoff::new(case.cutoff)?)?;
            let closed = psv_closed_sum(case.m, case.tau);
            let cosh2 = sq.lambda().cosh().powi(2);
            let sum_err = (r.numeric - closed).abs() / closed;
            let ratio_err = (r.ratio - cosh2).abs() / cosh2;
            CaseOutcome {
                residual: Measure::Value(sum_err.max(ratio_err)),
                notes: vec![format!(
                    "m={} tau={}: numeric {:.15}, published closed form {:.15}, ratio {:.15} vs cosh^2(lambda) {:.15}",
                    case.m, case.tau, r.numeric, r.paper_value, r.ratio, cosh2
                )],
            }
        }
        Completeness => CaseOutcome::value(fock::completeness_gram(case.basis_max, q)?),
    })
}

/// Fixed text attached to reports whose published closed form is off by a
/// known factor.
fn erratum_note(id: IdentityId) -> Option<&'static str> {
    match id {
        PsvNorm => Some(
            "The published norm (m!)^2 sinh^{2m}(lambda) P_m(cosh 2 lambda) omits the sech^2(lambda) normalization \
             of the squeezed vacuum; the numeric norm of the unnormalized state equals cosh^2(lambda) times it. \
             Pass means agreement with the independent closed sum and with that factor.",
        ),
        IntLaguerreProduct => Some(
            "The published value cosh^{2m}(lambda) P_m(cosh 2 lambda) is low by cosh^2(lambda) (already at m = 0); \
             pass means agreement with cosh^2(lambda) times the published value.",
        ),
        _ => None,
    }
}

/// Batch-wide overrides for `verify-all`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BatchSettings {
    pub tol: Option<f64>,
    pub max_degree: Option<u32>,
    pub cutoff: Option<u32>,
    pub quad_order: Option<usize>,
}

/// Default parameter grid of an identity, with a compact description for
/// the report.
pub fn grid(id: IdentityId, settings: &BatchSettings) -> (Vec<Case>, BTreeMap<String, Value>) {
    let base = Case {
        cutoff: settings.cutoff.unwrap_or(40),
        quad_order: settings.quad_order,
        ..Case::default()
    };
    let d = settings.max_degree;
    let op_max = d.unwrap_or(6);
    let small_m = d.map_or(3, |d| d.min(3));
    let mut desc = BTreeMap::new();
    let mut put = |k: &str, v: Value| {
        desc.insert(k.to_string(), v);
    };
    let mut cases = Vec::new();
    match id {
        GenfuncSingle => {
            let ts = [c(0.5, 0.0), c(0.6, 0.8), c(-1.0, 0.0)];
            let xis = [c(0.0, 0.0), c(0.6, -0.8), c(-1.0, 0.0), c(0.3, 0.4)];
            for &t in &ts {
                for &t_prime in &ts {
                    for &xi in &xis {
                        cases.push(Case { t, t_prime, xi, ..base.clone() });
                    }
                }
            }
            put("t", json!(ts.map(complex_json)));
            put("t_prime", json!(ts.map(complex_json)));
            put("xi", json!(xis.map(complex_json)));
            put("order", json!(GenfuncSingle.default_order()));
        }
        GenfuncDouble => {
            let points = sample_points();
            for &(x, y, xp, yp) in &points {
                cases.push(Case { s: c(0.3, 0.0), t: c(0.3, 0.0), x, y, xp, yp, ..base.clone() });
            }
            put("s", json!(0.3));
            put("t", json!(0.3));
            put("points", json!(points.len()));
            put("order", json!(GenfuncDouble.default_order()));
        }
        GenfuncFixedM => {
            let points = sample_points();
            for m in 0..=small_m {
                for t in [0.1, 0.25] {
                    for &(x, y, xp, yp) in &points {
                        cases.push(Case { m, t: c(t, 0.0), x, y, xp, yp, ..base.clone() });
                    }
                }
            }
            put("m", json!(format!("0..={small_m}")));
            put("t", json!([0.1, 0.25]));
            put("points", json!(points.len()));
            put("order", json!(GenfuncFixedM.default_order()));
        }
        LaguerreGenfunc => {
            let xs = [c(0.0, 0.0), c(1.0, 0.0), c(-0.5, 0.5), c(2.0, 0.0)];
            for &x in &xs {
                cases.push(Case { s: c(0.4, 0.0), x, ..base.clone() });
            }
            put("s", json!(0.4));
            put("x", json!(xs.map(complex_json)));
            put("order", json!(LaguerreGenfunc.default_order()));
        }
        LaguerreRelation => {
            let top = d.unwrap_or(8);
            cases.extend((0..=top).map(|m| Case { m, ..base.clone() }));
            put("m", json!(format!("0..={top}")));
        }
        OpNormal | OpAntinormalScaled | OpReciprocal | OpSingleMode | OpAntinormalSingle => {
            for m in 0..=op_max {
                for n in 0..=op_max {
                    cases.push(Case { m, n, ..base.clone() });
                }
            }
            put("m", json!(format!("0..={op_max}")));
            put("n", json!(format!("0..={op_max}")));
        }
        FactorNormal | FactorAntinormal => {
            let k = d.unwrap_or(8);
            cases.push(Case { max_degree: k, ..base.clone() });
            put("max_degree", json!(k));
        }
        OpLaguerre => {
            let k = d.unwrap_or(8);
            for m in 0..=small_m {
                cases.push(Case { m, max_degree: k.max(m), ..base.clone() });
            }
            put("m", json!(format!("0..={small_m}")));
            put("max_degree", json!(k));
        }
        IntForward | IntReciprocal => {
            let top = op_max;
            let alphas = [c(0.0, 0.0), c(0.5, 0.5), c(-1.2, 0.9), c(0.0, 2.0), c(1.2, -1.6)];
            for m in 0..=top {
                for n in 0..=top {
                    for &alpha in &alphas {
                        cases.push(Case { m, n, alpha, ..base.clone() });
                    }
                }
            }
            put("m", json!(format!("0..={top}")));
            put("n", json!(format!("0..={top}")));
            put("alpha", json!(alphas.map(complex_json)));
            put("quad_order", json!(base.quad_order(id)));
        }
        IntGaussian => {
            let etas = [c(-1.0, 0.0), c(-0.5, 0.3), c(-2.0, -1.0)];
            let fs = [c(0.0, 0.0), c(1.5, 0.0), c(-0.9, 1.2)];
            for &eta in &etas {
                for &f in &fs {
                    for &g in &fs {
                        cases.push(Case { eta, f, g, ..base.clone() });
                    }
                }
            }
            put("eta", json!(etas.map(complex_json)));
            put("f", json!(fs.map(complex_json)));
            put("g", json!(fs.map(complex_json)));
            put("quad_order", json!(base.quad_order(id)));
        }
        IntLaguerreProduct | PsvState | PsvNorm => {
            for m in 0..=small_m {
                for tau in [0.3, 0.5] {
                    cases.push(Case { m, tau, ..base.clone() });
                }
            }
            put("m", json!(format!("0..={small_m}")));
            put("tau", json!([0.3, 0.5]));
            if id == IntLaguerreProduct {
                put("quad_order", json!(base.quad_order(id)));
            } else {
                put("cutoff", json!(base.cutoff));
            }
        }
        Completeness => {
            let b = d.map_or(4, |d| d.min(4));
            cases.push(Case { basis_max: b, ..base.clone() });
            put("basis_max", json!(b));
            put("quad_order", json!(base.quad_order(id)));
        }
    }
    (cases, desc)
}

/// `(x, y, x', y')` sample points for the two-point generating functions.
fn sample_points() -> [(Complex64, Complex64, Complex64, Complex64); 3] {
    [
        (c(0.5, 0.2), c(-0.3, 0.4), c(0.7, -0.1), c(0.2, 0.6)),
        (c(1.0, 0.0), c(1.0, 0.0), c(-0.5, 0.0), c(0.8, 0.0)),
        (c(-0.4, -0.6), c(0.9, 0.3), c(0.1, 0.1), c(-1.0, 0.5)),
    ]
}

/// How a report ended, for exit-code purposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    /// At least one case hit a domain, cutoff or tail error.
    DomainError,
}

/// Runs a list of cases and folds them into one report: the residual is the
/// worst case, `"exact"` only when every case is.
pub fn run_cases(
    id: IdentityId,
    cases: &[Case],
    parameters: BTreeMap<String, Value>,
    tol: Option<f64>,
) -> (VerificationReport, RunStatus) {
    let start = Instant::now();
    let tolerance = match (id.class(), tol) {
        (CheckClass::Exact, _) | (_, None) => id.class().default_tolerance(),
        (_, Some(t)) => Measure::Value(t),
    };
    let mut notes: Vec<String> = erratum_note(id).map(str::to_string).into_iter().collect();
    let mut worst: Option<Measure> = Some(Measure::EXACT);
    let mut status = RunStatus::Completed;
    for case in cases {
        match evaluate(id, case) {
            Ok(out) => {
                notes.extend(out.notes);
                worst = match (worst, out.residual) {
                    (None, _) => None,
                    (Some(Measure::Exact(_)), r) => Some(r),
                    (Some(w), Measure::Exact(_)) => Some(w),
                    (Some(Measure::Value(a)), Measure::Value(b)) => {
                        Some(Measure::Value(if b.is_nan() || b > a { b } else { a }))
                    }
                };
            }
            Err(e) => {
                notes.push(format!("{}: error: {e}", case.label(id)));
                worst = None;
                status = RunStatus::DomainError;
            }
        }
    }
    if id.is_series() && status == RunStatus::Completed {
        notes.push(truncation_note(id, cases));
    }
    if tol.is_some() && id.class() == CheckClass::Exact {
        notes.push("tolerance override ignored for an exact check".into());
    }
    let verdict = Verdict::decide(worst, tolerance);
    let report = VerificationReport {
        schema_version: SCHEMA_VERSION.into(),
        id: id.key().into(),
        module: id.module().into(),
        parameters,
        residual: worst,
        tolerance,
        verdict,
        notes: notes.join("\n"),
        wall_time: start.elapsed().as_secs_f64(),
    };
    (report, status)
}

/// Worst residual five orders below the truncation actually used, so a
/// small residual can be told apart from a coincidence.
fn truncation_note(id: IdentityId, cases: &[Case]) -> String {
    let mut orders = Vec::new();
    let mut worst = 0.0f64;
    for case in cases {
        let lower = case.order(id).saturating_sub(5);
        orders.push(lower);
        let shorter = Case { order: Some(lower), ..case.clone() };
        if let Ok(CaseOutcome { residual: Measure::Value(r), .. }) = evaluate(id, &shorter) {
            worst = worst.max(r);
        }
    }
    orders.dedup();
    format!("worst residual at truncation order {orders:?}: {worst:.3e}")
}

/// Runs one identity at one point.
pub fn verify_one(id: IdentityId, case: &Case, tol: Option<f64>) -> (VerificationReport, RunStatus) {
    run_cases(id, std::slice::from_ref(case), case.parameters(id), tol)
}

/// Runs the whole registry over its default grids in parallel; output keeps
/// registry order.
pub fn verify_all(settings: &BatchSettings) -> Vec<VerificationReport> {
    IdentityId::ALL
        .par_iter()
        .map(|&id| {
            let (cases, desc) = grid(id, settings);
            run_cases(id, &cases, desc, settings.tol).0
        })
        .collect()
}
