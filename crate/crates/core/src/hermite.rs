//! Two-variable Hermite polynomials and the scalar identities around them.
//!
//! `H_{m,n}(u, v) = Σ_l (-1)^l m! n! / (l! (m-l)! (n-l)!) u^{m-l} v^{n-l}`.
//!
//! Coefficients are built exactly and cached per `(m, n)`; numeric evaluation
//! converts the cached integers to `f64` once.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, factorial_f64, ComplexPoint, GaussianRational};

/// Sparse exact polynomial in two commuting indeterminates `u`, `v`.
///
/// Keys are exponent pairs `(j, k)` for `u^j v^k`. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivariatePoly {
    terms: BTreeMap<(u32, u32), GaussianRational>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, GaussianRational::one())
    }

    pub fn monomial(j: u32, k: u32, coeff: GaussianRational) -> Self {
        let mut p = Self::zero();
        p.add_term(j, k, coeff);
        p
    }

    pub fn add_term(&mut self, j: u32, k: u32, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry((j, k)).or_default();
        *slot += &coeff;
        if slot.is_zero() {
            self.terms.remove(&(j, k));
        }
    }

    pub fn coefficient(&self, j: u32, k: u32) -> GaussianRational {
        self.terms.get(&(j, k)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&(u32, u32), &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(j, k)| j + k).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero();
        for (&(j, k), a) in &self.terms {
            out.add_term(j, k, a * c);
        }
        out
    }

    pub fn eval(&self, u: ComplexPoint, v: ComplexPoint) -> ComplexPoint {
        self.terms
            .iter()
            .map(|(&(j, k), c)| c.to_complex64() * u.powu(j) * v.powu(k))
            .sum()
    }
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (&(j, k), c) in &rhs.terms {
            out.add_term(j, k, c.clone());
        }
        out
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (&(j, k), c) in &rhs.terms {
            out.add_term(j, k, -c);
        }
        out
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for (&(j1, k1), a) in &self.terms {
            for (&(j2, k2), b) in &rhs.terms {
                out.add_term(j1 + j2, k1 + k2, a * b);
            }
        }
        out
    }
}

type Cache = RwLock<HashMap<(u32, u32), Arc<BivariatePoly>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn entry(m: u32, n: u32) -> Arc<BivariatePoly> {
    if let Some(e) = cache().read().expect("hermite cache poisoned").get(&(m, n)) {
        return e.clone();
    }
    let built = Arc::new(build_coeffs(m, n));
    // Concurrent builders produce identical entries; first insert wins.
    cache()
        .write()
        .expect("hermite cache poisoned")
        .entry((m, n))
        .or_insert(built)
        .clone()
}

fn build_coeffs(m: u32, n: u32) -> BivariatePoly {
    if m == 0 || n == 0 {
        return BivariatePoly::monomial(m, n, GaussianRational::one());
    }
    let mut p = BivariatePoly::zero();
    for l in 0..=m.min(n) {
        // m! n! / (l! (m-l)! (n-l)!) = C(m,l) C(n,l) l!
        let mag: BigInt = binomial(m, l) * binomial(n, l) * factorial(l);
        let c = if l % 2 == 0 { mag } else { -mag };
        p.add_term(m - l, n - l, GaussianRational::from_bigint(c));
    }
    p
}

/// Exact coefficients of `H_{m,n}(u, v)`.
pub fn hermite_coeffs(m: u32, n: u32) -> Arc<BivariatePoly> {
    entry(m, n)
}

/// `H_{m,n}(u, v)` with independent arguments.
///
/// Evaluated as `(-1)^k k! u^{m-k} v^{n-k} L_k^{(|m-n|)}(uv)` with
/// `k = min(m, n)`, the associated Laguerre factor by its three-term
/// recurrence. Near the Laguerre zeros this loses far less than summing the
/// explicit coefficients.
pub fn hermite_eval(m: u32, n: u32, u: ComplexPoint, v: ComplexPoint) -> ComplexPoint {
    let k = m.min(n);
    let a = f64::from(m.max(n) - k);
    let x = u * v;
    let one = Complex64::new(1.0, 0.0);
    let (mut prev, mut cur) = (Complex64::zero(), one);
    for j in 0..k {
        let j = f64::from(j);
        let next = ((2.0 * j + 1.0 + a - x) * cur - (j + a) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    cur * (sign * factorial_f64(k)) * u.powu(m - k) * v.powu(n - k)
}

/// `H_{m,n}(ξ, ξ*)`.
pub fn hermite_eval_conj(m: u32, n: u32, xi: ComplexPoint) -> ComplexPoint {
    hermite_eval(m, n, xi, xi.conj())
}

/// Exact coefficients of `L_m(x)`, lowest power first.
pub fn laguerre_coeffs(m: u32) -> Vec<BigRational> {
    (0..=m)
        .map(|k| {
            let c = BigRational::new(binomial(m, k), factorial(k));
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// `L_m(x) = Σ_k (-1)^k C(m,k) x^k / k!`.
pub fn laguerre_eval(m: u32, x: ComplexPoint) -> ComplexPoint {
    horner(&laguerre_coeffs(m), x)
}

/// Exact coefficients of the Legendre polynomial `P_m(x)`, lowest power first.
pub fn legendre_coeffs(m: u32) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); m as usize + 1];
    let two_m = BigInt::one() << m;
    for l in 0..=m / 2 {
        let num = factorial(2 * m - 2 * l);
        let den = &two_m * factorial(l) * factorial(m - l) * factorial(m - 2 * l);
        let c = BigRational::new(num, den);
        out[(m - 2 * l) as usize] = if l % 2 == 0 { c } else { -c };
    }
    out
}

pub fn legendre_eval(m: u32, x: ComplexPoint) -> ComplexPoint {
    horner(&legendre_coeffs(m), x)
}

fn horner(coeffs: &[BigRational], x: ComplexPoint) -> ComplexPoint {
    coeffs.iter().rev().fold(Complex64::zero(), |acc, c| {
        acc * x + GaussianRational::from(c.clone()).to_complex64()
    })
}

/// `H_{m,m}(u, v) - (-1)^m m! L_m(uv)` as an exact polynomial; zero when the
/// Laguerre relation holds.
pub fn laguerre_relation_difference(m: u32) -> BivariatePoly {
    let sign = if m % 2 == 0 { 1 } else { -1 };
    let scale = GaussianRational::from_bigint(factorial(m) * sign);
    let mut rhs = BivariatePoly::zero();
    for (k, c) in laguerre_coeffs(m).into_iter().enumerate() {
        rhs.add_term(k as u32, k as u32, GaussianRational::from(c) * &scale);
    }
    &*hermite_coeffs(m, m) - &rhs
}

/// `|H_{m,m}(x, y) - (-1)^m m! L_m(xy)|`.
pub fn check_laguerre_relation(m: u32, x: ComplexPoint, y: ComplexPoint) -> f64 {
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = laguerre_eval(m, x * y) * sign * crate::scalar::factorial_f64(m);
    (hermite_eval(m, m, x, y) - rhs).norm()
}

/// Expansion parameters for the generating functions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GenParams {
    pub t: ComplexPoint,
    pub t_prime: ComplexPoint,
    pub s: ComplexPoint,
}

/// Truncated single generating function against
/// `exp(-t t' + t u + t' v)`.
pub fn residual_genfunc_single(params: &GenParams, u: ComplexPoint, v: ComplexPoint, order: u32) -> f64 {
    let GenParams { t, t_prime, .. } = *params;
    let tm = weights(t, order);
    let tn = weights(t_prime, order);
    let mut sum = Complex64::zero();
    for m in 0..=order {
        for n in 0..=order {
            sum += tm[m as usize] * tn[n as usize] * hermite_eval(m, n, u, v);
        }
    }
    let closed = (-t * t_prime + t * u + t_prime * v).exp();
    (sum - closed).norm()
}

/// `[z^k / k!]` for `k = 0..=order`.
fn weights(z: Complex64, order: u32) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(order as usize + 1);
    let mut w = Complex64::new(1.0, 0.0);
    out.push(w);
    for k in 1..=order {
        w = w * z / k as f64;
        out.push(w);
    }
    out
}

/// Truncated double generating function
/// `Σ s^m t^n H_{m,n}(x,y) H_{m,n}(x',y') / (m! n!)` against
/// `(1-ts)^{-1} exp{[s x x' + t y y' - ts (xy + x'y')] / (1-ts)}`.
pub fn residual_genfunc_double(
    params: &GenParams,
    x: ComplexPoint,
    y: ComplexPoint,
    xp: ComplexPoint,
    yp: ComplexPoint,
    order: u32,
) -> Result<f64> {
    let GenParams { t, s, .. } = *params;
    let ts = t * s;
    if ts.norm() >= 1.0 {
        return Err(Error::Domain(format!("|t s| = {} must be < 1", ts.norm())));
    }
    let sm = weights(s, order);
    let tn = weights(t, order);
    let mut sum = Complex64::zero();
    for m in 0..=order {
        for n in 0..=order {
            let h = hermite_eval(m, n, x, y) * hermite_eval(m, n, xp, yp);
            sum += sm[m as usize] * tn[n as usize] * h;
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let closed = ((s * x * xp + t * y * yp - ts * (x * y + xp * yp)) / (one - ts)).exp() / (one - ts);
    Ok((sum - closed).norm())
}

/// Fixed-`m` slice of the double generating function:
/// `Σ_n t^n H_{m,n}(x,y) H_{m,n}(x',y') / n!` against
/// `(-t)^m e^{t y y'} H_{m,m}(i(√t y' - x/√t), i(√t y - x'/√t))`.
///
/// Only real `t > 0` is accepted; the positive root is used.
pub fn residual_genfunc_fixed_m(
    m: u32,
    t: ComplexPoint,
    x: ComplexPoint,
    y: ComplexPoint,
    xp: ComplexPoint,
    yp: ComplexPoint,
    order: u32,
) -> Result<f64> {
    if t.im != 0.0 || !(t.re > 0.0) || !t.re.is_finite() {
        return Err(Error::Domain(format!("t = {t} must be real and > 0")));
    }
    let tn = weights(t, order);
    let sum: Complex64 = (0..=order)
        .map(|n| tn[n as usize] * hermite_eval(m, n, x, y) * hermite_eval(m, n, xp, yp))
        .sum();
    let rt = t.re.sqrt();
    let i = Complex64::i();
    let arg1 = i * (yp * rt - x / rt);
    let arg2 = i * (y * rt - xp / rt);
    let closed = (-t).powu(m) * (t * y * yp).exp() * hermite_eval(m, m, arg1, arg2);
    Ok((sum - closed).norm())
}

/// `Σ_m L_m(x) s^m` against `(1-s)^{-1} exp(-x s / (1-s))`.
pub fn residual_laguerre_genfunc(s: ComplexPoint, x: ComplexPoint, order: u32) -> Result<f64> {
    if s.norm() >= 1.0 {
        return Err(Error::Domain(format!("|s| = {} must be < 1", s.norm())));
    }
    let mut sum = Complex64::zero();
    let mut sp = Complex64::new(1.0, 0.0);
    for m in 0..=order {
        sum += laguerre_eval(m, x) * sp;
        sp *= s;
    }
    let one = Complex64::new(1.0, 0.0);
    let closed = (-x * s / (one - s)).exp() / (one - s);
    Ok((sum - closed).norm())
}

/// Rewrites a polynomial in `u, v` as a combination of `H_{j,k}(u, v)`.
///
/// The returned map sends `(j, k)` to the coefficient of `H_{j,k}`. Exact:
/// each `H_{j,k}` is `u^j v^k` plus terms of strictly lower total degree, so
/// peeling off the leading monomial terminates.
pub fn tvhp_basis_expansion(poly: &BivariatePoly) -> BivariatePoly {
    let mut rest = poly.clone();
    let mut out = BivariatePoly::zero();
    while let Some((&(j, k), c)) = rest.terms().max_by_key(|(&(j, k), _)| (j + k, j)) {
        let c = c.clone();
        rest = &rest - &hermite_coeffs(j, k).scale(&c);
        out.add_term(j, k, c);
    }
    out
}
