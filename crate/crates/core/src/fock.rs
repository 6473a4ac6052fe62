//! Truncated two-mode Fock space.
//!
//! States keep amplitudes for `0 ≤ n_a, n_b ≤ N`. Ladder operators drop
//! whatever would leave the box, so an operator of word length `w` is exact
//! only on the guarded block `n_a + n_b ≤ N - w`; all residuals here are
//! measured there.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::boson::{BosonMonomial, Letter, Order, OperatorPoly};
use crate::error::{Error, Result};
use crate::hermite::{hermite_eval_conj, laguerre_coeffs, legendre_eval};
use crate::quad::HermiteRule;
use crate::scalar::{factorial_f64, ComplexPoint};

/// Default bound on the pure-mode edge amplitude of `|ξ⟩`.
pub const ENTANGLED_TAIL_TOL: f64 = 1e-10;

/// Default bound on the squared tail `τ^{2N} N^{2m}` for squeezed states.
pub const SQUEEZED_TAIL_TOL: f64 = 1e-12;

/// Maximum photon number per mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockCutoff(u32);

impl FockCutoff {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("Fock cutoff must be >= 1".into()));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Basis dimension `(N + 1)²`.
    pub fn dim(self) -> usize {
        (self.0 as usize + 1).pow(2)
    }
}

/// Amplitudes `ψ(n_a, n_b)` on the truncated basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    cutoff: FockCutoff,
    amps: Vec<Complex64>,
}

impl TwoModeState {
    pub fn zero(cutoff: FockCutoff) -> Self {
        Self {
            cutoff,
            amps: vec![Complex64::zero(); cutoff.dim()],
        }
    }

    pub fn vacuum(cutoff: FockCutoff) -> Self {
        Self::fock(cutoff, 0, 0)
    }

    /// `|m, n⟩`.
    pub fn fock(cutoff: FockCutoff, m: u32, n: u32) -> Self {
        let mut s = Self::zero(cutoff);
        s.set(m, n, Complex64::new(1.0, 0.0));
        s
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    fn idx(&self, na: u32, nb: u32) -> usize {
        na as usize * (self.cutoff.0 as usize + 1) + nb as usize
    }

    pub fn amp(&self, na: u32, nb: u32) -> Complex64 {
        if na > self.cutoff.0 || nb > self.cutoff.0 {
            return Complex64::zero();
        }
        self.amps[self.idx(na, nb)]
    }

    pub fn set(&mut self, na: u32, nb: u32, v: Complex64) {
        let i = self.idx(na, nb);
        self.amps[i] = v;
    }

    fn indices(&self) -> impl Iterator<Item = (u32, u32)> {
        let n = self.cutoff.0;
        (0..=n).flat_map(move |a| (0..=n).map(move |b| (a, b)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(x, y)| x.conj() * y).sum()
    }

    /// Squared norm restricted to `n_a + n_b ≤ limit`.
    pub fn guarded_norm_sqr(&self, limit: u32) -> f64 {
        self.indices()
            .filter(|&(a, b)| a + b <= limit)
            .map(|(a, b)| self.amp(a, b).norm_sqr())
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            cutoff: self.cutoff,
            amps: self.amps.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            cutoff: self.cutoff,
            amps: self.amps.iter().zip(&other.amps).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// One ladder operator; components pushed past the cutoff are dropped.
    pub fn apply_letter(&self, letter: Letter) -> Self {
        let n = self.cutoff.0;
        let mut out = Self::zero(self.cutoff);
        for (a, b) in self.indices() {
            let x = self.amp(a, b);
            if x.is_zero() {
                continue;
            }
            let target = match letter {
                Letter::A if a > 0 => Some((a - 1, b, a)),
                Letter::ADag if a < n => Some((a + 1, b, a + 1)),
                Letter::B if b > 0 => Some((a, b - 1, b)),
                Letter::BDag if b < n => Some((a, b + 1, b + 1)),
                _ => None,
            };
            if let Some((ta, tb, k)) = target {
                let i = out.idx(ta, tb);
                out.amps[i] += x * (k as f64).sqrt();
            }
        }
        out
    }

    fn apply_power(&self, letter: Letter, k: u32) -> Self {
        (0..k).fold(self.clone(), |s, _| s.apply_letter(letter))
    }

    /// Applies one ordered monomial with a numeric coefficient.
    pub fn apply_monomial(&self, order: Order, m: &BosonMonomial, coeff: Complex64) -> Self {
        // Letters act right to left.
        let seq: [(Letter, u32); 4] = match order {
            Order::Normal => [(Letter::B, m.s), (Letter::A, m.r), (Letter::BDag, m.q), (Letter::ADag, m.p)],
            Order::Antinormal => [(Letter::BDag, m.q), (Letter::ADag, m.p), (Letter::B, m.s), (Letter::A, m.r)],
        };
        seq.iter()
            .fold(self.clone(), |s, &(l, k)| s.apply_power(l, k))
            .scale(coeff)
    }
}

/// Dense matrix on the truncated basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeOperator {
    cutoff: FockCutoff,
    data: Vec<Complex64>,
}

impl TwoModeOperator {
    pub fn zero(cutoff: FockCutoff) -> Self {
        let d = cutoff.dim();
        Self {
            cutoff,
            data: vec![Complex64::zero(); d * d],
        }
    }

    pub fn identity(cutoff: FockCutoff) -> Self {
        let mut out = Self::zero(cutoff);
        for i in 0..cutoff.dim() {
            out.data[i * cutoff.dim() + i] = Complex64::new(1.0, 0.0);
        }
        out
    }

    /// Matrix of a ladder operator: `√n` on the relevant off-diagonal.
    pub fn ladder(cutoff: FockCutoff, letter: Letter) -> Self {
        let mut out = Self::zero(cutoff);
        let d = cutoff.dim();
        let n = cutoff.0;
        for a in 0..=n {
            for b in 0..=n {
                let col = TwoModeState::fock(cutoff, a, b).apply_letter(letter);
                for (ta, tb) in col.indices() {
                    let v = col.amp(ta, tb);
                    if !v.is_zero() {
                        let row = (ta * (n + 1) + tb) as usize;
                        out.data[row * d + (a * (n + 1) + b) as usize] = v;
                    }
                }
            }
        }
        out
    }

    /// Matrix of an ordered polynomial.
    pub fn from_poly(cutoff: FockCutoff, op: &OperatorPoly) -> Self {
        let d = cutoff.dim();
        let mut out = Self::zero(cutoff);
        for i in 0..d {
            let n = cutoff.0 + 1;
            let basis = TwoModeState::fock(cutoff, i as u32 / n, i as u32 % n);
            let col = apply_unchecked(op, &basis);
            for (r, v) in col.amps.iter().enumerate() {
                out.data[r * d + i] = *v;
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.cutoff.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let d = self.dim();
        let mut out = Self::zero(self.cutoff);
        for i in 0..d {
            for k in 0..d {
                let x = self.data[i * d + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += x * rhs.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            cutoff: self.cutoff,
            data: self.data.iter().zip(&rhs.data).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn apply(&self, state: &TwoModeState) -> TwoModeState {
        let d = self.dim();
        let mut out = TwoModeState::zero(self.cutoff);
        for i in 0..d {
            out.amps[i] = (0..d).map(|j| self.data[i * d + j] * state.amps[j]).sum();
        }
        out
    }

    /// Largest entry magnitude over rows and columns with total photon
    /// number `≤ limit`.
    pub fn guarded_max_abs(&self, limit: u32) -> f64 {
        let n = self.cutoff.0 + 1;
        let inside = |i: usize| (i as u32 / n + i as u32 % n) <= limit;
        let d = self.dim();
        let mut best = 0.0f64;
        for i in (0..d).filter(|&i| inside(i)) {
            for j in (0..d).filter(|&j| inside(j)) {
                best = best.max(self.data[i * d + j].norm());
            }
        }
        best
    }
}

fn apply_unchecked(op: &OperatorPoly, state: &TwoModeState) -> TwoModeState {
    op.terms().fold(TwoModeState::zero(state.cutoff), |acc, (m, c)| {
        acc.add(&state.apply_monomial(op.order(), m, c.to_complex64()))
    })
}

/// Matrix action of an ordered polynomial, exact on `n_a + n_b ≤ N - w`
/// where `w` is the longest monomial.
pub fn apply_operator_poly(op: &OperatorPoly, state: &TwoModeState) -> Result<TwoModeState> {
    let w = op.max_word_len();
    let n = state.cutoff.get();
    if w > n {
        return Err(Error::CutoffViolation { word_len: w, cutoff: n });
    }
    Ok(apply_unchecked(op, state))
}

/// `|ξ⟩` truncated: `ψ(m, n) = e^{-|ξ|²/2} H_{m,n}(ξ, ξ*) / √(m! n!)`.
///
/// The edge amplitudes `ψ(N, 0)` and `ψ(0, N)` equal
/// `e^{-|ξ|²/2} |ξ|^N / √N!`; the build is refused when they exceed
/// `tail_tol`. (Along the diagonal the state does not decay at all; it is
/// delta-normalized.)
pub fn build_entangled_state(xi: ComplexPoint, cutoff: FockCutoff, tail_tol: f64) -> Result<TwoModeState> {
    if !(xi.re.is_finite() && xi.im.is_finite()) {
        return Err(Error::Domain(format!("xi = {xi} is not finite")));
    }
    let n = cutoff.get();
    let damp = (-xi.norm_sqr() / 2.0).exp();
    let bound = damp * xi.norm().powi(n as i32) / factorial_f64(n).sqrt();
    if bound > tail_tol {
        return Err(Error::TailTooLarge { bound, tolerance: tail_tol });
    }
    let mut s = TwoModeState::zero(cutoff);
    for a in 0..=n {
        for b in 0..=n {
            let norm = (factorial_f64(a) * factorial_f64(b)).sqrt();
            s.set(a, b, hermite_eval_conj(a, b, xi) * (damp / norm));
        }
    }
    Ok(s)
}

/// Absolute and relative eigen-relation residuals on the guarded block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenResidual {
    /// `‖(a + b†)|ξ⟩ - ξ|ξ⟩‖`
    pub res1: f64,
    /// `‖(a† + b)|ξ⟩ - ξ*|ξ⟩‖`
    pub res2: f64,
    /// `‖|ξ⟩‖` on the same block.
    pub norm: f64,
}

impl EigenResidual {
    pub fn relative(&self) -> (f64, f64) {
        (self.res1 / self.norm, self.res2 / self.norm)
    }
}

/// Residuals of `(a+b†)|ξ⟩ = ξ|ξ⟩` and `(a†+b)|ξ⟩ = ξ*|ξ⟩` restricted to
/// `n_a + n_b ≤ N - 2`.
pub fn eigen_residual(xi: ComplexPoint, cutoff: FockCutoff) -> Result<EigenResidual> {
    let n = cutoff.get();
    if n < 2 {
        return Err(Error::CutoffViolation { word_len: 2, cutoff: n });
    }
    let state = build_entangled_state(xi, cutoff, ENTANGLED_TAIL_TOL)?;
    let guard = n - 2;
    let u = OperatorPoly::letter_sum(Order::Normal, &[Letter::A, Letter::BDag]);
    let v = OperatorPoly::letter_sum(Order::Normal, &[Letter::ADag, Letter::B]);
    let r1 = apply_operator_poly(&u, &state)?.sub(&state.scale(xi));
    let r2 = apply_operator_poly(&v, &state)?.sub(&state.scale(xi.conj()));
    Ok(EigenResidual {
        res1: r1.guarded_norm_sqr(guard).sqrt(),
        res2: r2.guarded_norm_sqr(guard).sqrt(),
        norm: state.guarded_norm_sqr(guard).sqrt(),
    })
}

/// `⟨ξ|m, n⟩ = e^{-|ξ|²/2} H*_{m,n}(ξ, ξ*) / √(m! n!)`.
pub fn overlap_fock(xi: ComplexPoint, m: u32, n: u32) -> ComplexPoint {
    let norm = (factorial_f64(m) * factorial_f64(n)).sqrt();
    hermite_eval_conj(m, n, xi).conj() * ((-xi.norm_sqr() / 2.0).exp() / norm)
}

/// Two-mode squeezing strength, kept as both `λ` and `τ = tanh λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezeParam {
    lambda: f64,
    tau: f64,
}

impl SqueezeParam {
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda = {lambda} is not finite")));
        }
        Self::from_tau(lambda.tanh())
    }

    pub fn from_tau(tau: f64) -> Result<Self> {
        if !(tau.abs() < 1.0) {
            return Err(Error::Domain(format!("|tau| = {} must be < 1", tau.abs())));
        }
        Ok(Self { lambda: tau.atanh(), tau })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

fn check_squeezed_tail(m: u32, sq: &SqueezeParam, cutoff: FockCutoff) -> Result<()> {
    let n = cutoff.get() as f64;
    let bound = sq.tau.abs().powf(2.0 * n) * n.powf(2.0 * m as f64);
    if bound > SQUEEZED_TAIL_TOL {
        return Err(Error::TailTooLarge { bound, tolerance: SQUEEZED_TAIL_TOL });
    }
    Ok(())
}

/// `e^{a†b†τ}|00⟩ = Σ τ^n |n, n⟩`, truncated (no `sech λ` factor).
pub fn squeezed_vacuum_unnormalized(sq: &SqueezeParam, cutoff: FockCutoff) -> TwoModeState {
    let mut s = TwoModeState::zero(cutoff);
    for k in 0..=cutoff.get() {
        s.set(k, k, Complex64::new(sq.tau.powi(k as i32), 0.0));
    }
    s
}

/// `a^m b^m e^{a†b†τ}|00⟩` truncated.
pub fn photon_subtracted_state(m: u32, sq: &SqueezeParam, cutoff: FockCutoff) -> Result<TwoModeState> {
    let sub = OperatorPoly::monomial(Order::Normal, BosonMonomial::new(0, 0, m, m), 1.into());
    apply_operator_poly(&sub, &squeezed_vacuum_unnormalized(sq, cutoff))
}

/// Relative distance between `a^m b^m e^{a†b†τ}|00⟩` and
/// `m! τ^m L_m(-a†b†τ) e^{a†b†τ}|00⟩` on the guarded block
/// `n_a + n_b ≤ N - 2m`.
pub fn psv_state_residual(m: u32, sq: &SqueezeParam, cutoff: FockCutoff) -> Result<f64> {
    check_squeezed_tail(m, sq, cutoff)?;
    let vac = squeezed_vacuum_unnormalized(sq, cutoff);
    let lhs = photon_subtracted_state(m, sq, cutoff)?;

    let tau = sq.tau;
    let prefactor = factorial_f64(m) * tau.powi(m as i32);
    let mut rhs = TwoModeState::zero(cutoff);
    for (k, c) in laguerre_coeffs(m).iter().enumerate() {
        let k = k as u32;
        // c_k (-τ a†b†)^k
        let w = c.to_f64().expect("finite Laguerre coefficient") * (-tau).powi(k as i32) * prefactor;
        let pair = BosonMonomial::new(k, k, 0, 0);
        rhs = rhs.add(&vac.apply_monomial(Order::Normal, &pair, Complex64::new(w, 0.0)));
    }
    let guard = cutoff.get().saturating_sub(2 * m);
    let diff = lhs.sub(&rhs).guarded_norm_sqr(guard).sqrt();
    let scale = lhs.guarded_norm_sqr(guard).sqrt();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// Norm of the photon-subtracted state next to the published closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsvNorm {
    /// `Σ_{n=m}^{N} [n!/(n-m)!]² τ^{2n}` from the truncated state.
    pub numeric: f64,
    /// `(m!)² sinh^{2m}λ P_m(cosh 2λ)`.
    pub paper_value: f64,
    /// `numeric / paper_value`; `cosh²λ` when the closed form omits the
    /// `sech λ` normalization of the squeezed vacuum.
    pub ratio: f64,
}

pub fn psv_norm_squared(m: u32, sq: &SqueezeParam, cutoff: FockCutoff) -> Result<PsvNorm> {
    check_squeezed_tail(m, sq, cutoff)?;
    let numeric = photon_subtracted_state(m, sq, cutoff)?.norm_sqr();
    let lambda = sq.lambda;
    let paper_value = factorial_f64(m).powi(2)
        * lambda.sinh().powi(2 * m as i32)
        * legendre_eval(m, Complex64::new((2.0 * lambda).cosh(), 0.0)).re;
    Ok(PsvNorm {
        numeric,
        paper_value,
        ratio: numeric / paper_value,
    })
}

/// Gram matrix `M[(m,n),(m',n')] = ∫ d²ξ/π ⟨m,n|ξ⟩⟨ξ|m',n'⟩` over
/// `m, n, m', n' ≤ basis_max`, rows in `(m, n)` lexicographic order.
///
/// The integrand is a polynomial of degree `≤ 4 basis_max` per axis times
/// `e^{-|ξ|²}`, so `order ≥ 2 basis_max + 1` makes the rule exact.
pub fn gram_matrix(basis_max: u32, order: usize) -> Result<Vec<Vec<Complex64>>> {
    let needed = 2 * basis_max as usize + 1;
    if order < needed {
        return Err(Error::Domain(format!("quadrature order {order} is below the exactness threshold {needed}")));
    }
    let rule = HermiteRule::new(order);
    let pairs: Vec<(u32, u32)> = (0..=basis_max).flat_map(|m| (0..=basis_max).map(move |n| (m, n))).collect();
    let d = pairs.len();
    let mut gram = vec![vec![Complex64::zero(); d]; d];
    for (&x, &wx) in rule.nodes().iter().zip(rule.weights()) {
        for (&y, &wy) in rule.nodes().iter().zip(rule.weights()) {
            let xi = Complex64::new(x, y);
            let w = wx * wy / PI;
            // ⟨m,n|ξ⟩ without the Gaussian, which the rule supplies.
            let ket: Vec<Complex64> = pairs
                .iter()
                .map(|&(m, n)| hermite_eval_conj(m, n, xi) / (factorial_f64(m) * factorial_f64(n)).sqrt())
                .collect();
            for i in 0..d {
                for j in 0..d {
                    gram[i][j] += ket[i] * ket[j].conj() * w;
                }
            }
        }
    }
    Ok(gram)
}

/// `max |M - I|` for the Gram matrix above.
pub fn completeness_gram(basis_max: u32, order: usize) -> Result<f64> {
    let gram = gram_matrix(basis_max, order)?;
    let mut worst = 0.0f64;
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    Ok(worst)
}
