//! Exact two-mode boson operator algebra.
//!
//! Operators are kept as canonical sums of ordered monomials. A
//! [`BosonMonomial`] `(p, q, r, s)` stands for `a†^p b†^q a^r b^s` in normal
//! order and for `a^r b^s a†^p b†^q` in antinormal order; the two modes
//! commute, so only the single-mode reordering
//!
//! ```text
//! a^r a†^p = Σ_k C(r,k) C(p,k) k! a†^(p-k) a^(r-k)
//! a†^p a^r = Σ_k (-1)^k C(r,k) C(p,k) k! a^(r-k) a†^(p-k)
//! ```
//!
//! is ever needed. Its coefficients are cached per `(r, p)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hermite::{hermite_coeffs, laguerre_coeffs, BivariatePoly};
use crate::scalar::{binomial, factorial, GaussianRational};

/// A single ladder operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    ADag,
    B,
    BDag,
}

impl Letter {
    pub fn is_creation(self) -> bool {
        matches!(self, Letter::ADag | Letter::BDag)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::A => "a",
            Letter::ADag => "a+",
            Letter::B => "b",
            Letter::BDag => "b+",
        })
    }
}

/// Canonical operator ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// Creation operators to the left.
    Normal,
    /// Annihilation operators to the left.
    Antinormal,
}

/// Exponents of `a†^p b†^q a^r b^s`, read in the owning polynomial's order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BosonMonomial {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub s: u32,
}

impl BosonMonomial {
    pub const IDENTITY: BosonMonomial = BosonMonomial { p: 0, q: 0, r: 0, s: 0 };

    pub fn new(p: u32, q: u32, r: u32, s: u32) -> Self {
        Self { p, q, r, s }
    }

    pub fn of(letter: Letter) -> Self {
        match letter {
            Letter::A => Self::new(0, 0, 1, 0),
            Letter::ADag => Self::new(1, 0, 0, 0),
            Letter::B => Self::new(0, 0, 0, 1),
            Letter::BDag => Self::new(0, 1, 0, 0),
        }
    }

    pub fn word_len(&self) -> u32 {
        self.p + self.q + self.r + self.s
    }

    /// Per-mode excess `(p - r, q - s)`; invariant under reordering.
    pub fn excess(&self) -> (i64, i64) {
        (self.p as i64 - self.r as i64, self.q as i64 - self.s as i64)
    }

    fn symbol_mul(&self, o: &Self) -> Self {
        Self::new(self.p + o.p, self.q + o.q, self.r + o.r, self.s + o.s)
    }
}

type CoeffCache = RwLock<HashMap<(u32, u32), Arc<[BigInt]>>>;

/// `C(r,k) C(p,k) k!` for `k = 0..=min(r,p)`.
pub fn reorder_coeffs(r: u32, p: u32) -> Arc<[BigInt]> {
    static CACHE: OnceLock<CoeffCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (r.min(p), r.max(p));
    if let Some(c) = cache.read().expect("reorder cache poisoned").get(&key) {
        return c.clone();
    }
    let built: Arc<[BigInt]> = (0..=key.0)
        .map(|k| binomial(r, k) * binomial(p, k) * factorial(k))
        .collect();
    cache
        .write()
        .expect("reorder cache poisoned")
        .entry(key)
        .or_insert(built)
        .clone()
}

/// Sum of ordered boson monomials with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorPoly {
    order: Order,
    terms: BTreeMap<BosonMonomial, GaussianRational>,
}

impl OperatorPoly {
    pub fn zero(order: Order) -> Self {
        Self {
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(order: Order) -> Self {
        Self::scalar(order, GaussianRational::one())
    }

    pub fn scalar(order: Order, c: GaussianRational) -> Self {
        Self::monomial(order, BosonMonomial::IDENTITY, c)
    }

    pub fn monomial(order: Order, m: BosonMonomial, c: GaussianRational) -> Self {
        let mut out = Self::zero(order);
        out.add_term(m, c);
        out
    }

    pub fn letter(order: Order, letter: Letter) -> Self {
        Self::monomial(order, BosonMonomial::of(letter), GaussianRational::one())
    }

    /// Sum of letters with unit coefficients, e.g. `a + b†`.
    pub fn letter_sum(order: Order, letters: &[Letter]) -> Self {
        letters
            .iter()
            .fold(Self::zero(order), |acc, &l| &acc + &Self::letter(order, l))
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BosonMonomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &BosonMonomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_default()
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

    pub fn max_word_len(&self) -> u32 {
        self.terms.keys().map(BosonMonomial::word_len).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: BosonMonomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero(self.order);
        for (m, a) in &self.terms {
            out.add_term(*m, a * c);
        }
        out
    }

    /// Same monomials, reinterpreted in another order. This is how a
    /// commuting letter polynomial is placed inside an ordering symbol.
    pub fn relabel(&self, order: Order) -> Self {
        Self {
            order,
            terms: self.terms.clone(),
        }
    }

    /// The same operator written in `target` order.
    pub fn to_order(&self, target: Order) -> Self {
        if target == self.order {
            return self.clone();
        }
        // normal -> antinormal picks up (-1)^k, the reverse does not.
        let alternate = target == Order::Antinormal;
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let ca = reorder_coeffs(m.r, m.p);
            let cb = reorder_coeffs(m.s, m.q);
            for (k, x) in ca.iter().enumerate() {
                for (l, y) in cb.iter().enumerate() {
                    let mut w = GaussianRational::from_bigint(x * y) * c;
                    if alternate && (k + l) % 2 == 1 {
                        w = -w;
                    }
                    let (k, l) = (k as u32, l as u32);
                    out.add_term(BosonMonomial::new(m.p - k, m.q - l, m.r - k, m.s - l), w);
                }
            }
        }
        out
    }

    pub fn to_normal(&self) -> Self {
        self.to_order(Order::Normal)
    }

    pub fn to_antinormal(&self) -> Self {
        self.to_order(Order::Antinormal)
    }

    /// Operator product `self · rhs`, returned in `self`'s order.
    pub fn mul_op(&self, rhs: &Self) -> Self {
        let rhs = rhs.to_order(self.order);
        let mut out = Self::zero(self.order);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let c = c1 * c2;
                mul_monomials(self.order, m1, m2, |m, w| {
                    out.add_term(m, GaussianRational::from_bigint(w) * &c)
                });
            }
        }
        out
    }

    /// Product inside the ordering symbol: letters commute, exponents add.
    pub fn symbol_mul(&self, rhs: &Self) -> Self {
        let rhs = if rhs.order == self.order {
            rhs.clone()
        } else {
            rhs.relabel(self.order)
        };
        let mut out = Self::zero(self.order);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.symbol_mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow_op(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.order), |acc, _| acc.mul_op(self))
    }

    pub fn symbol_pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.order), |acc, _| acc.symbol_mul(self))
    }

    /// `self · rhs - rhs · self`, normal ordered.
    pub fn commutator(&self, rhs: &Self) -> Self {
        let a = self.to_normal();
        &a.mul_op(rhs) - &rhs.to_normal().mul_op(&a)
    }
}

fn mul_monomials(order: Order, m1: &BosonMonomial, m2: &BosonMonomial, mut emit: impl FnMut(BosonMonomial, BigInt)) {
    // The inner pair that needs reordering, per mode.
    let (ra, pa, sb, qb) = match order {
        Order::Normal => (m1.r, m2.p, m1.s, m2.q),
        Order::Antinormal => (m2.r, m1.p, m2.s, m1.q),
    };
    let alternate = order == Order::Antinormal;
    let ca = reorder_coeffs(ra, pa);
    let cb = reorder_coeffs(sb, qb);
    let sum = m1.symbol_mul(m2);
    for (k, x) in ca.iter().enumerate() {
        for (l, y) in cb.iter().enumerate() {
            let mut w = x * y;
            if alternate && (k + l) % 2 == 1 {
                w = -w;
            }
            let (k, l) = (k as u32, l as u32);
            emit(BosonMonomial::new(sum.p - k, sum.q - l, sum.r - k, sum.s - l), w);
        }
    }
}

impl Add for &OperatorPoly {
    type Output = OperatorPoly;
    fn add(self, rhs: &OperatorPoly) -> OperatorPoly {
        let rhs = rhs.to_order(self.order);
        let mut out = self.clone();
        for (m, c) in rhs.terms {
            out.add_term(m, c);
        }
        out
    }
}

impl Sub for &OperatorPoly {
    type Output = OperatorPoly;
    fn sub(self, rhs: &OperatorPoly) -> OperatorPoly {
        self + &(-rhs)
    }
}

impl Neg for &OperatorPoly {
    type Output = OperatorPoly;
    fn neg(self) -> OperatorPoly {
        self.scale(&-GaussianRational::one())
    }
}

impl Mul for &OperatorPoly {
    type Output = OperatorPoly;
    fn mul(self, rhs: &OperatorPoly) -> OperatorPoly {
        self.mul_op(rhs)
    }
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            let factors: [(Letter, u32); 4] = match self.order {
                Order::Normal => [(Letter::ADag, m.p), (Letter::BDag, m.q), (Letter::A, m.r), (Letter::B, m.s)],
                Order::Antinormal => [(Letter::A, m.r), (Letter::B, m.s), (Letter::ADag, m.p), (Letter::BDag, m.q)],
            };
            for (l, e) in factors {
                match e {
                    0 => {}
                    1 => write!(f, " {l}")?,
                    _ => write!(f, " {l}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// A product of ladder operators with a scalar prefactor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorWord {
    pub letters: Vec<Letter>,
    pub coefficient: GaussianRational,
}

impl OperatorWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self {
            letters,
            coefficient: GaussianRational::one(),
        }
    }
}

/// Grammar: optional `(p/q+r/s i)` prefix, then letters `a`, `a+`, `b`,
/// `b+` (also `a†`, `b†`), each optionally raised with `^k`.
impl FromStr for OperatorWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars().peekable();
        let mut word = OperatorWord::new(Vec::new());
        if chars.peek() == Some(&'(') {
            chars.next();
            let inner: String = chars.by_ref().take_while(|&c| c != ')').collect();
            word.coefficient = inner.parse()?;
        }
        while let Some(c) = chars.next() {
            let letter = match c {
                c if c.is_whitespace() => continue,
                'a' | 'b' => {
                    let dag = matches!(chars.peek(), Some('+') | Some('†'));
                    if dag {
                        chars.next();
                    }
                    match (c, dag) {
                        ('a', false) => Letter::A,
                        ('a', true) => Letter::ADag,
                        ('b', false) => Letter::B,
                        _ => Letter::BDag,
                    }
                }
                other => return Err(Error::Parse(format!("unexpected '{other}' in operator word"))),
            };
            let mut power = 1u32;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                power = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("missing exponent after {letter}^")))?;
            }
            word.letters.extend(std::iter::repeat(letter).take(power as usize));
        }
        Ok(word)
    }
}

fn order_word(word: &OperatorWord, order: Order) -> OperatorPoly {
    word.letters
        .iter()
        .fold(OperatorPoly::scalar(order, word.coefficient.clone()), |acc, &l| {
            acc.mul_op(&OperatorPoly::letter(order, l))
        })
}

/// Unique normal-ordered form of a word.
pub fn normal_order(word: &OperatorWord) -> OperatorPoly {
    order_word(word, Order::Normal)
}

/// Unique antinormal-ordered form of a word.
pub fn antinormal_order(word: &OperatorWord) -> OperatorPoly {
    order_word(word, Order::Antinormal)
}

/// `Σ c_{jk} u^j v^k` as an operator product, normal ordered.
///
/// Fails unless `u` and `v` commute, since otherwise the substitution is not
/// well defined.
pub fn substitute_and_expand(poly: &BivariatePoly, u: &OperatorPoly, v: &OperatorPoly) -> Result<OperatorPoly> {
    let comm = u.commutator(v);
    if !comm.is_zero() {
        return Err(Error::NonCommutingArguments { terms: comm.len() });
    }
    let u = u.to_normal();
    let v = v.to_normal();
    Ok(substitute_with(poly, &u, &v, Order::Normal, OperatorPoly::mul_op))
}

/// `Σ c_{jk} u^j v^k` inside an ordering symbol (`:…:` or `⋮…⋮`): `u` and `v`
/// are read as commuting letter polynomials.
pub fn substitute_in_symbol(poly: &BivariatePoly, u: &OperatorPoly, v: &OperatorPoly, order: Order) -> OperatorPoly {
    substitute_with(poly, &u.relabel(order), &v.relabel(order), order, OperatorPoly::symbol_mul)
}

fn substitute_with(
    poly: &BivariatePoly,
    u: &OperatorPoly,
    v: &OperatorPoly,
    order: Order,
    mul: fn(&OperatorPoly, &OperatorPoly) -> OperatorPoly,
) -> OperatorPoly {
    let max_j = poly.terms().map(|(&(j, _), _)| j).max().unwrap_or(0);
    let max_k = poly.terms().map(|(&(_, k), _)| k).max().unwrap_or(0);
    let powers = |x: &OperatorPoly, n: u32| {
        let mut out = vec![OperatorPoly::identity(order)];
        for i in 0..n as usize {
            out.push(mul(&out[i], x));
        }
        out
    };
    let up = powers(u, max_j);
    let vp = powers(v, max_k);
    let mut out = OperatorPoly::zero(order);
    for (&(j, k), c) in poly.terms() {
        out = &out + &mul(&up[j as usize], &vp[k as usize]).scale(c);
    }
    out
}

/// Common surface of the exact checks.
pub trait ExactCheck {
    fn holds(&self) -> bool;
    /// Number of nonzero coefficients in the difference.
    fn difference_terms(&self) -> usize;
}

/// Outcome of an exact operator identity: both sides in a common order.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub lhs: OperatorPoly,
    pub rhs: OperatorPoly,
    pub difference: OperatorPoly,
}

impl IdentityCheck {
    fn new(lhs: OperatorPoly, rhs: OperatorPoly) -> Self {
        let difference = &lhs - &rhs;
        Self { lhs, rhs, difference }
    }
}

impl ExactCheck for IdentityCheck {
    fn holds(&self) -> bool {
        self.difference.is_zero()
    }
    fn difference_terms(&self) -> usize {
        self.difference.len()
    }
}

fn u_op(order: Order) -> OperatorPoly {
    OperatorPoly::letter_sum(order, &[Letter::A, Letter::BDag])
}

fn v_op(order: Order) -> OperatorPoly {
    OperatorPoly::letter_sum(order, &[Letter::ADag, Letter::B])
}

/// `H_{m,n}(a+b†, a†+b) = :(a+b†)^m (a†+b)^n:`.
pub fn check_identity_normal(m: u32, n: u32) -> IdentityCheck {
    let (u, v) = (u_op(Order::Normal), v_op(Order::Normal));
    let lhs = substitute_and_expand(&hermite_coeffs(m, n), &u, &v).expect("a+b† and a†+b commute");
    let rhs = u.symbol_pow(m).symbol_mul(&v.symbol_pow(n));
    IdentityCheck::new(lhs, rhs)
}

/// `H_{m,n}(a+b†, a†+b) = 2^{(m+n)/2} ⋮H_{m,n}((a+b†)/√2, (a†+b)/√2)⋮`.
///
/// The `√2` factors are tracked as an exponent of `√2` per TVHP term; the
/// check panics if a term is left with an odd exponent, since that would
/// mean an irrational coefficient.
pub fn check_identity_antinormal_scaled(m: u32, n: u32) -> IdentityCheck {
    let (u, v) = (u_op(Order::Normal), v_op(Order::Normal));
    let lhs = substitute_and_expand(&hermite_coeffs(m, n), &u, &v).expect("a+b† and a†+b commute");
    let mut scaled = BivariatePoly::zero();
    for (&(j, k), c) in hermite_coeffs(m, n).terms() {
        // 2^{(m+n)/2} from the prefactor, 2^{-(j+k)/2} from the arguments.
        let sqrt2_power = (m + n) as i64 - (j + k) as i64;
        assert!(sqrt2_power >= 0 && sqrt2_power % 2 == 0, "irrational factor √2^{sqrt2_power}");
        let two_pow = GaussianRational::from_bigint(BigInt::one() << (sqrt2_power / 2) as usize);
        scaled.add_term(j, k, c * &two_pow);
    }
    let rhs = substitute_in_symbol(&scaled, &u_op(Order::Antinormal), &v_op(Order::Antinormal), Order::Antinormal);
    IdentityCheck::new(lhs, rhs.to_normal())
}

/// `(a+b†)^m (a†+b)^n = i^{m+n} :H_{m,n}(-i(a+b†), -i(a†+b)):`.
pub fn check_identity_reciprocal(m: u32, n: u32) -> IdentityCheck {
    let (u, v) = (u_op(Order::Normal), v_op(Order::Normal));
    let lhs = u.pow_op(m).mul_op(&v.pow_op(n));
    let minus_i = -GaussianRational::i();
    let inner = substitute_in_symbol(&hermite_coeffs(m, n), &u.scale(&minus_i), &v.scale(&minus_i), Order::Normal);
    let rhs = inner.scale(&GaussianRational::i_pow((m + n) as i64));
    IdentityCheck::new(lhs, rhs)
}

/// `a^n a†^m = (-i)^{m+n} :H_{m,n}(i a†, i a):`.
pub fn check_identity_single_mode(m: u32, n: u32) -> IdentityCheck {
    let mut letters = vec![Letter::A; n as usize];
    letters.extend(std::iter::repeat(Letter::ADag).take(m as usize));
    let lhs = normal_order(&OperatorWord::new(letters));
    let i = GaussianRational::i();
    let u = OperatorPoly::letter(Order::Normal, Letter::ADag).scale(&i);
    let v = OperatorPoly::letter(Order::Normal, Letter::A).scale(&i);
    let rhs = substitute_in_symbol(&hermite_coeffs(m, n), &u, &v, Order::Normal)
        .scale(&GaussianRational::i_pow(-((m + n) as i64)));
    IdentityCheck::new(lhs, rhs)
}

/// `⋮H_{m,n}(a†, a)⋮ = a†^m a^n`, compared in normal order.
pub fn check_identity_antinormal_single(m: u32, n: u32) -> IdentityCheck {
    let u = OperatorPoly::letter(Order::Antinormal, Letter::ADag);
    let v = OperatorPoly::letter(Order::Antinormal, Letter::A);
    let lhs = substitute_in_symbol(&hermite_coeffs(m, n), &u, &v, Order::Antinormal).to_normal();
    let rhs = OperatorPoly::monomial(Order::Normal, BosonMonomial::new(m, 0, n, 0), GaussianRational::one());
    IdentityCheck::new(lhs, rhs)
}

/// Truncated power series in up to two formal parameters `(s, t)` with
/// operator coefficients. Only total degree `≤ max_degree` is kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalOperatorSeries {
    order: Order,
    max_degree: u32,
    coeffs: BTreeMap<(u32, u32), OperatorPoly>,
}

impl FormalOperatorSeries {
    pub fn zero(order: Order, max_degree: u32) -> Self {
        Self {
            order,
            max_degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn identity(order: Order, max_degree: u32) -> Self {
        let mut out = Self::zero(order, max_degree);
        out.add_coeff(0, 0, OperatorPoly::identity(order));
        out
    }

    /// `s^i t^j · op`.
    pub fn term(order: Order, max_degree: u32, i: u32, j: u32, op: OperatorPoly) -> Self {
        let mut out = Self::zero(order, max_degree);
        out.add_coeff(i, j, op);
        out
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn coeff(&self, i: u32, j: u32) -> OperatorPoly {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(|| OperatorPoly::zero(self.order))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&(u32, u32), &OperatorPoly)> {
        self.coeffs.iter()
    }

    /// Number of nonzero operator monomials over all orders.
    pub fn term_count(&self) -> usize {
        self.coeffs.values().map(OperatorPoly::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_coeff(&mut self, i: u32, j: u32, op: OperatorPoly) {
        if i + j > self.max_degree || op.is_zero() {
            return;
        }
        let order = self.order;
        let slot = self.coeffs.entry((i, j)).or_insert_with(|| OperatorPoly::zero(order));
        *slot = &*slot + &op;
        if slot.is_zero() {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.coeffs {
            out.add_coeff(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.coeffs {
            out.add_coeff(i, j, -c);
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero(self.order, self.max_degree);
        for (&(i, j), op) in &self.coeffs {
            out.add_coeff(i, j, op.scale(c));
        }
        out
    }

    fn product(&self, rhs: &Self, mul: fn(&OperatorPoly, &OperatorPoly) -> OperatorPoly) -> Self {
        let mut out = Self::zero(self.order, self.max_degree.min(rhs.max_degree));
        for (&(i1, j1), a) in &self.coeffs {
            for (&(i2, j2), b) in &rhs.coeffs {
                if i1 + i2 + j1 + j2 <= out.max_degree {
                    out.add_coeff(i1 + i2, j1 + j2, mul(a, b));
                }
            }
        }
        out
    }

    /// Series product with operator products between coefficients.
    pub fn mul_op(&self, rhs: &Self) -> Self {
        self.product(rhs, OperatorPoly::mul_op)
    }

    /// Series product inside an ordering symbol.
    pub fn symbol_mul(&self, rhs: &Self) -> Self {
        self.product(rhs, OperatorPoly::symbol_mul)
    }

    fn exp_with(&self, mul: fn(&Self, &Self) -> Self) -> Self {
        assert!(
            self.coeff(0, 0).is_zero(),
            "exponential of a formal series needs a zero constant term"
        );
        let mut out = Self::identity(self.order, self.max_degree);
        let mut power = Self::identity(self.order, self.max_degree);
        for k in 1..=self.max_degree {
            power = mul(&power, self).scale(&GaussianRational::from_ratio(1, k as i64));
            out = out.add(&power);
        }
        out
    }

    /// `Σ X^k / k!` with operator products.
    pub fn exp_op(&self) -> Self {
        self.exp_with(Self::mul_op)
    }

    /// `Σ X^k / k!` inside an ordering symbol.
    pub fn exp_symbol(&self) -> Self {
        self.exp_with(Self::symbol_mul)
    }

    /// `(1 - s t)^{-1}` truncated.
    pub fn geometric_st(order: Order, max_degree: u32) -> Self {
        let mut out = Self::zero(order, max_degree);
        for k in 0..=max_degree / 2 {
            out.add_coeff(k, k, OperatorPoly::identity(order));
        }
        out
    }
}

/// Outcome of an order-by-order exact series comparison.
#[derive(Clone, Debug)]
pub struct SeriesCheck {
    pub lhs: FormalOperatorSeries,
    pub rhs: FormalOperatorSeries,
    pub difference: FormalOperatorSeries,
}

impl SeriesCheck {
    fn new(lhs: FormalOperatorSeries, rhs: FormalOperatorSeries) -> Self {
        let difference = lhs.sub(&rhs);
        Self { lhs, rhs, difference }
    }
}

impl ExactCheck for SeriesCheck {
    fn holds(&self) -> bool {
        self.difference.is_zero()
    }
    fn difference_terms(&self) -> usize {
        self.difference.term_count()
    }
}

fn mono(order: Order, p: u32, q: u32, r: u32, s: u32) -> OperatorPoly {
    OperatorPoly::monomial(order, BosonMonomial::new(p, q, r, s), GaussianRational::one())
}

/// `e^{s ab} e^{t a†b†} = (1-ts)^{-1} :exp{[ts(a†a+b†b) + t a†b† + s ab]/(1-ts)}:`
/// in powers of `(s, t)` up to total degree `max_degree`.
///
/// The first-order terms fix the cross terms: `s` goes with `ab` and `t`
/// with `a†b†`. The swapped assignment fails already at degree 1; see
/// [`check_factorization_normal_swapped`].
pub fn check_factorization_normal(max_degree: u32) -> SeriesCheck {
    factorization_normal(max_degree, false)
}

/// The normal-order factorization with `s a†b† + t ab` in the exponent.
/// Kept as a negative control.
pub fn check_factorization_normal_swapped(max_degree: u32) -> SeriesCheck {
    factorization_normal(max_degree, true)
}

fn factorization_normal(max_degree: u32, swapped: bool) -> SeriesCheck {
    let o = Order::Normal;
    let k = max_degree;
    let ab = mono(o, 0, 0, 1, 1);
    let adbd = mono(o, 1, 1, 0, 0);
    let lhs = FormalOperatorSeries::term(o, k, 1, 0, ab.clone())
        .exp_op()
        .mul_op(&FormalOperatorSeries::term(o, k, 0, 1, adbd.clone()).exp_op());

    let number = &mono(o, 1, 0, 1, 0) + &mono(o, 0, 1, 0, 1);
    let geo = FormalOperatorSeries::geometric_st(o, k);
    let (with_s, with_t) = if swapped { (adbd, ab) } else { (ab, adbd) };
    let numerator = FormalOperatorSeries::term(o, k, 1, 1, number)
        .add(&FormalOperatorSeries::term(o, k, 1, 0, with_s))
        .add(&FormalOperatorSeries::term(o, k, 0, 1, with_t));
    let rhs = geo.symbol_mul(&numerator.symbol_mul(&geo).exp_symbol());
    SeriesCheck::new(lhs, rhs)
}

/// `e^{t a†b†} e^{s ab} = (1-ts)^{-1} ⋮exp{[-ts(a†a+b†b) + t a†b† + s ab]/(1-ts)}⋮`,
/// both sides in antinormal order.
pub fn check_factorization_antinormal(max_degree: u32) -> SeriesCheck {
    let o = Order::Antinormal;
    let k = max_degree;
    let ab = mono(o, 0, 0, 1, 1);
    let adbd = mono(o, 1, 1, 0, 0);
    let lhs = FormalOperatorSeries::term(o, k, 0, 1, adbd.clone())
        .exp_op()
        .mul_op(&FormalOperatorSeries::term(o, k, 1, 0, ab.clone()).exp_op());

    let number = &mono(o, 1, 0, 1, 0) + &mono(o, 0, 1, 0, 1);
    let geo = FormalOperatorSeries::geometric_st(o, k);
    let numerator = FormalOperatorSeries::term(o, k, 1, 1, -&number)
        .add(&FormalOperatorSeries::term(o, k, 0, 1, adbd))
        .add(&FormalOperatorSeries::term(o, k, 1, 0, ab));
    let rhs = geo.symbol_mul(&numerator.symbol_mul(&geo).exp_symbol());
    SeriesCheck::new(lhs, rhs)
}

/// Laurent polynomial in `τ` with operator coefficients.
type TauLaurent = BTreeMap<i64, OperatorPoly>;

fn laurent_add_term(x: &mut TauLaurent, power: i64, op: OperatorPoly) {
    if op.is_zero() {
        return;
    }
    let order = op.order();
    let slot = x.entry(power).or_insert_with(|| OperatorPoly::zero(order));
    *slot = &*slot + &op;
    if slot.is_zero() {
        x.remove(&power);
    }
}

fn laurent_symbol_mul(x: &TauLaurent, y: &TauLaurent) -> TauLaurent {
    let mut out = TauLaurent::new();
    for (&i, a) in x {
        for (&j, b) in y {
            laurent_add_term(&mut out, i + j, a.symbol_mul(b));
        }
    }
    out
}

/// `a^m b^m e^{a†b†τ} = m! τ^m e^{a†b†τ} :L_m(-a†a - b†b - ab/τ - a†b†τ):`
/// order by order in `τ` up to `max_degree`.
///
/// The Laguerre factor is a Laurent polynomial reaching down to `τ^{-m}`;
/// every negative power must vanish after the `τ^m` prefactor, otherwise
/// [`Error::NegativePowerSurvives`] is returned.
pub fn check_identity_laguerre_operator(m: u32, max_degree: u32) -> Result<SeriesCheck> {
    if max_degree < m {
        return Err(Error::Domain(format!("tau degree {max_degree} must be >= m = {m}")));
    }
    let o = Order::Normal;
    let k = max_degree;
    let adbd = mono(o, 1, 1, 0, 0);
    let squeeze = FormalOperatorSeries::term(o, k, 1, 0, adbd.clone()).exp_op();
    let lhs = FormalOperatorSeries::term(o, k, 0, 0, mono(o, 0, 0, m, m)).mul_op(&squeeze);

    let minus_one = -GaussianRational::one();
    let mut arg = TauLaurent::new();
    laurent_add_term(&mut arg, 0, (&mono(o, 1, 0, 1, 0) + &mono(o, 0, 1, 0, 1)).scale(&minus_one));
    laurent_add_term(&mut arg, -1, mono(o, 0, 0, 1, 1).scale(&minus_one));
    laurent_add_term(&mut arg, 1, adbd.scale(&minus_one));

    let mut lag = TauLaurent::new();
    let mut power: TauLaurent = [(0, OperatorPoly::identity(o))].into();
    for c in laguerre_coeffs(m) {
        for (&e, op) in &power {
            laurent_add_term(&mut lag, e, op.scale(&GaussianRational::from(c.clone())));
        }
        power = laurent_symbol_mul(&power, &arg);
    }
    // m! τ^m prefactor.
    let m_fact = GaussianRational::from_bigint(factorial(m));
    let shifted: TauLaurent = lag.into_iter().map(|(e, op)| (e + m as i64, op.scale(&m_fact))).collect();
    if let Some((&e, _)) = shifted.iter().find(|(&e, _)| e < 0) {
        return Err(Error::NegativePowerSurvives { power: e });
    }
    let mut laguerre_series = FormalOperatorSeries::zero(o, k);
    for (e, op) in shifted {
        laguerre_series.add_coeff(e as u32, 0, op);
    }
    let rhs = squeeze.mul_op(&laguerre_series);
    Ok(SeriesCheck::new(lhs, rhs))
}
