//! Exact complex scalars over the rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Double-precision point in the complex plane.
pub type ComplexPoint = Complex64;

/// Complex number with exact rational real and imaginary parts.
///
/// `BigRational` keeps both parts in lowest terms with a positive
/// denominator, so structural equality is numeric equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self {
            re: BigRational::from_integer(n),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self {
            re: BigRational::new(num.into(), den.into()),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => -Self::one(),
            _ => -Self::i(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc *= &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Huge numerators and denominators: scale both down before dividing.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
    nf / df
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigInt> for GaussianRational {
    fn from(n: BigInt) -> Self {
        Self::from_bigint(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -self.clone()
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::from(&self.re * &rhs.re);
        }
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", self.re, sign, self.im.abs())
            }
        }
    }
}

/// Parses `p`, `p/q`, `r/s i`, `p/q+r/s i`, `i`, `-i` and the same forms
/// without spaces.
impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        // Split at a sign that is not the leading one.
        let split = compact
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (first, second) = match split {
            Some(i) => (&compact[..i], Some(&compact[i..])),
            None => (compact.as_str(), None),
        };
        let mut out = GaussianRational::zero();
        for part in std::iter::once(first).chain(second) {
            if let Some(body) = part.strip_suffix('i') {
                let body = match body {
                    "" | "+" => "1",
                    "-" => "-1",
                    b => b,
                };
                out.im += &parse_rational(body)?;
            } else {
                out.re += &parse_rational(part)?;
            }
        }
        Ok(out)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.strip_prefix('+').unwrap_or(s);
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `n!` as an arbitrary-precision integer.
pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// `n!` in double precision.
pub fn factorial_f64(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let half = GaussianRational::from_ratio(1, 2);
        assert_eq!("1/2".parse::<GaussianRational>().unwrap(), half);
        assert_eq!("i".parse::<GaussianRational>().unwrap(), GaussianRational::i());
        assert_eq!("-i".parse::<GaussianRational>().unwrap(), -GaussianRational::i());
        let z: GaussianRational = "2/4 - 3/6 i".parse().unwrap();
        assert_eq!(z, GaussianRational::from_ratio(1, 2) - GaussianRational::from_ratio(1, 2) * GaussianRational::i());
        assert_eq!("-3".parse::<GaussianRational>().unwrap(), GaussianRational::from_int(-3));
        assert!("1/0".parse::<GaussianRational>().is_err());
        assert!("x".parse::<GaussianRational>().is_err());
    }

    #[test]
    fn lowest_terms_and_units() {
        let a = GaussianRational::from_ratio(6, -4);
        assert_eq!(a.re().denom(), &BigInt::from(2));
        assert_eq!(a.re().numer(), &BigInt::from(-3));
        for k in -8..8 {
            assert_eq!(GaussianRational::i_pow(k), GaussianRational::i().pow(k.rem_euclid(4) as u32));
        }
        assert_eq!(GaussianRational::i() * GaussianRational::i(), -GaussianRational::one());
    }

    #[test]
    fn display() {
        assert_eq!(GaussianRational::from_ratio(-3, 2).to_string(), "-3/2");
        let z = GaussianRational::from_int(1) - GaussianRational::i() * GaussianRational::from_ratio(1, 3);
        assert_eq!(z.to_string(), "1-1/3i");
    }

    #[test]
    fn huge_ratio_to_f64() {
        let big = GaussianRational::from_bigint(factorial(200)) * GaussianRational::from(BigRational::new(1.into(), factorial(199)));
        assert!((big.to_complex64().re - 200.0).abs() < 1e-12);
        let n = BigRational::new(factorial(300), factorial(299) * 3);
        let v = ratio_to_f64(&n);
        assert!((v - 100.0).abs() < 1e-9);
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(12), BigInt::from(479_001_600u64));
    }
}
