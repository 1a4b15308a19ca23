//! Exact scalars: rationals, Bernoulli numbers, even zeta values as rational
//! multiples of powers of pi, and truncated power series over `Q[u]`.

mod series;
mod upoly;

pub use series::{lagrange_invert, series_exp, series_log, series_pow_u, sine_quotient, TruncatedSeries};
pub use upoly::UPoly;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision exact fraction, always in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `"p/q"`, or `"p"` when `q == 1`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge numerators/denominators before dividing
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Serde adapter writing a [`Rational`] as its `"p/q"` string.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Bernoulli number `B_m` with `B_1 = -1/2`.
pub fn bernoulli(m: usize) -> Rational {
    bernoulli_table(m).pop().expect("table has m + 1 entries")
}

/// `[B_0, ..., B_m]` from `sum_{k=0}^{j} C(j+1, k) B_k = 0`.
pub fn bernoulli_table(m: usize) -> Vec<Rational> {
    let mut table: Vec<Rational> = Vec::with_capacity(m + 1);
    table.push(Rational::one());
    for j in 1..=m {
        let mut acc = Rational::zero();
        for (k, b) in table.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            acc += Rational::from_integer(binomial(j as u64 + 1, k as u64)) * b;
        }
        table.push(-acc / Rational::from_integer(BigInt::from(j + 1)));
    }
    table
}

/// `coeff * pi^pi_exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiScaled {
    pub coeff: Rational,
    pub pi_exp: u32,
}

impl PiScaled {
    pub fn new(coeff: Rational, pi_exp: u32) -> Self {
        debug_assert!(pi_exp % 2 == 0, "pi exponent must be even");
        PiScaled { coeff, pi_exp }
    }

    pub fn zero(pi_exp: u32) -> Self {
        PiScaled::new(Rational::zero(), pi_exp)
    }

    pub fn checked_add(&self, other: &PiScaled) -> Result<PiScaled> {
        if self.pi_exp != other.pi_exp {
            return Err(Error::PiExponentMismatch(self.pi_exp, other.pi_exp));
        }
        Ok(PiScaled::new(&self.coeff + &other.coeff, self.pi_exp))
    }

    pub fn mul(&self, other: &PiScaled) -> PiScaled {
        PiScaled::new(&self.coeff * &other.coeff, self.pi_exp + other.pi_exp)
    }

    pub fn scale(&self, r: &Rational) -> PiScaled {
        PiScaled::new(&self.coeff * r, self.pi_exp)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.coeff) * std::f64::consts::PI.powi(self.pi_exp as i32)
    }
}

impl fmt::Display for PiScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_exp {
            0 => write!(f, "{}", self.coeff),
            m => write!(f, "{}*pi^{}", self.coeff, m),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PiScaledRepr {
    #[serde(with = "rational_string")]
    coeff: Rational,
    pi_exp: u32,
}

impl Serialize for PiScaled {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PiScaledRepr {
            coeff: self.coeff.clone(),
            pi_exp: self.pi_exp,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiScaled {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PiScaledRepr::deserialize(d)?;
        if repr.pi_exp % 2 != 0 {
            return Err(serde::de::Error::custom("pi_exp must be even"));
        }
        Ok(PiScaled::new(repr.coeff, repr.pi_exp))
    }
}

/// `zeta(2s) = (-1)^(s+1) B_{2s} (2 pi)^{2s} / (2 (2s)!)`.
pub fn zeta_even(s: u32) -> Result<PiScaled> {
    if s == 0 {
        return Err(Error::ZeroZetaArgument);
    }
    let two_s = 2 * s as usize;
    let b = bernoulli(two_s);
    let sign = if s % 2 == 1 { int(1) } else { int(-1) };
    let pow2 = Rational::from_integer(BigInt::one() << two_s);
    let denom = Rational::from_integer(factorial(two_s as u64) * 2);
    let coeff = sign * b * pow2 / denom;
    debug_assert!(coeff.is_positive());
    Ok(PiScaled::new(coeff, two_s as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: solve `sum_{k<=m} C(m+1,k) B_k = 0` by forward
    /// elimination on machine-sized fractions, without the shared table.
    fn bernoulli_oracle(m: usize) -> (i128, i128) {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        fn binom(n: i128, k: i128) -> i128 {
            let mut r = 1i128;
            for i in 0..k {
                r = r * (n - i) / (i + 1);
            }
            r
        }
        let mut bs: Vec<(i128, i128)> = vec![(1, 1)];
        for j in 1..=m as i128 {
            let (mut num, mut den) = (0i128, 1i128);
            for (k, &(bn, bd)) in bs.iter().enumerate() {
                let c = binom(j + 1, k as i128);
                num = num * bd + c * bn * den;
                den *= bd;
                let g = gcd(num, den);
                num /= g;
                den /= g;
            }
            let (mut n2, mut d2) = (-num, den * (j + 1));
            let g = gcd(n2, d2);
            n2 /= g;
            d2 /= g;
            if d2 < 0 {
                n2 = -n2;
                d2 = -d2;
            }
            bs.push((n2, d2));
        }
        bs[m]
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli(0), int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        let (n, d) = bernoulli_oracle(12);
        assert_eq!((n, d), (-691, 2730));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(7), int(0));
    }

    #[test]
    fn bernoulli_recurrence_holds() {
        let table = bernoulli_table(20);
        for m in 1..=20u64 {
            let mut acc = Rational::zero();
            for k in 0..=m {
                acc += Rational::from_integer(binomial(m + 1, k)) * &table[k as usize];
            }
            assert!(acc.is_zero(), "recurrence fails at m = {m}");
        }
    }

    #[test]
    fn zeta_even_examples() {
        assert_eq!(zeta_even(1).unwrap(), PiScaled::new(rat(1, 6), 2));
        assert_eq!(zeta_even(2).unwrap(), PiScaled::new(rat(1, 90), 4));
        assert_eq!(zeta_even(3).unwrap(), PiScaled::new(rat(1, 945), 6));
        assert_eq!(zeta_even(0), Err(Error::ZeroZetaArgument));
    }

    #[test]
    fn zeta_even_matches_partial_sums() {
        for s in 1..=4u32 {
            let exact = zeta_even(s).unwrap().to_f64();
            let partial: f64 = (1..=1_000_000u64).rev().map(|n| (n as f64).powi(-2 * s as i32)).sum();
            assert!(((exact - partial) / exact).abs() < 1e-6, "s = {s}");
        }
    }

    #[test]
    fn pi_scaled_addition_requires_equal_exponents() {
        let a = PiScaled::new(rat(1, 3), 2);
        let b = PiScaled::new(rat(1, 6), 2);
        assert_eq!(a.checked_add(&b).unwrap(), PiScaled::new(rat(1, 2), 2));
        assert!(a.checked_add(&PiScaled::zero(4)).is_err());
        assert_eq!(a.checked_add(&PiScaled::zero(2)).unwrap(), a);
    }

    #[test]
    fn serialization_formats() {
        assert_eq!(format_rational(&rat(-3, 6)), "-1/2");
        assert_eq!(format_rational(&int(5)), "5");
        assert_eq!(parse_rational("10/4").unwrap(), rat(5, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        let v = PiScaled::new(rat(1, 120), 4);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"{"coeff":"1/120","pi_exp":4}"#);
        let back: PiScaled = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
