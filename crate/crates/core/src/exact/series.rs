use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{factorial, Rational, UPoly};
use crate::error::{Error, Result};

/// Power series in `t` with coefficients in `Q[u]`, known modulo
/// `t^(order + 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    order: usize,
    coeffs: Vec<UPoly>,
}

impl TruncatedSeries {
    /// Pads with zeros or drops terms so that exactly `order + 1`
    /// coefficients remain.
    pub fn new(order: usize, mut coeffs: Vec<UPoly>) -> Self {
        coeffs.resize(order + 1, UPoly::zero());
        TruncatedSeries { order, coeffs }
    }

    pub fn from_rationals(order: usize, coeffs: &[Rational]) -> Self {
        TruncatedSeries::new(order, coeffs.iter().cloned().map(UPoly::constant).collect())
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries::new(order, Vec::new())
    }

    pub fn one(order: usize) -> Self {
        TruncatedSeries::new(order, vec![UPoly::one()])
    }

    /// The series `t`.
    pub fn t(order: usize) -> Self {
        TruncatedSeries::new(order, vec![UPoly::zero(), UPoly::one()])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> &UPoly {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[UPoly] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> TruncatedSeries {
        assert!(order <= self.order, "cannot raise the truncation order");
        TruncatedSeries::new(order, self.coeffs[..=order].to_vec())
    }

    pub fn add(&self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        TruncatedSeries::new(order, (0..=order).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect())
    }

    pub fn sub(&self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        TruncatedSeries::new(order, (0..=order).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect())
    }

    pub fn mul(&self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        let mut out = vec![UPoly::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        TruncatedSeries::new(order, out)
    }

    pub fn scale(&self, c: &Rational) -> TruncatedSeries {
        TruncatedSeries::new(self.order, self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    pub fn pow(&self, mut k: usize) -> TruncatedSeries {
        let mut base = self.clone();
        let mut acc = TruncatedSeries::one(self.order);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse; the constant term must be a nonzero rational.
    pub fn recip(&self) -> Result<TruncatedSeries> {
        let c0 = self.coeffs[0]
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or(Error::ConstantTerm("reciprocal needs a nonzero rational constant term"))?;
        let inv0 = c0.recip();
        let mut out: Vec<UPoly> = Vec::with_capacity(self.order + 1);
        out.push(UPoly::constant(inv0.clone()));
        for n in 1..=self.order {
            let mut acc = UPoly::zero();
            for k in 1..=n {
                acc = &acc + &(&self.coeffs[k] * &out[n - k]);
            }
            out.push((-&acc).scale(&inv0));
        }
        Ok(TruncatedSeries::new(self.order, out))
    }

    /// `self(inner(t))`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &TruncatedSeries) -> Result<TruncatedSeries> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::ConstantTerm("composition needs an inner series without constant term"));
        }
        let order = self.order.min(inner.order);
        let mut acc = TruncatedSeries::zero(order);
        for c in self.coeffs[..=order].iter().rev() {
            acc = acc.mul(inner);
            acc.coeffs[0] = &acc.coeffs[0] + c;
        }
        Ok(acc)
    }

    /// Divide by `t`; the constant term must vanish. The order drops by one.
    pub fn div_t(&self) -> Result<TruncatedSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::ConstantTerm("division by t needs a zero constant term"));
        }
        if self.order == 0 {
            return Err(Error::SeriesPrecondition("division by t of an order-0 series"));
        }
        Ok(TruncatedSeries::new(self.order - 1, self.coeffs[1..].to_vec()))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order + 1)
    }
}

fn nat(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `exp(f)` for `f(0) = 0`, via `n g_n = sum_k k f_k g_{n-k}`.
pub fn series_exp(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !f.coeffs[0].is_zero() {
        return Err(Error::ConstantTerm("exp needs f(0) = 0"));
    }
    let mut g: Vec<UPoly> = Vec::with_capacity(f.order + 1);
    g.push(UPoly::one());
    for n in 1..=f.order {
        let mut acc = UPoly::zero();
        for k in 1..=n {
            if f.coeffs[k].is_zero() {
                continue;
            }
            acc = &acc + &(&f.coeffs[k] * &g[n - k]).scale(&nat(k));
        }
        g.push(acc.scale(&nat(n).recip()));
    }
    Ok(TruncatedSeries::new(f.order, g))
}

/// `log(f)` for `f(0) = 1`, via `n h_n = n f_n - sum_{k<n} k h_k f_{n-k}`.
pub fn series_log(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    if f.coeffs[0] != UPoly::one() {
        return Err(Error::ConstantTerm("log needs f(0) = 1"));
    }
    let mut h: Vec<UPoly> = Vec::with_capacity(f.order + 1);
    h.push(UPoly::zero());
    for n in 1..=f.order {
        let mut acc = f.coeffs[n].scale(&nat(n));
        for k in 1..n {
            if h[k].is_zero() {
                continue;
            }
            acc = &acc - &(&h[k] * &f.coeffs[n - k]).scale(&nat(k));
        }
        h.push(acc.scale(&nat(n).recip()));
    }
    Ok(TruncatedSeries::new(f.order, h))
}

/// `f^u = exp(u log f)` for a `u`-free `f` with `f(0) = 1`.
pub fn series_pow_u(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    if f.coeffs.iter().any(|c| c.degree().unwrap_or(0) > 0) {
        return Err(Error::SeriesPrecondition("f must not depend on u"));
    }
    let log = series_log(f)?;
    let scaled = TruncatedSeries::new(log.order, log.coeffs.iter().map(UPoly::shift).collect());
    series_exp(&scaled)
}

/// `(t/2) / sin(t/2)` to the given order.
pub fn sine_quotient(order: usize) -> TruncatedSeries {
    // sin(x)/x = sum (-1)^j x^{2j} / (2j+1)!, evaluated at x = t/2
    let mut sinc = vec![Rational::zero(); order + 1];
    for j in 0..=order / 2 {
        let denom = factorial(2 * j as u64 + 1) * (BigInt::one() << (2 * j));
        let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        sinc[2 * j] = Rational::new(sign, denom);
    }
    TruncatedSeries::from_rationals(order, &sinc)
        .recip()
        .expect("sinc has constant term 1")
}

/// Compositional inverse `r` of `q`, with `q(r(t)) = t` to the series order.
/// Requires `q(0) = 0` and `[t] q = 1`.
pub fn lagrange_invert(q: &TruncatedSeries) -> Result<TruncatedSeries> {
    if q.order == 0 {
        return Err(Error::SeriesPrecondition("inversion needs order >= 1"));
    }
    if !q.coeffs[0].is_zero() {
        return Err(Error::SeriesPrecondition("inversion needs q(0) = 0"));
    }
    if q.coeffs[1] != UPoly::one() {
        return Err(Error::SeriesPrecondition("inversion needs [t]q = 1"));
    }
    let t = TruncatedSeries::t(q.order);
    let mut r = t.clone();
    // each step fixes one more coefficient: r <- r - (q(r) - t)
    for _ in 1..q.order {
        let err = q.compose(&r)?.sub(&t);
        if err.coeffs.iter().all(UPoly::is_zero) {
            break;
        }
        r = r.sub(&err);
    }
    Ok(r)
}
