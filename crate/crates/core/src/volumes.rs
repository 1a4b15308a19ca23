//! Volume contributions `a_{g,n}`, the normalized volumes `Vol_n(2g-2)`,
//! and the bivariate generating function `C(t, u)` by two routes.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    bernoulli, factorial, format_rational, lagrange_invert, rational_string, series_exp, series_pow_u,
    sine_quotient, zeta_even, PiScaled, Rational, TruncatedSeries, UPoly,
};
use crate::pnum::{p_value, partitions, PartitionIndex};

fn check_range(g: u32, n: u32) -> Result<()> {
    if n < 1 || n > g {
        return Err(Error::InvalidRange(format!("need 1 <= n <= g, got g = {g}, n = {n}")));
    }
    Ok(())
}

/// Sorted multisets `s` of `n` positive parts summing to `g`, with the
/// p-number `p_{2s}` and the number of orderings of `s`.
fn weighted_partitions(g: u32, n: u32) -> Result<Vec<(Vec<u32>, BigInt, BigInt)>> {
    let mut out = Vec::new();
    for s in partitions(g, n as usize, 1) {
        let idx = PartitionIndex::new(s.iter().map(|x| 2 * x).collect())?;
        out.push((s, p_value(&idx)?, idx.orderings()));
    }
    Ok(out)
}

/// `a_{g,n} = (1/n!) sum_{s_1+..+s_n = g} p_{2s} prod (-1)^{s_i+1} B_{2s_i} / (2s_i (2s_i)!)`.
pub fn a_gn(g: u32, n: u32) -> Result<Rational> {
    check_range(g, n)?;
    let mut acc = Rational::zero();
    for (s, p, orderings) in weighted_partitions(g, n)? {
        let mut term = Rational::from_integer(p * orderings);
        for &si in &s {
            let two_s = 2 * u64::from(si);
            let sign = if si % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            let denom = BigInt::from(two_s) * factorial(two_s);
            term *= bernoulli(two_s as usize) * Rational::new(sign, denom);
        }
        acc += term;
    }
    Ok(acc / Rational::from_integer(factorial(u64::from(n))))
}

/// `Vol_n(2g-2)` via the zeta form `2/(2g-1)! (1/n!) sum p_{2s} prod zeta(2s_i)/s_i`.
fn vol_n_zeta_form(g: u32, n: u32) -> Result<PiScaled> {
    let mut acc = PiScaled::zero(2 * g);
    for (s, p, orderings) in weighted_partitions(g, n)? {
        let mut term = PiScaled::new(Rational::from_integer(p * orderings), 0);
        for &si in &s {
            term = term.mul(&zeta_even(si)?).scale(&Rational::new(BigInt::one(), BigInt::from(si)));
        }
        acc = acc.checked_add(&term)?;
    }
    let norm = Rational::new(BigInt::from(2), factorial(2 * u64::from(g) - 1) * factorial(u64::from(n)));
    Ok(acc.scale(&norm))
}

/// `Vol_n(2g-2) = 2 (2 pi)^{2g} / (2g-1)! a_{g,n}`, cross-checked against the
/// zeta form.
pub fn vol_n(g: u32, n: u32) -> Result<PiScaled> {
    let a = a_gn(g, n)?;
    let norm = Rational::new(BigInt::from(2) << (2 * g as usize), factorial(2 * u64::from(g) - 1));
    let vol = PiScaled::new(a * norm, 2 * g);
    let zeta = vol_n_zeta_form(g, n)?;
    if zeta != vol {
        return Err(Error::Consistency(format!("Vol_{n}(g = {g}): Bernoulli form {vol}, zeta form {zeta}")));
    }
    Ok(vol)
}

/// `Vol(2g-2) = sum_n Vol_n(2g-2)`.
pub fn total_volume(g: u32) -> Result<PiScaled> {
    if g == 0 {
        return Err(Error::InvalidRange("genus must be at least 1".into()));
    }
    (1..=g).try_fold(PiScaled::zero(2 * g), |acc, n| acc.checked_add(&vol_n(g, n)?))
}

/// One row of the volume table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VolumeEntry {
    pub g: u32,
    pub n: u32,
    #[serde(with = "rational_string")]
    pub a_gn: Rational,
    pub volume: PiScaled,
}

/// `a_{g,n}` and `Vol_n(2g-2)` for all `1 <= n <= g <= g_max`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VolumeTable {
    entries: BTreeMap<(u32, u32), Rational>,
}

impl VolumeTable {
    pub fn compute(g_max: u32) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for g in 1..=g_max {
            for n in 1..=g {
                let a = a_gn(g, n)?;
                if a <= Rational::zero() {
                    return Err(Error::Consistency(format!("a_{{{g},{n}}} = {a} is not positive")));
                }
                entries.insert((g, n), a);
            }
        }
        Ok(VolumeTable { entries })
    }

    pub fn get(&self, g: u32, n: u32) -> Option<&Rational> {
        self.entries.get(&(g, n))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rows(&self) -> Result<Vec<VolumeEntry>> {
        self.entries
            .iter()
            .map(|(&(g, n), a)| {
                Ok(VolumeEntry { g, n, a_gn: a.clone(), volume: vol_n(g, n)? })
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("g,n,a_gn\n");
        for ((g, n), a) in &self.entries {
            out.push_str(&format!("{g},{n},{}\n", format_rational(a)));
        }
        out
    }
}

fn check_even_order(order: usize) -> Result<()> {
    if order == 0 || order % 2 == 1 {
        return Err(Error::InvalidRange(format!("series order must be even and positive, got {order}")));
    }
    Ok(())
}

/// `C(t, u) = 1 + sum_g (2g-1) (sum_n a_{g,n} u^n) t^{2g}` from the table.
pub fn c_series(order: usize) -> Result<TruncatedSeries> {
    check_even_order(order)?;
    let mut coeffs = vec![UPoly::one()];
    for k in 1..=order {
        if k % 2 == 1 {
            coeffs.push(UPoly::zero());
            continue;
        }
        let g = (k / 2) as u32;
        let mut poly = vec![Rational::zero()];
        for n in 1..=g {
            poly.push(a_gn(g, n)? * Rational::from_integer(BigInt::from(2 * g - 1)));
        }
        coeffs.push(UPoly::new(poly));
    }
    Ok(TruncatedSeries::new(order, coeffs))
}

/// `C(t, u) = t / Q^{-1}(t, u)` with `Q = t exp(sum_k (k-1)! b_k(u) t^k)` and
/// `b_k(u) = [t^k] ((t/2)/sin(t/2))^u`.
pub fn c_series_inverse_route(order: usize) -> Result<TruncatedSeries> {
    check_even_order(order)?;
    let b = series_pow_u(&sine_quotient(order))?;
    let mut exponent = vec![UPoly::zero()];
    for k in 1..=order {
        exponent.push(b.coeff(k).scale(&Rational::from_integer(factorial(k as u64 - 1))));
    }
    let e = series_exp(&TruncatedSeries::new(order, exponent))?;
    let mut q = vec![UPoly::zero()];
    q.extend_from_slice(e.coeffs());
    let q = TruncatedSeries::new(order + 1, q);
    lagrange_invert(&q)?.div_t()?.recip()
}

/// Checks `(1/(2g)!) [t^{2g}] C^{2g} = [t^{2g}] ((t/2)/sin(t/2))^u` for `g <= g_max`.
pub fn verify_bivariate_relation(g_max: u32) -> Result<bool> {
    let order = 2 * g_max.max(1) as usize;
    let c = c_series(order)?;
    let rhs = series_pow_u(&sine_quotient(order))?;
    let mut power = TruncatedSeries::one(order);
    for k in 0..=order {
        if k > 0 {
            power = power.mul(&c);
        }
        if k % 2 == 1 || k > 2 * g_max as usize {
            continue;
        }
        let lhs = power.coeff(k).scale(&Rational::new(BigInt::one(), factorial(k as u64)));
        if &lhs != rhs.coeff(k) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `sum over h_i, L_i >= 1 with sum h_i L_i <= N of prod L_i^{s_i}`.
pub fn cylinder_partial_sum(s: &[u32], n_max: usize) -> BigUint {
    if n_max == 0 {
        return BigUint::zero();
    }
    // conv[m] = sum over sum h_i L_i = m; start from the empty product
    let mut conv = vec![BigUint::zero(); n_max + 1];
    conv[0] = BigUint::one();
    for &si in s {
        // sigma[m] = sum_{L | m} L^{s_i}
        let mut sigma = vec![BigUint::zero(); n_max + 1];
        for l in 1..=n_max {
            let w = BigUint::from(l).pow(si);
            for m in (l..=n_max).step_by(l) {
                sigma[m] += &w;
            }
        }
        let mut next = vec![BigUint::zero(); n_max + 1];
        for (a, ca) in conv.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for b in 1..=n_max - a {
                next[a + b] += ca * &sigma[b];
            }
        }
        conv = next;
    }
    conv.iter().sum()
}

/// Riemann zeta at an integer `x >= 2` in floating point: a partial sum
/// plus an Euler-Maclaurin tail, accurate well below `1e-12`.
pub fn zeta_float(x: u32) -> f64 {
    assert!(x >= 2, "zeta_float needs x >= 2");
    let m = 1000u32;
    let xf = f64::from(x);
    let partial: f64 = (1..m).rev().map(|k| f64::from(k).powf(-xf)).sum();
    let mf = f64::from(m);
    let tail = mf.powf(1.0 - xf) / (xf - 1.0) + 0.5 * mf.powf(-xf) + xf / 12.0 * mf.powf(-xf - 1.0)
        - xf * (xf + 1.0) * (xf + 2.0) / 720.0 * mf.powf(-xf - 3.0);
    partial + tail
}

/// Leading term `N^{s+n}/(s+n)! prod s_i! zeta(s_i+1)` of [`cylinder_partial_sum`],
/// where `s = sum s_i`. Each factor `sum_{hL=m} L^{s_i}` contributes
/// `s_i! zeta(s_i+1)` times the simplex volume in `n` variables.
pub fn asymptotic_prediction(s: &[u32], n_max: usize) -> f64 {
    let total: u32 = s.iter().sum::<u32>() + s.len() as u32;
    let nf = n_max as f64;
    let mut value: f64 = (1..=total).map(|j| nf / f64::from(j)).product();
    for &si in s {
        value *= factorial(u64::from(si)).to_f64().unwrap_or(f64::INFINITY) * zeta_float(si + 1);
    }
    value
}
