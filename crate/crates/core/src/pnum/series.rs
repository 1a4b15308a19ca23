use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{p_value, partitions, PartitionIndex};
use crate::error::{Error, Result};
use crate::exact::{factorial, Rational};

/// Multiset of subscripts of `t_i` variables, stored non-increasing.
/// The empty monomial is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut subscripts: Vec<u32>) -> Self {
        subscripts.sort_unstable_by(|a, b| b.cmp(a));
        Monomial(subscripts)
    }

    pub fn subscripts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&rhs.0);
        Monomial::new(v)
    }

    /// `prod mult_i!` over the distinct subscripts.
    pub fn multiplicity_factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        let mut run = 0u64;
        for (i, x) in self.0.iter().enumerate() {
            run = if i > 0 && self.0[i - 1] == *x { run + 1 } else { 1 };
            acc *= BigInt::from(run);
        }
        acc
    }
}

impl From<&PartitionIndex> for Monomial {
    fn from(idx: &PartitionIndex) -> Self {
        Monomial(idx.parts().to_vec())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let names: Vec<String> = self.0.iter().map(|i| format!("t_{i}")).collect();
        write!(f, "{}", names.join("*"))
    }
}

/// Series in `t` and `t_2, t_3, ...`, truncated both in the power of `t`
/// and in the subscript weight of the `t_i` monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedMonomialSeries {
    weight: u32,
    terms: BTreeMap<(u32, Monomial), Rational>,
}

impl WeightedMonomialSeries {
    pub fn zero(weight: u32) -> Self {
        WeightedMonomialSeries { weight, terms: BTreeMap::new() }
    }

    pub fn one(weight: u32) -> Self {
        let mut s = Self::zero(weight);
        s.add_term(0, Monomial::one(), Rational::one());
        s
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Monomial, &Rational)> {
        self.terms.iter().map(|((p, m), c)| (*p, m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, t_power: u32, m: &Monomial) -> Rational {
        self.terms.get(&(t_power, m.clone())).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms with the given power of `t`, keyed by monomial.
    pub fn t_coeff(&self, t_power: u32) -> BTreeMap<Monomial, Rational> {
        self.terms
            .iter()
            .filter(|((p, _), _)| *p == t_power)
            .map(|((_, m), c)| (m.clone(), c.clone()))
            .collect()
    }

    /// Adds `c * t^p * m`, dropping it if it exceeds the truncation.
    pub fn add_term(&mut self, t_power: u32, m: Monomial, c: Rational) {
        if c.is_zero() || t_power > self.weight || m.weight() > self.weight {
            return;
        }
        let key = (t_power, m);
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn mul(&self, rhs: &WeightedMonomialSeries) -> WeightedMonomialSeries {
        let mut out = Self::zero(self.weight.min(rhs.weight));
        for ((p1, m1), c1) in &self.terms {
            for ((p2, m2), c2) in &rhs.terms {
                if p1 + p2 > out.weight || m1.weight() + m2.weight() > out.weight {
                    continue;
                }
                out.add_term(p1 + p2, m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for WeightedMonomialSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((p, m), c)| format!("({c})*t^{p}*{m}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The generating series `T = 1 + sum_s (s-1) t^s sum (1/n!) p_{s_1..s_n} t_{s_1}...t_{s_n}`
/// up to total weight `weight`, summed over ordered tuples.
pub fn t_series(weight: u32) -> Result<WeightedMonomialSeries> {
    if weight == 0 {
        return Err(Error::InvalidRange("weight must be at least 1".into()));
    }
    let mut series = WeightedMonomialSeries::one(weight);
    for s in 2..=weight {
        for n in 1..=(s / 2) as usize {
            for parts in partitions(s, n, 2) {
                let idx = PartitionIndex::new(parts)?;
                let m = Monomial::from(&idx);
                // (1/n!) * (orderings = n!/prod mult!) = 1/prod mult!
                let c = Rational::new(p_value(&idx)? * BigInt::from(s - 1), m.multiplicity_factorial());
                series.add_term(s, m, c);
            }
        }
    }
    Ok(series)
}

/// Checks `(1/k!) [t^k] T^k = [t^k] exp(sum_{i>=2} t_i t^i)` for `k <= k_max`.
pub fn verify_multivariate_relation(k_max: u32, weight: u32) -> Result<bool> {
    if weight < k_max {
        return Err(Error::InvalidRange(format!("weight {weight} below k_max {k_max}")));
    }
    let t = t_series(weight.max(1))?;
    let mut power = WeightedMonomialSeries::one(weight.max(1));
    for k in 0..=k_max {
        if k > 0 {
            power = power.mul(&t);
        }
        let k_fact = Rational::from_integer(factorial(u64::from(k)));
        let lhs: BTreeMap<Monomial, Rational> = power
            .t_coeff(k)
            .into_iter()
            .map(|(m, c)| (m, c / &k_fact))
            .collect();
        if lhs != exp_coefficient(k) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `[t^k] exp(sum_{i>=2} t_i t^i)`: every multiset of parts >= 2 with sum `k`
/// appears with coefficient `1/prod mult!`.
fn exp_coefficient(k: u32) -> BTreeMap<Monomial, Rational> {
    let mut out = BTreeMap::new();
    if k == 0 {
        out.insert(Monomial::one(), Rational::one());
        return out;
    }
    for n in 1..=(k / 2) as usize {
        for parts in partitions(k, n, 2) {
            let m = Monomial::new(parts);
            let c = Rational::new(BigInt::one(), m.multiplicity_factorial());
            out.insert(m, c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn t_series_examples() {
        let t = t_series(6).unwrap();
        assert_eq!(t.coeff(0, &Monomial::one()), int(1));
        assert_eq!(t.coeff(2, &Monomial::new(vec![2])), int(1));
        assert_eq!(t.coeff(4, &Monomial::new(vec![2, 2])), rat(3, 2));
        // 5 * p_{4,2} = 90
        assert_eq!(t.coeff(6, &Monomial::new(vec![2, 4])), int(90));
        assert!(t.t_coeff(1).is_empty());
        assert!(t_series(0).is_err());
    }

    #[test]
    fn truncation_respects_weight() {
        let t = t_series(5).unwrap();
        let sq = t.mul(&t);
        assert!(sq.terms().all(|(p, m, _)| p <= 5 && m.weight() <= 5));
        assert!(sq.terms().all(|(p, m, _)| p == m.weight()));
    }

    #[test]
    fn multivariate_relation_small() {
        assert!(verify_multivariate_relation(0, 1).unwrap());
        assert!(verify_multivariate_relation(1, 1).unwrap());
        assert!(verify_multivariate_relation(6, 6).unwrap());
        assert!(verify_multivariate_relation(5, 4).is_err());
    }

    #[test]
    fn monomial_helpers() {
        let m = Monomial::new(vec![2, 3, 2, 2]);
        assert_eq!(m.subscripts(), &[3, 2, 2, 2]);
        assert_eq!(m.multiplicity_factorial(), BigInt::from(6));
        assert_eq!(m.to_string(), "t_3*t_2*t_2*t_2");
        assert_eq!(Monomial::one().mul(&m), m);
    }
}
