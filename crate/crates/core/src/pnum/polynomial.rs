use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{compositions, p_value, PartitionIndex};
use crate::error::{Error, Result};
use crate::exact::{factorial, Rational};

/// Homogeneous polynomial of degree `2g` in `L_1..L_n`, stored as
/// exponent tuple -> coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousVolumePolynomial {
    genus: u32,
    n: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl HomogeneousVolumePolynomial {
    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn variables(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn coeff(&self, exponents: &[u32]) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, l: &[Rational]) -> Result<Rational> {
        if l.len() != self.n {
            return Err(Error::LengthMismatch(self.n, l.len()));
        }
        let mut acc = Rational::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in l.iter().zip(exps) {
                term *= num_traits::pow(x.clone(), e as usize);
            }
            acc += term;
        }
        Ok(acc)
    }
}

impl fmt::Display for HomogeneousVolumePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (exps, c) in &self.terms {
            let mut s = format!("{c}");
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => s.push_str(&format!("*L{}", i + 1)),
                    _ => s.push_str(&format!("*L{}^{e}", i + 1)),
                }
            }
            parts.push(s);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// `P^g_{V_n}(L; L) = 2^n sum_{s_1+..+s_n = g+n} p_{2s} prod L_i^{2s_i-2} / (2s_i)!`.
pub fn pgvn_polynomial(g: u32, n: usize) -> Result<HomogeneousVolumePolynomial> {
    if n == 0 {
        return Err(Error::InvalidRange("need at least one variable".into()));
    }
    let two_n = BigInt::one() << n;
    let mut terms = BTreeMap::new();
    for s in compositions(g + n as u32, n, 1) {
        let idx = PartitionIndex::new(s.iter().map(|x| 2 * x).collect())?;
        let denom = s.iter().fold(BigInt::one(), |acc, &x| acc * factorial(2 * u64::from(x)));
        let c = Rational::new(&two_n * p_value(&idx)?, denom);
        terms.insert(s.iter().map(|x| 2 * x - 2).collect(), c);
    }
    Ok(HomogeneousVolumePolynomial { genus: g, n, terms })
}
