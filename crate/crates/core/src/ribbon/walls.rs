use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::count_positive_trees;
use crate::error::{Error, Result};
use crate::exact::{format_rational, Rational};

/// Vertex perimeters `(L_1..L_k; L'_1..L'_l)` of black and white vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PerimeterPair {
    #[serde(serialize_with = "ser_rationals")]
    pub black: Vec<Rational>,
    #[serde(serialize_with = "ser_rationals")]
    pub white: Vec<Rational>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

impl PerimeterPair {
    pub fn new(black: Vec<Rational>, white: Vec<Rational>) -> Self {
        PerimeterPair { black, white }
    }

    pub fn from_ints(black: &[i64], white: &[i64]) -> Self {
        let conv = |v: &[i64]| v.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
        PerimeterPair { black: conv(black), white: conv(white) }
    }

    pub fn k(&self) -> usize {
        self.black.len()
    }

    pub fn l(&self) -> usize {
        self.white.len()
    }

    pub fn is_balanced(&self) -> bool {
        self.black.iter().sum::<Rational>() == self.white.iter().sum::<Rational>()
    }

    pub fn is_positive(&self) -> bool {
        self.black.iter().chain(&self.white).all(Signed::is_positive)
    }

    pub fn scale(&self, c: &Rational) -> PerimeterPair {
        PerimeterPair {
            black: self.black.iter().map(|x| x * c).collect(),
            white: self.white.iter().map(|x| x * c).collect(),
        }
    }

    /// Integer entries, or `None` if some entry is fractional or too large.
    pub fn to_ints(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let conv = |v: &[Rational]| -> Option<Vec<i64>> {
            v.iter()
                .map(|x| if x.is_integer() { i64::try_from(x.to_integer()).ok() } else { None })
                .collect()
        };
        Some((conv(&self.black)?, conv(&self.white)?))
    }
}

impl fmt::Display for PerimeterPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(",");
        write!(f, "({};{})", join(&self.black), join(&self.white))
    }
}

/// The linear form `sum_{i in I} L_i - sum_{j in J} L'_j`, with `I` and `J`
/// stored as bit masks over 0-based labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeForm {
    pub black: u32,
    pub white: u32,
}

impl EdgeForm {
    pub fn new(black: u32, white: u32) -> Self {
        EdgeForm { black, white }
    }

    /// Forms from 1-based label lists.
    pub fn from_labels(black: &[usize], white: &[usize]) -> Self {
        let mask = |v: &[usize]| v.iter().fold(0u32, |m, &i| m | 1 << (i - 1));
        EdgeForm { black: mask(black), white: mask(white) }
    }

    pub fn eval(&self, p: &PerimeterPair) -> Rational {
        let mut acc = Rational::zero();
        for (i, x) in p.black.iter().enumerate() {
            if self.black >> i & 1 == 1 {
                acc += x;
            }
        }
        for (j, x) in p.white.iter().enumerate() {
            if self.white >> j & 1 == 1 {
                acc -= x;
            }
        }
        acc
    }

    fn coefficients(&self, k: usize, l: usize) -> Vec<Rational> {
        let bit = |m: u32, i: usize| Rational::from_integer(BigInt::from(m >> i & 1));
        (0..k).map(|i| bit(self.black, i)).chain((0..l).map(|j| -bit(self.white, j))).collect()
    }

    /// Every form with `(I, J)` different from `(∅, ∅)` and from the full
    /// pair, in mask order.
    pub fn all(k: usize, l: usize) -> Vec<EdgeForm> {
        let (fb, fw) = ((1u32 << k) - 1, (1u32 << l) - 1);
        let mut out = Vec::new();
        for black in 0..=fb {
            for white in 0..=fw {
                if (black, white) != (0, 0) && (black, white) != (fb, fw) {
                    out.push(EdgeForm { black, white });
                }
            }
        }
        out
    }
}

impl fmt::Display for EdgeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for i in 0..32 {
            if self.black >> i & 1 == 1 {
                terms.push(format!("+L{}", i + 1));
            }
        }
        for j in 0..32 {
            if self.white >> j & 1 == 1 {
                terms.push(format!("-L'{}", j + 1));
            }
        }
        write!(f, "{}", terms.concat().trim_start_matches('+'))
    }
}

/// A linear subspace of the balanced perimeter space `H_{k,l}`, given by
/// forms required to vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub k: usize,
    pub l: usize,
    pub equations: Vec<EdgeForm>,
}

impl Wall {
    /// All of `H_{k,l}`.
    pub fn full(k: usize, l: usize) -> Self {
        Wall { k, l, equations: Vec::new() }
    }

    /// `W^{b}_{w}`: consecutive blocks of black labels of sizes `b_i` balance
    /// consecutive blocks of white labels of sizes `w_i`.
    pub fn partition(b: &[usize], w: &[usize]) -> Result<Self> {
        if b.len() != w.len() {
            return Err(Error::LengthMismatch(b.len(), w.len()));
        }
        if b.iter().chain(w).any(|&x| x == 0) {
            return Err(Error::NonPositiveEntry);
        }
        let (mut bs, mut ws) = (1, 1);
        let mut equations = Vec::new();
        for (&bi, &wi) in b.iter().zip(w) {
            let black: Vec<usize> = (bs..bs + bi).collect();
            let white: Vec<usize> = (ws..ws + wi).collect();
            equations.push(EdgeForm::from_labels(&black, &white));
            bs += bi;
            ws += wi;
        }
        Ok(Wall { k: bs - 1, l: ws - 1, equations })
    }

    /// `V_n = {L_i = L'_i}`.
    pub fn diagonal(n: usize) -> Self {
        Wall::partition(&vec![1; n], &vec![1; n]).expect("blocks of size one")
    }

    fn equation_rows(&self) -> Vec<Vec<Rational>> {
        let full = EdgeForm::new((1 << self.k) - 1, (1 << self.l) - 1);
        std::iter::once(full)
            .chain(self.equations.iter().copied())
            .map(|f| f.coefficients(self.k, self.l))
            .collect()
    }

    /// Basis of the solution space of the wall equations inside `R^{k+l}`.
    pub fn basis(&self) -> Vec<Vec<Rational>> {
        let d = self.k + self.l;
        let rows = rref(self.equation_rows(), d);
        let pivots: Vec<usize> = rows
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("rref drops zero rows"))
            .collect();
        let mut basis = Vec::new();
        for free in (0..d).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Rational::zero(); d];
            v[free] = Rational::from_integer(1.into());
            for (row, &pc) in rows.iter().zip(&pivots) {
                v[pc] = -row[free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Forms that vanish identically on the wall.
    pub fn implied_forms(&self) -> Vec<EdgeForm> {
        let basis = self.basis();
        EdgeForm::all(self.k, self.l)
            .into_iter()
            .filter(|f| {
                let c = f.coefficients(self.k, self.l);
                basis.iter().all(|v| dot(&c, v).is_zero())
            })
            .collect()
    }

    /// On the wall, positive, and off every form not implied by the wall.
    pub fn is_generic(&self, p: &PerimeterPair) -> bool {
        if p.k() != self.k || p.l() != self.l || !p.is_balanced() || !p.is_positive() {
            return false;
        }
        if self.equations.iter().any(|f| !f.eval(p).is_zero()) {
            return false;
        }
        let implied = self.implied_forms();
        EdgeForm::all(self.k, self.l)
            .iter()
            .all(|f| implied.contains(f) || !f.eval(p).is_zero())
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reduced row echelon form with zero rows removed.
fn rref(mut rows: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..cols {
                    let sub = &factor * &rows[r][j];
                    rows[i][j] -= sub;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

const SAMPLE_ATTEMPTS: usize = 1000;

/// A positive rational point in the relative interior of an open cell of
/// `wall`: every form either vanishes on the whole wall or is nonzero here.
/// Free coordinates are drawn uniformly from `1..=10^6`.
pub fn wall_sample_point(wall: &Wall, seed: u64) -> Result<PerimeterPair> {
    let basis = wall.basis();
    let d = wall.k + wall.l;
    if basis.is_empty() || (0..d).any(|c| basis.iter().all(|v| v[c].is_zero())) {
        return Err(Error::NoPositivePoint(0));
    }
    let implied = wall.implied_forms();
    let checks: Vec<Vec<Rational>> = EdgeForm::all(wall.k, wall.l)
        .into_iter()
        .filter(|f| !implied.contains(f))
        .map(|f| f.coefficients(wall.k, wall.l))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLE_ATTEMPTS {
        let mut x = vec![Rational::zero(); d];
        for v in &basis {
            let t = Rational::from_integer(BigInt::from(rng.gen_range(1..=1_000_000i64)));
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += &t * vi;
            }
        }
        if x.iter().any(|c| !c.is_positive()) || checks.iter().any(|c| dot(c, &x).is_zero()) {
            continue;
        }
        let white = x.split_off(wall.k);
        return Ok(PerimeterPair::new(x, white));
    }
    Err(Error::NoPositivePoint(SAMPLE_ATTEMPTS))
}

/// Sign of every form at `p`; two points lie in the same open cell exactly
/// when their signatures agree.
pub fn cell_signature(p: &PerimeterPair) -> Vec<i8> {
    EdgeForm::all(p.k(), p.l())
        .iter()
        .map(|f| {
            let v = f.eval(p);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .collect()
}

/// Number of positive trees at a generic point of `W^{b}_{w}`; an
/// independent route to `p^{b}_{w}`.
pub fn p0_oracle(b: &[usize], w: &[usize], seed: u64) -> Result<u64> {
    let k: usize = b.iter().sum();
    let l: usize = w.iter().sum();
    if k > 4 || l > 4 {
        return Err(Error::SizeBound(format!("positive-tree oracle needs k, l <= 4, got ({k}, {l})")));
    }
    let wall = Wall::partition(b, w)?;
    let point = wall_sample_point(&wall, seed)?;
    count_positive_trees(k, l, &point)
}

/// Positive-tree counts at `samples` generic points of `wall` (seeds
/// `seed..seed + samples`), grouped by open cell.
pub fn positive_trees_by_cell(wall: &Wall, samples: u64, seed: u64) -> Result<BTreeMap<Vec<i8>, BTreeSet<u64>>> {
    let mut cells: BTreeMap<Vec<i8>, BTreeSet<u64>> = BTreeMap::new();
    for s in seed..seed + samples {
        let p = wall_sample_point(wall, s)?;
        let count = count_positive_trees(wall.k, wall.l, &p)?;
        cells.entry(cell_signature(&p)).or_default().insert(count);
    }
    Ok(cells)
}

/// All block-size pairs `(b, w)` of equal length with `sum b <= max_k` and
/// `sum w <= max_l`.
pub fn partition_wall_cases(max_k: usize, max_l: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 0 {
            return if total == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        let mut out = Vec::new();
        for first in 1..=total.saturating_sub(parts - 1) {
            for mut rest in compositions(total - first, parts - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut out = Vec::new();
    for k in 1..=max_k {
        for l in 1..=max_l {
            for n in 1..=k.min(l) {
                for b in compositions(k, n) {
                    for w in compositions(l, n) {
                        out.push((b.clone(), w));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn forms_and_walls() {
        assert_eq!(EdgeForm::all(2, 2).len(), 14);
        let f = EdgeForm::from_labels(&[1], &[2]);
        assert_eq!(f.to_string(), "L1-L'2");
        assert_eq!(f.eval(&PerimeterPair::from_ints(&[5, 1], &[4, 2])), int(3));
        let w = Wall::partition(&[2, 1], &[1, 1]).unwrap();
        assert_eq!((w.k, w.l), (3, 2));
        assert_eq!(w.equations[0], EdgeForm::from_labels(&[1, 2], &[1]));
        assert_eq!(w.basis().len(), 3);
    }

    #[test]
    fn diagonal_point_is_generic() {
        let v2 = Wall::diagonal(2);
        assert!(v2.is_generic(&PerimeterPair::from_ints(&[5, 1], &[5, 1])));
        assert!(!v2.is_generic(&PerimeterPair::from_ints(&[3, 3], &[3, 3])));
        assert!(!v2.is_generic(&PerimeterPair::from_ints(&[5, 1], &[4, 2])));
        let p = wall_sample_point(&v2, 7).unwrap();
        assert!(v2.is_generic(&p));
    }

    #[test]
    fn sampling_is_deterministic() {
        let w = Wall::partition(&[2, 1], &[1, 2]).unwrap();
        assert_eq!(wall_sample_point(&w, 3).unwrap(), wall_sample_point(&w, 3).unwrap());
        assert!(w.is_generic(&wall_sample_point(&w, 3).unwrap()));
    }

    #[test]
    fn oracle_case_list() {
        let cases = partition_wall_cases(2, 2);
        assert_eq!(cases.len(), 5);
        assert!(cases.contains(&(vec![1, 1], vec![1, 1])));
        assert!(partition_wall_cases(4, 4).iter().all(|(b, w)| b.len() == w.len()));
    }

    #[test]
    fn trivial_full_space() {
        let p = wall_sample_point(&Wall::full(1, 1), 1).unwrap();
        assert_eq!(p.black, p.white);
        assert!(p.is_positive());
    }

    #[test]
    fn impossible_walls_fail() {
        let w = Wall { k: 2, l: 1, equations: vec![EdgeForm::from_labels(&[1], &[])] };
        assert_eq!(wall_sample_point(&w, 1), Err(Error::NoPositivePoint(0)));
        // L1 + L2 = 0 has no positive point
        let w = Wall { k: 2, l: 2, equations: vec![EdgeForm::from_labels(&[1, 2], &[])] };
        assert!(wall_sample_point(&w, 1).is_err());
    }
}
