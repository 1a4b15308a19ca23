//! Square-tiled surfaces in the minimal strata, enumerated as pairs of
//! permutations of the squares, and the cylinder-counting identity that
//! ties them to the ribbon-graph counting functions.
//!
//! Squares are `0..N`; `right[i]` is the square to the right of `i` and
//! `up[i]` the square above it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{factorial, format_rational, Rational};
use crate::perm::{self, canonical_form, cycles, from_cycle_type, integer_partitions, Perm, Permutations};
use crate::ribbon::{counting_function, PerimeterPair};

/// Largest square count handled by the exhaustive enumeration.
pub const MAX_SQUARES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SquareTiledSurface {
    right: Perm,
    up: Perm,
}

/// A horizontal cylinder: circumference and height, in squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cylinder {
    pub circumference: usize,
    pub height: usize,
}

impl SquareTiledSurface {
    pub fn new(right: Perm, up: Perm) -> Result<Self> {
        if right.len() != up.len() {
            return Err(Error::LengthMismatch(right.len(), up.len()));
        }
        if right.is_empty() {
            return Err(Error::InvalidRange("a surface needs at least one square".into()));
        }
        Ok(SquareTiledSurface { right, up })
    }

    pub fn squares(&self) -> usize {
        self.right.len()
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn up(&self) -> &[usize] {
        &self.up
    }

    pub fn is_connected(&self) -> bool {
        perm::is_transitive(self.squares(), &[&self.right, &self.up])
    }

    /// Walk counterclockwise around the bottom-left corner of each square:
    /// `i -> up(right(up^-1(right^-1(i))))`. Cycles are the vertices; a cycle
    /// of length `m` is a cone point of angle `2 pi m`.
    pub fn vertex_permutation(&self) -> Perm {
        let (ri, ui) = (perm::inverse(&self.right), perm::inverse(&self.up));
        (0..self.squares()).map(|i| self.up[self.right[ui[ri[i]]]]).collect()
    }

    /// Genus from `V - E + F = 2 - 2g` with `E = 2N`, `F = N`.
    pub fn genus(&self) -> Option<u32> {
        let v = perm::cycle_count(&self.vertex_permutation()) as i64;
        let two_g = 2 - (v - self.squares() as i64);
        (two_g >= 0 && two_g % 2 == 0).then_some((two_g / 2) as u32)
    }

    /// Cone-point orders `len - 1` of the nontrivial vertex cycles,
    /// non-increasing; `[0]` for a torus, whose single marked point is
    /// regular.
    pub fn zero_profile(&self) -> Vec<usize> {
        let mut profile: Vec<usize> = cycles(&self.vertex_permutation())
            .iter()
            .filter(|c| c.len() > 1)
            .map(|c| c.len() - 1)
            .collect();
        profile.sort_unstable_by(|a, b| b.cmp(a));
        if profile.is_empty() {
            profile.push(0);
        }
        profile
    }

    /// Connected with a single cone point of order `2g - 2`.
    pub fn is_in_minimal_stratum(&self, g: u32) -> bool {
        g >= 1 && self.is_connected() && self.zero_profile() == [2 * g as usize - 2]
    }

    /// Horizontal cylinders. Rows are the cycles of `right`; the bottom of a
    /// row is singular when one of its corners is the cone point (for a
    /// torus, the marked corner of square 0). A cylinder is a maximal stack
    /// of rows starting at a singular bottom.
    pub fn cylinder_decomposition(&self) -> Result<Vec<Cylinder>> {
        let n = self.squares();
        let vertex = self.vertex_permutation();
        let mut singular = vec![false; n];
        let nontrivial: Vec<Vec<usize>> = cycles(&vertex).into_iter().filter(|c| c.len() > 1).collect();
        if nontrivial.is_empty() {
            singular[0] = true;
        }
        for c in &nontrivial {
            for &i in c {
                singular[i] = true;
            }
        }
        let rows = cycles(&self.right);
        let mut row_of = vec![0; n];
        for (r, row) in rows.iter().enumerate() {
            for &i in row {
                row_of[i] = r;
            }
        }
        let bottom_singular: Vec<bool> = rows.iter().map(|row| row.iter().any(|&i| singular[i])).collect();

        let mut used = vec![false; rows.len()];
        let mut cylinders = Vec::new();
        for start in (0..rows.len()).filter(|&r| bottom_singular[r]) {
            let len = rows[start].len();
            let mut height = 0;
            let mut r = start;
            loop {
                if used[r] || rows[r].len() != len {
                    return Err(Error::Consistency("rows of a cylinder disagree".into()));
                }
                used[r] = true;
                height += 1;
                r = row_of[self.up[rows[r][0]]];
                if bottom_singular[r] {
                    break;
                }
            }
            cylinders.push(Cylinder { circumference: len, height });
        }
        let area: usize = cylinders.iter().map(|c| c.circumference * c.height).sum();
        if area != n || used.iter().any(|u| !u) {
            return Err(Error::Consistency(format!("cylinders cover {area} of {n} squares")));
        }
        cylinders.sort();
        Ok(cylinders)
    }
}

impl fmt::Display for SquareTiledSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "right={:?} up={:?}", self.right, self.up)
    }
}

pub type SurfaceFamily = Arc<Vec<(SquareTiledSurface, usize)>>;

fn check_size(g: u32, n: usize) -> Result<()> {
    if g == 0 {
        return Err(Error::InvalidRange("genus must be at least 1".into()));
    }
    if n > MAX_SQUARES {
        return Err(Error::SizeBound(format!("{n} squares exceeds the limit of {MAX_SQUARES}")));
    }
    Ok(())
}

/// Admissible pairs with `right` fixed to each cycle-type representative.
fn admissible_pairs(g: u32, n: usize) -> Vec<(Vec<usize>, Perm, Perm)> {
    let mut out = Vec::new();
    for lambda in integer_partitions(n, None) {
        let right = from_cycle_type(&lambda);
        let ups: Vec<Perm> = Permutations::new(n)
            .par_bridge()
            .filter(|up| {
                let s = SquareTiledSurface { right: right.clone(), up: up.clone() };
                s.is_in_minimal_stratum(g)
            })
            .collect();
        for up in ups {
            out.push((lambda.clone(), right.clone(), up));
        }
    }
    out
}

/// Conjugacy classes of admissible pairs with exactly `n` squares, each
/// with the order of its centralizer. Sorted by canonical code; cached.
pub fn enumerate_sts(g: u32, n: usize) -> Result<SurfaceFamily> {
    check_size(g, n)?;
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize), SurfaceFamily>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("poisoned").get(&(g, n)) {
        return Ok(hit.clone());
    }
    if n == 0 {
        return Ok(Arc::new(Vec::new()));
    }
    let mut classes: BTreeMap<Vec<usize>, (SquareTiledSurface, usize)> = BTreeMap::new();
    for (_, right, up) in admissible_pairs(g, n) {
        let canon = canonical_form(&[&right, &up], &[]).expect("admissible pairs are transitive");
        classes.entry(canon.code).or_insert_with(|| {
            let s = SquareTiledSurface {
                right: perm::relabel(&right, &canon.new_of),
                up: perm::relabel(&up, &canon.new_of),
            };
            (s, canon.automorphisms)
        });
    }
    let family: SurfaceFamily = Arc::new(classes.into_values().collect());
    Ok(cache.lock().expect("poisoned").entry((g, n)).or_insert(family).clone())
}

/// Number of admissible labelled pairs `(right, up)` on `n` squares,
/// counted through the cycle-type representatives and class sizes.
pub fn labelled_pair_count(g: u32, n: usize) -> Result<BigInt> {
    check_size(g, n)?;
    let mut per_type: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for (lambda, _, _) in admissible_pairs(g, n) {
        *per_type.entry(lambda).or_default() += 1;
    }
    let mut total = BigInt::zero();
    for (lambda, count) in per_type {
        total += conjugacy_class_size(&lambda) * BigInt::from(count);
    }
    Ok(total)
}

/// `n! / z_lambda` for the cycle type `lambda`.
fn conjugacy_class_size(lambda: &[usize]) -> BigInt {
    let n: usize = lambda.iter().sum();
    let mut z = BigInt::from(1);
    let mut mult: BTreeMap<usize, u64> = BTreeMap::new();
    for &part in lambda {
        z *= BigInt::from(part);
        *mult.entry(part).or_default() += 1;
    }
    for m in mult.values() {
        z *= factorial(*m);
    }
    factorial(n as u64) / z
}

/// How classes are counted when matched against the cylinder formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountConvention {
    /// Each conjugacy class counts 1.
    Unweighted,
    /// Each class counts `1/|Aut|`.
    Weighted,
}

impl FromStr for CountConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unweighted" => Ok(CountConvention::Unweighted),
            "weighted" => Ok(CountConvention::Weighted),
            other => Err(Error::Parse(format!("unknown count convention {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CensusCount {
    pub count: u64,
    #[serde(serialize_with = "crate::exact::rational_string::serialize")]
    pub weighted: Rational,
}

impl CensusCount {
    pub fn get(&self, convention: CountConvention) -> Rational {
        match convention {
            CountConvention::Unweighted => Rational::from_integer(BigInt::from(self.count)),
            CountConvention::Weighted => self.weighted.clone(),
        }
    }
}

/// Surfaces by `(N, n)`: `N` squares and `n` cylinders.
pub type Census = BTreeMap<(usize, usize), CensusCount>;

pub fn census(g: u32, n_max: usize) -> Result<Census> {
    check_size(g, n_max)?;
    let mut out = Census::new();
    for n in 1..=n_max {
        for (surface, aut) in enumerate_sts(g, n)?.iter() {
            let cyl = surface.cylinder_decomposition()?.len();
            if cyl > g as usize {
                return Err(Error::Consistency(format!("{cyl} cylinders in genus {g}")));
            }
            let entry = out.entry((n, cyl)).or_default();
            entry.count += 1;
            entry.weighted += Rational::new(BigInt::from(1), BigInt::from(*aut));
        }
    }
    Ok(out)
}

pub fn census_csv(g: u32, census: &Census) -> String {
    let mut out = String::from("g,N,n,count,weighted_count\n");
    for ((n_sq, cyl), c) in census {
        out.push_str(&format!("{g},{n_sq},{cyl},{},{}\n", c.count, format_rational(&c.weighted)));
    }
    out
}

/// One comparison between the census and the cylinder formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderRow {
    pub squares: usize,
    pub cylinders: usize,
    #[serde(serialize_with = "crate::exact::rational_string::serialize")]
    pub census: Rational,
    #[serde(serialize_with = "crate::exact::rational_string::serialize")]
    pub formula: Rational,
}

impl CylinderRow {
    pub fn matches(&self) -> bool {
        self.census == self.formula
    }
}

/// Tuples `((h_1, L_1), ..., (h_n, L_n))` of positive integers with
/// `sum h_i L_i = total`.
fn cylinder_shapes(n: usize, total: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(n: usize, rem: usize, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if n == 0 {
            if rem == 0 {
                out.push(acc.clone());
            }
            return;
        }
        for area in 1..=rem.saturating_sub(n - 1) {
            for l in (1..=area).filter(|l| area % l == 0) {
                acc.push((area / l, l));
                rec(n - 1, rem - area, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, total, &mut Vec::new(), &mut out);
    out
}

/// `(1/n!) sum_{sum h_i L_i = N} L_1 ... L_n P^{g-n}_{n,n}(L; L)`, the
/// predicted number of `n`-cylinder surfaces with exactly `N` squares.
pub fn cylinder_formula(g: u32, cylinders: usize, squares: usize) -> Result<Rational> {
    if cylinders == 0 || cylinders > g as usize {
        return Err(Error::InvalidRange(format!("need 1 <= n <= g, got n = {cylinders}")));
    }
    let sub_genus = g - cylinders as u32;
    let mut memo: HashMap<Vec<usize>, Rational> = HashMap::new();
    let mut acc = Rational::zero();
    for shape in cylinder_shapes(cylinders, squares) {
        let ls: Vec<usize> = shape.iter().map(|&(_, l)| l).collect();
        let p = match memo.get(&ls) {
            Some(v) => v.clone(),
            None => {
                let li: Vec<i64> = ls.iter().map(|&x| x as i64).collect();
                let v = counting_function(sub_genus, cylinders, cylinders, &PerimeterPair::from_ints(&li, &li))?;
                memo.insert(ls.clone(), v.clone());
                v
            }
        };
        let prod: usize = ls.iter().product();
        acc += p * Rational::from_integer(BigInt::from(prod));
    }
    Ok(acc / Rational::from_integer(factorial(cylinders as u64)))
}

/// Census against the cylinder formula for every `n <= g` and `N <= n_max`.
/// Both per-`N` and cumulative counts agree exactly when every row matches.
pub fn verify_cylinder_formula(g: u32, n_max: usize, convention: CountConvention) -> Result<Vec<CylinderRow>> {
    let census = census(g, n_max)?;
    let mut rows = Vec::new();
    for cylinders in 1..=g as usize {
        for squares in 1..=n_max {
            let observed = census.get(&(squares, cylinders)).map(|c| c.get(convention)).unwrap_or_default();
            rows.push(CylinderRow {
                squares,
                cylinders,
                census: observed,
                formula: cylinder_formula(g, cylinders, squares)?,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface(right: &[usize], up: &[usize]) -> SquareTiledSurface {
        SquareTiledSurface::new(right.to_vec(), up.to_vec()).unwrap()
    }

    fn sigma(n: usize) -> usize {
        (1..=n).filter(|d| n % d == 0).sum()
    }

    #[test]
    fn profiles() {
        assert_eq!(surface(&[0], &[0]).zero_profile(), vec![0]);
        let s = surface(&[1, 2, 0], &[1, 0, 2]);
        assert_eq!(s.zero_profile(), vec![2]);
        assert_eq!(s.genus(), Some(2));
        assert!(s.is_in_minimal_stratum(2));
        assert!(!surface(&[1, 0, 2], &[0, 1, 2]).is_connected());
    }

    #[test]
    fn cylinders() {
        let one = |l, h| vec![Cylinder { circumference: l, height: h }];
        assert_eq!(surface(&[1, 0], &[1, 0]).cylinder_decomposition().unwrap(), one(2, 1));
        assert_eq!(surface(&[0, 1], &[1, 0]).cylinder_decomposition().unwrap(), one(1, 2));
        assert_eq!(surface(&[1, 2, 0], &[1, 0, 2]).cylinder_decomposition().unwrap(), one(3, 1));
    }

    #[test]
    fn torus_counts_are_sublattices() {
        for n in 1..=6 {
            assert_eq!(enumerate_sts(1, n).unwrap().len(), sigma(n), "N = {n}");
        }
        let c = census(1, 3).unwrap();
        assert_eq!(c.values().map(|x| x.count).sum::<u64>(), 8);
        assert!(c.keys().all(|&(_, cyl)| cyl == 1));
    }

    #[test]
    fn burnside() {
        for (g, n) in [(1, 4), (1, 5), (2, 4), (2, 5)] {
            let fact = factorial(n as u64);
            let by_classes: BigInt = enumerate_sts(g, n).unwrap().iter().map(|(_, a)| &fact / BigInt::from(*a)).sum();
            assert_eq!(by_classes, labelled_pair_count(g, n).unwrap(), "g = {g}, N = {n}");
        }
    }

    #[test]
    fn brute_force_labelled_pairs() {
        // every right permutation, not only representatives
        for (g, n) in [(1, 4), (2, 4)] {
            let mut raw = 0u64;
            for right in Permutations::new(n) {
                for up in Permutations::new(n) {
                    let s = SquareTiledSurface { right: right.clone(), up };
                    raw += u64::from(s.is_in_minimal_stratum(g));
                }
            }
            assert_eq!(BigInt::from(raw), labelled_pair_count(g, n).unwrap());
        }
    }

    #[test]
    fn decompositions_are_consistent() {
        for n in 3..=6 {
            for (s, _) in enumerate_sts(2, n).unwrap().iter() {
                assert_eq!(s.genus(), Some(2));
                let cyl = s.cylinder_decomposition().unwrap();
                assert!((1..=2).contains(&cyl.len()));
            }
        }
    }

    #[test]
    fn shapes() {
        assert_eq!(cylinder_shapes(1, 4).len(), 3);
        assert_eq!(cylinder_shapes(2, 2), vec![vec![(1, 1), (1, 1)]]);
        assert!(cylinder_shapes(2, 1).is_empty());
    }

    #[test]
    fn torus_formula() {
        for n in 1..=6 {
            assert_eq!(cylinder_formula(1, 1, n).unwrap(), Rational::from_integer(BigInt::from(sigma(n))));
        }
    }

    #[test]
    fn convention_parsing() {
        assert_eq!("weighted".parse::<CountConvention>().unwrap(), CountConvention::Weighted);
        assert!("both".parse::<CountConvention>().is_err());
        assert!(enumerate_sts(1, 9).is_err());
    }
}
