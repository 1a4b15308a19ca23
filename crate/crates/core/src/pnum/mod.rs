//! The p-numbers `p_{s_1,...,s_n}`, their generating series and the
//! top-degree polynomials of the counting functions on the diagonal wall.
//!
//! `p_s` counts positive bipartite plane trees at a generic point of a
//! partition wall. Here it is computed from the tree-degeneration recursion
//!
//! ```text
//! (s-2)! = p_{s_1..s_n} + sum_{t=2}^{n} (s-2)_{t-2} / t!
//!          * sum_{labelled partitions I_1..I_t} prod_j (sum_{I_j} s_i - 1) p_{s_{I_j}}
//! ```
//!
//! in exact rationals; integrality of the result is checked, not assumed.

mod polynomial;
mod series;

pub use polynomial::{pgvn_polynomial, HomogeneousVolumePolynomial};
pub use series::{t_series, verify_multivariate_relation, Monomial, WeightedMonomialSeries};

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, Rational};

/// Non-increasing tuple of parts, each at least 2. Sorting on construction
/// makes the p-numbers symmetric in their indices by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PartitionIndex(Vec<u32>);

impl PartitionIndex {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyPartition);
        }
        if let Some(&bad) = parts.iter().find(|&&p| p < 2) {
            return Err(Error::PartTooSmall(bad));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(PartitionIndex(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of distinct orderings of the parts: `n! / prod(mult!)`.
    pub fn orderings(&self) -> BigInt {
        let mut denom = BigInt::one();
        let mut run = 1u64;
        for w in self.0.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                denom *= factorial(run);
                run = 1;
            }
        }
        denom *= factorial(run);
        factorial(self.0.len() as u64) / denom
    }
}

impl fmt::Display for PartitionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "p_{{{}}}", parts.join(","))
    }
}

/// One record of the p-number dump / memo cache.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PNumberRecord {
    pub parts: Vec<u32>,
    pub value: String,
}

/// Insert-only memo of p-numbers. Concurrent duplicate computation is
/// harmless: every writer inserts the same value.
#[derive(Debug, Default)]
pub struct PNumberTable {
    entries: RwLock<HashMap<PartitionIndex, BigInt>>,
}

impl PNumberTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide table used by the free functions of this module.
    pub fn global() -> &'static PNumberTable {
        static TABLE: OnceLock<PNumberTable> = OnceLock::new();
        TABLE.get_or_init(PNumberTable::new)
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cached(&self, idx: &PartitionIndex) -> Option<BigInt> {
        self.entries.read().expect("poisoned").get(idx).cloned()
    }

    pub fn get(&self, idx: &PartitionIndex) -> Result<BigInt> {
        if let Some(v) = self.cached(idx) {
            return Ok(v);
        }
        let value = self.recursion_value(idx.parts())?;
        if !value.is_integer() || !value.is_positive() {
            return Err(Error::Consistency(format!("{idx} = {value} is not a positive integer")));
        }
        let value = value.to_integer();
        self.entries
            .write()
            .expect("poisoned")
            .entry(idx.clone())
            .or_insert_with(|| value.clone());
        Ok(value)
    }

    /// Right-hand side of the recursion solved for `p`, evaluated on the
    /// parts in the order given. Sub-blocks are looked up (and memoized)
    /// through the table.
    pub fn recursion_value(&self, parts: &[u32]) -> Result<Rational> {
        if parts.is_empty() {
            return Err(Error::EmptyPartition);
        }
        if let Some(&bad) = parts.iter().find(|&&p| p < 2) {
            return Err(Error::PartTooSmall(bad));
        }
        let n = parts.len();
        let s: u64 = parts.iter().map(|&p| u64::from(p)).sum();
        let lhs = Rational::from_integer(factorial(s - 2));
        if n == 1 {
            return Ok(lhs);
        }

        // per_blocks[t] = sum over unordered set partitions into t blocks
        let mut per_blocks = vec![BigInt::zero(); n + 1];
        let mut failure = None;
        for_each_set_partition(n, |blocks| {
            if blocks.len() < 2 || failure.is_some() {
                return;
            }
            let mut prod = BigInt::one();
            for block in blocks {
                let sub: Vec<u32> = block.iter().map(|&i| parts[i]).collect();
                let weight: u32 = sub.iter().sum();
                let idx = PartitionIndex::new(sub).expect("parts validated above");
                match self.get(&idx) {
                    Ok(p) => prod *= p * BigInt::from(weight - 1),
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                }
            }
            per_blocks[blocks.len()] += prod;
        });
        if let Some(e) = failure {
            return Err(e);
        }

        let mut correction = Rational::zero();
        for (t, sum) in per_blocks.iter().enumerate().skip(2) {
            // labelled partitions = t! * unordered ones, weighted by 1/t!
            let labelled = sum * factorial(t as u64);
            let coeff = Rational::new(falling_factorial(s - 2, t as u64 - 2), factorial(t as u64));
            correction += coeff * Rational::from_integer(labelled);
        }
        Ok(lhs - correction)
    }

    /// Sorted dump in the `{"parts": [...], "value": "..."}` format.
    pub fn records(&self) -> Vec<PNumberRecord> {
        let guard = self.entries.read().expect("poisoned");
        let mut keys: Vec<&PartitionIndex> = guard.keys().collect();
        keys.sort_by(|a, b| a.weight().cmp(&b.weight()).then_with(|| b.cmp(a)));
        keys.into_iter()
            .map(|k| PNumberRecord {
                parts: k.parts().to_vec(),
                value: guard[k].to_string(),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records()).expect("records serialize")
    }

    /// Load records into the table without re-deriving them.
    pub fn insert_records(&self, records: &[PNumberRecord]) -> Result<()> {
        let mut parsed = Vec::with_capacity(records.len());
        for r in records {
            let idx = PartitionIndex::new(r.parts.clone())?;
            let value: BigInt = r
                .value
                .parse()
                .map_err(|_| Error::Cache(format!("bad value {:?} for {idx}", r.value)))?;
            if !value.is_positive() {
                return Err(Error::Cache(format!("non-positive value for {idx}")));
            }
            parsed.push((idx, value));
        }
        let mut guard = self.entries.write().expect("poisoned");
        for (idx, value) in parsed {
            guard.entry(idx).or_insert(value);
        }
        Ok(())
    }

    /// Read a memo cache file. One entry, chosen with `rng`, is re-derived
    /// from scratch in a private table; a mismatch rejects the whole file.
    pub fn load_cache<R: Rng>(&self, path: &Path, rng: &mut R) -> Result<usize> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        };
        let records: Vec<PNumberRecord> =
            serde_json::from_str(&text).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        if let Some(probe) = records.get(rng.gen_range(0..records.len().max(1))) {
            let idx = PartitionIndex::new(probe.parts.clone())?;
            let fresh = PNumberTable::new().get(&idx)?;
            if fresh.to_string() != probe.value {
                return Err(Error::Cache(format!(
                    "corrupt entry {idx}: cached {} but recursion gives {fresh}",
                    probe.value
                )));
            }
        }
        self.insert_records(&records)?;
        Ok(records.len())
    }

    pub fn save_cache(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }
}

/// `x (x-1) ... (x-k+1)`, with `(x)_0 = 1`.
pub fn falling_factorial(x: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(x as i64 - i as i64))
}

/// Calls `f` once per unordered set partition of `0..n`, generated as
/// restricted-growth strings.
pub fn for_each_set_partition<F: FnMut(&[Vec<usize>])>(n: usize, mut f: F) {
    fn rec<F: FnMut(&[Vec<usize>])>(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, f: &mut F) {
        if i == n {
            f(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, blocks, f);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, f);
        blocks.pop();
    }
    if n == 0 {
        f(&[]);
        return;
    }
    rec(0, n, &mut Vec::new(), &mut f);
}

/// `p_{s_1,...,s_n}` from the shared table.
pub fn p_value(idx: &PartitionIndex) -> Result<BigInt> {
    PNumberTable::global().get(idx)
}

/// `p^{b_1..b_n}_{w_1..w_n}`, which depends only on the sums `b_i + w_i`.
pub fn p_bw_value(b: &[u32], w: &[u32]) -> Result<BigInt> {
    if b.len() != w.len() {
        return Err(Error::LengthMismatch(b.len(), w.len()));
    }
    if b.iter().chain(w).any(|&x| x == 0) {
        return Err(Error::NonPositiveEntry);
    }
    p_value(&PartitionIndex::new(b.iter().zip(w).map(|(x, y)| x + y).collect())?)
}

/// Compositions of `total` into `parts` ordered parts, each `>= min`.
pub fn compositions(total: u32, parts: usize, min: u32) -> Vec<Vec<u32>> {
    fn rec(rem: u32, left: usize, min: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            if rem == 0 {
                out.push(acc.clone());
            }
            return;
        }
        let reserve = min * (left as u32 - 1);
        if rem < reserve + min {
            return;
        }
        for first in min..=rem - reserve {
            acc.push(first);
            rec(rem - first, left - 1, min, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, min, &mut Vec::new(), &mut out);
    out
}

/// Non-increasing partitions of `total` into `parts` parts, each `>= min`.
pub fn partitions(total: u32, parts: usize, min: u32) -> Vec<Vec<u32>> {
    compositions(total, parts, min)
        .into_iter()
        .filter(|c| c.windows(2).all(|w| w[0] >= w[1]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn idx(parts: &[u32]) -> PartitionIndex {
        PartitionIndex::new(parts.to_vec()).unwrap()
    }

    fn p(parts: &[u32]) -> i64 {
        i64::try_from(p_value(&idx(parts)).unwrap()).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(p(&[2]), 1);
        assert_eq!(p(&[2, 2]), 1);
        assert_eq!(p(&[4, 2]), 18);
        assert_eq!(p(&[4, 2, 2]), 486);
        assert_eq!(p(&[2, 2, 2, 2]), 335);
        assert_eq!(p(&[3, 2]), 4);
    }

    #[test]
    fn single_part_is_factorial() {
        for s in 2..=12u32 {
            assert_eq!(p_value(&idx(&[s])).unwrap(), factorial(u64::from(s) - 2));
        }
    }

    #[test]
    fn rejects_small_parts() {
        assert_eq!(PartitionIndex::new(vec![3, 1]), Err(Error::PartTooSmall(1)));
        assert_eq!(PartitionIndex::new(vec![]), Err(Error::EmptyPartition));
        assert!(PNumberTable::new().recursion_value(&[2, 0]).is_err());
    }

    #[test]
    fn bw_values() {
        assert_eq!(p_bw_value(&[1, 1], &[1, 1]).unwrap(), BigInt::from(1));
        assert_eq!(p_bw_value(&[2], &[2]).unwrap(), BigInt::from(2));
        assert_eq!(p_bw_value(&[1], &[2]).unwrap(), BigInt::from(1));
        assert_eq!(p_bw_value(&[1], &[1, 1]), Err(Error::LengthMismatch(1, 2)));
        assert_eq!(p_bw_value(&[0], &[2]), Err(Error::NonPositiveEntry));
    }

    #[test]
    fn recursion_is_symmetric_on_unsorted_inputs() {
        let table = PNumberTable::new();
        for parts in [vec![2, 3, 4], vec![5, 2, 2, 3], vec![2, 6, 3]] {
            let sorted = idx(&parts);
            let direct = Rational::from_integer(table.get(&sorted).unwrap());
            let mut perm = parts.clone();
            for _ in 0..parts.len() {
                perm.rotate_left(1);
                assert_eq!(table.recursion_value(&perm).unwrap(), direct, "{perm:?}");
            }
            perm.reverse();
            assert_eq!(table.recursion_value(&perm).unwrap(), direct);
        }
    }

    #[test]
    fn all_values_are_positive_integers() {
        let table = PNumberTable::new();
        for w in 2..=14u32 {
            for n in 1..=(w / 2) as usize {
                for parts in partitions(w, n, 2) {
                    let v = table.recursion_value(&parts).unwrap();
                    assert!(v.is_integer() && v > int(0), "{parts:?} -> {v}");
                }
            }
        }
    }

    #[test]
    fn set_partitions_are_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (n, &b) in bell.iter().enumerate() {
            let mut count = 0;
            for_each_set_partition(n, |_| count += 1);
            assert_eq!(count, b, "n = {n}");
        }
    }

    #[test]
    fn composition_helpers() {
        assert_eq!(compositions(4, 2, 1), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(partitions(6, 2, 2), vec![vec![3, 3], vec![4, 2]]);
        assert!(compositions(1, 2, 1).is_empty());
        assert_eq!(idx(&[2, 4, 2]).orderings(), BigInt::from(3));
    }

    #[test]
    fn cache_roundtrip_and_corruption() {
        let dir = std::env::temp_dir().join(format!("stratavol-pnum-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.json");
        let table = PNumberTable::new();
        table.get(&idx(&[4, 2, 2])).unwrap();
        table.save_cache(&path).unwrap();

        let mut rng = rand::rngs::mock::StepRng::new(0, 1);
        let fresh = PNumberTable::new();
        let n = fresh.load_cache(&path, &mut rng).unwrap();
        assert_eq!(n, table.len());
        assert_eq!(fresh.records(), table.records());

        let mut records = table.records();
        for r in &mut records {
            r.value = "7".into();
        }
        std::fs::write(&path, serde_json::to_string(&records).unwrap()).unwrap();
        assert!(matches!(PNumberTable::new().load_cache(&path, &mut rng), Err(Error::Cache(_))));

        assert_eq!(PNumberTable::new().load_cache(&dir.join("missing.json"), &mut rng).unwrap(), 0);
        std::fs::remove_dir_all(&dir).ok();
    }
}
