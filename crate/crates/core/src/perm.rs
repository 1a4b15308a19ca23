//! Small permutation toolkit on `0..n`, shared by the ribbon-graph and
//! square-tiled-surface enumerators.
//!
//! A permutation is a `Vec<usize>` mapping `i -> p[i]`. Composition
//! `compose(p, q)` means "apply `q`, then `p`".

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// `x -> p[q[x]]`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&x| p[x]).collect()
}

pub fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cyc.push(x);
            x = p[x];
        }
        out.push(cyc);
    }
    out
}

pub fn cycle_count(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut count = 0;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
        }
    }
    count
}

/// Cycle lengths, sorted non-increasing.
pub fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut t: Vec<usize> = cycles(p).iter().map(Vec::len).collect();
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

/// Whether the group generated by `gens` acts transitively on `0..n`.
pub fn is_transitive(n: usize, gens: &[&[usize]]) -> bool {
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g[x];
            if !seen[y] {
                seen[y] = true;
                reached += 1;
                stack.push(y);
            }
        }
    }
    reached == n
}

/// Integer partitions of `n` into exactly `parts` parts (or any number of
/// parts when `parts` is `None`), each non-increasing.
pub fn integer_partitions(n: usize, parts: Option<usize>) -> Vec<Vec<usize>> {
    fn rec(rem: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(acc.clone());
            return;
        }
        for part in (1..=max.min(rem)).rev() {
            acc.push(part);
            rec(rem - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    if let Some(k) = parts {
        out.retain(|p| p.len() == k);
    }
    out
}

/// The permutation `(0 1 .. a-1)(a .. a+b-1)...` with the given cycle lengths.
pub fn from_cycle_type(lengths: &[usize]) -> Perm {
    let n: usize = lengths.iter().sum();
    let mut p = vec![0; n];
    let mut start = 0;
    for &len in lengths {
        for i in 0..len {
            p[start + i] = start + (i + 1) % len;
        }
        start += len;
    }
    p
}

/// Every permutation of `0..n` in lexicographic order.
pub struct Permutations {
    current: Option<Perm>,
}

impl Permutations {
    pub fn new(n: usize) -> Self {
        Permutations {
            current: Some(identity(n)),
        }
    }
}

impl Iterator for Permutations {
    type Item = Perm;

    fn next(&mut self) -> Option<Perm> {
        let cur = self.current.take()?;
        let mut next = cur.clone();
        let n = next.len();
        if n > 1 {
            let mut i = n - 1;
            while i > 0 && next[i - 1] >= next[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while next[j] <= next[i - 1] {
                    j -= 1;
                }
                next.swap(i - 1, j);
                next[i..].reverse();
                self.current = Some(next);
            }
        }
        Some(cur)
    }
}

/// Numbering of the points in order of first discovery by a breadth-first
/// traversal from `root`, expanding each point through `perms` in order.
/// Returns `new_of[old]`, or `None` when the traversal misses a point.
pub fn rooted_numbering(perms: &[&[usize]], root: usize) -> Option<Vec<usize>> {
    let n = perms[0].len();
    let mut new_of = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    new_of[root] = 0;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for p in perms {
            let y = p[x];
            if new_of[y] == usize::MAX {
                new_of[y] = order.len();
                order.push(y);
            }
        }
    }
    (order.len() == n).then_some(new_of)
}

/// Code of `(perms, labels)` after renumbering with [`rooted_numbering`]:
/// for each point in new order, the new images under every permutation
/// followed by its labels.
pub fn rooted_code(perms: &[&[usize]], labels: &[&[usize]], root: usize) -> Option<Vec<usize>> {
    let new_of = rooted_numbering(perms, root)?;
    let mut order = vec![0; new_of.len()];
    for (old, &new) in new_of.iter().enumerate() {
        order[new] = old;
    }
    let mut code = Vec::with_capacity(new_of.len() * (perms.len() + labels.len()));
    for &x in &order {
        code.extend(perms.iter().map(|p| new_of[p[x]]));
        code.extend(labels.iter().map(|l| l[x]));
    }
    Some(code)
}

/// Canonical form of a transitive labelled permutation tuple under
/// simultaneous conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    /// Smallest rooted code over all roots; equal iff isomorphic.
    pub code: Vec<usize>,
    /// Renumbering `new_of[old]` that produces `code`.
    pub new_of: Vec<usize>,
    /// Number of roots attaining `code`, which is the order of the
    /// centralizer (automorphism group) since it acts freely.
    pub automorphisms: usize,
}

/// Minimum of [`rooted_code`] over all roots. `None` if not transitive.
pub fn canonical_form(perms: &[&[usize]], labels: &[&[usize]]) -> Option<Canonical> {
    let n = perms[0].len();
    let mut best: Option<(Vec<usize>, usize)> = None;
    let mut count = 0;
    for root in 0..n {
        let code = rooted_code(perms, labels, root)?;
        match &best {
            Some((b, _)) if code > *b => {}
            Some((b, _)) if code == *b => count += 1,
            _ => {
                best = Some((code, root));
                count = 1;
            }
        }
    }
    let (code, root) = best?;
    let new_of = rooted_numbering(perms, root)?;
    Some(Canonical { code, new_of, automorphisms: count })
}

/// Conjugate `p` by the renumbering `new_of`: the result maps
/// `new_of[x]` to `new_of[p[x]]`.
pub fn relabel(p: &[usize], new_of: &[usize]) -> Perm {
    let mut out = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        out[new_of[x]] = new_of[y];
    }
    out
}

/// Move per-point data along the renumbering `new_of`.
pub fn relabel_values(values: &[usize], new_of: &[usize]) -> Vec<usize> {
    let mut out = vec![0; values.len()];
    for (x, &v) in values.iter().enumerate() {
        out[new_of[x]] = v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_count() {
        assert_eq!(Permutations::new(0).count(), 1);
        assert_eq!(Permutations::new(4).count(), 24);
        let all: std::collections::HashSet<_> = Permutations::new(5).collect();
        assert_eq!(all.len(), 120);
    }

    #[test]
    fn compose_and_inverse() {
        let p = vec![1, 2, 0];
        let q = vec![1, 0, 2];
        assert_eq!(compose(&p, &inverse(&p)), identity(3));
        // apply q then p: 0 -> 1 -> 2
        assert_eq!(compose(&p, &q)[0], 2);
    }

    #[test]
    fn cycle_types() {
        assert_eq!(cycle_type(&from_cycle_type(&[3, 2, 2, 1])), vec![3, 2, 2, 1]);
        assert_eq!(cycle_count(&identity(4)), 4);
        assert_eq!(integer_partitions(5, None).len(), 7);
        assert_eq!(integer_partitions(7, Some(4)).len(), 3);
    }

    #[test]
    fn transitivity() {
        assert!(is_transitive(3, &[&[1, 2, 0]]));
        assert!(!is_transitive(3, &[&[1, 0, 2], &[0, 1, 2]]));
    }

    #[test]
    fn rooted_code_is_conjugation_invariant() {
        let a = vec![1, 2, 0, 3];
        let b = vec![3, 1, 2, 0];
        let pi = vec![2, 0, 3, 1];
        let pinv = inverse(&pi);
        let a2 = compose(&pi, &compose(&a, &pinv));
        let b2 = compose(&pi, &compose(&b, &pinv));
        let c1 = rooted_code(&[&a, &b], &[], 0).unwrap();
        let c2 = rooted_code(&[&a2, &b2], &[], pi[0]).unwrap();
        assert_eq!(c1, c2);
        let f1 = canonical_form(&[&a, &b], &[]).unwrap();
        let f2 = canonical_form(&[&a2, &b2], &[]).unwrap();
        assert_eq!(f1.code, f2.code);
        assert_eq!(relabel(&a, &f1.new_of), relabel(&a2, &f2.new_of));
    }

    #[test]
    fn automorphisms_are_centralizer_order() {
        // a 4-cycle alone commutes with its 4 powers
        let c = from_cycle_type(&[4]);
        assert_eq!(canonical_form(&[&c], &[]).unwrap().automorphisms, 4);
        // labels can break the symmetry
        let labels = vec![0, 1, 0, 1];
        assert_eq!(canonical_form(&[&c], &[&labels]).unwrap().automorphisms, 2);
        assert!(canonical_form(&[&identity(2)], &[]).is_none());
    }
}
