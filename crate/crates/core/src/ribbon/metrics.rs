use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{enumerate_graphs, EdgeForm, PerimeterPair, RibbonGraph};
use crate::error::{Error, Result};
use crate::exact::{factorial, Rational, UPoly};

/// Leaf-stripping plan for a spanning tree: each step names the tree edge
/// whose weight equals the residual perimeter of its leaf endpoint, then
/// passes that weight on to the other endpoint. The last vertex is where
/// balance is checked.
struct Plan {
    steps: Vec<(usize, usize, usize)>,
    last: usize,
}

/// Vertex ids: black label `i` is `i`, white label `j` is `k + j`.
fn edge_ends(graph: &RibbonGraph, k: usize) -> Vec<(usize, usize)> {
    (0..graph.edges())
        .map(|e| {
            let (b, w) = graph.endpoints(e);
            (b, k + w)
        })
        .collect()
}

/// Spanning tree by union-find over edges in index order; returns
/// `(tree_edges, other_edges)`.
fn spanning_tree(vertices: usize, ends: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let (mut tree, mut rest) = (Vec::new(), Vec::new());
    for (e, &(a, b)) in ends.iter().enumerate() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            rest.push(e);
        } else {
            parent[ra] = rb;
            tree.push(e);
        }
    }
    (tree, rest)
}

fn leaf_plan(vertices: usize, ends: &[(usize, usize)], tree: &[usize]) -> Plan {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices];
    for &e in tree {
        incident[ends[e].0].push(e);
        incident[ends[e].1].push(e);
    }
    let mut removed = vec![false; ends.len()];
    let mut degree: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut stack: Vec<usize> = (0..vertices).filter(|&v| degree[v] == 1).collect();
    let mut steps = Vec::with_capacity(tree.len());
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let e = *incident[v].iter().find(|&&e| !removed[e]).expect("leaf has an edge");
        removed[e] = true;
        let other = if ends[e].0 == v { ends[e].1 } else { ends[e].0 };
        degree[v] = 0;
        degree[other] -= 1;
        steps.push((e, v, other));
        if degree[other] == 1 {
            stack.push(other);
        }
    }
    let last = steps.last().map_or(0, |s| s.2);
    Plan { steps, last }
}

/// Number of positive integral edge weights on `graph` whose vertex
/// perimeters are `p`.
pub fn count_metrics(graph: &RibbonGraph, p: &PerimeterPair) -> Result<u64> {
    let (k, l) = (graph.black_vertices(), graph.white_vertices());
    if p.k() != k || p.l() != l {
        return Err(Error::LengthMismatch(k + l, p.k() + p.l()));
    }
    let (black, white) = p
        .to_ints()
        .ok_or_else(|| Error::InvalidRange("metric counting needs integral perimeters".into()))?;
    if black.iter().sum::<i64>() != white.iter().sum::<i64>() || black.iter().chain(&white).any(|&x| x <= 0) {
        return Ok(0);
    }
    let perimeter: Vec<i64> = black.iter().chain(&white).copied().collect();
    let ends = edge_ends(graph, k);
    let (tree, free) = spanning_tree(k + l, &ends);
    let plan = leaf_plan(k + l, &ends, &tree);
    let bounds: Vec<i64> = free.iter().map(|&e| perimeter[ends[e].0].min(perimeter[ends[e].1])).collect();

    let mut weights = vec![1i64; free.len()];
    let mut count = 0u64;
    let mut residual = vec![0i64; k + l];
    'outer: loop {
        residual.copy_from_slice(&perimeter);
        for (&e, &w) in free.iter().zip(&weights) {
            residual[ends[e].0] -= w;
            residual[ends[e].1] -= w;
        }
        let mut ok = true;
        for &(_, leaf, other) in &plan.steps {
            let w = residual[leaf];
            if w <= 0 {
                ok = false;
                break;
            }
            residual[leaf] = 0;
            residual[other] -= w;
        }
        if ok && residual[plan.last] == 0 {
            count += 1;
        }
        // odometer over the free edge weights
        for i in 0..weights.len() {
            if weights[i] < bounds[i] {
                weights[i] += 1;
                continue 'outer;
            }
            weights[i] = 1;
        }
        break;
    }
    Ok(count)
}

/// `P^g_{k,l}(L; L') = sum_G count_metrics(G, p) / |Aut G|` over the
/// one-face genus `g` family.
pub fn counting_function(g: u32, k: usize, l: usize, p: &PerimeterPair) -> Result<Rational> {
    let family = enumerate_graphs(g, k, l)?;
    let terms: Result<Vec<Rational>> = family
        .par_iter()
        .map(|(graph, aut)| {
            Ok(Rational::new(BigInt::from(count_metrics(graph, p)?), BigInt::from(*aut)))
        })
        .collect();
    Ok(terms?.into_iter().sum())
}

/// The unique (rational) edge weights on a tree with perimeters `p`.
pub fn tree_weights(tree: &RibbonGraph, p: &PerimeterPair) -> Result<Vec<Rational>> {
    if !tree.is_tree() {
        return Err(Error::NotATree);
    }
    let (k, l) = (tree.black_vertices(), tree.white_vertices());
    if p.k() != k || p.l() != l {
        return Err(Error::LengthMismatch(k + l, p.k() + p.l()));
    }
    if !p.is_balanced() {
        let sum = |v: &[Rational]| v.iter().sum::<Rational>().to_string();
        return Err(Error::Unbalanced(sum(&p.black), sum(&p.white)));
    }
    let ends = edge_ends(tree, k);
    let all: Vec<usize> = (0..tree.edges()).collect();
    let plan = leaf_plan(k + l, &ends, &all);
    let mut residual: Vec<Rational> = p.black.iter().chain(&p.white).cloned().collect();
    let mut weights = vec![Rational::zero(); tree.edges()];
    for &(e, leaf, other) in &plan.steps {
        let w = std::mem::replace(&mut residual[leaf], Rational::zero());
        residual[other] -= &w;
        weights[e] = w;
    }
    Ok(weights)
}

/// For each edge of a tree, the form `sum_I L - sum_J L'` where `(I, J)` are
/// the labels on the side of the edge containing its black endpoint.
pub fn bridge_forms(tree: &RibbonGraph) -> Result<Vec<EdgeForm>> {
    if !tree.is_tree() {
        return Err(Error::NotATree);
    }
    let k = tree.black_vertices();
    let n = k + tree.white_vertices();
    let ends = edge_ends(tree, k);
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in ends.iter().enumerate() {
        adjacency[a].push((b, e));
        adjacency[b].push((a, e));
    }
    let mut forms = Vec::with_capacity(ends.len());
    for (cut, &(start, _)) in ends.iter().enumerate() {
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut stack = vec![start];
        let (mut black, mut white) = (0u32, 0u32);
        while let Some(v) = stack.pop() {
            if v < k {
                black |= 1 << v;
            } else {
                white |= 1 << (v - k);
            }
            for &(u, e) in &adjacency[v] {
                if e != cut && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        forms.push(EdgeForm::new(black, white));
    }
    Ok(forms)
}

/// Number of labelled bipartite plane trees with `k` black and `l` white
/// vertices whose weights at `p` are all positive.
pub fn count_positive_trees(k: usize, l: usize, p: &PerimeterPair) -> Result<u64> {
    if p.k() != k || p.l() != l {
        return Err(Error::LengthMismatch(k + l, p.k() + p.l()));
    }
    if !p.is_balanced() {
        let sum = |v: &[Rational]| v.iter().sum::<Rational>().to_string();
        return Err(Error::Unbalanced(sum(&p.black), sum(&p.white)));
    }
    // sign of every form, indexed by (black mask, white mask)
    let positive: Vec<bool> = (0..1u32 << k)
        .flat_map(|b| (0..1u32 << l).map(move |w| (b, w)))
        .map(|(b, w)| EdgeForm::new(b, w).eval(p).is_positive())
        .collect();
    let trees = enumerate_graphs(0, k, l)?;
    let counts: Result<Vec<u64>> = trees
        .par_iter()
        .map(|(tree, _)| {
            let forms = bridge_forms(tree)?;
            let ok = forms.iter().all(|f| positive[((f.black as usize) << l) | f.white as usize]);
            Ok(u64::from(ok))
        })
        .collect();
    Ok(counts?.into_iter().sum())
}

/// Interpolates `c -> P^g_{k,l}(c p)` for `c = 1..=c_max` by Newton forward
/// differences and returns it as a polynomial in `c`. Fails if a difference
/// of order above `2g` is nonzero.
pub fn fit_ray_polynomial(g: u32, k: usize, l: usize, p: &PerimeterPair, c_max: usize) -> Result<UPoly> {
    let degree = 2 * g as usize;
    if c_max < degree + 2 {
        return Err(Error::InvalidRange(format!("need c_max >= {}, got {c_max}", degree + 2)));
    }
    let mut values = Vec::with_capacity(c_max);
    for c in 1..=c_max {
        let scaled = p.scale(&Rational::from_integer(BigInt::from(c)));
        values.push(counting_function(g, k, l, &scaled)?);
    }
    // leading[j] = Δ^j v at c = 1
    let mut leading = Vec::with_capacity(c_max);
    let mut row = values;
    while !row.is_empty() {
        leading.push(row[0].clone());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    for (order, d) in leading.iter().enumerate().skip(degree + 1) {
        if !d.is_zero() {
            return Err(Error::DegreeBound { order, value: d.to_string() });
        }
    }
    // sum_j Δ^j v_1 * binom(c - 1, j)
    let mut poly = UPoly::zero();
    let mut basis = UPoly::one();
    for (j, d) in leading.iter().enumerate().take(degree + 1) {
        if j > 0 {
            let shift = Rational::from_integer(BigInt::from(j as i64));
            basis = &basis * &UPoly::new(vec![-shift, Rational::one()]);
        }
        let scale = d / Rational::from_integer(factorial(j as u64));
        poly = &poly + &basis.scale(&scale);
    }
    Ok(poly)
}
