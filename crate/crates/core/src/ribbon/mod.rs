//! One-face bipartite ribbon graphs with labelled vertices, integral
//! metrics on them with prescribed vertex perimeters, and the positive-tree
//! counts on walls of the perimeter space.
//!
//! A graph with `E` edges is stored as two permutations of the edges: the
//! cyclic order of edges around black vertices and around white vertices.
//! At dart level, edge `e` has the black half `2e` and the white half
//! `2e + 1`; the rotation acts on halves of the same colour and the pairing
//! swaps `2e` and `2e + 1`.

mod metrics;
mod walls;

pub use metrics::{
    bridge_forms, count_metrics, count_positive_trees, counting_function, fit_ray_polynomial, tree_weights,
};
pub use walls::{
    cell_signature, p0_oracle, partition_wall_cases, positive_trees_by_cell, wall_sample_point, EdgeForm, PerimeterPair,
    Wall,
};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{self, canonical_form, cycle_count, cycles, from_cycle_type, integer_partitions, Perm, Permutations};

/// Largest edge count handled by the exhaustive enumeration.
pub const MAX_EDGES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RibbonGraph {
    black: Perm,
    white: Perm,
    black_label: Vec<usize>,
    white_label: Vec<usize>,
}

impl RibbonGraph {
    /// `black_label[e]` / `white_label[e]` name the vertex at each end of edge
    /// `e`; they must be constant on the cycles of `black` / `white` and
    /// distinct between cycles.
    pub fn new(black: Perm, white: Perm, black_label: Vec<usize>, white_label: Vec<usize>) -> Result<Self> {
        let e = black.len();
        if white.len() != e || black_label.len() != e || white_label.len() != e {
            return Err(Error::LengthMismatch(e, white.len()));
        }
        for (rot, labels) in [(&black, &black_label), (&white, &white_label)] {
            let cs = cycles(rot);
            let mut seen = vec![false; cs.len()];
            for c in &cs {
                let lab = labels[c[0]];
                if c.iter().any(|&x| labels[x] != lab) || lab >= cs.len() || seen[lab] {
                    return Err(Error::Consistency("vertex labels must biject with rotation cycles".into()));
                }
                seen[lab] = true;
            }
        }
        Ok(RibbonGraph { black, white, black_label, white_label })
    }

    pub fn edges(&self) -> usize {
        self.black.len()
    }

    pub fn black_vertices(&self) -> usize {
        cycle_count(&self.black)
    }

    pub fn white_vertices(&self) -> usize {
        cycle_count(&self.white)
    }

    pub fn faces(&self) -> usize {
        cycle_count(&perm::compose(&self.black, &self.white))
    }

    /// Genus from `V - E + F = 2 - 2g`; `None` if the graph is disconnected.
    pub fn genus(&self) -> Option<u32> {
        if !perm::is_transitive(self.edges(), &[&self.black, &self.white]) {
            return None;
        }
        let chi = (self.black_vertices() + self.white_vertices() + self.faces()) as i64 - self.edges() as i64;
        let g2 = 2 - chi;
        (g2 >= 0 && g2 % 2 == 0).then_some((g2 / 2) as u32)
    }

    /// Black and white vertex labels at the two ends of edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.black_label[e], self.white_label[e])
    }

    pub fn black_rotation(&self) -> &[usize] {
        &self.black
    }

    pub fn white_rotation(&self) -> &[usize] {
        &self.white
    }

    pub fn is_tree(&self) -> bool {
        self.black_vertices() + self.white_vertices() == self.edges() + 1 && self.genus() == Some(0)
    }

    /// Rotation on darts: black halves follow the black cyclic order, white
    /// halves the white one.
    pub fn rotation(&self) -> Perm {
        let mut r = vec![0; 2 * self.edges()];
        for e in 0..self.edges() {
            r[2 * e] = 2 * self.black[e];
            r[2 * e + 1] = 2 * self.white[e] + 1;
        }
        r
    }

    pub fn pairing(&self) -> Perm {
        (0..2 * self.edges()).map(|d| d ^ 1).collect()
    }

    pub fn dump(&self, automorphisms: usize) -> GraphDump {
        let rotation = self.rotation();
        let mut vertices = cycles(&rotation);
        vertices.sort();
        let colors = vertices
            .iter()
            .map(|v| if v[0] % 2 == 0 { "black" } else { "white" })
            .collect();
        let labels = vertices
            .iter()
            .map(|v| {
                let e = v[0] / 2;
                1 + if v[0] % 2 == 0 { self.black_label[e] } else { self.white_label[e] }
            })
            .collect();
        GraphDump {
            darts: rotation.len(),
            rotation,
            pairing: self.pairing(),
            vertices,
            colors,
            labels,
            genus: self.genus().unwrap_or(u32::MAX),
            faces: self.faces(),
            aut: automorphisms,
        }
    }
}

/// JSON form of a graph. Vertices are the rotation cycles, listed by
/// smallest dart; labels are 1-based within each colour.
#[derive(Clone, Debug, Serialize)]
pub struct GraphDump {
    pub darts: usize,
    pub rotation: Perm,
    pub pairing: Perm,
    pub vertices: Vec<Vec<usize>>,
    pub colors: Vec<&'static str>,
    pub labels: Vec<usize>,
    pub genus: u32,
    pub faces: usize,
    pub aut: usize,
}

pub type GraphFamily = Arc<Vec<(RibbonGraph, usize)>>;

fn edge_count(g: u32, k: usize, l: usize) -> Result<usize> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidRange("need at least one vertex of each colour".into()));
    }
    let e = k + l - 1 + 2 * g as usize;
    if e > MAX_EDGES {
        return Err(Error::SizeBound(format!("{e} edges exceeds the limit of {MAX_EDGES}")));
    }
    Ok(e)
}

/// Isomorphism classes of genus `g` one-face bipartite ribbon graphs with
/// black vertices labelled `1..k` and white vertices labelled `1..l`, each
/// with its number of colour- and label-preserving automorphisms. Sorted by
/// canonical code; cached per `(g, k, l)`.
pub fn enumerate_graphs(g: u32, k: usize, l: usize) -> Result<GraphFamily> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize, usize), GraphFamily>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("poisoned").get(&(g, k, l)) {
        return Ok(hit.clone());
    }
    // computed without holding the lock; a racing duplicate is identical
    let family = Arc::new(enumerate_uncached(g, k, l)?);
    Ok(cache.lock().expect("poisoned").entry((g, k, l)).or_insert(family).clone())
}

fn enumerate_uncached(g: u32, k: usize, l: usize) -> Result<Vec<(RibbonGraph, usize)>> {
    let e = edge_count(g, k, l)?;
    let mut pairs = Vec::new();
    for lambda in integer_partitions(e, Some(k)) {
        let black = from_cycle_type(&lambda);
        for white in Permutations::new(e) {
            if cycle_count(&white) == l && cycle_count(&perm::compose(&black, &white)) == 1 {
                pairs.push((black.clone(), white));
            }
        }
    }
    let black_labelings: Vec<Perm> = Permutations::new(k).collect();
    let white_labelings: Vec<Perm> = Permutations::new(l).collect();

    let classes = pairs
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<Vec<usize>, (RibbonGraph, usize)>, (black, white)| {
            let bc = cycle_index(black);
            let wc = cycle_index(white);
            for bl in &black_labelings {
                let black_label: Vec<usize> = bc.iter().map(|&c| bl[c]).collect();
                for wl in &white_labelings {
                    let white_label: Vec<usize> = wc.iter().map(|&c| wl[c]).collect();
                    let canon = canonical_form(&[black, white], &[&black_label, &white_label])
                        .expect("one face implies connected");
                    acc.entry(canon.code).or_insert_with(|| {
                        let graph = RibbonGraph {
                            black: perm::relabel(black, &canon.new_of),
                            white: perm::relabel(white, &canon.new_of),
                            black_label: perm::relabel_values(&black_label, &canon.new_of),
                            white_label: perm::relabel_values(&white_label, &canon.new_of),
                        };
                        (graph, canon.automorphisms)
                    });
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (code, v) in b {
                a.entry(code).or_insert(v);
            }
            a
        });
    let mut out: Vec<(Vec<usize>, (RibbonGraph, usize))> = classes.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, v)| v).collect())
}

/// Index of the cycle containing each point, cycles ordered by smallest point.
fn cycle_index(p: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; p.len()];
    for (c, cycle) in cycles(p).iter().enumerate() {
        for &x in cycle {
            idx[x] = c;
        }
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::factorial;
    use num_traits::ToPrimitive;

    fn narayana(n: u64, k: u64) -> u64 {
        let b = |a: u64, c: u64| crate::exact::binomial(a, c).to_u64().unwrap();
        b(n, k) * b(n, k - 1) / n
    }

    #[test]
    fn small_families() {
        let f = enumerate_graphs(0, 1, 1).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].1, 1);
        let f = enumerate_graphs(0, 2, 2).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.iter().all(|(_, a)| *a == 1));
        let f = enumerate_graphs(1, 1, 1).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].1, 3);
        assert!(enumerate_graphs(2, 3, 3).is_err());
    }

    #[test]
    fn structural_invariants() {
        for (g, k, l) in [(0, 2, 3), (1, 2, 1), (1, 2, 2), (2, 1, 1), (0, 3, 3)] {
            for (graph, _) in enumerate_graphs(g, k, l).unwrap().iter() {
                assert_eq!(graph.faces(), 1);
                assert_eq!(graph.genus(), Some(g));
                assert_eq!(graph.black_vertices(), k);
                assert_eq!(graph.white_vertices(), l);
                let rot = graph.rotation();
                let pair = graph.pairing();
                for d in 0..rot.len() {
                    assert_eq!(rot[d] % 2, d % 2, "rotation preserves colour");
                    assert_ne!(pair[d] % 2, d % 2, "edges join opposite colours");
                }
                let faces = perm::cycle_count(&perm::compose(&rot, &pair));
                assert_eq!(faces, 1);
            }
        }
    }

    #[test]
    fn tree_counts_are_labelled_narayana() {
        for (k, l) in [(1, 3), (2, 2), (2, 3), (3, 3), (3, 2)] {
            let e = (k + l - 1) as u64;
            let want = narayana(e, k as u64) * factorial(k as u64).to_u64().unwrap()
                * factorial(l as u64).to_u64().unwrap()
                / e;
            assert_eq!(enumerate_graphs(0, k, l).unwrap().len() as u64, want, "({k},{l})");
        }
    }

    #[test]
    fn burnside_consistency() {
        // sum over classes of E!/|Aut| = number of labelled tuples
        for (g, k, l) in [(1, 1, 1), (1, 2, 1), (1, 2, 2), (2, 1, 1), (0, 2, 3)] {
            let e = k + l - 1 + 2 * g as usize;
            let mut raw = 0u64;
            for beta in Permutations::new(e).filter(|b| cycle_count(b) == k) {
                for omega in Permutations::new(e) {
                    if cycle_count(&omega) == l && cycle_count(&perm::compose(&beta, &omega)) == 1 {
                        raw += 1;
                    }
                }
            }
            let labellings = factorial(k as u64).to_u64().unwrap() * factorial(l as u64).to_u64().unwrap();
            let fact_e = factorial(e as u64).to_u64().unwrap();
            let classes: u64 = enumerate_graphs(g as u32, k, l)
                .unwrap()
                .iter()
                .map(|(_, a)| fact_e / *a as u64)
                .sum();
            assert_eq!(classes, raw * labellings, "({g},{k},{l})");
        }
    }

    #[test]
    fn dump_shape() {
        let f = enumerate_graphs(1, 1, 1).unwrap();
        let d = f[0].0.dump(f[0].1);
        assert_eq!(d.darts, 6);
        assert_eq!(d.colors, vec!["black", "white"]);
        assert_eq!(d.labels, vec![1, 1]);
        assert_eq!((d.genus, d.faces, d.aut), (1, 1, 3));
        let json = serde_json::to_value(&d).unwrap();
        for key in ["darts", "rotation", "pairing", "colors", "labels", "genus", "faces", "aut"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn rejects_bad_labels() {
        assert!(RibbonGraph::new(vec![1, 0], vec![0, 1], vec![0, 1], vec![0, 1]).is_err());
        assert!(RibbonGraph::new(vec![1, 0], vec![0, 1], vec![0, 0], vec![0, 1]).is_ok());
    }
}
