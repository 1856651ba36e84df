//! Ward agglomerative clustering restricted to pairs of clusters joined by
//! at least one edge of a connectivity graph.
//!
//! Leaves are clusters `0..N`; the cluster created by merge `s` gets id
//! `N + s`. Costs come from size/mean summaries, so each candidate pair is
//! priced in O(dim).

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityGraph {
    node_count: usize,
    /// Undirected edges stored once as `(i, j)` with `i < j`, sorted.
    edges: Vec<(usize, usize)>,
}

impl ConnectivityGraph {
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at node {a}")));
            }
            if a >= node_count || b >= node_count {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) outside {node_count} nodes"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self {
            node_count,
            edges: set.into_iter().collect(),
        })
    }

    pub fn complete(node_count: usize) -> Self {
        let edges = (0..node_count)
            .flat_map(|i| (i + 1..node_count).map(move |j| (i, j)))
            .collect();
        Self { node_count, edges }
    }

    pub fn path(node_count: usize) -> Self {
        let edges = (1..node_count).map(|i| (i - 1, i)).collect();
        Self { node_count, edges }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.node_count];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }

    /// Component index per node, numbered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.node_count);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        relabel(&(0..self.node_count).map(|i| uf.find(i)).collect::<Vec<_>>())
            .into_iter()
            .map(|l| l - 1)
            .collect()
    }

    pub fn component_count(&self) -> usize {
        self.components().iter().max().map_or(0, |m| m + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub cluster_a: usize,
    pub cluster_b: usize,
    pub cost: f64,
    pub new_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    pub leaf_count: usize,
}

impl Dendrogram {
    /// Number of clusters left after all merges.
    pub fn final_clusters(&self) -> usize {
        self.leaf_count - self.merges.len()
    }
}

/// Size and centroid of a cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    pub size: usize,
    pub mean: Vec<f64>,
}

impl ClusterStats {
    pub fn singleton(x: &[f64]) -> Self {
        Self {
            size: 1,
            mean: x.to_vec(),
        }
    }

    pub fn from_points(points: &[&[f64]]) -> Self {
        let dim = points.first().map_or(0, |p| p.len());
        let mut mean = vec![0.0; dim];
        for p in points {
            for (m, x) in mean.iter_mut().zip(*p) {
                *m += x;
            }
        }
        let n = points.len() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        Self {
            size: points.len(),
            mean,
        }
    }

    pub fn merged(&self, other: &Self) -> Self {
        let (na, nb) = (self.size as f64, other.size as f64);
        let mean = self
            .mean
            .iter()
            .zip(&other.mean)
            .map(|(a, b)| (na * a + nb * b) / (na + nb))
            .collect();
        Self {
            size: self.size + other.size,
            mean,
        }
    }
}

/// Increase of the within-cluster sum of squares caused by merging.
pub fn ward_cost(a: &ClusterStats, b: &ClusterStats) -> f64 {
    let (na, nb) = (a.size as f64, b.size as f64);
    let sq: f64 = a.mean.iter().zip(&b.mean).map(|(x, y)| (x - y) * (x - y)).sum();
    na * nb / (na + nb) * sq
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    cost: f64,
    key: (usize, usize),
    a: usize,
    b: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.key.cmp(&other.key))
            .then((self.a, self.b).cmp(&(other.a, other.b)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn ward_constrained(features: &FeatureSet, graph: &ConnectivityGraph) -> Result<Dendrogram> {
    if let Some(first) = features.blocks.first() {
        if features.blocks.iter().any(|b| b.rows != first.rows || b.cols != first.cols) {
            return Err(Error::ShapeMismatch("feature blocks differ in shape".into()));
        }
    }
    ward_constrained_points(&features.vectors(), graph)
}

/// Constrained Ward on plain vectors.
pub fn ward_constrained_points(points: &[Vec<f64>], graph: &ConnectivityGraph) -> Result<Dendrogram> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidArgument("nothing to cluster".into()));
    }
    if graph.node_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: graph.node_count(),
        });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::ShapeMismatch("feature vectors differ in length".into()));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite feature value".into()));
    }

    let total = 2 * n - 1;
    let mut stats: Vec<Option<ClusterStats>> = points.iter().map(|p| Some(ClusterStats::singleton(p))).collect();
    stats.reserve(total - n);
    let mut min_leaf: Vec<usize> = (0..n).collect();
    let mut adj = graph.neighbors();
    let mut heap = BinaryHeap::new();
    let candidate = |a: usize, b: usize, stats: &[Option<ClusterStats>], min_leaf: &[usize]| {
        let (la, lb) = (min_leaf[a], min_leaf[b]);
        Reverse(Candidate {
            cost: ward_cost(stats[a].as_ref().unwrap(), stats[b].as_ref().unwrap()),
            key: (la.min(lb), la.max(lb)),
            a: a.min(b),
            b: a.max(b),
        })
    };
    for &(a, b) in graph.edges() {
        heap.push(candidate(a, b, &stats, &min_leaf));
    }

    let mut merges = Vec::new();
    while let Some(Reverse(c)) = heap.pop() {
        if stats[c.a].is_none() || stats[c.b].is_none() {
            continue;
        }
        let sa = stats[c.a].take().unwrap();
        let sb = stats[c.b].take().unwrap();
        let merged = sa.merged(&sb);
        let id = stats.len();
        merges.push(Merge {
            cluster_a: c.a,
            cluster_b: c.b,
            cost: c.cost,
            new_size: merged.size,
        });
        stats.push(Some(merged));
        min_leaf.push(min_leaf[c.a].min(min_leaf[c.b]));
        let mut nbrs = std::mem::take(&mut adj[c.a]);
        nbrs.append(&mut std::mem::take(&mut adj[c.b]));
        nbrs.remove(&c.a);
        nbrs.remove(&c.b);
        for &o in &nbrs {
            adj[o].remove(&c.a);
            adj[o].remove(&c.b);
            adj[o].insert(id);
        }
        adj.push(nbrs);
        for &o in &adj[id] {
            heap.push(candidate(id, o, &stats, &min_leaf));
        }
    }
    Ok(Dendrogram { merges, leaf_count: n })
}

/// Flat labels with `k` clusters: replays the first `N - k` merges.
/// Labels are 1-based and numbered by smallest member.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<Vec<usize>> {
    let n = dendrogram.leaf_count;
    let min_k = dendrogram.final_clusters();
    if k < min_k || k > n || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "cluster count {k} outside [{}, {n}]",
            min_k.max(1)
        )));
    }
    let mut uf = UnionFind::new(2 * n);
    for (s, m) in dendrogram.merges.iter().take(n - k).enumerate() {
        uf.union(m.cluster_a, n + s);
        uf.union(m.cluster_b, n + s);
    }
    Ok(relabel(&(0..n).map(|i| uf.find(i)).collect::<Vec<_>>()))
}

/// Renumber arbitrary group keys as 1, 2, ... in order of first appearance.
pub fn relabel(keys: &[usize]) -> Vec<usize> {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    keys.iter()
        .map(|k| {
            let next = seen.len() + 1;
            *seen.entry(*k).or_insert(next)
        })
        .collect()
}

/// Adjusted Rand index between two labelings.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let (ra, rb) = (relabel(a), relabel(b));
    let ka = ra.iter().max().copied().unwrap_or(0);
    let kb = rb.iter().max().copied().unwrap_or(0);
    let mut table = vec![vec![0u64; kb]; ka];
    for (x, y) in ra.iter().zip(&rb) {
        table[x - 1][y - 1] += 1;
    }
    let pairs = |m: u64| (m * m.saturating_sub(1) / 2) as f64;
    let index: f64 = table.iter().flatten().map(|&m| pairs(m)).sum();
    let rows: f64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    let cols: f64 = (0..kb).map(|j| pairs(table.iter().map(|r| r[j]).sum())).sum();
    let total = pairs(a.len() as u64);
    let expected = if total > 0.0 { rows * cols / total } else { 0.0 };
    let max = (rows + cols) / 2.0;
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    fn sse(points: &[&[f64]]) -> f64 {
        let s = ClusterStats::from_points(points);
        points
            .iter()
            .map(|p| p.iter().zip(&s.mean).map(|(x, m)| (x - m) * (x - m)).sum::<f64>())
            .sum()
    }

    /// Greedy agglomeration recomputing every SSE increase from member lists.
    fn brute_force_greedy(points: &[Vec<f64>], graph: &ConnectivityGraph) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
        let mut clusters: Vec<BTreeSet<usize>> = (0..points.len()).map(|i| BTreeSet::from([i])).collect();
        let adjacent = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| {
            graph
                .edges()
                .iter()
                .any(|&(x, y)| (a.contains(&x) && b.contains(&y)) || (a.contains(&y) && b.contains(&x)))
        };
        let cost = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| {
            let pa: Vec<&[f64]> = a.iter().map(|&i| points[i].as_slice()).collect();
            let pb: Vec<&[f64]> = b.iter().map(|&i| points[i].as_slice()).collect();
            let both: Vec<&[f64]> = pa.iter().chain(&pb).copied().collect();
            sse(&both) - sse(&pa) - sse(&pb)
        };
        let mut out = Vec::new();
        loop {
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    if adjacent(&clusters[i], &clusters[j]) {
                        let c = cost(&clusters[i], &clusters[j]);
                        if best.map_or(true, |b| c < b.0) {
                            best = Some((c, i, j));
                        }
                    }
                }
            }
            let Some((_, i, j)) = best else { break };
            let b = clusters.remove(j);
            let a = clusters.remove(i);
            out.push((a.clone(), b.clone()));
            clusters.push(a.union(&b).copied().collect());
        }
        out
    }

    fn members(d: &Dendrogram) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
        let n = d.leaf_count;
        let mut sets: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([i])).collect();
        let mut out = Vec::new();
        for m in &d.merges {
            let (a, b) = (sets[m.cluster_a].clone(), sets[m.cluster_b].clone());
            sets.push(a.union(&b).copied().collect());
            out.push((a, b));
        }
        out
    }

    fn same_merges(a: &[(BTreeSet<usize>, BTreeSet<usize>)], b: &[(BTreeSet<usize>, BTreeSet<usize>)]) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(x, y)| (x.0 == y.0 && x.1 == y.1) || (x.0 == y.1 && x.1 == y.0))
    }

    #[test]
    fn graph_validation() {
        assert!(ConnectivityGraph::new(3, [(1, 1)]).is_err());
        assert!(ConnectivityGraph::new(3, [(0, 3)]).is_err());
        let g = ConnectivityGraph::new(4, [(1, 0), (0, 1), (2, 3)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
        assert_eq!(g.components(), vec![0, 0, 1, 1]);
    }

    #[test]
    fn identical_blocks_merge_at_zero_cost() {
        let d = ward_constrained_points(&[vec![1.0, 2.0], vec![1.0, 2.0]], &ConnectivityGraph::complete(2)).unwrap();
        assert_eq!(d.merges[0].cost, 0.0);
        assert_eq!(d.merges[0].new_size, 2);
    }

    #[test]
    fn path_of_four_merges_close_pairs_first() {
        let points = pts(&[0.0, 0.1, 10.0, 10.1]);
        let d = ward_constrained_points(&points, &ConnectivityGraph::path(4)).unwrap();
        let m = members(&d);
        let first_two: BTreeSet<_> = m[..2].iter().map(|(a, b)| a.union(b).copied().collect::<Vec<_>>()).collect();
        assert_eq!(first_two, BTreeSet::from([vec![0, 1], vec![2, 3]]));
        assert_eq!(d.merges[2].new_size, 4);
        // Every constrained merge sequence; the greedy one has the
        // lexicographically smallest cost sequence.
        fn all_sequences(points: &[Vec<f64>], clusters: Vec<Vec<usize>>, costs: Vec<f64>, out: &mut Vec<Vec<f64>>) {
            if clusters.len() == 1 {
                out.push(costs);
                return;
            }
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    let touching = clusters[i].iter().any(|a| clusters[j].iter().any(|b| a.abs_diff(*b) == 1));
                    if !touching {
                        continue;
                    }
                    let stat = |c: &[usize]| ClusterStats::from_points(&c.iter().map(|&k| points[k].as_slice()).collect::<Vec<_>>());
                    let mut next = clusters.clone();
                    let b = next.remove(j);
                    let a = next.remove(i);
                    let mut c = costs.clone();
                    c.push(ward_cost(&stat(&a), &stat(&b)));
                    next.push(a.into_iter().chain(b).collect());
                    all_sequences(points, next, c, out);
                }
            }
        }
        let mut seqs = Vec::new();
        all_sequences(&points, (0..4).map(|i| vec![i]).collect(), Vec::new(), &mut seqs);
        seqs.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal));
        let got: Vec<f64> = d.merges.iter().map(|m| m.cost).collect();
        assert!(got.iter().zip(&seqs[0]).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn disconnected_graph_stops_at_components() {
        let g = ConnectivityGraph::new(4, [(0, 1), (2, 3)]).unwrap();
        let d = ward_constrained_points(&pts(&[0.0, 5.0, 0.1, 5.1]), &g).unwrap();
        assert_eq!(d.merges.len(), 2);
        assert_eq!(d.final_clusters(), 2);
        assert_eq!(cut(&d, 2).unwrap(), vec![1, 1, 2, 2]);
        assert!(cut(&d, 1).is_err());
        assert!(cut(&d, 5).is_err());
    }

    #[test]
    fn cut_extremes() {
        let points = pts(&[3.0, 1.0, 4.0, 1.5, 9.0]);
        let d = ward_constrained_points(&points, &ConnectivityGraph::complete(5)).unwrap();
        assert_eq!(cut(&d, 5).unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(cut(&d, 1).unwrap(), vec![1; 5]);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(ward_constrained_points(&[], &ConnectivityGraph::complete(0)).is_err());
        assert!(ward_constrained_points(&pts(&[1.0]), &ConnectivityGraph::complete(2)).is_err());
    }

    #[test]
    fn ward_cost_examples() {
        let a = ClusterStats::singleton(&[0.0]);
        assert_eq!(ward_cost(&a, &a), 0.0);
        assert_eq!(ward_cost(&a, &ClusterStats::singleton(&[2.0])), 2.0);
    }

    #[test]
    fn ari_examples() {
        assert_eq!(adjusted_rand_index(&[1, 1, 2, 2], &[5, 5, 3, 3]).unwrap(), 1.0);
        assert!(adjusted_rand_index(&[1, 1, 2, 2], &[1, 2, 1, 2]).unwrap() < 0.0);
        assert!(adjusted_rand_index(&[1, 2], &[1]).is_err());
    }

    proptest! {
        #[test]
        fn ward_cost_matches_sse_increase(
            a in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 1..6),
            b in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 1..6),
        ) {
            let pa: Vec<&[f64]> = a.iter().map(|v| v.as_slice()).collect();
            let pb: Vec<&[f64]> = b.iter().map(|v| v.as_slice()).collect();
            let both: Vec<&[f64]> = pa.iter().chain(&pb).copied().collect();
            let direct = sse(&both) - sse(&pa) - sse(&pb);
            let fast = ward_cost(&ClusterStats::from_points(&pa), &ClusterStats::from_points(&pb));
            prop_assert!((direct - fast).abs() < 1e-10 * (1.0 + direct.abs()));
        }

        #[test]
        fn complete_graph_matches_brute_force(points in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 2), 2..=8)) {
            let g = ConnectivityGraph::complete(points.len());
            let d = ward_constrained_points(&points, &g).unwrap();
            prop_assert!(same_merges(&members(&d), &brute_force_greedy(&points, &g)));
        }

        #[test]
        fn constrained_matches_brute_force_and_respects_edges(
            points in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 2), 2..=8),
            raw in prop::collection::vec((0usize..8, 0usize..8), 0..14),
        ) {
            let n = points.len();
            let g = ConnectivityGraph::new(n, raw.into_iter().map(|(a, b)| (a % n, b % n)).filter(|(a, b)| a != b)).unwrap();
            let d = ward_constrained_points(&points, &g).unwrap();
            prop_assert_eq!(d.final_clusters(), g.component_count());
            let m = members(&d);
            prop_assert!(same_merges(&m, &brute_force_greedy(&points, &g)));
            for (a, b) in &m {
                prop_assert!(g.edges().iter().any(|&(x, y)| (a.contains(&x) && b.contains(&y)) || (a.contains(&y) && b.contains(&x))));
            }
        }

        #[test]
        fn cuts_are_nested(points in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 2), 2..=12)) {
            let n = points.len();
            let d = ward_constrained_points(&points, &ConnectivityGraph::path(n)).unwrap();
            for k in 2..=n {
                let fine = cut(&d, k).unwrap();
                let coarse = cut(&d, k - 1).unwrap();
                prop_assert_eq!(fine.iter().max().copied(), Some(k));
                for i in 0..n {
                    for j in 0..n {
                        if fine[i] == fine[j] {
                            prop_assert_eq!(coarse[i], coarse[j]);
                        }
                    }
                }
            }
        }
    }
}
