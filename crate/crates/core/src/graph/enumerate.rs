//! Exhaustive enumeration of small graphs up to isomorphism.
//!
//! Graphs on `n` vertices are grown from all graphs on `n - 1` vertices by
//! attaching a new vertex to every subset of the old ones, then deduplicated
//! by a canonical code: the smallest upper-triangle bit string over all
//! vertex orders that sort vertices by an isomorphism-invariant key.

use std::collections::BTreeSet;

use super::generate::weighted_from_edges;
use super::{GraphError, Weighting, WeightedGraph};

const MAX_ENUMERATED_VERTICES: usize = 8;

#[derive(Clone)]
struct SmallGraph {
    n: usize,
    adj: Vec<u16>,
}

impl SmallGraph {
    fn has(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    fn degree(&self, v: usize) -> u32 {
        self.adj[v].count_ones()
    }

    fn connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut seen: u16 = 1;
        let mut frontier: u16 = 1;
        while frontier != 0 {
            let mut next = 0;
            for v in 0..self.n {
                if frontier >> v & 1 == 1 {
                    next |= self.adj[v];
                }
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen.count_ones() as usize == self.n
    }

    fn code(&self, order: &[usize]) -> u64 {
        let mut code = 0u64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                code = code << 1 | u64::from(self.has(order[i], order[j]));
            }
        }
        code
    }

    /// Canonical code plus the vertex order that attains it.
    fn canonical(&self) -> (u64, Vec<usize>) {
        let key = |v: usize| {
            let mut nd: Vec<u32> = (0..self.n)
                .filter(|&u| self.has(v, u))
                .map(|u| self.degree(u))
                .collect();
            nd.sort_unstable();
            (self.degree(v), nd)
        };
        let keys: Vec<_> = (0..self.n).map(key).collect();
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 1..=self.n {
            if i == self.n || keys[order[i]] != keys[order[start]] {
                blocks.push((start, i));
                start = i;
            }
        }
        let mut best = (self.code(&order), order.clone());
        loop {
            // Odometer over per-block permutations.
            let mut advanced = false;
            for &(s, e) in blocks.iter().rev() {
                if next_permutation(&mut order[s..e]) {
                    advanced = true;
                    break;
                }
                order[s..e].sort_unstable();
            }
            if !advanced {
                break;
            }
            let c = self.code(&order);
            if c < best.0 {
                best = (c, order.clone());
            }
        }
        best
    }
}

fn next_permutation(s: &mut [usize]) -> bool {
    if s.len() < 2 {
        return false;
    }
    let mut i = s.len() - 1;
    while i > 0 && s[i - 1] >= s[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = s.len() - 1;
    while s[j] <= s[i - 1] {
        j -= 1;
    }
    s.swap(i - 1, j);
    s[i..].reverse();
    true
}

/// All connected graphs with `2..=max_vertices` vertices up to isomorphism,
/// in unit weighting, ordered by vertex count, then edge count, then
/// canonical code. Vertex ids are `"0"`, `"1"`, ...
pub fn connected_graphs(max_vertices: usize) -> Result<Vec<WeightedGraph>, GraphError> {
    if max_vertices > MAX_ENUMERATED_VERTICES {
        return Err(GraphError::InvalidSize(format!(
            "exhaustive enumeration supports at most {MAX_ENUMERATED_VERTICES} vertices"
        )));
    }
    let mut out = Vec::new();
    let mut layer = vec![SmallGraph { n: 1, adj: vec![0] }];
    for n in 2..=max_vertices {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &layer {
            for subset in 0u16..(1 << (n - 1)) {
                let mut adj = g.adj.clone();
                adj.push(subset);
                for (v, a) in adj.iter_mut().enumerate().take(n - 1) {
                    if subset >> v & 1 == 1 {
                        *a |= 1 << (n - 1);
                    }
                }
                let h = SmallGraph { n, adj };
                let (code, order) = h.canonical();
                if seen.insert(code) {
                    next.push((code, order, h));
                }
            }
        }
        let mut connected: Vec<_> = next
            .iter()
            .filter(|(_, _, h)| h.connected())
            .map(|(code, order, h)| {
                let edges = h.adj.iter().map(|a| a.count_ones()).sum::<u32>() / 2;
                (edges, *code, order, h)
            })
            .collect();
        connected.sort_by_key(|(edges, code, _, _)| (*edges, *code));
        for (_, _, order, h) in connected {
            let mut position = vec![0; n];
            for (i, &v) in order.iter().enumerate() {
                position[v] = i;
            }
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if h.has(i, j) {
                        let (a, b) = (position[i], position[j]);
                        edges.push((a.min(b), a.max(b)));
                    }
                }
            }
            edges.sort_unstable();
            let ids = (0..n).map(|i| i.to_string()).collect();
            out.push(weighted_from_edges(ids, &edges, Weighting::Unit)?);
        }
        layer = next.into_iter().map(|(_, _, h)| h).collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequence() {
        // Connected unlabeled graphs on n vertices: 1, 2, 6, 21, 112 for n = 2..6.
        let all = connected_graphs(6).unwrap();
        let count = |n: usize| all.iter().filter(|g| g.num_vertices() == n).count();
        assert_eq!(
            [count(2), count(3), count(4), count(5), count(6)],
            [1, 2, 6, 21, 112]
        );
        assert!(all.iter().all(WeightedGraph::is_connected));
    }

    #[test]
    fn two_vertices_is_only_k2() {
        let all = connected_graphs(2).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].num_edges(), 1);
    }

    #[test]
    fn rejects_oversized_requests() {
        assert!(connected_graphs(9).is_err());
    }
}
