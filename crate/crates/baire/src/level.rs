//! The level graphs `G_{l+1}` on words of length `l+1` over a bounded alphabet.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use crate::digraph::words;
use crate::error::LevelError;
use crate::seq::{dense_seq, fmt_word, Dimension, FinSeq};

/// The block `{s^ω_n i t | i}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fiber {
    pub n: u64,
    pub t: FinSeq,
}

impl Fiber {
    pub fn member(&self, i: u64) -> FinSeq {
        let mut w = dense_seq(Dimension::Omega, self.n);
        w.push(i);
        w.extend_from_slice(&self.t);
        w
    }
}

pub type PathSeq = Vec<FinSeq>;

#[derive(Clone, Debug)]
pub struct LevelGraph {
    len: usize,
    k: u64,
    vertices: Vec<FinSeq>,
    adj: BTreeMap<FinSeq, Vec<FinSeq>>,
    edges: Vec<(FinSeq, FinSeq, Fiber)>,
}

/// `s^ω_{len}`, the root of the level graph on words of length `len`.
pub fn root(len: usize) -> FinSeq {
    dense_seq(Dimension::Omega, len as u64)
}

/// Checks that `k` exceeds every letter of `s^ω_j` for `j <= l`.
pub fn check_alphabet(l: usize, k: u64) -> Result<(), LevelError> {
    for j in 0..=l as u64 {
        if let Some(&letter) = dense_seq(Dimension::Omega, j).iter().find(|&&x| x >= k) {
            return Err(LevelError::AlphabetTooSmall { k, letter, j });
        }
    }
    Ok(())
}

/// Least alphabet bound allowed at level `l + 1`.
pub fn min_alphabet(l: usize) -> u64 {
    (0..=l as u64)
        .flat_map(|j| dense_seq(Dimension::Omega, j))
        .max()
        .map_or(1, |m| m + 1)
}

/// The fiber of the edge `{u, v}` when it is one.
pub fn edge_fiber(u: &[u64], v: &[u64]) -> Option<Fiber> {
    if u.len() != v.len() {
        return None;
    }
    let mut diff = (0..u.len()).filter(|&i| u[i] != v[i]);
    let n = diff.next()?;
    if diff.next().is_some() || (u[n] != 0 && v[n] != 0) {
        return None;
    }
    if u[..n] != dense_seq(Dimension::Omega, n as u64)[..] {
        return None;
    }
    Some(Fiber {
        n: n as u64,
        t: u[n + 1..].to_vec(),
    })
}

impl LevelGraph {
    /// `G_{l+1}` restricted to `{0..k-1}^{l+1}`.
    pub fn build(l: usize, k: u64) -> Result<LevelGraph, LevelError> {
        check_alphabet(l, k)?;
        let len = l + 1;
        let vertices = words(k, len);
        let mut adj: BTreeMap<FinSeq, Vec<FinSeq>> =
            vertices.iter().map(|v| (v.clone(), Vec::new())).collect();
        let mut edges = Vec::new();
        for n in 0..len {
            let s = dense_seq(Dimension::Omega, n as u64);
            for t in words(k, len - n - 1) {
                let fiber = Fiber { n: n as u64, t };
                let center = fiber.member(0);
                for i in 1..k {
                    let leaf = fiber.member(i);
                    adj.get_mut(&center)
                        .expect("center is a vertex")
                        .push(leaf.clone());
                    adj.get_mut(&leaf)
                        .expect("leaf is a vertex")
                        .push(center.clone());
                    edges.push((center.clone(), leaf, fiber.clone()));
                }
            }
            debug_assert!(s.iter().all(|&x| x < k));
        }
        Ok(LevelGraph {
            len,
            k,
            vertices,
            adj,
            edges,
        })
    }

    pub fn level(&self) -> usize {
        self.len
    }

    pub fn alphabet(&self) -> u64 {
        self.k
    }

    pub fn vertices(&self) -> &[FinSeq] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(FinSeq, FinSeq, Fiber)] {
        &self.edges
    }

    pub fn neighbors(&self, v: &[u64]) -> Option<&[FinSeq]> {
        self.adj.get(v).map(|x| x.as_slice())
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.adj.contains_key(v)
    }

    pub fn adjacent(&self, u: &[u64], v: &[u64]) -> bool {
        self.adj.get(u).is_some_and(|ns| ns.iter().any(|w| w == v))
    }

    /// Removes one edge; used to exhibit non-trees.
    pub fn without_edge(&self, index: usize) -> LevelGraph {
        let mut g = self.clone();
        let (u, v, _) = g.edges.remove(index);
        g.adj.get_mut(&u).expect("vertex").retain(|w| *w != v);
        g.adj.get_mut(&v).expect("vertex").retain(|w| *w != u);
        g
    }

    fn check_vertex(&self, v: &[u64]) -> Result<(), LevelError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(LevelError::VertexNotInGraph(fmt_word(v)))
        }
    }

    fn bfs_parents(&self, from: &[u64]) -> BTreeMap<FinSeq, Option<FinSeq>> {
        let mut parent: BTreeMap<FinSeq, Option<FinSeq>> = BTreeMap::new();
        parent.insert(from.to_vec(), None);
        let mut queue = VecDeque::from([from.to_vec()]);
        while let Some(v) = queue.pop_front() {
            for w in &self.adj[&v] {
                if !parent.contains_key(w) {
                    parent.insert(w.clone(), Some(v.clone()));
                    queue.push_back(w.clone());
                }
            }
        }
        parent
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices.first() {
            None => true,
            Some(v) => self.bfs_parents(v).len() == self.vertices.len(),
        }
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.vertices.len()
    }

    /// Shortest path by breadth-first search.
    pub fn bfs_path(&self, s: &[u64], s2: &[u64]) -> Result<PathSeq, LevelError> {
        self.check_vertex(s)?;
        self.check_vertex(s2)?;
        let parent = self.bfs_parents(s);
        if !parent.contains_key(s2) {
            return Err(LevelError::Disconnected(fmt_word(s), fmt_word(s2)));
        }
        let mut path = vec![s2.to_vec()];
        while let Some(Some(p)) = parent.get(path.last().expect("nonempty")) {
            path.push(p.clone());
        }
        path.reverse();
        Ok(path)
    }

    /// The path given by the recursion on the last letter.
    pub fn unique_path(&self, s: &[u64], s2: &[u64]) -> Result<PathSeq, LevelError> {
        self.check_vertex(s)?;
        self.check_vertex(s2)?;
        Ok(path_between(s, s2))
    }

    /// Checks that `p` is a path of this graph.
    pub fn check_path(&self, p: &[FinSeq]) -> Result<(), LevelError> {
        for v in p {
            self.check_vertex(v)?;
        }
        for (i, pair) in p.windows(2).enumerate() {
            if !self.adjacent(&pair[0], &pair[1]) {
                return Err(LevelError::NotAPath(format!("step {i} is not an edge")));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in p {
            if !seen.insert(v) {
                return Err(LevelError::NotAPath(format!("{} repeats", fmt_word(v))));
            }
        }
        Ok(())
    }

    /// Groups the edges of `p` by fiber; each group comes with the vertex
    /// through which the path enters it.
    pub fn fiber_decompose(&self, p: &[FinSeq]) -> Result<Vec<(Fiber, FinSeq)>, LevelError> {
        self.check_path(p)?;
        Ok(decompose(p))
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph G{} {{", self.len);
        for v in &self.vertices {
            let _ = writeln!(out, "  \"{}\";", fmt_word(v));
        }
        for (u, v, f) in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\" [label=\"n={} t={}\"];",
                fmt_word(u),
                fmt_word(v),
                f.n,
                fmt_word(&f.t)
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Fiber groups of a path given as a vertex list, with entry vertices.
pub fn decompose(p: &[FinSeq]) -> Vec<(Fiber, FinSeq)> {
    let mut out: Vec<(Fiber, FinSeq)> = Vec::new();
    for pair in p.windows(2) {
        let f = edge_fiber(&pair[0], &pair[1]).expect("consecutive vertices span an edge");
        match out.last() {
            Some((g, _)) if *g == f => {}
            _ => out.push((f, pair[0].clone())),
        }
    }
    out
}

/// The unique path from `s` to `s2` in the infinite graph on words of their
/// common length, computed by recursion on the last letter.
pub fn path_between(s: &[u64], s2: &[u64]) -> PathSeq {
    assert_eq!(s.len(), s2.len(), "vertices of one level");
    assert!(!s.is_empty(), "levels start at 1");
    let len = s.len();
    if len == 1 {
        let (i, j) = (s[0], s2[0]);
        return if i == j {
            vec![vec![i]]
        } else if i != 0 && j != 0 {
            vec![vec![i], vec![0], vec![j]]
        } else {
            vec![vec![i], vec![j]]
        };
    }
    let (a, i) = (&s[..len - 1], s[len - 1]);
    let (b, j) = (&s2[..len - 1], s2[len - 1]);
    let with = |p: PathSeq, x: u64| -> PathSeq {
        p.into_iter()
            .map(|mut v| {
                v.push(x);
                v
            })
            .collect()
    };
    if i == j {
        return with(path_between(a, b), i);
    }
    let r = root(len - 1);
    let mut out = with(path_between(a, &r), i);
    if i != 0 && j != 0 {
        let mut hub = r.clone();
        hub.push(0);
        out.push(hub);
    }
    out.extend(with(path_between(&r, b), j));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: &[u64], v: &[u64]) -> (FinSeq, FinSeq) {
        (u.to_vec(), v.to_vec())
    }

    #[test]
    fn level_one_star() {
        let g = LevelGraph::build(0, 3).unwrap();
        let es: Vec<_> = g
            .edges()
            .iter()
            .map(|(u, v, _)| (u.clone(), v.clone()))
            .collect();
        assert_eq!(es, vec![e(&[0], &[1]), e(&[0], &[2])]);
        assert!(g.is_tree());
    }

    #[test]
    fn level_two_small() {
        let g = LevelGraph::build(1, 2).unwrap();
        let mut es: Vec<_> = g
            .edges()
            .iter()
            .map(|(u, v, _)| (u.clone(), v.clone()))
            .collect();
        es.sort();
        assert_eq!(
            es,
            vec![
                e(&[0, 0], &[0, 1]),
                e(&[0, 0], &[1, 0]),
                e(&[0, 1], &[1, 1])
            ]
        );
        assert!(g.is_tree());
        assert!(!g.without_edge(0).is_tree());
    }

    #[test]
    fn alphabet_closure() {
        let g = LevelGraph::build(1, 1).unwrap();
        assert_eq!(g.vertices().len(), 1);
        assert!(g.edges().is_empty());
        assert!(matches!(
            LevelGraph::build(2, 1),
            Err(LevelError::AlphabetTooSmall { .. })
        ));
        assert_eq!(min_alphabet(0), 1);
        assert_eq!(min_alphabet(2), 2);
        assert_eq!(min_alphabet(4), 3);
    }

    #[test]
    fn level_one_paths() {
        let g = LevelGraph::build(0, 3).unwrap();
        assert_eq!(
            g.unique_path(&[1], &[2]).unwrap(),
            vec![vec![1], vec![0], vec![2]]
        );
        assert_eq!(g.unique_path(&[2], &[2]).unwrap(), vec![vec![2]]);
        assert_eq!(g.bfs_path(&[0], &[2]).unwrap(), vec![vec![0], vec![2]]);
        assert!(matches!(
            g.unique_path(&[3], &[2]),
            Err(LevelError::VertexNotInGraph(_))
        ));
    }

    #[test]
    fn level_two_path_through_both_nonzero_case() {
        let g = LevelGraph::build(1, 2).unwrap();
        let p = g.unique_path(&[1, 0], &[1, 1]).unwrap();
        assert_eq!(p, vec![vec![1, 0], vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(p, g.bfs_path(&[1, 0], &[1, 1]).unwrap());
        let g3 = LevelGraph::build(1, 3).unwrap();
        let q = g3.unique_path(&[1, 1], &[2, 2]).unwrap();
        assert_eq!(
            q,
            vec![vec![1, 1], vec![0, 1], vec![0, 0], vec![0, 2], vec![2, 2]]
        );
        assert_eq!(q, g3.bfs_path(&[1, 1], &[2, 2]).unwrap());
    }

    #[test]
    fn decompositions() {
        let g = LevelGraph::build(0, 3).unwrap();
        assert!(g.fiber_decompose(&[vec![0]]).unwrap().is_empty());
        let d = g.fiber_decompose(&[vec![0], vec![2]]).unwrap();
        assert_eq!(d, vec![(Fiber { n: 0, t: vec![] }, vec![0])]);
        let d = g.fiber_decompose(&[vec![1], vec![0], vec![2]]).unwrap();
        assert_eq!(d, vec![(Fiber { n: 0, t: vec![] }, vec![1])]);
        assert!(matches!(
            g.fiber_decompose(&[vec![1], vec![2]]),
            Err(LevelError::NotAPath(_))
        ));
    }

    #[test]
    fn edge_fibers() {
        assert_eq!(
            edge_fiber(&[1, 0, 0], &[1, 0, 3]),
            Some(Fiber { n: 2, t: vec![] })
        );
        assert_eq!(edge_fiber(&[0, 1, 0], &[0, 1, 3]), None);
        assert_eq!(edge_fiber(&[0, 2], &[0, 1]), None);
    }

    #[test]
    fn dot_labels_fibers() {
        let dot = LevelGraph::build(1, 2).unwrap().to_dot();
        assert!(dot.starts_with("graph G2 {"));
        assert!(dot.contains("\"[0,0]\" -- \"[0,1]\" [label=\"n=1 t=[]\"];"));
    }
}
