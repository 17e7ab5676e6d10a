//! Depth-bounded windows onto the digraphs `A_d`: membership witnesses,
//! hyperedges on prefix vertices, discreteness and colorings.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::DigraphError;
use crate::point::TailPoint;
use crate::seq::{dense_seq, fmt_word, Dimension, FinSeq};

/// `(n, tail)` standing for the tuple `(s^d_n i tail)_i`.
#[derive(Clone, Debug)]
pub struct AdWitness {
    pub n: u64,
    pub tail: TailPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationSpec {
    pub d: Dimension,
    /// Letter bound; equals `d` for finite dimensions.
    pub k: u64,
    pub depth: usize,
}

impl TruncationSpec {
    pub fn new(d: Dimension, k: u64, depth: usize) -> Result<Self, DigraphError> {
        match d {
            Dimension::Finite(dd) if dd != k => {
                return Err(DigraphError::BadSpec(format!("k = {k} but d = {dd}")))
            }
            _ => {}
        }
        if k < 2 {
            return Err(DigraphError::BadSpec(format!("alphabet bound {k} < 2")));
        }
        Ok(TruncationSpec { d, k, depth })
    }

    pub fn finite(d: u64, depth: usize) -> Result<Self, DigraphError> {
        let dim = Dimension::finite(d).map_err(|e| DigraphError::BadSpec(e.to_string()))?;
        Self::new(dim, d, depth)
    }

    /// Number of coordinates of a hyperedge inside the window.
    pub fn arity(&self) -> u64 {
        match self.d {
            Dimension::Finite(d) => d.min(self.k),
            Dimension::Omega => self.k,
        }
    }

    pub fn vertex_count(&self) -> Option<u64> {
        self.k.checked_pow(u32::try_from(self.depth).ok()?)
    }

    /// All words of length `depth` over `0..k`, in lexicographic order.
    pub fn vertices(&self) -> Vec<FinSeq> {
        words(self.k, self.depth)
    }
}

/// All words of length `len` over `0..k`, lexicographically.
pub fn words(k: u64, len: usize) -> Vec<FinSeq> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * k as usize);
        for w in &out {
            for a in 0..k {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperedge {
    pub vertices: Vec<FinSeq>,
    pub n: u64,
    pub t: FinSeq,
}

pub type Coloring = BTreeMap<FinSeq, u64>;

/// Coordinate `i` of the tuple coded by `w`.
pub fn tuple_from_witness(d: Dimension, w: &AdWitness, i: u64) -> Result<TailPoint, DigraphError> {
    if let Dimension::Finite(dd) = d {
        if i >= dd {
            return Err(DigraphError::IndexOutOfDimension { index: i, dim: dd });
        }
    }
    let mut word = dense_seq(d, w.n);
    word.push(i);
    word.extend_from_slice(w.tail.word());
    Ok(TailPoint::new(
        word,
        Arc::clone(w.tail.base()),
        w.tail.drop(),
    ))
}

/// Recovers `(n, tail)` from the first `probe_count` coordinates of a tuple.
pub fn witness_from_tuple(
    d: Dimension,
    xs: &[TailPoint],
    probe_count: usize,
) -> Result<Option<AdWitness>, DigraphError> {
    if xs.len() < 2 {
        return Ok(None);
    }
    for x in xs {
        if !x.base().same_as(xs[0].base()) {
            return Err(DigraphError::DifferentBases);
        }
    }
    let n = match xs[0].first_difference(&xs[1]) {
        Ok(Some(n)) => n,
        Ok(None) => return Ok(None),
        Err(_) => return Ok(None),
    };
    let s = dense_seq(d, n);
    if xs[0].prefix(n)? != s {
        return Ok(None);
    }
    let probes = probe_count.max(2).min(xs.len());
    for (i, x) in xs.iter().enumerate().take(probes) {
        let i = i as u64;
        if !d.admits(i) {
            return Ok(None);
        }
        if !xs[0].substitute(n, i).same_point(x)? {
            return Ok(None);
        }
    }
    let x0 = &xs[0];
    // tail = x0 with its first n+1 letters removed
    let cut = (n + 1) as usize;
    let tail = if cut <= x0.word().len() {
        TailPoint::new(x0.word()[cut..].to_vec(), Arc::clone(x0.base()), x0.drop())
    } else {
        let extra = cut as u64 - x0.word().len() as u64;
        TailPoint::new(Vec::new(), Arc::clone(x0.base()), x0.drop() + extra)
    };
    Ok(Some(AdWitness { n, tail }))
}

/// Every hyperedge of the window, `n` ascending then `t` lexicographic.
pub fn enumerate_edges(spec: &TruncationSpec) -> Vec<Hyperedge> {
    let mut out = Vec::new();
    let arity = spec.arity();
    for n in 0..spec.depth {
        let s = dense_seq(spec.d, n as u64);
        if s.iter().any(|&x| x >= spec.k) {
            continue;
        }
        for t in words(spec.k, spec.depth - n - 1) {
            let vertices = (0..arity)
                .map(|i| {
                    let mut v = s.clone();
                    v.push(i);
                    v.extend_from_slice(&t);
                    v
                })
                .collect();
            out.push(Hyperedge {
                vertices,
                n: n as u64,
                t,
            });
        }
    }
    out
}

pub fn is_discrete(spec: &TruncationSpec, c: &BTreeSet<FinSeq>) -> bool {
    enumerate_edges(spec)
        .iter()
        .all(|e| !e.vertices.iter().all(|v| c.contains(v)))
}

fn colors_of<'a>(c: &'a Coloring, e: &Hyperedge) -> Result<Vec<&'a u64>, DigraphError> {
    e.vertices
        .iter()
        .map(|v| {
            c.get(v)
                .ok_or_else(|| DigraphError::MissingVertex(fmt_word(v)))
        })
        .collect()
}

/// No hyperedge is monochromatic. Every vertex of the window must be colored.
pub fn verify_coloring(spec: &TruncationSpec, c: &Coloring) -> Result<bool, DigraphError> {
    for v in spec.vertices() {
        if !c.contains_key(&v) {
            return Err(DigraphError::MissingVertex(fmt_word(&v)));
        }
    }
    for e in enumerate_edges(spec) {
        let cols = colors_of(c, &e)?;
        if cols.iter().all(|&x| x == cols[0]) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub const DEFAULT_VERTEX_BOUND: u64 = 4096;

/// Least number of colors admitting a coloring of the window.
pub fn brute_chromatic(spec: &TruncationSpec, vertex_bound: u64) -> Result<u64, DigraphError> {
    let count = spec.vertex_count().unwrap_or(u64::MAX);
    if count > vertex_bound {
        return Err(DigraphError::TooLarge {
            vertices: count,
            bound: vertex_bound,
        });
    }
    let verts = spec.vertices();
    let index: BTreeMap<&FinSeq, usize> = verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let edges: Vec<Vec<usize>> = enumerate_edges(spec)
        .iter()
        .map(|e| e.vertices.iter().map(|v| index[v]).collect())
        .collect();
    if edges.is_empty() {
        return Ok(1);
    }
    let mut c = 2;
    loop {
        if colorable(verts.len(), &edges, c) {
            return Ok(c);
        }
        c += 1;
    }
}

/// Backtracking search. Vertices are visited along the edge structure so a
/// conflict shows up as soon as an edge is fully colored; new colors are only
/// opened in order, which removes color-permutation symmetry.
fn colorable(nv: usize, edges: &[Vec<usize>], colors: u64) -> bool {
    let order = visit_order(nv, edges);
    let mut pos = vec![0usize; nv];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    // edges checked at the moment their last vertex in `order` is colored
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (ei, e) in edges.iter().enumerate() {
        let last = *e
            .iter()
            .max_by_key(|&&v| pos[v])
            .expect("edges are nonempty");
        closing[last].push(ei);
    }
    let mut col = vec![u64::MAX; nv];
    fn go(
        p: usize,
        order: &[usize],
        col: &mut Vec<u64>,
        used: u64,
        colors: u64,
        edges: &[Vec<usize>],
        closing: &[Vec<usize>],
    ) -> bool {
        if p == order.len() {
            return true;
        }
        let v = order[p];
        let top = (used + 1).min(colors);
        for c in 0..top {
            col[v] = c;
            let ok = closing[v].iter().all(|&ei| {
                let e = &edges[ei];
                !e.iter().all(|&u| col[u] == c)
            });
            if ok && go(p + 1, order, col, used.max(c + 1), colors, edges, closing) {
                return true;
            }
        }
        col[v] = u64::MAX;
        false
    }
    go(0, &order, &mut col, 0, colors, edges, &closing)
}

fn visit_order(nv: usize, edges: &[Vec<usize>]) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for e in edges {
        for &u in e {
            for &w in e {
                if u != w {
                    adj[u].push(w);
                }
            }
        }
    }
    let mut seen = vec![false; nv];
    let mut order = Vec::with_capacity(nv);
    for s in 0..nv {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

/// Colors each vertex by the index of the part containing it.
pub fn coloring_from_partition(
    spec: &TruncationSpec,
    parts: &[BTreeSet<FinSeq>],
) -> Result<Coloring, DigraphError> {
    let mut c = Coloring::new();
    for (i, part) in parts.iter().enumerate() {
        for v in part {
            if v.len() != spec.depth || v.iter().any(|&x| x >= spec.k) {
                return Err(DigraphError::NotAPartition(format!(
                    "{} is not a vertex",
                    fmt_word(v)
                )));
            }
            if c.insert(v.clone(), i as u64).is_some() {
                return Err(DigraphError::NotAPartition(format!(
                    "{} lies in two parts",
                    fmt_word(v)
                )));
            }
        }
    }
    for v in spec.vertices() {
        if !c.contains_key(&v) {
            return Err(DigraphError::NotAPartition(format!(
                "{} lies in no part",
                fmt_word(&v)
            )));
        }
    }
    for (i, part) in parts.iter().enumerate() {
        if !is_discrete(spec, part) {
            return Err(DigraphError::PartNotDiscrete(i));
        }
    }
    Ok(c)
}

/// The classes of a coloring, color 0 first.
pub fn partition_of(c: &Coloring) -> Vec<BTreeSet<FinSeq>> {
    let top = c.values().copied().max().map_or(0, |m| m + 1);
    let mut parts = vec![BTreeSet::new(); top as usize];
    for (v, &col) in c {
        parts[col as usize].insert(v.clone());
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::BasePoint;

    fn set(ws: &[&[u64]]) -> BTreeSet<FinSeq> {
        ws.iter().map(|w| w.to_vec()).collect()
    }

    #[test]
    fn tuple_coordinates() {
        let b = BasePoint::canonical(0);
        let tail = TailPoint::new(vec![4, 4], b.clone(), 9);
        let w = AdWitness {
            n: 0,
            tail: tail.clone(),
        };
        let x = tuple_from_witness(Dimension::Omega, &w, 3).unwrap();
        assert_eq!(x.prefix(3).unwrap(), vec![3, 4, 4]);
        let w2 = AdWitness { n: 2, tail };
        let y = tuple_from_witness(Dimension::Omega, &w2, 0).unwrap();
        assert_eq!(y.prefix(3).unwrap(), vec![1, 0, 0]);
        assert!(matches!(
            tuple_from_witness(Dimension::Finite(3), &w2, 3),
            Err(DigraphError::IndexOutOfDimension { .. })
        ));
    }

    #[test]
    fn witness_round_trip_and_rejections() {
        let b = BasePoint::canonical(0);
        let tail = TailPoint::new(vec![2, 0, 1], b.clone(), 4);
        let w = AdWitness { n: 3, tail };
        let xs: Vec<_> = (0..5)
            .map(|i| tuple_from_witness(Dimension::Omega, &w, i).unwrap())
            .collect();
        let got = witness_from_tuple(Dimension::Omega, &xs, 5)
            .unwrap()
            .unwrap();
        assert_eq!(got.n, 3);
        assert!(got.tail.same_point(&w.tail).unwrap());

        let constant = vec![xs[0].clone(), xs[0].clone(), xs[0].clone()];
        assert!(witness_from_tuple(Dimension::Omega, &constant, 3)
            .unwrap()
            .is_none());

        let g = TailPoint::of_base(b.clone());
        let fam: Vec<_> = (0..3).map(|i| g.substitute(0, i)).collect();
        let fw = witness_from_tuple(Dimension::Omega, &fam, 3)
            .unwrap()
            .unwrap();
        assert_eq!(fw.n, 0);

        let other = TailPoint::of_base(BasePoint::canonical(2));
        assert_eq!(
            witness_from_tuple(Dimension::Omega, &[g, other], 2).unwrap_err(),
            DigraphError::DifferentBases
        );
    }

    #[test]
    fn edge_examples() {
        let s1 = TruncationSpec::finite(2, 1).unwrap();
        let e = enumerate_edges(&s1);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].vertices, vec![vec![0], vec![1]]);
        let s2 = TruncationSpec::finite(2, 2).unwrap();
        let e = enumerate_edges(&s2);
        let w: Vec<_> = e.iter().map(|h| (h.n, h.t.clone())).collect();
        assert_eq!(w, vec![(0, vec![0]), (0, vec![1]), (1, vec![])]);
        assert_eq!(e[2].vertices, vec![vec![0, 0], vec![0, 1]]);
        assert!(enumerate_edges(&TruncationSpec::finite(2, 0).unwrap()).is_empty());
    }

    #[test]
    fn discreteness() {
        let s = TruncationSpec::finite(2, 1).unwrap();
        assert!(is_discrete(&s, &set(&[&[0]])));
        assert!(!is_discrete(&s, &set(&[&[0], &[1]])));
        assert!(is_discrete(&s, &BTreeSet::new()));
    }

    #[test]
    fn colorings() {
        let s = TruncationSpec::finite(2, 2).unwrap();
        let inj: Coloring = s
            .vertices()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i as u64))
            .collect();
        assert!(verify_coloring(&s, &inj).unwrap());
        let constant: Coloring = s.vertices().into_iter().map(|v| (v, 0)).collect();
        assert!(!verify_coloring(&s, &constant).unwrap());
        let s0 = TruncationSpec::finite(2, 0).unwrap();
        let c0: Coloring = s0.vertices().into_iter().map(|v| (v, 0)).collect();
        assert!(verify_coloring(&s0, &c0).unwrap());
        let mut partial = inj.clone();
        partial.remove(&vec![1, 1]);
        assert!(matches!(
            verify_coloring(&s, &partial),
            Err(DigraphError::MissingVertex(_))
        ));
    }

    #[test]
    fn chromatic_examples() {
        assert_eq!(
            brute_chromatic(&TruncationSpec::finite(2, 0).unwrap(), 4096).unwrap(),
            1
        );
        assert_eq!(
            brute_chromatic(&TruncationSpec::finite(2, 2).unwrap(), 4096).unwrap(),
            2
        );
        assert_eq!(
            brute_chromatic(&TruncationSpec::finite(3, 2).unwrap(), 4096).unwrap(),
            2
        );
        assert!(matches!(
            brute_chromatic(&TruncationSpec::finite(3, 9).unwrap(), 4096),
            Err(DigraphError::TooLarge { .. })
        ));
    }

    #[test]
    fn partitions() {
        let s = TruncationSpec::finite(2, 1).unwrap();
        let singles = vec![set(&[&[0]]), set(&[&[1]])];
        let c = coloring_from_partition(&s, &singles).unwrap();
        assert!(verify_coloring(&s, &c).unwrap());
        assert_eq!(
            coloring_from_partition(&s, &[set(&[&[0], &[1]])]).unwrap_err(),
            DigraphError::PartNotDiscrete(0)
        );
        assert!(matches!(
            coloring_from_partition(&s, &[set(&[&[0]])]),
            Err(DigraphError::NotAPartition(_))
        ));
        let s2 = TruncationSpec::finite(2, 3).unwrap();
        let parity: Coloring = s2
            .vertices()
            .into_iter()
            .map(|v| {
                let c = v.iter().sum::<u64>() % 2;
                (v, c)
            })
            .collect();
        let again = coloring_from_partition(&s2, &partition_of(&parity)).unwrap();
        assert_eq!(again, parity);
    }
}
