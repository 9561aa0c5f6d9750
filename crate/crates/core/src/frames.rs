//! Finite Kripke frames with a single accessibility relation, read both
//! forwards (future) and backwards (past).
//!
//! Points are addressed by index in declaration order. Relations are stored
//! as successor and predecessor bitsets so that set-level operations used by
//! the semantics and the morphism search stay cheap.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the number of points in a frame.
pub const MAX_POINTS: usize = 256;

const WORDS: usize = MAX_POINTS / 64;

/// Fixed-capacity bitset over point indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct PointSet([u64; WORDS]);

impl PointSet {
    pub const EMPTY: PointSet = PointSet([0; WORDS]);

    pub fn singleton(i: usize) -> Self {
        let mut s = Self::EMPTY;
        s.insert(i);
        s
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut s = Self::EMPTY;
        for w in 0..WORDS {
            let lo = w * 64;
            if n >= lo + 64 {
                s.0[w] = u64::MAX;
            } else if n > lo {
                s.0[w] = (1u64 << (n - lo)) - 1;
            }
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < MAX_POINTS && self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        self.0.iter().zip(other.0.iter()).any(|(a, b)| a & b != 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> PointIter {
        PointIter { words: self.0, word: 0 }
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct PointIter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for PointIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.word] &= w - 1;
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
        }
        None
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl BitOr for PointSet {
    type Output = PointSet;
    fn bitor(mut self, rhs: PointSet) -> PointSet {
        self |= rhs;
        self
    }
}

impl BitOrAssign for PointSet {
    fn bitor_assign(&mut self, rhs: PointSet) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a |= b;
        }
    }
}

impl BitAnd for PointSet {
    type Output = PointSet;
    fn bitand(mut self, rhs: PointSet) -> PointSet {
        self &= rhs;
        self
    }
}

impl BitAndAssign for PointSet {
    fn bitand_assign(&mut self, rhs: PointSet) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a &= b;
        }
    }
}

impl Sub for PointSet {
    type Output = PointSet;
    fn sub(mut self, rhs: PointSet) -> PointSet {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a &= !b;
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Closure {
    /// The relation is exactly the listed edges.
    None,
    /// The listed edges generate a preorder.
    ReflexiveTransitive,
}

/// Radius of a zigzag ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Radius {
    Finite(u32),
    Omega,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("duplicate point name `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("frame has {0} points, the limit is {MAX_POINTS}")]
    TooManyPoints(usize),
    #[error("a frame needs at least one point")]
    Empty,
}

#[derive(Clone, Debug)]
pub struct Frame {
    names: Vec<String>,
    index: HashMap<String, usize>,
    succ: Vec<PointSet>,
    pred: Vec<PointSet>,
    closure: Closure,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.succ == other.succ && self.closure == other.closure
    }
}

impl Eq for Frame {}

/// Per-point structural parameters of a closed frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PointMetrics {
    pub dep: u32,
    pub wid_f: u32,
    pub wid_b: u32,
    pub zdg: u32,
}

/// Frame-level maxima of the point parameters, plus the largest cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FrameMetrics {
    pub dep: u32,
    pub wid_f: u32,
    pub wid_b: u32,
    pub zdg: u32,
    pub gir: u32,
}

impl Frame {
    /// Builds a frame from point names and edges, closing the relation if
    /// requested.
    pub fn new<S: AsRef<str>, T: AsRef<str>>(
        points: &[S],
        edges: &[(T, T)],
        closure: Closure,
    ) -> Result<Frame, FrameError> {
        let names: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let index = index_names(&names)?;
        let mut succ = vec![PointSet::EMPTY; names.len()];
        for (a, b) in edges {
            let i = *index
                .get(a.as_ref())
                .ok_or_else(|| FrameError::UnknownPoint(a.as_ref().to_string()))?;
            let j = *index
                .get(b.as_ref())
                .ok_or_else(|| FrameError::UnknownPoint(b.as_ref().to_string()))?;
            succ[i].insert(j);
        }
        Ok(Self::assemble(names, index, succ, closure))
    }

    /// Builds a frame from successor sets indexed by point.
    pub fn from_successors(names: Vec<String>, succ: Vec<PointSet>, closure: Closure) -> Result<Frame, FrameError> {
        assert_eq!(names.len(), succ.len());
        let index = index_names(&names)?;
        let full = PointSet::full(names.len());
        let succ = succ.into_iter().map(|s| s & full).collect();
        Ok(Self::assemble(names, index, succ, closure))
    }

    fn assemble(names: Vec<String>, index: HashMap<String, usize>, mut succ: Vec<PointSet>, closure: Closure) -> Frame {
        if closure == Closure::ReflexiveTransitive {
            close_in_place(&mut succ);
        }
        let pred = transpose(&succ);
        Frame {
            names,
            index,
            succ,
            pred,
            closure,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn point(&self, name: &str) -> Result<usize, FrameError> {
        self.index_of(name)
            .ok_or_else(|| FrameError::UnknownPoint(name.to_string()))
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn all(&self) -> PointSet {
        PointSet::full(self.len())
    }

    /// `R[x]`
    pub fn succ(&self, x: usize) -> PointSet {
        self.succ[x]
    }

    /// The converse image `R̆[x]`.
    pub fn pred(&self, x: usize) -> PointSet {
        self.pred[x]
    }

    pub fn relates(&self, x: usize, y: usize) -> bool {
        self.succ[x].contains(y)
    }

    pub fn succ_of_set(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, x| acc | self.succ[x])
    }

    pub fn pred_of_set(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, x| acc | self.pred[x])
    }

    /// Number of pairs in the relation, loops included.
    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(|s| s.len()).sum()
    }

    /// All pairs of the relation as index pairs, in declaration order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|x| self.succ[x].iter().map(move |y| (x, y)))
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        (0..self.len())
            .all(|x| self.succ[x].contains(x) && self.succ[x].iter().all(|y| self.succ[y].is_subset(&self.succ[x])))
    }

    /// The reflexive-transitive closure of this frame.
    pub fn closed(&self) -> Frame {
        Self::assemble(
            self.names.clone(),
            self.index.clone(),
            self.succ.clone(),
            Closure::ReflexiveTransitive,
        )
    }

    fn closed_succ(&self) -> Vec<PointSet> {
        if self.is_closed() {
            self.succ.clone()
        } else {
            let mut s = self.succ.clone();
            close_in_place(&mut s);
            s
        }
    }

    /// One zigzag step: `S ∪ R[S] ∪ R̆[S]`.
    pub fn zigzag_step(&self, s: PointSet) -> PointSet {
        s.iter().fold(s, |acc, x| acc | self.succ[x] | self.pred[x])
    }

    pub fn zigzag_ball(&self, x: usize, radius: Radius) -> PointSet {
        self.zigzag_ball_of(PointSet::singleton(x), radius)
    }

    pub fn zigzag_ball_of(&self, mut s: PointSet, radius: Radius) -> PointSet {
        match radius {
            Radius::Finite(k) => {
                for _ in 0..k {
                    let next = self.zigzag_step(s);
                    if next == s {
                        break;
                    }
                    s = next;
                }
                s
            }
            Radius::Omega => loop {
                let next = self.zigzag_step(s);
                if next == s {
                    return s;
                }
                s = next;
            },
        }
    }

    /// Least `k` with `R♯ᵏ[x] = R♯ᵏ⁺¹[x]`.
    pub fn zigzag_degree(&self, x: usize) -> u32 {
        let mut s = PointSet::singleton(x);
        let mut k = 0;
        loop {
            let next = self.zigzag_step(s);
            if next == s {
                return k;
            }
            s = next;
            k += 1;
        }
    }

    pub fn is_rooted(&self) -> bool {
        !self.is_empty() && self.zigzag_ball(0, Radius::Omega) == self.all()
    }

    /// Clusters `R[x] ∩ R̆[x]` of the reflexive-transitive closure, ordered
    /// by their first member.
    pub fn clusters(&self) -> Vec<PointSet> {
        let succ = self.closed_succ();
        let pred = transpose(&succ);
        let mut seen = PointSet::EMPTY;
        let mut out = Vec::new();
        for x in 0..self.len() {
            if !seen.contains(x) {
                let c = succ[x] & pred[x];
                seen |= c;
                out.push(c);
            }
        }
        out
    }

    pub fn cluster_of(&self, x: usize) -> PointSet {
        let succ = self.closed_succ();
        let pred = transpose(&succ);
        succ[x] & pred[x]
    }

    /// Quotient by clusters. Each cluster is named after its first member.
    /// Returns the skeleton and the map from points to skeleton indices.
    pub fn skeleton(&self) -> (Frame, Vec<usize>) {
        let clusters = self.clusters();
        let mut map = vec![0; self.len()];
        for (ci, c) in clusters.iter().enumerate() {
            for x in c.iter() {
                map[x] = ci;
            }
        }
        let succ_full = self.closed_succ();
        let mut succ = vec![PointSet::EMPTY; clusters.len()];
        for x in 0..self.len() {
            for y in succ_full[x].iter() {
                succ[map[x]].insert(map[y]);
            }
        }
        let names = clusters
            .iter()
            .map(|c| self.names[c.first().unwrap()].clone())
            .collect();
        let sk = Frame::from_successors(names, succ, Closure::ReflexiveTransitive)
            .expect("cluster representatives have distinct names");
        (sk, map)
    }

    pub fn is_skeleton(&self) -> bool {
        self.clusters().iter().all(|c| c.len() == 1)
    }

    /// Structural parameters at every point, computed on the
    /// reflexive-transitive closure (the zigzag degree uses the relation
    /// as given).
    pub fn point_metrics(&self) -> Vec<PointMetrics> {
        let succ = self.closed_succ();
        let pred = transpose(&succ);
        let depth = depths(&succ, &pred);
        let comparable: Vec<PointSet> = (0..self.len()).map(|x| succ[x] | pred[x]).collect();
        let mut memo = HashMap::new();
        (0..self.len())
            .map(|x| PointMetrics {
                dep: depth[x],
                wid_f: max_antichain(succ[x], &comparable, &mut memo) as u32,
                wid_b: max_antichain(pred[x], &comparable, &mut memo) as u32,
                zdg: self.zigzag_degree(x),
            })
            .collect()
    }

    pub fn metrics(&self) -> FrameMetrics {
        let pm = self.point_metrics();
        FrameMetrics {
            dep: pm.iter().map(|m| m.dep).max().unwrap_or(0),
            wid_f: pm.iter().map(|m| m.wid_f).max().unwrap_or(0),
            wid_b: pm.iter().map(|m| m.wid_b).max().unwrap_or(0),
            zdg: pm.iter().map(|m| m.zdg).max().unwrap_or(0),
            gir: self.clusters().iter().map(|c| c.len() as u32).max().unwrap_or(0),
        }
    }

    /// Restriction to a set of points, keeping declaration order.
    pub fn induced_subframe(&self, keep: PointSet) -> Frame {
        let idx: Vec<usize> = keep.iter().filter(|&x| x < self.len()).collect();
        let mut pos = vec![usize::MAX; self.len()];
        for (k, &x) in idx.iter().enumerate() {
            pos[x] = k;
        }
        let succ = idx
            .iter()
            .map(|&x| {
                self.succ[x]
                    .iter()
                    .filter(|&y| keep.contains(y))
                    .map(|y| pos[y])
                    .collect()
            })
            .collect::<Vec<PointSet>>();
        let names: Vec<String> = idx.iter().map(|&x| self.names[x].clone()).collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let pred = transpose(&succ);
        Frame {
            names,
            index,
            succ,
            pred,
            closure: self.closure,
        }
    }

    /// The subframe generated by `x` under both directions.
    pub fn generated_subframe(&self, x: usize) -> Frame {
        self.induced_subframe(self.zigzag_ball(x, Radius::Omega))
    }

    /// Same points, converse relation.
    pub fn inverse(&self) -> Frame {
        Frame {
            names: self.names.clone(),
            index: self.index.clone(),
            succ: self.pred.clone(),
            pred: self.succ.clone(),
            closure: self.closure,
        }
    }

    /// Disjoint union. Names are kept unless they clash, in which case both
    /// sides are prefixed with `l.` and `r.`.
    pub fn disjoint_union(&self, other: &Frame) -> Result<Frame, FrameError> {
        let clash = other.names.iter().any(|n| self.index.contains_key(n));
        let (l, r) = if clash { ("l.", "r.") } else { ("", "") };
        let mut names: Vec<String> = self.names.iter().map(|n| format!("{l}{n}")).collect();
        names.extend(other.names.iter().map(|n| format!("{r}{n}")));
        if names.len() > MAX_POINTS {
            return Err(FrameError::TooManyPoints(names.len()));
        }
        let off = self.len();
        let mut succ = self.succ.clone();
        for s in &other.succ {
            succ.push(s.iter().map(|y| y + off).collect());
        }
        let closure = if self.closure == other.closure {
            self.closure
        } else {
            Closure::None
        };
        Frame::from_successors(names, succ, closure)
    }

    /// Renames points, keeping the relation. Used by the catalog.
    pub fn with_names(&self, names: Vec<String>) -> Result<Frame, FrameError> {
        assert_eq!(names.len(), self.len());
        let index = index_names(&names)?;
        Ok(Frame {
            names,
            index,
            succ: self.succ.clone(),
            pred: self.pred.clone(),
            closure: self.closure,
        })
    }
}

fn index_names(names: &[String]) -> Result<HashMap<String, usize>, FrameError> {
    if names.is_empty() {
        return Err(FrameError::Empty);
    }
    if names.len() > MAX_POINTS {
        return Err(FrameError::TooManyPoints(names.len()));
    }
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(FrameError::DuplicatePoint(n.clone()));
        }
    }
    Ok(index)
}

/// Reflexive-transitive closure (Warshall on bitset rows).
pub(crate) fn close_in_place(succ: &mut [PointSet]) {
    let n = succ.len();
    for (x, s) in succ.iter_mut().enumerate() {
        s.insert(x);
    }
    for k in 0..n {
        let row_k = succ[k];
        for s in succ.iter_mut() {
            if s.contains(k) {
                *s |= row_k;
            }
        }
    }
}

pub(crate) fn transpose(succ: &[PointSet]) -> Vec<PointSet> {
    let mut pred = vec![PointSet::EMPTY; succ.len()];
    for (x, s) in succ.iter().enumerate() {
        for y in s.iter() {
            pred[y].insert(x);
        }
    }
    pred
}

/// Length of the longest strict chain starting at each point, for a preorder.
fn depths(succ: &[PointSet], pred: &[PointSet]) -> Vec<u32> {
    fn go(x: usize, succ: &[PointSet], pred: &[PointSet], memo: &mut [u32]) -> u32 {
        if memo[x] != 0 {
            return memo[x];
        }
        let cluster = succ[x] & pred[x];
        let above = succ[x] - cluster;
        let mut best = 0;
        let mut done = PointSet::EMPTY;
        for y in above.iter() {
            if !done.contains(y) {
                done |= succ[y] & pred[y];
                best = best.max(go(y, succ, pred, memo));
            }
        }
        for c in cluster.iter() {
            memo[c] = best + 1;
        }
        best + 1
    }
    let mut memo = vec![0; succ.len()];
    for x in 0..succ.len() {
        go(x, succ, pred, &mut memo);
    }
    memo
}

/// Size of a largest set of pairwise incomparable points inside `cands`.
fn max_antichain(cands: PointSet, comparable: &[PointSet], memo: &mut HashMap<PointSet, usize>) -> usize {
    let Some(v) = cands.first() else { return 0 };
    if let Some(&r) = memo.get(&cands) {
        return r;
    }
    let rest = cands - PointSet::singleton(v);
    let with_v = 1 + max_antichain(rest - comparable[v], comparable, memo);
    let r = if (rest & comparable[v]).is_empty() {
        with_v
    } else {
        with_v.max(max_antichain(rest, comparable, memo))
    };
    memo.insert(cands, r);
    r
}

/// Distinct names, for callers that assemble frames programmatically.
pub(crate) fn fresh_name(taken: &HashSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Frame {
        let pts: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> = (1..n).map(|i| (i.to_string(), (i - 1).to_string())).collect();
        Frame::new(&pts, &edges, Closure::ReflexiveTransitive).unwrap()
    }

    fn garland(n: usize) -> Frame {
        let pts: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let mut edges = Vec::new();
        for i in (1..=n).step_by(2) {
            edges.push((i.to_string(), (i - 1).to_string()));
            if i < n {
                edges.push((i.to_string(), (i + 1).to_string()));
            }
        }
        Frame::new(&pts, &edges, Closure::ReflexiveTransitive).unwrap()
    }

    #[test]
    fn pointset_basics() {
        let s: PointSet = [0, 3, 70, 255].into_iter().collect();
        assert_eq!(s.len(), 4);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 70, 255]);
        assert_eq!(PointSet::full(65).len(), 65);
        assert_eq!(PointSet::full(256).len(), 256);
        assert!(PointSet::singleton(70).is_subset(&s));
        assert_eq!((s - PointSet::full(64)).first(), Some(70));
    }

    #[test]
    fn closure_of_a_two_chain() {
        let f = Frame::new(&["0", "1"], &[("1", "0")], Closure::ReflexiveTransitive).unwrap();
        assert_eq!(f.edges(), vec![(0, 0), (1, 0), (1, 1)]);
        assert!(f.is_closed());
    }

    #[test]
    fn errors() {
        assert_eq!(
            Frame::new(&["a", "a"], &[] as &[(&str, &str)], Closure::None),
            Err(FrameError::DuplicatePoint("a".into()))
        );
        assert_eq!(
            Frame::new(&["a"], &[("a", "b")], Closure::None),
            Err(FrameError::UnknownPoint("b".into()))
        );
    }

    #[test]
    fn garland_balls_and_degree() {
        let g = garland(4);
        let ball = |k| g.zigzag_ball(0, Radius::Finite(k)).iter().collect::<Vec<_>>();
        assert_eq!(ball(0), vec![0]);
        assert_eq!(ball(1), vec![0, 1]);
        assert_eq!(ball(2), vec![0, 1, 2]);
        assert_eq!(g.zigzag_ball(0, Radius::Omega), g.all());
        assert_eq!(g.zigzag_degree(0), 4);
        assert_eq!(g.zigzag_degree(2), 2);
    }

    #[test]
    fn metrics_of_chains_and_garlands() {
        let c3 = chain(3);
        let m = c3.metrics();
        assert_eq!((m.dep, m.wid_f, m.wid_b, m.gir), (3, 1, 1, 1));
        let g = garland(4);
        let m = g.metrics();
        assert_eq!((m.dep, m.wid_f, m.wid_b, m.zdg, m.gir), (2, 2, 2, 4, 1));
    }

    #[test]
    fn clusters_and_skeleton() {
        // root r sees a two-point cluster {a, b} and a single point c
        let f = Frame::new(
            &["r", "a", "b", "c"],
            &[("r", "a"), ("a", "b"), ("b", "a"), ("r", "c")],
            Closure::ReflexiveTransitive,
        )
        .unwrap();
        let sizes: Vec<usize> = f.clusters().iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![1, 2, 1]);
        let (sk, map) = f.skeleton();
        assert_eq!(sk.names(), &["r", "a", "c"]);
        assert_eq!(map, vec![0, 1, 1, 2]);
        assert!(sk.is_skeleton());
        assert_eq!(f.metrics().gir, 2);
    }

    #[test]
    fn inverse_and_union() {
        let g = garland(2);
        let inv = g.inverse();
        assert_eq!(inv.inverse(), g);
        assert!(inv.relates(0, 1));
        let u = g.disjoint_union(&chain(1)).unwrap();
        assert_eq!(u.len(), 4);
        assert_eq!(u.names()[3], "r.0");
        assert!(!u.is_rooted());
        assert_eq!(u.generated_subframe(3).len(), 1);
    }
}
