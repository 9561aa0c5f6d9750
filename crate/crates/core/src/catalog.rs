//! Named frame families: chains, clusters, the four one-point-blown chains,
//! garlands, co-garlands, hoops, windows of the two-way infinite garland,
//! the two small cluster examples, and pre-skeletons in general.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::frames::{fresh_name, Closure, Frame, FrameError, PointSet, MAX_POINTS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("{0} needs a positive size")]
    ZeroSize(&'static str),
    #[error("hoops need an odd size, got {0}")]
    EvenHoop(u32),
    #[error("window [{0}, {1}] is empty")]
    EmptyWindow(i64, i64),
    #[error("pre-skeletons are built from skeleton frames")]
    NotSkeleton,
    #[error("frame is not a pre-skeleton: {0}")]
    NotPreSkeleton(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// The four ways a single blown-up point can sit in a chain of length at
/// most three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CType {
    /// alone
    Circ,
    /// below one point
    Plus,
    /// above one point
    Minus,
    /// between two points
    PlusMinus,
}

impl CType {
    pub const ALL: [CType; 4] = [CType::Circ, CType::Plus, CType::Minus, CType::PlusMinus];

    /// Sizes of the strict future and strict past of the cluster.
    pub fn fingerprint(self) -> (usize, usize) {
        match self {
            CType::Circ => (0, 0),
            CType::Plus => (1, 0),
            CType::Minus => (0, 1),
            CType::PlusMinus => (1, 1),
        }
    }

    pub fn from_fingerprint(fp: (usize, usize)) -> Option<CType> {
        CType::ALL.into_iter().find(|t| t.fingerprint() == fp)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CType::Circ => "o",
            CType::Plus => "+",
            CType::Minus => "-",
            CType::PlusMinus => "+-",
        }
    }
}

impl fmt::Display for CType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogKind {
    Chain(u32),
    /// A cluster with `λ + 1` points.
    Cluster(u32),
    Ct(CType, u32),
    Garland(u32),
    CoGarland(u32),
    Hoop(u32),
    GarlandWindow(i64, i64),
    /// Root below a two-point cluster and two further points.
    Fig1,
    /// Root below a two-point cluster and one further point.
    Fig2,
}

pub fn make(kind: CatalogKind) -> Result<Frame, CatalogError> {
    match kind {
        CatalogKind::Chain(n) => chain(n),
        CatalogKind::Cluster(l) => cluster(l),
        CatalogKind::Ct(t, l) => ct(t, l),
        CatalogKind::Garland(n) => garland(n),
        CatalogKind::CoGarland(n) => co_garland(n),
        CatalogKind::Hoop(n) => hoop(n),
        CatalogKind::GarlandWindow(i, j) => garland_window(i, j),
        CatalogKind::Fig1 => Ok(fig1()),
        CatalogKind::Fig2 => Ok(fig2()),
    }
}

/// `n` points where `i` sees `j` iff `i ≥ j`; the root is `n - 1`.
pub fn chain(n: u32) -> Result<Frame, CatalogError> {
    if n == 0 {
        return Err(CatalogError::ZeroSize("chain"));
    }
    let pts: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let edges: Vec<(String, String)> = (1..n).map(|i| (i.to_string(), (i - 1).to_string())).collect();
    Ok(Frame::new(&pts, &edges, Closure::ReflexiveTransitive)?)
}

pub fn cluster(lambda: u32) -> Result<Frame, CatalogError> {
    preskeleton(&chain(1)?, 0, lambda as usize)
}

pub fn ct(t: CType, lambda: u32) -> Result<Frame, CatalogError> {
    if lambda == 0 {
        return Err(CatalogError::ZeroSize("blown-up chain"));
    }
    let (n, x) = match t {
        CType::Circ => (1, 0),
        CType::Plus => (2, 1),
        CType::Minus => (2, 0),
        CType::PlusMinus => (3, 1),
    };
    preskeleton(&chain(n)?, x, lambda as usize)
}

fn zigzag_edges(lo: i64, hi: i64) -> Vec<(String, String)> {
    let mut edges = Vec::new();
    for i in lo..=hi {
        if i.rem_euclid(2) == 1 {
            if i > lo {
                edges.push((i.to_string(), (i - 1).to_string()));
            }
            if i < hi {
                edges.push((i.to_string(), (i + 1).to_string()));
            }
        }
    }
    edges
}

/// Points `0..=n`; each odd point sees its even neighbours.
pub fn garland(n: u32) -> Result<Frame, CatalogError> {
    let pts: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    Ok(Frame::new(
        &pts,
        &zigzag_edges(0, n as i64),
        Closure::ReflexiveTransitive,
    )?)
}

pub fn co_garland(n: u32) -> Result<Frame, CatalogError> {
    Ok(garland(n)?.inverse())
}

/// A garland of odd size closed into a cycle by letting `n` see `0`.
pub fn hoop(n: u32) -> Result<Frame, CatalogError> {
    if n % 2 == 0 {
        return Err(CatalogError::EvenHoop(n));
    }
    let pts: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    let mut edges = zigzag_edges(0, n as i64);
    edges.push((n.to_string(), "0".to_string()));
    Ok(Frame::new(&pts, &edges, Closure::ReflexiveTransitive)?)
}

/// The integer zigzag restricted to `[i, j]`.
pub fn garland_window(i: i64, j: i64) -> Result<Frame, CatalogError> {
    if j < i {
        return Err(CatalogError::EmptyWindow(i, j));
    }
    let pts: Vec<String> = (i..=j).map(|k| k.to_string()).collect();
    Ok(Frame::new(&pts, &zigzag_edges(i, j), Closure::ReflexiveTransitive)?)
}

pub fn fig1() -> Frame {
    Frame::new(
        &["r", "c0", "c1", "x1", "x2"],
        &[("r", "c0"), ("c0", "c1"), ("c1", "c0"), ("r", "x1"), ("r", "x2")],
        Closure::ReflexiveTransitive,
    )
    .expect("static frame")
}

pub fn fig2() -> Frame {
    Frame::new(
        &["r", "c0", "c1", "x"],
        &[("r", "c0"), ("c0", "c1"), ("c1", "c0"), ("r", "x")],
        Closure::ReflexiveTransitive,
    )
    .expect("static frame")
}

/// Blows `x` up into a cluster of `λ + 1` points: the new points see
/// everything `x` sees and are seen by everything that sees `x`.
pub fn preskeleton(frame: &Frame, x: usize, lambda: usize) -> Result<Frame, CatalogError> {
    if !frame.is_skeleton() {
        return Err(CatalogError::NotSkeleton);
    }
    let n = frame.len();
    if n + lambda > MAX_POINTS {
        return Err(FrameError::TooManyPoints(n + lambda).into());
    }
    let mut taken: HashSet<String> = frame.names().iter().cloned().collect();
    let mut names = frame.names().to_vec();
    for i in 1..=lambda {
        let name = fresh_name(&taken, &format!("{}_{i}", frame.name(x)));
        taken.insert(name.clone());
        names.push(name);
    }
    let c: PointSet = std::iter::once(x).chain(n..n + lambda).collect();
    let rx = frame.succ(x);
    let ix = frame.pred(x);
    let mut succ: Vec<PointSet> = (0..n).map(|y| frame.succ(y)).collect();
    succ.extend(std::iter::repeat_n(PointSet::EMPTY, lambda));
    for p in c.iter() {
        succ[p] |= rx | c;
    }
    for p in ix.iter() {
        succ[p] |= c;
    }
    Ok(Frame::from_successors(names, succ, frame.closure())?)
}

/// A frame read as a skeleton with one point blown up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreSkeleton {
    pub skeleton: Frame,
    /// Index of the blown-up point in `skeleton`.
    pub mark: usize,
    pub lambda: usize,
}

/// Recognises a closed frame with exactly one proper cluster. The skeleton
/// keeps the first member of that cluster.
pub fn recognize_preskeleton(frame: &Frame) -> Result<PreSkeleton, CatalogError> {
    if !frame.is_closed() {
        return Err(CatalogError::NotPreSkeleton(
            "relation is not reflexive and transitive".into(),
        ));
    }
    let big: Vec<PointSet> = frame.clusters().into_iter().filter(|c| c.len() > 1).collect();
    if big.len() != 1 {
        return Err(CatalogError::NotPreSkeleton(format!(
            "{} proper clusters, expected 1",
            big.len()
        )));
    }
    let c = big[0];
    let rep = c.first().unwrap();
    let keep = (frame.all() - c) | PointSet::singleton(rep);
    let skeleton = frame.induced_subframe(keep);
    let mark = skeleton.index_of(frame.name(rep)).unwrap();
    Ok(PreSkeleton {
        skeleton,
        mark,
        lambda: c.len() - 1,
    })
}
