//! t-morphisms, their bounded partial versions, isomorphism and the
//! enumeration of t-morphic images.
//!
//! A t-morphism `f: F → G` satisfies `f[R[x]] = R'[f(x)]` (forth) and
//! `f[R̆[x]] = R̆'[f(x)]` (back) at every point.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::frames::{Frame, PointSet, Radius};

/// Largest frame whose images are enumerated by partition search.
pub const MAX_IMAGE_POINTS: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphismError {
    #[error("map has {got} entries, the source has {expected} points")]
    WrongLength { expected: usize, got: usize },
    #[error("map sends a point to index {0}, outside the target")]
    TargetOutOfRange(usize),
    #[error("point index {0} is outside the frame")]
    PointOutOfRange(usize),
    #[error("bounded morphisms need degree k >= 1")]
    ZeroDegree,
    #[error("point {0} of the set is not within the required zigzag ball")]
    OutsideBall(usize),
    #[error("point {0} is not in the domain of the map")]
    OutsideDomain(usize),
    #[error("image enumeration is limited to {MAX_IMAGE_POINTS} points, frame has {0}")]
    TooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// successor images differ
    Forth,
    /// predecessor images differ
    Back,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Forth => "forth",
            Side::Back => "back",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub point: usize,
    pub side: Side,
}

/// A partial map between point indices.
pub type PartialMap = Vec<Option<usize>>;

fn image(f: &[usize], s: PointSet) -> PointSet {
    s.iter().map(|x| f[x]).collect()
}

fn partial_image(f: &[Option<usize>], s: PointSet) -> Option<PointSet> {
    s.iter()
        .map(|x| f[x])
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().collect())
}

fn validate_total(from: &Frame, to: &Frame, f: &[usize]) -> Result<(), MorphismError> {
    if f.len() != from.len() {
        return Err(MorphismError::WrongLength {
            expected: from.len(),
            got: f.len(),
        });
    }
    if let Some(&a) = f.iter().find(|&&a| a >= to.len()) {
        return Err(MorphismError::TargetOutOfRange(a));
    }
    Ok(())
}

/// First point (in declaration order) where `f` breaks a t-morphism
/// condition, or `None` when `f` is a t-morphism.
pub fn check_tmorphism(from: &Frame, to: &Frame, f: &[usize]) -> Result<Option<Violation>, MorphismError> {
    validate_total(from, to, f)?;
    for x in 0..from.len() {
        if image(f, from.succ(x)) != to.succ(f[x]) {
            return Ok(Some(Violation {
                point: x,
                side: Side::Forth,
            }));
        }
        if image(f, from.pred(x)) != to.pred(f[x]) {
            return Ok(Some(Violation {
                point: x,
                side: Side::Back,
            }));
        }
    }
    Ok(None)
}

pub fn is_surjective(to: &Frame, f: &[usize]) -> bool {
    f.iter().copied().collect::<PointSet>() == to.all()
}

/// Assignment order: repeatedly the unassigned point with most assigned
/// neighbours, then highest degree, then lowest index.
fn search_order(frame: &Frame, among: PointSet, first: Option<usize>) -> Vec<usize> {
    let degree = |x: usize| (frame.succ(x) | frame.pred(x)).len();
    let mut order = Vec::with_capacity(among.len());
    let mut done = PointSet::EMPTY;
    if let Some(x) = first {
        order.push(x);
        done.insert(x);
    }
    while done != among {
        let x = (among - done)
            .iter()
            .max_by_key(|&x| {
                (
                    (frame.succ(x) | frame.pred(x)).intersects(&done) as usize,
                    degree(x),
                    usize::MAX - x,
                )
            })
            .unwrap();
        order.push(x);
        done.insert(x);
    }
    order
}

/// Searches for a surjective t-morphism. The witness is the first one found
/// when points are tried in a fixed order and targets in declaration order.
pub fn find_tmorphism_onto(from: &Frame, to: &Frame) -> Option<Vec<usize>> {
    if to.len() > from.len() {
        return None;
    }
    let order = search_order(from, from.all(), None);
    let mut pos = vec![0; from.len()];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    // position at which every neighbour of a point is assigned
    let ready: Vec<usize> = (0..from.len())
        .map(|x| {
            (from.succ(x) | from.pred(x))
                .iter()
                .map(|y| pos[y])
                .max()
                .unwrap_or(pos[x])
                .max(pos[x])
        })
        .collect();
    let mut by_ready = vec![Vec::new(); from.len()];
    for x in 0..from.len() {
        by_ready[ready[x]].push(x);
    }
    let mut s = OntoSearch {
        from,
        to,
        order,
        by_ready,
        f: vec![None; from.len()],
        hits: vec![0; to.len()],
        unhit: to.len(),
    };
    if s.go(0) {
        Some(s.f.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

struct OntoSearch<'a> {
    from: &'a Frame,
    to: &'a Frame,
    order: Vec<usize>,
    by_ready: Vec<Vec<usize>>,
    f: Vec<Option<usize>>,
    hits: Vec<u32>,
    unhit: usize,
}

impl OntoSearch<'_> {
    fn go(&mut self, i: usize) -> bool {
        if i == self.order.len() {
            return self.unhit == 0;
        }
        let x = self.order[i];
        let (sx, px) = (self.from.succ(x), self.from.pred(x));
        for a in 0..self.to.len() {
            if self.to.succ(a).len() > sx.len() || self.to.pred(a).len() > px.len() {
                continue;
            }
            if self.from.relates(x, x) && !self.to.relates(a, a) {
                continue;
            }
            let consistent = sx.iter().all(|z| self.f[z].is_none_or(|b| self.to.relates(a, b)))
                && px.iter().all(|z| self.f[z].is_none_or(|b| self.to.relates(b, a)));
            if !consistent {
                continue;
            }
            self.f[x] = Some(a);
            self.hits[a] += 1;
            if self.hits[a] == 1 {
                self.unhit -= 1;
            }
            let remaining = self.order.len() - i - 1;
            let ok = self.unhit <= remaining
                && self.by_ready[i].iter().all(|&w| {
                    let fw = self.f[w].unwrap();
                    partial_image(&self.f, self.from.succ(w)) == Some(self.to.succ(fw))
                        && partial_image(&self.f, self.from.pred(w)) == Some(self.to.pred(fw))
                });
            if ok && self.go(i + 1) {
                return true;
            }
            self.hits[a] -= 1;
            if self.hits[a] == 0 {
                self.unhit += 1;
            }
            self.f[x] = None;
        }
        false
    }
}

/// Checks the bounded condition: `f` is defined on `R♯ᵏ[x]`, sends `x` to
/// `y`, and satisfies both equalities at every point of `R♯ᵏ⁻¹[x]`.
pub fn check_k_t_morphism(
    from: &Frame,
    x: usize,
    to: &Frame,
    y: usize,
    k: u32,
    f: &[Option<usize>],
) -> Result<bool, MorphismError> {
    if k == 0 {
        return Err(MorphismError::ZeroDegree);
    }
    if f.len() != from.len() {
        return Err(MorphismError::WrongLength {
            expected: from.len(),
            got: f.len(),
        });
    }
    if let Some(a) = f.iter().flatten().find(|&&a| a >= to.len()) {
        return Err(MorphismError::TargetOutOfRange(*a));
    }
    if f[x] != Some(y) {
        return Ok(false);
    }
    let outer = from.zigzag_ball(x, Radius::Finite(k));
    if outer.iter().any(|z| f[z].is_none()) {
        return Ok(false);
    }
    let inner = from.zigzag_ball(x, Radius::Finite(k - 1));
    Ok(inner.iter().all(|z| {
        let fz = f[z].unwrap();
        partial_image(f, from.succ(z)) == Some(to.succ(fz)) && partial_image(f, from.pred(z)) == Some(to.pred(fz))
    }))
}

/// Searches for a k-t-morphism from `(from, x)` to `(to, y)` defined exactly
/// on `R♯ᵏ[x]`.
pub fn find_k_t_morphism(
    from: &Frame,
    x: usize,
    to: &Frame,
    y: usize,
    k: u32,
) -> Result<Option<PartialMap>, MorphismError> {
    if k == 0 {
        return Err(MorphismError::ZeroDegree);
    }
    if x >= from.len() {
        return Err(MorphismError::PointOutOfRange(x));
    }
    if y >= to.len() {
        return Err(MorphismError::PointOutOfRange(y));
    }
    let outer = from.zigzag_ball(x, Radius::Finite(k));
    let inner = from.zigzag_ball(x, Radius::Finite(k - 1));
    // breadth-first from x, declaration order within a layer
    let mut order = vec![x];
    let mut seen = PointSet::singleton(x);
    let mut head = 0;
    while head < order.len() {
        let z = order[head];
        head += 1;
        for w in ((from.succ(z) | from.pred(z)) & outer).iter() {
            if !seen.contains(w) {
                seen.insert(w);
                order.push(w);
            }
        }
    }
    let mut pos = vec![usize::MAX; from.len()];
    for (i, &z) in order.iter().enumerate() {
        pos[z] = i;
    }
    let mut by_ready = vec![Vec::new(); order.len()];
    for z in inner.iter() {
        let r = (from.succ(z) | from.pred(z))
            .iter()
            .map(|w| pos[w])
            .max()
            .unwrap_or(0)
            .max(pos[z]);
        by_ready[r].push(z);
    }
    let mut s = BoundedSearch {
        from,
        to,
        inner,
        order,
        by_ready,
        f: vec![None; from.len()],
    };
    s.f[x] = Some(y);
    let ok = s.admissible(x, y) && s.ready_ok(0) && s.go(1);
    Ok(if ok { Some(s.f) } else { None })
}

struct BoundedSearch<'a> {
    from: &'a Frame,
    to: &'a Frame,
    inner: PointSet,
    order: Vec<usize>,
    by_ready: Vec<Vec<usize>>,
    f: Vec<Option<usize>>,
}

impl BoundedSearch<'_> {
    fn admissible(&self, w: usize, a: usize) -> bool {
        let (from, to) = (self.from, self.to);
        // w lies in the image-constrained neighbourhood of assigned inner points
        for z in (from.pred(w) & self.inner).iter() {
            if let Some(b) = self.f[z] {
                if !to.relates(b, a) {
                    return false;
                }
            }
        }
        for z in (from.succ(w) & self.inner).iter() {
            if let Some(b) = self.f[z] {
                if !to.relates(a, b) {
                    return false;
                }
            }
        }
        if self.inner.contains(w) {
            if to.succ(a).len() > from.succ(w).len() || to.pred(a).len() > from.pred(w).len() {
                return false;
            }
            if from.relates(w, w) && !to.relates(a, a) {
                return false;
            }
        }
        true
    }

    fn ready_ok(&self, i: usize) -> bool {
        self.by_ready[i].iter().all(|&z| {
            let fz = self.f[z].unwrap();
            partial_image(&self.f, self.from.succ(z)) == Some(self.to.succ(fz))
                && partial_image(&self.f, self.from.pred(z)) == Some(self.to.pred(fz))
        })
    }

    fn go(&mut self, i: usize) -> bool {
        if i == self.order.len() {
            return true;
        }
        let w = self.order[i];
        for a in 0..self.to.len() {
            if !self.admissible(w, a) {
                continue;
            }
            self.f[w] = Some(a);
            if self.ready_ok(i) && self.go(i + 1) {
                return true;
            }
            self.f[w] = None;
        }
        false
    }
}

/// `Y` is sufficient for `f` when `f[R♯[y]] ⊆ f[Y]` for every `y ∈ Y`.
/// `Y` must lie in `R♯ᵏ⁻¹[x]` and in the domain of `f`. The empty set is
/// vacuously sufficient.
pub fn is_sufficient(
    from: &Frame,
    x: usize,
    k: u32,
    f: &[Option<usize>],
    y_set: PointSet,
) -> Result<bool, MorphismError> {
    if k == 0 {
        return Err(MorphismError::ZeroDegree);
    }
    let inner = from.zigzag_ball(x, Radius::Finite(k - 1));
    if let Some(z) = (y_set - inner).first() {
        return Err(MorphismError::OutsideBall(z));
    }
    let mut covered = PointSet::EMPTY;
    for y in y_set.iter() {
        covered.insert(f[y].ok_or(MorphismError::OutsideDomain(y))?);
    }
    for y in y_set.iter() {
        let around = from.zigzag_step(PointSet::singleton(y));
        for z in around.iter() {
            let fz = f[z].ok_or(MorphismError::OutsideDomain(z))?;
            if !covered.contains(fz) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `f` is full when its range covers the whole generated subframe of `f(x)`.
pub fn is_full(to: &Frame, fx: usize, f: &[Option<usize>]) -> bool {
    let range: PointSet = f.iter().flatten().copied().collect();
    to.zigzag_ball(fx, Radius::Omega).is_subset(&range)
}

/// Colour refinement run on both frames at once so colours are comparable.
fn joint_colours(a: &Frame, b: &Frame) -> (Vec<u32>, Vec<u32>) {
    let frames = [a, b];
    let mut colours: Vec<Vec<u32>> = frames
        .iter()
        .map(|f| (0..f.len()).map(|x| (f.relates(x, x) as u32) << 31).collect())
        .collect();
    let mut classes = 0;
    loop {
        let mut table: HashMap<(u32, Vec<u32>, Vec<u32>), u32> = HashMap::new();
        let mut next: Vec<Vec<u32>> = Vec::new();
        for (fi, f) in frames.iter().enumerate() {
            let c = &colours[fi];
            let mut out = Vec::with_capacity(f.len());
            for x in 0..f.len() {
                let mut s: Vec<u32> = f.succ(x).iter().map(|y| c[y]).collect();
                let mut p: Vec<u32> = f.pred(x).iter().map(|y| c[y]).collect();
                s.sort_unstable();
                p.sort_unstable();
                let fresh = table.len() as u32;
                out.push(*table.entry((c[x], s, p)).or_insert(fresh));
            }
            next.push(out);
        }
        colours = next;
        if table.len() == classes {
            break;
        }
        classes = table.len();
    }
    let b_col = colours.pop().unwrap();
    let a_col = colours.pop().unwrap();
    (a_col, b_col)
}

/// An isomorphism as a bijection of indices, if one exists.
pub fn isomorphic(a: &Frame, b: &Frame) -> Option<Vec<usize>> {
    if a.len() != b.len() || a.edge_count() != b.edge_count() {
        return None;
    }
    let (ca, cb) = joint_colours(a, b);
    let mut ha = ca.clone();
    let mut hb = cb.clone();
    ha.sort_unstable();
    hb.sort_unstable();
    if ha != hb {
        return None;
    }
    let order = search_order(a, a.all(), None);
    let mut s = IsoSearch {
        a,
        b,
        ca,
        cb,
        order,
        f: vec![None; a.len()],
        used: PointSet::EMPTY,
        done: PointSet::EMPTY,
    };
    if s.go(0) {
        Some(s.f.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

struct IsoSearch<'a> {
    a: &'a Frame,
    b: &'a Frame,
    ca: Vec<u32>,
    cb: Vec<u32>,
    order: Vec<usize>,
    f: Vec<Option<usize>>,
    used: PointSet,
    done: PointSet,
}

impl IsoSearch<'_> {
    fn go(&mut self, i: usize) -> bool {
        if i == self.order.len() {
            return true;
        }
        let x = self.order[i];
        let want_succ: PointSet = (self.a.succ(x) & self.done)
            .iter()
            .map(|z| self.f[z].unwrap())
            .collect();
        let want_pred: PointSet = (self.a.pred(x) & self.done)
            .iter()
            .map(|z| self.f[z].unwrap())
            .collect();
        for c in 0..self.b.len() {
            if self.used.contains(c) || self.cb[c] != self.ca[x] || self.a.relates(x, x) != self.b.relates(c, c) {
                continue;
            }
            if self.b.succ(c) & self.used != want_succ || self.b.pred(c) & self.used != want_pred {
                continue;
            }
            self.f[x] = Some(c);
            self.used.insert(c);
            self.done.insert(x);
            if self.go(i + 1) {
                return true;
            }
            self.f[x] = None;
            self.used.remove(c);
            self.done.remove(x);
        }
        false
    }
}

/// A t-morphic image together with the quotient map onto it.
#[derive(Clone, Debug)]
pub struct Image {
    pub frame: Frame,
    pub map: Vec<usize>,
}

/// All t-morphic images up to isomorphism, largest first. Every surjective
/// t-morphism factors through the partition into its fibres, so it suffices
/// to run through partitions whose blocks agree on successor and
/// predecessor blocks.
pub fn enumerate_images(frame: &Frame) -> Result<Vec<Image>, MorphismError> {
    let n = frame.len();
    if n > MAX_IMAGE_POINTS {
        return Err(MorphismError::TooLarge(n));
    }
    let ready: Vec<usize> = (0..n)
        .map(|x| (frame.succ(x) | frame.pred(x)).iter().max().unwrap_or(x).max(x))
        .collect();
    let mut by_ready = vec![Vec::new(); n];
    for x in 0..n {
        by_ready[ready[x]].push(x);
    }
    let mut s = PartitionSearch {
        frame,
        by_ready,
        block: vec![0; n],
        sig: vec![None; n],
        blocks: 0,
        found: Vec::new(),
    };
    s.go(0);
    let mut images: Vec<Image> = Vec::new();
    for (block, count) in s.found {
        let q = quotient(frame, &block, count);
        if !images.iter().any(|im| isomorphic(&im.frame, &q).is_some()) {
            images.push(Image { frame: q, map: block });
        }
    }
    images.sort_by_key(|im| std::cmp::Reverse(im.frame.len()));
    Ok(images)
}

/// Quotient of a frame by a block assignment; blocks are named after their
/// first member.
pub fn quotient(frame: &Frame, block: &[usize], count: usize) -> Frame {
    let mut names = vec![None; count];
    let mut succ = vec![PointSet::EMPTY; count];
    for x in 0..frame.len() {
        names[block[x]].get_or_insert_with(|| frame.name(x).to_string());
        for y in frame.succ(x).iter() {
            succ[block[x]].insert(block[y]);
        }
    }
    Frame::from_successors(names.into_iter().map(Option::unwrap).collect(), succ, frame.closure())
        .expect("block names are distinct point names")
}

struct PartitionSearch<'a> {
    frame: &'a Frame,
    by_ready: Vec<Vec<usize>>,
    block: Vec<usize>,
    sig: Vec<Option<(u32, u32)>>,
    blocks: usize,
    found: Vec<(Vec<usize>, usize)>,
}

impl PartitionSearch<'_> {
    fn blockset(&self, s: PointSet) -> u32 {
        s.iter().fold(0, |acc, y| acc | 1 << self.block[y])
    }

    fn go(&mut self, i: usize) {
        let n = self.frame.len();
        if i == n {
            self.found.push((self.block.clone(), self.blocks));
            return;
        }
        let fresh = self.blocks;
        // a new block first, so the discrete partition comes out first
        for b in std::iter::once(fresh).chain(0..fresh) {
            self.block[i] = b;
            if b == fresh {
                self.blocks += 1;
            }
            let mut ok = true;
            let completed: Vec<usize> = self.by_ready[i].clone();
            for &x in &completed {
                let sx = (self.blockset(self.frame.succ(x)), self.blockset(self.frame.pred(x)));
                self.sig[x] = Some(sx);
                let mate_sig =
                    (0..n).find(|&z| z != x && self.sig[z].is_some() && self.block[z] == self.block[x] && z <= i);
                if let Some(z) = mate_sig {
                    if self.sig[z] != Some(sx) {
                        ok = false;
                    }
                }
            }
            if ok {
                self.go(i + 1);
            }
            for &x in &completed {
                self.sig[x] = None;
            }
            if b == fresh {
                self.blocks -= 1;
            }
        }
    }
}
