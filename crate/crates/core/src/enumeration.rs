//! Exhaustive generation of small frames up to isomorphism.
//!
//! Relations on `n` labelled points are swept as bit patterns, filtered,
//! and reduced to a canonical form: the least adjacency code over all
//! relabellings, reading the matrix row by row with the first entry most
//! significant.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::{Closure, Frame, PointSet};

/// Largest frame size for closed enumeration.
pub const MAX_ENUM_POINTS: usize = 5;
/// Largest frame size when the relation is not closed.
pub const MAX_RAW_POINTS: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumError {
    #[error("enumeration is limited to {cap} points for this closure mode, asked for {asked}")]
    TooManyPoints { asked: usize, cap: usize },
}

/// Upper bounds on frame metrics; `None` leaves a metric free.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub dep: Option<u32>,
    pub wid_f: Option<u32>,
    pub wid_b: Option<u32>,
    pub zdg: Option<u32>,
    pub gir: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumSpec {
    pub max_points: usize,
    pub bounds: Bounds,
    pub rooted_only: bool,
    pub skeleton_only: bool,
    pub closure: Closure,
}

impl EnumSpec {
    /// All closed frames with at most `max_points` points.
    pub fn closed(max_points: usize) -> Self {
        EnumSpec {
            max_points,
            bounds: Bounds::default(),
            rooted_only: false,
            skeleton_only: false,
            closure: Closure::ReflexiveTransitive,
        }
    }
}

type Rows = [u8; MAX_ENUM_POINTS];

fn code(rows: &Rows, n: usize, perm: &[usize]) -> u32 {
    let mut c = 0;
    for i in 0..n {
        for j in 0..n {
            c = c << 1 | (rows[perm[i]] >> perm[j] & 1) as u32;
        }
    }
    c
}

fn decode(c: u32, n: usize) -> Rows {
    let mut rows = [0u8; MAX_ENUM_POINTS];
    for i in 0..n {
        for j in 0..n {
            if c >> (n * n - 1 - (i * n + j)) & 1 == 1 {
                rows[i] |= 1 << j;
            }
        }
    }
    rows
}

/// Least adjacency code of a relation over all relabellings.
fn canonical(rows: &Rows, n: usize) -> u32 {
    (0..n).permutations(n).map(|p| code(rows, n, &p)).min().unwrap_or(0)
}

/// Canonical adjacency code of a frame with at most five points.
pub fn canonical_code(frame: &Frame) -> Option<u32> {
    let n = frame.len();
    if n > MAX_ENUM_POINTS {
        return None;
    }
    let mut rows = [0u8; MAX_ENUM_POINTS];
    for (x, row) in rows.iter_mut().enumerate().take(n) {
        *row = frame.succ(x).iter().fold(0, |r, y| r | 1 << y);
    }
    Some(canonical(&rows, n))
}

fn transitive(rows: &Rows, n: usize) -> bool {
    (0..n).all(|i| {
        (0..n)
            .filter(|&j| rows[i] >> j & 1 == 1)
            .all(|j| rows[j] & !rows[i] == 0)
    })
}

/// Labelled relations on `n` points allowed by the closure mode.
fn labelled(n: usize, closure: Closure) -> Vec<Rows> {
    let mut out = Vec::new();
    match closure {
        Closure::ReflexiveTransitive => {
            let off: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect();
            for mask in 0u32..1 << off.len() {
                let mut rows = [0u8; MAX_ENUM_POINTS];
                for (i, row) in rows.iter_mut().enumerate().take(n) {
                    *row = 1 << i;
                }
                for (k, &(i, j)) in off.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        rows[i] |= 1 << j;
                    }
                }
                if transitive(&rows, n) {
                    out.push(rows);
                }
            }
        }
        Closure::None => {
            for mask in 0u32..1 << (n * n) {
                out.push(decode(mask, n));
            }
        }
    }
    out
}

fn to_frame(rows: &Rows, n: usize, closure: Closure) -> Frame {
    let names = (0..n).map(|i| i.to_string()).collect();
    let succ = (0..n)
        .map(|i| (0..n).filter(|&j| rows[i] >> j & 1 == 1).collect::<PointSet>())
        .collect();
    Frame::from_successors(names, succ, closure).expect("small frame")
}

fn admits(frame: &Frame, spec: &EnumSpec) -> bool {
    if spec.rooted_only && !frame.is_rooted() {
        return false;
    }
    let closed = if frame.is_closed() {
        frame.clone()
    } else {
        frame.closed()
    };
    if spec.skeleton_only && !closed.is_skeleton() {
        return false;
    }
    let b = &spec.bounds;
    if *b == Bounds::default() {
        return true;
    }
    let m = closed.metrics();
    let ok = |bound: Option<u32>, v: u32| bound.is_none_or(|k| v <= k);
    ok(b.dep, m.dep) && ok(b.wid_f, m.wid_f) && ok(b.wid_b, m.wid_b) && ok(b.zdg, m.zdg) && ok(b.gir, m.gir)
}

/// Frames with 1 to `max_points` points, one per isomorphism class,
/// ordered by size and then by canonical code. Each frame is the
/// canonical representative, with points named `0..n`.
pub fn enumerate_frames(spec: &EnumSpec) -> Result<Vec<Frame>, EnumError> {
    let cap = match spec.closure {
        Closure::ReflexiveTransitive => MAX_ENUM_POINTS,
        Closure::None => MAX_RAW_POINTS,
    };
    if spec.max_points > cap {
        return Err(EnumError::TooManyPoints {
            asked: spec.max_points,
            cap,
        });
    }
    let mut out = Vec::new();
    for n in 1..=spec.max_points {
        let codes: BTreeSet<u32> = labelled(n, spec.closure).iter().map(|r| canonical(r, n)).collect();
        for c in codes {
            let f = to_frame(&decode(c, n), n, spec.closure);
            if admits(&f, spec) {
                out.push(f);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chain, co_garland, garland, hoop};
    use crate::morphisms::isomorphic;

    fn sizes(frames: &[Frame], max: usize) -> Vec<usize> {
        (1..=max)
            .map(|n| frames.iter().filter(|f| f.len() == n).count())
            .collect()
    }

    #[test]
    fn pinned_counts() {
        let pre = enumerate_frames(&EnumSpec::closed(5)).unwrap();
        assert_eq!(sizes(&pre, 5), vec![1, 3, 9, 33, 139]);
        let posets = enumerate_frames(&EnumSpec {
            skeleton_only: true,
            ..EnumSpec::closed(5)
        })
        .unwrap();
        assert_eq!(sizes(&posets, 5), vec![1, 2, 5, 16, 63]);
        let raw = enumerate_frames(&EnumSpec {
            closure: Closure::None,
            ..EnumSpec::closed(2)
        })
        .unwrap();
        assert_eq!(sizes(&raw, 2), vec![2, 10]);
    }

    // Orbit counting: the classes' orbit sizes must add up to the labelled
    // count, and no two representatives may be isomorphic.
    #[test]
    fn classes_partition_the_labelled_relations() {
        let frames = enumerate_frames(&EnumSpec::closed(4)).unwrap();
        for n in 1..=4usize {
            let labelled_count = labelled(n, Closure::ReflexiveTransitive).len();
            let fact: usize = (1..=n).product();
            let orbit_sum: usize = frames
                .iter()
                .filter(|f| f.len() == n)
                .map(|f| {
                    let mut rows = [0u8; MAX_ENUM_POINTS];
                    for (x, row) in rows.iter_mut().enumerate().take(n) {
                        *row = f.succ(x).iter().fold(0, |r, y| r | 1 << y);
                    }
                    let base = code(&rows, n, &(0..n).collect::<Vec<_>>());
                    let autos = (0..n).permutations(n).filter(|p| code(&rows, n, p) == base).count();
                    fact / autos
                })
                .sum();
            assert_eq!(orbit_sum, labelled_count, "n = {n}");
        }
        for (i, a) in frames.iter().enumerate() {
            for b in &frames[i + 1..] {
                assert!(isomorphic(a, b).is_none());
            }
        }
    }

    #[test]
    fn rooted_two_point_skeletons() {
        let spec = EnumSpec {
            rooted_only: true,
            skeleton_only: true,
            ..EnumSpec::closed(2)
        };
        let frames = enumerate_frames(&spec).unwrap();
        assert_eq!(frames.len(), 2);
        assert!(isomorphic(&frames[0], &chain(1).unwrap()).is_some());
        assert!(isomorphic(&frames[1], &chain(2).unwrap()).is_some());
    }

    #[test]
    fn small_garland_cell() {
        let spec = EnumSpec {
            max_points: 4,
            bounds: Bounds {
                dep: Some(2),
                wid_f: Some(2),
                wid_b: Some(2),
                gir: Some(1),
                zdg: None,
            },
            rooted_only: true,
            skeleton_only: false,
            closure: Closure::ReflexiveTransitive,
        };
        let frames = enumerate_frames(&spec).unwrap();
        let family: Vec<Frame> = (0..4)
            .flat_map(|n| [garland(n), co_garland(n), hoop(n)])
            .filter_map(Result::ok)
            .collect();
        for f in &frames {
            assert!(family.iter().any(|g| isomorphic(f, g).is_some()));
        }
        for g in &family {
            assert!(frames.iter().any(|f| isomorphic(f, g).is_some()));
        }
    }

    #[test]
    fn caps() {
        assert!(enumerate_frames(&EnumSpec::closed(6)).is_err());
        let raw = EnumSpec {
            closure: Closure::None,
            ..EnumSpec::closed(5)
        };
        assert_eq!(
            enumerate_frames(&raw),
            Err(EnumError::TooManyPoints { asked: 5, cap: 4 })
        );
    }
}
