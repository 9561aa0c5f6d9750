//! Umbrella frames: one small block per bit of a sequence, chained so that
//! the whole frame encodes the sequence up to block-interval isomorphism.
//!
//! A type-0 block has points `a0..a5, b0, b1, c0, c1, c2`; a type-1 block
//! adds `a6, a7`. The `a` points form a zigzag whose even points are
//! minimal. Block `i + 1` is attached to block `i` by an edge from its `a0`
//! up to the last `a` point of block `i`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formulas::{schema, Param, Schema};
use crate::frames::{Closure, Frame, FrameError, FrameMetrics, PointSet, MAX_POINTS};
use crate::semantics::{validity_profile, Options, SemanticsError};
use crate::sequences::BitSeq;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UmbrellaError {
    #[error("an umbrella needs a nonempty sequence")]
    Empty,
    #[error("umbrella would have {0} points, the limit is {MAX_POINTS}")]
    TooManyPoints(usize),
    #[error("block interval [{lo}, {hi}] is not inside [{first}, {last}]")]
    OutOfRange { lo: i64, hi: i64, first: i64, last: i64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Position of a point inside its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    A(u8),
    B(u8),
    C(u8),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::A(i) => write!(f, "a{i}"),
            Role::B(i) => write!(f, "b{i}"),
            Role::C(i) => write!(f, "c{i}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct UmbrellaFrame {
    pub frame: Frame,
    pub alpha: BitSeq,
    /// Block of each point, in the sequence's own indices.
    pub block_index: Vec<i64>,
    pub role: Vec<Role>,
    /// Linear position: `a` points are numbered consecutively from the
    /// first block's `a0` at 0; `b` points share the position of their
    /// block's `a1`, `c` points that of `a3`.
    pub label: Vec<i64>,
}

impl UmbrellaFrame {
    pub fn block_type(&self, i: i64) -> Option<bool> {
        self.alpha.get(i)
    }

    /// Points of blocks `lo..=hi`.
    pub fn block_points(&self, lo: i64, hi: i64) -> PointSet {
        (0..self.frame.len())
            .filter(|&x| (lo..=hi).contains(&self.block_index[x]))
            .collect()
    }
}

fn block_roles(ty: bool) -> Vec<Role> {
    let top = if ty { 8 } else { 6 };
    let mut roles: Vec<Role> = (0..top).map(Role::A).collect();
    roles.extend([Role::B(0), Role::B(1), Role::C(0), Role::C(1), Role::C(2)]);
    roles
}

fn block_generators(ty: bool) -> Vec<(Role, Role)> {
    let top = if ty { 8u8 } else { 6 };
    let mut gens = Vec::new();
    for k in (0..top).step_by(2) {
        gens.push((Role::A(k), Role::A(k + 1)));
        if k > 0 {
            gens.push((Role::A(k), Role::A(k - 1)));
        }
    }
    gens.extend([
        (Role::B(0), Role::B(1)),
        (Role::B(0), Role::A(1)),
        (Role::C(0), Role::C(1)),
        (Role::C(2), Role::C(1)),
        (Role::C(0), Role::A(3)),
    ]);
    gens
}

/// Point count of the umbrella over `alpha`.
pub fn point_count(alpha: &BitSeq) -> usize {
    alpha.bits.iter().map(|&b| if b { 13 } else { 11 }).sum()
}

pub fn umbrella(alpha: &BitSeq) -> Result<UmbrellaFrame, UmbrellaError> {
    if alpha.is_empty() {
        return Err(UmbrellaError::Empty);
    }
    let total = point_count(alpha);
    if total > MAX_POINTS {
        return Err(UmbrellaError::TooManyPoints(total));
    }
    let mut names = Vec::with_capacity(total);
    let mut block_index = Vec::with_capacity(total);
    let mut role = Vec::with_capacity(total);
    let mut label = Vec::with_capacity(total);
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut spine = 0i64;
    for (k, &ty) in alpha.bits.iter().enumerate() {
        let i = alpha.anchor + k as i64;
        let name = |r: Role| format!("{r}[{i}]");
        for r in block_roles(ty) {
            names.push(name(r));
            block_index.push(i);
            role.push(r);
            label.push(match r {
                Role::A(j) => spine + j as i64,
                Role::B(_) => spine + 1,
                Role::C(_) => spine + 3,
            });
        }
        edges.extend(block_generators(ty).into_iter().map(|(a, b)| (name(a), name(b))));
        if k > 0 {
            let prev_top = if alpha.bits[k - 1] { 7 } else { 5 };
            edges.push((name(Role::A(0)), format!("a{prev_top}[{}]", i - 1)));
        }
        spine += if ty { 8 } else { 6 };
    }
    let frame = Frame::new(&names, &edges, Closure::ReflexiveTransitive)?;
    Ok(UmbrellaFrame {
        frame,
        alpha: alpha.clone(),
        block_index,
        role,
        label,
    })
}

/// The subframe on blocks `lo..=hi`.
pub fn block_interval_subframe(z: &UmbrellaFrame, lo: i64, hi: i64) -> Result<Frame, UmbrellaError> {
    let (first, last) = (z.alpha.anchor, z.alpha.end());
    if lo > hi || lo < first || hi > last {
        return Err(UmbrellaError::OutOfRange { lo, hi, first, last });
    }
    Ok(z.frame.induced_subframe(z.block_points(lo, hi)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaCheck {
    pub schema: &'static str,
    pub n: u32,
    /// What the metric bound predicts.
    pub by_metric: bool,
    /// Whether the formula holds at every point; `None` when the
    /// valuation search was over budget.
    pub by_semantics: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UmbrellaReport {
    pub points: usize,
    pub rooted: bool,
    pub antisymmetric: bool,
    pub metrics: FrameMetrics,
    pub formulas: Vec<FormulaCheck>,
    pub failures: Vec<String>,
}

impl UmbrellaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that a frame lies in the cell of umbrellas: rooted,
/// antisymmetric, depth at most 2, forward width at most 2 and backward
/// width at most 3, by metrics and again through the matching formulas.
pub fn umbrella_check(frame: &Frame, opts: Options) -> Result<UmbrellaReport, SemanticsError> {
    let frame = if frame.is_closed() {
        frame.clone()
    } else {
        frame.closed()
    };
    let metrics = frame.metrics();
    let rooted = frame.is_rooted();
    let antisymmetric = frame.is_skeleton();
    let mut failures = Vec::new();
    if !rooted {
        failures.push("not rooted".to_string());
    }
    if !antisymmetric {
        failures.push(format!("has a cluster of {} points", metrics.gir));
    }
    let bounds = [
        (Schema::Bd, 2, metrics.dep),
        (Schema::BwPlus, 2, metrics.wid_f),
        (Schema::BwMinus, 3, metrics.wid_b),
    ];
    let mut formulas = Vec::new();
    for (s, n, actual) in bounds {
        let by_metric = actual <= n;
        if !by_metric {
            failures.push(format!("{} {actual} > {n}", metric_name(s)));
        }
        let phi = schema(s, Some(Param::N(n))).expect("parameterised schema");
        let by_semantics = match validity_profile(&frame, &phi, opts) {
            Ok(set) => Some(set == frame.all()),
            Err(SemanticsError::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e),
        };
        if let Some(sem) = by_semantics {
            if sem != by_metric {
                failures.push(format!("{}{n} disagrees with the {} metric", s.name(), metric_name(s)));
            }
        }
        formulas.push(FormulaCheck {
            schema: s.name(),
            n,
            by_metric,
            by_semantics,
        });
    }
    Ok(UmbrellaReport {
        points: frame.len(),
        rooted,
        antisymmetric,
        metrics,
        formulas,
        failures,
    })
}

fn metric_name(s: Schema) -> &'static str {
    match s {
        Schema::Bd => "dep",
        Schema::BwPlus => "widF",
        _ => "widB",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::chain;
    use crate::morphisms::isomorphic;
    use crate::sequences::embeds;

    fn z(bits: &str) -> UmbrellaFrame {
        umbrella(&BitSeq::from_bits(bits).unwrap()).unwrap()
    }

    fn all_sequences(max_len: usize) -> Vec<BitSeq> {
        (1..=max_len)
            .flat_map(|l| (0..1u32 << l).map(move |m| BitSeq::new((0..l).map(|k| m >> k & 1 == 1).collect(), 0)))
            .collect()
    }

    #[test]
    fn sizes_and_cross_edges() {
        assert_eq!(z("0").frame.len(), 11);
        assert_eq!(z("1").frame.len(), 13);
        let u = z("01");
        assert_eq!(u.frame.len(), 24);
        let cross: Vec<_> = u
            .frame
            .edges()
            .into_iter()
            .filter(|&(x, y)| u.block_index[x] != u.block_index[y])
            .collect();
        assert_eq!(cross.len(), 1);
        let (x, y) = cross[0];
        assert_eq!((u.frame.name(x), u.frame.name(y)), ("a0[1]", "a5[0]"));
        assert_eq!(umbrella(&BitSeq::empty()).unwrap_err(), UmbrellaError::Empty);
    }

    #[test]
    fn relabelling() {
        let u = z("10");
        let at = |n: &str| u.label[u.frame.index_of(n).unwrap()];
        assert_eq!(at("a0[0]"), 0);
        assert_eq!(at("a7[0]"), 7);
        assert_eq!(at("a0[1]"), 8);
        assert_eq!(at("b1[1]"), 9);
        assert_eq!(at("c2[0]"), 3);
    }

    #[test]
    fn metrics_of_a_three_block_umbrella() {
        let m = z("011").frame.metrics();
        assert_eq!((m.dep, m.wid_f, m.wid_b, m.gir), (2, 2, 3, 1));
    }

    #[test]
    fn checks_pass_on_umbrellas_and_fail_on_a_chain() {
        let r = umbrella_check(&z("1").frame, Options::default()).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.formulas.iter().all(|c| c.by_semantics == Some(true)));
        let r = umbrella_check(&chain(3).unwrap(), Options::default()).unwrap();
        assert!(r.failures.iter().any(|f| f == "dep 3 > 2"));
        assert_eq!(r.formulas[0].by_semantics, Some(false));
    }

    #[test]
    fn bw_minus_three_holds_everywhere() {
        let u = z("00");
        let phi = schema(Schema::BwMinus, Some(Param::N(3))).unwrap();
        assert_eq!(
            validity_profile(&u.frame, &phi, Options::default()).unwrap(),
            u.frame.all()
        );
    }

    #[test]
    fn block_intervals() {
        let u = z("01");
        assert!(isomorphic(&block_interval_subframe(&u, 0, 0).unwrap(), &z("0").frame).is_some());
        assert!(isomorphic(&block_interval_subframe(&u, 1, 1).unwrap(), &z("1").frame).is_some());
        assert_eq!(block_interval_subframe(&u, 0, 1).unwrap(), u.frame);
        assert!(matches!(
            block_interval_subframe(&u, 1, 2),
            Err(UmbrellaError::OutOfRange { .. })
        ));
    }

    #[test]
    fn dissimilar_stages_give_distinct_umbrellas() {
        let f = crate::sequences::gtm(&[false; 2], 2).unwrap();
        let g = crate::sequences::gtm(&[true; 2], 2).unwrap();
        let (zf, zg) = (umbrella(&f).unwrap(), umbrella(&g).unwrap());
        assert!(isomorphic(&zf.frame, &zg.frame).is_none());
        // same point count once the bits are balanced
        let h = BitSeq::new(f.bits.iter().rev().copied().collect(), 0);
        let zh = umbrella(&h).unwrap();
        assert_eq!(zh.frame.len(), zf.frame.len());
        assert!(isomorphic(&zf.frame, &zh.frame).is_none());
    }

    #[test]
    fn interval_isomorphism_matches_embedding() {
        let seqs = all_sequences(3);
        for alpha in &seqs {
            let u = umbrella(alpha).unwrap();
            for gamma in seqs.iter().filter(|g| g.len() <= alpha.len()) {
                let target = umbrella(gamma).unwrap().frame;
                let by_frames = (alpha.anchor..=alpha.end()).any(|lo| {
                    (lo..=alpha.end())
                        .any(|hi| isomorphic(&block_interval_subframe(&u, lo, hi).unwrap(), &target).is_some())
                });
                assert_eq!(by_frames, embeds(gamma, alpha).is_some(), "{alpha} vs {gamma}");
            }
        }
    }
}
