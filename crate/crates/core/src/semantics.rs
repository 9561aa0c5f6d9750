//! Truth in models and validity in frames.
//!
//! Validity is decided exactly by running through valuations. Two things keep
//! this affordable without changing the answer:
//!
//! * only the (variable, point) positions the formula can inspect from the
//!   point of evaluation are enumerated; every other position is held empty;
//! * the enumeration is a depth-first search over those positions that stops
//!   early once three-valued evaluation shows the outcome cannot change, and
//!   finishes small subtrees 64 valuations at a time with bit-sliced
//!   evaluation.
//!
//! Valuations are ordered by an index whose bits are the enumerated positions,
//! variable-major and then by point, least significant first. Counter-models
//! reported are always the least such index.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::catalog;
use crate::formulas::{Formula, Var};
use crate::frames::{Frame, PointSet};

pub const DEFAULT_BUDGET: u32 = 24;

/// Hard ceiling on enumerated positions, independent of the budget.
const MAX_BITS: u32 = 62;

/// Remaining positions at or below which the search switches to bit-sliced
/// enumeration.
const SLICE_BITS: u32 = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("variable p{0} has no value in the model")]
    UnknownVariable(Var),
    #[error("point index {0} is outside the frame")]
    PointOutOfRange(usize),
    #[error("valuation of p{0} mentions points outside the frame")]
    ValuationOutOfRange(Var),
    #[error("validity check needs {needed} valuation bits, budget is {budget}")]
    BudgetExceeded { needed: u32, budget: u32 },
    #[error("omega check needs a skeleton frame (all clusters singletons)")]
    NotSkeleton,
}

/// Knobs for validity checking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Largest number of (variable, point) positions enumerated for a single
    /// point of evaluation.
    pub budget: u32,
}

impl Default for Options {
    /// Budget from `TLK_BUDGET` when set and parseable, else the default.
    fn default() -> Self {
        let budget = std::env::var("TLK_BUDGET")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Options { budget }
    }
}

impl Options {
    pub fn with_budget(budget: u32) -> Self {
        Options { budget }
    }
}

pub struct Model<'a> {
    frame: &'a Frame,
    valuation: BTreeMap<Var, PointSet>,
}

impl<'a> Model<'a> {
    pub fn new(frame: &'a Frame, valuation: BTreeMap<Var, PointSet>) -> Result<Self, SemanticsError> {
        let all = frame.all();
        if let Some((&v, _)) = valuation.iter().find(|(_, s)| !s.is_subset(&all)) {
            return Err(SemanticsError::ValuationOutOfRange(v));
        }
        Ok(Model { frame, valuation })
    }

    pub fn frame(&self) -> &Frame {
        self.frame
    }

    pub fn valuation(&self) -> &BTreeMap<Var, PointSet> {
        &self.valuation
    }
}

pub fn satisfies(model: &Model, x: usize, phi: &Formula) -> Result<bool, SemanticsError> {
    if x >= model.frame.len() {
        return Err(SemanticsError::PointOutOfRange(x));
    }
    Ok(truth_set(model, phi)?.contains(x))
}

/// Points of the model where `phi` holds.
pub fn truth_set(model: &Model, phi: &Formula) -> Result<PointSet, SemanticsError> {
    fn go(m: &Model, f: &Formula) -> Result<PointSet, SemanticsError> {
        let fr = m.frame;
        let all = fr.all();
        Ok(match f {
            Formula::Atom(v) => *m.valuation.get(v).ok_or(SemanticsError::UnknownVariable(*v))?,
            Formula::Bot => PointSet::EMPTY,
            Formula::Implies(a, b) => (all - go(m, a)?) | go(m, b)?,
            Formula::FutBox(a) => {
                let t = go(m, a)?;
                (0..fr.len()).filter(|&x| fr.succ(x).is_subset(&t)).collect()
            }
            Formula::PastDia(a) => {
                let t = go(m, a)?;
                (0..fr.len()).filter(|&x| fr.pred(x).intersects(&t)).collect()
            }
            _ => unreachable!("expanded formulas are primitive"),
        })
    }
    go(model, &phi.expand())
}

/// A refuting valuation at a point. Positions not inspected by the formula
/// are empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterModel {
    pub point: usize,
    pub valuation: BTreeMap<Var, PointSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Refuted(CounterModel),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

pub fn valid_at(frame: &Frame, x: usize, phi: &Formula, opts: Options) -> Result<Validity, SemanticsError> {
    if x >= frame.len() {
        return Err(SemanticsError::PointOutOfRange(x));
    }
    let prog = Program::compile(phi);
    let search = Search::new(frame, &prog, x);
    search.check_budget(opts)?;
    Ok(search.run())
}

/// Validity at every point. On failure reports the first refuted point in
/// declaration order with its least counter-valuation.
pub fn valid(frame: &Frame, phi: &Formula, opts: Options) -> Result<Validity, SemanticsError> {
    let prog = Program::compile(phi);
    let searches: Vec<Search> = (0..frame.len()).map(|x| Search::new(frame, &prog, x)).collect();
    for s in &searches {
        s.check_budget(opts)?;
    }
    for s in searches {
        if let r @ Validity::Refuted(_) = s.run() {
            return Ok(r);
        }
    }
    Ok(Validity::Valid)
}

/// The set of points where `phi` is valid.
pub fn validity_profile(frame: &Frame, phi: &Formula, opts: Options) -> Result<PointSet, SemanticsError> {
    let prog = Program::compile(phi);
    let searches: Vec<Search> = (0..frame.len()).map(|x| Search::new(frame, &prog, x)).collect();
    for s in &searches {
        s.check_budget(opts)?;
    }
    Ok(searches
        .into_iter()
        .enumerate()
        .filter(|(_, s)| s.run().is_valid())
        .map(|(x, _)| x)
        .collect())
}

/// Validity in the frame obtained by blowing `x` up into an arbitrarily large
/// cluster. With `m` variables a cluster of `2^m` points already realises
/// every refutation, so that finite frame is checked.
pub fn omega_valid(frame: &Frame, x: usize, phi: &Formula, opts: Options) -> Result<Validity, SemanticsError> {
    if x >= frame.len() {
        return Err(SemanticsError::PointOutOfRange(x));
    }
    if !frame.is_skeleton() {
        return Err(SemanticsError::NotSkeleton);
    }
    let blown = catalog::preskeleton(frame, x, omega_lambda(phi)).map_err(|_| SemanticsError::NotSkeleton)?;
    valid(&blown, phi, opts)
}

/// Cluster parameter used by [`omega_valid`]: the blown-up point gets
/// `2^m` points for `m` variables, capped at 128.
pub fn omega_lambda(phi: &Formula) -> usize {
    let m = phi.variables().len().min(7);
    ((1usize << m) - 1).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    Atom(Var),
    Bot,
    Imp(u32, u32),
    Box(u32),
    PDia(u32),
}

/// Hash-consed primitive form of a formula; children precede parents and
/// the last op is the root.
struct Program {
    ops: Vec<Op>,
}

impl Program {
    fn compile(phi: &Formula) -> Program {
        let mut c = Compiler {
            ops: Vec::new(),
            interned: HashMap::new(),
            seen: HashMap::new(),
        };
        c.formula(phi);
        Program { ops: c.ops }
    }

    fn root(&self) -> usize {
        self.ops.len() - 1
    }
}

struct Compiler {
    ops: Vec<Op>,
    interned: HashMap<Op, u32>,
    seen: HashMap<*const Formula, u32>,
}

impl Compiler {
    fn intern(&mut self, op: Op) -> u32 {
        if let Some(&i) = self.interned.get(&op) {
            return i;
        }
        let i = self.ops.len() as u32;
        self.ops.push(op);
        self.interned.insert(op, i);
        i
    }

    fn neg(&mut self, a: u32) -> u32 {
        let bot = self.intern(Op::Bot);
        self.intern(Op::Imp(a, bot))
    }

    fn child(&mut self, f: &Arc<Formula>) -> u32 {
        let key = Arc::as_ptr(f);
        if let Some(&i) = self.seen.get(&key) {
            return i;
        }
        let i = self.formula(f);
        self.seen.insert(key, i);
        i
    }

    fn formula(&mut self, f: &Formula) -> u32 {
        match f {
            Formula::Atom(v) => self.intern(Op::Atom(*v)),
            Formula::Bot => self.intern(Op::Bot),
            Formula::Top => {
                let bot = self.intern(Op::Bot);
                self.intern(Op::Imp(bot, bot))
            }
            Formula::Not(a) => {
                let a = self.child(a);
                self.neg(a)
            }
            Formula::And(a, b) => {
                let (a, b) = (self.child(a), self.child(b));
                let nb = self.neg(b);
                let imp = self.intern(Op::Imp(a, nb));
                self.neg(imp)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.child(a), self.child(b));
                let na = self.neg(a);
                self.intern(Op::Imp(na, b))
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.child(a), self.child(b));
                self.intern(Op::Imp(a, b))
            }
            Formula::FutBox(a) => {
                let a = self.child(a);
                self.intern(Op::Box(a))
            }
            Formula::FutDia(a) => {
                let a = self.child(a);
                let na = self.neg(a);
                let b = self.intern(Op::Box(na));
                self.neg(b)
            }
            Formula::PastBox(a) => {
                let a = self.child(a);
                let na = self.neg(a);
                let d = self.intern(Op::PDia(na));
                self.neg(d)
            }
            Formula::PastDia(a) => {
                let a = self.child(a);
                self.intern(Op::PDia(a))
            }
        }
    }
}

/// Refutation search for one program at one point.
struct Search<'a> {
    frame: &'a Frame,
    prog: &'a Program,
    target: usize,
    /// Points at which each op can be consulted.
    need: Vec<PointSet>,
    /// Enumerated positions, least significant first.
    layout: Vec<(Var, usize)>,
    /// Position of (var, point) in `layout`.
    bit_of: HashMap<(Var, usize), u32>,
    vars: Vec<Var>,
    succ_lists: Vec<Vec<usize>>,
    pred_lists: Vec<Vec<usize>>,
}

const LANES: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl<'a> Search<'a> {
    fn new(frame: &'a Frame, prog: &'a Program, target: usize) -> Self {
        let n = prog.ops.len();
        let mut need = vec![PointSet::EMPTY; n];
        need[prog.root()] = PointSet::singleton(target);
        let mut positions: BTreeMap<Var, PointSet> = BTreeMap::new();
        for i in (0..n).rev() {
            let here = need[i];
            match prog.ops[i] {
                Op::Atom(v) => *positions.entry(v).or_default() |= here,
                Op::Bot => {}
                Op::Imp(a, b) => {
                    need[a as usize] |= here;
                    need[b as usize] |= here;
                }
                Op::Box(a) => need[a as usize] |= frame.succ_of_set(here),
                Op::PDia(a) => need[a as usize] |= frame.pred_of_set(here),
            }
        }
        let mut layout = Vec::new();
        for (&v, s) in &positions {
            for p in s.iter() {
                layout.push((v, p));
            }
        }
        let bit_of = layout.iter().enumerate().map(|(k, &vp)| (vp, k as u32)).collect();
        Search {
            frame,
            prog,
            target,
            need,
            layout,
            bit_of,
            vars: positions.keys().copied().collect(),
            succ_lists: (0..frame.len()).map(|x| frame.succ(x).iter().collect()).collect(),
            pred_lists: (0..frame.len()).map(|x| frame.pred(x).iter().collect()).collect(),
        }
    }

    fn bits(&self) -> u32 {
        self.layout.len() as u32
    }

    fn check_budget(&self, opts: Options) -> Result<(), SemanticsError> {
        let needed = self.bits();
        if needed > opts.budget.min(MAX_BITS) {
            return Err(SemanticsError::BudgetExceeded {
                needed,
                budget: opts.budget,
            });
        }
        Ok(())
    }

    fn run(&self) -> Validity {
        match self.dfs(self.bits(), 0) {
            None => Validity::Valid,
            Some(index) => Validity::Refuted(self.counter_model(index)),
        }
    }

    fn counter_model(&self, index: u64) -> CounterModel {
        let mut valuation: BTreeMap<Var, PointSet> = self.vars.iter().map(|&v| (v, PointSet::EMPTY)).collect();
        for (k, &(v, p)) in self.layout.iter().enumerate() {
            if index >> k & 1 == 1 {
                valuation.get_mut(&v).unwrap().insert(p);
            }
        }
        CounterModel {
            point: self.target,
            valuation,
        }
    }

    /// Least refuting index whose bits at and above `free` equal `prefix`.
    fn dfs(&self, free: u32, prefix: u64) -> Option<u64> {
        if free <= SLICE_BITS {
            return self.sweep(free, prefix);
        }
        let (must, may) = self.eval3(free, prefix);
        if must {
            return None;
        }
        if !may {
            return Some(prefix);
        }
        let bit = free - 1;
        self.dfs(bit, prefix).or_else(|| self.dfs(bit, prefix | 1 << bit))
    }

    /// Kleene evaluation at the target with positions below `free` unknown.
    /// Returns (certainly true, possibly true).
    fn eval3(&self, free: u32, prefix: u64) -> (bool, bool) {
        let fr = self.frame;
        let n = self.prog.ops.len();
        let mut must = vec![PointSet::EMPTY; n];
        let mut may = vec![PointSet::EMPTY; n];
        for i in 0..n {
            let need = self.need[i];
            let (t, m) = match self.prog.ops[i] {
                Op::Atom(v) => {
                    let mut t = PointSet::EMPTY;
                    let mut m = PointSet::EMPTY;
                    for p in need.iter() {
                        if let Some(&k) = self.bit_of.get(&(v, p)) {
                            if k < free {
                                m.insert(p);
                            } else if prefix >> k & 1 == 1 {
                                t.insert(p);
                                m.insert(p);
                            }
                        }
                    }
                    (t, m)
                }
                Op::Bot => (PointSet::EMPTY, PointSet::EMPTY),
                Op::Imp(a, b) => {
                    let (a, b) = (a as usize, b as usize);
                    (((need - may[a]) | must[b]) & need, ((need - must[a]) | may[b]) & need)
                }
                Op::Box(a) => {
                    let a = a as usize;
                    let mut t = PointSet::EMPTY;
                    let mut m = PointSet::EMPTY;
                    for p in need.iter() {
                        let s = fr.succ(p);
                        if s.is_subset(&must[a]) {
                            t.insert(p);
                        }
                        if s.is_subset(&may[a]) {
                            m.insert(p);
                        }
                    }
                    (t, m)
                }
                Op::PDia(a) => {
                    let a = a as usize;
                    let mut t = PointSet::EMPTY;
                    let mut m = PointSet::EMPTY;
                    for p in need.iter() {
                        let s = fr.pred(p);
                        if s.intersects(&must[a]) {
                            t.insert(p);
                        }
                        if s.intersects(&may[a]) {
                            m.insert(p);
                        }
                    }
                    (t, m)
                }
            };
            must[i] = t;
            may[i] = m;
        }
        let root = self.prog.root();
        (must[root].contains(self.target), may[root].contains(self.target))
    }

    /// Runs through all completions of the low `free` bits, 64 at a time.
    fn sweep(&self, free: u32, prefix: u64) -> Option<u64> {
        let n_ops = self.prog.ops.len();
        let n_pts = self.frame.len();
        let mut val = vec![0u64; n_ops * n_pts];
        let need_lists: Vec<Vec<usize>> = self.need.iter().map(|s| s.iter().collect()).collect();
        let lane_bits = free.min(6);
        let mask = if lane_bits == 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << lane_bits)) - 1
        };
        let batches = 1u64 << free.saturating_sub(6);
        let root = self.prog.root();
        for batch in 0..batches {
            for i in 0..n_ops {
                let base = i * n_pts;
                match self.prog.ops[i] {
                    Op::Atom(v) => {
                        for &p in &need_lists[i] {
                            val[base + p] = match self.bit_of.get(&(v, p)) {
                                None => 0,
                                Some(&k) if k >= free => {
                                    if prefix >> k & 1 == 1 {
                                        u64::MAX
                                    } else {
                                        0
                                    }
                                }
                                Some(&k) if k < 6 => LANES[k as usize],
                                Some(&k) => {
                                    if batch >> (k - 6) & 1 == 1 {
                                        u64::MAX
                                    } else {
                                        0
                                    }
                                }
                            };
                        }
                    }
                    Op::Bot => {
                        for &p in &need_lists[i] {
                            val[base + p] = 0;
                        }
                    }
                    Op::Imp(a, b) => {
                        let (a, b) = (a as usize * n_pts, b as usize * n_pts);
                        for &p in &need_lists[i] {
                            val[base + p] = !val[a + p] | val[b + p];
                        }
                    }
                    Op::Box(a) => {
                        let a = a as usize * n_pts;
                        for &p in &need_lists[i] {
                            val[base + p] = self.succ_lists[p].iter().fold(u64::MAX, |acc, &q| acc & val[a + q]);
                        }
                    }
                    Op::PDia(a) => {
                        let a = a as usize * n_pts;
                        for &p in &need_lists[i] {
                            val[base + p] = self.pred_lists[p].iter().fold(0, |acc, &q| acc | val[a + q]);
                        }
                    }
                }
            }
            let failing = !val[root * n_pts + self.target] & mask;
            if failing != 0 {
                return Some(prefix | batch << 6 | failing.trailing_zeros() as u64);
            }
        }
        None
    }
}
