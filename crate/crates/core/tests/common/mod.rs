//! Independent reference implementations used as oracles.

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use tlk_core::formulas::{Formula, Var};
use tlk_core::frames::{Closure, Frame, PointSet};

/// Direct evaluation over the full syntax, without expanding abbreviations.
pub fn eval(frame: &Frame, val: &BTreeMap<Var, PointSet>, phi: &Formula) -> PointSet {
    let all = frame.all();
    let pts = 0..frame.len();
    match phi {
        Formula::Atom(v) => val.get(v).copied().unwrap_or(PointSet::EMPTY),
        Formula::Bot => PointSet::EMPTY,
        Formula::Top => all,
        Formula::Not(a) => all - eval(frame, val, a),
        Formula::And(a, b) => eval(frame, val, a) & eval(frame, val, b),
        Formula::Or(a, b) => eval(frame, val, a) | eval(frame, val, b),
        Formula::Implies(a, b) => (all - eval(frame, val, a)) | eval(frame, val, b),
        Formula::FutBox(a) => {
            let t = eval(frame, val, a);
            pts.filter(|&x| frame.succ(x).is_subset(&t)).collect()
        }
        Formula::FutDia(a) => {
            let t = eval(frame, val, a);
            pts.filter(|&x| frame.succ(x).intersects(&t)).collect()
        }
        Formula::PastBox(a) => {
            let t = eval(frame, val, a);
            pts.filter(|&x| frame.pred(x).is_subset(&t)).collect()
        }
        Formula::PastDia(a) => {
            let t = eval(frame, val, a);
            pts.filter(|&x| frame.pred(x).intersects(&t)).collect()
        }
    }
}

/// Valuation number `idx`: bit `k * n + p` puts point `p` in the k-th
/// variable of `vars`.
pub fn valuation(vars: &[Var], n: usize, idx: u64) -> BTreeMap<Var, PointSet> {
    vars.iter()
        .enumerate()
        .map(|(k, &v)| (v, (0..n).filter(|&p| idx >> (k * n + p) & 1 == 1).collect()))
        .collect()
}

/// Least refuting valuation at `x`, by sweeping every valuation.
pub fn brute_refutation(frame: &Frame, x: usize, phi: &Formula) -> Option<BTreeMap<Var, PointSet>> {
    let vars: Vec<Var> = phi.variables().into_iter().collect();
    let n = frame.len();
    (0..1u64 << (vars.len() * n))
        .map(|i| valuation(&vars, n, i))
        .find(|val| !eval(frame, val, phi).contains(x))
}

pub fn frame_from_mask(n: usize, mask: u64, closure: Closure) -> Frame {
    let names = (0..n).map(|i| i.to_string()).collect();
    let succ = (0..n)
        .map(|i| (0..n).filter(|&j| mask >> (i * n + j) & 1 == 1).collect())
        .collect();
    Frame::from_successors(names, succ, closure).unwrap()
}

pub fn arb_closed_frame(max: usize) -> impl Strategy<Value = Frame> {
    (1..=max).prop_flat_map(|n| any::<u64>().prop_map(move |m| frame_from_mask(n, m, Closure::ReflexiveTransitive)))
}

pub fn arb_formula(vars: u32, depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (0..vars).prop_map(Formula::atom),
        Just(Formula::Bot),
        Just(Formula::Top),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            inner.clone().prop_map(Formula::fbox),
            inner.clone().prop_map(Formula::fdia),
            inner.clone().prop_map(Formula::pbox),
            inner.prop_map(Formula::pdia),
        ]
    })
}
