//! Jankov-style formulas of bounded degree.
//!
//! `𝒥ᵏ(G, y)` is satisfiable at `x` in `F` exactly when there is a
//! k-t-morphism from `(F, x)` to `(G, y)`, so `¬𝒥ᵏ(G, y)` is refuted at `x`
//! exactly then.

use thiserror::Error;

use crate::formulas::{nabla, Formula};
use crate::frames::{Frame, PointSet, Radius};
use crate::semantics::{valid_at, Options, SemanticsError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JankovError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("point index {0} is outside the frame")]
    PointOutOfRange(usize),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jankov {
    pub formula: Formula,
    /// Points of `R♯ᵏ[y]`; variable `pᵢ` names `enumeration[i]`.
    pub enumeration: Vec<usize>,
}

/// `R♯ᵏ[y]` in breadth-first order from `y`, neighbours taken in
/// declaration order.
pub fn ball_enumeration(frame: &Frame, y: usize, k: u32) -> Vec<usize> {
    let ball = frame.zigzag_ball(y, Radius::Finite(k));
    let mut order = vec![y];
    let mut seen = PointSet::singleton(y);
    let mut head = 0;
    while head < order.len() {
        let z = order[head];
        head += 1;
        for w in ((frame.succ(z) | frame.pred(z)) & ball).iter() {
            if !seen.contains(w) {
                seen.insert(w);
                order.push(w);
            }
        }
    }
    order
}

/// Conjunction, in this order, of
/// `p₀ ∧ ∇ᵏ(p₀ ∨ … ∨ pₙ₋₁)`,
/// `∇ᵏ(pᵢ → ¬pⱼ)` for `i ≠ j`,
/// `∇ᵏ⁻¹((pᵢ → ◇pⱼ) ∧ (pⱼ → ♦pᵢ))` when `xᵢ` sees `xⱼ`, and
/// `∇ᵏ⁻¹((pᵢ → ¬◇pⱼ) ∧ (pⱼ → ¬♦pᵢ))` otherwise,
/// all as one left-nested conjunction.
pub fn jankov_formula(frame: &Frame, y: usize, k: u32) -> Result<Jankov, JankovError> {
    if k == 0 {
        return Err(JankovError::ZeroDegree);
    }
    if y >= frame.len() {
        return Err(JankovError::PointOutOfRange(y));
    }
    let enumeration = ball_enumeration(frame, y, k);
    let n = enumeration.len() as u32;
    let p = Formula::atom;
    let mut conjuncts = vec![p(0), nabla(k, &Formula::disj((0..n).map(p)))];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            conjuncts.push(nabla(k, &p(i).implies(p(j).not())));
        }
    }
    let mut seen = Vec::new();
    let mut unseen = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if frame.relates(enumeration[i as usize], enumeration[j as usize]) {
                seen.push(nabla(k - 1, &p(i).implies(p(j).fdia()).and(p(j).implies(p(i).pdia()))));
            } else {
                unseen.push(nabla(
                    k - 1,
                    &p(i).implies(p(j).fdia().not()).and(p(j).implies(p(i).pdia().not())),
                ));
            }
        }
    }
    conjuncts.extend(seen);
    conjuncts.extend(unseen);
    Ok(Jankov {
        formula: Formula::conj(conjuncts),
        enumeration,
    })
}

/// `¬𝒥ᵏ(G, y)`
pub fn negated_jankov(frame: &Frame, y: usize, k: u32) -> Result<Jankov, JankovError> {
    let j = jankov_formula(frame, y, k)?;
    Ok(Jankov {
        formula: j.formula.not(),
        enumeration: j.enumeration,
    })
}

/// Whether `¬𝒥ᵏ(G, y)` fails at `x` in `F`. A budget error is passed on;
/// `find_k_t_morphism` answers the same question without one.
pub fn jankov_refuted(f: &Frame, x: usize, g: &Frame, y: usize, k: u32, opts: Options) -> Result<bool, JankovError> {
    if x >= f.len() {
        return Err(JankovError::PointOutOfRange(x));
    }
    let j = negated_jankov(g, y, k)?;
    Ok(!valid_at(f, x, &j.formula, opts)?.is_valid())
}

/// The canonical valuation `pᵢ ↦ {xᵢ}` making `𝒥ᵏ(G, y)` true at `y`.
pub fn canonical_valuation(j: &Jankov) -> std::collections::BTreeMap<u32, PointSet> {
    j.enumeration
        .iter()
        .enumerate()
        .map(|(i, &x)| (i as u32, PointSet::singleton(x)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chain, garland, hoop};
    use crate::morphisms::{find_k_t_morphism, find_tmorphism_onto};
    use crate::semantics::{satisfies, Model};

    #[test]
    fn single_point_degree_one() {
        let c1 = chain(1).unwrap();
        let j = jankov_formula(&c1, 0, 1).unwrap();
        let p0 = Formula::atom(0);
        let expected = Formula::conj([
            p0.clone(),
            nabla(1, &p0),
            p0.clone()
                .implies(p0.clone().fdia())
                .and(p0.clone().implies(p0.clone().pdia())),
        ]);
        assert_eq!(j.formula, expected);
        assert_eq!(j.enumeration, vec![0]);
    }

    #[test]
    fn enumeration_is_breadth_first() {
        let g = garland(4).unwrap();
        assert_eq!(ball_enumeration(&g, 2, 2), vec![2, 1, 3, 0, 4]);
        assert_eq!(ball_enumeration(&g, 0, 1), vec![0, 1]);
    }

    #[test]
    fn modal_depth_is_the_degree() {
        let g = garland(3).unwrap();
        for k in 1..4 {
            assert_eq!(jankov_formula(&g, 0, k).unwrap().formula.modal_depth(), k);
        }
        assert_eq!(jankov_formula(&g, 0, 0), Err(JankovError::ZeroDegree));
    }

    #[test]
    fn canonical_valuation_satisfies() {
        let g = garland(3).unwrap();
        for y in 0..g.len() {
            for k in 1..3 {
                let j = jankov_formula(&g, y, k).unwrap();
                let m = Model::new(&g, canonical_valuation(&j)).unwrap();
                assert!(satisfies(&m, y, &j.formula).unwrap());
            }
        }
    }

    #[test]
    fn refutation_examples() {
        let (c1, c2) = (chain(1).unwrap(), chain(2).unwrap());
        let o = Options::default();
        assert!(jankov_refuted(&c2, 1, &c1, 0, 1, o).unwrap());
        assert!(!jankov_refuted(&c1, 0, &c2, 1, 1, o).unwrap());
        let g = garland(3).unwrap();
        for y in 0..g.len() {
            assert!(jankov_refuted(&g, y, &g, y, 1, o).unwrap());
        }
        assert_eq!(
            jankov_refuted(&c1, 3, &c1, 0, 1, o),
            Err(JankovError::PointOutOfRange(3))
        );
    }

    #[test]
    fn refutation_matches_local_morphisms() {
        let frames = [
            chain(1).unwrap(),
            chain(2).unwrap(),
            garland(2).unwrap(),
            garland(3).unwrap(),
            hoop(3).unwrap(),
        ];
        let o = Options::with_budget(32);
        for f in &frames {
            for g in &frames {
                for (x, y, k) in
                    (0..f.len()).flat_map(|x| (0..g.len()).flat_map(move |y| (1..=2).map(move |k| (x, y, k))))
                {
                    let local = find_k_t_morphism(f, x, g, y, k).unwrap().is_some();
                    assert_eq!(jankov_refuted(f, x, g, y, k, o).unwrap(), local);
                }
            }
        }
    }

    #[test]
    fn global_degree_detects_onto_maps() {
        // with k = zdg + 1 every ball around the root is the whole frame
        let frames = [
            garland(2).unwrap(),
            garland(3).unwrap(),
            garland(4).unwrap(),
            hoop(3).unwrap(),
            chain(2).unwrap(),
        ];
        let o = Options::with_budget(40);
        for f in &frames {
            let k = f.metrics().zdg + 1;
            for g in &frames {
                if g.len() > 4 {
                    continue;
                }
                let onto = find_tmorphism_onto(f, g).is_some();
                let refuted = (0..f.len()).any(|x| jankov_refuted(f, x, g, 0, k, o).unwrap());
                assert_eq!(refuted, onto);
            }
        }
    }
}
