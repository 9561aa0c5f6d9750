//! The valuation search against an exhaustive sweep through a separate
//! evaluator.

mod common;

use common::{arb_formula, brute_refutation, frame_from_mask};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tlk_core::catalog::{chain, garland, hoop};
use tlk_core::formulas::{random_formula, schema, Param, Schema};
use tlk_core::frames::{Closure, PointSet};
use tlk_core::semantics::{valid_at, Options, Validity};

fn agrees(f: &tlk_core::frames::Frame, x: usize, phi: &tlk_core::formulas::Formula) -> Result<(), String> {
    let expected = brute_refutation(f, x, phi);
    let got = valid_at(f, x, phi, Options::default()).map_err(|e| e.to_string())?;
    match (expected, got) {
        (None, Validity::Valid) => Ok(()),
        (Some(val), Validity::Refuted(cm)) => {
            let norm = |m: &std::collections::BTreeMap<u32, PointSet>| {
                phi.variables()
                    .into_iter()
                    .map(|v| m.get(&v).copied().unwrap_or(PointSet::EMPTY))
                    .collect::<Vec<_>>()
            };
            if cm.point == x && norm(&cm.valuation) == norm(&val) {
                Ok(())
            } else {
                Err(format!(
                    "{}: least refutation {:?}, search gave {:?}",
                    phi.render(),
                    norm(&val),
                    norm(&cm.valuation)
                ))
            }
        }
        (e, g) => Err(format!("{}: sweep {:?}, search {:?}", phi.render(), e.is_some(), g)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn search_matches_sweep(
        n in 1..=3usize,
        mask in any::<u64>(),
        closed in any::<bool>(),
        phi in arb_formula(2, 4),
    ) {
        let closure = if closed { Closure::ReflexiveTransitive } else { Closure::None };
        let f = frame_from_mask(n, mask, closure);
        for x in 0..n {
            prop_assert_eq!(agrees(&f, x, &phi), Ok(()));
        }
    }
}

#[test]
fn search_matches_sweep_on_catalog_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let frames = [chain(3).unwrap(), garland(3).unwrap(), hoop(3).unwrap()];
    for _ in 0..150 {
        let phi = random_formula(&mut rng, 2, 3, 10);
        for f in &frames {
            for x in 0..f.len() {
                assert_eq!(agrees(f, x, &phi), Ok(()));
            }
        }
    }
}

#[test]
fn schemas_match_sweep() {
    let frames = [chain(2).unwrap(), chain(3).unwrap(), garland(2).unwrap()];
    let cases = [
        (Schema::Tab, Some(Param::N(1))),
        (Schema::Bd, Some(Param::N(2))),
        (Schema::Bz, Some(Param::N(1))),
        (Schema::BwPlus, Some(Param::N(1))),
        (Schema::AltMinus, Some(Param::N(1))),
        (Schema::Grz, None),
        (Schema::LinPlus, None),
        (Schema::S5, None),
    ];
    for (s, p) in cases {
        let phi = schema(s, p).unwrap();
        for f in &frames {
            for x in 0..f.len() {
                assert_eq!(agrees(f, x, &phi), Ok(()), "{}", s.name());
            }
        }
    }
}
