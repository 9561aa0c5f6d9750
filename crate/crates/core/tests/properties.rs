mod common;

use std::collections::BTreeMap;

use common::{arb_closed_frame, arb_formula, eval, frame_from_mask};
use proptest::prelude::*;
use tlk_core::formulas::{delta, nabla, parse, schema, Formula, Param, Schema};
use tlk_core::frames::{Closure, Frame, PointSet, Radius};
use tlk_core::io::{read_frame, write_frame};
use tlk_core::jankov::{canonical_valuation, jankov_formula};
use tlk_core::morphisms::{check_tmorphism, enumerate_images, is_surjective, isomorphic};
use tlk_core::semantics::{truth_set, valid, valid_at, Model, Options};
use tlk_core::sequences::{embeds, gtm_stages, BitSeq};

fn arb_valuation(n: usize, vars: u32) -> impl Strategy<Value = BTreeMap<u32, PointSet>> {
    proptest::collection::vec(any::<u32>(), vars as usize).prop_map(move |masks| {
        masks
            .into_iter()
            .enumerate()
            .map(|(v, m)| (v as u32, (0..n).filter(|&p| m >> p & 1 == 1).collect()))
            .collect()
    })
}

fn frame_and_valuation(vars: u32) -> impl Strategy<Value = (Frame, BTreeMap<u32, PointSet>)> {
    (1..=5usize, any::<u64>(), any::<bool>()).prop_flat_map(move |(n, m, closed)| {
        let closure = if closed {
            Closure::ReflexiveTransitive
        } else {
            Closure::None
        };
        (Just(frame_from_mask(n, m, closure)), arb_valuation(n, vars))
    })
}

fn permuted(f: &Frame, perm: &[usize]) -> Frame {
    let n = f.len();
    let mut succ = vec![PointSet::EMPTY; n];
    for (x, y) in f.edges() {
        succ[perm[x]].insert(perm[y]);
    }
    let names = (0..n).map(|i| format!("q{i}")).collect();
    Frame::from_successors(names, succ, f.closure()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn render_parses_back(phi in arb_formula(3, 5)) {
        prop_assert_eq!(parse(&phi.render()).unwrap(), phi);
    }

    #[test]
    fn expansion_preserves_truth((f, val) in frame_and_valuation(3), phi in arb_formula(3, 4)) {
        let direct = eval(&f, &val, &phi);
        prop_assert_eq!(eval(&f, &val, &phi.expand()), direct);
        let model = Model::new(&f, val.clone()).unwrap();
        prop_assert_eq!(truth_set(&model, &phi).unwrap(), direct);
        prop_assert!(phi.expand().is_primitive());
    }

    #[test]
    fn delta_reads_the_zigzag_ball((f, val) in frame_and_valuation(1), n in 0..4u32) {
        let p = Formula::atom(0);
        let d = eval(&f, &val, &delta(n, &p));
        let b = eval(&f, &val, &nabla(n, &p));
        for x in 0..f.len() {
            let ball = f.zigzag_ball(x, Radius::Finite(n));
            prop_assert_eq!(d.contains(x), ball.intersects(&val[&0]));
            prop_assert_eq!(b.contains(x), ball.is_subset(&val[&0]));
        }
    }

    #[test]
    fn tab_and_depth_bounds(f in arb_closed_frame(5), n in 1..=3u32) {
        let tab = schema(Schema::Tab, Some(Param::N(n))).unwrap();
        let bd = schema(Schema::Bd, Some(Param::N(n))).unwrap();
        let pm = f.point_metrics();
        for x in 0..f.len() {
            let ball = f.zigzag_ball(x, Radius::Finite(n)).len();
            prop_assert_eq!(valid_at(&f, x, &tab, Options::default()).unwrap().is_valid(), ball <= n as usize);
            prop_assert_eq!(valid_at(&f, x, &bd, Options::default()).unwrap().is_valid(), pm[x].dep <= n);
        }
    }

    #[test]
    fn isomorphism_finds_relabellings(f in arb_closed_frame(6), seed in any::<u64>()) {
        let n = f.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let g = permuted(&f, &perm);
        let iso = isomorphic(&f, &g).expect("a relabelling is an isomorphism");
        prop_assert_eq!(check_tmorphism(&f, &g, &iso).unwrap(), None);
        let mut seen = iso.clone();
        seen.sort();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn images_are_surjective_tmorphisms_preserving_validity(
        f in arb_closed_frame(4),
        phi in arb_formula(1, 3),
    ) {
        let holds = valid(&f, &phi, Options::default()).unwrap().is_valid();
        for im in enumerate_images(&f).unwrap() {
            prop_assert_eq!(check_tmorphism(&f, &im.frame, &im.map).unwrap(), None);
            prop_assert!(is_surjective(&im.frame, &im.map));
            if holds {
                prop_assert!(valid(&im.frame, &phi, Options::default()).unwrap().is_valid());
            }
        }
    }

    #[test]
    fn inverse_swaps_widths(f in arb_closed_frame(5)) {
        let (m, i) = (f.metrics(), f.inverse().metrics());
        prop_assert_eq!((m.wid_f, m.wid_b, m.dep, m.zdg, m.gir), (i.wid_b, i.wid_f, i.dep, i.zdg, i.gir));
        prop_assert_eq!(f.closed(), f.clone());
        prop_assert!(f.skeleton().0.is_skeleton());
    }

    #[test]
    fn json_round_trip(f in arb_closed_frame(6)) {
        let (back, root) = read_frame(&write_frame(&f, Some("0"))).unwrap();
        prop_assert_eq!(back, f);
        prop_assert_eq!(root.as_deref(), Some("0"));
    }

    #[test]
    fn canonical_valuation_satisfies_jankov(f in arb_closed_frame(4), k in 1..=2u32) {
        for y in 0..f.len() {
            let j = jankov_formula(&f, y, k).unwrap();
            let model = Model::new(&f, canonical_valuation(&j)).unwrap();
            prop_assert!(truth_set(&model, &j.formula).unwrap().contains(y));
        }
    }

    #[test]
    fn thue_morse_stages_nest(f in proptest::collection::vec(any::<bool>(), 7)) {
        let stages = gtm_stages(&f, 7).unwrap();
        for w in stages.windows(2) {
            prop_assert_eq!(w[1].window(w[0].anchor, w[0].end()), w[0].clone());
            prop_assert_eq!(w[1].len(), 2 * w[0].len() + 1);
            prop_assert_eq!(embeds(&w[0].complement(), &w[1]).is_some(), true);
        }
    }

    #[test]
    fn windows_embed_at_their_own_place(bits in proptest::collection::vec(any::<bool>(), 1..20), anchor in -10i64..10, a in 0usize..20, b in 0usize..20) {
        let s = BitSeq::new(bits, anchor);
        let (lo, hi) = (a.min(b) as i64 + anchor, a.max(b) as i64 + anchor);
        let w = s.window(lo, hi);
        prop_assume!(!w.is_empty());
        prop_assert!(tlk_core::sequences::embeddings(&w, &s).contains(&0));
        prop_assert_eq!(s.complement().complement(), s);
    }
}

fn arb_substitution() -> impl Strategy<Value = Vec<Formula>> {
    proptest::collection::vec(arb_formula(3, 2), 3)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn substitution_composes(phi in arb_formula(3, 4), s in arb_substitution(), t in arb_substitution()) {
        let sf = |v: u32| s.get(v as usize).cloned();
        let tf = |v: u32| t.get(v as usize).cloned();
        let composed = |v: u32| sf(v).map(|f| f.substitute(&tf)).or_else(|| tf(v));
        prop_assert_eq!(phi.substitute(&sf).substitute(&tf), phi.substitute(&composed));
    }

    #[test]
    fn substitution_preserves_validity(f in arb_closed_frame(3), s in arb_substitution()) {
        // T is valid on reflexive frames under any instance
        let t = schema(Schema::T, None).unwrap();
        let inst = t.substitute(&|v: u32| s.get(v as usize).cloned());
        prop_assert!(valid(&f, &inst, Options::with_budget(12)).unwrap().is_valid());
    }
}
