//! c-irreducibility of pre-skeletons and shape classification of small
//! rooted frames.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::catalog::{self, recognize_preskeleton, CType, CatalogError};
use crate::frames::{Frame, FrameMetrics};
use crate::morphisms::{enumerate_images, isomorphic, Image, MorphismError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("point index {0} is outside the frame")]
    PointOutOfRange(usize),
    #[error("frame must be a rooted skeleton: {0}")]
    NotRootedSkeleton(&'static str),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
}

#[derive(Clone, Debug)]
pub struct CIrreducibility {
    pub irreducible: bool,
    /// An image of `F^x_1` that is neither isomorphic to it nor an image of
    /// `F`.
    pub witness: Option<Image>,
}

/// Decides whether blowing `x` up keeps all images inside the images of the
/// blown-up frames themselves and those of `F`. One extra point suffices
/// for the decision.
pub fn is_c_irreducible(frame: &Frame, x: usize) -> Result<CIrreducibility, ClassifyError> {
    if x >= frame.len() {
        return Err(ClassifyError::PointOutOfRange(x));
    }
    if !frame.is_closed() {
        return Err(ClassifyError::NotRootedSkeleton(
            "relation is not reflexive and transitive",
        ));
    }
    if !frame.is_rooted() {
        return Err(ClassifyError::NotRootedSkeleton("not rooted"));
    }
    if !frame.is_skeleton() {
        return Err(ClassifyError::NotRootedSkeleton("has a proper cluster"));
    }
    let blown = catalog::preskeleton(frame, x, 1)?;
    let base_images = enumerate_images(frame)?;
    for im in enumerate_images(&blown)? {
        if isomorphic(&im.frame, &blown).is_some() {
            continue;
        }
        if base_images.iter().any(|b| isomorphic(&b.frame, &im.frame).is_some()) {
            continue;
        }
        return Ok(CIrreducibility {
            irreducible: false,
            witness: Some(im),
        });
    }
    Ok(CIrreducibility {
        irreducible: true,
        witness: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PretabReport {
    pub rooted: bool,
    pub skeleton: bool,
    pub c_irreducible: Option<bool>,
    pub metrics: FrameMetrics,
    /// Rooted skeleton whose blow-up at the mark is c-irreducible.
    pub pretabular: bool,
}

pub fn pretabularity_report(frame: &Frame, x: usize) -> Result<PretabReport, ClassifyError> {
    if x >= frame.len() {
        return Err(ClassifyError::PointOutOfRange(x));
    }
    let rooted = frame.is_rooted();
    let skeleton = frame.is_closed() && frame.is_skeleton();
    let c_irreducible = if rooted && skeleton {
        Some(is_c_irreducible(frame, x)?.irreducible)
    } else {
        None
    };
    Ok(PretabReport {
        rooted,
        skeleton,
        c_irreducible,
        metrics: frame.metrics(),
        pretabular: c_irreducible == Some(true),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum S43Class {
    /// A finite chain with this many points.
    Chain(usize),
    /// A blown-up chain of one of the four types.
    Ct {
        ctype: CType,
        lambda: usize,
    },
    NotApplicable(String),
}

impl fmt::Display for S43Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            S43Class::Chain(n) => write!(f, "chain of {n} points"),
            S43Class::Ct { ctype, lambda } => write!(f, "C{ctype} with lambda {lambda}"),
            S43Class::NotApplicable(why) => write!(f, "not applicable: {why}"),
        }
    }
}

fn linear_guard(frame: &Frame) -> Option<String> {
    if !frame.is_closed() {
        return Some("relation is not reflexive and transitive".into());
    }
    if !frame.is_rooted() {
        return Some("not rooted".into());
    }
    let m = frame.metrics();
    if m.wid_f > 1 || m.wid_b > 1 {
        return Some(format!("widths ({}, {}) exceed 1", m.wid_f, m.wid_b));
    }
    None
}

/// Linear rooted frames: chains, or chains with one blown-up point whose
/// strict future and past each have at most one point.
pub fn classify_s43(frame: &Frame) -> S43Class {
    if let Some(why) = linear_guard(frame) {
        return S43Class::NotApplicable(why);
    }
    if frame.is_skeleton() {
        return S43Class::Chain(frame.len());
    }
    let pre = match recognize_preskeleton(frame) {
        Ok(p) => p,
        Err(e) => return S43Class::NotApplicable(e.to_string()),
    };
    let fp = fingerprint(frame);
    match CType::from_fingerprint(fp) {
        Some(ctype) => S43Class::Ct {
            ctype,
            lambda: pre.lambda,
        },
        None => S43Class::NotApplicable(format!("fingerprint ({}, {}) is not one of the four types", fp.0, fp.1)),
    }
}

/// Sizes of the strict future and strict past of the unique proper
/// cluster (or of the root's cluster when there is none).
pub fn fingerprint(frame: &Frame) -> (usize, usize) {
    let c = frame
        .clusters()
        .into_iter()
        .find(|c| c.len() > 1)
        .unwrap_or_else(|| frame.cluster_of(0));
    let x = c.first().unwrap();
    ((frame.succ(x) - c).len(), (frame.pred(x) - c).len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Garland(u32),
    CoGarland(u32),
    Hoop(u32),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Garland(n) => write!(f, "garland {n}"),
            Family::CoGarland(n) => write!(f, "co-garland {n}"),
            Family::Hoop(n) => write!(f, "hoop {n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bs222Class {
    Member(Family),
    NotApplicable(String),
}

/// Rooted skeletons with depth and both widths at most 2. Garlands are
/// tried first, then co-garlands, then hoops, so frames in two families
/// (the two-chain, odd garlands) get the first tag.
pub fn classify_bs222(frame: &Frame) -> Bs222Class {
    if !frame.is_closed() {
        return Bs222Class::NotApplicable("relation is not reflexive and transitive".into());
    }
    if !frame.is_rooted() {
        return Bs222Class::NotApplicable("not rooted".into());
    }
    if !frame.is_skeleton() {
        return Bs222Class::NotApplicable("has a proper cluster".into());
    }
    let m = frame.metrics();
    for (name, v) in [("dep", m.dep), ("widF", m.wid_f), ("widB", m.wid_b)] {
        if v > 2 {
            return Bs222Class::NotApplicable(format!("{name} {v} > 2"));
        }
    }
    let n = frame.len() as u32 - 1;
    let mut candidates = vec![
        (Family::Garland(n), catalog::garland(n)),
        (Family::CoGarland(n), catalog::co_garland(n)),
    ];
    if n % 2 == 1 {
        candidates.push((Family::Hoop(n), catalog::hoop(n)));
    }
    for (fam, g) in candidates {
        if let Ok(g) = g {
            if isomorphic(frame, &g).is_some() {
                return Bs222Class::Member(fam);
            }
        }
    }
    Bs222Class::NotApplicable("no garland, co-garland or hoop of this size matches".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chain, co_garland, ct, fig1, fig2, garland, hoop};

    #[test]
    fn fig_frames() {
        let p1 = recognize_preskeleton(&fig1()).unwrap();
        let r1 = is_c_irreducible(&p1.skeleton, p1.mark).unwrap();
        assert!(!r1.irreducible);
        assert!(isomorphic(&r1.witness.unwrap().frame, &fig2()).is_some());
        let p2 = recognize_preskeleton(&fig2()).unwrap();
        assert!(is_c_irreducible(&p2.skeleton, p2.mark).unwrap().irreducible);
    }

    #[test]
    fn s43_types() {
        for t in CType::ALL {
            assert_eq!(classify_s43(&ct(t, 2).unwrap()), S43Class::Ct { ctype: t, lambda: 2 });
        }
        assert_eq!(classify_s43(&chain(4).unwrap()), S43Class::Chain(4));
        assert!(matches!(classify_s43(&garland(2).unwrap()), S43Class::NotApplicable(_)));
        let top_blown = catalog::preskeleton(&chain(3).unwrap(), 0, 1).unwrap();
        assert!(matches!(classify_s43(&top_blown), S43Class::NotApplicable(_)));
    }

    #[test]
    fn bs222_examples() {
        assert_eq!(
            classify_bs222(&co_garland(4).unwrap()),
            Bs222Class::Member(Family::CoGarland(4))
        );
        assert_eq!(classify_bs222(&hoop(5).unwrap()), Bs222Class::Member(Family::Hoop(5)));
        assert_eq!(
            classify_bs222(&garland(3).unwrap()),
            Bs222Class::Member(Family::Garland(3))
        );
        assert_eq!(
            classify_bs222(&chain(3).unwrap()),
            Bs222Class::NotApplicable("dep 3 > 2".into())
        );
    }

    // The smallest hoop is the two-chain, so its blow-ups are two of the
    // linear types and stay irreducible; from three on every blow-up reduces.
    #[test]
    fn hoop_blow_ups() {
        let h1 = hoop(1).unwrap();
        assert!(isomorphic(&h1, &chain(2).unwrap()).is_some());
        for m in 0..2 {
            assert!(is_c_irreducible(&h1, m).unwrap().irreducible);
        }
        for n in [3, 5] {
            let h = hoop(n).unwrap();
            for m in 0..=n as usize {
                assert!(!is_c_irreducible(&h, m).unwrap().irreducible, "hoop {n} at {m}");
            }
        }
    }

    #[test]
    fn pretab_report_of_chain_marks() {
        let r = pretabularity_report(&chain(2).unwrap(), 0).unwrap();
        assert!(r.pretabular);
        let r = pretabularity_report(&chain(3).unwrap(), 0).unwrap();
        assert_eq!(r.c_irreducible, Some(false));
    }
}
