//! Structure-preserving maps between polytope complexes.

use super::validate::{Axiom, AxiomCheck, ValidationReport};
use super::{HMorId, ObjectId, PolytopeComplex};

/// A double functor between complexes, validated against cover continuity
/// (FC) and restriction compatibility (FP).
#[derive(Debug, Clone)]
pub struct PolytopeFunctor {
    source: PolytopeComplex,
    target: PolytopeComplex,
    /// Indexed by source object id.
    object_map: Vec<ObjectId>,
    /// Indexed by source morphism id.
    hmor_map: Vec<HMorId>,
}

impl PolytopeFunctor {
    pub fn new(
        source: PolytopeComplex,
        target: PolytopeComplex,
        object_map: Vec<ObjectId>,
        hmor_map: Vec<HMorId>,
    ) -> Self {
        assert_eq!(object_map.len(), source.object_count());
        assert_eq!(hmor_map.len(), source.hmor_count());
        PolytopeFunctor {
            source,
            target,
            object_map,
            hmor_map,
        }
    }

    pub fn identity(cx: PolytopeComplex) -> Self {
        let object_map = cx.objects().collect();
        let hmor_map = cx.hmor_ids().collect();
        PolytopeFunctor::new(cx.clone(), cx, object_map, hmor_map)
    }

    pub fn source(&self) -> &PolytopeComplex {
        &self.source
    }

    pub fn target(&self) -> &PolytopeComplex {
        &self.target
    }

    pub fn map_object(&self, x: ObjectId) -> ObjectId {
        self.object_map[x.index()]
    }

    pub fn map_hmor(&self, h: HMorId) -> HMorId {
        self.hmor_map[h.index()]
    }

    #[doc(hidden)]
    pub fn corrupt_object_map(&mut self, x: ObjectId, to: ObjectId) {
        self.object_map[x.index()] = to;
    }
}

/// Checks the functor invariants: (FC) bottom, order, meets and covers are
/// preserved vertically; (FP) endpoints, composition, inverses, identities
/// and the restriction action are preserved horizontally.
pub fn validate_functor(f: &PolytopeFunctor) -> ValidationReport {
    let src = &f.source;
    let tgt = &f.target;
    let mut fc = Vec::new();
    let mut fp = Vec::new();

    if f.map_object(src.bottom()) != tgt.bottom() {
        fc.push("bottom is not preserved".to_string());
    }
    for a in src.objects() {
        for b in src.objects() {
            if src.leq(a, b) && !tgt.leq(f.map_object(a), f.map_object(b)) {
                fc.push(format!(
                    "order pair (`{}`, `{}`) is not preserved",
                    src.name(a),
                    src.name(b)
                ));
            }
            match (src.meet_opt(a, b), tgt.meet_opt(f.map_object(a), f.map_object(b))) {
                (Some(m), Some(fm)) if f.map_object(m) != fm => fc.push(format!(
                    "meet of (`{}`, `{}`) is not preserved",
                    src.name(a),
                    src.name(b)
                )),
                (Some(_), None) => fc.push(format!(
                    "meet of (`{}`, `{}`) has no image meet",
                    src.name(a),
                    src.name(b)
                )),
                _ => {}
            }
        }
    }
    for x in src.polytopes() {
        for fam in src.covers_of(x) {
            let image: Vec<ObjectId> = fam.iter().map(|&m| f.map_object(m)).collect();
            let covered = tgt
                .is_cover(f.map_object(x), &image)
                .unwrap_or(false);
            if !covered {
                let names: Vec<&str> = fam.iter().map(|&m| src.name(m)).collect();
                fc.push(format!(
                    "cover {{{}}} of `{}` does not map to a cover of `{}`",
                    names.join(", "),
                    src.name(x),
                    tgt.name(f.map_object(x))
                ));
            }
        }
    }

    for h in src.hmor_ids() {
        let fh = f.map_hmor(h);
        if tgt.src(fh) != f.map_object(src.src(h)) || tgt.dst(fh) != f.map_object(src.dst(h)) {
            fp.push(format!(
                "endpoints of `{}` are not preserved",
                src.hmor_name(h)
            ));
        }
        if tgt.inverse_h(fh) != f.map_hmor(src.inverse_h(h)) {
            fp.push(format!(
                "inverse of `{}` is not preserved",
                src.hmor_name(h)
            ));
        }
    }
    for x in src.objects() {
        if f.map_hmor(src.identity_h(x)) != tgt.identity_h(f.map_object(x)) {
            fp.push(format!("identity of `{}` is not preserved", src.name(x)));
        }
    }
    for g in src.hmor_ids() {
        for h in src.hmor_ids() {
            if src.dst(h) != src.src(g) {
                continue;
            }
            let lhs = src.compose_h(g, h).map(|k| f.map_hmor(k));
            let rhs = tgt.compose_h(f.map_hmor(g), f.map_hmor(h));
            if lhs != rhs {
                fp.push(format!(
                    "composite `{}` after `{}` is not preserved",
                    src.hmor_name(g),
                    src.hmor_name(h)
                ));
            }
        }
    }
    for h in src.hmor_ids() {
        for &b in src.downset(src.dst(h)) {
            let Some((a, lift)) = src.restrict_opt(h, b) else {
                continue;
            };
            match tgt.restrict_opt(f.map_hmor(h), f.map_object(b)) {
                Some((fa, flift)) => {
                    if fa != f.map_object(a) || flift != f.map_hmor(lift) {
                        fp.push(format!(
                            "restriction of `{}` at `{}` is not preserved",
                            src.hmor_name(h),
                            src.name(b)
                        ));
                    }
                }
                None => fp.push(format!(
                    "restriction of the image of `{}` at `{}` is undefined",
                    src.hmor_name(h),
                    src.name(b)
                )),
            }
        }
    }

    ValidationReport {
        checks: vec![
            AxiomCheck {
                axiom: Axiom::FC,
                passed: fc.is_empty(),
                witnesses: fc,
            },
            AxiomCheck {
                axiom: Axiom::FP,
                passed: fp.is_empty(),
                witnesses: fp,
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil;
    use super::*;

    #[test]
    fn identity_functor_validates() {
        let f = PolytopeFunctor::identity(testutil::tiny());
        assert!(validate_functor(&f).passed());
    }

    #[test]
    fn corrupted_object_map_fails_fc() {
        let cx = testutil::tiny();
        let pt = cx.object_by_name("pt").unwrap();
        let bot = cx.bottom();
        let mut f = PolytopeFunctor::identity(cx);
        f.corrupt_object_map(pt, bot);
        let report = validate_functor(&f);
        assert!(!report.passed());
        assert!(!report.check(Axiom::FC).unwrap().passed);
    }
}
