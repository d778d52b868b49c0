//! The span category of cut-and-move morphisms.
//!
//! A morphism is an equivalence class of spans: a sub-map (cutting) followed
//! by a shuffle (moving). Representatives are kept in a normal form that
//! sorts the apex by (target fiber, component); fiber disjointness makes the
//! sort key unique, so equality is structural. Cofibrations are spans with a
//! covering sub-map and injective shuffle set map; weak equivalences have a
//! bijective one.

use thiserror::Error;

use crate::complex::{ComplexError, ObjectId, PolytopeComplex};
use crate::twist::{
    enumerate, factor_over, horizontal_pushout, is_covering_sub_map, pullback_along_shuffle,
    pushforward, vertical_pullback, Shuffle, SubMap, TwObject, TwistError,
};

#[derive(Debug, Error)]
pub enum ScError {
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    #[error("expected a cofibration")]
    NotCofibration,
    #[error("expected an isomorphism")]
    NotIsomorphism,
    #[error("enumeration exceeds the limit of {0} morphisms")]
    EnumerationLimit(usize),
    #[error("internal construction failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A normalized span `src <= apex -> dst`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScMorphism {
    src: TwObject,
    dst: TwObject,
    /// apex -> src
    p: SubMap,
    /// apex -> dst
    sigma: Shuffle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorphismKind {
    pub is_cofibration: bool,
    pub is_weak_equivalence: bool,
    pub is_isomorphism: bool,
}

impl ScMorphism {
    pub fn new(
        cx: &PolytopeComplex,
        p: SubMap,
        sigma: Shuffle,
    ) -> Result<ScMorphism, ScError> {
        if p.src != sigma.src {
            return Err(ScError::Boundary("legs do not share an apex".into()));
        }
        Ok(normalize(cx, p, sigma))
    }

    pub fn identity(cx: &PolytopeComplex, a: &TwObject) -> ScMorphism {
        normalize(cx, SubMap::identity(a), Shuffle::identity(cx, a))
    }

    /// The span with empty apex; for `dst` the empty family this is the
    /// canonical morphism to the zero object.
    pub fn empty_span(cx: &PolytopeComplex, src: &TwObject, dst: &TwObject) -> ScMorphism {
        normalize(cx, SubMap::from_empty(src), Shuffle::from_empty(dst))
    }

    pub fn src(&self) -> &TwObject {
        &self.src
    }

    pub fn dst(&self) -> &TwObject {
        &self.dst
    }

    pub fn sub_map(&self) -> &SubMap {
        &self.p
    }

    pub fn shuffle(&self) -> &Shuffle {
        &self.sigma
    }

    pub fn apex(&self) -> &TwObject {
        &self.p.src
    }

    pub fn display(&self, cx: &PolytopeComplex) -> String {
        format!(
            "{} <= {} -> {}",
            self.src.display(cx),
            self.apex().display(cx),
            self.dst.display(cx)
        )
    }
}

/// Sorts the apex by (fiber, component id); disjointness makes the key
/// strictly increasing, so equal morphisms get identical representatives.
fn normalize(cx: &PolytopeComplex, p: SubMap, sigma: Shuffle) -> ScMorphism {
    let n = p.src.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (p.map[i], p.src.component(i)));
    let apex = TwObject::new(
        cx,
        order.iter().map(|&i| p.src.component(i)).collect(),
    )
    .expect("apex components are polytopes");
    let p_norm = SubMap {
        src: apex.clone(),
        dst: p.dst.clone(),
        map: order.iter().map(|&i| p.map[i]).collect(),
    };
    let sigma_norm = Shuffle {
        src: apex,
        dst: sigma.dst.clone(),
        map: order.iter().map(|&i| sigma.map[i]).collect(),
        comps: order.iter().map(|&i| sigma.comps[i]).collect(),
    };
    ScMorphism {
        src: p.dst,
        dst: sigma.dst,
        p: p_norm,
        sigma: sigma_norm,
    }
}

/// `f` then `g`: pull `g`'s sub-map back along `f`'s shuffle and compose the
/// legs. Independent of representatives.
pub fn sc_compose(
    cx: &PolytopeComplex,
    f: &ScMorphism,
    g: &ScMorphism,
) -> Result<ScMorphism, ScError> {
    if f.dst != g.src {
        return Err(ScError::Boundary(format!(
            "target {:?} differs from source {:?}",
            f.dst, g.src
        )));
    }
    let (_, q_star, sigma_tilde) = pullback_along_shuffle(cx, &f.sigma, &g.p)?;
    let p = f.p.compose(cx, &q_star)?;
    let sigma = g.sigma.compose(cx, &sigma_tilde)?;
    ScMorphism::new(cx, p, sigma)
}

pub fn sc_equal(f: &ScMorphism, g: &ScMorphism) -> bool {
    f == g
}

pub fn classify(cx: &PolytopeComplex, f: &ScMorphism) -> MorphismKind {
    let covering = is_covering_sub_map(cx, &f.p);
    let injective = f.sigma.is_injective();
    let bijective = f.sigma.is_bijective();
    MorphismKind {
        is_cofibration: covering && injective,
        is_weak_equivalence: covering && bijective,
        is_isomorphism: f.p.is_reindexing() && bijective,
    }
}

/// Two-sided inverse of an isomorphism.
pub fn sc_invert(cx: &PolytopeComplex, f: &ScMorphism) -> Result<ScMorphism, ScError> {
    if !classify(cx, f).is_isomorphism {
        return Err(ScError::NotIsomorphism);
    }
    // Reindex the apex onto the source, then invert the pure shuffle.
    let mut to_src = vec![0usize; f.src.len()];
    for (i, &j) in f.p.map.iter().enumerate() {
        to_src[j] = i;
    }
    let mu = Shuffle::new(
        cx,
        f.src.clone(),
        f.dst.clone(),
        to_src.iter().map(|&i| f.sigma.map[i]).collect(),
        to_src.iter().map(|&i| f.sigma.comps[i]).collect(),
    )?;
    let mu_inv = mu.invert(cx)?;
    ScMorphism::new(cx, SubMap::identity(&f.dst), mu_inv)
}

/// Coproduct: concatenation with index offsets. The empty list yields the
/// identity of the zero object.
pub fn sc_coproduct(
    cx: &PolytopeComplex,
    fs: &[ScMorphism],
) -> Result<ScMorphism, ScError> {
    let mut src = TwObject::empty();
    let mut dst = TwObject::empty();
    let mut apex = TwObject::empty();
    let mut pmap = Vec::new();
    let mut smap = Vec::new();
    let mut comps = Vec::new();
    for f in fs {
        let src_off = src.len();
        let dst_off = dst.len();
        src = src.concat(&f.src);
        dst = dst.concat(&f.dst);
        apex = apex.concat(f.apex());
        pmap.extend(f.p.map.iter().map(|&j| j + src_off));
        smap.extend(f.sigma.map.iter().map(|&j| j + dst_off));
        comps.extend(f.sigma.comps.iter().copied());
    }
    let p = SubMap::new(cx, apex.clone(), src, pmap)?;
    let sigma = Shuffle::new(cx, apex, dst, smap, comps)?;
    ScMorphism::new(cx, p, sigma)
}

/// Result of pushing `f : A -> C` out along a cofibration `c : A -> B`.
#[derive(Debug, Clone)]
pub struct ScPushout {
    pub vertex: TwObject,
    pub from_c: ScMorphism,
    pub from_b: ScMorphism,
}

/// Pushout along a cofibration.
///
/// The two sub-map legs are completed to a pullback, the refinement is pushed
/// forward along `f`'s shuffle for the C side and along the cofibration's
/// shuffle for the B side, and the resulting shuffles are pushed out
/// horizontally. `from_c` is a cofibration, and a weak equivalence if `c` is.
pub fn sc_pushout(
    cx: &PolytopeComplex,
    f: &ScMorphism,
    c: &ScMorphism,
) -> Result<ScPushout, ScError> {
    if f.src != c.src {
        return Err(ScError::Boundary("pushout legs source differ".into()));
    }
    if !classify(cx, c).is_cofibration {
        return Err(ScError::NotCofibration);
    }
    let q = &f.p; // A'' -> A
    let tau = &f.sigma; // A'' -> C
    let p = &c.p; // A' -> A, covering
    let sigma = &c.sigma; // A' -> B, injective set map

    // Common refinement of the two cuts.
    let (_, p_tilde, _q_tilde) = vertical_pullback(cx, q, p)?;
    // C side: push the refined cut forward along tau.
    let s = pushforward(cx, tau, &p_tilde)?; // C' -> C
    // Pull back to the apex of f and factor through the cofibration's cut.
    let (_, x_to_app, tau_tilde) = pullback_along_shuffle(cx, tau, &s)?;
    let x_to_a = q.compose(cx, &x_to_app)?;
    let r_prime = factor_over(cx, &x_to_a, p).ok_or_else(|| {
        ScError::Internal("pullback of the pushforward does not refine the cofibration".into())
    })?; // X -> A'
    // B side: push that forward along sigma.
    let r = pushforward(cx, sigma, &r_prime)?; // B' -> B
    let (_, w_to_ap, sigma_hat) = pullback_along_shuffle(cx, sigma, &r)?;
    // With an injective set map, pulling the pushforward back returns the
    // input up to re-indexing.
    let iota = factor_over(cx, &r_prime, &w_to_ap)
        .filter(|m| m.is_reindexing())
        .ok_or_else(|| {
            ScError::Internal("pullback of the pushforward is not a re-indexing".into())
        })?; // X -> sigma*B'
    let sigma_prime = Shuffle::new(
        cx,
        r_prime.src.clone(),
        sigma_hat.dst.clone(),
        iota.map.iter().map(|&n| sigma_hat.map[n]).collect(),
        iota.map.iter().map(|&n| sigma_hat.comps[n]).collect(),
    )?; // X -> B'
    let (vertex, from_cp, from_bp) = horizontal_pushout(cx, &tau_tilde, &sigma_prime)?;
    let from_c = ScMorphism::new(cx, s, from_cp)?;
    let from_b = ScMorphism::new(cx, r, from_bp)?;
    Ok(ScPushout {
        vertex,
        from_c,
        from_b,
    })
}

/// Result of collapsing a cofibration: the quotient map and its section.
#[derive(Debug, Clone)]
pub struct Cofiber {
    pub vertex: TwObject,
    pub quot: ScMorphism,
    pub section: ScMorphism,
}

/// Pushout of a cofibration along the map to the zero object. The quotient
/// keeps the components missed by the cofibration's shuffle, and the section
/// puts them back; the section is itself a cofibration.
pub fn cofiber(cx: &PolytopeComplex, c: &ScMorphism) -> Result<Cofiber, ScError> {
    let to_zero = ScMorphism::empty_span(cx, &c.src, &TwObject::empty());
    let pushout = sc_pushout(cx, &to_zero, c)?;
    let quot = pushout.from_b.clone();
    // The quotient's sub-map keeps whole components, so a pure shuffle runs
    // back: invert the quotient shuffle and re-include.
    let b_prime = &quot.p.src;
    for (i, &j) in quot.p.map.iter().enumerate() {
        if b_prime.component(i) != quot.p.dst.component(j) {
            return Err(ScError::Internal(
                "cofiber cut does not keep whole components".into(),
            ));
        }
    }
    let include = Shuffle::new(
        cx,
        b_prime.clone(),
        quot.p.dst.clone(),
        quot.p.map.clone(),
        b_prime
            .components()
            .iter()
            .map(|&c| cx.identity_h(c))
            .collect(),
    )?;
    let back = quot.sigma.invert(cx)?; // vertex -> B'
    let section_shuffle = include.compose(cx, &back)?;
    let section = ScMorphism::new(
        cx,
        SubMap::identity(&pushout.vertex),
        section_shuffle,
    )?;
    Ok(Cofiber {
        vertex: pushout.vertex,
        quot,
        section,
    })
}

/// All normal-form morphisms from `a` to `b` with apex size at most
/// `max_apex`, in a deterministic order. Exceeding `limit` is an error
/// rather than a silent truncation.
pub fn enumerate_sc_morphisms(
    cx: &PolytopeComplex,
    a: &TwObject,
    b: &TwObject,
    max_apex: usize,
    limit: usize,
) -> Result<Vec<ScMorphism>, ScError> {
    let mut out = std::collections::BTreeSet::new();
    for p in enumerate::submaps_into(cx, a, max_apex) {
        for sigma in enumerate::shuffles(cx, &p.src, b) {
            let m = ScMorphism::new(cx, p.clone(), sigma)?;
            out.insert(m);
            if out.len() > limit {
                return Err(ScError::EnumerationLimit(limit));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Mediating morphisms for a cocone over a pushout, found by exhaustion:
/// morphisms `m : vertex -> e` with `m . from_c = u` and `m . from_b = v`.
pub fn find_mediating(
    cx: &PolytopeComplex,
    pushout: &ScPushout,
    f: &ScMorphism,
    c: &ScMorphism,
    u: &ScMorphism,
    v: &ScMorphism,
    max_apex: usize,
    limit: usize,
) -> Result<Vec<ScMorphism>, ScError> {
    let _ = (f, c);
    let mut out = Vec::new();
    for m in enumerate_sc_morphisms(cx, &pushout.vertex, u.dst(), max_apex, limit)? {
        let through_c = sc_compose(cx, &pushout.from_c, &m)?;
        if !sc_equal(&through_c, u) {
            continue;
        }
        let through_b = sc_compose(cx, &pushout.from_b, &m)?;
        if sc_equal(&through_b, v) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Generator classes used when relating objects: every object is the
/// coproduct of its singleton components.
pub fn singleton_components(cx: &PolytopeComplex, a: &TwObject) -> Vec<TwObject> {
    a.components()
        .iter()
        .map(|&c| TwObject::singleton(cx, c).expect("components are polytopes"))
        .collect()
}

pub use crate::complex::ObjectId as Generator;

/// Convenience: a covering span `a <= family -> a` built from a disjoint
/// covering family, as a weak equivalence source.
pub fn cover_span(
    cx: &PolytopeComplex,
    target: ObjectId,
    family: &[ObjectId],
) -> Result<ScMorphism, ScError> {
    let a = TwObject::singleton(cx, target)?;
    let apex = TwObject::new(cx, family.to_vec())?;
    let p = SubMap::new(cx, apex.clone(), a, vec![0; family.len()])?;
    ScMorphism::new(cx, p, Shuffle::identity(cx, &apex))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RawComplex;

    fn rats6() -> PolytopeComplex {
        let names: Vec<String> = (1..=6).map(|n| format!("({n})")).collect();
        let mut leq = Vec::new();
        for a in 1..=6usize {
            for b in 1..=6usize {
                if b % a == 0 {
                    leq.push((a - 1, b - 1));
                }
            }
        }
        RawComplex {
            names,
            bottom: Some(0),
            leq,
            basis: vec![(5, vec![1, 2])],
            ..Default::default()
        }
        .assemble()
        .unwrap()
    }

    fn ob(cx: &PolytopeComplex, n: usize) -> ObjectId {
        cx.object_by_name(&format!("({n})")).unwrap()
    }

    #[test]
    fn identity_laws() {
        let cx = rats6();
        let a = TwObject::new(&cx, vec![ob(&cx, 2), ob(&cx, 3)]).unwrap();
        let f = cover_span(&cx, ob(&cx, 6), &[ob(&cx, 2), ob(&cx, 3)]).unwrap();
        let id_src = ScMorphism::identity(&cx, f.src());
        let id_dst = ScMorphism::identity(&cx, f.dst());
        assert_eq!(sc_compose(&cx, &id_src, &f).unwrap(), f);
        assert_eq!(sc_compose(&cx, &f, &id_dst).unwrap(), f);
        let _ = a;
    }

    #[test]
    fn normalization_canonicalizes_apex_order() {
        let cx = rats6();
        let six = TwObject::singleton(&cx, ob(&cx, 6)).unwrap();
        let apex1 = TwObject::new(&cx, vec![ob(&cx, 2), ob(&cx, 3)]).unwrap();
        let apex2 = TwObject::new(&cx, vec![ob(&cx, 3), ob(&cx, 2)]).unwrap();
        let m1 = ScMorphism::new(
            &cx,
            SubMap::new(&cx, apex1.clone(), six.clone(), vec![0, 0]).unwrap(),
            Shuffle::identity(&cx, &apex1),
        )
        .unwrap();
        let m2 = ScMorphism::new(
            &cx,
            SubMap::new(&cx, apex2.clone(), six.clone(), vec![0, 0]).unwrap(),
            Shuffle {
                src: apex2.clone(),
                dst: apex1.clone(),
                map: vec![1, 0],
                comps: vec![
                    cx.identity_h(ob(&cx, 3)),
                    cx.identity_h(ob(&cx, 2)),
                ],
            },
        )
        .unwrap();
        assert!(sc_equal(&m1, &m2));
    }

    #[test]
    fn classify_cover_span() {
        let cx = rats6();
        let f = cover_span(&cx, ob(&cx, 6), &[ob(&cx, 2), ob(&cx, 3)]).unwrap();
        let kind = classify(&cx, &f);
        assert!(kind.is_weak_equivalence);
        assert!(kind.is_cofibration);
        assert!(!kind.is_isomorphism);
    }

    #[test]
    fn empty_coproduct_is_zero_identity() {
        let cx = rats6();
        let z = sc_coproduct(&cx, &[]).unwrap();
        assert_eq!(z, ScMorphism::identity(&cx, &TwObject::empty()));
    }
}
