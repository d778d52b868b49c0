//! Indexed families of polytopes and their two kinds of morphisms.
//!
//! A `TwObject` is a finite ordered family of non-bottom objects. A `SubMap`
//! places each component below a component of its target with pairwise
//! disjoint fibers (pieces laid inside a shape without overlap); a `Shuffle`
//! moves each component along a horizontal morphism and re-indexes. The
//! operations here move vertical data along horizontal morphisms: pullbacks,
//! the right adjoint pushforward, and pushouts along injective set maps.

use thiserror::Error;

use crate::complex::{ComplexError, HMorId, ObjectId, PolytopeComplex};

#[derive(Debug, Error)]
pub enum TwistError {
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    #[error("components must be polytopes (`{0}` is the bottom)")]
    BottomComponent(String),
    #[error("not a sub-map: {0}")]
    NotSubMap(String),
    #[error("not a shuffle: {0}")]
    NotShuffle(String),
    #[error("set map of the pushed shuffle must be injective")]
    NonInjectivePushout,
    #[error("the right-hand square is not a pullback square")]
    NotPullbackSquare,
    #[error("the grid does not commute")]
    GridDoesNotCommute,
    #[error("no factorization: {0}")]
    NoFactorization(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A finite ordered family of polytopes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwObject {
    components: Vec<ObjectId>,
}

impl TwObject {
    pub fn new(cx: &PolytopeComplex, components: Vec<ObjectId>) -> Result<Self, TwistError> {
        for &c in &components {
            if cx.is_bottom(c) {
                return Err(TwistError::BottomComponent(cx.name(c).to_string()));
            }
        }
        Ok(TwObject { components })
    }

    pub fn empty() -> Self {
        TwObject {
            components: Vec::new(),
        }
    }

    pub fn singleton(cx: &PolytopeComplex, c: ObjectId) -> Result<Self, TwistError> {
        TwObject::new(cx, vec![c])
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, i: usize) -> ObjectId {
        self.components[i]
    }

    pub fn components(&self) -> &[ObjectId] {
        &self.components
    }

    /// Concatenation, the coproduct on objects.
    pub fn concat(&self, other: &TwObject) -> TwObject {
        let mut components = self.components.clone();
        components.extend(&other.components);
        TwObject { components }
    }

    pub fn display(&self, cx: &PolytopeComplex) -> String {
        let names: Vec<&str> = self.components.iter().map(|&c| cx.name(c)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// A vertical morphism with disjoint fibers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubMap {
    pub src: TwObject,
    pub dst: TwObject,
    /// `map[i]` is the target index of source component `i`.
    pub map: Vec<usize>,
}

impl SubMap {
    pub fn new(
        cx: &PolytopeComplex,
        src: TwObject,
        dst: TwObject,
        map: Vec<usize>,
    ) -> Result<Self, TwistError> {
        let p = SubMap { src, dst, map };
        p.check(cx)?;
        Ok(p)
    }

    fn check(&self, cx: &PolytopeComplex) -> Result<(), TwistError> {
        if self.map.len() != self.src.len() {
            return Err(TwistError::NotSubMap(
                "set map length differs from the source".into(),
            ));
        }
        for (i, &j) in self.map.iter().enumerate() {
            if j >= self.dst.len() {
                return Err(TwistError::NotSubMap(format!(
                    "index {j} out of range for the target"
                )));
            }
            if !cx.leq(self.src.component(i), self.dst.component(j)) {
                return Err(TwistError::NotSubMap(format!(
                    "component `{}` is not below `{}`",
                    cx.name(self.src.component(i)),
                    cx.name(self.dst.component(j))
                )));
            }
        }
        for i in 0..self.src.len() {
            for k in i + 1..self.src.len() {
                if self.map[i] != self.map[k] {
                    continue;
                }
                let m = cx.meet(self.src.component(i), self.src.component(k))?;
                if !cx.is_bottom(m) {
                    return Err(TwistError::NotSubMap(format!(
                        "components `{}` and `{}` overlap in one fiber",
                        cx.name(self.src.component(i)),
                        cx.name(self.src.component(k))
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(a: &TwObject) -> SubMap {
        SubMap {
            src: a.clone(),
            dst: a.clone(),
            map: (0..a.len()).collect(),
        }
    }

    /// The unique map from the empty family.
    pub fn from_empty(dst: &TwObject) -> SubMap {
        SubMap {
            src: TwObject::empty(),
            dst: dst.clone(),
            map: Vec::new(),
        }
    }

    /// Source indices over target index `j`.
    pub fn fiber(&self, j: usize) -> Vec<usize> {
        (0..self.map.len()).filter(|&i| self.map[i] == j).collect()
    }

    /// `self` after `inner`.
    pub fn compose(&self, cx: &PolytopeComplex, inner: &SubMap) -> Result<SubMap, TwistError> {
        if inner.dst != self.src {
            return Err(TwistError::Boundary(
                "sub-map composition endpoints differ".into(),
            ));
        }
        let map = inner.map.iter().map(|&m| self.map[m]).collect();
        SubMap::new(cx, inner.src.clone(), self.dst.clone(), map)
    }

    /// Index bijection with equal components.
    pub fn is_reindexing(&self) -> bool {
        if self.src.len() != self.dst.len() {
            return false;
        }
        let mut seen = vec![false; self.dst.len()];
        for (i, &j) in self.map.iter().enumerate() {
            if seen[j] || self.src.component(i) != self.dst.component(j) {
                return false;
            }
            seen[j] = true;
        }
        true
    }
}

/// A horizontal morphism: componentwise motions plus a re-indexing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shuffle {
    pub src: TwObject,
    pub dst: TwObject,
    pub map: Vec<usize>,
    /// `comps[i] : src[i] -> dst[map[i]]`.
    pub comps: Vec<HMorId>,
}

impl Shuffle {
    pub fn new(
        cx: &PolytopeComplex,
        src: TwObject,
        dst: TwObject,
        map: Vec<usize>,
        comps: Vec<HMorId>,
    ) -> Result<Self, TwistError> {
        let s = Shuffle {
            src,
            dst,
            map,
            comps,
        };
        s.check(cx)?;
        Ok(s)
    }

    fn check(&self, cx: &PolytopeComplex) -> Result<(), TwistError> {
        if self.map.len() != self.src.len() || self.comps.len() != self.src.len() {
            return Err(TwistError::NotShuffle(
                "set map length differs from the source".into(),
            ));
        }
        for (i, (&j, &h)) in self.map.iter().zip(&self.comps).enumerate() {
            if j >= self.dst.len() {
                return Err(TwistError::NotShuffle(format!(
                    "index {j} out of range for the target"
                )));
            }
            if cx.src(h) != self.src.component(i) || cx.dst(h) != self.dst.component(j) {
                return Err(TwistError::NotShuffle(format!(
                    "component `{}` does not run `{}` -> `{}`",
                    cx.hmor_name(h),
                    cx.name(self.src.component(i)),
                    cx.name(self.dst.component(j))
                )));
            }
        }
        Ok(())
    }

    pub fn identity(cx: &PolytopeComplex, a: &TwObject) -> Shuffle {
        Shuffle {
            src: a.clone(),
            dst: a.clone(),
            map: (0..a.len()).collect(),
            comps: a.components().iter().map(|&c| cx.identity_h(c)).collect(),
        }
    }

    pub fn from_empty(dst: &TwObject) -> Shuffle {
        Shuffle {
            src: TwObject::empty(),
            dst: dst.clone(),
            map: Vec::new(),
            comps: Vec::new(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.dst.len()];
        for &j in &self.map {
            if seen[j] {
                return false;
            }
            seen[j] = true;
        }
        true
    }

    pub fn is_bijective(&self) -> bool {
        self.src.len() == self.dst.len() && self.is_injective()
    }

    /// `self` after `inner`.
    pub fn compose(&self, cx: &PolytopeComplex, inner: &Shuffle) -> Result<Shuffle, TwistError> {
        if inner.dst != self.src {
            return Err(TwistError::Boundary(
                "shuffle composition endpoints differ".into(),
            ));
        }
        let map: Vec<usize> = inner.map.iter().map(|&m| self.map[m]).collect();
        let comps: Vec<HMorId> = inner
            .map
            .iter()
            .zip(&inner.comps)
            .map(|(&m, &h)| {
                cx.compose_h(self.comps[m], h)
                    .expect("composable on a validated complex")
            })
            .collect();
        Shuffle::new(cx, inner.src.clone(), self.dst.clone(), map, comps)
    }

    /// Inverse of a bijective shuffle.
    pub fn invert(&self, cx: &PolytopeComplex) -> Result<Shuffle, TwistError> {
        if !self.is_bijective() {
            return Err(TwistError::NotShuffle(
                "only bijective shuffles invert".into(),
            ));
        }
        let mut map = vec![0; self.src.len()];
        let mut comps = vec![cx.identity_h(cx.bottom()); self.src.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j] = i;
            comps[j] = cx.inverse_h(self.comps[i]);
        }
        Shuffle::new(cx, self.dst.clone(), self.src.clone(), map, comps)
    }

    /// Splits into a pure componentwise map followed by a pure set map.
    pub fn factor(&self, cx: &PolytopeComplex) -> (Shuffle, Shuffle) {
        let mid = TwObject {
            components: self.map.iter().map(|&j| self.dst.component(j)).collect(),
        };
        let pure_comp = Shuffle {
            src: self.src.clone(),
            dst: mid.clone(),
            map: (0..self.src.len()).collect(),
            comps: self.comps.clone(),
        };
        let pure_set = Shuffle {
            src: mid.clone(),
            dst: self.dst.clone(),
            map: self.map.clone(),
            comps: mid.components().iter().map(|&c| cx.identity_h(c)).collect(),
        };
        (pure_comp, pure_set)
    }
}

/// True iff every fiber of `p` is a covering family of its target component.
pub fn is_covering_sub_map(cx: &PolytopeComplex, p: &SubMap) -> bool {
    for j in 0..p.dst.len() {
        let family: Vec<ObjectId> = p.fiber(j).iter().map(|&i| p.src.component(i)).collect();
        if !cx
            .is_cover(p.dst.component(j), &family)
            .unwrap_or(false)
        {
            return false;
        }
    }
    true
}

/// Mixed-square commutation: the top shuffle together with the left vertical
/// must be exactly the restriction data of the bottom shuffle at the right
/// vertical (unique lifts make any other square datum redundant).
pub fn square_commutes(
    cx: &PolytopeComplex,
    p: &SubMap,
    sigma: &Shuffle,
    sigma_prime: &Shuffle,
    q: &SubMap,
) -> bool {
    if p.src != sigma_prime.src
        || p.dst != sigma.src
        || sigma_prime.dst != q.src
        || sigma.dst != q.dst
    {
        return false;
    }
    for i in 0..p.src.len() {
        if sigma.map[p.map[i]] != q.map[sigma_prime.map[i]] {
            return false;
        }
        let bottom_h = sigma.comps[p.map[i]];
        let b_prime = sigma_prime.dst.component(sigma_prime.map[i]);
        match cx.restrict_opt(bottom_h, b_prime) {
            Some((a_prime, lift)) => {
                if a_prime != p.src.component(i) || lift != sigma_prime.comps[i] {
                    return false;
                }
            }
            None => return false,
        }
    }
    true
}

/// Pullback of two sub-maps with a common target: components are meets over
/// matching index pairs, with bottoms dropped.
pub fn vertical_pullback(
    cx: &PolytopeComplex,
    f: &SubMap,
    g: &SubMap,
) -> Result<(TwObject, SubMap, SubMap), TwistError> {
    if f.dst != g.dst {
        return Err(TwistError::Boundary("pullback legs target differ".into()));
    }
    let mut components = Vec::new();
    let mut to_f = Vec::new();
    let mut to_g = Vec::new();
    for i in 0..f.src.len() {
        for j in 0..g.src.len() {
            if f.map[i] != g.map[j] {
                continue;
            }
            let m = cx.meet(f.src.component(i), g.src.component(j))?;
            if cx.is_bottom(m) {
                continue;
            }
            components.push(m);
            to_f.push(i);
            to_g.push(j);
        }
    }
    let apex = TwObject { components };
    let to_f = SubMap::new(cx, apex.clone(), f.src.clone(), to_f)?;
    let to_g = SubMap::new(cx, apex.clone(), g.src.clone(), to_g)?;
    Ok((apex, to_f, to_g))
}

/// Completes `A --sigma--> B <--q-- B'` to its terminal square. Components
/// over matching pairs are the restriction lifts of sigma's components.
pub fn pullback_along_shuffle(
    cx: &PolytopeComplex,
    sigma: &Shuffle,
    q: &SubMap,
) -> Result<(TwObject, SubMap, Shuffle), TwistError> {
    if sigma.dst != q.dst {
        return Err(TwistError::Boundary(
            "shuffle and sub-map target differ".into(),
        ));
    }
    let mut components = Vec::new();
    let mut to_a = Vec::new();
    let mut to_bp = Vec::new();
    let mut lifts = Vec::new();
    for i in 0..sigma.src.len() {
        for jp in 0..q.src.len() {
            if sigma.map[i] != q.map[jp] {
                continue;
            }
            let (a_prime, lift) = cx.restrict_h(sigma.comps[i], q.src.component(jp))?;
            components.push(a_prime);
            to_a.push(i);
            to_bp.push(jp);
            lifts.push(lift);
        }
    }
    let apex = TwObject { components };
    let q_star = SubMap::new(cx, apex.clone(), sigma.src.clone(), to_a)?;
    let sigma_tilde = Shuffle::new(cx, apex.clone(), q.src.clone(), to_bp, lifts)?;
    Ok((apex, q_star, sigma_tilde))
}

/// Right adjoint to pulling back: the coarsest sub-map over the shuffle's
/// target whose pullback refines `p`. Per target index the fiber families are
/// transported across the inverted components and multiplied by meets; an
/// empty shuffle fiber contributes the whole target component.
pub fn pushforward(
    cx: &PolytopeComplex,
    sigma: &Shuffle,
    p: &SubMap,
) -> Result<SubMap, TwistError> {
    if sigma.src != p.dst {
        return Err(TwistError::Boundary(
            "shuffle source and sub-map target differ".into(),
        ));
    }
    let mut components = Vec::new();
    let mut map = Vec::new();
    for j in 0..sigma.dst.len() {
        let fiber: Vec<usize> = (0..sigma.src.len())
            .filter(|&i| sigma.map[i] == j)
            .collect();
        if fiber.is_empty() {
            components.push(sigma.dst.component(j));
            map.push(j);
            continue;
        }
        // Transport each p-fiber across the inverse component.
        let mut transported: Vec<Vec<ObjectId>> = Vec::with_capacity(fiber.len());
        for &i in &fiber {
            let hinv = cx.inverse_h(sigma.comps[i]);
            let mut pieces = Vec::new();
            for ip in p.fiber(i) {
                let (image, _) = cx.restrict_h(hinv, p.src.component(ip))?;
                pieces.push(image);
            }
            transported.push(pieces);
        }
        if transported.iter().any(|t| t.is_empty()) {
            continue;
        }
        // Meet over every choice tuple, first factor slowest.
        let mut odometer = vec![0usize; transported.len()];
        loop {
            let mut acc = transported[0][odometer[0]];
            for (k, t) in transported.iter().enumerate().skip(1) {
                acc = cx.meet(acc, t[odometer[k]])?;
                if cx.is_bottom(acc) {
                    break;
                }
            }
            if !cx.is_bottom(acc) {
                components.push(acc);
                map.push(j);
            }
            let mut k = transported.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                odometer[k] += 1;
                if odometer[k] < transported[k].len() {
                    break;
                }
                odometer[k] = 0;
                if k == 0 {
                    break;
                }
                continue;
            }
            if odometer.iter().all(|&v| v == 0) {
                break;
            }
        }
    }
    SubMap::new(
        cx,
        TwObject { components },
        sigma.dst.clone(),
        map,
    )
}

/// Pushout of `C <--tau-- A --sigma--> B` when sigma's set map is injective.
/// Merged indices keep the C component; unmerged B components pass through.
pub fn horizontal_pushout(
    cx: &PolytopeComplex,
    tau: &Shuffle,
    sigma: &Shuffle,
) -> Result<(TwObject, Shuffle, Shuffle), TwistError> {
    if tau.src != sigma.src {
        return Err(TwistError::Boundary("pushout legs source differ".into()));
    }
    if !sigma.is_injective() {
        return Err(TwistError::NonInjectivePushout);
    }
    let k_len = tau.dst.len();
    let unmerged: Vec<usize> = (0..sigma.dst.len())
        .filter(|j| !sigma.map.contains(j))
        .collect();
    let mut components: Vec<ObjectId> = tau.dst.components().to_vec();
    components.extend(unmerged.iter().map(|&j| sigma.dst.component(j)));
    let vertex = TwObject { components };

    let from_c = Shuffle::new(
        cx,
        tau.dst.clone(),
        vertex.clone(),
        (0..k_len).collect(),
        tau.dst
            .components()
            .iter()
            .map(|&c| cx.identity_h(c))
            .collect(),
    )?;

    let mut map = vec![usize::MAX; sigma.dst.len()];
    let mut comps = vec![cx.identity_h(cx.bottom()); sigma.dst.len()];
    for i in 0..sigma.src.len() {
        let j = sigma.map[i];
        map[j] = tau.map[i];
        comps[j] = cx
            .compose_h(tau.comps[i], cx.inverse_h(sigma.comps[i]))
            .expect("composable on a validated complex");
    }
    for (rank, &j) in unmerged.iter().enumerate() {
        map[j] = k_len + rank;
        comps[j] = cx.identity_h(sigma.dst.component(j));
    }
    let from_b = Shuffle::new(cx, sigma.dst.clone(), vertex.clone(), map, comps)?;
    Ok((vertex, from_c, from_b))
}

/// Unique factorization of `u` through `v` over their common target, when it
/// exists: each component of `u` sits below exactly one component of `v` in
/// the matching fiber (disjointness rules out a second).
pub fn factor_over(cx: &PolytopeComplex, u: &SubMap, v: &SubMap) -> Option<SubMap> {
    if u.dst != v.dst {
        return None;
    }
    let mut map = Vec::with_capacity(u.src.len());
    for i in 0..u.src.len() {
        let target = u.map[i];
        let mut found = None;
        for n in 0..v.src.len() {
            if v.map[n] == target && cx.leq(u.src.component(i), v.src.component(n)) {
                found = Some(n);
                break;
            }
        }
        map.push(found?);
    }
    SubMap::new(cx, u.src.clone(), v.src.clone(), map).ok()
}

/// Checks that `(a_prime, p, sigma_prime)` is a pullback square over
/// `sigma, q`: its comparison with the canonical pullback must be a
/// re-indexing.
pub fn is_pullback_square(
    cx: &PolytopeComplex,
    p: &SubMap,
    sigma: &Shuffle,
    sigma_prime: &Shuffle,
    q: &SubMap,
) -> bool {
    if !square_commutes(cx, p, sigma, sigma_prime, q) {
        return false;
    }
    let Ok((apex, q_star, sigma_tilde)) = pullback_along_shuffle(cx, sigma, q) else {
        return false;
    };
    if apex.len() != p.src.len() {
        return false;
    }
    // The mediating map sends i to the pair (p(i), sigma_prime(i)).
    let mut seen = vec![false; apex.len()];
    for i in 0..p.src.len() {
        let mut matched = false;
        for n in 0..apex.len() {
            if seen[n]
                || q_star.map[n] != p.map[i]
                || sigma_tilde.map[n] != sigma_prime.map[i]
            {
                continue;
            }
            if apex.component(n) == p.src.component(i)
                && sigma_tilde.comps[n] == sigma_prime.comps[i]
            {
                seen[n] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return false;
        }
    }
    true
}

/// The induced sub-map between horizontal pushouts of a two-row grid
///
/// ```text
///   C' <--tau'-- A' --sigma'--> B'
///   |r           |p             |q
///   C  <--tau--  A  --sigma-->  B
/// ```
///
/// where the right square is a pullback and sigma is injective. Covering
/// whenever `p`, `q`, `r` are.
#[allow(clippy::too_many_arguments)]
pub fn induced_pushout_submap(
    cx: &PolytopeComplex,
    tau_prime: &Shuffle,
    sigma_prime: &Shuffle,
    tau: &Shuffle,
    sigma: &Shuffle,
    r: &SubMap,
    p: &SubMap,
    q: &SubMap,
) -> Result<SubMap, TwistError> {
    if !square_commutes(cx, p, sigma, sigma_prime, q) {
        return Err(TwistError::GridDoesNotCommute);
    }
    if !is_pullback_square(cx, p, sigma, sigma_prime, q) {
        return Err(TwistError::NotPullbackSquare);
    }
    if !square_commutes(cx, p, tau, tau_prime, r) {
        return Err(TwistError::GridDoesNotCommute);
    }
    let (top, _, _) = horizontal_pushout(cx, tau_prime, sigma_prime)?;
    let (bot, _, _) = horizontal_pushout(cx, tau, sigma)?;
    let k_len = tau.dst.len();
    let k_prime_len = tau_prime.dst.len();
    let unmerged: Vec<usize> = (0..sigma.dst.len())
        .filter(|j| !sigma.map.contains(j))
        .collect();
    let unmerged_prime: Vec<usize> = (0..sigma_prime.dst.len())
        .filter(|j| !sigma_prime.map.contains(j))
        .collect();
    let mut map = Vec::with_capacity(top.len());
    for kp in 0..k_prime_len {
        map.push(r.map[kp]);
    }
    for &jp in &unmerged_prime {
        // The pullback property sends unmerged top indices to unmerged ones.
        let j = q.map[jp];
        let rank = unmerged
            .iter()
            .position(|&u| u == j)
            .ok_or(TwistError::NotPullbackSquare)?;
        map.push(k_len + rank);
    }
    SubMap::new(cx, top, bot, map)
}

/// The induced sub-map between pushforwards of a two-row grid
///
/// ```text
///   C' --f'--> A' --sigma'--> B'
///   |r         |p             |q
///   C  --f-->  A  --sigma-->  B
/// ```
///
/// with sub-map verticals and commuting squares. Computed by factoring the
/// composite `q . push(sigma', f')` through `push(sigma, f)` over B; the
/// factorization is unique in the fiber when it exists.
#[allow(clippy::too_many_arguments)]
pub fn induced_pushforward_submap(
    cx: &PolytopeComplex,
    f_prime: &SubMap,
    sigma_prime: &Shuffle,
    f: &SubMap,
    sigma: &Shuffle,
    r: &SubMap,
    p: &SubMap,
    q: &SubMap,
) -> Result<SubMap, TwistError> {
    let left_top = p.compose(cx, f_prime)?;
    let left_bot = f.compose(cx, r)?;
    if left_top != left_bot {
        return Err(TwistError::GridDoesNotCommute);
    }
    if !square_commutes(cx, p, sigma, sigma_prime, q) {
        return Err(TwistError::GridDoesNotCommute);
    }
    let top_push = pushforward(cx, sigma_prime, f_prime)?;
    let bot_push = pushforward(cx, sigma, f)?;
    let into_b = q.compose(cx, &top_push)?;
    factor_over(cx, &into_b, &bot_push).ok_or_else(|| {
        TwistError::NoFactorization("pushforwards do not compare over the target".into())
    })
}

/// Bounded enumeration helpers used by the exhaustive universal-property
/// checks.
pub mod enumerate {
    use super::*;

    /// All pairwise-disjoint families of non-bottom objects below `target`,
    /// each family sorted by object id. Includes the empty family.
    pub fn disjoint_families(cx: &PolytopeComplex, target: ObjectId) -> Vec<Vec<ObjectId>> {
        let down: Vec<ObjectId> = cx
            .downset(target)
            .iter()
            .copied()
            .filter(|&y| !cx.is_bottom(y))
            .collect();
        let mut out = Vec::new();
        let n = down.len();
        assert!(n < 26, "down-set too large to enumerate");
        'mask: for mask in 0u32..(1 << n) {
            let fam: Vec<ObjectId> = (0..n)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| down[i])
                .collect();
            for i in 0..fam.len() {
                for k in i + 1..fam.len() {
                    match cx.meet_opt(fam[i], fam[k]) {
                        Some(m) if cx.is_bottom(m) => {}
                        _ => continue 'mask,
                    }
                }
            }
            out.push(fam);
        }
        out
    }

    /// All sub-maps into `dst` with at most `max_apex` total components.
    pub fn submaps_into(
        cx: &PolytopeComplex,
        dst: &TwObject,
        max_apex: usize,
    ) -> Vec<SubMap> {
        let per_fiber: Vec<Vec<Vec<ObjectId>>> = dst
            .components()
            .iter()
            .map(|&c| disjoint_families(cx, c))
            .collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; dst.len()];
        loop {
            let total: usize = choice
                .iter()
                .enumerate()
                .map(|(j, &c)| per_fiber[j][c].len())
                .sum();
            if total <= max_apex {
                let mut components = Vec::new();
                let mut map = Vec::new();
                for (j, &c) in choice.iter().enumerate() {
                    for &piece in &per_fiber[j][c] {
                        components.push(piece);
                        map.push(j);
                    }
                }
                out.push(SubMap {
                    src: TwObject { components },
                    dst: dst.clone(),
                    map,
                });
            }
            let mut k = dst.len();
            let done = loop {
                if k == 0 {
                    break true;
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < per_fiber[k].len() {
                    break false;
                }
                choice[k] = 0;
            };
            if done {
                break;
            }
        }
        out
    }

    /// All shuffles from `src` to `dst`.
    pub fn shuffles(cx: &PolytopeComplex, src: &TwObject, dst: &TwObject) -> Vec<Shuffle> {
        if src.is_empty() {
            return vec![Shuffle::from_empty(dst)];
        }
        let options: Vec<Vec<(usize, HMorId)>> = src
            .components()
            .iter()
            .map(|&c| {
                let mut opts = Vec::new();
                for (j, &d) in dst.components().iter().enumerate() {
                    for h in cx.hmors_between(c, d) {
                        opts.push((j, h));
                    }
                }
                opts
            })
            .collect();
        if options.iter().any(|o| o.is_empty()) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut choice = vec![0usize; src.len()];
        loop {
            let map: Vec<usize> = choice.iter().enumerate().map(|(i, &c)| options[i][c].0).collect();
            let comps: Vec<HMorId> =
                choice.iter().enumerate().map(|(i, &c)| options[i][c].1).collect();
            out.push(Shuffle {
                src: src.clone(),
                dst: dst.clone(),
                map,
                comps,
            });
            let mut k = src.len();
            let done = loop {
                if k == 0 {
                    break true;
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < options[k].len() {
                    break false;
                }
                choice[k] = 0;
            };
            if done {
                break;
            }
        }
        out
    }

    /// All families with at most `max_components` components, ordered tuples
    /// over the polytopes of the complex. Includes the empty family.
    pub fn tw_objects(cx: &PolytopeComplex, max_components: usize) -> Vec<TwObject> {
        let polys: Vec<ObjectId> = cx.polytopes().collect();
        let mut out = vec![TwObject::empty()];
        let mut frontier = vec![Vec::<ObjectId>::new()];
        for _ in 0..max_components {
            let mut next = Vec::new();
            for base in &frontier {
                for &p in &polys {
                    let mut v = base.clone();
                    v.push(p);
                    out.push(TwObject {
                        components: v.clone(),
                    });
                    next.push(v);
                }
            }
            frontier = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RawComplex;

    /// Divisibility on 1..=6 with coprime covers, identities only.
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
            basis: vec![(5, vec![1, 2])], // {2,3} covers 6
            ..Default::default()
        }
        .assemble()
        .unwrap()
    }

    fn o(cx: &PolytopeComplex, n: usize) -> ObjectId {
        cx.object_by_name(&format!("({n})")).unwrap()
    }

    #[test]
    fn pullback_along_identity_leg() {
        let cx = rats6();
        let six = TwObject::singleton(&cx, o(&cx, 6)).unwrap();
        let two_three = TwObject::new(&cx, vec![o(&cx, 2), o(&cx, 3)]).unwrap();
        let f = SubMap::new(&cx, two_three.clone(), six.clone(), vec![0, 0]).unwrap();
        let g = SubMap::identity(&six);
        let (apex, to_f, _to_g) = vertical_pullback(&cx, &f, &g).unwrap();
        assert_eq!(apex, two_three);
        assert!(to_f.is_reindexing());
    }

    #[test]
    fn covering_sub_map_detection() {
        let cx = rats6();
        let six = TwObject::singleton(&cx, o(&cx, 6)).unwrap();
        let two_three = TwObject::new(&cx, vec![o(&cx, 2), o(&cx, 3)]).unwrap();
        let cover = SubMap::new(&cx, two_three, six.clone(), vec![0, 0]).unwrap();
        assert!(is_covering_sub_map(&cx, &cover));
        let two = TwObject::singleton(&cx, o(&cx, 2)).unwrap();
        let partial = SubMap::new(&cx, two, six, vec![0]).unwrap();
        assert!(!is_covering_sub_map(&cx, &partial));
    }

    #[test]
    fn overlapping_fiber_is_rejected() {
        let cx = rats6();
        let six = TwObject::singleton(&cx, o(&cx, 6)).unwrap();
        let overlap = TwObject::new(&cx, vec![o(&cx, 2), o(&cx, 4)]).unwrap();
        assert!(SubMap::new(&cx, overlap, six, vec![0, 0]).is_err());
    }

    #[test]
    fn pushforward_along_identity_returns_input() {
        let cx = rats6();
        let six = TwObject::singleton(&cx, o(&cx, 6)).unwrap();
        let two_three = TwObject::new(&cx, vec![o(&cx, 2), o(&cx, 3)]).unwrap();
        let p = SubMap::new(&cx, two_three, six.clone(), vec![0, 0]).unwrap();
        let sigma = Shuffle::identity(&cx, &six);
        let pushed = pushforward(&cx, &sigma, &p).unwrap();
        assert_eq!(pushed, p);
    }
}
