//! Finite polytope complexes: a vertical meet-semilattice with bottom, a
//! horizontal groupoid, a restriction action, and a saturated cover system.

use std::collections::HashMap;

use thiserror::Error;

mod covers;
mod format;
mod functor;
mod validate;

pub use covers::CoverSystem;
pub use format::{
    load_complex, load_complex_str, load_complex_str_with_cap, load_complex_with_cap,
    load_functor, save_complex, save_functor,
};
pub use functor::{validate_functor, PolytopeFunctor};
pub use validate::{mutated, validate, Axiom, AxiomCheck, Mutation, ValidationReport};

/// Index into a complex's object table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub u32);

/// Index into a complex's horizontal morphism table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HMorId(pub u32);

impl ObjectId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl HMorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no bottom object")]
    NoBottom,
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown horizontal morphism `{0}`")]
    UnknownHMor(String),
    #[error("duplicate object name `{0}`")]
    DuplicateObject(String),
    #[error("duplicate horizontal morphism id `{0}`")]
    DuplicateHMor(String),
    #[error("cover of `{target}` references `{member}` which is not below it")]
    BadCover { target: String, member: String },
    #[error("closure cap exceeded: down-set of `{object}` has {size} members (cap {cap})")]
    CapExceeded {
        object: String,
        size: usize,
        cap: usize,
    },
    #[error("closure cap {0} exceeds the supported maximum of {max}", max = MAX_CAP)]
    CapTooLarge(usize),
    #[error("no meet for `{0}` and `{1}`")]
    NoMeet(String, String),
    #[error("restriction undefined for `{0}` at `{1}`")]
    RestrictionUndefined(String, String),
    #[error("`{member}` is not below `{target}`")]
    NotBelow { member: String, target: String },
    #[error("incomplete composition table: `{g}` after `{h}` cannot be resolved")]
    IncompleteComposition { g: String, h: String },
    #[error("composition table conflict at `{g}` after `{h}`")]
    CompositionConflict { g: String, h: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Default bound on down-set size during cover saturation.
pub const DEFAULT_CAP: usize = 16;

/// Hard ceiling: per-target families are kept as bit masks over the down-set.
pub const MAX_CAP: usize = 22;

#[derive(Debug, Clone)]
pub(crate) struct HMorData {
    pub name: String,
    pub src: ObjectId,
    pub dst: ObjectId,
}

/// A finite polytope complex, immutable after assembly.
#[derive(Debug, Clone)]
pub struct PolytopeComplex {
    names: Vec<String>,
    name_index: HashMap<String, ObjectId>,
    bottom: ObjectId,
    /// Adjacency matrix of the vertical order: `leq[a][b]` iff a is below b.
    leq: Vec<Vec<bool>>,
    /// Sorted down-sets, bottom included.
    below: Vec<Vec<ObjectId>>,
    meet: Vec<Vec<Option<ObjectId>>>,
    hmors: Vec<HMorData>,
    hmor_index: HashMap<String, HMorId>,
    identity: Vec<HMorId>,
    compose: HashMap<(HMorId, HMorId), HMorId>,
    inverse: Vec<HMorId>,
    restrict: HashMap<(HMorId, ObjectId), (ObjectId, HMorId)>,
    hmors_from: Vec<Vec<HMorId>>,
    hmors_into: Vec<Vec<HMorId>>,
    covers: CoverSystem,
    cover_basis: Vec<(ObjectId, Vec<ObjectId>)>,
    cap: usize,
}

impl PolytopeComplex {
    pub fn object_count(&self) -> usize {
        self.names.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> {
        (0..self.names.len() as u32).map(ObjectId)
    }

    /// All objects except the bottom, in id order.
    pub fn polytopes(&self) -> impl Iterator<Item = ObjectId> + '_ {
        let bottom = self.bottom;
        self.objects().filter(move |&x| x != bottom)
    }

    pub fn name(&self, x: ObjectId) -> &str {
        &self.names[x.index()]
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjectId> {
        self.name_index.get(name).copied()
    }

    pub fn bottom(&self) -> ObjectId {
        self.bottom
    }

    pub fn is_bottom(&self, x: ObjectId) -> bool {
        x == self.bottom
    }

    pub fn leq(&self, a: ObjectId, b: ObjectId) -> bool {
        self.leq[a.index()][b.index()]
    }

    /// Down-set of `x` (everything below it, bottom included), sorted by id.
    pub fn downset(&self, x: ObjectId) -> &[ObjectId] {
        &self.below[x.index()]
    }

    /// Greatest lower bound. Total on a validated complex.
    pub fn meet(&self, a: ObjectId, b: ObjectId) -> Result<ObjectId, ComplexError> {
        self.meet[a.index()][b.index()].ok_or_else(|| {
            ComplexError::NoMeet(self.name(a).to_string(), self.name(b).to_string())
        })
    }

    pub(crate) fn meet_opt(&self, a: ObjectId, b: ObjectId) -> Option<ObjectId> {
        self.meet[a.index()][b.index()]
    }

    pub fn hmor_count(&self) -> usize {
        self.hmors.len()
    }

    pub fn hmor_ids(&self) -> impl Iterator<Item = HMorId> {
        (0..self.hmors.len() as u32).map(HMorId)
    }

    pub fn hmor_name(&self, h: HMorId) -> &str {
        &self.hmors[h.index()].name
    }

    pub fn hmor_by_name(&self, name: &str) -> Option<HMorId> {
        self.hmor_index.get(name).copied()
    }

    pub fn src(&self, h: HMorId) -> ObjectId {
        self.hmors[h.index()].src
    }

    pub fn dst(&self, h: HMorId) -> ObjectId {
        self.hmors[h.index()].dst
    }

    pub fn identity_h(&self, x: ObjectId) -> HMorId {
        self.identity[x.index()]
    }

    pub fn is_identity_h(&self, h: HMorId) -> bool {
        self.identity[self.src(h).index()] == h
    }

    /// `g` after `h`; defined when `dst(h) = src(g)`.
    pub fn compose_h(&self, g: HMorId, h: HMorId) -> Option<HMorId> {
        self.compose.get(&(g, h)).copied()
    }

    pub fn inverse_h(&self, h: HMorId) -> HMorId {
        self.inverse[h.index()]
    }

    pub fn hmors_from(&self, x: ObjectId) -> &[HMorId] {
        &self.hmors_from[x.index()]
    }

    pub fn hmors_into(&self, x: ObjectId) -> &[HMorId] {
        &self.hmors_into[x.index()]
    }

    /// Horizontal morphisms `a -> b`, in id order.
    pub fn hmors_between(&self, a: ObjectId, b: ObjectId) -> Vec<HMorId> {
        self.hmors_from[a.index()]
            .iter()
            .copied()
            .filter(|&h| self.dst(h) == b)
            .collect()
    }

    /// The unique lift of `h` at `b_prime` below `dst(h)`.
    ///
    /// Returns `(a_prime, h_prime)` with `a_prime` below `src(h)` and
    /// `h_prime : a_prime -> b_prime`.
    pub fn restrict_h(
        &self,
        h: HMorId,
        b_prime: ObjectId,
    ) -> Result<(ObjectId, HMorId), ComplexError> {
        if !self.leq(b_prime, self.dst(h)) {
            return Err(ComplexError::NotBelow {
                member: self.name(b_prime).to_string(),
                target: self.name(self.dst(h)).to_string(),
            });
        }
        self.restrict.get(&(h, b_prime)).copied().ok_or_else(|| {
            ComplexError::RestrictionUndefined(
                self.hmor_name(h).to_string(),
                self.name(b_prime).to_string(),
            )
        })
    }

    pub(crate) fn restrict_opt(&self, h: HMorId, b_prime: ObjectId) -> Option<(ObjectId, HMorId)> {
        self.restrict.get(&(h, b_prime)).copied()
    }

    /// Transport a sub-object of `src(h)` forward along `h`.
    ///
    /// Returns `(image, piece)` where `piece : a_prime -> image` is the
    /// component of `h` on `a_prime`. Computed as the lift of the inverse.
    pub fn transport_h(
        &self,
        h: HMorId,
        a_prime: ObjectId,
    ) -> Result<(ObjectId, HMorId), ComplexError> {
        let (image, lift) = self.restrict_h(self.inverse_h(h), a_prime)?;
        Ok((image, self.inverse_h(lift)))
    }

    /// Membership in the saturated cover system. Bottom members are ignored.
    pub fn is_cover(&self, target: ObjectId, family: &[ObjectId]) -> Result<bool, ComplexError> {
        for &m in family {
            if !self.leq(m, target) {
                return Err(ComplexError::NotBelow {
                    member: self.name(m).to_string(),
                    target: self.name(target).to_string(),
                });
            }
        }
        Ok(self.covers.contains(self, target, family))
    }

    /// Saturated covering families of `target`, decoded, in canonical order.
    pub fn covers_of(&self, target: ObjectId) -> Vec<Vec<ObjectId>> {
        self.covers.families_of(self, target)
    }

    pub fn cover_system(&self) -> &CoverSystem {
        &self.covers
    }

    /// The basis the saturated system was generated from.
    pub fn cover_basis(&self) -> &[(ObjectId, Vec<ObjectId>)] {
        &self.cover_basis
    }

    pub fn cap(&self) -> usize {
        self.cap
    }
}

/// Raw ingredients of a complex, before indexing and saturation.
///
/// Builders and the file loader both go through this. `assemble` applies the
/// reflexive/transitive closure to the order, synthesizes identities, inverse
/// and restriction entries that are forced, completes the composition table
/// where the groupoid laws determine it, memoizes meets and down-sets, and
/// saturates the cover basis. It does not validate the axioms.
#[derive(Debug, Clone, Default)]
pub struct RawComplex {
    pub names: Vec<String>,
    pub bottom: Option<usize>,
    /// Pairs `(sub, super)`.
    pub leq: Vec<(usize, usize)>,
    /// `(name, src, dst)`. Identities may be omitted.
    pub hmors: Vec<(String, usize, usize)>,
    /// `(g, h, g_after_h)` by hmor position in `hmors`.
    pub compose: Vec<(usize, usize, usize)>,
    /// `(h, h_inverse)` by hmor position.
    pub inverse: Vec<(usize, usize)>,
    /// `(h, sub_of_dst, lift)` by positions.
    pub restrict: Vec<(usize, usize, usize)>,
    /// Cover basis: `(target, family)` by object position.
    pub basis: Vec<(usize, Vec<usize>)>,
    pub cap: Option<usize>,
}

impl RawComplex {
    pub fn assemble(self) -> Result<PolytopeComplex, ComplexError> {
        let n = self.names.len();
        let bottom = ObjectId(self.bottom.ok_or(ComplexError::NoBottom)? as u32);
        if n == 0 {
            return Err(ComplexError::NoBottom);
        }
        let mut name_index = HashMap::new();
        for (i, name) in self.names.iter().enumerate() {
            if name_index.insert(name.clone(), ObjectId(i as u32)).is_some() {
                return Err(ComplexError::DuplicateObject(name.clone()));
            }
        }

        // Reflexive/transitive closure of the order.
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
            leq[bottom.index()][i] = true;
        }
        for &(a, b) in &self.leq {
            leq[a][b] = true;
        }
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    if !leq[a][b] {
                        continue;
                    }
                    for c in 0..n {
                        if leq[b][c] && !leq[a][c] {
                            leq[a][c] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let below: Vec<Vec<ObjectId>> = (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| leq[y][x])
                    .map(|y| ObjectId(y as u32))
                    .collect()
            })
            .collect();

        // Meet table: unique greatest common lower bound, when it exists.
        let mut meet = vec![vec![None; n]; n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&c| leq[c][a] && leq[c][b]).collect();
                let glb = lower
                    .iter()
                    .copied()
                    .find(|&m| lower.iter().all(|&c| leq[c][m]));
                meet[a][b] = glb.map(|m| ObjectId(m as u32));
            }
        }

        // Horizontal table with synthesized identities.
        let mut hmors: Vec<HMorData> = Vec::new();
        let mut hmor_index: HashMap<String, HMorId> = HashMap::new();
        let push_hmor = |hmors: &mut Vec<HMorData>,
                             hmor_index: &mut HashMap<String, HMorId>,
                             name: String,
                             src: ObjectId,
                             dst: ObjectId|
         -> Result<HMorId, ComplexError> {
            let id = HMorId(hmors.len() as u32);
            if hmor_index.insert(name.clone(), id).is_some() {
                return Err(ComplexError::DuplicateHMor(name));
            }
            hmors.push(HMorData { name, src, dst });
            Ok(id)
        };
        let mut declared: Vec<HMorId> = Vec::new();
        for (name, src, dst) in &self.hmors {
            let id = push_hmor(
                &mut hmors,
                &mut hmor_index,
                name.clone(),
                ObjectId(*src as u32),
                ObjectId(*dst as u32),
            )?;
            declared.push(id);
        }
        // Identities: `id:<obj>` by name, else a declared idempotent self-map
        // (in a group the identity is the only idempotent), else synthesized.
        let declared_comp: std::collections::HashSet<(usize, usize, usize)> =
            self.compose.iter().copied().collect();
        let mut identity = Vec::with_capacity(n);
        for x in 0..n {
            let x = ObjectId(x as u32);
            let name = format!("id:{}", self.names[x.index()]);
            let id = if let Some(&h) = hmor_index.get(&name) {
                h
            } else {
                let idempotent = self.hmors.iter().enumerate().find_map(|(i, (_, s, d))| {
                    (*s == x.index() && *d == x.index() && declared_comp.contains(&(i, i, i)))
                        .then_some(i)
                });
                match idempotent {
                    Some(i) => declared[i],
                    None => push_hmor(&mut hmors, &mut hmor_index, name, x, x)?,
                }
            };
            identity.push(id);
        }

        // Composition: declared entries, then identity/inverse laws, then
        // propagation through the groupoid laws.
        let mut compose: HashMap<(HMorId, HMorId), HMorId> = HashMap::new();
        let insert_comp = |compose: &mut HashMap<(HMorId, HMorId), HMorId>,
                               g: HMorId,
                               h: HMorId,
                               gh: HMorId|
         -> Result<bool, ComplexError> {
            match compose.get(&(g, h)) {
                Some(&prev) if prev != gh => Err(ComplexError::CompositionConflict {
                    g: hmors[g.index()].name.clone(),
                    h: hmors[h.index()].name.clone(),
                }),
                Some(_) => Ok(false),
                None => {
                    compose.insert((g, h), gh);
                    Ok(true)
                }
            }
        };
        for &(g, h, gh) in &self.compose {
            insert_comp(&mut compose, declared[g], declared[h], declared[gh])?;
        }

        let mut inverse: Vec<Option<HMorId>> = vec![None; hmors.len()];
        for &(h, hi) in &self.inverse {
            inverse[declared[h].index()] = Some(declared[hi]);
            inverse[declared[hi].index()] = Some(declared[h]);
        }
        for x in 0..n {
            let id = identity[x];
            inverse[id.index()] = Some(id);
        }
        // A morphism that is the only one between its endpoints in both
        // directions pairs with the reverse one when unambiguous; otherwise
        // the inverse must be declared. Identities already self-pair.
        for h in 0..hmors.len() {
            if inverse[h].is_some() {
                continue;
            }
            let (s, d) = (hmors[h].src, hmors[h].dst);
            let back: Vec<HMorId> = (0..hmors.len() as u32)
                .map(HMorId)
                .filter(|&k| hmors[k.index()].src == d && hmors[k.index()].dst == s)
                .collect();
            let fwd = (0..hmors.len() as u32)
                .map(HMorId)
                .filter(|&k| hmors[k.index()].src == s && hmors[k.index()].dst == d)
                .count();
            if back.len() == 1 && fwd == 1 {
                inverse[h] = Some(back[0]);
                inverse[back[0].index()] = Some(HMorId(h as u32));
            }
        }
        let inverse: Vec<HMorId> = inverse
            .into_iter()
            .enumerate()
            .map(|(h, inv)| {
                inv.ok_or_else(|| ComplexError::UnknownHMor(format!("{}^-1", hmors[h].name)))
            })
            .collect::<Result<_, _>>()?;

        // Law-driven completion to a fixpoint.
        loop {
            let mut changed = false;
            for h in (0..hmors.len() as u32).map(HMorId) {
                let (s, d) = (hmors[h.index()].src, hmors[h.index()].dst);
                changed |= insert_comp(&mut compose, identity[d.index()], h, h)?;
                changed |= insert_comp(&mut compose, h, identity[s.index()], h)?;
                let hi = inverse[h.index()];
                changed |= insert_comp(&mut compose, hi, h, identity[s.index()])?;
                changed |= insert_comp(&mut compose, h, hi, identity[d.index()])?;
            }
            // g∘h = k implies g = k∘h⁻¹ and h = g⁻¹∘k.
            let known: Vec<((HMorId, HMorId), HMorId)> =
                compose.iter().map(|(&k, &v)| (k, v)).collect();
            for ((g, h), k) in known {
                changed |= insert_comp(&mut compose, k, inverse[h.index()], g)?;
                changed |= insert_comp(&mut compose, inverse[g.index()], k, h)?;
                // Associativity against every known product f∘g = m.
                for f in (0..hmors.len() as u32).map(HMorId) {
                    if hmors[f.index()].src != hmors[g.index()].dst {
                        continue;
                    }
                    if let Some(&m) = compose.get(&(f, g)) {
                        if let Some(&fk) = compose.get(&(f, k)) {
                            changed |= insert_comp(&mut compose, m, h, fk)?;
                        } else if let Some(&mh) = compose.get(&(m, h)) {
                            changed |= insert_comp(&mut compose, f, k, mh)?;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for g in (0..hmors.len() as u32).map(HMorId) {
            for h in (0..hmors.len() as u32).map(HMorId) {
                if hmors[h.index()].dst == hmors[g.index()].src
                    && !compose.contains_key(&(g, h))
                {
                    return Err(ComplexError::IncompleteComposition {
                        g: hmors[g.index()].name.clone(),
                        h: hmors[h.index()].name.clone(),
                    });
                }
            }
        }

        // Restriction: identity lifts and the entries forced at the target
        // and at bottom are synthesized; declared entries take precedence.
        let mut restrict: HashMap<(HMorId, ObjectId), (ObjectId, HMorId)> = HashMap::new();
        for x in 0..n {
            let id = identity[x];
            for y in 0..n {
                if leq[y][x] {
                    let y = ObjectId(y as u32);
                    restrict.insert((id, y), (y, identity[y.index()]));
                }
            }
        }
        for h in (0..hmors.len() as u32).map(HMorId) {
            let (s, d) = (hmors[h.index()].src, hmors[h.index()].dst);
            restrict.insert((h, d), (s, h));
            restrict.insert((h, bottom), (bottom, identity[bottom.index()]));
        }
        for &(h, b, hp) in &self.restrict {
            let h = declared[h];
            let hp = declared[hp];
            restrict.insert((h, ObjectId(b as u32)), (hmors[hp.index()].src, hp));
        }

        let mut hmors_from = vec![Vec::new(); n];
        let mut hmors_into = vec![Vec::new(); n];
        for h in (0..hmors.len() as u32).map(HMorId) {
            hmors_from[hmors[h.index()].src.index()].push(h);
            hmors_into[hmors[h.index()].dst.index()].push(h);
        }

        let cap = self.cap.unwrap_or(DEFAULT_CAP);
        if cap > MAX_CAP {
            return Err(ComplexError::CapTooLarge(cap));
        }

        let mut basis: Vec<(ObjectId, Vec<ObjectId>)> = self
            .basis
            .iter()
            .map(|(t, fam)| {
                let mut fam: Vec<ObjectId> =
                    fam.iter().map(|&m| ObjectId(m as u32)).collect();
                fam.sort_unstable();
                fam.dedup();
                (ObjectId(*t as u32), fam)
            })
            .collect();
        basis.sort();
        basis.dedup();
        let mut cx = PolytopeComplex {
            names: self.names,
            name_index,
            bottom,
            leq,
            below,
            meet,
            hmors,
            hmor_index,
            identity,
            compose,
            inverse,
            restrict,
            hmors_from,
            hmors_into,
            covers: CoverSystem::empty(n),
            cover_basis: basis.clone(),
            cap,
        };
        cx.covers = covers::saturate_covers(&cx, &basis)?;
        Ok(cx)
    }
}

/// Re-run saturation on a complex from an explicit basis. Exposed for tests
/// and for rebuilding after mutation.
pub fn saturate_covers(
    cx: &PolytopeComplex,
    basis: &[(ObjectId, Vec<ObjectId>)],
) -> Result<CoverSystem, ComplexError> {
    covers::saturate_covers(cx, basis)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Two objects, bottom and a point, no nontrivial structure.
    pub fn tiny() -> PolytopeComplex {
        RawComplex {
            names: vec!["empty".into(), "pt".into()],
            bottom: Some(0),
            leq: vec![(0, 1)],
            ..Default::default()
        }
        .assemble()
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assemble_rejects_missing_bottom() {
        let raw = RawComplex {
            names: vec![],
            bottom: None,
            ..Default::default()
        };
        assert!(matches!(raw.assemble(), Err(ComplexError::NoBottom)));
    }

    #[test]
    fn tiny_complex_basics() {
        let cx = testutil::tiny();
        let bot = cx.bottom();
        let pt = cx.object_by_name("pt").unwrap();
        assert!(cx.leq(bot, pt));
        assert!(!cx.leq(pt, bot));
        assert_eq!(cx.meet(pt, pt).unwrap(), pt);
        assert_eq!(cx.meet(pt, bot).unwrap(), bot);
        // Identity covers come from saturation.
        assert!(cx.is_cover(pt, &[pt]).unwrap());
        assert!(!cx.is_cover(pt, &[]).unwrap());
        // Identity restriction entries are synthesized.
        let idp = cx.identity_h(pt);
        assert_eq!(cx.restrict_h(idp, pt).unwrap(), (pt, idp));
        assert_eq!(
            cx.restrict_h(idp, bot).unwrap(),
            (bot, cx.identity_h(bot))
        );
    }

    #[test]
    fn duplicate_names_rejected() {
        let raw = RawComplex {
            names: vec!["a".into(), "a".into()],
            bottom: Some(0),
            ..Default::default()
        };
        assert!(matches!(
            raw.assemble(),
            Err(ComplexError::DuplicateObject(_))
        ));
    }
}
