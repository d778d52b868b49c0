//! The Grothendieck-topology closure engine.
//!
//! Covering families are finite sets of non-bottom objects below a target,
//! stored per target as bit masks over the target's down-set. Saturation is
//! the least fixpoint of five rules:
//!
//!   R1  {x} covers x;
//!   R2  pullback stability: if S covers x and y is below x then
//!       {meet(s,y)} minus bottom covers y;
//!   R3  transitivity: refining any member of a cover by one of its own
//!       covers yields a cover (iterated, this reaches all combined
//!       refinements);
//!   R4  horizontal stability: the restriction image of a cover of dst(h)
//!       covers src(h);
//!   R5  saturation: a family whose members admit covers refining to an
//!       already-known cover of the target is itself a cover.

use std::collections::{HashMap, VecDeque};

use super::{ComplexError, HMorId, ObjectId, PolytopeComplex};

/// Saturated covering families for every target, immutable once built.
#[derive(Debug, Clone)]
pub struct CoverSystem {
    targets: Vec<TargetCovers>,
}

#[derive(Debug, Clone)]
struct TargetCovers {
    /// Non-bottom members of the target's down-set, sorted by object id.
    domain: Vec<ObjectId>,
    pos: HashMap<ObjectId, u32>,
    /// One bit per possible family mask.
    bits: Vec<u64>,
    /// Present masks; sorted ascending once saturation finishes.
    list: Vec<u32>,
    big_union: u32,
    version: u64,
}

impl TargetCovers {
    fn empty() -> Self {
        TargetCovers {
            domain: Vec::new(),
            pos: HashMap::new(),
            bits: vec![0],
            list: Vec::new(),
            big_union: 0,
            version: 0,
        }
    }

    fn with_domain(domain: Vec<ObjectId>) -> Self {
        let words = (1usize << domain.len()).div_ceil(64);
        let pos = domain
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i as u32))
            .collect();
        TargetCovers {
            domain,
            pos,
            bits: vec![0; words],
            list: Vec::new(),
            big_union: 0,
            version: 0,
        }
    }

    fn contains_mask(&self, m: u32) -> bool {
        let m = m as usize;
        (self.bits[m >> 6] >> (m & 63)) & 1 == 1
    }

    fn insert_mask(&mut self, m: u32) -> bool {
        if self.contains_mask(m) {
            return false;
        }
        let i = m as usize;
        self.bits[i >> 6] |= 1u64 << (i & 63);
        self.list.push(m);
        self.big_union |= m;
        self.version += 1;
        true
    }

    /// Encodes a family, dropping bottom-free members absent from the domain.
    fn encode(&self, family: &[ObjectId], bottom: ObjectId) -> Option<u32> {
        let mut m = 0u32;
        for &x in family {
            if x == bottom {
                continue;
            }
            m |= 1u32 << *self.pos.get(&x)?;
        }
        Some(m)
    }

    fn decode(&self, m: u32) -> Vec<ObjectId> {
        let mut fam = Vec::with_capacity(m.count_ones() as usize);
        let mut bits = m;
        while bits != 0 {
            let i = bits.trailing_zeros();
            fam.push(self.domain[i as usize]);
            bits &= bits - 1;
        }
        fam
    }
}

impl CoverSystem {
    pub(crate) fn empty(n: usize) -> Self {
        CoverSystem {
            targets: (0..n).map(|_| TargetCovers::empty()).collect(),
        }
    }

    pub(crate) fn contains(
        &self,
        cx: &PolytopeComplex,
        target: ObjectId,
        family: &[ObjectId],
    ) -> bool {
        let t = &self.targets[target.index()];
        match t.encode(family, cx.bottom()) {
            Some(m) => t.contains_mask(m),
            None => false,
        }
    }

    /// Families of `target` decoded in canonical (ascending mask) order.
    pub(crate) fn families_of(&self, _cx: &PolytopeComplex, target: ObjectId) -> Vec<Vec<ObjectId>> {
        let t = &self.targets[target.index()];
        t.list.iter().map(|&m| t.decode(m)).collect()
    }

    pub(crate) fn decode_mask(&self, target: ObjectId, m: u32) -> Vec<ObjectId> {
        self.targets[target.index()].decode(m)
    }

    pub(crate) fn remove_family(&mut self, bottom: ObjectId, target: ObjectId, family: &[ObjectId]) {
        let t = &mut self.targets[target.index()];
        if let Some(m) = t.encode(family, bottom) {
            if t.contains_mask(m) {
                let i = m as usize;
                t.bits[i >> 6] &= !(1u64 << (i & 63));
                t.list.retain(|&x| x != m);
                t.big_union = t.list.iter().fold(0, |a, &b| a | b);
                t.version += 1;
            }
        }
    }
}

struct Saturator<'a> {
    cx: &'a PolytopeComplex,
    sys: CoverSystem,
    /// For each object s, the (target, family-mask) pairs with s a member.
    member_of: Vec<Vec<(ObjectId, u32)>>,
    queue: VecDeque<(ObjectId, u32)>,
}

impl<'a> Saturator<'a> {
    fn insert(&mut self, target: ObjectId, mask: u32) {
        if !self.sys.targets[target.index()].insert_mask(mask) {
            return;
        }
        self.queue.push_back((target, mask));
        let t = &self.sys.targets[target.index()];
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            let member = t.domain[i];
            bits &= bits - 1;
            self.member_of[member.index()].push((target, mask));
        }
    }

    /// Re-encode a family of `from` in the domain of `to`. Members are below
    /// `from`, so on a transitive order they are also below `to` whenever
    /// `from` is below `to`.
    fn remap(&self, from: ObjectId, mask: u32, to: ObjectId) -> Option<u32> {
        let src = &self.sys.targets[from.index()];
        let dst = &self.sys.targets[to.index()];
        let mut out = 0u32;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            out |= 1u32 << *dst.pos.get(&src.domain[i])?;
        }
        Some(out)
    }

    fn drain(&mut self) {
        while let Some((x, mask)) = self.queue.pop_front() {
            self.apply_r2(x, mask);
            self.apply_r3_base(x, mask);
            self.apply_r3_refinement(x, mask);
            self.apply_r4(x, mask);
        }
    }

    /// R2: pull `mask` (a cover of x) back to every y strictly below x.
    fn apply_r2(&mut self, x: ObjectId, mask: u32) {
        let members = self.sys.targets[x.index()].decode(mask);
        let downset: Vec<ObjectId> = self.cx.downset(x).to_vec();
        for y in downset {
            if y == x || self.cx.is_bottom(y) {
                continue;
            }
            let mut pb = 0u32;
            let mut ok = true;
            for &s in &members {
                let m = match self.cx.meet_opt(s, y) {
                    Some(m) => m,
                    None => {
                        ok = false;
                        break;
                    }
                };
                if self.cx.is_bottom(m) {
                    continue;
                }
                match self.sys.targets[y.index()].pos.get(&m) {
                    Some(&p) => pb |= 1 << p,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.insert(y, pb);
            }
        }
    }

    /// R3 with `mask` as the base: refine each member by its known covers.
    fn apply_r3_base(&mut self, x: ObjectId, mask: u32) {
        let members = self.sys.targets[x.index()].decode(mask);
        for &s in &members {
            let s_bit = 1u32 << self.sys.targets[x.index()].pos[&s];
            let refinements: Vec<u32> = self.sys.targets[s.index()].list.clone();
            for t in refinements {
                if let Some(tx) = self.remap(s, t, x) {
                    self.insert(x, (mask & !s_bit) | tx);
                }
            }
        }
    }

    /// R3 with `mask` as the refinement: plug it into bases containing x.
    fn apply_r3_refinement(&mut self, x: ObjectId, mask: u32) {
        let bases: Vec<(ObjectId, u32)> = self.member_of[x.index()].clone();
        for (z, base) in bases {
            let x_bit = 1u32 << self.sys.targets[z.index()].pos[&x];
            if let Some(mx) = self.remap(x, mask, z) {
                self.insert(z, (base & !x_bit) | mx);
            }
        }
    }

    /// R4: transport a cover of dst(h) to src(h) along the restriction.
    fn apply_r4(&mut self, x: ObjectId, mask: u32) {
        let members = self.sys.targets[x.index()].decode(mask);
        let hmors: Vec<HMorId> = self.cx.hmors_into(x).to_vec();
        for h in hmors {
            if self.cx.is_identity_h(h) {
                continue;
            }
            let y = self.cx.src(h);
            let mut tm = 0u32;
            let mut ok = true;
            for &s in &members {
                let (a, _) = match self.cx.restrict_opt(h, s) {
                    Some(r) => r,
                    None => {
                        ok = false;
                        break;
                    }
                };
                if self.cx.is_bottom(a) {
                    continue;
                }
                match self.sys.targets[y.index()].pos.get(&a) {
                    Some(&p) => tm |= 1 << p,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.insert(y, tm);
            }
        }
    }
}

/// Per-target scratch data for the R5 sweep, snapshotted at sweep start.
pub(crate) struct SweepCtx {
    /// Domain size.
    d: usize,
    /// Known covers of each domain member, re-encoded in target coordinates.
    member_covs: Vec<Vec<u32>>,
    /// Union of each member's known covers, in target coordinates.
    member_bigu: Vec<u32>,
    /// meets_pos[u][s] = target-local bit of meet(domain[u], domain[s]).
    meets_pos: Vec<Vec<Option<u32>>>,
    /// Known covers of the target, largest families first.
    cov_sorted: Vec<u32>,
    /// zeta[m] = 1 iff some known cover of the target is a subset of m.
    zeta: Vec<u64>,
    cov_bits: Vec<u64>,
}

const FAST_PATH_TRIES: usize = 64;

fn bitset_get(bits: &[u64], i: usize) -> bool {
    (bits[i >> 6] >> (i & 63)) & 1 == 1
}

fn bitset_set(bits: &mut [u64], i: usize) {
    bits[i >> 6] |= 1u64 << (i & 63);
}

impl SweepCtx {
    pub(crate) fn build(cx: &PolytopeComplex, sys: &CoverSystem, x: ObjectId) -> SweepCtx {
        let t = &sys.targets[x.index()];
        let d = t.domain.len();
        let mut member_covs = Vec::with_capacity(d);
        let mut member_bigu = Vec::with_capacity(d);
        for &s in &t.domain {
            let st = &sys.targets[s.index()];
            let mut covs = Vec::with_capacity(st.list.len());
            let mut bigu = 0u32;
            for &m in &st.list {
                let mut out = 0u32;
                let mut bits = m;
                let mut ok = true;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    match t.pos.get(&st.domain[i]) {
                        Some(&p) => out |= 1 << p,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    covs.push(out);
                    bigu |= out;
                }
            }
            member_covs.push(covs);
            member_bigu.push(bigu);
        }
        let mut meets_pos = vec![vec![None; d]; d];
        for u in 0..d {
            for s in 0..d {
                if let Some(m) = cx.meet_opt(t.domain[u], t.domain[s]) {
                    if !cx.is_bottom(m) {
                        meets_pos[u][s] = t.pos.get(&m).copied();
                    }
                }
            }
        }
        let mut cov_sorted = t.list.clone();
        cov_sorted.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
        // Subset-zeta of the cover bitset: zeta[m] records whether any known
        // cover lies inside m.
        let size = 1usize << d;
        let mut zeta = t.bits.clone();
        for i in 0..d {
            let bit = 1usize << i;
            for m in 0..size {
                if m & bit != 0 && bitset_get(&zeta, m ^ bit) {
                    bitset_set(&mut zeta, m);
                }
            }
        }
        SweepCtx {
            d,
            member_covs,
            member_bigu,
            meets_pos,
            cov_sorted,
            zeta,
            cov_bits: t.bits.clone(),
        }
    }

    pub(crate) fn domain_size(&self) -> usize {
        self.d
    }

    pub(crate) fn is_known(&self, mask: u32) -> bool {
        bitset_get(&self.cov_bits, mask as usize)
    }

    /// Decides whether `mask` is addable by R5 against the snapshot: is there
    /// a choice of known covers of its members whose union is a known cover?
    /// Returns the refinement-union witness.
    pub(crate) fn r5_witness(&self, mask: u32) -> Option<u32> {
        let members: Vec<usize> = (0..self.d).filter(|&i| mask & (1 << i) != 0).collect();
        if members.is_empty() {
            return None;
        }
        // Relaxation: every reachable union sits inside the union of all
        // member covers, so some known cover must fit in there.
        let reach_all: u32 = members.iter().map(|&i| self.member_bigu[i]).fold(0, |a, b| a | b);
        if !bitset_get(&self.zeta, reach_all as usize) {
            return None;
        }
        // Fast path: per known cover U of the target, the pullbacks of U to
        // the members are always known covers of them (R2); their union is a
        // valid refinement, so membership of that union settles it.
        for &u_mask in self.cov_sorted.iter().take(FAST_PATH_TRIES) {
            let mut w = 0u32;
            for &s in &members {
                let mut bits = u_mask;
                while bits != 0 {
                    let u = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    if let Some(p) = self.meets_pos[u][s] {
                        w |= 1 << p;
                    }
                }
            }
            if self.is_known(w) {
                return Some(w);
            }
        }
        // Exact search over all choice combinations, smallest option sets
        // first, deduplicating partial unions.
        let mut order = members.clone();
        order.sort_by_key(|&i| self.member_covs[i].len());
        let mut front: Vec<u32> = vec![0];
        for (k, &s) in order.iter().enumerate() {
            let last = k + 1 == order.len();
            let mut next = Vec::new();
            let mut next_seen = std::collections::HashSet::new();
            for &partial in &front {
                for &t in &self.member_covs[s] {
                    let u = partial | t;
                    if last && self.is_known(u) {
                        return Some(u);
                    }
                    if next_seen.insert(u) {
                        next.push(u);
                    }
                }
            }
            front = next;
            if front.is_empty() {
                return None;
            }
        }
        None
    }
}

pub(crate) fn saturate_covers(
    cx: &PolytopeComplex,
    basis: &[(ObjectId, Vec<ObjectId>)],
) -> Result<CoverSystem, ComplexError> {
    for x in cx.polytopes() {
        let size = cx.downset(x).len();
        if size > cx.cap() {
            return Err(ComplexError::CapExceeded {
                object: cx.name(x).to_string(),
                size,
                cap: cx.cap(),
            });
        }
    }
    let mut targets = Vec::with_capacity(cx.object_count());
    for x in cx.objects() {
        if cx.is_bottom(x) {
            targets.push(TargetCovers::empty());
        } else {
            let domain: Vec<ObjectId> = cx
                .downset(x)
                .iter()
                .copied()
                .filter(|&y| !cx.is_bottom(y))
                .collect();
            targets.push(TargetCovers::with_domain(domain));
        }
    }
    let mut sat = Saturator {
        cx,
        sys: CoverSystem { targets },
        member_of: vec![Vec::new(); cx.object_count()],
        queue: VecDeque::new(),
    };

    // Seed: basis families (normalized, bottom dropped) and R1 singletons.
    for (target, family) in basis {
        let target = *target;
        if cx.is_bottom(target) {
            return Err(ComplexError::BadCover {
                target: cx.name(target).to_string(),
                member: cx.name(target).to_string(),
            });
        }
        for &m in family {
            if !cx.leq(m, target) {
                return Err(ComplexError::BadCover {
                    target: cx.name(target).to_string(),
                    member: cx.name(m).to_string(),
                });
            }
        }
        let mask = sat.sys.targets[target.index()]
            .encode(family, cx.bottom())
            .expect("members are below the target");
        sat.insert(target, mask);
    }
    for x in cx.polytopes() {
        let self_bit = 1u32 << sat.sys.targets[x.index()].pos[&x];
        sat.insert(x, self_bit);
    }

    // Alternate between draining the refinement rules and sweeping R5.
    let mut last_sweep: HashMap<ObjectId, Vec<u64>> = HashMap::new();
    loop {
        sat.drain();
        let mut added = false;
        for x in cx.polytopes() {
            let stamp: Vec<u64> = sat.sys.targets[x.index()]
                .domain
                .iter()
                .map(|s| sat.sys.targets[s.index()].version)
                .collect();
            if last_sweep.get(&x) == Some(&stamp) {
                continue;
            }
            last_sweep.insert(x, stamp);
            let ctx = SweepCtx::build(cx, &sat.sys, x);
            let size = 1u32 << ctx.domain_size();
            let mut found = Vec::new();
            for m in 1..size {
                if ctx.is_known(m) {
                    continue;
                }
                if ctx.r5_witness(m).is_some() {
                    found.push(m);
                }
            }
            for m in found {
                sat.insert(x, m);
                added = true;
            }
        }
        if !added && sat.queue.is_empty() {
            break;
        }
    }

    let mut sys = sat.sys;
    for t in &mut sys.targets {
        t.list.sort_unstable();
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::super::RawComplex;
    use super::*;

    fn divisor_complex(n_max: usize) -> PolytopeComplex {
        // Objects 1..=n_max under divisibility; coprime factorizations as basis.
        let names: Vec<String> = (1..=n_max).map(|n| format!("({n})")).collect();
        let mut leq = Vec::new();
        for a in 1..=n_max {
            for b in 1..=n_max {
                if b % a == 0 {
                    leq.push((a - 1, b - 1));
                }
            }
        }
        let mut basis = Vec::new();
        for n in 2..=n_max {
            let divisors: Vec<usize> = (2..=n).filter(|d| n % d == 0).collect();
            for mask in 1u32..(1 << divisors.len()) {
                let fam: Vec<usize> = (0..divisors.len())
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| divisors[i])
                    .collect();
                let coprime = fam
                    .iter()
                    .enumerate()
                    .all(|(i, &a)| fam[i + 1..].iter().all(|&b| gcd(a, b) == 1));
                let product: usize = fam.iter().product();
                if coprime && product % n == 0 {
                    basis.push((n - 1, fam.iter().map(|&d| d - 1).collect()));
                }
            }
        }
        RawComplex {
            names,
            bottom: Some(0),
            leq,
            basis,
            ..Default::default()
        }
        .assemble()
        .unwrap()
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    fn obj(cx: &PolytopeComplex, n: usize) -> ObjectId {
        cx.object_by_name(&format!("({n})")).unwrap()
    }

    #[test]
    fn divisor_covers_match_coprime_oracle() {
        let cx = divisor_complex(12);
        assert!(cx.is_cover(obj(&cx, 6), &[obj(&cx, 2), obj(&cx, 3)]).unwrap());
        assert!(!cx.is_cover(obj(&cx, 4), &[obj(&cx, 2)]).unwrap());
        assert!(cx.is_cover(obj(&cx, 12), &[obj(&cx, 3), obj(&cx, 4)]).unwrap());
        // Pairwise-coprime families agree with the divisibility predicate.
        for n in 2..=12usize {
            let target = obj(&cx, n);
            let divisors: Vec<usize> = (2..=n).filter(|d| n % d == 0).collect();
            for mask in 1u32..(1 << divisors.len()) {
                let fam: Vec<usize> = (0..divisors.len())
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| divisors[i])
                    .collect();
                let coprime = fam
                    .iter()
                    .enumerate()
                    .all(|(i, &a)| fam[i + 1..].iter().all(|&b| gcd(a, b) == 1));
                if !coprime {
                    continue;
                }
                let product: usize = fam.iter().product();
                let ids: Vec<ObjectId> = fam.iter().map(|&d| obj(&cx, d)).collect();
                assert_eq!(
                    cx.is_cover(target, &ids).unwrap(),
                    product % n == 0,
                    "target ({n}) family {fam:?}",
                );
            }
        }
    }

    #[test]
    fn saturation_adds_refinable_supersets() {
        // {2,3,6} refines memberwise to the known cover {2,3} of 6, so axiom
        // (B) forces it in.
        let cx = divisor_complex(6);
        assert!(cx
            .is_cover(obj(&cx, 6), &[obj(&cx, 2), obj(&cx, 3), obj(&cx, 6)])
            .unwrap());
        assert!(!cx.is_cover(obj(&cx, 4), &[obj(&cx, 2), obj(&cx, 4)]).unwrap());
    }

    #[test]
    fn every_cover_divides_product() {
        let cx = divisor_complex(12);
        for n in 2..=12usize {
            let target = obj(&cx, n);
            for fam in cx.covers_of(target) {
                let product: usize = fam
                    .iter()
                    .map(|&m| cx.name(m)[1..cx.name(m).len() - 1].parse::<usize>().unwrap())
                    .product();
                assert_eq!(product % n, 0, "cover {fam:?} of ({n})");
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let names: Vec<String> = (0..6).map(|i| format!("o{i}")).collect();
        let mut leq = Vec::new();
        for i in 1..6 {
            leq.push((i, 5));
        }
        let raw = RawComplex {
            names,
            bottom: Some(0),
            leq,
            cap: Some(3),
            ..Default::default()
        };
        assert!(matches!(
            raw.assemble(),
            Err(ComplexError::CapExceeded { .. })
        ));
    }
}
