//! Axiom validation with concrete counterexample witnesses.

use std::fmt;

use super::covers::SweepCtx;
use super::{HMorId, ObjectId, PolytopeComplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// Vertical order: poset with bottom, meets, and a Grothendieck topology.
    V,
    /// Horizontal groupoid.
    H,
    /// Restriction action with unique lifts.
    P,
    /// Horizontal stability of covers.
    C,
    /// Saturation of the cover system.
    B,
    /// Functor continuity: covers and meets preserved.
    FC,
    /// Functor compatibility with restriction.
    FP,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::V => "(V)",
            Axiom::H => "(H)",
            Axiom::P => "(P)",
            Axiom::C => "(C)",
            Axiom::B => "(B)",
            Axiom::FC => "(FC)",
            Axiom::FP => "(FP)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_axioms(&self) -> Vec<Axiom> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.axiom)
            .collect()
    }

    pub fn check(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}",
                c.axiom,
                if c.passed { "pass" } else { "FAIL" }
            )?;
            for w in &c.witnesses {
                writeln!(f, "    {w}")?;
            }
        }
        Ok(())
    }
}

fn family_names(cx: &PolytopeComplex, fam: &[ObjectId]) -> String {
    let names: Vec<&str> = fam.iter().map(|&m| cx.name(m)).collect();
    format!("{{{}}}", names.join(", "))
}

/// Checks the five polytope-complex axioms and reports witnesses on failure.
pub fn validate(cx: &PolytopeComplex) -> ValidationReport {
    let checks = vec![
        check_v(cx),
        check_h(cx),
        check_p(cx),
        check_c(cx),
        check_b(cx),
    ];
    ValidationReport { checks }
}

fn check_v(cx: &PolytopeComplex) -> AxiomCheck {
    let mut w = Vec::new();
    let n = cx.object_count();
    for x in cx.objects() {
        if !cx.leq(x, x) {
            w.push(format!("order not reflexive at `{}`", cx.name(x)));
        }
    }
    for a in cx.objects() {
        for b in cx.objects() {
            if a != b && cx.leq(a, b) && cx.leq(b, a) {
                w.push(format!(
                    "order not antisymmetric: `{}` and `{}`",
                    cx.name(a),
                    cx.name(b)
                ));
            }
            if !cx.leq(a, b) {
                continue;
            }
            for c in cx.objects() {
                if cx.leq(b, c) && !cx.leq(a, c) {
                    w.push(format!(
                        "order not transitive: `{}` <= `{}` <= `{}`",
                        cx.name(a),
                        cx.name(b),
                        cx.name(c)
                    ));
                }
            }
        }
    }
    let bottom = cx.bottom();
    for x in cx.objects() {
        if !cx.leq(bottom, x) {
            w.push(format!(
                "bottom `{}` is not below `{}`",
                cx.name(bottom),
                cx.name(x)
            ));
        }
        if x != bottom && cx.leq(x, bottom) {
            w.push(format!("`{}` lies below the bottom", cx.name(x)));
        }
    }
    for a in cx.objects() {
        for b in cx.objects() {
            match cx.meet_opt(a, b) {
                None => w.push(format!(
                    "no meet for `{}` and `{}`",
                    cx.name(a),
                    cx.name(b)
                )),
                Some(m) => {
                    if !cx.leq(m, a) || !cx.leq(m, b) {
                        w.push(format!(
                            "meet(`{}`, `{}`) = `{}` is not a lower bound",
                            cx.name(a),
                            cx.name(b),
                            cx.name(m)
                        ));
                    } else {
                        for c in cx.objects() {
                            if cx.leq(c, a) && cx.leq(c, b) && !cx.leq(c, m) {
                                w.push(format!(
                                    "meet(`{}`, `{}`) = `{}` misses lower bound `{}`",
                                    cx.name(a),
                                    cx.name(b),
                                    cx.name(m),
                                    cx.name(c)
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    // Topology axioms of the stored system: identity covers, pullback
    // stability, transitivity of refinement.
    let sys = cx.cover_system();
    for x in cx.polytopes() {
        if !sys.contains(cx, x, &[x]) {
            w.push(format!("identity cover {{{}}} is missing", cx.name(x)));
        }
        for fam in cx.covers_of(x) {
            for &y in cx.downset(x) {
                if y == x || cx.is_bottom(y) {
                    continue;
                }
                let pb: Option<Vec<ObjectId>> = fam
                    .iter()
                    .map(|&s| cx.meet_opt(s, y))
                    .collect::<Option<Vec<_>>>();
                if let Some(pb) = pb {
                    let pb: Vec<ObjectId> =
                        pb.into_iter().filter(|&m| !cx.is_bottom(m)).collect();
                    if !sys.contains(cx, y, &pb) {
                        w.push(format!(
                            "pullback of {} from `{}` to `{}` is not a cover",
                            family_names(cx, &fam),
                            cx.name(x),
                            cx.name(y)
                        ));
                    }
                }
            }
            for &s in &fam {
                for refinement in cx.covers_of(s) {
                    let mut derived: Vec<ObjectId> =
                        fam.iter().copied().filter(|&m| m != s).collect();
                    derived.extend(refinement.iter().copied());
                    derived.sort_unstable();
                    derived.dedup();
                    if !sys.contains(cx, x, &derived) {
                        w.push(format!(
                            "refining `{}` inside {} by {} leaves the covers of `{}`",
                            cx.name(s),
                            family_names(cx, &fam),
                            family_names(cx, &refinement),
                            cx.name(x)
                        ));
                    }
                }
            }
        }
    }
    let _ = n;
    AxiomCheck {
        axiom: Axiom::V,
        passed: w.is_empty(),
        witnesses: w,
    }
}

fn check_h(cx: &PolytopeComplex) -> AxiomCheck {
    let mut w = Vec::new();
    let hs: Vec<HMorId> = cx.hmor_ids().collect();
    for &g in &hs {
        for &h in &hs {
            if cx.dst(h) != cx.src(g) {
                if cx.compose_h(g, h).is_some() {
                    w.push(format!(
                        "`{}` after `{}` defined despite mismatched endpoints",
                        cx.hmor_name(g),
                        cx.hmor_name(h)
                    ));
                }
                continue;
            }
            match cx.compose_h(g, h) {
                None => w.push(format!(
                    "`{}` after `{}` is undefined",
                    cx.hmor_name(g),
                    cx.hmor_name(h)
                )),
                Some(k) => {
                    if cx.src(k) != cx.src(h) || cx.dst(k) != cx.dst(g) {
                        w.push(format!(
                            "`{}` after `{}` = `{}` has wrong endpoints",
                            cx.hmor_name(g),
                            cx.hmor_name(h),
                            cx.hmor_name(k)
                        ));
                    }
                }
            }
        }
    }
    for &f in &hs {
        for &g in &hs {
            if cx.src(f) != cx.dst(g) {
                continue;
            }
            for &h in &hs {
                if cx.src(g) != cx.dst(h) {
                    continue;
                }
                let left = cx.compose_h(f, g).and_then(|fg| cx.compose_h(fg, h));
                let right = cx.compose_h(g, h).and_then(|gh| cx.compose_h(f, gh));
                if left != right || left.is_none() {
                    w.push(format!(
                        "associativity fails on (`{}`, `{}`, `{}`)",
                        cx.hmor_name(f),
                        cx.hmor_name(g),
                        cx.hmor_name(h)
                    ));
                }
            }
        }
    }
    for x in cx.objects() {
        let id = cx.identity_h(x);
        if cx.src(id) != x || cx.dst(id) != x {
            w.push(format!("identity of `{}` has wrong endpoints", cx.name(x)));
        }
        for &h in cx.hmors_from(x) {
            if cx.compose_h(h, id) != Some(h) {
                w.push(format!(
                    "`{}` after the identity is not itself",
                    cx.hmor_name(h)
                ));
            }
        }
        for &h in cx.hmors_into(x) {
            if cx.compose_h(id, h) != Some(h) {
                w.push(format!(
                    "identity after `{}` is not itself",
                    cx.hmor_name(h)
                ));
            }
        }
    }
    for &h in &hs {
        let hi = cx.inverse_h(h);
        if cx.src(hi) != cx.dst(h) || cx.dst(hi) != cx.src(h) {
            w.push(format!(
                "inverse of `{}` has wrong endpoints",
                cx.hmor_name(h)
            ));
            continue;
        }
        let src_id = cx.identity_h(cx.src(h));
        let dst_id = cx.identity_h(cx.dst(h));
        if cx.compose_h(hi, h) != Some(src_id) || cx.compose_h(h, hi) != Some(dst_id) {
            w.push(format!(
                "`{}` and `{}` are not mutually inverse",
                cx.hmor_name(h),
                cx.hmor_name(hi)
            ));
        }
    }
    AxiomCheck {
        axiom: Axiom::H,
        passed: w.is_empty(),
        witnesses: w,
    }
}

fn check_p(cx: &PolytopeComplex) -> AxiomCheck {
    let mut w = Vec::new();
    for h in cx.hmor_ids() {
        let (src, dst) = (cx.src(h), cx.dst(h));
        let down_dst: Vec<ObjectId> = cx.downset(dst).to_vec();
        let mut images = Vec::new();
        for &b in &down_dst {
            let (a, lift) = match cx.restrict_opt(h, b) {
                Some(r) => r,
                None => {
                    w.push(format!(
                        "restriction of `{}` at `{}` is undefined",
                        cx.hmor_name(h),
                        cx.name(b)
                    ));
                    continue;
                }
            };
            images.push((b, a));
            if !cx.leq(a, src) {
                w.push(format!(
                    "restriction of `{}` at `{}` leaves the down-set of `{}`",
                    cx.hmor_name(h),
                    cx.name(b),
                    cx.name(src)
                ));
            }
            if cx.src(lift) != a || cx.dst(lift) != b {
                w.push(format!(
                    "lift of `{}` at `{}` has wrong endpoints",
                    cx.hmor_name(h),
                    cx.name(b)
                ));
            }
            if cx.is_bottom(b) && !cx.is_bottom(a) {
                w.push(format!(
                    "restriction of `{}` does not fix the bottom",
                    cx.hmor_name(h)
                ));
            }
        }
        if let Some((a, lift)) = cx.restrict_opt(h, dst) {
            if a != src || lift != h {
                w.push(format!(
                    "restriction of `{}` at its target is not itself",
                    cx.hmor_name(h)
                ));
            }
        }
        // Down-set order isomorphism: bijective and monotone both ways.
        let down_src: Vec<ObjectId> = cx.downset(src).to_vec();
        let mut seen = std::collections::HashSet::new();
        for &(b, a) in &images {
            if !seen.insert(a) {
                w.push(format!(
                    "restriction of `{}` is not injective at `{}`",
                    cx.hmor_name(h),
                    cx.name(b)
                ));
            }
        }
        if images.len() == down_dst.len() && seen.len() != down_src.len() {
            w.push(format!(
                "restriction of `{}` is not onto the down-set of `{}`",
                cx.hmor_name(h),
                cx.name(src)
            ));
        }
        for &(b1, a1) in &images {
            for &(b2, a2) in &images {
                if cx.leq(b1, b2) != cx.leq(a1, a2) {
                    w.push(format!(
                        "restriction of `{}` is not an order isomorphism on (`{}`, `{}`)",
                        cx.hmor_name(h),
                        cx.name(b1),
                        cx.name(b2)
                    ));
                }
            }
        }
    }
    // Compatibility with composition.
    for g in cx.hmor_ids() {
        for h in cx.hmor_ids() {
            if cx.dst(h) != cx.src(g) {
                continue;
            }
            let k = match cx.compose_h(g, h) {
                Some(k) => k,
                None => continue,
            };
            for &c in cx.downset(cx.dst(g)).to_vec().iter() {
                let (Some((b, g_lift)), Some((a_direct, k_lift))) =
                    (cx.restrict_opt(g, c), cx.restrict_opt(k, c))
                else {
                    continue;
                };
                let Some((a, h_lift)) = cx.restrict_opt(h, b) else {
                    continue;
                };
                let composed = cx.compose_h(g_lift, h_lift);
                if a != a_direct || composed != Some(k_lift) {
                    w.push(format!(
                        "restricting `{}` disagrees with restricting `{}` then `{}` at `{}`",
                        cx.hmor_name(k),
                        cx.hmor_name(g),
                        cx.hmor_name(h),
                        cx.name(c)
                    ));
                }
            }
        }
    }
    AxiomCheck {
        axiom: Axiom::P,
        passed: w.is_empty(),
        witnesses: w,
    }
}

fn check_c(cx: &PolytopeComplex) -> AxiomCheck {
    let mut w = Vec::new();
    for h in cx.hmor_ids() {
        if cx.is_identity_h(h) {
            continue;
        }
        let (src, dst) = (cx.src(h), cx.dst(h));
        if cx.is_bottom(dst) {
            continue;
        }
        for fam in cx.covers_of(dst) {
            let transported: Option<Vec<ObjectId>> = fam
                .iter()
                .map(|&s| cx.restrict_opt(h, s).map(|(a, _)| a))
                .collect();
            let Some(transported) = transported else {
                continue; // missing restriction data is reported under (P)
            };
            let transported: Vec<ObjectId> = transported
                .into_iter()
                .filter(|&a| !cx.is_bottom(a))
                .collect();
            if !cx.cover_system().contains(cx, src, &transported) {
                w.push(format!(
                    "cover {} of `{}` does not transport to a cover of `{}` along `{}`",
                    family_names(cx, &fam),
                    cx.name(dst),
                    cx.name(src),
                    cx.hmor_name(h)
                ));
            }
        }
    }
    AxiomCheck {
        axiom: Axiom::C,
        passed: w.is_empty(),
        witnesses: w,
    }
}

fn check_b(cx: &PolytopeComplex) -> AxiomCheck {
    let mut w = Vec::new();
    let sys = cx.cover_system();
    for x in cx.polytopes() {
        let ctx = SweepCtx::build(cx, sys, x);
        let size = 1u32 << ctx.domain_size();
        for m in 1..size {
            if ctx.is_known(m) {
                continue;
            }
            if ctx.r5_witness(m).is_some() {
                let fam = sys.decode_mask(x, m);
                w.push(format!(
                    "family {} of `{}` admits a refinement into a known cover but is absent",
                    family_names(cx, &fam),
                    cx.name(x)
                ));
            }
        }
    }
    AxiomCheck {
        axiom: Axiom::B,
        passed: w.is_empty(),
        witnesses: w,
    }
}

/// Single-field corruptions used by the validation tests.
#[derive(Debug, Clone)]
pub enum Mutation {
    /// Sets `leq(a, b)` without closing the order.
    AddOrderEdge(ObjectId, ObjectId),
    /// Points the inverse of the first morphism at the second.
    CorruptInverse(HMorId, HMorId),
    /// Removes one restriction entry.
    DropRestriction(HMorId, ObjectId),
    /// Removes one covering family.
    DropCoverFamily(ObjectId, Vec<ObjectId>),
}

/// Applies a mutation to a copy of the complex.
pub fn mutated(cx: &PolytopeComplex, m: &Mutation) -> PolytopeComplex {
    let mut out = cx.clone();
    match m {
        Mutation::AddOrderEdge(a, b) => out.corrupt_leq(*a, *b, true),
        Mutation::CorruptInverse(h, bad) => out.corrupt_inverse(*h, *bad),
        Mutation::DropRestriction(h, b) => out.corrupt_drop_restriction(*h, *b),
        Mutation::DropCoverFamily(target, fam) => out.corrupt_drop_cover(*target, fam),
    }
    out
}

impl PolytopeComplex {
    pub(crate) fn corrupt_leq(&mut self, a: ObjectId, b: ObjectId, value: bool) {
        self.leq[a.index()][b.index()] = value;
    }

    pub(crate) fn corrupt_inverse(&mut self, h: HMorId, bad: HMorId) {
        self.inverse[h.index()] = bad;
    }

    pub(crate) fn corrupt_drop_restriction(&mut self, h: HMorId, b: ObjectId) {
        self.restrict.remove(&(h, b));
    }

    pub(crate) fn corrupt_drop_cover(&mut self, target: ObjectId, fam: &[ObjectId]) {
        let bottom = self.bottom;
        self.covers.remove_family(bottom, target, fam);
    }
}
