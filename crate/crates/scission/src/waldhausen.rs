//! Seeded property checks for the span category's structural axioms:
//! saturation, gluing, extension, closure of the two morphism classes under
//! composition, and preservation of both by pushouts.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{ObjectId, PolytopeComplex};
use crate::sc::{
    cofiber, classify, enumerate_sc_morphisms, sc_compose, sc_equal, sc_invert,
    sc_pushout, ScError, ScMorphism,
};
use crate::twist::{
    enumerate, factor_over, induced_pushforward_submap, is_covering_sub_map,
    pullback_along_shuffle, pushforward, vertical_pullback, Shuffle, SubMap, TwObject,
};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub runs: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct WaldhausenReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckOutcome>,
}

impl WaldhausenReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures.is_empty())
    }
}

impl fmt::Display for WaldhausenReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {} samples {}", self.seed, self.samples)?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<24} {} runs  {}",
                c.name,
                c.runs,
                if c.failures.is_empty() {
                    "pass".to_string()
                } else {
                    format!("{} FAILURES", c.failures.len())
                }
            )?;
            for w in c.failures.iter().take(5) {
                writeln!(f, "    {w}")?;
            }
        }
        Ok(())
    }
}

/// Deterministic random morphisms over one complex.
pub struct Sampler<'a> {
    cx: &'a PolytopeComplex,
    rng: ChaCha8Rng,
    /// Pairwise-disjoint covering families per object.
    disjoint_covers: Vec<Vec<Vec<ObjectId>>>,
    /// All pairwise-disjoint families per object (including empty).
    disjoint_families: Vec<Vec<Vec<ObjectId>>>,
}

impl<'a> Sampler<'a> {
    pub fn new(cx: &'a PolytopeComplex, seed: u64) -> Sampler<'a> {
        let mut disjoint_covers = Vec::with_capacity(cx.object_count());
        let mut disjoint_families = Vec::with_capacity(cx.object_count());
        for x in cx.objects() {
            if cx.is_bottom(x) {
                disjoint_covers.push(Vec::new());
                disjoint_families.push(Vec::new());
                continue;
            }
            let mut covers = Vec::new();
            'fam: for fam in cx.covers_of(x) {
                for (i, &a) in fam.iter().enumerate() {
                    for &b in &fam[i + 1..] {
                        match cx.meet_opt(a, b) {
                            Some(m) if cx.is_bottom(m) => {}
                            _ => continue 'fam,
                        }
                    }
                }
                covers.push(fam);
            }
            disjoint_covers.push(covers);
            disjoint_families.push(enumerate::disjoint_families(cx, x));
        }
        Sampler {
            cx,
            rng: ChaCha8Rng::seed_from_u64(seed),
            disjoint_covers,
            disjoint_families,
        }
    }

    fn pick<'b, T>(&mut self, items: &'b [T]) -> &'b T {
        &items[self.rng.gen_range(0..items.len())]
    }

    pub fn polytope(&mut self) -> ObjectId {
        let polys: Vec<ObjectId> = self.cx.polytopes().collect();
        *self.pick(&polys)
    }

    pub fn tw_object(&mut self, min: usize, max: usize) -> TwObject {
        let len = self.rng.gen_range(min..=max);
        let comps = (0..len).map(|_| self.polytope()).collect();
        TwObject::new(self.cx, comps).expect("sampled components are polytopes")
    }

    fn random_hmor_from(&mut self, x: ObjectId) -> crate::complex::HMorId {
        let hs = self.cx.hmors_from(x);
        hs[self.rng.gen_range(0..hs.len())]
    }

    /// A covering sub-map onto `a` built from per-component disjoint covers.
    pub fn covering_sub_map_onto(&mut self, a: &TwObject) -> SubMap {
        let mut comps = Vec::new();
        let mut map = Vec::new();
        for (j, &c) in a.components().iter().enumerate() {
            let options = &self.disjoint_covers[c.index()];
            let fam = options[self.rng.gen_range(0..options.len())].clone();
            for piece in fam {
                comps.push(piece);
                map.push(j);
            }
        }
        SubMap::new(
            self.cx,
            TwObject::new(self.cx, comps).expect("cover members are polytopes"),
            a.clone(),
            map,
        )
        .expect("sampled covers are disjoint")
    }

    /// A not-necessarily-covering sub-map into `a`.
    pub fn sub_map_into(&mut self, a: &TwObject) -> SubMap {
        let mut comps = Vec::new();
        let mut map = Vec::new();
        for (j, &c) in a.components().iter().enumerate() {
            let options = &self.disjoint_families[c.index()];
            let fam = options[self.rng.gen_range(0..options.len())].clone();
            for piece in fam {
                comps.push(piece);
                map.push(j);
            }
        }
        SubMap::new(
            self.cx,
            TwObject::new(self.cx, comps).expect("family members are polytopes"),
            a.clone(),
            map,
        )
        .expect("sampled families are disjoint")
    }

    /// A bijective shuffle out of `apex`: random motions, then a shulffled
    /// target order.
    fn bijective_shuffle_from(&mut self, apex: &TwObject) -> Shuffle {
        let n = apex.len();
        let hs: Vec<crate::complex::HMorId> = apex
            .components()
            .iter()
            .map(|&c| self.random_hmor_from(c))
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let mut dst = vec![self.cx.bottom(); n];
        for (i, &h) in hs.iter().enumerate() {
            dst[perm[i]] = self.cx.dst(h);
        }
        Shuffle::new(
            self.cx,
            apex.clone(),
            TwObject::new(self.cx, dst).expect("motion targets are polytopes"),
            perm,
            hs,
        )
        .expect("sampled shuffle is well formed")
    }

    /// A weak equivalence out of `a`.
    pub fn weak_equivalence_from(&mut self, a: &TwObject) -> ScMorphism {
        let p = self.covering_sub_map_onto(a);
        let sigma = self.bijective_shuffle_from(&p.src);
        ScMorphism::new(self.cx, p, sigma).expect("legs share the sampled apex")
    }

    /// A cofibration out of `a`: a weak equivalence shape plus padding
    /// components missed by the shuffle.
    pub fn cofibration_from(&mut self, a: &TwObject) -> ScMorphism {
        let p = self.covering_sub_map_onto(a);
        let base = self.bijective_shuffle_from(&p.src);
        let extra = self.rng.gen_range(0..=2usize);
        let mut dst = base.dst.components().to_vec();
        let mut map = base.map.clone();
        for _ in 0..extra {
            let at = self.rng.gen_range(0..=dst.len());
            dst.insert(at, self.polytope());
            for m in map.iter_mut() {
                if *m >= at {
                    *m += 1;
                }
            }
        }
        let sigma = Shuffle::new(
            self.cx,
            base.src.clone(),
            TwObject::new(self.cx, dst).expect("components are polytopes"),
            map,
            base.comps.clone(),
        )
        .expect("padding keeps the shuffle well formed");
        ScMorphism::new(self.cx, p, sigma).expect("legs share the sampled apex")
    }

    /// An isomorphism out of `a`: identity cut, bijective move.
    pub fn iso_from(&mut self, a: &TwObject) -> ScMorphism {
        let sigma = self.bijective_shuffle_from(a);
        ScMorphism::new(self.cx, SubMap::identity(a), sigma)
            .expect("identity cut shares the apex")
    }

    /// An arbitrary morphism out of `a`: random cut, random motions, random
    /// merging of equal targets.
    pub fn morphism_from(&mut self, a: &TwObject) -> ScMorphism {
        let p = self.sub_map_into(a);
        let apex = p.src.clone();
        let hs: Vec<crate::complex::HMorId> = apex
            .components()
            .iter()
            .map(|&c| self.random_hmor_from(c))
            .collect();
        let mut dst: Vec<ObjectId> = Vec::new();
        let mut map = Vec::new();
        for &h in &hs {
            let image = self.cx.dst(h);
            let existing: Vec<usize> = (0..dst.len()).filter(|&j| dst[j] == image).collect();
            if !existing.is_empty() && self.rng.gen_bool(0.5) {
                map.push(*self.pick(&existing));
            } else {
                map.push(dst.len());
                dst.push(image);
            }
        }
        let sigma = Shuffle::new(
            self.cx,
            apex,
            TwObject::new(self.cx, dst).expect("components are polytopes"),
            map,
            hs,
        )
        .expect("sampled shuffle is well formed");
        ScMorphism::new(self.cx, p, sigma).expect("legs share the sampled apex")
    }
}

fn fail(out: &mut Vec<String>, sample: usize, what: impl Into<String>) {
    out.push(format!("sample {sample}: {}", what.into()));
}

/// Runs all checks with `samples` draws per check at the given seed.
pub fn check_waldhausen(cx: &PolytopeComplex, samples: usize, seed: u64) -> WaldhausenReport {
    let mut checks = Vec::new();
    checks.push(check_saturation(cx, samples, seed));
    checks.push(check_gluing(cx, samples, seed.wrapping_add(1)));
    checks.push(check_extension(cx, samples, seed.wrapping_add(2)));
    checks.push(check_closure(cx, samples, seed.wrapping_add(3)));
    checks.push(check_pushout_preservation(cx, samples, seed.wrapping_add(4)));
    WaldhausenReport {
        seed,
        samples,
        checks,
    }
}

/// Two of `f`, `g`, `gf` weak equivalences force the third.
fn check_saturation(cx: &PolytopeComplex, samples: usize, seed: u64) -> CheckOutcome {
    let mut s = Sampler::new(cx, seed);
    let mut failures = Vec::new();
    let mut runs = 0;
    for i in 0..samples {
        let a = s.tw_object(1, 2);
        // f a weak equivalence, g arbitrary: gf is one exactly when g is.
        let f = s.weak_equivalence_from(&a);
        let g = s.morphism_from(f.dst());
        let gf = match sc_compose(cx, &f, &g) {
            Ok(m) => m,
            Err(e) => {
                fail(&mut failures, i, format!("composition failed: {e}"));
                continue;
            }
        };
        runs += 1;
        let g_we = classify(cx, &g).is_weak_equivalence;
        let gf_we = classify(cx, &gf).is_weak_equivalence;
        if g_we != gf_we {
            fail(
                &mut failures,
                i,
                format!(
                    "f weak equivalence but g ({}) and gf ({}) disagree",
                    g_we, gf_we
                ),
            );
        }
        // u arbitrary, v a weak equivalence: vu is one exactly when u is.
        let u = s.morphism_from(&a);
        let v = s.weak_equivalence_from(u.dst());
        let vu = match sc_compose(cx, &u, &v) {
            Ok(m) => m,
            Err(e) => {
                fail(&mut failures, i, format!("composition failed: {e}"));
                continue;
            }
        };
        let u_we = classify(cx, &u).is_weak_equivalence;
        let vu_we = classify(cx, &vu).is_weak_equivalence;
        if u_we != vu_we {
            fail(
                &mut failures,
                i,
                format!(
                    "v weak equivalence but u ({}) and vu ({}) disagree",
                    u_we, vu_we
                ),
            );
        }
    }
    CheckOutcome {
        name: "saturation",
        runs,
        failures,
    }
}

/// Weak equivalences of diagrams induce weak equivalences of pushouts. Two
/// sampled shapes: prisms with isomorphism verticals, and the cover-grid
/// comparison of pushforwards that drives the general case.
fn check_gluing(cx: &PolytopeComplex, samples: usize, seed: u64) -> CheckOutcome {
    let mut s = Sampler::new(cx, seed);
    let mut failures = Vec::new();
    let mut runs = 0;
    for i in 0..samples {
        if i % 2 == 0 {
            // Isomorphism verticals: transport the whole diagram and compare
            // pushouts through an isomorphism.
            let a = s.tw_object(1, 1);
            let f = s.morphism_from(&a);
            let c = s.cofibration_from(&a);
            let va = s.iso_from(&a);
            let vb = s.iso_from(c.dst());
            let vc = s.iso_from(f.dst());
            let instance = (|| -> Result<Option<String>, ScError> {
                let va_inv = sc_invert(cx, &va)?;
                let f_bot = sc_compose(cx, &sc_compose(cx, &va_inv, &f)?, &vc)?;
                let c_bot = sc_compose(cx, &sc_compose(cx, &va_inv, &c)?, &vb)?;
                let top = sc_pushout(cx, &f, &c)?;
                let bot = sc_pushout(cx, &f_bot, &c_bot)?;
                let u = sc_compose(cx, &vc, &bot.from_c)?;
                let v = sc_compose(cx, &vb, &bot.from_b)?;
                // The mediating morphism is an isomorphism here; search the
                // isomorphisms only.
                let Some(candidates) = iso_candidates(cx, &top.vertex, &bot.vertex) else {
                    return Ok(None); // oversized, skip
                };
                let mut found = false;
                for m in candidates {
                    if sc_equal(&sc_compose(cx, &top.from_c, &m)?, &u)
                        && sc_equal(&sc_compose(cx, &top.from_b, &m)?, &v)
                    {
                        found = true;
                        if !classify(cx, &m).is_weak_equivalence {
                            return Ok(Some("mediating map is not a weak equivalence".into()));
                        }
                    }
                }
                if !found {
                    return Ok(Some("no mediating isomorphism between pushouts".into()));
                }
                Ok(None)
            })();
            runs += 1;
            match instance {
                Ok(None) => {}
                Ok(Some(msg)) => fail(&mut failures, i, msg),
                Err(e) => fail(&mut failures, i, format!("construction failed: {e}")),
            }
        } else {
            // Cover grid: refine a sub-map row by a covering vertical and
            // compare the pushforwards; the comparison must be covering.
            let a = s.tw_object(1, 2);
            let f = s.sub_map_into(&a);
            let sigma = {
                // Injective set map keeps the transported pieces aligned.
                let base = s.bijective_shuffle_from(&a);
                base
            };
            let p = s.covering_sub_map_onto(&a);
            let instance = (|| -> Result<Option<String>, crate::twist::TwistError> {
                let (_, r, f_prime) = vertical_pullback(cx, &f, &p)?;
                // sigma' moves the refined pieces; q is the transported cover.
                let q = pushforward(cx, &sigma, &p)?;
                let (_, w_to_aprime, sigma_hat) = pullback_along_shuffle(cx, &sigma, &q)?;
                let Some(iota) = factor_over(cx, &p, &w_to_aprime) else {
                    return Ok(Some("cover does not factor through the pullback".into()));
                };
                let sigma_prime = Shuffle::new(
                    cx,
                    p.src.clone(),
                    sigma_hat.dst.clone(),
                    iota.map.iter().map(|&n| sigma_hat.map[n]).collect(),
                    iota.map.iter().map(|&n| sigma_hat.comps[n]).collect(),
                )?;
                let induced = induced_pushforward_submap(
                    cx,
                    &f_prime,
                    &sigma_prime,
                    &f,
                    &sigma,
                    &r,
                    &p,
                    &q,
                )?;
                if !is_covering_sub_map(cx, &induced) {
                    return Ok(Some(
                        "comparison of pushforwards is not a covering sub-map".into(),
                    ));
                }
                Ok(None)
            })();
            runs += 1;
            match instance {
                Ok(None) => {}
                Ok(Some(msg)) => fail(&mut failures, i, msg),
                Err(e) => fail(&mut failures, i, format!("grid construction failed: {e}")),
            }
        }
    }
    CheckOutcome {
        name: "gluing",
        runs,
        failures,
    }
}

/// Isomorphism-shaped morphisms between two objects: re-indexings with
/// motions. `None` when the enumeration would be oversized.
fn iso_candidates(
    cx: &PolytopeComplex,
    a: &TwObject,
    b: &TwObject,
) -> Option<Vec<ScMorphism>> {
    let mut estimate = 1usize;
    for &c in a.components() {
        let options: usize = b
            .components()
            .iter()
            .map(|&d| cx.hmors_between(c, d).len())
            .sum();
        estimate = estimate.saturating_mul(options.max(1));
        if estimate > 50_000 {
            return None;
        }
    }
    let mut out = Vec::new();
    for sigma in enumerate::shuffles(cx, a, b) {
        if sigma.is_bijective() {
            out.push(
                ScMorphism::new(cx, SubMap::identity(a), sigma)
                    .expect("identity cut shares the apex"),
            );
        }
    }
    Some(out)
}

/// A commuting map of cofibration sequences with weak equivalences on both
/// ends is a weak equivalence in the middle.
fn check_extension(cx: &PolytopeComplex, samples: usize, seed: u64) -> CheckOutcome {
    enum Outcome {
        Pass,
        Skip,
        Fail(String),
    }
    let mut s = Sampler::new(cx, seed);
    let mut failures = Vec::new();
    let mut runs = 0;
    for i in 0..samples {
        let a = s.tw_object(1, 1);
        let u = s.weak_equivalence_from(&a); // A -> A'
        let c_bot = s.cofibration_from(u.dst()); // A' >-> B'
        let instance = (|| -> Result<Outcome, ScError> {
            let c_top = sc_compose(cx, &u, &c_bot)?; // A >-> B', with f = id.
            let q_top = cofiber(cx, &c_top)?;
            let q_bot = cofiber(cx, &c_bot)?;
            // Candidate middle maps: enumerate small morphisms B' -> B' that
            // commute with the cofibrations. Oversized instances are skipped,
            // not truncated.
            let b = c_bot.dst().clone();
            let fs = match enumerate_sc_morphisms(cx, &b, &b, b.len() + 1, 4_000) {
                Ok(fs) => fs,
                Err(ScError::EnumerationLimit(_)) => return Ok(Outcome::Skip),
                Err(e) => return Err(e),
            };
            let vs = match enumerate_sc_morphisms(
                cx,
                &q_top.vertex,
                &q_bot.vertex,
                q_top.vertex.len() + 1,
                4_000,
            ) {
                Ok(vs) => vs,
                Err(ScError::EnumerationLimit(_)) => return Ok(Outcome::Skip),
                Err(e) => return Err(e),
            };
            let top_edge = sc_compose(cx, &u, &c_bot)?;
            for f in fs {
                if !sc_equal(&sc_compose(cx, &c_top, &f)?, &top_edge) {
                    continue;
                }
                // The induced quotient map: mediate the cofiber cocone.
                let quot_after = sc_compose(cx, &f, &q_bot.quot)?;
                for v in &vs {
                    if !sc_equal(&sc_compose(cx, &q_top.quot, v)?, &quot_after) {
                        continue;
                    }
                    if classify(cx, v).is_weak_equivalence
                        && !classify(cx, &f).is_weak_equivalence
                    {
                        return Ok(Outcome::Fail(
                            "commuting middle map with weakly equivalent ends is not one".into(),
                        ));
                    }
                }
            }
            Ok(Outcome::Pass)
        })();
        match instance {
            Ok(Outcome::Pass) => runs += 1,
            Ok(Outcome::Skip) => {}
            Ok(Outcome::Fail(msg)) => {
                runs += 1;
                fail(&mut failures, i, msg);
            }
            Err(e) => {
                runs += 1;
                fail(&mut failures, i, format!("construction failed: {e}"));
            }
        }
    }
    CheckOutcome {
        name: "extension",
        runs,
        failures,
    }
}

/// Cofibrations and weak equivalences are closed under composition.
fn check_closure(cx: &PolytopeComplex, samples: usize, seed: u64) -> CheckOutcome {
    let mut s = Sampler::new(cx, seed);
    let mut failures = Vec::new();
    let mut runs = 0;
    for i in 0..samples {
        let a = s.tw_object(1, 2);
        let f = s.cofibration_from(&a);
        let g = s.cofibration_from(f.dst());
        let h = s.weak_equivalence_from(&a);
        let k = s.weak_equivalence_from(h.dst());
        runs += 1;
        match (sc_compose(cx, &f, &g), sc_compose(cx, &h, &k)) {
            (Ok(fg), Ok(hk)) => {
                if !classify(cx, &fg).is_cofibration {
                    fail(&mut failures, i, "composite of cofibrations is not one");
                }
                if !classify(cx, &hk).is_weak_equivalence {
                    fail(
                        &mut failures,
                        i,
                        "composite of weak equivalences is not one",
                    );
                }
            }
            _ => fail(&mut failures, i, "composition failed"),
        }
    }
    CheckOutcome {
        name: "closure",
        runs,
        failures,
    }
}

/// Pushouts along cofibrations exist, commute, and preserve both classes.
fn check_pushout_preservation(cx: &PolytopeComplex, samples: usize, seed: u64) -> CheckOutcome {
    let mut s = Sampler::new(cx, seed);
    let mut failures = Vec::new();
    let mut runs = 0;
    for i in 0..samples {
        let a = s.tw_object(1, 2);
        let f = s.morphism_from(&a);
        let c = if i % 2 == 0 {
            s.cofibration_from(&a)
        } else {
            // A weak-equivalence cofibration exercises the second claim.
            s.weak_equivalence_from(&a)
        };
        if !classify(cx, &c).is_cofibration {
            continue;
        }
        let instance = (|| -> Result<Option<String>, ScError> {
            let p = sc_pushout(cx, &f, &c)?;
            let left = sc_compose(cx, &f, &p.from_c)?;
            let right = sc_compose(cx, &c, &p.from_b)?;
            if !sc_equal(&left, &right) {
                return Ok(Some("pushout square does not commute".into()));
            }
            if !classify(cx, &p.from_c).is_cofibration {
                return Ok(Some("pushout of a cofibration is not one".into()));
            }
            if classify(cx, &c).is_weak_equivalence
                && !classify(cx, &p.from_c).is_weak_equivalence
            {
                return Ok(Some(
                    "pushout of an acyclic cofibration is not a weak equivalence".into(),
                ));
            }
            Ok(None)
        })();
        runs += 1;
        match instance {
            Ok(None) => {}
            Ok(Some(msg)) => fail(&mut failures, i, msg),
            Err(e) => fail(&mut failures, i, format!("pushout failed: {e}")),
        }
    }
    CheckOutcome {
        name: "pushout-preservation",
        runs,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    #[test]
    fn sphere_suite_passes() {
        let cx = builders::sphere();
        let report = check_waldhausen(&cx, 25, 0);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn sampler_is_deterministic() {
        let cx = builders::interval_line(1, 2).unwrap();
        let a = check_waldhausen(&cx, 10, 7);
        let b = check_waldhausen(&cx, 10, 7);
        assert_eq!(format!("{a}"), format!("{b}"));
    }
}
