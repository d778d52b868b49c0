//! The class group of a complex, presented and reduced exactly.
//!
//! Generators are the non-bottom objects. Relations: `[a] = sum [a_i]` for
//! every pairwise-disjoint covering family of `a`, and `[a] = [b]` for every
//! horizontal morphism between distinct objects. The quotient is computed by
//! integer Smith normal form; classes project to canonical coordinates
//! (free part plus cyclic residues).

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::complex::{validate_functor, ObjectId, PolytopeComplex, PolytopeFunctor};
use crate::snf::{smith_normal_form, IntMatrix};
use crate::twist::TwObject;

#[derive(Debug, Error)]
pub enum K0Error {
    #[error("`{0}` is the bottom object and generates no class")]
    BottomClass(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("functor fails validation: {0}")]
    InvalidFunctor(String),
}

/// Free generators and integer relation rows.
#[derive(Debug, Clone)]
pub struct K0Presentation {
    pub generators: Vec<ObjectId>,
    gen_index: HashMap<ObjectId, usize>,
    pub relations: IntMatrix,
}

impl K0Presentation {
    pub fn generator_index(&self, x: ObjectId) -> Option<usize> {
        self.gen_index.get(&x).copied()
    }

    /// The basis vector of a generator.
    pub fn generator_vector(&self, x: ObjectId) -> Option<Vec<BigInt>> {
        let i = self.generator_index(x)?;
        let mut v = vec![BigInt::zero(); self.generators.len()];
        v[i] = BigInt::one();
        Some(v)
    }
}

/// Relation rows for `cx`: disjoint covering families from the saturated
/// system, plus one row per horizontal morphism between distinct objects.
/// Rows are deduplicated and emitted in lexicographic order.
pub fn build_presentation(cx: &PolytopeComplex) -> K0Presentation {
    let generators: Vec<ObjectId> = cx.polytopes().collect();
    let gen_index: HashMap<ObjectId, usize> = generators
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect();
    let g = generators.len();
    let mut rows: BTreeSet<Vec<i64>> = BTreeSet::new();

    for &a in &generators {
        'family: for family in cx.covers_of(a) {
            for (i, &x) in family.iter().enumerate() {
                for &y in &family[i + 1..] {
                    match cx.meet_opt(x, y) {
                        Some(m) if cx.is_bottom(m) => {}
                        _ => continue 'family,
                    }
                }
            }
            let mut row = vec![0i64; g];
            row[gen_index[&a]] += 1;
            for &x in &family {
                row[gen_index[&x]] -= 1;
            }
            if row.iter().any(|&v| v != 0) {
                rows.insert(row);
            }
        }
    }
    for h in cx.hmor_ids() {
        let (a, b) = (cx.src(h), cx.dst(h));
        if a == b || cx.is_bottom(a) || cx.is_bottom(b) {
            continue;
        }
        let mut row = vec![0i64; g];
        row[gen_index[&a]] += 1;
        row[gen_index[&b]] -= 1;
        if row.iter().any(|&v| v != 0) {
            rows.insert(row);
        }
    }

    let relations = IntMatrix::from_rows(rows.into_iter().collect());
    let relations = if relations.rows == 0 {
        IntMatrix::zero(0, g)
    } else {
        relations
    };
    K0Presentation {
        generators,
        gen_index,
        relations,
    }
}

/// A finitely generated abelian group in canonical form, with the projection
/// from generator vectors.
#[derive(Debug, Clone)]
pub struct AbelianGroup {
    pub rank: usize,
    /// Diagonal entries greater than one, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
    /// Transpose of the SNF column transform; the projection matrix.
    vt: IntMatrix,
    /// All nonzero diagonal entries, ones included.
    diagonal: Vec<BigInt>,
    n_gens: usize,
}

/// Canonical coordinates of a class: free integers, then residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct K0Class {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn zero_class(&self) -> K0Class {
        K0Class {
            free: vec![BigInt::zero(); self.rank],
            torsion: vec![BigInt::zero(); self.invariant_factors.len()],
        }
    }

    /// Projects a generator-coefficient vector to canonical coordinates.
    pub fn project(&self, x: &[BigInt]) -> K0Class {
        assert_eq!(x.len(), self.n_gens);
        let mut y = vec![BigInt::zero(); self.n_gens];
        for (i, yi) in y.iter_mut().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                if !xj.is_zero() {
                    *yi += &self.vt[(i, j)] * xj;
                }
            }
        }
        let r = self.diagonal.len();
        let free = y[r..].to_vec();
        let torsion = (0..r)
            .filter(|&i| !self.diagonal[i].is_one())
            .map(|i| y[i].mod_floor(&self.diagonal[i]))
            .collect();
        K0Class { free, torsion }
    }

    pub fn add(&self, a: &K0Class, b: &K0Class) -> K0Class {
        let free = a
            .free
            .iter()
            .zip(&b.free)
            .map(|(x, y)| x + y)
            .collect();
        let torsion = a
            .torsion
            .iter()
            .zip(&b.torsion)
            .zip(&self.invariant_factors)
            .map(|((x, y), d)| (x + y).mod_floor(d))
            .collect();
        K0Class { free, torsion }
    }

    pub fn scale(&self, k: &BigInt, a: &K0Class) -> K0Class {
        let free = a.free.iter().map(|x| k * x).collect();
        let torsion = a
            .torsion
            .iter()
            .zip(&self.invariant_factors)
            .map(|(x, d)| (k * x).mod_floor(d))
            .collect();
        K0Class { free, torsion }
    }

    pub fn is_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

/// The cokernel of the relation matrix.
pub fn k0_group(pres: &K0Presentation) -> AbelianGroup {
    let g = pres.generators.len();
    let snf = smith_normal_form(&pres.relations);
    let mut vt = IntMatrix::zero(g, g);
    for i in 0..g {
        for j in 0..g {
            vt[(i, j)] = snf.v[(j, i)].clone();
        }
    }
    let diagonal = snf.diagonal.clone();
    AbelianGroup {
        rank: g - diagonal.len(),
        invariant_factors: snf.invariant_factors(),
        vt,
        diagonal,
        n_gens: g,
    }
}

/// Presentation and reduced group, computed together.
#[derive(Debug, Clone)]
pub struct K0 {
    pub presentation: K0Presentation,
    pub group: AbelianGroup,
}

pub fn k0(cx: &PolytopeComplex) -> K0 {
    let presentation = build_presentation(cx);
    let group = k0_group(&presentation);
    K0 {
        presentation,
        group,
    }
}

impl K0 {
    /// Class of a family: the sum of its component generator classes.
    pub fn class_of(&self, a: &TwObject) -> K0Class {
        let mut x = vec![BigInt::zero(); self.presentation.generators.len()];
        for &c in a.components() {
            let i = self
                .presentation
                .generator_index(c)
                .expect("family components are polytopes");
            x[i] += 1;
        }
        self.group.project(&x)
    }

    /// Class of a list of objects; the bottom is rejected.
    pub fn class_of_objects(
        &self,
        cx: &PolytopeComplex,
        objects: &[ObjectId],
    ) -> Result<K0Class, K0Error> {
        let mut x = vec![BigInt::zero(); self.presentation.generators.len()];
        for &c in objects {
            let i = self
                .presentation
                .generator_index(c)
                .ok_or_else(|| K0Error::BottomClass(cx.name(c).to_string()))?;
            x[i] += 1;
        }
        Ok(self.group.project(&x))
    }

    pub fn generator_class(&self, x: ObjectId) -> Option<K0Class> {
        let v = self.presentation.generator_vector(x)?;
        Some(self.group.project(&v))
    }

    pub fn equal_in_k0(&self, a: &TwObject, b: &TwObject) -> bool {
        self.class_of(a) == self.class_of(b)
    }
}

/// The induced map on class groups: one column of target coordinates per
/// source generator.
#[derive(Debug, Clone)]
pub struct InducedK0Map {
    pub source_generators: Vec<ObjectId>,
    pub columns: Vec<K0Class>,
}

impl InducedK0Map {
    /// Applies the map to a source generator-coefficient vector.
    pub fn apply(&self, target: &AbelianGroup, x: &[BigInt]) -> K0Class {
        let mut acc = target.zero_class();
        for (xi, col) in x.iter().zip(&self.columns) {
            if !xi.is_zero() {
                acc = target.add(&acc, &target.scale(xi, col));
            }
        }
        acc
    }
}

pub fn induced_k0_map(
    f: &PolytopeFunctor,
    source_k0: &K0,
    target_k0: &K0,
) -> Result<InducedK0Map, K0Error> {
    let report = validate_functor(f);
    if !report.passed() {
        let axioms: Vec<String> = report
            .failed_axioms()
            .iter()
            .map(|a| a.to_string())
            .collect();
        return Err(K0Error::InvalidFunctor(axioms.join(", ")));
    }
    let columns = source_k0
        .presentation
        .generators
        .iter()
        .map(|&g| {
            target_k0
                .generator_class(f.map_object(g))
                .expect("functor images of polytopes are polytopes")
        })
        .collect();
    Ok(InducedK0Map {
        source_generators: source_k0.presentation.generators.clone(),
        columns,
    })
}

/// Renders the group as `Z^r + Z/d1 + ...`.
pub fn group_display(g: &AbelianGroup) -> String {
    let mut parts = Vec::new();
    match g.rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        r => parts.push(format!("Z^{r}")),
    }
    for d in &g.invariant_factors {
        parts.push(format!("Z/{d}"));
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::RawComplex;

    fn divisors(n_max: usize) -> PolytopeComplex {
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
                let coprime = fam.iter().enumerate().all(|(i, &a)| {
                    fam[i + 1..]
                        .iter()
                        .all(|&b| num_integer::gcd(a, b) == 1)
                });
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

    #[test]
    fn divisor_complex_rank_counts_prime_powers() {
        let cx = divisors(12);
        let k = k0(&cx);
        // Prime powers up to 12: 2,3,4,5,7,8,9,11.
        assert_eq!(k.group.rank, 8);
        assert!(k.group.invariant_factors.is_empty());
    }

    #[test]
    fn composite_class_splits_into_coprime_parts() {
        let cx = divisors(12);
        let k = k0(&cx);
        let ob = |n: usize| cx.object_by_name(&format!("({n})")).unwrap();
        let six = k.generator_class(ob(6)).unwrap();
        let two = k.generator_class(ob(2)).unwrap();
        let three = k.generator_class(ob(3)).unwrap();
        assert_eq!(six, k.group.add(&two, &three));
        let twelve = k.generator_class(ob(12)).unwrap();
        let four = k.generator_class(ob(4)).unwrap();
        assert_eq!(twelve, k.group.add(&four, &three));
        assert_ne!(four, k.group.add(&two, &two));
    }

    #[test]
    fn relations_project_to_zero() {
        let cx = divisors(12);
        let k = k0(&cx);
        let m = &k.presentation.relations;
        for i in 0..m.rows {
            let row: Vec<BigInt> = (0..m.cols).map(|j| m[(i, j)].clone()).collect();
            assert_eq!(k.group.project(&row), k.group.zero_class());
        }
    }
}
