//! Builders for the bundled example complexes.
//!
//! All builders emit assembled, saturated complexes; `validate` passes on
//! every output. Sizes are desk scale by construction: the grid builder is
//! bounded by the saturation cap, and the arithmetic builders by their norm
//! bounds.

use num_integer::Integer;
use thiserror::Error;

use crate::complex::{
    Axiom, ComplexError, Mutation, ObjectId, PolytopeComplex, PolytopeFunctor, RawComplex,
};

#[derive(Debug, Error)]
pub enum BuilderError {
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("{0} must be squarefree and different from 0 and 1")]
    NotSquarefree(i64),
    #[error("grid of {0} cells exceeds the supported size of {max}", max = MAX_CELLS)]
    GridTooLarge(usize),
    #[error("bound must be at least {0}")]
    BoundTooSmall(u64),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Grid cells per complex; the saturation cap binds well before this.
pub const MAX_CELLS: usize = 8;

/// A finite group as a multiplication table.
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub names: Vec<String>,
    /// `mul[i][j]` is the product `i * j`.
    pub mul: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn cyclic(n: usize) -> GroupTable {
        assert!(n >= 1);
        let names = (0..n)
            .map(|i| if i == 0 { "e".to_string() } else { format!("g{i}") })
            .collect();
        let mul = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let inverse = (0..n).map(|i| (n - i) % n).collect();
        GroupTable {
            names,
            mul,
            identity: 0,
            inverse,
        }
    }

    /// The symmetric group on three letters, as an explicit table.
    pub fn symmetric_3() -> GroupTable {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 2, 0],
            [2, 0, 1],
            [0, 2, 1],
            [2, 1, 0],
            [1, 0, 2],
        ];
        let index = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let names = perms
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if i == 0 {
                    "e".to_string()
                } else {
                    format!("s{}{}{}", p[0], p[1], p[2])
                }
            })
            .collect();
        let mul: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index(&[a[b[0]], a[b[1]], a[b[2]]]))
                    .collect()
            })
            .collect();
        let inverse = perms
            .iter()
            .map(|a| {
                let mut inv = [0; 3];
                for (i, &ai) in a.iter().enumerate() {
                    inv[ai] = i;
                }
                index(&inv)
            })
            .collect();
        GroupTable {
            names,
            mul,
            identity: 0,
            inverse,
        }
    }

    pub fn check(&self) -> Result<(), BuilderError> {
        let n = self.order();
        if self.mul.len() != n || self.mul.iter().any(|r| r.len() != n) {
            return Err(BuilderError::InvalidGroup("table is not square".into()));
        }
        if self.identity >= n || self.inverse.len() != n {
            return Err(BuilderError::InvalidGroup("bad identity or inverses".into()));
        }
        for i in 0..n {
            if self.mul[self.identity][i] != i || self.mul[i][self.identity] != i {
                return Err(BuilderError::InvalidGroup(format!(
                    "`{}` is not neutral",
                    self.names[self.identity]
                )));
            }
            if self.mul[i][self.inverse[i]] != self.identity
                || self.mul[self.inverse[i]][i] != self.identity
            {
                return Err(BuilderError::InvalidGroup(format!(
                    "`{}` lacks an inverse",
                    self.names[i]
                )));
            }
            for j in 0..n {
                for k in 0..n {
                    if self.mul[self.mul[i][j]][k] != self.mul[i][self.mul[j][k]] {
                        return Err(BuilderError::InvalidGroup(
                            "multiplication is not associative".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Two objects, one vertical arrow, no extra structure.
pub fn sphere() -> PolytopeComplex {
    RawComplex {
        names: vec!["empty".into(), "pt".into()],
        bottom: Some(0),
        leq: vec![(0, 1)],
        ..Default::default()
    }
    .assemble()
    .expect("sphere assembles")
}

/// Two objects with `G` acting on the point.
pub fn s_g(group: &GroupTable) -> Result<PolytopeComplex, BuilderError> {
    group.check()?;
    let n = group.order();
    let hmors: Vec<(String, usize, usize)> =
        group.names.iter().map(|g| (g.clone(), 1, 1)).collect();
    let mut compose = Vec::new();
    for i in 0..n {
        for j in 0..n {
            compose.push((i, j, group.mul[i][j]));
        }
    }
    let inverse = (0..n).map(|i| (i, group.inverse[i])).collect();
    Ok(RawComplex {
        names: vec!["empty".into(), "pt".into()],
        bottom: Some(0),
        leq: vec![(0, 1)],
        hmors,
        compose,
        inverse,
        ..Default::default()
    }
    .assemble()?)
}

fn gcd_u(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn frac(num: u64, den: u64) -> String {
    let g = gcd_u(num, den).max(1);
    let (n, d) = (num / g, den / g);
    if d == 1 {
        format!("{n}")
    } else {
        format!("{n}/{d}")
    }
}

fn cell_set_name(mask: u32, q: u64) -> String {
    if mask == 0 {
        return "empty".to_string();
    }
    let mut runs = Vec::new();
    let mut i = 0u32;
    while i < 32 {
        if mask & (1 << i) == 0 {
            i += 1;
            continue;
        }
        let start = i;
        while i < 32 && mask & (1 << i) != 0 {
            i += 1;
        }
        runs.push(format!("[{},{}]", frac(start as u64, q), frac(i as u64, q)));
    }
    runs.join("u")
}

fn partitions_of_mask(mask: u32) -> Vec<Vec<u32>> {
    // All set partitions of the bits of `mask` into nonempty parts.
    if mask == 0 {
        return vec![vec![]];
    }
    let low = mask & mask.wrapping_neg();
    let rest = mask ^ low;
    let mut out = Vec::new();
    // Choose the part containing the lowest bit: low | (subset of rest).
    let mut sub = rest;
    loop {
        let part = low | sub;
        for mut tail in partitions_of_mask(mask ^ part) {
            let mut parts = vec![part];
            parts.append(&mut tail);
            out.push(parts);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    out
}

/// One-dimensional grid: objects are unions of the `q*m` cells of width
/// `1/q` inside `[0, m]`, ordered by inclusion, covered by their partitions,
/// and moved by translations in steps of `1/q`.
pub fn interval_line(q: u64, m: u64) -> Result<PolytopeComplex, BuilderError> {
    let cells = (q * m) as usize;
    if cells == 0 || cells > MAX_CELLS {
        return Err(BuilderError::GridTooLarge(cells));
    }
    let size = 1u32 << cells;
    // Object index = mask value (bottom is mask 0).
    let names: Vec<String> = (0..size).map(|mask| cell_set_name(mask, q)).collect();
    let mut leq = Vec::new();
    for a in 0..size {
        for b in 0..size {
            if a & b == a {
                leq.push((a as usize, b as usize));
            }
        }
    }
    // Translations: morphism `t{d}:{name}` moves mask by d cells.
    let mut hmors = Vec::new();
    let mut hmor_of = std::collections::HashMap::new();
    for mask in 1..size {
        for d in -(cells as i64)..=(cells as i64) {
            if d == 0 {
                continue;
            }
            let shifted = shift_mask(mask, d, cells);
            let Some(shifted) = shifted else { continue };
            let name = format!("t{}:{}", d, names[mask as usize]);
            hmor_of.insert((mask, d), hmors.len());
            hmors.push((name, mask as usize, shifted as usize));
        }
    }
    let mut compose = Vec::new();
    let mut inverse = Vec::new();
    let mut restrict = Vec::new();
    for (&(mask, d), &idx) in &hmor_of {
        let shifted = shift_mask(mask, d, cells).unwrap();
        inverse.push((idx, hmor_of[&(shifted, -d)]));
        // Chained translations compose by adding displacements.
        for d2 in -(cells as i64)..=(cells as i64) {
            if d2 == 0 || d + d2 == 0 {
                continue;
            }
            if shift_mask(shifted, d2, cells).is_some() {
                let second = hmor_of[&(shifted, d2)];
                let combined = hmor_of[&(mask, d + d2)];
                compose.push((second, idx, combined));
            }
        }
        // Restrict to sub-unions of the target: translate back.
        let mut sub = shifted;
        loop {
            sub = (sub - 1) & shifted;
            if sub == 0 {
                break;
            }
            let back = shift_mask(sub, -d, cells).unwrap();
            restrict.push((idx, sub as usize, hmor_of[&(back, d)]));
        }
    }
    let mut basis = Vec::new();
    for mask in 1..size {
        for parts in partitions_of_mask(mask) {
            if parts.len() >= 2 {
                basis.push((mask as usize, parts.iter().map(|&p| p as usize).collect()));
            }
        }
    }
    compose.sort_unstable();
    inverse.sort_unstable();
    restrict.sort_unstable();
    Ok(RawComplex {
        names,
        bottom: Some(0),
        leq,
        hmors,
        compose,
        inverse,
        restrict,
        basis,
        ..Default::default()
    }
    .assemble()?)
}

fn shift_mask(mask: u32, d: i64, cells: usize) -> Option<u32> {
    let shifted = if d >= 0 {
        (mask as u64) << d
    } else {
        let down = (-d) as u32;
        if mask.trailing_zeros() < down {
            return None;
        }
        (mask >> down) as u64
    };
    if shifted >= (1u64 << cells) {
        None
    } else {
        Some(shifted as u32)
    }
}

fn coprime_factorizations(divisors: &[u64], target: u64) -> Vec<Vec<u64>> {
    // Families of pairwise-coprime divisors (> 1) whose product the target
    // divides; with coprime divisors the product then equals the target.
    let mut out = Vec::new();
    let n = divisors.len();
    assert!(n < 26);
    'mask: for mask in 1u32..(1 << n) {
        let fam: Vec<u64> = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| divisors[i])
            .collect();
        if fam.len() < 2 {
            continue;
        }
        for (i, &a) in fam.iter().enumerate() {
            for &b in &fam[i + 1..] {
                if gcd_u(a, b) != 1 {
                    continue 'mask;
                }
            }
        }
        let product: u64 = fam.iter().product();
        if product % target == 0 {
            out.push(fam);
        }
    }
    out
}

/// Divisibility complex on the ideals `(1)..(n)`: meets are gcds, covers are
/// coprime factorizations, and there are no nontrivial motions.
pub fn rationals(n: u64) -> Result<PolytopeComplex, BuilderError> {
    if n < 2 {
        return Err(BuilderError::BoundTooSmall(2));
    }
    let names: Vec<String> = (1..=n).map(|k| format!("({k})")).collect();
    let mut leq = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            if b % a == 0 {
                leq.push((a as usize - 1, b as usize - 1));
            }
        }
    }
    let mut basis = Vec::new();
    for k in 2..=n {
        let divisors: Vec<u64> = (2..=k).filter(|d| k % d == 0).collect();
        for fam in coprime_factorizations(&divisors, k) {
            basis.push((
                k as usize - 1,
                fam.iter().map(|&d| d as usize - 1).collect(),
            ));
        }
    }
    Ok(RawComplex {
        names,
        bottom: Some(0),
        leq,
        basis,
        ..Default::default()
    }
    .assemble()?)
}

/// Splitting behaviour of a rational prime in the quadratic field of
/// discriminant `d` (squarefree).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// Classifies `p` by the quadratic character of `d`, with the usual rules
/// at 2.
pub fn splitting_of_prime(d: i64, p: u64) -> Splitting {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        };
    }
    let dp = d.rem_euclid(p as i64) as u64;
    if dp == 0 {
        return Splitting::Ramified;
    }
    match legendre(dp, p) {
        1 => Splitting::Split,
        _ => Splitting::Inert,
    }
}

fn legendre(a: u64, p: u64) -> i64 {
    // a^((p-1)/2) mod p by fast exponentiation.
    let mut base = a % p;
    let mut exp = (p - 1) / 2;
    let mut acc: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    if acc == 1 {
        1
    } else if acc == p - 1 {
        -1
    } else {
        0
    }
}

/// Brute-force splitting oracle: an odd prime not dividing `d` splits iff
/// `x^2 = d` is solvable mod p.
pub fn splitting_oracle(d: i64, p: u64) -> Splitting {
    if p == 2 {
        return splitting_of_prime(d, 2);
    }
    if d.rem_euclid(p as i64) == 0 {
        return Splitting::Ramified;
    }
    let dp = d.rem_euclid(p as i64) as u64;
    for x in 0..p {
        if x * x % p == dp {
            return Splitting::Split;
        }
    }
    Splitting::Inert
}

fn is_squarefree(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let mut n = d.unsigned_abs();
    let mut f = 2u64;
    while f * f <= n {
        if n % (f * f) == 0 {
            return false;
        }
        while n % f == 0 {
            n /= f;
        }
        f += 1;
    }
    true
}

/// One prime-ideal symbol of the quadratic field.
#[derive(Debug, Clone)]
pub struct PrimeSymbol {
    pub name: String,
    pub rational_prime: u64,
    pub norm: u64,
    /// Index of the conjugate symbol (itself unless split).
    pub conjugate: usize,
    pub splitting: Splitting,
}

/// The quadratic complex together with its symbol table.
#[derive(Debug, Clone)]
pub struct QuadraticComplex {
    pub complex: PolytopeComplex,
    pub symbols: Vec<PrimeSymbol>,
    /// Exponent vector per object, indexed like the complex's objects.
    pub exponents: Vec<Vec<u32>>,
}

impl QuadraticComplex {
    pub fn object_of_exponents(&self, exps: &[u32]) -> Option<ObjectId> {
        self.exponents
            .iter()
            .position(|e| e == exps)
            .map(|i| ObjectId(i as u32))
    }

    pub fn conjugate_exponents(&self, exps: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; exps.len()];
        for (i, &e) in exps.iter().enumerate() {
            out[self.symbols[i].conjugate] = e;
        }
        out
    }
}

fn symbol_table(d: i64, n: u64) -> Vec<PrimeSymbol> {
    let mut symbols = Vec::new();
    let mut p = 2u64;
    while p <= n {
        if (2..p).all(|f| p % f != 0) {
            match splitting_of_prime(d, p) {
                Splitting::Split => {
                    let i = symbols.len();
                    symbols.push(PrimeSymbol {
                        name: format!("p{p}"),
                        rational_prime: p,
                        norm: p,
                        conjugate: i + 1,
                        splitting: Splitting::Split,
                    });
                    symbols.push(PrimeSymbol {
                        name: format!("p{p}'"),
                        rational_prime: p,
                        norm: p,
                        conjugate: i,
                        splitting: Splitting::Split,
                    });
                }
                Splitting::Inert => {
                    if p * p <= n {
                        let i = symbols.len();
                        symbols.push(PrimeSymbol {
                            name: format!("p{p}"),
                            rational_prime: p,
                            norm: p * p,
                            conjugate: i,
                            splitting: Splitting::Inert,
                        });
                    }
                }
                Splitting::Ramified => {
                    let i = symbols.len();
                    symbols.push(PrimeSymbol {
                        name: format!("p{p}"),
                        rational_prime: p,
                        norm: p,
                        conjugate: i,
                        splitting: Splitting::Ramified,
                    });
                }
            }
        }
        p += 1;
    }
    symbols
}

fn ideal_name(symbols: &[PrimeSymbol], exps: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        if e == 1 {
            parts.push(symbols[i].name.clone());
        } else if e > 1 {
            parts.push(format!("{}^{}", symbols[i].name, e));
        }
    }
    if parts.is_empty() {
        "(1)".to_string()
    } else {
        parts.join("*")
    }
}

/// Ideals of the quadratic field of `d` with norm at most `n`, ordered by
/// divisibility, covered by coprime factorizations, with the conjugation
/// action as the only nontrivial motion.
pub fn quadratic(d: i64, n: u64) -> Result<QuadraticComplex, BuilderError> {
    if !is_squarefree(d) {
        return Err(BuilderError::NotSquarefree(d));
    }
    if n < 2 {
        return Err(BuilderError::BoundTooSmall(2));
    }
    let symbols = symbol_table(d, n);
    // Enumerate exponent vectors of norm <= n, depth first.
    let mut exponents: Vec<Vec<u32>> = Vec::new();
    let mut current = vec![0u32; symbols.len()];
    fn walk(
        symbols: &[PrimeSymbol],
        i: usize,
        norm: u64,
        bound: u64,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if i == symbols.len() {
            out.push(current.clone());
            return;
        }
        let mut norm = norm;
        let mut e = 0u32;
        loop {
            current[i] = e;
            walk(symbols, i + 1, norm, bound, current, out);
            match norm.checked_mul(symbols[i].norm) {
                Some(next) if next <= bound => {
                    norm = next;
                    e += 1;
                }
                _ => break,
            }
        }
        current[i] = 0;
    }
    walk(&symbols, 0, 1, n, &mut current, &mut exponents);
    exponents.sort_unstable();
    // The zero vector sorts first and is the bottom.
    let names: Vec<String> = exponents
        .iter()
        .map(|e| ideal_name(&symbols, e))
        .collect();
    let index_of = |e: &[u32]| exponents.binary_search_by(|x| x.as_slice().cmp(e)).ok();

    let mut leq = Vec::new();
    for (a, ea) in exponents.iter().enumerate() {
        for (b, eb) in exponents.iter().enumerate() {
            if ea.iter().zip(eb).all(|(x, y)| x <= y) {
                leq.push((a, b));
            }
        }
    }

    let conj = |e: &[u32]| -> Vec<u32> {
        let mut out = vec![0u32; e.len()];
        for (i, &x) in e.iter().enumerate() {
            out[symbols[i].conjugate] = x;
        }
        out
    };
    let mut hmors = Vec::new();
    let mut conj_idx = std::collections::HashMap::new();
    for (a, ea) in exponents.iter().enumerate() {
        if ea.iter().all(|&x| x == 0) {
            continue;
        }
        let target = index_of(&conj(ea)).expect("conjugate norm is equal");
        conj_idx.insert(a, hmors.len());
        hmors.push((format!("c:{}", names[a]), a, target));
    }
    let mut inverse = Vec::new();
    let mut restrict = Vec::new();
    for (&_a, &idx) in &conj_idx {
        let target = hmors[idx].2;
        inverse.push((idx, conj_idx[&target]));
        for (b, eb) in exponents.iter().enumerate() {
            if b == target || eb.iter().all(|&x| x == 0) {
                continue;
            }
            if exponents[b]
                .iter()
                .zip(&exponents[target])
                .all(|(x, y)| x <= y)
            {
                let back = index_of(&conj(eb)).unwrap();
                restrict.push((idx, b, conj_idx[&back]));
            }
        }
    }
    inverse.sort_unstable();
    restrict.sort_unstable();

    let mut basis = Vec::new();
    for (a, ea) in exponents.iter().enumerate() {
        if ea.iter().filter(|&&x| x > 0).count() == 0 {
            continue;
        }
        // Coprime factorizations: set partitions of the support, each part
        // taking the full exponents of its symbols.
        let support: Vec<usize> = (0..symbols.len()).filter(|&i| ea[i] > 0).collect();
        if support.len() < 2 {
            continue;
        }
        let mask_all = (1u32 << support.len()) - 1;
        for parts in partitions_of_mask(mask_all) {
            if parts.len() < 2 {
                continue;
            }
            let mut family = Vec::new();
            for part in parts {
                let mut e = vec![0u32; symbols.len()];
                for (bit, &sym) in support.iter().enumerate() {
                    if part & (1 << bit) != 0 {
                        e[sym] = ea[sym];
                    }
                }
                family.push(index_of(&e).expect("divisor norms are smaller"));
            }
            basis.push((a, family));
        }
    }

    let complex = RawComplex {
        names,
        bottom: Some(0),
        leq,
        hmors,
        inverse,
        restrict,
        basis,
        ..Default::default()
    }
    .assemble()?;
    Ok(QuadraticComplex {
        complex,
        symbols,
        exponents,
    })
}

fn factorize(mut k: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= k {
        if k % p == 0 {
            let mut e = 0;
            while k % p == 0 {
                k /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if k > 1 {
        out.push((k, 1));
    }
    out
}

/// The inclusion functor from the divisibility complex into the quadratic
/// one; the source bound is the integer square root of `n`, so every image
/// ideal has norm within bounds.
pub fn inclusion_functor(d: i64, n: u64) -> Result<PolytopeFunctor, BuilderError> {
    let target = quadratic(d, n)?;
    let src_bound = n.isqrt();
    if src_bound < 2 {
        return Err(BuilderError::BoundTooSmall(4));
    }
    let source = rationals(src_bound)?;
    let mut object_map = Vec::new();
    for k in 1..=src_bound {
        let mut exps = vec![0u32; target.symbols.len()];
        for (p, e) in factorize(k) {
            for (i, sym) in target.symbols.iter().enumerate() {
                if sym.rational_prime != p {
                    continue;
                }
                exps[i] = match sym.splitting {
                    Splitting::Split => e,
                    Splitting::Inert => e,
                    Splitting::Ramified => 2 * e,
                };
            }
        }
        object_map.push(
            target
                .complex
                .object_by_name(&ideal_name(&target.symbols, &exps))
                .expect("extension ideals stay within the norm bound"),
        );
    }
    let hmor_map = source
        .hmor_ids()
        .map(|h| {
            // Only identities exist in the source.
            target
                .complex
                .identity_h(object_map[source.src(h).index()])
        })
        .collect();
    Ok(PolytopeFunctor::new(
        source,
        target.complex,
        object_map,
        hmor_map,
    ))
}

/// Shared-bottom sum: objects and structure of the summands, disjointly,
/// over a single bottom.
pub fn wedge(summands: &[PolytopeComplex]) -> Result<PolytopeComplex, BuilderError> {
    let mut names = vec!["empty".to_string()];
    let mut leq = Vec::new();
    let mut hmors = Vec::new();
    let mut compose = Vec::new();
    let mut inverse = Vec::new();
    let mut restrict = Vec::new();
    let mut basis = Vec::new();
    let mut cap = crate::complex::DEFAULT_CAP;
    for (w, cx) in summands.iter().enumerate() {
        cap = cap.max(cx.cap());
        let mut obj_new = vec![0usize; cx.object_count()];
        for x in cx.objects() {
            if cx.is_bottom(x) {
                obj_new[x.index()] = 0;
            } else {
                obj_new[x.index()] = names.len();
                names.push(format!("{w}:{}", cx.name(x)));
            }
        }
        for a in cx.objects() {
            for b in cx.objects() {
                if cx.leq(a, b) && !cx.is_bottom(a) {
                    leq.push((obj_new[a.index()], obj_new[b.index()]));
                }
            }
        }
        let mut hmor_new = std::collections::HashMap::new();
        for h in cx.hmor_ids() {
            if cx.is_identity_h(h) {
                continue;
            }
            hmor_new.insert(h, hmors.len());
            hmors.push((
                format!("{w}:{}", cx.hmor_name(h)),
                obj_new[cx.src(h).index()],
                obj_new[cx.dst(h).index()],
            ));
        }
        for g in cx.hmor_ids() {
            if cx.is_identity_h(g) {
                continue;
            }
            for h in cx.hmor_ids() {
                if cx.is_identity_h(h) || cx.dst(h) != cx.src(g) {
                    continue;
                }
                if let Some(k) = cx.compose_h(g, h) {
                    if !cx.is_identity_h(k) {
                        compose.push((hmor_new[&g], hmor_new[&h], hmor_new[&k]));
                    }
                }
            }
            let gi = cx.inverse_h(g);
            if g <= gi {
                inverse.push((hmor_new[&g], hmor_new[&gi]));
            }
            for &b in cx.downset(cx.dst(g)) {
                if b == cx.dst(g) || cx.is_bottom(b) {
                    continue;
                }
                if let Some((_, lift)) = cx.restrict_opt(g, b) {
                    if !cx.is_identity_h(lift) {
                        restrict.push((hmor_new[&g], obj_new[b.index()], hmor_new[&lift]));
                    }
                }
            }
        }
        for (target, family) in cx.cover_basis() {
            basis.push((
                obj_new[target.index()],
                family.iter().map(|m| obj_new[m.index()]).collect(),
            ));
        }
    }
    Ok(RawComplex {
        names,
        bottom: Some(0),
        leq,
        hmors,
        compose,
        inverse,
        restrict,
        basis,
        cap: Some(cap),
    }
    .assemble()?)
}

/// One catalogued corruption per axiom, each tripping exactly that axiom.
pub struct CatalogueEntry {
    pub label: &'static str,
    pub complex: PolytopeComplex,
    pub mutation: Mutation,
    pub axiom: Axiom,
}

pub fn mutation_catalogue() -> Vec<CatalogueEntry> {
    let mut out = Vec::new();

    let s = sphere();
    let pt = s.object_by_name("pt").unwrap();
    let bot = s.bottom();
    out.push(CatalogueEntry {
        label: "backwards order edge on the sphere",
        complex: s.clone(),
        mutation: Mutation::AddOrderEdge(pt, bot),
        axiom: Axiom::V,
    });

    let sg = s_g(&GroupTable::cyclic(2)).expect("cyclic group builds");
    let g1 = sg.hmor_by_name("g1").unwrap();
    let idp = sg.identity_h(sg.object_by_name("pt").unwrap());
    out.push(CatalogueEntry {
        label: "inverse of the involution points at the identity",
        complex: sg,
        mutation: Mutation::CorruptInverse(g1, idp),
        axiom: Axiom::H,
    });

    let s = sphere();
    let pt = s.object_by_name("pt").unwrap();
    let idp = s.identity_h(pt);
    out.push(CatalogueEntry {
        label: "restriction entry of id at pt deleted",
        complex: s,
        mutation: Mutation::DropRestriction(idp, pt),
        axiom: Axiom::P,
    });

    let two_sided = c_mutation_complex();
    let y_cover = vec![
        two_sided.object_by_name("u'").unwrap(),
        two_sided.object_by_name("v'").unwrap(),
    ];
    let y = two_sided.object_by_name("y").unwrap();
    out.push(CatalogueEntry {
        label: "transported cover removed",
        complex: two_sided,
        mutation: Mutation::DropCoverFamily(y, y_cover),
        axiom: Axiom::C,
    });

    let grid = interval_line(1, 2).expect("two-cell grid builds");
    let x = grid.object_by_name("[0,2]").unwrap();
    let fam = vec![grid.object_by_name("[0,1]").unwrap(), x];
    out.push(CatalogueEntry {
        label: "refinable family removed from the grid",
        complex: grid,
        mutation: Mutation::DropCoverFamily(x, fam),
        axiom: Axiom::B,
    });

    out
}

/// Two fibers over two bases joined by a motion; used to isolate cover
/// transport in the catalogue.
fn c_mutation_complex() -> PolytopeComplex {
    let names = vec!["bot", "u", "v", "x", "u'", "v'", "y"];
    RawComplex {
        names: names.into_iter().map(String::from).collect(),
        bottom: Some(0),
        leq: vec![(1, 3), (2, 3), (4, 6), (5, 6)],
        hmors: vec![
            ("h".into(), 6, 3),
            ("hi".into(), 3, 6),
            ("hu".into(), 4, 1),
            ("hui".into(), 1, 4),
            ("hv".into(), 5, 2),
            ("hvi".into(), 2, 5),
        ],
        inverse: vec![(0, 1), (2, 3), (4, 5)],
        restrict: vec![
            (0, 1, 2), // h at u lifts through hu
            (0, 2, 4), // h at v lifts through hv
            (1, 4, 3), // hi at u' lifts through hui
            (1, 5, 5), // hi at v' lifts through hvi
        ],
        basis: vec![(3, vec![1, 2])],
        ..Default::default()
    }
    .assemble()
    .expect("catalogue complex assembles")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate;

    #[test]
    fn sphere_validates() {
        let cx = sphere();
        assert_eq!(cx.object_count(), 2);
        assert!(validate(&cx).passed());
    }

    #[test]
    fn s_c2_has_two_automorphisms() {
        let cx = s_g(&GroupTable::cyclic(2)).unwrap();
        let pt = cx.object_by_name("pt").unwrap();
        assert_eq!(cx.hmors_between(pt, pt).len(), 2);
        assert!(validate(&cx).passed());
    }

    #[test]
    fn s_c1_reduces_to_sphere() {
        let cx = s_g(&GroupTable::cyclic(1)).unwrap();
        assert_eq!(cx.object_count(), 2);
        assert_eq!(cx.hmor_count(), sphere().hmor_count());
    }

    #[test]
    fn interval_1_2_objects() {
        let cx = interval_line(1, 2).unwrap();
        assert_eq!(cx.object_count(), 4);
        let whole = cx.object_by_name("[0,2]").unwrap();
        let a = cx.object_by_name("[0,1]").unwrap();
        let b = cx.object_by_name("[1,2]").unwrap();
        assert!(cx.is_cover(whole, &[a, b]).unwrap());
        assert_eq!(cx.meet(a, b).unwrap(), cx.bottom());
        assert!(validate(&cx).passed());
    }

    #[test]
    fn interval_translation_restricts() {
        let cx = interval_line(1, 3).unwrap();
        // t1 on [0,2] runs [0,2] -> [1,3]; restricting at [1,2] gives [0,1].
        let h = cx.hmor_by_name("t1:[0,2]").unwrap();
        let sub = cx.object_by_name("[1,2]").unwrap();
        let (a, lift) = cx.restrict_h(h, sub).unwrap();
        assert_eq!(cx.name(a), "[0,1]");
        assert_eq!(cx.hmor_name(lift), "t1:[0,1]");
    }

    #[test]
    fn rationals_12_validates() {
        let cx = rationals(12).unwrap();
        assert_eq!(cx.object_count(), 12);
        let six = cx.object_by_name("(6)").unwrap();
        let two = cx.object_by_name("(2)").unwrap();
        let three = cx.object_by_name("(3)").unwrap();
        assert!(cx.is_cover(six, &[two, three]).unwrap());
        let four = cx.object_by_name("(4)").unwrap();
        assert!(!cx.is_cover(four, &[two]).unwrap());
        assert!(validate(&cx).passed());
    }

    #[test]
    fn gaussian_splitting() {
        assert_eq!(splitting_of_prime(-1, 2), Splitting::Ramified);
        assert_eq!(splitting_of_prime(-1, 3), Splitting::Inert);
        assert_eq!(splitting_of_prime(-1, 5), Splitting::Split);
        for p in [2u64, 3, 5, 7, 11, 13] {
            assert_eq!(splitting_of_prime(-1, p), splitting_oracle(-1, p));
            assert_eq!(splitting_of_prime(-5, p), splitting_oracle(-5, p));
            assert_eq!(splitting_of_prime(5, p), splitting_oracle(5, p));
        }
    }

    #[test]
    fn gaussian_conjugation_swaps_split_primes() {
        let q = quadratic(-1, 25).unwrap();
        let cx = &q.complex;
        assert!(validate(cx).passed());
        let p5 = cx.object_by_name("p5").unwrap();
        let p5c = cx.object_by_name("p5'").unwrap();
        let five = cx.object_by_name("p5*p5'").unwrap();
        let conj = cx.hmor_by_name("c:p5*p5'").unwrap();
        assert_eq!(cx.src(conj), five);
        assert_eq!(cx.dst(conj), five);
        let (a, lift) = cx.restrict_h(conj, p5).unwrap();
        assert_eq!(a, p5c);
        assert_eq!(cx.hmor_name(lift), "c:p5'");
        assert!(cx.is_cover(five, &[p5, p5c]).unwrap());
    }

    #[test]
    fn wedge_of_spheres() {
        let w = wedge(&[sphere(), sphere()]).unwrap();
        assert_eq!(w.object_count(), 3);
        assert!(validate(&w).passed());
    }

    #[test]
    fn non_squarefree_rejected() {
        assert!(matches!(
            quadratic(12, 10),
            Err(BuilderError::NotSquarefree(12))
        ));
    }
}
