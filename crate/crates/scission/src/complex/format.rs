//! The on-disk complex and functor documents.
//!
//! A complex file is a UTF-8 JSON object. Object names index the tables;
//! the reflexive/transitive closure of `leq` is applied at load, identities
//! and the forced restriction lifts are synthesized, and omitted composites
//! are resolved by groupoid-law completion. The cover list is a basis; the
//! saturated system is rebuilt on load.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::functor::PolytopeFunctor;
use super::{ComplexError, ObjectId, PolytopeComplex, RawComplex};

#[derive(Debug, Serialize, Deserialize)]
struct ComplexDoc {
    objects: Vec<String>,
    bottom: String,
    #[serde(default)]
    leq: Vec<(String, String)>,
    #[serde(default)]
    hmors: Vec<HMorDoc>,
    #[serde(default)]
    compose: Vec<(String, String, String)>,
    #[serde(default)]
    inverse: Vec<(String, String)>,
    #[serde(default)]
    restrict: Vec<(String, String, String)>,
    #[serde(default)]
    covers: Vec<CoverDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cap: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct HMorDoc {
    id: String,
    src: String,
    dst: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoverDoc {
    target: String,
    family: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FunctorDoc {
    source: String,
    target: String,
    #[serde(default)]
    objects: HashMap<String, String>,
    #[serde(default)]
    hmors: HashMap<String, String>,
}

pub fn load_complex(path: impl AsRef<Path>) -> Result<PolytopeComplex, ComplexError> {
    let text = std::fs::read_to_string(path)?;
    load_complex_str(&text)
}

pub fn load_complex_str(text: &str) -> Result<PolytopeComplex, ComplexError> {
    load_complex_str_with_cap(text, None)
}

/// Loads with an explicit saturation-cap override.
pub fn load_complex_with_cap(
    path: impl AsRef<Path>,
    cap: Option<usize>,
) -> Result<PolytopeComplex, ComplexError> {
    let text = std::fs::read_to_string(path)?;
    load_complex_str_with_cap(&text, cap)
}

pub fn load_complex_str_with_cap(
    text: &str,
    cap_override: Option<usize>,
) -> Result<PolytopeComplex, ComplexError> {
    let mut doc: ComplexDoc =
        serde_json::from_str(text).map_err(|e| ComplexError::Parse(e.to_string()))?;
    if cap_override.is_some() {
        doc.cap = cap_override;
    }
    if doc.objects.is_empty() {
        return Err(ComplexError::NoBottom);
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, name) in doc.objects.iter().enumerate() {
        if index.insert(name, i).is_some() {
            return Err(ComplexError::DuplicateObject(name.clone()));
        }
    }
    let obj = |name: &str| -> Result<usize, ComplexError> {
        index
            .get(name)
            .copied()
            .ok_or_else(|| ComplexError::UnknownObject(name.to_string()))
    };
    let bottom = obj(&doc.bottom)?;
    let mut leq = Vec::new();
    for (a, b) in &doc.leq {
        leq.push((obj(a)?, obj(b)?));
    }
    let mut hmor_pos: HashMap<&str, usize> = HashMap::new();
    let mut hmors = Vec::new();
    for (i, m) in doc.hmors.iter().enumerate() {
        if hmor_pos.insert(&m.id, i).is_some() {
            return Err(ComplexError::DuplicateHMor(m.id.clone()));
        }
        hmors.push((m.id.clone(), obj(&m.src)?, obj(&m.dst)?));
    }
    let hm = |name: &str| -> Result<usize, ComplexError> {
        hmor_pos
            .get(name)
            .copied()
            .ok_or_else(|| ComplexError::UnknownHMor(name.to_string()))
    };
    let mut compose = Vec::new();
    for (g, h, gh) in &doc.compose {
        compose.push((hm(g)?, hm(h)?, hm(gh)?));
    }
    let mut inverse = Vec::new();
    for (h, hi) in &doc.inverse {
        inverse.push((hm(h)?, hm(hi)?));
    }
    let mut restrict = Vec::new();
    for (h, b, hp) in &doc.restrict {
        restrict.push((hm(h)?, obj(b)?, hm(hp)?));
    }
    let mut basis = Vec::new();
    for cover in &doc.covers {
        let target = index.get(cover.target.as_str()).copied().ok_or_else(|| {
            ComplexError::Parse(format!(
                "cover of `{}`: unknown target object",
                cover.target
            ))
        })?;
        let mut family = Vec::new();
        for m in &cover.family {
            let m = index.get(m.as_str()).copied().ok_or_else(|| {
                ComplexError::Parse(format!(
                    "cover of `{}`: unknown member object `{m}`",
                    cover.target
                ))
            })?;
            family.push(m);
        }
        basis.push((target, family));
    }
    RawComplex {
        names: doc.objects,
        bottom: Some(bottom),
        leq,
        hmors,
        compose,
        inverse,
        restrict,
        basis,
        cap: doc.cap,
    }
    .assemble()
}

/// Serializes a complex. The order is reduced to its covering pairs, the
/// composition and restriction tables drop entries the loader re-synthesizes,
/// and the cover list is the generating basis.
pub fn save_complex(cx: &PolytopeComplex) -> String {
    let name = |x: ObjectId| cx.name(x).to_string();
    let mut leq = Vec::new();
    for a in cx.objects() {
        if cx.is_bottom(a) {
            continue;
        }
        for b in cx.objects() {
            if a == b || !cx.leq(a, b) {
                continue;
            }
            // Keep only the covering relation: nothing strictly between.
            let direct = cx
                .objects()
                .all(|c| c == a || c == b || !(cx.leq(a, c) && cx.leq(c, b)));
            if direct {
                leq.push((name(a), name(b)));
            }
        }
    }
    let hmors: Vec<HMorDoc> = cx
        .hmor_ids()
        .filter(|&h| !cx.is_identity_h(h))
        .map(|h| HMorDoc {
            id: cx.hmor_name(h).to_string(),
            src: name(cx.src(h)),
            dst: name(cx.dst(h)),
        })
        .collect();
    let mut compose = Vec::new();
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
                    compose.push((
                        cx.hmor_name(g).to_string(),
                        cx.hmor_name(h).to_string(),
                        cx.hmor_name(k).to_string(),
                    ));
                }
            }
        }
    }
    let mut inverse = Vec::new();
    for h in cx.hmor_ids() {
        let hi = cx.inverse_h(h);
        if !cx.is_identity_h(h) && h <= hi {
            inverse.push((cx.hmor_name(h).to_string(), cx.hmor_name(hi).to_string()));
        }
    }
    let mut restrict = Vec::new();
    for h in cx.hmor_ids() {
        if cx.is_identity_h(h) {
            continue;
        }
        for &b in cx.downset(cx.dst(h)) {
            if b == cx.dst(h) || cx.is_bottom(b) {
                continue;
            }
            if let Some((_, lift)) = cx.restrict_opt(h, b) {
                restrict.push((
                    cx.hmor_name(h).to_string(),
                    name(b),
                    cx.hmor_name(lift).to_string(),
                ));
            }
        }
    }
    let covers = cx
        .cover_basis()
        .iter()
        .map(|(t, fam)| CoverDoc {
            target: name(*t),
            family: fam.iter().map(|&m| name(m)).collect(),
        })
        .collect();
    let doc = ComplexDoc {
        objects: cx.objects().map(name).collect(),
        bottom: name(cx.bottom()),
        leq,
        hmors,
        compose,
        inverse,
        restrict,
        covers,
        cap: Some(cx.cap()),
    };
    serde_json::to_string_pretty(&doc).expect("complex documents serialize")
}

/// Serializes a functor document referring to the given relative paths.
/// Identity images are omitted; the loader synthesizes them.
pub fn save_functor(f: &PolytopeFunctor, source: &str, target: &str) -> String {
    let objects: HashMap<String, String> = f
        .source()
        .objects()
        .map(|x| {
            (
                f.source().name(x).to_string(),
                f.target().name(f.map_object(x)).to_string(),
            )
        })
        .collect();
    let hmors: HashMap<String, String> = f
        .source()
        .hmor_ids()
        .filter(|&h| !f.source().is_identity_h(h))
        .map(|h| {
            (
                f.source().hmor_name(h).to_string(),
                f.target().hmor_name(f.map_hmor(h)).to_string(),
            )
        })
        .collect();
    let doc = FunctorDoc {
        source: source.to_string(),
        target: target.to_string(),
        objects,
        hmors,
    };
    serde_json::to_string_pretty(&doc).expect("functor documents serialize")
}

/// Loads a functor document; `source` and `target` paths are resolved
/// relative to the document's directory.
pub fn load_functor(path: impl AsRef<Path>) -> Result<PolytopeFunctor, ComplexError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let doc: FunctorDoc =
        serde_json::from_str(&text).map_err(|e| ComplexError::Parse(e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let source = load_complex(base.join(&doc.source))?;
    let target = load_complex(base.join(&doc.target))?;
    let mut object_map = Vec::with_capacity(source.object_count());
    for x in source.objects() {
        let to = doc.objects.get(source.name(x)).ok_or_else(|| {
            ComplexError::Parse(format!("functor does not map object `{}`", source.name(x)))
        })?;
        object_map.push(
            target
                .object_by_name(to)
                .ok_or_else(|| ComplexError::UnknownObject(to.clone()))?,
        );
    }
    let mut hmor_map = Vec::with_capacity(source.hmor_count());
    for h in source.hmor_ids() {
        let mapped = match doc.hmors.get(source.hmor_name(h)) {
            Some(to) => target
                .hmor_by_name(to)
                .ok_or_else(|| ComplexError::UnknownHMor(to.clone()))?,
            None if source.is_identity_h(h) => {
                target.identity_h(object_map[source.src(h).index()])
            }
            None => {
                return Err(ComplexError::Parse(format!(
                    "functor does not map horizontal morphism `{}`",
                    source.hmor_name(h)
                )))
            }
        };
        hmor_map.push(mapped);
    }
    Ok(PolytopeFunctor::new(source, target, object_map, hmor_map))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE_DOC: &str = r#"{
        "objects": ["empty", "pt"],
        "bottom": "empty",
        "leq": [["empty", "pt"]]
    }"#;

    #[test]
    fn sphere_document_loads() {
        let cx = load_complex_str(SPHERE_DOC).unwrap();
        assert_eq!(cx.object_count(), 2);
        assert_eq!(cx.hmor_count(), 2); // two synthesized identities
    }

    #[test]
    fn empty_object_list_is_an_error() {
        let err = load_complex_str(r#"{"objects": [], "bottom": "x"}"#).unwrap_err();
        assert!(matches!(err, ComplexError::NoBottom));
    }

    #[test]
    fn dangling_cover_reference_names_the_cover() {
        let doc = r#"{
            "objects": ["empty", "pt"],
            "bottom": "empty",
            "covers": [{"target": "pt", "family": ["ghost"]}]
        }"#;
        let err = load_complex_str(doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("pt") && msg.contains("ghost"), "{msg}");
    }

    #[test]
    fn round_trip_preserves_structure() {
        let cx = load_complex_str(SPHERE_DOC).unwrap();
        let text = save_complex(&cx);
        let back = load_complex_str(&text).unwrap();
        assert_eq!(back.object_count(), cx.object_count());
        assert_eq!(back.hmor_count(), cx.hmor_count());
        assert_eq!(save_complex(&back), text);
    }
}
