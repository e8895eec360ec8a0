//! JSON forms of presentations, morphisms and pregroupoids.
//!
//! `serde_json::Map` keeps keys sorted, so output is canonical.

use std::collections::BTreeMap;
use std::sync::Arc;

use frobperf_core::corering::{Poly, PrimeField};
use frobperf_core::fpalg::{Base, Morphism, Presentation, PresentationOptions};
use frobperf_core::groupoid::{Groupoid, GroupoidMap, Pregroupoid};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::Error;

pub fn poly(f: &Poly) -> Value {
    Value::String(f.to_text())
}

pub fn polys(fs: &[Poly]) -> Value {
    Value::Array(fs.iter().map(poly).collect())
}

fn field_label(p: PrimeField) -> String {
    format!("GF({})", p.characteristic())
}

/// `{"base": ..., "vars": [...], "relations": [...]}`; a base over 𝔽_p is
/// written `"GF(p)"`, a presented base as a nested object.
pub fn presentation(a: &Presentation) -> Value {
    let base = match a.base() {
        Base::Field(p) => Value::String(field_label(*p)),
        Base::Algebra(r) => presentation(r),
    };
    json!({
        "base": base,
        "vars": a.gens(),
        "relations": polys(a.relations()),
    })
}

/// Inverse of [`presentation`].
pub fn presentation_from(v: &Value, opts: &PresentationOptions) -> Result<Presentation, Error> {
    let bad = |what: &str| Error::Json(format!("presentation: {what}"));
    let base = match v.get("base") {
        Some(Value::String(s)) => {
            let p = s
                .strip_prefix("GF(")
                .and_then(|s| s.strip_suffix(')'))
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(|| bad("base must be GF(p) or an object"))?;
            Base::Field(PrimeField::new(p)?)
        }
        Some(obj @ Value::Object(_)) => Base::Algebra(Arc::new(presentation_from(obj, opts)?)),
        _ => return Err(bad("missing base")),
    };
    let strings = |key: &str| -> Result<Vec<String>, Error> {
        v.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| bad(&format!("missing {key}")))?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad(&format!("{key} must be strings"))))
            .collect()
    };
    let vars = strings("vars")?;
    let rels = strings("relations")?;
    let gens: Vec<&str> = vars.iter().map(String::as_str).collect();
    let rels: Vec<&str> = rels.iter().map(String::as_str).collect();
    Ok(Presentation::from_text(base, &gens, &rels, &PresentationOptions { allow_zero: true, ..*opts })?)
}

pub fn morphism(f: &Morphism) -> Value {
    let images: serde_json::Map<String, Value> =
        f.source().gens().iter().cloned().zip(f.images().iter().map(poly)).collect();
    json!({
        "source": presentation(f.source()),
        "target": presentation(f.target()),
        "images": images,
    })
}

/// File form of a pregroupoid: ids for the four sets and every structure
/// map as an id → id table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PregroupoidFile {
    pub objects: Vec<String>,
    pub arrows: Vec<String>,
    #[serde(default)]
    pub pairs: Vec<String>,
    #[serde(default)]
    pub triples: Vec<String>,
    pub maps: BTreeMap<String, BTreeMap<String, String>>,
}

const MAPS: [(&str, Set, Set); 11] = [
    ("e", Set::U, Set::R),
    ("s", Set::R, Set::U),
    ("i_R", Set::R, Set::R),
    ("p1", Set::D, Set::R),
    ("c", Set::D, Set::R),
    ("i_D", Set::D, Set::D),
    ("lambda", Set::R, Set::D),
    ("mu", Set::R, Set::D),
    ("q12", Set::E, Set::D),
    ("nu", Set::E, Set::D),
    ("i_E", Set::E, Set::E),
];

#[derive(Clone, Copy)]
enum Set {
    U,
    R,
    D,
    E,
}

impl PregroupoidFile {
    fn set(&self, s: Set) -> &[String] {
        match s {
            Set::U => &self.objects,
            Set::R => &self.arrows,
            Set::D => &self.pairs,
            Set::E => &self.triples,
        }
    }

    pub fn from_pregroupoid(p: &Pregroupoid) -> Self {
        let mut file = Self {
            objects: p.objects.clone(),
            arrows: p.arrows.clone(),
            pairs: p.pairs.clone(),
            triples: p.triples.clone(),
            maps: BTreeMap::new(),
        };
        let tables: [&Vec<usize>; 11] =
            [&p.e, &p.s, &p.i_r, &p.p1, &p.c, &p.i_d, &p.lambda, &p.mu, &p.q12, &p.nu, &p.i_e];
        for ((name, dom, cod), table) in MAPS.iter().zip(tables) {
            let (dom, cod) = (file.set(*dom), file.set(*cod));
            let m = dom.iter().zip(table).map(|(x, &y)| (x.clone(), cod[y].clone())).collect();
            file.maps.insert(name.to_string(), m);
        }
        file
    }

    pub fn to_pregroupoid(&self) -> Result<Pregroupoid, Error> {
        let mut tables: Vec<Vec<usize>> = Vec::with_capacity(MAPS.len());
        for (name, dom, cod) in MAPS {
            let (dom, cod) = (self.set(dom), self.set(cod));
            for ids in [dom, cod] {
                let mut seen = std::collections::BTreeSet::new();
                if let Some(dup) = ids.iter().find(|x| !seen.insert(*x)) {
                    return Err(Error::Json(format!("duplicate id `{dup}`")));
                }
            }
            let index: BTreeMap<&str, usize> = cod.iter().enumerate().map(|(k, x)| (x.as_str(), k)).collect();
            let empty = BTreeMap::new();
            let table = match self.maps.get(name) {
                Some(t) => t,
                None if dom.is_empty() => &empty,
                None => return Err(Error::Json(format!("missing map `{name}`"))),
            };
            if let Some(extra) = table.keys().find(|k| !dom.contains(k)) {
                return Err(Error::Json(format!("map `{name}` is defined at unknown id `{extra}`")));
            }
            let mut out = Vec::with_capacity(dom.len());
            for x in dom {
                let y = table.get(x).ok_or_else(|| Error::Json(format!("map `{name}` is undefined at `{x}`")))?;
                let k = index.get(y.as_str()).ok_or_else(|| Error::Json(format!("map `{name}` sends `{x}` to unknown id `{y}`")))?;
                out.push(*k);
            }
            tables.push(out);
        }
        if let Some(k) = self.maps.keys().find(|k| !MAPS.iter().any(|m| m.0 == k.as_str())) {
            return Err(Error::Json(format!("unknown map `{k}`")));
        }
        let mut t = tables.into_iter();
        let mut next = || t.next().unwrap_or_default();
        Ok(Pregroupoid {
            objects: self.objects.clone(),
            arrows: self.arrows.clone(),
            pairs: self.pairs.clone(),
            triples: self.triples.clone(),
            e: next(),
            s: next(),
            i_r: next(),
            p1: next(),
            c: next(),
            i_d: next(),
            lambda: next(),
            mu: next(),
            q12: next(),
            nu: next(),
            i_e: next(),
        })
    }
}

pub fn read_pregroupoid(text: &str) -> Result<Pregroupoid, Error> {
    let file: PregroupoidFile = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    file.to_pregroupoid()
}

pub fn pregroupoid(p: &Pregroupoid) -> Value {
    serde_json::to_value(PregroupoidFile::from_pregroupoid(p)).expect("serializable")
}

pub fn groupoid(g: &Groupoid) -> Value {
    pregroupoid(&g.to_pregroupoid())
}

pub fn groupoid_map(p: &Pregroupoid, g: &Groupoid, f: &GroupoidMap) -> Value {
    let objects: serde_json::Map<String, Value> =
        p.objects.iter().zip(&f.objects).map(|(x, &y)| (x.clone(), Value::String(g.objects[y].clone()))).collect();
    let arrows: serde_json::Map<String, Value> =
        p.arrows.iter().zip(&f.arrows).map(|(x, &y)| (x.clone(), Value::String(g.arrows[y].clone()))).collect();
    json!({ "objects": objects, "arrows": arrows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use frobperf_core::groupoid::PregroupoidBuilder;

    #[test]
    fn presentations_round_trip() {
        let opts = PresentationOptions::default();
        let r = Arc::new(Presentation::over_field(PrimeField::new(3).unwrap(), &["u", "v"], &["u*v"], &opts).unwrap());
        let a = Presentation::from_text(Base::Algebra(r), &["a"], &["u*a", "a^2 - v^2"], &opts).unwrap();
        let v = presentation(&a);
        assert_eq!(v["base"]["base"], "GF(3)");
        let back = presentation_from(&v, &opts).unwrap();
        assert!(back.same_as(&a));
        assert_eq!(presentation(&back), v);
    }

    #[test]
    fn pregroupoids_round_trip() {
        let mut b = PregroupoidBuilder::new(&["1", "2"]);
        b.arrow("a", "1", "2").unwrap();
        let p = b.build();
        let text = serde_json::to_string(&pregroupoid(&p)).unwrap();
        assert_eq!(read_pregroupoid(&text).unwrap(), p);
    }

    #[test]
    fn dangling_ids_are_rejected() {
        let mut b = PregroupoidBuilder::new(&["1"]);
        b.arrow("a", "1", "1").unwrap();
        let mut file = PregroupoidFile::from_pregroupoid(&b.build());
        file.maps.get_mut("s").unwrap().insert("a".into(), "9".into());
        assert!(file.to_pregroupoid().is_err());
    }
}
