//! Finite pregroupoids, finite groupoids and the groupoid closure.
//!
//! A pregroupoid has objects `U`, arrows `R`, composable data `D` and
//! triples `E`, with structure maps stored as index tables. The maps
//! `t, p₂, λ⁺, μ⁺, q₂₃, ν⁺` are derived from the involutions.
//!
//! The closure is computed round by round. Each round adds a formal
//! composite for every composable pair of current arrow classes and imposes
//! the identifications coming from `D`, units, inverses and associativity.
//! Equality of arrows is kept by a congruence-closed union-find. A round
//! ends the iteration once `(p₁,p₂)` and `(q₁₂,q₂₃)` are bijective on the
//! current stage.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::components::UnionFind;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pregroupoid {
    pub objects: Vec<String>,
    pub arrows: Vec<String>,
    pub pairs: Vec<String>,
    pub triples: Vec<String>,
    /// `U → R`.
    pub e: Vec<usize>,
    /// `R → U`.
    pub s: Vec<usize>,
    pub i_r: Vec<usize>,
    /// `D → R`.
    pub p1: Vec<usize>,
    pub c: Vec<usize>,
    pub i_d: Vec<usize>,
    /// `R → D`.
    pub lambda: Vec<usize>,
    pub mu: Vec<usize>,
    /// `E → D`.
    pub q12: Vec<usize>,
    pub nu: Vec<usize>,
    pub i_e: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub condition: String,
    pub witness: String,
}

impl Pregroupoid {
    pub fn t(&self, a: usize) -> usize {
        self.s[self.i_r[a]]
    }

    pub fn p2(&self, d: usize) -> usize {
        self.i_r[self.p1[self.i_d[d]]]
    }

    pub fn lambda_plus(&self, a: usize) -> usize {
        self.i_d[self.lambda[self.i_r[a]]]
    }

    pub fn mu_plus(&self, a: usize) -> usize {
        self.mu[self.i_r[a]]
    }

    pub fn q23(&self, x: usize) -> usize {
        self.i_d[self.q12[self.i_e[x]]]
    }

    pub fn nu_plus(&self, x: usize) -> usize {
        self.i_d[self.nu[self.i_e[x]]]
    }

    fn shape_violations(&self) -> Vec<Violation> {
        let (nu_, nr, nd, ne) = (self.objects.len(), self.arrows.len(), self.pairs.len(), self.triples.len());
        let tables: [(&str, &Vec<usize>, usize, usize); 11] = [
            ("e", &self.e, nu_, nr),
            ("s", &self.s, nr, nu_),
            ("i_R", &self.i_r, nr, nr),
            ("p1", &self.p1, nd, nr),
            ("c", &self.c, nd, nr),
            ("i_D", &self.i_d, nd, nd),
            ("lambda", &self.lambda, nr, nd),
            ("mu", &self.mu, nr, nd),
            ("q12", &self.q12, ne, nd),
            ("nu", &self.nu, ne, nd),
            ("i_E", &self.i_e, ne, ne),
        ];
        let mut out = Vec::new();
        for (name, map, dom, cod) in tables {
            if map.len() != dom {
                out.push(Violation { condition: format!("{name} is total"), witness: format!("{} of {dom} entries", map.len()) });
            } else if let Some(&bad) = map.iter().find(|&&v| v >= cod) {
                out.push(Violation { condition: format!("{name} lands in its codomain"), witness: format!("index {bad}") });
            }
        }
        out
    }

    /// Pointwise check of conditions (1) to (5).
    pub fn validate(&self) -> Vec<Violation> {
        let shape = self.shape_violations();
        if !shape.is_empty() {
            return shape;
        }
        let mut out = Vec::new();
        let mut check = |ok: bool, condition: &str, witness: &str| {
            if !ok {
                out.push(Violation { condition: condition.to_string(), witness: witness.to_string() });
            }
        };
        let es = |a: usize| self.e[self.s[a]];
        let et = |a: usize| self.e[self.t(a)];
        for (x, name) in self.objects.iter().enumerate() {
            check(self.s[self.e[x]] == x, "s∘e = 1", name);
            check(self.t(self.e[x]) == x, "t∘e = 1", name);
        }
        for (a, name) in self.arrows.iter().enumerate() {
            let ia = self.i_r[a];
            check(self.i_r[ia] == a, "i∘i = 1 on R", name);
            check(self.t(ia) == self.s[a], "t∘i = s", name);
            let (l, lp) = (self.lambda[a], self.lambda_plus(a));
            check(self.p1[l] == a, "p1∘λ = 1", name);
            check(self.p2(l) == es(a), "p2∘λ = e∘s", name);
            check(self.p1[lp] == et(a), "p1∘λ⁺ = e∘t", name);
            check(self.p2(lp) == a, "p2∘λ⁺ = 1", name);
            check(self.c[l] == a, "c∘λ = 1", name);
            check(self.c[lp] == a, "c∘λ⁺ = 1", name);
            let (m, mp) = (self.mu[a], self.mu_plus(a));
            check(self.p1[m] == ia, "p1∘μ = i", name);
            check(self.p2(m) == a, "p2∘μ = 1", name);
            check(self.p1[mp] == a, "p1∘μ⁺ = 1", name);
            check(self.p2(mp) == ia, "p2∘μ⁺ = i", name);
            check(self.c[m] == es(a), "c∘μ = e∘s", name);
            check(self.c[mp] == et(a), "c∘μ⁺ = e∘t", name);
        }
        for (d, name) in self.pairs.iter().enumerate() {
            check(self.i_d[self.i_d[d]] == d, "i∘i = 1 on D", name);
            check(self.s[self.p1[d]] == self.t(self.p2(d)), "s∘p1 = t∘p2", name);
        }
        for (x, name) in self.triples.iter().enumerate() {
            check(self.i_e[self.i_e[x]] == x, "i∘i = 1 on E", name);
            let (q12, q23) = (self.q12[x], self.q23(x));
            check(self.p2(q12) == self.p1[q23], "p2∘q12 = p1∘q23", name);
            let (n, np) = (self.nu[x], self.nu_plus(x));
            check(self.p1[n] == self.p1[q12], "p1∘ν = q1", name);
            check(self.p2(n) == self.c[q23], "p2∘ν = c∘q23", name);
            check(self.p1[np] == self.c[q12], "p1∘ν⁺ = c∘q12", name);
            check(self.p2(np) == self.p2(q23), "p2∘ν⁺ = q3", name);
            check(self.c[n] == self.c[np], "c∘ν = c∘ν⁺", name);
        }
        out
    }

    /// Whether `(p₁,p₂): D → R×_{s,U,t}R` and `(q₁₂,q₂₃): E → D×_{p₂,R,p₁}D`
    /// are bijections.
    pub fn structure_maps_bijective(&self) -> (bool, bool) {
        let composable: usize = (0..self.arrows.len())
            .map(|a| (0..self.arrows.len()).filter(|&b| self.s[a] == self.t(b)).count())
            .sum();
        let mut seen = BTreeMap::new();
        let d_ok = self.pairs.len() == composable
            && (0..self.pairs.len()).all(|d| seen.insert((self.p1[d], self.p2(d)), d).is_none());
        let mut linked = 0usize;
        for d in 0..self.pairs.len() {
            for d2 in 0..self.pairs.len() {
                if self.p2(d) == self.p1[d2] {
                    linked += 1;
                }
            }
        }
        let mut seen = BTreeMap::new();
        let e_ok = self.triples.len() == linked
            && (0..self.triples.len()).all(|x| {
                let (a, b) = (self.q12[x], self.q23(x));
                self.p2(a) == self.p1[b] && seen.insert((a, b), x).is_none()
            });
        (d_ok, e_ok)
    }

    /// Graph edges `s(r) → t(r)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.arrows.len()).map(|a| (self.s[a], self.t(a))).collect()
    }
}

pub fn validate_pregroupoid(p: &Pregroupoid) -> Vec<Violation> {
    p.validate()
}

/// Builds the smallest pregroupoid on a graph: identities, the given
/// arrows with their inverses, and `D` consisting of the pairs forced by
/// `λ` and `μ`. `E` is empty.
#[derive(Clone, Debug, Default)]
pub struct PregroupoidBuilder {
    objects: Vec<String>,
    arrows: Vec<(String, usize, usize)>,
    inverse: Vec<usize>,
}

impl PregroupoidBuilder {
    pub fn new<S: ToString>(objects: &[S]) -> Self {
        let objects: Vec<String> = objects.iter().map(|o| o.to_string()).collect();
        let mut b = Self { objects: Vec::new(), arrows: Vec::new(), inverse: Vec::new() };
        for (x, name) in objects.iter().enumerate() {
            b.objects.push(name.clone());
            b.arrows.push((format!("1_{name}"), x, x));
            b.inverse.push(x);
        }
        b
    }

    fn object(&self, name: &str) -> Result<usize> {
        self.objects.iter().position(|o| o == name).ok_or_else(|| Error::Structure(format!("unknown object {name}")))
    }

    /// Adds `name: from → to` and its inverse `name^-1`.
    pub fn arrow(&mut self, name: &str, from: &str, to: &str) -> Result<usize> {
        self.arrow_pair(name, &format!("{name}^-1"), from, to)
    }

    /// Adds `name: from → to` with inverse `inverse: to → from`.
    pub fn arrow_pair(&mut self, name: &str, inverse: &str, from: &str, to: &str) -> Result<usize> {
        let (x, y) = (self.object(from)?, self.object(to)?);
        if self.arrows.iter().any(|(n, _, _)| n == name || n == inverse) || name == inverse {
            return Err(Error::Structure(format!("duplicate arrow {name}")));
        }
        let a = self.arrows.len();
        self.arrows.push((name.to_string(), x, y));
        self.arrows.push((inverse.to_string(), y, x));
        self.inverse.push(a + 1);
        self.inverse.push(a);
        Ok(a)
    }

    pub fn build(&self) -> Pregroupoid {
        let nr = self.arrows.len();
        let s: Vec<usize> = self.arrows.iter().map(|a| a.1).collect();
        let t: Vec<usize> = self.arrows.iter().map(|a| a.2).collect();
        let e: Vec<usize> = (0..self.objects.len()).collect();
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
        let mut add = |x: usize, y: usize, z: usize| -> usize {
            *index.entry((x, y)).or_insert_with(|| {
                pairs.push((x, y, z));
                pairs.len() - 1
            })
        };
        let mut lambda = vec![0; nr];
        let mut mu = vec![0; nr];
        for a in 0..nr {
            let ia = self.inverse[a];
            lambda[a] = add(a, e[s[a]], a);
            add(e[t[a]], a, a);
            mu[a] = add(ia, a, e[s[a]]);
            add(a, ia, e[t[a]]);
        }
        let names: Vec<String> = self.arrows.iter().map(|a| a.0.clone()).collect();
        let i_d: Vec<usize> = pairs.iter().map(|&(x, y, _)| index[&(self.inverse[y], self.inverse[x])]).collect();
        Pregroupoid {
            objects: self.objects.clone(),
            pairs: pairs.iter().map(|&(x, y, _)| format!("({}, {})", names[x], names[y])).collect(),
            arrows: names,
            triples: Vec::new(),
            e,
            s,
            i_r: self.inverse.clone(),
            p1: pairs.iter().map(|p| p.0).collect(),
            c: pairs.iter().map(|p| p.2).collect(),
            i_d,
            lambda,
            mu,
            q12: Vec::new(),
            nu: Vec::new(),
            i_e: Vec::new(),
        }
    }
}

/// A finite groupoid with total composition; `compose(a, b)` is `a∘b`,
/// defined when `s(a) = t(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Groupoid {
    pub objects: Vec<String>,
    pub arrows: Vec<String>,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    pub identity: Vec<usize>,
    pub inverse: Vec<usize>,
    pub composition: BTreeMap<(usize, usize), usize>,
}

impl Groupoid {
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.composition.get(&(a, b)).copied()
    }

    /// The group `ℤ/n` on one object; arrow `k` is `g^k`.
    pub fn cyclic(n: usize) -> Self {
        let n = n.max(1);
        let mut composition = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                composition.insert((a, b), (a + b) % n);
            }
        }
        Self {
            objects: vec!["*".into()],
            arrows: (0..n).map(|k| format!("g{k}")).collect(),
            source: vec![0; n],
            target: vec![0; n],
            identity: vec![0],
            inverse: (0..n).map(|k| (n - k) % n).collect(),
            composition,
        }
    }

    /// One arrow `(y, x): x → y` for each ordered pair, numbered `y·n + x`.
    pub fn pair<S: ToString>(objects: &[S]) -> Self {
        let n = objects.len();
        let names: Vec<String> = objects.iter().map(|o| o.to_string()).collect();
        let idx = |y: usize, x: usize| y * n + x;
        let mut composition = BTreeMap::new();
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    composition.insert((idx(z, y), idx(y, x)), idx(z, x));
                }
            }
        }
        Self {
            arrows: (0..n * n).map(|k| format!("{}<-{}", names[k / n], names[k % n])).collect(),
            objects: names,
            source: (0..n * n).map(|k| k % n).collect(),
            target: (0..n * n).map(|k| k / n).collect(),
            identity: (0..n).map(|x| idx(x, x)).collect(),
            inverse: (0..n * n).map(|k| idx(k % n, k / n)).collect(),
            composition,
        }
    }

    /// Violated groupoid axioms, checked pointwise.
    pub fn axiom_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let nr = self.arrows.len();
        let v = |c: &str, w: String| Violation { condition: c.to_string(), witness: w };
        if self.source.len() != nr || self.target.len() != nr || self.inverse.len() != nr {
            out.push(v("structure maps are total", String::new()));
            return out;
        }
        if self.identity.len() != self.objects.len() || self.identity.iter().any(|&e| e >= nr) {
            out.push(v("identities are arrows", String::new()));
            return out;
        }
        for a in 0..nr {
            for b in 0..nr {
                let composable = self.source[a] == self.target[b];
                match self.compose(a, b) {
                    Some(ab) if !composable || ab >= nr => {
                        out.push(v("composition only on composable pairs", format!("{},{}", self.arrows[a], self.arrows[b])))
                    }
                    Some(ab) => {
                        if self.source[ab] != self.source[b] || self.target[ab] != self.target[a] {
                            out.push(v("composites have the right ends", self.arrows[ab].clone()));
                        }
                    }
                    None if composable => out.push(v("composition is total", format!("{},{}", self.arrows[a], self.arrows[b]))),
                    None => {}
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for a in 0..nr {
            let (x, y) = (self.source[a], self.target[a]);
            let name = &self.arrows[a];
            if self.compose(a, self.identity[x]) != Some(a) || self.compose(self.identity[y], a) != Some(a) {
                out.push(v("identity", name.clone()));
            }
            let ia = self.inverse[a];
            if ia >= nr
                || self.compose(ia, a) != Some(self.identity[x])
                || self.compose(a, ia) != Some(self.identity[y])
            {
                out.push(v("inverse", name.clone()));
            }
        }
        for (&(a, b), &ab) in &self.composition {
            for c in 0..nr {
                if self.source[b] != self.target[c] {
                    continue;
                }
                let bc = self.composition[&(b, c)];
                if self.compose(ab, c) != self.compose(a, bc) {
                    out.push(v("associativity", format!("{},{},{}", self.arrows[a], self.arrows[b], self.arrows[c])));
                }
            }
        }
        out
    }

    /// The induced pregroupoid: `D` is the composable pairs and `E` the
    /// composable triples.
    pub fn to_pregroupoid(&self) -> Pregroupoid {
        let nr = self.arrows.len();
        let pairs: Vec<(usize, usize)> = self.composition.keys().copied().collect();
        let pindex: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let mut triples = Vec::new();
        for &(a, b) in &pairs {
            for c in 0..nr {
                if self.source[b] == self.target[c] {
                    triples.push((a, b, c));
                }
            }
        }
        let tindex: BTreeMap<(usize, usize, usize), usize> =
            triples.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let inv = &self.inverse;
        let es = |a: usize| self.identity[self.source[a]];
        let nm = |a: usize| &self.arrows[a];
        Pregroupoid {
            objects: self.objects.clone(),
            arrows: self.arrows.clone(),
            pairs: pairs.iter().map(|&(a, b)| format!("({}, {})", nm(a), nm(b))).collect(),
            triples: triples.iter().map(|&(a, b, c)| format!("({}, {}, {})", nm(a), nm(b), nm(c))).collect(),
            e: self.identity.clone(),
            s: self.source.clone(),
            i_r: inv.clone(),
            p1: pairs.iter().map(|p| p.0).collect(),
            c: pairs.iter().map(|p| self.composition[p]).collect(),
            i_d: pairs.iter().map(|&(a, b)| pindex[&(inv[b], inv[a])]).collect(),
            lambda: (0..nr).map(|a| pindex[&(a, es(a))]).collect(),
            mu: (0..nr).map(|a| pindex[&(inv[a], a)]).collect(),
            q12: triples.iter().map(|&(a, b, _)| pindex[&(a, b)]).collect(),
            nu: triples.iter().map(|&(a, b, c)| pindex[&(a, self.composition[&(b, c)])]).collect(),
            i_e: triples.iter().map(|&(a, b, c)| tindex[&(inv[c], inv[b], inv[a])]).collect(),
        }
    }
}

/// A morphism of pregroupoids into a groupoid, given on objects and arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidMap {
    pub objects: Vec<usize>,
    pub arrows: Vec<usize>,
}

/// Squares that fail to commute for `f: P → G`.
pub fn morphism_violations(p: &Pregroupoid, g: &Groupoid, f: &GroupoidMap) -> Vec<Violation> {
    let mut out = Vec::new();
    let v = |c: &str, w: &str| Violation { condition: c.to_string(), witness: w.to_string() };
    if f.objects.len() != p.objects.len()
        || f.arrows.len() != p.arrows.len()
        || f.objects.iter().any(|&x| x >= g.objects.len())
        || f.arrows.iter().any(|&a| a >= g.arrows.len())
    {
        out.push(v("map is total", ""));
        return out;
    }
    for (x, name) in p.objects.iter().enumerate() {
        if f.arrows[p.e[x]] != g.identity[f.objects[x]] {
            out.push(v("f∘e = e∘f", name));
        }
    }
    for (a, name) in p.arrows.iter().enumerate() {
        let fa = f.arrows[a];
        if g.source[fa] != f.objects[p.s[a]] {
            out.push(v("f∘s = s∘f", name));
        }
        if g.inverse[fa] != f.arrows[p.i_r[a]] {
            out.push(v("f∘i = i∘f", name));
        }
    }
    for (d, name) in p.pairs.iter().enumerate() {
        if g.compose(f.arrows[p.p1[d]], f.arrows[p.p2(d)]) != Some(f.arrows[p.c[d]]) {
            out.push(v("f∘c = c∘(f×f)", name));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureConfig {
    pub max_iterations: u32,
    /// Cap on the number of arrow classes of a stage.
    pub max_arrows: usize,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        Self { max_iterations: 16, max_arrows: 2048 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureStatus {
    Closed { iterations: u32 },
    IterationLimit { iterations: u32, arrows: usize },
    ArrowLimit { iterations: u32, arrows: usize },
}

#[derive(Clone, Debug)]
pub struct GroupoidClosure {
    pub status: ClosureStatus,
    /// Present when the status is `Closed`.
    pub groupoid: Option<Groupoid>,
    /// `R → R^gpd`; objects map identically.
    pub canonical: GroupoidMap,
    /// Arrow names of the last stage.
    pub stage_arrows: Vec<String>,
}

impl GroupoidClosure {
    pub fn is_closed(&self) -> bool {
        matches!(self.status, ClosureStatus::Closed { .. })
    }
}

#[derive(Clone, Copy, Debug)]
enum Term {
    Base(usize),
    Comp(usize, usize),
}

struct Stage<'a> {
    p: &'a Pregroupoid,
    terms: Vec<Term>,
    ends: Vec<(usize, usize)>,
    uf: UnionFind,
    table: BTreeMap<(usize, usize), usize>,
    inverse: Vec<Option<usize>>,
}

impl<'a> Stage<'a> {
    fn new(p: &'a Pregroupoid) -> Self {
        let n = p.arrows.len();
        Self {
            p,
            terms: (0..n).map(Term::Base).collect(),
            ends: (0..n).map(|a| (p.s[a], p.t(a))).collect(),
            uf: UnionFind::new(n),
            table: BTreeMap::new(),
            inverse: vec![None; n],
        }
    }

    fn comp(&mut self, a: usize, b: usize) -> usize {
        let key = (self.uf.find(a), self.uf.find(b));
        if let Some(&n) = self.table.get(&key) {
            return n;
        }
        let n = self.uf.push();
        self.terms.push(Term::Comp(key.0, key.1));
        self.ends.push((self.ends[key.1].0, self.ends[key.0].1));
        self.inverse.push(None);
        self.table.insert(key, n);
        n
    }

    fn lookup(&mut self, a: usize, b: usize) -> Option<usize> {
        let key = (self.uf.find(a), self.uf.find(b));
        self.table.get(&key).map(|&n| self.uf.find(n))
    }

    fn inv(&mut self, n: usize) -> usize {
        if let Some(i) = self.inverse[n] {
            return i;
        }
        let i = match self.terms[n] {
            Term::Base(r) => self.p.i_r[r],
            Term::Comp(a, b) => {
                let (ia, ib) = (self.inv(a), self.inv(b));
                self.comp(ib, ia)
            }
        };
        self.inverse[n] = Some(i);
        i
    }

    /// Merges classes whose composites agree, until the table is canonical.
    fn congruence(&mut self) {
        loop {
            let mut merged = false;
            let entries: Vec<((usize, usize), usize)> = core::mem::take(&mut self.table).into_iter().collect();
            for ((a, b), n) in entries {
                let key = (self.uf.find(a), self.uf.find(b));
                match self.table.get(&key) {
                    Some(&m) => merged |= self.uf.union(m, n),
                    None => {
                        self.table.insert(key, n);
                    }
                }
            }
            if !merged {
                return;
            }
        }
    }

    fn reps(&mut self) -> Vec<usize> {
        let mut r: Vec<usize> = (0..self.terms.len()).filter(|&n| self.uf.find(n) == n).collect();
        r.sort_unstable();
        r
    }

    fn identity(&self, x: usize) -> usize {
        self.p.e[x]
    }

    fn composable(&self, reps: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &a in reps {
            for &b in reps {
                if self.ends[a].0 == self.ends[b].1 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn round(&mut self, max_arrows: usize) -> bool {
        let reps = self.reps();
        for (a, b) in self.composable(&reps) {
            self.comp(a, b);
        }
        for &a in &reps {
            let (x, y) = self.ends[a];
            let (ex, ey) = (self.identity(x), self.identity(y));
            let l = self.comp(a, ex);
            self.uf.union(l, a);
            let r = self.comp(ey, a);
            self.uf.union(r, a);
            let ia = self.inv(a);
            let m = self.comp(ia, a);
            self.uf.union(m, ex);
            let mp = self.comp(a, ia);
            self.uf.union(mp, ey);
        }
        self.congruence();
        let reps = self.reps();
        if reps.len() > max_arrows {
            return false;
        }
        let pairs = self.composable(&reps);
        for &(a, b) in &pairs {
            let Some(ab) = self.lookup(a, b) else { continue };
            for &c in &reps {
                if self.ends[b].0 != self.ends[c].1 {
                    continue;
                }
                let Some(bc) = self.lookup(b, c) else { continue };
                let left = self.comp(ab, c);
                let right = self.comp(a, bc);
                self.uf.union(left, right);
            }
        }
        self.congruence();
        true
    }

    /// `(p₁,p₂)` bijective means every composable pair of classes has a
    /// composite; `(q₁₂,q₂₃)` bijective means both bracketings of every
    /// composable triple agree. Unit and inverse laws are checked too.
    fn is_groupoid(&mut self) -> bool {
        let reps = self.reps();
        let pairs = self.composable(&reps);
        for &(a, b) in &pairs {
            if self.lookup(a, b).is_none() {
                return false;
            }
        }
        for &a in &reps {
            let (x, y) = self.ends[a];
            let (ex, ey) = (self.identity(x), self.identity(y));
            let Some(ia) = self.inverse[a] else { return false };
            if self.lookup(a, ex) != Some(a)
                || self.lookup(ey, a) != Some(a)
                || self.lookup(ia, a) != Some(self.uf.find(ex))
                || self.lookup(a, ia) != Some(self.uf.find(ey))
            {
                return false;
            }
        }
        for &(a, b) in &pairs {
            let ab = self.lookup(a, b).unwrap_or(usize::MAX);
            for &c in &reps {
                if self.ends[b].0 != self.ends[c].1 {
                    continue;
                }
                let Some(bc) = self.lookup(b, c) else { return false };
                if self.lookup(ab, c).is_none() || self.lookup(ab, c) != self.lookup(a, bc) {
                    return false;
                }
            }
        }
        true
    }

    fn names(&mut self, reps: &[usize]) -> Vec<String> {
        let n = self.terms.len();
        let mut first = vec![usize::MAX; n];
        for m in 0..n {
            let r = self.uf.find(m);
            if first[r] == usize::MAX {
                first[r] = m;
            }
        }
        let mut name: Vec<String> = Vec::with_capacity(n);
        for m in 0..n {
            let s = match self.terms[m] {
                Term::Base(r) => self.p.arrows[r].clone(),
                Term::Comp(a, b) => {
                    let (fa, fb) = (first[self.uf.find(a)], first[self.uf.find(b)]);
                    format!("{}.{}", name[fa], name[fb])
                }
            };
            name.push(s);
        }
        let mut taken = alloc::collections::BTreeSet::new();
        reps.iter()
            .map(|&r| {
                let mut s = name[first[r]].clone();
                while !taken.insert(s.clone()) {
                    s.push('\'');
                }
                s
            })
            .collect()
    }

    /// Classes ordered by their earliest term.
    fn ordered_reps(&mut self) -> Vec<usize> {
        let mut seen = BTreeMap::new();
        for m in 0..self.terms.len() {
            let r = self.uf.find(m);
            let k = seen.len();
            seen.entry(r).or_insert(k);
        }
        let mut reps: Vec<(usize, usize)> = seen.into_iter().map(|(r, k)| (k, r)).collect();
        reps.sort_unstable();
        reps.into_iter().map(|(_, r)| r).collect()
    }

    fn finish(&mut self) -> (Groupoid, GroupoidMap) {
        let reps = self.ordered_reps();
        let slot: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let names = self.names(&reps);
        let mut composition = BTreeMap::new();
        for (a, b) in self.composable(&reps) {
            let ab = self.lookup(a, b).expect("total composition");
            composition.insert((slot[&a], slot[&b]), slot[&ab]);
        }
        let mut inverse = Vec::with_capacity(reps.len());
        for &r in &reps {
            let i = self.inverse[r].expect("inverse recorded");
            inverse.push(slot[&self.uf.find(i)]);
        }
        let p = self.p;
        let g = Groupoid {
            objects: p.objects.clone(),
            arrows: names,
            source: reps.iter().map(|&r| self.ends[r].0).collect(),
            target: reps.iter().map(|&r| self.ends[r].1).collect(),
            identity: (0..p.objects.len()).map(|x| slot[&self.uf.find(p.e[x])]).collect(),
            inverse,
            composition,
        };
        let arrows = (0..p.arrows.len()).map(|a| slot[&self.uf.find(a)]).collect();
        (g, GroupoidMap { objects: (0..p.objects.len()).collect(), arrows })
    }
}

/// The groupoid closure `P^gpd` with its canonical map `P → P^gpd`.
pub fn groupoid_closure(p: &Pregroupoid, cfg: &ClosureConfig) -> Result<GroupoidClosure> {
    let bad = p.validate();
    if let Some(v) = bad.first() {
        return Err(Error::Precondition(format!("not a pregroupoid: {} fails at {}", v.condition, v.witness)));
    }
    let mut st = Stage::new(p);
    for d in 0..p.pairs.len() {
        let n = st.comp(p.p1[d], p.p2(d));
        st.uf.union(n, p.c[d]);
    }
    st.congruence();
    let mut iterations = 0;
    let status = loop {
        if iterations > 0 && st.is_groupoid() {
            break ClosureStatus::Closed { iterations };
        }
        if iterations >= cfg.max_iterations {
            let arrows = st.reps().len();
            break ClosureStatus::IterationLimit { iterations, arrows };
        }
        iterations += 1;
        if !st.round(cfg.max_arrows) {
            let arrows = st.reps().len();
            break ClosureStatus::ArrowLimit { iterations, arrows };
        }
    };
    let reps = st.ordered_reps();
    let stage_arrows = st.names(&reps);
    if let ClosureStatus::Closed { .. } = status {
        let (g, canonical) = st.finish();
        Ok(GroupoidClosure { status, groupoid: Some(g), canonical, stage_arrows })
    } else {
        let slot: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let arrows = (0..p.arrows.len()).map(|a| slot[&st.uf.find(a)]).collect();
        let canonical = GroupoidMap { objects: (0..p.objects.len()).collect(), arrows };
        Ok(GroupoidClosure { status, groupoid: None, canonical, stage_arrows })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factorization {
    Unique(GroupoidMap),
    None,
    Multiple,
    Indeterminate,
}

/// Searches all groupoid morphisms `closure → target` that agree with `f`
/// after the canonical map. Stops at two solutions or after `max_nodes`
/// search nodes.
pub fn factorizations(
    closure: &GroupoidClosure,
    target: &Groupoid,
    f: &GroupoidMap,
    max_nodes: u64,
) -> Result<Factorization> {
    let g = closure.groupoid.as_ref().ok_or_else(|| Error::Precondition("closure did not terminate".into()))?;
    let n = g.arrows.len();
    if n == 0 {
        return Ok(Factorization::Unique(GroupoidMap { objects: f.objects.clone(), arrows: Vec::new() }));
    }
    let mut fixed: Vec<Option<usize>> = vec![None; n];
    for (r, &a) in closure.canonical.arrows.iter().enumerate() {
        match fixed[a] {
            Some(x) if x != f.arrows[r] => return Ok(Factorization::None),
            _ => fixed[a] = Some(f.arrows[r]),
        }
    }
    let obj = &f.objects;
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|a| match fixed[a] {
            Some(x) => vec![x],
            None => (0..target.arrows.len())
                .filter(|&y| target.source[y] == obj[g.source[a]] && target.target[y] == obj[g.target[a]])
                .collect(),
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&a| (candidates[a].len(), a));
    let mut pos = vec![0; n];
    for (k, &a) in order.iter().enumerate() {
        pos[a] = k;
    }
    // Constraints checked once the last of the three arrows is assigned.
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for (&(a, b), &ab) in &g.composition {
        let last = *[a, b, ab].iter().max_by_key(|&&x| pos[x]).unwrap_or(&a);
        checks[pos[last]].push((a, b, ab));
    }
    let mut assign: Vec<usize> = vec![usize::MAX; n];
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut nodes = 0u64;
    let mut stack: Vec<usize> = vec![0];
    let mut depth = 0usize;
    while !stack.is_empty() {
        nodes += 1;
        if nodes > max_nodes {
            return Ok(Factorization::Indeterminate);
        }
        if depth == n {
            found.push(assign.clone());
            if found.len() > 1 {
                return Ok(Factorization::Multiple);
            }
            stack.pop();
            depth -= 1;
            if let Some(top) = stack.last_mut() {
                *top += 1;
            }
            continue;
        }
        let a = order[depth];
        let k = stack[depth];
        if k >= candidates[a].len() {
            stack.pop();
            assign[a] = usize::MAX;
            if depth == 0 {
                break;
            }
            depth -= 1;
            if let Some(top) = stack.last_mut() {
                *top += 1;
            }
            continue;
        }
        assign[a] = candidates[a][k];
        let ok = checks[depth].iter().all(|&(x, y, xy)| target.compose(assign[x], assign[y]) == Some(assign[xy]));
        if ok {
            depth += 1;
            stack.push(0);
        } else {
            stack[depth] += 1;
        }
    }
    Ok(match found.pop() {
        Some(arrows) => Factorization::Unique(GroupoidMap { objects: obj.clone(), arrows }),
        None => Factorization::None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniversalVerdict {
    Holds,
    Fails { sample: usize, found: Factorization },
    Indeterminate { sample: usize },
}

/// Checks unique factorization through the closure for every sample
/// morphism `P → G`.
pub fn verify_universal_property(
    p: &Pregroupoid,
    closure: &GroupoidClosure,
    samples: &[(Groupoid, GroupoidMap)],
    max_nodes: u64,
) -> Result<UniversalVerdict> {
    for (k, (g, f)) in samples.iter().enumerate() {
        if let Some(v) = g.axiom_violations().first() {
            return Err(Error::Precondition(format!("sample {k} is not a groupoid: {}", v.condition)));
        }
        if let Some(v) = morphism_violations(p, g, f).first() {
            return Err(Error::Precondition(format!("sample {k} is not a morphism: {} at {}", v.condition, v.witness)));
        }
        match factorizations(closure, g, f, max_nodes)? {
            Factorization::Unique(_) => {}
            Factorization::Indeterminate => return Ok(UniversalVerdict::Indeterminate { sample: k }),
            other => return Ok(UniversalVerdict::Fails { sample: k, found: other }),
        }
    }
    Ok(UniversalVerdict::Holds)
}

/// Whether `f` is a bijection on objects and arrows that respects the
/// groupoid structure.
pub fn is_isomorphism(a: &Groupoid, b: &Groupoid, f: &GroupoidMap) -> bool {
    let bij = |m: &[usize], n: usize| {
        let mut seen = vec![false; n];
        m.len() == n && m.iter().all(|&x| x < n && !core::mem::replace(&mut seen[x], true))
    };
    bij(&f.objects, b.objects.len())
        && bij(&f.arrows, b.arrows.len())
        && (0..a.arrows.len()).all(|x| {
            b.source[f.arrows[x]] == f.objects[a.source[x]]
                && b.target[f.arrows[x]] == f.objects[a.target[x]]
                && b.inverse[f.arrows[x]] == f.arrows[a.inverse[x]]
        })
        && a.composition.iter().all(|(&(x, y), &xy)| b.compose(f.arrows[x], f.arrows[y]) == Some(f.arrows[xy]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::groupoid_pi0;

    fn tree() -> Pregroupoid {
        let mut b = PregroupoidBuilder::new(&["1", "2", "3"]);
        b.arrow("a", "1", "2").unwrap();
        b.arrow("b", "2", "3").unwrap();
        b.build()
    }

    fn close(p: &Pregroupoid) -> GroupoidClosure {
        groupoid_closure(p, &ClosureConfig::default()).unwrap()
    }

    #[test]
    fn builder_output_is_valid() {
        let p = tree();
        assert_eq!(p.arrows.len(), 7);
        assert!(p.validate().is_empty(), "{:?}", p.validate());
    }

    #[test]
    fn induced_pregroupoids_are_valid_and_bijective() {
        for g in [Groupoid::pair(&["x", "y", "z"]), Groupoid::cyclic(4)] {
            assert!(g.axiom_violations().is_empty());
            let p = g.to_pregroupoid();
            assert!(p.validate().is_empty(), "{:?}", p.validate());
            assert_eq!(p.structure_maps_bijective(), (true, true));
        }
    }

    #[test]
    fn corrupted_composite_is_reported() {
        let mut p = Groupoid::cyclic(2).to_pregroupoid();
        let d = p.lambda[1];
        p.c[d] = 0;
        let v = p.validate();
        assert!(v.iter().any(|v| v.condition == "c∘λ = 1"), "{v:?}");
    }

    #[test]
    fn missing_lambda_point_is_reported() {
        let mut p = tree();
        let a = p.arrows.iter().position(|n| n == "a").unwrap();
        p.lambda[a] = p.mu[a];
        let v = p.validate();
        assert!(v.iter().any(|v| v.condition == "p1∘λ = 1"), "{v:?}");
    }

    #[test]
    fn tree_closes_to_the_pair_groupoid() {
        let p = tree();
        let cl = close(&p);
        let g = cl.groupoid.clone().unwrap();
        assert_eq!(g.arrows.len(), 9);
        assert!(g.axiom_violations().is_empty());
        let mut ends: Vec<_> = (0..9).map(|a| (g.source[a], g.target[a])).collect();
        ends.sort();
        ends.dedup();
        assert_eq!(ends.len(), 9);
        assert!(morphism_violations(&p, &g, &cl.canonical).is_empty());
        assert_eq!(g.to_pregroupoid().structure_maps_bijective(), (true, true));
    }

    #[test]
    fn closure_of_a_groupoid_is_itself() {
        for g in [Groupoid::pair(&["x", "y"]), Groupoid::cyclic(3)] {
            let cl = close(&g.to_pregroupoid());
            let h = cl.groupoid.as_ref().unwrap();
            assert!(is_isomorphism(&g, h, &cl.canonical));
        }
    }

    #[test]
    fn closure_is_idempotent() {
        let cl = close(&tree());
        let g = cl.groupoid.unwrap();
        let again = close(&g.to_pregroupoid());
        assert!(is_isomorphism(&g, again.groupoid.as_ref().unwrap(), &again.canonical));
    }

    #[test]
    fn universal_property_on_the_tree() {
        let p = tree();
        let cl = close(&p);
        let g = cl.groupoid.clone().unwrap();
        let pair = Groupoid::pair(&["1", "2", "3"]);
        let to_pair = GroupoidMap {
            objects: vec![0, 1, 2],
            arrows: (0..p.arrows.len()).map(|a| p.t(a) * 3 + p.s[a]).collect(),
        };
        let z2 = Groupoid::cyclic(2);
        let to_z2 = GroupoidMap { objects: vec![0; 3], arrows: (0..7).map(|a| usize::from(a >= 3)).collect() };
        let samples = vec![(g.clone(), cl.canonical.clone()), (pair, to_pair), (z2, to_z2)];
        assert_eq!(verify_universal_property(&p, &cl, &samples, 1 << 20).unwrap(), UniversalVerdict::Holds);
        match factorizations(&cl, &g, &cl.canonical, 1 << 20).unwrap() {
            Factorization::Unique(m) => assert_eq!(m.arrows, (0..9).collect::<Vec<_>>()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cycles_do_not_close() {
        let mut b = PregroupoidBuilder::new(&["1"]);
        b.arrow("l", "1", "1").unwrap();
        let cl = groupoid_closure(&b.build(), &ClosureConfig { max_iterations: 4, max_arrows: 1000 }).unwrap();
        assert!(!cl.is_closed());
    }

    #[test]
    fn relations_from_cyclic_groups_close() {
        // l∘l = 1 in D: the closure is ℤ/2.
        let mut p = Groupoid::cyclic(2).to_pregroupoid();
        p.triples.clear();
        p.q12.clear();
        p.nu.clear();
        p.i_e.clear();
        let cl = close(&p);
        assert_eq!(cl.groupoid.unwrap().arrows.len(), 2);
    }

    #[test]
    fn orbits_are_preserved() {
        let mut b = PregroupoidBuilder::new(&["1", "2", "3", "4", "5"]);
        b.arrow("a", "1", "2").unwrap();
        b.arrow("b", "4", "5").unwrap();
        let p = b.build();
        let cl = close(&p);
        let g = cl.groupoid.unwrap();
        let ge: Vec<_> = (0..g.arrows.len()).map(|a| (g.source[a], g.target[a])).collect();
        assert_eq!(groupoid_pi0(5, &p.edges()).unwrap(), groupoid_pi0(5, &ge).unwrap());
    }
}
