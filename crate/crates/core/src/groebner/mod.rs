//! Ideals and Gröbner bases: normal forms, membership, elimination,
//! saturation, unit-ideal and radical-membership tests.

mod buchberger;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use buchberger::{Engine, Entry};
pub use buchberger::Selection;

use crate::corering::{same_ring, MonomialOrder, Poly, PolyRing};
use crate::error::{Error, Result};

/// Resource limits for Buchberger runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// S-pairs processed per basis computation.
    pub max_pairs: usize,
    /// Largest total degree of any intermediate polynomial.
    pub max_degree: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { max_pairs: 200_000, max_degree: 256 }
    }
}

impl Budgets {
    pub const UNLIMITED: Budgets = Budgets { max_pairs: usize::MAX, max_degree: u32::MAX };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    ring: Arc<PolyRing>,
    gens: Vec<Poly>,
}

impl Ideal {
    /// Zero generators are dropped.
    pub fn new(ring: &Arc<PolyRing>, gens: Vec<Poly>) -> Result<Self> {
        if let Some(bad) = gens.iter().find(|g| !same_ring(g.ring(), ring)) {
            return Err(Error::Structure(format!("generator `{bad}` lives in a different ring")));
        }
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(Self { ring: ring.clone(), gens })
    }

    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Self { ring: ring.clone(), gens: Vec::new() }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        let mut gens = self.gens.clone();
        for g in &other.gens {
            gens.push(g.transport(&self.ring)?);
        }
        Ideal::new(&self.ring, gens)
    }

    pub fn with_generator(&self, g: Poly) -> Result<Ideal> {
        let mut gens = self.gens.clone();
        gens.push(g.transport(&self.ring)?);
        Ideal::new(&self.ring, gens)
    }

    /// Moves the generators into another ring by variable name.
    pub fn transport(&self, target: &Arc<PolyRing>) -> Result<Ideal> {
        let gens = self.gens.iter().map(|g| g.transport(target)).collect::<Result<Vec<_>>>()?;
        Ideal::new(target, gens)
    }
}

/// A reduced Gröbner basis, sorted by decreasing leading monomial.
#[derive(Clone)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    elements: Vec<Poly>,
    entries: Vec<Entry>,
    /// `cofactors[i][j]` multiplies generator `j` in the expansion of element `i`.
    cofactors: Option<Vec<Vec<Poly>>>,
    generators: Vec<Poly>,
    pairs_processed: usize,
}

impl core::fmt::Debug for GroebnerBasis {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_list().entries(self.elements.iter()).finish()
    }
}

pub fn groebner_basis(ideal: &Ideal, track_cofactors: bool, budgets: &Budgets) -> Result<GroebnerBasis> {
    groebner_basis_with(ideal, track_cofactors, budgets, Selection::Normal)
}

pub fn groebner_basis_with(
    ideal: &Ideal,
    track_cofactors: bool,
    budgets: &Budgets,
    selection: Selection,
) -> Result<GroebnerBasis> {
    let ring = ideal.ring.clone();
    let order = ring.order();
    let engine = Engine {
        field: ring.field(),
        order: &order,
        budgets,
        ngens: track_cofactors.then_some(ideal.gens.len()),
    };
    let input = ideal.gens.iter().map(|g| g.terms().to_vec()).collect();
    let out = engine.run(input, selection)?;
    let mut elements = Vec::with_capacity(out.elements.len());
    let mut entries = Vec::with_capacity(out.elements.len());
    let mut cofactors = track_cofactors.then(Vec::new);
    for (terms, cof) in out.elements {
        elements.push(Poly::from_sorted(&ring, terms.clone()));
        if let (Some(all), Some(cof)) = (cofactors.as_mut(), cof) {
            all.push(cof.into_iter().map(|t| Poly::from_sorted(&ring, t)).collect());
        }
        entries.push(Entry { lm: terms[0].0, terms, sugar: 0, cof: None });
    }
    Ok(GroebnerBasis {
        ring,
        elements,
        entries,
        cofactors,
        generators: ideal.gens.clone(),
        pairs_processed: out.pairs_processed,
    })
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.ring.order()
    }

    pub fn elements(&self) -> &[Poly] {
        &self.elements
    }

    pub fn cofactors(&self) -> Option<&[Vec<Poly>]> {
        self.cofactors.as_deref()
    }

    /// The generators this basis was computed from.
    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn pairs_processed(&self) -> usize {
        self.pairs_processed
    }

    pub fn ideal(&self) -> Ideal {
        Ideal { ring: self.ring.clone(), gens: self.elements.clone() }
    }

    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].is_constant()
    }

    pub fn is_zero(&self) -> bool {
        self.elements.is_empty()
    }

    /// Remainder of full multivariate division; `f` is moved into the basis
    /// ring by variable name first.
    pub fn normal_form(&self, f: &Poly) -> Result<Poly> {
        let f = f.transport(&self.ring)?;
        Ok(self.reduce_in_ring(&f))
    }

    pub(crate) fn reduce_in_ring(&self, f: &Poly) -> Poly {
        let order = self.ring.order();
        let engine = Engine { field: self.ring.field(), order: &order, budgets: &Budgets::UNLIMITED, ngens: None };
        let active: Vec<usize> = (0..self.entries.len()).collect();
        let (rem, _) = engine
            .reduce(f.terms().to_vec(), None, &self.entries, &active)
            .expect("unbounded reduction cannot exceed a budget");
        Poly::from_sorted(&self.ring, rem)
    }

    pub fn contains(&self, f: &Poly) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Expresses a member `f` of the ideal in the original generators,
    /// returning one coefficient per generator. Needs cofactors.
    pub fn lift(&self, f: &Poly) -> Result<Option<Vec<Poly>>> {
        let cof = self.cofactors.as_ref().ok_or(Error::CofactorsRequired)?;
        let f = f.transport(&self.ring)?;
        let order = self.ring.order();
        let field = self.ring.field();
        let mut work = f.terms().to_vec();
        let mut quot: Vec<Poly> = (0..self.entries.len()).map(|_| Poly::zero(&self.ring)).collect();
        while let Some(&(t, c)) = work.first() {
            let Some(k) = self.entries.iter().position(|e| e.lm.divides(&t)) else {
                return Ok(None);
            };
            let e = &self.entries[k];
            let m = e.lm.quotient_of(&t);
            let neg = field.neg(c);
            work = crate::corering::add_scaled(field, &order, &work[1..], neg, &m, &e.terms[1..]);
            quot[k] = quot[k].add_scaled(c, &m, &Poly::one(&self.ring));
        }
        let mut out: Vec<Poly> = (0..self.generators.len()).map(|_| Poly::zero(&self.ring)).collect();
        for (k, q) in quot.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (j, a) in cof[k].iter().enumerate() {
                out[j] = &out[j] + &(q * a);
            }
        }
        Ok(Some(out))
    }
}

pub fn normal_form(f: &Poly, g: &GroebnerBasis) -> Result<Poly> {
    g.normal_form(f)
}

/// A variable name not present in `ring`, derived from `stem`.
pub fn fresh_name(ring: &PolyRing, stem: &str) -> String {
    fresh_name_avoiding(ring.vars(), stem)
}

pub(crate) fn fresh_name_avoiding(taken: &[String], stem: &str) -> String {
    if !taken.iter().any(|v| v == stem) {
        return stem.into();
    }
    (1..).map(|k| format!("{stem}{k}")).find(|c| !taken.iter().any(|v| v == c)).unwrap()
}

/// Generators of `I ∩ 𝔽_p[keep]`, returned in the ring of `I`.
pub fn eliminate(ideal: &Ideal, keep: &[usize], budgets: &Budgets) -> Result<Ideal> {
    let ring = &ideal.ring;
    let n = ring.nvars();
    if let Some(&bad) = keep.iter().find(|&&k| k >= n) {
        return Err(Error::Structure(format!("variable index {bad} out of range")));
    }
    let mut layout: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let nelim = layout.len();
    layout.extend((0..n).filter(|i| keep.contains(i)));
    let vars = layout.iter().map(|&i| ring.vars()[i].clone()).collect();
    let order = if nelim == 0 { MonomialOrder::grevlex() } else { MonomialOrder::block(nelim) };
    let elim_ring = PolyRing::new(ring.field(), vars, order)?;
    let mut forward = alloc::vec![0usize; n];
    for (pos, &i) in layout.iter().enumerate() {
        forward[i] = pos;
    }
    let gens = ideal.gens.iter().map(|g| g.relabel(&elim_ring, &forward)).collect();
    let gb = groebner_basis(&Ideal::new(&elim_ring, gens)?, false, budgets)?;
    let keep_mask: u32 = (nelim..n).fold(0, |m, i| m | (1 << i));
    let kept = gb
        .elements
        .iter()
        .filter(|g| g.only_uses(keep_mask))
        .map(|g| g.relabel(ring, &layout))
        .collect();
    Ideal::new(ring, kept)
}

/// Same as [`eliminate`], naming the kept variables.
pub fn eliminate_named(ideal: &Ideal, keep: &[&str], budgets: &Budgets) -> Result<Ideal> {
    let idx = keep
        .iter()
        .map(|k| ideal.ring.var_index(k).ok_or_else(|| Error::UnknownVariable((*k).into())))
        .collect::<Result<Vec<_>>>()?;
    eliminate(ideal, &idx, budgets)
}

/// `I ∩ J`, by eliminating `t` from `t·I + (1 − t)·J`.
pub fn intersect(a: &Ideal, b: &Ideal, budgets: &Budgets) -> Result<Ideal> {
    let ring = &a.ring;
    let b = b.transport(ring)?;
    if a.is_zero() || b.is_zero() {
        return Ok(Ideal::zero(ring));
    }
    let t = fresh_name(ring, "_t");
    let mut vars = Vec::with_capacity(ring.nvars() + 1);
    vars.push(t);
    vars.extend(ring.vars().iter().cloned());
    let ext = PolyRing::new(ring.field(), vars, MonomialOrder::block(1))?;
    let shift: Vec<usize> = (1..=ring.nvars()).collect();
    let tv = Poly::var(&ext, 0);
    let one_minus = &Poly::one(&ext) - &tv;
    let mut gens: Vec<Poly> = a.gens.iter().map(|f| &tv * &f.relabel(&ext, &shift)).collect();
    gens.extend(b.gens.iter().map(|f| &one_minus * &f.relabel(&ext, &shift)));
    let gb = groebner_basis(&Ideal::new(&ext, gens)?, false, budgets)?;
    let lower: u32 = (1..ext.nvars()).fold(0, |m, i| m | (1 << i));
    let back: Vec<usize> = core::iter::once(0).chain(0..ring.nvars()).collect();
    let kept = gb.elements.iter().filter(|g| g.only_uses(lower)).map(|g| g.relabel(ring, &back)).collect();
    Ideal::new(ring, kept)
}

/// Extends the ring of `ideal` by one fresh variable placed first and
/// adds `g·z − 1`.
fn rabinowitsch(ideal: &Ideal, g: &Poly) -> Result<(Arc<PolyRing>, Vec<Poly>)> {
    let ring = &ideal.ring;
    let z = fresh_name(ring, "_z");
    let mut vars = Vec::with_capacity(ring.nvars() + 1);
    vars.push(z);
    vars.extend(ring.vars().iter().cloned());
    let ext = PolyRing::new(ring.field(), vars, MonomialOrder::block(1))?;
    let shift: Vec<usize> = (1..=ring.nvars()).collect();
    let mut gens: Vec<Poly> = ideal.gens.iter().map(|f| f.relabel(&ext, &shift)).collect();
    let gz = &g.transport(ring)?.relabel(&ext, &shift) * &Poly::var(&ext, 0);
    gens.push(&gz - &Poly::one(&ext));
    Ok((ext, gens))
}

/// `I : g^∞`.
pub fn saturate(ideal: &Ideal, g: &Poly, budgets: &Budgets) -> Result<Ideal> {
    if g.is_zero() {
        return Err(Error::Precondition("a nonzero saturating element".into()));
    }
    let (ext, gens) = rabinowitsch(ideal, g)?;
    let n = ideal.ring.nvars();
    let keep: Vec<usize> = (1..=n).collect();
    let out = eliminate(&Ideal::new(&ext, gens)?, &keep, budgets)?;
    let back: Vec<usize> = core::iter::once(0).chain(0..n).collect();
    let gens = out.gens.iter().map(|f| f.relabel(&ideal.ring, &back)).collect();
    Ideal::new(&ideal.ring, gens)
}

/// Whether `f ∈ √I`.
pub fn radical_membership(f: &Poly, ideal: &Ideal, budgets: &Budgets) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    let (ext, gens) = rabinowitsch(ideal, f)?;
    Ok(groebner_basis(&Ideal::new(&ext, gens)?, false, budgets)?.is_unit())
}

pub fn is_unit_ideal(ideal: &Ideal, budgets: &Budgets) -> Result<bool> {
    Ok(groebner_basis(ideal, false, budgets)?.is_unit())
}

/// Equality of ideals by comparing reduced bases in the ring's order.
pub fn ideals_equal(a: &Ideal, b: &Ideal, budgets: &Budgets) -> Result<bool> {
    let b = b.transport(&a.ring)?;
    let ga = groebner_basis(a, false, budgets)?;
    let gb = groebner_basis(&b, false, budgets)?;
    Ok(ga.elements == gb.elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corering::{parse_poly, PrimeField};
    use alloc::string::ToString;

    fn ring(p: u32, vars: &[&str], order: MonomialOrder) -> Arc<PolyRing> {
        PolyRing::new(PrimeField::new(p).unwrap(), vars.iter().map(|v| v.to_string()).collect(), order).unwrap()
    }

    fn ideal(r: &Arc<PolyRing>, gens: &[&str]) -> Ideal {
        Ideal::new(r, gens.iter().map(|g| parse_poly(r, g).unwrap()).collect()).unwrap()
    }

    fn texts(g: &[Poly]) -> Vec<String> {
        g.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn lex_bases_from_hand_computation() {
        let r = ring(3, &["x", "y"], MonomialOrder::lex());
        let g = groebner_basis(&ideal(&r, &["x^2 - 1", "x*y - 1"]), false, &Budgets::default()).unwrap();
        assert_eq!(texts(g.elements()), ["x - y", "y^2 - 1"]);

        let r2 = ring(2, &["x", "y"], MonomialOrder::lex());
        let g = groebner_basis(&ideal(&r2, &["x^2 - y", "y^2 - x"]), false, &Budgets::default()).unwrap();
        assert_eq!(texts(g.elements()), ["x + y^2", "y^4 + y"]);

        let g = groebner_basis(&ideal(&r2, &["1"]), false, &Budgets::default()).unwrap();
        assert_eq!(texts(g.elements()), ["1"]);
        assert!(g.is_unit());
    }

    #[test]
    fn normal_forms() {
        let r = ring(3, &["x", "y"], MonomialOrder::lex());
        let g = groebner_basis(&ideal(&r, &["x - y"]), false, &Budgets::default()).unwrap();
        assert!(g.normal_form(&parse_poly(&r, "x - y").unwrap()).unwrap().is_zero());
        let r2 = ring(2, &["x", "y"], MonomialOrder::lex());
        let g = groebner_basis(&ideal(&r2, &["x + y"]), false, &Budgets::default()).unwrap();
        assert!(g.normal_form(&parse_poly(&r2, "x^2 + y^2").unwrap()).unwrap().is_zero());
        let g = groebner_basis(&ideal(&r, &["x^2 - 1", "x*y - 1"]), false, &Budgets::default()).unwrap();
        assert!(g.normal_form(&parse_poly(&r, "x^2").unwrap()).unwrap().is_one());
    }

    #[test]
    fn cofactors_reproduce_and_lift() {
        let r = ring(5, &["x", "y", "z"], MonomialOrder::grevlex());
        let i = ideal(&r, &["x^2 - y*z", "x*y - z^2", "y^3 - x*z + 1"]);
        let g = groebner_basis(&i, true, &Budgets::default()).unwrap();
        for (e, cof) in g.elements().iter().zip(g.cofactors().unwrap()) {
            let mut acc = Poly::zero(&r);
            for (a, f) in cof.iter().zip(i.gens()) {
                acc = &acc + &(a * f);
            }
            assert_eq!(&acc, e);
        }
        let f = &(&parse_poly(&r, "x*y + 1").unwrap() * &i.gens()[0]) + &(&parse_poly(&r, "z^2").unwrap() * &i.gens()[2]);
        let lifted = g.lift(&f).unwrap().unwrap();
        let mut acc = Poly::zero(&r);
        for (a, gen) in lifted.iter().zip(i.gens()) {
            acc = &acc + &(a * gen);
        }
        assert_eq!(acc, f);
    }

    #[test]
    fn elimination() {
        let r = ring(7, &["x", "a", "b"], MonomialOrder::grevlex());
        let out = eliminate_named(&ideal(&r, &["a - x^2", "b - x^3"]), &["a", "b"], &Budgets::default()).unwrap();
        assert_eq!(out.gens().len(), 1);
        assert_eq!(out.gens()[0].monic(), parse_poly(&r, "a^3 - b^2").unwrap().monic());

        let r = ring(3, &["x", "y"], MonomialOrder::grevlex());
        assert!(eliminate_named(&ideal(&r, &["x - y"]), &["y"], &Budgets::default()).unwrap().is_zero());
        let out = eliminate_named(&ideal(&r, &["x", "y - 1"]), &["y"], &Budgets::default()).unwrap();
        assert_eq!(texts(out.gens()), ["y - 1"]);
    }

    #[test]
    fn saturation() {
        let r = ring(5, &["x", "y"], MonomialOrder::grevlex());
        let x = parse_poly(&r, "x").unwrap();
        let b = Budgets::default();
        assert_eq!(texts(saturate(&ideal(&r, &["x*y"]), &x, &b).unwrap().gens()), ["y"]);
        assert_eq!(texts(saturate(&ideal(&r, &["x^2"]), &x, &b).unwrap().gens()), ["1"]);
        assert_eq!(texts(saturate(&ideal(&r, &["x^2*(x - 1)"]), &x, &b).unwrap().gens()), ["x - 1"]);
    }

    #[test]
    fn intersections() {
        let r = ring(5, &["x", "y"], MonomialOrder::grevlex());
        let b = Budgets::default();
        assert_eq!(texts(intersect(&ideal(&r, &["x^2"]), &ideal(&r, &["x - 1"]), &b).unwrap().gens()), ["x^3 - x^2"]);
        let both = intersect(&ideal(&r, &["x"]), &ideal(&r, &["y"]), &b).unwrap();
        assert_eq!(texts(both.gens()), ["x*y"]);
        assert!(intersect(&ideal(&r, &["x"]), &Ideal::zero(&r), &b).unwrap().is_zero());
    }

    #[test]
    fn radicals() {
        let r = ring(3, &["x", "y"], MonomialOrder::grevlex());
        let b = Budgets::default();
        let p = |s| parse_poly(&r, s).unwrap();
        assert!(radical_membership(&p("x"), &ideal(&r, &["x^2"]), &b).unwrap());
        assert!(!radical_membership(&p("x"), &ideal(&r, &["y"]), &b).unwrap());
        assert!(radical_membership(&p("x + y"), &ideal(&r, &["x^2", "y^2"]), &b).unwrap());
    }

    #[test]
    fn budgets_are_reported() {
        let r = ring(5, &["x", "y", "z"], MonomialOrder::grevlex());
        let i = ideal(&r, &["x^3 - y*z", "x^2*y - x*z", "z^3 - x*y - 1"]);
        let tight = Budgets { max_pairs: 1, max_degree: 256 };
        assert_eq!(groebner_basis(&i, false, &tight).unwrap_err(), Error::BudgetExceeded(crate::error::Budget::Pairs));
        let shallow = Budgets { max_pairs: 1000, max_degree: 3 };
        assert!(groebner_basis(&i, false, &shallow).unwrap_err().is_budget());
    }
}
