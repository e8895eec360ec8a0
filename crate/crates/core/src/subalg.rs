//! Subalgebras of a presented algebra given by finitely many generators,
//! and the Frobenius image chain `B_n = R⟨g^{p^n}⟩`.
//!
//! Membership uses tag variables: in the ring `[ambient gens | tags, base]`
//! with the block order, the ideal `I_A + (yᵢ − gᵢ)` has a basis whose
//! normal forms are free of ambient generators exactly on the subalgebra.
//!
//! For `a = P(g)` with `P` having base coefficients, `a^{p^n} = P^{[p^n]}(g^{p^n})`
//! where `P^{[q]}` raises the base coefficients to the `q`-th power. So the
//! `R`-subalgebra generated by the `p^n`-th powers of the generators is
//! `R·A^{p^n}`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::corering::{MonomialOrder, Poly, PolyRing};
use crate::error::{Error, Result};
use crate::fpalg::{morphism_kernel, Morphism, Presentation, PresentationOptions};
use crate::groebner::{groebner_basis, Budgets, GroebnerBasis, Ideal};

#[derive(Clone, Debug)]
pub enum Membership {
    /// Witness polynomial in the tag ring ([`SubalgebraHandle::tag_ring`]).
    Yes(Poly),
    No,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Yes(_))
    }
}

#[derive(Clone)]
struct ElimCache {
    ring: Arc<PolyRing>,
    gb: GroebnerBasis,
}

#[derive(Clone)]
pub struct SubalgebraHandle {
    ambient: Arc<Presentation>,
    gens: Vec<Poly>,
    tags: Vec<String>,
    tag_ring: Arc<PolyRing>,
    cache: Option<ElimCache>,
}

impl core::fmt::Debug for SubalgebraHandle {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("R<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str(">")
    }
}

fn tag_names(ambient: &Presentation, k: usize) -> Vec<String> {
    crate::fpalg::fresh_names(ambient.ring().vars(), "y", k)
}

impl SubalgebraHandle {
    /// Generators are reduced; those that vanish are dropped. No
    /// elimination is done yet.
    pub fn lazy(ambient: &Arc<Presentation>, gens: Vec<Poly>) -> Result<Self> {
        let mut reduced = Vec::with_capacity(gens.len());
        for g in &gens {
            let r = ambient.reduce(g)?;
            if !r.is_zero() {
                reduced.push(r);
            }
        }
        let tags = tag_names(ambient, reduced.len());
        let tag_ring = Presentation::ambient_ring(ambient.base(), &tags)?;
        Ok(Self { ambient: ambient.clone(), gens: reduced, tags, tag_ring, cache: None })
    }

    /// Handle with its elimination basis built.
    pub fn new(ambient: &Arc<Presentation>, gens: Vec<Poly>, budgets: &Budgets) -> Result<Self> {
        let mut h = Self::lazy(ambient, gens)?;
        h.build_cache(budgets)?;
        Ok(h)
    }

    pub fn build_cache(&mut self, budgets: &Budgets) -> Result<()> {
        if self.cache.is_none() {
            self.cache = Some(self.compute_cache(budgets)?);
        }
        Ok(())
    }

    pub fn has_cache(&self) -> bool {
        self.cache.is_some()
    }

    fn compute_cache(&self, budgets: &Budgets) -> Result<ElimCache> {
        let a = &self.ambient;
        let n = a.ngens();
        let k = self.tags.len();
        let base = a.base_vars();
        let mut vars: Vec<String> = a.gens().to_vec();
        vars.extend(self.tags.iter().cloned());
        vars.extend(base.iter().cloned());
        let order = if n == 0 { MonomialOrder::grevlex() } else { MonomialOrder::block(n) };
        let ring = PolyRing::new(a.field(), vars, order)?;
        let from_ambient: Vec<usize> = (0..n).chain((0..base.len()).map(|j| n + k + j)).collect();
        let mut gens: Vec<Poly> = a.all_relations().iter().map(|r| r.relabel(&ring, &from_ambient)).collect();
        for (i, g) in self.gens.iter().enumerate() {
            gens.push(&Poly::var(&ring, n + i) - &g.relabel(&ring, &from_ambient));
        }
        let gb = groebner_basis(&Ideal::new(&ring, gens)?, false, budgets)?;
        Ok(ElimCache { ring, gb })
    }

    pub fn ambient(&self) -> &Arc<Presentation> {
        &self.ambient
    }

    pub fn generators(&self) -> &[Poly] {
        &self.gens
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    /// Polynomial ring over the base in the tag variables; witnesses live here.
    pub fn tag_ring(&self) -> &Arc<PolyRing> {
        &self.tag_ring
    }

    /// Decides `g ∈ S`. Without a cache one is computed for this call.
    pub fn member(&self, g: &Poly, budgets: &Budgets) -> Result<Membership> {
        let owned;
        let cache = match &self.cache {
            Some(c) => c,
            None => {
                owned = self.compute_cache(budgets)?;
                &owned
            }
        };
        let a = &self.ambient;
        let n = a.ngens();
        let k = self.tags.len();
        let g = a.reduce(g)?;
        let from_ambient: Vec<usize> = (0..n).chain((0..a.base_vars().len()).map(|j| n + k + j)).collect();
        let nf = cache.gb.reduce_in_ring(&g.relabel(&cache.ring, &from_ambient));
        let upper: u32 = (0..n).fold(0, |m, i| m | (1 << i));
        if nf.support() & upper != 0 {
            return Ok(Membership::No);
        }
        let to_tags: Vec<usize> = (0..cache.ring.nvars()).map(|i| i.saturating_sub(n)).collect();
        let witness = nf.relabel(&self.tag_ring, &to_tags);
        if !self.verify_witness(&g, &witness)? {
            return Err(Error::EngineFault(format!("membership witness `{witness}` does not evaluate back")));
        }
        Ok(Membership::Yes(witness))
    }

    /// Evaluates a witness at the generators.
    pub fn evaluate(&self, witness: &Poly) -> Result<Poly> {
        let a = &self.ambient;
        let w = witness.transport(&self.tag_ring)?;
        let mut images = self.gens.clone();
        for j in 0..a.base_vars().len() {
            images.push(Poly::var(a.ring(), a.ngens() + j));
        }
        a.reduce(&w.substitute(a.ring(), &images)?)
    }

    /// Whether `witness(gens) ≡ g` in the ambient algebra.
    pub fn verify_witness(&self, g: &Poly, witness: &Poly) -> Result<bool> {
        let value = self.evaluate(witness)?;
        self.ambient.equal(&value, g)
    }

    /// Presentation of `S` over the ambient base, with the inclusion into
    /// the ambient algebra. The inclusion is checked to be injective.
    pub fn presentation(&self, opts: &PresentationOptions) -> Result<(Arc<Presentation>, Morphism)> {
        let owned;
        let cache = match &self.cache {
            Some(c) => c,
            None => {
                owned = self.compute_cache(&opts.budgets)?;
                &owned
            }
        };
        let n = self.ambient.ngens();
        let lower: u32 = (n..cache.ring.nvars()).fold(0, |m, i| m | (1 << i));
        let to_tags: Vec<usize> = (0..cache.ring.nvars()).map(|i| i.saturating_sub(n)).collect();
        let bare = Presentation::new(self.ambient.base().clone(), self.tags.clone(), Vec::new(), opts)?;
        let mut rels = Vec::new();
        for g in cache.gb.elements() {
            if g.only_uses(lower) {
                let r = g.relabel(&self.tag_ring, &to_tags);
                if !bare.reduce(&r)?.is_zero() {
                    rels.push(r);
                }
            }
        }
        let pres = Arc::new(Presentation::new(self.ambient.base().clone(), self.tags.clone(), rels, opts)?);
        let incl = Morphism::new(pres.clone(), self.ambient.clone(), self.gens.clone())?;
        if !morphism_kernel(&incl, &opts.budgets)?.is_zero() {
            return Err(Error::EngineFault("subalgebra inclusion has a kernel".into()));
        }
        Ok((pres, incl))
    }

    /// Every generator of `self` lies in `other`.
    pub fn contained_in(&self, other: &SubalgebraHandle, budgets: &Budgets) -> Result<bool> {
        if !self.ambient.same_as(&other.ambient) {
            return Err(Error::Structure("subalgebras of different algebras".into()));
        }
        for g in &self.gens {
            if !other.member(g, budgets)?.is_member() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn subalgebra_member(s: &SubalgebraHandle, g: &Poly, budgets: &Budgets) -> Result<Membership> {
    s.member(g, budgets)
}

pub fn subalgebra_presentation(s: &SubalgebraHandle, opts: &PresentationOptions) -> Result<(Arc<Presentation>, Morphism)> {
    s.presentation(opts)
}

pub fn subalgebra_equal(s: &SubalgebraHandle, t: &SubalgebraHandle, budgets: &Budgets) -> Result<bool> {
    Ok(s.contained_in(t, budgets)? && t.contained_in(s, budgets)?)
}

/// The generators `x^{p^n}` of `B_n`, reduced.
pub fn frob_image_generators(a: &Presentation, n: u32) -> Result<Vec<Poly>> {
    let q = crate::fpalg::frobenius_exponent(a.characteristic(), n)?;
    (0..a.ngens()).map(|i| a.reduce(&a.gen(i).checked_pow(q as u64)?)).collect()
}

/// `B_n = R⟨x₁^{p^n}, …⟩ ⊆ A`, with its elimination basis built.
pub fn frob_image_subalgebra(a: &Arc<Presentation>, n: u32, budgets: &Budgets) -> Result<SubalgebraHandle> {
    SubalgebraHandle::new(a, frob_image_generators(a, n)?, budgets)
}

/// Same as [`frob_image_subalgebra`] but without building the cache.
pub fn frob_image_lazy(a: &Arc<Presentation>, n: u32) -> Result<SubalgebraHandle> {
    SubalgebraHandle::lazy(a, frob_image_generators(a, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corering::PrimeField;
    use crate::fpalg::Base;

    fn opts() -> PresentationOptions {
        PresentationOptions::default()
    }

    fn over(p: u32, gens: &[&str], rels: &[&str]) -> Arc<Presentation> {
        Arc::new(Presentation::over_field(PrimeField::new(p).unwrap(), gens, rels, &opts()).unwrap())
    }

    fn handle(a: &Arc<Presentation>, gens: &[&str]) -> SubalgebraHandle {
        let g = gens.iter().map(|s| a.parse(s).unwrap()).collect();
        SubalgebraHandle::new(a, g, &Budgets::default()).unwrap()
    }

    fn member(s: &SubalgebraHandle, g: &str) -> Membership {
        s.member(&s.ambient().parse(g).unwrap(), &Budgets::default()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let line3 = over(3, &["x"], &[]);
        assert!(!member(&handle(&line3, &["x^3"]), "x").is_member());

        let line2 = over(2, &["x"], &[]);
        let s = handle(&line2, &["x^2 + x"]);
        match member(&s, "x^2 + x") {
            Membership::Yes(w) => assert_eq!(w, Poly::var(s.tag_ring(), 0)),
            Membership::No => panic!("expected membership"),
        }

        let r = over(3, &["u"], &[]);
        let a = Arc::new(Presentation::from_text(Base::Algebra(r), &["x"], &["x^3 - x - u"], &opts()).unwrap());
        let b1 = frob_image_subalgebra(&a, 1, &Budgets::default()).unwrap();
        assert_eq!(b1.generators()[0], a.parse("x + u").unwrap());
        match member(&b1, "x") {
            Membership::Yes(w) => {
                assert_eq!(w, crate::corering::parse_poly(b1.tag_ring(), "y1 - u").unwrap());
            }
            Membership::No => panic!("x should lie in B_1"),
        }
        assert!(subalgebra_equal(&b1, &handle(&a, &["x"]), &Budgets::default()).unwrap());
    }

    #[test]
    fn presentations() {
        let o = opts();
        let line = over(5, &["x"], &[]);
        let (p, _) = handle(&line, &["x^2", "x^3"]).presentation(&o).unwrap();
        assert_eq!(p.relations().len(), 1);
        assert_eq!(p.relations()[0].monic(), p.parse("y1^3 - y2^2").unwrap().monic());
        let (p, incl) = handle(&line, &["x"]).presentation(&o).unwrap();
        assert!(p.relations().is_empty());
        assert_eq!(incl.images()[0], line.parse("x").unwrap());

        let cross = over(3, &["x", "y"], &["x*y"]);
        let b1 = frob_image_subalgebra(&cross, 1, &Budgets::default()).unwrap();
        let (p, _) = b1.presentation(&o).unwrap();
        assert_eq!(p.relations(), &[p.parse("y1*y2").unwrap()]);
    }

    #[test]
    fn equality() {
        let b = Budgets::default();
        let line = over(5, &["x"], &[]);
        assert!(subalgebra_equal(&handle(&line, &["x"]), &handle(&line, &["x + 1"]), &b).unwrap());
        assert!(!subalgebra_equal(&handle(&line, &["x^2"]), &handle(&line, &["x^3"]), &b).unwrap());
    }

    #[test]
    fn lazy_handles_compute_on_demand() {
        let line = over(3, &["x"], &[]);
        let s = SubalgebraHandle::lazy(&line, alloc::vec![line.parse("x^3").unwrap()]).unwrap();
        assert!(!s.has_cache());
        assert!(s.member(&line.parse("x^6 + 1").unwrap(), &Budgets::default()).unwrap().is_member());
    }
}
