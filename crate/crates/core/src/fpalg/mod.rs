//! Finitely presented algebras over 𝔽_p or over a finitely presented
//! 𝔽_p-algebra, and morphisms between them.
//!
//! A presentation `Base[x₁..x_n]/(f₁..f_m)` lives in the polynomial ring
//! with variables `[x₁..x_n, base vars]`. When the base has variables the
//! order is the block order with the generators on top, so that elements
//! of the base are exactly the normal forms free of generators.

mod ops;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::corering::{parse_poly, same_ring, MonomialOrder, Poly, PolyRing, PrimeField};
use crate::error::{Error, Result};
use crate::groebner::{groebner_basis, Budgets, GroebnerBasis, Ideal};

pub(crate) use ops::{frobenius_exponent, fresh_names};
pub use ops::{
    base_change, frobenius_twist, morphism_kernel, relative_frobenius, schematic_image, sup_factorization,
    tensor_over_base, ImageFactorization, SupFactorization, TensorProduct,
};

#[derive(Clone)]
pub enum Base {
    Field(PrimeField),
    Algebra(Arc<Presentation>),
}

#[derive(Clone)]
pub struct Presentation {
    base: Base,
    gens: Vec<String>,
    ring: Arc<PolyRing>,
    /// Algebra relations only; base relations are kept by the base.
    relations: Vec<Poly>,
    gb: GroebnerBasis,
}

impl core::fmt::Debug for Presentation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}[{}]/(", self.base_label(), self.gens.join(", "))?;
        for (i, r) in self.relations.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

impl Base {
    pub fn field(&self) -> PrimeField {
        match self {
            Base::Field(f) => *f,
            Base::Algebra(a) => a.field(),
        }
    }

    pub fn vars(&self) -> &[String] {
        match self {
            Base::Field(_) => &[],
            Base::Algebra(a) => a.gens(),
        }
    }

    fn same(&self, other: &Base) -> bool {
        match (self, other) {
            (Base::Field(a), Base::Field(b)) => a == b,
            (Base::Algebra(a), Base::Algebra(b)) => Arc::ptr_eq(a, b) || a.same_as(b),
            _ => false,
        }
    }
}

/// Options for building a presentation.
#[derive(Debug, Clone, Copy, Default)]
pub struct PresentationOptions {
    pub allow_zero: bool,
    pub budgets: Budgets,
}

impl Presentation {
    /// The polynomial ring a presentation with these generators lives in.
    pub fn ambient_ring(base: &Base, gens: &[String]) -> Result<Arc<PolyRing>> {
        let bvars = base.vars();
        if let Some(g) = gens.iter().find(|g| bvars.contains(g)) {
            return Err(Error::Structure(format!("generator `{g}` clashes with a base variable")));
        }
        let mut vars: Vec<String> = gens.to_vec();
        vars.extend(bvars.iter().cloned());
        let order = if bvars.is_empty() || gens.is_empty() {
            MonomialOrder::grevlex()
        } else {
            MonomialOrder::block(gens.len())
        };
        PolyRing::new(base.field(), vars, order)
    }

    /// Builds `base[gens]/(relations)`. Relations must live in
    /// [`Presentation::ambient_ring`] (or transport into it by name).
    pub fn new(base: Base, gens: Vec<String>, relations: Vec<Poly>, opts: &PresentationOptions) -> Result<Self> {
        if let Base::Algebra(b) = &base {
            if !matches!(b.base, Base::Field(_)) {
                return Err(Error::Precondition("a base presented directly over 𝔽_p (nesting depth 2)".into()));
            }
        }
        let ring = Self::ambient_ring(&base, &gens)?;
        let relations: Vec<Poly> = relations
            .iter()
            .map(|r| r.transport(&ring))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|r| !r.is_zero())
            .collect();
        let mut all = relations.clone();
        if let Base::Algebra(b) = &base {
            for r in b.all_relations() {
                all.push(r.transport(&ring)?);
            }
        }
        let gb = groebner_basis(&Ideal::new(&ring, all)?, false, &opts.budgets)?;
        if gb.is_unit() && !opts.allow_zero {
            return Err(Error::ZeroAlgebra);
        }
        Ok(Self { base, gens, ring, relations, gb })
    }

    /// `𝔽_p[gens]/(relations)` from polynomial text.
    pub fn over_field(p: PrimeField, gens: &[&str], relations: &[&str], opts: &PresentationOptions) -> Result<Self> {
        Self::from_text(Base::Field(p), gens, relations, opts)
    }

    /// `base[gens]/(relations)` from polynomial text.
    pub fn from_text(base: Base, gens: &[&str], relations: &[&str], opts: &PresentationOptions) -> Result<Self> {
        let gens: Vec<String> = gens.iter().map(|g| String::from(*g)).collect();
        let ring = Self::ambient_ring(&base, &gens)?;
        let rels = relations.iter().map(|r| parse_poly(&ring, r)).collect::<Result<Vec<_>>>()?;
        Self::new(base, gens, rels, opts)
    }

    /// The base itself, as an algebra over itself with no generators.
    pub fn base_as_algebra(base: &Arc<Presentation>, opts: &PresentationOptions) -> Result<Self> {
        Self::new(Base::Algebra(base.clone()), Vec::new(), Vec::new(), opts)
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn base_algebra(&self) -> Option<&Arc<Presentation>> {
        match &self.base {
            Base::Algebra(b) => Some(b),
            Base::Field(_) => None,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.ring.field()
    }

    pub fn characteristic(&self) -> u32 {
        self.field().characteristic()
    }

    pub fn gens(&self) -> &[String] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn base_vars(&self) -> &[String] {
        self.base.vars()
    }

    /// Bit mask of the base variables inside [`Presentation::ring`].
    pub fn base_mask(&self) -> u32 {
        let n = self.gens.len();
        (n..self.ring.nvars()).fold(0, |m, i| m | (1 << i))
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    /// Algebra relations followed by base relations, all in [`Presentation::ring`].
    pub fn all_relations(&self) -> Vec<Poly> {
        let mut out = self.relations.clone();
        if let Base::Algebra(b) = &self.base {
            out.extend(b.all_relations().iter().map(|r| r.transport(&self.ring).expect("base vars are ambient")));
        }
        out
    }

    pub fn groebner(&self) -> &GroebnerBasis {
        &self.gb
    }

    pub fn is_zero_algebra(&self) -> bool {
        self.gb.is_unit()
    }

    fn base_label(&self) -> String {
        match &self.base {
            Base::Field(f) => format!("GF({})", f.characteristic()),
            Base::Algebra(b) => format!("{b:?}"),
        }
    }

    /// Structural equality: same base, generator names and relations.
    pub fn same_as(&self, other: &Presentation) -> bool {
        self.base.same(&other.base)
            && self.gens == other.gens
            && same_ring(&self.ring, &other.ring)
            && self.relations == other.relations
    }

    pub fn parse(&self, text: &str) -> Result<Poly> {
        parse_poly(&self.ring, text)
    }

    pub fn gen(&self, i: usize) -> Poly {
        Poly::var(&self.ring, i)
    }

    /// Canonical representative of an element.
    pub fn reduce(&self, f: &Poly) -> Result<Poly> {
        self.gb.normal_form(f)
    }

    pub fn is_zero(&self, f: &Poly) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }

    pub fn equal(&self, a: &Poly, b: &Poly) -> Result<bool> {
        self.is_zero(&a.transport(&self.ring)?.checked_sub(&b.transport(&self.ring)?)?)
    }

    /// Whether a (reduced) element lies in the image of the base.
    pub fn is_base_element(&self, f: &Poly) -> Result<bool> {
        Ok(self.reduce(f)?.only_uses(self.base_mask()))
    }

    /// Same generators and base, different relations.
    pub fn with_relations(&self, relations: Vec<Poly>, opts: &PresentationOptions) -> Result<Self> {
        Self::new(self.base.clone(), self.gens.clone(), relations, opts)
    }
}

/// A map of presentations over a common base, given by the images of the
/// source generators. Base variables map to themselves.
#[derive(Clone)]
pub struct Morphism {
    source: Arc<Presentation>,
    target: Arc<Presentation>,
    images: Vec<Poly>,
}

impl core::fmt::Debug for Morphism {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("{")?;
        for (i, (g, im)) in self.source.gens.iter().zip(&self.images).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g} -> {im}")?;
        }
        f.write_str("}")
    }
}

impl Morphism {
    /// Checks that the bases agree and every source relation maps to zero.
    pub fn new(source: Arc<Presentation>, target: Arc<Presentation>, images: Vec<Poly>) -> Result<Self> {
        let m = Self::unchecked(source, target, images)?;
        for r in m.source.relations() {
            if !m.apply(r)?.is_zero() {
                return Err(Error::IllDefinedMorphism(format!("{r}")));
            }
        }
        Ok(m)
    }

    pub fn from_text(source: Arc<Presentation>, target: Arc<Presentation>, images: &[&str]) -> Result<Self> {
        let polys = images.iter().map(|s| target.parse(s)).collect::<Result<Vec<_>>>()?;
        Self::new(source, target, polys)
    }

    pub(crate) fn unchecked(source: Arc<Presentation>, target: Arc<Presentation>, images: Vec<Poly>) -> Result<Self> {
        if !source.base.same(&target.base) {
            return Err(Error::Structure("morphism between algebras over different bases".into()));
        }
        if images.len() != source.ngens() {
            return Err(Error::Structure(format!(
                "morphism needs {} generator images, got {}",
                source.ngens(),
                images.len()
            )));
        }
        let images = images
            .iter()
            .map(|g| target.reduce(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { source, target, images })
    }

    pub fn identity(a: &Arc<Presentation>) -> Self {
        let images = (0..a.ngens()).map(|i| a.gen(i)).collect();
        Self { source: a.clone(), target: a.clone(), images }
    }

    pub fn source(&self) -> &Arc<Presentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presentation> {
        &self.target
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    /// Substitution images for every variable of the source ring.
    pub(crate) fn full_images(&self) -> Vec<Poly> {
        let mut out = self.images.clone();
        let n = self.target.ngens();
        for k in 0..self.source.base_vars().len() {
            out.push(Poly::var(&self.target.ring, n + k));
        }
        out
    }

    /// Image of a source element, reduced in the target.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        let f = f.transport(&self.source.ring)?;
        let raw = f.substitute(&self.target.ring, &self.full_images())?;
        self.target.reduce(&raw)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        if !self.target.same_as(&other.source) {
            return Err(Error::Structure("morphisms are not composable".into()));
        }
        let images = self.images.iter().map(|g| other.apply(g)).collect::<Result<Vec<_>>>()?;
        Morphism::unchecked(self.source.clone(), other.target.clone(), images)
    }

    /// Agreement on generators (both sides reduced).
    pub fn agrees_with(&self, other: &Morphism) -> bool {
        self.source.same_as(&other.source) && self.target.same_as(&other.target) && self.images == other.images
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn zero_algebra_is_rejected_unless_allowed() {
        let opts = PresentationOptions::default();
        assert_eq!(Presentation::over_field(f(3), &["x"], &["1"], &opts).unwrap_err(), Error::ZeroAlgebra);
        let allow = PresentationOptions { allow_zero: true, ..opts };
        assert!(Presentation::over_field(f(3), &["x"], &["x", "x - 1"], &allow).unwrap().is_zero_algebra());
    }

    #[test]
    fn nesting_and_name_clashes() {
        let opts = PresentationOptions::default();
        let r = Arc::new(Presentation::over_field(f(3), &["u", "v"], &["u*v"], &opts).unwrap());
        assert!(Presentation::from_text(Base::Algebra(r.clone()), &["u"], &[], &opts).is_err());
        let a = Arc::new(Presentation::from_text(Base::Algebra(r), &["x"], &["x^2 - u"], &opts).unwrap());
        let err = Presentation::from_text(Base::Algebra(a), &["y"], &[], &opts).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn base_elements_are_generator_free_normal_forms() {
        let opts = PresentationOptions::default();
        let r = Arc::new(Presentation::over_field(f(3), &["u"], &[], &opts).unwrap());
        let a = Presentation::from_text(Base::Algebra(r), &["x"], &["x^3 - x - u"], &opts).unwrap();
        assert!(a.is_base_element(&a.parse("x^3 - x").unwrap()).unwrap());
        assert!(!a.is_base_element(&a.parse("x^3").unwrap()).unwrap());
    }

    #[test]
    fn ill_defined_morphisms_fail_eagerly() {
        let opts = PresentationOptions::default();
        let a = Arc::new(Presentation::over_field(f(5), &["a"], &["a^2"], &opts).unwrap());
        let b = Arc::new(Presentation::over_field(f(5), &["x"], &[], &opts).unwrap());
        let err = Morphism::from_text(a.clone(), b.clone(), &["x"]).unwrap_err();
        assert!(matches!(err, Error::IllDefinedMorphism(_)));
        let c = Arc::new(Presentation::over_field(f(5), &["x"], &["x^2"], &opts).unwrap());
        let m = Morphism::from_text(a, c, &["x"]).unwrap();
        assert_eq!(m.images(), &[Poly::var(m.target().ring(), 0)]);
        assert!(Morphism::from_text(b.clone(), b, &["x", "x"]).is_err());
    }
}
