//! Constructions on presentations: Frobenius twists and relative Frobenius,
//! kernels, tensor products, base change, schematic images and suprema.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{Base, Morphism, Presentation, PresentationOptions};
use crate::corering::{MonomialOrder, Poly, PolyRing};
use crate::error::{Error, Result};
use crate::groebner::{fresh_name_avoiding, groebner_basis, Budgets, Ideal};

/// `p^n` as an exponent, if it fits.
pub(crate) fn frobenius_exponent(p: u32, n: u32) -> Result<u32> {
    p.checked_pow(n).filter(|&q| q <= u16::MAX as u32).ok_or(Error::ExponentOverflow)
}

/// `k` names `stem0, stem1, ..` avoiding `taken`.
pub(crate) fn fresh_names(taken: &[String], stem: &str, k: usize) -> Vec<String> {
    let mut all: Vec<String> = taken.to_vec();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let name = fresh_name_avoiding(&all, &format!("{stem}{}", i + 1));
        all.push(name.clone());
        out.push(name);
    }
    out
}

/// `A^{(p^n)} = A ⊗_{R,Frob^n} R`: base coefficients raised to the `p^n`-th
/// power. Over 𝔽_p this is `A` itself.
pub fn frobenius_twist(a: &Presentation, n: u32, opts: &PresentationOptions) -> Result<Presentation> {
    if matches!(a.base(), Base::Field(_)) || n == 0 {
        return Ok(a.clone());
    }
    let q = frobenius_exponent(a.characteristic(), n)?;
    let mask = a.base_mask();
    let rels = a.relations().iter().map(|r| r.raise_variables(mask, q)).collect::<Result<Vec<_>>>()?;
    a.with_relations(rels, opts)
}

/// `Frob^n_{A/R}: A^{(p^n)} → A`, `x ↦ x^{p^n}`.
pub fn relative_frobenius(a: &Arc<Presentation>, n: u32, opts: &PresentationOptions) -> Result<Morphism> {
    let q = frobenius_exponent(a.characteristic(), n)?;
    let twist = Arc::new(frobenius_twist(a, n, opts)?);
    let images = (0..a.ngens()).map(|i| a.gen(i).pow(q as u64)).collect();
    Morphism::new(twist, a.clone(), images).map_err(|e| match e {
        Error::IllDefinedMorphism(r) => Error::EngineFault(format!("relative Frobenius does not kill `{r}`")),
        other => other,
    })
}

/// Generators of `ker φ`, in the source ring, each nonzero in the source.
/// The list is the reduced basis of the kernel modulo the source relations.
pub fn morphism_kernel(phi: &Morphism, budgets: &Budgets) -> Result<Ideal> {
    let src = phi.source();
    let tgt = phi.target();
    let nt = tgt.ngens();
    let ns = src.ngens();
    let base = src.base_vars().to_vec();

    let mut taken: Vec<String> = tgt.ring().vars().to_vec();
    taken.extend(src.gens().iter().cloned());
    let tags = fresh_names(&taken, "_k", ns);
    let mut vars: Vec<String> = tgt.gens().to_vec();
    vars.extend(tags);
    vars.extend(base.iter().cloned());
    let order = if nt == 0 { MonomialOrder::grevlex() } else { MonomialOrder::block(nt) };
    let ring = PolyRing::new(src.field(), vars, order)?;

    let from_target: Vec<usize> = (0..nt).chain((0..base.len()).map(|k| nt + ns + k)).collect();
    let mut gens: Vec<Poly> = tgt.all_relations().iter().map(|r| r.relabel(&ring, &from_target)).collect();
    for (i, img) in phi.images().iter().enumerate() {
        let tag = Poly::var(&ring, nt + i);
        gens.push(&tag - &img.relabel(&ring, &from_target));
    }
    let gb = groebner_basis(&Ideal::new(&ring, gens)?, false, budgets)?;

    let lower: u32 = (nt..ring.nvars()).fold(0, |m, i| m | (1 << i));
    let to_source: Vec<usize> = (0..ring.nvars()).map(|i| i.saturating_sub(nt)).collect();
    let mut found = Vec::new();
    for g in gb.elements() {
        if g.only_uses(lower) {
            let h = src.reduce(&g.relabel(src.ring(), &to_source))?;
            if !h.is_zero() {
                found.push(h);
            }
        }
    }
    canonical_kernel(src, found, budgets)
}

/// Reduced basis of `(I_src + found)`, minus what already lies in `I_src`.
fn canonical_kernel(src: &Presentation, found: Vec<Poly>, budgets: &Budgets) -> Result<Ideal> {
    if found.is_empty() {
        return Ok(Ideal::zero(src.ring()));
    }
    let mut all = src.all_relations();
    all.extend(found);
    let gb = groebner_basis(&Ideal::new(src.ring(), all)?, false, budgets)?;
    let mut out = Vec::new();
    for g in gb.elements() {
        if !src.reduce(g)?.is_zero() {
            out.push(g.clone());
        }
    }
    Ideal::new(src.ring(), out)
}

pub struct TensorProduct {
    pub algebra: Arc<Presentation>,
    pub left: Morphism,
    pub right: Morphism,
    /// Generators of the right factor that were renamed: (old, new).
    pub renamed: Vec<(String, String)>,
}

/// `A ⊗_R B`; clashing generator names of `B` get numeric suffixes.
pub fn tensor_over_base(a: &Arc<Presentation>, b: &Arc<Presentation>, opts: &PresentationOptions) -> Result<TensorProduct> {
    if !a.base().same(b.base()) {
        return Err(Error::Structure("tensor product needs a common base".into()));
    }
    let mut taken: Vec<String> = a.ring().vars().to_vec();
    let mut renamed = Vec::new();
    let mut bnames = Vec::with_capacity(b.ngens());
    for g in b.gens() {
        let clash = taken.contains(g) || b.gens().iter().filter(|h| *h == g).count() > 1;
        let name = if clash { fresh_name_avoiding(&taken, g) } else { g.clone() };
        if &name != g {
            renamed.push((g.clone(), name.clone()));
        }
        taken.push(name.clone());
        bnames.push(name);
    }
    let mut gens = a.gens().to_vec();
    gens.extend(bnames.iter().cloned());
    let ring = Presentation::ambient_ring(a.base(), &gens)?;
    let mut rels: Vec<Poly> = a.relations().iter().map(|r| r.transport(&ring)).collect::<Result<_>>()?;
    let bmap: Vec<usize> = (0..b.ring().nvars())
        .map(|i| if i < b.ngens() { a.ngens() + i } else { ring.var_index(&b.ring().vars()[i]).unwrap() })
        .collect();
    rels.extend(b.relations().iter().map(|r| r.relabel(&ring, &bmap)));
    let algebra = Arc::new(Presentation::new(a.base().clone(), gens, rels, &PresentationOptions { allow_zero: true, ..*opts })?);
    let left = Morphism::unchecked(a.clone(), algebra.clone(), (0..a.ngens()).map(|i| algebra.gen(i)).collect())?;
    let right = Morphism::unchecked(
        b.clone(),
        algebra.clone(),
        (0..b.ngens()).map(|i| algebra.gen(a.ngens() + i)).collect(),
    )?;
    Ok(TensorProduct { algebra, left, right, renamed })
}

/// `A ⊗_{R,ψ} R'` for `ψ: R → R'`: same generators, base coefficients
/// pushed through `ψ`.
pub fn base_change(a: &Presentation, psi: &Morphism, opts: &PresentationOptions) -> Result<Presentation> {
    let r = a
        .base_algebra()
        .ok_or_else(|| Error::Precondition("an algebra over a presented base".into()))?;
    if !r.same_as(psi.source()) {
        return Err(Error::Structure("base change map does not start at the base".into()));
    }
    let new_base = Base::Algebra(psi.target().clone());
    let ring = Presentation::ambient_ring(&new_base, a.gens())?;
    let mut images: Vec<Poly> = (0..a.ngens()).map(|i| Poly::var(&ring, i)).collect();
    for img in psi.images() {
        images.push(img.transport(&ring)?);
    }
    let rels = a.relations().iter().map(|f| f.substitute(&ring, &images)).collect::<Result<Vec<_>>>()?;
    Presentation::new(new_base, a.gens().to_vec(), rels, &PresentationOptions { allow_zero: true, ..*opts })
}

pub struct ImageFactorization {
    pub image: Arc<Presentation>,
    pub surjection: Morphism,
    pub inclusion: Morphism,
    pub kernel: Ideal,
}

/// Factors `φ` as `source ↠ source/ker φ ↪ target`.
pub fn schematic_image(phi: &Morphism, opts: &PresentationOptions) -> Result<ImageFactorization> {
    let kernel = morphism_kernel(phi, &opts.budgets)?;
    let src = phi.source();
    let mut rels = src.relations().to_vec();
    rels.extend(kernel.gens().iter().cloned());
    let image = Arc::new(src.with_relations(rels, &PresentationOptions { allow_zero: true, ..*opts })?);
    let surjection = Morphism::unchecked(src.clone(), image.clone(), (0..src.ngens()).map(|i| image.gen(i)).collect())?;
    let inclusion = Morphism::new(image.clone(), phi.target().clone(), phi.images().to_vec())?;
    if !morphism_kernel(&inclusion, &opts.budgets)?.is_zero() {
        return Err(Error::EngineFault("induced map from the image is not injective".into()));
    }
    Ok(ImageFactorization { image, surjection, inclusion, kernel })
}

pub struct SupFactorization {
    pub algebra: Arc<Presentation>,
    pub to_target: Morphism,
    pub from_left: Morphism,
    pub from_right: Morphism,
}

/// The smallest factorization of `A` through which both `φ₁` and `φ₂`
/// factor: the image of `E₁ ⊗_R E₂ → A`.
pub fn sup_factorization(phi1: &Morphism, phi2: &Morphism, opts: &PresentationOptions) -> Result<SupFactorization> {
    if !phi1.target().same_as(phi2.target()) {
        return Err(Error::Structure("both factorizations must map to the same algebra".into()));
    }
    let t = tensor_over_base(phi1.source(), phi2.source(), opts)?;
    let mut images = phi1.images().to_vec();
    images.extend(phi2.images().iter().cloned());
    let psi = Morphism::new(t.algebra.clone(), phi1.target().clone(), images)?;
    let im = schematic_image(&psi, opts)?;
    Ok(SupFactorization {
        algebra: im.image.clone(),
        to_target: im.inclusion,
        from_left: t.left.then(&im.surjection)?,
        from_right: t.right.then(&im.surjection)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::corering::PrimeField;

    fn opts() -> PresentationOptions {
        PresentationOptions::default()
    }

    fn over(p: u32, gens: &[&str], rels: &[&str]) -> Arc<Presentation> {
        Arc::new(Presentation::over_field(PrimeField::new(p).unwrap(), gens, rels, &opts()).unwrap())
    }

    fn over_base(r: &Arc<Presentation>, gens: &[&str], rels: &[&str]) -> Arc<Presentation> {
        Arc::new(Presentation::from_text(Base::Algebra(r.clone()), gens, rels, &opts()).unwrap())
    }

    fn texts(i: &Ideal) -> Vec<String> {
        i.gens().iter().map(|g| format!("{g}")).collect()
    }

    #[test]
    fn twists() {
        let r = over(3, &["u"], &[]);
        let a = over_base(&r, &["x"], &["x^3 - x - u"]);
        let t = frobenius_twist(&a, 1, &opts()).unwrap();
        assert_eq!(t.relations()[0], t.parse("x^3 - x - u^3").unwrap());
        let r5 = over(5, &["u"], &[]);
        let a5 = over_base(&r5, &["x"], &["x^2 - u"]);
        let t5 = frobenius_twist(&a5, 1, &opts()).unwrap();
        assert_eq!(t5.relations()[0], t5.parse("x^2 - u^5").unwrap());
        let plain = over(3, &["x"], &["x^2 + 1"]);
        assert!(frobenius_twist(&plain, 2, &opts()).unwrap().same_as(&plain));
    }

    #[test]
    fn relative_frobenius_images() {
        let r = over(3, &["u"], &[]);
        let a = over_base(&r, &["x"], &["x^3 - x - u"]);
        let f = relative_frobenius(&a, 1, &opts()).unwrap();
        assert_eq!(f.images()[0], a.parse("x + u").unwrap());
        let line = over(3, &["x"], &[]);
        let f2 = relative_frobenius(&line, 2, &opts()).unwrap();
        assert_eq!(f2.images()[0], line.parse("x^9").unwrap());
    }

    #[test]
    fn kernels() {
        let b = Budgets::default();
        let src = over(7, &["a", "b"], &[]);
        let tgt = over(7, &["x"], &[]);
        let cusp = Morphism::from_text(src.clone(), tgt.clone(), &["x^2", "x^3"]).unwrap();
        let k = morphism_kernel(&cusp, &b).unwrap();
        assert_eq!(k.gens().len(), 1);
        assert_eq!(k.gens()[0].monic(), src.parse("a^3 - b^2").unwrap().monic());

        let r = over(3, &["u"], &[]);
        let a = over_base(&r, &["x"], &["x^3 - x - u"]);
        assert!(morphism_kernel(&relative_frobenius(&a, 1, &opts()).unwrap(), &b).unwrap().is_zero());

        let line = over(3, &["x"], &[]);
        let pt = over(3, &[], &[]);
        let zero = Morphism::new(line.clone(), pt.clone(), vec![Poly::zero(pt.ring())]).unwrap();
        assert_eq!(texts(&morphism_kernel(&zero, &b).unwrap()), ["x"]);
    }

    #[test]
    fn tensor_products() {
        let a = over(2, &["x"], &["x^2 + x"]);
        let b = over(2, &["x"], &["x^2 + x"]);
        let t = tensor_over_base(&a, &b, &opts()).unwrap();
        assert_eq!(t.renamed, vec![(String::from("x"), String::from("x1"))]);
        assert_eq!(t.algebra.gens(), ["x", "x1"]);
        let r = over(3, &["u"], &[]);
        let rr = Arc::new(Presentation::base_as_algebra(&r, &opts()).unwrap());
        let a3 = over_base(&r, &["x"], &["x^2 - u"]);
        let unit = tensor_over_base(&rr, &a3, &opts()).unwrap();
        assert!(unit.algebra.same_as(&a3));
    }

    #[test]
    fn base_changes() {
        let r = over(5, &["u"], &[]);
        let a = over_base(&r, &["x"], &["x^2 - u"]);
        let r1 = over(5, &["w"], &["w"]);
        let to_zero = Morphism::from_text(r.clone(), r1.clone(), &["0"]).unwrap();
        let fibre = base_change(&a, &to_zero, &opts()).unwrap();
        assert_eq!(fibre.relations()[0], fibre.parse("x^2").unwrap());
        let frob = Morphism::from_text(r.clone(), r.clone(), &["u^5"]).unwrap();
        assert!(base_change(&a, &frob, &opts()).unwrap().same_as(&frobenius_twist(&a, 1, &opts()).unwrap()));
    }

    #[test]
    fn images_and_sups() {
        let o = opts();
        let src = over(5, &["a"], &[]);
        let tgt = over(5, &["x"], &["x^2"]);
        let m = Morphism::from_text(src, tgt, &["x"]).unwrap();
        let im = schematic_image(&m, &o).unwrap();
        assert_eq!(im.image.relations()[0], im.image.parse("a^2").unwrap());

        let a = over(5, &["x", "y"], &["x*y", "x + y - 1"]);
        let e = over(5, &["e"], &["e^2 - e"]);
        let p1 = Morphism::from_text(e.clone(), a.clone(), &["x"]).unwrap();
        let p2 = Morphism::from_text(e, a, &["y"]).unwrap();
        let sup = sup_factorization(&p1, &p2, &o).unwrap();
        assert_eq!(sup.algebra.gens(), ["e", "e1"]);
        assert!(sup.algebra.is_zero(&sup.algebra.parse("e + e1 - 1").unwrap()).unwrap());
        assert!(!sup.algebra.is_zero(&sup.algebra.parse("e").unwrap()).unwrap());
    }
}
