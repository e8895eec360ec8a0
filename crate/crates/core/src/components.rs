//! Connected components of `Spec A` for `A` over 𝔽_p, as a complete system
//! of orthogonal idempotents, and orbits of finite graphs.
//!
//! The relation ideal is split into pieces whose zero sets cover `V(I)`:
//! factors of univariate eliminants and saturations by variables. Pieces
//! that are not comaximal are merged. Each cluster gets an idempotent from
//! a cofactor expression of `1`, lifted by `e ↦ 3e² − 2e³` modulo `I`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::corering::{univariate_factor, MonomialOrder, Poly};
use crate::error::{Budget, Error, Result};
use crate::fpalg::{Base, Morphism, Presentation, PresentationOptions};
use crate::groebner::{
    eliminate, groebner_basis, ideals_equal, intersect, saturate, Budgets, GroebnerBasis, Ideal,
};

/// Disjoint sets with path halving and union by rank.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    /// Adds a singleton and returns it.
    pub fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.rank.push(0);
        self.parent.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns whether the two classes were distinct.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            core::cmp::Ordering::Less => self.parent[ra] = rb,
            core::cmp::Ordering::Greater => self.parent[rb] = ra,
            core::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Classes with sorted members, ordered by smallest member.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(x);
        }
        out
    }
}

/// Orbits of the equivalence relation generated by `s(r) ~ t(r)` on
/// `0..objects`.
pub fn groupoid_pi0(objects: usize, arrows: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    let mut uf = UnionFind::new(objects);
    for &(s, t) in arrows {
        if s >= objects || t >= objects {
            return Err(Error::Structure(format!("arrow {s} -> {t} leaves the object set")));
        }
        uf.union(s, t);
    }
    Ok(uf.classes())
}

/// `e` with `e ≡ 0 mod I` and `e ≡ 1 mod J`, from a cofactor-tracked basis
/// of `I + J` whose first `from_i` generators come from `I`.
pub fn idempotent_from_basis(gb: &GroebnerBasis, from_i: usize) -> Result<Poly> {
    if gb.cofactors().is_none() {
        return Err(Error::CofactorsRequired);
    }
    if !gb.is_unit() {
        return Err(Error::NotComaximal);
    }
    let coeffs = gb.lift(&Poly::one(gb.ring()))?.ok_or_else(|| Error::EngineFault("1 does not lift".into()))?;
    let mut a = Poly::zero(gb.ring());
    for (c, g) in coeffs.iter().zip(gb.generators()).take(from_i) {
        a = a.checked_add(&c.checked_mul(g)?)?;
    }
    Ok(a)
}

/// The idempotent of `A/(I ∩ J)` that is `0` on `I` and `1` on `J`, as the
/// normal form modulo `I ∩ J`.
pub fn idempotent_from_comaximal(i: &Ideal, j: &Ideal, budgets: &Budgets) -> Result<Poly> {
    let j = j.transport(i.ring())?;
    let gb = groebner_basis(&i.sum(&j)?, true, budgets)?;
    let a = idempotent_from_basis(&gb, i.gens().len())?;
    let meet = groebner_basis(&intersect(i, &j, budgets)?, false, budgets)?;
    meet.normal_form(&a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitConfig {
    pub budgets: Budgets,
    pub max_depth: u32,
    pub max_pieces: usize,
    pub max_newton_steps: u32,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { budgets: Budgets::default(), max_depth: 8, max_pieces: 32, max_newton_steps: 32, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct Component {
    /// `I + (1 − e)`, as a reduced basis.
    pub ideal: Ideal,
    pub idempotent: Poly,
    /// Pieces of the splitting merged into this component.
    pub pieces: usize,
    /// Every piece was recognised as connected, so the component is.
    pub connected_certified: bool,
}

#[derive(Clone, Debug)]
pub struct ComponentDecomposition {
    pub algebra: Arc<Presentation>,
    pub components: Vec<Component>,
    /// The idempotent axioms were verified by normal forms.
    pub disjoint_certified: bool,
    /// No budget ran out while splitting or merging.
    pub complete: bool,
}

impl ComponentDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn idempotents(&self) -> Vec<Poly> {
        self.components.iter().map(|c| c.idempotent.clone()).collect()
    }

    /// Whether the decomposition is known to be the true `π₀`.
    pub fn is_exact(&self) -> bool {
        self.disjoint_certified && self.complete && self.components.iter().all(|c| c.connected_certified)
    }
}

struct Splitter<'a> {
    cfg: &'a SplitConfig,
    pieces: Vec<Ideal>,
    exhausted: bool,
}

fn budget_or<T>(r: Result<T>, flag: &mut bool) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::BudgetExceeded(_)) => {
            *flag = true;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

impl Splitter<'_> {
    fn split(&mut self, q: Ideal, depth: u32) -> Result<()> {
        let b = &self.cfg.budgets;
        let Some(gb) = budget_or(groebner_basis(&q, false, b), &mut self.exhausted)? else {
            self.pieces.push(q);
            return Ok(());
        };
        if gb.is_unit() {
            return Ok(());
        }
        let mut q = gb.ideal();
        if depth >= self.cfg.max_depth || self.pieces.len() + 1 >= self.cfg.max_pieces {
            self.exhausted = true;
            self.pieces.push(q);
            return Ok(());
        }
        let ring = q.ring().clone();
        for j in 0..ring.nvars() {
            let Some(elim) = budget_or(eliminate(&q, &[j], b), &mut self.exhausted)? else { continue };
            let Some(g) = elim.gens().first() else { continue };
            let fac = univariate_factor(g, self.cfg.seed)?;
            if fac.factors.len() >= 2 {
                for (f, _) in fac.factors {
                    self.split(q.with_generator(f)?, depth + 1)?;
                }
                return Ok(());
            }
            if let [(f, m)] = &fac.factors[..] {
                if *m > 1 {
                    q = q.with_generator(f.clone())?;
                }
            }
        }
        for j in 0..ring.nvars() {
            let x = Poly::var(&ring, j);
            let Some(s) = budget_or(saturate(&q, &x, b), &mut self.exhausted)? else { continue };
            if s.gens().iter().any(|g| g.is_constant()) {
                q = q.with_generator(x)?;
                continue;
            }
            let Some(same) = budget_or(ideals_equal(&q, &s, b), &mut self.exhausted)? else { continue };
            if same {
                continue;
            }
            let t = q.with_generator(x)?;
            let Some(tg) = budget_or(groebner_basis(&t, false, b), &mut self.exhausted)? else { continue };
            if tg.is_unit() {
                q = s;
                continue;
            }
            self.split(t, depth + 1)?;
            return self.split(s, depth + 1);
        }
        self.pieces.push(q);
        Ok(())
    }
}

/// `A/Q` is visibly connected: in some lex order the reduced basis (with a
/// univariate element replaced by its square-free part) has linear leading
/// terms except possibly one irreducible polynomial in the last variable.
fn piece_is_connected(q: &Ideal, cfg: &SplitConfig) -> Result<bool> {
    let ring = q.ring();
    let n = ring.nvars();
    if q.is_zero() {
        return Ok(true);
    }
    for last in (0..n).rev() {
        let perm: Vec<usize> = (0..n).filter(|&i| i != last).chain(core::iter::once(last)).collect();
        let lex = ring.with_order(MonomialOrder::lex().with_permutation(&perm)?);
        let mut gens: Vec<Poly> = q.gens().iter().map(|g| g.transport(&lex)).collect::<Result<_>>()?;
        let gb = match groebner_basis(&Ideal::new(&lex, gens.clone())?, false, &cfg.budgets) {
            Ok(g) => g,
            Err(Error::BudgetExceeded(_)) => continue,
            Err(e) => return Err(e),
        };
        if let Some(u) = gb.elements().iter().find(|g| g.univariate_var() == Some(last)) {
            let fac = univariate_factor(u, cfg.seed)?;
            if fac.factors.len() != 1 {
                continue;
            }
            gens.push(fac.factors[0].0.clone());
        }
        let gb = match groebner_basis(&Ideal::new(&lex, gens)?, false, &cfg.budgets) {
            Ok(g) => g,
            Err(Error::BudgetExceeded(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut nonlinear = 0;
        let mut ok = true;
        for g in gb.elements() {
            let lm = g.leading_monomial().expect("basis elements are nonzero");
            if lm.degree() == 1 {
                continue;
            }
            nonlinear += 1;
            if g.univariate_var() != Some(last) || univariate_factor(g, cfg.seed)?.factors.len() != 1 {
                ok = false;
            }
        }
        if ok && nonlinear <= 1 {
            return Ok(true);
        }
    }
    Ok(false)
}

fn sort_key(f: &Poly) -> (usize, u32, String) {
    (f.terms().len(), f.degree().unwrap_or(0), f.to_text())
}

/// The representative of `e` with fewest terms among normal forms under
/// grevlex orders with the generators permuted.
fn simplest_representative(a: &Presentation, e: &Poly, budgets: &Budgets) -> Result<Poly> {
    let n = a.ngens();
    let mut perms: Vec<Vec<usize>> = Vec::new();
    if n <= 4 {
        let mut p: Vec<usize> = (0..n).collect();
        loop {
            perms.push(p.clone());
            let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
            let j = (i..n).rev().find(|&j| p[i - 1] < p[j]).expect("a larger element exists");
            p.swap(i - 1, j);
            p[i..].reverse();
        }
    } else {
        perms.push((0..n).collect());
        perms.push((0..n).rev().collect());
    }
    let mut best = a.reduce(e)?;
    for perm in perms.iter().skip(1) {
        let ring = a.ring().with_order(MonomialOrder::grevlex().with_permutation(perm)?);
        let rels: Vec<Poly> = a.all_relations().iter().map(|r| r.transport(&ring)).collect::<Result<_>>()?;
        let gb = match groebner_basis(&Ideal::new(&ring, rels)?, false, budgets) {
            Ok(g) => g,
            Err(Error::BudgetExceeded(_)) => continue,
            Err(err) => return Err(err),
        };
        let cand = gb.normal_form(&e.transport(&ring)?)?.transport(a.ring())?;
        if sort_key(&cand) < sort_key(&best) {
            best = cand;
        }
    }
    Ok(best)
}

fn newton_lift(a: &Presentation, mut e: Poly, steps: u32) -> Result<Poly> {
    for _ in 0..steps {
        e = a.reduce(&e)?;
        let sq = a.reduce(&e.checked_mul(&e)?)?;
        if a.equal(&sq, &e)? {
            return Ok(e);
        }
        let cube = a.reduce(&sq.checked_mul(&e)?)?;
        e = sq.scale(a.field().from_i64(3)).checked_sub(&cube.scale(a.field().from_i64(2)))?;
    }
    Err(Error::BudgetExceeded(Budget::Iterations))
}

fn product_ideal(parts: &[&Ideal]) -> Result<Ideal> {
    let ring = parts[0].ring().clone();
    let mut gens = parts[0].gens().to_vec();
    for p in &parts[1..] {
        let mut next = Vec::with_capacity(gens.len() * p.gens().len());
        for g in &gens {
            for h in p.gens() {
                next.push(g.checked_mul(h)?);
            }
        }
        gens = next;
    }
    Ideal::new(&ring, gens)
}

/// Connected components of `Spec A` for `A` presented over 𝔽_p.
pub fn split_components(a: &Arc<Presentation>, cfg: &SplitConfig) -> Result<ComponentDecomposition> {
    if !matches!(a.base(), Base::Field(_)) {
        return Err(Error::Precondition("an algebra presented over 𝔽_p".into()));
    }
    let ring = a.ring().clone();
    let b = &cfg.budgets;
    let mut sp = Splitter { cfg, pieces: Vec::new(), exhausted: false };
    sp.split(Ideal::new(&ring, a.all_relations())?, 0)?;
    let pieces = core::mem::take(&mut sp.pieces);
    let mut complete = !sp.exhausted;
    if pieces.is_empty() {
        return Err(Error::EngineFault("splitting lost every point".into()));
    }

    let mut uf = UnionFind::new(pieces.len());
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            if uf.same(i, j) {
                continue;
            }
            match groebner_basis(&pieces[i].sum(&pieces[j])?, false, b) {
                Ok(g) if g.is_unit() => {}
                Ok(_) => {
                    uf.union(i, j);
                }
                Err(Error::BudgetExceeded(_)) => {
                    complete = false;
                    uf.union(i, j);
                }
                Err(e) => return Err(e),
            }
        }
    }
    let clusters = uf.classes();

    let mut raw: Vec<Poly> = Vec::with_capacity(clusters.len());
    if clusters.len() == 1 {
        raw.push(Poly::one(&ring));
    } else {
        for c in &clusters {
            let inside: Vec<&Ideal> = c.iter().map(|&i| &pieces[i]).collect();
            let k = product_ideal(&inside)?;
            let mut e = Poly::one(&ring);
            for (j, q) in pieces.iter().enumerate() {
                if c.contains(&j) {
                    continue;
                }
                let gb = groebner_basis(&q.sum(&k)?, true, b)?;
                e = a.reduce(&e.checked_mul(&idempotent_from_basis(&gb, q.gens().len())?)?)?;
            }
            raw.push(newton_lift(a, e, cfg.max_newton_steps)?);
        }
    }

    let mut sum = Poly::zero(&ring);
    let mut disjoint_certified = true;
    for (i, e) in raw.iter().enumerate() {
        sum = sum.checked_add(e)?;
        for f in &raw[i + 1..] {
            disjoint_certified &= a.is_zero(&e.checked_mul(f)?)?;
        }
    }
    disjoint_certified &= a.equal(&sum, &Poly::one(&ring))?;
    if !disjoint_certified {
        return Err(Error::EngineFault("idempotents fail the orthogonality axioms".into()));
    }

    let mut components = Vec::with_capacity(clusters.len());
    for (c, e) in clusters.iter().zip(&raw) {
        let idempotent = simplest_representative(a, e, b)?;
        let mut gens = a.all_relations();
        gens.push(Poly::one(&ring).checked_sub(e)?);
        let ideal = groebner_basis(&Ideal::new(&ring, gens)?, false, b)?.ideal();
        let mut connected_certified = true;
        for &i in c {
            connected_certified &= piece_is_connected(&pieces[i], cfg)?;
        }
        components.push(Component { ideal, idempotent, pieces: c.len(), connected_certified });
    }
    components.sort_by_key(|c| sort_key(&c.idempotent));
    Ok(ComponentDecomposition { algebra: a.clone(), components, disjoint_certified, complete })
}

/// `𝔽_p[e₁..e_{k−1}]/(eᵢ² − eᵢ, eᵢeⱼ)` with `eᵢ` sent to the `i`-th idempotent;
/// the last idempotent is `1 − Σ eᵢ`.
pub fn pi0_ring(d: &ComponentDecomposition, opts: &PresentationOptions) -> Result<(Arc<Presentation>, Morphism)> {
    let k = d.len().saturating_sub(1);
    let names: Vec<String> = if k == 1 { vec!["e".to_string()] } else { (1..=k).map(|i| format!("e{i}")).collect() };
    let base = d.algebra.base().clone();
    let ring = Presentation::ambient_ring(&base, &names)?;
    let mut rels = Vec::new();
    for i in 0..k {
        let ei = Poly::var(&ring, i);
        rels.push(ei.checked_mul(&ei)?.checked_sub(&ei)?);
        for j in i + 1..k {
            rels.push(ei.checked_mul(&Poly::var(&ring, j))?);
        }
    }
    let pres = Arc::new(Presentation::new(base, names, rels, opts)?);
    let images: Vec<Poly> = d.components.iter().take(k).map(|c| c.idempotent.clone()).collect();
    let incl = Morphism::new(pres.clone(), d.algebra.clone(), images)?;
    Ok((pres, incl))
}
