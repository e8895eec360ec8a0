//! The preperfection chain `B_1 ⊇ B_2 ⊇ …` and what can be said about its
//! intersection: coherent-element certificates (lower bounds), membership
//! falsifications and gradings (upper bounds), unramified and étale checks,
//! relative perfectness, and the comparison with a π₀ candidate.
//!
//! For `f ∈ A` and `q = p^n`, `f^q = f^{[q]}(x^q)` where `f^{[q]}` raises the
//! base variables to the `q`-th power, since `c^q = c` in 𝔽_p. This gives
//! explicit witnesses for membership in `B_n` without any elimination.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::corering::Poly;
use crate::error::{Budget, Error, Result};
use crate::fpalg::{frobenius_exponent, morphism_kernel, relative_frobenius, Morphism, Presentation, PresentationOptions};
use crate::groebner::{groebner_basis, Budgets, Ideal};
use crate::subalg::{frob_image_generators, frob_image_lazy, frob_image_subalgebra, SubalgebraHandle};

/// `(a, r)` with `r` a base element and `r·(a^p − a) = 0`. Then
/// `r·a^{p^n} = r·a` for every `n`, so `r·a` lies in every `B_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherentCertificate {
    pub a: Poly,
    pub r: Poly,
}

impl CoherentCertificate {
    pub fn new(a: Poly, r: Poly) -> Self {
        Self { a, r }
    }

    /// `r·a`, reduced.
    pub fn target(&self, alg: &Presentation) -> Result<Poly> {
        let a = self.a.transport(alg.ring())?;
        let r = self.r.transport(alg.ring())?;
        alg.reduce(&a.checked_mul(&r)?)
    }
}

pub fn verify_coherent_certificate(alg: &Presentation, cert: &CoherentCertificate) -> Result<bool> {
    let a = alg.reduce(&cert.a.transport(alg.ring())?)?;
    let r = alg.reduce(&cert.r.transport(alg.ring())?)?;
    if !r.only_uses(alg.base_mask()) {
        return Ok(false);
    }
    if r.is_zero() {
        return Ok(true);
    }
    let ap = alg.reduce(&a.checked_pow(alg.characteristic() as u64)?)?;
    alg.is_zero(&r.checked_mul(&ap.checked_sub(&a)?)?)
}

/// Images of the ambient variables in the tag ring of `b_n`: generator `i`
/// goes to the tag of `x_i^{p^n}` (or to zero), base variables to themselves.
fn tag_images(alg: &Presentation, b_n: &SubalgebraHandle, n: u32) -> Result<Vec<Poly>> {
    let full = frob_image_generators(alg, n)?;
    let kept: Vec<&Poly> = full.iter().filter(|g| !g.is_zero()).collect();
    if kept.len() != b_n.generators().len() || kept.iter().zip(b_n.generators()).any(|(a, b)| *a != b) {
        return Err(Error::Structure(format!("subalgebra {b_n:?} is not the level-{n} Frobenius image")));
    }
    let ring = b_n.tag_ring();
    let k = b_n.tags().len();
    let mut images = Vec::with_capacity(ring.nvars());
    let mut j = 0;
    for g in &full {
        if g.is_zero() {
            images.push(Poly::zero(ring));
        } else {
            images.push(Poly::var(ring, j));
            j += 1;
        }
    }
    for b in 0..alg.base_vars().len() {
        images.push(Poly::var(ring, k + b));
    }
    Ok(images)
}

/// Witness for `f^{p^n} ∈ B_n`, in the tag ring of `b_n`.
pub fn power_witness(alg: &Presentation, b_n: &SubalgebraHandle, n: u32, f: &Poly) -> Result<Poly> {
    let q = frobenius_exponent(alg.characteristic(), n)?;
    let images = tag_images(alg, b_n, n)?;
    let raised = f.transport(alg.ring())?.raise_variables(alg.base_mask(), q)?;
    raised.substitute(b_n.tag_ring(), &images)
}

/// Witness for the target `r·a` of a verified certificate in `B_n`.
pub fn certificate_witness(alg: &Presentation, b_n: &SubalgebraHandle, n: u32, cert: &CoherentCertificate) -> Result<Poly> {
    let r = alg.reduce(&cert.r.transport(alg.ring())?)?.transport(b_n.tag_ring())?;
    power_witness(alg, b_n, n, &cert.a)?.checked_mul(&r)
}

/// Weights (generators first, then base variables) for which every relation
/// of the presentation is homogeneous, with generators of weight at least 1.
/// The reduced basis is homogeneous exactly when the ideal is, so this
/// search is complete up to `max_weight`.
pub fn find_grading(alg: &Presentation, max_weight: u32, max_nodes: usize) -> Result<Option<Vec<u32>>> {
    let nv = alg.ring().nvars();
    let ng = alg.ngens();
    let mut constraints: Vec<(usize, Vec<i64>)> = Vec::new();
    for g in alg.groebner().elements() {
        let terms = g.terms();
        let first = terms[0].0.exponents();
        for (m, _) in &terms[1..] {
            let e = m.exponents();
            let diff: Vec<i64> = (0..nv).map(|i| e[i] as i64 - first[i] as i64).collect();
            if let Some(last) = diff.iter().rposition(|&d| d != 0) {
                if !constraints.iter().any(|(_, d)| *d == diff) {
                    constraints.push((last, diff));
                }
            }
        }
    }
    let mut weights = vec![0u32; nv];
    let mut nodes = 0usize;
    fn go(
        i: usize,
        ng: usize,
        max_weight: u32,
        weights: &mut Vec<u32>,
        constraints: &[(usize, Vec<i64>)],
        nodes: &mut usize,
        max_nodes: usize,
    ) -> Result<bool> {
        if i == weights.len() {
            return Ok(true);
        }
        let lo = if i < ng { 1 } else { 0 };
        for w in lo..=max_weight {
            *nodes += 1;
            if *nodes > max_nodes {
                return Err(Error::BudgetExceeded(Budget::Search));
            }
            weights[i] = w;
            let ok = constraints
                .iter()
                .filter(|(last, _)| *last == i)
                .all(|(_, d)| d.iter().zip(weights.iter()).map(|(a, b)| a * *b as i64).sum::<i64>() == 0);
            if ok && go(i + 1, ng, max_weight, weights, constraints, nodes, max_nodes)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    match go(0, ng, max_weight, &mut weights, &constraints, &mut nodes, max_nodes) {
        Ok(true) => Ok(Some(weights)),
        Ok(false) => Ok(None),
        Err(Error::BudgetExceeded(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug)]
pub struct PreperfectConfig {
    /// Largest chain level built.
    pub max_steps: u32,
    pub budgets: Budgets,
    /// Extra probe elements.
    pub probes: Vec<Poly>,
    /// Also probe every generator.
    pub generator_probes: bool,
    pub certificates: Vec<CoherentCertificate>,
    /// Certificate targets are checked against explicit witnesses in `B_1..B_k`.
    pub witness_levels: u32,
    /// Bound on the weights tried when looking for a grading.
    pub max_weight: u32,
    /// Compute the kernel of each `Frob^n_{A/R}`.
    pub check_injectivity: bool,
}

impl Default for PreperfectConfig {
    fn default() -> Self {
        Self {
            max_steps: 4,
            budgets: Budgets::default(),
            probes: Vec::new(),
            generator_probes: true,
            certificates: Vec::new(),
            witness_levels: 3,
            max_weight: 4,
            check_injectivity: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainStatus {
    /// `B_at = B_{at+1}`, checked by membership.
    Stabilized { at: u32 },
    NotStabilized { max_steps: u32 },
    /// A budget ran out while building or comparing `level`.
    Truncated { level: u32, budget: Budget },
}

#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub level: u32,
    pub subalgebra: SubalgebraHandle,
    pub presentation: Arc<Presentation>,
    pub inclusion: Morphism,
    /// Whether `Frob^n_{A/R}` has zero kernel; `None` if not decided.
    pub injective: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub element: Poly,
    /// First level whose subalgebra misses the element.
    pub first_failure: Option<u32>,
    /// Levels tested.
    pub checked_through: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedElement {
    pub certificate: CoherentCertificate,
    pub target: Poly,
    /// Levels where the explicit witness evaluated back to the target.
    pub witnessed_levels: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpperBound {
    /// The intersection lies in `B_level`.
    Level(u32),
    /// The intersection is the image of the base: the presentation is
    /// graded with these weights and generators in positive degree.
    Graded { weights: Vec<u32> },
    /// Nothing was built.
    Ambient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// Presentation of the stable level.
    StabilizedChain { at: u32 },
    /// Lower and upper bounds agree.
    Bounds,
    /// Only known to lie inside the preperfection.
    LowerBound,
    /// A π₀ candidate under user-asserted hypotheses.
    Pi0Backed,
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub presentation: Arc<Presentation>,
    pub inclusion: Morphism,
    pub evidence: Evidence,
}

impl Candidate {
    pub fn is_exact(&self) -> bool {
        !matches!(self.evidence, Evidence::LowerBound)
    }
}

#[derive(Clone, Debug)]
pub struct PreperfectionReport {
    pub status: ChainStatus,
    pub chain: Vec<ChainLevel>,
    pub probes: Vec<ProbeOutcome>,
    pub certified: Vec<CertifiedElement>,
    pub rejected: Vec<CoherentCertificate>,
    /// Generators over the base of a subalgebra inside the preperfection.
    pub lower_bound: Vec<Poly>,
    pub upper_bound: UpperBound,
    pub candidate: Candidate,
}

impl PreperfectionReport {
    pub fn falsified(&self) -> impl Iterator<Item = (&Poly, u32)> {
        self.probes.iter().filter_map(|p| p.first_failure.map(|l| (&p.element, l)))
    }

    pub fn is_exact(&self) -> bool {
        self.candidate.is_exact()
    }
}

fn budget_of(e: &Error) -> Option<Budget> {
    match e {
        Error::BudgetExceeded(b) => Some(*b),
        _ => None,
    }
}

fn build_level(a: &Arc<Presentation>, n: u32, cfg: &PreperfectConfig) -> Result<ChainLevel> {
    let opts = PresentationOptions { allow_zero: false, budgets: cfg.budgets };
    let sub = frob_image_subalgebra(a, n, &cfg.budgets)?;
    let (presentation, inclusion) = sub.presentation(&opts)?;
    let injective = if cfg.check_injectivity {
        match relative_frobenius(a, n, &opts).and_then(|f| morphism_kernel(&f, &cfg.budgets)) {
            Ok(k) => Some(k.is_zero()),
            Err(e) if e.is_budget() => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(ChainLevel { level: n, subalgebra: sub, presentation, inclusion, injective })
}

/// Every generator of `B_{n+1}` is `(x_i^p)^{p^n}`; checks the witnesses in `B_n`.
fn check_monotone(a: &Presentation, larger: &ChainLevel, smaller: &ChainLevel) -> Result<()> {
    let p = a.characteristic() as u64;
    for i in 0..a.ngens() {
        let target = a.reduce(&a.gen(i).checked_pow(p.pow(smaller.level))?)?;
        let w = power_witness(a, &larger.subalgebra, larger.level, &a.gen(i).checked_pow(p)?)?;
        if !larger.subalgebra.verify_witness(&target, &w)? {
            return Err(Error::EngineFault(format!("B_{} is not inside B_{}", smaller.level, larger.level)));
        }
    }
    Ok(())
}

fn base_candidate(a: &Arc<Presentation>, evidence: Evidence, opts: &PresentationOptions) -> Result<Candidate> {
    let r = Arc::new(Presentation::new(a.base().clone(), Vec::new(), Vec::new(), opts)?);
    let inclusion = Morphism::new(r.clone(), a.clone(), Vec::new())?;
    Ok(Candidate { presentation: r, inclusion, evidence })
}

/// Builds `B_1, …` until two consecutive levels agree or `max_steps` is
/// reached, probes elements against the chain, checks certificates and
/// assembles the best supported candidate for the preperfection.
pub fn preperfect(a: &Arc<Presentation>, cfg: &PreperfectConfig) -> Result<PreperfectionReport> {
    if cfg.max_steps == 0 {
        return Err(Error::Precondition("max_steps ≥ 1".into()));
    }
    let opts = PresentationOptions { allow_zero: false, budgets: cfg.budgets };
    let mut chain: Vec<ChainLevel> = Vec::new();
    let mut status = ChainStatus::NotStabilized { max_steps: cfg.max_steps };
    for n in 1..=cfg.max_steps {
        let level = match build_level(a, n, cfg) {
            Ok(l) => l,
            Err(e) => match budget_of(&e) {
                Some(budget) => {
                    status = ChainStatus::Truncated { level: n, budget };
                    break;
                }
                None => return Err(e),
            },
        };
        if let Some(prev) = chain.last() {
            check_monotone(a, prev, &level)?;
            match prev.subalgebra.contained_in(&level.subalgebra, &cfg.budgets) {
                Ok(true) => {
                    chain.push(level);
                    status = ChainStatus::Stabilized { at: n - 1 };
                    break;
                }
                Ok(false) => {}
                Err(e) => match budget_of(&e) {
                    Some(budget) => {
                        chain.push(level);
                        status = ChainStatus::Truncated { level: n, budget };
                        break;
                    }
                    None => return Err(e),
                },
            }
        }
        chain.push(level);
    }

    let mut probe_elems: Vec<Poly> = Vec::new();
    if cfg.generator_probes {
        probe_elems.extend((0..a.ngens()).map(|i| a.gen(i)));
    }
    for p in &cfg.probes {
        let f = a.reduce(&p.transport(a.ring())?)?;
        if !probe_elems.contains(&f) {
            probe_elems.push(f);
        }
    }
    let mut probes = Vec::with_capacity(probe_elems.len());
    for element in probe_elems {
        let mut first_failure = None;
        let mut checked_through = 0;
        for level in &chain {
            checked_through = level.level;
            if !level.subalgebra.member(&element, &cfg.budgets)?.is_member() {
                first_failure = Some(level.level);
                break;
            }
        }
        probes.push(ProbeOutcome { element, first_failure, checked_through });
    }

    let mut certified = Vec::new();
    let mut rejected = Vec::new();
    for cert in &cfg.certificates {
        if !verify_coherent_certificate(a, cert)? {
            rejected.push(cert.clone());
            continue;
        }
        let target = cert.target(a)?;
        let mut witnessed_levels = Vec::new();
        for n in 1..=cfg.witness_levels {
            let handle = match chain.iter().find(|l| l.level == n) {
                Some(l) => l.subalgebra.clone(),
                None => frob_image_lazy(a, n)?,
            };
            let w = certificate_witness(a, &handle, n, cert)?;
            if !handle.verify_witness(&target, &w)? {
                return Err(Error::EngineFault(format!("certificate witness for `{target}` fails at level {n}")));
            }
            witnessed_levels.push(n);
        }
        certified.push(CertifiedElement { certificate: cert.clone(), target, witnessed_levels });
    }

    let grading = find_grading(a, cfg.max_weight, 1 << 20)?;
    let upper_bound = match (&status, &grading) {
        (ChainStatus::Stabilized { at }, None) => UpperBound::Level(*at),
        (_, Some(w)) => UpperBound::Graded { weights: w.clone() },
        _ => match chain.last() {
            Some(l) => UpperBound::Level(l.level),
            None => UpperBound::Ambient,
        },
    };

    let nonbase: Vec<Poly> =
        certified.iter().map(|c| c.target.clone()).filter(|t| !t.only_uses(a.base_mask())).collect();
    let (candidate, lower_bound) = if let ChainStatus::Stabilized { at } = status {
        let level = &chain[at as usize - 1];
        let candidate = Candidate {
            presentation: level.presentation.clone(),
            inclusion: level.inclusion.clone(),
            evidence: Evidence::StabilizedChain { at },
        };
        (candidate, level.subalgebra.generators().to_vec())
    } else if matches!(upper_bound, UpperBound::Graded { .. }) {
        if let Some(t) = nonbase.first() {
            return Err(Error::EngineFault(format!("certified `{t}` lies outside a graded upper bound")));
        }
        (base_candidate(a, Evidence::Bounds, &opts)?, Vec::new())
    } else if nonbase.is_empty() {
        (base_candidate(a, Evidence::LowerBound, &opts)?, Vec::new())
    } else {
        let sub = SubalgebraHandle::new(a, nonbase.clone(), &cfg.budgets)?;
        let (presentation, inclusion) = sub.presentation(&opts)?;
        (Candidate { presentation, inclusion, evidence: Evidence::LowerBound }, nonbase)
    };

    Ok(PreperfectionReport { status, chain, probes, certified, rejected, lower_bound, upper_bound, candidate })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unramified {
    /// Kähler differentials vanish. `etale` when the presentation is
    /// square (so the determinant is a unit), or when the base is a field,
    /// where unramified of finite type already means étale.
    Unramified { etale: bool },
    Ramified,
    Unknown(Budget),
}

/// Determinant by expansion along the first row, reduced in `alg`.
fn determinant(alg: &Presentation, rows: &[&Vec<Poly>], cols: &[usize]) -> Result<Poly> {
    if rows.is_empty() {
        return Ok(Poly::one(alg.ring()));
    }
    let mut acc = Poly::zero(alg.ring());
    for (k, &c) in cols.iter().enumerate() {
        let entry = &rows[0][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = determinant(alg, &rows[1..], &rest)?;
        let term = entry.checked_mul(&minor)?;
        acc = if k % 2 == 0 { acc.checked_add(&term)? } else { acc.checked_sub(&term)? };
    }
    alg.reduce(&acc)
}

/// Maximal minors of the Jacobian of the algebra relations with respect to
/// the generators.
pub fn jacobian_minors(alg: &Presentation, max_minors: usize) -> Result<Vec<Poly>> {
    let n = alg.ngens();
    let rels = alg.relations();
    let m = rels.len();
    if n == 0 {
        return Ok(vec![Poly::one(alg.ring())]);
    }
    if m < n {
        return Ok(Vec::new());
    }
    let jac: Vec<Vec<Poly>> = rels.iter().map(|f| (0..n).map(|j| f.derivative(j)).collect()).collect();
    let cols: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        if out.len() >= max_minors {
            return Err(Error::BudgetExceeded(Budget::Search));
        }
        let rows: Vec<&Vec<Poly>> = pick.iter().map(|&i| &jac[i]).collect();
        let d = determinant(alg, &rows, &cols)?;
        if !d.is_zero() {
            out.push(d);
        }
        let Some(i) = (0..n).rev().find(|&i| pick[i] < m - n + i) else { break };
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
    Ok(out)
}

/// Unit-ideal test on the relations together with the maximal Jacobian
/// minors.
pub fn unramified_check(alg: &Presentation, budgets: &Budgets) -> Result<Unramified> {
    let minors = match jacobian_minors(alg, 10_000) {
        Ok(m) => m,
        Err(Error::BudgetExceeded(b)) => return Ok(Unramified::Unknown(b)),
        Err(e) => return Err(e),
    };
    let mut gens = alg.all_relations();
    gens.extend(minors);
    match groebner_basis(&Ideal::new(alg.ring(), gens)?, false, budgets) {
        Ok(gb) if gb.is_unit() => {
            let etale = alg.relations().len() == alg.ngens() || matches!(alg.base(), crate::fpalg::Base::Field(_));
            Ok(Unramified::Unramified { etale })
        }
        Ok(_) => Ok(Unramified::Ramified),
        Err(Error::BudgetExceeded(b)) => Ok(Unramified::Unknown(b)),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotPerfect {
    /// Nonzero element of the twist killed by relative Frobenius.
    KernelElement(Poly),
    /// Generator outside `B_1`.
    NotInImage(Poly),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelativePerfectness {
    Yes,
    No(NotPerfect),
    Unknown(Budget),
}

/// Whether `Frob_{A/R}` is an isomorphism: zero kernel and every generator
/// in `B_1`.
pub fn is_relatively_perfect(a: &Arc<Presentation>, budgets: &Budgets) -> Result<RelativePerfectness> {
    let opts = PresentationOptions { allow_zero: false, budgets: *budgets };
    let run = || -> Result<RelativePerfectness> {
        let kernel = morphism_kernel(&relative_frobenius(a, 1, &opts)?, budgets)?;
        if let Some(k) = kernel.gens().first() {
            return Ok(RelativePerfectness::No(NotPerfect::KernelElement(k.clone())));
        }
        let b1 = frob_image_subalgebra(a, 1, budgets)?;
        for i in 0..a.ngens() {
            if !b1.member(&a.gen(i), budgets)?.is_member() {
                return Ok(RelativePerfectness::No(NotPerfect::NotInImage(a.gen(i))));
            }
        }
        Ok(RelativePerfectness::Yes)
    };
    match run() {
        Err(Error::BudgetExceeded(b)) => Ok(RelativePerfectness::Unknown(b)),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrowVerdict {
    Isomorphism,
    NotIsomorphism(String),
    Indeterminate(String),
}

#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    /// Whether the two candidates generate the same subalgebra of `A`.
    pub same_subalgebra: Option<bool>,
    pub pi0_unramified: Unramified,
    pub preperfection_evidence: Evidence,
    /// `A^{ét/R} → O(π₀)`.
    pub etale_to_pi0: ArrowVerdict,
    /// `O(π₀) → A^{p^∞/R}`.
    pub pi0_to_preperfection: ArrowVerdict,
    /// Both candidates agree but are ramified over the base: the
    /// preperfection is not étale here.
    pub counterexample: bool,
    /// The π₀ candidate as an answer, when hypotheses are asserted and it is étale.
    pub pi0_answer: Option<Candidate>,
}

/// Compares a π₀ candidate with a preperfection candidate inside `A`.
///
/// If the preperfection candidate is exact and equals the image of an étale
/// π₀ candidate, both arrows are isomorphisms: every étale subalgebra lies
/// in every `B_n`, so `O(π₀) ⊆ A^{ét} ⊆ A^{p^∞} = O(π₀)`.
pub fn pi0_crosscheck(
    pi0: &Morphism,
    preperfection: &Candidate,
    hypotheses_asserted: bool,
    budgets: &Budgets,
) -> Result<CrosscheckReport> {
    let a = pi0.target();
    if !a.same_as(preperfection.inclusion.target()) {
        return Err(Error::Structure("candidates map into different algebras".into()));
    }
    let pi0_unramified = unramified_check(pi0.source(), budgets)?;
    let compare = || -> Result<(bool, bool)> {
        let injective = morphism_kernel(pi0, budgets)?.is_zero();
        let s = SubalgebraHandle::new(a, pi0.images().to_vec(), budgets)?;
        let t = SubalgebraHandle::new(a, preperfection.inclusion.images().to_vec(), budgets)?;
        Ok((injective, s.contained_in(&t, budgets)? && t.contained_in(&s, budgets)?))
    };
    let (same_subalgebra, pi0_to_preperfection) = match compare() {
        Ok((false, _)) => (None, ArrowVerdict::NotIsomorphism("the π₀ map is not injective".into())),
        Ok((true, false)) => (
            Some(false),
            ArrowVerdict::NotIsomorphism("the candidates generate different subalgebras".into()),
        ),
        Ok((true, true)) if preperfection.is_exact() => (Some(true), ArrowVerdict::Isomorphism),
        Ok((true, true)) => (
            Some(true),
            ArrowVerdict::Indeterminate("the preperfection is only known from below".into()),
        ),
        Err(Error::BudgetExceeded(b)) => (None, ArrowVerdict::Indeterminate(format!("{b} exceeded"))),
        Err(e) => return Err(e),
    };
    let etale_to_pi0 = match (pi0_unramified, &pi0_to_preperfection) {
        (Unramified::Ramified, _) => ArrowVerdict::NotIsomorphism("the π₀ candidate is ramified over the base".into()),
        (Unramified::Unramified { etale: true }, ArrowVerdict::Isomorphism) => ArrowVerdict::Isomorphism,
        (Unramified::Unramified { etale: false }, _) => {
            ArrowVerdict::Indeterminate("the π₀ candidate is unramified but not certified étale".into())
        }
        (Unramified::Unknown(b), _) => ArrowVerdict::Indeterminate(format!("{b} exceeded")),
        _ => ArrowVerdict::Indeterminate("the second arrow is not known to be an isomorphism".into()),
    };
    let counterexample = same_subalgebra == Some(true) && pi0_unramified == Unramified::Ramified;
    let pi0_answer = (hypotheses_asserted && pi0_unramified == Unramified::Unramified { etale: true })
        .then(|| Candidate { presentation: pi0.source().clone(), inclusion: pi0.clone(), evidence: Evidence::Pi0Backed });
    Ok(CrosscheckReport {
        same_subalgebra,
        pi0_unramified,
        preperfection_evidence: preperfection.evidence,
        etale_to_pi0,
        pi0_to_preperfection,
        counterexample,
        pi0_answer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corering::PrimeField;
    use crate::fpalg::Base;

    fn opts() -> PresentationOptions {
        PresentationOptions::default()
    }

    fn base(p: u32, vars: &[&str], rels: &[&str]) -> Arc<Presentation> {
        Arc::new(Presentation::over_field(PrimeField::new(p).unwrap(), vars, rels, &opts()).unwrap())
    }

    fn over(r: &Arc<Presentation>, gens: &[&str], rels: &[&str]) -> Arc<Presentation> {
        Arc::new(Presentation::from_text(Base::Algebra(r.clone()), gens, rels, &opts()).unwrap())
    }

    fn etale() -> Arc<Presentation> {
        over(&base(3, &["u"], &[]), &["x"], &["x^3 - x - u"])
    }

    fn nodal(p: u32) -> Arc<Presentation> {
        over(&base(p, &["u", "v"], &["u*v"]), &["x", "y", "t"], &["x*y - u", "t*(x - y) - 1"])
    }

    #[test]
    fn certificates() {
        let a = nodal(3);
        let cert = CoherentCertificate::new(a.parse("(x + y)*t").unwrap(), a.parse("v").unwrap());
        assert!(verify_coherent_certificate(&a, &cert).unwrap());
        let zero = CoherentCertificate::new(a.parse("x^2 + t").unwrap(), Poly::zero(a.ring()));
        assert!(verify_coherent_certificate(&a, &zero).unwrap());
        assert!(zero.target(&a).unwrap().is_zero());
        let bad = CoherentCertificate::new(a.parse("(x + y)*t").unwrap(), a.parse("u").unwrap());
        assert!(!verify_coherent_certificate(&a, &bad).unwrap());
        let not_base = CoherentCertificate::new(a.parse("x").unwrap(), a.parse("t").unwrap());
        assert!(!verify_coherent_certificate(&a, &not_base).unwrap());

        let e = base(5, &["x", "y"], &["x*y", "x + y - 1"]);
        let e = Arc::new(Presentation::base_as_algebra(&e, &opts()).unwrap());
        let idem = CoherentCertificate::new(e.parse("x").unwrap(), Poly::one(e.ring()));
        assert!(verify_coherent_certificate(&e, &idem).unwrap());
    }

    #[test]
    fn witnesses_evaluate_back() {
        let a = nodal(3);
        let cert = CoherentCertificate::new(a.parse("(x + y)*t").unwrap(), a.parse("v").unwrap());
        let target = cert.target(&a).unwrap();
        for n in 1..=3 {
            let h = frob_image_lazy(&a, n).unwrap();
            let w = certificate_witness(&a, &h, n, &cert).unwrap();
            assert!(h.verify_witness(&target, &w).unwrap());
            let f = a.parse("x + u*t").unwrap();
            let fq = a.reduce(&f.pow(3u64.pow(n))).unwrap();
            assert!(h.verify_witness(&fq, &power_witness(&a, &h, n, &f).unwrap()).unwrap());
        }
    }

    #[test]
    fn gradings() {
        let r = base(3, &["u", "v"], &["u*v"]);
        let b = over(&r, &["a"], &["u*a", "a^2 - v^2"]);
        assert_eq!(find_grading(&b, 4, 1 << 20).unwrap(), Some(vec![1, 0, 1]));
        assert_eq!(find_grading(&nodal(3), 4, 1 << 20).unwrap(), None);
        assert_eq!(find_grading(&etale(), 4, 1 << 20).unwrap(), None);
    }

    #[test]
    fn etale_algebra_stabilizes_at_one() {
        let a = etale();
        let rep = preperfect(&a, &PreperfectConfig::default()).unwrap();
        assert_eq!(rep.status, ChainStatus::Stabilized { at: 1 });
        assert_eq!(rep.candidate.evidence, Evidence::StabilizedChain { at: 1 });
        assert!(rep.chain.iter().all(|l| l.injective == Some(true)));
        assert!(rep.falsified().next().is_none());
        assert_eq!(is_relatively_perfect(&a, &Budgets::default()).unwrap(), RelativePerfectness::Yes);
        assert_eq!(
            unramified_check(&a, &Budgets::default()).unwrap(),
            Unramified::Unramified { etale: true }
        );
    }

    #[test]
    fn affine_line() {
        let r = base(5, &["x"], &[]);
        let a = Arc::new(Presentation::over_field(PrimeField::new(5).unwrap(), &["x"], &[], &opts()).unwrap());
        let rep = preperfect(&a, &PreperfectConfig { max_steps: 3, ..Default::default() }).unwrap();
        assert_eq!(rep.status, ChainStatus::NotStabilized { max_steps: 3 });
        assert_eq!(rep.falsified().map(|(_, l)| l).collect::<Vec<_>>(), vec![1]);
        assert_eq!(rep.upper_bound, UpperBound::Graded { weights: vec![1] });
        assert_eq!(rep.candidate.evidence, Evidence::Bounds);
        assert_eq!(rep.candidate.presentation.ngens(), 0);
        assert_eq!(
            is_relatively_perfect(&a, &Budgets::default()).unwrap(),
            RelativePerfectness::No(NotPerfect::NotInImage(a.gen(0)))
        );
        let itself = Arc::new(Presentation::base_as_algebra(&r, &opts()).unwrap());
        assert_eq!(is_relatively_perfect(&itself, &Budgets::default()).unwrap(), RelativePerfectness::Yes);
    }

    #[test]
    fn ramification() {
        let b = Budgets::default();
        let f = PrimeField::new(3).unwrap();
        let dual = Presentation::over_field(f, &["x"], &["x^2"], &opts()).unwrap();
        assert_eq!(unramified_check(&dual, &b).unwrap(), Unramified::Ramified);
        let r = base(3, &["u", "v"], &["u*v"]);
        let c = over(&r, &["a"], &["u*a", "a^2 - v^2"]);
        assert_eq!(unramified_check(&c, &b).unwrap(), Unramified::Ramified);
        let split = Presentation::over_field(PrimeField::new(5).unwrap(), &["e"], &["e^2 - e"], &opts()).unwrap();
        assert_eq!(unramified_check(&split, &b).unwrap(), Unramified::Unramified { etale: true });
        let point = Presentation::over_field(f, &[], &[], &opts()).unwrap();
        assert_eq!(unramified_check(&point, &b).unwrap(), Unramified::Unramified { etale: true });
    }

    #[test]
    fn inseparable_frobenius_has_a_kernel() {
        let a = over(&base(3, &["u"], &[]), &["x"], &["x^3 - u"]);
        match is_relatively_perfect(&a, &Budgets::default()).unwrap() {
            RelativePerfectness::No(NotPerfect::KernelElement(k)) => assert_eq!(k.to_text(), "x - u"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn crosscheck_on_two_points() {
        let f = PrimeField::new(5).unwrap();
        let a = Arc::new(Presentation::over_field(f, &["x", "y"], &["x*y", "x + y - 1"], &opts()).unwrap());
        let e = Arc::new(Presentation::over_field(f, &["e"], &["e^2 - e"], &opts()).unwrap());
        let pi0 = Morphism::from_text(e, a.clone(), &["x"]).unwrap();
        let rep = preperfect(&a, &PreperfectConfig::default()).unwrap();
        assert_eq!(rep.status, ChainStatus::Stabilized { at: 1 });
        let cc = pi0_crosscheck(&pi0, &rep.candidate, false, &Budgets::default()).unwrap();
        assert_eq!(cc.same_subalgebra, Some(true));
        assert_eq!(cc.pi0_to_preperfection, ArrowVerdict::Isomorphism);
        assert_eq!(cc.etale_to_pi0, ArrowVerdict::Isomorphism);
        assert!(!cc.counterexample);
    }
}
