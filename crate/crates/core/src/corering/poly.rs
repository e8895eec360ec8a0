//! Sparse multivariate polynomials over 𝔽_p.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use super::field::{Coef, PrimeField};
use super::monomial::{Monomial, MonomialOrder, MAX_VARS};
use crate::error::{Error, Result};

pub type Term = (Monomial, Coef);

/// Ambient data shared by polynomials: coefficient field, variable names and
/// the monomial order in which term lists are kept.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyRing {
    field: PrimeField,
    vars: Vec<String>,
    order: MonomialOrder,
}

impl PolyRing {
    pub fn new(field: PrimeField, vars: Vec<String>, order: MonomialOrder) -> Result<Arc<Self>> {
        if vars.len() > MAX_VARS {
            return Err(Error::TooManyVariables(vars.len()));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::Structure(alloc::format!("duplicate variable `{v}`")));
            }
        }
        Ok(Arc::new(Self { field, vars, order }))
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Same variables under a different order.
    pub fn with_order(&self, order: MonomialOrder) -> Arc<Self> {
        Arc::new(Self { field: self.field, vars: self.vars.clone(), order })
    }
}

#[derive(Clone)]
pub struct Poly {
    ring: Arc<PolyRing>,
    /// Strictly decreasing in the ring's order, no zero coefficients.
    terms: Vec<Term>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[inline]
pub fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Sorts, merges and drops zeros.
pub(crate) fn normalize_terms(field: PrimeField, order: &MonomialOrder, mut terms: Vec<Term>) -> Vec<Term> {
    terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
    let p = field.characteristic();
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        let c = c % p;
        match out.last_mut() {
            Some(last) if last.0 == m => last.1 = field.add(last.1, c),
            _ => out.push((m, c)),
        }
        if let Some(last) = out.last() {
            if last.1 == 0 {
                out.pop();
            }
        }
    }
    out
}

/// `a + c * m * b` on sorted term lists.
pub(crate) fn add_scaled(
    field: PrimeField,
    order: &MonomialOrder,
    a: &[Term],
    c: Coef,
    m: &Monomial,
    b: &[Term],
) -> Vec<Term> {
    if c == 0 || b.is_empty() {
        return a.to_vec();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut bj: Option<Term> = b.first().map(|t| (t.0.mul(m), field.mul(t.1, c)));
    while i < a.len() || bj.is_some() {
        match (a.get(i), bj) {
            (Some(ta), Some(tb)) => match order.cmp(&ta.0, &tb.0) {
                Ordering::Greater => {
                    out.push(*ta);
                    i += 1;
                }
                Ordering::Less => {
                    out.push(tb);
                    j += 1;
                    bj = b.get(j).map(|t| (t.0.mul(m), field.mul(t.1, c)));
                }
                Ordering::Equal => {
                    let s = field.add(ta.1, tb.1);
                    if s != 0 {
                        out.push((ta.0, s));
                    }
                    i += 1;
                    j += 1;
                    bj = b.get(j).map(|t| (t.0.mul(m), field.mul(t.1, c)));
                }
            },
            (Some(ta), None) => {
                out.extend_from_slice(&a[i..]);
                let _ = ta;
                break;
            }
            (None, Some(tb)) => {
                out.push(tb);
                j += 1;
                bj = b.get(j).map(|t| (t.0.mul(m), field.mul(t.1, c)));
            }
            (None, None) => break,
        }
    }
    out
}

pub(crate) fn mul_terms(field: PrimeField, order: &MonomialOrder, a: &[Term], b: &[Term]) -> Vec<Term> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut acc: Vec<Term> = Vec::new();
    for (m, c) in small {
        acc = add_scaled(field, order, &acc, *c, m, large);
    }
    acc
}

impl Poly {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Self { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, 1)
    }

    pub fn constant(ring: &Arc<PolyRing>, c: i64) -> Self {
        let c = ring.field.from_i64(c);
        let terms = if c == 0 { Vec::new() } else { alloc::vec![(Monomial::one(), c)] };
        Self { ring: ring.clone(), terms }
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        assert!(i < ring.nvars(), "variable index out of range");
        Self { ring: ring.clone(), terms: alloc::vec![(Monomial::var(i, 1), 1)] }
    }

    pub fn var_named(ring: &Arc<PolyRing>, name: &str) -> Result<Self> {
        ring.var_index(name)
            .map(|i| Self::var(ring, i))
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn monomial(ring: &Arc<PolyRing>, m: Monomial, c: Coef) -> Self {
        let c = c % ring.field.characteristic();
        let terms = if c == 0 { Vec::new() } else { alloc::vec![(m, c)] };
        Self { ring: ring.clone(), terms }
    }

    pub fn from_terms(ring: &Arc<PolyRing>, terms: Vec<Term>) -> Self {
        let p = ring.field.characteristic();
        let terms = terms.into_iter().map(|(m, c)| (m, c % p)).collect();
        Self { ring: ring.clone(), terms: normalize_terms(ring.field, &ring.order, terms) }
    }

    /// Wraps a term list already in canonical form.
    pub(crate) fn from_sorted(ring: &Arc<PolyRing>, terms: Vec<Term>) -> Self {
        debug_assert!(terms.windows(2).all(|w| ring.order.cmp(&w[0].0, &w[1].0) == Ordering::Greater));
        debug_assert!(terms.iter().all(|t| t.1 != 0));
        Self { ring: ring.clone(), terms }
    }

    #[inline]
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    #[inline]
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == 1
    }

    pub fn constant_value(&self) -> Option<Coef> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(m, c)] if m.is_one() => Some(*c),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coef(&self) -> Coef {
        self.terms.first().map_or(0, |t| t.1)
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|t| t.0.exponent(var)).max().unwrap_or(0)
    }

    /// Bitmask of variables that occur.
    pub fn support(&self) -> u32 {
        self.terms.iter().fold(0, |acc, t| acc | t.0.support_mask())
    }

    /// Index of the single variable occurring, if there is exactly one.
    pub fn univariate_var(&self) -> Option<usize> {
        let s = self.support();
        (s.count_ones() == 1).then(|| s.trailing_zeros() as usize)
    }

    /// Whether every variable occurring is in `allowed` (a bitmask).
    pub fn only_uses(&self, allowed: u32) -> bool {
        self.support() & !allowed == 0
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::Structure(alloc::format!(
                "polynomials live in different rings ({:?} vs {:?})",
                self.ring.vars, other.ring.vars
            )))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        Ok(self.add_unchecked(other, 1))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let minus_one = self.ring.field.neg(1);
        Ok(self.add_unchecked(other, minus_one))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        self.check_product_fits(other)?;
        Ok(Self::from_sorted(&self.ring, mul_terms(self.ring.field, &self.ring.order, &self.terms, &other.terms)))
    }

    fn check_product_fits(&self, other: &Self) -> Result<()> {
        for i in 0..self.ring.nvars() {
            if self.degree_in(i) as u32 + other.degree_in(i) as u32 > u16::MAX as u32 {
                return Err(Error::ExponentOverflow);
            }
        }
        Ok(())
    }

    fn add_unchecked(&self, other: &Self, c: Coef) -> Self {
        let terms = add_scaled(self.ring.field, &self.ring.order, &self.terms, c, &Monomial::one(), &other.terms);
        Self::from_sorted(&self.ring, terms)
    }

    /// `self + c * m * other`.
    pub fn add_scaled(&self, c: Coef, m: &Monomial, other: &Self) -> Self {
        debug_assert!(same_ring(&self.ring, &other.ring));
        Self::from_sorted(&self.ring, add_scaled(self.ring.field, &self.ring.order, &self.terms, c, m, &other.terms))
    }

    pub fn scale(&self, c: Coef) -> Self {
        let c = c % self.ring.field.characteristic();
        if c == 0 {
            return Self::zero(&self.ring);
        }
        let f = self.ring.field;
        Self::from_sorted(&self.ring, self.terms.iter().map(|(m, d)| (*m, f.mul(*d, c))).collect())
    }

    pub fn mul_monomial(&self, m: &Monomial, c: Coef) -> Self {
        Self::zero(&self.ring).add_scaled(c, m, self)
    }

    pub fn monic(&self) -> Self {
        match self.ring.field.inv(self.leading_coef()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    pub fn checked_pow(&self, k: u64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one(&self.ring));
        }
        for i in 0..self.ring.nvars() {
            if self.degree_in(i) as u64 * k > u16::MAX as u64 {
                return Err(Error::ExponentOverflow);
            }
        }
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    pub fn pow(&self, k: u64) -> Self {
        self.checked_pow(k).expect("exponent overflow in pow")
    }

    /// `self^(p^n)`. Coefficients lie in 𝔽_p and are fixed by Frobenius, so
    /// this only scales exponents.
    pub fn frobenius_power(&self, n: u32) -> Result<Self> {
        let p = self.ring.field.characteristic() as u64;
        let q = p.checked_pow(n).filter(|&q| q <= u16::MAX as u64).ok_or(Error::ExponentOverflow)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.scale(q as u32)?, *c));
        }
        // scaling all exponents by q preserves any admissible order
        Ok(Self::from_sorted(&self.ring, terms))
    }

    /// Renames variables into `target`: variable `i` becomes `map[i]`.
    pub fn relabel(&self, target: &Arc<PolyRing>, map: &[usize]) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.relabel(map), *c)).collect();
        Self { ring: target.clone(), terms: normalize_terms(target.field, &target.order, terms) }
    }

    /// Moves into another ring by matching variable names.
    pub fn transport(&self, target: &Arc<PolyRing>) -> Result<Self> {
        if same_ring(&self.ring, target) {
            return Ok(Self { ring: target.clone(), terms: self.terms.clone() });
        }
        if self.ring.field != target.field {
            return Err(Error::Structure("characteristic mismatch".into()));
        }
        let support = self.support();
        let mut map = alloc::vec![0usize; self.ring.nvars()];
        for (i, name) in self.ring.vars.iter().enumerate() {
            match target.var_index(name) {
                Some(j) => map[i] = j,
                None if support & (1 << i) == 0 => map[i] = 0,
                None => return Err(Error::UnknownVariable(name.clone())),
            }
        }
        Ok(self.relabel(target, &map))
    }

    /// Ring homomorphism evaluation: variable `i` is replaced by `images[i]`,
    /// all images living in one target ring.
    pub fn substitute(&self, target: &Arc<PolyRing>, images: &[Poly]) -> Result<Self> {
        if images.len() != self.ring.nvars() {
            return Err(Error::Structure("substitution needs one image per variable".into()));
        }
        if let Some(bad) = images.iter().find(|g| !same_ring(g.ring(), target)) {
            return Err(Error::Structure(alloc::format!("substitution image `{bad}` is in the wrong ring")));
        }
        let field = target.field;
        let order = target.order;
        // Fast path: all images are single terms.
        if images.iter().all(|g| g.terms.len() <= 1) {
            let mut terms = Vec::with_capacity(self.terms.len());
            'outer: for (m, c) in &self.terms {
                let mut mono = Monomial::one();
                let mut coef = *c;
                for i in 0..self.ring.nvars() {
                    let e = m.exponent(i);
                    if e == 0 {
                        continue;
                    }
                    match images[i].terms.first() {
                        None => continue 'outer,
                        Some((gm, gc)) => {
                            let scaled = gm.scale(e as u32)?;
                            mono = mono.checked_mul(&scaled).ok_or(Error::ExponentOverflow)?;
                            coef = field.mul(coef, field.pow(*gc, e as u64));
                        }
                    }
                }
                terms.push((mono, coef));
            }
            return Ok(Self { ring: target.clone(), terms: normalize_terms(field, &order, terms) });
        }
        // Cache powers per variable.
        let mut powers: Vec<Vec<(u16, Poly)>> = alloc::vec![Vec::new(); self.ring.nvars()];
        let mut acc = Self::zero(target);
        for (m, c) in &self.terms {
            let mut prod = Self::constant(target, *c as i64);
            for i in 0..self.ring.nvars() {
                let e = m.exponent(i);
                if e == 0 {
                    continue;
                }
                let pw = match powers[i].iter().find(|(k, _)| *k == e) {
                    Some((_, p)) => p.clone(),
                    None => {
                        let p = images[i].checked_pow(e as u64)?;
                        powers[i].push((e, p.clone()));
                        p
                    }
                };
                prod = prod.checked_mul(&pw)?;
                if prod.is_zero() {
                    break;
                }
            }
            acc = &acc + &prod;
        }
        Ok(acc)
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: usize) -> Self {
        let f = self.ring.field;
        let p = f.characteristic();
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exponent(var) as u32;
            if e.is_multiple_of(p) {
                continue;
            }
            let mut exps = [0u32; MAX_VARS];
            for (i, slot) in exps.iter_mut().enumerate() {
                *slot = m.exponent(i) as u32;
            }
            exps[var] -= 1;
            let mono = Monomial::from_exponents(&exps).expect("derivative lowers exponents");
            terms.push((mono, f.mul(*c, e % p)));
        }
        Self::from_terms(&self.ring, terms)
    }

    /// Replaces each coefficient polynomial in the variables `base` (bitmask)
    /// by its image: variable `v` in `base` goes to `v^k`.
    pub fn raise_variables(&self, base: u32, k: u32) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut exps = [0u32; MAX_VARS];
            for (i, slot) in exps.iter_mut().enumerate() {
                let e = m.exponent(i) as u32;
                *slot = if base & (1 << i) != 0 { e * k } else { e };
            }
            terms.push((Monomial::from_exponents(&exps)?, *c));
        }
        Ok(Self::from_terms(&self.ring, terms))
    }

    /// Canonical text form, parseable by [`crate::corering::parse_poly`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let field = self.ring.field;
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let s = field.signed(*c);
            let (neg, mag) = if s < 0 { (true, (-s) as u64) } else { (false, s as u64) };
            match (k == 0, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
                continue;
            }
            let mut first = true;
            if mag != 1 {
                write!(f, "{mag}")?;
                first = false;
            }
            for i in 0..self.ring.nvars() {
                let e = m.exponent(i);
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(&self.ring.vars[i])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl<'a> core::ops::Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        self.checked_add(rhs).expect("ring mismatch in +")
    }
}

impl<'a> core::ops::Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.checked_sub(rhs).expect("ring mismatch in -")
    }
}

impl<'a> core::ops::Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.checked_mul(rhs).expect("ring mismatch or overflow in *")
    }
}

impl core::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(self.ring.field.neg(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Pow(u64),
}

/// Binary arithmetic with structural checking of the operands.
pub fn poly_arith(a: &Poly, b: &Poly, op: ArithOp) -> Result<Poly> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Pow(k) => {
            a.check_ring(b)?;
            a.checked_pow(k)
        }
    }
}
