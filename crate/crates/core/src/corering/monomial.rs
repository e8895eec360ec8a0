use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Upper bound on the number of variables of any ambient ring.
pub const MAX_VARS: usize = 24;

/// Exponent vector over a fixed-capacity variable set.
///
/// Unused trailing slots are always zero, so monomials of rings with fewer
/// variables compare and multiply without knowing the variable count.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
    deg: u32,
    mask: u32,
}

impl core::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let last = self.exps.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        f.debug_list().entries(&self.exps[..last]).finish()
    }
}

impl Default for Monomial {
    fn default() -> Self {
        Self::one()
    }
}

impl Monomial {
    pub const fn one() -> Self {
        Self { exps: [0; MAX_VARS], deg: 0, mask: 0 }
    }

    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_VARS {
            return Err(Error::TooManyVariables(exps.len()));
        }
        let mut m = Self::one();
        for (i, &e) in exps.iter().enumerate() {
            if e > u16::MAX as u32 {
                return Err(Error::ExponentOverflow);
            }
            m.exps[i] = e as u16;
        }
        m.refresh();
        Ok(m)
    }

    pub fn var(i: usize, e: u16) -> Self {
        let mut m = Self::one();
        m.exps[i] = e;
        m.refresh();
        m
    }

    fn refresh(&mut self) {
        let mut deg = 0u32;
        let mut mask = 0u32;
        for (i, &e) in self.exps.iter().enumerate() {
            deg += e as u32;
            if e != 0 {
                mask |= 1 << i;
            }
        }
        self.deg = deg;
        self.mask = mask;
    }

    #[inline]
    pub fn exponent(&self, i: usize) -> u16 {
        self.exps[i]
    }

    #[inline]
    pub fn exponents(&self) -> &[u16; MAX_VARS] {
        &self.exps
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg
    }

    #[inline]
    pub fn support_mask(&self) -> u32 {
        self.mask
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    /// Product; `None` on exponent overflow.
    #[inline]
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let mut out = *self;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].checked_add(other.exps[i])?;
        }
        out.deg = self.deg + other.deg;
        out.mask = self.mask | other.mask;
        Some(out)
    }

    #[inline]
    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("monomial exponent overflow")
    }

    #[inline]
    pub fn divides(&self, other: &Self) -> bool {
        if self.mask & !other.mask != 0 || self.deg > other.deg {
            return false;
        }
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    #[inline]
    pub fn quotient_of(&self, other: &Self) -> Self {
        let mut out = *other;
        for i in 0..MAX_VARS {
            out.exps[i] = other.exps[i] - self.exps[i];
        }
        out.refresh();
        out
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].max(other.exps[i]);
        }
        out.refresh();
        out
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].min(other.exps[i]);
        }
        out.refresh();
        out
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.mask & other.mask == 0
    }

    /// Raises every exponent by the factor `k`.
    pub fn scale(&self, k: u32) -> Result<Self> {
        let mut out = *self;
        for i in 0..MAX_VARS {
            let e = self.exps[i] as u32 * k;
            if e > u16::MAX as u32 {
                return Err(Error::ExponentOverflow);
            }
            out.exps[i] = e as u16;
        }
        out.refresh();
        Ok(out)
    }

    /// Degree restricted to variables `lo..hi`.
    #[inline]
    fn partial_degree(&self, lo: usize, hi: usize) -> u32 {
        self.exps[lo..hi].iter().map(|&e| e as u32).sum()
    }

    /// Applies a variable relabelling: variable `i` becomes `map[i]`.
    pub fn relabel(&self, map: &[usize]) -> Self {
        let mut out = Self::one();
        for (i, &e) in self.exps.iter().enumerate() {
            if e != 0 {
                out.exps[map[i]] += e;
            }
        }
        out.refresh();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    GrevLex,
    /// Grevlex on the first `k` variables, ties broken by grevlex on the rest.
    /// Any monomial involving the first block is larger than every monomial
    /// free of it, which is what elimination needs.
    Block(usize),
}

/// An admissible monomial order: an order kind applied after a permutation
/// of the variables (position `i` of the order looks at variable `perm[i]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    perm: Option<[u8; MAX_VARS]>,
}

impl MonomialOrder {
    pub const fn lex() -> Self {
        Self { kind: OrderKind::Lex, perm: None }
    }

    pub const fn grevlex() -> Self {
        Self { kind: OrderKind::GrevLex, perm: None }
    }

    pub const fn block(k: usize) -> Self {
        Self { kind: OrderKind::Block(k), perm: None }
    }

    /// Same kind, with the variables visited in the order `perm`.
    pub fn with_permutation(self, perm: &[usize]) -> Result<Self> {
        if perm.len() > MAX_VARS {
            return Err(Error::TooManyVariables(perm.len()));
        }
        let mut seen = [false; MAX_VARS];
        let mut full = [0u8; MAX_VARS];
        for (i, &v) in perm.iter().enumerate() {
            if v >= perm.len() || seen[v] {
                return Err(Error::Structure("variable permutation is not a bijection".into()));
            }
            seen[v] = true;
            full[i] = v as u8;
        }
        for (i, slot) in full.iter_mut().enumerate().skip(perm.len()) {
            *slot = i as u8;
        }
        let identity = full.iter().enumerate().all(|(i, &v)| v as usize == i);
        Ok(Self { kind: self.kind, perm: if identity { None } else { Some(full) } })
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn permutation(&self) -> Option<&[u8; MAX_VARS]> {
        self.perm.as_ref()
    }

    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        match self.perm {
            None => compare(self.kind, a, b),
            Some(perm) => {
                let pa = permute(a, &perm);
                let pb = permute(b, &perm);
                compare(self.kind, &pa, &pb)
            }
        }
    }
}

fn permute(m: &Monomial, perm: &[u8; MAX_VARS]) -> Monomial {
    let mut out = *m;
    for i in 0..MAX_VARS {
        out.exps[i] = m.exps[perm[i] as usize];
    }
    out.refresh();
    out
}

#[inline]
fn compare(kind: OrderKind, a: &Monomial, b: &Monomial) -> Ordering {
    match kind {
        OrderKind::Lex => {
            for i in 0..MAX_VARS {
                match a.exps[i].cmp(&b.exps[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        }
        OrderKind::GrevLex => grevlex_range(a, b, 0, MAX_VARS, a.deg, b.deg),
        OrderKind::Block(k) => {
            let (da, db) = (a.partial_degree(0, k), b.partial_degree(0, k));
            match grevlex_range(a, b, 0, k, da, db) {
                Ordering::Equal => grevlex_range(a, b, k, MAX_VARS, a.deg - da, b.deg - db),
                o => o,
            }
        }
    }
}

#[inline]
fn grevlex_range(a: &Monomial, b: &Monomial, lo: usize, hi: usize, da: u32, db: u32) -> Ordering {
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (lo..hi).rev() {
        match a.exps[i].cmp(&b.exps[i]) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn mono(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e).unwrap()
    }

    #[test]
    fn grevlex_breaks_ties_on_last_variable() {
        let o = MonomialOrder::grevlex();
        // x*z < y^2 in grevlex with x > y > z
        assert_eq!(o.cmp(&mono(&[1, 0, 1]), &mono(&[0, 2, 0])), Ordering::Less);
        assert_eq!(o.cmp(&mono(&[2, 0, 0]), &mono(&[0, 0, 3])), Ordering::Less);
        let l = MonomialOrder::lex();
        assert_eq!(l.cmp(&mono(&[1, 0, 0]), &mono(&[0, 5, 5])), Ordering::Greater);
    }

    #[test]
    fn block_order_eliminates_first_block() {
        let o = MonomialOrder::block(1);
        assert_eq!(o.cmp(&mono(&[1, 0]), &mono(&[0, 9])), Ordering::Greater);
        assert_eq!(o.cmp(&mono(&[0, 2]), &mono(&[0, 1])), Ordering::Greater);
    }

    #[test]
    fn permutation_swaps_roles() {
        let o = MonomialOrder::lex().with_permutation(&[1, 0]).unwrap();
        assert_eq!(o.cmp(&mono(&[1, 0]), &mono(&[0, 1])), Ordering::Less);
        assert!(MonomialOrder::lex().with_permutation(&[0, 0]).is_err());
    }

    fn arb_order() -> impl Strategy<Value = MonomialOrder> {
        prop_oneof![
            Just(MonomialOrder::lex()),
            Just(MonomialOrder::grevlex()),
            (0usize..5).prop_map(MonomialOrder::block),
            Just(MonomialOrder::grevlex().with_permutation(&[3, 1, 0, 2]).unwrap()),
            Just(MonomialOrder::block(2).with_permutation(&[2, 0, 3, 1]).unwrap()),
        ]
    }

    fn arb_mono() -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(0u32..6, 4).prop_map(|v| mono(&v))
    }

    proptest! {
        #[test]
        fn orders_are_admissible(o in arb_order(), a in arb_mono(), b in arb_mono(), m in arb_mono()) {
            prop_assert_ne!(o.cmp(&Monomial::one(), &a), Ordering::Greater);
            let ab = o.cmp(&a, &b);
            prop_assert_eq!(o.cmp(&a.mul(&m), &b.mul(&m)), ab);
            prop_assert_eq!(o.cmp(&b, &a), ab.reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
        }

        #[test]
        fn orders_are_transitive(o in arb_order(), ms in proptest::collection::vec(arb_mono(), 3)) {
            let mut sorted: Vec<Monomial> = ms.clone();
            sorted.sort_by(|x, y| o.cmp(x, y));
            prop_assert_ne!(o.cmp(&sorted[0], &sorted[2]), Ordering::Greater);
        }

        #[test]
        fn divisibility_matches_quotient(a in arb_mono(), b in arb_mono()) {
            let ab = a.mul(&b);
            prop_assert!(a.divides(&ab));
            prop_assert_eq!(a.quotient_of(&ab), b);
            prop_assert!(a.divides(&a.lcm(&b)) && b.divides(&a.lcm(&b)));
            prop_assert!(a.gcd(&b).divides(&a));
        }
    }
}
