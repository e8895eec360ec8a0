//! Arithmetic in the prime field 𝔽_p for word-sized p.

use crate::error::{Error, Result};

/// Elements are canonical residues in `0..p`.
pub type Coef = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub const MAX_MODULUS: u32 = 1 << 16;

    pub fn new(p: u32) -> Result<Self> {
        if p > Self::MAX_MODULUS {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary signed integer into the field.
    pub fn from_i64(&self, v: i64) -> Coef {
        v.rem_euclid(self.p as i64) as Coef
    }

    #[inline]
    pub fn add(&self, a: Coef, b: Coef) -> Coef {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Coef, b: Coef) -> Coef {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Coef) -> Coef {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Coef, b: Coef) -> Coef {
        ((a as u64 * b as u64) % self.p as u64) as Coef
    }

    pub fn pow(&self, mut a: Coef, mut e: u64) -> Coef {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Coef) -> Option<Coef> {
        if a == 0 {
            return None;
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.from_i64(t0))
    }

    /// Symmetric representative in `(-p/2, p/2]`, used for printing.
    pub fn signed(&self, a: Coef) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_large_moduli() {
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(Error::NotPrime(1)));
        assert!(matches!(PrimeField::new(70001), Err(Error::ModulusOutOfRange(_))));
        assert!(PrimeField::new(65521).is_ok());
        assert!(PrimeField::new(2).is_ok());
    }

    #[test]
    fn inverses_exhaustive_small() {
        for p in [2u32, 3, 5, 7, 101] {
            let f = PrimeField::new(p).unwrap();
            assert_eq!(f.inv(0), None);
            for a in 1..p {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn largest_modulus_does_not_overflow() {
        let f = PrimeField::new(65521).unwrap();
        let a = 65520;
        assert_eq!(f.mul(a, a), 1);
        assert_eq!(f.add(a, a), 65519);
        assert_eq!(f.signed(a), -1);
    }

    proptest::proptest! {
        #[test]
        fn field_axioms_sampled(p in proptest::sample::select(alloc::vec![2u32, 3, 5, 7, 13, 65521]),
                                a in 0u32..65521, b in 0u32..65521, c in 0u32..65521) {
            let f = PrimeField::new(p).unwrap();
            let (a, b, c) = (a % p, b % p, c % p);
            proptest::prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            proptest::prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            proptest::prop_assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                proptest::prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            // Fermat: a^p = a
            proptest::prop_assert_eq!(f.pow(a, p as u64), a);
        }
    }
}
