//! Dense univariate arithmetic over 𝔽_p and complete factorization
//! (square-free, distinct-degree, then seeded Cantor–Zassenhaus splitting).

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::field::{Coef, PrimeField};
use super::monomial::Monomial;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Coefficients from the constant term upwards, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dense(pub Vec<Coef>);

impl Dense {
    fn trim(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn is_one(&self) -> bool {
        self.0 == [1]
    }

    fn lc(&self) -> Coef {
        *self.0.last().unwrap_or(&0)
    }
}

#[derive(Clone, Copy)]
struct Ops {
    f: PrimeField,
}

impl Ops {
    fn one(&self) -> Dense {
        Dense(vec![1])
    }

    fn x(&self) -> Dense {
        Dense(vec![0, 1])
    }

    fn add(&self, a: &Dense, b: &Dense) -> Dense {
        let n = a.0.len().max(b.0.len());
        let mut out = vec![0; n];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.f.add(*a.0.get(i).unwrap_or(&0), *b.0.get(i).unwrap_or(&0));
        }
        Dense(out).trim()
    }

    fn sub(&self, a: &Dense, b: &Dense) -> Dense {
        let n = a.0.len().max(b.0.len());
        let mut out = vec![0; n];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.f.sub(*a.0.get(i).unwrap_or(&0), *b.0.get(i).unwrap_or(&0));
        }
        Dense(out).trim()
    }

    fn mul(&self, a: &Dense, b: &Dense) -> Dense {
        if a.is_zero() || b.is_zero() {
            return Dense(Vec::new());
        }
        let mut out = vec![0; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = self.f.add(out[i + j], self.f.mul(x, y));
            }
        }
        Dense(out).trim()
    }

    fn scale(&self, a: &Dense, c: Coef) -> Dense {
        Dense(a.0.iter().map(|&x| self.f.mul(x, c)).collect()).trim()
    }

    fn monic(&self, a: &Dense) -> Dense {
        match self.f.inv(a.lc()) {
            Some(inv) => self.scale(a, inv),
            None => a.clone(),
        }
    }

    fn divrem(&self, a: &Dense, b: &Dense) -> (Dense, Dense) {
        let db = b.degree().expect("division by zero polynomial");
        let inv = self.f.inv(b.lc()).unwrap();
        let mut r = a.0.clone();
        if r.len() <= db {
            return (Dense(Vec::new()), a.clone());
        }
        let mut q = vec![0; r.len() - db];
        for i in (db..r.len()).rev() {
            let c = self.f.mul(r[i], inv);
            if c == 0 {
                continue;
            }
            q[i - db] = c;
            for (j, &bj) in b.0.iter().enumerate() {
                r[i - db + j] = self.f.sub(r[i - db + j], self.f.mul(c, bj));
            }
        }
        r.truncate(db);
        (Dense(q).trim(), Dense(r).trim())
    }

    fn rem(&self, a: &Dense, b: &Dense) -> Dense {
        self.divrem(a, b).1
    }

    fn gcd(&self, a: &Dense, b: &Dense) -> Dense {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    fn derivative(&self, a: &Dense) -> Dense {
        let p = self.f.characteristic() as usize;
        Dense(a.0.iter().enumerate().skip(1).map(|(i, &c)| self.f.mul(c, (i % p) as Coef)).collect()).trim()
    }

    fn powmod(&self, a: &Dense, mut e: u64, m: &Dense) -> Dense {
        let mut base = self.rem(a, m);
        let mut acc = self.rem(&self.one(), m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &base), m);
            }
            base = self.rem(&self.mul(&base, &base), m);
            e >>= 1;
        }
        acc
    }

    /// `a^(1/p)` for `a` with only exponents divisible by p (coefficients are fixed).
    fn pth_root(&self, a: &Dense) -> Dense {
        let p = self.f.characteristic() as usize;
        Dense(a.0.iter().step_by(p).copied().collect()).trim()
    }

    fn square_free(&self, f: &Dense) -> Vec<(Dense, u32)> {
        let mut out = Vec::new();
        let c0 = self.gcd(f, &self.derivative(f));
        let mut w = self.divrem(f, &c0).0;
        let mut c = c0;
        let mut i = 1u32;
        while !w.is_one() {
            let y = self.gcd(&w, &c);
            let fac = self.divrem(&w, &y).0;
            if !fac.is_one() {
                out.push((self.monic(&fac), i));
            }
            w = y.clone();
            c = self.divrem(&c, &y).0;
            i += 1;
        }
        if c.degree().unwrap_or(0) > 0 {
            let p = self.f.characteristic();
            for (g, j) in self.square_free(&self.monic(&self.pth_root(&c))) {
                out.push((g, j * p));
            }
        }
        out
    }

    fn distinct_degree(&self, f: &Dense) -> Vec<(Dense, usize)> {
        let p = self.f.characteristic() as u64;
        let mut out = Vec::new();
        let mut rest = f.clone();
        let mut xq = self.x();
        let mut d = 1;
        while rest.degree().unwrap_or(0) >= 2 * d {
            xq = self.powmod(&xq, p, &rest);
            let g = self.gcd(&rest, &self.sub(&xq, &self.x()));
            if !g.is_one() {
                rest = self.divrem(&rest, &g).0;
                xq = self.rem(&xq, &rest);
                out.push((g, d));
            }
            d += 1;
        }
        if rest.degree().unwrap_or(0) > 0 {
            let deg = rest.degree().unwrap();
            out.push((rest, deg));
        }
        out
    }

    /// Splits a product of distinct monic irreducibles of degree `d`.
    fn equal_degree(&self, f: &Dense, d: usize, rng: &mut ChaCha8Rng) -> Vec<Dense> {
        let n = f.degree().unwrap();
        if n == d {
            return vec![self.monic(f)];
        }
        let p = self.f.characteristic() as u64;
        loop {
            let a = Dense((0..n).map(|_| rng.next_u32() % p as u32).collect()).trim();
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let b = if p == 2 {
                // trace map a + a^2 + ... + a^(2^(d-1))
                let mut t = self.rem(&a, f);
                let mut acc = t.clone();
                for _ in 1..d {
                    t = self.rem(&self.mul(&t, &t), f);
                    acc = self.add(&acc, &t);
                }
                acc
            } else {
                // a^((p^d - 1)/2) = (a * a^p * ... * a^(p^(d-1)))^((p-1)/2)
                let mut frob = self.rem(&a, f);
                let mut norm = frob.clone();
                for _ in 1..d {
                    frob = self.powmod(&frob, p, f);
                    norm = self.rem(&self.mul(&norm, &frob), f);
                }
                let h = self.powmod(&norm, (p - 1) / 2, f);
                self.sub(&h, &self.one())
            };
            let g = self.gcd(f, &b);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let h = self.divrem(f, &g).0;
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&self.monic(&h), d, rng));
                return out;
            }
        }
    }
}

/// Result of factoring `f = unit * prod(factor^mult)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Coef,
    /// Monic irreducible factors with multiplicities, sorted by degree and then coefficients.
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self, template: &Poly) -> Poly {
        let mut acc = Poly::constant(template.ring(), self.unit as i64);
        for (f, m) in &self.factors {
            acc = &acc * &f.pow(*m as u64);
        }
        acc
    }
}

pub(crate) fn to_dense(f: &Poly, var: usize) -> Dense {
    let deg = f.degree_in(var) as usize;
    let mut out = vec![0; deg + 1];
    for (m, c) in f.terms() {
        out[m.exponent(var) as usize] = *c;
    }
    Dense(out).trim()
}

pub(crate) fn from_dense(template: &Poly, var: usize, d: &Dense) -> Poly {
    let terms = d
        .0
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (Monomial::var(var, i as u16), c))
        .collect();
    Poly::from_terms(template.ring(), terms)
}

/// Factors a nonzero univariate polynomial into monic irreducibles over 𝔽_p.
/// The random choices in the equal-degree step are drawn from `seed`.
pub fn univariate_factor(f: &Poly, seed: u64) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::Precondition("a nonzero polynomial".into()));
    }
    if f.support().count_ones() > 1 {
        return Err(Error::Structure(alloc::format!("`{f}` is not univariate")));
    }
    let ops = Ops { f: f.ring().field() };
    let Some(var) = f.univariate_var() else {
        return Ok(Factorization { unit: f.leading_coef(), factors: Vec::new() });
    };
    let dense = to_dense(f, var);
    let unit = dense.lc();
    let monic = ops.monic(&dense);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors: Vec<(Dense, u32)> = Vec::new();
    for (sq, mult) in ops.square_free(&monic) {
        for (part, d) in ops.distinct_degree(&sq) {
            for irr in ops.equal_degree(&part, d, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort_by(|a, b| a.0 .0.len().cmp(&b.0 .0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(Factorization {
        unit,
        factors: factors.into_iter().map(|(d, m)| (from_dense(f, var, &d), m)).collect(),
    })
}

/// Square-free part of a univariate polynomial (monic).
pub fn square_free_part(f: &Poly) -> Result<Poly> {
    let fac = univariate_factor(f, 0)?;
    let mut acc = Poly::one(f.ring());
    for (g, _) in &fac.factors {
        acc = &acc * g;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corering::{parse_poly, MonomialOrder, PolyRing};
    use alloc::string::ToString;
    use alloc::sync::Arc;
    use proptest::prelude::*;

    fn ring(p: u32) -> Arc<PolyRing> {
        PolyRing::new(PrimeField::new(p).unwrap(), vec!["x".to_string(), "y".to_string()], MonomialOrder::grevlex()).unwrap()
    }

    /// Exhaustive irreducibility: no monic factor of degree 1..=deg/2.
    fn brute_irreducible(ops: &Ops, f: &Dense) -> bool {
        let n = f.degree().unwrap();
        let p = ops.f.characteristic();
        for d in 1..=n / 2 {
            let count = (p as u64).pow(d as u32);
            for idx in 0..count {
                let mut coeffs = Vec::with_capacity(d + 1);
                let mut k = idx;
                for _ in 0..d {
                    coeffs.push((k % p as u64) as Coef);
                    k /= p as u64;
                }
                coeffs.push(1);
                if ops.rem(f, &Dense(coeffs)).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    fn factor_strs(p: u32, s: &str) -> Vec<(alloc::string::String, u32)> {
        let r = ring(p);
        let f = parse_poly(&r, s).unwrap();
        let fac = univariate_factor(&f, 0).unwrap();
        assert_eq!(fac.expand(&f), f);
        fac.factors.iter().map(|(g, m)| (g.to_string(), *m)).collect()
    }

    #[test]
    fn difference_of_squares_mod_five() {
        assert_eq!(factor_strs(5, "x^2 - 1"), vec![("x + 1".into(), 1), ("x - 1".into(), 1)]);
    }

    #[test]
    fn x2_plus_1_irreducible_mod_three() {
        assert_eq!(factor_strs(3, "x^2 + 1"), vec![("x^2 + 1".into(), 1)]);
    }

    #[test]
    fn all_roots_mod_three() {
        assert_eq!(factor_strs(3, "x^3 - x"), vec![("x".into(), 1), ("x + 1".into(), 1), ("x - 1".into(), 1)]);
    }

    #[test]
    fn multiplicities_and_pth_powers() {
        // x^2 (x - 1) over F_5
        assert_eq!(factor_strs(5, "x^3 - x^2"), vec![("x".into(), 2), ("x - 1".into(), 1)]);
        // (y^3 - 1) = (y - 1)^3 over F_3: derivative vanishes
        assert_eq!(factor_strs(3, "y^3 - 1"), vec![("y - 1".into(), 3)]);
        assert_eq!(factor_strs(2, "x^4 + 1"), vec![("x + 1".into(), 4)]);
    }

    #[test]
    fn rejects_non_univariate() {
        let r = ring(3);
        let f = parse_poly(&r, "x*y + 1").unwrap();
        assert!(matches!(univariate_factor(&f, 0), Err(Error::Structure(_))));
        assert!(univariate_factor(&Poly::zero(&r), 0).is_err());
        let c = univariate_factor(&Poly::constant(&r, 2), 0).unwrap();
        assert_eq!((c.unit, c.factors.len()), (2, 0));
    }

    #[test]
    fn deterministic_per_seed() {
        let r = ring(7);
        let f = parse_poly(&r, "x^6 + 3*x^5 + x^3 + 2*x + 5").unwrap();
        assert_eq!(univariate_factor(&f, 11).unwrap(), univariate_factor(&f, 11).unwrap());
        // factorization is unique, so any seed gives the same sorted answer
        assert_eq!(univariate_factor(&f, 11).unwrap(), univariate_factor(&f, 12).unwrap());
    }

    proptest! {
        #[test]
        fn factors_remultiply_and_are_irreducible(
            p in proptest::sample::select(vec![2u32, 3, 5, 7]),
            coeffs in proptest::collection::vec(0u32..7, 1..9),
            seed in any::<u64>(),
        ) {
            let r = ring(p);
            let terms = coeffs.iter().enumerate().map(|(i, &c)| (Monomial::var(0, i as u16), c % p)).collect();
            let f = Poly::from_terms(&r, terms);
            prop_assume!(!f.is_zero());
            let fac = univariate_factor(&f, seed).unwrap();
            prop_assert_eq!(fac.expand(&f), f.clone());
            let ops = Ops { f: r.field() };
            for (g, _) in &fac.factors {
                prop_assert_eq!(g.leading_coef(), 1);
                let d = to_dense(g, 0);
                if d.degree().unwrap() <= 4 {
                    prop_assert!(brute_irreducible(&ops, &d), "{} reducible", g);
                }
            }
        }
    }
}
