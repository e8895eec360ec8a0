use std::sync::Arc;

use frobperf_core::corering::{Monomial, MonomialOrder, Poly, PolyRing, PrimeField};
use frobperf_core::groebner::{eliminate, groebner_basis, Budgets, GroebnerBasis, Ideal};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const NAMES: [&str; 3] = ["x", "y", "z"];

fn ring(p: u32, n: usize, lex: bool) -> Arc<PolyRing> {
    let order = if lex { MonomialOrder::lex() } else { MonomialOrder::grevlex() };
    PolyRing::new(PrimeField::new(p).unwrap(), NAMES[..n].iter().map(|s| s.to_string()).collect(), order).unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng, r: &Arc<PolyRing>, max_terms: u32, max_deg: u32) -> Poly {
    let p = r.field().characteristic();
    let n = r.nvars();
    let mut f = Poly::zero(r);
    for _ in 0..1 + rng.next_u32() % max_terms {
        let deg = rng.next_u32() % (max_deg + 1);
        let mut exps = vec![0u32; n];
        for _ in 0..deg {
            exps[(rng.next_u32() as usize) % n] += 1;
        }
        let c = 1 + rng.next_u32() % (p - 1);
        f = &f + &Poly::monomial(r, Monomial::from_exponents(&exps).unwrap(), c);
    }
    f
}

fn s_poly(f: &Poly, g: &Poly) -> Poly {
    let field = f.ring().field();
    let (lf, lg) = (f.leading_monomial().unwrap(), g.leading_monomial().unwrap());
    let l = lf.lcm(lg);
    let a = f.mul_monomial(&lf.quotient_of(&l), field.inv(f.leading_coef()).unwrap());
    let b = g.mul_monomial(&lg.quotient_of(&l), field.inv(g.leading_coef()).unwrap());
    &a - &b
}

fn check_basis(gb: &GroebnerBasis, gens: &[Poly], rng: &mut ChaCha8Rng) {
    let els = gb.elements();
    for i in 0..els.len() {
        for j in i + 1..els.len() {
            assert!(gb.normal_form(&s_poly(&els[i], &els[j])).unwrap().is_zero(), "S-pair {i},{j} of {gb:?}");
        }
        assert_eq!(els[i].leading_coef(), 1);
        for (j, g) in els.iter().enumerate() {
            if i != j {
                let lm = g.leading_monomial().unwrap();
                assert!(els[i].terms().iter().all(|(m, _)| !lm.divides(m)), "not reduced: {gb:?}");
            }
        }
    }
    for g in gens {
        assert!(gb.contains(g).unwrap());
    }
    let cof = gb.cofactors().unwrap();
    for (e, row) in els.iter().zip(cof) {
        let mut sum = Poly::zero(gb.ring());
        for (c, g) in row.iter().zip(gens) {
            sum = &sum + &(c * g);
        }
        assert_eq!(&sum, e, "cofactors of {e}");
    }
    for _ in 0..3 {
        let f = random_poly(rng, gb.ring(), 5, 4);
        let nf = gb.normal_form(&f).unwrap();
        assert_eq!(gb.normal_form(&nf).unwrap(), nf);
        let diff = &f - &nf;
        let lift = gb.lift(&diff).unwrap().expect("f - NF(f) lies in the ideal");
        let mut sum = Poly::zero(gb.ring());
        for (c, g) in lift.iter().zip(gens) {
            sum = &sum + &(c * g);
        }
        assert_eq!(sum, diff);
    }
}

#[test]
fn five_hundred_random_ideals() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let budgets = Budgets::default();
    let mut units = 0;
    for k in 0..500 {
        let p = if k % 2 == 0 { 3 } else { 5 };
        let n = 1 + (rng.next_u32() as usize) % 3;
        let r = ring(p, n, k % 3 == 0);
        let gens: Vec<Poly> = (0..1 + rng.next_u32() % 3).map(|_| random_poly(&mut rng, &r, 4, 3)).collect();
        let ideal = Ideal::new(&r, gens.clone()).unwrap();
        let gens = ideal.gens().to_vec();
        let gb = groebner_basis(&ideal, true, &budgets).unwrap();
        units += usize::from(gb.is_unit());
        check_basis(&gb, &gens, &mut rng);
        if n >= 2 {
            let keep = [n - 1];
            let elim = eliminate(&ideal, &keep, &budgets).unwrap();
            for g in elim.gens() {
                assert!(g.only_uses(1 << (n - 1)), "{g} uses eliminated variables");
                assert!(gb.contains(&g.transport(&r).unwrap()).unwrap());
            }
        }
    }
    assert!(units < 500);
}

proptest! {
    #[test]
    fn arithmetic_is_a_commutative_ring(seed in any::<u64>(), p in prop::sample::select(vec![3u32, 5, 7])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring(p, 3, false);
        let (a, b, c) = (random_poly(&mut rng, &r, 4, 3), random_poly(&mut rng, &r, 4, 3), random_poly(&mut rng, &r, 4, 3));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        let q = u64::from(p);
        prop_assert_eq!((&a + &b).pow(q), &a.pow(q) + &b.pow(q));
    }

    #[test]
    fn normal_forms_decide_membership(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = ring(3, 2, seed % 2 == 0);
        let gens = vec![random_poly(&mut rng, &r, 3, 2), random_poly(&mut rng, &r, 3, 2)];
        let gb = groebner_basis(&Ideal::new(&r, gens.clone()).unwrap(), false, &Budgets::default()).unwrap();
        let m = &(&random_poly(&mut rng, &r, 3, 2) * &gens[0]) + &(&random_poly(&mut rng, &r, 3, 2) * &gens[1]);
        prop_assert!(gb.contains(&m).unwrap());
    }
}
