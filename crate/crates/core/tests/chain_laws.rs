use std::sync::Arc;

use frobperf_core::corering::PrimeField;
use frobperf_core::fpalg::{Base, Presentation, PresentationOptions};
use frobperf_core::groebner::Budgets;
use frobperf_core::perfection::{power_witness, preperfect, ChainStatus, PreperfectConfig};
use frobperf_core::subalg::{frob_image_lazy, frob_image_subalgebra, subalgebra_equal};

fn opts() -> PresentationOptions {
    PresentationOptions::default()
}

fn field(p: u32, gens: &[&str], rels: &[&str]) -> Arc<Presentation> {
    Arc::new(Presentation::over_field(PrimeField::new(p).unwrap(), gens, rels, &opts()).unwrap())
}

fn over(r: &Arc<Presentation>, gens: &[&str], rels: &[&str]) -> Arc<Presentation> {
    Arc::new(Presentation::from_text(Base::Algebra(r.clone()), gens, rels, &opts()).unwrap())
}

/// The worked examples, each with the deepest level that is cheap to build.
fn corpus() -> Vec<(&'static str, Arc<Presentation>, u32)> {
    let mut out = vec![
        ("etale", over(&field(3, &["u"], &[]), &["x"], &["x^3 - x - u"]), 3),
        ("inseparable", over(&field(3, &["u"], &[]), &["x"], &["x^3 - u"]), 3),
        ("two points", field(5, &["x", "y"], &["x*y", "x + y - 1"]), 3),
        ("fat point and point", field(5, &["x"], &["x^2*(x - 1)"]), 3),
        ("line", field(5, &["x"], &[]), 3),
        ("conjugate points", field(3, &["x"], &["x^2 + 1"]), 3),
    ];
    for p in [3, 5] {
        let r = field(p, &["u", "v"], &["u*v"]);
        out.push(("nodal", over(&r, &["x", "y", "t"], &["x*y - u", "t*(x - y) - 1"]), 3));
        out.push(("candidate", over(&r, &["a"], &["u*a", "a^2 - v^2"]), 3));
        let r = field(p, &["u"], &[]);
        out.push(("separated line", over(&r, &["x", "y", "t"], &["x*y - u", "t*(x - y) - 1"]), 3));
    }
    out
}

#[test]
fn chains_are_decreasing() {
    for (name, a, depth) in corpus() {
        let p = u64::from(a.characteristic());
        for n in 1..depth {
            let b_n = frob_image_lazy(&a, n).unwrap();
            for i in 0..a.ngens() {
                let next = a.reduce(&a.gen(i).pow(p.pow(n + 1))).unwrap();
                let w = power_witness(&a, &b_n, n, &a.gen(i).pow(p)).unwrap();
                assert!(b_n.verify_witness(&next, &w).unwrap(), "{name}: B_{} ⊄ B_{n}", n + 1);
            }
        }
    }
}

#[test]
fn stabilization_persists() {
    let budgets = Budgets::default();
    let mut stabilized = 0;
    for (name, a, _) in corpus() {
        let rep = preperfect(&a, &PreperfectConfig { max_steps: 2, ..Default::default() }).unwrap();
        let ChainStatus::Stabilized { at } = rep.status else { continue };
        stabilized += 1;
        let mut prev = frob_image_subalgebra(&a, at, &budgets).unwrap();
        for n in at + 1..=at + 2 {
            let next = frob_image_subalgebra(&a, n, &budgets).unwrap();
            assert!(subalgebra_equal(&prev, &next, &budgets).unwrap(), "{name}: B_{} ≠ B_{n}", n - 1);
            prev = next;
        }
    }
    assert!(stabilized >= 4);
}
