//! Buchberger's algorithm over raw term lists, with Gebauer–Möller pair
//! pruning and optional cofactor tracking.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::Budgets;
use crate::corering::{add_scaled, Coef, Monomial, MonomialOrder, PrimeField, Term};
use crate::error::{Budget, Error, Result};

/// Per-generator cofactors of one polynomial.
pub(crate) type Cofactors = Vec<Vec<Term>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Smallest lcm first.
    Normal,
    /// Smallest sugar degree first, then smallest lcm.
    Sugar,
}

pub(crate) struct Engine<'a> {
    pub field: PrimeField,
    pub order: &'a MonomialOrder,
    pub budgets: &'a Budgets,
    pub ngens: Option<usize>,
}

#[derive(Clone)]
pub(crate) struct Entry {
    pub terms: Vec<Term>,
    pub lm: Monomial,
    pub sugar: u32,
    pub cof: Option<Cofactors>,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

pub(crate) struct Outcome {
    pub elements: Vec<(Vec<Term>, Option<Cofactors>)>,
    pub pairs_processed: usize,
}

impl<'a> Engine<'a> {
    fn cof_axpy(&self, a: &mut Option<Cofactors>, c: Coef, m: &Monomial, b: &Option<Cofactors>) {
        if let (Some(a), Some(b)) = (a.as_mut(), b.as_ref()) {
            for (ai, bi) in a.iter_mut().zip(b.iter()) {
                if !bi.is_empty() {
                    *ai = add_scaled(self.field, self.order, ai, c, m, bi);
                }
            }
        }
    }

    fn cof_scale(&self, a: &mut Option<Cofactors>, c: Coef) {
        if let Some(a) = a.as_mut() {
            for ai in a.iter_mut() {
                for t in ai.iter_mut() {
                    t.1 = self.field.mul(t.1, c);
                }
            }
        }
    }

    fn check_degree(&self, terms: &[Term]) -> Result<()> {
        if terms.iter().any(|t| t.0.degree() > self.budgets.max_degree) {
            return Err(Error::BudgetExceeded(Budget::Degree));
        }
        Ok(())
    }

    /// Fully reduces `h` by the entries listed in `active`.
    pub fn reduce(
        &self,
        mut work: Vec<Term>,
        mut cof: Option<Cofactors>,
        basis: &[Entry],
        active: &[usize],
    ) -> Result<(Vec<Term>, Option<Cofactors>)> {
        let mut rem: Vec<Term> = Vec::new();
        let mut idx = 0;
        while idx < work.len() {
            let (t, c) = work[idx];
            let divisor = active.iter().map(|&k| &basis[k]).find(|e| e.lm.divides(&t));
            match divisor {
                None => {
                    rem.push((t, c));
                    idx += 1;
                }
                Some(e) => {
                    // entries are monic
                    let m = e.lm.quotient_of(&t);
                    let f = self.field.neg(c);
                    let tail = add_scaled(self.field, self.order, &work[idx + 1..], f, &m, &e.terms[1..]);
                    self.check_degree(&tail[..tail.len().min(1)])?;
                    self.cof_axpy(&mut cof, f, &m, &e.cof);
                    work = tail;
                    idx = 0;
                }
            }
        }
        Ok((rem, cof))
    }

    fn make_monic(&self, terms: &mut [Term], cof: &mut Option<Cofactors>) {
        if let Some(lc) = terms.first().map(|t| t.1) {
            if lc != 1 {
                let inv = self.field.inv(lc).unwrap();
                for t in terms.iter_mut() {
                    t.1 = self.field.mul(t.1, inv);
                }
                self.cof_scale(cof, inv);
            }
        }
    }

    fn spoly(&self, a: &Entry, b: &Entry, lcm: &Monomial) -> (Vec<Term>, Option<Cofactors>) {
        let ma = a.lm.quotient_of(lcm);
        let mb = b.lm.quotient_of(lcm);
        let minus = self.field.neg(1);
        let left = add_scaled(self.field, self.order, &[], 1, &ma, &a.terms[1..]);
        let s = add_scaled(self.field, self.order, &left, minus, &mb, &b.terms[1..]);
        let mut cof = a.cof.as_ref().map(|c| vec![Vec::new(); c.len()]);
        self.cof_axpy(&mut cof, 1, &ma, &a.cof);
        self.cof_axpy(&mut cof, minus, &mb, &b.cof);
        (s, cof)
    }

    fn select(&self, pairs: &[Pair], strategy: Selection) -> usize {
        let mut best = 0;
        for k in 1..pairs.len() {
            let (a, b) = (&pairs[k], &pairs[best]);
            let ord = match strategy {
                Selection::Sugar => a.sugar.cmp(&b.sugar).then_with(|| self.order.cmp(&a.lcm, &b.lcm)),
                Selection::Normal => self.order.cmp(&a.lcm, &b.lcm),
            }
            .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)));
            if ord == Ordering::Less {
                best = k;
            }
        }
        best
    }

    /// Gebauer–Möller update after appending `basis[h]`.
    fn update(&self, basis: &[Entry], active: &mut Vec<usize>, pairs: &mut Vec<Pair>, h: usize) {
        let lh = basis[h].lm;
        let sugar_h = basis[h].sugar;
        let mut cands: Vec<Pair> = active
            .iter()
            .map(|&g| {
                let lcm = lh.lcm(&basis[g].lm);
                let sugar = (sugar_h + lcm.degree() - lh.degree()).max(basis[g].sugar + lcm.degree() - basis[g].lm.degree());
                Pair { i: g, j: h, lcm, sugar }
            })
            .collect();
        let mut kept: Vec<Pair> = Vec::new();
        while !cands.is_empty() {
            let p1 = cands.remove(0);
            let coprime = lh.is_coprime(&basis[p1.i].lm);
            let dominated = cands.iter().chain(kept.iter()).any(|p2| p2.lcm.divides(&p1.lcm));
            if coprime || !dominated {
                kept.push(p1);
            }
        }
        kept.retain(|p| !lh.is_coprime(&basis[p.i].lm));
        pairs.retain(|p| {
            !(lh.divides(&p.lcm)
                && lh.lcm(&basis[p.i].lm) != p.lcm
                && lh.lcm(&basis[p.j].lm) != p.lcm)
        });
        pairs.extend(kept);
        active.retain(|&g| !lh.divides(&basis[g].lm));
        active.push(h);
    }

    pub fn run(&self, input: Vec<Vec<Term>>, strategy: Selection) -> Result<Outcome> {
        let mut basis: Vec<Entry> = Vec::new();
        let mut active: Vec<usize> = Vec::new();
        let mut pairs: Vec<Pair> = Vec::new();

        let push = |this: &Self,
                    terms: Vec<Term>,
                    cof: Option<Cofactors>,
                    sugar: u32,
                    basis: &mut Vec<Entry>,
                    active: &mut Vec<usize>,
                    pairs: &mut Vec<Pair>|
         -> Result<bool> {
            let (mut red, mut cof) = this.reduce(terms, cof, basis, active)?;
            if red.is_empty() {
                return Ok(false);
            }
            this.check_degree(&red)?;
            this.make_monic(&mut red, &mut cof);
            let lm = red[0].0;
            basis.push(Entry { terms: red, lm, sugar, cof });
            let h = basis.len() - 1;
            this.update(basis, active, pairs, h);
            Ok(lm.is_one())
        };

        for (j, g) in input.into_iter().enumerate() {
            if g.is_empty() {
                continue;
            }
            let cof = self.ngens.map(|n| {
                let mut v = vec![Vec::new(); n];
                v[j] = vec![(Monomial::one(), 1)];
                v
            });
            let sugar = g.iter().map(|t| t.0.degree()).max().unwrap_or(0);
            if push(self, g, cof, sugar, &mut basis, &mut active, &mut pairs)? {
                return Ok(unit_outcome(&basis, 0));
            }
        }

        let mut processed = 0usize;
        while !pairs.is_empty() {
            if processed >= self.budgets.max_pairs {
                return Err(Error::BudgetExceeded(Budget::Pairs));
            }
            processed += 1;
            let k = self.select(&pairs, strategy);
            let pair = pairs.swap_remove(k);
            if pair.lcm.degree() > self.budgets.max_degree {
                return Err(Error::BudgetExceeded(Budget::Degree));
            }
            let (s, cof) = self.spoly(&basis[pair.i], &basis[pair.j], &pair.lcm);
            if push(self, s, cof, pair.sugar, &mut basis, &mut active, &mut pairs)? {
                return Ok(unit_outcome(&basis, processed));
            }
        }

        // interreduce the minimal basis
        let mut reduced: Vec<Entry> = Vec::with_capacity(active.len());
        active.sort_by(|&a, &b| self.order.cmp(&basis[b].lm, &basis[a].lm));
        for (pos, &k) in active.iter().enumerate() {
            let others: Vec<usize> = active.iter().enumerate().filter(|(q, _)| *q != pos).map(|(_, &g)| g).collect();
            let e = &basis[k];
            let lead = e.terms[0];
            let (tail, tail_cof) = self.reduce(e.terms[1..].to_vec(), e.cof.clone(), &basis, &others)?;
            // the cofactors of e, minus those of the subtracted multiples
            let mut terms = Vec::with_capacity(tail.len() + 1);
            terms.push(lead);
            terms.extend(tail);
            reduced.push(Entry { terms, lm: lead.0, sugar: e.sugar, cof: tail_cof });
        }
        Ok(Outcome {
            elements: reduced.into_iter().map(|e| (e.terms, e.cof)).collect(),
            pairs_processed: processed,
        })
    }
}

fn unit_outcome(basis: &[Entry], pairs_processed: usize) -> Outcome {
    let last = basis.last().expect("unit element present");
    Outcome { elements: vec![(last.terms.clone(), last.cof.clone())], pairs_processed }
}
