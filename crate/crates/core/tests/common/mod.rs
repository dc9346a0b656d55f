//! Helpers shared by the integration tests: carriers, relations, random
//! generators and a direct Kripke-model evaluator.

#![allow(dead_code)]

use std::collections::BTreeSet;

use nabla_core::{enumerate, Coalgebra, FinSet, Formula, Functor, Relation, TElem};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn functor(text: &str) -> Functor {
    Functor::parse(text).unwrap()
}

/// `{a, b, ..}` with `n` atoms drawn from `prefix`.
pub fn carrier(prefix: &str, n: usize) -> FinSet<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Every relation between two carriers.
pub fn all_relations(x: &FinSet<String>, y: &FinSet<String>) -> Vec<Relation<String, String>> {
    let cells: Vec<(String, String)> = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    (0u64..(1 << cells.len()))
        .map(|mask| {
            let pairs = cells
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| p.clone());
            Relation::new(x.clone(), y.clone(), pairs).unwrap()
        })
        .collect()
}

pub fn pick<'a, T>(rng: &mut StdRng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty choice")
}

/// A random depth-0 formula over the given letters (or `T`/`F` when there
/// are none).
pub fn random_prop(rng: &mut StdRng, letters: &[&str], size: usize) -> Formula {
    if size <= 1 {
        return match (letters.is_empty(), rng.gen_range(0..4)) {
            (false, 0..=2) => Formula::var(pick(rng, letters)),
            (_, 0 | 1) => Formula::top(),
            _ => Formula::bot(),
        };
    }
    match rng.gen_range(0..3) {
        0 => Formula::neg(random_prop(rng, letters, size - 1)),
        1 => Formula::conj([
            random_prop(rng, letters, size / 2),
            random_prop(rng, letters, size - size / 2),
        ]),
        _ => Formula::disj([
            random_prop(rng, letters, size / 2),
            random_prop(rng, letters, size - size / 2),
        ]),
    }
}

/// A random `∇α` with `α ∈ T(pool)`.
pub fn random_nabla(rng: &mut StdRng, f: &Functor, pool: Vec<Formula>) -> Formula {
    let elems = enumerate(f, &FinSet::new(pool)).unwrap();
    Formula::nabla(pick(rng, &elems).clone())
}

/// A random formula of depth at most `depth`. Depth-0 parts use `letters`;
/// with `top_letters == false` no letter occurs outside every `∇`.
pub fn random_formula(rng: &mut StdRng, f: &Functor, depth: usize, letters: &[&str], top_letters: bool) -> Formula {
    if depth == 0 {
        let l: &[&str] = if top_letters { letters } else { &[] };
        let size = rng.gen_range(1..=3);
        return random_prop(rng, l, size);
    }
    let atom = |rng: &mut StdRng| -> Formula {
        if rng.gen_bool(0.8) {
            let k = rng.gen_range(1..=2);
            let pool = (0..k)
                .map(|_| random_formula(rng, f, depth - 1, letters, true))
                .collect();
            random_nabla(rng, f, pool)
        } else {
            random_formula(rng, f, 0, letters, top_letters)
        }
    };
    match rng.gen_range(0..5) {
        0 => Formula::neg(atom(rng)),
        1 => Formula::conj([atom(rng), atom(rng)]),
        2 => Formula::disj([atom(rng), atom(rng)]),
        _ => atom(rng),
    }
}

/// A random coalgebra with states `s0..`.
pub fn random_coalgebra(rng: &mut StdRng, f: &Functor, n: usize) -> Coalgebra {
    let idx: FinSet<usize> = (0..n).collect();
    let all = enumerate(f, &idx).unwrap();
    let transitions = (0..n).map(|_| pick(rng, &all).clone()).collect();
    Coalgebra::from_indices(f.clone(), (0..n).map(|i| format!("s{i}")).collect(), transitions).unwrap()
}

/// A finite Kripke model with letters.
#[derive(Debug, Clone)]
pub struct Kripke {
    pub succ: Vec<BTreeSet<usize>>,
    pub val: Vec<BTreeSet<String>>,
}

impl Kripke {
    /// Standard relational semantics; `∇α` holds at `x` when every
    /// successor satisfies a member of `α` and every member of `α` holds at
    /// some successor.
    pub fn holds(&self, x: usize, a: &Formula) -> bool {
        match a {
            Formula::Var(p) => self.val[x].contains(p.as_ref()),
            Formula::Neg(b) => !self.holds(x, b),
            Formula::Conj(v) => v.iter().all(|b| self.holds(x, b)),
            Formula::Disj(v) => v.iter().any(|b| self.holds(x, b)),
            Formula::Nabla(alpha) => {
                let TElem::Set(items) = alpha.as_ref() else {
                    panic!("not a Kripke formula: {a}")
                };
                let members: Vec<&Formula> = items
                    .iter()
                    .map(|e| match e {
                        TElem::Inner(b) => b,
                        _ => panic!("not a Kripke formula: {a}"),
                    })
                    .collect();
                self.succ[x].iter().all(|&y| members.iter().any(|b| self.holds(y, b)))
                    && members.iter().all(|b| self.succ[x].iter().any(|&y| self.holds(y, b)))
            }
        }
    }

    /// Every Kripke model with `1..=max_states` states over `letters`.
    pub fn all(max_states: usize, letters: &[&str]) -> Vec<Kripke> {
        let mut out = Vec::new();
        for n in 1..=max_states {
            for edges in 0u64..(1 << (n * n)) {
                let succ: Vec<BTreeSet<usize>> = (0..n)
                    .map(|x| (0..n).filter(|y| edges & (1 << (x * n + y)) != 0).collect())
                    .collect();
                for vmask in 0u64..(1 << (n * letters.len())) {
                    let val = (0..n)
                        .map(|x| {
                            letters
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| vmask & (1 << (i * n + x)) != 0)
                                .map(|(_, p)| p.to_string())
                                .collect()
                        })
                        .collect();
                    out.push(Kripke {
                        succ: succ.clone(),
                        val,
                    });
                }
            }
        }
        out
    }

    /// Reads a coalgebra for `Const(valuations) * P` as a Kripke model;
    /// valuation constants are letter lists joined by `_`, or `none`.
    pub fn from_wrapped(c: &Coalgebra) -> Kripke {
        let mut succ = Vec::new();
        let mut val = Vec::new();
        for x in 0..c.len() {
            let TElem::Pair(tag, next) = c.transition(x) else {
                panic!("not a wrapped transition")
            };
            let TElem::Const(tag) = tag.as_ref() else {
                panic!("no valuation tag")
            };
            let letters: BTreeSet<String> = if &*tag.name == "none" {
                BTreeSet::new()
            } else {
                tag.name.split('_').map(str::to_string).collect()
            };
            let TElem::Set(next) = next.as_ref() else {
                panic!("not a power-set transition")
            };
            succ.push(
                next.iter()
                    .map(|e| match e {
                        TElem::Inner(y) => *y,
                        _ => panic!("nested transition"),
                    })
                    .collect(),
            );
            val.push(letters);
        }
        Kripke { succ, val }
    }
}
