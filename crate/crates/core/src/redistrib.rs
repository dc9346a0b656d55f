//! Slim redistributions and the negation dual `Q(α)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::elem::{FinSet, TElem};
use crate::enumerate::{enumerate_bounded_bags, enumerate_shape};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::functor::{Functor, Shape};
use crate::lifting::lift;

/// All subsets of a sorted carrier, in canonical (shortlex) order.
pub(crate) fn powerset<V: Ord + Clone>(carrier: &FinSet<V>, cap: usize) -> Result<Vec<FinSet<V>>> {
    let n = carrier.len();
    if n >= usize::BITS as usize - 1 || (1usize << n) > cap {
        return Err(Error::EnumerationLimit {
            limit: cap,
            level: None,
        });
    }
    let items = carrier.as_slice();
    let mut out: Vec<FinSet<V>> = (0..(1usize << n))
        .map(|mask| {
            FinSet::from_sorted(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| items[i].clone())
                    .collect(),
            )
        })
        .collect();
    out.sort();
    Ok(out)
}

fn union_of_bases<V: Ord + Clone>(a: &[TElem<V>]) -> FinSet<V> {
    let mut all = Vec::new();
    for alpha in a {
        alpha.for_each_inner(&mut |x| all.push(x.clone()));
    }
    FinSet::new(all)
}

/// `SRD(A)`: every `Φ ∈ T P(B)`, `B = ⋃ Base[A]`, such that each `α ∈ A` is
/// a lifted member of `Φ`, in canonical order.
///
/// For the bag functor `A` must be non-empty; candidates satisfy
/// `Φ(U) ≤ min_{α ∈ A} Σ_{x ∈ U} α(x)`, since any coupling of `α` with `Φ`
/// routes all of `Φ(U)` from elements of `U`.
pub fn slim_redistributions<V: Ord + Clone + fmt::Debug>(
    functor: &Functor,
    a: &[TElem<V>],
) -> Result<Vec<TElem<FinSet<V>>>> {
    for alpha in a {
        crate::elem::typecheck(functor.shape(), alpha, &mut |_| Ok(()))?;
    }
    let b = union_of_bases(a);
    let subsets = powerset(&b, functor.max_enum())?;
    let candidates = if functor.preserves_finite() {
        enumerate_shape(functor.shape(), &subsets, functor.max_enum())?
    } else {
        bag_candidates(functor, a, &subsets)?
    };
    let member = |x: &V, u: &FinSet<V>| u.contains(x);
    Ok(candidates
        .into_iter()
        .filter(|phi| a.iter().all(|alpha| lift(&member, alpha, phi)))
        .collect())
}

fn bag_candidates<V: Ord + Clone>(
    functor: &Functor,
    a: &[TElem<V>],
    subsets: &[FinSet<V>],
) -> Result<Vec<TElem<FinSet<V>>>> {
    if !matches!(functor.shape(), Shape::Bag(inner) if **inner == Shape::Id) {
        return Err(Error::NotEnumerable(format!(
            "slim redistributions for {functor} (only finite-preserving functors and Bag are supported)"
        )));
    }
    if a.is_empty() {
        return Err(Error::NotEnumerable("SRD(∅) for Bag is the infinite set Bag{∅}".into()));
    }
    let counts: Vec<BTreeMap<&V, u64>> = a
        .iter()
        .map(|alpha| match alpha {
            TElem::Bag(entries) => entries
                .iter()
                .filter_map(|(e, k)| match e {
                    TElem::Inner(x) => Some((x, *k)),
                    _ => None,
                })
                .collect(),
            _ => BTreeMap::new(),
        })
        .collect();
    let bounds: Vec<(FinSet<V>, u64)> = subsets
        .iter()
        .map(|u| {
            let bound = counts
                .iter()
                .map(|c| u.iter().map(|x| c.get(x).copied().unwrap_or(0)).sum::<u64>())
                .min()
                .unwrap_or(0);
            (u.clone(), bound)
        })
        .filter(|(_, bound)| *bound > 0)
        .collect();
    enumerate_bounded_bags(&bounds, functor.max_enum())
}

/// `Q(α) = { (T(⋀∘P¬))Ψ | Ψ ∈ T P(Base α), (α, Ψ) ∉ T̄(∉) }`, so that
/// `¬∇α ≡ ⋁{∇β | β ∈ Q(α)}`.
pub fn neg_dual(functor: &Functor, alpha: &TElem<Formula>) -> Result<Vec<TElem<Formula>>> {
    functor.require_finite()?;
    crate::elem::typecheck(functor.shape(), alpha, &mut |b| b.typecheck(functor))?;
    let b = alpha.base();
    let subsets = powerset(&b, functor.max_enum())?;
    let not_member = |x: &Formula, u: &FinSet<Formula>| !u.contains(x);
    let mut out: Vec<TElem<Formula>> = enumerate_shape(functor.shape(), &subsets, functor.max_enum())?
        .into_iter()
        .filter(|psi| !lift(&not_member, alpha, psi))
        .map(|psi| psi.map(&mut |u| Formula::conj(u.iter().map(|b| Formula::neg(b.clone())))))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Pushes negations inward until they sit on letters only, rewriting
/// `¬∇α` as `⋁{∇β | β ∈ Q(α)}`.
pub fn negation_normal_form(functor: &Functor, a: &Formula) -> Result<Formula> {
    a.typecheck(functor)?;
    let mut memo = BTreeMap::new();
    nnf(functor, a, false, &mut memo)
}

fn nnf(
    functor: &Functor,
    a: &Formula,
    negated: bool,
    memo: &mut BTreeMap<(Formula, bool), Formula>,
) -> Result<Formula> {
    let key = (a.clone(), negated);
    if let Some(done) = memo.get(&key) {
        return Ok(done.clone());
    }
    let out = match (a, negated) {
        (Formula::Var(_), false) => a.clone(),
        (Formula::Var(_), true) => Formula::neg(a.clone()),
        (Formula::Neg(b), _) => nnf(functor, b, !negated, memo)?,
        (Formula::Conj(v), false) => Formula::conj(nnf_all(functor, v, false, memo)?),
        (Formula::Conj(v), true) => Formula::disj(nnf_all(functor, v, true, memo)?),
        (Formula::Disj(v), false) => Formula::disj(nnf_all(functor, v, false, memo)?),
        (Formula::Disj(v), true) => Formula::conj(nnf_all(functor, v, true, memo)?),
        (Formula::Nabla(alpha), false) => Formula::nabla(alpha.try_map(&mut |b| nnf(functor, b, false, memo))?),
        (Formula::Nabla(alpha), true) => {
            let mut disjuncts = Vec::new();
            for beta in neg_dual(functor, alpha)? {
                disjuncts.push(Formula::nabla(beta.try_map(&mut |b| nnf(functor, b, false, memo))?));
            }
            Formula::disj(disjuncts)
        }
    };
    memo.insert(key, out.clone());
    Ok(out)
}

fn nnf_all(
    functor: &Functor,
    v: &[Formula],
    negated: bool,
    memo: &mut BTreeMap<(Formula, bool), Formula>,
) -> Result<Vec<Formula>> {
    v.iter().map(|b| nnf(functor, b, negated, memo)).collect()
}
