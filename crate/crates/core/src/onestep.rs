//! One-step semantics: depth-0 formulas over subset variables of a finite
//! set `X` denote subsets of `X`; depth-1 formulas denote subsets of `T X`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::elem::{FinSet, TElem};
use crate::enumerate::enumerate;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::functor::Functor;
use crate::lifting::lifted_members;
use crate::props::valuation_name;

/// A carrier `X` together with named subsets used as atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneStepContext {
    carrier: FinSet<String>,
    variables: BTreeMap<String, FinSet<String>>,
}

impl OneStepContext {
    pub fn new(carrier: FinSet<String>, variables: BTreeMap<String, FinSet<String>>) -> Result<Self> {
        for (name, set) in &variables {
            if !set.is_subset(&carrier) {
                return Err(Error::CarrierMismatch(format!(
                    "variable `{name}` is not a subset of X"
                )));
            }
        }
        Ok(OneStepContext { carrier, variables })
    }

    /// `X = P(Λ)` with each letter denoting the valuations containing it.
    /// Every valuation of the letters over any carrier factors through this
    /// one, so inclusions checked here hold everywhere.
    pub fn universal(letters: &[Arc<str>]) -> Self {
        let mut valuations: Vec<Vec<Arc<str>>> = (0u64..(1 << letters.len()))
            .map(|mask| {
                letters
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        valuations.sort();
        let carrier: FinSet<String> = valuations.iter().map(|v| valuation_name(v)).collect();
        let variables = letters
            .iter()
            .map(|p| {
                let set = valuations
                    .iter()
                    .filter(|v| v.contains(p))
                    .map(|v| valuation_name(v))
                    .collect();
                (p.to_string(), set)
            })
            .collect();
        OneStepContext { carrier, variables }
    }

    pub fn carrier(&self) -> &FinSet<String> {
        &self.carrier
    }

    pub fn variables(&self) -> &BTreeMap<String, FinSet<String>> {
        &self.variables
    }
}

/// `⟦a⟧⁰ ⊆ X`.
pub fn one_step_eval0(ctx: &OneStepContext, a: &Formula) -> Result<FinSet<String>> {
    Ok(match a {
        Formula::Var(p) => ctx
            .variables
            .get(p.as_ref())
            .cloned()
            .ok_or_else(|| Error::UnknownVariable(p.to_string()))?,
        Formula::Neg(b) => {
            let inner = one_step_eval0(ctx, b)?;
            ctx.carrier.iter().filter(|x| !inner.contains(x)).cloned().collect()
        }
        Formula::Conj(v) => {
            let mut acc = ctx.carrier.clone();
            for b in v {
                let s = one_step_eval0(ctx, b)?;
                acc = acc.iter().filter(|x| s.contains(x)).cloned().collect();
            }
            acc
        }
        Formula::Disj(v) => {
            let mut acc = FinSet::empty();
            for b in v {
                acc = acc.union(&one_step_eval0(ctx, b)?);
            }
            acc
        }
        Formula::Nabla(_) => return Err(Error::ty(format!("`{a}` is not a depth-0 formula"))),
    })
}

/// Evaluates depth-1 formulas against a fixed enumeration of `T X`.
pub struct OneStepModel<'a> {
    functor: &'a Functor,
    ctx: &'a OneStepContext,
    all: Vec<TElem<String>>,
}

impl<'a> OneStepModel<'a> {
    pub fn new(functor: &'a Functor, ctx: &'a OneStepContext) -> Result<Self> {
        let all = enumerate(functor, &ctx.carrier)?;
        Ok(OneStepModel { functor, ctx, all })
    }

    /// `T X` in canonical order.
    pub fn elements(&self) -> &[TElem<String>] {
        &self.all
    }

    /// `⟦a⟧¹` as a membership vector over [`Self::elements`].
    pub fn eval(&self, a: &Formula) -> Result<Vec<bool>> {
        let n = self.all.len();
        Ok(match a {
            Formula::Var(p) => {
                return Err(Error::ty(format!(
                    "letter `{p}` occurs outside every nabla in a one-step formula"
                )))
            }
            Formula::Neg(b) => self.eval(b)?.into_iter().map(|t| !t).collect(),
            Formula::Conj(v) => {
                let mut acc = vec![true; n];
                for b in v {
                    acc.iter_mut().zip(self.eval(b)?).for_each(|(x, y)| *x &= y);
                }
                acc
            }
            Formula::Disj(v) => {
                let mut acc = vec![false; n];
                for b in v {
                    acc.iter_mut().zip(self.eval(b)?).for_each(|(x, y)| *x |= y);
                }
                acc
            }
            Formula::Nabla(alpha) => {
                let phi = alpha.try_map(&mut |b| one_step_eval0(self.ctx, b))?;
                let mut acc = vec![false; n];
                for m in lifted_members(self.functor, &phi)? {
                    let i = self.all.binary_search(&m).expect("lifted members lie in T X");
                    acc[i] = true;
                }
                acc
            }
        })
    }

    pub fn eval_set(&self, a: &Formula) -> Result<Vec<TElem<String>>> {
        Ok(self
            .eval(a)?
            .into_iter()
            .zip(&self.all)
            .filter(|(t, _)| *t)
            .map(|(_, e)| e.clone())
            .collect())
    }
}

/// `⟦a⟧¹ ⊆ T X`, in canonical order.
pub fn one_step_eval1(functor: &Functor, ctx: &OneStepContext, a: &Formula) -> Result<Vec<TElem<String>>> {
    OneStepModel::new(functor, ctx)?.eval_set(a)
}

/// `⟦a⟧¹ = ⟦b⟧¹`.
pub fn one_step_equiv(functor: &Functor, ctx: &OneStepContext, a: &Formula, b: &Formula) -> Result<bool> {
    let m = OneStepModel::new(functor, ctx)?;
    Ok(m.eval(a)? == m.eval(b)?)
}

/// `⟦a⟧¹ ⊆ ⟦b⟧¹`.
pub fn one_step_includes(functor: &Functor, ctx: &OneStepContext, a: &Formula, b: &Formula) -> Result<bool> {
    let m = OneStepModel::new(functor, ctx)?;
    let (ta, tb) = (m.eval(a)?, m.eval(b)?);
    Ok(ta.iter().zip(&tb).all(|(x, y)| !x || *y))
}

/// A lifted atom `∇α` with `α ∈ T(blocks)` and its one-step meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedAtom {
    pub alpha: TElem<FinSet<String>>,
    pub cell: Vec<TElem<String>>,
}

/// For a partition of `X` into blocks, the meanings `⟦∇α⟧¹` of all
/// `α ∈ T(blocks)`, each block read as the variable denoting itself.
pub fn lifted_atoms(functor: &Functor, partition: &[FinSet<String>]) -> Result<Vec<LiftedAtom>> {
    let mut seen: BTreeMap<&String, usize> = BTreeMap::new();
    for (i, block) in partition.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::NotPartition(format!("block {i} is empty")));
        }
        for x in block {
            if let Some(j) = seen.insert(x, i) {
                return Err(Error::NotPartition(format!("`{x}` lies in blocks {j} and {i}")));
            }
        }
    }
    let blocks: FinSet<FinSet<String>> = partition.iter().cloned().collect();
    let mut out = Vec::new();
    for alpha in enumerate(functor, &blocks)? {
        let cell = lifted_members(functor, &alpha)?;
        out.push(LiftedAtom { alpha, cell });
    }
    Ok(out)
}
