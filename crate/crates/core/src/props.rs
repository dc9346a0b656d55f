//! Proposition letters encoded into the functor.
//!
//! For letters `Λ` and base functor `F` the wrapped functor is
//! `Const(P Λ) * F`; a state's constant records the letters true there. The
//! constant for a set of letters is named by joining its letters with `_`,
//! with `none` for the empty set.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::elem::{ConstTag, TElem};
use crate::enumerate::enumerate_shape;
use crate::error::{Error, Result};
use crate::formula::{check_letter, Formula};
use crate::functor::{Functor, FunctorExpr};

#[derive(Debug, Clone)]
pub struct PropFrame {
    letters: Vec<Arc<str>>,
    base: Functor,
    wrapped: Functor,
    /// Constant index → letters true under that constant.
    valuations: Vec<Vec<Arc<str>>>,
    encodings: BTreeMap<Arc<str>, Formula>,
}

impl PropFrame {
    pub fn new(letters: &[String], base: Functor) -> Result<Self> {
        let mut sorted: Vec<String> = letters.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != letters.len() {
            return Err(Error::DuplicateSymbol(letters.join(",")));
        }
        for p in &sorted {
            check_letter(p)?;
            if p == "none" {
                return Err(Error::ty("`none` is reserved for the empty valuation"));
            }
        }
        if sorted.len() > 16 {
            return Err(Error::EnumerationLimit {
                limit: 1 << 16,
                level: None,
            });
        }
        let letters: Vec<Arc<str>> = sorted.iter().map(|s| Arc::from(s.as_str())).collect();
        let valuations = subsets_shortlex(&letters);
        let names: Vec<String> = valuations.iter().map(|v| valuation_name(v)).collect();
        let wrapped_expr = FunctorExpr::product(FunctorExpr::Constant(names), base.expr().clone());
        let wrapped = Functor::new(wrapped_expr).with_max_enum(base.max_enum());
        let mut frame = PropFrame {
            letters,
            base,
            wrapped,
            valuations,
            encodings: BTreeMap::new(),
        };
        frame.encodings = frame.letter_encodings()?;
        Ok(frame)
    }

    pub fn letters(&self) -> &[Arc<str>] {
        &self.letters
    }

    pub fn base(&self) -> &Functor {
        &self.base
    }

    /// `Const(P Λ) * F`.
    pub fn wrapped(&self) -> &Functor {
        &self.wrapped
    }

    /// Letters true under the constant with this index.
    pub fn valuation(&self, index: usize) -> &[Arc<str>] {
        &self.valuations[index]
    }

    pub fn valuation_count(&self) -> usize {
        self.valuations.len()
    }

    fn tag(&self, index: usize) -> TElem<Formula> {
        TElem::Const(ConstTag {
            index: index as u32,
            name: valuation_name(&self.valuations[index]).into(),
        })
    }

    // p ↦ ⋁{∇('S, γ) | p ∈ S, γ ∈ F{⊤}}
    fn letter_encodings(&self) -> Result<BTreeMap<Arc<str>, Formula>> {
        let mut out = BTreeMap::new();
        if self.letters.is_empty() {
            return Ok(out);
        }
        if !self.base.preserves_finite() {
            return Err(Error::NotEnumerable(format!(
                "proposition letters need F{{T}} to be finite, but {} does not preserve finite sets",
                self.base
            )));
        }
        let gammas = enumerate_shape(self.base.shape(), &[Formula::top()], self.base.max_enum())?;
        for p in &self.letters {
            let mut disjuncts = Vec::new();
            for (i, v) in self.valuations.iter().enumerate() {
                if v.contains(p) {
                    for g in &gammas {
                        disjuncts.push(Formula::nabla(TElem::pair(self.tag(i), g.clone())));
                    }
                }
            }
            out.insert(p.clone(), Formula::disj(disjuncts));
        }
        Ok(out)
    }

    /// Translates a formula over the base functor, possibly with letters,
    /// into a letter-free formula over the wrapped functor:
    /// `∇α ↦ ⋁_S ∇('S, α)` and `p ↦ ⋁_{S ∋ p} ⋁_γ ∇('S, γ)`.
    pub fn embed(&self, a: &Formula) -> Result<Formula> {
        let mut memo = BTreeMap::new();
        self.embed_memo(a, &mut memo)
    }

    fn embed_memo(&self, a: &Formula, memo: &mut BTreeMap<Formula, Formula>) -> Result<Formula> {
        if let Some(done) = memo.get(a) {
            return Ok(done.clone());
        }
        let out = match a {
            Formula::Var(p) => self
                .encodings
                .get(p)
                .cloned()
                .ok_or_else(|| Error::UnknownVariable(p.to_string()))?,
            Formula::Neg(b) => Formula::neg(self.embed_memo(b, memo)?),
            Formula::Conj(v) => Formula::conj(self.embed_all(v, memo)?),
            Formula::Disj(v) => Formula::disj(self.embed_all(v, memo)?),
            Formula::Nabla(alpha) => {
                let inner = alpha.try_map(&mut |b| self.embed_memo(b, memo))?;
                Formula::disj(
                    (0..self.valuations.len()).map(|i| Formula::nabla(TElem::pair(self.tag(i), inner.clone()))),
                )
            }
        };
        memo.insert(a.clone(), out.clone());
        Ok(out)
    }

    fn embed_all(&self, v: &[Formula], memo: &mut BTreeMap<Formula, Formula>) -> Result<Vec<Formula>> {
        v.iter().map(|b| self.embed_memo(b, memo)).collect()
    }
}

/// Name of the constant recording a set of letters.
pub fn valuation_name(letters: &[Arc<str>]) -> String {
    if letters.is_empty() {
        "none".into()
    } else {
        letters.iter().map(|p| p.as_ref()).collect::<Vec<_>>().join("_")
    }
}

fn subsets_shortlex(letters: &[Arc<str>]) -> Vec<Vec<Arc<str>>> {
    let mut out: Vec<Vec<Arc<str>>> = (0u32..(1 << letters.len()))
        .map(|mask| {
            letters
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}
