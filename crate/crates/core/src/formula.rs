//! Formulas of the finitary cover-modality language and their surface syntax.
//!
//! ```text
//! a ::= T | F | p | ~a | /\{a,..} | \/{a,..} | nab <elem> | <>a | []a | (a)
//! ```
//!
//! `p` is a proposition letter. Letters are schematic in derivations and
//! one-step semantics; for model checking they are encoded into the functor
//! (see [`crate::props`]). `<>a` and `[]a` are accepted only over `P` and
//! expand to `nab {a,T}` and `\/{nab {}, nab {a}}`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::elem::{typecheck, TElem};
use crate::error::{Error, Result};
use crate::functor::{Functor, Shape};
use crate::lexer::{Cursor, Tok};
use crate::literal::{comma_list, parse_lit, type_lit, Lit};

const RESERVED: [&str; 3] = ["T", "F", "nab"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(Arc<str>),
    Neg(Box<Formula>),
    /// Children sorted and duplicate-free; `Conj([])` is ⊤.
    Conj(Vec<Formula>),
    /// Children sorted and duplicate-free; `Disj([])` is ⊥.
    Disj(Vec<Formula>),
    Nabla(Box<TElem<Formula>>),
}

impl Formula {
    pub fn top() -> Self {
        Formula::Conj(Vec::new())
    }

    pub fn bot() -> Self {
        Formula::Disj(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Formula) -> Self {
        Formula::Neg(Box::new(a))
    }

    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        Formula::Conj(sorted(items))
    }

    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        Formula::Disj(sorted(items))
    }

    pub fn nabla(alpha: TElem<Formula>) -> Self {
        Formula::Nabla(Box::new(alpha))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Conj(v) if v.is_empty())
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Formula::Disj(v) if v.is_empty())
    }

    /// Nesting depth of `∇`.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Neg(a) => a.depth(),
            Formula::Conj(v) | Formula::Disj(v) => v.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Nabla(alpha) => {
                let mut d = 0;
                alpha.for_each_inner(&mut |b| d = d.max(b.depth()));
                d + 1
            }
        }
    }

    /// The subformula closure; for `∇α` the immediate subformulas are the
    /// base of `α`.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if out.contains(self) {
            return;
        }
        out.insert(self.clone());
        match self {
            Formula::Var(_) => {}
            Formula::Neg(a) => a.collect_subformulas(out),
            Formula::Conj(v) | Formula::Disj(v) => v.iter().for_each(|a| a.collect_subformulas(out)),
            Formula::Nabla(alpha) => alpha.for_each_inner(&mut |b| b.collect_subformulas(out)),
        }
    }

    /// Proposition letters occurring anywhere in the formula.
    pub fn letters(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        for a in self.subformulas() {
            if let Formula::Var(p) = a {
                out.insert(p);
            }
        }
        out
    }

    /// Checks every `∇` argument against the functor.
    pub fn typecheck(&self, functor: &Functor) -> Result<()> {
        match self {
            Formula::Var(_) => Ok(()),
            Formula::Neg(a) => a.typecheck(functor),
            Formula::Conj(v) | Formula::Disj(v) => v.iter().try_for_each(|a| a.typecheck(functor)),
            Formula::Nabla(alpha) => typecheck(functor.shape(), alpha, &mut |b| b.typecheck(functor)),
        }
    }
}

fn sorted(items: impl IntoIterator<Item = Formula>) -> Vec<Formula> {
    let mut v: Vec<Formula> = items.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(p) => write!(f, "{p}"),
            Formula::Neg(a) => write!(f, "~{a}"),
            Formula::Conj(v) if v.is_empty() => write!(f, "T"),
            Formula::Disj(v) if v.is_empty() => write!(f, "F"),
            Formula::Conj(v) => write_list(f, "/\\", v),
            Formula::Disj(v) => write_list(f, "\\/", v),
            Formula::Nabla(alpha) => write!(f, "nab {alpha}"),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, op: &str, v: &[Formula]) -> fmt::Result {
    write!(f, "{op}{{")?;
    for (i, a) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, "}}")
}

/// An inequality `lhs ≼ b`, written `a <= b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Inequality {
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Inequality {
    pub fn new(lhs: Formula, rhs: Formula) -> Self {
        Inequality { lhs, rhs }
    }

    pub fn depth(&self) -> usize {
        self.lhs.depth().max(self.rhs.depth())
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

pub fn parse_formula(text: &str, functor: &Functor) -> Result<Formula> {
    let mut cur = Cursor::new(text)?;
    let a = formula(&mut cur, functor)?;
    cur.finish()?;
    Ok(a)
}

pub fn parse_inequality(text: &str, functor: &Functor) -> Result<Inequality> {
    let mut cur = Cursor::new(text)?;
    let ineq = inequality(&mut cur, functor)?;
    cur.finish()?;
    Ok(ineq)
}

pub(crate) fn inequality(cur: &mut Cursor, functor: &Functor) -> Result<Inequality> {
    let lhs = formula(cur, functor)?;
    cur.expect(&Tok::Le)?;
    let rhs = formula(cur, functor)?;
    Ok(Inequality { lhs, rhs })
}

pub(crate) fn formula(cur: &mut Cursor, functor: &Functor) -> Result<Formula> {
    let pos = cur.pos();
    match cur.bump() {
        Tok::Tilde => Ok(Formula::neg(formula(cur, functor)?)),
        Tok::And => {
            cur.expect(&Tok::LBrace)?;
            Ok(Formula::conj(comma_list(cur, &Tok::RBrace, &mut |c| {
                formula(c, functor)
            })?))
        }
        Tok::Or => {
            cur.expect(&Tok::LBrace)?;
            Ok(Formula::disj(comma_list(cur, &Tok::RBrace, &mut |c| {
                formula(c, functor)
            })?))
        }
        Tok::LParen => {
            let a = formula(cur, functor)?;
            cur.expect(&Tok::RParen)?;
            Ok(a)
        }
        Tok::Dia => {
            require_kripke(functor, pos, "<>")?;
            let a = formula(cur, functor)?;
            Ok(diamond(a))
        }
        Tok::Box => {
            require_kripke(functor, pos, "[]")?;
            let a = formula(cur, functor)?;
            Ok(boxed(a))
        }
        Tok::Ident(w) if w == "T" => Ok(Formula::top()),
        Tok::Ident(w) if w == "F" => Ok(Formula::bot()),
        Tok::Ident(w) if w == "nab" => {
            let alpha = nabla_arg(cur, functor)?;
            Ok(Formula::nabla(alpha))
        }
        Tok::Ident(w) => Ok(Formula::Var(w.into())),
        other => Err(Error::syntax(
            pos,
            format!("expected a formula, found {}", other.describe()),
        )),
    }
}

/// Parses an element literal whose leaves are formulas and types it.
pub(crate) fn nabla_arg(cur: &mut Cursor, functor: &Functor) -> Result<TElem<Formula>> {
    let lit = parse_lit(cur, &mut |c| formula(c, functor))?;
    type_lit(functor.shape(), lit, &mut formula_leaf)
}

pub(crate) fn formula_leaf(lit: Lit<Formula>) -> Result<Formula> {
    match lit {
        Lit::Leaf(a, _) => Ok(a),
        other => Err(Error::ty(format!(
            "at offset {}: expected a formula at an identity position",
            other.pos()
        ))),
    }
}

fn require_kripke(functor: &Functor, pos: usize, op: &str) -> Result<()> {
    match functor.shape() {
        Shape::Pow(inner) if **inner == Shape::Id => Ok(()),
        _ => Err(Error::ty(format!(
            "at offset {pos}: `{op}` is only available for the functor P, not {functor}"
        ))),
    }
}

/// `◇a = ∇{a, ⊤}` over `P`.
pub fn diamond(a: Formula) -> Formula {
    Formula::nabla(TElem::set([TElem::Inner(a), TElem::Inner(Formula::top())]))
}

/// `□a = ∇∅ ∨ ∇{a}` over `P`.
pub fn boxed(a: Formula) -> Formula {
    Formula::disj([
        Formula::nabla(TElem::set([])),
        Formula::nabla(TElem::set([TElem::Inner(a)])),
    ])
}

/// Rejects letters that cannot be told apart from keywords.
pub(crate) fn check_letter(name: &str) -> Result<()> {
    if RESERVED.contains(&name) || name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric()) {
        return Err(Error::ty(format!("`{name}` cannot be used as a proposition letter")));
    }
    Ok(())
}
