//! Extended Kripke polynomial functors: surface syntax, the normalized
//! [`Shape`] used by every algorithm, and the [`Functor`] handle that carries
//! the enumeration cap.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lexer::{Cursor, Tok};

/// Default cap on the number of elements a single enumeration may produce.
pub const DEFAULT_MAX_ENUM: usize = 1_000_000;

/// Syntax tree of a functor expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FunctorExpr {
    Identity,
    Constant(Vec<String>),
    FinPow,
    FinBag,
    FinDist,
    Compose(Box<FunctorExpr>, Box<FunctorExpr>),
    Sum(Box<FunctorExpr>, Box<FunctorExpr>),
    Product(Box<FunctorExpr>, Box<FunctorExpr>),
    Exponent(Box<FunctorExpr>, Vec<String>),
}

impl FunctorExpr {
    pub fn compose(outer: FunctorExpr, inner: FunctorExpr) -> Self {
        FunctorExpr::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn sum(left: FunctorExpr, right: FunctorExpr) -> Self {
        FunctorExpr::Sum(Box::new(left), Box::new(right))
    }

    pub fn product(left: FunctorExpr, right: FunctorExpr) -> Self {
        FunctorExpr::Product(Box::new(left), Box::new(right))
    }

    pub fn exponent(base: FunctorExpr, domain: Vec<String>) -> Self {
        FunctorExpr::Exponent(Box::new(base), domain)
    }

    /// True iff no bag or distribution functor occurs in the expression.
    pub fn preserves_finite(&self) -> bool {
        match self {
            FunctorExpr::FinBag | FunctorExpr::FinDist => false,
            FunctorExpr::Identity | FunctorExpr::Constant(_) | FunctorExpr::FinPow => true,
            FunctorExpr::Compose(a, b) | FunctorExpr::Sum(a, b) | FunctorExpr::Product(a, b) => {
                a.preserves_finite() && b.preserves_finite()
            }
            FunctorExpr::Exponent(a, _) => a.preserves_finite(),
        }
    }

    /// Substitutes inner functors for identity positions, eliminating
    /// composition.
    pub fn shape(&self) -> Shape {
        match self {
            FunctorExpr::Identity => Shape::Id,
            FunctorExpr::Constant(names) => Shape::Const(symbols(names)),
            FunctorExpr::FinPow => Shape::Pow(Box::new(Shape::Id)),
            FunctorExpr::FinBag => Shape::Bag(Box::new(Shape::Id)),
            FunctorExpr::FinDist => Shape::Dist(Box::new(Shape::Id)),
            FunctorExpr::Compose(outer, inner) => outer.shape().substitute(&inner.shape()),
            FunctorExpr::Sum(a, b) => Shape::Sum(Box::new(a.shape()), Box::new(b.shape())),
            FunctorExpr::Product(a, b) => Shape::Prod(Box::new(a.shape()), Box::new(b.shape())),
            FunctorExpr::Exponent(a, dom) => Shape::Exp(Box::new(a.shape()), symbols(dom)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            FunctorExpr::Sum(..) => 0,
            FunctorExpr::Product(..) => 1,
            FunctorExpr::Compose(..) => 2,
            FunctorExpr::Exponent(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let wrap = self.precedence() < prec;
        if wrap {
            write!(f, "(")?;
        }
        match self {
            FunctorExpr::Identity => write!(f, "Id")?,
            FunctorExpr::FinPow => write!(f, "P")?,
            FunctorExpr::FinBag => write!(f, "Bag")?,
            FunctorExpr::FinDist => write!(f, "Dist")?,
            FunctorExpr::Constant(names) => write!(f, "Const({})", names.join(","))?,
            FunctorExpr::Sum(a, b) => {
                a.fmt_prec(f, 0)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 1)?;
            }
            FunctorExpr::Product(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " * ")?;
                b.fmt_prec(f, 2)?;
            }
            FunctorExpr::Compose(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " . ")?;
                b.fmt_prec(f, 2)?;
            }
            FunctorExpr::Exponent(a, dom) => {
                a.fmt_prec(f, 3)?;
                write!(f, "^({})", dom.join(","))?;
            }
        }
        if wrap {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

fn symbols(names: &[String]) -> Vec<Arc<str>> {
    names.iter().map(|s| Arc::from(s.as_str())).collect()
}

/// Composition-free form of a functor: every identity position of the outer
/// functor has been replaced by the inner one. Elements ([`crate::TElem`])
/// mirror this structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Id,
    Const(Vec<Arc<str>>),
    Pow(Box<Shape>),
    Bag(Box<Shape>),
    Dist(Box<Shape>),
    Sum(Box<Shape>, Box<Shape>),
    Prod(Box<Shape>, Box<Shape>),
    Exp(Box<Shape>, Vec<Arc<str>>),
}

impl Shape {
    pub fn substitute(&self, inner: &Shape) -> Shape {
        match self {
            Shape::Id => inner.clone(),
            Shape::Const(c) => Shape::Const(c.clone()),
            Shape::Pow(s) => Shape::Pow(Box::new(s.substitute(inner))),
            Shape::Bag(s) => Shape::Bag(Box::new(s.substitute(inner))),
            Shape::Dist(s) => Shape::Dist(Box::new(s.substitute(inner))),
            Shape::Sum(a, b) => Shape::Sum(Box::new(a.substitute(inner)), Box::new(b.substitute(inner))),
            Shape::Prod(a, b) => Shape::Prod(Box::new(a.substitute(inner)), Box::new(b.substitute(inner))),
            Shape::Exp(s, d) => Shape::Exp(Box::new(s.substitute(inner)), d.clone()),
        }
    }

    pub fn preserves_finite(&self) -> bool {
        match self {
            Shape::Id | Shape::Const(_) => true,
            Shape::Bag(_) | Shape::Dist(_) => false,
            Shape::Pow(s) | Shape::Exp(s, _) => s.preserves_finite(),
            Shape::Sum(a, b) | Shape::Prod(a, b) => a.preserves_finite() && b.preserves_finite(),
        }
    }

    /// Factors of a left-nested product spine: `(A * B) * C` gives `[A, B, C]`.
    pub(crate) fn product_spine(&self) -> Vec<&Shape> {
        match self {
            Shape::Prod(a, b) => {
                let mut v = a.product_spine();
                v.push(b);
                v
            }
            other => vec![other],
        }
    }
}

/// A parsed functor together with its normalized shape and the enumeration
/// cap used by every operation that enumerates `T X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functor {
    expr: FunctorExpr,
    shape: Shape,
    max_enum: usize,
}

impl Functor {
    pub fn new(expr: FunctorExpr) -> Self {
        let shape = expr.shape();
        Functor {
            expr,
            shape,
            max_enum: DEFAULT_MAX_ENUM,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_functor(text).map(Functor::new)
    }

    pub fn with_max_enum(mut self, max_enum: usize) -> Self {
        self.max_enum = max_enum.max(1);
        self
    }

    pub fn expr(&self) -> &FunctorExpr {
        &self.expr
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn max_enum(&self) -> usize {
        self.max_enum
    }

    pub fn preserves_finite(&self) -> bool {
        self.expr.preserves_finite()
    }

    pub(crate) fn require_finite(&self) -> Result<()> {
        if self.preserves_finite() {
            Ok(())
        } else {
            Err(Error::NotFinitary(self.expr.to_string()))
        }
    }
}

impl fmt::Display for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

/// Parses the functor DSL: `Id | Const(c,..) | P | Bag | Dist | F ^ (d,..) |
/// F . F | F * F | F + F`. `^` binds tightest, then `.`, `*`, `+`.
pub fn parse_functor(text: &str) -> Result<FunctorExpr> {
    let mut cur = Cursor::new(text)?;
    let e = parse_sum(&mut cur)?;
    cur.finish()?;
    Ok(e)
}

fn parse_sum(cur: &mut Cursor) -> Result<FunctorExpr> {
    let mut e = parse_prod(cur)?;
    while cur.eat(&Tok::Plus) {
        e = FunctorExpr::sum(e, parse_prod(cur)?);
    }
    Ok(e)
}

fn parse_prod(cur: &mut Cursor) -> Result<FunctorExpr> {
    let mut e = parse_comp(cur)?;
    while cur.eat(&Tok::Star) {
        e = FunctorExpr::product(e, parse_comp(cur)?);
    }
    Ok(e)
}

fn parse_comp(cur: &mut Cursor) -> Result<FunctorExpr> {
    let outer = parse_exp(cur)?;
    if cur.eat(&Tok::Dot) {
        Ok(FunctorExpr::compose(outer, parse_comp(cur)?))
    } else {
        Ok(outer)
    }
}

fn parse_exp(cur: &mut Cursor) -> Result<FunctorExpr> {
    let mut e = parse_atom(cur)?;
    while cur.eat(&Tok::Caret) {
        e = FunctorExpr::exponent(e, symbol_list(cur)?);
    }
    Ok(e)
}

fn parse_atom(cur: &mut Cursor) -> Result<FunctorExpr> {
    let pos = cur.pos();
    match cur.peek().clone() {
        Tok::LParen => {
            cur.bump();
            let e = parse_sum(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(e)
        }
        Tok::Ident(name) => {
            cur.bump();
            match name.as_str() {
                "Id" => Ok(FunctorExpr::Identity),
                "P" => Ok(FunctorExpr::FinPow),
                "Bag" => Ok(FunctorExpr::FinBag),
                "Dist" => Ok(FunctorExpr::FinDist),
                "Const" => Ok(FunctorExpr::Constant(symbol_list(cur)?)),
                other => Err(Error::syntax(pos, format!("unknown functor `{other}`"))),
            }
        }
        _ => Err(cur.unexpected("a functor")),
    }
}

fn symbol_list(cur: &mut Cursor) -> Result<Vec<String>> {
    cur.expect(&Tok::LParen)?;
    let mut names: Vec<String> = Vec::new();
    loop {
        let name = cur.ident()?;
        if names.contains(&name) {
            return Err(Error::DuplicateSymbol(name));
        }
        names.push(name);
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.expect(&Tok::RParen)?;
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use FunctorExpr::*;

    fn c(names: &[&str]) -> FunctorExpr {
        Constant(names.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn binary_tree_functor() {
        let e = parse_functor("Const(c) * Id * Id").unwrap();
        assert_eq!(
            e,
            FunctorExpr::product(FunctorExpr::product(c(&["c"]), Identity), Identity)
        );
    }

    #[test]
    fn atoms_and_composition() {
        assert_eq!(parse_functor("Id").unwrap(), Identity);
        assert_eq!(parse_functor("P . P").unwrap(), FunctorExpr::compose(FinPow, FinPow));
    }

    #[test]
    fn precedence() {
        // ^ over . over * over +
        let e = parse_functor("Id + P . P ^ (a,b) * Const(c)").unwrap();
        let expected = FunctorExpr::sum(
            Identity,
            FunctorExpr::product(
                FunctorExpr::compose(FinPow, FunctorExpr::exponent(FinPow, vec!["a".into(), "b".into()])),
                c(&["c"]),
            ),
        );
        assert_eq!(e, expected);
        let grouped = parse_functor("(Id + P) * Id").unwrap();
        assert_eq!(
            grouped,
            FunctorExpr::product(FunctorExpr::sum(Identity, FinPow), Identity)
        );
    }

    #[test]
    fn duplicate_symbols_rejected() {
        assert_eq!(parse_functor("Const(a,b,a)"), Err(Error::DuplicateSymbol("a".into())));
        assert_eq!(parse_functor("P^(d,d)"), Err(Error::DuplicateSymbol("d".into())));
    }

    #[test]
    fn syntax_error_position() {
        match parse_functor("P * ") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_functor("Foo"), Err(Error::Syntax { pos: 0, .. })));
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "Const(c) * Id * Id",
            "Id * (Id * Id)",
            "P . P",
            "(Id + Const(c)) . P",
            "P^(d1,d2)",
            "(P . Id)^(a)",
            "Id + Const(c) + P * Bag",
            "Id + (Const(c) + Dist)",
        ] {
            let e = parse_functor(text).unwrap();
            let printed = e.to_string();
            assert_eq!(parse_functor(&printed).unwrap(), e, "{text} -> {printed}");
        }
    }

    #[test]
    fn finiteness() {
        assert!(parse_functor("P . (Const(a) * Id)").unwrap().preserves_finite());
        assert!(!parse_functor("P . Bag").unwrap().preserves_finite());
        assert!(!parse_functor("Dist ^ (x)").unwrap().preserves_finite());
    }

    #[test]
    fn composition_substitutes_identity() {
        let s = parse_functor("(Id * Id) . P").unwrap().shape();
        let p = Shape::Pow(Box::new(Shape::Id));
        assert_eq!(s, Shape::Prod(Box::new(p.clone()), Box::new(p)));
    }
}
