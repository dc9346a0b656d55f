//! Element literal syntax: parsed untyped first, then typed against a shape.
//!
//! `'c` constants, `{e,..}` sets, `bag{e:k,..}`, `dist{e:p/q,..}`,
//! `(e1,e2,..)` tuples, `inl(e)`/`inr(e)`, `[d:e,..]` exponent maps. Anything
//! else at an identity position is handed to a caller-supplied leaf parser.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::elem::{ConstTag, TElem};
use crate::error::{Error, Result};
use crate::functor::Shape;
use crate::lexer::{Cursor, Tok};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Lit<L> {
    Leaf(L, usize),
    Const(String, usize),
    Set(Vec<Lit<L>>, usize),
    Bag(Vec<(Lit<L>, u64)>, usize),
    Dist(Vec<(Lit<L>, BigRational)>, usize),
    Tuple(Vec<Lit<L>>, usize),
    Inl(Box<Lit<L>>, usize),
    Inr(Box<Lit<L>>, usize),
    Map(Vec<(String, Lit<L>)>, usize),
}

impl<L> Lit<L> {
    pub(crate) fn pos(&self) -> usize {
        match self {
            Lit::Leaf(_, p)
            | Lit::Const(_, p)
            | Lit::Set(_, p)
            | Lit::Bag(_, p)
            | Lit::Dist(_, p)
            | Lit::Tuple(_, p)
            | Lit::Inl(_, p)
            | Lit::Inr(_, p)
            | Lit::Map(_, p) => *p,
        }
    }
}

pub(crate) type LeafParser<'a, L> = dyn FnMut(&mut Cursor) -> Result<L> + 'a;

pub(crate) fn parse_lit<L>(cur: &mut Cursor, leaf: &mut LeafParser<'_, L>) -> Result<Lit<L>> {
    let pos = cur.pos();
    match cur.peek().clone() {
        Tok::Quote => {
            cur.bump();
            Ok(Lit::Const(cur.ident()?, pos))
        }
        Tok::LBrace => {
            cur.bump();
            let items = comma_list(cur, &Tok::RBrace, &mut |c| parse_lit(c, leaf))?;
            Ok(Lit::Set(items, pos))
        }
        Tok::LParen => {
            cur.bump();
            let mut items = comma_list(cur, &Tok::RParen, &mut |c| parse_lit(c, leaf))?;
            match items.len() {
                0 => Err(Error::syntax(pos, "empty tuple")),
                1 => Ok(items.pop().expect("one item")),
                _ => Ok(Lit::Tuple(items, pos)),
            }
        }
        Tok::LBrack => {
            cur.bump();
            let entries = comma_list(cur, &Tok::RBrack, &mut |c| {
                let d = c.ident()?;
                c.expect(&Tok::Colon)?;
                Ok((d, parse_lit(c, leaf)?))
            })?;
            Ok(Lit::Map(entries, pos))
        }
        Tok::Ident(word) if matches!(cur.peek_at(1), Tok::LBrace) && word == "bag" => {
            cur.bump();
            cur.bump();
            let entries = comma_list(cur, &Tok::RBrace, &mut |c| {
                let e = parse_lit(c, leaf)?;
                c.expect(&Tok::Colon)?;
                let k = parse_count(c)?;
                Ok((e, k))
            })?;
            Ok(Lit::Bag(entries, pos))
        }
        Tok::Ident(word) if matches!(cur.peek_at(1), Tok::LBrace) && word == "dist" => {
            cur.bump();
            cur.bump();
            let entries = comma_list(cur, &Tok::RBrace, &mut |c| {
                let e = parse_lit(c, leaf)?;
                c.expect(&Tok::Colon)?;
                let w = parse_ratio(c)?;
                Ok((e, w))
            })?;
            Ok(Lit::Dist(entries, pos))
        }
        Tok::Ident(word) if matches!(cur.peek_at(1), Tok::LParen) && (word == "inl" || word == "inr") => {
            cur.bump();
            cur.bump();
            let inner = parse_lit(cur, leaf)?;
            cur.expect(&Tok::RParen)?;
            if word == "inl" {
                Ok(Lit::Inl(Box::new(inner), pos))
            } else {
                Ok(Lit::Inr(Box::new(inner), pos))
            }
        }
        _ => Ok(Lit::Leaf(leaf(cur)?, pos)),
    }
}

pub(crate) fn comma_list<T>(
    cur: &mut Cursor,
    close: &Tok,
    item: &mut dyn FnMut(&mut Cursor) -> Result<T>,
) -> Result<Vec<T>> {
    let mut out = Vec::new();
    if cur.eat(close) {
        return Ok(out);
    }
    loop {
        out.push(item(cur)?);
        if cur.eat(close) {
            return Ok(out);
        }
        cur.expect(&Tok::Comma)?;
    }
}

fn parse_count(cur: &mut Cursor) -> Result<u64> {
    let pos = cur.pos();
    let word = cur.ident()?;
    match word.parse::<u64>() {
        Ok(k) if k > 0 => Ok(k),
        _ => Err(Error::syntax(pos, format!("expected a positive count, found `{word}`"))),
    }
}

fn parse_ratio(cur: &mut Cursor) -> Result<BigRational> {
    let pos = cur.pos();
    let num = parse_bigint(cur)?;
    let den = if cur.eat(&Tok::Slash) {
        parse_bigint(cur)?
    } else {
        BigInt::from(1)
    };
    if den == BigInt::from(0) {
        return Err(Error::syntax(pos, "zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

fn parse_bigint(cur: &mut Cursor) -> Result<BigInt> {
    let pos = cur.pos();
    let word = cur.ident()?;
    if !word.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::syntax(pos, format!("expected a number, found `{word}`")));
    }
    word.parse::<BigInt>()
        .map_err(|_| Error::syntax(pos, format!("bad number `{word}`")))
}

fn mismatch<L>(shape: &Shape, lit: &Lit<L>) -> Error {
    let what = match lit {
        Lit::Leaf(..) => "inner value",
        Lit::Const(..) => "constant",
        Lit::Set(..) => "set",
        Lit::Bag(..) => "bag",
        Lit::Dist(..) => "distribution",
        Lit::Tuple(..) => "tuple",
        Lit::Inl(..) | Lit::Inr(..) => "injection",
        Lit::Map(..) => "exponent map",
    };
    Error::ty(format!(
        "at offset {}: {what} literal does not fit functor shape {}",
        lit.pos(),
        crate::elem::describe_shape(shape)
    ))
}

/// Types an untyped literal against a shape. `inner` receives the literal
/// found at each identity position.
pub(crate) fn type_lit<L, V: Ord>(
    shape: &Shape,
    lit: Lit<L>,
    inner: &mut dyn FnMut(Lit<L>) -> Result<V>,
) -> Result<TElem<V>> {
    match (shape, lit) {
        (Shape::Id, lit) => Ok(TElem::Inner(inner(lit)?)),
        (Shape::Const(names), Lit::Const(name, pos)) => match names.iter().position(|n| **n == *name) {
            Some(i) => Ok(TElem::Const(ConstTag {
                index: i as u32,
                name: names[i].clone(),
            })),
            None => Err(Error::ty(format!("at offset {pos}: unknown constant '{name}"))),
        },
        (Shape::Pow(s), Lit::Set(items, _)) => {
            let mut out = Vec::with_capacity(items.len());
            for it in items {
                out.push(type_lit(s, it, inner)?);
            }
            Ok(TElem::set(out))
        }
        (Shape::Bag(s), Lit::Bag(entries, _)) => {
            let mut out = Vec::with_capacity(entries.len());
            for (it, k) in entries {
                out.push((type_lit(s, it, inner)?, k));
            }
            Ok(TElem::bag(out))
        }
        (Shape::Dist(s), Lit::Dist(entries, pos)) => {
            let mut out = Vec::with_capacity(entries.len());
            for (it, w) in entries {
                out.push((type_lit(s, it, inner)?, w));
            }
            TElem::dist(out).map_err(|e| Error::ty(format!("at offset {pos}: {e}")))
        }
        (Shape::Sum(a, _), Lit::Inl(x, _)) => Ok(TElem::inl(type_lit(a, *x, inner)?)),
        (Shape::Sum(_, b), Lit::Inr(x, _)) => Ok(TElem::inr(type_lit(b, *x, inner)?)),
        (Shape::Prod(a, b), Lit::Tuple(items, pos)) => {
            let spine = shape.product_spine();
            if items.len() == spine.len() {
                let mut it = items.into_iter().zip(spine);
                let (first, s0) = it.next().expect("non-empty tuple");
                let mut acc = type_lit(s0, first, inner)?;
                for (lit, s) in it {
                    acc = TElem::pair(acc, type_lit(s, lit, inner)?);
                }
                Ok(acc)
            } else if items.len() == 2 {
                let mut it = items.into_iter();
                let x = type_lit(a, it.next().expect("two items"), inner)?;
                let y = type_lit(b, it.next().expect("two items"), inner)?;
                Ok(TElem::pair(x, y))
            } else {
                Err(Error::ty(format!(
                    "at offset {pos}: tuple has {} components, functor expects {}",
                    items.len(),
                    spine.len()
                )))
            }
        }
        (Shape::Exp(s, dom), Lit::Map(entries, pos)) => {
            let mut slots: Vec<Option<TElem<V>>> = (0..dom.len()).map(|_| None).collect();
            for (d, lit) in entries {
                let i = dom
                    .iter()
                    .position(|n| **n == *d)
                    .ok_or_else(|| Error::ty(format!("at offset {pos}: `{d}` is not in the exponent domain")))?;
                if slots[i].is_some() {
                    return Err(Error::ty(format!("at offset {pos}: `{d}` given twice")));
                }
                slots[i] = Some(type_lit(s, lit, inner)?);
            }
            let mut out = Vec::with_capacity(dom.len());
            for (d, slot) in dom.iter().zip(slots) {
                let e = slot.ok_or_else(|| Error::ty(format!("at offset {pos}: exponent map is missing `{d}`")))?;
                out.push((d.clone(), e));
            }
            Ok(TElem::Map(out))
        }
        (shape, lit) => Err(mismatch(shape, &lit)),
    }
}

/// Leaf parser for plain identifiers (state names, atoms).
pub(crate) fn ident_leaf(cur: &mut Cursor) -> Result<String> {
    cur.ident()
}

/// Parses a complete element literal whose inner values are identifiers.
pub fn parse_elem(shape: &Shape, text: &str) -> Result<TElem<String>> {
    let mut cur = Cursor::new(text)?;
    let lit = parse_lit(&mut cur, &mut ident_leaf)?;
    cur.finish()?;
    type_lit(shape, lit, &mut leaf_ident)
}

/// Parses a set literal `{e1, e2, ...}` of elements over identifiers, as
/// used for the argument of slim redistributions.
pub fn parse_elem_set(shape: &Shape, text: &str) -> Result<Vec<TElem<String>>> {
    let mut cur = Cursor::new(text)?;
    cur.expect(&Tok::LBrace)?;
    let items = comma_list(&mut cur, &Tok::RBrace, &mut |c| {
        let lit = parse_lit(c, &mut ident_leaf)?;
        type_lit(shape, lit, &mut leaf_ident)
    })?;
    cur.finish()?;
    let mut items = items;
    items.sort();
    items.dedup();
    Ok(items)
}

pub(crate) fn leaf_ident(lit: Lit<String>) -> Result<String> {
    match lit {
        Lit::Leaf(s, _) => Ok(s),
        other => Err(mismatch(&Shape::Id, &other)),
    }
}

/// Parses an element of `T P X`: inner values are set literals of
/// identifiers.
pub fn parse_elem_of_sets(shape: &Shape, text: &str) -> Result<TElem<crate::elem::FinSet<String>>> {
    let mut cur = Cursor::new(text)?;
    let lit = parse_lit(&mut cur, &mut ident_leaf)?;
    cur.finish()?;
    type_lit(shape, lit, &mut leaf_set_of_idents)
}

pub(crate) fn leaf_set_of_idents(lit: Lit<String>) -> Result<crate::elem::FinSet<String>> {
    match lit {
        Lit::Set(items, _) => items.into_iter().map(leaf_ident).collect(),
        other => Err(Error::ty(format!(
            "at offset {}: expected a set of atoms at an identity position",
            other.pos()
        ))),
    }
}
