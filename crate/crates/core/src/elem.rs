//! Concrete elements of `T X`, stored in canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::functor::{Functor, Shape};

/// A finite set kept as a sorted, duplicate-free vector.
///
/// Sets are ordered shortest-first and then lexicographically, so that
/// `{} < {a} < {b} < {a,b}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinSet<V>(Vec<V>);

/// Carriers are finite sets; their order fixes the order of everything built
/// over them.
pub type FiniteCarrier<V> = FinSet<V>;

impl<V: Ord> FinSet<V> {
    pub fn new(items: impl IntoIterator<Item = V>) -> Self {
        let mut v: Vec<V> = items.into_iter().collect();
        v.sort();
        v.dedup();
        FinSet(v)
    }

    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    pub(crate) fn from_sorted(v: Vec<V>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        FinSet(v)
    }

    pub fn contains(&self, v: &V) -> bool {
        self.0.binary_search(v).is_ok()
    }

    pub fn index_of(&self, v: &V) -> Option<usize> {
        self.0.binary_search(v).ok()
    }

    pub fn is_subset(&self, other: &FinSet<V>) -> bool {
        self.0.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &FinSet<V>) -> FinSet<V>
    where
        V: Clone,
    {
        FinSet::new(self.0.iter().chain(other.0.iter()).cloned())
    }

    pub fn intersects(&self, other: &FinSet<V>) -> bool {
        self.0.iter().any(|x| other.contains(x))
    }
}

impl<V> FinSet<V> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, V> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[V] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<V> {
        self.0
    }
}

impl<V: Ord> FromIterator<V> for FinSet<V> {
    fn from_iter<I: IntoIterator<Item = V>>(iter: I) -> Self {
        FinSet::new(iter)
    }
}

impl<'a, V> IntoIterator for &'a FinSet<V> {
    type Item = &'a V;
    type IntoIter = std::slice::Iter<'a, V>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl<V: Ord> PartialOrd for FinSet<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<V: Ord> Ord for FinSet<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl<V: fmt::Display> fmt::Display for FinSet<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// A constant symbol; ordered by its position in the declaring `Const(..)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstTag {
    pub index: u32,
    pub name: Arc<str>,
}

/// An element of `T X` for the shape it was built against. Inner values `V`
/// sit at the identity positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TElem<V> {
    Inner(V),
    Const(ConstTag),
    Set(FinSet<TElem<V>>),
    /// Positive graph of a multiset: strictly increasing elements, counts > 0.
    Bag(Vec<(TElem<V>, u64)>),
    /// Support list of a distribution: strictly increasing elements, positive
    /// weights summing to one.
    Dist(Vec<(TElem<V>, BigRational)>),
    Inl(Box<TElem<V>>),
    Inr(Box<TElem<V>>),
    Pair(Box<TElem<V>>, Box<TElem<V>>),
    /// Exponent map, entries in domain declaration order.
    Map(Vec<(Arc<str>, TElem<V>)>),
}

impl<V> TElem<V> {
    fn rank(&self) -> u8 {
        match self {
            TElem::Inner(_) => 0,
            TElem::Const(_) => 1,
            TElem::Set(_) => 2,
            TElem::Bag(_) => 3,
            TElem::Dist(_) => 4,
            TElem::Inl(_) => 5,
            TElem::Inr(_) => 6,
            TElem::Pair(..) => 7,
            TElem::Map(_) => 8,
        }
    }
}

impl<V: Ord> PartialOrd for TElem<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<V: Ord> Ord for TElem<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TElem::Inner(a), TElem::Inner(b)) => a.cmp(b),
            (TElem::Const(a), TElem::Const(b)) => a.cmp(b),
            (TElem::Set(a), TElem::Set(b)) => a.cmp(b),
            (TElem::Bag(a), TElem::Bag(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            (TElem::Dist(a), TElem::Dist(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            (TElem::Inl(a), TElem::Inl(b)) | (TElem::Inr(a), TElem::Inr(b)) => a.cmp(b),
            (TElem::Pair(a1, a2), TElem::Pair(b1, b2)) => a1.cmp(b1).then_with(|| a2.cmp(b2)),
            (TElem::Map(a), TElem::Map(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl<V: Ord> TElem<V> {
    pub fn set(items: impl IntoIterator<Item = TElem<V>>) -> Self {
        TElem::Set(FinSet::new(items))
    }

    /// Builds a bag, merging repeated elements and dropping zero counts.
    pub fn bag(entries: impl IntoIterator<Item = (TElem<V>, u64)>) -> Self {
        let mut v: Vec<(TElem<V>, u64)> = entries.into_iter().filter(|(_, k)| *k > 0).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(TElem<V>, u64)> = Vec::with_capacity(v.len());
        for (e, k) in v {
            match out.last_mut() {
                Some((last, acc)) if *last == e => *acc += k,
                _ => out.push((e, k)),
            }
        }
        TElem::Bag(out)
    }

    /// Builds a distribution; weights are merged per element, zero weights
    /// dropped, and the total must be exactly one.
    pub fn dist(entries: impl IntoIterator<Item = (TElem<V>, BigRational)>) -> Result<Self> {
        let mut v: Vec<(TElem<V>, BigRational)> = Vec::new();
        for (e, w) in entries {
            if w.is_negative() {
                return Err(Error::ty(format!("negative distribution weight {w}")));
            }
            if !w.is_zero() {
                v.push((e, w));
            }
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(TElem<V>, BigRational)> = Vec::with_capacity(v.len());
        for (e, w) in v {
            match out.last_mut() {
                Some((last, acc)) if *last == e => *acc += w,
                _ => out.push((e, w)),
            }
        }
        let total: BigRational = out.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::ty(format!("distribution weights sum to {total}, not 1")));
        }
        Ok(TElem::Dist(out))
    }

    pub fn pair(a: TElem<V>, b: TElem<V>) -> Self {
        TElem::Pair(Box::new(a), Box::new(b))
    }

    pub fn inl(a: TElem<V>) -> Self {
        TElem::Inl(Box::new(a))
    }

    pub fn inr(a: TElem<V>) -> Self {
        TElem::Inr(Box::new(a))
    }

    /// Functorial action on inner values; the result is re-canonicalized
    /// (sets deduplicated, bag counts and distribution weights summed over
    /// collapsed preimages).
    pub fn map<W: Ord>(&self, f: &mut dyn FnMut(&V) -> W) -> TElem<W> {
        match self {
            TElem::Inner(v) => TElem::Inner(f(v)),
            TElem::Const(c) => TElem::Const(c.clone()),
            TElem::Set(s) => TElem::set(s.iter().map(|e| e.map(f)).collect::<Vec<_>>()),
            TElem::Bag(b) => TElem::bag(b.iter().map(|(e, k)| (e.map(f), *k)).collect::<Vec<_>>()),
            TElem::Dist(d) => {
                let entries: Vec<_> = d.iter().map(|(e, w)| (e.map(f), w.clone())).collect();
                // weights are already positive and sum to one
                TElem::dist(entries).expect("image of a distribution is a distribution")
            }
            TElem::Inl(a) => TElem::inl(a.map(f)),
            TElem::Inr(a) => TElem::inr(a.map(f)),
            TElem::Pair(a, b) => TElem::pair(a.map(f), b.map(f)),
            TElem::Map(m) => TElem::Map(m.iter().map(|(d, e)| (d.clone(), e.map(f))).collect()),
        }
    }

    /// Fallible variant of [`TElem::map`].
    pub fn try_map<W: Ord, E>(
        &self,
        f: &mut dyn FnMut(&V) -> std::result::Result<W, E>,
    ) -> std::result::Result<TElem<W>, E> {
        Ok(match self {
            TElem::Inner(v) => TElem::Inner(f(v)?),
            TElem::Const(c) => TElem::Const(c.clone()),
            TElem::Set(s) => TElem::set(
                s.iter()
                    .map(|e| e.try_map(f))
                    .collect::<std::result::Result<Vec<_>, E>>()?,
            ),
            TElem::Bag(b) => {
                let mut entries = Vec::with_capacity(b.len());
                for (e, k) in b {
                    entries.push((e.try_map(f)?, *k));
                }
                TElem::bag(entries)
            }
            TElem::Dist(d) => {
                let mut entries = Vec::with_capacity(d.len());
                for (e, w) in d {
                    entries.push((e.try_map(f)?, w.clone()));
                }
                TElem::dist(entries).expect("image of a distribution is a distribution")
            }
            TElem::Inl(a) => TElem::inl(a.try_map(f)?),
            TElem::Inr(a) => TElem::inr(a.try_map(f)?),
            TElem::Pair(a, b) => TElem::pair(a.try_map(f)?, b.try_map(f)?),
            TElem::Map(m) => {
                let mut entries = Vec::with_capacity(m.len());
                for (d, e) in m {
                    entries.push((d.clone(), e.try_map(f)?));
                }
                TElem::Map(entries)
            }
        })
    }

    /// Visits every inner value, in structural order.
    pub fn for_each_inner<'a>(&'a self, f: &mut dyn FnMut(&'a V)) {
        match self {
            TElem::Inner(v) => f(v),
            TElem::Const(_) => {}
            TElem::Set(s) => s.iter().for_each(|e| e.for_each_inner(f)),
            TElem::Bag(b) => b.iter().for_each(|(e, _)| e.for_each_inner(f)),
            TElem::Dist(d) => d.iter().for_each(|(e, _)| e.for_each_inner(f)),
            TElem::Inl(a) | TElem::Inr(a) => a.for_each_inner(f),
            TElem::Pair(a, b) => {
                a.for_each_inner(f);
                b.for_each_inner(f);
            }
            TElem::Map(m) => m.iter().for_each(|(_, e)| e.for_each_inner(f)),
        }
    }

    /// The least set `Y` with `self ∈ T Y`.
    pub fn base(&self) -> FinSet<V>
    where
        V: Clone,
    {
        let mut out = Vec::new();
        self.for_each_inner(&mut |v| out.push(v.clone()));
        FinSet::new(out)
    }
}

/// Checks that `e` is a canonical element of the given shape, calling
/// `inner` on every inner value.
pub fn typecheck<V: Ord>(shape: &Shape, e: &TElem<V>, inner: &mut dyn FnMut(&V) -> Result<()>) -> Result<()> {
    match (shape, e) {
        (Shape::Id, TElem::Inner(v)) => inner(v),
        (Shape::Const(names), TElem::Const(tag)) => match names.get(tag.index as usize) {
            Some(n) if **n == *tag.name => Ok(()),
            _ => Err(Error::ty(format!("constant '{} is not declared", tag.name))),
        },
        (Shape::Pow(s), TElem::Set(items)) => items.iter().try_for_each(|x| typecheck(s, x, inner)),
        (Shape::Bag(s), TElem::Bag(entries)) => {
            if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::ty("bag entries are not in canonical order"));
            }
            for (x, k) in entries {
                if *k == 0 {
                    return Err(Error::ty("bag with a zero count"));
                }
                typecheck(s, x, inner)?;
            }
            Ok(())
        }
        (Shape::Dist(s), TElem::Dist(entries)) => {
            if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::ty("distribution entries are not in canonical order"));
            }
            let mut total = BigRational::zero();
            for (x, w) in entries {
                if !w.is_positive() {
                    return Err(Error::ty("distribution with a non-positive weight"));
                }
                total += w;
                typecheck(s, x, inner)?;
            }
            if !total.is_one() {
                return Err(Error::ty(format!("distribution weights sum to {total}")));
            }
            Ok(())
        }
        (Shape::Sum(a, _), TElem::Inl(x)) => typecheck(a, x, inner),
        (Shape::Sum(_, b), TElem::Inr(x)) => typecheck(b, x, inner),
        (Shape::Prod(a, b), TElem::Pair(x, y)) => {
            typecheck(a, x, inner)?;
            typecheck(b, y, inner)
        }
        (Shape::Exp(s, dom), TElem::Map(entries)) => {
            if entries.len() != dom.len() || entries.iter().zip(dom).any(|((d, _), n)| d != n) {
                return Err(Error::ty("exponent map does not match its domain"));
            }
            entries.iter().try_for_each(|(_, x)| typecheck(s, x, inner))
        }
        _ => Err(Error::ty(format!(
            "element of kind {} does not fit functor shape {}",
            kind(e),
            describe_shape(shape)
        ))),
    }
}

fn kind<V>(e: &TElem<V>) -> &'static str {
    match e {
        TElem::Inner(_) => "inner value",
        TElem::Const(_) => "constant",
        TElem::Set(_) => "set",
        TElem::Bag(_) => "bag",
        TElem::Dist(_) => "distribution",
        TElem::Inl(_) => "inl",
        TElem::Inr(_) => "inr",
        TElem::Pair(..) => "tuple",
        TElem::Map(_) => "exponent map",
    }
}

pub(crate) fn describe_shape(shape: &Shape) -> &'static str {
    match shape {
        Shape::Id => "Id",
        Shape::Const(_) => "Const",
        Shape::Pow(_) => "P",
        Shape::Bag(_) => "Bag",
        Shape::Dist(_) => "Dist",
        Shape::Sum(..) => "sum",
        Shape::Prod(..) => "product",
        Shape::Exp(..) => "exponent",
    }
}

/// Checks `e` against the functor with inner values drawn from `carrier`.
pub fn check_over<V: Ord + fmt::Debug>(functor: &Functor, carrier: &FinSet<V>, e: &TElem<V>) -> Result<()> {
    typecheck(functor.shape(), e, &mut |v| {
        if carrier.contains(v) {
            Ok(())
        } else {
            Err(Error::CarrierMismatch(format!("{v:?} is not in the carrier")))
        }
    })
}

/// `T f` applied to `e`, after checking `e` against the functor and `f`'s
/// domain.
pub fn fmap<V: Ord + Clone + fmt::Debug, W: Ord + Clone>(
    functor: &Functor,
    f: &std::collections::BTreeMap<V, W>,
    e: &TElem<V>,
) -> Result<TElem<W>> {
    typecheck(functor.shape(), e, &mut |v| {
        if f.contains_key(v) {
            Ok(())
        } else {
            Err(Error::CarrierMismatch(format!("map is undefined on {v:?}")))
        }
    })?;
    Ok(e.map(&mut |v| f[v].clone()))
}

/// The least finite subset `Y` of the carrier with `e ∈ T Y`.
pub fn base<V: Ord + Clone>(functor: &Functor, e: &TElem<V>) -> Result<FinSet<V>> {
    typecheck(functor.shape(), e, &mut |_| Ok(()))?;
    Ok(e.base())
}

/// Canonical total order on elements of the same functor.
pub fn canonical_compare<V: Ord>(functor: &Functor, a: &TElem<V>, b: &TElem<V>) -> Result<Ordering> {
    typecheck(functor.shape(), a, &mut |_| Ok(()))?;
    typecheck(functor.shape(), b, &mut |_| Ok(()))?;
    Ok(a.cmp(b))
}

impl<V: fmt::Display> fmt::Display for TElem<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TElem::Inner(v) => write!(f, "{v}"),
            TElem::Const(c) => write!(f, "'{}", c.name),
            TElem::Set(s) => {
                write!(f, "{{")?;
                for (i, x) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "}}")
            }
            TElem::Bag(b) => {
                write!(f, "bag{{")?;
                for (i, (x, k)) in b.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}:{k}")?;
                }
                write!(f, "}}")
            }
            TElem::Dist(d) => {
                write!(f, "dist{{")?;
                for (i, (x, w)) in d.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}:{}/{}", w.numer(), w.denom())?;
                }
                write!(f, "}}")
            }
            TElem::Inl(a) => write!(f, "inl({a})"),
            TElem::Inr(a) => write!(f, "inr({a})"),
            TElem::Pair(..) => {
                let mut parts = Vec::new();
                flatten_pair(self, &mut parts);
                write!(f, "(")?;
                for (i, x) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            TElem::Map(m) => {
                write!(f, "[")?;
                for (i, (d, x)) in m.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{d}:{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

fn flatten_pair<'a, V>(e: &'a TElem<V>, out: &mut Vec<&'a TElem<V>>) {
    match e {
        TElem::Pair(a, b) => {
            flatten_pair(a, out);
            out.push(b);
        }
        other => out.push(other),
    }
}
