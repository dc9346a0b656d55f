//! Relation lifting `T̄R`, lifted members `λ^T`, and relation algebra.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::elem::{check_over, typecheck, FinSet, TElem};
use crate::enumerate::{enumerate_bounded_bags, enumerate_shape};
use crate::error::{Error, Result};
use crate::flow::transport;
use crate::functor::{Functor, Shape};

/// A relation between two finite carriers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation<A, B> {
    domain: FinSet<A>,
    codomain: FinSet<B>,
    pairs: BTreeSet<(A, B)>,
}

impl<A: Ord + Clone + fmt::Debug, B: Ord + Clone + fmt::Debug> Relation<A, B> {
    pub fn new(domain: FinSet<A>, codomain: FinSet<B>, pairs: impl IntoIterator<Item = (A, B)>) -> Result<Self> {
        let pairs: BTreeSet<(A, B)> = pairs.into_iter().collect();
        for (a, b) in &pairs {
            if !domain.contains(a) {
                return Err(Error::CarrierMismatch(format!("{a:?} is not in the domain")));
            }
            if !codomain.contains(b) {
                return Err(Error::CarrierMismatch(format!("{b:?} is not in the codomain")));
            }
        }
        Ok(Relation {
            domain,
            codomain,
            pairs,
        })
    }

    /// The graph `{(x, f(x))}` of a function.
    pub fn graph(domain: FinSet<A>, codomain: FinSet<B>, f: impl Fn(&A) -> B) -> Result<Self> {
        let pairs: Vec<(A, B)> = domain.iter().map(|a| (a.clone(), f(a))).collect();
        Relation::new(domain, codomain, pairs)
    }

    pub fn contains(&self, a: &A, b: &B) -> bool {
        // (A, B) tuples need owned keys for BTreeSet lookup
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn domain(&self) -> &FinSet<A> {
        &self.domain
    }

    pub fn codomain(&self) -> &FinSet<B> {
        &self.codomain
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(A, B)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn converse(&self) -> Relation<B, A> {
        Relation {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }
}

impl<A: Ord + Clone + fmt::Debug> Relation<A, A> {
    pub fn identity(carrier: FinSet<A>) -> Self {
        let pairs: Vec<(A, A)> = carrier.iter().map(|a| (a.clone(), a.clone())).collect();
        Relation {
            codomain: carrier.clone(),
            domain: carrier,
            pairs: pairs.into_iter().collect(),
        }
    }
}

/// `R ; Q = {(x, z) | ∃y. x R y ∧ y Q z}`.
pub fn compose_relations<A, B, C>(r: &Relation<A, B>, q: &Relation<B, C>) -> Result<Relation<A, C>>
where
    A: Ord + Clone + fmt::Debug,
    B: Ord + Clone + fmt::Debug,
    C: Ord + Clone + fmt::Debug,
{
    if r.codomain != q.domain {
        return Err(Error::CarrierMismatch(
            "codomain of the first relation differs from the domain of the second".into(),
        ));
    }
    let mut pairs = BTreeSet::new();
    for (x, y) in &r.pairs {
        for (y2, z) in &q.pairs {
            if y2 == y {
                pairs.insert((x.clone(), z.clone()));
            }
        }
    }
    Ok(Relation {
        domain: r.domain.clone(),
        codomain: q.codomain.clone(),
        pairs,
    })
}

/// Core structural lifting test; elements are assumed well-typed against the
/// same shape.
pub(crate) fn lift<V, W>(rel: &dyn Fn(&V, &W) -> bool, a: &TElem<V>, b: &TElem<W>) -> bool {
    match (a, b) {
        (TElem::Inner(x), TElem::Inner(y)) => rel(x, y),
        (TElem::Const(c), TElem::Const(d)) => c == d,
        (TElem::Set(xs), TElem::Set(ys)) => {
            xs.iter().all(|x| ys.iter().any(|y| lift(rel, x, y)))
                && ys.iter().all(|y| xs.iter().any(|x| lift(rel, x, y)))
        }
        (TElem::Bag(xs), TElem::Bag(ys)) => bag_flow(rel, xs, ys).is_some(),
        (TElem::Dist(xs), TElem::Dist(ys)) => dist_flow(rel, xs, ys).is_some(),
        (TElem::Inl(x), TElem::Inl(y)) | (TElem::Inr(x), TElem::Inr(y)) => lift(rel, x, y),
        (TElem::Pair(x1, x2), TElem::Pair(y1, y2)) => lift(rel, x1, y1) && lift(rel, x2, y2),
        (TElem::Map(xs), TElem::Map(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|((d1, x), (d2, y))| d1 == d2 && lift(rel, x, y))
        }
        _ => false,
    }
}

fn edges_between<V, W, C>(
    rel: &dyn Fn(&V, &W) -> bool,
    xs: &[(TElem<V>, C)],
    ys: &[(TElem<W>, C)],
) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (i, (x, _)) in xs.iter().enumerate() {
        for (j, (y, _)) in ys.iter().enumerate() {
            if lift(rel, x, y) {
                edges.push((i, j));
            }
        }
    }
    edges
}

fn bag_flow<V, W>(
    rel: &dyn Fn(&V, &W) -> bool,
    xs: &[(TElem<V>, u64)],
    ys: &[(TElem<W>, u64)],
) -> Option<Vec<((usize, usize), u64)>> {
    let edges = edges_between(rel, xs, ys);
    let supply: Vec<u64> = xs.iter().map(|(_, k)| *k).collect();
    let demand: Vec<u64> = ys.iter().map(|(_, k)| *k).collect();
    transport(&supply, &demand, &edges).map(|flows| edges.into_iter().zip(flows).collect())
}

fn dist_flow<V, W>(
    rel: &dyn Fn(&V, &W) -> bool,
    xs: &[(TElem<V>, BigRational)],
    ys: &[(TElem<W>, BigRational)],
) -> Option<Vec<((usize, usize), BigRational)>> {
    let edges = edges_between(rel, xs, ys);
    let supply: Vec<BigRational> = xs.iter().map(|(_, w)| w.clone()).collect();
    let demand: Vec<BigRational> = ys.iter().map(|(_, w)| w.clone()).collect();
    transport(&supply, &demand, &edges).map(|flows| edges.into_iter().zip(flows).collect())
}

/// The coupling `ρ` showing that two bags or distributions are related.
/// Bag witnesses are integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowWitness<A, B> {
    pub assignments: Vec<(TElem<A>, TElem<B>, BigRational)>,
}

/// Decides `(e1, e2) ∈ T̄R`.
pub fn in_lifting<A, B>(functor: &Functor, r: &Relation<A, B>, e1: &TElem<A>, e2: &TElem<B>) -> Result<bool>
where
    A: Ord + Clone + fmt::Debug,
    B: Ord + Clone + fmt::Debug,
{
    check_over(functor, &r.domain, e1)?;
    check_over(functor, &r.codomain, e2)?;
    Ok(lift(&|a: &A, b: &B| r.contains(a, b), e1, e2))
}

/// For a bag or distribution functor, returns a coupling when the two
/// elements are related; `None` when they are not or when the top level is
/// not a bag or distribution.
pub fn lifting_witness<A, B>(
    functor: &Functor,
    r: &Relation<A, B>,
    e1: &TElem<A>,
    e2: &TElem<B>,
) -> Result<Option<FlowWitness<A, B>>>
where
    A: Ord + Clone + fmt::Debug,
    B: Ord + Clone + fmt::Debug,
{
    check_over(functor, &r.domain, e1)?;
    check_over(functor, &r.codomain, e2)?;
    let rel = |a: &A, b: &B| r.contains(a, b);
    let assignments = match (e1, e2) {
        (TElem::Bag(xs), TElem::Bag(ys)) => bag_flow(&rel, xs, ys).map(|flows| {
            flows
                .into_iter()
                .filter(|(_, k)| *k > 0)
                .map(|((i, j), k)| (xs[i].0.clone(), ys[j].0.clone(), BigRational::from_integer(k.into())))
                .collect()
        }),
        (TElem::Dist(xs), TElem::Dist(ys)) => dist_flow(&rel, xs, ys).map(|flows| {
            flows
                .into_iter()
                .filter(|(_, w)| !w.is_zero())
                .map(|((i, j), w)| (xs[i].0.clone(), ys[j].0.clone(), w))
                .collect()
        }),
        _ => None,
    };
    Ok(assignments.map(|assignments| FlowWitness { assignments }))
}

/// `λ^T(Φ) = {α ∈ T X | α T̄(∈) Φ}`, in canonical order.
///
/// Candidates are drawn from `T (⋃ Base(Φ))`, which contains every lifted
/// member since lifting commutes with restriction. For the bag functor the
/// candidates are bags with `α(x) ≤ Σ_{U ∋ x} Φ(U)`.
pub fn lifted_members<V: Ord + Clone + fmt::Debug>(functor: &Functor, phi: &TElem<FinSet<V>>) -> Result<Vec<TElem<V>>> {
    typecheck(functor.shape(), phi, &mut |_| Ok(()))?;
    let member = |x: &V, u: &FinSet<V>| u.contains(x);
    let candidates = member_candidates(functor, phi)?;
    Ok(candidates
        .into_iter()
        .filter(|alpha| lift(&member, alpha, phi))
        .collect())
}

fn member_candidates<V: Ord + Clone>(functor: &Functor, phi: &TElem<FinSet<V>>) -> Result<Vec<TElem<V>>> {
    let shape = functor.shape();
    if shape.preserves_finite() {
        let mut carrier: Vec<V> = Vec::new();
        phi.for_each_inner(&mut |u| carrier.extend(u.iter().cloned()));
        let carrier = FinSet::new(carrier);
        return enumerate_shape(shape, carrier.as_slice(), functor.max_enum());
    }
    match (shape, phi) {
        (Shape::Bag(inner), TElem::Bag(entries)) if **inner == Shape::Id => {
            let mut bounds: std::collections::BTreeMap<V, u64> = Default::default();
            for (u, k) in entries {
                if let TElem::Inner(set) = u {
                    for x in set {
                        *bounds.entry(x.clone()).or_insert(0) += k;
                    }
                }
            }
            let bounds: Vec<(V, u64)> = bounds.into_iter().collect();
            enumerate_bounded_bags(&bounds, functor.max_enum())
        }
        _ => Err(Error::NotEnumerable(format!(
            "lifted members for functor {} (only finite-preserving functors and Bag are supported)",
            functor
        ))),
    }
}

/// Parses a relation file: `dom:` and `cod:` lines listing the carriers,
/// then one `left<TAB>right` pair per line.
pub fn parse_relation(text: &str) -> Result<Relation<String, String>> {
    let mut domain = None;
    let mut codomain = None;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words = |s: &str| s.split_whitespace().map(str::to_string).collect::<FinSet<String>>();
        if let Some(rest) = line.strip_prefix("dom:") {
            domain = Some(words(rest));
        } else if let Some(rest) = line.strip_prefix("cod:") {
            codomain = Some(words(rest));
        } else {
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => pairs.push((a.to_string(), b.to_string())),
                _ => {
                    return Err(Error::Syntax {
                        pos: 0,
                        msg: format!("line {}: expected `left<TAB>right`", lineno + 1),
                    })
                }
            }
        }
    }
    let missing = |k: &str| Error::Syntax {
        pos: 0,
        msg: format!("relation file has no `{k}:` line"),
    };
    Relation::new(
        domain.ok_or_else(|| missing("dom"))?,
        codomain.ok_or_else(|| missing("cod"))?,
        pairs,
    )
}
