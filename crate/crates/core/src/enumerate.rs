//! Enumeration of `T X` for finite `X`.

use crate::elem::{ConstTag, FinSet, TElem};
use crate::error::{Error, Result};
use crate::functor::{Functor, Shape};

/// Number of elements of `T X` for `|X| = n`, or `None` if the functor does
/// not preserve finite sets or the count overflows.
pub fn count(shape: &Shape, n: u128) -> Option<u128> {
    match shape {
        Shape::Id => Some(n),
        Shape::Const(c) => Some(c.len() as u128),
        Shape::Pow(s) => {
            let k = count(s, n)?;
            if k >= 127 {
                None
            } else {
                Some(1u128 << k)
            }
        }
        Shape::Bag(_) | Shape::Dist(_) => None,
        Shape::Sum(a, b) => count(a, n)?.checked_add(count(b, n)?),
        Shape::Prod(a, b) => count(a, n)?.checked_mul(count(b, n)?),
        Shape::Exp(s, d) => {
            let k = count(s, n)?;
            let mut acc: u128 = 1;
            for _ in 0..d.len() {
                acc = acc.checked_mul(k)?;
            }
            Some(acc)
        }
    }
}

/// Every element of `T X`, in canonical order.
pub fn enumerate<V: Ord + Clone>(functor: &Functor, carrier: &FinSet<V>) -> Result<Vec<TElem<V>>> {
    functor.require_finite()?;
    enumerate_shape(functor.shape(), carrier.as_slice(), functor.max_enum())
}

/// Enumerates a finite-preserving shape over a sorted, duplicate-free carrier.
pub(crate) fn enumerate_shape<V: Ord + Clone>(shape: &Shape, carrier: &[V], cap: usize) -> Result<Vec<TElem<V>>> {
    if !shape.preserves_finite() {
        return Err(Error::NotFinitary(format!("{shape:?}")));
    }
    match count(shape, carrier.len() as u128) {
        Some(k) if k <= cap as u128 => {}
        _ => {
            return Err(Error::EnumerationLimit {
                limit: cap,
                level: None,
            })
        }
    }
    Ok(match shape {
        Shape::Id => carrier.iter().cloned().map(TElem::Inner).collect(),
        Shape::Const(names) => names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                TElem::Const(ConstTag {
                    index: i as u32,
                    name: n.clone(),
                })
            })
            .collect(),
        Shape::Pow(s) => {
            let items = enumerate_shape(s, carrier, cap)?;
            let mut out = Vec::with_capacity(1 << items.len());
            for mask in 0u64..(1u64 << items.len()) {
                let chosen: Vec<TElem<V>> = items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, e)| e.clone())
                    .collect();
                out.push(TElem::Set(FinSet::from_sorted(chosen)));
            }
            out.sort();
            out
        }
        Shape::Sum(a, b) => {
            let mut out: Vec<TElem<V>> = enumerate_shape(a, carrier, cap)?.into_iter().map(TElem::inl).collect();
            out.extend(enumerate_shape(b, carrier, cap)?.into_iter().map(TElem::inr));
            out
        }
        Shape::Prod(a, b) => {
            let left = enumerate_shape(a, carrier, cap)?;
            let right = enumerate_shape(b, carrier, cap)?;
            let mut out = Vec::with_capacity(left.len() * right.len());
            for x in &left {
                for y in &right {
                    out.push(TElem::pair(x.clone(), y.clone()));
                }
            }
            out
        }
        Shape::Exp(s, dom) => {
            let values = enumerate_shape(s, carrier, cap)?;
            let mut out = Vec::new();
            if dom.is_empty() || !values.is_empty() {
                let mut idx = vec![0usize; dom.len()];
                loop {
                    out.push(TElem::Map(
                        dom.iter()
                            .zip(&idx)
                            .map(|(d, &i)| (d.clone(), values[i].clone()))
                            .collect(),
                    ));
                    // odometer, last position fastest
                    let mut k = dom.len();
                    loop {
                        if k == 0 {
                            return Ok(out);
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < values.len() {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
            out
        }
        Shape::Bag(_) | Shape::Dist(_) => unreachable!("rejected above"),
    })
}

/// All bags over the carrier with `α(x) ≤ bound(x)`, in canonical order.
/// `bounds` must be sorted by element and duplicate-free.
pub(crate) fn enumerate_bounded_bags<V: Ord + Clone>(bounds: &[(V, u64)], cap: usize) -> Result<Vec<TElem<V>>> {
    let mut total: u128 = 1;
    for (_, b) in bounds {
        total = total
            .checked_mul(*b as u128 + 1)
            .filter(|t| *t <= cap as u128)
            .ok_or(Error::EnumerationLimit {
                limit: cap,
                level: None,
            })?;
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut counts = vec![0u64; bounds.len()];
    loop {
        out.push(TElem::Bag(
            bounds
                .iter()
                .zip(&counts)
                .filter(|(_, &k)| k > 0)
                .map(|((v, _), &k)| (TElem::Inner(v.clone()), k))
                .collect(),
        ));
        let mut k = 0;
        loop {
            if k == bounds.len() {
                out.sort();
                return Ok(out);
            }
            counts[k] += 1;
            if counts[k] <= bounds[k].1 {
                break;
            }
            counts[k] = 0;
            k += 1;
        }
    }
}
