mod common;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use common::{carrier, functor};
use nabla_core::{
    base, canonical_compare, count, enumerate, fmap, parse_elem, parse_functor, Error, FinSet, Functor, FunctorExpr,
    TElem,
};
use num_rational::BigRational;
use proptest::prelude::*;

const FINITE: &[&str] = &[
    "Id",
    "Const(c,d)",
    "P",
    "Const(c) * Id * Id",
    "Id + P",
    "P . P",
    "P^(d1,d2)",
    "(Const(c) + Id) * P",
];

fn all_maps(x: &FinSet<String>, y: &FinSet<String>) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for a in x.iter() {
        out = out
            .into_iter()
            .flat_map(|m| {
                y.iter().map(move |b| {
                    let mut m = m.clone();
                    m.insert(a.clone(), b.clone());
                    m
                })
            })
            .collect();
    }
    out
}

fn subsets(x: &FinSet<String>) -> Vec<FinSet<String>> {
    let items = x.as_slice();
    (0..(1usize << items.len()))
        .map(|mask| {
            FinSet::new(
                (0..items.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| items[i].clone()),
            )
        })
        .collect()
}

fn elem(f: &Functor, text: &str) -> TElem<String> {
    parse_elem(f.shape(), text).unwrap()
}

#[test]
fn parse_examples() {
    let tree = FunctorExpr::product(
        FunctorExpr::product(FunctorExpr::Constant(vec!["c".into()]), FunctorExpr::Identity),
        FunctorExpr::Identity,
    );
    assert_eq!(parse_functor("Const(c) * Id * Id").unwrap(), tree);
    assert_eq!(parse_functor("Id").unwrap(), FunctorExpr::Identity);
    assert_eq!(
        parse_functor("P . P").unwrap(),
        FunctorExpr::compose(FunctorExpr::FinPow, FunctorExpr::FinPow)
    );
}

#[test]
fn parse_errors() {
    assert!(matches!(parse_functor("P *"), Err(Error::Syntax { .. })));
    assert!(matches!(parse_functor("Const(c,c)"), Err(Error::DuplicateSymbol(_))));
    assert!(parse_functor("Q").is_err());
}

#[test]
fn enumerate_examples() {
    let p = functor("P");
    let shown = |v: Vec<TElem<String>>| v.iter().map(|e| e.to_string()).collect::<Vec<_>>();
    let ab = FinSet::new(["a".to_string(), "b".to_string()]);
    assert_eq!(shown(enumerate(&p, &ab).unwrap()), ["{}", "{a}", "{b}", "{a,b}"]);

    let cx = functor("Const(c,d) * Id");
    assert_eq!(
        shown(enumerate(&cx, &FinSet::new(["x".to_string()])).unwrap()),
        ["('c,x)", "('d,x)"]
    );

    let t1 = enumerate(&p, &FinSet::new(["*".to_string()])).unwrap();
    let t2: Vec<String> = enumerate(&p, &FinSet::new(t1))
        .unwrap()
        .iter()
        .map(|e| e.to_string())
        .collect();
    assert_eq!(t2, ["{}", "{{}}", "{{*}}", "{{},{*}}"]);
}

#[test]
fn enumerate_respects_the_cap() {
    let p = functor("P").with_max_enum(10);
    assert!(matches!(
        enumerate(&p, &carrier("x", 4)),
        Err(Error::EnumerationLimit { .. })
    ));
    assert_eq!(enumerate(&p, &carrier("x", 3)).unwrap().len(), 8);
    assert!(matches!(
        enumerate(&functor("Bag"), &carrier("x", 1)),
        Err(Error::NotFinitary(_))
    ));
}

#[test]
fn enumerate_is_strictly_increasing_and_counted() {
    for text in FINITE {
        let f = functor(text);
        for n in 0..=3 {
            let all = enumerate(&f, &carrier("x", n)).unwrap();
            assert_eq!(count(f.shape(), n as u128), Some(all.len() as u128), "{text} over {n}");
            for w in all.windows(2) {
                assert_eq!(
                    canonical_compare(&f, &w[0], &w[1]).unwrap(),
                    Ordering::Less,
                    "{text}: {} {}",
                    w[0],
                    w[1]
                );
            }
        }
    }
}

#[test]
fn fmap_examples() {
    let bag = functor("Bag");
    let f: BTreeMap<String, String> = [("x", "z"), ("y", "z")]
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .into();
    assert_eq!(
        fmap(&bag, &f, &elem(&bag, "bag{x:2, y:1}")).unwrap().to_string(),
        "bag{z:3}"
    );

    let p = functor("P");
    let g: BTreeMap<String, String> = [("1", "a"), ("2", "a")]
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .into();
    let e = TElem::set(["1", "2"].map(|s| TElem::Inner(s.to_string())));
    assert_eq!(fmap(&p, &g, &e).unwrap().to_string(), "{a}");

    let partial: BTreeMap<String, String> = [("x".to_string(), "z".to_string())].into();
    assert!(matches!(
        fmap(&bag, &partial, &elem(&bag, "bag{x:2, y:1}")),
        Err(Error::CarrierMismatch(_))
    ));
}

#[test]
fn base_examples() {
    let tree = functor("Const(c) * Id * Id");
    assert_eq!(
        base(&tree, &elem(&tree, "('c,x1,x2)")).unwrap().into_vec(),
        ["x1", "x2"]
    );
    let p = functor("P");
    assert_eq!(base(&p, &elem(&p, "{a,b}")).unwrap().into_vec(), ["a", "b"]);
    let d = functor("Dist");
    assert_eq!(
        base(&d, &elem(&d, "dist{a:1/3, b:2/3}")).unwrap().into_vec(),
        ["a", "b"]
    );
}

#[test]
fn canonical_compare_examples() {
    let p = functor("P");
    assert_eq!(
        canonical_compare(&p, &elem(&p, "{}"), &elem(&p, "{a}")).unwrap(),
        Ordering::Less
    );
    let cx = functor("Const(c) * Id");
    let e = elem(&cx, "('c,x)");
    assert_eq!(canonical_compare(&cx, &e, &e).unwrap(), Ordering::Equal);
    let s = functor("Id + Id");
    assert_eq!(
        canonical_compare(&s, &elem(&s, "inl(x)"), &elem(&s, "inr(x)")).unwrap(),
        Ordering::Less
    );
    assert!(canonical_compare(&p, &elem(&p, "{a}"), &elem(&cx, "('c,x)")).is_err());
}

#[test]
fn functor_laws() {
    for text in FINITE {
        let f = functor(text);
        for nx in 0..=3 {
            let x = carrier("x", nx);
            let id: BTreeMap<String, String> = x.iter().map(|a| (a.clone(), a.clone())).collect();
            let elems = enumerate(&f, &x).unwrap();
            for e in &elems {
                assert_eq!(&fmap(&f, &id, e).unwrap(), e);
            }
            for ny in 1..=2 {
                let y = carrier("y", ny);
                let z = carrier("z", 2);
                for m in all_maps(&x, &y) {
                    for n in all_maps(&y, &z) {
                        let nm: BTreeMap<String, String> = m.iter().map(|(a, b)| (a.clone(), n[b].clone())).collect();
                        for e in &elems {
                            let composite = fmap(&f, &nm, e).unwrap();
                            let stepwise = fmap(&f, &n, &fmap(&f, &m, e).unwrap()).unwrap();
                            assert_eq!(composite, stepwise, "{text}: {e}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn base_is_minimal() {
    for text in FINITE {
        let f = functor(text);
        for e in enumerate(&f, &carrier("x", 3)).unwrap() {
            let b = base(&f, &e).unwrap();
            for y in subsets(&b).into_iter().filter(|y| y.len() < b.len()) {
                assert!(!enumerate(&f, &y).unwrap().contains(&e), "{text}: {e} over {y:?}");
            }
            assert!(enumerate(&f, &b).unwrap().contains(&e));
        }
    }
}

#[test]
fn base_is_natural() {
    for text in FINITE {
        let f = functor(text);
        let x = carrier("x", 3);
        let elems = enumerate(&f, &x).unwrap();
        for m in all_maps(&x, &carrier("y", 2)) {
            for e in &elems {
                let image = FinSet::new(base(&f, e).unwrap().iter().map(|a| m[a].clone()));
                assert_eq!(image, base(&f, &fmap(&f, &m, e).unwrap()).unwrap(), "{text}: {e}");
            }
        }
    }
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn to_map(codes: &[u8]) -> BTreeMap<String, String> {
    codes
        .iter()
        .enumerate()
        .map(|(i, c)| (format!("x{i}"), format!("y{c}")))
        .collect()
}

proptest! {
    #[test]
    fn bag_laws(counts in proptest::collection::vec(0u64..3, 3), m in proptest::collection::vec(0u8..2, 3), n in proptest::collection::vec(0u8..2, 2)) {
        let f = functor("Bag");
        let e = TElem::bag(names(3).into_iter().zip(counts).map(|(x, k)| (TElem::Inner(x), k)));
        let id: BTreeMap<String, String> = names(3).into_iter().map(|x| (x.clone(), x)).collect();
        prop_assert_eq!(&fmap(&f, &id, &e).unwrap(), &e);
        let m = to_map(&m);
        let n: BTreeMap<String, String> = n.iter().enumerate().map(|(i, c)| (format!("y{i}"), format!("z{c}"))).collect();
        let nm: BTreeMap<String, String> = m.iter().map(|(a, b)| (a.clone(), n[b].clone())).collect();
        prop_assert_eq!(fmap(&f, &nm, &e).unwrap(), fmap(&f, &n, &fmap(&f, &m, &e).unwrap()).unwrap());
        let image = FinSet::new(base(&f, &e).unwrap().iter().map(|a| m[a].clone()));
        prop_assert_eq!(image, base(&f, &fmap(&f, &m, &e).unwrap()).unwrap());
    }

    #[test]
    fn dist_laws(weights in proptest::collection::vec(0i64..4, 3), m in proptest::collection::vec(0u8..2, 3)) {
        prop_assume!(weights.iter().any(|w| *w > 0));
        let f = functor("Dist");
        let total: i64 = weights.iter().sum();
        let e = TElem::dist(
            names(3).into_iter().zip(&weights).map(|(x, w)| (TElem::Inner(x), BigRational::new((*w).into(), total.into()))),
        ).unwrap();
        let m = to_map(&m);
        let mapped = fmap(&f, &m, &e).unwrap();
        let TElem::Dist(entries) = &mapped else { panic!("not a distribution") };
        let mass: BigRational = entries.iter().map(|(_, w)| w.clone()).sum();
        prop_assert_eq!(mass, BigRational::from_integer(1.into()));
        let image = FinSet::new(base(&f, &e).unwrap().iter().map(|a| m[a].clone()));
        prop_assert_eq!(image, base(&f, &mapped).unwrap());
    }
}
