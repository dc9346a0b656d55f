mod common;

use std::collections::BTreeSet;

use common::{functor, random_formula};
use nabla_core::{boxed, diamond, parse_formula, parse_inequality, Error, Formula, TElem};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn nab(items: impl IntoIterator<Item = Formula>) -> Formula {
    Formula::nabla(TElem::set(items.into_iter().map(TElem::Inner)))
}

fn has_nabla(a: &Formula) -> bool {
    match a {
        Formula::Var(_) => false,
        Formula::Nabla(_) => true,
        Formula::Neg(b) => has_nabla(b),
        Formula::Conj(v) | Formula::Disj(v) => v.iter().any(has_nabla),
    }
}

fn children(a: &Formula) -> Vec<Formula> {
    match a {
        Formula::Var(_) => vec![],
        Formula::Neg(b) => vec![(**b).clone()],
        Formula::Conj(v) | Formula::Disj(v) => v.clone(),
        Formula::Nabla(alpha) => alpha.base().into_vec(),
    }
}

#[test]
fn parse_examples() {
    let p = functor("P");
    assert_eq!(parse_formula("nab {T}", &p).unwrap(), nab([Formula::top()]));
    assert_eq!(
        parse_formula("\\/{nab {}, nab {~p}}", &p).unwrap(),
        Formula::disj([nab([]), nab([Formula::neg(Formula::var("p"))])])
    );
    let tree = functor("Const(c) * Id * Id");
    let expected = Formula::nabla(TElem::pair(
        TElem::pair(TElem::Const(tree_tag(&tree)), TElem::Inner(Formula::top())),
        TElem::Inner(Formula::bot()),
    ));
    assert_eq!(parse_formula("nab ('c, T, F)", &tree).unwrap(), expected);
}

fn tree_tag(f: &nabla_core::Functor) -> nabla_core::ConstTag {
    let a = parse_formula("nab ('c, T, T)", f).unwrap();
    let Formula::Nabla(alpha) = a else { unreachable!() };
    let TElem::Pair(left, _) = alpha.as_ref() else {
        unreachable!()
    };
    let TElem::Pair(tag, _) = left.as_ref() else {
        unreachable!()
    };
    let TElem::Const(tag) = tag.as_ref() else {
        unreachable!()
    };
    tag.clone()
}

#[test]
fn parse_errors() {
    let p = functor("P");
    assert!(matches!(parse_formula("nab ('c,T)", &p), Err(Error::Type(_))));
    assert!(matches!(parse_formula("/\\{p,", &p), Err(Error::Syntax { .. })));
    assert!(parse_inequality("p q", &p).is_err());
}

#[test]
fn modal_sugar() {
    let p = functor("P");
    let q = Formula::var("q");
    assert_eq!(parse_formula("<>q", &p).unwrap(), diamond(q.clone()));
    assert_eq!(parse_formula("[]q", &p).unwrap(), boxed(q.clone()));
    assert_eq!(diamond(q.clone()), nab([q.clone(), Formula::top()]));
    assert_eq!(boxed(q.clone()), Formula::disj([nab([]), nab([q])]));
}

#[test]
fn depth_examples() {
    let p = functor("P");
    assert_eq!(Formula::top().depth(), 0);
    assert_eq!(parse_formula("nab {T}", &p).unwrap().depth(), 1);
    assert_eq!(parse_formula("nab {nab {T}}", &p).unwrap().depth(), 2);
    let ineq = parse_inequality("p <= nab {nab {}}", &p).unwrap();
    assert_eq!(ineq.depth(), 2);
}

#[test]
fn subformula_examples() {
    let p = functor("P");
    let not_top = Formula::neg(Formula::top());
    assert_eq!(not_top.subformulas(), BTreeSet::from([Formula::top(), not_top.clone()]));

    let (a, b) = (parse_formula("~p", &p).unwrap(), parse_formula("nab {q}", &p).unwrap());
    let both = nab([a.clone(), b.clone()]);
    let mut expected = a.subformulas();
    expected.extend(b.subformulas());
    expected.insert(both.clone());
    assert_eq!(both.subformulas(), expected);

    let tree = functor("Const(c) * Id * Id");
    let t = parse_formula("nab ('c,T,F)", &tree).unwrap();
    let subs = t.subformulas();
    assert_eq!(subs.len(), 3);
    assert!(subs.contains(&t) && subs.contains(&Formula::top()) && subs.contains(&Formula::bot()));
}

#[test]
fn printing() {
    let p = functor("P");
    assert_eq!(Formula::conj([]).to_string(), "T");
    assert_eq!(Formula::disj([]).to_string(), "F");
    assert_eq!(nab([]).to_string(), "nab {}");
    let a = parse_formula("  /\\{ q , p, q }", &p).unwrap();
    assert_eq!(a.to_string(), "/\\{p, q}");
}

#[test]
fn print_parse_round_trip() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let functors = [functor("P"), functor("Const(c,d) * Id * Id"), functor("Id + P")];
    for i in 0..1000 {
        let f = &functors[i % functors.len()];
        let depth = rng.gen_range(0..=3);
        let a = random_formula(&mut rng, f, depth, &["p", "q"], true);
        assert!(a.depth() <= depth);
        let text = a.to_string();
        assert_eq!(parse_formula(&text, f).unwrap(), a, "{text}");
    }
}

#[test]
fn structural_invariants() {
    let mut rng = StdRng::seed_from_u64(7);
    let f = functor("P");
    for _ in 0..300 {
        let depth = rng.gen_range(0..=3);
        let a = random_formula(&mut rng, &f, depth, &["p", "q"], true);
        assert_eq!(a.depth() == 0, !has_nabla(&a), "{a}");
        let subs = a.subformulas();
        assert!(subs.contains(&a));
        for b in &subs {
            for c in children(b) {
                assert!(subs.contains(&c), "{c} missing from Sfor({a})");
            }
        }
    }
}
