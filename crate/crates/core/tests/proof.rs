mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{carrier, functor};
use nabla_core::{
    check_derivation, check_step, enumerate, lifted_atoms, neg_dual, one_step_equiv, one_step_eval0, one_step_eval1,
    parse_elem, parse_formula, parse_inequality, parse_proof, slim_redistributions, Error, FinSet, Formula, Functor,
    OneStepContext, Reason, TElem,
};

fn formula(f: &Functor, text: &str) -> Formula {
    parse_formula(text, f).unwrap()
}

fn shown<T: std::fmt::Display>(v: &[T]) -> Vec<String> {
    v.iter().map(|e| e.to_string()).collect()
}

fn alpha_of(a: Formula) -> TElem<Formula> {
    match a {
        Formula::Nabla(alpha) => (*alpha).clone(),
        other => panic!("not a nabla formula: {other}"),
    }
}

fn subsets<T: Ord + Clone>(items: &[T]) -> Vec<FinSet<T>> {
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

/// Every assignment of subsets of an `n`-element carrier to the letters.
fn contexts(letters: &[&str], n: usize) -> Vec<OneStepContext> {
    let x = carrier("x", n);
    let parts = subsets(x.as_slice());
    let mut out = vec![BTreeMap::new()];
    for p in letters {
        out = out
            .into_iter()
            .flat_map(|m: BTreeMap<String, FinSet<String>>| {
                parts.iter().map(move |s| {
                    let mut m = m.clone();
                    m.insert(p.to_string(), s.clone());
                    m
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|vars| OneStepContext::new(x.clone(), vars).unwrap())
        .collect()
}

#[test]
fn srd_of_empty_set_is_t_of_empty() {
    for text in ["P", "Const(c,d) * Id * Id", "Id + P", "P^(d1,d2)"] {
        let f = functor(text);
        let got = slim_redistributions::<String>(&f, &[]).unwrap();
        let expected = enumerate(&f, &FinSet::new([FinSet::<String>::empty()])).unwrap();
        assert_eq!(got, expected, "{text}");
    }
    assert!(matches!(
        slim_redistributions::<String>(&functor("Dist"), &[]),
        Err(Error::NotEnumerable(_))
    ));
}

#[test]
fn srd_examples() {
    let p = functor("P");
    let a = [
        parse_elem(p.shape(), "{a}").unwrap(),
        parse_elem(p.shape(), "{b}").unwrap(),
    ];
    assert_eq!(shown(&slim_redistributions(&p, &a).unwrap()), ["{{a,b}}"]);

    let tree = functor("Const(c) * Id * Id");
    let a = [parse_elem(tree.shape(), "('c,y,z)").unwrap()];
    assert_eq!(
        shown(&slim_redistributions(&tree, &a).unwrap()),
        ["('c,{y},{z})", "('c,{y},{y,z})", "('c,{y,z},{z})", "('c,{y,z},{y,z})"]
    );

    let clash = functor("Const(c,d) * Id * Id");
    let a = [
        parse_elem(clash.shape(), "('c,y,y)").unwrap(),
        parse_elem(clash.shape(), "('d,y,y)").unwrap(),
    ];
    assert!(slim_redistributions(&clash, &a).unwrap().is_empty());
}

#[test]
fn srd_distributive_law() {
    let p = functor("P");
    let letters = ["p", "q", "r"];
    let vars: Vec<Formula> = letters.iter().map(|l| Formula::var(l)).collect();
    let alphas: Vec<TElem<Formula>> = subsets(&vars)
        .into_iter()
        .map(|s| TElem::set(s.into_vec().into_iter().map(TElem::Inner)))
        .collect();
    let mut families: Vec<Vec<TElem<Formula>>> = vec![vec![]];
    for (i, a) in alphas.iter().enumerate() {
        families.push(vec![a.clone()]);
        for b in &alphas[i + 1..] {
            families.push(vec![a.clone(), b.clone()]);
        }
    }
    let ctxs = contexts(&letters, 2);
    for family in &families {
        let lhs = Formula::conj(family.iter().map(|alpha| Formula::disj(alpha.base().into_vec())));
        let rhs = Formula::disj(
            slim_redistributions(&p, family)
                .unwrap()
                .iter()
                .flat_map(|phi| phi.base().into_vec().into_iter().map(|u| Formula::conj(u.into_vec()))),
        );
        for ctx in &ctxs {
            assert_eq!(
                one_step_eval0(ctx, &lhs).unwrap(),
                one_step_eval0(ctx, &rhs).unwrap(),
                "{lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn srd_order_generation_for_trees() {
    let f = functor("Const(c) * Id * Id");
    let elems = enumerate(&f, &FinSet::new(["w", "y", "z"].map(String::from))).unwrap();
    let parts = |e: &TElem<String>| -> (FinSet<String>, FinSet<String>) {
        let TElem::Pair(left, right) = e else { unreachable!() };
        let TElem::Pair(_, first) = left.as_ref() else {
            unreachable!()
        };
        (first.base(), right.base())
    };
    let set_parts = |e: &TElem<FinSet<String>>| -> (FinSet<String>, FinSet<String>) {
        let TElem::Pair(left, right) = e else { unreachable!() };
        let (TElem::Pair(_, first), TElem::Inner(second)) = (left.as_ref(), right.as_ref()) else {
            unreachable!()
        };
        let TElem::Inner(first) = first.as_ref() else {
            unreachable!()
        };
        (first.clone(), second.clone())
    };
    for (i, a) in elems.iter().enumerate() {
        for b in &elems[i..] {
            for c in &elems[i..] {
                let family = vec![a.clone(), b.clone(), c.clone()];
                let pi1 = FinSet::new(family.iter().flat_map(|e| parts(e).0.into_vec()));
                let pi2 = FinSet::new(family.iter().flat_map(|e| parts(e).1.into_vec()));
                let srd = slim_redistributions(&f, &family).unwrap();
                assert!(!srd.is_empty());
                let least = srd.iter().find(|phi| set_parts(phi) == (pi1.clone(), pi2.clone()));
                assert!(least.is_some(), "({pi1:?}, {pi2:?}) missing");
                for phi in &srd {
                    let (s1, s2) = set_parts(phi);
                    assert!(pi1.is_subset(&s1) && pi2.is_subset(&s2), "{phi}");
                }
            }
        }
    }
}

#[test]
fn negation_dual_examples() {
    let p = functor("P");
    let q = neg_dual(&p, &alpha_of(formula(&p, "nab {p}"))).unwrap();
    assert_eq!(shown(&q), ["{}", "{/\\{~p}}", "{T,/\\{~p}}"]);
    let not_nab = formula(&p, "~nab {p}");
    let expansion = Formula::disj(q.into_iter().map(Formula::nabla));
    for ctx in contexts(&["p"], 2) {
        assert!(one_step_equiv(&p, &ctx, &not_nab, &expansion).unwrap());
    }

    let f = functor("Const(c) * Id");
    assert_eq!(
        shown(&neg_dual(&f, &alpha_of(formula(&f, "nab ('c,p)"))).unwrap()),
        ["('c,/\\{~p})"]
    );

    let empty = alpha_of(formula(&p, "nab {}"));
    assert_eq!(shown(&neg_dual(&p, &empty).unwrap()), ["{T}"]);
    let c = functor("Const(c,d)");
    let tag = alpha_of(formula(&c, "nab 'c"));
    assert_eq!(shown(&neg_dual(&c, &tag).unwrap()), ["'d"]);
}

#[test]
fn negation_dual_complements() {
    for (text, lits) in [
        ("P", vec!["nab {p, ~q}", "nab {/\\{p, q}}", "nab {T, F}"]),
        ("Const(c,d) * Id * Id", vec!["nab ('c, p, q)", "nab ('d, ~p, T)"]),
        ("Id + P", vec!["nab inl(p)", "nab inr({p, q})"]),
    ] {
        let f = functor(text);
        for lit in lits {
            let a = formula(&f, lit);
            let dual = Formula::disj(
                neg_dual(&f, &alpha_of(a.clone()))
                    .unwrap()
                    .into_iter()
                    .map(Formula::nabla),
            );
            for ctx in contexts(&["p", "q"], 2) {
                let all = one_step_eval1(&f, &ctx, &Formula::top()).unwrap();
                let inside = one_step_eval1(&f, &ctx, &a).unwrap();
                let complement: Vec<TElem<String>> = all.into_iter().filter(|e| !inside.contains(e)).collect();
                assert_eq!(one_step_eval1(&f, &ctx, &dual).unwrap(), complement, "{text}: {lit}");
            }
        }
    }
}

#[test]
fn one_step_examples() {
    let vars: BTreeMap<String, FinSet<String>> = [("p".to_string(), FinSet::new(["x0".to_string()]))].into();
    let ctx = OneStepContext::new(carrier("x", 2), vars).unwrap();
    let p = functor("P");
    assert_eq!(one_step_eval0(&ctx, &Formula::var("p")).unwrap().into_vec(), ["x0"]);
    assert_eq!(one_step_eval0(&ctx, &Formula::top()).unwrap(), carrier("x", 2));
    assert_eq!(
        one_step_eval0(&ctx, &formula(&p, "\\/{p, ~p}")).unwrap(),
        carrier("x", 2)
    );
    assert!(matches!(
        one_step_eval0(&ctx, &Formula::var("r")),
        Err(Error::UnknownVariable(_))
    ));

    let single = OneStepContext::new(carrier("x", 1), BTreeMap::new()).unwrap();
    assert_eq!(
        shown(&one_step_eval1(&p, &single, &formula(&p, "nab {T}")).unwrap()),
        ["{x0}"]
    );
    for n in 0..=3 {
        let ctx = OneStepContext::new(carrier("x", n), BTreeMap::new()).unwrap();
        assert_eq!(
            shown(&one_step_eval1(&p, &ctx, &formula(&p, "nab {}")).unwrap()),
            ["{}"]
        );
        assert!(one_step_eval1(&p, &ctx, &Formula::bot()).unwrap().is_empty());
    }
}

#[test]
fn one_step_equivalences() {
    let p = functor("P");
    let meet = formula(&p, "/\\{nab {p}, nab {q}}");
    let a = [alpha_of(formula(&p, "nab {p}")), alpha_of(formula(&p, "nab {q}"))];
    let srd = slim_redistributions(&p, &a).unwrap();
    let joined = Formula::disj(
        srd.into_iter()
            .map(|phi| Formula::nabla(phi.map(&mut |u: &FinSet<Formula>| Formula::conj(u.iter().cloned())))),
    );
    for ctx in contexts(&["p", "q"], 2) {
        assert!(one_step_equiv(&p, &ctx, &meet, &joined).unwrap());
        assert!(one_step_equiv(&p, &ctx, &meet, &meet).unwrap());
    }
    let vars: BTreeMap<String, FinSet<String>> = [
        ("p".to_string(), FinSet::new(["x0".to_string()])),
        ("q".to_string(), FinSet::new(["x1".to_string()])),
    ]
    .into();
    let ctx = OneStepContext::new(carrier("x", 2), vars).unwrap();
    assert!(!one_step_equiv(&p, &ctx, &formula(&p, "nab {p}"), &formula(&p, "nab {q}")).unwrap());
}

#[test]
fn nabla_over_conflicting_formulas_is_disjoint() {
    let p = functor("P");
    let phi = vec![formula(&p, "/\\{p, q}"), formula(&p, "/\\{p, ~q}"), formula(&p, "~p")];
    for text in ["P", "Const(c,d) * Id", "Const(c) * Id * Id", "Id + Id"] {
        let f = functor(text);
        let alphas = enumerate(&f, &FinSet::new(phi.clone())).unwrap();
        for ctx in contexts(&["p", "q"], 2) {
            let cells: Vec<Vec<TElem<String>>> = alphas
                .iter()
                .map(|alpha| one_step_eval1(&f, &ctx, &Formula::nabla(alpha.clone())).unwrap())
                .collect();
            for (i, x) in cells.iter().enumerate() {
                for y in &cells[i + 1..] {
                    assert!(x.iter().all(|e| !y.contains(e)), "{text}");
                }
            }
        }
    }
}

#[test]
fn lifted_atom_examples() {
    let p = functor("P");
    let blocks = vec![FinSet::new(["x0".to_string()]), FinSet::new(["x1".to_string()])];
    let atoms = lifted_atoms(&p, &blocks).unwrap();
    assert_eq!(atoms.len(), 4);
    let mut covered: Vec<TElem<String>> = atoms.iter().flat_map(|a| a.cell.clone()).collect();
    covered.sort();
    assert_eq!(covered, enumerate(&p, &carrier("x", 2)).unwrap());
    assert!(atoms.iter().all(|a| a.cell.len() == 1));

    for text in ["P", "Const(c,d) * Id", "Id + P"] {
        let f = functor(text);
        let atoms = lifted_atoms(&f, &[carrier("x", 1)]).unwrap();
        let cells: Vec<TElem<String>> = atoms.iter().flat_map(|a| a.cell.clone()).collect();
        assert_eq!(atoms.len(), enumerate(&f, &carrier("x", 1)).unwrap().len(), "{text}");
        assert_eq!(cells, enumerate(&f, &carrier("x", 1)).unwrap(), "{text}");
    }

    let stream = functor("Const(c) * Id");
    let atoms = lifted_atoms(&stream, &[FinSet::new(["x".to_string()])]).unwrap();
    assert_eq!(atoms.len(), 1);
    assert_eq!(atoms[0].alpha.to_string(), "('c,{x})");
}

#[test]
fn derivation_examples() {
    let ok = |text: &str| {
        let file = parse_proof(text, None).unwrap();
        check_derivation(&file.functor, &file.derivation)
    };
    assert!(ok("functor: P\nnabla1 | nab {p} <= nab {q} | Z={(p, q)}\n  oracle | p <= q\n").is_err());
    assert!(ok("functor: P\nnabla1 | nab {p} <= nab {\\/{p, q}} | Z={(p, \\/{p, q})}\n  or-right | p <= \\/{p, q}\n    refl | p <= p\n").is_ok());
    assert!(ok("functor: P\nrefl | nab {nab {p}} <= nab {nab {p}}\n").is_ok());

    let p = functor("P");
    let premise = parse_inequality("p <= q", &p).unwrap();
    let conclusion = parse_inequality("nab {p} <= nab {q}", &p).unwrap();
    assert!(check_step(&p, "nabla1", &conclusion, "Z={(p, q)}", &[&premise]).is_ok());
    assert_eq!(
        check_step(&p, "nabla1", &conclusion, "Z={(p, q)}", &[]).unwrap_err().0,
        Reason::MissingPremise
    );

    let missing = ok("functor: P\nnabla2 | /\\{nab {p}, nab {q}} <= nab {/\\{p, q}} | A={{p}, {q}}\n").unwrap_err();
    assert_eq!(
        (missing.path.as_str(), missing.reason),
        ("root", Reason::MissingPremise)
    );
}

#[test]
fn bag_derivations_are_checked() {
    let text = include_str!("data/proofs/extra/bag_nabla1.txt");
    let file = parse_proof(text, None).unwrap();
    assert_eq!(file.functor.to_string(), "Bag");
    assert!(check_derivation(&file.functor, &file.derivation).is_ok());
}

#[test]
fn universal_context_covers_every_valuation() {
    let letters: Vec<Arc<str>> = ["p", "q"].iter().map(|s| Arc::from(*s)).collect();
    let ctx = OneStepContext::universal(&letters);
    assert_eq!(ctx.carrier().len(), 4);
    let p = functor("P");
    assert_eq!(one_step_eval0(&ctx, &formula(&p, "/\\{p, q}")).unwrap().len(), 1);
    assert_eq!(one_step_eval0(&ctx, &formula(&p, "\\/{p, q}")).unwrap().len(), 3);
}
