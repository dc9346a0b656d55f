//! Derivations in the system M and their checker.
//!
//! Proof files hold one node per line, children indented two spaces deeper
//! than their parent:
//!
//! ```text
//! functor: P
//! nabla1 | nab {p} <= nab {\/{p, q}} | Z={(p, \/{p, q})}
//!   or-right | p <= \/{p, q}
//!     refl | p <= p
//! ```
//!
//! Rules: `refl`, `cut`, `or-left`, `or-right`, `and-left`, `and-right`,
//! `distrib`, `shift-neg`, `shift-pos`, `nabla1` (`Z={(a,b),..}`), `nabla2`
//! (optional `A={α,..}`), `nabla3` (`Phi=<elem>`), the axioms `nabla2f` and
//! `nabla3f`, and `oracle`, a leaf accepting depth-1 inequalities that hold
//! in one-step semantics. Letters are schematic.

use std::collections::BTreeSet;
use std::fmt;

use crate::elem::{FinSet, TElem};
use crate::error::{Error, Result};
use crate::formula::{formula, formula_leaf, nabla_arg, Formula, Inequality};
use crate::functor::Functor;
use crate::lexer::{Cursor, Tok};
use crate::lifting::{lift, lifted_members};
use crate::literal::{comma_list, parse_lit, type_lit, Lit};
use crate::onestep::{one_step_eval0, OneStepContext, OneStepModel};
use crate::redistrib::slim_redistributions;

pub const RULES: [&str; 15] = [
    "refl",
    "cut",
    "or-left",
    "or-right",
    "and-left",
    "and-right",
    "distrib",
    "shift-neg",
    "shift-pos",
    "nabla1",
    "nabla2",
    "nabla3",
    "nabla2f",
    "nabla3f",
    "oracle",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Inequality,
    pub rule: String,
    /// Rule payload as written, e.g. `Z={(p,q)}`; empty when unused.
    pub side: String,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn new(rule: &str, conclusion: Inequality, side: &str, premises: Vec<Derivation>) -> Self {
        Derivation {
            conclusion,
            rule: rule.to_string(),
            side: side.to_string(),
            premises,
        }
    }

    /// Node at a path such as `root/0/1`.
    pub fn node(&self, path: &str) -> Option<&Derivation> {
        let mut parts = path.split('/');
        if parts.next() != Some("root") {
            return None;
        }
        let mut d = self;
        for p in parts {
            d = d.premises.get(p.parse::<usize>().ok()?)?;
        }
        Some(d)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        write!(f, "{:indent$}{} | {}", "", self.rule, self.conclusion, indent = indent)?;
        if !self.side.is_empty() {
            write!(f, " | {}", self.side)?;
        }
        writeln!(f)?;
        for p in &self.premises {
            p.write(f, indent + 2)?;
        }
        Ok(())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// A proof file: the functor it is written against and the tree.
#[derive(Debug, Clone)]
pub struct ProofFile {
    pub functor: Functor,
    pub derivation: Derivation,
}

/// Parses a proof file. A `functor:` header takes precedence over
/// `default_functor`.
pub fn parse_proof(text: &str, default_functor: Option<&Functor>) -> Result<ProofFile> {
    let mut functor = default_functor.cloned();
    let mut nodes: Vec<(usize, usize, Derivation)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start_matches(' ').len();
        let line = content.trim();
        if nodes.is_empty() {
            if let Some(rest) = line.strip_prefix("functor:") {
                let base = default_functor.map(|f| f.max_enum());
                let parsed = Functor::parse(rest.trim())?;
                functor = Some(match base {
                    Some(cap) => parsed.with_max_enum(cap),
                    None => parsed,
                });
                continue;
            }
        }
        let f = functor
            .as_ref()
            .ok_or_else(|| Error::syntax(0, "proof has no `functor:` header and no functor was given"))?;
        let fields: Vec<&str> = line.splitn(3, '|').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(line_err(lineno, "expected `rule | lhs <= rhs | side`"));
        }
        let conclusion =
            crate::formula::parse_inequality(fields[1], f).map_err(|e| line_err(lineno, &e.to_string()))?;
        let side = fields.get(2).copied().unwrap_or("");
        nodes.push((lineno, indent, Derivation::new(fields[0], conclusion, side, Vec::new())));
    }
    let functor = functor.ok_or_else(|| Error::syntax(0, "empty proof"))?;
    let mut it = nodes.into_iter().peekable();
    let (_, root_indent, root) = it.next().ok_or_else(|| Error::syntax(0, "proof has no nodes"))?;
    let derivation = build_tree(root, root_indent, &mut it)?;
    if let Some((lineno, _, _)) = it.next() {
        return Err(line_err(lineno, "a proof has exactly one root"));
    }
    Ok(ProofFile { functor, derivation })
}

fn build_tree(
    mut node: Derivation,
    indent: usize,
    rest: &mut std::iter::Peekable<std::vec::IntoIter<(usize, usize, Derivation)>>,
) -> Result<Derivation> {
    while let Some(&(lineno, child_indent, _)) = rest.peek() {
        if child_indent <= indent {
            break;
        }
        if child_indent != indent + 2 {
            return Err(line_err(lineno, "children must be indented exactly two spaces deeper"));
        }
        let (_, _, child) = rest.next().expect("peeked");
        node.premises.push(build_tree(child, child_indent, rest)?);
    }
    Ok(node)
}

fn line_err(lineno: usize, msg: &str) -> Error {
    Error::Syntax {
        pos: 0,
        msg: format!("line {lineno}: {msg}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    UnknownRule,
    ConclusionShape,
    MissingPremise,
    UnexpectedPremise,
    SideConditionFalse,
    MalformedPayload,
    Unsupported,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::UnknownRule => "unknown-rule",
            Reason::ConclusionShape => "conclusion-shape",
            Reason::MissingPremise => "missing-premise",
            Reason::UnexpectedPremise => "unexpected-premise",
            Reason::SideConditionFalse => "side-condition-false",
            Reason::MalformedPayload => "malformed-payload",
            Reason::Unsupported => "unsupported",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The first failing node in pre-order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckError {
    pub path: String,
    pub reason: Reason,
    pub detail: String,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.path, self.reason, self.detail)
    }
}

impl std::error::Error for CheckError {}

type Step = std::result::Result<(), (Reason, String)>;

fn fail<T>(reason: Reason, detail: impl Into<String>) -> std::result::Result<T, (Reason, String)> {
    Err((reason, detail.into()))
}

/// Checks every node of a derivation, parents before children.
pub fn check_derivation(functor: &Functor, d: &Derivation) -> std::result::Result<(), CheckError> {
    check_at(functor, d, "root".to_string())
}

fn check_at(functor: &Functor, d: &Derivation, path: String) -> std::result::Result<(), CheckError> {
    let premises: Vec<&Inequality> = d.premises.iter().map(|p| &p.conclusion).collect();
    if let Err((reason, detail)) = check_step(functor, &d.rule, &d.conclusion, &d.side, &premises) {
        return Err(CheckError { path, reason, detail });
    }
    for (i, p) in d.premises.iter().enumerate() {
        check_at(functor, p, format!("{path}/{i}"))?;
    }
    Ok(())
}

/// Checks a single rule instance given the conclusions of its premises.
pub fn check_step(
    functor: &Functor,
    rule: &str,
    conclusion: &Inequality,
    side: &str,
    premises: &[&Inequality],
) -> std::result::Result<(), (Reason, String)> {
    if let Err(e) = conclusion.lhs.typecheck(functor).and(conclusion.rhs.typecheck(functor)) {
        return fail(Reason::ConclusionShape, e.to_string());
    }
    let (lhs, rhs) = (&conclusion.lhs, &conclusion.rhs);
    match rule {
        "refl" => {
            no_side(side)?;
            expect_exactly(premises, &[])?;
            if lhs != rhs {
                return fail(Reason::ConclusionShape, "refl needs identical sides");
            }
            Ok(())
        }
        "cut" => {
            no_side(side)?;
            if premises.len() != 2 {
                return fail(
                    Reason::MissingPremise,
                    "cut takes premises a <= b and b <= c, in that order",
                );
            }
            let (p, q) = (premises[0], premises[1]);
            if p.lhs != *lhs || q.rhs != *rhs {
                return fail(Reason::UnexpectedPremise, "premises do not start at lhs and end at rhs");
            }
            if p.rhs != q.lhs {
                return fail(
                    Reason::UnexpectedPremise,
                    format!("`{}` and `{}` do not chain", p.rhs, q.lhs),
                );
            }
            Ok(())
        }
        "or-left" => {
            no_side(side)?;
            let phi = disjuncts(lhs)?;
            expect_set(
                premises,
                phi.iter().map(|a| Inequality::new(a.clone(), rhs.clone())).collect(),
            )
        }
        "or-right" => {
            no_side(side)?;
            let psi = disjuncts(rhs)?;
            one_premise(
                premises,
                |p| p.lhs == *lhs && psi.contains(&p.rhs),
                "a <= b with b a disjunct of rhs",
            )
        }
        "and-right" => {
            no_side(side)?;
            let psi = conjuncts(rhs)?;
            expect_set(
                premises,
                psi.iter().map(|b| Inequality::new(lhs.clone(), b.clone())).collect(),
            )
        }
        "and-left" => {
            no_side(side)?;
            let phi = conjuncts(lhs)?;
            one_premise(
                premises,
                |p| p.rhs == *rhs && phi.contains(&p.lhs),
                "a <= b with a a conjunct of lhs",
            )
        }
        "distrib" => {
            no_side(side)?;
            expect_exactly(premises, &[])?;
            check_distrib(functor, lhs, rhs)
        }
        "shift-neg" | "shift-pos" => {
            no_side(side)?;
            check_shift(rule == "shift-neg", lhs, rhs, premises)
        }
        "nabla1" => check_nabla1(functor, lhs, rhs, side, premises),
        "nabla2" | "nabla2f" => check_nabla2(functor, rule == "nabla2f", lhs, rhs, side, premises),
        "nabla3" | "nabla3f" => check_nabla3(functor, rule == "nabla3f", lhs, rhs, side, premises),
        "oracle" => {
            no_side(side)?;
            expect_exactly(premises, &[])?;
            check_oracle(functor, lhs, rhs)
        }
        other => fail(Reason::UnknownRule, format!("`{other}` is not a rule of M")),
    }
}

fn no_side(side: &str) -> Step {
    if side.trim().is_empty() {
        Ok(())
    } else {
        fail(Reason::MalformedPayload, "this rule takes no side data")
    }
}

fn disjuncts(a: &Formula) -> std::result::Result<&[Formula], (Reason, String)> {
    match a {
        Formula::Disj(v) => Ok(v),
        _ => fail(Reason::ConclusionShape, format!("`{a}` is not a disjunction")),
    }
}

fn conjuncts(a: &Formula) -> std::result::Result<&[Formula], (Reason, String)> {
    match a {
        Formula::Conj(v) => Ok(v),
        _ => fail(Reason::ConclusionShape, format!("`{a}` is not a conjunction")),
    }
}

fn expect_exactly(premises: &[&Inequality], required: &[Inequality]) -> Step {
    expect_set(premises, required.iter().cloned().collect())
}

/// The premises must be exactly the required set: none missing, none extra,
/// none repeated.
fn expect_set(premises: &[&Inequality], required: BTreeSet<Inequality>) -> Step {
    let given: BTreeSet<&Inequality> = premises.iter().copied().collect();
    if let Some(m) = required.iter().find(|r| !given.contains(r)) {
        return fail(Reason::MissingPremise, format!("`{m}`"));
    }
    let mut seen = BTreeSet::new();
    for p in premises {
        if !required.contains(*p) || !seen.insert(*p) {
            return fail(Reason::UnexpectedPremise, format!("`{p}`"));
        }
    }
    Ok(())
}

fn one_premise(premises: &[&Inequality], ok: impl Fn(&Inequality) -> bool, wanted: &str) -> Step {
    match premises {
        [] => fail(Reason::MissingPremise, format!("expected one premise {wanted}")),
        [p] if ok(p) => Ok(()),
        [p] => fail(Reason::UnexpectedPremise, format!("`{p}` is not {wanted}")),
        _ => fail(Reason::UnexpectedPremise, "expected exactly one premise"),
    }
}

// ⋀{⋁φ | φ ∈ X} ≼ ⋁{⋀γ[X] | γ ∈ Choice(X)}
fn check_distrib(functor: &Functor, lhs: &Formula, rhs: &Formula) -> Step {
    let x: Vec<&[Formula]> = conjuncts(lhs)?
        .iter()
        .map(disjuncts)
        .collect::<std::result::Result<_, _>>()?;
    let mut count: usize = 1;
    for phi in &x {
        count = count.saturating_mul(phi.len());
    }
    if count > functor.max_enum() {
        return fail(
            Reason::Unsupported,
            format!("{count} choice functions exceed the enumeration limit"),
        );
    }
    let mut choices: Vec<Vec<Formula>> = vec![Vec::new()];
    for phi in &x {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                phi.iter().map(move |a| {
                    let mut c = c.clone();
                    c.push(a.clone());
                    c
                })
            })
            .collect();
    }
    let expected = Formula::disj(choices.into_iter().map(Formula::conj));
    if *rhs != expected {
        return fail(Reason::ConclusionShape, format!("rhs should be `{expected}`"));
    }
    Ok(())
}

// neg:  ⋀(X ∪ {¬a}) ≼ ⋁Y  /  ⋀X ≼ ⋁(Y ∪ {a})
// pos:  ⋀(X ∪ {a}) ≼ ⋁Y   /  ⋀X ≼ ⋁(Y ∪ {¬a})
fn check_shift(neg: bool, lhs: &Formula, rhs: &Formula, premises: &[&Inequality]) -> Step {
    let x = conjuncts(lhs)?;
    let y_plus = disjuncts(rhs)?;
    let [p] = premises else {
        return match premises {
            [] => fail(Reason::MissingPremise, "expected one premise"),
            _ => fail(Reason::UnexpectedPremise, "expected exactly one premise"),
        };
    };
    for moved in y_plus {
        let added = if neg {
            Formula::neg(moved.clone())
        } else {
            match moved {
                Formula::Neg(a) => (**a).clone(),
                _ => continue,
            }
        };
        let want_lhs = Formula::conj(x.iter().cloned().chain([added]));
        if p.lhs != want_lhs {
            continue;
        }
        let without = Formula::disj(y_plus.iter().filter(|b| *b != moved).cloned());
        if p.rhs == without || p.rhs == *rhs {
            return Ok(());
        }
    }
    fail(
        Reason::UnexpectedPremise,
        format!("`{p}` does not shift to the conclusion"),
    )
}

fn nabla_of(a: &Formula) -> std::result::Result<&TElem<Formula>, (Reason, String)> {
    match a {
        Formula::Nabla(alpha) => Ok(alpha),
        _ => fail(Reason::ConclusionShape, format!("`{a}` is not a nabla formula")),
    }
}

fn side_cursor(side: &str, key: &str) -> std::result::Result<Cursor, (Reason, String)> {
    let side = side.trim();
    let body = side
        .strip_prefix(key)
        .and_then(|r| r.trim_start().strip_prefix('='))
        .ok_or_else(|| (Reason::MalformedPayload, format!("expected `{key}=...`")))?;
    Cursor::new(body).map_err(|e| (Reason::MalformedPayload, e.to_string()))
}

fn malformed(e: Error) -> (Reason, String) {
    (Reason::MalformedPayload, e.to_string())
}

fn unsupported(e: Error) -> (Reason, String) {
    (Reason::Unsupported, e.to_string())
}

fn check_nabla1(functor: &Functor, lhs: &Formula, rhs: &Formula, side: &str, premises: &[&Inequality]) -> Step {
    let alpha = nabla_of(lhs)?;
    let beta = nabla_of(rhs)?;
    let mut cur = side_cursor(side, "Z")?;
    let z = (|| -> Result<BTreeSet<(Formula, Formula)>> {
        cur.expect(&Tok::LBrace)?;
        let pairs = comma_list(&mut cur, &Tok::RBrace, &mut |c| {
            c.expect(&Tok::LParen)?;
            let a = formula(c, functor)?;
            c.expect(&Tok::Comma)?;
            let b = formula(c, functor)?;
            c.expect(&Tok::RParen)?;
            Ok((a, b))
        })?;
        cur.finish()?;
        Ok(pairs.into_iter().collect())
    })()
    .map_err(malformed)?;
    let (base_a, base_b) = (alpha.base(), beta.base());
    if let Some((a, b)) = z.iter().find(|(a, b)| !base_a.contains(a) || !base_b.contains(b)) {
        return fail(
            Reason::SideConditionFalse,
            format!("({a}, {b}) is not in Base(alpha) x Base(beta)"),
        );
    }
    if !lift(
        &|a: &Formula, b: &Formula| z.contains(&(a.clone(), b.clone())),
        alpha,
        beta,
    ) {
        return fail(Reason::SideConditionFalse, "(alpha, beta) is not in the lifting of Z");
    }
    expect_set(premises, z.into_iter().map(|(a, b)| Inequality::new(a, b)).collect())
}

fn check_nabla2(
    functor: &Functor,
    axiom: bool,
    lhs: &Formula,
    rhs: &Formula,
    side: &str,
    premises: &[&Inequality],
) -> Step {
    let a: Vec<TElem<Formula>> = conjuncts(lhs)?
        .iter()
        .map(|c| nabla_of(c).cloned())
        .collect::<std::result::Result<_, _>>()?;
    if !side.trim().is_empty() {
        let mut cur = side_cursor(side, "A")?;
        let given = (|| -> Result<BTreeSet<TElem<Formula>>> {
            cur.expect(&Tok::LBrace)?;
            let items = comma_list(&mut cur, &Tok::RBrace, &mut |c| nabla_arg(c, functor))?;
            cur.finish()?;
            Ok(items.into_iter().collect())
        })()
        .map_err(malformed)?;
        if given != a.iter().cloned().collect() {
            return fail(
                Reason::SideConditionFalse,
                "A does not match the conjuncts of the conclusion",
            );
        }
    }
    if axiom && !functor.preserves_finite() {
        return fail(
            Reason::Unsupported,
            format!("nabla2f needs a finite-preserving functor, not {functor}"),
        );
    }
    let srd = slim_redistributions(functor, &a).map_err(unsupported)?;
    let targets: Vec<Formula> = srd
        .iter()
        .map(|phi| Formula::nabla(phi.map(&mut |u| Formula::conj(u.iter().cloned()))))
        .collect();
    finish_distributive(axiom, rhs, targets, premises)
}

fn check_nabla3(
    functor: &Functor,
    axiom: bool,
    lhs: &Formula,
    rhs: &Formula,
    side: &str,
    premises: &[&Inequality],
) -> Step {
    let alpha = nabla_of(lhs)?;
    let mut cur = side_cursor(side, "Phi")?;
    let phi = (|| -> Result<TElem<FinSet<Formula>>> {
        let lit = parse_lit(&mut cur, &mut |c| formula(c, functor))?;
        cur.finish()?;
        type_lit(functor.shape(), lit, &mut |l| match l {
            Lit::Set(items, _) => items.into_iter().map(formula_leaf).collect(),
            other => Err(Error::ty(format!(
                "at offset {}: Phi needs a set of formulas at each identity position",
                other.pos()
            ))),
        })
    })()
    .map_err(malformed)?;
    let joined = phi.map(&mut |u| Formula::disj(u.iter().cloned()));
    if joined != *alpha {
        return fail(
            Reason::ConclusionShape,
            format!("lhs should be `{}`", Formula::nabla(joined)),
        );
    }
    if axiom && !functor.preserves_finite() {
        return fail(
            Reason::Unsupported,
            format!("nabla3f needs a finite-preserving functor, not {functor}"),
        );
    }
    let members = lifted_members(functor, &phi).map_err(unsupported)?;
    finish_distributive(axiom, rhs, members.into_iter().map(Formula::nabla).collect(), premises)
}

// Rule form: premises {t <= rhs | t ∈ targets}; axiom form: rhs = ⋁targets.
fn finish_distributive(axiom: bool, rhs: &Formula, targets: Vec<Formula>, premises: &[&Inequality]) -> Step {
    if axiom {
        expect_exactly(premises, &[])?;
        let expected = Formula::disj(targets);
        if *rhs != expected {
            return fail(Reason::ConclusionShape, format!("rhs should be `{expected}`"));
        }
        Ok(())
    } else {
        expect_set(
            premises,
            targets.into_iter().map(|t| Inequality::new(t, rhs.clone())).collect(),
        )
    }
}

fn check_oracle(functor: &Functor, lhs: &Formula, rhs: &Formula) -> Step {
    if lhs.depth().max(rhs.depth()) > 1 {
        return fail(
            Reason::Unsupported,
            "the oracle only decides inequalities of depth at most 1",
        );
    }
    let mut letters: Vec<_> = lhs.letters().into_iter().chain(rhs.letters()).collect();
    letters.sort();
    letters.dedup();
    if letters.len() > 8 {
        return fail(Reason::Unsupported, "too many letters for the one-step oracle");
    }
    let ctx = OneStepContext::universal(&letters);
    let holds = if lhs.depth() == 0 && rhs.depth() == 0 {
        let a = one_step_eval0(&ctx, lhs).map_err(unsupported)?;
        let b = one_step_eval0(&ctx, rhs).map_err(unsupported)?;
        a.is_subset(&b)
    } else {
        let model = OneStepModel::new(functor, &ctx).map_err(unsupported)?;
        let a = model.eval(lhs).map_err(unsupported)?;
        let b = model.eval(rhs).map_err(unsupported)?;
        a.iter().zip(&b).all(|(x, y)| !x || *y)
    };
    if holds {
        Ok(())
    } else {
        fail(Reason::SideConditionFalse, "the inequality fails in one-step semantics")
    }
}
