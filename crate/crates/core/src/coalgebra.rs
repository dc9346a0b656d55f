//! Finite coalgebras, their file format, and model checking.
//!
//! ```text
//! functor: P
//! states: s1 s2
//! map:
//!   s1 -> {s1,s2}
//!   s2 -> {}
//! ```
//!
//! An optional `props: p,q` line makes `functor:` the base functor and types
//! transitions against the letter-wrapped functor. Countermodels carry a
//! `witness:` line. `#` starts a comment.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::elem::{check_over, FinSet, TElem};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::functor::Functor;
use crate::lifting::lift;
use crate::literal::parse_elem;
use crate::props::PropFrame;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalgebra {
    functor: Functor,
    states: Vec<String>,
    transitions: Vec<TElem<usize>>,
}

impl Coalgebra {
    /// Builds a coalgebra from named transitions. Every state must have
    /// exactly one transition, typed over the state set.
    pub fn new(functor: Functor, states: Vec<String>, transitions: &BTreeMap<String, TElem<String>>) -> Result<Self> {
        let carrier = FinSet::new(states.iter().cloned());
        if carrier.len() != states.len() {
            return Err(Error::Coalgebra("duplicate state name".into()));
        }
        let index: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        for name in transitions.keys() {
            if !index.contains_key(name.as_str()) {
                return Err(Error::UnknownState(name.clone()));
            }
        }
        let mut out = Vec::with_capacity(states.len());
        for s in &states {
            let e = transitions
                .get(s)
                .ok_or_else(|| Error::Coalgebra(format!("state `{s}` has no transition")))?;
            check_over(&functor, &carrier, e).map_err(|err| match err {
                Error::CarrierMismatch(_) => {
                    let mut unknown = String::new();
                    e.for_each_inner(&mut |x| {
                        if unknown.is_empty() && !index.contains_key(x.as_str()) {
                            unknown = x.clone();
                        }
                    });
                    Error::UnknownState(unknown)
                }
                other => other,
            })?;
            out.push(e.map(&mut |x| index[x.as_str()]));
        }
        Ok(Coalgebra {
            functor,
            states,
            transitions: out,
        })
    }

    /// Builds a coalgebra directly from index-valued transitions.
    pub fn from_indices(functor: Functor, states: Vec<String>, transitions: Vec<TElem<usize>>) -> Result<Self> {
        if states.len() != transitions.len() {
            return Err(Error::Coalgebra("one transition per state is required".into()));
        }
        let carrier: FinSet<usize> = (0..states.len()).collect();
        for t in &transitions {
            check_over(&functor, &carrier, t)?;
        }
        if FinSet::new(states.iter().cloned()).len() != states.len() {
            return Err(Error::Coalgebra("duplicate state name".into()));
        }
        Ok(Coalgebra {
            functor,
            states,
            transitions,
        })
    }

    pub fn functor(&self) -> &Functor {
        &self.functor
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    /// `ξ(x)` over state indices.
    pub fn transition(&self, x: usize) -> &TElem<usize> {
        &self.transitions[x]
    }

    pub fn transitions(&self) -> &[TElem<usize>] {
        &self.transitions
    }

    /// `ξ(x)` with state names.
    pub fn transition_named(&self, x: usize) -> TElem<String> {
        self.transitions[x].map(&mut |i| self.states[*i].clone())
    }

    /// States reachable from `x` through bases of transitions, `x` first.
    pub fn reachable(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut order = vec![x];
        seen[x] = true;
        let mut k = 0;
        while k < order.len() {
            let y = order[k];
            k += 1;
            self.transitions[y].for_each_inner(&mut |&z| {
                if !seen[z] {
                    seen[z] = true;
                    order.push(z);
                }
            });
        }
        order
    }

    /// The subcoalgebra on the given states, which must be closed under
    /// transitions. State order follows `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Result<Coalgebra> {
        let new_index: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut transitions = Vec::with_capacity(keep.len());
        for &x in keep {
            let t = self.transitions[x].try_map(&mut |y| {
                new_index
                    .get(y)
                    .copied()
                    .ok_or_else(|| Error::Coalgebra(format!("`{}` leaves the kept states", self.states[*y])))
            })?;
            transitions.push(t);
        }
        Ok(Coalgebra {
            functor: self.functor.clone(),
            states: keep.iter().map(|&x| self.states[x].clone()).collect(),
            transitions,
        })
    }

    /// Checks that `f` (a map from this coalgebra's states to `other`'s) is a
    /// coalgebra morphism: `Tf ∘ ξ = ξ' ∘ f`.
    pub fn is_morphism(&self, other: &Coalgebra, f: &[usize]) -> bool {
        f.len() == self.len()
            && (0..self.len()).all(|x| self.transitions[x].map(&mut |y| f[*y]) == other.transitions[f[x]])
    }
}

impl fmt::Display for Coalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_coalgebra(f, self, None, None)
    }
}

/// A parsed coalgebra file.
#[derive(Debug, Clone)]
pub struct CoalgebraFile {
    pub coalgebra: Coalgebra,
    pub props: Option<PropFrame>,
    pub witness: Option<String>,
}

impl CoalgebraFile {
    /// Prepares a formula over the file's base functor for model checking.
    pub fn prepare(&self, a: &Formula) -> Result<Formula> {
        match &self.props {
            Some(frame) => frame.embed(a),
            None => Ok(a.clone()),
        }
    }

    /// The functor formulas are written against.
    pub fn formula_functor(&self) -> &Functor {
        match &self.props {
            Some(frame) => frame.base(),
            None => self.coalgebra.functor(),
        }
    }
}

impl fmt::Display for CoalgebraFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_coalgebra(f, &self.coalgebra, self.props.as_ref(), self.witness.as_deref())
    }
}

fn write_coalgebra(
    f: &mut fmt::Formatter<'_>,
    c: &Coalgebra,
    props: Option<&PropFrame>,
    witness: Option<&str>,
) -> fmt::Result {
    match props {
        Some(frame) => {
            writeln!(f, "functor: {}", frame.base())?;
            let letters: Vec<&str> = frame.letters().iter().map(|p| p.as_ref()).collect();
            writeln!(f, "props: {}", letters.join(","))?;
        }
        None => writeln!(f, "functor: {}", c.functor)?,
    }
    writeln!(f, "states: {}", c.states.join(" "))?;
    if let Some(w) = witness {
        writeln!(f, "witness: {w}")?;
    }
    writeln!(f, "map:")?;
    for x in 0..c.len() {
        writeln!(f, "  {} -> {}", c.states[x], c.transition_named(x))?;
    }
    Ok(())
}

/// Parses a coalgebra file with the default enumeration cap.
pub fn load_coalgebra(text: &str) -> Result<Coalgebra> {
    parse_coalgebra_file(text, None).map(|file| file.coalgebra)
}

/// Parses a coalgebra file. `props` supplies letters when the file has no
/// `props:` line; if both are present they must agree.
pub fn parse_coalgebra_file(text: &str, props: Option<&[String]>) -> Result<CoalgebraFile> {
    let mut functor: Option<Functor> = None;
    let mut states: Option<Vec<String>> = None;
    let mut file_props: Option<Vec<String>> = None;
    let mut witness: Option<String> = None;
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    let mut in_map = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let err = |msg: String| Error::Coalgebra(format!("line {lineno}: {msg}"));
        if in_map {
            if let Some((lhs, rhs)) = line.split_once("->") {
                entries.push((lineno, lhs.trim().to_string(), rhs.trim().to_string()));
                continue;
            }
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err(format!("expected `key: value` or `state -> element`, found `{line}`")))?;
        let value = value.trim();
        match key.trim() {
            "functor" => functor = Some(Functor::parse(value)?),
            "states" => states = Some(value.split_whitespace().map(str::to_string).collect()),
            "props" => {
                file_props = Some(
                    value
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect(),
                )
            }
            "witness" => witness = Some(value.to_string()),
            "map" if value.is_empty() => in_map = true,
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    let base = functor.ok_or_else(|| Error::Coalgebra("missing `functor:` line".into()))?;
    let states = states.ok_or_else(|| Error::Coalgebra("missing `states:` line".into()))?;
    if !in_map {
        return Err(Error::Coalgebra("missing `map:` block".into()));
    }
    let letters = match (file_props, props) {
        (Some(a), Some(b)) => {
            let (mut x, mut y) = (a.clone(), b.to_vec());
            x.sort();
            y.sort();
            if x != y {
                return Err(Error::Coalgebra(format!(
                    "file declares props {} but {} were requested",
                    a.join(","),
                    b.join(",")
                )));
            }
            Some(a)
        }
        (a, b) => a.or_else(|| b.map(|b| b.to_vec())),
    };
    let frame = match letters {
        Some(l) => Some(PropFrame::new(&l, base.clone())?),
        None => None,
    };
    let functor = frame.as_ref().map(|fr| fr.wrapped().clone()).unwrap_or(base);
    let mut transitions = BTreeMap::new();
    for (lineno, lhs, rhs) in entries {
        let e = parse_elem(functor.shape(), &rhs).map_err(|e| Error::Coalgebra(format!("line {lineno}: {e}")))?;
        if transitions.insert(lhs.clone(), e).is_some() {
            return Err(Error::Coalgebra(format!(
                "line {lineno}: second transition for `{lhs}`"
            )));
        }
    }
    let coalgebra = Coalgebra::new(functor, states, &transitions)?;
    if let Some(w) = &witness {
        coalgebra.state_index(w)?;
    }
    Ok(CoalgebraFile {
        coalgebra,
        props: frame,
        witness,
    })
}

/// Memoized truth sets of formulas on one coalgebra.
pub struct ModelChecker<'a> {
    coalgebra: &'a Coalgebra,
    memo: HashMap<Formula, Rc<Vec<bool>>>,
}

impl<'a> ModelChecker<'a> {
    pub fn new(coalgebra: &'a Coalgebra) -> Self {
        ModelChecker {
            coalgebra,
            memo: HashMap::new(),
        }
    }

    /// Truth value of `a` at every state, indexed like the states.
    pub fn truth(&mut self, a: &Formula) -> Result<Rc<Vec<bool>>> {
        if let Some(v) = self.memo.get(a) {
            return Ok(v.clone());
        }
        let n = self.coalgebra.len();
        let out: Vec<bool> = match a {
            Formula::Var(p) => return Err(Error::UnknownVariable(p.to_string())),
            Formula::Neg(b) => self.truth(b)?.iter().map(|t| !t).collect(),
            Formula::Conj(v) => {
                let mut acc = vec![true; n];
                for b in v {
                    let t = self.truth(b)?;
                    acc.iter_mut().zip(t.iter()).for_each(|(x, y)| *x &= *y);
                }
                acc
            }
            Formula::Disj(v) => {
                let mut acc = vec![false; n];
                for b in v {
                    let t = self.truth(b)?;
                    acc.iter_mut().zip(t.iter()).for_each(|(x, y)| *x |= *y);
                }
                acc
            }
            Formula::Nabla(alpha) => {
                let mut sub: HashMap<&Formula, Rc<Vec<bool>>> = HashMap::new();
                let mut base = Vec::new();
                alpha.for_each_inner(&mut |b| base.push(b));
                for b in base {
                    if !sub.contains_key(b) {
                        let t = self.truth(b)?;
                        sub.insert(b, t);
                    }
                }
                // ⊩ restricted to states × Base(α)
                let sat = |x: &usize, b: &Formula| sub[b][*x];
                (0..n)
                    .map(|x| lift(&sat, self.coalgebra.transition(x), alpha))
                    .collect()
            }
        };
        let out = Rc::new(out);
        self.memo.insert(a.clone(), out.clone());
        Ok(out)
    }
}

/// `x ⊩ a`.
pub fn model_check(m: &Coalgebra, state: &str, a: &Formula) -> Result<bool> {
    let x = m.state_index(state)?;
    a.typecheck(m.functor())?;
    Ok(ModelChecker::new(m).truth(a)?[x])
}

/// `{x | x ⊩ a}`.
pub fn meaning_set(m: &Coalgebra, a: &Formula) -> Result<FinSet<String>> {
    a.typecheck(m.functor())?;
    let t = ModelChecker::new(m).truth(a)?;
    Ok(m.states
        .iter()
        .zip(t.iter())
        .filter(|(_, &b)| b)
        .map(|(s, _)| s.clone())
        .collect())
}
