//! The final sequence `1 ← T1 ← T²1 ← …`, stratified meanings `mng_n`, the
//! `n`-final coalgebras `Z_n`, and the validity decision with countermodels.
//!
//! Level `k` is stored as the canonically ordered list of elements of `T^k 1`,
//! each a `TElem` over indices into level `k-1`. Level 0 is the single
//! point `*`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::coalgebra::Coalgebra;
use crate::elem::{FinSet, TElem};
use crate::enumerate::enumerate_shape;
use crate::error::{Error, Result};
use crate::formula::{Formula, Inequality};
use crate::functor::Functor;
use crate::lifting::lifted_members;

#[derive(Debug, Clone)]
pub struct FinalSequence {
    functor: Functor,
    levels: Vec<Vec<TElem<usize>>>,
    /// `projections[k]` is `h_k : T^{k+1}1 → T^k 1`.
    projections: Vec<Vec<usize>>,
}

/// One level of the final sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalLevel {
    pub level: usize,
    pub carrier: Vec<TElem<usize>>,
    /// `h_{n-1}`, absent at level 0.
    pub projection: Option<Vec<usize>>,
}

impl FinalSequence {
    /// Builds levels `0..=n`.
    pub fn build(functor: &Functor, n: usize) -> Result<Self> {
        functor.require_finite()?;
        let mut seq = FinalSequence {
            functor: functor.clone(),
            levels: vec![vec![TElem::Inner(0)]],
            projections: Vec::new(),
        };
        while seq.depth() < n {
            seq.extend()?;
        }
        Ok(seq)
    }

    /// Highest level built.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn functor(&self) -> &Functor {
        &self.functor
    }

    fn extend(&mut self) -> Result<()> {
        let k = self.levels.len();
        let prev: Vec<usize> = (0..self.levels[k - 1].len()).collect();
        let next = enumerate_shape(self.functor.shape(), &prev, self.functor.max_enum()).map_err(|e| match e {
            Error::EnumerationLimit { limit, .. } => Error::EnumerationLimit { limit, level: Some(k) },
            other => other,
        })?;
        // h_0 is the unique map to 1; h_k = T h_{k-1}
        let proj = if k == 1 {
            vec![0; next.len()]
        } else {
            let below = &self.projections[k - 2];
            next.iter()
                .map(|e| self.index_of(k - 1, &e.map(&mut |i| below[*i])))
                .collect()
        };
        self.levels.push(next);
        self.projections.push(proj);
        Ok(())
    }

    pub fn level(&self, k: usize) -> &[TElem<usize>] {
        &self.levels[k]
    }

    pub fn size(&self, k: usize) -> usize {
        self.levels[k].len()
    }

    pub fn final_level(&self, k: usize) -> FinalLevel {
        FinalLevel {
            level: k,
            carrier: self.levels[k].clone(),
            projection: if k == 0 {
                None
            } else {
                Some(self.projections[k - 1].clone())
            },
        }
    }

    /// Position of an element of `T^k 1` in level `k`.
    pub fn index_of(&self, k: usize, e: &TElem<usize>) -> usize {
        self.levels[k]
            .binary_search(e)
            .expect("every canonical element of T^k 1 is enumerated")
    }

    /// Fully expanded rendering of element `i` of level `k`.
    pub fn render(&self, k: usize, i: usize) -> String {
        Rendered {
            seq: self,
            level: k,
            index: i,
        }
        .to_string()
    }
}

#[derive(Clone, Copy)]
struct Rendered<'a> {
    seq: &'a FinalSequence,
    level: usize,
    index: usize,
}

impl PartialEq for Rendered<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}

impl Eq for Rendered<'_> {}

impl PartialOrd for Rendered<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Index order is canonical order, so mapping through `Rendered` keeps the
// canonical arrangement.
impl Ord for Rendered<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index.cmp(&other.index)
    }
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            return write!(f, "*");
        }
        let e = self.seq.levels[self.level][self.index].map(&mut |&i| Rendered {
            seq: self.seq,
            level: self.level - 1,
            index: i,
        });
        write!(f, "{e}")
    }
}

pub fn final_level(functor: &Functor, n: usize) -> Result<FinalLevel> {
    Ok(FinalSequence::build(functor, n)?.final_level(n))
}

/// Stratified meanings `mng_n(a) ⊆ T^n 1`, memoized per formula and level.
pub struct Stratifier<'a> {
    seq: &'a FinalSequence,
    memo: HashMap<(Formula, usize), Rc<Vec<bool>>>,
}

impl<'a> Stratifier<'a> {
    pub fn new(seq: &'a FinalSequence) -> Self {
        Stratifier {
            seq,
            memo: HashMap::new(),
        }
    }

    /// `mng_n(a)` as a membership vector over level `n`. Requires
    /// `depth(a) ≤ n ≤ seq.depth()`.
    pub fn mng(&mut self, a: &Formula, n: usize) -> Result<Rc<Vec<bool>>> {
        let key = (a.clone(), n);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let size = self.seq.size(n);
        let out = match a {
            Formula::Var(p) => return Err(Error::UnknownVariable(p.to_string())),
            Formula::Neg(b) => self.mng(b, n)?.iter().map(|t| !t).collect(),
            Formula::Conj(v) => {
                let mut acc = vec![true; size];
                for b in v {
                    let t = self.mng(b, n)?;
                    acc.iter_mut().zip(t.iter()).for_each(|(x, y)| *x &= *y);
                }
                acc
            }
            Formula::Disj(v) => {
                let mut acc = vec![false; size];
                for b in v {
                    let t = self.mng(b, n)?;
                    acc.iter_mut().zip(t.iter()).for_each(|(x, y)| *x |= *y);
                }
                acc
            }
            Formula::Nabla(alpha) => {
                if n == 0 {
                    return Err(Error::ty(format!("`{a}` has depth above level 0")));
                }
                // Φ = (T mng_{n-1})(α) ∈ T P(T^{n-1} 1)
                let phi = alpha.try_map(&mut |b| -> Result<FinSet<usize>> {
                    let t = self.mng(b, n - 1)?;
                    Ok(t.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i).collect())
                })?;
                let mut acc = vec![false; size];
                for member in lifted_members(&self.seq.functor, &phi)? {
                    acc[self.seq.index_of(n, &member)] = true;
                }
                acc
            }
        };
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// `mng_n(a)` for `n = depth(a)`, as indices into level `n`.
pub fn mng_n(functor: &Functor, a: &Formula) -> Result<(FinalSequence, Vec<usize>)> {
    a.typecheck(functor)?;
    let n = a.depth();
    let seq = FinalSequence::build(functor, n)?;
    let t = Stratifier::new(&seq).mng(a, n)?;
    let set = t.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i).collect();
    Ok((seq, set))
}

/// Transitions of `Z_n = (T^n 1, T^n g)` as elements over level-`n` indices,
/// with `g : 1 → T1` the canonical minimum. `seq` must reach `max(n, 1)`.
pub fn n_final_transitions(seq: &FinalSequence, n: usize) -> Vec<TElem<usize>> {
    // g_k : T^k 1 → T^{k+1} 1 as index maps, g_0(*) = least element of T1
    let mut g: Vec<usize> = vec![0];
    for k in 1..n {
        let next = seq
            .level(k)
            .iter()
            .map(|e| seq.index_of(k + 1, &e.map(&mut |i| g[*i])))
            .collect();
        g = next;
    }
    if n == 0 {
        return vec![seq.level(1)[0].clone()];
    }
    seq.level(n).iter().map(|e| e.map(&mut |i| g[*i])).collect()
}

/// `Z_n`, with states named `z<i>` after their position in level `n`.
pub fn n_final_coalgebra(functor: &Functor, n: usize) -> Result<Coalgebra> {
    let seq = FinalSequence::build(functor, n.max(1))?;
    z_coalgebra(&seq, n)
}

fn z_coalgebra(seq: &FinalSequence, n: usize) -> Result<Coalgebra> {
    let transitions = n_final_transitions(seq, n);
    let states = (0..transitions.len()).map(|i| format!("z{i}")).collect();
    Coalgebra::from_indices(seq.functor.clone(), states, transitions)
}

/// `ξ_n : X → T^n 1` as indices into level `n`; `seq` must reach `n`.
pub fn behavior_map(m: &Coalgebra, seq: &FinalSequence, n: usize) -> Result<Vec<usize>> {
    if m.functor().shape() != seq.functor.shape() {
        return Err(Error::ty("coalgebra and final sequence use different functors"));
    }
    let mut xi = vec![0usize; m.len()];
    for k in 1..=n {
        xi = (0..m.len())
            .map(|x| seq.index_of(k, &m.transition(x).map(&mut |y| xi[*y])))
            .collect();
    }
    Ok(xi)
}

/// A pointed coalgebra separating two formulas.
#[derive(Debug, Clone)]
pub struct PointedCountermodel {
    pub coalgebra: Coalgebra,
    pub state: String,
    pub satisfied: Formula,
    pub refuted: Formula,
}

#[derive(Debug, Clone)]
pub enum Validity {
    Valid,
    Invalid(Box<PointedCountermodel>),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Decides `a ≼ b` by comparing `mng_n` at `n = max(depth a, depth b)`. On
/// failure the countermodel is the part of `Z_n` reachable from a witness;
/// among all witnesses the one with the fewest reachable states is chosen,
/// ties going to the lowest index.
pub fn decide_valid(functor: &Functor, a: &Formula, b: &Formula) -> Result<Validity> {
    a.typecheck(functor)?;
    b.typecheck(functor)?;
    let n = a.depth().max(b.depth());
    let seq = FinalSequence::build(functor, n.max(1))?;
    let mut strat = Stratifier::new(&seq);
    let ma = strat.mng(a, n)?;
    let mb = strat.mng(b, n)?;
    let witnesses: Vec<usize> = (0..seq.size(n)).filter(|&i| ma[i] && !mb[i]).collect();
    if witnesses.is_empty() {
        return Ok(Validity::Valid);
    }
    let z = z_coalgebra(&seq, n)?;
    let mut best: Option<Vec<usize>> = None;
    for &w in &witnesses {
        let limit = best.as_ref().map_or(usize::MAX, |r| r.len());
        if let Some(r) = reachable_within(&z, w, limit) {
            best = Some(r);
            if best.as_ref().is_some_and(|r| r.len() == 1) {
                break;
            }
        }
    }
    let keep = best.expect("at least one witness");
    let state = z.states()[keep[0]].clone();
    let coalgebra = z.restrict(&keep)?;
    let check_a = crate::coalgebra::model_check(&coalgebra, &state, a)?;
    let check_b = crate::coalgebra::model_check(&coalgebra, &state, b)?;
    if !check_a || check_b {
        return Err(Error::Coalgebra(format!(
            "extracted countermodel does not separate the formulas at `{state}`"
        )));
    }
    Ok(Validity::Invalid(Box::new(PointedCountermodel {
        coalgebra,
        state,
        satisfied: a.clone(),
        refuted: b.clone(),
    })))
}

/// [`decide_valid`] on an inequality.
pub fn decide_inequality(functor: &Functor, ineq: &Inequality) -> Result<Validity> {
    decide_valid(functor, &ineq.lhs, &ineq.rhs)
}

// Reachable states from `x` (x first, then sorted), or None if there are
// `limit` or more.
fn reachable_within(z: &Coalgebra, x: usize, limit: usize) -> Option<Vec<usize>> {
    let mut seen = HashMap::new();
    seen.insert(x, ());
    let mut order = vec![x];
    let mut k = 0;
    while k < order.len() {
        if order.len() >= limit {
            return None;
        }
        let y = order[k];
        k += 1;
        z.transition(y).for_each_inner(&mut |&s| {
            if seen.insert(s, ()).is_none() {
                order.push(s);
            }
        });
    }
    if order.len() >= limit {
        return None;
    }
    order[1..].sort_unstable();
    Some(order)
}
