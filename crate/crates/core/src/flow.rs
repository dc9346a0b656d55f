//! Exact max-flow (Edmonds–Karp) over any ordered additive capacity type,
//! and transportation feasibility on top of it.
//!
//! Shortest augmenting paths bound the number of augmentations by `O(V E)`
//! independently of the capacities, so the solver terminates on rational
//! capacities and returns an exact optimum.

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use num_traits::Zero;

pub trait Capacity: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}

impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>> Capacity for T {}

#[derive(Debug, Clone)]
struct Arc<C> {
    to: usize,
    residual: C,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork<C> {
    arcs: Vec<Arc<C>>,
    caps: Vec<C>,
    adj: Vec<Vec<usize>>,
}

impl<C: Capacity> FlowNetwork<C> {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            caps: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds a directed edge and returns its id.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: C) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            to,
            residual: cap.clone(),
        });
        self.arcs.push(Arc {
            to: from,
            residual: C::zero(),
        });
        self.caps.push(cap);
        self.caps.push(C::zero());
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently routed through edge `id`.
    pub fn flow(&self, id: usize) -> C {
        self.caps[id].clone() - self.arcs[id].residual.clone()
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> C {
        let mut total = C::zero();
        if source == sink {
            return total;
        }
        loop {
            let mut parent: Vec<Option<usize>> = vec![None; self.adj.len()];
            let mut seen = vec![false; self.adj.len()];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &a in &self.adj[u] {
                    let v = self.arcs[a].to;
                    if !seen[v] && self.arcs[a].residual > C::zero() {
                        seen[v] = true;
                        parent[v] = Some(a);
                        queue.push_back(v);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            let mut bottleneck: Option<C> = None;
            let mut v = sink;
            while let Some(a) = parent[v] {
                let r = self.arcs[a].residual.clone();
                bottleneck = Some(match bottleneck {
                    Some(b) if b <= r => b,
                    _ => r,
                });
                v = self.arcs[a ^ 1].to;
            }
            let delta = bottleneck.expect("sink reached through at least one arc");
            let mut v = sink;
            while let Some(a) = parent[v] {
                self.arcs[a].residual = self.arcs[a].residual.clone() - delta.clone();
                self.arcs[a ^ 1].residual = self.arcs[a ^ 1].residual.clone() + delta.clone();
                v = self.arcs[a ^ 1].to;
            }
            total = total + delta;
        }
    }
}

/// Decides whether `supply` can be shipped to exactly meet `demand` along
/// the allowed `(row, column)` edges. Returns the flow on each edge, in the
/// order given, when feasible.
pub fn transport<C: Capacity>(supply: &[C], demand: &[C], edges: &[(usize, usize)]) -> Option<Vec<C>> {
    let total_supply = supply.iter().cloned().fold(C::zero(), |a, b| a + b);
    let total_demand = demand.iter().cloned().fold(C::zero(), |a, b| a + b);
    if total_supply != total_demand {
        return None;
    }
    let source = supply.len() + demand.len();
    let sink = source + 1;
    let mut net = FlowNetwork::new(sink + 1);
    for (i, s) in supply.iter().enumerate() {
        net.add_edge(source, i, s.clone());
    }
    for (j, d) in demand.iter().enumerate() {
        net.add_edge(supply.len() + j, sink, d.clone());
    }
    let ids: Vec<usize> = edges
        .iter()
        .map(|&(i, j)| net.add_edge(i, supply.len() + j, total_supply.clone()))
        .collect();
    if net.max_flow(source, sink) == total_supply {
        Some(ids.into_iter().map(|id| net.flow(id)).collect())
    } else {
        None
    }
}
