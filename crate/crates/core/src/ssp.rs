//! Stochastic shortest path instances and their exact solution.
//!
//! States are numbered `0..n` internally; the absorbing target is implicit.
//! Every action belongs to exactly one state and carries a sparse row of
//! transition probabilities to states. Whatever mass a row does not assign
//! goes to the target. The serialized form numbers states from 1 and uses 0
//! for the target.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rows may exceed total mass 1 by at most this much.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;
/// Implicit target mass below this is treated as zero.
pub const TARGET_MASS_EPS: f64 = 1e-12;
pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_MAX_ITERS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SspError {
    #[error("state {state} has no action")]
    StateWithoutAction { state: usize },
    #[error("action {action}: {reason}")]
    InvalidAction { action: usize, reason: String },
    #[error("policy: {0}")]
    InvalidPolicy(String),
    #[error("value iteration did not converge: residual {residual} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("policy is improper from state {state}")]
    ImproperPolicy { state: usize },
    #[error("instance file: {0}")]
    Format(String),
}

/// Compressed sparse instance. Build with [`SspInstanceBuilder`].
#[derive(Debug, Clone, PartialEq)]
pub struct SspInstance {
    n_states: usize,
    action_state: Vec<u32>,
    costs: Vec<f64>,
    row_ptr: Vec<usize>,
    succ: Vec<u32>,
    prob: Vec<f64>,
    state_ptr: Vec<usize>,
    state_actions: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct SspInstanceBuilder {
    n_states: usize,
    action_state: Vec<u32>,
    costs: Vec<f64>,
    row_ptr: Vec<usize>,
    succ: Vec<u32>,
    prob: Vec<f64>,
}

impl SspInstanceBuilder {
    pub fn new(n_states: usize) -> Self {
        Self {
            n_states,
            action_state: Vec::new(),
            costs: Vec::new(),
            row_ptr: vec![0],
            succ: Vec::new(),
            prob: Vec::new(),
        }
    }

    pub fn n_actions(&self) -> usize {
        self.costs.len()
    }

    /// Appends an action of `state`; returns its index.
    pub fn push_action(
        &mut self,
        state: usize,
        cost: f64,
        transitions: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<usize, SspError> {
        let action = self.costs.len();
        let bad = |reason: String| Err(SspError::InvalidAction { action, reason });
        if state >= self.n_states {
            return bad(format!("state {state} out of range"));
        }
        if !cost.is_finite() {
            return bad(format!("cost {cost} not finite"));
        }
        let start = self.succ.len();
        let mut total = 0.0;
        for (s, p) in transitions {
            if s >= self.n_states || !(p >= 0.0) || !p.is_finite() {
                self.succ.truncate(start);
                self.prob.truncate(start);
                return bad(format!("bad transition ({s}, {p})"));
            }
            total += p;
            self.succ.push(s as u32);
            self.prob.push(p);
        }
        if total > 1.0 + ROW_SUM_TOLERANCE {
            self.succ.truncate(start);
            self.prob.truncate(start);
            return bad(format!("row mass {total} exceeds 1"));
        }
        self.action_state.push(state as u32);
        self.costs.push(cost);
        self.row_ptr.push(self.succ.len());
        Ok(action)
    }

    pub fn finish(self) -> Result<SspInstance, SspError> {
        let n = self.n_states;
        let mut counts = vec![0usize; n + 1];
        for &s in &self.action_state {
            counts[s as usize + 1] += 1;
        }
        for s in 0..n {
            if counts[s + 1] == 0 {
                return Err(SspError::StateWithoutAction { state: s });
            }
            counts[s + 1] += counts[s];
        }
        let state_ptr = counts;
        let mut fill = state_ptr.clone();
        let mut state_actions = vec![0u32; self.action_state.len()];
        for (a, &s) in self.action_state.iter().enumerate() {
            state_actions[fill[s as usize]] = a as u32;
            fill[s as usize] += 1;
        }
        Ok(SspInstance {
            n_states: n,
            action_state: self.action_state,
            costs: self.costs,
            row_ptr: self.row_ptr,
            succ: self.succ,
            prob: self.prob,
            state_ptr,
            state_actions,
        })
    }
}

impl SspInstance {
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.costs.len()
    }

    pub fn n_transitions(&self) -> usize {
        self.succ.len()
    }

    pub fn cost(&self, action: usize) -> f64 {
        self.costs[action]
    }

    pub fn state_of(&self, action: usize) -> usize {
        self.action_state[action] as usize
    }

    /// Actions available in `state`, in increasing index order.
    pub fn actions(&self, state: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.state_actions[self.state_ptr[state]..self.state_ptr[state + 1]]
            .iter()
            .map(|a| *a as usize)
    }

    /// Successor states with positive or zero mass; the target is implicit.
    pub fn transitions(&self, action: usize) -> impl ExactSizeIterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[action]..self.row_ptr[action + 1];
        self.succ[range.clone()]
            .iter()
            .zip(&self.prob[range])
            .map(|(s, p)| (*s as usize, *p))
    }

    /// Mass of `action` going directly to the target.
    pub fn target_mass(&self, action: usize) -> f64 {
        let range = self.row_ptr[action]..self.row_ptr[action + 1];
        (1.0 - self.prob[range].iter().sum::<f64>()).max(0.0)
    }

    /// `c(a) + sum_s' P(a, s') J(s')`.
    pub fn q_value(&self, action: usize, values: &[f64]) -> f64 {
        let range = self.row_ptr[action]..self.row_ptr[action + 1];
        let mut acc = self.costs[action];
        for (s, p) in self.succ[range.clone()].iter().zip(&self.prob[range]) {
            acc += p * values[*s as usize];
        }
        acc
    }

    /// Lowest-index action attaining the minimum Q-value, and that minimum.
    pub fn greedy_action(&self, state: usize, values: &[f64]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for a in self.actions(state) {
            let q = self.q_value(a, values);
            if q < best.1 {
                best = (a, q);
            }
        }
        best
    }

    pub fn greedy_policy(&self, values: &[f64]) -> Policy {
        Policy {
            actions: (0..self.n_states).map(|s| self.greedy_action(s, values).0).collect(),
        }
    }

    /// `max_s |T J(s) - J(s)|`.
    pub fn bellman_residual(&self, values: &[f64]) -> f64 {
        (0..self.n_states)
            .map(|s| (self.greedy_action(s, values).1 - values[s]).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n_states: self.n_states,
            n_actions: self.n_actions(),
            actions: (0..self.n_actions())
                .map(|a| ActionRecord {
                    state: self.state_of(a) + 1,
                    cost: self.costs[a],
                    transitions: self.transitions(a).map(|(s, p)| (s + 1, p)).collect(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self, SspError> {
        if file.actions.len() != file.n_actions {
            return Err(SspError::Format(format!(
                "header says {} actions, found {}",
                file.n_actions,
                file.actions.len()
            )));
        }
        let mut b = SspInstanceBuilder::new(file.n_states);
        for (i, rec) in file.actions.iter().enumerate() {
            if rec.state == 0 {
                return Err(SspError::Format(format!("action {i} belongs to the target")));
            }
            let total: f64 = rec.transitions.iter().map(|t| t.1).sum();
            let norm = if total > 1.0 && total <= 1.0 + ROW_SUM_TOLERANCE {
                total
            } else {
                1.0
            };
            let row = rec
                .transitions
                .iter()
                .filter(|(s, _)| *s != 0)
                .map(|(s, p)| (s - 1, p / norm));
            b.push_action(rec.state - 1, rec.cost, row.collect::<Vec<_>>())?;
        }
        b.finish()
    }
}

/// Serialized instance. States are 1-based; state 0 is the target and may
/// appear in a row explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n_states: usize,
    pub n_actions: usize,
    pub actions: Vec<ActionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub state: usize,
    pub cost: f64,
    pub transitions: Vec<(usize, f64)>,
}

/// Deterministic stationary policy: one action per state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub actions: Vec<usize>,
}

impl Policy {
    pub fn action(&self, state: usize) -> usize {
        self.actions[state]
    }

    pub fn validate(&self, instance: &SspInstance) -> Result<(), SspError> {
        if self.actions.len() != instance.n_states() {
            return Err(SspError::InvalidPolicy(format!(
                "{} actions for {} states",
                self.actions.len(),
                instance.n_states()
            )));
        }
        for (s, &a) in self.actions.iter().enumerate() {
            if a >= instance.n_actions() || instance.state_of(a) != s {
                return Err(SspError::InvalidPolicy(format!(
                    "action {a} is not available in state {s}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Vec<f64>,
    pub policy: Policy,
    pub iterations: usize,
    pub residual: f64,
}

/// Jacobi value iteration from `J = 0`. Stops once the sup-norm change
/// between sweeps drops below `epsilon` and returns the greedy policy of
/// the last sweep's values.
pub fn value_iteration(instance: &SspInstance, epsilon: f64, max_iters: usize) -> Result<Solution, SspError> {
    let n = instance.n_states();
    let mut values = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iters {
        next.par_iter_mut()
            .enumerate()
            .for_each(|(s, v)| *v = instance.greedy_action(s, &values).1);
        residual = values.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut values, &mut next);
        if residual < epsilon {
            let policy = instance.greedy_policy(&values);
            return Ok(Solution {
                values,
                policy,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(SspError::NoConvergence {
        residual,
        iterations: max_iters,
    })
}

/// Whether the target is reachable from every state through positive
/// probability transitions of `policy`.
pub fn check_proper(instance: &SspInstance, policy: &Policy) -> bool {
    first_improper_state(instance, policy).is_none()
}

fn first_improper_state(instance: &SspInstance, policy: &Policy) -> Option<usize> {
    let n = instance.n_states();
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut reaches = vec![false; n];
    let mut stack = Vec::new();
    for s in 0..n {
        let a = policy.action(s);
        for (t, p) in instance.transitions(a) {
            if p > 0.0 {
                preds[t].push(s as u32);
            }
        }
        if instance.target_mass(a) > TARGET_MASS_EPS {
            reaches[s] = true;
            stack.push(s);
        }
    }
    while let Some(s) = stack.pop() {
        for &p in &preds[s] {
            if !reaches[p as usize] {
                reaches[p as usize] = true;
                stack.push(p as usize);
            }
        }
    }
    reaches.iter().position(|r| !r)
}

/// Expected cost to the target under `policy`: the solution of
/// `(I - Q) v = c`, solved block by block over the strongly connected
/// components of the policy graph, successors first.
pub fn evaluate_policy(instance: &SspInstance, policy: &Policy) -> Result<Vec<f64>, SspError> {
    policy.validate(instance)?;
    if let Some(state) = first_improper_state(instance, policy) {
        return Err(SspError::ImproperPolicy { state });
    }
    let n = instance.n_states();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, instance.n_states());
    for _ in 0..n {
        graph.add_node(());
    }
    for s in 0..n {
        for (t, p) in instance.transitions(policy.action(s)) {
            if p > 0.0 && t != s {
                graph.add_edge(NodeIndex::new(s), NodeIndex::new(t), ());
            }
        }
    }

    let mut values = vec![0.0; n];
    let mut block_of = vec![usize::MAX; n];
    // tarjan_scc yields components in reverse topological order: every
    // component comes after all components it can reach.
    for (block, component) in tarjan_scc(&graph).into_iter().enumerate() {
        let states: Vec<usize> = component.iter().map(|i| i.index()).collect();
        for (k, &s) in states.iter().enumerate() {
            block_of[s] = block;
            // Reuse `values` slot as the local index while the block is open.
            values[s] = k as f64;
        }
        let k = states.len();
        let mut a = nalgebra::DMatrix::<f64>::identity(k, k);
        let mut b = nalgebra::DVector::<f64>::zeros(k);
        for (i, &s) in states.iter().enumerate() {
            let action = policy.action(s);
            let mut rhs = instance.cost(action);
            for (t, p) in instance.transitions(action) {
                if block_of[t] == block {
                    a[(i, values[t] as usize)] -= p;
                } else {
                    rhs += p * values[t];
                }
            }
            b[i] = rhs;
        }
        let solved = if k == 1 {
            let denom = a[(0, 0)];
            (denom > TARGET_MASS_EPS).then(|| nalgebra::DVector::from_element(1, b[0] / denom))
        } else {
            a.lu().solve(&b)
        };
        let x = solved
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .ok_or(SspError::ImproperPolicy { state: states[0] })?;
        for (i, &s) in states.iter().enumerate() {
            values[s] = x[i];
        }
    }
    Ok(values)
}
