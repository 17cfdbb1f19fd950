use std::collections::HashMap;

use super::tiny::TinyInstance;
use super::OracleError;
use crate::env::{StateKey, WorldState};

/// Optimal values `V_k(s)` over every state reachable from the reset state,
/// where `k` is the number of slots left before the horizon.
#[derive(Debug, Clone)]
pub struct ValueTable {
    pub horizon: u32,
    root: StateKey,
    entries: HashMap<StateKey, (f64, Option<usize>)>,
}

impl ValueTable {
    pub fn root_value(&self) -> f64 {
        self.entries[&self.root].0
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value(&self, state: &WorldState) -> Option<f64> {
        self.entries.get(&state.key()).map(|e| e.0)
    }

    /// Greedy action from the table; `None` at terminal or horizon states.
    pub fn best_action(&self, state: &WorldState) -> Option<usize> {
        self.entries.get(&state.key()).and_then(|e| e.1)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.values().map(|e| e.0)
    }
}

/// Backward induction `V_k(s) = max_a [r(s, a) + V_{k-1}(s')]`, `V_0 = 0`,
/// over the layered reachable state graph. Ties go to the lowest action index.
pub fn finite_horizon_dp(inst: &TinyInstance, horizon: u32) -> Result<ValueTable, OracleError> {
    inst.check(horizon)?;
    let env = &inst.env;
    let n_actions = env.action_space().len();
    let root = env.reset(env.config().placement_seed)?;

    // slot index doubles as depth, so layers never share keys
    let mut layers: Vec<Vec<WorldState>> = vec![vec![root.clone()]];
    let mut successors: Vec<HashMap<StateKey, Vec<(f64, StateKey)>>> = Vec::new();
    for depth in 0..horizon as usize {
        let mut next_layer = Vec::new();
        let mut seen = HashMap::new();
        let mut edges = HashMap::new();
        for s in &layers[depth] {
            if s.terminal {
                continue;
            }
            let mut out_edges = Vec::with_capacity(n_actions);
            for a in 0..n_actions {
                let out = env.step_index(s, a)?;
                let key = out.next.key();
                if seen.insert(key.clone(), ()).is_none() {
                    next_layer.push(out.next);
                }
                out_edges.push((out.reward, key));
            }
            edges.insert(s.key(), out_edges);
        }
        successors.push(edges);
        layers.push(next_layer);
    }

    let mut entries: HashMap<StateKey, (f64, Option<usize>)> = HashMap::new();
    for depth in (0..=horizon as usize).rev() {
        for s in &layers[depth] {
            let key = s.key();
            let entry = match successors.get(depth).and_then(|e| e.get(&key)) {
                Some(edges) if depth < horizon as usize => {
                    let mut best = f64::NEG_INFINITY;
                    let mut best_action = 0;
                    for (a, (r, next)) in edges.iter().enumerate() {
                        let v = r + entries[next].0;
                        if v > best {
                            best = v;
                            best_action = a;
                        }
                    }
                    (best, Some(best_action))
                }
                _ => (0.0, None),
            };
            entries.insert(key, entry);
        }
    }
    Ok(ValueTable {
        horizon,
        root: root.key(),
        entries,
    })
}
