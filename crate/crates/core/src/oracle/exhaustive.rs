use std::collections::HashMap;

use super::tiny::TinyInstance;
use super::OracleError;
use crate::env::{Environment, StateKey, WorldState};

/// Best cumulative team reward over `horizon` slots from the reset state,
/// with one optimal action sequence (lexicographically smallest on ties).
pub fn exhaustive_best_return(inst: &TinyInstance, horizon: u32) -> Result<(f64, Vec<usize>), OracleError> {
    inst.check(horizon)?;
    let root = inst.env.reset(inst.env.config().placement_seed)?;
    let mut memo = HashMap::new();
    let value = search(&inst.env, &root, horizon, &mut memo)?;

    let mut actions = Vec::new();
    let mut state = root;
    let mut remaining = horizon;
    while let Some(&(_, Some(a))) = memo.get(&(state.key(), remaining)) {
        actions.push(a);
        state = inst.env.step_index(&state, a)?.next;
        remaining -= 1;
    }
    Ok((value, actions))
}

type Memo = HashMap<(StateKey, u32), (f64, Option<usize>)>;

fn search(env: &Environment, state: &WorldState, remaining: u32, memo: &mut Memo) -> Result<f64, OracleError> {
    if state.terminal || remaining == 0 {
        return Ok(0.0);
    }
    let key = (state.key(), remaining);
    if let Some(&(v, _)) = memo.get(&key) {
        return Ok(v);
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_action = 0;
    for a in 0..env.action_space().len() {
        let out = env.step_index(state, a)?;
        let v = out.reward + search(env, &out.next, remaining - 1, memo)?;
        if v > best {
            best = v;
            best_action = a;
        }
    }
    memo.insert(key, (best, Some(best_action)));
    Ok(best)
}

/// Same optimum by plain enumeration of every action sequence; exponential,
/// used only to cross-check the memoized search.
pub fn enumerate_best_return(inst: &TinyInstance, horizon: u32) -> Result<(f64, Vec<usize>), OracleError> {
    inst.check(horizon)?;
    let root = inst.env.reset(inst.env.config().placement_seed)?;
    enumerate(&inst.env, &root, horizon)
}

fn enumerate(env: &Environment, state: &WorldState, remaining: u32) -> Result<(f64, Vec<usize>), OracleError> {
    if state.terminal || remaining == 0 {
        return Ok((0.0, Vec::new()));
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for a in 0..env.action_space().len() {
        let out = env.step_index(state, a)?;
        let (tail, mut seq) = enumerate(env, &out.next, remaining - 1)?;
        let v = out.reward + tail;
        if v > best.0 {
            seq.insert(0, a);
            best = (v, seq);
        }
    }
    Ok(best)
}
