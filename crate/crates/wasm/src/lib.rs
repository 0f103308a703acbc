//! Browser bindings for the interactive demo page in `www/`.
//!
//! Every export returns a JSON string so the page can stay plain JavaScript.

use drol_core::actor::route_actions;
use drol_core::theory::{
    coverage_bound, coverage_exponential_bound, coverage_montecarlo, interval_distortion,
    optimal_quantizer_bruteforce, routed_distortion, QuantizerConfig,
};
use drol_core::train::{evaluate_policy, train};
use drol_core::{act, rng, ActorMode, BallPrior, EnvSpec, TrainConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn route_map(candidates: &[f64], data: &[f64], lo: f64, hi: f64, cells: usize) -> Result<String, JsValue> {
    to_js(route_map_json(candidates, data, lo, hi, cells))
}

#[wasm_bindgen]
pub fn train_bandit(env: &str, mode: &str, k: usize, alpha: f64, steps: usize, seed: u32) -> Result<String, JsValue> {
    to_js(train_bandit_json(env, mode, k, alpha, steps, seed.into()))
}

#[wasm_bindgen]
pub fn theory_curves(p: &[f64], k_max: usize, radius: f64, modes: usize) -> Result<String, JsValue> {
    to_js(theory_curves_json(p, k_max, radius, modes))
}

/// Routes each data action to its nearest candidate on the action line and
/// returns the winner of every grid point in `[lo, hi]` plus the loss each
/// candidate would receive from `data`.
pub fn route_map_json(candidates: &[f64], data: &[f64], lo: f64, hi: f64, cells: usize) -> Result<String, String> {
    if candidates.is_empty() {
        return Err(err("need at least one candidate"));
    }
    if !(hi > lo) || cells == 0 {
        return Err(err("need lo < hi and at least one cell"));
    }
    let protos: Vec<Vec<f64>> = candidates.iter().map(|&c| vec![c]).collect();
    let mut grid = Vec::with_capacity(cells);
    for i in 0..cells {
        let x = lo + (hi - lo) * (i as f64 + 0.5) / cells as f64;
        grid.push(route_actions(&protos, &[x]).map_err(err)?.winner);
    }
    let mut wins = vec![0usize; candidates.len()];
    let mut loss = vec![0.0; candidates.len()];
    for &a in data {
        let r = route_actions(&protos, &[a]).map_err(err)?;
        wins[r.winner] += 1;
        loss[r.winner] += r.sq_dist;
    }
    Ok(json!({ "grid": grid, "wins": wins, "loss": loss }).to_string())
}

/// Trains a small actor on a bandit preset and returns a histogram of its
/// action samples next to the dataset histogram.
pub fn train_bandit_json(env: &str, mode: &str, k: usize, alpha: f64, steps: usize, seed: u64) -> Result<String, String> {
    let cfg = TrainConfig {
        env: env.into(),
        dataset_size: 1000,
        k,
        alpha,
        lr: 1e-3,
        batch_size: 32,
        steps,
        eval_interval: steps.max(1),
        eval_episodes: 200,
        log_interval: (steps / 20).max(1),
        actor_hidden: vec![24, 24],
        critic_hidden: vec![24, 24],
        actor_mode: mode.parse::<ActorMode>().map_err(err)?,
        seed,
        ..Default::default()
    };
    let EnvSpec::IntervalBandit(bandit) = cfg.env_spec().map_err(err)? else {
        return Err(err("the demo trains bandit presets only"));
    };
    let data = cfg.dataset().map_err(err)?;
    let out = train(&cfg, &data).map_err(err)?;
    if let Some(h) = &out.halt {
        return Err(err(format!("run halted at step {}: {}", h.step, h.reason)));
    }
    let (lo, hi) = bandit.action_bounds();
    let bins = 60;
    let bin = |x: f64| (((x - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1);
    let mut policy = vec![0usize; bins];
    let mut prior = BallPrior::for_action_dim(1, rng::stream(seed, rng::streams::DIAGNOSTICS)).map_err(err)?;
    for _ in 0..4000 {
        let a = act(&out.actor, &[0.0], &mut prior).map_err(err)?[0];
        policy[bin(a.clamp(lo, hi))] += 1;
    }
    let mut dataset = vec![0usize; bins];
    for t in &data.transitions {
        dataset[bin(t.a[0])] += 1;
    }
    let spec = cfg.env_spec().map_err(err)?;
    let ev = evaluate_policy(&spec, &out.actor, &prior, 500, seed ^ 0x5eed).map_err(err)?;
    let curve: Vec<Value> = out
        .metrics
        .iter()
        .map(|m| json!({ "step": m.step, "bc": m.bc, "td": m.td_loss }))
        .collect();
    let intervals: Vec<(f64, f64)> = (0..bandit.modes()).map(|m| bandit.interval(m)).collect();
    Ok(json!({
        "lo": lo,
        "hi": hi,
        "policy": policy,
        "dataset": dataset,
        "intervals": intervals,
        "weights": bandit.weights,
        "return": ev.mean_return,
        "violation": ev.support_violation,
        "curve": curve,
    })
    .to_string())
}

/// Coverage probability bounds and a Monte Carlo estimate for `K = 1..=k_max`
/// given mode masses `p`, plus routed distortion of the best and of a
/// collapsed placement for `M` equal intervals.
pub fn theory_curves_json(p: &[f64], k_max: usize, radius: f64, modes: usize) -> Result<String, String> {
    let mut rng = rng::stream(0, 0);
    let mut coverage = Vec::new();
    for k in 1..=k_max {
        let mc = coverage_montecarlo(p, k, 20_000, &mut rng).map_err(err)?;
        coverage.push(json!({
            "k": k,
            "bound": coverage_bound(p, k).map_err(err)?,
            "exp_bound": coverage_exponential_bound(p, k).map_err(err)?,
            "mc": mc.frequency,
        }));
    }
    let mut cfg = QuantizerConfig::evenly_spaced(modes, radius, 5.0 * radius, modes).map_err(err)?;
    cfg.nodes = 2000;
    let opt = optimal_quantizer_bruteforce(&cfg, 200_000).map_err(err)?;
    // two prototypes split the first interval and the second gets none
    let mut collapsed = vec![cfg.centers[0]; modes];
    if modes > 1 {
        collapsed[modes - 1] = cfg.centers[modes - 1];
        collapsed[0] -= radius / 2.0;
        collapsed[1] = cfg.centers[0] + radius / 2.0;
    }
    Ok(json!({
        "coverage": coverage,
        "interval_distortion": (1..=4).map(|q| interval_distortion(radius, q)).collect::<Vec<_>>(),
        "optimal": opt.distortion,
        "optimal_prototypes": opt.prototypes,
        "collapsed": routed_distortion(&collapsed, &cfg).map_err(err)?,
        "collapsed_prototypes": collapsed,
    })
    .to_string())
}
