mod common;

use common::desk;
use drol_core::actor::{route_actions, routed_loss};
use drol_core::critic::QuadraticCritic;
use drol_core::env::IntervalBandit;
use drol_core::train::{run_sweep, TrainOutcome};
use drol_core::*;
use drol_core::{rng, rng::streams};
use rand::Rng;

fn bandit(cfg: &TrainConfig) -> IntervalBandit {
    match cfg.env_spec().unwrap() {
        EnvSpec::IntervalBandit(b) => b,
        _ => unreachable!(),
    }
}

fn run(cfg: &TrainConfig) -> TrainOutcome {
    let out = train(cfg, &cfg.dataset().unwrap()).unwrap();
    assert!(out.halt.is_none());
    out
}

fn samples(actor: &Actor, n: usize) -> Vec<f64> {
    let mut prior = BallPrior::for_action_dim(1, rng::stream(77, streams::DIAGNOSTICS)).unwrap();
    (0..n).map(|_| act(actor, &[0.0], &mut prior).unwrap()[0]).collect()
}

fn nearest_mode_shares(b: &IntervalBandit, xs: &[f64]) -> Vec<f64> {
    let mut h = vec![0.0; b.modes()];
    for &x in xs {
        h[b.nearest_mode(x)] += 1.0 / xs.len() as f64;
    }
    h
}

#[test]
fn routed_cloning_matches_mode_proportions() {
    let cfg = desk("bandit3", 8, 0.0, 4000);
    let b = bandit(&cfg);
    let out = run(&cfg);
    let h = nearest_mode_shares(&b, &samples(&out.actor, 20_000));
    let tv = 0.5 * h.iter().map(|p| (p - 1.0 / 3.0).abs()).sum::<f64>();
    assert!(tv < 0.1, "shares {h:?}");
}

#[test]
fn single_candidate_cloning_collapses_to_the_mean() {
    let cfg = desk("bandit3", 1, 0.0, 3000);
    let data = cfg.dataset().unwrap();
    let mean = data.transitions.iter().map(|t| t.a[0]).sum::<f64>() / data.len() as f64;
    let out = train(&cfg, &data).unwrap();
    let xs = samples(&out.actor, 5000);
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let spread = xs.iter().map(|x| (x - m).abs()).fold(0.0, f64::max);
    assert!((m - mean).abs() < 0.1, "{m} vs {mean}");
    assert!(spread < 0.3, "{spread}");
}

#[test]
fn pointwise_cloning_rests_inside_the_middle_interval() {
    let mut cfg = desk("bandit3", 1, 0.0, 8000);
    cfg.actor_mode = ActorMode::Pointwise;
    let out = run(&cfg);
    let ev = out.metrics.last().unwrap();
    assert!(ev.support_violation.unwrap() <= 0.05, "{ev:?}");
}

#[test]
fn routed_cloning_covers_both_offset_modes() {
    // most mass lands near a mode; the rest sits on the unrouted arc
    // between them
    let cfg = desk("bandit2_offset", 8, 0.0, 4000);
    let b = bandit(&cfg);
    let out = run(&cfg);
    let xs = samples(&out.actor, 100_000);
    let h = nearest_mode_shares(&b, &xs);
    assert!(h.iter().all(|&p| p > 0.3), "{h:?}");
    let inside = xs.iter().filter(|&&x| b.mode_of(x).is_some()).count() as f64 / xs.len() as f64;
    println!("in-mode fraction {inside:.3}");
    assert!(inside > 0.5);
}

#[test]
fn three_candidates_share_three_modes() {
    let mut cfg = desk("bandit3", 3, 0.0, 3000);
    cfg.log_interval = 3000;
    let out = run(&cfg);
    let hist = &out.metrics.last().unwrap().winner_hist;
    let total: usize = hist.iter().sum();
    let top = *hist.iter().max().unwrap() as f64 / total as f64;
    assert!(top <= 0.6, "{hist:?}");
}

#[test]
fn one_cell_sweep_equals_a_plain_run() {
    let mut cfg = desk("bandit3", 4, 1.0, 200);
    cfg.seed = 5;
    cfg.log_interval = 100;
    cfg.eval_interval = 200;
    let report = run_sweep(&cfg, &[4], &[5]);
    let direct = run(&cfg);
    assert_eq!(report.runs[0].result.as_ref().unwrap(), direct.metrics.last().unwrap());
}

#[test]
fn metrics_stream_matches_the_collected_records() {
    let mut cfg = desk("bandit3", 4, 1.0, 120);
    cfg.log_interval = 40;
    let mut streamed = Vec::new();
    let out = drol_core::train::train_with_sink(&cfg, &cfg.dataset().unwrap(), |r| {
        streamed.push(r.to_csv_row());
        Ok(())
    })
    .unwrap();
    let rows: Vec<String> = out.metrics.iter().map(|r| r.to_csv_row()).collect();
    assert_eq!(streamed, rows);
    assert_eq!(out.metrics.iter().map(|r| r.step).collect::<Vec<_>>(), vec![40, 80, 120]);
}

#[test]
fn routed_descent_restarts_find_one_prototype_per_interval() {
    // plain SGD on the routed loss with a flat critic, from random starts
    let centers = [-1.0, 0.0, 1.0];
    let flat = QuadraticCritic { peak: vec![0.0], curvature: 0.0, top: 0.0 };
    let mut r = rng::stream(3, 0);
    let restarts = 40;
    let mut ok = 0;
    for _ in 0..restarts {
        let mut protos: Vec<Vec<f64>> = (0..3).map(|_| vec![r.random_range(-1.5..1.5)]).collect();
        for _ in 0..20_000 {
            let c = centers[r.random_range(0..3)];
            let a = [c + r.random_range(-0.1..=0.1)];
            let out = routed_loss(&[], &protos, &a, 0.0, &flat).unwrap();
            for (p, g) in protos.iter_mut().zip(&out.grads) {
                p[0] -= 0.01 * g[0];
            }
        }
        let mut hit = [false; 3];
        for c in centers {
            hit[route_actions(&protos, &[c]).unwrap().winner] = true;
        }
        let each_close = centers.iter().all(|c| protos.iter().any(|p| (p[0] - c).abs() < 0.05));
        if hit.iter().all(|&h| h) && each_close {
            ok += 1;
        }
    }
    println!("one-per-interval in {ok}/{restarts} restarts");
    assert!(ok > 0);
}
