#![allow(dead_code)]

use drol_core::TrainConfig;

/// Desk-scale run: small nets, short budget, higher step size than the
/// long-run default.
pub fn desk(env: &str, k: usize, alpha: f64, steps: usize) -> TrainConfig {
    TrainConfig {
        env: env.into(),
        dataset_size: 3000,
        k,
        alpha,
        lr: 1e-3,
        batch_size: 64,
        steps,
        eval_interval: steps.max(1),
        eval_episodes: 50,
        log_interval: 500,
        actor_hidden: vec![32, 32],
        critic_hidden: vec![32, 32],
        ..Default::default()
    }
}
