//! Training loop, run configuration, metrics log and K × seed sweeps.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::actor::{drol_actor_loss, pointwise_actor_loss, Actor, ActorLossReport};
use crate::checkpoint::Checkpoint;
use crate::critic::{Aggregation, CriticConfig, CriticEnsemble};
use crate::diagnostics::candidate_diagnostics;
use crate::env::{evaluate_with, generate_dataset, make_grid_nav, make_interval_bandit, EnvSpec, EvalReport, OfflineDataset};
use crate::error::{Error, Result};
use crate::nn::AdamState;
use crate::prior::{sample_ball, BallPrior};
use crate::rng::{self, streams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActorMode {
    Drol,
    Pointwise,
}

impl FromStr for ActorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "drol" => Ok(Self::Drol),
            "pointwise" => Ok(Self::Pointwise),
            other => Err(Error::InvalidConfig(format!("unknown actor mode '{other}' (drol | pointwise)"))),
        }
    }
}

impl std::fmt::Display for ActorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Drol => "drol",
            Self::Pointwise => "pointwise",
        })
    }
}

/// Every hyperparameter of a run.
///
/// The text form is one `key = value` per line; `#` starts a comment and
/// list values are comma separated. Keys are the field names below.
///
/// | key | meaning |
/// |---|---|
/// | `env` | preset: `bandit3`, `bandit2_offset`, `gridnav` |
/// | `bandit_weights`, `bandit_offsets` | per-mode reward weights and in-interval peak offsets (override preset) |
/// | `bandit_radius`, `bandit_gap`, `bandit_curvature` | bandit geometry (override preset) |
/// | `grid_width` | grid-nav side length |
/// | `dataset_size` | transitions generated from the behavior policy |
/// | `k` | routing budget |
/// | `alpha` | critic weight in the actor loss |
/// | `gamma`, `tau`, `lr` | discount, Polyak rate, Adam step size |
/// | `batch_size`, `steps` | minibatch size and total updates |
/// | `eval_interval`, `eval_episodes` | evaluation cadence (steps) and rollouts per evaluation |
/// | `log_interval` | metrics cadence in steps |
/// | `seed` | run seed |
/// | `critic_ensemble`, `q_agg` | ensemble size and `mean` or `min` |
/// | `actor_mode` | `drol` or `pointwise` |
/// | `actor_hidden`, `critic_hidden` | hidden widths, e.g. `64,64` |
/// | `latent_dim` | `d_z`; 0 means `d_a` |
/// | `trace_checkpoints` | actor snapshots kept for tracing; 0 disables |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub env: String,
    pub bandit_weights: Option<Vec<f64>>,
    pub bandit_offsets: Option<Vec<f64>>,
    pub bandit_radius: Option<f64>,
    pub bandit_gap: Option<f64>,
    pub bandit_curvature: Option<f64>,
    pub grid_width: usize,
    pub dataset_size: usize,
    pub k: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub tau: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub steps: usize,
    pub eval_interval: usize,
    pub eval_episodes: usize,
    pub log_interval: usize,
    pub seed: u64,
    pub critic_ensemble: usize,
    pub q_agg: Aggregation,
    pub actor_mode: ActorMode,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    pub latent_dim: usize,
    pub trace_checkpoints: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            env: "bandit3".into(),
            bandit_weights: None,
            bandit_offsets: None,
            bandit_radius: None,
            bandit_gap: None,
            bandit_curvature: None,
            grid_width: 8,
            dataset_size: 3000,
            k: 16,
            alpha: 1.0,
            gamma: 0.99,
            tau: 0.005,
            lr: AdamState::DEFAULT_LR,
            batch_size: 256,
            steps: 20_000,
            eval_interval: 2000,
            eval_episodes: 50,
            log_interval: 100,
            seed: 0,
            critic_ensemble: 2,
            q_agg: Aggregation::Mean,
            actor_mode: ActorMode::Drol,
            actor_hidden: vec![64, 64],
            critic_hidden: vec![64, 64],
            latent_dim: 0,
            trace_checkpoints: 0,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad list element '{x}' for {key}")))
        })
        .collect()
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value '{v}' for {key}")))
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl TrainConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let (key, v) = (key.trim(), value.trim());
        match key {
            "env" => self.env = v.to_string(),
            "bandit_weights" => self.bandit_weights = Some(parse_list(key, v)?),
            "bandit_offsets" => self.bandit_offsets = Some(parse_list(key, v)?),
            "bandit_radius" => self.bandit_radius = Some(parse_one(key, v)?),
            "bandit_gap" => self.bandit_gap = Some(parse_one(key, v)?),
            "bandit_curvature" => self.bandit_curvature = Some(parse_one(key, v)?),
            "grid_width" => self.grid_width = parse_one(key, v)?,
            "dataset_size" => self.dataset_size = parse_one(key, v)?,
            "k" => self.k = parse_one(key, v)?,
            "alpha" => self.alpha = parse_one(key, v)?,
            "gamma" => self.gamma = parse_one(key, v)?,
            "tau" => self.tau = parse_one(key, v)?,
            "lr" => self.lr = parse_one(key, v)?,
            "batch_size" => self.batch_size = parse_one(key, v)?,
            "steps" => self.steps = parse_one(key, v)?,
            "eval_interval" => self.eval_interval = parse_one(key, v)?,
            "eval_episodes" => self.eval_episodes = parse_one(key, v)?,
            "log_interval" => self.log_interval = parse_one(key, v)?,
            "seed" => self.seed = parse_one(key, v)?,
            "critic_ensemble" => self.critic_ensemble = parse_one(key, v)?,
            "q_agg" => self.q_agg = v.parse()?,
            "actor_mode" => self.actor_mode = v.parse()?,
            "actor_hidden" => self.actor_hidden = parse_list(key, v)?,
            "critic_hidden" => self.critic_hidden = parse_list(key, v)?,
            "latent_dim" => self.latent_dim = parse_one(key, v)?,
            "trace_checkpoints" => self.trace_checkpoints = parse_one(key, v)?,
            other => return Err(Error::InvalidConfig(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parses the text form on top of the defaults and validates.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", n + 1)))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Text form accepted by [`TrainConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("env", self.env.clone());
        if let Some(w) = &self.bandit_weights {
            kv("bandit_weights", join(w));
        }
        if let Some(o) = &self.bandit_offsets {
            kv("bandit_offsets", join(o));
        }
        if let Some(r) = self.bandit_radius {
            kv("bandit_radius", r.to_string());
        }
        if let Some(g) = self.bandit_gap {
            kv("bandit_gap", g.to_string());
        }
        if let Some(c) = self.bandit_curvature {
            kv("bandit_curvature", c.to_string());
        }
        kv("grid_width", self.grid_width.to_string());
        kv("dataset_size", self.dataset_size.to_string());
        kv("k", self.k.to_string());
        kv("alpha", self.alpha.to_string());
        kv("gamma", self.gamma.to_string());
        kv("tau", self.tau.to_string());
        kv("lr", self.lr.to_string());
        kv("batch_size", self.batch_size.to_string());
        kv("steps", self.steps.to_string());
        kv("eval_interval", self.eval_interval.to_string());
        kv("eval_episodes", self.eval_episodes.to_string());
        kv("log_interval", self.log_interval.to_string());
        kv("seed", self.seed.to_string());
        kv("critic_ensemble", self.critic_ensemble.to_string());
        kv("q_agg", self.q_agg.to_string());
        kv("actor_mode", self.actor_mode.to_string());
        kv("actor_hidden", join(&self.actor_hidden));
        kv("critic_hidden", join(&self.critic_hidden));
        kv("latent_dim", self.latent_dim.to_string());
        kv("trace_checkpoints", self.trace_checkpoints.to_string());
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.k == 0 {
            return bad("k must be >= 1".into());
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha {} must be >= 0", self.alpha));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma {} must lie in (0, 1)", self.gamma));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad(format!("tau {} must lie in (0, 1]", self.tau));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad(format!("lr {} must be positive", self.lr));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1".into());
        }
        if self.dataset_size == 0 {
            return bad("dataset_size must be >= 1".into());
        }
        if self.log_interval == 0 || self.eval_interval == 0 || self.eval_episodes == 0 {
            return bad("log_interval, eval_interval and eval_episodes must be >= 1".into());
        }
        if self.critic_ensemble == 0 {
            return bad("critic_ensemble must be >= 1".into());
        }
        Ok(())
    }

    /// Builds the environment described by `env` and its overrides.
    pub fn env_spec(&self) -> Result<EnvSpec> {
        let bandit = |modes: usize, weights: Vec<f64>, offsets: Vec<f64>| -> Result<EnvSpec> {
            let weights = self.bandit_weights.clone().unwrap_or(weights);
            let offsets = self.bandit_offsets.clone().unwrap_or(offsets);
            let radius = self.bandit_radius.unwrap_or(0.1);
            let gap = self.bandit_gap.unwrap_or(1.0);
            let EnvSpec::IntervalBandit(b) = make_interval_bandit(modes, radius, gap, &weights, self.seed)? else {
                unreachable!()
            };
            let b = b
                .with_curvature(self.bandit_curvature.unwrap_or(2.0))?
                .with_peak_offsets(&offsets)?;
            Ok(EnvSpec::IntervalBandit(b))
        };
        match self.env.as_str() {
            "bandit3" => bandit(3, vec![0.0, 0.0, 1.0], vec![0.0; 3]),
            "bandit2_offset" => bandit(2, vec![1.0, 0.0], vec![0.08, 0.0]),
            "gridnav" => make_grid_nav(self.grid_width, self.seed),
            other => Err(Error::InvalidConfig(format!(
                "unknown env '{other}' (bandit3 | bandit2_offset | gridnav)"
            ))),
        }
    }

    /// Behavior dataset for this run, drawn from the run seed.
    pub fn dataset(&self) -> Result<OfflineDataset> {
        generate_dataset(&self.env_spec()?, self.dataset_size, self.seed)
    }
}

/// One row of the metrics log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub step: usize,
    /// Routed BC loss `‖â^{k*} − a‖²` (pointwise: own-sample distance).
    pub bc: f64,
    /// Mean `Q(s, â^{k*})`.
    pub q_term: f64,
    pub td_loss: f64,
    /// Normalized pairwise candidate distance; absent for singleton sets.
    pub pairwise: Option<f64>,
    pub log10_centroid_div: f64,
    /// Winner counts per candidate index since the previous record.
    pub winner_hist: Vec<usize>,
    pub eval_return: Option<f64>,
    pub eval_std: Option<f64>,
    pub support_violation: Option<f64>,
}

impl MetricsRecord {
    /// CSV header. `winner_hist` is a `;`-separated count list, absent
    /// fields are empty.
    pub const CSV_HEADER: &'static str =
        "step,bc_loss,q_term,td_loss,pairwise_dist,log10_centroid_div,winner_hist,eval_return,eval_return_std,support_violation";

    pub fn to_csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        format!(
            "{},{:?},{:?},{:?},{},{:?},{},{},{},{}",
            self.step,
            self.bc,
            self.q_term,
            self.td_loss,
            opt(self.pairwise),
            self.log10_centroid_div,
            self.winner_hist.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";"),
            opt(self.eval_return),
            opt(self.eval_std),
            opt(self.support_violation),
        )
    }

    pub fn write_csv<W: std::io::Write>(records: &[MetricsRecord], mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in records {
            writeln!(w, "{}", r.to_csv_row())?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Why and where a run stopped early.
#[derive(Clone, Debug)]
pub struct Halt {
    pub step: usize,
    pub reason: String,
    /// Parameters at the most recent logged step before the failure.
    pub last_good: Checkpoint,
    /// Human-readable state dump at the failing step.
    pub diagnostics: String,
}

/// Final parameters and logs of a run.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub actor: Actor,
    pub critic: CriticEnsemble,
    pub metrics: Vec<MetricsRecord>,
    /// `(step, actor)` snapshots for tracing, including step 0.
    pub snapshots: Vec<(usize, Actor)>,
    pub halt: Option<Halt>,
}

impl TrainOutcome {
    pub fn checkpoint(&self, config: &TrainConfig) -> Checkpoint {
        checkpoint_of(&self.actor, &self.critic, config, self.metrics.last().map_or(0, |m| m.step))
    }
}

fn checkpoint_of(actor: &Actor, critic: &CriticEnsemble, config: &TrainConfig, step: usize) -> Checkpoint {
    let meta = serde_json::json!({
        "step": step,
        "state_dim": actor.state_dim(),
        "latent_dim": actor.latent_dim(),
        "action_dim": actor.action_dim(),
        "config": config,
    });
    let mut ck = Checkpoint {
        meta: meta.to_string(),
        ..Default::default()
    };
    ck.push("actor", &actor.net);
    for (i, (o, t)) in critic.online().iter().zip(critic.target()).enumerate() {
        ck.push(format!("critic{i}"), o);
        ck.push(format!("critic{i}_target"), t);
    }
    ck
}

/// One-step rollouts of `actor` with fresh prior latents drawn from the
/// evaluation stream of `seed`.
pub fn evaluate_policy(env: &EnvSpec, actor: &Actor, prior: &BallPrior, episodes: usize, seed: u64) -> Result<EvalReport> {
    let (dim, radius) = (prior.dim(), prior.radius());
    evaluate_with(env, episodes, seed, |s, rng| {
        let z = sample_ball(dim, radius, rng);
        actor.apply(s, &z)
    })
}

/// Runs the configured number of updates.
pub fn train(config: &TrainConfig, dataset: &OfflineDataset) -> Result<TrainOutcome> {
    train_with_sink(config, dataset, |_| Ok(()))
}

/// As [`train`], handing every metrics record to `sink` as soon as it is
/// produced.
pub fn train_with_sink<F>(config: &TrainConfig, dataset: &OfflineDataset, mut sink: F) -> Result<TrainOutcome>
where
    F: FnMut(&MetricsRecord) -> Result<()>,
{
    config.validate()?;
    let env = config.env_spec()?;
    let (ds, da) = (env.state_dim(), env.action_dim());
    if dataset.meta.state_dim != ds || dataset.meta.action_dim != da {
        return Err(Error::InvalidConfig(format!(
            "dataset is {}→{} but env {} is {ds}→{da}",
            dataset.meta.state_dim,
            dataset.meta.action_dim,
            env.name()
        )));
    }
    if dataset.is_empty() {
        return Err(Error::InvalidConfig("empty dataset".into()));
    }
    let seed = config.seed;
    let dz = if config.latent_dim == 0 { da } else { config.latent_dim };
    let radius = (da as f64).sqrt();

    let mut actor = Actor::new(ds, dz, da, &config.actor_hidden, &mut rng::stream(seed, streams::ACTOR_INIT))?;
    let critic_cfg = CriticConfig {
        members: config.critic_ensemble,
        hidden: config.critic_hidden.clone(),
        aggregation: config.q_agg,
        gamma: config.gamma,
        tau: config.tau,
        lr: config.lr,
    };
    let mut critic = CriticEnsemble::new(ds, da, &critic_cfg, &mut rng::stream(seed, streams::CRITIC_INIT))?;
    let mut actor_optim = AdamState::new(&actor.net, config.lr);
    let mut batch_rng = rng::stream(seed, streams::MINIBATCH);
    let mut actor_prior = BallPrior::new(dz, radius, rng::stream(seed, streams::ACTOR_LATENTS))?;
    let mut critic_prior = BallPrior::new(dz, radius, rng::stream(seed, streams::CRITIC_LATENTS))?;

    let snapshot_every = match config.trace_checkpoints {
        0 => None,
        n => Some((config.steps / n).max(1)),
    };
    let mut snapshots = Vec::new();
    if snapshot_every.is_some() {
        snapshots.push((0, actor.clone()));
    }
    let k = match config.actor_mode {
        ActorMode::Drol => config.k,
        ActorMode::Pointwise => 1,
    };
    let mut metrics = Vec::new();
    let mut hist = vec![0usize; k];
    let mut last_good = checkpoint_of(&actor, &critic, config, 0);
    let mut halt = None;

    for step in 1..=config.steps {
        let batch: Vec<_> = (0..config.batch_size)
            .map(|_| &dataset.transitions[batch_rng.random_range(0..dataset.len())])
            .collect();
        let result = (|| -> Result<(ActorLossReport, f64)> {
            let report = match config.actor_mode {
                ActorMode::Drol => drol_actor_loss(&mut actor, &critic, &batch, &mut actor_prior, k, config.alpha)?,
                ActorMode::Pointwise => pointwise_actor_loss(&mut actor, &critic, &batch, &mut actor_prior, config.alpha)?,
            };
            actor_optim.step(&mut actor.net)?;
            let td = critic.critic_update(&actor, &batch, &mut critic_prior)?;
            if !td.is_finite() {
                return Err(Error::NonFinite(format!("TD loss {td}")));
            }
            critic.update_targets()?;
            Ok((report, td))
        })();
        let (report, td) = match result {
            Ok(v) => v,
            Err(Error::NonFinite(reason)) => {
                let diagnostics = format!(
                    "step {step}: {reason}\nactor params finite: {}\ncritic params finite: {}\nlast record: {:?}",
                    actor.net.all_finite(),
                    critic.online().iter().all(|n| n.all_finite()),
                    metrics.last()
                );
                halt = Some(Halt {
                    step,
                    reason,
                    last_good: last_good.clone(),
                    diagnostics,
                });
                break;
            }
            Err(e) => return Err(e),
        };
        for &w in &report.winners {
            hist[w] += 1;
        }
        if let Some(every) = snapshot_every {
            if step % every == 0 {
                snapshots.push((step, actor.clone()));
            }
        }
        if step % config.log_interval == 0 || step == config.steps {
            let (mut pair_sum, mut div_sum) = (0.0, 0.0);
            for set in &report.candidates {
                let st = candidate_diagnostics(&set.actions, da)?;
                pair_sum += st.pairwise.unwrap_or(0.0);
                div_sum += st.centroid_divergence;
            }
            let n = report.candidates.len() as f64;
            let eval = if step % config.eval_interval == 0 || step == config.steps {
                Some(evaluate_policy(&env, &actor, &actor_prior, config.eval_episodes, seed ^ step as u64)?)
            } else {
                None
            };
            let rec = MetricsRecord {
                step,
                bc: report.bc,
                q_term: report.q_term,
                td_loss: td,
                pairwise: (k >= 2).then_some(pair_sum / n),
                log10_centroid_div: (div_sum / n).log10(),
                winner_hist: std::mem::replace(&mut hist, vec![0; k]),
                eval_return: eval.as_ref().map(|e| e.mean_return),
                eval_std: eval.as_ref().map(|e| e.std_return),
                support_violation: eval.as_ref().map(|e| e.support_violation),
            };
            sink(&rec)?;
            metrics.push(rec);
            last_good = checkpoint_of(&actor, &critic, config, step);
        }
    }
    Ok(TrainOutcome {
        actor,
        critic,
        metrics,
        snapshots,
        halt,
    })
}

/// Result of one sweep cell.
#[derive(Clone, Debug)]
pub struct SweepRun {
    pub k: usize,
    pub seed: u64,
    pub result: std::result::Result<MetricsRecord, String>,
}

/// Mean ± std of the final metrics over seeds, per K.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub k: usize,
    pub runs: usize,
    pub failures: usize,
    pub bc: (f64, f64),
    pub td_loss: (f64, f64),
    pub eval_return: (f64, f64),
    pub support_violation: (f64, f64),
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub runs: Vec<SweepRun>,
    pub rows: Vec<SweepRow>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (m, (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt())
}

impl SweepReport {
    pub const CSV_HEADER: &'static str = "k,runs,failures,bc_mean,bc_std,td_mean,td_std,return_mean,return_std,violation_mean,violation_std";

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                r.k,
                r.runs,
                r.failures,
                r.bc.0,
                r.bc.1,
                r.td_loss.0,
                r.td_loss.1,
                r.eval_return.0,
                r.eval_return.1,
                r.support_violation.0,
                r.support_violation.1
            );
        }
        s
    }
}

fn sweep_cell(base: &TrainConfig, k: usize, seed: u64) -> SweepRun {
    let mut cfg = base.clone();
    cfg.k = k;
    cfg.seed = seed;
    let result = (|| {
        let data = cfg.dataset()?;
        let out = train(&cfg, &data)?;
        if let Some(h) = out.halt {
            return Err(Error::NonFinite(format!("halted at step {}: {}", h.step, h.reason)));
        }
        out.metrics
            .last()
            .cloned()
            .ok_or_else(|| Error::InvalidConfig("run produced no metrics".into()))
    })()
    .map_err(|e| e.to_string());
    SweepRun { k, seed, result }
}

/// Trains every `(K, seed)` pair; a failing cell is recorded and the sweep
/// continues.
pub fn run_sweep(base: &TrainConfig, k_values: &[usize], seeds: &[u64]) -> SweepReport {
    let cells: Vec<(usize, u64)> = k_values
        .iter()
        .flat_map(|&k| seeds.iter().map(move |&s| (k, s)))
        .collect();
    #[cfg(feature = "parallel")]
    let runs: Vec<SweepRun> = {
        use rayon::prelude::*;
        cells.par_iter().map(|&(k, s)| sweep_cell(base, k, s)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<SweepRun> = cells.iter().map(|&(k, s)| sweep_cell(base, k, s)).collect();

    let rows = k_values
        .iter()
        .map(|&k| {
            let ok: Vec<&MetricsRecord> = runs
                .iter()
                .filter(|r| r.k == k)
                .filter_map(|r| r.result.as_ref().ok())
                .collect();
            let col = |f: fn(&MetricsRecord) -> Option<f64>| mean_std(&ok.iter().filter_map(|m| f(m)).collect::<Vec<_>>());
            SweepRow {
                k,
                runs: seeds.len(),
                failures: seeds.len() - ok.len(),
                bc: col(|m| Some(m.bc)),
                td_loss: col(|m| Some(m.td_loss)),
                eval_return: col(|m| m.eval_return),
                support_violation: col(|m| m.support_violation),
            }
        })
        .collect();
    SweepReport { runs, rows }
}
