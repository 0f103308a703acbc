//! Synthetic multimodal offline environments, behavior datasets and policy
//! evaluation.
//!
//! Two families are provided:
//!
//! * [`IntervalBandit`]: a single-state contextual bandit whose behavior
//!   actions are uniform over `M` disjoint intervals `[c_m − r, c_m + r]`.
//!   Inside each interval the reward is `w_m − (κ/2)(a − p_m)²` with peak
//!   `p_m = c_m + δ_m`; outside, the formula of the nearest center applies.
//! * [`GridNav`]: a 2-D point mass that must get around a central wall; the
//!   behavior policy takes either the upper or the lower corridor.

use std::io::{BufRead, Write};

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng::{self, Rng};

/// One offline sample `(s, a, r, s', done)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub r: f64,
    pub s_next: Vec<f64>,
    pub done: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalBandit {
    pub centers: Vec<f64>,
    pub radius: f64,
    pub weights: Vec<f64>,
    /// Strong-concavity constant κ of the in-mode reward.
    pub curvature: f64,
    /// Offset of each reward peak from its interval center.
    pub peak_offsets: Vec<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridNav {
    pub width: f64,
    pub start: [f64; 2],
    pub goal: [f64; 2],
    pub goal_radius: f64,
    /// Standard deviation of the behavior policy's action noise.
    pub noise: f64,
    /// Radius of each route's modal neighborhood around its velocity field.
    pub support_radius: f64,
    pub horizon: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvSpec {
    IntervalBandit(IntervalBandit),
    GridNav(GridNav),
}

/// Outcome of one environment step.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub reward: f64,
    pub next: Vec<f64>,
    pub done: bool,
}

/// Builds an `M`-interval bandit with centers spaced `gap` apart and
/// symmetric about zero. Reward curvature defaults to 2, i.e.
/// `r(a) = w_m − (a − c_m)²`.
pub fn make_interval_bandit(
    modes: usize,
    radius: f64,
    gap: f64,
    weights: &[f64],
    seed: u64,
) -> Result<EnvSpec> {
    if modes == 0 {
        return Err(Error::InvalidConfig("a bandit needs at least one mode".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidConfig(format!("interval radius {radius} must be positive")));
    }
    if !(gap > 4.0 * radius) {
        return Err(Error::InvalidConfig(format!(
            "center gap {gap} must exceed 4r = {}",
            4.0 * radius
        )));
    }
    check_dim("bandit reward weights", modes, weights.len())?;
    let mid = (modes as f64 - 1.0) / 2.0;
    let centers = (0..modes).map(|m| (m as f64 - mid) * gap).collect();
    Ok(EnvSpec::IntervalBandit(IntervalBandit {
        centers,
        radius,
        weights: weights.to_vec(),
        curvature: 2.0,
        peak_offsets: vec![0.0; modes],
        seed,
    }))
}

/// Grid navigation on `[0, width]²` around a central wall, with two corridor
/// routes from the left-middle start to the right-middle goal.
pub fn make_grid_nav(width: usize, seed: u64) -> Result<EnvSpec> {
    if width < 4 {
        return Err(Error::InvalidConfig(format!("grid width {width} must be >= 4")));
    }
    let w = width as f64;
    Ok(EnvSpec::GridNav(GridNav {
        width: w,
        start: [0.5, w / 2.0],
        goal: [w - 0.5, w / 2.0],
        goal_radius: 0.5,
        noise: 0.1,
        support_radius: 0.3,
        horizon: 4 * width,
        seed,
    }))
}

impl IntervalBandit {
    pub fn modes(&self) -> usize {
        self.centers.len()
    }

    pub fn with_curvature(mut self, curvature: f64) -> Result<Self> {
        if !(curvature > 0.0 && curvature.is_finite()) {
            return Err(Error::InvalidConfig(format!("curvature {curvature} must be positive")));
        }
        self.curvature = curvature;
        Ok(self)
    }

    /// Moves each reward peak to `c_m + offsets[m]`; peaks must stay inside
    /// their interval.
    pub fn with_peak_offsets(mut self, offsets: &[f64]) -> Result<Self> {
        check_dim("peak offsets", self.modes(), offsets.len())?;
        if offsets.iter().any(|o| o.abs() > self.radius) {
            return Err(Error::InvalidConfig("reward peaks must lie inside their intervals".into()));
        }
        self.peak_offsets = offsets.to_vec();
        Ok(self)
    }

    pub fn peak(&self, mode: usize) -> f64 {
        self.centers[mode] + self.peak_offsets[mode]
    }

    pub fn interval(&self, mode: usize) -> (f64, f64) {
        (self.centers[mode] - self.radius, self.centers[mode] + self.radius)
    }

    pub fn gap(&self) -> f64 {
        if self.centers.len() > 1 {
            self.centers[1] - self.centers[0]
        } else {
            8.0 * self.radius
        }
    }

    pub fn action_bounds(&self) -> (f64, f64) {
        let half = self.gap() / 2.0;
        (self.centers[0] - half, self.centers[self.modes() - 1] + half)
    }

    /// Index of the nearest center (lowest index on ties).
    pub fn nearest_mode(&self, a: f64) -> usize {
        let mut best = 0;
        for (m, c) in self.centers.iter().enumerate() {
            if (a - c).abs() < (a - self.centers[best]).abs() {
                best = m;
            }
        }
        best
    }

    pub fn reward(&self, a: f64) -> f64 {
        let m = self.nearest_mode(a);
        let d = a - self.peak(m);
        self.weights[m] - 0.5 * self.curvature * d * d
    }

    /// Mode whose interval contains `a`, if any.
    pub fn mode_of(&self, a: f64) -> Option<usize> {
        let m = self.nearest_mode(a);
        ((a - self.centers[m]).abs() <= self.radius).then_some(m)
    }

    pub fn best_mode(&self) -> usize {
        let mut best = 0;
        for (m, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = m;
            }
        }
        best
    }

    pub fn max_weight(&self) -> f64 {
        self.weights[self.best_mode()]
    }
}

impl GridNav {
    /// Wall occupying the middle column, leaving a corridor above and below.
    pub fn wall(&self) -> ([f64; 2], [f64; 2]) {
        let w = self.width;
        ([w / 2.0 - 0.5, 1.5], [w / 2.0 + 0.5, w - 1.5])
    }

    pub fn waypoint(&self, route: usize) -> [f64; 2] {
        let w = self.width;
        if route == 0 {
            [w / 2.0, w - 0.5]
        } else {
            [w / 2.0, 0.5]
        }
    }

    fn blocked(&self, p: &[f64]) -> bool {
        let (lo, hi) = self.wall();
        p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1]
    }

    /// Noiseless behavior velocity for `route` (0 = upper, 1 = lower).
    pub fn route_velocity(&self, s: &[f64], route: usize) -> Vec<f64> {
        let target = if s[0] < self.width / 2.0 {
            self.waypoint(route)
        } else {
            self.goal
        };
        let d = [target[0] - s[0], target[1] - s[1]];
        let dist = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if dist == 0.0 {
            return vec![0.0, 0.0];
        }
        let speed = dist.min(1.0);
        vec![d[0] / dist * speed, d[1] / dist * speed]
    }

    pub fn distance_to_goal(&self, p: &[f64]) -> f64 {
        ((p[0] - self.goal[0]).powi(2) + (p[1] - self.goal[1]).powi(2)).sqrt()
    }
}

impl EnvSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EnvSpec::IntervalBandit(_) => "interval_bandit",
            EnvSpec::GridNav(_) => "grid_nav",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            EnvSpec::IntervalBandit(b) => b.seed,
            EnvSpec::GridNav(g) => g.seed,
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            EnvSpec::IntervalBandit(_) => 1,
            EnvSpec::GridNav(_) => 2,
        }
    }

    pub fn action_dim(&self) -> usize {
        match self {
            EnvSpec::IntervalBandit(_) => 1,
            EnvSpec::GridNav(_) => 2,
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            EnvSpec::IntervalBandit(_) => 1,
            EnvSpec::GridNav(g) => g.horizon,
        }
    }

    /// Number of behavior modes (intervals or routes).
    pub fn modes(&self) -> usize {
        match self {
            EnvSpec::IntervalBandit(b) => b.modes(),
            EnvSpec::GridNav(_) => 2,
        }
    }

    pub fn action_bounds(&self) -> Vec<(f64, f64)> {
        match self {
            EnvSpec::IntervalBandit(b) => vec![b.action_bounds()],
            EnvSpec::GridNav(_) => vec![(-1.0, 1.0); 2],
        }
    }

    pub fn clip_action(&self, a: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(self.action_bounds())
            .map(|(v, (lo, hi))| v.clamp(lo, hi))
            .collect()
    }

    pub fn initial_state(&self) -> Vec<f64> {
        match self {
            EnvSpec::IntervalBandit(_) => vec![0.0],
            EnvSpec::GridNav(g) => g.start.to_vec(),
        }
    }

    pub fn step(&self, s: &[f64], a: &[f64]) -> Result<Step> {
        check_dim("env state", self.state_dim(), s.len())?;
        check_dim("env action", self.action_dim(), a.len())?;
        let a = self.clip_action(a);
        Ok(match self {
            EnvSpec::IntervalBandit(b) => Step {
                reward: b.reward(a[0]),
                next: s.to_vec(),
                done: true,
            },
            EnvSpec::GridNav(g) => {
                let mut next = vec![
                    (s[0] + a[0]).clamp(0.0, g.width),
                    (s[1] + a[1]).clamp(0.0, g.width),
                ];
                if g.blocked(&next) {
                    next = s.to_vec();
                }
                let dist = g.distance_to_goal(&next);
                Step {
                    reward: -dist,
                    done: dist <= g.goal_radius,
                    next,
                }
            }
        })
    }

    /// Modal neighborhood containing `a` at state `s`, if any.
    pub fn mode_of(&self, s: &[f64], a: &[f64]) -> Option<usize> {
        match self {
            EnvSpec::IntervalBandit(b) => b.mode_of(a[0]),
            EnvSpec::GridNav(g) => (0..2).find(|&m| {
                let v = g.route_velocity(s, m);
                let d2 = (a[0] - v[0]).powi(2) + (a[1] - v[1]).powi(2);
                d2 <= g.support_radius * g.support_radius
            }),
        }
    }

    /// Samples a behavior action for `mode` at `s`.
    pub fn behavior_action(&self, s: &[f64], mode: usize, rng: &mut Rng) -> Vec<f64> {
        match self {
            EnvSpec::IntervalBandit(b) => {
                let (lo, hi) = b.interval(mode);
                vec![rng.random_range(lo..=hi)]
            }
            EnvSpec::GridNav(g) => {
                let v = g.route_velocity(s, mode);
                let noisy: Vec<f64> = v
                    .iter()
                    .map(|x| x + g.noise * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                self.clip_action(&noisy)
            }
        }
    }
}

/// Header metadata of a dataset. `labels` holds the generating mode of each
/// transition; it is for diagnostics and never reaches the learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub env: EnvSpec,
    pub state_dim: usize,
    pub action_dim: usize,
    pub n: usize,
    pub seed: u64,
    pub labels: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OfflineDataset {
    pub meta: DatasetMeta,
    pub transitions: Vec<Transition>,
}

/// Record encoding following the JSON header line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordFormat {
    Csv,
    Binary,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: RecordFormat,
    meta: DatasetMeta,
}

/// Draws `n` behavior transitions. Bandit modes are picked uniformly per
/// sample; grid-nav routes uniformly per episode.
pub fn generate_dataset(env: &EnvSpec, n: usize, seed: u64) -> Result<OfflineDataset> {
    if n == 0 {
        return Err(Error::InvalidConfig("dataset size must be >= 1".into()));
    }
    let mut rng = rng::stream(seed, rng::streams::DATASET);
    let mut transitions = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    'episodes: while transitions.len() < n {
        let mode = rng.random_range(0..env.modes());
        let mut s = env.initial_state();
        for _ in 0..env.horizon() {
            let a = env.behavior_action(&s, mode, &mut rng);
            let step = env.step(&s, &a)?;
            transitions.push(Transition {
                s: s.clone(),
                a,
                r: step.reward,
                s_next: step.next.clone(),
                done: step.done,
            });
            labels.push(mode);
            if transitions.len() == n {
                break 'episodes;
            }
            if step.done {
                break;
            }
            s = step.next;
        }
    }
    Ok(OfflineDataset {
        meta: DatasetMeta {
            env: env.clone(),
            state_dim: env.state_dim(),
            action_dim: env.action_dim(),
            n,
            seed,
            labels,
        },
        transitions,
    })
}

impl OfflineDataset {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    fn record_width(&self) -> usize {
        2 * self.meta.state_dim + self.meta.action_dim + 2
    }

    pub fn write<W: Write>(&self, mut w: W, format: RecordFormat) -> Result<()> {
        let header = Header {
            format,
            meta: self.meta.clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for t in &self.transitions {
            match format {
                RecordFormat::Csv => {
                    let fields: Vec<String> = t
                        .s
                        .iter()
                        .chain(&t.a)
                        .chain(std::iter::once(&t.r))
                        .chain(&t.s_next)
                        .map(|v| format!("{v:?}"))
                        .chain(std::iter::once(u8::from(t.done).to_string()))
                        .collect();
                    writeln!(w, "{}", fields.join(","))?;
                }
                RecordFormat::Binary => {
                    for v in t.s.iter().chain(&t.a).chain(std::iter::once(&t.r)).chain(&t.s_next) {
                        w.write_all(&v.to_le_bytes())?;
                    }
                    w.write_all(&[u8::from(t.done)])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(mut r: R) -> Result<Self> {
        let mut line = String::new();
        r.read_line(&mut line)?;
        let header: Header = serde_json::from_str(line.trim_end())?;
        let meta = header.meta;
        let (ds, da) = (meta.state_dim, meta.action_dim);
        let mut transitions = Vec::with_capacity(meta.n);
        let split = |vals: &[f64], done: bool| Transition {
            s: vals[..ds].to_vec(),
            a: vals[ds..ds + da].to_vec(),
            r: vals[ds + da],
            s_next: vals[ds + da + 1..].to_vec(),
            done,
        };
        let numeric = 2 * ds + da + 1;
        match header.format {
            RecordFormat::Csv => {
                for (i, rec) in r.lines().enumerate() {
                    let rec = rec?;
                    if rec.is_empty() {
                        continue;
                    }
                    let fields: Vec<&str> = rec.split(',').collect();
                    if fields.len() != numeric + 1 {
                        return Err(Error::Format(format!(
                            "record {i} has {} fields, expected {}",
                            fields.len(),
                            numeric + 1
                        )));
                    }
                    let vals = fields[..numeric]
                        .iter()
                        .map(|f| {
                            f.parse::<f64>()
                                .map_err(|e| Error::Format(format!("record {i}: {e}")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let done = match fields[numeric] {
                        "0" => false,
                        "1" => true,
                        other => {
                            return Err(Error::Format(format!("record {i}: bad done flag {other}")))
                        }
                    };
                    transitions.push(split(&vals, done));
                }
            }
            RecordFormat::Binary => {
                let mut buf = Vec::new();
                r.read_to_end(&mut buf)?;
                let width = numeric * 8 + 1;
                if buf.len() % width != 0 {
                    return Err(Error::Format(format!(
                        "binary payload of {} bytes is not a multiple of the {width}-byte record",
                        buf.len()
                    )));
                }
                for rec in buf.chunks_exact(width) {
                    let vals: Vec<f64> = rec[..numeric * 8]
                        .chunks_exact(8)
                        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                        .collect();
                    let done = match rec[numeric * 8] {
                        0 => false,
                        1 => true,
                        other => return Err(Error::Format(format!("bad done byte {other}"))),
                    };
                    transitions.push(split(&vals, done));
                }
            }
        }
        if transitions.len() != meta.n {
            return Err(Error::Format(format!(
                "header announces {} records, found {}",
                meta.n,
                transitions.len()
            )));
        }
        let ds = Self { meta, transitions };
        debug_assert_eq!(ds.record_width(), numeric + 1);
        Ok(ds)
    }

    pub fn save(&self, path: &std::path::Path, format: RecordFormat) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write(std::io::BufWriter::new(f), format)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(f))
    }
}

/// Summary of evaluation rollouts.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub mean_return: f64,
    pub std_return: f64,
    /// Fraction of executed actions outside every modal neighborhood.
    pub support_violation: f64,
    pub episodes: usize,
}

/// Rolls out `policy(state, rng)` for `episodes` episodes. Actions are
/// clipped to the action bounds before execution.
pub fn evaluate_with<P>(env: &EnvSpec, episodes: usize, seed: u64, mut policy: P) -> Result<EvalReport>
where
    P: FnMut(&[f64], &mut Rng) -> Result<Vec<f64>>,
{
    if episodes == 0 {
        return Err(Error::InvalidConfig("evaluation needs at least one episode".into()));
    }
    let mut rng = rng::stream(seed, rng::streams::EVAL);
    let mut returns = Vec::with_capacity(episodes);
    let (mut actions, mut violations) = (0usize, 0usize);
    for _ in 0..episodes {
        let mut s = env.initial_state();
        let mut ret = 0.0;
        for _ in 0..env.horizon() {
            let a = env.clip_action(&policy(&s, &mut rng)?);
            actions += 1;
            if env.mode_of(&s, &a).is_none() {
                violations += 1;
            }
            let step = env.step(&s, &a)?;
            ret += step.reward;
            if step.done {
                break;
            }
            s = step.next;
        }
        returns.push(ret);
    }
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    Ok(EvalReport {
        mean_return: mean,
        std_return: var.sqrt(),
        support_violation: violations as f64 / actions as f64,
        episodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bandit3() -> IntervalBandit {
        match make_interval_bandit(3, 0.1, 1.0, &[0.0, 0.0, 1.0], 0).unwrap() {
            EnvSpec::IntervalBandit(b) => b,
            _ => unreachable!(),
        }
    }

    #[test]
    fn separation_is_enforced() {
        assert!(make_interval_bandit(2, 0.25, 1.0, &[0.0, 1.0], 0).is_err());
        assert!(make_interval_bandit(2, 0.24, 1.0, &[0.0, 1.0], 0).is_ok());
        assert!(make_interval_bandit(2, 0.1, 1.0, &[0.0], 0).is_err());
        assert!(make_interval_bandit(0, 0.1, 1.0, &[], 0).is_err());
    }

    #[test]
    fn unimodal_optimum_is_the_center() {
        let env = make_interval_bandit(1, 0.2, 1.0, &[0.7], 0).unwrap();
        let EnvSpec::IntervalBandit(b) = &env else { unreachable!() };
        assert_eq!(b.centers, vec![0.0]);
        assert_eq!(b.reward(0.0), 0.7);
        assert!(b.reward(0.05) < 0.7 && b.reward(-0.05) < 0.7);
    }

    #[test]
    fn three_mode_layout() {
        let b = bandit3();
        assert_eq!(b.centers, vec![-1.0, 0.0, 1.0]);
        assert_eq!(b.best_mode(), 2);
        assert_eq!(b.reward(1.0), 1.0);
        assert!((b.reward(0.9) - (1.0 - 0.01)).abs() < 1e-12);
        assert_eq!(b.mode_of(0.95), Some(2));
        assert_eq!(b.mode_of(0.5), None);
    }

    #[test]
    fn peaks_must_stay_inside() {
        let b = bandit3();
        assert!(b.clone().with_peak_offsets(&[0.0, 0.0, 0.2]).is_err());
        let b = b.with_peak_offsets(&[0.05, 0.0, 0.0]).unwrap();
        assert_eq!(b.peak(0), -0.95);
    }

    #[test]
    fn singleton_dataset() {
        let env = EnvSpec::IntervalBandit(bandit3());
        let ds = generate_dataset(&env, 1, 3).unwrap();
        assert_eq!(ds.len(), 1);
        assert!(generate_dataset(&env, 0, 3).is_err());
    }

    #[test]
    fn bandit_actions_stay_in_support() {
        let env = EnvSpec::IntervalBandit(bandit3());
        let ds = generate_dataset(&env, 10_000, 4).unwrap();
        for (t, &label) in ds.transitions.iter().zip(&ds.meta.labels) {
            assert_eq!(env.mode_of(&t.s, &t.a), Some(label));
            assert!(t.done);
        }
    }

    #[test]
    fn grid_nav_start_at_goal_returns_zero() {
        let EnvSpec::GridNav(mut g) = make_grid_nav(8, 0).unwrap() else { unreachable!() };
        g.start = g.goal;
        let env = EnvSpec::GridNav(g);
        let rep = evaluate_with(&env, 3, 0, |_, _| Ok(vec![0.0, 0.0])).unwrap();
        assert_eq!(rep.mean_return, 0.0);
        assert_eq!(rep.std_return, 0.0);
    }

    #[test]
    fn noiseless_behavior_follows_route_field() {
        let EnvSpec::GridNav(mut g) = make_grid_nav(8, 0).unwrap() else { unreachable!() };
        g.noise = 0.0;
        let env = EnvSpec::GridNav(g.clone());
        let mut rng = rng::stream(0, 0);
        let mut s = env.initial_state();
        for _ in 0..env.horizon() {
            let a = env.behavior_action(&s, 0, &mut rng);
            assert_eq!(a, g.route_velocity(&s, 0));
            let step = env.step(&s, &a).unwrap();
            if step.done {
                return;
            }
            s = step.next;
        }
        panic!("noiseless upper route never reached the goal");
    }

    #[test]
    fn wall_blocks_motion() {
        let EnvSpec::GridNav(g) = make_grid_nav(8, 0).unwrap() else { unreachable!() };
        let env = EnvSpec::GridNav(g);
        let s = vec![3.2, 4.0];
        let step = env.step(&s, &[1.0, 0.0]).unwrap();
        assert_eq!(step.next, s);
    }

    #[test]
    fn constant_actor_has_zero_variance() {
        let env = EnvSpec::IntervalBandit(bandit3());
        let rep = evaluate_with(&env, 50, 1, |_, _| Ok(vec![1.0])).unwrap();
        assert_eq!(rep.mean_return, 1.0);
        assert_eq!(rep.std_return, 0.0);
        assert_eq!(rep.support_violation, 0.0);
    }

    #[test]
    fn csv_and_binary_headers_differ_but_records_agree() {
        let env = make_grid_nav(6, 2).unwrap();
        let ds = generate_dataset(&env, 300, 9).unwrap();
        for fmt in [RecordFormat::Csv, RecordFormat::Binary] {
            let mut buf = Vec::new();
            ds.write(&mut buf, fmt).unwrap();
            let back = OfflineDataset::read(buf.as_slice()).unwrap();
            assert_eq!(back, ds);
        }
    }

    #[test]
    fn truncated_file_is_rejected() {
        let env = EnvSpec::IntervalBandit(bandit3());
        let ds = generate_dataset(&env, 10, 9).unwrap();
        let mut buf = Vec::new();
        ds.write(&mut buf, RecordFormat::Binary).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(OfflineDataset::read(buf.as_slice()).is_err());
    }
}
