//! Q-function ensemble with target networks, trained by Bellman regression.

use std::borrow::Borrow;

use serde::{Deserialize, Serialize};

use crate::actor::Actor;
use crate::env::Transition;
use crate::error::{check_dim, Error, Result};
use crate::nn::{polyak_update, Activation, AdamState, Mlp};
use crate::prior::BallPrior;
use crate::rng::Rng;

/// Anything that scores an action at a state and can differentiate the score
/// with respect to the action.
pub trait ActionValue {
    fn value(&self, state: &[f64], action: &[f64]) -> Result<f64>;

    /// Value and `∇_a Q(s, a)`.
    fn value_and_grad(&self, state: &[f64], action: &[f64]) -> Result<(f64, Vec<f64>)>;
}

/// Closed-form critic `Q(x) = top − (m/2)‖x − peak‖²`, independent of the
/// state. `m`-strongly concave with maximizer `peak`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticCritic {
    pub peak: Vec<f64>,
    pub curvature: f64,
    pub top: f64,
}

impl ActionValue for QuadraticCritic {
    fn value(&self, _state: &[f64], action: &[f64]) -> Result<f64> {
        check_dim("quadratic critic action", self.peak.len(), action.len())?;
        let d2: f64 = action.iter().zip(&self.peak).map(|(x, p)| (x - p) * (x - p)).sum();
        Ok(self.top - 0.5 * self.curvature * d2)
    }

    fn value_and_grad(&self, state: &[f64], action: &[f64]) -> Result<(f64, Vec<f64>)> {
        let v = self.value(state, action)?;
        let g = action
            .iter()
            .zip(&self.peak)
            .map(|(x, p)| -self.curvature * (x - p))
            .collect();
        Ok((v, g))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Mean,
    Min,
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Aggregation::Mean),
            "min" => Ok(Aggregation::Min),
            other => Err(Error::InvalidConfig(format!("unknown aggregation '{other}'"))),
        }
    }
}

impl std::fmt::Display for Aggregation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Aggregation::Mean => "mean",
            Aggregation::Min => "min",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Online,
    Target,
}

/// `N` online critics, their targets and optimizers.
#[derive(Clone, Debug)]
pub struct CriticEnsemble {
    online: Vec<Mlp>,
    target: Vec<Mlp>,
    optim: Vec<AdamState>,
    pub aggregation: Aggregation,
    pub gamma: f64,
    pub tau: f64,
    state_dim: usize,
    action_dim: usize,
}

/// Hyperparameters of a critic ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticConfig {
    pub members: usize,
    pub hidden: Vec<usize>,
    pub aggregation: Aggregation,
    pub gamma: f64,
    pub tau: f64,
    pub lr: f64,
}

impl CriticEnsemble {
    /// Fresh ensemble; every target starts as a copy of its online net.
    pub fn new(state_dim: usize, action_dim: usize, cfg: &CriticConfig, rng: &mut Rng) -> Result<Self> {
        if cfg.members == 0 {
            return Err(Error::InvalidConfig("critic ensemble needs >= 1 member".into()));
        }
        let mut sizes = vec![state_dim + action_dim];
        sizes.extend_from_slice(&cfg.hidden);
        sizes.push(1);
        let online = (0..cfg.members)
            .map(|_| Mlp::new(&sizes, Activation::Gelu, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::from_nets(online, state_dim, action_dim, cfg)
    }

    pub fn from_nets(online: Vec<Mlp>, state_dim: usize, action_dim: usize, cfg: &CriticConfig) -> Result<Self> {
        if online.is_empty() {
            return Err(Error::InvalidConfig("critic ensemble needs >= 1 member".into()));
        }
        if !(cfg.gamma >= 0.0 && cfg.gamma < 1.0) {
            return Err(Error::InvalidConfig(format!("discount {} outside [0, 1)", cfg.gamma)));
        }
        if !(cfg.tau > 0.0 && cfg.tau <= 1.0) {
            return Err(Error::InvalidConfig(format!("tau {} outside (0, 1]", cfg.tau)));
        }
        for net in &online {
            check_dim("critic input", state_dim + action_dim, net.in_dim())?;
            check_dim("critic output", 1, net.out_dim())?;
        }
        Ok(Self {
            target: online.clone(),
            optim: online.iter().map(|n| AdamState::new(n, cfg.lr)).collect(),
            online,
            aggregation: cfg.aggregation,
            gamma: cfg.gamma,
            tau: cfg.tau,
            state_dim,
            action_dim,
        })
    }

    pub fn members(&self) -> usize {
        self.online.len()
    }

    pub fn online(&self) -> &[Mlp] {
        &self.online
    }

    pub fn target(&self) -> &[Mlp] {
        &self.target
    }

    /// Replaces the target nets (checkpoint restore).
    pub fn set_target(&mut self, target: Vec<Mlp>) -> Result<()> {
        if target.len() != self.online.len()
            || target.iter().zip(&self.online).any(|(t, o)| !t.same_shape(o))
        {
            return Err(Error::ShapeMismatch("target ensemble does not match online".into()));
        }
        self.target = target;
        Ok(())
    }

    fn input(&self, state: &[f64], action: &[f64]) -> Result<Vec<f64>> {
        check_dim("critic state", self.state_dim, state.len())?;
        check_dim("critic action", self.action_dim, action.len())?;
        let mut x = Vec::with_capacity(state.len() + action.len());
        x.extend_from_slice(state);
        x.extend_from_slice(action);
        Ok(x)
    }

    /// Per-member values.
    pub fn member_values(&self, state: &[f64], action: &[f64], which: Which) -> Result<Vec<f64>> {
        let x = self.input(state, action)?;
        let nets = match which {
            Which::Online => &self.online,
            Which::Target => &self.target,
        };
        nets.iter().map(|n| Ok(n.forward(&x)?[0])).collect()
    }

    fn aggregate(&self, values: &[f64]) -> (f64, usize) {
        match self.aggregation {
            Aggregation::Mean => (values.iter().sum::<f64>() / values.len() as f64, 0),
            Aggregation::Min => values
                .iter()
                .enumerate()
                .fold((f64::INFINITY, 0), |(best, bi), (i, &v)| {
                    if v < best {
                        (v, i)
                    } else {
                        (best, bi)
                    }
                }),
        }
    }

    pub fn q_value(&self, state: &[f64], action: &[f64], which: Which) -> Result<f64> {
        Ok(self.aggregate(&self.member_values(state, action, which)?).0)
    }

    /// One Bellman regression step on every member against the shared target
    /// `r + γ·(1 − done)·Q_target(s', a')`, with `a'` one actor sample.
    /// Returns the TD loss averaged over members. Targets are not moved.
    pub fn critic_update<T: Borrow<Transition>>(
        &mut self,
        actor: &Actor,
        batch: &[T],
        prior: &mut BallPrior,
    ) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::InvalidConfig("critic update on an empty batch".into()));
        }
        let mut targets = Vec::with_capacity(batch.len());
        for t in batch {
            let t = t.borrow();
            if !t.r.is_finite() {
                return Err(Error::NonFinite(format!("reward {}", t.r)));
            }
            // a' is drawn even for terminal transitions so the latent stream
            // does not depend on the done pattern.
            let z = prior.sample_one();
            let next_action = actor.apply(&t.s_next, &z)?;
            let y = if t.done {
                t.r
            } else {
                t.r + self.gamma * self.q_value(&t.s_next, &next_action, Which::Target)?
            };
            targets.push(y);
        }
        let scale = 2.0 / batch.len() as f64;
        let mut total = 0.0;
        for (net, optim) in self.online.iter_mut().zip(self.optim.iter_mut()) {
            let mut loss = 0.0;
            for (t, y) in batch.iter().zip(&targets) {
                let t = t.borrow();
                let mut x = t.s.clone();
                x.extend_from_slice(&t.a);
                let (q, tape) = net.forward_cached(&x)?;
                let err = q[0] - y;
                loss += err * err;
                net.backward(&tape, &[scale * err])?;
            }
            loss /= batch.len() as f64;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!("critic TD loss {loss}")));
            }
            optim.step(net)?;
            total += loss;
        }
        Ok(total / self.online.len() as f64)
    }

    /// TD loss of the online ensemble on `batch` with fixed next actions.
    pub fn td_loss<T: Borrow<Transition>>(&self, batch: &[T], next_actions: &[Vec<f64>]) -> Result<f64> {
        check_dim("next actions", batch.len(), next_actions.len())?;
        let mut total = 0.0;
        for m in 0..self.online.len() {
            for (t, na) in batch.iter().zip(next_actions) {
                let t = t.borrow();
                let y = if t.done {
                    t.r
                } else {
                    t.r + self.gamma * self.q_value(&t.s_next, na, Which::Target)?
                };
                let q = self.online[m].forward(&self.input(&t.s, &t.a)?)?[0];
                total += (q - y).powi(2);
            }
        }
        Ok(total / (batch.len() * self.online.len()) as f64)
    }

    /// Polyak-averages every target toward its online net.
    pub fn update_targets(&mut self) -> Result<()> {
        for (t, o) in self.target.iter_mut().zip(&self.online) {
            polyak_update(t, o, self.tau)?;
        }
        Ok(())
    }
}

impl ActionValue for CriticEnsemble {
    fn value(&self, state: &[f64], action: &[f64]) -> Result<f64> {
        self.q_value(state, action, Which::Online)
    }

    /// Gradient of the aggregated online value: the member average for
    /// `Mean`, the minimizing member for `Min`.
    fn value_and_grad(&self, state: &[f64], action: &[f64]) -> Result<(f64, Vec<f64>)> {
        let x = self.input(state, action)?;
        let mut values = Vec::with_capacity(self.online.len());
        let mut grads = Vec::with_capacity(self.online.len());
        for net in &self.online {
            let (q, tape) = net.forward_cached(&x)?;
            let gx = net.input_grad(&tape, &[1.0])?;
            values.push(q[0]);
            grads.push(gx[self.state_dim..].to_vec());
        }
        let (v, argmin) = self.aggregate(&values);
        let g = match self.aggregation {
            Aggregation::Mean => {
                let n = grads.len() as f64;
                (0..self.action_dim)
                    .map(|j| grads.iter().map(|g| g[j]).sum::<f64>() / n)
                    .collect()
            }
            Aggregation::Min => grads.swap_remove(argmin),
        };
        Ok((v, g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Layer;
    use crate::rng;

    fn constant_critic(value: f64) -> Mlp {
        Mlp::from_layers(
            vec![Layer::new(2, 1, vec![0.0, 0.0], vec![value]).unwrap()],
            Activation::Gelu,
        )
        .unwrap()
    }

    fn cfg(aggregation: Aggregation) -> CriticConfig {
        CriticConfig {
            members: 2,
            hidden: vec![16, 16],
            aggregation,
            gamma: 0.9,
            tau: 0.005,
            lr: 1e-3,
        }
    }

    #[test]
    fn single_member_aggregation_is_identity() {
        let mut c = cfg(Aggregation::Min);
        c.members = 1;
        let e = CriticEnsemble::from_nets(vec![constant_critic(2.5)], 1, 1, &c).unwrap();
        assert_eq!(e.q_value(&[0.0], &[0.0], Which::Online).unwrap(), 2.5);
    }

    #[test]
    fn mean_and_min_aggregation() {
        let nets = vec![constant_critic(1.0), constant_critic(3.0)];
        let mut e = CriticEnsemble::from_nets(nets, 1, 1, &cfg(Aggregation::Min)).unwrap();
        assert_eq!(e.q_value(&[0.0], &[0.4], Which::Online).unwrap(), 1.0);
        e.aggregation = Aggregation::Mean;
        assert_eq!(e.q_value(&[0.0], &[0.4], Which::Online).unwrap(), 2.0);
    }

    #[test]
    fn fresh_ensemble_on_zero_input_is_finite_and_targets_match() {
        let mut r = rng::stream(0, rng::streams::CRITIC_INIT);
        let e = CriticEnsemble::new(2, 1, &cfg(Aggregation::Mean), &mut r).unwrap();
        let q = e.q_value(&[0.0, 0.0], &[0.0], Which::Online).unwrap();
        // Zero biases and zero input propagate to exactly zero.
        assert_eq!(q, 0.0);
        assert_eq!(e.q_value(&[0.0, 0.0], &[0.0], Which::Target).unwrap(), q);
        let q1 = e.q_value(&[0.3, -0.2], &[0.7], Which::Online).unwrap();
        assert!(q1.is_finite());
    }

    #[test]
    fn min_gradient_follows_the_minimizing_member() {
        let lo = Mlp::from_layers(vec![Layer::new(2, 1, vec![0.0, 2.0], vec![-5.0]).unwrap()], Activation::Gelu).unwrap();
        let hi = Mlp::from_layers(vec![Layer::new(2, 1, vec![0.0, -1.0], vec![5.0]).unwrap()], Activation::Gelu).unwrap();
        let mut e = CriticEnsemble::from_nets(vec![lo, hi], 1, 1, &cfg(Aggregation::Min)).unwrap();
        let (v, g) = e.value_and_grad(&[0.0], &[0.5]).unwrap();
        assert_eq!((v, g), (-4.0, vec![2.0]));
        e.aggregation = Aggregation::Mean;
        let (v, g) = e.value_and_grad(&[0.0], &[0.5]).unwrap();
        assert_eq!((v, g), (0.25, vec![0.5]));
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let mut c = cfg(Aggregation::Mean);
        c.gamma = 1.0;
        assert!(CriticEnsemble::from_nets(vec![constant_critic(0.0)], 1, 1, &c).is_err());
        let mut c = cfg(Aggregation::Mean);
        c.tau = 0.0;
        assert!(CriticEnsemble::from_nets(vec![constant_critic(0.0)], 1, 1, &c).is_err());
        assert!(CriticEnsemble::from_nets(vec![], 1, 1, &cfg(Aggregation::Mean)).is_err());
    }

    #[test]
    fn quadratic_critic_gradient() {
        let q = QuadraticCritic { peak: vec![1.0, -1.0], curvature: 2.0, top: 3.0 };
        let (v, g) = q.value_and_grad(&[], &[0.0, 0.0]).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(g, vec![2.0, -2.0]);
    }
}
