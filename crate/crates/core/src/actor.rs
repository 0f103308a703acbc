//! Latent-conditioned one-step actor, candidate sets, top-1 routing and the
//! two actor objectives.
//!
//! The routed objective attaches the behavior-cloning pull and the critic
//! improvement term to the nearest of `K` sampled candidates only. The
//! pointwise objective attaches both to the single sampled output.

use std::borrow::Borrow;

use crate::critic::ActionValue;
use crate::env::Transition;
use crate::error::{check_dim, Error, Result};
use crate::nn::{Activation, Mlp};
use crate::prior::BallPrior;
use crate::rng::Rng;

/// `f_θ(s, z)`: an MLP over the concatenation `[s; z]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Actor {
    pub net: Mlp,
    state_dim: usize,
    latent_dim: usize,
}

impl Actor {
    pub fn new(
        state_dim: usize,
        latent_dim: usize,
        action_dim: usize,
        hidden: &[usize],
        rng: &mut Rng,
    ) -> Result<Self> {
        let mut sizes = vec![state_dim + latent_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(action_dim);
        let net = Mlp::new(&sizes, Activation::Gelu, rng)?;
        Self::from_net(net, state_dim, latent_dim)
    }

    pub fn from_net(net: Mlp, state_dim: usize, latent_dim: usize) -> Result<Self> {
        check_dim("actor input", state_dim + latent_dim, net.in_dim())?;
        Ok(Self {
            net,
            state_dim,
            latent_dim,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn action_dim(&self) -> usize {
        self.net.out_dim()
    }

    fn input(&self, state: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        check_dim("actor state", self.state_dim, state.len())?;
        check_dim("actor latent", self.latent_dim, z.len())?;
        let mut x = Vec::with_capacity(state.len() + z.len());
        x.extend_from_slice(state);
        x.extend_from_slice(z);
        Ok(x)
    }

    pub fn apply(&self, state: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        self.net.forward(&self.input(state, z)?)
    }
}

/// `K` candidate actions generated at one state, with their latents.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    pub state: Vec<f64>,
    pub latents: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Evaluates the actor at given latents.
pub fn candidates_from_latents(actor: &Actor, state: &[f64], latents: Vec<Vec<f64>>) -> Result<CandidateSet> {
    if latents.is_empty() {
        return Err(Error::InvalidConfig("candidate budget K must be >= 1".into()));
    }
    let actions = latents
        .iter()
        .map(|z| actor.apply(state, z))
        .collect::<Result<Vec<_>>>()?;
    Ok(CandidateSet {
        state: state.to_vec(),
        latents,
        actions,
    })
}

/// Draws `k` latents from the prior and maps them through the actor.
pub fn generate_candidates(actor: &Actor, state: &[f64], prior: &mut BallPrior, k: usize) -> Result<CandidateSet> {
    if k == 0 {
        return Err(Error::InvalidConfig("candidate budget K must be >= 1".into()));
    }
    check_dim("prior dimension", actor.latent_dim(), prior.dim())?;
    candidates_from_latents(actor, state, prior.sample(k))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoutingAssignment {
    pub winner: usize,
    pub sq_dist: f64,
}

pub fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Nearest action under squared Euclidean distance; ties go to the lowest
/// index.
pub fn route_actions(actions: &[Vec<f64>], data_action: &[f64]) -> Result<RoutingAssignment> {
    let mut best: Option<RoutingAssignment> = None;
    for (k, x) in actions.iter().enumerate() {
        check_dim("candidate action", data_action.len(), x.len())?;
        let d = sq_dist(x, data_action);
        if best.is_none_or(|b| d < b.sq_dist) {
            best = Some(RoutingAssignment { winner: k, sq_dist: d });
        }
    }
    best.ok_or_else(|| Error::InvalidConfig("cannot route over an empty candidate set".into()))
}

pub fn route(candidates: &CandidateSet, data_action: &[f64]) -> Result<RoutingAssignment> {
    route_actions(&candidates.actions, data_action)
}

/// `ℓ_route(A; a)` together with its gradient with respect to every
/// candidate. Non-winners get an exact zero vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutedLoss {
    pub assignment: RoutingAssignment,
    pub q: f64,
    pub value: f64,
    pub grads: Vec<Vec<f64>>,
}

pub fn routed_loss(
    state: &[f64],
    actions: &[Vec<f64>],
    data_action: &[f64],
    alpha: f64,
    critic: &impl ActionValue,
) -> Result<RoutedLoss> {
    let assignment = route_actions(actions, data_action)?;
    let (value, q, winner_grad) = tether_loss(state, &actions[assignment.winner], data_action, alpha, critic)?;
    let grads = (0..actions.len())
        .map(|k| {
            if k == assignment.winner {
                winner_grad.clone()
            } else {
                vec![0.0; data_action.len()]
            }
        })
        .collect();
    Ok(RoutedLoss {
        assignment,
        q,
        value,
        grads,
    })
}

/// `ℓ_fix(x; a) = ‖x − a‖² − α·Q(s, x)`; returns the loss, `Q(s, x)` and
/// `∇_x ℓ_fix = 2(x − a) − α∇_x Q(s, x)`.
pub fn tether_loss(
    state: &[f64],
    x: &[f64],
    data_action: &[f64],
    alpha: f64,
    critic: &impl ActionValue,
) -> Result<(f64, f64, Vec<f64>)> {
    check_dim("tethered action", data_action.len(), x.len())?;
    let (q, dq) = if alpha == 0.0 {
        (critic.value(state, x)?, vec![0.0; x.len()])
    } else {
        critic.value_and_grad(state, x)?
    };
    let grad = x
        .iter()
        .zip(data_action)
        .zip(&dq)
        .map(|((xi, ai), gi)| 2.0 * (xi - ai) - alpha * gi)
        .collect();
    Ok((sq_dist(x, data_action) - alpha * q, q, grad))
}

/// Batch statistics of one actor pass.
#[derive(Clone, Debug, PartialEq)]
pub struct ActorLossReport {
    /// Mean `‖â^{k*} − a‖²`.
    pub bc: f64,
    /// Mean `Q(s, â^{k*})`.
    pub q_term: f64,
    /// `bc − α·q_term`.
    pub total: f64,
    pub winners: Vec<usize>,
    pub candidates: Vec<CandidateSet>,
}

fn check_batch(batch_len: usize, alpha: f64) -> Result<()> {
    if batch_len == 0 {
        return Err(Error::InvalidConfig("actor loss on an empty batch".into()));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} must be >= 0")));
    }
    Ok(())
}

/// Routed actor objective
/// `(1/B) Σ_i ‖â_i^{k*} − a_i‖² − α·Q(s_i, â_i^{k*})`.
///
/// Gradients are accumulated into `actor.net` through the winning candidate
/// of each sample only; the critic is read, never written.
pub fn drol_actor_loss<T: Borrow<Transition>>(
    actor: &mut Actor,
    critic: &impl ActionValue,
    batch: &[T],
    prior: &mut BallPrior,
    k: usize,
    alpha: f64,
) -> Result<ActorLossReport> {
    check_batch(batch.len(), alpha)?;
    let scale = 1.0 / batch.len() as f64;
    let (mut bc, mut q_sum) = (0.0, 0.0);
    let mut winners = Vec::with_capacity(batch.len());
    let mut candidates = Vec::with_capacity(batch.len());
    for t in batch {
        let t = t.borrow();
        let set = generate_candidates(actor, &t.s, prior, k)?;
        let RoutedLoss { assignment, q, .. } = routed_loss(&t.s, &set.actions, &t.a, alpha, critic)?;
        let winner = assignment.winner;
        // Replay the winner with a tape; the argmin itself is not differentiated.
        let (x, tape) = actor.net.forward_cached(&actor.input(&t.s, &set.latents[winner])?)?;
        let (_, _, grad) = tether_loss(&t.s, &x, &t.a, alpha, critic)?;
        let grad: Vec<f64> = grad.iter().map(|g| g * scale).collect();
        actor.net.backward(&tape, &grad)?;
        bc += assignment.sq_dist;
        q_sum += q;
        winners.push(winner);
        candidates.push(set);
    }
    let bc = bc * scale;
    let q_term = q_sum * scale;
    let total = bc - alpha * q_term;
    if !total.is_finite() {
        return Err(Error::NonFinite(format!(
            "actor loss {total} (bc {bc}, q {q_term}, alpha {alpha}, K {k})"
        )));
    }
    Ok(ActorLossReport {
        bc,
        q_term,
        total,
        winners,
        candidates,
    })
}

/// Pointwise-correspondence objective: each sample's single actor output is
/// tethered to its own dataset action, `(1/B) Σ_i ‖f(s_i, z_i) − a_i‖² −
/// α·Q(s_i, f(s_i, z_i))`. Same latent consumption as routing with `K = 1`.
pub fn pointwise_actor_loss<T: Borrow<Transition>>(
    actor: &mut Actor,
    critic: &impl ActionValue,
    batch: &[T],
    prior: &mut BallPrior,
    alpha: f64,
) -> Result<ActorLossReport> {
    check_batch(batch.len(), alpha)?;
    let scale = 1.0 / batch.len() as f64;
    let (mut bc, mut q_sum) = (0.0, 0.0);
    let mut candidates = Vec::with_capacity(batch.len());
    for t in batch {
        let t = t.borrow();
        check_dim("prior dimension", actor.latent_dim(), prior.dim())?;
        let z = prior.sample_one();
        let (x, tape) = actor.net.forward_cached(&actor.input(&t.s, &z)?)?;
        let (_, q, grad) = tether_loss(&t.s, &x, &t.a, alpha, critic)?;
        let grad: Vec<f64> = grad.iter().map(|g| g * scale).collect();
        actor.net.backward(&tape, &grad)?;
        bc += sq_dist(&x, &t.a);
        q_sum += q;
        candidates.push(CandidateSet {
            state: t.s.clone(),
            latents: vec![z],
            actions: vec![x],
        });
    }
    let bc = bc * scale;
    let q_term = q_sum * scale;
    let total = bc - alpha * q_term;
    if !total.is_finite() {
        return Err(Error::NonFinite(format!(
            "pointwise actor loss {total} (bc {bc}, q {q_term}, alpha {alpha})"
        )));
    }
    Ok(ActorLossReport {
        bc,
        q_term,
        total,
        winners: vec![0; batch.len()],
        candidates,
    })
}

/// One-step execution: one latent draw, one forward pass.
pub fn act(actor: &Actor, state: &[f64], prior: &mut BallPrior) -> Result<Vec<f64>> {
    check_dim("prior dimension", actor.latent_dim(), prior.dim())?;
    let z = prior.sample_one();
    actor.apply(state, &z)
}
