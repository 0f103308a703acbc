//! Candidate-set geometry metrics and Voronoi responsibility traces.

use serde::{Deserialize, Serialize};

use crate::actor::{candidates_from_latents, route_actions, sq_dist, Actor};
use crate::error::{Error, Result};
use crate::prior::BallPrior;

/// Spread statistics of one candidate set, normalized by the action
/// dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateStats {
    /// Mean `‖â_i − â_j‖² / d_a` over off-diagonal pairs; absent for `K < 2`.
    pub pairwise: Option<f64>,
    /// Mean `‖â_k − ā‖² / d_a`.
    pub centroid_divergence: f64,
}

pub fn candidate_diagnostics(actions: &[Vec<f64>], action_dim: usize) -> Result<CandidateStats> {
    if actions.is_empty() || action_dim == 0 {
        return Err(Error::InvalidConfig("diagnostics need a non-empty candidate set".into()));
    }
    let k = actions.len();
    let d = action_dim as f64;
    let mut centroid = vec![0.0; action_dim];
    for a in actions {
        for (c, v) in centroid.iter_mut().zip(a) {
            *c += v / k as f64;
        }
    }
    let centroid_divergence = actions.iter().map(|a| sq_dist(a, &centroid)).sum::<f64>() / (k as f64 * d);
    let pairwise = (k >= 2).then(|| {
        let mut sum = 0.0;
        for i in 0..k {
            for j in (i + 1)..k {
                sum += sq_dist(&actions[i], &actions[j]);
            }
        }
        sum / ((k * (k - 1) / 2) as f64 * d)
    });
    Ok(CandidateStats {
        pairwise,
        centroid_divergence,
    })
}

/// Mean routed BC loss of a frozen actor for each budget in `k_values`.
///
/// Every data action draws `max(k_values)` latents once and budget `K`
/// uses the first `K` of them, so the estimates share randomness and are
/// non-increasing in `K` by construction of the minimum.
pub fn frozen_probe_bc(
    actor: &Actor,
    prior: &mut BallPrior,
    states_actions: &[(Vec<f64>, Vec<f64>)],
    k_values: &[usize],
) -> Result<Vec<f64>> {
    let k_max = k_values.iter().copied().max().unwrap_or(0);
    if k_max == 0 || k_values.contains(&0) {
        return Err(Error::InvalidConfig("budgets must be >= 1".into()));
    }
    if states_actions.is_empty() {
        return Err(Error::InvalidConfig("probe needs data".into()));
    }
    let mut sums = vec![0.0; k_values.len()];
    for (s, a) in states_actions {
        let set = candidates_from_latents(actor, s, prior.sample(k_max))?;
        for (sum, &k) in sums.iter_mut().zip(k_values) {
            *sum += route_actions(&set.actions[..k], a)?.sq_dist;
        }
    }
    Ok(sums
        .into_iter()
        .map(|s| s / states_actions.len() as f64)
        .collect())
}

/// Winner of every probe action at one checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFrame {
    pub step: usize,
    pub candidates: Vec<Vec<f64>>,
    pub winners: Vec<usize>,
}

/// Routing of fixed data actions over a fixed set of probe latents at one
/// probe state, followed across training checkpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoronoiTrace {
    pub probe_state: Vec<f64>,
    pub latents: Vec<Vec<f64>>,
    pub data_actions: Vec<Vec<f64>>,
    pub frames: Vec<TraceFrame>,
}

impl VoronoiTrace {
    /// Number of (data action, consecutive checkpoint pair) events in which
    /// the winner index changed.
    pub fn handoff_events(&self) -> usize {
        self.frames
            .windows(2)
            .map(|w| {
                w[0].winners
                    .iter()
                    .zip(&w[1].winners)
                    .filter(|(a, b)| a != b)
                    .count()
            })
            .sum()
    }
}

/// Builds a trace: `k` latents are drawn once from `prior` and reused at
/// every checkpoint.
pub fn voronoi_trace(
    checkpoints: &[(usize, Actor)],
    prior: &mut BallPrior,
    k: usize,
    probe_state: &[f64],
    data_actions: &[Vec<f64>],
) -> Result<VoronoiTrace> {
    if k == 0 {
        return Err(Error::InvalidConfig("candidate budget K must be >= 1".into()));
    }
    let latents = prior.sample(k);
    let frames = checkpoints
        .iter()
        .map(|(step, actor)| {
            let set = candidates_from_latents(actor, probe_state, latents.clone())?;
            let winners = data_actions
                .iter()
                .map(|a| route_actions(&set.actions, a).map(|r| r.winner))
                .collect::<Result<Vec<_>>>()?;
            Ok(TraceFrame {
                step: *step,
                candidates: set.actions,
                winners,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VoronoiTrace {
        probe_state: probe_state.to_vec(),
        latents,
        data_actions: data_actions.to_vec(),
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn identical_candidates_have_zero_spread() {
        let s = candidate_diagnostics(&vec![vec![0.3, -1.0]; 5], 2).unwrap();
        assert_eq!(s.pairwise, Some(0.0));
        assert_eq!(s.centroid_divergence, 0.0);
    }

    #[test]
    fn two_point_hand_values() {
        let s = candidate_diagnostics(&[vec![0.0], vec![2.0]], 1).unwrap();
        assert_eq!(s.pairwise, Some(4.0));
        assert_eq!(s.centroid_divergence, 1.0);
        let single = candidate_diagnostics(&[vec![1.0]], 1).unwrap();
        assert_eq!(single.pairwise, None);
    }

    #[test]
    fn uniform_pairwise_is_twice_the_variance() {
        use rand::Rng as _;
        let mut r = rng::stream(2, 0);
        let acts: Vec<Vec<f64>> = (0..3000).map(|_| vec![r.random_range(-1.0..1.0)]).collect();
        let s = candidate_diagnostics(&acts, 1).unwrap();
        assert!((s.pairwise.unwrap() - 2.0 / 3.0).abs() < 0.03);
    }

    #[test]
    fn frozen_actor_has_no_handoffs_and_single_candidate_routes_to_zero() {
        let mut r = rng::stream(0, 0);
        let actor = Actor::new(1, 1, 1, &[8], &mut r).unwrap();
        let cps = vec![(0, actor.clone()), (10, actor.clone()), (20, actor)];
        let data = vec![vec![-1.0], vec![0.0], vec![1.0]];
        let mut prior = BallPrior::new(1, 1.0, rng::stream(0, 1)).unwrap();
        let t = voronoi_trace(&cps, &mut prior, 4, &[0.0], &data).unwrap();
        assert_eq!(t.handoff_events(), 0);
        let t1 = voronoi_trace(&cps, &mut prior, 1, &[0.0], &data).unwrap();
        assert!(t1.frames.iter().all(|f| f.winners.iter().all(|&w| w == 0)));
    }

    #[test]
    fn probe_bc_is_monotone_in_budget() {
        let mut r = rng::stream(1, 0);
        let actor = Actor::new(1, 1, 1, &[16], &mut r).unwrap();
        let data: Vec<_> = (0..200).map(|i| (vec![0.0], vec![-1.0 + i as f64 / 100.0])).collect();
        let mut prior = BallPrior::new(1, 1.0, rng::stream(1, 1)).unwrap();
        let bc = frozen_probe_bc(&actor, &mut prior, &data, &[1, 2, 4, 8]).unwrap();
        assert!(bc.windows(2).all(|w| w[1] <= w[0]), "{bc:?}");
    }
}
