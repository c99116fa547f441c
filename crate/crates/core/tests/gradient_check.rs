//! Full PPO loss gradient against central finite differences.

use pirl_core::policy::{log_softmax, ppo_loss, LossCoefs, PolicyParams, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-5;

fn loss(params: &PolicyParams, samples: &[Sample<'_>], coefs: LossCoefs) -> f64 {
    ppo_loss(params, samples, coefs, None).total
}

fn perturbed(params: &PolicyParams, net: usize, i: usize, delta: f64) -> PolicyParams {
    let mut p = params.clone();
    let slice = if net == 0 { p.actor.params_mut() } else { p.critic.params_mut() };
    slice[i] += delta;
    p
}

#[test]
fn ppo_gradient_matches_finite_differences() {
    let coefs = LossCoefs { clip_epsilon: 0.2, value_coef: 0.5, entropy_coef: 0.01 };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _draw in 0..50 {
        let mut params = PolicyParams::new(4, &[8], 12, &mut rng);
        for p in params.actor.params_mut().iter_mut().chain(params.critic.params_mut()) {
            *p += rng.gen_range(-0.5..0.5);
        }
        let obs: Vec<Vec<f64>> = (0..16).map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let samples: Vec<Sample<'_>> = obs
            .iter()
            .map(|o| {
                let action = rng.gen_range(0..12);
                // old policy near the current one so both clip branches occur
                let (logits, _) = params.forward(o);
                let lp = log_softmax(&logits)[action];
                Sample {
                    obs: o,
                    action,
                    old_log_prob: lp + rng.gen_range(-0.4..0.4),
                    advantage: rng.gen_range(-2.0..2.0),
                    ret: rng.gen_range(-3.0..3.0),
                }
            })
            .collect();

        let mut grad = params.zero_grad();
        ppo_loss(&params, &samples, coefs, Some(&mut grad));
        let analytic: Vec<f64> = grad.actor.iter().chain(&grad.critic).copied().collect();

        let mut numeric = Vec::with_capacity(analytic.len());
        for net in 0..2 {
            let n = if net == 0 { params.actor.num_params() } else { params.critic.num_params() };
            for i in 0..n {
                let plus = perturbed(&params, net, i, H);
                let minus = perturbed(&params, net, i, -H);
                numeric.push((loss(&plus, &samples, coefs) - loss(&minus, &samples, coefs)) / (2.0 * H));
            }
        }
        let diff: f64 = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale = analytic.iter().map(|a| a * a).sum::<f64>().sqrt().max(numeric.iter().map(|b| b * b).sum::<f64>().sqrt());
        let rel = diff / scale.max(1e-12);
        worst = worst.max(rel);
    }
    assert!(worst < 1e-4, "worst relative error {worst:e}");
}
