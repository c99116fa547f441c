use super::PolicyError;

/// Generalized advantage estimates and value targets.
///
/// `last_value` bootstraps the step after the final one and is ignored when
/// the final step is terminal.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    last_value: f64,
    gamma: f64,
    gae_lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>), PolicyError> {
    let n = rewards.len();
    if values.len() != n || dones.len() != n {
        return Err(PolicyError::LengthMismatch { rewards: n, values: values.len(), dones: dones.len() });
    }
    let mut advantages = vec![0.0; n];
    let mut next_adv = 0.0;
    let mut next_value = last_value;
    for t in (0..n).rev() {
        let live = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * next_value * live - values[t];
        next_adv = delta + gamma * gae_lambda * live * next_adv;
        advantages[t] = next_adv;
        next_value = values[t];
    }
    let returns = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok((advantages, returns))
}
