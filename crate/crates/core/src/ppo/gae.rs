/// Generalised advantage estimation over one agent's stream.
///
/// `dones[t]` marks an episode (or stream) boundary after step `t`; at a
/// boundary the successor value is `bootstrap[t]` (0 for a true terminal,
/// the critic's estimate for a truncation). Elsewhere it is `values[t+1]`.
/// The final step must be a boundary.
pub fn compute_gae(
    rewards: &[f32],
    values: &[f32],
    dones: &[bool],
    bootstrap: &[f32],
    gamma: f32,
    lambda: f32,
) -> (Vec<f32>, Vec<f32>) {
    let n = rewards.len();
    debug_assert!(values.len() == n && dones.len() == n && bootstrap.len() == n);
    debug_assert!(n == 0 || dones[n - 1], "stream must end at a boundary");
    let mut adv = vec![0.0f32; n];
    let mut running = 0.0f32;
    for t in (0..n).rev() {
        let (next_value, carry) = if dones[t] {
            (bootstrap[t], 0.0)
        } else {
            (values[t + 1], running)
        };
        let delta = rewards[t] + gamma * next_value - values[t];
        running = delta + gamma * lambda * carry;
        adv[t] = running;
    }
    let returns = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    (adv, returns)
}
