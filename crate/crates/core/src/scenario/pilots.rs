/// Balanced pilot assignment.
///
/// UEs are ranked by their strongest gain (descending, ties by index) and the
/// `r`-th ranked UE gets pilot `r mod tau_p`. With `K <= tau_p` every UE has its
/// own pilot; otherwise group sizes differ by at most one.
pub fn assign_pilots(num_ues: usize, tau_p: usize, beta: &[Vec<f64>]) -> Vec<usize> {
    assert!(tau_p >= 1, "pilot length must be positive");
    let strongest = |k: usize| beta.iter().map(|row| row[k]).fold(f64::NEG_INFINITY, f64::max);
    let mut order: Vec<usize> = (0..num_ues).collect();
    order.sort_by(|&a, &b| strongest(b).total_cmp(&strongest(a)).then(a.cmp(&b)));
    let mut pilots = vec![0; num_ues];
    for (rank, k) in order.into_iter().enumerate() {
        pilots[k] = rank % tau_p;
    }
    pilots
}

/// `P_k`: all UEs sharing UE k's pilot, including k itself, in index order.
pub fn pilot_groups(pilot_index: &[usize]) -> Vec<Vec<usize>> {
    pilot_index
        .iter()
        .map(|&p| (0..pilot_index.len()).filter(|&j| pilot_index[j] == p).collect())
        .collect()
}
