/// Smallest set of strongest APs whose share of the total gain reaches `delta`.
///
/// The returned indices are ordered by descending gain. Ties are broken by AP
/// index so the result is deterministic.
pub fn associate(beta_col: &[f64], delta: f64) -> Vec<usize> {
    let total: f64 = beta_col.iter().sum();
    let mut order: Vec<usize> = (0..beta_col.len()).collect();
    order.sort_by(|&a, &b| beta_col[b].total_cmp(&beta_col[a]).then(a.cmp(&b)));
    let mut acc = 0.0;
    let mut chosen = Vec::new();
    for m in order {
        chosen.push(m);
        acc += beta_col[m];
        if acc / total >= delta {
            break;
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: first prefix length whose normalized prefix sum reaches delta.
    fn prefix_oracle(beta: &[f64], delta: f64) -> usize {
        let mut sorted = beta.to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let total: f64 = beta.iter().sum();
        (1..=sorted.len())
            .find(|&n| sorted[..n].iter().sum::<f64>() / total >= delta)
            .unwrap_or(sorted.len())
    }

    #[test]
    fn full_mass_selects_everything() {
        let beta = [0.3, 0.1, 0.4, 0.2];
        let mut set = associate(&beta, 1.0);
        set.sort();
        assert_eq!(set, vec![0, 1, 2, 3]);
    }

    #[test]
    fn prefix_example() {
        assert_eq!(associate(&[0.7, 0.2, 0.1], 0.85), vec![0, 1]);
        assert_eq!(prefix_oracle(&[0.7, 0.2, 0.1], 0.85), 2);
    }

    #[test]
    fn tiny_delta_picks_strongest() {
        assert_eq!(associate(&[0.1, 0.5, 0.4], 1e-12), vec![1]);
    }

    #[test]
    fn matches_oracle_and_is_monotone() {
        let beta = [3e-11, 7e-12, 1e-13, 4e-11, 2e-12, 9e-12];
        let mut prev: Vec<usize> = Vec::new();
        for i in 1..=100 {
            let delta = i as f64 / 100.0;
            let set = associate(&beta, delta);
            assert_eq!(set.len(), prefix_oracle(&beta, delta));
            assert!(prev.iter().all(|m| set.contains(m)));
            prev = set;
        }
    }
}
