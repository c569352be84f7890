/// Observed convergence order `p` from `error ≈ C N^{-p}`.
///
/// Least-squares slope of `ln(error)` against `ln(N)`, negated, over the rows
/// whose error exceeds `noise_floor`. Returns `None` when fewer than two
/// usable rows with distinct `N` remain.
pub fn estimate_order(n_values: &[usize], errors: &[f64], noise_floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = n_values
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e.is_finite() && e > noise_floor && e > 0.0)
        .map(|(&n, &e)| ((n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let count = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    Some(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let ns = [4, 8, 16, 32, 64];
        for p in [0.5, 1.0, 2.0, 4.0] {
            let errs: Vec<f64> = ns.iter().map(|&n| 3.0 * (n as f64).powf(-p)).collect();
            assert!((estimate_order(&ns, &errs, 0.0).unwrap() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn two_points_give_the_secant_slope() {
        let ns = [10, 40];
        let errs = [0.3, 0.02];
        let secant = (0.3f64 / 0.02).ln() / 4f64.ln();
        assert!((estimate_order(&ns, &errs, 0.0).unwrap() - secant).abs() < 1e-14);
    }

    #[test]
    fn floor_rows_are_dropped() {
        let ns = [1, 2, 4, 8];
        let errs = [1.0, 0.5, 1e-12, 1e-12];
        assert!((estimate_order(&ns, &errs, 1e-8).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn undefined_when_too_few_rows() {
        assert_eq!(estimate_order(&[4, 8], &[1e-12, 1e-13], 1e-8), None);
        assert_eq!(estimate_order(&[4], &[0.1], 0.0), None);
        assert_eq!(estimate_order(&[], &[], 0.0), None);
        assert_eq!(estimate_order(&[4, 4], &[0.1, 0.2], 0.0), None);
    }
}
