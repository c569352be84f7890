use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::l1_norm;

/// `count` points of the open L1 ball `{x : |x|₁ < r}` in dimension `dim`.
///
/// Directions are uniform on the L1 sphere and radii uniform in `[0, r)`, so
/// both the centre and the rim are exercised. `r = 0` yields copies of the
/// origin. Deterministic in `seed`.
pub fn sample_ball(r: f64, dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    if r <= 0.0 {
        return vec![vec![0.0; dim]; count];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        // normalized exponential spacings are uniform on the simplex
        let mut x: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = x.iter().sum();
        let radius = r * rng.random::<f64>();
        for v in &mut x {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            *v = sign * radius * *v / total;
        }
        // rounding can push a rim sample onto the sphere
        if l1_norm(&x) < r {
            out.push(x);
        }
    }
    out
}
