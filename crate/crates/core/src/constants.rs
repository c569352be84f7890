//! Norms, growth constants and the switching error bound.
//!
//! All vector norms are L1 and all matrix norms are the operator norm induced
//! by L1 (maximum absolute column sum).

use crate::error::{Error, Result};
use crate::model::{Matrix, WideField};

pub fn l1_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn l1_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}

/// Operator norm induced by L1: the largest absolute column sum.
pub fn op_norm_l1(m: &Matrix) -> f64 {
    (0..m.dim()).map(|j| (0..m.dim()).map(|i| m.get(i, j).abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Constants of the linear growth bound `|V(x)| <= c + L|x|` shared by the
/// wide field and the switched field, together with the initial radius `r`
/// and horizon `T` they are used with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConstants {
    c: f64,
    l: f64,
    k_tilde: f64,
    r: f64,
    horizon: f64,
}

impl GrowthConstants {
    /// `lipschitz` sets both the growth slope L and the field Lipschitz constant K̃.
    pub fn new(c: f64, lipschitz: f64, r: f64, horizon: f64) -> Result<Self> {
        for (name, v) in [("c", c), ("K_tilde", lipschitz), ("r", r)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidInput(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self { c, l: lipschitz, k_tilde: lipschitz, r, horizon })
    }

    /// `c = m max_i ‖A_i‖ |Σ(b_i)|`, `K̃ = L = m max_i K ‖A_i‖ ‖W_i‖`.
    pub fn from_field(field: &WideField, r: f64, horizon: f64) -> Result<Self> {
        let m = field.width() as f64;
        let act = field.activation();
        let k = act.lipschitz();
        let mut c_max = 0.0f64;
        let mut lip_max = 0.0f64;
        for layer in field.layers() {
            let a_norm = op_norm_l1(layer.outer());
            let activated_bias: f64 = layer.bias().iter().map(|&b| act.apply(b).abs()).sum();
            c_max = c_max.max(a_norm * activated_bias);
            lip_max = lip_max.max(k * a_norm * op_norm_l1(layer.inner()));
        }
        Self::new(m * c_max, m * lip_max, r, horizon)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn k_tilde(&self) -> f64 {
        self.k_tilde
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Speed bound `X(t) = c + L (r + c t) e^{L t}` for trajectories starting in the r-ball.
    pub fn velocity_bound(&self, t: f64) -> f64 {
        self.c + self.l * (self.r + self.c * t) * (self.l * t).exp()
    }

    /// Radius `(r + c t) e^{L t}` of the ball containing every such trajectory at time `t`.
    pub fn trajectory_radius(&self, t: f64) -> f64 {
        (self.r + self.c * t) * (self.l * t).exp()
    }

    /// `C₀ = (2 T X + K̃ X T² / 2) e^{K̃ T}` with `X = X(T)`, so that the bound is `C₀ / N`.
    pub fn bound_constant(&self) -> f64 {
        let t = self.horizon;
        let x = self.velocity_bound(t);
        (2.0 * t * x + self.k_tilde * x * t * t / 2.0) * (self.k_tilde * t).exp()
    }

    /// Uniform-in-time bound on `|z(t) - y(t)|` for `N` switching periods.
    ///
    /// Evaluated as `C₀ / N`, so doubling `N` halves the result exactly.
    pub fn error_bound(&self, switches: usize) -> f64 {
        debug_assert!(switches >= 1);
        self.bound_constant() / switches as f64
    }

    /// Smallest `N >= 1` with `error_bound(N) <= eps`.
    pub fn min_switches(&self, eps: f64) -> Result<usize> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
        }
        let c0 = self.bound_constant();
        let estimate = (c0 / eps).ceil();
        if !estimate.is_finite() || estimate >= u64::MAX as f64 {
            return Err(Error::InvalidInput(format!("required switch count for eps = {eps} overflows")));
        }
        let mut n = (estimate as usize).max(1);
        // the quotient can round either way at the boundary; settle on the exact predicate
        while self.error_bound(n) > eps {
            n += 1;
        }
        while n > 1 && self.error_bound(n - 1) <= eps {
            n -= 1;
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Activation, ShallowLayer};
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn unit_gc() -> GrowthConstants {
        GrowthConstants::new(0.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm_l1(&Matrix::identity(3)), 1.0);
        let m = Matrix::from_rows(&[vec![1.0, -2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(op_norm_l1(&m), 6.0);
        assert_eq!(op_norm_l1(&Matrix::zeros(2)), 0.0);
    }

    proptest! {
        #[test]
        fn op_norm_is_max_over_basis_images(entries in proptest::collection::vec(-10.0f64..10.0, 16)) {
            let m = Matrix::from_row_major(4, entries).unwrap();
            let brute = (0..4)
                .map(|j| {
                    let mut e = vec![0.0; 4];
                    e[j] = 1.0;
                    l1_norm(&m.mul_vec(&e))
                })
                .fold(0.0, f64::max);
            prop_assert_eq!(op_norm_l1(&m), brute);
        }

        #[test]
        fn op_norm_bounds_image(entries in proptest::collection::vec(-10.0f64..10.0, 9),
                                x in proptest::collection::vec(-10.0f64..10.0, 3)) {
            let m = Matrix::from_row_major(3, entries).unwrap();
            prop_assert!(l1_norm(&m.mul_vec(&x)) <= op_norm_l1(&m) * l1_norm(&x) * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn bound_times_n_is_constant(c in 0.0f64..3.0, k in 0.0f64..6.0, r in 0.0f64..2.0,
                                     t in 0.1f64..2.0, n in 1usize..10_000) {
            let gc = GrowthConstants::new(c, k, r, t).unwrap();
            prop_assert!(gc.error_bound(n + 1) < gc.error_bound(n));
            prop_assert_eq!(gc.error_bound(2 * n), gc.error_bound(n) / 2.0);
            let rel = (n as f64 * gc.error_bound(n) - gc.bound_constant()).abs() / gc.bound_constant().max(1e-300);
            prop_assert!(rel <= 4.0 * f64::EPSILON);
        }

        #[test]
        fn min_switches_round_trip(c in 0.0f64..3.0, k in 0.0f64..6.0, r in 0.0f64..2.0,
                                   t in 0.1f64..2.0, log_eps in -6.0f64..3.0) {
            let gc = GrowthConstants::new(c, k, r, t).unwrap();
            prop_assume!(gc.bound_constant() > 0.0);
            let eps = 10f64.powf(log_eps);
            let n = gc.min_switches(eps).unwrap();
            prop_assert!(gc.error_bound(n) <= eps);
            if n > 1 {
                prop_assert!(gc.error_bound(n - 1) > eps);
            }
            let n_half = gc.min_switches(eps / 2.0).unwrap();
            prop_assert!(n_half <= 2 * n + 1);
        }

        #[test]
        fn radius_monotone_in_r(c in 0.0f64..3.0, k in 0.0f64..6.0, r in 0.0f64..2.0, dr in 0.0f64..1.0) {
            let lo = GrowthConstants::new(c, k, r, 1.0).unwrap();
            let hi = GrowthConstants::new(c, k, r + dr, 1.0).unwrap();
            prop_assert!(hi.error_bound(7) >= lo.error_bound(7));
        }
    }

    #[test]
    fn velocity_bound_examples() {
        assert!((unit_gc().velocity_bound(1.0) - E).abs() < 1e-15);
        let zero = GrowthConstants::new(0.0, 0.0, 1.0, 1.0).unwrap();
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(zero.velocity_bound(t), 0.0);
        }
        let gc = GrowthConstants::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((gc.velocity_bound(1.0) - (1.0 + E)).abs() < 1e-15);
    }

    #[test]
    fn radius_examples() {
        let still = GrowthConstants::new(0.0, 0.0, 2.0, 1.0).unwrap();
        for t in [0.0, 0.5, 1.0] {
            assert_eq!(still.trajectory_radius(t), 2.0);
        }
        assert!((unit_gc().trajectory_radius(1.0) - E).abs() < 1e-15);
    }

    #[test]
    fn error_bound_example() {
        let b = unit_gc().error_bound(10);
        assert!((b - 0.25 * E * E).abs() < 1e-14);
        assert!((b - 1.8473).abs() < 5e-5);
    }

    #[test]
    fn error_bound_without_lipschitz_part() {
        let gc = GrowthConstants::new(0.7, 0.0, 1.0, 2.0).unwrap();
        assert!((gc.error_bound(5) - 2.0 * 2.0 * 0.7 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn min_switches_examples() {
        let gc = unit_gc();
        let n = gc.min_switches(1.8473).unwrap();
        assert_eq!(n, 10);
        assert!(gc.error_bound(10) <= 1.8473 && 1.8473 < gc.error_bound(9));
        // eps equal to a computed bound returns that N
        assert_eq!(gc.min_switches(gc.error_bound(10)).unwrap(), 10);
        assert_eq!(gc.min_switches(gc.error_bound(1) * 1.5).unwrap(), 1);
        assert!(gc.min_switches(0.0).is_err());
        assert!(gc.min_switches(-1.0).is_err());
        assert!(gc.min_switches(1e-320).is_err());
    }

    #[test]
    fn zero_constant_needs_one_switch() {
        let gc = GrowthConstants::new(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(gc.min_switches(1e-12).unwrap(), 1);
    }

    #[test]
    fn constructor_validation() {
        assert!(GrowthConstants::new(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(GrowthConstants::new(0.0, f64::INFINITY, 1.0, 1.0).is_err());
        assert!(GrowthConstants::new(0.0, 1.0, -0.5, 1.0).is_err());
        assert!(GrowthConstants::new(0.0, 1.0, 1.0, 0.0).is_err());
    }

    fn layer(a: Vec<Vec<f64>>, w: Vec<Vec<f64>>, b: Vec<f64>) -> ShallowLayer {
        ShallowLayer::new(Matrix::from_rows(&a).unwrap(), Matrix::from_rows(&w).unwrap(), b).unwrap()
    }

    #[test]
    fn identity_relu_constants() {
        let field = WideField::new(vec![layer(vec![vec![1.0]], vec![vec![1.0]], vec![0.0])], Activation::Relu).unwrap();
        let gc = GrowthConstants::from_field(&field, 1.0, 1.0).unwrap();
        assert_eq!((gc.c(), gc.l(), gc.k_tilde()), (0.0, 1.0, 1.0));
    }

    #[test]
    fn two_layer_substitution() {
        // ‖A₁‖=2, ‖W₁‖=3, ‖A₂‖=‖W₂‖=1
        let l1 = layer(vec![vec![2.0, 0.0], vec![0.0, 1.0]], vec![vec![3.0, 0.0], vec![0.0, -2.0]], vec![0.0; 2]);
        let l2 = layer(vec![vec![0.5, 0.0], vec![-0.5, 1.0]], vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0; 2]);
        let field = WideField::new(vec![l1, l2], Activation::Relu).unwrap();
        let gc = GrowthConstants::from_field(&field, 1.0, 1.0).unwrap();
        assert_eq!(gc.k_tilde(), 12.0);
        assert_eq!(gc.l(), 12.0);
        assert_eq!(gc.c(), 0.0);
    }

    #[test]
    fn sigmoid_offset_uses_activated_bias() {
        // Σ(0) = 1/2 per component for sigmoid
        let field = WideField::new(
            vec![layer(vec![vec![1.0, 0.0], vec![0.0, 3.0]], vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![0.0; 2])],
            Activation::Sigmoid,
        )
        .unwrap();
        let gc = GrowthConstants::from_field(&field, 0.0, 1.0).unwrap();
        assert_eq!(gc.c(), 3.0 * 1.0);
        assert_eq!(gc.k_tilde(), 0.0);
    }

    #[test]
    fn scale_covariance_exact_for_binary_scales() {
        let field = WideField::new(
            vec![
                layer(vec![vec![0.3, -0.7], vec![0.1, 0.9]], vec![vec![0.2, 0.4], vec![-0.6, 0.5]], vec![0.3, -0.2]),
                layer(vec![vec![-0.8, 0.25], vec![0.6, -0.1]], vec![vec![0.9, -0.3], vec![0.1, 0.7]], vec![-0.5, 0.8]),
            ],
            Activation::Tanh,
        )
        .unwrap();
        let base = GrowthConstants::from_field(&field, 1.0, 1.0).unwrap();
        for s in [0.125, 0.5, 2.0, 4.0] {
            let scaled = GrowthConstants::from_field(&field.with_outer_scaled(s), 1.0, 1.0).unwrap();
            assert_eq!(scaled.c(), s * base.c());
            assert_eq!(scaled.k_tilde(), s * base.k_tilde());
        }
        for s in [0.3, 1.7, 2.9] {
            let scaled = GrowthConstants::from_field(&field.with_outer_scaled(s), 1.0, 1.0).unwrap();
            assert!((scaled.c() - s * base.c()).abs() <= 4.0 * f64::EPSILON * s * base.c());
            assert!((scaled.k_tilde() - s * base.k_tilde()).abs() <= 4.0 * f64::EPSILON * s * base.k_tilde());
        }
    }
}
