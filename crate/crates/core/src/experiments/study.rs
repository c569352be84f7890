use std::io::{self, Write};

use crate::constants::{l1_distance, l1_norm, GrowthConstants};
use crate::error::{Error, Result};
use crate::integrate::{flow_map, trajectories, FlowSystem, IntegratorConfig, Trajectory};
use crate::model::{weights, SwitchSchedule, WideField};

use super::{estimate_order, sample_ball};

/// Slack allowed when comparing an integrated quantity with a theoretical bound.
pub const ORACLE_TOL: f64 = 1e-10;

/// Shared inputs of a study over one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyParams {
    /// Radius of the L1 ball the initial conditions are drawn from.
    pub r: f64,
    pub horizon: f64,
    pub samples: usize,
    pub seed: u64,
    pub cfg: IntegratorConfig,
}

impl StudyParams {
    fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::InvalidInput(format!("r must be finite and nonnegative, got {}", self.r)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidInput(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.samples == 0 {
            return Err(Error::InvalidInput("samples must be at least 1".into()));
        }
        self.cfg.validate()
    }
}

fn check_n_values(n_values: &[usize]) -> Result<()> {
    if n_values.is_empty() {
        return Err(Error::InvalidInput("N list is empty".into()));
    }
    if n_values[0] == 0 {
        return Err(Error::InvalidInput("N values must be at least 1".into()));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("N values must be strictly increasing".into()));
    }
    Ok(())
}

/// Short description identifying the field, radius, horizon and seed of a study.
pub fn instance_digest(field: &WideField, r: f64, horizon: f64, seed: u64) -> String {
    // FNV-1a over the canonical weight file
    let hash = weights::to_json_string(field)
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3));
    format!(
        "d={} m={} activation={} r={} T={} seed={} weights={:016x}",
        field.dim(),
        field.width(),
        field.activation(),
        r,
        horizon,
        seed,
        hash
    )
}

/// Terminal-error sweep over a list of switch counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub n_values: Vec<usize>,
    /// Worst L1 distance `|z(T) - y(T)|` over the sampled initial conditions.
    pub max_empirical_error: Vec<f64>,
    pub theoretical_bound: Vec<f64>,
    /// `None` when fewer than two rows lie above the noise floor.
    pub estimated_order: Option<f64>,
    pub instance_digest: String,
    pub seed: u64,
}

impl SweepReport {
    /// Rows where the measured error exceeds the bound by more than [`ORACLE_TOL`].
    pub fn violations(&self) -> usize {
        self.max_empirical_error.iter().zip(&self.theoretical_bound).filter(|(e, b)| **e > **b + ORACLE_TOL).count()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "N,max_empirical_error,theoretical_bound")?;
        for ((n, e), b) in self.n_values.iter().zip(&self.max_empirical_error).zip(&self.theoretical_bound) {
            writeln!(out, "{n},{e},{b}")?;
        }
        let order = self.estimated_order.map_or_else(|| "undefined".to_string(), |p| p.to_string());
        writeln!(out, "# estimated_order={order} seed={}", self.seed)
    }
}

/// Worst observed `value / bound` over a set of checked nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundCheck {
    pub worst_ratio: f64,
    pub nodes: usize,
    /// Nodes where the value exceeds the bound beyond integrator tolerance.
    pub violations: usize,
}

impl BoundCheck {
    fn record(&mut self, value: f64, bound: f64, slack: f64) {
        self.nodes += 1;
        let ratio = if value == 0.0 {
            0.0
        } else if bound > 0.0 {
            value / bound
        } else {
            f64::INFINITY
        };
        self.worst_ratio = self.worst_ratio.max(ratio);
        if value > bound + slack * (1.0 + bound) {
            self.violations += 1;
        }
    }

    fn merge(&mut self, other: &BoundCheck) {
        self.worst_ratio = self.worst_ratio.max(other.worst_ratio);
        self.nodes += other.nodes;
        self.violations += other.violations;
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Speed and containment checks along stored trajectory nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryBounds {
    /// `|ẋ(t)|₁` against `X(t) = c + L (r + c t) e^{L t}`.
    pub velocity: BoundCheck,
    /// `|x(t)|₁` against `(r + c t) e^{L t}`.
    pub radius: BoundCheck,
}

impl TrajectoryBounds {
    pub fn passed(&self) -> bool {
        self.velocity.passed() && self.radius.passed()
    }

    fn merge(&mut self, other: &TrajectoryBounds) {
        self.velocity.merge(&other.velocity);
        self.radius.merge(&other.radius);
    }
}

/// Outcome of [`verify_instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceReport {
    pub sweep: SweepReport,
    pub constants: GrowthConstants,
    pub bounds: TrajectoryBounds,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.sweep.violations() == 0 && self.bounds.passed()
    }
}

fn check_trajectory<F>(traj: &Trajectory, gc: &GrowthConstants, slack: f64, speed: F) -> Result<TrajectoryBounds>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let mut out = TrajectoryBounds::default();
    for (t, x) in traj.iter() {
        out.velocity.record(l1_norm(&speed(t, x)?), gc.velocity_bound(t), slack);
        out.radius.record(l1_norm(x), gc.trajectory_radius(t), slack);
    }
    Ok(out)
}

fn check_all<F>(trajs: &[Trajectory], gc: &GrowthConstants, slack: f64, speed: F) -> Result<TrajectoryBounds>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>> + Sync,
{
    use rayon::prelude::*;
    let parts = trajs.par_iter().map(|tr| check_trajectory(tr, gc, slack, &speed)).collect::<Result<Vec<_>>>()?;
    let mut total = TrajectoryBounds::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

fn run_study(field: &WideField, n_values: &[usize], params: &StudyParams, check_nodes: bool) -> Result<InstanceReport> {
    params.validate()?;
    check_n_values(n_values)?;
    let gc = GrowthConstants::from_field(field, params.r, params.horizon)?;
    let batch = sample_ball(params.r, field.dim(), params.samples, params.seed);
    let cfg = &params.cfg;
    let slack = cfg.abs_tol.max(cfg.rel_tol);
    let mut bounds = TrajectoryBounds::default();

    let wide = FlowSystem::Wide { field, horizon: params.horizon };
    let wide_end: Vec<Vec<f64>> = if check_nodes {
        let trajs = trajectories(wide, &batch, cfg)?;
        bounds.merge(&check_all(&trajs, &gc, slack, |_, x| field.eval(x))?);
        trajs.iter().map(|tr| tr.endpoint().to_vec()).collect()
    } else {
        flow_map(wide, &batch, cfg)?
    };

    let mut errors = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let schedule = SwitchSchedule::new(field.clone(), params.horizon, n)?;
        let switched = FlowSystem::Switched(&schedule);
        let ends: Vec<Vec<f64>> = if check_nodes {
            let trajs = trajectories(switched, &batch, cfg)?;
            bounds.merge(&check_all(&trajs, &gc, slack, |t, x| schedule.eval(t, x))?);
            trajs.iter().map(|tr| tr.endpoint().to_vec()).collect()
        } else {
            flow_map(switched, &batch, cfg)?
        };
        let worst = ends.iter().zip(&wide_end).map(|(z, y)| l1_distance(z, y)).fold(0.0, f64::max);
        errors.push(worst);
    }

    let sweep = SweepReport {
        n_values: n_values.to_vec(),
        theoretical_bound: n_values.iter().map(|&n| gc.error_bound(n)).collect(),
        estimated_order: estimate_order(n_values, &errors, cfg.noise_floor()),
        max_empirical_error: errors,
        instance_digest: instance_digest(field, params.r, params.horizon, params.seed),
        seed: params.seed,
    };
    Ok(InstanceReport { sweep, constants: gc, bounds })
}

/// Worst terminal L1 error `|z(T) - y(T)|` over `samples` initial conditions drawn from the r-ball.
pub fn empirical_error(field: &WideField, switches: usize, params: &StudyParams) -> Result<f64> {
    let report = run_study(field, &[switches], params, false)?;
    Ok(report.sweep.max_empirical_error[0])
}

/// Terminal errors and theoretical bounds for each `N` in `n_values`, plus the fitted order.
pub fn convergence_sweep(field: &WideField, n_values: &[usize], params: &StudyParams) -> Result<SweepReport> {
    Ok(run_study(field, n_values, params, false)?.sweep)
}

/// Checks speed and radius bounds at every stored node of the wide trajectories
/// and of the switched trajectories for each `N` in `n_values`.
pub fn verify_velocity_bound(field: &WideField, n_values: &[usize], params: &StudyParams) -> Result<TrajectoryBounds> {
    Ok(run_study(field, n_values, params, true)?.bounds)
}

/// Sweep and trajectory-bound checks in one pass over the same trajectories.
pub fn verify_instance(field: &WideField, n_values: &[usize], params: &StudyParams) -> Result<InstanceReport> {
    run_study(field, n_values, params, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{random_field, InstanceSpec};
    use crate::model::{Activation, Matrix, ShallowLayer};

    fn scalar_layer(a: f64, w: f64, b: f64) -> ShallowLayer {
        ShallowLayer::new(Matrix::from_rows(&[vec![a]]).unwrap(), Matrix::from_rows(&[vec![w]]).unwrap(), vec![b])
            .unwrap()
    }

    fn params(samples: usize, seed: u64) -> StudyParams {
        StudyParams { r: 1.0, horizon: 1.0, samples, seed, cfg: IntegratorConfig::reference() }
    }

    fn smooth_instance(seed: u64) -> WideField {
        let spec = InstanceSpec { dim: 2, width: 2, activation: Activation::Tanh, max_kt: 3.0, horizon: 1.0 };
        random_field(&spec, seed).unwrap()
    }

    #[test]
    fn single_layer_has_no_switching_error() {
        let field = random_field(
            &InstanceSpec { dim: 3, width: 1, activation: Activation::Sigmoid, max_kt: 4.0, horizon: 1.0 },
            5,
        )
        .unwrap();
        assert!(empirical_error(&field, 8, &params(10, 1)).unwrap() <= 1e-9);
    }

    #[test]
    fn constant_fields_average_exactly() {
        let field =
            WideField::new(vec![scalar_layer(1.0, 0.0, 0.3), scalar_layer(-0.7, 0.0, 0.9)], Activation::Tanh).unwrap();
        assert!(empirical_error(&field, 3, &params(10, 2)).unwrap() <= 1e-9);
    }

    #[test]
    fn doubling_n_roughly_halves_error() {
        let field = smooth_instance(11);
        let e4 = empirical_error(&field, 4, &params(20, 3)).unwrap();
        let e8 = empirical_error(&field, 8, &params(20, 3)).unwrap();
        let ratio = e4 / e8;
        assert!((1.4..=2.9).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn sweep_layout_and_order() {
        let field = smooth_instance(4);
        let ns = [4, 8, 16, 32, 64];
        let report = convergence_sweep(&field, &ns, &params(20, 9)).unwrap();
        assert_eq!(report.n_values, ns);
        assert_eq!(report.max_empirical_error.len(), 5);
        for w in report.theoretical_bound.windows(2) {
            assert_eq!(w[1], w[0] / 2.0);
        }
        assert_eq!(report.violations(), 0);
        let p = report.estimated_order.unwrap();
        assert!((0.7..=1.3).contains(&p), "order {p}");
        assert_eq!(report, convergence_sweep(&field, &ns, &params(20, 9)).unwrap());
    }

    #[test]
    fn sweep_csv_format() {
        let report = SweepReport {
            n_values: vec![1, 2],
            max_empirical_error: vec![0.5, 0.25],
            theoretical_bound: vec![4.0, 2.0],
            estimated_order: Some(1.0),
            instance_digest: String::new(),
            seed: 3,
        };
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "N,max_empirical_error,theoretical_bound\n1,0.5,4\n2,0.25,2\n# estimated_order=1 seed=3\n"
        );
        let undefined = SweepReport { estimated_order: None, ..report };
        let mut buf = Vec::new();
        undefined.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("# estimated_order=undefined seed=3\n"));
    }

    #[test]
    fn single_layer_order_undefined() {
        let field = WideField::new(vec![scalar_layer(0.5, 1.0, 0.1)], Activation::Tanh).unwrap();
        let report = convergence_sweep(&field, &[1, 2, 4], &params(5, 0)).unwrap();
        assert_eq!(report.estimated_order, None);
    }

    #[test]
    fn sweep_rejects_bad_lists() {
        let field = smooth_instance(1);
        assert!(convergence_sweep(&field, &[], &params(2, 0)).is_err());
        assert!(convergence_sweep(&field, &[4, 4], &params(2, 0)).is_err());
        assert!(convergence_sweep(&field, &[8, 4], &params(2, 0)).is_err());
        assert!(convergence_sweep(&field, &[0, 4], &params(2, 0)).is_err());
        assert!(empirical_error(&field, 4, &params(0, 0)).is_err());
    }

    #[test]
    fn zero_field_velocity_ratio_is_zero() {
        let field = WideField::new(vec![scalar_layer(0.0, 1.0, 0.5)], Activation::Sigmoid).unwrap();
        let bounds = verify_velocity_bound(&field, &[2], &params(5, 0)).unwrap();
        assert!(bounds.passed());
        assert_eq!(bounds.velocity.worst_ratio, 0.0);
    }

    #[test]
    fn linear_regime_velocity_within_bound() {
        // ẋ = x on the positive ray; bound e^t dominates x0 e^t for x0 < 1
        let field = WideField::new(vec![scalar_layer(1.0, 1.0, 0.0)], Activation::Relu).unwrap();
        let bounds = verify_velocity_bound(&field, &[1, 4], &params(50, 8)).unwrap();
        assert!(bounds.passed());
        assert!(bounds.velocity.worst_ratio <= 1.0);
        assert!(bounds.radius.worst_ratio <= 1.0);
        assert!(bounds.velocity.nodes > 100);
    }

    #[test]
    fn digest_mentions_inputs() {
        let field = smooth_instance(2);
        let d = instance_digest(&field, 1.0, 1.0, 77);
        assert!(d.contains("d=2") && d.contains("m=2") && d.contains("seed=77"));
        assert_eq!(d, instance_digest(&field, 1.0, 1.0, 77));
        assert_ne!(d, instance_digest(&smooth_instance(3), 1.0, 1.0, 77));
    }
}
