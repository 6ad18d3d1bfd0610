//! Deterministic parallel evaluation of parameter grids.
//!
//! Grid points are independent units of work; results land in pre-assigned
//! slots so the output never depends on scheduling. A failing point records
//! its error and leaves every other point untouched.

use std::time::Instant;

use arp_core::dot::DotModel;
use arp_core::dynamics::{
    propagate_correlation_expansion, propagate_dressed_rates, propagate_fewmode_exact,
    propagate_unitary, HierarchyOptions, TimeGrid,
};
use arp_core::phonon::{BathModes, PhononBath};
use arp_core::pulse::ChirpedPulse;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Propagator, SweepConfig, SweepParam};
use crate::error::{HarnessError, Result};

/// Fully resolved parameters of one grid point.
#[derive(Clone, Debug)]
pub struct ResolvedPoint {
    pub series: usize,
    pub i1: usize,
    pub i2: usize,
    pub pulse: ChirpedPulse<f64>,
    pub dot: DotModel<f64>,
    pub bath: PhononBath<f64>,
    pub propagator: Propagator,
    pub dt_ps: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointOutcome {
    Ok { populations: [f64; 3] },
    Failed { error: String },
}

impl PointOutcome {
    pub fn populations(&self) -> Option<[f64; 3]> {
        match self {
            PointOutcome::Ok { populations } => Some(*populations),
            PointOutcome::Failed { .. } => None,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, PointOutcome::Ok { .. })
    }
}

/// Grid results in row-major order (series, axis 1, axis 2).
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub series_labels: Vec<String>,
    pub axis_values: Vec<Vec<f64>>,
    pub points: Vec<PointOutcome>,
    pub wall_ms: u128,
}

impl SweepResult {
    pub fn shape(&self) -> (usize, usize, usize) {
        let n1 = self.axis_values[0].len();
        let n2 = self.axis_values.get(1).map_or(1, |v| v.len());
        (self.series_labels.len(), n1, n2)
    }

    pub fn get(&self, series: usize, i1: usize, i2: usize) -> &PointOutcome {
        let (_, n1, n2) = self.shape();
        &self.points[(series * n1 + i1) * n2 + i2]
    }

    pub fn n_failed(&self) -> usize {
        self.points.iter().filter(|p| !p.is_ok()).count()
    }
}

fn resolve_point(
    config: &SweepConfig,
    series_idx: usize,
    i1: usize,
    i2: usize,
    axis_values: &[Vec<f64>],
) -> Result<ResolvedPoint> {
    let series = &config.effective_series()[series_idx];
    let mut pulse_params = config.pulse;
    let mut bath_params = config.bath;

    let ov = &series.overrides;
    if let Some(v) = ov.gdd_ps2 {
        pulse_params.gdd_ps2 = v;
    }
    if let Some(v) = ov.theta_pi {
        pulse_params.theta_pi = v;
    }
    if let Some(v) = ov.sigma0_ps {
        pulse_params.sigma0_ps = v;
    }
    if let Some(v) = ov.detuning_mev {
        pulse_params.detuning_mev = v;
    }
    if let Some(v) = ov.temperature_k {
        bath_params.temperature_k = v;
    }

    for (k, (ax, idx)) in config.axes.iter().zip([i1, i2]).enumerate() {
        let value = axis_values[k][idx];
        match ax.param {
            SweepParam::Gdd => pulse_params.gdd_ps2 = value,
            SweepParam::ThetaNominal => pulse_params.theta_pi = value,
            SweepParam::Detuning => pulse_params.detuning_mev = value,
            SweepParam::Temperature => bath_params.temperature_k = value,
        }
    }

    Ok(ResolvedPoint {
        series: series_idx,
        i1,
        i2,
        pulse: pulse_params.build()?,
        dot: config.dot.build()?,
        bath: bath_params.build()?,
        propagator: series.propagator.clone().unwrap_or_else(|| config.propagator.clone()),
        dt_ps: config.dt_ps,
    })
}

/// Run the chosen propagator for one resolved point and return the final
/// populations.
pub fn evaluate_point(point: &ResolvedPoint) -> Result<[f64; 3]> {
    evaluate_trajectory(point).map(|t| t.final_populations)
}

/// As [`evaluate_point`] but returning the full trajectory.
pub fn evaluate_trajectory(point: &ResolvedPoint) -> Result<arp_core::Trajectory64> {
    let pulse = &point.pulse;
    let traj = match &point.propagator {
        Propagator::Unitary => {
            let dt = point.dt_ps.unwrap_or_else(|| TimeGrid::default_dt(pulse));
            let grid = TimeGrid::spanning_pulse(pulse, dt)?;
            propagate_unitary(&point.dot, pulse, &grid)?
        }
        Propagator::Hierarchy => {
            let modes = point.bath.discretize()?;
            let dt = point
                .dt_ps
                .unwrap_or_else(|| TimeGrid::default_dt_with_bath(pulse, point.bath.omega_max));
            let grid = TimeGrid::spanning_pulse(pulse, dt)?;
            propagate_correlation_expansion(
                &point.dot,
                pulse,
                &modes,
                &grid,
                &HierarchyOptions::default(),
            )?
        }
        Propagator::DressedRates => {
            let dt = point.dt_ps.unwrap_or_else(|| TimeGrid::default_dt(pulse));
            let grid = TimeGrid::spanning_pulse(pulse, dt)?;
            propagate_dressed_rates(&point.dot, pulse, &point.bath, &grid)?
        }
        Propagator::FewMode { modes, n_max } => {
            let list = BathModes::from_list(modes, point.bath.temperature);
            let omega_top =
                modes.iter().map(|m| m.0).fold(0.0f64, f64::max);
            let dt = point
                .dt_ps
                .unwrap_or_else(|| TimeGrid::default_dt_with_bath(pulse, omega_top));
            let grid = TimeGrid::spanning_pulse(pulse, dt)?;
            propagate_fewmode_exact(&point.dot, pulse, &list, *n_max, &grid)?
        }
    };
    Ok(traj)
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(config, evaluate_point)
}

/// Sweep driver with a pluggable point evaluator (used by tests to inject
/// failures).
pub fn run_sweep_with<F>(config: &SweepConfig, eval: F) -> Result<SweepResult>
where
    F: Fn(&ResolvedPoint) -> Result<[f64; 3]> + Sync,
{
    config.validate()?;
    let start = Instant::now();

    let series = config.effective_series();
    let axis_values: Vec<Vec<f64>> = config.axes.iter().map(|a| a.values()).collect();
    let n1 = axis_values[0].len();
    let n2 = axis_values.get(1).map_or(1, |v| v.len());
    let total = series.len() * n1 * n2;

    let evaluate_index = |flat: usize| -> PointOutcome {
        let s = flat / (n1 * n2);
        let i1 = (flat / n2) % n1;
        let i2 = flat % n2;
        match resolve_point(config, s, i1, i2, &axis_values).and_then(|p| eval(&p)) {
            Ok(populations) => PointOutcome::Ok { populations },
            Err(e) => PointOutcome::Failed { error: e.to_string() },
        }
    };

    let run_all = || (0..total).into_par_iter().map(evaluate_index).collect::<Vec<_>>();
    let points = match config.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| HarnessError::config(format!("worker pool: {e}")))?;
            pool.install(run_all)
        }
        None => run_all(),
    };

    if points.iter().all(|p| !p.is_ok()) {
        let first = points.iter().find_map(|p| match p {
            PointOutcome::Failed { error } => Some(error.clone()),
            _ => None,
        });
        return Err(HarnessError::SweepFailed(format!(
            "all {total} points failed; first error: {}",
            first.unwrap_or_default()
        )));
    }

    Ok(SweepResult {
        config: config.clone(),
        series_labels: series.into_iter().map(|s| s.label).collect(),
        axis_values,
        points,
        wall_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AxisSpec, BathParams, DotParams, PulseParams, SeriesSpec};

    fn unitary_config(steps: usize) -> SweepConfig {
        SweepConfig {
            axes: vec![AxisSpec {
                param: SweepParam::Detuning,
                min: -0.4,
                max: 0.4,
                steps,
            }],
            series: Vec::new(),
            pulse: PulseParams { theta_pi: 4.0, sigma0_ps: 1.62, gdd_ps2: 8.0, detuning_mev: 0.0 },
            dot: DotParams::default(),
            bath: BathParams::default(),
            propagator: Propagator::Unitary,
            dt_ps: None,
            output_stem: "test".into(),
            workers: Some(1),
        }
    }

    #[test]
    fn single_point_equals_direct_call() {
        let config = unitary_config(1);
        let res = run_sweep(&config).unwrap();
        assert_eq!(res.shape(), (1, 1, 1));
        let point = resolve_point(&config, 0, 0, 0, &res.axis_values).unwrap();
        let direct = evaluate_point(&point).unwrap();
        assert_eq!(res.get(0, 0, 0).populations().unwrap(), direct);
        let total: f64 = direct.iter().sum();
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn failing_point_does_not_corrupt_neighbors() {
        let config = unitary_config(5);
        let clean = run_sweep(&config).unwrap();
        let injected = run_sweep_with(&config, |p| {
            if p.i1 == 2 {
                Err(HarnessError::config("injected"))
            } else {
                evaluate_point(p)
            }
        })
        .unwrap();
        assert_eq!(injected.n_failed(), 1);
        for i in 0..5 {
            if i == 2 {
                assert!(!injected.get(0, i, 0).is_ok());
            } else {
                assert_eq!(injected.get(0, i, 0), clean.get(0, i, 0));
            }
        }
    }

    #[test]
    fn all_points_failed_is_an_error() {
        let config = unitary_config(3);
        let res = run_sweep_with(&config, |_| Err(HarnessError::config("boom")));
        assert!(matches!(res, Err(HarnessError::SweepFailed(_))));
    }

    #[test]
    fn series_overrides_apply() {
        let mut config = unitary_config(2);
        config.series = vec![
            SeriesSpec { label: "a".into(), propagator: None, overrides: Default::default() },
            SeriesSpec {
                label: "b".into(),
                propagator: None,
                overrides: crate::config::Overrides {
                    theta_pi: Some(0.0),
                    ..Default::default()
                },
            },
        ];
        let res = run_sweep(&config).unwrap();
        assert_eq!(res.shape(), (2, 2, 1));
        // series b has zero pulse area: stays in the ground state
        for i in 0..2 {
            let p = res.get(1, i, 0).populations().unwrap();
            assert_eq!(p[0], 1.0);
        }
        // series a actually drives the system
        assert!(res.get(0, 0, 0).populations().unwrap()[0] < 1.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut config = unitary_config(7);
        config.workers = Some(1);
        let one = run_sweep(&config).unwrap();
        config.workers = Some(4);
        let four = run_sweep(&config).unwrap();
        assert_eq!(one.points, four.points);
    }
}
