//! Serializable run configuration. The JSON schema of [`SweepConfig`] is the
//! file format accepted by `arpsim sweep --config`.

use arp_core::dot::DotModel;
use arp_core::phonon::{localization_for_peak, PhononBath};
use arp_core::pulse::ChirpedPulse;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Pulse parameters; `theta_pi` is the nominal area in multiples of pi.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseParams {
    pub theta_pi: f64,
    pub sigma0_ps: f64,
    pub gdd_ps2: f64,
    pub detuning_mev: f64,
}

impl Default for PulseParams {
    fn default() -> Self {
        Self { theta_pi: 20.0, sigma0_ps: 1.62, gdd_ps2: 40.0, detuning_mev: 0.0 }
    }
}

impl PulseParams {
    pub fn build(&self) -> Result<ChirpedPulse<f64>> {
        Ok(ChirpedPulse::from_area_pi(
            self.theta_pi,
            self.sigma0_ps,
            self.gdd_ps2,
            self.detuning_mev,
        )?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DotParams {
    pub binding_energy_mev: f64,
}

impl Default for DotParams {
    fn default() -> Self {
        Self { binding_energy_mev: 4.0 }
    }
}

impl DotParams {
    pub fn build(&self) -> Result<DotModel<f64>> {
        Ok(DotModel::new(self.binding_energy_mev)?)
    }
}

/// Bath material and discretization parameters. Localization lengths default
/// to the value calibrated so the spectral density peaks at 1.2 meV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BathParams {
    pub mass_density_kg_m3: f64,
    pub sound_velocity_m_s: f64,
    pub deformation_e_ev: f64,
    pub deformation_h_ev: f64,
    pub loc_e_nm: Option<f64>,
    pub loc_h_nm: Option<f64>,
    pub temperature_k: f64,
    pub n_modes: usize,
    pub omega_max_mev: f64,
}

impl Default for BathParams {
    fn default() -> Self {
        Self {
            mass_density_kg_m3: arp_core::phonon::GAAS_MASS_DENSITY,
            sound_velocity_m_s: arp_core::phonon::GAAS_SOUND_VELOCITY,
            deformation_e_ev: arp_core::phonon::GAAS_DEFORMATION_E,
            deformation_h_ev: arp_core::phonon::GAAS_DEFORMATION_H,
            loc_e_nm: None,
            loc_h_nm: None,
            temperature_k: 1.0,
            n_modes: 128,
            omega_max_mev: 6.0,
        }
    }
}

impl BathParams {
    pub fn build(&self) -> Result<PhononBath<f64>> {
        let calibrated = localization_for_peak(1.2);
        if self.temperature_k < 0.0 {
            return Err(HarnessError::config("temperature must be >= 0"));
        }
        Ok(PhononBath {
            mass_density: self.mass_density_kg_m3,
            sound_velocity: self.sound_velocity_m_s,
            deformation_e: self.deformation_e_ev,
            deformation_h: self.deformation_h_ev,
            loc_e: self.loc_e_nm.unwrap_or(calibrated),
            loc_h: self.loc_h_nm.unwrap_or(calibrated),
            temperature: self.temperature_k,
            n_modes: self.n_modes,
            omega_max: self.omega_max_mev,
        })
    }
}

/// Propagator choice for single runs and sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Propagator {
    Unitary,
    Hierarchy,
    DressedRates,
    /// Exact few-mode oracle with an explicit mode list
    /// (energy meV, coupling 1/ps) and a quanta cutoff.
    FewMode { modes: Vec<(f64, f64)>, n_max: usize },
}

impl Propagator {
    pub fn name(&self) -> &'static str {
        match self {
            Propagator::Unitary => "unitary",
            Propagator::Hierarchy => "hierarchy",
            Propagator::DressedRates => "dressed_rates",
            Propagator::FewMode { .. } => "fewmode",
        }
    }

    /// Whether the propagator responds to the bath temperature.
    pub fn thermal(&self) -> bool {
        !matches!(self, Propagator::Unitary)
    }
}

/// Swept parameter; `theta_nominal` values are in multiples of pi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Gdd,
    ThetaNominal,
    Detuning,
    Temperature,
}

impl SweepParam {
    pub fn csv_header(&self) -> &'static str {
        match self {
            SweepParam::Gdd => "gdd_ps2",
            SweepParam::ThetaNominal => "theta_pi",
            SweepParam::Detuning => "detuning_mev",
            SweepParam::Temperature => "temperature_k",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let d = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.min + d * k as f64).collect()
    }
}

/// Per-series parameter overrides applied on top of the shared fixed
/// parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Overrides {
    pub gdd_ps2: Option<f64>,
    pub theta_pi: Option<f64>,
    pub sigma0_ps: Option<f64>,
    pub detuning_mev: Option<f64>,
    pub temperature_k: Option<f64>,
}

/// One curve of a sweep: shared axes, optionally its own propagator and
/// parameter overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub label: String,
    #[serde(default)]
    pub propagator: Option<Propagator>,
    #[serde(default)]
    pub overrides: Overrides,
}

/// Full sweep description: up to two axes, one or more series, fixed
/// parameters, propagator and output naming.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<AxisSpec>,
    #[serde(default)]
    pub series: Vec<SeriesSpec>,
    #[serde(default)]
    pub pulse: PulseParams,
    #[serde(default)]
    pub dot: DotParams,
    #[serde(default)]
    pub bath: BathParams,
    pub propagator: Propagator,
    #[serde(default)]
    pub dt_ps: Option<f64>,
    #[serde(default = "default_stem")]
    pub output_stem: String,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_stem() -> String {
    "sweep".to_string()
}

impl SweepConfig {
    /// Series list with the implicit single default series filled in.
    pub fn effective_series(&self) -> Vec<SeriesSpec> {
        if self.series.is_empty() {
            vec![SeriesSpec {
                label: "main".to_string(),
                propagator: None,
                overrides: Overrides::default(),
            }]
        } else {
            self.series.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(HarnessError::config("need 1 or 2 sweep axes"));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(HarnessError::config("sweep axes must use distinct parameters"));
        }
        for ax in &self.axes {
            if ax.steps < 1 {
                return Err(HarnessError::config("axis needs steps >= 1"));
            }
            if !(ax.min.is_finite() && ax.max.is_finite()) {
                return Err(HarnessError::config("axis bounds must be finite"));
            }
            if ax.steps > 1 && !(ax.max > ax.min) {
                return Err(HarnessError::config("axis needs max > min for steps > 1"));
            }
        }
        let series = self.effective_series();
        let mut labels = std::collections::HashSet::new();
        for s in &series {
            if !labels.insert(s.label.clone()) {
                return Err(HarnessError::config(format!("duplicate series label {}", s.label)));
            }
            let prop = s.propagator.as_ref().unwrap_or(&self.propagator);
            let sweeps_temperature =
                self.axes.iter().any(|a| a.param == SweepParam::Temperature)
                    || s.overrides.temperature_k.is_some();
            if sweeps_temperature && !prop.thermal() {
                return Err(HarnessError::config(format!(
                    "series {}: temperature is not a parameter of the {} propagator",
                    s.label,
                    prop.name()
                )));
            }
            if let Propagator::FewMode { modes, n_max } = prop {
                if modes.len() > arp_core::dynamics::fewmode::MAX_MODES
                    || *n_max > arp_core::dynamics::fewmode::MAX_QUANTA
                {
                    return Err(HarnessError::config(
                        "fewmode propagator exceeds its mode/quanta caps",
                    ));
                }
            }
        }
        if let Some(dt) = self.dt_ps {
            if !(dt > 0.0) {
                return Err(HarnessError::config("dt_ps must be > 0"));
            }
        }
        if self.output_stem.is_empty() {
            return Err(HarnessError::config("output_stem must not be empty"));
        }
        // constructors catch the remaining parameter-domain errors
        self.pulse.build()?;
        self.dot.build()?;
        self.bath.build()?;
        Ok(())
    }
}

/// Dressed-trajectory run: one pulse shape evaluated at one or more
/// detunings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DressedConfig {
    #[serde(default)]
    pub pulse: PulseParams,
    #[serde(default)]
    pub dot: DotParams,
    /// Detunings (meV); one series per entry.
    pub detunings_mev: Vec<f64>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_dressed_stem")]
    pub output_stem: String,
}

fn default_grid_points() -> usize {
    4001
}

fn default_dressed_stem() -> String {
    "dressed".to_string()
}

impl DressedConfig {
    pub fn validate(&self) -> Result<()> {
        if self.detunings_mev.is_empty() {
            return Err(HarnessError::config("need at least one detuning"));
        }
        if self.grid_points < 2 {
            return Err(HarnessError::config("grid_points must be >= 2"));
        }
        self.pulse.build()?;
        self.dot.build()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> SweepConfig {
        SweepConfig {
            axes: vec![AxisSpec { param: SweepParam::Detuning, min: -1.0, max: 1.0, steps: 5 }],
            series: Vec::new(),
            pulse: PulseParams::default(),
            dot: DotParams::default(),
            bath: BathParams::default(),
            propagator: Propagator::Unitary,
            dt_ps: None,
            output_stem: "t".into(),
            workers: None,
        }
    }

    #[test]
    fn validation_rules() {
        assert!(minimal().validate().is_ok());

        let mut c = minimal();
        c.axes.push(AxisSpec { param: SweepParam::Detuning, min: 0.0, max: 1.0, steps: 2 });
        assert!(c.validate().is_err(), "duplicate axis params");

        let mut c = minimal();
        c.axes[0].steps = 0;
        assert!(c.validate().is_err());

        let mut c = minimal();
        c.axes[0].param = SweepParam::Temperature;
        assert!(c.validate().is_err(), "temperature axis with unitary propagator");
        c.propagator = Propagator::Hierarchy;
        assert!(c.validate().is_ok());

        let mut c = minimal();
        c.pulse.sigma0_ps = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn axis_values_inclusive() {
        let ax = AxisSpec { param: SweepParam::Gdd, min: -60.0, max: 60.0, steps: 25 };
        let v = ax.values();
        assert_eq!(v.len(), 25);
        assert_eq!(v[0], -60.0);
        assert_eq!(v[24], 60.0);
        assert_eq!(v[12], 0.0);
        let single = AxisSpec { param: SweepParam::Gdd, min: 3.0, max: 9.0, steps: 1 };
        assert_eq!(single.values(), vec![3.0]);
    }

    #[test]
    fn json_round_trip() {
        let c = minimal();
        let s = serde_json::to_string_pretty(&c).unwrap();
        let back: SweepConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(c, back);
        // unknown fields rejected
        let bad = r#"{"axes": [], "propagator": "unitary", "nope": 1}"#;
        assert!(serde_json::from_str::<SweepConfig>(bad).is_err());
    }
}
