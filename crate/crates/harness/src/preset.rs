//! Named parameter bundles reproducing the simulator's reference figures.
//!
//! Occupation-map presets (`fig*`) expand to sweep configs; `dressed_*`
//! presets expand to dressed-trajectory runs. Fixed parameters: pulse area
//! 20 pi at sigma0 = 1.62 ps (intensity FWHM 2.7 ps), biexciton binding
//! 4 meV, T = 1 K, |GDD| = 40 ps² where chirped. Axis ranges are
//! documented defaults; everything is overridable through a config file.

use crate::config::{
    AxisSpec, BathParams, DotParams, DressedConfig, Overrides, Propagator, PulseParams,
    SeriesSpec, SweepConfig, SweepParam,
};
use crate::error::{HarnessError, Result};

/// A preset is either an occupation sweep or a dressed-state run.
#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    Sweep(SweepConfig),
    Dressed(DressedConfig),
}

pub const PRESET_NAMES: [&str; 7] =
    ["fig2a", "fig2b", "fig3c", "fig3f", "dressed_fig5", "dressed_fig6", "dressed_fig7"];

fn base_pulse() -> PulseParams {
    PulseParams { theta_pi: 20.0, sigma0_ps: 1.62, gdd_ps2: 40.0, detuning_mev: 0.0 }
}

fn sweep_base(stem: &str, axes: Vec<AxisSpec>, propagator: Propagator) -> SweepConfig {
    SweepConfig {
        axes,
        series: Vec::new(),
        pulse: base_pulse(),
        dot: DotParams::default(),
        bath: BathParams::default(),
        propagator,
        dt_ps: None,
        output_stem: stem.to_string(),
        workers: None,
    }
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    let p = match name {
        // chirp x area occupation map at resonance
        "fig2a" => Preset::Sweep(sweep_base(
            "fig2a",
            vec![
                AxisSpec { param: SweepParam::Gdd, min: -60.0, max: 60.0, steps: 25 },
                AxisSpec { param: SweepParam::ThetaNominal, min: 0.0, max: 25.0, steps: 21 },
            ],
            Propagator::Hierarchy,
        )),
        // detuning curves: phonon-free reference plus both chirp signs
        "fig2b" => {
            let mut c = sweep_base(
                "fig2b",
                vec![AxisSpec { param: SweepParam::Detuning, min: -1.2, max: 1.2, steps: 49 }],
                Propagator::Hierarchy,
            );
            c.series = vec![
                SeriesSpec {
                    label: "no_phonons_40".into(),
                    propagator: Some(Propagator::Unitary),
                    overrides: Overrides { gdd_ps2: Some(40.0), ..Default::default() },
                },
                SeriesSpec {
                    label: "phonons_pos40".into(),
                    propagator: None,
                    overrides: Overrides { gdd_ps2: Some(40.0), ..Default::default() },
                },
                SeriesSpec {
                    label: "phonons_neg40".into(),
                    propagator: None,
                    overrides: Overrides { gdd_ps2: Some(-40.0), ..Default::default() },
                },
            ];
            Preset::Sweep(c)
        }
        // unchirped detuning x area map (two-photon Rabi conditions)
        "fig3c" => {
            let mut c = sweep_base(
                "fig3c",
                vec![
                    AxisSpec { param: SweepParam::Detuning, min: -0.05, max: 0.35, steps: 64 },
                    AxisSpec { param: SweepParam::ThetaNominal, min: 0.0, max: 45.0, steps: 48 },
                ],
                Propagator::Hierarchy,
            );
            c.pulse.gdd_ps2 = 0.0;
            Preset::Sweep(c)
        }
        // same scan under the chirped (ARP) condition
        "fig3f" => Preset::Sweep(sweep_base(
            "fig3f",
            vec![
                AxisSpec { param: SweepParam::Detuning, min: -0.05, max: 0.35, steps: 64 },
                AxisSpec { param: SweepParam::ThetaNominal, min: 0.0, max: 25.0, steps: 48 },
            ],
            Propagator::Hierarchy,
        )),
        // resonant ARP anticrossing, with slightly detuned companions
        "dressed_fig5" => Preset::Dressed(DressedConfig {
            pulse: base_pulse(),
            dot: DotParams::default(),
            detunings_mev: vec![0.0, 0.2, -0.2],
            grid_points: 4001,
            output_stem: "dressed_fig5".into(),
        }),
        // unchirped equivalent pulse, +-1 meV
        "dressed_fig6" => Preset::Dressed(DressedConfig {
            pulse: PulseParams {
                theta_pi: 78.16,
                sigma0_ps: 24.74,
                gdd_ps2: 0.0,
                detuning_mev: 0.0,
            },
            dot: DotParams::default(),
            detunings_mev: vec![1.0, -1.0],
            grid_points: 4001,
            output_stem: "dressed_fig6".into(),
        }),
        // chirped and detuned: true crossings instead of the anticrossing
        "dressed_fig7" => Preset::Dressed(DressedConfig {
            pulse: base_pulse(),
            dot: DotParams::default(),
            detunings_mev: vec![1.0, -1.0],
            grid_points: 4001,
            output_stem: "dressed_fig7".into(),
        }),
        _ => {
            return Err(HarnessError::UnknownPreset {
                name: name.to_string(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_are_valid() {
        for name in PRESET_NAMES {
            match preset(name).unwrap() {
                Preset::Sweep(c) => c.validate().unwrap(),
                Preset::Dressed(c) => c.validate().unwrap(),
            }
        }
    }

    #[test]
    fn unknown_preset_lists_valid_names() {
        let err = preset("nope").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nope") && msg.contains("fig2b"), "{msg}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn fig2a_axes() {
        let Preset::Sweep(c) = preset("fig2a").unwrap() else { panic!() };
        assert_eq!(c.axes[0].param, SweepParam::Gdd);
        assert_eq!((c.axes[0].min, c.axes[0].max), (-60.0, 60.0));
        assert_eq!(c.axes[1].param, SweepParam::ThetaNominal);
        assert_eq!((c.axes[1].min, c.axes[1].max), (0.0, 25.0));
        assert_eq!(c.bath.temperature_k, 1.0);
        assert_eq!(c.pulse.sigma0_ps, 1.62);
    }

    #[test]
    fn fig2b_has_three_series() {
        let Preset::Sweep(c) = preset("fig2b").unwrap() else { panic!() };
        assert_eq!(c.series.len(), 3);
        assert_eq!(c.series[0].propagator, Some(Propagator::Unitary));
        assert_eq!(c.series[1].overrides.gdd_ps2, Some(40.0));
        assert_eq!(c.series[2].overrides.gdd_ps2, Some(-40.0));
    }

    #[test]
    fn dressed_fig7_parameters() {
        let Preset::Dressed(c) = preset("dressed_fig7").unwrap() else { panic!() };
        assert_eq!(c.detunings_mev, vec![1.0, -1.0]);
        assert_eq!(c.pulse.gdd_ps2, 40.0);
        assert_eq!(c.pulse.theta_pi, 20.0);
    }
}
