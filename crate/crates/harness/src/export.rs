//! CSV and JSON serialization of results.
//!
//! Numbers are written with 17 significant digits ('.' decimal separator,
//! '\n' line endings), so files are byte-stable for identical inputs and
//! round-trip exactly through an f64. Every CSV is accompanied by a
//! `<stem>.manifest.json` echoing the full configuration and the code
//! version; manifests carry no volatile fields (timings go to stderr), so
//! reruns of the same config produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use arp_core::dot::STATE_NAMES;
use arp_core::dressed::DressedTrajectory;
use arp_core::dynamics::Trajectory;
use serde::Serialize;
use serde_json::json;

use crate::config::DressedConfig;
use crate::error::{HarnessError, Result};
use crate::sweep::{PointOutcome, SweepResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Output format of the data file.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(HarnessError::config(format!("unsupported format {other:?}"))),
        }
    }
}

/// 17 significant digits; round-trips any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

fn manifest_path(data_path: &Path) -> PathBuf {
    data_path.with_extension("manifest.json")
}

fn write_manifest<C: Serialize>(data_path: &Path, kind: &str, config: &C, extra: serde_json::Value) -> Result<()> {
    let manifest = json!({
        "tool": "arpsim",
        "version": VERSION,
        "kind": kind,
        "config": config,
        "summary": extra,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    write_file(&manifest_path(data_path), &(text + "\n"))
}

fn sanitize(msg: &str) -> String {
    msg.replace(['\n', '\r'], " ").replace(',', ";")
}

/// Sweep CSV: `series,<axis1>[,<axis2>],Pg,Px,Pxx,status`, row-major over
/// the axes within each series.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str("series");
    for ax in &result.config.axes {
        out.push(',');
        out.push_str(ax.param.csv_header());
    }
    out.push_str(",Pg,Px,Pxx,status\n");
    let (ns, n1, n2) = result.shape();
    for s in 0..ns {
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                out.push_str(&result.series_labels[s]);
                out.push(',');
                out.push_str(&fmt_f64(result.axis_values[0][i1]));
                if result.axis_values.len() > 1 {
                    out.push(',');
                    out.push_str(&fmt_f64(result.axis_values[1][i2]));
                }
                match result.get(s, i1, i2) {
                    PointOutcome::Ok { populations } => {
                        for v in populations {
                            out.push(',');
                            out.push_str(&fmt_f64(*v));
                        }
                        out.push_str(",ok\n");
                    }
                    PointOutcome::Failed { error } => {
                        out.push_str(",nan,nan,nan,failed: ");
                        out.push_str(&sanitize(error));
                        out.push('\n');
                    }
                }
            }
        }
    }
    out
}

pub fn export_sweep(result: &SweepResult, dir: &Path, format: Format) -> Result<PathBuf> {
    let stem = &result.config.output_stem;
    let summary = json!({
        "series": result.series_labels,
        "grid": result.axis_values.iter().map(|v| v.len()).collect::<Vec<_>>(),
        "n_points": result.points.len(),
        "n_failed": result.n_failed(),
    });
    let path = match format {
        Format::Csv => {
            let path = dir.join(format!("{stem}.csv"));
            write_file(&path, &sweep_csv(result))?;
            path
        }
        Format::Json => {
            let path = dir.join(format!("{stem}.json"));
            let doc = json!({
                "series": result.series_labels,
                "axes": result.config.axes,
                "axis_values": result.axis_values,
                "points": result.points,
            });
            write_file(&path, &(serde_json::to_string_pretty(&doc).unwrap() + "\n"))?;
            path
        }
    };
    write_manifest(&path, "sweep", &result.config, summary)?;
    Ok(path)
}

/// Trajectory CSV: `t_ps,Pg,Px,Pxx,abs_rho_gx,abs_rho_gxx,abs_rho_xxx`.
pub fn trajectory_csv(traj: &Trajectory<f64>, stride: usize) -> String {
    let stride = stride.max(1);
    let mut out = String::from("t_ps,Pg,Px,Pxx,abs_rho_gx,abs_rho_gxx,abs_rho_xxx\n");
    let last = traj.times.len() - 1;
    for k in (0..traj.times.len()).filter(|k| k % stride == 0 || *k == last) {
        out.push_str(&fmt_f64(traj.times[k]));
        for v in traj.populations[k] {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        for v in traj.coherences[k] {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        out.push('\n');
    }
    out
}

/// Write a trajectory CSV plus a final-state JSON carrying the full input
/// echo for provenance.
pub fn export_trajectory<C: Serialize>(
    traj: &Trajectory<f64>,
    config: &C,
    stem: &str,
    dir: &Path,
    format: Format,
    stride: usize,
) -> Result<PathBuf> {
    let summary = json!({
        "final_populations": traj.final_populations,
        "trace_defect": traj.trace_defect,
        "hermiticity_defect": traj.hermiticity_defect,
        "min_eigenvalue": traj.min_eigenvalue,
        "negativity_flagged": traj.negativity_flagged,
    });
    let path = match format {
        Format::Csv => {
            let path = dir.join(format!("{stem}.csv"));
            write_file(&path, &trajectory_csv(traj, stride))?;
            path
        }
        Format::Json => {
            let path = dir.join(format!("{stem}.json"));
            let stride = stride.max(1);
            let idx: Vec<usize> = (0..traj.times.len())
                .filter(|k| k % stride == 0 || *k == traj.times.len() - 1)
                .collect();
            let doc = json!({
                "t_ps": idx.iter().map(|&k| traj.times[k]).collect::<Vec<_>>(),
                "populations": idx.iter().map(|&k| traj.populations[k]).collect::<Vec<_>>(),
                "coherences": idx.iter().map(|&k| traj.coherences[k]).collect::<Vec<_>>(),
            });
            write_file(&path, &(serde_json::to_string_pretty(&doc).unwrap() + "\n"))?;
            path
        }
    };
    write_manifest(&path, "trajectory", config, summary)?;
    Ok(path)
}

/// Dressed CSV columns: series, time, three branch energies, nine
/// composition weights (branch-major), and the dominant bare character per
/// branch.
pub fn dressed_csv(series: &[(String, DressedTrajectory<f64>)], stride: usize) -> String {
    let stride = stride.max(1);
    let mut out = String::from(
        "series,t_ps,E1_meV,E2_meV,E3_meV,\
         w1_g,w1_x,w1_xx,w2_g,w2_x,w2_xx,w3_g,w3_x,w3_xx,char1,char2,char3\n",
    );
    for (label, traj) in series {
        let last = traj.times.len() - 1;
        for k in (0..traj.times.len()).filter(|k| k % stride == 0 || *k == last) {
            out.push_str(label);
            out.push(',');
            out.push_str(&fmt_f64(traj.times[k]));
            for b in 0..3 {
                out.push(',');
                out.push_str(&fmt_f64(traj.energies[k][b]));
            }
            for b in 0..3 {
                for s in 0..3 {
                    out.push(',');
                    out.push_str(&fmt_f64(traj.weights[k][b][s]));
                }
            }
            for b in 0..3 {
                out.push(',');
                out.push_str(STATE_NAMES[traj.dominant(k, b)]);
            }
            out.push('\n');
        }
    }
    out
}

fn dressed_events_json(traj: &DressedTrajectory<f64>) -> serde_json::Value {
    json!(traj
        .events
        .iter()
        .map(|e| {
            json!({
                "time_ps": e.time,
                "gap_mev": e.gap,
                "kind": match e.kind {
                    arp_core::dressed::EventKind::Crossing => "crossing",
                    arp_core::dressed::EventKind::Anticrossing => "anticrossing",
                },
                "branches": [e.branches.0, e.branches.1],
                "characters": [STATE_NAMES[e.characters.0], STATE_NAMES[e.characters.1]],
                "adiabaticity": e.adiabaticity,
            })
        })
        .collect::<Vec<_>>())
}

pub fn export_dressed(
    series: &[(String, DressedTrajectory<f64>)],
    config: &DressedConfig,
    dir: &Path,
    format: Format,
    stride: usize,
) -> Result<PathBuf> {
    let stem = &config.output_stem;
    let events: serde_json::Value = json!(series
        .iter()
        .map(|(label, t)| json!({ "series": label, "events": dressed_events_json(t) }))
        .collect::<Vec<_>>());
    let path = match format {
        Format::Csv => {
            let path = dir.join(format!("{stem}.csv"));
            write_file(&path, &dressed_csv(series, stride))?;
            path
        }
        Format::Json => {
            let path = dir.join(format!("{stem}.json"));
            let stride = stride.max(1);
            let doc: Vec<serde_json::Value> = series
                .iter()
                .map(|(label, t)| {
                    let idx: Vec<usize> = (0..t.times.len())
                        .filter(|k| k % stride == 0 || *k == t.times.len() - 1)
                        .collect();
                    json!({
                        "series": label,
                        "t_ps": idx.iter().map(|&k| t.times[k]).collect::<Vec<_>>(),
                        "energies_mev": idx.iter().map(|&k| t.energies[k]).collect::<Vec<_>>(),
                        "weights": idx.iter().map(|&k| t.weights[k]).collect::<Vec<_>>(),
                    })
                })
                .collect();
            write_file(&path, &(serde_json::to_string_pretty(&doc).unwrap() + "\n"))?;
            path
        }
    };
    write_manifest(&path, "dressed", config, events)?;
    Ok(path)
}
