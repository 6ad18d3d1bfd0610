//! Output determinism: identical configs must give byte-identical data files
//! regardless of worker count, and the manifest must echo the full config.

use arp_harness::config::{
    AxisSpec, BathParams, DotParams, Overrides, Propagator, PulseParams, SeriesSpec,
    SweepConfig, SweepParam,
};
use arp_harness::export::{export_sweep, Format};
use arp_harness::run_sweep;

fn small_mixed_config(workers: Option<usize>) -> SweepConfig {
    SweepConfig {
        axes: vec![AxisSpec { param: SweepParam::Detuning, min: -0.5, max: 0.5, steps: 4 }],
        series: vec![
            SeriesSpec {
                label: "free".into(),
                propagator: Some(Propagator::Unitary),
                overrides: Overrides::default(),
            },
            SeriesSpec {
                label: "phonon".into(),
                propagator: None,
                overrides: Overrides { gdd_ps2: Some(-6.0), ..Default::default() },
            },
        ],
        pulse: PulseParams { theta_pi: 4.0, sigma0_ps: 1.62, gdd_ps2: 6.0, detuning_mev: 0.0 },
        dot: DotParams::default(),
        bath: BathParams { n_modes: 8, omega_max_mev: 3.0, ..Default::default() },
        propagator: Propagator::Hierarchy,
        dt_ps: None,
        output_stem: "det".into(),
        workers,
    }
}

#[test]
fn worker_count_never_changes_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (tag, workers) in [("a", Some(1)), ("b", Some(3)), ("c", Some(7))] {
        let mut config = small_mixed_config(workers);
        config.output_stem = format!("det_{tag}");
        let result = run_sweep(&config).unwrap();
        let path = export_sweep(&result, dir.path(), Format::Csv).unwrap();
        outputs.push(std::fs::read(path).unwrap());
    }
    // stems differ only in the file name, not the contents
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn rerun_is_byte_identical_including_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_mixed_config(Some(2));
    let mut blobs = Vec::new();
    for sub in ["x", "y"] {
        let sub_dir = dir.path().join(sub);
        let result = run_sweep(&config).unwrap();
        let path = export_sweep(&result, &sub_dir, Format::Csv).unwrap();
        let manifest = path.with_extension("manifest.json");
        blobs.push((std::fs::read(path).unwrap(), std::fs::read(manifest).unwrap()));
    }
    assert_eq!(blobs[0].0, blobs[1].0, "csv bytes differ between reruns");
    assert_eq!(blobs[0].1, blobs[1].1, "manifest bytes differ between reruns");
}

#[test]
fn csv_round_trips_values_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_mixed_config(Some(2));
    let result = run_sweep(&config).unwrap();
    let path = export_sweep(&result, dir.path(), Format::Csv).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "series,detuning_mev,Pg,Px,Pxx,status");
    let (_, n1, n2) = result.shape();
    let mut count = 0;
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[5], "ok");
        let s = row / (n1 * n2);
        let i1 = (row / n2) % n1;
        let expect = result.get(s, i1, row % n2).populations().unwrap();
        let axis: f64 = fields[1].parse().unwrap();
        assert_eq!(axis.to_bits(), result.axis_values[0][i1].to_bits());
        for k in 0..3 {
            let v: f64 = fields[2 + k].parse().unwrap();
            assert_eq!(v.to_bits(), expect[k].to_bits(), "row {row} field {k}");
        }
        let total: f64 = expect.iter().sum();
        assert!((total - 1.0).abs() < 1e-8);
        count += 1;
    }
    assert_eq!(count, result.points.len());
}

#[test]
fn manifest_echoes_full_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_mixed_config(Some(2));
    let result = run_sweep(&config).unwrap();
    let path = export_sweep(&result, dir.path(), Format::Csv).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path.with_extension("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["tool"], "arpsim");
    assert_eq!(manifest["kind"], "sweep");
    assert!(manifest["version"].is_string());
    // the config echo deserializes back into an identical SweepConfig
    let echoed: SweepConfig = serde_json::from_value(manifest["config"].clone()).unwrap();
    assert_eq!(echoed, config);
    assert_eq!(manifest["summary"]["n_failed"], 0);
}

#[test]
fn json_export_contains_all_points() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_mixed_config(Some(2));
    let result = run_sweep(&config).unwrap();
    let path = export_sweep(&result, dir.path(), Format::Json).unwrap();
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["points"].as_array().unwrap().len(), result.points.len());
    assert_eq!(doc["series"].as_array().unwrap().len(), 2);
}
