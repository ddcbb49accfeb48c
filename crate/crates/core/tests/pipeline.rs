use toric_threshold::models::ModelKind;
use toric_threshold::pipeline::{
    mc_sweep, parse_config, replay, threshold_pipeline, Command, CommandOutput, SweepConfig, ThresholdConfig,
};
use toric_threshold::Error;

fn small_sweep() -> SweepConfig {
    parse_config(
        r#"{
            "model": "RBIM3",
            "sizes": [3, 4],
            "axis": { "nishimori": { "p": [0.15, 0.2, 0.25, 0.3] } },
            "seed": 21,
            "samples": 4,
            "thermalization": 10,
            "measurements": 30,
            "bootstrap": 20
        }"#,
    )
    .unwrap()
}

#[test]
fn sweep_manifest_replays_bit_for_bit() {
    let cmd = Command::McSweep(small_sweep());
    let out = cmd.execute().unwrap();
    let manifest = cmd.manifest(&out).unwrap();
    assert_eq!(manifest.command, "mc sweep");
    let back = serde_json::from_str(&serde_json::to_string_pretty(&manifest).unwrap()).unwrap();
    assert!(replay(&back).unwrap());

    // a different seed is a different output
    let mut other = manifest.clone();
    other.config["mc_sweep"]["seed"] = serde_json::json!(22);
    assert!(!replay(&other).unwrap());
}

#[test]
fn sweep_points_cover_the_grid() {
    let cfg = small_sweep();
    let out = mc_sweep(&cfg).unwrap();
    assert_eq!(out.points.len(), 8);
    assert_eq!(out.curves.len(), 2);
    for pt in &out.points {
        assert_eq!(pt.samples, 4);
        let b = pt.binder.expect("RBIM3 has a magnetization");
        assert!((-1.0..=1.0).contains(&b), "{b}");
    }
    // determinism across two independent executions
    assert_eq!(mc_sweep(&cfg).unwrap().points, out.points);
}

#[test]
fn threshold_config_validation() {
    let bad: ThresholdConfig = parse_config(r#"{"model": "RBIM3", "method": "sweep"}"#).unwrap();
    assert!(matches!(threshold_pipeline(&bad), Err(Error::Config(_))));
    let bad: ThresholdConfig = parse_config(r#"{"model": "RBIM4", "method": "self_dual"}"#).unwrap();
    assert!(threshold_pipeline(&bad).is_err());
    assert!(matches!(
        parse_config::<ThresholdConfig>(r#"{"model": "RBIM5", "method": "reference"}"#),
        Err(Error::Config(_))
    ));
    match parse_config::<SweepConfig>("{\n\"model\": \"RBIM3\",\n\"sizes\": [3],\n\"axis\": {\"beta\": {\"p\": 0.1}}\n}") {
        Err(Error::Config(msg)) => assert!(msg.contains("line 4"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn reference_threshold_reports_the_dual() {
    let cmd = Command::Threshold(ThresholdConfig::reference(ModelKind::Rcgm4, 0.29));
    let CommandOutput::Threshold(r) = cmd.execute().unwrap() else {
        panic!("threshold output expected")
    };
    assert_eq!(r.dual_model, ModelKind::Rbim4);
    assert!((0.015..0.025).contains(&r.dual_p_c), "{}", r.dual_p_c);
}
