use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ris_isac::cli::ResultDocument;
use ris_isac::heatmap::import_grid;
use ris_isac::{save_config, ScenarioConfig};

fn ris_isac(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ris-isac"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn CLI")
}

/// A scenario small enough to optimize quickly in debug builds.
fn write_config(dir: &Path, seed: u64) -> String {
    let mut cfg = ScenarioConfig::default();
    cfg.temporal.num_frames = 8;
    cfg.master_seed = seed;
    let path = dir.join("scenario.json");
    save_config(&cfg, &path).unwrap();
    path.to_string_lossy().into_owned()
}

fn write_search_params(dir: &Path) -> String {
    let path = dir.join("search.json");
    fs::write(
        &path,
        r#"{"grid_x": 5, "grid_y": 5, "grid_theta": 4, "num_elements": [64, 512], "alphas": [0.0, 0.5, 1.0], "max_rounds": 3}"#,
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

fn optimize(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let search = write_search_params(dir);
    let mut args = vec![
        "optimize",
        config,
        "--search-params",
        &search,
        "--out",
        "out/result.json",
    ];
    args.extend_from_slice(extra);
    ris_isac(dir, &args)
}

#[test]
fn missing_fixed_alpha_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 1);
    let out = ris_isac(
        dir.path(),
        &[
            "heatmap",
            &config,
            "--fixed-theta",
            "0.5",
            "--fixed-n",
            "64",
            "--out-dir",
            "maps",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--fixed-alpha"));
    assert!(!dir.path().join("maps").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ris_isac(dir.path(), &["plot"]).status.code(), Some(2));
}

#[test]
fn heatmap_writes_four_grids_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 1);
    let out = ris_isac(
        dir.path(),
        &[
            "heatmap",
            &config,
            "--fixed-theta",
            "-0.8",
            "--fixed-n",
            "128",
            "--fixed-alpha",
            "0.5",
            "--cell-size",
            "10",
            "--out-dir",
            "maps",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let maps = dir.path().join("maps");
    for metric in ["delta_snr_b", "sensing_gain", "security_gap", "scalar_objective"] {
        let grid = import_grid(maps.join(format!("{metric}.csv"))).unwrap();
        assert_eq!((grid.rows, grid.cols), (10, 10));
        assert_eq!(grid.fixed.theta, -0.8);
        assert!(maps.join(format!("{metric}.json")).exists());
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(maps.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 8);
    assert_eq!(manifest["master_seed"], 1);
}

#[test]
fn heatmap_metric_subset_and_bad_metric() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 1);
    let base = [
        "heatmap",
        &config,
        "--fixed-theta",
        "0",
        "--fixed-n",
        "64",
        "--fixed-alpha",
        "0.5",
        "--cell-size",
        "25",
    ];

    let mut args = base.to_vec();
    args.extend(["--metrics", "security_gap", "--out-dir", "one"]);
    assert!(ris_isac(dir.path(), &args).status.success());
    let written: Vec<_> = fs::read_dir(dir.path().join("one")).unwrap().collect();
    assert_eq!(written.len(), 3);

    let mut args = base.to_vec();
    args.extend(["--metrics", "snr", "--out-dir", "two"]);
    assert_eq!(ris_isac(dir.path(), &args).status.code(), Some(2));
}

#[test]
fn invalid_runtime_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 1);
    // 3 m cells do not divide the 100 m area.
    let out = ris_isac(
        dir.path(),
        &[
            "heatmap",
            &config,
            "--fixed-theta",
            "0",
            "--fixed-n",
            "64",
            "--fixed-alpha",
            "0.5",
            "--cell-size",
            "3",
            "--out-dir",
            "m",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(ris_isac(dir.path(), &["report", "missing.json"]).status.code(), Some(1));
}

#[test]
fn optimize_writes_result_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 1);
    let out = optimize(dir.path(), &config, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for label in ["Best SNR_B", "Best security gap", "Best sensing gain", "Balanced"] {
        assert!(stdout.contains(label), "{stdout}");
    }
    let out_dir = dir.path().join("out");
    assert!(out_dir.join("result.table.txt").exists());
    assert!(out_dir.join("result.manifest.json").exists());

    let text = fs::read_to_string(out_dir.join("result.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["representatives"].as_object().unwrap().len(), 4);
    let doc = ResultDocument::from_json_str(&text).unwrap();
    doc.validate().unwrap();
    assert_eq!(doc.search_params.max_rounds, 3);

    let report = ris_isac(dir.path(), &["report", "out/result.json"]);
    assert!(report.status.success());
    assert_eq!(
        String::from_utf8_lossy(&report.stdout),
        fs::read_to_string(out_dir.join("result.table.txt")).unwrap()
    );
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 1);
    assert!(optimize(dir.path(), &config, &["--seed", "77"]).status.success());
    let doc = ResultDocument::load(dir.path().join("out/result.json")).unwrap();
    assert_eq!(doc.seed, 77);

    let other = tempfile::tempdir().unwrap();
    let config77 = write_config(other.path(), 77);
    assert!(optimize(other.path(), &config77, &[]).status.success());
    let direct = ResultDocument::load(other.path().join("out/result.json")).unwrap();
    assert_eq!(doc.candidates, direct.candidates);
}

fn tamper(dir: &Path, edit: impl FnOnce(&mut serde_json::Value)) -> Output {
    let path = dir.join("out/result.json");
    let mut json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    edit(&mut json);
    fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    ris_isac(dir, &["report", "out/result.json"])
}

#[test]
fn report_rejects_tampered_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), 5);
    assert!(optimize(dir.path(), &config, &[]).status.success());
    let pristine = fs::read_to_string(dir.path().join("out/result.json")).unwrap();

    let out = tamper(dir.path(), |j| {
        let s = j["representatives"]["balanced"]["objective"]["scalar"]
            .as_f64()
            .unwrap();
        j["representatives"]["balanced"]["objective"]["scalar"] = (s + 0.5).into();
    });
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("balanced"));

    fs::write(dir.path().join("out/result.json"), &pristine).unwrap();
    let out = tamper(dir.path(), |j| j["candidates"] = serde_json::json!([]));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));

    fs::write(dir.path().join("out/result.json"), &pristine).unwrap();
    let out = tamper(dir.path(), |j| {
        let g = j["candidates"][3]["metrics"]["security_gap_db"].as_f64().unwrap();
        j["candidates"][3]["metrics"]["security_gap_db"] = (g + 1.0).into();
    });
    assert_eq!(out.status.code(), Some(1));

    fs::write(dir.path().join("out/result.json"), &pristine).unwrap();
    let out = tamper(dir.path(), |j| j["result_schema"] = 2.into());
    assert_eq!(out.status.code(), Some(1));
}
