//! End-to-end tests of the chernlab binary: artifact shapes, exit codes,
//! and the physics visible through the CSV surface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chernlab"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chernlab-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let digest_line = lines.next().unwrap();
    assert!(digest_line.starts_with("# chernlab"), "missing digest header");
    assert!(digest_line.contains("digest="));
    lines
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn bands_row_count_and_gap_location() {
    let dir = tmp_dir("bands");
    let cfg = write_config(&dir, "cfg.json", r#"{"samples": 500}"#);
    let out = run(&["bands", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.join("bands.csv"));
    assert_eq!(rows.len(), 500, "row count equals requested samples");
    // Locate the minimum gap along Γ → K → M → K′ → Γ; for the reference
    // parameters it sits at the on-path M point with value 2·t1.
    let min_row = rows
        .iter()
        .min_by(|a, b| {
            let ga = a[4].parse::<f64>().unwrap() - a[3].parse::<f64>().unwrap();
            let gb = b[4].parse::<f64>().unwrap() - b[3].parse::<f64>().unwrap();
            ga.total_cmp(&gb)
        })
        .unwrap();
    let gap = min_row[4].parse::<f64>().unwrap() - min_row[3].parse::<f64>().unwrap();
    let (k1, k2) = (
        min_row[1].parse::<f64>().unwrap(),
        min_row[2].parse::<f64>().unwrap(),
    );
    assert!((gap - 2.0).abs() < 0.01, "min path gap {gap}");
    assert!((k1 - 0.5).abs() < 0.02 && k2.abs() < 0.02, "min at ({k1}, {k2}), expected M");
}

#[test]
fn bands_graphene_limit_closes_at_dirac_points() {
    let dir = tmp_dir("bands-graphene");
    let cfg = write_config(&dir, "cfg.json", r#"{"t2": 0.0, "m": 0.0, "samples": 1200}"#);
    let out = run(&["bands", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.join("bands.csv"));
    // Gap essentially zero at both K and K' samples.
    for target in [(-1.0 / 3.0, -1.0 / 3.0), (1.0 / 3.0, 1.0 / 3.0)] {
        let nearest = rows
            .iter()
            .min_by(|a, b| {
                let da = (a[1].parse::<f64>().unwrap() - target.0).abs()
                    + (a[2].parse::<f64>().unwrap() - target.1).abs();
                let db = (b[1].parse::<f64>().unwrap() - target.0).abs()
                    + (b[2].parse::<f64>().unwrap() - target.1).abs();
                da.total_cmp(&db)
            })
            .unwrap();
        let gap =
            nearest[4].parse::<f64>().unwrap() - nearest[3].parse::<f64>().unwrap();
        assert!(gap < 0.05, "graphene gap {gap} near {target:?}");
    }
}

#[test]
fn chern_methods_agree_in_csv() {
    let dir = tmp_dir("chern");
    let out = run(&["chern", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.join("chern.csv"));
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert_eq!(row[3], "-1", "method {} disagrees", row[0]);
    }
}

#[test]
fn curvature_map_totals_to_chern_number() {
    let dir = tmp_dir("curv");
    let cfg = write_config(&dir, "cfg.json", r#"{"grid_n": 48}"#);
    let out = run(&[
        "curvature-map",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.join("curvature.csv"));
    assert_eq!(rows.len(), 48 * 48);
    let total: f64 = rows.iter().map(|r| r[4].parse::<f64>().unwrap()).sum();
    assert!((total / (2.0 * std::f64::consts::PI) + 1.0).abs() < 1e-2, "total {total}");
}

#[test]
fn phase_diagram_artifacts_and_lobes() {
    let dir = tmp_dir("pd");
    let cfg = write_config(
        &dir,
        "cfg.json",
        r#"{"phi_min": -3.0, "phi_max": 3.0, "phi_samples": 13,
            "m_min": -1.8, "m_max": 1.8, "m_samples": 9, "grid_n": 24}"#,
    );
    let out = run(&[
        "phase-diagram",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert!(out.status.success());
    // PGM dimensions equal the sweep dimensions.
    let pgm = std::fs::read(dir.join("phase_diagram.pgm")).unwrap();
    let header = String::from_utf8_lossy(&pgm[..20]);
    assert!(header.starts_with("P5\n13 9\n255\n"), "header {header:?}");
    assert_eq!(pgm.len(), "P5\n13 9\n255\n".len() + 13 * 9);

    // CSV cells match the Dirac-mass sign rule away from the boundary.
    let rows = csv_rows(&dir.join("phase_diagram.csv"));
    assert_eq!(rows.len(), 13 * 9);
    let locus = 3.0 * 3.0_f64.sqrt() * 0.25;
    for row in &rows {
        let phi = row[0].parse::<f64>().unwrap();
        let m = row[1].parse::<f64>().unwrap();
        let margin = (m.abs() - (locus * phi.sin()).abs()).abs();
        if margin < 0.15 {
            continue;
        }
        let expect = if m.abs() < (locus * phi.sin()).abs() {
            if phi.sin() > 0.0 {
                "-1"
            } else {
                "1"
            }
        } else {
            "0"
        };
        assert_eq!(row[2], "chern", "({phi}, {m}) unexpectedly {}", row[2]);
        assert_eq!(row[3], expect, "cell ({phi}, {m})");
    }
    // The φ = 0 column is time-reversal symmetric: every gapped cell is
    // trivial, and the only gapless one is the graphene point M = 0.
    for row in rows.iter().filter(|r| r[0].parse::<f64>().unwrap().abs() < 1e-9) {
        if row[2] == "gapless" {
            assert!(row[1].parse::<f64>().unwrap().abs() < 1e-9);
        } else {
            assert_eq!(row[3], "0");
        }
    }
}

#[test]
fn wannier_summary_reports_obstruction_and_power_law() {
    let dir = tmp_dir("wannier");
    let cfg = write_config(&dir, "cfg.json", r#"{"grid_n": 24}"#);
    let out = run(&["wannier", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.join("wannier_summary.csv"));
    let get = |key: &str| -> f64 {
        rows.iter()
            .find(|r| r[0] == key)
            .unwrap_or_else(|| panic!("missing {key}"))[1]
            .parse()
            .unwrap()
    };
    assert_eq!(get("obstruction"), -1.0);
    assert!((get("total_weight") - 1.0).abs() < 1e-9);
    assert!(get("power_r2") > get("decay_r2"), "reference phase is power-law");
    let amp_rows = csv_rows(&dir.join("wannier.csv"));
    assert_eq!(amp_rows.len(), 24 * 24);
}

#[test]
fn marker_command_reports_chern_phase() {
    let dir = tmp_dir("marker");
    let cfg = write_config(&dir, "cfg.json", r#"{"sizes": [10], "box_ratio": 0.4}"#);
    let out = run(&["marker", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.join("marker.csv"));
    assert_eq!(rows.len(), 1);
    let marker: f64 = rows[0][7].parse().unwrap();
    assert!(marker < -0.5, "10×10 Chern marker {marker}");
    let edge_states: usize = rows[0][3].parse().unwrap();
    assert!(edge_states > 0, "open Chern flake should carry in-gap edge states");
}

#[test]
fn identical_configs_produce_identical_csv_bytes() {
    let dir = tmp_dir("determinism");
    let cfg = write_config(&dir, "cfg.json", r#"{"samples": 123, "phi": 0.7, "m": -0.2}"#);
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.join(run);
        std::fs::create_dir_all(&out_dir).unwrap();
        let out = run_cmd(&["bands", "--config", cfg.to_str().unwrap()], &out_dir);
        assert!(out.status.success());
        outputs.push(std::fs::read(out_dir.join("bands.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

fn run_cmd(args: &[&str], out_dir: &Path) -> Output {
    bin()
        .args(args)
        .args(["--out", out_dir.to_str().unwrap()])
        .output()
        .expect("binary runs")
}

#[test]
fn bad_config_exits_2() {
    let dir = tmp_dir("badcfg");
    let cfg = write_config(&dir, "cfg.json", r#"{"sampels": 10}"#);
    let out = run(&["bands", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let cfg2 = write_config(&dir, "cfg2.json", "not json");
    let out = run(&["bands", "--config", cfg2.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gapless_parameters_exit_2() {
    let dir = tmp_dir("gapless");
    // Exactly on the phase boundary with the Dirac point on-grid.
    let cfg = write_config(&dir, "cfg.json", r#"{"m": 1.299038105676658, "grid_n": 24}"#);
    let out = run(&["chern", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn under_resolved_transport_exits_3() {
    let dir = tmp_dir("underres");
    // Nearly flat bands: the 24-grid cannot follow the band flip.
    let cfg = write_config(&dir, "cfg.json", r#"{"t1": 0.001, "m": 0.07, "transport_n": 24}"#);
    let out = run(&["chern", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn selfcheck_mutation_hook_is_caught() {
    let dir = tmp_dir("mutation");
    let cfg = write_config(&dir, "cfg.json", r#"{"corrupt_nnn_sign": true}"#);
    let out = run(&[
        "selfcheck",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "corrupted assembly must fail");
    let report = std::fs::read_to_string(dir.join("selfcheck_report.txt")).unwrap();
    assert!(
        report.contains("FAIL spectral-equivalence"),
        "failure not named:\n{report}"
    );
}
