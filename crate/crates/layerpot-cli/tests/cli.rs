use layerpot::coefficients::CoefficientSpec;
use layerpot::geometry::GeometrySpec;
use layerpot::verify::SuiteConfig;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn layerpot(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layerpot"))
        .args(args)
        .current_dir(dir)
        .env_remove("LAYERPOT_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn presets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets")
}

fn json_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

#[test]
fn every_bundled_preset_parses_and_builds() {
    for p in json_files(&presets().join("geometry")) {
        let spec: GeometrySpec = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        spec.build().unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for p in json_files(&presets().join("coefficients")) {
        let spec: CoefficientSpec =
            serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        spec.build().unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for p in json_files(&presets().join("suites")) {
        let suite: SuiteConfig = serde_json::from_str(&std::fs::read_to_string(&p).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert!(!suite.checks.is_empty(), "{}", p.display());
    }
}

#[test]
fn default_suite_matches_the_reference_configuration() {
    let text = std::fs::read_to_string(presets().join("suites/default.json")).unwrap();
    let bundled: SuiteConfig = serde_json::from_str(&text).unwrap();
    let mut a = serde_json::to_value(&bundled).unwrap();
    let mut b = serde_json::to_value(SuiteConfig::reference_disk()).unwrap();
    // Unnamed checks serialize with a null name; names are cosmetic here.
    for v in [&mut a, &mut b] {
        for c in v["checks"].as_array_mut().unwrap() {
            c.as_object_mut().unwrap().remove("name");
        }
    }
    assert_eq!(a, b);
}

#[test]
fn verify_default_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = layerpot(
        dir.path(),
        &["verify", "--suite", "default.json", "--out-report", "r.json", "--out-constants", "c.csv"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(csv.starts_with("check_name,quantity,value,tolerance,pass\n"));
    assert!(!csv.contains(",false\n"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["reports"].as_array().unwrap().len(), 8);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.json"), r#"{"checks": []}"#).unwrap();
    let o = layerpot(dir.path(), &["verify", "--suite", "empty.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("0 checks"));

    std::fs::write(
        dir.path().join("strict.json"),
        r#"{"checks": [{"check": "carleson_half_plane", "radii": [1.0], "tol": -1.0}]}"#,
    )
    .unwrap();
    let o = layerpot(dir.path(), &["verify", "--suite", "strict.json"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("FAIL"));

    std::fs::write(dir.path().join("broken.json"), "{ not json").unwrap();
    let o = layerpot(dir.path(), &["verify", "--suite", "broken.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("broken.json"));

    let o = layerpot(dir.path(), &["verify"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_dirichlet_cos_theta_on_the_disk() {
    let dir = tempfile::tempdir().unwrap();
    let o = layerpot(
        dir.path(),
        &[
            "solve", "--problem", "dirichlet", "--data", "preset:cos_theta", "--out", "u.csv",
            "--report", "report.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("u.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("x,y,re_u,im_u,re_du_dx1,im_du_dx1,re_du_dx2,im_du_dx2")
    );
    let row: Vec<f64> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect::<Vec<f64>>())
        .find(|r| r[0] == 0.5 && r[1] == 0.0)
        .expect("grid contains (0.5, 0)");
    assert!((row[2] - 0.5).abs() < 1e-6 && row[3].abs() < 1e-12, "{row:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert!(report["stats"]["condition"].as_f64().unwrap() < 10.0);
}

#[test]
fn solve_reads_data_files_and_user_grids() {
    let dir = tempfile::tempdir().unwrap();
    // 8 panels of 16 nodes on the unit circle; data only needs the count.
    let mut data = String::from("re,im\n");
    for _ in 0..128 {
        data.push_str("1,0\n");
    }
    std::fs::write(dir.path().join("f.csv"), &data).unwrap();
    std::fs::write(dir.path().join("grid.json"), r#"[[0.1, 0.2], [3.0, 0.0]]"#).unwrap();
    let o = layerpot(
        dir.path(),
        &[
            "solve", "--problem", "dirichlet", "--panels", "8", "--data", "f.csv", "--grid",
            "grid.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 1, "the exterior point is skipped");
    let u: f64 = rows[0].split(',').nth(2).unwrap().parse().unwrap();
    assert!((u - 1.0).abs() < 1e-8);

    let o = layerpot(
        dir.path(),
        &["solve", "--problem", "dirichlet", "--panels", "9", "--data", "f.csv"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("144 mesh nodes"), "{}", stderr(&o));
}

#[test]
fn missing_geometry_file_exits_two_with_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = layerpot(
        dir.path(),
        &["solve", "--problem", "dirichlet", "--geometry", "no/such/geometry.json", "--data", "preset:one"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no/such/geometry.json"), "{}", stderr(&o));
}

#[test]
fn incompatible_neumann_data_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = layerpot(dir.path(), &["solve", "--problem", "neumann", "--data", "preset:one"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn outputs_are_byte_identical_at_one_thread() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let o = layerpot(
            dir.path(),
            &[
                "--threads", "1", "solve", "--problem", "regularity", "--coefficients",
                "preset:complex_0.1", "--data", "preset:linear_y", "--out", out,
            ],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));

    let green = |seed: &str| {
        let o = layerpot(
            dir.path(),
            &["--threads", "1", "green", "--coefficients", "preset:complex_0.1", "--random", "5", "--seed", seed],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        o.stdout
    };
    assert_eq!(green("3"), green("3"));
    assert_ne!(green("3"), green("4"));
}

#[test]
fn green_pairs_and_cache_reuse() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pairs.json"), r#"[[[0, 0], [1, 0]], [[0.2, -0.1], [0.5, 0.7]]]"#)
        .unwrap();
    let o = layerpot(dir.path(), &["green", "--pairs", "pairs.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    let first: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    // Laplace kernel log|X - Y| / 2 pi at distance one, gradient (1, 0) / 2 pi.
    assert!(first[4].abs() < 1e-14);
    assert!((first[6] - 1.0 / std::f64::consts::TAU).abs() < 1e-14);

    let cache = dir.path().join("cache");
    let cached = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_layerpot"))
            .args(args)
            .current_dir(dir.path())
            .env("LAYERPOT_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    let args = ["green", "--coefficients", "preset:diagonal_profile", "--pairs", "pairs.json"];
    let a = cached(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert!(stderr(&a).contains("cache written"));
    let b = cached(&args);
    assert!(stderr(&b).contains("cached octaves") && !stderr(&b).contains("cache written"));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn assemble_writes_operators_with_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let o = layerpot(
        dir.path(),
        &["assemble", "--panels", "8", "--op", "kplus", "--op", "kt-plus", "--out-dir", "ops"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ops = dir.path().join("ops");
    let mesh = std::fs::read_to_string(ops.join("mesh.csv")).unwrap();
    assert!(mesh.starts_with("node,x,y,weight,normal_x,normal_y,tangent_x,tangent_y\n"));
    assert_eq!(mesh.lines().count(), 129);
    let k = std::fs::read_to_string(ops.join("kplus.csv")).unwrap();
    assert!(k.starts_with("row,col,re,im\n"));
    assert_eq!(k.lines().count(), 1 + 128 * 128);
    // K_+ 1 = 1: every row sums to one.
    let mut sums = vec![0.0; 128];
    for l in k.lines().skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        sums[f[0].parse::<usize>().unwrap()] += f[2].parse::<f64>().unwrap();
    }
    assert!(sums.iter().all(|s| (s - 1.0).abs() < 1e-8), "{sums:?}");
    let a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(ops.join("kplus.json")).unwrap()).unwrap();
    let b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(ops.join("kt_plus.json")).unwrap()).unwrap();
    assert_eq!(a["op_tag"], "Kplus");
    assert_eq!(a["mesh_hash"], b["mesh_hash"]);
    assert_eq!(a["mesh_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn sweep_preset_records_conditioning() {
    let dir = tempfile::tempdir().unwrap();
    let o = layerpot(dir.path(), &["sweep", "--out", "sweep.csv", "--report", "sweep.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,delta_norm,ratio,condition,jump_residual"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() >= 4);
    assert_eq!(rows[0][2], "", "no ratio at eps = 0");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap())
            .unwrap();
    assert!(report["points"].as_array().unwrap().len() == rows.len());
}
