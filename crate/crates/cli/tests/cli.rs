use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ftle_core::format::{self, Format, HEADER_LEN};
use ftle_core::mesh::Dim;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

const UNIT_SQUARE: &str = "\
FTLE,1,0,2,4
0,0
1,0
0,1
1,1
FTLE,1,1,2,2
0,1,2
1,3,2
";

fn ftle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftle"))
        .args(args)
        .env_remove("FTLE_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = ftle(args);
    assert!(
        out.status.success(),
        "ftle {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn sha(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

#[test]
fn neighbors_of_unit_square_match_hand_list() {
    let dir = TempDir::new().unwrap();
    let mesh = write(&dir, "square.csv", UNIT_SQUARE);
    let out = dir.path().join("square.nbr");
    let stdout = ok(&["neighbors", p(&mesh), "-o", p(&out)]);
    assert!(stdout.contains("points 4"));
    let nl = format::load_neighbors(&out, Format::Binary).unwrap();
    assert_eq!(nl.entries(), &[-1, 1, -1, 2, 0, -1, -1, 3, -1, 3, 0, -1, 2, -1, 1, -1]);
    assert!(dir.path().join("square.nbr.manifest.json").exists());
}

#[test]
fn mesh_without_faces_gives_all_missing_and_warns() {
    let dir = TempDir::new().unwrap();
    let mesh = write(
        &dir,
        "bare.csv",
        &UNIT_SQUARE.replace("FTLE,1,1,2,2\n0,1,2\n1,3,2\n", "FTLE,1,1,2,0\n"),
    );
    let out = dir.path().join("bare.nbr.csv");
    let res = ftle(&["neighbors", p(&mesh), "-o", p(&out)]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("warning"));
    let nl = format::load_neighbors(&out, Format::Csv).unwrap();
    assert!(nl.entries().iter().all(|&e| e == -1));
}

#[test]
fn corrupt_magic_exits_2() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.bin");
    fs::write(&path, b"FTLX\x01\0\0\0\0\0\0\0\x02\0\0\0\0\0\0\0\0\0\0\0").unwrap();
    let res = ftle(&["neighbors", p(&path), "-o", p(&dir.path().join("o.nbr"))]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("bad magic"));
}

#[test]
fn missing_input_exits_2_and_invalid_neighbors_exit_1() {
    let dir = TempDir::new().unwrap();
    let res = ftle(&[
        "neighbors",
        p(&dir.path().join("nope.bin")),
        "-o",
        p(&dir.path().join("o")),
    ]);
    assert_eq!(res.status.code(), Some(2));

    let mesh = write(&dir, "square.csv", UNIT_SQUARE);
    let fm = write(
        &dir,
        "fm.csv",
        &UNIT_SQUARE
            .replace("FTLE,1,0,2,4", "FTLE,1,2,2,4")
            .replace("FTLE,1,1,2,2\n0,1,2\n1,3,2\n", ""),
    );
    // Point 0's x- entry points to 1, which lies on the plus side.
    let nbr = write(
        &dir,
        "n.csv",
        "FTLE,1,3,2,4\n1,1,-1,2\n0,-1,-1,3\n-1,3,0,-1\n2,-1,1,-1\n",
    );
    let res = ftle(&[
        "ftle",
        p(&mesh),
        p(&fm),
        "--neighbors",
        p(&nbr),
        "-o",
        p(&dir.path().join("f.bin")),
    ]);
    assert_eq!(res.status.code(), Some(1), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn identity_flow_gives_zero_field() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g");
    ok(&[
        "gen",
        "--kind",
        "grid",
        "--dim",
        "3",
        "--n",
        "125",
        "--flow",
        "identity",
        "--out-dir",
        p(&g),
    ]);
    let out = dir.path().join("f.bin");
    ok(&["ftle", p(&g.join("mesh.bin")), p(&g.join("flowmap.bin")), "-o", p(&out)]);
    let field = format::load_field(&out, Format::Binary).unwrap();
    assert_eq!(field.len(), 125);
    assert!(field.values().iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn linear_flow_on_grid_gives_ln2_interior() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g");
    ok(&[
        "gen",
        "--kind",
        "grid",
        "--dim",
        "2",
        "--n",
        "1089",
        "--flow",
        "linear",
        "--matrix",
        "2,0,0,0.5",
        "--out-dir",
        p(&g),
    ]);
    let nbr = dir.path().join("n.bin");
    ok(&["neighbors", p(&g.join("mesh.bin")), "-o", p(&nbr)]);
    let out = dir.path().join("f.csv");
    ok(&[
        "ftle",
        p(&g.join("mesh.bin")),
        p(&g.join("flowmap.bin")),
        "--neighbors",
        p(&nbr),
        "--horizon",
        "1",
        "-o",
        p(&out),
    ]);
    let field = format::load_field(&out, Format::Csv).unwrap();
    let s = 33;
    let interior: Vec<f64> = (1..s - 1)
        .flat_map(|j| (1..s - 1).map(move |i| j * s + i))
        .map(|q| field.values()[q])
        .collect();
    let mean = interior.iter().sum::<f64>() / interior.len() as f64;
    assert!((mean - std::f64::consts::LN_2).abs() < 1e-10, "{mean}");
}

#[test]
fn naive_and_decoupled_files_agree() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g");
    ok(&[
        "gen",
        "--kind",
        "random",
        "--dim",
        "3",
        "--n",
        "300",
        "--flow",
        "random",
        "--seed",
        "9",
        "--out-dir",
        p(&g),
    ]);
    let (a, b) = (dir.path().join("a.bin"), dir.path().join("b.bin"));
    let mesh = g.join("mesh.bin");
    let fm = g.join("flowmap.bin");
    ok(&["ftle", p(&mesh), p(&fm), "--mode", "decoupled", "-o", p(&a)]);
    ok(&["ftle", p(&mesh), p(&fm), "--mode", "naive", "-o", p(&b)]);
    let a = format::load_field(&a, Format::Binary).unwrap();
    let b = format::load_field(&b, Format::Binary).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!(
            (x.is_nan() && y.is_nan()) || (x - y).abs() <= 1e-12 * x.abs().max(y.abs()),
            "{x} vs {y}"
        );
    }
}

#[test]
fn model_table2_matches_published_grid_and_flags_erratum() {
    let json: serde_json::Value = serde_json::from_str(&ok(&["model", "table2"])).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    let mut flagged = 0;
    for row in rows {
        for cell in row["cells"].as_array().unwrap() {
            let percent = cell["percent"].as_i64().unwrap();
            let reported = cell["reported"].as_i64().unwrap();
            if cell["erratum"].as_bool().unwrap() {
                flagged += 1;
                assert_eq!((percent, reported), (42, 59));
            } else {
                assert!((percent - reported).abs() <= 1, "{percent} vs {reported}");
            }
        }
    }
    assert_eq!(flagged, 1);
    assert_eq!(json["errata"].as_array().unwrap().len(), 1);

    let text = ok(&["model", "table2", "--format", "text"]);
    assert!(text.contains("42%*"));
    let csv = ok(&["model", "table1", "--format", "csv"]);
    assert!(csv.contains("48.0+8.0") && csv.contains("reported, not computed"));
}

#[test]
fn simulate_reports_bound_and_rate() {
    let json: serde_json::Value = serde_json::from_str(&ok(&[
        "simulate",
        "--dim",
        "2",
        "--freq",
        "300e6",
        "--mem",
        "2ch-ddr4-2400",
    ]))
    .unwrap();
    assert_eq!(json["rate"].as_f64().unwrap(), 300e6);
    assert_eq!(json["bound"], "compute");

    let json: serde_json::Value = serde_json::from_str(&ok(&[
        "simulate",
        "--dim",
        "3",
        "--freq",
        "357e6",
        "--mem",
        "1ch-ddr4-2400",
    ]))
    .unwrap();
    assert_eq!(json["bound"], "memory");
    let rate = json["rate"].as_f64().unwrap();
    assert!((rate - 19.2e9 / 168.0).abs() < 1.0, "{rate}");
    assert!((rate - 114.3e6).abs() < 0.05e6);
}

#[test]
fn unknown_memory_and_bad_flags_fail() {
    assert_eq!(
        ftle(&["simulate", "--dim", "2", "--mem", "3ch-ddr9"]).status.code(),
        Some(1)
    );
    assert_eq!(
        ftle(&["simulate", "--dim", "2", "--mem", "1-hbm", "--efficiency", "1.5"])
            .status
            .code(),
        Some(1)
    );
    let dir = TempDir::new().unwrap();
    let res = ftle(&[
        "gen",
        "--kind",
        "grid",
        "--dim",
        "2",
        "--n",
        "9",
        "--flow",
        "linear",
        "--matrix",
        "1,2,3",
        "--out-dir",
        p(dir.path()),
    ]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn gen_grid_counts_and_identity_payload() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&[
        "gen",
        "--kind",
        "grid",
        "--dim",
        "2",
        "--n",
        "9",
        "--out-dir",
        p(dir.path()),
    ]);
    assert!(stdout.contains("points 9 faces 8"));
    let mesh = format::load_mesh(dir.path().join("mesh.bin"), Format::Binary).unwrap();
    assert_eq!((mesh.dim(), mesh.n_points(), mesh.n_faces()), (Dim::Two, 9, 8));

    // The mesh file starts with the coords block; the flow map block has
    // the same payload and differs only in the header's kind field.
    let mesh_bytes = fs::read(dir.path().join("mesh.bin")).unwrap();
    let fm_bytes = fs::read(dir.path().join("flowmap.bin")).unwrap();
    let coords_len = HEADER_LEN + 9 * 2 * 8;
    assert_eq!(fm_bytes.len(), coords_len);
    assert_eq!(&fm_bytes[HEADER_LEN..], &mesh_bytes[HEADER_LEN..coords_len]);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, seed: &str| {
        let d = dir.path().join(name);
        ok(&[
            "gen",
            "--kind",
            "random",
            "--dim",
            "2",
            "--n",
            "200",
            "--flow",
            "random",
            "--seed",
            seed,
            "--out-dir",
            p(&d),
        ]);
        (sha(&d.join("mesh.bin")), sha(&d.join("flowmap.bin")))
    };
    assert_eq!(run("a", "42"), run("b", "42"));
    assert_ne!(run("a", "42"), run("c", "43"));
}
