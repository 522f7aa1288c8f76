use std::path::Path;
use std::process::{Command, Output};

use relcond::cli::{cmd_analyze, parse_csv, run, ProblemArgs};

fn relcond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relcond")).args(args).env_remove("RELCOND_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn last(col: &[Option<f64>]) -> f64 {
    col.last().unwrap().unwrap()
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bh.csv");
    let o = relcond(&["analyze", "--preset", "building-heating", "--points", "101", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let table = parse_csv(&text).unwrap();
    assert_eq!(table.to_csv(), text);

    let args = ProblemArgs {
        matrix: None,
        preset: Some("building-heating".into()),
        y0: None,
        y0_tilde: None,
        z0: None,
        norm: None,
        tmax_chars: None,
        points: 101,
        precision: 0.1,
        out: None,
    };
    let direct = cmd_analyze(&args).unwrap();
    assert_eq!(direct.header, table.header);
    for (a, b) in direct.rows.iter().flatten().zip(table.rows.iter().flatten()) {
        assert_eq!(a.map(f64::to_bits), b.map(f64::to_bits));
    }
}

#[test]
fn analyze_building_heating() {
    let o = relcond(&["analyze", "--preset", "building-heating", "--points", "601"]);
    let t = parse_csv(&stdout(&o)).unwrap();
    let expected = [
        "t",
        "K_direct",
        "K_directional",
        "K_inf",
        "K_inf_directional",
        "OSF",
        "OT",
        "lower_bound",
        "upper_bound",
        "delta",
        "precision_bound",
    ];
    assert_eq!(t.header, expected);
    assert_eq!(t.rows.len(), 601);
    assert!((last(&t.column("K_inf").unwrap()) - 12.1330).abs() < 5e-4);
    assert!((last(&t.column("K_inf_directional").unwrap()) - 11.8648).abs() < 5e-4);
    assert!(t.meta.iter().any(|m| m.starts_with("rlge_margin")));
    let k = t.column("K_direct").unwrap();
    assert_eq!(k[0], Some(1.0));
}

#[test]
fn analyze_gdp_nd_directional() {
    let t = parse_csv(&stdout(&relcond(&["analyze", "--preset", "gdp-nd", "--points", "51"]))).unwrap();
    assert!((last(&t.column("K_inf_directional").unwrap()) - 3.0035).abs() < 5e-5);
}

#[test]
fn zero_matrix_has_unit_condition() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "zero.txt", "0 0 0\n0 0 0\n0 0 0\n");
    let t = parse_csv(&stdout(&relcond(&["analyze", "--matrix", &m, "--y0", "1,2,3", "--points", "21"]))).unwrap();
    for name in ["K_direct", "K_inf"] {
        for v in t.column(name).unwrap() {
            assert!((v.unwrap() - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn complex_matrix_input() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "c.txt", "-1+2i 0.5\n0 -3-1i\n");
    let t = parse_csv(&stdout(&relcond(&["analyze", "--matrix", &m, "--y0", "1,1i", "--points", "41"]))).unwrap();
    assert!(t.meta.iter().any(|x| x == "k_inf_route: q1"));
    let k = t.column("K_direct").unwrap();
    let kinf = t.column("K_inf").unwrap();
    assert!((last(&k) / last(&kinf) - 1.0).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(relcond(&["analyze", "--preset", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(relcond(&["analyze"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.txt", "1 2\n3\n");
    assert_eq!(relcond(&["analyze", "--matrix", &bad, "--y0", "1,1"]).status.code(), Some(2));

    let jordan = write(dir.path(), "j.txt", "0 1\n0 0\n");
    let o = relcond(&["analyze", "--matrix", &jordan, "--y0", "1,1"]);
    assert_eq!(o.status.code(), Some(3));

    let diag = write(dir.path(), "d.txt", "-1 0\n0 -2\n");
    let o = relcond(&["analyze", "--matrix", &diag, "--y0", "0,1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("margin"));

    let growth = write(dir.path(), "g.txt", "1 0\n0 -1\n");
    let o = relcond(&["analyze", "--matrix", &growth, "--y0", "1,1", "--tmax-chars", "1e4", "--points", "5"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn in_process_errors_match_exit_codes() {
    let mut sink = Vec::new();
    let e = run(["relcond", "analyze", "--preset", "gdp-nd", "--y0", "1,1"], &mut sink).unwrap_err();
    assert_eq!(relcond::cli::exit_code(&e), 4);
    let e = run(["relcond", "analyze", "--preset", "gdp-nd", "--norm", "7"], &mut sink).unwrap_err();
    assert_eq!(relcond::cli::exit_code(&e), 2);
}

#[test]
fn model_list_and_run() {
    let list = stdout(&relcond(&["model", "list"]));
    for name in relcond::models::PRESET_NAMES {
        assert!(list.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    let run = stdout(&relcond(&["model", "run", "wall-model"]));
    assert!(run.contains("PASS k_inf_worst"));
    assert!(!run.contains("FAIL"));
}

#[test]
fn onset_report_on_hilbert() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("onset.csv");
    let text = stdout(&relcond(&["onset", "--preset", "hilbert", "--points", "2001", "--out", out.to_str().unwrap()]));
    let get = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.split('=').nth(1).unwrap().trim().parse().unwrap()
    };
    let bound = get("formula_bound_chars");
    let measured = get("measured_onset_chars");
    assert!(measured > 0.0 && measured <= bound, "measured {measured} bound {bound}");
    let t = parse_csv(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(t.rows.len(), 2001);
}

#[test]
fn studies_are_deterministic_under_a_fixed_seed() {
    let a = stdout(&relcond(&["census", "--n", "4", "--trials", "200", "--seed", "7"]));
    let b = Command::new(env!("CARGO_BIN_EXE_relcond"))
        .args(["census", "--n", "4", "--trials", "200"])
        .env("RELCOND_SEED", "7")
        .env("RAYON_NUM_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a, stdout(&b));
    let c = stdout(&relcond(&["census", "--n", "4", "--trials", "200", "--seed", "8"]));
    assert_ne!(a, c);

    let r1 = stdout(&relcond(&["ratio", "--n", "4", "--trials", "40", "--points", "200", "--seed", "3"]));
    let r2 = Command::new(env!("CARGO_BIN_EXE_relcond"))
        .args(["ratio", "--n", "4", "--trials", "40", "--points", "200", "--seed", "3"])
        .env("RAYON_NUM_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(r1, stdout(&r2));
    let t = parse_csv(&r1).unwrap();
    assert!(t.meta.iter().any(|m| m == "rng: ChaCha8"));
    assert!(t.footer.iter().any(|m| m.starts_with("R: count=40")));
}
