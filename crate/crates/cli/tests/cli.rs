//! End-to-end tests of the `ddgeom` binary: exit codes, report formats and
//! agreement with the library.

use std::path::PathBuf;
use std::process::{Command, Output};

use ddgeom::connection::{self, LatticePath};
use ddgeom::io;
use ddgeom::{linalg, Mat, Scalar, Site, Step};
use serde_json::Value;

struct Sandbox {
    dir: tempfile::TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_ddgeom"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }

    fn code(&self, args: &[&str]) -> i32 {
        self.run(args).status.code().unwrap()
    }

    fn json(&self, args: &[&str]) -> (i32, Value) {
        let out = self.run(args);
        let v = serde_json::from_slice(&out.stdout)
            .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
        (out.status.code().unwrap(), v)
    }

    fn gen(&self, out: &str, extra: &[&str]) {
        let mut args = vec!["gen", "--out", out];
        args.extend_from_slice(extra);
        assert_eq!(self.code(&args), 0, "gen {extra:?}");
    }
}

fn f(v: &Value, key: &str) -> f64 {
    v["summary"][key].as_f64().unwrap_or_else(|| panic!("missing {key} in {v}"))
}

#[test]
fn worked_examples() {
    let s = Sandbox::new();
    s.gen("c.bin", &["--kind", "pure-gauge", "--dims", "3,3", "--m", "2", "--seed", "7"]);
    let (code, rep) = s.json(&["flat", "--in", "c.bin"]);
    assert_eq!(code, 0);
    assert_eq!(rep["pass"], Value::Bool(true));
    assert!(f(&rep, "plaquette_deviation") <= 1e-12);
    assert_eq!(rep["tol"].as_f64(), Some(1e-10));

    s.gen("f.bin", &["--kind", "constant-flux", "--q", "2", "--dims", "8,8"]);
    let (code, rep) = s.json(&["charge", "--in", "f.bin"]);
    assert_eq!(code, 0);
    assert_eq!(rep["summary"]["charge"].as_i64(), Some(2));
    assert!(f(&rep, "residual") <= 1e-10);

    let (code, rep) = s.json(&["flat", "--in", "f.bin"]);
    assert_eq!(code, 1);
    assert_eq!(rep["pass"], Value::Bool(false));
    let expected = (Scalar::from_polar(1.0, 2.0 * std::f64::consts::PI * 2.0 / 64.0) - 1.0).norm();
    assert!((f(&rep, "plaquette_deviation") - expected).abs() <= 1e-12);
}

#[test]
fn usage_and_input_errors_exit_2() {
    let s = Sandbox::new();
    s.gen("c.bin", &["--kind", "random-gl", "--dims", "3,3", "--m", "2", "--seed", "1"]);
    s.gen("l.bin", &["--kind", "lax-pure-gauge", "--dims", "4,4", "--seed", "1"]);
    s.gen("g.bin", &["--kind", "gauge-transform", "--dims", "3,3", "--m", "2"]);
    let cases: &[&[&str]] = &[
        &["flat", "--in", "missing.bin"],
        &["flat", "--in", "c.bin", "--bogus"],
        &["frobnicate"],
        &["transport", "--in", "c.bin", "--path", "x+,q+"],
        &["transport", "--in", "c.bin", "--path", "x+,,y-"],
        &["transport", "--in", "c.bin", "--path", "x*"],
        &["transport", "--in", "c.bin", "--path", "x+", "--component", "3"],
        &["plaq", "--in", "c.bin", "--mu", "1", "--nu", "1"],
        &["plaq", "--in", "c.bin", "--mu", "0"],
        &["charge", "--in", "c.bin"],
        &["charge", "--in", "l.bin"],
        &["lax", "--in", "c.bin"],
        &["lax", "--in", "l.bin", "--target", "9,9"],
        &["flat", "--in", "g.bin"],
        &["bianchi", "--in", "c.bin"],
        &["chern", "--in", "c.bin"],
        &["gen", "--kind", "constant-flux", "--dims", "4,5", "--out", "x.bin"],
        &["gen", "--kind", "random-u1", "--dims", "4,4", "--m", "2", "--out", "x.bin"],
        &["gen", "--kind", "random-gl", "--dims", "4,a", "--out", "x.bin"],
        &["gauge", "--in", "c.bin", "--out", "x.bin", "--gauge", "l.bin"],
    ];
    for args in cases {
        let out = s.run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(!out.stderr.is_empty());
    }

    // a config with a future format version
    let bytes = std::fs::read(s.path("c.bin")).unwrap();
    let patched = {
        let mut b = bytes;
        let pos = b.windows(16).position(|w| w == b"format_version 1").unwrap();
        b[pos + 15] = b'9';
        b
    };
    std::fs::write(s.path("v9.bin"), patched).unwrap();
    let out = s.run(&["flat", "--in", "v9.bin"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));
}

#[test]
fn reports_are_reproducible_without_timestamps() {
    let a = Sandbox::new();
    let b = Sandbox::new();
    let gen = ["--kind", "random-gl", "--dims", "3,3,3", "--m", "2", "--scalar", "complex", "--seed", "42"];
    a.gen("c.bin", &gen);
    b.gen("c.bin", &gen);
    assert_eq!(std::fs::read(a.path("c.bin")).unwrap(), std::fs::read(b.path("c.bin")).unwrap());
    for cmd in [
        vec!["curv", "--in", "c.bin"],
        vec!["bianchi", "--in", "c.bin"],
        vec!["plaq", "--in", "c.bin", "--mu", "1", "--nu", "3"],
        vec!["--format", "csv", "flat", "--in", "c.bin"],
        vec!["limit", "--potential", "trig"],
    ] {
        let mut args = cmd.clone();
        args.push("--no-timestamp");
        let (ra, rb) = (a.run(&args), b.run(&args));
        assert_eq!(ra.stdout, rb.stdout, "{cmd:?}");
        assert!(!String::from_utf8_lossy(&ra.stdout).contains("timestamp"));
    }
    let (_, rep) = a.json(&["curv", "--in", "c.bin"]);
    assert!(rep["timestamp_unix"].as_u64().is_some());
    assert_eq!(rep["schema_version"].as_u64(), Some(1));
}

#[test]
fn csv_reports_parse() {
    let s = Sandbox::new();
    s.gen("l.bin", &["--kind", "lax-pure-gauge", "--dims", "5,5", "--m", "2", "--seed", "3"]);
    let out = s.run(&["--format", "csv", "--no-timestamp", "lax", "--in", "l.bin"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let (summary, table) = text.split_once("\n\n").expect("blank line before the table");
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(summary.as_bytes());
    let kv: Vec<(String, String)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string())
        })
        .collect();
    assert!(kv.contains(&("command".into(), "lax".into())));
    assert!(kv.contains(&("pass".into(), "true".into())));
    assert!(kv.iter().any(|(k, v)| k == "paths" && v == "70"));
    let mut rdr = csv::Reader::from_reader(table.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["x", "t", "additive", "multiplicative", "a_form"]
    );
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 16);
    for r in rows {
        assert!(r[2].parse::<f64>().unwrap() <= 1e-12);
    }

    let out = s.run(&["--format", "csv", "--no-timestamp", "limit", "--L-list", "8,16"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let (_, table) = text.split_once("\n\n").unwrap();
    let mut rdr = csv::Reader::from_reader(table.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["L", "a", "im_error", "re_error", "phase_error"]);
    assert_eq!(rdr.records().count(), 2);
}

#[test]
fn verification_commands_agree_with_the_library() {
    let s = Sandbox::new();
    s.gen("c.bin", &["--kind", "random-gl", "--dims", "3,3,3", "--m", "2", "--scalar", "complex", "--seed", "5"]);
    let cfg = io::read_config(s.path("c.bin")).unwrap();
    let u = cfg.transport().unwrap();

    let (code, rep) = s.json(&["curv", "--in", "c.bin"]);
    assert_eq!(code, 0);
    assert!(f(&rep, "components_vs_transport") <= 1e-12 * f(&rep, "scale"));
    let (code, rep) = s.json(&["bianchi", "--in", "c.bin"]);
    assert_eq!(code, 0);
    assert!(f(&rep, "max_residual") <= 1e-12);
    assert!(f(&rep, "max_contraction_expanded") <= 1e-12);
    let (code, rep) = s.json(&["flat", "--in", "c.bin"]);
    assert_eq!(code, 1);
    assert_eq!(rep["summary"]["holonomy_flat"], Value::Bool(false));

    // plaquette at one site, 1-based directions
    let (code, rep) = s.json(&["plaq", "--in", "c.bin", "--mu", "1", "--nu", "3", "--site", "2,0,1"]);
    assert_eq!(code, 0);
    let w = ddgeom::curvature::plaquette(&u, &Site::new(vec![2, 0, 1]), 0, 2).unwrap();
    let rows = rep["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let (r, c) = (row[1].as_u64().unwrap() as usize - 1, row[2].as_u64().unwrap() as usize - 1);
        let z = Scalar::new(row[3].as_f64().unwrap(), row[4].as_f64().unwrap());
        assert!((z - w[(r, c)]).norm() <= 1e-15);
    }

    // parallel transport of e_2 around a loop
    let (code, rep) = s.json(&["transport", "--in", "c.bin", "--path", "x+,y+,x-,y-", "--from", "1,1,0", "--component", "2"]);
    assert_eq!(code, 0);
    let p = LatticePath::new(
        Site::new(vec![1, 1, 0]),
        vec![Step::forward(0), Step::forward(1), Step::backward(0), Step::backward(1)],
    );
    let mut e2 = Mat::zeros(1, 2);
    e2[(0, 1)] = Scalar::new(1.0, 0.0);
    let want = connection::parallel_transport(&e2, &p, &u).unwrap();
    for row in rep["table"]["rows"].as_array().unwrap() {
        let c = row[0].as_u64().unwrap() as usize - 1;
        let z = Scalar::new(row[1].as_f64().unwrap(), row[2].as_f64().unwrap());
        assert!((z - want[(0, c)]).norm() <= 1e-15);
    }
    let hol = connection::path_ordered_product(&p, &u).unwrap();
    assert!((f(&rep, "holonomy_deviation") - linalg::max_abs_diff(&hol, &linalg::identity(2))).abs() <= 1e-15);
}

#[test]
fn gauge_command_preserves_flatness_and_charge() {
    let s = Sandbox::new();
    s.gen("f.bin", &["--kind", "constant-flux", "--q", "-3", "--dims", "8,8"]);
    assert_eq!(s.code(&["gauge", "--in", "f.bin", "--out", "g.bin", "--seed", "9"]), 0);
    let (code, rep) = s.json(&["charge", "--in", "g.bin"]);
    assert_eq!(code, 0);
    assert_eq!(rep["summary"]["charge"].as_i64(), Some(-3));
    let a = io::read_config(s.path("f.bin")).unwrap();
    let b = io::read_config(s.path("g.bin")).unwrap();
    assert_ne!(a, b);

    s.gen("p.bin", &["--kind", "pure-gauge", "--dims", "3,3,3", "--m", "3", "--scalar", "complex", "--seed", "2"]);
    s.gen("h.bin", &["--kind", "gauge-transform", "--dims", "3,3,3", "--m", "3", "--scalar", "complex", "--seed", "4"]);
    assert_eq!(s.code(&["gauge", "--in", "p.bin", "--out", "q.bin", "--gauge", "h.bin", "--encoding", "text"]), 0);
    let (code, _) = s.json(&["flat", "--in", "q.bin"]);
    assert_eq!(code, 0);

    // the stored field equals the library's gauge law
    let u = io::read_config(s.path("p.bin")).unwrap().transport().unwrap();
    let ddgeom::io::FieldData::Site(h) = io::read_config(s.path("h.bin")).unwrap().data else { panic!() };
    let g = ddgeom::GaugeTransform::new(h).unwrap();
    let want = connection::gauge_transform_u(&u, &g).unwrap();
    let got = io::read_config(s.path("q.bin")).unwrap().transport().unwrap();
    assert_eq!(got.links().max_abs_diff(want.links()), 0.0);
}

#[test]
fn chern_limit_and_lax_commands() {
    let s = Sandbox::new();
    s.gen("u.bin", &["--kind", "random-u1", "--dims", "2,2,2,2", "--seed", "8"]);
    let (code, rep) = s.json(&["chern", "--in", "u.bin", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(rep["summary"]["sites"].as_u64(), Some(16));
    let (code, rep) = s.json(&["chern", "--in", "u.bin", "--k", "1", "--dirs", "2,4", "--site", "1,0,1,0"]);
    assert_eq!(code, 0);
    let u = io::read_config(s.path("u.bin")).unwrap().transport().unwrap();
    let fcurv = ddgeom::curvature::curvature_from_u(&u).unwrap();
    let want = fcurv.component(1, 3).unwrap().at(&Site::new(vec![1, 0, 1, 0])).unwrap()[(0, 0)] * 2.0;
    assert!((f(&rep, "sum_re") - want.re).abs() <= 1e-14 && (f(&rep, "sum_im") - want.im).abs() <= 1e-14);

    let (code, rep) = s.json(&["limit", "--potential", "trig"]);
    assert_eq!(code, 0);
    assert!(f(&rep, "im_slope") >= 1.8);
    let (code, rep) = s.json(&["limit", "--potential", "zero"]);
    assert_eq!(code, 0);
    assert_eq!(rep["pass"], Value::Bool(true));
    let (code, _) = s.json(&["limit", "--potential", "trig", "--L-list", "8,16", "--min-slope", "5"]);
    assert_eq!(code, 1);

    s.gen("l.bin", &["--kind", "lax-pure-gauge", "--dims", "10,10", "--m", "2", "--scalar", "complex", "--seed", "6"]);
    let (code, rep) = s.json(&["lax", "--in", "l.bin", "--target", "6,6"]);
    assert_eq!(code, 0);
    assert_eq!(rep["summary"]["paths"].as_u64(), Some(924));
    assert!(f(&rep, "path_deviation") <= 1e-10);
    let (code, rep) = s.json(&["lax", "--in", "l.bin"]);
    assert_eq!(code, 0);
    assert_eq!(rep["inputs"]["target"].as_str(), Some("(8,8)"));

    // perturb one link inside the rectangle and the check fails
    let cfg = io::read_config(s.path("l.bin")).unwrap();
    let ddgeom::io::FieldData::Lax(mut sys) = cfg.data else { panic!() };
    let at = Site::new(vec![2, 2]);
    let old = sys.link(&at, 0).unwrap().clone();
    sys.set_link(&at, 0, old * Scalar::new(1.001, 0.0)).unwrap();
    io::write_config(s.path("bad.bin"), &io::ConfigFile::new(io::FieldData::Lax(sys)), io::Encoding::Binary).unwrap();
    let (code, rep) = s.json(&["lax", "--in", "bad.bin", "--target", "6,6"]);
    assert_eq!(code, 1);
    assert!(f(&rep, "path_deviation") > 1e-10);
}
