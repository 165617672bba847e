use std::path::PathBuf;
use std::process::{Command, Output};

use anticycle::config::ConfigFile;
use anticycle::report::flatten;
use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anticycle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.push("--json");
    let o = run(&full);
    let text = stdout(&o);
    let v = if text.is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&text).unwrap()
    };
    (o.status.code().unwrap(), v)
}

#[test]
fn zariski_report_for_fixture_c() {
    let o = run(&["zariski", "--file", &fixture("fixtureC.cfg")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in ["decomposition.p: (1, 1/2, 1, 1/2)", "m0: 2", "l: (2, 1, 2, 1)", "d: 0"] {
        assert!(text.lines().any(|l| l == line), "missing `{line}` in\n{text}");
    }
}

#[test]
fn intnums_for_fixture_c() {
    let o = run(&["intnums", "--file", &fixture("fixtureC.cfg"), "--rho", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("C_{1,2}: -1\n"));
    assert!(text.contains("Delta_1: 1\n"));
    let neg = run(&[
        "intnums",
        "--file",
        &fixture("fixtureC.cfg"),
        "--rho",
        "-3",
        "--r",
        "-2",
    ]);
    assert!(stdout(&neg).contains("C_{1,2}: 3\n"));
}

#[test]
fn exit_codes() {
    let cases: [(&[&str], i32); 9] = [
        (&["adim", "--file", &fixture("fixtureC-constfinite.cfg")], 3),
        (&["adim", "--file", &fixture("fixtureC-nonconstant.cfg")], 0),
        (&["adim", "--file", &fixture("fixtureA-constfinite.cfg")], 0),
        (&["adim", "--file", &fixture("fixtureE.cfg")], 0),
        (&["zariski", "--file", &fixture("invalid-key.cfg")], 2),
        (&["zariski", "--file", &fixture("invalid-n-nonreal.cfg")], 2),
        (&["adim", "--file", &fixture("fixtureD.cfg")], 2),
        (&["zariski", "--file", &fixture("does-not-exist.cfg")], 1),
        (&["fixed", "--file", &fixture("fixtureB.cfg"), "--rho", "1"], 1),
    ];
    for (args, code) in cases {
        let o = run(args);
        assert_eq!(
            o.status.code(),
            Some(code),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn parse_errors_name_the_line() {
    let o = run(&["zariski", "--file", &fixture("invalid-key.cfg")]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 4: unknown key `colour`"), "{err}");
}

#[test]
fn adim_verdicts() {
    let cases = [
        ("fixtureA-constfinite.cfg", "a2"),
        ("fixtureC-nonconstant.cfg", "a1"),
        ("fixtureC-constinfinite.cfg", "a1"),
        ("fixtureC-constfinite.cfg", "inconsistent"),
        ("fixtureE.cfg", "a3"),
        ("fixtureB.cfg", "a1"),
        ("elliptic-n6.cfg", "a1"),
        ("elliptic-n4-finite.cfg", "a2"),
    ];
    for (file, verdict) in cases {
        let (_, v) = json(&["adim", "--file", &fixture(file)]);
        assert_eq!(v["verdict"], verdict, "{file}");
        assert_eq!(v["bound_respected"], true, "{file}");
    }
}

#[test]
fn json_and_human_agree() {
    let commands: [&[&str]; 9] = [
        &["zariski", "--file", &fixture("fixtureC.cfg")],
        &["classify", "--file", &fixture("fixtureE.cfg")],
        &["blowup", "--file", &fixture("fixtureC.cfg"), "--node", "2"],
        &["blowdown", "--file", &fixture("fixtureD.cfg"), "--component", "2"],
        &["contract", "--file", &fixture("fixtureC.cfg")],
        &["fibers", "--file", &fixture("fixtureC.cfg")],
        &["intnums", "--file", &fixture("fixtureC.cfg"), "--rho", "2"],
        &["fixed", "--file", &fixture("fixtureC.cfg"), "--rho", "1"],
        &["adim", "--file", &fixture("fixtureC-constfinite.cfg")],
    ];
    for args in commands {
        let human = stdout(&run(args));
        let (_, v) = json(args);
        let mut flat = Vec::new();
        for (k, inner) in v.as_object().unwrap() {
            flatten(k, inner, &mut flat);
        }
        let rendered: String = flat.iter().map(|(k, x)| format!("{k}: {x}\n")).collect();
        assert_eq!(rendered, human, "{args:?}");
    }
}

#[test]
fn surgery_commands() {
    let (_, up) = json(&[
        "blowup",
        "--file",
        &fixture("fixtureA.cfg"),
        "--node",
        "1",
        "--drop-reality",
    ]);
    assert_eq!(up["after"]["self_ints"], serde_json::json!([-3, -1, -3]));
    assert_eq!(up["transported_l"], serde_json::json!([1, 2, 1]));
    let (_, pair) = json(&["blowup", "--file", &fixture("fixtureA.cfg"), "--node", "1"]);
    assert_eq!(pair["after"]["n"], 5);
    let (_, smooth) = json(&[
        "blowup",
        "--file",
        &fixture("fixtureC.cfg"),
        "--smooth",
        "--component",
        "2",
    ]);
    assert_eq!(smooth["after"]["self_ints"], serde_json::json!([-1, -5, -1, -4]));
    assert_eq!(smooth["p_is_zero"], true);
    let (code, _) = json(&["blowdown", "--file", &fixture("fixtureC.cfg"), "--component", "2"]);
    assert_eq!(code, 1);
    let (_, down) = json(&["blowdown", "--file", &fixture("fixtureD.cfg"), "--component", "2"]);
    assert_eq!(down["after"]["self_ints"], serde_json::json!([-2, -2]));
    let (_, none) = json(&["contract", "--file", &fixture("fixtureB.cfg")]);
    assert_eq!(none["found"], false);
}

#[test]
fn fixed_and_pluri_commands() {
    let (_, ok) = json(&["fixed", "--file", &fixture("fixtureC.cfg"), "--rho", "3", "--r", "-5"]);
    assert_eq!(ok["holds"], true);
    let (_, zero) = json(&["fixed", "--file", &fixture("fixtureC.cfg"), "--rho", "0"]);
    assert_eq!(zero["holds"], false);
    assert_eq!(zero["steps"][0]["holds"], false);
    let (_, dim) = json(&[
        "pluri",
        "--file",
        &fixture("fixtureC-constfinite.cfg"),
        "--r",
        "3",
        "--nu",
        "5",
    ]);
    assert_eq!(dim["dimension"], 3);
    let (code, _) = json(&[
        "pluri",
        "--file",
        &fixture("fixtureC-nonconstant.cfg"),
        "--r",
        "1",
        "--nu",
        "1",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn fixtures_are_deterministic_and_parse() {
    let a = stdout(&run(&["fixtures", "--seed", "3", "--count", "20"]));
    let b = stdout(&run(&["fixtures", "--seed", "3", "--count", "20"]));
    assert_eq!(a, b);
    let blocks: Vec<&str> = a.split("\n\n").filter(|s| !s.trim().is_empty()).collect();
    assert_eq!(blocks.len(), 20);
    for block in blocks {
        let f = ConfigFile::parse(block).unwrap();
        assert_eq!(f.cycle_config().unwrap().validate(), Ok(()));
        assert_eq!(ConfigFile::parse(&f.render()).unwrap(), f);
    }
}

#[test]
fn oracle_check_command() {
    let (code, v) = json(&["oracle-check", "--seed", "5", "--count", "40"]);
    assert_eq!(code, 0);
    assert_eq!(v["agree"], true);
    assert_eq!(v["checked"], 85);
    let (code, v) = json(&["oracle-check", "--file", &fixture("fixtureE.cfg")]);
    assert_eq!(code, 0);
    assert_eq!(v["checked"], 1);
}

#[test]
fn fixture_files_round_trip() {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures"].iter().collect();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if let Ok(f) = ConfigFile::parse(&text) {
            assert_eq!(ConfigFile::parse(&f.render()).unwrap(), f, "{}", path.display());
        }
    }
}
