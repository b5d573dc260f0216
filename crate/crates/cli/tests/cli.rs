//! End-to-end checks of the `wpsys` binary: documented examples, exit
//! codes, format modes, the schema contract for `--json`, and manifest
//! replay.

use std::path::PathBuf;
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn wpsys(args: &[&str]) -> Run {
    wpsys_env(args, &[])
}

fn wpsys_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut command = Command::new(env!("CARGO_BIN_EXE_wpsys"));
    command.args(args).env_remove("WPSYS_TABLE");
    for (key, value) in env {
        command.env(key, value);
    }
    let output = command.output().expect("binary runs");
    Run {
        code: output.status.code().expect("no signal"),
        stdout: String::from_utf8(output.stdout).expect("stdout is utf-8"),
        stderr: String::from_utf8(output.stderr).expect("stderr is utf-8"),
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn volume_examples() {
    let run = wpsys(&["volume", "--g", "1", "--n", "1", "--at", "0"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("V = 1/6 pi^2 + 1/24 x1^2"));
    let pi_sixth = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    assert!(run.stdout.contains(&format!("value = {pi_sixth:.16e}")));

    let pants = wpsys(&["volume", "--g", "0", "--n", "3", "--at", "5,7,9"]);
    assert_eq!(pants.code, 0);
    assert!(pants.stdout.contains("value = 1.0000000000000000e0"));

    let malformed = wpsys(&["volume", "--g", "0", "--n", "3", "--at", "5,x,9"]);
    assert_eq!(malformed.code, 2);
}

#[test]
fn volume_unknown_type_names_the_bound() {
    let run = wpsys(&["volume", "--g", "9", "--n", "9"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("2g - 2 + n <= 4"), "{}", run.stderr);
}

#[test]
fn integrals_examples() {
    let zero = wpsys(&["integrals", "T", "--L", "1"]);
    assert_eq!(zero.code, 0);
    assert!(zero.stdout.contains("= 0.0000000000000000e0"));

    let small = wpsys(&["integrals", "I", "--L", "0.1"]);
    let value: f64 = small
        .stdout
        .lines()
        .next()
        .unwrap()
        .rsplit(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 0.0025).abs() < 2e-6, "I(0.1) printed as {value}");

    let l0 = wpsys(&["integrals", "L0", "--g", "1000000"]);
    assert_eq!(l0.code, 0);
    assert!(l0.stdout.contains("forward check"));
}

#[test]
fn genus_scientific_notation_matches_plain() {
    let plain = wpsys(&["bound", "--g", "10000", "--n", "2", "--L", "4"]);
    let scientific = wpsys(&["bound", "--g", "1e4", "--n", "2", "--L", "4"]);
    assert_eq!(plain.code, 0);
    assert_eq!(plain.stdout, scientific.stdout);
    assert_eq!(wpsys(&["bound", "--g", "1.5", "--n", "2", "--L", "4"]).code, 2);
}

#[test]
fn estimate_l0_witness_and_odd_terms() {
    let run = wpsys(&["estimate", "--g", "1e6", "--L-from-L0"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("L0 witness"));
    // At the critical window the forward value matches ln(g)/2 closely.
    let line = run
        .stdout
        .lines()
        .find(|line| line.contains("L0 witness"))
        .unwrap();
    assert!(line.contains("residual"), "{line}");

    assert_eq!(
        wpsys(&["estimate", "--g", "100", "--L", "1", "--n-terms", "3"]).code,
        2
    );
    assert_eq!(wpsys(&["estimate", "--g", "100"]).code, 2);
}

#[test]
fn bound_terms_add_up_and_vanish_without_boundaries() {
    let run = wpsys(&["bound", "--g", "1e6", "--n", "14", "--L", "10", "--csv"]);
    assert_eq!(run.code, 0);
    let mut terms = Vec::new();
    let mut total = None;
    for line in run.stdout.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let value: f64 = fields[2].parse().unwrap();
        assert!(value >= 0.0);
        match fields[0] {
            "term_low_complexity" | "term_mid_complexity" | "term_tail_primary"
            | "term_tail_secondary" => terms.push(value),
            "total" => total = Some(value),
            _ => {}
        }
    }
    let total = total.unwrap();
    let sum: f64 = terms.iter().sum();
    assert_eq!(terms.len(), 4);
    assert!((sum - total).abs() <= 1e-15 * total.max(1.0));

    let closed = wpsys(&["bound", "--g", "1e6", "--n", "0", "--L", "10", "--csv"]);
    for line in closed.stdout.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if matches!(fields[0], "term_tail_primary" | "term_tail_secondary") {
            assert_eq!(fields[2].parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn bound_sweep_decreases_under_the_theorem_scaling() {
    let mut previous: Option<f64> = None;
    for exponent in 3..=8 {
        let genus: u64 = 10u64.pow(exponent);
        let window = 1.5 * (genus as f64).ln();
        let boundaries = (genus as f64).ln().floor() as u64;
        let run = wpsys(&[
            "bound",
            "--g",
            &genus.to_string(),
            "--n",
            &boundaries.to_string(),
            "--L",
            &format!("{window:.17}"),
            "--csv",
        ]);
        let total: f64 = run
            .stdout
            .lines()
            .find(|line| line.starts_with("total,"))
            .unwrap()
            .split(',')
            .nth(2)
            .unwrap()
            .parse()
            .unwrap();
        if let Some(last) = previous {
            assert!(total < last, "g = {genus}: {total} !< {last}");
        }
        previous = Some(total);
    }
}

#[test]
fn simulate_is_deterministic_and_rejects_zero_trials() {
    let args = ["simulate", "--trials", "40", "--seed", "11", "--L", "2.5"];
    let first = wpsys(&args);
    let second = wpsys(&args);
    assert_eq!(first.code, 0);
    assert_eq!(first.stdout, second.stdout);

    assert_eq!(wpsys(&["simulate", "--trials", "0", "--L", "2.5"]).code, 2);
}

#[test]
fn constants_file_scales_the_bound() {
    let path = scratch("constants_double.json");
    std::fs::write(&path, r#"{"c1": 2.0}"#).unwrap();
    let base = wpsys(&["bound", "--g", "100", "--n", "0", "--L", "3", "--csv"]);
    let doubled = wpsys(&[
        "bound",
        "--g",
        "100",
        "--n",
        "0",
        "--L",
        "3",
        "--csv",
        "--constants",
        path.to_str().unwrap(),
    ]);
    let low = |run: &Run| -> f64 {
        run.stdout
            .lines()
            .find(|line| line.starts_with("term_low_complexity,"))
            .unwrap()
            .split(',')
            .nth(2)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(2.0 * low(&base), low(&doubled));

    let missing = wpsys(&[
        "bound", "--g", "100", "--n", "0", "--L", "3", "--constants", "/nonexistent.json",
    ]);
    assert_eq!(missing.code, 4);
}

#[test]
fn table_can_come_from_a_file_or_the_environment() {
    let builtin = wpsys(&["volume", "--g", "2", "--n", "0"]);
    let path = scratch("table_copy.json");
    std::fs::write(
        &path,
        std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../core/data/wp_table.json"
        ))
        .unwrap(),
    )
    .unwrap();
    let via_flag = wpsys(&["volume", "--g", "2", "--n", "0", "--table", path.to_str().unwrap()]);
    let via_env = wpsys_env(
        &["volume", "--g", "2", "--n", "0"],
        &[("WPSYS_TABLE", path.to_str().unwrap())],
    );
    assert_eq!(builtin.stdout, via_flag.stdout);
    assert_eq!(builtin.stdout, via_env.stdout);

    let broken = wpsys(&["volume", "--g", "2", "--n", "0", "--table", "/nonexistent.json"]);
    assert_eq!(broken.code, 4);
}

#[test]
fn json_outputs_validate_against_the_shipped_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/output.schema.json")).unwrap();
    let compiled = jsonschema::JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft7)
        .compile(&schema)
        .expect("schema compiles");

    let invocations: Vec<Vec<&str>> = vec![
        vec!["volume", "--g", "1", "--n", "2", "--at", "1.5,2.5"],
        vec!["volume", "--g", "3", "--n", "0"],
        vec!["integrals", "I", "--L", "2"],
        vec!["integrals", "T", "--L", "5"],
        vec!["integrals", "Tinv", "--y", "3"],
        vec!["integrals", "L0", "--g", "1e6"],
        vec!["integrals", "C"],
        vec!["estimate", "--g", "1e4", "--L", "2"],
        vec!["estimate", "--g", "4", "--L", "0.5"],
        vec!["estimate", "--g", "1e6", "--L-from-L0"],
        vec!["bound", "--g", "1e5", "--n", "7", "--L", "8"],
        vec!["simulate", "--trials", "30", "--seed", "3", "--L", "2"],
    ];
    for mut args in invocations {
        args.push("--json");
        let run = wpsys(&args);
        assert_eq!(run.code, 0, "{args:?}: {}", run.stderr);
        let instance: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
        let details: Vec<String> = match compiled.validate(&instance) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| e.to_string()).collect(),
        };
        assert!(details.is_empty(), "{args:?} violates the schema: {details:?}");
    }
}

#[test]
fn every_command_replays_byte_identically() {
    let recordings: Vec<(&str, Vec<&str>)> = vec![
        ("volume", vec!["volume", "--g", "1", "--n", "2", "--at", "2,3"]),
        ("volume_csv", vec!["volume", "--g", "0", "--n", "4", "--csv"]),
        ("integrals_i", vec!["integrals", "I", "--L", "3", "--json"]),
        ("integrals_l0", vec!["integrals", "L0", "--g", "1e5"]),
        ("estimate", vec!["estimate", "--g", "1e5", "--L", "3"]),
        ("bound", vec!["bound", "--g", "1e4", "--n", "5", "--L", "6", "--json"]),
        (
            "simulate",
            vec!["simulate", "--trials", "60", "--seed", "17", "--L", "2", "--csv"],
        ),
    ];
    for (name, mut args) in recordings {
        let path = scratch(&format!("manifest_{name}.json"));
        let path_str = path.to_str().unwrap().to_string();
        args.push("--manifest");
        args.push(&path_str);
        let recorded = wpsys(&args);
        assert_eq!(recorded.code, 0, "{name}: {}", recorded.stderr);

        let replayed = wpsys(&["replay", "--manifest", &path_str]);
        assert_eq!(replayed.code, 0, "{name}: {}", replayed.stderr);
        assert_eq!(replayed.stdout, recorded.stdout, "{name} replay differs");
        assert!(replayed.stderr.contains("replay verified"), "{name}");
    }
}

#[test]
fn replay_detects_a_tampered_digest() {
    let path = scratch("manifest_tampered.json");
    let path_str = path.to_str().unwrap();
    let run = wpsys(&["integrals", "C", "--manifest", path_str]);
    assert_eq!(run.code, 0);
    let tampered = std::fs::read_to_string(&path)
        .unwrap()
        .replace("sha256:", "sha256:00");
    std::fs::write(&path, tampered).unwrap();
    let replayed = wpsys(&["replay", "--manifest", path_str]);
    assert_eq!(replayed.code, 1);
    assert!(replayed.stderr.contains("replay mismatch"));

    assert_eq!(wpsys(&["replay", "--manifest", "/nonexistent.json"]).code, 4);
}

#[test]
fn manifest_goes_to_stderr_when_no_path_is_given() {
    let run = wpsys(&["integrals", "T", "--L", "2"]);
    assert_eq!(run.code, 0);
    let manifest_line = run
        .stderr
        .lines()
        .find(|line| line.starts_with('{'))
        .expect("manifest line on stderr");
    let manifest: serde_json::Value = serde_json::from_str(manifest_line).unwrap();
    assert_eq!(manifest["command"], "integrals");
    assert!(manifest["outputs_digest"]
        .as_str()
        .unwrap()
        .starts_with("sha256:"));
}
