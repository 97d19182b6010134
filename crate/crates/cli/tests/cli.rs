//! End-to-end command tests: files in, reports out, exit codes partitioned,
//! certificates replayable, tampering detected.

use conekit_cli::{run_tokens, verify_report};
use std::io::Write;
use std::path::PathBuf;

fn write_file(dir: &tempfile::TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

fn orthant2_json() -> &'static str {
    r#"{"kind":"poly_v","ambient":2,"generators":[["1","0"],["0","1"]]}"#
}

#[test]
fn cone_member_inside_exits_zero_with_combination() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write_file(&dir, "cone.json", orthant2_json());
    let vec = write_file(&dir, "x.json", r#"{"vector":["1","2"]}"#);
    let (report, code) = run_tokens(&[
        "cone",
        "member",
        cone.to_str().unwrap(),
        vec.to_str().unwrap(),
        "--exact",
    ])
    .unwrap();
    assert_eq!(code, 0);
    let json = serde_json::to_string(&report).unwrap();
    assert!(json.contains("\"verdict\":\"yes\""));
    assert!(json.contains("combination"));
    let outcome = verify_report(&report);
    assert!(outcome.ok, "{:?}", outcome.failures);
}

#[test]
fn cone_member_outside_exits_one_with_separator() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write_file(&dir, "cone.json", orthant2_json());
    let vec = write_file(&dir, "x.json", r#"{"vector":["-1","0"]}"#);
    let (report, code) = run_tokens(&[
        "cone",
        "member",
        cone.to_str().unwrap(),
        vec.to_str().unwrap(),
    ])
    .unwrap();
    assert_eq!(code, 1);
    assert!(verify_report(&report).ok);
}

#[test]
fn map_cp_on_transpose_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    // The transpose map on Her_2: diagonal (1, 1, 1, −1) in the fixed basis.
    let map = write_file(
        &dir,
        "map.json",
        r#"{"dom_d":2,"cod_d":2,"matrix":[["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","-1"]]}"#,
    );
    let (report, code) = run_tokens(&["map", "cp", map.to_str().unwrap()]).unwrap();
    assert_eq!(code, 1);
    let json = serde_json::to_string(&report).unwrap();
    assert!(json.contains("negative_form"));
    assert!(verify_report(&report).ok);
}

#[test]
fn tft_verify_exits_zero() {
    let (report, code) = run_tokens(&["tft", "verify", "--m", "2", "--k", "2"]).unwrap();
    assert_eq!(code, 0);
    assert!(verify_report(&report).ok);
}

#[test]
fn tft_witness_replays_exactly() {
    let (report, code) = run_tokens(&["tft", "witness", "--m", "2"]).unwrap();
    assert_eq!(code, 0);
    assert!(verify_report(&report).ok);
}

#[test]
fn schema_violation_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write_file(&dir, "cone.json", r#"{"kind":"poly_v","ambient":2}"#);
    let vec = write_file(&dir, "x.json", r#"{"vector":["1","2"]}"#);
    let err = run_tokens(&[
        "cone",
        "member",
        cone.to_str().unwrap(),
        vec.to_str().unwrap(),
    ]);
    assert!(err.is_err());
    let msg = err.err().unwrap().message;
    assert!(msg.contains("line"), "diagnostic should carry a location: {msg}");
}

#[test]
fn unknown_verdict_exits_two() {
    // Block-positivity of a non-trivial matrix at 3⊗3 lands outside every
    // exact criterion and the heuristic floor: Unknown, exit 2.
    let dir = tempfile::tempdir().unwrap();
    let psd3 = r#"{"kind":"psd","d":3}"#;
    let left = write_file(&dir, "l.json", psd3);
    let right = write_file(&dir, "r.json", psd3);
    let (_, code) = run_tokens(&[
        "cone",
        "tensor",
        left.to_str().unwrap(),
        right.to_str().unwrap(),
        "--kind",
        "max",
    ])
    .unwrap();
    assert_eq!(code, 0); // tensor construction itself succeeds
    // Membership of a psd-but-not-obviously-block-positive element.
    let node = write_file(
        &dir,
        "node.json",
        r#"{"kind":"max_tensor","left":{"kind":"psd","d":3},"right":{"kind":"psd","d":3}}"#,
    );
    // The identity at 3⊗3 in tensor coordinates: kron of coords is the
    // diagonal-unit pattern.
    let mut coords = vec!["0".to_string(); 81];
    for a in 0..3 {
        for b in 0..3 {
            coords[a * 9 + b] = "1".into();
        }
    }
    let x = write_file(
        &dir,
        "x.json",
        &format!(
            r#"{{"vector":[{}]}}"#,
            coords
                .iter()
                .map(|s| format!("\"{s}\""))
                .collect::<Vec<_>>()
                .join(",")
        ),
    );
    let (report, code) = run_tokens(&[
        "cone",
        "member",
        node.to_str().unwrap(),
        x.to_str().unwrap(),
        "--budget",
        "8",
    ])
    .unwrap();
    assert_eq!(code, 2, "{}", serde_json::to_string(&report).unwrap());
}

#[test]
fn verify_detects_single_field_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write_file(&dir, "cone.json", orthant2_json());
    let vec = write_file(&dir, "x.json", r#"{"vector":["1","2"]}"#);
    let (report, _) = run_tokens(&[
        "cone",
        "member",
        cone.to_str().unwrap(),
        vec.to_str().unwrap(),
    ])
    .unwrap();
    assert!(verify_report(&report).ok);

    // Tamper with one combination coefficient.
    let mut json = serde_json::to_value(&report).unwrap();
    let coeff = json
        .pointer_mut("/results/0/verdict/certificate/coeffs/0")
        .unwrap();
    *coeff = serde_json::Value::String("2".into());
    let tampered: conekit_cli::RunReport = serde_json::from_value(json).unwrap();
    assert!(!verify_report(&tampered).ok);

    // Tamper with the embedded input instead.
    let mut json = serde_json::to_value(&report).unwrap();
    let entry = json.pointer_mut("/inputs/1/content/vector/0").unwrap();
    *entry = serde_json::Value::String("3".into());
    let tampered: conekit_cli::RunReport = serde_json::from_value(json).unwrap();
    assert!(!verify_report(&tampered).ok);
}

#[test]
fn binary_writes_report_and_propagates_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cone = write_file(&dir, "cone.json", orthant2_json());
    let vec = write_file(&dir, "x.json", r#"{"vector":["-1","0"]}"#);
    let out = dir.path().join("report.json");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_conekit"))
        .args([
            "cone",
            "member",
            cone.to_str().unwrap(),
            vec.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let report: conekit_cli::RunReport =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(verify_report(&report).ok);

    // The verify subcommand accepts the stored report.
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_conekit"))
        .args(["verify", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    // Input errors exit 3.
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_conekit"))
        .args(["cone", "dual", dir.path().join("missing.json").to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn json_round_trip_on_random_domain_values() {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let cone = random_cone(&mut rng, 0);
        let json = serde_json::to_string(&cone).unwrap();
        let back: conekit::cones::ConeRep = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cone);
    }
    // Maps and vectors too.
    for _ in 0..10 {
        let dom = rng.random_range(1..=2usize);
        let cod = rng.random_range(1..=2usize);
        let matrix: Vec<Vec<String>> = (0..cod * cod)
            .map(|_| {
                (0..dom * dom)
                    .map(|_| format!("{}/{}", rng.random_range(-9..=9), rng.random_range(1..=9)))
                    .collect()
            })
            .collect();
        let json = serde_json::json!({"dom_d": dom, "cod_d": cod, "matrix": matrix});
        let parsed: conekit_cli::io::MapInput = serde_json::from_value(json).unwrap();
        let back = serde_json::to_value(&parsed).unwrap();
        let reparsed: conekit_cli::io::MapInput = serde_json::from_value(back).unwrap();
        assert_eq!(
            serde_json::to_string(&parsed).unwrap(),
            serde_json::to_string(&reparsed).unwrap()
        );
    }
}

fn random_cone(rng: &mut rand_chacha::ChaCha8Rng, depth: usize) -> conekit::cones::ConeRep {
    use conekit::cones::ConeRep;
    use conekit::scalar::{rat, ratio};
    use rand::Rng;
    let pick = if depth >= 2 {
        rng.random_range(0..5)
    } else {
        rng.random_range(0..7)
    };
    match pick {
        0 => {
            let n = rng.random_range(1..=3);
            let gens = (0..rng.random_range(1..=4))
                .map(|_| {
                    (0..n)
                        .map(|_| ratio(rng.random_range(-5..=5), rng.random_range(1..=3)))
                        .collect()
                })
                .collect();
            ConeRep::poly_v(n, gens)
        }
        1 => {
            let n = rng.random_range(1..=3);
            let hs = (0..rng.random_range(0..=3))
                .map(|_| (0..n).map(|_| rat(rng.random_range(-5..=5))).collect())
                .collect();
            ConeRep::poly_h(n, hs)
        }
        2 => ConeRep::Lorentz {
            d: rng.random_range(1..=3),
        },
        3 => ConeRep::Psd {
            d: rng.random_range(1..=3),
        },
        4 => ConeRep::PsdTensor {
            sides: vec![rng.random_range(1..=2), rng.random_range(1..=2)],
        },
        5 => ConeRep::min_tensor_node(random_cone(rng, depth + 1), random_cone(rng, depth + 1)),
        _ => ConeRep::max_tensor_node(random_cone(rng, depth + 1), random_cone(rng, depth + 1)),
    }
}
