//! Acceptance criterion 12: identical input file, flags, and seed
//! produce byte-identical reports on consecutive runs.

use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pickdisc")
}

fn run_bytes(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(bin()).args(args).output().unwrap();
    (out.status.code(), out.stdout)
}

#[test]
fn acceptance_12_report_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    std::fs::write(
        &pair,
        r#"{"nodes": [[0.0, 0.0], [0.5, 0.0]], "values": [[0.0, 0.0], [0.25, 0.0]]}"#,
    )
    .unwrap();
    let five = dir.path().join("five.json");
    std::fs::write(
        &five,
        r#"{"nodes": [[0.0, 0.0], [0.5, 0.0], [-0.4, 0.2], [0.1, -0.6], [0.3, 0.4]],
           "values": [[0.0, 0.0], [0.2, 0.05], [-0.15, 0.1], [0.05, -0.25], [0.1, 0.2]]}"#,
    )
    .unwrap();

    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", pair.to_str().unwrap()],
        vec!["solvable", five.to_str().unwrap()],
        // Sampled permutation sweep: 5! = 120 > 50 draws.
        vec![
            "triangle",
            five.to_str().unwrap(),
            "--permutations",
            "50",
            "--seed",
            "11",
        ],
        vec![
            "sampling",
            pair.to_str().unwrap(),
            "--seed",
            "7",
            "--family-size",
            "10",
            "--max-degree",
            "2",
            "--grid-radius",
            "3",
            "--grid-step",
            "0.4",
        ],
    ];
    for args in &cases {
        let (code_a, bytes_a) = run_bytes(args);
        let (code_b, bytes_b) = run_bytes(args);
        assert_eq!(code_a, Some(0), "command {args:?} failed");
        assert_eq!(code_a, code_b);
        assert_eq!(
            bytes_a, bytes_b,
            "reports differ between consecutive runs for {args:?}"
        );
    }
    println!(
        "ACCEPTANCE 12 report-determinism: PASS ({} commands byte-identical across runs)",
        cases.len()
    );
}
