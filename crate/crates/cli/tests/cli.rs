//! End-to-end tests of the `tdtensor` binary: generators, evaluation
//! routes, oracle cross-checks, report files, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num::BigInt;
use tdtensor::tensor::{parse_tensor, SparseTensor};
use tdtensor::zonotopes::parse_zonotopes;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdtensor"))
        .args(args)
        .output()
        .expect("binary executes")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_of(out: &Output) -> i32 {
    out.status.code().expect("terminated normally")
}

fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("fixture writes");
    path
}

const TWO_BY_TWO: &str = "tensor 2 2 2\n1 1 1\n1 2 2\n2 1 3\n2 2 4\n";

#[test]
fn prints_exact_permanent_for_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "id4.tns",
        "tensor 2 4 4\n1 1 1\n2 2 1\n3 3 1\n4 4 1\n",
    );
    let out = run(&["compute", "--fn", "perm", "--input", input.to_str().unwrap()]);
    assert_eq!(exit_of(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "1\n");
}

#[test]
fn grid_generator_reproduces_the_nine_by_nine_instance() {
    let out = run(&["gen", "grid", "--m", "3"]);
    assert_eq!(exit_of(&out), 0);
    let expected = "tensor 2 9 9\n\
                    1 2 1\n1 4 2\n\
                    2 3 1\n2 5 2\n\
                    3 3 3\n3 6 2\n\
                    4 5 1\n4 7 2\n\
                    5 6 1\n5 8 2\n\
                    6 2 3\n6 9 2\n\
                    7 7 3\n7 8 1\n\
                    8 4 3\n8 9 1\n\
                    9 1 3\n";
    assert_eq!(stdout_of(&out), expected);
}

#[test]
fn grid_permanent_is_864_and_matches_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("grid9.tns");
    let gen = run(&["gen", "grid", "--m", "3", "--output", input.to_str().unwrap()]);
    assert_eq!(exit_of(&gen), 0);
    let out = run(&[
        "compute",
        "--fn",
        "perm",
        "--input",
        input.to_str().unwrap(),
        "--oracle",
    ]);
    assert_eq!(exit_of(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "864\noracle: match\n");
}

#[test]
fn band_determinant_matches_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("band.tns");
    let gen = run(&[
        "gen", "band", "--n", "10", "--w1", "2", "--w2", "1", "--seed", "5", "--output",
        input.to_str().unwrap(),
    ]);
    assert_eq!(exit_of(&gen), 0);
    let out = run(&[
        "compute",
        "--fn",
        "det",
        "--input",
        input.to_str().unwrap(),
        "--oracle",
    ]);
    assert_eq!(exit_of(&out), 0, "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.ends_with("oracle: match\n"), "stdout: {text}");
}

#[test]
fn band_generator_is_seed_deterministic() {
    let a = run(&["gen", "band", "--n", "12", "--w1", "1", "--w2", "1", "--seed", "9"]);
    let b = run(&["gen", "band", "--n", "12", "--w1", "1", "--w2", "1", "--seed", "9"]);
    let c = run(&["gen", "band", "--n", "12", "--w1", "1", "--w2", "1", "--seed", "10"]);
    assert_eq!(stdout_of(&a), stdout_of(&b));
    assert_ne!(stdout_of(&a), stdout_of(&c));
}

#[test]
fn two_per_row_instances_have_two_entries_per_row() {
    let out = run(&["gen", "two-per-row", "--n", "8", "--seed", "4"]);
    assert_eq!(exit_of(&out), 0);
    let t: SparseTensor<BigInt> = parse_tensor(&stdout_of(&out)).expect("output parses back");
    assert_eq!(t.lens(), &[8, 8]);
    for i in 0..8 {
        assert_eq!(t.row_entries(i).count(), 2, "row {i}");
        assert!(t.get(&[i, i]).is_some(), "row {i} keeps its diagonal");
    }
}

#[test]
fn odd_order_hyperdeterminants_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "odd.tns", "tensor 3 2 2 2\n1 1 1 5\n2 2 2 7\n");
    let out = run(&["compute", "--fn", "hyperdet", "--input", input.to_str().unwrap()]);
    assert_eq!(exit_of(&out), 3);
    assert!(stderr_of(&out).contains("even tensor order"));
}

#[test]
fn unknown_flags_exit_with_the_usage_code() {
    let out = run(&["compute", "--bogus"]);
    assert_eq!(exit_of(&out), 2);
}

#[test]
fn missing_input_files_are_input_errors() {
    let out = run(&["compute", "--fn", "perm", "--input", "/no/such/file.tns"]);
    assert_eq!(exit_of(&out), 3);
}

#[test]
fn oversized_bags_exit_with_the_budget_code() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("dense.tns");
    let gen = run(&[
        "gen", "band", "--n", "31", "--w1", "30", "--w2", "30", "--output",
        input.to_str().unwrap(),
    ]);
    assert_eq!(exit_of(&gen), 0);
    let out = run(&["compute", "--fn", "perm", "--input", input.to_str().unwrap()]);
    assert_eq!(exit_of(&out), 4);
}

#[test]
fn supplied_decompositions_drive_all_three_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "m.tns", TWO_BY_TWO);
    let bipartite = write_file(dir.path(), "b.td", "s td 1 4 4\nb 1 1 2 3 4\n");
    let single = write_file(dir.path(), "s.td", "s td 1 2 2\nb 1 1 2\n");
    let perm_b = run(&[
        "compute", "--fn", "perm",
        "--input", input.to_str().unwrap(),
        "--td", bipartite.to_str().unwrap(),
        "--oracle",
    ]);
    assert_eq!(stdout_of(&perm_b), "10\noracle: match\n");
    let perm_c = run(&[
        "compute", "--fn", "perm",
        "--input", input.to_str().unwrap(),
        "--td", single.to_str().unwrap(),
        "--td-graph", "column",
        "--oracle",
    ]);
    assert_eq!(stdout_of(&perm_c), "10\noracle: match\n");
    let det_s = run(&[
        "compute", "--fn", "det",
        "--input", input.to_str().unwrap(),
        "--td", single.to_str().unwrap(),
        "--td-graph", "symmetrized",
        "--oracle",
    ]);
    assert_eq!(stdout_of(&det_s), "-2\noracle: match\n");
}

#[test]
fn stats_reports_carry_the_run_counters() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("grid9.tns");
    run(&["gen", "grid", "--m", "3", "--output", input.to_str().unwrap()]);
    let stats = dir.path().join("report.json");
    let out = run(&[
        "compute",
        "--fn", "perm",
        "--input", input.to_str().unwrap(),
        "--stats", stats.to_str().unwrap(),
    ]);
    assert_eq!(exit_of(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).expect("valid JSON");
    assert_eq!(report["function"], "perm");
    assert_eq!(report["n"], 9);
    assert_eq!(report["order"], 2);
    assert_eq!(report["result"], "864");
    assert_eq!(report["width_multi_part"], 3);
    assert_eq!(report["width_single_part"], 2);
    assert!(report["nodes"].as_u64().unwrap() >= 1);
    assert!(report["ring_mults"].as_u64().unwrap() > 0);
    assert!(report["wall_ms"].is_u64());
    let digest = report["input_digest"].as_str().unwrap();
    assert_eq!(digest.len(), 16);
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
    assert!(report["command"].as_str().unwrap().contains("compute"));
}

#[test]
fn rational_entries_evaluate_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "r.tns", "tensor 2 2 2\n1 1 1/3\n2 2 1\n");
    let out = run(&[
        "compute", "--fn", "det",
        "--input", input.to_str().unwrap(),
        "--oracle",
    ]);
    assert_eq!(exit_of(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "1/3\noracle: match\n");
}

#[test]
fn threads_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("grid9.tns");
    run(&["gen", "grid", "--m", "3", "--output", input.to_str().unwrap()]);
    let one = run(&["compute", "--fn", "perm", "--input", input.to_str().unwrap()]);
    let four = run(&[
        "compute", "--fn", "perm",
        "--input", input.to_str().unwrap(),
        "--threads", "4",
    ]);
    assert_eq!(stdout_of(&one), stdout_of(&four));
    assert_eq!(stdout_of(&one), "864\n");
}

#[test]
fn mixed_volume_of_two_unit_squares_is_two() {
    let dir = tempfile::tempdir().unwrap();
    let square = "z 2\n1 0\n0 1\n";
    let input = write_file(
        dir.path(),
        "squares.zon",
        &format!("zonotopes 2\n{square}{square}"),
    );
    let out = run(&["mvol", "--input", input.to_str().unwrap(), "--oracle"]);
    assert_eq!(exit_of(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "2\noracle: match\n");
}

#[test]
fn mvol_stats_reports_list_the_subset_counters() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("fd.zon");
    let gen = run(&[
        "gen", "few-directions", "--a", "1,2", "--b", "1,1", "--output",
        input.to_str().unwrap(),
    ]);
    assert_eq!(exit_of(&gen), 0);
    let stats = dir.path().join("report.json");
    let out = run(&[
        "mvol",
        "--input", input.to_str().unwrap(),
        "--oracle",
        "--stats", stats.to_str().unwrap(),
    ]);
    assert_eq!(exit_of(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "5\noracle: match\n");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).expect("valid JSON");
    assert_eq!(report["function"], "mvol");
    assert_eq!(report["n"], 2);
    assert_eq!(report["subsets"], 3);
    assert_eq!(report["regular_subsets"], 3);
    assert_eq!(report["result"], "5");
}

#[test]
fn subset_sum_systems_are_rejected_by_the_structured_engine() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ss.zon");
    let gen = run(&[
        "gen", "subset-sum", "--a", "1,-1", "--delta", "0", "--output",
        input.to_str().unwrap(),
    ]);
    assert_eq!(exit_of(&gen), 0);
    // The generated file is a valid system...
    let zs = parse_zonotopes(&std::fs::read_to_string(&input).unwrap()).expect("parses");
    assert_eq!(zs.dim(), 3);
    assert_eq!(zs.zonotopes().len(), 3);
    // ...but some generator points against its canonicalized direction, a
    // configuration the structured algorithm declines.
    let out = run(&["mvol", "--input", input.to_str().unwrap()]);
    assert_eq!(exit_of(&out), 3);
    assert!(stderr_of(&out).contains("negative coefficient"));
}

#[test]
fn direction_caps_exit_with_the_budget_code() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("fd.zon");
    run(&[
        "gen", "few-directions", "--a", "1,2", "--b", "1,1", "--output",
        input.to_str().unwrap(),
    ]);
    let out = run(&[
        "mvol",
        "--input", input.to_str().unwrap(),
        "--max-extra-directions", "0",
    ]);
    assert_eq!(exit_of(&out), 4);
}

#[test]
fn generator_parameter_validation_exits_with_the_usage_code() {
    let mismatched = run(&["gen", "few-directions", "--a", "1,2", "--b", "1"]);
    assert_eq!(exit_of(&mismatched), 2);
    let negative = run(&["gen", "few-directions", "--a", "1,-2", "--b", "1,1"]);
    assert_eq!(exit_of(&negative), 2);
    let tiny = run(&["gen", "two-per-row", "--n", "1"]);
    assert_eq!(exit_of(&tiny), 2);
}

#[test]
fn td_graph_flags_require_a_decomposition_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "m.tns", TWO_BY_TWO);
    let out = run(&[
        "compute", "--fn", "perm",
        "--input", input.to_str().unwrap(),
        "--td-graph", "column",
    ]);
    assert_eq!(exit_of(&out), 2);
}
