use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use stochlab::io::{parse_bitset, parse_permutation, render_bitset, render_permutation};
use stochlab::{load_bitset, run_experiment, save_bitset, ExperimentConfig};
use stochlab_core::{BitPrefix, FinitePermutation};

fn stochlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stochlab")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_big_reports_the_identity_count() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.cfg"), "# identity at n = 3\nn = 3\npermutation = identity\n").unwrap();
    let o = stochlab(dir.path(), &["count-big", "--config", "c.cfg", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("CHECK bigness-bound[identity] PASS count 2 bound 2283/280\n"));
    assert_eq!(fs::read_to_string(dir.path().join("r/report.txt")).unwrap(), stdout(&o));
}

#[test]
fn stage_one_host_passes_its_audits() {
    let dir = tempfile::tempdir().unwrap();
    let o = stochlab(dir.path(), &["construct-h", "--stages", "1", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("CHECK block-1-largeness PASS"));
    let host = stochlab::load_permutation(&dir.path().join("r/host.perm")).unwrap();
    assert_eq!(host.size(), 14);
}

#[test]
fn oversized_host_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = stochlab(dir.path(), &["construct-h", "--stages", "3", "--out", "r"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("CHECK construct-h FAIL range error"));
}

#[test]
fn nonadaptive_stage_one_checks_g_and_p() {
    let dir = tempfile::tempdir().unwrap();
    let o = stochlab(dir.path(), &["nonadaptive-game", "--stages", "1", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "CHECK G_1 PASS n=2\nCHECK P_1[identity] PASS from door 0\n");
    let a = load_bitset(&dir.path().join("r/assignment.bits")).unwrap();
    assert_eq!(a.members().collect::<Vec<_>>(), vec![0, 5]);
    let csv = fs::read_to_string(dir.path().join("r/received.csv")).unwrap();
    assert!(csv.starts_with("n,rho_exact,rho_decimal\n1,"));
    assert_eq!(csv.lines().count(), 15);
}

#[test]
fn config_errors_exit_two_with_the_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "stages = 1\nwitness-cap = lots\n").unwrap();
    let o = stochlab(dir.path(), &["adaptive-game", "--config", "bad.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config line 2"));
}

#[test]
fn generated_inputs_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = stochlab(dir.path(), &["alpha-shift", "--out", "r"]);
    assert_eq!(o.status.code(), Some(2));
    let o = stochlab(dir.path(), &["alpha-shift", "--seed", "5", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn mismatched_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.cfg"), "kind = build-x\n").unwrap();
    let o = stochlab(dir.path(), &["count-big", "--config", "c.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn identical_runs_produce_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["weak-stochastic-trace", "--seed", "17", "--nmin", "4"],
        &["build-x", "--stages", "3"],
        &["alpha-shift", "--seed", "2"],
        &["nonadaptive-game", "--stages", "1"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let a = format!("a{i}");
        let b = format!("b{i}");
        let first = stochlab(dir.path(), &[args, &["--out", &a][..]].concat());
        let second = stochlab(dir.path(), &[args, &["--out", &b][..]].concat());
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        assert_eq!(first.stdout, second.stdout);
        assert_eq!(snapshot(&dir.path().join(&a)), snapshot(&dir.path().join(&b)));
    }
}

#[test]
fn weak_trace_reads_a_saved_bitset() {
    let dir = tempfile::tempdir().unwrap();
    let a: BitPrefix = "1101001110100101".parse().unwrap();
    save_bitset(&dir.path().join("a.bits"), &a).unwrap();
    fs::write(dir.path().join("t.cfg"), "input = a.bits\nrule = even-odd\njoin = true\nnmin = 1\n").unwrap();
    let o = stochlab(dir.path(), &["weak-stochastic-trace", "--config", "t.cfg", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!dir.path().join("r/input.bits").exists());
    let selected = load_bitset(&dir.path().join("r/selected.bits")).unwrap();
    // On A ⊕ A a 1 at an even door is always followed by the same bit.
    assert_eq!(selected.count_ones(), 2 * a.count_ones());
}

#[test]
fn stage_three_assignment_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::parse(
        "kind = nonadaptive-game\nstages = 3\nsizing = fixed(3)\nfamily = identity, linear(2), polynomial(2)\n",
    )
    .unwrap();
    run_experiment(&config, dir.path()).unwrap();
    let path = dir.path().join("assignment.bits");
    let a = load_bitset(&path).unwrap();
    assert!(a.len() > 100);
    let copy = dir.path().join("copy.bits");
    save_bitset(&copy, &a).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(&copy).unwrap());
    assert_eq!(load_bitset(&copy).unwrap(), a);
}

proptest! {
    #[test]
    fn bitsets_round_trip(bits in prop::collection::vec(any::<bool>(), 0..300)) {
        let a = BitPrefix::new(bits);
        prop_assert_eq!(parse_bitset(&render_bitset(&a)).unwrap(), a);
    }

    #[test]
    fn permutations_round_trip(seed in any::<u64>(), size in 0u64..100) {
        use rand::SeedableRng;
        let pi = FinitePermutation::random(size, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(parse_permutation(&render_permutation(&pi)).unwrap(), pi);
    }
}
