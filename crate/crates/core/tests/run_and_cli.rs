use std::path::{Path, PathBuf};

use meoh::evolution::{
    run_meoh, AttemptRecord, FailureCategory, GenerationSnapshot, Management, RunArchive, RunError,
};
use meoh::operators::{MockGenerator, MockTask, Operator};
use meoh::runner::{
    compute_metrics, front_csv, heatmap_csv, run_cli, Config, StoredArchive, ARCHIVE_FILE, EXIT_CONFIG,
    EXIT_HEURISTIC, EXIT_INIT_EXHAUSTED, EXIT_OK, METRICS_FILE,
};

const SMALL: &str = r#"
[run]
population_size = 4
generations = 2
parent_count = 2
seed = 3

[problem]
kind = "bpp"
instances = 2
items = 300
capacity = 100

[llm]
mode = "mock"
"#;

fn manifest(p: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(p)
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["meoh"];
    full.extend_from_slice(args);
    let code = run_cli(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("c.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn same_seed_same_archive() {
    let config = Config::parse(SMALL, Path::new("c.toml")).unwrap();
    let env = config.environment().unwrap();
    let run = || {
        let mut generator = MockGenerator::new(MockTask::Bpp);
        let out = run_meoh(&config.run, &mut generator, &env, &mut ()).unwrap();
        let mut stored = StoredArchive::new(config.clone());
        stored.archive = out.archive;
        stored.to_jsonl()
    };
    assert_eq!(run(), run());
}

#[test]
fn every_management_completes() {
    for management in [Management::Meoh, Management::Nsga2, Management::Moead, Management::SingleObjective] {
        let mut config = Config::parse(SMALL, Path::new("c.toml")).unwrap();
        config.run.management = management;
        let env = config.environment().unwrap();
        let mut generator = MockGenerator::new(MockTask::Bpp);
        let out = run_meoh(&config.run, &mut generator, &env, &mut ()).unwrap();
        assert!(out.population.len() <= 4);
        assert_eq!(out.archive.snapshots.len(), 3);
    }
}

#[test]
fn records_are_admitted_or_categorised() {
    let config = Config::parse(SMALL, Path::new("c.toml")).unwrap();
    let env = config.environment().unwrap();
    let mut generator = MockGenerator::new(MockTask::Bpp).with_malformed_rate(0.5);
    let out = run_meoh(&config.run, &mut generator, &env, &mut ()).unwrap();
    assert!(out.archive.records.windows(2).all(|w| w[0].id < w[1].id));
    for r in &out.archive.records {
        assert_eq!(r.admitted, r.failure_category.is_none());
        assert_eq!(r.admitted, r.objectives.is_some());
        assert!(r.timestamp_ms.is_none());
    }
    assert!(out.archive.records.iter().any(|r| !r.admitted));
}

#[test]
fn always_malformed_generator_exhausts_initialization() {
    let config = Config::parse(SMALL, Path::new("c.toml")).unwrap();
    let env = config.environment().unwrap();
    let mut generator = MockGenerator::new(MockTask::Bpp).with_malformed_rate(1.0);
    let err = run_meoh(&config.run, &mut generator, &env, &mut ()).unwrap_err();
    assert_eq!(err, RunError::InitializationExhausted { valid: 0, attempts: 12 });

    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &format!("{SMALL}malformed_rate = 1.0\n"));
    let out = dir.path().join("out");
    let (code, _, err) = cli(&["run", "--config", &path, "--out-dir", out.to_str().unwrap(), "--quiet"]);
    assert_eq!(code, EXIT_INIT_EXHAUSTED, "{err}");
    // the failed attempts are still on disk
    let stored = StoredArchive::read(&out.join(ARCHIVE_FILE)).unwrap();
    assert_eq!(stored.archive.records.len(), 12);
}

#[test]
fn missing_and_invalid_configs_exit_one() {
    let (code, _, err) = cli(&["run", "--config", "/no/such/file.toml"]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("/no/such/file.toml"));

    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &SMALL.replace("parent_count = 2", "parent_count = 0"));
    assert_eq!(cli(&["run", "--config", &path]).0, EXIT_CONFIG);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_CONFIG);
    assert_eq!(cli(&["--help"]).0, EXIT_OK);
}

#[test]
fn run_writes_archive_and_metrics_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let args = ["run", "--config", &path, "--seed", "9", "--mode", "mock", "--objective", "walltime", "--out-dir"];
    let mut args: Vec<&str> = args.to_vec();
    args.push(out.to_str().unwrap());
    let (code, stdout, stderr) = cli(&args);
    assert_eq!(code, EXIT_OK, "{stderr}");
    assert!(stdout.contains("bpp-meoh-s9-"));
    assert!(stderr.contains("generation   2"));
    let stored = StoredArchive::read(&out.join(ARCHIVE_FILE)).unwrap();
    assert_eq!(stored.header.config.run.seed, 9);
    assert!(stored.archive.records.iter().all(|r| r.timestamp_ms.is_some()));
    let metrics = std::fs::read_to_string(out.join(METRICS_FILE)).unwrap();
    assert_eq!(metrics.lines().count(), 4);
    assert!(metrics.starts_with("generation,population_hv,population_igd,archive_front_hv,mean_dd_score"));
}

#[test]
fn eval_reports_and_rejects() {
    let bpp = manifest("presets/bpp.toml");
    let (code, stdout, _) = cli(&["eval", manifest("heuristics/bpp_best_fit.dsl").to_str().unwrap(), "--config", bpp.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(stdout.lines().count(), 7);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dsl");
    std::fs::write(&bad, "fn score(item, bins) { return item - ; }").unwrap();
    let (code, _, err) = cli(&["eval", bad.to_str().unwrap(), "--config", bpp.to_str().unwrap()]);
    assert_eq!(code, EXIT_HEURISTIC);
    assert!(err.contains("parse_error"));

    let square = manifest("presets/tsp_square.toml");
    let (code, stdout, _) =
        cli(&["eval", manifest("heuristics/tsp_identity.dsl").to_str().unwrap(), "--config", square.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("square4,40,40,0,"));
}

fn record(id: u64, objectives: Option<Vec<f64>>) -> AttemptRecord {
    AttemptRecord {
        id,
        generation: 0,
        slot: id as usize,
        operator: Operator::Init,
        parent_ids: vec![],
        admitted: objectives.is_some(),
        failure_category: objectives.is_none().then_some(FailureCategory::ParseError),
        failure_message: None,
        description: Some(format!("d{id}")),
        source: Some(format!("s{id}")),
        objectives,
        timestamp_ms: None,
    }
}

fn stored(records: Vec<AttemptRecord>, snapshots: Vec<GenerationSnapshot>) -> StoredArchive {
    let mut s = StoredArchive::new(Config::parse(SMALL, Path::new("c.toml")).unwrap());
    s.archive = RunArchive { records, snapshots };
    s
}

#[test]
fn single_admitted_heuristic_has_zero_igd() {
    let s = stored(
        vec![record(0, Some(vec![0.1, 5.0])), record(1, None)],
        vec![
            GenerationSnapshot { generation: 0, member_ids: vec![0], dd_scores: vec![0.0] },
            GenerationSnapshot { generation: 1, member_ids: vec![0], dd_scores: vec![0.0] },
        ],
    );
    let rows = compute_metrics(&s).unwrap();
    assert!(rows.iter().all(|r| r.population_igd == 0.0));
}

#[test]
fn dominating_member_is_the_whole_front() {
    let s = stored(
        vec![record(0, Some(vec![0.1, 5.0])), record(1, Some(vec![0.2, 6.0])), record(2, Some(vec![0.3, 5.0]))],
        vec![GenerationSnapshot { generation: 0, member_ids: vec![0, 1, 2], dd_scores: vec![0.0, -0.5, -0.5] }],
    );
    let csv = front_csv(&s).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("0,0.1,5,d0,s0"));
    let heat = heatmap_csv(&s).unwrap();
    assert_eq!(heat.lines().nth(1).unwrap(), "0,0,-0.5,-0.5,NA");
}

#[test]
fn corrupt_archives_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    for cmd in ["metrics", "export-front", "heatmap"] {
        let (code, _, err) = cli(&[cmd, empty.to_str().unwrap()]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("corrupt archive"), "{err}");
    }
    let no_snapshots = dir.path().join("nosnap.jsonl");
    std::fs::write(&no_snapshots, stored(vec![record(0, Some(vec![1.0, 1.0]))], vec![]).to_jsonl()).unwrap();
    let (code, _, err) = cli(&["heatmap", no_snapshots.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("no generation snapshots"));
    assert_eq!(cli(&["metrics", "/no/such/archive.jsonl"]).0, EXIT_CONFIG);
}

#[test]
fn metrics_are_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    assert_eq!(cli(&["run", "--config", &path, "--quiet", "--out-dir", out.to_str().unwrap()]).0, EXIT_OK);
    let archive = out.join(ARCHIVE_FILE);
    let a = cli(&["metrics", archive.to_str().unwrap()]).1;
    let b = cli(&["metrics", archive.to_str().unwrap()]).1;
    assert_eq!(a, b);
    assert_eq!(a, std::fs::read_to_string(out.join(METRICS_FILE)).unwrap());
}

#[test]
fn every_preset_builds_its_environment() {
    let mut names: Vec<PathBuf> = std::fs::read_dir(manifest("presets"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for path in names {
        let config = Config::load(&path).unwrap_or_else(|e| panic!("{e}"));
        config.environment().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        config.generator().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
