use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use offeropt::io::{self, Instance};
use offeropt::{objective_value, Assignment, OfferCatalog, OfferType, Pair, Subscriber};
use offeropt_cli::{run_from, PipelinePlan};
use tempfile::{tempdir, TempDir};

struct Run {
    code: u8,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_from(
        std::iter::once("offeropt").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = p(dir, name);
    fs::write(&path, text).unwrap();
    path
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_offeropt"))
}

#[test]
fn gen_is_byte_identical_across_processes() {
    let dir = tempdir().unwrap();
    let (a, b) = (p(&dir, "a.json"), p(&dir, "b.json"));
    for path in [&a, &b] {
        let status = binary()
            .args([
                "gen", "--n", "1000", "--k", "5", "--seed", "42", "--out", path,
            ])
            .output()
            .unwrap()
            .status;
        assert!(status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let inst = io::read_instance(&a).unwrap();
    assert_eq!(inst.subscribers.len(), 1000);
    assert_eq!(inst.catalog.counts(), vec![100; 5]);
}

#[test]
fn bad_flags_exit_two() {
    let dir = tempdir().unwrap();
    let out = p(&dir, "x.json");
    let status = binary()
        .args(["gen", "--n", "-1", "--k", "5", "--out", &out])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
    assert_eq!(
        run(&["gen", "--n", "10", "--k", "0", "--out", &out]).code,
        2
    );
    assert_eq!(
        run(&[
            "gen",
            "--n",
            "10",
            "--k",
            "2",
            "--coverage",
            "1.5",
            "--out",
            &out
        ])
        .code,
        2
    );
    assert_eq!(run(&["bench", "--n-list", "10", "--out", &out]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.out.contains("pipeline"));
}

#[test]
fn solve_then_verify_passes() {
    let dir = tempdir().unwrap();
    let (inst, a, trace) = (p(&dir, "inst.json"), p(&dir, "a.json"), p(&dir, "t.csv"));
    assert_eq!(
        run(&["gen", "--n", "100", "--k", "5", "--seed", "3", "--out", &inst]).code,
        0
    );
    let r = run(&["solve", "--instance", &inst, "--out", &a, "--trace", &trace]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("assigned 50/100"));
    let v = run(&["verify", "--instance", &inst, "--assignment", &a]);
    assert_eq!(v.code, 0, "{}", v.out);

    let rows = io::read_trace_csv(&trace).unwrap();
    assert_eq!(rows.len(), 50);
    assert!(rows.windows(2).all(|w| w[0].revenue >= w[1].revenue));

    let status = binary()
        .args(["verify", "--instance", &inst, "--assignment", &a])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
}

#[test]
fn selectors_and_exec_modes_write_identical_files() {
    let dir = tempdir().unwrap();
    let inst = p(&dir, "inst.json");
    run(&[
        "gen",
        "--n",
        "3000",
        "--k",
        "7",
        "--seed",
        "9",
        "--coverage",
        "0.3",
        "--out",
        &inst,
    ]);
    let mut files = Vec::new();
    for (name, extra) in [
        ("a", vec![]),
        ("b", vec!["--selector", "tournament"]),
        ("c", vec!["--sequential"]),
    ] {
        let out = p(&dir, &format!("{name}.json"));
        let mut args = vec!["solve", "--instance", &inst, "--out", &out];
        args.extend(extra);
        assert_eq!(run(&args).code, 0);
        files.push(fs::read(&out).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn zero_offers_leave_the_baseline() {
    let dir = tempdir().unwrap();
    let subs = vec![
        Subscriber::new(0, 50.0, 0.2, 0.1),
        Subscriber::new(1, 80.0, 0.4, 0.05),
        Subscriber::new(2, 20.0, 0.1, 0.2),
    ];
    let inst = Instance::new(
        subs.clone(),
        OfferCatalog::new(vec![OfferType::new(5.0, 0), OfferType::new(10.0, 0)]),
    );
    let path = p(&dir, "inst.json");
    io::write_instance(&path, &inst).unwrap();
    let out = p(&dir, "a.json");
    assert_eq!(run(&["solve", "--instance", &path, "--out", &out]).code, 0);
    let a = io::read_assignment(&out).unwrap();
    assert!(a.pairs.is_empty());
    let baseline: f64 = subs.iter().map(Subscriber::baseline).sum();
    assert!((a.objective - baseline).abs() <= 1e-12 * baseline);
}

#[test]
fn verify_names_the_broken_constraint() {
    let dir = tempdir().unwrap();
    let subs = vec![
        Subscriber::new(0, 50.0, 0.2, 0.1),
        Subscriber::new(1, 80.0, 0.4, 0.05),
    ];
    let catalog = OfferCatalog::new(vec![OfferType::new(5.0, 1), OfferType::new(10.0, 1)]);
    let inst = p(&dir, "inst.json");
    io::write_instance(&inst, &Instance::new(subs.clone(), catalog.clone())).unwrap();

    let check = |pairs: Vec<Pair>, name: &str| {
        let mut a = Assignment {
            pairs,
            objective: 0.0,
        };
        a.objective = objective_value(&a, &subs, &catalog).unwrap_or(0.0);
        let path = p(&dir, "a.json");
        io::write_assignment(&path, &a).unwrap();
        let r = run(&["verify", "--instance", &inst, "--assignment", &path]);
        assert_eq!(r.code, 1, "{}", r.out);
        assert!(r.out.contains(&format!("FAIL  {name}")), "{}", r.out);
    };
    check(
        vec![Pair::new(0, 0), Pair::new(0, 1)],
        "one_offer_per_subscriber",
    );
    check(vec![Pair::new(0, 0), Pair::new(1, 0)], "offer_count");

    let missing = p(&dir, "nope.json");
    assert_eq!(
        run(&["verify", "--instance", &inst, "--assignment", &missing]).code,
        2
    );
    let status = binary()
        .args(["verify", "--instance", &inst, "--assignment", &missing])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn malformed_instances_are_input_errors() {
    let dir = tempdir().unwrap();
    let out = p(&dir, "a.json");
    let cases = [
        (
            r#"{"schema":"offeropt/v1","subscribers":[{"id":0,"p":10,"gamma":0.1}],"offers":[{"value":1,"count":1}]}"#,
            "alpha",
        ),
        (
            r#"{"schema":"offeropt/v1","subscribers":[{"id":0,"p":10,"alpha":1.5,"gamma":0.1}],"offers":[{"value":1,"count":1}]}"#,
            "alpha",
        ),
        (
            r#"{"schema":"offeropt/v9","subscribers":[],"offers":[{"value":1,"count":1}]}"#,
            "schema",
        ),
    ];
    for (text, needle) in cases {
        let inst = write(&dir, "inst.json", text);
        let r = run(&["solve", "--instance", &inst, "--out", &out]);
        assert_eq!(r.code, 2);
        assert!(r.err.contains(needle), "{}", r.err);
    }
}

#[test]
fn segments_modes() {
    let dir = tempdir().unwrap();
    let out = p(&dir, "x.json");
    let counts = write(
        &dir,
        "counts.json",
        r#"{"schema":"offeropt/v1","mode":"counts","probs":[[0.9,0.1],[0.2,0.8]],"row_caps":[2,2],"col_caps":[2,2]}"#,
    );
    assert_eq!(
        run(&["segments", "--instance", &counts, "--out", &out]).code,
        0
    );
    let a = io::read_allocation(&out).unwrap();
    assert_eq!(a.allocation.x, vec![vec![2, 0], vec![0, 2]]);
    assert!((a.allocation.objective - 3.4).abs() < 1e-12);
    assert_eq!(a.complete, None);

    let zero = write(
        &dir,
        "zero.json",
        r#"{"schema":"offeropt/v1","mode":"budget","probs":[[0.4,0.9],[0.5,0.5]],"values":[1,2],"row_budgets":[0,0],"col_budgets":[0,0]}"#,
    );
    assert_eq!(
        run(&["segments", "--instance", &zero, "--out", &out]).code,
        0
    );
    let a = io::read_allocation(&out).unwrap();
    assert_eq!(a.allocation.x, vec![vec![0, 0], vec![0, 0]]);
    assert_eq!(a.complete, Some(true));

    let modeless = write(
        &dir,
        "bad.json",
        r#"{"schema":"offeropt/v1","probs":[[0.5]],"row_caps":[1],"col_caps":[1]}"#,
    );
    assert_eq!(
        run(&["segments", "--instance", &modeless, "--out", &out]).code,
        2
    );
}

#[test]
fn node_limit_exits_three_with_output() {
    let dir = tempdir().unwrap();
    let inst = write(
        &dir,
        "b.json",
        r#"{"schema":"offeropt/v1","mode":"budget","probs":[[0.9,0.5,0.3],[0.8,0.1,0.7],[0.2,0.6,0.4]],
            "values":[1,2,3],"row_budgets":[10,10,10],"col_budgets":[9,9,9]}"#,
    );
    let out = p(&dir, "x.json");
    let status = binary()
        .args([
            "segments",
            "--instance",
            &inst,
            "--out",
            &out,
            "--node-limit",
            "2",
        ])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(3));
    let a = io::read_allocation(&out).unwrap();
    assert_eq!(a.complete, Some(false));
    assert_eq!(
        run(&["segments", "--instance", &inst, "--out", &out]).code,
        0
    );
}

struct PipelineFixture {
    dir: TempDir,
    manifest: PathBuf,
    segments: Vec<Vec<Subscriber>>,
}

fn pipeline_fixture(segment_doc: &str, offers: &str, files: usize) -> PipelineFixture {
    let dir = tempdir().unwrap();
    write(&dir, "segments.json", segment_doc);
    let mut segments = Vec::new();
    let mut entries = Vec::new();
    for j in 0..files {
        let subs: Vec<Subscriber> = (0..4)
            .map(|i| Subscriber::new(i, 30.0 + 10.0 * (i + j) as f64, 0.3, 0.1))
            .collect();
        let dummy = OfferCatalog::new(vec![OfferType::new(1.0, 0)]);
        io::write_instance(
            dir.path().join(format!("seg{j}.json")),
            &Instance::new(subs.clone(), dummy),
        )
        .unwrap();
        segments.push(subs);
        entries.push(format!(r#"{{"segment":{j},"path":"seg{j}.json"}}"#));
    }
    let manifest = format!(
        r#"{{"schema":"offeropt/v1","segments":"segments.json","offers":{offers},"subscribers":[{}]}}"#,
        entries.join(",")
    );
    let manifest_path = PathBuf::from(write(&dir, "manifest.json", &manifest));
    PipelineFixture {
        dir,
        manifest: manifest_path,
        segments,
    }
}

fn run_plan(f: &PipelineFixture) -> (Run, Option<PipelinePlan>) {
    let out = f.dir.path().join("plan.json");
    let r = run(&[
        "pipeline",
        "--manifest",
        f.manifest.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let plan = Path::new(&out)
        .exists()
        .then(|| serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap());
    (r, plan)
}

const DIAGONAL: &str = r#"{"schema":"offeropt/v1","mode":"counts","probs":[[0.9,0.1],[0.2,0.8]],"row_caps":[2,2],"col_caps":[2,2]}"#;
const OFFERS: &str = r#"[{"label":"small","value":5.0},{"value":10.0}]"#;

#[test]
fn pipeline_restricts_each_segment_to_its_column() {
    let f = pipeline_fixture(DIAGONAL, OFFERS, 2);
    let (r, plan) = run_plan(&f);
    assert_eq!(r.code, 0, "{}", r.err);
    let plan = plan.unwrap();
    assert_eq!(plan.segment_allocation.x, vec![vec![2, 0], vec![0, 2]]);
    let seg0 = &plan.per_segment_assignments[0];
    let seg1 = &plan.per_segment_assignments[1];
    assert_eq!(seg0.counts, vec![2, 0]);
    assert!(seg0.pairs.iter().all(|p| p.offer == 0));
    assert!(seg1.pairs.iter().all(|p| p.offer == 1));
    assert_eq!(seg0.pairs.len(), 2);

    // recompute every segment from scratch
    let mut total = 0.0;
    let mut acceptances = 0.0;
    for (s, subs) in plan.per_segment_assignments.iter().zip(&f.segments) {
        let catalog = OfferCatalog::new(
            [5.0, 10.0]
                .iter()
                .zip(&s.counts)
                .map(|(&v, &c)| OfferType::new(v, c))
                .collect(),
        );
        let a = Assignment {
            pairs: s.pairs.clone(),
            objective: s.objective,
        };
        let obj = objective_value(&a, subs, &catalog).unwrap();
        assert!((obj - s.objective).abs() <= 1e-9 * obj.abs().max(1.0));
        total += obj;
        for p in &s.pairs {
            acceptances += offeropt::acceptance_probability(
                subs[p.subscriber].gamma,
                catalog.offers[p.offer].value,
            )
            .unwrap();
        }
    }
    assert!((plan.total_objective - total).abs() <= 1e-9 * total);
    assert!((plan.combined_expected_acceptances - acceptances).abs() <= 1e-12);
}

#[test]
fn pipeline_with_empty_stage_one_keeps_baselines() {
    let doc = r#"{"schema":"offeropt/v1","mode":"counts","probs":[[0.9,0.1],[0.2,0.8]],"row_caps":[0,0],"col_caps":[2,2]}"#;
    let f = pipeline_fixture(doc, OFFERS, 2);
    let (r, plan) = run_plan(&f);
    assert_eq!(r.code, 0, "{}", r.err);
    let plan = plan.unwrap();
    let baseline: f64 = f.segments.iter().flatten().map(Subscriber::baseline).sum();
    assert!(plan
        .per_segment_assignments
        .iter()
        .all(|s| s.pairs.is_empty()));
    assert!((plan.total_objective - baseline).abs() <= 1e-9 * baseline);
    assert_eq!(plan.combined_expected_acceptances, 0.0);
}

#[test]
fn pipeline_rejects_mismatched_manifests() {
    let f = pipeline_fixture(DIAGONAL, OFFERS, 1);
    let (r, plan) = run_plan(&f);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("subscriber files"), "{}", r.err);
    assert!(plan.is_none());

    let f = pipeline_fixture(DIAGONAL, r#"[{"value":5.0}]"#, 2);
    assert_eq!(run_plan(&f).0.code, 2);

    let f = pipeline_fixture(DIAGONAL, OFFERS, 2);
    let text = fs::read_to_string(&f.manifest)
        .unwrap()
        .replace(r#""segment":1"#, r#""segment":0"#);
    fs::write(&f.manifest, text).unwrap();
    let (r, _) = run_plan(&f);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("listed twice"));
}

#[test]
fn compare_reports_and_limits() {
    let r = run(&[
        "compare",
        "--trials",
        "12",
        "--n-list",
        "3,5",
        "--k-list",
        "1,2",
        "--unlimited",
        "--no-harm",
    ]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("min ratio 1.000000000"), "{}", r.out);

    let r = run(&[
        "compare",
        "--trials",
        "12",
        "--n-list",
        "4,6",
        "--k-list",
        "2,3",
        "--coverage",
        "0.5",
    ]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("trials 12"));

    let dir = tempdir().unwrap();
    let inst = p(&dir, "inst.json");
    run(&["gen", "--n", "40", "--k", "4", "--out", &inst]);
    let r = run(&["compare", "--instance", &inst]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("search space"));
    assert_eq!(run(&["compare"]).code, 2);
}

#[test]
fn bench_rows_are_ordered_and_reproducible() {
    let dir = tempdir().unwrap();
    let (a, b) = (p(&dir, "a.csv"), p(&dir, "b.csv"));
    let r = run(&[
        "bench",
        "--n-list",
        "1000,2000",
        "--k-list",
        "5",
        "--seed",
        "1",
        "--out",
        &a,
        "--fit",
    ]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("fit k 5"));
    run(&[
        "bench",
        "--n-list",
        "1000,2000",
        "--k-list",
        "5",
        "--seed",
        "1",
        "--out",
        &b,
        "--parallel",
        "--repeat",
        "2",
    ]);
    let ra = io::read_bench_csv(&a).unwrap();
    let rb = io::read_bench_csv(&b).unwrap();
    assert_eq!(ra.len(), 2);
    assert_eq!(ra.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1000, 2000]);
    for (x, y) in ra.iter().zip(&rb) {
        assert!(x.build_ms > 0.0 && x.solve_ms > 0.0 && x.total_ms > 0.0);
        assert_eq!(x.objective, y.objective);
        assert_eq!(x.assigned, y.assigned);
    }
}
