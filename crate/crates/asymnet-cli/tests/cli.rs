//! End-to-end checks of the command-line interface: exit codes, output
//! formats, and agreement between the three model representations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use asymnet::{fixtures, serialize_model, ModelDocument};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_asymnet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().expect("tempdir"),
        }
    }

    fn file(&self, name: &str, doc: &ModelDocument) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, serialize_model(doc)).expect("write model");
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn posterior_lines(text: &str) -> Vec<(String, f64)> {
    text.lines()
        .skip_while(|l| !l.starts_with("posterior:"))
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .map(|l| {
            let mut parts = l.trim().split_whitespace();
            let label = parts.next().unwrap().to_owned();
            let p: f64 = parts.next().unwrap().parse().unwrap();
            (label, p)
        })
        .collect()
}

#[test]
fn params_prints_the_story_counts() {
    let ws = Workspace::new();
    let network = ws.file(
        "three-way.network.json",
        &ModelDocument::Network(fixtures::single_network()),
    );
    let multinet = ws.file(
        "three-way.multinet.json",
        &ModelDocument::Multinet(fixtures::split_multinet()),
    );
    let out = run(&["params", network.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "11");
    let out = run(&["params", multinet.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "9");
}

#[test]
fn validate_reports_and_exits_one_on_violations() {
    let ws = Workspace::new();
    let good = ws.file(
        "good.network.json",
        &ModelDocument::Network(fixtures::single_network()),
    );
    let out = run(&["validate", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "valid");

    // Break a row and expect exit 1 with the violation printed.
    let bad_net = asymnet::DiscreteNetwork::builder()
        .variable("x", ["0", "1"])
        .cpt("x", [] as [&str; 0], [[0.5, 0.6]])
        .build()
        .unwrap();
    let bad = ws.file("bad.network.json", &ModelDocument::Network(bad_net));
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("unnormalized-row"));
}

#[test]
fn missing_file_and_garbage_exit_three() {
    let out = run(&["validate", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(3));

    let ws = Workspace::new();
    let garbage = ws.path("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let out = run(&["validate", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn inconsistent_evidence_exits_two() {
    let ws = Workspace::new();
    let multinet = ws.file(
        "four-way.multinet.json",
        &ModelDocument::Multinet(fixtures::four_way_multinet()),
    );
    // A model in which x is certainly 0 under every hypothesis; evidence
    // x=1 contradicts it.
    let space = asymnet::HypothesisSpace::new(vec![asymnet::Variable::new(
        "h",
        ["a", "b"],
    )
    .unwrap()])
    .unwrap();
    let certain = |h_row: [f64; 2]| {
        asymnet::DiscreteNetwork::builder()
            .variable("h", ["a", "b"])
            .variable("x", ["0", "1"])
            .cpt("h", [] as [&str; 0], [h_row.to_vec()])
            .cpt("x", [] as [&str; 0], [[1.0, 0.0]])
            .build()
            .unwrap()
    };
    let m = asymnet::Multinet::new(
        space.clone(),
        vec![
            vec![space.point(&["a"]).unwrap()],
            vec![space.point(&["b"]).unwrap()],
        ],
        vec![certain([1.0, 0.0]), certain([0.0, 1.0])],
        vec![0.5, 0.5],
    )
    .unwrap();
    let impossible = ws.file("impossible.multinet.json", &ModelDocument::Multinet(m));
    let out = run(&[
        "query",
        impossible.to_str().unwrap(),
        "--evidence",
        "x=1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "query",
        multinet.to_str().unwrap(),
        "--evidence",
        "g=male,b=yes",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn query_agrees_across_representations() {
    let ws = Workspace::new();
    let m = fixtures::four_way_multinet();
    let union = m.union_network().unwrap().network;
    let network = ws.file("union.network.json", &ModelDocument::Network(union));
    let multinet = ws.file("four-way.multinet.json", &ModelDocument::Multinet(m));
    let simnet = ws.file(
        "four-way.simnet.json",
        &ModelDocument::Simnet(fixtures::chain_simnet()),
    );

    for evidence in ["g=male,b=yes", "b=no", "g=female,l=yes", ""] {
        let net_out = run(&[
            "query",
            network.to_str().unwrap(),
            "--evidence",
            evidence,
            "--hypothesis",
            "h",
        ]);
        let multi_out = run(&["query", multinet.to_str().unwrap(), "--evidence", evidence]);
        let sim_out = run(&["query", simnet.to_str().unwrap(), "--evidence", evidence]);
        assert!(net_out.status.success(), "{evidence}");
        assert!(multi_out.status.success(), "{evidence}");
        assert!(sim_out.status.success(), "{evidence}");
        let a = posterior_lines(&stdout(&net_out));
        let b = posterior_lines(&stdout(&multi_out));
        let c = posterior_lines(&stdout(&sim_out));
        assert_eq!(a.len(), 4);
        for ((la, pa), ((lb, pb), (lc, pc))) in a.iter().zip(b.iter().zip(c.iter())) {
            assert_eq!(la, lb);
            assert_eq!(la, lc);
            assert!((pa - pb).abs() < 1e-9, "{evidence}: {pa} vs {pb}");
            assert!((pa - pc).abs() < 1e-9, "{evidence}: {pa} vs {pc}");
        }
    }
}

#[test]
fn convert_union_compare_round_trip() {
    let ws = Workspace::new();
    let simnet = ws.file(
        "four-way.simnet.json",
        &ModelDocument::Simnet(fixtures::chain_simnet()),
    );
    let multinet = ws.path("converted.multinet.json");
    let out = run(&[
        "convert",
        simnet.to_str().unwrap(),
        "-o",
        multinet.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let network = ws.path("union.network.json");
    let out = run(&[
        "union",
        multinet.to_str().unwrap(),
        "-o",
        network.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    // All three files denote one distribution.
    for (a, b) in [
        (&simnet, &multinet),
        (&multinet, &network),
        (&simnet, &network),
    ] {
        let out = run(&[
            "compare",
            a.to_str().unwrap(),
            b.to_str().unwrap(),
            "--oracle",
            "--evidence",
            "g=male",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(stdout(&out).contains("equivalent: yes"));
    }

    // The multinet query beats the flat network on multiplications.
    let out = run(&[
        "compare",
        multinet.to_str().unwrap(),
        network.to_str().unwrap(),
        "--evidence",
        "g=male,b=yes",
    ]);
    let text = stdout(&out);
    let costs: Vec<u64> = text
        .lines()
        .filter(|l| l.starts_with("multiplications"))
        .map(|l| l.rsplit(' ').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(costs.len(), 2);
    assert!(costs[0] < costs[1], "{text}");
}

#[test]
fn priors_and_redundancy_report() {
    let ws = Workspace::new();
    let simnet = ws.file(
        "four-way.simnet.json",
        &ModelDocument::Simnet(fixtures::chain_simnet()),
    );
    let out = run(&["priors", simnet.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut total = 0.0;
    for line in text.lines() {
        let p: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
        total += p;
    }
    assert!((total - 1.0).abs() < 1e-9);
    assert!(text.lines().any(|l| l.starts_with("worker ")));

    let out = run(&["redundancy", simnet.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("P(g | visitor)"), "{text}");
    assert!(text.contains("coherent: yes"));
}

#[test]
fn staged_query_uses_the_prior_network() {
    let ws = Workspace::new();
    let multinet = ws.file(
        "three-way.multinet.json",
        &ModelDocument::Multinet(fixtures::split_multinet()),
    );
    let prior = ws.file(
        "reports.network.json",
        &ModelDocument::Network(fixtures::report_prior_network()),
    );
    let baseline = run(&[
        "query",
        multinet.to_str().unwrap(),
        "--evidence",
        "g=male",
    ]);
    let staged = run(&[
        "query",
        multinet.to_str().unwrap(),
        "--evidence",
        "g=male",
        "--apriori-evidence",
        "r1=alarming,r2=alarming",
        "--priors",
        prior.to_str().unwrap(),
    ]);
    assert!(staged.status.success(), "{}", stdout(&staged));
    let base = posterior_lines(&stdout(&baseline));
    let revised = posterior_lines(&stdout(&staged));
    let spy = |lines: &[(String, f64)]| {
        lines
            .iter()
            .find(|(l, _)| l == "spy")
            .map(|(_, p)| *p)
            .unwrap()
    };
    assert!(spy(&revised) > spy(&base));
}

#[test]
fn checked_in_sample_models_are_canonical() {
    // The files under models/checkpoint are the canonical serializations of
    // the library fixtures; this keeps them honest.
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let cases: Vec<(&str, ModelDocument)> = vec![
        (
            "models/checkpoint/three-way.network.json",
            ModelDocument::Network(fixtures::single_network()),
        ),
        (
            "models/checkpoint/three-way.multinet.json",
            ModelDocument::Multinet(fixtures::split_multinet()),
        ),
        (
            "models/checkpoint/four-way.multinet.json",
            ModelDocument::Multinet(fixtures::four_way_multinet()),
        ),
        (
            "models/checkpoint/four-way.simnet.json",
            ModelDocument::Simnet(fixtures::chain_simnet()),
        ),
        (
            "models/checkpoint/reports.network.json",
            ModelDocument::Network(fixtures::report_prior_network()),
        ),
        (
            "models/checkpoint/pair.multinet.json",
            ModelDocument::Multinet(fixtures::paired_multinet()),
        ),
        (
            "models/checkpoint/pair.simnet.json",
            ModelDocument::Simnet(fixtures::paired_simnet()),
        ),
    ];
    for (path, doc) in cases {
        let on_disk = std::fs::read_to_string(root.join(path)).expect(path);
        assert_eq!(on_disk, serialize_model(&doc), "{path} has drifted");
    }
}
