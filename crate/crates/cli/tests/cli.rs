use std::path::Path;
use std::process::{Command, Output};

const Q1: &str = "(x,y) <- R(x,y), R(y,x), L(x), L(y)";
const Q2: &str = "(x,y) <- R(x,z), L(y), L(z)";

fn cqdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqdist"))
        .args(args)
        .env(
            "CQDIST_CACHE_DIR",
            std::env::temp_dir().join("cqdist-cli-tests"),
        )
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn containment_verdicts_and_exit_codes() {
    let yes = cqdist(&["contains", "--q1", Q1, "--q2", Q2, "--witness"]);
    assert_eq!(code(&yes), 0);
    assert!(stdout(&yes).starts_with("contained\n"));
    assert!(stdout(&yes).contains("{x -> x, y -> y, z -> y}"));

    let no = cqdist(&["contains", "--q1", Q2, "--q2", Q1, "--witness"]);
    assert_eq!(code(&no), 1);
    assert!(stdout(&no).contains("counterexample"));

    assert_eq!(code(&cqdist(&["contains", "--q1", Q1, "--q2", Q1])), 0);
    let mismatch = cqdist(&[
        "contains",
        "--q1",
        "() <- E(z1,z2), E(z2,z3)",
        "--q2",
        "(x) <- E(x,y)",
    ]);
    assert_eq!(code(&mismatch), 2);
    assert_eq!(
        code(&cqdist(&["contains", "--q1", "(x <- R(x)", "--q2", Q1])),
        2
    );
}

#[test]
fn queries_and_schemas_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let schema = dir.path().join("schema.txt");
    let q1 = dir.path().join("q1.cq");
    std::fs::write(&schema, "R/2\nL/1\n").unwrap();
    std::fs::write(&q1, format!("{Q1}\n")).unwrap();
    let s = schema.to_str().unwrap();
    let q = q1.to_str().unwrap();
    assert_eq!(code(&cqdist(&["equiv", "--q1", q, "--q2", Q1])), 0);
    assert_eq!(
        code(&cqdist(&[
            "maxcont",
            "--schema",
            s,
            "--q1",
            "(x,x) <- R(x,x), L(x)",
            "--q2",
            q
        ])),
        0
    );
    assert_eq!(
        code(&cqdist(&["maxcont", "--schema", s, "--q1", q, "--q2", Q2])),
        1
    );
}

#[test]
fn distance_and_path() {
    let out = cqdist(&[
        "distance",
        "--schema",
        "R/2 L/1",
        "--arity",
        "2",
        "--q1",
        Q1,
        "--q2",
        Q1,
        "--no-cache",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0\n");

    let out = cqdist(&[
        "--format",
        "structured",
        "distance",
        "--schema",
        "R/2 L/1",
        "--arity",
        "2",
        "--q1",
        Q1,
        "--q2",
        Q2,
        "--witness",
        "--no-cache",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let d = v["distance"].as_u64().unwrap();
    assert_eq!(v["path"].as_array().unwrap().len() as u64, d + 1);

    let bad = cqdist(&[
        "distance",
        "--schema",
        "R/2",
        "--arity",
        "0",
        "--q1",
        "() <- S(x)",
        "--q2",
        "() <- R(x,x)",
        "--no-cache",
    ]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn graph_counts_and_cap() {
    let out = cqdist(&["graph", "--schema", "R/2", "--arity", "0", "--no-cache"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "4 nodes, 3 edges\nbottom: () <- R(v0, v0)\n");

    let out = cqdist(&["graph", "--schema", "L/1", "--arity", "0", "--no-cache"]);
    assert!(stdout(&out).starts_with("1 nodes, 0 edges"));

    let out = cqdist(&[
        "graph",
        "--schema",
        "R/2",
        "--arity",
        "1",
        "--max-nodes",
        "3",
        "--no-cache",
    ]);
    assert_eq!(code(&out), 3);
    assert_eq!(
        code(&cqdist(&[
            "graph",
            "--schema",
            "R/x",
            "--arity",
            "0",
            "--no-cache"
        ])),
        2
    );
}

#[test]
fn cache_and_dot_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("g.json");
    let dot = dir.path().join("g.dot");
    let args = |c: &Path, d: &Path| {
        vec![
            "graph".to_string(),
            "--schema".into(),
            "R/2 L/1".into(),
            "--arity".into(),
            "1".into(),
            "--cache".into(),
            c.display().to_string(),
            "--dot".into(),
            d.display().to_string(),
        ]
    };
    let run = |a: Vec<String>| cqdist(&a.iter().map(String::as_str).collect::<Vec<_>>());

    let first = run(args(&cache, &dot));
    assert_eq!(code(&first), 0);
    let cached = std::fs::read(&cache).unwrap();
    let dot_first = std::fs::read(&dot).unwrap();

    let cache2 = dir.path().join("g2.json");
    let second = run(args(&cache2, &dot));
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(std::fs::read(&cache2).unwrap(), cached);
    assert_eq!(std::fs::read(&dot).unwrap(), dot_first);

    let reload = run(args(&cache, &dot));
    assert_eq!(stdout(&reload), stdout(&first));
    assert_eq!(std::fs::read(&cache).unwrap(), cached);

    let wrong = cqdist(&[
        "graph",
        "--schema",
        "R/2",
        "--arity",
        "1",
        "--cache",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(code(&wrong), 2);
    std::fs::write(&cache, &cached[..cached.len() / 2]).unwrap();
    let broken = cqdist(&[
        "graph",
        "--schema",
        "R/2 L/1",
        "--arity",
        "1",
        "--cache",
        cache.to_str().unwrap(),
    ]);
    assert_eq!(code(&broken), 2);
}

#[test]
fn opq_subcommands() {
    assert_eq!(code(&cqdist(&["opq", "table"])), 0);
    let chain = cqdist(&["opq", "chain", "--chain-bound", "4"]);
    assert_eq!(code(&chain), 0);
    assert!(stdout(&chain).ends_with("chain to bound 4: strict\n"));
    assert_eq!(stdout(&cqdist(&["opq", "query", "0"])), "() <- E(z2, z1)\n");
    assert_eq!(stdout(&cqdist(&["opq", "reverse", "110"])), "100\n");
    assert_eq!(code(&cqdist(&["opq", "reverse", ""])), 2);
    assert_eq!(code(&cqdist(&["opq", "query", "1", "--relation", "e"])), 2);
}

#[test]
fn restrictions_and_core() {
    let out = cqdist(&[
        "restrict",
        "--schema",
        "R/2",
        "--q1",
        "() <- R(x,y)",
        "--reduced",
    ]);
    assert_eq!(stdout(&out), "() <- R(v0, v1), R(v1, v2)\n");
    let out = cqdist(&[
        "restrict",
        "--schema",
        "R/2",
        "--q1",
        "() <- R(x,y)",
        "--kind",
        "1",
    ]);
    assert_eq!(stdout(&out), "type-1\t() <- R(y, y)\n");
    assert_eq!(
        code(&cqdist(&[
            "restrict",
            "--schema",
            "R/2",
            "--q1",
            "() <- R(x,y)",
            "--kind",
            "5"
        ])),
        2
    );
    let not_minimal = cqdist(&[
        "restrict",
        "--schema",
        "R/2",
        "--q1",
        "() <- R(x,y), R(u,v)",
        "--reduced",
    ]);
    assert_eq!(code(&not_minimal), 2);

    let out = cqdist(&[
        "core",
        "--q1",
        "(x, y) <- R(x, y), R(y, x), R(y, z), L(x), L(y)",
    ]);
    assert_eq!(
        stdout(&out),
        "(v0, v1) <- L(v0), L(v1), R(v0, v1), R(v1, v0)\n"
    );
}

#[test]
fn parse_and_eval() {
    let out = cqdist(&["parse", "--q1", "() <- R(x,y), R(y,z), R(z,x)"]);
    assert_eq!(code(&out), 1);
    assert_eq!(code(&cqdist(&["parse", "--q1", Q1])), 0);
    assert_eq!(code(&cqdist(&["parse", "--q1", Q1, "--schema", "R/2"])), 2);

    let out = cqdist(&["eval", "--q1", Q2, "--instance", "R(a,b). L(b). L(c)."]);
    assert_eq!(stdout(&out), "(a, b)\n(a, c)\n");
    let out = cqdist(&["eval", "--q1", "() <- R(x,x)", "--instance", "R(a,b)."]);
    assert_eq!(stdout(&out), "false\n");
}

#[test]
fn structured_output_is_json() {
    for args in [
        vec![
            "--format",
            "structured",
            "contains",
            "--q1",
            Q1,
            "--q2",
            Q2,
            "--witness",
        ],
        vec!["--format", "structured", "opq", "table"],
        vec!["--format", "structured", "parse", "--q1", Q1],
        vec!["--format", "structured", "core", "--q1", Q1],
    ] {
        let out = cqdist(&args);
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
        assert!(v.is_object());
    }
}
