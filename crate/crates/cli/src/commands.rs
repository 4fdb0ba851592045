use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use cqdist_core::falsify::find_counterexample;
use cqdist_core::metric::{
    default_cache_name, distance_path, load_graph_expecting, save_graph, to_dot,
};
use cqdist_core::opq::opq_query_over;
use cqdist_core::{
    build_mc_graph_with, canonicalize, check_chain, contains as is_contained, core as core_of,
    equivalent, evaluate, find_homomorphism, generate_restrictions, is_maximally_contained,
    is_minimal, reduced_restrictions, reverse_opq, validate, verify_opq_table, Bits, BuildOptions,
    ConjunctiveQuery, Error, McGraph, RestrictionType, Schema,
};
use serde_json::{json, Value};

use crate::input;

const FALSIFIER_TRIALS: usize = 200;
const FALSIFIER_SEED: u64 = 0x5eed;

pub struct Report {
    pub code: u8,
    pub human: String,
    pub structured: Value,
}

impl Report {
    fn ok(human: String, structured: Value) -> Self {
        Report {
            code: 0,
            human,
            structured,
        }
    }

    fn verdict(holds: bool, human: String, structured: Value) -> Self {
        Report {
            code: if holds { 0 } else { 1 },
            human,
            structured,
        }
    }
}

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_input_error() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

type Outcome = Result<Report, Failure>;

fn texts(queries: &[ConjunctiveQuery]) -> Vec<String> {
    queries.iter().map(ToString::to_string).collect()
}

pub fn parse(arg: &str, schema: Option<&str>) -> Outcome {
    let schema = schema.map(input::schema).transpose()?;
    let queries = input::queries(arg, schema.as_ref())?;
    let mut human = String::new();
    let mut items = Vec::new();
    let mut all_2cq = true;
    for q in &queries {
        let violations = match &schema {
            Some(s) => validate(q, s).violations,
            None => Vec::new(),
        };
        all_2cq &= q.is_2cq();
        writeln!(
            human,
            "{q}\n  arity {}, {} atoms, size {}, {}",
            q.arity(),
            q.body().len(),
            q.size(),
            if q.is_2cq() { "2CQ" } else { "not a 2CQ" }
        )
        .unwrap();
        items.push(json!({
            "query": q,
            "text": q.to_string(),
            "canonical": canonicalize(q),
            "arity": q.arity(),
            "size": q.size(),
            "is_2cq": q.is_2cq(),
            "violations": violations,
        }));
    }
    Ok(Report::verdict(
        all_2cq,
        human,
        json!({ "queries": items, "all_2cq": all_2cq }),
    ))
}

pub fn eval(q_arg: &str, instance_arg: &str, schema: Option<&str>) -> Outcome {
    let schema = schema.map(input::schema).transpose()?;
    let q = input::query(q_arg, schema.as_ref())?;
    let instance = input::instance(instance_arg, schema.as_ref())?;
    let answers = evaluate(&q, &instance)?;
    let rows: Vec<String> = answers
        .iter()
        .map(|t| {
            format!(
                "({})",
                t.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", ")
            )
        })
        .collect();
    let human = if q.is_boolean() {
        format!("{}\n", !answers.is_empty())
    } else {
        rows.iter().map(|r| format!("{r}\n")).collect()
    };
    Ok(Report::ok(
        human,
        json!({ "query": q.to_string(), "answers": answers, "count": answers.len() }),
    ))
}

pub fn contains(q1_arg: &str, q2_arg: &str, witness: bool, schema: Option<&str>) -> Outcome {
    let schema = schema.map(input::schema).transpose()?;
    let q1 = input::query(q1_arg, schema.as_ref())?;
    let q2 = input::query(q2_arg, schema.as_ref())?;
    let holds = is_contained(&q1, &q2)?;
    let mut human = format!("{}\n", if holds { "contained" } else { "not contained" });
    let mut structured = json!({ "contained": holds, "q1": q1.to_string(), "q2": q2.to_string() });
    if witness {
        if holds {
            let h = find_homomorphism(&q2, &q1)?.expect("containment implies a homomorphism");
            writeln!(human, "homomorphism from q2 to q1: {h}").unwrap();
            structured["homomorphism"] = json!(h);
        } else {
            let schema = match schema {
                Some(s) => s,
                None => input::schema_of([&q1, &q2])?,
            };
            let cex = find_counterexample(&q1, &q2, &schema, FALSIFIER_TRIALS, FALSIFIER_SEED)?
                .expect("the frozen instance of q1 refutes a failed containment");
            let tuple: Vec<&str> = cex.tuple.iter().map(|c| c.as_str()).collect();
            writeln!(
                human,
                "counterexample: q1 returns ({}) on {}",
                tuple.join(", "),
                cex.instance
            )
            .unwrap();
            structured["counterexample"] = json!({
                "instance": cex.instance.facts().map(ToString::to_string).collect::<Vec<_>>(),
                "tuple": cex.tuple,
            });
        }
    }
    Ok(Report::verdict(holds, human, structured))
}

pub fn equiv(q1_arg: &str, q2_arg: &str) -> Outcome {
    let q1 = input::query(q1_arg, None)?;
    let q2 = input::query(q2_arg, None)?;
    let holds = equivalent(&q1, &q2)?;
    Ok(Report::verdict(
        holds,
        format!(
            "{}\n",
            if holds {
                "equivalent"
            } else {
                "not equivalent"
            }
        ),
        json!({ "equivalent": holds }),
    ))
}

pub fn core(arg: &str) -> Outcome {
    let q = input::query(arg, None)?;
    let c = core_of(&q);
    let minimal = is_minimal(&q);
    Ok(Report::ok(
        format!("{c}\n"),
        json!({
            "core": c.to_string(),
            "minimal": minimal,
            "atoms": q.body().len(),
            "core_atoms": c.body().len(),
        }),
    ))
}

pub fn restrict(schema_arg: &str, q_arg: &str, kind: Option<u8>, reduced: bool) -> Outcome {
    let schema = input::schema(schema_arg)?;
    let q = input::query(q_arg, Some(&schema))?;
    if reduced {
        let rr = reduced_restrictions(&q, &schema)?;
        let human = rr.iter().map(|r| format!("{r}\n")).collect();
        return Ok(Report::ok(human, json!({ "reduced": texts(&rr) })));
    }
    let kinds: Vec<RestrictionType> = match kind {
        Some(n) => vec![RestrictionType::from_number(n).expect("validated by the argument parser")],
        None => RestrictionType::ALL.to_vec(),
    };
    let mut human = String::new();
    let mut items = Vec::new();
    for t in kinds {
        for r in generate_restrictions(&q, &schema, t)? {
            writeln!(human, "{t}\t{}", r.query).unwrap();
            items.push(json!({ "type": t.number(), "query": r.query.to_string(), "kind": r.kind }));
        }
    }
    Ok(Report::ok(human, json!({ "restrictions": items })))
}

pub fn maxcont(schema_arg: &str, q1_arg: &str, q2_arg: &str) -> Outcome {
    let schema = input::schema(schema_arg)?;
    let q1 = input::query(q1_arg, Some(&schema))?;
    let q2 = input::query(q2_arg, Some(&schema))?;
    let holds = is_maximally_contained(&q1, &q2, &schema)?;
    Ok(Report::verdict(
        holds,
        format!(
            "{}\n",
            if holds {
                "maximally contained"
            } else {
                "not maximally contained"
            }
        ),
        json!({ "maximally_contained": holds }),
    ))
}

pub enum Cache {
    Off,
    Default,
    At(PathBuf),
}

pub struct GraphRequest {
    pub schema: String,
    pub arity: usize,
    pub cache: Cache,
    pub max_nodes: usize,
}

fn cache_path(req: &GraphRequest, schema: &Schema) -> Option<PathBuf> {
    match &req.cache {
        Cache::Off => None,
        Cache::At(p) => Some(p.clone()),
        Cache::Default => {
            let dir = std::env::var_os("CQDIST_CACHE_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(".cqdist-cache"));
            Some(dir.join(default_cache_name(schema, req.arity)))
        }
    }
}

fn ensure_parent(path: &Path) -> Result<(), Error> {
    match path.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(dir) => fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        }),
        None => Ok(()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    ensure_parent(path)?;
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads the cached graph when present, otherwise builds it and fills the cache.
fn obtain_graph(req: &GraphRequest) -> Result<(Schema, McGraph), Failure> {
    let schema = input::schema(&req.schema)?;
    let path = cache_path(req, &schema);
    if let Some(p) = path.as_ref().filter(|p| p.is_file()) {
        let g = load_graph_expecting(p, &schema, req.arity)?;
        if g.node_count() > req.max_nodes {
            return Err(Error::NodeCapExceeded {
                cap: req.max_nodes,
                discovered: g.node_count(),
            }
            .into());
        }
        eprintln!("loaded graph from {}", p.display());
        return Ok((schema, g));
    }
    let g = build_mc_graph_with(
        &schema,
        req.arity,
        &BuildOptions {
            max_nodes: req.max_nodes,
        },
    )?;
    if !g.is_connected() {
        return Err(Failure {
            code: 3,
            message: "built graph is not connected".into(),
        });
    }
    if let Some(p) = path {
        ensure_parent(&p)?;
        save_graph(&g, &p)?;
        eprintln!("saved graph to {}", p.display());
    }
    Ok((schema, g))
}

pub fn graph(req: &GraphRequest, dot: Option<&Path>) -> Outcome {
    let (_, g) = obtain_graph(req)?;
    if let Some(path) = dot {
        write_file(path, &to_dot(&g))?;
    }
    let bottom = g.bottom().map(|b| g.text(b).to_string());
    let human = format!(
        "{} nodes, {} edges\nbottom: {}\n",
        g.node_count(),
        g.edge_count(),
        bottom.as_deref().unwrap_or("none")
    );
    Ok(Report::ok(
        human,
        json!({
            "schema": g.schema(),
            "arity": g.arity(),
            "nodes": g.node_count(),
            "edges": g.edge_count(),
            "tops": g.tops().len(),
            "bottom": bottom,
        }),
    ))
}

pub fn distance(req: &GraphRequest, q1_arg: &str, q2_arg: &str, witness: bool) -> Outcome {
    let schema = input::schema(&req.schema)?;
    let q1 = input::query(q1_arg, Some(&schema))?;
    let q2 = input::query(q2_arg, Some(&schema))?;
    for q in [&q1, &q2] {
        if q.arity() != req.arity {
            return Err(Error::GraphArityMismatch {
                expected: req.arity,
                found: q.arity(),
            }
            .into());
        }
        if let Some(v) = validate(q, &schema).violations.into_iter().next() {
            return Err(v.into_error().into());
        }
    }
    let (_, g) = obtain_graph(req)?;
    let path = distance_path(&g, &q1, &q2)?;
    let d = path.len() - 1;
    let mut human = format!("{d}\n");
    if witness {
        for q in &path {
            writeln!(human, "  {q}").unwrap();
        }
    }
    let mut structured = json!({ "distance": d });
    if witness {
        structured["path"] = json!(texts(&path));
    }
    Ok(Report::ok(human, structured))
}

pub fn opq_table() -> Report {
    let report = verify_opq_table();
    let mut human = String::from("query\treversal\tminimal\tresult\n");
    for row in &report.rows {
        let show = |b: &Option<Bits>| b.as_ref().map_or(String::new(), ToString::to_string);
        writeln!(
            human,
            "{}\t{}\t{}\t{}",
            row.query,
            show(&row.reversal),
            show(&row.minimal),
            if row.passed { "ok" } else { "FAILED" }
        )
        .unwrap();
    }
    writeln!(
        human,
        "{}",
        if report.passed {
            "all rows hold"
        } else {
            "some rows fail"
        }
    )
    .unwrap();
    Report::verdict(report.passed, human, json!(report))
}

pub fn opq_chain(bound: usize) -> Report {
    let report = check_chain(bound);
    let mut human = String::new();
    for step in &report.steps {
        writeln!(
            human,
            "O_{} < O_{}\tforward {}\treverse {}",
            step.lower,
            step.upper,
            if step.contained { "holds" } else { "FAILS" },
            if step.reverse_contained {
                "HOLDS"
            } else {
                "fails"
            }
        )
        .unwrap();
    }
    writeln!(
        human,
        "chain to bound {bound}: {}",
        if report.passed {
            "strict"
        } else {
            "not strict"
        }
    )
    .unwrap();
    Report::verdict(report.passed, human, json!(report))
}

pub fn opq_query(bits: &str, relation: &str) -> Outcome {
    let bits: Bits = bits.parse()?;
    if Schema::from_relations([(relation, 2)]).is_err() {
        return Err(Error::InvalidIdentifier(relation.to_string()).into());
    }
    let q = opq_query_over(&bits, relation);
    Ok(Report::ok(
        format!("{q}\n"),
        json!({ "bits": bits, "query": q.to_string() }),
    ))
}

pub fn opq_reverse(bits: &str) -> Outcome {
    let bits: Bits = bits.parse()?;
    let r = reverse_opq(&bits);
    Ok(Report::ok(
        format!("{r}\n"),
        json!({ "bits": bits, "reversal": r }),
    ))
}
