mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Failure, Report};

#[derive(Parser)]
#[command(
    name = "cqdist",
    version,
    about = "Containment, cores and semantic distance for 2CQs"
)]
struct Cli {
    /// Output style. `structured` prints one JSON document.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Args)]
struct SchemaArg {
    /// Schema file (lines like `R/2`), or the schema text itself.
    #[arg(long)]
    schema: String,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    schema: SchemaArg,
    /// Number of head positions.
    #[arg(long)]
    arity: usize,
    /// Graph cache file. Defaults to a name derived from the schema and arity inside
    /// `$CQDIST_CACHE_DIR` (or `.cqdist-cache`).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Neither read nor write a cache file.
    #[arg(long, conflicts_with = "cache")]
    no_cache: bool,
    /// Abort construction beyond this many nodes.
    #[arg(long, default_value_t = cqdist_core::metric::DEFAULT_MAX_NODES)]
    max_nodes: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Parse queries and report their shape and 2CQ status.
    Parse {
        /// Query text or a file of queries.
        #[arg(long)]
        q1: String,
        #[arg(long)]
        schema: Option<String>,
    },
    /// Evaluate a query on an instance.
    Eval {
        #[arg(long)]
        q1: String,
        /// Instance text (`R(a, b). L(a).`) or a file holding it.
        #[arg(long)]
        instance: String,
        #[arg(long)]
        schema: Option<String>,
    },
    /// Decide whether q1 is contained in q2.
    Contains {
        #[arg(long)]
        q1: String,
        #[arg(long)]
        q2: String,
        /// Print the homomorphism, or a counterexample instance when not contained.
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        schema: Option<String>,
    },
    /// Decide whether q1 and q2 are equivalent.
    Equiv {
        #[arg(long)]
        q1: String,
        #[arg(long)]
        q2: String,
    },
    /// Print the core of a query.
    Core {
        #[arg(long)]
        q1: String,
    },
    /// List restrictions of a 2CQ.
    Restrict {
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long)]
        q1: String,
        /// Restrict to one restriction type (1 to 4).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        kind: Option<u8>,
        /// Print the reduced set instead: the queries maximally contained in q1.
        #[arg(long, conflicts_with = "kind")]
        reduced: bool,
    },
    /// Decide whether q1 is maximally contained in q2.
    Maxcont {
        #[command(flatten)]
        schema: SchemaArg,
        #[arg(long)]
        q1: String,
        #[arg(long)]
        q2: String,
    },
    /// Build the maximal-containment graph.
    Graph {
        #[command(flatten)]
        graph: GraphArgs,
        /// Also write the graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Semantic distance between two 2CQs.
    Distance {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        q1: String,
        #[arg(long)]
        q2: String,
        /// Also print one shortest path.
        #[arg(long)]
        witness: bool,
    },
    /// Oriented path queries.
    Opq {
        #[command(subcommand)]
        action: OpqAction,
    },
}

#[derive(Subcommand)]
enum OpqAction {
    /// Check the reference equivalence table.
    Table,
    /// Check the pumped chain between the paths of length 3 and 2.
    Chain {
        #[arg(long, default_value_t = cqdist_core::opq::DEFAULT_CHAIN_BOUND)]
        chain_bound: usize,
    },
    /// Print the query for a bit string.
    Query {
        bits: String,
        #[arg(long, default_value = cqdist_core::opq::DEFAULT_RELATION)]
        relation: String,
    },
    /// Print the reversal of a bit string.
    Reverse { bits: String },
}

fn run(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Parse { q1, schema } => commands::parse(&q1, schema.as_deref()),
        Command::Eval {
            q1,
            instance,
            schema,
        } => commands::eval(&q1, &instance, schema.as_deref()),
        Command::Contains {
            q1,
            q2,
            witness,
            schema,
        } => commands::contains(&q1, &q2, witness, schema.as_deref()),
        Command::Equiv { q1, q2 } => commands::equiv(&q1, &q2),
        Command::Core { q1 } => commands::core(&q1),
        Command::Restrict {
            schema,
            q1,
            kind,
            reduced,
        } => commands::restrict(&schema.schema, &q1, kind, reduced),
        Command::Maxcont { schema, q1, q2 } => commands::maxcont(&schema.schema, &q1, &q2),
        Command::Graph { graph, dot } => commands::graph(&graph.into(), dot.as_deref()),
        Command::Distance {
            graph,
            q1,
            q2,
            witness,
        } => commands::distance(&graph.into(), &q1, &q2, witness),
        Command::Opq { action } => match action {
            OpqAction::Table => Ok(commands::opq_table()),
            OpqAction::Chain { chain_bound } => Ok(commands::opq_chain(chain_bound)),
            OpqAction::Query { bits, relation } => commands::opq_query(&bits, &relation),
            OpqAction::Reverse { bits } => commands::opq_reverse(&bits),
        },
    }
}

impl From<GraphArgs> for commands::GraphRequest {
    fn from(a: GraphArgs) -> Self {
        commands::GraphRequest {
            schema: a.schema.schema,
            arity: a.arity,
            cache: if a.no_cache {
                commands::Cache::Off
            } else {
                a.cache
                    .map_or(commands::Cache::Default, commands::Cache::At)
            },
            max_nodes: a.max_nodes,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            let text = match cli.format {
                Format::Human => report.human,
                Format::Structured => {
                    let mut s =
                        serde_json::to_string_pretty(&report.structured).expect("JSON value");
                    s.push('\n');
                    s
                }
            };
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            ExitCode::from(report.code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
