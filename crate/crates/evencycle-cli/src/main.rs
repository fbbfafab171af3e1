//! `evencycle` command-line tool.
//!
//! Exit status: 0 on success, 1 when a checked property fails, 2 on usage,
//! input or precondition errors.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evencycle::discovery::{CatalogSpec, DEFAULT_BUDGET};
use evencycle::{Edge, Vertex};

use evencycle_cli::commands::{self, FlipOp, Outcome, Reduction};
use evencycle_cli::report::{self, Format};

#[derive(Parser)]
#[command(name = "evencycle", version, about = "Signed graphs, grafts and even cycle matroid siblings")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "structured")]
    format: Format,

    /// State budget for searches.
    #[arg(long, global = true, env = "EVENCYCLE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FlipArgs {
    /// Side of a 2-separation to flip.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    edges: Option<Vec<Edge>>,
    /// Identify two vertices in different components.
    #[arg(long, num_args = 2, value_names = ["V1", "V2"])]
    glue: Option<Vec<Vertex>>,
    /// Separate every block into its own component.
    #[arg(long)]
    split_blocks: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the cycle, even-cycle or even-cut spaces of two documents.
    CheckEqual { first: PathBuf, second: PathBuf },
    /// Whitney flip, glue or block split of a graph.
    Flip {
        file: PathBuf,
        #[command(flatten)]
        op: FlipArgs,
    },
    /// Resign a signed graph on the cut of a vertex set.
    Resign {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        vertices: Vec<Vertex>,
    },
    /// Lovász flip at two vertices meeting every odd edge.
    Lovasz { file: PathBuf, v1: Vertex, v2: Vertex },
    /// Split a vertex, moving the edges in alpha to the new vertex.
    Split {
        file: PathBuf,
        #[arg(long)]
        vertex: Vertex,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        alpha: Vec<Edge>,
    },
    /// Unfold a signed graph at s and t into a graft.
    Unfold {
        file: PathBuf,
        #[arg(long)]
        s: Vertex,
        #[arg(long)]
        t: Vertex,
        /// Edges at s that move to the new s vertex; needs --beta.
        #[arg(long, value_delimiter = ',', num_args = 0.., requires = "beta")]
        alpha: Option<Vec<Edge>>,
        #[arg(long, value_delimiter = ',', num_args = 0.., requires = "alpha")]
        beta: Option<Vec<Edge>>,
    },
    /// Fold a graft by identifying two pairs of terminals.
    Fold {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["S1", "S2"], required = true)]
        s: Vec<Vertex>,
        #[arg(long, num_args = 2, value_names = ["T1", "T2"], required = true)]
        t: Vec<Vertex>,
    },
    /// Build and verify the sibling pair of a split, quad or named template.
    BuildTwins {
        file: PathBuf,
        /// Also print the quad template of named twins.
        #[arg(long)]
        with_template: bool,
    },
    /// Build and verify the sibling pair of a shih template.
    BuildShih { file: PathBuf },
    /// Reduce a sibling record along a 2-separation or a 3-separation.
    Reduce {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "delta", required_unless_present = "delta")]
        split: Option<Vec<Edge>>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        delta: Option<Vec<Edge>>,
    },
    /// Enumerate sibling pairs among small connected graphs.
    SearchSiblings {
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(long, default_value_t = 6)]
        max_edges: usize,
        #[arg(long)]
        loops: bool,
    },
    /// Tag each sibling record in a stream with its structures.
    Classify { file: PathBuf },
    /// Check planted instances, or every record in a file.
    VerifySuite {
        file: Option<PathBuf>,
        /// Instances per kind.
        #[arg(long, default_value_t = 2)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw one planted sibling pair.
    Plant {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        with_template: bool,
    },
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::CheckEqual { first, second } => commands::check_equal(first, second),
        Command::Flip { file, op } => {
            let op = match (&op.edges, &op.glue) {
                (Some(x), _) => FlipOp::Edges(x.clone()),
                (_, Some(v)) => FlipOp::Glue(v[0], v[1]),
                _ => FlipOp::SplitBlocks,
            };
            commands::flip(file, op)
        }
        Command::Resign { file, vertices } => commands::resign_cmd(file, vertices),
        Command::Lovasz { file, v1, v2 } => commands::lovasz(file, *v1, *v2),
        Command::Split { file, vertex, alpha } => commands::split(file, *vertex, alpha),
        Command::Unfold { file, s, t, alpha, beta } => {
            commands::unfold_cmd(file, *s, *t, alpha.clone().zip(beta.clone()))
        }
        Command::Fold { file, s, t } => commands::fold_cmd(file, (s[0], s[1]), (t[0], t[1])),
        Command::BuildTwins { file, with_template } => commands::build_twins(file, *with_template),
        Command::BuildShih { file } => commands::build_shih(file),
        Command::Reduce { file, split, delta } => {
            let how = match (split, delta) {
                (Some(x), _) => Reduction::Split(x.clone()),
                (_, Some(y)) => Reduction::Delta(y.clone()),
                _ => unreachable!("clap requires one of --split and --delta"),
            };
            commands::reduce(file, how)
        }
        Command::SearchSiblings { max_vertices, max_edges, loops } => commands::search(
            CatalogSpec { max_vertices: *max_vertices, max_edges: *max_edges, loops: *loops },
            cli.budget,
        ),
        Command::Classify { file } => commands::classify(file, cli.budget),
        Command::VerifySuite { file, count, seed } => commands::verify_suite(file.as_deref(), *count, *seed),
        Command::Plant { kind, seed, with_template } => commands::plant_cmd(kind, *seed, *with_template),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = report::render(&out.notes, &out.docs, cli.format);
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(commands::EXIT_USAGE);
            }
            ExitCode::from(out.exit)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
