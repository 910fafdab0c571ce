//! `atomlab`: batch front end to the atom-structure workbench.
//!
//! Every run prints a line-oriented report on stdout. Exit status is 0 for
//! a conclusive verdict, 2 when a search budget ran out and 1 on errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use atomlab_core::monk::MonkParams;
use atomlab_core::{Budget, Parallelism};
use clap::{Args, Parser, Subcommand};

use commands::{Ctx, GameArgs};
use report::Report;

#[derive(Parser)]
#[command(name = "atomlab", version, about = "Atom structures, representability games and finite obstructions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 1 runs the sequential kernels.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Search-node budget.
    #[arg(long = "max-nodes", global = true)]
    max_nodes: Option<u64>,
    /// Wall-clock budget in milliseconds (default: ATOMLAB_BUDGET_MS).
    #[arg(long = "max-ms", global = true)]
    max_ms: Option<u64>,
}

#[derive(Args, Clone, Copy)]
struct MonkArgs {
    #[arg(long, default_value_t = 6)]
    colours: usize,
    /// Block size.
    #[arg(long, default_value_t = 2)]
    block: usize,
    /// Inert copies.
    #[arg(long, default_value_t = 1)]
    copies: usize,
    /// Index bound for explicit atoms.
    #[arg(long, default_value_t = 4)]
    bound: u64,
    /// Arity of the strengthened witness condition.
    #[arg(long = "witness-arity")]
    witness_arity: Option<usize>,
}

impl MonkArgs {
    fn params(self) -> MonkParams {
        let p = MonkParams::new(self.colours, self.block, self.copies, self.bound);
        match self.witness_arity {
            Some(n) => p.with_witness_arity(n),
            None => p,
        }
    }
}

#[derive(Args)]
struct GameFlags {
    file: PathBuf,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    rounds: usize,
    /// Matrix dimension used when the file holds a relation structure.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long = "no-memo")]
    no_memo: bool,
    /// Where to write the winner's certificate (default: next to the input).
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a structure file against the atom-structure axioms.
    Validate { file: PathBuf },
    /// Compose two atom sets of a relation structure.
    Compose { file: PathBuf, left: String, right: String },
    /// List the basic matrices of a relation structure.
    Matrices {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long = "atom-bound")]
        atom_bound: Option<usize>,
    },
    /// Check whether the full set of basic matrices is a cylindric basis.
    Basis {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Solve the bounded game F.
    GameF(GameFlags),
    /// Solve the bounded hypernetwork game H.
    GameH {
        #[command(flatten)]
        game: GameFlags,
        #[arg(long, default_value_t = 2)]
        hyperlabels: usize,
    },
    /// Chromatic number, clique number and girth of a graph, or a search for
    /// a graph with both above `--erdos`.
    Graph {
        #[arg(required_unless_present = "erdos")]
        graph: Option<String>,
        #[arg(long, conflicts_with = "graph")]
        erdos: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Build and check a member of the Monk-style family.
    Monk {
        #[command(flatten)]
        params: MonkArgs,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Build and check the cylindric structure of a graph.
    Eta {
        graph: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Build and check the relation structure of a graph.
    Alpha {
        graph: String,
        #[arg(long, default_value_t = 2)]
        colours: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Representation searches.
    #[command(subcommand)]
    Repr(Repr),
    /// Does every colouring of a clique contain a monochromatic triangle?
    Ramsey {
        #[arg(long)]
        colours: usize,
        #[arg(long)]
        clique: usize,
    },
    /// Non-additivity witness in the finite/cofinite algebra.
    Finco {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Evaluate a term in the complex algebra of a cylindric structure.
    Term {
        file: PathBuf,
        term: String,
        /// `name=atoms`, atoms separated by spaces.
        #[arg(long = "var")]
        vars: Vec<String>,
    },
}

#[derive(Subcommand)]
enum Repr {
    /// Search for a representation on a finite square.
    Square {
        file: PathBuf,
        #[arg(long = "max-base", default_value_t = 5)]
        max_base: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grow a coloured graph for a Monk-style algebra and check it.
    Graph {
        #[command(flatten)]
        params: MonkArgs,
        #[arg(long, default_value_t = 12)]
        size: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

fn run(cli: &Cli, r: &mut Report) -> atomlab_core::Result<()> {
    let c = &cli.common;
    if let Some(j) = c.jobs {
        atomlab_core::par::set_jobs(j)?;
    }
    let budget = Budget { max_nodes: c.max_nodes, max_time: c.max_ms.map(Duration::from_millis) };
    let budget = if c.max_ms.is_none() { budget.with_env() } else { budget };
    let parallelism = if c.jobs == Some(1) { Parallelism::Sequential } else { Parallelism::default() };
    let ctx = Ctx { seed: c.seed, budget, parallelism };
    match &cli.command {
        Command::Validate { file } => commands::validate(&ctx, r, file),
        Command::Compose { file, left, right } => commands::compose(r, file, left, right),
        Command::Matrices { file, n, atom_bound } => commands::matrices(&ctx, r, file, *n, *atom_bound),
        Command::Basis { file, n } => commands::basis(&ctx, r, file, *n),
        Command::GameF(g) => commands::game_f(&ctx, r, &game_args(g)),
        Command::GameH { game, hyperlabels } => commands::game_h(&ctx, r, &game_args(game), *hyperlabels),
        Command::Graph { graph: Some(g), erdos: None, emit, .. } => commands::graph(r, g, emit.as_deref()),
        Command::Graph { erdos: Some(k), trials, emit, .. } => commands::erdos(&ctx, r, *k, *trials, emit.as_deref()),
        Command::Graph { graph: None, erdos: None, .. } => unreachable!("clap requires one of them"),
        Command::Monk { params, emit } => commands::monk(&ctx, r, params.params(), emit.as_deref()),
        Command::Eta { graph, n, emit } => commands::eta(&ctx, r, graph, *n, emit.as_deref()),
        Command::Alpha { graph, colours, emit } => commands::alpha(&ctx, r, graph, *colours, emit.as_deref()),
        Command::Repr(Repr::Square { file, max_base, out }) => {
            commands::repr_square(&ctx, r, file, *max_base, out.as_deref())
        }
        Command::Repr(Repr::Graph { params, size, samples }) => {
            commands::repr_graph(&ctx, r, params.params(), *size, *samples)
        }
        Command::Ramsey { colours, clique } => commands::ramsey(&ctx, r, *colours, *clique),
        Command::Finco { n } => commands::finco(r, *n),
        Command::Term { file, term, vars } => commands::term(r, file, term, vars),
    }
}

fn game_args(g: &GameFlags) -> GameArgs<'_> {
    GameArgs {
        file: &g.file,
        rounds: g.rounds,
        nodes: g.m,
        dim: g.n,
        memo: !g.no_memo,
        certificate: g.certificate.as_deref(),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut report = Report::new(&argv, cli.common.seed);
    let result = run(&cli, &mut report);
    if let Err(e) = &result {
        report.line("error", e);
        eprintln!("error: {e}");
    }
    if let Err(e) = report.emit(&mut std::io::stdout().lock()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match result {
        Ok(()) => ExitCode::from(report.status.exit_code() as u8),
        Err(_) => ExitCode::from(1),
    }
}
