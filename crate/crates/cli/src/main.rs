use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use picard::signs::{Convention, LrRule};
use picard_cli::{run, CliError, CohomologyQuery, Command, Options, SignKind, DEFAULT_SEED, INPUT_ERROR};

/// Coherence, sign and cohomology computations for invertible objects in
/// symmetric monoidal categories.
#[derive(Debug, Parser)]
#[command(name = "picard", version)]
struct Cli {
    /// Number of generators X1..Xn (inferred from the input when omitted).
    #[arg(long, global = true)]
    gens: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Emit the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Canonical isomorphism from a word to its power form.
    Normalize { word: String },
    /// Compare two composite scripts with the same endpoints.
    Equal { left: String, right: String },
    /// Evaluate a composite script in the universal sign group.
    Eval { script: String },
    /// Compile a composite script to a diagram record.
    Kl { script: String },
    /// Sign corrections: `lr-a` .. `lr-g-l'`, `motivic`, `realization`.
    Sign(SignArgs),
    /// Eilenberg-MacLane or group (co)homology of a finite abelian group.
    Cohomology(CohomologyArgs),
    /// Normalized 2-cochains whose coboundary is a given 3-cocycle.
    Trivialize { a: String, n: String, alpha: String },
    /// Standard ring structures up to standard isomorphism.
    Classify {
        a: Option<String>,
        n: Option<String>,
        /// Take A, N and the associator from a model file.
        #[arg(long)]
        model: Option<String>,
    },
    /// Check the axioms and commuter invariants of a model.
    ModelCheck {
        #[arg(long)]
        model: String,
        /// Sample size when A is infinite.
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Evaluate a composite script in a model.
    ModelEval {
        #[arg(long)]
        model: String,
        script: String,
    },
}

#[derive(Debug, Args)]
struct SignArgs {
    rule: String,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    /// Realization with X1 = S^(1,1).
    #[arg(long)]
    swapped: bool,
}

#[derive(Debug, Args)]
struct CohomologyArgs {
    a: String,
    n: Option<String>,
    #[arg(long, group = "query")]
    em: Option<usize>,
    #[arg(long, group = "query")]
    bar: Option<usize>,
    #[arg(long, group = "query")]
    homology: Option<usize>,
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

fn build(cmd: Cmd) -> Result<Command, CliError> {
    Ok(match cmd {
        Cmd::Normalize { word } => Command::Normalize { word },
        Cmd::Equal { left, right } => Command::Equal {
            left: read(&left)?,
            right: read(&right)?,
        },
        Cmd::Eval { script } => Command::Eval { script: read(&script)? },
        Cmd::Kl { script } => Command::Kl { script: read(&script)? },
        Cmd::Sign(s) => {
            let kind = match s.rule.as_str() {
                "motivic" => SignKind::Motivic,
                "realization" => SignKind::Realization(if s.swapped {
                    Convention::Swapped
                } else {
                    Convention::Simplicial
                }),
                other => SignKind::Lr(other.parse::<LrRule>()?),
            };
            Command::Sign {
                kind,
                degrees: [s.a, s.b, s.c, s.d],
            }
        }
        Cmd::Cohomology(c) => {
            let query = match (c.em, c.bar, c.homology) {
                (Some(k), _, _) => CohomologyQuery::Em(k),
                (_, Some(k), _) => CohomologyQuery::Bar(k),
                (_, _, Some(k)) => CohomologyQuery::Homology(k),
                _ => return Err(CliError::Usage("pass one of --em K, --bar K, --homology K".into())),
            };
            Command::Cohomology { a: c.a, n: c.n, query }
        }
        Cmd::Trivialize { a, n, alpha } => Command::Trivialize {
            a,
            n,
            alpha: read(&alpha)?,
        },
        Cmd::Classify { a, n, model } => {
            let model = model.as_deref().map(read).transpose()?;
            match (a, n, model) {
                (Some(a), Some(n), model) => Command::Classify { a, n, model },
                (_, _, Some(model)) => Command::Classify {
                    a: String::new(),
                    n: String::new(),
                    model: Some(model),
                },
                _ => return Err(CliError::Usage("classify needs A and N, or --model".into())),
            }
        }
        Cmd::ModelCheck { model, samples } => Command::ModelCheck {
            model: read(&model)?,
            samples,
        },
        Cmd::ModelEval { model, script } => Command::ModelEval {
            model: read(&model)?,
            script: read(&script)?,
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        gens: cli.gens,
        seed: cli.seed,
    };
    match build(cli.command).and_then(|cmd| run(&cmd, &opts)) {
        Ok(report) => {
            print!("{}", report.render(cli.json));
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR as u8)
        }
    }
}
