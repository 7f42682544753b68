//! Command dispatch for the `treeval` binary.
//!
//! Exit codes: 0 for success (and verdict true / no violations), 1 when a
//! verification verdict is false or violations were found, 2 for usage,
//! parse, or input errors. All reports go to stdout; diagnostics go to
//! stderr. Everything is deterministic: randomness is seeded (`--seed`,
//! default 0) and rationals are always printed exactly, never as floats.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use treeval::dissimilarity::{dissimilarity_vector, realize_ultrametric, DistanceMatrix};
use treeval::rational::{format_rational, parse_rational};
use treeval::tree::{parse_newick, random_ultrametric, serialize_newick, Tree, UltrametricTree};
use treeval::tropical::{plucker_prevariety_check, Sign, TropicalPoint};
use treeval::verifier::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "treeval",
    about = "Exact dissimilarity vectors, determinant valuations, and min-plus checks for trees",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a Newick tree and report its classification
    Validate {
        /// Newick file
        tree: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compute the m-dissimilarity vector of a tree
    Dissim {
        /// Newick file
        tree: PathBuf,
        /// Subset size (2 <= m <= number of leaves)
        #[arg(short)]
        m: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check that the determinant valuation equals minus the total weight
    Verify {
        /// Newick file with an equidistant binary tree
        tree: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Retries allowed on a degenerate coefficient sample
        #[arg(long, default_value_t = 3)]
        max_resamples: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Evaluate the three-term min-plus relations on a dissimilarity vector
    Plucker {
        /// Newick file
        tree: PathBuf,
        /// Subset size (2 <= m <= number of leaves)
        #[arg(short)]
        m: usize,
        /// Check the vector as given or negated (the membership convention)
        #[arg(long, value_enum, default_value_t)]
        sign: SignArg,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Build an equidistant tree realizing an ultrametric distance matrix
    Realize {
        /// Distance matrix JSON file: {"n": int, "d": [["p/q", ...], ...]}
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Generate a random equidistant tree
    Gen {
        #[arg(long)]
        leaves: usize,
        /// Depth as an exact rational, e.g. 9 or 7/2
        #[arg(long)]
        depth: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum SignArg {
    AsGiven,
    #[default]
    Negated,
}

impl From<SignArg> for Sign {
    fn from(value: SignArg) -> Sign {
        match value {
            SignArg::AsGiven => Sign::AsGiven,
            SignArg::Negated => Sign::Negated,
        }
    }
}

struct CliError(String);

impl CliError {
    fn new(message: impl std::fmt::Display) -> Self {
        CliError(message.to_string())
    }
}

/// Parses argv, runs the command, writes the report to `out` and any
/// diagnostics to `err`, and returns the process exit code.
pub fn dispatch<I, S>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            return EXIT_USAGE;
        }
    };
    match run(cli.command) {
        Ok((report, code)) => {
            let _ = out.write_all(report.as_bytes());
            code
        }
        Err(CliError(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
    }
}

fn run(command: Command) -> Result<(String, i32), CliError> {
    match command {
        Command::Validate { tree, format } => run_validate(&tree, format),
        Command::Dissim { tree, m, format } => run_dissim(&tree, m, format),
        Command::Verify {
            tree,
            seed,
            max_resamples,
            format,
        } => run_verify(&tree, seed, max_resamples, format),
        Command::Plucker {
            tree,
            m,
            sign,
            format,
        } => run_plucker(&tree, m, sign.into(), format),
        Command::Realize { matrix, format } => run_realize(&matrix, format),
        Command::Gen {
            leaves,
            depth,
            seed,
            format,
        } => run_gen(leaves, &depth, seed, format),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<Tree, CliError> {
    parse_newick(read_file(path)?.trim()).map_err(CliError::new)
}

/// Classification of a parsed tree; a tree that is neither a positive-weight
/// phylogenetic tree nor an equidistant ultrametric tree is rejected.
struct Classified {
    tree: Tree,
    phylogenetic: bool,
    ultrametric: Option<UltrametricTree>,
}

fn classify(path: &Path) -> Result<Classified, CliError> {
    let tree = load_tree(path)?;
    let phylogenetic = tree.validate_phylogenetic().is_ok();
    let ultrametric = UltrametricTree::validate(tree.clone());
    match (phylogenetic, ultrametric) {
        (false, Err(e)) => Err(CliError::new(format!(
            "tree is neither phylogenetic (a non-positive weight) nor ultrametric ({e})"
        ))),
        (phylogenetic, ultrametric) => Ok(Classified {
            tree,
            phylogenetic,
            ultrametric: ultrametric.ok(),
        }),
    }
}

fn reject_csv(format: Format, command: &str) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError::new(format!(
            "format csv is not supported for {command}"
        )));
    }
    Ok(())
}

fn run_validate(path: &Path, format: Format) -> Result<(String, i32), CliError> {
    reject_csv(format, "validate")?;
    let classified = classify(path)?;
    let total = format_rational(&classified.tree.total_weight());
    let depth = classified
        .ultrametric
        .as_ref()
        .map(|u| format_rational(u.depth()));
    let report = match format {
        Format::Json => {
            let json = serde_json::json!({
                "n": classified.tree.n_leaves(),
                "phylogenetic": classified.phylogenetic,
                "ultrametric": classified.ultrametric.is_some(),
                "d": depth,
                "D": total,
            });
            format!("{json}\n")
        }
        Format::Text => format!(
            "validate n={} phylogenetic={} ultrametric={} d={} D={} OK\n",
            classified.tree.n_leaves(),
            classified.phylogenetic,
            classified.ultrametric.is_some(),
            depth.as_deref().unwrap_or("-"),
            total,
        ),
        Format::Csv => unreachable!(),
    };
    Ok((report, EXIT_OK))
}

fn run_dissim(path: &Path, m: usize, format: Format) -> Result<(String, i32), CliError> {
    let classified = classify(path)?;
    let vector = dissimilarity_vector(&classified.tree, m).map_err(CliError::new)?;
    let report = match format {
        Format::Csv => {
            let mut text = String::from("sigma,value\n");
            for (sigma, value) in vector.entries() {
                let labels = sigma.iter().map(u32::to_string).collect::<Vec<_>>().join("|");
                let _ = writeln!(text, "{labels},{}", format_rational(value));
            }
            text
        }
        Format::Json => {
            let entries: Vec<serde_json::Value> = vector
                .entries()
                .map(|(sigma, value)| {
                    serde_json::json!({"sigma": sigma, "value": format_rational(value)})
                })
                .collect();
            let json = serde_json::json!({
                "n": vector.n(),
                "m": vector.m(),
                "entries": entries,
            });
            format!("{json}\n")
        }
        Format::Text => format!(
            "dissim n={} m={} entries={} OK\n",
            vector.n(),
            vector.m(),
            vector.len()
        ),
    };
    Ok((report, EXIT_OK))
}

fn run_verify(
    path: &Path,
    seed: u64,
    max_resamples: u32,
    format: Format,
) -> Result<(String, i32), CliError> {
    reject_csv(format, "verify")?;
    let tree = UltrametricTree::validate(load_tree(path)?).map_err(CliError::new)?;
    let report = verify(&tree, seed, max_resamples).map_err(CliError::new)?;
    let ok = report.verdict && report.height_sum_ok && report.claims.all_hold();
    let rendered = match format {
        Format::Json => format!("{}\n", report.to_json_string()),
        Format::Text => format!(
            "verify n={} d={} D={} valuation={} resamples={} {}\n",
            report.n,
            format_rational(&report.depth),
            format_rational(&report.total_weight),
            report.valuation,
            report.resamples,
            if ok { "OK" } else { "FAIL" },
        ),
        Format::Csv => unreachable!(),
    };
    Ok((rendered, if ok { EXIT_OK } else { EXIT_FINDINGS }))
}

fn run_plucker(path: &Path, m: usize, sign: Sign, format: Format) -> Result<(String, i32), CliError> {
    reject_csv(format, "plucker")?;
    let classified = classify(path)?;
    let vector = dissimilarity_vector(&classified.tree, m).map_err(CliError::new)?;
    let point = TropicalPoint::from_dissimilarity(&vector);
    let violations = plucker_prevariety_check(&point, sign);
    let ok = violations.is_empty();
    let rendered = match format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string(&violations).expect("violations are serializable")
        ),
        Format::Text => format!(
            "plucker n={} m={} sign={} violations={} {}\n",
            point.n(),
            point.m(),
            match sign {
                Sign::AsGiven => "as-given",
                Sign::Negated => "negated",
            },
            violations.len(),
            if ok { "OK" } else { "FAIL" },
        ),
        Format::Csv => unreachable!(),
    };
    Ok((rendered, if ok { EXIT_OK } else { EXIT_FINDINGS }))
}

fn run_realize(path: &Path, format: Format) -> Result<(String, i32), CliError> {
    reject_csv(format, "realize")?;
    let matrix = DistanceMatrix::from_json_str(&read_file(path)?).map_err(CliError::new)?;
    match realize_ultrametric(&matrix) {
        Ok(tree) => {
            let newick = serialize_newick(tree.tree());
            let rendered = match format {
                Format::Json => {
                    let json = serde_json::json!({
                        "n": tree.n_leaves(),
                        "d": format_rational(tree.depth()),
                        "newick": newick,
                    });
                    format!("{json}\n")
                }
                Format::Text => format!("{newick}\n"),
                Format::Csv => unreachable!(),
            };
            Ok((rendered, EXIT_OK))
        }
        Err(treeval::dissimilarity::DissimilarityError::NotUltrametric { x, y, z }) => {
            let rendered = match format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::json!({"not_ultrametric": {"witness": [x, y, z]}})
                ),
                Format::Text => format!("realize not-ultrametric witness={x},{y},{z} FAIL\n"),
                Format::Csv => unreachable!(),
            };
            Ok((rendered, EXIT_FINDINGS))
        }
        Err(e) => Err(CliError::new(e)),
    }
}

fn run_gen(leaves: usize, depth: &str, seed: u64, format: Format) -> Result<(String, i32), CliError> {
    reject_csv(format, "gen")?;
    let depth: BigRational = parse_rational(depth).map_err(CliError::new)?;
    let tree = random_ultrametric(leaves, &depth, seed).map_err(CliError::new)?;
    let newick = serialize_newick(tree.tree());
    let rendered = match format {
        Format::Json => {
            let json = serde_json::json!({
                "n": tree.n_leaves(),
                "d": format_rational(tree.depth()),
                "seed": seed,
                "newick": newick,
            });
            format!("{json}\n")
        }
        Format::Text => format!("{newick}\n"),
        Format::Csv => unreachable!(),
    };
    Ok((rendered, EXIT_OK))
}
