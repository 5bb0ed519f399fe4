use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use poemotion::pipeline::{run_pipeline, PipelineConfig, ScorerKind, DEFAULT_SCORER_TIMEOUT_S};
use poemotion::rank::{DEFAULT_DAMPING, DEFAULT_KEEP_RATIO};
use poemotion::strokedb::{build_database, DbError, DEFAULT_DB_SEED, DEFAULT_PER_QUADRANT};

#[derive(Parser)]
#[command(name = "poemotion", version, about = "Emotion-annotated calligraphy strokes for poems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scorer {
    Lexicon,
    External,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a stroke database.
    BuildDb {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PER_QUADRANT)]
        per_quadrant: usize,
        #[arg(long, default_value_t = DEFAULT_DB_SEED)]
        seed: u64,
    },
    /// Annotate a poem and render the SVG composition.
    Analyze {
        /// Poem text file (UTF-8).
        #[arg(long)]
        input: PathBuf,
        /// Dependency parses, one CoNLL-U sentence per poem sentence unit.
        #[arg(long)]
        conllu: Option<PathBuf>,
        /// Valence/arousal lexicon (word<TAB>valence<TAB>arousal).
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Scorer::Lexicon)]
        scorer: Scorer,
        /// Command line of an external scorer, run through `sh -c`.
        #[arg(long)]
        scorer_cmd: Option<String>,
        /// Seconds to wait for each scorer reply.
        #[arg(long, default_value_t = DEFAULT_SCORER_TIMEOUT_S)]
        scorer_timeout: f64,
        #[arg(long, default_value_t = DEFAULT_KEEP_RATIO)]
        keep_ratio: f64,
        #[arg(long, default_value_t = DEFAULT_DAMPING)]
        damping: f64,
        /// Stroke database directory; synthesized in memory from --seed when omitted.
        #[arg(long)]
        db: Option<PathBuf>,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// Output report path [default: --out with a .json extension].
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_DB_SEED)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::BuildDb {
            out,
            per_quadrant,
            seed,
        } => match build_database(per_quadrant, seed, &out) {
            Ok(index) => {
                eprintln!("wrote {} strokes to {}", index.records.len(), out.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(match e {
                    DbError::InvalidArgument(_) => 2,
                    _ => 1,
                })
            }
        },
        Command::Analyze {
            input,
            conllu,
            lexicon,
            scorer,
            scorer_cmd,
            scorer_timeout,
            keep_ratio,
            damping,
            db,
            out,
            report,
            seed,
        } => {
            let config = PipelineConfig {
                input_path: input,
                conllu_path: conllu,
                lexicon_path: lexicon,
                scorer: match scorer {
                    Scorer::Lexicon => ScorerKind::Lexicon,
                    Scorer::External => ScorerKind::External,
                },
                scorer_cmd,
                scorer_timeout_s: scorer_timeout,
                keep_ratio,
                damping,
                db_dir: db,
                out_path: out,
                report_path: report,
                seed,
            };
            match run_pipeline(&config) {
                Ok(report) => {
                    eprintln!(
                        "{} of {} segments selected, {} with strokes; wrote {} and {}",
                        report.selected_count,
                        report.pool_size,
                        report.non_neutral_count,
                        config.out_path.display(),
                        config.report_path().display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
