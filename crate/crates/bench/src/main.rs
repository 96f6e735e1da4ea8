use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use metagrad::data::load_registered;
use metagrad::LossKind;

use metagrad_bench::algo::hypertune_grid;
use metagrad_bench::bound::bound_check;
use metagrad_bench::comparator::SolverOptions;
use metagrad_bench::experiment::{prepare, run_experiment, run_sweep, RunOptions};
use metagrad_bench::output::{read_glob, write_curves, write_rows, CsvRow};
use metagrad_bench::simulate::{run_simulation, SimKind};
use metagrad_bench::summary::summarize;
use metagrad_bench::{data_dir, Algorithm, BenchError, Result};

#[derive(Parser)]
#[command(name = "bench", about = "MetaGrad experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one registered dataset.
    Run {
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        loss: String,
        /// ogdt | ogdnorm | adagrad | mgco | mgf:<m> | mgfull
        #[arg(long)]
        algo: String,
        #[arg(long, default_value_t = 1.0)]
        sigma_factor: f64,
        /// Sweep the 28-point sigma grid instead of a single factor.
        #[arg(long)]
        hypertune: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Min-max scale raw features to [-1, 1].
        #[arg(long)]
        normalize: bool,
        /// Directory with LIBSVM files; defaults to $METAGRAD_DATA_DIR or ./data.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Also evaluate the regret bound at the comparator (d <= 64).
        #[arg(long)]
        diagnostics: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regret curves of the one-dimensional absolute-loss problems.
    Simulate {
        #[arg(long)]
        kind: String,
        #[arg(long = "T")]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summary table over result CSVs.
    Summarize {
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value = "ogdt")]
        baseline: String,
    },
}

fn parse_loss(s: &str) -> Result<LossKind> {
    s.parse()
        .map_err(|_| BenchError::Config(format!("unknown loss {s:?}")))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            dataset,
            loss,
            algo,
            sigma_factor,
            hypertune,
            seed,
            normalize,
            data_dir: dir,
            diagnostics,
            out,
        } => {
            let loss = parse_loss(&loss)?;
            let algo: Algorithm = algo.parse()?;
            if !(sigma_factor > 0.0) {
                return Err(BenchError::Config(format!(
                    "sigma factor must be positive, got {sigma_factor}"
                )));
            }
            let dir = dir.unwrap_or_else(data_dir);
            let ds = load_registered(&dataset, &dir, normalize)?;
            let prep = prepare(ds, loss, &SolverOptions::default())?;
            let records = if hypertune {
                let grid: Vec<f64> = hypertune_grid()
                    .into_iter()
                    .map(|f| f * sigma_factor)
                    .collect();
                run_sweep(&prep, algo, &grid, seed)?
            } else {
                let opts = RunOptions {
                    sigma_factor,
                    seed,
                    diagnostics,
                };
                vec![run_experiment(&prep, algo, &opts)?]
            };
            for r in &records {
                println!(
                    "{} {} {} sigma_factor={} regret={:.3} lin_regret={:.3} resets={} ({:.1} ms)",
                    r.dataset,
                    r.loss,
                    r.algo,
                    r.sigma_factor,
                    r.regret,
                    r.lin_regret,
                    r.resets,
                    r.wallclock_ms
                );
                if let Some(tr) = &r.trace {
                    let c = bound_check(tr, &prep.comparator, r.sigma);
                    println!(
                        "  bound at u*: lhs={:.3} rhs={:.3} rank={} ok={}",
                        c.lhs, c.rhs, c.rank, c.ok
                    );
                }
            }
            let rows: Vec<CsvRow> = records.iter().map(CsvRow::from).collect();
            write_rows(&out, &rows)
        }
        Command::Simulate {
            kind,
            rounds,
            seed,
            out,
        } => {
            let kind: SimKind = kind.parse()?;
            if rounds == 0 {
                return Err(BenchError::Config("T must be positive".into()));
            }
            let curves = run_simulation(kind, rounds, seed)?;
            println!(
                "{kind} T={rounds} seed={seed}: metagrad={:.3} adagrad={:.3} ogdnorm={:.3}",
                curves.metagrad[rounds - 1],
                curves.adagrad[rounds - 1],
                curves.ogdnorm[rounds - 1]
            );
            write_curves(&out, &curves)
        }
        Command::Summarize { input, baseline } => {
            let rows = read_glob(&input)?;
            let cells = rows
                .iter()
                .map(CsvRow::to_cell)
                .collect::<Result<Vec<_>>>()?;
            let baseline = Algorithm::parse_any(&baseline)?.table_name();
            print!("{}", summarize(&cells, &baseline)?.render());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
