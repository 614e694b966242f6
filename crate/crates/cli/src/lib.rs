//! The `int` command line: generation, splits, verification, search,
//! statistics, latency measurement and the environment server.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use int_core::axioms::AxiomSet;
use int_core::generator::{generate_batch, generate_split, Dimension, Exec, GeneratorConfig, SplitSpec};
use int_core::io::{compute_stats, load_dataset, serve_stdio, serve_tcp, write_jsonl, DatasetRecord, Server};
use int_core::kernel::{apply_step, bench_step_latency, init_state, verify_trace, ProofState, ProofStep};
use int_core::search::{greedy, prove, HeuristicValue, MctsConfig, OraclePolicy, Policy, UniformPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Mean step latency the environment is expected to stay under, in ms.
pub const REFERENCE_STEP_MS: f64 = 1.28;

#[derive(Parser, Debug)]
#[command(name = "int", version, about = "Synthetic inequality theorems and a proving environment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct GenArgs {
    #[arg(long, default_value = "ordered-field")]
    axioms: AxiomSet,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Degree of the initial-condition entities.
    #[arg(long, default_value_t = 0)]
    degree: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenArgs {
    fn config(&self) -> GeneratorConfig {
        GeneratorConfig::new(self.axioms, self.k, self.l).with_seed(self.seed).with_degree(self.degree)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate theorems with ground-truth proofs as JSONL.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 1)]
        num: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a train/test split and write `test.jsonl` and `train.jsonl`.
    Split {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, value_parser = parse_dimension)]
        dimension: Dimension,
        #[arg(long, default_value_t = 1000)]
        test_size: usize,
        #[arg(long, default_value_t = 1000)]
        train_size: usize,
        /// Size of the training order pool.
        #[arg(long)]
        orders: Option<usize>,
        #[arg(long)]
        test_orders: Option<usize>,
        /// Size of the training combination pool.
        #[arg(long)]
        combinations: Option<usize>,
        #[arg(long)]
        test_combinations: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        test_degrees: Option<Vec<usize>>,
        #[arg(long)]
        test_k: Option<usize>,
        #[arg(long)]
        test_l: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Replay every record's proof through the kernel.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Search for proofs of the theorems in a dataset.
    Prove {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Mcts)]
        method: Method,
        #[arg(long, default_value_t = 200)]
        sims: usize,
        #[arg(long, default_value_t = 1.0)]
        cpuct: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, value_enum, default_value_t = PolicyKind::Uniform)]
        policy: PolicyKind,
        #[arg(long, default_value_t = 15)]
        step_limit: usize,
        #[arg(long, default_value = "ordered-field")]
        axioms: AxiomSet,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-theorem results as JSONL.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Length, axiom-frequency and node-count statistics of a dataset.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Mean kernel step latency over a generated corpus.
    Bench {
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Serve environments over newline-delimited JSON.
    Serve {
        #[arg(long, value_enum, default_value_t = Transport::Stdio)]
        transport: Transport,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 7878)]
        port: u16,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Greedy,
    Mcts,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyKind {
    Uniform,
    Oracle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Transport {
    Stdio,
    Tcp,
}

fn parse_dimension(s: &str) -> Result<Dimension, String> {
    s.parse()
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed { code: &'static str, message: String },
}

impl CliError {
    fn failed(code: &'static str, e: impl ToString) -> Self {
        CliError::Failed { code, message: e.to_string() }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed { .. } => 1,
        }
    }

    fn diagnostic(&self) -> Value {
        match self {
            CliError::Usage(m) => json!({"error": {"code": "USAGE", "message": m}}),
            CliError::Failed { code, message } => json!({"error": {"code": code, "message": message}}),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::failed("IO", e)
    }
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 on failure, 2 on usage errors. Failures write a JSON diagnostic to
/// `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = writeln!(err, "{}", CliError::Usage(e.to_string().trim_end().to_string()).diagnostic());
            return 2;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.diagnostic());
            e.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, v: Value) -> Result<(), CliError> {
    writeln!(out, "{v}")?;
    Ok(())
}

fn checked(config: GeneratorConfig) -> Result<GeneratorConfig, CliError> {
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn load(path: &Path) -> Result<Vec<DatasetRecord>, CliError> {
    load_dataset(path).map_err(|e| CliError::failed("DATASET", format!("{}: {e}", path.display())))
}

fn write_records(path: &Path, records: &[DatasetRecord]) -> Result<usize, CliError> {
    Ok(write_jsonl(BufWriter::new(File::create(path)?), records)?)
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Generate { gen, num, out: path } => {
            let config = checked(gen.config())?;
            let theorems = generate_batch(&config, num).map_err(|e| CliError::failed("GENERATION_FAILED", e))?;
            let records: Vec<DatasetRecord> = theorems.iter().map(DatasetRecord::from_theorem).collect();
            match path {
                Some(p) => {
                    let n = write_records(&p, &records)?;
                    emit(out, json!({"written": n, "path": p}))
                }
                None => {
                    write_jsonl(&mut *out, &records)?;
                    Ok(())
                }
            }
        }
        Command::Split {
            gen,
            dimension,
            test_size,
            train_size,
            orders,
            test_orders,
            combinations,
            test_combinations,
            test_degrees,
            test_k,
            test_l,
            out_dir,
        } => {
            let config = checked(gen.config())?;
            let mut spec = SplitSpec::new(dimension).with_test_size(test_size);
            spec.n_orders = orders.unwrap_or(spec.n_orders);
            spec.n_test_orders = test_orders.unwrap_or(spec.n_test_orders);
            spec.n_combinations = combinations.unwrap_or(spec.n_combinations);
            spec.n_test_combinations = test_combinations.unwrap_or(spec.n_test_combinations);
            spec.test_degrees = test_degrees.unwrap_or(spec.test_degrees);
            spec.test_k = test_k;
            spec.test_l = test_l;
            let mut split = generate_split(&spec, &config).map_err(|e| CliError::failed("GENERATION_FAILED", e))?;
            let train =
                split.train.next_batch(train_size, Exec::default()).map_err(|e| CliError::failed("GENERATION_FAILED", e))?;
            fs::create_dir_all(&out_dir)?;
            let test_records: Vec<_> = split.test.iter().map(DatasetRecord::from_theorem).collect();
            let train_records: Vec<_> = train.iter().map(DatasetRecord::from_theorem).collect();
            let n_test = write_records(&out_dir.join("test.jsonl"), &test_records)?;
            let n_train = write_records(&out_dir.join("train.jsonl"), &train_records)?;
            emit(
                out,
                json!({
                    "dimension": dimension.name(),
                    "test": n_test,
                    "train": n_train,
                    "train_orders": split.train_orders.len(),
                    "test_orders": split.test_orders.len(),
                    "train_combinations": split.train_combinations,
                    "test_combinations": split.test_combinations.len(),
                    "out_dir": out_dir,
                }),
            )
        }
        Command::Verify { input } => {
            let records = load(&input)?;
            let mut failures = Vec::new();
            for (i, r) in records.iter().enumerate() {
                if r.id != r.content_hash() {
                    failures.push(json!({"line": i + 1, "id": r.id, "reason": "id does not match content hash"}));
                } else if let Err(f) = verify_trace(&r.to_theorem(), &r.proof) {
                    failures.push(json!({"line": i + 1, "id": r.id, "reason": f.to_string()}));
                }
            }
            let verified = records.len() - failures.len();
            emit(out, json!({"records": records.len(), "verified": verified}))?;
            if failures.is_empty() {
                Ok(())
            } else {
                Err(CliError::failed("VERIFY_FAILED", json!({"failures": failures})))
            }
        }
        Command::Prove { input, method, sims, cpuct, tau, policy, step_limit, axioms, seed, report } => {
            let records = load(&input)?;
            let cfg = MctsConfig { c_puct: cpuct, tau, n_simulations: sims, step_limit };
            if sims == 0 || !(tau > 0.0) {
                return Err(CliError::Usage("--sims must be positive and --tau greater than 0".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut report_out = report.as_deref().map(File::create).transpose()?.map(BufWriter::new);
            let (mut solved, mut total_len) = (0usize, 0usize);
            for r in &records {
                let theorem = r.to_theorem();
                let chosen: Box<dyn Policy> = match policy {
                    PolicyKind::Uniform => Box::new(UniformPolicy { axiom_set: axioms }),
                    PolicyKind::Oracle => Box::new(OraclePolicy::new(&theorem, &r.proof, axioms)),
                };
                let found = match method {
                    Method::Greedy => greedy(&theorem, chosen.as_ref(), step_limit, &mut rng),
                    Method::Mcts => prove(&theorem, chosen.as_ref(), &HeuristicValue, &cfg, &mut rng),
                };
                if let Some(p) = &found {
                    solved += 1;
                    total_len += p.len();
                }
                if let Some(w) = report_out.as_mut() {
                    let line = json!({"id": r.id, "solved": found.is_some(), "proof": found});
                    writeln!(w, "{line}")?;
                }
            }
            if let Some(mut w) = report_out {
                w.flush()?;
            }
            let n = records.len().max(1) as f64;
            emit(
                out,
                json!({
                    "theorems": records.len(),
                    "solved": solved,
                    "success_rate": solved as f64 / n,
                    "mean_proof_length": if solved > 0 { Some(total_len as f64 / solved as f64) } else { None },
                }),
            )
        }
        Command::Stats { input } => {
            let theorems: Vec<_> = load(&input)?.iter().map(DatasetRecord::to_theorem).collect();
            let report = compute_stats(&theorems).map_err(|e| CliError::failed("EMPTY_DATASET", e))?;
            emit(out, serde_json::to_value(report).map_err(|e| CliError::failed("INTERNAL", e))?)
        }
        Command::Bench { steps, seed } => {
            if steps == 0 {
                return Err(CliError::Usage("--steps must be positive".into()));
            }
            let corpus = step_corpus(steps, seed)?;
            let report = bench_step_latency(&corpus).map_err(|e| CliError::failed("INTERNAL", e))?;
            let within = report.mean_ms <= REFERENCE_STEP_MS;
            emit(
                out,
                json!({
                    "steps": report.steps,
                    "mean_ms": report.mean_ms,
                    "reference_ms": REFERENCE_STEP_MS,
                    "within_reference": within,
                }),
            )?;
            if within {
                Ok(())
            } else {
                Err(CliError::failed("TOO_SLOW", format!("mean step {:.4} ms exceeds {REFERENCE_STEP_MS} ms", report.mean_ms)))
            }
        }
        Command::Serve { transport, host, port } => {
            let server = Server::default();
            match transport {
                Transport::Stdio => serve_stdio(&server)?,
                Transport::Tcp => serve_tcp((host.as_str(), port), Arc::new(server))?,
            }
            Ok(())
        }
    }
}

/// `steps` (state, step) pairs taken along ground-truth proofs.
fn step_corpus(steps: usize, seed: u64) -> Result<Vec<(ProofState, ProofStep)>, CliError> {
    let mut corpus = Vec::with_capacity(steps);
    let mut round = 0;
    while corpus.len() < steps {
        let config = GeneratorConfig::new(AxiomSet::OrderedField, 3, 5).with_seed(seed.wrapping_add(round));
        round += 1;
        let theorems = generate_batch(&config, steps.div_ceil(5).min(1000))
            .map_err(|e| CliError::failed("GENERATION_FAILED", e))?;
        for t in &theorems {
            let mut state = init_state(t);
            for step in t.proof.iter().flatten() {
                if corpus.len() == steps {
                    return Ok(corpus);
                }
                corpus.push((state.clone(), step.clone()));
                state = apply_step(&state, step).next_state;
            }
        }
    }
    Ok(corpus)
}
