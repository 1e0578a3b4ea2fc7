//! Command-line front end. Every command writes `manifest.txt` to its
//! output directory before doing any work.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::eval::{self, BenchOptions, BenchVariant, LongTermTask, SweepSetting};
use crate::gcn::GcnModel;
use crate::graph::{compute_delta, FeatureKind, FeatureMatrix, GraphSnapshot};
use crate::io::{self, MetricRecord};
use crate::synth::{self, SynthConfig};
use crate::trainer::{self, TrainConfig, Variant, VariantParams};

pub const PARAMS_FILE: &str = "params.ckpt";
pub const GCN_FILE: &str = "base_gcn.ckpt";
pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Parser)]
#[command(name = "dygcn", version, about = "Incremental dynamic graph embedding")]
pub struct Cli {
    /// key=value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core. Use 1 for bit-reproducible runs.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, default_value = "dygcn-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a stochastic-block-model event file and community labels.
    Synth,
    /// Train the base GCN and update matrices on the first half of a sequence.
    Train(TrainArgs),
    /// Advance embeddings from snapshot t to t+1.
    Step(StepArgs),
    /// Link prediction or node classification metrics.
    Eval(EvalArgs),
    /// Wall-clock timing of full recompute against incremental updates.
    Bench(BenchArgs),
    /// Convert a directory of snap_<t>.edges files into an event file.
    Convert(ConvertArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Temporal event file.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub variant: Option<CliVariant>,
}

#[derive(Debug, Args)]
pub struct StepArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Output directory of `train`.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Time index of the input embeddings.
    #[arg(long)]
    pub t: u64,
    /// Must match the checkpoint when given.
    #[arg(long)]
    pub variant: Option<CliVariant>,
    /// Embeddings at t; defaults to the base GCN applied to snapshot t.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliVariant {
    Dygcn,
    Spectral,
}

impl From<CliVariant> for Variant {
    fn from(v: CliVariant) -> Self {
        match v {
            CliVariant::Dygcn => Variant::DyGcn,
            CliVariant::Spectral => Variant::Spectral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Link,
    Classification,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, value_enum)]
    pub task: Task,
    /// Node label file, required for classification.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Roll forward from the embedding of snapshot 0 only.
    #[arg(long)]
    pub long_term: bool,
    #[arg(long, default_value_t = 30)]
    pub horizon: usize,
    /// Score only edges that are new at the predicted snapshot.
    #[arg(long)]
    pub new_edges_only: bool,
    /// Evaluate the base-GCN embedding of one snapshot instead of held-out steps.
    #[arg(long, conflicts_with = "long_term")]
    pub at: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Order,
    Dim,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Output directory of `train`; not needed for sweeps.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// A second checkpoint, so that both incremental variants can be timed.
    #[arg(long)]
    pub extra_checkpoint: Option<PathBuf>,
    /// Comma-separated subset of gcn_full, gcn_retrain, dygcn, spectral.
    #[arg(long, value_delimiter = ',')]
    pub variants: Option<Vec<String>>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Train one model per value and report held-out AUC and step time.
    #[arg(long, value_enum)]
    pub sweep: Option<SweepKind>,
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Directory of snap_<t>.edges files.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub n_slots: Option<usize>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    // Timing must not share cores with worker threads.
    let threads = if matches!(cli.command, Command::Bench(_)) { 1 } else { cli.threads };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    fs::create_dir_all(&cli.out).map_err(|e| Error::io(&cli.out, e))?;
    write_manifest(cli, threads)?;
    pool.install(|| match &cli.command {
        Command::Synth => cmd_synth(cli),
        Command::Train(a) => cmd_train(cli, a),
        Command::Step(a) => cmd_step(cli, a),
        Command::Eval(a) => cmd_eval(cli, a),
        Command::Bench(a) => cmd_bench(cli, a),
        Command::Convert(a) => cmd_convert(cli, a),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Synth => "synth",
        Command::Train(_) => "train",
        Command::Step(_) => "step",
        Command::Eval(_) => "eval",
        Command::Bench(_) => "bench",
        Command::Convert(_) => "convert",
    }
}

fn input_paths(c: &Command) -> Vec<&Path> {
    let mut v: Vec<&Path> = Vec::new();
    match c {
        Command::Synth => {}
        Command::Train(a) => v.push(&a.data),
        Command::Step(a) => {
            v.extend([a.data.as_path(), a.checkpoint.as_path()]);
            v.extend(a.embeddings.as_deref());
        }
        Command::Eval(a) => {
            v.extend([a.data.as_path(), a.checkpoint.as_path()]);
            v.extend(a.labels.as_deref());
        }
        Command::Bench(a) => {
            v.push(&a.data);
            v.extend(a.checkpoint.as_deref());
            v.extend(a.extra_checkpoint.as_deref());
        }
        Command::Convert(a) => v.push(&a.input),
    }
    v
}

fn write_manifest(cli: &Cli, threads: usize) -> Result<()> {
    let mut s = String::new();
    writeln!(s, "command={}", command_name(&cli.command)).unwrap();
    writeln!(
        s,
        "config_path={}",
        cli.config.as_ref().map_or(String::new(), |p| p.display().to_string())
    )
    .unwrap();
    let inputs: Vec<String> = input_paths(&cli.command)
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    writeln!(s, "input_paths={}", inputs.join(",")).unwrap();
    writeln!(s, "seed={}", cli.seed.map_or(String::from("config"), |x| x.to_string())).unwrap();
    writeln!(s, "output_dir={}", cli.out.display()).unwrap();
    writeln!(s, "threads={threads}").unwrap();
    writeln!(s, "tool_version={}", env!("CARGO_PKG_VERSION")).unwrap();
    let argv: Vec<String> = std::env::args().collect();
    writeln!(s, "argv={}", argv.join(" ")).unwrap();
    io::write_text(&cli.out.join(MANIFEST_FILE), &s)
}

fn train_config(cli: &Cli) -> Result<TrainConfig> {
    let mut config = TrainConfig::default();
    if let Some(path) = &cli.config {
        io::apply_train_config(&mut config, &io::read_text(path)?, path)?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

/// Snapshots used for training: the first half, at least two.
pub fn training_len(total: usize) -> usize {
    (total / 2).max(2).min(total)
}

fn cmd_synth(cli: &Cli) -> Result<()> {
    let mut config = SynthConfig::default();
    if let Some(path) = &cli.config {
        io::apply_synth_config(&mut config, &io::read_text(path)?, path)?;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let g = synth::generate(&config)?;
    io::write_events(&cli.out.join("events.txt"), &g.sequence)?;
    io::write_text(&cli.out.join("labels.txt"), &io::format_labels(&g.labels))?;
    println!(
        "wrote {} snapshots over {} slots to {}",
        g.sequence.len(),
        config.n_nodes,
        cli.out.display()
    );
    Ok(())
}

fn cmd_train(cli: &Cli, a: &TrainArgs) -> Result<()> {
    let mut config = train_config(cli)?;
    if let Some(v) = a.variant {
        config.variant = v.into();
    }
    let sequence = io::read_events(&a.data)?;
    if sequence.len() < 2 {
        return Err(Error::Input("training needs at least two snapshots".into()));
    }
    let train_len = training_len(sequence.len());
    let features = FeatureMatrix::build(config.features, &sequence[0]);
    let out = trainer::train(&sequence[..train_len], &features, &config)?;
    io::write_text(&cli.out.join(PARAMS_FILE), &io::format_params(&out.params))?;
    io::write_text(&cli.out.join(GCN_FILE), &io::format_gcn(&out.gcn, config.features))?;
    io::write_text(&cli.out.join("train_config.txt"), &io::format_train_config(&config))?;
    let mut log = String::from("stage epoch loss\n");
    for (i, l) in out.report.static_per_epoch_loss.iter().enumerate() {
        writeln!(log, "static {i} {l}").unwrap();
    }
    for (i, l) in out.report.per_epoch_loss.iter().enumerate() {
        writeln!(log, "update {i} {l}").unwrap();
    }
    io::write_text(&cli.out.join("loss.txt"), &log)?;
    if let (Some(first), Some(last)) = (
        out.report.per_epoch_loss.first(),
        out.report.per_epoch_loss.last(),
    ) {
        println!("trained {} on {train_len} snapshots: loss {first:.6} -> {last:.6}", config.variant);
    } else {
        println!("wrote initial {} parameters (0 epochs)", config.variant);
    }
    Ok(())
}

/// Parameters and base GCN from a `train` output directory.
pub struct Checkpoint {
    pub params: VariantParams,
    pub gcn: GcnModel,
    pub features: FeatureKind,
}

pub fn load_checkpoint(dir: &Path) -> Result<Checkpoint> {
    let params = io::read_params(&dir.join(PARAMS_FILE))?;
    let gcn_path = dir.join(GCN_FILE);
    let (gcn, features) = io::parse_gcn(&io::read_text(&gcn_path)?, &gcn_path)?;
    if gcn.out_dim() != params.dim() {
        return Err(Error::Input(format!(
            "base GCN width {} differs from parameter width {}",
            gcn.out_dim(),
            params.dim()
        )));
    }
    Ok(Checkpoint {
        params,
        gcn,
        features,
    })
}

fn features_for(ck: &Checkpoint, sequence: &[GraphSnapshot]) -> Result<FeatureMatrix> {
    let f = FeatureMatrix::build(ck.features, &sequence[0]);
    if f.cols() != ck.gcn.in_dim() {
        return Err(Error::Input(format!(
            "base GCN expects {} feature columns, data gives {}",
            ck.gcn.in_dim(),
            f.cols()
        )));
    }
    Ok(f)
}

fn cmd_step(cli: &Cli, a: &StepArgs) -> Result<()> {
    let ck = load_checkpoint(&a.checkpoint)?;
    if let Some(v) = a.variant {
        if Variant::from(v) != ck.params.variant() {
            return Err(Error::Input(format!(
                "checkpoint holds {} parameters, {} requested",
                ck.params.variant(),
                Variant::from(v)
            )));
        }
    }
    let sequence = io::read_events(&a.data)?;
    let t = a.t as usize;
    if t + 1 >= sequence.len() {
        return Err(Error::Input(format!(
            "no snapshot {} in a sequence of {}",
            t + 1,
            sequence.len()
        )));
    }
    let z_t = match &a.embeddings {
        Some(p) => io::read_embeddings(p)?,
        None => ck.gcn.forward(&sequence[t], &features_for(&ck, &sequence)?)?,
    };
    let (prev, next) = (&sequence[t], &sequence[t + 1]);
    let delta = compute_delta(prev, next)?;
    let start = Instant::now();
    let z_next = ck.params.step(next, &delta, &z_t)?;
    let elapsed = start.elapsed().as_secs_f64();
    let sets = crate::graph::influenced_sets(next, &delta, ck.params.base().max_order())?;
    let out = cli.out.join(format!("embeddings_{}.txt", t + 1));
    io::write_embeddings(&out, &z_next)?;
    let sizes: Vec<String> = sets
        .sizes()
        .iter()
        .enumerate()
        .map(|(k, s)| format!("V_{}={s}", k + 1))
        .collect();
    println!("{} elapsed_s={elapsed:.6} -> {}", sizes.join(" "), out.display());
    Ok(())
}

fn link_records(task: &str, variant: &str, t: u64, r: &eval::LinkPredResult) -> [MetricRecord; 2] {
    [
        MetricRecord::new(task, variant, t, "auc", r.auc),
        MetricRecord::new(task, variant, t, "f1", r.f1),
    ]
}

fn cmd_eval(cli: &Cli, a: &EvalArgs) -> Result<()> {
    let labels_path = match (a.task, &a.labels) {
        (Task::Classification, None) => {
            return Err(Error::Input("classification needs --labels".into()))
        }
        (_, p) => p.clone(),
    };
    let ck = load_checkpoint(&a.checkpoint)?;
    let sequence = io::read_events(&a.data)?;
    if sequence.len() < 2 {
        return Err(Error::Input("evaluation needs at least two snapshots".into()));
    }
    let labels = match &labels_path {
        Some(p) => Some(io::read_labels(p, sequence[0].n_slots())?),
        None => None,
    };
    let seed = train_config(cli)?.seed;
    let features = features_for(&ck, &sequence)?;
    let variant = ck.params.variant().name();
    let mut records = Vec::new();

    if let Some(at) = a.at {
        let t = at as usize;
        if t + 1 >= sequence.len() {
            return Err(Error::Input(format!("no snapshot {} to evaluate against", t + 1)));
        }
        let z = ck.gcn.forward(&sequence[t], &features)?;
        match a.task {
            Task::Link => {
                let prev = a.new_edges_only.then(|| &sequence[t]);
                let seed_t = crate::rng::derive_seed(seed, &format!("t{t}"));
                let r = eval::link_prediction_eval_with(&z, &sequence[t + 1], seed_t, prev)?;
                records.extend(link_records("link", "gcn", at, &r));
            }
            Task::Classification => {
                let labels = labels.as_deref().unwrap();
                let acc = eval::LogisticRegression::fit(&z, labels)?.accuracy(&z, labels)?;
                records.push(MetricRecord::new("classification", "gcn", at, "accuracy", acc));
            }
        }
    } else if a.long_term {
        let z0 = ck.gcn.forward(&sequence[0], &features)?;
        let task = match a.task {
            Task::Link => LongTermTask::LinkPrediction {
                seed,
                new_edges_only: a.new_edges_only,
            },
            Task::Classification => LongTermTask::NodeClassification {
                labels: labels.as_deref().unwrap(),
            },
        };
        records = eval::long_term_eval(&z0, &sequence, &ck.params, a.horizon, &task)?;
    } else {
        let train_len = training_len(sequence.len());
        match a.task {
            Task::Link => {
                let results = eval::heldout_link_prediction(
                    &ck.gcn,
                    &features,
                    &ck.params,
                    &sequence,
                    train_len,
                    seed,
                    a.new_edges_only,
                )?;
                for (t, r) in &results {
                    records.extend(link_records("link", variant, *t, r));
                }
            }
            Task::Classification => {
                let labels = labels.as_deref().unwrap();
                let z0 = ck.gcn.forward(&sequence[0], &features)?;
                let head = eval::LogisticRegression::fit(&z0, labels)?;
                for t in train_len.saturating_sub(1)..sequence.len() - 1 {
                    let z_t = ck.gcn.forward(&sequence[t], &features)?;
                    let delta = compute_delta(&sequence[t], &sequence[t + 1])?;
                    let z = ck.params.step(&sequence[t + 1], &delta, &z_t)?;
                    let acc = head.accuracy(&z, labels)?;
                    records.push(MetricRecord::new("classification", variant, (t + 1) as u64, "accuracy", acc));
                }
            }
        }
    }
    io::write_text(&cli.out.join("metrics.txt"), &io::format_records(&records))?;
    let summary = io::format_summary(&records);
    io::write_text(&cli.out.join("summary.csv"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> Result<()> {
    let sequence = io::read_events(&a.data)?;
    if sequence.len() < 2 {
        return Err(Error::Input("benchmarking needs at least two snapshots".into()));
    }
    if let Some(kind) = a.sweep {
        return bench_sweep(cli, a, kind, &sequence);
    }
    let dir = a
        .checkpoint
        .as_ref()
        .ok_or_else(|| Error::Input("bench needs --checkpoint unless --sweep is given".into()))?;
    let ck = load_checkpoint(dir)?;
    let extra = a.extra_checkpoint.as_deref().map(load_checkpoint).transpose()?;
    let mut dygcn = None;
    let mut spectral = None;
    for p in std::iter::once(&ck.params).chain(extra.as_ref().map(|c| &c.params)) {
        match p {
            VariantParams::DyGcn(p) => dygcn = Some(p.clone()),
            VariantParams::Spectral(p) => spectral = Some(p.clone()),
        }
    }
    let variants: Vec<BenchVariant> = match &a.variants {
        Some(names) => names.iter().map(|n| n.parse()).collect::<Result<_>>()?,
        None => {
            let mut v = vec![BenchVariant::GcnFull];
            v.extend(dygcn.as_ref().map(|_| BenchVariant::DyGcn));
            v.extend(spectral.as_ref().map(|_| BenchVariant::Spectral));
            v
        }
    };
    for v in &variants {
        let missing = match v {
            BenchVariant::DyGcn => dygcn.is_none(),
            BenchVariant::Spectral => spectral.is_none(),
            _ => false,
        };
        if missing {
            return Err(Error::Input(format!("no checkpoint provides {} parameters", v.name())));
        }
    }
    let features = features_for(&ck, &sequence)?;
    let mut retrain = train_config(cli)?;
    retrain.static_epochs = 1;
    let options = BenchOptions {
        variants,
        repeats: a.repeats,
        retrain,
    };
    let report = eval::timing_bench(
        &sequence,
        &ck.gcn,
        &features,
        dygcn.as_ref(),
        spectral.as_ref(),
        &options,
    )?;

    let mut records = Vec::new();
    for r in &report.records {
        for (s, secs) in report.steps.iter().zip(&r.per_step_seconds) {
            records.push(MetricRecord::new("bench", &r.variant, s.t, "seconds", *secs));
        }
    }
    io::write_text(&cli.out.join("timing.txt"), &io::format_records(&records))?;

    let mut steps = String::from("t,changed_edges,changed_nodes,influence_sizes\n");
    for s in &report.steps {
        let sizes: Vec<String> = s.influence_sizes.iter().map(|x| x.to_string()).collect();
        writeln!(steps, "{},{},{},{}", s.t, s.changed_edges, s.changed_nodes, sizes.join(" ")).unwrap();
    }
    io::write_text(&cli.out.join("steps.csv"), &steps)?;

    // Work is |ΔE| + |ΔV| for the incremental update and |ΔE| + |V| for the
    // spectral one; the fit is reported when the work varies across steps.
    let n = sequence[0].n_slots() as f64;
    let mut fit = String::from("variant,mean_seconds,slope,intercept,r_squared\n");
    for r in &report.records {
        let x: Vec<f64> = report
            .steps
            .iter()
            .map(|s| match r.variant.as_str() {
                "spectral" => s.changed_edges as f64 + n,
                _ => (s.changed_edges + s.changed_nodes) as f64,
            })
            .collect();
        match eval::linear_fit(&x, &r.per_step_seconds) {
            Ok(f) => writeln!(fit, "{},{},{},{},{}", r.variant, r.mean_seconds, f.slope, f.intercept, f.r_squared),
            Err(_) => writeln!(fit, "{},{},,,", r.variant, r.mean_seconds),
        }
        .unwrap();
    }
    io::write_text(&cli.out.join("fit.csv"), &fit)?;
    print!("{fit}");
    Ok(())
}

fn bench_sweep(cli: &Cli, a: &BenchArgs, kind: SweepKind, sequence: &[GraphSnapshot]) -> Result<()> {
    let base = train_config(cli)?;
    let values = a.values.clone().unwrap_or_else(|| match kind {
        SweepKind::Order => vec![1, 2, 3, 4],
        SweepKind::Dim => vec![50, 75, 100, 125],
    });
    let train_len = training_len(sequence.len());
    let features = FeatureMatrix::build(base.features, &sequence[0]);
    let mut settings = Vec::with_capacity(values.len());
    for &value in &values {
        let mut config = base.clone();
        let parameter = match kind {
            SweepKind::Order => {
                config.max_order = value;
                "K"
            }
            SweepKind::Dim => {
                config.base_dim = value;
                "d"
            }
        };
        let out = trainer::train(&sequence[..train_len], &features, &config)?;
        settings.push(SweepSetting {
            parameter: parameter.into(),
            value,
            gcn: out.gcn,
            params: out.params,
        });
    }
    let rows = eval::sweep(&settings, sequence, &features, train_len, base.seed, a.repeats)?;
    let table = eval::format_sweep(&rows);
    io::write_text(&cli.out.join("sweep.csv"), &table)?;
    print!("{table}");
    Ok(())
}

fn cmd_convert(cli: &Cli, a: &ConvertArgs) -> Result<()> {
    let sequence = io::read_snapshot_dir(&a.input, a.n_slots)?;
    io::write_events(&cli.out.join("events.txt"), &sequence)?;
    println!("converted {} snapshots", sequence.len());
    Ok(())
}
