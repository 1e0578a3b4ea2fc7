//! Text file formats: temporal event files, snapshot directories, labels,
//! embeddings, checkpoints, metric records and key=value configuration.
//!
//! Floats are written with 17 significant digits so every value survives a
//! write/read round trip bit-exactly.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dygcn::DyGcnParams;
use crate::error::{Error, Result};
use crate::gcn::{GcnLayerParams, GcnModel};
use crate::graph::{compute_delta, Edge, FeatureKind, GraphSnapshot, NodeId};
use crate::linalg::{Activation, EmbeddingMatrix, Matrix};
use crate::spectral::SpectralParams;
use crate::synth::SynthConfig;
use crate::trainer::{InitScheme, OptimizerKind, TrainConfig, Variant, VariantParams};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes through a temporary sibling and renames, so readers never see a
/// half-written file.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("partial");
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Non-empty lines with `#` comments stripped, paired with 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn field<T: FromStr>(path: &Path, line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(path, line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(path, line, format!("invalid {what} '{tok}'")))
}

fn no_trailing<'a>(path: &Path, line: usize, mut toks: impl Iterator<Item = &'a str>) -> Result<()> {
    match toks.next() {
        Some(t) => Err(Error::parse(path, line, format!("unexpected trailing token '{t}'"))),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------- events

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Add,
    Remove,
}

struct Event {
    line: usize,
    t: u64,
    u: NodeId,
    v: NodeId,
    op: Op,
}

fn directive(text: &str, key: &str, path: &Path) -> Result<Option<usize>> {
    let prefix = format!("{key}=");
    for (i, l) in text.lines().enumerate() {
        if let Some(rest) = l.trim().strip_prefix('#') {
            if let Some(val) = rest.trim().strip_prefix(&prefix) {
                return val
                    .trim()
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::parse(path, i + 1, format!("invalid {key} directive")));
            }
        }
    }
    Ok(None)
}

/// Parses a temporal event file: lines `t u v op` with `op` in `{+,-}` and
/// `t` non-decreasing. Snapshot `t` holds every event with time `≤ t`; time
/// indices without events repeat the previous snapshot. The optional
/// directives `# n_slots=N` and `# n_snapshots=T` fix the slot universe and
/// pad trailing unchanged snapshots.
pub fn parse_events(text: &str, path: &Path) -> Result<Vec<GraphSnapshot>> {
    let mut events = Vec::new();
    let mut max_id = None;
    for (line, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        let t: u64 = field(path, line, toks.next(), "time index")?;
        let u: NodeId = field(path, line, toks.next(), "node id")?;
        let v: NodeId = field(path, line, toks.next(), "node id")?;
        let op = match toks.next() {
            Some("+") => Op::Add,
            Some("-") => Op::Remove,
            Some(o) => return Err(Error::parse(path, line, format!("invalid op '{o}'"))),
            None => return Err(Error::parse(path, line, "missing op")),
        };
        no_trailing(path, line, toks)?;
        if u == v {
            return Err(Error::parse(path, line, format!("self-loop ({u},{v})")));
        }
        if let Some(prev) = events.last().map(|e: &Event| e.t) {
            if t < prev {
                return Err(Error::parse(path, line, format!("time {t} after time {prev}")));
            }
        }
        max_id = max_id.max(Some(u.max(v)));
        events.push(Event { line, t, u, v, op });
    }
    let n_slots = match directive(text, "n_slots", path)? {
        Some(n) => n,
        None => max_id.map_or(0, |m| m + 1),
    };
    let n_snapshots = directive(text, "n_snapshots", path)?;
    let last_t = events.last().map_or(0, |e| e.t);
    let total = n_snapshots.unwrap_or(0).max(last_t as usize + 1);

    let mut edges: HashSet<Edge> = HashSet::new();
    let mut out = Vec::with_capacity(total);
    let mut idx = 0;
    for t in 0..total as u64 {
        let mut changed = out.is_empty();
        while idx < events.len() && events[idx].t == t {
            let e = &events[idx];
            for id in [e.u, e.v] {
                if id >= n_slots {
                    return Err(Error::parse(
                        path,
                        e.line,
                        format!("node id {id} out of range for {n_slots} slots"),
                    ));
                }
            }
            let edge = Edge::new(e.u, e.v)?;
            match e.op {
                Op::Add if !edges.insert(edge) => {
                    return Err(Error::parse(
                        path,
                        e.line,
                        format!("edge ({},{}) added but already present", e.u, e.v),
                    ))
                }
                Op::Remove if !edges.remove(&edge) => {
                    return Err(Error::parse(
                        path,
                        e.line,
                        format!("edge ({},{}) removed but not present", e.u, e.v),
                    ))
                }
                _ => {}
            }
            changed = true;
            idx += 1;
        }
        let snap = if changed {
            GraphSnapshot::from_edges(n_slots, t, edges.iter().map(|e| e.endpoints()))?
        } else {
            out.last().cloned().map(|s: GraphSnapshot| s.with_time_index(t)).unwrap()
        };
        out.push(snap);
    }
    Ok(out)
}

pub fn read_events(path: &Path) -> Result<Vec<GraphSnapshot>> {
    parse_events(&read_text(path)?, path)
}

/// Inverse of [`parse_events`]: the first snapshot as additions at time 0,
/// then each delta with removals before additions.
pub fn format_events(sequence: &[GraphSnapshot]) -> Result<String> {
    let mut s = String::new();
    let n = sequence.first().map_or(0, GraphSnapshot::n_slots);
    writeln!(s, "# n_slots={n}").unwrap();
    writeln!(s, "# n_snapshots={}", sequence.len()).unwrap();
    if let Some(first) = sequence.first() {
        let t0 = first.time_index();
        for e in first.edges() {
            writeln!(s, "{t0} {} {} +", e.lo(), e.hi()).unwrap();
        }
    }
    for w in sequence.windows(2) {
        let d = compute_delta(&w[0], &w[1])?;
        let t = w[1].time_index();
        for e in d.removed() {
            writeln!(s, "{t} {} {} -", e.lo(), e.hi()).unwrap();
        }
        for e in d.added() {
            writeln!(s, "{t} {} {} +", e.lo(), e.hi()).unwrap();
        }
    }
    Ok(s)
}

pub fn write_events(path: &Path, sequence: &[GraphSnapshot]) -> Result<()> {
    write_text(path, &format_events(sequence)?)
}

/// Reads `snap_<t>.edges` files (lines `u v`) with `t = 0, 1, …` contiguous.
/// The slot count is the largest id plus one unless given.
pub fn read_snapshot_dir(dir: &Path, n_slots: Option<usize>) -> Result<Vec<GraphSnapshot>> {
    let mut files: Vec<(u64, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(t) = name
            .strip_prefix("snap_")
            .and_then(|r| r.strip_suffix(".edges"))
        {
            let t: u64 = t
                .parse()
                .map_err(|_| Error::Input(format!("bad snapshot file name '{name}'")))?;
            files.push((t, entry.path()));
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::Input(format!("no snap_<t>.edges files in {}", dir.display())));
    }
    let mut edge_lists = Vec::with_capacity(files.len());
    let mut max_id = None;
    for (i, (t, path)) in files.iter().enumerate() {
        if *t != i as u64 {
            return Err(Error::Input(format!("snapshot {i} is missing from {}", dir.display())));
        }
        let text = read_text(path)?;
        let mut pairs = Vec::new();
        for (line, l) in content_lines(&text) {
            let mut toks = l.split_whitespace();
            let u: NodeId = field(path, line, toks.next(), "node id")?;
            let v: NodeId = field(path, line, toks.next(), "node id")?;
            no_trailing(path, line, toks)?;
            if u == v {
                return Err(Error::parse(path, line, format!("self-loop ({u},{v})")));
            }
            max_id = max_id.max(Some(u.max(v)));
            pairs.push((u, v));
        }
        edge_lists.push(pairs);
    }
    let n = n_slots.unwrap_or(max_id.map_or(0, |m| m + 1));
    edge_lists
        .into_iter()
        .enumerate()
        .map(|(t, pairs)| GraphSnapshot::from_edges(n, t as u64, pairs))
        .collect()
}

// ---------------------------------------------------------------- labels

/// Lines `v label`; every slot must be labelled exactly once.
pub fn parse_labels(text: &str, path: &Path, n_slots: usize) -> Result<Vec<usize>> {
    let mut labels = vec![None; n_slots];
    for (line, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        let v: NodeId = field(path, line, toks.next(), "node id")?;
        let label: usize = field(path, line, toks.next(), "label")?;
        no_trailing(path, line, toks)?;
        if v >= n_slots {
            return Err(Error::parse(path, line, format!("node id {v} out of range")));
        }
        if labels[v].replace(label).is_some() {
            return Err(Error::parse(path, line, format!("node {v} labelled twice")));
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| l.ok_or_else(|| Error::Input(format!("node {v} has no label"))))
        .collect()
}

pub fn read_labels(path: &Path, n_slots: usize) -> Result<Vec<usize>> {
    parse_labels(&read_text(path)?, path, n_slots)
}

pub fn format_labels(labels: &[usize]) -> String {
    labels
        .iter()
        .enumerate()
        .map(|(v, l)| format!("{v} {l}\n"))
        .collect()
}

// ------------------------------------------------------------ embeddings

pub fn format_embeddings(z: &EmbeddingMatrix) -> String {
    let mut s = String::with_capacity(z.rows() * (z.cols() * 24 + 8));
    writeln!(s, "{} {}", z.rows(), z.cols()).unwrap();
    for v in 0..z.rows() {
        write!(s, "{v}").unwrap();
        for &x in z.row(v) {
            write!(s, " {}", float(x)).unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn parse_embeddings(text: &str, path: &Path) -> Result<EmbeddingMatrix> {
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing 'N d' header"))?;
    let mut toks = header.split_whitespace();
    let n: usize = field(path, line, toks.next(), "row count")?;
    let d: usize = field(path, line, toks.next(), "dimension")?;
    no_trailing(path, line, toks)?;
    let mut z = Matrix::zeros(n, d);
    let mut seen = vec![false; n];
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let v: NodeId = field(path, line, toks.next(), "node id")?;
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::parse(path, line, format!("unexpected node id {v}")));
        }
        for c in 0..d {
            let x: f64 = field(path, line, toks.next(), "value")?;
            z.set(v, c, x);
        }
        no_trailing(path, line, toks)?;
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::Input(format!("{}: row {v} missing", path.display())));
    }
    if !z.is_finite() {
        return Err(Error::Numeric(format!("{}: non-finite embedding", path.display())));
    }
    Ok(z)
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    parse_embeddings(&read_text(path)?, path)
}

pub fn write_embeddings(path: &Path, z: &EmbeddingMatrix) -> Result<()> {
    write_text(path, &format_embeddings(z))
}

// ----------------------------------------------------------- checkpoints

fn push_matrix(s: &mut String, m: &Matrix) {
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|&x| float(x)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
}

/// Reads `rows` lines of `cols` floats each.
fn take_matrix<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    path: &Path,
    rows: usize,
    cols: usize,
) -> Result<Matrix> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line, l) = lines
            .next()
            .ok_or_else(|| Error::Input(format!("{}: truncated matrix", path.display())))?;
        let mut toks = l.split_whitespace();
        for _ in 0..cols {
            data.push(field::<f64>(path, line, toks.next(), "matrix entry")?);
        }
        no_trailing(path, line, toks)?;
    }
    Matrix::from_vec(rows, cols, data)
}

/// Header `d K activation`, then `W_0 … W_K` as `d` rows each, then `W_s`
/// for the spectral variant.
pub fn format_params(params: &VariantParams) -> String {
    let base = params.base();
    let mut s = format!("{} {} {}\n", base.dim(), base.max_order(), base.activation);
    for m in params.matrices() {
        push_matrix(&mut s, m);
    }
    s
}

pub fn parse_params(text: &str, path: &Path) -> Result<VariantParams> {
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing 'd K activation' header"))?;
    let mut toks = header.split_whitespace();
    let d: usize = field(path, line, toks.next(), "dimension")?;
    let k: usize = field(path, line, toks.next(), "max order")?;
    let act: Activation = field(path, line, toks.next(), "activation")?;
    no_trailing(path, line, toks)?;
    let w0 = take_matrix(&mut lines, path, d, d)?;
    let wk = (0..k)
        .map(|_| take_matrix(&mut lines, path, d, d))
        .collect::<Result<Vec<_>>>()?;
    let base = DyGcnParams::new(w0, wk, act)?;
    let mut rest = lines.peekable();
    if rest.peek().is_none() {
        return Ok(VariantParams::DyGcn(base));
    }
    let ws = take_matrix(&mut rest, path, d, d)?;
    if let Some((line, _)) = rest.next() {
        return Err(Error::parse(path, line, "unexpected data after W_s"));
    }
    Ok(VariantParams::Spectral(SpectralParams::new(base, ws)?))
}

pub fn read_params(path: &Path) -> Result<VariantParams> {
    parse_params(&read_text(path)?, path)
}

/// Header `layers features`, then per layer `in out activation` and the
/// weight rows.
pub fn format_gcn(model: &GcnModel, features: FeatureKind) -> String {
    let mut s = format!("{} {features}\n", model.layers.len());
    for layer in &model.layers {
        writeln!(s, "{} {} {}", layer.in_dim(), layer.out_dim(), layer.activation).unwrap();
        push_matrix(&mut s, &layer.weight);
    }
    s
}

pub fn parse_gcn(text: &str, path: &Path) -> Result<(GcnModel, FeatureKind)> {
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing 'layers features' header"))?;
    let mut toks = header.split_whitespace();
    let count: usize = field(path, line, toks.next(), "layer count")?;
    let features: FeatureKind = field(path, line, toks.next(), "feature kind")?;
    no_trailing(path, line, toks)?;
    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let (line, l) = lines
            .next()
            .ok_or_else(|| Error::Input(format!("{}: truncated layer list", path.display())))?;
        let mut toks = l.split_whitespace();
        let i: usize = field(path, line, toks.next(), "input width")?;
        let o: usize = field(path, line, toks.next(), "output width")?;
        let act: Activation = field(path, line, toks.next(), "activation")?;
        no_trailing(path, line, toks)?;
        layers.push(GcnLayerParams::new(take_matrix(&mut lines, path, i, o)?, act));
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::parse(path, line, "unexpected data after last layer"));
    }
    Ok((GcnModel { layers }, features))
}

// ------------------------------------------------------- metric records

/// One `task variant t metric value` line.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRecord {
    pub task: String,
    pub variant: String,
    pub t: u64,
    pub metric: String,
    pub value: f64,
}

impl MetricRecord {
    pub fn new(task: &str, variant: &str, t: u64, metric: &str, value: f64) -> Self {
        Self {
            task: task.into(),
            variant: variant.into(),
            t,
            metric: metric.into(),
            value,
        }
    }
}

pub fn format_records(records: &[MetricRecord]) -> String {
    records
        .iter()
        // `{}` on f64 prints the shortest representation that parses back
        // to the same value.
        .map(|r| format!("{} {} {} {} {}\n", r.task, r.variant, r.t, r.metric, r.value))
        .collect()
}

pub fn parse_records(text: &str, path: &Path) -> Result<Vec<MetricRecord>> {
    content_lines(text)
        .map(|(line, l)| {
            let mut toks = l.split_whitespace();
            let task: String = field(path, line, toks.next(), "task")?;
            let variant: String = field(path, line, toks.next(), "variant")?;
            let t: u64 = field(path, line, toks.next(), "time index")?;
            let metric: String = field(path, line, toks.next(), "metric")?;
            let value: f64 = field(path, line, toks.next(), "value")?;
            no_trailing(path, line, toks)?;
            Ok(MetricRecord {
                task,
                variant,
                t,
                metric,
                value,
            })
        })
        .collect()
}

/// Comma-separated mean/min/max per `(task, variant, metric)`, in order of
/// first appearance.
pub fn format_summary(records: &[MetricRecord]) -> String {
    let mut keys: Vec<(&str, &str, &str)> = Vec::new();
    for r in records {
        let k = (r.task.as_str(), r.variant.as_str(), r.metric.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut s = String::from("task,variant,metric,count,mean,min,max\n");
    for (task, variant, metric) in keys {
        let vals: Vec<f64> = records
            .iter()
            .filter(|r| r.task == task && r.variant == variant && r.metric == metric)
            .map(|r| r.value)
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        writeln!(s, "{task},{variant},{metric},{},{mean},{min},{max}", vals.len()).unwrap();
    }
    s
}

// --------------------------------------------------------------- config

/// `key=value` lines; `#` starts a comment. Duplicate keys are rejected.
pub fn parse_key_values(text: &str, path: &Path) -> Result<Vec<(usize, String, String)>> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for (line, l) in content_lines(text) {
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| Error::parse(path, line, "expected key=value"))?;
        let (k, v) = (k.trim(), v.trim());
        if out.iter().any(|(_, prev, _)| prev == k) {
            return Err(Error::parse(path, line, format!("duplicate key '{k}'")));
        }
        out.push((line, k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn config_value<T: FromStr>(path: &Path, line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{}:{line}: invalid value '{v}' for {key}", path.display())))
}

fn parse_bool(path: &Path, line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("{}:{line}: invalid boolean '{v}' for {key}", path.display()))),
    }
}

fn unknown_key(path: &Path, line: usize, key: &str) -> Error {
    Error::Config(format!("{}:{line}: unknown key '{key}'", path.display()))
}

/// Overrides fields of `config` from `key=value` text; keys are the field
/// names of [`TrainConfig`].
pub fn apply_train_config(config: &mut TrainConfig, text: &str, path: &Path) -> Result<()> {
    for (line, k, v) in parse_key_values(text, path)? {
        let v = v.as_str();
        let p = path;
        match k.as_str() {
            "learning_rate" => config.learning_rate = config_value(p, line, &k, v)?,
            "epochs" => config.epochs = config_value(p, line, &k, v)?,
            "negatives_per_positive" => config.negatives_per_positive = config_value(p, line, &k, v)?,
            "seed" => config.seed = config_value(p, line, &k, v)?,
            "optimizer" => config.optimizer = config_value::<OptimizerKind>(p, line, &k, v)?,
            "base_dim" => config.base_dim = config_value(p, line, &k, v)?,
            "max_order" => config.max_order = config_value(p, line, &k, v)?,
            "variant" => config.variant = config_value::<Variant>(p, line, &k, v)?,
            "activation" => config.activation = config_value::<Activation>(p, line, &k, v)?,
            "features" => config.features = config_value::<FeatureKind>(p, line, &k, v)?,
            "static_epochs" => config.static_epochs = config_value(p, line, &k, v)?,
            "static_learning_rate" => config.static_learning_rate = config_value(p, line, &k, v)?,
            "resample_negatives" => config.resample_negatives = parse_bool(p, line, &k, v)?,
            "grad_check" => config.grad_check = parse_bool(p, line, &k, v)?,
            "init" => config.init = config_value::<InitScheme>(p, line, &k, v)?,
            _ => return Err(unknown_key(p, line, &k)),
        }
    }
    config.validate()
}

pub fn format_train_config(c: &TrainConfig) -> String {
    format!(
        "learning_rate={}\nepochs={}\nnegatives_per_positive={}\nseed={}\noptimizer={}\n\
         base_dim={}\nmax_order={}\nvariant={}\nactivation={}\nfeatures={}\nstatic_epochs={}\n\
         static_learning_rate={}\nresample_negatives={}\ngrad_check={}\ninit={}\n",
        c.learning_rate,
        c.epochs,
        c.negatives_per_positive,
        c.seed,
        c.optimizer,
        c.base_dim,
        c.max_order,
        c.variant,
        c.activation,
        c.features,
        c.static_epochs,
        c.static_learning_rate,
        c.resample_negatives,
        c.grad_check,
        c.init
    )
}

/// Overrides fields of `config` from `key=value` text; keys are the field
/// names of [`SynthConfig`].
pub fn apply_synth_config(config: &mut SynthConfig, text: &str, path: &Path) -> Result<()> {
    for (line, k, v) in parse_key_values(text, path)? {
        let v = v.as_str();
        let p = path;
        match k.as_str() {
            "n_nodes" => config.n_nodes = config_value(p, line, &k, v)?,
            "communities" => config.communities = config_value(p, line, &k, v)?,
            "p_in" => config.p_in = config_value(p, line, &k, v)?,
            "p_out" => config.p_out = config_value(p, line, &k, v)?,
            "steps" => config.steps = config_value(p, line, &k, v)?,
            "churn_add" => config.churn_add = config_value(p, line, &k, v)?,
            "churn_remove" => config.churn_remove = config_value(p, line, &k, v)?,
            "seed" => config.seed = config_value(p, line, &k, v)?,
            _ => return Err(unknown_key(p, line, &k)),
        }
    }
    config.validate()
}
