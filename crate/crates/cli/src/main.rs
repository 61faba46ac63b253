use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use vidsent_core::classifier::{classify_scene, evaluate, load_bank, render_eval_csv, save_bank, train_bank, LabeledClip, ModelBank};
use vidsent_core::config::Config;
use vidsent_core::features::render_series;
use vidsent_core::nlg::describe;
use vidsent_core::pipeline::{label_tracks, synth_corpus};
use vidsent_core::scene::{parse_scene_with_cap, render_scene};
use vidsent_core::synth::{parse_truth, render_truth, NoiseSpec};
use vidsent_core::tracker::{parse_tracks, render_tracks, track_scene, Track};

/// Recognizes actions in detection streams and describes them in English.
#[derive(Parser, Debug)]
#[command(name = "vidsent", version)]
struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one config key; repeatable, applied after --config.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Print every config key with its default and exit.
    #[arg(long)]
    help_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate synthetic scenes with ground truth.
    Synth(SynthArgs),
    /// Track the objects in scene files.
    Track(TrackArgs),
    /// Train a model bank from scenes or track files with `.truth` files beside them.
    Train(TrainArgs),
    /// Rank action classes for each input as CSV.
    Classify(BankArgs),
    /// Describe each input with its top-k sentences.
    Describe(BankArgs),
    /// ROC curves per class over labeled inputs, as CSV.
    Eval(BankArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Action class to stage; repeatable.
    #[arg(long = "class", required = true)]
    classes: Vec<String>,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value = "medium", value_parser = ["clean", "medium", "hard"])]
    noise_preset: String,
    /// Defaults to the `seed` config key.
    #[arg(long)]
    seed: Option<u64>,
    /// Stage about half the scenes right to left.
    #[arg(long)]
    mirror: bool,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct TrackArgs {
    #[arg(required = true)]
    scenes: Vec<PathBuf>,
    /// Also write the unsmoothed selections.
    #[arg(long)]
    emit_raw: bool,
    /// Write `<stem>.tracks` files here instead of printing. Required for several inputs.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Bank directory to create.
    #[arg(long)]
    out: PathBuf,
    /// Frame rate assumed for track files, which do not record one.
    #[arg(long, default_value_t = 30.0)]
    fps: f64,
    /// Write each clip's feature series to this directory.
    #[arg(long, value_name = "DIR")]
    dump_features: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BankArgs {
    #[arg(long)]
    bank: PathBuf,
    /// Scene or track files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

/// A mistake in how the tool was invoked, as opposed to bad data.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}\n\nFor more information, try '--help'.");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut config = Config::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        config.merge_text(&text).with_context(|| format!("in {}", path.display()))?;
    }
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        config.set(k.trim(), v.trim()).map_err(|e| usage(e.to_string()))?;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let config = load_config(&cli)?;
    if cli.help_config {
        print!("{}", Config::default().render());
        return Ok(());
    }
    let Some(command) = &cli.command else {
        return Err(usage("a subcommand is required"));
    };
    match command {
        Command::Synth(a) => synth(a, &config),
        Command::Track(a) => track(a, &config),
        Command::Train(a) => train(a, &config),
        Command::Classify(a) => classify(a, &config),
        Command::Describe(a) => describe_cmd(a, &config),
        Command::Eval(a) => eval(a, &config),
    }
}

fn synth(a: &SynthArgs, config: &Config) -> Result<()> {
    let noise = NoiseSpec::preset(&a.noise_preset).expect("clap restricts the preset names");
    let verbs: Vec<&str> = a.classes.iter().map(String::as_str).collect();
    let corpus = synth_corpus(&verbs, a.count, noise, a.mirror, a.seed.unwrap_or(config.seed))?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    for s in &corpus {
        fs::write(a.out_dir.join(format!("{}.scene", s.id)), render_scene(&s.scene))?;
        fs::write(a.out_dir.join(format!("{}.truth", s.id)), render_truth(&s.truth))?;
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Tracks for one input, read from a track file or computed from a scene
/// file, with the scene frame rate when known.
fn load_tracks(path: &Path, config: &Config) -> Result<(Vec<Track>, Option<f64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    let is_scene = first.is_none_or(|l| l.split_whitespace().next() == Some("scene"));
    if is_scene {
        let scene = parse_scene_with_cap(&text, config.max_per_frame).with_context(|| format!("parsing {}", path.display()))?;
        Ok((track_scene(&scene, &config.tracker()), Some(scene.fps)))
    } else {
        let tracks = parse_tracks(&text, config.modality_bins).with_context(|| format!("parsing {}", path.display()))?;
        Ok((tracks, None))
    }
}

fn load_all(paths: &[PathBuf], config: &Config) -> Result<Vec<(Vec<Track>, Option<f64>)>> {
    paths.par_iter().map(|p| load_tracks(p, config)).collect()
}

fn truth_path(path: &Path) -> PathBuf {
    path.with_extension("truth")
}

fn track(a: &TrackArgs, config: &Config) -> Result<()> {
    if a.out_dir.is_none() && a.scenes.len() > 1 {
        return Err(usage("several scenes need --out-dir"));
    }
    let loaded = load_all(&a.scenes, config)?;
    match &a.out_dir {
        None => print!("{}", render_tracks(&loaded[0].0, a.emit_raw)),
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (path, (tracks, _)) in a.scenes.iter().zip(&loaded) {
                fs::write(dir.join(format!("{}.tracks", stem(path))), render_tracks(tracks, a.emit_raw))?;
            }
        }
    }
    Ok(())
}

fn train(a: &TrainArgs, config: &Config) -> Result<()> {
    let loaded = load_all(&a.inputs, config)?;
    let mut clips = Vec::new();
    let mut fps = None;
    for (path, (tracks, scene_fps)) in a.inputs.iter().zip(loaded) {
        let tp = truth_path(path);
        let text = fs::read_to_string(&tp).with_context(|| format!("reading {}", tp.display()))?;
        let truth = parse_truth(&text).with_context(|| format!("parsing {}", tp.display()))?;
        match label_tracks(&tracks, &truth) {
            Ok((agent, patient)) => clips.push((stem(path), LabeledClip { verb: truth.verb, tracks, agent, patient })),
            Err(e) => eprintln!("warning: skipping {}: {e}", path.display()),
        }
        fps = fps.or(scene_fps);
    }
    let features = config.features(fps.unwrap_or(a.fps));
    let labeled: Vec<LabeledClip> = clips.iter().map(|(_, c)| c.clone()).collect();
    let outcome = train_bank(&labeled, &features, &config.classifier())?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    save_bank(&outcome.bank, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    if let Some(dir) = &a.dump_features {
        dump_features(&outcome.bank, &clips, dir)?;
    }
    Ok(())
}

fn dump_features(bank: &ModelBank, clips: &[(String, LabeledClip)], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (id, c) in clips {
        let agent = &c.tracks[c.agent];
        fs::write(dir.join(format!("{id}.1.features")), render_series(&bank.single_features(agent)?))?;
        if let Some(p) = c.patient {
            fs::write(dir.join(format!("{id}.2.features")), render_series(&bank.pair_features(agent, &c.tracks[p])?))?;
        }
    }
    Ok(())
}

fn open_bank(dir: &Path) -> Result<ModelBank> {
    load_bank(dir).with_context(|| format!("loading bank {}", dir.display()))
}

fn classify(a: &BankArgs, config: &Config) -> Result<()> {
    let bank = open_bank(&a.bank)?;
    let loaded = load_all(&a.inputs, config)?;
    let rankings = loaded.par_iter().map(|(t, _)| classify_scene(&bank, t)).collect::<Result<Vec<_>, _>>()?;
    println!("scene,rank,class,arity,agent,patient,score,present");
    for (path, ranked) in a.inputs.iter().zip(rankings) {
        let id = stem(path);
        for (i, r) in ranked.iter().enumerate() {
            let patient = r.roles.patient.map_or_else(String::new, |p| p.to_string());
            println!("{id},{},{},{},{},{patient},{},{}", i + 1, r.verb, r.arity, r.roles.agent, r.roles.score, r.present);
        }
    }
    Ok(())
}

fn describe_cmd(a: &BankArgs, config: &Config) -> Result<()> {
    let bank = open_bank(&a.bank)?;
    let params = config.nlg();
    let loaded = load_all(&a.inputs, config)?;
    let described: Vec<Vec<(String, String)>> = loaded
        .par_iter()
        .map(|(tracks, _)| -> Result<Vec<(String, String)>> {
            let ranked = classify_scene(&bank, tracks)?;
            ranked.iter().take(config.top_k).map(|r| Ok((r.verb.clone(), describe(&bank, r, tracks, &params)?))).collect()
        })
        .collect::<Result<_>>()?;
    for (path, lines) in a.inputs.iter().zip(described) {
        let id = stem(path);
        for (i, (verb, sentence)) in lines.iter().enumerate() {
            println!("{id}\t{}\t{verb}\t{sentence}", i + 1);
        }
    }
    Ok(())
}

fn eval(a: &BankArgs, config: &Config) -> Result<()> {
    let bank = open_bank(&a.bank)?;
    let loaded = load_all(&a.inputs, config)?;
    let mut labeled = Vec::new();
    for (path, (tracks, _)) in a.inputs.iter().zip(loaded) {
        let tp = truth_path(path);
        let text = fs::read_to_string(&tp).with_context(|| format!("reading {}", tp.display()))?;
        let truth = parse_truth(&text).with_context(|| format!("parsing {}", tp.display()))?;
        labeled.push((tracks, truth.verb));
    }
    if labeled.iter().all(|(_, v)| *v == labeled[0].1) {
        bail!("every input is labeled {:?}; a ROC needs at least two classes", labeled[0].1);
    }
    let rocs = evaluate(&bank, &labeled)?;
    print!("{}", render_eval_csv(&rocs));
    Ok(())
}
