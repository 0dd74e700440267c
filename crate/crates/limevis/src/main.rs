use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use limevis::dataset::{load_dataset, resolve_category, DatasetFormat, LoadedDataset};
use limevis::export::{write_outputs, Summary};
use limevis::external::{Endpoint, ExternalExtractor, ExternalPredictor, DEFAULT_TIMEOUT};
use limevis::formats::{read_model, write_model};
use limevis::server::{spawn, AppState};
use limevis::session::{execute_category, ExecuteOptions};
use limevis::{FeatureSource, LimevisError, PredictorHandle, Result};
use limevis_core::lime::ExplainConfig;
use limevis_core::predictor::{train_builtin, TrainConfig};
use limevis_core::{Predictor, SegmentationParams};

#[derive(Parser)]
#[command(name = "limevis", version, about = "Batch LIME explanations, embeddings and interactive superpixel probing")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Explain up to 100 images of one category and write the results.
    Explain(ExplainArgs),
    /// Train the builtin softmax classifier and save it.
    TrainBuiltin(TrainArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// stl10 | ppmdir
    #[arg(long, default_value = "stl10")]
    format: String,
}

#[derive(Args)]
struct ModelArgs {
    /// Builtin model file (LVM1).
    #[arg(long, conflicts_with_all = ["external_cmd", "external_url"])]
    model: Option<PathBuf>,
    /// Shell command of an external predictor (stdin/stdout).
    #[arg(long, conflicts_with = "external_url")]
    external_cmd: Option<String>,
    /// Base URL of an external predictor (HTTP POST /predict).
    #[arg(long)]
    external_url: Option<String>,
    /// Epochs for the builtin model trained when no model is given.
    #[arg(long, default_value_t = 20)]
    train_epochs: usize,
    /// Seconds to wait for each external response.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT.as_secs())]
    timeout: u64,
}

#[derive(Args)]
#[group(multiple = false)]
struct ExtractorArgs {
    /// Shell command of an external feature extractor.
    #[arg(long)]
    extractor_cmd: Option<String>,
    /// Base URL of an external feature extractor.
    #[arg(long)]
    extractor_url: Option<String>,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Category name or index.
    #[arg(long)]
    category: String,
    /// slic | felzenszwalb | quickshift
    #[arg(long, default_value = "quickshift")]
    segmentation: String,
    #[arg(long, default_value_t = 1000)]
    num_samples: usize,
    #[arg(long, default_value_t = 5)]
    num_features: usize,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    positive_only: bool,
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    hide_rest: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Shuffle the category before taking the first 100 images.
    #[arg(long)]
    shuffle_seed: Option<u64>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    extractor: ExtractorArgs,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    threads: usize,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    extractor: ExtractorArgs,
}

fn load(args: &DataArgs) -> Result<LoadedDataset> {
    let format: DatasetFormat = args.format.parse()?;
    load_dataset(&args.dataset, format)
}

fn open_predictor(args: &ModelArgs, data: &LoadedDataset, seed: u64, connections: usize) -> Result<PredictorHandle> {
    let timeout = std::time::Duration::from_secs(args.timeout);
    let endpoint = match (&args.model, &args.external_cmd, &args.external_url) {
        (Some(path), _, _) => {
            let model = read_model(&fs::read(path)?, Some(data.dataset.category_names.clone()))?;
            return Ok(PredictorHandle::Builtin(model));
        }
        (_, Some(cmd), _) => Endpoint::Command(cmd.clone()),
        (_, _, Some(url)) => Endpoint::Url(url.clone()),
        _ => {
            eprintln!("no model given; training the builtin classifier for {} epochs", args.train_epochs);
            let out = train_builtin(&data.dataset, &TrainConfig::new(args.train_epochs, 0.1, seed))?;
            return Ok(PredictorHandle::Builtin(out.model));
        }
    };
    let p = ExternalPredictor::connect_with(endpoint, timeout, connections)?;
    if p.class_count() != data.dataset.class_count() {
        return Err(LimevisError::Core(limevis_core::Error::ExternalPredictorFailure(format!(
            "predictor has {} classes, dataset has {}",
            p.class_count(),
            data.dataset.class_count()
        ))));
    }
    Ok(PredictorHandle::External(p))
}

fn open_extractor(args: &ExtractorArgs) -> Result<FeatureSource> {
    Ok(match (&args.extractor_cmd, &args.extractor_url) {
        (Some(cmd), _) => FeatureSource::External(ExternalExtractor::connect(Endpoint::Command(cmd.clone()))?),
        (_, Some(url)) => FeatureSource::External(ExternalExtractor::connect(Endpoint::Url(url.clone()))?),
        _ => FeatureSource::Builtin,
    })
}

fn predictor_label(p: &PredictorHandle) -> String {
    match p {
        PredictorHandle::Builtin(_) => "builtin".into(),
        PredictorHandle::External(e) => match e.endpoint() {
            Endpoint::Command(c) => format!("external-cmd:{c}"),
            Endpoint::Url(u) => format!("external-url:{u}"),
        },
    }
}

fn run_explain(args: ExplainArgs) -> Result<()> {
    let data = load(&args.data)?;
    let category = resolve_category(&data.dataset, &args.category)?;
    let segmentation = SegmentationParams::default_for(&args.segmentation)
        .ok_or_else(|| LimevisError::BadRequest(format!("unknown segmentation {:?}", args.segmentation)))?;
    let config = ExplainConfig {
        segmentation,
        num_samples: args.num_samples,
        num_features: args.num_features,
        positive_only: args.positive_only,
        hide_rest: args.hide_rest,
        seed: args.seed,
        ..Default::default()
    };
    config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = args.workers {
        pool = pool.num_threads(w.max(1));
    }
    let pool = pool.build().map_err(|e| LimevisError::Io(std::io::Error::other(e.to_string())))?;
    let predictor = open_predictor(&args.model, &data, args.seed, pool.current_num_threads())?;
    let features = open_extractor(&args.extractor)?;
    let options = ExecuteOptions { shuffle_seed: args.shuffle_seed, ..Default::default() };
    let session =
        pool.install(|| execute_category(&data.dataset, category, &config, &predictor, &features, &options))?;
    let summary = Summary::new(
        &session,
        data.source.display().to_string(),
        data.format.name().to_string(),
        predictor_label(&predictor),
    );
    write_outputs(&args.out, &session, &summary)?;
    println!(
        "{}: {} images, accuracy {:.3} ({} blue, {} red) -> {}",
        session.category_name,
        session.len(),
        summary.accuracy,
        summary.blue_count,
        summary.red_count,
        args.out.display()
    );
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<()> {
    let data = load(&args.data)?;
    let out = train_builtin(&data.dataset, &TrainConfig::new(args.epochs, args.lr, args.seed))?;
    for (e, loss) in out.loss_trace.iter().enumerate() {
        eprintln!("epoch {}: loss {loss:.6}", e + 1);
    }
    let correct = data
        .dataset
        .images
        .iter()
        .zip(&data.dataset.labels)
        .filter(|(img, &l)| out.model.predict_image(img).argmax() == l)
        .count();
    fs::write(&args.out, write_model(&out.model))?;
    println!(
        "trained on {} images, training accuracy {:.3} -> {}",
        data.dataset.len(),
        correct as f64 / data.dataset.len() as f64,
        args.out.display()
    );
    Ok(())
}

fn run_serve(args: ServeArgs) -> Result<()> {
    let data = load(&args.data)?;
    let predictor = open_predictor(&args.model, &data, args.seed, args.threads)?;
    let features = open_extractor(&args.extractor)?;
    let state = Arc::new(AppState::new(data, predictor, features));
    let handle = spawn(state, &format!("{}:{}", args.host, args.port), args.threads)?;
    println!("listening on http://{}", handle.addr());
    handle.join();
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Explain(a) => run_explain(a),
        Cmd::TrainBuiltin(a) => run_train(a),
        Cmd::Serve(a) => run_serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
