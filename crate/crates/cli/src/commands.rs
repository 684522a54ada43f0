use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use oodgate::dataio::{gen_synthetic, split, write_oodf, OodfContainer, SyntheticSpec};
use oodgate::experiment::{
    ablate, ablation_tsv, diagnostics, evaluate, evaluate_baseline, sweep_cell, sweep_tsv,
    Benchmark,
};
use oodgate::metrics::fmt6;
use oodgate::{ClassifierHead, DetectorConfig, Error, FeatureMatrix, FittedDetector, ReactMode};
use rayon::prelude::*;

use crate::args::{
    AblateArgs, Command, DiagArgs, EvalArgs, FitArgs, GenArgs, ReplayArgs, ScoreArgs, SweepArgs,
};
use crate::grid::Grid;
use crate::input::{read_container, read_detector, read_features};
use crate::manifest::{manifest_path, ConfigRecord, RunManifest};
use crate::CliError;

const THREADS_ENV: &str = "OODGATE_THREADS";

/// What a finished run touched, for its manifest.
struct Outcome {
    inputs: Vec<String>,
    outputs: Vec<PathBuf>,
    config: Option<DetectorConfig>,
    seed: Option<u64>,
    manifest: PathBuf,
}

pub(crate) fn dispatch(command: Command, argv: Vec<String>) -> Result<(), CliError> {
    let (name, outcome) = match command {
        Command::Gen(a) => ("gen", gen(a)?),
        Command::Fit(a) => ("fit", fit(a)?),
        Command::Score(a) => ("score", score(a)?),
        Command::Eval(a) => ("eval", eval(a)?),
        Command::Sweep(a) => ("sweep", sweep(a)?),
        Command::Ablate(a) => ("ablate", ablation(a)?),
        Command::Diag(a) => ("diag", diag(a)?),
        Command::Replay(a) => return replay(a),
    };
    let manifest = RunManifest {
        subcommand: name.to_string(),
        argv,
        inputs: outcome.inputs,
        outputs: outcome
            .outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        config: outcome.config.as_ref().map(ConfigRecord::from),
        seed: outcome.seed,
    };
    write_file(&outcome.manifest, manifest.to_json().as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_container(path: &Path, container: &OodfContainer) -> Result<(), CliError> {
    let mut bytes = Vec::new();
    write_oodf(container, &mut bytes).map_err(|e| CliError::at(path, e))?;
    write_file(path, &bytes)
}

fn file_outcome(out: &Path, inputs: Vec<String>, config: Option<DetectorConfig>) -> Outcome {
    Outcome {
        inputs,
        outputs: vec![out.to_path_buf()],
        config,
        seed: None,
        manifest: manifest_path(out, false),
    }
}

fn gen(a: GenArgs) -> Result<Outcome, CliError> {
    let mut spec: SyntheticSpec = a.spec.parse().map_err(CliError::usage)?;
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let data = gen_synthetic(&spec)?;
    write_container(&a.out, &data.to_container(&spec))?;
    Ok(Outcome {
        seed: Some(spec.seed),
        ..file_outcome(&a.out, Vec::new(), None)
    })
}

/// Training features with their labels and the head to fit against.
fn training_inputs(
    train: &str,
    head: Option<&Path>,
    inputs: &mut Vec<String>,
) -> Result<(FeatureMatrix, Vec<usize>, ClassifierHead), CliError> {
    let (features, stored_head) = read_features(train, split::TRAIN)?;
    inputs.push(train.to_string());
    let head = match head {
        Some(p) => {
            inputs.push(p.display().to_string());
            read_container(p)?
                .head
                .ok_or_else(|| CliError::at(p, Error::InvalidContainer("no head section".into())))?
        }
        None => stored_head.ok_or_else(|| {
            CliError::from(Error::InvalidInput(format!(
                "{train} carries no head; pass --head"
            )))
        })?,
    };
    let labels = features
        .labels()
        .ok_or_else(|| Error::InvalidInput(format!("{train} has no labels")))?
        .to_vec();
    Ok((features, labels, head))
}

fn fit(a: FitArgs) -> Result<Outcome, CliError> {
    let config = a.config.resolve()?;
    let mut inputs = Vec::new();
    let (features, labels, head) = training_inputs(&a.train, a.head.as_deref(), &mut inputs)?;
    config.resolve_k(head.width()).map_err(CliError::usage)?;
    let det = FittedDetector::fit(&features, &labels, &head, config)?;
    write_container(&a.out, &OodfContainer::from_detector(&det))?;
    Ok(file_outcome(&a.out, inputs, Some(config)))
}

fn score(a: ScoreArgs) -> Result<Outcome, CliError> {
    let det = read_detector(&a.detector)?;
    let (features, _) = read_features(&a.input, split::TEST_ID)?;
    let mut out = String::new();
    for (i, r) in det.score_batch(&features)?.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i}\t{}\t{}\t{}",
            r.predicted_class,
            fmt6(r.cosine),
            fmt6(r.score)
        );
    }
    write_file(&a.out, out.as_bytes())?;
    let inputs = vec![a.detector.display().to_string(), a.input];
    Ok(file_outcome(&a.out, inputs, Some(*det.config())))
}

fn id_ood(id: &str, ood: &str) -> Result<(FeatureMatrix, FeatureMatrix), CliError> {
    Ok((
        read_features(id, split::TEST_ID)?.0,
        read_features(ood, split::TEST_OOD)?.0,
    ))
}

fn eval(a: EvalArgs) -> Result<Outcome, CliError> {
    let det = read_detector(&a.detector)?;
    let (id, ood) = id_ood(&a.id, &a.ood)?;
    write_file(&a.out, evaluate(&det, &id, &ood)?.to_tsv().as_bytes())?;
    let inputs = vec![a.detector.display().to_string(), a.id, a.ood];
    Ok(file_outcome(&a.out, inputs, Some(*det.config())))
}

fn ablation(a: AblateArgs) -> Result<Outcome, CliError> {
    let det = read_detector(&a.detector)?;
    let (id, ood) = id_ood(&a.id, &a.ood)?;
    write_file(&a.out, ablation_tsv(&ablate(&det, &id, &ood)?).as_bytes())?;
    let inputs = vec![a.detector.display().to_string(), a.id, a.ood];
    Ok(file_outcome(&a.out, inputs, Some(*det.config())))
}

fn diag(a: DiagArgs) -> Result<Outcome, CliError> {
    let det = read_detector(&a.detector)?;
    let (id, ood) = id_ood(&a.id, &a.ood)?;
    let d = diagnostics(&det, &id, &ood, a.bins as usize)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::io(&a.out_dir, e))?;
    let mut outputs = Vec::new();
    for (name, h) in [
        ("cosine_id.tsv", &d.cosine_id),
        ("cosine_ood.tsv", &d.cosine_ood),
        ("score_id.tsv", &d.score_id),
        ("score_ood.tsv", &d.score_ood),
    ] {
        let path = a.out_dir.join(name);
        write_file(&path, h.to_tsv().as_bytes())?;
        outputs.push(path);
    }
    Ok(Outcome {
        inputs: vec![a.detector.display().to_string(), a.id, a.ood],
        outputs,
        config: Some(*det.config()),
        seed: None,
        manifest: manifest_path(&a.out_dir, true),
    })
}

fn thread_cap() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(0),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(e) => Err(CliError::Usage(format!("{THREADS_ENV}: {e}"))),
    }
}

fn sweep(a: SweepArgs) -> Result<Outcome, CliError> {
    let base = a.config.resolve()?;
    let grid = Grid::parse(&a.grid).map_err(CliError::Usage)?;
    let default_lambda = match base.react_mode {
        ReactMode::Explicit(l) => Some(l),
        ReactMode::Percentile(_) => None,
    };
    let cells = grid
        .cells(base.masking_percentile, default_lambda)
        .map_err(CliError::Usage)?;
    let threads = thread_cap()?;

    let mut inputs = Vec::new();
    let (train, labels, head) = training_inputs(&a.train, a.head.as_deref(), &mut inputs)?;
    for &(p, lambda) in &cells {
        let cell = DetectorConfig {
            masking_percentile: p,
            react_mode: ReactMode::Explicit(lambda),
            ..base
        };
        cell.resolve_k(head.width()).map_err(CliError::usage)?;
    }
    let (id, ood) = id_ood(&a.id, &a.ood)?;
    inputs.extend([a.id, a.ood]);

    let bench = Benchmark {
        head: &head,
        train: &train,
        labels: &labels,
        id: &id,
        ood: &ood,
    };
    let reference = FittedDetector::fit(&train, &labels, &head, base)?;
    let baseline = evaluate_baseline(&reference, base.score_method, &id, &ood)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let results = pool.install(|| {
        cells
            .par_iter()
            .map(|&(p, lambda)| sweep_cell(&bench, base, p, lambda))
            .collect::<oodgate::Result<Vec<_>>>()
    })?;
    write_file(&a.out, sweep_tsv(&baseline, &results).as_bytes())?;
    Ok(file_outcome(&a.out, inputs, Some(base)))
}

fn replay(a: ReplayArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.manifest).map_err(|e| CliError::io(&a.manifest, e))?;
    let m = RunManifest::from_json(&text).map_err(|e| {
        CliError::at(
            &a.manifest,
            Error::InvalidInput(format!("bad manifest: {e}")),
        )
    })?;
    if m.argv.first().map(String::as_str) == Some("replay") {
        return Err(CliError::Usage("a manifest cannot replay a replay".into()));
    }
    crate::run(std::iter::once("oodgate".to_string()).chain(m.argv))
}
