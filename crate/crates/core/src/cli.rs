//! Subcommand implementations behind the `aecode` binary.
//!
//! Each command is a plain function from paths and overrides to files on
//! disk, so the binary stays a thin argument parser and the commands can be
//! driven from tests.

use std::path::{Path, PathBuf};

use crate::baselines::{classical_union_bound, hamming84_codebook};
use crate::config::{ExperimentConfig, Grid};
use crate::evaluation::{
    distance_stats, monte_carlo, pairwise_distance_matrix, DecoderKind, DistanceStats,
    MonteCarloSettings, Receiver,
};
use crate::io::{
    eval_rows, read_artifact, trace_rows, write_csv, write_matrix_csv, write_stats_csv,
    write_text, Artifact, BaselineRow, CodebookFile, CodebookHeader, SavedModel,
};
use crate::models::Codebook;
use crate::training::train;
use crate::{Error, Result};

pub const MODEL_FILE: &str = "model.json";
pub const CODEBOOK_FILE: &str = "codebook.txt";
pub const TRACE_FILE: &str = "trace.csv";
pub const CONFIG_ECHO_FILE: &str = "config.toml";
pub const DISTANCE_MATRIX_FILE: &str = "distances.csv";
pub const DISTANCE_STATS_FILE: &str = "distance_stats.csv";
pub const BASELINE_FILE: &str = "baseline_hamming84.csv";
pub const HAMMING_CODEBOOK_FILE: &str = "hamming84_codebook.txt";

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub decoder: Option<DecoderKind>,
    pub grid: Option<Grid>,
}

/// Loads `path` (or defaults when absent) and applies the overrides.
///
/// Without a config file the model section is irrelevant, so a `k = 4`
/// placeholder is used.
pub fn resolve_config(path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut config = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(4),
    };
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(out) = &overrides.out {
        config.output_dir = out.clone();
    }
    if let Some(decoder) = overrides.decoder {
        config.evaluation.decoder = Some(decoder);
    }
    if let Some(grid) = overrides.grid {
        config.evaluation.set_grid(grid);
    }
    config.validate()?;
    Ok(config)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Files written by [`cmd_train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainArtifacts {
    pub run_dir: PathBuf,
    pub model: PathBuf,
    pub codebook: PathBuf,
    pub trace: PathBuf,
    pub config: PathBuf,
    pub epochs: usize,
    pub stopped_early: bool,
}

/// Fresh `<label>-<UTC timestamp>-seed<seed>` directory under `root`.
fn new_run_dir(root: &Path, label: &str, seed: u64) -> Result<PathBuf> {
    ensure_dir(root)?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = format!("{label}-{stamp}-seed{seed}");
    for attempt in 0..1000 {
        let name = if attempt == 0 {
            base.clone()
        } else {
            format!("{base}-{attempt}")
        };
        let dir = root.join(name);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::io(&dir, e)),
        }
    }
    Err(Error::config(format!(
        "could not create a fresh run directory under {}",
        root.display()
    )))
}

/// Trains per the config and writes model, codebook, trace and resolved
/// config into a new run directory.
pub fn cmd_train(config_path: &Path, overrides: &Overrides) -> Result<TrainArtifacts> {
    let config = resolve_config(Some(config_path), overrides)?;
    let (model, report) = train(&config.train_config())?;
    let codebook = model.export_codebook()?;

    let run_dir = new_run_dir(&config.output_dir, &config.label, config.seed)?;
    let artifacts = TrainArtifacts {
        model: run_dir.join(MODEL_FILE),
        codebook: run_dir.join(CODEBOOK_FILE),
        trace: run_dir.join(TRACE_FILE),
        config: run_dir.join(CONFIG_ECHO_FILE),
        epochs: report.epochs(),
        stopped_early: report.stopped_early,
        run_dir,
    };
    write_text(&artifacts.config, &config.to_toml()?)?;
    CodebookFile {
        header: CodebookHeader {
            power_mode: Some(model.config.power_mode),
            label: config.label.clone(),
            seed: config.seed,
        },
        codebook,
    }
    .write(&artifacts.codebook)?;
    SavedModel {
        label: config.label.clone(),
        seed: config.seed,
        model,
    }
    .write(&artifacts.model)?;
    write_csv(&artifacts.trace, &trace_rows(&report))?;
    Ok(artifacts)
}

/// Monte Carlo evaluation of a saved model or codebook file.
///
/// Writes `eval_<decoder>.csv` into the output directory and returns its path.
pub fn cmd_evaluate(
    artifact_path: &Path,
    config_path: Option<&Path>,
    overrides: &Overrides,
) -> Result<PathBuf> {
    let config = resolve_config(config_path, overrides)?;
    let artifact = read_artifact(artifact_path)?;
    let decoder = config.evaluation.decoder.unwrap_or(match artifact {
        Artifact::Model(_) => DecoderKind::Neural,
        Artifact::Codebook(_) => DecoderKind::Ml,
    });
    let grid = config.evaluation.grid()?.points();
    let settings = MonteCarloSettings::new(config.evaluation.stop_rule(), config.seed);

    let report = match (&artifact, decoder) {
        (Artifact::Model(saved), kind) => {
            let codebook = saved.model.export_codebook()?;
            let receiver = match kind {
                DecoderKind::Neural => Receiver::Neural(&saved.model.decoder),
                DecoderKind::Ml => Receiver::Ml,
            };
            monte_carlo(&codebook, receiver, &grid, settings)?
        }
        (Artifact::Codebook(file), DecoderKind::Ml) => {
            monte_carlo(&file.codebook, Receiver::Ml, &grid, settings)?
        }
        (Artifact::Codebook(_), DecoderKind::Neural) => {
            return Err(Error::config(
                "the neural decoder needs a saved model, not a bare codebook",
            ))
        }
    };

    ensure_dir(&config.output_dir)?;
    let path = config.output_dir.join(format!("eval_{decoder}.csv"));
    write_csv(&path, &eval_rows(&report))?;
    Ok(path)
}

fn artifact_codebook(path: &Path) -> Result<Codebook> {
    Ok(match read_artifact(path)? {
        Artifact::Model(saved) => saved.model.export_codebook()?,
        Artifact::Codebook(file) => file.codebook,
    })
}

/// Paths written by [`cmd_analyze`] and the summary they contain.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeArtifacts {
    pub matrix: PathBuf,
    pub stats: PathBuf,
    pub summary: DistanceStats,
}

/// Pairwise distance matrix and distance statistics of a codebook.
pub fn cmd_analyze(
    codebook_path: &Path,
    config_path: Option<&Path>,
    overrides: &Overrides,
) -> Result<AnalyzeArtifacts> {
    let config = resolve_config(config_path, overrides)?;
    let codebook = artifact_codebook(codebook_path)?;
    let summary = distance_stats(&codebook, config.evaluation.distance_tolerance)?;
    ensure_dir(&config.output_dir)?;
    let matrix = config.output_dir.join(DISTANCE_MATRIX_FILE);
    let stats = config.output_dir.join(DISTANCE_STATS_FILE);
    write_matrix_csv(&matrix, &pairwise_distance_matrix(&codebook))?;
    write_stats_csv(&stats, &summary)?;
    Ok(AnalyzeArtifacts {
        matrix,
        stats,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineArtifacts {
    pub csv: PathBuf,
    pub codebook: PathBuf,
}

/// ML-decoded Monte Carlo BLER and the classical union bound for the
/// extended Hamming (8,4) code. The BPSK codebook is written alongside.
pub fn cmd_baseline(config_path: Option<&Path>, overrides: &Overrides) -> Result<BaselineArtifacts> {
    let config = resolve_config(config_path, overrides)?;
    let codebook = hamming84_codebook();
    let grid = config.evaluation.grid()?.points();
    let settings = MonteCarloSettings::new(config.evaluation.stop_rule(), config.seed);
    let report = monte_carlo(&codebook, Receiver::Ml, &grid, settings)?;
    let bound = classical_union_bound(&codebook, &grid, codebook.rate())?;
    let rows: Vec<BaselineRow> = report
        .points
        .iter()
        .zip(bound)
        .map(|(p, union_bound)| BaselineRow {
            ebn0_db: p.ebn0_db,
            trials: p.trials,
            block_errors: p.block_errors,
            bit_errors: p.bit_errors,
            bler: p.bler,
            bler_ci_lo: p.bler_ci_lo,
            bler_ci_hi: p.bler_ci_hi,
            ber: p.ber,
            union_bound,
        })
        .collect();
    ensure_dir(&config.output_dir)?;
    let csv = config.output_dir.join(BASELINE_FILE);
    write_csv(&csv, &rows)?;
    let codebook_path = config.output_dir.join(HAMMING_CODEBOOK_FILE);
    CodebookFile {
        header: CodebookHeader {
            power_mode: None,
            label: "hamming84".into(),
            seed: 0,
        },
        codebook,
    }
    .write(&codebook_path)?;
    Ok(BaselineArtifacts {
        csv,
        codebook: codebook_path,
    })
}

/// Re-exports the codebook of a saved model (or rewrites a codebook file)
/// into the output directory.
pub fn cmd_export(artifact_path: &Path, overrides: &Overrides) -> Result<PathBuf> {
    let file = match read_artifact(artifact_path)? {
        Artifact::Model(saved) => CodebookFile {
            header: CodebookHeader {
                power_mode: Some(saved.model.config.power_mode),
                label: saved.label.clone(),
                seed: saved.seed,
            },
            codebook: saved.model.export_codebook()?,
        },
        Artifact::Codebook(file) => file,
    };
    let out = overrides
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs"));
    ensure_dir(&out)?;
    let path = out.join(CODEBOOK_FILE);
    file.write(&path)?;
    Ok(path)
}
