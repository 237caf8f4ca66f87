//! Command-line front end: extraction, cross-validation, training,
//! prediction, and synthetic dataset generation.
//!
//! Exit codes: 0 success, 2 for config/manifest/table parse problems,
//! 1 for everything else (including "no rows survived extraction").

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use radqvt::ml::{
    kfold_cv, load_model, roc_points, save_model, train_gradient_boosting, train_random_forest,
    GbParams, Model, ModelKind, RfParams,
};
use radqvt::phantom::{planted_dataset, PlantedConfig};
use radqvt::pipeline::{
    extract, load_config, read_feature_csv, write_feature_csv, PipelineConfig, PipelineError,
    Profile,
};

#[derive(Parser)]
#[command(name = "radqvt", about = "two-timepoint lesion radiomics pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Rf,
    Gb,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Rf => ModelKind::RandomForest,
            ModelArg::Gb => ModelKind::GradientBoosting,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Both,
    Tp1,
    Tp2,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Both => Profile::Both,
            ProfileArg::Tp1 => Profile::Tp1,
            ProfileArg::Tp2 => Profile::Tp2,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract the feature table for every lesion in a manifest
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        profile: ProfileArg,
    },
    /// Patient-grouped k-fold cross-validation over a feature table
    Cv {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "both")]
        profile: ProfileArg,
        /// output directory for cv_report.json, roc.csv, importance.csv
        #[arg(long)]
        out: PathBuf,
        /// rows in importance.csv (0 = all)
        #[arg(long, default_value_t = 0)]
        top: usize,
    },
    /// Train a model on a full feature table
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "both")]
        profile: ProfileArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a feature table with a trained model
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic data
    #[command(subcommand)]
    Phantom(PhantomCommand),
}

#[derive(Subcommand)]
enum PhantomCommand {
    /// Write a planted-signal two-timepoint dataset with manifest.csv
    MakeDataset {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let parse_error = matches!(
                e.downcast_ref::<PipelineError>(),
                Some(
                    PipelineError::ConfigParse(_)
                        | PipelineError::ManifestParse { .. }
                        | PipelineError::TableParse(_)
                )
            );
            if parse_error {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

/// Restrict a table to one timepoint's columns by suffix.
fn filter_profile(
    data: radqvt::ml::Dataset,
    profile: Profile,
) -> Result<radqvt::ml::Dataset, PipelineError> {
    let suffix = match profile {
        Profile::Both => return Ok(data),
        Profile::Tp1 => "_TP1",
        Profile::Tp2 => "_TP2",
    };
    let keep: Vec<usize> = data
        .feature_names
        .iter()
        .enumerate()
        .filter(|(_, n)| n.ends_with(suffix))
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(PipelineError::TableParse(format!(
            "no columns end with {suffix}; was the table extracted with this profile?"
        )));
    }
    let names = keep.iter().map(|&i| data.feature_names[i].clone()).collect();
    let rows = data
        .rows
        .iter()
        .map(|r| keep.iter().map(|&i| r[i]).collect())
        .collect();
    Ok(radqvt::ml::Dataset::new(names, rows, data.labels, data.groups)?)
}

fn fit(data: &radqvt::ml::Dataset, kind: ModelKind, cfg: &PipelineConfig, seed: u64) -> Result<Model, radqvt::ml::MlError> {
    match kind {
        ModelKind::RandomForest => train_random_forest(
            data,
            &RfParams { n_trees: cfg.rf_trees, min_leaf: cfg.rf_min_leaf, seed },
        ),
        ModelKind::GradientBoosting => train_gradient_boosting(
            data,
            &GbParams {
                n_stages: cfg.gb_stages,
                max_depth: cfg.gb_depth,
                learning_rate: cfg.gb_learning_rate,
                min_leaf: cfg.rf_min_leaf,
                seed,
            },
        ),
    }
}

fn run(command: Command) -> Result<(), Box<dyn std::error::Error>> {
    match command {
        Command::Extract { manifest, config, out, profile } => {
            let config = load_config(&config)?;
            let result = extract(&manifest, &config, profile.into())?;
            for (lesion, err) in &result.failures {
                eprintln!("skipped {lesion}: {err}");
            }
            write_feature_csv(&out, &result)?;
            println!(
                "extracted {} lesions x {} features ({} skipped)",
                result.rows.len(),
                result.columns.len(),
                result.failures.len()
            );
            Ok(())
        }
        Command::Cv { features, model, k, seed, profile, out, top } => {
            let (data, _) = read_feature_csv(&features)?;
            let data = filter_profile(data, profile.into())?;
            let cfg = PipelineConfig::default();
            let kind: ModelKind = model.into();
            let rf = RfParams { n_trees: cfg.rf_trees, min_leaf: cfg.rf_min_leaf, seed };
            let gb = GbParams {
                n_stages: cfg.gb_stages,
                max_depth: cfg.gb_depth,
                learning_rate: cfg.gb_learning_rate,
                min_leaf: cfg.rf_min_leaf,
                seed,
            };
            let report = kfold_cv(&data, kind, k, seed, &rf, &gb)?;

            std::fs::create_dir_all(&out)?;
            std::fs::write(
                out.join("cv_report.json"),
                serde_json::to_string_pretty(&report)?,
            )?;

            let pts = roc_points(&report.oof_scores, &data.labels)?;
            let mut roc = String::from("threshold,fpr,tpr\n");
            for p in pts {
                roc.push_str(&format!("{},{},{}\n", p.threshold, p.fpr, p.tpr));
            }
            std::fs::write(out.join("roc.csv"), roc)?;

            let full_model = fit(&data, kind, &cfg, seed)?;
            let ranked = full_model.ranked_importance();
            let take = if top == 0 { ranked.len() } else { top.min(ranked.len()) };
            let mut imp = String::from("rank,feature,importance\n");
            for (i, (name, v)) in ranked.iter().take(take).enumerate() {
                imp.push_str(&format!("{},{},{v:.16e}\n", i + 1, name));
            }
            std::fs::write(out.join("importance.csv"), imp)?;

            println!(
                "cv mean auc {:.4} +/- {:.4} over {} folds",
                report.mean_auc,
                report.std_auc,
                report.folds.len()
            );
            Ok(())
        }
        Command::Train { features, model, seed, profile, out } => {
            let (data, _) = read_feature_csv(&features)?;
            let data = filter_profile(data, profile.into())?;
            let m = fit(&data, model.into(), &PipelineConfig::default(), seed)?;
            save_model(&m, &out)?;
            println!("trained {} trees on {} samples", m.trees.len(), data.n_samples());
            Ok(())
        }
        Command::Predict { model, features, out } => {
            let m = load_model(&model)?;
            let (data, lesion_ids) = read_feature_csv(&features)?;
            // align columns to the model's expectation by name
            let index: Vec<usize> = m
                .feature_names
                .iter()
                .map(|n| {
                    data.feature_names.iter().position(|c| c == n).ok_or_else(|| {
                        PipelineError::TableParse(format!("table lacks column {n}"))
                    })
                })
                .collect::<Result<_, _>>()?;
            let rows: Vec<Vec<f64>> = data
                .rows
                .iter()
                .map(|r| index.iter().map(|&i| r[i]).collect())
                .collect();
            let scores = m.predict_proba(&rows)?;
            let mut text = String::from("lesion_id,score\n");
            for (id, s) in lesion_ids.iter().zip(&scores) {
                text.push_str(&format!("{id},{s:.16e}\n"));
            }
            std::fs::write(&out, text)?;
            println!("scored {} rows", scores.len());
            Ok(())
        }
        Command::Phantom(PhantomCommand::MakeDataset { n, seed, out }) => {
            planted_dataset(&out, &PlantedConfig { n_lesions: n, seed, ..Default::default() })?;
            println!("wrote {n} lesions under {}", out.display());
            Ok(())
        }
    }
}
