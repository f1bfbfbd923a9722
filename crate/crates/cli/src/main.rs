use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use clustex::{render_report, run_pipeline, PipelineConfig};
use clustex_core::centroid::{difference_scores, format_difference_table, top_k_by_difference};
use clustex_core::cluster::{adjusted_rand_index, agglomerative_ward, kmeans, ClusterAssignment};
use clustex_core::data::{add_intercept, load_csv, split, standardize, Dataset, ScalingParams, SplitSpec};
use clustex_core::fcps::{generate, FcpsShape, GenSpec};
use clustex_core::mlp::{train, MlpConfig, MlpModel};
use clustex_core::sfit::{sfit_first_order, sfit_higher_order, sfit_per_cluster, SfitParams};

#[derive(Parser)]
#[command(name = "clustex", version, about = "Cluster tabular data and explain what characterizes each cluster")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one of the nine synthetic benchmark shapes as labeled CSV.
    Generate {
        /// Shape name (atom, chainlink, engytime, hepta, lsun, target,
        /// tetra, twodiamonds, wingnut).
        #[arg(long)]
        shape: String,
        /// Number of points; defaults to 800 (2D shapes) or 600 (3D).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: u64,
        /// Extra isotropic jitter scale.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster a CSV and write the labels plus a JSON sidecar.
    Cluster {
        #[arg(long, value_parser = ["kmeans", "ward"])]
        algo: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Cluster the raw values instead of standardizing first.
        #[arg(long)]
        raw: bool,
    },
    /// Train the cluster classifier and write the model blob.
    Train {
        #[arg(long)]
        input: PathBuf,
        /// Single-column label CSV aligned with the input rows.
        #[arg(long)]
        labels: PathBuf,
        /// Hidden layer sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![50, 25, 10])]
        hidden: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        val_fraction: f64,
        #[arg(long, default_value_t = 50)]
        max_epochs: usize,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        #[arg(long, default_value_t = 1e-3)]
        learning_rate: f64,
        #[arg(long, default_value_t = 5)]
        patience: usize,
        /// Feed the raw values to the network instead of standardizing.
        #[arg(long)]
        raw: bool,
    },
    /// Run the significance tests against a trained model.
    Explain {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Restrict the run to the rows of one cluster.
        #[arg(long)]
        cluster: Option<usize>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.05)]
        beta: f64,
        /// Highest interaction order to test.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        order: u8,
        /// Skip the exhaustive all-pairs sweep at order 2.
        #[arg(long)]
        no_all_pairs: bool,
        /// Scaling parameters saved by `train`; defaults to the sidecar
        /// next to the model, falling back to standardizing the input.
        #[arg(long)]
        scaling: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the raw input values without any standardization.
        #[arg(long)]
        raw: bool,
    },
    /// Rank features by centroid difference score per cluster.
    Centroid {
        #[arg(long)]
        input: PathBuf,
        /// Label CSV; defaults to a `label` column embedded in the input.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the whole pipeline from a JSON config.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
    /// Render the report files in a pipeline output directory.
    Report { dir: PathBuf },
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate { shape, n, seed, noise, out } => {
            let shape: FcpsShape = shape.parse().map_err(CliError::config)?;
            let spec = GenSpec::new(shape, n.unwrap_or_else(|| shape.default_n()), seed, noise)
                .map_err(CliError::config)?;
            let d = generate(&spec).map_err(CliError::runtime)?;
            d.write_csv(&out).map_err(CliError::runtime)?;
            println!("wrote {} rows x {} features ({} clusters) to {}",
                d.n(), d.p(), shape.cluster_count(), out.display());
            Ok(())
        }
        Command::Cluster { algo, k, input, out, seed, max_iter, tol, raw } => {
            let (d, truth) = load_features(&input).map_err(CliError::runtime)?;
            let work = if raw {
                d
            } else {
                standardize(&d).map_err(CliError::runtime)?.0
            };
            let assignment = match algo.as_str() {
                "kmeans" => kmeans(&work, k, seed, max_iter, tol).map_err(CliError::runtime)?,
                _ => agglomerative_ward(&work, k).map_err(CliError::runtime)?,
            };
            std::fs::write(&out, assignment.to_label_csv()).map_err(CliError::runtime)?;
            let sidecar = serde_json::json!({
                "algorithm": assignment.algorithm,
                "params": assignment.params,
                "sizes": assignment.sizes,
            });
            let sidecar_path = out.with_extension("json");
            std::fs::write(&sidecar_path, pretty(&sidecar)?).map_err(CliError::runtime)?;
            println!("cluster sizes: {:?}", assignment.sizes);
            if let Some(t) = truth {
                let t = ClusterAssignment::from_labels(t, "input", BTreeMap::new())
                    .map_err(CliError::runtime)?;
                let ari = adjusted_rand_index(&assignment, &t).map_err(CliError::runtime)?;
                println!("adjusted Rand index vs input labels: {ari:.4}");
            }
            println!("wrote {} and {}", out.display(), sidecar_path.display());
            Ok(())
        }
        Command::Train {
            input, labels, hidden, seed, out, val_fraction, max_epochs, batch_size,
            learning_rate, patience, raw,
        } => {
            if !(val_fraction > 0.0 && val_fraction < 1.0) {
                return Err(CliError::Config(format!("val_fraction {val_fraction} outside (0,1)")));
            }
            let cfg = MlpConfig {
                hidden_sizes: hidden,
                max_epochs,
                batch_size,
                learning_rate,
                early_stopping_patience: patience,
                seed,
                ..MlpConfig::default()
            };
            cfg.validate().map_err(CliError::config)?;

            let (d, _) = load_features(&input).map_err(CliError::runtime)?;
            let label_values = read_label_csv(&labels).map_err(CliError::runtime)?;
            let (work, scaling) = if raw {
                (d, None)
            } else {
                let (s, params) = standardize(&d).map_err(CliError::runtime)?;
                (s, Some(params))
            };
            let full = add_intercept(&work)
                .and_then(|w| w.with_labels(label_values))
                .map_err(CliError::runtime)?;
            let spec = SplitSpec::new(vec![1.0 - val_fraction, val_fraction], seed)
                .map_err(CliError::config)?;
            let parts = split(&full, &spec).map_err(CliError::runtime)?;
            let model = train(&parts[0], &parts[1], &cfg).map_err(CliError::runtime)?;

            std::fs::write(&out, model.to_json().map_err(CliError::runtime)?)
                .map_err(CliError::runtime)?;
            if let Some(scaling) = scaling {
                let path = scaling_sidecar_path(&out);
                std::fs::write(&path, scaling.to_json().map_err(CliError::runtime)?)
                    .map_err(CliError::runtime)?;
                println!("wrote scaling parameters to {}", path.display());
            }
            let acc = model.accuracy(&parts[1]).map_err(CliError::runtime)?;
            println!(
                "trained {} epochs; validation accuracy {acc:.4}; wrote {}",
                model.training_log.len(),
                out.display()
            );
            Ok(())
        }
        Command::Explain {
            model, input, labels, cluster, alpha, beta, order, no_all_pairs, scaling, out, raw,
        } => {
            let params = SfitParams {
                alpha,
                beta,
                max_order: order as usize,
                all_pairs: !no_all_pairs,
            };
            params.validate().map_err(CliError::config)?;

            let model_text = std::fs::read_to_string(&model).map_err(CliError::runtime)?;
            let net = MlpModel::from_json(&model_text).map_err(CliError::runtime)?;
            let (d, _) = load_features(&input).map_err(CliError::runtime)?;
            let label_values = read_label_csv(&labels).map_err(CliError::runtime)?;

            let work = if raw {
                d
            } else {
                let sidecar = scaling.or_else(|| {
                    let p = scaling_sidecar_path(&model);
                    p.exists().then_some(p)
                });
                match sidecar {
                    Some(path) => {
                        let text = std::fs::read_to_string(&path).map_err(CliError::runtime)?;
                        let params = ScalingParams::from_json(&text).map_err(CliError::runtime)?;
                        params.apply(&d).map_err(CliError::runtime)?
                    }
                    None => standardize(&d).map_err(CliError::runtime)?.0,
                }
            };
            let full = add_intercept(&work)
                .and_then(|w| w.with_labels(label_values))
                .map_err(CliError::runtime)?;

            let report = match cluster {
                Some(c) => sfit_per_cluster(&net, &full, c, &params),
                None if params.max_order == 1 => sfit_first_order(&net, &full, &params),
                None => sfit_higher_order(&net, &full, &params),
            }
            .map_err(CliError::runtime)?;

            print!("{}", report.to_text_table());
            if let Some(out) = out {
                std::fs::write(&out, report.to_json_string().map_err(CliError::runtime)?)
                    .map_err(CliError::runtime)?;
                println!("wrote {}", out.display());
            }
            Ok(())
        }
        Command::Centroid { input, labels, top, out } => {
            let (d, embedded) = load_features(&input).map_err(CliError::runtime)?;
            let label_values = match labels {
                Some(path) => read_label_csv(&path).map_err(CliError::runtime)?,
                None => embedded.ok_or_else(|| {
                    CliError::Config("no --labels given and input has no label column".into())
                })?,
            };
            let assignment = ClusterAssignment::from_labels(label_values, "input", BTreeMap::new())
                .map_err(CliError::runtime)?;
            let report = difference_scores(&d, &assignment).map_err(CliError::runtime)?;
            for cs in &report.clusters {
                let names = top_k_by_difference(&report, cs.cluster, top).map_err(CliError::runtime)?;
                let rows: Vec<(String, f64)> = names
                    .iter()
                    .map(|n| {
                        let j = report.feature_names.iter().position(|f| f == n).unwrap();
                        (n.clone(), cs.scores[j])
                    })
                    .collect();
                println!("Cluster {} - centroid difference scores", cs.cluster);
                print!("{}", format_difference_table(&rows));
                println!();
            }
            if let Some(out) = out {
                std::fs::write(&out, report.to_json_string(top).map_err(CliError::runtime)?)
                    .map_err(CliError::runtime)?;
                println!("wrote {}", out.display());
            }
            Ok(())
        }
        Command::Pipeline { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            let cfg = PipelineConfig::from_json(&text).map_err(CliError::config)?;
            let outcome = run_pipeline(&cfg).map_err(CliError::runtime)?;
            if let Some(acc) = outcome.summary["accuracy_inference"].as_f64() {
                println!("classifier accuracy (inference split): {acc:.4}");
            }
            if let Some(ari) = outcome.summary["ari_vs_input_labels"].as_f64() {
                println!("adjusted Rand index vs input labels: {ari:.4}");
            }
            for warning in outcome.summary["warnings"].as_array().into_iter().flatten() {
                if let Some(w) = warning.as_str() {
                    println!("warning: {w}");
                }
            }
            println!("wrote {} files to {}", outcome.files.len(), cfg.output_dir.display());
            Ok(())
        }
        Command::Report { dir } => {
            let text = render_report(&dir).map_err(CliError::runtime)?;
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &serde_json::Value) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(CliError::runtime)
}

/// `model.json` -> `model.scaling.json`.
fn scaling_sidecar_path(model: &Path) -> PathBuf {
    model.with_extension("scaling.json")
}

/// Loads a feature CSV, treating a column named `label` (if any) as labels
/// rather than a feature.
fn load_features(path: &Path) -> clustex_core::Result<(Dataset, Option<Vec<usize>>)> {
    let first_line = std::fs::read_to_string(path)?
        .lines()
        .next()
        .unwrap_or_default()
        .to_string();
    let has_label = first_line.split(',').any(|c| c.trim() == "label");
    let d = load_csv(path, true, has_label.then_some("label"))?;
    let labels = d.labels().map(<[usize]>::to_vec);
    Ok((d.without_labels(), labels))
}

/// Reads a single-column label CSV, with or without a header line.
fn read_label_csv(path: &Path) -> clustex_core::Result<Vec<usize>> {
    let text = std::fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cell = line.trim();
        if cell.is_empty() || (i == 0 && cell.parse::<usize>().is_err()) {
            continue;
        }
        labels.push(cell.parse::<usize>().map_err(|_| clustex_core::Error::Parse {
            row: i + 1,
            col: 1,
            msg: format!("label '{cell}' is not a positive integer"),
        })?);
    }
    if labels.is_empty() {
        return Err(clustex_core::Error::Parse {
            row: 0,
            col: 0,
            msg: "no labels found".into(),
        });
    }
    Ok(labels)
}
