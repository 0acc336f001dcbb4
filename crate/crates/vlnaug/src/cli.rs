//! Command-line front end. Data goes to `--out` files only; diagnostics go
//! to stderr.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vlnaug_core::ablation::{ablate, load_lexicon, AblationMode};
use vlnaug_core::crafter::craft_instruction;
use vlnaug_core::graph::NavGraph;
use vlnaug_core::scene::{parse_house, SceneModel};
use vlnaug_core::supervision::{build_supervision, DatasetRecord};

use crate::config::{load_config, RunConfig};
use crate::connectivity::parse_connectivity;
use crate::dataset::{
    emit_paths_json, emit_r2r_json, emit_supervision_json, read_paths_json, read_r2r_json, PathRecord,
};
use crate::render::{render_viewpoint, RenderSpec};
use crate::reports::{dataset_stats, loss_check, validate_dataset, LossCheckSettings};
use crate::scene_json::{read_scene_json, write_scene_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vlnaug", version, about = "Compile navigation scenes into crafted-instruction datasets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SceneGraph {
    /// Scene as canonical JSON or a `.house` file.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Connectivity JSON.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a `.house` file into canonical scene JSON.
    ParseScene {
        #[arg(long)]
        house: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample shortest-path routes from a connectivity graph.
    SamplePaths {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Scan id; defaults to the graph file name without `_connectivity.json`.
        #[arg(long)]
        scan: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        min_hops: Option<usize>,
        #[arg(long)]
        max_hops: Option<usize>,
        #[arg(long)]
        min_geodesic: Option<f64>,
        /// First path_id to assign.
        #[arg(long, default_value_t = 0)]
        first_id: u64,
    },
    /// Craft one instruction per sampled path into an R2R-format dataset.
    Craft {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        inputs: SceneGraph,
        #[arg(long)]
        paths: Option<PathBuf>,
    },
    /// Word-to-node alignment and per-word object targets.
    Supervise {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        inputs: SceneGraph,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Objects per word (N).
        #[arg(long)]
        objects: Option<usize>,
    },
    /// Remove parts of speech from every instruction of a dataset.
    Ablate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// nouns, adjectives, nouns_adjectives or all.
        #[arg(long)]
        mode: String,
    },
    /// Parse and execute every instruction; exit 1 unless all round-trip.
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        inputs: SceneGraph,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Top-down SVG around one viewpoint.
    Render {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        inputs: SceneGraph,
        #[arg(long)]
        viewpoint: String,
        #[arg(long, default_value_t = 4.0)]
        radius: f64,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 800)]
        height: u32,
    },
    /// Analytic vs finite-difference gradients of the word loss.
    LossCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        max_vocab: usize,
    },
    /// Token and length statistics of a dataset.
    Stats {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
}

/// Failure that should exit with the validation code rather than the
/// input-error code.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ValidationFailed(pub String);

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    fs::write(path, body).with_context(|| format!("cannot write `{}`", path.display()))
}

fn config(common: &Common) -> Result<RunConfig> {
    match &common.config {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = read(p)?;
            load_config(&text, p.parent()).with_context(|| format!("in config `{}`", p.display()))
        }
    }
}

fn pick(flag: &Option<PathBuf>, from_config: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.clone()
        .or_else(|| from_config.clone())
        .ok_or_else(|| anyhow!("missing --{} (or `{}` in the config file)", name, name))
}

pub fn load_scene(path: &Path) -> Result<SceneModel> {
    let text = read(path)?;
    let scene = if path.extension().is_some_and(|e| e == "house") {
        parse_house(&text).map_err(anyhow::Error::from)
    } else {
        read_scene_json(&text).map_err(anyhow::Error::from)
    };
    scene.with_context(|| format!("in scene `{}`", path.display()))
}

fn scan_from_graph_path(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.strip_suffix("_connectivity.json")
        .or_else(|| name.strip_suffix(".json"))
        .unwrap_or(&name)
        .to_string()
}

pub fn load_graph(path: &Path, scan: &str) -> Result<NavGraph> {
    let text = read(path)?;
    parse_connectivity(&text, scan).with_context(|| format!("in graph `{}`", path.display()))
}

fn scene_and_graph(inputs: &SceneGraph, cfg: &RunConfig) -> Result<(SceneModel, NavGraph)> {
    let scene = load_scene(&pick(&inputs.scene, &cfg.inputs.scene, "scene")?)?;
    let graph = load_graph(&pick(&inputs.graph, &cfg.inputs.graph, "graph")?, &scene.scan_id)?;
    Ok((scene, graph))
}

fn check_scan(scene: &SceneModel, scan: &str, path_id: u64) -> Result<()> {
    if scan != scene.scan_id {
        bail!("path_id {}: scan `{}` does not match scene `{}`", path_id, scan, scene.scan_id);
    }
    Ok(())
}

/// Runs one parsed command.
pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ParseScene { house, out } => {
            let text = read(&house)?;
            let scene = parse_house(&text).with_context(|| format!("in `{}`", house.display()))?;
            write(&out, &write_scene_json(&scene))
        }
        Command::SamplePaths {
            common,
            graph,
            scan,
            n,
            seed,
            min_hops,
            max_hops,
            min_geodesic,
            first_id,
        } => {
            let cfg = config(&common)?;
            let graph_path = pick(&graph, &cfg.inputs.graph, "graph")?;
            let scan = scan.unwrap_or_else(|| scan_from_graph_path(&graph_path));
            let g = load_graph(&graph_path, &scan)?;
            let mut constraints = cfg.sampler.constraints;
            constraints.min_hops = min_hops.unwrap_or(constraints.min_hops);
            constraints.max_hops = max_hops.unwrap_or(constraints.max_hops);
            constraints.min_geodesic = min_geodesic.unwrap_or(constraints.min_geodesic);
            let n = n.unwrap_or(cfg.sampler.num_paths);
            let sampled = g.sample_paths(n, seed.unwrap_or(cfg.sampler.seed), &constraints)?;
            if sampled.shortfall > 0 {
                eprintln!(
                    "warning: only {} of {} paths available ({} eligible endpoint pairs)",
                    sampled.paths.len(),
                    n,
                    sampled.eligible_pairs
                );
            }
            let records: Vec<PathRecord> = sampled
                .paths
                .into_iter()
                .enumerate()
                .map(|(i, spec)| PathRecord {
                    path_id: first_id + i as u64,
                    spec,
                })
                .collect();
            write(&common.out, &emit_paths_json(&records)?)
        }
        Command::Craft { common, inputs, paths } => {
            let cfg = config(&common)?;
            let (scene, graph) = scene_and_graph(&inputs, &cfg)?;
            let paths = read_paths_json(&read(&pick(&paths, &cfg.inputs.paths, "paths")?)?)?;
            let mut records = Vec::with_capacity(paths.len());
            for p in paths {
                check_scan(&scene, &p.spec.scan, p.path_id)?;
                let crafted = craft_instruction(&scene, &graph, &p.spec, &cfg.saliency)
                    .with_context(|| format!("path_id {}", p.path_id))?;
                let distance = graph.path_length(&p.spec.path)?;
                records.push(DatasetRecord {
                    path_id: p.path_id,
                    scan: p.spec.scan,
                    heading: p.spec.heading_0,
                    path: p.spec.path,
                    instructions: vec![crafted.text],
                    distance,
                });
            }
            write(&common.out, &emit_r2r_json(&records)?)
        }
        Command::Supervise {
            common,
            inputs,
            dataset,
            objects,
        } => {
            let cfg = config(&common)?;
            let (scene, graph) = scene_and_graph(&inputs, &cfg)?;
            let records = read_r2r_json(&read(&pick(&dataset, &cfg.inputs.dataset, "dataset")?)?)?;
            let n = objects.unwrap_or(cfg.aux.n_objects);
            if n == 0 {
                bail!("--objects must be at least 1");
            }
            let mut sup = Vec::with_capacity(records.len());
            for r in &records {
                check_scan(&scene, &r.scan, r.path_id)?;
                let s = build_supervision(&scene, &graph, r.path_id, &r.path_spec(), &r.instructions[0], &cfg.saliency, n)
                    .with_context(|| format!("path_id {}", r.path_id))?;
                sup.push(s);
            }
            write(&common.out, &emit_supervision_json(&sup)?)
        }
        Command::Ablate {
            common,
            dataset,
            lexicon,
            mode,
        } => {
            let cfg = config(&common)?;
            let mode: AblationMode = mode.parse()?;
            let lex_path = pick(&lexicon, &cfg.inputs.lexicon, "lexicon")?;
            let lex = load_lexicon(&read(&lex_path)?).with_context(|| format!("in lexicon `{}`", lex_path.display()))?;
            let mut records = read_r2r_json(&read(&pick(&dataset, &cfg.inputs.dataset, "dataset")?)?)?;
            for r in &mut records {
                for text in &mut r.instructions {
                    *text = ablate(text, mode, &lex);
                }
            }
            write(&common.out, &emit_r2r_json(&records)?)
        }
        Command::Validate {
            common,
            inputs,
            dataset,
        } => {
            let cfg = config(&common)?;
            let (scene, graph) = scene_and_graph(&inputs, &cfg)?;
            let records = read_r2r_json(&read(&pick(&dataset, &cfg.inputs.dataset, "dataset")?)?)?;
            let report = validate_dataset(&scene, &graph, &records, &cfg.saliency, cfg.success_radius);
            write(&common.out, &report.to_json())?;
            if !report.passed() {
                let failed = report.checks.iter().filter(|c| !(c.round_trip && c.grammar_ok)).count();
                return Err(ValidationFailed(format!(
                    "{} of {} instructions failed validation",
                    failed,
                    report.checks.len()
                ))
                .into());
            }
            Ok(())
        }
        Command::Render {
            common,
            inputs,
            viewpoint,
            radius,
            width,
            height,
        } => {
            let cfg = config(&common)?;
            let (scene, graph) = scene_and_graph(&inputs, &cfg)?;
            let spec = RenderSpec {
                viewpoint,
                radius,
                width,
                height,
            };
            write(&common.out, &render_viewpoint(&scene, &graph, &spec)?)
        }
        Command::LossCheck {
            common,
            instances,
            seed,
            max_vocab,
        } => {
            let cfg = config(&common)?;
            let settings = LossCheckSettings {
                instances,
                seed,
                max_vocab,
                lambda: cfg.aux.lambda,
                beta: cfg.aux.beta,
                n_objects: cfg.aux.n_objects,
                ..LossCheckSettings::default()
            };
            let report = loss_check(&settings)?;
            write(&common.out, &report.to_json())?;
            if !report.passed() {
                return Err(ValidationFailed(format!(
                    "gradient check failed: max relative error {:e}",
                    report.max_rel_error
                ))
                .into());
            }
            Ok(())
        }
        Command::Stats { common, dataset } => {
            let cfg = config(&common)?;
            let records = read_r2r_json(&read(&pick(&dataset, &cfg.inputs.dataset, "dataset")?)?)?;
            write(&common.out, &dataset_stats(&records).to_json())
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {:#}", e);
            if e.downcast_ref::<ValidationFailed>().is_some() {
                EXIT_VALIDATION
            } else {
                EXIT_USAGE
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_ids_from_file_names() {
        assert_eq!(scan_from_graph_path(Path::new("/x/house_alder_connectivity.json")), "house_alder");
        assert_eq!(scan_from_graph_path(Path::new("g.json")), "g");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["vlnaug", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["vlnaug", "stats", "--bogus", "1", "--out", "x"]), EXIT_USAGE);
    }

    #[test]
    fn missing_input_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o.json");
        let code = run([
            "vlnaug".into(),
            "stats".into(),
            "--dataset".into(),
            dir.path().join("nope.json").into_os_string(),
            "--out".into(),
            out.clone().into_os_string(),
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!out.exists());
    }
}
