//! Reports behind the `validate`, `stats` and `loss-check` commands.

use std::collections::BTreeSet;

use vlnaug_core::crafter::render_instruction;
use vlnaug_core::executor::{evaluate, execute, parse_crafted, NavMetrics};
use vlnaug_core::graph::NavGraph;
use vlnaug_core::loss::{grad_logits, word_loss, LossError, WordTargets};
use vlnaug_core::rng::SplitMix64;
use vlnaug_core::saliency::SaliencyConfig;
use vlnaug_core::scene::SceneModel;
use vlnaug_core::supervision::{tokenize, DatasetRecord};

use crate::json::{self, Object};

/// Outcome for one instruction of one record.
#[derive(Debug, Clone, PartialEq)]
pub struct InstructionCheck {
    pub path_id: u64,
    pub instruction: usize,
    /// Parses and re-renders to the identical text.
    pub grammar_ok: bool,
    pub round_trip: bool,
    pub metrics: Option<NavMetrics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub scan: String,
    pub checks: Vec<InstructionCheck>,
    pub metrics: NavMetrics,
}

impl ValidationReport {
    pub fn round_trip_rate(&self) -> f64 {
        if self.checks.is_empty() {
            return 1.0;
        }
        self.checks.iter().filter(|c| c.round_trip).count() as f64 / self.checks.len() as f64
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.round_trip && c.grammar_ok)
    }

    pub fn to_json(&self) -> String {
        let items: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let mut o = Object::new()
                    .int("path_id", c.path_id)
                    .int("instruction", c.instruction)
                    .raw("grammar_ok", c.grammar_ok.to_string())
                    .raw("round_trip", c.round_trip.to_string());
                o = match &c.metrics {
                    Some(m) => o.raw("metrics", metrics_json(m)),
                    None => o.raw("metrics", "null"),
                };
                match &c.error {
                    Some(e) => o.str("error", e),
                    None => o.raw("error", "null"),
                }
                .finish()
            })
            .collect();
        format!(
            "{{\n  \"scan\": {},\n  \"instructions\": {},\n  \"round_trip_rate\": {},\n  \"passed\": {},\n  \"metrics\": {},\n  \"checks\": {}\n}}\n",
            json::string(&self.scan),
            self.checks.len(),
            json::num(self.round_trip_rate()),
            self.passed(),
            metrics_json(&self.metrics),
            json::lines_array(&items, 2)
        )
    }
}

/// Non-finite values (an unreachable goal) are written as `null`.
fn finite_or_null(x: f64) -> String {
    if x.is_finite() {
        json::num(x)
    } else {
        "null".to_string()
    }
}

fn metrics_json(m: &NavMetrics) -> String {
    Object::new()
        .raw("pl", finite_or_null(m.pl))
        .raw("ne", finite_or_null(m.ne))
        .raw("sr", finite_or_null(m.sr))
        .raw("spl", finite_or_null(m.spl))
        .finish()
}

fn check_one(
    scene: &SceneModel,
    graph: &NavGraph,
    record: &DatasetRecord,
    text: &str,
    cfg: &SaliencyConfig,
    success_radius: f64,
) -> Result<(bool, bool, NavMetrics), String> {
    if record.scan != graph.scan_id() {
        return Err(format!("record scan `{}` does not match graph `{}`", record.scan, graph.scan_id()));
    }
    let atoms = parse_crafted(text).map_err(|e| e.to_string())?;
    let grammar_ok = render_instruction(&atoms) == text;
    let start = record.path.first().ok_or("empty path")?;
    let result = execute(graph, scene, start, record.heading, &atoms, cfg).map_err(|e| e.to_string())?;
    let gold = record.path_spec();
    let metrics = evaluate(graph, &gold, &result, success_radius).map_err(|e| e.to_string())?;
    Ok((grammar_ok, result.path == record.path, metrics))
}

/// Parses and executes every instruction of every record and scores it
/// against the record's path.
pub fn validate_dataset(
    scene: &SceneModel,
    graph: &NavGraph,
    records: &[DatasetRecord],
    cfg: &SaliencyConfig,
    success_radius: f64,
) -> ValidationReport {
    let mut checks = Vec::new();
    for r in records {
        for (i, text) in r.instructions.iter().enumerate() {
            let check = match check_one(scene, graph, r, text, cfg, success_radius) {
                Ok((grammar_ok, round_trip, metrics)) => InstructionCheck {
                    path_id: r.path_id,
                    instruction: i,
                    grammar_ok,
                    round_trip,
                    metrics: Some(metrics),
                    error: None,
                },
                Err(e) => InstructionCheck {
                    path_id: r.path_id,
                    instruction: i,
                    grammar_ok: false,
                    round_trip: false,
                    metrics: None,
                    error: Some(e),
                },
            };
            checks.push(check);
        }
    }
    checks.sort_by_key(|c| (c.path_id, c.instruction));
    let per: Vec<NavMetrics> = checks.iter().filter_map(|c| c.metrics).collect();
    ValidationReport {
        scan: graph.scan_id().to_string(),
        metrics: NavMetrics::mean(&per),
        checks,
    }
}

/// Token and length summary of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub records: usize,
    pub instructions: usize,
    pub tokens_mean: f64,
    pub tokens_min: usize,
    pub tokens_max: usize,
    pub vocabulary: usize,
    pub hops_mean: f64,
    pub distance_mean: f64,
}

impl DatasetStats {
    pub fn to_json(&self) -> String {
        let o = Object::new()
            .int("records", self.records)
            .int("instructions", self.instructions)
            .num("tokens_mean", self.tokens_mean)
            .int("tokens_min", self.tokens_min)
            .int("tokens_max", self.tokens_max)
            .int("vocabulary", self.vocabulary)
            .num("hops_mean", self.hops_mean)
            .num("distance_mean", self.distance_mean)
            .finish();
        format!("{}\n", o)
    }
}

pub fn dataset_stats(records: &[DatasetRecord]) -> DatasetStats {
    let mut vocab = BTreeSet::new();
    let mut counts = Vec::new();
    for r in records {
        for text in &r.instructions {
            let toks = tokenize(text);
            counts.push(toks.len());
            vocab.extend(toks);
        }
    }
    let mean = |xs: &[f64]| if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
    let token_counts: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let hops: Vec<f64> = records.iter().map(|r| r.path.len().saturating_sub(1) as f64).collect();
    let distances: Vec<f64> = records.iter().map(|r| r.distance).collect();
    DatasetStats {
        records: records.len(),
        instructions: counts.len(),
        tokens_mean: mean(&token_counts),
        tokens_min: counts.iter().copied().min().unwrap_or(0),
        tokens_max: counts.iter().copied().max().unwrap_or(0),
        vocabulary: vocab.len(),
        hops_mean: mean(&hops),
        distance_mean: mean(&distances),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCheckSettings {
    pub instances: usize,
    pub seed: u64,
    pub max_vocab: usize,
    pub lambda: f64,
    pub beta: f64,
    pub n_objects: usize,
    pub step: f64,
    pub tolerance: f64,
}

impl Default for LossCheckSettings {
    fn default() -> Self {
        LossCheckSettings {
            instances: 100,
            seed: 42,
            max_vocab: 16,
            lambda: 0.5,
            beta: 0.3,
            n_objects: 2,
            step: 1e-5,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossCheckReport {
    pub settings: LossCheckSettings,
    /// Largest `|analytic − numeric| / max(|analytic|, |numeric|)` over all
    /// gradient entries of all instances.
    pub max_rel_error: f64,
    /// Largest `|NLL(uniform) − ln V|` over V = 2..=max_vocab.
    pub uniform_error: f64,
}

impl LossCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error <= self.settings.tolerance && self.uniform_error <= 1e-12
    }

    pub fn to_json(&self) -> String {
        let s = &self.settings;
        let o = Object::new()
            .int("instances", s.instances)
            .int("seed", s.seed)
            .int("max_vocab", s.max_vocab)
            .num("lambda", s.lambda)
            .num("beta", s.beta)
            .int("n_objects", s.n_objects)
            .raw("step", format!("{:e}", s.step))
            .raw("tolerance", format!("{:e}", s.tolerance))
            .raw("max_rel_error", format!("{:e}", self.max_rel_error))
            .raw("uniform_error", format!("{:e}", self.uniform_error))
            .raw("passed", self.passed().to_string())
            .finish();
        format!("{}\n", o)
    }
}

/// Compares [`grad_logits`] with central differences of [`word_loss`] on
/// random instances drawn from a splitmix64 stream.
pub fn loss_check(settings: &LossCheckSettings) -> Result<LossCheckReport, LossError> {
    let mut rng = SplitMix64::new(settings.seed);
    let max_vocab = settings.max_vocab.max(2) as u64;
    let mut worst = 0.0f64;
    for _ in 0..settings.instances {
        let v = 2 + rng.below(max_vocab - 1);
        let logits: Vec<f64> = (0..v).map(|_| 8.0 * rng.next_f64() - 4.0).collect();
        let mut pick = || rng.below(v) as usize;
        let targets = WordTargets {
            originals: [pick(), pick(), pick()],
            objects: (0..settings.n_objects).map(|_| pick()).collect(),
            crafted: Some(pick()),
        };
        let analytic = grad_logits(&logits, &targets, settings.lambda, settings.beta)?;
        for (i, &a) in analytic.iter().enumerate() {
            let mut up = logits.clone();
            let mut down = logits.clone();
            up[i] += settings.step;
            down[i] -= settings.step;
            let f_up = word_loss(&up, &targets, settings.lambda, settings.beta)?.total;
            let f_down = word_loss(&down, &targets, settings.lambda, settings.beta)?.total;
            let numeric = (f_up - f_down) / (2.0 * settings.step);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-12);
            worst = worst.max(rel);
        }
    }
    let mut uniform_error = 0.0f64;
    for v in 2..=settings.max_vocab.max(2) {
        let logp = vlnaug_core::loss::log_softmax(&vec![0.0; v])?;
        uniform_error = uniform_error.max((-logp[0] - (v as f64).ln()).abs());
    }
    Ok(LossCheckReport {
        settings: *settings,
        max_rel_error: worst,
        uniform_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use vlnaug_core::geometry::Vec3;
    use vlnaug_core::graph::Viewpoint;

    #[test]
    fn loss_check_passes_at_defaults() {
        let r = loss_check(&LossCheckSettings::default()).unwrap();
        assert!(r.passed(), "{:?}", r);
        assert!(r.to_json().contains("\"passed\": true"));
    }

    #[test]
    fn stats_summary() {
        let rec = DatasetRecord {
            path_id: 0,
            scan: "s".into(),
            heading: 0.0,
            path: vec!["a".into(), "b".into(), "c".into()],
            instructions: vec!["Walk straight. Stop there.".into(), "Stop there.".into()],
            distance: 4.0,
        };
        let s = dataset_stats(&[rec]);
        assert_eq!((s.records, s.instructions, s.tokens_min, s.tokens_max), (1, 2, 2, 4));
        assert_eq!(s.tokens_mean, 3.0);
        assert_eq!(s.vocabulary, 4);
        assert_eq!(s.hops_mean, 2.0);
        assert_eq!(dataset_stats(&[]).tokens_mean, 0.0);
    }

    #[test]
    fn validation_flags_bad_text() {
        let vp = |id: &str, x: f64| Viewpoint {
            id: id.into(),
            position: Vec3::new(x, 0.0, 1.5),
            height: 1.5,
            included: true,
        };
        let g = NavGraph::from_edges("s", vec![vp("a", 0.0), vp("b", 2.0)], &[("a", "b")]).unwrap();
        let rec = DatasetRecord {
            path_id: 1,
            scan: "s".into(),
            heading: std::f64::consts::FRAC_PI_2,
            path: vec!["a".into(), "b".into()],
            instructions: vec!["Walk straight. Stop there.".into(), "Walk sideways.".into()],
            distance: 2.0,
        };
        let report = validate_dataset(&SceneModel::default(), &g, &[rec], &SaliencyConfig::default(), 3.0);
        assert_eq!(report.checks.len(), 2);
        assert!(report.checks[0].round_trip && report.checks[0].grammar_ok);
        assert!(!report.checks[1].round_trip);
        assert!(report.checks[1].error.is_some());
        assert!(!report.passed());
        assert_eq!(report.round_trip_rate(), 0.5);
        assert!(report.to_json().contains("\"round_trip_rate\": 0.500000"));
    }
}
