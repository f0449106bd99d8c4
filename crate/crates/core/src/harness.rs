//! Experiment runner.
//!
//! Each run streams every sequence of a dataset once, in an order shuffled
//! from a per-run seed, through a fresh memory and simulated user. Before the
//! learner sees any answer, its genus and differentia predictions are scored
//! against the labels. Per-iteration scores are pooled across runs and
//! smoothed with a trailing window.
//!
//! Run `r` draws its shuffle from stream `r` of a ChaCha generator keyed by
//! the master seed, so results do not depend on how runs are scheduled across
//! threads, and every supervision level sees the same orders.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, SequenceLabel};
use crate::error::{Error, Result};
use crate::learner::{process_encounter, Decision};
use crate::memory::Memory;
use crate::oracle::{SupervisionSource, DEFAULT_BOOTSTRAP};
use crate::perception::{Encounter, PerceptionConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub window: usize,
    pub stride: usize,
    pub bootstrap: u64,
    pub runs: usize,
    pub smoothing: usize,
    pub seed: u64,
    /// Worker threads; `None` uses every core. Never affects results.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 1.0,
            window: 50,
            stride: 15,
            bootstrap: DEFAULT_BOOTSTRAP,
            runs: 200,
            smoothing: 5,
            seed: 0,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn perception(&self) -> PerceptionConfig {
        PerceptionConfig {
            window: self.window,
            stride: self.stride,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.perception().validate()?;
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if self.runs == 0 || self.smoothing == 0 {
            return Err(Error::InvalidArgument("runs and smoothing must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidArgument("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// What the labels say about the current encounter.
#[derive(Debug, Clone)]
pub struct GroundTruth<'a> {
    pub label: &'a SequenceLabel,
    /// Whether some stored object was founded by an encounter of this genus.
    pub genus_in_memory: bool,
}

/// A genus prediction is right when the learner retrieved an object of the
/// encounter's genus and judged it same-genus, or when no such object exists
/// and it judged the encounter novel.
pub fn score_genus_prediction(source: &SupervisionSource, decision: &Decision, truth: &GroundTruth) -> Result<bool> {
    if !truth.genus_in_memory {
        return Ok(!decision.predicted_same_genus);
    }
    match decision.matched_object {
        Some(id) if decision.predicted_same_genus => Ok(source.tag(id)?.genus_label == truth.label.genus_label),
        _ => Ok(false),
    }
}

/// Scored only when the genus was predicted correctly through a retrieved
/// same-genus object; right when the predicted `different` matches whether
/// the encounter is another individual than the retrieved object.
pub fn score_differentia_prediction(
    source: &SupervisionSource,
    decision: &Decision,
    truth: &GroundTruth,
    genus_correct: bool,
) -> Result<Option<bool>> {
    if !genus_correct || !decision.predicted_same_genus {
        return Ok(None);
    }
    let Some(id) = decision.matched_object else {
        return Ok(None);
    };
    let actually_different = source.tag(id)?.instance_id != truth.label.instance_id;
    Ok(Some(decision.predicted_different == actually_different))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub sequence_id: String,
    pub has_differentia: bool,
    pub genus_correct: bool,
    pub differentia_correct: Option<bool>,
    pub supervised: bool,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub iterations: Vec<IterationRecord>,
}

/// Outcome of a single run, including the final memory.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub memory: Memory,
}

/// Correct/scored counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub correct: u64,
    pub scored: u64,
}

impl Tally {
    fn add(&mut self, correct: bool) {
        self.scored += 1;
        self.correct += u64::from(correct);
    }

    fn merge(&mut self, other: Tally) {
        self.correct += other.correct;
        self.scored += other.scored;
    }

    /// Fraction correct; NaN when nothing was scored.
    pub fn rate(&self) -> f64 {
        if self.scored == 0 {
            f64::NAN
        } else {
            self.correct as f64 / self.scored as f64
        }
    }
}

/// Per-iteration tallies pooled over runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTallies {
    pub genus: Tally,
    pub differentia: Tally,
    pub differentia_with_view: Tally,
    pub differentia_without_view: Tally,
}

impl IterationTallies {
    fn merge(&mut self, other: &IterationTallies) {
        self.genus.merge(other.genus);
        self.differentia.merge(other.differentia);
        self.differentia_with_view.merge(other.differentia_with_view);
        self.differentia_without_view.merge(other.differentia_without_view);
    }
}

/// Accuracy rates over a span of iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracySummary {
    pub genus: f64,
    pub differentia: f64,
    pub differentia_with_view: f64,
    pub differentia_without_view: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub iteration: usize,
    pub genus_acc: f64,
    pub diff_acc: f64,
    pub diff_acc_with_view: f64,
    pub diff_acc_without_view: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCurves {
    pub alpha: f64,
    pub runs: usize,
    pub smoothing: usize,
    /// Raw pooled tallies, one entry per iteration.
    pub tallies: Vec<IterationTallies>,
    /// Smoothed curves.
    pub points: Vec<CurvePoint>,
    pub records: Vec<RunRecord>,
}

impl AccuracyCurves {
    fn from_records(alpha: f64, smoothing: usize, records: Vec<RunRecord>) -> Self {
        let len = records.first().map_or(0, |r| r.iterations.len());
        let mut tallies = vec![IterationTallies::default(); len];
        for record in &records {
            for (t, it) in tallies.iter_mut().zip(&record.iterations) {
                t.genus.add(it.genus_correct);
                if let Some(ok) = it.differentia_correct {
                    t.differentia.add(ok);
                    if it.has_differentia {
                        t.differentia_with_view.add(ok);
                    } else {
                        t.differentia_without_view.add(ok);
                    }
                }
            }
        }
        let points = (0..len)
            .map(|i| {
                let mut window = IterationTallies::default();
                for t in &tallies[(i + 1).saturating_sub(smoothing)..=i] {
                    window.merge(t);
                }
                CurvePoint {
                    iteration: i,
                    genus_acc: window.genus.rate(),
                    diff_acc: window.differentia.rate(),
                    diff_acc_with_view: window.differentia_with_view.rate(),
                    diff_acc_without_view: window.differentia_without_view.rate(),
                }
            })
            .collect();
        AccuracyCurves {
            alpha,
            runs: records.len(),
            smoothing,
            tallies,
            points,
            records,
        }
    }

    /// Pooled raw accuracy over iterations `range`.
    pub fn summarize(&self, range: std::ops::Range<usize>) -> AccuracySummary {
        let mut pooled = IterationTallies::default();
        for t in &self.tallies[range] {
            pooled.merge(t);
        }
        AccuracySummary {
            genus: pooled.genus.rate(),
            differentia: pooled.differentia.rate(),
            differentia_with_view: pooled.differentia_with_view.rate(),
            differentia_without_view: pooled.differentia_without_view.rate(),
        }
    }

    /// Pooled raw accuracy over the last quarter of the iterations.
    pub fn final_quartile(&self) -> AccuracySummary {
        let n = self.tallies.len();
        self.summarize(n * 3 / 4..n)
    }

    /// Pooled raw accuracy over the first half of the iterations.
    pub fn first_half(&self) -> AccuracySummary {
        self.summarize(0..self.tallies.len() / 2)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "run_count",
            "alpha",
            "iteration",
            "genus_acc",
            "diff_acc",
            "diff_acc_with_view",
            "diff_acc_without_view",
        ])?;
        let fmt = |v: f64| if v.is_nan() { String::new() } else { v.to_string() };
        for p in &self.points {
            w.write_record([
                self.runs.to_string(),
                self.alpha.to_string(),
                p.iteration.to_string(),
                fmt(p.genus_acc),
                fmt(p.diff_acc),
                fmt(p.diff_acc_with_view),
                fmt(p.diff_acc_without_view),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn csv_file_name(&self) -> String {
        format!("accuracy_alpha_{:?}.csv", self.alpha)
    }

    pub fn save_csv(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(self.csv_file_name());
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        self.write_csv(std::io::BufWriter::new(file))?;
        Ok(path)
    }
}

/// A dataset prepared for repeated runs: every sequence perceived once.
pub struct Experiment {
    encounters: Vec<(Encounter, SequenceLabel)>,
    labels: Arc<HashMap<String, SequenceLabel>>,
    config: RunConfig,
}

impl Experiment {
    pub fn new(dataset: &Dataset, config: RunConfig) -> Result<Self> {
        config.validate()?;
        if dataset.sequences.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        let perception = config.perception();
        let encounters = dataset
            .sequences
            .iter()
            .map(|s| Ok((perception.perceive(&s.sequence_id, &s.frames)?, s.label.clone())))
            .collect::<Result<Vec<_>>>()?;
        let labels = Arc::new(dataset.labels().into_iter().collect());
        Ok(Experiment {
            encounters,
            labels,
            config,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.encounters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.encounters.is_empty()
    }

    /// Same experiment at a different supervision level.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let config = RunConfig {
            alpha,
            ..self.config.clone()
        };
        config.validate()?;
        Ok(Experiment {
            encounters: self.encounters.clone(),
            labels: Arc::clone(&self.labels),
            config,
        })
    }

    /// Stream order and oracle seed of run `run`.
    pub fn run_plan(&self, run: usize) -> (Vec<usize>, u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(run as u64);
        let mut order: Vec<usize> = (0..self.encounters.len()).collect();
        order.shuffle(&mut rng);
        (order, rng.random())
    }

    pub fn run_one(&self, run: usize) -> Result<RunOutcome> {
        let (order, oracle_seed) = self.run_plan(run);
        let mut source = SupervisionSource::new(self.config.alpha, oracle_seed, Arc::clone(&self.labels))?
            .with_bootstrap(self.config.bootstrap);
        let mut memory = Memory::new();
        let mut genera_seen: HashSet<&str> = HashSet::new();
        let mut iterations = Vec::with_capacity(order.len());

        for idx in order {
            let (encounter, label) = &self.encounters[idx];
            let truth = GroundTruth {
                label,
                genus_in_memory: genera_seen.contains(label.genus_label.as_str()),
            };
            let decision = process_encounter(&mut memory, encounter.clone(), &mut source)?;
            let genus_correct = score_genus_prediction(&source, &decision, &truth)?;
            let differentia_correct = score_differentia_prediction(&source, &decision, &truth, genus_correct)?;
            if decision.kind != crate::learner::DecisionKind::MergedIntoExisting {
                genera_seen.insert(label.genus_label.as_str());
            }
            iterations.push(IterationRecord {
                sequence_id: encounter.sequence_id().to_string(),
                has_differentia: label.has_differentia,
                genus_correct,
                differentia_correct,
                supervised: decision.supervised,
                theta: decision.theta,
            });
        }
        Ok(RunOutcome {
            record: RunRecord { run, iterations },
            memory,
        })
    }

    pub fn run(&self) -> Result<AccuracyCurves> {
        let runs = self.config.runs;
        let work = || {
            (0..runs)
                .into_par_iter()
                .map(|r| self.run_one(r).map(|o| o.record))
                .collect::<Result<Vec<_>>>()
        };
        let records = match self.config.jobs {
            Some(jobs) => rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?
                .install(work)?,
            None => work()?,
        };
        tracing::debug!(alpha = self.config.alpha, runs, "experiment finished");
        Ok(AccuracyCurves::from_records(
            self.config.alpha,
            self.config.smoothing,
            records,
        ))
    }
}

/// Runs the experiment described by `config` on `dataset`.
pub fn run_experiment(dataset: &Dataset, config: &RunConfig) -> Result<AccuracyCurves> {
    Experiment::new(dataset, config.clone())?.run()
}
