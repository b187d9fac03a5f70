use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::init::{init_weights_with, InitScheme};
use super::loss::{loss_with_grad, LossKind, ScoreLayout};
use super::model::{EmbeddingModel, Gradients};
use super::optim::{Optimizer, OptimizerKind};
use super::schedule::{LrSchedule, TrainState};
use super::{Method, TrainingMethod};
use crate::error::{Error, Result};
use crate::eval::{evaluate, Direction, Metrics};
use crate::graph::{KnowledgeGraph, PositiveSet, Slot, Triple};
use crate::sampler::{names, HyperparameterSpace, ParamValue, TrialConfig};

/// Constants held fixed across a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct FixedSettings {
    pub negatives: usize,
    pub max_epochs: u32,
    pub eval_every: u32,
    pub margin: f64,
    pub direction: Direction,
}

impl Default for FixedSettings {
    fn default() -> Self {
        Self { negatives: 50, max_epochs: 100, eval_every: 5, margin: 1.0, direction: Direction::Both }
    }
}

/// Everything needed to train one model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainingConfig {
    pub method: Method,
    pub training: TrainingMethod,
    pub loss: LossKind,
    pub optimizer: OptimizerKind,
    pub init: InitScheme,
    pub dim: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub patience: u32,
    pub regularization: f64,
    pub dropout: f64,
    pub fixed: FixedSettings,
}

impl TrainingConfig {
    /// A reasonable starting point; callers override fields as needed.
    pub fn new(method: Method, training: TrainingMethod, loss: LossKind) -> Self {
        Self {
            method,
            training,
            loss,
            optimizer: OptimizerKind::Adam,
            init: InitScheme::XavierNormal,
            dim: 32,
            batch_size: 128,
            learning_rate: 0.01,
            patience: 5,
            regularization: 0.0,
            dropout: 0.0,
            fixed: FixedSettings::default(),
        }
    }

    /// Reads a decoded configuration of `space` (which must name the
    /// standard dimensions). ComplEx dimensions are rounded up to even.
    pub fn from_trial(method: Method, space: &HyperparameterSpace, config: &TrialConfig, fixed: FixedSettings) -> Result<Self> {
        let get = |name: &str| -> Result<&ParamValue> {
            config.get(space, name).ok_or_else(|| Error::InvalidArgument(alloc::format!("configuration lacks `{name}`")))
        };
        let level = |name: &str| -> Result<&str> {
            get(name)?.as_level().ok_or_else(|| Error::InvalidArgument(alloc::format!("`{name}` is not categorical")))
        };
        let number = |name: &str| -> Result<f64> {
            get(name)?.as_f64().ok_or_else(|| Error::InvalidArgument(alloc::format!("`{name}` is not numeric")))
        };
        let init = match level(names::WEIGHT_INIT)? {
            "normal" => InitScheme::Normal { std: number(names::INIT_NORMAL_STD)? },
            "uniform" => InitScheme::Uniform { lower: number(names::INIT_UNIFORM_LOWER)? },
            "xavier_normal" => InitScheme::XavierNormal,
            "xavier_uniform" => InitScheme::XavierUniform,
            other => return Err(Error::InvalidArgument(alloc::format!("unknown weight initialisation `{other}`"))),
        };
        let mut dim = number(names::EMBEDDING_SIZE)? as usize;
        if method == Method::ComplEx && dim % 2 == 1 {
            dim += 1;
        }
        let cfg = Self {
            method,
            training: level(names::TRAINING_METHOD)?.parse()?,
            loss: level(names::LOSS)?.parse()?,
            optimizer: level(names::OPTIMIZER)?.parse()?,
            init,
            dim,
            batch_size: number(names::BATCH_SIZE)? as usize,
            learning_rate: number(names::LEARNING_RATE)?,
            patience: number(names::LR_PATIENCE)? as u32,
            regularization: number(names::REGULARIZATION_WEIGHT)?,
            dropout: number(names::DROPOUT)?,
            fixed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(alloc::format!("{what}")));
        if self.dim == 0 {
            return bad("embedding size must be positive");
        }
        if self.method == Method::ComplEx && self.dim % 2 == 1 {
            return bad("ComplEx needs an even embedding size");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return bad("regularization weight must be non-negative");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must lie in [0, 1)");
        }
        if self.fixed.eval_every == 0 {
            return bad("validation interval must be positive");
        }
        if self.training == TrainingMethod::NegativeSampling && self.fixed.negatives == 0 {
            return bad("negative sampling needs at least one negative");
        }
        if self.loss == LossKind::MarginRanking && self.training != TrainingMethod::NegativeSampling {
            return bad("margin ranking loss needs negative sampling");
        }
        self.init.validate()
    }
}

/// A scoring query: predict `slot` given the other end and a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Query {
    pub anchor: u32,
    pub relation: u32,
    pub slot: Slot,
}

/// One candidate row fed to the loss.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRow {
    pub query: Query,
    /// Explicit candidates, or `None` for every entity.
    pub candidates: Option<Vec<u32>>,
    /// Sorted entity ids labelled 1.
    pub positives: Vec<u32>,
}

impl TrainingRow {
    pub fn len(&self, entity_count: usize) -> usize {
        self.candidates.as_ref().map_or(entity_count, Vec::len)
    }

    pub fn is_empty(&self, entity_count: usize) -> bool {
        self.len(entity_count) == 0
    }

    /// Label of every candidate, in candidate order.
    pub fn labels(&self, entity_count: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.len(entity_count)];
        match &self.candidates {
            Some(c) => {
                for (l, e) in out.iter_mut().zip(c) {
                    if self.positives.binary_search(e).is_ok() {
                        *l = 1.0;
                    }
                }
            }
            None => self.positives.iter().for_each(|&p| out[p as usize] = 1.0),
        }
        out
    }
}

/// Rows for negative sampling or 1vsAll over a batch of positives.
///
/// Negative sampling corrupts one slot per positive (chosen 50/50) with
/// uniform draws from entities that do not complete the query in `train`.
/// 1vsAll ranks each positive against all entities in both slots and keeps
/// other true completions as negatives.
pub fn build_rows<R: Rng + ?Sized>(
    training: TrainingMethod,
    batch: &[Triple],
    train: &PositiveSet,
    entity_count: usize,
    negatives: usize,
    rng: &mut R,
) -> Result<Vec<TrainingRow>> {
    let mut rows = Vec::new();
    match training {
        TrainingMethod::NegativeSampling => {
            for &t in batch {
                let slot = if rng.random_bool(0.5) { Slot::Subject } else { Slot::Object };
                let query = Query { anchor: slot.anchor(t), relation: t.predicate, slot };
                let target = slot.target(t);
                let known = train.completions(query.anchor, query.relation, slot);
                let available = entity_count.saturating_sub(known.len());
                let mut cands = Vec::with_capacity(negatives + 1);
                cands.push(target);
                if available > 0 {
                    for _ in 0..negatives {
                        cands.push(nth_outside(rng.random_range(0..available) as u32, known));
                    }
                }
                rows.push(TrainingRow { query, candidates: Some(cands), positives: vec![target] });
            }
        }
        TrainingMethod::OneVsAll => {
            for &t in batch {
                for slot in [Slot::Subject, Slot::Object] {
                    let query = Query { anchor: slot.anchor(t), relation: t.predicate, slot };
                    rows.push(TrainingRow { query, candidates: None, positives: vec![slot.target(t)] });
                }
            }
        }
        TrainingMethod::KvsAll => {
            return Err(Error::InvalidArgument("KvsAll rows are built from queries, see kvsall_rows".into()));
        }
    }
    Ok(rows)
}

/// The `u`-th entity id (0-based) not present in the sorted `known`.
fn nth_outside(mut u: u32, known: &[u32]) -> u32 {
    for &k in known {
        if u >= k {
            u += 1;
        } else {
            break;
        }
    }
    u
}

/// Every distinct `(s, p, ?)` and `(?, p, o)` query in `train`, sorted.
pub fn kvsall_queries(train: &[Triple]) -> Vec<Query> {
    let mut keys: Vec<Query> = train
        .iter()
        .flat_map(|&t| {
            [
                Query { anchor: t.subject, relation: t.predicate, slot: Slot::Object },
                Query { anchor: t.object, relation: t.predicate, slot: Slot::Subject },
            ]
        })
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys
}

/// Multi-label rows over all entities, one per query.
pub fn kvsall_rows(queries: &[Query], train: &PositiveSet) -> Vec<TrainingRow> {
    queries
        .iter()
        .map(|&query| TrainingRow {
            query,
            candidates: None,
            positives: train.completions(query.anchor, query.relation, query.slot).to_vec(),
        })
        .collect()
}

/// Mean batch objective (loss plus L2 penalty) and, when `grads` is given,
/// its gradient accumulated there (the buffer is cleared first). Dropout
/// masks are drawn from `rng`; with dropout 0 no draws are made.
pub fn batch_loss<R: Rng + ?Sized>(
    model: &EmbeddingModel,
    rows: &[TrainingRow],
    config: &TrainingConfig,
    rng: &mut R,
    mut grads: Option<&mut Gradients>,
) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::Empty("training rows"));
    }
    let n = model.entity_count();
    let d = model.dim();
    let keep = 1.0 - config.dropout;
    let mut anchors = vec![0.0; rows.len() * d];
    let mut masks = if config.dropout > 0.0 { vec![0.0; rows.len() * d] } else { Vec::new() };
    let mut queries = vec![0.0; rows.len() * d];
    let lengths: Vec<usize> = rows.iter().map(|r| r.len(n)).collect();
    let total: usize = lengths.iter().sum();
    let mut scores = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);

    for (i, row) in rows.iter().enumerate() {
        let a = &mut anchors[i * d..(i + 1) * d];
        a.copy_from_slice(model.entities.row(row.query.anchor as usize));
        if config.dropout > 0.0 {
            let m = &mut masks[i * d..(i + 1) * d];
            for (x, mk) in a.iter_mut().zip(m.iter_mut()) {
                *mk = if rng.random::<f64>() < keep { 1.0 / keep } else { 0.0 };
                *x *= *mk;
            }
        }
        let q = &mut queries[i * d..(i + 1) * d];
        model.query(a, row.query.relation, row.query.slot, q);
        match &row.candidates {
            Some(c) => scores.extend(c.iter().map(|&e| model.candidate_score(q, model.entities.row(e as usize)))),
            None => scores.extend(model.entities.iter_rows().map(|e| model.candidate_score(q, e))),
        }
        labels.extend(row.labels(n));
    }

    if config.loss == LossKind::MarginRanking && !has_pairs(&lengths, &labels) {
        // every candidate row lacks a negative (saturated queries)
        if let Some(g) = grads {
            g.clear();
        }
        return Ok(0.0);
    }

    let mut dscore = vec![0.0; total];
    let mut value = loss_with_grad(config.loss, ScoreLayout::Rows(&lengths), &scores, &labels, config.fixed.margin, &mut dscore)?;

    let lambda = config.regularization;
    let scale = 2.0 * lambda / rows.len() as f64;
    if lambda > 0.0 {
        let mut penalty = 0.0;
        for row in rows {
            let a = model.entities.row(row.query.anchor as usize);
            let r = model.relations.row(row.query.relation as usize);
            penalty += a.iter().chain(r).map(|x| x * x).sum::<f64>();
        }
        value += lambda * penalty / rows.len() as f64;
    }

    let Some(g) = grads.as_deref_mut() else {
        return Ok(value);
    };
    g.clear();
    let rw = model.relations.cols();
    let mut dq = vec![0.0; d];
    let mut da = vec![0.0; d];
    let mut offset = 0;
    for (i, row) in rows.iter().enumerate() {
        let q = &queries[i * d..(i + 1) * d];
        let a = &anchors[i * d..(i + 1) * d];
        dq.iter_mut().for_each(|x| *x = 0.0);
        da.iter_mut().for_each(|x| *x = 0.0);
        let ds = &dscore[offset..offset + lengths[i]];
        offset += lengths[i];
        let mut backward = |e: usize, gs: f64| {
            if gs != 0.0 {
                model.candidate_backward(q, model.entities.row(e), gs, &mut dq, &mut g.entities[e * d..(e + 1) * d]);
            }
        };
        match &row.candidates {
            Some(c) => c.iter().zip(ds).for_each(|(&e, &gs)| backward(e as usize, gs)),
            None => ds.iter().enumerate().for_each(|(e, &gs)| backward(e, gs)),
        }
        let rel = row.query.relation as usize;
        model.query_backward(a, row.query.relation, row.query.slot, &dq, &mut da, &mut g.relations[rel * rw..(rel + 1) * rw]);
        let anchor = row.query.anchor as usize;
        let ga = &mut g.entities[anchor * d..(anchor + 1) * d];
        if config.dropout > 0.0 {
            let m = &masks[i * d..(i + 1) * d];
            ga.iter_mut().zip(&da).zip(m).for_each(|((x, y), mk)| *x += y * mk);
        } else {
            ga.iter_mut().zip(&da).for_each(|(x, y)| *x += y);
        }
        if lambda > 0.0 {
            let ae = model.entities.row(anchor);
            ga.iter_mut().zip(ae).for_each(|(x, y)| *x += scale * y);
            let rp = model.relations.row(rel);
            g.relations[rel * rw..(rel + 1) * rw].iter_mut().zip(rp).for_each(|(x, y)| *x += scale * y);
        }
    }
    Ok(value)
}

fn has_pairs(lengths: &[usize], labels: &[f64]) -> bool {
    let mut start = 0;
    for &len in lengths {
        let pos = labels[start..start + len].iter().filter(|&&l| l > 0.5).count();
        if pos > 0 && pos < len {
            return true;
        }
        start += len;
    }
    false
}

/// Trial status as stored in the sweep record.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(tag = "status", content = "reason", rename_all = "lowercase"))]
pub enum TrialStatus {
    Completed,
    Failed(String),
}

impl TrialStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, TrialStatus::Completed)
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Best checkpoint by validation MRR (the initial model if no
    /// validation round ran before a failure).
    pub model: EmbeddingModel,
    pub status: TrialStatus,
    pub best_valid: Option<Metrics>,
    pub test: Option<Metrics>,
    pub epochs_run: u32,
    pub epoch_losses: Vec<f64>,
    pub final_learning_rate: f64,
}

/// Lookup structures shared by every trial on one graph.
#[derive(Debug, Clone)]
pub struct TrainingData {
    pub train: PositiveSet,
    pub known: PositiveSet,
    pub queries: Vec<Query>,
}

impl TrainingData {
    pub fn new(kg: &KnowledgeGraph) -> Self {
        Self { train: PositiveSet::new(kg.train().iter().copied()), known: kg.all_positive_set(), queries: kvsall_queries(kg.train()) }
    }
}

/// Stateful single-trial training loop.
pub struct Trainer<'a> {
    kg: &'a KnowledgeGraph,
    data: &'a TrainingData,
    config: TrainingConfig,
    model: EmbeddingModel,
    optimizer: Optimizer,
    schedule: LrSchedule,
    state: TrainState,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    grads: Gradients,
}

impl<'a> Trainer<'a> {
    pub fn new(kg: &'a KnowledgeGraph, data: &'a TrainingData, config: TrainingConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rw = EmbeddingModel::relation_width(config.method, config.dim);
        let entities = init_weights_with(config.init, kg.entity_count(), config.dim, &mut rng)?;
        let relations = init_weights_with(config.init, kg.relation_count(), rw, &mut rng)?;
        let model = EmbeddingModel::new(config.method, entities, relations)?;
        let optimizer = Optimizer::new(config.optimizer, &[model.entities.as_slice().len(), model.relations.as_slice().len()]);
        let units = match config.training {
            TrainingMethod::KvsAll => data.queries.len(),
            _ => kg.train().len(),
        };
        Ok(Self {
            kg,
            data,
            schedule: LrSchedule::new(config.patience),
            state: TrainState::new(config.learning_rate),
            grads: Gradients::zeros_like(&model),
            optimizer,
            model,
            rng,
            order: (0..units).collect(),
            config,
        })
    }

    pub fn model(&self) -> &EmbeddingModel {
        &self.model
    }

    pub fn state(&self) -> &TrainState {
        &self.state
    }

    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    /// One pass over the shuffled training units; returns the mean batch
    /// objective weighted by batch size.
    pub fn epoch(&mut self) -> Result<f64> {
        self.order.shuffle(&mut self.rng);
        let n = self.kg.entity_count();
        let mut weighted = 0.0;
        for chunk in self.order.chunks(self.config.batch_size) {
            let rows = match self.config.training {
                TrainingMethod::KvsAll => {
                    let qs: Vec<Query> = chunk.iter().map(|&i| self.data.queries[i]).collect();
                    kvsall_rows(&qs, &self.data.train)
                }
                method => {
                    let batch: Vec<Triple> = chunk.iter().map(|&i| self.kg.train()[i]).collect();
                    build_rows(method, &batch, &self.data.train, n, self.config.fixed.negatives, &mut self.rng)?
                }
            };
            let value = batch_loss(&self.model, &rows, &self.config, &mut self.rng, Some(&mut self.grads))?;
            if !value.is_finite() {
                return Err(Error::NonFinite("loss"));
            }
            let lr = self.state.learning_rate;
            let (e, r) = self.model.parameters_mut();
            self.optimizer.step(lr, &mut [e, r], &[&self.grads.entities, &self.grads.relations]);
            if !self.model.is_finite() {
                return Err(Error::NonFinite("parameters"));
            }
            weighted += value * chunk.len() as f64;
        }
        self.state.epoch += 1;
        Ok(weighted / self.order.len().max(1) as f64)
    }

    pub fn evaluate(&self, triples: &[Triple]) -> Result<Metrics> {
        evaluate(&self.model, triples, &self.data.known, self.config.fixed.direction)
    }

    /// Validation round: updates the scheduler and reports whether the
    /// model is the best seen so far.
    pub fn validate(&mut self) -> Result<(Metrics, bool)> {
        let m = self.evaluate(self.kg.valid())?;
        let improved = self.schedule.step(&mut self.state, m.mrr);
        Ok((m, improved))
    }

    /// Runs the full budget, keeping the best checkpoint by validation MRR.
    pub fn run(mut self) -> TrainOutcome {
        let max_epochs = self.config.fixed.max_epochs;
        let every = self.config.fixed.eval_every;
        let mut best: Option<(Metrics, EmbeddingModel)> = None;
        let mut losses = Vec::new();
        let mut status = TrialStatus::Completed;

        let consider = |trainer: &mut Trainer<'_>, best: &mut Option<(Metrics, EmbeddingModel)>| -> Result<()> {
            let (m, _) = trainer.validate()?;
            if best.as_ref().is_none_or(|(b, _)| m.mrr > b.mrr) {
                *best = Some((m, trainer.model.clone()));
            }
            Ok(())
        };

        if self.kg.valid().is_empty() {
            status = TrialStatus::Failed("validation split is empty".into());
        } else if max_epochs == 0 {
            if let Err(e) = consider(&mut self, &mut best) {
                status = TrialStatus::Failed(alloc::format!("{e}"));
            }
        }
        while status.is_completed() && self.state.epoch < max_epochs {
            match self.epoch() {
                Ok(l) => losses.push(l),
                Err(e) => {
                    status = TrialStatus::Failed(alloc::format!("epoch {}: {e}", self.state.epoch + 1));
                    break;
                }
            }
            if self.state.epoch % every == 0 || self.state.epoch == max_epochs {
                if let Err(e) = consider(&mut self, &mut best) {
                    status = TrialStatus::Failed(alloc::format!("validation after epoch {}: {e}", self.state.epoch));
                }
            }
        }

        let epochs_run = self.state.epoch;
        let final_learning_rate = self.state.learning_rate;
        let (best_valid, model) = match best {
            Some((m, model)) => (Some(m), model),
            None => (None, self.model.clone()),
        };
        let mut test = None;
        if status.is_completed() {
            let data = self.data;
            match evaluate(&model, self.kg.test(), &data.known, self.config.fixed.direction) {
                Ok(m) => test = Some(m),
                Err(e) => status = TrialStatus::Failed(alloc::format!("test evaluation: {e}")),
            }
        }
        TrainOutcome { model, status, best_valid, test, epochs_run, epoch_losses: losses, final_learning_rate }
    }
}

/// One epoch of `trainer`; see [`Trainer::epoch`].
pub fn train_epoch(trainer: &mut Trainer<'_>) -> Result<f64> {
    trainer.epoch()
}

/// Trains one model from scratch. Configuration errors are returned;
/// failures during training are reported through the outcome's status.
pub fn train(kg: &KnowledgeGraph, config: &TrainingConfig, seed: u64) -> Result<TrainOutcome> {
    let data = TrainingData::new(kg);
    train_with(kg, &data, config, seed)
}

/// [`train`] with precomputed lookup structures.
pub fn train_with(kg: &KnowledgeGraph, data: &TrainingData, config: &TrainingConfig, seed: u64) -> Result<TrainOutcome> {
    Ok(Trainer::new(kg, data, config.clone(), seed)?.run())
}
