//! Filtered link-prediction ranking.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{PositiveSet, Slot, Triple};
use crate::kge::EmbeddingModel;

/// Anything that can score every entity as a completion of a query.
pub trait LinkScorer {
    fn entity_count(&self) -> usize;
    fn relation_count(&self) -> usize;
    /// Writes the score of each entity placed in `slot` into `out`.
    fn score_candidates(&self, anchor: u32, relation: u32, slot: Slot, out: &mut [f64]);
}

impl LinkScorer for EmbeddingModel {
    fn entity_count(&self) -> usize {
        EmbeddingModel::entity_count(self)
    }

    fn relation_count(&self) -> usize {
        EmbeddingModel::relation_count(self)
    }

    fn score_candidates(&self, anchor: u32, relation: u32, slot: Slot, out: &mut [f64]) {
        self.score_all(anchor, relation, slot, out);
    }
}

/// Which slots are ranked for each triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Direction {
    #[default]
    Both,
    Subject,
    Object,
}

impl Direction {
    pub fn slots(self) -> &'static [Slot] {
        match self {
            Direction::Both => &[Slot::Subject, Slot::Object],
            Direction::Subject => &[Slot::Subject],
            Direction::Object => &[Slot::Object],
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Direction::Both => "both",
            Direction::Subject => "subject",
            Direction::Object => "object",
        }
    }
}

impl core::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "both" => Ok(Direction::Both),
            "subject" => Ok(Direction::Subject),
            "object" => Ok(Direction::Object),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown direction `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankResult {
    pub triple: Triple,
    pub slot: Slot,
    pub filtered_rank: f64,
    pub raw_rank: f64,
}

/// Mean-rank position of `target` among `scores`, returned as
/// `(filtered, raw)`. Candidates listed in the sorted `known` slice, other
/// than the target, are dropped for the filtered rank.
pub fn rank_from_scores(scores: &[f64], target: u32, known: &[u32]) -> (f64, f64) {
    let ts = scores[target as usize];
    let (mut gt, mut eq) = (0usize, 0usize);
    let (mut gt_known, mut eq_known) = (0usize, 0usize);
    let mut k = 0;
    for (c, &s) in scores.iter().enumerate() {
        let c = c as u32;
        while k < known.len() && known[k] < c {
            k += 1;
        }
        if c == target {
            continue;
        }
        let filtered = k < known.len() && known[k] == c;
        if s > ts {
            gt += 1;
            gt_known += filtered as usize;
        } else if s == ts {
            eq += 1;
            eq_known += filtered as usize;
        }
    }
    let raw = 1.0 + gt as f64 + eq as f64 / 2.0;
    let filt = 1.0 + (gt - gt_known) as f64 + (eq - eq_known) as f64 / 2.0;
    (filt, raw)
}

fn check_ids<S: LinkScorer + ?Sized>(scorer: &S, t: Triple) -> Result<()> {
    let n = scorer.entity_count();
    if t.subject as usize >= n || t.object as usize >= n || t.predicate as usize >= scorer.relation_count() {
        return Err(Error::IdOutOfRange(alloc::format!("{t:?} with {n} entities")));
    }
    Ok(())
}

fn rank_with_buffer<S: LinkScorer + ?Sized>(
    scorer: &S,
    t: Triple,
    slot: Slot,
    known: &PositiveSet,
    buf: &mut [f64],
) -> Result<RankResult> {
    check_ids(scorer, t)?;
    let anchor = slot.anchor(t);
    scorer.score_candidates(anchor, t.predicate, slot, buf);
    let target = slot.target(t);
    if !buf[target as usize].is_finite() {
        return Err(Error::NonFinite("target score"));
    }
    let (filtered_rank, raw_rank) = rank_from_scores(buf, target, known.completions(anchor, t.predicate, slot));
    Ok(RankResult { triple: t, slot, filtered_rank, raw_rank })
}

/// Ranks the true entity of `t` in `slot` against every entity, filtering
/// candidates that form a triple in `known` (normally train, valid and test).
pub fn filtered_rank<S: LinkScorer + ?Sized>(scorer: &S, t: Triple, slot: Slot, known: &PositiveSet) -> Result<RankResult> {
    let mut buf = vec![0.0; scorer.entity_count()];
    rank_with_buffer(scorer, t, slot, known, &mut buf)
}

/// Every rank contributed by `triples` under `direction`.
pub fn rank_all<S: LinkScorer + ?Sized>(
    scorer: &S,
    triples: &[Triple],
    known: &PositiveSet,
    direction: Direction,
) -> Result<Vec<RankResult>> {
    let mut buf = vec![0.0; scorer.entity_count()];
    let mut out = Vec::with_capacity(triples.len() * direction.slots().len());
    for &t in triples {
        for &slot in direction.slots() {
            out.push(rank_with_buffer(scorer, t, slot, known, &mut buf)?);
        }
    }
    Ok(out)
}

/// Aggregate ranking quality.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metrics {
    pub mrr: f64,
    pub hits_at_1: f64,
    pub hits_at_3: f64,
    pub hits_at_10: f64,
    pub count: usize,
}

impl Metrics {
    /// Metrics over a list of filtered ranks.
    pub fn from_ranks(ranks: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut m = Metrics::default();
        for r in ranks {
            m.count += 1;
            m.mrr += 1.0 / r;
            m.hits_at_1 += (r <= 1.0) as u8 as f64;
            m.hits_at_3 += (r <= 3.0) as u8 as f64;
            m.hits_at_10 += (r <= 10.0) as u8 as f64;
        }
        if m.count == 0 {
            return Err(Error::Empty("evaluation triples"));
        }
        let n = m.count as f64;
        m.mrr /= n;
        m.hits_at_1 /= n;
        m.hits_at_3 /= n;
        m.hits_at_10 /= n;
        Ok(m)
    }
}

/// Filtered MRR and Hits@{1,3,10} of `scorer` on `triples`.
pub fn evaluate<S: LinkScorer + ?Sized>(
    scorer: &S,
    triples: &[Triple],
    known: &PositiveSet,
    direction: Direction,
) -> Result<Metrics> {
    if triples.is_empty() {
        return Err(Error::Empty("evaluation triples"));
    }
    let ranks = rank_all(scorer, triples, known, direction)?;
    Metrics::from_ranks(ranks.iter().map(|r| r.filtered_rank))
}

/// Expected reciprocal rank of a uniformly random ordering of `n`
/// candidates, `H_n / n`.
pub fn random_baseline_mrr(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("random baseline needs at least one entity".into()));
    }
    // summed smallest-first for accuracy
    let h: f64 = (1..=n).rev().map(|k| 1.0 / k as f64).sum();
    Ok(h / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PositiveSet;

    /// Fixed score table indexed by (anchor, relation, slot).
    struct Table {
        n: usize,
        scores: Vec<f64>,
    }

    impl LinkScorer for Table {
        fn entity_count(&self) -> usize {
            self.n
        }
        fn relation_count(&self) -> usize {
            1
        }
        fn score_candidates(&self, _: u32, _: u32, _: Slot, out: &mut [f64]) {
            out.copy_from_slice(&self.scores);
        }
    }

    #[test]
    fn filtering_removes_known_competitors() {
        // target 0 scores 0.9, entity 1 (a known train triple) 0.95, entity 2 0.1
        let scorer = Table { n: 3, scores: vec![0.9, 0.95, 0.1] };
        let known = PositiveSet::new([Triple::new(2, 0, 0), Triple::new(2, 0, 1)]);
        let r = filtered_rank(&scorer, Triple::new(2, 0, 0), Slot::Object, &known).unwrap();
        assert_eq!(r.filtered_rank, 1.0);
        assert_eq!(r.raw_rank, 2.0);
    }

    #[test]
    fn constant_scores_give_the_middle_rank() {
        let scorer = Table { n: 7, scores: vec![0.5; 7] };
        let known = PositiveSet::new([Triple::new(0, 0, 3), Triple::new(0, 0, 5)]);
        let r = filtered_rank(&scorer, Triple::new(0, 0, 3), Slot::Object, &known).unwrap();
        // 6 surviving candidates including the target
        assert_eq!(r.filtered_rank, 1.0 + 5.0 / 2.0);
        assert_eq!(r.raw_rank, 1.0 + 6.0 / 2.0);
    }

    #[test]
    fn metrics_arithmetic() {
        let m = Metrics::from_ranks([1.0, 2.0, 4.0]).unwrap();
        assert!((m.mrr - 1.75 / 3.0).abs() < 1e-15);
        assert!((m.hits_at_1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.hits_at_3 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.hits_at_10, 1.0);
        assert!(Metrics::from_ranks([]).is_err());
    }

    #[test]
    fn random_baseline_values() {
        assert_eq!(random_baseline_mrr(1).unwrap(), 1.0);
        assert_eq!(random_baseline_mrr(2).unwrap(), 0.75);
        // exact rational value of H_135 / 135
        assert!((random_baseline_mrr(135).unwrap() - 0.040_638_441_293_296_634).abs() < 1e-15);
        assert!(random_baseline_mrr(0).is_err());
    }

    #[test]
    fn out_of_range_ids() {
        let scorer = Table { n: 3, scores: vec![0.0; 3] };
        let known = PositiveSet::new([]);
        assert!(matches!(filtered_rank(&scorer, Triple::new(0, 0, 3), Slot::Object, &known), Err(Error::IdOutOfRange(_))));
        assert!(matches!(filtered_rank(&scorer, Triple::new(0, 1, 1), Slot::Object, &known), Err(Error::IdOutOfRange(_))));
        assert!(evaluate(&scorer, &[], &known, Direction::Both).is_err());
    }
}
