/// Multiplicative learning-rate decay applied when patience runs out.
pub const LR_DECAY: f64 = 0.95;
/// Minimum validation-MRR gain that counts as an improvement.
pub const IMPROVEMENT_TOLERANCE: f64 = 1e-4;

/// Scheduler bookkeeping carried across validation rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainState {
    pub learning_rate: f64,
    pub evals_since_improvement: u32,
    pub best_valid_mrr: f64,
    pub epoch: u32,
}

impl TrainState {
    pub fn new(learning_rate: f64) -> Self {
        Self { learning_rate, evals_since_improvement: 0, best_valid_mrr: f64::NEG_INFINITY, epoch: 0 }
    }
}

/// Plateau scheduler settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LrSchedule {
    pub patience: u32,
    pub decay: f64,
    pub tolerance: f64,
}

impl LrSchedule {
    pub fn new(patience: u32) -> Self {
        Self { patience, decay: LR_DECAY, tolerance: IMPROVEMENT_TOLERANCE }
    }

    /// Returns whether `mrr` improved on the best value so far.
    pub fn step(&self, state: &mut TrainState, mrr: f64) -> bool {
        if mrr > state.best_valid_mrr + self.tolerance {
            state.best_valid_mrr = mrr;
            state.evals_since_improvement = 0;
            return true;
        }
        state.evals_since_improvement += 1;
        if state.evals_since_improvement > self.patience {
            state.learning_rate *= self.decay;
            state.evals_since_improvement = 0;
        }
        false
    }
}

/// One validation round with the default decay and tolerance.
pub fn lr_step(state: TrainState, current_valid_mrr: f64, patience: u32) -> TrainState {
    let mut next = state;
    LrSchedule::new(patience).step(&mut next, current_valid_mrr);
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded(best: f64) -> TrainState {
        TrainState { best_valid_mrr: best, ..TrainState::new(0.01) }
    }

    #[test]
    fn decays_after_patience_is_exceeded() {
        let mut s = seeded(0.5);
        s = lr_step(s, 0.4, 2);
        s = lr_step(s, 0.4, 2);
        assert_eq!(s.learning_rate, 0.01);
        s = lr_step(s, 0.4, 2);
        assert!((s.learning_rate - 0.0095).abs() < 1e-15);
        assert_eq!(s.evals_since_improvement, 0);
    }

    #[test]
    fn improvement_resets_counter() {
        let mut s = seeded(0.5);
        s = lr_step(s, 0.4, 3);
        s = lr_step(s, 0.6, 3);
        assert_eq!(s.evals_since_improvement, 0);
        assert_eq!(s.learning_rate, 0.01);
        assert_eq!(s.best_valid_mrr, 0.6);
    }

    #[test]
    fn gains_within_tolerance_do_not_count() {
        let s = lr_step(seeded(0.5), 0.50005, 3);
        assert_eq!(s.evals_since_improvement, 1);
        assert_eq!(s.best_valid_mrr, 0.5);
    }

    #[test]
    fn zero_patience_decays_every_time() {
        let mut s = seeded(0.5);
        for k in 1..=3 {
            s = lr_step(s, 0.1, 0);
            assert!((s.learning_rate - 0.01 * 0.95f64.powi(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn first_evaluation_always_improves() {
        let s = lr_step(TrainState::new(0.1), 0.0, 0);
        assert_eq!(s.best_valid_mrr, 0.0);
        assert_eq!(s.learning_rate, 0.1);
    }
}
