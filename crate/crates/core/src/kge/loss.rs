use core::fmt;
use core::str::FromStr;

// needed for float methods without std
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LossKind {
    /// Binary cross-entropy on every (score, label), averaged over elements.
    Bce,
    /// Cross-entropy between the softmax of a candidate row and its
    /// normalised label row, averaged over rows.
    Kl,
    /// `max(0, margin - pos + neg)` averaged over every (positive, negative)
    /// pair within a row.
    MarginRanking,
}

impl LossKind {
    pub const ALL: [LossKind; 3] = [LossKind::Bce, LossKind::Kl, LossKind::MarginRanking];

    pub const fn name(self) -> &'static str {
        match self {
            LossKind::Bce => "bce",
            LossKind::Kl => "kl",
            LossKind::MarginRanking => "margin_ranking",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "bce" => Ok(LossKind::Bce),
            "kl" => Ok(LossKind::Kl),
            "margin_ranking" => Ok(LossKind::MarginRanking),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown loss `{s}`"))),
        }
    }
}

/// How a flat score vector is structured.
#[derive(Debug, Clone, Copy)]
pub enum ScoreLayout<'a> {
    /// Independent (score, label) pairs.
    Pointwise,
    /// Consecutive candidate rows with the given lengths.
    Rows(&'a [usize]),
}

pub fn loss(kind: LossKind, layout: ScoreLayout<'_>, scores: &[f64], labels: &[f64], margin: f64) -> Result<f64> {
    loss_impl(kind, layout, scores, labels, margin, None)
}

/// Loss value and `dL/dscore` written into `grad` (overwritten).
pub fn loss_with_grad(
    kind: LossKind,
    layout: ScoreLayout<'_>,
    scores: &[f64],
    labels: &[f64],
    margin: f64,
    grad: &mut [f64],
) -> Result<f64> {
    loss_impl(kind, layout, scores, labels, margin, Some(grad))
}

fn loss_impl(
    kind: LossKind,
    layout: ScoreLayout<'_>,
    scores: &[f64],
    labels: &[f64],
    margin: f64,
    mut grad: Option<&mut [f64]>,
) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch(scores.len(), labels.len()));
    }
    if let Some(g) = grad.as_deref_mut() {
        if g.len() != scores.len() {
            return Err(Error::LengthMismatch(g.len(), scores.len()));
        }
        g.iter_mut().for_each(|x| *x = 0.0);
    }
    if scores.is_empty() {
        return Err(Error::Empty("scores"));
    }
    if let ScoreLayout::Rows(lengths) = layout {
        let total: usize = lengths.iter().sum();
        if total != scores.len() {
            return Err(Error::LengthMismatch(total, scores.len()));
        }
    }
    match kind {
        LossKind::Bce => {
            let n = scores.len() as f64;
            let mut total = 0.0;
            for (i, (&x, &y)) in scores.iter().zip(labels).enumerate() {
                // -[y log s(x) + (1-y) log(1-s(x))] = softplus(x) - y x
                total += softplus(x) - y * x;
                if let Some(g) = grad.as_deref_mut() {
                    g[i] = (sigmoid(x) - y) / n;
                }
            }
            Ok(total / n)
        }
        LossKind::Kl => {
            let ScoreLayout::Rows(lengths) = layout else {
                return Err(Error::LossLayout { loss: "kl", needed: "row-structured scores" });
            };
            let rows = lengths.len() as f64;
            let mut total = 0.0;
            let mut start = 0;
            for &len in lengths {
                let s = &scores[start..start + len];
                let y = &labels[start..start + len];
                let mass: f64 = y.iter().sum();
                if len == 0 || mass <= 0.0 {
                    return Err(Error::LossLayout { loss: "kl", needed: "at least one positive label per row" });
                }
                let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let log_z = max + s.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
                total += y.iter().zip(s).map(|(&t, &v)| -(t / mass) * (v - log_z)).sum::<f64>();
                if let Some(g) = grad.as_deref_mut() {
                    for k in 0..len {
                        g[start + k] = ((s[k] - log_z).exp() - y[k] / mass) / rows;
                    }
                }
                start += len;
            }
            Ok(total / rows)
        }
        LossKind::MarginRanking => {
            let ScoreLayout::Rows(lengths) = layout else {
                return Err(Error::LossLayout { loss: "margin_ranking", needed: "paired positive/negative rows" });
            };
            let mut pairs = 0usize;
            let mut start = 0;
            for &len in lengths {
                let y = &labels[start..start + len];
                let pos = y.iter().filter(|&&v| v > 0.5).count();
                pairs += pos * (len - pos);
                start += len;
            }
            if pairs == 0 {
                return Err(Error::LossLayout { loss: "margin_ranking", needed: "paired positive/negative rows" });
            }
            let n = pairs as f64;
            let mut total = 0.0;
            let mut start = 0;
            for &len in lengths {
                for p in start..start + len {
                    if labels[p] <= 0.5 {
                        continue;
                    }
                    for q in start..start + len {
                        if labels[q] > 0.5 {
                            continue;
                        }
                        let h = margin - scores[p] + scores[q];
                        if h > 0.0 {
                            total += h;
                            if let Some(g) = grad.as_deref_mut() {
                                g[p] -= 1.0 / n;
                                g[q] += 1.0 / n;
                            }
                        }
                    }
                }
                start += len;
            }
            Ok(total / n)
        }
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::LN_2;

    #[test]
    fn bce_at_zero() {
        let l = loss(LossKind::Bce, ScoreLayout::Pointwise, &[0.0], &[1.0], 1.0).unwrap();
        assert!((l - LN_2).abs() < 1e-15);
    }

    #[test]
    fn bce_is_stable_for_large_scores() {
        let l = loss(LossKind::Bce, ScoreLayout::Pointwise, &[800.0, -800.0], &[1.0, 0.0], 1.0).unwrap();
        assert!(l.abs() < 1e-300);
        let l = loss(LossKind::Bce, ScoreLayout::Pointwise, &[-800.0], &[1.0], 1.0).unwrap();
        assert!((l - 800.0).abs() < 1e-9);
    }

    #[test]
    fn margin_satisfied() {
        let l = loss(LossKind::MarginRanking, ScoreLayout::Rows(&[2]), &[2.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
        assert_eq!(l, 0.0);
        let l = loss(LossKind::MarginRanking, ScoreLayout::Rows(&[3]), &[0.5, 0.0, 1.0], &[1.0, 0.0, 0.0], 1.0).unwrap();
        assert!((l - (0.5 + 1.5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn kl_uniform_row() {
        let l = loss(LossKind::Kl, ScoreLayout::Rows(&[2]), &[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap();
        assert!((l - LN_2).abs() < 1e-15);
    }

    #[test]
    fn structure_errors() {
        assert!(matches!(
            loss(LossKind::MarginRanking, ScoreLayout::Pointwise, &[1.0, 0.0], &[1.0, 0.0], 1.0),
            Err(Error::LossLayout { .. })
        ));
        assert!(matches!(loss(LossKind::Kl, ScoreLayout::Pointwise, &[1.0], &[1.0], 1.0), Err(Error::LossLayout { .. })));
        assert!(matches!(
            loss(LossKind::MarginRanking, ScoreLayout::Rows(&[2]), &[1.0, 0.0], &[1.0, 1.0], 1.0),
            Err(Error::LossLayout { .. })
        ));
        assert!(loss(LossKind::Bce, ScoreLayout::Rows(&[3]), &[1.0, 0.0], &[1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let scores = [0.3, -1.2, 2.0, 0.7, -0.4, 0.1];
        let labels = [1.0, 0.0, 0.0, 1.0, 1.0, 0.0];
        let rows = [3usize, 3];
        for kind in LossKind::ALL {
            let layout = ScoreLayout::Rows(&rows);
            let mut g = [0.0; 6];
            loss_with_grad(kind, layout, &scores, &labels, 1.0, &mut g).unwrap();
            for i in 0..6 {
                let h = 1e-6;
                let mut up = scores;
                up[i] += h;
                let mut dn = scores;
                dn[i] -= h;
                let fd = (loss(kind, layout, &up, &labels, 1.0).unwrap() - loss(kind, layout, &dn, &labels, 1.0).unwrap()) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-8, "{kind:?} component {i}: {fd} vs {}", g[i]);
            }
        }
    }
}
