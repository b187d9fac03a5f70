use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

// needed for float methods without std
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "lowercase")
)]
pub enum DimensionKind {
    Continuous { lower: f64, upper: f64, scale: Scale },
    Integer { lower: i64, upper: i64, scale: Scale },
    Categorical { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dimension {
    pub name: String,
    /// Reporting category; columns sharing a group are summed when indices
    /// are grouped.
    pub group: String,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: DimensionKind,
}

impl Dimension {
    pub fn continuous(name: &str, group: &str, lower: f64, upper: f64, scale: Scale) -> Self {
        Self { name: name.to_string(), group: group.to_string(), kind: DimensionKind::Continuous { lower, upper, scale } }
    }

    pub fn integer(name: &str, group: &str, lower: i64, upper: i64, scale: Scale) -> Self {
        Self { name: name.to_string(), group: group.to_string(), kind: DimensionKind::Integer { lower, upper, scale } }
    }

    pub fn categorical(name: &str, group: &str, levels: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            group: group.to_string(),
            kind: DimensionKind::Categorical { levels: levels.iter().map(|l| l.to_string()).collect() },
        }
    }

    /// Encoded columns this dimension occupies.
    pub fn width(&self) -> usize {
        match &self.kind {
            DimensionKind::Categorical { levels } => levels.len(),
            _ => 1,
        }
    }

    pub fn levels(&self) -> Option<&[String]> {
        match &self.kind {
            DimensionKind::Categorical { levels } => Some(levels),
            _ => None,
        }
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.kind, DimensionKind::Categorical { .. })
    }

    fn validate(&self) -> Result<()> {
        let bad = |detail: String| Err(Error::InvalidArgument(format!("dimension `{}`: {detail}", self.name)));
        match &self.kind {
            DimensionKind::Continuous { lower, upper, scale } => {
                if !(lower.is_finite() && upper.is_finite() && lower < upper) {
                    return bad(format!("bounds [{lower}, {upper}] are not increasing"));
                }
                if *scale == Scale::Log && *lower <= 0.0 {
                    return bad("log-scale bounds must be strictly positive".into());
                }
            }
            DimensionKind::Integer { lower, upper, scale } => {
                if lower >= upper {
                    return bad(format!("bounds [{lower}, {upper}] are not increasing"));
                }
                if *scale == Scale::Log && *lower <= 0 {
                    return bad("log-scale bounds must be strictly positive".into());
                }
            }
            DimensionKind::Categorical { levels } => {
                if levels.len() < 2 {
                    return bad("needs at least two levels".into());
                }
            }
        }
        Ok(())
    }
}

/// One decoded value.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(untagged))]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Level(String),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Real(x) => Some(*x),
            ParamValue::Int(i) => Some(*i as f64),
            ParamValue::Level(_) => None,
        }
    }

    pub fn as_level(&self) -> Option<&str> {
        match self {
            ParamValue::Level(l) => Some(l),
            _ => None,
        }
    }
}

/// A configuration: one value per dimension of its space, in order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialConfig {
    pub values: Vec<ParamValue>,
}

impl TrialConfig {
    pub fn get<'a>(&'a self, space: &HyperparameterSpace, name: &str) -> Option<&'a ParamValue> {
        space.position(name).and_then(|i| self.values.get(i))
    }
}

/// Result of decoding a unit-cube point.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedPoint {
    pub config: TrialConfig,
    /// Regression vector: unit-cube coordinates (quantized for integer
    /// dimensions) and 0/1 dummies.
    pub encoded: Vec<f64>,
}

/// Ordered mixed categorical/continuous search space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HyperparameterSpace {
    pub dimensions: Vec<Dimension>,
}

/// Assignment of encoded columns to named reporting groups.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryMap {
    pub groups: Vec<String>,
    /// Group index per column; `None` marks an unassigned column.
    pub column_group: Vec<Option<usize>>,
}

impl CategoryMap {
    pub fn new(groups: Vec<String>, column_group: Vec<Option<usize>>) -> Self {
        Self { groups, column_group }
    }
}

impl HyperparameterSpace {
    pub fn new(dimensions: Vec<Dimension>) -> Result<Self> {
        let space = Self { dimensions };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimensions.is_empty() {
            return Err(Error::Empty("hyperparameter space"));
        }
        for (i, d) in self.dimensions.iter().enumerate() {
            d.validate()?;
            if self.dimensions[..i].iter().any(|e| e.name == d.name) {
                return Err(Error::InvalidArgument(format!("duplicate dimension `{}`", d.name)));
            }
        }
        Ok(())
    }

    pub fn encoded_width(&self) -> usize {
        self.dimensions.iter().map(Dimension::width).sum()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.dimensions.iter().position(|d| d.name == name)
    }

    pub fn dimension(&self, name: &str) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    /// First encoded column of each dimension.
    pub fn column_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.dimensions
            .iter()
            .map(|d| {
                let o = acc;
                acc += d.width();
                o
            })
            .collect()
    }

    /// `name` for scalar columns, `name=level` for dummies.
    pub fn column_names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.encoded_width());
        for d in &self.dimensions {
            match &d.kind {
                DimensionKind::Categorical { levels } => out.extend(levels.iter().map(|l| format!("{}={}", d.name, l))),
                _ => out.push(d.name.clone()),
            }
        }
        out
    }

    /// `(first column, width)` of each categorical dimension.
    pub fn categorical_groups(&self) -> Vec<(usize, usize)> {
        self.dimensions
            .iter()
            .zip(self.column_offsets())
            .filter(|(d, _)| d.is_categorical())
            .map(|(d, o)| (o, d.width()))
            .collect()
    }

    /// True for columns belonging to a non-categorical dimension.
    pub fn scalar_columns(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.encoded_width());
        for d in &self.dimensions {
            out.extend(core::iter::repeat_n(!d.is_categorical(), d.width()));
        }
        out
    }

    pub fn category_map(&self) -> CategoryMap {
        let mut groups: Vec<String> = Vec::new();
        let mut column_group = Vec::with_capacity(self.encoded_width());
        for d in &self.dimensions {
            let g = match groups.iter().position(|g| *g == d.group) {
                Some(g) => g,
                None => {
                    groups.push(d.group.clone());
                    groups.len() - 1
                }
            };
            column_group.extend(core::iter::repeat_n(Some(g), d.width()));
        }
        CategoryMap { groups, column_group }
    }

    /// Maps a unit-cube point to a configuration and its regression vector.
    pub fn decode(&self, point: &[f64]) -> Result<DecodedPoint> {
        let width = self.encoded_width();
        if point.len() != width {
            return Err(Error::LengthMismatch(point.len(), width));
        }
        if let Some((column, &value)) = point.iter().enumerate().find(|(_, &x)| !(0.0..=1.0).contains(&x)) {
            return Err(Error::CoordinateOutOfRange { column, value });
        }
        let mut values = Vec::with_capacity(self.dimensions.len());
        let mut encoded = vec![0.0; width];
        let mut col = 0;
        for d in &self.dimensions {
            match &d.kind {
                DimensionKind::Continuous { lower, upper, scale } => {
                    values.push(ParamValue::Real(interpolate(point[col], *lower, *upper, *scale)));
                    encoded[col] = point[col];
                }
                DimensionKind::Integer { lower, upper, scale } => {
                    let x = interpolate(point[col], *lower as f64, *upper as f64, *scale);
                    let v = ((x + 0.5).floor() as i64).clamp(*lower, *upper);
                    values.push(ParamValue::Int(v));
                    encoded[col] = inverse_interpolate(v as f64, *lower as f64, *upper as f64, *scale);
                }
                DimensionKind::Categorical { levels } => {
                    let k = levels.len();
                    let hot = argmax_lowest(&point[col..col + k]);
                    encoded[col + hot] = 1.0;
                    values.push(ParamValue::Level(levels[hot].clone()));
                }
            }
            col += d.width();
        }
        Ok(DecodedPoint { config: TrialConfig { values }, encoded })
    }

    /// Applies the one-hot rule to every categorical group of `point` in
    /// place; scalar columns are left untouched.
    pub fn round_dummies(&self, point: &mut [f64]) {
        for (start, width) in self.categorical_groups() {
            let group = &mut point[start..start + width];
            let hot = argmax_lowest(group);
            for (i, x) in group.iter_mut().enumerate() {
                *x = if i == hot { 1.0 } else { 0.0 };
            }
        }
    }

    /// Regression vector of a configuration.
    pub fn encode(&self, config: &TrialConfig) -> Result<Vec<f64>> {
        if config.values.len() != self.dimensions.len() {
            return Err(Error::LengthMismatch(config.values.len(), self.dimensions.len()));
        }
        let mut out = Vec::with_capacity(self.encoded_width());
        for (d, v) in self.dimensions.iter().zip(&config.values) {
            let oob = |detail: String| Error::ValueOutOfBounds { name: d.name.clone(), detail };
            match (&d.kind, v) {
                (DimensionKind::Continuous { lower, upper, scale }, v) => {
                    let x = v.as_f64().ok_or_else(|| oob("expected a number".into()))?;
                    if !(x >= *lower && x <= *upper) {
                        return Err(oob(format!("{x} not in [{lower}, {upper}]")));
                    }
                    out.push(inverse_interpolate(x, *lower, *upper, *scale));
                }
                (DimensionKind::Integer { lower, upper, scale }, ParamValue::Int(x)) => {
                    if x < lower || x > upper {
                        return Err(oob(format!("{x} not in [{lower}, {upper}]")));
                    }
                    out.push(inverse_interpolate(*x as f64, *lower as f64, *upper as f64, *scale));
                }
                (DimensionKind::Categorical { levels }, ParamValue::Level(l)) => {
                    let hot = levels.iter().position(|x| x == l).ok_or_else(|| oob(format!("unknown level `{l}`")))?;
                    out.extend((0..levels.len()).map(|i| if i == hot { 1.0 } else { 0.0 }));
                }
                (_, other) => return Err(oob(format!("value {other:?} has the wrong kind"))),
            }
        }
        Ok(out)
    }

    /// Fills a full-width point from coordinates of the free (unpinned)
    /// columns, setting each pinned categorical dimension one-hot at its level.
    pub fn expand_pinned(&self, free: &[f64], pins: &[(usize, usize)]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.encoded_width());
        let mut it = free.iter();
        for (di, d) in self.dimensions.iter().enumerate() {
            if let Some(&(_, level)) = pins.iter().find(|(p, _)| *p == di) {
                if level >= d.width() || !d.is_categorical() {
                    return Err(Error::InvalidArgument(format!("bad pin for `{}`", d.name)));
                }
                out.extend((0..d.width()).map(|i| if i == level { 1.0 } else { 0.0 }));
            } else {
                for _ in 0..d.width() {
                    out.push(*it.next().ok_or(Error::LengthMismatch(free.len(), self.free_width(pins)))?);
                }
            }
        }
        if it.next().is_some() {
            return Err(Error::LengthMismatch(free.len(), self.free_width(pins)));
        }
        Ok(out)
    }

    /// Encoded width with the pinned dimensions removed.
    pub fn free_width(&self, pins: &[(usize, usize)]) -> usize {
        self.dimensions
            .iter()
            .enumerate()
            .filter(|(i, _)| !pins.iter().any(|(p, _)| p == i))
            .map(|(_, d)| d.width())
            .sum()
    }

    /// `(dimension index, level index)` for a named categorical level.
    pub fn pin(&self, dimension: &str, level: &str) -> Result<(usize, usize)> {
        let di = self.position(dimension).ok_or_else(|| Error::InvalidArgument(format!("no dimension `{dimension}`")))?;
        let li = self.dimensions[di]
            .levels()
            .and_then(|ls| ls.iter().position(|l| l == level))
            .ok_or_else(|| Error::InvalidArgument(format!("`{dimension}` has no level `{level}`")))?;
        Ok((di, li))
    }
}

fn interpolate(p: f64, lower: f64, upper: f64, scale: Scale) -> f64 {
    let x = match scale {
        Scale::Linear => lower + p * (upper - lower),
        Scale::Log => (lower.ln() + p * (upper.ln() - lower.ln())).exp(),
    };
    x.clamp(lower, upper)
}

fn inverse_interpolate(x: f64, lower: f64, upper: f64, scale: Scale) -> f64 {
    let p = match scale {
        Scale::Linear => (x - lower) / (upper - lower),
        Scale::Log => (x.ln() - lower.ln()) / (upper.ln() - lower.ln()),
    };
    p.clamp(0.0, 1.0)
}

fn argmax_lowest(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Names used by the default space.
pub mod names {
    pub const TRAINING_METHOD: &str = "training_method";
    pub const LOSS: &str = "loss";
    pub const WEIGHT_INIT: &str = "weight_init";
    pub const OPTIMIZER: &str = "optimizer";
    pub const EMBEDDING_SIZE: &str = "embedding_size";
    pub const BATCH_SIZE: &str = "batch_size";
    pub const LEARNING_RATE: &str = "learning_rate";
    pub const LR_PATIENCE: &str = "lr_patience";
    pub const INIT_NORMAL_STD: &str = "init_normal_std";
    pub const INIT_UNIFORM_LOWER: &str = "init_uniform_lower";
    pub const REGULARIZATION_WEIGHT: &str = "regularization_weight";
    pub const DROPOUT: &str = "dropout";
}

/// The 20-column search space: four categorical hyperparameters (12 dummy
/// columns) and eight scalar ones.
pub fn study_space() -> HyperparameterSpace {
    use names::*;
    const INIT: &str = "weight initialisation";
    HyperparameterSpace::new(vec![
        Dimension::categorical(TRAINING_METHOD, "training method", &["negative_sampling", "1vsAll", "KvsAll"]),
        Dimension::categorical(LOSS, "loss function", &["bce", "kl", "margin_ranking"]),
        Dimension::categorical(WEIGHT_INIT, INIT, &["normal", "uniform", "xavier_normal", "xavier_uniform"]),
        Dimension::categorical(OPTIMIZER, "gradient descent algorithm", &["adam", "adagrad"]),
        Dimension::integer(EMBEDDING_SIZE, "embedding size", 16, 256, Scale::Log),
        Dimension::integer(BATCH_SIZE, "batch size", 32, 1024, Scale::Log),
        Dimension::continuous(LEARNING_RATE, "learning rate", 1e-4, 1e-1, Scale::Log),
        Dimension::integer(LR_PATIENCE, "lr scheduler patience", 0, 10, Scale::Linear),
        Dimension::continuous(INIT_NORMAL_STD, INIT, 1e-5, 1.0, Scale::Log),
        Dimension::continuous(INIT_UNIFORM_LOWER, INIT, -1.0, -1e-5, Scale::Linear),
        Dimension::continuous(REGULARIZATION_WEIGHT, "regularization weight", 1e-12, 1e-2, Scale::Log),
        Dimension::continuous(DROPOUT, "dropout", 0.0, 0.5, Scale::Linear),
    ])
    .expect("default space is valid")
}
