//! Quasi-random sampling: the Sobol sequence, the Saltelli cross-sample
//! design, and the hyperparameter-space codec.

mod directions;
mod saltelli;
mod sobol;
mod space;

pub use saltelli::{saltelli_design, SaltelliBlock, SaltelliDesign};
pub use sobol::{sobol_points, SobolSequence, MAX_DIMENSION};
pub use space::{
    names,
    study_space, CategoryMap, DecodedPoint, Dimension, DimensionKind, HyperparameterSpace, ParamValue, Scale,
    TrialConfig,
};
