use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: expected 3 tab-separated fields, found {found}")]
    MalformedLine { line: usize, found: usize },
    #[error("duplicate triple in {split} split at line {line}")]
    DuplicateTriple { split: &'static str, line: usize },
    #[error("training split is empty")]
    EmptyTrainSplit,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("id out of range: {0}")]
    IdOutOfRange(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension {requested} exceeds the {available}-dimensional direction table")]
    DimensionTooLarge { requested: usize, available: usize },
    #[error("coordinate {value} at column {column} lies outside [0, 1]")]
    CoordinateOutOfRange { column: usize, value: f64 },
    #[error("value for `{name}` is out of bounds: {detail}")]
    ValueOutOfBounds { name: String, detail: String },
    #[error("loss `{loss}` requires {needed}")]
    LossLayout { loss: &'static str, needed: &'static str },
    #[error("non-finite {0} encountered")]
    NonFinite(&'static str),
    #[error("degenerate model: output variance is zero")]
    DegenerateModel,
    #[error("zero variance input to correlation")]
    ZeroVariance,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("column {0} is not assigned to any group")]
    UnassignedColumn(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
}
