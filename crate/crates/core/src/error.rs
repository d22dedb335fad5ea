use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite value in {0}")]
    Numeric(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("label {label} outside 0..{classes}")]
    Label { label: usize, classes: usize },
    #[error("roc curve needs both positive and negative labels")]
    DegenerateLabels,
    #[error("column `{0}` is constant on the fitting rows")]
    ConstantColumn(String),
    #[error("not enough data: {0}")]
    Insufficient(String),
    #[error("index {index} out of range for {len} parameters")]
    Index { index: usize, len: usize },
}

impl Error {
    pub(crate) fn shape(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::Shape {
            context,
            expected,
            actual,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
