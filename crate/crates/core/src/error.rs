use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not unitary (max deviation {0:e})")]
    NonUnitary(f64),
    #[error("unknown modulation format `{0}`")]
    UnknownFormat(String),
    #[error("invalid channel parameters: {0}")]
    InvalidParams(&'static str),
    #[error("invalid step-size parameters: {0}")]
    InvalidSteps(&'static str),
    #[error("stream lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("symbol index {index} out of range for a {size}-point constellation")]
    IndexOutOfRange { index: usize, size: usize },
}
