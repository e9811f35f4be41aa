use thiserror::Error;

/// Errors produced while building, querying or (de)serializing an index.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input text is empty")]
    EmptyText,
    #[error("range [{start}, {end}] is out of bounds for length {len}")]
    OutOfRange { start: usize, end: usize, len: usize },
    #[error("malformed LZ77 parse: {0}")]
    MalformedParse(String),
    #[error("sequence is not run-free: label repeats at index {0}")]
    NotRunFree(usize),
    #[error("pattern length {len} is outside the supported range [{min}, {max}]")]
    PatternLength { len: usize, min: usize, max: usize },
    #[error("malformed index file: {0}")]
    Format(String),
    #[error("unsupported index format version {0}")]
    Version(u32),
    #[error("index checksum mismatch (stored {stored:#018x}, computed {computed:#018x})")]
    Checksum { stored: u64, computed: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(start: usize, end: usize, len: usize) -> Result<()> {
    if start == 0 || start > end || end > len {
        Err(Error::OutOfRange { start, end, len })
    } else {
        Ok(())
    }
}
