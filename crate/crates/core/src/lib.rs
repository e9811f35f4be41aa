//! Compressed self-index for highly repetitive texts.
//!
//! The index combines a greedy LZ77 parse of the text with a signature
//! grammar (a locally consistent run-length grammar). Patterns are located
//! through three length-banded structures: contexts around phrase borders
//! for short patterns, a border-anchored map for semi-short ones, and an
//! index over the grammar's node boundaries for everything longer.
//! Occurrences that cross no border are recovered by copying through phrase
//! sources.
//!
//! ```
//! use sigx::{CompressedIndex, PlannerConfig};
//!
//! let index = CompressedIndex::build(b"abracadabra", &PlannerConfig::default()).unwrap();
//! assert_eq!(index.locate(b"abra"), vec![1, 8]);
//! ```

mod codec;
pub mod corpus;
pub mod error;
pub mod fingerprint;
pub mod grammar;
pub mod long;
pub mod lz77;
pub mod oracle;
pub mod planner;
pub mod range_report;
pub mod secondary;
pub mod semishort;
pub mod short;
mod suffix;
pub mod weak_prefix;

pub use error::{Error, Result};
pub use fingerprint::{Fingerprint, FingerprintFn, PrefixFingerprints};
pub use grammar::{Label, PatternParse, SignatureDag};
pub use lz77::{Lz77Parse, Phrase};
pub use planner::{CompressedIndex, IndexStats, Mode, PlannerConfig, QueryTrace, Route};
