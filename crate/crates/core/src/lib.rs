//! Persistence barcodes and spectral-sequence pages of finite filtered chain
//! complexes over `GF(p)` and `Q`, with exact arithmetic throughout.
//!
//! ```
//! use spectra_persist::{decompose, model_complex, pages_direct, pages_from_barcode, FieldSpec};
//!
//! let c = model_complex(FieldSpec::Prime(2), 0, 2, Some(3));
//! let (_, bars) = decompose(&c).unwrap();
//! assert_eq!(pages_from_barcode(&bars, 4).unwrap(), pages_direct(&c, 4).unwrap());
//! ```

pub mod coeff;
pub mod complex;
pub mod error;
pub mod format;
pub mod ingest;
pub mod linalg;
pub mod parallel;
pub mod persistence;
pub mod random;
pub mod spectral;

pub use coeff::{Field, FieldSpec, PrimeField, RationalField, Scalar};
pub use complex::{model_complex, ComplexBuilder, FilteredChainComplex, GenRef, Generator, Violation, ViolationKind};
pub use error::{Error, Result};
pub use format::{parse_barcode, parse_pages, write_barcode, write_pages, OutputFormat};
pub use ingest::{
    parse_any, parse_complex, parse_distance_matrix, parse_point_cloud, parse_simplicial, rips, rips_with,
    serialize_complex, serialize_simplicial, simplicial_to_chain, FilteredSimplicialComplex, PointCloud, Simplex,
};
pub use parallel::Execution;
pub use persistence::{betti, decompose, decompose_with, multiplicity, BarEntry, Barcode, Lifetime, Pair, Pairing};
pub use random::random_complex;
pub use spectral::{
    collapse_page, default_r_max, pages_direct, pages_direct_with, pages_from_barcode, recover_barcode, verify,
    verify_with, Collapse, Page, PageTable, VerifyReport,
};
