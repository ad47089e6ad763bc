//! Ingestion adapter for the paper's Zenodo archive — a stub.
//!
//! The paper does not document the archive's internal file format, so this
//! adapter only fixes the interface. Acceptance criteria 12–13 (the paper's
//! explained-variance and consensus numbers) stay conditional until it is
//! written.

use std::path::Path;

use crate::error::{Error, Result};
use crate::ink::DrawingSession;

/// Loads one dataset (`dataset1` or `dataset2`) from an unpacked archive.
pub fn load_zenodo(dir: &Path, dataset: &str) -> Result<Vec<DrawingSession>> {
    Err(Error::InvalidArgument(format!(
        "Zenodo ingestion is not implemented (archive format undocumented); cannot load {dataset} from {}",
        dir.display()
    )))
}

#[cfg(test)]
mod tests {
    #[test]
    fn stub_reports_not_implemented() {
        let err = super::load_zenodo(std::path::Path::new("/nonexistent"), "dataset1").unwrap_err();
        assert!(err.to_string().contains("not implemented"));
    }
}
