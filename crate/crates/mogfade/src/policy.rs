use serde::{Deserialize, Serialize};

/// Termination control for infinite series.
///
/// A series is accepted once the next term falls below
/// `max(abs_tol, rel_tol * |partial sum|)`; hitting `max_terms` first is a
/// non-convergence error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPolicy {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_terms: 500,
        }
    }
}

impl SeriesPolicy {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(crate::Error::Validation(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(crate::Error::Validation(format!(
                "abs_tol must be >= 0, got {}",
                self.abs_tol
            )));
        }
        if self.max_terms == 0 {
            return Err(crate::Error::Validation(
                "max_terms must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Same tolerances with a larger term cap, for slowly decaying tails.
    pub fn with_max_terms(self, max_terms: usize) -> Self {
        SeriesPolicy { max_terms, ..self }
    }

    /// True once `term` is negligible against the running sum.
    #[inline]
    pub fn converged(&self, term: f64, sum: f64) -> bool {
        term.abs() <= self.abs_tol.max(self.rel_tol * sum.abs())
    }
}
