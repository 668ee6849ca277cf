//! Verification reports and their JSON / CSV serialization.
//!
//! A [`BoundReport`] records the outcome of fitting the smallest constant
//! `C` that makes one inequality hold on a sampled grid, at two grid
//! resolutions. The check passes when the constant is finite and stable
//! under refinement: the paper-style bounds assert existence of *some*
//! constant, so boundedness and stability are what can be tested, not
//! sharpness.

use crate::error::Result;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Default ceiling for the fine/coarse fitted-constant ratio.
pub const STABILITY_THRESHOLD: f64 = 1.5;

/// One grid point of a bound check: the named parameters, both sides of the
/// inequality, and their ratio.
#[derive(Clone, Debug, Serialize)]
pub struct GridPointRatio {
    pub params: Vec<(String, f64)>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; the fitted constant is the sup of these.
    pub ratio: f64,
}

impl GridPointRatio {
    pub fn new(params: Vec<(String, f64)>, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs.abs() <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        GridPointRatio { params, lhs, rhs, ratio }
    }
}

/// Outcome of one inequality verification.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    /// Catalog identifier of the check (see the checks chapter of the guide).
    pub check_id: String,
    pub build: String,
    pub family_hash: Option<String>,
    /// Human-readable description of the sampled grid.
    pub grid_spec: String,
    /// Smallest constant making the inequality hold on the fine grid.
    pub fitted_constant: f64,
    /// Same on the coarse grid.
    pub fitted_constant_coarse: f64,
    /// fine / coarse.
    pub refinement_ratio: f64,
    pub stability_threshold: f64,
    pub passed: bool,
    pub notes: Vec<String>,
    /// Per-point ratios on the fine grid, for CSV export; omitted from JSON.
    #[serde(skip)]
    pub points: Vec<GridPointRatio>,
}

impl BoundReport {
    pub fn from_scan(
        check_id: impl Into<String>,
        grid_spec: impl Into<String>,
        coarse_sup: f64,
        fine_sup: f64,
        points: Vec<GridPointRatio>,
    ) -> Self {
        let refinement_ratio = if coarse_sup > 0.0 {
            fine_sup / coarse_sup
        } else if fine_sup == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        let passed = fine_sup.is_finite()
            && refinement_ratio.is_finite()
            && refinement_ratio <= STABILITY_THRESHOLD
            && refinement_ratio >= 1.0 / STABILITY_THRESHOLD;
        BoundReport {
            check_id: check_id.into(),
            build: env!("CARGO_PKG_VERSION").to_string(),
            family_hash: None,
            grid_spec: grid_spec.into(),
            fitted_constant: fine_sup,
            fitted_constant_coarse: coarse_sup,
            refinement_ratio,
            stability_threshold: STABILITY_THRESHOLD,
            passed,
            notes: Vec::new(),
        points,
        }
    }

    pub fn with_family(mut self, hash: impl Into<String>) -> Self {
        self.family_hash = Some(hash.into());
        self
    }

    pub fn note(mut self, msg: impl Into<String>) -> Self {
        self.notes.push(msg.into());
        self
    }

    pub fn worst_point(&self) -> Option<&GridPointRatio> {
        self.points
            .iter()
            .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)
            .map_err(|e| crate::error::Error::Io(e.into()))?;
        Ok(())
    }

    /// Per-grid-point ratios as CSV (one column per named parameter).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        if let Some(first) = self.points.first() {
            let header: Vec<&str> = first.params.iter().map(|(k, _)| k.as_str()).collect();
            writeln!(w, "{},lhs,rhs,ratio", header.join(","))?;
            for p in &self.points {
                let vals: Vec<String> = p.params.iter().map(|(_, v)| format!("{v:.17e}")).collect();
                writeln!(w, "{},{:.17e},{:.17e},{:.17e}", vals.join(","), p.lhs, p.rhs, p.ratio)?;
            }
        } else {
            writeln!(w, "lhs,rhs,ratio")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_fail_semantics() {
        let ok = BoundReport::from_scan("X", "g", 2.0, 2.2, vec![]);
        assert!(ok.passed);
        assert!((ok.refinement_ratio - 1.1).abs() < 1e-12);

        let drifting = BoundReport::from_scan("X", "g", 2.0, 3.5, vec![]);
        assert!(!drifting.passed);

        let infinite = BoundReport::from_scan("X", "g", 2.0, f64::INFINITY, vec![]);
        assert!(!infinite.passed);

        let both_zero = BoundReport::from_scan("X", "g", 0.0, 0.0, vec![]);
        assert!(both_zero.passed);
    }

    #[test]
    fn zero_rhs_handling() {
        let p = GridPointRatio::new(vec![("t".into(), 1.0)], 0.0, 0.0);
        assert_eq!(p.ratio, 0.0);
        let q = GridPointRatio::new(vec![], 1.0, 0.0);
        assert!(q.ratio.is_infinite());
    }
}
