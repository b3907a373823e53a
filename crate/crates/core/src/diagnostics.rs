//! Error norms, invariant drift records and temporal convergence orders.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::ieq::{energy_modified, energy_original, mass, IeqState, NlsParams};
use crate::spectral::SpectralGrid;

/// Discrete invariants at one time level, with drifts against the run's first record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantRecord {
    pub t: f64,
    pub mass: f64,
    pub energy_modified: f64,
    pub energy_original: f64,
    pub mass_drift: f64,
    pub energy_drift: f64,
}

impl InvariantRecord {
    /// Reference record of a run; both drifts are zero.
    pub fn initial<G: SpectralGrid>(state: &IeqState, params: &NlsParams<G>) -> Result<Self> {
        Ok(Self {
            t: state.t,
            mass: mass(state, params)?,
            energy_modified: energy_modified(state, params)?,
            energy_original: energy_original(state, params)?,
            mass_drift: 0.0,
            energy_drift: 0.0,
        })
    }
}

pub fn record_invariants<G: SpectralGrid>(
    state: &IeqState,
    params: &NlsParams<G>,
    reference: &InvariantRecord,
) -> Result<InvariantRecord> {
    let mut rec = InvariantRecord::initial(state, params)?;
    rec.mass_drift = rec.mass - reference.mass;
    rec.energy_drift = rec.energy_modified - reference.energy_modified;
    Ok(rec)
}

/// `sqrt(vol · Σ |u_j - v_j|²)`
pub fn l2_error<G: SpectralGrid + ?Sized>(numeric: &[Complex64], exact: &[Complex64], grid: &G) -> Result<f64> {
    check_len(grid.len(), numeric.len())?;
    check_len(grid.len(), exact.len())?;
    let sum: f64 = numeric.iter().zip(exact).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((grid.cell_volume() * sum).sqrt())
}

/// `max_j |u_j - v_j|`
pub fn linf_error(numeric: &[Complex64], exact: &[Complex64]) -> Result<f64> {
    check_len(numeric.len(), exact.len())?;
    Ok(numeric.iter().zip(exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub l2_error: f64,
}

/// Errors of one method at successively smaller step sizes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Rows must have strictly decreasing, positive step sizes.
    pub fn new(rows: Vec<ConvergenceRow>) -> Result<Self> {
        for w in rows.windows(2) {
            if w[1].dt.partial_cmp(&w[0].dt) != Some(std::cmp::Ordering::Less) {
                return Err(Error::Data(format!(
                    "step sizes must be strictly decreasing ({} then {})",
                    w[0].dt, w[1].dt
                )));
            }
        }
        if rows.iter().any(|r| !(r.dt.is_finite() && r.dt > 0.0)) {
            return Err(Error::Data("step sizes must be positive".into()));
        }
        Ok(Self { rows })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(dt, l2_error)| ConvergenceRow { dt, l2_error }).collect())
    }

    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Drops rows whose error sits below `floor` (solver-tolerance noise).
    pub fn above_floor(&self, floor: f64) -> Self {
        Self {
            rows: self.rows.iter().copied().filter(|r| r.l2_error >= floor).collect(),
        }
    }

    /// Observed order between each adjacent pair of rows.
    pub fn pairwise_orders(&self) -> Result<Vec<f64>> {
        self.check_errors()?;
        Ok(self
            .rows
            .windows(2)
            .map(|w| (w[0].l2_error / w[1].l2_error).ln() / (w[0].dt / w[1].dt).ln())
            .collect())
    }

    fn check_errors(&self) -> Result<()> {
        if self.rows.iter().any(|r| !(r.l2_error.is_finite() && r.l2_error > 0.0)) {
            return Err(Error::Data("errors must be positive and finite".into()));
        }
        Ok(())
    }
}

/// Least-squares slope of `ln(error)` against `ln(dt)`; needs at least three rows.
pub fn fit_order(table: &ConvergenceTable) -> Result<f64> {
    if table.len() < 3 {
        return Err(Error::Data(format!("order fit needs at least 3 rows, got {}", table.len())));
    }
    table.check_errors()?;
    let pts: Vec<(f64, f64)> = table.rows().iter().map(|r| (r.dt.ln(), r.l2_error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
