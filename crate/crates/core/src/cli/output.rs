//! CSV and JSON writers. Every CSV starts with a schema comment line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::ieq::IeqState;
use crate::spectral::SpectralGrid;

pub const INVARIANTS_SCHEMA: &str = "# schema: ieq-nls/invariants/1";
pub const INVARIANTS_HEADER: &str =
    "step,t,mass,energy_modified,energy_original,mass_drift,energy_drift,stage_iters_max,residual_max";
pub const PROFILE_SCHEMA: &str = "# schema: ieq-nls/profile/1";
pub const PROFILE_HEADER_1D: &str = "index,x,re_u,im_u,abs_u,r";
pub const PROFILE_HEADER_2D: &str = "ix,iy,x,y,re_u,im_u,abs_u,r";
pub const ERROR_SCHEMA: &str = "# schema: ieq-nls/error/1";
pub const ERROR_HEADER: &str = "t_end,l2_error,linf_error";
pub const CONVERGENCE_SCHEMA: &str = "# schema: ieq-nls/convergence/1";
pub const CONVERGENCE_HEADER: &str = "tableau,dt,l2_error,pairwise_order,fitted_order";

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub struct CsvWriter {
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, schema: &str, header: &str) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{schema}")?;
        writeln!(out, "{header}")?;
        Ok(Self { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn comment(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "# {}", text.replace('\n', " "))?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// One row per node; 2D fields in row-major order (x index major).
pub fn write_profile<G: SpectralGrid>(path: &Path, grid: &G, state: &IeqState) -> Result<()> {
    let shape = grid.shape().to_vec();
    let header = if shape.len() == 2 { PROFILE_HEADER_2D } else { PROFILE_HEADER_1D };
    let mut csv = CsvWriter::create(path, PROFILE_SCHEMA, header)?;
    for (idx, (u, r)) in state.u.iter().zip(&state.r).enumerate() {
        let values = [fmt_f64(u.re), fmt_f64(u.im), fmt_f64(u.norm()), fmt_f64(*r)];
        let mut fields = if shape.len() == 2 {
            let (ix, iy) = (idx / shape[1], idx % shape[1]);
            vec![
                ix.to_string(),
                iy.to_string(),
                fmt_f64(grid.coordinate(0, ix)),
                fmt_f64(grid.coordinate(1, iy)),
            ]
        } else {
            vec![idx.to_string(), fmt_f64(grid.coordinate(0, idx))]
        };
        fields.extend(values);
        csv.row(&fields)?;
    }
    csv.flush()
}

/// Maximum of `|u|` and the coordinates of the node where it occurs.
pub fn peak<G: SpectralGrid>(grid: &G, state: &IeqState) -> (f64, Vec<f64>) {
    let (idx, amp) = state
        .u
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, a)| if a > best.1 { (j, a) } else { best });
    let shape = grid.shape();
    let position = if shape.len() == 2 {
        vec![grid.coordinate(0, idx / shape[1]), grid.coordinate(1, idx % shape[1])]
    } else {
        vec![grid.coordinate(0, idx)]
    };
    (amp, position)
}

/// Machine-readable digest of a `run` or `longtime` invocation.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub status: String,
    pub failure: Option<String>,
    pub scenario: String,
    pub tableau: String,
    pub dims: usize,
    pub n: usize,
    pub domain: (f64, f64),
    pub beta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub steps_completed: usize,
    pub t_reached: f64,
    pub mass_initial: f64,
    pub energy_initial: f64,
    pub max_abs_mass_drift: f64,
    pub max_abs_energy_drift: f64,
    pub max_stage_iterations: usize,
    pub max_residual: f64,
    pub peak_amplitude_initial: f64,
    pub peak_amplitude: f64,
    pub peak_position: Vec<f64>,
    pub l2_error: Option<f64>,
    pub linf_error: Option<f64>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
