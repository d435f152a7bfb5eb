//! κ tabulated over a grid of trap widths.

use rayon::prelude::*;
use serde::Serialize;

use super::{kappa, QuadratureSpec, TrapGeometry};
use crate::error::{invalid, Result};
use crate::format::sig9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaMap {
    /// Row coordinates, ascending.
    pub eta_perp: Vec<f64>,
    /// Column coordinates, ascending.
    pub eta_par: Vec<f64>,
    /// `kappa[i][j]` at `(eta_perp[i], eta_par[j])`; NaN where the quadrature
    /// did not converge.
    pub kappa: Vec<Vec<f64>>,
    pub converged: Vec<Vec<bool>>,
}

impl KappaMap {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.kappa.get(i)?.get(j).copied()
    }

    pub fn failures(&self) -> usize {
        self.converged.iter().flatten().filter(|c| !**c).count()
    }

    /// Header row of `η_∥`, one row per `η_⊥`; NaN written as `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eta_perp\\eta_par");
        for v in &self.eta_par {
            out.push(',');
            out.push_str(&sig9(*v));
        }
        out.push('\n');
        for (ep, row) in self.eta_perp.iter().zip(&self.kappa) {
            out.push_str(&sig9(*ep));
            for k in row {
                out.push(',');
                out.push_str(&sig9(*k));
            }
            out.push('\n');
        }
        out
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid(format!("{name} grid is empty")));
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(invalid(format!("{name} grid must be strictly ascending")));
        }
    }
    for &v in grid {
        if !(v > 0.0 && v <= 1.0) {
            return Err(invalid(format!("{name} grid value {v} outside (0, 1]")));
        }
    }
    Ok(())
}

/// Evaluates every cell, in parallel on the current rayon pool. Cells that
/// fail to converge are recorded as NaN; only invalid grids are an error.
pub fn kappa_map(eta_perp: &[f64], eta_par: &[f64], quad: &QuadratureSpec) -> Result<KappaMap> {
    check_grid("eta_perp", eta_perp)?;
    check_grid("eta_par", eta_par)?;
    quad.validate()?;
    let cols = eta_par.len();
    let cells: Vec<Option<f64>> = (0..eta_perp.len() * cols)
        .into_par_iter()
        .map(|idx| {
            let geom = TrapGeometry::new(eta_perp[idx / cols], eta_par[idx % cols]).ok()?;
            kappa(geom, quad).ok()
        })
        .collect();

    let kappa = cells
        .chunks(cols)
        .map(|row| row.iter().map(|c| c.unwrap_or(f64::NAN)).collect())
        .collect();
    let converged = cells
        .chunks(cols)
        .map(|row| row.iter().map(Option::is_some).collect())
        .collect();
    Ok(KappaMap {
        eta_perp: eta_perp.to_vec(),
        eta_par: eta_par.to_vec(),
        kappa,
        converged,
    })
}
