use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Errors on a sequence of meshes with observed orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    /// `orders[j] = log(e_j / e_{j+1}) / log(h_j / h_{j+1})`.
    pub orders: Vec<f64>,
    /// Least-squares slope of `log e` against `log h`.
    pub slope: f64,
}

impl ConvergenceTable {
    /// Order between the two finest meshes.
    pub fn finest_order(&self) -> f64 {
        *self.orders.last().expect("at least two levels")
    }
}

pub fn convergence_order(h: &[f64], errors: &[f64]) -> Result<ConvergenceTable> {
    if h.len() != errors.len() || h.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least two matching mesh sizes and errors, got {} and {}",
            h.len(),
            errors.len()
        )));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidInput(format!("errors must be positive and finite, got {e}")));
    }
    if let Some(x) = h.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidInput(format!("mesh sizes must be positive, got {x}")));
    }
    if h.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("mesh sizes must be distinct".into()));
    }
    let orders = (0..h.len() - 1)
        .map(|j| (errors[j] / errors[j + 1]).ln() / (h[j] / h[j + 1]).ln())
        .collect();
    let lx: Vec<f64> = h.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|x| x.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ConvergenceTable {
        h: h.to_vec(),
        errors: errors.to_vec(),
        orders,
        slope: sxy / sxx,
    })
}
