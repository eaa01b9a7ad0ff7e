use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance of the optimal region: within 5 % of the best.
pub const DEFAULT_THRESHOLD: f64 = 1.05;

/// Error table of one parameter point: `errors[level][checkpoint]`, or
/// `None` when the point's runs failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointErrors {
    pub nu: f64,
    pub nu_star: f64,
    pub delta: f64,
    pub errors: Option<Vec<Vec<f64>>>,
}

/// Membership of every point in the optimal region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub points: Vec<PointErrors>,
    /// Smallest error per level and checkpoint over all successful points.
    pub best: Vec<Vec<f64>>,
    pub member: Vec<bool>,
    pub threshold: f64,
}

impl RegionMap {
    /// A point is a member if its error is at most `threshold` times the
    /// best error at every level and every checkpoint. Failed points are
    /// never members and do not contribute to the best errors.
    pub fn new(points: Vec<PointErrors>, threshold: f64) -> Result<Self> {
        if !(threshold >= 1.0 && threshold.is_finite()) {
            return Err(Error::InvalidInput(format!("threshold must be at least 1, got {threshold}")));
        }
        let mut shape: Option<(usize, Vec<usize>)> = None;
        for p in &points {
            if let Some(e) = &p.errors {
                let s = (e.len(), e.iter().map(Vec::len).collect::<Vec<_>>());
                match &shape {
                    None => shape = Some(s),
                    Some(t) if *t != s => {
                        return Err(Error::InvalidInput("error tables have different shapes".into()))
                    }
                    _ => {}
                }
                if e.iter().flatten().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::InvalidInput("errors must be finite and non-negative".into()));
                }
            }
        }
        let best: Vec<Vec<f64>> = match &shape {
            None => Vec::new(),
            Some((_, widths)) => widths
                .iter()
                .enumerate()
                .map(|(l, w)| {
                    (0..*w)
                        .map(|c| {
                            points
                                .iter()
                                .filter_map(|p| p.errors.as_ref())
                                .map(|e| e[l][c])
                                .fold(f64::INFINITY, f64::min)
                        })
                        .collect()
                })
                .collect(),
        };
        let member = points
            .iter()
            .map(|p| match &p.errors {
                None => false,
                Some(e) => e
                    .iter()
                    .zip(&best)
                    .all(|(row, b)| row.iter().zip(b).all(|(v, m)| *v <= threshold * m)),
            })
            .collect();
        Ok(Self {
            points,
            best,
            member,
            threshold,
        })
    }

    pub fn members(&self) -> impl Iterator<Item = &PointErrors> {
        self.points.iter().zip(&self.member).filter(|(_, m)| **m).map(|(p, _)| p)
    }
}
