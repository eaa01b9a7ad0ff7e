//! Coordinate-format sparse matrices with deterministic compression.

use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Triplets {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, val));
    }

    /// Sorts by (row, col) and sums duplicates in their insertion order.
    pub fn compress(&self) -> Triplets {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by_key(|&i| (self.entries[i].0, self.entries[i].1));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(order.len());
        for i in order {
            let (r, c, v) = self.entries[i];
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => out.push((r, c, v)),
            }
        }
        Triplets {
            nrows: self.nrows,
            ncols: self.ncols,
            entries: out,
        }
    }

    pub fn transpose(&self) -> Triplets {
        Triplets {
            nrows: self.ncols,
            ncols: self.nrows,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        }
    }

    /// `self - other` (compressed).
    pub fn sub(&self, other: &Triplets) -> Triplets {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = self.clone();
        t.entries
            .extend(other.entries.iter().map(|&(r, c, v)| (r, c, -v)));
        t.compress()
    }

    pub fn frobenius(&self) -> f64 {
        self.compress()
            .entries
            .iter()
            .map(|e| e.2 * e.2)
            .sum::<f64>()
            .sqrt()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for &(r, c, v) in &self.entries {
            d[r][c] += v;
        }
        d
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.0 == row && e.1 == col)
            .map(|e| e.2)
            .sum()
    }

    /// Writes `row col value` lines (compressed, 17 significant digits).
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (r, c, v) in self.compress().entries {
            writeln!(w, "{r} {c} {v:.16e}")?;
        }
        Ok(())
    }
}
