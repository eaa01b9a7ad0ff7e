//! Sparse direct solution of the bordered saddle-point system.
//!
//! Only the sparse core (everything but the multiplier rows and columns) is
//! factored. The core is made regular by one diagonal anchor on a pressure
//! unknown, and the anchor and the border are removed again by a small dense
//! correction, so the dense gauge row never enters the sparse factors.
//!
//! Factorizations are reused across solves with the same sparsity pattern:
//! a stale factorization acts as a preconditioner for iterative refinement,
//! and the matrix is refactored only when refinement stalls.

use std::time::Instant;

use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::linalg::LuError;
use faer::sparse::{Pair, SparseColMat, SymbolicSparseColMat, Triplet};
use faer::prelude::Solve;
use faer::{Col, Par};

use crate::error::{Error, Result};
use crate::fem::sparse::Triplets;

pub const DEFAULT_TOL: f64 = 1e-10;
const SOLVER_ID: &str = "sparse-lu-partial-pivoting";

/// Square system `[[A, B, 0], [C, 0, m], [0, m^T, 0]] x = rhs` stored as one
/// sparse matrix; the last `n_gauge` unknowns are multipliers.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub n_velocity: usize,
    pub n_pressure: usize,
    pub n_gauge: usize,
    pub matrix: SparseColMat<usize, f64>,
    pub rhs: Vec<f64>,
}

impl SaddleSystem {
    pub fn from_triplets(
        n_velocity: usize,
        n_pressure: usize,
        n_gauge: usize,
        t: &Triplets,
        rhs: Vec<f64>,
    ) -> Result<Self> {
        let n = n_velocity + n_pressure + n_gauge;
        if t.nrows != n || t.ncols != n || rhs.len() != n {
            return Err(Error::InvalidInput(format!(
                "system is not square: {}x{} matrix, rhs {}, expected {n}",
                t.nrows,
                t.ncols,
                rhs.len()
            )));
        }
        let trip: Vec<Triplet<usize, usize, f64>> = t
            .entries
            .iter()
            .map(|&(r, c, v)| Triplet::new(r, c, v))
            .collect();
        let matrix = SparseColMat::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::InvalidInput(format!("sparse matrix construction: {e:?}")))?;
        Ok(Self {
            n_velocity,
            n_pressure,
            n_gauge,
            matrix,
            rhs,
        })
    }

    pub fn dim(&self) -> usize {
        self.n_velocity + self.n_pressure + self.n_gauge
    }

    /// `M x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        matvec(&self.matrix, x)
    }

    /// `||rhs - M x|| / ||rhs||`, or `||M x||` when the right-hand side vanishes.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let mx = self.apply(x);
        let r: f64 = self
            .rhs
            .iter()
            .zip(&mx)
            .map(|(b, m)| (b - m) * (b - m))
            .sum::<f64>()
            .sqrt();
        let nb = norm(&self.rhs);
        if nb == 0.0 {
            r
        } else {
            r / nb
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn matvec(m: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; m.nrows()];
    let r = m.as_ref();
    let vals = r.val();
    for (j, xj) in x.iter().enumerate() {
        if *xj == 0.0 {
            continue;
        }
        let range = r.col_range(j);
        for (i, v) in r.row_idx()[range.clone()].iter().zip(&vals[range]) {
            y[*i] += v * xj;
        }
    }
    y
}

/// Outcome of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Independently recomputed relative residual.
    pub residual: f64,
    /// Refinement sweeps performed after the direct solve.
    pub iterations: usize,
    pub wall_ms: f64,
    pub solver: String,
    /// Whether a new numeric factorization was computed.
    pub refactored: bool,
}

struct Factorization {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    symbolic: SymbolicLu<usize>,
    lu: Option<BorderedLu>,
}

/// Factors of the anchored core `K + alpha e e^T` plus the data needed to
/// solve `[[K, c], [d^T, g]]`.
struct BorderedLu {
    lu: Lu<usize, f64>,
    core: usize,
    border: Option<Border>,
}

struct Border {
    anchor: usize,
    alpha: f64,
    d: Vec<f64>,
    g: f64,
    /// `K'^{-1} e` and `K'^{-1} c`.
    y_e: Vec<f64>,
    y_c: Vec<f64>,
}

impl BorderedLu {
    fn core_solve(&self, r: &[f64]) -> Vec<f64> {
        let b = Col::<f64>::from_fn(self.core, |i| r[i]);
        let x = self.lu.solve(&b);
        (0..self.core).map(|i| x[i]).collect()
    }

    fn solve(&self, r: &[f64]) -> Vec<f64> {
        let n = self.core;
        let y_r = self.core_solve(&r[..n]);
        let Some(b) = &self.border else { return y_r };
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let s = r[n];
        // Unknowns mu = e^T x and the multiplier lambda:
        //   mu (1 - alpha e.y_e) + lambda e.y_c = e.y_r
        //   mu alpha d.y_e + lambda (g - d.y_c) = s - d.y_r
        let (a11, a12, r1) = if b.alpha == 0.0 {
            (1.0, 0.0, 0.0)
        } else {
            (1.0 - b.alpha * b.y_e[b.anchor], b.y_c[b.anchor], y_r[b.anchor])
        };
        let a21 = b.alpha * dot(&b.d, &b.y_e);
        let a22 = b.g - dot(&b.d, &b.y_c);
        let r2 = s - dot(&b.d, &y_r);
        let det = a11 * a22 - a12 * a21;
        let mu = (r1 * a22 - a12 * r2) / det;
        let lambda = (a11 * r2 - a21 * r1) / det;
        let mut x: Vec<f64> = (0..n)
            .map(|i| y_r[i] + b.alpha * mu * b.y_e[i] - lambda * b.y_c[i])
            .collect();
        x.push(lambda);
        x
    }
}

/// Core block of `sys` with `alpha` added at `(anchor, anchor)`.
fn core_matrix(sys: &SaddleSystem, anchor: Option<(usize, f64)>) -> Result<SparseColMat<usize, f64>> {
    let n = sys.dim() - sys.n_gauge;
    let m = sys.matrix.as_ref();
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::new();
    let mut vals = Vec::new();
    col_ptr.push(0);
    for j in 0..n {
        let range = m.col_range(j);
        let mut placed = false;
        for (i, v) in m.row_idx()[range.clone()].iter().zip(&m.val()[range]) {
            if *i >= n {
                continue;
            }
            match anchor {
                Some((a, alpha)) if a == j && !placed && *i >= a => {
                    placed = true;
                    if *i == a {
                        row_idx.push(a);
                        vals.push(v + alpha);
                        continue;
                    }
                    row_idx.push(a);
                    vals.push(alpha);
                }
                _ => {}
            }
            row_idx.push(*i);
            vals.push(*v);
        }
        if let Some((a, alpha)) = anchor {
            if a == j && !placed {
                row_idx.push(a);
                vals.push(alpha);
            }
        }
        col_ptr.push(row_idx.len());
    }
    let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
    Ok(SparseColMat::new(symbolic, vals))
}

/// Anchor position and scale for a system with one multiplier.
fn anchor_of(sys: &SaddleSystem) -> Option<(usize, f64)> {
    if sys.n_gauge == 0 || sys.n_pressure == 0 {
        return None;
    }
    let scale = sys.matrix.val().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Some((sys.n_velocity, if scale > 0.0 { scale } else { 1.0 }))
}

/// Stateful solver that keeps the last factorization around.
pub struct SaddleSolver {
    tol: f64,
    max_refine: usize,
    cache: Option<Factorization>,
}

impl std::fmt::Debug for SaddleSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SaddleSolver")
            .field("tol", &self.tol)
            .field("max_refine", &self.max_refine)
            .field("factored", &self.cache.as_ref().is_some_and(|c| c.lu.is_some()))
            .finish()
    }
}

impl SaddleSolver {
    pub fn new(tol: f64) -> Result<Self> {
        if !(1e-14..=1e-6).contains(&tol) {
            return Err(Error::InvalidInput(format!(
                "solver tolerance {tol} outside [1e-14, 1e-6]"
            )));
        }
        // Sequential kernels keep results bitwise reproducible.
        faer::set_global_parallelism(Par::Seq);
        Ok(Self {
            tol,
            max_refine: 20,
            cache: None,
        })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Drops any stored factorization.
    pub fn reset(&mut self) {
        self.cache = None;
    }

    pub fn solve(&mut self, sys: &SaddleSystem) -> Result<(Vec<f64>, SolveReport)> {
        let start = Instant::now();
        let n = sys.dim();
        if sys.matrix.nrows() != n || sys.matrix.ncols() != n || sys.rhs.len() != n {
            return Err(Error::InvalidInput("system is not square".into()));
        }
        if n == 0 {
            return Ok((Vec::new(), self.report(0.0, 0, start, false)));
        }
        if sys.rhs.iter().all(|v| *v == 0.0) {
            return Ok((vec![0.0; n], self.report(0.0, 0, start, false)));
        }
        let same_pattern = self.cache.as_ref().is_some_and(|c| {
            c.col_ptr == sys.matrix.symbolic().col_ptr()
                && c.row_idx == sys.matrix.symbolic().row_idx()
        });
        if sys.n_gauge > 1 {
            return Err(Error::InvalidInput("at most one gauge multiplier is supported".into()));
        }
        if !same_pattern {
            let core = core_matrix(sys, anchor_of(sys))?;
            let symbolic = SymbolicLu::try_new(core.symbolic())
                .map_err(|e| Error::InvalidInput(format!("symbolic analysis failed: {e:?}")))?;
            self.cache = Some(Factorization {
                col_ptr: sys.matrix.symbolic().col_ptr().to_vec(),
                row_idx: sys.matrix.symbolic().row_idx().to_vec(),
                symbolic,
                lu: None,
            });
        }
        let target = self.tol;
        if self.cache.as_ref().is_some_and(|c| c.lu.is_some()) {
            if let Some((x, it)) = self.refine(sys, None) {
                let res = sys.relative_residual(&x);
                if res <= target {
                    return Ok((x, self.report(res, it, start, false)));
                }
            }
        }
        self.factor(sys)?;
        match self.refine(sys, Some(self.max_refine)) {
            Some((x, it)) => {
                let res = sys.relative_residual(&x);
                if res <= target {
                    Ok((x, self.report(res, it, start, true)))
                } else {
                    Err(Error::NoConvergence {
                        tol: target,
                        residual: res,
                    })
                }
            }
            None => Err(Error::Singular { index: first_bad(sys) }),
        }
    }

    fn factor(&mut self, sys: &SaddleSystem) -> Result<()> {
        let cache = self.cache.as_mut().expect("symbolic analysis present");
        cache.lu = None;
        let anchor = anchor_of(sys);
        let core = core_matrix(sys, anchor)?;
        let n = core.nrows();
        let lu = Lu::try_new_with_symbolic(cache.symbolic.clone(), core.as_ref()).map_err(map_lu_error)?;
        let mut f = BorderedLu {
            lu,
            core: n,
            border: None,
        };
        if sys.n_gauge == 1 {
            let m = sys.matrix.as_ref();
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            let mut g = 0.0;
            for j in 0..=n {
                let range = m.col_range(j);
                for (i, v) in m.row_idx()[range.clone()].iter().zip(&m.val()[range]) {
                    match (*i == n, j == n) {
                        (true, true) => g += v,
                        (true, false) => d[j] += v,
                        (false, true) => c[*i] += v,
                        (false, false) => {}
                    }
                }
            }
            let (anchor, alpha) = anchor.unwrap_or((0, 0.0));
            let mut e = vec![0.0; n];
            if alpha != 0.0 {
                e[anchor] = 1.0;
            }
            let y_e = if alpha != 0.0 { f.core_solve(&e) } else { e };
            let y_c = f.core_solve(&c);
            f.border = Some(Border {
                anchor,
                alpha,
                d,
                g,
                y_e,
                y_c,
            });
        }
        cache.lu = Some(f);
        Ok(())
    }

    /// Direct solve followed by refinement sweeps with the stored factors.
    /// Returns `None` if the iterates become non-finite. With a stale
    /// factorization (`limit = None`) gives up as soon as progress stalls.
    fn refine(&self, sys: &SaddleSystem, limit: Option<usize>) -> Option<(Vec<f64>, usize)> {
        let lu = self.cache.as_ref()?.lu.as_ref()?;
        let apply_inv = |r: &[f64]| lu.solve(r);
        let nb = norm(&sys.rhs);
        let mut x = apply_inv(&sys.rhs);
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let mut prev = f64::INFINITY;
        let max = limit.unwrap_or(self.max_refine);
        for it in 0..=max {
            let mx = sys.apply(&x);
            let r: Vec<f64> = sys.rhs.iter().zip(&mx).map(|(b, m)| b - m).collect();
            let res = norm(&r) / nb;
            if !res.is_finite() {
                return None;
            }
            if res <= 0.1 * self.tol || it == max {
                return Some((x, it));
            }
            let stalled = res > 0.5 * prev;
            if stalled && (limit.is_none() || res <= self.tol) {
                return Some((x, it));
            }
            prev = res;
            let d = apply_inv(&r);
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += di;
            }
            if x.iter().any(|v| !v.is_finite()) {
                return None;
            }
        }
        Some((x, max))
    }

    fn report(&self, residual: f64, iterations: usize, start: Instant, refactored: bool) -> SolveReport {
        SolveReport {
            residual,
            iterations,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            solver: SOLVER_ID.to_string(),
            refactored,
        }
    }
}

fn map_lu_error(e: LuError) -> Error {
    match e {
        LuError::SymbolicSingular { index } => Error::Singular { index },
        LuError::Generic(g) => Error::InvalidInput(format!("factorization failed: {g:?}")),
    }
}

/// First column without a nonzero entry, as a best-effort location for a
/// numerically singular system.
fn first_bad(sys: &SaddleSystem) -> usize {
    let m = sys.matrix.as_ref();
    for j in 0..sys.dim() {
        let range = m.col_range(j);
        if m.val()[range].iter().all(|v| *v == 0.0) {
            return j;
        }
    }
    0
}

/// One-shot solve with a fresh factorization.
pub fn solve(sys: &SaddleSystem, tol: f64) -> Result<(Vec<f64>, SolveReport)> {
    SaddleSolver::new(tol)?.solve(sys)
}

/// Builds the symbolic structure for a fixed list of index pairs; values are
/// later supplied in the same order.
pub struct PatternBuilder {
    symbolic: SymbolicSparseColMat<usize>,
    argsort: faer::sparse::Argsort<usize>,
    len: usize,
}

impl PatternBuilder {
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let idx: Vec<Pair<usize, usize>> = pairs.iter().map(|&(r, c)| Pair::new(r, c)).collect();
        let (symbolic, argsort) = SymbolicSparseColMat::try_new_from_indices(n, n, &idx)
            .map_err(|e| Error::InvalidInput(format!("sparse pattern construction: {e:?}")))?;
        Ok(Self {
            symbolic,
            argsort,
            len: pairs.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn fill(&self, values: &[f64]) -> Result<SparseColMat<usize, f64>> {
        if values.len() != self.len {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                self.len,
                values.len()
            )));
        }
        SparseColMat::new_from_argsort(self.symbolic.clone(), &self.argsort, values)
            .map_err(|e| Error::InvalidInput(format!("sparse fill: {e:?}")))
    }
}
