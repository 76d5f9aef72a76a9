use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Tolerance on row/column sums for matrices built by this crate.
pub const GENERATED_TOL: f64 = 1e-12;
/// Tolerance on row/column sums for matrices read from user input.
pub const USER_TOL: f64 = 1e-9;

/// Symmetric, nonnegative, doubly stochastic weight matrix `A(t)` of one
/// communication slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    w: Matrix,
}

impl AdjacencyMatrix {
    /// Checks symmetry, nonnegativity and double stochasticity at `tol`.
    pub fn new(w: Matrix, tol: f64) -> Result<Self> {
        if w.rows() != w.cols() {
            return Err(Error::InvalidMatrix(format!(
                "not square ({}x{})",
                w.rows(),
                w.cols()
            )));
        }
        if w.rows() == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        if !w.is_symmetric(tol) {
            return Err(Error::InvalidMatrix("not symmetric".into()));
        }
        for i in 0..w.rows() {
            for j in 0..w.cols() {
                let x = w[(i, j)];
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidMatrix(format!("entry ({i},{j}) = {x}")));
                }
            }
        }
        let err = w.stochasticity_error();
        if err > tol {
            return Err(Error::InvalidMatrix(format!(
                "row/column sums deviate from 1 by {err:e}"
            )));
        }
        Ok(AdjacencyMatrix { w })
    }

    /// The uniform averaging matrix `(1/m) 11'`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "agent count must be positive".into(),
            ));
        }
        Ok(AdjacencyMatrix {
            w: Matrix::filled(m, m, 1.0 / m as f64),
        })
    }

    pub fn m(&self) -> usize {
        self.w.rows()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix {
        &self.w
    }

    /// Smallest positive entry, diagonal included.
    pub fn eta(&self) -> f64 {
        let m = self.m();
        let mut eta = f64::INFINITY;
        for i in 0..m {
            for j in 0..m {
                let x = self.w[(i, j)];
                if x > 0.0 {
                    eta = eta.min(x);
                }
            }
        }
        eta
    }

    /// Undirected edges `{i, j}`, `i < j`, with positive weight.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let m = self.m();
        let mut out = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                if self.w[(i, j)] > 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Whether the diagonal and every nonzero off-diagonal entry are at
    /// least `eta`, up to [`GENERATED_TOL`] of rounding.
    pub fn respects_floor(&self, eta: f64) -> bool {
        let m = self.m();
        let eta = eta - GENERATED_TOL;
        (0..m).all(|i| {
            (0..m).all(|j| {
                let x = self.w[(i, j)];
                if i == j {
                    x >= eta
                } else {
                    x == 0.0 || x >= eta
                }
            })
        })
    }
}

/// Builds Metropolis weights for an undirected edge set on nodes `0..m`:
/// `a_ij = 1 / (1 + max(deg_i, deg_j))` on edges, with the diagonal taking
/// the remaining mass of each row.
pub fn metropolis_weights(edges: &[(usize, usize)], m: usize) -> Result<AdjacencyMatrix> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "agent count must be positive".into(),
        ));
    }
    let mut seen = BTreeSet::new();
    let mut deg = vec![0usize; m];
    for &(a, b) in edges {
        if a >= m || b >= m {
            return Err(Error::NodeOutOfRange(a, b, m));
        }
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        let key = (a.min(b), a.max(b));
        if !seen.insert(key) {
            return Err(Error::DuplicateEdge(key.0, key.1));
        }
        deg[a] += 1;
        deg[b] += 1;
    }
    let mut w = Matrix::zeros(m, m);
    for &(i, j) in &seen {
        let a = 1.0 / (1 + deg[i].max(deg[j])) as f64;
        w[(i, j)] = a;
        w[(j, i)] = a;
    }
    for i in 0..m {
        let off: f64 = (0..m).filter(|&j| j != i).map(|j| w[(i, j)]).sum();
        w[(i, i)] = 1.0 - off;
    }
    AdjacencyMatrix::new(w, GENERATED_TOL)
}

/// Parses a whitespace-separated, row-major list of square matrices.
/// Matrices are separated by one or more blank lines; `#` starts a comment.
pub fn parse_matrix_list(text: &str) -> Result<Vec<AdjacencyMatrix>> {
    let mut blocks: Vec<Vec<(usize, Vec<f64>)>> = vec![Vec::new()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if blocks.last().is_some_and(|b| !b.is_empty()) {
                blocks.push(Vec::new());
            }
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad number `{tok}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        blocks.last_mut().unwrap().push((lineno + 1, row));
    }
    let mut out = Vec::new();
    for block in blocks.into_iter().filter(|b| !b.is_empty()) {
        let first_line = block[0].0;
        let m = block.len();
        for (line, row) in &block {
            if row.len() != m {
                return Err(Error::Parse {
                    line: *line,
                    msg: format!("row has {} entries, expected {m}", row.len()),
                });
            }
        }
        let w = Matrix::from_rows(block.into_iter().map(|(_, r)| r).collect())?;
        let a = AdjacencyMatrix::new(w, USER_TOL).map_err(|e| Error::Parse {
            line: first_line,
            msg: e.to_string(),
        })?;
        if let Some(prev) = out.first().map(AdjacencyMatrix::m) {
            if prev != m {
                return Err(Error::Parse {
                    line: first_line,
                    msg: format!("matrix is {m}x{m}, earlier ones are {prev}x{prev}"),
                });
            }
        }
        out.push(a);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no matrices found".into(),
        });
    }
    Ok(out)
}
