//! Compressed sparse row matrices used as message-passing operators.

use super::mat::{Mat, Scalar};

/// CSR matrix: same layout as the graph adjacency plus a values array.
/// Column indices are strictly increasing within each row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<S> {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> CsrMatrix<S> {
    /// Build from per-row `(column, value)` lists. Each list must be sorted
    /// by column with no duplicates; that is checked in debug builds.
    pub fn from_rows(rows: usize, cols: usize, row_entries: &[Vec<(usize, S)>]) -> Self {
        assert_eq!(row_entries.len(), rows);
        let mut row_offsets = Vec::with_capacity(rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for entries in row_entries {
            debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0), "row not sorted");
            for &(c, v) in entries {
                debug_assert!(c < cols);
                col_indices.push(c);
                values.push(v);
            }
            row_offsets.push(col_indices.len());
        }
        CsrMatrix {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            rows: n,
            cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![S::one(); n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, S)> + '_ {
        let start = self.row_offsets[r];
        let end = self.row_offsets[r + 1];
        self.col_indices[start..end]
            .iter()
            .zip(&self.values[start..end])
            .map(|(&c, &v)| (c, v))
    }

    /// Dense product `self * x`.
    pub fn spmm(&self, x: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, x.rows(), "inner dimensions differ in spmm");
        let mut out = Mat::zeros(self.rows, x.cols());
        for r in 0..self.rows {
            for idx in self.row_offsets[r]..self.row_offsets[r + 1] {
                let c = self.col_indices[idx];
                let v = self.values[idx];
                let x_row = x.row(c);
                let out_row = out.row_mut(r);
                for (o, &xv) in out_row.iter_mut().zip(x_row) {
                    *o += v * xv;
                }
            }
        }
        out
    }

    /// Dense product `self^T * g`, scattered row by row so no transpose is
    /// ever materialized. This is the adjoint of [`CsrMatrix::spmm`].
    pub fn spmm_transposed(&self, g: &Mat<S>) -> Mat<S> {
        assert_eq!(self.rows, g.rows(), "inner dimensions differ in spmm_transposed");
        let mut out = Mat::zeros(self.cols, g.cols());
        for r in 0..self.rows {
            let g_row = g.row(r).to_vec();
            for idx in self.row_offsets[r]..self.row_offsets[r + 1] {
                let c = self.col_indices[idx];
                let v = self.values[idx];
                let out_row = out.row_mut(c);
                for (o, &gv) in out_row.iter_mut().zip(&g_row) {
                    *o += v * gv;
                }
            }
        }
        out
    }
}
