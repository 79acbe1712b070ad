use alloc::vec;
use alloc::vec::Vec;

use crate::instance::Permutation;
use crate::{Error, Result};

/// Dense row-major 0/1 matrix, the raw form of an instance before
/// preprocessing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: vec![false; rows * cols],
        }
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::MatrixShape {
                rows,
                cols,
                got: cells.len(),
            });
        }
        Ok(Self { rows, cols, cells })
    }

    /// Builds a matrix from nested rows of 0/1 values. Panics on ragged input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged row {i}");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v != 0);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.cells[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[bool] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn nonzeros(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Column sums of the closed matrix under `perm`, computed straight from
    /// the raw cells: a cell of `Q` is one iff some original entry of its row
    /// sits at or before the stage and another at or after it.
    pub fn closed_stage_sums(&self, perm: &Permutation) -> Vec<u32> {
        let mut sums = vec![0u32; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut seen_left = false;
            let mut ones_right = row.iter().filter(|&&c| c).count();
            for (stage, sum) in sums.iter_mut().enumerate() {
                let hit = row[perm.column_at(stage)];
                if hit {
                    seen_left = true;
                }
                if seen_left && ones_right > 0 {
                    *sum += 1;
                }
                if hit {
                    ones_right -= 1;
                }
            }
        }
        sums
    }
}
