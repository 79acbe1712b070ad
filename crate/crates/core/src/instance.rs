//! Problem instances and column permutations.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::matrix::BinaryMatrix;
use crate::rng;
use crate::{Error, Result};

/// An immutable, preprocessed instance.
///
/// Rows with no nonzero entry are dropped. Rows with exactly one nonzero entry
/// (singletons) always form a block of length one, so they are kept out of the
/// row structures and only contribute a per-column constant to every stage
/// sum. The remaining *active* rows are renumbered `0..active_rows()`;
/// [`Instance::original_row`] maps them back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    rows: usize,
    cols: usize,
    active: Vec<usize>,
    col_rows: Vec<Vec<usize>>,
    row_cols: Vec<Vec<usize>>,
    singleton_rows: Vec<(usize, usize)>,
    singleton_count: Vec<u32>,
    nonzeros: usize,
}

impl Instance {
    pub fn preprocess(matrix: &BinaryMatrix) -> Self {
        let (rows, cols) = (matrix.rows(), matrix.cols());
        let mut active = Vec::new();
        let mut row_cols = Vec::new();
        let mut col_rows = vec![Vec::new(); cols];
        let mut singleton_rows = Vec::new();
        let mut singleton_count = vec![0u32; cols];
        let mut nonzeros = 0;

        for i in 0..rows {
            let entries: Vec<usize> = (0..cols).filter(|&j| matrix.get(i, j)).collect();
            nonzeros += entries.len();
            match entries.len() {
                0 => {}
                1 => {
                    singleton_rows.push((i, entries[0]));
                    singleton_count[entries[0]] += 1;
                }
                _ => {
                    let id = active.len();
                    for &j in &entries {
                        col_rows[j].push(id);
                    }
                    active.push(i);
                    row_cols.push(entries);
                }
            }
        }

        Self {
            rows,
            cols,
            active,
            col_rows,
            row_cols,
            singleton_rows,
            singleton_count,
            nonzeros,
        }
    }

    /// Random instance: every cell is one with probability `density`, drawn
    /// row-major from the repository PRNG seeded with `seed`.
    pub fn generate(rows: usize, cols: usize, density: f64, seed: u64) -> Self {
        Self::preprocess(&generate_matrix(rows, cols, density, seed))
    }

    /// Rebuilds the raw matrix, including dropped all-zero rows.
    pub fn to_matrix(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.rows, self.cols);
        for (id, cols) in self.row_cols.iter().enumerate() {
            for &j in cols {
                m.set(self.active[id], j, true);
            }
        }
        for &(i, j) in &self.singleton_rows {
            m.set(i, j, true);
        }
        m
    }

    /// Number of rows `m` of the raw matrix.
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns `n`.
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Rows with at least two nonzero entries.
    #[inline]
    pub fn active_rows(&self) -> usize {
        self.active.len()
    }

    #[inline]
    pub fn original_row(&self, active_row: usize) -> usize {
        self.active[active_row]
    }

    /// Active rows with an entry in column `col`, ascending.
    #[inline]
    pub fn col_rows(&self, col: usize) -> &[usize] {
        &self.col_rows[col]
    }

    /// Columns of an active row, ascending.
    #[inline]
    pub fn row_cols(&self, active_row: usize) -> &[usize] {
        &self.row_cols[active_row]
    }

    /// `(original row, column)` of every singleton row.
    pub fn singleton_rows(&self) -> &[(usize, usize)] {
        &self.singleton_rows
    }

    #[inline]
    pub fn singleton_count(&self, col: usize) -> u32 {
        self.singleton_count[col]
    }

    pub fn nonzeros(&self) -> usize {
        self.nonzeros
    }

    pub fn density(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            0.0
        } else {
            self.nonzeros as f64 / (self.rows * self.cols) as f64
        }
    }

    /// Checks that the column lists and row lists describe the same matrix
    /// and that the nonzero count adds up.
    pub fn is_consistent(&self) -> bool {
        let mut rebuilt = vec![Vec::new(); self.active.len()];
        for (j, rows) in self.col_rows.iter().enumerate() {
            for &r in rows {
                if r >= rebuilt.len() {
                    return false;
                }
                rebuilt[r].push(j);
            }
        }
        let listed: usize = self.col_rows.iter().map(Vec::len).sum();
        rebuilt == self.row_cols
            && self.row_cols.iter().all(|c| c.len() >= 2)
            && listed + self.singleton_rows.len() == self.nonzeros
            && self.singleton_count.iter().sum::<u32>() as usize == self.singleton_rows.len()
    }
}

pub fn generate_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> BinaryMatrix {
    let density = density.clamp(0.0, 1.0);
    let mut rng = rng::seeded(seed);
    let mut m = BinaryMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rng.random_bool(density));
        }
    }
    m
}

/// An ordering of the columns together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let order: Vec<usize> = (0..n).collect();
        Self {
            pos: order.clone(),
            order,
        }
    }

    /// `order[k]` is the column placed at position `k`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut pos = vec![usize::MAX; n];
        for (k, &c) in order.iter().enumerate() {
            if c >= n || pos[c] != usize::MAX {
                return Err(Error::InvalidPermutation { len: n, expected: n });
            }
            pos[c] = k;
        }
        Ok(Self { order, pos })
    }

    /// Same as [`Permutation::new`] with 1-based column labels.
    pub fn from_one_based(order: &[usize]) -> Result<Self> {
        let n = order.len();
        if order.contains(&0) {
            return Err(Error::InvalidPermutation { len: n, expected: n });
        }
        Self::new(order.iter().map(|&c| c - 1).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    pub fn column_at(&self, position: usize) -> usize {
        self.order[position]
    }

    #[inline]
    pub fn position_of(&self, column: usize) -> usize {
        self.pos[column]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn positions(&self) -> &[usize] {
        &self.pos
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.order.iter().map(|c| c + 1).collect()
    }

    pub fn swap_positions(&mut self, a: usize, b: usize) {
        self.order.swap(a, b);
        self.pos[self.order[a]] = a;
        self.pos[self.order[b]] = b;
    }

    /// Reverses positions `a..=b`.
    pub fn reverse(&mut self, a: usize, b: usize) {
        self.order[a..=b].reverse();
        for k in a..=b {
            self.pos[self.order[k]] = k;
        }
    }

    /// Removes the column at `from` and reinserts it at `to`, shifting the
    /// columns in between by one.
    pub fn move_column(&mut self, from: usize, to: usize) {
        if from < to {
            self.order[from..=to].rotate_left(1);
        } else if to < from {
            self.order[to..=from].rotate_right(1);
        }
        let (lo, hi) = (from.min(to), from.max(to));
        for k in lo..=hi.min(self.order.len().saturating_sub(1)) {
            self.pos[self.order[k]] = k;
        }
    }

    pub fn reversed(&self) -> Self {
        let mut p = self.clone();
        if !p.is_empty() {
            let last = p.len() - 1;
            p.reverse(0, last);
        }
        p
    }

    pub fn random(n: usize, seed: u64) -> Self {
        let mut r = rng::seeded(seed);
        Self::new(rng::shuffled_identity(n, &mut r)).expect("shuffle is a bijection")
    }
}
