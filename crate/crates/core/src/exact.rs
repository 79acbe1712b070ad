//! Complete matrix evaluation: materialize the closed matrix `Q` for a
//! permutation and scan all of it.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{Instance, Permutation};
use crate::{Error, Result};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 9;

const EMPTY: u8 = 0;
const ENTRY: u8 = 1;
const FILL: u8 = 2;

/// The permuted matrix closed under the consecutive-ones property.
///
/// Indexed by original row and by stage (position in the permutation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    stages: usize,
    cells: Vec<u8>,
    extents: Vec<Option<(usize, usize)>>,
}

impl QMatrix {
    fn with_shape(rows: usize, stages: usize) -> Self {
        Self {
            rows,
            stages,
            cells: vec![EMPTY; rows * stages],
            extents: vec![None; rows],
        }
    }

    fn fill(&mut self, inst: &Instance, perm: &Permutation) {
        self.cells.fill(EMPTY);
        self.extents.fill(None);
        let n = self.stages;
        for r in 0..inst.active_rows() {
            let cols = inst.row_cols(r);
            let (mut first, mut last) = (usize::MAX, 0);
            for &c in cols {
                let p = perm.position_of(c);
                first = first.min(p);
                last = last.max(p);
            }
            let row = inst.original_row(r);
            let base = row * n;
            self.cells[base + first..=base + last].fill(FILL);
            for &c in cols {
                self.cells[base + perm.position_of(c)] = ENTRY;
            }
            self.extents[row] = Some((first, last));
        }
        for &(row, c) in inst.singleton_rows() {
            let p = perm.position_of(c);
            self.cells[row * n + p] = ENTRY;
            self.extents[row] = Some((p, p));
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    #[inline]
    pub fn get(&self, row: usize, stage: usize) -> bool {
        self.cells[row * self.stages + stage] != EMPTY
    }

    /// True when the cell is a zero of the original matrix turned into a one
    /// by the closure.
    #[inline]
    pub fn is_fill_in(&self, row: usize, stage: usize) -> bool {
        self.cells[row * self.stages + stage] == FILL
    }

    /// First and last stage of the row's block, `None` for an all-zero row.
    pub fn extent(&self, row: usize) -> Option<(usize, usize)> {
        self.extents[row]
    }

    pub fn fill_ins(&self, row: usize) -> Vec<usize> {
        (0..self.stages).filter(|&s| self.is_fill_in(row, s)).collect()
    }

    /// Column sums by a full scan of the cells.
    pub fn stage_sums(&self) -> Vec<u32> {
        let mut sums = vec![0u32; self.stages];
        self.accumulate(&mut sums);
        sums
    }

    fn accumulate(&self, sums: &mut [u32]) {
        sums.fill(0);
        for row in self.cells.chunks_exact(self.stages.max(1)).take(self.rows) {
            for (sum, &cell) in sums.iter_mut().zip(row) {
                *sum += u32::from(cell != EMPTY);
            }
        }
    }
}

/// Stage sums of the closed matrix and their maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub value: u32,
    pub stage_sums: Vec<u32>,
}

impl Objective {
    pub fn from_sums(stage_sums: Vec<u32>) -> Self {
        let value = stage_sums.iter().copied().max().unwrap_or(0);
        Self { value, stage_sums }
    }

    /// Every stage attaining the maximum, ascending.
    pub fn critical_stages(&self) -> Vec<usize> {
        if self.value == 0 {
            return Vec::new();
        }
        self.stage_sums
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == self.value)
            .map(|(s, _)| s)
            .collect()
    }

    /// Columns sitting on critical stages, in stage order.
    pub fn critical_columns(&self, perm: &Permutation) -> Vec<usize> {
        self.critical_stages().into_iter().map(|s| perm.column_at(s)).collect()
    }
}

pub fn build_q(inst: &Instance, perm: &Permutation) -> QMatrix {
    let mut q = QMatrix::with_shape(inst.rows(), inst.cols());
    q.fill(inst, perm);
    q
}

pub fn evaluate_full(inst: &Instance, perm: &Permutation) -> Objective {
    Objective::from_sums(build_q(inst, perm).stage_sums())
}

/// Reusable complete-matrix evaluator: rebuilds `Q` in a retained buffer on
/// every call, then scans it.
#[derive(Debug, Clone)]
pub struct MatrixEvaluator<'a> {
    inst: &'a Instance,
    q: QMatrix,
    sums: Vec<u32>,
    calls: u64,
}

impl<'a> MatrixEvaluator<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Self {
            inst,
            q: QMatrix::with_shape(inst.rows(), inst.cols()),
            sums: vec![0; inst.cols()],
            calls: 0,
        }
    }

    pub fn evaluate(&mut self, perm: &Permutation) -> u32 {
        self.calls += 1;
        self.q.fill(self.inst, perm);
        self.q.accumulate(&mut self.sums);
        self.sums.iter().copied().max().unwrap_or(0)
    }

    /// Stage sums of the most recent evaluation.
    pub fn stage_sums(&self) -> &[u32] {
        &self.sums
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }
}

/// Exhaustive minimum over all `n!` column orders.
///
/// Orders are enumerated lexicographically and only a strictly better value
/// replaces the incumbent, so the returned permutation is the
/// lexicographically smallest optimal one.
pub fn brute_force_optimum(inst: &Instance, cap: usize) -> Result<(u32, Permutation)> {
    let n = inst.cols();
    if n > cap {
        return Err(Error::BruteForceCap { cols: n, cap });
    }
    let mut eval = MatrixEvaluator::new(inst);
    let mut order: Vec<usize> = (0..n).collect();
    let mut best: Option<(u32, Vec<usize>)> = None;
    loop {
        let perm = Permutation::new(order.clone()).expect("lexicographic walk stays a bijection");
        let value = eval.evaluate(&perm);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, order.clone()));
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    let (value, order) = best.expect("at least one permutation");
    Ok((value, Permutation::new(order).expect("bijection")))
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::matrix::BinaryMatrix;
    use alloc::vec;

    #[test]
    fn example_order_a_fill_ins() {
        let inst = example_instance();
        let q = build_q(&inst, &example_order_a());
        // 0-based rows and stages.
        assert_eq!(q.extent(0), Some((1, 5)));
        assert_eq!(q.fill_ins(0), vec![2, 3, 4]);
        assert_eq!(q.fill_ins(2), vec![1]);
        for r in [1, 3, 4, 5] {
            assert!(q.fill_ins(r).is_empty(), "row {r}");
        }
    }

    #[test]
    fn example_order_b_fill_ins() {
        let inst = example_instance();
        let q = build_q(&inst, &example_order_b());
        assert_eq!(q.fill_ins(0), vec![1, 2, 3, 4]);
        assert_eq!(q.fill_ins(1), vec![1, 2, 3]);
        assert!(q.fill_ins(2).is_empty());
        assert_eq!(q.fill_ins(3), vec![2]);
        assert_eq!(q.fill_ins(4), vec![3, 4]);
        assert_eq!(q.fill_ins(5), vec![2, 3]);
    }

    #[test]
    fn example6_objectives() {
        let inst = example_instance();
        let pi1 = example_order_a();
        let obj = evaluate_full(&inst, &pi1);
        assert_eq!(obj.value, 3);
        assert_eq!(obj.stage_sums, vec![2, 3, 3, 3, 3, 2]);
        assert_eq!(obj.critical_stages(), vec![1, 2, 3, 4]);
        assert_eq!(obj.critical_columns(&pi1), vec![1, 3, 5, 2]);

        let pi2 = example_order_b();
        let obj = evaluate_full(&inst, &pi2);
        assert_eq!(obj.value, 6);
        assert_eq!(obj.critical_columns(&pi2), vec![4, 3]);
    }

    #[test]
    fn zero_matrix() {
        let inst = Instance::preprocess(&BinaryMatrix::zeros(3, 3));
        let q = build_q(&inst, &Permutation::new(vec![2, 0, 1]).unwrap());
        assert!((0..3).all(|r| (0..3).all(|s| !q.get(r, s))));
        assert_eq!(evaluate_full(&inst, &Permutation::identity(3)).value, 0);
    }

    #[test]
    fn single_row_with_fill_in() {
        let inst = Instance::preprocess(&BinaryMatrix::from_rows(&[[1u8, 0, 1]]));
        let obj = evaluate_full(&inst, &Permutation::identity(3));
        assert_eq!(obj.stage_sums, vec![1, 1, 1]);
        assert_eq!(obj.value, 1);
    }

    #[test]
    fn singleton_rows_count_once() {
        let inst = Instance::preprocess(&BinaryMatrix::from_rows(&[[0u8, 1, 0], [1, 0, 1]]));
        let perm = Permutation::identity(3);
        assert_eq!(evaluate_full(&inst, &perm).stage_sums, vec![1, 2, 1]);
        let q = build_q(&inst, &perm);
        assert_eq!(q.extent(0), Some((1, 1)));
        assert!(!q.is_fill_in(0, 1));
    }

    #[test]
    fn brute_force() {
        let (v, p) = brute_force_optimum(&example_instance(), DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(v, 3);
        assert_eq!(evaluate_full(&example_instance(), &p).value, 3);

        let one = Instance::preprocess(&BinaryMatrix::from_rows(&[[1u8]]));
        let (v, p) = brute_force_optimum(&one, 9).unwrap();
        assert_eq!((v, p.to_one_based()), (1, vec![1]));

        let zero = Instance::preprocess(&BinaryMatrix::zeros(4, 4));
        assert_eq!(brute_force_optimum(&zero, 9).unwrap().0, 0);
        assert_eq!(brute_force_optimum(&zero, 9).unwrap().1, Permutation::identity(4));

        let wide = Instance::preprocess(&BinaryMatrix::zeros(1, 10));
        assert_eq!(
            brute_force_optimum(&wide, DEFAULT_BRUTE_FORCE_CAP),
            Err(Error::BruteForceCap { cols: 10, cap: 9 })
        );
    }

    #[test]
    fn next_permutation_counts() {
        let mut v = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 24);
    }
}
