//! Indirect evaluation: one left-to-right sweep over the per-column nonzero
//! lists, counting the rows whose block is open at each stage.

use alloc::vec;
use alloc::vec::Vec;

use crate::exact::Objective;
use crate::instance::{Instance, Permutation};

/// Per-row sweep bookkeeping.
///
/// A row is open at stage `s` iff its block covers `s`. `seen[r]` holds the
/// sweep generation in which row `r` was opened, so a new sweep resets every
/// row by bumping `generation` instead of clearing the arrays.
#[derive(Debug, Clone)]
pub struct SweepState {
    remaining: Vec<u32>,
    seen: Vec<u32>,
    generation: u32,
    open_count: u32,
}

impl SweepState {
    fn new(active_rows: usize) -> Self {
        Self {
            remaining: vec![0; active_rows],
            seen: vec![0; active_rows],
            generation: 0,
            open_count: 0,
        }
    }

    fn begin(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.seen.fill(0);
            self.generation = 1;
        }
        self.open_count = 0;
    }

    /// Rows still open; zero once a sweep has finished.
    pub fn open_count(&self) -> u32 {
        self.open_count
    }
}

#[derive(Debug, Clone)]
pub struct IndirectEvaluator<'a> {
    inst: &'a Instance,
    state: SweepState,
    sums: Vec<u32>,
    calls: u64,
    touched: u64,
}

impl<'a> IndirectEvaluator<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Self {
            inst,
            state: SweepState::new(inst.active_rows()),
            sums: vec![0; inst.cols()],
            calls: 0,
            touched: 0,
        }
    }

    pub fn evaluate(&mut self, perm: &Permutation) -> u32 {
        self.calls += 1;
        let inst = self.inst;
        let st = &mut self.state;
        st.begin();
        let gen = st.generation;
        let mut best = 0;
        for (stage, sum) in self.sums.iter_mut().enumerate() {
            let col = perm.column_at(stage);
            let rows = inst.col_rows(col);
            let mut closing = 0;
            for &r in rows {
                if st.seen[r] != gen {
                    st.seen[r] = gen;
                    st.remaining[r] = inst.row_cols(r).len() as u32;
                    st.open_count += 1;
                }
                st.remaining[r] -= 1;
                if st.remaining[r] == 0 {
                    closing += 1;
                }
            }
            // Rows closing here still cover this stage.
            *sum = st.open_count + inst.singleton_count(col);
            st.open_count -= closing;
            best = best.max(*sum);
            self.touched += rows.len() as u64 + 1;
        }
        debug_assert_eq!(st.open_count, 0);
        best
    }

    pub fn stage_sums(&self) -> &[u32] {
        &self.sums
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    /// Column-list entries plus stages visited over all sweeps.
    pub fn touched(&self) -> u64 {
        self.touched
    }
}

pub fn evaluate_indirect(inst: &Instance, perm: &Permutation) -> Objective {
    let mut ev = IndirectEvaluator::new(inst);
    ev.evaluate(perm);
    Objective::from_sums(ev.sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::evaluate_full;
    use crate::fixtures::*;
    use crate::matrix::BinaryMatrix;

    #[test]
    fn example6() {
        let inst = example_instance();
        assert_eq!(evaluate_indirect(&inst, &example_order_a()).value, 3);
        assert_eq!(evaluate_indirect(&inst, &example_order_b()).value, 6);
        assert_eq!(
            evaluate_indirect(&inst, &example_order_a()).stage_sums,
            evaluate_full(&inst, &example_order_a()).stage_sums
        );
    }

    #[test]
    fn spanning_row() {
        let inst = Instance::preprocess(&BinaryMatrix::from_rows(&[[1u8, 0, 0, 0, 1]]));
        let perm = Permutation::new(alloc::vec![0, 3, 1, 2, 4]).unwrap();
        assert_eq!(evaluate_indirect(&inst, &perm).stage_sums, alloc::vec![1; 5]);
    }

    #[test]
    fn reuse_across_calls() {
        let inst = Instance::generate(30, 25, 0.2, 3);
        let mut ev = IndirectEvaluator::new(&inst);
        for seed in 0..20 {
            let perm = Permutation::random(25, seed);
            let v = ev.evaluate(&perm);
            assert_eq!(ev.stage_sums(), &evaluate_full(&inst, &perm).stage_sums[..]);
            assert_eq!(v, evaluate_full(&inst, &perm).value);
            assert_eq!(ev.state.open_count(), 0);
        }
        assert_eq!(ev.calls(), 20);
        assert!(ev.touched() >= 20 * 25);
    }

    #[test]
    fn generation_wraparound() {
        let inst = example_instance();
        let mut ev = IndirectEvaluator::new(&inst);
        ev.state.generation = u32::MAX - 1;
        for _ in 0..4 {
            assert_eq!(ev.evaluate(&example_order_a()), 3);
        }
    }
}
