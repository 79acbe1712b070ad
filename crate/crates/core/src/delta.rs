//! Bitwise delta evaluation.
//!
//! Every stage keeps four bitsets over the active rows:
//!
//! * `L` (leading): the row's block starts at this stage;
//! * `T` (trailing): the row's block ends at this stage;
//! * `I` (intermediate): an original entry strictly inside the block;
//! * `C` (consecutive): a fill-in, a zero strictly inside the block.
//!
//! Singleton rows are not tracked here (see [`Instance`]); their blocks have
//! length one and only add a per-column constant to the stage sums.
//!
//! Swapping the columns at stages `s` and `s + 1` only changes the sets of
//! those two stages. The new sets follow from eight Boolean expressions over
//! the old ones, evaluated word by word; see [`SetUpdate`]. An insertion move
//! is a chain of such adjacent swaps, so scanning every target position of a
//! column costs `O(n)` kernel calls instead of `O(n)` full evaluations.
//!
//! The objective is maintained through a histogram of stage sums, so reading
//! it after a move is `O(1)` amortized.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::{self, Word};
use crate::instance::{Instance, Permutation};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    Leading,
    Trailing,
    Intermediate,
    Consecutive,
}

/// One of the eight per-swap set assignments. `*Cur` targets stage `s`,
/// `*Next` targets stage `s + 1`.
///
/// With `l, i, t, c` the pre-swap sets of stage `s` and `l', i', t', c'`
/// those of stage `s + 1`:
///
/// ```text
/// L[s]   = l' | (l & i') | (l & t')
/// L[s+1] = l & !i' & !t'
/// I[s]   = (t' & i) | (i' & !l)
/// I[s+1] = (l & i') | (i & !t')
/// T[s]   = t' & !i & !l
/// T[s+1] = t | (t' & i) | (t' & l)
/// C[s]   = (c' & !l) | t
/// C[s+1] = (c & !t') | l'
/// ```
///
/// All right-hand sides read a snapshot taken before the swap, so the
/// assignments may be applied in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetUpdate {
    LeadCur,
    LeadNext,
    InterCur,
    InterNext,
    TrailCur,
    TrailNext,
    FillCur,
    FillNext,
}

impl SetUpdate {
    pub const ALL: [SetUpdate; 8] = [
        SetUpdate::LeadCur,
        SetUpdate::LeadNext,
        SetUpdate::InterCur,
        SetUpdate::InterNext,
        SetUpdate::TrailCur,
        SetUpdate::TrailNext,
        SetUpdate::FillCur,
        SetUpdate::FillNext,
    ];

    #[inline]
    fn eval(self, w: &Snapshot) -> Word {
        let Snapshot {
            l0,
            l1,
            i0,
            i1,
            t0,
            t1,
            c0,
            c1,
        } = *w;
        match self {
            SetUpdate::LeadCur => l1 | (l0 & i1) | (l0 & t1),
            SetUpdate::LeadNext => l0 & (!i1 & !t1),
            SetUpdate::InterCur => (t1 & i0) | (i1 & !l0),
            SetUpdate::InterNext => (l0 & i1) | (i0 & !t1),
            SetUpdate::TrailCur => t1 & (!i0 & !l0),
            SetUpdate::TrailNext => t0 | (t1 & i0) | (t1 & l0),
            SetUpdate::FillCur => (c1 & !l0) | t0,
            SetUpdate::FillNext => (c0 & !t1) | l1,
        }
    }

    fn target(self) -> (SetKind, bool) {
        match self {
            SetUpdate::LeadCur => (SetKind::Leading, false),
            SetUpdate::LeadNext => (SetKind::Leading, true),
            SetUpdate::InterCur => (SetKind::Intermediate, false),
            SetUpdate::InterNext => (SetKind::Intermediate, true),
            SetUpdate::TrailCur => (SetKind::Trailing, false),
            SetUpdate::TrailNext => (SetKind::Trailing, true),
            SetUpdate::FillCur => (SetKind::Consecutive, false),
            SetUpdate::FillNext => (SetKind::Consecutive, true),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Snapshot {
    l0: Word,
    l1: Word,
    i0: Word,
    i1: Word,
    t0: Word,
    t1: Word,
    c0: Word,
    c1: Word,
}

/// The `L`, `T`, `I`, `C` bitsets of every stage, stored as four flat word
/// arrays of `stages * words` words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StageSets {
    stages: usize,
    words: usize,
    lead: Vec<Word>,
    trail: Vec<Word>,
    inter: Vec<Word>,
    fill: Vec<Word>,
}

impl StageSets {
    pub fn new(stages: usize, rows: usize) -> Self {
        let words = bitset::words_for(rows);
        let len = stages * words;
        Self {
            stages,
            words,
            lead: vec![0; len],
            trail: vec![0; len],
            inter: vec![0; len],
            fill: vec![0; len],
        }
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn words_per_set(&self) -> usize {
        self.words
    }

    #[inline]
    fn span(&self, stage: usize) -> core::ops::Range<usize> {
        stage * self.words..(stage + 1) * self.words
    }

    fn storage(&self, kind: SetKind) -> &Vec<Word> {
        match kind {
            SetKind::Leading => &self.lead,
            SetKind::Trailing => &self.trail,
            SetKind::Intermediate => &self.inter,
            SetKind::Consecutive => &self.fill,
        }
    }

    fn storage_mut(&mut self, kind: SetKind) -> &mut Vec<Word> {
        match kind {
            SetKind::Leading => &mut self.lead,
            SetKind::Trailing => &mut self.trail,
            SetKind::Intermediate => &mut self.inter,
            SetKind::Consecutive => &mut self.fill,
        }
    }

    pub fn set(&self, kind: SetKind, stage: usize) -> &[Word] {
        &self.storage(kind)[self.span(stage)]
    }

    pub fn contains(&self, kind: SetKind, stage: usize, row: usize) -> bool {
        bitset::test(self.set(kind, stage), row)
    }

    pub fn rows(&self, kind: SetKind, stage: usize) -> Vec<usize> {
        bitset::ones(self.set(kind, stage)).collect()
    }

    fn insert(&mut self, kind: SetKind, stage: usize, row: usize) {
        let span = self.span(stage);
        bitset::set(&mut self.storage_mut(kind)[span], row);
    }

    /// Drops the rows in `mask` from every set of stages `lo..=hi`.
    fn clear_rows(&mut self, lo: usize, hi: usize, mask: &[Word]) {
        for s in lo..=hi {
            let base = s * self.words;
            for (k, &m) in mask.iter().enumerate() {
                self.lead[base + k] &= !m;
                self.trail[base + k] &= !m;
                self.inter[base + k] &= !m;
                self.fill[base + k] &= !m;
            }
        }
    }

    /// Number of active rows whose block covers `stage`.
    pub fn coverage(&self, stage: usize) -> u32 {
        let span = self.span(stage);
        let (l, t, i, c) = (
            &self.lead[span.clone()],
            &self.trail[span.clone()],
            &self.inter[span.clone()],
            &self.fill[span],
        );
        let mut n = 0;
        for k in 0..self.words {
            n += (l[k] | t[k] | i[k] | c[k]).count_ones();
        }
        n
    }

    /// Rewrites stages `s` and `s + 1` as if their columns were exchanged,
    /// applying the eight updates in `order`. Every update reads the
    /// pre-swap words, so any order gives the same result.
    pub fn apply_swap(&mut self, s: usize, order: &[SetUpdate; 8]) {
        let w = self.words;
        let (a, b) = (s * w, (s + 1) * w);
        for k in 0..w {
            let snap = Snapshot {
                l0: self.lead[a + k],
                l1: self.lead[b + k],
                i0: self.inter[a + k],
                i1: self.inter[b + k],
                t0: self.trail[a + k],
                t1: self.trail[b + k],
                c0: self.fill[a + k],
                c1: self.fill[b + k],
            };
            for &up in order {
                let (kind, next) = up.target();
                let idx = if next { b + k } else { a + k };
                self.storage_mut(kind)[idx] = up.eval(&snap);
            }
        }
    }

    /// Fixed-order kernel used on the hot path.
    #[inline]
    fn swap_words(&mut self, s: usize) {
        let w = self.words;
        let (a, b) = (s * w, (s + 1) * w);
        for k in 0..w {
            let (l0, l1) = (self.lead[a + k], self.lead[b + k]);
            let (i0, i1) = (self.inter[a + k], self.inter[b + k]);
            let (t0, t1) = (self.trail[a + k], self.trail[b + k]);
            let (c0, c1) = (self.fill[a + k], self.fill[b + k]);
            self.lead[a + k] = l1 | (l0 & i1) | (l0 & t1);
            self.lead[b + k] = l0 & (!i1 & !t1);
            self.inter[a + k] = (t1 & i0) | (i1 & !l0);
            self.inter[b + k] = (l0 & i1) | (i0 & !t1);
            self.trail[a + k] = t1 & (!i0 & !l0);
            self.trail[b + k] = t0 | (t1 & i0) | (t1 & l0);
            self.fill[a + k] = (c1 & !l0) | t0;
            self.fill[b + k] = (c0 & !t1) | l1;
        }
    }

    /// Writes row `r`'s block for stages `lo..=hi` only, given the row's
    /// extent and current column positions.
    fn paint_row(
        &mut self,
        inst: &Instance,
        perm: &Permutation,
        row: usize,
        (first, last): (usize, usize),
        (lo, hi): (usize, usize),
    ) {
        let from = first.max(lo);
        let to = last.min(hi);
        if from > to {
            return;
        }
        for s in from..=to {
            self.insert(SetKind::Consecutive, s, row);
        }
        for &c in inst.row_cols(row) {
            let p = perm.position_of(c);
            if p < from || p > to {
                continue;
            }
            let span = self.span(p);
            bitset::clear(&mut self.fill[span], row);
            let kind = if p == first {
                SetKind::Leading
            } else if p == last {
                SetKind::Trailing
            } else {
                SetKind::Intermediate
            };
            self.insert(kind, p, row);
        }
    }
}

fn row_extent(inst: &Instance, perm: &Permutation, row: usize) -> (usize, usize) {
    inst.row_cols(row).iter().fold((usize::MAX, 0), |(lo, hi), &c| {
        let p = perm.position_of(c);
        (lo.min(p), hi.max(p))
    })
}

/// Work counters of a delta evaluation state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeltaCounters {
    /// Full set initializations.
    pub set_inits: u64,
    /// Adjacent swap kernels executed, including transient and revert swaps.
    pub adjacent_swaps: u64,
    /// Delta evaluation calls: insertion scans, pair swaps, reversals and
    /// single adjacent swaps requested by a caller.
    pub evaluations: u64,
    /// Moves recorded in the journal.
    pub moves_journaled: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Swap(usize),
    Insert { from: usize, to: usize },
    SwapPair(usize, usize),
    Reverse(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JournalEntry {
    pub mv: Move,
    pub before: u32,
    pub after: u32,
}

/// Delta-evaluation working state for one permutation of one instance.
#[derive(Debug, Clone)]
pub struct EvalState<'a> {
    inst: &'a Instance,
    perm: Permutation,
    sets: StageSets,
    sums: Vec<u32>,
    histogram: Vec<u32>,
    max: u32,
    journal: Vec<JournalEntry>,
    mask: Vec<Word>,
    affected: Vec<usize>,
    counters: DeltaCounters,
}

impl<'a> EvalState<'a> {
    /// Builds all sets for `perm` in `O(nm)`.
    pub fn new(inst: &'a Instance, perm: Permutation) -> Result<Self> {
        check_len(inst, &perm)?;
        let mut st = Self {
            inst,
            sets: StageSets::new(inst.cols(), inst.active_rows()),
            sums: vec![0; inst.cols()],
            histogram: vec![0; inst.rows() + 1],
            max: 0,
            journal: Vec::new(),
            mask: vec![0; bitset::words_for(inst.active_rows())],
            affected: Vec::new(),
            counters: DeltaCounters::default(),
            perm,
        };
        st.init_sets();
        Ok(st)
    }

    /// Re-initializes the state for another permutation, reusing buffers.
    pub fn reset(&mut self, perm: Permutation) -> Result<()> {
        check_len(self.inst, &perm)?;
        self.perm = perm;
        self.sets = StageSets::new(self.inst.cols(), self.inst.active_rows());
        self.journal.clear();
        self.init_sets();
        Ok(())
    }

    fn init_sets(&mut self) {
        self.counters.set_inits += 1;
        let n = self.inst.cols();
        if n == 0 {
            self.histogram.fill(0);
            self.max = 0;
            return;
        }
        for r in 0..self.inst.active_rows() {
            let ext = row_extent(self.inst, &self.perm, r);
            self.sets.paint_row(self.inst, &self.perm, r, ext, (0, n - 1));
        }
        self.histogram.fill(0);
        for s in 0..n {
            let v = self.stage_value(s);
            self.sums[s] = v;
            self.histogram[v as usize] += 1;
        }
        self.max = self.sums.iter().copied().max().unwrap_or(0);
    }

    #[inline]
    fn stage_value(&self, s: usize) -> u32 {
        self.sets.coverage(s) + self.inst.singleton_count(self.perm.column_at(s))
    }

    #[inline]
    fn update_sum(&mut self, s: usize) {
        let new = self.stage_value(s);
        let old = core::mem::replace(&mut self.sums[s], new);
        if old != new {
            self.histogram[old as usize] -= 1;
            self.histogram[new as usize] += 1;
            if new > self.max {
                self.max = new;
            }
        }
    }

    #[inline]
    fn settle_max(&mut self) {
        while self.max > 0 && self.histogram[self.max as usize] == 0 {
            self.max -= 1;
        }
    }

    /// Exchanges stages `s` and `s + 1` without journaling.
    #[inline]
    fn swap_raw(&mut self, s: usize) {
        self.counters.adjacent_swaps += 1;
        self.sets.swap_words(s);
        self.perm.swap_positions(s, s + 1);
        self.update_sum(s);
        self.update_sum(s + 1);
        self.settle_max();
    }

    /// Moves the column at `from` to `to` through adjacent swaps.
    fn shift_raw(&mut self, from: usize, to: usize) {
        if from < to {
            for s in from..to {
                self.swap_raw(s);
            }
        } else {
            for s in (to..from).rev() {
                self.swap_raw(s);
            }
        }
    }

    fn swap_pair_raw(&mut self, p: usize, q: usize) {
        self.shift_raw(p, q);
        self.shift_raw(q - 1, p);
    }

    fn reverse_raw(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.perm.reverse(a, b);
        self.affected.clear();
        for p in a..=b {
            for &r in self.inst.col_rows(self.perm.column_at(p)) {
                if !bitset::test(&self.mask, r) {
                    bitset::set(&mut self.mask, r);
                    self.affected.push(r);
                }
            }
        }
        // Rows without an entry in the segment are either absent from it or
        // fill it entirely with fill-ins; reversing leaves them untouched.
        self.sets.clear_rows(a, b, &self.mask);
        let affected = core::mem::take(&mut self.affected);
        for &r in &affected {
            bitset::clear(&mut self.mask, r);
            let ext = row_extent(self.inst, &self.perm, r);
            self.sets.paint_row(self.inst, &self.perm, r, ext, (a, b));
        }
        self.affected = affected;
        for s in a..=b {
            self.update_sum(s);
        }
        self.settle_max();
    }

    fn apply_raw(&mut self, mv: Move) {
        match mv {
            Move::Swap(s) => self.swap_raw(s),
            Move::Insert { from, to } => self.shift_raw(from, to),
            Move::SwapPair(p, q) => self.swap_pair_raw(p, q),
            Move::Reverse(a, b) => self.reverse_raw(a, b),
        }
    }

    fn undo_raw(&mut self, mv: Move) {
        match mv {
            Move::Swap(s) => self.swap_raw(s),
            Move::Insert { from, to } => self.shift_raw(to, from),
            Move::SwapPair(p, q) => {
                // Replay the adjacent swaps in reverse order; each is an
                // involution.
                for s in p..q - 1 {
                    self.swap_raw(s);
                }
                for s in (p..q).rev() {
                    self.swap_raw(s);
                }
            }
            Move::Reverse(a, b) => self.reverse_raw(a, b),
        }
    }

    fn record(&mut self, mv: Move) -> u32 {
        let before = self.max;
        self.apply_raw(mv);
        self.counters.evaluations += 1;
        self.counters.moves_journaled += 1;
        self.journal.push(JournalEntry {
            mv,
            before,
            after: self.max,
        });
        self.max
    }

    /// Exchanges the columns at stages `s` and `s + 1` and returns the new
    /// objective.
    pub fn swap_adjacent(&mut self, s: usize) -> Result<u32> {
        let n = self.perm.len();
        if s + 1 >= n {
            return Err(Error::StageOutOfRange { stage: s, cols: n });
        }
        Ok(self.record(Move::Swap(s)))
    }

    /// Evaluates every reinsertion of the column at `origin`.
    ///
    /// Targets are visited in a fixed order: `origin + 1 ..= n - 1`
    /// ascending, then `origin - 1 ..= 0` descending. The first target with
    /// the lowest objective wins, and only if it is strictly below the
    /// current objective. On improvement the column is left at the winning
    /// target (journaled as an insertion); otherwise the state is restored
    /// to `origin` exactly. Returns `(position, objective)`.
    pub fn scan_insertions(&mut self, origin: usize) -> Result<(usize, u32)> {
        let n = self.perm.len();
        if origin >= n {
            return Err(Error::StageOutOfRange { stage: origin, cols: n });
        }
        self.counters.evaluations += 1;
        let start = self.max;
        let mut best = (origin, start);
        for s in origin..n - 1 {
            self.swap_raw(s);
            if self.max < best.1 {
                best = (s + 1, self.max);
            }
        }
        for s in (origin..n - 1).rev() {
            self.swap_raw(s);
        }
        for s in (0..origin).rev() {
            self.swap_raw(s);
            if self.max < best.1 {
                best = (s, self.max);
            }
        }
        // The column now sits at stage 0.
        let target = best.0;
        if target < origin {
            self.shift_raw(0, target);
        } else {
            self.shift_raw(0, origin);
            self.shift_raw(origin, target);
        }
        debug_assert_eq!(self.max, best.1);
        if target != origin {
            self.counters.moves_journaled += 1;
            self.journal.push(JournalEntry {
                mv: Move::Insert {
                    from: origin,
                    to: target,
                },
                before: start,
                after: best.1,
            });
        }
        Ok(best)
    }

    /// Moves the column at `from` to `to`, shifting the columns in between.
    pub fn insert(&mut self, from: usize, to: usize) -> Result<u32> {
        let n = self.perm.len();
        if from >= n || to >= n {
            return Err(Error::InvalidRange {
                first: from,
                second: to,
                cols: n,
            });
        }
        Ok(self.record(Move::Insert { from, to }))
    }

    /// Exchanges the columns at positions `p < q` using two chained
    /// insertions (`2(q - p) - 1` adjacent swaps).
    pub fn move_swap_pair(&mut self, p: usize, q: usize) -> Result<u32> {
        let n = self.perm.len();
        if p >= q || q >= n {
            return Err(Error::InvalidRange {
                first: p,
                second: q,
                cols: n,
            });
        }
        Ok(self.record(Move::SwapPair(p, q)))
    }

    /// Reverses positions `a..=b`, rebuilding only the stages inside the
    /// segment and only for rows with an entry in a reversed column.
    pub fn reverse_segment(&mut self, a: usize, b: usize) -> Result<u32> {
        let n = self.perm.len();
        if a > b || b >= n {
            return Err(Error::InvalidRange {
                first: a,
                second: b,
                cols: n,
            });
        }
        Ok(self.record(Move::Reverse(a, b)))
    }

    /// Undoes the most recent journaled move.
    pub fn revert(&mut self) -> Result<u32> {
        let entry = self.journal.pop().ok_or(Error::EmptyJournal)?;
        self.undo_raw(entry.mv);
        debug_assert_eq!(self.max, entry.before);
        Ok(self.max)
    }

    /// Accepts all journaled moves.
    pub fn clear_journal(&mut self) {
        self.journal.clear();
    }

    pub fn journal(&self) -> &[JournalEntry] {
        &self.journal
    }

    #[inline]
    pub fn objective(&self) -> u32 {
        self.max
    }

    /// Objective after the last journaled move minus the objective before
    /// it. Negative means improvement.
    pub fn delta_of_last_move(&self) -> Result<i64> {
        let e = self.journal.last().ok_or(Error::EmptyJournal)?;
        Ok(i64::from(e.after) - i64::from(e.before))
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn sets(&self) -> &StageSets {
        &self.sets
    }

    pub fn stage_sums(&self) -> &[u32] {
        &self.sums
    }

    pub fn histogram(&self) -> &[u32] {
        &self.histogram
    }

    pub fn counters(&self) -> DeltaCounters {
        self.counters
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }
}

fn check_len(inst: &Instance, perm: &Permutation) -> Result<()> {
    if perm.len() != inst.cols() {
        return Err(Error::InvalidPermutation {
            len: perm.len(),
            expected: inst.cols(),
        });
    }
    Ok(())
}
