//! Descent local searches over a pluggable evaluator.
//!
//! All three procedures draw every random decision from one ChaCha8 stream
//! seeded with the run seed: first the initial permutation, then a fresh move
//! order after every accepted move. Evaluators only answer "is this move
//! strictly improving", so the sequence of tested moves, and therefore the
//! result, does not depend on the backend.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use core::time::Duration;

use crate::delta::EvalState;
use crate::exact::MatrixEvaluator;
use crate::indirect::IndirectEvaluator;
use crate::instance::{Instance, Permutation};
use crate::rng::{self, SearchRng};

/// Work counters common to every backend.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Evaluation calls. Full evaluations for the matrix and indirect
    /// backends; delta calls (one per insertion scan, pair swap or reversal)
    /// for the delta backend.
    pub evaluations: u64,
    pub set_inits: u64,
    pub adjacent_swaps: u64,
}

/// What a descent needs from an evaluation method.
///
/// Every `try_*` call either commits a strictly improving move and returns
/// `true`, or leaves the permutation and objective unchanged.
pub trait Evaluator {
    fn columns(&self) -> usize;

    /// Replaces the current solution.
    fn load(&mut self, perm: Permutation);

    fn objective(&self) -> u32;

    fn permutation(&self) -> &Permutation;

    /// Best reinsertion of the column at `origin`, scanning targets
    /// `origin + 1 .. n` ascending then `origin - 1 ..= 0` descending; the
    /// first target with the lowest value wins if it strictly improves.
    /// Commits and returns `(target, objective)` on improvement.
    fn best_insertion(&mut self, origin: usize) -> Option<(usize, u32)>;

    /// Exchanges the columns at `p < q` if that strictly improves.
    fn try_swap(&mut self, p: usize, q: usize) -> bool;

    /// Reverses positions `a..=b` if that strictly improves.
    fn try_reverse(&mut self, a: usize, b: usize) -> bool;

    fn counters(&self) -> Counters;
}

/// A full-solution evaluation routine.
pub trait FullEvaluation {
    fn evaluate(&mut self, perm: &Permutation) -> u32;
}

impl FullEvaluation for MatrixEvaluator<'_> {
    fn evaluate(&mut self, perm: &Permutation) -> u32 {
        MatrixEvaluator::evaluate(self, perm)
    }
}

impl FullEvaluation for IndirectEvaluator<'_> {
    fn evaluate(&mut self, perm: &Permutation) -> u32 {
        IndirectEvaluator::evaluate(self, perm)
    }
}

/// Backend that applies each candidate move to a permutation and evaluates
/// the result from scratch.
#[derive(Debug, Clone)]
pub struct FullBackend<F> {
    eval: F,
    perm: Permutation,
    value: u32,
    candidate: Permutation,
    calls: u64,
}

impl<F: FullEvaluation> FullBackend<F> {
    pub fn new(eval: F, cols: usize) -> Self {
        Self {
            eval,
            perm: Permutation::identity(cols),
            value: 0,
            candidate: Permutation::identity(cols),
            calls: 0,
        }
    }

    fn evaluate_candidate(&mut self) -> u32 {
        self.calls += 1;
        self.eval.evaluate(&self.candidate)
    }
}

impl<F: FullEvaluation> Evaluator for FullBackend<F> {
    fn columns(&self) -> usize {
        self.perm.len()
    }

    fn load(&mut self, perm: Permutation) {
        self.calls += 1;
        self.value = self.eval.evaluate(&perm);
        self.perm = perm;
    }

    fn objective(&self) -> u32 {
        self.value
    }

    fn permutation(&self) -> &Permutation {
        &self.perm
    }

    fn best_insertion(&mut self, origin: usize) -> Option<(usize, u32)> {
        let n = self.perm.len();
        let mut best = (origin, self.value);
        // Each target differs from the previous one by an adjacent swap of
        // the moving column.
        self.candidate.clone_from(&self.perm);
        for t in origin + 1..n {
            self.candidate.swap_positions(t - 1, t);
            let v = self.evaluate_candidate();
            if v < best.1 {
                best = (t, v);
            }
        }
        self.candidate.clone_from(&self.perm);
        for t in (0..origin).rev() {
            self.candidate.swap_positions(t, t + 1);
            let v = self.evaluate_candidate();
            if v < best.1 {
                best = (t, v);
            }
        }
        if best.0 == origin {
            return None;
        }
        self.perm.move_column(origin, best.0);
        self.value = best.1;
        Some(best)
    }

    fn try_swap(&mut self, p: usize, q: usize) -> bool {
        self.candidate.clone_from(&self.perm);
        self.candidate.swap_positions(p, q);
        let v = self.evaluate_candidate();
        if v < self.value {
            core::mem::swap(&mut self.perm, &mut self.candidate);
            self.value = v;
            true
        } else {
            false
        }
    }

    fn try_reverse(&mut self, a: usize, b: usize) -> bool {
        self.candidate.clone_from(&self.perm);
        self.candidate.reverse(a, b);
        let v = self.evaluate_candidate();
        if v < self.value {
            core::mem::swap(&mut self.perm, &mut self.candidate);
            self.value = v;
            true
        } else {
            false
        }
    }

    fn counters(&self) -> Counters {
        Counters {
            evaluations: self.calls,
            ..Counters::default()
        }
    }
}

pub type MatrixBackend<'a> = FullBackend<MatrixEvaluator<'a>>;
pub type IndirectBackend<'a> = FullBackend<IndirectEvaluator<'a>>;

impl<'a> MatrixBackend<'a> {
    pub fn for_instance(inst: &'a Instance) -> Self {
        FullBackend::new(MatrixEvaluator::new(inst), inst.cols())
    }
}

impl<'a> IndirectBackend<'a> {
    pub fn for_instance(inst: &'a Instance) -> Self {
        FullBackend::new(IndirectEvaluator::new(inst), inst.cols())
    }
}

/// Backend over [`EvalState`]. Sets are built once per loaded solution;
/// rejected moves are undone through the journal.
#[derive(Debug, Clone)]
pub struct DeltaBackend<'a> {
    inst: &'a Instance,
    state: Option<EvalState<'a>>,
    idle: Permutation,
}

impl<'a> DeltaBackend<'a> {
    pub fn for_instance(inst: &'a Instance) -> Self {
        Self {
            inst,
            state: None,
            idle: Permutation::identity(inst.cols()),
        }
    }

    pub fn state(&self) -> Option<&EvalState<'a>> {
        self.state.as_ref()
    }

    fn st(&mut self) -> &mut EvalState<'a> {
        self.state.as_mut().expect("load() must be called first")
    }

    fn settle(&mut self, before: u32) -> bool {
        let st = self.st();
        if st.objective() < before {
            st.clear_journal();
            true
        } else {
            st.revert().expect("move was journaled");
            st.clear_journal();
            false
        }
    }
}

impl Evaluator for DeltaBackend<'_> {
    fn columns(&self) -> usize {
        self.inst.cols()
    }

    fn load(&mut self, perm: Permutation) {
        match &mut self.state {
            Some(st) => st.reset(perm).expect("permutation length"),
            None => self.state = Some(EvalState::new(self.inst, perm).expect("permutation length")),
        }
    }

    fn objective(&self) -> u32 {
        self.state.as_ref().map_or(0, EvalState::objective)
    }

    fn permutation(&self) -> &Permutation {
        self.state.as_ref().map_or(&self.idle, EvalState::permutation)
    }

    fn best_insertion(&mut self, origin: usize) -> Option<(usize, u32)> {
        let st = self.st();
        let (target, value) = st.scan_insertions(origin).expect("origin in range");
        st.clear_journal();
        (target != origin).then_some((target, value))
    }

    fn try_swap(&mut self, p: usize, q: usize) -> bool {
        let before = self.objective();
        self.st().move_swap_pair(p, q).expect("p < q < n");
        self.settle(before)
    }

    fn try_reverse(&mut self, a: usize, b: usize) -> bool {
        let before = self.objective();
        self.st().reverse_segment(a, b).expect("a <= b < n");
        self.settle(before)
    }

    fn counters(&self) -> Counters {
        let c = self.state.as_ref().map(EvalState::counters).unwrap_or_default();
        Counters {
            evaluations: c.evaluations,
            set_inits: c.set_inits,
            adjacent_swaps: c.adjacent_swaps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Procedure {
    BestInsertion,
    TwoSwap,
    TwoOpt,
}

impl Procedure {
    pub const ALL: [Procedure; 3] = [Procedure::BestInsertion, Procedure::TwoSwap, Procedure::TwoOpt];

    pub fn name(self) -> &'static str {
        match self {
            Procedure::BestInsertion => "insertion",
            Procedure::TwoSwap => "swap2",
            Procedure::TwoOpt => "opt2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Matrix,
    Indirect,
    Delta,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Matrix, Backend::Indirect, Backend::Delta];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Matrix => "matrix",
            Backend::Indirect => "indirect",
            Backend::Delta => "delta",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownName(pub alloc::string::String);

impl fmt::Display for UnknownName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown name `{}`", self.0)
    }
}

impl core::error::Error for UnknownName {}

macro_rules! named {
    ($ty:ty) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.pad(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = UnknownName;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                <$ty>::ALL
                    .into_iter()
                    .find(|v| v.name() == s)
                    .ok_or_else(|| UnknownName(s.into()))
            }
        }
    };
}

named!(Procedure);
named!(Backend);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub permutation: Permutation,
    pub objective: u32,
    pub initial_objective: u32,
    /// Accepted moves, each of which restarted the procedure.
    pub improvements: u64,
    pub counters: Counters,
    pub elapsed: Duration,
    pub seed: u64,
}

/// The starting solution of a run: a uniform shuffle of the columns.
pub fn random_initial(inst: &Instance, seed: u64) -> Permutation {
    Permutation::random(inst.cols(), seed)
}

fn start<E: Evaluator>(ev: &mut E, seed: u64) -> (SearchRng, u32) {
    let mut rng = rng::seeded(seed);
    let perm = Permutation::new(rng::shuffled_identity(ev.columns(), &mut rng)).expect("shuffle is a bijection");
    ev.load(perm);
    (rng, ev.objective())
}

fn finish<E: Evaluator>(ev: &E, seed: u64, initial: u32, improvements: u64) -> SearchResult {
    SearchResult {
        permutation: ev.permutation().clone(),
        objective: ev.objective(),
        initial_objective: initial,
        improvements,
        counters: ev.counters(),
        elapsed: Duration::ZERO,
        seed,
    }
}

/// Repeatedly picks columns in random order and moves each to its best
/// position; restarts with a new column order after every improvement and
/// stops after a full pass without one.
pub fn best_insertion_descent<E: Evaluator>(ev: &mut E, seed: u64) -> SearchResult {
    let (mut rng, initial) = start(ev, seed);
    let n = ev.columns();
    let mut improvements = 0;
    'restart: loop {
        let columns = rng::shuffled_identity(n, &mut rng);
        for c in columns {
            let origin = ev.permutation().position_of(c);
            if ev.best_insertion(origin).is_some() {
                improvements += 1;
                continue 'restart;
            }
        }
        break;
    }
    finish(ev, seed, initial, improvements)
}

fn pair_descent<E: Evaluator>(
    ev: &mut E,
    seed: u64,
    mut try_move: impl FnMut(&mut E, usize, usize) -> bool,
) -> SearchResult {
    let (mut rng, initial) = start(ev, seed);
    let n = ev.columns();
    let mut improvements = 0;
    'restart: loop {
        let pairs: Vec<(usize, usize)> = rng::shuffled_pairs(n, &mut rng);
        for (p, q) in pairs {
            if try_move(ev, p, q) {
                improvements += 1;
                continue 'restart;
            }
        }
        break;
    }
    finish(ev, seed, initial, improvements)
}

/// First-improvement exchange of two columns over a shuffled list of all
/// position pairs.
pub fn two_swap_descent<E: Evaluator>(ev: &mut E, seed: u64) -> SearchResult {
    pair_descent(ev, seed, |ev, p, q| ev.try_swap(p, q))
}

/// First-improvement reversal of the segment between two positions over a
/// shuffled list of all position pairs.
pub fn two_opt_descent<E: Evaluator>(ev: &mut E, seed: u64) -> SearchResult {
    pair_descent(ev, seed, |ev, a, b| ev.try_reverse(a, b))
}

pub fn descend<E: Evaluator>(procedure: Procedure, ev: &mut E, seed: u64) -> SearchResult {
    match procedure {
        Procedure::BestInsertion => best_insertion_descent(ev, seed),
        Procedure::TwoSwap => two_swap_descent(ev, seed),
        Procedure::TwoOpt => two_opt_descent(ev, seed),
    }
}

/// Builds the backend and runs the procedure. `now` is sampled before the
/// backend is built and after the search returns; pass `|| Duration::ZERO`
/// when timing is not needed.
pub fn run(
    inst: &Instance,
    procedure: Procedure,
    backend: Backend,
    seed: u64,
    now: impl Fn() -> Duration,
) -> SearchResult {
    let t0 = now();
    let mut result = match backend {
        Backend::Matrix => descend(procedure, &mut MatrixBackend::for_instance(inst), seed),
        Backend::Indirect => descend(procedure, &mut IndirectBackend::for_instance(inst), seed),
        Backend::Delta => descend(procedure, &mut DeltaBackend::for_instance(inst), seed),
    };
    result.elapsed = now().saturating_sub(t0);
    result
}
