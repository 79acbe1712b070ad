use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("permutation of length {len} is not a bijection on 0..{expected}")]
    InvalidPermutation { len: usize, expected: usize },
    #[error("brute force refused: {cols} columns exceeds the cap of {cap}")]
    BruteForceCap { cols: usize, cap: usize },
    #[error("stage {stage} out of range for {cols} columns")]
    StageOutOfRange { stage: usize, cols: usize },
    #[error("invalid position range {first}..={second} for {cols} columns")]
    InvalidRange { first: usize, second: usize, cols: usize },
    #[error("move journal is empty")]
    EmptyJournal,
    #[error("matrix has {got} cells, expected {rows}x{cols}")]
    MatrixShape { rows: usize, cols: usize, got: usize },
}
