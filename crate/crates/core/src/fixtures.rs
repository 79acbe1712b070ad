//! The 6x6 worked example used throughout the tests and documentation.
//!
//! Rows 1..6, columns 1..6 (1-based as printed):
//!
//! ```text
//!     1 2 3 4 5 6
//! 1   1 1 0 0 0 0
//! 2   1 0 1 0 0 0
//! 3   0 0 0 1 1 0
//! 4   0 0 0 1 0 1
//! 5   0 1 0 0 1 0
//! 6   0 0 1 0 0 1
//! ```

use crate::instance::{Instance, Permutation};
use crate::matrix::BinaryMatrix;

pub const EXAMPLE_ROWS: [[u8; 6]; 6] = [
    [1, 1, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 1, 0],
    [0, 0, 0, 1, 0, 1],
    [0, 1, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 1],
];

/// Column order with objective 3 (1-based labels).
pub const EXAMPLE_ORDER_A: [usize; 6] = [5, 2, 4, 6, 3, 1];
/// Column order with objective 6 (1-based labels).
pub const EXAMPLE_ORDER_B: [usize; 6] = [1, 6, 5, 4, 3, 2];

pub fn example_matrix() -> BinaryMatrix {
    BinaryMatrix::from_rows(&EXAMPLE_ROWS)
}

pub fn example_instance() -> Instance {
    Instance::preprocess(&example_matrix())
}

pub fn example_order_a() -> Permutation {
    Permutation::from_one_based(&EXAMPLE_ORDER_A).expect("valid")
}

pub fn example_order_b() -> Permutation {
    Permutation::from_one_based(&EXAMPLE_ORDER_B).expect("valid")
}
