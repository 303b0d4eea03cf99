//! A fixed 8x8 single-digit example used across tests and docs.
//!
//! Multiplying [`matrix_a`] by [`matrix_b`] with the recursive engine at base
//! exponent 4 takes exactly 832 counted operations and yields [`product`],
//! whose first row is [116, 130, 204, 133, 221, 171, 109, 120].

use crate::matrix::IntMatrix;

const A: [u64; 64] = [
    8, 8, 5, 0, 0, 4, 8, 0, //
    4, 8, 6, 5, 0, 3, 7, 5, //
    2, 1, 6, 7, 3, 3, 7, 1, //
    2, 7, 3, 7, 0, 3, 1, 4, //
    2, 1, 8, 2, 7, 7, 6, 0, //
    5, 4, 5, 7, 2, 5, 9, 8, //
    6, 6, 4, 5, 7, 6, 4, 7, //
    3, 0, 0, 0, 0, 2, 8, 9,
];

const B: [u64; 64] = [
    4, 1, 4, 4, 6, 3, 2, 2, //
    2, 5, 8, 1, 7, 6, 7, 6, //
    4, 2, 8, 9, 9, 7, 1, 4, //
    6, 3, 6, 9, 0, 5, 1, 7, //
    1, 5, 6, 5, 2, 1, 3, 5, //
    0, 0, 5, 4, 0, 0, 6, 1, //
    6, 9, 6, 4, 9, 8, 1, 4, //
    0, 9, 2, 4, 9, 7, 9, 6,
];

const C: [u64; 64] = [
    116, 130, 204, 133, 221, 171, 109, 120, //
    128, 179, 225, 183, 242, 218, 145, 176, //
    121, 127, 183, 185, 151, 155, 67, 135, //
    82, 109, 159, 137, 133, 140, 118, 138, //
    97, 118, 205, 186, 159, 133, 90, 122, //
    146, 219, 241, 230, 260, 239, 167, 202, //
    113, 193, 244, 214, 227, 195, 187, 198, //
    60, 156, 88, 88, 171, 136, 107, 94,
];

/// The 8x8 single-digit left operand.
pub fn matrix_a() -> IntMatrix {
    IntMatrix::new(8, 8, 1, A.to_vec()).expect("sample A is valid")
}

/// The 8x8 single-digit right operand.
pub fn matrix_b() -> IntMatrix {
    IntMatrix::new(8, 8, 1, B.to_vec()).expect("sample B is valid")
}

/// The exact product `matrix_a() * matrix_b()`.
pub fn product() -> IntMatrix {
    IntMatrix::new(8, 8, 3, C.to_vec()).expect("sample C is valid")
}

/// The recursive-engine operation total for the sample pair.
pub const PRODUCT_OP_TOTAL: u64 = 832;

/// The spacing exponent the sample runs with (epsilon_exponent(9, 9, 8)).
pub const BASE_EXPONENT: u32 = 4;
