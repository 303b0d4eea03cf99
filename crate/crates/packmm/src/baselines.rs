//! Reference multiplication engines: classical triple loop, recursive
//! eight-product block splitting, and Strassen's seven-product scheme.
//!
//! These are the correctness oracles for the packed engines and the cost
//! comparison points, so their operation counts follow the textbook forms
//! exactly: classical does n^3 multiplies and n^2*(n-1) adds, the block
//! recursion spends 2n^3 - n^2 total, Strassen does 7^log2(n) multiplies.
//! Arithmetic is checked machine arithmetic; the classical engine escalates a
//! dot product to big-integer accumulation rather than ever overflowing
//! silently.

use crate::apfixed::BigUint;
use crate::costmodel::OpCount;
use crate::matrix::{IntMatrix, MatrixError, SignedMatrix, MAX_SIGNED_DIGITS, MAX_UNSIGNED_DIGITS};

use std::fmt;

/// Errors from the baseline engines.
#[derive(Debug)]
pub enum BaselineError {
    Dimensions { left: (usize, usize), right: (usize, usize) },
    NotSquare { rows: usize, cols: usize },
    NotPowerOfTwo(usize),
    /// A result entry exceeds the representable entry range.
    Overflow { row: usize, col: usize },
    Matrix(MatrixError),
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::Dimensions { left, right } => write!(
                f,
                "cannot multiply {}x{} by {}x{}",
                left.0, left.1, right.0, right.1
            ),
            BaselineError::NotSquare { rows, cols } => {
                write!(f, "block recursion needs square matrices, got {rows}x{cols}")
            }
            BaselineError::NotPowerOfTwo(n) => {
                write!(f, "size {n} is not a power of two (zero-pad first)")
            }
            BaselineError::Overflow { row, col } => {
                write!(f, "result entry ({row},{col}) exceeds the entry range")
            }
            BaselineError::Matrix(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BaselineError {}

impl From<MatrixError> for BaselineError {
    fn from(e: MatrixError) -> Self {
        BaselineError::Matrix(e)
    }
}

fn conformable(
    a_rows: usize,
    a_cols: usize,
    b_rows: usize,
    b_cols: usize,
) -> Result<(), BaselineError> {
    if a_cols != b_rows {
        return Err(BaselineError::Dimensions { left: (a_rows, a_cols), right: (b_rows, b_cols) });
    }
    Ok(())
}

fn square_power_of_two(rows: usize, cols: usize, other: (usize, usize)) -> Result<usize, BaselineError> {
    if rows != cols {
        return Err(BaselineError::NotSquare { rows, cols });
    }
    if other != (rows, cols) {
        return Err(BaselineError::Dimensions { left: (rows, cols), right: other });
    }
    if !rows.is_power_of_two() {
        return Err(BaselineError::NotPowerOfTwo(rows));
    }
    Ok(rows)
}

/// One dot product with overflow escalation: checked i128 first, exact
/// big-integer magnitudes when that saturates. Returns None only when the
/// true value itself does not fit i128.
fn dot(a_row: &[i128], b: &[i128], col: usize, stride: usize) -> Option<i128> {
    let mut sum = 0i128;
    for (kk, &av) in a_row.iter().enumerate() {
        let term = av.checked_mul(b[kk * stride + col])?;
        sum = sum.checked_add(term)?;
    }
    Some(sum)
}

fn dot_big(a_row: &[i128], b: &[i128], col: usize, stride: usize) -> Option<i128> {
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for (kk, &av) in a_row.iter().enumerate() {
        let bv = b[kk * stride + col];
        let magnitude = BigUint::from_u128(av.unsigned_abs()).mul(&BigUint::from_u128(bv.unsigned_abs()));
        if (av < 0) == (bv < 0) {
            pos = pos.add(&magnitude);
        } else {
            neg = neg.add(&magnitude);
        }
    }
    match pos.checked_sub(&neg) {
        Some(diff) => i128::try_from(diff.to_u128()?).ok(),
        None => {
            let diff = neg.checked_sub(&pos).expect("one direction subtracts");
            Some(-i128::try_from(diff.to_u128()?).ok()?)
        }
    }
}

/// Classical triple loop over raw entries; counts k multiplies and k-1 adds
/// per output cell.
fn classical_raw(
    a: &[i128],
    b: &[i128],
    m: usize,
    k: usize,
    p: usize,
    ops: &mut OpCount,
) -> Result<Vec<i128>, BaselineError> {
    let mut out = Vec::with_capacity(m * p);
    for i in 0..m {
        let a_row = &a[i * k..(i + 1) * k];
        for j in 0..p {
            ops.scalar_mul += k as u64;
            ops.scalar_add += k as u64 - 1;
            let cell = dot(a_row, b, j, p)
                .or_else(|| dot_big(a_row, b, j, p))
                .ok_or(BaselineError::Overflow { row: i, col: j })?;
            out.push(cell);
        }
    }
    Ok(out)
}

/// Block recursion with eight products and four block additions per level.
fn binet_raw(a: &[i128], b: &[i128], n: usize, ops: &mut OpCount) -> Result<Vec<i128>, BaselineError> {
    if n == 1 {
        ops.scalar_mul += 1;
        let cell = a[0].checked_mul(b[0]).ok_or(BaselineError::Overflow { row: 0, col: 0 })?;
        return Ok(vec![cell]);
    }
    let half = n / 2;
    let quad = |src: &[i128], qi: usize, qj: usize| -> Vec<i128> {
        let mut out = Vec::with_capacity(half * half);
        for i in 0..half {
            let base = (qi * half + i) * n + qj * half;
            out.extend_from_slice(&src[base..base + half]);
        }
        out
    };
    let (a11, a12, a21, a22) = (quad(a, 0, 0), quad(a, 0, 1), quad(a, 1, 0), quad(a, 1, 1));
    let (b11, b12, b21, b22) = (quad(b, 0, 0), quad(b, 0, 1), quad(b, 1, 0), quad(b, 1, 1));

    let block_add = |x: Vec<i128>, y: Vec<i128>, ops: &mut OpCount| -> Result<Vec<i128>, BaselineError> {
        ops.scalar_add += (half * half) as u64;
        x.iter()
            .zip(&y)
            .map(|(&xv, &yv)| xv.checked_add(yv).ok_or(BaselineError::Overflow { row: 0, col: 0 }))
            .collect()
    };

    let c11 = block_add(binet_raw(&a11, &b11, half, ops)?, binet_raw(&a12, &b21, half, ops)?, ops)?;
    let c12 = block_add(binet_raw(&a11, &b12, half, ops)?, binet_raw(&a12, &b22, half, ops)?, ops)?;
    let c21 = block_add(binet_raw(&a21, &b11, half, ops)?, binet_raw(&a22, &b21, half, ops)?, ops)?;
    let c22 = block_add(binet_raw(&a21, &b12, half, ops)?, binet_raw(&a22, &b22, half, ops)?, ops)?;

    Ok(join_quadrants(&c11, &c12, &c21, &c22, half))
}

fn join_quadrants(q11: &[i128], q12: &[i128], q21: &[i128], q22: &[i128], half: usize) -> Vec<i128> {
    let n = half * 2;
    let mut out = vec![0i128; n * n];
    for i in 0..half {
        for j in 0..half {
            out[i * n + j] = q11[i * half + j];
            out[i * n + j + half] = q12[i * half + j];
            out[(i + half) * n + j] = q21[i * half + j];
            out[(i + half) * n + j + half] = q22[i * half + j];
        }
    }
    out
}

/// Strassen's seven products with the standard recombination; each block-level
/// add or subtract tallies one scalar_add per entry (18 block ops per level).
fn strassen_raw(
    a: &[i128],
    b: &[i128],
    n: usize,
    crossover: usize,
    ops: &mut OpCount,
) -> Result<Vec<i128>, BaselineError> {
    if n == 1 {
        ops.scalar_mul += 1;
        let cell = a[0].checked_mul(b[0]).ok_or(BaselineError::Overflow { row: 0, col: 0 })?;
        return Ok(vec![cell]);
    }
    if n <= crossover {
        return classical_raw(a, b, n, n, n, ops);
    }
    let half = n / 2;
    let quad = |src: &[i128], qi: usize, qj: usize| -> Vec<i128> {
        let mut out = Vec::with_capacity(half * half);
        for i in 0..half {
            let base = (qi * half + i) * n + qj * half;
            out.extend_from_slice(&src[base..base + half]);
        }
        out
    };
    let (a11, a12, a21, a22) = (quad(a, 0, 0), quad(a, 0, 1), quad(a, 1, 0), quad(a, 1, 1));
    let (b11, b12, b21, b22) = (quad(b, 0, 0), quad(b, 0, 1), quad(b, 1, 0), quad(b, 1, 1));

    let overflow = || BaselineError::Overflow { row: 0, col: 0 };
    let combine = |x: &[i128], y: &[i128], sign: i128, ops: &mut OpCount| -> Result<Vec<i128>, BaselineError> {
        ops.scalar_add += (half * half) as u64;
        x.iter()
            .zip(y)
            .map(|(&xv, &yv)| yv.checked_mul(sign).and_then(|s| xv.checked_add(s)).ok_or_else(overflow))
            .collect()
    };
    let add = |x: &[i128], y: &[i128], ops: &mut OpCount| combine(x, y, 1, ops);
    let sub = |x: &[i128], y: &[i128], ops: &mut OpCount| combine(x, y, -1, ops);

    let p1 = strassen_raw(&add(&a11, &a22, ops)?, &add(&b11, &b22, ops)?, half, crossover, ops)?;
    let p2 = strassen_raw(&add(&a21, &a22, ops)?, &b11, half, crossover, ops)?;
    let p3 = strassen_raw(&a11, &sub(&b12, &b22, ops)?, half, crossover, ops)?;
    let p4 = strassen_raw(&a22, &sub(&b21, &b11, ops)?, half, crossover, ops)?;
    let p5 = strassen_raw(&add(&a11, &a12, ops)?, &b22, half, crossover, ops)?;
    let p6 = strassen_raw(&sub(&a21, &a11, ops)?, &add(&b11, &b12, ops)?, half, crossover, ops)?;
    let p7 = strassen_raw(&sub(&a12, &a22, ops)?, &add(&b21, &b22, ops)?, half, crossover, ops)?;

    let c11 = add(&sub(&add(&p1, &p4, ops)?, &p5, ops)?, &p7, ops)?;
    let c12 = add(&p3, &p5, ops)?;
    let c21 = add(&p2, &p4, ops)?;
    let c22 = add(&sub(&add(&p1, &p3, ops)?, &p2, ops)?, &p6, ops)?;

    Ok(join_quadrants(&c11, &c12, &c21, &c22, half))
}

fn unsigned_input(m: &IntMatrix) -> Vec<i128> {
    m.as_slice().iter().map(|&v| v as i128).collect()
}

fn signed_input(m: &SignedMatrix) -> Vec<i128> {
    m.as_slice().iter().map(|&v| v as i128).collect()
}

fn unsigned_output(
    data: Vec<i128>,
    rows: usize,
    cols: usize,
) -> Result<IntMatrix, BaselineError> {
    let mut max = 0u64;
    let mut out = Vec::with_capacity(data.len());
    for (idx, v) in data.into_iter().enumerate() {
        let v = u64::try_from(v)
            .map_err(|_| BaselineError::Overflow { row: idx / cols, col: idx % cols })?;
        max = max.max(v);
        out.push(v);
    }
    let digits = if max == 0 { 1 } else { max.ilog10() + 1 };
    if digits > MAX_UNSIGNED_DIGITS {
        return Err(BaselineError::Overflow { row: 0, col: 0 });
    }
    Ok(IntMatrix::new(rows, cols, digits, out)?)
}

fn signed_output(
    data: Vec<i128>,
    rows: usize,
    cols: usize,
) -> Result<SignedMatrix, BaselineError> {
    let mut max_abs = 0u64;
    let mut out = Vec::with_capacity(data.len());
    for (idx, v) in data.into_iter().enumerate() {
        let v = i64::try_from(v)
            .map_err(|_| BaselineError::Overflow { row: idx / cols, col: idx % cols })?;
        max_abs = max_abs.max(v.unsigned_abs());
        out.push(v);
    }
    let digits = if max_abs == 0 { 1 } else { max_abs.ilog10() + 1 };
    if digits > MAX_SIGNED_DIGITS {
        return Err(BaselineError::Overflow { row: 0, col: 0 });
    }
    Ok(SignedMatrix::new(rows, cols, digits, out)?)
}

/// Classical triple-loop product. Rectangular shapes allowed.
pub fn classical(a: &IntMatrix, b: &IntMatrix) -> Result<(IntMatrix, OpCount), BaselineError> {
    conformable(a.rows(), a.cols(), b.rows(), b.cols())?;
    let mut ops = OpCount::default();
    let data = classical_raw(&unsigned_input(a), &unsigned_input(b), a.rows(), a.cols(), b.cols(), &mut ops)?;
    Ok((unsigned_output(data, a.rows(), b.cols())?, ops))
}

/// Classical triple-loop product on signed matrices.
pub fn classical_signed(
    a: &SignedMatrix,
    b: &SignedMatrix,
) -> Result<(SignedMatrix, OpCount), BaselineError> {
    conformable(a.rows(), a.cols(), b.rows(), b.cols())?;
    let mut ops = OpCount::default();
    let data = classical_raw(&signed_input(a), &signed_input(b), a.rows(), a.cols(), b.cols(), &mut ops)?;
    Ok((signed_output(data, a.rows(), b.cols())?, ops))
}

/// Recursive block multiplication: eight products and four block additions per
/// level, bottoming out at scalars. Square power-of-two sizes only.
pub fn binet_recursive(a: &IntMatrix, b: &IntMatrix) -> Result<(IntMatrix, OpCount), BaselineError> {
    let n = square_power_of_two(a.rows(), a.cols(), (b.rows(), b.cols()))?;
    let mut ops = OpCount::default();
    let data = binet_raw(&unsigned_input(a), &unsigned_input(b), n, &mut ops)?;
    Ok((unsigned_output(data, n, n)?, ops))
}

/// Signed variant of [`binet_recursive`].
pub fn binet_recursive_signed(
    a: &SignedMatrix,
    b: &SignedMatrix,
) -> Result<(SignedMatrix, OpCount), BaselineError> {
    let n = square_power_of_two(a.rows(), a.cols(), (b.rows(), b.cols()))?;
    let mut ops = OpCount::default();
    let data = binet_raw(&signed_input(a), &signed_input(b), n, &mut ops)?;
    Ok((signed_output(data, n, n)?, ops))
}

/// Strassen's algorithm recursing all the way to scalars, so the counts equal
/// the analytic forms (7^log2(n) multiplies). Square power-of-two sizes only.
pub fn strassen(a: &IntMatrix, b: &IntMatrix) -> Result<(IntMatrix, OpCount), BaselineError> {
    strassen_with_crossover(a, b, 1)
}

/// Strassen with a crossover size below which blocks multiply classically;
/// counts then reflect the classical base case.
pub fn strassen_with_crossover(
    a: &IntMatrix,
    b: &IntMatrix,
    crossover: usize,
) -> Result<(IntMatrix, OpCount), BaselineError> {
    let n = square_power_of_two(a.rows(), a.cols(), (b.rows(), b.cols()))?;
    let mut ops = OpCount::default();
    let data = strassen_raw(&unsigned_input(a), &unsigned_input(b), n, crossover.max(1), &mut ops)?;
    Ok((unsigned_output(data, n, n)?, ops))
}

/// Signed variant of [`strassen`].
pub fn strassen_signed(
    a: &SignedMatrix,
    b: &SignedMatrix,
) -> Result<(SignedMatrix, OpCount), BaselineError> {
    let n = square_power_of_two(a.rows(), a.cols(), (b.rows(), b.cols()))?;
    let mut ops = OpCount::default();
    let data = strassen_raw(&signed_input(a), &signed_input(b), n, 1, &mut ops)?;
    Ok((signed_output(data, n, n)?, ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn classical_counts_follow_cubic_law() {
        let a = samples::matrix_a();
        let b = samples::matrix_b();
        let (c, ops) = classical(&a, &b).unwrap();
        assert_eq!(c.as_slice(), samples::product().as_slice());
        assert_eq!(ops.scalar_mul, 512);
        assert_eq!(ops.scalar_add, 448);
        assert_eq!(ops.total(), 960);

        let one = IntMatrix::new(1, 1, 1, vec![7]).unwrap();
        let eight = IntMatrix::new(1, 1, 1, vec![8]).unwrap();
        let (c, ops) = classical(&one, &eight).unwrap();
        assert_eq!(c.get(0, 0), 56);
        assert_eq!(ops.scalar_mul, 1);
        assert_eq!(ops.scalar_add, 0);

        // Rectangular: M*K*P multiplies, M*P*(K-1) adds.
        let ra = IntMatrix::random(3, 5, 2, 61).unwrap();
        let rb = IntMatrix::random(5, 2, 2, 62).unwrap();
        let (_, ops) = classical(&ra, &rb).unwrap();
        assert_eq!(ops.scalar_mul, 30);
        assert_eq!(ops.scalar_add, 24);
    }

    #[test]
    fn classical_rejects_mismatched_shapes() {
        let a = IntMatrix::new(2, 3, 1, vec![0; 6]).unwrap();
        let b = IntMatrix::new(2, 3, 1, vec![0; 6]).unwrap();
        assert!(matches!(classical(&a, &b), Err(BaselineError::Dimensions { .. })));
    }

    #[test]
    fn classical_widens_before_overflowing() {
        // Partial sums exceed i128 midway, yet the true dot product is zero.
        let m = 10i64.pow(18) - 1;
        let mut a_row = vec![m; 400];
        for v in a_row.iter_mut().skip(200) {
            *v = m;
        }
        let mut b_col = vec![m; 400];
        for v in b_col.iter_mut().skip(200) {
            *v = -m;
        }
        let a = SignedMatrix::new(1, 400, 18, a_row).unwrap();
        let b = SignedMatrix::new(400, 1, 18, b_col).unwrap();
        let (c, _) = classical_signed(&a, &b).unwrap();
        assert_eq!(c.get(0, 0), 0);
    }

    #[test]
    fn block_recursion_matches_classical() {
        let a = samples::matrix_a();
        let b = samples::matrix_b();
        let (c, ops) = binet_recursive(&a, &b).unwrap();
        assert_eq!(c.as_slice(), samples::product().as_slice());
        assert_eq!(ops.scalar_mul, 512);
        assert_eq!(ops.scalar_add, 448);
        assert_eq!(ops.total(), 960);

        let one = IntMatrix::new(1, 1, 1, vec![3]).unwrap();
        let (c, ops) = binet_recursive(&one, &one).unwrap();
        assert_eq!(c.get(0, 0), 9);
        assert_eq!(ops.total(), 1);

        let three = IntMatrix::new(3, 3, 1, vec![0; 9]).unwrap();
        assert!(matches!(
            binet_recursive(&three, &three),
            Err(BaselineError::NotPowerOfTwo(3))
        ));
        let rect = IntMatrix::new(2, 4, 1, vec![0; 8]).unwrap();
        let sq = IntMatrix::new(4, 4, 1, vec![0; 16]).unwrap();
        assert!(matches!(
            binet_recursive(&rect, &sq),
            Err(BaselineError::NotSquare { .. })
        ));
    }

    #[test]
    fn strassen_trades_multiplies_for_additions() {
        let a = IntMatrix::random(2, 2, 2, 71).unwrap();
        let b = IntMatrix::random(2, 2, 2, 72).unwrap();
        let (c, ops) = strassen(&a, &b).unwrap();
        let (reference, _) = classical(&a, &b).unwrap();
        assert_eq!(c.as_slice(), reference.as_slice());
        assert_eq!(ops.scalar_mul, 7);
        assert_eq!(ops.scalar_add, 18);

        let a8 = samples::matrix_a();
        let b8 = samples::matrix_b();
        let (c8, ops8) = strassen(&a8, &b8).unwrap();
        assert_eq!(c8.as_slice(), samples::product().as_slice());
        assert_eq!(ops8.scalar_mul, 343);
        assert_eq!(ops8.scalar_add, 6 * (343 - 64));
    }

    #[test]
    fn strassen_crossover_switches_baseline() {
        let a = samples::matrix_a();
        let b = samples::matrix_b();
        let (c, ops) = strassen_with_crossover(&a, &b, 4).unwrap();
        assert_eq!(c.as_slice(), samples::product().as_slice());
        // One recursion level, then 4x4 classical blocks: 7 * 4^3 multiplies.
        assert_eq!(ops.scalar_mul, 7 * 64);
        let (c0, ops0) = strassen_with_crossover(&a, &b, 8).unwrap();
        assert_eq!(c0.as_slice(), samples::product().as_slice());
        assert_eq!(ops0.scalar_mul, 512);
    }

    #[test]
    fn signed_baselines_agree() {
        let a = SignedMatrix::random(8, 8, 2, 81).unwrap();
        let b = SignedMatrix::random(8, 8, 2, 82).unwrap();
        let (classic, _) = classical_signed(&a, &b).unwrap();
        let (binet, _) = binet_recursive_signed(&a, &b).unwrap();
        let (fast, _) = strassen_signed(&a, &b).unwrap();
        assert_eq!(classic.as_slice(), binet.as_slice());
        assert_eq!(classic.as_slice(), fast.as_slice());
    }
}
