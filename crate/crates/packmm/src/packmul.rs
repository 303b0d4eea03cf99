//! Packed matrix multiplication engines.
//!
//! The trick all of them share: pack several matrix entries into one long
//! decimal scalar, spacing them 10^e apart, so that one scalar multiply
//! computes a whole dot product at once. With entries bounded so that
//! a_max*b_max*n < 10^(e-1), the wanted dot product lands in the digit window
//! just above the decimal point: everything smaller is a strictly fractional
//! tail that floor removes, everything larger is an exact multiple of 10^e
//! that mod removes. The product digits survive both cuts untouched, so the
//! result is exact, not approximate.
//!
//! Two engines implement this at matrix scale. [`mm_flat`] packs whole rows of
//! A (scaled by 10^-e, 10^-2e, ...) and whole columns of B (scaled by 10^e,
//! 10^2e, ...) and does one packed multiply per output cell. [`mm_recursive`]
//! packs half-blocks, recurses on four block products per level, and doubles
//! the spacing exponent and working precision each level down, extracting with
//! floor and mod 10^e at every level on the way back up.

use crate::apfixed::{ApfixedError, BigUint, PackedNumber};
use crate::baselines::{self, BaselineError};
use crate::costmodel::{DigitMeter, OpCount};
use crate::matrix::{IntMatrix, MatrixError, SignedMatrix, MAX_UNSIGNED_DIGITS};

use std::fmt;

/// Errors from the packed engines.
#[derive(Debug)]
pub enum PackMulError {
    /// Inner dimensions do not conform.
    Dimensions { left: (usize, usize), right: (usize, usize) },
    /// The recursive engine needs square operands.
    NotSquare { rows: usize, cols: usize },
    /// The recursive engine needs a power-of-two size (pad first).
    NotPowerOfTwo(usize),
    /// The schedule has fewer levels than the recursion depth requires.
    ScheduleTooShort { needed: u32, have: u32 },
    /// Extraction exponent outside 1..=19 (extracted entries must fit u64).
    ExponentOutOfRange { e: u32 },
    /// The working fraction width would not fit in a u32 digit count.
    ScaleOverflow,
    /// A result entry does not fit the matrix entry range.
    ValueOverflow { row: usize, col: usize },
    Matrix(MatrixError),
    Baseline(BaselineError),
    Arithmetic(ApfixedError),
}

impl fmt::Display for PackMulError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PackMulError::Dimensions { left, right } => write!(
                f,
                "cannot multiply {}x{} by {}x{}",
                left.0, left.1, right.0, right.1
            ),
            PackMulError::NotSquare { rows, cols } => {
                write!(f, "recursive engine needs square matrices, got {rows}x{cols}")
            }
            PackMulError::NotPowerOfTwo(n) => {
                write!(f, "size {n} is not a power of two (zero-pad first)")
            }
            PackMulError::ScheduleTooShort { needed, have } => {
                write!(f, "schedule has {have} levels, recursion needs {needed}")
            }
            PackMulError::ExponentOutOfRange { e } => {
                write!(f, "extraction exponent {e} outside 1..=19")
            }
            PackMulError::ScaleOverflow => write!(f, "working fraction width overflows"),
            PackMulError::ValueOverflow { row, col } => {
                write!(f, "result entry ({row},{col}) does not fit the entry range")
            }
            PackMulError::Matrix(e) => write!(f, "{e}"),
            PackMulError::Baseline(e) => write!(f, "{e}"),
            PackMulError::Arithmetic(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PackMulError {}

impl From<MatrixError> for PackMulError {
    fn from(e: MatrixError) -> Self {
        PackMulError::Matrix(e)
    }
}

impl From<BaselineError> for PackMulError {
    fn from(e: BaselineError) -> Self {
        PackMulError::Baseline(e)
    }
}

impl From<ApfixedError> for PackMulError {
    fn from(e: ApfixedError) -> Self {
        PackMulError::Arithmetic(e)
    }
}

fn check_extraction_exponent(e: u32) -> Result<(), PackMulError> {
    if e == 0 || e > MAX_UNSIGNED_DIGITS {
        return Err(PackMulError::ExponentOutOfRange { e });
    }
    Ok(())
}

/// Smallest safe spacing exponent: e = floor(log10(max(1, a_max*b_max*n))) + 2.
///
/// This guarantees a_max*b_max*n < 10^(e-1), so a packed dot product of length
/// n fits below the next digit slot with a factor-of-ten margin, and the
/// fractional tail Sum a*b*10^(-e*j) stays strictly below 1.
pub fn epsilon_exponent(a_max: u64, b_max: u64, n: u64) -> u32 {
    let product = BigUint::from_u64(a_max)
        .mul(&BigUint::from_u64(b_max))
        .mul(&BigUint::from_u64(n));
    let digits = if product.is_zero() { 1 } else { product.decimal_digits() };
    digits as u32 + 1
}

/// One recursion level of the packed schedule: the spacing exponent used for
/// that level's half-block packing and the fractional working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleLevel {
    pub eps_exponent: u32,
    pub precision: u32,
}

/// Spacing and precision ladder for a recursive run: level 1 packs with
/// exponent e at 2e fractional digits, and each deeper level doubles both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonSchedule {
    e: u32,
    levels: Vec<ScheduleLevel>,
}

impl EpsilonSchedule {
    /// Ladder for an n x n recursive run (n a power of two) with base
    /// exponent e: log2(n) levels with eps_exponent e, 2e, 4e, ... and
    /// precision 2e, 4e, 8e, ...
    pub fn new(e: u32, n: usize) -> Result<Self, PackMulError> {
        if e == 0 {
            return Err(PackMulError::ExponentOutOfRange { e });
        }
        if n == 0 || !n.is_power_of_two() {
            return Err(PackMulError::NotPowerOfTwo(n));
        }
        let depth = n.trailing_zeros();
        let mut levels = Vec::with_capacity(depth as usize);
        let mut eps = e;
        let mut prec = e.checked_mul(2).ok_or(PackMulError::ScaleOverflow)?;
        for _ in 0..depth {
            levels.push(ScheduleLevel { eps_exponent: eps, precision: prec });
            eps = eps.checked_mul(2).ok_or(PackMulError::ScaleOverflow)?;
            prec = prec.checked_mul(2).ok_or(PackMulError::ScaleOverflow)?;
        }
        Ok(EpsilonSchedule { e, levels })
    }

    /// Ladder sized from the actual entry maxima of a square operand pair.
    pub fn for_matrices(a: &IntMatrix, b: &IntMatrix) -> Result<Self, PackMulError> {
        let n = check_square_pair(a, b)?;
        let e = epsilon_exponent(a.max_entry(), b.max_entry(), n as u64);
        Self::new(e, n)
    }

    /// Base spacing exponent e (the extraction modulus is 10^e).
    pub fn base_exponent(&self) -> u32 {
        self.e
    }

    /// Number of recursion levels the ladder covers.
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn levels(&self) -> &[ScheduleLevel] {
        &self.levels
    }
}

fn check_square_pair(a: &IntMatrix, b: &IntMatrix) -> Result<usize, PackMulError> {
    if !a.is_square() {
        return Err(PackMulError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if !b.is_square() || b.rows() != a.rows() {
        return Err(PackMulError::Dimensions {
            left: (a.rows(), a.cols()),
            right: (b.rows(), b.cols()),
        });
    }
    if !a.rows().is_power_of_two() {
        return Err(PackMulError::NotPowerOfTwo(a.rows()));
    }
    Ok(a.rows())
}

/// The scalar packing kernel: floor((a + b*10^-e) * (c + d*10^e)) mod 10^e.
///
/// When the caller has sized e so that ac + bd < 10^e and the cross tail
/// bc*10^-e is below 1, the result is exactly ac + bd. Nothing here checks
/// those preconditions; this is the raw identity the sized engines build on.
pub fn pack_dot(
    a: &PackedNumber,
    b: &PackedNumber,
    c: &PackedNumber,
    d: &PackedNumber,
    e: u32,
) -> Result<BigUint, ApfixedError> {
    let x = a.add(&b.shift_pow10(-(e as i64)))?;
    let y = c.add(&d.shift_pow10(e as i64))?;
    Ok(x.mul(&y)?.floor().mod_pow10(e))
}

struct FlatRun<'m> {
    ops: OpCount,
    meter: Option<&'m mut DigitMeter>,
}

impl FlatRun<'_> {
    fn observe(&mut self, x: &PackedNumber) {
        if let Some(meter) = self.meter.as_deref_mut() {
            meter.observe_packed(x);
        }
    }
}

/// Flat engine: exact product via one packed multiply per output cell.
pub fn mm_flat(a: &IntMatrix, b: &IntMatrix, e: u32) -> Result<IntMatrix, PackMulError> {
    mm_flat_impl(a, b, e, &mut FlatRun { ops: OpCount::default(), meter: None })
}

/// [`mm_flat`] plus the operation tally of the run.
pub fn mm_flat_counted(
    a: &IntMatrix,
    b: &IntMatrix,
    e: u32,
) -> Result<(IntMatrix, OpCount), PackMulError> {
    let mut run = FlatRun { ops: OpCount::default(), meter: None };
    let c = mm_flat_impl(a, b, e, &mut run)?;
    Ok((c, run.ops))
}

/// [`mm_flat_counted`] with operand digit widths recorded into `meter`.
pub fn mm_flat_metered(
    a: &IntMatrix,
    b: &IntMatrix,
    e: u32,
    meter: &mut DigitMeter,
) -> Result<(IntMatrix, OpCount), PackMulError> {
    let mut run = FlatRun { ops: OpCount::default(), meter: Some(meter) };
    let c = mm_flat_impl(a, b, e, &mut run)?;
    Ok((c, run.ops))
}

fn mm_flat_impl(
    a: &IntMatrix,
    b: &IntMatrix,
    e: u32,
    run: &mut FlatRun,
) -> Result<IntMatrix, PackMulError> {
    if a.cols() != b.rows() {
        return Err(PackMulError::Dimensions {
            left: (a.rows(), a.cols()),
            right: (b.rows(), b.cols()),
        });
    }
    check_extraction_exponent(e)?;
    let (m, k, p) = (a.rows(), a.cols(), b.cols());
    // Deepest term sits e*k digits down; one extra e of margin guards the floor.
    let f64_width = (k as u64 + 1) * e as u64;
    let f = u32::try_from(f64_width).map_err(|_| PackMulError::ScaleOverflow)?;

    // Row packs of A: entry (i, kk) scaled by 10^(-e*(kk+1)), summed per row.
    let mut row_packs = Vec::with_capacity(m);
    for i in 0..m {
        row_packs.push(pack_line(a.row(i), f, -(e as i64), run)?);
    }
    // Column packs of B: entry (kk, j) scaled by 10^(e*(kk+1)), summed per column.
    let mut col_packs = Vec::with_capacity(p);
    for j in 0..p {
        let column: Vec<u64> = (0..k).map(|kk| b.get(kk, j)).collect();
        col_packs.push(pack_line(&column, f, e as i64, run)?);
    }

    let mut data = Vec::with_capacity(m * p);
    for row_pack in &row_packs {
        for col_pack in &col_packs {
            let prod = row_pack.mul(col_pack)?;
            run.ops.scalar_mul += 1;
            run.observe(&prod);
            let floored = prod.floor();
            run.ops.floor_ops += 1;
            let cell = floored.mod_pow10(e);
            run.ops.mod_ops += 1;
            data.push(cell.to_u64().expect("value below 10^19 after mod"));
        }
    }
    let digits = entry_digits(data.iter().copied().max().unwrap_or(0))
        .expect("entries below 10^19 after mod");
    Ok(IntMatrix::new(m, p, digits, data)?)
}

/// Scale each entry by 10^(step * (index+1)) and sum: one packed scalar per line.
fn pack_line(
    entries: &[u64],
    f: u32,
    step: i64,
    run: &mut FlatRun,
) -> Result<PackedNumber, PackMulError> {
    let mut acc: Option<PackedNumber> = None;
    for (idx, &entry) in entries.iter().enumerate() {
        let scaled = PackedNumber::from_u64(entry, f).shift_pow10(step * (idx as i64 + 1));
        run.ops.scale_by_eps += 1;
        run.observe(&scaled);
        acc = Some(match acc {
            None => scaled,
            Some(prev) => {
                run.ops.scalar_add += 1;
                prev.add(&scaled)?
            }
        });
    }
    let pack = acc.expect("matrix dimensions are positive");
    run.observe(&pack);
    Ok(pack)
}

/// Recursive block engine: four packed block products per level.
///
/// Level k packs A's horizontal half-blocks as A_left + A_right * 10^(-e_k)
/// and B's vertical half-blocks as B_top + B_bottom * 10^(e_k), recurses on
/// the four row/column combinations, and extracts each reassembled level with
/// floor and mod 10^e (e the base exponent; on non-leaf levels the entries are
/// already reduced, so the extraction is idempotent there). Returns the exact
/// product and the operation tally.
pub fn mm_recursive(
    a: &IntMatrix,
    b: &IntMatrix,
    schedule: &EpsilonSchedule,
) -> Result<(IntMatrix, OpCount), PackMulError> {
    mm_recursive_impl(a, b, schedule, None)
}

/// [`mm_recursive`] with operand digit widths recorded into `meter`.
pub fn mm_recursive_metered(
    a: &IntMatrix,
    b: &IntMatrix,
    schedule: &EpsilonSchedule,
    meter: &mut DigitMeter,
) -> Result<(IntMatrix, OpCount), PackMulError> {
    mm_recursive_impl(a, b, schedule, Some(meter))
}

struct RecRun<'m> {
    levels: Vec<ScheduleLevel>,
    e_base: u32,
    ops: OpCount,
    meter: Option<&'m mut DigitMeter>,
}

impl RecRun<'_> {
    fn observe(&mut self, x: &PackedNumber) {
        if let Some(meter) = self.meter.as_deref_mut() {
            meter.observe_packed(x);
        }
    }
}

/// Square grid of packed scalars, row-major.
struct PackedGrid {
    n: usize,
    cells: Vec<PackedNumber>,
}

impl PackedGrid {
    fn at(&self, i: usize, j: usize) -> &PackedNumber {
        &self.cells[i * self.n + j]
    }
}

fn mm_recursive_impl(
    a: &IntMatrix,
    b: &IntMatrix,
    schedule: &EpsilonSchedule,
    meter: Option<&mut DigitMeter>,
) -> Result<(IntMatrix, OpCount), PackMulError> {
    let n = check_square_pair(a, b)?;
    let e = schedule.base_exponent();
    check_extraction_exponent(e)?;
    let depth = n.trailing_zeros();
    if schedule.depth() < depth {
        return Err(PackMulError::ScheduleTooShort { needed: depth, have: schedule.depth() });
    }

    let mut run = RecRun {
        levels: schedule.levels().to_vec(),
        e_base: e,
        ops: OpCount::default(),
        meter,
    };

    if n == 1 {
        let product = a.get(0, 0) as u128 * b.get(0, 0) as u128;
        run.ops.scalar_mul += 1;
        if let Some(m) = run.meter.as_deref_mut() {
            m.observe_digits(BigUint::from_u128(product).decimal_digits());
        }
        let cell = (product % 10u128.pow(e)) as u64;
        let digits = entry_digits(cell).expect("entry below 10^19 after mod");
        return Ok((IntMatrix::new(1, 1, digits, vec![cell])?, run.ops));
    }

    let grid_a = PackedGrid {
        n,
        cells: a.as_slice().iter().map(|&v| PackedNumber::from_u64(v, 0)).collect(),
    };
    let grid_b = PackedGrid {
        n,
        cells: b.as_slice().iter().map(|&v| PackedNumber::from_u64(v, 0)).collect(),
    };
    let cells = recurse(&grid_a, &grid_b, 0, &mut run)?;
    let digits = entry_digits(cells.iter().copied().max().unwrap_or(0))
        .expect("entries below 10^19 after mod");
    Ok((IntMatrix::new(n, n, digits, cells)?, run.ops))
}

/// One level of the block recursion; `level` indexes the schedule ladder.
/// Inputs arrive at the previous level's precision and are widened here.
fn recurse(
    a: &PackedGrid,
    b: &PackedGrid,
    level: usize,
    run: &mut RecRun,
) -> Result<Vec<u64>, PackMulError> {
    let m = a.n;
    let half = m / 2;
    let lev = run.levels[level];
    let f = lev.precision;
    let ek = lev.eps_exponent as i64;

    // Pack half-blocks: one scale and one add per target cell.
    let pack_pair = |lead: &PackedNumber,
                         trail: &PackedNumber,
                         shift: i64,
                         run: &mut RecRun|
     -> Result<PackedNumber, PackMulError> {
        let scaled = trail.widen(f)?.shift_pow10(shift);
        run.ops.scale_by_eps += 1;
        run.observe(&scaled);
        let packed = lead.widen(f)?.add(&scaled)?;
        run.ops.scalar_add += 1;
        run.observe(&packed);
        Ok(packed)
    };

    let mut rows_left = Vec::with_capacity(half * half);
    let mut rows_right = Vec::with_capacity(half * half);
    let mut cols_top = Vec::with_capacity(half * half);
    let mut cols_bottom = Vec::with_capacity(half * half);
    for i in 0..half {
        for j in 0..half {
            rows_left.push(pack_pair(a.at(i, j), a.at(i, j + half), -ek, run)?);
            rows_right.push(pack_pair(a.at(i + half, j), a.at(i + half, j + half), -ek, run)?);
            cols_top.push(pack_pair(b.at(i, j), b.at(i + half, j), ek, run)?);
            cols_bottom.push(pack_pair(b.at(i, j + half), b.at(i + half, j + half), ek, run)?);
        }
    }
    let r1 = PackedGrid { n: half, cells: rows_left };
    let r2 = PackedGrid { n: half, cells: rows_right };
    let c1 = PackedGrid { n: half, cells: cols_top };
    let c2 = PackedGrid { n: half, cells: cols_bottom };

    let e = run.e_base;
    if m == 2 {
        // Leaf: four scalar products, then extract the assembled 2x2 block.
        let quadrant = |x: &PackedGrid, y: &PackedGrid, run: &mut RecRun| {
            let prod = x.at(0, 0).mul(y.at(0, 0))?;
            run.ops.scalar_mul += 1;
            run.observe(&prod);
            Ok::<PackedNumber, PackMulError>(prod)
        };
        let products = [
            quadrant(&r1, &c1, run)?,
            quadrant(&r1, &c2, run)?,
            quadrant(&r2, &c1, run)?,
            quadrant(&r2, &c2, run)?,
        ];
        let mut cells = Vec::with_capacity(4);
        for prod in &products {
            let floored = prod.floor();
            run.ops.floor_ops += 1;
            let cell = floored.mod_pow10(e);
            run.ops.mod_ops += 1;
            cells.push(cell.to_u64().expect("value below 10^19 after mod"));
        }
        return Ok(cells);
    }

    let q11 = recurse(&r1, &c1, level + 1, run)?;
    let q12 = recurse(&r1, &c2, level + 1, run)?;
    let q21 = recurse(&r2, &c1, level + 1, run)?;
    let q22 = recurse(&r2, &c2, level + 1, run)?;

    // Reassemble and apply the listing's floor + mod pass; entries coming back
    // from below are already reduced, so both are identities here, but they
    // are part of the level's work and are counted as such.
    let modulus = 10u64.pow(e);
    let mut cells = vec![0u64; m * m];
    for i in 0..half {
        for j in 0..half {
            cells[i * m + j] = q11[i * half + j];
            cells[i * m + j + half] = q12[i * half + j];
            cells[(i + half) * m + j] = q21[i * half + j];
            cells[(i + half) * m + j + half] = q22[i * half + j];
        }
    }
    for cell in &mut cells {
        run.ops.floor_ops += 1;
        *cell %= modulus;
        run.ops.mod_ops += 1;
    }
    Ok(cells)
}

/// A nonnegative fixed-point matrix: integer entries with a declared number of
/// fractional digits, so the represented values are entry * 10^(-frac_digits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointMatrix {
    matrix: IntMatrix,
    frac_digits: u32,
}

impl FixedPointMatrix {
    pub fn new(matrix: IntMatrix, frac_digits: u32) -> Self {
        FixedPointMatrix { matrix, frac_digits }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn frac_digits(&self) -> u32 {
        self.frac_digits
    }
}

/// Exact product of multi-digit (optionally fixed-point) matrices by digit
/// decomposition: split each operand into single-digit planes, multiply every
/// plane pair with the flat engine, recombine with powers of ten. The
/// fractional offsets add.
pub fn multiply_fixed_point(
    a: &FixedPointMatrix,
    b: &FixedPointMatrix,
) -> Result<FixedPointMatrix, PackMulError> {
    let (am, bm) = (&a.matrix, &b.matrix);
    if am.cols() != bm.rows() {
        return Err(PackMulError::Dimensions {
            left: (am.rows(), am.cols()),
            right: (bm.rows(), bm.cols()),
        });
    }
    let (m, k, p) = (am.rows(), am.cols(), bm.cols());
    let e = epsilon_exponent(9, 9, k as u64);

    let digit_plane = |src: &IntMatrix, digit: u32| -> Result<IntMatrix, MatrixError> {
        let shift = 10u64.pow(digit);
        let data = src.as_slice().iter().map(|&v| v / shift % 10).collect();
        IntMatrix::new(src.rows(), src.cols(), 1, data)
    };

    let planes_b = (0..bm.digits()).map(|j| digit_plane(bm, j)).collect::<Result<Vec<_>, _>>()?;
    let mut acc = vec![0u128; m * p];
    for i in 0..am.digits() {
        let plane_a = digit_plane(am, i)?;
        for (j, plane_b) in planes_b.iter().enumerate() {
            let j = j as u32;
            let partial = mm_flat(&plane_a, plane_b, e)?;
            let weight = 10u128.pow(i + j);
            for (idx, acc_cell) in acc.iter_mut().enumerate() {
                let term = (partial.as_slice()[idx] as u128)
                    .checked_mul(weight)
                    .and_then(|t| acc_cell.checked_add(t));
                *acc_cell = term.ok_or(PackMulError::ValueOverflow {
                    row: idx / p,
                    col: idx % p,
                })?;
            }
        }
    }

    let mut data = Vec::with_capacity(m * p);
    for (idx, &v) in acc.iter().enumerate() {
        data.push(u64::try_from(v).map_err(|_| PackMulError::ValueOverflow {
            row: idx / p,
            col: idx % p,
        })?);
    }
    let digits = entry_digits(data.iter().copied().max().unwrap_or(0))
        .ok_or(PackMulError::ValueOverflow { row: 0, col: 0 })?;
    Ok(FixedPointMatrix {
        matrix: IntMatrix::new(m, p, digits, data)?,
        frac_digits: a.frac_digits + b.frac_digits,
    })
}

/// Digit budget for a maximum entry, or None above the u64-safe bound.
fn entry_digits(max: u64) -> Option<u32> {
    let digits = if max == 0 { 1 } else { max.ilog10() + 1 };
    (digits <= MAX_UNSIGNED_DIGITS).then_some(digits)
}

/// Exact product of signed matrices via an offset shift into the nonnegative
/// range: with alpha = -min(0, min A) and beta = -min(0, min B), multiply
/// A' = A + alpha*J and B' = B + beta*J with the flat engine, then undo the
/// shift with row/column sums: AB = A'B' - alpha*J*B' - beta*A'*J + alpha*beta*J*J.
pub fn mm_signed(a: &SignedMatrix, b: &SignedMatrix) -> Result<SignedMatrix, PackMulError> {
    if a.cols() != b.rows() {
        return Err(PackMulError::Dimensions {
            left: (a.rows(), a.cols()),
            right: (b.rows(), b.cols()),
        });
    }
    let (m, k, p) = (a.rows(), a.cols(), b.cols());
    let alpha = (-a.min_entry().min(0)) as u64;
    let beta = (-b.min_entry().min(0)) as u64;

    let shift_up = |src: &SignedMatrix, offset: u64| -> Result<IntMatrix, PackMulError> {
        let data: Vec<u64> = src.as_slice().iter().map(|&v| (v as i128 + offset as i128) as u64).collect();
        let digits = entry_digits(data.iter().copied().max().unwrap_or(0))
            .ok_or(PackMulError::ValueOverflow { row: 0, col: 0 })?;
        Ok(IntMatrix::new(src.rows(), src.cols(), digits, data)?)
    };
    let a_shifted = shift_up(a, alpha)?;
    let b_shifted = shift_up(b, beta)?;

    let e = epsilon_exponent(a_shifted.max_entry(), b_shifted.max_entry(), k as u64);
    let raw = mm_flat(&a_shifted, &b_shifted, e)?;

    let row_sums: Vec<u128> =
        (0..m).map(|i| a_shifted.row(i).iter().map(|&v| v as u128).sum()).collect();
    let col_sums: Vec<u128> =
        (0..p).map(|j| (0..k).map(|kk| b_shifted.get(kk, j) as u128).sum()).collect();
    let cross = alpha as u128 * beta as u128 * k as u128;

    let mut data = Vec::with_capacity(m * p);
    let mut max_abs: u64 = 0;
    for (i, &row_sum) in row_sums.iter().enumerate() {
        for (j, &col_sum) in col_sums.iter().enumerate() {
            let value = raw.get(i, j) as i128 - (alpha as u128 * col_sum) as i128
                - (beta as u128 * row_sum) as i128
                + cross as i128;
            let value =
                i64::try_from(value).map_err(|_| PackMulError::ValueOverflow { row: i, col: j })?;
            max_abs = max_abs.max(value.unsigned_abs());
            data.push(value);
        }
    }
    let digits = entry_digits(max_abs)
        .filter(|&d| d <= crate::matrix::MAX_SIGNED_DIGITS)
        .ok_or(PackMulError::ValueOverflow { row: 0, col: 0 })?;
    Ok(SignedMatrix::new(m, p, digits, data)?)
}

/// Result of checking a candidate product against the classical baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub exact: bool,
    pub max_abs_diff: u128,
}

/// Recompute `a * b` with the classical baseline and compare elementwise.
pub fn verify_exact(
    a: &IntMatrix,
    b: &IntMatrix,
    candidate: &IntMatrix,
) -> Result<VerifyOutcome, PackMulError> {
    let (reference, _) = baselines::classical(a, b)?;
    if candidate.rows() != reference.rows() || candidate.cols() != reference.cols() {
        return Err(PackMulError::Dimensions {
            left: (reference.rows(), reference.cols()),
            right: (candidate.rows(), candidate.cols()),
        });
    }
    let max_abs_diff = reference
        .as_slice()
        .iter()
        .zip(candidate.as_slice())
        .map(|(&r, &c)| r.abs_diff(c) as u128)
        .max()
        .unwrap_or(0);
    Ok(VerifyOutcome { exact: max_abs_diff == 0, max_abs_diff })
}

/// Signed-matrix variant of [`verify_exact`].
pub fn verify_exact_signed(
    a: &SignedMatrix,
    b: &SignedMatrix,
    candidate: &SignedMatrix,
) -> Result<VerifyOutcome, PackMulError> {
    let (reference, _) = baselines::classical_signed(a, b)?;
    if candidate.rows() != reference.rows() || candidate.cols() != reference.cols() {
        return Err(PackMulError::Dimensions {
            left: (reference.rows(), reference.cols()),
            right: (candidate.rows(), candidate.cols()),
        });
    }
    let max_abs_diff = reference
        .as_slice()
        .iter()
        .zip(candidate.as_slice())
        .map(|(&r, &c)| (r as i128).abs_diff(c as i128))
        .max()
        .unwrap_or(0);
    Ok(VerifyOutcome { exact: max_abs_diff == 0, max_abs_diff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::measure_digits;
    use crate::samples;

    #[test]
    fn exponent_sizing() {
        assert_eq!(epsilon_exponent(9, 9, 8), 4);
        assert_eq!(epsilon_exponent(1, 1, 1), 2);
        assert_eq!(epsilon_exponent(99, 99, 16), 7);
        assert_eq!(epsilon_exponent(0, 9, 5), 2);
        // The defining margin: a_max * b_max * n < 10^(e-1).
        for (a, b, n) in [(9u64, 9, 8), (99, 99, 16), (999, 1, 77), (1, 1, 1)] {
            let e = epsilon_exponent(a, b, n);
            assert!((a as u128) * (b as u128) * (n as u128) < 10u128.pow(e - 1));
        }
    }

    #[test]
    fn schedule_ladder_doubles() {
        let sched = EpsilonSchedule::new(4, 8).unwrap();
        assert_eq!(sched.base_exponent(), 4);
        assert_eq!(sched.depth(), 3);
        let levels = sched.levels();
        assert_eq!(levels[0], ScheduleLevel { eps_exponent: 4, precision: 8 });
        assert_eq!(levels[1], ScheduleLevel { eps_exponent: 8, precision: 16 });
        assert_eq!(levels[2], ScheduleLevel { eps_exponent: 16, precision: 32 });
        for pair in levels.windows(2) {
            assert_eq!(pair[1].eps_exponent, 2 * pair[0].eps_exponent);
            assert_eq!(pair[1].precision, 2 * pair[0].precision);
        }
        assert_eq!(EpsilonSchedule::new(3, 1).unwrap().depth(), 0);
        assert!(matches!(EpsilonSchedule::new(0, 8), Err(PackMulError::ExponentOutOfRange { e: 0 })));
        assert!(matches!(EpsilonSchedule::new(4, 12), Err(PackMulError::NotPowerOfTwo(12))));
        assert!(matches!(EpsilonSchedule::new(4, 0), Err(PackMulError::NotPowerOfTwo(0))));
    }

    #[test]
    fn pack_dot_identity() {
        let f = 8;
        let num = |v: u64| PackedNumber::from_u64(v, f);
        let dot = pack_dot(&num(3), &num(4), &num(5), &num(6), 4).unwrap();
        assert_eq!(dot.to_u64(), Some(39));
        let zero = pack_dot(&num(0), &num(0), &num(0), &num(0), 7).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn pack_dot_on_composite_operands() {
        // Already-packed four-entry operands pass through the same identity:
        // the 8x8 sample's first leaf product extracts to 116.
        let a_side = PackedNumber::from_decimal_str("8.00000005000800080004").unwrap();
        let b_side = PackedNumber::from_decimal_str("6000000020006000400010004").unwrap().widen(20).unwrap();
        let zero = PackedNumber::zero(20);
        let cell = pack_dot(&a_side, &zero, &b_side, &zero, 4).unwrap();
        assert_eq!(cell.to_u64(), Some(116));
    }

    #[test]
    fn recursive_engine_reproduces_sample() {
        let a = samples::matrix_a();
        let b = samples::matrix_b();
        let sched = EpsilonSchedule::for_matrices(&a, &b).unwrap();
        assert_eq!(sched.base_exponent(), samples::BASE_EXPONENT);
        let (c, ops) = mm_recursive(&a, &b, &sched).unwrap();
        assert_eq!(c.as_slice(), samples::product().as_slice());
        assert_eq!(ops.total(), samples::PRODUCT_OP_TOTAL);
        assert_eq!(ops.scalar_mul, 64);
        assert_eq!(ops.scalar_add, 192);
        assert_eq!(ops.scale_by_eps, 192);
        assert_eq!(ops.floor_ops, 192);
        assert_eq!(ops.mod_ops, 192);
    }

    #[test]
    fn recursive_engine_small_cases() {
        let id = IntMatrix::new(2, 2, 1, vec![1, 0, 0, 1]).unwrap();
        let sched = EpsilonSchedule::for_matrices(&id, &id).unwrap();
        let (c, ops) = mm_recursive(&id, &id, &sched).unwrap();
        assert_eq!(c.as_slice(), id.as_slice());
        assert_eq!(ops.total(), 20);

        let a = IntMatrix::new(1, 1, 1, vec![7]).unwrap();
        let b = IntMatrix::new(1, 1, 1, vec![8]).unwrap();
        let sched = EpsilonSchedule::for_matrices(&a, &b).unwrap();
        let (c, ops) = mm_recursive(&a, &b, &sched).unwrap();
        assert_eq!(c.get(0, 0), 56);
        assert_eq!(ops.total(), 1);

        let a = IntMatrix::random(4, 4, 1, 11).unwrap();
        let b = IntMatrix::random(4, 4, 1, 12).unwrap();
        let sched = EpsilonSchedule::for_matrices(&a, &b).unwrap();
        let (c, ops) = mm_recursive(&a, &b, &sched).unwrap();
        let (reference, _) = baselines::classical(&a, &b).unwrap();
        assert_eq!(c.as_slice(), reference.as_slice());
        assert_eq!(ops.total(), 144);
    }

    #[test]
    fn recursive_engine_rejects_bad_shapes() {
        let sched = EpsilonSchedule::new(4, 8).unwrap();
        let rect = IntMatrix::new(2, 4, 1, vec![0; 8]).unwrap();
        let square = IntMatrix::new(4, 4, 1, vec![0; 16]).unwrap();
        assert!(matches!(
            mm_recursive(&rect, &square, &sched),
            Err(PackMulError::NotSquare { .. })
        ));
        let three = IntMatrix::new(3, 3, 1, vec![0; 9]).unwrap();
        assert!(matches!(
            mm_recursive(&three, &three, &sched),
            Err(PackMulError::NotPowerOfTwo(3))
        ));
        let sixteen = IntMatrix::new(16, 16, 1, vec![0; 256]).unwrap();
        let short = EpsilonSchedule::new(4, 8).unwrap();
        assert!(matches!(
            mm_recursive(&sixteen, &sixteen, &short),
            Err(PackMulError::ScheduleTooShort { needed: 4, have: 3 })
        ));
        assert!(matches!(
            mm_recursive(&square, &sixteen, &sched),
            Err(PackMulError::Dimensions { .. })
        ));
    }

    #[test]
    fn flat_engine_matches_sample_and_oracle() {
        let a = samples::matrix_a();
        let b = samples::matrix_b();
        let c = mm_flat(&a, &b, 4).unwrap();
        assert_eq!(c.as_slice(), samples::product().as_slice());

        let a = IntMatrix::new(1, 1, 1, vec![7]).unwrap();
        let b = IntMatrix::new(1, 1, 1, vec![8]).unwrap();
        assert_eq!(mm_flat(&a, &b, 2).unwrap().get(0, 0), 56);

        let a = IntMatrix::random(3, 5, 2, 21).unwrap();
        let b = IntMatrix::random(5, 2, 2, 22).unwrap();
        let e = epsilon_exponent(a.max_entry(), b.max_entry(), 5);
        let c = mm_flat(&a, &b, e).unwrap();
        let (reference, _) = baselines::classical(&a, &b).unwrap();
        assert_eq!(c.as_slice(), reference.as_slice());
    }

    #[test]
    fn flat_engine_counts_and_errors() {
        let a = samples::matrix_a();
        let b = samples::matrix_b();
        let (c, ops) = mm_flat_counted(&a, &b, 4).unwrap();
        assert_eq!(c.as_slice(), samples::product().as_slice());
        // M=K=P=8: 2*64 scales, 2*8*7 adds, 64 each of mul/floor/mod.
        assert_eq!(ops.scale_by_eps, 128);
        assert_eq!(ops.scalar_add, 112);
        assert_eq!(ops.scalar_mul, 64);
        assert_eq!(ops.floor_ops, 64);
        assert_eq!(ops.mod_ops, 64);

        let rect = IntMatrix::new(2, 3, 1, vec![0; 6]).unwrap();
        assert!(matches!(
            mm_flat(&rect, &rect, 4),
            Err(PackMulError::Dimensions { .. })
        ));
        assert!(matches!(
            mm_flat(&a, &b, 0),
            Err(PackMulError::ExponentOutOfRange { e: 0 })
        ));
        assert!(matches!(
            mm_flat(&a, &b, 25),
            Err(PackMulError::ExponentOutOfRange { e: 25 })
        ));
    }

    #[test]
    fn padding_is_neutral() {
        let a = IntMatrix::random(3, 5, 1, 31).unwrap();
        let b = IntMatrix::random(5, 6, 1, 32).unwrap();
        let e = epsilon_exponent(a.max_entry(), b.max_entry(), 5);
        let unpadded = mm_flat(&a, &b, e).unwrap();

        let padded = mm_flat(&a.pad_to(8).unwrap(), &b.pad_to(8).unwrap(), e).unwrap();
        assert_eq!(padded.crop(3, 6).unwrap().as_slice(), unpadded.as_slice());

        let ap = a.pad_to(8).unwrap();
        let bp = b.pad_to(8).unwrap();
        let sched = EpsilonSchedule::new(e, 8).unwrap();
        let (rec, _) = mm_recursive(&ap, &bp, &sched).unwrap();
        assert_eq!(rec.crop(3, 6).unwrap().as_slice(), unpadded.as_slice());
    }

    #[test]
    fn fixed_point_decomposition() {
        let a = FixedPointMatrix::new(IntMatrix::new(1, 1, 2, vec![12]).unwrap(), 0);
        let b = FixedPointMatrix::new(IntMatrix::new(1, 1, 2, vec![34]).unwrap(), 0);
        let c = multiply_fixed_point(&a, &b).unwrap();
        assert_eq!(c.matrix().get(0, 0), 408);
        assert_eq!(c.frac_digits(), 0);

        // Single-digit inputs degenerate to one flat product.
        let a1 = IntMatrix::random(4, 4, 1, 41).unwrap();
        let b1 = IntMatrix::random(4, 4, 1, 42).unwrap();
        let via_planes =
            multiply_fixed_point(&FixedPointMatrix::new(a1.clone(), 0), &FixedPointMatrix::new(b1.clone(), 0))
                .unwrap();
        let e = epsilon_exponent(a1.max_entry(), b1.max_entry(), 4);
        assert_eq!(via_planes.matrix().as_slice(), mm_flat(&a1, &b1, e).unwrap().as_slice());

        // Fractional offsets add; scaled integers stay exact.
        let a3 = IntMatrix::random(4, 4, 3, 43).unwrap();
        let b3 = IntMatrix::random(4, 4, 3, 44).unwrap();
        let c3 = multiply_fixed_point(
            &FixedPointMatrix::new(a3.clone(), 1),
            &FixedPointMatrix::new(b3.clone(), 2),
        )
        .unwrap();
        assert_eq!(c3.frac_digits(), 3);
        let (reference, _) = baselines::classical(&a3, &b3).unwrap();
        assert_eq!(c3.matrix().as_slice(), reference.as_slice());
    }

    #[test]
    fn signed_offset_transform() {
        let a = SignedMatrix::new(2, 2, 1, vec![-1, 2, 3, -4]).unwrap();
        let b = SignedMatrix::new(2, 2, 1, vec![5, -6, -7, 8]).unwrap();
        let c = mm_signed(&a, &b).unwrap();
        assert_eq!(c.as_slice(), &[-19, 22, 43, -50]);

        let nonneg_a = SignedMatrix::new(2, 3, 1, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let nonneg_b = SignedMatrix::new(3, 2, 1, vec![6, 5, 4, 3, 2, 1]).unwrap();
        let c = mm_signed(&nonneg_a, &nonneg_b).unwrap();
        let ua = IntMatrix::new(2, 3, 1, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let ub = IntMatrix::new(3, 2, 1, vec![6, 5, 4, 3, 2, 1]).unwrap();
        let uc = mm_flat(&ua, &ub, epsilon_exponent(6, 6, 3)).unwrap();
        let as_unsigned: Vec<u64> = c.as_slice().iter().map(|&v| v as u64).collect();
        assert_eq!(as_unsigned, uc.as_slice());

        let ra = SignedMatrix::random(8, 8, 2, 51).unwrap();
        let rb = SignedMatrix::random(8, 8, 2, 52).unwrap();
        let rc = mm_signed(&ra, &rb).unwrap();
        let (reference, _) = baselines::classical_signed(&ra, &rb).unwrap();
        assert_eq!(rc.as_slice(), reference.as_slice());
    }

    #[test]
    fn verification_against_classical() {
        let a = samples::matrix_a();
        let b = samples::matrix_b();
        let good = verify_exact(&a, &b, &samples::product()).unwrap();
        assert_eq!(good, VerifyOutcome { exact: true, max_abs_diff: 0 });

        let mut perturbed: Vec<u64> = samples::product().as_slice().to_vec();
        perturbed[9] += 1;
        let bad_c = IntMatrix::new(8, 8, 3, perturbed).unwrap();
        let bad = verify_exact(&a, &b, &bad_c).unwrap();
        assert_eq!(bad, VerifyOutcome { exact: false, max_abs_diff: 1 });

        let wrong_shape = IntMatrix::new(2, 2, 1, vec![0; 4]).unwrap();
        assert!(verify_exact(&a, &b, &wrong_shape).is_err());

        let sa = SignedMatrix::new(2, 2, 1, vec![-1, 2, 3, -4]).unwrap();
        let sb = SignedMatrix::new(2, 2, 1, vec![5, -6, -7, 8]).unwrap();
        let sc = mm_signed(&sa, &sb).unwrap();
        assert!(verify_exact_signed(&sa, &sb, &sc).unwrap().exact);
    }

    #[test]
    fn undersized_exponent_fails_verification() {
        let a = samples::matrix_a();
        let b = samples::matrix_b();
        let c = mm_flat(&a, &b, 2).unwrap();
        let outcome = verify_exact(&a, &b, &c).unwrap();
        assert!(!outcome.exact);
        assert!(outcome.max_abs_diff > 0);
    }

    #[test]
    fn meters_observe_operand_widths() {
        let a = samples::matrix_a();
        let b = samples::matrix_b();
        let mut meter = DigitMeter::new();
        let sched = EpsilonSchedule::for_matrices(&a, &b).unwrap();
        mm_recursive_metered(&a, &b, &sched, &mut meter).unwrap();
        // Leaf precision is e * N = 32 fractional digits.
        assert!(measure_digits(&meter).unwrap() >= 32);
        assert!(meter.observations() > 0);

        let mut flat_meter = DigitMeter::new();
        mm_flat_metered(&a, &b, 4, &mut flat_meter).unwrap();
        // Flat working scale is (K+1)*e = 36 fractional digits.
        assert!(measure_digits(&flat_meter).unwrap() >= 36);
    }
}
