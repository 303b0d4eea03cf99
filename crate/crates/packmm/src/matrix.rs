//! Dense integer matrices with a declared per-entry digit budget.
//!
//! Every matrix carries `digits`, the number of decimal digits its entries are
//! allowed to occupy; constructors reject entries at or above 10^digits. The
//! budget is what the packing engines size their exponents from, so it is part
//! of the type, not a convention.
//!
//! The text format is one header line `rows cols digits` followed by one line
//! of space-separated entries per row.

use std::fmt;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Largest digit budget whose entries still fit in a `u64` (10^19 <= u64::MAX).
pub const MAX_UNSIGNED_DIGITS: u32 = 19;

/// Largest digit budget whose entries still fit in an `i64`.
pub const MAX_SIGNED_DIGITS: u32 = 18;

/// Errors from matrix construction, parsing and file I/O.
#[derive(Debug)]
pub enum MatrixError {
    EmptyDimensions { rows: usize, cols: usize },
    DigitsOutOfRange { digits: u32, max: u32 },
    EntryTooLarge { row: usize, col: usize, entry: String, digits: u32 },
    DataLength { expected: usize, got: usize },
    Parse { line: usize, reason: String },
    Io(String),
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::EmptyDimensions { rows, cols } => {
                write!(f, "matrix dimensions must be positive, got {rows}x{cols}")
            }
            MatrixError::DigitsOutOfRange { digits, max } => {
                write!(f, "digit budget {digits} outside 1..={max}")
            }
            MatrixError::EntryTooLarge { row, col, entry, digits } => {
                write!(f, "entry ({row},{col}) = {entry} exceeds the {digits}-digit budget")
            }
            MatrixError::DataLength { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            MatrixError::Parse { line, reason } => write!(f, "line {line}: {reason}"),
            MatrixError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for MatrixError {}

fn check_dims(rows: usize, cols: usize) -> Result<(), MatrixError> {
    if rows == 0 || cols == 0 {
        return Err(MatrixError::EmptyDimensions { rows, cols });
    }
    Ok(())
}

fn check_digits(digits: u32, max: u32) -> Result<(), MatrixError> {
    if digits == 0 || digits > max {
        return Err(MatrixError::DigitsOutOfRange { digits, max });
    }
    Ok(())
}

/// Draw uniformly from `[0, bound)` by rejection, so the stream depends only
/// on the ChaCha8 output and never on platform word-size shortcuts.
fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let limit = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return x % bound;
        }
    }
}

/// Row-major matrix of nonnegative integers below 10^digits.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    digits: u32,
    data: Vec<u64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, digits: u32, data: Vec<u64>) -> Result<Self, MatrixError> {
        check_dims(rows, cols)?;
        check_digits(digits, MAX_UNSIGNED_DIGITS)?;
        if data.len() != rows * cols {
            return Err(MatrixError::DataLength { expected: rows * cols, got: data.len() });
        }
        let bound = 10u64.checked_pow(digits);
        for (idx, &v) in data.iter().enumerate() {
            if bound.is_some_and(|b| v >= b) {
                return Err(MatrixError::EntryTooLarge {
                    row: idx / cols,
                    col: idx % cols,
                    entry: v.to_string(),
                    digits,
                });
            }
        }
        Ok(IntMatrix { rows, cols, digits, data })
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize, digits: u32) -> Result<Self, MatrixError> {
        Self::new(rows, cols, digits, vec![0; rows.saturating_mul(cols)])
    }

    /// Uniform random entries in `[0, 10^digits)` from a seeded ChaCha8 stream.
    /// The same seed always yields the same matrix, on every platform.
    pub fn random(rows: usize, cols: usize, digits: u32, seed: u64) -> Result<Self, MatrixError> {
        check_dims(rows, cols)?;
        check_digits(digits, MAX_UNSIGNED_DIGITS)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 10u64.pow(digits);
        let data = (0..rows * cols).map(|_| uniform_below(&mut rng, bound)).collect();
        Self::new(rows, cols, digits, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn max_entry(&self) -> u64 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    /// Zero-pad to `n x n`. `n` must cover both dimensions.
    pub fn pad_to(&self, n: usize) -> Result<Self, MatrixError> {
        if n < self.rows.max(self.cols) {
            return Err(MatrixError::DataLength { expected: self.rows.max(self.cols), got: n });
        }
        let mut data = vec![0u64; n * n];
        for i in 0..self.rows {
            data[i * n..i * n + self.cols].copy_from_slice(self.row(i));
        }
        Self::new(n, n, self.digits, data)
    }

    /// The leading `rows x cols` block.
    pub fn crop(&self, rows: usize, cols: usize) -> Result<Self, MatrixError> {
        if rows > self.rows || cols > self.cols {
            return Err(MatrixError::DataLength { expected: rows * cols, got: self.data.len() });
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            data.extend_from_slice(&self.row(i)[..cols]);
        }
        Self::new(rows, cols, self.digits, data)
    }

    /// Same entries under a digit budget at least as wide.
    pub fn with_digits(&self, digits: u32) -> Result<Self, MatrixError> {
        Self::new(self.rows, self.cols, digits, self.data.clone())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.digits);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(u64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, MatrixError> {
        let (rows, cols, digits, fields) = parse_lines(text)?;
        let mut data = Vec::with_capacity(rows * cols);
        for (line, field) in fields {
            let v: u64 = field.parse().map_err(|_| MatrixError::Parse {
                line,
                reason: format!("bad entry {field:?}"),
            })?;
            data.push(v);
        }
        Self::new(rows, cols, digits, data)
    }

    pub fn read_path(path: &Path) -> Result<Self, MatrixError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MatrixError::Io(format!("{}: {e}", path.display())))?;
        Self::parse_text(&text)
    }

    pub fn write_path(&self, path: &Path) -> Result<(), MatrixError> {
        std::fs::write(path, self.to_text())
            .map_err(|e| MatrixError::Io(format!("{}: {e}", path.display())))
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} d={}", self.rows, self.cols, self.digits)?;
        for i in 0..self.rows {
            write!(f, "\n  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Row-major matrix of signed integers with |entry| < 10^digits.
#[derive(Clone, PartialEq, Eq)]
pub struct SignedMatrix {
    rows: usize,
    cols: usize,
    digits: u32,
    data: Vec<i64>,
}

impl SignedMatrix {
    pub fn new(rows: usize, cols: usize, digits: u32, data: Vec<i64>) -> Result<Self, MatrixError> {
        check_dims(rows, cols)?;
        check_digits(digits, MAX_SIGNED_DIGITS)?;
        if data.len() != rows * cols {
            return Err(MatrixError::DataLength { expected: rows * cols, got: data.len() });
        }
        let bound = 10i64.pow(digits);
        for (idx, &v) in data.iter().enumerate() {
            if v <= -bound || v >= bound {
                return Err(MatrixError::EntryTooLarge {
                    row: idx / cols,
                    col: idx % cols,
                    entry: v.to_string(),
                    digits,
                });
            }
        }
        Ok(SignedMatrix { rows, cols, digits, data })
    }

    /// Uniform random entries in `(-10^digits, 10^digits)`, seeded.
    pub fn random(rows: usize, cols: usize, digits: u32, seed: u64) -> Result<Self, MatrixError> {
        check_dims(rows, cols)?;
        check_digits(digits, MAX_SIGNED_DIGITS)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 10u64.pow(digits);
        let span = 2 * bound - 1;
        let data = (0..rows * cols)
            .map(|_| uniform_below(&mut rng, span) as i64 - (bound as i64 - 1))
            .collect();
        Self::new(rows, cols, digits, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[i64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.data
    }

    pub fn min_entry(&self) -> i64 {
        self.data.iter().copied().min().unwrap_or(0)
    }

    pub fn max_entry(&self) -> i64 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.digits);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(i64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, MatrixError> {
        let (rows, cols, digits, fields) = parse_lines(text)?;
        let mut data = Vec::with_capacity(rows * cols);
        for (line, field) in fields {
            let v: i64 = field.parse().map_err(|_| MatrixError::Parse {
                line,
                reason: format!("bad entry {field:?}"),
            })?;
            data.push(v);
        }
        Self::new(rows, cols, digits, data)
    }

    pub fn read_path(path: &Path) -> Result<Self, MatrixError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MatrixError::Io(format!("{}: {e}", path.display())))?;
        Self::parse_text(&text)
    }

    pub fn write_path(&self, path: &Path) -> Result<(), MatrixError> {
        std::fs::write(path, self.to_text())
            .map_err(|e| MatrixError::Io(format!("{}: {e}", path.display())))
    }
}

impl fmt::Debug for SignedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignedMatrix {}x{} d={}", self.rows, self.cols, self.digits)?;
        for i in 0..self.rows {
            write!(f, "\n  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

type ParsedFields<'a> = (usize, usize, u32, Vec<(usize, &'a str)>);

/// Split the header and body shared by both matrix flavors: header fields are
/// `rows cols digits`, the body must supply exactly `cols` entries on each of
/// `rows` lines. Blank lines are ignored.
fn parse_lines(text: &str) -> Result<ParsedFields<'_>, MatrixError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| MatrixError::Parse { line: 1, reason: "empty input".into() })?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(MatrixError::Parse {
            line: header_no,
            reason: format!("header must be `rows cols digits`, got {header:?}"),
        });
    }
    let parse_field = |name: &str, s: &str| -> Result<usize, MatrixError> {
        s.parse().map_err(|_| MatrixError::Parse {
            line: header_no,
            reason: format!("bad {name} {s:?}"),
        })
    };
    let rows = parse_field("row count", parts[0])?;
    let cols = parse_field("column count", parts[1])?;
    let digits = parse_field("digit budget", parts[2])? as u32;
    let mut fields = Vec::new();
    let mut body_rows = 0usize;
    for (line_no, line) in lines {
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != cols {
            return Err(MatrixError::Parse {
                line: line_no,
                reason: format!("expected {cols} entries, got {}", entries.len()),
            });
        }
        body_rows += 1;
        fields.extend(entries.into_iter().map(|e| (line_no, e)));
    }
    if body_rows != rows {
        return Err(MatrixError::Parse {
            line: header_no,
            reason: format!("header promises {rows} rows, body has {body_rows}"),
        });
    }
    Ok((rows, cols, digits, fields))
}
