//! Operation counting and analytic cost prediction.
//!
//! The counting granularity matches what the recursive engine actually does:
//! each packing entry costs one scale-by-epsilon and one scalar add, each
//! elementwise floor and each elementwise mod costs one, and each leaf scalar
//! multiply costs one. Under that granularity the recursive engine's total for
//! an N x N product is exactly (4*log2(N) + 1)*N^2, which the predictors here
//! reproduce both in closed form and by evaluating the recurrence
//! T(N) = 4(N/2)^2 + 4(N/2)^2 + 2N^2 + 4T(N/2) literally.
//!
//! [`MachineModel`] weights each counted operation by a cost function of the
//! operand digit count at its recursion level, so the same tallies can be
//! priced for processors whose digit-multiply cost is constant, logarithmic,
//! softly linear, or Karatsuba-like.

use std::fmt;
use std::str::FromStr;

use crate::apfixed::PackedNumber;
use crate::packmul::{epsilon_exponent, EpsilonSchedule};

/// Tallies of the scalar operations an engine performed, by kind.
///
/// Merging is plain fieldwise addition, so per-subtree tallies can be combined
/// in any order.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCount {
    pub scalar_mul: u64,
    pub scalar_add: u64,
    pub scale_by_eps: u64,
    pub floor_ops: u64,
    pub mod_ops: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.scalar_mul + self.scalar_add + self.scale_by_eps + self.floor_ops + self.mod_ops
    }

    pub fn merge(self, other: OpCount) -> OpCount {
        OpCount {
            scalar_mul: self.scalar_mul + other.scalar_mul,
            scalar_add: self.scalar_add + other.scalar_add,
            scale_by_eps: self.scale_by_eps + other.scale_by_eps,
            floor_ops: self.floor_ops + other.floor_ops,
            mod_ops: self.mod_ops + other.mod_ops,
        }
    }
}

impl std::ops::Add for OpCount {
    type Output = OpCount;

    fn add(self, other: OpCount) -> OpCount {
        self.merge(other)
    }
}

impl std::ops::AddAssign for OpCount {
    fn add_assign(&mut self, other: OpCount) {
        *self = self.merge(other);
    }
}

/// Errors from the predictors and reporting types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostError {
    NotPowerOfTwo(u64),
    CountOverflow(u64),
    NoObservations,
    DuplicateRow { n: u64, algorithm: String },
}

impl fmt::Display for CostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostError::NotPowerOfTwo(n) => write!(f, "size {n} is not a power of two"),
            CostError::CountOverflow(n) => write!(f, "operation count for size {n} overflows u64"),
            CostError::NoObservations => write!(f, "no digit observations were recorded"),
            CostError::DuplicateRow { n, algorithm } => {
                write!(f, "report already has a row for N={n}, algorithm {algorithm}")
            }
        }
    }
}

impl std::error::Error for CostError {}

fn check_power_of_two(n: u64) -> Result<(), CostError> {
    if n == 0 || !n.is_power_of_two() {
        return Err(CostError::NotPowerOfTwo(n));
    }
    Ok(())
}

fn to_u64(n: u64, v: u128) -> Result<u64, CostError> {
    u64::try_from(v).map_err(|_| CostError::CountOverflow(n))
}

/// Closed-form operation total for the recursive packed engine:
/// (4*log2(n) + 1) * n^2.
pub fn predict_ops_closed(n: u64) -> Result<u64, CostError> {
    check_power_of_two(n)?;
    let log = n.trailing_zeros() as u128;
    to_u64(n, (4 * log + 1) * (n as u128) * (n as u128))
}

/// The same total by evaluating the recurrence
/// T(N) = 4(N/2)^2 + 4(N/2)^2 + 2N^2 + 4T(N/2) literally,
/// with T(2) = 20 (eight packing ops, four leaf multiplies, eight floor/mod)
/// and T(1) = 1 (a bare scalar multiply).
pub fn predict_ops_recursive(n: u64) -> Result<u64, CostError> {
    check_power_of_two(n)?;
    fn t(n: u128) -> u128 {
        match n {
            1 => 1,
            2 => 20,
            _ => {
                let half = n / 2;
                4 * half * half + 4 * half * half + 2 * n * n + 4 * t(half)
            }
        }
    }
    to_u64(n, t(n as u128))
}

/// Scalar-op total of the classical triple loop for square n: 2n^3 - n^2.
pub fn predict_ops_classical(n: u64) -> Result<u64, CostError> {
    let n = n as u128;
    to_u64(n as u64, 2 * n * n * n - n * n)
}

/// The comparison column traditionally quoted for recursive block
/// multiplication: 2n^3.
pub fn predict_ops_binet(n: u64) -> Result<u64, CostError> {
    let n = n as u128;
    to_u64(n as u64, 2 * n * n * n)
}

/// Strassen counts for power-of-two n: (multiplies, additions/subtractions)
/// = (7^log2(n), 6*(7^log2(n) - 4^log2(n))).
pub fn predict_ops_strassen(n: u64) -> Result<(u64, u64), CostError> {
    check_power_of_two(n)?;
    let log = n.trailing_zeros();
    let pow7 = 7u128
        .checked_pow(log)
        .ok_or(CostError::CountOverflow(n))?;
    let pow4 = (n as u128) * (n as u128);
    Ok((to_u64(n, pow7)?, to_u64(n, 6 * (pow7 - pow4))?))
}

/// Working digits the flat engine needs for an n x n product with d-digit
/// entries: floor(n * log2(2n * 10^d)).
pub fn required_digits(n: u64, d: u32) -> u64 {
    let n = n as f64;
    (n * ((2.0 * n).log2() + d as f64 * std::f64::consts::LOG2_10)).floor() as u64
}

/// Hypothetical per-operation cost as a function of operand digit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineModel {
    /// Every operation costs 1 regardless of width.
    UnitCost,
    /// cost(d) = log2(d): a machine that processes a d-digit word in log time.
    LogD,
    /// cost(d) = d*log2(d): softly linear multiplication.
    DLogD,
    /// cost(d) = d^1.58: Karatsuba-style multiplication.
    Karatsuba,
}

impl MachineModel {
    pub fn cost(self, digits: u64) -> f64 {
        let d = digits.max(1) as f64;
        match self {
            MachineModel::UnitCost => 1.0,
            MachineModel::LogD => d.log2(),
            MachineModel::DLogD => d * d.log2(),
            MachineModel::Karatsuba => d.powf(1.58),
        }
    }

    pub const ALL: [MachineModel; 4] = [
        MachineModel::UnitCost,
        MachineModel::LogD,
        MachineModel::DLogD,
        MachineModel::Karatsuba,
    ];
}

impl fmt::Display for MachineModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MachineModel::UnitCost => "unit_cost",
            MachineModel::LogD => "log_d",
            MachineModel::DLogD => "d_log_d",
            MachineModel::Karatsuba => "karatsuba",
        };
        write!(f, "{name}")
    }
}

impl FromStr for MachineModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit_cost" => Ok(MachineModel::UnitCost),
            "log_d" => Ok(MachineModel::LogD),
            "d_log_d" => Ok(MachineModel::DLogD),
            "karatsuba" => Ok(MachineModel::Karatsuba),
            _ => Err(format!(
                "unknown machine model {s:?} (expected unit_cost, log_d, d_log_d or karatsuba)"
            )),
        }
    }
}

/// Price a recursive run from its precision ladder: per level k the engine
/// performs 4n^2 operations (scale, add, floor, mod; n^2 each) on operands of
/// p_k fractional digits, plus n^2 leaf multiplies at the deepest precision.
/// Under [`MachineModel::UnitCost`] this is (4*log2(n) + 1)*n^2 exactly.
pub fn machine_cost_for_schedule(schedule: &EpsilonSchedule, model: MachineModel) -> f64 {
    let n = (1u64 << schedule.depth()) as f64;
    let levels = schedule.levels();
    match levels.last() {
        None => model.cost(schedule.base_exponent() as u64),
        Some(leaf) => {
            let pack: f64 = levels
                .iter()
                .map(|lev| 4.0 * n * n * model.cost(lev.precision as u64))
                .sum();
            pack + n * n * model.cost(leaf.precision as u64)
        }
    }
}

/// [`machine_cost_for_schedule`] with the ladder sized for single-digit
/// entries. Sizes that are not powers of two are padded up, as the recursive
/// engine itself would require.
pub fn machine_cost(n: u64, model: MachineModel) -> f64 {
    let n = n.max(1).next_power_of_two();
    let e = epsilon_exponent(9, 9, n);
    let schedule = EpsilonSchedule::new(e, n as usize).expect("padded size is a power of two");
    machine_cost_for_schedule(&schedule, model)
}

/// Running maximum of operand digit widths seen during an engine run.
#[derive(Debug, Default, Clone)]
pub struct DigitMeter {
    max_digits: u64,
    observations: u64,
}

impl DigitMeter {
    pub fn new() -> Self {
        DigitMeter::default()
    }

    pub fn observe_packed(&mut self, x: &PackedNumber) {
        self.observe_digits(x.digit_footprint());
    }

    pub fn observe_digits(&mut self, digits: u64) {
        self.max_digits = self.max_digits.max(digits);
        self.observations += 1;
    }

    pub fn max_digits(&self) -> u64 {
        self.max_digits
    }

    pub fn observations(&self) -> u64 {
        self.observations
    }
}

/// Maximum operand digit count from an instrumented run; it is an error to
/// ask before any operand was observed.
pub fn measure_digits(meter: &DigitMeter) -> Result<u64, CostError> {
    if meter.observations == 0 {
        return Err(CostError::NoObservations);
    }
    Ok(meter.max_digits)
}

/// CSV column header emitted by [`CostReport::to_csv`].
pub const CSV_HEADER: &str = "N,algorithm,ops,predicted,digits,wall_ns";

/// One benchmark cell: measured ops, predicted ops, digit requirement and an
/// optional wall time for an (N, algorithm) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostRow {
    pub n: u64,
    pub algorithm: String,
    pub ops: u64,
    pub predicted: u64,
    pub digits: u64,
    pub wall_ns: Option<u64>,
}

/// Ordered collection of benchmark rows, one per (N, algorithm) pair.
#[derive(Debug, Default, Clone)]
pub struct CostReport {
    rows: Vec<CostRow>,
}

impl CostReport {
    pub fn new() -> Self {
        CostReport::default()
    }

    pub fn push(&mut self, row: CostRow) -> Result<(), CostError> {
        if self.rows.iter().any(|r| r.n == row.n && r.algorithm == row.algorithm) {
            return Err(CostError::DuplicateRow { n: row.n, algorithm: row.algorithm });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[CostRow] {
        &self.rows
    }

    /// Serialize with the fixed header; a missing wall time leaves the last
    /// field empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let wall = row.wall_ns.map(|w| w.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.n, row.algorithm, row.ops, row.predicted, row.digits, wall
            ));
        }
        out
    }
}
