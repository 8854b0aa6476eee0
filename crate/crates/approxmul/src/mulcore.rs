//! Bit-exact models of the exact and approximate low-width multipliers,
//! plus truth-table enumeration and text serialization.
//!
//! The two approximate 3x3 designs come from a modified truth table: the six
//! input pairs whose exact product exceeds 31 are remapped so the top output
//! bit can be dropped (`mul3x3_1`), and a prediction unit restores a coarse
//! top bit for the four worst of those cases (`mul3x3_2`).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Enumeration guard: refuse truth tables above 2^24 entries.
pub const ENUMERATION_CAP_BITS: u32 = 24;

/// The six remapped rows of the first approximate 3x3 design:
/// `(a, b, output)` for every input pair whose exact product is > 31.
/// All other input pairs return the exact product.
pub const MUL3X3_1_MODIFIED_ROWS: [(u32, u32, u32); 6] = [
    (5, 7, 27),
    (6, 6, 24),
    (6, 7, 30),
    (7, 5, 27),
    (7, 6, 30),
    (7, 7, 29),
];

/// Rows where the second design's prediction unit fires (both operands >= 6),
/// with the resulting output after forcing `O5 = 1, O4 = 0`.
pub const MUL3X3_2_PREDICTED_ROWS: [(u32, u32, u32); 4] =
    [(6, 6, 40), (6, 7, 46), (7, 6, 46), (7, 7, 45)];

/// An evaluable unsigned multiplier with declared operand and result widths.
///
/// `eval` must be total and deterministic on `a < 2^width_a, b < 2^width_b`,
/// and its result must fit in `out_width` bits. Models are immutable and safe
/// to share across threads.
pub trait Multiplier: Send + Sync {
    fn name(&self) -> &str;
    fn width_a(&self) -> u32;
    fn width_b(&self) -> u32;
    fn out_width(&self) -> u32;
    fn eval(&self, a: u32, b: u32) -> u32;
}

/// Exact `k x k -> 2k` multiplier, with operand range checking.
pub fn exact_mul(a: u64, b: u64, k: u32) -> Result<u64> {
    if a >> k != 0 {
        return Err(Error::OperandWidth { value: a, bits: k });
    }
    if b >> k != 0 {
        return Err(Error::OperandWidth { value: b, bits: k });
    }
    Ok(a * b)
}

/// Exact 2x2 -> 4-bit multiplier.
pub fn exact_mul2x2(a: u32, b: u32) -> u32 {
    debug_assert!(a < 4 && b < 4);
    a * b
}

/// First approximate 3x3 design: exact products <= 31 pass through, the six
/// larger ones come from the remapped table, and the output fits in 5 bits.
pub fn mul3x3_1(a: u32, b: u32) -> u32 {
    debug_assert!(a < 8 && b < 8);
    let p = a * b;
    if p <= 31 {
        return p;
    }
    MUL3X3_1_MODIFIED_ROWS
        .iter()
        .find(|&&(ra, rb, _)| ra == a && rb == b)
        .map(|&(_, _, v)| v)
        .expect("every product > 31 is a remapped row")
}

/// Prediction-unit condition for the second design: the AND of the two top
/// bits of each operand, i.e. both operands >= 6.
pub fn prediction_fires(a: u32, b: u32) -> bool {
    (a >> 1) & (a >> 2) & (b >> 1) & (b >> 2) & 1 == 1
}

/// Second approximate 3x3 design: identical to `mul3x3_1` except when the
/// prediction unit fires, where the output has bit 5 set and bit 4 cleared.
pub fn mul3x3_2(a: u32, b: u32) -> u32 {
    debug_assert!(a < 8 && b < 8);
    let v = mul3x3_1(a, b);
    if prediction_fires(a, b) {
        (v | 0b10_0000) & !0b01_0000
    } else {
        v
    }
}

/// The published sum-of-products expressions for the first 3x3 design, one
/// pattern list per output bit O0..O5.
///
/// Pattern characters run over inputs `a2 a1 a0 b2 b1 b0` left to right:
/// `1` positive literal, `0` negated literal, `-` absent. O5 is constant 0
/// (empty list). These are transcribed literally and are *not* assumed to
/// match the truth table; `eval_expressions_331` evaluates them as printed
/// and the equivalence is checked by test and surfaced in reports.
pub const EXPRESSION_PATTERNS_331: [&[&str]; 6] = [
    // O0
    &["--1--1"],
    // O1
    &["-01-1-", "-10-1-", "-1--01", "--1-10"],
    // O2
    &[
        "010-1-", "-1-010", "0011--", "0-110-", "-1-111", "100--1", "1-0-01", "1-10-1", "1-11-0",
    ],
    // O3
    &["-101--", "011011", "-1-10-", "10--1-", "1-11-1", "1---10"],
    // O4
    &["-1111-", "1--1--", "11--11"],
    // O5
    &[],
];

/// A product term over `n` boolean inputs as a positional mask/value pair:
/// bit `i` of `mask` set means input `i` is a literal, and the matching bit
/// of `value` gives its polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubePattern {
    pub mask: u32,
    pub value: u32,
}

impl CubePattern {
    /// Parse from the textual form used by `EXPRESSION_PATTERNS_331` and the
    /// PLA format: leftmost character is the highest-numbered input.
    pub fn parse(pattern: &str, num_inputs: u32) -> Result<Self> {
        if pattern.len() != num_inputs as usize {
            return Err(Error::Format(format!(
                "cube `{pattern}` has {} characters, expected {num_inputs}",
                pattern.len()
            )));
        }
        let mut mask = 0u32;
        let mut value = 0u32;
        for (pos, ch) in pattern.chars().enumerate() {
            let var = num_inputs - 1 - pos as u32;
            match ch {
                '1' => {
                    mask |= 1 << var;
                    value |= 1 << var;
                }
                '0' => mask |= 1 << var,
                '-' => {}
                other => {
                    return Err(Error::Format(format!(
                        "cube `{pattern}` has invalid character `{other}`"
                    )))
                }
            }
        }
        Ok(Self { mask, value })
    }

    pub fn to_pattern(self, num_inputs: u32) -> String {
        (0..num_inputs)
            .rev()
            .map(|var| {
                if self.mask >> var & 1 == 0 {
                    '-'
                } else if self.value >> var & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }

    /// True when the cube covers the given input assignment.
    pub fn covers(self, input: u32) -> bool {
        input & self.mask == self.value
    }

    pub fn literal_count(self) -> u32 {
        self.mask.count_ones()
    }
}

/// Evaluate the published expressions for the first 3x3 design literally,
/// bit by bit, and pack the six output bits.
///
/// Input bit layout matches truth-table indexing: `(a << 3) | b`.
pub fn eval_expressions_331(a: u32, b: u32) -> u32 {
    debug_assert!(a < 8 && b < 8);
    let input = (a << 3) | b;
    let mut out = 0u32;
    for (bit, patterns) in EXPRESSION_PATTERNS_331.iter().enumerate() {
        let fired = patterns.iter().any(|p| {
            CubePattern::parse(p, 6)
                .expect("built-in patterns are well-formed")
                .covers(input)
        });
        if fired {
            out |= 1 << bit;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Truth tables
// ---------------------------------------------------------------------------

/// Complete output map of an `in_width_a x in_width_b`-bit function, indexed
/// by `(a << in_width_b) | b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub in_width_a: u32,
    pub in_width_b: u32,
    pub out_width: u32,
    pub entries: Vec<u32>,
}

impl TruthTable {
    pub fn new(in_width_a: u32, in_width_b: u32, out_width: u32, entries: Vec<u32>) -> Result<Self> {
        let expect = 1usize << (in_width_a + in_width_b);
        if entries.len() != expect {
            return Err(Error::Format(format!(
                "truth table has {} entries, expected {expect}",
                entries.len()
            )));
        }
        if out_width < 32 {
            if let Some(bad) = entries.iter().find(|&&e| e >> out_width != 0) {
                return Err(Error::Format(format!(
                    "entry {bad} does not fit in {out_width} output bits"
                )));
            }
        }
        Ok(Self { in_width_a, in_width_b, out_width, entries })
    }

    pub fn num_inputs(&self) -> u32 {
        self.in_width_a + self.in_width_b
    }

    pub fn index(&self, a: u32, b: u32) -> usize {
        ((a << self.in_width_b) | b) as usize
    }

    pub fn get(&self, a: u32, b: u32) -> u32 {
        self.entries[self.index(a, b)]
    }

    /// Input assignments for which output bit `output_index` is 1.
    pub fn minterms(&self, output_index: u32) -> Vec<u32> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >> output_index & 1 == 1)
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Text form: header `tt <wa> <wb> <wout>`, then one decimal output per
    /// line in row-major `(a, b)` order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tt {} {} {}", self.in_width_a, self.in_width_b, self.out_width);
        for e in &self.entries {
            let _ = writeln!(s, "{e}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Parse {
            offset: 0,
            message: "empty truth-table text".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "tt" {
            return Err(Error::Parse {
                offset: 0,
                message: format!("bad header `{header}`, expected `tt <wa> <wb> <wout>`"),
            });
        }
        let parse_width = |s: &str| -> Result<u32> {
            s.parse().map_err(|_| Error::Parse {
                offset: 0,
                message: format!("bad width `{s}` in header"),
            })
        };
        let wa = parse_width(fields[1])?;
        let wb = parse_width(fields[2])?;
        let wout = parse_width(fields[3])?;
        let mut entries = Vec::with_capacity(1 << (wa + wb));
        let mut offset = header.len() as u64 + 1;
        for line in lines {
            let v: u32 = line.trim().parse().map_err(|_| Error::Parse {
                offset,
                message: format!("bad entry `{line}`"),
            })?;
            entries.push(v);
            offset += line.len() as u64 + 1;
        }
        Self::new(wa, wb, wout, entries)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_text(&text)
    }
}

/// Enumerate a model into its complete truth table.
///
/// Refuses models with more than [`ENUMERATION_CAP_BITS`] total input bits.
pub fn enumerate_table(model: &dyn Multiplier) -> Result<TruthTable> {
    let bits = model.width_a() + model.width_b();
    if bits > ENUMERATION_CAP_BITS {
        return Err(Error::WidthCap { bits, cap: ENUMERATION_CAP_BITS });
    }
    let mut entries = Vec::with_capacity(1 << bits);
    for a in 0..1u32 << model.width_a() {
        for b in 0..1u32 << model.width_b() {
            entries.push(model.eval(a, b));
        }
    }
    TruthTable::new(model.width_a(), model.width_b(), model.out_width(), entries)
}

// ---------------------------------------------------------------------------
// Concrete models
// ---------------------------------------------------------------------------

/// Exact `k x k` multiplier as a [`Multiplier`].
#[derive(Debug, Clone)]
pub struct ExactModel {
    name: String,
    width: u32,
}

impl ExactModel {
    pub fn new(width: u32) -> Self {
        Self { name: format!("exact{width}"), width }
    }
}

impl Multiplier for ExactModel {
    fn name(&self) -> &str {
        &self.name
    }
    fn width_a(&self) -> u32 {
        self.width
    }
    fn width_b(&self) -> u32 {
        self.width
    }
    fn out_width(&self) -> u32 {
        2 * self.width
    }
    fn eval(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a >> self.width == 0 && b >> self.width == 0);
        a * b
    }
}

macro_rules! fn_model {
    ($ty:ident, $name:literal, $wa:literal, $wb:literal, $wout:literal, $f:path) => {
        #[derive(Debug, Clone, Default)]
        pub struct $ty;

        impl Multiplier for $ty {
            fn name(&self) -> &str {
                $name
            }
            fn width_a(&self) -> u32 {
                $wa
            }
            fn width_b(&self) -> u32 {
                $wb
            }
            fn out_width(&self) -> u32 {
                $wout
            }
            fn eval(&self, a: u32, b: u32) -> u32 {
                $f(a, b)
            }
        }
    };
}

fn_model!(Mul3x3_1, "mul3x3_1", 3, 3, 5, mul3x3_1);
fn_model!(Mul3x3_2, "mul3x3_2", 3, 3, 6, mul3x3_2);
fn_model!(ExprMul331, "expr3x3_1", 3, 3, 5, eval_expressions_331);

/// A model backed by an explicit truth table.
#[derive(Debug, Clone)]
pub struct TableModel {
    name: String,
    table: Arc<TruthTable>,
}

impl TableModel {
    pub fn new(name: impl Into<String>, table: TruthTable) -> Self {
        Self { name: name.into(), table: Arc::new(table) }
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }
}

impl Multiplier for TableModel {
    fn name(&self) -> &str {
        &self.name
    }
    fn width_a(&self) -> u32 {
        self.table.in_width_a
    }
    fn width_b(&self) -> u32 {
        self.table.in_width_b
    }
    fn out_width(&self) -> u32 {
        self.table.out_width
    }
    fn eval(&self, a: u32, b: u32) -> u32 {
        self.table.get(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_mul_examples() {
        assert_eq!(exact_mul(0, 7, 3).unwrap(), 0);
        assert_eq!(exact_mul(7, 7, 3).unwrap(), 49);
        assert_eq!(exact_mul(255, 255, 8).unwrap(), 65025);
        assert!(matches!(exact_mul(8, 1, 3), Err(Error::OperandWidth { .. })));
        assert!(matches!(exact_mul(1, 256, 8), Err(Error::OperandWidth { .. })));
    }

    #[test]
    fn mul3x3_1_examples() {
        assert_eq!(mul3x3_1(5, 7), 27);
        assert_eq!(mul3x3_1(7, 7), 29);
        assert_eq!(mul3x3_1(6, 6), 24);
        assert_eq!(mul3x3_1(4, 6), 24); // product 24 <= 31, unmodified
    }

    #[test]
    fn mul3x3_1_output_fits_five_bits() {
        for a in 0..8 {
            for b in 0..8 {
                assert!(mul3x3_1(a, b) < 32, "({a},{b})");
            }
        }
    }

    #[test]
    fn mul3x3_1_exact_below_32() {
        for a in 0..8 {
            for b in 0..8 {
                if a * b <= 31 {
                    assert_eq!(mul3x3_1(a, b), a * b, "({a},{b})");
                }
            }
        }
    }

    #[test]
    fn mul3x3_1_error_profile() {
        let mut mismatches = 0;
        let mut ed_sum = 0;
        for a in 0..8u32 {
            for b in 0..8 {
                let d = (mul3x3_1(a, b) as i64 - (a * b) as i64).unsigned_abs();
                if d != 0 {
                    mismatches += 1;
                }
                ed_sum += d;
            }
        }
        assert_eq!(mismatches, 6);
        assert_eq!(ed_sum, 72); // mean 1.125 over 64 pairs
    }

    #[test]
    fn mul3x3_2_examples() {
        assert_eq!(mul3x3_2(6, 6), 40);
        assert_eq!(mul3x3_2(7, 7), 45);
        assert_eq!(mul3x3_2(5, 7), 27); // prediction unit does not fire
        assert_eq!(mul3x3_2(7, 6), 46); // bit columns, not the printed value
    }

    #[test]
    fn mul3x3_2_error_profile() {
        let ed_sum: u32 = (0..8)
            .flat_map(|a| (0..8).map(move |b| mul3x3_2(a, b).abs_diff(a * b)))
            .sum();
        assert_eq!(ed_sum, 32); // mean 0.5 over 64 pairs
    }

    #[test]
    fn prediction_unit_is_top_bit_and() {
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(prediction_fires(a, b), a >= 6 && b >= 6);
                if !(a >= 6 && b >= 6) {
                    assert_eq!(mul3x3_2(a, b), mul3x3_1(a, b));
                }
            }
        }
    }

    #[test]
    fn approximate_designs_commute() {
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(mul3x3_1(a, b), mul3x3_1(b, a));
                assert_eq!(mul3x3_2(a, b), mul3x3_2(b, a));
            }
        }
    }

    #[test]
    fn expression_examples() {
        assert_eq!(eval_expressions_331(1, 1), 1);
        assert_eq!(eval_expressions_331(7, 7), 29);
        assert_eq!(eval_expressions_331(0, 5), 0);
    }

    #[test]
    fn enumerate_3x3_models() {
        let exact = enumerate_table(&ExactModel::new(3)).unwrap();
        assert_eq!(exact.entries.len(), 64);
        assert_eq!(exact.get(7, 7), 49);

        let t1 = enumerate_table(&Mul3x3_1).unwrap();
        let diff1 = t1.entries.iter().zip(&exact.entries).filter(|(a, b)| a != b).count();
        assert_eq!(diff1, 6);

        let t2 = enumerate_table(&Mul3x3_2).unwrap();
        let diff2 = t2.entries.iter().zip(&exact.entries).filter(|(a, b)| a != b).count();
        assert_eq!(diff2, 6);
    }

    #[test]
    fn enumeration_cap_enforced() {
        let wide = ExactModel::new(13);
        assert!(matches!(enumerate_table(&wide), Err(Error::WidthCap { bits: 26, cap: 24 })));
    }

    #[test]
    fn truth_table_text_round_trip() {
        let t = enumerate_table(&Mul3x3_1).unwrap();
        let text = t.to_text();
        let back = TruthTable::from_text(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
        // line for index (7<<3)|7 is 29
        assert_eq!(text.lines().nth(1 + ((7 << 3) | 7)).unwrap(), "29");
    }

    #[test]
    fn truth_table_rejects_bad_input() {
        assert!(TruthTable::new(3, 3, 5, vec![0; 63]).is_err());
        assert!(TruthTable::new(1, 1, 1, vec![0, 1, 2, 0]).is_err());
        assert!(TruthTable::from_text("tt 3 3\n").is_err());
        assert!(TruthTable::from_text("tt 1 1 2\n0\n0\nx\n0\n").is_err());
    }

    #[test]
    fn cube_pattern_round_trip() {
        let c = CubePattern::parse("-10-1-", 6).unwrap();
        assert_eq!(c.to_pattern(6), "-10-1-");
        assert_eq!(c.literal_count(), 3);
        // a1=1, a0=0, b1=1 -> covers (a=2|4-bit…, b=2): a=010,b=010 -> index 0b010010
        assert!(c.covers(0b010_010));
        assert!(!c.covers(0b011_010));
    }
}
