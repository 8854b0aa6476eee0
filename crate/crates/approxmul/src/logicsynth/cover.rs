//! Sum-of-products covers over a truth-table column.

use crate::mulcore::{CubePattern, TruthTable};

/// A two-level cover of one output bit: an OR of product terms.
///
/// No cubes means constant 0; a single cube with no literals means
/// constant 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SopCover {
    pub num_inputs: u32,
    pub output_index: u32,
    pub cubes: Vec<CubePattern>,
}

impl SopCover {
    pub fn eval(&self, input: u32) -> bool {
        self.cubes.iter().any(|c| c.covers(input))
    }

    /// `Some(value)` when the cover is a constant function.
    pub fn is_constant(&self) -> Option<bool> {
        if self.cubes.is_empty() {
            Some(false)
        } else if self.cubes.iter().any(|c| c.mask == 0) {
            Some(true)
        } else {
            None
        }
    }
}

/// Result of an exhaustive cover-versus-table comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceCheck {
    pub equivalent: bool,
    /// First input assignment where the two disagree.
    pub counterexample: Option<u32>,
}

/// Evaluate `cover` against column `output_index` of `table` on every input.
pub fn verify_equivalence(cover: &SopCover, table: &TruthTable, output_index: u32) -> EquivalenceCheck {
    for input in 0..table.entries.len() as u32 {
        let want = table.entries[input as usize] >> output_index & 1 == 1;
        if cover.eval(input) != want {
            return EquivalenceCheck { equivalent: false, counterexample: Some(input) };
        }
    }
    EquivalenceCheck { equivalent: true, counterexample: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logicsynth::published_expression_covers;
    use crate::mulcore::{enumerate_table, Mul3x3_1};

    #[test]
    fn constant_covers() {
        let zero = SopCover { num_inputs: 3, output_index: 0, cubes: vec![] };
        assert_eq!(zero.is_constant(), Some(false));
        assert!(!zero.eval(5));

        let one = SopCover {
            num_inputs: 3,
            output_index: 0,
            cubes: vec![CubePattern { mask: 0, value: 0 }],
        };
        assert_eq!(one.is_constant(), Some(true));
        assert!(one.eval(0) && one.eval(7));
    }

    #[test]
    fn deleted_cube_gives_counterexample() {
        let table = enumerate_table(&Mul3x3_1).unwrap();
        let mut cover = published_expression_covers().remove(4); // O4, three cubes
        let check = verify_equivalence(&cover, &table, 4);
        assert!(check.equivalent);

        cover.cubes.pop();
        let broken = verify_equivalence(&cover, &table, 4);
        assert!(!broken.equivalent);
        let cx = broken.counterexample.unwrap();
        assert!(cover.eval(cx) != (table.entries[cx as usize] >> 4 & 1 == 1));
    }

    #[test]
    fn published_expressions_disagree_with_table_on_bit_one() {
        // The transcribed O1 expression fires wrongly on four inputs; the
        // checker reports the first of them, (a=2, b=2).
        let table = enumerate_table(&Mul3x3_1).unwrap();
        let covers = published_expression_covers();
        let check = verify_equivalence(&covers[1], &table, 1);
        assert!(!check.equivalent);
        assert_eq!(check.counterexample, Some((2 << 3) | 2));
    }
}
