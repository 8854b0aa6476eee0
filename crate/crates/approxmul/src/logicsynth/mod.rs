//! Two-level logic regeneration from truth tables: prime-implicant
//! minimization, cover equivalence checking, structural netlist emission,
//! and cost proxies (literal/cube counts and two-level depth) standing in
//! for an ASIC synthesis flow.

mod cover;
mod minimize;
mod pla;
mod verilog;

pub use cover::{verify_equivalence, EquivalenceCheck, SopCover};
pub use minimize::minimize;
pub use pla::{parse_pla, pla_text};
pub use verilog::{emit_verilog, parse_verilog};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mulcore::{CubePattern, Multiplier, TruthTable, EXPRESSION_PATTERNS_331};

/// Two-level implementation cost of a set of covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub literal_count: u32,
    pub cube_count: u32,
    /// 2 when any cover is nonconstant (an AND level plus an OR level),
    /// otherwise 0.
    pub two_level_depth: u32,
    pub output_count: u32,
}

pub fn cost_estimate(covers: &[SopCover]) -> CostEstimate {
    let literal_count = covers
        .iter()
        .flat_map(|c| c.cubes.iter())
        .map(|cube| cube.literal_count())
        .sum();
    let cube_count = covers.iter().map(|c| c.cubes.len() as u32).sum();
    let nonconstant = covers.iter().any(|c| c.is_constant().is_none());
    CostEstimate {
        literal_count,
        cube_count,
        two_level_depth: if nonconstant { 2 } else { 0 },
        output_count: covers.len() as u32,
    }
}

/// Minimize every output column of a table.
pub fn minimize_table(table: &TruthTable) -> Result<Vec<SopCover>> {
    (0..table.out_width).map(|bit| minimize(table, bit)).collect()
}

/// Minimize a model's table, padding with constant-0 covers up to the full
/// product width so dropped output bits appear explicitly in netlists.
pub fn minimize_model_covers(model: &dyn Multiplier) -> Result<Vec<SopCover>> {
    let table = crate::mulcore::enumerate_table(model)?;
    let mut covers = minimize_table(&table)?;
    let full_width = model.width_a() + model.width_b();
    for bit in table.out_width..full_width.max(table.out_width) {
        covers.push(SopCover { num_inputs: table.num_inputs(), output_index: bit, cubes: vec![] });
    }
    Ok(covers)
}

/// The published expressions for the first approximate 3x3 design as covers,
/// for side-by-side cost reporting against freshly minimized ones.
pub fn published_expression_covers() -> Vec<SopCover> {
    EXPRESSION_PATTERNS_331
        .iter()
        .enumerate()
        .map(|(bit, patterns)| SopCover {
            num_inputs: 6,
            output_index: bit as u32,
            cubes: patterns
                .iter()
                .map(|p| CubePattern::parse(p, 6).expect("built-in patterns are well-formed"))
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mulcore::{enumerate_table, ExactModel, Mul3x3_1};

    #[test]
    fn published_expression_costs() {
        let covers = published_expression_covers();
        let cost = cost_estimate(&covers);
        // O0 alone is one cube of two literals.
        assert_eq!(cost_estimate(&covers[..1]), CostEstimate {
            literal_count: 2,
            cube_count: 1,
            two_level_depth: 2,
            output_count: 1,
        });
        assert_eq!(cost.literal_count, 82);
        assert_eq!(cost.cube_count, 23);
        assert_eq!(cost.output_count, 6);
    }

    #[test]
    fn constant_costs_are_zero() {
        let constant0 = SopCover { num_inputs: 6, output_index: 0, cubes: vec![] };
        let cost = cost_estimate(&[constant0]);
        assert_eq!(cost.literal_count, 0);
        assert_eq!(cost.two_level_depth, 0);
    }

    #[test]
    fn approximate_design_is_cheaper_than_exact() {
        let exact = minimize_table(&enumerate_table(&ExactModel::new(3)).unwrap()).unwrap();
        let approx = minimize_table(&enumerate_table(&Mul3x3_1).unwrap()).unwrap();
        let exact_cost = cost_estimate(&exact);
        let approx_cost = cost_estimate(&approx);
        assert!(
            approx_cost.literal_count < exact_cost.literal_count,
            "approx {} vs exact {}",
            approx_cost.literal_count,
            exact_cost.literal_count
        );
    }

    #[test]
    fn model_covers_pad_dropped_bits() {
        let covers = minimize_model_covers(&Mul3x3_1).unwrap();
        assert_eq!(covers.len(), 6);
        assert_eq!(covers[5].is_constant(), Some(false));
    }
}
