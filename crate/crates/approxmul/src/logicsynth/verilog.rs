//! Structural Verilog emission of sum-of-products covers, plus a reader for
//! the emitted subset so netlists can be round-tripped and re-verified.

use crate::error::{Error, Result};
use crate::logicsynth::cover::SopCover;
use crate::mulcore::CubePattern;

/// Render one literal. Inputs are split `a` above `b`: variable `v` is
/// `b[v]` for `v < wb`, else `a[v - wb]`.
fn literal(var: u32, positive: bool, wb: u32) -> String {
    let (port, idx) = if var < wb { ('b', var) } else { ('a', var - wb) };
    if positive {
        format!("{port}[{idx}]")
    } else {
        format!("~{port}[{idx}]")
    }
}

fn cube_expr(cube: &CubePattern, num_inputs: u32, wb: u32) -> String {
    let lits: Vec<String> = (0..num_inputs)
        .rev()
        .filter(|&v| cube.mask >> v & 1 == 1)
        .map(|v| literal(v, cube.value >> v & 1 == 1, wb))
        .collect();
    format!("({})", lits.join(" & "))
}

/// Emit a synthesizable structural module: input vectors `a` and `b`, output
/// vector `o`, one continuous assignment per output bit in sum-of-products
/// form. Output is deterministic for a given cover list.
pub fn emit_verilog(name: &str, wa: u32, wb: u32, covers: &[SopCover]) -> Result<String> {
    if covers.is_empty() {
        return Err(Error::Format("cannot emit a module with no outputs".into()));
    }
    let n = wa + wb;
    if covers.iter().any(|c| c.num_inputs != n) {
        return Err(Error::Format(format!(
            "covers disagree with the declared {wa}+{wb} input bits"
        )));
    }
    let mut s = String::new();
    s.push_str(&format!("module {name} (\n"));
    s.push_str(&format!("    input  wire [{}:0] a,\n", wa - 1));
    s.push_str(&format!("    input  wire [{}:0] b,\n", wb - 1));
    s.push_str(&format!("    output wire [{}:0] o\n", covers.len() - 1));
    s.push_str(");\n");
    for (bit, cover) in covers.iter().enumerate() {
        let rhs = match cover.is_constant() {
            Some(false) => "1'b0".to_string(),
            Some(true) => "1'b1".to_string(),
            None => cover
                .cubes
                .iter()
                .map(|c| cube_expr(c, n, wb))
                .collect::<Vec<_>>()
                .join(" | "),
        };
        s.push_str(&format!("    assign o[{bit}] = {rhs};\n"));
    }
    s.push_str("endmodule\n");
    Ok(s)
}

fn parse_vector_decl(line: &str, keyword: &str) -> Option<(u32, char)> {
    // e.g. `input  wire [2:0] a,`
    let rest = line.trim().strip_prefix(keyword)?.trim_start().strip_prefix("wire")?.trim_start();
    let open = rest.find('[')?;
    let colon = rest.find(':')?;
    let close = rest.find(']')?;
    let msb: u32 = rest[open + 1..colon].parse().ok()?;
    let lsb: u32 = rest[colon + 1..close].parse().ok()?;
    let port = rest[close + 1..].trim().trim_end_matches([',', ';']).trim().chars().next()?;
    if lsb != 0 {
        return None;
    }
    Some((msb + 1, port))
}

fn parse_literal(token: &str, wb: u32, n: u32) -> Result<(u32, bool)> {
    let token = token.trim();
    let (positive, rest) = match token.strip_prefix('~') {
        Some(r) => (false, r.trim()),
        None => (true, token),
    };
    let (port, idx_str) = rest
        .strip_suffix(']')
        .and_then(|r| r.split_once('['))
        .ok_or_else(|| Error::Format(format!("bad literal `{token}`")))?;
    let idx: u32 =
        idx_str.parse().map_err(|_| Error::Format(format!("bad literal index `{token}`")))?;
    let var = match port.trim() {
        "a" => wb + idx,
        "b" => idx,
        other => return Err(Error::Format(format!("unknown port `{other}`"))),
    };
    if var >= n {
        return Err(Error::Format(format!("literal `{token}` out of range")));
    }
    Ok((var, positive))
}

/// Parse a module previously produced by [`emit_verilog`].
/// Returns the module name, operand widths, and one cover per output bit.
pub fn parse_verilog(text: &str) -> Result<(String, u32, u32, Vec<SopCover>)> {
    let mut name = None;
    let mut wa = None;
    let mut wb = None;
    let mut out_width = None;
    let mut assigns: Vec<(u32, String)> = Vec::new();

    for line in text.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("module ") {
            name = Some(rest.trim_end_matches('(').trim().to_string());
        } else if let Some((w, port)) = parse_vector_decl(t, "input") {
            match port {
                'a' => wa = Some(w),
                'b' => wb = Some(w),
                _ => return Err(Error::Format(format!("unexpected input port in `{t}`"))),
            }
        } else if let Some((w, 'o')) = parse_vector_decl(t, "output") {
            out_width = Some(w);
        } else if let Some(rest) = t.strip_prefix("assign ") {
            let (lhs, rhs) = rest
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad assign `{t}`")))?;
            let bit: u32 = lhs
                .trim()
                .strip_prefix("o[")
                .and_then(|s| s.strip_suffix(']'))
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad assign target `{t}`")))?;
            assigns.push((bit, rhs.trim().trim_end_matches(';').trim().to_string()));
        }
    }

    let name = name.ok_or_else(|| Error::Format("no module declaration found".into()))?;
    let wa = wa.ok_or_else(|| Error::Format("no input vector `a` found".into()))?;
    let wb = wb.ok_or_else(|| Error::Format("no input vector `b` found".into()))?;
    let out_width = out_width.ok_or_else(|| Error::Format("no output vector `o` found".into()))?;
    let n = wa + wb;

    let mut covers: Vec<SopCover> = (0..out_width)
        .map(|bit| SopCover { num_inputs: n, output_index: bit, cubes: vec![] })
        .collect();
    let mut seen = vec![false; out_width as usize];
    for (bit, rhs) in assigns {
        if bit >= out_width {
            return Err(Error::Format(format!("assign to o[{bit}] beyond output width")));
        }
        seen[bit as usize] = true;
        match rhs.as_str() {
            "1'b0" => {}
            "1'b1" => covers[bit as usize].cubes.push(CubePattern { mask: 0, value: 0 }),
            _ => {
                for term in rhs.split('|') {
                    let term = term.trim().trim_start_matches('(').trim_end_matches(')');
                    let mut mask = 0u32;
                    let mut value = 0u32;
                    for lit in term.split('&') {
                        let (var, positive) = parse_literal(lit, wb, n)?;
                        mask |= 1 << var;
                        if positive {
                            value |= 1 << var;
                        }
                    }
                    covers[bit as usize].cubes.push(CubePattern { mask, value });
                }
            }
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Format(format!("output o[{missing}] has no assignment")));
    }
    Ok((name, wa, wb, covers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logicsynth::{minimize_model_covers, published_expression_covers};
    use crate::mulcore::{enumerate_table, Mul3x3_1};

    #[test]
    fn emits_constant_and_sop_assigns() {
        let covers = minimize_model_covers(&Mul3x3_1).unwrap();
        let text = emit_verilog("mul3x3_1", 3, 3, &covers).unwrap();
        assert!(text.contains("module mul3x3_1 ("));
        assert!(text.contains("output wire [5:0] o"));
        assert!(text.contains("assign o[0] = (a[0] & b[0]);"));
        assert!(text.contains("assign o[5] = 1'b0;"));
    }

    #[test]
    fn round_trip_preserves_function() {
        let covers = published_expression_covers();
        let text = emit_verilog("expr3x3_1", 3, 3, &covers).unwrap();
        let (name, wa, wb, parsed) = parse_verilog(&text).unwrap();
        assert_eq!(name, "expr3x3_1");
        assert_eq!((wa, wb), (3, 3));
        assert_eq!(parsed, covers);
        // emitted text is stable through the round trip
        assert_eq!(emit_verilog(&name, wa, wb, &parsed).unwrap(), text);
    }

    #[test]
    fn parses_own_minimized_output_to_equivalent_function() {
        let table = enumerate_table(&Mul3x3_1).unwrap();
        let covers = minimize_model_covers(&Mul3x3_1).unwrap();
        let text = emit_verilog("m", 3, 3, &covers).unwrap();
        let (_, _, _, parsed) = parse_verilog(&text).unwrap();
        for (bit, cover) in parsed.iter().enumerate().take(table.out_width as usize) {
            let check = crate::logicsynth::verify_equivalence(cover, &table, bit as u32);
            assert!(check.equivalent, "bit {bit}");
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_verilog("not a module").is_err());
        assert!(emit_verilog("m", 3, 3, &[]).is_err());
        let wrong_inputs =
            vec![SopCover { num_inputs: 4, output_index: 0, cubes: vec![] }];
        assert!(emit_verilog("m", 3, 3, &wrong_inputs).is_err());
    }
}
