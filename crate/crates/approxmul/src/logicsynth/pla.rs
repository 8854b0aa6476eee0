//! PLA-style text serialization of covers: `.i/.o/.p` header, one cube per
//! line with `0/1/-` input columns and one output flag column per cover.

use crate::error::{Error, Result};
use crate::logicsynth::cover::SopCover;
use crate::mulcore::CubePattern;

/// Serialize covers to PLA text. Input columns run left to right from the
/// highest variable (`a` bits above `b` bits); output column `j` flags
/// membership in `covers[j]`.
pub fn pla_text(covers: &[SopCover], wa: u32, wb: u32) -> Result<String> {
    if covers.is_empty() {
        return Err(Error::Format("cannot serialize an empty cover list".into()));
    }
    let n = wa + wb;
    if covers.iter().any(|c| c.num_inputs != n) {
        return Err(Error::Format(format!(
            "covers disagree with the declared {wa}+{wb} input bits"
        )));
    }
    let mut s = String::new();
    s.push_str(&format!(".i {n}\n.o {}\n", covers.len()));
    let in_names: Vec<String> = (0..n)
        .rev()
        .map(|v| if v < wb { format!("b{v}") } else { format!("a{}", v - wb) })
        .collect();
    s.push_str(&format!(".ilb {}\n", in_names.join(" ")));
    let out_names: Vec<String> = (0..covers.len()).map(|j| format!("o{j}")).collect();
    s.push_str(&format!(".ob {}\n", out_names.join(" ")));
    let total: usize = covers.iter().map(|c| c.cubes.len()).sum();
    s.push_str(&format!(".p {total}\n"));
    for (j, cover) in covers.iter().enumerate() {
        for cube in &cover.cubes {
            let mut flags = vec!['0'; covers.len()];
            flags[j] = '1';
            s.push_str(&format!(
                "{} {}\n",
                cube.to_pattern(n),
                flags.iter().collect::<String>()
            ));
        }
    }
    s.push_str(".e\n");
    Ok(s)
}

/// Parse PLA text produced by [`pla_text`]. Returns the operand widths
/// recovered from `.ilb` and one cover per output column.
pub fn parse_pla(text: &str) -> Result<(u32, u32, Vec<SopCover>)> {
    let mut n: Option<u32> = None;
    let mut m: Option<usize> = None;
    let mut wa = 0u32;
    let mut wb = 0u32;
    let mut covers: Vec<SopCover> = Vec::new();
    let mut offset = 0u64;

    for line in text.lines() {
        let t = line.trim();
        let line_offset = offset;
        offset += line.len() as u64 + 1;
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(rest) = t.strip_prefix(".i ") {
            n = Some(rest.trim().parse().map_err(|_| Error::Parse {
                offset: line_offset,
                message: format!("bad .i line `{t}`"),
            })?);
        } else if let Some(rest) = t.strip_prefix(".o ") {
            let count: usize = rest.trim().parse().map_err(|_| Error::Parse {
                offset: line_offset,
                message: format!("bad .o line `{t}`"),
            })?;
            m = Some(count);
        } else if let Some(rest) = t.strip_prefix(".ilb ") {
            for name in rest.split_whitespace() {
                match name.chars().next() {
                    Some('a') => wa += 1,
                    Some('b') => wb += 1,
                    _ => {
                        return Err(Error::Parse {
                            offset: line_offset,
                            message: format!("unexpected input name `{name}`"),
                        })
                    }
                }
            }
        } else if t.starts_with(".ob") || t.starts_with(".e") {
            continue;
        } else if let Some(rest) = t.strip_prefix(".p ") {
            let _: usize = rest.trim().parse().map_err(|_| Error::Parse {
                offset: line_offset,
                message: format!("bad .p line `{t}`"),
            })?;
        } else {
            let n = n.ok_or(Error::Parse {
                offset: line_offset,
                message: "cube line before .i header".into(),
            })?;
            let m = m.ok_or(Error::Parse {
                offset: line_offset,
                message: "cube line before .o header".into(),
            })?;
            if covers.is_empty() {
                covers = (0..m)
                    .map(|j| SopCover { num_inputs: n, output_index: j as u32, cubes: vec![] })
                    .collect();
            }
            let (pattern, flags) = t.split_once(char::is_whitespace).ok_or(Error::Parse {
                offset: line_offset,
                message: format!("cube line `{t}` lacks an output part"),
            })?;
            let cube = CubePattern::parse(pattern.trim(), n).map_err(|e| Error::Parse {
                offset: line_offset,
                message: e.to_string(),
            })?;
            let flags = flags.trim();
            if flags.len() != m {
                return Err(Error::Parse {
                    offset: line_offset,
                    message: format!("output part `{flags}` has {} columns, expected {m}", flags.len()),
                });
            }
            for (j, ch) in flags.chars().enumerate() {
                match ch {
                    '1' | '4' => covers[j].cubes.push(cube),
                    '0' | '-' | '~' => {}
                    other => {
                        return Err(Error::Parse {
                            offset: line_offset,
                            message: format!("bad output flag `{other}`"),
                        })
                    }
                }
            }
        }
    }

    let n = n.ok_or(Error::Parse { offset: 0, message: "missing .i header".into() })?;
    let m = m.ok_or(Error::Parse { offset: 0, message: "missing .o header".into() })?;
    if covers.is_empty() {
        covers = (0..m)
            .map(|j| SopCover { num_inputs: n, output_index: j as u32, cubes: vec![] })
            .collect();
    }
    if wa + wb != n {
        return Err(Error::Parse {
            offset: 0,
            message: format!(".ilb names {wa}+{wb} inputs but .i declares {n}"),
        });
    }
    Ok((wa, wb, covers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logicsynth::{minimize_model_covers, published_expression_covers};
    use crate::mulcore::Mul3x3_1;

    #[test]
    fn round_trip_is_byte_identical() {
        let covers = minimize_model_covers(&Mul3x3_1).unwrap();
        let text = pla_text(&covers, 3, 3).unwrap();
        let (wa, wb, parsed) = parse_pla(&text).unwrap();
        assert_eq!((wa, wb), (3, 3));
        assert_eq!(parsed, covers);
        assert_eq!(pla_text(&parsed, wa, wb).unwrap(), text);
    }

    #[test]
    fn header_counts_match() {
        let covers = published_expression_covers();
        let text = pla_text(&covers, 3, 3).unwrap();
        assert!(text.starts_with(".i 6\n.o 6\n"));
        assert!(text.contains(".ilb a2 a1 a0 b2 b1 b0"));
        assert!(text.contains(".p 23"));
        assert!(text.ends_with(".e\n"));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_pla("").is_err());
        assert!(parse_pla(".i 6\n01-01- 1\n").is_err()); // no .o
        assert!(parse_pla(".i 2\n.o 1\n.ilb a0 b0\n0x 1\n.e\n").is_err());
        assert!(parse_pla(".i 2\n.o 1\n.ilb a0 b0\n01 11\n.e\n").is_err()); // flag width
    }
}
