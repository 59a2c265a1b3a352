//! Line-oriented file formats.
//!
//! Family file:
//! ```text
//! # comment
//! name = s226-1
//! v = 226
//! k = 6
//! construction = rotational
//! group = SD(P(P(Z(5),Z(5)),Z(3)), 3, [4,4,0; 1,0,0; 0,0,1])
//! fingerprint = [1=59400, ...]
//! block = 0000 0001 0112 0222 0322 0412
//! ```
//!
//! Design file: header `v <int> k <int>`, then one line of k ascending
//! space-separated point indices per block.

use super::{Design, DesignError, DifferenceFamily};
use crate::group::{format_group_spec, parse_group_spec};

pub fn parse_family_file(text: &str) -> Result<DifferenceFamily, DesignError> {
    let mut name_keys: Vec<(String, String)> = Vec::new();
    let mut group = None;
    let mut v: Option<u64> = None;
    let mut k: Option<usize> = None;
    let mut construction: Option<bool> = None;
    let mut blocks: Vec<Vec<String>> = Vec::new();

    for (no, raw) in text.lines().enumerate() {
        let lineno = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(DesignError::Syntax {
            line: lineno,
            message: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "v" => {
                v = Some(value.parse().map_err(|_| DesignError::Syntax {
                    line: lineno,
                    message: "v must be an integer".into(),
                })?)
            }
            "k" => {
                k = Some(value.parse().map_err(|_| DesignError::Syntax {
                    line: lineno,
                    message: "k must be an integer".into(),
                })?)
            }
            "construction" => {
                construction = Some(match value {
                    "plain" => false,
                    "rotational" => true,
                    _ => {
                        return Err(DesignError::Syntax {
                            line: lineno,
                            message: "construction must be `plain` or `rotational`".into(),
                        })
                    }
                })
            }
            "group" => {
                group = Some(parse_group_spec(value).map_err(|e| DesignError::Syntax {
                    line: lineno,
                    message: e.to_string(),
                })?)
            }
            "block" => {
                blocks.push(value.split_whitespace().map(str::to_string).collect());
            }
            _ => name_keys.push((key.to_string(), value.to_string())),
        }
    }

    let group = group.ok_or(DesignError::Consistency("missing `group =` line".into()))?;
    let rotational = construction.ok_or(DesignError::Consistency(
        "missing `construction =` line".into(),
    ))?;
    let family = DifferenceFamily {
        group,
        rotational,
        blocks,
        metadata: name_keys,
    };

    if let Some(declared) = v {
        let actual = family
            .point_count()
            .ok_or(DesignError::Consistency("group order overflows".into()))?;
        if declared != actual {
            return Err(DesignError::Consistency(format!(
                "declared v = {declared} but the group gives v = {actual}"
            )));
        }
    }
    if let Some(declared) = k {
        if let Some(bad) = family.blocks.iter().position(|b| b.len() != declared) {
            return Err(DesignError::Consistency(format!(
                "declared k = {declared} but block #{bad} has {} tokens",
                family.blocks[bad].len()
            )));
        }
    }
    // Token validity (and distinctness within blocks) is checked here so a
    // family read from disk is usable as-is.
    family.realize()?;
    Ok(family)
}

/// Canonical text for a family: metadata first, then blocks with tokens in
/// parsed-index order and block lines sorted.
pub fn write_family_file(family: &DifferenceFamily) -> Result<String, DesignError> {
    use std::fmt::Write;
    let (table, mut blocks) = family.realize()?;
    blocks.sort_unstable();
    let infinity = table.order();
    let mut out = String::new();
    for (key, value) in &family.metadata {
        writeln!(out, "{key} = {value}").unwrap();
    }
    if let Some(v) = family.point_count() {
        writeln!(out, "v = {v}").unwrap();
    }
    writeln!(out, "k = {}", family.block_size()).unwrap();
    writeln!(
        out,
        "construction = {}",
        if family.rotational {
            "rotational"
        } else {
            "plain"
        }
    )
    .unwrap();
    writeln!(out, "group = {}", format_group_spec(&family.group)).unwrap();
    for block in &blocks {
        let tokens: Vec<String> = block
            .iter()
            .map(|&p| {
                if p == infinity {
                    "inf".to_string()
                } else {
                    crate::group::format_element(p, &table)
                }
            })
            .collect();
        writeln!(out, "block = {}", tokens.join(" ")).unwrap();
    }
    Ok(out)
}

pub fn parse_design_file(text: &str) -> Result<Design, DesignError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(no, raw)| (no + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (lineno, header) = lines.next().ok_or(DesignError::Syntax {
        line: 1,
        message: "empty design file".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (v, k) = match fields.as_slice() {
        ["v", v, "k", k] => (
            v.parse::<u32>().map_err(|_| DesignError::Syntax {
                line: lineno,
                message: "bad v".into(),
            })?,
            k.parse::<u32>().map_err(|_| DesignError::Syntax {
                line: lineno,
                message: "bad k".into(),
            })?,
        ),
        _ => {
            return Err(DesignError::Syntax {
                line: lineno,
                message: "expected header `v <int> k <int>`".into(),
            })
        }
    };
    // Same ceiling as realizable group orders; also keeps the pair-counter
    // allocation in verification sane.
    if v as u64 > crate::group::DEFAULT_ORDER_CAP {
        return Err(DesignError::Consistency(format!(
            "v = {v} is beyond the supported range"
        )));
    }
    let mut blocks = Vec::new();
    for (lineno, line) in lines {
        let pts: Result<Vec<u32>, _> = line.split_whitespace().map(str::parse).collect();
        let pts = pts.map_err(|_| DesignError::Syntax {
            line: lineno,
            message: "bad point index".into(),
        })?;
        if pts.len() != k as usize {
            return Err(DesignError::Consistency(format!(
                "line {lineno}: block has {} points, expected k = {k}",
                pts.len()
            )));
        }
        blocks.push(pts);
    }
    Design::new(v, k, blocks)
}

pub fn write_design_file(design: &Design) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "v {} k {}", design.v(), design.k()).unwrap();
    for block in design.blocks() {
        let line: Vec<String> = block.iter().map(|p| p.to_string()).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FANO: &str = "\
name = fano
v = 7
k = 3
construction = plain
group = Z(7)
block = 0 1 3
";

    #[test]
    fn family_round_trip() {
        let family = parse_family_file(FANO).unwrap();
        assert_eq!(family.meta("name"), Some("fano"));
        assert!(!family.rotational);
        assert_eq!(family.blocks, vec![vec!["0", "1", "3"]]);
        let written = write_family_file(&family).unwrap();
        let reparsed = parse_family_file(&written).unwrap();
        assert_eq!(write_family_file(&reparsed).unwrap(), written);
    }

    #[test]
    fn family_consistency_errors() {
        let wrong_k = FANO.replace("k = 3", "k = 6");
        assert!(matches!(
            parse_family_file(&wrong_k),
            Err(DesignError::Consistency(_))
        ));
        let wrong_v = FANO.replace("v = 7", "v = 8");
        assert!(matches!(
            parse_family_file(&wrong_v),
            Err(DesignError::Consistency(_))
        ));
        let inf_in_plain = FANO.replace("block = 0 1 3", "block = 0 1 inf");
        assert!(parse_family_file(&inf_in_plain).is_err());
    }

    #[test]
    fn family_syntax_error_carries_line() {
        let bad = "name = x\nnot a key value line\n";
        match parse_family_file(bad) {
            Err(DesignError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn design_round_trip() {
        let d = crate::design::develop(&crate::design::tests::fano_family())
            .unwrap()
            .design;
        let text = write_design_file(&d);
        let reparsed = parse_design_file(&text).unwrap();
        assert_eq!(reparsed, d);
        assert_eq!(write_design_file(&reparsed), text);
    }

    #[test]
    fn design_file_errors() {
        assert!(parse_design_file("").is_err());
        assert!(parse_design_file("v 7 k 3\n0 1\n").is_err());
        assert!(parse_design_file("v 7 k 3\n0 1 9\n").is_err());
        assert!(parse_design_file("x 7 y 3\n").is_err());
    }
}
