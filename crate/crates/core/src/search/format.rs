//! Search config files share the family-file key grammar:
//!
//! ```text
//! group = Z(13)
//! k = 3
//! construction = plain
//! multiplier = [3]          # repeatable; generator images, ';'-separated
//! limit_nodes = 100000
//! limit_seconds = 60
//! limit_solutions = 4
//! seed = 0
//! ```

use super::SearchConfig;
use crate::design::DesignError;
use crate::group::parse_group_spec;

pub fn parse_search_config(text: &str) -> Result<SearchConfig, DesignError> {
    let mut group = None;
    let mut k = None;
    let mut rotational = false;
    let mut multipliers = Vec::new();
    let mut limit_nodes = None;
    let mut limit_seconds = None;
    let mut limit_solutions = None;
    let mut seed = 0u64;

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
        let int = |what: &str| -> Result<u64, DesignError> {
            value.parse().map_err(|_| DesignError::Syntax {
                line: lineno,
                message: format!("{what} must be an integer"),
            })
        };
        match key {
            "group" => {
                group = Some(parse_group_spec(value).map_err(|e| DesignError::Syntax {
                    line: lineno,
                    message: e.to_string(),
                })?)
            }
            "k" => k = Some(int("k")? as u32),
            "construction" => {
                rotational = match value {
                    "plain" => false,
                    "rotational" => true,
                    _ => {
                        return Err(DesignError::Syntax {
                            line: lineno,
                            message: "construction must be `plain` or `rotational`".into(),
                        })
                    }
                }
            }
            "multiplier" => multipliers.push(parse_images(value, lineno)?),
            "limit_nodes" => limit_nodes = Some(int("limit_nodes")?),
            "limit_seconds" => limit_seconds = Some(int("limit_seconds")?),
            "limit_solutions" => limit_solutions = Some(int("limit_solutions")?),
            "seed" => seed = int("seed")?,
            _ => {
                return Err(DesignError::Syntax {
                    line: lineno,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
    }
    let group = group.ok_or(DesignError::Consistency("missing `group =` line".into()))?;
    let k = k.ok_or(DesignError::Consistency("missing `k =` line".into()))?;
    Ok(SearchConfig {
        group,
        k,
        rotational,
        multipliers,
        limit_nodes,
        limit_seconds,
        limit_solutions,
        seed,
    })
}

/// `[4,4,0; 1,0,0; 0,0,1]` -> one coordinate tuple per generator.
fn parse_images(value: &str, lineno: usize) -> Result<Vec<Vec<u32>>, DesignError> {
    let inner = value
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or(DesignError::Syntax {
            line: lineno,
            message: "multiplier must be bracketed: [img; img; ...]".into(),
        })?;
    inner
        .split(';')
        .map(|img| {
            img.split(',')
                .map(|c| {
                    c.trim().parse::<u32>().map_err(|_| DesignError::Syntax {
                        line: lineno,
                        message: "bad coordinate in multiplier image".into(),
                    })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = "\
group = Z(13)
k = 3
construction = plain
multiplier = [3]
limit_nodes = 1000
limit_solutions = 2
seed = 7
";
        let config = parse_search_config(text).unwrap();
        assert_eq!(config.k, 3);
        assert!(!config.rotational);
        assert_eq!(config.multipliers, vec![vec![vec![3]]]);
        assert_eq!(config.limit_nodes, Some(1000));
        assert_eq!(config.limit_seconds, None);
        assert_eq!(config.limit_solutions, Some(2));
        assert_eq!(config.seed, 7);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(parse_search_config("group = Z(7)\nk = 3\nfrobnicate = 1\n").is_err());
        assert!(parse_search_config("group = Z(7)\nk = banana\n").is_err());
        assert!(parse_search_config("k = 3\n").is_err());
        assert!(parse_search_config("group = Z(7)\nk = 3\nmultiplier = 3\n").is_err());
    }
}
