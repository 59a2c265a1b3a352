//! Element token parsing and formatting.
//!
//! Tokens follow the compact convention used in the bundled family data:
//! a string of digits, one per coordinate ("0412"), or the literal "inf" for
//! the extra point of a pointed domain. Groups with a single coordinate use a
//! plain decimal token, and groups with any radix above 10 use comma-separated
//! decimal coordinates, since single digits cannot express those.

use super::{GroupError, GroupTable, PointedDomain};

fn compact(radices: &[u32]) -> bool {
    radices.len() > 1 && radices.iter().all(|&r| r <= 10)
}

/// Parse a token as a group element index. "inf" is rejected here.
pub fn parse_element(token: &str, table: &GroupTable) -> Result<u32, GroupError> {
    if token == "inf" {
        return Err(GroupError::InfinityNotAllowed);
    }
    let radices = table.radices();
    let coords: Vec<u32> = if radices.len() == 1 {
        vec![token.parse::<u32>().map_err(|_| GroupError::BadLength {
            expected: 1,
            got: 0,
        })?]
    } else if compact(radices) {
        let digits: Option<Vec<u32>> = token.chars().map(|c| c.to_digit(10)).collect();
        let digits = digits.ok_or(GroupError::BadLength {
            expected: radices.len(),
            got: 0,
        })?;
        if digits.len() != radices.len() {
            return Err(GroupError::BadLength {
                expected: radices.len(),
                got: digits.len(),
            });
        }
        digits
    } else {
        let parts: Result<Vec<u32>, _> =
            token.split(',').map(|p| p.trim().parse::<u32>()).collect();
        parts.map_err(|_| GroupError::BadLength {
            expected: radices.len(),
            got: 0,
        })?
    };
    table.index_of(&coords)
}

/// Format an element index as a token; exact inverse of [`parse_element`].
pub fn format_element(index: u32, table: &GroupTable) -> String {
    let radices = table.radices();
    let coords = table.coords(index);
    if radices.len() == 1 {
        coords[0].to_string()
    } else if compact(radices) {
        coords
            .iter()
            .map(|c| char::from_digit(*c, 10).unwrap())
            .collect()
    } else {
        coords
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Parse a token as a point of a pointed domain; "inf" maps to the ∞ index.
pub fn parse_point(token: &str, domain: &PointedDomain) -> Result<u32, GroupError> {
    if token == "inf" {
        Ok(domain.infinity())
    } else {
        parse_element(token, domain.base())
    }
}

/// Format a point of a pointed domain.
pub fn format_point(index: u32, domain: &PointedDomain) -> String {
    if index == domain.infinity() {
        "inf".to_string()
    } else {
        format_element(index, domain.base())
    }
}
