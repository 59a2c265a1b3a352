//! Text grammar for group specs, used inside family and search config files:
//!
//! ```text
//! spec := Z(<n>) | P(<spec>,<spec>) | SD(<spec>, <m>, [img; img; ...])
//! img  := comma-separated coordinate tuple, e.g. 4,4,0
//! ```

use super::{GroupError, GroupSpec};

pub fn parse_group_spec(text: &str) -> Result<GroupSpec, GroupError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    let spec = p.spec()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return Err(p.err("trailing input after group spec"));
    }
    Ok(spec)
}

pub fn format_group_spec(spec: &GroupSpec) -> String {
    match spec {
        GroupSpec::Cyclic(n) => format!("Z({n})"),
        GroupSpec::DirectProduct(l, r) => {
            format!("P({},{})", format_group_spec(l), format_group_spec(r))
        }
        GroupSpec::Semidirect {
            normal,
            acting_order,
            action,
        } => {
            let imgs = action
                .iter()
                .map(|img| {
                    img.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect::<Vec<_>>()
                .join("; ");
            format!(
                "SD({}, {}, [{}])",
                format_group_spec(normal),
                acting_order,
                imgs
            )
        }
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> GroupError {
        GroupError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<(), GroupError> {
        self.skip_ws();
        if self.pos < self.text.len() && self.text[self.pos] == c {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn number(&mut self) -> Result<u32, GroupError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn tuple(&mut self) -> Result<Vec<u32>, GroupError> {
        let mut out = vec![self.number()?];
        loop {
            self.skip_ws();
            if self.pos < self.text.len() && self.text[self.pos] == b',' {
                self.pos += 1;
                out.push(self.number()?);
            } else {
                return Ok(out);
            }
        }
    }

    fn spec(&mut self) -> Result<GroupSpec, GroupError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(b"SD") {
            self.pos += 2;
            self.eat(b'(')?;
            let normal = self.spec()?;
            self.eat(b',')?;
            let m = self.number()?;
            self.eat(b',')?;
            self.eat(b'[')?;
            let mut action = vec![self.tuple()?];
            loop {
                self.skip_ws();
                if self.pos < self.text.len() && self.text[self.pos] == b';' {
                    self.pos += 1;
                    action.push(self.tuple()?);
                } else {
                    break;
                }
            }
            self.eat(b']')?;
            self.eat(b')')?;
            Ok(GroupSpec::Semidirect {
                normal: Box::new(normal),
                acting_order: m,
                action,
            })
        } else if self.text[self.pos..].starts_with(b"P") {
            self.pos += 1;
            self.eat(b'(')?;
            let l = self.spec()?;
            self.eat(b',')?;
            let r = self.spec()?;
            self.eat(b')')?;
            Ok(GroupSpec::DirectProduct(Box::new(l), Box::new(r)))
        } else if self.text[self.pos..].starts_with(b"Z") {
            self.pos += 1;
            self.eat(b'(')?;
            let n = self.number()?;
            self.eat(b')')?;
            Ok(GroupSpec::Cyclic(n))
        } else {
            Err(self.err("expected Z(, P( or SD("))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_226_spec() {
        let text = "SD(P(P(Z(5),Z(5)),Z(3)), 3, [4,4,0; 1,0,0; 0,0,1])";
        let spec = parse_group_spec(text).unwrap();
        assert_eq!(spec.order(), Some(225));
        match &spec {
            GroupSpec::Semidirect {
                acting_order,
                action,
                ..
            } => {
                assert_eq!(*acting_order, 3);
                assert_eq!(action.len(), 3);
                assert_eq!(action[0], vec![4, 4, 0]);
            }
            _ => panic!("wrong shape"),
        }
        assert_eq!(parse_group_spec(&format_group_spec(&spec)).unwrap(), spec);
    }

    #[test]
    fn parses_the_441_spec() {
        let text = "P(SD(Z(7),3,[2]), SD(Z(7),3,[2]))";
        let spec = parse_group_spec(text).unwrap();
        assert_eq!(spec.order(), Some(441));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_group_spec("Q(5)").is_err());
        assert!(parse_group_spec("Z(5) trailing").is_err());
        assert!(parse_group_spec("SD(Z(7),3)").is_err());
    }
}
