//! Mini-grammar for direction vectors on the command line: comma-separated
//! components, each built from decimals, `pi`-rationals like `5pi/22`,
//! `sqrt(k)`, and sums/products thereof. Evaluated in binary64.
//!
//! Grammar per component:
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor | factor)*     (juxtaposition multiplies)
//! factor := NUMBER | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')' | '-' factor
//! ```

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Pi,
    Sqrt,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                i += 1;
            }
            '/' => {
                toks.push(Tok::Slash);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_digit() || d == '.' {
                        i += 1;
                    } else if (d == 'e' || d == 'E')
                        && i + 1 < bytes.len()
                        && (bytes[i + 1].is_ascii_digit()
                            || bytes[i + 1] == b'+'
                            || bytes[i + 1] == b'-')
                    {
                        i += 2;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                        break;
                    } else {
                        break;
                    }
                }
                let text = &s[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number '{text}'")))?;
                toks.push(Tok::Num(v));
            }
            'p' | 'P' => {
                if s[i..].len() >= 2 && s[i..i + 2].eq_ignore_ascii_case("pi") {
                    toks.push(Tok::Pi);
                    i += 2;
                } else {
                    return Err(Error::Parse(format!("unexpected character at {i}")));
                }
            }
            's' | 'S' => {
                if s[i..].len() >= 4 && s[i..i + 4].eq_ignore_ascii_case("sqrt") {
                    toks.push(Tok::Sqrt);
                    i += 4;
                } else {
                    return Err(Error::Parse(format!("unexpected character at {i}")));
                }
            }
            _ => return Err(Error::Parse(format!("unexpected character '{c}' at {i}"))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    depth: u32,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<f64> {
        self.depth += 1;
        if self.depth > 64 {
            return Err(Error::Parse("expression too deeply nested".into()));
        }
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.bump();
                    acc += self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc -= self.term()?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<f64> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc *= self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let d = self.factor()?;
                    if d == 0.0 {
                        return Err(Error::Parse("division by zero".into()));
                    }
                    acc /= d;
                }
                // juxtaposition: `5pi`, `2sqrt(2)`, `pi(1+1)`
                Some(Tok::Num(_)) | Some(Tok::Pi) | Some(Tok::Sqrt) | Some(Tok::LParen) => {
                    acc *= self.factor()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<f64> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(v),
            Some(Tok::Pi) => Ok(std::f64::consts::PI),
            Some(Tok::Minus) => Ok(-self.factor()?),
            Some(Tok::Sqrt) => {
                match self.bump() {
                    Some(Tok::LParen) => {}
                    _ => return Err(Error::Parse("expected '(' after sqrt".into())),
                }
                let v = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => {}
                    _ => return Err(Error::Parse("missing ')' after sqrt argument".into())),
                }
                if v < 0.0 {
                    return Err(Error::Parse("sqrt of a negative value".into()));
                }
                Ok(v.sqrt())
            }
            Some(Tok::LParen) => {
                let v = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(v),
                    _ => Err(Error::Parse("missing ')'".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Evaluate a single scalar expression.
pub fn parse_scalar(s: &str) -> Result<f64> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        depth: 0,
    };
    let v = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::Parse(format!(
            "trailing tokens after position {}",
            p.pos
        )));
    }
    if !v.is_finite() {
        return Err(Error::Parse("expression is not finite".into()));
    }
    Ok(v)
}

/// Parse a comma-separated direction vector, requiring every entry to be
/// strictly positive.
pub fn parse_direction(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.is_empty() || s.trim().is_empty() {
        return Err(Error::Parse("empty direction".into()));
    }
    let mut out = Vec::with_capacity(parts.len());
    for part in parts {
        let v = parse_scalar(part)?;
        if v <= 0.0 {
            return Err(Error::Parse(format!("direction entry {v} must be > 0")));
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_pi_rationals() {
        assert!((parse_scalar("5pi/22").unwrap() - 5.0 * PI / 22.0).abs() < 1e-15);
        assert!((parse_scalar("pi").unwrap() - PI).abs() < 1e-15);
        assert!((parse_scalar("2pi").unwrap() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn parses_sqrt_and_sums() {
        assert!((parse_scalar("sqrt(2)").unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((parse_scalar("1+sqrt(2)").unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!((parse_scalar("2sqrt(3)").unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-15);
        assert!((parse_scalar("1 + 0.1*sqrt(2)").unwrap() - (1.0 + 0.1 * 2f64.sqrt())).abs()
            < 1e-15);
    }

    #[test]
    fn parses_vectors() {
        let v = parse_direction("5pi/22,1").unwrap();
        assert!((v[0] - 5.0 * PI / 22.0).abs() < 1e-15);
        assert!((v[1] - 1.0).abs() < 1e-15);
        let v = parse_direction("1,sqrt(2)").unwrap();
        assert!((v[1] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("pj").is_err());
        assert!(parse_scalar("sqrt(-1)").is_err());
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("1+").is_err());
        assert!(parse_scalar("(1").is_err());
        assert!(parse_direction("1,-2").is_err());
        assert!(parse_direction("0,1").is_err());
        assert!(parse_direction(",").is_err());
    }
}
