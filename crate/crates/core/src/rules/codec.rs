//! Canonical rule strings.
//!
//! ```text
//! TOPS:n=<n>,m=<m>:<digits>   one base-m digit per tops profile, ascending tops code
//! FULL:n=<n>,m=<m>:<digits>   one base-m digit per profile, ascending profile code
//! DICT:<i>  CONST:<x>  BORDALEX  MAJLEX
//! ```
//!
//! Closed forms carry no dimensions, so parsing them needs the ambient
//! `(n, m)`. `CONST` prints its alternative as an index digit and accepts a
//! letter name as well.

use std::fmt;

use super::{Repr, Rule};
use crate::domain::{Alternative, Dims};
use crate::error::{Error, Result};

pub(super) fn write_rule(rule: &Rule, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let dims = rule.dims();
    let digits = |f: &mut fmt::Formatter<'_>, table: &[Alternative]| {
        table
            .iter()
            .try_for_each(|a| write!(f, "{}", a.index()))
    };
    match rule.repr() {
        Repr::TopsTable(table) => {
            write!(f, "TOPS:n={},m={}:", dims.agents, dims.alts)?;
            digits(f, table)
        }
        Repr::FullTable(table) => {
            write!(f, "FULL:n={},m={}:", dims.agents, dims.alts)?;
            digits(f, table)
        }
        Repr::Dictator(i) => write!(f, "DICT:{i}"),
        Repr::Constant(x) => write!(f, "CONST:{}", x.index()),
        Repr::BordaLex => f.write_str("BORDALEX"),
        Repr::MajorityLex => f.write_str("MAJLEX"),
    }
}

/// Parses a canonical rule string. Table forms carry their own dimensions;
/// when `dims` is also given the two must agree.
pub fn parse_rule(s: &str, dims: Option<Dims>) -> Result<Rule> {
    let (tag, rest) = match s.find(':') {
        Some(k) => (&s[..k], Some((k + 1, &s[k + 1..]))),
        None => (s, None),
    };
    let need_dims = || {
        dims.ok_or_else(|| {
            Error::parse(0, format!("`{tag}` needs the agent and alternative counts from context"))
        })
    };
    let no_payload = |what: &str| match rest {
        None => Ok(()),
        Some((at, _)) => Err(Error::parse(at - 1, format!("`{what}` takes no argument"))),
    };
    let payload = |what: &str| {
        rest.ok_or_else(|| Error::parse(s.len(), format!("`{what}` expects `:` and an argument")))
    };
    match tag {
        "BORDALEX" => {
            no_payload(tag)?;
            Ok(Rule::borda_lex(need_dims()?))
        }
        "MAJLEX" => {
            no_payload(tag)?;
            Rule::majority_lex(need_dims()?).map_err(|e| Error::parse(0, e.to_string()))
        }
        "DICT" => {
            let dims = need_dims()?;
            let (at, arg) = payload(tag)?;
            let agent = parse_uint(arg, at)?;
            Rule::dictator(dims, agent).map_err(|e| Error::parse(at, e.to_string()))
        }
        "CONST" => {
            let dims = need_dims()?;
            let (at, arg) = payload(tag)?;
            let x = parse_alternative(arg, at)?;
            Rule::constant(dims, x).map_err(|e| Error::parse(at, e.to_string()))
        }
        "TOPS" | "FULL" => {
            let (at, arg) = payload(tag)?;
            let (embedded, digits_at) = parse_dims_header(arg, at)?;
            if let Some(ctx) = dims {
                if ctx != embedded {
                    return Err(Error::parse(
                        at,
                        format!("rule declares {embedded} but the context is {ctx}"),
                    ));
                }
            }
            let digits = &s[digits_at..];
            let table = parse_digits(digits, digits_at, embedded.alts)?;
            let built = if tag == "TOPS" {
                Rule::tops_table(embedded, table)
            } else {
                Rule::full_table(embedded, table)
            };
            built.map_err(|e| Error::parse(digits_at + digits.len(), e.to_string()))
        }
        _ => Err(Error::parse(0, format!("unknown rule kind `{tag}`"))),
    }
}

fn parse_uint(text: &str, at: usize) -> Result<usize> {
    if text.is_empty() {
        return Err(Error::parse(at, "expected a number"));
    }
    if let Some(k) = text.find(|c: char| !c.is_ascii_digit()) {
        return Err(Error::parse(at + k, "expected a decimal digit"));
    }
    if text.len() > 1 && text.starts_with('0') {
        return Err(Error::parse(at, "leading zeros are not canonical"));
    }
    text.parse::<usize>()
        .map_err(|_| Error::parse(at, "number too large"))
}

fn parse_alternative(text: &str, at: usize) -> Result<Alternative> {
    let mut chars = text.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_digit() => Ok(Alternative::of(c as usize - '0' as usize)),
        (Some(c), None) => {
            Alternative::from_name(c).ok_or_else(|| Error::parse(at, format!("`{c}` is not an alternative")))
        }
        _ => Err(Error::parse(at, "expected a single alternative digit or letter")),
    }
}

/// Parses `n=<n>,m=<m>:` and returns the dims and the offset of the digits.
fn parse_dims_header(text: &str, at: usize) -> Result<(Dims, usize)> {
    let mut pos = 0;
    let field = |key: &str, sep: char, pos: &mut usize| -> Result<usize> {
        if !text[*pos..].starts_with(key) {
            return Err(Error::parse(at + *pos, format!("expected `{key}`")));
        }
        *pos += key.len();
        let len = text[*pos..].find(|c: char| !c.is_ascii_digit()).unwrap_or(text.len() - *pos);
        let value = parse_uint(&text[*pos..*pos + len], at + *pos)?;
        *pos += len;
        if !text[*pos..].starts_with(sep) {
            return Err(Error::parse(at + *pos, format!("expected `{sep}`")));
        }
        *pos += 1;
        Ok(value)
    };
    let n = field("n=", ',', &mut pos)?;
    let m = field("m=", ':', &mut pos)?;
    let dims = Dims::new(n, m).map_err(|e| Error::parse(at, e.to_string()))?;
    Ok((dims, at + pos))
}

fn parse_digits(digits: &str, at: usize, alts: usize) -> Result<Vec<Alternative>> {
    digits
        .char_indices()
        .map(|(k, c)| match c.to_digit(10) {
            Some(v) if (v as usize) < alts => Ok(Alternative::of(v as usize)),
            Some(v) => Err(Error::parse(at + k, format!("outcome {v} out of range for m={alts}"))),
            None => Err(Error::parse(at + k, format!("`{c}` is not an outcome digit"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize, m: usize) -> Option<Dims> {
        Some(Dims::new(n, m).unwrap())
    }

    fn pos(r: Result<Rule>) -> usize {
        match r {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_closed_forms() {
        for rule in Rule::library(Dims::new(3, 2).unwrap()) {
            let text = rule.to_string();
            assert_eq!(parse_rule(&text, Some(rule.dims())).unwrap(), rule, "{text}");
        }
    }

    #[test]
    fn dictator_tables_have_expected_digits() {
        let dims = Dims::new(2, 3).unwrap();
        for (i, digits) in [(0, "000111222"), (1, "012012012")] {
            let t = Rule::dictator(dims, i).unwrap().to_tops_table().unwrap();
            assert_eq!(t.to_string(), format!("TOPS:n=2,m=3:{digits}"));
            assert_eq!(parse_rule(&t.to_string(), None).unwrap(), t);
        }
    }

    #[test]
    fn const_accepts_letters() {
        let a = parse_rule("CONST:b", d(2, 3)).unwrap();
        assert_eq!(a.to_string(), "CONST:1");
    }

    #[test]
    fn malformed_strings_report_positions() {
        assert_eq!(pos(parse_rule("NOPE", d(2, 3))), 0);
        assert_eq!(pos(parse_rule("DICT:x", d(2, 3))), 5);
        assert_eq!(pos(parse_rule("DICT:01", d(2, 3))), 5);
        assert_eq!(pos(parse_rule("DICT", d(2, 3))), 4);
        assert_eq!(pos(parse_rule("DICT:0", None)), 0);
        assert_eq!(pos(parse_rule("BORDALEX:1", d(2, 3))), 8);
        assert_eq!(pos(parse_rule("TOPS:n=2,m=3:00011122", None)), 21);
        assert_eq!(pos(parse_rule("TOPS:n=2,m=3:000111223", None)), 21);
        assert_eq!(pos(parse_rule("TOPS:n=2,m=3:0001112x2", None)), 20);
        assert_eq!(pos(parse_rule("TOPS:n=2;m=3:000111222", None)), 8);
        assert_eq!(pos(parse_rule("TOPS:q=2,m=3:000111222", None)), 5);
        assert_eq!(pos(parse_rule("TOPS:n=2,m=3:000111222", d(3, 3))), 5);
        assert_eq!(pos(parse_rule("MAJLEX", d(2, 3))), 0);
    }
}
