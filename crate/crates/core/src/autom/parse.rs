//! Text format for automaton families.
//!
//! ```text
//! # Grigorchuk group
//! degree = 2
//! a = [1,0]
//! b = (a, c)
//! c = (a, d)
//! d = (1, b)
//! ```
//!
//! Each generator line is `name = [perm] (w_0, …, w_{d-1})` where either part
//! may be omitted (a missing permutation is the identity, missing sections are
//! all trivial). `perm` lists the images of `0..d-1`. A section word is a
//! space-separated list of generator names, a trailing `'` marks an inverse,
//! and `1`, `""` or nothing denotes the identity. Names may be used before
//! they are declared; undeclared names are rejected.

use super::automaton::{parse_word_with, Automaton, GroupWord, Recursion};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::tree::Degree;

struct RawLine<'a> {
    line: usize,
    name: &'a str,
    perm: Option<(usize, &'a str)>,
    sections: Option<(usize, &'a str)>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let mut degree: Option<Degree> = None;
    let mut raw: Vec<RawLine<'_>> = Vec::new();
    for (idx, full) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = full.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let eq = line
            .find('=')
            .ok_or_else(|| err(line_no, 1, "expected 'name = definition'"))?;
        let name = line[..eq].trim();
        let rhs_start = eq + 1;
        let rhs = &line[rhs_start..];
        if name == "degree" {
            let d: usize = rhs
                .trim()
                .parse()
                .map_err(|_| err(line_no, rhs_start + 1, "degree must be an integer"))?;
            degree = Some(Degree::new(d).map_err(|e| err(line_no, rhs_start + 1, e.to_string()))?);
            continue;
        }
        if !is_name(name) || name == "degree" {
            return Err(err(line_no, 1, format!("invalid generator name '{name}'")));
        }
        if raw.iter().any(|r| r.name == name) {
            return Err(err(line_no, 1, format!("generator '{name}' declared twice")));
        }
        let mut perm = None;
        let mut sections = None;
        let mut rest = rhs;
        let mut offset = rhs_start;
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        rest = trimmed;
        if rest.starts_with('[') {
            let close = rest
                .find(']')
                .ok_or_else(|| err(line_no, offset + 1, "unterminated permutation"))?;
            perm = Some((offset + 1, &rest[1..close]));
            offset += close + 1;
            rest = &rest[close + 1..];
            let trimmed = rest.trim_start();
            offset += rest.len() - trimmed.len();
            rest = trimmed;
        }
        if rest.starts_with('(') {
            let close = rest
                .rfind(')')
                .ok_or_else(|| err(line_no, offset + 1, "unterminated section list"))?;
            sections = Some((offset + 1, &rest[1..close]));
            offset += close + 1;
            rest = &rest[close + 1..];
        }
        if !rest.trim().is_empty() {
            return Err(err(line_no, offset + 1, format!("unexpected '{}'", rest.trim())));
        }
        if perm.is_none() && sections.is_none() {
            return Err(err(line_no, rhs_start + 1, "empty definition"));
        }
        raw.push(RawLine {
            line: line_no,
            name,
            perm,
            sections,
        });
    }
    let degree = degree.ok_or_else(|| err(1, 1, "missing 'degree = d' header"))?;
    if raw.is_empty() {
        return Err(err(1, 1, "empty generating set"));
    }
    let names: Vec<&str> = raw.iter().map(|r| r.name).collect();
    let lookup = |n: &str| names.iter().position(|m| *m == n);
    let mut recursions = Vec::with_capacity(raw.len());
    for r in &raw {
        let root_perm = match r.perm {
            None => Perm::identity(degree.get()),
            Some((col, body)) => {
                let images = body
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u32>()
                            .map_err(|_| err(r.line, col, format!("bad image '{}'", t.trim())))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                if images.len() != degree.get() {
                    return Err(err(
                        r.line,
                        col,
                        format!("permutation needs {} images", degree.get()),
                    ));
                }
                Perm::from_images(images).map_err(|e| err(r.line, col, e.to_string()))?
            }
        };
        let sections = match r.sections {
            None => vec![GroupWord::identity(); degree.get()],
            Some((col, body)) => {
                let parts: Vec<&str> = body.split(',').collect();
                if parts.len() != degree.get() {
                    return Err(err(
                        r.line,
                        col,
                        format!("expected {} sections, got {}", degree.get(), parts.len()),
                    ));
                }
                parts
                    .iter()
                    .map(|p| {
                        let p = p.trim().trim_matches('"');
                        parse_word_with(p, lookup).map_err(|e| match e {
                            Error::Parse { message, .. } => err(r.line, col, message),
                            other => other,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        recursions.push(Recursion {
            name: r.name.to_string(),
            root_perm,
            sections,
        });
    }
    Automaton::new(degree, recursions)
}

/// Renders a family back into the text format.
pub fn format_automaton(automaton: &Automaton) -> String {
    let mut out = format!("degree = {}\n", automaton.degree().get());
    for r in automaton.recursions() {
        let sections: Vec<String> = r
            .sections
            .iter()
            .map(|w| automaton.format_word(w))
            .collect();
        out.push_str(&format!("{} = {} ({})\n", r.name, r.root_perm, sections.join(", ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grigorchuk() {
        let a = parse_automaton(
            "# comment\ndegree = 2\na = [1,0]\nb = (a, c)\nc = (a, d)\nd = (1, b)\n",
        )
        .unwrap();
        assert_eq!(a.generator_count(), 4);
        assert_eq!(a.name(3), "d");
    }

    #[test]
    fn perm_and_sections_together() {
        let a = parse_automaton("degree = 2\nx = [1,0] (\"\", x)").unwrap();
        assert_eq!(a.recursions()[0].sections[1].len(), 1);
        let text = format_automaton(&a);
        assert!(text.contains("x = [1,0] (1, x)"));
    }

    #[test]
    fn rejects_undeclared_name() {
        let e = parse_automaton("degree = 2\na = (a, z)").unwrap_err();
        match e {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("'z'"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_degree_and_empty_set() {
        assert!(parse_automaton("a = [1,0]").is_err());
        assert!(parse_automaton("degree = 2\n").is_err());
    }

    #[test]
    fn rejects_wrong_arity() {
        assert!(parse_automaton("degree = 3\na = [1,0]").is_err());
        assert!(parse_automaton("degree = 2\na = (a, a, a)").is_err());
    }
}
