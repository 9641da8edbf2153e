//! Text formats: ANF systems, DIMACS CNF, monomial maps and solutions.
//!
//! ANF grammar, one polynomial per line:
//!
//! ```text
//! c a comment
//! p anf 5
//! x1*x2 + x3 + 1
//! ```
//!
//! Monomials are `x<index>` factors joined by `*` (indices start at 1) or the
//! constant `1`; monomials are joined by `+`. The optional `p anf <vars>`
//! header declares the variable count. Blank lines are ignored.

use std::fmt::Write as _;

use crate::anf::{AnfSystem, Monomial, Polynomial, Resolved, Var};
use crate::cnf::{Clause, Cnf, Lit, MonomialVarMap};
use crate::error::ParseError;
use crate::sat::SolveStatus;

/// Largest accepted variable index in any text format.
pub const MAX_VAR_INDEX: u64 = 1 << 24;

/// A parsed ANF file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnfDocument {
    pub num_vars: usize,
    pub polys: Vec<Polynomial>,
    pub comments: Vec<String>,
}

impl AnfDocument {
    pub fn to_system(&self) -> AnfSystem {
        AnfSystem::from_polys(self.num_vars, self.polys.iter().cloned())
    }
}

fn is_comment(line: &str) -> Option<&str> {
    let rest = line.strip_prefix('c')?;
    if rest.is_empty() {
        Some("")
    } else if rest.starts_with(char::is_whitespace) {
        Some(rest.trim())
    } else {
        None
    }
}

fn parse_index(tok: &str, line: usize) -> Result<u64, ParseError> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(line, format!("bad variable index {tok:?}")));
    }
    let i: u64 = tok
        .parse()
        .map_err(|_| ParseError::new(line, format!("variable index {tok} overflows")))?;
    if i == 0 || i > MAX_VAR_INDEX {
        return Err(ParseError::new(
            line,
            format!("variable index {i} outside 1..={MAX_VAR_INDEX}"),
        ));
    }
    Ok(i)
}

fn parse_monomial(tok: &str, line: usize) -> Result<Option<Monomial>, ParseError> {
    match tok {
        "1" => return Ok(Some(Monomial::one())),
        "0" => return Ok(None),
        "" => return Err(ParseError::new(line, "empty term")),
        _ => {}
    }
    let mut vars = Vec::new();
    for factor in tok.split('*') {
        let factor = factor.trim();
        let Some(digits) = factor.strip_prefix('x') else {
            return Err(ParseError::new(line, format!("bad factor {factor:?}")));
        };
        vars.push(Var(parse_index(digits, line)? as u32 - 1));
    }
    Ok(Some(Monomial::from_vars(vars)))
}

/// Parses one polynomial, e.g. `x1*x2 + x1 + 1`.
pub fn parse_polynomial(text: &str, line: usize) -> Result<Polynomial, ParseError> {
    let mut monos = Vec::new();
    for term in text.split('+') {
        monos.extend(parse_monomial(term.trim(), line)?);
    }
    Ok(Polynomial::normalize(monos))
}

pub fn parse_anf_document(text: &str) -> Result<AnfDocument, ParseError> {
    let mut doc = AnfDocument::default();
    let mut declared: Option<usize> = None;
    let mut max_used = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = is_comment(t) {
            doc.comments.push(c.to_string());
            continue;
        }
        if let Some(rest) = t.strip_prefix("p ") {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() != 2 || f[0] != "anf" || declared.is_some() {
                return Err(ParseError::new(line, "bad header, expected `p anf <vars>`"));
            }
            let n: u64 = f[1]
                .parse()
                .map_err(|_| ParseError::new(line, format!("bad variable count {:?}", f[1])))?;
            if n > MAX_VAR_INDEX {
                return Err(ParseError::new(
                    line,
                    format!("variable count {n} too large"),
                ));
            }
            declared = Some(n as usize);
            continue;
        }
        let p = parse_polynomial(t, line)?;
        let used = p.max_var().map_or(0, |v| v.index() + 1);
        if let Some(n) = declared {
            if used > n {
                return Err(ParseError::new(
                    line,
                    format!("variable x{used} beyond declared count {n}"),
                ));
            }
        }
        max_used = max_used.max(used);
        doc.polys.push(p);
    }
    doc.num_vars = declared.unwrap_or(0).max(max_used);
    Ok(doc)
}

pub fn parse_anf(text: &str) -> Result<AnfSystem, ParseError> {
    parse_anf_document(text).map(|d| d.to_system())
}

pub fn write_anf(doc: &AnfDocument) -> String {
    let mut out = String::new();
    for c in &doc.comments {
        if c.is_empty() {
            out.push_str("c\n");
        } else {
            let _ = writeln!(out, "c {c}");
        }
    }
    let _ = writeln!(out, "p anf {}", doc.num_vars);
    for p in &doc.polys {
        let _ = writeln!(out, "{p}");
    }
    out
}

/// The processed system: value lines, then equivalence lines, then the
/// remaining polynomials.
pub fn write_processed_anf(sys: &AnfSystem) -> String {
    let mut values = Vec::new();
    let mut equivs = Vec::new();
    for i in 0..sys.num_vars() as u32 {
        let v = Var(i);
        match sys.resolve(v) {
            Resolved::Value(c) => values.push(Polynomial::var_plus(v, c)),
            Resolved::Free(l) if l.var != v => {
                equivs.push(Polynomial::var(v).add(&Polynomial::var_plus(l.var, l.negated)))
            }
            Resolved::Free(_) => {}
        }
    }
    let polys = if sys.is_contradiction() {
        vec![Polynomial::one()]
    } else {
        values
            .into_iter()
            .chain(equivs)
            .chain(sys.polys().cloned())
            .collect()
    };
    write_anf(&AnfDocument {
        num_vars: sys.num_vars(),
        polys,
        comments: Vec::new(),
    })
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() || is_comment(t).is_some() || t == "%" {
            continue;
        }
        if let Some(rest) = t.strip_prefix("p ") {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if header.is_some() || f.len() != 3 || f[0] != "cnf" {
                return Err(ParseError::new(
                    line,
                    "bad header, expected `p cnf <vars> <clauses>`",
                ));
            }
            let nums: Result<Vec<u64>, _> = f[1..].iter().map(|s| s.parse::<u64>()).collect();
            let nums = nums.map_err(|_| ParseError::new(line, "non-integer in header"))?;
            if nums[0] > MAX_VAR_INDEX {
                return Err(ParseError::new(
                    line,
                    format!("variable count {} too large", nums[0]),
                ));
            }
            header = Some((nums[0] as usize, nums[1] as usize));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(ParseError::new(line, "clause before `p cnf` header"));
        };
        for tok in t.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| ParseError::new(line, format!("non-integer token {tok:?}")))?;
            if x == 0 {
                if let Some(c) = Clause::new(current.drain(..)) {
                    clauses.push(c);
                }
                continue;
            }
            if x.unsigned_abs() > vars as u64 {
                return Err(ParseError::new(
                    line,
                    format!("literal {x} beyond declared {vars} variables"),
                ));
            }
            current.push(Lit::from_dimacs(x).expect("nonzero and in range"));
        }
    }
    let Some((vars, _)) = header else {
        return Err(ParseError::new(last_line.max(1), "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(ParseError::new(last_line, "unterminated clause"));
    }
    Ok(Cnf::new(vars, clauses))
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c.lits() {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// One line per CNF variable, `<var> = <monomial>` or `<var> = aux`,
/// 1-based like DIMACS.
pub fn write_map(map: &MonomialVarMap) -> String {
    let mut out = String::new();
    for v in 0..map.num_vars() as u32 {
        if let Some(m) = map.monomial(v) {
            let _ = writeln!(out, "{} = {m}", v + 1);
        } else if map.is_aux(v) {
            let _ = writeln!(out, "{} = aux", v + 1);
        }
    }
    out
}

pub fn parse_map(text: &str) -> Result<MonomialVarMap, ParseError> {
    let mut anf_vars = 0usize;
    let mut num_vars = 0usize;
    let mut monos = Vec::new();
    let mut aux = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() || is_comment(t).is_some() {
            continue;
        }
        let Some((lhs, rhs)) = t.split_once('=') else {
            return Err(ParseError::new(line, "expected `<var> = <monomial>`"));
        };
        let v = parse_index(lhs.trim(), line)? as u32 - 1;
        if !seen.insert(v) {
            return Err(ParseError::new(
                line,
                format!("variable {} listed twice", v + 1),
            ));
        }
        num_vars = num_vars.max(v as usize + 1);
        let rhs = rhs.trim();
        if rhs == "aux" {
            aux.push(v);
            continue;
        }
        let m = parse_monomial(rhs, line)?
            .filter(|m| !m.is_one())
            .ok_or_else(|| ParseError::new(line, "a variable cannot stand for a constant"))?;
        if m.degree() == 1 {
            let x = m.vars().next().unwrap();
            if x.0 != v || v as usize != anf_vars {
                return Err(ParseError::new(
                    line,
                    "single variables must map to themselves, in order, before any product",
                ));
            }
            anf_vars += 1;
        } else {
            if m.vars().any(|x| x.index() >= anf_vars) {
                return Err(ParseError::new(line, "product over an unlisted variable"));
            }
            if monos.iter().any(|(_, other)| other == &m) {
                return Err(ParseError::new(line, format!("monomial {m} mapped twice")));
            }
            monos.push((v, m));
        }
    }
    if seen.len() != num_vars {
        return Err(ParseError::new(
            text.lines().count().max(1),
            "variable numbering has gaps",
        ));
    }
    Ok(MonomialVarMap::from_entries(anf_vars, num_vars, monos, aux))
}

/// `s` status line, then the model as signed 1-based literals in `v` lines.
pub fn write_solution(status: SolveStatus, model: Option<&[bool]>) -> String {
    let mut out = String::new();
    out.push_str(match status {
        SolveStatus::Sat => "s SATISFIABLE\n",
        SolveStatus::Unsat => "s UNSATISFIABLE\n",
        SolveStatus::Unknown => "s UNKNOWN\n",
    });
    if let (SolveStatus::Sat, Some(m)) = (status, model) {
        for chunk in m
            .chunks(10)
            .enumerate()
            .map(|(k, c)| (k * 10, c))
            .collect::<Vec<_>>()
        {
            out.push('v');
            for (i, &b) in chunk.1.iter().enumerate() {
                let idx = (chunk.0 + i + 1) as i64;
                let _ = write!(out, " {}", if b { idx } else { -idx });
            }
            out.push('\n');
        }
        out.push_str("v 0\n");
    }
    out
}

pub fn parse_solution(text: &str) -> Result<(SolveStatus, Option<Vec<bool>>), ParseError> {
    let mut status = None;
    let mut lits: Vec<i64> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() || is_comment(t).is_some() {
            continue;
        }
        if let Some(s) = t.strip_prefix("s ") {
            status = Some(match s.trim() {
                "SATISFIABLE" => SolveStatus::Sat,
                "UNSATISFIABLE" => SolveStatus::Unsat,
                "UNKNOWN" => SolveStatus::Unknown,
                other => return Err(ParseError::new(line, format!("unknown status {other:?}"))),
            });
        } else if let Some(rest) = t.strip_prefix('v') {
            for tok in rest.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| ParseError::new(line, format!("non-integer token {tok:?}")))?;
                if x != 0 {
                    lits.push(x);
                }
            }
        } else {
            return Err(ParseError::new(line, "expected `s` or `v` line"));
        }
    }
    let status = status.ok_or_else(|| ParseError::new(1, "missing status line"))?;
    if status != SolveStatus::Sat {
        return Ok((status, None));
    }
    let mut model = vec![false; lits.len()];
    for (i, &x) in lits.iter().enumerate() {
        if x.unsigned_abs() != i as u64 + 1 {
            return Err(ParseError::new(1, "model literals out of order"));
        }
        model[i] = x > 0;
    }
    Ok((status, Some(model)))
}
