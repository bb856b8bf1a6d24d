//! Line-oriented ECNF text format.
//!
//! ```text
//! theory tsp3
//! atom p q r
//! int x [0,5]
//! clause p | -q
//! equiv r <=> p & q
//! sum v <=> 2 x + 3 y >= 4
//! csum v <=> [p] 2 x + [q] y != 3
//! define {
//!   r <- p | q.
//!   s <- true.
//! }
//! minimize 2 x - p + 1
//! ```
//!
//! Identifiers may carry a parenthesized argument list, e.g. `Next(a,b)`.
//! `#` starts a comment. Semantic checks are left to
//! [`validate_theory`](crate::ecnf::validate_theory).

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::ecnf::{
    Comparator, Connective, Constraint, Definition, GuardedTerm, IntVar, LinearTerm, Literal, Objective, Rule,
    Theory,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Newline,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Bar,
    Amp,
    Minus,
    Plus,
    Dot,
    Iff,
    Arrow,
    Cmp(Comparator),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Newline => write!(f, "end of line"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Bar => write!(f, "`|`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Iff => write!(f, "`<=>`"),
            Tok::Arrow => write!(f, "`<-`"),
            Tok::Cmp(c) => write!(f, "`{}`", c.symbol()),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut last_line = 1;
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        last_line = line_no;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: line_no, column });
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '(' {
                    let mut depth = 0;
                    loop {
                        if i >= chars.len() {
                            return Err(ParseError {
                                line: line_no,
                                column: i + 1,
                                expected: "`)`".into(),
                                found: "end of line".into(),
                            });
                        }
                        match chars[i] {
                            '(' => depth += 1,
                            ')' => depth -= 1,
                            ch if ch.is_ascii_alphanumeric() || ch == '_' || ch == ',' => {}
                            ch => {
                                return Err(ParseError {
                                    line: line_no,
                                    column: i + 1,
                                    expected: "identifier argument".into(),
                                    found: format!("`{ch}`"),
                                })
                            }
                        }
                        i += 1;
                        if depth == 0 {
                            break;
                        }
                    }
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse::<i64>().map_err(|_| ParseError {
                    line: line_no,
                    column,
                    expected: "integer in range".into(),
                    found: format!("`{s}`"),
                })?;
                push(&mut out, Tok::Int(v));
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let (tok, len) = if rest.starts_with("<=>") {
                (Tok::Iff, 3)
            } else if rest.starts_with("<=") {
                (Tok::Cmp(Comparator::Leq), 2)
            } else if rest.starts_with("<-") {
                (Tok::Arrow, 2)
            } else if rest.starts_with(">=") {
                (Tok::Cmp(Comparator::Geq), 2)
            } else if rest.starts_with("!=") {
                (Tok::Cmp(Comparator::Neq), 2)
            } else {
                let t = match c {
                    '<' => Tok::Cmp(Comparator::Lt),
                    '>' => Tok::Cmp(Comparator::Gt),
                    '=' => Tok::Cmp(Comparator::Eq),
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    '|' => Tok::Bar,
                    '&' => Tok::Amp,
                    '-' => Tok::Minus,
                    '+' => Tok::Plus,
                    '.' => Tok::Dot,
                    other => {
                        return Err(ParseError {
                            line: line_no,
                            column,
                            expected: "a token".into(),
                            found: format!("`{other}`"),
                        })
                    }
                };
                (t, 1)
            };
            push(&mut out, tok);
            i += len;
        }
        out.push(Spanned { tok: Tok::Newline, line: line_no, column: chars.len() + 1 });
    }
    out.push(Spanned { tok: Tok::Eof, line: last_line + 1, column: 1 });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError { line: s.line, column: s.column, expected: expected.to_string(), found: s.tok.to_string() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s != "true" && s != "false" => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.bump();
        }
    }

    fn end_of_statement(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.error("end of line")),
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek() {
            Tok::Int(v) => {
                let v = *v;
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.error("integer")),
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            Ok(Literal::neg(self.ident("atom")?))
        } else {
            Ok(Literal::pos(self.ident("literal")?))
        }
    }

    /// `LIT (sep LIT)*` with a single separator kind; returns the connective
    /// (`And` when there is only one literal).
    fn body(&mut self) -> Result<(Connective, Vec<Literal>), ParseError> {
        let mut lits = vec![self.literal()?];
        let mut connective = None;
        loop {
            let c = match self.peek() {
                Tok::Amp => Connective::And,
                Tok::Bar => Connective::Or,
                _ => break,
            };
            if connective.is_some_and(|k| k != c) {
                return Err(self.error("the same connective throughout the body"));
            }
            connective = Some(c);
            self.bump();
            lits.push(self.literal()?);
        }
        Ok((connective.unwrap_or(Connective::And), lits))
    }

    /// One signed term; `Ok(Err(c))` is a bare constant.
    fn term(&mut self, sign: i64) -> Result<Result<LinearTerm, i64>, ParseError> {
        let mut sign = sign;
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -sign;
        }
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                if let Tok::Ident(_) = self.peek() {
                    let name = self.ident("variable")?;
                    Ok(Ok(LinearTerm::new(sign * v, name)))
                } else {
                    Ok(Err(sign * v))
                }
            }
            Tok::Ident(_) => Ok(Ok(LinearTerm::new(sign, self.ident("variable")?))),
            _ => Err(self.error("term")),
        }
    }

    fn sep_sign(&mut self) -> Option<i64> {
        match self.peek() {
            Tok::Plus => {
                self.bump();
                Some(1)
            }
            Tok::Minus => {
                self.bump();
                Some(-1)
            }
            _ => None,
        }
    }

    fn terms(&mut self) -> Result<(Vec<LinearTerm>, i64), ParseError> {
        let mut terms = Vec::new();
        let mut constant = 0;
        let mut sign = 1;
        loop {
            match self.term(sign)? {
                Ok(t) => terms.push(t),
                Err(c) => constant += c,
            }
            match self.sep_sign() {
                Some(s) => sign = s,
                None => return Ok((terms, constant)),
            }
        }
    }

    fn guarded_terms(&mut self) -> Result<Vec<GuardedTerm>, ParseError> {
        let mut out = Vec::new();
        if let Tok::Int(0) = self.peek() {
            self.bump();
            return Ok(out);
        }
        let mut sign = 1;
        loop {
            self.expect(Tok::LBracket, "`[`")?;
            let guard = self.literal()?;
            self.expect(Tok::RBracket, "`]`")?;
            match self.term(sign)? {
                Ok(term) => out.push(GuardedTerm { guard, term }),
                Err(_) => return Err(self.error("variable after the coefficient")),
            }
            match self.sep_sign() {
                Some(s) => sign = s,
                None if *self.peek() == Tok::LBracket => sign = 1,
                None => return Ok(out),
            }
        }
    }

    fn comparator(&mut self) -> Result<Comparator, ParseError> {
        match self.peek() {
            Tok::Cmp(c) => {
                let c = *c;
                self.bump();
                Ok(c)
            }
            _ => Err(self.error("comparison operator")),
        }
    }

    fn definition(&mut self) -> Result<Definition, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut rules = Vec::new();
        loop {
            self.skip_newlines();
            if *self.peek() == Tok::RBrace {
                self.bump();
                return Ok(Definition { rules });
            }
            let head = self.ident("rule head or `}`")?;
            self.expect(Tok::Arrow, "`<-`")?;
            let rule = match self.peek() {
                Tok::Ident(s) if s == "true" => {
                    self.bump();
                    Rule::and(head, Vec::new())
                }
                Tok::Ident(s) if s == "false" => {
                    self.bump();
                    Rule::or(head, Vec::new())
                }
                _ => {
                    let (connective, body) = self.body()?;
                    Rule { head, connective, body }
                }
            };
            self.expect(Tok::Dot, "`.`")?;
            rules.push(rule);
        }
    }
}

pub fn parse_ecnf_text(text: &str) -> Result<Theory, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut theory = Theory::default();
    let mut definitions = Vec::new();
    loop {
        p.skip_newlines();
        let keyword = match p.peek() {
            Tok::Eof => break,
            Tok::Ident(k) => k.clone(),
            _ => return Err(p.error("statement keyword")),
        };
        p.bump();
        match keyword.as_str() {
            "theory" => theory.name = p.ident("theory name")?,
            "atom" => {
                theory.declare_atoms([p.ident("atom name")?]);
                while let Tok::Ident(_) = p.peek() {
                    theory.declare_atoms([p.ident("atom name")?]);
                }
            }
            "int" => {
                let name = p.ident("variable name")?;
                let bounds = if *p.peek() == Tok::LBracket {
                    p.bump();
                    let lo = p.signed_int()?;
                    p.expect(Tok::Comma, "`,`")?;
                    let up = p.signed_int()?;
                    p.expect(Tok::RBracket, "`]`")?;
                    Some((lo, up))
                } else {
                    None
                };
                theory.int_vars.push(IntVar { name, bounds });
            }
            "clause" => {
                let mut lits = Vec::new();
                if !matches!(p.peek(), Tok::Newline | Tok::Eof) {
                    lits.push(p.literal()?);
                    while *p.peek() == Tok::Bar {
                        p.bump();
                        lits.push(p.literal()?);
                    }
                }
                theory.constraints.push(Constraint::Clause(lits));
            }
            "equiv" => {
                let head = p.ident("equivalence head atom")?;
                p.expect(Tok::Iff, "`<=>`")?;
                let (connective, body) = p.body()?;
                theory.constraints.push(Constraint::Equivalence { head, connective, body });
            }
            "sum" => {
                let head = p.literal()?;
                p.expect(Tok::Iff, "`<=>`")?;
                let (terms, constant) = p.terms()?;
                let cmp = p.comparator()?;
                let rhs = p.signed_int()? - constant;
                theory.constraints.push(Constraint::ReifiedSum { head, terms, cmp, rhs });
            }
            "csum" => {
                let head = p.literal()?;
                p.expect(Tok::Iff, "`<=>`")?;
                let terms = p.guarded_terms()?;
                let cmp = p.comparator()?;
                let rhs = p.signed_int()?;
                theory.constraints.push(Constraint::ConditionalReifiedSum { head, terms, cmp, rhs });
            }
            "define" => definitions.push(p.definition()?),
            "minimize" => {
                let (terms, constant) = p.terms()?;
                theory.objective = Some(Objective { terms, constant });
            }
            _ => {
                p.pos -= 1;
                return Err(p.error("statement keyword"));
            }
        }
        p.end_of_statement()?;
    }
    for d in definitions {
        theory.add_definition(d);
    }
    Ok(theory)
}

fn write_terms(out: &mut String, terms: &[LinearTerm], constant: i64) {
    let mut first = true;
    for t in terms {
        let (sign, mag) = if first {
            first = false;
            if t.coefficient == -1 {
                ("-", None)
            } else if t.coefficient == 1 {
                ("", None)
            } else {
                ("", Some(t.coefficient))
            }
        } else if t.coefficient < 0 {
            (" - ", (t.coefficient != -1).then(|| -t.coefficient))
        } else {
            (" + ", (t.coefficient != 1).then_some(t.coefficient))
        };
        out.push_str(sign);
        if let Some(m) = mag {
            let _ = write!(out, "{m} ");
        }
        out.push_str(&t.variable);
    }
    if first {
        let _ = write!(out, "{constant}");
    } else if constant > 0 {
        let _ = write!(out, " + {constant}");
    } else if constant < 0 {
        let _ = write!(out, " - {}", -constant);
    }
}

fn write_body(out: &mut String, connective: Connective, body: &[Literal]) {
    let sep = match connective {
        Connective::And => " & ",
        Connective::Or => " | ",
    };
    let parts: Vec<String> = body.iter().map(|l| l.to_string()).collect();
    out.push_str(&parts.join(sep));
}

/// Canonical text: declarations, then constraints, definitions and the
/// objective, one construct per line.
pub fn print_ecnf_text(theory: &Theory) -> String {
    let mut out = String::new();
    if !theory.name.is_empty() {
        let _ = writeln!(out, "theory {}", theory.name);
    }
    if !theory.atoms.is_empty() {
        let names: Vec<&str> = theory.atoms.iter().map(|a| a.name.as_str()).collect();
        let _ = writeln!(out, "atom {}", names.join(" "));
    }
    for v in &theory.int_vars {
        match v.bounds {
            Some((lo, up)) => {
                let _ = writeln!(out, "int {} [{lo},{up}]", v.name);
            }
            None => {
                let _ = writeln!(out, "int {}", v.name);
            }
        }
    }
    for c in &theory.constraints {
        match c {
            Constraint::Clause(lits) => {
                out.push_str("clause");
                if !lits.is_empty() {
                    out.push(' ');
                    write_body(&mut out, Connective::Or, lits);
                }
            }
            Constraint::Equivalence { head, connective, body } => {
                let _ = write!(out, "equiv {head} <=> ");
                write_body(&mut out, *connective, body);
            }
            Constraint::ReifiedSum { head, terms, cmp, rhs } => {
                let _ = write!(out, "sum {head} <=> ");
                write_terms(&mut out, terms, 0);
                let _ = write!(out, " {} {rhs}", cmp.symbol());
            }
            Constraint::ConditionalReifiedSum { head, terms, cmp, rhs } => {
                let _ = write!(out, "csum {head} <=> ");
                if terms.is_empty() {
                    out.push('0');
                }
                for (i, g) in terms.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    let _ = write!(out, "[{}] ", g.guard);
                    if g.term.coefficient != 1 {
                        let _ = write!(out, "{} ", g.term.coefficient);
                    }
                    out.push_str(&g.term.variable);
                }
                let _ = write!(out, " {} {rhs}", cmp.symbol());
            }
        }
        out.push('\n');
    }
    for d in &theory.definitions {
        out.push_str("define {\n");
        for r in &d.rules {
            let _ = write!(out, "  {} <- ", r.head);
            match (r.connective, r.body.is_empty()) {
                (Connective::And, true) => out.push_str("true"),
                (Connective::Or, true) => out.push_str("false"),
                _ => write_body(&mut out, r.connective, &r.body),
            }
            out.push_str(".\n");
        }
        out.push_str("}\n");
    }
    if let Some(o) = &theory.objective {
        out.push_str("minimize ");
        write_terms(&mut out, &o.terms, o.constant);
        out.push('\n');
    }
    out
}
