//! Parser and evaluator for the scalar expressions accepted in configs.
//!
//! The grammar covers numeric literals, a declared variable set, the binary
//! operators `+ - * / ^` (standard precedence, `^` right-associative and
//! binding tighter than unary minus), the calls `min(a,b)`, `max(a,b)`,
//! `abs(a)`, `exp(a)`, `log(a)` (natural), `sqrt(a)`, and the conditional
//! `if(cond, a, b)` where `cond` compares two expressions with one of
//! `< <= > >= = !=`. The `=` comparison is exact floating equality; piecewise
//! boundaries should prefer `<=`/`>=`.
//!
//! Evaluation is IEEE double precision and never propagates non-finite
//! values silently: division by zero, `log` of a nonpositive argument,
//! `sqrt` of a negative argument, fractional powers of negative bases and
//! any overflow to infinity all surface as [`EvalError`]s.

use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Maximum parenthesis/operator nesting accepted by the parser.
const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown variable '{name}' at position {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("function '{name}' at position {position} takes {expected} argument(s), got {got}")]
    Arity {
        name: String,
        position: usize,
        expected: usize,
        got: usize,
    },
}

impl ParseError {
    /// Byte offset of the error in the source text.
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownVariable { position, .. }
            | ParseError::Arity { position, .. } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("missing binding for variable '{0}'")]
    MissingBinding(String),
    #[error("non-finite value from {0}")]
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Func {
    Min,
    Max,
    Abs,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Min => "min",
            Func::Max => "max",
            Func::Abs => "abs",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            Func::Abs | Func::Exp | Func::Log | Func::Sqrt => 1,
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            "abs" => Some(Func::Abs),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

/// Comparison between two expressions, usable only as an `if` condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cond {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

/// Abstract syntax tree of a parsed expression.
///
/// Variables are resolved to indices into the declared variable list at
/// parse time, so hot evaluation paths take a plain `&[f64]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Expr {
    Num(f64),
    Var {
        index: usize,
        name: String,
    },
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        args: Vec<Expr>,
    },
    If {
        cond: Box<Cond>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

impl Expr {
    pub fn var(index: usize, name: &str) -> Expr {
        Expr::Var {
            index,
            name: name.to_string(),
        }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn if_then_else(cond: Cond, then: Expr, otherwise: Expr) -> Expr {
        Expr::If {
            cond: Box::new(cond),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    /// Evaluate against positional bindings (one slot per declared variable).
    pub fn eval_slice(&self, bindings: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var { index, name } => bindings
                .get(*index)
                .copied()
                .ok_or_else(|| EvalError::MissingBinding(name.clone())),
            Expr::Neg(e) => Ok(-e.eval_slice(bindings)?),
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.eval_slice(bindings)?;
                let b = rhs.eval_slice(bindings)?;
                let v = match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::Domain(format!("division by zero: {} / 0", a)));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        let v = a.powf(b);
                        if v.is_nan() {
                            return Err(EvalError::Domain(format!("invalid power: {}^{}", a, b)));
                        }
                        v
                    }
                };
                ensure_finite(v, op.symbol())
            }
            Expr::Call { func, args } => {
                let a = args[0].eval_slice(bindings)?;
                let v = match func {
                    Func::Min => a.min(args[1].eval_slice(bindings)?),
                    Func::Max => a.max(args[1].eval_slice(bindings)?),
                    Func::Abs => a.abs(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(EvalError::Domain(format!(
                                "log of nonpositive value {}",
                                a
                            )));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::Domain(format!("sqrt of negative value {}", a)));
                        }
                        a.sqrt()
                    }
                };
                ensure_finite(v, func.name())
            }
            Expr::If {
                cond,
                then,
                otherwise,
            } => {
                let a = cond.lhs.eval_slice(bindings)?;
                let b = cond.rhs.eval_slice(bindings)?;
                if cond.op.holds(a, b) {
                    then.eval_slice(bindings)
                } else {
                    otherwise.eval_slice(bindings)
                }
            }
        }
    }

    /// Evaluate against named bindings.
    pub fn eval(&self, bindings: &[(&str, f64)]) -> Result<f64, EvalError> {
        let mut slots = vec![f64::NAN; bindings.len()];
        self.bind_named(bindings, &mut slots)?;
        self.eval_slice(&slots)
    }

    fn bind_named(&self, bindings: &[(&str, f64)], slots: &mut Vec<f64>) -> Result<(), EvalError> {
        match self {
            Expr::Var { index, name } => {
                let (_, v) = bindings
                    .iter()
                    .find(|(n, _)| n == name)
                    .ok_or_else(|| EvalError::MissingBinding(name.clone()))?;
                if !v.is_finite() {
                    return Err(EvalError::NonFinite(format!("binding {}", name)));
                }
                if *index >= slots.len() {
                    slots.resize(*index + 1, f64::NAN);
                }
                slots[*index] = *v;
                Ok(())
            }
            Expr::Num(_) => Ok(()),
            Expr::Neg(e) => e.bind_named(bindings, slots),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.bind_named(bindings, slots)?;
                rhs.bind_named(bindings, slots)
            }
            Expr::Call { args, .. } => {
                for a in args {
                    a.bind_named(bindings, slots)?;
                }
                Ok(())
            }
            Expr::If {
                cond,
                then,
                otherwise,
            } => {
                cond.lhs.bind_named(bindings, slots)?;
                cond.rhs.bind_named(bindings, slots)?;
                then.bind_named(bindings, slots)?;
                otherwise.bind_named(bindings, slots)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 5,
        }
    }
}

fn ensure_finite(v: f64, what: &str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite(what.to_string()))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{}", v),
            Expr::Var { name, .. } => write!(f, "{}", name),
            Expr::Neg(e) => {
                if e.precedence() < 3 {
                    write!(f, "-({})", e)
                } else {
                    write!(f, "-{}", e)
                }
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                // '^' is right-associative; the others are left-associative.
                let (lp, rp) = if *op == BinOp::Pow {
                    // lhs of '^' must be an atom; rhs may be a unary chain.
                    (5, 3)
                } else {
                    (p, p + 1)
                };
                if lhs.precedence() < lp {
                    write!(f, "({})", lhs)?;
                } else {
                    write!(f, "{}", lhs)?;
                }
                write!(f, " {} ", op.symbol())?;
                if rhs.precedence() < rp {
                    write!(f, "({})", rhs)
                } else {
                    write!(f, "{}", rhs)
                }
            }
            Expr::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
            Expr::If {
                cond,
                then,
                otherwise,
            } => {
                write!(
                    f,
                    "if({} {} {}, {}, {})",
                    cond.lhs,
                    cond.op.symbol(),
                    cond.rhs,
                    then,
                    otherwise
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Cmp(CmpOp),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {}", v),
            Tok::Ident(s) => format!("identifier '{}'", s),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Cmp(op) => format!("'{}'", op.symbol()),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Cmp(CmpOp::Le), i));
                    i += 2;
                } else {
                    toks.push((Tok::Cmp(CmpOp::Lt), i));
                    i += 1;
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Cmp(CmpOp::Ge), i));
                    i += 2;
                } else {
                    toks.push((Tok::Cmp(CmpOp::Gt), i));
                    i += 1;
                }
            }
            '=' => {
                toks.push((Tok::Cmp(CmpOp::Eq), i));
                i += 1;
            }
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Cmp(CmpOp::Ne), i));
                    i += 2;
                } else {
                    return Err(ParseError::Syntax {
                        position: i,
                        expected: "'=' after '!'".into(),
                    });
                }
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(ParseError::Syntax {
                            position: i,
                            expected: "digit after decimal point".into(),
                        });
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    position: start,
                    expected: "valid numeric literal".into(),
                })?;
                if !v.is_finite() {
                    return Err(ParseError::Syntax {
                        position: start,
                        expected: "literal within double-precision range".into(),
                    });
                }
                toks.push((Tok::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError::Syntax {
                    position: i,
                    expected: format!("valid token, found '{}'", c),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [&'a str],
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(what))
        }
    }

    fn syntax(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(t) => format!("{}, found {}", expected, t.describe()),
            None => expected.to_string(),
        };
        ParseError::Syntax {
            position: self.here(),
            expected: found,
        }
    }

    fn additive(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative(depth)?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.multiplicative(depth)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let mut lhs = self.unary(depth)?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary(depth)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self, depth: usize) -> Result<Expr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.syntax("expression nested too deeply"));
        }
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary(depth + 1)?)));
        }
        self.power(depth)
    }

    fn power(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let base = self.atom(depth)?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            // right-associative: exponent may itself contain '-' and '^'
            let exponent = self.unary(depth + 1)?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self, depth: usize) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.additive(depth + 1)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.ident(name, pos, depth),
            Some(t) => Err(ParseError::Syntax {
                position: pos,
                expected: format!("operand, found {}", t.describe()),
            }),
            None => Err(ParseError::Syntax {
                position: pos,
                expected: "operand".into(),
            }),
        }
    }

    fn ident(&mut self, name: String, pos: usize, depth: usize) -> Result<Expr, ParseError> {
        if name == "if" {
            self.expect(Tok::LParen, "'(' after 'if'")?;
            let cond = self.condition(depth + 1)?;
            self.expect(Tok::Comma, "',' after if condition")?;
            let then = self.additive(depth + 1)?;
            self.expect(Tok::Comma, "',' after if branch")?;
            let otherwise = self.additive(depth + 1)?;
            self.expect(Tok::RParen, "')' closing 'if'")?;
            return Ok(Expr::if_then_else(cond, then, otherwise));
        }
        if let Some(func) = Func::from_name(&name) {
            self.expect(Tok::LParen, &format!("'(' after '{}'", name))?;
            let mut args = vec![self.additive(depth + 1)?];
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                args.push(self.additive(depth + 1)?);
            }
            self.expect(Tok::RParen, "')' closing call")?;
            if args.len() != func.arity() {
                return Err(ParseError::Arity {
                    name,
                    position: pos,
                    expected: func.arity(),
                    got: args.len(),
                });
            }
            return Ok(Expr::Call { func, args });
        }
        if let Some(index) = self.vars.iter().position(|v| *v == name) {
            if self.peek() == Some(&Tok::LParen) {
                return Err(self.syntax(&format!("operator after variable '{}'", name)));
            }
            return Ok(Expr::var(index, &name));
        }
        if self.peek() == Some(&Tok::LParen) {
            return Err(ParseError::Syntax {
                position: pos,
                expected: format!(
                    "known function (min, max, abs, exp, log, sqrt, if), found '{}'",
                    name
                ),
            });
        }
        Err(ParseError::UnknownVariable {
            name,
            position: pos,
        })
    }

    fn condition(&mut self, depth: usize) -> Result<Cond, ParseError> {
        let lhs = self.additive(depth)?;
        let op = match self.peek() {
            Some(Tok::Cmp(op)) => *op,
            _ => return Err(self.syntax("comparison operator (<, <=, >, >=, =, !=)")),
        };
        self.pos += 1;
        let rhs = self.additive(depth)?;
        Ok(Cond { lhs, op, rhs })
    }
}

/// Parse `src` against a declared variable set.
///
/// Variable indices in the returned AST follow the order of `vars`.
///
/// ```
/// let map = zetafix::expr::parse("if(x <= 0.5, x / 2, 0)", &["x"]).unwrap();
/// assert_eq!(map.eval(&[("x", 0.5)]).unwrap(), 0.25);
/// assert_eq!(map.eval(&[("x", 0.7)]).unwrap(), 0.0);
/// ```
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError::Syntax {
            position: 0,
            expected: "nonempty expression".into(),
        });
    }
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        end: src.len(),
    };
    let e = p.additive(0)?;
    if p.pos < p.toks.len() {
        return Err(p.syntax("end of expression"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, bindings: &[(&str, f64)]) -> f64 {
        let vars: Vec<&str> = bindings.iter().map(|(n, _)| *n).collect();
        parse(src, &vars).unwrap().eval(bindings).unwrap()
    }

    #[test]
    fn precedence_mul_over_add() {
        assert_eq!(ev("2+3*4", &[]), 14.0);
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(ev("2^3^2", &[]), 512.0);
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        assert_eq!(ev("-2^2", &[]), -4.0);
        assert_eq!(ev("(-2)^2", &[]), 4.0);
        assert_eq!(ev("2^-1", &[]), 0.5);
    }

    #[test]
    fn division_and_subtraction_are_left_associative() {
        assert_eq!(ev("8/4/2", &[]), 1.0);
        assert_eq!(ev("8-4-2", &[]), 2.0);
    }

    #[test]
    fn piecewise_map_matches_both_branches() {
        let e = parse("if(x <= 0.5, x/2, 0)", &["x"]).unwrap();
        assert_eq!(e.eval(&[("x", 0.7)]).unwrap(), 0.0);
        assert_eq!(e.eval(&[("x", 0.5)]).unwrap(), 0.25);
        assert_eq!(e.eval(&[("x", 0.25)]).unwrap(), 0.125);
    }

    #[test]
    fn ratio_zeta_evaluates_to_hand_value() {
        let e = parse("s - ((t+2)/(t+1))*t", &["t", "s"]).unwrap();
        let v = e.eval(&[("t", 0.25), ("s", 0.5)]).unwrap();
        assert!((v - 0.05).abs() < 1e-15, "{}", v);
    }

    #[test]
    fn max_call() {
        assert_eq!(ev("max(x, y)", &[("x", 0.3), ("y", 0.7)]), 0.7);
    }

    #[test]
    fn truncated_input_reports_position() {
        let err = parse("s - ", &["s"]).unwrap_err();
        match err {
            ParseError::Syntax { position, .. } => assert_eq!(position, 4),
            other => panic!("unexpected error {:?}", other),
        }
    }

    #[test]
    fn unknown_variable_reports_name_and_position() {
        let err = parse("x + q", &["x"]).unwrap_err();
        match err {
            ParseError::UnknownVariable { name, position } => {
                assert_eq!(name, "q");
                assert_eq!(position, 4);
            }
            other => panic!("unexpected error {:?}", other),
        }
    }

    #[test]
    fn wrong_arity_is_rejected() {
        let err = parse("min(1)", &[]).unwrap_err();
        match err {
            ParseError::Arity {
                name,
                expected,
                got,
                ..
            } => {
                assert_eq!(name, "min");
                assert_eq!(expected, 2);
                assert_eq!(got, 1);
            }
            other => panic!("unexpected error {:?}", other),
        }
    }

    #[test]
    fn condition_requires_comparison() {
        assert!(parse("if(x, 1, 2)", &["x"]).is_err());
    }

    #[test]
    fn division_by_zero_is_a_domain_error() {
        let e = parse("1/x", &["x"]).unwrap();
        assert!(matches!(e.eval(&[("x", 0.0)]), Err(EvalError::Domain(_))));
    }

    #[test]
    fn log_of_nonpositive_is_a_domain_error() {
        let e = parse("log(x)", &["x"]).unwrap();
        assert!(matches!(e.eval(&[("x", -1.0)]), Err(EvalError::Domain(_))));
        assert!(matches!(e.eval(&[("x", 0.0)]), Err(EvalError::Domain(_))));
    }

    #[test]
    fn overflow_is_not_silent() {
        let e = parse("exp(x)", &["x"]).unwrap();
        assert!(matches!(
            e.eval(&[("x", 1000.0)]),
            Err(EvalError::NonFinite(_))
        ));
    }

    #[test]
    fn zero_to_negative_power_is_rejected() {
        let e = parse("x^-1", &["x"]).unwrap();
        assert!(e.eval(&[("x", 0.0)]).is_err());
    }

    #[test]
    fn missing_binding_is_reported() {
        let e = parse("x + y", &["x", "y"]).unwrap();
        assert!(matches!(
            e.eval(&[("x", 1.0)]),
            Err(EvalError::MissingBinding(_))
        ));
    }

    #[test]
    fn display_round_trips_structurally() {
        for src in [
            "2+3*4",
            "2^3^2",
            "(2^3)^2",
            "-(x+1)",
            "if(x <= 0.5, x/2, 0)",
            "s - ((t+2)/(t+1))*t",
            "max(abs(x - y), 0.001)",
            "8-4-2",
            "8-(4-2)",
            "x/(y*2)",
        ] {
            let vars = &["x", "y", "t", "s"];
            let a = parse(src, vars).unwrap();
            let b = parse(&a.to_string(), vars).unwrap();
            assert_eq!(a, b, "round trip failed for '{}' -> '{}'", src, a);
        }
    }

    #[test]
    fn equality_comparison_is_exact() {
        let e = parse("if(x = y, 0, 1)", &["x", "y"]).unwrap();
        assert_eq!(e.eval(&[("x", 0.5), ("y", 0.5)]).unwrap(), 0.0);
        assert_eq!(e.eval(&[("x", 0.5), ("y", 0.5 + 1e-12)]).unwrap(), 1.0);
    }
}
