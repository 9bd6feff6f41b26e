//! Nonlinearity expressions: a closed node set for the right-hand side g(ζ).
//!
//! The grammar is a tiny infix language — `+`, `-`, `*`, `^` with numeric
//! exponents, the functions `ln`, `exp`, `sqrt`, the variable `zeta`, decimal
//! literals and parentheses. Every nonlinearity used in practice (powers,
//! log-powers, exponentials, shifts `a + zeta`) is expressible, and the closed
//! node set keeps convexity sampling and jet lifting total.
//!
//! The same trees double as closed-form radial profiles: the simulator reads
//! the variable as the radius r instead of ζ.

use serde::Serialize;
use std::fmt;

/// Evaluation ceiling. Values above it saturate to the +∞ sentinel so that
/// blow-up profiles can be probed without `NaN`s leaking out of `eval`.
pub const Z_MAX: f64 = 1e300;

/// Expression node. The set is closed: the parser rejects anything else.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Node {
    /// Numeric constant. Sign is unrestricted at parse time; the
    /// admissibility checks flag nonlinearities that go non-positive.
    Const(f64),
    /// The variable (ζ for nonlinearities, r for radial profiles).
    Var,
    Sum(Box<Node>, Box<Node>),
    Product(Box<Node>, Box<Node>),
    /// Power with a real (literal) exponent.
    Power(Box<Node>, f64),
    Ln(Box<Node>),
    Exp(Box<Node>),
}

impl Node {
    /// True when the subtree is guaranteed non-negative for every input ≥ 0.
    ///
    /// Conservative: `ln` is never guaranteed (it goes negative below 1).
    fn guaranteed_nonneg(&self) -> bool {
        match self {
            Node::Const(c) => *c >= 0.0,
            Node::Var => true,
            Node::Sum(a, b) | Node::Product(a, b) => {
                a.guaranteed_nonneg() && b.guaranteed_nonneg()
            }
            Node::Power(b, _) => b.guaranteed_nonneg(),
            Node::Ln(_) => false,
            Node::Exp(_) => true,
        }
    }
}

/// A parsed nonlinearity (or closed-form radial profile).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonlinearityExpr {
    pub root: Node,
    pub display_name: String,
    /// Non-fatal issues found at parse time, e.g. a fractional power whose
    /// base is not guaranteed non-negative.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at offset {position}")]
    UnknownIdentifier { name: String, position: usize },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("ln of non-positive value {arg} at zeta = {at}")]
    LnDomain { arg: f64, at: f64 },
    #[error("power produced NaN (base {base}, exponent {exponent}) at zeta = {at}")]
    PowerDomain { base: f64, exponent: f64, at: f64 },
    #[error("argument {0} outside [0, Z_MAX]")]
    ArgOutOfRange(f64),
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    warnings: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            warnings: Vec::new(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.src.get(self.pos), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            position: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", byte as char)))
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    node = Node::Sum(Box::new(node), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = negate(self.term()?);
                    node = Node::Sum(Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<Node, ParseError> {
        let mut node = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            node = Node::Product(Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    // factor := atom ('^' exponent)*
    fn factor(&mut self) -> Result<Node, ParseError> {
        let mut node = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.exponent()?;
            if exponent.fract() != 0.0 && !node.guaranteed_nonneg() {
                self.warnings.push(format!(
                    "exponent {exponent} applied to a base not guaranteed non-negative"
                ));
            }
            node = Node::Power(Box::new(node), exponent);
        }
        Ok(node)
    }

    // exponent := ['-'] number | '(' ['-'] number ')'
    fn exponent(&mut self) -> Result<f64, ParseError> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let value = self.signed_number()?;
            self.expect(b')')?;
            Ok(value)
        } else {
            self.signed_number()
        }
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let value = self.number()?;
        Ok(if negative { -value } else { value })
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let node = self.expr()?;
                self.expect(b')')?;
                Ok(node)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(negate(self.atom()?))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number().map(Node::Const),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected character `{}`", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.src.get(self.pos), Some(b'0'..=b'9' | b'.')) {
            self.pos += 1;
        }
        // scientific notation: 1e-3, 2.5E+10
        if matches!(self.src.get(self.pos), Some(b'e' | b'E'))
            && self.pos > start
            && matches!(
                self.src.get(self.pos + 1),
                Some(b'0'..=b'9' | b'+' | b'-')
            )
        {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            while matches!(self.src.get(self.pos), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
        }
        if self.pos == start {
            return Err(self.error("expected a number"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<f64>().map_err(|_| ParseError::Syntax {
            position: start,
            message: format!("invalid numeric literal `{text}`"),
        })
    }

    fn identifier(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.src.get(self.pos), Some(b'a'..=b'z' | b'A'..=b'Z' | b'_')) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii idents");
        match name {
            "zeta" => Ok(Node::Var),
            "ln" | "exp" | "sqrt" => {
                self.expect(b'(')?;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(match name {
                    "ln" => Node::Ln(Box::new(arg)),
                    "exp" => Node::Exp(Box::new(arg)),
                    _ => {
                        if !arg.guaranteed_nonneg() {
                            self.warnings
                                .push("sqrt applied to a base not guaranteed non-negative".into());
                        }
                        Node::Power(Box::new(arg), 0.5)
                    }
                })
            }
            "" => Err(self.error("expected an identifier")),
            _ => Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                position: start,
            }),
        }
    }
}

fn negate(node: Node) -> Node {
    match node {
        Node::Const(c) => Node::Const(-c),
        other => Node::Product(Box::new(Node::Const(-1.0)), Box::new(other)),
    }
}

/// Parse an expression in the grammar above.
pub fn parse(source: &str) -> Result<NonlinearityExpr, ParseError> {
    let mut parser = Parser::new(source);
    let root = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(NonlinearityExpr {
        root,
        display_name: source.trim().to_string(),
        warnings: parser.warnings,
    })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Saturate to the ±∞ sentinel beyond the evaluation ceiling.
fn saturate(v: f64) -> f64 {
    if v > Z_MAX {
        f64::INFINITY
    } else if v < -Z_MAX {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn eval_node(node: &Node, x: f64) -> Result<f64, EvalError> {
    let v = match node {
        Node::Const(c) => *c,
        Node::Var => x,
        Node::Sum(a, b) => {
            let (va, vb) = (eval_node(a, x)?, eval_node(b, x)?);
            if va.is_infinite() && vb.is_infinite() && va.signum() != vb.signum() {
                // ∞ − ∞ from two saturated branches: dominated by the ceiling,
                // report as saturated positive mass (admissible g never hits this).
                f64::INFINITY
            } else {
                va + vb
            }
        }
        Node::Product(a, b) => {
            let (va, vb) = (eval_node(a, x)?, eval_node(b, x)?);
            if va == 0.0 || vb == 0.0 {
                0.0
            } else {
                va * vb
            }
        }
        Node::Power(base, p) => {
            let vb = eval_node(base, x)?;
            let v = vb.powf(*p);
            if v.is_nan() {
                return Err(EvalError::PowerDomain {
                    base: vb,
                    exponent: *p,
                    at: x,
                });
            }
            v
        }
        Node::Ln(a) => {
            let va = eval_node(a, x)?;
            if va <= 0.0 {
                return Err(EvalError::LnDomain { arg: va, at: x });
            }
            va.ln()
        }
        Node::Exp(a) => eval_node(a, x)?.exp(),
    };
    Ok(saturate(v))
}

impl NonlinearityExpr {
    /// Evaluate at ζ. Overflow saturates to `f64::INFINITY` (the sentinel);
    /// finite results are ≤ `Z_MAX`.
    pub fn eval(&self, zeta: f64) -> Result<f64, EvalError> {
        if !(0.0..=Z_MAX).contains(&zeta) {
            return Err(EvalError::ArgOutOfRange(zeta));
        }
        eval_node(&self.root, zeta)
    }

    /// Evaluate without the ζ ≥ 0 domain guard (radial profiles, test probes).
    pub fn eval_unchecked(&self, x: f64) -> Result<f64, EvalError> {
        eval_node(&self.root, x)
    }

    /// Canonical text form with explicit parentheses; reparsing it restores
    /// the identical tree.
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_node(&self.root, &mut out);
        out
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.display_name = name.into();
        self
    }
}

fn render_node(node: &Node, out: &mut String) {
    use fmt::Write;
    match node {
        Node::Const(c) => {
            if *c < 0.0 {
                write!(out, "({c})").unwrap()
            } else {
                write!(out, "{c}").unwrap()
            }
        }
        Node::Var => out.push_str("zeta"),
        Node::Sum(a, b) => {
            out.push('(');
            render_node(a, out);
            out.push_str(" + ");
            render_node(b, out);
            out.push(')');
        }
        Node::Product(a, b) => {
            out.push('(');
            render_node(a, out);
            out.push_str(" * ");
            render_node(b, out);
            out.push(')');
        }
        Node::Power(base, p) => {
            out.push('(');
            render_node(base, out);
            if *p < 0.0 {
                write!(out, " ^ ({p})").unwrap();
            } else {
                write!(out, " ^ {p}").unwrap();
            }
            out.push(')');
        }
        Node::Ln(a) => {
            out.push_str("ln(");
            render_node(a, out);
            out.push(')');
        }
        Node::Exp(a) => {
            out.push_str("exp(");
            render_node(a, out);
            out.push(')');
        }
    }
}

// ---------------------------------------------------------------------------
// Builders (programmatic construction of common families)
// ---------------------------------------------------------------------------

/// g(ζ) = c·ζ^λ.
pub fn power_law(c: f64, lambda: f64) -> NonlinearityExpr {
    let root = if c == 1.0 {
        Node::Power(Box::new(Node::Var), lambda)
    } else {
        Node::Product(
            Box::new(Node::Const(c)),
            Box::new(Node::Power(Box::new(Node::Var), lambda)),
        )
    };
    NonlinearityExpr {
        root,
        display_name: format!("{c}*zeta^{lambda}"),
        warnings: Vec::new(),
    }
}

/// g(ζ) = c·ζ·ln^ν(2+ζ).
pub fn log_power(c: f64, nu: f64) -> NonlinearityExpr {
    let ln_term = Node::Power(
        Box::new(Node::Ln(Box::new(Node::Sum(
            Box::new(Node::Const(2.0)),
            Box::new(Node::Var),
        )))),
        nu,
    );
    let zeta_ln = Node::Product(Box::new(Node::Var), Box::new(ln_term));
    let root = if c == 1.0 {
        zeta_ln
    } else {
        Node::Product(Box::new(Node::Const(c)), Box::new(zeta_ln))
    };
    NonlinearityExpr {
        root,
        display_name: format!("{c}*zeta*ln^{nu}(2+zeta)"),
        warnings: Vec::new(),
    }
}

/// c·g for an already-built g.
pub fn scaled(c: f64, g: &NonlinearityExpr) -> NonlinearityExpr {
    NonlinearityExpr {
        root: Node::Product(Box::new(Node::Const(c)), Box::new(g.root.clone())),
        display_name: format!("{c}*({})", g.display_name),
        warnings: g.warnings.clone(),
    }
}
