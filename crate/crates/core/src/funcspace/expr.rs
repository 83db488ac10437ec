//! Arithmetic expressions of one real variable: recursive-descent parser,
//! printer, and evaluator.
//!
//! Grammar (byte offsets reported on errors):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := unary ('^' factor)?            -- right associative
//! unary  := '-'? atom
//! atom   := number | 'x' | ident '(' expr ')' | '(' expr ')' | 'pi' | 'e'
//! ```
//!
//! Note the grammar makes unary minus bind tighter than `^`: `-x^2` parses
//! as `(-x)^2`. Printing uses minimal parentheses and `parse(print(t)) == t`
//! for every parser-produced tree.

use std::fmt;

/// Binary operators in source precedence order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// The named single-argument functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// Abstract syntax tree of a one-variable expression.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionExpr {
    Literal(f64),
    Var,
    Pi,
    E,
    Neg(Box<FunctionExpr>),
    Bin(BinOp, Box<FunctionExpr>, Box<FunctionExpr>),
    Apply(Func, Box<FunctionExpr>),
}

/// Parse failure with the byte offset of the offending input and the set
/// of token kinds that would have been accepted there.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("at byte {offset}: expected {}; found {found}", expected.join(", "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

/// Evaluation failure at a single point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{func} domain error at argument {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("non-finite result in {context}")]
    NonFinite { context: &'static str },
}

/// Parse `text` into an expression tree; the whole input must be consumed.
pub fn parse_expr(text: &str) -> Result<FunctionExpr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

const ATOM_EXPECTED: &[&str] = &[
    "number",
    "'x'",
    "'pi'",
    "'e'",
    "function name",
    "'('",
    "'-'",
];

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        let found = match self.src.get(self.pos) {
            Some(&b) => format!("'{}'", b as char),
            None => "end of input".to_string(),
        };
        ParseError {
            offset: self.pos,
            expected: expected.to_vec(),
            found,
        }
    }

    fn expr(&mut self) -> Result<FunctionExpr, ParseError> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    node = FunctionExpr::Bin(BinOp::Add, Box::new(node), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    node = FunctionExpr::Bin(BinOp::Sub, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<FunctionExpr, ParseError> {
        let mut node = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    node = FunctionExpr::Bin(BinOp::Mul, Box::new(node), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    node = FunctionExpr::Bin(BinOp::Div, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn factor(&mut self) -> Result<FunctionExpr, ParseError> {
        let base = self.unary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.factor()?; // right associative
            return Ok(FunctionExpr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<FunctionExpr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.atom()?;
            return Ok(FunctionExpr::Neg(Box::new(inner)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<FunctionExpr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error(&["')'"]));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            _ => Err(self.error(ATOM_EXPECTED)),
        }
    }

    fn number(&mut self) -> Result<FunctionExpr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == frac_start {
                return Err(self.error(&["digit"]));
            }
        }
        if matches!(self.src.get(self.pos), Some(&b'e') | Some(&b'E')) {
            // Exponent part only when followed by a (signed) digit run;
            // otherwise the 'e' is the Euler constant of a product like "2e".
            let mut probe = self.pos + 1;
            if matches!(self.src.get(probe), Some(&b'+') | Some(&b'-')) {
                probe += 1;
            }
            if self.src.get(probe).is_some_and(|b| b.is_ascii_digit()) {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match text.parse::<f64>() {
            Ok(v) => Ok(FunctionExpr::Literal(v)),
            Err(_) => Err(ParseError {
                offset: start,
                expected: vec!["number"],
                found: format!("'{text}'"),
            }),
        }
    }

    fn ident(&mut self) -> Result<FunctionExpr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
        match name {
            "x" => Ok(FunctionExpr::Var),
            "pi" => Ok(FunctionExpr::Pi),
            "e" => Ok(FunctionExpr::E),
            _ => {
                if let Some(func) = Func::from_name(name) {
                    if self.peek() != Some(b'(') {
                        return Err(self.error(&["'('"]));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    if self.peek() != Some(b')') {
                        return Err(self.error(&["')'"]));
                    }
                    self.pos += 1;
                    Ok(FunctionExpr::Apply(func, Box::new(arg)))
                } else {
                    Err(ParseError {
                        offset: start,
                        expected: vec![
                            "'x'", "'pi'", "'e'", "sin", "cos", "exp", "log", "sqrt", "abs",
                        ],
                        found: format!("'{name}'"),
                    })
                }
            }
        }
    }
}

// Precedence levels used by the printer; higher binds tighter.
// expr = 1, term = 2, pow = 3, unary = 4, atom = 5.
fn level(e: &FunctionExpr) -> u8 {
    match e {
        FunctionExpr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        FunctionExpr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        FunctionExpr::Bin(BinOp::Pow, ..) => 3,
        FunctionExpr::Neg(..) => 4,
        _ => 5,
    }
}

fn print_into(e: &FunctionExpr, min_level: u8, out: &mut String) {
    let lv = level(e);
    if lv < min_level {
        out.push('(');
        print_into(e, 0, out);
        out.push(')');
        return;
    }
    match e {
        FunctionExpr::Literal(v) => out.push_str(&format!("{v}")),
        FunctionExpr::Var => out.push('x'),
        FunctionExpr::Pi => out.push_str("pi"),
        FunctionExpr::E => out.push('e'),
        FunctionExpr::Neg(inner) => {
            out.push('-');
            print_into(inner, 5, out);
        }
        FunctionExpr::Bin(op, l, r) => {
            let (sym, ll, rl) = match op {
                BinOp::Add => ("+", 1, 2),
                BinOp::Sub => ("-", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
                BinOp::Pow => ("^", 4, 3),
            };
            print_into(l, ll, out);
            out.push_str(sym);
            print_into(r, rl, out);
        }
        FunctionExpr::Apply(func, arg) => {
            out.push_str(func.name());
            out.push('(');
            print_into(arg, 0, out);
            out.push(')');
        }
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        print_into(self, 0, &mut s);
        write!(f, "{s}")
    }
}

impl FunctionExpr {
    /// Render with minimal parentheses; reparsing reproduces the tree.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Evaluate at the point `x`; any domain failure or non-finite result
    /// is an error.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            FunctionExpr::Literal(v) => *v,
            FunctionExpr::Var => x,
            FunctionExpr::Pi => std::f64::consts::PI,
            FunctionExpr::E => std::f64::consts::E,
            FunctionExpr::Neg(inner) => -inner.eval(x)?,
            FunctionExpr::Bin(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        let p = a.powf(b);
                        if !p.is_finite() {
                            return Err(EvalError::NonFinite { context: "power" });
                        }
                        p
                    }
                }
            }
            FunctionExpr::Apply(func, arg) => {
                let a = arg.eval(x)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(EvalError::Domain {
                                func: "log",
                                arg: a,
                            });
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::Domain {
                                func: "sqrt",
                                arg: a,
                            });
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                }
            }
        };
        if !v.is_finite() {
            return Err(EvalError::NonFinite {
                context: "expression",
            });
        }
        Ok(v)
    }
}
