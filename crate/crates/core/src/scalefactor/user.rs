//! User-supplied scale factors: a parsed expression in `t`, or a table of
//! samples interpolated by a natural cubic spline.

use crate::error::{invalid, Result};

/// Value and first three derivatives of a function of one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Taylor3(pub [f64; 4]);

impl Taylor3 {
    fn constant(c: f64) -> Self {
        Taylor3([c, 0.0, 0.0, 0.0])
    }

    fn variable(t: f64) -> Self {
        Taylor3([t, 1.0, 0.0, 0.0])
    }

    fn add(self, o: Self) -> Self {
        let (a, b) = (self.0, o.0);
        Taylor3([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }

    fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    fn neg(self) -> Self {
        let a = self.0;
        Taylor3([-a[0], -a[1], -a[2], -a[3]])
    }

    fn mul(self, o: Self) -> Self {
        let (f, g) = (self.0, o.0);
        Taylor3([
            f[0] * g[0],
            f[1] * g[0] + f[0] * g[1],
            f[2] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[2],
            f[3] * g[0] + 3.0 * f[2] * g[1] + 3.0 * f[1] * g[2] + f[0] * g[3],
        ])
    }

    fn div(self, o: Self) -> Self {
        self.mul(o.compose([
            1.0 / o.0[0],
            -1.0 / o.0[0].powi(2),
            2.0 / o.0[0].powi(3),
            -6.0 / o.0[0].powi(4),
        ]))
    }

    /// Chain rule for φ∘self given φ and its first three derivatives at self's value.
    fn compose(self, phi: [f64; 4]) -> Self {
        let f = self.0;
        Taylor3([
            phi[0],
            phi[1] * f[1],
            phi[2] * f[1] * f[1] + phi[1] * f[2],
            phi[3] * f[1].powi(3) + 3.0 * phi[2] * f[1] * f[2] + phi[1] * f[3],
        ])
    }

    fn powf(self, c: f64) -> Self {
        let x = self.0[0];
        self.compose([
            x.powf(c),
            c * x.powf(c - 1.0),
            c * (c - 1.0) * x.powf(c - 2.0),
            c * (c - 1.0) * (c - 2.0) * x.powf(c - 3.0),
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Asinh,
    Abs,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "asinh" => Func::Asinh,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply(self, u: Taylor3) -> Taylor3 {
        let x = u.0[0];
        let phi = match self {
            Func::Exp => {
                let e = x.exp();
                [e, e, e, e]
            }
            Func::Ln => [x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)],
            Func::Sqrt => return u.powf(0.5),
            Func::Sin => [x.sin(), x.cos(), -x.sin(), -x.cos()],
            Func::Cos => [x.cos(), -x.sin(), -x.cos(), x.sin()],
            Func::Tan => {
                let t = x.tan();
                let s2 = 1.0 + t * t;
                [t, s2, 2.0 * t * s2, 2.0 * s2 * (1.0 + 3.0 * t * t)]
            }
            Func::Sinh => [x.sinh(), x.cosh(), x.sinh(), x.cosh()],
            Func::Cosh => [x.cosh(), x.sinh(), x.cosh(), x.sinh()],
            Func::Tanh => {
                let t = x.tanh();
                let s2 = 1.0 - t * t;
                [t, s2, -2.0 * t * s2, -2.0 * s2 * (1.0 - 3.0 * t * t)]
            }
            Func::Asinh => {
                let r = 1.0 / (1.0 + x * x).sqrt();
                [
                    x.asinh(),
                    r,
                    -x * r.powi(3),
                    (2.0 * x * x - 1.0) * r.powi(5),
                ]
            }
            Func::Abs => {
                let s = if x < 0.0 { -1.0 } else { 1.0 };
                [x.abs(), s, 0.0, 0.0]
            }
        };
        u.compose(phi)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval(&self, t: f64) -> Taylor3 {
        match self {
            Node::Num(c) => Taylor3::constant(*c),
            Node::Var => Taylor3::variable(t),
            Node::Neg(a) => a.eval(t).neg(),
            Node::Add(a, b) => a.eval(t).add(b.eval(t)),
            Node::Sub(a, b) => a.eval(t).sub(b.eval(t)),
            Node::Mul(a, b) => a.eval(t).mul(b.eval(t)),
            Node::Div(a, b) => a.eval(t).div(b.eval(t)),
            Node::Pow(a, b) => {
                let base = a.eval(t);
                match b.as_ref() {
                    Node::Num(c) => base.powf(*c),
                    exponent => Func::Exp.apply(exponent.eval(t).mul(Func::Ln.apply(base))),
                }
            }
            Node::Call(f, a) => f.apply(a.eval(t)),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn error<T>(&self, msg: &str) -> Result<T> {
        Err(invalid(format!(
            "expression `{}` at offset {}: {msg}",
            self.src, self.pos
        )))
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some('/') => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    // `^` is right-associative and binds tighter than unary minus on its left.
    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            if let (Node::Num(b), Node::Num(e)) = (&base, &exponent) {
                return Ok(Node::Num(b.powf(*e)));
            }
            return Ok(Node::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let name = &self.src[start..self.pos];
                match name {
                    "t" => Ok(Node::Var),
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ => match Func::lookup(name) {
                        Some(f) => {
                            self.expect('(')?;
                            let arg = self.expr()?;
                            self.expect(')')?;
                            Ok(Node::Call(f, Box::new(arg)))
                        }
                        None => {
                            self.pos = start;
                            self.error(&format!("unknown identifier `{name}`"))
                        }
                    },
                }
            }
            Some(_) => self.error("unexpected character"),
            None => self.error("unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        match self.src[start..end].parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                Ok(Node::Num(v))
            }
            Err(_) => self.error("malformed number"),
        }
    }
}

/// A scale factor given as an expression in `t`, differentiated exactly by
/// forward-mode Taylor arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    source: String,
    root: Node,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let mut p = Parser { src: source, pos: 0 };
        let root = p.expr()?;
        if p.peek().is_some() {
            return p.error("trailing input");
        }
        Ok(Expression {
            source: source.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub(crate) fn jet(&self, t: f64) -> [f64; 4] {
        self.root.eval(t).0
    }
}

/// Natural cubic spline through (t_i, a_i). Outside the table the end cubic
/// is extrapolated.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    t: Vec<f64>,
    a: Vec<f64>,
    // Second derivatives at the knots.
    m: Vec<f64>,
}

impl Table {
    pub fn new(t: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        if t.len() != a.len() {
            return Err(invalid("table columns differ in length"));
        }
        if t.len() < 4 {
            return Err(invalid("a tabulated scale factor needs at least 4 samples"));
        }
        if t.iter().chain(a.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("table contains non-finite values"));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("table times must be strictly increasing"));
        }
        if t[0] < 0.0 {
            return Err(invalid("table times must be non-negative"));
        }
        let m = natural_second_derivatives(&t, &a);
        Ok(Table { t, a, m })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    pub(crate) fn jet(&self, x: f64) -> [f64; 4] {
        let n = self.t.len();
        let i = match self.t.partition_point(|&ti| ti <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.a[i], self.a[i + 1]);
        let u = x - self.t[i];
        let v = self.t[i + 1] - x;
        let value = m0 * v.powi(3) / (6.0 * h)
            + m1 * u.powi(3) / (6.0 * h)
            + (y0 / h - m0 * h / 6.0) * v
            + (y1 / h - m1 * h / 6.0) * u;
        let d1 = -m0 * v * v / (2.0 * h) + m1 * u * u / (2.0 * h) + (y1 - y0) / h
            - (m1 - m0) * h / 6.0;
        let d2 = (m0 * v + m1 * u) / h;
        let d3 = (m1 - m0) / h;
        [value, d1, d2, d3]
    }
}

fn natural_second_derivatives(t: &[f64], a: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut m = vec![0.0; n];
    // Thomas algorithm on the interior tridiagonal system.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = t[i] - t[i - 1];
        let h1 = t[i + 1] - t[i];
        let lower = h0 / 6.0;
        let diag = (h0 + h1) / 3.0;
        let upper = h1 / 6.0;
        let rhs = (a[i + 1] - a[i]) / h1 - (a[i] - a[i - 1]) / h0;
        let denom = diag - lower * c_prime[i - 1];
        c_prime[i] = upper / denom;
        d_prime[i] = (rhs - lower * d_prime[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn expression_derivatives_are_exact() {
        let e = Expression::parse("t^2.5 + 3*sinh(t)/2").unwrap();
        let t: f64 = 1.3;
        let j = e.jet(t);
        assert!(close(j[0], t.powf(2.5) + 1.5 * t.sinh(), 1e-14));
        assert!(close(j[1], 2.5 * t.powf(1.5) + 1.5 * t.cosh(), 1e-14));
        assert!(close(j[2], 3.75 * t.powf(0.5) + 1.5 * t.sinh(), 1e-14));
        assert!(close(j[3], 1.875 * t.powf(-0.5) + 1.5 * t.cosh(), 1e-14));
    }

    #[test]
    fn quotient_and_variable_exponent() {
        let e = Expression::parse("t^t / (1 + t)").unwrap();
        let f = |t: f64| t.powf(t) / (1.0 + t);
        let t = 0.7;
        let h = 1e-4;
        let j = e.jet(t);
        let fd1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let fd2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        assert!(close(j[0], f(t), 1e-14));
        assert!(close(j[1], fd1, 1e-7));
        assert!(close(j[2], fd2, 1e-5));
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = Expression::parse("-t^2 + 2*3 - 4/2").unwrap();
        assert_eq!(e.jet(3.0)[0], -9.0 + 6.0 - 2.0);
        let e = Expression::parse("2^3^2").unwrap();
        assert_eq!(e.jet(0.0)[0], 512.0);
        let e = Expression::parse("1.5e-1*t").unwrap();
        assert_eq!(e.jet(2.0)[0], 0.3);
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(Expression::parse("t +").is_err());
        assert!(Expression::parse("foo(t)").is_err());
        assert!(Expression::parse("(t").is_err());
        assert!(Expression::parse("t t").is_err());
    }

    #[test]
    fn spline_reproduces_cubic_interior_derivatives_approximately() {
        let t: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
        let a: Vec<f64> = t.iter().map(|x| x * x).collect();
        let table = Table::new(t, a).unwrap();
        let j = table.jet(1.005);
        assert!(close(j[0], 1.005f64.powi(2), 1e-8));
        assert!(close(j[1], 2.01, 1e-6));
        assert!(close(j[2], 2.0, 1e-4));
    }

    #[test]
    fn table_validation() {
        assert!(Table::new(vec![0.0, 1.0, 1.0, 2.0], vec![0.0; 4]).is_err());
        assert!(Table::new(vec![0.0, 1.0], vec![0.0; 2]).is_err());
    }
}
