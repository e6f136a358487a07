//! Expression syntax: parsing, printing and expansion into series.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' int)?          int may carry a sign, or be parenthesized
//! atom  := integer | name | '(' expr ')' | 'exp(' expr ')' | 'log(' expr ')'
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::coeff::{self, Coefficient};
use crate::error::{MnError, Result};
use crate::driver::{Driver, Embedded};
use crate::order::{ExponentVector, FieldSpec, PrecisionBox};
use crate::series::{Budget, Series};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Rational(Coefficient),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Exp(Box<Expr>),
    Log(Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Rational(coeff::int(n))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    /// Names occurring in the expression.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Rational(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Log(a) => a.collect_names(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }

    /// Replaces variables by expressions.
    pub fn substitute(&self, map: &HashMap<String, Expr>) -> Expr {
        let sub = |a: &Expr| Box::new(a.substitute(map));
        match self {
            Expr::Rational(_) => self.clone(),
            Expr::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => Expr::Neg(sub(a)),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
            Expr::Div(a, b) => Expr::Div(sub(a), sub(b)),
            Expr::Pow(a, k) => Expr::Pow(sub(a), *k),
            Expr::Exp(a) => Expr::Exp(sub(a)),
            Expr::Log(a) => Expr::Log(sub(a)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Rational(c) if !c.is_integer() || c.is_negative() => 2,
            _ => 5,
        }
    }
}

// ---- printing --------------------------------------------------------------

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            Expr::Rational(c) => write!(f, "{}", coeff::format(c)),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, a.precedence() < p)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                write_child(f, a, a.precedence() < p)?;
                write!(f, "{op}")?;
                write_child(f, b, b.precedence() <= p)
            }
            Expr::Pow(a, k) => {
                write_child(f, a, a.precedence() <= p)?;
                write!(f, "^{k}")
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
        }
    }
}

// ---- parsing ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Sym(char),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|c| c.1).collect();
            out.push((pos, Tok::Num(s.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((pos, Tok::Name(chars[start..i].iter().map(|c| c.1).collect())));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(MnError::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(MnError::Syntax { pos: self.pos(), msg: format!("expected `{c}`") })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        if *self.peek() == Tok::End {
            return Err(MnError::Syntax { pos, msg: "missing exponent".into() });
        }
        let k = self.exponent().ok_or(MnError::NonIntegerExponent { pos })?;
        Ok(Expr::Pow(Box::new(base), k))
    }

    /// Signed integer, possibly in parentheses; rewinds and returns `None`
    /// on anything else.
    fn exponent(&mut self) -> Option<i64> {
        let save = self.at;
        let paren = self.eat('(');
        let neg = self.eat('-');
        let value = match self.bump() {
            Tok::Num(n) => i64::try_from(n).ok(),
            _ => None,
        };
        let closed = !paren || self.eat(')');
        match value {
            Some(v) if closed => Some(if neg { -v } else { v }),
            _ => {
                self.at = save;
                None
            }
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(Expr::Rational(Coefficient::from_integer(n))),
            Tok::Name(name) => {
                if (name == "exp" || name == "log") && *self.peek() == Tok::Sym('(') {
                    self.bump();
                    let inner = self.expr()?;
                    self.expect(')')?;
                    Ok(if name == "exp" { Expr::Exp(Box::new(inner)) } else { Expr::Log(Box::new(inner)) })
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Tok::Sym('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Sym(c) => Err(MnError::Syntax { pos, msg: format!("unexpected `{c}`") }),
            Tok::End => Err(MnError::Syntax { pos, msg: "unexpected end of input".into() }),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(text)?, at: 0 };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::Sym('^') => Err(MnError::Syntax { pos: p.pos(), msg: "chained exponent".into() }),
        _ => Err(MnError::Syntax { pos: p.pos(), msg: "trailing input".into() }),
    }
}

// ---- expansion ---------------------------------------------------------------

/// Meaning of names during expansion. Names bound to series take precedence
/// over field variables; constants are rational parameters.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    pub series: HashMap<String, Series>,
    pub constants: HashMap<String, Coefficient>,
}

impl Scope {
    pub fn with_constants(constants: HashMap<String, Coefficient>) -> Scope {
        Scope { series: HashMap::new(), constants }
    }
}

/// Expansion of `e` in the field `spec` under `budget`.
pub fn expand(e: &Expr, spec: &Arc<FieldSpec>, budget: &Budget, scope: &Scope) -> Result<Series> {
    for name in scope.constants.keys() {
        if spec.vars().contains(name) {
            return Err(MnError::Usage(format!("binding `{name}` shadows a variable")));
        }
    }
    Expander { spec, budget, scope }.go(e)
}

/// Expansion of `e` guaranteed on `region`.
pub fn expand_on(e: &Expr, spec: &Arc<FieldSpec>, region: &PrecisionBox, scope: &Scope, driver: &Driver) -> Result<Series> {
    driver.run(spec.width(), region, |b| expand(e, spec, b, scope))
}

/// Coefficient of `prod_j x_{vars[j]}^{exps[j]}` in the expansion of `e`,
/// guaranteed on the projection of `region` to the remaining coordinates,
/// which is returned alongside.
pub fn extract_on(
    e: &Expr,
    spec: &Arc<FieldSpec>,
    vars: &[usize],
    exps: &[i64],
    region: &PrecisionBox,
    scope: &Scope,
    driver: &Driver,
) -> Result<(Series, PrecisionBox)> {
    let (_, cols) = spec.residual(vars);
    let mut shift = vec![0i64; spec.nvars()];
    for (&v, &x) in vars.iter().zip(exps) {
        shift[v] = x;
    }
    let target = Embedded { region: region.project(&cols), cols, shift: spec.phi(&ExponentVector(shift)) };
    let s = driver.run(spec.width(), &target, |b| expand(e, spec, b, scope))?;
    Ok((s.coefficient_at(vars, exps), target.region))
}

struct Expander<'a> {
    spec: &'a Arc<FieldSpec>,
    budget: &'a Budget,
    scope: &'a Scope,
}

impl Expander<'_> {
    fn go(&self, e: &Expr) -> Result<Series> {
        let cap = |a: &Series, b: &Series| (!a.is_exact() || !b.is_exact()).then_some(self.budget.bound);
        Ok(match e {
            Expr::Rational(c) => Series::constant(self.spec, c.clone()),
            Expr::Var(v) => {
                if let Some(s) = self.scope.series.get(v) {
                    if s.spec() != self.spec {
                        return Err(MnError::SpecMismatch);
                    }
                    s.clone()
                } else if self.spec.vars().contains(v) {
                    Series::variable(self.spec, v)?
                } else if let Some(c) = self.scope.constants.get(v) {
                    Series::constant(self.spec, c.clone())
                } else {
                    return Err(MnError::UnboundVariable(v.clone()));
                }
            }
            Expr::Neg(a) => self.go(a)?.neg(),
            Expr::Add(a, b) => self.go(a)?.add(&self.go(b)?)?,
            Expr::Sub(a, b) => self.go(a)?.sub(&self.go(b)?)?,
            Expr::Mul(a, b) => {
                let (a, b) = (self.go(a)?, self.go(b)?);
                a.mul_capped(&b, cap(&a, &b))?
            }
            Expr::Div(a, b) => {
                let a = self.go(a)?;
                let b = self.go(b)?.invert(self.budget)?;
                a.mul_capped(&b, cap(&a, &b))?
            }
            Expr::Pow(a, k) => self.go(a)?.powi(*k, self.budget)?,
            Expr::Exp(a) => self.go(a)?.exp_of(self.budget)?,
            Expr::Log(a) => self.go(a)?.log_of(self.budget)?,
        })
    }
}
