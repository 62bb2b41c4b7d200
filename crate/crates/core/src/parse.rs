//! One expression grammar for scalars, series, characters and cochains.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := integer | name | name '(' args ')' | '(' expr (',' expr)* ')' | '|' expr '|'
//! args    := arg (',' arg)*,   arg := expr | name '=' expr
//! ```
//!
//! Series names: `T`, `t`, `q`, `one_plus_T_over_T`; a series may also be a
//! list of `deg:coeff` pairs such as `-1:1 0:0 1:5^1*1`. Division is only by
//! monomials. Character names: `x`, `w` (ω), `|x|`, `ur(c)`,
//! `char(dp=.., te=.., du=..)`, combined with `*`, `/` and integer powers.
//! A cochain is a series (degree 0 or 2, fixed by context) or a pair `(a, b)`
//! (degree 1), optionally followed by `@character`.

use crate::error::{Error, Result};
use crate::herr::HerrCochain;
use crate::padic::PadicScalar;
use crate::rankone::{exact_precision, Character};
use crate::series::{one_plus_t_over_t, q_series, t_power, t_series, TruncatedLaurent};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Name(String),
    Call(String, Vec<(Option<String>, Expr)>),
    Tuple(Vec<Expr>),
    Abs(Box<Expr>),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Name(String),
    Sym(char),
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = cs[st..i].iter().collect();
            out.push(Tok::Int(txt.parse().map_err(|_| perr(format!("integer out of range: {txt}")))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Name(cs[st..i].iter().collect()));
        } else if "+-*/^(),=|".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(perr(format!("unexpected character '{c}' in \"{s}\"")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(perr(format!("expected '{c}' at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut l = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Sym(c @ ('+' | '-'))) => *c,
                _ => return Ok(l),
            };
            self.pos += 1;
            l = Expr::Bin(op, Box::new(l), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut l = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Sym(c @ ('*' | '/'))) => *c,
                _ => return Ok(l),
            };
            self.pos += 1;
            l = Expr::Bin(op, Box::new(l), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                if !self.eat('(') {
                    return Ok(Expr::Name(name));
                }
                let mut args = Vec::new();
                loop {
                    let key = match (self.toks.get(self.pos), self.toks.get(self.pos + 1)) {
                        (Some(Tok::Name(k)), Some(Tok::Sym('='))) => {
                            let k = k.clone();
                            self.pos += 2;
                            Some(k)
                        }
                        _ => None,
                    };
                    args.push((key, self.expr()?));
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(')')?;
                Ok(Expr::Call(name, args))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let mut items = vec![self.expr()?];
                while self.eat(',') {
                    items.push(self.expr()?);
                }
                self.expect(')')?;
                Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Tuple(items) })
            }
            Some(Tok::Sym('|')) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect('|')?;
                Ok(Expr::Abs(Box::new(inner)))
            }
            Some(t) => Err(perr(format!("unexpected token {t:?}"))),
            None => Err(perr("unexpected end of input")),
        }
    }
}

/// Parses an expression of the shared grammar.
pub fn parse_expr(s: &str) -> Result<Expr> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(perr("empty expression"));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(perr(format!("trailing input after token {} in \"{s}\"", p.pos)));
    }
    Ok(e)
}

fn int_value(e: &Expr) -> Result<i64> {
    match e {
        Expr::Int(n) => Ok(*n),
        Expr::Neg(x) => Ok(-int_value(x)?),
        _ => Err(perr(format!("integer expected, got {e:?}"))),
    }
}

/// Context for series evaluation: prime, precision, top of the window.
#[derive(Clone, Copy, Debug)]
pub struct SeriesContext {
    pub p: u32,
    pub prec: i32,
    pub hi: i32,
}

/// The only nonzero term `(k, c)` of a monomial.
fn as_monomial(f: &TruncatedLaurent) -> Option<(i32, PadicScalar)> {
    let mut found = None;
    for (i, c) in f.coeffs().iter().enumerate() {
        if !c.is_zero() {
            if found.is_some() {
                return None;
            }
            found = Some((f.lo() + i as i32, *c));
        }
    }
    found
}

/// A `p^v*u` scalar or any constant expression.
pub fn parse_scalar(s: &str, p: u32, prec: i32) -> Result<PadicScalar> {
    let f = parse_series(s, SeriesContext { p, prec, hi: 2 })?;
    match as_monomial(&f) {
        Some((0, c)) => Ok(c),
        None if f.is_zero() => Ok(PadicScalar::zero(p, prec)),
        _ => Err(perr(format!("\"{s}\" is not a constant"))),
    }
}

pub fn parse_series(s: &str, ctx: SeriesContext) -> Result<TruncatedLaurent> {
    if s.contains(':') {
        let mut terms = Vec::new();
        for pair in s.split_whitespace() {
            let (d, c) = pair.split_once(':').ok_or_else(|| perr(format!("expected deg:coeff, got \"{pair}\"")))?;
            let d: i32 = d.parse().map_err(|_| perr(format!("bad degree \"{d}\"")))?;
            terms.push((d, parse_scalar(c, ctx.p, ctx.prec)?));
        }
        return TruncatedLaurent::from_terms(ctx.p, ctx.prec, &terms, ctx.hi);
    }
    eval_series(&parse_expr(s)?, ctx)
}

pub fn eval_series(e: &Expr, ctx: SeriesContext) -> Result<TruncatedLaurent> {
    let SeriesContext { p, prec, hi } = ctx;
    match e {
        Expr::Int(n) => Ok(TruncatedLaurent::constant(PadicScalar::from_i64(p, *n, prec), hi)),
        Expr::Name(n) => match n.as_str() {
            "T" => Ok(t_power(p, prec, 1, hi)),
            "t" => Ok(t_series(p, prec, hi)),
            "q" => Ok(q_series(p, prec, hi)),
            "one_plus_T_over_T" => Ok(one_plus_t_over_t(p, prec, hi)),
            _ => Err(perr(format!("unknown series name \"{n}\""))),
        },
        Expr::Neg(x) => Ok(-&eval_series(x, ctx)?),
        Expr::Bin('+', a, b) => eval_series(a, ctx)?.try_add(&eval_series(b, ctx)?),
        Expr::Bin('-', a, b) => eval_series(a, ctx)?.try_sub(&eval_series(b, ctx)?),
        Expr::Bin('*', a, b) => eval_series(a, ctx)?.try_mul(&eval_series(b, ctx)?),
        Expr::Bin('/', a, b) => {
            let den = eval_series(b, ctx)?;
            let (k, c) = as_monomial(&den).ok_or_else(|| perr("division is only by monomials c*T^k"))?;
            let inv = c.inv()?;
            eval_series(a, ctx)?.try_mul(&TruncatedLaurent::monomial(inv, -k, hi))
        }
        Expr::Bin('^', a, b) => {
            let n = int_value(b)?;
            let base = eval_series(a, ctx)?;
            if n >= 0 {
                return base.pow(n as u32);
            }
            let (k, c) = as_monomial(&base).ok_or_else(|| perr("negative powers only of monomials c*T^k"))?;
            let kk = i32::try_from(k as i64 * n).map_err(|_| perr("exponent too large"))?;
            Ok(TruncatedLaurent::monomial(c.pow(n)?, kk, hi))
        }
        _ => Err(perr(format!("not a series expression: {e:?}"))),
    }
}

/// Named characters are exact and built at `exact_precision(p)`.
pub fn parse_character(s: &str, p: u32) -> Result<Character> {
    eval_character(&parse_expr(s)?, p)
}

pub fn eval_character(e: &Expr, p: u32) -> Result<Character> {
    let prec = exact_precision(p);
    let scalar = |x: &Expr| -> Result<PadicScalar> {
        let f = eval_series(x, SeriesContext { p, prec, hi: 2 })?;
        match as_monomial(&f) {
            Some((0, c)) => Ok(c),
            _ => Err(perr(format!("constant expected, got {x:?}"))),
        }
    };
    match e {
        Expr::Int(1) => Ok(Character::trivial(p, prec)),
        Expr::Name(n) => match n.as_str() {
            "x" => Ok(Character::x(p, prec)),
            "w" | "omega" => Ok(Character::omega(p, prec)),
            _ => Err(perr(format!("unknown character name \"{n}\""))),
        },
        Expr::Abs(inner) if **inner == Expr::Name("x".into()) => Ok(Character::abs_x(p, prec)),
        Expr::Call(f, args) if f == "ur" && args.len() == 1 && args[0].0.is_none() => Character::unramified(scalar(&args[0].1)?),
        Expr::Call(f, args) if f == "char" => {
            let get = |k: &str| {
                args.iter().find(|a| a.0.as_deref() == Some(k)).map(|a| &a.1).ok_or_else(|| perr(format!("char(...) needs {k}=")))
            };
            Character::new(scalar(get("dp")?)?, int_value(get("te")?)?, scalar(get("du")?)?)
        }
        Expr::Bin('*', a, b) => Ok(eval_character(a, p)?.mul(&eval_character(b, p)?)),
        Expr::Bin('/', a, b) => Ok(eval_character(a, p)?.mul(&eval_character(b, p)?.inv())),
        Expr::Bin('^', a, b) => {
            let n = int_value(b)?;
            if **a == Expr::Name("x".into()) {
                return Ok(Character::x_pow(p, prec, n));
            }
            Ok(eval_character(a, p)?.pow(n))
        }
        _ => Err(perr(format!("not a character expression: {e:?}"))),
    }
}

/// A cochain literal; a single series takes degree `single_degree`.
pub fn parse_cochain(s: &str, ctx: SeriesContext, single_degree: u8) -> Result<HerrCochain> {
    if !s.contains(':') {
        if let Expr::Tuple(items) = parse_expr(s)? {
            if items.len() != 2 {
                return Err(perr(format!("a 1-cochain has two components, got {}", items.len())));
            }
            return Ok(HerrCochain::scalar1(eval_series(&items[0], ctx)?, eval_series(&items[1], ctx)?));
        }
    }
    let f = parse_series(s, ctx)?;
    match single_degree {
        0 => Ok(HerrCochain::scalar0(f)),
        2 => Ok(HerrCochain::scalar2(f)),
        d => Err(perr(format!("a single series cannot be a degree-{d} cochain"))),
    }
}

/// `cochain@character`; the quotes some shells leave around the cochain are
/// stripped.
pub fn parse_cochain_at(s: &str, ctx: SeriesContext, single_degree: u8) -> Result<(HerrCochain, Character)> {
    let (c, d) = s.rsplit_once('@').ok_or_else(|| perr(format!("expected cochain@character, got \"{s}\"")))?;
    let c = c.trim().trim_matches('"');
    Ok((parse_cochain(c, ctx, single_degree)?, parse_character(d.trim(), ctx.p)?))
}

/// Fiber literal `R/t^k` or `R/t^k@character`.
pub fn parse_fiber(s: &str, p: u32) -> Result<(usize, Character)> {
    let (body, twist) = match s.split_once('@') {
        Some((b, c)) => (b.trim(), parse_character(c.trim(), p)?),
        None => (s.trim(), Character::trivial(p, exact_precision(p))),
    };
    let k = match body {
        "R/t" => 1,
        _ => body
            .strip_prefix("R/t^")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|k| *k >= 1)
            .ok_or_else(|| perr(format!("expected R/t^k, got \"{body}\"")))?,
    };
    Ok((k, twist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rankone::Class;

    const CTX: SeriesContext = SeriesContext { p: 5, prec: 12, hi: 20 };

    #[test]
    fn scalars() {
        let a = parse_scalar("5^-1*3", 5, 12).unwrap();
        assert!(a.eq_at_prec(&PadicScalar::from_parts(5, -1, 3, 12)));
        assert_eq!(parse_scalar("-7", 5, 12).unwrap().to_i128(), Some(-7));
        assert!(parse_scalar("T", 5, 12).is_err());
        // Display round trip
        let b = PadicScalar::from_parts(5, 2, -4, 12);
        assert!(parse_scalar(&b.to_string(), 5, 12).unwrap().eq_at_prec(&b));
    }

    #[test]
    fn series_forms() {
        let f = parse_series("-1:1 0:0 1:5^1*1", CTX).unwrap();
        assert_eq!(f.lo(), -1);
        assert_eq!(f.coeff(1).unwrap().val(), 1);
        let g = parse_series("(1+T)/T^2", CTX).unwrap();
        let h = parse_series("-2:1 -1:1", CTX).unwrap();
        assert!(g.agrees(&h));
        let tt = parse_series("t*(1+T)/T^2", CTX).unwrap();
        assert_eq!(tt.res().unwrap().to_i128(), Some(1));
        assert!(parse_series("T^-1", CTX).unwrap().agrees(&t_power(5, 12, -1, 20)));
        assert!(parse_series("1/(1+T)", CTX).is_err());
        assert!(parse_series("t +", CTX).is_err());
    }

    #[test]
    fn characters() {
        let p = 5;
        let cls = |s: &str| parse_character(s, p).unwrap().classify(10, 3).unwrap().class;
        assert_eq!(cls("w"), Class::OmegaXI(0));
        assert_eq!(cls("x^-2"), Class::XMinusI(2));
        assert_eq!(cls("w*x^3"), Class::OmegaXI(3));
        assert_eq!(cls("|x|"), Class::Generic);
        assert_eq!(cls("ur(5^0*3)"), Class::Generic);
        assert_eq!(cls("ur(5^-1*1)*x^1"), Class::OmegaXI(0));
        assert_eq!(cls("x*|x|"), Class::OmegaXI(0));
        let d = parse_character("ur(5^-1*2)*x^1", p).unwrap();
        let back = parse_character(&d.to_string(), p).unwrap();
        assert!(back.eq_at_prec(&d));
        assert!(parse_character("y", p).is_err());
    }

    #[test]
    fn cochains() {
        let c = parse_cochain("(t, 0)", CTX, 0).unwrap();
        assert_eq!(c.degree, 1);
        let c = parse_cochain("(1+T)/T^2", CTX, 2).unwrap();
        assert_eq!(c.degree, 2);
        let (c, d) = parse_cochain_at("\"t\"@x^-1", CTX, 0).unwrap();
        assert_eq!(c.degree, 0);
        assert_eq!(d.classify(10, 3).unwrap().class, Class::XMinusI(1));
        assert_eq!(parse_fiber("R/t^2@w", 5).unwrap().0, 2);
        assert_eq!(parse_fiber("R/t", 5).unwrap().0, 1);
        assert!(parse_fiber("R/t^0", 5).is_err());
    }
}
