//! Infix grammar for T-function expressions.
//!
//! Precedence, tightest first: unary `~`/`-`, then `*` and `% 2^k`, then
//! binary `+`/`-`, then `<<`, then `&`, then `^` (XOR), then `|`.
//! Literals are decimal or 0x-hex; variables are `x` or `x0`..`x31`.
//! Builtins: `inv(e)` odd inverse, `pow1p2(u, v)` = (1+2u)^v, and
//! `binom2(i, s, e)` = 2^s * C(e, i). Named sub-expressions may be supplied
//! alongside the source and are applied as calls.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::TExpr;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Percent,
    Shl,
    Shr,
    And,
    Caret,
    Or,
    Tilde,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Percent => write!(f, "%"),
            Tok::Shl => write!(f, "<<"),
            Tok::Shr => write!(f, ">>"),
            Tok::And => write!(f, "&"),
            Tok::Caret => write!(f, "^"),
            Tok::Or => write!(f, "|"),
            Tok::Tilde => write!(f, "~"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Comma => write!(f, ","),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '%' => {
                out.push((i, Tok::Percent));
                i += 1;
            }
            '&' => {
                out.push((i, Tok::And));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '|' => {
                out.push((i, Tok::Or));
                i += 1;
            }
            '~' => {
                out.push((i, Tok::Tilde));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'<') {
                    out.push((i, Tok::Shl));
                    i += 2;
                } else {
                    return err(i, "expected '<<'");
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Tok::Shr));
                    i += 2;
                } else {
                    return err(i, "unexpected '>'");
                }
            }
            '0'..='9' => {
                let start = i;
                if c == '0' && matches!(bytes.get(i + 1), Some(b'x') | Some(b'X')) {
                    i += 2;
                    let hs = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_hexdigit() {
                        i += 1;
                    }
                    if i == hs {
                        return err(start, "empty hex literal");
                    }
                    let v = u64::from_str_radix(&src[hs..i], 16).map_err(|e| ParseError {
                        pos: start,
                        msg: format!("bad hex literal: {e}"),
                    })?;
                    out.push((start, Tok::Num(v)));
                } else {
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                    let v = src[start..i].parse::<u64>().map_err(|e| ParseError {
                        pos: start,
                        msg: format!("bad literal: {e}"),
                    })?;
                    out.push((start, Tok::Num(v)));
                }
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            _ => return err(i, format!("unexpected character {c:?}")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    defs: &'a HashMap<String, TExpr>,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.src_len)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let pos = self.here();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => err(pos, format!("expected '{want}', found '{t}'")),
            None => err(pos, format!("expected '{want}', found end of input")),
        }
    }

    // or-level (loosest)
    fn parse_expr(&mut self) -> Result<TExpr, ParseError> {
        let mut lhs = self.parse_xor()?;
        while self.peek() == Some(&Tok::Or) {
            self.next();
            lhs = lhs.or(self.parse_xor()?);
        }
        Ok(lhs)
    }

    fn parse_xor(&mut self) -> Result<TExpr, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Tok::Caret) {
            self.next();
            lhs = lhs.xor(self.parse_and()?);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<TExpr, ParseError> {
        let mut lhs = self.parse_shift()?;
        while self.peek() == Some(&Tok::And) {
            self.next();
            lhs = lhs.and(self.parse_shift()?);
        }
        Ok(lhs)
    }

    fn parse_shift(&mut self) -> Result<TExpr, ParseError> {
        let mut lhs = self.parse_additive()?;
        loop {
            match self.peek() {
                Some(Tok::Shl) => {
                    self.next();
                    let pos = self.here();
                    let amount = self.parse_additive()?;
                    match amount.const_value() {
                        Some(k) if (0..=64).contains(&k) => lhs = lhs.shl(k as u32),
                        Some(_) => return err(pos, "shift amount out of range 0..=64"),
                        None => return err(pos, "'<<' needs a constant shift amount"),
                    }
                }
                Some(Tok::Shr) => {
                    return err(self.here(), "right shift is not a T-function");
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_additive(&mut self) -> Result<TExpr, ParseError> {
        let mut lhs = self.parse_multiplicative()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    lhs = lhs.add(self.parse_multiplicative()?);
                }
                Some(Tok::Minus) => {
                    self.next();
                    lhs = lhs.sub(self.parse_multiplicative()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_multiplicative(&mut self) -> Result<TExpr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    lhs = lhs.mul(self.parse_unary()?);
                }
                Some(Tok::Percent) => {
                    self.next();
                    let k = self.parse_mod_power()?;
                    lhs = lhs.mod2k(k);
                }
                _ => return Ok(lhs),
            }
        }
    }

    /// After `%`: either `2^k` or a power-of-two literal.
    fn parse_mod_power(&mut self) -> Result<u32, ParseError> {
        let pos = self.here();
        match self.next() {
            Some(Tok::Num(2)) if self.peek() == Some(&Tok::Caret) => {
                self.next();
                let kpos = self.here();
                match self.next() {
                    Some(Tok::Num(k)) if k <= 64 => Ok(k as u32),
                    _ => err(kpos, "'% 2^' needs a constant exponent up to 64"),
                }
            }
            Some(Tok::Num(m)) if m.is_power_of_two() => Ok(m.trailing_zeros()),
            _ => err(pos, "'%' supports only power-of-two moduli: use '% 2^k'"),
        }
    }

    fn parse_unary(&mut self) -> Result<TExpr, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.next();
                Ok(self.parse_unary()?.not())
            }
            Some(Tok::Minus) => {
                self.next();
                Ok(self.parse_unary()?.neg())
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_call_args(&mut self) -> Result<Vec<TExpr>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.parse_expr()?];
        while self.peek() == Some(&Tok::Comma) {
            self.next();
            args.push(self.parse_expr()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn parse_atom(&mut self) -> Result<TExpr, ParseError> {
        let pos = self.here();
        match self.next() {
            Some(Tok::Num(v)) => Ok(TExpr::Const(v)),
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.parse_ident(pos, &name),
            Some(t) => err(pos, format!("unexpected '{t}'")),
            None => err(pos, "unexpected end of input"),
        }
    }

    fn parse_ident(&mut self, pos: usize, name: &str) -> Result<TExpr, ParseError> {
        if name == "x" {
            return Ok(TExpr::Var(0));
        }
        if let Some(rest) = name.strip_prefix('x') {
            if let Ok(i) = rest.parse::<usize>() {
                if i <= 31 && (rest.len() == 1 || !rest.starts_with('0')) {
                    return Ok(TExpr::Var(i));
                }
                return err(pos, format!("variable index {i} out of range 0..=31"));
            }
        }
        match name {
            "inv" => {
                let mut args = self.parse_call_args()?;
                if args.len() != 1 {
                    return err(pos, "inv() takes one argument");
                }
                Ok(args.remove(0).inv_odd())
            }
            "pow1p2" => {
                let mut args = self.parse_call_args()?;
                if args.len() != 2 {
                    return err(pos, "pow1p2() takes two arguments");
                }
                let v = args.remove(1);
                let u = args.remove(0);
                Ok(TExpr::pow_odd_base(u, v))
            }
            "binom2" => {
                let args = self.parse_call_args()?;
                if args.len() != 3 {
                    return err(pos, "binom2(i, s, e) takes three arguments");
                }
                let (i, s) = match (args[0].const_value(), args[1].const_value()) {
                    (Some(i), Some(s)) if (0..=64).contains(&i) && (0..=64).contains(&s) => {
                        (i as u32, s as u32)
                    }
                    _ => return err(pos, "binom2 index and scale must be small constants"),
                };
                let need = if i >= 2 { i.ilog2() } else { 0 };
                if s < need {
                    return err(
                        pos,
                        format!("binom2 scale 2^{s} is below the compatible valuation 2^{need}"),
                    );
                }
                Ok(TExpr::binom2k(i, s, args[2].clone()))
            }
            "rot" | "rotl" | "rotr" => err(pos, "rotation is not a T-function"),
            "shr" | "lsr" | "asr" => err(pos, "right shift is not a T-function"),
            _ => {
                if let Some(body) = self.defs.get(name) {
                    let args = self.parse_call_args()?;
                    let arity = body.max_var().map_or(1, |m| m + 1);
                    if args.len() != arity {
                        return err(
                            pos,
                            format!("{name}() takes {arity} argument(s), got {}", args.len()),
                        );
                    }
                    Ok(TExpr::compose(body.clone(), args))
                } else {
                    err(pos, format!("unknown name '{name}'"))
                }
            }
        }
    }
}

/// Parses a single expression.
pub fn parse(src: &str) -> Result<TExpr, ParseError> {
    parse_with_defs(src, &[])
}

/// Parses with named sub-expressions available as calls. Each definition is
/// itself parsed with the earlier definitions in scope.
pub fn parse_with_defs(src: &str, defs: &[(&str, &str)]) -> Result<TExpr, ParseError> {
    let mut table: HashMap<String, TExpr> = HashMap::new();
    for (name, body_src) in defs {
        let body = parse_in_scope(body_src, &table)?;
        table.insert(name.to_string(), body);
    }
    parse_in_scope(src, &table)
}

fn parse_in_scope(src: &str, defs: &HashMap<String, TExpr>) -> Result<TExpr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        defs,
        src_len: src.len(),
    };
    let e = p.parse_expr()?;
    if p.pos != p.toks.len() {
        let pos = p.here();
        return err(pos, "trailing input after expression");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_cases() {
        let e = parse("x + (x*x | 5)").unwrap();
        assert_eq!(
            e,
            TExpr::x().add(TExpr::x().mul(TExpr::x()).or(TExpr::constant(5)))
        );
        assert_eq!(parse("0x1f").unwrap(), TExpr::constant(31));
        assert_eq!(parse("x % 2^3").unwrap(), TExpr::x().mod2k(3));
        assert_eq!(parse("x % 8").unwrap(), TExpr::x().mod2k(3));
    }

    #[test]
    fn right_shift_rejected() {
        let e = parse("x >> 1").unwrap_err();
        assert!(e.msg.contains("right shift is not a T-function"), "{e}");
        let r = parse("rotl(x)").unwrap_err();
        assert!(r.msg.contains("rotation is not a T-function"), "{r}");
    }

    #[test]
    fn named_subexpression_becomes_compose() {
        let e = parse_with_defs("1 + x + 2*(g(x+1) - g(x))", &[("g", "x*x | 5")]).unwrap();
        match &e {
            TExpr::Add(_, rhs) => match rhs.as_ref() {
                TExpr::Mul(_, diff) => match diff.as_ref() {
                    TExpr::Sub(a, b) => {
                        assert!(matches!(a.as_ref(), TExpr::Compose { .. }));
                        assert!(matches!(b.as_ref(), TExpr::Compose { .. }));
                    }
                    other => panic!("unexpected shape {other:?}"),
                },
                other => panic!("unexpected shape {other:?}"),
            },
            other => panic!("unexpected shape {other:?}"),
        }
        // evaluates like the hand-built tree
        let direct = parse("1 + x + 2*((((x+1)*(x+1)) | 5) - ((x*x) | 5))").unwrap();
        for v in 0..256 {
            assert_eq!(e.eval1(v, 8).unwrap(), direct.eval1(v, 8).unwrap());
        }
    }

    #[test]
    fn precedence_matches_spec() {
        // ~ > * > +,- > << > & > ^ > |
        let cases = [
            ("1 + ~x * 2 << 3", "(1 + ((~x) * 2)) << 3"),
            ("x & 3 ^ x | 1", "((x & 3) ^ x) | 1"),
            ("x << 1 & 3", "(x << 1) & 3"),
            ("x + 2 << 1 + 1", "(x + 2) << 2"),
            ("1 - x - 2", "(1 - x) - 2"),
            ("x % 2^3 * 2", "(x % 2^3) * 2"),
        ];
        for (a, b) in cases {
            assert_eq!(parse(a).unwrap(), parse(b).unwrap(), "{a} vs {b}");
        }
    }

    #[test]
    fn variables() {
        assert_eq!(parse("x7").unwrap(), TExpr::Var(7));
        assert!(parse("x32").is_err());
        let e = parse("x0 + x1*x1").unwrap();
        assert_eq!(e.max_var(), Some(1));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("x + $").unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse("x +").unwrap_err();
        assert_eq!(e.pos, 3);
    }
}
