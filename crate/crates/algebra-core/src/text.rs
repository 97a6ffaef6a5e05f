//! Text formatting and parsing for ring elements.
//!
//! The printed form round-trips through `parse_in`: terms like `3*x*y^2`
//! joined with ` + ` / ` - `, composite coefficients in parentheses.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::ring::{coerce_int, gen, one, rep_poly_ring, Elem, Repr, Ring, RingKind};

pub fn format_elem(x: &Elem) -> String {
    match (&x.ring.kind, &x.repr) {
        (_, Repr::Int(v)) => v.to_string(),
        (_, Repr::Rat(v)) => {
            if v.denom().is_one() {
                v.numer().to_string()
            } else {
                format!("{}/{}", v.numer(), v.denom())
            }
        }
        (_, Repr::Frac(n, d)) => {
            if d.is_one() {
                format_elem(n)
            } else {
                format!("({})/({})", format_elem(n), format_elem(d))
            }
        }
        (kind, Repr::Dense(coeffs)) => {
            let var = match kind {
                RingKind::PolynomialRing { var, .. } => var.as_str(),
                RingKind::FiniteField { var, .. } => var.as_str(),
                RingKind::NumberField(nf) => nf.var.as_str(),
                RingKind::ResidueRing { base, .. } => match &base.kind {
                    RingKind::PolynomialRing { var, .. } => var.as_str(),
                    _ => "x",
                },
                _ => "x",
            };
            format_dense(coeffs, var)
        }
        (RingKind::MultiPolyRing { vars, .. }, Repr::Sparse(t)) => {
            let names: Vec<&str> = vars.iter().map(String::as_str).collect();
            format_sparse(t, &names)
        }
        _ => "?".into(),
    }
}

fn coeff_atom(c: &Elem) -> (String, bool) {
    // (text, needs_parens_when_multiplied)
    let s = format_elem(c);
    let atomic = match &c.repr {
        Repr::Int(_) => !s.starts_with('-') || true, // signs handled by caller
        Repr::Rat(v) => v.denom().is_one(),
        _ => false,
    };
    let atomic = atomic
        && !s.contains('+')
        && !s.trim_start_matches('-').contains('-')
        && !s.contains('/')
        && !s.contains('*');
    (s, !atomic)
}

fn format_dense(coeffs: &[Elem], var: &str) -> String {
    if coeffs.is_empty() {
        return "0".into();
    }
    let mut parts: Vec<String> = Vec::new();
    for (e, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        parts.push(format_term(c, &[(var, e as u32)]));
    }
    join_terms(parts)
}

fn format_sparse(t: &crate::sparse::SparseTerms, names: &[&str]) -> String {
    if t.is_zero() {
        return "0".into();
    }
    let mut parts: Vec<String> = Vec::new();
    for i in 0..t.len() {
        let exps = t.term_exps(i);
        let monos: Vec<(&str, u32)> = names
            .iter()
            .zip(exps.iter())
            .filter(|(_, &e)| e > 0)
            .map(|(&n, &e)| (n, e))
            .collect();
        parts.push(format_term(&t.coeffs[i], &monos));
    }
    join_terms(parts)
}

fn format_term(c: &Elem, monos: &[(&str, u32)]) -> String {
    let mut mono_parts: Vec<String> = Vec::new();
    for &(name, e) in monos {
        if e == 0 {
            continue;
        }
        if e == 1 {
            mono_parts.push(name.to_string());
        } else {
            mono_parts.push(format!("{name}^{e}"));
        }
    }
    let mono = mono_parts.join("*");
    let (cs, parens) = coeff_atom(c);
    if mono.is_empty() {
        return cs;
    }
    if c.is_one() {
        return mono;
    }
    if cs == "-1" {
        return format!("-{mono}");
    }
    if parens {
        format!("({cs})*{mono}")
    } else {
        format!("{cs}*{mono}")
    }
}

fn join_terms(parts: Vec<String>) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse an arithmetic expression (`+ - * ^ ( )`, integers, variable names)
/// as an element of `ring`. Variable names resolve to the ring's generators,
/// searching through the base rings of a tower.
pub fn parse_in(ring: &Ring, input: &str) -> Result<Elem> {
    let tokens = lex(input)?;
    let mut p = Parser { ring, tokens, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!("unexpected trailing input in {input:?}")));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let b: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = b[start..i].iter().collect();
                let v = digits
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad number {digits:?}")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(b[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Ring,
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Elem> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Elem> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    // prefer a unit inverse, fall back to exact division
                    acc = match rhs.try_inverse() {
                        Ok(inv) => acc.mul(&inv)?,
                        Err(_) => acc.exact_div(&rhs)?,
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Elem> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            _ => {
                let base = self.atom()?;
                if self.peek() == Some(&Tok::Caret) {
                    self.pos += 1;
                    let e = match self.tokens.get(self.pos) {
                        Some(Tok::Num(n)) => {
                            self.pos += 1;
                            u64::try_from(n.magnitude().clone())
                                .map_err(|_| Error::Parse("exponent too large".into()))?
                        }
                        _ => return Err(Error::Parse("expected exponent".into())),
                    };
                    return base.pow(e);
                }
                Ok(base)
            }
        }
    }

    fn atom(&mut self) -> Result<Elem> {
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                if v.is_negative() {
                    unreachable!()
                }
                coerce_int(self.ring, &v)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                lookup_gen(self.ring, &name)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.tokens.get(self.pos) != Some(&Tok::RParen) {
                    return Err(Error::Parse("expected closing parenthesis".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Resolve a variable name to a generator of `ring` or of a ring further
/// down the tower, coerced up.
fn lookup_gen(ring: &Ring, name: &str) -> Result<Elem> {
    match &ring.kind {
        RingKind::PolynomialRing { base, var } => {
            if var == name {
                return gen(ring, 0);
            }
            let inner = lookup_gen(base, name)?;
            Ok(crate::ring::constant_poly(ring, inner))
        }
        RingKind::MultiPolyRing { base, vars } => {
            if let Some(i) = vars.iter().position(|v| v == name) {
                return gen(ring, i);
            }
            let inner = lookup_gen(base, name)?;
            Ok(crate::ring::constant_poly(ring, inner))
        }
        RingKind::ResidueRing { base, .. } => {
            let pring = rep_poly_ring(ring).unwrap_or(base);
            let inner = lookup_gen(pring, name)?;
            match inner.repr {
                Repr::Dense(coeffs) => crate::ring::reduce_in_quotient(ring, coeffs),
                _ => Err(Error::Parse(format!("unknown variable {name:?}"))),
            }
        }
        RingKind::FiniteField { var, .. } | RingKind::NumberField(crate::numfield::NfData { var, .. }) => {
            if var == name {
                gen(ring, 0)
            } else {
                Err(Error::Parse(format!("unknown variable {name:?}")))
            }
        }
        RingKind::FractionField { base } => {
            let inner = lookup_gen(base, name)?;
            crate::ring::make_fraction(ring, base, inner, one(base))
        }
        _ => Err(Error::Parse(format!("unknown variable {name:?}"))),
    }
}
