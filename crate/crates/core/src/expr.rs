use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::weight::{rational_from_decimal, rational_to_f64, rational_to_string};

/// Cap on the number of monomials a polynomial expansion may produce.
pub const MAX_MONOMIALS: usize = 1_000_000;

/// A symbolic arithmetic expression over named variables with exact rational
/// coefficients. Construct with [`Expr::sum`] and [`Expr::product`], which
/// flatten nested nodes and absorb ring identities, so a `Sum` or `Product`
/// always has at least two children and zero/one never appear as operands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Constant(BigRational),
    Variable(String),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
}

/// Sorted multiset of variable names, e.g. `x·x·y` is `["x", "x", "y"]`.
type Monomial = Vec<String>;

impl Expr {
    pub fn int(value: i64) -> Self {
        Expr::Constant(BigRational::from_integer(value.into()))
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::Variable(name.into())
    }

    /// Build a sum, flattening nested sums, folding constants together, and
    /// dropping zero summands. An empty or all-zero sum is `0`.
    pub fn sum(children: Vec<Expr>) -> Self {
        fn flatten(child: Expr, flat: &mut Vec<Expr>, constant: &mut BigRational) {
            match child {
                Expr::Sum(inner) => {
                    for c in inner {
                        flatten(c, flat, constant);
                    }
                }
                Expr::Constant(value) => *constant += value,
                other => flat.push(other),
            }
        }
        let mut flat = Vec::new();
        let mut constant = BigRational::zero();
        for child in children {
            flatten(child, &mut flat, &mut constant);
        }
        if !constant.is_zero() {
            flat.push(Expr::Constant(constant));
        }
        match flat.len() {
            0 => Expr::Constant(BigRational::zero()),
            1 => flat.pop().unwrap(),
            _ => Expr::Sum(flat),
        }
    }

    /// Build a product, flattening nested products and folding constants into
    /// a single leading coefficient. A zero factor annihilates the product and
    /// a coefficient of one is dropped.
    pub fn product(children: Vec<Expr>) -> Self {
        fn flatten(child: Expr, flat: &mut Vec<Expr>, constant: &mut BigRational) {
            match child {
                Expr::Product(inner) => {
                    for c in inner {
                        flatten(c, flat, constant);
                    }
                }
                Expr::Constant(value) => *constant *= value,
                other => flat.push(other),
            }
        }
        let mut flat = Vec::new();
        let mut constant = BigRational::one();
        for child in children {
            flatten(child, &mut flat, &mut constant);
        }
        if constant.is_zero() {
            return Expr::Constant(BigRational::zero());
        }
        if !constant.is_one() {
            flat.insert(0, Expr::Constant(constant));
        }
        match flat.len() {
            0 => Expr::Constant(BigRational::one()),
            1 => flat.pop().unwrap(),
            _ => Expr::Product(flat),
        }
    }

    /// All variable names appearing in the expression.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut names = BTreeSet::new();
        self.collect_variables(&mut names);
        names
    }

    fn collect_variables(&self, names: &mut BTreeSet<String>) {
        match self {
            Expr::Constant(_) => {}
            Expr::Variable(name) => {
                names.insert(name.clone());
            }
            Expr::Sum(children) | Expr::Product(children) => {
                for child in children {
                    child.collect_variables(names);
                }
            }
        }
    }

    /// Evaluate numerically with variables looked up through `bind`.
    pub fn eval(&self, bind: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
        match self {
            Expr::Constant(value) => Ok(rational_to_f64(value)),
            Expr::Variable(name) => bind(name).ok_or_else(|| Error::UnboundVariable(name.clone())),
            Expr::Sum(children) => {
                let mut total = 0.0;
                for child in children {
                    total += child.eval(bind)?;
                }
                Ok(total)
            }
            Expr::Product(children) => {
                let mut total = 1.0;
                for child in children {
                    total *= child.eval(bind)?;
                }
                Ok(total)
            }
        }
    }

    /// Expand into a sorted sum of monomials with collected coefficients.
    /// Two expressions denote the same polynomial exactly when their
    /// canonical forms are structurally equal.
    pub fn canonical_polynomial(&self) -> Result<Expr> {
        let poly = self.expand_capped(MAX_MONOMIALS)?;
        let mut terms = Vec::with_capacity(poly.len());
        for (vars, coeff) in poly {
            let mut factors = Vec::with_capacity(vars.len() + 1);
            if vars.is_empty() || !coeff.is_one() {
                factors.push(Expr::Constant(coeff));
            }
            factors.extend(vars.into_iter().map(Expr::Variable));
            terms.push(Expr::product(factors));
        }
        Ok(Expr::sum(terms))
    }

    fn expand_capped(&self, cap: usize) -> Result<BTreeMap<Monomial, BigRational>> {
        let mut poly = BTreeMap::new();
        match self {
            Expr::Constant(value) => {
                if !value.is_zero() {
                    poly.insert(Vec::new(), value.clone());
                }
            }
            Expr::Variable(name) => {
                poly.insert(vec![name.clone()], BigRational::one());
            }
            Expr::Sum(children) => {
                for child in children {
                    for (vars, coeff) in child.expand_capped(cap)? {
                        *poly.entry(vars).or_insert_with(BigRational::zero) += coeff;
                    }
                    poly.retain(|_, coeff| !coeff.is_zero());
                    if poly.len() > cap {
                        return Err(Error::ExpansionTooLarge(cap));
                    }
                }
            }
            Expr::Product(children) => {
                poly.insert(Vec::new(), BigRational::one());
                for child in children {
                    let factor = child.expand_capped(cap)?;
                    let mut next = BTreeMap::new();
                    for (left_vars, left_coeff) in &poly {
                        for (right_vars, right_coeff) in &factor {
                            let vars = merge_monomials(left_vars, right_vars);
                            let entry = next.entry(vars).or_insert_with(BigRational::zero);
                            *entry += left_coeff * right_coeff;
                        }
                        if next.len() > cap {
                            return Err(Error::ExpansionTooLarge(cap));
                        }
                    }
                    next.retain(|_, coeff| !coeff.is_zero());
                    poly = next;
                }
            }
        }
        Ok(poly)
    }

    /// Split off a leading minus sign for rendering, returning the sign and
    /// the non-negative remainder.
    fn split_sign(&self) -> (bool, Expr) {
        match self {
            Expr::Constant(value) if value.is_negative() => (true, Expr::Constant(-value.clone())),
            Expr::Product(children) => match children.first() {
                Some(Expr::Constant(value)) if value.is_negative() => {
                    let mut rest = Vec::with_capacity(children.len());
                    rest.push(Expr::Constant(-value.clone()));
                    rest.extend(children[1..].iter().cloned());
                    (true, Expr::product(rest))
                }
                _ => (false, self.clone()),
            },
            _ => (false, self.clone()),
        }
    }
}

/// Merge two sorted monomials, preserving multiplicity.
fn merge_monomials(left: &[String], right: &[String]) -> Monomial {
    let mut merged = Vec::with_capacity(left.len() + right.len());
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            merged.push(left[i].clone());
            i += 1;
        } else {
            merged.push(right[j].clone());
            j += 1;
        }
    }
    merged.extend_from_slice(&left[i..]);
    merged.extend_from_slice(&right[j..]);
    merged
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(value) => write!(f, "{}", rational_to_string(value)),
            Expr::Variable(name) => write!(f, "{name}"),
            Expr::Sum(children) => {
                for (index, child) in children.iter().enumerate() {
                    let (negative, magnitude) = child.split_sign();
                    if index == 0 {
                        if negative {
                            write!(f, "-")?;
                        }
                    } else if negative {
                        write!(f, " - ")?;
                    } else {
                        write!(f, " + ")?;
                    }
                    write!(f, "{magnitude}")?;
                }
                Ok(())
            }
            Expr::Product(children) => {
                for (index, child) in children.iter().enumerate() {
                    if index > 0 {
                        write!(f, "·")?;
                    }
                    let parens = match child {
                        Expr::Sum(_) => true,
                        Expr::Constant(value) => {
                            index > 0 && (value.is_negative() || !value.denom().is_one())
                        }
                        _ => false,
                    };
                    if parens {
                        write!(f, "({child})")?;
                    } else {
                        write!(f, "{child}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl crate::weight::Weight for Expr {
    const SYMBOLIC: bool = true;

    fn zero() -> Self {
        Expr::Constant(<BigRational as Zero>::zero())
    }

    fn one() -> Self {
        Expr::Constant(<BigRational as One>::one())
    }

    fn add(&self, other: &Self) -> Self {
        Expr::sum(vec![self.clone(), other.clone()])
    }

    fn mul(&self, other: &Self) -> Self {
        Expr::product(vec![self.clone(), other.clone()])
    }

    fn neg(&self) -> Self {
        Expr::product(vec![Expr::int(-1), self.clone()])
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Constant(value) if Zero::is_zero(value))
    }

    fn normalize(&self) -> Result<Self> {
        self.canonical_polynomial()
    }

    fn to_f64(&self) -> Option<f64> {
        match self {
            Expr::Constant(value) => Some(rational_to_f64(value)),
            _ => None,
        }
    }
}

/// Parse an expression from text. Supports `+`, `-` (binary and unary),
/// `*` and `·` for products, parentheses, implicit multiplication by
/// juxtaposition, and integer, decimal, and fraction literals.
pub fn parse(text: &str) -> Result<Expr> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.parse_expr()?;
    if parser.pos < parser.tokens.len() {
        let (offset, token) = &parser.tokens[parser.pos];
        return Err(Error::Parse {
            offset: *offset,
            message: format!("unexpected {}", token.describe()),
        });
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(value) => format!("number `{}`", rational_to_string(value)),
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut chars = text.char_indices().peekable();
    while let Some(&(offset, ch)) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '+' => {
                chars.next();
                tokens.push((offset, Token::Plus));
            }
            '-' | '−' => {
                chars.next();
                tokens.push((offset, Token::Minus));
            }
            '*' | '·' => {
                chars.next();
                tokens.push((offset, Token::Star));
            }
            '/' => {
                chars.next();
                tokens.push((offset, Token::Slash));
            }
            '(' => {
                chars.next();
                tokens.push((offset, Token::LParen));
            }
            ')' => {
                chars.next();
                tokens.push((offset, Token::RParen));
            }
            c if c.is_ascii_digit() => {
                let mut end = offset;
                let mut seen_dot = false;
                while let Some(&(pos, c)) = chars.peek() {
                    if c.is_ascii_digit() || (c == '.' && !seen_dot) {
                        seen_dot |= c == '.';
                        end = pos + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                // optional exponent
                if let Some(&(pos, c)) = chars.peek() {
                    if (c == 'e' || c == 'E')
                        && matches!(
                            bytes.get(pos + 1),
                            Some(b'0'..=b'9') | Some(b'+') | Some(b'-')
                        )
                    {
                        chars.next();
                        end = pos + 1;
                        if let Some(&(pos, c)) = chars.peek() {
                            if c == '+' || c == '-' {
                                chars.next();
                                end = pos + 1;
                            }
                        }
                        let mut any_digit = false;
                        while let Some(&(pos, c)) = chars.peek() {
                            if c.is_ascii_digit() {
                                any_digit = true;
                                end = pos + 1;
                                chars.next();
                            } else {
                                break;
                            }
                        }
                        if !any_digit {
                            return Err(Error::Parse {
                                offset,
                                message: "exponent without digits".into(),
                            });
                        }
                    }
                }
                let literal = &text[offset..end];
                let value = rational_from_decimal(literal).ok_or_else(|| Error::Parse {
                    offset,
                    message: format!("invalid number literal `{literal}`"),
                })?;
                tokens.push((offset, Token::Number(value)));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut end = offset;
                while let Some(&(pos, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        end = pos + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((offset, Token::Ident(text[offset..end].to_string())));
            }
            other => {
                return Err(Error::Parse {
                    offset,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn advance(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or_else(|| self.tokens.last().map(|(o, _)| o + 1).unwrap_or(0))
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.parse_term()?];
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.advance();
                    terms.push(self.parse_term()?);
                }
                Some(Token::Minus) => {
                    self.advance();
                    let term = self.parse_term()?;
                    terms.push(Expr::product(vec![Expr::int(-1), term]));
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.parse_factor()?];
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.advance();
                    factors.push(self.parse_factor()?);
                }
                // juxtaposition, e.g. `2 x` or `(a + b)(c + d)`
                Some(Token::Number(_)) | Some(Token::Ident(_)) | Some(Token::LParen) => {
                    factors.push(self.parse_factor()?);
                }
                _ => break,
            }
        }
        Ok(Expr::product(factors))
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.advance();
            let inner = self.parse_factor()?;
            return Ok(Expr::product(vec![Expr::int(-1), inner]));
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.advance() {
            Some(Token::Number(value)) => {
                // fraction literal such as `1/2`
                if matches!(self.peek(), Some(Token::Slash)) {
                    let saved = self.pos;
                    self.advance();
                    match self.advance() {
                        Some(Token::Number(denom)) if !denom.is_zero() => {
                            return Ok(Expr::Constant(value / denom));
                        }
                        _ => self.pos = saved,
                    }
                }
                Ok(Expr::Constant(value))
            }
            Some(Token::Ident(name)) => Ok(Expr::Variable(name)),
            Some(Token::LParen) => {
                let inner = self.parse_expr()?;
                match self.advance() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::Parse {
                        offset: self.offset(),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some(token) => Err(Error::Parse {
                offset,
                message: format!("unexpected {}", token.describe()),
            }),
            None => Err(Error::Parse {
                offset,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::Weight;

    fn canon(text: &str) -> Expr {
        parse(text).unwrap().canonical_polynomial().unwrap()
    }

    #[test]
    fn constructors_absorb_identities() {
        let x = Expr::var("x");
        assert_eq!(Expr::sum(vec![x.clone(), Expr::int(0)]), x);
        assert_eq!(Expr::product(vec![x.clone(), Expr::int(1)]), x);
        assert_eq!(Expr::product(vec![x.clone(), Expr::int(0)]), Expr::int(0));
        assert_eq!(Expr::sum(vec![]), Expr::int(0));
        assert_eq!(Expr::product(vec![]), Expr::int(1));
    }

    #[test]
    fn constructors_flatten() {
        let x = Expr::var("x");
        let y = Expr::var("y");
        let z = Expr::var("z");
        let nested = Expr::sum(vec![Expr::sum(vec![x.clone(), y.clone()]), z.clone()]);
        assert_eq!(nested, Expr::Sum(vec![x.clone(), y.clone(), z.clone()]));
        let nested = Expr::product(vec![Expr::product(vec![x.clone(), y.clone()]), z.clone()]);
        assert_eq!(nested, Expr::Product(vec![x, y, z]));
    }

    #[test]
    fn double_negation_cancels() {
        let x = Expr::var("x");
        assert_eq!(Weight::neg(&Weight::neg(&x)), x);
    }

    #[test]
    fn display_matches_expected_shapes() {
        let expr = Expr::product(vec![
            Expr::var("u11"),
            Expr::sum(vec![Expr::var("u12"), Expr::var("u22")]),
        ]);
        assert_eq!(expr.to_string(), "u11·(u12 + u22)");

        let expr = Expr::sum(vec![
            Expr::var("a"),
            Expr::product(vec![Expr::int(-1), Expr::var("b")]),
        ]);
        assert_eq!(expr.to_string(), "a - b");

        let expr = Expr::sum(vec![
            Expr::product(vec![Expr::int(-2), Expr::var("a")]),
            Expr::int(3),
        ]);
        assert_eq!(expr.to_string(), "-2·a + 3");
    }

    #[test]
    fn parse_round_trip() {
        let cases = [
            "u11·(u12 + u22)·(u13 + u23 + u33)",
            "a - b·c + 2",
            "-x·y",
            "1/2·x + 3",
        ];
        for case in cases {
            let parsed = parse(case).unwrap();
            let reparsed = parse(&parsed.to_string()).unwrap();
            assert_eq!(parsed, reparsed, "case {case}");
        }
    }

    #[test]
    fn parse_implicit_multiplication() {
        assert_eq!(parse("2x").unwrap(), parse("2*x").unwrap());
        assert_eq!(parse("(a+b)(a-b)").unwrap(), parse("(a+b)*(a-b)").unwrap());
        assert_eq!(parse("1/2 x").unwrap(), parse("(1/2)*x").unwrap());
        // slash is a fraction separator, not division
        assert!(parse("x/2").is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(parse("x +"), Err(Error::Parse { .. })));
        assert!(matches!(parse("(x"), Err(Error::Parse { .. })));
        assert!(matches!(parse("x $ y"), Err(Error::Parse { .. })));
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn canonical_equates_factored_and_expanded() {
        assert_eq!(canon("(a+b)·c"), canon("a·c + b·c"));
        assert_eq!(canon("(a+b)(a-b)"), canon("a·a - b·b"));
        assert_ne!(canon("(a+b)·c"), canon("a·c"));
    }

    #[test]
    fn canonical_collects_and_cancels() {
        assert_eq!(canon("x + x"), parse("2·x").unwrap());
        assert_eq!(canon("x - x"), Expr::int(0));
        assert_eq!(canon("2·x·y + y·x"), parse("3·x·y").unwrap());
    }

    #[test]
    fn eval_handles_bindings() {
        let expr = parse("u11·(u12 + u22) - 1/2").unwrap();
        let bind = |name: &str| match name {
            "u11" => Some(2.0),
            "u12" => Some(3.0),
            "u22" => Some(4.0),
            _ => None,
        };
        assert_eq!(expr.eval(&bind).unwrap(), 13.5);
        let missing = parse("q + 1").unwrap();
        assert!(matches!(
            missing.eval(&bind),
            Err(Error::UnboundVariable(name)) if name == "q"
        ));
    }

    #[test]
    fn expansion_cap_is_enforced() {
        // (a0 + b0)·(a1 + b1) has four monomials, over a cap of three.
        let product = Expr::product(vec![
            Expr::sum(vec![Expr::var("a0"), Expr::var("b0")]),
            Expr::sum(vec![Expr::var("a1"), Expr::var("b1")]),
        ]);
        assert!(matches!(
            product.expand_capped(3),
            Err(Error::ExpansionTooLarge(3))
        ));
        assert_eq!(product.expand_capped(4).unwrap().len(), 4);
    }

    #[test]
    fn variables_are_collected() {
        let expr = parse("u11·(u12 + u22) - q").unwrap();
        let names: Vec<_> = expr.variables().into_iter().collect();
        assert_eq!(names, ["q", "u11", "u12", "u22"]);
    }
}
