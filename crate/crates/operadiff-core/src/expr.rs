//! Concrete syntax for free-algebra elements, one grammar per operad
//! flavor:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := rational ('*' factor)* | factor ('*' factor)*
//! factor  := primary ('^' nat)?                    -- '^' in Com only
//! primary := var | '(' expr ')' | '[' expr ',' expr ']'   -- brackets in Lie only
//! var     := [a-z][a-z0-9_']*
//! ```
//!
//! Whitespace is insignificant.  Variables resolve through a [`VarTable`];
//! d-marked variables render as `dx`, `d1x`/`d2x`, `d'x` depending on the
//! table.  Parsing canonicalizes, so `parse ∘ render` is the identity on
//! free elements and `render ∘ parse` is the identity on canonical
//! renderings.

use std::collections::BTreeMap;
use std::fmt;

use crate::free::{canonicalize, FreeElement, FreeTerm};
use crate::lie::LieTree;
use crate::linalg::tagged;
use crate::operad::{ass_perm, ass_symbol, Operad, OperadElement};
use crate::perm::Permutation;
use crate::scalar::{parse_rational, Scalar};

// ---------------------------------------------------------------------------
// Variable tables
// ---------------------------------------------------------------------------

/// Bidirectional map between display names (`x`, `dx`, `d'x`) and the
/// letter symbols of the underlying module (`x`, `0#x`, `1#x`, …).
#[derive(Debug, Clone, Default)]
pub struct VarTable {
    to_letter: BTreeMap<String, String>,
    to_name: BTreeMap<String, String>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, letter: &str) {
        self.to_letter.insert(name.to_string(), letter.to_string());
        self.to_name.insert(letter.to_string(), name.to_string());
    }

    /// Plain variables: `x ↦ x`.
    pub fn plain<S: AsRef<str>>(names: &[S]) -> Self {
        let mut t = Self::new();
        for n in names {
            t.insert(n.as_ref(), n.as_ref());
        }
        t
    }

    /// Tangent variables over `V × V`: `x ↦ 0#x`, `dx ↦ 1#x`.
    pub fn tangent<S: AsRef<str>>(names: &[S]) -> Self {
        let mut t = Self::new();
        for n in names {
            let n = n.as_ref();
            t.insert(n, &tagged(0, n));
            t.insert(&format!("d{n}"), &tagged(1, n));
        }
        t
    }

    /// Independent derivation marks: `x ↦ 0#x`, `d1x ↦ 1#x`, …, `dkx ↦ k#x`.
    pub fn multi_tangent<S: AsRef<str>>(names: &[S], k: usize) -> Self {
        let mut t = Self::new();
        for n in names {
            let n = n.as_ref();
            t.insert(n, &tagged(0, n));
            for j in 1..=k {
                t.insert(&format!("d{j}{n}"), &tagged(j, n));
            }
        }
        t
    }

    /// Second-order marks: `x, dx, d'x, d'dx ↦ 0#x, 1#x, 2#x, 3#x`.
    pub fn second_order<S: AsRef<str>>(names: &[S]) -> Self {
        let mut t = Self::new();
        for n in names {
            let n = n.as_ref();
            t.insert(n, &tagged(0, n));
            t.insert(&format!("d{n}"), &tagged(1, n));
            t.insert(&format!("d'{n}"), &tagged(2, n));
            t.insert(&format!("d'd{n}"), &tagged(3, n));
        }
        t
    }

    pub fn letter(&self, name: &str) -> Option<&str> {
        self.to_letter.get(name).map(String::as_str)
    }

    pub fn name(&self, letter: &str) -> Option<&str> {
        self.to_name.get(letter).map(String::as_str)
    }
}

// ---------------------------------------------------------------------------
// AST and errors
// ---------------------------------------------------------------------------

/// Flavor-checked expression tree; variables are already resolved to
/// letter symbols.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(String),
    Lit(Scalar),
    Sum(Vec<(bool, Expr)>),
    ScalarMul(Scalar, Box<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, u32),
    Bracket(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone)]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Rat(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    end: usize,
    text: String,
}

fn err_at(text: &str, offset: usize, message: String) -> ParseError {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in text.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    ParseError { message, line, col }
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, start));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, start));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, start));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, start));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, start));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, start));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, start));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, start));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, start));
                i += 1;
            }
            '0'..='9' => {
                let mut s = String::new();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    i += 1;
                }
                // A '/' followed by digits folds into one rational token.
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    s.push('/');
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        s.push(chars[i]);
                        i += 1;
                    }
                }
                toks.push((Tok::Rat(s), start));
            }
            'a'..='z' => {
                let mut s = String::new();
                while i < chars.len()
                    && (chars[i].is_ascii_lowercase()
                        || chars[i].is_ascii_digit()
                        || chars[i] == '_'
                        || chars[i] == '\'')
                {
                    s.push(chars[i]);
                    i += 1;
                }
                toks.push((Tok::Ident(s), start));
            }
            other => {
                return Err(err_at(text, start, format!("unexpected character {other:?}")));
            }
        }
    }
    Ok(Lexer {
        toks,
        end: text.len(),
        text: text.to_string(),
    })
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    lx: Lexer,
    pos: usize,
    op: &'a Operad,
    vars: &'a VarTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.lx
            .toks
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or(self.lx.end)
    }

    fn error(&self, message: String) -> ParseError {
        err_at(&self.lx.text, self.offset(), message)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.lx.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let lead_neg = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut parts = vec![(lead_neg, self.term()?)];
        while let Some(tok) = self.peek() {
            let negate = match tok {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.pos += 1;
            parts.push((negate, self.term()?));
        }
        if parts.len() == 1 && !parts[0].0 {
            Ok(parts.remove(0).1)
        } else {
            Ok(Expr::Sum(parts))
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut coeff: Option<Scalar> = None;
        let mut factors = Vec::new();
        if let Some(Tok::Rat(s)) = self.peek() {
            let s = s.clone();
            let off = self.offset();
            self.pos += 1;
            let c = parse_rational(&s, self.op.tag)
                .map_err(|m| err_at(&self.lx.text, off, m))?;
            coeff = Some(c);
        } else {
            factors.push(self.factor()?);
        }
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        let body = match factors.len() {
            0 => None,
            1 => Some(factors.remove(0)),
            _ => {
                if self.op.is_lie() {
                    return Err(self.error(
                        "products are not Lie expressions; use brackets".to_string(),
                    ));
                }
                Some(Expr::Product(factors))
            }
        };
        Ok(match (coeff, body) {
            (None, Some(b)) => b,
            (Some(c), None) => {
                if self.op.is_lie() && !c.is_zero() {
                    return Err(self
                        .error("constants are not Lie expressions".to_string()));
                }
                Expr::Lit(c)
            }
            (Some(c), Some(b)) => Expr::ScalarMul(c, Box::new(b)),
            (None, None) => unreachable!("term always parses a rational or a factor"),
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            if !self.op.is_com() {
                return Err(self.error(format!(
                    "'^' is only valid in commutative expressions, not {}",
                    self.op.id
                )));
            }
            self.pos += 1;
            match self.bump() {
                Some(Tok::Rat(s)) if !s.contains('/') => {
                    let n: u32 = s.parse().map_err(|_| {
                        self.error(format!("invalid exponent {s:?}"))
                    })?;
                    Ok(Expr::Power(Box::new(base), n))
                }
                _ => Err(self.error("expected a natural-number exponent".to_string())),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Ident(name)) => match self.vars.letter(&name) {
                Some(l) => Ok(Expr::Var(l.to_string())),
                None => Err(err_at(
                    &self.lx.text,
                    off,
                    format!("unknown variable {name:?}"),
                )),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::LBracket) => {
                if !self.op.is_lie() {
                    return Err(err_at(
                        &self.lx.text,
                        off,
                        format!("brackets are only valid in Lie expressions, not {}", self.op.id),
                    ));
                }
                let l = self.expr()?;
                self.expect(&Tok::Comma, "','")?;
                let r = self.expr()?;
                self.expect(&Tok::RBracket, "']'")?;
                Ok(Expr::Bracket(Box::new(l), Box::new(r)))
            }
            _ => Err(err_at(
                &self.lx.text,
                off,
                "expected a variable, '(' or '['".to_string(),
            )),
        }
    }
}

/// Parses `text` into a flavor-checked AST with variables resolved
/// through `vars`.
pub fn parse_expression(op: &Operad, vars: &VarTable, text: &str) -> Result<Expr, ParseError> {
    let lx = lex(text)?;
    let mut p = Parser {
        lx,
        pos: 0,
        op,
        vars,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input after expression".to_string()));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Evaluation AST → FreeElement
// ---------------------------------------------------------------------------

fn product_symbol(op: &Operad, n: usize) -> String {
    if op.is_com() {
        format!("c{n}")
    } else if op.is_ass() {
        ass_symbol(&Permutation::identity(n))
    } else {
        panic!("no product operation in {}", op.id)
    }
}

fn nary_product(op: &Operad, parts: &[FreeElement]) -> FreeElement {
    let n = parts.len();
    let mu = OperadElement::basis(n, &product_symbol(op, n), op.tag);
    crate::adjoint::free_product(op, &mu, &parts.iter().collect::<Vec<_>>())
}

/// Evaluates an AST into the canonical free element it denotes.
pub fn eval_expression(op: &Operad, e: &Expr) -> FreeElement {
    match e {
        Expr::Var(letter) => canonicalize(
            op,
            &op.unit(),
            std::slice::from_ref(letter),
        ),
        Expr::Lit(c) => {
            if c.is_zero() {
                return FreeElement::zero();
            }
            let unit = OperadElement::basis(0, &product_symbol(op, 0), op.tag);
            canonicalize(op, &unit, &[]).scale(c)
        }
        Expr::Sum(parts) => {
            let mut out = FreeElement::zero();
            for (negate, p) in parts {
                let v = eval_expression(op, p);
                out = if *negate { out.sub(&v) } else { out.add(&v) };
            }
            out
        }
        Expr::ScalarMul(c, b) => eval_expression(op, b).scale(c),
        Expr::Product(parts) => {
            let vals: Vec<FreeElement> = parts.iter().map(|p| eval_expression(op, p)).collect();
            nary_product(op, &vals)
        }
        Expr::Power(b, k) => {
            let v = eval_expression(op, b);
            let copies: Vec<FreeElement> = (0..*k).map(|_| v.clone()).collect();
            nary_product(op, &copies)
        }
        Expr::Bracket(l, r) => {
            let mu = OperadElement::basis(2, &crate::operad::lc_symbol(&[0, 1]), op.tag);
            crate::adjoint::free_product(
                op,
                &mu,
                &[&eval_expression(op, l), &eval_expression(op, r)],
            )
        }
    }
}

/// Parse and evaluate in one step.
pub fn parse_element(op: &Operad, vars: &VarTable, text: &str) -> Result<FreeElement, ParseError> {
    Ok(eval_expression(op, &parse_expression(op, vars, text)?))
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn render_name(vars: &VarTable, letter: &str) -> String {
    vars.name(letter)
        .unwrap_or_else(|| panic!("no display name for letter {letter:?}"))
        .to_string()
}

fn render_lie_tree(t: &LieTree, vars: &VarTable) -> String {
    match t {
        LieTree::Leaf(s) => render_name(vars, s),
        LieTree::Node(l, r) => format!(
            "[{},{}]",
            render_lie_tree(l, vars),
            render_lie_tree(r, vars)
        ),
    }
}

/// The factor string of one canonical term, without its coefficient;
/// `None` for the arity-0 constant.
fn render_term(op: &Operad, vars: &VarTable, t: &FreeTerm) -> Option<String> {
    if t.arity() == 0 {
        return None;
    }
    if op.is_com() {
        let mut factors: Vec<String> = Vec::new();
        let mut i = 0;
        while i < t.word.len() {
            let mut j = i;
            while j < t.word.len() && t.word[j] == t.word[i] {
                j += 1;
            }
            let name = render_name(vars, &t.word[i]);
            factors.push(if j - i == 1 {
                name
            } else {
                format!("{name}^{}", j - i)
            });
            i = j;
        }
        Some(factors.join("*"))
    } else if op.is_ass() {
        assert!(
            ass_perm(&t.op).is_identity(),
            "canonical Ass terms carry the identity operation"
        );
        Some(
            t.word
                .iter()
                .map(|l| render_name(vars, l))
                .collect::<Vec<_>>()
                .join("*"),
        )
    } else if op.is_lie() {
        let tree = LieTree::from_shape(&t.op, &t.word).expect("canonical Lie shape");
        Some(render_lie_tree(&tree, vars))
    } else {
        panic!("no concrete expression syntax for operad {}", op.id)
    }
}

/// Renders an element canonically; `parse(render(e)) = e`.
pub fn render(op: &Operad, vars: &VarTable, el: &FreeElement) -> String {
    if el.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (t, c) in el.iter() {
        let negative = c.is_negative();
        let abs = if negative { -c } else { c.clone() };
        if first {
            if negative {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        match render_term(op, vars, t) {
            None => out.push_str(&abs.to_string()),
            Some(body) => {
                if abs.is_one() {
                    out.push_str(&body);
                } else {
                    out.push_str(&format!("{abs}*{body}"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::diff_transform;
    use crate::linalg::{product_module, BasedModule};
    use crate::operad::{make_ass, make_com, make_lie};
    use crate::rng::{random_element, seeded};
    use crate::scalar::FieldTag;

    fn com() -> Operad {
        make_com(FieldTag::Q)
    }

    #[test]
    fn com_example_expands_by_hand() {
        let op = com();
        let vars = VarTable::plain(&["x", "y"]);
        let got = parse_element(&op, &vars, "2*x^2*y - 1/3*y^3").unwrap();
        let mu3 = OperadElement::basis(3, "c3", op.tag);
        let want = canonicalize(&op, &mu3, &["x".into(), "x".into(), "y".into()])
            .scale(&Scalar::from_int(2, FieldTag::Q))
            .sub(
                &canonicalize(&op, &mu3, &["y".into(), "y".into(), "y".into()])
                    .scale(&Scalar::from_ratio(1, 3, FieldTag::Q)),
            );
        assert!(got.sub(&want).is_zero());
    }

    #[test]
    fn ass_words_do_not_commute() {
        let op = make_ass(FieldTag::Q);
        let vars = VarTable::plain(&["x", "y"]);
        let got = parse_element(&op, &vars, "x*y - y*x").unwrap();
        assert_eq!(got.iter().count(), 2);
        assert!(!got.is_zero());
        // And xy + yx − yx − xy = 0.
        let z = parse_element(&op, &vars, "x*y + y*x - y*x - x*y").unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn lie_brackets_normalize() {
        let op = make_lie(FieldTag::Q);
        let vars = VarTable::plain(&["x", "y", "z"]);
        // Antisymmetry.
        assert!(parse_element(&op, &vars, "[x,y] + [y,x]").unwrap().is_zero());
        assert!(parse_element(&op, &vars, "[x,x]").unwrap().is_zero());
        // Jacobi.
        let jac = parse_element(&op, &vars, "[x,[y,z]] + [y,[z,x]] + [z,[x,y]]").unwrap();
        assert!(jac.is_zero());
        // The spec example: [x,[y,x]] = −[x,[x,y]] in normal form.
        let a = parse_element(&op, &vars, "[x,[y,x]]").unwrap();
        let b = parse_element(&op, &vars, "[x,[x,y]]").unwrap();
        assert!(a.add(&b).is_zero());
        assert!(!a.is_zero());
    }

    #[test]
    fn differentiate_renders_with_d_marks() {
        let op = com();
        let plain = VarTable::plain(&["x"]);
        let tangent = VarTable::tangent(&["x"]);
        let e = parse_element(&op, &plain, "x^2").unwrap();
        let d = diff_transform(&op, &e);
        assert_eq!(render(&op, &tangent, &d), "2*x*dx");
    }

    #[test]
    fn errors_carry_positions() {
        let op = com();
        let vars = VarTable::plain(&["x"]);
        let e = parse_element(&op, &vars, "x + [x,x]").unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
        assert!(e.message.contains("brackets"));
        let e = parse_element(&op, &vars, "x + q").unwrap_err();
        assert!(e.message.contains("unknown variable"));
        assert_eq!(e.col, 5);
        let e = parse_element(&make_lie(FieldTag::Q), &vars, "x^2").unwrap_err();
        assert!(e.message.contains("'^'"));
        let e = parse_element(&op, &vars, "(x").unwrap_err();
        assert!(e.message.contains("expected ')'"));
        let e = parse_element(&op, &vars, "x )").unwrap_err();
        assert!(e.message.contains("trailing"));
    }

    #[test]
    fn constants_parse_in_com_and_ass() {
        let op = com();
        let vars = VarTable::plain(&["x"]);
        let e = parse_element(&op, &vars, "3 - 1/2").unwrap();
        assert_eq!(render(&op, &vars, &e), "5/2");
        assert!(parse_element(&make_lie(FieldTag::Q), &vars, "3").is_err());
    }

    #[test]
    fn roundtrip_200_per_flavor() {
        let names = ["x", "y"];
        let base = BasedModule::from_names(&names, FieldTag::Q);
        let vv = product_module(&[&base, &base]);
        for (op, max_arity) in [
            (make_com(FieldTag::Q), 4usize),
            (make_ass(FieldTag::Q), 4),
            (make_lie(FieldTag::Q), 3),
        ] {
            let vars = VarTable::tangent(&names);
            let mut rng = seeded(2024);
            for _ in 0..200 {
                let mut e = random_element(&op, &vv, max_arity, &mut rng);
                if op.is_lie() {
                    // Lie expressions have no constant term.
                    e = e
                        .iter()
                        .filter(|(t, _)| t.arity() > 0)
                        .fold(FreeElement::zero(), |acc, (t, c)| {
                            let mut a = acc;
                            a.add_term(t.clone(), c);
                            a
                        });
                }
                let text = render(&op, &vars, &e);
                let back = parse_element(&op, &vars, &text)
                    .unwrap_or_else(|err| panic!("{}: {text:?}: {err}", op.id));
                assert!(
                    back.sub(&e).is_zero(),
                    "{}: {text:?} re-parsed to {back}",
                    op.id
                );
                // Render is stable on canonical output.
                assert_eq!(render(&op, &vars, &back), text);
            }
        }
    }
}
