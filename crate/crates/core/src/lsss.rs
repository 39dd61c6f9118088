//! Access policies: a small boolean formula language, its compilation to a
//! linear secret sharing scheme `(M, ρ)`, sharing and reconstruction.
//!
//! Rows are indexed from zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::zq::{solve_row_combination, Modulus, ZqMatrix, ZqVector};

/// Label of the all-zero padding rows. It can never be issued to a user.
pub const PAD_ATTRIBUTE: &str = "⊥";

/// Nesting deeper than this is rejected by the parser.
pub const MAX_NESTING: usize = 128;

/// Monotone boolean formula over attribute names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PolicyAst {
    Leaf(String),
    And(Box<PolicyAst>, Box<PolicyAst>),
    Or(Box<PolicyAst>, Box<PolicyAst>),
}

impl PolicyAst {
    pub fn leaf(name: impl Into<String>) -> Self {
        PolicyAst::Leaf(name.into())
    }

    pub fn and(left: PolicyAst, right: PolicyAst) -> Self {
        PolicyAst::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: PolicyAst, right: PolicyAst) -> Self {
        PolicyAst::Or(Box::new(left), Box::new(right))
    }

    /// Plain boolean evaluation under the given attribute set.
    pub fn evaluate(&self, attrs: &BTreeSet<String>) -> bool {
        match self {
            PolicyAst::Leaf(a) => attrs.contains(a),
            PolicyAst::And(l, r) => l.evaluate(attrs) && r.evaluate(attrs),
            PolicyAst::Or(l, r) => l.evaluate(attrs) || r.evaluate(attrs),
        }
    }

    /// Leaf attributes in left-to-right order, repeats included.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            PolicyAst::Leaf(a) => out.push(a),
            PolicyAst::And(l, r) | PolicyAst::Or(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            PolicyAst::Leaf(_) => 0,
            PolicyAst::And(l, r) | PolicyAst::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

impl fmt::Display for PolicyAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, node: &PolicyAst) -> fmt::Result {
            match node {
                PolicyAst::Leaf(a) => write!(f, "{a}"),
                _ => write!(f, "({node})"),
            }
        }
        match self {
            PolicyAst::Leaf(a) => write!(f, "{a}"),
            PolicyAst::And(l, r) => {
                child(f, l)?;
                write!(f, " AND ")?;
                child(f, r)
            }
            PolicyAst::Or(l, r) => {
                child(f, l)?;
                write!(f, " OR ")?;
                child(f, r)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Attr(String),
    And,
    Or,
    Open,
    Close,
    End,
}

fn is_attr_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b':' | b'.' | b'-')
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
        } else if b == b'(' {
            tokens.push((i, Token::Open));
            i += 1;
        } else if b == b')' {
            tokens.push((i, Token::Close));
            i += 1;
        } else if is_attr_byte(b) {
            let start = i;
            while i < bytes.len() && is_attr_byte(bytes[i]) {
                i += 1;
            }
            let word = &text[start..i];
            let token = if word.eq_ignore_ascii_case("and") {
                Token::And
            } else if word.eq_ignore_ascii_case("or") {
                Token::Or
            } else {
                Token::Attr(word.to_string())
            };
            tokens.push((start, token));
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(Error::Syntax { offset: i, message: format!("unexpected character {ch:?}") });
        }
    }
    tokens.push((text.len(), Token::End));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    nesting: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn error<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax { offset: self.offset(), message: message.to_string() })
    }

    fn expr(&mut self) -> Result<PolicyAst> {
        let mut node = self.term()?;
        while *self.peek() == Token::Or {
            self.pos += 1;
            node = PolicyAst::or(node, self.term()?);
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<PolicyAst> {
        let mut node = self.factor()?;
        while *self.peek() == Token::And {
            self.pos += 1;
            node = PolicyAst::and(node, self.factor()?);
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<PolicyAst> {
        match self.peek().clone() {
            Token::Attr(name) => {
                self.pos += 1;
                Ok(PolicyAst::Leaf(name))
            }
            Token::Open => {
                if self.nesting >= MAX_NESTING {
                    return self.error("parentheses nested too deeply");
                }
                self.nesting += 1;
                self.pos += 1;
                let inner = self.expr()?;
                if *self.peek() != Token::Close {
                    return self.error("expected ')'");
                }
                self.pos += 1;
                self.nesting -= 1;
                Ok(inner)
            }
            Token::End => self.error("unexpected end of policy"),
            _ => self.error("expected an attribute or '('"),
        }
    }
}

/// Parses a policy such as `doctor AND (cardiology OR admin)`.
///
/// `AND` binds tighter than `OR`, both associate to the left, and keywords
/// are case-insensitive. Attribute names use `[A-Za-z0-9_:.-]`.
pub fn parse_policy(text: &str) -> Result<PolicyAst> {
    let tokens = tokenize(text)?;
    if tokens.len() == 1 {
        return Err(Error::Syntax { offset: 0, message: "empty policy".into() });
    }
    let mut parser = Parser { tokens, pos: 0, nesting: 0 };
    let ast = parser.expr()?;
    match parser.peek() {
        Token::End => Ok(ast),
        Token::Close => parser.error("unbalanced ')'"),
        _ => parser.error("expected AND, OR or end of policy"),
    }
}

/// A share-generating matrix `M` (`l × n_cols`) with a label `ρ(i)` per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SharePolicy {
    matrix_m: ZqMatrix,
    rho: Vec<String>,
}

impl SharePolicy {
    pub fn new(matrix_m: ZqMatrix, rho: Vec<String>) -> Result<Self> {
        if matrix_m.rows() == 0 || matrix_m.cols() == 0 {
            return Err(Error::InvalidParameter("share matrix must be non-empty".into()));
        }
        if rho.len() != matrix_m.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} rows",
                rho.len(),
                matrix_m.rows()
            )));
        }
        Ok(Self { matrix_m, rho })
    }

    pub fn matrix(&self) -> &ZqMatrix {
        &self.matrix_m
    }

    pub fn rho(&self) -> &[String] {
        &self.rho
    }

    pub fn label(&self, row: usize) -> &str {
        &self.rho[row]
    }

    /// Number of rows `l`.
    pub fn l(&self) -> usize {
        self.rho.len()
    }

    pub fn n_cols(&self) -> usize {
        self.matrix_m.cols()
    }

    pub fn modulus(&self) -> &Modulus {
        self.matrix_m.modulus()
    }

    /// Appends zero rows labeled [`PAD_ATTRIBUTE`] until there are `rows`
    /// rows.
    pub fn padded(&self, rows: usize) -> Result<SharePolicy> {
        if self.l() > rows {
            return Err(Error::InvalidParameter(format!(
                "policy has {} rows, more than the budget of {rows}",
                self.l()
            )));
        }
        let q = self.modulus();
        let mut entries = self.matrix_m.entries().to_vec();
        entries.resize(rows * self.n_cols(), BigUint::default());
        let matrix_m = ZqMatrix::from_entries(rows, self.n_cols(), entries, q)?;
        let mut rho = self.rho.clone();
        rho.resize(rows, PAD_ATTRIBUTE.to_string());
        Ok(SharePolicy { matrix_m, rho })
    }

    /// Rows whose label is held in `attrs`. Padding rows never qualify.
    pub fn matching_rows(&self, attrs: &BTreeSet<String>) -> Vec<usize> {
        (0..self.l())
            .filter(|&i| self.rho[i] != PAD_ATTRIBUTE && attrs.contains(&self.rho[i]))
            .collect()
    }

    fn target(&self) -> ZqVector {
        ZqVector::unit(self.n_cols(), 0, BigUint::from(1u8), self.modulus())
    }

    fn solve_on(&self, rows: &[usize]) -> Result<ZqVector> {
        if rows.is_empty() {
            return Err(Error::NoSolution);
        }
        solve_row_combination(&self.matrix_m.select_rows(rows), &self.target())
    }
}

/// Compiles a formula with the standard vector-labeling construction.
///
/// The root carries `(1)`. `OR` hands its label to both children. `AND`
/// with label `v` gives `v ∥ 1` to the left child and `0 ∥ −1` to the right,
/// in a fresh column. Leaves become rows in left-to-right order.
pub fn compile_lsss(ast: &PolicyAst, q: &Modulus) -> SharePolicy {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut rho = Vec::new();
    let mut counter = 1usize;
    let mut stack = vec![(ast, vec![1i64])];
    while let Some((node, label)) = stack.pop() {
        match node {
            PolicyAst::Leaf(a) => {
                rows.push(label);
                rho.push(a.clone());
            }
            PolicyAst::Or(l, r) => {
                // right first so the left subtree pops first
                stack.push((r, label.clone()));
                stack.push((l, label));
            }
            PolicyAst::And(l, r) => {
                let mut left = label;
                left.resize(counter, 0);
                left.push(1);
                let mut right = vec![0; counter];
                right.push(-1);
                counter += 1;
                stack.push((r, right));
                stack.push((l, left));
            }
        }
    }
    for row in &mut rows {
        row.resize(counter, 0);
    }
    let matrix_m = ZqMatrix::from_i64_rows(&rows, q).expect("rows share one width");
    SharePolicy { matrix_m, rho }
}

/// Shares `λ = M·v` of `v = (secret, blinds…)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShareVector {
    pub shares: ZqVector,
    pub secret: BigUint,
}

pub fn share_secret(policy: &SharePolicy, secret: &BigUint, blinds: &ZqVector) -> Result<ShareVector> {
    if blinds.dim() + 1 != policy.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} blinds for a {}-column share matrix",
            blinds.dim(),
            policy.n_cols()
        )));
    }
    if blinds.modulus() != policy.modulus() {
        return Err(Error::ModulusMismatch);
    }
    let q = policy.modulus();
    let secret = q.reduce(secret);
    let v = ZqVector::new(vec![secret.clone()], q).concat(blinds)?;
    Ok(ShareVector { shares: policy.matrix().mul_vec(&v)?, secret })
}

/// Whether `(1, 0, …, 0)` lies in the span of the rows labeled by `attrs`.
pub fn is_authorized(policy: &SharePolicy, attrs: &BTreeSet<String>) -> bool {
    policy.solve_on(&policy.matching_rows(attrs)).is_ok()
}

/// Constants `w_i` with `Σ w_i·M_i = (1, 0, …, 0)`.
///
/// The rows used are first pruned to a minimal authorized subset of the
/// matching rows, which keeps the constants small (all ones for compiled
/// formulas).
pub fn find_reconstruction(
    policy: &SharePolicy,
    attrs: &BTreeSet<String>,
) -> Result<BTreeMap<usize, BigUint>> {
    let mut rows = policy.matching_rows(attrs);
    if policy.solve_on(&rows).is_err() {
        return Err(Error::Unauthorized);
    }
    let mut k = 0;
    while k < rows.len() {
        let mut trial = rows.clone();
        trial.remove(k);
        if policy.solve_on(&trial).is_ok() {
            rows = trial;
        } else {
            k += 1;
        }
    }
    let w = policy.solve_on(&rows).map_err(|_| Error::Unauthorized)?;
    Ok(rows.into_iter().zip(w.entries().iter().cloned()).collect())
}

/// Convenience constructor for attribute sets.
pub fn attr_set<I, S>(items: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}
