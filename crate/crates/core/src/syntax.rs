//! Concrete and abstract syntax: symbols, variables, argument lists,
//! prime formulas, formulas and quantifier-free Horn formulas, together
//! with the textual wire format.
//!
//! The wire format is a whitespace-separated s-expression family:
//!
//! ```text
//! (l tok*)            argument list
//! (eq L L)            equation between two lists
//! (pred NAME L*)      predicate application
//! (not F) (imp F F) (iff F F) (and F F) (or F F)
//! (all ?v F) (ex ?v F)
//! (horn (P*) P)       Horn formula: prime premises and a prime conclusion
//! ```
//!
//! Variables are written with a leading `?`. Inside an `(l ...)` form the
//! parenthesis characters are ordinary list tokens, read positionally: the
//! form ends at the first unmatched `)`. Parenthesis tokens inside a list
//! must therefore be balanced, which holds for every list the systems here
//! produce.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An alphabet symbol. `(` and `)` are always-available auxiliary symbols.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_paren(&self) -> bool {
        matches!(&*self.0, "(" | ")")
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.0)
    }
}

/// A variable: a `?`-sigiled name plus the index assigned at its first
/// declaration or appearance. Indices give the total order used by
/// `Free(F)` and generalization.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    index: u32,
    name: Arc<str>,
}

impl Variable {
    /// `name` is the bare name without the `?` sigil.
    pub fn new(name: &str, index: u32) -> Self {
        Variable { index, name: Arc::from(name) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> u32 {
        self.index
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.name)
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}#{}", self.name, self.index)
    }
}

/// Assigns strictly increasing indices to variable names in order of first
/// appearance. A pool is cloned from its owning system before a dependent
/// file is parsed, so equal names always carry equal indices within one
/// system's scope.
#[derive(Clone, Debug, Default)]
pub struct VarPool {
    vars: Vec<Variable>,
}

impl VarPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the variable for `name` (without sigil), creating it with
    /// the next index if unseen.
    pub fn intern(&mut self, name: &str) -> Variable {
        if let Some(v) = self.vars.iter().find(|v| v.name() == name) {
            return v.clone();
        }
        let v = Variable::new(name, self.vars.len() as u32);
        self.vars.push(v.clone());
        v
    }

    pub fn lookup(&self, name: &str) -> Option<Variable> {
        self.vars.iter().find(|v| v.name() == name).cloned()
    }

    /// A variable named distinctly from everything in the pool, interned.
    pub fn fresh(&mut self, hint: &str) -> Variable {
        if self.lookup(hint).is_none() {
            return self.intern(hint);
        }
        let mut n = 0usize;
        loop {
            let cand = format!("{hint}{n}");
            if self.lookup(&cand).is_none() {
                return self.intern(&cand);
            }
            n += 1;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Variable> {
        self.vars.iter()
    }
}

/// One token of an argument list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Token {
    Sym(Symbol),
    Var(Variable),
}

impl Token {
    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            Token::Var(v) => Some(v),
            Token::Sym(_) => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Sym(s) => write!(f, "{s}"),
            Token::Var(v) => write!(f, "{v}"),
        }
    }
}

/// An argument list: a finite, possibly empty string of symbols and
/// variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct ListExpr(pub Vec<Token>);

impl ListExpr {
    pub fn empty() -> Self {
        ListExpr(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.0.iter().all(|t| matches!(t, Token::Sym(_)))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.0.iter().filter_map(Token::as_var)
    }
}

impl fmt::Display for ListExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(l")?;
        for t in &self.0 {
            write!(f, " {t}")?;
        }
        f.write_str(")")
    }
}

/// A prime formula: an equation between lists or a predicate application.
/// A predicate name may occur with several arities in one system; each
/// `(name, arity)` pair is a distinct predicate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PrimeFormula {
    Eq(ListExpr, ListExpr),
    Pred { name: Symbol, args: Vec<ListExpr> },
}

impl PrimeFormula {
    pub fn pred(name: &str, args: Vec<ListExpr>) -> Self {
        PrimeFormula::Pred { name: Symbol::new(name), args }
    }

    pub fn args(&self) -> Vec<&ListExpr> {
        match self {
            PrimeFormula::Eq(a, b) => vec![a, b],
            PrimeFormula::Pred { args, .. } => args.iter().collect(),
        }
    }

    pub fn map_args(&self, mut f: impl FnMut(&ListExpr) -> ListExpr) -> PrimeFormula {
        match self {
            PrimeFormula::Eq(a, b) => PrimeFormula::Eq(f(a), f(b)),
            PrimeFormula::Pred { name, args } => PrimeFormula::Pred {
                name: name.clone(),
                args: args.iter().map(f).collect(),
            },
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args().iter().all(|l| l.is_ground())
    }

    /// Total token count over all argument lists.
    pub fn size(&self) -> usize {
        self.args().iter().map(|l| l.len()).sum()
    }

    /// Longest argument list.
    pub fn max_arg_len(&self) -> usize {
        self.args().iter().map(|l| l.len()).max().unwrap_or(0)
    }

    /// The `(name, arity)` pair for predicate applications.
    pub fn pred_key(&self) -> Option<(Symbol, usize)> {
        match self {
            PrimeFormula::Eq(..) => None,
            PrimeFormula::Pred { name, args } => Some((name.clone(), args.len())),
        }
    }
}

impl fmt::Display for PrimeFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeFormula::Eq(a, b) => write!(f, "(eq {a} {b})"),
            PrimeFormula::Pred { name, args } => {
                write!(f, "(pred {name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A formula of a mathematical system, in prefix form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Prime(PrimeFormula),
    Not(Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Forall(Variable, Box<Formula>),
    Exists(Variable, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn forall(v: Variable, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }
    pub fn exists(v: Variable, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    /// Visits every argument list in the formula.
    pub fn visit_lists<'a>(&'a self, f: &mut impl FnMut(&'a ListExpr)) {
        match self {
            Formula::Prime(p) => {
                for l in p.args() {
                    f(l);
                }
            }
            Formula::Not(a) => a.visit_lists(f),
            Formula::Imp(a, b) | Formula::Iff(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit_lists(f);
                b.visit_lists(f);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit_lists(f),
        }
    }

    /// Every `(name, arity)` pair of predicate applications occurring in
    /// the formula.
    pub fn pred_keys(&self) -> BTreeSet<(Symbol, usize)> {
        let mut out = BTreeSet::new();
        self.collect_pred_keys(&mut out);
        out
    }

    fn collect_pred_keys(&self, out: &mut BTreeSet<(Symbol, usize)>) {
        match self {
            Formula::Prime(p) => {
                if let Some(k) = p.pred_key() {
                    out.insert(k);
                }
            }
            Formula::Not(a) => a.collect_pred_keys(out),
            Formula::Imp(a, b) | Formula::Iff(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_pred_keys(out);
                b.collect_pred_keys(out);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.collect_pred_keys(out),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Prime(p) => write!(f, "{p}"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::Imp(a, b) => write!(f, "(imp {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(iff {a} {b})"),
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula::Forall(v, a) => write!(f, "(all {v} {a})"),
            Formula::Exists(v, a) => write!(f, "(ex {v} {a})"),
        }
    }
}

/// A quantifier-free positive Horn formula: prime premises and a prime
/// conclusion.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RFormula {
    pub premises: Vec<PrimeFormula>,
    pub conclusion: PrimeFormula,
}

impl RFormula {
    pub fn new(premises: Vec<PrimeFormula>, conclusion: PrimeFormula) -> Self {
        RFormula { premises, conclusion }
    }

    pub fn fact(conclusion: PrimeFormula) -> Self {
        RFormula { premises: Vec::new(), conclusion }
    }

    pub fn primes(&self) -> impl Iterator<Item = &PrimeFormula> {
        self.premises.iter().chain(std::iter::once(&self.conclusion))
    }
}

impl fmt::Display for RFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(horn (")?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ") {})", self.conclusion)
    }
}

/// The right-nested implication chain denoted by a Horn formula; zero
/// premises give the bare conclusion.
pub fn rform_to_formula(r: &RFormula) -> Formula {
    let mut out = Formula::Prime(r.conclusion.clone());
    for p in r.premises.iter().rev() {
        out = Formula::imp(Formula::Prime(p.clone()), out);
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected end of input")]
    UnexpectedEof,
    #[error("expected `{expected}`, found `{found}`")]
    Expected { expected: String, found: String },
    #[error("unknown form `{0}`")]
    UnknownForm(String),
    #[error("unbalanced parentheses in list")]
    UnbalancedList,
    #[error("trailing input after form: `{0}`")]
    TrailingInput(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("`{0}` is not a variable token")]
    NotAVariable(String),
}

/// Splits input into tokens; `(` and `)` are self-delimiting, everything
/// else is whitespace-separated.
pub fn lex(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' || c == ')' {
            out.push(&text[i..i + 1]);
            i += 1;
        } else if c == ';' {
            while i < bytes.len() && bytes[i] as char != '\n' {
                i += 1;
            }
        } else {
            let start = i;
            while i < bytes.len() {
                let d = bytes[i] as char;
                if d.is_whitespace() || d == '(' || d == ')' || d == ';' {
                    break;
                }
                i += 1;
            }
            out.push(&text[start..i]);
        }
    }
    out
}

/// Token-stream parser for the wire format. Symbol validation against an
/// alphabet is optional; when present, bare tokens inside lists must be
/// declared (parentheses and variables are always admitted).
pub struct Parser<'a, 't> {
    toks: &'t [&'t str],
    pos: usize,
    pool: &'a mut VarPool,
    alphabet: Option<&'a BTreeSet<Symbol>>,
}

impl<'a, 't> Parser<'a, 't> {
    pub fn new(toks: &'t [&'t str], pool: &'a mut VarPool) -> Self {
        Parser { toks, pos: 0, pool, alphabet: None }
    }

    pub fn with_alphabet(mut self, alphabet: &'a BTreeSet<Symbol>) -> Self {
        self.alphabet = Some(alphabet);
        self
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn peek(&self) -> Option<&'t str> {
        self.toks.get(self.pos).copied()
    }

    pub fn next_tok(&mut self) -> Result<&'t str, ParseError> {
        let t = self.toks.get(self.pos).copied().ok_or(ParseError::UnexpectedEof)?;
        self.pos += 1;
        Ok(t)
    }

    pub fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        let t = self.next_tok()?;
        if t == tok {
            Ok(())
        } else {
            Err(ParseError::Expected { expected: tok.into(), found: t.into() })
        }
    }

    pub fn expect_var(&mut self) -> Result<Variable, ParseError> {
        let t = self.next_tok()?;
        match t.strip_prefix('?') {
            Some(name) if !name.is_empty() => Ok(self.pool.intern(name)),
            _ => Err(ParseError::NotAVariable(t.into())),
        }
    }

    fn list_token(&mut self, t: &str) -> Result<Token, ParseError> {
        if let Some(name) = t.strip_prefix('?') {
            if !name.is_empty() {
                return Ok(Token::Var(self.pool.intern(name)));
            }
        }
        if t != "(" && t != ")" {
            if let Some(alpha) = self.alphabet {
                if !alpha.contains(&Symbol::new(t)) {
                    return Err(ParseError::UndeclaredSymbol(t.into()));
                }
            }
        }
        Ok(Token::Sym(Symbol::new(t)))
    }

    /// Parses `(l tok*)`; interior parentheses are positional list tokens
    /// and must be balanced.
    pub fn parse_list(&mut self) -> Result<ListExpr, ParseError> {
        self.expect("(")?;
        self.expect("l")?;
        let mut toks = Vec::new();
        let mut depth = 0usize;
        loop {
            let t = self.next_tok()?;
            match t {
                "(" => {
                    depth += 1;
                    toks.push(self.list_token(t)?);
                }
                ")" => {
                    if depth == 0 {
                        break;
                    }
                    depth -= 1;
                    toks.push(self.list_token(t)?);
                }
                _ => toks.push(self.list_token(t)?),
            }
        }
        if depth != 0 {
            return Err(ParseError::UnbalancedList);
        }
        Ok(ListExpr(toks))
    }

    pub fn parse_prime(&mut self) -> Result<PrimeFormula, ParseError> {
        self.expect("(")?;
        let head = self.next_tok()?;
        match head {
            "eq" => {
                let a = self.parse_list()?;
                let b = self.parse_list()?;
                self.expect(")")?;
                Ok(PrimeFormula::Eq(a, b))
            }
            "pred" => {
                let name = self.next_tok()?;
                let mut args = Vec::new();
                while self.peek() != Some(")") {
                    args.push(self.parse_list()?);
                }
                self.expect(")")?;
                Ok(PrimeFormula::Pred { name: Symbol::new(name), args })
            }
            other => Err(ParseError::UnknownForm(other.into())),
        }
    }

    pub fn parse_formula(&mut self) -> Result<Formula, ParseError> {
        self.expect("(")?;
        let head = self.next_tok()?;
        match head {
            "eq" | "pred" => {
                // Re-parse the prime from the head we already consumed.
                self.pos -= 2;
                Ok(Formula::Prime(self.parse_prime()?))
            }
            "not" => {
                let a = self.parse_formula()?;
                self.expect(")")?;
                Ok(Formula::not(a))
            }
            "imp" | "iff" | "and" | "or" => {
                let a = self.parse_formula()?;
                let b = self.parse_formula()?;
                self.expect(")")?;
                Ok(match head {
                    "imp" => Formula::imp(a, b),
                    "iff" => Formula::iff(a, b),
                    "and" => Formula::and(a, b),
                    _ => Formula::or(a, b),
                })
            }
            "all" | "ex" => {
                let v = self.expect_var()?;
                let a = self.parse_formula()?;
                self.expect(")")?;
                Ok(if head == "all" { Formula::forall(v, a) } else { Formula::exists(v, a) })
            }
            other => Err(ParseError::UnknownForm(other.into())),
        }
    }

    pub fn parse_rformula(&mut self) -> Result<RFormula, ParseError> {
        self.expect("(")?;
        self.expect("horn")?;
        self.expect("(")?;
        let mut premises = Vec::new();
        while self.peek() != Some(")") {
            premises.push(self.parse_prime()?);
        }
        self.expect(")")?;
        let conclusion = self.parse_prime()?;
        self.expect(")")?;
        Ok(RFormula { premises, conclusion })
    }
}

/// Parses a complete `(l ...)` form; the whole input must be consumed.
pub fn parse_list(text: &str, pool: &mut VarPool) -> Result<ListExpr, ParseError> {
    let toks = lex(text);
    let mut p = Parser::new(&toks, pool);
    let l = p.parse_list()?;
    if !p.at_end() {
        return Err(ParseError::TrailingInput(p.peek().unwrap_or("").into()));
    }
    Ok(l)
}

/// Parses a complete formula; the whole input must be consumed.
pub fn parse_formula(text: &str, pool: &mut VarPool) -> Result<Formula, ParseError> {
    let toks = lex(text);
    let mut p = Parser::new(&toks, pool);
    let f = p.parse_formula()?;
    if !p.at_end() {
        return Err(ParseError::TrailingInput(p.peek().unwrap_or("").into()));
    }
    Ok(f)
}

/// Parses a complete `(horn ...)` form; the whole input must be consumed.
pub fn parse_rformula(text: &str, pool: &mut VarPool) -> Result<RFormula, ParseError> {
    let toks = lex(text);
    let mut p = Parser::new(&toks, pool);
    let r = p.parse_rformula()?;
    if !p.at_end() {
        return Err(ParseError::TrailingInput(p.peek().unwrap_or("").into()));
    }
    Ok(r)
}

/// Canonical single-spaced text; inverse of [`parse_formula`].
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

pub fn print_list(l: &ListExpr) -> String {
    l.to_string()
}

pub fn print_rformula(r: &RFormula) -> String {
    r.to_string()
}
