//! Restricted argument-list languages. A language is given by a grammar
//! with a single nonterminal `S`; each alternative is a sequence over the
//! alphabet symbols, the parentheses, `S` itself, and the terminal `VAR`
//! that matches any single variable token. `VAR` occurring as a direct
//! single-token alternative makes the language contain all variables and
//! keeps it closed under substitution.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::binding::subst_list;
use crate::syntax::{ListExpr, Symbol, Token, Variable};

/// One item of a grammar alternative.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum GItem {
    /// A terminal symbol (parentheses included).
    Sym(Symbol),
    /// Recursive reference to the nonterminal.
    SRef,
    /// Matches any single variable token.
    VarSlot,
}

impl fmt::Display for GItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GItem::Sym(s) => write!(f, "{s}"),
            GItem::SRef => f.write_str("S"),
            GItem::VarSlot => f.write_str("VAR"),
        }
    }
}

/// Grammar of a restricted argument-list language.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LGrammar {
    pub alternatives: Vec<Vec<GItem>>,
}

/// A violation found by [`LGrammar::validate_closure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureViolation {
    /// `VAR` is not a direct single-token alternative, so bare variables
    /// are not members.
    NoDirectVarAlternative,
    /// A sampled substitution left the language.
    SubstitutionEscapes { lam: ListExpr, var: Variable, mu: ListExpr },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LangError {
    #[error("constant `{0}` clashes with an existing alternative")]
    ConstantClash(String),
}

impl LGrammar {
    pub fn new(alternatives: Vec<Vec<GItem>>) -> Self {
        LGrammar { alternatives }
    }

    /// True iff `lam` is derivable from `S`, with every variable token
    /// matching `VAR`.
    pub fn member(&self, lam: &ListExpr) -> bool {
        if lam.is_empty() {
            return self.alternatives.iter().any(|a| a.is_empty());
        }
        let toks = lam.tokens();
        let n = toks.len();
        // derives[i][j]: S derives toks[i..j]. Computed by increasing span
        // length, iterated to a fixpoint so unit alternatives like `S` are
        // handled too.
        let mut derives = vec![vec![false; n + 1]; n + 1];
        for len in 1..=n {
            let mut changed = true;
            while changed {
                changed = false;
                for i in 0..=n - len {
                    let j = i + len;
                    if derives[i][j] {
                        continue;
                    }
                    if self
                        .alternatives
                        .iter()
                        .any(|alt| Self::seq_matches(alt, toks, i, j, &derives))
                    {
                        derives[i][j] = true;
                        changed = true;
                    }
                }
            }
        }
        derives[0][n]
    }

    fn seq_matches(
        alt: &[GItem],
        toks: &[Token],
        i: usize,
        j: usize,
        derives: &[Vec<bool>],
    ) -> bool {
        // match alt[k..] against toks[pos..j]
        fn go(alt: &[GItem], k: usize, toks: &[Token], pos: usize, j: usize, derives: &[Vec<bool>]) -> bool {
            if k == alt.len() {
                return pos == j;
            }
            match &alt[k] {
                GItem::Sym(s) => {
                    pos < j
                        && matches!(&toks[pos], Token::Sym(t) if t == s)
                        && go(alt, k + 1, toks, pos + 1, j, derives)
                }
                GItem::VarSlot => {
                    pos < j
                        && matches!(&toks[pos], Token::Var(_))
                        && go(alt, k + 1, toks, pos + 1, j, derives)
                }
                GItem::SRef => {
                    // Try every split; spans are shorter than j - i unless
                    // this is the only item, which the fixpoint loop covers.
                    for end in pos + 1..=j {
                        if derives[pos][end] && go(alt, k + 1, toks, end, j, derives) {
                            return true;
                        }
                    }
                    false
                }
            }
        }
        go(alt, 0, toks, i, j, derives)
    }

    /// Ground members grouped by exact length, computed level by level up
    /// to `max_len`. Enumeration stops once the total would exceed `cap`;
    /// the second component reports that truncation. Levels are complete:
    /// a truncated result contains every member up to the last finished
    /// length.
    pub fn ground_by_length(&self, max_len: usize, cap: usize) -> (Vec<Vec<ListExpr>>, bool) {
        let mut levels: Vec<Vec<ListExpr>> = vec![Vec::new()]; // index 0 unused unless ε
        if self.alternatives.iter().any(|a| a.is_empty()) {
            levels[0].push(ListExpr::empty());
        }
        let mut total = levels[0].len();
        for n in 1..=max_len {
            let mut level: BTreeSet<ListExpr> = BTreeSet::new();
            for alt in &self.alternatives {
                if alt.iter().any(|i| matches!(i, GItem::VarSlot)) {
                    continue;
                }
                // An alternative consisting of the bare nonterminal adds
                // no new strings.
                if alt.len() == 1 && matches!(alt[0], GItem::SRef) {
                    continue;
                }
                Self::expand_alt(alt, n, &levels, &mut Vec::new(), &mut level);
            }
            total += level.len();
            if total > cap {
                return (levels, true);
            }
            levels.push(level.into_iter().collect());
        }
        (levels, false)
    }

    /// Appends to `out` every expansion of `alt` with exactly `n` tokens,
    /// drawing nonterminal segments from the finished `levels`.
    fn expand_alt(
        alt: &[GItem],
        n: usize,
        levels: &[Vec<ListExpr>],
        prefix: &mut Vec<Token>,
        out: &mut BTreeSet<ListExpr>,
    ) {
        let remaining: usize = n.saturating_sub(prefix.len());
        match alt.split_first() {
            None => {
                if prefix.len() == n {
                    out.insert(ListExpr(prefix.clone()));
                }
            }
            Some((GItem::Sym(s), rest)) => {
                if remaining >= 1 {
                    prefix.push(Token::Sym(s.clone()));
                    Self::expand_alt(rest, n, levels, prefix, out);
                    prefix.pop();
                }
            }
            Some((GItem::SRef, rest)) => {
                let min_rest: usize = rest
                    .iter()
                    .map(|i| match i {
                        GItem::Sym(_) => 1,
                        GItem::SRef => 1,
                        GItem::VarSlot => 1,
                    })
                    .sum();
                let max_seg = remaining.saturating_sub(min_rest);
                for seg_len in 1..=max_seg.min(levels.len().saturating_sub(1)) {
                    for sub in &levels[seg_len] {
                        let keep = prefix.len();
                        prefix.extend(sub.tokens().iter().cloned());
                        Self::expand_alt(rest, n, levels, prefix, out);
                        prefix.truncate(keep);
                    }
                }
            }
            Some((GItem::VarSlot, _)) => unreachable!("ground expansion of VAR"),
        }
    }

    /// All variable-free members of length ≤ `max_len`, ordered by length
    /// then lexicographically, without duplicates.
    pub fn enumerate_ground(&self, max_len: usize) -> Vec<ListExpr> {
        let (levels, _) = self.ground_by_length(max_len, usize::MAX);
        levels.into_iter().flatten().collect()
    }

    /// Adds each constant as a new single-token alternative. The constants
    /// must not already be single-token alternatives.
    pub fn extend_constants(&self, consts: &BTreeSet<Symbol>) -> Result<LGrammar, LangError> {
        let mut alts = self.alternatives.clone();
        for c in consts {
            let alt = vec![GItem::Sym(c.clone())];
            if alts.contains(&alt) {
                return Err(LangError::ConstantClash(c.name().into()));
            }
            alts.push(alt);
        }
        Ok(LGrammar::new(alts))
    }

    /// Checks the structural `VAR` condition and additionally samples
    /// substitution triples `(lam, x, mu)` verifying that the language is
    /// closed under substitution. Violations are reported as data.
    pub fn validate_closure(&self, samples: usize, seed: u64) -> Vec<ClosureViolation> {
        let mut out = Vec::new();
        let has_var_alt = self
            .alternatives
            .iter()
            .any(|a| a.len() == 1 && matches!(a[0], GItem::VarSlot));
        if !has_var_alt {
            out.push(ClosureViolation::NoDirectVarAlternative);
        }
        let mut rng = SplitMix::new(seed);
        let vars: Vec<Variable> =
            (0..4).map(|i| Variable::new(&format!("v{i}"), i as u32)).collect();
        for _ in 0..samples {
            let lam = match self.sample_member(&mut rng, 8, &vars) {
                Some(l) => l,
                None => break,
            };
            let mu = match self.sample_member(&mut rng, 6, &vars) {
                Some(l) => l,
                None => break,
            };
            let x = vars[(rng.next() % vars.len() as u64) as usize].clone();
            let res = subst_list(&lam, &x, &mu);
            if !self.member(&res) {
                out.push(ClosureViolation::SubstitutionEscapes { lam, var: x, mu });
            }
        }
        out
    }

    /// Randomly expands the grammar into a member of length ≤ `max_len`;
    /// `VAR` slots draw from `vars`. Returns `None` when expansion keeps
    /// overshooting the budget.
    pub fn sample_member(
        &self,
        rng: &mut SplitMix,
        max_len: usize,
        vars: &[Variable],
    ) -> Option<ListExpr> {
        'retry: for _ in 0..64 {
            let mut toks = Vec::new();
            let mut stack = vec![GItem::SRef];
            let mut fuel = 64usize;
            while let Some(item) = stack.pop() {
                if toks.len() > max_len || fuel == 0 {
                    continue 'retry;
                }
                fuel -= 1;
                match item {
                    GItem::Sym(s) => toks.push(Token::Sym(s)),
                    GItem::VarSlot => {
                        let v = &vars[(rng.next() % vars.len() as u64) as usize];
                        toks.push(Token::Var(v.clone()));
                    }
                    GItem::SRef => {
                        let alt =
                            &self.alternatives[(rng.next() % self.alternatives.len() as u64) as usize];
                        for it in alt.iter().rev() {
                            stack.push(it.clone());
                        }
                    }
                }
            }
            if toks.len() <= max_len && !toks.is_empty() {
                return Some(ListExpr(toks));
            }
        }
        None
    }
}

// Small deterministic generator so closure sampling does not pull a rand
// dependency into the library.
pub struct SplitMix(u64);

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
}
