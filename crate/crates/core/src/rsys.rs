//! Recursive systems: the R-axiom store, checking of R-derivations under
//! the three R-rules (axiom introduction, Modus Ponens on a prime minor
//! premise, single-variable substitution restricted to the argument
//! language), and bounded forward-chaining saturation of ground prime
//! facts.
//!
//! Saturation works per argument list: an axiom instance is admissible
//! when every argument list of every prime in it has at most `size_bound`
//! tokens and lies in the language. Equality reasoning is built in through
//! three rule families — reflexivity, single-occurrence replacement and
//! predicate congruence — mirroring the equality R-axiom schemas.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::langset::LGrammar;
use crate::syntax::{ListExpr, PrimeFormula, RFormula, Symbol, Token, Variable};

/// Recursive system: alphabet, `(name, arity)` predicate set and basis
/// R-axioms.
#[derive(Clone, Debug)]
pub struct RecursiveSystem {
    pub alphabet: BTreeSet<Symbol>,
    pub predicates: BTreeSet<(Symbol, usize)>,
    pub basis: Vec<RFormula>,
}

impl RecursiveSystem {
    pub fn new(
        alphabet: BTreeSet<Symbol>,
        predicates: BTreeSet<(Symbol, usize)>,
        basis: Vec<RFormula>,
    ) -> Self {
        RecursiveSystem { alphabet, predicates, basis }
    }

    /// Symbols usable in lists: the alphabet plus the auxiliary parens.
    pub fn symbol_ok(&self, s: &Symbol) -> bool {
        s.is_paren() || self.alphabet.contains(s)
    }

    /// All variables occurring in the basis axioms.
    pub fn basis_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for rf in &self.basis {
            for p in rf.primes() {
                for l in p.args() {
                    out.extend(l.variables().cloned());
                }
            }
        }
        out
    }

    /// True when any basis axiom mentions an equation, which is what makes
    /// equality saturation able to produce anything beyond reflexivity.
    pub fn uses_equations(&self) -> bool {
        self.basis.iter().any(|rf| rf.primes().any(|p| matches!(p, PrimeFormula::Eq(..))))
    }
}

/// All single-occurrence replacements of the contiguous token sequence
/// `s` by `t` within `lam`.
pub fn replace_occurrences(lam: &ListExpr, s: &ListExpr, t: &ListExpr) -> Vec<ListExpr> {
    let n = lam.len();
    let k = s.len();
    let mut out = Vec::new();
    if k == 0 {
        // Degenerate empty occurrence: insert `t` at each boundary.
        for pos in 0..=n {
            let mut toks = lam.tokens()[..pos].to_vec();
            toks.extend(t.tokens().iter().cloned());
            toks.extend(lam.tokens()[pos..].iter().cloned());
            out.push(ListExpr(toks));
        }
        return out;
    }
    if k > n {
        return out;
    }
    for pos in 0..=n - k {
        if &lam.tokens()[pos..pos + k] == s.tokens() {
            let mut toks = lam.tokens()[..pos].to_vec();
            toks.extend(t.tokens().iter().cloned());
            toks.extend(lam.tokens()[pos + k..].iter().cloned());
            out.push(ListExpr(toks));
        }
    }
    out
}

/// All equations obtainable from `e` by replacing one contiguous
/// occurrence of `s` by `t` in either side.
pub fn equation_replacements(
    e: (&ListExpr, &ListExpr),
    s: &ListExpr,
    t: &ListExpr,
) -> Vec<(ListExpr, ListExpr)> {
    let mut out = Vec::new();
    for l in replace_occurrences(e.0, s, t) {
        out.push((l, e.1.clone()));
    }
    for r in replace_occurrences(e.1, s, t) {
        out.push((e.0.clone(), r));
    }
    out
}

/// Recognizes the three equality R-axiom schemas in Horn form:
///
/// * reflexivity — no premises, conclusion `∼λ,λ`;
/// * replacement — premises `[E; ∼s,t]` with all three primes equations
///   and the conclusion obtained from `E` by replacing one contiguous
///   occurrence of `s` by `t`;
/// * predicate congruence — premises `[∼μ₁,μ₁′; …; ∼μₙ,μₙ′; p μ₁…μₙ]`
///   and conclusion `p μ₁′…μₙ′` with `n ≥ 1`.
pub fn is_eq_raxiom(r: &RFormula) -> bool {
    match r.premises.len() {
        0 => match &r.conclusion {
            PrimeFormula::Eq(a, b) => a == b,
            PrimeFormula::Pred { .. } => false,
        },
        2 => is_replacement_instance(&r.premises[0], &r.premises[1], &r.conclusion)
            || is_congruence_instance(&r.premises, &r.conclusion),
        _ => is_congruence_instance(&r.premises, &r.conclusion),
    }
}

fn is_replacement_instance(e: &PrimeFormula, q: &PrimeFormula, e2: &PrimeFormula) -> bool {
    let (PrimeFormula::Eq(a, b), PrimeFormula::Eq(s, t), PrimeFormula::Eq(a2, b2)) = (e, q, e2)
    else {
        return false;
    };
    equation_replacements((a, b), s, t)
        .into_iter()
        .any(|(x, y)| &x == a2 && &y == b2)
}

fn is_congruence_instance(premises: &[PrimeFormula], conclusion: &PrimeFormula) -> bool {
    let n = premises.len().wrapping_sub(1);
    if premises.len() < 2 {
        return false;
    }
    let PrimeFormula::Pred { name: pn, args: pargs } = &premises[n] else {
        return false;
    };
    let PrimeFormula::Pred { name: cn, args: cargs } = conclusion else {
        return false;
    };
    if pn != cn || pargs.len() != n || cargs.len() != n {
        return false;
    }
    for i in 0..n {
        let PrimeFormula::Eq(l, r) = &premises[i] else {
            return false;
        };
        if l != &pargs[i] || r != &cargs[i] {
            return false;
        }
    }
    true
}

/// Justification of one R-derivation step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RJustification {
    /// Basis axiom by 0-based index.
    Basis(usize),
    /// Equality R-axiom (any of the three schemas).
    Equality,
    /// Modus Ponens: minor premise step, major premise step (0-based).
    Mp(usize, usize),
    /// Substitution of `list` for `var` in an earlier step.
    Subst(usize, Variable, ListExpr),
}

#[derive(Clone, Debug)]
pub struct RDerivation {
    pub steps: Vec<(RFormula, RJustification)>,
}

#[derive(Clone, Debug)]
pub struct RCheckReport {
    pub accepted: bool,
    pub first_failure: Option<(usize, String)>,
    pub steps: usize,
}

impl RCheckReport {
    fn ok(steps: usize) -> Self {
        RCheckReport { accepted: true, first_failure: None, steps }
    }

    fn fail(step: usize, reason: String, steps: usize) -> Self {
        RCheckReport { accepted: false, first_failure: Some((step, reason)), steps }
    }
}

impl fmt::Display for RCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_failure {
            None => write!(f, "accepted ({} steps)", self.steps),
            Some((i, why)) => write!(f, "rejected at step {}: {}", i + 1, why),
        }
    }
}

fn subst_rformula(r: &RFormula, x: &Variable, lam: &ListExpr) -> RFormula {
    RFormula {
        premises: r
            .premises
            .iter()
            .map(|p| p.map_args(|l| crate::binding::subst_list(l, x, lam)))
            .collect(),
        conclusion: r.conclusion.map_args(|l| crate::binding::subst_list(l, x, lam)),
    }
}

/// Verifies an R-derivation step by step; failures are reported, not
/// raised.
pub fn check_rderivation(
    sys: &RecursiveSystem,
    lang: &LGrammar,
    deriv: &RDerivation,
) -> RCheckReport {
    for (k, (rf, just)) in deriv.steps.iter().enumerate() {
        for p in rf.primes() {
            for l in p.args() {
                if !lang.member(l) {
                    return RCheckReport::fail(
                        k,
                        format!("argument list {l} is outside the language"),
                        deriv.steps.len(),
                    );
                }
            }
        }
        let ok = match just {
            RJustification::Basis(i) => {
                if *i >= sys.basis.len() {
                    return RCheckReport::fail(
                        k,
                        format!("basis axiom {} does not exist", i + 1),
                        deriv.steps.len(),
                    );
                }
                if &sys.basis[*i] == rf {
                    Ok(())
                } else {
                    Err(format!("step is not basis axiom {}", i + 1))
                }
            }
            RJustification::Equality => {
                if is_eq_raxiom(rf) {
                    Ok(())
                } else {
                    Err("step matches no equality R-axiom schema".into())
                }
            }
            RJustification::Mp(i, j) => check_rmp(deriv, *i, *j, k, rf),
            RJustification::Subst(i, x, lam) => {
                if *i >= k {
                    Err(format!("substitution refers to later step {}", i + 1))
                } else if !lang.member(lam) {
                    Err(format!("substituted list {lam} is outside the language"))
                } else if &subst_rformula(&deriv.steps[*i].0, x, lam) == rf {
                    Ok(())
                } else {
                    Err(format!("step is not step {} with {x} := {lam}", i + 1))
                }
            }
        };
        if let Err(why) = ok {
            return RCheckReport::fail(k, why, deriv.steps.len());
        }
    }
    RCheckReport::ok(deriv.steps.len())
}

fn check_rmp(
    deriv: &RDerivation,
    i: usize,
    j: usize,
    k: usize,
    rf: &RFormula,
) -> Result<(), String> {
    if i >= k || j >= k {
        return Err("modus ponens refers to a later step".into());
    }
    let minor = &deriv.steps[i].0;
    let major = &deriv.steps[j].0;
    if !minor.premises.is_empty() {
        return Err(format!("minor premise (step {}) is not prime", i + 1));
    }
    if major.premises.is_empty() {
        return Err(format!("major premise (step {}) has no premise to detach", j + 1));
    }
    if major.premises[0] != minor.conclusion {
        return Err(format!(
            "minor premise (step {}) does not match the first premise of step {}",
            i + 1,
            j + 1
        ));
    }
    let expected = RFormula {
        premises: major.premises[1..].to_vec(),
        conclusion: major.conclusion.clone(),
    };
    if &expected == rf {
        Ok(())
    } else {
        Err("step is not the detached major premise".into())
    }
}

/// Three-valued verdict for bounded derivability queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

/// How a saturated fact was obtained; enough to rebuild an R-derivation.
#[derive(Clone, Debug)]
enum Provenance {
    /// Instance of a basis axiom under `bindings`, premises matched to
    /// earlier facts.
    Basis { axiom: usize, bindings: Vec<(Variable, ListExpr)>, premises: Vec<usize> },
    /// Materialized reflexivity `∼λ,λ`.
    Refl,
    /// `∼t,s` from the equation fact `eq = ∼s,t`.
    Sym { eq: usize },
    /// Replacement inside equation fact `src` directed by equation `eq`.
    Repl { src: usize, eq: usize },
    /// Context lift: `∼λ,λ′` from the inline reflexivity `∼λ,λ` (the
    /// fact's own left side) rewritten by equation `eq`.
    CtxRepl { eq: usize },
    /// One-position congruence on predicate fact `pred` at `pos`,
    /// directed by equation `eq`.
    Cong { pred: usize, pos: usize, eq: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum HeadKey {
    Eq,
    Pred(u32, usize),
}

/// Ground prime facts saturated up to a size bound, with provenance.
pub struct FactSet {
    facts: Vec<(PrimeFormula, Provenance)>,
    index: HashMap<PrimeFormula, usize>,
    pub size_bound: usize,
    /// Fixpoint reached with nothing truncated: absence within the bound
    /// is meaningful (given a certificate).
    pub complete: bool,
    pub budget_exhausted: bool,
}

impl FactSet {
    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn contains(&self, p: &PrimeFormula) -> bool {
        self.index.contains_key(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PrimeFormula> {
        self.facts.iter().map(|(p, _)| p)
    }

    /// Facts in canonical sorted text order.
    pub fn sorted_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.iter().map(|p| p.to_string()).collect();
        lines.sort();
        lines
    }

    /// Rebuilds an R-derivation of a contained fact. The derivation uses
    /// only basis axioms, equality R-axioms, Modus Ponens and
    /// substitution, and passes [`check_rderivation`].
    pub fn reconstruct(&self, sys: &RecursiveSystem, p: &PrimeFormula) -> Option<RDerivation> {
        let root = *self.index.get(p)?;
        let mut steps: Vec<(RFormula, RJustification)> = Vec::new();
        let mut done: HashMap<usize, usize> = HashMap::new();
        self.emit(sys, root, &mut steps, &mut done);
        Some(RDerivation { steps })
    }

    fn emit(
        &self,
        sys: &RecursiveSystem,
        fact: usize,
        steps: &mut Vec<(RFormula, RJustification)>,
        done: &mut HashMap<usize, usize>,
    ) -> usize {
        if let Some(&i) = done.get(&fact) {
            return i;
        }
        let (prime, prov) = &self.facts[fact];
        let idx = match prov {
            Provenance::Refl => {
                steps.push((RFormula::fact(prime.clone()), RJustification::Equality));
                steps.len() - 1
            }
            Provenance::Basis { axiom, bindings, premises } => {
                let premise_steps: Vec<usize> =
                    premises.iter().map(|&f| self.emit(sys, f, steps, done)).collect();
                let mut current = sys.basis[*axiom].clone();
                steps.push((current.clone(), RJustification::Basis(*axiom)));
                let mut cur_idx = steps.len() - 1;
                for (x, lam) in bindings {
                    current = subst_rformula(&current, x, lam);
                    steps.push((
                        current.clone(),
                        RJustification::Subst(cur_idx, x.clone(), lam.clone()),
                    ));
                    cur_idx = steps.len() - 1;
                }
                for ps in premise_steps {
                    current = RFormula {
                        premises: current.premises[1..].to_vec(),
                        conclusion: current.conclusion.clone(),
                    };
                    steps.push((current.clone(), RJustification::Mp(ps, cur_idx)));
                    cur_idx = steps.len() - 1;
                }
                cur_idx
            }
            Provenance::Sym { eq } => {
                let eq_step = self.emit(sys, *eq, steps, done);
                let PrimeFormula::Eq(s, t) = &self.facts[*eq].0 else { unreachable!() };
                let refl = PrimeFormula::Eq(s.clone(), s.clone());
                steps.push((RFormula::fact(refl.clone()), RJustification::Equality));
                let refl_step = steps.len() - 1;
                let axiom = RFormula {
                    premises: vec![refl, self.facts[*eq].0.clone()],
                    conclusion: prime.clone(),
                };
                steps.push((axiom.clone(), RJustification::Equality));
                let ax_step = steps.len() - 1;
                let mid = RFormula {
                    premises: vec![PrimeFormula::Eq(s.clone(), t.clone())],
                    conclusion: prime.clone(),
                };
                steps.push((mid, RJustification::Mp(refl_step, ax_step)));
                let mid_step = steps.len() - 1;
                steps.push((RFormula::fact(prime.clone()), RJustification::Mp(eq_step, mid_step)));
                steps.len() - 1
            }
            Provenance::Repl { src, eq } => {
                let src_step = self.emit(sys, *src, steps, done);
                let eq_step = self.emit(sys, *eq, steps, done);
                let axiom = RFormula {
                    premises: vec![self.facts[*src].0.clone(), self.facts[*eq].0.clone()],
                    conclusion: prime.clone(),
                };
                steps.push((axiom, RJustification::Equality));
                let ax_step = steps.len() - 1;
                let mid = RFormula {
                    premises: vec![self.facts[*eq].0.clone()],
                    conclusion: prime.clone(),
                };
                steps.push((mid, RJustification::Mp(src_step, ax_step)));
                let mid_step = steps.len() - 1;
                steps.push((RFormula::fact(prime.clone()), RJustification::Mp(eq_step, mid_step)));
                steps.len() - 1
            }
            Provenance::CtxRepl { eq } => {
                let eq_step = self.emit(sys, *eq, steps, done);
                let PrimeFormula::Eq(lam, _) = prime else { unreachable!() };
                let refl = PrimeFormula::Eq(lam.clone(), lam.clone());
                steps.push((RFormula::fact(refl.clone()), RJustification::Equality));
                let refl_step = steps.len() - 1;
                let axiom = RFormula {
                    premises: vec![refl, self.facts[*eq].0.clone()],
                    conclusion: prime.clone(),
                };
                steps.push((axiom, RJustification::Equality));
                let ax_step = steps.len() - 1;
                let mid = RFormula {
                    premises: vec![self.facts[*eq].0.clone()],
                    conclusion: prime.clone(),
                };
                steps.push((mid, RJustification::Mp(refl_step, ax_step)));
                let mid_step = steps.len() - 1;
                steps.push((RFormula::fact(prime.clone()), RJustification::Mp(eq_step, mid_step)));
                steps.len() - 1
            }
            Provenance::Cong { pred, pos, eq } => {
                let pred_step = self.emit(sys, *pred, steps, done);
                let eq_step = self.emit(sys, *eq, steps, done);
                let PrimeFormula::Pred { name, args } = &self.facts[*pred].0 else {
                    unreachable!()
                };
                let PrimeFormula::Pred { args: new_args, .. } = prime else { unreachable!() };
                // Reflexivity steps for the unchanged positions.
                let mut eq_steps: Vec<usize> = Vec::new();
                let mut eq_premises: Vec<PrimeFormula> = Vec::new();
                for (i, a) in args.iter().enumerate() {
                    if i == *pos {
                        eq_steps.push(eq_step);
                        eq_premises
                            .push(PrimeFormula::Eq(a.clone(), new_args[i].clone()));
                    } else {
                        let refl = PrimeFormula::Eq(a.clone(), a.clone());
                        steps.push((RFormula::fact(refl.clone()), RJustification::Equality));
                        eq_steps.push(steps.len() - 1);
                        eq_premises.push(refl);
                    }
                }
                let mut premises = eq_premises.clone();
                premises.push(PrimeFormula::Pred { name: name.clone(), args: args.clone() });
                let mut current = RFormula { premises, conclusion: prime.clone() };
                steps.push((current.clone(), RJustification::Equality));
                let mut cur_idx = steps.len() - 1;
                for es in eq_steps.into_iter().chain(std::iter::once(pred_step)) {
                    current = RFormula {
                        premises: current.premises[1..].to_vec(),
                        conclusion: current.conclusion.clone(),
                    };
                    steps.push((current.clone(), RJustification::Mp(es, cur_idx)));
                    cur_idx = steps.len() - 1;
                }
                cur_idx
            }
        };
        done.insert(fact, idx);
        idx
    }
}

fn head_key(p: &PrimeFormula, names: &mut HashMap<Symbol, u32>) -> HeadKey {
    match p {
        PrimeFormula::Eq(..) => HeadKey::Eq,
        PrimeFormula::Pred { name, args } => {
            let next = names.len() as u32;
            let id = *names.entry(name.clone()).or_insert(next);
            HeadKey::Pred(id, args.len())
        }
    }
}

struct Saturator<'a> {
    lang: &'a LGrammar,
    bound: usize,
    budget: usize,
    facts: Vec<(PrimeFormula, Provenance)>,
    index: HashMap<PrimeFormula, usize>,
    by_head: HashMap<HeadKey, Vec<usize>>,
    eq_by_lhs: HashMap<ListExpr, Vec<usize>>,
    eq_by_rhs: HashMap<ListExpr, Vec<usize>>,
    pred_by_arg: HashMap<ListExpr, Vec<usize>>,
    refl_lists: Vec<(ListExpr, usize)>,
    /// Non-reflexive equation facts, in insertion order.
    eq_ids: Vec<usize>,
    /// Distinct argument lists of non-reflexive equation facts; the
    /// contexts that lifting rewrites inside.
    eq_args: Vec<ListExpr>,
    /// First fact id that introduced each context.
    eq_args_seen: HashMap<ListExpr, usize>,
    names: HashMap<Symbol, u32>,
    member_cache: HashMap<ListExpr, bool>,
    budget_exhausted: bool,
    truncated: bool,
}

impl<'a> Saturator<'a> {
    fn member(&mut self, l: &ListExpr) -> bool {
        if let Some(&b) = self.member_cache.get(l) {
            return b;
        }
        let b = self.lang.member(l);
        self.member_cache.insert(l.clone(), b);
        b
    }

    fn admissible_quick(&self, p: &PrimeFormula) -> bool {
        p.args().iter().all(|l| l.len() <= self.bound)
    }

    fn admissible(&mut self, p: &PrimeFormula) -> bool {
        self.admissible_quick(p) && {
            let args: Vec<ListExpr> = p.args().into_iter().cloned().collect();
            args.iter().all(|l| self.member(l))
        }
    }

    /// Inserts a fact; returns its id when new.
    fn add(&mut self, p: PrimeFormula, prov: Provenance) -> Option<usize> {
        if self.index.contains_key(&p) {
            return None;
        }
        if self.facts.len() >= self.budget {
            self.budget_exhausted = true;
            return None;
        }
        let id = self.facts.len();
        let key = head_key(&p, &mut self.names);
        self.by_head.entry(key).or_default().push(id);
        match &p {
            PrimeFormula::Eq(l, r) => {
                if l == r {
                    self.refl_lists.push((l.clone(), id));
                } else {
                    self.eq_by_lhs.entry(l.clone()).or_default().push(id);
                    self.eq_by_rhs.entry(r.clone()).or_default().push(id);
                    self.eq_ids.push(id);
                    for side in [l, r] {
                        if !self.eq_args_seen.contains_key(side) {
                            self.eq_args_seen.insert(side.clone(), id);
                            self.eq_args.push(side.clone());
                        }
                    }
                }
            }
            PrimeFormula::Pred { args, .. } => {
                for a in args {
                    self.pred_by_arg.entry(a.clone()).or_default().push(id);
                }
            }
        }
        self.index.insert(p.clone(), id);
        self.facts.push((p, prov));
        Some(id)
    }

    /// All substitutions matching `pat` (with variables) against the
    /// ground token string `ground`, extending `binds`.
    fn match_tokens(
        pat: &[Token],
        ground: &[Token],
        binds: &BTreeMap<Variable, ListExpr>,
        allow_empty: bool,
        out: &mut Vec<BTreeMap<Variable, ListExpr>>,
    ) {
        match pat.split_first() {
            None => {
                if ground.is_empty() {
                    out.push(binds.clone());
                }
            }
            Some((Token::Sym(s), rest)) => {
                if let Some((Token::Sym(g), grest)) = ground.split_first() {
                    if g == s {
                        Self::match_tokens(rest, grest, binds, allow_empty, out);
                    }
                }
            }
            Some((Token::Var(v), rest)) => {
                if let Some(bound) = binds.get(v) {
                    let k = bound.len();
                    if ground.len() >= k && &ground[..k] == bound.tokens() {
                        Self::match_tokens(rest, &ground[k..], binds, allow_empty, out);
                    }
                } else {
                    let lo = if allow_empty { 0 } else { 1 };
                    for k in lo..=ground.len() {
                        let mut b2 = binds.clone();
                        b2.insert(v.clone(), ListExpr(ground[..k].to_vec()));
                        Self::match_tokens(rest, &ground[k..], &b2, allow_empty, out);
                    }
                }
            }
        }
    }

    fn match_prime(
        &self,
        pat: &PrimeFormula,
        fact: &PrimeFormula,
        binds: &BTreeMap<Variable, ListExpr>,
        allow_empty: bool,
    ) -> Vec<BTreeMap<Variable, ListExpr>> {
        let mut out = Vec::new();
        match (pat, fact) {
            (PrimeFormula::Eq(pl, pr), PrimeFormula::Eq(fl, fr)) => {
                let mut mid = Vec::new();
                Self::match_tokens(pl.tokens(), fl.tokens(), binds, allow_empty, &mut mid);
                for b in mid {
                    Self::match_tokens(pr.tokens(), fr.tokens(), &b, allow_empty, &mut out);
                }
            }
            (
                PrimeFormula::Pred { name: pn, args: pa },
                PrimeFormula::Pred { name: fn_, args: fa },
            ) if pn == fn_ && pa.len() == fa.len() => {
                let mut states = vec![binds.clone()];
                for (p, f) in pa.iter().zip(fa.iter()) {
                    let mut next = Vec::new();
                    for b in &states {
                        Self::match_tokens(p.tokens(), f.tokens(), b, allow_empty, &mut next);
                    }
                    states = next;
                    if states.is_empty() {
                        break;
                    }
                }
                out = states;
            }
            _ => {}
        }
        out
    }
}

/// Bounded saturation: the fixpoint of ground prime facts derivable with
/// instances whose argument lists stay within `size_bound` tokens and the
/// language, with rule variables instantiated by ground language members.
/// `step_budget` caps the number of retained facts; exhaustion flags the
/// result as partial.
pub fn saturate(
    sys: &RecursiveSystem,
    lang: &LGrammar,
    size_bound: usize,
    step_budget: usize,
) -> FactSet {
    let mut sat = Saturator {
        lang,
        bound: size_bound,
        budget: step_budget,
        facts: Vec::new(),
        index: HashMap::new(),
        by_head: HashMap::new(),
        eq_by_lhs: HashMap::new(),
        eq_by_rhs: HashMap::new(),
        pred_by_arg: HashMap::new(),
        refl_lists: Vec::new(),
        eq_ids: Vec::new(),
        eq_args: Vec::new(),
        eq_args_seen: HashMap::new(),
        names: HashMap::new(),
        member_cache: HashMap::new(),
        budget_exhausted: false,
        truncated: false,
    };
    let allow_empty = lang.member(&ListExpr::empty());

    // Ground lists for conclusion-only variables and reflexivity sources.
    // Only needed when equality can produce non-trivial facts or some
    // axiom has a variable not covered by its premises.
    let needs_ground = sys.uses_equations()
        || sys.basis.iter().any(|rf| {
            let pvars: BTreeSet<&Variable> =
                rf.premises.iter().flat_map(|p| p.args()).flat_map(|l| l.variables()).collect();
            rf.conclusion.args().iter().any(|l| l.variables().any(|v| !pvars.contains(v)))
        });
    let ground: Vec<ListExpr> = if needs_ground {
        let cap = (step_budget / 4).max(1024);
        let (lists, truncated) = ground_up_to(lang, size_bound, cap);
        sat.truncated = truncated;
        lists
    } else {
        Vec::new()
    };

    // Reflexivity facts, materialized so they can seed replacement and
    // congruence. Skipped entirely when no axiom mentions equations, and
    // skipped (with the incompleteness flagged) when the enumeration was
    // truncated — context lifting over fact arguments covers rewriting
    // inside lists that actually occur.
    if sys.uses_equations() && !sat.truncated {
        for lam in &ground {
            if lam.len() <= size_bound {
                sat.add(PrimeFormula::Eq(lam.clone(), lam.clone()), Provenance::Refl);
            }
        }
    }

    let mut round_start = 0usize;
    loop {
        let round_end = sat.facts.len();
        // Basis axiom instances. In the first round only axioms without
        // premises can fire (there are no facts yet).
        for (ai, axiom) in sys.basis.iter().enumerate().collect::<Vec<_>>() {
            saturate_axiom(&mut sat, ai, axiom, round_start, round_end, &ground, allow_empty);
            if sat.budget_exhausted {
                break;
            }
        }
        // Equality reasoning runs to its own fixpoint before the next
        // axiom sweep, so equational chains are not starved by fast-
        // growing predicate joins. Earlier facts were already processed
        // as equality deltas in their own round.
        let mut eq_start = round_end;
        while !sat.budget_exhausted && sys.uses_equations() {
            let eq_end = sat.facts.len();
            if eq_start == eq_end {
                break;
            }
            saturate_equality(&mut sat, eq_start, eq_end);
            eq_start = eq_end;
        }
        if sat.facts.len() == round_end || sat.budget_exhausted {
            break;
        }
        round_start = round_end;
    }

    let complete = !sat.budget_exhausted && !sat.truncated;
    FactSet {
        facts: sat.facts,
        index: sat.index,
        size_bound,
        complete,
        budget_exhausted: sat.budget_exhausted,
    }
}

fn ground_up_to(lang: &LGrammar, max_len: usize, cap: usize) -> (Vec<ListExpr>, bool) {
    let (levels, truncated) = lang.ground_by_length(max_len, cap);
    (levels.into_iter().flatten().collect(), truncated)
}

fn saturate_axiom(
    sat: &mut Saturator,
    ai: usize,
    axiom: &RFormula,
    round_start: usize,
    round_end: usize,
    ground: &[ListExpr],
    allow_empty: bool,
) {
    let n = axiom.premises.len();
    if n == 0 {
        if round_start > 0 {
            return; // premise-free axioms fire once, in the first round
        }
        instantiate_free_vars(sat, ai, axiom, &BTreeMap::new(), &[], ground);
        return;
    }
    // Semi-naive join: one premise position takes a fact from the delta,
    // earlier positions take strictly older facts, later ones anything.
    for k in 0..n {
        let key = head_key(&axiom.premises[k], &mut sat.names);
        let delta: Vec<usize> = sat
            .by_head
            .get(&key)
            .map(|v| v.iter().copied().filter(|&id| id >= round_start && id < round_end).collect())
            .unwrap_or_default();
        for fid in delta {
            let binds0 = BTreeMap::new();
            let fact = sat.facts[fid].0.clone();
            let seeds = sat.match_prime(&axiom.premises[k], &fact, &binds0, allow_empty);
            for seed in seeds {
                extend_premises(
                    sat,
                    ai,
                    axiom,
                    k,
                    0,
                    seed,
                    vec![(k, fid)],
                    round_start,
                    round_end,
                    ground,
                    allow_empty,
                );
                if sat.budget_exhausted {
                    return;
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn extend_premises(
    sat: &mut Saturator,
    ai: usize,
    axiom: &RFormula,
    pivot: usize,
    mut pos: usize,
    binds: BTreeMap<Variable, ListExpr>,
    matched: Vec<(usize, usize)>,
    round_start: usize,
    round_end: usize,
    ground: &[ListExpr],
    allow_empty: bool,
) {
    while pos < axiom.premises.len() && pos == pivot {
        pos += 1;
    }
    if pos >= axiom.premises.len() {
        let mut premise_facts: Vec<(usize, usize)> = matched;
        premise_facts.sort();
        let premises: Vec<usize> = premise_facts.into_iter().map(|(_, f)| f).collect();
        instantiate_free_vars(sat, ai, axiom, &binds, &premises, ground);
        return;
    }
    let pat = &axiom.premises[pos];
    let limit = if pos < pivot { round_start } else { round_end };
    // Fully bound patterns become a single index lookup.
    if pat.args().iter().all(|l| l.variables().all(|v| binds.contains_key(v))) {
        let mut inst = pat.clone();
        for (x, lam) in &binds {
            inst = inst.map_args(|l| crate::binding::subst_list(l, x, lam));
        }
        if let Some(&fid) = sat.index.get(&inst) {
            if fid < limit {
                let mut m2 = matched;
                m2.push((pos, fid));
                extend_premises(
                    sat,
                    ai,
                    axiom,
                    pivot,
                    pos + 1,
                    binds,
                    m2,
                    round_start,
                    round_end,
                    ground,
                    allow_empty,
                );
            }
        }
        return;
    }
    let key = head_key(pat, &mut sat.names);
    let candidates: Vec<usize> = sat
        .by_head
        .get(&key)
        .map(|v| v.iter().copied().filter(|&id| id < limit).collect())
        .unwrap_or_default();
    for fid in candidates {
        let fact = sat.facts[fid].0.clone();
        let exts = sat.match_prime(&axiom.premises[pos], &fact, &binds, allow_empty);
        for ext in exts {
            let mut m2 = matched.clone();
            m2.push((pos, fid));
            extend_premises(
                sat,
                ai,
                axiom,
                pivot,
                pos + 1,
                ext,
                m2,
                round_start,
                round_end,
                ground,
                allow_empty,
            );
            if sat.budget_exhausted {
                return;
            }
        }
    }
}

fn instantiate_free_vars(
    sat: &mut Saturator,
    ai: usize,
    axiom: &RFormula,
    binds: &BTreeMap<Variable, ListExpr>,
    premises: &[usize],
    ground: &[ListExpr],
) {
    // Variables of the conclusion not bound by premise matching range
    // over the enumerated ground lists.
    let unbound: Vec<Variable> = {
        let mut seen = BTreeSet::new();
        axiom
            .conclusion
            .args()
            .iter()
            .flat_map(|l| l.variables())
            .filter(|v| !binds.contains_key(*v) && seen.insert((*v).clone()))
            .cloned()
            .collect()
    };
    let mut stack = vec![binds.clone()];
    for v in &unbound {
        let mut next = Vec::new();
        for b in &stack {
            for g in ground {
                let mut b2 = b.clone();
                b2.insert(v.clone(), g.clone());
                next.push(b2);
            }
        }
        stack = next;
    }
    for b in stack {
        // Every binding must itself be a language member; matched
        // segments are arbitrary sublists of facts.
        if !b.values().all(|l| {
            let l = l.clone();
            sat.member(&l)
        }) {
            continue;
        }
        let mut conclusion = axiom.conclusion.clone();
        for (x, lam) in &b {
            conclusion = conclusion.map_args(|l| crate::binding::subst_list(l, x, lam));
        }
        if !conclusion.is_ground() || !sat.admissible(&conclusion) {
            continue;
        }
        sat.add(
            conclusion,
            Provenance::Basis {
                axiom: ai,
                bindings: b.into_iter().collect(),
                premises: premises.to_vec(),
            },
        );
        if sat.budget_exhausted {
            return;
        }
    }
}

fn saturate_equality(sat: &mut Saturator, round_start: usize, round_end: usize) {
    // Every new non-reflexive equation ∼s,t is processed exactly once:
    //
    // * symmetry yields ∼t,s;
    // * transitivity chains through equations indexed by left side (the
    //   symmetric closure makes one chaining direction enough);
    // * context lifting rewrites each materialized reflexivity fact
    //   ∼λ,λ at every occurrence of s inside λ — together with
    //   transitivity this subsumes substring replacement inside
    //   arbitrary equations;
    // * congruence rewrites whole arguments of predicate facts.
    //
    // New predicate facts combine with the older equations they missed.
    let delta: Vec<usize> = (round_start..round_end).collect();
    for &id in &delta {
        let (p, _) = &sat.facts[id];
        match p.clone() {
            PrimeFormula::Eq(s, t) => {
                if s == t {
                    continue;
                }
                sat.add(PrimeFormula::Eq(t.clone(), s.clone()), Provenance::Sym { eq: id });
                if sat.budget_exhausted {
                    return;
                }
                // transitivity: ∼a,s (new: a=s side handled by index) —
                // chain the new equation after any ∼x,s and before any
                // ∼t,y via the lhs index on both directions.
                let after = sat.eq_by_lhs.get(&t).cloned().unwrap_or_default();
                for eid in after {
                    let PrimeFormula::Eq(_, u) = sat.facts[eid].0.clone() else { continue };
                    let cand = PrimeFormula::Eq(s.clone(), u);
                    if sat.admissible_quick(&cand) {
                        sat.add(cand, Provenance::Repl { src: id, eq: eid });
                    }
                    if sat.budget_exhausted {
                        return;
                    }
                }
                // context lifting over materialized reflexivity facts;
                // only the rewritten side needs a fresh membership check
                let refl = sat.refl_lists.clone();
                for (lam, rid) in refl {
                    if !contains_sublist(&lam, &s) {
                        continue;
                    }
                    for lam2 in replace_occurrences(&lam, &s, &t) {
                        if lam2.len() > sat.bound || !sat.member(&lam2) {
                            continue;
                        }
                        sat.add(
                            PrimeFormula::Eq(lam.clone(), lam2),
                            Provenance::Repl { src: rid, eq: id },
                        );
                        if sat.budget_exhausted {
                            return;
                        }
                    }
                }
                // context lifting over the argument lists of equation
                // facts: rewriting inside λ goes through the inline
                // reflexivity ∼λ,λ. Restricted to non-growing rewrites —
                // on partial saturations this keeps the frontier small,
                // and on complete ones the reflexivity pass already
                // covers the growing direction.
                if s.len() >= t.len() {
                    let contexts = sat.eq_args.clone();
                    for lam in contexts {
                        if lam == s || !contains_sublist(&lam, &s) {
                            continue;
                        }
                        ctx_lift(sat, &lam, id, (&s, &t));
                        if sat.budget_exhausted {
                            return;
                        }
                    }
                }
                // congruence on predicate facts holding s as an argument
                let targets = sat.pred_by_arg.get(&s).cloned().unwrap_or_default();
                for pid in targets {
                    apply_congruence(sat, pid, id, (&s, &t));
                    if sat.budget_exhausted {
                        return;
                    }
                }
                // sides first introduced by this fact are fresh contexts
                // for the older rewriting equations
                for lam in [s.clone(), t.clone()] {
                    if sat.eq_args_seen.get(&lam) != Some(&id) {
                        continue;
                    }
                    let rules = sat.eq_ids.clone();
                    for qid in rules {
                        if qid >= round_start {
                            continue; // newer rules handled the pair above
                        }
                        let PrimeFormula::Eq(qs, qt) = sat.facts[qid].0.clone() else {
                            continue;
                        };
                        if qs.len() < qt.len() || lam == qs || !contains_sublist(&lam, &qs) {
                            continue;
                        }
                        ctx_lift(sat, &lam, qid, (&qs, &qt));
                        if sat.budget_exhausted {
                            return;
                        }
                    }
                }
            }
            PrimeFormula::Pred { args, .. } => {
                for a in args.iter() {
                    let eqs = sat.eq_by_lhs.get(a).cloned().unwrap_or_default();
                    for eid in eqs {
                        if eid < round_start {
                            let PrimeFormula::Eq(s, t) = sat.facts[eid].0.clone() else {
                                continue;
                            };
                            apply_congruence(sat, id, eid, (&s, &t));
                            if sat.budget_exhausted {
                                return;
                            }
                        }
                    }
                }
            }
        }
    }
    // Transitivity where the new equation is the second link.
    for &id in &delta {
        let PrimeFormula::Eq(b, c) = sat.facts[id].0.clone() else { continue };
        if b == c {
            continue;
        }
        let firsts = sat.eq_by_rhs.get(&b).cloned().unwrap_or_default();
        for eid in firsts {
            if eid >= round_start {
                continue; // both-new pairs were handled above
            }
            let PrimeFormula::Eq(a, _) = sat.facts[eid].0.clone() else { continue };
            let cand = PrimeFormula::Eq(a, c.clone());
            if sat.admissible_quick(&cand) {
                sat.add(cand, Provenance::Repl { src: eid, eq: id });
            }
            if sat.budget_exhausted {
                return;
            }
        }
    }
}

/// Lifts the rewrite `s ↦ t` (equation fact `eq`) into the context `lam`,
/// producing `∼ lam, lam[s↦t]` for each occurrence.
fn ctx_lift(sat: &mut Saturator, lam: &ListExpr, eq: usize, st: (&ListExpr, &ListExpr)) {
    for lam2 in replace_occurrences(lam, st.0, st.1) {
        if lam2.len() > sat.bound || lam2 == *lam || !sat.member(&lam2) {
            continue;
        }
        sat.add(PrimeFormula::Eq(lam.clone(), lam2), Provenance::CtxRepl { eq });
        if sat.budget_exhausted {
            return;
        }
    }
}

fn contains_sublist(hay: &ListExpr, needle: &ListExpr) -> bool {
    let n = needle.len();
    if n == 0 || n > hay.len() {
        return n == 0;
    }
    hay.tokens().windows(n).any(|w| w == needle.tokens())
}

fn apply_congruence(
    sat: &mut Saturator,
    pid: usize,
    eq: usize,
    st: (&ListExpr, &ListExpr),
) {
    let PrimeFormula::Pred { name, args } = sat.facts[pid].0.clone() else { return };
    for (i, a) in args.iter().enumerate() {
        if a == st.0 {
            let mut new_args = args.clone();
            new_args[i] = st.1.clone();
            let cand = PrimeFormula::Pred { name: name.clone(), args: new_args };
            if cand.args().iter().any(|x| x.len() > sat.bound) {
                continue;
            }
            sat.add(cand, Provenance::Cong { pred: pid, pos: i, eq });
            if sat.budget_exhausted {
                return;
            }
        }
    }
}

/// Static check that premise instances can never outgrow the conclusion:
/// for every basis axiom, each variable occurs in some conclusion
/// argument at least as often as in any single premise argument. Under
/// this condition bounded saturation misses no fact whose arguments fit
/// the bound with slack to spare, which licenses `False` verdicts.
pub fn monotone_certificate(sys: &RecursiveSystem) -> bool {
    fn var_counts(l: &ListExpr) -> BTreeMap<&Variable, usize> {
        let mut m = BTreeMap::new();
        for v in l.variables() {
            *m.entry(v).or_insert(0) += 1;
        }
        m
    }
    sys.basis.iter().all(|rf| {
        let conc_args: Vec<BTreeMap<&Variable, usize>> =
            rf.conclusion.args().iter().map(|l| var_counts(l)).collect();
        rf.premises.iter().all(|p| {
            p.args().iter().all(|arg| {
                var_counts(arg).into_iter().all(|(v, k)| {
                    conc_args.iter().any(|c| c.get(v).copied().unwrap_or(0) >= k)
                })
            })
        })
    })
}

/// Completeness margin added to a query's argument size when deciding
/// `False`: the largest constant-token payload of any single argument
/// list in the basis, with a floor of 2.
pub fn completeness_slack(sys: &RecursiveSystem) -> usize {
    let mut m = 2usize;
    for rf in &sys.basis {
        for p in rf.primes() {
            for l in p.args() {
                let consts = l.tokens().iter().filter(|t| matches!(t, Token::Sym(_))).count();
                m = m.max(consts);
            }
        }
    }
    m
}

/// Three-valued bounded derivability of a ground prime formula whose
/// arguments lie in the language. `True` needs the fact (or a reflexive
/// equation); `False` needs the certificate, a completed saturation and
/// enough slack between the query size and the bound.
pub fn r_derivable(
    sys: &RecursiveSystem,
    lang: &LGrammar,
    facts: &FactSet,
    p: &PrimeFormula,
) -> Verdict {
    debug_assert!(p.is_ground());
    if let PrimeFormula::Eq(a, b) = p {
        if a == b && lang.member(a) {
            return Verdict::True;
        }
    }
    if facts.contains(p) {
        return Verdict::True;
    }
    if monotone_certificate(sys)
        && facts.complete
        && facts.size_bound >= p.max_arg_len() + completeness_slack(sys)
    {
        return Verdict::False;
    }
    Verdict::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_list, parse_rformula, VarPool};
    use crate::testsys::{dual_system, spa_system};

    fn rf(pool: &mut VarPool, t: &str) -> RFormula {
        parse_rformula(t, pool).unwrap()
    }

    #[test]
    fn eq_raxiom_examples() {
        let mut p = VarPool::new();
        // transitivity shape is a replacement instance
        assert!(is_eq_raxiom(&rf(
            &mut p,
            "(horn ((eq (l ?s) (l ?t)) (eq (l ?t) (l ?u))) (eq (l ?s) (l ?u)))"
        )));
        // congruence with n = 1
        assert!(is_eq_raxiom(&rf(
            &mut p,
            "(horn ((eq (l ?y) (l ?z)) (pred N0 (l ?y))) (pred N0 (l ?z)))"
        )));
        // symmetry without the reflexive premise is not an axiom
        assert!(!is_eq_raxiom(&rf(
            &mut p,
            "(horn ((eq (l ?s) (l ?t))) (eq (l ?t) (l ?s)))"
        )));
        // reflexivity over an arbitrary list
        assert!(is_eq_raxiom(&rf(&mut p, "(horn () (eq (l f ( ?x )) (l f ( ?x ))))")));
        // the symmetry derivation's axiom
        assert!(is_eq_raxiom(&rf(
            &mut p,
            "(horn ((eq (l ?s) (l ?s)) (eq (l ?s) (l ?t))) (eq (l ?t) (l ?s)))"
        )));
    }

    fn dual_101_derivation(pool: &mut VarPool) -> RDerivation {
        use RJustification::*;
        let x = pool.intern("x");
        let y = pool.intern("y");
        let steps = vec![
            ("(horn () (pred D (l 1) (l a)))", Basis(3)),
            ("(horn ((pred D (l ?x) (l ?y))) (pred D (l ?x 0) (l ?y ?y)))", Basis(4)),
            ("(horn ((pred D (l ?x) (l ?y))) (pred D (l ?x 1) (l ?y ?y a)))", Basis(5)),
            (
                "(horn ((pred D (l 1) (l ?y))) (pred D (l 1 0) (l ?y ?y)))",
                Subst(1, x.clone(), parse_list("(l 1)", pool).unwrap()),
            ),
            (
                "(horn ((pred D (l 1) (l a))) (pred D (l 1 0) (l a a)))",
                Subst(3, y.clone(), parse_list("(l a)", pool).unwrap()),
            ),
            ("(horn () (pred D (l 1 0) (l a a)))", Mp(0, 4)),
            (
                "(horn ((pred D (l 1 0) (l ?y))) (pred D (l 1 0 1) (l ?y ?y a)))",
                Subst(2, x, parse_list("(l 1 0)", pool).unwrap()),
            ),
            (
                "(horn ((pred D (l 1 0) (l a a))) (pred D (l 1 0 1) (l a a a a a)))",
                Subst(6, y, parse_list("(l a a)", pool).unwrap()),
            ),
            ("(horn () (pred D (l 1 0 1) (l a a a a a)))", Mp(5, 7)),
        ];
        RDerivation {
            steps: steps
                .into_iter()
                .map(|(t, j)| (parse_rformula(t, pool).unwrap(), j))
                .collect(),
        }
    }

    #[test]
    fn dual_golden_derivation_accepted() {
        let mut pool = VarPool::new();
        let (sys, lang) = dual_system(&mut pool);
        let d = dual_101_derivation(&mut pool);
        let report = check_rderivation(&sys, &lang, &d);
        assert!(report.accepted, "{report}");
    }

    #[test]
    fn dual_mutated_derivation_rejected() {
        let mut pool = VarPool::new();
        let (sys, lang) = dual_system(&mut pool);
        let mut d = dual_101_derivation(&mut pool);
        // step (6) citing (2),(5) instead of (1),(5): minor premise wrong
        d.steps[5].1 = RJustification::Mp(1, 4);
        let report = check_rderivation(&sys, &lang, &d);
        assert!(!report.accepted);
        assert_eq!(report.first_failure.as_ref().unwrap().0, 5);
    }

    #[test]
    fn empty_derivation_accepted() {
        let mut pool = VarPool::new();
        let (sys, lang) = dual_system(&mut pool);
        let report = check_rderivation(&sys, &lang, &RDerivation { steps: vec![] });
        assert!(report.accepted);
    }

    #[test]
    fn saturate_dual_derives_target() {
        let mut pool = VarPool::new();
        let (sys, lang) = dual_system(&mut pool);
        let facts = saturate(&sys, &lang, 12, 1_000_000);
        assert!(facts.complete);
        let target = parse_rformula("(horn () (pred D (l 1 0 1) (l a a a a a)))", &mut pool)
            .unwrap()
            .conclusion;
        assert!(facts.contains(&target));
        let d0 = parse_rformula("(horn () (pred D (l 0)))", &mut pool).unwrap().conclusion;
        assert!(!facts.contains(&d0));
        assert_eq!(r_derivable(&sys, &lang, &facts, &target), Verdict::True);
        assert_eq!(r_derivable(&sys, &lang, &facts, &d0), Verdict::False);
    }

    #[test]
    fn saturate_is_monotone_in_bound() {
        let mut pool = VarPool::new();
        let (sys, lang) = dual_system(&mut pool);
        let small = saturate(&sys, &lang, 6, 1_000_000);
        let large = saturate(&sys, &lang, 7, 1_000_000);
        for f in small.iter() {
            assert!(large.contains(f), "{f} lost when raising the bound");
        }
    }

    #[test]
    fn saturate_facts_reconstruct_and_recheck() {
        let mut pool = VarPool::new();
        let (sys, lang) = dual_system(&mut pool);
        let facts = saturate(&sys, &lang, 8, 1_000_000);
        assert!(facts.len() > 10);
        for f in facts.iter() {
            let d = facts.reconstruct(&sys, f).unwrap();
            assert_eq!(&d.steps.last().unwrap().0.conclusion, f);
            assert!(d.steps.last().unwrap().0.premises.is_empty());
            let report = check_rderivation(&sys, &lang, &d);
            assert!(report.accepted, "reconstruction of {f} fails: {report}");
        }
    }

    #[test]
    fn saturate_spa_derives_addition_fact() {
        let mut pool = VarPool::new();
        let (sys, lang) = spa_system(&mut pool);
        let facts = saturate(&sys, &lang, 14, 1_000_000);
        assert!(facts.complete);
        let target = parse_rformula(
            "(horn () (eq (l + ( s ( 0 ) s ( 0 ) )) (l s ( s ( 0 ) ))))",
            &mut pool,
        )
        .unwrap()
        .conclusion;
        assert!(facts.contains(&target), "addition fact missing");
        // reconstruction passes the checker too
        let d = facts.reconstruct(&sys, &target).unwrap();
        assert!(check_rderivation(&sys, &lang, &d).accepted);
        // underivable equation is rejected under the certificate
        let bad = parse_rformula("(horn () (eq (l s ( 0 )) (l 0)))", &mut pool)
            .unwrap()
            .conclusion;
        assert_eq!(r_derivable(&sys, &lang, &facts, &bad), Verdict::False);
        // oversized query stays unknown
        let big = parse_rformula(
            "(horn () (pred N0 (l s ( s ( s ( s ( s ( s ( 0 ) ) ) ) ) ))))",
            &mut pool,
        )
        .unwrap()
        .conclusion;
        assert!(big.max_arg_len() + completeness_slack(&sys) > 14);
        assert_eq!(r_derivable(&sys, &lang, &facts, &big), Verdict::Unknown);
    }

    #[test]
    fn spa_congruence_reaches_equal_arguments() {
        let mut pool = VarPool::new();
        let (sys, lang) = spa_system(&mut pool);
        let facts = saturate(&sys, &lang, 12, 1_000_000);
        // N0 +(00) needs symmetry of +(00) ∼ 0 and predicate congruence.
        let t = parse_rformula("(horn () (pred N0 (l + ( 0 0 ))))", &mut pool)
            .unwrap()
            .conclusion;
        assert!(facts.contains(&t), "N0 +(00) not derived");
        let d = facts.reconstruct(&sys, &t).unwrap();
        assert!(check_rderivation(&sys, &lang, &d).accepted);
    }

    #[test]
    fn certificate_examples() {
        let mut pool = VarPool::new();
        let (dual, _) = dual_system(&mut pool);
        assert!(monotone_certificate(&dual));
        let (spa, _) = spa_system(&mut pool);
        assert!(monotone_certificate(&spa));
        // shrinking conclusion
        let bad = RecursiveSystem::new(
            dual.alphabet.clone(),
            dual.predicates.clone(),
            vec![rf(&mut pool, "(horn ((pred D (l ?x ?x))) (pred D (l ?x)))")],
        );
        assert!(!monotone_certificate(&bad));
    }

    #[test]
    fn budget_exhaustion_flags_partial() {
        let mut pool = VarPool::new();
        let (sys, lang) = dual_system(&mut pool);
        let facts = saturate(&sys, &lang, 12, 5);
        assert!(facts.budget_exhausted);
        assert!(!facts.complete);
        let d0 = parse_rformula("(horn () (pred D (l 0)))", &mut pool).unwrap().conclusion;
        assert_eq!(r_derivable(&sys, &lang, &facts, &d0), Verdict::Unknown);
    }
}
