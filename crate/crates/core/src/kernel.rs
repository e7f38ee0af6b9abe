//! The proof checker for mathematical systems with restricted argument
//! lists: axiom recognizers (propositional tautologies, equality axioms,
//! quantifier axioms, basis axioms, adjoined statements, the arithmetic
//! induction-scheme hook) and the five inference rules — axiom
//! introduction, Modus Ponens, substitution, generalization and the
//! structural Induction Rule.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::binding::{cf, free_of, sbf_unchecked, vars_of, VarSet};
use crate::langset::LGrammar;
use crate::rsys::{equation_replacements, RecursiveSystem};
use crate::syntax::{
    rform_to_formula, Formula, ListExpr, PrimeFormula, Symbol, Token, VarPool, Variable,
};

pub const DEFAULT_ATOM_CAP: usize = 16;

/// Schema hook enabling the arithmetic induction-scheme axioms.
pub const HOOK_PA_IS: &str = "pa-is";

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("adjoined formula is not a statement: free variables {0}")]
    NotAStatement(String),
    #[error("adjoined name `{0}` already in use")]
    DuplicateAdjoined(String),
    #[error("argument list {0} is outside the language")]
    ListOutsideLanguage(String),
    #[error("predicate {0}/{1} is not declared")]
    UndeclaredPredicate(String, usize),
    #[error("symbol `{0}` already declared")]
    SymbolClash(String),
    #[error("{0}")]
    Language(#[from] crate::langset::LangError),
    #[error("induction variables or formula variables overlap the basis axioms: {0}")]
    BasisVariableClash(String),
    #[error("induction variables must be distinct")]
    DuplicateInductionVariable,
    #[error("collision when instantiating the induction formula")]
    InductionCollision,
}

/// A mathematical system: underlying recursive system, basis formulas,
/// adjoined statements, the argument-list language and enabled schema
/// hooks. Immutable once constructed; extension operations return a new
/// system.
#[derive(Clone, Debug)]
pub struct MathSystem {
    pub rsys: RecursiveSystem,
    /// Basis formulas of the mathematical system. When the system is in
    /// the plain regime these are exactly the basis R-axioms, read as
    /// implication chains.
    pub basis: Vec<Formula>,
    pub adjoined: Vec<(String, Formula)>,
    pub lang: LGrammar,
    pub hooks: BTreeSet<String>,
    /// Variable pool the system was parsed with; cloned by dependent
    /// parses so indices stay consistent.
    pub pool: VarPool,
}

impl MathSystem {
    /// Builds and validates a system. `basis` defaults to the basis
    /// R-axioms when `None`.
    pub fn new(
        rsys: RecursiveSystem,
        basis: Option<Vec<Formula>>,
        lang: LGrammar,
        hooks: BTreeSet<String>,
        pool: VarPool,
    ) -> Result<Self, KernelError> {
        let basis =
            basis.unwrap_or_else(|| rsys.basis.iter().map(rform_to_formula).collect());
        let sys = MathSystem { rsys, basis, adjoined: Vec::new(), lang, hooks, pool };
        for f in &sys.basis {
            sys.validate_formula(f)?;
        }
        Ok(sys)
    }

    pub fn validate_formula(&self, f: &Formula) -> Result<(), KernelError> {
        let mut bad_list: Option<ListExpr> = None;
        f.visit_lists(&mut |l| {
            if bad_list.is_none() && !self.lang.member(l) {
                bad_list = Some(l.clone());
            }
        });
        if let Some(l) = bad_list {
            return Err(KernelError::ListOutsideLanguage(l.to_string()));
        }
        for (name, arity) in f.pred_keys() {
            if !self.rsys.predicates.contains(&(name.clone(), arity)) {
                return Err(KernelError::UndeclaredPredicate(name.name().into(), arity));
            }
        }
        Ok(())
    }

    /// True when the system's basis is exactly its recursive system's and
    /// nothing was adjoined or hooked in — the regime under which prime
    /// provability and R-derivability coincide on ground primes.
    pub fn plain_regime(&self) -> bool {
        self.adjoined.is_empty()
            && self.hooks.is_empty()
            && self.basis.len() == self.rsys.basis.len()
            && self
                .basis
                .iter()
                .zip(self.rsys.basis.iter())
                .all(|(f, rf)| f == &rform_to_formula(rf))
    }

    pub fn adjoined_lookup(&self, name: &str) -> Option<&Formula> {
        self.adjoined.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// Registers a closed formula as an additional axiom. Bound variables
    /// clashing with the basis R-axioms are renamed fresh first, so later
    /// transformations can rely on the disjointness.
    pub fn adjoin(&self, name: &str, phi: &Formula) -> Result<MathSystem, KernelError> {
        if self.adjoined_lookup(name).is_some() {
            return Err(KernelError::DuplicateAdjoined(name.into()));
        }
        let free = free_of(phi);
        if !free.is_empty() {
            let names: Vec<String> = free.iter().map(|v| v.to_string()).collect();
            return Err(KernelError::NotAStatement(names.join(" ")));
        }
        let mut out = self.clone();
        let avoid: VarSet = self.rsys.basis_vars();
        let mut mk = || out.pool.fresh("z");
        let phi = crate::binding::alpha_avoid(phi, &avoid, &mut mk);
        out.validate_formula(&phi)?;
        out.adjoined.push((name.into(), phi));
        Ok(out)
    }

    /// Extends the alphabet with fresh constants; the language gains each
    /// constant as a direct alternative, the underlying recursive system
    /// keeps its axioms.
    pub fn extend_alphabet(&self, consts: &BTreeSet<Symbol>) -> Result<MathSystem, KernelError> {
        for c in consts {
            if self.rsys.alphabet.contains(c) || c.is_paren() {
                return Err(KernelError::SymbolClash(c.name().into()));
            }
        }
        let mut out = self.clone();
        out.rsys.alphabet.extend(consts.iter().cloned());
        out.lang = self.lang.extend_constants(consts)?;
        Ok(out)
    }
}

/// Justification of one proof step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    AxTaut,
    AxEq,
    AxQuant(QuantAxiom),
    AxBasis(usize),
    AxAdjoined(String),
    AxSchema(String),
    Mp(usize, usize),
    Subst(usize, Variable, ListExpr),
    Gen(Variable, usize),
    Induct {
        pred: Symbol,
        arity: usize,
        vars: Vec<Variable>,
        formula: Formula,
        /// basis-axiom index → proof-step index
        obligations: Vec<(usize, usize)>,
    },
}

impl Justification {
    pub fn kind(&self) -> &'static str {
        match self {
            Justification::AxTaut => "ax-taut",
            Justification::AxEq => "ax-eq",
            Justification::AxQuant(_) => "ax-quant",
            Justification::AxBasis(_) => "ax-basis",
            Justification::AxAdjoined(_) => "ax-adjoined",
            Justification::AxSchema(_) => "ax-schema",
            Justification::Mp(..) => "mp",
            Justification::Subst(..) => "subst",
            Justification::Gen(..) => "gen",
            Justification::Induct { .. } => "induct",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantAxiom {
    A,
    B,
    C,
}

impl fmt::Display for QuantAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantAxiom::A => "a",
            QuantAxiom::B => "b",
            QuantAxiom::C => "c",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Proof {
    pub steps: Vec<(Formula, Justification)>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|(f, _)| f)
    }
}

#[derive(Clone, Debug)]
pub struct StepFailure {
    pub step: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub accepted: bool,
    pub first_failure: Option<StepFailure>,
    pub steps: usize,
    pub rule_counts: BTreeMap<&'static str, usize>,
}

impl CheckReport {
    fn ok(steps: usize, rule_counts: BTreeMap<&'static str, usize>) -> Self {
        CheckReport { accepted: true, first_failure: None, steps, rule_counts }
    }

    fn fail(step: usize, reason: String, steps: usize) -> Self {
        CheckReport {
            accepted: false,
            first_failure: Some(StepFailure { step, reason }),
            steps,
            rule_counts: BTreeMap::new(),
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_failure {
            None => write!(f, "accepted ({} steps)", self.steps),
            Some(sf) => write!(f, "rejected at step {}: {}", sf.step + 1, sf.reason),
        }
    }
}

/// Outcome of tautology recognition; the atom cap is reported rather than
/// silently treated as "no".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TautVerdict {
    Taut,
    NotTaut,
    TooManyAtoms(usize),
}

#[derive(Clone, Debug)]
enum Skel {
    Atom(usize),
    Not(Box<Skel>),
    Imp(Box<Skel>, Box<Skel>),
    Iff(Box<Skel>, Box<Skel>),
    And(Box<Skel>, Box<Skel>),
    Or(Box<Skel>, Box<Skel>),
}

fn skeleton(f: &Formula, atoms: &mut Vec<Formula>, seen: &mut HashMap<Formula, usize>) -> Skel {
    match f {
        Formula::Not(a) => Skel::Not(Box::new(skeleton(a, atoms, seen))),
        Formula::Imp(a, b) => Skel::Imp(
            Box::new(skeleton(a, atoms, seen)),
            Box::new(skeleton(b, atoms, seen)),
        ),
        Formula::Iff(a, b) => Skel::Iff(
            Box::new(skeleton(a, atoms, seen)),
            Box::new(skeleton(b, atoms, seen)),
        ),
        Formula::And(a, b) => Skel::And(
            Box::new(skeleton(a, atoms, seen)),
            Box::new(skeleton(b, atoms, seen)),
        ),
        Formula::Or(a, b) => Skel::Or(
            Box::new(skeleton(a, atoms, seen)),
            Box::new(skeleton(b, atoms, seen)),
        ),
        Formula::Prime(_) | Formula::Forall(..) | Formula::Exists(..) => {
            let id = *seen.entry(f.clone()).or_insert_with(|| {
                atoms.push(f.clone());
                atoms.len() - 1
            });
            Skel::Atom(id)
        }
    }
}

fn skel_eval(s: &Skel, assignment: u32) -> bool {
    match s {
        Skel::Atom(i) => assignment & (1 << i) != 0,
        Skel::Not(a) => !skel_eval(a, assignment),
        Skel::Imp(a, b) => !skel_eval(a, assignment) || skel_eval(b, assignment),
        Skel::Iff(a, b) => skel_eval(a, assignment) == skel_eval(b, assignment),
        Skel::And(a, b) => skel_eval(a, assignment) && skel_eval(b, assignment),
        Skel::Or(a, b) => skel_eval(a, assignment) || skel_eval(b, assignment),
    }
}

/// Recognizes instances of identically true propositional functions:
/// maximal prime- or quantifier-headed subformulas become atoms
/// (syntactically identical subformulas share one atom) and the skeleton
/// is truth-tabled over at most `atom_cap` atoms.
pub fn is_taut_instance(f: &Formula, atom_cap: usize) -> TautVerdict {
    let mut atoms = Vec::new();
    let mut seen = HashMap::new();
    let skel = skeleton(f, &mut atoms, &mut seen);
    let n = atoms.len();
    if n > atom_cap || n >= 31 {
        return TautVerdict::TooManyAtoms(n);
    }
    for assignment in 0..(1u32 << n) {
        if !skel_eval(&skel, assignment) {
            return TautVerdict::NotTaut;
        }
    }
    TautVerdict::Taut
}

/// Views an implication chain of prime formulas as premises plus a prime
/// conclusion; `None` when any component is not prime.
fn prime_chain(f: &Formula) -> Option<(Vec<PrimeFormula>, PrimeFormula)> {
    let mut premises = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::Prime(p) => return Some((premises, p.clone())),
            Formula::Imp(a, b) => match &**a {
                Formula::Prime(p) => {
                    premises.push(p.clone());
                    cur = b;
                }
                _ => return None,
            },
            _ => return None,
        }
    }
}

/// Recognizes the equality axiom schemas at the formula level:
/// reflexivity `∼λ,λ`, replacement `→ E → ∼s,t E′`, and the predicate
/// congruence chain.
pub fn is_eq_axiom(f: &Formula) -> bool {
    match prime_chain(f) {
        Some((premises, conclusion)) => {
            crate::rsys::is_eq_raxiom(&crate::syntax::RFormula::new(premises, conclusion))
        }
        None => false,
    }
}

/// Recognizes the three quantifier axioms.
pub fn is_quant_axiom(f: &Formula) -> Option<QuantAxiom> {
    if check_quant_a(f) {
        return Some(QuantAxiom::A);
    }
    if check_quant_b(f).is_ok() {
        return Some(QuantAxiom::B);
    }
    if check_quant_c(f) {
        return Some(QuantAxiom::C);
    }
    None
}

fn check_quant_a(f: &Formula) -> bool {
    match f {
        Formula::Imp(a, b) => match &**a {
            Formula::Forall(_, inner) => &**inner == &**b,
            _ => false,
        },
        _ => false,
    }
}

/// Shape `→ ∀x (→ G H) (→ G ∀x H)` with the side condition that `x` is
/// not free in `G`; the condition failure gets its own message.
fn check_quant_b(f: &Formula) -> Result<(), String> {
    let shape_err = || "not of quantifier axiom (3.11)(b) shape".to_string();
    let Formula::Imp(a, b) = f else { return Err(shape_err()) };
    let Formula::Forall(x, gh) = &**a else { return Err(shape_err()) };
    let Formula::Imp(g, h) = &**gh else { return Err(shape_err()) };
    let Formula::Imp(g2, allh) = &**b else { return Err(shape_err()) };
    let Formula::Forall(x2, h2) = &**allh else { return Err(shape_err()) };
    if x != x2 || g != g2 || h != h2 {
        return Err(shape_err());
    }
    if free_of(g).contains(x) {
        return Err("quantifier axiom (3.11)(b): x free in antecedent".into());
    }
    Ok(())
}

fn check_quant_c(f: &Formula) -> bool {
    let Formula::Iff(a, b) = f else { return false };
    let Formula::Not(alln) = &**a else { return false };
    let Formula::Forall(x, ng) = &**alln else { return false };
    let Formula::Not(g) = &**ng else { return false };
    let Formula::Exists(x2, g2) = &**b else { return false };
    x == x2 && g == g2
}

/// Recognizes instances of the arithmetic induction scheme
/// `→ ∀x & G(0/x) (→ G G(s(x)/x)) ∀x G`, in both the conjunctive form
/// and its connective-reduced image `¬→ A ¬B`.
pub fn is_pa_induction_instance(f: &Formula) -> bool {
    let Formula::Imp(hyp, conc) = f else { return false };
    let Formula::Forall(x2, g) = &**conc else { return false };
    let Formula::Forall(x, body) = &**hyp else { return false };
    if x != x2 {
        return false;
    }
    let (base, step) = match &**body {
        Formula::And(a, b) => (&**a, &**b),
        Formula::Not(inner) => {
            // ¬ → A ¬B
            let Formula::Imp(a, nb) = &**inner else { return false };
            let Formula::Not(b) = &**nb else { return false };
            (&**a, &**b)
        }
        _ => return false,
    };
    let Formula::Imp(g2, succ) = step else { return false };
    if &**g2 != &**g {
        return false;
    }
    let zero = ListExpr(vec![Token::Sym(Symbol::new("0"))]);
    let sx = ListExpr(vec![
        Token::Sym(Symbol::new("s")),
        Token::Sym(Symbol::new("(")),
        Token::Var(x.clone()),
        Token::Sym(Symbol::new(")")),
    ]);
    if !cf(g, &zero, x) || !cf(g, &sx, x) {
        return false;
    }
    base == &sbf_unchecked(g, &zero, x) && **succ == sbf_unchecked(g, &sx, x)
}

/// True iff `f` is a basis axiom of `m`: a member of the basis list, an
/// adjoined statement, or an instance of an enabled schema hook.
pub fn is_basis_axiom(m: &MathSystem, f: &Formula) -> bool {
    m.basis.iter().any(|b| b == f)
        || m.adjoined.iter().any(|(_, b)| b == f)
        || (m.hooks.contains(HOOK_PA_IS) && is_pa_induction_instance(f))
}

/// For each basis R-axiom whose conclusion contains `p` `i`-ary, the
/// formula obtained by replacing every `i`-ary `p`-subformula (premises
/// included) by `g` instantiated at its argument lists. Returned as
/// `(axiom index, formula)` pairs.
pub fn build_e_obligations(
    sys: &RecursiveSystem,
    p: &Symbol,
    arity: usize,
    vars: &[Variable],
    g: &Formula,
) -> Result<Vec<(usize, Formula)>, KernelError> {
    let mut distinct = BTreeSet::new();
    if !vars.iter().all(|v| distinct.insert(v.clone())) {
        return Err(KernelError::DuplicateInductionVariable);
    }
    let basis_vars = sys.basis_vars();
    let mut clash: Vec<String> = Vec::new();
    for v in vars.iter().chain(vars_of(g).iter()) {
        if basis_vars.contains(v) {
            clash.push(v.to_string());
        }
    }
    if !clash.is_empty() {
        clash.dedup();
        return Err(KernelError::BasisVariableClash(clash.join(" ")));
    }

    let instantiate = |args: &[ListExpr]| -> Result<Formula, KernelError> {
        let mut out = g.clone();
        for (v, lam) in vars.iter().zip(args.iter()) {
            if !cf(&out, lam, v) {
                return Err(KernelError::InductionCollision);
            }
            out = sbf_unchecked(&out, lam, v);
        }
        Ok(out)
    };

    let mut obligations = Vec::new();
    for (idx, rf) in sys.basis.iter().enumerate() {
        let hits = |prime: &PrimeFormula| match prime {
            PrimeFormula::Pred { name, args } => name == p && args.len() == arity,
            PrimeFormula::Eq(..) => false,
        };
        if !hits(&rf.conclusion) {
            continue;
        }
        let mut parts: Vec<Formula> = Vec::new();
        for prime in rf.primes() {
            if hits(prime) {
                let PrimeFormula::Pred { args, .. } = prime else { unreachable!() };
                parts.push(instantiate(args)?);
            } else {
                parts.push(Formula::Prime(prime.clone()));
            }
        }
        let mut formula = parts.pop().expect("conclusion present");
        for part in parts.into_iter().rev() {
            formula = Formula::imp(part, formula);
        }
        obligations.push((idx, formula));
    }
    Ok(obligations)
}

/// Verifies a proof step by step against `m`; failures land in the
/// report, the first one wins.
pub fn check_proof(m: &MathSystem, proof: &Proof) -> CheckReport {
    let n = proof.steps.len();
    let mut rule_counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for (k, (formula, just)) in proof.steps.iter().enumerate() {
        if let Err(e) = m.validate_formula(formula) {
            return CheckReport::fail(k, e.to_string(), n);
        }
        let result = check_step(m, proof, k, formula, just);
        if let Err(reason) = result {
            return CheckReport::fail(k, reason, n);
        }
        *rule_counts.entry(just.kind()).or_insert(0) += 1;
    }
    CheckReport::ok(n, rule_counts)
}

fn check_step(
    m: &MathSystem,
    proof: &Proof,
    k: usize,
    formula: &Formula,
    just: &Justification,
) -> Result<(), String> {
    let earlier = |i: usize| -> Result<&Formula, String> {
        if i < k {
            Ok(&proof.steps[i].0)
        } else {
            Err(format!("reference to step {} is not earlier than step {}", i + 1, k + 1))
        }
    };
    match just {
        Justification::AxTaut => match is_taut_instance(formula, DEFAULT_ATOM_CAP) {
            TautVerdict::Taut => Ok(()),
            TautVerdict::NotTaut => Err("not an instance of an identically true propositional function".into()),
            TautVerdict::TooManyAtoms(n) => {
                Err(format!("tautology check exceeds the atom cap ({n} atoms)"))
            }
        },
        Justification::AxEq => {
            if is_eq_axiom(formula) {
                Ok(())
            } else {
                Err("step matches no equality axiom schema".into())
            }
        }
        Justification::AxQuant(QuantAxiom::A) => {
            if check_quant_a(formula) {
                Ok(())
            } else {
                Err("not of quantifier axiom (3.11)(a) shape".into())
            }
        }
        Justification::AxQuant(QuantAxiom::B) => check_quant_b(formula),
        Justification::AxQuant(QuantAxiom::C) => {
            if check_quant_c(formula) {
                Ok(())
            } else {
                Err("not of quantifier axiom (3.11)(c) shape".into())
            }
        }
        Justification::AxBasis(i) => {
            let b = m
                .basis
                .get(*i)
                .ok_or_else(|| format!("basis axiom {} does not exist", i + 1))?;
            if b == formula {
                Ok(())
            } else {
                Err(format!("step is not basis axiom {}", i + 1))
            }
        }
        Justification::AxAdjoined(name) => {
            let phi = m
                .adjoined_lookup(name)
                .ok_or_else(|| format!("no adjoined statement named `{name}`"))?;
            if phi == formula {
                Ok(())
            } else {
                Err(format!("step is not the adjoined statement `{name}`"))
            }
        }
        Justification::AxSchema(hook) => {
            if !m.hooks.contains(hook) {
                return Err(format!("schema hook `{hook}` is not enabled"));
            }
            if hook == HOOK_PA_IS && is_pa_induction_instance(formula) {
                Ok(())
            } else {
                Err(format!("step is not an instance of schema `{hook}`"))
            }
        }
        Justification::Mp(i, j) => {
            let minor = earlier(*i)?;
            let major = earlier(*j)?;
            match major {
                Formula::Imp(a, b) if &**a == minor && &**b == formula => Ok(()),
                _ => Err(format!(
                    "step does not follow from steps {} and {} by modus ponens",
                    i + 1,
                    j + 1
                )),
            }
        }
        Justification::Subst(i, x, lam) => {
            let src = earlier(*i)?;
            if !m.lang.member(lam) {
                return Err(format!("substituted list {lam} is outside the language"));
            }
            if !cf(src, lam, x) {
                return Err(format!("substitution of {lam} for {x} collides in step {}", i + 1));
            }
            if &sbf_unchecked(src, lam, x) == formula {
                Ok(())
            } else {
                Err(format!("step is not step {} with {x} := {lam}", i + 1))
            }
        }
        Justification::Gen(x, i) => {
            let src = earlier(*i)?;
            match formula {
                Formula::Forall(y, inner) if y == x && &**inner == src => Ok(()),
                _ => Err(format!("step is not the generalization of step {} over {x}", i + 1)),
            }
        }
        Justification::Induct { pred, arity, vars, formula: g, obligations } => {
            check_induction(m, proof, k, formula, pred, *arity, vars, g, obligations)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check_induction(
    m: &MathSystem,
    proof: &Proof,
    k: usize,
    formula: &Formula,
    pred: &Symbol,
    arity: usize,
    vars: &[Variable],
    g: &Formula,
    obligations: &[(usize, usize)],
) -> Result<(), String> {
    if !m.rsys.predicates.contains(&(pred.clone(), arity)) {
        return Err(format!(
            "predicate {}/{} is not part of the underlying recursive system",
            pred.name(),
            arity
        ));
    }
    if vars.len() != arity {
        return Err(format!("expected {arity} induction variables, got {}", vars.len()));
    }
    let required = build_e_obligations(&m.rsys, pred, arity, vars, g).map_err(|e| e.to_string())?;
    let map: BTreeMap<usize, usize> = obligations.iter().copied().collect();
    for (axiom_idx, want) in &required {
        let step = map.get(axiom_idx).ok_or_else(|| {
            format!("obligation for basis axiom {} is not mapped to any step", axiom_idx + 1)
        })?;
        if *step >= k {
            return Err(format!(
                "obligation step {} is not earlier than step {}",
                step + 1,
                k + 1
            ));
        }
        if &proof.steps[*step].0 != want {
            return Err(format!(
                "step {} does not match the obligation for basis axiom {}",
                step + 1,
                axiom_idx + 1
            ));
        }
    }
    let head = PrimeFormula::Pred {
        name: pred.clone(),
        args: vars.iter().map(|v| ListExpr(vec![Token::Var(v.clone())])).collect(),
    };
    let want = Formula::imp(Formula::Prime(head), g.clone());
    if formula == &want {
        Ok(())
    } else {
        Err("step is not the induction conclusion for the given predicate and formula".into())
    }
}

/// Convenience: equality-axiom brute-force oracle used in tests — checks
/// the replacement schema by literally enumerating all single-occurrence
/// replacements.
pub fn replacement_oracle(e: &PrimeFormula, q: &PrimeFormula, e2: &PrimeFormula) -> bool {
    let (PrimeFormula::Eq(a, b), PrimeFormula::Eq(s, t), PrimeFormula::Eq(a2, b2)) = (e, q, e2)
    else {
        return false;
    };
    equation_replacements((a, b), s, t).into_iter().any(|(x, y)| &x == a2 && &y == b2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, VarPool};
    use crate::testsys::{dual_system, reverse_system, spa_system};

    fn dual_math(pool: &mut VarPool) -> MathSystem {
        let (sys, lang) = dual_system(pool);
        MathSystem::new(sys, None, lang, BTreeSet::new(), pool.clone()).unwrap()
    }

    fn f(pool: &mut VarPool, t: &str) -> Formula {
        parse_formula(t, pool).unwrap()
    }

    #[test]
    fn taut_examples() {
        let mut p = VarPool::new();
        let t1 = f(&mut p, "(imp (eq (l ?x) (l a)) (eq (l ?x) (l a)))");
        assert_eq!(is_taut_instance(&t1, 16), TautVerdict::Taut);
        // three-premise composition chain
        let t2 = f(
            &mut p,
            "(imp (imp (pred A) (pred B)) (imp (imp (pred B) (imp (pred C) (pred E))) (imp (pred C) (imp (pred A) (pred E)))))",
        );
        assert_eq!(is_taut_instance(&t2, 16), TautVerdict::Taut);
        let t3 = f(&mut p, "(imp (pred P) (pred Q))");
        assert_eq!(is_taut_instance(&t3, 16), TautVerdict::NotTaut);
        assert_eq!(is_taut_instance(&t2, 3), TautVerdict::TooManyAtoms(4));
    }

    #[test]
    fn taut_quantified_subformulas_are_atoms() {
        let mut p = VarPool::new();
        // → &(∀z ∼z,z)(¬∀z ∼z,z) X is identically true
        let t = f(
            &mut p,
            "(imp (and (all ?z (eq (l ?z) (l ?z))) (not (all ?z (eq (l ?z) (l ?z))))) (pred X))",
        );
        assert_eq!(is_taut_instance(&t, 16), TautVerdict::Taut);
    }

    #[test]
    fn eq_axiom_examples() {
        let mut p = VarPool::new();
        assert!(is_eq_axiom(&f(&mut p, "(eq (l ?x) (l ?x))")));
        // replacement: → ∼f(s),f(s) → ∼s,t ∼f(s),f(t)
        assert!(is_eq_axiom(&f(
            &mut p,
            "(imp (eq (l f ( ?s )) (l f ( ?s ))) (imp (eq (l ?s) (l ?t)) (eq (l f ( ?s )) (l f ( ?t )))))"
        )));
        // congruence: → ∼s,t → W s W t
        assert!(is_eq_axiom(&f(
            &mut p,
            "(imp (eq (l ?s) (l ?t)) (imp (pred W (l ?s)) (pred W (l ?t))))"
        )));
        // plain symmetry is not an axiom
        assert!(!is_eq_axiom(&f(
            &mut p,
            "(imp (eq (l ?s) (l ?t)) (eq (l ?t) (l ?s)))"
        )));
    }

    #[test]
    fn eq_axiom_matches_reverse_proof_instances() {
        // the equality-axiom steps of the reversal proof, checked against
        // the brute-force replacement oracle where applicable
        let mut p = VarPool::new();
        let steps = [
            "(imp (eq (l f ( ?s )) (l f ( ?s ))) (imp (eq (l ?s) (l ?t)) (eq (l f ( ?s )) (l f ( ?t )))))",
            "(imp (eq (l ?s) (l ?t)) (imp (eq (l ?t) (l ?u)) (eq (l ?s) (l ?u))))",
            "(imp (eq (l ?s) (l ?s)) (imp (eq (l ?s) (l ?t)) (eq (l ?t) (l ?s))))",
            "(imp (eq (l ?s ?t) (l ?s ?t)) (imp (eq (l ?t) (l ?v)) (eq (l ?s ?t) (l ?s ?v))))",
            "(imp (eq (l ?s ?t) (l ?s ?v)) (imp (eq (l ?s) (l ?u)) (eq (l ?s ?t) (l ?u ?v))))",
        ];
        for s in steps {
            let fx = f(&mut p, s);
            assert!(is_eq_axiom(&fx), "{s} not recognized");
            let Some((premises, conclusion)) = super::prime_chain(&fx) else { panic!() };
            assert!(replacement_oracle(&premises[0], &premises[1], &conclusion), "{s} oracle");
        }
        // congruence (step form → ∼s,t → W s W t)
        assert!(is_eq_axiom(&f(
            &mut p,
            "(imp (eq (l ?s) (l ?t)) (imp (pred W (l ?s)) (pred W (l ?t))))"
        )));
    }

    #[test]
    fn quant_axiom_examples() {
        let mut p = VarPool::new();
        let a = f(&mut p, "(imp (all ?x (not (pred F))) (not (pred F)))");
        assert_eq!(is_quant_axiom(&a), Some(QuantAxiom::A));

        // valid (b): x not free in the antecedent
        let b = f(
            &mut p,
            "(imp (all ?x (imp (pred F) (pred G (l ?x)))) (imp (pred F) (all ?x (pred G (l ?x)))))",
        );
        assert_eq!(is_quant_axiom(&b), Some(QuantAxiom::B));

        // the restriction: x free in the antecedent
        let bad = f(
            &mut p,
            "(imp (all ?x (imp (eq (l ?x) (l a)) (eq (l ?x) (l a)))) (imp (eq (l ?x) (l a)) (all ?x (eq (l ?x) (l a)))))",
        );
        assert_eq!(is_quant_axiom(&bad), None);
        assert_eq!(
            check_quant_b(&bad).unwrap_err(),
            "quantifier axiom (3.11)(b): x free in antecedent"
        );

        let c = f(&mut p, "(iff (not (all ?x (not (pred F (l ?x))))) (ex ?x (pred F (l ?x))))");
        assert_eq!(is_quant_axiom(&c), Some(QuantAxiom::C));
    }

    #[test]
    fn pa_induction_instance_recognized() {
        let mut p = VarPool::new();
        // G = ∼ +(x 0), x
        let inst = f(
            &mut p,
            "(imp (all ?x (and (eq (l + ( 0 0 )) (l 0)) (imp (eq (l + ( ?x 0 )) (l ?x)) (eq (l + ( s ( ?x ) 0 )) (l s ( ?x )))))) (all ?x (eq (l + ( ?x 0 )) (l ?x))))",
        );
        assert!(is_pa_induction_instance(&inst));
        // mismatched successor side
        let bad = f(
            &mut p,
            "(imp (all ?x (and (eq (l + ( 0 0 )) (l 0)) (imp (eq (l + ( ?x 0 )) (l ?x)) (eq (l + ( s ( ?x ) 0 )) (l ?x))))) (all ?x (eq (l + ( ?x 0 )) (l ?x))))",
        );
        assert!(!is_pa_induction_instance(&bad));
        // the connective-reduced image is accepted too
        let reduced = f(
            &mut p,
            "(imp (all ?x (not (imp (eq (l + ( 0 0 )) (l 0)) (not (imp (eq (l + ( ?x 0 )) (l ?x)) (eq (l + ( s ( ?x ) 0 )) (l s ( ?x )))))))) (all ?x (eq (l + ( ?x 0 )) (l ?x))))",
        );
        assert!(is_pa_induction_instance(&reduced));
    }

    #[test]
    fn basis_axiom_lookup() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let ax1 = f(&mut pool, "(pred D (l 1))");
        assert!(is_basis_axiom(&m, &ax1));
        let nope = f(&mut pool, "(pred D (l 0))");
        assert!(!is_basis_axiom(&m, &nope));
    }

    #[test]
    fn empty_proof_accepted() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        assert!(check_proof(&m, &Proof::default()).accepted);
    }

    #[test]
    fn small_proof_with_subst_gen_mp() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let x = pool.intern("x");
        let lam = crate::syntax::parse_list("(l 1)", &mut pool).unwrap();
        let steps = vec![
            (f(&mut pool, "(eq (l ?x) (l ?x))"), Justification::AxEq),
            (
                f(&mut pool, "(eq (l 1) (l 1))"),
                Justification::Subst(0, x.clone(), lam),
            ),
            (
                f(&mut pool, "(all ?x (eq (l ?x) (l ?x)))"),
                Justification::Gen(x.clone(), 0),
            ),
            (
                f(
                    &mut pool,
                    "(imp (all ?x (eq (l ?x) (l ?x))) (eq (l ?x) (l ?x)))",
                ),
                Justification::AxQuant(QuantAxiom::A),
            ),
            (
                f(&mut pool, "(eq (l ?x) (l ?x))"),
                Justification::Mp(2, 3),
            ),
        ];
        let report = check_proof(&m, &Proof { steps });
        assert!(report.accepted, "{report}");
        assert_eq!(report.rule_counts["subst"], 1);
    }

    #[test]
    fn subst_collision_rejected() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let fx = f(&mut pool, "(ex ?y (pred D (l ?x) (l ?y)))");
        let x = pool.lookup("x").unwrap();
        let lam = crate::syntax::parse_list("(l ?y)", &mut pool).unwrap();
        let steps = vec![
            (Formula::imp(fx.clone(), fx.clone()), Justification::AxTaut),
            (
                f(
                    &mut pool,
                    "(imp (ex ?y (pred D (l ?y) (l ?y))) (ex ?y (pred D (l ?y) (l ?y))))",
                ),
                Justification::Subst(0, x, lam),
            ),
        ];
        let report = check_proof(&m, &Proof { steps });
        assert!(!report.accepted);
        assert!(report.first_failure.unwrap().reason.contains("collides"));
    }

    #[test]
    fn obligations_for_dual_first_application() {
        // p = D 2-ary, G = D u: the obligations are the 1-ary axioms.
        let mut pool = VarPool::new();
        let (sys, _) = dual_system(&mut pool);
        let u = pool.intern("u");
        let v = pool.intern("v");
        let g = f(&mut pool, "(pred D (l ?u))");
        let obs = build_e_obligations(&sys, &Symbol::new("D"), 2, &[u, v], &g).unwrap();
        let want: Vec<(usize, Formula)> = vec![
            (3, f(&mut pool, "(pred D (l 1))")),
            (4, f(&mut pool, "(imp (pred D (l ?x)) (pred D (l ?x 0)))")),
            (5, f(&mut pool, "(imp (pred D (l ?x)) (pred D (l ?x 1)))")),
        ];
        assert_eq!(obs, want);
    }

    #[test]
    fn obligations_for_dual_second_application() {
        let mut pool = VarPool::new();
        let (sys, _) = dual_system(&mut pool);
        let u = pool.intern("u");
        let g = f(&mut pool, "(ex ?v (pred D (l ?u) (l ?v)))");
        let obs = build_e_obligations(&sys, &Symbol::new("D"), 1, &[u], &g).unwrap();
        let want: Vec<(usize, Formula)> = vec![
            (0, f(&mut pool, "(ex ?v (pred D (l 1) (l ?v)))")),
            (
                1,
                f(
                    &mut pool,
                    "(imp (ex ?v (pred D (l ?x) (l ?v))) (ex ?v (pred D (l ?x 0) (l ?v))))",
                ),
            ),
            (
                2,
                f(
                    &mut pool,
                    "(imp (ex ?v (pred D (l ?x) (l ?v))) (ex ?v (pred D (l ?x 1) (l ?v))))",
                ),
            ),
        ];
        assert_eq!(obs, want);
    }

    #[test]
    fn obligations_vacuous_when_predicate_absent() {
        let mut pool = VarPool::new();
        let (sys, lang) = reverse_system(&mut pool);
        let u = pool.intern("u");
        let g = f(&mut pool, "(not (eq (l ?u) (l ?u)))");
        // W never occurs 2-ary in a conclusion
        let obs = build_e_obligations(&sys, &Symbol::new("W"), 2, &[u.clone(), pool.intern("w")], &g);
        // vars (u,w) vs basis vars (x,y): disjoint, fine; no obligations
        assert!(obs.unwrap().is_empty());
        let _ = lang;
    }

    #[test]
    fn obligations_reject_basis_variable_clash() {
        let mut pool = VarPool::new();
        let (sys, _) = dual_system(&mut pool);
        let x = pool.lookup("x").unwrap();
        let g = f(&mut pool, "(pred D (l ?x))");
        assert!(build_e_obligations(&sys, &Symbol::new("D"), 1, &[x], &g).is_err());
    }

    #[test]
    fn adjoin_requires_statement_and_renames() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let open = f(&mut pool, "(pred D (l ?x))");
        assert!(m.adjoin("phi", &open).is_err());

        // bound x clashes with the basis variables and gets renamed
        let closed = f(&mut pool, "(all ?x (pred D (l ?x)))");
        let m2 = m.adjoin("phi", &closed).unwrap();
        let stored = m2.adjoined_lookup("phi").unwrap();
        match stored {
            Formula::Forall(v, _) => assert_ne!(v.name(), "x"),
            _ => panic!(),
        }
        // old proofs still check in the extended system
        assert!(check_proof(&m2, &Proof::default()).accepted);
    }

    #[test]
    fn extend_alphabet_admits_new_constants() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let consts: BTreeSet<Symbol> = [Symbol::new("c")].into_iter().collect();
        let m2 = m.extend_alphabet(&consts).unwrap();
        let lam = crate::syntax::parse_list("(l c 1)", &mut pool).unwrap();
        assert!(m2.lang.member(&lam));
        assert!(!m.lang.member(&lam));
        assert!(m.extend_alphabet(&[Symbol::new("a")].into_iter().collect()).is_err());
        assert!(!m2.plain_regime() || m2.adjoined.is_empty());
    }

    #[test]
    fn plain_regime_flags() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        assert!(m.plain_regime());
        let phi = f(&mut pool, "(pred D (l 1))");
        let m2 = m.adjoin("t", &phi).unwrap();
        assert!(!m2.plain_regime());
    }

    #[test]
    fn spa_math_system_validates() {
        let mut pool = VarPool::new();
        let (sys, lang) = spa_system(&mut pool);
        let m = MathSystem::new(sys, None, lang, BTreeSet::new(), pool.clone()).unwrap();
        assert!(m.plain_regime());
    }
}
