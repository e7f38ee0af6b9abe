//! Proof-to-proof transformers: the connective-eliminating translation,
//! prime-formula elimination via a fixed contradiction, the deduction
//! construction, generalization of constants, and the guard-predicate
//! relativizations. Every transformer re-checks its output in the target
//! system before returning it.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::binding::{vars_of, VarSet};
use crate::kernel::{
    build_e_obligations, check_proof, is_eq_axiom, CheckReport, Justification, KernelError,
    MathSystem, Proof, QuantAxiom,
};
use crate::syntax::{Formula, ListExpr, PrimeFormula, Symbol, Token, Variable};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("input proof is not accepted: {0}")]
    InputNotAccepted(String),
    #[error("transformed proof fails to check: {0}")]
    OutputNotAccepted(String),
    #[error("no adjoined statement named `{0}`")]
    NoSuchAdjoined(String),
    #[error("predicate {0}/{1} occurs in the basis or adjoined axioms")]
    PredicateInBasis(String, usize),
    #[error("constant `{0}` occurs in the basis axioms")]
    ConstantInBasis(String),
    #[error("replacement variable {0} already occurs in the proof")]
    VariableNotFresh(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn ensure_accepted(report: &CheckReport, input: bool) -> Result<(), TransformError> {
    if report.accepted {
        Ok(())
    } else {
        let msg = report.to_string();
        Err(if input {
            TransformError::InputNotAccepted(msg)
        } else {
            TransformError::OutputNotAccepted(msg)
        })
    }
}

/// Structural translation eliminating `∃`, `∨`, `&` and `↔`:
/// `∨ F G ↦ → ¬F G`, `& F G ↦ ¬→ F ¬G`, `↔ F G ↦ ¬→ (→ F G) ¬(→ G F)`,
/// `∃x F ↦ ¬∀x ¬F`; primes are fixed, the remaining connectives descend.
pub fn theta(f: &Formula) -> Formula {
    match f {
        Formula::Prime(_) => f.clone(),
        Formula::Not(a) => Formula::not(theta(a)),
        Formula::Imp(a, b) => Formula::imp(theta(a), theta(b)),
        Formula::Or(a, b) => Formula::imp(Formula::not(theta(a)), theta(b)),
        Formula::And(a, b) => Formula::not(Formula::imp(theta(a), Formula::not(theta(b)))),
        Formula::Iff(a, b) => {
            let ta = theta(a);
            let tb = theta(b);
            Formula::not(Formula::imp(
                Formula::imp(ta.clone(), tb.clone()),
                Formula::not(Formula::imp(tb, ta)),
            ))
        }
        Formula::Forall(v, a) => Formula::forall(v.clone(), theta(a)),
        Formula::Exists(v, a) => {
            Formula::not(Formula::forall(v.clone(), Formula::not(theta(a))))
        }
    }
}

/// Maps an accepted proof step by step through [`theta`]. Each image step
/// keeps the rule that derived the original; images of quantifier axiom
/// (c) become propositional axioms. Adjoined statements of the system are
/// mapped along, so the result is a proof in the returned system.
pub fn theta_proof(
    m: &MathSystem,
    proof: &Proof,
) -> Result<(MathSystem, Proof), TransformError> {
    ensure_accepted(&check_proof(m, proof), true)?;
    let mut m2 = m.clone();
    for (_, phi) in m2.adjoined.iter_mut() {
        *phi = theta(phi);
    }
    let steps = proof
        .steps
        .iter()
        .map(|(f, j)| {
            let nf = theta(f);
            let nj = match j {
                Justification::AxQuant(QuantAxiom::C) => Justification::AxTaut,
                Justification::Induct { pred, arity, vars, formula, obligations } => {
                    Justification::Induct {
                        pred: pred.clone(),
                        arity: *arity,
                        vars: vars.clone(),
                        formula: theta(formula),
                        obligations: obligations.clone(),
                    }
                }
                other => other.clone(),
            };
            (nf, nj)
        })
        .collect();
    let out = Proof { steps };
    ensure_accepted(&check_proof(&m2, &out), false)?;
    Ok((m2, out))
}

/// The fixed contradiction `& ∀z ∼z,z ¬∀z ∼z,z` over a variable `z` not
/// involved in the basis R-axioms.
#[derive(Clone, Debug)]
pub struct ContradictionC {
    pub z: Variable,
    pub formula: Formula,
}

impl ContradictionC {
    /// Picks `z` fresh with respect to the basis R-axioms of `m`.
    pub fn fresh(m: &MathSystem) -> ContradictionC {
        let mut pool = m.pool.clone();
        let basis_vars = m.rsys.basis_vars();
        let mut z = pool.fresh("z");
        while basis_vars.contains(&z) {
            z = pool.fresh("z");
        }
        Self::over(z)
    }

    pub fn over(z: Variable) -> ContradictionC {
        let zz = ListExpr(vec![Token::Var(z.clone())]);
        let refl = Formula::Prime(PrimeFormula::Eq(zz.clone(), zz));
        let all = Formula::forall(z.clone(), refl);
        let formula = Formula::and(all.clone(), Formula::not(all));
        ContradictionC { z, formula }
    }
}

/// Replaces every `j`-ary subformula of predicate `q` by the
/// contradiction; everything else is preserved.
pub fn c_formula(f: &Formula, q: &Symbol, j: usize, c: &ContradictionC) -> Formula {
    match f {
        Formula::Prime(PrimeFormula::Pred { name, args }) if name == q && args.len() == j => {
            c.formula.clone()
        }
        Formula::Prime(_) => f.clone(),
        Formula::Not(a) => Formula::not(c_formula(a, q, j, c)),
        Formula::Imp(a, b) => Formula::imp(c_formula(a, q, j, c), c_formula(b, q, j, c)),
        Formula::Iff(a, b) => Formula::iff(c_formula(a, q, j, c), c_formula(b, q, j, c)),
        Formula::And(a, b) => Formula::and(c_formula(a, q, j, c), c_formula(b, q, j, c)),
        Formula::Or(a, b) => Formula::or(c_formula(a, q, j, c), c_formula(b, q, j, c)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), c_formula(a, q, j, c)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), c_formula(a, q, j, c)),
    }
}

/// Eliminates every `j`-ary occurrence of `q` from an accepted proof,
/// provided `q` does not occur `j`-ary in the basis or adjoined axioms.
/// Induction steps over `(q, j)` collapse to propositional axioms; all
/// other steps keep their rule.
pub fn c_eliminate(
    m: &MathSystem,
    q: &Symbol,
    j: usize,
    proof: &Proof,
) -> Result<Proof, TransformError> {
    for f in m.basis.iter().chain(m.adjoined.iter().map(|(_, f)| f)) {
        if f.pred_keys().contains(&(q.clone(), j)) {
            return Err(TransformError::PredicateInBasis(q.name().into(), j));
        }
    }
    ensure_accepted(&check_proof(m, proof), true)?;
    let c = ContradictionC::fresh(m);
    let steps = proof
        .steps
        .iter()
        .map(|(f, just)| {
            let nf = c_formula(f, q, j, &c);
            let nj = match just {
                Justification::AxEq => {
                    // congruence over (q, j) collapses to a tautology
                    if is_eq_axiom(&nf) {
                        Justification::AxEq
                    } else {
                        Justification::AxTaut
                    }
                }
                Justification::Induct { pred, arity, vars, formula, obligations } => {
                    if pred == q && *arity == j {
                        Justification::AxTaut
                    } else {
                        Justification::Induct {
                            pred: pred.clone(),
                            arity: *arity,
                            vars: vars.clone(),
                            formula: c_formula(formula, q, j, &c),
                            obligations: obligations.clone(),
                        }
                    }
                }
                other => other.clone(),
            };
            (nf, nj)
        })
        .collect();
    let out = Proof { steps };
    ensure_accepted(&check_proof(m, &out), false)?;
    Ok(out)
}

/// Output of a proof transformer together with the mapping from input
/// step indices to the output steps carrying their transformed formulas.
#[derive(Clone, Debug)]
pub struct TransformTrace {
    pub output: Proof,
    pub step_map: Vec<usize>,
}

struct ProofBuilder {
    steps: Vec<(Formula, Justification)>,
}

impl ProofBuilder {
    fn new() -> Self {
        ProofBuilder { steps: Vec::new() }
    }

    fn push(&mut self, f: Formula, j: Justification) -> usize {
        self.steps.push((f, j));
        self.steps.len() - 1
    }
}

/// Deduction construction: from a proof of `G` in the system extended
/// with the closed axiom `name = φ`, a proof of `→ φ G` in the system
/// without it. Axioms are weakened propositionally, Modus Ponens chains
/// through a composition tautology, substitution and generalization
/// commute with the closed hypothesis, and induction steps are re-run
/// with the hypothesis absorbed into the induction formula.
pub fn deduction(
    m_with: &MathSystem,
    name: &str,
    proof: &Proof,
) -> Result<(MathSystem, TransformTrace), TransformError> {
    let phi = m_with
        .adjoined_lookup(name)
        .cloned()
        .ok_or_else(|| TransformError::NoSuchAdjoined(name.to_string()))?;
    ensure_accepted(&check_proof(m_with, proof), true)?;

    let mut m_out = m_with.clone();
    m_out.adjoined.retain(|(n, _)| n != name);

    let wrap = |f: &Formula| Formula::imp(phi.clone(), f.clone());
    let mut b = ProofBuilder::new();
    let mut out: Vec<usize> = Vec::with_capacity(proof.steps.len());

    for (k, (fk, just)) in proof.steps.iter().enumerate() {
        let idx = match just {
            Justification::AxAdjoined(n) if n == name => b.push(wrap(fk), Justification::AxTaut),
            Justification::AxTaut
            | Justification::AxEq
            | Justification::AxQuant(_)
            | Justification::AxBasis(_)
            | Justification::AxAdjoined(_)
            | Justification::AxSchema(_) => {
                let ax = b.push(fk.clone(), just.clone());
                let weaken = b.push(Formula::imp(fk.clone(), wrap(fk)), Justification::AxTaut);
                b.push(wrap(fk), Justification::Mp(ax, weaken))
            }
            Justification::Mp(i, j) => {
                let fi = &proof.steps[*i].0;
                let chain = Formula::imp(
                    wrap(fi),
                    Formula::imp(wrap(&proof.steps[*j].0), wrap(fk)),
                );
                let t = b.push(chain, Justification::AxTaut);
                let mid = b.push(
                    Formula::imp(wrap(&proof.steps[*j].0), wrap(fk)),
                    Justification::Mp(out[*i], t),
                );
                b.push(wrap(fk), Justification::Mp(out[*j], mid))
            }
            Justification::Subst(i, x, lam) => {
                b.push(wrap(fk), Justification::Subst(out[*i], x.clone(), lam.clone()))
            }
            Justification::Gen(x, i) => {
                let gen_step = b.push(
                    Formula::forall(x.clone(), wrap(&proof.steps[*i].0)),
                    Justification::Gen(x.clone(), out[*i]),
                );
                let inner = Formula::forall(x.clone(), proof.steps[*i].0.clone());
                let qb = b.push(
                    Formula::imp(
                        Formula::forall(x.clone(), wrap(&proof.steps[*i].0)),
                        wrap(&inner),
                    ),
                    Justification::AxQuant(QuantAxiom::B),
                );
                b.push(wrap(&inner), Justification::Mp(gen_step, qb))
            }
            Justification::Induct { pred, arity, vars, formula: g0, obligations } => {
                let g_abs = Formula::imp(phi.clone(), g0.clone());
                let absorbed = build_e_obligations(&m_out.rsys, pred, *arity, vars, &g_abs)?;
                let orig: BTreeMap<usize, usize> = obligations.iter().copied().collect();
                let mut new_oblig = Vec::new();
                for (axiom_idx, want) in &absorbed {
                    let orig_step = orig[axiom_idx];
                    let src = out[orig_step];
                    let t = b.push(
                        Formula::imp(wrap(&proof.steps[orig_step].0), want.clone()),
                        Justification::AxTaut,
                    );
                    let o = b.push(want.clone(), Justification::Mp(src, t));
                    new_oblig.push((*axiom_idx, o));
                }
                let head = PrimeFormula::Pred {
                    name: pred.clone(),
                    args: vars.iter().map(|v| ListExpr(vec![Token::Var(v.clone())])).collect(),
                };
                let ind_formula = Formula::imp(Formula::Prime(head.clone()), g_abs.clone());
                let ind = b.push(
                    ind_formula.clone(),
                    Justification::Induct {
                        pred: pred.clone(),
                        arity: *arity,
                        vars: vars.clone(),
                        formula: g_abs,
                        obligations: new_oblig,
                    },
                );
                let reshuffle = b.push(
                    Formula::imp(ind_formula, wrap(fk)),
                    Justification::AxTaut,
                );
                b.push(wrap(fk), Justification::Mp(ind, reshuffle))
            }
        };
        out.push(idx);
        debug_assert_eq!(b.steps[idx].0, wrap(fk), "step {k} image mismatch");
    }

    let trace = TransformTrace { output: Proof { steps: b.steps }, step_map: out };
    ensure_accepted(&check_proof(&m_out, &trace.output), false)?;
    Ok((m_out, trace))
}

fn map_tokens_list(l: &ListExpr, map: &BTreeMap<Symbol, Variable>) -> ListExpr {
    ListExpr(
        l.tokens()
            .iter()
            .map(|t| match t {
                Token::Sym(s) => match map.get(s) {
                    Some(v) => Token::Var(v.clone()),
                    None => t.clone(),
                },
                Token::Var(_) => t.clone(),
            })
            .collect(),
    )
}

fn map_tokens_formula(f: &Formula, map: &BTreeMap<Symbol, Variable>) -> Formula {
    match f {
        Formula::Prime(p) => Formula::Prime(p.map_args(|l| map_tokens_list(l, map))),
        Formula::Not(a) => Formula::not(map_tokens_formula(a, map)),
        Formula::Imp(a, b) => {
            Formula::imp(map_tokens_formula(a, map), map_tokens_formula(b, map))
        }
        Formula::Iff(a, b) => {
            Formula::iff(map_tokens_formula(a, map), map_tokens_formula(b, map))
        }
        Formula::And(a, b) => {
            Formula::and(map_tokens_formula(a, map), map_tokens_formula(b, map))
        }
        Formula::Or(a, b) => Formula::or(map_tokens_formula(a, map), map_tokens_formula(b, map)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), map_tokens_formula(a, map)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), map_tokens_formula(a, map)),
    }
}

/// Generalization of constants: replaces each constant by a fresh
/// variable throughout an accepted proof, yielding a proof in the
/// unextended system `m_base`. Purely syntactic; validity is re-certified
/// by the checker.
pub fn generalize_constants(
    m_base: &MathSystem,
    map: &BTreeMap<Symbol, Variable>,
    proof: &Proof,
) -> Result<Proof, TransformError> {
    for c in map.keys() {
        if m_base.rsys.alphabet.contains(c) {
            return Err(TransformError::ConstantInBasis(c.name().into()));
        }
    }
    let mut used: VarSet = VarSet::new();
    for (f, _) in &proof.steps {
        used.extend(vars_of(f));
    }
    for v in map.values() {
        if used.contains(v) {
            return Err(TransformError::VariableNotFresh(v.to_string()));
        }
    }
    let steps = proof
        .steps
        .iter()
        .map(|(f, just)| {
            let nf = map_tokens_formula(f, map);
            let nj = match just {
                Justification::Subst(i, x, lam) => {
                    Justification::Subst(*i, x.clone(), map_tokens_list(lam, map))
                }
                Justification::Induct { pred, arity, vars, formula, obligations } => {
                    Justification::Induct {
                        pred: pred.clone(),
                        arity: *arity,
                        vars: vars.clone(),
                        formula: map_tokens_formula(formula, map),
                        obligations: obligations.clone(),
                    }
                }
                other => other.clone(),
            };
            (nf, nj)
        })
        .collect();
    let out = Proof { steps };
    ensure_accepted(&check_proof(m_base, &out), false)?;
    Ok(out)
}

/// Free variables in order of first free occurrence, scanning the
/// formula left to right.
pub fn free_occurrence_order(f: &Formula) -> Vec<Variable> {
    fn walk(f: &Formula, bound: &mut Vec<Variable>, out: &mut Vec<Variable>) {
        match f {
            Formula::Prime(p) => {
                for l in p.args() {
                    for v in l.variables() {
                        if !bound.contains(v) && !out.contains(v) {
                            out.push(v.clone());
                        }
                    }
                }
            }
            Formula::Not(a) => walk(a, bound, out),
            Formula::Imp(a, b) | Formula::Iff(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                walk(a, bound, out);
                walk(b, bound, out);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                bound.push(v.clone());
                walk(a, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

/// Prepends the guard-premise block `→ N₀x₁ … → N₀xₙ` over the free
/// variables of `f` in first-occurrence order; the identity on
/// statements.
pub fn relativize_gamma(f: &Formula, guard: &Symbol) -> Formula {
    let mut out = f.clone();
    for v in free_occurrence_order(f).into_iter().rev() {
        let premise = Formula::Prime(PrimeFormula::Pred {
            name: guard.clone(),
            args: vec![ListExpr(vec![Token::Var(v)])],
        });
        out = Formula::imp(premise, out);
    }
    out
}

/// Relativizes every quantifier to the guard predicate: `∀z G ↦
/// ∀z → N₀z G` and `∃z G ↦ ∃z & N₀z G`, applied simultaneously in every
/// subformula.
pub fn relativize_psi(f: &Formula, guard: &Symbol) -> Formula {
    let guard_of = |v: &Variable| {
        Formula::Prime(PrimeFormula::Pred {
            name: guard.clone(),
            args: vec![ListExpr(vec![Token::Var(v.clone())])],
        })
    };
    match f {
        Formula::Prime(_) => f.clone(),
        Formula::Not(a) => Formula::not(relativize_psi(a, guard)),
        Formula::Imp(a, b) => {
            Formula::imp(relativize_psi(a, guard), relativize_psi(b, guard))
        }
        Formula::Iff(a, b) => {
            Formula::iff(relativize_psi(a, guard), relativize_psi(b, guard))
        }
        Formula::And(a, b) => {
            Formula::and(relativize_psi(a, guard), relativize_psi(b, guard))
        }
        Formula::Or(a, b) => Formula::or(relativize_psi(a, guard), relativize_psi(b, guard)),
        Formula::Forall(v, a) => Formula::forall(
            v.clone(),
            Formula::imp(guard_of(v), relativize_psi(a, guard)),
        ),
        Formula::Exists(v, a) => Formula::exists(
            v.clone(),
            Formula::and(guard_of(v), relativize_psi(a, guard)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binding::{cf, free_of, sbf_unchecked};
    use crate::syntax::{parse_formula, parse_list, VarPool};
    use crate::testsys::dual_system;
    use std::collections::BTreeSet;

    fn dual_math(pool: &mut VarPool) -> MathSystem {
        let (sys, lang) = dual_system(pool);
        MathSystem::new(sys, None, lang, BTreeSet::new(), pool.clone()).unwrap()
    }

    fn f(pool: &mut VarPool, t: &str) -> Formula {
        parse_formula(t, pool).unwrap()
    }

    #[test]
    fn theta_examples() {
        let mut p = VarPool::new();
        let prime = f(&mut p, "(pred D (l 1))");
        assert_eq!(theta(&prime), prime);

        let ex = f(&mut p, "(ex ?x (pred D (l ?x)))");
        assert_eq!(
            theta(&ex).to_string(),
            "(not (all ?x (not (pred D (l ?x)))))"
        );

        let and = f(&mut p, "(and (pred A) (pred B))");
        assert_eq!(theta(&and).to_string(), "(not (imp (pred A) (not (pred B))))");

        let or = f(&mut p, "(or (pred A) (pred B))");
        assert_eq!(theta(&or).to_string(), "(imp (not (pred A)) (pred B))");

        let iff = f(&mut p, "(iff (pred A) (pred B))");
        assert_eq!(
            theta(&iff).to_string(),
            "(not (imp (imp (pred A) (pred B)) (not (imp (pred B) (pred A)))))"
        );

        // idempotent
        for t in [&ex, &and, &or, &iff] {
            assert_eq!(theta(&theta(t)), theta(t));
        }
    }

    #[test]
    fn theta_proof_retags_quant_c() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let steps = vec![(
            f(
                &mut pool,
                "(iff (not (all ?x (not (pred D (l ?x))))) (ex ?x (pred D (l ?x))))",
            ),
            Justification::AxQuant(QuantAxiom::C),
        )];
        let proof = Proof { steps };
        let (m2, out) = theta_proof(&m, &proof).unwrap();
        assert_eq!(out.steps.len(), 1);
        assert_eq!(out.steps[0].1, Justification::AxTaut);
        assert!(check_proof(&m2, &out).accepted);
    }

    #[test]
    fn theta_proof_is_identity_on_reduced_fragment() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let x = pool.lookup("x").unwrap();
        let steps = vec![
            (f(&mut pool, "(eq (l ?x) (l ?x))"), Justification::AxEq),
            (
                f(&mut pool, "(all ?x (eq (l ?x) (l ?x)))"),
                Justification::Gen(x, 0),
            ),
        ];
        let proof = Proof { steps };
        let (_, out) = theta_proof(&m, &proof).unwrap();
        assert_eq!(out.steps.len(), proof.steps.len());
        for ((a, _), (b, _)) in proof.steps.iter().zip(out.steps.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn c_formula_examples() {
        let mut pool = VarPool::new();
        let z = Variable::new("zc", 90);
        let c = ContradictionC::over(z);
        let q = Symbol::new("q");

        let hit = f(&mut pool, "(pred q (l a))");
        assert_eq!(c_formula(&hit, &q, 1, &c), c.formula);

        let mixed = f(&mut pool, "(imp (pred q (l ?x)) (pred D (l ?x)))");
        let img = c_formula(&mixed, &q, 1, &c);
        assert_eq!(img, Formula::imp(c.formula.clone(), f(&mut pool, "(pred D (l ?x))")));

        // arity mismatch is untouched
        let two = f(&mut pool, "(pred q (l a) (l a))");
        assert_eq!(c_formula(&two, &q, 1, &c), two);
    }

    #[test]
    fn c_formula_commutes_with_sbf_sampled() {
        // the commutation equation on a thousand pseudo-random triples
        let mut pool = VarPool::new();
        let z = Variable::new("zc", 95);
        let c = ContradictionC::over(z);
        let q = Symbol::new("q");
        let mut rng = crate::langset::SplitMix::new(0x5eed);
        let vars: Vec<Variable> = (0..3).map(|i| pool.intern(&format!("v{i}"))).collect();
        let syms = ["a", "0", "1"];
        let mut count = 0;
        while count < 1000 {
            let fx = random_formula(&mut rng, &vars, &syms, 3, &q);
            let x = vars[(rng.next() % vars.len() as u64) as usize].clone();
            let mu = random_list(&mut rng, &vars, &syms, 3);
            if !cf(&fx, &mu, &x) {
                continue;
            }
            count += 1;
            let lhs = c_formula(&sbf_unchecked(&fx, &mu, &x), &q, 1, &c);
            assert!(cf(&c_formula(&fx, &q, 1, &c), &mu, &x));
            let rhs = sbf_unchecked(&c_formula(&fx, &q, 1, &c), &mu, &x);
            assert_eq!(lhs, rhs, "commutation fails on {fx}");
        }
    }

    fn random_list(
        rng: &mut crate::langset::SplitMix,
        vars: &[Variable],
        syms: &[&str],
        max: usize,
    ) -> ListExpr {
        let n = 1 + (rng.next() as usize) % max;
        let mut toks = Vec::new();
        for _ in 0..n {
            if rng.next() % 2 == 0 {
                toks.push(Token::Var(vars[(rng.next() as usize) % vars.len()].clone()));
            } else {
                toks.push(Token::Sym(Symbol::new(syms[(rng.next() as usize) % syms.len()])));
            }
        }
        ListExpr(toks)
    }

    fn random_formula(
        rng: &mut crate::langset::SplitMix,
        vars: &[Variable],
        syms: &[&str],
        depth: usize,
        q: &Symbol,
    ) -> Formula {
        if depth == 0 || rng.next() % 4 == 0 {
            return if rng.next() % 3 == 0 {
                Formula::Prime(PrimeFormula::Pred {
                    name: q.clone(),
                    args: vec![random_list(rng, vars, syms, 2)],
                })
            } else {
                Formula::Prime(PrimeFormula::Eq(
                    random_list(rng, vars, syms, 2),
                    random_list(rng, vars, syms, 2),
                ))
            };
        }
        match rng.next() % 5 {
            0 => Formula::not(random_formula(rng, vars, syms, depth - 1, q)),
            1 => Formula::imp(
                random_formula(rng, vars, syms, depth - 1, q),
                random_formula(rng, vars, syms, depth - 1, q),
            ),
            2 => Formula::and(
                random_formula(rng, vars, syms, depth - 1, q),
                random_formula(rng, vars, syms, depth - 1, q),
            ),
            3 => Formula::forall(
                vars[(rng.next() as usize) % vars.len()].clone(),
                random_formula(rng, vars, syms, depth - 1, q),
            ),
            _ => Formula::exists(
                vars[(rng.next() as usize) % vars.len()].clone(),
                random_formula(rng, vars, syms, depth - 1, q),
            ),
        }
    }

    #[test]
    fn deduction_weakens_vacuous_hypothesis() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let phi = f(&mut pool, "(all ?w (pred D (l ?w)))");
        let m2 = m.adjoin("hyp", &phi).unwrap();
        let proof = Proof {
            steps: vec![(f(&mut pool, "(pred D (l 1))"), Justification::AxBasis(0))],
        };
        let (m_out, trace) = deduction(&m2, "hyp", &proof).unwrap();
        assert!(m_out.adjoined.is_empty());
        let phi_stored = m2.adjoined_lookup("hyp").unwrap().clone();
        assert_eq!(
            trace.output.conclusion().unwrap(),
            &Formula::imp(phi_stored, f(&mut pool, "(pred D (l 1))"))
        );
    }

    #[test]
    fn deduction_handles_subst_gen_and_mp() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let phi = f(&mut pool, "(all ?w (pred D (l ?w)))");
        let m2 = m.adjoin("hyp", &phi).unwrap();
        let phi_stored = m2.adjoined_lookup("hyp").unwrap().clone();
        // use the hypothesis: ∀w D w ⊢ D 1, then generalize a tautology
        let w = pool.lookup("w").unwrap();
        let lam = parse_list("(l 1)", &mut pool).unwrap();
        let steps = vec![
            (phi_stored.clone(), Justification::AxAdjoined("hyp".into())),
            (
                Formula::imp(phi_stored.clone(), f(&mut pool, "(pred D (l ?w))")),
                Justification::AxQuant(QuantAxiom::A),
            ),
            (f(&mut pool, "(pred D (l ?w))"), Justification::Mp(0, 1)),
            (f(&mut pool, "(pred D (l 1))"), Justification::Subst(2, w.clone(), lam)),
            (
                f(&mut pool, "(all ?w (pred D (l ?w)))"),
                Justification::Gen(w.clone(), 2),
            ),
        ];
        let proof = Proof { steps };
        assert!(check_proof(&m2, &proof).accepted);
        let (m_out, trace) = deduction(&m2, "hyp", &proof).unwrap();
        assert!(check_proof(&m_out, &trace.output).accepted);
        // conclusion: → φ ∀w D w
        assert_eq!(
            trace.output.conclusion().unwrap(),
            &Formula::imp(phi_stored.clone(), phi_stored)
        );
    }

    #[test]
    fn generalize_constants_small() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let consts: BTreeSet<Symbol> = [Symbol::new("c")].into_iter().collect();
        let m_ext = m.extend_alphabet(&consts).unwrap();
        let x = pool.lookup("x").unwrap();
        let lam = parse_list("(l c)", &mut pool).unwrap();
        let steps = vec![
            (f(&mut pool, "(eq (l ?x) (l ?x))"), Justification::AxEq),
            (f(&mut pool, "(eq (l c) (l c))"), Justification::Subst(0, x, lam)),
        ];
        let proof = Proof { steps };
        assert!(check_proof(&m_ext, &proof).accepted);
        let fresh = pool.fresh("p");
        let map: BTreeMap<Symbol, Variable> = [(Symbol::new("c"), fresh.clone())].into();
        let out = generalize_constants(&m, &map, &proof).unwrap();
        assert_eq!(
            out.steps[1].0.to_string(),
            format!("(eq (l {fresh}) (l {fresh}))")
        );
        // a proof not mentioning the constants is unchanged
        let plain = Proof {
            steps: vec![(f(&mut pool, "(pred D (l 1))"), Justification::AxBasis(0))],
        };
        let same = generalize_constants(&m, &map, &plain).unwrap();
        assert_eq!(same.steps[0].0, plain.steps[0].0);
    }

    #[test]
    fn generalize_constants_rejects_used_variable() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let consts: BTreeSet<Symbol> = [Symbol::new("c")].into_iter().collect();
        let m_ext = m.extend_alphabet(&consts).unwrap();
        let proof = Proof {
            steps: vec![(f(&mut pool, "(eq (l ?x) (l ?x))"), Justification::AxEq)],
        };
        assert!(check_proof(&m_ext, &proof).accepted);
        let x = pool.lookup("x").unwrap();
        let map: BTreeMap<Symbol, Variable> = [(Symbol::new("c"), x)].into();
        assert!(matches!(
            generalize_constants(&m, &map, &proof),
            Err(TransformError::VariableNotFresh(_))
        ));
    }

    #[test]
    fn relativize_gamma_examples() {
        let mut pool = VarPool::new();
        let n0 = Symbol::new("N0");
        let closed = f(&mut pool, "(all ?x (eq (l ?x) (l ?x)))");
        assert_eq!(relativize_gamma(&closed, &n0), closed);

        let open = f(&mut pool, "(eq (l ?v) (l a))");
        assert_eq!(
            relativize_gamma(&open, &n0).to_string(),
            "(imp (pred N0 (l ?v)) (eq (l ?v) (l a)))"
        );

        // first-occurrence order, not index order
        let two = f(&mut pool, "(imp (pred D (l ?q2) (l ?q1)) (pred D (l ?q1)))");
        assert_eq!(
            relativize_gamma(&two, &n0).to_string(),
            "(imp (pred N0 (l ?q2)) (imp (pred N0 (l ?q1)) (imp (pred D (l ?q2) (l ?q1)) (pred D (l ?q1)))))"
        );
    }

    #[test]
    fn relativize_psi_examples() {
        let mut pool = VarPool::new();
        let n0 = Symbol::new("N0");
        let alpha = f(&mut pool, "(all ?x (eq (l + ( 0 ?x )) (l ?x)))");
        assert_eq!(
            relativize_psi(&alpha, &n0).to_string(),
            "(all ?x (imp (pred N0 (l ?x)) (eq (l + ( 0 ?x )) (l ?x))))"
        );
        let prime = f(&mut pool, "(eq (l 0) (l 0))");
        assert_eq!(relativize_psi(&prime, &n0), prime);
        let ex = f(&mut pool, "(ex ?x (eq (l ?x) (l 0)))");
        assert_eq!(
            relativize_psi(&ex, &n0).to_string(),
            "(ex ?x (and (pred N0 (l ?x)) (eq (l ?x) (l 0))))"
        );
        // free variables are preserved
        let open = f(&mut pool, "(all ?y (pred D (l ?x) (l ?y)))");
        assert_eq!(free_of(&relativize_psi(&open, &n0)), free_of(&open));
    }
}
