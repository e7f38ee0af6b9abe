//! Bounded three-valued evaluation of statements. Prime truth is grounded
//! in bounded R-derivability; quantifiers range over the enumerated
//! variable-free language members up to a list-size bound. `True` and
//! `False` are only produced when they are certain at the given bounds:
//! a definite verdict on a universal (dually, a failed existential)
//! additionally needs the system's monotonicity certificate, and `False`
//! on primes needs a completed saturation with slack. Everything else is
//! `Unknown`.

use std::cell::RefCell;
use std::collections::HashMap;

use thiserror::Error;

use crate::binding::{free_of, gen};
use crate::kernel::MathSystem;
use crate::rsys::{completeness_slack, monotone_certificate, r_derivable, saturate, FactSet, Verdict};
use crate::syntax::{Formula, ListExpr, PrimeFormula, Token, Variable};

/// Three-valued truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TV3 {
    True,
    False,
    Unknown,
}

impl From<Verdict> for TV3 {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::True => TV3::True,
            Verdict::False => TV3::False,
            Verdict::Unknown => TV3::Unknown,
        }
    }
}

impl TV3 {
    pub fn negate(self) -> TV3 {
        match self {
            TV3::True => TV3::False,
            TV3::False => TV3::True,
            TV3::Unknown => TV3::Unknown,
        }
    }

    fn and(self, other: TV3) -> TV3 {
        match (self, other) {
            (TV3::False, _) | (_, TV3::False) => TV3::False,
            (TV3::True, TV3::True) => TV3::True,
            _ => TV3::Unknown,
        }
    }

    fn or(self, other: TV3) -> TV3 {
        match (self, other) {
            (TV3::True, _) | (_, TV3::True) => TV3::True,
            (TV3::False, TV3::False) => TV3::False,
            _ => TV3::Unknown,
        }
    }

    fn imp(self, other: TV3) -> TV3 {
        self.negate().or(other)
    }

    fn iff(self, other: TV3) -> TV3 {
        self.imp(other).and(other.imp(self))
    }
}

impl std::fmt::Display for TV3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TV3::True => "true",
            TV3::False => "false",
            TV3::Unknown => "unknown",
        })
    }
}

/// Evaluation bounds: the maximal token length of quantifier instances
/// and the total instantiation work allowed before giving up with
/// `Unknown`.
#[derive(Clone, Copy, Debug)]
pub struct EvalBounds {
    pub list_size: usize,
    pub depth_budget: u64,
}

impl Default for EvalBounds {
    fn default() -> Self {
        EvalBounds { list_size: 6, depth_budget: 4_000_000 }
    }
}

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("formula is not a statement: free variables {0}")]
    NonStatement(String),
    #[error("the language has no variable-free members up to length {0}")]
    EmptyGroundLanguage(usize),
}

/// Budget for the saturations backing prime evaluation.
const SAT_BUDGET: usize = 200_000;

/// Evaluator over one mathematical system. Saturations and ground
/// enumerations are cached per instance; results are deterministic.
pub struct Evaluator<'a> {
    m: &'a MathSystem,
    certified: bool,
    slack: usize,
    sat: RefCell<Option<FactSet>>,
    ground: RefCell<HashMap<usize, Vec<ListExpr>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(m: &'a MathSystem) -> Self {
        Evaluator {
            m,
            certified: monotone_certificate(&m.rsys),
            slack: completeness_slack(&m.rsys),
            sat: RefCell::new(None),
            ground: RefCell::new(HashMap::new()),
        }
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    fn ground_lists(&self, max_len: usize) -> Vec<ListExpr> {
        self.ground
            .borrow_mut()
            .entry(max_len)
            .or_insert_with(|| self.m.lang.enumerate_ground(max_len))
            .clone()
    }

    /// Ensures the cached saturation covers `bound`; saturations are
    /// monotone in the bound, so the largest requested one serves all
    /// queries.
    fn ensure_sat(&self, bound: usize) {
        let need = {
            let cur = self.sat.borrow();
            match &*cur {
                Some(fs) => fs.size_bound < bound,
                None => true,
            }
        };
        if need {
            let fs = saturate(&self.m.rsys, &self.m.lang, bound, SAT_BUDGET);
            *self.sat.borrow_mut() = Some(fs);
        }
    }

    /// Worst-case argument length of any prime in `f` once every variable
    /// is replaced by a ground list of at most `list_size` tokens.
    fn arg_bound(&self, f: &Formula, list_size: usize) -> usize {
        let mut worst = 0usize;
        f.visit_lists(&mut |l| {
            let mut n = 0;
            for t in l.tokens() {
                n += match t {
                    Token::Sym(_) => 1,
                    Token::Var(_) => list_size,
                };
            }
            worst = worst.max(n);
        });
        worst
    }

    /// Bounded R-derivability of a ground prime, lifted to three values.
    pub fn eval_prime(&self, p: &PrimeFormula, bounds: &EvalBounds) -> TV3 {
        debug_assert!(p.is_ground());
        if p.args().iter().any(|l| !self.m.lang.member(l)) {
            // not a formula over the restricted lists, hence underivable
            return TV3::False;
        }
        let need = p.max_arg_len() + self.slack;
        self.ensure_sat(need.max(bounds.list_size + self.slack));
        let sat = self.sat.borrow();
        r_derivable(&self.m.rsys, &self.m.lang, sat.as_ref().unwrap(), p).into()
    }

    /// Evaluates a statement at the given bounds.
    pub fn eval_statement(&self, f: &Formula, bounds: &EvalBounds) -> Result<TV3, SemanticsError> {
        let free = free_of(f);
        if !free.is_empty() {
            let names: Vec<String> = free.iter().map(|v| v.to_string()).collect();
            return Err(SemanticsError::NonStatement(names.join(" ")));
        }
        let ground = self.ground_lists(bounds.list_size);
        if ground.is_empty() {
            return Err(SemanticsError::EmptyGroundLanguage(bounds.list_size));
        }
        self.ensure_sat(self.arg_bound(f, bounds.list_size) + self.slack);
        let mut env: Vec<(Variable, ListExpr)> = Vec::new();
        let mut budget = bounds.depth_budget as i64;
        Ok(self.eval_in(f, &mut env, &ground, &mut budget))
    }

    /// Universal closure first, then evaluation.
    pub fn eval_gen(&self, f: &Formula, bounds: &EvalBounds) -> Result<TV3, SemanticsError> {
        self.eval_statement(&gen(f), bounds)
    }

    fn eval_in(
        &self,
        f: &Formula,
        env: &mut Vec<(Variable, ListExpr)>,
        ground: &[ListExpr],
        budget: &mut i64,
    ) -> TV3 {
        *budget -= 1;
        if *budget < 0 {
            return TV3::Unknown;
        }
        match f {
            Formula::Prime(p) => {
                let inst = p.map_args(|l| splice(l, env));
                if inst.args().iter().any(|l| !self.m.lang.member(l)) {
                    return TV3::False;
                }
                let sat = self.sat.borrow();
                let fs = sat.as_ref().unwrap();
                if fs.size_bound + self.slack >= inst.max_arg_len() + self.slack
                    && fs.size_bound >= inst.max_arg_len() + self.slack
                {
                    r_derivable(&self.m.rsys, &self.m.lang, fs, &inst).into()
                } else {
                    // query larger than the prepared saturation
                    if fs.contains(&inst) {
                        TV3::True
                    } else {
                        TV3::Unknown
                    }
                }
            }
            Formula::Not(a) => self.eval_in(a, env, ground, budget).negate(),
            Formula::Imp(a, b) => {
                let va = self.eval_in(a, env, ground, budget);
                if va == TV3::False {
                    return TV3::True;
                }
                let vb = self.eval_in(b, env, ground, budget);
                va.imp(vb)
            }
            Formula::And(a, b) => {
                let va = self.eval_in(a, env, ground, budget);
                if va == TV3::False {
                    return TV3::False;
                }
                va.and(self.eval_in(b, env, ground, budget))
            }
            Formula::Or(a, b) => {
                let va = self.eval_in(a, env, ground, budget);
                if va == TV3::True {
                    return TV3::True;
                }
                va.or(self.eval_in(b, env, ground, budget))
            }
            Formula::Iff(a, b) => {
                let va = self.eval_in(a, env, ground, budget);
                let vb = self.eval_in(b, env, ground, budget);
                va.iff(vb)
            }
            Formula::Forall(x, body) => {
                // Any false instance falsifies the universal outright; an
                // all-true sweep proves it only under the certificate.
                let mut all_true = true;
                for lam in ground {
                    env.push((x.clone(), lam.clone()));
                    let v = self.eval_in(body, env, ground, budget);
                    env.pop();
                    match v {
                        TV3::False => return TV3::False,
                        TV3::True => {}
                        TV3::Unknown => all_true = false,
                    }
                    if *budget < 0 {
                        return TV3::Unknown;
                    }
                }
                if all_true && self.certified {
                    TV3::True
                } else {
                    TV3::Unknown
                }
            }
            Formula::Exists(x, body) => {
                let mut all_false = true;
                for lam in ground {
                    env.push((x.clone(), lam.clone()));
                    let v = self.eval_in(body, env, ground, budget);
                    env.pop();
                    match v {
                        TV3::True => return TV3::True,
                        TV3::False => {}
                        TV3::Unknown => all_false = false,
                    }
                    if *budget < 0 {
                        return TV3::Unknown;
                    }
                }
                if all_false && self.certified {
                    TV3::False
                } else {
                    TV3::Unknown
                }
            }
        }
    }
}

/// Splices the environment into a list: variables are replaced by their
/// bound ground lists, innermost binding first.
fn splice(l: &ListExpr, env: &[(Variable, ListExpr)]) -> ListExpr {
    let mut out = Vec::with_capacity(l.len());
    for t in l.tokens() {
        match t {
            Token::Sym(_) => out.push(t.clone()),
            Token::Var(v) => match env.iter().rev().find(|(w, _)| w == v) {
                Some((_, lam)) => out.extend(lam.tokens().iter().cloned()),
                None => out.push(t.clone()),
            },
        }
    }
    ListExpr(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::MathSystem;
    use crate::syntax::{parse_formula, VarPool};
    use crate::testsys::{dual_system, spa_system};
    use std::collections::BTreeSet;

    fn dual_math(pool: &mut VarPool) -> MathSystem {
        let (sys, lang) = dual_system(pool);
        MathSystem::new(sys, None, lang, BTreeSet::new(), pool.clone()).unwrap()
    }

    fn spa_math(pool: &mut VarPool) -> MathSystem {
        let (sys, lang) = spa_system(pool);
        MathSystem::new(sys, None, lang, BTreeSet::new(), pool.clone()).unwrap()
    }

    fn f(pool: &mut VarPool, t: &str) -> Formula {
        parse_formula(t, pool).unwrap()
    }

    #[test]
    fn prime_examples() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let ev = Evaluator::new(&m);
        let b = EvalBounds::default();
        assert_eq!(ev.eval_statement(&f(&mut pool, "(eq (l a) (l a))"), &b).unwrap(), TV3::True);
        assert_eq!(ev.eval_statement(&f(&mut pool, "(pred D (l 1))"), &b).unwrap(), TV3::True);
        assert_eq!(
            ev.eval_statement(&f(&mut pool, "(not (pred D (l 0)))"), &b).unwrap(),
            TV3::True
        );
    }

    #[test]
    fn spa_prime_false_under_certificate() {
        let mut pool = VarPool::new();
        let m = spa_math(&mut pool);
        let ev = Evaluator::new(&m);
        assert!(ev.certified());
        let b = EvalBounds::default();
        assert_eq!(
            ev.eval_statement(&f(&mut pool, "(eq (l s ( 0 )) (l 0))"), &b).unwrap(),
            TV3::False
        );
    }

    #[test]
    fn omega_star_statement_is_true_at_six() {
        let mut pool = VarPool::new();
        let m = spa_math(&mut pool);
        let ev = Evaluator::new(&m);
        let star = f(
            &mut pool,
            "(all ?x (imp (pred N0 (l ?x)) (not (eq (l s ( ?x )) (l 0)))))",
        );
        let b = EvalBounds { list_size: 6, depth_budget: 1_000_000 };
        assert_eq!(ev.eval_statement(&star, &b).unwrap(), TV3::True);
    }

    #[test]
    fn eval_gen_examples() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let ev = Evaluator::new(&m);
        let b = EvalBounds { list_size: 4, depth_budget: 4_000_000 };
        assert_eq!(ev.eval_gen(&f(&mut pool, "(eq (l ?x) (l ?x))"), &b).unwrap(), TV3::True);
        // D x is falsified by the instance x := 0
        assert_eq!(ev.eval_gen(&f(&mut pool, "(pred D (l ?x))"), &b).unwrap(), TV3::False);
        // → D x,y D x holds for every instance
        assert_eq!(
            ev.eval_gen(
                &f(&mut pool, "(imp (pred D (l ?x) (l ?y)) (pred D (l ?x)))"),
                &b
            )
            .unwrap(),
            TV3::True
        );
    }

    #[test]
    fn budget_exhaustion_is_unknown_not_false() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let ev = Evaluator::new(&m);
        let b = EvalBounds { list_size: 6, depth_budget: 10 };
        let v = ev
            .eval_gen(&f(&mut pool, "(imp (pred D (l ?x) (l ?y)) (pred D (l ?x)))"), &b)
            .unwrap();
        assert_eq!(v, TV3::Unknown);
    }

    #[test]
    fn de_morgan_bridge() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let ev = Evaluator::new(&m);
        let b = EvalBounds { list_size: 3, depth_budget: 1_000_000 };
        for body in [
            "(pred D (l ?x))",
            "(eq (l ?x) (l ?x))",
            "(not (pred D (l ?x)))",
            "(imp (pred D (l ?x)) (eq (l ?x) (l 1)))",
        ] {
            let ex = f(&mut pool, &format!("(ex ?x {body})"));
            let na = f(&mut pool, &format!("(not (all ?x (not {body})))"));
            assert_eq!(
                ev.eval_statement(&ex, &b).unwrap(),
                ev.eval_statement(&na, &b).unwrap(),
                "bridge fails for {body}"
            );
        }
    }

    #[test]
    fn raising_bounds_never_flips_a_definite_verdict() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let ev = Evaluator::new(&m);
        let formulas = [
            "(all ?x (eq (l ?x) (l ?x)))",
            "(all ?x (imp (pred D (l ?x) (l ?x)) (pred D (l ?x))))",
            "(ex ?x (pred D (l ?x)))",
            "(not (pred D (l 0)))",
        ];
        for t in formulas {
            let fx = f(&mut pool, t);
            let lo = ev
                .eval_statement(&fx, &EvalBounds { list_size: 3, depth_budget: 1_000_000 })
                .unwrap();
            let hi = ev
                .eval_statement(&fx, &EvalBounds { list_size: 5, depth_budget: 4_000_000 })
                .unwrap();
            match (lo, hi) {
                (TV3::True, TV3::False) | (TV3::False, TV3::True) => {
                    panic!("verdict flipped for {t}")
                }
                _ => {}
            }
        }
    }

    #[test]
    fn non_statement_is_rejected() {
        let mut pool = VarPool::new();
        let m = dual_math(&mut pool);
        let ev = Evaluator::new(&m);
        let open = f(&mut pool, "(pred D (l ?x))");
        assert!(ev.eval_statement(&open, &EvalBounds::default()).is_err());
    }
}
