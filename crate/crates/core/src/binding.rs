//! Variable analysis and substitution: `var`/`free` sets, list splicing,
//! the collision-freedom predicate `cf`, capture-free substitution `sbf`,
//! fresh renaming, generalization, formula degree and equivalence-class
//! descriptors for the connective-reduced fragment.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{Formula, ListExpr, PrimeFormula, Token, Variable};

/// A finite variable set with deterministic index-ordered iteration.
pub type VarSet = BTreeSet<Variable>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BindingError {
    #[error("substitution of {subst} for {var} collides in {formula}")]
    Collision { formula: String, var: String, subst: String },
    #[error("{0} occurs in the formula and is not fresh")]
    NotFresh(String),
    #[error("formula contains a connective outside the reduced fragment: {0}")]
    OutsideFragment(String),
}

/// All variables occurring anywhere in `f`, free or bound, in lists or
/// binders.
pub fn vars_of(f: &Formula) -> VarSet {
    let mut out = VarSet::new();
    collect_vars(f, &mut out);
    out
}

fn collect_vars(f: &Formula, out: &mut VarSet) {
    match f {
        Formula::Prime(p) => {
            for l in p.args() {
                out.extend(l.variables().cloned());
            }
        }
        Formula::Not(a) => collect_vars(a, out),
        Formula::Imp(a, b) | Formula::Iff(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            out.insert(v.clone());
            collect_vars(a, out);
        }
    }
}

/// The free variables of `f`; quantifiers bind.
pub fn free_of(f: &Formula) -> VarSet {
    match f {
        Formula::Prime(p) => {
            let mut out = VarSet::new();
            for l in p.args() {
                out.extend(l.variables().cloned());
            }
            out
        }
        Formula::Not(a) => free_of(a),
        Formula::Imp(a, b) | Formula::Iff(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            let mut out = free_of(a);
            out.extend(free_of(b));
            out
        }
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            let mut out = free_of(a);
            out.remove(v);
            out
        }
    }
}

/// Replaces every occurrence of `x` in `lam` by the token sequence `mu`.
pub fn subst_list(lam: &ListExpr, x: &Variable, mu: &ListExpr) -> ListExpr {
    let mut out = Vec::with_capacity(lam.len());
    for t in lam.tokens() {
        match t {
            Token::Var(v) if v == x => out.extend(mu.tokens().iter().cloned()),
            _ => out.push(t.clone()),
        }
    }
    ListExpr(out)
}

fn subst_prime(p: &PrimeFormula, x: &Variable, mu: &ListExpr) -> PrimeFormula {
    p.map_args(|l| subst_list(l, x, mu))
}

/// Collision freedom of substituting `mu` for `x` in `f`: prime formulas
/// are always collision-free; connectives descend; for a quantifier
/// `Q y F'` the substitution is free when `x` is not free in `Q y F'`,
/// and otherwise requires `y` not to occur in `mu` together with
/// collision freedom inside `F'`.
pub fn cf(f: &Formula, mu: &ListExpr, x: &Variable) -> bool {
    match f {
        Formula::Prime(_) => true,
        Formula::Not(a) => cf(a, mu, x),
        Formula::Imp(a, b) | Formula::Iff(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            cf(a, mu, x) && cf(b, mu, x)
        }
        Formula::Forall(y, a) | Formula::Exists(y, a) => {
            if !free_of(f).contains(x) {
                true
            } else {
                // x free below the binder, hence x != y.
                debug_assert!(x != y);
                mu.variables().all(|v| v != y) && cf(a, mu, x)
            }
        }
    }
}

/// Capture-free substitution of `mu` for `x` in `f`. Quantified
/// subformulas in which `x` is not free are returned unchanged.
pub fn sbf(f: &Formula, mu: &ListExpr, x: &Variable) -> Result<Formula, BindingError> {
    if !cf(f, mu, x) {
        return Err(BindingError::Collision {
            formula: f.to_string(),
            var: x.to_string(),
            subst: mu.to_string(),
        });
    }
    Ok(sbf_unchecked(f, mu, x))
}

/// `sbf` without re-verifying `cf`; callers must have established it.
pub fn sbf_unchecked(f: &Formula, mu: &ListExpr, x: &Variable) -> Formula {
    match f {
        Formula::Prime(p) => Formula::Prime(subst_prime(p, x, mu)),
        Formula::Not(a) => Formula::not(sbf_unchecked(a, mu, x)),
        Formula::Imp(a, b) => Formula::imp(sbf_unchecked(a, mu, x), sbf_unchecked(b, mu, x)),
        Formula::Iff(a, b) => Formula::iff(sbf_unchecked(a, mu, x), sbf_unchecked(b, mu, x)),
        Formula::And(a, b) => Formula::and(sbf_unchecked(a, mu, x), sbf_unchecked(b, mu, x)),
        Formula::Or(a, b) => Formula::or(sbf_unchecked(a, mu, x), sbf_unchecked(b, mu, x)),
        Formula::Forall(y, a) | Formula::Exists(y, a) => {
            if !free_of(f).contains(x) {
                f.clone()
            } else {
                let inner = sbf_unchecked(a, mu, x);
                match f {
                    Formula::Forall(..) => Formula::forall(y.clone(), inner),
                    _ => Formula::exists(y.clone(), inner),
                }
            }
        }
    }
}

/// Renames `x` to the fresh variable `z`; requires `z` not to occur in
/// `f` at all, which guarantees collision freedom.
pub fn rename_fresh(f: &Formula, x: &Variable, z: &Variable) -> Result<Formula, BindingError> {
    if vars_of(f).contains(z) {
        return Err(BindingError::NotFresh(z.to_string()));
    }
    let mu = ListExpr(vec![Token::Var(z.clone())]);
    debug_assert!(cf(f, &mu, x));
    Ok(sbf_unchecked(f, &mu, x))
}

/// Free variables in ascending index order.
pub fn free_list(f: &Formula) -> Vec<Variable> {
    free_of(f).into_iter().collect()
}

/// Universal closure over the index-ordered free variables; the identity
/// on statements.
pub fn gen(f: &Formula) -> Formula {
    let mut out = f.clone();
    for v in free_list(f).into_iter().rev() {
        out = Formula::forall(v, out);
    }
    out
}

/// Formula degree: 0 on primes, +1 for negation and quantifiers, max+1
/// for binary connectives.
pub fn deg(f: &Formula) -> usize {
    match f {
        Formula::Prime(_) => 0,
        Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => deg(a) + 1,
        Formula::Imp(a, b) | Formula::Iff(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            deg(a).max(deg(b)) + 1
        }
    }
}

/// Structural class descriptor over the reduced fragment (no `∃ ∨ & ↔`):
/// `P` for primes, `N` for negation, `I` for implication, `A` for the
/// universal quantifier. Binder names and prime content are irrelevant;
/// two fragment formulas get equal descriptors iff they are structurally
/// equivalent.
pub fn classify(f: &Formula) -> Result<String, BindingError> {
    let mut out = String::new();
    classify_into(f, &mut out)?;
    Ok(out)
}

fn classify_into(f: &Formula, out: &mut String) -> Result<(), BindingError> {
    match f {
        Formula::Prime(_) => {
            out.push('P');
            Ok(())
        }
        Formula::Not(a) => {
            out.push('N');
            classify_into(a, out)
        }
        Formula::Imp(a, b) => {
            out.push('I');
            classify_into(a, out)?;
            classify_into(b, out)
        }
        Formula::Forall(_, a) => {
            out.push('A');
            classify_into(a, out)
        }
        Formula::Iff(..) | Formula::And(..) | Formula::Or(..) | Formula::Exists(..) => {
            Err(BindingError::OutsideFragment(f.to_string()))
        }
    }
}

/// Renames every bound variable of `f` whose name clashes with `avoid`
/// to a fresh variable, taken from `fresh`. Free variables are left
/// untouched.
pub fn alpha_avoid(
    f: &Formula,
    avoid: &VarSet,
    fresh: &mut impl FnMut() -> Variable,
) -> Formula {
    match f {
        Formula::Prime(_) => f.clone(),
        Formula::Not(a) => Formula::not(alpha_avoid(a, avoid, fresh)),
        Formula::Imp(a, b) => {
            Formula::imp(alpha_avoid(a, avoid, fresh), alpha_avoid(b, avoid, fresh))
        }
        Formula::Iff(a, b) => {
            Formula::iff(alpha_avoid(a, avoid, fresh), alpha_avoid(b, avoid, fresh))
        }
        Formula::And(a, b) => {
            Formula::and(alpha_avoid(a, avoid, fresh), alpha_avoid(b, avoid, fresh))
        }
        Formula::Or(a, b) => {
            Formula::or(alpha_avoid(a, avoid, fresh), alpha_avoid(b, avoid, fresh))
        }
        Formula::Forall(y, a) | Formula::Exists(y, a) => {
            let body = alpha_avoid(a, avoid, fresh);
            let (y2, body) = if avoid.contains(y) {
                let z = fresh();
                let mu = ListExpr(vec![Token::Var(z.clone())]);
                (z, sbf_unchecked(&body, &mu, y))
            } else {
                (y.clone(), body)
            };
            match f {
                Formula::Forall(..) => Formula::forall(y2, body),
                _ => Formula::exists(y2, body),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_list, VarPool};

    fn setup(fs: &[&str]) -> (VarPool, Vec<Formula>) {
        let mut pool = VarPool::new();
        let parsed = fs.iter().map(|t| parse_formula(t, &mut pool).unwrap()).collect();
        (pool, parsed)
    }

    #[test]
    fn vars_of_counts_binders_and_lists() {
        let (p, fs) = setup(&["(all ?x (eq (l ?x) (l a)))"]);
        assert_eq!(vars_of(&fs[0]), [p.lookup("x").unwrap()].into_iter().collect());

        let (p, fs) = setup(&["(imp (pred D (l ?x) (l ?y)) (pred D (l ?x 0) (l ?y ?y)))"]);
        let want: VarSet = [p.lookup("x").unwrap(), p.lookup("y").unwrap()].into_iter().collect();
        assert_eq!(vars_of(&fs[0]), want);

        let (_, fs) = setup(&["(eq (l) (l))"]);
        assert!(vars_of(&fs[0]).is_empty());
    }

    #[test]
    fn free_of_respects_binding() {
        let (_, fs) = setup(&["(all ?x (eq (l ?x) (l a)))"]);
        assert!(free_of(&fs[0]).is_empty());

        let (p, fs) = setup(&["(imp (eq (l ?x) (l a)) (all ?x (eq (l ?x) (l a))))"]);
        assert_eq!(free_of(&fs[0]), [p.lookup("x").unwrap()].into_iter().collect());

        let (p, fs) = setup(&["(ex ?y (pred D (l ?x) (l ?y)))"]);
        assert_eq!(free_of(&fs[0]), [p.lookup("x").unwrap()].into_iter().collect());
    }

    #[test]
    fn subst_list_splices_sequences() {
        let mut pool = VarPool::new();
        let lam = parse_list("(l ?x 0)", &mut pool).unwrap();
        let x = pool.lookup("x").unwrap();
        let mu = parse_list("(l 1)", &mut pool).unwrap();
        assert_eq!(subst_list(&lam, &x, &mu).to_string(), "(l 1 0)");

        let lam = parse_list("(l a b)", &mut pool).unwrap();
        assert_eq!(subst_list(&lam, &x, &mu), lam);

        let lam = parse_list("(l ?x ?x)", &mut pool).unwrap();
        let mu = parse_list("(l a b)", &mut pool).unwrap();
        assert_eq!(subst_list(&lam, &x, &mu).to_string(), "(l a b a b)");
    }

    #[test]
    fn cf_forced_collision() {
        let mut pool = VarPool::new();
        let f = parse_formula("(all ?y (pred D (l ?x) (l ?y)))", &mut pool).unwrap();
        let x = pool.lookup("x").unwrap();
        let mu = parse_list("(l ?y)", &mut pool).unwrap();
        assert!(!cf(&f, &mu, &x));
    }

    #[test]
    fn cf_fresh_variable_always_free() {
        let mut pool = VarPool::new();
        let f = parse_formula("(all ?y (imp (pred D (l ?x)) (pred D (l ?x) (l ?y))))", &mut pool)
            .unwrap();
        let x = pool.lookup("x").unwrap();
        let z = pool.intern("z");
        let mu = ListExpr(vec![Token::Var(z)]);
        assert!(cf(&f, &mu, &x));
    }

    #[test]
    fn cf_prime_always_true() {
        let mut pool = VarPool::new();
        let f = parse_formula("(pred D (l ?x ?y))", &mut pool).unwrap();
        let x = pool.lookup("x").unwrap();
        let mu = parse_list("(l ?y ?y a)", &mut pool).unwrap();
        assert!(cf(&f, &mu, &x));
    }

    #[test]
    fn cf_bound_only_occurrence_is_free_for_any_mu() {
        let mut pool = VarPool::new();
        let f = parse_formula("(all ?x (eq (l ?x) (l a)))", &mut pool).unwrap();
        let x = pool.lookup("x").unwrap();
        let mu = parse_list("(l ?x b)", &mut pool).unwrap();
        assert!(cf(&f, &mu, &x));
        assert_eq!(sbf(&f, &mu, &x).unwrap(), f);
    }

    #[test]
    fn sbf_substitutes_free_occurrences_only() {
        let mut pool = VarPool::new();
        let f = parse_formula("(imp (pred D (l ?x)) (pred D (l ?x 0)))", &mut pool).unwrap();
        let x = pool.lookup("x").unwrap();
        let mu = parse_list("(l 1)", &mut pool).unwrap();
        assert_eq!(
            sbf(&f, &mu, &x).unwrap().to_string(),
            "(imp (pred D (l 1)) (pred D (l 1 0)))"
        );
    }

    #[test]
    fn sbf_round_trip_with_fresh_variable() {
        let mut pool = VarPool::new();
        let f = parse_formula(
            "(imp (eq (l ?x) (l ?x)) (all ?y (pred D (l ?x) (l ?y))))",
            &mut pool,
        )
        .unwrap();
        let x = pool.lookup("x").unwrap();
        let z = pool.intern("z");
        let renamed = rename_fresh(&f, &x, &z).unwrap();
        let back = rename_fresh(&renamed, &z, &x).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rename_fresh_rejects_used_variable() {
        let mut pool = VarPool::new();
        let f = parse_formula("(eq (l ?x ?z) (l a))", &mut pool).unwrap();
        let x = pool.lookup("x").unwrap();
        let z = pool.lookup("z").unwrap();
        assert!(rename_fresh(&f, &x, &z).is_err());
    }

    #[test]
    fn free_list_and_gen_follow_index_order() {
        let mut pool = VarPool::new();
        // Declare y before x so indices are y:0, x:1.
        pool.intern("y");
        pool.intern("x");
        let f = parse_formula("(imp (pred D (l ?x) (l ?y)) (pred D (l ?x)))", &mut pool).unwrap();
        let names: Vec<_> = free_list(&f).iter().map(|v| v.name().to_string()).collect();
        assert_eq!(names, vec!["y", "x"]);
        assert_eq!(
            gen(&f).to_string(),
            "(all ?y (all ?x (imp (pred D (l ?x) (l ?y)) (pred D (l ?x)))))"
        );
    }

    #[test]
    fn gen_is_identity_on_statements() {
        let (_, fs) = setup(&["(all ?x (eq (l ?x) (l ?x)))"]);
        assert_eq!(gen(&fs[0]), fs[0]);
    }

    #[test]
    fn deg_examples() {
        let (_, fs) = setup(&["(pred D (l 1))"]);
        assert_eq!(deg(&fs[0]), 0);
        let (_, fs) = setup(&["(not (not (pred D (l 1))))"]);
        assert_eq!(deg(&fs[0]), 2);
        let (_, fs) = setup(&["(imp (not (pred P)) (all ?x (pred P)))"]);
        assert_eq!(deg(&fs[0]), 2);
    }

    #[test]
    fn classify_descriptors() {
        let (_, fs) = setup(&[
            "(not (not (all ?x (imp (pred P) (pred P)))))",
            "(all ?x (imp (pred P) (pred P)))",
            "(pred D (l 1))",
            "(all ?x (eq (l ?x) (l a)))",
            "(all ?y (pred D (l ?z)))",
        ]);
        assert_eq!(classify(&fs[0]).unwrap(), "NNAIPP");
        assert_eq!(classify(&fs[1]).unwrap(), "AIPP");
        assert_eq!(classify(&fs[2]).unwrap(), "P");
        assert_eq!(classify(&fs[3]).unwrap(), "AP");
        assert_eq!(classify(&fs[4]).unwrap(), "AP");
    }

    #[test]
    fn classify_rejects_nonfragment() {
        let (_, fs) = setup(&["(and (pred P) (pred P))"]);
        assert!(classify(&fs[0]).is_err());
    }

    #[test]
    fn alpha_avoid_renames_clashing_binders() {
        let mut pool = VarPool::new();
        let f = parse_formula("(all ?x (imp (pred N0 (l ?x)) (eq (l ?x) (l 0))))", &mut pool)
            .unwrap();
        let avoid: VarSet = [pool.lookup("x").unwrap()].into_iter().collect();
        let mut mk = || pool.fresh("w");
        let g = alpha_avoid(&f, &avoid, &mut mk);
        assert_eq!(
            g.to_string(),
            "(all ?w (imp (pred N0 (l ?w)) (eq (l ?w) (l 0))))"
        );
        assert!(free_of(&g).is_empty());
    }
}
