//! Readers and writers for the on-disk formats: system files (`.msys`),
//! proof files (`.mproof`) and R-derivation files (`.rproof`).
//!
//! System files:
//!
//! ```text
//! (system
//!   (alphabet TOK*)
//!   (predicates (p NAME ARITY)*)
//!   (rbasis RFORM*)
//!   (basis FORMULA*)                 ; optional, defaults to the rbasis
//!   (adjoined (adj NAME FORMULA)*)   ; optional
//!   (lang (alt ITEM*)*)              ; ITEM: token | S | VAR | ( | )
//!   (hooks NAME*))                   ; optional
//! ```
//!
//! Proof files use 1-based step numbers; justifications are
//! `(ax-taut)`, `(ax-eq)`, `(ax-quant a|b|c)`, `(ax-basis I)`,
//! `(ax-adjoined NAME)`, `(ax-schema NAME)`, `(mp I J)`,
//! `(subst I ?x LIST)`, `(gen ?x I)` and
//! `(induct PRED ARITY (?x*) FORMULA (oblig (AXIOM STEP)*))`.
//! R-derivation files use `(axiom I)`, `(axiom eq)`, `(mp I J)` and
//! `(subst I ?x LIST)`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use indukt_core::kernel::{Justification, KernelError, MathSystem, Proof, QuantAxiom, HOOK_PA_IS};
use indukt_core::langset::{GItem, LGrammar};
use indukt_core::rsys::{RDerivation, RJustification, RecursiveSystem};
use indukt_core::syntax::{lex, Formula, ParseError, Parser, RFormula, Symbol, VarPool};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Kernel(#[from] KernelError),
    #[error("missing `({0} ...)` section")]
    MissingSection(&'static str),
    #[error("duplicate `({0} ...)` section")]
    DuplicateSection(String),
    #[error("unknown section `({0} ...)`")]
    UnknownSection(String),
    #[error("unknown hook `{0}`")]
    UnknownHook(String),
    #[error("step numbers must be sequential from 1; found {0}")]
    BadStepNumber(usize),
    #[error("step index {0} out of range")]
    BadStepIndex(usize),
    #[error("unknown justification `{0}`")]
    UnknownJustification(String),
    #[error("the list language must contain the variables (no direct VAR alternative)")]
    LanguageNotClosed,
}

fn parse_grammar_alt(p: &mut Parser) -> Result<Vec<GItem>, ParseError> {
    // Inside an (alt ...) form parentheses are grammar items, read
    // positionally exactly like list tokens.
    p.expect("(")?;
    p.expect("alt")?;
    let mut items = Vec::new();
    let mut depth = 0usize;
    loop {
        let t = p.next_tok()?;
        match t {
            "(" => {
                depth += 1;
                items.push(GItem::Sym(Symbol::new(t)));
            }
            ")" => {
                if depth == 0 {
                    break;
                }
                depth -= 1;
                items.push(GItem::Sym(Symbol::new(t)));
            }
            "S" => items.push(GItem::SRef),
            "VAR" => items.push(GItem::VarSlot),
            _ => items.push(GItem::Sym(Symbol::new(t))),
        }
    }
    Ok(items)
}

/// Parses and validates a system file.
pub fn parse_system(text: &str) -> Result<MathSystem, FileError> {
    let toks = lex(text);
    let mut pool = VarPool::new();
    let mut p = Parser::new(&toks, &mut pool);
    p.expect("(")?;
    p.expect("system")?;

    let mut alphabet: Option<BTreeSet<Symbol>> = None;
    let mut predicates: Option<BTreeSet<(Symbol, usize)>> = None;
    let mut rbasis: Option<Vec<RFormula>> = None;
    let mut basis: Option<Vec<Formula>> = None;
    let mut adjoined: Vec<(String, Formula)> = Vec::new();
    let mut lang: Option<LGrammar> = None;
    let mut hooks: BTreeSet<String> = BTreeSet::new();

    while p.peek() == Some("(") {
        p.expect("(")?;
        let section = p.next_tok()?.to_string();
        let dup = |name: &str| FileError::DuplicateSection(name.to_string());
        match section.as_str() {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(dup("alphabet"));
                }
                let mut set = BTreeSet::new();
                while p.peek() != Some(")") {
                    set.insert(Symbol::new(p.next_tok()?));
                }
                p.expect(")")?;
                alphabet = Some(set);
            }
            "predicates" => {
                if predicates.is_some() {
                    return Err(dup("predicates"));
                }
                let mut set = BTreeSet::new();
                while p.peek() != Some(")") {
                    p.expect("(")?;
                    p.expect("p")?;
                    let name = Symbol::new(p.next_tok()?);
                    let arity: usize = p
                        .next_tok()?
                        .parse()
                        .map_err(|_| ParseError::UnknownForm("arity".into()))?;
                    p.expect(")")?;
                    set.insert((name, arity));
                }
                p.expect(")")?;
                predicates = Some(set);
            }
            "rbasis" => {
                if rbasis.is_some() {
                    return Err(dup("rbasis"));
                }
                let mut axs = Vec::new();
                while p.peek() != Some(")") {
                    axs.push(p.parse_rformula()?);
                }
                p.expect(")")?;
                rbasis = Some(axs);
            }
            "basis" => {
                if basis.is_some() {
                    return Err(dup("basis"));
                }
                let mut fs = Vec::new();
                while p.peek() != Some(")") {
                    fs.push(p.parse_formula()?);
                }
                p.expect(")")?;
                basis = Some(fs);
            }
            "adjoined" => {
                while p.peek() != Some(")") {
                    p.expect("(")?;
                    p.expect("adj")?;
                    let name = p.next_tok()?.to_string();
                    let phi = p.parse_formula()?;
                    p.expect(")")?;
                    adjoined.push((name, phi));
                }
                p.expect(")")?;
            }
            "lang" => {
                if lang.is_some() {
                    return Err(dup("lang"));
                }
                let mut alts = Vec::new();
                while p.peek() != Some(")") {
                    alts.push(parse_grammar_alt(&mut p)?);
                }
                p.expect(")")?;
                lang = Some(LGrammar::new(alts));
            }
            "hooks" => {
                while p.peek() != Some(")") {
                    let h = p.next_tok()?.to_string();
                    if h != HOOK_PA_IS {
                        return Err(FileError::UnknownHook(h));
                    }
                    hooks.insert(h);
                }
                p.expect(")")?;
            }
            other => return Err(FileError::UnknownSection(other.to_string())),
        }
    }
    p.expect(")")?;

    let alphabet = alphabet.ok_or(FileError::MissingSection("alphabet"))?;
    let predicates = predicates.unwrap_or_default();
    let rbasis = rbasis.ok_or(FileError::MissingSection("rbasis"))?;
    let lang = lang.ok_or(FileError::MissingSection("lang"))?;

    if !lang
        .alternatives
        .iter()
        .any(|a| a.len() == 1 && matches!(a[0], GItem::VarSlot))
    {
        return Err(FileError::LanguageNotClosed);
    }

    let rsys = RecursiveSystem::new(alphabet, predicates, rbasis);
    let mut sys = MathSystem::new(rsys, basis, lang, hooks, pool)?;
    for (name, phi) in adjoined {
        sys = sys.adjoin(&name, &phi)?;
    }
    Ok(sys)
}

fn step_index(tok: &str, current: usize) -> Result<usize, FileError> {
    let n: usize = tok
        .parse()
        .map_err(|_| FileError::UnknownJustification(tok.to_string()))?;
    if n == 0 || n > current {
        return Err(FileError::BadStepIndex(n));
    }
    Ok(n - 1)
}

/// Parses a proof file against a system; the system's variable pool seeds
/// the parse so variable indices agree with the system's formulas.
pub fn parse_proof(text: &str, sys: &MathSystem) -> Result<Proof, FileError> {
    let toks = lex(text);
    let mut pool = sys.pool.clone();
    let mut p = Parser::new(&toks, &mut pool);
    p.expect("(")?;
    p.expect("proof")?;
    let mut steps: Vec<(Formula, Justification)> = Vec::new();
    while p.peek() == Some("(") {
        p.expect("(")?;
        p.expect("step")?;
        let num: usize = p
            .next_tok()?
            .parse()
            .map_err(|_| FileError::BadStepNumber(0))?;
        if num != steps.len() + 1 {
            return Err(FileError::BadStepNumber(num));
        }
        let formula = p.parse_formula()?;
        p.expect("(")?;
        let tag = p.next_tok()?.to_string();
        let just = match tag.as_str() {
            "ax-taut" => Justification::AxTaut,
            "ax-eq" => Justification::AxEq,
            "ax-quant" => {
                let k = match p.next_tok()? {
                    "a" => QuantAxiom::A,
                    "b" => QuantAxiom::B,
                    "c" => QuantAxiom::C,
                    other => return Err(FileError::UnknownJustification(other.to_string())),
                };
                Justification::AxQuant(k)
            }
            "ax-basis" => {
                let i: usize = p
                    .next_tok()?
                    .parse()
                    .map_err(|_| FileError::UnknownJustification(tag.clone()))?;
                if i == 0 {
                    return Err(FileError::BadStepIndex(0));
                }
                Justification::AxBasis(i - 1)
            }
            "ax-adjoined" => Justification::AxAdjoined(p.next_tok()?.to_string()),
            "ax-schema" => Justification::AxSchema(p.next_tok()?.to_string()),
            "mp" => {
                let i = step_index(p.next_tok()?, steps.len())?;
                let j = step_index(p.next_tok()?, steps.len())?;
                Justification::Mp(i, j)
            }
            "subst" => {
                let i = step_index(p.next_tok()?, steps.len())?;
                let x = p.expect_var()?;
                let lam = p.parse_list()?;
                Justification::Subst(i, x, lam)
            }
            "gen" => {
                let x = p.expect_var()?;
                let i = step_index(p.next_tok()?, steps.len())?;
                Justification::Gen(x, i)
            }
            "induct" => {
                let pred = Symbol::new(p.next_tok()?);
                let arity: usize = p
                    .next_tok()?
                    .parse()
                    .map_err(|_| FileError::UnknownJustification(tag.clone()))?;
                p.expect("(")?;
                let mut vars = Vec::new();
                while p.peek() != Some(")") {
                    vars.push(p.expect_var()?);
                }
                p.expect(")")?;
                let g = p.parse_formula()?;
                p.expect("(")?;
                p.expect("oblig")?;
                let mut obligations = Vec::new();
                while p.peek() != Some(")") {
                    p.expect("(")?;
                    let axiom: usize = p
                        .next_tok()?
                        .parse()
                        .map_err(|_| FileError::UnknownJustification(tag.clone()))?;
                    let step = step_index(p.next_tok()?, steps.len())?;
                    p.expect(")")?;
                    if axiom == 0 {
                        return Err(FileError::BadStepIndex(0));
                    }
                    obligations.push((axiom - 1, step));
                }
                p.expect(")")?;
                Justification::Induct { pred, arity, vars, formula: g, obligations }
            }
            other => return Err(FileError::UnknownJustification(other.to_string())),
        };
        p.expect(")")?; // close justification
        p.expect(")")?; // close step
        steps.push((formula, just));
    }
    p.expect(")")?;
    Ok(Proof { steps })
}

/// Parses an R-derivation file against a system.
pub fn parse_rderivation(text: &str, sys: &MathSystem) -> Result<RDerivation, FileError> {
    let toks = lex(text);
    let mut pool = sys.pool.clone();
    let mut p = Parser::new(&toks, &mut pool);
    p.expect("(")?;
    p.expect("rproof")?;
    let mut steps: Vec<(RFormula, RJustification)> = Vec::new();
    while p.peek() == Some("(") {
        p.expect("(")?;
        p.expect("step")?;
        let num: usize = p
            .next_tok()?
            .parse()
            .map_err(|_| FileError::BadStepNumber(0))?;
        if num != steps.len() + 1 {
            return Err(FileError::BadStepNumber(num));
        }
        let rf = p.parse_rformula()?;
        p.expect("(")?;
        let tag = p.next_tok()?.to_string();
        let just = match tag.as_str() {
            "axiom" => match p.next_tok()? {
                "eq" => RJustification::Equality,
                n => {
                    let i: usize =
                        n.parse().map_err(|_| FileError::UnknownJustification(n.to_string()))?;
                    if i == 0 {
                        return Err(FileError::BadStepIndex(0));
                    }
                    RJustification::Basis(i - 1)
                }
            },
            "mp" => {
                let i = step_index(p.next_tok()?, steps.len())?;
                let j = step_index(p.next_tok()?, steps.len())?;
                RJustification::Mp(i, j)
            }
            "subst" => {
                let i = step_index(p.next_tok()?, steps.len())?;
                let x = p.expect_var()?;
                let lam = p.parse_list()?;
                RJustification::Subst(i, x, lam)
            }
            other => return Err(FileError::UnknownJustification(other.to_string())),
        };
        p.expect(")")?;
        p.expect(")")?;
        steps.push((rf, just));
    }
    p.expect(")")?;
    Ok(RDerivation { steps })
}

/// Canonical text of a proof, inverse of [`parse_proof`].
pub fn print_proof(proof: &Proof) -> String {
    let mut out = String::from("(proof\n");
    for (k, (f, just)) in proof.steps.iter().enumerate() {
        let j = match just {
            Justification::AxTaut => "(ax-taut)".to_string(),
            Justification::AxEq => "(ax-eq)".to_string(),
            Justification::AxQuant(k) => format!("(ax-quant {k})"),
            Justification::AxBasis(i) => format!("(ax-basis {})", i + 1),
            Justification::AxAdjoined(n) => format!("(ax-adjoined {n})"),
            Justification::AxSchema(n) => format!("(ax-schema {n})"),
            Justification::Mp(i, j) => format!("(mp {} {})", i + 1, j + 1),
            Justification::Subst(i, x, lam) => format!("(subst {} {x} {lam})", i + 1),
            Justification::Gen(x, i) => format!("(gen {x} {})", i + 1),
            Justification::Induct { pred, arity, vars, formula, obligations } => {
                let vs: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
                let obs: Vec<String> = obligations
                    .iter()
                    .map(|(a, s)| format!("({} {})", a + 1, s + 1))
                    .collect();
                format!(
                    "(induct {pred} {arity} ({}) {formula} (oblig {}))",
                    vs.join(" "),
                    obs.join(" ")
                )
            }
        };
        let _ = writeln!(out, "  (step {} {} {})", k + 1, f, j);
    }
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use indukt_core::kernel::check_proof;

    const MINI_SYS: &str = "(system
      (alphabet a 0 1)
      (predicates (p D 1) (p D 2))
      (rbasis
        (horn () (pred D (l 1)))
        (horn ((pred D (l ?x))) (pred D (l ?x 0))))
      (lang (alt VAR) (alt 0) (alt 1) (alt a) (alt S S)))";

    #[test]
    fn parse_system_roundtrips_basics() {
        let sys = parse_system(MINI_SYS).unwrap();
        assert_eq!(sys.rsys.basis.len(), 2);
        assert_eq!(sys.basis.len(), 2);
        assert!(sys.plain_regime());
        assert_eq!(sys.rsys.predicates.len(), 2);
    }

    #[test]
    fn parse_proof_and_print_roundtrip() {
        let sys = parse_system(MINI_SYS).unwrap();
        let text = "(proof
          (step 1 (pred D (l 1)) (ax-basis 1))
          (step 2 (imp (pred D (l ?x)) (pred D (l ?x 0))) (ax-basis 2))
          (step 3 (imp (pred D (l 1)) (pred D (l 1 0))) (subst 2 ?x (l 1)))
          (step 4 (pred D (l 1 0)) (mp 1 3)))";
        let proof = parse_proof(text, &sys).unwrap();
        assert!(check_proof(&sys, &proof).accepted);
        let printed = print_proof(&proof);
        let again = parse_proof(&printed, &sys).unwrap();
        assert_eq!(print_proof(&again), printed);
    }

    #[test]
    fn bad_step_numbering_rejected() {
        let sys = parse_system(MINI_SYS).unwrap();
        let text = "(proof (step 2 (pred D (l 1)) (ax-basis 1)))";
        assert!(matches!(parse_proof(text, &sys), Err(FileError::BadStepNumber(2))));
    }

    #[test]
    fn missing_var_alternative_rejected() {
        let bad = "(system (alphabet a) (predicates) (rbasis) (lang (alt a)))";
        assert!(matches!(parse_system(bad), Err(FileError::LanguageNotClosed)));
    }
}
