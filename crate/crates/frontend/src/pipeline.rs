//! End-to-end constructions built from the corpus: the reversal-theorem
//! pipeline (constant extension, adjunction, two deductions,
//! generalization of the constants and a final induction), and the
//! arithmetic induction-principle pipeline.

use std::collections::{BTreeMap, BTreeSet};

use indukt_core::binding::{cf, sbf_unchecked, vars_of, VarSet};
use indukt_core::kernel::{
    check_proof, Justification, MathSystem, Proof, QuantAxiom,
};
use indukt_core::syntax::{Formula, ListExpr, PrimeFormula, Symbol, Token, Variable};
use indukt_core::transform::{deduction, generalize_constants, TransformError};

use crate::corpus::{self, CorpusError};
use crate::files::{parse_proof, FileError};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("stage `{0}`: {1}")]
    Stage(&'static str, String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

fn stage<T, E: std::fmt::Display>(
    name: &'static str,
    r: Result<T, E>,
) -> Result<T, PipelineError> {
    r.map_err(|e| PipelineError::Stage(name, e.to_string()))
}

fn stage_check(name: &'static str, m: &MathSystem, p: &Proof) -> Result<(), PipelineError> {
    let report = check_proof(m, p);
    if report.accepted {
        Ok(())
    } else {
        Err(PipelineError::Stage(name, report.to_string()))
    }
}

/// `G(λ) = & & W λ  W f(λ)  ∼ f(f(λ)), λ`.
fn g_of(lam: &[Token]) -> Formula {
    let w = |l: ListExpr| {
        Formula::Prime(PrimeFormula::Pred { name: Symbol::new("W"), args: vec![l] })
    };
    let wrap = |inner: &[Token]| {
        let mut t = vec![Token::Sym(Symbol::new("f")), Token::Sym(Symbol::new("("))];
        t.extend(inner.iter().cloned());
        t.push(Token::Sym(Symbol::new(")")));
        t
    };
    let plain = ListExpr(lam.to_vec());
    let f_lam = ListExpr(wrap(lam));
    let ff_lam = ListExpr(wrap(&wrap(lam)));
    Formula::and(
        Formula::and(w(plain.clone()), w(f_lam)),
        Formula::Prime(PrimeFormula::Eq(ff_lam, plain)),
    )
}

fn fresh_named(used: &mut VarSet, hint: &str) -> Variable {
    let mut name = hint.to_string();
    let mut n = 0usize;
    while used.iter().any(|v| v.name() == name) {
        name = format!("{hint}{n}");
        n += 1;
    }
    let idx = used.iter().map(|v| v.index()).max().map_or(0, |i| i + 1);
    let v = Variable::new(&name, idx);
    used.insert(v.clone());
    v
}

/// The variable named `name` from `used` when present, and a fresh one
/// otherwise. Used where a name may be shared with unrelated proof steps
/// but must stay clear of the given forbidden set.
fn named_avoiding(used: &mut VarSet, forbidden: &VarSet, name: &str) -> Variable {
    if let Some(v) = used.iter().find(|v| v.name() == name).cloned() {
        if !forbidden.contains(&v) {
            return v;
        }
    } else if forbidden.iter().all(|v| v.name() != name) {
        let idx = used.iter().map(|v| v.index()).max().map_or(0, |i| i + 1);
        let v = Variable::new(name, idx);
        used.insert(v.clone());
        return v;
    }
    fresh_named(used, name)
}

fn var_list(v: &Variable) -> ListExpr {
    ListExpr(vec![Token::Var(v.clone())])
}

/// A named intermediate proof of the pipeline, checked in its system.
pub struct PipelineProof {
    pub name: &'static str,
    pub system_label: &'static str,
    pub proof: Proof,
}

pub struct Pipeline33Output {
    pub stages: Vec<String>,
    pub proofs: Vec<PipelineProof>,
    /// The four target formulas, in order: `→ G(x) → G(y) G(xy)`,
    /// `→ W u G(u)`, `→ W x W f(x)`, `→ W x ∼f(f(x)),x`.
    pub targets: Vec<Formula>,
}

/// Runs the reversal development end to end: checks steps 1–53 in the
/// base system, steps 1–120 in the constant-extended system with the two
/// adjoined statements, discharges both statements by deduction,
/// generalizes the constants away and closes with the induction rule.
pub fn pipeline_3_3() -> Result<Pipeline33Output, PipelineError> {
    let mut stages = Vec::new();
    let add = |s: String, stages: &mut Vec<String>| stages.push(s);

    // Stage 1: base system and steps 1-53.
    let m = corpus::load_system("reverse.msys")?;
    let p53_text = corpus::read_file("reverse-1-53.mproof")?;
    let p53 = stage::<_, FileError>("parse-1-53", parse_proof(&p53_text, &m))?;
    stage_check("check-1-53", &m, &p53)?;
    add(format!("check-1-53: accepted ({} steps)", p53.steps.len()), &mut stages);

    // Stage 2: extend with the constants and adjoin G(c), G(d).
    let c = Symbol::new("c");
    let d = Symbol::new("d");
    let consts: BTreeSet<Symbol> = [c.clone(), d.clone()].into_iter().collect();
    let m_ext = stage("extend-alphabet", m.extend_alphabet(&consts))?;
    let g_c = g_of(&[Token::Sym(c.clone())]);
    let g_d = g_of(&[Token::Sym(d.clone())]);
    let m2 = stage("adjoin-phi1", m_ext.adjoin("phi1", &g_c))?;
    let m2 = stage("adjoin-phi2", m2.adjoin("phi2", &g_d))?;
    add("extend+adjoin: alphabet {c d}, statements phi1 phi2".into(), &mut stages);

    // Stage 3: steps 1-120 in the extended system.
    let p120_text = corpus::read_file("reverse-1-120.mproof")?;
    let p120 = stage::<_, FileError>("parse-54-120", parse_proof(&p120_text, &m2))?;
    stage_check("check-54-120", &m2, &p120)?;
    add(format!("check-54-120: accepted ({} steps)", p120.steps.len()), &mut stages);

    // Stage 4: discharge phi2, then phi1.
    let (m1, t1) = stage::<_, TransformError>("deduce-phi2", deduction(&m2, "phi2", &p120))?;
    stage_check("recheck-deduce-phi2", &m1, &t1.output)?;
    add(format!("deduce-phi2: {} steps", t1.output.steps.len()), &mut stages);
    let (m0, t2) = stage::<_, TransformError>("deduce-phi1", deduction(&m1, "phi1", &t1.output))?;
    stage_check("recheck-deduce-phi1", &m0, &t2.output)?;
    add(format!("deduce-phi1: {} steps", t2.output.steps.len()), &mut stages);

    // Stage 5: generalize the constants to fresh variables.
    let mut used: VarSet = VarSet::new();
    for (f, _) in &t2.output.steps {
        used.extend(vars_of(f));
    }
    for v in m.pool.iter() {
        used.insert(v.clone());
    }
    let vp = fresh_named(&mut used, "p");
    let vq = fresh_named(&mut used, "q");
    let map: BTreeMap<Symbol, Variable> =
        [(c.clone(), vp.clone()), (d.clone(), vq.clone())].into();
    let gen_proof =
        stage::<_, TransformError>("genconst", generalize_constants(&m, &map, &t2.output))?;
    add(format!("genconst: {} steps, constants {{c d}} -> {vp} {vq}", gen_proof.steps.len()), &mut stages);

    // Stage 6: assemble the final proof in the original system.
    let x = m.pool.lookup("x").expect("system variable x");
    let y = m.pool.lookup("y").expect("system variable y");
    let u = named_avoiding(&mut used, &m.rsys.basis_vars(), "u");

    let mut steps = p53.steps.clone();
    let g_a_idx = 48; // G(a)
    let g_b_idx = 52; // G(b)
    let offset = steps.len();
    for (f, j) in &gen_proof.steps {
        let nj = match j {
            Justification::Mp(i, k) => Justification::Mp(i + offset, k + offset),
            Justification::Subst(i, v, lam) => {
                Justification::Subst(i + offset, v.clone(), lam.clone())
            }
            Justification::Gen(v, i) => Justification::Gen(v.clone(), i + offset),
            Justification::Induct { pred, arity, vars, formula, obligations } => {
                Justification::Induct {
                    pred: pred.clone(),
                    arity: *arity,
                    vars: vars.clone(),
                    formula: formula.clone(),
                    obligations: obligations.iter().map(|(a, s)| (*a, s + offset)).collect(),
                }
            }
            other => other.clone(),
        };
        steps.push((f.clone(), nj));
    }
    let gpq_idx = steps.len() - 1; // → G(p) → G(q) G(pq)

    let g_x = g_of(&[Token::Var(x.clone())]);
    let g_y = g_of(&[Token::Var(y.clone())]);
    let g_xy = g_of(&[Token::Var(x.clone()), Token::Var(y.clone())]);
    let g_q = g_of(&[Token::Var(vq.clone())]);
    let g_xq = g_of(&[Token::Var(x.clone()), Token::Var(vq.clone())]);

    // → G(x) → G(q) G(xq), then → G(x) → G(y) G(xy)
    steps.push((
        Formula::imp(g_x.clone(), Formula::imp(g_q, g_xq)),
        Justification::Subst(gpq_idx, vp.clone(), var_list(&x)),
    ));
    let mid = steps.len() - 1;
    let g_chain = Formula::imp(g_x.clone(), Formula::imp(g_y.clone(), g_xy.clone()));
    steps.push((g_chain.clone(), Justification::Subst(mid, vq.clone(), var_list(&y))));
    let gxy_idx = steps.len() - 1;

    // the induction over W
    let g_u = g_of(&[Token::Var(u.clone())]);
    let ind_formula = Formula::imp(
        Formula::Prime(PrimeFormula::Pred { name: Symbol::new("W"), args: vec![var_list(&u)] }),
        g_u.clone(),
    );
    steps.push((
        ind_formula.clone(),
        Justification::Induct {
            pred: Symbol::new("W"),
            arity: 1,
            vars: vec![u.clone()],
            formula: g_u,
            obligations: vec![(0, g_a_idx), (1, g_b_idx), (2, gxy_idx)],
        },
    ));
    let ind_idx = steps.len() - 1;

    // → W x G(x)
    let w_of = |l: ListExpr| {
        Formula::Prime(PrimeFormula::Pred { name: Symbol::new("W"), args: vec![l] })
    };
    let wx = w_of(var_list(&x));
    let wx_gx = Formula::imp(wx.clone(), g_x.clone());
    steps.push((wx_gx.clone(), Justification::Subst(ind_idx, u.clone(), var_list(&x))));
    let wx_gx_idx = steps.len() - 1;

    // extract → W x W f(x) and → W x ∼f(f(x)),x
    let fx = ListExpr(vec![
        Token::Sym(Symbol::new("f")),
        Token::Sym(Symbol::new("(")),
        Token::Var(x.clone()),
        Token::Sym(Symbol::new(")")),
    ]);
    let ffx = ListExpr(vec![
        Token::Sym(Symbol::new("f")),
        Token::Sym(Symbol::new("(")),
        Token::Sym(Symbol::new("f")),
        Token::Sym(Symbol::new("(")),
        Token::Var(x.clone()),
        Token::Sym(Symbol::new(")")),
        Token::Sym(Symbol::new(")")),
    ]);
    let extract = |target: Formula, steps: &mut Vec<(Formula, Justification)>| {
        let t1 = Formula::imp(g_x.clone(), target.clone());
        steps.push((t1.clone(), Justification::AxTaut));
        let t1_idx = steps.len() - 1;
        let chain = Formula::imp(
            wx_gx.clone(),
            Formula::imp(t1, Formula::imp(wx.clone(), target.clone())),
        );
        steps.push((chain, Justification::AxTaut));
        let chain_idx = steps.len() - 1;
        steps.push((
            Formula::imp(Formula::imp(g_x.clone(), target.clone()), Formula::imp(wx.clone(), target.clone())),
            Justification::Mp(wx_gx_idx, chain_idx),
        ));
        let m_idx = steps.len() - 1;
        steps.push((Formula::imp(wx.clone(), target), Justification::Mp(t1_idx, m_idx)));
        steps.len() - 1
    };
    let wfx_target = w_of(fx);
    extract(wfx_target.clone(), &mut steps);
    let wfx_formula = Formula::imp(wx.clone(), wfx_target);
    let eq_target = Formula::Prime(PrimeFormula::Eq(ffx, var_list(&x)));
    extract(eq_target.clone(), &mut steps);
    let eq_formula = Formula::imp(wx.clone(), eq_target);

    let final_proof = Proof { steps };
    stage_check("final-check", &m, &final_proof)?;
    add(format!("final-check: accepted ({} steps)", final_proof.steps.len()), &mut stages);

    Ok(Pipeline33Output {
        stages,
        proofs: vec![
            PipelineProof { name: "deduced-phi2", system_label: "reverse+phi1", proof: t1.output },
            PipelineProof { name: "deduced-phi1", system_label: "reverse+cd", proof: t2.output },
            PipelineProof { name: "generalized", system_label: "reverse", proof: gen_proof },
            PipelineProof { name: "final", system_label: "reverse", proof: final_proof },
        ],
        targets: vec![g_chain, ind_formula, wfx_formula, eq_formula],
    })
}

/// The induction-principle construction: adjoins the induction hypothesis
/// for `h` (free variable `x`), derives `∀x → N₀x h` from it with one
/// application of the induction rule, and discharges the hypothesis,
/// yielding a kernel proof of `→ φ ∀x → N₀x h` in the unextended system.
pub fn pa_induction_pipeline(
    m: &MathSystem,
    h: &Formula,
    x: &Variable,
) -> Result<(MathSystem, Proof, Formula), PipelineError> {
    let free = indukt_core::binding::free_of(h);
    if free.len() != 1 || !free.contains(x) {
        return Err(PipelineError::Stage(
            "setup",
            format!("expected {x} to be the only free variable of {h}"),
        ));
    }
    let n0 = |l: ListExpr| {
        Formula::Prime(PrimeFormula::Pred { name: Symbol::new("N0"), args: vec![l] })
    };
    let zero = ListExpr(vec![Token::Sym(Symbol::new("0"))]);
    let s_of = |inner: &ListExpr| {
        let mut t = vec![Token::Sym(Symbol::new("s")), Token::Sym(Symbol::new("("))];
        t.extend(inner.tokens().iter().cloned());
        t.push(Token::Sym(Symbol::new(")")));
        ListExpr(t)
    };

    let mut used: VarSet = vars_of(h);
    for v in m.pool.iter() {
        used.insert(v.clone());
    }
    used.extend(m.rsys.basis_vars());
    let z = fresh_named(&mut used, "z");
    let u = fresh_named(&mut used, "w");

    let subst_h = |lam: &ListExpr| -> Result<Formula, PipelineError> {
        if !cf(h, lam, x) {
            return Err(PipelineError::Stage("setup", format!("collision substituting {lam}")));
        }
        Ok(sbf_unchecked(h, lam, x))
    };
    let h0 = subst_h(&zero)?;
    let hz = subst_h(&var_list(&z))?;
    let hsz = subst_h(&s_of(&var_list(&z)))?;
    let hsx = subst_h(&s_of(&var_list(x)))?;
    let hu = subst_h(&var_list(&u))?;

    let body_z = Formula::imp(
        n0(var_list(&z)),
        Formula::and(h0.clone(), Formula::imp(hz, hsz)),
    );
    let phi = Formula::forall(z.clone(), body_z.clone());
    let m_phi = stage("adjoin", m.adjoin("ind-hyp", &phi))?;
    let phi_stored = m_phi.adjoined_lookup("ind-hyp").unwrap().clone();
    if phi_stored != phi {
        return Err(PipelineError::Stage("adjoin", "hypothesis was renamed unexpectedly".into()));
    }

    let body_0 = sbf_unchecked(&body_z, &zero, &z);
    let body_x = sbf_unchecked(&body_z, &var_list(x), &z);
    let n0_0 = n0(zero.clone());
    let n0_x = n0(var_list(x));
    let n0_sx = n0(s_of(&var_list(x)));
    let g_tilde = Formula::and(n0(var_list(&u)), hu);
    let g_0 = Formula::and(n0_0.clone(), h0.clone());
    let g_x = Formula::and(n0_x.clone(), h.clone());
    let g_sx = Formula::and(n0_sx.clone(), hsx.clone());

    use Justification::*;
    let mut steps: Vec<(Formula, Justification)> = Vec::new();
    let push = |steps: &mut Vec<(Formula, Justification)>, f: Formula, j: Justification| {
        steps.push((f, j));
        steps.len() - 1
    };

    let s_phi = push(&mut steps, phi.clone(), AxAdjoined("ind-hyp".into()));
    let s_qa = push(
        &mut steps,
        Formula::imp(phi.clone(), body_z.clone()),
        AxQuant(QuantAxiom::A),
    );
    let s_body = push(&mut steps, body_z.clone(), Mp(s_phi, s_qa));
    let s_body0 = push(&mut steps, body_0.clone(), Subst(s_body, z.clone(), zero.clone()));
    let s_bodyx = push(&mut steps, body_x.clone(), Subst(s_body, z.clone(), var_list(x)));
    let s_t0 = push(
        &mut steps,
        Formula::imp(body_0.clone(), Formula::imp(n0_0.clone(), h0.clone())),
        AxTaut,
    );
    let s_n0h0 = push(&mut steps, Formula::imp(n0_0.clone(), h0.clone()), Mp(s_body0, s_t0));
    let s_n00 = push(&mut steps, n0_0.clone(), AxBasis(0));
    let s_h0 = push(&mut steps, h0.clone(), Mp(s_n00, s_n0h0));
    let s_t1 = push(
        &mut steps,
        Formula::imp(n0_0.clone(), Formula::imp(h0.clone(), g_0.clone())),
        AxTaut,
    );
    let s_m1 = push(&mut steps, Formula::imp(h0.clone(), g_0.clone()), Mp(s_n00, s_t1));
    let s_g0 = push(&mut steps, g_0.clone(), Mp(s_h0, s_m1));
    let succ_axiom = Formula::imp(n0_x.clone(), n0_sx.clone());
    let s_succ = push(&mut steps, succ_axiom.clone(), AxBasis(1));
    let oblig2 = Formula::imp(g_x.clone(), g_sx.clone());
    let s_t2 = push(
        &mut steps,
        Formula::imp(body_x.clone(), Formula::imp(succ_axiom.clone(), oblig2.clone())),
        AxTaut,
    );
    let s_m2 = push(&mut steps, Formula::imp(succ_axiom, oblig2.clone()), Mp(s_bodyx, s_t2));
    let s_oblig2 = push(&mut steps, oblig2, Mp(s_succ, s_m2));
    let ind_concl = Formula::imp(n0(var_list(&u)), g_tilde.clone());
    let s_ind = push(
        &mut steps,
        ind_concl.clone(),
        Induct {
            pred: Symbol::new("N0"),
            arity: 1,
            vars: vec![u.clone()],
            formula: g_tilde.clone(),
            obligations: vec![(0, s_g0), (1, s_oblig2)],
        },
    );
    let weak = Formula::imp(ind_concl, Formula::imp(n0(var_list(&u)), subst_h(&var_list(&u))?));
    let s_t3 = push(&mut steps, weak, AxTaut);
    let s_nu = push(
        &mut steps,
        Formula::imp(n0(var_list(&u)), subst_h(&var_list(&u))?),
        Mp(s_ind, s_t3),
    );
    let s_nx = push(
        &mut steps,
        Formula::imp(n0_x.clone(), h.clone()),
        Subst(s_nu, u.clone(), var_list(x)),
    );
    let goal = Formula::forall(x.clone(), Formula::imp(n0_x, h.clone()));
    let _s_goal = push(&mut steps, goal.clone(), Gen(x.clone(), s_nx));

    let proof = Proof { steps };
    stage_check("check-under-hypothesis", &m_phi, &proof)?;

    let (m_out, trace) =
        stage::<_, TransformError>("deduce", deduction(&m_phi, "ind-hyp", &proof))?;
    stage_check("final-check", &m_out, &trace.output)?;
    let final_formula = Formula::imp(phi, goal);
    if trace.output.conclusion() != Some(&final_formula) {
        return Err(PipelineError::Stage("final-check", "unexpected conclusion".into()));
    }
    Ok((m_out, trace.output, final_formula))
}
