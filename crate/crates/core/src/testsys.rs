//! Shared system builders for unit tests.

use crate::langset::{GItem, LGrammar};
use crate::rsys::RecursiveSystem;
use crate::syntax::{parse_rformula, RFormula, Symbol, VarPool};

fn sym(s: &str) -> GItem {
    GItem::Sym(Symbol::new(s))
}

/// Dual-representation system: alphabet {a,0,1}, predicate D used 1-ary
/// and 2-ary, six basis axioms; lists are closed under concatenation.
pub fn dual_system(pool: &mut VarPool) -> (RecursiveSystem, LGrammar) {
    let basis: Vec<RFormula> = [
        "(horn () (pred D (l 1)))",
        "(horn ((pred D (l ?x))) (pred D (l ?x 0)))",
        "(horn ((pred D (l ?x))) (pred D (l ?x 1)))",
        "(horn () (pred D (l 1) (l a)))",
        "(horn ((pred D (l ?x) (l ?y))) (pred D (l ?x 0) (l ?y ?y)))",
        "(horn ((pred D (l ?x) (l ?y))) (pred D (l ?x 1) (l ?y ?y a)))",
    ]
    .iter()
    .map(|t| parse_rformula(t, pool).unwrap())
    .collect();
    let sys = RecursiveSystem::new(
        ["a", "0", "1"].iter().map(|s| Symbol::new(s)).collect(),
        [(Symbol::new("D"), 1), (Symbol::new("D"), 2)].into_iter().collect(),
        basis,
    );
    let lang = LGrammar::new(vec![
        vec![GItem::VarSlot],
        vec![sym("0")],
        vec![sym("1")],
        vec![sym("a")],
        vec![GItem::SRef, GItem::SRef],
    ]);
    (sys, lang)
}

/// Word-reversal system: alphabet {a,b,f}, predicate W 1-ary, equational
/// axioms describing the reversal operation f.
pub fn reverse_system(pool: &mut VarPool) -> (RecursiveSystem, LGrammar) {
    let basis: Vec<RFormula> = [
        "(horn () (pred W (l a)))",
        "(horn () (pred W (l b)))",
        "(horn ((pred W (l ?x)) (pred W (l ?y))) (pred W (l ?x ?y)))",
        "(horn () (eq (l f ( a )) (l a)))",
        "(horn () (eq (l f ( b )) (l b)))",
        "(horn ((pred W (l ?x)) (pred W (l ?y))) (eq (l f ( ?x ?y )) (l f ( ?y ) f ( ?x ))))",
    ]
    .iter()
    .map(|t| parse_rformula(t, pool).unwrap())
    .collect();
    let sys = RecursiveSystem::new(
        ["a", "b", "f"].iter().map(|s| Symbol::new(s)).collect(),
        [(Symbol::new("W"), 1)].into_iter().collect(),
        basis,
    );
    let lang = LGrammar::new(vec![
        vec![GItem::VarSlot],
        vec![sym("a")],
        vec![sym("b")],
        vec![GItem::SRef, GItem::SRef],
        vec![sym("f"), sym("("), GItem::SRef, sym(")")],
    ]);
    (sys, lang)
}

/// Arithmetic recursive system with the number predicate N0 and
/// equational axioms for + and *; lists are the numeral terms.
pub fn spa_system(pool: &mut VarPool) -> (RecursiveSystem, LGrammar) {
    let basis: Vec<RFormula> = [
        "(horn () (pred N0 (l 0)))",
        "(horn ((pred N0 (l ?x))) (pred N0 (l s ( ?x ))))",
        "(horn ((pred N0 (l ?x))) (eq (l + ( 0 ?x )) (l ?x)))",
        "(horn ((pred N0 (l ?x)) (pred N0 (l ?y))) (eq (l + ( s ( ?x ) ?y )) (l s ( + ( ?x ?y ) ))))",
        "(horn ((pred N0 (l ?x))) (eq (l * ( 0 ?x )) (l 0)))",
        "(horn ((pred N0 (l ?x)) (pred N0 (l ?y))) (eq (l * ( s ( ?x ) ?y )) (l + ( * ( ?x ?y ) ?y ))))",
        "(horn ((pred N0 (l ?x)) (pred N0 (l ?y)) (eq (l s ( ?x )) (l s ( ?y )))) (eq (l ?x) (l ?y)))",
    ]
    .iter()
    .map(|t| parse_rformula(t, pool).unwrap())
    .collect();
    let sys = RecursiveSystem::new(
        ["0", "s", "+", "*"].iter().map(|s| Symbol::new(s)).collect(),
        [(Symbol::new("N0"), 1)].into_iter().collect(),
        basis,
    );
    let lang = numeral_grammar();
    (sys, lang)
}

/// Numeral-term grammar: 0, variables, s(S), +(S S), *(S S).
pub fn numeral_grammar() -> LGrammar {
    LGrammar::new(vec![
        vec![sym("0")],
        vec![GItem::VarSlot],
        vec![sym("s"), sym("("), GItem::SRef, sym(")")],
        vec![sym("+"), sym("("), GItem::SRef, GItem::SRef, sym(")")],
        vec![sym("*"), sym("("), GItem::SRef, GItem::SRef, sym(")")],
    ])
}
