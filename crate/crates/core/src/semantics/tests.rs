use super::*;
use crate::frontend::parse_program;
use crate::logic::{ArithOp, Location};

const FIG1: &str = "func main() {
  const Int[] a;

  Int[] b;
  Int i = 0;
  Int j = 0;
  while (i < a.length) {
    if (a[i] >= 0) {
      b[j] = a[i];
      j = j + 1;
    }
    i = i + 1;
  }
}
assert (forall ((k Int)) (exists ((l Int)) (=> (and (<= 0 k) (< k (j main_end)) (>= a_length 0)) (= (b main_end k) (a l)))))
";

fn fig1() -> ProgramModel {
    ProgramModel::new(parse_program(FIG1).unwrap())
}

fn l(line: u32, args: Vec<Term>) -> Term {
    Term::Loc(Location::Line(line), args)
}

fn it7() -> Term {
    iteration_var(7)
}

fn at(v: &str, t: Term) -> Term {
    Term::prog(v, Some(t), None)
}

fn pos() -> Term {
    Term::var("pos", Sort::Int)
}

fn arr_eq(v: &str, t1: Term, t2: Term) -> Formula {
    Formula::forall(
        vec![Binder::new("pos", Sort::Int)],
        Formula::eq(Term::prog(v, Some(t1), Some(pos())), Term::prog(v, Some(t2), Some(pos()))),
    )
}

#[test]
fn eq_and_eqall() {
    let m = fig1();
    let sig = m.signature();
    let i = sig.variable("i").unwrap();
    assert_eq!(
        eq_formula(sig, i, &l(5, vec![]), &l(6, vec![])),
        Formula::eq(at("i", l(5, vec![])), at("i", l(6, vec![])))
    );
    let b = sig.variable("b").unwrap();
    let t = Term::end();
    assert_eq!(eq_formula(sig, b, &t, &t), arr_eq("b", t.clone(), t.clone()));
    let all = eqall_formula(sig, &l(5, vec![]), &l(6, vec![]));
    let Formula::And(parts) = all else { panic!() };
    assert_eq!(parts.len(), 3);
    let none = ProgramModel::new(parse_program("func main() {\n skip;\n}\nassert true").unwrap());
    assert_eq!(eqall_formula(none.signature(), &t, &t), Formula::True);
}

#[test]
fn update_example() {
    let m = fig1();
    let sig = m.signature();
    let (t9, t10) = (l(9, vec![it7()]), l(10, vec![it7()]));
    let e = Expr::arith(ArithOp::Add, Expr::Var("j".into()), Expr::Int(1));
    let f = update_formula(sig, "j", &e, &t9, &t10);
    let expected = Formula::and([
        Formula::eq(at("j", t10.clone()), Term::plus(at("j", t9.clone()), Term::Int(1))),
        arr_eq("b", t9.clone(), t10.clone()),
        Formula::eq(at("i", t9), at("i", t10)),
    ]);
    assert_eq!(f, expected);
}

#[test]
fn update_arr_fig1_line9() {
    let m = fig1();
    let sig = m.signature();
    let (t9, t10) = (l(9, vec![it7()]), l(10, vec![it7()]));
    let f = statement_semantics(&m, 9).unwrap();
    let j9 = at("j", t9.clone());
    let a_i9 = Term::prog("a", None, Some(at("i", t9.clone())));
    let expected = Formula::and([
        Formula::forall(
            vec![Binder::new("pos", Sort::Int)],
            Formula::implies(
                Formula::not(Formula::eq(pos(), j9.clone())),
                Formula::eq(
                    Term::prog("b", Some(t10.clone()), Some(pos())),
                    Term::prog("b", Some(t9.clone()), Some(pos())),
                ),
            ),
        ),
        Formula::eq(Term::prog("b", Some(t10.clone()), Some(j9)), a_i9),
        Formula::eq(at("i", t9.clone()), at("i", t10.clone())),
        Formula::eq(at("j", t9), at("j", t10)),
    ]);
    assert_eq!(f, expected);
    let _ = sig;
}

#[test]
fn expression_translation() {
    let m = fig1();
    let sig = m.signature();
    let t12 = l(12, vec![it7()]);
    let e = Expr::arith(ArithOp::Add, Expr::Var("i".into()), Expr::Int(1));
    assert_eq!(
        eval_expr_at(sig, &e, &t12),
        Evaluated::Term(Term::plus(at("i", t12.clone()), Term::Int(1)))
    );
    let t8 = l(8, vec![it7()]);
    let c = Expr::rel(
        RelOp::Ge,
        Expr::ArrayRead("a".into(), Box::new(Expr::Var("i".into()))),
        Expr::Int(0),
    );
    assert_eq!(
        eval_expr_at(sig, &c, &t8),
        Evaluated::Formula(Formula::cmp(
            CmpOp::Ge,
            Term::prog("a", None, Some(at("i", t8))),
            Term::Int(0)
        ))
    );
    assert_eq!(
        eval_expr_at(sig, &Expr::Int(4), &t12),
        Evaluated::Term(Term::Int(4))
    );
}

#[test]
fn line12_is_update_into_next_iteration() {
    let m = fig1();
    let sig = m.signature();
    let e = Expr::arith(ArithOp::Add, Expr::Var("i".into()), Expr::Int(1));
    assert_eq!(
        statement_semantics(&m, 12).unwrap(),
        update_formula(sig, "i", &e, &l(12, vec![it7()]), &l(7, vec![Term::suc(it7())]))
    );
}

#[test]
fn while_semantics_parts() {
    let m = fig1();
    let Formula::And(parts) = statement_semantics(&m, 7).unwrap() else {
        panic!()
    };
    // the trailing EqAll is flattened into its three conjuncts
    assert_eq!(parts.len(), 3 + 3);
    let n7 = Term::LastIt(7, vec![]);
    let cond = |t: Term| Formula::cmp(CmpOp::Lt, at("i", t), Term::Length("a".into()));
    assert_eq!(
        parts[0],
        Formula::forall(
            vec![Binder::nat("it7")],
            Formula::implies(Formula::nat_lt(it7(), n7.clone()), cond(l(7, vec![it7()])))
        )
    );
    assert_eq!(parts[1], Formula::not(cond(l(7, vec![n7]))));
}

#[test]
fn reach_examples() {
    let m = fig1();
    let axioms = reach_axioms(&m).unwrap();
    let get = |label: &str| axioms.iter().find(|a| a.label == label).unwrap().formula.clone();
    let t8 = l(8, vec![it7()]);
    assert_eq!(
        get("reach-l9"),
        Formula::forall(
            vec![Binder::nat("it7")],
            Formula::iff(
                Formula::reach(l(9, vec![it7()])),
                Formula::and([
                    Formula::reach(t8.clone()),
                    Formula::cmp(
                        CmpOp::Ge,
                        Term::prog("a", None, Some(at("i", t8))),
                        Term::Int(0)
                    ),
                ])
            )
        )
    );
    assert_eq!(
        get("reach-l7"),
        Formula::forall(
            vec![Binder::nat("it7")],
            Formula::iff(
                Formula::reach(l(7, vec![it7()])),
                Formula::nat_leq(it7(), Term::LastIt(7, vec![]))
            )
        )
    );
    assert_eq!(
        get("reach-l_end"),
        Formula::iff(Formula::reach(Term::end()), Formula::True)
    );
    assert_eq!(
        get("reach-l8"),
        Formula::forall(
            vec![Binder::nat("it7")],
            Formula::iff(
                Formula::reach(l(8, vec![it7()])),
                Formula::and([
                    Formula::reach(l(7, vec![Term::Zero])),
                    Formula::nat_lt(it7(), Term::LastIt(7, vec![])),
                ])
            )
        )
    );
}

#[test]
fn fig1_task() {
    let m = fig1();
    let task = build_task(&m, &TaskOptions::default()).unwrap();
    let labels: Vec<&str> = task.semantics_axioms.iter().map(|a| a.label.as_str()).collect();
    assert_eq!(
        labels,
        [
            "semantics-l5",
            "semantics-l6",
            "semantics-l7",
            "semantics-l8",
            "semantics-l9",
            "semantics-l10",
            "semantics-l12"
        ]
    );
    assert_eq!(task.reach_axioms.len(), 8);
    assert_eq!(task.lemma_instances.len(), 12);
    assert_eq!(task.theory_axioms.len(), 4);
    assert_eq!(task.conjecture, m.program().assertion);
    for a in &task.semantics_axioms {
        assert!(
            matches!(a.formula, Formula::Forall(..) | Formula::Implies(..)),
            "{}",
            a.label
        );
    }
    let no_lemmas = build_task(
        &m,
        &TaskOptions {
            include_lemmas: false,
            mutation: None,
        },
    )
    .unwrap();
    assert!(no_lemmas.lemma_instances.is_empty());
}

#[test]
fn guard_shape() {
    let m = fig1();
    for &line in m.statement_lines() {
        let a = semantics_axiom(&m, line).unwrap();
        let start = m.start_of(Subprogram::Stmt(line)).unwrap();
        let encl = m.enclosing_loops(line).unwrap();
        let inner = match &a.formula {
            Formula::Forall(bs, inner) => {
                assert_eq!(bs.len(), encl.len());
                inner.as_ref()
            }
            f => {
                assert!(encl.is_empty());
                f
            }
        };
        assert_eq!(
            inner,
            &Formula::implies(
                Formula::reach(start),
                statement_semantics(&m, line).unwrap()
            )
        );
    }
}

#[test]
fn skip_only_task() {
    let m = ProgramModel::new(parse_program("func main(){ skip; } assert true").unwrap());
    let task = build_task(&m, &TaskOptions::default()).unwrap();
    assert_eq!(task.semantics_axioms.len(), 1);
    assert_eq!(
        task.semantics_axioms[0].formula,
        Formula::implies(Formula::reach(l(1, vec![])), Formula::True)
    );
    assert_eq!(task.conjecture, Formula::True);
    assert!(task.lemma_instances.is_empty());
}

#[test]
fn nested_loops_quantify_both_iterations() {
    let src = "func main() {
  Int i = 0;
  Int s = 0;
  while (i < 3) {
    Int j = 0;
    while (j < i) {
      s = s + 1;
      j = j + 1;
    }
    i = i + 1;
  }
}
assert true";
    let m = ProgramModel::new(parse_program(src).unwrap());
    let a = semantics_axiom(&m, 7).unwrap();
    let Formula::Forall(bs, _) = &a.formula else { panic!() };
    assert_eq!(bs, &vec![Binder::nat("it4"), Binder::nat("it6")]);
    build_task(&m, &TaskOptions::default()).unwrap();
}

#[test]
fn property_embedding_checks_symbols() {
    let m = fig1();
    assert_eq!(embed_property(&m, &Formula::True).unwrap(), Formula::True);
    let bad = Formula::eq(at("zz", Term::end()), Term::Int(0));
    assert_eq!(embed_property(&m, &bad), Err(SemanticsError::Scope("zz".into())));
    let only_i = Formula::cmp(CmpOp::Ge, at("i", Term::end()), Term::Int(0));
    assert_eq!(embed_property(&m, &only_i).unwrap(), only_i);
}

#[test]
fn hoare_triple_retimes_reads() {
    let m = fig1();
    let body = m.context_of_owner(ContextOwner::Body(7)).unwrap();
    let pre = Formula::cmp(CmpOp::Ge, at("j", Term::end()), Term::Int(0));
    let post = Formula::cmp(CmpOp::Ge, at("j", Term::end()), Term::Int(0));
    let f = hoare_triple(&m, Subprogram::Context(body), &pre, &post).unwrap();
    let start = l(8, vec![it7()]);
    let end = l(7, vec![Term::suc(it7())]);
    assert_eq!(
        f,
        Formula::forall(
            vec![Binder::nat("it7")],
            Formula::implies(
                Formula::reach(start.clone()),
                Formula::implies(
                    Formula::cmp(CmpOp::Ge, at("j", start), Term::Int(0)),
                    Formula::cmp(CmpOp::Ge, at("j", end), Term::Int(0)),
                )
            )
        )
    );
}

#[test]
fn mutations_change_exactly_one_axiom() {
    let m = fig1();
    let clean = build_task(&m, &TaskOptions::default()).unwrap();
    let sites = mutation_sites(&m);
    // 5 assignments: 2 frames each for ints, 3 for the array write; plus
    // reach flips for the loop and the four statements inside it.
    assert_eq!(sites.len(), 4 * 2 + 3 + 5);
    for site in sites {
        let bad = build_task(
            &m,
            &TaskOptions {
                include_lemmas: true,
                mutation: Some(site.clone()),
            },
        )
        .unwrap();
        let diff = clean
            .program_axioms()
            .zip(bad.program_axioms())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(diff, 1, "{site:?}");
    }
}
