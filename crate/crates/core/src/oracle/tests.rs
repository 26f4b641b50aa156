use super::*;
use crate::frontend::parse_program;
use crate::logic::{Formula, Location, Term};
use crate::program_model::ProgramModel;
use crate::semantics::{build_task, mutation_sites, Mutation, TaskOptions};

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

fn with_a(a: &[i64]) -> InputValuation {
    let mut inp = InputValuation::default();
    inp.arrays.insert("a".into(), a.to_vec());
    inp
}

fn run(m: &ProgramModel, inp: &InputValuation) -> ExecutionTrace {
    execute(m.program(), inp, &ExecConfig::default()).unwrap()
}

#[test]
fn fig1_example_run() {
    let m = fig1();
    let tr = run(&m, &with_a(&[1, -2, 3]));
    let end = TimeValue::end();
    assert!(tr.terminated());
    assert_eq!(tr.value_at("i", &end, None), 3);
    assert_eq!(tr.value_at("j", &end, None), 2);
    assert_eq!(tr.value_at("b", &end, Some(0)), 1);
    assert_eq!(tr.value_at("b", &end, Some(1)), 3);
    assert_eq!(tr.last_iteration(7, &[]), 3);
    assert_eq!(tr.reached().first().unwrap(), &TimeValue::new(Location::Line(5), vec![]));
    assert_eq!(tr.reached().last().unwrap(), &end);
    // two initial assignments; per iteration while_T, the test and the
    // increment, plus two assignments on the 2 taken branches; the exit.
    assert_eq!(tr.step_count(), 2 + 3 * 3 + 2 * 2 + 1);
}

#[test]
fn fig1_empty_input() {
    let m = fig1();
    let tr = run(&m, &InputValuation::default());
    assert_eq!(tr.last_iteration(7, &[]), 0);
    assert_eq!(tr.value_at("j", &TimeValue::end(), None), 0);
}

#[test]
fn divergence_hits_step_limit() {
    let p = parse_program("func main() {\n while (0 < 1) {\n  skip;\n }\n}\nassert true").unwrap();
    let cfg = ExecConfig {
        step_limit: 1000,
        ..ExecConfig::default()
    };
    match execute(&p, &InputValuation::default(), &cfg) {
        Err(ExecError::StepLimitExceeded { limit, partial }) => {
            assert_eq!(limit, 1000);
            assert!(!partial.terminated());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn out_of_bounds_reads() {
    let src = "func main() {\n const Int[] a;\n Int x = a[2];\n}\nassert true";
    let p = parse_program(src).unwrap();
    let inp = with_a(&[5]);
    assert_eq!(
        execute(&p, &inp, &ExecConfig::default()),
        Err(ExecError::OutOfBoundsRead {
            line: 3,
            array: "a".into(),
            index: 2,
            length: 1
        })
    );
    let cfg = ExecConfig {
        permissive_reads: true,
        ..ExecConfig::default()
    };
    let tr = execute(&p, &inp, &cfg).unwrap();
    assert_eq!(tr.value_at("x", &TimeValue::end(), None), 0);
}

#[test]
fn overflow_aborts() {
    let src = "func main() {\n const Int n;\n Int x = n + 1;\n}\nassert true";
    let p = parse_program(src).unwrap();
    let mut inp = InputValuation::default();
    inp.ints.insert("n".into(), i64::MAX);
    assert_eq!(
        execute(&p, &inp, &ExecConfig::default()),
        Err(ExecError::Overflow { line: 3 })
    );
}

#[test]
fn unknown_inputs_rejected() {
    let m = fig1();
    let mut inp = InputValuation::default();
    inp.ints.insert("zz".into(), 1);
    assert!(matches!(
        execute(m.program(), &inp, &ExecConfig::default()),
        Err(ExecError::UnknownInput(_))
    ));
    let mut inp = InputValuation::default();
    inp.ints.insert("a".into(), 1);
    assert!(matches!(
        execute(m.program(), &inp, &ExecConfig::default()),
        Err(ExecError::InputKind(_))
    ));
}

#[test]
fn dump_format() {
    let src = "func main() {\n Int x = 1;\n if (x > 0) {\n  x = x + 1;\n }\n}\nassert true";
    let p = parse_program(src).unwrap();
    let tr = execute(&p, &InputValuation::default(), &ExecConfig::default()).unwrap();
    assert_eq!(
        tr.dump(),
        "l2 init x=0\nl3 asg x=1\nl4 ite_T x=1\nl_end asg x=2\n"
    );
}

#[test]
fn nested_loop_iterations() {
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
assert (= (s main_end) 3)";
    let p = parse_program(src).unwrap();
    let tr = execute(&p, &InputValuation::default(), &ExecConfig::default()).unwrap();
    assert_eq!(tr.last_iteration(4, &[]), 3);
    for k in 0..3 {
        assert_eq!(tr.last_iteration(6, &[k]), k);
    }
    assert!(tr.is_reached(&TimeValue::new(Location::Line(7), vec![2, 1])));
    assert!(!tr.is_reached(&TimeValue::new(Location::Line(7), vec![1, 1])));
    let dom = EvalDomains::for_trace(&tr);
    assert_eq!(dom.nat_bound, 5);
    assert!(eval_formula(&p.assertion, &tr, &dom).unwrap());
}

#[test]
fn spec_evaluations() {
    let m = fig1();
    let tr = run(&m, &with_a(&[1, -2, 3]));
    let dom = EvalDomains::for_trace(&tr);
    let task = build_task(&m, &TaskOptions::default()).unwrap();
    let l12 = task
        .semantics_axioms
        .iter()
        .find(|a| a.label == "semantics-l12")
        .unwrap();
    assert!(eval_formula(&l12.formula, &tr, &dom).unwrap());
    assert!(eval_formula(&Formula::reach(Term::end()), &tr, &dom).unwrap());
    assert!(eval_formula(&task.conjecture, &tr, &dom).unwrap());
    // b copies a only where a is non-negative, so index-wise equality fails.
    let wrong = crate::semantics::embed_property(
        &m,
        &crate::frontend::parse_program(&FIG1.replace(
            "(= (b main_end k) (a l))",
            "(= (b main_end k) (a k))",
        ))
        .unwrap()
        .assertion,
    )
    .unwrap();
    assert!(!eval_formula(&wrong, &tr, &dom).unwrap());
}

#[test]
fn eval_reports_unbound_variables() {
    let m = fig1();
    let tr = run(&m, &with_a(&[1]));
    let dom = EvalDomains::for_trace(&tr);
    let f = Formula::eq(Term::var("k", crate::logic::Sort::Int), Term::Int(0));
    assert!(matches!(
        eval_formula(&f, &tr, &dom),
        Err(EvalError::OutOfDomain(_))
    ));
}

#[test]
fn fig1_sweep_is_clean() {
    let m = fig1();
    let inputs = sample_inputs(m.program(), 50, 7, &SampleBounds::default());
    assert_eq!(inputs.len(), 50);
    let traces: Vec<ExecutionTrace> = inputs.iter().map(|i| run(&m, i)).collect();
    let task = build_task(&m, &TaskOptions::default()).unwrap();
    let report = check_task(&task, &traces);
    assert!(report.is_sound(), "{}", report.render());
    assert!(report.conjecture_failures.is_empty(), "{}", report.render());
    assert_eq!(report.checks, 50 * (4 + 7 + 8 + 12 + 1));
    let facts = lemma1_facts(&m).unwrap();
    // 7 statements; top level, then, else and body contexts; one loop.
    assert_eq!(facts.len(), 7 + 4 + 1);
    let f = check_facts(&facts, &traces);
    assert!(f.is_sound(), "{}", f.render());
}

#[test]
fn corrupted_frame_is_caught() {
    let m = fig1();
    let inputs = sample_inputs(m.program(), 20, 1, &SampleBounds::default());
    let traces: Vec<ExecutionTrace> = inputs.iter().map(|i| run(&m, i)).collect();
    let bad = build_task(
        &m,
        &TaskOptions {
            include_lemmas: false,
            mutation: Some(Mutation::Frame {
                line: 12,
                var: "j".into(),
            }),
        },
    )
    .unwrap();
    let report = check_task(&bad, &traces);
    let v = report
        .violations
        .iter()
        .find(|v| v.label == "semantics-l12")
        .expect("violation");
    assert_eq!(v.outcome, Outcome::False);
    assert_eq!(v.grounding.len(), 1);
    assert_eq!(v.grounding[0].0, "it7");
    assert!(v.to_string().starts_with("semantics-l12 on trace "));
}

#[test]
fn every_mutation_is_caught() {
    let m = fig1();
    let inputs = sample_inputs(m.program(), 30, 3, &SampleBounds::default());
    let traces: Vec<ExecutionTrace> = inputs.iter().map(|i| run(&m, i)).collect();
    for site in mutation_sites(&m) {
        let bad = build_task(
            &m,
            &TaskOptions {
                include_lemmas: false,
                mutation: Some(site.clone()),
            },
        )
        .unwrap();
        assert!(!check_task(&bad, &traces).is_sound(), "{site:?} undetected");
    }
}

#[test]
fn last_iteration_is_first_failing_check() {
    let m = fig1();
    for inp in sample_inputs(m.program(), 20, 11, &SampleBounds::default()) {
        let tr = run(&m, &inp);
        let n = tr.last_iteration(7, &[]);
        let len = tr.length("a");
        for k in 0..=n {
            let tp = TimeValue::new(Location::Line(7), vec![k]);
            assert!(tr.is_reached(&tp));
            assert_eq!(tr.value_at("i", &tp, None) < len, k < n);
        }
    }
}

#[test]
fn sampling_contract() {
    let m = fig1();
    let p = m.program();
    let b = SampleBounds {
        max_len: 4,
        ..SampleBounds::default()
    };
    assert_eq!(sample_inputs(p, 3, 1, &b), sample_inputs(p, 3, 1, &b));
    let one = sample_inputs(p, 1, 9, &b);
    assert_eq!(one.len(), 1);
    assert!(one[0].arrays.values().all(Vec::is_empty));
    assert!(one[0].ints.values().all(|&v| v == 0));
    let two = sample_inputs(p, 2, 9, &b);
    assert_eq!(two[1].arrays["a"], vec![0; 4]);
    let many = sample_inputs(p, 200, 2, &b);
    for inp in &many {
        for v in inp.arrays.values() {
            assert!(v.len() <= 4);
            assert!(v.iter().all(|x| (-3..=3).contains(x)));
        }
    }
    let skip = parse_program("func main() { skip; } assert true").unwrap();
    assert_eq!(sample_inputs(&skip, 10, 0, &b).len(), 1);
}

#[test]
fn deterministic_traces() {
    let m = fig1();
    let inp = with_a(&[2, -1, 0, 4]);
    assert_eq!(run(&m, &inp), run(&m, &inp));
}
