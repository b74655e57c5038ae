mod common;

use common::*;
use cosres::engine::{step_co_sld, step_co_sres, step_sld, step_sres, Rule, Selection};
use cosres::{
    computed_substitution, derive, parse_program, parse_query, term_equal, verify_trace, Goal,
    Mode, SearchError, SearchOptions, Var,
};

fn goal(atoms: &str) -> Goal {
    Goal::from_atoms(parse_query(atoms).unwrap())
}

#[test]
fn program_loading() {
    let p = parse_program("q(a).").unwrap();
    assert_eq!(p.len(), 1);
    assert!(p.clauses()[0].body.is_empty());

    let p = parse_program(PQR).unwrap();
    assert_eq!(p.clauses()[0].to_string(), "p(f(X)) :- q(X).");
    assert_eq!(
        p.clauses()[0].rename_apart(1).to_string(),
        "p(f(X_1)) :- q(X_1)."
    );
    assert_eq!(
        p.clauses()[1].rename_apart(7).to_string(),
        p.clauses()[1].to_string()
    );

    let p = parse_program(BIT_STREAM).unwrap();
    let stream = &p.clauses()[2];
    assert_eq!(stream.head.functor(), Some(("bit_stream", 1)));
    assert_eq!(stream.body.len(), 2);
    assert!(stream
        .rename_apart(1)
        .vars()
        .is_disjoint(&stream.rename_apart(2).vars()));
}

#[test]
fn queries() {
    assert_eq!(
        parse_query("p(X), r(X)").unwrap(),
        vec![t("p(X)"), t("r(X)")]
    );
    assert_eq!(parse_query("q(X)").unwrap(), vec![t("q(X)")]);
    assert!(parse_query("").unwrap().is_empty());
}

#[test]
fn sld_steps() {
    let p = parse_program("q(a).\np(f(X)) :- q(X).").unwrap();
    assert!(step_sld(&goal("q(a)"), &p, 0, 1)[0].goal.is_empty());
    let s = step_sld(&goal("p(X)"), &p, 0, 1);
    assert_eq!(s[0].goal.to_string(), "(q(X_1), {})");
    assert_eq!(s[0].label.unifier.to_string(), "{X = f(X_1)}");
    assert!(step_sld(&goal("r(X)"), &p, 0, 1).is_empty());
}

#[test]
fn co_sld_steps() {
    let p = parse_program(BIT_STREAM).unwrap();
    let g = Goal::new(vec![item("bit_stream(cons(0, Xs))", &[])]);
    let unfolded = &step_co_sld(&g, &p, 0, 1)[0].goal;
    let g = &step_co_sld(unfolded, &p, 0, 2)[0].goal;
    assert_eq!(g.to_string(), "(bit_stream(Xs), {bit_stream(cons(0, Xs))})");
    let looped = step_co_sld(g, &p, 0, 3);
    assert_eq!(looped[0].label.rule, Rule::LoopDetection);
    let xs = looped[0].label.unifier.get(&Var::new("Xs")).unwrap();
    assert!(term_equal(xs, &t("mu A. cons(0, A)")));

    assert!(step_co_sld(&goal("bit_stream(Xs)"), &p, 0, 1)
        .iter()
        .all(|s| s.label.rule != Rule::LoopDetection));

    let p = parse_program(EXAMPLE).unwrap();
    let s = step_co_sld(&goal("q(X)"), &p, 0, 1);
    assert_eq!(s[0].goal.to_string(), "(p(X), {q(X)}), (r(X), {q(X)})");
}

#[test]
fn sres_steps() {
    let p = parse_program(PQR).unwrap();
    let s = step_sres(&goal("p(X), r(X)"), &p, 0, 1);
    assert_eq!(s[0].label.rule, Rule::Substitution);
    assert_eq!(s[0].label.unifier.to_string(), "{X = f(X_1)}");
    let s = step_sres(&s[0].goal, &p, 0, 2);
    assert_eq!(s[0].label.rule, Rule::Rewriting);
    assert_eq!(s[0].goal.to_string(), "(q(X_1), {}), (r(f(X_1)), {})");
    let s = step_sres(&goal("q(a)"), &p, 0, 1);
    assert_eq!(s[0].label.rule, Rule::Rewriting);
    assert!(s[0].label.unifier.is_empty() && s[0].goal.is_empty());
}

#[test]
fn co_sres_steps_of_the_example() {
    let p = parse_program(EXAMPLE).unwrap();
    let g1 = Goal::new(vec![item("q(X)", &[])]);
    let s = step_co_sres(&g1, &p, 0, 1);
    assert_eq!(s[0].label.unifier.to_string(), "{X_1 = X}");
    assert_eq!(s[0].goal.to_string(), "(p(X), {q(X)}), (r(X), {q(X)})");

    let s = step_co_sres(&s[0].goal, &p, 0, 2);
    assert_eq!(s[0].label.rule, Rule::Substitution);
    assert_eq!(s[0].label.unifier.to_string(), "{X = s(X_2)}");
    assert_eq!(
        s[0].goal.to_string(),
        "(p(s(X_2)), {q(s(X_2))}), (r(s(X_2)), {q(s(X_2))})"
    );

    let g4 = Goal::new(vec![
        item("q(X_2)", &["p(s(X_2))", "q(s(X_2))"]),
        item("r(s(X_2))", &["q(s(X_2))"]),
    ]);
    let s = step_co_sres(&g4, &p, 0, 4);
    assert_eq!(s[0].label.rule, Rule::LoopDetection);
    assert!(term_equal(
        s[0].label.unifier.get(&Var::parse("X_2")).unwrap(),
        &t("mu A. s(A)")
    ));
    let expected = Goal::new(vec![item("r(mu A. s(A))", &["q(mu A. s(A))"])]);
    assert!(s[0].goal.same_as(&expected), "{}", s[0].goal);
}

#[test]
fn derive_examples() {
    let tr = first(EXAMPLE, "q(X)", Mode::CoSRes).unwrap();
    let omega = t("mu A. s(A)");
    assert_eq!(tr.computed.len(), 2);
    assert!(term_equal(
        tr.computed.get(&Var::parse("X")).unwrap(),
        &omega
    ));
    assert!(term_equal(
        tr.computed.get(&Var::parse("X_2")).unwrap(),
        &omega
    ));
    assert_eq!(computed_substitution(&tr), tr.computed);

    let tr = first(PQR, "p(X), r(X)", Mode::SRes).unwrap();
    assert_eq!(
        computed_substitution(&tr).to_string(),
        "{X = f(a), X_1 = a}"
    );

    let tr = first(EXAMPLE, "", Mode::Sld).unwrap();
    assert!(tr.steps.is_empty() && tr.computed.is_empty());
}

#[test]
fn rewriting_only_refutation_computes_nothing() {
    let tr = first("r(X).\nq(X) :- r(X).", "q(A)", Mode::SRes).unwrap();
    assert!(tr.rules().iter().all(|r| *r == Rule::Rewriting));
    assert!(computed_substitution(&tr).is_empty());
}

#[test]
fn every_emitted_trace_verifies() {
    let p = parse_program(BIT_STREAM).unwrap();
    let q = parse_query("bit_stream(cons(0, cons(1, Xs)))").unwrap();
    for mode in [Mode::CoSld, Mode::CoSRes] {
        let options = SearchOptions {
            max_solutions: 3,
            ..SearchOptions::default()
        };
        let traces: Vec<_> = derive(&p, &q, mode, options).map(Result::unwrap).collect();
        assert_eq!(traces.len(), 3, "{mode}");
        for tr in &traces {
            verify_trace(&p, tr).unwrap();
        }
    }
}

#[test]
fn coinductive_goals_exhaust_inductive_search() {
    let p = parse_program(EXAMPLE).unwrap();
    let q = parse_query("q(X)").unwrap();
    for mode in [Mode::Sld, Mode::SRes] {
        let options = SearchOptions {
            max_steps: 200,
            ..SearchOptions::default()
        };
        let out: Vec<_> = derive(&p, &q, mode, options).collect();
        assert!(
            matches!(
                out.as_slice(),
                [Err(SearchError::BudgetExhausted { steps: 200 })]
            ),
            "{mode}"
        );
    }
}

#[test]
fn rightmost_selection_also_refutes() {
    let p = parse_program(PQR).unwrap();
    let q = parse_query("p(X), r(X)").unwrap();
    let options = SearchOptions {
        selection: Selection::Rightmost,
        ..SearchOptions::default()
    };
    let tr = derive(&p, &q, Mode::SRes, options).next().unwrap().unwrap();
    verify_trace(&p, &tr).unwrap();
    assert!(term_equal(
        &tr.answer(&[Var::new("X")].into())
            .get(&Var::new("X"))
            .unwrap()
            .clone(),
        &t("f(a)")
    ));
}

#[test]
fn verifier_rejects_forgeries() {
    let p = parse_program(EXAMPLE).unwrap();
    let good = first(EXAMPLE, "q(X)", Mode::CoSRes).unwrap();

    let mut forged = good.clone();
    forged.steps[1].unifier = cosres::Substitution::single(Var::new("X"), t("s(a)"));
    assert_eq!(verify_trace(&p, &forged).unwrap_err().step, Some(1));

    let mut truncated = good.clone();
    truncated.goals.pop();
    truncated.steps.pop();
    assert!(verify_trace(&p, &truncated)
        .unwrap_err()
        .to_string()
        .contains("final goal not empty"));

    let mut doubled = good;
    doubled.steps.insert(2, doubled.steps[1].clone());
    doubled.goals.insert(2, doubled.goals[2].clone());
    assert!(verify_trace(&p, &doubled).is_err());
}
