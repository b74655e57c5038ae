mod common;

use common::*;
use cosres::engine::{step_co_sres, Rule};
use cosres::transform::Stage;
use cosres::{
    computed_substitution, parse_program, parse_query, soundness_check, strip_identity,
    suffix_compositions, term_equal, transform, verify_trace, DerivationTrace, Goal, Mode, Program,
    Substitution, Var,
};

/// Builds a co-S trace by taking, at each step, the first successor of
/// the given rule at the given position.
fn build(p: &Program, query: &str, choices: &[(usize, Rule)]) -> DerivationTrace {
    let q = parse_query(query).unwrap();
    let mut goal = Goal::from_atoms(q);
    let mut generation = goal.max_generation().max(p.max_generation()) + 1;
    let mut trace = DerivationTrace {
        mode: Mode::CoSRes,
        goals: vec![goal.clone()],
        steps: Vec::new(),
        computed: Substitution::new(),
        provenance: None,
    };
    for &(k, rule) in choices {
        let next = step_co_sres(&goal, p, k, generation)
            .into_iter()
            .find(|s| s.label.rule == rule)
            .unwrap_or_else(|| panic!("no {rule} step at {k} from {goal}"));
        if rule.uses_clause() {
            generation += 1;
        }
        goal = next.goal;
        trace.goals.push(goal.clone());
        trace.steps.push(next.label);
    }
    trace.computed = computed_substitution(&trace);
    trace
}

const DIAGRAM: &str = "q(X) :- p(X).\np(s(Y)) :- q(Y).\nt(W) :- t(W).";

fn diagram() -> (Program, DerivationTrace) {
    let p = parse_program(DIAGRAM).unwrap();
    let trace = build(
        &p,
        "q(X), t(X)",
        &[
            (0, Rule::Rewriting),
            (1, Rule::Rewriting),
            (0, Rule::Substitution),
            (1, Rule::LoopDetection),
            (0, Rule::Rewriting),
            (0, Rule::LoopDetection),
        ],
    );
    (p, trace)
}

#[test]
fn diagram_trace_maps_rule_by_rule() {
    let (p, input) = diagram();
    verify_trace(&p, &input).unwrap();
    assert_eq!(input.unifiers().len(), 3);

    let out = transform(&p, &input).unwrap();
    assert_eq!(out.mode, Mode::CoRewId);
    assert_eq!(
        out.rules(),
        [
            Rule::Rewriting,
            Rule::Rewriting,
            Rule::Identity,
            Rule::LoopDetection,
            Rule::Rewriting,
            Rule::LoopDetection
        ]
    );
    for (label, original) in out.steps.iter().zip(&input.steps) {
        if label.rule != Rule::Rewriting {
            assert!(label.unifier.is_empty());
        } else {
            assert_eq!(label.clause, original.clause);
        }
    }
    assert!(out.computed.is_empty());

    // goals are G_i σ_x with x advancing after identity and loop steps
    let thetas: Vec<Substitution> = input.unifiers().into_iter().cloned().collect();
    let sigmas = suffix_compositions(&thetas);
    let x_after = [1, 1, 1, 2, 3, 3, 4];
    for (i, &x) in x_after.iter().enumerate() {
        let expected = input.goals[i].apply(sigmas.sigma(x));
        assert!(
            out.goals[i].same_as(&expected),
            "goal {i}: {} vs {expected}",
            out.goals[i]
        );
    }

    let stripped = strip_identity(&out);
    assert_eq!(stripped.steps.len(), 5);
    assert_eq!(stripped.provenance.as_deref(), Some(&[0, 1, 3, 4, 5][..]));
    verify_trace(&p, &stripped).unwrap();
}

#[test]
fn identity_steps_repeat_their_goal() {
    let (p, input) = diagram();
    let out = transform(&p, &input).unwrap();
    for (i, label) in out.steps.iter().enumerate() {
        if label.rule == Rule::Identity {
            assert!(out.goals[i].same_as(&out.goals[i + 1]));
        }
        if label.rule == Rule::LoopDetection {
            let item = &out.goals[i].items[label.selected];
            assert!(item.hypotheses.iter().any(|h| term_equal(h, &item.atom)));
        }
    }
}

#[test]
fn suffix_compositions_of_the_example() {
    let tr = first(EXAMPLE, "q(X)", Mode::CoSRes).unwrap();
    let thetas: Vec<Substitution> = tr.unifiers().into_iter().cloned().collect();
    let sigmas = suffix_compositions(&thetas);
    assert_eq!(sigmas.len(), 3);
    let omega = t("mu A. s(A)");
    assert!(term_equal(
        sigmas.sigma(1).get(&Var::new("X")).unwrap(),
        &omega
    ));
    assert!(term_equal(
        sigmas.sigma(1).get(&Var::parse("X_2")).unwrap(),
        &omega
    ));
    assert_eq!(sigmas.sigma(2).len(), 1);
    assert!(term_equal(
        sigmas.sigma(2).get(&Var::parse("X_2")).unwrap(),
        &omega
    ));
    assert!(sigmas.sigma(3).is_empty());

    let empty = suffix_compositions(&[]);
    assert_eq!(empty.len(), 1);
    assert!(empty.sigma(1).is_empty());
}

#[test]
fn example_pipeline() {
    let p = parse_program(EXAMPLE).unwrap();
    let tr = first(EXAMPLE, "q(X)", Mode::CoSRes).unwrap();
    let out = transform(&p, &tr).unwrap();
    let expected = Goal::new(vec![item("q(mu A. s(A))", &[])]);
    assert!(out.initial().same_as(&expected));
    assert!(out.computed.is_empty());
    for i in 0..out.steps.len() {
        let mut prefix = out.clone();
        prefix.goals.truncate(i + 2);
        prefix.steps.truncate(i + 1);
        let err = verify_trace(&p, &prefix).err();
        assert!(
            err.as_ref().is_none_or(|e| e.step.is_none()),
            "step {i}: {err:?}"
        );
    }
    let co_sld = strip_identity(&out);
    verify_trace(&p, &co_sld).unwrap();
    assert!(co_sld.initial().same_as(&expected));

    let report = soundness_check(&p, &tr).unwrap();
    assert!(report.instance.same_as(&expected));
    assert!(report.to_string().contains("co-SLD refutation: 4 steps"));
}

#[test]
fn bit_stream_pipeline() {
    let p = parse_program(BIT_STREAM).unwrap();
    let tr = first(BIT_STREAM, "bit_stream(cons(0, Xs))", Mode::CoSRes).unwrap();
    let report = soundness_check(&p, &tr).unwrap();
    let expected = Goal::new(vec![item("bit_stream(mu A. cons(0, A))", &[])]);
    assert!(report.instance.same_as(&expected));
}

#[test]
fn rewriting_only_trace_is_unchanged() {
    let src = "r(X).\nq(X) :- r(X).";
    let p = parse_program(src).unwrap();
    let tr = first(src, "q(A)", Mode::CoSRes).unwrap();
    let out = transform(&p, &tr).unwrap();
    assert_eq!(out.steps, tr.steps);
    for (a, b) in out.goals.iter().zip(&tr.goals) {
        assert!(a.same_as(b));
    }
    let stripped = strip_identity(&out);
    assert_eq!(stripped.steps, out.steps);
}

#[test]
fn corrupted_input_is_reported_with_its_step() {
    let p = parse_program(EXAMPLE).unwrap();
    let mut tr = first(EXAMPLE, "q(X)", Mode::CoSRes).unwrap();
    tr.steps[3].unifier = Substitution::single(Var::parse("X_2"), t("a"));
    let err = soundness_check(&p, &tr).unwrap_err();
    assert_eq!(err.stage, Stage::Input);
    assert_eq!(err.step(), Some(3));
}

#[test]
fn only_co_sres_traces_are_transformed() {
    let p = parse_program(PQR).unwrap();
    let tr = first(PQR, "p(X), r(X)", Mode::SRes).unwrap();
    assert_eq!(transform(&p, &tr).unwrap_err().stage, Stage::Input);
}
