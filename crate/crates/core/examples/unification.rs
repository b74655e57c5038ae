//! Unification without occurs check, matching, and equation systems.

use cosres::syntax::parse_equations;
use cosres::{match_term, parse_term, unify};

pub fn main() {
    let t = |s: &str| parse_term(s).unwrap();

    // X = f(X) has the rational solution f(f(f(...)))
    let s = unify(&t("p(X)"), &t("p(f(X))")).unwrap();
    println!("unify p(X) with p(f(X)): {s}");

    let s = unify(&t("p(X, X)"), &t("p(f(Y), Y)")).unwrap();
    println!("unify p(X, X) with p(f(Y), Y): {s}");

    match unify(&t("p(a, f(b))"), &t("p(a, f(c))")) {
        Ok(s) => println!("unexpected unifier {s}"),
        Err(clash) => println!("clash: {clash}"),
    }

    // one-way matching binds only the variables of the pattern
    println!(
        "match p(X1, X2) onto p(f(Y), Y): {:?}",
        match_term(&t("p(X1, X2)"), &t("p(f(Y), Y)"))
    );
    println!(
        "match p(X) onto p(f(X)): {:?}",
        match_term(&t("p(X)"), &t("p(f(X))"))
    );

    let system = parse_equations("X = f(Y), Y = g(X), Z = Y").unwrap();
    let reduced = system.reduce().unwrap();
    println!("reduced system: {reduced}");
    println!("solution: {}", reduced.solve().unwrap());
}
