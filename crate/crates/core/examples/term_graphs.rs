//! Rational terms as cyclic graphs: construction, equality, unfolding.

use cosres::term::TermBuilder;
use cosres::{parse_term, term_equal, Term};

pub fn main() {
    // s(s(s(...))) written two ways
    let once = parse_term("mu X. s(X)").unwrap();
    let twice = parse_term("mu Y. s(s(Y))").unwrap();
    println!("{once}  ==  {twice}: {}", term_equal(&once, &twice));
    println!(
        "nodes after minimization: {} and {}",
        once.len(),
        twice.len()
    );

    // the same stream built by hand from a graph with a back edge
    let mut b = TermBuilder::new();
    let root = b.reserve();
    let zero = b.app("0", vec![]);
    b.define_app(root, "cons", vec![zero, root]);
    let zeros = b.build(root).unwrap();
    println!("built: {zeros}");
    println!("unfolded to depth 3: {}", zeros.unfold(3));
    println!(
        "finite: {}, ground: {}",
        zeros.is_finite(),
        zeros.is_ground()
    );

    let subterms: Vec<String> = zeros
        .distinct_subterms()
        .iter()
        .map(Term::to_string)
        .collect();
    println!("distinct subterms: {}", subterms.join(", "));

    let mixed = parse_term("f(mu A. g(A, Y), Z)").unwrap();
    let vars: Vec<String> = mixed.vars().iter().map(|v| v.to_string()).collect();
    println!("variables of {mixed}: {}", vars.join(", "));
}
