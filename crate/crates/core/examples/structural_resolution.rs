//! Structural resolution next to SLD resolution on an inductive program.

use cosres::{derive, parse_program, parse_query, Mode, SearchOptions};

pub fn main() {
    let program = parse_program(include_str!("programs/pqr.pl")).unwrap();
    let query = parse_query("p(X), r(X)").unwrap();

    for mode in [Mode::SRes, Mode::Sld] {
        let trace = derive(&program, &query, mode, SearchOptions::default())
            .next()
            .unwrap()
            .unwrap();
        println!("{mode}:");
        for (goal, step) in trace.goals.iter().zip(&trace.steps) {
            println!("  {goal}  --{}-->", step.rule);
        }
        println!("  []");
        println!("  computed substitution {}", trace.computed);
    }
}
