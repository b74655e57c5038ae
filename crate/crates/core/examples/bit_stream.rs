//! Infinite bit streams: co-inductive strategies succeed where inductive
//! ones run out of steps.

use cosres::{derive, parse_program, parse_query, Binding, Mode, SearchOptions, Var};

pub fn main() {
    let program = parse_program(include_str!("programs/bit_stream.pl")).unwrap();
    let query = parse_query("bit_stream(cons(0, Xs))").unwrap();
    let xs = Var::new("Xs");

    for mode in [Mode::CoSld, Mode::CoSRes, Mode::Sld, Mode::SRes] {
        let options = SearchOptions {
            max_steps: 300,
            ..SearchOptions::default()
        };
        match derive(&program, &query, mode, options).next() {
            Some(Ok(trace)) => {
                let t = trace.computed.get(&xs).unwrap();
                println!(
                    "{mode:>8}: {}  ({} steps)",
                    Binding::new(&xs, t),
                    trace.steps.len()
                );
            }
            Some(Err(e)) => println!("{mode:>8}: {e}"),
            None => println!("{mode:>8}: no refutation"),
        }
    }

    // a prefix followed by a loop: each hypothesis gives another answer
    let query = parse_query("bit_stream(cons(0, cons(1, Xs)))").unwrap();
    let options = SearchOptions {
        max_steps: 300,
        max_solutions: 3,
        ..SearchOptions::default()
    };
    for trace in derive(&program, &query, Mode::CoSRes, options).flatten() {
        println!(
            "answer: {}",
            Binding::new(&xs, trace.computed.get(&xs).unwrap())
        );
    }
}
