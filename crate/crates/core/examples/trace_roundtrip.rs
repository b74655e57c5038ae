//! Writing a trace as JSON, reading it back and re-checking it.

use cosres::trace_io::{from_json, to_json};
use cosres::{derive, parse_program, parse_query, verify_trace, Mode, SearchOptions};

pub fn main() {
    let program = parse_program(include_str!("programs/bit_stream.pl")).unwrap();
    let query = parse_query("bit_stream(cons(0, Xs))").unwrap();
    let trace = derive(&program, &query, Mode::CoSRes, SearchOptions::default())
        .next()
        .unwrap()
        .unwrap();

    let json = to_json(&trace);
    println!("{json}");

    let back = from_json(&json).unwrap();
    println!("re-verified: {:?}", verify_trace(&program, &back));

    // tampering with a witness is caught at that step
    let mut forged = back.clone();
    forged.steps[0].generation = Some(99);
    match verify_trace(&program, &forged) {
        Ok(()) => println!("forged trace accepted?!"),
        Err(e) => println!("forged trace rejected: {e}"),
    }
}
