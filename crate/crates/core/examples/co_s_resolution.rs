//! Co-inductive structural resolution on a co-recursive program.

use cosres::cli::{statistics, write_trace};
use cosres::{derive, parse_program, parse_query, verify_trace, Mode, SearchOptions};

pub fn main() {
    let program = parse_program(include_str!("programs/example.pl")).unwrap();
    let query = parse_query("q(X)").unwrap();

    let trace = derive(&program, &query, Mode::CoSRes, SearchOptions::default())
        .next()
        .expect("a refutation exists")
        .expect("within the step budget");

    write_trace(&mut std::io::stdout(), &trace).unwrap();
    println!("computed substitution: {}", trace.computed);
    println!("{}", statistics(&trace));
    println!("verified: {:?}", verify_trace(&program, &trace));

    // plain SLD resolution never terminates on this query; its goals keep
    // growing, so a small budget is enough to see it give up
    let budget = SearchOptions {
        max_steps: 300,
        ..SearchOptions::default()
    };
    let sld = derive(&program, &query, Mode::Sld, budget).next();
    println!(
        "sld: {}",
        match sld {
            Some(Err(e)) => e.to_string(),
            Some(Ok(_)) => "refutation".to_string(),
            None => "finite failure".to_string(),
        }
    );
}
