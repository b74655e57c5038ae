//! Turning a co-S refutation into a co-SLD refutation of the instantiated
//! goal, checking every stage.

use cosres::cli::write_trace;
use cosres::transform::{soundness_check, suffix_compositions};
use cosres::{derive, parse_program, parse_query, Mode, SearchOptions};

pub fn main() {
    let program = parse_program(include_str!("programs/example.pl")).unwrap();
    let query = parse_query("q(X)").unwrap();
    let trace = derive(&program, &query, Mode::CoSRes, SearchOptions::default())
        .next()
        .unwrap()
        .unwrap();

    let thetas: Vec<_> = trace.unifiers().into_iter().cloned().collect();
    for (k, sigma) in suffix_compositions(&thetas).sigmas.iter().enumerate() {
        println!("sigma_{} = {sigma}", k + 1);
    }

    let report = soundness_check(&program, &trace).expect("the pipeline verifies");
    println!("\nco-rewriting-id refutation:");
    write_trace(&mut std::io::stdout(), &report.co_rewriting_id).unwrap();
    println!("\nco-SLD refutation:");
    write_trace(&mut std::io::stdout(), &report.co_sld).unwrap();
    println!("\n{report}");
}
