//! Fit one kernel bias so that reversal goes on to turn with probability 0.95.

use std::path::Path;

use hetnet::fit::{fit, FitProblem};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    let text = std::fs::read_to_string(dir.join("nichols4.fit.json")).unwrap();
    let problem = FitProblem::from_json(&text, &dir).unwrap();
    let start = problem.initial_params();
    println!("start {start:?}, loss {:.5}", problem.loss(&start).unwrap());

    let result = fit(&problem).unwrap();
    for (path, value) in &result.best_params {
        println!("{path} = {value:.5}");
    }
    let p = result.achieved.probability("reversal", "turn").unwrap().unwrap();
    println!("loss {:.2e} after {} evaluations, P(reversal -> turn) = {p:.3}", result.loss, result.evaluations);
}
