//! The built-in worked examples, run through the same entry point as
//! `filtiso examples`: three small cases with known admissibility behavior,
//! each checked against its hand-derived predicate.

use filtiso::cli::{run, Command, JobSpec};
use filtiso::theorem::reference_suite;

fn main() {
    for case in reference_suite(5) {
        let field = case.frobenius.field();
        let tower = if field.m() == 1 {
            format!("Q_{}", field.p())
        } else {
            format!("Q_{}(pi), pi^{} = {}", field.p(), field.m(), field.p())
        };
        println!("{}: rank {} over {}", case.name, case.frobenius.d(), tower);
    }
    println!();

    let mut job = JobSpec::new(Command::Examples);
    job.seed = 1;
    let outcome = run(&job);
    print!("{}", outcome.stdout);
    std::process::exit(outcome.exit);
}
