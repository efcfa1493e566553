//! A sweep over root-valuation cells for one configuration: every
//! predicted-positive cell must produce a witness, every predicted-negative
//! cell a verified obstruction. Anything else is an anomaly.

use filtiso::schema::SweepRecordOutput;
use filtiso::theorem::{theorem_sweep, SweepConfig};

fn main() {
    let mut cfg = SweepConfig::new(5, 2, 1, 1);
    cfg.seed = 42;
    cfg.budget = 64;
    cfg.negative_samples = 10;

    let summary = theorem_sweep(&cfg);
    println!(
        "d={} e={} f={}: {} cells, {} predicted true, {} predicted false, {} anomalies",
        cfg.d, cfg.e, cfg.f, summary.total, summary.predicted_true, summary.predicted_false,
        summary.anomalies
    );

    // one JSON line per cell is the machine-readable report format
    println!("first three records as JSON lines:");
    for record in summary.records.iter().take(3) {
        let line = serde_json::to_string(&SweepRecordOutput::from_record(record))
            .expect("records serialize");
        println!("{line}");
    }
}
