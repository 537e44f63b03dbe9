//! Times each acceptance suite individually.
use baire::suite::{run_suite, SUITE_NAMES};

fn main() {
    for name in SUITE_NAMES {
        let t = std::time::Instant::now();
        let res = run_suite(name, 0xBA1E);
        let dt = t.elapsed().as_secs_f64();
        match res {
            Ok(rs) => {
                for r in rs {
                    println!(
                        "{:7.2}s {} {}: {}",
                        dt,
                        if r.passed { "PASS" } else { "FAIL" },
                        r.id,
                        r.detail
                    );
                }
            }
            Err(e) => println!("{dt:7.2}s ERROR {name}: {e}"),
        }
    }
}
