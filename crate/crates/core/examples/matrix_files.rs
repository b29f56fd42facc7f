//! Reading and writing the JSON matrix format and running the golden
//! checks on the bundled data directory.

use std::path::Path;

use spectral_delta::golden::run_suite;
use spectral_delta::io::{matrix_to_json, parse_matrix, read_operator};

fn main() -> spectral_delta::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let m = read_operator(&data.join("pauli_y.json"))?;
    let text = matrix_to_json(m.matrix()).to_string();
    println!("pauli_y as written: {text}");
    assert_eq!(&parse_matrix(&text)?, m.matrix());

    for check in run_suite(&data, 1.0, 0)? {
        println!("{:<50} {:>10.3e} {}", check.name, check.observed, if check.passed() { "PASS" } else { "FAIL" });
    }
    Ok(())
}
