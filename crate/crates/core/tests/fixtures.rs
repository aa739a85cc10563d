use std::path::PathBuf;

use qfilter::cli::EnsembleFile;
use qfilter::{instances, Ensemble};

fn fixture(name: &str) -> Ensemble {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    EnsembleFile::load(&path)
        .unwrap()
        .to_ensemble(name)
        .unwrap()
}

#[test]
fn fixtures_are_bit_exact() {
    let cases = [
        ("second_example.json", instances::worked_example_two()),
        ("first_example_s05.json", instances::worked_example_one(0.5).unwrap()),
        ("first_example_s03.json", instances::worked_example_one(0.3).unwrap()),
        ("symmetric_s05.json", instances::symmetric(0.5).unwrap()),
        ("orthogonal_triple.json", instances::orthogonal_triple()),
    ];
    for (name, expected) in cases {
        assert_eq!(fixture(name), expected, "{name}");
    }
}
