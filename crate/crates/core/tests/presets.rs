use std::path::PathBuf;

use unibandit::{presets, ExperimentConfig};

fn preset_file(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets").join(name);
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn checked_in_presets_match_the_code() {
    assert_eq!(preset_file("table1.cfg"), presets::table1(100_000, 50, 7));
    assert_eq!(
        preset_file("moving_triangle.cfg"),
        presets::moving_triangle(1e-3, 20_000, 10, 7)
    );
    assert_eq!(preset_file("continuous.cfg"), presets::continuous(160_000, 20, 7));
}

#[test]
fn presets_round_trip_through_text() {
    for cfg in [
        presets::table1(10_000, 5, 1),
        presets::moving_triangle(1e-4, 200_000, 3, 2),
        presets::continuous(40_000, 4, 3),
    ] {
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }
}
