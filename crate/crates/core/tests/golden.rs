//! Each preset's resolved configuration is pinned by a TOML file under
//! `tests/golden/`. Regenerate with `PDFAST_BLESS=1 cargo test --test golden`.

use pdfast::sim::{parse_str, presets, ScenarioConfig};
use std::path::PathBuf;

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.toml"))
}

fn all_presets() -> Vec<(&'static str, ScenarioConfig)> {
    let mut v: Vec<_> = presets::NAMES.iter().map(|n| (*n, presets::by_name(n).unwrap())).collect();
    v.push(("kalthoff_winkler_coarse", presets::kalthoff_winkler_coarse()));
    v
}

#[test]
fn presets_match_golden_files() {
    let bless = std::env::var_os("PDFAST_BLESS").is_some();
    for (name, cfg) in all_presets() {
        let text = cfg.to_toml();
        let path = golden_path(name);
        if bless {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, expected, "preset {name} drifted from {}", path.display());
    }
}

#[test]
fn golden_files_parse_back_to_presets() {
    for (name, cfg) in all_presets() {
        let text = std::fs::read_to_string(golden_path(name)).unwrap();
        let parsed = parse_str(&text).unwrap();
        assert_eq!(parsed, cfg, "preset {name}");
        parsed.validate().unwrap();
    }
}

#[test]
fn preset_parameters() {
    let pt = presets::plate_tension();
    assert_eq!(pt.material.e, 2.0e11);
    assert_eq!(pt.material.rho, 7850.0);
    assert!((pt.material.nu - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(pt.horizon.delta, 0.03);
    assert_eq!(&pt.grid().unwrap().dims()[..2], &[400, 200]);

    let kw = presets::kalthoff_winkler();
    assert_eq!(kw.material.s0_override, Some(0.01));
    assert_eq!(kw.grid().unwrap().dims(), [200, 100, 9]);
}
