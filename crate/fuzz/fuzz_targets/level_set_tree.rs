//! Fuzz the custom level-set composition tree: any tree that parses and
//! validates must evaluate without panicking, and its gradient must be
//! computable wherever the value is finite.

#![no_main]

use libfuzzer_sys::fuzz_target;

use cutfem::config::LevelSetSpec;
use cutfem::geometry::LevelSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = serde_json::from_str::<LevelSetSpec>(text) else {
        return;
    };
    if spec.validate().is_err() {
        return;
    }
    let phi = LevelSet::new(spec.to_expr());
    // Probe a small deterministic grid plus a point derived from the input.
    let mut probes = vec![
        [0.0, 0.0],
        [1.0, -1.0],
        [-3.5, 2.5],
        [1e3, -1e3],
    ];
    let seed = data.iter().fold(0u64, |acc, &b| acc.wrapping_mul(31).wrapping_add(b as u64));
    probes.push([
        ((seed % 1000) as f64 - 500.0) / 100.0,
        (((seed / 1000) % 1000) as f64 - 500.0) / 100.0,
    ]);
    for p in probes {
        let v = phi.evaluate(p);
        if v.is_finite() {
            let _ = phi.gradient(p);
        }
    }
});
