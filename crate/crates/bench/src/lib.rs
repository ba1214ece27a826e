//! Shared fixtures for the benchmarks.

use jamsec_core::{CaseGeometry, NetworkConfig, PiecewiseLoS};

/// The default scenario with the jammer offset so every closed-form branch
/// has work to do.
pub fn scenario(h_m: f64) -> (NetworkConfig, PiecewiseLoS) {
    let cfg = NetworkConfig { h_m, l_tj_m: 150.0, ..Default::default() };
    let los = PiecewiseLoS::table(&cfg.env).expect("preset environment");
    (cfg, los)
}

/// One geometry per sign pattern of `(A, B)`.
pub fn geometries() -> Vec<(&'static str, CaseGeometry)> {
    vec![
        ("a_pos_b_pos", CaseGeometry::new(1.5, 1.0, 400.0, 300.0, 200.0, 1.0, 1.0)),
        ("a_pos_b_neg", CaseGeometry::new(1.5, 1.0, 400.0, 100.0, 300.0, 1.0, 1.0)),
        ("a_neg_b_pos", CaseGeometry::new(4.0, 1.0, 400.0, 500.0, 200.0, 1.0, 1.0)),
        ("a_neg_b_neg", CaseGeometry::new(4.0, 1.0, 400.0, 380.0, 300.0, 1.0, 1.0)),
        ("a_zero", CaseGeometry::new(2.0, 1.0, 400.0, 250.0, 250.0, 1.0, 1.0)),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn geometries_cover_the_sign_patterns() {
        for (name, g) in super::geometries() {
            let a = g.a_coef;
            let ok = match name {
                "a_pos_b_pos" => a > 0.0 && g.b_coef >= 0.0,
                "a_pos_b_neg" => a > 0.0 && g.b_coef < 0.0,
                "a_neg_b_pos" => a < 0.0 && g.b_coef >= 0.0,
                "a_neg_b_neg" => a < 0.0 && g.b_coef < 0.0,
                _ => g.a_is_zero(),
            };
            assert!(ok, "{name}: A={a} B={}", g.b_coef);
        }
    }
}
