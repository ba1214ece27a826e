//! Scenario configuration and geometry helpers.
//!
//! Everything is SI unless the field name carries a `_db` / `_dbm` suffix.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Thermal noise power in watts for a receiver with the given density,
/// bandwidth and noise figure.
pub fn noise_power(density_dbm_hz: f64, bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    dbm_to_watts(density_dbm_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}

/// Urban morphology plus the excess path loss of LoS and NLoS links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    pub name: String,
    /// Ratio of built-up land area to total land area.
    pub rho1: f64,
    /// Mean number of buildings per km².
    pub rho2: f64,
    /// Rayleigh scale of building heights (m).
    pub sigma: f64,
    pub eta_los_db: f64,
    pub eta_nlos_db: f64,
}

impl Environment {
    pub fn new(name: &str, rho1: f64, rho2: f64, sigma: f64, eta_los_db: f64, eta_nlos_db: f64) -> Self {
        Self { name: name.to_string(), rho1, rho2, sigma, eta_los_db, eta_nlos_db }
    }

    pub fn suburban() -> Self {
        Self::new("suburban", 0.1, 750.0, 8.0, -0.1, -21.0)
    }

    pub fn urban() -> Self {
        Self::new("urban", 0.3, 500.0, 15.0, -1.0, -20.0)
    }

    pub fn dense_urban() -> Self {
        Self::new("dense_urban", 0.5, 300.0, 20.0, -1.6, -23.0)
    }

    pub fn highrise_urban() -> Self {
        Self::new("highrise_urban", 0.5, 300.0, 50.0, -2.3, -34.0)
    }

    /// The four tabulated environments, least to most obstructed.
    pub fn presets() -> [Environment; 4] {
        [Self::suburban(), Self::urban(), Self::dense_urban(), Self::highrise_urban()]
    }

    /// Looks up a preset; separators and case are ignored
    /// (`"dense-urban"`, `"DenseUrban"` and `"dense_urban"` all match).
    pub fn by_name(name: &str) -> Option<Self> {
        let key: String = name.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Self::presets().into_iter().find(|e| e.name.replace('_', "") == key)
    }

    pub fn eta_los(&self) -> f64 {
        db_to_linear(self.eta_los_db)
    }

    pub fn eta_nlos(&self) -> f64 {
        db_to_linear(self.eta_nlos_db)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho1 > 0.0 && self.rho1 <= 1.0) {
            return Err(Error::config("env.rho1", format!("must lie in (0, 1], got {}", self.rho1)));
        }
        if !(self.rho2 > 0.0 && self.rho2.is_finite()) {
            return Err(Error::config("env.rho2", format!("must be positive, got {}", self.rho2)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::config("env.sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !self.eta_los_db.is_finite() || !self.eta_nlos_db.is_finite() {
            return Err(Error::config("env.eta_los_db", "excess losses must be finite"));
        }
        if self.eta_los_db < self.eta_nlos_db {
            return Err(Error::config(
                "env.eta_los_db",
                format!("LoS excess loss {} dB is harsher than NLoS {} dB", self.eta_los_db, self.eta_nlos_db),
            ));
        }
        Ok(())
    }
}

impl Default for Environment {
    fn default() -> Self {
        Self::suburban()
    }
}

/// Every scalar of a scenario.
///
/// The transmitter sits at the origin, the receiver on the ground at polar
/// position `(l_sd_m, phi_d)`, and the eavesdroppers and jammer in the disk of
/// radius `r1_m` at height `h_m` centred above the transmitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    /// Either a full object or a preset name such as `"urban"`.
    #[serde(deserialize_with = "env_or_preset")]
    pub env: Environment,
    pub ps_w: f64,
    pub pj_w: f64,
    pub fc_hz: f64,
    /// Air path-loss exponent. Fixed at 2.
    pub alpha: f64,
    pub beta: f64,
    pub h_m: f64,
    pub r1_m: f64,
    pub n_eves: u32,
    pub l_sd_m: f64,
    pub phi_d: f64,
    pub l_tj_m: f64,
    pub phi_jp: f64,
    pub rt_bps_hz: f64,
    pub n0_w: f64,
    pub ne_w: f64,
    pub gain_s_db: f64,
    pub gain_j_db: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        let n0 = noise_power(-174.0, 20e6, 9.0);
        Self {
            env: Environment::suburban(),
            ps_w: 0.1,
            pj_w: 0.01,
            fc_hz: 2e9,
            alpha: 2.0,
            beta: 3.0,
            h_m: 500.0,
            r1_m: 500.0,
            n_eves: 1,
            l_sd_m: 100.0,
            phi_d: 0.0,
            l_tj_m: 0.0,
            phi_jp: 0.0,
            rt_bps_hz: 1.0,
            n0_w: n0,
            ne_w: n0,
            gain_s_db: 0.0,
            gain_j_db: 0.0,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be non-negative and finite, got {v}")))
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        positive("ps_w", self.ps_w)?;
        // Zero jamming power is the no-jammer baseline.
        non_negative("pj_w", self.pj_w)?;
        positive("fc_hz", self.fc_hz)?;
        if self.alpha != 2.0 {
            return Err(Error::config("alpha", format!("only alpha = 2 is supported, got {}", self.alpha)));
        }
        positive("beta", self.beta)?;
        positive("h_m", self.h_m)?;
        positive("r1_m", self.r1_m)?;
        if self.n_eves < 1 {
            return Err(Error::config("n_eves", "at least one eavesdropper is required"));
        }
        positive("l_sd_m", self.l_sd_m)?;
        non_negative("l_tj_m", self.l_tj_m)?;
        if self.l_tj_m > self.r1_m {
            return Err(Error::config(
                "l_tj_m",
                format!("jammer offset {} lies outside the disk of radius {}", self.l_tj_m, self.r1_m),
            ));
        }
        if !self.phi_d.is_finite() {
            return Err(Error::config("phi_d", "must be finite"));
        }
        if !self.phi_jp.is_finite() {
            return Err(Error::config("phi_jp", "must be finite"));
        }
        non_negative("rt_bps_hz", self.rt_bps_hz)?;
        non_negative("n0_w", self.n0_w)?;
        non_negative("ne_w", self.ne_w)?;
        if !self.gain_s_db.is_finite() {
            return Err(Error::config("gain_s_db", "must be finite"));
        }
        if !self.gain_j_db.is_finite() {
            return Err(Error::config("gain_j_db", "must be finite"));
        }
        Ok(())
    }

    pub fn lambda_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.fc_hz
    }

    /// Free-space factor `(λ/4π)²`.
    pub fn friis_gain(&self) -> f64 {
        (self.lambda_m() / (4.0 * PI)).powi(2)
    }

    /// Transmit power with antenna and coding gains applied.
    pub fn ps_eff(&self) -> f64 {
        self.ps_w * db_to_linear(self.gain_s_db)
    }

    /// Jamming power with antenna and coding gains applied.
    pub fn pj_eff(&self) -> f64 {
        self.pj_w * db_to_linear(self.gain_j_db)
    }

    pub fn receiver_xy(&self) -> (f64, f64) {
        (self.l_sd_m * self.phi_d.cos(), self.l_sd_m * self.phi_d.sin())
    }

    pub fn jammer_xy(&self) -> (f64, f64) {
        (self.l_tj_m * self.phi_jp.cos(), self.l_tj_m * self.phi_jp.sin())
    }

    /// Horizontal distance between the jammer's ground projection and the receiver.
    pub fn ground_distance_jd(&self) -> f64 {
        let d2 = self.l_tj_m * self.l_tj_m + self.l_sd_m * self.l_sd_m
            - 2.0 * self.l_tj_m * self.l_sd_m * (self.phi_jp - self.phi_d).cos();
        d2.max(0.0).sqrt()
    }

    /// A copy with both noise powers zeroed.
    pub fn interference_limited(&self) -> Self {
        Self { n0_w: 0.0, ne_w: 0.0, ..self.clone() }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::config(json_field(&e.to_string()), e.to_string()))?;
        // Result files wrap the config under a "config" key; accept those too.
        let value = match value {
            serde_json::Value::Object(mut map) if map.contains_key("config") && !map.contains_key("ps_w") => {
                map.remove("config").unwrap_or_default()
            }
            v => v,
        };
        let cfg: NetworkConfig =
            serde_json::from_value(value).map_err(|e| Error::config(json_field(&e.to_string()), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn env_or_preset<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Environment, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Name(String),
        Full(Environment),
    }
    match Repr::deserialize(d)? {
        Repr::Full(env) => Ok(env),
        Repr::Name(name) => Environment::by_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown environment preset `{name}`"))),
    }
}

/// Pulls the offending field name out of a serde diagnostic when there is one.
fn json_field(msg: &str) -> String {
    for marker in ["unknown field `", "missing field `"] {
        if let Some(i) = msg.find(marker) {
            let rest = &msg[i + marker.len()..];
            if let Some(end) = rest.find('`') {
                return rest[..end].to_string();
            }
        }
    }
    "<json>".to_string()
}

/// 3-D distance from the jammer (at height H) to the ground receiver.
pub fn distance_jd(cfg: &NetworkConfig) -> f64 {
    let g = cfg.ground_distance_jd();
    (g * g + cfg.h_m * cfg.h_m).sqrt()
}

/// Elevation angle seen from a ground node at horizontal distance `r` of a
/// UAV at height `h`.
pub fn elevation_angle(h_m: f64, r_horiz_m: f64) -> f64 {
    h_m.atan2(r_horiz_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(l_tj: f64, phi_jp: f64, l_sd: f64, phi_d: f64, h: f64) -> NetworkConfig {
        NetworkConfig { l_tj_m: l_tj, phi_jp, l_sd_m: l_sd, phi_d, h_m: h, ..Default::default() }
    }

    #[test]
    fn distance_examples() {
        assert!((distance_jd(&cfg(0.0, 0.0, 100.0, 0.0, 500.0)) - 509.901_951_359_278_5).abs() < 1e-9);
        assert!((distance_jd(&cfg(100.0, 0.3, 100.0, 0.3, 500.0)) - 500.0).abs() < 1e-9);
        // Direct coordinate oracle.
        let (jx, jy) = (200.0 * (0.2 + PI / 2.0).cos(), 200.0 * (0.2 + PI / 2.0).sin());
        let (dx, dy) = (100.0 * 0.2f64.cos(), 100.0 * 0.2f64.sin());
        let direct = ((jx - dx).powi(2) + (jy - dy).powi(2) + 500.0f64.powi(2)).sqrt();
        let d = distance_jd(&cfg(200.0, 0.2 + PI / 2.0, 100.0, 0.2, 500.0));
        assert!((d - direct).abs() < 1e-9);
        assert!((d - 547.722_557_505_166_1).abs() < 1e-6);
    }

    #[test]
    fn distance_rotation_invariance() {
        let a = distance_jd(&cfg(170.0, 0.4, 90.0, 1.1, 300.0));
        let b = distance_jd(&cfg(170.0, 2.4, 90.0, 3.1, 300.0));
        assert!((a - b).abs() < 1e-9);
        let c = distance_jd(&cfg(0.0, 0.0, 90.0, 1.1, 300.0));
        let d = distance_jd(&cfg(0.0, 2.0, 90.0, 1.1, 300.0));
        assert_eq!(c, d);
    }

    #[test]
    fn noise_examples() {
        let n = noise_power(-174.0, 20e6, 9.0);
        assert!((n / 6.324_555_320_336_759e-13 - 1.0).abs() < 1e-12);
        assert!((linear_to_db(n) + 30.0 + 91.989_700_043_360_19).abs() < 1e-9);
        assert!((noise_power(-174.0, 1.0, 0.0) / 3.981_071_705_534_986e-21 - 1.0).abs() < 1e-12);
        assert!((noise_power(-174.0, 20e6, 0.0) / 7.962_143_411_069_94e-14 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn presets_are_valid() {
        for env in Environment::presets() {
            env.validate().unwrap();
            assert!(env.eta_los() > env.eta_nlos());
        }
        assert_eq!(Environment::by_name("Dense-Urban").unwrap().sigma, 20.0);
        assert!(Environment::by_name("rural").is_none());
    }

    #[test]
    fn default_config() {
        let c = NetworkConfig::default();
        c.validate().unwrap();
        assert!((c.lambda_m() - 0.149_896_229).abs() < 1e-9);
        assert_eq!(c.n0_w, c.ne_w);
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let c = NetworkConfig { pj_w: 0.02, h_m: 1000.0, ..Default::default() };
        let back = NetworkConfig::from_json_str(&c.to_json_string()).unwrap();
        assert_eq!(c, back);

        let wrapped = format!("{{\"config\": {}, \"scp\": 0.5}}", c.to_json_string());
        assert_eq!(NetworkConfig::from_json_str(&wrapped).unwrap(), c);

        let partial = NetworkConfig::from_json_str(r#"{"h_m": 100, "env": "highrise urban"}"#).unwrap();
        assert_eq!(partial.h_m, 100.0);
        assert_eq!(partial.env, Environment::highrise_urban());

        match NetworkConfig::from_json_str(r#"{"h_m": -1}"#) {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "h_m"),
            other => panic!("{other:?}"),
        }
        match NetworkConfig::from_json_str(r#"{"hm": 3}"#) {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "hm"),
            other => panic!("{other:?}"),
        }
        match NetworkConfig::from_json_str(r#"{"alpha": 4}"#) {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "alpha"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gains_fold_into_powers() {
        let c = NetworkConfig { gain_s_db: 3.0, gain_j_db: -10.0, ..Default::default() };
        assert!((c.ps_eff() / (0.1 * 1.995_262_314_968_879_5) - 1.0).abs() < 1e-12);
        assert!((c.pj_eff() - 1e-3).abs() < 1e-15);
    }
}
