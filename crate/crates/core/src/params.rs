//! Recoil units and the physical parameter set.
//!
//! Everything is dimensionless with ħ = k0 = E0 = 1, so the atomic mass is
//! m = ħ²k0²/(2E0) = 1/2. Energies and angular frequencies are in E0/ħ,
//! momenta in ħk0, lengths in 1/k0 and times in ħ/E0.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.0;
pub const K0: f64 = 1.0;
pub const E0: f64 = 1.0;
pub const MASS: f64 = HBAR * HBAR * K0 * K0 / (2.0 * E0);

/// Keys accepted by [`build_params`] that describe the physics.
pub const PHYSICAL_KEYS: [&str; 8] = [
    "omega_rabi",
    "delta0",
    "phi",
    "g",
    "chirp_rate",
    "sigma_p",
    "omega_trap",
    "t",
];

/// Run-level keys that may share a configuration map with the physical ones.
pub const RUN_KEYS: [&str; 3] = ["n", "grid.safety", "grid.cap"];

const REQUIRED_KEYS: [&str; 5] = ["omega_rabi", "delta0", "sigma_p", "omega_trap", "t"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub omega_rabi: f64,
    pub delta0: f64,
    pub phi: f64,
    pub g: f64,
    pub chirp_rate: f64,
    pub sigma_p: f64,
    pub omega_trap: f64,
    pub t: f64,
}

/// Builds validated parameters from a flat key-value map.
///
/// `phi` and `g` default to zero; `chirp_rate` defaults to the matched value
/// k0·g. The run-level keys `n`, `grid.safety` and `grid.cap` are ignored here.
pub fn build_params(config: &BTreeMap<String, f64>) -> Result<PhysParams> {
    for key in config.keys() {
        if !PHYSICAL_KEYS.contains(&key.as_str()) && !RUN_KEYS.contains(&key.as_str()) {
            return Err(Error::UnknownKey(key.clone()));
        }
    }
    for key in REQUIRED_KEYS {
        if !config.contains_key(key) {
            return Err(Error::MissingKey(key.to_string()));
        }
    }
    for (key, value) in config {
        if !value.is_finite() {
            return Err(Error::NonFiniteValue { key: key.clone() });
        }
    }
    let get = |key: &str| config.get(key).copied();
    let g = get("g").unwrap_or(0.0);
    let params = PhysParams {
        omega_rabi: get("omega_rabi").unwrap(),
        delta0: get("delta0").unwrap(),
        phi: get("phi").unwrap_or(0.0),
        g,
        chirp_rate: get("chirp_rate").unwrap_or(K0 * g),
        sigma_p: get("sigma_p").unwrap(),
        omega_trap: get("omega_trap").unwrap(),
        t: get("t").unwrap(),
    };
    params.validate()?;
    Ok(params)
}

impl PhysParams {
    /// Checks the documented invariants.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_rabi", self.omega_rabi),
            ("delta0", self.delta0),
            ("phi", self.phi),
            ("g", self.g),
            ("chirp_rate", self.chirp_rate),
            ("sigma_p", self.sigma_p),
            ("omega_trap", self.omega_trap),
            ("t", self.t),
        ];
        for (key, value) in fields {
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { key: key.into() });
            }
        }
        for (key, value) in [
            ("omega_rabi", self.omega_rabi),
            ("sigma_p", self.sigma_p),
            ("omega_trap", self.omega_trap),
        ] {
            if value <= 0.0 {
                return Err(Error::NonPositiveValue {
                    key: key.into(),
                    value,
                });
            }
        }
        if self.t < 0.0 {
            return Err(Error::NonPositiveValue {
                key: "t".into(),
                value: self.t,
            });
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        MASS
    }

    /// Doppler-dressed detuning B0(p) = k0 p/m + δ0.
    pub fn b0(&self, p: f64) -> f64 {
        K0 * p / MASS + self.delta0
    }

    /// True when the chirp exactly compensates the free-fall Doppler shift.
    pub fn chirp_matched(&self) -> bool {
        let expected = K0 * self.g;
        (self.chirp_rate - expected).abs() <= 1e-12 * expected.abs().max(1.0)
    }

    pub fn require_matched_chirp(&self) -> Result<()> {
        if self.chirp_matched() {
            Ok(())
        } else {
            Err(Error::ChirpMismatch {
                chirp_rate: self.chirp_rate,
                expected: K0 * self.g,
            })
        }
    }

    /// PRO frequency whose oscillator ground state has momentum scale σ_p.
    pub fn matched_omega(&self) -> f64 {
        matched_omega(self.sigma_p)
    }

    /// Copy with a new slope; a matched chirp stays matched.
    pub fn with_g(&self, g: f64) -> PhysParams {
        let mut out = *self;
        if self.chirp_matched() {
            out.chirp_rate = K0 * g;
        }
        out.g = g;
        out
    }

    pub fn with_t(&self, t: f64) -> PhysParams {
        PhysParams { t, ..*self }
    }

    /// Flat key-value echo in the configuration key set.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        [
            ("omega_rabi", self.omega_rabi),
            ("delta0", self.delta0),
            ("phi", self.phi),
            ("g", self.g),
            ("chirp_rate", self.chirp_rate),
            ("sigma_p", self.sigma_p),
            ("omega_trap", self.omega_trap),
            ("t", self.t),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

/// ω = σ_p²/(mħ).
pub fn matched_omega(sigma_p: f64) -> f64 {
    sigma_p * sigma_p / (MASS * HBAR)
}
