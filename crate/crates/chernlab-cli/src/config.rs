//! Run configurations: JSON in, digest out.
//!
//! A run is a pure function of its config (plus the seed), and every
//! output file embeds the digest of the canonical config serialization,
//! so artifacts can always be traced back to their inputs.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Stamp out the model fields shared by parameter-point commands. serde's
/// `flatten` cannot coexist with `deny_unknown_fields`, so each config
/// carries the five fields directly; defaults are the reference Chern
/// regime d = 1, t₁ = 1, t₂ = ¼, φ = π/2, M = 0.
macro_rules! model_fields {
    ($name:ident { $($(#[$meta:meta])* $extra_field:ident : $extra_ty:ty = $extra_default:expr),* $(,)? }) => {
        #[derive(Debug, Clone, Serialize, Deserialize)]
        #[serde(deny_unknown_fields, default)]
        pub struct $name {
            pub d: f64,
            pub t1: f64,
            pub t2: f64,
            pub phi: f64,
            pub m: f64,
            $($(#[$meta])* pub $extra_field: $extra_ty,)*
        }

        impl Default for $name {
            fn default() -> Self {
                $name {
                    d: 1.0,
                    t1: 1.0,
                    t2: 0.25,
                    phi: FRAC_PI_2,
                    m: 0.0,
                    $($extra_field: $extra_default,)*
                }
            }
        }

        impl $name {
            pub fn geometry(&self) -> chernlab::Result<chernlab::lattice::HoneycombGeometry> {
                chernlab::lattice::build_geometry(self.d)
            }

            pub fn params(&self) -> chernlab::Result<chernlab::model::HaldaneParams> {
                chernlab::model::HaldaneParams::new(self.t1, self.t2, self.phi, self.m)
            }
        }
    };
}

model_fields!(BandsConfig {
    /// Total rows along Γ → K → M → K′ → Γ.
    samples: usize = 400,
});

model_fields!(ChernConfig {
    /// Link-variable grid.
    grid_n: usize = 24,
    /// Curvature-quadrature grid.
    curvature_n: usize = 96,
    /// Parallel-transport grid (≥ 24).
    transport_n: usize = 48,
});

model_fields!(CurvatureMapConfig {
    grid_n: usize = 96,
});

model_fields!(WannierConfig {
    grid_n: usize = 48,
    s_values: Vec<f64> = vec![0.0, 0.45, 1.0],
    /// Optional scaling scan over these grid sizes.
    scan_sizes: Vec<usize> = vec![],
});

model_fields!(MarkerConfig {
    sizes: Vec<usize> = vec![10, 14, 18],
    box_ratio: f64 = 0.4,
});

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseDiagramConfig {
    pub d: f64,
    pub t1: f64,
    pub t2: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub phi_samples: usize,
    pub m_min: f64,
    pub m_max: f64,
    pub m_samples: usize,
    pub grid_n: usize,
    pub threads: usize,
}

impl Default for PhaseDiagramConfig {
    fn default() -> Self {
        PhaseDiagramConfig {
            d: 1.0,
            t1: 1.0,
            t2: 0.25,
            phi_min: -3.0,
            phi_max: 3.0,
            phi_samples: 48,
            m_min: -1.8,
            m_max: 1.8,
            m_samples: 48,
            grid_n: 24,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelfcheckConfig {
    pub seed: u64,
    /// Test hook: corrupt the NNN sublattice sign during flake assembly;
    /// the spectral-equivalence check must then fail.
    pub corrupt_nnn_sign: bool,
}

/// FNV-1a (64-bit) over the canonical serialization; stable across runs
/// and platforms.
pub fn digest(canonical: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canonical.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Parse a config file into `T`, or take defaults when no path is given.
pub fn load<T: Default + serde::de::DeserializeOwned>(path: Option<&str>) -> Result<T, String> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| format!("cannot read config {p}: {e}"))?;
            serde_json::from_str(&text).map_err(|e| format!("bad config {p}: {e}"))
        }
    }
}

/// Canonical serialization + digest of a config.
pub fn canonicalize<T: Serialize>(config: &T) -> (String, u64) {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let digest = digest(&canonical);
    (canonical, digest)
}
