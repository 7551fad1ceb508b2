//! Generalized single-band Hubbard models and their disorder realizations.
//!
//! A model instance fixes the lattice, the clean couplings `(t, u, v)`, the
//! disorder strength `d`, and a seed. Realizing it draws one standard normal
//! per bond (hopping disorder, `t_bond = t + d * N(0,1)`) and one per site
//! (random potential, `mu_site = d * N(0,1)`), in canonical bond order
//! followed by ascending site order. The draws happen even at `d = 0`, so a
//! realization is a pure function of `(geometry, seed)` layout-wise and the
//! disorder strength only scales the offsets.
//!
//! The second-quantized Hamiltonian enumerated by [`HubbardModel::terms`]:
//!
//! ```text
//! H = Σ_bond Σ_sigma  -t_bond (c†_{a sigma} c_{b sigma} + h.c.)
//!   + Σ_site u * n_up n_down
//!   + Σ_site mu_site (n_up + n_down)
//!   + Σ_bond Σ_{sigma sigma'} v * n_{a sigma} n_{b sigma'}
//! ```
//!
//! in canonical mode indices `m = 2 (lin - 1) + spin` (up = 0, down = 1).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{checkerboard_occupation, LatticeGeometry, QubitLayout, Spin};
use crate::rng::{rng_from_seed, standard_normal, RNG_SCHEME};

/// Canonical mode index of orbital `(lin, spin)`: up/down interleaved.
pub fn mode_index(lin: usize, spin: Spin) -> usize {
    2 * (lin - 1) + if spin == Spin::Down { 1 } else { 0 }
}

/// One second-quantized term, in canonical mode indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FermionTerm {
    /// `amp * (c†_a c_b + c†_b c_a)`, `a != b`.
    Hop { a: usize, b: usize, amp: f64 },
    /// `amp * n_mode`.
    Occ { mode: usize, amp: f64 },
    /// `amp * n_a n_b`, `a != b`.
    OccOcc { a: usize, b: usize, amp: f64 },
}

/// Flat configuration for one model, TOML- and JSON-serializable.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelConfig {
    pub nx: usize,
    pub ny: usize,
    /// Clean hopping amplitude.
    #[serde(default = "default_t")]
    pub t: f64,
    /// On-site interaction.
    #[serde(default)]
    pub u: f64,
    /// Nearest-neighbor density-density interaction.
    #[serde(default)]
    pub v: f64,
    /// Disorder strength (standard deviation of bond and site offsets).
    #[serde(default)]
    pub d: f64,
    /// Disorder seed.
    #[serde(default)]
    pub seed: u64,
}

fn default_t() -> f64 {
    1.0
}

impl ModelConfig {
    /// Parse from a TOML document with the flat keys of this struct.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::config(format!("bad model config: {e}")))
    }

    /// Realize the disorder and return the concrete model.
    pub fn realize(&self) -> Result<HubbardModel> {
        let geometry = LatticeGeometry::new(self.nx, self.ny)?;
        realize_model(geometry, self.t, self.u, self.v, self.d, self.seed)
    }
}

/// A concrete model: geometry, couplings, and realized disorder.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HubbardModel {
    pub geometry: LatticeGeometry,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub d: f64,
    pub seed: u64,
    /// Identifier of the draw conventions used for the disorder.
    pub rng_scheme: String,
    /// Realized hopping per bond, canonical bond order.
    pub bond_t: Vec<f64>,
    /// Realized on-site potential per site, ascending linear index.
    pub site_mu: Vec<f64>,
}

/// Draw the disorder realization for `(geometry, t, u, v, d, seed)`.
pub fn realize_model(
    geometry: LatticeGeometry,
    t: f64,
    u: f64,
    v: f64,
    d: f64,
    seed: u64,
) -> Result<HubbardModel> {
    for (name, value) in [("t", t), ("u", u), ("v", v), ("d", d)] {
        if !value.is_finite() {
            return Err(Error::domain(format!("coupling {name} must be finite, got {value}")));
        }
    }
    if d < 0.0 {
        return Err(Error::domain(format!("disorder strength must be >= 0, got {d}")));
    }
    let mut rng = rng_from_seed(seed);
    // Draw order is part of the reproducibility contract: bonds first
    // (canonical order), then sites (ascending linear index).
    let bond_t: Vec<f64> = geometry
        .bonds()
        .iter()
        .map(|_| t + d * standard_normal(&mut rng))
        .collect();
    let site_mu: Vec<f64> = (1..=geometry.n_sites())
        .map(|_| d * standard_normal(&mut rng))
        .collect();
    Ok(HubbardModel {
        geometry,
        t,
        u,
        v,
        d,
        seed,
        rng_scheme: RNG_SCHEME.to_string(),
        bond_t,
        site_mu,
    })
}

impl HubbardModel {
    /// Number of spin-orbitals / qubits.
    pub fn n_qubits(&self) -> usize {
        self.geometry.n_qubits()
    }

    /// All second-quantized terms with exactly zero-amplitude ones skipped.
    ///
    /// Order: hopping per bond (up then down), on-site interaction per site,
    /// site potentials per site (up then down), nearest-neighbor
    /// density-density per bond (up-up, up-down, down-up, down-down).
    pub fn terms(&self) -> Vec<FermionTerm> {
        let g = &self.geometry;
        let bonds = g.bonds();
        let mut terms = Vec::new();
        for (bi, bond) in bonds.iter().enumerate() {
            let amp = -self.bond_t[bi];
            if amp != 0.0 {
                for spin in [Spin::Up, Spin::Down] {
                    terms.push(FermionTerm::Hop {
                        a: mode_index(bond.a, spin),
                        b: mode_index(bond.b, spin),
                        amp,
                    });
                }
            }
        }
        if self.u != 0.0 {
            for lin in 1..=g.n_sites() {
                terms.push(FermionTerm::OccOcc {
                    a: mode_index(lin, Spin::Up),
                    b: mode_index(lin, Spin::Down),
                    amp: self.u,
                });
            }
        }
        for lin in 1..=g.n_sites() {
            let mu = self.site_mu[lin - 1];
            if mu != 0.0 {
                for spin in [Spin::Up, Spin::Down] {
                    terms.push(FermionTerm::Occ {
                        mode: mode_index(lin, spin),
                        amp: mu,
                    });
                }
            }
        }
        if self.v != 0.0 {
            for bond in &bonds {
                for sa in [Spin::Up, Spin::Down] {
                    for sb in [Spin::Up, Spin::Down] {
                        terms.push(FermionTerm::OccOcc {
                            a: mode_index(bond.a, sa),
                            b: mode_index(bond.b, sb),
                            amp: self.v,
                        });
                    }
                }
            }
        }
        terms
    }

    /// Particle-number sector `(n_up, n_down)` of the checkerboard reference
    /// state; all ground-state searches in this crate target it.
    pub fn checkerboard_sector(&self) -> (usize, usize) {
        let layout = QubitLayout::interleaved(self.geometry.n_sites());
        let occ = checkerboard_occupation(&self.geometry, &layout);
        let mut n_up = 0;
        let mut n_down = 0;
        for lin in 1..=self.geometry.n_sites() {
            n_up += occ[layout.qubit(lin, Spin::Up)] as usize;
            n_down += occ[layout.qubit(lin, Spin::Down)] as usize;
        }
        (n_up, n_down)
    }

    /// Canonical JSON encoding (field order fixed by the struct).
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::format(e.to_string()))
    }

    /// Parse a model previously exported with [`Self::to_json`].
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::format(e.to_string()))
    }

    /// Hex SHA-256 of the compact canonical JSON. Any change to geometry,
    /// couplings, seed, or realized disorder changes the hash; used as the
    /// cache key for benchmark runs.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("model serialization cannot fail");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(nx: usize, ny: usize) -> LatticeGeometry {
        LatticeGeometry::new(nx, ny).unwrap()
    }

    #[test]
    fn clean_model_has_uniform_couplings() {
        let m = realize_model(geom(2, 3), 1.0, 8.0, 0.0, 0.0, 99).unwrap();
        assert_eq!(m.bond_t.len(), 7);
        assert_eq!(m.site_mu.len(), 6);
        assert!(m.bond_t.iter().all(|&t| t == 1.0));
        assert!(m.site_mu.iter().all(|&mu| mu == 0.0));
    }

    #[test]
    fn disorder_draw_order_is_bonds_then_sites() {
        let m = realize_model(geom(1, 3), 0.0, 0.0, 0.0, 1.0, 123).unwrap();
        // Same stream drawn by hand: two bonds then three sites.
        let mut rng = rng_from_seed(123);
        let expect: Vec<f64> = (0..5).map(|_| standard_normal(&mut rng)).collect();
        assert_eq!(m.bond_t, &expect[..2]);
        assert_eq!(m.site_mu, &expect[2..]);
    }

    #[test]
    fn realization_is_deterministic_and_seed_sensitive() {
        let a = realize_model(geom(2, 2), 1.0, 2.0, 0.5, 0.3, 7).unwrap();
        let b = realize_model(geom(2, 2), 1.0, 2.0, 0.5, 0.3, 7).unwrap();
        let c = realize_model(geom(2, 2), 1.0, 2.0, 0.5, 0.3, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.bond_t, c.bond_t);
        assert_eq!(a.content_hash(), b.content_hash());
        assert_ne!(a.content_hash(), c.content_hash());
    }

    #[test]
    fn dimer_terms_are_exactly_the_textbook_four() {
        let m = realize_model(geom(1, 2), 1.0, 4.0, 0.0, 0.0, 0).unwrap();
        let terms = m.terms();
        assert_eq!(
            terms,
            vec![
                FermionTerm::Hop { a: 0, b: 2, amp: -1.0 },
                FermionTerm::Hop { a: 1, b: 3, amp: -1.0 },
                FermionTerm::OccOcc { a: 0, b: 1, amp: 4.0 },
                FermionTerm::OccOcc { a: 2, b: 3, amp: 4.0 },
            ]
        );
    }

    #[test]
    fn optional_couplings_enter_terms() {
        let m = realize_model(geom(1, 2), 1.0, 0.0, 0.5, 0.2, 3).unwrap();
        let terms = m.terms();
        let hops = terms.iter().filter(|t| matches!(t, FermionTerm::Hop { .. })).count();
        let occs = terms.iter().filter(|t| matches!(t, FermionTerm::Occ { .. })).count();
        let occoccs = terms
            .iter()
            .filter(|t| matches!(t, FermionTerm::OccOcc { .. }))
            .count();
        assert_eq!(hops, 2); // one bond, two spins
        assert_eq!(occs, 4); // two sites, two spins (d != 0)
        assert_eq!(occoccs, 4); // v term: four spin combinations, no u term
    }

    #[test]
    fn config_toml_and_json_roundtrip() {
        let cfg = ModelConfig::from_toml_str(
            "nx = 2\nny = 3\nt = 1.0\nu = 8.0\nv = 0.25\nd = 0.1\nseed = 42\n",
        )
        .unwrap();
        assert_eq!(cfg.u, 8.0);
        let m = cfg.realize().unwrap();
        let m2 = HubbardModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(m, m2);
        assert_eq!(m.rng_scheme, "chacha12/box-muller-v1");

        // defaults: t = 1, rest zero
        let cfg2 = ModelConfig::from_toml_str("nx = 1\nny = 2\nu = 2.0\n").unwrap();
        assert_eq!(cfg2.t, 1.0);
        assert_eq!(cfg2.v, 0.0);
        assert_eq!(cfg2.seed, 0);
    }

    #[test]
    fn checkerboard_sector_counts() {
        for ((nx, ny), want) in [((1, 2), (1, 1)), ((1, 3), (2, 1)), ((3, 3), (5, 4))] {
            let m = realize_model(geom(nx, ny), 1.0, 2.0, 0.0, 0.0, 0).unwrap();
            assert_eq!(m.checkerboard_sector(), want);
        }
    }

    #[test]
    fn invalid_couplings_are_rejected() {
        assert!(realize_model(geom(1, 2), f64::NAN, 0.0, 0.0, 0.0, 0).is_err());
        assert!(realize_model(geom(1, 2), 1.0, 0.0, 0.0, -0.1, 0).is_err());
    }
}
