//! Lattice geometry, bond enumeration, and the spin-orbital-to-qubit layout.
//!
//! Sites of an `nx × ny` open-boundary rectangular lattice are addressed by
//! 1-based coordinates `(x, y)` and by the 1-based linear index
//! `lin = (x - 1) * ny + y` (column-major: `y` varies fastest). Every ordered
//! list in the crate — disorder draws, bond layers, qubit assignments — is
//! derived from these indices, so the conventions here are load-bearing for
//! reproducibility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based linear site index of 1-based coordinates `(x, y)` on a lattice
/// with `ny` rows per column: `(x - 1) * ny + y`.
pub fn site_index(x: usize, y: usize, ny: usize) -> usize {
    (x - 1) * ny + y
}

/// Spin species of a spin-orbital.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// An undirected nearest-neighbor bond, stored as linear site indices with
/// `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
}

/// Open-boundary rectangular lattice extent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub nx: usize,
    pub ny: usize,
}

impl LatticeGeometry {
    /// New geometry; both extents must be positive.
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::domain(format!(
                "lattice extents must be positive, got {nx}x{ny}"
            )));
        }
        Ok(LatticeGeometry { nx, ny })
    }

    /// Number of sites `nx * ny`.
    pub fn n_sites(&self) -> usize {
        self.nx * self.ny
    }

    /// Number of spin-orbitals / qubits: two per site.
    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites()
    }

    /// Linear index of `(x, y)`; panics outside the lattice (caller bug).
    pub fn site_index(&self, x: usize, y: usize) -> usize {
        assert!(
            (1..=self.nx).contains(&x) && (1..=self.ny).contains(&y),
            "site ({x},{y}) outside {}x{} lattice",
            self.nx,
            self.ny
        );
        site_index(x, y, self.ny)
    }

    /// Inverse of [`Self::site_index`]: 1-based coordinates of a linear index.
    pub fn coords(&self, lin: usize) -> (usize, usize) {
        assert!(
            (1..=self.n_sites()).contains(&lin),
            "linear index {lin} outside {}x{} lattice",
            self.nx,
            self.ny
        );
        let x = (lin - 1) / self.ny + 1;
        let y = (lin - 1) % self.ny + 1;
        (x, y)
    }

    /// All sites as `(x, y)`, ascending in linear index.
    pub fn sites(&self) -> Vec<(usize, usize)> {
        (1..=self.n_sites()).map(|lin| self.coords(lin)).collect()
    }

    /// All nearest-neighbor bonds in canonical order: ascending in
    /// `(min(a, b), max(a, b))` of the linear endpoint indices. Disorder
    /// realizations draw bond couplings in exactly this order.
    pub fn bonds(&self) -> Vec<Bond> {
        let mut bonds = Vec::new();
        for x in 1..=self.nx {
            for y in 1..=self.ny {
                let here = self.site_index(x, y);
                if x < self.nx {
                    bonds.push(Bond {
                        a: here,
                        b: self.site_index(x + 1, y),
                    });
                }
                if y < self.ny {
                    bonds.push(Bond {
                        a: here,
                        b: self.site_index(x, y + 1),
                    });
                }
            }
        }
        bonds.sort_by_key(|b| (b.a, b.b));
        bonds
    }

    /// Horizontal bonds `(x, y)-(x+1, y)` whose left column `x` is odd.
    pub fn h1_bonds(&self) -> Vec<Bond> {
        self.horizontal_bonds(true)
    }

    /// Horizontal bonds whose left column `x` is even.
    pub fn h2_bonds(&self) -> Vec<Bond> {
        self.horizontal_bonds(false)
    }

    /// Vertical bonds `(x, y)-(x, y+1)` whose lower row `y` is odd.
    pub fn v1_bonds(&self) -> Vec<Bond> {
        self.vertical_bonds(true)
    }

    /// Vertical bonds whose lower row `y` is even.
    pub fn v2_bonds(&self) -> Vec<Bond> {
        self.vertical_bonds(false)
    }

    fn horizontal_bonds(&self, odd: bool) -> Vec<Bond> {
        let mut bonds = Vec::new();
        for x in 1..self.nx {
            if (x % 2 == 1) == odd {
                for y in 1..=self.ny {
                    bonds.push(Bond {
                        a: self.site_index(x, y),
                        b: self.site_index(x + 1, y),
                    });
                }
            }
        }
        bonds.sort_by_key(|b| (b.a, b.b));
        bonds
    }

    fn vertical_bonds(&self, odd: bool) -> Vec<Bond> {
        let mut bonds = Vec::new();
        for y in 1..self.ny {
            if (y % 2 == 1) == odd {
                for x in 1..=self.nx {
                    bonds.push(Bond {
                        a: self.site_index(x, y),
                        b: self.site_index(x, y + 1),
                    });
                }
            }
        }
        bonds.sort_by_key(|b| (b.a, b.b));
        bonds
    }
}

/// Assignment of spin-orbitals to qubit positions along the Jordan–Wigner
/// chain.
///
/// The canonical mode index of orbital `(site lin, spin)` is
/// `2 * (lin - 1) + spin` with up = 0, down = 1; a layout is a permutation
/// from canonical modes to qubit positions. Physical results are
/// layout-independent (the tests rely on this); simulation cost is not,
/// which is why the interleaved layout — on-site pairs adjacent on the
/// chain — is the default everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitLayout {
    mode_to_qubit: Vec<usize>,
}

impl QubitLayout {
    /// Default layout: up/down orbitals of site `lin` sit at qubits
    /// `2 lin - 2` and `2 lin - 1`.
    pub fn interleaved(n_sites: usize) -> Self {
        QubitLayout {
            mode_to_qubit: (0..2 * n_sites).collect(),
        }
    }

    /// Alternate layout with all up orbitals first (qubits `0..n_sites`),
    /// then all down orbitals. Used to exercise layout independence.
    pub fn blocked(n_sites: usize) -> Self {
        let mut mode_to_qubit = vec![0; 2 * n_sites];
        for lin in 1..=n_sites {
            mode_to_qubit[2 * (lin - 1)] = lin - 1;
            mode_to_qubit[2 * (lin - 1) + 1] = n_sites + lin - 1;
        }
        QubitLayout { mode_to_qubit }
    }

    /// Layout from an explicit permutation `mode -> qubit`.
    pub fn from_permutation(mode_to_qubit: Vec<usize>) -> Result<Self> {
        let n = mode_to_qubit.len();
        let mut seen = vec![false; n];
        for &q in &mode_to_qubit {
            if q >= n || seen[q] {
                return Err(Error::domain(
                    "qubit layout must be a permutation of 0..n_modes",
                ));
            }
            seen[q] = true;
        }
        Ok(QubitLayout { mode_to_qubit })
    }

    /// Number of qubits (= number of spin-orbitals).
    pub fn n_qubits(&self) -> usize {
        self.mode_to_qubit.len()
    }

    /// Qubit carrying canonical mode `m`.
    pub fn qubit_of_mode(&self, m: usize) -> usize {
        self.mode_to_qubit[m]
    }

    /// Qubit carrying orbital `(lin, spin)` with 1-based `lin`.
    pub fn qubit(&self, lin: usize, spin: Spin) -> usize {
        let m = 2 * (lin - 1) + if spin == Spin::Down { 1 } else { 0 };
        self.qubit_of_mode(m)
    }
}

/// Checkerboard (Néel) reference occupation: site `(x, y)` holds one up
/// electron when `x + y` is even, one down electron otherwise. Returns the
/// per-qubit occupation (`1` = occupied) under the given layout; the state is
/// half filled with total S_z fixed by the sublattice imbalance.
pub fn checkerboard_occupation(geometry: &LatticeGeometry, layout: &QubitLayout) -> Vec<u8> {
    assert_eq!(
        layout.n_qubits(),
        geometry.n_qubits(),
        "layout size does not match geometry"
    );
    let mut occ = vec![0u8; geometry.n_qubits()];
    for (x, y) in geometry.sites() {
        let lin = geometry.site_index(x, y);
        let spin = if (x + y) % 2 == 0 { Spin::Up } else { Spin::Down };
        occ[layout.qubit(lin, spin)] = 1;
    }
    occ
}

/// Occupation vector rendered as a bitstring, character `i` = qubit `i`.
pub fn occupation_string(occ: &[u8]) -> String {
    occ.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}
