//! Site tensors for matrix-product states and operators.
//!
//! A state tensor is rank-3 with index order `(left bond, physical, right
//! bond)` stored row-major, physical dimension fixed at 2 (one qubit per
//! site). Both matrix views used by factorizations — rows `(l, p)` by
//! columns `r`, and rows `l` by columns `(p, r)` — are plain reshapes of the
//! row-major buffer, so they cost one copy into `faer` and nothing else.
//!
//! Operator tensors are rank-4 with index order `(left wire, p_out, p_in,
//! right wire)`, also row-major.

use faer::{Mat, MatRef};

use crate::C64;

/// Physical dimension of every site (qubit).
pub const PHYS_DIM: usize = 2;

/// Rank-3 MPS site tensor, row-major `(l, p, r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    pub dl: usize,
    pub dr: usize,
    pub data: Vec<C64>,
}

impl Tensor3 {
    pub fn zeros(dl: usize, dr: usize) -> Self {
        Tensor3 {
            dl,
            dr,
            data: vec![C64::new(0.0, 0.0); dl * PHYS_DIM * dr],
        }
    }

    #[inline]
    pub fn index(&self, l: usize, p: usize, r: usize) -> usize {
        debug_assert!(l < self.dl && p < PHYS_DIM && r < self.dr);
        (l * PHYS_DIM + p) * self.dr + r
    }

    #[inline]
    pub fn get(&self, l: usize, p: usize, r: usize) -> C64 {
        self.data[self.index(l, p, r)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, p: usize, r: usize, v: C64) {
        let i = self.index(l, p, r);
        self.data[i] = v;
    }

    /// View as a `(dl * 2) x dr` matrix with rows `(l, p)`.
    pub fn as_left_matrix(&self) -> Mat<C64> {
        Mat::from_fn(self.dl * PHYS_DIM, self.dr, |row, col| {
            self.data[row * self.dr + col]
        })
    }

    /// View as a `dl x (2 * dr)` matrix with columns `(p, r)`.
    pub fn as_right_matrix(&self) -> Mat<C64> {
        Mat::from_fn(self.dl, PHYS_DIM * self.dr, |row, col| {
            self.data[row * PHYS_DIM * self.dr + col]
        })
    }

    /// Inverse of [`Self::as_left_matrix`].
    pub fn from_left_matrix(m: MatRef<'_, C64>) -> Self {
        let dl = m.nrows() / PHYS_DIM;
        let dr = m.ncols();
        assert_eq!(dl * PHYS_DIM, m.nrows(), "row count must be even");
        let mut t = Tensor3::zeros(dl, dr);
        for row in 0..m.nrows() {
            for col in 0..dr {
                t.data[row * dr + col] = m[(row, col)];
            }
        }
        t
    }

    /// Inverse of [`Self::as_right_matrix`].
    pub fn from_right_matrix(m: MatRef<'_, C64>) -> Self {
        let dl = m.nrows();
        let dr = m.ncols() / PHYS_DIM;
        assert_eq!(dr * PHYS_DIM, m.ncols(), "column count must be even");
        let mut t = Tensor3::zeros(dl, dr);
        for row in 0..dl {
            for col in 0..m.ncols() {
                t.data[row * PHYS_DIM * dr + col] = m[(row, col)];
            }
        }
        t
    }

    /// The `dl x dr` slice at fixed physical value `p`.
    pub fn phys_slice(&self, p: usize) -> Mat<C64> {
        Mat::from_fn(self.dl, self.dr, |l, r| self.get(l, p, r))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, s: C64) {
        for x in &mut self.data {
            *x *= s;
        }
    }
}

/// Rank-4 MPO site tensor, row-major `(wl, p_out, p_in, wr)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    pub dl: usize,
    pub dr: usize,
    pub data: Vec<C64>,
}

impl Tensor4 {
    pub fn zeros(dl: usize, dr: usize) -> Self {
        Tensor4 {
            dl,
            dr,
            data: vec![C64::new(0.0, 0.0); dl * PHYS_DIM * PHYS_DIM * dr],
        }
    }

    #[inline]
    pub fn index(&self, wl: usize, p_out: usize, p_in: usize, wr: usize) -> usize {
        debug_assert!(wl < self.dl && p_out < PHYS_DIM && p_in < PHYS_DIM && wr < self.dr);
        ((wl * PHYS_DIM + p_out) * PHYS_DIM + p_in) * self.dr + wr
    }

    #[inline]
    pub fn get(&self, wl: usize, p_out: usize, p_in: usize, wr: usize) -> C64 {
        self.data[self.index(wl, p_out, p_in, wr)]
    }

    #[inline]
    pub fn set(&mut self, wl: usize, p_out: usize, p_in: usize, wr: usize, v: C64) {
        let i = self.index(wl, p_out, p_in, wr);
        self.data[i] = v;
    }

    /// The `dl x dr` wire-space slice at fixed `(p_out, p_in)`.
    pub fn wire_slice(&self, p_out: usize, p_in: usize) -> Mat<C64> {
        Mat::from_fn(self.dl, self.dr, |wl, wr| self.get(wl, p_out, p_in, wr))
    }

    /// View as a `(4 * dl) x dr` matrix with rows `(wl, p_out, p_in)`.
    pub fn as_left_matrix(&self) -> Mat<C64> {
        Mat::from_fn(self.dl * PHYS_DIM * PHYS_DIM, self.dr, |row, col| {
            self.data[row * self.dr + col]
        })
    }

    /// View as a `dl x (4 * dr)` matrix with columns `(p_out, p_in, wr)`.
    pub fn as_right_matrix(&self) -> Mat<C64> {
        Mat::from_fn(self.dl, PHYS_DIM * PHYS_DIM * self.dr, |row, col| {
            self.data[row * PHYS_DIM * PHYS_DIM * self.dr + col]
        })
    }

    /// Inverse of [`Self::as_left_matrix`].
    pub fn from_left_matrix(m: MatRef<'_, C64>) -> Self {
        let dl = m.nrows() / (PHYS_DIM * PHYS_DIM);
        let dr = m.ncols();
        assert_eq!(dl * PHYS_DIM * PHYS_DIM, m.nrows(), "row count must be a multiple of 4");
        let mut t = Tensor4::zeros(dl, dr);
        for row in 0..m.nrows() {
            for col in 0..dr {
                t.data[row * dr + col] = m[(row, col)];
            }
        }
        t
    }

    /// Inverse of [`Self::as_right_matrix`].
    pub fn from_right_matrix(m: MatRef<'_, C64>) -> Self {
        let dl = m.nrows();
        let dr = m.ncols() / (PHYS_DIM * PHYS_DIM);
        assert_eq!(dr * PHYS_DIM * PHYS_DIM, m.ncols(), "column count must be a multiple of 4");
        let mut t = Tensor4::zeros(dl, dr);
        for row in 0..dl {
            for col in 0..m.ncols() {
                t.data[row * PHYS_DIM * PHYS_DIM * dr + col] = m[(row, col)];
            }
        }
        t
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_from_seed, standard_normal};

    fn random_tensor(dl: usize, dr: usize, seed: u64) -> Tensor3 {
        let mut rng = rng_from_seed(seed);
        let mut t = Tensor3::zeros(dl, dr);
        for x in &mut t.data {
            *x = C64::new(standard_normal(&mut rng), standard_normal(&mut rng));
        }
        t
    }

    #[test]
    fn matrix_views_roundtrip() {
        let t = random_tensor(3, 4, 1);
        let left = t.as_left_matrix();
        assert_eq!((left.nrows(), left.ncols()), (6, 4));
        assert_eq!(Tensor3::from_left_matrix(left.as_ref()), t);

        let right = t.as_right_matrix();
        assert_eq!((right.nrows(), right.ncols()), (3, 8));
        assert_eq!(Tensor3::from_right_matrix(right.as_ref()), t);
    }

    #[test]
    fn views_agree_on_entries() {
        let t = random_tensor(2, 3, 2);
        let left = t.as_left_matrix();
        let right = t.as_right_matrix();
        for l in 0..2 {
            for p in 0..2 {
                for r in 0..3 {
                    assert_eq!(t.get(l, p, r), left[(l * 2 + p, r)]);
                    assert_eq!(t.get(l, p, r), right[(l, p * 3 + r)]);
                    assert_eq!(t.get(l, p, r), t.phys_slice(p)[(l, r)]);
                }
            }
        }
    }

    #[test]
    fn tensor4_layout() {
        let mut w = Tensor4::zeros(2, 3);
        w.set(1, 0, 1, 2, C64::new(7.0, 0.0));
        assert_eq!(w.get(1, 0, 1, 2), C64::new(7.0, 0.0));
        assert_eq!(w.wire_slice(0, 1)[(1, 2)], C64::new(7.0, 0.0));
        assert_eq!(w.wire_slice(1, 0)[(1, 2)], C64::new(0.0, 0.0));
    }
}
