//! Points of C^k (k <= 2) and small complex matrices.
//!
//! One-dimensional points keep their second coordinate at zero, so norms and
//! distances are the same whichever dimension the owning map has.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point(pub [C64; 2]);

impl Point {
    pub fn new1(z: C64) -> Self {
        Point([z, ZERO])
    }

    pub fn new2(z: C64, w: C64) -> Self {
        Point([z, w])
    }

    pub fn real1(x: f64) -> Self {
        Point::new1(C64::new(x, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Real coordinates `(re0, im0, re1, im1)` truncated to `2k` entries.
    pub fn reals(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.0[..k].iter().flat_map(|c| [c.re, c.im])
    }
}

impl Index<usize> for Point {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Point {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point([self.0[0] * s, self.0[1] * s])
    }
}

/// A complex k×k matrix with k <= 2, stored row-major in a 2×2 block.
///
/// For k = 1 only the `[0][0]` entry is meaningful and the rest stays zero,
/// except `[1][1]` which is one so that products and determinants behave.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat {
    pub k: usize,
    pub m: [[C64; 2]; 2],
}

impl CMat {
    pub fn identity(k: usize) -> Self {
        CMat {
            k,
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn scalar(a: C64) -> Self {
        CMat {
            k: 1,
            m: [[a, ZERO], [ZERO, ONE]],
        }
    }

    pub fn new2(a: C64, b: C64, c: C64, d: C64) -> Self {
        CMat {
            k: 2,
            m: [[a, b], [c, d]],
        }
    }

    pub fn det(&self) -> C64 {
        if self.k == 1 {
            self.m[0][0]
        } else {
            self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
        }
    }

    /// Sum of squared moduli of all entries.
    pub fn frobenius_sqr(&self) -> f64 {
        if self.k == 1 {
            self.m[0][0].norm_sqr()
        } else {
            self.m.iter().flatten().map(|c| c.norm_sqr()).sum()
        }
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        if self.k == 1 {
            return [self.m[0][0] * v[0], ZERO];
        }
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Adjugate; equals `det * inverse` when invertible.
    pub fn adjugate(&self) -> Self {
        if self.k == 1 {
            return CMat::scalar(ONE);
        }
        let [[a, b], [c, d]] = self.m;
        CMat::new2(d, -b, -c, a)
    }

    /// Eigenvalues (one for k = 1, two for k = 2).
    pub fn eigenvalues(&self) -> Vec<C64> {
        if self.k == 1 {
            return vec![self.m[0][0]];
        }
        let tr = self.m[0][0] + self.m[1][1];
        let det = self.det();
        let disc = (tr * tr - det * 4.0).sqrt();
        // Stable pairing: the larger root from the sum with matching sign.
        let s = if (tr.conj() * disc).re >= 0.0 {
            tr + disc
        } else {
            tr - disc
        };
        if s.norm() == 0.0 {
            return vec![ZERO, ZERO];
        }
        let l1 = s * 0.5;
        let l2 = det / l1;
        vec![l1, l2]
    }
}

impl Mul for CMat {
    type Output = CMat;
    fn mul(self, o: CMat) -> CMat {
        if self.k == 1 {
            return CMat::scalar(self.m[0][0] * o.m[0][0]);
        }
        let mut r = [[ZERO; 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j];
            }
        }
        CMat { k: 2, m: r }
    }
}
