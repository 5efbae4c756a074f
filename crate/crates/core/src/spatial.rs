//! Uniform grid hashing of points in C^k (as R^{2k}) for fixed-radius
//! neighbour queries.

use crate::point::Point;
use std::collections::HashMap;

type Key = [i64; 4];

pub struct GridIndex {
    cell: f64,
    dims: usize,
    cells: HashMap<Key, Vec<u32>>,
}

impl GridIndex {
    /// Queries are exact for radii up to `cell`.
    pub fn new(cell: f64, k: usize) -> Self {
        assert!(cell > 0.0 && (1..=2).contains(&k));
        GridIndex {
            cell,
            dims: 2 * k,
            cells: HashMap::new(),
        }
    }

    fn key(&self, p: &Point) -> Key {
        let c = [p[0].re, p[0].im, p[1].re, p[1].im];
        let mut k = [0i64; 4];
        for d in 0..self.dims {
            k[d] = (c[d] / self.cell).floor() as i64;
        }
        k
    }

    pub fn insert(&mut self, id: u32, p: &Point) {
        let k = self.key(p);
        self.cells.entry(k).or_default().push(id);
    }

    /// Calls `f` on every id stored in the `3^{2k}` cells around `p` until it
    /// returns `true`; returns whether it did.
    pub fn any_near(&self, p: &Point, mut f: impl FnMut(u32) -> bool) -> bool {
        let base = self.key(p);
        let combos = 3usize.pow(self.dims as u32);
        for c in 0..combos {
            let mut k = base;
            let mut r = c;
            for kd in k.iter_mut().take(self.dims) {
                *kd += (r % 3) as i64 - 1;
                r /= 3;
            }
            if let Some(ids) = self.cells.get(&k) {
                if ids.iter().any(|&id| f(id)) {
                    return true;
                }
            }
        }
        false
    }

    /// Visits every id stored in the cells around `p`.
    pub fn for_each_near(&self, p: &Point, mut f: impl FnMut(u32)) {
        self.any_near(p, |id| {
            f(id);
            false
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::C64;

    #[test]
    fn finds_all_neighbours_within_cell() {
        let pts: Vec<Point> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.731;
                Point::new2(
                    C64::new(t.sin(), (2.0 * t).cos()),
                    C64::new(t.cos(), 0.3 * t.sin()),
                )
            })
            .collect();
        let r = 0.4;
        let mut g = GridIndex::new(r, 2);
        for (i, p) in pts.iter().enumerate() {
            g.insert(i as u32, p);
        }
        for q in &pts {
            let mut found = Vec::new();
            g.for_each_near(q, |id| {
                if pts[id as usize].dist(q) <= r {
                    found.push(id)
                }
            });
            found.sort();
            let brute: Vec<u32> = (0..pts.len() as u32)
                .filter(|&i| pts[i as usize].dist(q) <= r)
                .collect();
            assert_eq!(found, brute);
        }
    }
}
