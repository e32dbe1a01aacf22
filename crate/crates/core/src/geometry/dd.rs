//! Double description method for pointed polyhedral cones
//! `{y : a_i · y >= 0}`, in exact integer arithmetic.
//!
//! Rays are kept as primitive integer vectors. Adjacency of two extreme rays
//! uses the combinatorial test: their common zero set (over the constraints
//! processed so far) has at least `dim - 2` members and is not contained in
//! the zero set of any third ray.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg;
use crate::arith::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Bits,
}

/// Extreme rays of `{y : rows[i] · y >= 0}`.
///
/// Returns `None` when the cone is not pointed (the rows do not span
/// `dim`-space). A cone equal to `{0}` yields an empty list.
pub(crate) fn extreme_rays(rows: &[Vec<BigInt>], dim: usize) -> Option<Vec<Vec<BigInt>>> {
    let rat_rows: Vec<Vec<Rat>> = rows.iter().map(|r| r.iter().map(|x| Rat::from(x.clone())).collect()).collect();
    let basis = linalg::independent_rows(&rat_rows, dim);
    if basis.len() < dim {
        return None;
    }
    let square: Vec<Vec<Rat>> = basis.iter().map(|&i| rat_rows[i].clone()).collect();
    let inv = linalg::inverse(&square)?;

    let m = rows.len();
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vec<Rat> = (0..dim).map(|i| inv[i][j].clone()).collect();
            let mut zeros = Bits::new(m);
            for (k, &b) in basis.iter().enumerate() {
                if k != j {
                    zeros.set(b);
                }
            }
            Ray { v: linalg::primitive(&col), zeros }
        })
        .collect();

    for (idx, row) in rows.iter().enumerate() {
        if basis.contains(&idx) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|ray| dot(row, &ray.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (i, ray) in rays.iter_mut().enumerate() {
                if vals[i].is_zero() {
                    ray.zeros.set(idx);
                }
            }
            continue;
        }

        let mut created = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let blocked =
                    rays.iter().enumerate().any(|(k, other)| k != p && k != n && common.is_subset_of(&other.zeros));
                if blocked {
                    continue;
                }
                let sp = &vals[p];
                let sn = -&vals[n];
                let v: Vec<BigInt> = rays[n].v.iter().zip(&rays[p].v).map(|(yn, yp)| sp * yn + &sn * yp).collect();
                let mut zeros = common;
                zeros.set(idx);
                created.push(Ray { v: linalg::primitive_int(v), zeros });
            }
        }

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (i, mut ray) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                ray.zeros.set(idx);
            }
            next.push(ray);
        }
        next.extend(created);
        rays = next;
    }

    Some(rays.into_iter().map(|r| r.v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn positive_orthant() {
        let rows = vec![b(&[1, 0, 0]), b(&[0, 1, 0]), b(&[0, 0, 1])];
        let mut rays = extreme_rays(&rows, 3).unwrap();
        rays.sort();
        assert_eq!(rays, vec![b(&[0, 0, 1]), b(&[0, 1, 0]), b(&[1, 0, 0])]);
    }

    #[test]
    fn square_cone() {
        // homogenized unit square 0 <= x, y <= 1
        let rows = vec![b(&[1, 0, 0]), b(&[0, 1, 0]), b(&[0, 0, 1]), b(&[1, -1, 0]), b(&[1, 0, -1])];
        let rays = extreme_rays(&rows, 3).unwrap();
        assert_eq!(rays.len(), 4);
        for r in rays {
            assert!(r[0].is_positive());
        }
    }

    #[test]
    fn trivial_cone_has_no_rays() {
        let rows = vec![b(&[1]), b(&[-1])];
        assert_eq!(extreme_rays(&rows, 1).unwrap(), Vec::<Vec<BigInt>>::new());
    }

    #[test]
    fn non_pointed_is_rejected() {
        let rows = vec![b(&[1, 0])];
        assert!(extreme_rays(&rows, 2).is_none());
    }
}
