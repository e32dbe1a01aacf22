//! Small exact linear algebra over `Rat`: rank, row selection, inverse and
//! null space. Matrices are row-major `Vec<Vec<Rat>>`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rat;

/// Reduced row echelon form; returns the pivot columns.
fn rref(m: &mut [Vec<Rat>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip().expect("nonzero pivot");
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in 0..m[i].len() {
                    let delta = &f * &m[row][c];
                    m[i][c] -= &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Greedily picks indices of linearly independent rows, in order.
pub fn independent_rows(rows: &[Vec<Rat>], ncols: usize) -> Vec<usize> {
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    let mut picked = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        basis.push(row.clone());
        if rank(&basis, ncols) == basis.len() {
            picked.push(i);
            if picked.len() == ncols {
                break;
            }
        } else {
            basis.pop();
        }
    }
    picked
}

pub fn inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, n);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of `{x : rows · x = 0}`.
pub fn null_space(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); ncols];
            v[f] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -&m[i][f];
            }
            v
        })
        .collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Positive rescaling of a rational vector to a primitive integer vector.
pub fn primitive(v: &[Rat]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    primitive_int(ints)
}

pub fn primitive_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    debug_assert!(g.is_zero() || !g.is_negative());
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::int(n)
    }

    #[test]
    fn rank_and_null_space() {
        let m = vec![vec![r(1), r(2), r(3)], vec![r(2), r(4), r(6)], vec![r(0), r(1), r(1)]];
        assert_eq!(rank(&m, 3), 2);
        let ns = null_space(&m, 3);
        assert_eq!(ns.len(), 1);
        for row in &m {
            assert!(dot(row, &ns[0]).is_zero());
        }
        assert_eq!(independent_rows(&m, 3), vec![0, 2]);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = vec![vec![r(2), r(1)], vec![r(1), r(1)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![r(1), r(-1)], vec![r(-1), r(2)]]);
        assert!(inverse(&[vec![r(1), r(1)], vec![r(2), r(2)]]).is_none());
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![Rat::new(1, 2), Rat::new(-1, 3), Rat::zero()];
        assert_eq!(primitive(&v), vec![BigInt::from(3), BigInt::from(-2), BigInt::from(0)]);
    }
}
