//! Fourier–Motzkin elimination with multiplier tracking.
//!
//! Right-hand sides are affine in `r`, so the same elimination decides
//! emptiness at a fixed radius and over a whole radius interval. Every
//! derived row carries the nonnegative multipliers of the original rows it
//! came from; a derived row `0 <= rhs(r)` with `rhs < 0` is a Farkas
//! certificate of infeasibility. Redundant rows are pruned with Chernikov's
//! rule (after `k` eliminations, rows combining more than `k + 1` originals
//! are redundant).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::linalg;
use crate::arith::{AffR, RInterval, Rat, Verdict};

/// Nonnegative multipliers `λ` with `Σ λ_i · normal_i = 0`; the combined
/// right-hand side `Σ λ_i · rhs_i` is negative, so `0 <= combined_rhs` is
/// infeasible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rat>,
    pub combined_rhs: AffR,
}

impl FarkasCertificate {
    /// Re-checks the certificate against `normal · x <= rhs(r)` for every
    /// `r` in `iv`.
    pub fn check(&self, normals: &[Vec<Rat>], rhs: &[AffR], iv: &RInterval) -> bool {
        if self.multipliers.len() != normals.len() || rhs.len() != normals.len() {
            return false;
        }
        if self.multipliers.iter().any(|m| m.is_negative()) {
            return false;
        }
        let dim = normals.first().map_or(0, |n| n.len());
        let cancels =
            (0..dim).all(|j| self.multipliers.iter().zip(normals).map(|(m, n)| m * &n[j]).sum::<Rat>().is_zero());
        let combined: AffR = self.multipliers.iter().zip(rhs).map(|(m, b)| b.scale(m)).sum();
        cancels && combined == self.combined_rhs && combined.cmp_on(&AffR::zero(), iv) == Verdict::AlwaysLess
    }
}

#[derive(Clone)]
struct Row {
    normal: Vec<Rat>,
    rhs: AffR,
    mult: Vec<Rat>,
}

impl Row {
    fn support(&self) -> usize {
        self.mult.iter().filter(|m| !m.is_zero()).count()
    }

    // positive rescaling so that equal rows compare equal
    fn normalize(mut self) -> Row {
        let pivot = self.normal.iter().find(|x| !x.is_zero()).map(|x| x.abs()).or_else(|| {
            let s: Rat = self.mult.iter().sum();
            (!s.is_zero()).then_some(s)
        });
        if let Some(p) = pivot {
            let inv = p.recip().expect("nonzero");
            self.normal = self.normal.iter().map(|x| x * &inv).collect();
            self.rhs = self.rhs.scale(&inv);
            self.mult = self.mult.iter().map(|x| x * &inv).collect();
        }
        self
    }
}

/// Eliminates every variable and returns the resulting `0 <= rhs` rows as
/// candidate certificates.
pub(crate) fn eliminate(normals: &[Vec<Rat>], rhs: &[AffR]) -> Vec<FarkasCertificate> {
    let m = normals.len();
    let dim = normals.first().map_or(0, |n| n.len());
    let mut rows: Vec<Row> = normals
        .iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (n, b))| {
            let mut mult = vec![Rat::zero(); m];
            mult[i] = Rat::one();
            Row { normal: n.clone(), rhs: b.clone(), mult }
        })
        .collect();

    let mut remaining: Vec<usize> = (0..dim).collect();
    let mut eliminated = 0;
    while !remaining.is_empty() {
        // cheapest variable first
        let (pos_in_remaining, var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &j)| {
                let p = rows.iter().filter(|r| r.normal[j].is_positive()).count();
                let n = rows.iter().filter(|r| r.normal[j].is_negative()).count();
                (p * n, j)
            })
            .map(|(i, &j)| (i, j))
            .expect("nonempty");
        remaining.remove(pos_in_remaining);
        eliminated += 1;

        let (mut next, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new());
        for row in rows {
            if row.normal[var].is_positive() {
                pos.push(row);
            } else if row.normal[var].is_negative() {
                neg.push(row);
            } else {
                next.push(row);
            }
        }
        for p in &pos {
            for q in &neg {
                let cp = p.normal[var].clone();
                let cq = -&q.normal[var];
                let combined = Row {
                    normal: p.normal.iter().zip(&q.normal).map(|(a, b)| a * &cq + b * &cp).collect(),
                    rhs: p.rhs.scale(&cq) + q.rhs.scale(&cp),
                    mult: p.mult.iter().zip(&q.mult).map(|(a, b)| a * &cq + b * &cp).collect(),
                };
                if combined.support() <= eliminated + 1 {
                    next.push(combined);
                }
            }
        }

        let mut seen = HashSet::new();
        rows =
            next.into_iter().map(Row::normalize).filter(|r| seen.insert((r.normal.clone(), r.rhs.clone()))).collect();
    }

    rows.into_iter()
        .map(|r| {
            // smallest integer multipliers
            let ints = linalg::primitive(&r.mult);
            let k = r
                .mult
                .iter()
                .zip(&ints)
                .find(|(m, _)| !m.is_zero())
                .map_or(Rat::one(), |(m, i)| &Rat::from(i.clone()) / m);
            FarkasCertificate { multipliers: ints.into_iter().map(Rat::from).collect(), combined_rhs: r.rhs.scale(&k) }
        })
        .collect()
}

/// Farkas certificate that `normal · x <= rhs(r)` is infeasible for every
/// `r` in `iv`, if elimination finds one.
pub fn emptiness_certificate(normals: &[Vec<Rat>], rhs: &[AffR], iv: &RInterval) -> Option<FarkasCertificate> {
    eliminate(normals, rhs).into_iter().find(|c| c.combined_rhs.cmp_on(&AffR::zero(), iv) == Verdict::AlwaysLess)
}
