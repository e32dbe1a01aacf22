//! Packing sets in the unit cross-polytope: the explicit constructions,
//! exact verification and critical radii.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::geometry::{in_cross_polytope, l1_dist, Point};

/// Named constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Vertices,
    VerticesPlusCentroids,
    Q10,
    Q12,
    Q13,
}

impl Construction {
    pub const ALL: [Construction; 5] = [
        Construction::Vertices,
        Construction::VerticesPlusCentroids,
        Construction::Q10,
        Construction::Q12,
        Construction::Q13,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::Vertices => "vertices",
            Construction::VerticesPlusCentroids => "vertices_plus_centroids",
            Construction::Q10 => "q10",
            Construction::Q12 => "q12",
            Construction::Q13 => "q13",
        }
    }

    /// Radius at which the construction is a packing set, for dimension `n`.
    pub fn stated_radius(self, n: usize) -> Rat {
        match self {
            Construction::Vertices => Rat::one(),
            Construction::VerticesPlusCentroids => Rat::one() - Rat::new(1, n as i64),
            Construction::Q10 => Rat::new(2, 3),
            Construction::Q12 => Rat::new(3, 5),
            Construction::Q13 => Rat::new(6, 11),
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Construction> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown construction '{s}'")))
    }
}

/// A finite labeled point set in dimension `dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingSet {
    pub dim: usize,
    pub label: String,
    pub points: Vec<Point>,
}

impl PackingSet {
    /// Checks dimensions and distinctness. Containment is left to
    /// [`verify_packing`] so that broken sets can still be reported on.
    pub fn new(dim: usize, label: impl Into<String>, points: Vec<Point>) -> Result<PackingSet> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
        }
        let mut sorted: Vec<&Point> = points.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate points".into()));
        }
        Ok(PackingSet { dim, label: label.into(), points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn from_json(s: &str) -> Result<PackingSet> {
        let raw: PackingSet = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        PackingSet::new(raw.dim, raw.label, raw.points)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// One point per row, coordinates as `p/q`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let row: Vec<String> = p.coords.iter().map(Rat::to_string).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Image under a coordinate permutation and sign flip, both symmetries
    /// of the cross-polytope.
    pub fn transformed(&self, perm: &[usize], signs: &[i64]) -> PackingSet {
        let points = self
            .points
            .iter()
            .map(|p| Point::new(perm.iter().zip(signs).map(|(&j, &s)| &p.coords[j] * &Rat::int(s)).collect()))
            .collect();
        PackingSet { dim: self.dim, label: self.label.clone(), points }
    }
}

fn signed_units(n: usize) -> Vec<Point> {
    (0..n).flat_map(|i| [Point::unit(n, i, 1), Point::unit(n, i, -1)]).collect()
}

fn elevenths(rows: &[[i64; 3]]) -> impl Iterator<Item = Point> + '_ {
    rows.iter().map(|r| Point::over(11, r))
}

pub fn construct(which: Construction, n: usize) -> Result<PackingSet> {
    if n < 2 {
        return Err(Error::Unsupported(format!("{which} needs n >= 2, got {n}")));
    }
    if matches!(which, Construction::Q10 | Construction::Q12 | Construction::Q13) && n != 3 {
        return Err(Error::Unsupported(format!("{which} exists only for n = 3, got {n}")));
    }
    let mut points = signed_units(n);
    match which {
        Construction::Vertices => {}
        Construction::VerticesPlusCentroids => {
            let c = Point::over(n as i64, &vec![1; n]);
            points.push(c.neg());
            points.push(c);
        }
        Construction::Q10 => {
            for r in [[1, 1, 1], [-1, -1, 1], [-1, 1, -1], [1, -1, -1]] {
                points.push(Point::over(3, &r));
            }
        }
        Construction::Q12 => {
            for r in [[2, 2, 1], [-2, 1, 2], [1, -2, 2]] {
                let p = Point::over(5, &r);
                points.push(p.neg());
                points.push(p);
            }
        }
        Construction::Q13 => {
            points.extend(elevenths(&[
                [-1, 5, 5],
                [5, -1, 5],
                [5, 5, -1],
                [-5, -2, 4],
                [-5, 4, -2],
                [4, -2, -5],
                [-3, -5, -3],
            ]));
        }
    }
    PackingSet::new(n, which.name(), points)
}

/// Closest pair `(i, j)`, `i < j`, with ties broken by the smallest index
/// pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosestPair {
    pub distance: Rat,
    pub pair: (usize, usize),
}

pub fn min_pairwise_distance(set: &PackingSet) -> Result<ClosestPair> {
    let m = set.points.len();
    if m < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 points, got {m}")));
    }
    let pts = &set.points;
    (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..m)
                .map(move |j| ClosestPair { distance: l1_dist(&pts[i], &pts[j]).expect("same dim"), pair: (i, j) })
        })
        .min_by(|a, b| a.distance.cmp(&b.distance).then(a.pair.cmp(&b.pair)))
        .ok_or_else(|| Error::InvalidInput("no pairs".into()))
}

fn outside_points(set: &PackingSet) -> Vec<usize> {
    set.points.iter().enumerate().filter(|(_, p)| !in_cross_polytope(p, &Rat::one(), true)).map(|(i, _)| i).collect()
}

/// Largest `r` for which the set packs `r`-scaled copies of the body: half
/// the minimum distance.
pub fn critical_radius(set: &PackingSet) -> Result<Rat> {
    if let Some(&index) = outside_points(set).first() {
        return Err(Error::Containment { index });
    }
    Ok(min_pairwise_distance(set)?.distance * Rat::new(1, 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub r: Rat,
    pub contained: bool,
    pub min_pairwise: Option<Rat>,
    pub violating_pairs: Vec<(usize, usize)>,
    pub outside_points: Vec<usize>,
}

impl VerifyReport {
    pub fn is_packing(&self) -> bool {
        self.contained && self.violating_pairs.is_empty()
    }
}

/// Checks containment in the closed body and `distance >= 2r` for every
/// pair.
pub fn verify_packing(set: &PackingSet, r: &Rat) -> VerifyReport {
    let two_r = r * &Rat::int(2);
    let m = set.points.len();
    let pts = &set.points;
    let mut violating: Vec<(usize, usize)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| (i + 1..m).map(move |j| (i, j)))
        .filter(|&(i, j)| l1_dist(&pts[i], &pts[j]).expect("same dim") < two_r)
        .collect();
    violating.sort();
    let outside = outside_points(set);
    VerifyReport {
        r: r.clone(),
        contained: outside.is_empty(),
        min_pairwise: min_pairwise_distance(set).ok().map(|c| c.distance),
        violating_pairs: violating,
        outside_points: outside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_sizes() {
        assert_eq!(construct(Construction::Vertices, 4).unwrap().len(), 8);
        assert_eq!(construct(Construction::VerticesPlusCentroids, 3).unwrap().len(), 8);
        assert_eq!(construct(Construction::Q10, 3).unwrap().len(), 10);
        assert_eq!(construct(Construction::Q12, 3).unwrap().len(), 12);
        let q13 = construct(Construction::Q13, 3).unwrap();
        assert_eq!(q13.len(), 13);
        assert!(q13.points.contains(&Point::over(11, &[-3, -5, -3])));
        assert!(construct(Construction::Q13, 4).is_err());
        assert!(construct(Construction::Vertices, 1).is_err());
    }

    #[test]
    fn minimum_distances() {
        let md = |c| min_pairwise_distance(&construct(c, 3).unwrap()).unwrap().distance;
        assert_eq!(md(Construction::Q10), Rat::new(4, 3));
        assert_eq!(md(Construction::Q12), Rat::new(6, 5));
        assert_eq!(md(Construction::Q13), Rat::new(12, 11));
    }

    #[test]
    fn radii_match_stated_values() {
        for c in Construction::ALL {
            let set = construct(c, 3).unwrap();
            assert_eq!(critical_radius(&set).unwrap(), c.stated_radius(3), "{c}");
        }
        assert_eq!(critical_radius(&construct(Construction::Vertices, 5).unwrap()).unwrap(), Rat::one());
    }

    #[test]
    fn verification_reports_violations() {
        let q10 = construct(Construction::Q10, 3).unwrap();
        assert!(verify_packing(&q10, &Rat::new(2, 3)).is_packing());
        let rep = verify_packing(&q10, &Rat::new(7, 10));
        assert!(rep.contained);
        // e1 against (1,1,1)/3 at distance 4/3 < 7/5
        assert!(rep.violating_pairs.contains(&(0, 6)));
    }

    #[test]
    fn perturbed_set_reports_broken_pairs() {
        let mut q13 = construct(Construction::Q13, 3).unwrap();
        // (-3,-5,-3)/11 -> (-2,-5,-3)/11
        q13.points[12] = Point::over(11, &[-2, -5, -3]);
        let rep = verify_packing(&q13, &Rat::new(6, 11));
        assert!(rep.contained);
        assert!(!rep.violating_pairs.is_empty());
        let broken: Vec<(usize, usize)> = (0..12)
            .filter(|&i| l1_dist(&q13.points[i], &q13.points[12]).unwrap() < Rat::new(12, 11))
            .map(|i| (i, 12))
            .collect();
        assert_eq!(rep.violating_pairs, broken);
    }

    #[test]
    fn containment_reported_before_radius() {
        let set = PackingSet::new(2, "bad", vec![Point::over(1, &[1, 1]), Point::origin(2)]).unwrap();
        assert_eq!(critical_radius(&set), Err(Error::Containment { index: 0 }));
    }

    #[test]
    fn json_and_csv() {
        let set = construct(Construction::Q13, 3).unwrap();
        let back = PackingSet::from_json(&set.to_json()).unwrap();
        assert_eq!(back, set);
        assert!(set.to_csv().lines().any(|l| l == "-3/11,-5/11,-3/11"));
        let unicode = r#"{"dim":2,"label":"x","points":[["−1/2","0"],["1/2","0"]]}"#;
        assert_eq!(PackingSet::from_json(unicode).unwrap().points[0], Point::over(2, &[-1, 0]));
        assert!(PackingSet::from_json(r#"{"dim":2,"label":"x","points":[["0","0"],["0","0"]]}"#).is_err());
    }
}
