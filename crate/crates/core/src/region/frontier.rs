//! Which orthant regions a given configuration occupies or blocks.

use serde::{Deserialize, Serialize};

use super::{region_hrep, Octant, Piece, Region};
use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::geometry::{l1_dist, Point};
use crate::packings::PackingSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionState {
    Occupied,
    Blocked,
    Open,
}

/// A point of the set within `< 2r` of every region vertex, hence of the
/// whole region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blocker {
    pub index: usize,
    pub point: Point,
    pub distances: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionStatus {
    pub sign: Octant,
    pub state: RegionState,
    pub vertices: Vec<Point>,
    pub occupants: Vec<usize>,
    pub blockers: Vec<Blocker>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierReport {
    pub label: String,
    pub r: Rat,
    pub regions: Vec<RegionStatus>,
}

impl FrontierReport {
    pub fn region(&self, sign: Octant) -> &RegionStatus {
        &self.regions[sign.index()]
    }
}

/// Classifies each orthant region at `r` as occupied by a point of `set`,
/// blocked by one, or open.
pub fn frontier_analysis(set: &PackingSet, r: &Rat) -> Result<FrontierReport> {
    if set.dim != 3 {
        return Err(Error::Unsupported(format!("frontier analysis is 3-dimensional, got {}", set.dim)));
    }
    if r <= &Rat::new(1, 2) || r > &Rat::new(2, 3) {
        return Err(Error::Unsupported(format!("frontier analysis needs r in (1/2, 2/3], got {r}")));
    }
    let two_r = r * &Rat::int(2);
    let mut regions = Vec::new();
    for sign in Octant::all() {
        let h = region_hrep(sign, r)?;
        let vertices = Region::new(sign, Piece::Whole)?.eval(r).vertices;
        let occupants: Vec<usize> =
            set.points.iter().enumerate().filter(|(_, p)| h.contains_point(p)).map(|(i, _)| i).collect();
        let mut blockers = Vec::new();
        for (index, p) in set.points.iter().enumerate() {
            let distances = vertices.iter().map(|v| l1_dist(p, v)).collect::<Result<Vec<_>>>()?;
            if distances.iter().all(|d| d < &two_r) {
                blockers.push(Blocker { index, point: p.clone(), distances });
            }
        }
        let state = if !occupants.is_empty() {
            RegionState::Occupied
        } else if !blockers.is_empty() {
            RegionState::Blocked
        } else {
            RegionState::Open
        };
        regions.push(RegionStatus { sign, state, vertices, occupants, blockers });
    }
    Ok(FrontierReport { label: set.label.clone(), r: r.clone(), regions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packings::{construct, Construction};

    #[test]
    fn q13_leaves_one_region_blocked() {
        let set = construct(Construction::Q13, 3).unwrap();
        let rep = frontier_analysis(&set, &Rat::new(6, 11)).unwrap();
        let plus = Octant::from_index(0).unwrap();
        for s in Octant::all() {
            let expect = if s == plus { RegionState::Blocked } else { RegionState::Occupied };
            assert_eq!(rep.region(s).state, expect, "{s}");
        }
        let b = &rep.region(plus).blockers;
        // the three points with a -1/11 coordinate all block it
        assert_eq!(b.len(), 3);
        assert_eq!(b[0].point, Point::over(11, &[-1, 5, 5]));
        let d: Vec<Rat> = [10, 10, 10, 2].iter().map(|&k| Rat::new(k, 11)).collect();
        assert_eq!(b[0].distances, d);
    }

    #[test]
    fn q10_occupies_even_octants() {
        let set = construct(Construction::Q10, 3).unwrap();
        let rep = frontier_analysis(&set, &Rat::new(2, 3)).unwrap();
        for s in Octant::all() {
            assert_eq!(rep.region(s).state == RegionState::Occupied, s.is_even(), "{s}");
        }
    }

    #[test]
    fn vertices_leave_everything_open() {
        let set = construct(Construction::Vertices, 3).unwrap();
        let rep = frontier_analysis(&set, &Rat::new(2, 3)).unwrap();
        assert!(rep.regions.iter().all(|s| s.state == RegionState::Open));
    }
}
