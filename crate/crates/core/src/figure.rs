//! Static geometry for external plotting: orthant regions, capture balls
//! and packing balls at one radius.

use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::packings::PackingSet;
use crate::region::{regions_at, Octant};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionShape {
    pub sign: Octant,
    pub vertices: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FigureData {
    pub label: String,
    pub dim: usize,
    pub r: Rat,
    /// Present for dimension 3 and `1/2 <= r <= 2/3`.
    pub regions: Vec<RegionShape>,
    /// Balls `C((1-r) v, r)` around each vertex `v`, for `r <= 1`.
    pub capture_balls: Vec<Ball>,
    /// Balls `C(p, r)` around the packing points.
    pub packing_balls: Vec<Ball>,
}

pub fn figure_data(set: &PackingSet, r: &Rat) -> Result<FigureData> {
    if !r.is_positive() {
        return Err(Error::InvalidInput(format!("radius must be positive, got {r}")));
    }
    let n = set.dim;
    let regions = if n == 3 && r >= &Rat::new(1, 2) && r <= &Rat::new(2, 3) {
        regions_at(r).into_iter().map(|(sign, v)| RegionShape { sign, vertices: v.vertex_set() }).collect()
    } else {
        Vec::new()
    };
    let capture_balls = if r <= &Rat::one() {
        (0..n)
            .flat_map(|i| [Point::unit(n, i, 1), Point::unit(n, i, -1)])
            .map(|v| Ball { center: v.scaled(&(Rat::one() - r)), radius: r.clone() })
            .collect()
    } else {
        Vec::new()
    };
    let packing_balls = set.points.iter().map(|p| Ball { center: p.clone(), radius: r.clone() }).collect();
    Ok(FigureData { label: set.label.clone(), dim: n, r: r.clone(), regions, capture_balls, packing_balls })
}
