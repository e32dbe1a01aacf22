//! The leftover part of the cross-polytope that lies at distance at least
//! `2r` from every vertex, split by sign orthant, and the certificates
//! built on it.
//!
//! In dimension 3 each orthant piece is a tetrahedron whose vertices are
//! affine in `r`; everything parametric below works on those formulas.

mod blocking;
mod bound;
mod frontier;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{AffR, RInterval, Rat};
use crate::error::{Error, Result};
use crate::geometry::{
    dd_convert, l1_dist, to_hrep, AffPoint, FarkasCertificate, HPolytope, Halfspace, Point, VPolytope,
};

pub use blocking::{
    blocking_check, build_block_table, occupancy_bound, region_diameter_check, BlockEntry, BlockEvidence, BlockTable,
    DiameterEvidence, OccupancyMode, OccupancyResult, PairEvidence, RegionDiameter,
};
pub use bound::{gamma_upper_bound, replay_certificate, BoundCertificate, Evidence, Pipeline};
pub use frontier::{frontier_analysis, Blocker, FrontierReport, RegionState, RegionStatus};

/// Sign pattern of an orthant of R^3. Index bit `i` set means coordinate `i`
/// is negative, so index 0 is `(1,1,1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Octant(u8);

impl Octant {
    pub fn from_index(idx: usize) -> Result<Octant> {
        if idx < 8 {
            Ok(Octant(idx as u8))
        } else {
            Err(Error::InvalidInput(format!("octant index {idx} out of range")))
        }
    }

    pub fn from_signs(s: [i64; 3]) -> Result<Octant> {
        let mut idx = 0;
        for (i, &x) in s.iter().enumerate() {
            match x {
                1 => {}
                -1 => idx |= 1 << i,
                _ => return Err(Error::InvalidInput(format!("sign must be +1 or -1, got {x}"))),
            }
        }
        Ok(Octant(idx))
    }

    pub fn all() -> impl Iterator<Item = Octant> {
        (0..8).map(Octant)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn sign(self, i: usize) -> i64 {
        if self.0 >> i & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn signs(self) -> [i64; 3] {
        [self.sign(0), self.sign(1), self.sign(2)]
    }

    /// Even number of negative signs.
    pub fn is_even(self) -> bool {
        self.0.count_ones().is_multiple_of(2)
    }

    pub fn flip(self, i: usize) -> Octant {
        Octant(self.0 ^ (1 << i))
    }
}

impl fmt::Display for Octant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.signs();
        write!(f, "({a},{b},{c})")
    }
}

impl fmt::Debug for Octant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Octant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.signs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Octant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Octant, D::Error> {
        let s = <[i64; 3]>::deserialize(d)?;
        Octant::from_signs(s).map_err(serde::de::Error::custom)
    }
}

/// The whole orthant region or one of its three subcells. Subcell `i`
/// (1-based) is the part where coordinate `i` has the smallest magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Piece {
    Whole,
    Subcell(u8),
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::Whole => write!(f, "whole"),
            Piece::Subcell(i) => write!(f, "subcell {i}"),
        }
    }
}

/// Parametric polytope: a region or subcell with its vertex formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub sign: Octant,
    pub piece: Piece,
    pub vertices: Vec<AffPoint>,
}

impl Region {
    pub fn new(sign: Octant, piece: Piece) -> Result<Region> {
        let vertices = match piece {
            Piece::Whole => region_vertices(sign),
            Piece::Subcell(i) => subcell_vertices(sign, i)?,
        };
        Ok(Region { sign, piece, vertices })
    }

    pub fn eval(&self, r: &Rat) -> VPolytope {
        VPolytope { dim: 3, vertices: self.vertices.iter().map(|v| v.eval(r)).collect() }
    }
}

fn a_coord() -> AffR {
    AffR::q(2, 1, -1, 1)
}

fn b_coord() -> AffR {
    AffR::q(-1, 1, 1, 1)
}

fn half_r() -> AffR {
    AffR::q(1, 2, 0, 1)
}

fn third() -> AffR {
    AffR::constant(Rat::new(1, 3))
}

fn signed(sign: Octant, coords: [AffR; 3]) -> AffPoint {
    AffPoint::new(coords.into_iter().enumerate().map(|(i, c)| c.scale(&Rat::int(sign.sign(i)))).collect())
}

/// The four vertices, in order: `σ(2r-1, 2r-1, 2r-1)`, then the three
/// points with one coordinate `2r-1` (last, middle, first) and the others
/// `1-r`.
pub fn region_vertices(sign: Octant) -> Vec<AffPoint> {
    let (a, b) = (a_coord(), b_coord());
    vec![
        signed(sign, [a.clone(), a.clone(), a.clone()]),
        signed(sign, [b.clone(), b.clone(), a.clone()]),
        signed(sign, [b.clone(), a.clone(), b.clone()]),
        signed(sign, [a, b.clone(), b]),
    ]
}

/// Five vertices of subcell `i`: the inner vertex, the outer vertex it
/// keeps, the midpoints of the two outer edges at that vertex and the
/// centroid of the outer face.
pub fn subcell_vertices(sign: Octant, i: u8) -> Result<Vec<AffPoint>> {
    let (a, b, h, t) = (a_coord(), b_coord(), half_r(), third());
    let rows: [[AffR; 3]; 4] = match i {
        1 => [
            [a.clone(), b.clone(), b.clone()],
            [h.clone(), b.clone(), h.clone()],
            [h.clone(), h.clone(), b.clone()],
            [t.clone(), t.clone(), t.clone()],
        ],
        2 => [
            [b.clone(), a.clone(), b.clone()],
            [b.clone(), h.clone(), h.clone()],
            [h.clone(), h.clone(), b.clone()],
            [t.clone(), t.clone(), t.clone()],
        ],
        3 => [
            [b.clone(), b.clone(), a.clone()],
            [b.clone(), h.clone(), h.clone()],
            [h.clone(), b.clone(), h.clone()],
            [t.clone(), t.clone(), t.clone()],
        ],
        _ => return Err(Error::InvalidInput(format!("subcell index must be 1, 2 or 3, got {i}"))),
    };
    let mut out = vec![signed(sign, [a.clone(), a.clone(), a])];
    out.extend(rows.into_iter().map(|c| signed(sign, c)));
    Ok(out)
}

/// `normal · x <= rhs(r)` with right-hand sides affine in `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamHPolytope {
    pub dim: usize,
    pub normals: Vec<Vec<Rat>>,
    pub rhs: Vec<AffR>,
}

impl ParamHPolytope {
    pub fn eval(&self, r: &Rat) -> HPolytope {
        let ineqs = self.normals.iter().zip(&self.rhs).map(|(n, b)| Halfspace::new(n.clone(), b.eval(r))).collect();
        HPolytope { dim: self.dim, inequalities: ineqs }
    }

    /// Farkas certificate that the closure is empty for every `r` in `iv`.
    pub fn emptiness_certificate(&self, iv: &RInterval) -> Option<FarkasCertificate> {
        crate::geometry::fm::emptiness_certificate(&self.normals, &self.rhs, iv)
    }
}

/// Points of the orthant `signs` of `C_n*` at distance at least `2r` from
/// every vertex. Only the `n` vertices of the same orthant matter: the
/// opposite vertex `-σ_i e_i` is never closer than `σ_i e_i`.
pub fn leftover_hrep(signs: &[i64]) -> ParamHPolytope {
    let n = signs.len();
    let s: Vec<Rat> = signs.iter().map(|&x| Rat::int(x)).collect();
    let mut normals = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        let mut row = vec![Rat::zero(); n];
        row[i] = -&s[i];
        normals.push(row);
        rhs.push(AffR::zero());
    }
    normals.push(s.clone());
    rhs.push(AffR::constant(Rat::one()));
    // ||x - σ_i e_i|| = 1 + Σ σ_j x_j - 2 σ_i x_i >= 2r
    for i in 0..n {
        let mut row: Vec<Rat> = s.iter().map(|x| -x).collect();
        row[i] = s[i].clone();
        normals.push(row);
        rhs.push(AffR::q(-2, 1, 1, 1));
    }
    ParamHPolytope { dim: n, normals, rhs }
}

fn supported_radius(r: &Rat) -> Result<()> {
    if r < &Rat::new(1, 2) || r > &Rat::one() {
        return Err(Error::Unsupported(format!("region description needs r in [1/2, 1], got {r}")));
    }
    Ok(())
}

/// Facet description of the region at a fixed radius.
pub fn region_hrep(sign: Octant, r: &Rat) -> Result<HPolytope> {
    supported_radius(r)?;
    Ok(leftover_hrep(&sign.signs()).eval(r))
}

/// Subcell `i`: the region intersected with `σ_i x_i <= σ_j x_j`, `j != i`.
pub fn subcell_hrep(sign: Octant, i: u8, r: &Rat) -> Result<HPolytope> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidInput(format!("subcell index must be 1, 2 or 3, got {i}")));
    }
    let mut h = region_hrep(sign, r)?;
    let k = (i - 1) as usize;
    for j in (0..3).filter(|&j| j != k) {
        let mut normal = vec![Rat::zero(); 3];
        normal[k] = Rat::int(sign.sign(k));
        normal[j] = Rat::int(-sign.sign(j));
        h.inequalities.push(Halfspace::new(normal, Rat::zero()));
    }
    Ok(h)
}

/// Evidence that vertex enumeration of the facet description reproduces
/// the vertex formulas at one radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionEvidence {
    pub r: Rat,
    pub sign: Octant,
    pub piece: Piece,
    pub vertices: Vec<Point>,
    pub matches: bool,
}

pub fn decomposition_check(sign: Octant, piece: Piece, r: &Rat) -> Result<DecompositionEvidence> {
    let h = match piece {
        Piece::Whole => region_hrep(sign, r)?,
        Piece::Subcell(i) => subcell_hrep(sign, i, r)?,
    };
    let computed = dd_convert(&h)?;
    let expected = Region::new(sign, piece)?.eval(r);
    Ok(DecompositionEvidence {
        r: r.clone(),
        sign,
        piece,
        matches: computed.vertex_set() == expected.vertex_set(),
        vertices: computed.vertices,
    })
}

/// Outcome of a vertex-capture check at one radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureEvidence {
    pub n: usize,
    pub r: Rat,
    pub per_vertex: Vec<CaptureItem>,
    pub holds: bool,
}

/// `C_n* ∩ C(vertex, 2r)` (its vertices listed) lies in the closed ball
/// `C((1-r) vertex, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureItem {
    pub vertex: Point,
    pub intersection_vertices: Vec<Point>,
    pub capture_center: Point,
    pub capture_radius: Rat,
    pub contained: bool,
}

fn capture_item(n: usize, vertex: Point, r: &Rat) -> Result<CaptureItem> {
    use crate::geometry::{contains, unit_cross_polytope, CpBall};
    let two_r = r * &Rat::int(2);
    let near = unit_cross_polytope(n).intersect(&CpBall::closed(vertex.clone(), two_r).hrep())?;
    let v = dd_convert(&near)?;
    let center = vertex.scaled(&(Rat::one() - r));
    let ball = CpBall::closed(center.clone(), r.clone());
    Ok(CaptureItem {
        contained: contains(&v, &ball.hrep())?,
        vertex,
        intersection_vertices: v.vertices,
        capture_center: center,
        capture_radius: r.clone(),
    })
}

/// For every vertex `v` of `C_n*`, the part of `C_n*` within `2r` of `v`
/// is contained in the closed ball of radius `r` around `(1-r) v`.
pub fn vertex_capture_check(n: usize, r: &Rat) -> Result<CaptureEvidence> {
    if n < 1 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if !r.is_positive() || r > &Rat::one() {
        return Err(Error::Unsupported(format!("vertex capture needs 0 < r <= 1, got {r}")));
    }
    let per_vertex = (0..n)
        .flat_map(|i| [Point::unit(n, i, 1), Point::unit(n, i, -1)])
        .map(|v| capture_item(n, v, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(CaptureEvidence { n, r: r.clone(), holds: per_vertex.iter().all(|c| c.contained), per_vertex })
}

/// Within (open) distance `2r` of some vertex of `C_n*`.
pub fn in_vertex_neighbourhood(p: &Point, r: &Rat) -> bool {
    let two_r = r * &Rat::int(2);
    let n = p.dim();
    (0..n).any(|i| [1, -1].into_iter().any(|s| l1_dist(p, &Point::unit(n, i, s)).expect("same dim") < two_r))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub r: Rat,
    pub seed: u64,
    pub samples: usize,
    pub in_neighbourhood: usize,
    pub in_region: usize,
    pub covered: bool,
    pub witness: Option<Point>,
}

// common denominator of sample coordinates (lcm of 1..=12)
const SAMPLE_DEN: i64 = 27720;

fn sample_body_point(rng: &mut ChaCha8Rng, n: usize) -> Point {
    loop {
        let nums: Vec<i64> = (0..n).map(|_| rng.gen_range(-SAMPLE_DEN..=SAMPLE_DEN)).collect();
        if nums.iter().map(|x| x.abs()).sum::<i64>() <= SAMPLE_DEN {
            return Point::over(SAMPLE_DEN, &nums);
        }
    }
}

/// Random rational points of `C_3*` each lie near a vertex or in one of the
/// eight closed regions. Region membership uses facets recomputed from
/// the vertex formulas, independently of [`region_hrep`].
pub fn coverage_check(r: &Rat, samples: usize, seed: u64) -> Result<CoverageReport> {
    if r <= &Rat::new(1, 2) || r > &Rat::new(2, 3) {
        return Err(Error::Unsupported(format!("coverage needs r in (1/2, 2/3], got {r}")));
    }
    let regions: Vec<HPolytope> =
        Octant::all().map(|s| to_hrep(&Region::new(s, Piece::Whole)?.eval(r))).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report =
        CoverageReport { r: r.clone(), seed, samples, in_neighbourhood: 0, in_region: 0, covered: true, witness: None };
    for _ in 0..samples {
        let p = sample_body_point(&mut rng, 3);
        if in_vertex_neighbourhood(&p, r) {
            report.in_neighbourhood += 1;
        } else if regions.iter().any(|h| h.contains_point(&p)) {
            report.in_region += 1;
        } else {
            report.covered = false;
            report.witness = Some(p);
            break;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcellUnionReport {
    pub r: Rat,
    pub sign: Octant,
    pub samples: usize,
    pub covered: bool,
    pub witness: Option<Point>,
}

/// Random convex combinations of the region vertices each lie in one of
/// the three subcells (facets recomputed from the subcell vertex lists).
pub fn subcell_union_check(sign: Octant, r: &Rat, samples: usize, seed: u64) -> Result<SubcellUnionReport> {
    let region = Region::new(sign, Piece::Whole)?.eval(r);
    let cells: Vec<HPolytope> =
        (1..=3).map(|i| to_hrep(&Region::new(sign, Piece::Subcell(i))?.eval(r))).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (sign.index() as u64) << 32);
    for _ in 0..samples {
        let w: Vec<i64> = (0..region.vertices.len()).map(|_| rng.gen_range(0..=1000)).collect();
        let total: i64 = w.iter().sum::<i64>().max(1);
        let mut coords = vec![Rat::zero(); 3];
        for (wi, v) in w.iter().zip(&region.vertices) {
            let k = Rat::new(*wi, total);
            for (c, x) in coords.iter_mut().zip(&v.coords) {
                *c += &(&k * x);
            }
        }
        let p = Point::new(coords);
        if !cells.iter().any(|h| h.contains_point(&p)) {
            return Ok(SubcellUnionReport { r: r.clone(), sign, samples, covered: false, witness: Some(p) });
        }
    }
    Ok(SubcellUnionReport { r: r.clone(), sign, samples, covered: true, witness: None })
}

/// Every orthant region at `r` as a V-polytope, for plotting.
pub fn regions_at(r: &Rat) -> Vec<(Octant, VPolytope)> {
    Octant::all().map(|s| (s, Region::new(s, Piece::Whole).expect("whole region").eval(r))).collect()
}
