//! Exact l1 geometry and small polytope computations.
//!
//! Polytopes are tiny here (dimension at most 5 or 6, a few dozen
//! inequalities), so everything is exact: vertex enumeration by double
//! description, emptiness by Fourier–Motzkin elimination.

mod dd;
pub mod fm;
pub mod linalg;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{AffR, RInterval, Rat};
use crate::error::{Error, Result};

pub use fm::FarkasCertificate;

/// Point with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub coords: Vec<Rat>,
}

impl Point {
    pub fn new(coords: Vec<Rat>) -> Point {
        Point { coords }
    }

    pub fn origin(dim: usize) -> Point {
        Point { coords: vec![Rat::zero(); dim] }
    }

    /// `sign · e_axis`.
    pub fn unit(dim: usize, axis: usize, sign: i64) -> Point {
        let mut p = Point::origin(dim);
        p.coords[axis] = Rat::int(sign);
        p
    }

    /// Integer coordinates over a common denominator.
    pub fn over(den: i64, nums: &[i64]) -> Point {
        Point { coords: nums.iter().map(|&n| Rat::new(n, den)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn scaled(&self, k: &Rat) -> Point {
        Point { coords: self.coords.iter().map(|x| x * k).collect() }
    }

    pub fn neg(&self) -> Point {
        Point { coords: self.coords.iter().map(|x| -x).collect() }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Rat::to_f64).collect()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Point whose coordinates are affine in the radius `r`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AffPoint {
    pub coords: Vec<AffR>,
}

impl AffPoint {
    pub fn new(coords: Vec<AffR>) -> AffPoint {
        AffPoint { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn eval(&self, r: &Rat) -> Point {
        Point { coords: self.coords.iter().map(|c| c.eval(r)).collect() }
    }
}

impl From<&Point> for AffPoint {
    fn from(p: &Point) -> AffPoint {
        AffPoint { coords: p.coords.iter().cloned().map(AffR::constant).collect() }
    }
}

impl fmt::Debug for AffPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub fn l1_norm(p: &Point) -> Rat {
    p.coords.iter().map(Rat::abs).sum()
}

pub fn l1_dist(p: &Point, q: &Point) -> Result<Rat> {
    check_dims(p.dim(), q.dim())?;
    Ok(p.coords.iter().zip(&q.coords).map(|(a, b)| (a - b).abs()).sum())
}

/// l1 distance between two parametric points, valid for every `r` in `iv`.
/// Fails if some coordinate difference changes sign inside the interval.
pub fn aff_l1_dist(p: &AffPoint, q: &AffPoint, iv: &RInterval) -> Result<AffR> {
    check_dims(p.dim(), q.dim())?;
    p.coords
        .iter()
        .zip(&q.coords)
        .map(|(a, b)| (a - b).abs_on(iv))
        .collect::<Result<Vec<AffR>>>()
        .map(|v| v.into_iter().sum())
}

/// `||p||_1 <= scale`, or `< scale` when `closed` is false.
pub fn in_cross_polytope(p: &Point, scale: &Rat, closed: bool) -> bool {
    let n = l1_norm(p);
    if closed {
        &n <= scale
    } else {
        &n < scale
    }
}

/// One inequality `normal · x <= rhs` (`<` when strict).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<Rat>,
    pub rhs: Rat,
    #[serde(default)]
    pub strict: bool,
}

impl Halfspace {
    pub fn new(normal: Vec<Rat>, rhs: Rat) -> Halfspace {
        Halfspace { normal, rhs, strict: false }
    }

    pub fn value(&self, p: &Point) -> Rat {
        linalg::dot(&self.normal, &p.coords)
    }

    pub fn satisfied_by(&self, p: &Point) -> bool {
        let v = self.value(p);
        if self.strict {
            v < self.rhs
        } else {
            v <= self.rhs
        }
    }

    pub fn satisfied_by_closure(&self, p: &Point) -> bool {
        self.value(p) <= self.rhs
    }
}

impl fmt::Debug for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.strict { "<" } else { "<=" };
        write!(f, "{:?} . x {op} {}", self.normal, self.rhs)
    }
}

/// H-representation `{x : normal_i · x <= rhs_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolytope {
    pub dim: usize,
    #[serde(rename = "H")]
    pub inequalities: Vec<Halfspace>,
}

impl HPolytope {
    pub fn new(dim: usize, inequalities: Vec<Halfspace>) -> Result<HPolytope> {
        for h in &inequalities {
            check_dims(dim, h.normal.len())?;
            if h.normal.iter().all(Rat::is_zero) {
                return Err(Error::InvalidInput("inequality with zero normal".into()));
            }
        }
        Ok(HPolytope { dim, inequalities })
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.inequalities.iter().all(|h| h.satisfied_by(p))
    }

    pub fn closure_contains(&self, p: &Point) -> bool {
        self.inequalities.iter().all(|h| h.satisfied_by_closure(p))
    }

    pub fn intersect(&self, other: &HPolytope) -> Result<HPolytope> {
        check_dims(self.dim, other.dim)?;
        let mut ineqs = self.inequalities.clone();
        ineqs.extend(other.inequalities.iter().cloned());
        Ok(HPolytope { dim: self.dim, inequalities: ineqs })
    }

    fn normals(&self) -> Vec<Vec<Rat>> {
        self.inequalities.iter().map(|h| h.normal.clone()).collect()
    }

    /// Farkas certificate of emptiness of the closure, if empty.
    pub fn emptiness_certificate(&self) -> Option<FarkasCertificate> {
        let rhs: Vec<AffR> = self.inequalities.iter().map(|h| AffR::constant(h.rhs.clone())).collect();
        fm::emptiness_certificate(&self.normals(), &rhs, &RInterval::point(Rat::zero()))
    }
}

/// Closed (or open) cross-polytope ball `{x : ||x - center||_1 <= radius}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpBall {
    pub center: Point,
    pub radius: Rat,
    pub closed: bool,
}

impl CpBall {
    pub fn closed(center: Point, radius: Rat) -> CpBall {
        CpBall { center, radius, closed: true }
    }

    pub fn contains(&self, p: &Point) -> Result<bool> {
        let d = l1_dist(p, &self.center)?;
        Ok(if self.closed { d <= self.radius } else { d < self.radius })
    }

    /// The `2^n` facet inequalities `s · x <= radius + s · center`.
    pub fn hrep(&self) -> HPolytope {
        let n = self.center.dim();
        let inequalities = sign_vectors(n)
            .into_iter()
            .map(|s| {
                let normal: Vec<Rat> = s.iter().map(|&x| Rat::int(x)).collect();
                let rhs = &self.radius + linalg::dot(&normal, &self.center.coords);
                Halfspace { normal, rhs, strict: !self.closed }
            })
            .collect();
        HPolytope { dim: n, inequalities }
    }
}

/// All `2^n` vectors in `{-1, +1}^n`; index bit `i` set means coordinate
/// `i` is negative, so index 0 is all ones.
pub fn sign_vectors(n: usize) -> Vec<Vec<i64>> {
    (0..1usize << n).map(|m| (0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).collect()
}

/// The unit cross-polytope `C_n*` as an H-polytope.
pub fn unit_cross_polytope(n: usize) -> HPolytope {
    CpBall::closed(Point::origin(n), Rat::one()).hrep()
}

/// V-representation: convex hull of a nonempty vertex list. Degenerate
/// (lower-dimensional) hulls are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VPolytope {
    pub dim: usize,
    #[serde(rename = "V")]
    pub vertices: Vec<Point>,
}

impl VPolytope {
    pub fn new(dim: usize, vertices: Vec<Point>) -> Result<VPolytope> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("V-polytope needs at least one vertex".into()));
        }
        for v in &vertices {
            check_dims(dim, v.dim())?;
        }
        Ok(VPolytope { dim, vertices })
    }

    /// Sorted, deduplicated vertex list for set comparison.
    pub fn vertex_set(&self) -> Vec<Point> {
        let mut v = self.vertices.clone();
        v.sort();
        v.dedup();
        v
    }

    /// Drops points that are not vertices of the hull.
    pub fn irredundant(&self) -> Result<VPolytope> {
        dd_convert(&to_hrep(self)?)
    }
}

fn row_to_ints(row: &[Rat]) -> Vec<BigInt> {
    linalg::primitive(row)
}

/// Exact vertex enumeration of a bounded H-polytope (computed on the
/// closure). Empty and unbounded inputs are distinct errors.
pub fn dd_convert(h: &HPolytope) -> Result<VPolytope> {
    let d = h.dim;
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let normals = h.normals();
    if linalg::rank(&normals, d) < d {
        // there is a lineality direction: nonempty means unbounded
        return Err(if h.emptiness_certificate().is_some() { Error::EmptyPolytope } else { Error::UnboundedPolytope });
    }
    // homogenize: (t, x) with t * rhs - normal · x >= 0 and t >= 0
    let mut rows: Vec<Vec<BigInt>> = h
        .inequalities
        .iter()
        .map(|ineq| {
            let mut row = vec![ineq.rhs.clone()];
            row.extend(ineq.normal.iter().map(|x| -x));
            row_to_ints(&row)
        })
        .collect();
    let mut t_row = vec![BigInt::zero(); d + 1];
    t_row[0] = BigInt::from(1);
    rows.push(t_row);

    let rays = dd::extreme_rays(&rows, d + 1).ok_or(Error::UnboundedPolytope)?;
    let (bounded, recession): (Vec<_>, Vec<_>) = rays.into_iter().partition(|r| r[0].is_positive());
    if bounded.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    if !recession.is_empty() {
        return Err(Error::UnboundedPolytope);
    }
    let mut vertices: Vec<Point> = bounded
        .into_iter()
        .map(|ray| {
            let t = ray[0].clone();
            Point { coords: ray[1..].iter().map(|x| Rat::from_bigints(x.clone(), t.clone()).expect("t > 0")).collect() }
        })
        .collect();
    vertices.sort();
    vertices.dedup();
    Ok(VPolytope { dim: d, vertices })
}

/// Facet description of a V-polytope. Lower-dimensional hulls get their
/// affine hull as pairs of opposite inequalities.
pub fn to_hrep(v: &VPolytope) -> Result<HPolytope> {
    let d = v.dim;
    let lifted: Vec<Vec<Rat>> = v
        .vertices
        .iter()
        .map(|p| {
            let mut w = vec![Rat::one()];
            w.extend(p.coords.iter().cloned());
            w
        })
        .collect();
    let basis_idx = linalg::independent_rows(&lifted, d + 1);
    let basis: Vec<Vec<Rat>> = basis_idx.iter().map(|&i| lifted[i].clone()).collect();
    let k = basis.len();

    // valid inequalities y with y · (1, v) >= 0, restricted to span(basis)
    // and parameterized as y = Σ z_j basis_j
    let rows: Vec<Vec<BigInt>> =
        lifted.iter().map(|w| row_to_ints(&basis.iter().map(|b| linalg::dot(w, b)).collect::<Vec<_>>())).collect();
    let rays = dd::extreme_rays(&rows, k).ok_or_else(|| Error::InvalidInput("degenerate vertex list".into()))?;

    let mut inequalities = Vec::new();
    for z in rays {
        let mut y = vec![Rat::zero(); d + 1];
        for (zj, bj) in z.iter().zip(&basis) {
            let zj = Rat::from(zj.clone());
            for (yi, bi) in y.iter_mut().zip(bj) {
                *yi += &(&zj * bi);
            }
        }
        // y0 + c · x >= 0  <=>  -c · x <= y0
        let normal: Vec<Rat> = y[1..].iter().map(|c| -c).collect();
        if normal.iter().all(Rat::is_zero) {
            continue;
        }
        inequalities.push(Halfspace::new(normal, y[0].clone()));
    }
    for e in linalg::null_space(&lifted, d + 1) {
        // e0 + e · x = 0
        let normal: Vec<Rat> = e[1..].to_vec();
        if normal.iter().all(Rat::is_zero) {
            continue;
        }
        inequalities.push(Halfspace::new(normal.clone(), -&e[0]));
        inequalities.push(Halfspace::new(normal.iter().map(|x| -x).collect(), e[0].clone()));
    }
    HPolytope::new(d, inequalities)
}

/// Maximum l1 distance between the two hulls, with the attaining vertex
/// pair. Distance is convex, so the maximum over the product of the hulls
/// is attained at a pair of vertices.
pub fn max_l1_between(a: &VPolytope, b: &VPolytope) -> Result<(Rat, usize, usize)> {
    check_dims(a.dim, b.dim)?;
    let mut best: Option<(Rat, usize, usize)> = None;
    for (i, p) in a.vertices.iter().enumerate() {
        for (j, q) in b.vertices.iter().enumerate() {
            let d = l1_dist(p, q)?;
            if best.as_ref().is_none_or(|(m, _, _)| &d > m) {
                best = Some((d, i, j));
            }
        }
    }
    best.ok_or_else(|| Error::InvalidInput("empty vertex list".into()))
}

/// Whether the hull of `a` lies in `b`; checking the vertices is exact for
/// convex sets.
pub fn contains(a: &VPolytope, b: &HPolytope) -> Result<bool> {
    check_dims(b.dim, a.dim)?;
    Ok(a.vertices.iter().all(|v| b.contains_point(v)))
}

/// Exact feasibility of the closure of `h`.
pub fn is_empty(h: &HPolytope) -> bool {
    h.emptiness_certificate().is_some()
}
