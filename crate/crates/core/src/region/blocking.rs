//! Blocking between orthant regions, region diameters and the occupancy
//! count.
//!
//! The l1 distance is convex, so its maximum over a pair of polytopes is
//! attained at a pair of vertices. A source region blocks a target when
//! every vertex pair is closer than `2r` over the whole interval: a packing
//! point in the source then rules out any point in the target.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Octant, Piece, Region};
use crate::arith::{AffR, RInterval, Rat, Verdict};
use crate::error::{Error, Result};
use crate::geometry::aff_l1_dist;

fn two_r() -> AffR {
    AffR::q(2, 1, 0, 1)
}

fn blocking_range() -> RInterval {
    RInterval::open_closed(Rat::new(1, 2), Rat::new(2, 3)).expect("valid")
}

fn check_range(iv: &RInterval) -> Result<()> {
    if iv.is_subset_of(&blocking_range()) {
        Ok(())
    } else {
        Err(Error::InvalidInterval(format!("{iv} is not inside (1/2,2/3]")))
    }
}

/// Distance between one source vertex and one target vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEvidence {
    pub source_vertex: usize,
    pub target_vertex: usize,
    pub distance: AffR,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEvidence {
    pub interval: RInterval,
    pub source: Octant,
    pub piece: Piece,
    pub target: Octant,
    pub blocked: bool,
    /// All vertex pairs, source-major.
    pub pairs: Vec<PairEvidence>,
    /// The failing pair that is farthest at the interval midpoint.
    pub failing: Option<PairEvidence>,
}

/// Decides whether `source` blocks the whole region of `target` for every
/// `r` in `iv`.
pub fn blocking_check(source: &Region, target: Octant, iv: &RInterval) -> Result<BlockEvidence> {
    check_range(iv)?;
    let target_region = Region::new(target, Piece::Whole)?;
    let mut pairs = Vec::with_capacity(source.vertices.len() * target_region.vertices.len());
    for (i, p) in source.vertices.iter().enumerate() {
        for (j, q) in target_region.vertices.iter().enumerate() {
            let distance = aff_l1_dist(p, q, iv)?;
            let verdict = distance.cmp_on(&two_r(), iv);
            pairs.push(PairEvidence { source_vertex: i, target_vertex: j, distance, verdict });
        }
    }
    let mid = iv.midpoint();
    let failing = pairs
        .iter()
        .filter(|p| p.verdict != Verdict::AlwaysLess)
        .fold(None::<&PairEvidence>, |best, p| match best {
            Some(b) if b.distance.eval(&mid) >= p.distance.eval(&mid) => Some(b),
            _ => Some(p),
        })
        .cloned();
    Ok(BlockEvidence {
        interval: iv.clone(),
        source: source.sign,
        piece: source.piece,
        target,
        blocked: failing.is_none(),
        pairs,
        failing,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupancyMode {
    WholeRegion,
    PerSubcell,
    DiameterOnly,
}

impl OccupancyMode {
    pub fn labels(self) -> Vec<Piece> {
        match self {
            OccupancyMode::WholeRegion | OccupancyMode::DiameterOnly => vec![Piece::Whole],
            OccupancyMode::PerSubcell => (1..=3).map(Piece::Subcell).collect(),
        }
    }
}

/// One blocked (source piece, target) relation with its evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub source: Octant,
    pub piece: Piece,
    pub target: Octant,
    pub evidence: Vec<PairEvidence>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTable {
    pub interval: RInterval,
    pub entries: Vec<BlockEntry>,
}

impl BlockTable {
    pub fn empty(interval: RInterval) -> BlockTable {
        BlockTable { interval, entries: Vec::new() }
    }

    pub fn blocked_targets(&self, source: Octant, piece: Piece) -> BTreeSet<Octant> {
        self.entries.iter().filter(|e| e.source == source && e.piece == piece).map(|e| e.target).collect()
    }

    /// Recomputes every entry from the vertex formulas.
    pub fn recheck(&self) -> Result<()> {
        for e in &self.entries {
            let source = Region::new(e.source, e.piece)?;
            let fresh = blocking_check(&source, e.target, &self.interval)?;
            if !fresh.blocked || fresh.pairs != e.evidence {
                return Err(Error::Replay(format!(
                    "block entry {} {} -> {} does not reproduce",
                    e.source, e.piece, e.target
                )));
            }
        }
        Ok(())
    }
}

/// Checks every (source piece, target) combination for the labels of
/// `mode` and keeps the blocked ones. Entries are sorted, so the table does
/// not depend on scheduling.
pub fn build_block_table(iv: &RInterval, mode: OccupancyMode) -> Result<BlockTable> {
    check_range(iv)?;
    if mode == OccupancyMode::DiameterOnly {
        return Ok(BlockTable::empty(iv.clone()));
    }
    let jobs: Vec<(Octant, Piece, Octant)> = Octant::all()
        .flat_map(|s| {
            mode.labels().into_iter().flat_map(move |p| Octant::all().filter(move |&t| t != s).map(move |t| (s, p, t)))
        })
        .collect();
    let results: Vec<BlockEvidence> =
        jobs.par_iter().map(|&(s, p, t)| blocking_check(&Region::new(s, p)?, t, iv)).collect::<Result<_>>()?;
    let mut entries: Vec<BlockEntry> = results
        .into_iter()
        .filter(|e| e.blocked)
        .map(|e| BlockEntry { source: e.source, piece: e.piece, target: e.target, evidence: e.pairs })
        .collect();
    entries.sort_by_key(|e| (e.source, e.piece, e.target));
    Ok(BlockTable { interval: iv.clone(), entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancyResult {
    pub mode: OccupancyMode,
    pub bound: usize,
    /// Label of each octant (by index) in one attaining assignment.
    pub assignment: Vec<Option<Piece>>,
    pub assignments_checked: usize,
}

fn consistent(table: &BlockTable, assignment: &[Option<Piece>]) -> bool {
    Octant::all().all(|s| match assignment[s.index()] {
        None => true,
        Some(piece) => table.blocked_targets(s, piece).into_iter().all(|t| assignment[t.index()].is_none()),
    })
}

/// Largest number of occupied octants over all assignments (each octant
/// empty, or occupied under one label) in which no occupied source blocks
/// an occupied target.
pub fn occupancy_bound(table: &BlockTable, mode: OccupancyMode) -> OccupancyResult {
    let labels = mode.labels();
    let base = labels.len() + 1;
    let total = base.pow(8);
    let empty_table = BlockTable::empty(table.interval.clone());
    let table = if mode == OccupancyMode::DiameterOnly { &empty_table } else { table };
    let mut best: (usize, Vec<Option<Piece>>) = (0, vec![None; 8]);
    for code in 0..total {
        let mut c = code;
        let assignment: Vec<Option<Piece>> = (0..8)
            .map(|_| {
                let d = c % base;
                c /= base;
                (d > 0).then(|| labels[d - 1])
            })
            .collect();
        let occupied = assignment.iter().filter(|a| a.is_some()).count();
        if occupied > best.0 && consistent(table, &assignment) {
            best = (occupied, assignment);
        }
    }
    OccupancyResult { mode, bound: best.0, assignment: best.1, assignments_checked: total }
}

/// Re-checks that an assignment is consistent and has the claimed size.
pub(crate) fn assignment_is_valid(table: &BlockTable, occ: &OccupancyResult) -> bool {
    let labels = occ.mode.labels();
    occ.assignment.len() == 8
        && occ.assignment.iter().flatten().all(|p| labels.contains(p))
        && occ.assignment.iter().filter(|a| a.is_some()).count() == occ.bound
        && (occ.mode == OccupancyMode::DiameterOnly || consistent(table, &occ.assignment))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionDiameter {
    pub sign: Octant,
    /// Largest vertex-pair distance at the interval midpoint.
    pub diameter: AffR,
    pub pair: (usize, usize),
    pub verdict: Verdict,
    /// Whether `diameter` dominates every other vertex-pair distance on the
    /// whole interval.
    pub dominant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterEvidence {
    pub interval: RInterval,
    pub regions: Vec<RegionDiameter>,
    /// Every region has diameter below `2r`, so it holds at most one point.
    pub verdict: Verdict,
}

/// Diameter of each region against `2r` over `iv`.
pub fn region_diameter_check(iv: &RInterval) -> Result<DiameterEvidence> {
    check_range(iv)?;
    let mid = iv.midpoint();
    let mut regions = Vec::new();
    for s in Octant::all() {
        let v = Region::new(s, Piece::Whole)?.vertices;
        let mut dists = Vec::new();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                dists.push(((i, j), aff_l1_dist(&v[i], &v[j], iv)?));
            }
        }
        let (pair, diameter) = dists
            .iter()
            .fold(None::<&((usize, usize), AffR)>, |best, d| match best {
                Some(b) if b.1.eval(&mid) >= d.1.eval(&mid) => Some(b),
                _ => Some(d),
            })
            .cloned()
            .expect("four vertices");
        let verdict = if dists.iter().all(|(_, d)| d.cmp_on(&two_r(), iv) == Verdict::AlwaysLess) {
            Verdict::AlwaysLess
        } else {
            diameter.cmp_on(&two_r(), iv)
        };
        let dominant =
            dists.iter().all(|(_, d)| matches!(d.cmp_on(&diameter, iv), Verdict::AlwaysLeq | Verdict::AlwaysLess));
        regions.push(RegionDiameter { sign: s, diameter, pair, verdict, dominant });
    }
    let verdict =
        if regions.iter().all(|r| r.verdict == Verdict::AlwaysLess) { Verdict::AlwaysLess } else { Verdict::Mixed };
    Ok(DiameterEvidence { interval: iv.clone(), regions, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(s: &str) -> RInterval {
        s.parse().unwrap()
    }

    fn o(s: [i64; 3]) -> Octant {
        Octant::from_signs(s).unwrap()
    }

    #[test]
    fn whole_region_blocks_neighbour() {
        let src = Region::new(o([1, 1, 1]), Piece::Whole).unwrap();
        let ev = blocking_check(&src, o([-1, 1, 1]), &iv("(3/5,2/3]")).unwrap();
        assert!(ev.blocked);
        assert!(ev.pairs.iter().any(|p| p.distance == AffR::q(-8, 1, 6, 1)));
        assert!(ev.pairs.iter().all(|p| p.verdict == Verdict::AlwaysLess));
    }

    #[test]
    fn diagonal_neighbour_is_not_blocked() {
        let src = Region::new(o([1, 1, 1]), Piece::Whole).unwrap();
        let ev = blocking_check(&src, o([-1, -1, 1]), &iv("(3/5,2/3]")).unwrap();
        assert!(!ev.blocked);
        let f = ev.failing.unwrap();
        assert_eq!(f.distance, AffR::q(-4, 1, 4, 1));
        assert_eq!((f.source_vertex, f.target_vertex), (1, 1));
    }

    #[test]
    fn twenty_case_grid() {
        // closed forms from an independent evaluation of the vertex formulas
        let expected = [
            AffR::q(4, 1, -2, 1),
            AffR::q(-2, 1, 2, 1),
            AffR::q(-2, 1, 2, 1),
            AffR::q(-2, 1, 2, 1),
            AffR::q(-2, 1, 2, 1),
            AffR::q(-2, 1, 2, 1),
            AffR::q(-2, 1, 2, 1),
            AffR::q(4, 1, -2, 1),
            AffR::q(-2, 1, 2, 1),
            AffR::q(-2, 1, 2, 1),
            AffR::q(-5, 1, 4, 1),
            AffR::r(),
            AffR::q(-2, 1, 2, 1),
            AffR::q(-5, 1, 4, 1),
            AffR::q(-2, 1, 2, 1),
            AffR::r(),
            AffR::q(-2, 1, 2, 1),
            AffR::q(-4, 1, 10, 3),
            AffR::q(-4, 1, 10, 3),
            AffR::constant(Rat::new(2, 3)),
        ];
        let src = Region::new(o([1, 1, 1]), Piece::Subcell(1)).unwrap();
        let ev = blocking_check(&src, o([-1, 1, 1]), &iv("(4/7,3/5]")).unwrap();
        let got: Vec<AffR> = ev.pairs.iter().map(|p| p.distance.clone()).collect();
        assert_eq!(got, expected);
        assert!(ev.blocked);
    }

    #[test]
    fn rejects_interval_outside_range() {
        let src = Region::new(o([1, 1, 1]), Piece::Whole).unwrap();
        assert!(blocking_check(&src, o([-1, 1, 1]), &iv("(1/2,1]")).is_err());
    }

    #[test]
    fn whole_table_is_coordinate_flips() {
        let t = build_block_table(&iv("(3/5,2/3]"), OccupancyMode::WholeRegion).unwrap();
        for s in Octant::all() {
            let expect: BTreeSet<Octant> = (0..3).map(|i| s.flip(i)).collect();
            assert_eq!(t.blocked_targets(s, Piece::Whole), expect);
        }
        t.recheck().unwrap();
        let occ = occupancy_bound(&t, OccupancyMode::WholeRegion);
        assert_eq!(occ.bound, 4);
        assert!(assignment_is_valid(&t, &occ));
    }

    #[test]
    fn subcell_table_bound() {
        let t = build_block_table(&iv("(4/7,3/5]"), OccupancyMode::PerSubcell).unwrap();
        for s in Octant::all() {
            for i in 1..=3u8 {
                assert!(t.blocked_targets(s, Piece::Subcell(i)).contains(&s.flip(i as usize - 1)));
            }
        }
        assert_eq!(occupancy_bound(&t, OccupancyMode::PerSubcell).bound, 6);
    }

    #[test]
    fn diameter_only() {
        let iv = iv("(1/2,4/7]");
        let d = region_diameter_check(&iv).unwrap();
        assert_eq!(d.verdict, Verdict::AlwaysLess);
        for r in &d.regions {
            assert_eq!(r.diameter, AffR::q(-6, 1, 4, 1));
            assert!(r.dominant);
            assert_eq!(r.diameter.eval(&Rat::new(6, 11)), Rat::new(8, 11));
        }
        let occ = occupancy_bound(&BlockTable::empty(iv), OccupancyMode::DiameterOnly);
        assert_eq!(occ.bound, 8);
        assert_eq!(region_diameter_check(&"(3/5,2/3]".parse().unwrap()).unwrap().verdict, Verdict::AlwaysLess);
    }
}
