//! Upper bounds on the number of packing points, as replayable
//! certificates.
//!
//! The count splits into points near a vertex (at most one per vertex, by
//! vertex capture) and points in the leftover orthant regions (bounded by
//! emptiness, a blocking table or the region diameter).

use serde::{Deserialize, Serialize};

use super::blocking::assignment_is_valid;
use super::{
    build_block_table, coverage_check, decomposition_check, leftover_hrep, occupancy_bound, region_diameter_check,
    vertex_capture_check, BlockTable, CaptureEvidence, CoverageReport, DecompositionEvidence, DiameterEvidence,
    OccupancyMode, OccupancyResult, Octant, Piece,
};
use crate::arith::{RInterval, Rat, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{dd_convert, sign_vectors, unit_cross_polytope, CpBall, FarkasCertificate, HPolytope, VPolytope};

/// Which argument bounds the leftover regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Leftover regions are empty.
    EmptyLeftover,
    /// Whole-region blocking table.
    WholeRegionBlocking,
    /// Per-subcell blocking table.
    SubcellBlocking,
    /// Each region holds at most one point.
    Diameter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftoverEmptiness {
    pub orthant: Vec<i64>,
    pub certificate: FarkasCertificate,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    /// Vertex capture, checked at the listed radii only.
    pub capture: Vec<CaptureEvidence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub leftover_emptiness: Vec<LeftoverEmptiness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decomposition: Vec<DecompositionEvidence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coverage: Vec<CoverageReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_table: Option<BlockTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameter: Option<DiameterEvidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupancy: Option<OccupancyResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub interval: RInterval,
    pub n: usize,
    pub pipeline: Pipeline,
    pub inner_cap: usize,
    pub outer_cap: usize,
    pub total: usize,
    pub scope: Vec<String>,
    pub evidence: Evidence,
}

// samples drawn per radius for the coverage evidence
const COVERAGE_SAMPLES: usize = 2000;
const COVERAGE_SEED: u64 = 0x5eed;

fn oc(lo: Rat, hi: Rat) -> RInterval {
    RInterval::open_closed(lo, hi).expect("valid")
}

fn q(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn pipeline_for(iv: &RInterval, n: usize) -> Result<(Pipeline, RInterval)> {
    let top = oc(Rat::one() - Rat::new(1, n as i64), Rat::one());
    if iv.is_subset_of(&top) {
        return Ok((Pipeline::EmptyLeftover, top));
    }
    if n == 3 {
        let cases = [
            (Pipeline::WholeRegionBlocking, oc(q(3, 5), q(2, 3))),
            (Pipeline::SubcellBlocking, oc(q(4, 7), q(3, 5))),
            (Pipeline::Diameter, oc(q(1, 2), q(4, 7))),
        ];
        if let Some((p, range)) = cases.into_iter().find(|(_, range)| iv.is_subset_of(range)) {
            return Ok((p, range));
        }
    }
    Err(Error::Unsupported(format!(
        "no bound pipeline for {iv} in dimension {n}; split the interval at 1/2, 4/7, 3/5, 2/3, 1-1/n"
    )))
}

fn fail(what: impl Into<String>) -> Error {
    Error::Certification(what.into())
}

fn capture_evidence(n: usize, iv: &RInterval) -> Result<Vec<CaptureEvidence>> {
    let mut out = Vec::new();
    for r in iv.sample_radii() {
        let ev = vertex_capture_check(n, &r)?;
        if !ev.holds {
            return Err(fail(format!("vertex capture fails at n = {n}, r = {r}")));
        }
        out.push(ev);
    }
    Ok(out)
}

fn decomposition_evidence(iv: &RInterval, pieces: &[Piece]) -> Result<Vec<DecompositionEvidence>> {
    let mut out = Vec::new();
    for r in iv.sample_radii() {
        for s in Octant::all() {
            for &p in pieces {
                let ev = decomposition_check(s, p, &r)?;
                if !ev.matches {
                    return Err(fail(format!("facets of {s} {p} do not match its vertices at r = {r}")));
                }
                out.push(ev);
            }
        }
    }
    Ok(out)
}

/// Certified upper bound on the packing number for every `r` in `iv`.
///
/// `iv` must lie inside `(1-1/n, 1]`, or for `n = 3` inside one of
/// `(3/5,2/3]`, `(4/7,3/5]`, `(1/2,4/7]`.
pub fn gamma_upper_bound(iv: &RInterval, n: usize) -> Result<BoundCertificate> {
    if n < 2 {
        return Err(Error::Unsupported(format!("dimension must be at least 2, got {n}")));
    }
    let (pipeline, _) = pipeline_for(iv, n)?;
    let mut evidence = Evidence { capture: capture_evidence(n, iv)?, ..Evidence::default() };
    let radii: Vec<String> = iv.sample_radii().iter().map(Rat::to_string).collect();
    let mut scope = vec![format!("vertex capture checked at r = {}", radii.join(", "))];

    let outer_cap = match pipeline {
        Pipeline::EmptyLeftover => {
            for orthant in sign_vectors(n) {
                let certificate = leftover_hrep(&orthant)
                    .emptiness_certificate(iv)
                    .ok_or_else(|| fail(format!("no emptiness certificate for orthant {orthant:?} on {iv}")))?;
                evidence.leftover_emptiness.push(LeftoverEmptiness { orthant, certificate });
            }
            scope.push("leftover emptiness certified over the whole interval".into());
            0
        }
        Pipeline::WholeRegionBlocking | Pipeline::SubcellBlocking => {
            let (mode, pieces) = if pipeline == Pipeline::WholeRegionBlocking {
                (OccupancyMode::WholeRegion, vec![Piece::Whole])
            } else {
                (OccupancyMode::PerSubcell, vec![Piece::Whole, Piece::Subcell(1), Piece::Subcell(2), Piece::Subcell(3)])
            };
            evidence.decomposition = decomposition_evidence(iv, &pieces)?;
            evidence.coverage = coverage_evidence(iv)?;
            let table = build_block_table(iv, mode)?;
            let occ = occupancy_bound(&table, mode);
            evidence.block_table = Some(table);
            scope.push(format!("region facets checked against vertex formulas at r = {}", radii.join(", ")));
            scope
                .push("blocking decided on vertex pairs over the whole interval (convexity of the l1 distance)".into());
            let bound = occ.bound;
            evidence.occupancy = Some(occ);
            bound
        }
        Pipeline::Diameter => {
            evidence.decomposition = decomposition_evidence(iv, &[Piece::Whole])?;
            evidence.coverage = coverage_evidence(iv)?;
            let d = region_diameter_check(iv)?;
            if d.verdict != Verdict::AlwaysLess {
                return Err(fail(format!("some region diameter is not below 2r on {iv}")));
            }
            evidence.diameter = Some(d);
            let occ = occupancy_bound(&BlockTable::empty(iv.clone()), OccupancyMode::DiameterOnly);
            let bound = occ.bound;
            evidence.occupancy = Some(occ);
            scope.push(format!("region facets checked against vertex formulas at r = {}", radii.join(", ")));
            scope.push("region diameters decided on vertex pairs over the whole interval".into());
            bound
        }
    };
    let inner_cap = 2 * n;
    Ok(BoundCertificate {
        interval: iv.clone(),
        n,
        pipeline,
        inner_cap,
        outer_cap,
        total: inner_cap + outer_cap,
        scope,
        evidence,
    })
}

fn coverage_evidence(iv: &RInterval) -> Result<Vec<CoverageReport>> {
    let mut out = Vec::new();
    for r in iv.sample_radii().into_iter().filter(|r| r > &q(1, 2)) {
        let rep = coverage_check(&r, COVERAGE_SAMPLES, COVERAGE_SEED)?;
        if !rep.covered {
            return Err(fail(format!("sample {:?} is not covered at r = {r}", rep.witness)));
        }
        out.push(rep);
    }
    Ok(out)
}

fn replay_err(what: impl Into<String>) -> Error {
    Error::Replay(what.into())
}

fn replay_capture(n: usize, ev: &CaptureEvidence) -> Result<()> {
    if ev.n != n || ev.per_vertex.len() != 2 * n || !ev.holds {
        return Err(replay_err(format!("capture evidence at r = {} is incomplete", ev.r)));
    }
    let two_r = &ev.r * &Rat::int(2);
    for item in &ev.per_vertex {
        let near: HPolytope =
            unit_cross_polytope(n).intersect(&CpBall::closed(item.vertex.clone(), two_r.clone()).hrep())?;
        let fresh = dd_convert(&near)?;
        let listed = VPolytope::new(n, item.intersection_vertices.clone())?;
        if fresh.vertex_set() != listed.vertex_set() {
            return Err(replay_err(format!("intersection vertices near {:?} do not reproduce", item.vertex)));
        }
        let ball = CpBall::closed(item.vertex.scaled(&(Rat::one() - &ev.r)), ev.r.clone());
        if item.capture_center != ball.center || item.capture_radius != ev.r {
            return Err(replay_err("capture ball does not match the vertex"));
        }
        for v in &listed.vertices {
            if !ball.contains(v)? {
                return Err(replay_err(format!("{v:?} is outside the capture ball")));
            }
        }
    }
    Ok(())
}

/// Re-checks every evidence item of a serialized certificate.
pub fn replay_certificate(cert: &BoundCertificate) -> Result<()> {
    let (pipeline, _) = pipeline_for(&cert.interval, cert.n).map_err(|e| replay_err(e.to_string()))?;
    if pipeline != cert.pipeline {
        return Err(replay_err("pipeline does not match the interval"));
    }
    if cert.inner_cap != 2 * cert.n || cert.total != cert.inner_cap + cert.outer_cap {
        return Err(replay_err("caps do not add up"));
    }
    let ev = &cert.evidence;
    let radii = cert.interval.sample_radii();
    if ev.capture.iter().map(|c| c.r.clone()).collect::<Vec<_>>() != radii {
        return Err(replay_err("capture radii differ from the interval samples"));
    }
    for c in &ev.capture {
        replay_capture(cert.n, c)?;
    }

    match pipeline {
        Pipeline::EmptyLeftover => {
            let orthants = sign_vectors(cert.n);
            if ev.leftover_emptiness.iter().map(|l| l.orthant.clone()).collect::<Vec<_>>() != orthants {
                return Err(replay_err("leftover certificates do not cover every orthant"));
            }
            for l in &ev.leftover_emptiness {
                let h = leftover_hrep(&l.orthant);
                if !l.certificate.check(&h.normals, &h.rhs, &cert.interval) {
                    return Err(replay_err(format!("Farkas certificate for {:?} fails", l.orthant)));
                }
            }
            if cert.outer_cap != 0 {
                return Err(replay_err("outer cap must be 0 when the leftover is empty"));
            }
        }
        _ => {
            for d in &ev.decomposition {
                let fresh = decomposition_check(d.sign, d.piece, &d.r)?;
                if !fresh.matches || &fresh != d {
                    return Err(replay_err(format!(
                        "decomposition of {} {} at {} does not reproduce",
                        d.sign, d.piece, d.r
                    )));
                }
            }
            let pieces: usize = if pipeline == Pipeline::SubcellBlocking { 4 } else { 1 };
            if ev.decomposition.len() != radii.len() * 8 * pieces {
                return Err(replay_err("decomposition evidence is incomplete"));
            }
            for c in &ev.coverage {
                let fresh = coverage_check(&c.r, c.samples, c.seed)?;
                if !fresh.covered || &fresh != c {
                    return Err(replay_err(format!("coverage at r = {} does not reproduce", c.r)));
                }
            }
            let occ = ev.occupancy.as_ref().ok_or_else(|| replay_err("missing occupancy"))?;
            let table = match pipeline {
                Pipeline::Diameter => {
                    let d = ev.diameter.as_ref().ok_or_else(|| replay_err("missing diameter evidence"))?;
                    let fresh = region_diameter_check(&cert.interval)?;
                    if &fresh != d || d.verdict != Verdict::AlwaysLess {
                        return Err(replay_err("diameter evidence does not reproduce"));
                    }
                    BlockTable::empty(cert.interval.clone())
                }
                _ => {
                    let t = ev.block_table.clone().ok_or_else(|| replay_err("missing block table"))?;
                    if t.interval != cert.interval {
                        return Err(replay_err("block table interval differs"));
                    }
                    t.recheck()?;
                    t
                }
            };
            let expected_mode = match pipeline {
                Pipeline::WholeRegionBlocking => OccupancyMode::WholeRegion,
                Pipeline::SubcellBlocking => OccupancyMode::PerSubcell,
                _ => OccupancyMode::DiameterOnly,
            };
            if occ.mode != expected_mode || !assignment_is_valid(&table, occ) {
                return Err(replay_err("occupancy assignment is not valid"));
            }
            let fresh = occupancy_bound(&table, occ.mode);
            if fresh.bound != occ.bound || occ.bound != cert.outer_cap {
                return Err(replay_err("occupancy bound does not reproduce"));
            }
        }
    }
    Ok(())
}
