//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crosspack::geometry::{dd_convert, max_l1_between, Point, VPolytope};
use crosspack::packings::{construct, critical_radius, Construction};
use crosspack::region::{
    blocking_check, build_block_table, coverage_check, frontier_analysis, gamma_upper_bound, occupancy_bound,
    region_hrep, replay_certificate, subcell_union_check, vertex_capture_check, BlockTable, OccupancyMode, Octant,
    Piece, Region, RegionState,
};
use crosspack::search::{local_search, SearchConfig};
use crosspack::{AffR, RInterval, Rat, Verdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn iv(s: &str) -> RInterval {
    RInterval::parse(s).expect("interval literal")
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    if took <= limit {
        Ok(())
    } else {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    }
}

fn construction_radii() -> Outcome {
    let start = Instant::now();
    let mut cases: Vec<(Construction, usize, Rat)> = Vec::new();
    for n in 2..=6 {
        cases.push((Construction::Vertices, n, Rat::one()));
        cases.push((Construction::VerticesPlusCentroids, n, Rat::one() - q(1, n as i64)));
    }
    cases.push((Construction::Q10, 3, q(2, 3)));
    cases.push((Construction::Q12, 3, q(3, 5)));
    cases.push((Construction::Q13, 3, q(6, 11)));
    for (which, n, expected) in &cases {
        let set = construct(*which, *n).map_err(|e| e.to_string())?;
        let got = critical_radius(&set).map_err(|e| e.to_string())?;
        if &got != expected {
            return Err(format!("{which} n={n}: radius {got}, expected {expected}"));
        }
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("{} constructions in {:.2?}", cases.len(), start.elapsed()))
}

fn certified_upper_bounds() -> Outcome {
    let start = Instant::now();
    let mut cases: Vec<(RInterval, usize, usize)> =
        (2..=5).map(|n| (RInterval::open_closed(Rat::one() - q(1, n as i64), Rat::one()).unwrap(), n, 2 * n)).collect();
    cases.push((iv("(3/5,2/3]"), 3, 10));
    cases.push((iv("(4/7,3/5]"), 3, 12));
    cases.push((iv("(1/2,4/7]"), 3, 14));
    for (interval, n, expected) in &cases {
        let cert = gamma_upper_bound(interval, *n).map_err(|e| format!("{interval} n={n}: {e}"))?;
        if cert.total != *expected {
            return Err(format!("{interval} n={n}: total {}, expected {expected}", cert.total));
        }
        replay_certificate(&cert).map_err(|e| format!("{interval} n={n}: replay: {e}"))?;
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("{} bounds certified and replayed in {:.2?}", cases.len(), start.elapsed()))
}

fn twenty_case_table() -> Outcome {
    let interval = iv("(4/7,3/5]");
    let source = Region::new(Octant::from_signs([1, 1, 1]).unwrap(), Piece::Subcell(1)).map_err(|e| e.to_string())?;
    let target = Octant::from_signs([-1, 1, 1]).unwrap();
    let ev = blocking_check(&source, target, &interval).map_err(|e| e.to_string())?;
    if ev.pairs.len() != 20 {
        return Err(format!("{} cases, expected 20", ev.pairs.len()));
    }
    let expected = [
        (2, AffR::q(-2, 1, 2, 1)),
        (5, AffR::q(-5, 1, 4, 1)),
        (11, AffR::q(1, 1, 0, 1)),
        (13, AffR::q(4, 1, -2, 1)),
        (17, AffR::q(-2, 1, 4, 3)),
        (20, AffR::q(0, 1, 2, 3)),
    ];
    let mut problems = Vec::new();
    for (case, want) in &expected {
        let got = &ev.pairs[case - 1].distance;
        if got != want {
            problems.push(format!("case {case}: {got}, expected {want}"));
        }
    }
    let not_less: Vec<usize> =
        ev.pairs.iter().enumerate().filter(|(_, p)| p.verdict != Verdict::AlwaysLess).map(|(i, _)| i + 1).collect();
    if !not_less.is_empty() {
        problems.push(format!("cases {not_less:?} not always_less"));
    }
    if problems.is_empty() {
        Ok("all six closed forms match, 20/20 always_less".into())
    } else {
        Err(problems.join("; "))
    }
}

fn region_equivalence() -> Outcome {
    let radii = [q(6, 11), q(4, 7), q(3, 5), q(2, 3)];
    for r in &radii {
        for sign in Octant::all() {
            let h = region_hrep(sign, r).map_err(|e| e.to_string())?;
            let computed = dd_convert(&h).map_err(|e| format!("{sign} at {r}: {e}"))?;
            let formula = Region::new(sign, Piece::Whole).unwrap().eval(r);
            if computed.vertex_set() != formula.vertex_set() {
                return Err(format!("{sign} at {r}: {:?} vs {:?}", computed.vertex_set(), formula.vertex_set()));
            }
        }
    }
    for sign in Octant::all() {
        let v = dd_convert(&region_hrep(sign, &q(2, 3)).unwrap()).unwrap().vertex_set();
        let s = sign.signs();
        let centroid = Point::new(s.iter().map(|&x| q(x, 3)).collect());
        if v != vec![centroid] {
            return Err(format!("{sign} at 2/3 is {v:?}, not the facet centroid"));
        }
    }
    Ok("8 signs x 4 radii agree; singleton centroids at 2/3".into())
}

fn vertex_capture() -> Outcome {
    let mut cases: Vec<(usize, Rat)> =
        [q(6, 11), q(4, 7), q(3, 5), q(2, 3), Rat::one()].into_iter().map(|r| (3, r)).collect();
    cases.push((2, Rat::one()));
    cases.push((4, Rat::one()));
    for (n, r) in &cases {
        let ev = vertex_capture_check(*n, r).map_err(|e| e.to_string())?;
        if !ev.holds {
            return Err(format!("capture fails at n={n}, r={r}"));
        }
    }
    Ok(format!("{} (n, r) cases", cases.len()))
}

fn frontier_reproduction() -> Outcome {
    let set = construct(Construction::Q13, 3).map_err(|e| e.to_string())?;
    let report = frontier_analysis(&set, &q(6, 11)).map_err(|e| e.to_string())?;
    let region = report.region(Octant::from_signs([1, 1, 1]).unwrap());
    if !region.occupants.is_empty() || region.state != RegionState::Blocked {
        return Err(format!("region (1,1,1) is {:?} with occupants {:?}", region.state, region.occupants));
    }
    let point = Point::over(11, &[-1, 5, 5]);
    let blocker =
        region.blockers.iter().find(|b| b.point == point).ok_or("(-1,5,5)/11 does not block region (1,1,1)")?;
    let mut got = blocker.distances.clone();
    got.sort();
    let mut want = vec![Rat::one(), q(10, 11), q(10, 11), q(2, 11)];
    want.sort();
    if got != want {
        let show = |v: &[Rat]| v.iter().map(Rat::to_string).collect::<Vec<_>>().join(", ");
        return Err(format!("blocked as expected, but distances {{{}}} differ from {{{}}}", show(&got), show(&want)));
    }
    Ok("unoccupied, blocked, distances match".into())
}

fn occupancy_enumeration() -> Outcome {
    let whole = build_block_table(&iv("(3/5,2/3]"), OccupancyMode::WholeRegion).map_err(|e| e.to_string())?;
    let sub = build_block_table(&iv("(4/7,3/5]"), OccupancyMode::PerSubcell).map_err(|e| e.to_string())?;
    let empty = BlockTable::empty(iv("(1/2,4/7]"));
    let got = [
        occupancy_bound(&whole, OccupancyMode::WholeRegion).bound,
        occupancy_bound(&sub, OccupancyMode::PerSubcell).bound,
        occupancy_bound(&empty, OccupancyMode::DiameterOnly).bound,
    ];
    if got == [4, 6, 8] {
        Ok("4, 6, 8".into())
    } else {
        Err(format!("got {got:?}, expected [4, 6, 8]"))
    }
}

fn random_simplex(rng: &mut ChaCha8Rng, dim: usize) -> VPolytope {
    let vertices = (0..=dim)
        .map(|_| Point::new((0..dim).map(|_| q(rng.gen_range(-24..=24), rng.gen_range(1..=12))).collect()))
        .collect();
    VPolytope::new(dim, vertices).unwrap()
}

/// Barycentric grid of resolution `m` over a simplex, in floating point.
fn barycentric_grid(s: &VPolytope, m: usize) -> Vec<Vec<f64>> {
    let verts: Vec<Vec<f64>> = s.vertices.iter().map(Point::to_f64).collect();
    let k = verts.len();
    let mut out = Vec::new();
    let mut w = vec![0usize; k];
    fn rec(i: usize, left: usize, w: &mut Vec<usize>, verts: &[Vec<f64>], m: usize, out: &mut Vec<Vec<f64>>) {
        if i + 1 == w.len() {
            w[i] = left;
            let dim = verts[0].len();
            let p = (0..dim).map(|c| w.iter().zip(verts).map(|(&wi, v)| wi as f64 / m as f64 * v[c]).sum()).collect();
            out.push(p);
            return;
        }
        for x in 0..=left {
            w[i] = x;
            rec(i + 1, left - x, w, verts, m, out);
        }
    }
    rec(0, m, &mut w, &verts, m, &mut out);
    out
}

fn l1f(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Largest l1 distance between neighbouring grid points.
fn grid_cell_diameter(s: &VPolytope, m: usize) -> f64 {
    let verts: Vec<Vec<f64>> = s.vertices.iter().map(Point::to_f64).collect();
    let mut edge: f64 = 0.0;
    for a in &verts {
        for b in &verts {
            edge = edge.max(l1f(a, b));
        }
    }
    s.dim as f64 * edge / m as f64
}

fn oracle_equivalence() -> Outcome {
    const GRID: usize = 9;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let mut worst_gap: f64 = 0.0;
    for instance in 0..50 {
        let dim = 2 + instance % 2;
        let a = random_simplex(&mut rng, dim);
        let b = random_simplex(&mut rng, dim);
        let (exact, _, _) = max_l1_between(&a, &b).map_err(|e| e.to_string())?;
        let exact = exact.to_f64();
        let ga = barycentric_grid(&a, GRID);
        let gb = barycentric_grid(&b, GRID);
        let brute = ga.iter().flat_map(|p| gb.iter().map(move |q| l1f(p, q))).fold(0.0, f64::max);
        let gap = exact - brute;
        let allowed = grid_cell_diameter(&a, GRID) + grid_cell_diameter(&b, GRID);
        if gap < -1e-9 || gap > allowed + 1e-9 {
            return Err(format!("instance {instance}: exact {exact}, grid {brute}, allowed gap {allowed}"));
        }
        worst_gap = worst_gap.max(gap);
    }
    Ok(format!("50 instances, largest gap {worst_gap:.3e}"))
}

fn search_reproduction() -> Outcome {
    let start = Instant::now();
    let mut ten = SearchConfig::new(3, 10);
    ten.restarts = 32;
    ten.denominator_bound = 3;
    ten.seed = 7;
    let result = local_search(&ten).map_err(|e| e.to_string())?;
    if result.certified_radius != Some(q(2, 3)) {
        return Err(format!("k=10: certified {:?}, expected 2/3", result.certified_radius.map(|r| r.to_string())));
    }
    let mut six = SearchConfig::new(3, 6);
    six.denominator_bound = 1;
    six.seed = 7;
    let result = local_search(&six).map_err(|e| e.to_string())?;
    if result.certified_radius != Some(Rat::one()) {
        return Err(format!("k=6: certified {:?}, expected 1", result.certified_radius.map(|r| r.to_string())));
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("2/3 for k=10 and 1 for k=6 in {:.2?}", start.elapsed()))
}

fn coverage_property() -> Outcome {
    for r in [q(6, 11), q(3, 5), q(2, 3)] {
        let rep = coverage_check(&r, 10_000, 2024).map_err(|e| e.to_string())?;
        if !rep.covered {
            return Err(format!("coverage fails at {r}: {:?}", rep.witness));
        }
    }
    for r in [q(6, 11), q(3, 5)] {
        for sign in Octant::all() {
            let rep = subcell_union_check(sign, &r, 5_000, 2024).map_err(|e| e.to_string())?;
            if !rep.covered {
                return Err(format!("subcells of {sign} miss {:?} at {r}", rep.witness));
            }
        }
    }
    Ok("10,000 samples at 3 radii; 5,000 per region for the subcells".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("construction radii", construction_radii),
        ("certified upper bounds", certified_upper_bounds),
        ("20-case blocking table", twenty_case_table),
        ("facet/vertex equivalence", region_equivalence),
        ("vertex capture", vertex_capture),
        ("frontier reproduction", frontier_reproduction),
        ("occupancy enumeration", occupancy_enumeration),
        ("oracle equivalence", oracle_equivalence),
        ("search reproduction", search_reproduction),
        ("coverage", coverage_property),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
