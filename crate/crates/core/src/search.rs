//! Maximin dispersion search: simulated annealing in floating point, then
//! rational snapping and exact certification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::packings::{critical_radius, PackingSet};

/// Annealing constants. Step size and temperature decay geometrically
/// from their initial to their final values over `max_iters`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub initial_step: f64,
    pub final_step: f64,
    pub initial_temperature: f64,
    pub final_temperature: f64,
    /// Chance that a move relocates the point uniformly instead.
    pub jump_probability: f64,
}

impl Default for Schedule {
    fn default() -> Schedule {
        Schedule {
            initial_step: 0.3,
            final_step: 1e-5,
            initial_temperature: 0.03,
            final_temperature: 1e-6,
            jump_probability: 0.05,
        }
    }
}

impl Schedule {
    fn decay(from: f64, to: f64, iters: usize) -> f64 {
        if iters == 0 || from <= 0.0 || to <= 0.0 {
            1.0
        } else {
            (to / from).powf(1.0 / iters as f64)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub dim: usize,
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub denominator_bound: u32,
    #[serde(default)]
    pub target_radius: Option<Rat>,
    #[serde(default)]
    pub initial: Option<PackingSet>,
    #[serde(default)]
    pub schedule: Schedule,
}

impl SearchConfig {
    pub fn new(dim: usize, k: usize) -> SearchConfig {
        SearchConfig {
            dim,
            k,
            restarts: 8,
            max_iters: 50_000,
            seed: 0,
            denominator_bound: 12,
            target_radius: None,
            initial: None,
            schedule: Schedule::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.k < 2 || self.denominator_bound < 1 || self.restarts < 1 {
            return Err(Error::InvalidInput("need dim >= 1, k >= 2, restarts >= 1 and denominator bound >= 1".into()));
        }
        if let Some(init) = &self.initial {
            if init.dim != self.dim || init.len() != self.k {
                return Err(Error::InvalidInput(format!(
                    "initial set has {} points in dimension {}, expected {} in dimension {}",
                    init.len(),
                    init.dim,
                    self.k,
                    self.dim
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub initial_min_distance: f64,
    pub best_min_distance: f64,
    pub snap_denominator: Option<u32>,
    pub certified_radius: Option<Rat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub config: SearchConfig,
    pub best_restart: usize,
    pub best_float_points: Vec<Vec<f64>>,
    pub best_float_min_distance: f64,
    pub snapped: Option<PackingSet>,
    pub snap_denominator: Option<u32>,
    pub certified_radius: Option<Rat>,
    pub best_known: Option<Rat>,
    pub record: bool,
    pub reached_target: Option<bool>,
    pub history: Vec<RestartSummary>,
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Smallest and second smallest pair distance, and the closest pair.
fn objective(pts: &[Vec<f64>]) -> (f64, f64, (usize, usize)) {
    let mut first = (f64::INFINITY, (0, 1));
    let mut second = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = l1(&pts[i], &pts[j]);
            if d < first.0 {
                second = first.0;
                first = (d, (i, j));
            } else if d < second {
                second = d;
            }
        }
    }
    (first.0, second, first.1)
}

fn project(x: &mut [f64]) {
    let norm: f64 = x.iter().map(|v| v.abs()).sum();
    if norm > 1.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
}

/// Uniform point of `C_n*`: normalized exponentials give a uniform point of
/// the simplex, then random signs.
fn uniform_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..=n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e[..n].iter().map(|x| if rng.gen::<bool>() { x / total } else { -x / total }).collect()
}

/// Greedy maximin choice from a pool of uniform samples: each new point is
/// the pool point farthest from those already chosen.
fn farthest_point_start(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
    let pool: Vec<Vec<f64>> = (0..POOL_PER_POINT * k).map(|_| uniform_point(rng, n)).collect();
    let mut nearest = vec![f64::INFINITY; pool.len()];
    let mut chosen = vec![pool[0].clone()];
    while chosen.len() < k {
        let last = chosen.last().expect("nonempty");
        for (d, p) in nearest.iter_mut().zip(&pool) {
            *d = d.min(l1(p, last));
        }
        let next = (0..pool.len()).max_by(|&a, &b| nearest[a].total_cmp(&nearest[b])).expect("nonempty pool");
        chosen.push(pool[next].clone());
    }
    chosen
}

const POOL_PER_POINT: usize = 4096;

fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 > b.1)
}

struct RestartOutcome {
    initial_min: f64,
    best: Vec<Vec<f64>>,
    best_min: f64,
}

fn anneal(config: &SearchConfig, restart: usize) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let mut pts: Vec<Vec<f64>> = match &config.initial {
        Some(set) => set.points.iter().map(Point::to_f64).collect(),
        None => farthest_point_start(&mut rng, config.dim, config.k),
    };
    let (m0, s0, mut pair) = objective(&pts);
    let mut current = (m0, s0);
    let mut best = (pts.clone(), current);
    let sched = &config.schedule;
    let (mut step, mut temp) = (sched.initial_step, sched.initial_temperature);
    let step_decay = Schedule::decay(sched.initial_step, sched.final_step, config.max_iters);
    let temp_decay = Schedule::decay(sched.initial_temperature, sched.final_temperature, config.max_iters);

    for _ in 0..config.max_iters {
        let idx = if rng.gen::<bool>() { pair.0 } else { pair.1 };
        let old = pts[idx].clone();
        if rng.gen::<f64>() < sched.jump_probability {
            pts[idx] = uniform_point(&mut rng, config.dim);
        } else {
            for v in pts[idx].iter_mut() {
                *v += step * rng.gen_range(-1.0..=1.0);
            }
            project(&mut pts[idx]);
        }
        let (m, s, p) = objective(&pts);
        let cand = (m, s);
        let accept = better(cand, current) || {
            let delta = if m == current.0 { s - current.1 } else { m - current.0 };
            temp > 0.0 && rng.gen::<f64>() < (delta / temp).exp()
        };
        if accept {
            current = cand;
            pair = p;
            if better(current, best.1) {
                best = (pts.clone(), current);
            }
        } else {
            pts[idx] = old;
        }
        step *= step_decay;
        temp *= temp_decay;
    }
    RestartOutcome { initial_min: m0, best_min: best.1 .0, best: best.0 }
}

/// Outcome of snapping with one denominator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapAttempt {
    pub denominator: u32,
    pub radius: Option<Rat>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapped {
    pub set: PackingSet,
    pub denominator: u32,
    pub radius: Rat,
    pub attempts: Vec<SnapAttempt>,
}

fn snap_with(points: &[Vec<f64>], dim: usize, d: u32) -> Result<PackingSet> {
    let den = i64::from(d);
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        if x.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        let p = Point::new(x.iter().map(|v| Rat::new((v * d as f64).round() as i64, den)).collect());
        let norm = crate::geometry::l1_norm(&p);
        let p = if norm > Rat::one() { p.scaled(&norm.recip()?) } else { p };
        out.push(p);
    }
    PackingSet::new(dim, format!("snapped/{d}"), out)
        .map_err(|_| Error::InvalidInput(format!("points collapse at denominator {d}")))
}

/// Rounds to multiples of `1/d` for every `d <= bound`, pulls overshooting
/// points back onto the boundary exactly, and keeps the denominator with the
/// largest certified radius (the smaller `d` on ties).
pub fn snap_rational(points: &[Vec<f64>], dim: usize, bound: u32) -> Result<Snapped> {
    if bound < 1 {
        return Err(Error::InvalidInput("denominator bound must be at least 1".into()));
    }
    let mut attempts = Vec::new();
    let mut best: Option<(PackingSet, u32, Rat)> = None;
    for d in 1..=bound {
        match snap_with(points, dim, d).and_then(|set| Ok((critical_radius(&set)?, set))) {
            Ok((radius, set)) => {
                attempts.push(SnapAttempt { denominator: d, radius: Some(radius.clone()), error: None });
                if best.as_ref().is_none_or(|(_, _, r)| &radius > r) {
                    best = Some((set, d, radius));
                }
            }
            Err(e) => attempts.push(SnapAttempt { denominator: d, radius: None, error: Some(e.to_string()) }),
        }
    }
    let (set, denominator, radius) =
        best.ok_or_else(|| Error::InvalidInput(format!("every denominator up to {bound} collapses")))?;
    Ok(Snapped { set, denominator, radius, attempts })
}

/// Best radius known for `k` points in `C_dim*`, if tabulated.
pub fn best_known_radius(dim: usize, k: usize) -> Option<Rat> {
    if dim < 2 || k < 2 {
        return None;
    }
    if k <= 2 * dim {
        return Some(Rat::one());
    }
    if dim == 3 {
        return match k {
            7..=10 => Some(Rat::new(2, 3)),
            11 | 12 => Some(Rat::new(3, 5)),
            13 => Some(Rat::new(6, 11)),
            // cited lower bound of 19 points at r = 1/2
            14..=19 => Some(Rat::new(1, 2)),
            _ => None,
        };
    }
    (k <= 2 * dim + 2).then(|| Rat::one() - Rat::new(1, dim as i64))
}

/// Strictly beats the tabulated radius for `k` points.
pub fn is_record(dim: usize, k: usize, radius: &Rat) -> bool {
    best_known_radius(dim, k).is_some_and(|b| radius > &b)
}

/// Re-derives the certified radius of the snapped set exactly and flags
/// records against [`best_known_radius`].
pub fn certify_result(mut result: SearchResult) -> Result<SearchResult> {
    let set = result.snapped.as_ref().ok_or_else(|| Error::InvalidInput("search result has no snapped set".into()))?;
    let radius = critical_radius(set)?;
    result.best_known = best_known_radius(set.dim, set.len());
    result.record = is_record(set.dim, set.len(), &radius);
    result.reached_target = result.config.target_radius.as_ref().map(|t| &radius >= t);
    result.certified_radius = Some(radius);
    Ok(result)
}

/// Runs all restarts (in parallel), snaps and certifies each, and keeps
/// the best by certified radius, then float objective, then restart index.
pub fn local_search(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let outcomes: Vec<(RestartOutcome, Option<Snapped>)> = (0..config.restarts)
        .into_par_iter()
        .map(|i| {
            let o = anneal(config, i);
            let snapped = snap_rational(&o.best, config.dim, config.denominator_bound).ok();
            (o, snapped)
        })
        .collect();
    let history: Vec<RestartSummary> = outcomes
        .iter()
        .enumerate()
        .map(|(i, (o, s))| RestartSummary {
            restart: i,
            initial_min_distance: o.initial_min,
            best_min_distance: o.best_min,
            snap_denominator: s.as_ref().map(|s| s.denominator),
            certified_radius: s.as_ref().map(|s| s.radius.clone()),
        })
        .collect();
    let best_idx = (0..outcomes.len())
        .max_by(|&a, &b| {
            let ra = &outcomes[a].1.as_ref().map(|s| &s.radius);
            let rb = &outcomes[b].1.as_ref().map(|s| &s.radius);
            ra.cmp(rb).then(outcomes[a].0.best_min.total_cmp(&outcomes[b].0.best_min)).then(b.cmp(&a))
        })
        .expect("at least one restart");
    let (best, snapped) = &outcomes[best_idx];
    let result = SearchResult {
        config: config.clone(),
        best_restart: best_idx,
        best_float_points: best.best.clone(),
        best_float_min_distance: best.best_min,
        snapped: snapped.as_ref().map(|s| s.set.clone()),
        snap_denominator: snapped.as_ref().map(|s| s.denominator),
        certified_radius: None,
        best_known: None,
        record: false,
        reached_target: None,
        history,
    };
    if result.snapped.is_some() {
        certify_result(result)
    } else {
        Ok(result)
    }
}
