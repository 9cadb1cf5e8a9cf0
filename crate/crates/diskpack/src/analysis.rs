//! Contact-graph extraction under the bond tolerance regime, solid/rattler
//! classification, validity reporting, and series threshold analysis.

use thiserror::Error;

use crate::billiards::{self, SimParams};
use crate::core::{Packing, PatternVariant, Point, SeriesId, Wall};
use crate::io::BestKnownTable;
use crate::patterns;

/// Default bond tolerance as a fraction of the disk diameter: a bond is
/// recorded when the surface distance is below `1e-12 * m`.
pub const BOND_REL_TOL: f64 = 1e-12;
/// Well-formed gap floor: non-bonded surfaces are expected to clear at
/// least `1e-7 * m`.
pub const GAP_REL_FLOOR: f64 = 1e-7;
/// Stronger floor that holds for all but one packing reported.
pub const GAP_REL_FLOOR_STRONG: f64 = 1e-5;
/// Margin on challenger comparisons: a pattern counts as beaten only when
/// the challenger exceeds it by more than this.
pub const BEATEN_MARGIN: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no challenger value available for n = {0}")]
    MissingChallenger(u32),
    #[error("series {series} member k = {k} could not be produced: {detail}")]
    PatternUnavailable { series: SeriesId, k: u32, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskDiskBond {
    pub i: usize,
    pub j: usize,
    pub gap: f64,
    /// Unit vector from disk i toward disk j.
    pub normal: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskWallBond {
    pub disk: usize,
    pub wall: Wall,
    pub gap: f64,
}

/// A pair (disk-disk or disk-wall) whose gap falls in the reporting band
/// `[bond_tol, 1e-5 m)`: close enough to deserve a second look.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearMiss {
    pub i: usize,
    /// `Some(wall)` for a disk-wall near miss, `None` with `j` for a pair.
    pub wall: Option<Wall>,
    pub j: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskClass {
    Solid,
    Rattler,
}

#[derive(Debug, Clone)]
pub struct ContactGraph {
    pub n: usize,
    pub m: f64,
    pub bond_tol: f64,
    pub dd: Vec<DiskDiskBond>,
    pub dw: Vec<DiskWallBond>,
    pub near_misses: Vec<NearMiss>,
    pub classes: Vec<DiskClass>,
}

impl ContactGraph {
    pub fn rattler_count(&self) -> usize {
        self.classes.iter().filter(|c| **c == DiskClass::Rattler).count()
    }

    pub fn bond_count(&self) -> usize {
        self.dd.len() + self.dw.len()
    }

    /// Disk-disk bonds as index pairs, sorted.
    pub fn dd_pairs(&self) -> Vec<(usize, usize)> {
        self.dd.iter().map(|b| (b.i, b.j)).collect()
    }
}

/// Wall gap of a center in the centers-square frame. The physical wall sits
/// `m/2` outside the centers square, so the surface gap to a wall equals
/// the center's distance to the centers-square edge.
fn wall_gap(c: Point, wall: Wall) -> f64 {
    match wall {
        Wall::Left => c.x,
        Wall::Right => 1.0 - c.x,
        Wall::Bottom => c.y,
        Wall::Top => 1.0 - c.y,
    }
}

/// Extracts the contact graph of a packing: bonds where the gap is below
/// `bond_tol`, near misses up to the reporting band, and the solid/rattler
/// classification.
pub fn contact_graph(p: &Packing, bond_tol: f64) -> ContactGraph {
    let m = p.m();
    let band = GAP_REL_FLOOR_STRONG * m;
    let centers = p.centers();
    let mut dd = Vec::new();
    let mut dw = Vec::new();
    let mut near = Vec::new();
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let delta = centers[j] - centers[i];
            let dist = delta.norm();
            let gap = dist - m;
            if gap < bond_tol {
                dd.push(DiskDiskBond { i, j, gap, normal: delta * (1.0 / dist) });
            } else if gap < band {
                near.push(NearMiss { i, wall: None, j, gap });
            }
        }
        for wall in Wall::ALL {
            let gap = wall_gap(centers[i], wall);
            if gap < bond_tol {
                dw.push(DiskWallBond { disk: i, wall, gap });
            } else if gap < band {
                near.push(NearMiss { i, wall: Some(wall), j: i, gap });
            }
        }
    }
    let classes = classify(centers.len(), &dd, &dw);
    ContactGraph { n: centers.len(), m, bond_tol, dd, dw, near_misses: near, classes }
}

/// Iterative pruning: a disk is loose when it has fewer than 3 contacts
/// (walls count) or all its contact directions fit in an open half-plane;
/// loose disks are removed and the test repeats to a fixed point.
pub fn classify_rattlers(g: &ContactGraph) -> Vec<DiskClass> {
    classify(g.n, &g.dd, &g.dw)
}

fn classify(n: usize, dd: &[DiskDiskBond], dw: &[DiskWallBond]) -> Vec<DiskClass> {
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            let mut dirs: Vec<f64> = Vec::new();
            for b in dd {
                if b.i == i && alive[b.j] {
                    dirs.push(b.normal.y.atan2(b.normal.x));
                } else if b.j == i && alive[b.i] {
                    dirs.push((-b.normal.y).atan2(-b.normal.x));
                }
            }
            for b in dw {
                if b.disk == i {
                    // Direction from the disk toward the wall contact.
                    let a = match b.wall {
                        Wall::Left => std::f64::consts::PI,
                        Wall::Right => 0.0,
                        Wall::Bottom => -std::f64::consts::FRAC_PI_2,
                        Wall::Top => std::f64::consts::FRAC_PI_2,
                    };
                    dirs.push(a);
                }
            }
            if dirs.len() < 3 || max_angular_gap(&mut dirs) >= std::f64::consts::PI - 1e-9 {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    alive
        .into_iter()
        .map(|a| if a { DiskClass::Solid } else { DiskClass::Rattler })
        .collect()
}

fn max_angular_gap(dirs: &mut [f64]) -> f64 {
    dirs.sort_by(f64::total_cmp);
    let mut max_gap: f64 = 0.0;
    for w in dirs.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    let wrap = dirs[0] + 2.0 * std::f64::consts::PI - dirs[dirs.len() - 1];
    max_gap.max(wrap)
}

/// Outcome of the well-formed-gap check: no gap may fall between the bond
/// tolerance and the floor.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub gap_floor: f64,
    pub pass: bool,
    pub offenders: Vec<NearMiss>,
    /// Whether the stronger 1e-5 floor also holds.
    pub pass_strong_floor: bool,
}

pub fn well_formed_gap_check(g: &ContactGraph, gap_floor: f64) -> GapReport {
    let offenders: Vec<NearMiss> = g
        .near_misses
        .iter()
        .filter(|nm| nm.gap < gap_floor)
        .copied()
        .collect();
    let strong = g
        .near_misses
        .iter()
        .all(|nm| nm.gap >= GAP_REL_FLOOR_STRONG * g.m);
    GapReport { gap_floor, pass: offenders.is_empty(), offenders, pass_strong_floor: strong }
}

/// Validity report of a disk arrangement at diameter `m`.
#[derive(Debug, Clone)]
pub struct ValidityReport {
    pub valid: bool,
    pub max_overlap_frac: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub span: (f64, f64),
    pub out_of_bounds: Vec<usize>,
}

pub fn validate(p: &Packing) -> ValidityReport {
    validate_raw(p.centers(), p.m())
}

/// Checks the core packing invariants on raw centers: bounds, span
/// normalization, and the maximum pairwise overlap as a fraction of `m`.
pub fn validate_raw(centers: &[Point], m: f64) -> ValidityReport {
    let mut max_overlap: f64 = 0.0;
    let mut worst = None;
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let overlap = (m - centers[i].dist(centers[j])) / m;
            if overlap > max_overlap {
                max_overlap = overlap;
                worst = Some((i, j));
            }
        }
    }
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut oob = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        if c.x < -1e-9 || c.x > 1.0 + 1e-9 || c.y < -1e-9 || c.y > 1.0 + 1e-9 {
            oob.push(i);
        }
        min.x = min.x.min(c.x);
        min.y = min.y.min(c.y);
        max.x = max.x.max(c.x);
        max.y = max.y.max(c.y);
    }
    let span = (max.x - min.x, max.y - min.y);
    let span_ok = (span.0.max(span.1) - 1.0).abs() < 1e-9;
    ValidityReport {
        valid: max_overlap <= crate::core::OVERLAP_REL_TOL && oob.is_empty() && span_ok,
        max_overlap_frac: max_overlap.max(0.0),
        worst_pair: worst,
        span,
        out_of_bounds: oob,
    }
}

/// Where challenger values are taken from during threshold analysis.
pub enum ChallengerSource<'a> {
    /// Look challengers up in a best-known table; missing rows error.
    Table(&'a BestKnownTable),
    /// Produce challengers by multi-start simulation.
    Simulate { params: SimParams, seeds: Vec<u64> },
}

#[derive(Debug, Clone)]
pub struct SeriesRow {
    pub k: u32,
    pub n: u32,
    pub exists: bool,
    pub m_pattern: Option<f64>,
    pub m_challenger: Option<f64>,
    pub challenger_source: String,
    pub pattern_beaten: bool,
    /// Ideal-geometry overlap fraction; only nonzero for half-k members
    /// past their existence range.
    pub overlap: f64,
}

#[derive(Debug, Clone)]
pub struct SeriesReport {
    pub series: SeriesId,
    pub rows: Vec<SeriesRow>,
    /// Last scanned n at which the pattern exists and is not beaten before
    /// any beaten member.
    pub n0: Option<u32>,
    /// First scanned n at which the pattern is beaten.
    pub n1: Option<u32>,
}

/// Pattern-side m for a series member: closed form where one exists,
/// tightened configuration C for the k²−3 series.
pub fn pattern_m(series: SeriesId, k: u32) -> Result<Option<f64>, AnalysisError> {
    if series == SeriesId::SquareMinus3 {
        let cfg = patterns::build_config_c(k).map_err(|e| AnalysisError::PatternUnavailable {
            series,
            k,
            detail: e.to_string(),
        })?;
        let params = SimParams::default();
        let result = billiards::tighten(&cfg, &params, SQUARE_MINUS3_SEED).map_err(|e| {
            AnalysisError::PatternUnavailable { series, k, detail: e.to_string() }
        })?;
        Ok(Some(result.packing.m()))
    } else {
        let f = patterns::m_pattern(series, k)
            .map_err(|e| AnalysisError::PatternUnavailable { series, k, detail: e.to_string() })?;
        Ok(f.m)
    }
}

/// Fixed seed of the deterministic tighten used for the k²−3 pattern side.
const SQUARE_MINUS3_SEED: u64 = 0x534d_33;

/// Compares each series member in `k_range` against the best challenger
/// available and derives the thresholds n0/n1.
pub fn series_threshold(
    series: SeriesId,
    k_range: impl IntoIterator<Item = u32>,
    challenger: &ChallengerSource<'_>,
) -> Result<SeriesReport, AnalysisError> {
    let mut rows = Vec::new();
    for k in k_range {
        let n = series.n_for_k(k);
        let (exists, _) = patterns::exists_pattern(series, k);
        let m_pattern = match pattern_m(series, k) {
            Ok(m) => m,
            Err(AnalysisError::PatternUnavailable { .. }) if !exists => None,
            Err(e) => return Err(e),
        };
        let (m_challenger, source) = match challenger {
            ChallengerSource::Table(table) => match table.lookup(n) {
                Some(row) => (Some(row.m_best), row.source.clone()),
                None => return Err(AnalysisError::MissingChallenger(n)),
            },
            ChallengerSource::Simulate { params, seeds } => {
                let result = billiards::best_of(n as usize, params, seeds)
                    .map_err(|e| AnalysisError::PatternUnavailable {
                        series,
                        k,
                        detail: format!("challenger simulation failed: {e}"),
                    })?;
                (
                    Some(result.best.packing.m()),
                    format!("simulated seeds={} best_seed={}", seeds.len(), result.best_seed),
                )
            }
        };
        let pattern_beaten = match (exists, m_pattern, m_challenger) {
            (true, Some(mp), Some(mc)) => mc > mp + BEATEN_MARGIN,
            _ => false,
        };
        let overlap = if series == SeriesId::HalfK {
            patterns::halfk_overlap(k).unwrap_or(0.0)
        } else {
            0.0
        };
        rows.push(SeriesRow {
            k,
            n,
            exists,
            m_pattern,
            m_challenger,
            challenger_source: source,
            pattern_beaten,
            overlap,
        });
    }
    let n1 = rows.iter().find(|r| r.exists && r.pattern_beaten).map(|r| r.n);
    let n0 = match n1 {
        Some(n1) => rows
            .iter()
            .filter(|r| r.exists && !r.pattern_beaten && r.n < n1)
            .map(|r| r.n)
            .max(),
        None => rows.iter().filter(|r| r.exists && !r.pattern_beaten).map(|r| r.n).max(),
    };
    Ok(SeriesReport { series, rows, n0, n1 })
}

#[derive(Debug, Clone, Copy)]
pub struct CrossoverRow {
    pub k: u32,
    pub n: u32,
    pub m_main: f64,
    pub m_alt: f64,
    /// True when the alternative pattern wins.
    pub alt_wins: bool,
}

/// Compares the main and the alternative k(k+1) closed forms.
pub fn oblong_crossover(k_range: impl IntoIterator<Item = u32>) -> Vec<CrossoverRow> {
    let mut out = Vec::new();
    for k in k_range {
        let main = patterns::m_pattern(SeriesId::Oblong, k).ok().and_then(|f| f.m);
        let alt = patterns::m_pattern(SeriesId::OblongAlt, k).ok().and_then(|f| f.m);
        if let (Some(m_main), Some(m_alt)) = (main, alt) {
            out.push(CrossoverRow {
                k,
                n: SeriesId::Oblong.n_for_k(k),
                m_main,
                m_alt,
                alt_wins: m_alt > m_main,
            });
        }
    }
    out
}

/// The 8 symmetries of the unit square applied to a point.
fn square_symmetry(p: Point, which: u8) -> Point {
    let (x, y) = (p.x, p.y);
    match which {
        0 => Point::new(x, y),
        1 => Point::new(1.0 - x, y),
        2 => Point::new(x, 1.0 - y),
        3 => Point::new(1.0 - x, 1.0 - y),
        4 => Point::new(y, x),
        5 => Point::new(1.0 - y, x),
        6 => Point::new(y, 1.0 - x),
        _ => Point::new(1.0 - y, 1.0 - x),
    }
}

/// Greedy congruence test: does some square symmetry map the centers of
/// `a` onto the centers of `b` within `tol`?
pub fn congruent_under_square_symmetry(a: &Packing, b: &Packing, tol: f64) -> bool {
    if a.n() != b.n() {
        return false;
    }
    for sym in 0..8u8 {
        let mapped: Vec<Point> = a.centers().iter().map(|&p| square_symmetry(p, sym)).collect();
        let mut used = vec![false; b.n()];
        let mut ok = true;
        'outer: for p in &mapped {
            for (j, q) in b.centers().iter().enumerate() {
                if !used[j] && p.dist(*q) <= tol {
                    used[j] = true;
                    continue 'outer;
                }
            }
            ok = false;
            break;
        }
        if ok {
            return true;
        }
    }
    false
}

/// Identifies the pattern a packing follows, if any: the series member with
/// the same n whose contact structure and m agree within tolerance. Returns
/// the canonical representative variant for congruent placements.
pub fn match_series(p: &Packing) -> Option<(SeriesId, u32, PatternVariant)> {
    let n = p.n() as u32;
    for series in SeriesId::ALL {
        let Some(k) = series.k_for_n(n) else { continue };
        if !patterns::exists_pattern(series, k).0 {
            continue;
        }
        let candidates: Vec<PatternVariant> = match series {
            SeriesId::SquareMinus1 | SeriesId::SquareMinus2 => {
                variant_class_representatives(series, k)
            }
            _ => vec![PatternVariant::none()],
        };
        for variant in candidates {
            let candidate = if series == SeriesId::SquareMinus3 {
                let Ok(cfg) = patterns::build_config_c(k) else { continue };
                let Ok(res) = billiards::tighten(&cfg, &SimParams::default(), SQUARE_MINUS3_SEED)
                else {
                    continue;
                };
                res.packing
            } else {
                match patterns::build_pattern(series, k, Some(&variant).filter(|v| !v.is_none())) {
                    Ok(p) => p,
                    Err(_) => continue,
                }
            };
            if (candidate.m() - p.m()).abs() < 1e-9
                && congruent_under_square_symmetry(p, &candidate, 1e-6)
            {
                return Some((series, k, variant));
            }
        }
    }
    None
}

/// One representative per congruence class of variants. Square symmetries
/// act on the placement indices directly: reflections map index i to k+1-i
/// and the transpose swaps rows with columns.
fn variant_class_representatives(series: SeriesId, k: u32) -> Vec<PatternVariant> {
    let Ok(all) = patterns::enumerate_variants(series, k) else {
        return Vec::new();
    };
    let canon = |v: &PatternVariant| -> PatternVariant {
        let flip = |idx: &[u32]| -> Vec<u32> {
            let mut out: Vec<u32> = idx.iter().map(|&i| k + 1 - i).collect();
            out.sort_unstable();
            out
        };
        let mut best: Option<PatternVariant> = None;
        for flip_r in [false, true] {
            for flip_c in [false, true] {
                for transpose in [false, true] {
                    let rows = if flip_r { flip(&v.rows) } else { v.rows.clone() };
                    let cols = if flip_c { flip(&v.cols) } else { v.cols.clone() };
                    let cand = if transpose {
                        PatternVariant { rows: cols.clone(), cols: rows.clone() }
                    } else {
                        PatternVariant { rows, cols }
                    };
                    if best.as_ref().map_or(true, |b| {
                        (cand.rows.clone(), cand.cols.clone()) < (b.rows.clone(), b.cols.clone())
                    }) {
                        best = Some(cand);
                    }
                }
            }
        }
        best.unwrap()
    };
    let mut reps: Vec<PatternVariant> = Vec::new();
    for v in &all {
        let c = canon(v);
        if !reps.contains(&c) {
            reps.push(c);
        }
    }
    reps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::build_pattern;

    #[test]
    fn square_grid_contact_counts() {
        // k x k grid: 2k(k-1) disk-disk bonds, 4k wall bonds, no rattlers.
        for k in [3u32, 6] {
            let p = build_pattern(SeriesId::Square, k, None).unwrap();
            let g = contact_graph(&p, BOND_REL_TOL * p.m());
            assert_eq!(g.dd.len() as u32, 2 * k * (k - 1), "k={k}");
            assert_eq!(g.dw.len() as u32, 4 * k, "k={k}");
            assert_eq!(g.rattler_count(), 0, "k={k}");
        }
    }

    #[test]
    fn oblong_separated_pairs_have_no_bond() {
        let p = build_pattern(SeriesId::Oblong, 5, None).unwrap();
        let g = contact_graph(&p, BOND_REL_TOL * p.m());
        // Same-column neighbors touch; the diagonal "short" pair between
        // adjacent columns is separated strictly.
        let m = p.m();
        let alpha = (1.0 / (5.0 * m)).acos();
        let expected_gap = m * (2.0 - 2.0 * alpha.sin()).sqrt() - m;
        assert!(expected_gap > 0.0);
        let mut found = false;
        for nm in crate::core::pair_distances(&p) {
            if (nm.2 - expected_gap).abs() < 1e-12 {
                found = true;
            }
        }
        assert!(found, "separated diagonal pair not present");
        assert_eq!(g.rattler_count(), 0);
    }

    #[test]
    fn gap_check_passes_on_patterns() {
        for (series, k) in [
            (SeriesId::Square, 5),
            (SeriesId::SquareMinus1, 5),
            (SeriesId::Oblong, 5),
            (SeriesId::HalfK, 5),
            (SeriesId::OblongAlt, 6),
        ] {
            let p = build_pattern(series, k, None).unwrap();
            let g = contact_graph(&p, BOND_REL_TOL * p.m());
            let report = well_formed_gap_check(&g, GAP_REL_FLOOR * p.m());
            assert!(report.pass, "{series} k={k}: {:?}", report.offenders);
            assert!(report.pass_strong_floor, "{series} k={k}");
        }
    }

    #[test]
    fn oblong_alt_k8_has_one_rattler() {
        let p = build_pattern(SeriesId::OblongAlt, 8, None).unwrap();
        let g = contact_graph(&p, BOND_REL_TOL * p.m());
        assert_eq!(g.rattler_count(), 1);
    }

    #[test]
    fn classification_is_permutation_equivariant() {
        let p = build_pattern(SeriesId::OblongAlt, 8, None).unwrap();
        let g = contact_graph(&p, BOND_REL_TOL * p.m());
        let base = classify_rattlers(&g);
        // Relabel disks by reversing indices and rebuild the packing.
        let mut centers: Vec<Point> = p.centers().to_vec();
        centers.reverse();
        let reversed = Packing::new(p.m(), centers, p.provenance().clone()).unwrap();
        let g2 = contact_graph(&reversed, BOND_REL_TOL * p.m());
        let relabeled = classify_rattlers(&g2);
        let n = base.len();
        for i in 0..n {
            assert_eq!(base[i], relabeled[n - 1 - i]);
        }
    }

    #[test]
    fn contact_graph_invariant_under_square_symmetries() {
        let p = build_pattern(SeriesId::HalfK, 5, None).unwrap();
        for sym in 0..8u8 {
            let centers: Vec<Point> =
                p.centers().iter().map(|&c| square_symmetry(c, sym)).collect();
            let q = Packing::new(p.m(), centers, p.provenance().clone()).unwrap();
            let ga = contact_graph(&p, BOND_REL_TOL * p.m());
            let gb = contact_graph(&q, BOND_REL_TOL * p.m());
            assert_eq!(ga.dd.len(), gb.dd.len());
            assert_eq!(ga.dw.len(), gb.dw.len());
            assert_eq!(ga.rattler_count(), gb.rattler_count());
            assert!(congruent_under_square_symmetry(&p, &q, 1e-12));
        }
    }

    #[test]
    fn validate_flags_overlap() {
        let ideal = patterns::build_halfk_ideal(8).unwrap();
        let report = validate_raw(&ideal.centers, ideal.diameter);
        assert!(!report.valid);
        assert!(report.max_overlap_frac > 0.0 && report.max_overlap_frac < 0.01);
        let p = build_pattern(SeriesId::Square, 4, None).unwrap();
        let report = validate(&p);
        assert!(report.valid);
        assert_eq!(report.max_overlap_frac, 0.0);
    }

    #[test]
    fn crossover_flips_at_k8() {
        let rows = oblong_crossover(4..=12);
        for r in &rows {
            assert_eq!(r.alt_wins, r.k >= 8, "k={}", r.k);
        }
    }

    #[test]
    fn match_series_round_trip() {
        let p = build_pattern(SeriesId::HalfK, 6, None).unwrap();
        let hit = match_series(&p).unwrap();
        assert_eq!(hit.0, SeriesId::HalfK);
        assert_eq!(hit.1, 6);
        let p = build_pattern(SeriesId::Square, 5, None).unwrap();
        let hit = match_series(&p).unwrap();
        assert_eq!(hit.0, SeriesId::Square);
    }

    #[test]
    fn match_series_identifies_congruent_variant() {
        let v = PatternVariant::single(2, 4);
        let p = build_pattern(SeriesId::SquareMinus1, 6, Some(&v)).unwrap();
        let (series, k, rep) = match_series(&p).unwrap();
        assert_eq!((series, k), (SeriesId::SquareMinus1, 6));
        // The representative must be congruent to (2,4) under the square
        // symmetries acting on indices.
        let q = build_pattern(SeriesId::SquareMinus1, 6, Some(&rep)).unwrap();
        assert!(congruent_under_square_symmetry(&p, &q, 1e-9));
    }
}
