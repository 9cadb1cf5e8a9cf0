//! Analytic builders, closed-form diameter solvers, existence predicates
//! and variant enumeration for the pattern families.
//!
//! Square, Oblong, OblongAlt, HalfK and SquareMinus1 are constructed in
//! closed form. SquareMinus2 is built from a schematic configuration that
//! is tightened by the billiards engine and refined by the Newton polish;
//! SquareMinus3 has no closed form at all and is only reachable through
//! [`build_config_c`] plus tightening.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::analysis;
use crate::billiards::{self, SimParams};
use crate::core::{Configuration, CoreError, Packing, PatternVariant, Point, Provenance, SeriesId};

/// cos 15° = sqrt(2 + sqrt 3) / 2, the nesting angle of shifted rows.
pub fn cos15() -> f64 {
    (2.0 + 3.0_f64.sqrt()).sqrt() / 2.0
}

/// sin 15° = sqrt(2 - sqrt 3) / 2.
pub fn sin15() -> f64 {
    (2.0 - 3.0_f64.sqrt()).sqrt() / 2.0
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("series {0} has no closed form; use the tighten pipeline")]
    UnsupportedSeries(SeriesId),
    #[error("pattern {series} does not exist for k = {k}: {reason}")]
    PatternNotRepresentable { series: SeriesId, k: u32, reason: String },
    #[error("invalid variant for {series} k = {k}: {detail}")]
    InvalidVariant { series: SeriesId, k: u32, detail: String },
    #[error("construction of {series} k = {k} failed: {detail}")]
    Construction { series: SeriesId, k: u32, detail: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Closed-form data of one series member.
#[derive(Debug, Clone)]
pub struct SeriesFormula {
    pub series: SeriesId,
    pub k: u32,
    /// Diameter ratio from the closed form; `None` when the formula itself
    /// has no solution (e.g. the OblongAlt root below its k-range).
    pub m: Option<f64>,
    /// The auxiliary angle α or β in radians, when the series has one.
    pub angle: Option<f64>,
    pub exists: bool,
    pub reason: String,
}

/// α(k) of the oblong pattern: cos α = (k² − k + √(2k)) / (k² + 1).
fn oblong_alpha(k: u32) -> f64 {
    let kf = k as f64;
    let ca = (kf * kf - kf + (2.0 * kf).sqrt()) / (kf * kf + 1.0);
    ca.acos()
}

/// α(k) of the half-k pattern, from k cos α = 2(k−1) sin α.
fn halfk_alpha(k: u32) -> f64 {
    let kf = k as f64;
    (kf / (2.0 * (kf - 1.0))).atan()
}

/// β(k) of the alternative oblong pattern: the root of
/// `k cos β + cos(β + π/3) = (k−1) sin(β + π/3) + sin β` in (0, π/6).
///
/// Bracketed bisection to interval width 1e-16, then two Newton steps.
fn oblong_alt_beta(k: u32) -> Option<f64> {
    let kf = k as f64;
    let f = |b: f64| {
        kf * b.cos() + (b + std::f64::consts::FRAC_PI_3).cos()
            - (kf - 1.0) * (b + std::f64::consts::FRAC_PI_3).sin()
            - b.sin()
    };
    let fp = |b: f64| {
        -kf * b.sin() - (b + std::f64::consts::FRAC_PI_3).sin()
            - (kf - 1.0) * (b + std::f64::consts::FRAC_PI_3).cos()
            - b.cos()
    };
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_6);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if flo * fhi > 0.0 {
        return None;
    }
    while hi - lo > 1e-16 {
        let mid = 0.5 * (lo + hi);
        if f(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut b = 0.5 * (lo + hi);
    for _ in 0..2 {
        b -= f(b) / fp(b);
    }
    Some(b)
}

/// Existence of a series member, with the disqualifying reason if absent.
pub fn exists_pattern(series: SeriesId, k: u32) -> (bool, String) {
    if k < 2 {
        return (false, format!("k = {k} is below the minimal index 2"));
    }
    match series {
        SeriesId::Square => (true, "straight grid exists for every k >= 2".into()),
        SeriesId::SquareMinus1 => {
            if k >= 3 {
                (true, "one shifted row and column fit for k >= 3".into())
            } else {
                (false, "needs k >= 3 to insert a shifted row and column".into())
            }
        }
        SeriesId::SquareMinus2 => {
            if k >= 5 {
                (true, "two non-adjacent shifted rows and columns fit for k >= 5".into())
            } else {
                (false, "needs k >= 5 for two non-adjacent shifted rows/columns".into())
            }
        }
        SeriesId::SquareMinus3 => {
            if k >= 5 {
                (true, "pattern fully developed for k >= 5".into())
            } else {
                (false, "pattern only fully developed from k = 5 on".into())
            }
        }
        SeriesId::Oblong | SeriesId::OblongAlt => {
            let ca = oblong_alpha(k).cos();
            let lim = 3.0_f64.sqrt() / 2.0;
            if ca >= lim {
                (true, format!("cos alpha = {ca:.6} >= sqrt(3)/2"))
            } else {
                (false, format!("cos alpha = {ca:.6} < sqrt(3)/2: same-column disks would overlap"))
            }
        }
        SeriesId::HalfK => {
            let sa = halfk_alpha(k).sin();
            if sa >= 0.5 {
                (true, format!("sin alpha = {sa:.6} >= 1/2"))
            } else {
                (false, format!("sin alpha = {sa:.6} < 1/2: same-column disks overlap"))
            }
        }
    }
}

/// Closed-form diameter of a series member.
///
/// Errors with `UnsupportedSeries` for `SquareMinus3`, whose `m` is defined
/// only by the tightening simulation.
pub fn m_pattern(series: SeriesId, k: u32) -> Result<SeriesFormula, PatternError> {
    if series == SeriesId::SquareMinus3 {
        return Err(PatternError::UnsupportedSeries(series));
    }
    let (exists, reason) = exists_pattern(series, k);
    let kf = k as f64;
    let (m, angle) = if k < 2 {
        (None, None)
    } else {
        match series {
            SeriesId::Square => (Some(1.0 / (kf - 1.0)), None),
            SeriesId::SquareMinus1 => (Some(1.0 / (kf - 3.0 + 2.0 * cos15())), None),
            SeriesId::SquareMinus2 => (Some(1.0 / (kf - 5.0 + 4.0 * cos15())), None),
            SeriesId::Oblong => {
                let a = oblong_alpha(k);
                (Some(1.0 / (kf * a.cos())), Some(a))
            }
            SeriesId::OblongAlt => match oblong_alt_beta(k) {
                Some(b) => {
                    let side = kf * b.cos() + (b + std::f64::consts::FRAC_PI_3).cos();
                    (Some(1.0 / side), Some(b))
                }
                None => (None, None),
            },
            SeriesId::HalfK => {
                let a = halfk_alpha(k);
                (Some(1.0 / (kf * a.cos())), Some(a))
            }
            SeriesId::SquareMinus3 => unreachable!(),
        }
    };
    Ok(SeriesFormula { series, k, m, angle, exists, reason })
}

/// All admissible variants of the series that have placement freedom.
pub fn enumerate_variants(series: SeriesId, k: u32) -> Result<Vec<PatternVariant>, PatternError> {
    match series {
        SeriesId::SquareMinus1 => {
            let mut out = Vec::new();
            for i in 2..=k.saturating_sub(1) {
                for j in 2..=k - 1 {
                    out.push(PatternVariant::single(i, j));
                }
            }
            Ok(out)
        }
        SeriesId::SquareMinus2 => {
            // Shifted lines may not be adjacent: i2 >= i1 + 2, which gives
            // the (k-3)(k-4)/2 placements per axis.
            let mut axis = Vec::new();
            for i1 in 2..=k.saturating_sub(1) {
                for i2 in (i1 + 2)..=k - 1 {
                    axis.push((i1, i2));
                }
            }
            let mut out = Vec::new();
            for &(i1, i2) in &axis {
                for &(j1, j2) in &axis {
                    out.push(PatternVariant::double(i1, i2, j1, j2));
                }
            }
            Ok(out)
        }
        _ => Err(PatternError::UnsupportedSeries(series)),
    }
}

/// The canonical variant used when none is supplied: smallest admissible
/// indices.
pub fn canonical_variant(series: SeriesId, k: u32) -> PatternVariant {
    match series {
        SeriesId::SquareMinus1 if k >= 3 => PatternVariant::single(2, 2),
        SeriesId::SquareMinus2 if k >= 5 => PatternVariant::double(2, 4, 2, 4),
        _ => PatternVariant::none(),
    }
}

fn check_variant(series: SeriesId, k: u32, variant: &PatternVariant) -> Result<(), PatternError> {
    let bad = |detail: String| Err(PatternError::InvalidVariant { series, k, detail });
    match series {
        SeriesId::SquareMinus1 => {
            if variant.rows.len() != 1 || variant.cols.len() != 1 {
                return bad("expected one row index and one column index".into());
            }
            let (i, j) = (variant.rows[0], variant.cols[0]);
            if !(2..=k - 1).contains(&i) || !(2..=k - 1).contains(&j) {
                return bad(format!("indices ({i},{j}) outside 2..={}", k - 1));
            }
            Ok(())
        }
        SeriesId::SquareMinus2 => {
            if variant.rows.len() != 2 || variant.cols.len() != 2 {
                return bad("expected two row indices and two column indices".into());
            }
            for pair in [&variant.rows, &variant.cols] {
                let (a, b) = (pair[0], pair[1]);
                if !(2..=k - 1).contains(&a) || !(2..=k - 1).contains(&b) {
                    return bad(format!("indices ({a},{b}) outside 2..={}", k - 1));
                }
                if b < a + 2 {
                    return bad(format!("shifted lines {a} and {b} must not be adjacent"));
                }
            }
            Ok(())
        }
        _ => {
            if variant.is_none() {
                Ok(())
            } else {
                bad("series has no placement choices; pass no variant".into())
            }
        }
    }
}

fn require_exists(series: SeriesId, k: u32) -> Result<(), PatternError> {
    let (ok, reason) = exists_pattern(series, k);
    if ok {
        Ok(())
    } else {
        Err(PatternError::PatternNotRepresentable { series, k, reason })
    }
}

/// Builds the pattern packing of a series member.
///
/// The realized `m` agrees with [`m_pattern`] to 1e-13 and the packing
/// carries the series' canonical contact structure.
pub fn build_pattern(
    series: SeriesId,
    k: u32,
    variant: Option<&PatternVariant>,
) -> Result<Packing, PatternError> {
    require_exists(series, k)?;
    let canonical = canonical_variant(series, k);
    let variant = variant.unwrap_or(&canonical);
    check_variant(series, k, variant)?;
    let (centers, m) = match series {
        SeriesId::Square => square_centers(k),
        SeriesId::Oblong => oblong_centers(k),
        SeriesId::OblongAlt => oblong_alt_centers(k),
        SeriesId::HalfK => halfk_centers(k),
        SeriesId::SquareMinus1 => square_minus1_centers(k, variant),
        SeriesId::SquareMinus2 => {
            return build_square_minus2(k, variant);
        }
        SeriesId::SquareMinus3 => {
            return Err(PatternError::UnsupportedSeries(series));
        }
    };
    let provenance = Provenance::Pattern { series, k, variant: variant.clone() };
    Ok(Packing::new(m, centers, provenance)?)
}

fn square_centers(k: u32) -> (Vec<Point>, f64) {
    let m = 1.0 / (k as f64 - 1.0);
    let mut centers = Vec::with_capacity((k * k) as usize);
    for b in 0..k {
        for a in 0..k {
            centers.push(Point::new(a as f64 * m, b as f64 * m));
        }
    }
    (centers, m)
}

fn oblong_centers(k: u32) -> (Vec<Point>, f64) {
    let a = oblong_alpha(k);
    let m = 1.0 / (k as f64 * a.cos());
    let (dx, dy) = (m * a.cos(), m * a.sin());
    let mut centers = Vec::new();
    for col in 0..=k {
        let off = if col % 2 == 1 { dy } else { 0.0 };
        for row in 0..k {
            centers.push(Point::new(col as f64 * dx, off + row as f64 * m));
        }
    }
    (centers, m)
}

fn halfk_centers(k: u32) -> (Vec<Point>, f64) {
    let a = halfk_alpha(k);
    let m = 1.0 / (k as f64 * a.cos());
    let (dx, dy) = (m * a.cos(), m * a.sin());
    let mut centers = Vec::new();
    for col in 0..=k {
        if col % 2 == 0 {
            for row in 0..k {
                centers.push(Point::new(col as f64 * dx, row as f64 * 2.0 * dy));
            }
        } else {
            for row in 0..k - 1 {
                centers.push(Point::new(col as f64 * dx, dy + row as f64 * 2.0 * dy));
            }
        }
    }
    (centers, m)
}

/// The ideal half-k geometry regardless of existence, with overlaps allowed;
/// the basis of the overlap measurement for k >= 8.
pub fn build_halfk_ideal(k: u32) -> Result<Configuration, PatternError> {
    if k < 2 {
        return Err(PatternError::PatternNotRepresentable {
            series: SeriesId::HalfK,
            k,
            reason: "k must be at least 2".into(),
        });
    }
    let (centers, m) = halfk_centers(k);
    Ok(Configuration { centers, diameter: m, overlap_allowed: true })
}

/// Maximum pairwise overlap of the ideal half-k geometry as a fraction of
/// the disk diameter, clamped at zero. Zero for the existing members k <= 7,
/// strictly positive and increasing from k = 8 on.
pub fn halfk_overlap(k: u32) -> Result<f64, PatternError> {
    let cfg = build_halfk_ideal(k)?;
    let mut worst: f64 = 0.0;
    for i in 0..cfg.centers.len() {
        for j in (i + 1)..cfg.centers.len() {
            let d = cfg.centers[i].dist(cfg.centers[j]);
            worst = worst.max((cfg.diameter - d) / cfg.diameter);
        }
    }
    Ok(worst.max(0.0))
}

fn oblong_alt_centers(k: u32) -> (Vec<Point>, f64) {
    let b = oblong_alt_beta(k).expect("existence checked before building");
    let kf = k as f64;
    let side = kf * b.cos() + (b + std::f64::consts::FRAC_PI_3).cos();
    let m = 1.0 / side;
    // Zigzag rows of k+1 disks; k rows stacked with alternating lateral lean.
    let (ux, uy) = (m * b.cos(), m * b.sin());
    let w = b + std::f64::consts::FRAC_PI_3;
    let (wx, wy) = (m * w.cos(), m * w.sin());
    let mut centers = Vec::new();
    for row in 0..k {
        let bx = if row % 2 == 1 { wx } else { 0.0 };
        let by = row as f64 * wy;
        for j in 0..=k {
            let zig = if j % 2 == 1 { uy } else { 0.0 };
            centers.push(Point::new(bx + j as f64 * ux, by + zig));
        }
    }
    (centers, m)
}

/// SquareMinus1 geometry: a (k-1)x(k-1) straight grid with one widened gap
/// per axis; the shifted row/column nests in the widened gap at the 15°
/// contact angle, its two sub-chains offset toward the crossing where they
/// pin against the other shifted line.
fn square_minus1_centers(k: u32, variant: &PatternVariant) -> (Vec<Point>, f64) {
    let m = 1.0 / (k as f64 - 3.0 + 2.0 * cos15());
    let (c15, s15) = (m * cos15(), m * sin15());
    // Paper indices count row objects from the top and column objects from
    // the left; convert to the gap index on the bottom-left origin frame.
    let gap_i = (k - 1 - variant.rows[0]) as usize;
    let gap_j = (variant.cols[0] - 2) as usize;

    let axis = |gap: usize| -> Vec<f64> {
        let mut xs = vec![0.0];
        for a in 0..(k - 2) as usize {
            let step = if a == gap { 2.0 * c15 } else { m };
            xs.push(xs[a] + step);
        }
        xs
    };
    let xs = axis(gap_j);
    let ys = axis(gap_i);

    let mut centers = Vec::new();
    for y in &ys {
        for x in &xs {
            centers.push(Point::new(*x, *y));
        }
    }
    // Shifted row: one disk per straight column, nested above row gap_i.
    for (a, x) in xs.iter().enumerate() {
        let sign = if a <= gap_j { 1.0 } else { -1.0 };
        centers.push(Point::new(x + sign * s15, ys[gap_i] + c15));
    }
    // Shifted column: one disk per straight row.
    for (b, y) in ys.iter().enumerate() {
        let sign = if b <= gap_i { 1.0 } else { -1.0 };
        centers.push(Point::new(xs[gap_j] + c15, y + sign * s15));
    }
    (centers, m)
}

/// A loosened starting configuration for the tighten pipeline: the pattern
/// geometry with the diameter scaled down by `slack`.
pub fn build_schematic(
    series: SeriesId,
    k: u32,
    variant: Option<&PatternVariant>,
    slack: f64,
) -> Result<Configuration, PatternError> {
    require_exists(series, k)?;
    let canonical = canonical_variant(series, k);
    let variant = variant.unwrap_or(&canonical);
    check_variant(series, k, variant)?;
    let (centers, m) = match series {
        SeriesId::Square => square_centers(k),
        SeriesId::Oblong => oblong_centers(k),
        SeriesId::OblongAlt => oblong_alt_centers(k),
        SeriesId::HalfK => halfk_centers(k),
        SeriesId::SquareMinus1 => square_minus1_centers(k, variant),
        SeriesId::SquareMinus2 => square_minus2_schematic(k, variant),
        SeriesId::SquareMinus3 => {
            return Err(PatternError::UnsupportedSeries(series));
        }
    };
    Ok(Configuration::new(centers, m * (1.0 - slack), false)?)
}

/// SquareMinus2 schematic: straight (k-2)^2 grid with two widened gaps per
/// axis, four shifted chains nested at 15°, and two extra disks parked in
/// the crossing cells that the chains leave open.
fn square_minus2_schematic(k: u32, variant: &PatternVariant) -> (Vec<Point>, f64) {
    let m = 1.0 / (k as f64 - 5.0 + 4.0 * cos15());
    let (c15, s15) = (m * cos15(), m * sin15());
    let gaps_of = |idx: &[u32], from_top: bool| -> Vec<usize> {
        let mut gaps: Vec<usize> = idx
            .iter()
            .map(|&i| if from_top { (k - 1 - i) as usize - 1 } else { (i - 2) as usize })
            .collect();
        gaps.sort_unstable();
        gaps
    };
    // Row objects are counted from the top, columns from the left, as for
    // SquareMinus1; with two inserted lines the straight grid is (k-2) wide.
    let gi = gaps_of(&variant.rows, true);
    let gj = gaps_of(&variant.cols, false);

    let axis = |gaps: &[usize]| -> Vec<f64> {
        let mut xs = vec![0.0];
        for a in 0..(k - 3) as usize {
            let step = if gaps.contains(&a) { 2.0 * c15 } else { m };
            xs.push(xs[a] + step);
        }
        xs
    };
    let xs = axis(&gj);
    let ys = axis(&gi);

    let mut centers = Vec::new();
    for y in &ys {
        for x in &xs {
            centers.push(Point::new(*x, *y));
        }
    }
    // Chain sign pattern: toward the first crossing, away after it.
    let sign_for = |a: usize, gaps: &[usize]| -> f64 {
        if a <= gaps[0] {
            1.0
        } else {
            -1.0
        }
    };
    for &gy in &gi {
        for (a, x) in xs.iter().enumerate() {
            centers.push(Point::new(x + sign_for(a, &gj) * s15, ys[gy] + c15));
        }
    }
    for &gx in &gj {
        for (b, y) in ys.iter().enumerate() {
            centers.push(Point::new(xs[gx] + c15, y + sign_for(b, &gi) * s15));
        }
    }
    // Two extra disks at the anti-diagonal crossing cells.
    centers.push(Point::new(xs[gj[1]] + c15, ys[gi[0]] + c15));
    centers.push(Point::new(xs[gj[0]] + c15, ys[gi[1]] + c15));
    (centers, m)
}

fn sm2_cache() -> &'static Mutex<HashMap<(u32, PatternVariant), Packing>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, PatternVariant), Packing>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Fixed seed of the deterministic tighten step inside the SquareMinus2
/// builder. The result is a pure function of (k, variant).
const SM2_BUILD_SEED: u64 = 0x5153_4d32;

fn build_square_minus2(k: u32, variant: &PatternVariant) -> Result<Packing, PatternError> {
    if let Some(hit) = sm2_cache().lock().unwrap().get(&(k, variant.clone())) {
        return Ok(hit.clone());
    }
    let formula = m_pattern(SeriesId::SquareMinus2, k)?;
    let target = formula.m.expect("closed form defined for k >= 2");
    let schematic = build_schematic(SeriesId::SquareMinus2, k, Some(variant), 0.02)?;
    let params = SimParams { growth_rate: 2e-4, ..SimParams::default() };
    let result = billiards::tighten(&schematic, &params, SM2_BUILD_SEED).map_err(|e| {
        PatternError::Construction {
            series: SeriesId::SquareMinus2,
            k,
            detail: format!("tighten failed: {e}"),
        }
    })?;
    let graph = analysis::contact_graph(&result.packing, 1e-7 * result.packing.m());
    let polished = billiards::polish(&result.packing, &graph).map_err(|e| {
        PatternError::Construction {
            series: SeriesId::SquareMinus2,
            k,
            detail: format!("polish failed: {e}"),
        }
    })?;
    if (polished.m() - target).abs() > 1e-13 {
        return Err(PatternError::Construction {
            series: SeriesId::SquareMinus2,
            k,
            detail: format!(
                "tightened m = {} does not reproduce the closed form {}",
                polished.m(),
                target
            ),
        });
    }
    let packing = Packing::new(
        polished.m(),
        polished.centers().to_vec(),
        Provenance::Pattern { series: SeriesId::SquareMinus2, k, variant: variant.clone() },
    )?;
    sm2_cache().lock().unwrap().insert((k, variant.clone()), packing.clone());
    Ok(packing)
}

/// The schematic configuration C of the k²−3 series: a straight (k−3)²
/// block in the bottom-left corner, three alternating columns on the right
/// and three alternating rows on top whose chains are compressed into
/// mutual contact, with one loose disk in the top-right corner pocket.
///
/// The outermost row and column chains do not touch each other at the
/// corner; that cut is what lets the band expand under tightening.
pub fn build_config_c(k: u32) -> Result<Configuration, PatternError> {
    if k < 4 {
        return Err(PatternError::PatternNotRepresentable {
            series: SeriesId::SquareMinus3,
            k,
            reason: "the k^2-3 configuration needs k >= 4".into(),
        });
    }
    let kf = k as f64;
    // Work in units of one disk diameter; the tighten step rescales.
    let g = kf - 4.0; // grid span (k-3 disks per side)
    let h = 3.0_f64.sqrt() / 2.0;
    let mut centers = Vec::new();
    for b in 0..k - 3 {
        for a in 0..k - 3 {
            centers.push(Point::new(a as f64, b as f64));
        }
    }
    // Three columns on the right: chains of k-2 disks anchored at the
    // bottom, nested against the grid and each other at 60°.
    for c in 0..3u32 {
        let x = g + (c + 1) as f64 * h;
        let y0 = if c % 2 == 0 { 0.5 } else { 0.0 };
        for j in 0..k - 2 {
            centers.push(Point::new(x, y0 + j as f64));
        }
    }
    // Three rows on top, anchored at the left.
    for r in 0..3u32 {
        let y = g + (r + 1) as f64 * h;
        let x0 = if r % 2 == 0 { 0.5 } else { 0.0 };
        for j in 0..k - 2 {
            centers.push(Point::new(x0 + j as f64, y));
        }
    }
    // Loose disk in the top-right pocket.
    centers.push(Point::new(g + 3.0 * h, g + 3.0 * h));
    Configuration::new(centers, 1.0, false).map_err(|e| PatternError::Construction {
        series: SeriesId::SquareMinus3,
        k,
        detail: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values_match_paper() {
        let m = m_pattern(SeriesId::Square, 7).unwrap().m.unwrap();
        assert_eq!(m, 1.0 / 6.0);
        let m = m_pattern(SeriesId::SquareMinus1, 7).unwrap().m.unwrap();
        assert!((m - 0.168581424).abs() < 5e-10);
        let m = m_pattern(SeriesId::SquareMinus2, 7).unwrap().m.unwrap();
        assert!((m - 0.1705406887).abs() < 5e-11);
    }

    #[test]
    fn halfk_small_k_exact() {
        // k = 3 is the 3-4-5 triangle: cos α = 4/5, m = 5/12.
        let f = m_pattern(SeriesId::HalfK, 3).unwrap();
        assert!((f.m.unwrap() - 5.0 / 12.0).abs() < 1e-15);
        let f = m_pattern(SeriesId::HalfK, 2).unwrap();
        assert!((f.m.unwrap() - 1.0 / 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn oblong_k5_closed_form() {
        let f = m_pattern(SeriesId::Oblong, 5).unwrap();
        let expect_cos = (20.0 + 10.0_f64.sqrt()) / 26.0;
        assert!((f.angle.unwrap().cos() - expect_cos).abs() < 1e-15);
        assert!((f.m.unwrap() - 1.0 / (5.0 * expect_cos)).abs() < 1e-15);
    }

    #[test]
    fn existence_boundaries() {
        assert!(!exists_pattern(SeriesId::Oblong, 3).0);
        assert!(exists_pattern(SeriesId::Oblong, 4).0);
        for k in 2..=7 {
            assert!(exists_pattern(SeriesId::HalfK, k).0, "k={k}");
        }
        assert!(!exists_pattern(SeriesId::HalfK, 8).0);
        // sin alpha at k = 8 is 8/sqrt(260), just below 1/2.
        let sa = halfk_alpha(8).sin();
        assert!((sa - 8.0 / 260.0_f64.sqrt()).abs() < 1e-15);
        assert!(sa < 0.5);
    }

    #[test]
    fn defining_equation_residuals() {
        for k in 4..=12 {
            let f = m_pattern(SeriesId::Oblong, k).unwrap();
            let a = f.angle.unwrap();
            let r = k as f64 * a.cos() - (k as f64 - 1.0 + a.sin());
            assert!(r.abs() < 1e-14, "oblong k={k} residual {r}");
        }
        for k in 2..=7 {
            let f = m_pattern(SeriesId::HalfK, k).unwrap();
            let a = f.angle.unwrap();
            let r = k as f64 * a.cos() - 2.0 * (k as f64 - 1.0) * a.sin();
            assert!(r.abs() < 1e-14, "halfk k={k} residual {r}");
        }
        for k in 4..=12 {
            let f = m_pattern(SeriesId::OblongAlt, k).unwrap();
            let b = f.angle.unwrap();
            let r = k as f64 * b.cos() + (b + std::f64::consts::FRAC_PI_3).cos()
                - (k as f64 - 1.0) * (b + std::f64::consts::FRAC_PI_3).sin()
                - b.sin();
            assert!(r.abs() < 1e-13, "oblong-alt k={k} residual {r}");
        }
    }

    #[test]
    fn m_decreases_with_k() {
        for series in [
            SeriesId::Square,
            SeriesId::SquareMinus1,
            SeriesId::SquareMinus2,
            SeriesId::Oblong,
            SeriesId::OblongAlt,
            SeriesId::HalfK,
        ] {
            let mut last = f64::INFINITY;
            for k in 2..=12 {
                if let Some(m) = m_pattern(series, k).unwrap().m {
                    assert!(m < last, "{series} k={k}: m {m} not below {last}");
                    last = m;
                }
            }
        }
    }

    #[test]
    fn analytic_builders_reproduce_m() {
        for (series, kmin) in [
            (SeriesId::Square, 2),
            (SeriesId::SquareMinus1, 3),
            (SeriesId::Oblong, 4),
            (SeriesId::OblongAlt, 4),
            (SeriesId::HalfK, 2),
        ] {
            for k in kmin..=12 {
                if !exists_pattern(series, k).0 {
                    continue;
                }
                let p = build_pattern(series, k, None).unwrap();
                let target = m_pattern(series, k).unwrap().m.unwrap();
                assert_eq!(p.n() as u32, series.n_for_k(k));
                assert!(
                    (p.m() - target).abs() < 1e-13,
                    "{series} k={k}: built {} vs formula {}",
                    p.m(),
                    target
                );
                let (sx, sy) = p.span();
                assert!((sx - 1.0).abs() < 1e-12 && (sy - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn square_minus1_variants_share_m() {
        let mut ms = Vec::new();
        for v in enumerate_variants(SeriesId::SquareMinus1, 5).unwrap() {
            let p = build_pattern(SeriesId::SquareMinus1, 5, Some(&v)).unwrap();
            ms.push(p.m());
        }
        assert_eq!(ms.len(), 9);
        for m in &ms {
            assert!((m - ms[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn variant_counts() {
        assert_eq!(enumerate_variants(SeriesId::SquareMinus1, 5).unwrap().len(), 9);
        assert_eq!(enumerate_variants(SeriesId::SquareMinus1, 3).unwrap().len(), 1);
        assert_eq!(enumerate_variants(SeriesId::SquareMinus2, 6).unwrap().len(), 9);
        assert_eq!(enumerate_variants(SeriesId::SquareMinus2, 5).unwrap().len(), 1);
        for k in [7u32, 9] {
            let per_axis = ((k - 3) * (k - 4) / 2) as usize;
            assert_eq!(
                enumerate_variants(SeriesId::SquareMinus2, k).unwrap().len(),
                per_axis * per_axis
            );
        }
        assert!(matches!(
            enumerate_variants(SeriesId::Square, 4),
            Err(PatternError::UnsupportedSeries(_))
        ));
    }

    #[test]
    fn invalid_variants_rejected() {
        let v = PatternVariant::single(1, 2);
        assert!(matches!(
            build_pattern(SeriesId::SquareMinus1, 5, Some(&v)),
            Err(PatternError::InvalidVariant { .. })
        ));
        let v = PatternVariant::double(2, 3, 2, 4);
        assert!(matches!(
            build_pattern(SeriesId::SquareMinus2, 6, Some(&v)),
            Err(PatternError::InvalidVariant { .. })
        ));
    }

    #[test]
    fn nonexistent_patterns_rejected() {
        assert!(matches!(
            build_pattern(SeriesId::HalfK, 8, None),
            Err(PatternError::PatternNotRepresentable { .. })
        ));
        assert!(matches!(
            build_pattern(SeriesId::Oblong, 3, None),
            Err(PatternError::PatternNotRepresentable { .. })
        ));
        assert!(matches!(
            m_pattern(SeriesId::SquareMinus3, 6),
            Err(PatternError::UnsupportedSeries(_))
        ));
    }

    #[test]
    fn halfk_overlap_profile() {
        assert_eq!(halfk_overlap(7).unwrap(), 0.0);
        let o8 = halfk_overlap(8).unwrap();
        assert!(o8 > 0.0 && o8 < 0.01, "overlap at k=8: {o8}");
        // Equals 1 - 2 sin alpha for the infeasible range.
        assert!((o8 - (1.0 - 2.0 * halfk_alpha(8).sin())).abs() < 1e-14);
        let o20 = halfk_overlap(20).unwrap();
        assert!(o20 > o8);
    }

    #[test]
    fn config_c_counts() {
        for k in 4..=9 {
            let c = build_config_c(k).unwrap();
            assert_eq!(c.n() as u32, k * k - 3, "k={k}");
            let (_, _, d) = c.worst_pair().map(|(i, j, d)| (i, j, d)).unwrap();
            assert!(d >= c.diameter * (1.0 - 1e-12), "k={k} min dist {d}");
        }
        assert!(build_config_c(3).is_err());
    }
}
