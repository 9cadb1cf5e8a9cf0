//! Shared domain types: the centers-square convention, packings,
//! series identifiers and pattern variants.
//!
//! Every packing is stored in the *centers-square* frame: the smallest
//! axis-aligned square containing the disk centers is mapped to the unit
//! square, and `m` is the disk diameter measured in that unit. The physical
//! container is then the square `[-m/2, 1 + m/2]^2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Relative overlap tolerance: a packing is valid when every pairwise
/// center distance is at least `m * (1 - OVERLAP_REL_TOL)`.
pub const OVERLAP_REL_TOL: f64 = 1e-12;

/// Tolerance on the centers-square span: `max(span_x, span_y)` must equal 1.
pub const SPAN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Error)]
pub enum CoreError {
    /// Fewer than two centers, or all centers coincident: the
    /// centers-square degenerates and `m` is undefined.
    #[error("degenerate input: need at least two distinct disk centers")]
    DegenerateInput,
    #[error("invalid packing: {0}")]
    InvalidPacking(String),
}

/// A side of the physical square container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wall {
    Left,
    Right,
    Bottom,
    Top,
}

impl Wall {
    pub const ALL: [Wall; 4] = [Wall::Left, Wall::Right, Wall::Bottom, Wall::Top];

    pub fn as_str(self) -> &'static str {
        match self {
            Wall::Left => "left",
            Wall::Right => "right",
            Wall::Bottom => "bottom",
            Wall::Top => "top",
        }
    }

    pub fn parse(s: &str) -> Option<Wall> {
        Wall::ALL.iter().copied().find(|w| w.as_str() == s)
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One of the repeated pattern families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesId {
    /// `n = k^2`, the straight grid.
    Square,
    /// `n = k^2 - 1`: grid with one shifted row and one shifted column.
    SquareMinus1,
    /// `n = k^2 - 2`: grid with two shifted rows and two shifted columns.
    SquareMinus2,
    /// `n = k^2 - 3`: grid block plus three alternating rows and columns,
    /// defined by tightening; no closed form.
    SquareMinus3,
    /// `n = k(k+1)`: k+1 alternating columns of k disks.
    Oblong,
    /// Alternative `n = k(k+1)` pattern (zigzag rows, one rattler).
    OblongAlt,
    /// `n = k^2 + floor(k/2)`: alternating columns of k and k-1 disks.
    HalfK,
}

impl SeriesId {
    pub const ALL: [SeriesId; 7] = [
        SeriesId::Square,
        SeriesId::SquareMinus1,
        SeriesId::SquareMinus2,
        SeriesId::SquareMinus3,
        SeriesId::Oblong,
        SeriesId::OblongAlt,
        SeriesId::HalfK,
    ];

    /// Number of disks of the series member with index `k`.
    pub fn n_for_k(self, k: u32) -> u32 {
        match self {
            SeriesId::Square => k * k,
            SeriesId::SquareMinus1 => k * k - 1,
            SeriesId::SquareMinus2 => k * k - 2,
            SeriesId::SquareMinus3 => k * k - 3,
            SeriesId::Oblong | SeriesId::OblongAlt => k * (k + 1),
            SeriesId::HalfK => k * k + k / 2,
        }
    }

    /// Inverse of [`n_for_k`](Self::n_for_k): the `k` whose member has
    /// exactly `n` disks, if any.
    pub fn k_for_n(self, n: u32) -> Option<u32> {
        let mut k = 1u32;
        while self.n_for_k(k) < n {
            k += 1;
        }
        (self.n_for_k(k) == n && k >= 2).then_some(k)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SeriesId::Square => "square",
            SeriesId::SquareMinus1 => "square-minus-1",
            SeriesId::SquareMinus2 => "square-minus-2",
            SeriesId::SquareMinus3 => "square-minus-3",
            SeriesId::Oblong => "oblong",
            SeriesId::OblongAlt => "oblong-alt",
            SeriesId::HalfK => "half-k",
        }
    }

    pub fn parse(s: &str) -> Option<SeriesId> {
        SeriesId::ALL.iter().copied().find(|id| id.as_str() == s)
    }
}

impl fmt::Display for SeriesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Placement indices of the shifted rows/columns of a pattern.
///
/// Row and column indices follow the paper's counting: the shifted row is
/// the `i`-th row object from the top and the shifted column the `j`-th
/// from the left, `2 <= i, j <= k-1`. Series without placement freedom use
/// the empty variant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PatternVariant {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
}

impl PatternVariant {
    pub fn none() -> Self {
        PatternVariant::default()
    }

    pub fn single(i: u32, j: u32) -> Self {
        PatternVariant { rows: vec![i], cols: vec![j] }
    }

    pub fn double(i1: u32, i2: u32, j1: u32, j2: u32) -> Self {
        PatternVariant { rows: vec![i1, i2], cols: vec![j1, j2] }
    }

    pub fn is_none(&self) -> bool {
        self.rows.is_empty() && self.cols.is_empty()
    }
}

impl fmt::Display for PatternVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_none() {
            return f.write_str("-");
        }
        let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "({};{})", join(&self.rows), join(&self.cols))
    }
}

/// Where a packing came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Pattern { series: SeriesId, k: u32, variant: PatternVariant },
    Simulated { seed: u64, params_digest: String },
    Loaded { file: String },
}

/// A packing of `n` equal disks, normalized to the centers-square frame.
#[derive(Debug, Clone)]
pub struct Packing {
    m: f64,
    centers: Vec<Point>,
    provenance: Provenance,
}

impl Packing {
    /// Builds a packing after checking the frame invariants: coordinates in
    /// `[0,1]`, span normalized, and no pair closer than `m (1 - 1e-12)`.
    pub fn new(m: f64, centers: Vec<Point>, provenance: Provenance) -> Result<Self, CoreError> {
        if centers.len() < 2 {
            return Err(CoreError::DegenerateInput);
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(CoreError::InvalidPacking(format!("non-positive diameter m = {m}")));
        }
        let bound_tol = SPAN_TOL;
        for (i, c) in centers.iter().enumerate() {
            if !(c.x >= -bound_tol && c.x <= 1.0 + bound_tol && c.y >= -bound_tol && c.y <= 1.0 + bound_tol) {
                return Err(CoreError::InvalidPacking(format!(
                    "center {i} at {c:?} outside the centers square"
                )));
            }
        }
        let (sx, sy) = span_of(&centers);
        if (sx.max(sy) - 1.0).abs() > SPAN_TOL {
            return Err(CoreError::InvalidPacking(format!(
                "centers-square span {} not normalized to 1",
                sx.max(sy)
            )));
        }
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                let d = centers[i].dist(centers[j]);
                if d < m * (1.0 - OVERLAP_REL_TOL) {
                    return Err(CoreError::InvalidPacking(format!(
                        "disks {i} and {j} overlap: distance {d} < m = {m}"
                    )));
                }
            }
        }
        Ok(Packing { m, centers, provenance })
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn span(&self) -> (f64, f64) {
        span_of(&self.centers)
    }
}

/// A raw disk configuration: unnormalized frame, uniform diameter that may
/// be zero, no jamming assumed. Used as simulation input.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub centers: Vec<Point>,
    pub diameter: f64,
    pub overlap_allowed: bool,
}

impl Configuration {
    pub fn new(centers: Vec<Point>, diameter: f64, overlap_allowed: bool) -> Result<Self, CoreError> {
        if centers.len() < 2 {
            return Err(CoreError::DegenerateInput);
        }
        if !(diameter.is_finite() && diameter >= 0.0) {
            return Err(CoreError::InvalidPacking(format!("bad diameter {diameter}")));
        }
        let cfg = Configuration { centers, diameter, overlap_allowed };
        if !cfg.overlap_allowed {
            if let Some((i, j, d)) = cfg.worst_pair() {
                if d < diameter * (1.0 - OVERLAP_REL_TOL) {
                    return Err(CoreError::InvalidPacking(format!(
                        "configuration disks {i} and {j} overlap: distance {d} < diameter {diameter}"
                    )));
                }
            }
        }
        Ok(cfg)
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    /// Closest pair `(i, j, distance)`.
    pub fn worst_pair(&self) -> Option<(usize, usize, f64)> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..self.centers.len() {
            for j in (i + 1)..self.centers.len() {
                let d = self.centers[i].dist(self.centers[j]);
                if worst.map_or(true, |(_, _, w)| d < w) {
                    worst = Some((i, j, d));
                }
            }
        }
        worst
    }
}

fn span_of(centers: &[Point]) -> (f64, f64) {
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in centers {
        min.x = min.x.min(c.x);
        min.y = min.y.min(c.y);
        max.x = max.x.max(c.x);
        max.y = max.y.max(c.y);
    }
    (max.x - min.x, max.y - min.y)
}

/// The similarity (translate + uniform scale, no rotation) that maps the
/// smallest axis-aligned enclosing square of a point set onto `[0,1]^2`.
///
/// The enclosing square is tight along the longer axis; along the shorter
/// axis the point set is centered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareFrame {
    pub origin: Point,
    pub scale: f64,
}

impl SquareFrame {
    pub fn apply(&self, p: Point) -> Point {
        (p - self.origin) * self.scale
    }

    /// Converts a length (e.g. a diameter) into centers-square units.
    pub fn apply_len(&self, len: f64) -> f64 {
        len * self.scale
    }
}

/// Computes the centers-square normalization transform for a point set.
pub fn normalize(centers: &[Point]) -> Result<SquareFrame, CoreError> {
    if centers.len() < 2 {
        return Err(CoreError::DegenerateInput);
    }
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in centers {
        if !c.x.is_finite() || !c.y.is_finite() {
            return Err(CoreError::InvalidPacking(format!("non-finite center {c:?}")));
        }
        min.x = min.x.min(c.x);
        min.y = min.y.min(c.y);
        max.x = max.x.max(c.x);
        max.y = max.y.max(c.y);
    }
    let span = Point::new(max.x - min.x, max.y - min.y);
    let side = span.x.max(span.y);
    if side <= 0.0 {
        return Err(CoreError::DegenerateInput);
    }
    // Center the slack of the shorter axis.
    let origin = Point::new(
        min.x - 0.5 * (side - span.x),
        min.y - 0.5 * (side - span.y),
    );
    Ok(SquareFrame { origin, scale: 1.0 / side })
}

/// Normalizes a point set into the centers-square frame.
pub fn normalize_points(centers: &[Point]) -> Result<(Vec<Point>, SquareFrame), CoreError> {
    let frame = normalize(centers)?;
    Ok((centers.iter().map(|&c| frame.apply(c)).collect(), frame))
}

/// All pairwise gaps `(i, j, distance - m)` of a packing, ordered by `(i, j)`.
pub fn pair_distances(p: &Packing) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(p.n() * (p.n() - 1) / 2);
    for i in 0..p.n() {
        for j in (i + 1)..p.n() {
            out.push((i, j, p.centers[i].dist(p.centers[j]) - p.m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_diagonal_pair() {
        let frame = normalize(&[Point::new(0.0, 0.0), Point::new(2.0, 2.0)]).unwrap();
        assert_eq!(frame.scale, 0.5);
        assert_eq!(frame.apply(Point::new(2.0, 2.0)), Point::new(1.0, 1.0));
        assert_eq!(frame.apply(Point::new(0.0, 0.0)), Point::new(0.0, 0.0));
    }

    #[test]
    fn normalize_identity_on_unit_corners() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
        ];
        let frame = normalize(&pts).unwrap();
        assert_eq!(frame.scale, 1.0);
        assert_eq!(frame.origin, Point::new(0.0, 0.0));
    }

    #[test]
    fn normalize_centers_short_axis() {
        // Points spanning 2 in x, 1 in y: y slack (half a unit) splits evenly.
        let pts = [Point::new(0.0, 0.0), Point::new(2.0, 1.0)];
        let (mapped, frame) = normalize_points(&pts).unwrap();
        assert_eq!(frame.scale, 0.5);
        assert!((mapped[0].y - 0.25).abs() < 1e-15);
        assert!((mapped[1].y - 0.75).abs() < 1e-15);
    }

    #[test]
    fn normalize_rejects_degenerate() {
        assert!(matches!(normalize(&[Point::new(1.0, 1.0)]), Err(CoreError::DegenerateInput)));
        assert!(matches!(
            normalize(&[Point::new(1.0, 1.0), Point::new(1.0, 1.0)]),
            Err(CoreError::DegenerateInput)
        ));
    }

    #[test]
    fn normalize_idempotent() {
        let pts = [
            Point::new(0.3, 1.9),
            Point::new(-2.0, 0.4),
            Point::new(1.1, -0.7),
            Point::new(0.0, 0.0),
        ];
        let (once, _) = normalize_points(&pts).unwrap();
        let (twice, frame2) = normalize_points(&once).unwrap();
        assert!((frame2.scale - 1.0).abs() < 1e-15);
        for (a, b) in once.iter().zip(&twice) {
            assert!((a.x - b.x).abs() < 1e-15 && (a.y - b.y).abs() < 1e-15);
        }
    }

    #[test]
    fn pair_distances_diagonal() {
        let p = Packing::new(
            1.0,
            vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)],
            Provenance::Loaded { file: "test".into() },
        )
        .unwrap();
        let gaps = pair_distances(&p);
        assert_eq!(gaps.len(), 1);
        assert!((gaps[0].2 - (2.0_f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn packing_rejects_overlap_and_bad_span() {
        let err = Packing::new(
            1.0,
            vec![Point::new(0.0, 0.0), Point::new(0.5, 0.0), Point::new(1.0, 1.0)],
            Provenance::Loaded { file: "test".into() },
        );
        assert!(matches!(err, Err(CoreError::InvalidPacking(_))));
        let err = Packing::new(
            0.3,
            vec![Point::new(0.0, 0.0), Point::new(0.5, 0.5)],
            Provenance::Loaded { file: "test".into() },
        );
        assert!(matches!(err, Err(CoreError::InvalidPacking(_))));
    }

    #[test]
    fn packing_rejects_single_disk() {
        // n = 1 has a degenerate centers square; m would be undefined.
        assert!(matches!(
            Packing::new(1.0, vec![Point::new(0.5, 0.5)], Provenance::Loaded { file: "t".into() }),
            Err(CoreError::DegenerateInput)
        ));
    }

    #[test]
    fn series_n_round_trip() {
        for id in SeriesId::ALL {
            for k in 2..12 {
                let n = id.n_for_k(k);
                assert_eq!(id.k_for_n(n), Some(k), "{id} k={k} n={n}");
            }
            assert_eq!(SeriesId::parse(id.as_str()), Some(id));
        }
        assert_eq!(SeriesId::Square.k_for_n(10), None);
        assert_eq!(SeriesId::HalfK.n_for_k(5), 27);
        assert_eq!(SeriesId::SquareMinus3.n_for_k(9), 78);
    }
}
