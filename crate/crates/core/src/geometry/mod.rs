//! Planar projective geometry: homographies, their estimation and refinement,
//! convex hulls and polygon containment tests.

mod dlt;
mod homography;
mod hull;
mod lm;
mod polygon;

use serde::{Deserialize, Serialize};

pub use dlt::{estimate_homography_ls, normalization_transform};
pub use homography::{inverse_transform_box, Homography};
pub use hull::convex_hull;
pub use lm::{refine_homography_lm, refine_homography_lm_report, LmReport, LmSettings};
pub use polygon::{box_polygon_relation, point_in_polygon, BoxRelation, RegionPolygon};

/// A point in image coordinates (pixel indices, y pointing down).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl From<(f64, f64)> for Point {
    fn from(v: (f64, f64)) -> Self {
        Point::new(v.0, v.1)
    }
}

/// z-component of (b - a) x (c - a). Positive when a, b, c turn
/// counterclockwise in a y-up frame.
pub fn cross(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Axis-aligned box `[x0, x1) x [y0, y1)` in pixel coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn center(&self) -> Point {
        Point::new((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.x0 < self.x1 && self.y0 < self.y1)
            || ![self.x0, self.y0, self.x1, self.y1].iter().all(|v| v.is_finite())
    }

    /// Corners in the order top-left, top-right, bottom-right, bottom-left.
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x0, self.y0),
            Point::new(self.x1, self.y0),
            Point::new(self.x1, self.y1),
            Point::new(self.x0, self.y1),
        ]
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let r = Rect::new(
            self.x0.max(other.x0),
            self.y0.max(other.y0),
            self.x1.min(other.x1),
            self.y1.min(other.y1),
        );
        (r.x0 < r.x1 && r.y0 < r.y1).then_some(r)
    }

    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.intersection(other).map_or(0.0, |r| r.area());
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }

    /// True when `other` lies inside `self` grown by `slack` on every side.
    pub fn contains_rect(&self, other: &Rect, slack: f64) -> bool {
        other.x0 >= self.x0 - slack
            && other.y0 >= self.y0 - slack
            && other.x1 <= self.x1 + slack
            && other.y1 <= self.y1 + slack
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rect {
        Rect::new(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)
    }

    /// Smallest box containing every point.
    pub fn bounding(points: &[Point]) -> Option<Rect> {
        let first = points.first()?;
        let mut r = Rect::new(first.x, first.y, first.x, first.y);
        for p in &points[1..] {
            r.x0 = r.x0.min(p.x);
            r.y0 = r.y0.min(p.y);
            r.x1 = r.x1.max(p.x);
            r.y1 = r.y1.max(p.y);
        }
        Some(r)
    }
}

impl From<[f64; 4]> for Rect {
    fn from(v: [f64; 4]) -> Self {
        Rect::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Rect> for [f64; 4] {
    fn from(r: Rect) -> Self {
        [r.x0, r.y0, r.x1, r.y1]
    }
}

/// A correspondence between a captured-image point and an electronic-page point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointPair {
    pub src: Point,
    pub dst: Point,
}

impl PointPair {
    pub fn new(src: Point, dst: Point) -> Self {
        PointPair { src, dst }
    }
}

/// Largest distance between where `a` and `b` send each of `points`.
pub fn transfer_error(a: &Homography, b: &Homography, points: &[Point]) -> f64 {
    points
        .iter()
        .map(|p| match (a.project(p), b.project(p)) {
            (Ok(pa), Ok(pb)) => pa.dist(&pb),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Sum of squared reprojection residuals `|dst - H(src)|^2`.
pub fn reprojection_cost(h: &Homography, pairs: &[PointPair]) -> f64 {
    pairs
        .iter()
        .map(|pp| match h.project(&pp.src) {
            Ok(q) => q.dist_sq(&pp.dst),
            Err(_) => f64::INFINITY,
        })
        .sum()
}

/// Root-mean-square reprojection error in pixels.
pub fn reprojection_rmse(h: &Homography, pairs: &[PointPair]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    (reprojection_cost(h, pairs) / pairs.len() as f64).sqrt()
}
