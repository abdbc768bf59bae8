use serde::{Deserialize, Serialize};

use super::{cross, Point, Rect};

const EDGE_EPS: f64 = 1e-9;

/// Convex polygon with positively oriented vertices, as produced by
/// [`super::convex_hull`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPolygon {
    pub vertices: Vec<Point>,
}

impl RegionPolygon {
    pub fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        self.edges().map(|(a, b)| a.x * b.y - b.x * a.y).sum::<f64>() / 2.0
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        n >= 3
            && (0..n).all(|i| {
                cross(
                    &self.vertices[i],
                    &self.vertices[(i + 1) % n],
                    &self.vertices[(i + 2) % n],
                ) >= 0.0
            })
    }

    pub fn translate(&self, dx: f64, dy: f64) -> RegionPolygon {
        RegionPolygon {
            vertices: self
                .vertices
                .iter()
                .map(|p| Point::new(p.x + dx, p.y + dy))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxRelation {
    Inside,
    CrossesBorder,
    Outside,
}

fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    let len = a.dist(b);
    if len == 0.0 {
        return p.dist(a) <= EDGE_EPS;
    }
    (cross(a, b, p) / len).abs() <= EDGE_EPS
        && p.x >= a.x.min(b.x) - EDGE_EPS
        && p.x <= a.x.max(b.x) + EDGE_EPS
        && p.y >= a.y.min(b.y) - EDGE_EPS
        && p.y <= a.y.max(b.y) + EDGE_EPS
}

/// Crossing-number containment test; points on an edge count as inside.
pub fn point_in_polygon(p: &Point, poly: &RegionPolygon) -> bool {
    let mut inside = false;
    for (a, b) in poly.edges() {
        if on_segment(p, a, b) {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn segments_intersect(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(p1, q1, q2) || on_segment(p2, q1, q2) || on_segment(q1, p1, p2) || on_segment(q2, p1, p2)
}

/// Classify a box against a region: inside iff all four corners are inside,
/// outside iff the two shapes share no point, otherwise crossing the border.
pub fn box_polygon_relation(bbox: &Rect, poly: &RegionPolygon) -> BoxRelation {
    let corners = bbox.corners();
    let inside = corners.iter().filter(|c| point_in_polygon(c, poly)).count();
    if inside == 4 {
        return BoxRelation::Inside;
    }
    if inside > 0 {
        return BoxRelation::CrossesBorder;
    }
    let box_edges = (0..4).map(|i| (&corners[i], &corners[(i + 1) % 4]));
    for (a, b) in box_edges {
        if poly.edges().any(|(p, q)| segments_intersect(a, b, p, q)) {
            return BoxRelation::CrossesBorder;
        }
    }
    // A polygon lying wholly inside the box touches no box corner or edge.
    if poly.vertices.iter().any(|v| bbox.contains_point(v)) {
        return BoxRelation::CrossesBorder;
    }
    BoxRelation::Outside
}
