use super::{cross, Point, RegionPolygon};
use crate::error::{Error, Result};

/// Convex hull by Andrew's monotone chain.
///
/// Vertices are returned with positive orientation (`cross >= 0` for every
/// consecutive triple) and without collinear or repeated vertices.
pub fn convex_hull(points: &[Point]) -> Result<RegionPolygon> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("non-finite point".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateRegion(format!(
            "{} distinct points cannot bound a region",
            pts.len()
        )));
    }

    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower_len = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();

    if hull.len() < 3 {
        return Err(Error::DegenerateRegion("all points are collinear".into()));
    }
    Ok(RegionPolygon { vertices: hull })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(4.0, 4.0),
            Point::new(0.0, 4.0),
        ]
    }

    #[test]
    fn square_with_center() {
        let mut pts = square();
        pts.push(Point::new(2.0, 2.0));
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 4);
        for v in square() {
            assert!(hull.vertices.contains(&v));
        }
    }

    #[test]
    fn hull_of_convex_set_is_itself() {
        let hull = convex_hull(&square()).unwrap();
        assert_eq!(hull.vertices.len(), 4);
        assert!(hull.signed_area() > 0.0);
    }

    #[test]
    fn drops_collinear_edge_points() {
        let mut pts = square();
        pts.push(Point::new(2.0, 0.0));
        pts.push(Point::new(4.0, 1.0));
        assert_eq!(convex_hull(&pts).unwrap().vertices.len(), 4);
    }

    #[test]
    fn collinear_input_is_degenerate() {
        let pts: Vec<_> = (0..5).map(|i| Point::new(i as f64, 3.0 * i as f64)).collect();
        assert!(matches!(convex_hull(&pts), Err(Error::DegenerateRegion(_))));
        assert!(convex_hull(&pts[..2]).is_err());
    }
}
