use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::{Point, Rect};
use crate::error::{Error, Result};
use crate::imaging::Quad;

const SINGULAR_EPS: f64 = 1e-12;

/// 3x3 projective transform acting on homogeneous column vectors `(x, y, 1)`.
///
/// Serialized as nine floats in row-major order.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Homography {
    pub m: [[f64; 3]; 3],
}

impl Homography {
    pub const fn identity() -> Self {
        Homography {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub const fn from_rows(m: [[f64; 3]; 3]) -> Self {
        Homography { m }
    }

    pub fn from_row_slice(v: &[f64]) -> Result<Self> {
        if v.len() != 9 {
            return Err(Error::InvalidInput(format!(
                "homography needs 9 entries, got {}",
                v.len()
            )));
        }
        Ok(Homography {
            m: [[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]],
        })
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Homography::from_rows([[1.0, 0.0, dx], [0.0, 1.0, dy], [0.0, 0.0, 1.0]])
    }

    pub fn scaling(sx: f64, sy: f64) -> Self {
        Homography::from_rows([[sx, 0.0, 0.0], [0.0, sy, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn to_row_vec(&self) -> Vec<f64> {
        self.m.iter().flatten().copied().collect()
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// Scale so that `m[2][2] == 1`.
    pub fn normalized(&self) -> Result<Self> {
        let s = self.m[2][2];
        if s.abs() <= SINGULAR_EPS || !s.is_finite() {
            return Err(Error::NumericalFailure(
                "homography has m22 == 0 and cannot be normalized".into(),
            ));
        }
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|v| *v /= s);
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        if !det.is_finite() || det.abs() <= SINGULAR_EPS {
            return Err(Error::SingularTransform);
        }
        let m = &self.m;
        let adj = [
            [
                m[1][1] * m[2][2] - m[1][2] * m[2][1],
                m[0][2] * m[2][1] - m[0][1] * m[2][2],
                m[0][1] * m[1][2] - m[0][2] * m[1][1],
            ],
            [
                m[1][2] * m[2][0] - m[1][0] * m[2][2],
                m[0][0] * m[2][2] - m[0][2] * m[2][0],
                m[0][2] * m[1][0] - m[0][0] * m[1][2],
            ],
            [
                m[1][0] * m[2][1] - m[1][1] * m[2][0],
                m[0][1] * m[2][0] - m[0][0] * m[2][1],
                m[0][0] * m[1][1] - m[0][1] * m[1][0],
            ],
        ];
        let mut inv = Homography::from_rows(adj);
        inv.m.iter_mut().flatten().for_each(|v| *v /= det);
        // Keep the m22 == 1 convention whenever it is representable.
        Ok(inv.normalized().unwrap_or(inv))
    }

    /// Homogeneous image of `(x, y, 1)` without the perspective division.
    #[inline]
    pub fn apply_homogeneous(&self, x: f64, y: f64) -> [f64; 3] {
        let m = &self.m;
        [
            m[0][0] * x + m[0][1] * y + m[0][2],
            m[1][0] * x + m[1][1] * y + m[1][2],
            m[2][0] * x + m[2][1] * y + m[2][2],
        ]
    }

    pub fn project(&self, p: &Point) -> Result<Point> {
        let [x, y, w] = self.apply_homogeneous(p.x, p.y);
        if w.abs() <= SINGULAR_EPS || !w.is_finite() {
            return Err(Error::PointAtInfinity);
        }
        Ok(Point::new(x / w, y / w))
    }
}

impl Default for Homography {
    fn default() -> Self {
        Homography::identity()
    }
}

impl Mul for Homography {
    type Output = Homography;

    fn mul(self, rhs: Homography) -> Homography {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        Homography::from_rows(out)
    }
}

impl fmt::Debug for Homography {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.m.iter()).finish()
    }
}

impl TryFrom<Vec<f64>> for Homography {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Homography::from_row_slice(&v)
    }
}

impl From<Homography> for Vec<f64> {
    fn from(h: Homography) -> Self {
        h.to_row_vec()
    }
}

/// Map a box through `H^-1`, keeping the top-left, top-right, bottom-right,
/// bottom-left corner order.
pub fn inverse_transform_box(bbox: &Rect, h: &Homography) -> Result<Quad> {
    let inv = h.inverse()?;
    let c = bbox.corners();
    Ok(Quad {
        corners: [
            inv.project(&c[0])?,
            inv.project(&c[1])?,
            inv.project(&c[2])?,
            inv.project(&c[3])?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn project_identity_and_scale() {
        let p = Homography::identity().project(&Point::new(7.0, 9.0)).unwrap();
        assert_eq!(p, Point::new(7.0, 9.0));
        let q = Homography::scaling(2.0, 2.0)
            .project(&Point::new(3.0, 4.0))
            .unwrap();
        assert_eq!(q, Point::new(6.0, 8.0));
    }

    #[test]
    fn project_with_perspective_row() {
        let h = Homography::from_rows([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.001, 0.0, 1.0]]);
        let p = h.project(&Point::new(100.0, 0.0)).unwrap();
        assert!((p.x - 100.0 / 1.1).abs() < 1e-12);
        assert_eq!(p.y, 0.0);
    }

    #[test]
    fn project_at_infinity_is_an_error() {
        let h = Homography::from_rows([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.01, 0.0, 1.0]]);
        assert!(matches!(
            h.project(&Point::new(-100.0, 3.0)),
            Err(Error::PointAtInfinity)
        ));
    }

    #[test]
    fn singular_inverse() {
        let h = Homography::from_rows([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(h.inverse(), Err(Error::SingularTransform)));
    }

    #[test]
    fn inverse_box_of_translation() {
        let h = Homography::translation(5.0, 3.0);
        let q = inverse_transform_box(&Rect::new(10.0, 20.0, 30.0, 40.0), &h).unwrap();
        assert_eq!(q.corners[0], Point::new(5.0, 17.0));
        assert_eq!(q.corners[2], Point::new(25.0, 37.0));
    }

    #[test]
    fn inverse_box_of_identity_keeps_corners() {
        let r = Rect::new(1.5, 2.0, 8.0, 9.25);
        let q = inverse_transform_box(&r, &Homography::identity()).unwrap();
        assert_eq!(q.corners, r.corners());
    }

    #[test]
    fn serializes_as_nine_floats() {
        let h = Homography::from_rows([[1.0, 0.1, 3.0], [0.0, 1.0, -2.5], [1e-4, 0.0, 1.0]]);
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, "[1.0,0.1,3.0,0.0,1.0,-2.5,0.0001,0.0,1.0]");
        let back: Homography = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
        assert!(serde_json::from_str::<Homography>("[1,2,3]").is_err());
    }
}
