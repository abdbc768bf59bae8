use crate::error::{Error, Result};
use crate::geometry::{cross, Point};

/// Smallest denominator area accepted by [`affine_invariant`].
pub const MIN_AREA: f64 = 1e-9;

/// Unsigned area of the triangle `abc`.
pub fn triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    cross(a, b, c).abs() / 2.0
}

/// Ratio `area(p1, p2, p3) / area(p1, p3, p4)` of the two triangles that the
/// diagonal `p1 p3` cuts from the quadrilateral. Both areas scale by `|det A|`
/// under an affine map `A`, so the ratio is affine invariant.
pub fn affine_invariant(p1: &Point, p2: &Point, p3: &Point, p4: &Point) -> Result<f64> {
    let den = triangle_area(p1, p3, p4);
    if !(den > MIN_AREA) {
        return Err(Error::DegenerateQuad);
    }
    Ok(triangle_area(p1, p2, p3) / den)
}
