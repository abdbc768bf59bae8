use nalgebra::{DMatrix, Matrix3};

use super::{Homography, Point, PointPair};
use crate::error::{Error, Result};

/// Singular-value ratio below which the DLT system is treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Similarity that moves the centroid of `points` to the origin and scales
/// their mean distance from it to sqrt(2).
pub fn normalization_transform(points: &[Point]) -> Homography {
    let n = points.len().max(1) as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
    let mean_dist = points
        .iter()
        .map(|p| (p.x - cx).hypot(p.y - cy))
        .sum::<f64>()
        / n;
    let s = if mean_dist > 1e-12 {
        std::f64::consts::SQRT_2 / mean_dist
    } else {
        1.0
    };
    Homography::from_rows([[s, 0.0, -s * cx], [0.0, s, -s * cy], [0.0, 0.0, 1.0]])
}

fn apply_affine(t: &Homography, p: &Point) -> (f64, f64) {
    (
        t.m[0][0] * p.x + t.m[0][2],
        t.m[1][1] * p.y + t.m[1][2],
    )
}

fn to_matrix(h: &Homography) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| h.m[i][j])
}

fn from_matrix(m: &Matrix3<f64>) -> Homography {
    Homography::from_rows([
        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
    ])
}

/// Least-squares homography `src -> dst` by the normalized direct linear
/// transform.
///
/// Both point sets are conditioned with [`normalization_transform`], the
/// stacked `2n x 9` system `A h = 0` is solved for the right singular vector
/// of the smallest singular value, and the result is denormalized and scaled
/// so that `m22 == 1`. This minimizes algebraic, not geometric, error; see
/// [`super::refine_homography_lm`] for the latter.
pub fn estimate_homography_ls(pairs: &[PointPair]) -> Result<Homography> {
    if pairs.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: pairs.len(),
        });
    }
    if pairs.iter().any(|p| !p.src.is_finite() || !p.dst.is_finite()) {
        return Err(Error::InvalidInput("non-finite correspondence".into()));
    }
    let src: Vec<Point> = pairs.iter().map(|p| p.src).collect();
    let dst: Vec<Point> = pairs.iter().map(|p| p.dst).collect();
    let ts = normalization_transform(&src);
    let td = normalization_transform(&dst);

    // At least 9 rows so the thin SVD still exposes the null-space vector.
    let rows = (2 * pairs.len()).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (k, (s, d)) in src.iter().zip(&dst).enumerate() {
        let (x, y) = apply_affine(&ts, s);
        let (u, v) = apply_affine(&td, d);
        let r = 2 * k;
        a[(r, 0)] = -x;
        a[(r, 1)] = -y;
        a[(r, 2)] = -1.0;
        a[(r, 6)] = u * x;
        a[(r, 7)] = u * y;
        a[(r, 8)] = u;
        a[(r + 1, 3)] = -x;
        a[(r + 1, 4)] = -y;
        a[(r + 1, 5)] = -1.0;
        a[(r + 1, 6)] = v * x;
        a[(r + 1, 7)] = v * y;
        a[(r + 1, 8)] = v;
    }

    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let smallest = order[0];
    let largest = svd.singular_values[order[order.len() - 1]];
    if largest <= 0.0 || svd.singular_values[order[1]] <= RANK_TOL * largest {
        return Err(Error::DegenerateConfiguration(
            "correspondences do not determine a unique homography".into(),
        ));
    }
    let h = v_t.row(smallest);
    let hn = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);

    let td_inv = to_matrix(&td.inverse()?);
    let denorm = td_inv * hn * to_matrix(&ts);
    let out = from_matrix(&denorm).normalized().map_err(|_| {
        Error::DegenerateConfiguration("estimated homography has m22 == 0".into())
    })?;
    if !out.is_finite() || out.inverse().is_err() {
        return Err(Error::DegenerateConfiguration(
            "estimated homography is singular".into(),
        ));
    }
    Ok(out)
}
