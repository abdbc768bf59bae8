use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use super::{normalization_transform, reprojection_cost, Homography, Point, PointPair};
use crate::error::{Error, Result};

/// Damping schedule and stopping rule for [`refine_homography_lm`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LmSettings {
    pub initial_lambda: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub rel_cost_tol: f64,
    pub max_iterations: usize,
}

impl Default for LmSettings {
    fn default() -> Self {
        LmSettings {
            initial_lambda: 1e-3,
            lambda_up: 10.0,
            lambda_down: 10.0,
            rel_cost_tol: 1e-10,
            max_iterations: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmReport {
    pub homography: Homography,
    /// Sum of squared pixel residuals before and after refinement.
    pub initial_cost: f64,
    pub final_cost: f64,
    pub iterations: usize,
    pub accepted_steps: usize,
}

type Params = SVector<f64, 8>;

fn to_params(h: &Homography) -> Params {
    let v = h.to_row_vec();
    Params::from_column_slice(&v[..8])
}

fn from_params(p: &Params) -> Homography {
    Homography::from_rows([[p[0], p[1], p[2]], [p[3], p[4], p[5]], [p[6], p[7], 1.0]])
}

fn cost(p: &Params, src: &[Point], dst: &[Point]) -> f64 {
    let h = from_params(p);
    src.iter()
        .zip(dst)
        .map(|(s, d)| {
            let [x, y, w] = h.apply_homogeneous(s.x, s.y);
            let ex = x / w - d.x;
            let ey = y / w - d.y;
            ex * ex + ey * ey
        })
        .sum()
}

/// Normal equations `J^T J` and gradient `J^T e` of the projection residuals.
fn normal_equations(p: &Params, src: &[Point], dst: &[Point]) -> (SMatrix<f64, 8, 8>, Params) {
    let h = from_params(p);
    let mut jtj = SMatrix::<f64, 8, 8>::zeros();
    let mut jte = Params::zeros();
    for (s, d) in src.iter().zip(dst) {
        let [xh, yh, w] = h.apply_homogeneous(s.x, s.y);
        let iw = 1.0 / w;
        let u = xh * iw;
        let v = yh * iw;
        let ju = Params::from_column_slice(&[
            s.x * iw,
            s.y * iw,
            iw,
            0.0,
            0.0,
            0.0,
            -s.x * u * iw,
            -s.y * u * iw,
        ]);
        let jv = Params::from_column_slice(&[
            0.0,
            0.0,
            0.0,
            s.x * iw,
            s.y * iw,
            iw,
            -s.x * v * iw,
            -s.y * v * iw,
        ]);
        jtj += ju * ju.transpose() + jv * jv.transpose();
        jte += ju * (u - d.x) + jv * (v - d.y);
    }
    (jtj, jte)
}

/// Refine `h0` by Levenberg-Marquardt on the reprojection error
/// `sum |dst_i - H(src_i)|^2`.
///
/// The eight free entries (with `m22` pinned to 1) are optimized in the
/// Hartley-normalized frames of both point sets, where the cost is a fixed
/// multiple of the pixel cost. The returned homography never has a larger
/// pixel cost than `h0`.
pub fn refine_homography_lm(h0: &Homography, pairs: &[PointPair]) -> Result<Homography> {
    refine_homography_lm_report(h0, pairs, &LmSettings::default()).map(|r| r.homography)
}

pub fn refine_homography_lm_report(
    h0: &Homography,
    pairs: &[PointPair],
    settings: &LmSettings,
) -> Result<LmReport> {
    if pairs.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: pairs.len(),
        });
    }
    h0.inverse()?;
    let initial_cost = reprojection_cost(h0, pairs);
    if !initial_cost.is_finite() {
        return Err(Error::NumericalFailure(
            "reprojection residuals are not finite".into(),
        ));
    }

    let src_px: Vec<Point> = pairs.iter().map(|p| p.src).collect();
    let dst_px: Vec<Point> = pairs.iter().map(|p| p.dst).collect();
    let ts = normalization_transform(&src_px);
    let td = normalization_transform(&dst_px);
    let td_inv = td.inverse()?;
    let src: Vec<Point> = src_px.iter().map(|p| ts.project(p)).collect::<Result<_>>()?;
    let dst: Vec<Point> = dst_px.iter().map(|p| td.project(p)).collect::<Result<_>>()?;

    let hn = (td * *h0 * ts.inverse()?).normalized()?;
    let mut params = to_params(&hn);
    let mut current = cost(&params, &src, &dst);
    if !current.is_finite() {
        return Err(Error::NumericalFailure(
            "reprojection residuals are not finite".into(),
        ));
    }

    let mut lambda = settings.initial_lambda;
    let mut iterations = 0;
    let mut accepted_steps = 0;
    let (mut jtj, mut jte) = normal_equations(&params, &src, &dst);
    while iterations < settings.max_iterations && current > 0.0 {
        iterations += 1;
        let mut damped = jtj;
        for i in 0..8 {
            damped[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
        }
        let step = damped.lu().solve(&(-jte));
        let candidate = step.map(|delta| params + delta);
        let trial = candidate
            .as_ref()
            .map(|p| cost(p, &src, &dst))
            .filter(|c| c.is_finite());
        match (candidate, trial) {
            (Some(p), Some(c)) if c < current => {
                let rel = (current - c) / current;
                params = p;
                current = c;
                accepted_steps += 1;
                lambda /= settings.lambda_down;
                if rel < settings.rel_cost_tol {
                    break;
                }
                (jtj, jte) = normal_equations(&params, &src, &dst);
            }
            _ => {
                lambda *= settings.lambda_up;
                if lambda > 1e16 {
                    break;
                }
            }
        }
    }

    let refined = (td_inv * from_params(&params) * ts).normalized()?;
    let final_cost = reprojection_cost(&refined, pairs);
    let (homography, final_cost) = if final_cost.is_finite() && final_cost <= initial_cost {
        (refined, final_cost)
    } else {
        (*h0, initial_cost)
    };
    Ok(LmReport {
        homography,
        initial_cost,
        final_cost,
        iterations,
        accepted_steps,
    })
}
