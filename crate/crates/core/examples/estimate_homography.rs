//! Fit a homography to noisy point pairs with the normalized DLT, refine it
//! with Levenberg-Marquardt and compare both with the true map.
//!
//! cargo run --example estimate_homography -- [noise_px]

use camgt::geometry::{
    estimate_homography_ls, refine_homography_lm_report, reprojection_rmse, transfer_error, Homography,
    LmSettings, Point, PointPair,
};
use rand::{Rng, SeedableRng};
use rand_distr::Normal;

fn main() -> camgt::Result<()> {
    let sigma: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let truth = Homography::from_row_slice(&[0.98, -0.05, 120.0, 0.04, 1.02, 80.0, 2e-5, -3e-5, 1.0])?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, sigma).unwrap();

    let pairs: Vec<PointPair> = (0..80)
        .map(|_| {
            let p = Point::new(rng.random_range(0.0..1240.0), rng.random_range(0.0..1754.0));
            let q = truth.project(&p).unwrap();
            PointPair::new(p, Point::new(q.x + rng.sample(noise), q.y + rng.sample(noise)))
        })
        .collect();

    let dlt = estimate_homography_ls(&pairs)?;
    let lm = refine_homography_lm_report(&dlt, &pairs, &LmSettings::default())?;
    let corners = [
        Point::new(0.0, 0.0),
        Point::new(1240.0, 0.0),
        Point::new(1240.0, 1754.0),
        Point::new(0.0, 1754.0),
    ];
    println!("{} pairs, noise sigma {sigma} px", pairs.len());
    println!(
        "DLT: rmse {:.4} px, corner error {:.4} px",
        reprojection_rmse(&dlt, &pairs),
        transfer_error(&dlt, &truth, &corners)
    );
    println!(
        "LM:  rmse {:.4} px, corner error {:.4} px after {} iterations",
        reprojection_rmse(&lm.homography, &pairs),
        transfer_error(&lm.homography, &truth, &corners),
        lm.iterations
    );
    Ok(())
}
