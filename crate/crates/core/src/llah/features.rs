use super::LlahParams;
use crate::error::Result;
use crate::geometry::Point;
use crate::imaging::{binarize_otsu, connected_components, gaussian_blur, GrayImage};

/// Feature points of a page or capture: centroids of the connected
/// components of the blurred, binarized image. Blurring merges the glyphs
/// of a word so that each point roughly marks one word.
pub fn extract_feature_points(img: &GrayImage, params: &LlahParams) -> Result<Vec<Point>> {
    let binary = binarize_otsu(&gaussian_blur(img, params.feature_sigma)?);
    Ok(connected_components(&binary)?
        .into_iter()
        .filter(|b| b.pixel_count >= params.min_blob_pixels)
        .map(|b| b.centroid)
        .collect())
}
