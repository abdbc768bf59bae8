use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{extract_feature_points, point_descriptors, DescriptorMode, DocId, LlahStore};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, Point, PointPair, RegionPolygon};
use crate::imaging::GrayImage;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub doc_id: DocId,
    /// Votes cast for `doc_id`.
    pub score: u32,
    /// Votes of the strongest other document (0 if none).
    pub runner_up_score: u32,
    /// Query point -> page point, one pair per query point and per page point.
    pub correspondences: Vec<PointPair>,
    /// Convex hull of the matched page points.
    pub region: RegionPolygon,
}

/// Retrieve the indexed page shown in `query`.
pub fn retrieve(query: &GrayImage, store: &LlahStore) -> Result<RetrievalResult> {
    if store.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let points = extract_feature_points(query, store.params())?;
    retrieve_points(&points, store)
}

/// Retrieval from already extracted query feature points.
///
/// Every query descriptor that exactly equals a stored descriptor votes for
/// that (document, page point). The document with the most votes wins (ties
/// go to the lower id). Its correspondences keep, for each query point, the
/// page point it voted for most often, and then for each page point the
/// query point with the most votes.
pub fn retrieve_points(points: &[Point], store: &LlahStore) -> Result<RetrievalResult> {
    if store.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let params = store.params();
    if points.len() < params.n + 1 {
        return Err(Error::InsufficientPoints {
            needed: params.n + 1,
            found: points.len(),
        });
    }

    let mut doc_votes: BTreeMap<DocId, u32> = BTreeMap::new();
    let mut pair_votes: HashMap<(DocId, u32, u32), u32> = HashMap::new();
    for qi in 0..points.len() {
        for d in point_descriptors(qi, points, params, DescriptorMode::Query)? {
            for (doc, pi) in store.lookup(&d.bins.0) {
                *doc_votes.entry(doc).or_default() += 1;
                *pair_votes.entry((doc, qi as u32, pi)).or_default() += 1;
            }
        }
    }

    let mut ranked: Vec<(DocId, u32)> = doc_votes.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let (doc_id, score) = ranked.first().copied().unwrap_or((0, 0));
    let runner_up_score = ranked.get(1).map_or(0, |r| r.1);
    if score < params.min_votes {
        return Err(Error::NoMatch {
            best: score,
            min_votes: params.min_votes,
        });
    }

    // Majority page point per query point.
    let mut best_for_query: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
    for (&(doc, qi, pi), &v) in &pair_votes {
        if doc != doc_id {
            continue;
        }
        let e = best_for_query.entry(qi).or_insert((pi, v));
        if v > e.1 || (v == e.1 && pi < e.0) {
            *e = (pi, v);
        }
    }
    // Then at most one query point per page point.
    let mut best_for_page: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
    for (&qi, &(pi, v)) in &best_for_query {
        let e = best_for_page.entry(pi).or_insert((qi, v));
        if v > e.1 || (v == e.1 && qi < e.0) {
            *e = (qi, v);
        }
    }

    let page_points = store
        .doc_points(doc_id)
        .ok_or_else(|| Error::StoreFormat(format!("document {doc_id} has no points")))?;
    let mut correspondences: Vec<(u32, PointPair)> = best_for_page
        .iter()
        .map(|(&pi, &(qi, _))| {
            (
                qi,
                PointPair::new(points[qi as usize], page_points[pi as usize]),
            )
        })
        .collect();
    correspondences.sort_by_key(|c| c.0);
    let correspondences: Vec<PointPair> = correspondences.into_iter().map(|c| c.1).collect();
    let dst: Vec<Point> = correspondences.iter().map(|c| c.dst).collect();
    let region = convex_hull(&dst)?;

    Ok(RetrievalResult {
        doc_id,
        score,
        runner_up_score,
        correspondences,
        region,
    })
}
