use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::invariant::affine_invariant;
use super::LlahParams;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Discretized invariants of one ordered neighbour subset, `C(m, 4)` bins.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DescriptorVec(pub Vec<u8>);

impl DescriptorVec {
    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DescriptorMode {
    /// One descriptor per cyclic start point: `C(n, m) * m` per feature point.
    Index,
    /// One canonical ordering per subset, starting at the neighbour farthest
    /// from the centre: `C(n, m)` per feature point.
    Query,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descriptor {
    pub bins: DescriptorVec,
    /// Index of the m-subset in lexicographic order.
    pub subset: u16,
    /// Position (in clockwise order) of the neighbour the ordering starts at.
    pub rotation: u8,
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Count of edges `<= value`: bins are right-open, so a value equal to an
/// edge falls in the bin to its right. NaN lands in the top bin.
pub fn discretize(value: f64, bin_edges: &[f64]) -> u8 {
    if value.is_nan() {
        return bin_edges.len() as u8;
    }
    bin_edges.partition_point(|e| *e <= value) as u8
}

/// `(sum_i bins[i] * k_base^i) mod hash_size`, reduced at every step.
pub fn hash_index(bins: &DescriptorVec, params: &LlahParams) -> u32 {
    hash_bins(&bins.0, params.k_base, params.hash_size)
}

pub(crate) fn hash_bins(bins: &[u8], k_base: u32, hash_size: u32) -> u32 {
    let (k, h) = (k_base as u64 % hash_size as u64, hash_size as u64);
    bins.iter()
        .rev()
        .fold(0u64, |acc, &b| (acc * k + b as u64) % h) as u32
}

/// Equal-frequency bin edges for `q_levels` levels.
pub fn fit_bin_edges(values: &[f64], q_levels: u32) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.len() < q_levels as usize * 10 {
        return Err(Error::InsufficientData {
            needed: q_levels as usize * 10,
            got: v.len(),
        });
    }
    v.sort_by(f64::total_cmp);
    let edges: Vec<f64> = (1..q_levels as usize)
        .map(|k| v[k * v.len() / q_levels as usize])
        .collect();
    if !edges.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::DegenerateConfiguration(
            "invariant sample has repeated quantiles".into(),
        ));
    }
    Ok(edges)
}

/// Indices of the `n` nearest other points, nearest first (ties by index).
fn nearest_neighbors(pt_index: usize, points: &[Point], n: usize) -> Vec<usize> {
    let c = points[pt_index];
    let mut cand: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pt_index)
        .map(|(i, p)| (p.dist_sq(&c), i))
        .collect();
    let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if cand.len() > n {
        cand.select_nth_unstable_by(n - 1, by_dist);
        cand.truncate(n);
    }
    cand.sort_by(by_dist);
    cand.into_iter().map(|(_, i)| i).collect()
}

struct OrderedSubset {
    subset: u16,
    rotation: u8,
    points: Vec<Point>,
}

fn ordered_subsets(
    pt_index: usize,
    points: &[Point],
    params: &LlahParams,
    mode: DescriptorMode,
) -> Result<Vec<OrderedSubset>> {
    if pt_index >= points.len() {
        return Err(Error::InvalidInput(format!(
            "point index {pt_index} out of range for {} points",
            points.len()
        )));
    }
    if points.len() < params.n + 1 {
        return Err(Error::InsufficientPoints {
            needed: params.n + 1,
            found: points.len(),
        });
    }
    let center = points[pt_index];
    let neighbors = nearest_neighbors(pt_index, points, params.n);
    // Clockwise on screen: angle measured with y pointing down.
    let angle = |p: &Point| {
        let a = (p.y - center.y).atan2(p.x - center.x);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    };

    let mut out = Vec::new();
    for (s, combo) in combinations(params.n, params.m).into_iter().enumerate() {
        let mut members: Vec<(f64, usize)> = combo
            .iter()
            .map(|&k| (angle(&points[neighbors[k]]), neighbors[k]))
            .collect();
        members.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let ring: Vec<Point> = members.iter().map(|&(_, i)| points[i]).collect();
        let starts: Vec<usize> = match mode {
            DescriptorMode::Index => (0..ring.len()).collect(),
            DescriptorMode::Query => {
                let far = (0..ring.len())
                    .max_by(|&a, &b| {
                        ring[a]
                            .dist_sq(&center)
                            .total_cmp(&ring[b].dist_sq(&center))
                            .then(b.cmp(&a))
                    })
                    .expect("subset is non-empty");
                vec![far]
            }
        };
        for r in starts {
            let mut pts = ring[r..].to_vec();
            pts.extend_from_slice(&ring[..r]);
            out.push(OrderedSubset {
                subset: s as u16,
                rotation: r as u8,
                points: pts,
            });
        }
    }
    Ok(out)
}

fn invariants_of<'a>(ordered: &'a [Point], quads: &'a [Vec<usize>]) -> impl Iterator<Item = f64> + 'a {
    quads.iter().map(move |q| {
        match affine_invariant(&ordered[q[0]], &ordered[q[1]], &ordered[q[2]], &ordered[q[3]]) {
            Ok(v) => v,
            // Collinear neighbours: the ratio diverges, so use the top bin.
            Err(_) => f64::INFINITY,
        }
    })
}

/// Descriptors of the feature point `points[pt_index]`.
///
/// The `n` nearest neighbours are split into all `C(n, m)` subsets; each
/// subset is ordered clockwise around the centre, and every 4-combination of
/// the ordered sequence (lexicographic) contributes one discretized
/// [`affine_invariant`].
pub fn point_descriptors(
    pt_index: usize,
    points: &[Point],
    params: &LlahParams,
    mode: DescriptorMode,
) -> Result<Vec<Descriptor>> {
    let quads = combinations(params.m, 4);
    let subsets = ordered_subsets(pt_index, points, params, mode)?;
    Ok(subsets
        .into_iter()
        .map(|o| Descriptor {
            bins: DescriptorVec(
                invariants_of(&o.points, &quads)
                    .map(|v| discretize(v, &params.bin_edges))
                    .collect(),
            ),
            subset: o.subset,
            rotation: o.rotation,
        })
        .collect())
}

/// Undiscretized invariants of one feature point, skipping degenerate quads.
pub fn raw_invariants(
    pt_index: usize,
    points: &[Point],
    params: &LlahParams,
    mode: DescriptorMode,
) -> Result<Vec<f64>> {
    let quads = combinations(params.m, 4);
    let subsets = ordered_subsets(pt_index, points, params, mode)?;
    Ok(subsets
        .iter()
        .flat_map(|o| invariants_of(&o.points, &quads).collect::<Vec<_>>())
        .filter(|v| v.is_finite())
        .collect())
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 7), 8);
        assert_eq!(binomial(7, 4), 35);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn lexicographic_combinations() {
        let c = combinations(4, 2);
        assert_eq!(
            c,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(7, 4).len(), 35);
    }

    #[test]
    fn discretize_boundaries() {
        let edges = [1.0, 2.0, 3.0];
        assert_eq!(discretize(0.5, &edges), 0);
        assert_eq!(discretize(1.0, &edges), 1);
        assert_eq!(discretize(2.5, &edges), 2);
        assert_eq!(discretize(3.0, &edges), 3);
        assert_eq!(discretize(f64::INFINITY, &edges), 3);
        assert_eq!(discretize(f64::NAN, &edges), 3);
    }

    #[test]
    fn hash_of_simple_vectors() {
        let p = LlahParams::default();
        assert_eq!(hash_index(&DescriptorVec(vec![0; 35]), &p), 0);
        let mut unit = vec![0u8; 35];
        unit[0] = 1;
        assert_eq!(hash_index(&DescriptorVec(unit), &p), 1);
        let mut second = vec![0u8; 35];
        second[1] = 3;
        assert_eq!(hash_index(&DescriptorVec(second), &p), 48);
    }

    #[test]
    fn hash_matches_big_integer_evaluation() {
        // Exact polynomial value via u128 for short vectors.
        let p = LlahParams::default();
        let bins: Vec<u8> = (0..20).map(|i| (i * 7 % 16) as u8).collect();
        let exact: u128 = bins
            .iter()
            .enumerate()
            .map(|(i, &b)| b as u128 * 16u128.pow(i as u32) % p.hash_size as u128)
            .sum::<u128>()
            % p.hash_size as u128;
        // 16^19 * 15 overflows u64 but not u128.
        let direct: u128 = bins
            .iter()
            .enumerate()
            .map(|(i, &b)| b as u128 * 16u128.pow(i as u32))
            .sum::<u128>()
            % p.hash_size as u128;
        assert_eq!(exact, direct);
        assert_eq!(hash_index(&DescriptorVec(bins), &p) as u128, direct);
    }

    #[test]
    fn counts_for_nine_points() {
        let pts: Vec<Point> = (0..9)
            .map(|i| {
                let a = i as f64 * 0.7;
                Point::new(50.0 + (10.0 + i as f64) * a.cos(), 50.0 + (12.0 + i as f64) * a.sin())
            })
            .collect();
        let p = LlahParams::default();
        let q = point_descriptors(0, &pts, &p, DescriptorMode::Query).unwrap();
        assert_eq!(q.len(), 8);
        assert!(q.iter().all(|d| d.bins.0.len() == 35));
        let idx = point_descriptors(0, &pts, &p, DescriptorMode::Index).unwrap();
        assert_eq!(idx.len(), 8 * 7);
        // The query ordering is one of the indexed rotations.
        for d in &q {
            assert!(idx.iter().any(|e| e == d));
        }
    }

    #[test]
    fn too_few_points() {
        let pts: Vec<Point> = (0..8).map(|i| Point::new(i as f64, (i * i) as f64)).collect();
        assert!(matches!(
            point_descriptors(0, &pts, &LlahParams::default(), DescriptorMode::Query),
            Err(Error::InsufficientPoints { needed: 9, found: 8 })
        ));
    }

    #[test]
    fn fit_edges_on_uniform_sample() {
        let vals: Vec<f64> = (0..1600).map(|i| i as f64).collect();
        let e = fit_bin_edges(&vals, 16).unwrap();
        assert_eq!(e.len(), 15);
        assert_eq!(e[0], 100.0);
        assert_eq!(e[14], 1500.0);
    }
}
