mod common;

use camgt::alignment::{match_words, MatchParams, WordBox};
use camgt::eval::{accuracy, edit_counts};
use camgt::geometry::{
    convex_hull, estimate_homography_ls, point_in_polygon, refine_homography_lm_report, reprojection_cost,
    transfer_error, Homography, LmSettings, Point, PointPair, Rect,
};
use camgt::llah::{
    affine_invariant, discretize, point_descriptors, raw_invariants, DescriptorMode, LlahParams, DEFAULT_BIN_EDGES,
};
use common::{brute_force_distance, gates_pass, levenshtein};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unicode_segmentation::UnicodeSegmentation;

fn graphemes(s: &str) -> Vec<&str> {
    s.graphemes(true).collect()
}

fn word() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[abcdeAé1]{0,10}").unwrap()
}

fn boxes(max: usize) -> impl Strategy<Value = Vec<Rect>> {
    proptest::collection::vec(
        (0i32..300, 0i32..300, 2i32..40, 2i32..12),
        0..max,
    )
    .prop_map(|v| {
        v.into_iter()
            .map(|(x, y, w, h)| Rect::new(x as f64, y as f64, (x + w) as f64, (y + h) as f64))
            .collect()
    })
}

fn near_identity() -> impl Strategy<Value = Homography> {
    proptest::array::uniform8(-1.0f64..1.0).prop_map(|d| {
        Homography::from_row_slice(&[
            1.0 + 0.2 * d[0],
            0.2 * d[1],
            300.0 * d[2],
            0.2 * d[3],
            1.0 + 0.2 * d[4],
            300.0 * d[5],
            1e-4 * d[6],
            1e-4 * d[7],
            1.0,
        ])
        .unwrap()
    })
}

fn grid() -> Vec<Point> {
    let mut pts = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            pts.push(Point::new(100.0 + 200.0 * i as f64, 80.0 + 250.0 * j as f64));
        }
    }
    pts
}

/// Indices of the other points by increasing distance from `points[i]`.
fn by_distance(points: &[Point], i: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).filter(|&j| j != i).collect();
    idx.sort_by(|&a, &b| points[i].dist(&points[a]).total_cmp(&points[i].dist(&points[b])));
    idx
}

/// Rotation, uniform scale, shear and shift; orientation preserving.
fn similarity_with_shear(angle: f64, scale: f64, shear: f64, t: (f64, f64)) -> impl Fn(&Point) -> Point {
    let (c, s) = (angle.cos() * scale, angle.sin() * scale);
    move |p: &Point| {
        let x = p.x + shear * p.y;
        Point::new(c * x - s * p.y + t.0, s * x + c * p.y + t.1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn descriptors_survive_similarity_and_shear(
        seed in any::<u64>(),
        angle in -3.1f64..3.1,
        scale in 0.5f64..2.0,
        shear in -0.2f64..0.2,
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Point> = (0..40)
            .map(|_| Point::new(rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0)))
            .collect();
        let f = similarity_with_shear(angle, scale, shear, (300.0, -200.0));
        let moved: Vec<Point> = pts.iter().map(&f).collect();
        let params = LlahParams::default();
        let margin = |v: f64| DEFAULT_BIN_EDGES.iter().all(|e| ((v - e) / e).abs() > 1e-6);
        let mut checked = 0;
        for i in 0..pts.len() {
            let (a, b) = (by_distance(&pts, i), by_distance(&moved, i));
            if a[..params.n + 1] != b[..params.n + 1] {
                continue;
            }
            let raw = raw_invariants(i, &pts, &params, DescriptorMode::Query).unwrap();
            if !raw.iter().all(|v| margin(*v)) {
                continue;
            }
            let da = point_descriptors(i, &pts, &params, DescriptorMode::Query).unwrap();
            let db = point_descriptors(i, &moved, &params, DescriptorMode::Query).unwrap();
            let bins = |d: &[camgt::llah::Descriptor]| d.iter().map(|x| x.bins.0.clone()).collect::<Vec<_>>();
            prop_assert_eq!(bins(&da), bins(&db));
            checked += 1;
        }
        prop_assert!(shear.abs() > 0.05 || checked > 0);
    }
}

proptest! {
    #[test]
    fn edit_counts_match_levenshtein(a in word(), b in word()) {
        let c = edit_counts(&a, &b);
        let (ga, gb) = (graphemes(&a), graphemes(&b));
        prop_assert_eq!(c.total(), levenshtein(&ga, &gb));
        prop_assert_eq!(ga.len() + c.insertions, gb.len() + c.deletions);
        prop_assert_eq!(edit_counts(&b, &a).total(), c.total());
    }

    #[test]
    fn short_strings_match_brute_force(a in "[abc]{0,6}", b in "[abc]{0,6}") {
        prop_assert_eq!(edit_counts(&a, &b).total(), brute_force_distance(&graphemes(&a), &graphemes(&b)));
    }

    #[test]
    fn accuracy_is_a_percentage(a in "[abcde]{1,10}", b in word()) {
        let v = accuracy(&a, &b).unwrap();
        prop_assert!((0.0..=100.0).contains(&v));
        prop_assert_eq!(accuracy(&a, &a).unwrap(), 100.0);
    }

    #[test]
    fn invariant_survives_affine_maps(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = common::random_quad(&mut rng);
        let f = common::random_affine(&mut rng);
        let before = affine_invariant(&q[0], &q[1], &q[2], &q[3]).unwrap();
        let m: Vec<Point> = q.iter().map(&f).collect();
        let after = affine_invariant(&m[0], &m[1], &m[2], &m[3]).unwrap();
        prop_assert!(((after - before) / before).abs() < 1e-9);
    }

    #[test]
    fn discretize_is_monotone(a in 0.0f64..20.0, b in 0.0f64..20.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(discretize(lo, &DEFAULT_BIN_EDGES) <= discretize(hi, &DEFAULT_BIN_EDGES));
        prop_assert!((discretize(hi, &DEFAULT_BIN_EDGES) as usize) <= DEFAULT_BIN_EDGES.len());
    }

    #[test]
    fn matching_is_one_to_one_and_gated(capt in boxes(40), ret in boxes(40)) {
        let p = MatchParams::default();
        let (cw, rw): (Vec<WordBox>, Vec<WordBox>) =
            (capt.iter().map(|r| WordBox::new(*r)).collect(), ret.iter().map(|r| WordBox::new(*r)).collect());
        let pairs = match_words(&cw, &rw, &p);
        for (i, a) in pairs.iter().enumerate() {
            prop_assert!(gates_pass(&a.capt.bbox, &a.ret.bbox, p.theta_c, p.theta_w));
            for b in &pairs[i + 1..] {
                prop_assert!(a.capt != b.capt || a.capt.bbox == b.capt.bbox);
                prop_assert!(a.ret != b.ret || a.ret.bbox == b.ret.bbox);
            }
        }
        prop_assert!(pairs.len() <= cw.len().min(rw.len()));
    }

    #[test]
    fn matching_follows_integer_translation(capt in boxes(30), ret in boxes(30), dx in -500i32..500, dy in -500i32..500) {
        let p = MatchParams::default();
        let shift = |v: &[Rect]| -> Vec<WordBox> {
            v.iter().map(|r| WordBox::new(r.translate(dx as f64, dy as f64))).collect()
        };
        let plain = |v: &[Rect]| -> Vec<WordBox> { v.iter().map(|r| WordBox::new(*r)).collect() };
        let a = match_words(&plain(&capt), &plain(&ret), &p);
        let b = match_words(&shift(&capt), &shift(&ret), &p);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.capt.bbox.translate(dx as f64, dy as f64), y.capt.bbox);
            prop_assert_eq!(x.ret.bbox.translate(dx as f64, dy as f64), y.ret.bbox);
        }
    }

    #[test]
    fn matching_is_symmetric_without_ties(capt in boxes(30), ret in boxes(30)) {
        let p = MatchParams::default();
        let cw: Vec<WordBox> = capt.iter().map(|r| WordBox::new(*r)).collect();
        let rw: Vec<WordBox> = ret.iter().map(|r| WordBox::new(*r)).collect();
        let mut keys: Vec<(u64, u64)> = Vec::new();
        for c in &cw {
            for r in &rw {
                if p.accepts(c, r) {
                    keys.push((c.d_centroid(r).to_bits(), c.d_width(r).to_bits()));
                }
            }
        }
        let n = keys.len();
        keys.sort_unstable();
        keys.dedup();
        prop_assume!(keys.len() == n);
        let ab = match_words(&cw, &rw, &p);
        let ba = match_words(&rw, &cw, &p);
        let mut x: Vec<_> = ab.iter().map(|q| (q.capt.bbox, q.ret.bbox)).map(|(a, b)| format!("{a:?}{b:?}")).collect();
        let mut y: Vec<_> = ba.iter().map(|q| (q.ret.bbox, q.capt.bbox)).map(|(a, b)| format!("{a:?}{b:?}")).collect();
        x.sort();
        y.sort();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn inverse_round_trips(h in near_identity(), x in 0.0f64..1500.0, y in 0.0f64..2000.0) {
        let p = Point::new(x, y);
        let back = h.inverse().unwrap().project(&h.project(&p).unwrap()).unwrap();
        prop_assert!(back.dist(&p) < 1e-6);
    }

    #[test]
    fn dlt_recovers_exact_homographies(h in near_identity()) {
        let pts = grid();
        let pairs: Vec<PointPair> = pts.iter().map(|p| PointPair::new(*p, h.project(p).unwrap())).collect();
        let est = estimate_homography_ls(&pairs).unwrap();
        prop_assert!(transfer_error(&est, &h, &pts) < 1e-6);
    }

    #[test]
    fn lm_never_increases_cost(h in near_identity(), noise in proptest::collection::vec(-2.0f64..2.0, 50)) {
        let pts = grid();
        let pairs: Vec<PointPair> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let q = h.project(p).unwrap();
                PointPair::new(*p, Point::new(q.x + noise[2 * i], q.y + noise[2 * i + 1]))
            })
            .collect();
        let h0 = estimate_homography_ls(&pairs).unwrap();
        let r = refine_homography_lm_report(&h0, &pairs, &LmSettings::default()).unwrap();
        prop_assert!(reprojection_cost(&r.homography, &pairs) <= reprojection_cost(&h0, &pairs));
    }

    #[test]
    fn hull_contains_its_points(pts in proptest::collection::vec((0.0f64..500.0, 0.0f64..500.0), 3..40)) {
        let pts: Vec<Point> = pts.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        if let Ok(hull) = convex_hull(&pts) {
            prop_assert!(hull.is_convex());
            let c = pts.iter().fold(Point::new(0.0, 0.0), |a, p| Point::new(a.x + p.x, a.y + p.y));
            let c = Point::new(c.x / pts.len() as f64, c.y / pts.len() as f64);
            for p in &pts {
                // Pull each point slightly toward the centroid so boundary points count.
                let q = Point::new(p.x + (c.x - p.x) * 1e-6, p.y + (c.y - p.y) * 1e-6);
                prop_assert!(point_in_polygon(&q, &hull) || hull.signed_area().abs() < 1e-6);
            }
        }
    }

    #[test]
    fn iou_is_symmetric_and_bounded(a in boxes(2), b in boxes(2)) {
        for x in &a {
            for y in &b {
                let v = x.iou(y);
                prop_assert!((0.0..=1.0).contains(&v));
                prop_assert_eq!(v, y.iou(x));
            }
            prop_assert_eq!(x.iou(x), 1.0);
        }
    }
}
