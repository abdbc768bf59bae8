//! Oracles written independently of the library code they check.

#![allow(dead_code)]

use camgt::geometry::{Point, Rect};
use rand::Rng;

/// Plain two-row Levenshtein distance over already split units.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Minimum edit cost by exhaustive recursion over all alignments.
pub fn brute_force_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let diag = brute_force_distance(ra, rb) + usize::from(x != y);
            let del = brute_force_distance(ra, b) + 1;
            let ins = brute_force_distance(a, rb) + 1;
            diag.min(del).min(ins)
        }
    }
}

/// Both matching gates recomputed from the raw box coordinates.
pub fn gates_pass(capt: &Rect, ret: &Rect, theta_c: f64, theta_w: f64) -> bool {
    let (cx1, cy1) = ((capt.x0 + capt.x1) * 0.5, (capt.y0 + capt.y1) * 0.5);
    let (cx2, cy2) = ((ret.x0 + ret.x1) * 0.5, (ret.y0 + ret.y1) * 0.5);
    let d_c = ((cx1 - cx2).powi(2) + (cy1 - cy2).powi(2)).sqrt();
    let d_w = ((capt.x1 - capt.x0) - (ret.x1 - ret.x0)).abs();
    d_c < theta_c && d_w < theta_w
}

/// Shoelace area of a triangle.
pub fn shoelace(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y)).abs()
}

/// `x -> A x + t` with `A` and `t` drawn at random; `|det A| >= 0.1`.
pub fn random_affine<R: Rng>(rng: &mut R) -> impl Fn(&Point) -> Point {
    let (a, b, c, d) = loop {
        let m: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        if (m[0] * m[3] - m[1] * m[2]).abs() >= 0.1 {
            break (m[0], m[1], m[2], m[3]);
        }
    };
    let (tx, ty) = (rng.random_range(-1000.0..1000.0), rng.random_range(-1000.0..1000.0));
    move |p: &Point| Point::new(a * p.x + b * p.y + tx, c * p.x + d * p.y + ty)
}

/// Four points in a 1000 px square whose two invariant triangles each cover
/// at least 1% of the square, so the ratio is well conditioned.
pub fn random_quad<R: Rng>(rng: &mut R) -> [Point; 4] {
    loop {
        let q: [Point; 4] = std::array::from_fn(|_| {
            Point::new(rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0))
        });
        if shoelace(&q[0], &q[1], &q[2]) >= 1e4 && shoelace(&q[0], &q[2], &q[3]) >= 1e4 {
            return q;
        }
    }
}

/// Random printable string over a small alphabet, so that edits collide.
pub fn random_word<R: Rng>(rng: &mut R, max_len: usize) -> String {
    const ALPHABET: &[char] = &['a', 'b', 'c', 'd', 'e', 'A', 'é', '1'];
    let n = rng.random_range(0..=max_len);
    (0..n).map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())]).collect()
}

/// A word box around a random centre, with integer coordinates.
pub fn random_box<R: Rng>(rng: &mut R) -> Rect {
    let x = rng.random_range(0..2000) as f64;
    let y = rng.random_range(0..2000) as f64;
    let w = rng.random_range(8..200) as f64;
    let h = rng.random_range(4..40) as f64;
    Rect::new(x, y, x + w, y + h)
}
