//! Tolerance-aware equality of complex multisets.
//!
//! Two multisets match when there is a bijection pairing every `a` with some
//! `b` such that `|a - b| <= tol * max(1, |a|, |b|)`. Among all admissible
//! bijections the one with the smallest largest residual is returned
//! (bottleneck assignment), so the reported residual does not depend on the
//! input order.

use std::cmp::Ordering;

use serde::Serialize;

use crate::class::Scalar;
use crate::error::{contract, Result};

/// A bijection `left[i] ↔ right[pairing[i]]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matching {
    pub pairing: Vec<usize>,
    /// Largest scaled residual `|a - b| / max(1, |a|, |b|)` over the pairs.
    pub max_residual: f64,
}

pub(crate) fn scaled_distance(a: Scalar, b: Scalar) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

fn re_im_cmp(a: &Scalar, b: &Scalar) -> Ordering {
    a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im))
}

/// Kuhn's augmenting paths restricted to edges with distance <= `limit`.
fn perfect_matching(dist: &[Vec<f64>], limit: f64) -> Option<Vec<usize>> {
    let n = dist.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];

    fn augment(
        i: usize,
        dist: &[Vec<f64>],
        limit: f64,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..dist.len() {
            if seen[j] || dist[i][j] > limit {
                continue;
            }
            seen[j] = true;
            let free = match owner[j] {
                None => true,
                Some(k) => augment(k, dist, limit, seen, owner),
            };
            if free {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }

    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, dist, limit, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut pairing = vec![0; n];
    for (j, i) in owner.into_iter().enumerate() {
        pairing[i.expect("perfect matching covers every column")] = j;
    }
    Some(pairing)
}

/// Finds a tolerance-respecting bijection between `left` and `right`, if any.
pub fn multiset_match(left: &[Scalar], right: &[Scalar], tol: f64) -> Result<Option<Matching>> {
    if left.len() != right.len() {
        return Err(contract(format!(
            "multiset sizes differ: {} vs {}",
            left.len(),
            right.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(contract(format!("tolerance must be positive, got {tol}")));
    }
    let n = left.len();
    if n == 0 {
        return Ok(Some(Matching {
            pairing: Vec::new(),
            max_residual: 0.0,
        }));
    }

    let mut li: Vec<usize> = (0..n).collect();
    let mut ri: Vec<usize> = (0..n).collect();
    li.sort_by(|&a, &b| re_im_cmp(&left[a], &left[b]));
    ri.sort_by(|&a, &b| re_im_cmp(&right[a], &right[b]));

    let dist: Vec<Vec<f64>> = li
        .iter()
        .map(|&i| {
            ri.iter()
                .map(|&j| scaled_distance(left[i], right[j]))
                .collect()
        })
        .collect();

    let mut candidates: Vec<f64> = dist
        .iter()
        .flatten()
        .copied()
        .filter(|&d| d <= tol)
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    if candidates.is_empty() {
        return Ok(None);
    }
    if perfect_matching(&dist, tol).is_none() {
        return Ok(None);
    }

    // Smallest admissible bottleneck.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(&dist, candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let limit = candidates[lo];
    let sorted_pairing = perfect_matching(&dist, limit).expect("limit admits a matching");

    let mut pairing = vec![0; n];
    let mut max_residual: f64 = 0.0;
    for (a, &b) in sorted_pairing.iter().enumerate() {
        pairing[li[a]] = ri[b];
        max_residual = max_residual.max(dist[a][b]);
    }
    Ok(Some(Matching {
        pairing,
        max_residual,
    }))
}
