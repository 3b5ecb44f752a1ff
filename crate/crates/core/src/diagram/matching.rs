use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{DiagramPoint, VerboseDiagram};

/// l∞ distance on Δ'. Points at ∞ only match points at ∞.
pub fn d_inf(p: DiagramPoint, q: DiagramPoint) -> f64 {
    match (p.death.is_infinite(), q.death.is_infinite()) {
        (false, false) => (p.birth - q.birth).abs().max((p.death - q.death).abs()),
        (true, true) => (p.birth - q.birth).abs(),
        _ => f64::INFINITY,
    }
}

/// Matching distance with one optimal bijection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    /// `f64::INFINITY` when no finite-cost bijection exists.
    pub value: f64,
    /// Pairs `(i, j)` of indices into `a.points()` and `b.points()`, present when finite.
    pub witness: Option<Vec<(usize, usize)>>,
}

/// Bottleneck distance over pure bijections (no diagonal matching).
///
/// The optimum is one of the pairwise costs, so the search is a binary search
/// over the sorted distinct finite costs with a perfect-matching feasibility test.
pub fn matching_distance(a: &VerboseDiagram, b: &VerboseDiagram) -> Result<DistanceReport> {
    if a.q() != b.q() {
        return Err(Error::domain(format!("degree mismatch: {} vs {}", a.q(), b.q())));
    }
    let infinite = DistanceReport {
        value: f64::INFINITY,
        witness: None,
    };
    if a.len() != b.len() {
        return Ok(infinite);
    }
    let n = a.len();
    if n == 0 {
        return Ok(DistanceReport {
            value: 0.0,
            witness: Some(Vec::new()),
        });
    }
    let cost: Vec<Vec<f64>> = a
        .points()
        .iter()
        .map(|&p| b.points().iter().map(|&q| d_inf(p, q)).collect())
        .collect();
    let mut levels: Vec<f64> = cost.iter().flatten().copied().filter(|c| c.is_finite()).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let Some(top) = levels.last().copied() else {
        return Ok(infinite);
    };
    let Some(mut best) = perfect_matching(&cost, top) else {
        return Ok(infinite);
    };
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match perfect_matching(&cost, levels[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    // `best` always holds the matching found at `levels[hi]`
    Ok(DistanceReport {
        value: levels[lo],
        witness: Some(best),
    })
}

/// Perfect matching in the bipartite graph `{(i, j) : cost[i][j] ≤ threshold}`,
/// by augmenting paths. Returns pairs sorted by `i`.
fn perfect_matching(cost: &[Vec<f64>], threshold: f64) -> Option<Vec<(usize, usize)>> {
    let n = cost.len();
    let adj: Vec<Vec<usize>> = cost
        .iter()
        .map(|row| (0..n).filter(|&j| row[j] <= threshold).collect())
        .collect();
    let mut match_right: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &adj, &mut seen, &mut match_right) {
            return None;
        }
    }
    let mut pairs: Vec<(usize, usize)> = match_right
        .iter()
        .enumerate()
        .map(|(j, m)| (m.expect("perfect matching"), j))
        .collect();
    pairs.sort_unstable();
    Some(pairs)
}

fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], match_right: &mut [Option<usize>]) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if match_right[j].is_none_or(|k| augment(k, adj, seen, match_right)) {
            match_right[j] = Some(i);
            return true;
        }
    }
    false
}

/// `A + (t1, t2)` with `∞ + x = ∞`.
pub fn translate_diagram(vd: &VerboseDiagram, shift: (f64, f64)) -> Result<VerboseDiagram> {
    let (t1, t2) = shift;
    if !(t1 >= 0.0 && t2 >= t1 && t2.is_finite()) {
        return Err(Error::domain(format!(
            "translation ({t1}, {t2}) must satisfy 0 <= t1 <= t2 < ∞"
        )));
    }
    let points = vd
        .points()
        .iter()
        .map(|p| DiagramPoint::new(p.birth + t1, p.death + t2))
        .collect();
    VerboseDiagram::new(vd.q(), vd.t_max(), points)
}
