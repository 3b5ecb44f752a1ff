//! Marked point clouds and the Euclidean primitives used by filtration functions.
//!
//! Marks are carried on every point but never enter the computations in this
//! module: distances, Hausdorff distances and enclosing balls all act on the
//! coordinate projection.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Absolute tolerance for geometric containment tests.
pub const GEOMETRY_EPS: f64 = 1e-9;

/// Seed of the internal permutation used by the enclosing-ball search.
const WELZL_SEED: u64 = 0x5eed_ba11;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPoint {
    pub coords: Vec<f64>,
    /// Nonnegative radius attached to the point.
    pub mark: f64,
}

impl MarkedPoint {
    pub fn new(coords: Vec<f64>, mark: f64) -> Self {
        Self { coords, mark }
    }

    pub fn unmarked(coords: Vec<f64>) -> Self {
        Self { coords, mark: 0.0 }
    }
}

/// A finite simple marked point set in `R^N × [0, R0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPointCloud {
    points: Vec<MarkedPoint>,
    dim: usize,
    r0: f64,
}

impl MarkedPointCloud {
    /// Validates dimensions, marks and simplicity (pairwise distinct coordinates).
    pub fn new(points: Vec<MarkedPoint>, dim: usize, r0: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("ambient dimension must be at least 1"));
        }
        if !(r0 >= 0.0 && r0.is_finite()) {
            return Err(Error::domain(format!("mark bound R0 = {r0} must be finite and >= 0")));
        }
        for (i, p) in points.iter().enumerate() {
            if p.coords.len() != dim {
                return Err(Error::domain(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.coords.len()
                )));
            }
            if p.coords.iter().any(|c| !c.is_finite()) {
                return Err(Error::domain(format!("point {i} has a non-finite coordinate")));
            }
            if !(p.mark >= 0.0 && p.mark <= r0) {
                return Err(Error::domain(format!(
                    "point {i} has mark {} outside [0, {r0}]",
                    p.mark
                )));
            }
        }
        let cloud = Self { points, dim, r0 };
        if let Some((i, j)) = cloud.duplicate_pair() {
            return Err(Error::domain(format!(
                "cloud is not simple: points {i} and {j} share coordinates"
            )));
        }
        Ok(cloud)
    }

    /// Builds a cloud with `R0` equal to the largest mark.
    pub fn from_points(points: Vec<MarkedPoint>) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.coords.len())
            .ok_or_else(|| Error::domain("cannot infer dimension of an empty cloud"))?;
        let r0 = points.iter().map(|p| p.mark).fold(0.0, f64::max);
        Self::new(points, dim, r0)
    }

    /// Unmarked cloud from raw coordinate tuples.
    pub fn from_coords(coords: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_points(coords.into_iter().map(MarkedPoint::unmarked).collect())
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            points: Vec::new(),
            dim,
            r0: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn points(&self) -> &[MarkedPoint] {
        &self.points
    }

    pub fn coords(&self, i: usize) -> &[f64] {
        &self.points[i].coords
    }

    pub fn mark(&self, i: usize) -> f64 {
        self.points[i].mark
    }

    pub fn into_points(self) -> Vec<MarkedPoint> {
        self.points
    }

    /// Copy of the cloud with every coordinate tuple shifted by `v`.
    pub fn translated(&self, v: &[f64]) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| MarkedPoint {
                coords: p.coords.iter().zip(v).map(|(c, d)| c + d).collect(),
                mark: p.mark,
            })
            .collect();
        Self {
            points,
            dim: self.dim,
            r0: self.r0,
        }
    }

    fn duplicate_pair(&self) -> Option<(usize, usize)> {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&a, &b| lex_cmp(&self.points[a].coords, &self.points[b].coords));
        idx.windows(2)
            .find(|w| self.points[w[0]].coords == self.points[w[1]].coords)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Euclidean distance. Summation order is fixed so the result is symmetric bit for bit.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_pair(a: &MarkedPointCloud, b: &MarkedPointCloud) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("Hausdorff distance of an empty cloud"));
    }
    if a.dim() != b.dim() {
        return Err(Error::domain(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    Ok(())
}

fn directed_hausdorff(a: &MarkedPointCloud, b: &MarkedPointCloud) -> f64 {
    a.points()
        .iter()
        .map(|p| {
            b.points()
                .iter()
                .map(|q| distance(&p.coords, &q.coords))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Hausdorff distance between the coordinate projections of two clouds.
pub fn hausdorff_distance(a: &MarkedPointCloud, b: &MarkedPointCloud) -> Result<f64> {
    check_pair(a, b)?;
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// Minimum pairwise distance between distinct points.
pub fn min_separation(x: &MarkedPointCloud) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::domain("min_separation needs at least two points"));
    }
    let mut best = f64::INFINITY;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            best = best.min(distance(x.coords(i), x.coords(j)));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Smallest closed ball containing every input point.
///
/// Welzl's move-to-front search over a fixed pseudo-random permutation of the
/// input; recursion depth is bounded by `N + 2` support points while the scan
/// over the input is iterative, so large inputs are fine. Once the support set
/// is known the ball is recomputed from the support points in lexicographic
/// order, and the radius is the largest distance from that center to any
/// input. Two point sets sharing a support therefore get bit-identical radii,
/// independent of input order.
pub fn min_enclosing_ball<P: AsRef<[f64]>>(pts: &[P]) -> Result<Ball> {
    let first = pts
        .first()
        .ok_or_else(|| Error::domain("smallest enclosing ball of an empty set"))?;
    let dim = first.as_ref().len();
    if pts.iter().any(|p| p.as_ref().len() != dim) {
        return Err(Error::domain("points of differing dimension"));
    }
    let pts: Vec<&[f64]> = pts.iter().map(|p| p.as_ref()).collect();
    if pts.len() == 1 {
        return Ok(Ball {
            center: pts[0].to_vec(),
            radius: 0.0,
        });
    }

    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(WELZL_SEED));
    let search = Mtf { pts: &pts, dim };
    let mut boundary = Vec::with_capacity(dim + 1);
    let found = search
        .run(&mut order, pts.len(), &mut boundary)
        .expect("non-empty input always yields a ball");

    let mut support = found.support;
    support.sort_by(|&a, &b| lex_cmp(pts[a], pts[b]));
    let support_pts: Vec<&[f64]> = support.iter().map(|&i| pts[i]).collect();
    let center = circumcenter(&support_pts);
    let radius = pts.iter().map(|p| distance(p, &center)).fold(0.0, f64::max);
    Ok(Ball { center, radius })
}

pub fn min_enclosing_ball_radius<P: AsRef<[f64]>>(pts: &[P]) -> Result<f64> {
    min_enclosing_ball(pts).map(|b| b.radius)
}

struct Candidate {
    center: Vec<f64>,
    radius: f64,
    support: Vec<usize>,
}

impl Candidate {
    fn contains(&self, p: &[f64]) -> bool {
        distance(p, &self.center) <= self.radius + GEOMETRY_EPS
    }
}

struct Mtf<'a> {
    pts: &'a [&'a [f64]],
    dim: usize,
}

impl Mtf<'_> {
    fn run(&self, order: &mut [usize], end: usize, boundary: &mut Vec<usize>) -> Option<Candidate> {
        let mut ball = self.boundary_ball(boundary);
        if boundary.len() == self.dim + 1 {
            return ball;
        }
        for i in 0..end {
            let p = order[i];
            if ball.as_ref().is_some_and(|b| b.contains(self.pts[p])) {
                continue;
            }
            boundary.push(p);
            ball = self.run(order, i, boundary);
            boundary.pop();
            order[..=i].rotate_right(1);
        }
        ball
    }

    fn boundary_ball(&self, boundary: &[usize]) -> Option<Candidate> {
        if boundary.is_empty() {
            return None;
        }
        let pts: Vec<&[f64]> = boundary.iter().map(|&i| self.pts[i]).collect();
        let center = circumcenter(&pts);
        let radius = distance(pts[0], &center);
        Some(Candidate {
            center,
            radius,
            support: boundary.to_vec(),
        })
    }
}

/// Center of the smallest sphere through `pts` lying in their affine hull.
///
/// Affinely dependent inputs fall back to the midpoint of the farthest pair.
pub(crate) fn circumcenter(pts: &[&[f64]]) -> Vec<f64> {
    let p0 = pts[0];
    if pts.len() == 1 {
        return p0.to_vec();
    }
    let m = pts.len() - 1;
    let dirs: Vec<Vec<f64>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let gram = DMatrix::from_fn(m, m, |j, k| 2.0 * dot(&dirs[j], &dirs[k]));
    let rhs = DVector::from_fn(m, |j, _| dot(&dirs[j], &dirs[j]));
    let solved = solve(gram, rhs).map(|alpha| {
        let mut c = p0.to_vec();
        for (a, d) in alpha.iter().zip(&dirs) {
            for (ci, di) in c.iter_mut().zip(d) {
                *ci += a * di;
            }
        }
        c
    });
    match solved {
        Some(c) => c,
        None => farthest_pair_midpoint(pts),
    }
}

/// LU solve that rejects singular or numerically degenerate systems.
pub(crate) fn solve(a: DMatrix<f64>, b: DVector<f64>) -> Option<DVector<f64>> {
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let n = a.nrows();
    let lu = a.lu();
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if min_pivot <= 1e-12 * scale {
        return None;
    }
    lu.solve(&b).filter(|x| x.iter().all(|v| v.is_finite()))
}

fn farthest_pair_midpoint(pts: &[&[f64]]) -> Vec<f64> {
    let mut best = (0, 0, -1.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = distance(pts[i], pts[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    pts[best.0]
        .iter()
        .zip(pts[best.1])
        .map(|(a, b)| 0.5 * (a + b))
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(pts: &[&[f64]]) -> MarkedPointCloud {
        MarkedPointCloud::from_coords(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let a = cloud(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        let p = cloud(&[&[0.0, 0.0]]);
        let q = cloud(&[&[3.0, 4.0]]);
        assert_eq!(hausdorff_distance(&p, &q).unwrap(), 5.0);
        // sup over a of dist to b = 1, sup over b of dist to a = 0
        assert_eq!(hausdorff_distance(&a, &p).unwrap(), 1.0);
    }

    #[test]
    fn hausdorff_errors() {
        let a = cloud(&[&[0.0, 0.0]]);
        let b = cloud(&[&[0.0, 0.0, 0.0]]);
        assert!(matches!(hausdorff_distance(&a, &b), Err(Error::Domain(_))));
        assert!(matches!(
            hausdorff_distance(&a, &MarkedPointCloud::empty(2)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn min_separation_examples() {
        assert_eq!(
            min_separation(&cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[5.0, 0.0]])).unwrap(),
            1.0
        );
        let square = cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(min_separation(&square).unwrap(), 1.0);
        assert_eq!(
            min_separation(&cloud(&[&[0.0, 0.0], &[0.25, 0.0], &[1.0, 1.0]])).unwrap(),
            0.25
        );
        assert!(min_separation(&cloud(&[&[0.0]])).is_err());
    }

    #[test]
    fn enclosing_ball_examples() {
        assert_eq!(min_enclosing_ball_radius(&[[2.0, 3.0]]).unwrap(), 0.0);
        assert_eq!(min_enclosing_ball_radius(&[[0.0, 0.0], [2.0, 0.0]]).unwrap(), 1.0);
        let h = 3f64.sqrt() / 2.0;
        let r = min_enclosing_ball_radius(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
        assert!((r - 0.577_350_269_189_625_8).abs() < 1e-12);
        let empty: [[f64; 2]; 0] = [];
        assert!(min_enclosing_ball_radius(&empty).is_err());
    }

    #[test]
    fn enclosing_ball_ignores_interior_and_collinear_points() {
        let r = min_enclosing_ball_radius(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 0.1]]).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_simple_cloud_rejected() {
        let err = MarkedPointCloud::from_coords(vec![vec![1.0, 2.0], vec![0.0, 0.0], vec![1.0, 2.0]]);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn marks_are_validated() {
        let pts = vec![MarkedPoint::new(vec![0.0], 2.0)];
        assert!(MarkedPointCloud::new(pts.clone(), 1, 1.0).is_err());
        assert!(MarkedPointCloud::new(pts, 1, 2.0).is_ok());
        let neg = vec![MarkedPoint::new(vec![0.0], -0.5)];
        assert!(MarkedPointCloud::from_points(neg).is_err());
    }
}
