//! Verbose diagrams of filtered complexes, rank oracles and extended
//! persistent Betti numbers.
//!
//! The verbose diagram is read off the pairing of the standard column
//! reduction: every `(q, q+1)` pair `(σ, τ)` contributes `(κ(σ), κ(τ))`,
//! including zero-lifetime pairs, and every unpaired positive `q`-simplex
//! contributes `(κ(σ), ∞)`. Deaths beyond the truncation threshold of the
//! complex therefore show up as `∞`.
//!
//! The rank functions ([`cycle_dim`], [`boundary_dim`], [`epbn_rank`]) use
//! dense Gaussian elimination and never look at the reduction pairing, so
//! they can serve as an oracle for it.

mod boundary;
mod field;
pub mod linalg;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use boundary::{reduce, BoundaryMatrix, Column, Reduction};
pub use field::Field;

use crate::error::{Error, Result};
use crate::filtration::FilteredComplex;

/// A point of `Δ' = {0 ≤ b ≤ d ≤ ∞} \ {(∞, ∞)}`; `death = f64::INFINITY` encodes ∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_diagonal(&self) -> bool {
        self.birth == self.death
    }

    fn validate(&self) -> Result<()> {
        let ok = self.birth.is_finite() && self.birth >= 0.0 && !self.death.is_nan() && self.birth <= self.death;
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "({}, {}) is not a point of Δ'",
                self.birth, self.death
            )))
        }
    }

    fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.death.total_cmp(&other.death))
    }
}

/// Degree-`q` verbose diagram. Points are kept sorted by `(birth, death)` so that
/// multiset equality is plain `==`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerboseDiagram {
    q: usize,
    t_max: f64,
    points: Vec<DiagramPoint>,
}

impl VerboseDiagram {
    pub fn new(q: usize, t_max: f64, mut points: Vec<DiagramPoint>) -> Result<Self> {
        for p in &points {
            p.validate()?;
        }
        points.sort_by(DiagramPoint::canonical_cmp);
        Ok(Self { q, t_max, points })
    }

    pub fn empty(q: usize, t_max: f64) -> Self {
        Self {
            q,
            t_max,
            points: Vec::new(),
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Truncation threshold of the source complex; deaths reported as ∞ only
    /// mean "later than `t_max`".
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points in `[0, r] × (s, ∞]`.
    pub fn count_region(&self, r: f64, s: f64) -> usize {
        self.points.iter().filter(|p| p.birth <= r && p.death > s).count()
    }
}

/// Reduction pairing of a whole complex, from which diagrams in every degree
/// `≤ q_max` are read.
#[derive(Debug, Clone)]
pub struct Persistence {
    reduction: Reduction,
    q_max: Option<usize>,
    t_max: f64,
}

impl Persistence {
    pub fn compute(fc: &FilteredComplex, field: Field) -> Self {
        let bm = BoundaryMatrix::from_complex(fc, field);
        Self {
            reduction: reduce(&bm),
            q_max: fc.q_max(),
            t_max: fc.t_max(),
        }
    }

    pub fn reduction(&self) -> &Reduction {
        &self.reduction
    }

    pub fn diagram(&self, fc: &FilteredComplex, q: usize) -> Result<VerboseDiagram> {
        check_degree(self.q_max, q)?;
        let simplices = fc.simplices();
        let mut points: Vec<DiagramPoint> = self
            .reduction
            .pairs()
            .filter(|&(i, _)| simplices[i].dim() == q)
            .map(|(i, j)| DiagramPoint::new(simplices[i].kappa, simplices[j].kappa))
            .collect();
        points.extend(
            self.reduction
                .essential()
                .into_iter()
                .filter(|&i| simplices[i].dim() == q)
                .map(|i| DiagramPoint::new(simplices[i].kappa, f64::INFINITY)),
        );
        VerboseDiagram::new(q, self.t_max, points)
    }
}

fn check_degree(q_max: Option<usize>, q: usize) -> Result<()> {
    match q_max {
        Some(m) if q <= m => Ok(()),
        _ => Err(Error::domain(format!(
            "degree {q} exceeds the largest degree supported by the complex ({})",
            q_max.map_or("none".to_string(), |m| m.to_string())
        ))),
    }
}

/// Degree-`q` verbose diagram over F2.
pub fn verbose_diagram(fc: &FilteredComplex, q: usize) -> Result<VerboseDiagram> {
    verbose_diagram_over(fc, q, Field::F2)
}

pub fn verbose_diagram_over(fc: &FilteredComplex, q: usize, field: Field) -> Result<VerboseDiagram> {
    check_degree(fc.q_max(), q)?;
    let bm = BoundaryMatrix::from_complex_dims(fc, field, q..=q + 1);
    let p = Persistence {
        reduction: reduce(&bm),
        q_max: fc.q_max(),
        t_max: fc.t_max(),
    };
    p.diagram(fc, q)
}

/// Diagrams in every degree `0..=q_max` from a single reduction.
pub fn verbose_diagrams(fc: &FilteredComplex, field: Field) -> Result<Vec<VerboseDiagram>> {
    let Some(q_max) = fc.q_max() else { return Ok(Vec::new()) };
    let p = Persistence::compute(fc, field);
    (0..=q_max).map(|q| p.diagram(fc, q)).collect()
}

/// Number of points in the degree-`q` verbose diagram, i.e. the number of
/// positive `q`-simplices. Only needs the `q`-skeleton.
pub fn diagram_cardinality(fc: &FilteredComplex, q: usize, field: Field) -> Result<usize> {
    if q > fc.max_dim() {
        return Err(Error::domain(format!(
            "degree {q} exceeds the skeleton dimension {}",
            fc.max_dim()
        )));
    }
    let bm = BoundaryMatrix::from_complex_dims(fc, field, q..=q);
    let r = reduce(&bm);
    Ok(fc
        .simplices()
        .iter()
        .zip(&r.reduced)
        .filter(|(s, col)| s.dim() == q && col.is_empty())
        .count())
}

/// Points with strictly positive lifetime.
pub fn concise_diagram(vd: &VerboseDiagram) -> VerboseDiagram {
    VerboseDiagram {
        q: vd.q,
        t_max: vd.t_max,
        points: vd.points.iter().copied().filter(|p| p.death > p.birth).collect(),
    }
}

/// `(q, r, s)` for `β_q^{r,s}`; `r > s` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedPbnQuery {
    pub q: usize,
    pub r: f64,
    pub s: f64,
}

impl ExtendedPbnQuery {
    pub fn new(q: usize, r: f64, s: f64) -> Result<Self> {
        for (name, v) in [("r", r), ("s", s)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        Ok(Self { q, r, s })
    }
}

fn check_threshold(t: f64, t_max: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("threshold {t} must be >= 0")));
    }
    if t > t_max {
        return Err(Error::domain(format!(
            "threshold {t} exceeds the truncation threshold {t_max}"
        )));
    }
    Ok(())
}

/// Dense boundary columns of `∂_dim` restricted to `dim`-simplices with κ ≤ t,
/// in coordinates of all `(dim−1)`-simplices of the complex.
fn restricted_boundary(fc: &FilteredComplex, dim: usize, t: f64, field: Field) -> (Vec<Vec<u32>>, usize) {
    let rows = coordinate_index(fc, dim - 1);
    let cols = fc
        .simplices()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.dim() == dim && s.kappa <= t)
        .map(|(j, _)| {
            let mut v = vec![0u32; rows.len()];
            for (skip, f) in fc.facet_positions(j).into_iter().enumerate() {
                v[rows[&f]] = field.sign(skip);
            }
            v
        })
        .collect();
    (cols, rows.len())
}

/// Map from complex position to coordinate index among the simplices of `dim`.
fn coordinate_index(fc: &FilteredComplex, dim: usize) -> HashMap<usize, usize> {
    fc.simplices()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.dim() == dim)
        .enumerate()
        .map(|(k, (pos, _))| (pos, k))
        .collect()
}

/// Cycle basis of `Z_q(K_t)` in coordinates of all `q`-simplices.
fn cycle_basis(fc: &FilteredComplex, q: usize, t: f64, field: Field) -> Vec<Vec<u32>> {
    let coords = coordinate_index(fc, q);
    let members: Vec<usize> = fc
        .simplices()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.dim() == q && s.kappa <= t)
        .map(|(pos, _)| coords[&pos])
        .collect();
    let embed = |local: Vec<u32>| {
        let mut v = vec![0u32; coords.len()];
        for (k, x) in local.into_iter().enumerate() {
            v[members[k]] = x;
        }
        v
    };
    if q == 0 {
        return (0..members.len())
            .map(|k| {
                let mut e = vec![0u32; members.len()];
                e[k] = 1;
                embed(e)
            })
            .collect();
    }
    let (cols, nrows) = restricted_boundary(fc, q, t, field);
    linalg::null_space(&cols, nrows, field).into_iter().map(embed).collect()
}

/// `dim Z_q(K_t)` over F2.
pub fn cycle_dim(fc: &FilteredComplex, q: usize, t: f64) -> Result<usize> {
    cycle_dim_over(fc, q, t, Field::F2)
}

pub fn cycle_dim_over(fc: &FilteredComplex, q: usize, t: f64, field: Field) -> Result<usize> {
    check_threshold(t, fc.t_max())?;
    if q > fc.max_dim() {
        return Err(Error::domain(format!(
            "degree {q} exceeds the skeleton dimension {}",
            fc.max_dim()
        )));
    }
    let n_q = fc.simplices().iter().filter(|s| s.dim() == q && s.kappa <= t).count();
    if q == 0 {
        return Ok(n_q);
    }
    let (cols, nrows) = restricted_boundary(fc, q, t, field);
    Ok(n_q - linalg::rank(&cols, nrows, field))
}

/// `dim B_q(K_t)` over F2.
pub fn boundary_dim(fc: &FilteredComplex, q: usize, t: f64) -> Result<usize> {
    boundary_dim_over(fc, q, t, Field::F2)
}

pub fn boundary_dim_over(fc: &FilteredComplex, q: usize, t: f64, field: Field) -> Result<usize> {
    check_threshold(t, fc.t_max())?;
    check_degree(fc.q_max(), q)?;
    let (cols, nrows) = restricted_boundary(fc, q + 1, t, field);
    Ok(linalg::rank(&cols, nrows, field))
}

/// `β_q^{r,s} = dim Z_q(K_r) − dim(Z_q(K_r) ∩ B_q(K_s))` by linear algebra, over F2.
pub fn epbn_rank(fc: &FilteredComplex, query: ExtendedPbnQuery) -> Result<usize> {
    epbn_rank_over(fc, query, Field::F2)
}

pub fn epbn_rank_over(fc: &FilteredComplex, query: ExtendedPbnQuery, field: Field) -> Result<usize> {
    let ExtendedPbnQuery { q, r, s } = query;
    check_threshold(r, fc.t_max())?;
    check_threshold(s, fc.t_max())?;
    check_degree(fc.q_max(), q)?;
    let len = fc.count_dim(q);
    let cycles = cycle_basis(fc, q, r, field);
    let (boundaries, _) = restricted_boundary(fc, q + 1, s, field);
    let dim_b = linalg::rank(&boundaries, len, field);
    let mut both = cycles;
    both.extend(boundaries);
    // dim Z − (dim Z + dim B − rank[Z | B])
    Ok(linalg::rank(&both, len, field) - dim_b)
}

/// `β_q^{r,s}` as the number of diagram points in `[0, r] × (s, ∞]`.
pub fn epbn_diagram(vd: &VerboseDiagram, query: ExtendedPbnQuery) -> Result<usize> {
    if query.q != vd.q() {
        return Err(Error::domain(format!(
            "query degree {} does not match diagram degree {}",
            query.q,
            vd.q()
        )));
    }
    check_threshold(query.r, vd.t_max())?;
    check_threshold(query.s, vd.t_max())?;
    Ok(vd.count_region(query.r, query.s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{build_filtered_complex, Rips};
    use crate::geometry::MarkedPointCloud;

    const RIPS: Rips = Rips { marked: false };

    const E: f64 = std::f64::consts::SQRT_2;

    /// Standard basis of R³: every edge has length exactly √2.
    fn equilateral() -> FilteredComplex {
        let x =
            MarkedPointCloud::from_coords(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let fc = build_filtered_complex(&x, &RIPS, 1, f64::INFINITY).unwrap();
        assert!(fc.simplices().iter().filter(|s| s.dim() >= 1).all(|s| s.kappa == E));
        fc
    }

    fn pts(v: &[(f64, f64)]) -> Vec<DiagramPoint> {
        v.iter().map(|&(b, d)| DiagramPoint::new(b, d)).collect()
    }

    #[test]
    fn equilateral_triangle_diagrams() {
        let fc = equilateral();
        let d0 = verbose_diagram(&fc, 0).unwrap();
        assert_eq!(d0.points(), pts(&[(0.0, E), (0.0, E), (0.0, f64::INFINITY)]));
        let d1 = verbose_diagram(&fc, 1).unwrap();
        assert_eq!(d1.points(), pts(&[(E, E)]));
        assert!(concise_diagram(&d1).is_empty());
    }

    #[test]
    fn two_points() {
        let x = MarkedPointCloud::from_coords(vec![vec![0.0], vec![2.5]]).unwrap();
        let fc = build_filtered_complex(&x, &RIPS, 0, f64::INFINITY).unwrap();
        let d0 = verbose_diagram(&fc, 0).unwrap();
        assert_eq!(d0.points(), pts(&[(0.0, 2.5), (0.0, f64::INFINITY)]));
    }

    #[test]
    fn degree_out_of_range() {
        let fc = equilateral();
        assert!(matches!(verbose_diagram(&fc, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn concise_examples() {
        let vd = VerboseDiagram::new(1, f64::INFINITY, pts(&[(2.0, 6.0), (4.0, 5.0), (3.0, 3.0)])).unwrap();
        assert_eq!(concise_diagram(&vd).points(), pts(&[(2.0, 6.0), (4.0, 5.0)]));
        let inf = VerboseDiagram::new(0, f64::INFINITY, pts(&[(0.0, f64::INFINITY)])).unwrap();
        assert_eq!(concise_diagram(&inf), inf);
    }

    #[test]
    fn invalid_points_rejected() {
        assert!(VerboseDiagram::new(0, 1.0, pts(&[(2.0, 1.0)])).is_err());
        assert!(VerboseDiagram::new(0, 1.0, pts(&[(f64::INFINITY, f64::INFINITY)])).is_err());
        assert!(VerboseDiagram::new(0, 1.0, pts(&[(-1.0, 1.0)])).is_err());
    }

    #[test]
    fn cycle_and_boundary_dims() {
        let fc = equilateral();
        assert_eq!(cycle_dim(&fc, 0, 0.5).unwrap(), 3);
        assert_eq!(cycle_dim(&fc, 1, E).unwrap(), 1);
        assert_eq!(cycle_dim(&fc, 1, 0.5).unwrap(), 0);
        assert_eq!(boundary_dim(&fc, 1, 0.5).unwrap(), 0);
        assert_eq!(boundary_dim(&fc, 1, E).unwrap(), 1);

        let path = MarkedPointCloud::from_coords(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let fc = build_filtered_complex(&path, &RIPS, 0, 1.0).unwrap();
        assert_eq!(boundary_dim(&fc, 0, 1.0).unwrap(), 2);
        assert!(matches!(cycle_dim(&fc, 0, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn extended_pbn_examples() {
        let fc = equilateral();
        let d0 = verbose_diagram(&fc, 0).unwrap();
        let d1 = verbose_diagram(&fc, 1).unwrap();
        let cases = [(0, 0.5, E, 1), (0, E, 0.5, 3), (1, E, E, 0)];
        for (q, r, s, expected) in cases {
            let query = ExtendedPbnQuery::new(q, r, s).unwrap();
            assert_eq!(epbn_rank(&fc, query).unwrap(), expected, "rank route {q} {r} {s}");
            let vd = if q == 0 { &d0 } else { &d1 };
            assert_eq!(epbn_diagram(vd, query).unwrap(), expected, "diagram route {q} {r} {s}");
        }
        let empty = VerboseDiagram::empty(0, f64::INFINITY);
        assert_eq!(
            epbn_diagram(&empty, ExtendedPbnQuery::new(0, 1.0, 0.0).unwrap()).unwrap(),
            0
        );
    }

    #[test]
    fn prime_field_agrees_on_triangle() {
        let fc = equilateral();
        for q in 0..=1 {
            assert_eq!(
                verbose_diagram_over(&fc, q, Field::Prime(3)).unwrap(),
                verbose_diagram(&fc, q).unwrap()
            );
        }
        let all = verbose_diagrams(&fc, Field::Prime(5)).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[1], verbose_diagram(&fc, 1).unwrap());
    }

    #[test]
    fn cardinality_from_skeleton() {
        let fc = equilateral();
        assert_eq!(diagram_cardinality(&fc, 0, Field::F2).unwrap(), 3);
        assert_eq!(diagram_cardinality(&fc, 1, Field::F2).unwrap(), 1);
    }
}
