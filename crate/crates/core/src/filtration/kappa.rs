use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{self, distance, dot, MarkedPointCloud};

/// A filtration function κ on finite vertex sets of a marked point cloud.
///
/// Implementations must be monotone (faces never exceed cofaces),
/// invariant under translations of the coordinates, and regular in the sense
/// that `‖x − y‖ ≤ ρ(κ({x, y}))` for the declared [`regularity`](Self::regularity).
pub trait FiltrationFunction: Send + Sync + fmt::Debug {
    /// Identifier accepted by [`parse_kappa`].
    fn name(&self) -> String;

    /// κ of the simplex spanned by `vertices` (indices into `cloud`).
    fn eval(&self, cloud: &MarkedPointCloud, vertices: &[usize]) -> f64;

    /// Hausdorff-Lipschitz constant, when κ depends only on the coordinates.
    fn lipschitz(&self) -> Option<f64>;

    /// The increasing function ρ, for a cloud with mark bound `r0`.
    fn regularity(&self, t: f64, r0: f64) -> f64;
}

fn gather<'a>(cloud: &'a MarkedPointCloud, vertices: &[usize], marked: bool) -> (Vec<&'a [f64]>, Vec<f64>) {
    let coords = vertices.iter().map(|&v| cloud.coords(v)).collect();
    let marks = vertices
        .iter()
        .map(|&v| if marked { cloud.mark(v) } else { 0.0 })
        .collect();
    (coords, marks)
}

/// Marked Rips value: max over vertex pairs of `(‖x_i − x_j‖ − r_i − r_j)^+`.
///
/// Singletons give 0; with zero marks this is the diameter.
pub fn kappa_rips<P: AsRef<[f64]>>(coords: &[P], marks: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            let d = distance(coords[i].as_ref(), coords[j].as_ref()) - (marks[i] + marks[j]);
            best = best.max(d);
        }
    }
    best
}

/// Marked Čech value: `inf_w max_i (‖x_i − w‖ − r_i)^+`.
///
/// Zero or equal marks reduce to the smallest enclosing ball. Unequal marks are
/// solved exactly by enumerating support sets, see [`weighted_minimax`].
pub fn kappa_cech<P: AsRef<[f64]>>(coords: &[P], marks: &[f64]) -> f64 {
    assert!(!coords.is_empty(), "kappa of an empty simplex");
    let m0 = marks[0];
    if marks.iter().all(|&m| m == m0) {
        let r = geometry::min_enclosing_ball_radius(coords).expect("non-empty simplex");
        return (r - m0).max(0.0);
    }
    weighted_minimax(coords, marks).max(0.0)
}

/// `min_w max_i (‖x_i − w‖ − r_i)`, without the positive-part clamp.
///
/// The objective is convex, and at an optimum `w*` the active constraints
/// contain a set `S` of at most `N + 1` affinely independent points with
/// `w* ∈ conv(S)`. For each candidate `S` the equations
/// `‖x_k − w‖ = R + r_k` with `w ∈ aff(S)` are linear in `w` given `R`,
/// leaving a quadratic in `R`. Every resulting `w` is evaluated on the whole
/// simplex and the minimum is returned; since each evaluation is an upper
/// bound and the optimum is among the candidates, the minimum is exact.
pub fn weighted_minimax<P: AsRef<[f64]>>(coords: &[P], marks: &[f64]) -> f64 {
    // lexicographic order makes the result independent of the input order
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_by(|&a, &b| geometry::lex_cmp(coords[a].as_ref(), coords[b].as_ref()));
    let pts: Vec<&[f64]> = order.iter().map(|&i| coords[i].as_ref()).collect();
    let marks: Vec<f64> = order.iter().map(|&i| marks[i]).collect();
    let marks = marks.as_slice();
    let dim = pts[0].len();
    let objective = |w: &[f64]| {
        pts.iter()
            .zip(marks)
            .map(|(p, r)| distance(p, w) - r)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = f64::INFINITY;
    let max_support = (dim + 1).min(pts.len());
    let mut subset = Vec::with_capacity(max_support);
    for size in 1..=max_support {
        for_each_subset(pts.len(), size, &mut subset, &mut |s| {
            for w in support_centers(&pts, marks, s) {
                best = best.min(objective(&w));
            }
        });
    }
    best
}

fn for_each_subset(n: usize, size: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == size {
        f(cur);
        return;
    }
    let start = cur.last().map_or(0, |&l| l + 1);
    for i in start..n {
        if n - i < size - cur.len() {
            break;
        }
        cur.push(i);
        for_each_subset(n, size, cur, f);
        cur.pop();
    }
}

fn support_centers(pts: &[&[f64]], marks: &[f64], s: &[usize]) -> Vec<Vec<f64>> {
    let p0 = pts[s[0]];
    let r0 = marks[s[0]];
    if s.len() == 1 {
        return vec![p0.to_vec()];
    }
    let m = s.len() - 1;
    let dirs: Vec<Vec<f64>> = s[1..]
        .iter()
        .map(|&i| pts[i].iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let gram = DMatrix::from_fn(m, m, |j, k| dot(&dirs[j], &dirs[k]));
    // Gram · α = (a − R b) / 2
    let a = DVector::from_fn(m, |j, _| {
        let rk = marks[s[j + 1]];
        dot(&dirs[j], &dirs[j]) - rk * rk + r0 * r0
    });
    let b = DVector::from_fn(m, |j, _| 2.0 * (marks[s[j + 1]] - r0));
    let Some(alpha0) = geometry::solve(gram.clone(), a.map(|v| 0.5 * v)) else {
        return Vec::new();
    };
    let Some(alpha1) = geometry::solve(gram, b.map(|v| -0.5 * v)) else {
        return Vec::new();
    };
    let combine = |alpha: &DVector<f64>| -> Vec<f64> {
        let mut u = vec![0.0; p0.len()];
        for (al, d) in alpha.iter().zip(&dirs) {
            for (ui, di) in u.iter_mut().zip(d) {
                *ui += al * di;
            }
        }
        u
    };
    let u0 = combine(&alpha0);
    let u1 = combine(&alpha1);
    // ‖u0 + R u1‖² = (R + r0)²
    let qa = dot(&u1, &u1) - 1.0;
    let qb = 2.0 * (dot(&u0, &u1) - r0);
    let qc = dot(&u0, &u0) - r0 * r0;
    let mut roots = Vec::with_capacity(2);
    if qa.abs() < 1e-12 {
        if qb.abs() > 1e-15 {
            roots.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            roots.push((-qb + sq) / (2.0 * qa));
            roots.push((-qb - sq) / (2.0 * qa));
        } else if disc > -1e-12 * (qb * qb).max(1.0) {
            roots.push(-qb / (2.0 * qa));
        }
    }
    roots
        .into_iter()
        .filter(|r| r.is_finite() && s.iter().all(|&i| r + marks[i] >= -1e-12))
        .map(|r| {
            p0.iter()
                .zip(u0.iter().zip(&u1))
                .map(|(p, (a, b))| p + a + r * b)
                .collect()
        })
        .collect()
}

/// Vietoris–Rips filtration function, optionally reading the marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rips {
    pub marked: bool,
}

impl FiltrationFunction for Rips {
    fn name(&self) -> String {
        if self.marked { "rips-marked" } else { "rips" }.to_string()
    }

    fn eval(&self, cloud: &MarkedPointCloud, vertices: &[usize]) -> f64 {
        let (coords, marks) = gather(cloud, vertices, self.marked);
        kappa_rips(&coords, &marks)
    }

    fn lipschitz(&self) -> Option<f64> {
        (!self.marked).then_some(2.0)
    }

    fn regularity(&self, t: f64, r0: f64) -> f64 {
        if self.marked {
            t + 2.0 * r0
        } else {
            t
        }
    }
}

/// Čech filtration function, optionally reading the marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cech {
    pub marked: bool,
}

impl FiltrationFunction for Cech {
    fn name(&self) -> String {
        if self.marked { "cech-marked" } else { "cech" }.to_string()
    }

    fn eval(&self, cloud: &MarkedPointCloud, vertices: &[usize]) -> f64 {
        let (coords, marks) = gather(cloud, vertices, self.marked);
        kappa_cech(&coords, &marks)
    }

    fn lipschitz(&self) -> Option<f64> {
        (!self.marked).then_some(1.0)
    }

    fn regularity(&self, t: f64, r0: f64) -> f64 {
        if self.marked {
            2.0 * t + 2.0 * r0
        } else {
            2.0 * t
        }
    }
}

/// κ^{k,t}: adds `t` to the value of every simplex of dimension greater than `k`.
#[derive(Debug)]
pub struct Shift {
    base: Box<dyn FiltrationFunction>,
    k: usize,
    t: f64,
}

impl Shift {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn base(&self) -> &dyn FiltrationFunction {
        self.base.as_ref()
    }
}

pub fn shift_kappa(base: Box<dyn FiltrationFunction>, k: usize, t: f64) -> Result<Shift> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("shift amount t = {t} must be finite and >= 0")));
    }
    Ok(Shift { base, k, t })
}

impl FiltrationFunction for Shift {
    fn name(&self) -> String {
        format!("shift({},{},{})", self.base.name(), self.k, self.t)
    }

    fn eval(&self, cloud: &MarkedPointCloud, vertices: &[usize]) -> f64 {
        let v = self.base.eval(cloud, vertices);
        if vertices.len() - 1 <= self.k {
            v
        } else {
            v + self.t
        }
    }

    fn lipschitz(&self) -> Option<f64> {
        None
    }

    fn regularity(&self, t: f64, r0: f64) -> f64 {
        self.base.regularity(t, r0)
    }
}

/// Parses `rips | cech | rips-marked | cech-marked | shift(<base>,k,t)`.
pub fn parse_kappa(spec: &str) -> Result<Box<dyn FiltrationFunction>> {
    let spec = spec.trim();
    match spec {
        "rips" => return Ok(Box::new(Rips { marked: false })),
        "rips-marked" => return Ok(Box::new(Rips { marked: true })),
        "cech" => return Ok(Box::new(Cech { marked: false })),
        "cech-marked" => return Ok(Box::new(Cech { marked: true })),
        _ => {}
    }
    let bad = || Error::domain(format!("unknown filtration function `{spec}`"));
    let inner = spec
        .strip_prefix("shift(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(bad)?;
    let mut parts = inner.rsplitn(3, ',');
    let t = parts.next().ok_or_else(bad)?.trim();
    let k = parts.next().ok_or_else(bad)?.trim();
    let base = parts.next().ok_or_else(bad)?;
    let k: usize = k
        .parse()
        .map_err(|_| Error::domain(format!("shift degree `{k}` is not an integer >= 0")))?;
    let t: f64 = t
        .parse()
        .map_err(|_| Error::domain(format!("shift amount `{t}` is not a number")))?;
    Ok(Box::new(shift_kappa(parse_kappa(base)?, k, t)?))
}
