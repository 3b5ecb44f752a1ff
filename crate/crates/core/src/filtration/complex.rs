use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::filtration::FiltrationFunction;
use crate::geometry::MarkedPointCloud;

/// Default cap on the number of simplex records a single construction may emit.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    /// Strictly increasing vertex indices into the source cloud.
    pub vertices: Vec<usize>,
    pub kappa: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Canonical filtration order: κ, then dimension, then vertex tuple.
fn filtration_cmp(a: &Simplex, b: &Simplex) -> Ordering {
    a.kappa
        .total_cmp(&b.kappa)
        .then(a.vertices.len().cmp(&b.vertices.len()))
        .then_with(|| a.vertices.cmp(&b.vertices))
}

/// Sublevel complex `{σ : κ(σ) ≤ t_max}` restricted to dimension `≤ max_dim`,
/// stored in canonical filtration order.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    n_vertices: usize,
    simplices: Vec<Simplex>,
    t_max: f64,
    max_dim: usize,
    index: HashMap<Vec<usize>, usize>,
}

impl FilteredComplex {
    /// Size of the vertex set of the source cloud.
    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Largest simplex dimension enumerated.
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Largest homology degree whose diagram this complex determines.
    pub fn q_max(&self) -> Option<usize> {
        self.max_dim.checked_sub(1)
    }

    /// Position of the simplex with these (sorted) vertices.
    pub fn position(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    /// Positions of the facets of simplex `i`, in the order obtained by
    /// deleting vertex 0, 1, ... in turn.
    pub fn facet_positions(&self, i: usize) -> Vec<usize> {
        let v = &self.simplices[i].vertices;
        if v.len() == 1 {
            return Vec::new();
        }
        let mut facet = Vec::with_capacity(v.len() - 1);
        (0..v.len())
            .map(|skip| {
                facet.clear();
                facet.extend(v.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &x)| x));
                self.index[facet.as_slice()]
            })
            .collect()
    }

    pub fn count_dim(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == dim).count()
    }

    /// Whether every face precedes its cofaces and κ is nondecreasing along the order.
    pub fn is_valid_filtration(&self) -> bool {
        let sorted = self.simplices.windows(2).all(|w| w[0].kappa <= w[1].kappa);
        let closed = (0..self.simplices.len()).all(|i| {
            self.simplices[i].vertices.len() == 1
                || self
                    .facet_positions_checked(i)
                    .is_some_and(|f| f.iter().all(|&j| j < i))
        });
        sorted && closed && self.simplices.iter().all(|s| s.kappa <= self.t_max)
    }

    fn facet_positions_checked(&self, i: usize) -> Option<Vec<usize>> {
        let v = &self.simplices[i].vertices;
        (0..v.len())
            .map(|skip| {
                let facet: Vec<usize> = v
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &x)| x)
                    .collect();
                self.index.get(&facet).copied()
            })
            .collect()
    }
}

/// Sublevel complex for diagrams up to degree `q_max` (simplices up to dimension `q_max + 1`).
pub fn build_filtered_complex(
    x: &MarkedPointCloud,
    kappa: &dyn FiltrationFunction,
    q_max: usize,
    t_max: f64,
) -> Result<FilteredComplex> {
    build_skeleton(x, kappa, q_max + 1, t_max, DEFAULT_SIMPLEX_BUDGET)
}

/// Enumerates every simplex of dimension `≤ max_dim` with `κ ≤ t_max`.
///
/// Expansion is edge-pruned: a candidate simplex is only evaluated when all
/// of its facets were accepted, which loses nothing because κ is monotone.
/// Stored values are the maximum of κ and the facet values, which is the
/// identity for a monotone κ and keeps float round-off from breaking the
/// face order.
pub fn build_skeleton(
    x: &MarkedPointCloud,
    kappa: &dyn FiltrationFunction,
    max_dim: usize,
    t_max: f64,
    budget: usize,
) -> Result<FilteredComplex> {
    if t_max.is_nan() || t_max < 0.0 {
        return Err(Error::domain(format!("t_max = {t_max} must be >= 0")));
    }
    let accept = |v: f64| v.is_finite() && v <= t_max;
    let n = x.len();
    let mut total = 0usize;
    let mut charge = |count: usize, dim: usize| -> Result<()> {
        total += count;
        if total > budget {
            Err(Error::Budget { dim, budget })
        } else {
            Ok(())
        }
    };

    let mut levels: Vec<Vec<Simplex>> = Vec::with_capacity(max_dim + 1);
    let vertices: Vec<Simplex> = (0..n)
        .map(|i| Simplex {
            vertices: vec![i],
            kappa: kappa.eval(x, &[i]),
        })
        .filter(|s| accept(s.kappa))
        .collect();
    charge(vertices.len(), 0)?;
    let mut vertex_kappa = vec![None; n];
    for s in &vertices {
        vertex_kappa[s.vertices[0]] = Some(s.kappa);
    }
    levels.push(vertices);

    // upper neighbours, sorted
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    if max_dim >= 1 {
        let mut edges = Vec::new();
        for i in 0..n {
            let Some(ki) = vertex_kappa[i] else { continue };
            for j in i + 1..n {
                let Some(kj) = vertex_kappa[j] else { continue };
                let v = kappa.eval(x, &[i, j]).max(ki).max(kj);
                if accept(v) {
                    adjacency[i].push(j);
                    edges.push(Simplex {
                        vertices: vec![i, j],
                        kappa: v,
                    });
                    charge(1, 1)?;
                }
            }
        }
        levels.push(edges);
    }

    for dim in 2..=max_dim {
        let prev = &levels[dim - 1];
        let lookup: HashMap<&[usize], f64> = prev.iter().map(|s| (s.vertices.as_slice(), s.kappa)).collect();
        let mut next = Vec::new();
        let mut candidate = Vec::with_capacity(dim + 1);
        let mut facet = Vec::with_capacity(dim);
        for s in prev {
            let last = *s.vertices.last().unwrap();
            'cand: for &v in &adjacency[s.vertices[0]] {
                if v <= last {
                    continue;
                }
                candidate.clear();
                candidate.extend_from_slice(&s.vertices);
                candidate.push(v);
                let mut facet_max = s.kappa;
                // facets other than `s` itself contain v
                for skip in 0..dim {
                    facet.clear();
                    facet.extend(
                        candidate
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != skip)
                            .map(|(_, &u)| u),
                    );
                    match lookup.get(facet.as_slice()) {
                        Some(&k) => facet_max = facet_max.max(k),
                        None => continue 'cand,
                    }
                }
                let value = kappa.eval(x, &candidate).max(facet_max);
                if accept(value) {
                    next.push(Simplex {
                        vertices: candidate.clone(),
                        kappa: value,
                    });
                    charge(1, dim)?;
                }
            }
        }
        levels.push(next);
    }

    let mut simplices: Vec<Simplex> = levels.into_iter().flatten().collect();
    simplices.sort_by(filtration_cmp);
    let index = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.clone(), i))
        .collect();
    Ok(FilteredComplex {
        n_vertices: n,
        simplices,
        t_max,
        max_dim,
        index,
    })
}
