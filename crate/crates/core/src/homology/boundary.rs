use std::ops::RangeInclusive;

use crate::filtration::FilteredComplex;
use crate::homology::Field;

/// Sparse column: `(row, coefficient)` entries sorted by row, coefficients nonzero.
pub type Column = Vec<(usize, u32)>;

/// Boundary matrix of a filtered complex in filtration order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    field: Field,
    columns: Vec<Column>,
}

impl BoundaryMatrix {
    /// Builds the matrix from raw columns. Panics if a column references a row
    /// at or after its own index, or holds an unsorted or zero entry.
    pub fn new(field: Field, columns: Vec<Column>) -> Self {
        let p = field.characteristic();
        for (j, col) in columns.iter().enumerate() {
            assert!(col.windows(2).all(|w| w[0].0 < w[1].0), "column {j} is not sorted");
            assert!(
                col.iter().all(|&(i, c)| i < j && c % p != 0),
                "column {j} is not strictly upper triangular"
            );
        }
        Self { field, columns }
    }

    /// Full boundary matrix of `fc`.
    pub fn from_complex(fc: &FilteredComplex, field: Field) -> Self {
        Self::from_complex_dims(fc, field, 0..=fc.max_dim())
    }

    /// Boundary matrix keeping only the columns of simplices whose dimension is in
    /// `dims`; other columns are left empty.
    pub fn from_complex_dims(fc: &FilteredComplex, field: Field, dims: RangeInclusive<usize>) -> Self {
        let columns = fc
            .simplices()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                if !dims.contains(&s.dim()) {
                    return Vec::new();
                }
                let mut col: Column = fc
                    .facet_positions(j)
                    .into_iter()
                    .enumerate()
                    .map(|(skip, row)| (row, field.sign(skip)))
                    .collect();
                col.sort_unstable_by_key(|e| e.0);
                col
            })
            .collect();
        Self { field, columns }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// Result of the standard left-to-right column reduction.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// `low[j]`: lowest nonzero row of reduced column `j`, if any.
    pub low: Vec<Option<usize>>,
    /// Reduced columns.
    pub reduced: Vec<Column>,
}

impl Reduction {
    /// `(birth, death)` index pairs `(low(j), j)`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.low.iter().enumerate().filter_map(|(j, l)| l.map(|i| (i, j)))
    }

    /// Indices that are neither a pivot row nor have a nonzero reduced column.
    pub fn essential(&self) -> Vec<usize> {
        let mut killed = vec![false; self.low.len()];
        for (i, _) in self.pairs() {
            killed[i] = true;
        }
        (0..self.low.len())
            .filter(|&j| self.low[j].is_none() && !killed[j])
            .collect()
    }
}

/// `target -= factor · source` over the field, merging sorted sparse columns.
fn axpy(field: Field, target: &Column, factor: u32, source: &Column) -> Column {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut a, mut b) = (0, 0);
    while a < target.len() || b < source.len() {
        let ra = target.get(a).map_or(usize::MAX, |e| e.0);
        let rb = source.get(b).map_or(usize::MAX, |e| e.0);
        if ra < rb {
            out.push(target[a]);
            a += 1;
        } else if rb < ra {
            out.push((rb, field.neg(field.mul(factor, source[b].1))));
            b += 1;
        } else {
            let c = field.sub(target[a].1, field.mul(factor, source[b].1));
            if c != 0 {
                out.push((ra, c));
            }
            a += 1;
            b += 1;
        }
    }
    out
}

/// Standard column reduction without clearing or twist.
pub fn reduce(bm: &BoundaryMatrix) -> Reduction {
    let field = bm.field;
    let n = bm.columns.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut low = vec![None; n];
    let mut reduced: Vec<Column> = Vec::with_capacity(n);
    for j in 0..n {
        let mut col = bm.columns[j].clone();
        while let Some(&(pivot, coeff)) = col.last() {
            let Some(k) = owner[pivot] else { break };
            let other: &Column = &reduced[k];
            let factor = field.mul(coeff, field.inv(other.last().unwrap().1));
            col = axpy(field, &col, factor, other);
        }
        if let Some(&(pivot, _)) = col.last() {
            owner[pivot] = Some(j);
            low[j] = Some(pivot);
        }
        reduced.push(col);
    }
    Reduction { low, reduced }
}
