//! Dense Gaussian elimination over F2 (bit-packed) and F_p.
//!
//! Independent of the sparse column reduction; used as the rank oracle for
//! cycle and boundary dimensions.

use crate::homology::Field;

/// Rank of the span of `vectors` (all of length `len`).
pub fn rank(vectors: &[Vec<u32>], len: usize, field: Field) -> usize {
    match field {
        Field::F2 => {
            let mut rows: Vec<BitRow> = vectors.iter().map(|v| BitRow::from_entries(v, len)).collect();
            gf2_echelon(&mut rows, len).len()
        }
        Field::Prime(_) => {
            let mut rows = vectors.to_vec();
            fp_rref(&mut rows, len, field).len()
        }
    }
}

/// Basis of the null space of the `nrows × columns.len()` matrix whose j-th
/// column is `columns[j]` (dense, length `nrows`).
pub fn null_space(columns: &[Vec<u32>], nrows: usize, field: Field) -> Vec<Vec<u32>> {
    let ncols = columns.len();
    // row-major copy of the matrix
    let rows: Vec<Vec<u32>> = (0..nrows).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let (reduced, pivots) = match field {
        Field::F2 => {
            let mut bits: Vec<BitRow> = rows.iter().map(|r| BitRow::from_entries(r, ncols)).collect();
            let pivots = gf2_rref(&mut bits, ncols);
            let dense: Vec<Vec<u32>> = bits.iter().take(pivots.len()).map(|b| b.to_entries(ncols)).collect();
            (dense, pivots)
        }
        Field::Prime(_) => {
            let mut rows = rows;
            let pivots = fp_rref(&mut rows, ncols, field);
            (rows, pivots)
        }
    };
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|free| {
            let mut v = vec![0u32; ncols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(reduced[row][free]);
            }
            v
        })
        .collect()
}

#[derive(Clone)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn from_entries(v: &[u32], len: usize) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for (i, &x) in v.iter().enumerate() {
            if x & 1 == 1 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        BitRow(words)
    }

    fn to_entries(&self, len: usize) -> Vec<u32> {
        (0..len).map(|i| self.get(i) as u32).collect()
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn xor(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }
}

/// Row echelon form in place; returns pivot columns of the nonzero rows, which
/// are moved to the front.
fn gf2_echelon(rows: &mut [BitRow], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row.get(c) {
                row.xor(&pivot);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn gf2_rref(rows: &mut [BitRow], ncols: usize) -> Vec<usize> {
    let pivots = gf2_echelon(rows, ncols);
    for (r, &c) in pivots.iter().enumerate().rev() {
        let pivot = rows[r].clone();
        for row in rows.iter_mut().take(r) {
            if row.get(c) {
                row.xor(&pivot);
            }
        }
    }
    pivots
}

/// Reduced row echelon form over F_p; nonzero rows first, returns pivot columns.
fn fp_rref(rows: &mut [Vec<u32>], ncols: usize, field: Field) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = field.inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot) {
                *x = field.sub(*x, field.mul(f, y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}
