use crate::error::{Error, Result};
use crate::homology::VerboseDiagram;

const GRID_EPS: f64 = 1e-9;

/// Histogram of a verbose diagram on a uniform grid over `[0, L]²`, with a
/// separate row of birth bins for points at death = ∞.
///
/// Bins are half-open, `[ih, (i+1)h) × [jh, (j+1)h)`. Points with a finite
/// death `≥ L`, or an infinite death and birth `≥ L`, land in `overflow`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMeasure {
    l: f64,
    h: f64,
    bins: usize,
    /// Row-major `counts[i * bins + j]`, i = birth bin, j = death bin.
    counts: Vec<f64>,
    inf_row: Vec<f64>,
    overflow: f64,
    normalizer: f64,
    t_max: f64,
}

/// Axis-aligned compact rectangle `[b0, b1] × [d0, d1]` in the finite part of Δ'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub birth: (f64, f64),
    pub death: (f64, f64),
}

impl Region {
    pub fn square(lo: f64, hi: f64) -> Self {
        Self {
            birth: (lo, hi),
            death: (lo, hi),
        }
    }
}

impl BinnedMeasure {
    /// All-zero measure on the grid.
    pub fn zero(l: f64, h: f64, normalizer: f64, t_max: f64) -> Result<Self> {
        let bins = grid_bins(l, h)?;
        if !(normalizer > 0.0 && normalizer.is_finite()) {
            return Err(Error::domain(format!("normalizer {normalizer} must be positive")));
        }
        Ok(Self {
            l,
            h,
            bins,
            counts: vec![0.0; bins * bins],
            inf_row: vec![0.0; bins],
            overflow: 0.0,
            normalizer,
            t_max,
        })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn count(&self, i: usize, j: usize) -> f64 {
        self.counts[i * self.bins + j]
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.count(i, j) / self.normalizer
    }

    pub fn inf_count(&self, i: usize) -> f64 {
        self.inf_row[i]
    }

    pub fn inf_mass(&self, i: usize) -> f64 {
        self.inf_row[i] / self.normalizer
    }

    pub fn overflow_mass(&self) -> f64 {
        self.overflow / self.normalizer
    }

    /// Unnormalized total, equal to the diagram cardinality for a single diagram.
    pub fn total_count(&self) -> f64 {
        self.counts.iter().sum::<f64>() + self.inf_row.iter().sum::<f64>() + self.overflow
    }

    /// Lower-left corner of bin `i` along either axis.
    pub fn edge(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.bins == other.bins && (self.h - other.h).abs() <= GRID_EPS && (self.l - other.l).abs() <= GRID_EPS
    }

    /// Average of the normalized masses, as a measure with normalizer 1.
    pub fn mean(measures: &[BinnedMeasure]) -> Result<Self> {
        let first = measures.first().ok_or_else(|| Error::domain("mean of no measures"))?;
        let t_max = measures.iter().map(|m| m.t_max).fold(f64::INFINITY, f64::min);
        let mut out = Self::zero(first.l, first.h, 1.0, t_max)?;
        let k = measures.len() as f64;
        for m in measures {
            if !m.same_grid(first) {
                return Err(Error::domain("grid mismatch"));
            }
            for (o, c) in out.counts.iter_mut().zip(&m.counts) {
                *o += c / m.normalizer / k;
            }
            for (o, c) in out.inf_row.iter_mut().zip(&m.inf_row) {
                *o += c / m.normalizer / k;
            }
            out.overflow += m.overflow / m.normalizer / k;
        }
        Ok(out)
    }
}

fn grid_bins(l: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite() && l > 0.0 && l.is_finite()) {
        return Err(Error::domain(format!(
            "grid L = {l}, h = {h} must be positive and finite"
        )));
    }
    let ratio = l / h;
    let bins = ratio.round();
    if (ratio - bins).abs() > GRID_EPS * ratio.max(1.0) || bins < 1.0 {
        return Err(Error::domain(format!("L = {l} is not a multiple of h = {h}")));
    }
    Ok(bins as usize)
}

/// Histogram of `vd` normalized by `volume`.
pub fn bin_measure(vd: &VerboseDiagram, l: f64, h: f64, volume: f64) -> Result<BinnedMeasure> {
    let mut m = BinnedMeasure::zero(l, h, volume, vd.t_max())?;
    let bin_of = |x: f64| ((x / h).floor() as usize).min(m.bins - 1);
    for p in vd.points() {
        if p.death.is_infinite() {
            if p.birth >= l {
                m.overflow += 1.0;
            } else {
                m.inf_row[bin_of(p.birth)] += 1.0;
            }
        } else if p.death >= l {
            m.overflow += 1.0;
        } else {
            let (i, j) = (bin_of(p.birth), bin_of(p.death));
            m.counts[i * m.bins + j] += 1.0;
        }
    }
    Ok(m)
}

/// Largest absolute difference of normalized bin masses over the bins lying
/// entirely inside `region`.
pub fn measure_discrepancy(m1: &BinnedMeasure, m2: &BinnedMeasure, region: Region) -> Result<f64> {
    if !m1.same_grid(m2) {
        return Err(Error::domain("grid mismatch"));
    }
    let (b0, b1) = region.birth;
    let (d0, d1) = region.death;
    if !(b0 >= 0.0 && b0 <= b1 && d0 >= 0.0 && d0 <= d1 && b1.is_finite() && d1.is_finite()) {
        return Err(Error::domain(format!("invalid region {region:?}")));
    }
    let trust = m1.t_max.min(m2.t_max);
    if b1 > trust || d1 > trust {
        return Err(Error::domain(format!(
            "region {region:?} extends beyond the trusted threshold {trust}"
        )));
    }
    let inside = |i: usize, lo: f64, hi: f64| m1.edge(i) >= lo - GRID_EPS && m1.edge(i + 1) <= hi + GRID_EPS;
    let mut worst = 0.0f64;
    for i in (0..m1.bins).filter(|&i| inside(i, b0, b1)) {
        for j in (i..m1.bins).filter(|&j| inside(j, d0, d1)) {
            worst = worst.max((m1.mass(i, j) - m2.mass(i, j)).abs());
        }
    }
    Ok(worst)
}

/// Total normalized mass, including the ∞ row and the overflow.
pub fn total_mass(m: &BinnedMeasure) -> f64 {
    m.total_count() / m.normalizer
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::DiagramPoint;

    const INF: f64 = f64::INFINITY;

    fn vd(pts: &[(f64, f64)]) -> VerboseDiagram {
        VerboseDiagram::new(1, INF, pts.iter().map(|&(b, d)| DiagramPoint::new(b, d)).collect()).unwrap()
    }

    #[test]
    fn binning_examples() {
        let empty = bin_measure(&vd(&[]), 2.0, 0.5, 1.0).unwrap();
        assert_eq!(total_mass(&empty), 0.0);

        let m = bin_measure(&vd(&[(0.1, 0.9)]), 2.0, 0.5, 4.0).unwrap();
        assert_eq!(m.count(0, 1), 1.0);
        assert_eq!(m.mass(0, 1), 0.25);
        assert_eq!(total_mass(&m), 0.25);

        let e = bin_measure(&vd(&[(0.0, INF)]), 2.0, 0.5, 1.0).unwrap();
        assert_eq!(e.inf_count(0), 1.0);
        assert_eq!(e.total_count(), 1.0);
    }

    #[test]
    fn overflow_and_edges() {
        let m = bin_measure(&vd(&[(0.5, 0.5), (1.0, 2.0), (2.5, INF), (1.99, 1.99)]), 2.0, 0.5, 1.0).unwrap();
        assert_eq!(m.count(1, 1), 1.0);
        assert_eq!(m.count(3, 3), 1.0);
        assert_eq!(m.overflow_mass(), 2.0);
        assert_eq!(m.total_count(), 4.0);
    }

    #[test]
    fn invalid_grids() {
        assert!(bin_measure(&vd(&[]), 2.0, 0.3, 1.0).is_err());
        assert!(bin_measure(&vd(&[]), 2.0, 0.0, 1.0).is_err());
        assert!(bin_measure(&vd(&[]), 2.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn discrepancy_examples() {
        let a = bin_measure(&vd(&[(0.1, 0.9)]), 2.0, 0.5, 4.0).unwrap();
        let zero = bin_measure(&vd(&[]), 2.0, 0.5, 4.0).unwrap();
        let all = Region::square(0.0, 2.0);
        assert_eq!(measure_discrepancy(&a, &a, all).unwrap(), 0.0);
        assert_eq!(measure_discrepancy(&a, &zero, all).unwrap(), 0.25);
        let b = bin_measure(&vd(&[(0.6, 1.2), (0.7, 1.3)]), 2.0, 0.5, 1.0).unwrap();
        assert_eq!(measure_discrepancy(&a, &b, all).unwrap(), 2.0);
        // region excluding the second bin column
        assert_eq!(measure_discrepancy(&a, &b, Region::square(0.0, 1.0)).unwrap(), 0.25);
        let other = bin_measure(&vd(&[]), 2.0, 0.25, 4.0).unwrap();
        assert!(measure_discrepancy(&a, &other, all).is_err());
    }

    #[test]
    fn region_must_be_trusted() {
        let truncated = VerboseDiagram::new(1, 1.0, vec![]).unwrap();
        let m = bin_measure(&truncated, 2.0, 0.5, 1.0).unwrap();
        assert!(measure_discrepancy(&m, &m, Region::square(0.0, 1.5)).is_err());
        assert!(measure_discrepancy(&m, &m, Region::square(0.0, 1.0)).is_ok());
    }

    #[test]
    fn mean_of_measures() {
        let a = bin_measure(&vd(&[(0.1, 0.9)]), 2.0, 0.5, 2.0).unwrap();
        let b = bin_measure(&vd(&[]), 2.0, 0.5, 4.0).unwrap();
        let m = BinnedMeasure::mean(&[a, b]).unwrap();
        assert_eq!(m.mass(0, 1), 0.25);
    }
}
