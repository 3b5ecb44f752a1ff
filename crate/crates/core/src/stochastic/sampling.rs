use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::WindowSpec;
use crate::error::{Error, Result};
use crate::geometry::{MarkedPoint, MarkedPointCloud};

/// Homogeneous Poisson process of intensity `lambda` on the window, unmarked.
///
/// The count is drawn first, then the points one coordinate vector at a time.
/// An exact coordinate collision is redrawn so the cloud is always simple.
pub fn sample_poisson_box<R: Rng + ?Sized>(lambda: f64, w: &WindowSpec, rng: &mut R) -> Result<MarkedPointCloud> {
    let coords = poisson_coords(lambda, w, rng)?;
    MarkedPointCloud::new(coords.into_iter().map(MarkedPoint::unmarked).collect(), w.dim(), 0.0)
}

/// Poisson ground process with i.i.d. marks uniform on `[0, r0]`, drawn after
/// all positions so that `r0 = 0` reproduces [`sample_poisson_box`].
pub fn sample_marked_poisson<R: Rng + ?Sized>(
    lambda: f64,
    r0: f64,
    w: &WindowSpec,
    rng: &mut R,
) -> Result<MarkedPointCloud> {
    if !(r0 >= 0.0 && r0.is_finite()) {
        return Err(Error::domain(format!("mark bound R0 = {r0} must be finite and >= 0")));
    }
    let coords = poisson_coords(lambda, w, rng)?;
    let points = coords
        .into_iter()
        .map(|c| {
            let mark = if r0 > 0.0 { rng.random_range(0.0..=r0) } else { 0.0 };
            MarkedPoint::new(c, mark)
        })
        .collect();
    MarkedPointCloud::new(points, w.dim(), r0)
}

fn poisson_coords<R: Rng + ?Sized>(lambda: f64, w: &WindowSpec, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("intensity {lambda} must be positive and finite")));
    }
    let mean = lambda * w.volume();
    let count = Poisson::new(mean)
        .map_err(|e| Error::domain(format!("Poisson mean {mean}: {e}")))?
        .sample(rng) as usize;
    let half = w.side() / 2.0;
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(count);
    let mut coords = Vec::with_capacity(count);
    while coords.len() < count {
        let p: Vec<f64> = (0..w.dim()).map(|_| rng.random_range(-half..half)).collect();
        if seen.insert(p.iter().map(|x| x.to_bits()).collect()) {
            coords.push(p);
        }
    }
    Ok(coords)
}

/// Unit lattice moved by one uniform offset in `[0, 1)^N`, each site jittered
/// uniformly in a ball of radius `jitter`, restricted to the window.
///
/// Sites are taken from the window dilated by 1 so jitter can carry points in
/// from outside; points that end up outside the window are dropped.
pub fn sample_perturbed_lattice<R: Rng + ?Sized>(jitter: f64, w: &WindowSpec, rng: &mut R) -> Result<MarkedPointCloud> {
    let offset: Vec<f64> = (0..w.dim()).map(|_| rng.random_range(0.0..1.0)).collect();
    perturbed_lattice_with_offset(jitter, w, &offset, rng)
}

pub(crate) fn perturbed_lattice_with_offset<R: Rng + ?Sized>(
    jitter: f64,
    w: &WindowSpec,
    offset: &[f64],
    rng: &mut R,
) -> Result<MarkedPointCloud> {
    if !(0.0..0.5).contains(&jitter) {
        return Err(Error::domain(format!("jitter {jitter} must lie in [0, 0.5)")));
    }
    let half = w.side() / 2.0;
    let lo = (-half - 1.0).floor() as i64;
    let hi = (half + 1.0).ceil() as i64;
    let mut points = Vec::new();
    let mut site = vec![lo; w.dim()];
    loop {
        let mut p: Vec<f64> = site.iter().zip(offset).map(|(&z, &o)| z as f64 + o).collect();
        for (x, d) in p.iter_mut().zip(uniform_in_ball(jitter, w.dim(), rng)) {
            *x += d;
        }
        if w.contains(&p) {
            points.push(MarkedPoint::unmarked(p));
        }
        // odometer over the integer sites
        let mut axis = 0;
        loop {
            if axis == site.len() {
                return MarkedPointCloud::new(points, w.dim(), 0.0);
            }
            site[axis] += 1;
            if site[axis] <= hi {
                break;
            }
            site[axis] = lo;
            axis += 1;
        }
    }
}

/// Uniform point in the closed ball of the given radius around the origin.
pub fn uniform_in_ball<R: Rng + ?Sized>(radius: f64, dim: usize, rng: &mut R) -> Vec<f64> {
    if radius == 0.0 {
        return vec![0.0; dim];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}
