//! Uniform lattices in exponential coordinates and the weighted discrete Fourier
//! transform between a lattice and its dual.
//!
//! Axis points are xᵢ = −L + i h with h = 2L/N; the dual axis is 𝒳ₖ = (k − N/2)π/L.
//! The forward transform carries the cell weight hⁿ, the inverse (Δ/2π)ⁿ with Δ = π/L,
//! which makes the pair exactly inverse to each other.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::dual::C64;
use crate::error::{Error, Result};
use crate::group::Coords;

pub type Multi = SmallVec<[usize; 4]>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    l: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(dim: usize, l: f64, n: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::GridMismatch(format!("grid dimension {dim} outside 1..=3")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Config(format!("grid half-width must be positive, got {l}")));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!("points per axis must be even and ≥ 2, got {n}")));
        }
        if n.checked_pow(dim as u32).is_none_or(|t| t > 1 << 24) {
            return Err(Error::Config(format!("{n}^{dim} grid points is too many")));
        }
        Ok(Self { dim, l, n, h: 2.0 * l / n as f64 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.l
    }

    pub fn per_axis(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Dual lattice spacing Δ = π/L.
    pub fn dual_spacing(&self) -> f64 {
        std::f64::consts::PI / self.l
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_weight(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// (Δ/2π)ⁿ
    pub fn dual_weight(&self) -> f64 {
        (1.0 / (2.0 * self.l)).powi(self.dim as i32)
    }

    #[inline]
    pub fn axis_point(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.h
    }

    #[inline]
    pub fn axis_dual(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dual_spacing()
    }

    pub fn multi(&self, mut idx: usize) -> Multi {
        let mut m: Multi = SmallVec::from_elem(0, self.dim);
        for a in (0..self.dim).rev() {
            m[a] = idx % self.n;
            idx /= self.n;
        }
        m
    }

    pub fn flat(&self, m: &[usize]) -> usize {
        m.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn point(&self, idx: usize) -> Coords {
        self.multi(idx).iter().map(|&i| self.axis_point(i)).collect()
    }

    pub fn dual_point(&self, idx: usize) -> Coords {
        self.multi(idx).iter().map(|&k| self.axis_dual(k)).collect()
    }

    /// Every coordinate satisfies |xₐ| < frac·L.
    pub fn is_interior(&self, idx: usize, frac: f64) -> bool {
        self.multi(idx).iter().all(|&i| self.axis_point(i).abs() < frac * self.l)
    }

    pub fn interior(&self, frac: f64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_interior(i, frac)).collect()
    }

    /// Per-axis index range [lo, hi) of the points with |x| < frac·L.
    pub fn interior_range(&self, frac: f64) -> (usize, usize) {
        let inside: Vec<usize> = (0..self.n).filter(|&i| self.axis_point(i).abs() < frac * self.l).collect();
        match (inside.first(), inside.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi + 1),
            _ => (0, 0),
        }
    }

    /// Lattice index of `x` if every coordinate lies within `tol·h` of a lattice value.
    /// `Ok(None)` means on-lattice but outside the truncated range.
    pub fn locate(&self, x: &[f64], tol: f64) -> std::result::Result<Option<usize>, ()> {
        let mut m: Multi = SmallVec::with_capacity(self.dim);
        let mut inside = true;
        for &v in x {
            let r = (v + self.l) / self.h;
            let k = r.round();
            if (r - k).abs() > tol {
                return Err(());
            }
            if k < 0.0 || k >= self.n as f64 {
                inside = false;
            }
            m.push(k.max(0.0) as usize);
        }
        Ok(inside.then(|| self.flat(&m)))
    }

    fn check_len(&self, v: &[C64]) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::GridMismatch(format!("{} samples for a grid of {} points", v.len(), self.len())));
        }
        Ok(())
    }
}

/// In-place unnormalized DFT along every axis of a row-major Nᵈ array.
pub(crate) fn fft_all_axes(data: &mut [C64], n: usize, dim: usize, inverse: bool, planner: &mut FftPlanner<f64>) {
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let total = data.len();
    let mut line = vec![C64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for start in (0..total).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

/// (−1)^{Σ multi-index} on a row-major Nᵈ array.
fn checkerboard(grid: &Grid, data: &mut [C64], shift: usize) {
    for (idx, v) in data.iter_mut().enumerate() {
        let s: usize = grid.multi(idx).iter().map(|&i| i + shift).sum();
        if s % 2 == 1 {
            *v = -*v;
        }
    }
}

/// (𝐅u)(𝒳ₖ) = hⁿ Σᵢ e^{−i⟨xᵢ|𝒳ₖ⟩} u(xᵢ)
pub fn scalar_fourier(grid: &Grid, u: &[C64]) -> Result<Vec<C64>> {
    grid.check_len(u)?;
    let mut data = u.to_vec();
    // e^{−i xᵢ𝒳ₖ} = (−1)^{i} (−1)^{k − N/2} e^{−2πi ik/N} per axis
    checkerboard(grid, &mut data, 0);
    fft_all_axes(&mut data, grid.n, grid.dim, false, &mut FftPlanner::new());
    checkerboard(grid, &mut data, grid.n / 2);
    let w = grid.cell_weight();
    data.iter_mut().for_each(|v| *v *= w);
    Ok(data)
}

/// u(xᵢ) = (Δ/2π)ⁿ Σₖ e^{i⟨xᵢ|𝒳ₖ⟩} û(𝒳ₖ)
pub fn scalar_fourier_inverse(grid: &Grid, uhat: &[C64]) -> Result<Vec<C64>> {
    grid.check_len(uhat)?;
    let mut data = uhat.to_vec();
    checkerboard(grid, &mut data, grid.n / 2);
    fft_all_axes(&mut data, grid.n, grid.dim, true, &mut FftPlanner::new());
    checkerboard(grid, &mut data, 0);
    let w = grid.dual_weight();
    data.iter_mut().for_each(|v| *v *= w);
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validation() {
        assert!(Grid::new(2, 1.0, 7).is_err());
        assert!(Grid::new(0, 1.0, 8).is_err());
        assert!(Grid::new(2, -1.0, 8).is_err());
        let g = Grid::new(2, 4.0, 8).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.point(g.flat(&[0, 7])).to_vec(), vec![-4.0, 3.0]);
    }

    #[test]
    fn locate_roundtrip() {
        let g = Grid::new(3, 3.0, 6).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.locate(&g.point(idx), 1e-9), Ok(Some(idx)));
        }
        assert_eq!(g.locate(&[0.5, 0.0, 0.0], 1e-9), Err(()));
        assert_eq!(g.locate(&[3.0, 0.0, 0.0], 1e-9), Ok(None));
    }

    #[test]
    fn matches_direct_sum() {
        let g = Grid::new(2, 2.5, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u: Vec<C64> = (0..g.len()).map(|_| crate::random_c64(&mut rng)).collect();
        let fast = scalar_fourier(&g, &u).unwrap();
        for k in 0..g.len() {
            let xi = g.dual_point(k);
            let direct: C64 = (0..g.len())
                .map(|i| {
                    let x = g.point(i);
                    u[i] * C64::from_polar(g.cell_weight(), -(x[0] * xi[0] + x[1] * xi[1]))
                })
                .sum();
            assert!((fast[k] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn roundtrip_and_parseval() {
        let g = Grid::new(3, 2.0, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u: Vec<C64> = (0..g.len()).map(|_| crate::random_c64(&mut rng)).collect();
        let uh = scalar_fourier(&g, &u).unwrap();
        let back = scalar_fourier_inverse(&g, &uh).unwrap();
        assert!(u.iter().zip(&back).all(|(a, b)| (a - b).norm() < 1e-12));
        let lhs: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.cell_weight();
        let rhs: f64 = uh.iter().map(|z| z.norm_sqr()).sum::<f64>() * g.dual_weight();
        assert!((lhs - rhs).abs() < 1e-10 * lhs);
        assert!(scalar_fourier(&g, &vec![C64::new(0.0, 0.0); g.len()]).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn gaussian_transform() {
        let g = Grid::new(1, 8.0, 128).unwrap();
        let u: Vec<C64> = (0..g.len()).map(|i| C64::new((-g.point(i)[0].powi(2) / 2.0).exp(), 0.0)).collect();
        let uh = scalar_fourier(&g, &u).unwrap();
        for k in 0..g.len() {
            let xi = g.dual_point(k)[0];
            let exact = (2.0 * std::f64::consts::PI).sqrt() * (-xi * xi / 2.0).exp();
            assert!((uh[k] - exact).norm() < 1e-8);
        }
    }

    #[test]
    fn grid_mismatch() {
        let g = Grid::new(1, 1.0, 4).unwrap();
        assert!(matches!(scalar_fourier(&g, &[C64::new(1.0, 0.0)]), Err(Error::GridMismatch(_))));
    }
}
