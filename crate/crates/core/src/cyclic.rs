//! Discrete scalar calculus on ℤ_N: symbols s(x, k) on ℤ_N × ℤ_N, quantized with
//! the plain DFT. Written against modular arithmetic only, so it can be compared
//! with the operator-valued calculus on the cyclic group.

use rand::Rng;

use crate::dual::{CMat, C64};
use crate::error::{Error, Result};

/// s(x, k), row-major in x.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicSymbol {
    pub n: usize,
    pub values: Vec<C64>,
}

impl CyclicSymbol {
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        Self { n, values: (0..n * n).map(|_| crate::random_c64(rng)).collect() }
    }

    #[inline]
    pub fn get(&self, x: usize, k: usize) -> C64 {
        self.values[x * self.n + k]
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Data of the quantization: β(q; x) row-major and the ordering table τ.
#[derive(Debug, Clone)]
pub struct CyclicCalculus {
    pub n: usize,
    pub beta: Vec<C64>,
    pub tau: Vec<usize>,
}

#[inline]
fn e(n: usize, m: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (m % n) as f64 / n as f64)
}

impl CyclicCalculus {
    pub fn new(n: usize, beta: Vec<C64>, tau: Vec<usize>) -> Result<Self> {
        if n == 0 || beta.len() != n * n || tau.len() != n || tau.iter().any(|&t| t >= n) {
            return Err(Error::Shape(format!("inconsistent data for ℤ_{n}")));
        }
        Ok(Self { n, beta, tau })
    }

    #[inline]
    fn sub(&self, a: usize, b: usize) -> usize {
        (a + self.n - b) % self.n
    }

    /// a(p, z) = N⁻¹ Σₖ e^{2πi kz/N} s(p, k)
    fn amplitude(&self, s: &CyclicSymbol, p: usize, z: usize) -> C64 {
        let n = self.n;
        (0..n).map(|k| e(n, k * z) * s.get(p, k)).sum::<C64>() / n as f64
    }

    /// K(x, y) = β(x; x − y) a(x − τ(x − y), x − y)
    pub fn kernel(&self, s: &CyclicSymbol) -> CMat {
        let n = self.n;
        CMat::from_fn(n, n, |x, y| {
            let z = self.sub(x, y);
            self.beta[x * n + z] * self.amplitude(s, self.sub(x, self.tau[z]), z)
        })
    }

    pub fn symbol_of(&self, k: &CMat) -> CyclicSymbol {
        let n = self.n;
        let mut a = vec![C64::new(0.0, 0.0); n * n];
        for p in 0..n {
            for z in 0..n {
                let x = (p + self.tau[z]) % n;
                a[p * n + z] = k[(x, self.sub(x, z))] / self.beta[x * n + z];
            }
        }
        let mut values = vec![C64::new(0.0, 0.0); n * n];
        for p in 0..n {
            for kk in 0..n {
                values[p * n + kk] = (0..n).map(|z| e(n, n * n - kk * z % n) * a[p * n + z]).sum();
            }
        }
        CyclicSymbol { n, values }
    }

    pub fn compose(&self, r: &CyclicSymbol, s: &CyclicSymbol) -> CyclicSymbol {
        self.symbol_of(&(self.kernel(r) * self.kernel(s)))
    }

    pub fn involution(&self, s: &CyclicSymbol) -> CyclicSymbol {
        self.symbol_of(&self.kernel(s).adjoint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::max_abs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_and_identity() {
        let n = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let beta: Vec<C64> = (0..n * n).map(|i| if i % n == 0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, rng.random_range(0.0..6.0)) }).collect();
        let c = CyclicCalculus::new(n, beta, vec![0, 3, 1, 4, 2]).unwrap();
        let s = CyclicSymbol::random(n, &mut rng);
        assert!(c.symbol_of(&c.kernel(&s)).distance(&s) < 1e-13);
        let one = CyclicSymbol { n, values: vec![C64::new(1.0, 0.0); n * n] };
        assert!(max_abs(&(c.kernel(&one) - CMat::identity(n, n))) < 1e-14);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(CyclicCalculus::new(3, vec![C64::new(1.0, 0.0); 9], vec![0, 1, 3]).is_err());
    }
}
