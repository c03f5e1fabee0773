//! Gauss–Legendre rules on [0, 1] and a collapsed tensor rule on the triangle {0 ≤ s ≤ t ≤ 1}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SEGMENT_ORDER: usize = 8;
pub const DEFAULT_TRIANGLE_ORDER: usize = 6;
pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Order-m rule on [0, 1], exact for polynomials of degree ≤ 2m − 1.
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > MAX_ORDER {
            return Err(Error::Config(format!("quadrature order must lie in 1..={MAX_ORDER}, got {m}")));
        }
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            dp = if d != 0.0 { d } else { dp };
            nodes[i] = 0.5 * (1.0 - x);
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// P_m(x) and P_m′(x) by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// ∫₀¹dt ∫₀ᵗds f(t, s) = ∫₀¹dt t ∫₀¹du f(t, tu), Gauss–Legendre in both t and u.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    /// (t, s, weight)
    pub points: Vec<(f64, f64, f64)>,
    order: usize,
}

impl TriangleRule {
    /// Exact for polynomials of total degree ≤ 2m − 2.
    pub fn new(m: usize) -> Result<Self> {
        let g = GaussLegendre::new(m)?;
        let mut points = Vec::with_capacity(m * m);
        for (&t, &wt) in g.nodes.iter().zip(&g.weights) {
            for (&u, &wu) in g.nodes.iter().zip(&g.weights) {
                points.push((t, t * u, wt * wu * t));
            }
        }
        Ok(Self { points, order: m })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn integrate(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        self.points.iter().map(|&(t, s, w)| w * f(t, s)).sum()
    }
}

/// Segment and triangle rules used together for circulations and fluxes.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub segment: GaussLegendre,
    pub triangle: TriangleRule,
}

impl Quadrature {
    pub fn new(segment_order: usize, triangle_order: usize) -> Result<Self> {
        Ok(Self { segment: GaussLegendre::new(segment_order)?, triangle: TriangleRule::new(triangle_order)? })
    }

    /// Order m on both the segment and each triangle axis.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(m, m)
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(DEFAULT_SEGMENT_ORDER, DEFAULT_TRIANGLE_ORDER).expect("default orders are valid")
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub segment_order: usize,
    pub triangle_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { segment_order: DEFAULT_SEGMENT_ORDER, triangle_order: DEFAULT_TRIANGLE_ORDER }
    }
}

impl QuadratureSpec {
    pub fn build(&self) -> Result<Quadrature> {
        Quadrature::new(self.segment_order, self.triangle_order)
    }
}
