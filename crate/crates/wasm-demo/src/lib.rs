//! Browser front end: three views computed by the core library. The plain
//! functions are target independent; the `#[wasm_bindgen]` wrappers only convert errors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use twistquant::cohomology::Cochain;
use twistquant::dual::{max_abs, UnitaryDual, C64};
use twistquant::fields::{MagneticField, Poly, PolyOneForm};
use twistquant::geometry::magnetic_cocycle;
use twistquant::grid::Grid;
use twistquant::group::{FiniteGroup, FiniteTau, NilpotentLieGroup, TauMap};
use twistquant::opcalc::{op, rank_one, wigner};
use twistquant::quadrature::Quadrature;
use twistquant::scalar::{LieTrivialization, ScalarQuantizer};
use twistquant::verify::magnetic::real_gaussian;

/// Largest grid side the page may request.
pub const MAX_SIDE: usize = 96;

fn grid_index(grid: &Grid, x: f64) -> usize {
    let i = ((x + grid.half_width()) / grid.spacing()).round();
    (i.max(0.0) as usize).min(grid.per_axis() - 1)
}

/// Field B = b + c·x² on the plane from A = (−b y/2, b x/2 + c x³/3).
fn planar(b: f64, c: f64) -> MagneticField {
    let m = Poly::monomial;
    let a = PolyOneForm::new(vec![m(-0.5 * b, [0, 1, 0, 0]), m(0.5 * b, [1, 0, 0, 0]).add(&m(c / 3.0, [3, 0, 0, 0]))]).expect("two components");
    MagneticField::from_poly("planar", a)
}

fn check_side(n: usize) -> Result<(), String> {
    if !(2..=MAX_SIDE).contains(&n) || !n.is_multiple_of(2) {
        return Err(format!("grid side must be even and between 2 and {MAX_SIDE}"));
    }
    Ok(())
}

/// Row K(x₀, ·) of the quantized real Gaussian for the field b + c·x², τ(x) = x/2,
/// as interleaved (re, im) over the n×n grid, row-major in the first coordinate.
pub fn kernel_row(b: f64, c: f64, l: f64, n: usize, x0: f64, y0: f64) -> Result<Vec<f64>, String> {
    check_side(n)?;
    let g = NilpotentLieGroup::abelian(2);
    let grid = Grid::new(2, l, n).map_err(|e| e.to_string())?;
    let field = planar(b, c);
    let beta = LieTrivialization::magnetic(&field, Quadrature::default());
    let tau = TauMap::Half;
    let q = ScalarQuantizer::new(&g, &grid, &beta, &tau).map_err(|e| e.to_string())?;
    let row = grid.flat(&[grid_index(&grid, x0), grid_index(&grid, y0)]);
    let cols: Vec<usize> = (0..grid.len()).collect();
    let k = q.kernel(&real_gaussian(2), &[row], &cols).map_err(|e| e.to_string())?;
    Ok(k.iter().flat_map(|z| [z.re, z.im]).collect())
}

/// arg γ^B(q; x, y) for q on the n×n grid: the flux through the triangle (q, q − x, q − x − y).
pub fn cocycle_phases(b: f64, c: f64, l: f64, n: usize, x: [f64; 2], y: [f64; 2]) -> Result<Vec<f64>, String> {
    check_side(n)?;
    let g = NilpotentLieGroup::abelian(2);
    let grid = Grid::new(2, l, n).map_err(|e| e.to_string())?;
    let field = planar(b, c);
    let rule = Quadrature::default();
    (0..grid.len())
        .map(|i| magnetic_cocycle(&g, field.b.as_ref(), &grid.point(i), &x, &y, &rule).map(|z| z.arg()).map_err(|e| e.to_string()))
        .collect()
}

#[derive(Debug, Serialize)]
pub struct WignerView {
    pub group: String,
    pub irreps: Vec<String>,
    pub dims: Vec<usize>,
    /// ‖𝒱_{u,v}(x, ξ)‖_HS, indexed [x][irrep].
    pub norms: Vec<Vec<f64>>,
    /// max |Op(𝒱_{u,v}) − Λ_{u,v}|, zero up to roundoff.
    pub defect: f64,
}

/// Wigner transform of two random unit vectors with a random twist.
pub fn wigner_view(group: &str, seed: u64) -> Result<WignerView, String> {
    let g = FiniteGroup::by_name(group).map_err(|e| e.to_string())?;
    if g.order() > 64 {
        return Err("groups above order 64 are not shown".into());
    }
    let dual = UnitaryDual::shipped(&g).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = |rng: &mut ChaCha8Rng| {
        let v: Vec<C64> = g.elements().map(|_| twistquant::random_c64(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / norm).collect::<Vec<_>>()
    };
    let (u, v) = (unit(&mut rng), unit(&mut rng));
    let beta = Cochain::random(&g, 1, &mut rng);
    let tau = FiniteTau(g.elements().collect());
    let w = wigner(&g, &dual, &u, &v, &beta, &tau).map_err(|e| e.to_string())?;
    let defect = max_abs(&(op(&g, &dual, &w, &beta, &tau).map_err(|e| e.to_string())? - rank_one(&u, &v)));
    Ok(WignerView {
        group: g.name().to_string(),
        irreps: dual.irreps().iter().map(|r| r.label.clone()).collect(),
        dims: dual.dims(),
        norms: g.elements().map(|x| (0..dual.len()).map(|k| w.block(x, k).norm()).collect()).collect(),
        defect,
    })
}

#[wasm_bindgen(js_name = kernelRow)]
pub fn kernel_row_js(b: f64, c: f64, l: f64, n: usize, x0: f64, y0: f64) -> Result<Vec<f64>, JsError> {
    kernel_row(b, c, l, n, x0, y0).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = cocyclePhases)]
pub fn cocycle_phases_js(b: f64, c: f64, l: f64, n: usize, x: &[f64], y: &[f64]) -> Result<Vec<f64>, JsError> {
    let pair = |v: &[f64]| <[f64; 2]>::try_from(v).map_err(|_| JsError::new("x and y must have two coordinates"));
    cocycle_phases(b, c, l, n, pair(x)?, pair(y)?).map_err(|e| JsError::new(&e))
}

/// JSON-encoded [`WignerView`].
#[wasm_bindgen(js_name = wignerView)]
pub fn wigner_view_js(group: &str, seed: u32) -> Result<String, JsError> {
    let view = wigner_view(group, seed as u64).map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&view).map_err(|e| JsError::new(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_row_is_localized_and_sized() {
        let k = kernel_row(1.0, 0.0, 4.0, 16, 0.0, 0.0).unwrap();
        assert_eq!(k.len(), 2 * 256);
        let mag = |i: usize| k[2 * i].hypot(k[2 * i + 1]);
        let center = 8 * 16 + 8;
        assert!(mag(center) > 10.0 * mag(0));
    }

    #[test]
    fn constant_field_gives_constant_phase() {
        let p = cocycle_phases(0.8, 0.0, 3.0, 8, [0.5, 0.0], [0.0, 1.0]).unwrap();
        assert!(p.iter().all(|v| (v - 0.8 * 0.5 / 2.0).abs() < 1e-12));
        let varying = cocycle_phases(0.8, 0.3, 3.0, 8, [0.5, 0.0], [0.0, 1.0]).unwrap();
        assert!(varying.iter().any(|v| (v - varying[0]).abs() > 1e-3));
    }

    #[test]
    fn wigner_view_reconstructs_the_rank_one_operator() {
        let v = wigner_view("Q8", 3).unwrap();
        assert_eq!(v.norms.len(), 8);
        assert_eq!(v.dims.iter().filter(|&&d| d == 2).count(), 1);
        assert!(v.defect < 1e-12);
        assert!(serde_json::to_string(&v).unwrap().contains("\"irreps\""));
    }

    #[test]
    fn bad_requests_are_errors() {
        assert!(kernel_row(1.0, 0.0, 4.0, 7, 0.0, 0.0).is_err());
        assert!(kernel_row(1.0, 0.0, 4.0, 200, 0.0, 0.0).is_err());
        assert!(wigner_view("Z0", 1).is_err());
    }
}
