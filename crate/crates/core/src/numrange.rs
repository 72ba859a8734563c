//! Numerical radius, Crawford number and boundary points of the numerical
//! range `W(B)` of an ordinary square matrix.
//!
//! Everything is driven by the support function of `W(B)`: for
//! `H_θ = (e^{iθ}B + e^{−iθ}B*)/2`, `λ_max(H_θ)` is the support of `W(B)` in
//! direction `e^{−iθ}`. Hence `w(B) = max_θ λ_max(H_θ)` and, when `0 ∉ W(B)`,
//! `c(B) = max_θ λ_min(H_θ)`.
//!
//! The maximization is a uniform grid over `[0, 2π)` followed by a
//! golden-section refinement of every grid bracket that is a local maximum
//! and can still beat the grid maximum. Two facts about support functions
//! make the pruning sound:
//!
//! * `h + h'' ≥ 0`, so `λ_max(H_θ)` exceeds the larger endpoint of a grid
//!   cell of width `Δ` by at most `‖B‖·Δ²/8`;
//! * `λ_min(H_θ)` is `‖B‖`-Lipschitz, so it exceeds the cell endpoints by at
//!   most `‖B‖·Δ/2`.
//!
//! `H_{θ+π} = −H_θ`, so one eigenvalue solve per angle in `[0, π)` fills
//! both halves of the grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{extreme_eigenvalues_unchecked, inner, top_eigenvector, ComplexMatrix, C64};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Grid and refinement parameters for the angle sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Number of angles over `[0, 2π)`.
    pub grid_points: usize,
    /// Bracket width (radians) at which golden-section refinement stops.
    pub refine_tol: f64,
    pub max_refine_iters: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { grid_points: 1024, refine_tol: 1e-10, max_refine_iters: 200 }
    }
}

impl SweepOptions {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 16 {
            return Err(Error::InvalidOptions(format!("grid_points must be >= 16, got {}", self.grid_points)));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::InvalidOptions(format!("refine_tol must be > 0, got {}", self.refine_tol)));
        }
        if self.max_refine_iters == 0 {
            return Err(Error::InvalidOptions("max_refine_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// Boundary samples of `W(B)`. The point at `θ` maximizes `Re(e^{iθ}z)` over `W(B)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeBoundary {
    pub thetas: Vec<f64>,
    pub points: Vec<C64>,
}

/// `H_θ = (e^{iθ}B + e^{−iθ}B*)/2`.
pub fn rotated_real_part(b: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix> {
    b.ensure_square()?;
    let rotated = b.scale(C64::from_polar(1.0, theta));
    Ok(rotated.hermitian_part())
}

/// Evaluates `(λ_min, λ_max)` of `H_θ = cos θ·Re B − sin θ·Im B`.
struct Pencil {
    n: usize,
    re: Vec<C64>,
    im: Vec<C64>,
    scratch: Vec<C64>,
    /// Upper bound for `‖B‖`, used by the pruning rules.
    norm_bound: f64,
}

impl Pencil {
    fn new(b: &ComplexMatrix) -> Self {
        Self {
            n: b.rows(),
            re: b.hermitian_part().as_slice().to_vec(),
            im: b.skew_part().as_slice().to_vec(),
            scratch: vec![C64::new(0.0, 0.0); b.rows() * b.rows()],
            norm_bound: b.frobenius_norm(),
        }
    }

    fn extremes(&mut self, theta: f64) -> Result<(f64, f64)> {
        let (s, c) = theta.sin_cos();
        for ((dst, &r), &i) in self.scratch.iter_mut().zip(&self.re).zip(&self.im) {
            *dst = r * c - i * s;
        }
        extreme_eigenvalues_unchecked(self.n, &mut self.scratch)
    }

    /// Rounding level of the sampled eigenvalues.
    fn flat_tol(&self) -> f64 {
        64.0 * f64::EPSILON * self.norm_bound
    }

    fn lambda_max(&mut self, theta: f64) -> Result<f64> {
        Ok(self.extremes(theta)?.1)
    }

    fn lambda_min(&mut self, theta: f64) -> Result<f64> {
        Ok(self.extremes(theta)?.0)
    }
}

/// `λ_max` and `λ_min` of `H_θ` on the uniform grid `θ_k = 2πk/N`.
struct Grid {
    step: f64,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

fn sample_grid(pencil: &mut Pencil, points: usize) -> Result<Grid> {
    let step = 2.0 * PI / points as f64;
    let mut upper = vec![0.0; points];
    let mut lower = vec![0.0; points];
    if points % 2 == 0 {
        let half = points / 2;
        for k in 0..half {
            let (lo, hi) = pencil.extremes(k as f64 * step)?;
            upper[k] = hi;
            lower[k] = lo;
            upper[k + half] = -lo;
            lower[k + half] = -hi;
        }
    } else {
        for k in 0..points {
            let (lo, hi) = pencil.extremes(k as f64 * step)?;
            upper[k] = hi;
            lower[k] = lo;
        }
    }
    Ok(Grid { step, upper, lower })
}

/// Golden-section maximization of `f` on `[a, b]`; returns the best value seen.
fn golden_max(mut a: f64, mut b: f64, opts: &SweepOptions, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = fc.max(fd);
    let mut iters = 0;
    while b - a > opts.refine_tol && iters < opts.max_refine_iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
            best = best.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
            best = best.max(fd);
        }
        iters += 1;
    }
    Ok(best)
}

/// Maximizes a sampled periodic function by refining promising brackets.
/// `slack` is the largest amount by which the function can exceed the
/// larger endpoint of a grid cell.
///
/// A bracket whose three grid values agree to within `flat` is not refined:
/// near a smooth maximum with curvature `κ` the neighbours sit `κΔ²/2` below
/// the centre, while the off-grid gain is at most `κΔ²/8`. This keeps
/// plateaus (disk-shaped numerical ranges) from refining every bracket.
fn refine_max(
    values: &[f64],
    step: f64,
    slack: f64,
    flat: f64,
    opts: &SweepOptions,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let n = values.len();
    let grid_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut best = grid_max;
    // Candidates in descending order of grid value; ties by index.
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&i| {
            let (prev, v, next) = (values[(i + n - 1) % n], values[i], values[(i + 1) % n]);
            let is_local_max = v >= prev && v >= next;
            let is_flat = v - prev <= flat && v - next <= flat;
            is_local_max && !is_flat && v + slack >= grid_max
        })
        .collect();
    candidates.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    for i in candidates {
        let neighbour_max = values[(i + n - 1) % n].max(values[(i + 1) % n]).max(values[i]);
        if neighbour_max + slack <= best {
            continue;
        }
        let centre = i as f64 * step;
        let local = golden_max(centre - step, centre + step, opts, &mut f)?;
        best = best.max(local);
    }
    Ok(best)
}

fn radius_from_grid(pencil: &mut Pencil, grid: &Grid, opts: &SweepOptions) -> Result<f64> {
    let slack = pencil.norm_bound * grid.step * grid.step / 2.0;
    let flat = pencil.flat_tol();
    let w = refine_max(&grid.upper, grid.step, slack, flat, opts, |t| pencil.lambda_max(t))?;
    Ok(w.max(0.0))
}

fn crawford_from_grid(pencil: &mut Pencil, grid: &Grid, opts: &SweepOptions) -> Result<f64> {
    let slack = pencil.norm_bound * grid.step;
    let grid_max = grid.lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if grid_max + slack <= 0.0 {
        return Ok(0.0);
    }
    let flat = pencil.flat_tol();
    let c = refine_max(&grid.lower, grid.step, slack, flat, opts, |t| pencil.lambda_min(t))?;
    Ok(c.max(0.0))
}

/// Numerical radius `w(B) = max_{‖x‖=1} |⟨Bx, x⟩|`.
pub fn numerical_radius(b: &ComplexMatrix, opts: &SweepOptions) -> Result<f64> {
    let n = b.ensure_square()?;
    opts.validate()?;
    match n {
        0 => return Ok(0.0),
        1 => return Ok(b[(0, 0)].norm()),
        _ => {}
    }
    let mut pencil = Pencil::new(b);
    let grid = sample_grid(&mut pencil, opts.grid_points)?;
    radius_from_grid(&mut pencil, &grid, opts)
}

/// Crawford number `c(B) = dist(0, W(B))`.
pub fn crawford_number(b: &ComplexMatrix, opts: &SweepOptions) -> Result<f64> {
    let n = b.ensure_square()?;
    opts.validate()?;
    match n {
        0 => return Ok(0.0),
        1 => return Ok(b[(0, 0)].norm()),
        _ => {}
    }
    let mut pencil = Pencil::new(b);
    let grid = sample_grid(&mut pencil, opts.grid_points)?;
    crawford_from_grid(&mut pencil, &grid, opts)
}

/// `(w(B), c(B))` from a single shared grid.
pub fn radius_and_crawford(b: &ComplexMatrix, opts: &SweepOptions) -> Result<(f64, f64)> {
    let n = b.ensure_square()?;
    opts.validate()?;
    match n {
        0 => return Ok((0.0, 0.0)),
        1 => return Ok((b[(0, 0)].norm(), b[(0, 0)].norm())),
        _ => {}
    }
    let mut pencil = Pencil::new(b);
    let grid = sample_grid(&mut pencil, opts.grid_points)?;
    let w = radius_from_grid(&mut pencil, &grid, opts)?;
    let c = crawford_from_grid(&mut pencil, &grid, opts)?;
    Ok((w, c))
}

/// Boundary points `z_k = ⟨B x_k, x_k⟩` with `x_k` a top eigenvector of
/// `H_{θ_k}`, `θ_k = 2πk/m`.
pub fn range_boundary(b: &ComplexMatrix, m: usize) -> Result<RangeBoundary> {
    b.ensure_square()?;
    if m < 3 {
        return Err(Error::InvalidOptions(format!("boundary needs at least 3 points, got {m}")));
    }
    let mut thetas = Vec::with_capacity(m);
    let mut points = Vec::with_capacity(m);
    for k in 0..m {
        let theta = 2.0 * PI * k as f64 / m as f64;
        let h = rotated_real_part(b, theta)?;
        let (_, x) = top_eigenvector(&h)?;
        points.push(inner(&b.matvec(&x), &x));
        thetas.push(theta);
    }
    Ok(RangeBoundary { thetas, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spectral_norm, I, ONE, ZERO};

    fn jordan() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])
    }

    #[test]
    fn rotated_real_part_examples() {
        let h = rotated_real_part(&ComplexMatrix::identity(2), PI / 2.0).unwrap();
        assert!(h.frobenius_norm() < 1e-15);
        let h = rotated_real_part(&jordan(), 0.0).unwrap();
        assert!(h.distance(&ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]])) < 1e-16);
        let herm = ComplexMatrix::from_rows(&[&[ONE, I], &[-I, ZERO]]);
        assert!(rotated_real_part(&herm, 0.0).unwrap().distance(&herm) < 1e-16);
    }

    #[test]
    fn radius_examples() {
        let o = SweepOptions::default();
        assert!((numerical_radius(&jordan(), &o).unwrap() - 0.5).abs() < 1e-12);
        assert!((numerical_radius(&ComplexMatrix::identity(3), &o).unwrap() - 1.0).abs() < 1e-12);
        assert!((numerical_radius(&jordan().scale_real(2.0), &o).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crawford_examples() {
        let o = SweepOptions::default();
        assert!((crawford_number(&ComplexMatrix::identity(2), &o).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(crawford_number(&jordan(), &o).unwrap(), 0.0);
        assert!((crawford_number(&ComplexMatrix::from_real_diag(&[1.0, 2.0]), &o).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_by_one_shortcut() {
        let b = ComplexMatrix::from_rows(&[&[C64::new(3.0, -4.0)]]);
        let o = SweepOptions::default();
        assert_eq!(numerical_radius(&b, &o).unwrap(), 5.0);
        assert_eq!(crawford_number(&b, &o).unwrap(), 5.0);
    }

    #[test]
    fn off_grid_maximum_is_refined() {
        // W(e^{iφ}·diag(1, 0.2)) is a segment rotated off the grid angles.
        let b = ComplexMatrix::from_real_diag(&[1.0, 0.2]).scale(C64::from_polar(1.0, 0.123_456_7));
        let o = SweepOptions { grid_points: 16, ..SweepOptions::default() };
        assert!((numerical_radius(&b, &o).unwrap() - 1.0).abs() < 1e-12);
        assert!((crawford_number(&b, &o).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn radius_of_hermitian_is_norm() {
        let h = ComplexMatrix::from_rows(&[
            &[C64::new(1.0, 0.0), C64::new(0.3, 0.4), C64::new(-1.0, 0.2)],
            &[C64::new(0.3, -0.4), C64::new(-2.0, 0.0), C64::new(0.0, 0.7)],
            &[C64::new(-1.0, -0.2), C64::new(0.0, -0.7), C64::new(0.5, 0.0)],
        ]);
        let w = numerical_radius(&h, &SweepOptions::default()).unwrap();
        assert!((w - spectral_norm(&h).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn boundary_examples() {
        let b = range_boundary(&ComplexMatrix::identity(2), 5).unwrap();
        assert!(b.points.iter().all(|z| (z - ONE).norm() < 1e-14));
        let b = range_boundary(&ComplexMatrix::from_real_diag(&[0.0, 1.0]), 4).unwrap();
        assert!(b.points.iter().all(|z| z.im.abs() < 1e-14 && z.re > -1e-14 && z.re < 1.0 + 1e-14));
        let b = range_boundary(&jordan(), 360).unwrap();
        assert!(b.points.iter().all(|z| (z.norm() - 0.5).abs() < 1e-8));
        assert!(matches!(range_boundary(&jordan(), 2), Err(Error::InvalidOptions(_))));
    }

    #[test]
    fn options_validation() {
        let bad = SweepOptions { grid_points: 8, ..SweepOptions::default() };
        assert!(numerical_radius(&jordan(), &bad).is_err());
        let bad = SweepOptions { refine_tol: 0.0, ..SweepOptions::default() };
        assert!(bad.validate().is_err());
    }
}
