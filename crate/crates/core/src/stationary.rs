//! Stationary-phase analysis of `∫_{B(1)} e^{i N ψ_N(ξ; x)} dξ` with the
//! quadratic phase `ψ_N(ξ; x) = (x/N)·ξ - |ξ|²/2`.
//!
//! The critical point is `ξ* = x/N` and the Hessian is `-I`, so the leading
//! term is `(2π/N)^{d/2} e^{-iπd/4} e^{i|x|²/(2N)}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{norm_sq, GridSpec, Region, SampledField};
use crate::transform::{inverse_direct_with, max_spacing};

/// Minimum distance from `ξ*` to the unit sphere for the leading term to be trusted.
pub const BOUNDARY_MARGIN: f64 = 0.125;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticPhase {
    n: f64,
    x: Vec<f64>,
}

impl QuadraticPhase {
    pub fn new(n: f64, x: Vec<f64>) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "phase scale N = {n} must be > 0"
            )));
        }
        if x.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(QuadraticPhase { n, x })
    }

    pub fn scale(&self) -> f64 {
        self.n
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        self.x
            .iter()
            .zip(xi)
            .map(|(a, b)| a / self.n * b)
            .sum::<f64>()
            - 0.5 * norm_sq(xi)
    }

    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        self.x.iter().zip(xi).map(|(a, b)| a / self.n - b).collect()
    }

    /// Constant Hessian `-I`, row-major.
    pub fn hessian(&self) -> Vec<f64> {
        let d = self.dim();
        let mut h = vec![0.0; d * d];
        for i in 0..d {
            h[i * d + i] = -1.0;
        }
        h
    }
}

pub fn critical_point(phase: &QuadraticPhase) -> Vec<f64> {
    phase.x.iter().map(|v| v / phase.n).collect()
}

/// Leading stationary-phase term; signature of the Hessian is `-d`.
pub fn leading_term(phase: &QuadraticPhase) -> Result<Complex64> {
    let r = norm_sq(&critical_point(phase)).sqrt();
    if r > 1.0 - BOUNDARY_MARGIN {
        return Err(Error::AsymptoticInvalid(format!(
            "critical point at radius {r:.4} is within {BOUNDARY_MARGIN} of the unit sphere"
        )));
    }
    Ok(leading_term_unchecked(phase))
}

fn leading_term_unchecked(phase: &QuadraticPhase) -> Complex64 {
    let d = phase.dim() as f64;
    let n = phase.n;
    let modulus = (2.0 * PI / n).powf(0.5 * d);
    Complex64::from_polar(modulus, -PI * d / 4.0 + norm_sq(&phase.x) / (2.0 * n))
}

/// Grid on `[-1, 1]^d` meeting the sampling rule for phases with `|x| <= x_max`.
pub fn unit_ball_grid(d: usize, n: f64, x_max: f64, samples_per_period: f64) -> Result<GridSpec> {
    let h = max_spacing(n + x_max, samples_per_period);
    let cells = (2.0 / h).ceil() as usize;
    GridSpec::cube(d, -1.0, 1.0, cells.max(2))
}

/// `∫_{B(1)} e^{i N ψ_N(ξ; x)} dξ` by the midpoint rule on `grid`.
pub fn quadrature(phase: &QuadraticPhase, grid: &GridSpec) -> Result<Complex64> {
    let d = phase.dim();
    if grid.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: grid.dim(),
        });
    }
    let datum = chirp_datum(phase.n, grid.clone(), Execution::Sequential)?;
    let v = inverse_direct_with(
        &datum,
        std::slice::from_ref(&phase.x),
        Execution::Sequential,
    )?;
    Ok(v[0] * (2.0 * PI).powi(d as i32))
}

/// `e^{-i N |ξ|²/2} χ_{B(1)}(ξ)` sampled on `grid`, with its bandwidth declared.
pub fn chirp_datum(n: f64, grid: GridSpec, exec: Execution) -> Result<SampledField> {
    let d = grid.dim();
    let ball = Region::ball(d, 1.0)?;
    SampledField::from_fn(grid, exec, |xi| {
        if ball.contains_point(xi) {
            Complex64::from_polar(1.0, -0.5 * n * norm_sq(xi))
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?
    .with_bandwidth(vec![n; d])
}

/// `|quadrature - leading| / |leading|`.
pub fn asymptotic_error(phase: &QuadraticPhase, quad_grid: &GridSpec) -> Result<f64> {
    let lead = leading_term(phase)?;
    let q = quadrature(phase, quad_grid)?;
    Ok((q - lead).norm() / lead.norm())
}

/// The shell `{N/4 < |x| < 3N/4}` whose points have `ξ*` in `B(3/4) \ B(1/4)`.
pub fn stationary_shell(d: usize, n: f64) -> Result<Region> {
    Region::shell(d, 0.25 * n, 0.75 * n)
}

/// Root-mean-square relative error over `count` points `x = s·N·e_1` with
/// `s` evenly spaced in `[0.3, 0.7]`, all inside the stationary shell.
///
/// Boundary contributions of the ball carry phases that oscillate in `x`; the
/// mean square removes their interference and leaves the decay rate in `N`.
pub fn shell_rms_error(
    d: usize,
    n: f64,
    count: usize,
    samples_per_period: f64,
    exec: Execution,
) -> Result<f64> {
    if count < 2 {
        return Err(Error::InvalidParameter(
            "need at least two shell points".into(),
        ));
    }
    let grid = unit_ball_grid(d, n, 0.7 * n, samples_per_period)?;
    let datum = chirp_datum(n, grid, exec)?;
    let points: Vec<Vec<f64>> = (0..count)
        .map(|i| {
            let s = 0.3 + 0.4 * i as f64 / (count - 1) as f64;
            let mut x = vec![0.0; d];
            x[0] = s * n;
            x
        })
        .collect();
    let scale = (2.0 * PI).powi(d as i32);
    let values = inverse_direct_with(&datum, &points, exec)?;
    let mut acc = 0.0;
    for (x, v) in points.into_iter().zip(values) {
        let phase = QuadraticPhase::new(n, x)?;
        let lead = leading_term(&phase)?;
        acc += ((v * scale - lead).norm() / lead.norm()).powi(2);
    }
    Ok((acc / count as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn fine_grid(n: f64, x_max: f64) -> GridSpec {
        unit_ball_grid(1, n, x_max, 32.0).unwrap()
    }

    #[test]
    fn critical_point_examples() {
        let p = QuadraticPhase::new(10.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(critical_point(&p), vec![0.0, 0.0]);
        let n = 40.0;
        let p = QuadraticPhase::new(n, vec![n / 2.0, 0.0]).unwrap();
        let c = critical_point(&p);
        assert_eq!(c, vec![0.5, 0.0]);
        let r = norm_sq(&c).sqrt();
        assert!((0.25..0.75).contains(&r));
        assert!(QuadraticPhase::new(0.0, vec![1.0]).is_err());
        assert!(QuadraticPhase::new(-1.0, vec![1.0]).is_err());
    }

    #[test]
    fn gradient_vanishes_at_critical_point_by_finite_differences() {
        let p = QuadraticPhase::new(17.0, vec![5.0, -3.0]).unwrap();
        let c = critical_point(&p);
        let h = 1e-5;
        for k in 0..2 {
            let mut a = c.clone();
            let mut b = c.clone();
            a[k] += h;
            b[k] -= h;
            let fd = (p.value(&a) - p.value(&b)) / (2.0 * h);
            assert!(fd.abs() < 1e-8, "{fd}");
        }
        assert!(p.gradient(&c).iter().all(|g| g.abs() < 1e-15));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(1.0..100.0);
            let x = vec![rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
            let xi = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let p = QuadraticPhase::new(n, x).unwrap();
            let g = p.gradient(&xi);
            let hess = p.hessian();
            let h = 1e-4;
            for k in 0..2 {
                let mut a = xi.clone();
                let mut b = xi.clone();
                a[k] += h;
                b[k] -= h;
                let fd = (p.value(&a) - p.value(&b)) / (2.0 * h);
                assert!((fd - g[k]).abs() < 1e-6);
                let ga = p.gradient(&a);
                let gb = p.gradient(&b);
                for j in 0..2 {
                    let fd2 = (ga[j] - gb[j]) / (2.0 * h);
                    assert!((fd2 - hess[j * 2 + k]).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn leading_term_modulus_and_phase() {
        let p = QuadraticPhase::new(100.0, vec![50.0]).unwrap();
        let v = leading_term(&p).unwrap();
        let expect = Complex64::from_polar((2.0 * PI / 100.0).sqrt(), -PI / 4.0 + 12.5);
        assert!((v - expect).norm() < 1e-14);

        let a = leading_term(&QuadraticPhase::new(16.0, vec![4.0, 3.0]).unwrap()).unwrap();
        let b = leading_term(&QuadraticPhase::new(64.0, vec![16.0, 12.0]).unwrap()).unwrap();
        assert_relative_eq!(b.norm(), 0.25 * a.norm(), max_relative = 1e-14);

        // radial symmetry: only |x| matters
        let c = leading_term(&QuadraticPhase::new(16.0, vec![0.0, 5.0]).unwrap()).unwrap();
        assert!((a - c).norm() < 1e-14);
    }

    #[test]
    fn leading_term_guard() {
        let p = QuadraticPhase::new(10.0, vec![9.0]).unwrap();
        assert!(matches!(leading_term(&p), Err(Error::AsymptoticInvalid(_))));
    }

    // Exact oracle: ∫_R e^{-a ξ²/2} e^{i N ψ_N(ξ; x)} dξ = √(2π/(a + iN)) e^{-x²/(2(a + iN))}.
    fn gaussian_windowed_exact(a: f64, n: f64, x: f64) -> Complex64 {
        let z = Complex64::new(a, n);
        (Complex64::new(2.0 * PI, 0.0) / z).sqrt() * (-(x * x) / (2.0 * z)).exp()
    }

    #[test]
    fn windowed_oracle_fixes_modulus_and_signature() {
        for (n, x) in [(10.0, 3.0), (64.0, 20.0)] {
            let lead = leading_term_unchecked(&QuadraticPhase::new(n, vec![x]).unwrap());
            let limit = gaussian_windowed_exact(1e-12, n, x);
            assert!((limit - lead).norm() < 1e-9, "{limit} vs {lead}");
        }
        // d = 2 factorises: the product of two 1-d limits
        let lead2 = leading_term_unchecked(&QuadraticPhase::new(10.0, vec![3.0, 2.0]).unwrap());
        let prod =
            gaussian_windowed_exact(1e-12, 10.0, 3.0) * gaussian_windowed_exact(1e-12, 10.0, 2.0);
        assert!((lead2 - prod).norm() < 1e-9);

        // and the exact formula itself against brute-force quadrature at a = 1
        let (a, n, x) = (1.0, 10.0, 3.0);
        let m = 400_000;
        let (lo, hi) = (-12.0, 12.0);
        let h = (hi - lo) / m as f64;
        let quad: Complex64 = (0..m)
            .map(|i| {
                let s = lo + (i as f64 + 0.5) * h;
                Complex64::from_polar((-0.5 * a * s * s).exp(), n * (x / n * s - 0.5 * s * s))
            })
            .sum::<Complex64>()
            * h;
        assert!((quad - gaussian_windowed_exact(a, n, x)).norm() < 1e-9);
    }

    #[test]
    fn error_decays_when_scale_quadruples() {
        let n = 16.0;
        let e1 = shell_rms_error(1, n, 101, 32.0, Execution::default()).unwrap();
        let e4 = shell_rms_error(1, 4.0 * n, 101, 32.0, Execution::default()).unwrap();
        assert!(e4 <= 0.6 * e1, "{e4} vs {e1}");
    }

    #[test]
    fn error_is_moderate_from_n16() {
        for n in [16.0, 32.0, 64.0] {
            let x = 0.5 * n;
            let p = QuadraticPhase::new(n, vec![x]).unwrap();
            let e = asymptotic_error(&p, &fine_grid(n, x)).unwrap();
            assert!(e.is_finite() && e < 0.5, "N = {n}: {e}");
        }
    }

    #[test]
    fn no_stationary_point_means_small_integral() {
        for n in [16.0, 32.0, 64.0] {
            let x = 2.5 * n;
            let p = QuadraticPhase::new(n, vec![x]).unwrap();
            let q = quadrature(&p, &fine_grid(n, x)).unwrap();
            assert!(
                q.norm() <= 0.2 * (2.0 * PI / n).sqrt(),
                "N = {n}: {}",
                q.norm()
            );
        }
    }

    #[test]
    fn undersampled_quadrature_rejected() {
        let p = QuadraticPhase::new(64.0, vec![32.0]).unwrap();
        let coarse = GridSpec::cube(1, -1.0, 1.0, 16).unwrap();
        assert!(matches!(
            asymptotic_error(&p, &coarse),
            Err(Error::Undersampled { .. })
        ));
    }
}
