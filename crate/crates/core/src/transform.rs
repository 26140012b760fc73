//! Fourier transforms under the convention
//! `Ff(ξ) = ∫ f(x) e^{-i x·ξ} dx`, `F⁻¹g(x) = (2π)^{-d} ∫ g(ξ) e^{i x·ξ} dξ`.
//!
//! [`fourier_direct`] evaluates the midpoint Riemann sum at arbitrary
//! frequencies. [`fourier_fast`] evaluates the same sum on the dual grid with
//! one FFT per axis line, so the two agree to rounding.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{GridSpec, NodeBudget, SampledField};

/// Minimum samples per period of the fastest oscillation of the integrand.
pub const SAMPLES_PER_PERIOD: f64 = 8.0;

/// Below this value of `|M - ξ|·(b - a)` the box-chirp factor uses its Taylor branch.
pub const SERIES_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformMethod {
    #[serde(rename = "closed")]
    ClosedForm,
    #[serde(rename = "quad")]
    DirectQuadrature,
    #[serde(rename = "fast")]
    FastTransform,
}

impl FromStr for TransformMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "closed" | "closed-form" => Ok(TransformMethod::ClosedForm),
            "quad" | "direct" => Ok(TransformMethod::DirectQuadrature),
            "fast" | "fft" => Ok(TransformMethod::FastTransform),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?} (expected closed, quad or fast)"
            ))),
        }
    }
}

impl fmt::Display for TransformMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformMethod::ClosedForm => "closed",
            TransformMethod::DirectQuadrature => "quad",
            TransformMethod::FastTransform => "fast",
        })
    }
}

/// Largest spacing allowed on an axis whose integrand oscillates at angular frequency `omega`.
pub fn max_spacing(omega: f64, samples_per_period: f64) -> f64 {
    if omega <= 0.0 {
        f64::INFINITY
    } else {
        2.0 * PI / (samples_per_period * omega)
    }
}

/// Sampling rule: on each axis, `h_k <= 2π / (8 (ω_k + max|ξ_k|))`.
pub fn check_sampling(field: &SampledField, xi_max: &[f64]) -> Result<()> {
    let grid = field.grid();
    let omega = field.local_frequency();
    for (k, &om) in omega.iter().enumerate() {
        let allowed = max_spacing(
            om + xi_max.get(k).copied().unwrap_or(0.0),
            SAMPLES_PER_PERIOD,
        );
        let h = grid.spacing(k);
        if h > allowed * (1.0 + 1e-9) {
            return Err(Error::Undersampled {
                axis: k,
                spacing: h,
                max_spacing: allowed,
            });
        }
    }
    Ok(())
}

fn xi_extent(d: usize, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut m = vec![0.0f64; d];
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        for k in 0..d {
            m[k] = m[k].max(p[k].abs());
        }
    }
    Ok(m)
}

/// `h^d Σ_j f(x_j) e^{-i x_j·ξ}` at each requested frequency.
pub fn fourier_direct(f: &SampledField, xi_points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    fourier_direct_with(f, xi_points, Execution::default())
}

pub fn fourier_direct_with(
    f: &SampledField,
    xi_points: &[Vec<f64>],
    exec: Execution,
) -> Result<Vec<Complex64>> {
    let xi_max = xi_extent(f.grid().dim(), xi_points)?;
    check_sampling(f, &xi_max)?;
    let w = f.grid().cell_volume();
    Ok(direct_sum(f, xi_points, -1.0, w, exec))
}

/// `(2π)^{-d} h^d Σ_m g(ξ_m) e^{i x·ξ_m}` at each requested point.
pub fn inverse_direct(g: &SampledField, x_points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    inverse_direct_with(g, x_points, Execution::default())
}

pub fn inverse_direct_with(
    g: &SampledField,
    x_points: &[Vec<f64>],
    exec: Execution,
) -> Result<Vec<Complex64>> {
    let d = g.grid().dim();
    let x_max = xi_extent(d, x_points)?;
    check_sampling(g, &x_max)?;
    let w = g.grid().cell_volume() / (2.0 * PI).powi(d as i32);
    Ok(direct_sum(g, x_points, 1.0, w, exec))
}

// Contracts the tensor of samples against per-axis phase vectors, last axis first.
fn direct_sum(
    f: &SampledField,
    points: &[Vec<f64>],
    sign: f64,
    weight: f64,
    exec: Execution,
) -> Vec<Complex64> {
    let grid = f.grid();
    let d = grid.dim();
    let counts = grid.counts();
    let coords: Vec<Vec<f64>> = (0..d).map(|k| grid.axis_coords(k)).collect();
    exec.map(points.len(), |p| {
        let xi = &points[p];
        let factors: Vec<Vec<Complex64>> = (0..d)
            .map(|k| {
                coords[k]
                    .iter()
                    .map(|&x| Complex64::from_polar(1.0, sign * x * xi[k]))
                    .collect()
            })
            .collect();
        if d == 1 {
            return dot(f.values(), &factors[0]) * weight;
        }
        let mut cur: Vec<Complex64> = f
            .values()
            .chunks_exact(counts[d - 1])
            .map(|line| dot(line, &factors[d - 1]))
            .collect();
        for k in (1..d - 1).rev() {
            cur = cur
                .chunks_exact(counts[k])
                .map(|line| dot(line, &factors[k]))
                .collect();
        }
        dot(&cur, &factors[0]) * weight
    })
}

#[inline]
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(v, c)| v * c).sum()
}

struct AxisPlan {
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
}

fn apply_axis(
    values: &mut [Complex64],
    grid: &GridSpec,
    axis: usize,
    plan: &AxisPlan,
    exec: Execution,
) {
    let n = grid.counts()[axis];
    let stride = grid.stride(axis);
    let run = |line: &mut [Complex64]| {
        for (v, c) in line.iter_mut().zip(&plan.pre) {
            *v *= c;
        }
        plan.fft.process(line);
        for (v, c) in line.iter_mut().zip(&plan.post) {
            *v *= c;
        }
    };
    if stride == 1 {
        exec.for_each_chunk_mut(values, n, |_, line| run(line));
        return;
    }
    let outer = values.len() / (n * stride);
    let src: &[Complex64] = values;
    let lines = exec.map(outer * stride, |l| {
        let (o, i) = (l / stride, l % stride);
        let base = o * n * stride + i;
        let mut line: Vec<Complex64> = (0..n).map(|j| src[base + j * stride]).collect();
        run(&mut line);
        line
    });
    for (l, line) in lines.into_iter().enumerate() {
        let (o, i) = (l / stride, l % stride);
        let base = o * n * stride + i;
        for (j, v) in line.into_iter().enumerate() {
            values[base + j * stride] = v;
        }
    }
}

#[inline]
fn unit(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Riemann sum of the forward transform on the dual frequency grid.
///
/// On an axis with `n` cells of width `h`, the output nodes are
/// `ξ_m = (m - ⌊n/2⌋)·2π/(n h)`, `m = 0..n`, which covers `[-π/h, π/h)`.
pub fn fourier_fast(f: &SampledField) -> Result<SampledField> {
    fourier_fast_with(f, Execution::default())
}

pub fn fourier_fast_with(f: &SampledField, exec: Execution) -> Result<SampledField> {
    let grid = f.grid();
    check_sampling(f, &vec![0.0; grid.dim()])?;
    let d = grid.dim();
    let mut planner = FftPlanner::<f64>::new();
    let mut values = f.values().to_vec();
    let (mut lo, mut hi) = (Vec::with_capacity(d), Vec::with_capacity(d));
    for k in 0..d {
        let n = grid.counts()[k];
        let h = grid.spacing(k);
        let x0 = grid.coord(k, 0);
        let c = n / 2;
        let dxi = 2.0 * PI / (n as f64 * h);
        let pre = (0..n)
            .map(|j| unit(2.0 * PI * ((j * c) % n) as f64 / n as f64))
            .collect();
        let post = (0..n)
            .map(|m| unit(-x0 * (m as f64 - c as f64) * dxi) * h)
            .collect();
        let plan = AxisPlan {
            pre,
            post,
            fft: planner.plan_fft_forward(n),
        };
        apply_axis(&mut values, grid, k, &plan, exec);
        let l = -(c as f64 + 0.5) * dxi;
        lo.push(l);
        hi.push(l + n as f64 * dxi);
    }
    let out = GridSpec::with_budget(lo, hi, grid.counts().to_vec(), NodeBudget(u64::MAX))?;
    SampledField::new(out, values)
}

/// Riemann sum of the inverse transform onto the dual space grid.
///
/// The output axis spacing is `2π/(n Δξ)`; `out_lo` fixes the lower bound of
/// the output grid, otherwise it is centred like [`fourier_fast`]'s output.
pub fn inverse_fourier(g: &SampledField, out_lo: Option<&[f64]>) -> Result<SampledField> {
    inverse_fourier_with(g, out_lo, Execution::default())
}

pub fn inverse_fourier_with(
    g: &SampledField,
    out_lo: Option<&[f64]>,
    exec: Execution,
) -> Result<SampledField> {
    let grid = g.grid();
    let d = grid.dim();
    if let Some(lo) = out_lo {
        if lo.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: lo.len(),
            });
        }
    }
    check_sampling(g, &vec![0.0; d])?;
    let mut planner = FftPlanner::<f64>::new();
    let mut values = g.values().to_vec();
    let (mut lo_out, mut hi_out) = (Vec::with_capacity(d), Vec::with_capacity(d));
    for k in 0..d {
        let n = grid.counts()[k];
        let dxi = grid.spacing(k);
        let xi0 = grid.coord(k, 0);
        let dx = 2.0 * PI / (n as f64 * dxi);
        let lo = match out_lo {
            Some(l) => l[k],
            None => -((n / 2) as f64 + 0.5) * dx,
        };
        let x0 = lo + 0.5 * dx;
        let pre = (0..n).map(|m| unit(x0 * (xi0 + m as f64 * dxi))).collect();
        let post = (0..n)
            .map(|j| unit(j as f64 * dx * xi0) * (dxi / (2.0 * PI)))
            .collect();
        let plan = AxisPlan {
            pre,
            post,
            fft: planner.plan_fft_inverse(n),
        };
        apply_axis(&mut values, grid, k, &plan, exec);
        lo_out.push(lo);
        hi_out.push(lo + n as f64 * dx);
    }
    let out = GridSpec::with_budget(lo_out, hi_out, grid.counts().to_vec(), NodeBudget(u64::MAX))?;
    SampledField::new(out, values)
}

/// One axis of the transform of `e^{i M x} χ_[a,b)(x)`:
/// `∫_a^b e^{i x (M - ξ)} dx = (e^{i b t} - e^{i a t}) / (i t)`, `t = M - ξ`.
///
/// Evaluated as `e^{i t (a+b)/2} · (b-a) · sinc(t (b-a)/2)`, which is the same
/// quantity without cancellation; `|φ| <= b - a` holds by construction.
pub fn box_chirp_factor(a: f64, b: f64, m: f64, xi: f64) -> Complex64 {
    let t = m - xi;
    let len = b - a;
    let u = 0.5 * t * len;
    let sinc = if (t * len).abs() < SERIES_THRESHOLD {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    };
    unit(t * 0.5 * (a + b)) * (len * sinc)
}

/// Transform of `e^{i M x·u} χ_{[a,b)^d}(x)` with `u = (1, …, 1)`: the product of per-axis factors.
pub fn closed_form_box_chirp(a: f64, b: f64, m: f64, xi: &[f64]) -> Result<Complex64> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if !(a < b) {
        return Err(Error::InvalidParameter(format!(
            "box chirp needs a < b, got ({a}, {b})"
        )));
    }
    if xi.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    Ok(xi.iter().map(|&x| box_chirp_factor(a, b, m, x)).product())
}

/// `f_λ(x) = f(λ x)`: same samples on the grid with bounds scaled by `1/λ`.
pub fn dilate(f: &SampledField, lambda: f64) -> Result<SampledField> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dilation factor {lambda} must be > 0"
        )));
    }
    let g = f.grid();
    let lo = g.lo().iter().map(|v| v / lambda).collect();
    let hi = g.hi().iter().map(|v| v / lambda).collect();
    let grid = GridSpec::with_budget(lo, hi, g.counts().to_vec(), NodeBudget(u64::MAX))?;
    let bandwidth = f
        .declared_bandwidth()
        .map(|b| b.iter().map(|w| w * lambda).collect());
    Ok(SampledField::from_parts(
        grid,
        f.values().to_vec(),
        bandwidth,
    ))
}
