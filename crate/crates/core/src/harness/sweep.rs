//! Ratio sweeps over a family parameter.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::families::{
    default_base_nodes, family_s, gaussian_base, Datum, FamilyId, FamilyParams, FamilySpec,
    DEFAULT_DELTA,
};
use crate::harness::fit::fit_slope;
use crate::model::{Exponent, ExponentPair, GridSpec, NodeBudget, Region, SampledField, MAX_DIM};
use crate::norm::{lp_norm_with, ratio};
use crate::transform::{
    fourier_direct_with, fourier_fast_with, inverse_direct_with, inverse_fourier_with,
    TransformMethod,
};

/// How per-value grids are derived from the sampling rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridPolicy {
    pub samples_per_period: f64,
    /// Fast grids span at least `pad_factor` times the datum support.
    pub pad_factor: f64,
    /// Minimum nodes across the narrowest extent of the target region.
    pub min_target_nodes: usize,
    /// Nodes per axis on the target box for closed-form evaluation.
    pub closed_nodes: usize,
    /// Nodes per axis of the Gaussian base for family S.
    pub base_nodes: Option<usize>,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            samples_per_period: 8.0,
            pad_factor: 4.0,
            min_target_nodes: 32,
            closed_nodes: 64,
            base_nodes: None,
        }
    }
}

impl GridPolicy {
    fn validate(&self) -> Result<()> {
        if !(self.samples_per_period >= 2.0 && self.samples_per_period.is_finite()) {
            return Err(Error::InvalidParameter(
                "samples_per_period must be >= 2".into(),
            ));
        }
        if !(self.pad_factor >= 1.0 && self.pad_factor.is_finite()) {
            return Err(Error::InvalidParameter("pad_factor must be >= 1".into()));
        }
        if self.min_target_nodes == 0 || self.closed_nodes == 0 || self.base_nodes == Some(0) {
            return Err(Error::InvalidParameter(
                "node counts must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub family: FamilyId,
    pub d: usize,
    pub pq: ExponentPair,
    /// `N` values, or `λ` values for family S.
    pub sweep: Vec<f64>,
    pub delta: f64,
    pub method: TransformMethod,
    pub policy: GridPolicy,
    pub budget: NodeBudget,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    /// Defaults: the family's sweep and method, `δ = 0.05`, default policy and budget.
    pub fn new(family: FamilyId, d: usize, pq: ExponentPair) -> Self {
        SweepConfig {
            family,
            d,
            pq,
            sweep: family.default_sweep(d),
            delta: DEFAULT_DELTA,
            method: family.default_method(),
            policy: GridPolicy::default(),
            budget: NodeBudget::DEFAULT,
            out: None,
        }
    }

    pub fn with_sweep(mut self, sweep: Vec<f64>) -> Self {
        self.sweep = sweep;
        self
    }

    pub fn with_method(mut self, method: TransformMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_policy(mut self, policy: GridPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_budget(mut self, budget: NodeBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "dimension {} outside 1..={MAX_DIM}",
                self.d
            )));
        }
        if self.sweep.len() < 3 {
            return Err(Error::TooFewPoints(self.sweep.len()));
        }
        let up = self.sweep.windows(2).all(|w| w[0] < w[1]);
        let down = self.sweep.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(Error::InvalidParameter(
                "sweep values must be strictly monotone".into(),
            ));
        }
        if !self.family.supports(self.method) {
            return Err(Error::MethodUnavailable {
                family: self.family.to_string(),
                method: self.method.to_string(),
            });
        }
        self.policy.validate()
    }

    /// Tolerance on the fitted slope used by [`crate::harness::verify_sweep`].
    pub fn tolerance(&self) -> f64 {
        default_tolerance(self.method)
    }
}

pub fn default_tolerance(method: TransformMethod) -> f64 {
    match method {
        TransformMethod::ClosedForm => 0.15,
        _ => 0.25,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// `N`, or `1/λ` for family S.
    pub n: f64,
    pub norm_f_p: f64,
    pub norm_ff_q: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub family: FamilyId,
    pub d: usize,
    pub pq: ExponentPair,
    pub method: TransformMethod,
    pub rows: Vec<SweepRow>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    pub predicted_slope: f64,
}

impl SweepResult {
    pub fn is_lower_bound(&self) -> bool {
        self.family.is_lower_bound()
    }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(cfg, Execution::default())
}

pub fn run_sweep_with(cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    cfg.validate()?;
    let base = if cfg.family == FamilyId::S {
        let nodes = cfg
            .policy
            .base_nodes
            .unwrap_or_else(|| default_base_nodes(cfg.d));
        Some(gaussian_base(cfg.d, nodes, exec)?)
    } else {
        None
    };
    let mut rows = Vec::with_capacity(cfg.sweep.len());
    for &v in &cfg.sweep {
        let row = (|| {
            let params = FamilyParams::new(cfg.d, v).with_delta(cfg.delta);
            let spec = match &base {
                Some(b) => family_s(params, b.clone())?,
                None => FamilySpec::new(cfg.family, params)?,
            };
            let (nf, nff) = measure(&spec, cfg.pq, cfg.method, &cfg.policy, cfg.budget, exec)?;
            let r = ratio(nf, nff)?;
            if !(nf.is_finite() && nff.is_finite() && r.is_finite() && nff > 0.0) {
                return Err(Error::NonPositive(nf, nff));
            }
            let n = if cfg.family == FamilyId::S {
                1.0 / v
            } else {
                v
            };
            Ok(SweepRow {
                n,
                norm_f_p: nf,
                norm_ff_q: nff,
                ratio: r,
            })
        })()
        .map_err(|e| Error::AtSweepValue {
            n: v,
            source: Box::new(e),
        })?;
        rows.push(row);
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n, r.ratio)).collect();
    let fit = fit_slope(&pts)?;
    Ok(SweepResult {
        family: cfg.family,
        d: cfg.d,
        pq: cfg.pq,
        method: cfg.method,
        rows,
        fitted_slope: fit.slope,
        slope_stderr: fit.stderr,
        predicted_slope: cfg.family.predicted_exponent(cfg.d, cfg.pq),
    })
}

/// `(‖f‖_p, ‖Ff‖_q)` for one family member.
pub fn measure(
    spec: &FamilySpec,
    pq: ExponentPair,
    method: TransformMethod,
    policy: &GridPolicy,
    budget: NodeBudget,
    exec: Execution,
) -> Result<(f64, f64)> {
    if !spec.id().supports(method) {
        return Err(Error::MethodUnavailable {
            family: spec.id().to_string(),
            method: method.to_string(),
        });
    }
    if spec.id() == FamilyId::S {
        return measure_scaling(spec, pq, method, policy, budget, exec);
    }
    if method == TransformMethod::ClosedForm {
        let target = spec.target_region();
        let (lo, hi) = bbox(&target)?;
        let grid = GridSpec::with_budget(lo, hi, vec![policy.closed_nodes; spec.dim()], budget)?;
        let field = SampledField::from_fn(grid, exec, |xi| {
            spec.closed_form_transform(xi)
                .expect("closed form exists for A and B")
        })?;
        let nff = lp_norm_with(&field, pq.q, &target, exec)?;
        let nf = spec
            .analytic_input_norm(pq)
            .expect("A and B have analytic norms");
        return Ok((nf, nff));
    }

    let support = spec.datum_support();
    let target = spec.target_region();
    let (s_lo, s_hi) = bbox(&support)?;
    let (t_lo, t_hi) = bbox(&target)?;
    let d = spec.dim();
    let omega = spec.bandwidth();
    let width = target.min_width().ok_or(Error::UnboundedRegion)?;

    // Per-axis spacing from the sampling rule, shrunk so the support edges fall on cell edges.
    // Direct sums see the phase e^{-ix.xi} on top of the datum; the FFT only has to resolve the
    // datum and reach the target (its output spans +-pi/h).
    let mut h = vec![0.0; d];
    let mut n_sup = vec![0usize; d];
    for k in 0..d {
        let span = s_hi[k] - s_lo[k];
        let tmax = t_lo[k].abs().max(t_hi[k].abs());
        let h_max = match method {
            TransformMethod::FastTransform => {
                (2.0 * PI / (policy.samples_per_period * omega)).min(PI / (2.0 * tmax))
            }
            _ => 2.0 * PI / (policy.samples_per_period * (omega + tmax)),
        };
        n_sup[k] = cells_for(span, h_max)?;
        h[k] = span / n_sup[k] as f64;
    }

    // the computed side is measured with the exponent of its own space
    let (out_exp, known) = match spec.datum() {
        Datum::Input => (
            pq.q,
            spec.analytic_input_norm(pq).expect("analytic input norm"),
        ),
        Datum::Transform => (
            pq.p,
            spec.analytic_transform_norm(pq)
                .expect("analytic transform norm"),
        ),
    };

    let measured = match method {
        TransformMethod::FastTransform => {
            let mut n = vec![0usize; d];
            let mut hi = vec![0.0; d];
            for k in 0..d {
                let span = s_hi[k] - s_lo[k];
                let len = (policy.pad_factor * span)
                    .max(2.0 * PI * policy.min_target_nodes as f64 / width);
                n[k] = cells_for(len, h[k])?.max(n_sup[k]);
                hi[k] = s_lo[k] + n[k] as f64 * h[k];
            }
            let grid = GridSpec::with_budget(s_lo.clone(), hi, n, budget)?;
            let field = sample_datum(spec, grid, omega, exec)?;
            let out = match spec.datum() {
                Datum::Input => fourier_fast_with(&field, exec)?,
                Datum::Transform => inverse_fourier_with(&field, None, exec)?,
            };
            covers(out.grid(), &t_lo, &t_hi)?;
            lp_norm_with(&out, out_exp, &target, exec)?
        }
        TransformMethod::DirectQuadrature => {
            let grid = GridSpec::with_budget(s_lo.clone(), s_hi.clone(), n_sup, budget)?;
            let field = sample_datum(spec, grid, omega, exec)?;
            let spans: Vec<f64> = (0..d).map(|k| s_hi[k] - s_lo[k]).collect();
            let out_grid = target_grid(&t_lo, &t_hi, width, &spans, policy, budget)?;
            direct_on_target(&field, &out_grid, &target, spec.datum(), out_exp, exec)?
        }
        TransformMethod::ClosedForm => unreachable!("handled above"),
    };
    Ok(match spec.datum() {
        Datum::Input => (known, measured),
        Datum::Transform => (measured, known),
    })
}

fn measure_scaling(
    spec: &FamilySpec,
    pq: ExponentPair,
    method: TransformMethod,
    policy: &GridPolicy,
    budget: NodeBudget,
    exec: Execution,
) -> Result<(f64, f64)> {
    let field = spec
        .dilated_base()
        .ok_or_else(|| Error::InvalidParameter("family S needs a base".into()))?;
    let grid = field.grid().clone();
    let d = grid.dim();
    let nf = lp_norm_with(&field, pq.p, &grid.bounds(), exec)?;
    let target = spec.target_region();
    let (t_lo, t_hi) = bbox(&target)?;
    let width = target.min_width().ok_or(Error::UnboundedRegion)?;
    let spans: Vec<f64> = (0..d).map(|k| grid.hi()[k] - grid.lo()[k]).collect();
    let nff = match method {
        TransformMethod::FastTransform => {
            let n: Vec<usize> = (0..d)
                .map(|k| {
                    let len = (policy.pad_factor * spans[k])
                        .max(2.0 * PI * policy.min_target_nodes as f64 / width);
                    cells_for(len, grid.spacing(k)).map(|c| c.max(grid.counts()[k]))
                })
                .collect::<Result<_>>()?;
            let padded = field.zero_pad(&n, budget)?;
            let out = fourier_fast_with(&padded, exec)?;
            covers(out.grid(), &t_lo, &t_hi)?;
            lp_norm_with(&out, pq.q, &target, exec)?
        }
        TransformMethod::DirectQuadrature => {
            let out_grid = target_grid(&t_lo, &t_hi, width, &spans, policy, budget)?;
            direct_on_target(&field, &out_grid, &target, Datum::Input, pq.q, exec)?
        }
        TransformMethod::ClosedForm => unreachable!("rejected by supports()"),
    };
    Ok((nf, nff))
}

fn bbox(r: &Region) -> Result<(Vec<f64>, Vec<f64>)> {
    r.bounding_box().ok_or(Error::UnboundedRegion)
}

fn cells_for(len: f64, h: f64) -> Result<usize> {
    let c = (len / h * (1.0 - 1e-12)).ceil();
    if !(c.is_finite() && c >= 1.0) {
        return Err(Error::InvalidGrid(format!(
            "cannot cover length {len} with spacing {h}"
        )));
    }
    if c > u64::MAX as f64 {
        return Err(Error::BudgetExceeded {
            nodes: u128::MAX,
            budget: 0,
        });
    }
    Ok(c as usize)
}

fn sample_datum(
    spec: &FamilySpec,
    grid: GridSpec,
    omega: f64,
    exec: Execution,
) -> Result<SampledField> {
    let d = grid.dim();
    SampledField::from_fn(grid, exec, |y| spec.evaluate(y).expect("analytic datum"))?
        .with_bandwidth(vec![omega; d])
}

/// Output grid on the target box, fine enough to resolve both the target and
/// the `2π / span` oscillation scale of the transform.
fn target_grid(
    t_lo: &[f64],
    t_hi: &[f64],
    width: f64,
    spans: &[f64],
    policy: &GridPolicy,
    budget: NodeBudget,
) -> Result<GridSpec> {
    let d = t_lo.len();
    let n = (0..d)
        .map(|k| {
            let step = (width / policy.min_target_nodes as f64)
                .min(2.0 * PI / (policy.pad_factor * spans[k]));
            cells_for(t_hi[k] - t_lo[k], step)
        })
        .collect::<Result<Vec<_>>>()?;
    GridSpec::with_budget(t_lo.to_vec(), t_hi.to_vec(), n, budget)
}

fn direct_on_target(
    field: &SampledField,
    out_grid: &GridSpec,
    target: &Region,
    datum: Datum,
    exponent: Exponent,
    exec: Execution,
) -> Result<f64> {
    let d = out_grid.dim();
    let mut idx = Vec::new();
    let mut pts = Vec::new();
    let mut y = [0.0f64; MAX_DIM];
    for i in 0..out_grid.len() {
        out_grid.node(i, &mut y[..d]);
        if target.contains_point(&y[..d]) {
            idx.push(i);
            pts.push(y[..d].to_vec());
        }
    }
    if pts.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let vals = match datum {
        Datum::Input => fourier_direct_with(field, &pts, exec)?,
        Datum::Transform => inverse_direct_with(field, &pts, exec)?,
    };
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); out_grid.len()];
    for (i, v) in idx.into_iter().zip(vals) {
        out[i] = v;
    }
    let out = SampledField::new(out_grid.clone(), out)?;
    lp_norm_with(&out, exponent, target, exec)
}

fn covers(grid: &GridSpec, lo: &[f64], hi: &[f64]) -> Result<()> {
    for k in 0..grid.dim() {
        if grid.lo()[k] > lo[k] || grid.hi()[k] < hi[k] {
            return Err(Error::InvalidGrid(format!(
                "transform grid [{}, {}) on axis {k} does not cover target [{}, {}]",
                grid.lo()[k],
                grid.hi()[k],
                lo[k],
                hi[k]
            )));
        }
    }
    Ok(())
}
