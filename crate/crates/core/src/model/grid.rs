use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::region::Region;

/// Upper bound on the number of nodes a single grid may hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeBudget(pub u64);

impl NodeBudget {
    /// 2^24 nodes, 256 MiB of complex samples.
    pub const DEFAULT: NodeBudget = NodeBudget(1 << 24);
    pub const ENV_VAR: &'static str = "FSL_BUDGET_NODES";

    /// `FSL_BUDGET_NODES` if set and valid, else [`NodeBudget::DEFAULT`].
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .ok()
                .filter(|&n| n > 0)
                .map(NodeBudget)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "{} = {v:?} is not a positive integer",
                        Self::ENV_VAR
                    ))
                }),
            Err(_) => Ok(Self::DEFAULT),
        }
    }
}

impl Default for NodeBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Largest supported grid dimension.
pub const MAX_DIM: usize = 8;

#[derive(Deserialize)]
struct RawGrid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    n: Vec<usize>,
}

/// Uniform tensor grid on `∏ [lo_k, hi_k)` with `n_k` cells per axis.
///
/// Samples live at cell centres `lo_k + (i + 1/2) h_k`, so Riemann sums over
/// the grid are midpoint rules. Values are stored row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
    n: Vec<usize>,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        GridSpec::new(raw.lo, raw.hi, raw.n)
    }
}

impl GridSpec {
    /// Grid checked against [`NodeBudget::DEFAULT`].
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, n: Vec<usize>) -> Result<Self> {
        GridSpec::with_budget(lo, hi, n, NodeBudget::DEFAULT)
    }

    pub fn with_budget(
        lo: Vec<f64>,
        hi: Vec<f64>,
        n: Vec<usize>,
        budget: NodeBudget,
    ) -> Result<Self> {
        let d = lo.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension {d} is outside 1..={MAX_DIM}"
            )));
        }
        if hi.len() != d || n.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: if hi.len() != d { hi.len() } else { n.len() },
            });
        }
        let mut nodes: u128 = 1;
        for k in 0..d {
            if !(lo[k].is_finite() && hi[k].is_finite() && lo[k] < hi[k]) {
                return Err(Error::InvalidGrid(format!(
                    "axis {k} needs finite lo < hi, got [{}, {}]",
                    lo[k], hi[k]
                )));
            }
            if n[k] == 0 {
                return Err(Error::InvalidGrid(format!("axis {k} has zero samples")));
            }
            nodes = nodes.saturating_mul(n[k] as u128);
        }
        if nodes > budget.0 as u128 {
            return Err(Error::BudgetExceeded {
                nodes,
                budget: budget.0,
            });
        }
        let g = GridSpec { lo, hi, n };
        let h = g.cell_volume();
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "cell volume {h} is not positive and finite"
            )));
        }
        Ok(g)
    }

    /// The same cell-count `n` on every axis of `[lo, hi)^d`.
    pub fn cube(d: usize, lo: f64, hi: f64, n: usize) -> Result<Self> {
        GridSpec::new(vec![lo; d], vec![hi; d], vec![n; d])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn counts(&self) -> &[usize] {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.n[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.spacing(k)).product()
    }

    /// Coordinate of the `i`-th node on `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + (i as f64 + 0.5) * self.spacing(axis)
    }

    /// All node coordinates on one axis.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.n[axis]).map(|i| self.coord(axis, i)).collect()
    }

    /// Write the coordinates of flat node `idx` into `out`.
    #[inline]
    pub fn node(&self, mut idx: usize, out: &mut [f64]) {
        for k in (0..self.dim()).rev() {
            let i = idx % self.n[k];
            idx /= self.n[k];
            out[k] = self.coord(k, i);
        }
    }

    /// Row-major stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.n[axis + 1..].iter().product()
    }

    pub fn bounds(&self) -> Region {
        Region::boxed(self.lo.clone(), self.hi.clone()).expect("grid bounds are a valid box")
    }
}

/// Complex samples of a function on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    values: Vec<Complex64>,
    /// Declared per-axis bound on the local angular frequency `|∂_k phase|`.
    bandwidth: Option<Vec<f64>>,
}

impl SampledField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite(i));
        }
        Ok(SampledField {
            grid,
            values,
            bandwidth: None,
        })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); grid.len()];
        SampledField {
            grid,
            values,
            bandwidth: None,
        }
    }

    /// Sample `f` at every node.
    pub fn from_fn<F>(grid: GridSpec, exec: Execution, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Sync + Send,
    {
        let d = grid.dim();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        exec.fill(&mut values, |idx| {
            let mut x = [0.0f64; MAX_DIM];
            grid.node(idx, &mut x[..d]);
            f(&x[..d])
        });
        SampledField::new(grid, values)
    }

    /// Declare a bound on the local angular frequency per axis, used by the sampling rule.
    pub fn with_bandwidth(mut self, bandwidth: Vec<f64>) -> Result<Self> {
        if bandwidth.len() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                got: bandwidth.len(),
            });
        }
        self.bandwidth = Some(bandwidth);
        Ok(self)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn declared_bandwidth(&self) -> Option<&[f64]> {
        self.bandwidth.as_deref()
    }

    /// Per-axis local angular frequency: the declared bound, or an estimate
    /// from phase increments between neighbouring samples.
    ///
    /// Samples below `1e-9` of the peak modulus are skipped; their phase is
    /// rounding noise.
    pub fn local_frequency(&self) -> Vec<f64> {
        if let Some(b) = &self.bandwidth {
            return b.clone();
        }
        let d = self.grid.dim();
        let floor = 1e-9 * self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let floor_sq = floor * floor;
        (0..d)
            .map(|k| {
                let stride = self.grid.stride(k);
                let n = self.grid.counts()[k];
                let h = self.grid.spacing(k);
                let mut best = 0.0f64;
                for idx in 0..self.values.len() {
                    if (idx / stride) % n + 1 == n {
                        continue;
                    }
                    let a = self.values[idx];
                    let b = self.values[idx + stride];
                    if a.norm_sqr() > floor_sq && b.norm_sqr() > floor_sq {
                        best = best.max((b * a.conj()).arg().abs() / h);
                    }
                }
                best.min(PI / h)
            })
            .collect()
    }

    /// Multiply every sample by `c`.
    pub fn scaled(mut self, c: Complex64) -> Self {
        for v in &mut self.values {
            *v *= c;
        }
        self
    }

    /// Extend each axis with zeros to `n_new[k] >= n[k]` cells, keeping `lo` and the spacing.
    pub fn zero_pad(&self, n_new: &[usize], budget: NodeBudget) -> Result<Self> {
        let d = self.grid.dim();
        if n_new.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: n_new.len(),
            });
        }
        let old = self.grid.counts();
        if n_new.iter().zip(old).any(|(a, b)| a < b) {
            return Err(Error::InvalidGrid("zero_pad cannot shrink a grid".into()));
        }
        let hi: Vec<f64> = (0..d)
            .map(|k| self.grid.lo()[k] + n_new[k] as f64 * self.grid.spacing(k))
            .collect();
        let grid = GridSpec::with_budget(self.grid.lo().to_vec(), hi, n_new.to_vec(), budget)?;
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut multi = vec![0usize; d];
        for (idx, v) in self.values.iter().enumerate() {
            let mut rem = idx;
            for k in (0..d).rev() {
                multi[k] = rem % old[k];
                rem /= old[k];
            }
            let mut flat = 0usize;
            for k in 0..d {
                flat = flat * n_new[k] + multi[k];
            }
            values[flat] = *v;
        }
        Ok(SampledField {
            grid,
            values,
            bandwidth: self.bandwidth.clone(),
        })
    }

    pub(crate) fn from_parts(
        grid: GridSpec,
        values: Vec<Complex64>,
        bandwidth: Option<Vec<f64>>,
    ) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        SampledField {
            grid,
            values,
            bandwidth,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_centres_and_volume() {
        let g = GridSpec::new(vec![0.0, -1.0], vec![1.0, 1.0], vec![4, 2]).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.cell_volume(), 0.25);
        let mut x = [0.0; 2];
        g.node(0, &mut x);
        assert_eq!(x, [0.125, -0.5]);
        g.node(7, &mut x);
        assert_eq!(x, [0.875, 0.5]);
        assert_eq!(g.stride(0), 2);
        assert_eq!(g.stride(1), 1);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(vec![0.0], vec![0.0], vec![4]).is_err());
        assert!(GridSpec::new(vec![0.0], vec![1.0], vec![0]).is_err());
        assert!(GridSpec::new(vec![], vec![], vec![]).is_err());
        assert!(GridSpec::new(vec![0.0, 0.0], vec![1.0], vec![2, 2]).is_err());
        let e = GridSpec::with_budget(
            vec![0.0; 2],
            vec![1.0; 2],
            vec![100, 100],
            NodeBudget(9_999),
        );
        assert!(matches!(
            e,
            Err(Error::BudgetExceeded {
                nodes: 10_000,
                budget: 9_999
            })
        ));
    }

    #[test]
    fn grid_json_is_validated() {
        let g: GridSpec = serde_json::from_str(r#"{"lo":[0.0],"hi":[2.0],"n":[8]}"#).unwrap();
        assert_eq!(g.spacing(0), 0.25);
        assert!(serde_json::from_str::<GridSpec>(r#"{"lo":[0.0],"hi":[-2.0],"n":[8]}"#).is_err());
    }

    #[test]
    fn field_rejects_non_finite_and_wrong_length() {
        let g = GridSpec::cube(1, 0.0, 1.0, 3).unwrap();
        let bad = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(f64::NAN, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        assert!(matches!(
            SampledField::new(g.clone(), bad),
            Err(Error::NonFinite(1))
        ));
        assert!(SampledField::new(g, vec![Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn local_frequency_estimate_tracks_chirp() {
        let g = GridSpec::cube(1, 0.0, 1.0, 1000).unwrap();
        let w = 50.0;
        let f = SampledField::from_fn(g, Execution::default(), |x| {
            Complex64::from_polar(1.0, w * x[0])
        })
        .unwrap();
        let est = f.local_frequency()[0];
        assert!((est - w).abs() < 1e-6 * w, "{est}");
        let declared = f.with_bandwidth(vec![60.0]).unwrap();
        assert_eq!(declared.local_frequency(), vec![60.0]);
    }

    #[test]
    fn zero_pad_keeps_samples_in_place() {
        let g = GridSpec::new(vec![0.0, 0.0], vec![2.0, 3.0], vec![2, 3]).unwrap();
        let f = SampledField::from_fn(g, Execution::Sequential, |x| Complex64::new(x[0], x[1]))
            .unwrap();
        let p = f.zero_pad(&[4, 5], NodeBudget::DEFAULT).unwrap();
        assert_eq!(p.grid().hi(), &[4.0, 5.0]);
        let mut x = [0.0; 2];
        for (idx, v) in p.values().iter().enumerate() {
            p.grid().node(idx, &mut x);
            let expect = if x[0] < 2.0 && x[1] < 3.0 {
                Complex64::new(x[0], x[1])
            } else {
                Complex64::new(0.0, 0.0)
            };
            assert_eq!(*v, expect);
        }
    }
}
