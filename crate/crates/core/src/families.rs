//! Counterexample families for the restriction problem `‖Ff‖_{L^q(T)} ≲ ‖f‖_{L^p}`.
//!
//! Each family is a one-parameter sequence of data whose norm ratio grows
//! like `N^α` (or `λ^{-α}` for the scaling family); `α > 0` defeats the bound
//! at the exponent pair.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{norm_sq, ExponentPair, GridSpec, Region, SampledField, MAX_DIM};
use crate::stationary::{leading_term, QuadraticPhase};
use crate::transform::{box_chirp_factor, dilate, TransformMethod};

/// Exponents at or below this are treated as zero (not a blow-up).
pub const DEFEAT_EPS: f64 = 1e-12;

pub const DEFAULT_DELTA: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    A,
    B,
    C,
    D,
    E,
    S,
}

impl FamilyId {
    pub const ALL: [FamilyId; 6] = [
        FamilyId::A,
        FamilyId::B,
        FamilyId::C,
        FamilyId::D,
        FamilyId::E,
        FamilyId::S,
    ];

    /// Blow-up exponent of the ratio in `N` (in `1/λ` for `S`).
    pub fn predicted_exponent(self, d: usize, pq: ExponentPair) -> f64 {
        let (ip, iq) = (pq.inv_p(), pq.inv_q());
        let d = d as f64;
        match self {
            FamilyId::A => d * (ip + iq - 1.0),
            FamilyId::B | FamilyId::S => d * (1.0 - ip - iq),
            FamilyId::C => d * (1.0 - 2.0 * ip) / 2.0,
            FamilyId::D => d * (2.0 * iq - 1.0),
            FamilyId::E => d * (iq - ip),
        }
    }

    /// Every exponent is `d` times an expression in `(1/p, 1/q)`, so `d = 1` decides.
    pub fn defeats(self, pq: ExponentPair) -> bool {
        self.predicted_exponent(1, pq) > DEFEAT_EPS
    }

    pub fn default_method(self) -> TransformMethod {
        match self {
            FamilyId::A | FamilyId::B => TransformMethod::ClosedForm,
            _ => TransformMethod::FastTransform,
        }
    }

    pub fn supports(self, method: TransformMethod) -> bool {
        method != TransformMethod::ClosedForm || matches!(self, FamilyId::A | FamilyId::B)
    }

    /// `S` only bounds the ratio from below; the others predict it.
    pub fn is_lower_bound(self) -> bool {
        self == FamilyId::S
    }

    /// Built-in sweep values.
    pub fn default_sweep(self, d: usize) -> Vec<f64> {
        match self {
            FamilyId::A | FamilyId::B => vec![8.0, 16.0, 32.0, 64.0, 128.0],
            FamilyId::S => vec![0.5, 0.25, 0.125],
            _ if d == 1 => vec![8.0, 16.0, 32.0, 64.0],
            _ => vec![4.0, 8.0, 16.0],
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyId::A => "A",
            FamilyId::B => "B",
            FamilyId::C => "C",
            FamilyId::D => "D",
            FamilyId::E => "E",
            FamilyId::S => "S",
        };
        f.write_str(s)
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(FamilyId::A),
            "B" => Ok(FamilyId::B),
            "C" => Ok(FamilyId::C),
            "D" => Ok(FamilyId::D),
            "E" => Ok(FamilyId::E),
            "S" => Ok(FamilyId::S),
            _ => Err(Error::InvalidParameter(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyParams {
    pub d: usize,
    /// `N`, or `λ` for the scaling family.
    pub n: f64,
    pub delta: f64,
}

impl FamilyParams {
    pub fn new(d: usize, n: f64) -> Self {
        FamilyParams {
            d,
            n,
            delta: DEFAULT_DELTA,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    fn validate(&self, id: FamilyId) -> Result<()> {
        if self.d == 0 || self.d > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "dimension {} outside 1..={MAX_DIM}",
                self.d
            )));
        }
        let n = self.n;
        let ok = n.is_finite()
            && match id {
                FamilyId::A | FamilyId::B => n >= 2.0,
                FamilyId::C => n >= 4.0,
                FamilyId::D | FamilyId::E => n >= 3.0,
                FamilyId::S => n > 0.0 && n < 1.0,
            };
        if !ok {
            let need = match id {
                FamilyId::A | FamilyId::B => "N >= 2",
                FamilyId::C => "N >= 4",
                FamilyId::D | FamilyId::E => "N >= 3",
                FamilyId::S => "0 < λ < 1",
            };
            return Err(Error::InvalidParameter(format!(
                "family {id} needs {need}, got {n}"
            )));
        }
        if matches!(id, FamilyId::A | FamilyId::B) && !(self.delta > 0.0 && self.delta <= 0.1) {
            return Err(Error::InvalidParameter(format!(
                "δ = {} outside (0, 0.1]",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Where the analytically known function of a family lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Datum {
    /// `f` is known; `Ff` is computed.
    Input,
    /// `Ff` is known; `f` is computed by the inverse transform (family C).
    Transform,
}

/// One member of a family at a fixed sweep value.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    id: FamilyId,
    params: FamilyParams,
    base: Option<Arc<SampledField>>,
}

/// Tiny box `[0, δ/N)^d` modulated to frequency `N²` on every axis.
pub fn family_a(params: FamilyParams) -> Result<FamilySpec> {
    FamilySpec::new(FamilyId::A, params)
}

/// Box `[N, 2N)^d` modulated to frequency `N²`.
pub fn family_b(params: FamilyParams) -> Result<FamilySpec> {
    FamilySpec::new(FamilyId::B, params)
}

/// Transform datum `Ff(ξ) = e^{-iN|ξ|²/2} χ_{B(1)}(ξ)`.
pub fn family_c(params: FamilyParams) -> Result<FamilySpec> {
    FamilySpec::new(FamilyId::C, params)
}

/// `f(x) = e^{iN²|x|²/2} χ_{2<|x|<5}(x)`.
pub fn family_d(params: FamilyParams) -> Result<FamilySpec> {
    FamilySpec::new(FamilyId::D, params)
}

/// `f(x) = e^{i|x|²/2} χ_{2N<|x|<5N}(x)`.
pub fn family_e(params: FamilyParams) -> Result<FamilySpec> {
    FamilySpec::new(FamilyId::E, params)
}

/// `f_λ(x) = f(λx)` for a base field; `params.n` is `λ`.
pub fn family_s(params: FamilyParams, base: SampledField) -> Result<FamilySpec> {
    params.validate(FamilyId::S)?;
    if base.grid().dim() != params.d {
        return Err(Error::DimensionMismatch {
            expected: params.d,
            got: base.grid().dim(),
        });
    }
    Ok(FamilySpec {
        id: FamilyId::S,
        params,
        base: Some(Arc::new(base)),
    })
}

/// Nodes per axis of the default Gaussian base on `[-20, 20]^d`.
pub fn default_base_nodes(d: usize) -> usize {
    match d {
        1 => 4096,
        2 => 256,
        _ => 64,
    }
}

/// `e^{-|x|²/2}` on `[-20, 20]^d`.
pub fn gaussian_base(d: usize, nodes: usize, exec: Execution) -> Result<SampledField> {
    let grid = GridSpec::cube(d, -20.0, 20.0, nodes)?;
    SampledField::from_fn(grid, exec, |x| {
        Complex64::new((-0.5 * norm_sq(x)).exp(), 0.0)
    })?
    .with_bandwidth(vec![0.0; d])
}

impl FamilySpec {
    /// Any family but `S`, which needs a base field.
    pub fn new(id: FamilyId, params: FamilyParams) -> Result<Self> {
        if id == FamilyId::S {
            let base = gaussian_base(
                params.d,
                default_base_nodes(params.d.max(1)),
                Execution::default(),
            )?;
            return family_s(params, base);
        }
        params.validate(id)?;
        Ok(FamilySpec {
            id,
            params,
            base: None,
        })
    }

    pub fn id(&self) -> FamilyId {
        self.id
    }

    pub fn params(&self) -> FamilyParams {
        self.params
    }

    pub fn dim(&self) -> usize {
        self.params.d
    }

    pub fn datum(&self) -> Datum {
        if self.id == FamilyId::C {
            Datum::Transform
        } else {
            Datum::Input
        }
    }

    pub fn predicted_exponent(&self, pq: ExponentPair) -> f64 {
        self.id.predicted_exponent(self.params.d, pq)
    }

    /// The analytic datum at `y` (`x` for [`Datum::Input`], `ξ` for C). `None` for `S`.
    pub fn evaluate(&self, y: &[f64]) -> Option<Complex64> {
        let n = self.params.n;
        let zero = Complex64::new(0.0, 0.0);
        let inside = self.datum_support().contains_point(y);
        let v = match self.id {
            FamilyId::A | FamilyId::B => {
                let phase: f64 = y.iter().sum::<f64>() * n * n;
                Complex64::from_polar(1.0, phase)
            }
            FamilyId::C => Complex64::from_polar(1.0, -0.5 * n * norm_sq(y)),
            FamilyId::D => Complex64::from_polar(1.0, 0.5 * n * n * norm_sq(y)),
            FamilyId::E => Complex64::from_polar(1.0, 0.5 * norm_sq(y)),
            FamilyId::S => return None,
        };
        Some(if inside { v } else { zero })
    }

    /// Support of the analytic datum.
    pub fn datum_support(&self) -> Region {
        let FamilyParams { d, n, delta } = self.params;
        let r = match self.id {
            FamilyId::A => Region::cube(d, 0.0, delta / n),
            FamilyId::B => Region::cube(d, n, 2.0 * n),
            FamilyId::C => Region::ball(d, 1.0),
            FamilyId::D => Region::shell(d, 2.0, 5.0),
            FamilyId::E => Region::shell(d, 2.0 * n, 5.0 * n),
            FamilyId::S => Ok(self.dilated_base().expect("S has a base").grid().bounds()),
        };
        r.expect("validated parameters give a valid region")
    }

    /// Per-axis bound on the angular frequency of the datum's phase.
    pub fn bandwidth(&self) -> f64 {
        let n = self.params.n;
        match self.id {
            FamilyId::A | FamilyId::B => n * n,
            FamilyId::C => n,
            FamilyId::D => 5.0 * n * n,
            FamilyId::E => 5.0 * n,
            FamilyId::S => {
                let base = self.base.as_ref().expect("S has a base");
                base.local_frequency().into_iter().fold(0.0, f64::max) * n
            }
        }
    }

    /// Region where `‖Ff‖_q` is measured (for C, where `‖f‖_p` is measured).
    pub fn target_region(&self) -> Region {
        let FamilyParams { d, n, delta } = self.params;
        let m = n * n;
        let r = match self.id {
            FamilyId::A => Region::cube(d, m + n, m + 2.0 * n),
            FamilyId::B => Region::cube(d, m + delta / n, m + 2.0 * delta / n),
            FamilyId::C => Region::ball(d, 2.0 * n),
            FamilyId::D => Region::shell(d, 3.0 * m, 4.0 * m),
            FamilyId::E => Region::shell(d, 3.0 * n, 4.0 * n),
            FamilyId::S => Region::ball(d, 1.0),
        };
        r.expect("validated parameters give a valid region")
    }

    /// Region of the input norm `‖f‖_p`.
    pub fn input_norm_region(&self) -> Region {
        match self.id {
            FamilyId::C => self.target_region(),
            _ => self.datum_support(),
        }
    }

    /// `ℓ = ‖f‖_p` in closed form where the family admits one.
    pub fn analytic_input_norm(&self, pq: ExponentPair) -> Option<f64> {
        let FamilyParams { d, n, delta } = self.params;
        let ip = pq.inv_p();
        match self.id {
            FamilyId::A => Some((delta / n).powf(d as f64 * ip)),
            FamilyId::B => Some(n.powf(d as f64 * ip)),
            FamilyId::D | FamilyId::E => Some(self.datum_support().volume().ok()?.powf(ip)),
            FamilyId::C | FamilyId::S => None,
        }
    }

    /// `‖Ff‖_q` in closed form (family C only: `|B(1)|^{1/q}`).
    pub fn analytic_transform_norm(&self, pq: ExponentPair) -> Option<f64> {
        match self.id {
            FamilyId::C => Some(self.datum_support().volume().ok()?.powf(pq.inv_q())),
            _ => None,
        }
    }

    /// Exact `Ff(ξ)` for the modulated boxes A and B.
    pub fn closed_form_transform(&self, xi: &[f64]) -> Option<Complex64> {
        let FamilyParams { n, delta, .. } = self.params;
        let (a, b) = match self.id {
            FamilyId::A => (0.0, delta / n),
            FamilyId::B => (n, 2.0 * n),
            _ => return None,
        };
        Some(
            xi.iter()
                .map(|&x| box_chirp_factor(a, b, n * n, x))
                .product(),
        )
    }

    /// Leading-order `f(x)` for family C from stationary phase, valid on the
    /// shell `N/4 < |x| <= 3N/4`.
    pub fn stationary_surrogate(&self, x: &[f64]) -> Result<Complex64> {
        if self.id != FamilyId::C {
            return Err(Error::MethodUnavailable {
                family: self.id.to_string(),
                method: "stationary-phase".into(),
            });
        }
        let lead = leading_term(&QuadraticPhase::new(self.params.n, x.to_vec())?)?;
        Ok(lead / (2.0 * PI).powi(self.params.d as i32))
    }

    /// The dilated base `f_λ` of family S.
    pub fn dilated_base(&self) -> Option<SampledField> {
        let base = self.base.as_ref()?;
        dilate(base, self.params.n).ok()
    }

    pub fn base(&self) -> Option<&SampledField> {
        self.base.as_deref()
    }
}
