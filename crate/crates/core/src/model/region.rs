use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a [`Region`]. Balls and shells are centred at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { d: usize, radius: f64 },
    Shell { d: usize, inner: f64, outer: f64 },
    BallComplement { d: usize, radius: f64 },
    BoxComplement { lo: Vec<f64>, hi: Vec<f64> },
}

/// A subset of `R^d`.
///
/// Membership conventions: boxes are `lo <= x < hi` per axis, balls are
/// `|x| < r`, shells are `a < |x| < b`, and each complement is the exact set
/// complement of its bounded counterpart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionKind", into = "RegionKind")]
pub struct Region {
    kind: RegionKind,
}

impl TryFrom<RegionKind> for Region {
    type Error = Error;

    fn try_from(kind: RegionKind) -> Result<Self> {
        match &kind {
            RegionKind::Box { lo, hi } | RegionKind::BoxComplement { lo, hi } => check_box(lo, hi)?,
            RegionKind::Ball { d, radius } | RegionKind::BallComplement { d, radius } => {
                check_dim(*d)?;
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidRegion(format!(
                        "ball radius {radius} must be > 0"
                    )));
                }
            }
            RegionKind::Shell { d, inner, outer } => {
                check_dim(*d)?;
                if !(inner.is_finite() && outer.is_finite() && 0.0 < *inner && inner < outer) {
                    return Err(Error::InvalidRegion(format!(
                        "shell needs 0 < inner < outer, got ({inner}, {outer})"
                    )));
                }
            }
        }
        Ok(Region { kind })
    }
}

impl From<Region> for RegionKind {
    fn from(r: Region) -> Self {
        r.kind
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidRegion("dimension must be positive".into()));
    }
    Ok(())
}

fn check_box(lo: &[f64], hi: &[f64]) -> Result<()> {
    check_dim(lo.len())?;
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch {
            expected: lo.len(),
            got: hi.len(),
        });
    }
    for (k, (a, b)) in lo.iter().zip(hi).enumerate() {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidRegion(format!(
                "box axis {k} needs lo < hi, got [{a}, {b}]"
            )));
        }
    }
    Ok(())
}

/// Volume of the unit ball in `R^d`: `π^{d/2} / Γ(d/2 + 1)`.
///
/// Evaluated with the exact recurrence `ω_d = 2π/d · ω_{d-2}`, `ω_0 = 1`, `ω_1 = 2`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

impl Region {
    pub fn new(kind: RegionKind) -> Result<Self> {
        Region::try_from(kind)
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Region::new(RegionKind::Box { lo, hi })
    }

    /// The cube `[lo, hi)^d`.
    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Region::boxed(vec![lo; d], vec![hi; d])
    }

    pub fn ball(d: usize, radius: f64) -> Result<Self> {
        Region::new(RegionKind::Ball { d, radius })
    }

    pub fn shell(d: usize, inner: f64, outer: f64) -> Result<Self> {
        Region::new(RegionKind::Shell { d, inner, outer })
    }

    pub fn ball_complement(d: usize, radius: f64) -> Result<Self> {
        Region::new(RegionKind::BallComplement { d, radius })
    }

    pub fn box_complement(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Region::new(RegionKind::BoxComplement { lo, hi })
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            RegionKind::Box { lo, .. } | RegionKind::BoxComplement { lo, .. } => lo.len(),
            RegionKind::Ball { d, .. }
            | RegionKind::Shell { d, .. }
            | RegionKind::BallComplement { d, .. } => *d,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            self.kind,
            RegionKind::Box { .. } | RegionKind::Ball { .. } | RegionKind::Shell { .. }
        )
    }

    /// Exact Lebesgue measure.
    pub fn volume(&self) -> Result<f64> {
        match &self.kind {
            RegionKind::Box { lo, hi } => Ok(lo.iter().zip(hi).map(|(a, b)| b - a).product()),
            RegionKind::Ball { d, radius } => Ok(unit_ball_volume(*d) * radius.powi(*d as i32)),
            RegionKind::Shell { d, inner, outer } => {
                let w = unit_ball_volume(*d);
                Ok(w * outer.powi(*d as i32) - w * inner.powi(*d as i32))
            }
            RegionKind::BallComplement { .. } | RegionKind::BoxComplement { .. } => {
                Err(Error::UnboundedRegion)
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.contains_point(x))
    }

    /// Membership without the dimension check; `x.len()` must equal `dim()`.
    #[inline]
    pub fn contains_point(&self, x: &[f64]) -> bool {
        match &self.kind {
            RegionKind::Box { lo, hi } => in_box(lo, hi, x),
            RegionKind::BoxComplement { lo, hi } => !in_box(lo, hi, x),
            RegionKind::Ball { radius, .. } => norm_sq(x) < radius * radius,
            RegionKind::BallComplement { radius, .. } => norm_sq(x) >= radius * radius,
            RegionKind::Shell { inner, outer, .. } => {
                let r2 = norm_sq(x);
                inner * inner < r2 && r2 < outer * outer
            }
        }
    }

    /// Smallest extent of a bounded region: shortest box side, ball
    /// diameter, or shell thickness.
    pub fn min_width(&self) -> Option<f64> {
        match &self.kind {
            RegionKind::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).reduce(f64::min),
            RegionKind::Ball { radius, .. } => Some(2.0 * radius),
            RegionKind::Shell { inner, outer, .. } => Some(outer - inner),
            _ => None,
        }
    }

    /// Smallest axis-aligned box containing the region, for bounded kinds.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.kind {
            RegionKind::Box { lo, hi } => Some((lo.clone(), hi.clone())),
            RegionKind::Ball { d, radius } => Some((vec![-radius; *d], vec![*radius; *d])),
            RegionKind::Shell { d, outer, .. } => Some((vec![-outer; *d], vec![*outer; *d])),
            _ => None,
        }
    }
}

#[inline]
fn in_box(lo: &[f64], hi: &[f64], x: &[f64]) -> bool {
    lo.iter()
        .zip(hi)
        .zip(x)
        .all(|((a, b), v)| *a <= *v && *v < *b)
}

#[inline]
pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn volumes() {
        assert_eq!(Region::cube(2, 0.0, 1.0).unwrap().volume().unwrap(), 1.0);
        assert_eq!(Region::ball(1, 1.0).unwrap().volume().unwrap(), 2.0);
        let n = 10.0_f64;
        let r = Region::cube(2, n * n + n, n * n + 2.0 * n).unwrap();
        assert_relative_eq!(r.volume().unwrap(), 100.0, max_relative = 1e-12);
        assert_relative_eq!(unit_ball_volume(2), PI);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn unbounded_volume_errors() {
        let r = Region::ball_complement(2, 3.0).unwrap();
        assert!(matches!(r.volume(), Err(Error::UnboundedRegion)));
        let r = Region::box_complement(vec![0.0], vec![1.0]).unwrap();
        assert!(matches!(r.volume(), Err(Error::UnboundedRegion)));
    }

    #[test]
    fn shell_volume_is_difference_of_balls() {
        for d in 1..=5 {
            let s = Region::shell(d, 2.0, 5.0).unwrap().volume().unwrap();
            let b5 = Region::ball(d, 5.0).unwrap().volume().unwrap();
            let b2 = Region::ball(d, 2.0).unwrap().volume().unwrap();
            assert_eq!(s, b5 - b2);
        }
    }

    #[test]
    fn membership_conventions() {
        let s = Region::shell(1, 2.0, 5.0).unwrap();
        assert!(s.contains(&[3.0]).unwrap());
        assert!(!s.contains(&[2.0]).unwrap());
        assert!(!s.contains(&[5.0]).unwrap());
        assert!(s.contains(&[-4.0]).unwrap());

        let n = 7.0;
        let c = Region::ball_complement(2, n).unwrap();
        assert!(c.contains(&[n + 1.0, 0.0]).unwrap());
        assert!(!c.contains(&[0.0, 0.0]).unwrap());

        let b = Region::cube(1, 0.0, 1.0).unwrap();
        assert!(b.contains(&[0.0]).unwrap());
        assert!(!b.contains(&[1.0]).unwrap());
        assert!(matches!(
            b.contains(&[0.0, 0.0]),
            Err(Error::DimensionMismatch {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn invalid_regions_rejected() {
        assert!(Region::cube(1, 1.0, 1.0).is_err());
        assert!(Region::ball(2, 0.0).is_err());
        assert!(Region::shell(2, 3.0, 2.0).is_err());
        assert!(Region::shell(2, 0.0, 2.0).is_err());
        assert!(Region::ball(0, 1.0).is_err());
        assert!(Region::boxed(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let r = Region::shell(2, 3.0, 4.0).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"kind":"shell","d":2,"inner":3.0,"outer":4.0}"#);
        assert_eq!(serde_json::from_str::<Region>(&s).unwrap(), r);
        let bad = r#"{"kind":"ball","d":1,"radius":-1.0}"#;
        assert!(serde_json::from_str::<Region>(bad).is_err());
    }

    #[test]
    fn monte_carlo_volume_within_three_sigma() {
        let mut rng = StdRng::seed_from_u64(7);
        let regions = [
            Region::ball(2, 1.0).unwrap(),
            Region::shell(2, 0.5, 1.5).unwrap(),
            Region::shell(3, 1.0, 2.0).unwrap(),
            Region::boxed(vec![-0.5, 0.0], vec![0.25, 1.0]).unwrap(),
        ];
        let samples = 100_000;
        for r in &regions {
            let (lo, hi) = r.bounding_box().unwrap();
            let bbox: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
            let mut x = vec![0.0; r.dim()];
            let mut hits = 0usize;
            for _ in 0..samples {
                for k in 0..x.len() {
                    x[k] = rng.random_range(lo[k]..hi[k]);
                }
                hits += r.contains_point(&x) as usize;
            }
            let frac = hits as f64 / samples as f64;
            let exact = r.volume().unwrap() / bbox;
            let sigma = (exact * (1.0 - exact) / samples as f64).sqrt();
            assert!(
                (frac - exact).abs() <= 3.0 * sigma,
                "{r:?}: {frac} vs {exact} (σ = {sigma})"
            );
        }
    }
}
