//! Admissibility of exponent pairs.

use crate::error::{Error, Result};
use crate::families::FamilyId;
use crate::model::ExponentPair;

pub const LINE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RegionVerdict {
    pub pq: ExponentPair,
    /// Inside the trapezoid `1/p + 1/q >= 1`, `1/2 <= 1/p <= 1`.
    pub bounded_admissible: bool,
    /// On the segment `1/p + 1/q = 1`, `1/p >= 1/2`.
    pub hy_line_admissible: bool,
    /// Families whose exponent is positive at `pq`, in `A..S` order.
    pub defeated_by: Vec<FamilyId>,
}

pub fn classify_point(pq: ExponentPair) -> RegionVerdict {
    let (ip, iq) = (pq.inv_p(), pq.inv_q());
    let defeated_by: Vec<FamilyId> = FamilyId::ALL
        .into_iter()
        .filter(|f| f.defeats(pq))
        .collect();
    // S and C bound the bounded-domain problem from outside the trapezoid
    let bounded_admissible = !FamilyId::S.defeats(pq) && !FamilyId::C.defeats(pq);
    let hy_line_admissible = (ip + iq - 1.0).abs() <= LINE_TOL && ip >= 0.5;
    RegionVerdict {
        pq,
        bounded_admissible,
        hy_line_admissible,
        defeated_by,
    }
}

/// Lattice `{0, s, 2s, …} ∩ [0, 1]` squared, `1/p` outer, `1/q` inner.
pub fn classify_grid(step: f64) -> Result<Vec<RegionVerdict>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "grid step {step} outside (0, 1]"
        )));
    }
    let m = (1.0 / step + 1e-9).floor() as usize;
    let coords: Vec<f64> = (0..=m).map(|k| (k as f64 * step).min(1.0)).collect();
    let mut out = Vec::with_capacity(coords.len() * coords.len());
    for &ip in &coords {
        for &iq in &coords {
            out.push(classify_point(ExponentPair::from_inv(ip, iq)?));
        }
    }
    Ok(out)
}
