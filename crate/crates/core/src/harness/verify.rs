use std::fmt;

use serde::{Deserialize, Serialize};

use crate::harness::sweep::SweepResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOutcome {
    pub verdict: Verdict,
    pub detail: String,
}

/// Equality check `|fitted - predicted| <= tol`, or the one-sided
/// `fitted >= predicted - tol` for lower-bound families.
pub fn verify_slope(
    fitted: f64,
    predicted: f64,
    tolerance: f64,
    lower_bound: bool,
) -> VerifyOutcome {
    let ok = if lower_bound {
        fitted >= predicted - tolerance
    } else {
        (fitted - predicted).abs() <= tolerance
    };
    let verdict = if ok && fitted.is_finite() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let rel = if lower_bound { ">=" } else { "within" };
    let detail = format!(
        "fitted slope {fitted:.4}, predicted {predicted:.4}, required {rel} {tolerance} of prediction"
    );
    VerifyOutcome { verdict, detail }
}

pub fn verify_sweep(result: &SweepResult, tolerance: f64) -> VerifyOutcome {
    verify_slope(
        result.fitted_slope,
        result.predicted_slope,
        tolerance,
        result.is_lower_bound(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_and_lower_bound_semantics() {
        assert!(verify_slope(1.1, 1.0, 0.15, false).verdict.passed());
        assert!(!verify_slope(2.0, 1.0, 0.15, false).verdict.passed());
        assert!(!verify_slope(0.8, 1.0, 0.15, false).verdict.passed());
        assert!(verify_slope(0.3, 0.1, 0.15, true).verdict.passed());
        assert!(verify_slope(5.0, 0.1, 0.15, true).verdict.passed());
        assert!(!verify_slope(-0.1, 0.1, 0.15, true).verdict.passed());
        assert!(!verify_slope(f64::NAN, 0.0, 0.15, false).verdict.passed());
    }

    #[test]
    fn verdict_serializes_uppercase() {
        assert_eq!(serde_json::to_string(&Verdict::Pass).unwrap(), "\"PASS\"");
        assert_eq!(Verdict::Fail.to_string(), "FAIL");
    }
}
