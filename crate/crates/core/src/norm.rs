//! `L^p` norms of sampled fields restricted to regions.
//!
//! Membership is decided at cell centres, matching the midpoint rule used by
//! the transforms: a boundary cell counts fully or not at all.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{Exponent, Region, SampledField, MAX_DIM};

pub fn lp_norm(f: &SampledField, p: Exponent, region: &Region) -> Result<f64> {
    lp_norm_with(f, p, region, Execution::default())
}

pub fn lp_norm_with(
    f: &SampledField,
    p: Exponent,
    region: &Region,
    exec: Execution,
) -> Result<f64> {
    let grid = f.grid();
    let d = grid.dim();
    if region.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: region.dim(),
        });
    }
    let values = f.values();
    let inside = |idx: usize| {
        let mut x = [0.0f64; MAX_DIM];
        grid.node(idx, &mut x[..d]);
        region.contains_point(&x[..d])
    };
    // Max modulus over the restriction; also detects an empty restriction.
    let max = exec
        .max(values.len(), |r| {
            r.filter(|&i| inside(i))
                .map(|i| values[i].norm())
                .reduce(f64::max)
        })
        .ok_or(Error::EmptyRestriction)?;
    if p.is_infinite() {
        return Ok(max);
    }
    if max == 0.0 {
        return Ok(0.0);
    }
    let w = grid.cell_volume();
    let inv = p.inv();
    let s = if inv == 1.0 {
        exec.sum(values.len(), |r| {
            r.filter(|&i| inside(i)).map(|i| values[i].norm()).sum()
        })
    } else if inv == 0.5 {
        exec.sum(values.len(), |r| {
            r.filter(|&i| inside(i)).map(|i| values[i].norm_sqr()).sum()
        })
    } else {
        let pe = p.lebesgue();
        let s = exec.sum(values.len(), |r| {
            r.filter(|&i| inside(i))
                .map(|i| (values[i].norm() / max).powf(pe))
                .sum()
        });
        return Ok(max * (w * s).powf(inv));
    };
    Ok((w * s).powf(inv))
}

/// Both sides of `‖g‖_{L^q̃(Ω)} ≤ |Ω|^{1/q̃ - 1/q} ‖g‖_{L^q(Ω)}` for `q̃ ≤ q`.
pub fn hoelder_embedding_bound(
    g: &SampledField,
    q: Exponent,
    q_tilde: Exponent,
    omega: &Region,
) -> Result<(f64, f64)> {
    if q_tilde.inv() < q.inv() {
        return Err(Error::InvalidExponent(format!(
            "Hölder embedding needs q̃ <= q, got q̃ = {q_tilde}, q = {q}"
        )));
    }
    let vol = omega.volume()?;
    let lhs = lp_norm(g, q_tilde, omega)?;
    let rhs = vol.powf(q_tilde.inv() - q.inv()) * lp_norm(g, q, omega)?;
    Ok((lhs, rhs))
}

/// `‖Ff‖_q / ‖f‖_p`.
pub fn ratio(f_norm_p: f64, ff_norm_q: f64) -> Result<f64> {
    if f_norm_p == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(ff_norm_q / f_norm_p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GridSpec;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn indicator_field(n: usize) -> SampledField {
        let g = GridSpec::cube(1, -1.0, 2.0, n).unwrap();
        SampledField::from_fn(g, Execution::default(), |x| {
            c(if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 })
        })
        .unwrap()
    }

    #[test]
    fn indicator_has_unit_norm() {
        let f = indicator_field(3000);
        let r = Region::cube(1, -1.0, 2.0).unwrap();
        for p in [1.0, 2.0, 3.0, 4.0, f64::INFINITY] {
            let v = lp_norm(&f, Exponent::from_lebesgue(p).unwrap(), &r).unwrap();
            assert_relative_eq!(v, 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn modulated_box_norm_is_side_power() {
        let n = 8.0f64;
        let g = GridSpec::cube(1, n, 2.0 * n, 512).unwrap();
        let f = SampledField::from_fn(g, Execution::default(), |x| {
            Complex64::from_polar(1.0, n * n * x[0])
        })
        .unwrap();
        let r = Region::cube(1, n, 2.0 * n).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let v = lp_norm(&f, Exponent::from_lebesgue(p).unwrap(), &r).unwrap();
            assert_relative_eq!(v, n.powf(1.0 / p), max_relative = 1e-12);
        }
    }

    #[test]
    fn gaussian_l2_norm_matches_oracle() {
        let g = GridSpec::cube(1, -20.0, 20.0, 4096).unwrap();
        let f = SampledField::from_fn(g, Execution::default(), |x| c((-0.5 * x[0] * x[0]).exp()))
            .unwrap();
        let whole = Region::cube(1, -20.0, 20.0).unwrap();
        let v = lp_norm(&f, Exponent::TWO, &whole).unwrap();
        // Oracle: ∫ e^{-x²} dx = √π by a fine trapezoid sum on [-20, 20].
        let m = 400_000;
        let h = 40.0 / m as f64;
        let integral: f64 = (0..=m)
            .map(|i| {
                let x = -20.0 + i as f64 * h;
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                w * (-x * x).exp()
            })
            .sum::<f64>()
            * h;
        assert_relative_eq!(integral.sqrt(), PI.powf(0.25), max_relative = 1e-10);
        assert!((v - PI.powf(0.25)).abs() < 1e-6);
        assert_relative_eq!(v, 1.3313, max_relative = 1e-4);
    }

    #[test]
    fn empty_restriction_and_dimension_errors() {
        let f = indicator_field(30);
        let far = Region::cube(1, 10.0, 11.0).unwrap();
        assert!(matches!(
            lp_norm(&f, Exponent::ONE, &far),
            Err(Error::EmptyRestriction)
        ));
        assert!(matches!(
            lp_norm(&f, Exponent::INFINITY, &far),
            Err(Error::EmptyRestriction)
        ));
        let r2 = Region::ball(2, 1.0).unwrap();
        assert!(matches!(
            lp_norm(&f, Exponent::ONE, &r2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(ratio(2.0, 1.0).unwrap(), 0.5);
        assert!(matches!(ratio(0.0, 1.0), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn hoelder_equality_for_constants() {
        let g = GridSpec::cube(1, 0.0, 1.0, 1000).unwrap();
        let f = SampledField::from_fn(g, Execution::default(), |_| c(-3.0)).unwrap();
        let omega = Region::cube(1, 0.0, 1.0).unwrap();
        let (lhs, rhs) = hoelder_embedding_bound(
            &f,
            Exponent::from_lebesgue(4.0).unwrap(),
            Exponent::TWO,
            &omega,
        )
        .unwrap();
        assert_relative_eq!(lhs, 3.0, max_relative = 1e-12);
        assert_relative_eq!(rhs, 3.0, max_relative = 1e-12);

        let (l2, r2) = hoelder_embedding_bound(&f, Exponent::TWO, Exponent::TWO, &omega).unwrap();
        assert_eq!(l2, r2);

        assert!(hoelder_embedding_bound(
            &f,
            Exponent::TWO,
            Exponent::from_lebesgue(4.0).unwrap(),
            &omega
        )
        .is_err());
        let unbounded = Region::ball_complement(1, 0.5).unwrap();
        assert!(hoelder_embedding_bound(&f, Exponent::TWO, Exponent::ONE, &unbounded).is_err());
    }

    #[test]
    fn infinity_is_limit_of_large_p() {
        let g = GridSpec::cube(1, -1.0, 1.0, 2000).unwrap();
        let f =
            SampledField::from_fn(g, Execution::default(), |x| c(1.0 + 0.1 * x[0].cos())).unwrap();
        let r = Region::cube(1, -1.0, 1.0).unwrap();
        let sup = lp_norm(&f, Exponent::INFINITY, &r).unwrap();
        let p64 = lp_norm(&f, Exponent::from_lebesgue(64.0).unwrap(), &r).unwrap();
        assert!((p64 - sup).abs() <= 0.01 * sup, "{p64} vs {sup}");
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = GridSpec::cube(2, -2.0, 2.0, 300).unwrap();
        let f = SampledField::from_fn(g, Execution::default(), |x| {
            Complex64::from_polar((x[0] * x[1]).cos(), x[0])
        })
        .unwrap();
        let r = Region::shell(2, 0.5, 1.7).unwrap();
        for p in [
            Exponent::ONE,
            Exponent::TWO,
            Exponent::from_lebesgue(3.0).unwrap(),
        ] {
            let a = lp_norm_with(&f, p, &r, Execution::Sequential).unwrap();
            let b = lp_norm_with(&f, p, &r, Execution::Parallel).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    fn smooth_field(coeffs: &[f64]) -> SampledField {
        let g = GridSpec::cube(1, 0.0, 1.0, 400).unwrap();
        let cs = coeffs.to_vec();
        SampledField::from_fn(g, Execution::Sequential, move |x| {
            let t = x[0];
            let re: f64 = cs
                .iter()
                .enumerate()
                .map(|(k, a)| a * ((k + 1) as f64 * PI * t).sin())
                .sum();
            Complex64::new(re, cs[0] * t)
        })
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn hoelder_holds_for_random_smooth_fields(coeffs in proptest::collection::vec(-2.0f64..2.0, 4)) {
            let f = smooth_field(&coeffs);
            let omega = Region::cube(1, 0.0, 1.0).unwrap();
            let (lhs, rhs) = hoelder_embedding_bound(&f, Exponent::from_lebesgue(4.0).unwrap(), Exponent::TWO, &omega).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }

        #[test]
        fn homogeneous_of_degree_one(coeffs in proptest::collection::vec(-2.0f64..2.0, 3), s in -4.0f64..4.0) {
            let f = smooth_field(&coeffs);
            let r = Region::cube(1, 0.0, 0.7).unwrap();
            for p in [Exponent::ONE, Exponent::TWO, Exponent::from_lebesgue(3.0).unwrap(), Exponent::INFINITY] {
                let base = lp_norm(&f, p, &r).unwrap();
                let scaled = lp_norm(&f.clone().scaled(c(s)), p, &r).unwrap();
                prop_assert!((scaled - s.abs() * base).abs() <= 1e-12 * base.max(1e-300) * s.abs().max(1.0));
            }
        }

        #[test]
        fn monotone_in_region(coeffs in proptest::collection::vec(-2.0f64..2.0, 3), a in 0.05f64..0.45, b in 0.55f64..0.95) {
            let f = smooth_field(&coeffs);
            let small = Region::cube(1, a, b).unwrap();
            let big = Region::cube(1, 0.0, 1.0).unwrap();
            for p in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY] {
                prop_assert!(lp_norm(&f, p, &small).unwrap() <= lp_norm(&f, p, &big).unwrap());
            }
        }
    }
}
