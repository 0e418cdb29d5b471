//! Adaptive Gauss–Kronrod (7/15) quadrature on intervals, and its tensorised
//! extension to axis-aligned boxes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default cap on the number of subintervals per 1-D integral.
pub const DEFAULT_MAX_INTERVALS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<S> {
    pub value: S,
    pub error: S,
}

#[derive(Debug, Clone, Copy)]
struct Segment<S> {
    a: S,
    b: S,
    value: S,
    error: S,
}

impl<S: Scalar> PartialEq for Segment<S> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<S: Scalar> Eq for Segment<S> {}
impl<S: Scalar> PartialOrd for Segment<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for Segment<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn gk15<S: Scalar, F>(f: &mut F, a: S, b: S) -> Result<Segment<S>>
where
    F: FnMut(S) -> Result<S>,
{
    let half = (b - a) / S::lit(2.0);
    let centre = (a + b) / S::lit(2.0);
    let fc = f(centre)?;
    let mut kronrod = fc * S::lit(WGK[7]);
    let mut gauss = fc * S::lit(WG[3]);
    for j in 0..7 {
        let dx = half * S::lit(XGK[j]);
        let pair = f(centre - dx)? + f(centre + dx)?;
        kronrod += S::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss += S::lit(WG[j / 2]) * pair;
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over `[a, b]` until the summed Kronrod–Gauss error estimate
/// falls below `abs_tol`, bisecting the worst subinterval each step.
pub fn adaptive<S: Scalar, F>(mut f: F, a: S, b: S, abs_tol: S, max_intervals: usize) -> Result<Estimate<S>>
where
    F: FnMut(S) -> Result<S>,
{
    if a == b {
        return Ok(Estimate {
            value: S::zero(),
            error: S::zero(),
        });
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&mut f, a, b)?;
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    // Roundoff floor: intervals cannot resolve below a few ulps of the result.
    let floor = |v: S| v.abs() * S::epsilon() * S::lit(50.0);
    while error > abs_tol && error > floor(value) {
        if heap.len() >= max_intervals {
            return Err(Error::Convergence {
                tolerance: abs_tol.to_f64_lossy(),
                achieved: error.to_f64_lossy(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = (worst.a + worst.b) / S::lit(2.0);
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        heap.push(left);
        heap.push(right);
        // Full re-sum: incremental updates lose everything after a huge
        // segment error is subtracted.
        value = heap.iter().map(|s| s.value).sum();
        error = heap.iter().map(|s| s.error).sum();
    }
    Ok(Estimate {
        value: heap.iter().map(|s| s.value).sum(),
        error: heap.iter().map(|s| s.error).sum(),
    })
}

/// Nested adaptive integration over the box `∏ [lo_i, hi_i]`. The tolerance is
/// split so that inner errors, integrated over the outer axis, and the outer
/// error together stay below `abs_tol`.
pub fn adaptive_box<S: Scalar, F>(f: &F, bounds: &[(S, S)], abs_tol: S) -> Result<Estimate<S>>
where
    F: Fn(&[S]) -> Result<S>,
{
    let mut x = vec![S::zero(); bounds.len()];
    nested(f, bounds, 0, &mut x, abs_tol)
}

fn nested<S: Scalar, F>(f: &F, bounds: &[(S, S)], axis: usize, x: &mut Vec<S>, tol: S) -> Result<Estimate<S>>
where
    F: Fn(&[S]) -> Result<S>,
{
    if axis == bounds.len() {
        return Ok(Estimate {
            value: f(x)?,
            error: S::zero(),
        });
    }
    let (lo, hi) = bounds[axis];
    if axis + 1 == bounds.len() {
        let mut xs = x.clone();
        return adaptive(
            |t| {
                xs[axis] = t;
                f(&xs)
            },
            lo,
            hi,
            tol,
            DEFAULT_MAX_INTERVALS,
        );
    }
    let half = tol / S::lit(2.0);
    let inner_tol = half / (hi - lo);
    let mut inner_err = S::zero();
    let mut xs = x.clone();
    let outer = adaptive(
        |t| {
            xs[axis] = t;
            let e = nested(f, bounds, axis + 1, &mut xs, inner_tol)?;
            inner_err = inner_err.max(e.error);
            Ok(e.value)
        },
        lo,
        hi,
        half,
        DEFAULT_MAX_INTERVALS,
    )?;
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_err * (hi - lo),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let e = adaptive(|x: f64| Ok(x * x * x - 2.0 * x), 0.0, 2.0, 1e-12, 50).unwrap();
        assert!((e.value - 0.0).abs() < 1e-13);
    }

    #[test]
    fn integrates_gaussian() {
        let e = adaptive(|x: f64| Ok((-x * x / 2.0).exp()), -10.0, 10.0, 1e-12, 200).unwrap();
        assert!((e.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn box_integral_of_separable_function() {
        let e = adaptive_box(&|x: &[f64]| Ok(x[0].cos() * x[1].exp()), &[(0.0, 1.0), (0.0, 1.0)], 1e-10).unwrap();
        let exact = 1f64.sin() * (1f64.exp() - 1.0);
        assert!((e.value - exact).abs() < 1e-10);
    }

    #[test]
    fn reports_convergence_failure() {
        let err = adaptive(|x: f64| Ok((1.0 / x.abs().max(1e-300)).sqrt()), -1.0, 1.0, 1e-14, 8).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn propagates_integrand_errors() {
        let err = adaptive(|_x: f64| Err(Error::InvalidInput("boom".into())), 0.0, 1.0, 1e-8, 10).unwrap_err();
        assert_eq!(err, Error::InvalidInput("boom".into()));
    }
}
