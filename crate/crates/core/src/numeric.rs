//! Exact arithmetic used by pricing: scaled times/costs are plain integers,
//! while anything touching LP duals is carried as a rational so reduced-cost
//! comparisons against the enumeration oracle are exact.

use num_rational::Ratio;

pub type Rat = Ratio<i128>;

/// Denominator used when snapping floating-point duals to rationals. Large
/// enough that the snap error (< 2^-42 per dual) is far below every tolerance
/// in the solver, small enough that i128 arithmetic never overflows.
const DUAL_DENOM: i128 = 1 << 42;

/// Snap an LP dual to the rational grid. Negative inputs clamp to zero:
/// covering duals are nonnegative by contract and only dip below through
/// solver noise.
pub fn rationalize(x: f64) -> Rat {
    if !x.is_finite() || x <= 0.0 {
        return Rat::from_integer(0);
    }
    let num = (x * DUAL_DENOM as f64).round() as i128;
    Ratio::new(num, DUAL_DENOM)
}

pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(v as i128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationalize_is_exact_on_grid() {
        let x = 1234.5;
        let r = rationalize(x);
        assert_eq!(rat_to_f64(r), x);
    }

    #[test]
    fn rationalize_clamps_negatives() {
        assert_eq!(rationalize(-1e-9), Rat::from_integer(0));
        assert_eq!(rationalize(f64::NAN), Rat::from_integer(0));
    }
}
