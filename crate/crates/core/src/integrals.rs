//! Scalar special functions of the limiting primitive length spectrum.
//!
//! The intensity of the limiting point process is
//! `lambda(l) = (e^l + e^-l - 2)/(2l) = (cosh l - 1)/l`, and everything else
//! here is built from it:
//!
//! * `I(L) = integral of lambda over [0, L]` — the expected number of
//!   primitive geodesics of length at most `L`;
//! * `C = I(1)`, the unit-window mass;
//! * `T(L) = integral of e^x/(2x) over [1, L]` — the leading growth function,
//!   which sandwiches `I` via `T - ln L + C <= I <= T + C`;
//! * `T^-1` and the critical length `L0(g) = T^-1(ln(g)/2)`.
//!
//! All integrals run through the deterministic adaptive integrator in
//! [`crate::quad`]; the inverse uses bracketing-doubling plus bisection, so
//! every function here is reproducible bit-for-bit for fixed inputs.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadResult, QuadratureConfig};

/// Below this length the intensity is evaluated by its power series; above it
/// the closed form is used.  At the switch point `cosh l - 1` retains all but
/// about three bits, so both branches are accurate to a few ulp.
pub const INTENSITY_SERIES_CUTOFF: f64 = 0.5;

/// The intensity `lambda(l) = (cosh l - 1)/l`, continuously extended by
/// `lambda(0) = 0`.
///
/// Callers must pass a finite `l >= 0` (debug-asserted).  Below
/// [`INTENSITY_SERIES_CUTOFF`] the value comes from the series
/// `l/2 + l^3/24 + l^5/720 + ...` summed to machine precision, which avoids
/// the cancellation in `cosh l - 1` near zero.
pub fn intensity(l: f64) -> f64 {
    debug_assert!(l >= 0.0 && l.is_finite(), "intensity needs finite l >= 0");
    if l < INTENSITY_SERIES_CUTOFF {
        let l_sq = l * l;
        let mut term = 0.5 * l;
        let mut sum = term;
        let mut k = 1.0f64;
        while term > f64::EPSILON * sum {
            k += 1.0;
            term *= l_sq / ((2.0 * k - 1.0) * (2.0 * k));
            sum += term;
        }
        sum
    } else {
        (l.cosh() - 1.0) / l
    }
}

/// Expected number of lengths in `[0, L]`: the integral of [`intensity`],
/// with the achieved error bound and subdivision count.
pub fn i_of_detail(length: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    if !(length.is_finite() && length >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "window length must be finite and nonnegative, got {length}"
        )));
    }
    integrate(intensity, 0.0, length, cfg)
}

/// Expected number of lengths in `[0, L]` (see [`i_of_detail`]).
pub fn i_of(length: f64, cfg: &QuadratureConfig) -> Result<f64> {
    i_of_detail(length, cfg).map(|r| r.value)
}

/// The unit-window mass `C = I(1)`, approximately `0.2606513`.
pub fn c_const(cfg: &QuadratureConfig) -> Result<f64> {
    i_of(1.0, cfg)
}

/// The growth function `T(L) = integral of e^x/(2x) over [1, L]`, with
/// quadrature detail.  Requires `L >= 1`; `T(1) = 0`.
pub fn t_of_detail(length: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    if !(length.is_finite() && length >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "the growth integral starts at 1; got upper limit {length}"
        )));
    }
    integrate(|x| 0.5 * x.exp() / x, 1.0, length, cfg)
}

/// The growth function `T(L)` (see [`t_of_detail`]).
pub fn t_of(length: f64, cfg: &QuadratureConfig) -> Result<f64> {
    t_of_detail(length, cfg).map(|r| r.value)
}

/// Outcome of inverting `T`: the abscissa, the forward residual
/// `|T(value) - y|` actually achieved, and the number of `T` evaluations.
#[derive(Debug, Clone, Copy)]
pub struct InverseResult {
    pub value: f64,
    pub forward_residual: f64,
    pub evaluations: u32,
}

/// Inverse of the growth function: the `L >= 1` with `T(L) = y`, for
/// `y >= 0`, with convergence detail.
///
/// The root is bracketed by doubling the upper end and then refined by
/// bisection until the forward residual satisfies
/// `|T(L) - y| <= max(abs_tol, rel_tol * y)` from `cfg`.  Bisection is used
/// deliberately: it is monotone, derivative-free, and cannot escape the
/// bracket.
pub fn t_inverse_detail(y: f64, cfg: &QuadratureConfig) -> Result<InverseResult> {
    cfg.validate()?;
    if !(y.is_finite() && y >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "the growth function is inverted for y >= 0, got {y}"
        )));
    }
    if y == 0.0 {
        return Ok(InverseResult {
            value: 1.0,
            forward_residual: 0.0,
            evaluations: 0,
        });
    }
    let tolerance = cfg.abs_tol.max(cfg.rel_tol * y);
    let mut evaluations = 0u32;

    let mut lo = 1.0f64;
    let mut hi = 2.0f64;
    loop {
        evaluations += 1;
        let t_hi = t_of(hi, cfg)?;
        if t_hi >= y {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1024.0 {
            // e^L/2 alone exceeds any finite f64 long before this.
            return Err(Error::InvalidParameter(format!(
                "inverse growth target {y} is out of the representable range"
            )));
        }
    }

    let mut best = hi;
    let mut best_residual = f64::INFINITY;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        evaluations += 1;
        let t_mid = t_of(mid, cfg)?;
        let residual = (t_mid - y).abs();
        if residual < best_residual {
            best = mid;
            best_residual = residual;
        }
        if residual <= tolerance {
            return Ok(InverseResult {
                value: mid,
                forward_residual: residual,
                evaluations,
            });
        }
        if t_mid < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::ToleranceNotMet {
        estimate: best,
        error: best_residual,
        subdivisions: evaluations,
    })
}

/// Inverse of the growth function (see [`t_inverse_detail`]).
pub fn t_inverse(y: f64, cfg: &QuadratureConfig) -> Result<f64> {
    t_inverse_detail(y, cfg).map(|r| r.value)
}

/// The critical length scale `L0(g) = T^-1(ln(g)/2)` for genus `g >= 2`.
pub fn l0_of(genus: u64, cfg: &QuadratureConfig) -> Result<f64> {
    if genus < 2 {
        return Err(Error::InvalidParameter(format!(
            "the critical length scale needs genus >= 2, got {genus}"
        )));
    }
    t_inverse(0.5 * (genus as f64).ln(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    /// Reference for small and moderate windows: the everywhere-convergent
    /// positive series I(L) = sum of L^(2k) / (2k * (2k)!).
    fn i_series(length: f64) -> f64 {
        let l_sq = length * length;
        let mut power = 1.0f64; // L^(2k) / (2k)!
        let mut sum = 0.0f64;
        for k in 1..200 {
            let k = k as f64;
            power *= l_sq / ((2.0 * k - 1.0) * (2.0 * k));
            let term = power / (2.0 * k);
            sum += term;
            if term < f64::EPSILON * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn intensity_basics() {
        assert_eq!(intensity(0.0), 0.0);
        let at_one = intensity(1.0);
        let direct = (1.0f64.exp() + (-1.0f64).exp() - 2.0) / 2.0;
        assert!((at_one - direct).abs() <= 4.0 * f64::EPSILON * direct);
    }

    #[test]
    fn intensity_matches_stable_form_across_the_switch() {
        // 2 sinh^2(l/2) / l is cancellation-free on both sides of the cutoff.
        let mut l: f64 = 1e-3;
        while l < 4.0 {
            let stable = 2.0 * (0.5 * l).sinh().powi(2) / l;
            let got = intensity(l);
            assert!(
                (got - stable).abs() <= 8.0 * f64::EPSILON * stable,
                "l = {l}: {got} vs {stable}"
            );
            l *= 1.07;
        }
    }

    #[test]
    fn intensity_dominates_half_length() {
        // (cosh l - 1)/l >= l/2, the first series term.
        let mut l = 0.01;
        while l <= 10.0 {
            assert!(intensity(l) >= 0.5 * l);
            l += 0.17;
        }
    }

    #[test]
    fn unit_mass_is_pinned() {
        // Series value 0.26065127607867538..., inside (1/4, 1/4 + 1/24).
        let c = c_const(&cfg()).unwrap();
        assert!((c - 0.260_651_276_078_675_4).abs() < 1e-11);
        assert!(c > 0.25 && c < 0.25 + 1.0 / 24.0);
    }

    #[test]
    fn window_mass_pinned_values() {
        let cfg = cfg();
        assert_eq!(i_of(0.0, &cfg).unwrap(), 0.0);
        for (length, expect) in [
            (2.0, 1.182_304_077_185_436_4),
            (3.0, 3.284_564_141_195_967_2),
            (4.0, 7.850_037_532_801_762),
        ] {
            let got = i_of(length, &cfg).unwrap();
            assert!(
                (got - expect).abs() <= 1e-10 * expect,
                "I({length}) = {got}, expected {expect}"
            );
        }
    }

    #[test]
    fn window_mass_matches_series_reference() {
        let cfg = cfg();
        for length in [0.05, 0.1, 0.5, 1.0, 2.5, 7.0, 15.0] {
            let got = i_of(length, &cfg).unwrap();
            let expect = i_series(length);
            assert!(
                (got - expect).abs() <= 1e-11 * expect.max(1e-6),
                "I({length}) = {got}, series {expect}"
            );
        }
    }

    #[test]
    fn window_mass_is_strictly_increasing() {
        let cfg = cfg();
        let mut prev = 0.0;
        for i in 1..=60 {
            let value = i_of(0.25 * i as f64, &cfg).unwrap();
            assert!(value > prev);
            prev = value;
        }
    }

    #[test]
    fn growth_integral_pinned_values() {
        let cfg = cfg();
        assert_eq!(t_of(1.0, &cfg).unwrap(), 0.0);
        for (length, expect) in [
            (2.0, 1.529_558_269_822_976_7),
            (5.0, 19.145_078_769_723_62),
            (10.0, 1_245.166_929_212_760_9),
            (20.0, 12_807_825.384_469_386),
        ] {
            let got = t_of(length, &cfg).unwrap();
            assert!(
                (got - expect).abs() <= 1e-10 * expect,
                "T({length}) = {got}, expected {expect}"
            );
        }
    }

    #[test]
    fn growth_integral_rejects_short_windows() {
        assert!(matches!(
            t_of(0.5, &cfg()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn growth_integral_elementary_bounds() {
        let cfg = cfg();
        for i in 0..=56 {
            let length = 2.0 + 0.5 * i as f64;
            let t = t_of(length, &cfg).unwrap();
            let lower = (length.exp() - 1.0f64.exp()) / (2.0 * length);
            let upper = 0.5 * length.exp();
            assert!(lower <= t && t <= upper, "L = {length}: {lower} {t} {upper}");
        }
    }

    #[test]
    fn sandwich_against_window_mass() {
        let cfg = cfg();
        let c = c_const(&cfg).unwrap();
        for length in [2.0, 5.0, 10.0, 20.0, 30.0] {
            let i = i_of(length, &cfg).unwrap();
            let t = t_of(length, &cfg).unwrap();
            assert!(t - length.ln() + c <= i && i <= t + c, "L = {length}");
        }
    }

    #[test]
    fn inverse_round_trips() {
        let cfg = cfg();
        assert_eq!(t_inverse(0.0, &cfg).unwrap(), 1.0);
        for y in [0.5, 1.0, 5.0, 0.5 * 1e9f64.ln(), 300.0] {
            let inverse = t_inverse(y, &cfg).unwrap();
            let forward = t_of(inverse, &cfg).unwrap();
            assert!(
                (forward - y).abs() <= cfg.abs_tol.max(cfg.rel_tol * y),
                "y = {y}: T(T^-1(y)) = {forward}"
            );
        }
        for length in [2.0, 5.0, 10.0] {
            let y = t_of(length, &cfg).unwrap();
            let back = t_inverse(y, &cfg).unwrap();
            assert!((back - length).abs() <= 1e-8, "L = {length} -> {back}");
        }
    }

    #[test]
    fn inverse_is_monotone() {
        let cfg = cfg();
        let mut prev = 1.0;
        for i in 1..=40 {
            let value = t_inverse(0.5 * i as f64, &cfg).unwrap();
            assert!(value >= prev);
            prev = value;
        }
    }

    #[test]
    fn inverse_rejects_bad_targets() {
        assert!(t_inverse(-1.0, &cfg()).is_err());
        assert!(t_inverse(f64::INFINITY, &cfg()).is_err());
    }

    #[test]
    fn critical_length_pinned_and_monotone() {
        let cfg = cfg();
        let at_million = l0_of(1_000_000, &cfg).unwrap();
        assert!((at_million - 3.676_938_780_886_72).abs() < 1e-9);
        let forward = t_of(at_million, &cfg).unwrap();
        let target = 0.5 * 1e6f64.ln();
        assert!((forward - target).abs() <= 1e-8 * target.max(1.0));

        let mut prev = 0.0;
        let mut genus = 10u64;
        while genus <= 1_000_000_000 {
            let value = l0_of(genus, &cfg).unwrap();
            assert!(value >= prev);
            prev = value;
            genus *= 10;
        }
        assert!(l0_of(1, &cfg).is_err());
    }
}
