//! The systole-probability estimator pipeline.
//!
//! The chain of quantities: the expected number of embedded `k`-sets of short
//! non-separating geodesics (`G_k`, exact from the volume table for small
//! genus, `I^k/k!` in the leading normalization), the alternating
//! inclusion-exclusion partial sums that bracket `1 - e^{-I}`, the assembled
//! probability estimate with explicit remainder terms, and the classifier for
//! the two asymptotic window regimes.
//!
//! Every big-O appearing in the underlying bounds is surfaced as an explicit
//! constant in [`BoundConstants`].  The defaults are all 1 (the inflation
//! factor defaults to 5), which makes outputs reproducible but *not*
//! rigorous: the true constants are not known, and these knobs exist exactly
//! so that users can see where they enter.

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{i_of, t_of};
use crate::quad::QuadratureConfig;
use crate::volume::{PiPolynomial, PolyTable, SurfaceType};

/// Explicit stand-ins for every unnamed constant in the volume bounds.
///
/// `c1..c4` scale the four terms of the separating-multicurve bound, `cm`
/// scales the per-complexity case bounds, `dprime` scales the estimator's
/// remainder terms, `inflation` is the collar inflation factor (a window `L`
/// is widened to `inflation * L` when collars must stay embedded), and
/// `o1_exponent_slack` stands in for every `o(1)` exponent: the volume-ratio
/// remainder decays like `g^(-1 + slack)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub cm: f64,
    pub dprime: f64,
    pub inflation: f64,
    pub o1_exponent_slack: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            cm: 1.0,
            dprime: 1.0,
            inflation: 5.0,
            o1_exponent_slack: 0.0,
        }
    }
}

impl BoundConstants {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
            ("cm", self.cm),
            ("dprime", self.dprime),
            ("inflation", self.inflation),
        ];
        for (name, value) in positives {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "constant {name} must be finite and positive, got {value}"
                )));
            }
        }
        if !(self.o1_exponent_slack >= 0.0 && self.o1_exponent_slack < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "o1_exponent_slack must lie in [0, 1), got {}",
                self.o1_exponent_slack
            )));
        }
        Ok(())
    }
}

/// Partial sum `sum_{k=1}^{n} (-1)^{k+1} I^k / k!`, accumulated with
/// Neumaier-compensated summation.  For even `n` (once terms decrease) this
/// is a lower bound for `1 - e^{-I}`, for odd `n` an upper bound.
pub fn inclusion_exclusion_partial(mass: f64, n: u32) -> f64 {
    debug_assert!(mass >= 0.0 && mass.is_finite());
    debug_assert!(n >= 1);
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    let mut term = 1.0f64;
    for k in 1..=n {
        term *= mass / k as f64;
        let signed = if k % 2 == 1 { term } else { -term };
        let fresh = sum + signed;
        if sum.abs() >= signed.abs() {
            compensation += (sum - fresh) + signed;
        } else {
            compensation += (signed - fresh) + sum;
        }
        sum = fresh;
    }
    sum + compensation
}

/// The alternating binomial identity
/// `sum_{k=1}^{n} (-1)^{k+1} C(r,k) = 1 - (-1)^n C(r-1,n)`,
/// returned as the independently computed `(lhs, rhs)` pair in exact
/// integers.  Useful as a self-test of the bracketing combinatorics.
pub fn binomial_ie_identity(r: u32, n: u32) -> Result<(i128, i128)> {
    if r < 1 || n < 1 {
        return Err(Error::InvalidParameter(
            "the alternating binomial identity needs r, n >= 1".into(),
        ));
    }
    let mut lhs: i128 = 0;
    for k in 1..=n {
        let term = binomial_exact(r, k)?;
        if k % 2 == 1 {
            lhs = lhs.checked_add(term).ok_or(Error::BinomialOverflow { r, k })?;
        } else {
            lhs = lhs.checked_sub(term).ok_or(Error::BinomialOverflow { r, k })?;
        }
    }
    let tail = binomial_exact(r - 1, n)?;
    let rhs = if n % 2 == 0 { 1 - tail } else { 1 + tail };
    Ok((lhs, rhs))
}

/// `C(r, k)` in checked `i128`; zero when `k > r`.
fn binomial_exact(r: u32, k: u32) -> Result<i128> {
    if k > r {
        return Ok(0);
    }
    let k = k.min(r - k);
    let mut value: i128 = 1;
    for j in 0..k {
        value = value
            .checked_mul((r - j) as i128)
            .ok_or(Error::BinomialOverflow { r, k })?;
        value /= (j + 1) as i128; // exact: value is C(r, j+1) * (j+1)! / (j+1)!
    }
    Ok(value)
}

/// Expected number of embedded `k`-sets of non-separating geodesics shorter
/// than `window`, computed exactly from the volume table:
///
/// `G_k = (1/(2^k k!)) * integral over [0, window]^k of x_1...x_k *
/// V_{g-k, 2k}(x_1, x_1, ..., x_k, x_k)`.
///
/// Cutting along the `k` curves pairs up the `2k` boundary slots, so the
/// integral is a sum of monomial integrals `L^{2a+2}/(2a+2)` and is evaluated
/// in exact rational arithmetic; the result is rounded once at the end.
pub fn g_k_exact(g: u32, k: u32, window: f64, table: &PolyTable) -> Result<f64> {
    if k < 1 || k > g {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= g, got k = {k}, g = {g}"
        )));
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "window must be positive and finite, got {window}"
        )));
    }
    let cut = SurfaceType::new(g - k, 2 * k)?;
    let poly = table.polynomial(cut)?;
    let window_exact = BigRational::from_float(window).expect("finite f64 is rational");
    let window_sq = &window_exact * &window_exact;

    let mut accumulated = PiPolynomial::zero();
    for (xpow, pi2pow, coeff) in poly.terms() {
        // Exponent of x_i^2 after identifying the paired slots 2i and 2i+1.
        let mut value = coeff.clone();
        for i in 0..k as usize {
            let a = xpow[2 * i] + xpow[2 * i + 1];
            // integral of x^(2a+1) over [0, L] = L^(2a+2) / (2a + 2)
            let mut power = window_sq.clone();
            for _ in 0..a {
                power *= &window_sq;
            }
            value *= power / BigRational::from_integer((2 * a + 2).into());
        }
        accumulated.add(pi2pow, &value);
    }

    // Prefactor 1/(2^k k!).
    let mut prefactor = BigRational::from_integer(1.into());
    for j in 1..=k as i64 {
        prefactor /= BigRational::from_integer((2 * j).into());
    }
    let mut scaled = PiPolynomial::zero();
    for (j, coeff) in accumulated.iter() {
        scaled.add(j, &(coeff * &prefactor));
    }
    Ok(scaled.to_f64())
}

/// Leading normalized term `I^k / k!` of the `k`-set count.
///
/// Small `k` uses the stable running product; beyond the factorial range the
/// value is assembled in log space as `exp(k ln I - lnGamma(k+1))`.
pub fn g_k_asymptotic(mass: f64, k: u32) -> f64 {
    debug_assert!(mass >= 0.0 && mass.is_finite());
    debug_assert!(k >= 1);
    if mass == 0.0 {
        return 0.0;
    }
    if k <= 170 {
        let mut value = 1.0f64;
        for j in 1..=k {
            value *= mass / j as f64;
        }
        value
    } else {
        (k as f64 * mass.ln() - libm::lgamma((k + 1) as f64)).exp()
    }
}

/// Named remainder components of a [`systole_probability`] estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EstimateTerms {
    /// `I(window)`, the expected short-geodesic count.
    pub intensity_mass: f64,
    /// Taylor truncation magnitude `I^(n+1)/(n+1)!`.
    pub truncation: f64,
    /// Stirling form `(I e/(n+1))^(n+1) / sqrt(2 pi (n+1))`, an upper bound
    /// for the truncation magnitude; the smaller of the two enters the
    /// bracket.
    pub truncation_cap: f64,
    /// Finite-genus volume-ratio remainder `e^I * g^(-1 + slack)`.
    pub volume_ratio: f64,
    /// The truncation order actually used after capping at the genus.
    pub n_effective: u32,
}

/// A probability value with an explicit bracket.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub terms: EstimateTerms,
}

/// Estimated probability that a surface of genus `g` has a geodesic shorter
/// than `window`, in the limiting model: `1 - e^{-I(window)}`, bracketed by
/// the truncation and volume-ratio remainders (each scaled by
/// `consts.dprime`) and clamped to `[0, 1]`.
///
/// `n_terms` must be even and positive so that the even partial sum always
/// provides the lower-bound direction; it is capped at the genus (the
/// inclusion-exclusion series has no embedded `k`-sets beyond `k = g`).
pub fn systole_probability(
    g: u64,
    window: f64,
    n_terms: u32,
    consts: &BoundConstants,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    consts.validate()?;
    if g < 2 {
        return Err(Error::InvalidParameter(format!(
            "genus must be at least 2, got {g}"
        )));
    }
    if n_terms == 0 || n_terms % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "n_terms must be even and positive, got {n_terms}"
        )));
    }
    if !(window.is_finite() && window >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "window must be finite and nonnegative, got {window}"
        )));
    }

    let mass = i_of(window, cfg)?;
    let value = -(-mass).exp_m1();

    let genus_cap = (g - g % 2).min(u32::MAX as u64) as u32;
    let n_effective = n_terms.min(genus_cap);
    let order = n_effective + 1;
    let truncation = g_k_asymptotic(mass, order);
    let truncation_cap = if mass == 0.0 {
        0.0
    } else {
        let order = order as f64;
        (order * (mass.ln() + 1.0 - order.ln())).exp()
            / (2.0 * std::f64::consts::PI * order).sqrt()
    };
    let volume_ratio =
        (mass + (-1.0 + consts.o1_exponent_slack) * (g as f64).ln()).exp();

    let remainder = consts.dprime * (truncation.min(truncation_cap) + volume_ratio);
    Ok(Estimate {
        value,
        lower: (value - remainder).clamp(0.0, 1.0),
        upper: (value + remainder).clamp(0.0, 1.0),
        terms: EstimateTerms {
            intensity_mass: mass,
            truncation,
            truncation_cap,
            volume_ratio,
            n_effective,
        },
    })
}

/// Which asymptotic window regime the parameters fall into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Long windows: `window >= (1 + eps) * lnln g`, where short geodesics
    /// appear asymptotically almost surely.
    LongWindow,
    /// Short windows: `window <= ln((2 - delta) * ln g)`, where the expected
    /// count stays polynomially bounded.
    ShortWindow,
    /// Both inequalities hold (the regimes overlap for these parameters).
    Both,
    /// Neither inequality holds.
    Neither,
}

/// Classifier outcome with the inequalities it checked.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `(1 + eps) * lnln g`; the long-window hypothesis is `window >= this`.
    pub long_window_threshold: f64,
    pub long_window_holds: bool,
    /// `ln((2 - delta) * ln g)`; the short-window hypothesis is
    /// `window <= this`.
    pub short_window_threshold: f64,
    pub short_window_holds: bool,
    /// `ln(g) / 2`, the growth level separating the regimes.
    pub half_log_genus: f64,
    /// `T(window)` when `window >= 1`, else absent.
    pub growth_value: Option<f64>,
    /// Whether `T(window) > ln(g)/2` (the derived long-window check).
    pub growth_exceeds_half_log: Option<bool>,
    /// `(1 - delta/2) * ln g`, the short-regime growth budget.
    pub short_budget: f64,
    /// Whether `T(window) <= (1 - delta/2) * ln g`.
    pub growth_within_short_budget: Option<bool>,
}

/// Classify window parameters against the two asymptotic regimes and report
/// the derived growth-function checks as witnesses.
pub fn regime_classify(
    g: u64,
    window: f64,
    eps: f64,
    delta: f64,
    cfg: &QuadratureConfig,
) -> Result<RegimeReport> {
    if g < 16 {
        return Err(Error::InvalidParameter(format!(
            "classification needs genus >= 16 (so lnln g > 0), got {g}"
        )));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 2), got {delta}"
        )));
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "window must be positive, got {window}"
        )));
    }

    let log_g = (g as f64).ln();
    let long_window_threshold = (1.0 + eps) * log_g.ln();
    let short_window_threshold = ((2.0 - delta) * log_g).ln();
    let long_window_holds = window >= long_window_threshold;
    let short_window_holds = window <= short_window_threshold;

    let growth_value = if window >= 1.0 {
        Some(t_of(window, cfg)?)
    } else {
        None
    };
    let half_log_genus = 0.5 * log_g;
    let short_budget = (1.0 - 0.5 * delta) * log_g;

    Ok(RegimeReport {
        regime: match (long_window_holds, short_window_holds) {
            (true, true) => Regime::Both,
            (true, false) => Regime::LongWindow,
            (false, true) => Regime::ShortWindow,
            (false, false) => Regime::Neither,
        },
        long_window_threshold,
        long_window_holds,
        short_window_threshold,
        short_window_holds,
        half_log_genus,
        growth_value,
        growth_exceeds_half_log: growth_value.map(|t| t > half_log_genus),
        short_budget,
        growth_within_short_budget: growth_value.map(|t| t <= short_budget),
    })
}

/// Smallest genus in `grid` from which the forward-evaluated long-window
/// growth check `T((1 + eps) * lnln g) > ln(g)/2` holds for that genus and
/// every later grid entry; `None` when it never stabilizes to true.
pub fn long_window_threshold_genus(
    eps: f64,
    grid: &[u64],
    cfg: &QuadratureConfig,
) -> Result<Option<u64>> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let mut threshold = None;
    for &g in grid {
        if g < 16 {
            return Err(Error::InvalidParameter(format!(
                "threshold scan needs genus >= 16, got {g}"
            )));
        }
        let window = (1.0 + eps) * (g as f64).ln().ln();
        let holds = window >= 1.0 && t_of(window, cfg)? > 0.5 * (g as f64).ln();
        match (holds, threshold) {
            (true, None) => threshold = Some(g),
            (false, Some(_)) => threshold = None,
            _ => {}
        }
    }
    Ok(threshold)
}
