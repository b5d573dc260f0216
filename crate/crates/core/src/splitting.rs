//! Separating multicurves: topological types, integral-formula right-hand
//! sides, and the explicit volume bounds assembled from them.
//!
//! A multicurve of `k` disjoint simple closed curves can split a closed
//! surface of genus `g` (with `n` boundary components) into a "small" piece
//! `S_{g0, k+n0}` and its complement.  [`enumerate_splittings`] lists the
//! topological types by their complexity `m = 2 g0 - 2 + k + n0`;
//! [`MultiCurveSpec`] describes how the cut pieces share curve and boundary
//! lengths so that [`mirzakhani_rhs`] can integrate a test function against
//! the product of the pieces' volume polynomials; and
//! [`separating_volume_bound`] / [`complexity_case_bound`] evaluate the
//! closed-form upper bounds on the relative volume of surfaces carrying a
//! short separating multicurve.

use std::cell::RefCell;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::BoundConstants;
use crate::quad::{integrate, QuadratureConfig};
use crate::volume::{PolyTable, SurfaceType, VolumePolynomial};

/// Topological type of a splitting: the small side has genus `g0` and is cut
/// off by `k` curves, taking `n0` of the ambient boundary labels with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SplittingClass {
    pub g0: u32,
    pub k: u32,
    pub n0: u32,
}

impl SplittingClass {
    /// Complexity `m = 2 g0 - 2 + k + n0` of the small side.
    pub fn complexity(&self) -> i64 {
        2 * self.g0 as i64 - 2 + self.k as i64 + self.n0 as i64
    }

    /// `1` exactly when the small side is a one-handle: `(g0, k + n0) = (1, 1)`.
    pub fn m_flag(&self) -> u8 {
        u8::from(self.g0 == 1 && self.k + self.n0 == 1)
    }
}

/// All splitting types of complexity `m` inside an ambient surface of genus
/// `g` with `n` boundary components, in ascending lexicographic
/// `(g0, k, n0)` order.
///
/// Valid classes satisfy `2 g0 - 2 + k + n0 = m`, `k >= 1`, `n0 <= n`, and
/// leave a complement `(g - g0 - k + 1, k + n - n0)` of nonnegative genus.
/// `m` itself must lie in `1..=floor(g - 1 + n/2)`.
pub fn enumerate_splittings(g: u32, n: u32, m: u32) -> Result<Vec<SplittingClass>> {
    let ambient_complexity = 2 * g as i64 - 2 + n as i64;
    if ambient_complexity < 2 {
        return Err(Error::InvalidParameter(format!(
            "ambient surface ({g}, {n}) has complexity {ambient_complexity} < 2"
        )));
    }
    let m_cap = (2 * g as i64 - 2 + n as i64) / 2; // floor(g - 1 + n/2)
    if m < 1 || (m as i64) > m_cap {
        return Err(Error::EmptyRange { g, n, m });
    }

    let mut classes = Vec::new();
    for g0 in 0..=(m + 1) / 2 {
        let side_sum = m as i64 + 2 - 2 * g0 as i64; // k + n0
        for k in 1..=side_sum.max(0) {
            let n0 = side_sum - k;
            if n0 < 0 || n0 > n as i64 {
                continue;
            }
            let complement_genus = g as i64 + 1 - g0 as i64 - k;
            if complement_genus < 0 {
                continue;
            }
            classes.push(SplittingClass {
                g0,
                k: k as u32,
                n0: n0 as u32,
            });
        }
    }
    Ok(classes)
}

/// Volume of the simplex `0 <= x_1 + ... + x_k <= L`: `L^k / k!`.
pub fn simplex_volume(k: u32, cap: f64) -> f64 {
    debug_assert!(k >= 1 && cap >= 0.0);
    let mut value = 1.0f64;
    for j in 1..=k {
        value *= cap / j as f64;
    }
    value
}

/// First moment `integral of x_1 ... x_k` over the same simplex:
/// `L^(2k) / (2k)!`.
pub fn simplex_moment(k: u32, cap: f64) -> f64 {
    debug_assert!(k >= 1 && cap >= 0.0);
    let mut value = 1.0f64;
    for j in 1..=2 * k {
        value *= cap / j as f64;
    }
    value
}

/// Where a boundary slot of a cut piece gets its length from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlotSource {
    /// Length of multicurve component `i` (an integration variable).
    Curve(usize),
    /// Entry `j` of the ambient boundary-length vector (held fixed).
    Boundary(usize),
}

/// One connected piece of the cut surface with its slot wiring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutPiece {
    pub surface: SurfaceType,
    pub slots: Vec<SlotSource>,
}

/// A multicurve described by the pieces its cut produces.
///
/// Validated so that every curve index below `curve_count` appears in exactly
/// two slots (the two sides of that curve) and no ambient boundary label is
/// used twice.  `one_handle_count` is the number of curves with a `(1, 1)`
/// piece on one side; it contributes the `2^-M` weight in the integral
/// formula.  `sym_order` is the symmetry order `|Sym|`, by default `k!`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiCurveSpec {
    pieces: Vec<CutPiece>,
    curve_count: usize,
    one_handle_count: u32,
    sym_order: u64,
}

impl MultiCurveSpec {
    pub fn new(pieces: Vec<CutPiece>, sym_order: Option<u64>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidParameter("a cut has at least one piece".into()));
        }
        let mut curve_uses: Vec<u32> = Vec::new();
        let mut boundary_seen: Vec<usize> = Vec::new();
        for piece in &pieces {
            if piece.slots.len() != piece.surface.boundaries() as usize {
                return Err(Error::InvalidParameter(format!(
                    "piece {} has {} slots for {} boundary components",
                    piece.surface,
                    piece.slots.len(),
                    piece.surface.boundaries()
                )));
            }
            for slot in &piece.slots {
                match *slot {
                    SlotSource::Curve(i) => {
                        if curve_uses.len() <= i {
                            curve_uses.resize(i + 1, 0);
                        }
                        curve_uses[i] += 1;
                    }
                    SlotSource::Boundary(j) => {
                        if boundary_seen.contains(&j) {
                            return Err(Error::InvalidParameter(format!(
                                "boundary label {j} is wired to two slots"
                            )));
                        }
                        boundary_seen.push(j);
                    }
                }
            }
        }
        let curve_count = curve_uses.len();
        if curve_count == 0 {
            return Err(Error::InvalidParameter(
                "a multicurve has at least one curve".into(),
            ));
        }
        if let Some(i) = curve_uses.iter().position(|&uses| uses != 2) {
            return Err(Error::InvalidParameter(format!(
                "curve {i} appears in {} slots instead of 2",
                curve_uses[i]
            )));
        }

        let one_handle_count = pieces
            .iter()
            .filter(|piece| {
                piece.surface == SurfaceType::new(1, 1).expect("valid type")
                    && matches!(piece.slots[0], SlotSource::Curve(_))
            })
            .map(|piece| match piece.slots[0] {
                SlotSource::Curve(i) => i,
                SlotSource::Boundary(_) => unreachable!(),
            })
            .collect::<std::collections::BTreeSet<_>>()
            .len() as u32;

        let sym_order = match sym_order {
            Some(0) => {
                return Err(Error::InvalidParameter("sym_order must be positive".into()))
            }
            Some(value) => value,
            None => (1..=curve_count as u64).product(),
        };
        Ok(Self {
            pieces,
            curve_count,
            one_handle_count,
            sym_order,
        })
    }

    /// The wiring for a [`SplittingClass`] inside an ambient `(g, n)`:
    /// the small piece `(g0, k + n0)` takes boundary labels `0..n0`, the
    /// complement takes the rest, and the `k` curves join the two.
    pub fn from_splitting(g: u32, n: u32, class: &SplittingClass) -> Result<Self> {
        let k = class.k as usize;
        let complement_genus = g as i64 + 1 - class.g0 as i64 - class.k as i64;
        if class.n0 > n || complement_genus < 0 {
            return Err(Error::InvalidParameter(format!(
                "class ({}, {}, {}) does not embed in ambient ({g}, {n})",
                class.g0, class.k, class.n0
            )));
        }
        let small = CutPiece {
            surface: SurfaceType::new(class.g0, class.k + class.n0)?,
            slots: (0..k)
                .map(SlotSource::Curve)
                .chain((0..class.n0 as usize).map(SlotSource::Boundary))
                .collect(),
        };
        let complement = CutPiece {
            surface: SurfaceType::new(complement_genus as u32, class.k + n - class.n0)?,
            slots: (0..k)
                .map(SlotSource::Curve)
                .chain((class.n0 as usize..n as usize).map(SlotSource::Boundary))
                .collect(),
        };
        Self::new(vec![small, complement], None)
    }

    pub fn pieces(&self) -> &[CutPiece] {
        &self.pieces
    }

    pub fn curve_count(&self) -> usize {
        self.curve_count
    }

    pub fn one_handle_count(&self) -> u32 {
        self.one_handle_count
    }

    pub fn sym_order(&self) -> u64 {
        self.sym_order
    }

    /// Same multicurve with a caller-supplied symmetry order.
    pub fn with_sym_order(mut self, sym_order: u64) -> Result<Self> {
        if sym_order == 0 {
            return Err(Error::InvalidParameter("sym_order must be positive".into()));
        }
        self.sym_order = sym_order;
        Ok(self)
    }
}

/// Right-hand side of the integral formula for a multicurve:
///
/// `2^-M / |Sym| * integral over [0, cap]^k of
///  f(x_1 + ... + x_k) * prod_pieces V(slot lengths) * x_1 ... x_k dx`.
///
/// The integral is evaluated as nested adaptive one-dimensional quadratures
/// (deterministic, so results are reproducible).  All multicurve components
/// carry weight 1; `boundary_lengths` supplies the ambient fixed lengths.
pub fn mirzakhani_rhs(
    spec: &MultiCurveSpec,
    f: &dyn Fn(f64) -> f64,
    cap: f64,
    boundary_lengths: &[f64],
    table: &PolyTable,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(cap.is_finite() && cap > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "integration cap must be positive, got {cap}"
        )));
    }
    let mut resolved: Vec<(&VolumePolynomial, &[SlotSource])> = Vec::new();
    for piece in &spec.pieces {
        for slot in &piece.slots {
            if let SlotSource::Boundary(j) = *slot {
                if j >= boundary_lengths.len() {
                    return Err(Error::InvalidParameter(format!(
                        "boundary label {j} is outside the supplied lengths"
                    )));
                }
            }
        }
        resolved.push((table.polynomial(piece.surface)?, &piece.slots));
    }

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let point: RefCell<Vec<f64>> = RefCell::new(Vec::with_capacity(spec.curve_count));
    let evaluate = |xs: &[f64]| -> f64 {
        let mut product = f(xs.iter().sum());
        for &x in xs {
            product *= x;
        }
        for (poly, slots) in &resolved {
            let lengths: Vec<f64> = slots
                .iter()
                .map(|slot| match *slot {
                    SlotSource::Curve(i) => xs[i],
                    SlotSource::Boundary(j) => boundary_lengths[j],
                })
                .collect();
            match poly.evaluate(&lengths) {
                Ok(value) => product *= value,
                Err(error) => {
                    failure.borrow_mut().get_or_insert(error);
                    return 0.0;
                }
            }
        }
        product
    };

    let integral = nested_integral(spec.curve_count, &point, &evaluate, cap, cfg, &failure)?;
    if let Some(error) = failure.into_inner() {
        return Err(error);
    }
    let weight = 0.5f64.powi(spec.one_handle_count as i32) / spec.sym_order as f64;
    Ok(weight * integral)
}

fn nested_integral(
    depth: usize,
    point: &RefCell<Vec<f64>>,
    evaluate: &dyn Fn(&[f64]) -> f64,
    cap: f64,
    cfg: &QuadratureConfig,
    failure: &RefCell<Option<Error>>,
) -> Result<f64> {
    if depth == 0 {
        let xs = point.borrow();
        return Ok(evaluate(&xs));
    }
    let result = integrate(
        |x| {
            point.borrow_mut().push(x);
            let inner = nested_integral(depth - 1, point, evaluate, cap, cfg, failure);
            point.borrow_mut().pop();
            match inner {
                Ok(value) => value,
                Err(error) => {
                    failure.borrow_mut().get_or_insert(error);
                    0.0
                }
            }
        },
        0.0,
        cap,
        cfg,
    )?;
    Ok(result.value)
}

/// The four-term upper bound on the relative volume of surfaces of genus `g`
/// with `n` boundary components that carry a separating multicurve shorter
/// than `window`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeparatingBound {
    /// `c1 * Lt^2 * e^(L/2) / g`, the complexity-1 contribution.
    pub low_complexity: f64,
    /// `c2 * e^(L/2) * Lt^7 / g^2`, covering complexities 2 through 10.
    pub mid_complexity: f64,
    /// `c3 * e^(2L) * n^10 / g^9`, the first high-complexity tail term.
    pub tail_primary: f64,
    /// `c4 * e^(2L) * n^12 / g^10`, the second tail term.
    pub tail_secondary: f64,
    /// Sum of the four terms, in the order listed.
    pub total: f64,
}

/// Evaluate the separating-multicurve volume bound at `Lt = max(window, n)`.
pub fn separating_volume_bound(
    g: u64,
    n: u64,
    window: f64,
    consts: &BoundConstants,
) -> Result<SeparatingBound> {
    consts.validate()?;
    validate_bound_arguments(g, window)?;
    let genus = g as f64;
    let boundaries = n as f64;
    let stretched = window.max(boundaries);
    let half_exp = (0.5 * window).exp();
    let double_exp = (2.0 * window).exp();

    let low_complexity = consts.c1 * stretched.powi(2) * half_exp / genus;
    let mid_complexity = consts.c2 * half_exp * stretched.powi(7) / genus.powi(2);
    let tail_primary = consts.c3 * double_exp * boundaries.powi(10) / genus.powi(9);
    let tail_secondary = consts.c4 * double_exp * boundaries.powi(12) / genus.powi(10);
    Ok(SeparatingBound {
        low_complexity,
        mid_complexity,
        tail_primary,
        tail_secondary,
        total: low_complexity + mid_complexity + tail_primary + tail_secondary,
    })
}

/// Fixed tail exponent `P` of the high-complexity case bound.
pub const TAIL_EXPONENT: u32 = 10;

/// The per-complexity contribution to the separating bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum CaseBound {
    /// `m = 1`: `c1 * Lt^2 * e^(L/2) / g`.
    LowComplexity { value: f64 },
    /// `2 <= m <= 10`: `cm * e^(L/2) * Lt^(3m+1) / g^m`.
    MidComplexity { value: f64 },
    /// `m >= 11`, aggregated over the whole tail with `P = 10`:
    /// `primary = c3 * e^(2L) * (P+1) * n^P / g^(P-1)` and
    /// `secondary = c4 * e^(2L) * n^(P+2) / g^P`.
    Tail { primary: f64, secondary: f64 },
}

impl CaseBound {
    pub fn total(&self) -> f64 {
        match *self {
            CaseBound::LowComplexity { value } | CaseBound::MidComplexity { value } => value,
            CaseBound::Tail { primary, secondary } => primary + secondary,
        }
    }
}

/// Bound contribution of the splitting classes of complexity `m` (classes
/// with `m >= 11` are aggregated into the single tail case).
pub fn complexity_case_bound(
    g: u64,
    n: u64,
    window: f64,
    m: u32,
    consts: &BoundConstants,
) -> Result<CaseBound> {
    consts.validate()?;
    validate_bound_arguments(g, window)?;
    if m < 1 {
        return Err(Error::InvalidParameter("complexity starts at 1".into()));
    }
    let genus = g as f64;
    let boundaries = n as f64;
    let stretched = window.max(boundaries);
    let half_exp = (0.5 * window).exp();

    Ok(match m {
        1 => CaseBound::LowComplexity {
            value: consts.c1 * stretched.powi(2) * half_exp / genus,
        },
        2..=10 => CaseBound::MidComplexity {
            value: consts.cm * half_exp * stretched.powi(3 * m as i32 + 1)
                / genus.powi(m as i32),
        },
        _ => {
            let double_exp = (2.0 * window).exp();
            let p = TAIL_EXPONENT as i32;
            CaseBound::Tail {
                primary: (TAIL_EXPONENT + 1) as f64 * consts.c3 * double_exp
                    * boundaries.powi(p)
                    / genus.powi(p - 1),
                secondary: consts.c4 * double_exp * boundaries.powi(p + 2) / genus.powi(p),
            }
        }
    })
}

/// The separating bound with the window inflated by the collar factor: the
/// locus where some collar of width `window/4` fails to embed is covered by
/// multicurves shorter than `consts.inflation * window`.
pub fn collar_inflated_bound(
    g: u64,
    n: u64,
    window: f64,
    consts: &BoundConstants,
) -> Result<SeparatingBound> {
    separating_volume_bound(g, n, consts.inflation * window, consts)
}

fn validate_bound_arguments(g: u64, window: f64) -> Result<()> {
    if g < 2 {
        return Err(Error::InvalidParameter(format!(
            "genus must be at least 2, got {g}"
        )));
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "window must be positive and finite, got {window}"
        )));
    }
    Ok(())
}
