//! Deterministic execution: a [`Request`] plus constants becomes the full
//! stdout text.  Nothing environment-dependent (paths, times, machine info)
//! may enter the returned string — replay depends on it being a pure
//! function of the request.

use std::fmt::Write as _;

use serde::Serialize;
use wpsys_core::estimator::{
    regime_classify, systole_probability, BoundConstants, Regime, RegimeReport,
};
use wpsys_core::integrals::{i_of, i_of_detail, l0_of, t_inverse_detail, t_of, t_of_detail};
use wpsys_core::poisson::{run_simulation, SimConfig};
use wpsys_core::quad::QuadratureConfig;
use wpsys_core::splitting::{
    complexity_case_bound, separating_volume_bound, CaseBound, TAIL_EXPONENT,
};
use wpsys_core::volume::{PolyTable, SurfaceType};
use wpsys_core::Result;

use crate::request::{Action, Format, IntegralOp, Request};

/// Floats are printed with 17 significant digits so they parse back to the
/// identical bit pattern.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

struct Output {
    command: &'static str,
    text: String,
}

impl Output {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            text: String::new(),
        }
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.text.push_str(text.as_ref());
        self.text.push('\n');
    }

    fn json(mut self, result: impl Serialize) -> String {
        #[derive(Serialize)]
        struct Envelope<'a, T> {
            command: &'a str,
            version: &'a str,
            result: T,
        }
        let envelope = Envelope {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            result,
        };
        self.text = serde_json::to_string_pretty(&envelope).expect("output serializes");
        self.text.push('\n');
        self.text
    }
}

pub fn execute(request: &Request, constants: &BoundConstants) -> Result<String> {
    match &request.action {
        Action::Volume {
            genus,
            boundaries,
            lengths,
        } => volume(request, *genus, *boundaries, lengths.as_deref()),
        Action::Integrals { operation } => integrals(request, *operation),
        Action::Estimate {
            genus,
            window,
            window_from_l0,
            n_terms,
            eps,
            delta,
        } => estimate(
            request,
            constants,
            *genus,
            *window,
            *window_from_l0,
            *n_terms,
            *eps,
            *delta,
        ),
        Action::Bound {
            genus,
            boundaries,
            window,
        } => bound(request, constants, *genus, *boundaries, *window),
        Action::Simulate {
            trials,
            seed,
            window,
            points,
            inversion_grid,
        } => simulate(request, *trials, *seed, *window, points, *inversion_grid),
    }
}

fn load_table(request: &Request) -> Result<std::borrow::Cow<'static, PolyTable>> {
    Ok(match &request.table {
        Some(path) => std::borrow::Cow::Owned(PolyTable::load(std::path::Path::new(path))?),
        None => std::borrow::Cow::Borrowed(PolyTable::builtin()),
    })
}

// --- volume -----------------------------------------------------------------

#[derive(Serialize)]
struct TermJson {
    exponents: Vec<u32>,
    pi_power: u32,
    numerator: String,
    denominator: String,
}

#[derive(Serialize)]
struct GroupJson {
    pi_power: u32,
    value: f64,
}

#[derive(Serialize)]
struct EvaluationJson {
    lengths: Vec<f64>,
    groups: Vec<GroupJson>,
    value: f64,
}

#[derive(Serialize)]
struct VolumeJson {
    genus: u32,
    boundaries: u32,
    complexity: u32,
    dimension: u32,
    terms: Vec<TermJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluation: Option<EvaluationJson>,
}

/// `1/6 pi^2 + 1/24 x1^2` style rendering, in the table's term order.
fn render_polynomial(terms: &[TermJson]) -> String {
    let mut rendered = String::new();
    for (index, term) in terms.iter().enumerate() {
        if index > 0 {
            rendered.push_str(" + ");
        }
        if term.denominator == "1" {
            rendered.push_str(&term.numerator);
        } else {
            write!(rendered, "{}/{}", term.numerator, term.denominator).unwrap();
        }
        for (slot, &power) in term.exponents.iter().enumerate() {
            if power > 0 {
                write!(rendered, " x{}^{}", slot + 1, 2 * power).unwrap();
            }
        }
        if term.pi_power > 0 {
            write!(rendered, " pi^{}", 2 * term.pi_power).unwrap();
        }
    }
    rendered
}

fn volume(
    request: &Request,
    genus: u32,
    boundaries: u32,
    lengths: Option<&[f64]>,
) -> Result<String> {
    let table = load_table(request)?;
    let surface = SurfaceType::new(genus, boundaries)?;
    let poly = table.polynomial(surface)?;

    let terms: Vec<TermJson> = poly
        .terms()
        .map(|(exponents, pi_power, coefficient)| TermJson {
            exponents: exponents.to_vec(),
            pi_power,
            numerator: coefficient.numer().to_string(),
            denominator: coefficient.denom().to_string(),
        })
        .collect();

    // Boundary-free polynomials are constants; evaluate them even without
    // an explicit length list.
    let implied_empty = boundaries == 0 && lengths.is_none();
    let eval_lengths: Option<Vec<f64>> = match lengths {
        Some(values) => Some(values.to_vec()),
        None if implied_empty => Some(Vec::new()),
        None => None,
    };
    let evaluation = match &eval_lengths {
        Some(values) => {
            let grouped = poly.evaluate_grouped(values)?;
            let groups: Vec<GroupJson> = grouped
                .group_contributions()
                .into_iter()
                .map(|(pi_power, value)| GroupJson { pi_power, value })
                .collect();
            Some(EvaluationJson {
                lengths: values.clone(),
                value: grouped.to_f64(),
                groups,
            })
        }
        None => None,
    };

    let mut out = Output::new("volume");
    match request.format {
        Format::Json => {
            return Ok(out.json(VolumeJson {
                genus,
                boundaries,
                complexity: surface.complexity(),
                dimension: surface.dimension(),
                terms,
                evaluation,
            }))
        }
        Format::Csv => match &evaluation {
            Some(eval) => {
                out.line("genus,boundaries,lengths,value");
                let joined = eval
                    .lengths
                    .iter()
                    .map(|&x| sci(x))
                    .collect::<Vec<_>>()
                    .join(" ");
                out.line(format!("{genus},{boundaries},{joined},{}", sci(eval.value)));
            }
            None => {
                out.line("exponents,pi_power,numerator,denominator");
                for term in &terms {
                    let joined = term
                        .exponents
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(" ");
                    out.line(format!(
                        "{joined},{},{},{}",
                        term.pi_power, term.numerator, term.denominator
                    ));
                }
            }
        },
        Format::Plain => {
            out.line(format!(
                "surface (g, n) = ({genus}, {boundaries}), complexity {}, dimension {}",
                surface.complexity(),
                surface.dimension()
            ));
            out.line(format!("V = {}", render_polynomial(&terms)));
            if let Some(eval) = &evaluation {
                let joined = eval
                    .lengths
                    .iter()
                    .map(|&x| sci(x))
                    .collect::<Vec<_>>()
                    .join(", ");
                out.line(format!("evaluation at [{joined}]"));
                for group in &eval.groups {
                    out.line(format!(
                        "  pi^{} contribution = {}",
                        2 * group.pi_power,
                        sci(group.value)
                    ));
                }
                out.line(format!("  value = {}", sci(eval.value)));
            }
        }
    }
    Ok(out.text)
}

// --- integrals --------------------------------------------------------------

#[derive(Serialize)]
struct IntegralJson {
    operation: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus: Option<u64>,
    value: f64,
    /// Achieved tolerance: quadrature error bound, or the forward residual
    /// for the inverse operations.
    achieved_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    subdivisions: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluations: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    half_log_genus: Option<f64>,
}

fn integrals(request: &Request, operation: IntegralOp) -> Result<String> {
    let cfg = quad();
    let mut out = Output::new("integrals");

    let (label, input, json) = match operation {
        IntegralOp::I { length } => {
            let detail = i_of_detail(length, &cfg)?;
            (
                format!("I({})", sci(length)),
                sci(length),
                IntegralJson {
                    operation: "i",
                    length: Some(length),
                    target: None,
                    genus: None,
                    value: detail.value,
                    achieved_tolerance: detail.error_bound,
                    subdivisions: Some(detail.subdivisions),
                    evaluations: None,
                    half_log_genus: None,
                },
            )
        }
        IntegralOp::T { length } => {
            let detail = t_of_detail(length, &cfg)?;
            (
                format!("T({})", sci(length)),
                sci(length),
                IntegralJson {
                    operation: "t",
                    length: Some(length),
                    target: None,
                    genus: None,
                    value: detail.value,
                    achieved_tolerance: detail.error_bound,
                    subdivisions: Some(detail.subdivisions),
                    evaluations: None,
                    half_log_genus: None,
                },
            )
        }
        IntegralOp::TInverse { target } => {
            let detail = t_inverse_detail(target, &cfg)?;
            (
                format!("Tinv({})", sci(target)),
                sci(target),
                IntegralJson {
                    operation: "t_inverse",
                    length: None,
                    target: Some(target),
                    genus: None,
                    value: detail.value,
                    achieved_tolerance: detail.forward_residual,
                    subdivisions: None,
                    evaluations: Some(detail.evaluations),
                    half_log_genus: None,
                },
            )
        }
        IntegralOp::L0 { genus } => {
            let value = l0_of(genus, &cfg)?;
            let half_log = 0.5 * (genus as f64).ln();
            let residual = (t_of(value, &cfg)? - half_log).abs();
            (
                format!("L0({genus})"),
                genus.to_string(),
                IntegralJson {
                    operation: "l0",
                    length: None,
                    target: None,
                    genus: Some(genus),
                    value,
                    achieved_tolerance: residual,
                    subdivisions: None,
                    evaluations: None,
                    half_log_genus: Some(half_log),
                },
            )
        }
        IntegralOp::C => {
            let detail = i_of_detail(1.0, &cfg)?;
            (
                "C".to_string(),
                String::new(),
                IntegralJson {
                    operation: "c",
                    length: None,
                    target: None,
                    genus: None,
                    value: detail.value,
                    achieved_tolerance: detail.error_bound,
                    subdivisions: Some(detail.subdivisions),
                    evaluations: None,
                    half_log_genus: None,
                },
            )
        }
    };

    match request.format {
        Format::Json => Ok(out.json(json)),
        Format::Csv => {
            out.line("operation,input,value,achieved_tolerance");
            out.line(format!(
                "{},{input},{},{}",
                json.operation,
                sci(json.value),
                sci(json.achieved_tolerance)
            ));
            Ok(out.text)
        }
        Format::Plain => {
            out.line(format!("{label} = {}", sci(json.value)));
            out.line(format!(
                "  achieved tolerance = {}",
                sci(json.achieved_tolerance)
            ));
            if let Some(subdivisions) = json.subdivisions {
                out.line(format!("  subdivisions = {subdivisions}"));
            }
            if let Some(evaluations) = json.evaluations {
                out.line(format!("  forward evaluations = {evaluations}"));
            }
            if let Some(half_log) = json.half_log_genus {
                out.line(format!(
                    "  forward check: |T(L0) - ln(g)/2| = {} against ln(g)/2 = {}",
                    sci(json.achieved_tolerance),
                    sci(half_log)
                ));
            }
            Ok(out.text)
        }
    }
}

// --- estimate ---------------------------------------------------------------

#[derive(Serialize)]
struct WitnessJson {
    forward_value: f64,
    half_log_genus: f64,
    residual: f64,
}

#[derive(Serialize)]
struct EstimateJson {
    genus: u64,
    window: f64,
    window_from_l0: bool,
    n_terms: u32,
    eps: f64,
    delta: f64,
    estimate: wpsys_core::estimator::Estimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<RegimeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l0_witness: Option<WitnessJson>,
}

fn regime_name(regime: Regime) -> &'static str {
    match regime {
        Regime::LongWindow => "long_window",
        Regime::ShortWindow => "short_window",
        Regime::Both => "both",
        Regime::Neither => "neither",
    }
}

#[allow(clippy::too_many_arguments)]
fn estimate(
    request: &Request,
    constants: &BoundConstants,
    genus: u64,
    window: Option<f64>,
    window_from_l0: bool,
    n_terms: u32,
    eps: f64,
    delta: f64,
) -> Result<String> {
    let cfg = quad();
    let window = match window {
        Some(value) => value,
        None => l0_of(genus, &cfg)?,
    };
    let estimate = systole_probability(genus, window, n_terms, constants, &cfg)?;
    let regime = if genus >= 16 {
        Some(regime_classify(genus, window, eps, delta, &cfg)?)
    } else {
        None
    };
    let l0_witness = if window_from_l0 {
        let half_log = 0.5 * (genus as f64).ln();
        let forward = t_of(window, &cfg)?;
        Some(WitnessJson {
            forward_value: forward,
            half_log_genus: half_log,
            residual: (forward - half_log).abs(),
        })
    } else {
        None
    };

    let mut out = Output::new("estimate");
    match request.format {
        Format::Json => Ok(out.json(EstimateJson {
            genus,
            window,
            window_from_l0,
            n_terms,
            eps,
            delta,
            estimate,
            regime,
            l0_witness,
        })),
        Format::Csv => {
            out.line(
                "genus,window,n_terms,n_effective,value,lower,upper,\
                 intensity_mass,truncation,truncation_cap,volume_ratio,regime",
            );
            out.line(format!(
                "{genus},{},{n_terms},{},{},{},{},{},{},{},{},{}",
                sci(window),
                estimate.terms.n_effective,
                sci(estimate.value),
                sci(estimate.lower),
                sci(estimate.upper),
                sci(estimate.terms.intensity_mass),
                sci(estimate.terms.truncation),
                sci(estimate.terms.truncation_cap),
                sci(estimate.terms.volume_ratio),
                regime.map_or("unclassified", |r| regime_name(r.regime)),
            ));
            Ok(out.text)
        }
        Format::Plain => {
            out.line(format!(
                "systole probability estimate: genus {genus}, window {}{}",
                sci(window),
                if window_from_l0 { " (from L0)" } else { "" }
            ));
            out.line(format!(
                "  n_terms = {n_terms} (effective {})",
                estimate.terms.n_effective
            ));
            out.line(format!(
                "  intensity mass I(L) = {}",
                sci(estimate.terms.intensity_mass)
            ));
            out.line(format!("  value = {}", sci(estimate.value)));
            out.line(format!("  lower = {}", sci(estimate.lower)));
            out.line(format!("  upper = {}", sci(estimate.upper)));
            out.line(format!(
                "  truncation = {} (cap {})",
                sci(estimate.terms.truncation),
                sci(estimate.terms.truncation_cap)
            ));
            out.line(format!(
                "  volume ratio = {}",
                sci(estimate.terms.volume_ratio)
            ));
            match &regime {
                Some(report) => {
                    out.line(format!(
                        "regime (eps = {}, delta = {}): {}",
                        sci(eps),
                        sci(delta),
                        regime_name(report.regime)
                    ));
                    out.line(format!(
                        "  long-window threshold (1+eps) lnln g = {} -> holds: {}",
                        sci(report.long_window_threshold),
                        report.long_window_holds
                    ));
                    out.line(format!(
                        "  short-window threshold ln((2-delta) ln g) = {} -> holds: {}",
                        sci(report.short_window_threshold),
                        report.short_window_holds
                    ));
                    match (report.growth_value, report.growth_exceeds_half_log) {
                        (Some(growth), Some(exceeds)) => out.line(format!(
                            "  T(window) = {} vs ln(g)/2 = {} -> exceeds: {exceeds}",
                            sci(growth),
                            sci(report.half_log_genus)
                        )),
                        _ => out.line("  T(window) not defined (window < 1)"),
                    }
                    if let (Some(growth), Some(within)) =
                        (report.growth_value, report.growth_within_short_budget)
                    {
                        out.line(format!(
                            "  T(window) = {} vs short budget (1-delta/2) ln g = {} \
                             -> within: {within}",
                            sci(growth),
                            sci(report.short_budget)
                        ));
                    }
                }
                None => out.line("regime: unclassified (needs genus >= 16)"),
            }
            if let Some(witness) = &l0_witness {
                out.line(format!(
                    "L0 witness: T(window) = {} matches ln(g)/2 = {} (residual {})",
                    sci(witness.forward_value),
                    sci(witness.half_log_genus),
                    sci(witness.residual)
                ));
            }
            Ok(out.text)
        }
    }
}

// --- bound ------------------------------------------------------------------

#[derive(Serialize)]
struct CaseJson {
    m: u32,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    primary: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    secondary: Option<f64>,
    total: f64,
}

#[derive(Serialize)]
struct BoundJson {
    genus: u64,
    boundaries: u64,
    window: f64,
    terms: wpsys_core::splitting::SeparatingBound,
    cases: Vec<CaseJson>,
}

fn bound(
    request: &Request,
    constants: &BoundConstants,
    genus: u64,
    boundaries: u64,
    window: f64,
) -> Result<String> {
    let breakdown = separating_volume_bound(genus, boundaries, window, constants)?;
    let mut cases = Vec::new();
    for m in 1..=TAIL_EXPONENT + 1 {
        let case = complexity_case_bound(genus, boundaries, window, m, constants)?;
        cases.push(match case {
            CaseBound::LowComplexity { value } => CaseJson {
                m,
                kind: "low",
                value: Some(value),
                primary: None,
                secondary: None,
                total: case.total(),
            },
            CaseBound::MidComplexity { value } => CaseJson {
                m,
                kind: "mid",
                value: Some(value),
                primary: None,
                secondary: None,
                total: case.total(),
            },
            CaseBound::Tail { primary, secondary } => CaseJson {
                m,
                kind: "tail",
                value: None,
                primary: Some(primary),
                secondary: Some(secondary),
                total: case.total(),
            },
        });
    }

    let mut out = Output::new("bound");
    match request.format {
        Format::Json => Ok(out.json(BoundJson {
            genus,
            boundaries,
            window,
            terms: breakdown,
            cases,
        })),
        Format::Csv => {
            out.line("component,m,value");
            out.line(format!(
                "term_low_complexity,,{}",
                sci(breakdown.low_complexity)
            ));
            out.line(format!(
                "term_mid_complexity,,{}",
                sci(breakdown.mid_complexity)
            ));
            out.line(format!("term_tail_primary,,{}", sci(breakdown.tail_primary)));
            out.line(format!(
                "term_tail_secondary,,{}",
                sci(breakdown.tail_secondary)
            ));
            out.line(format!("total,,{}", sci(breakdown.total)));
            for case in &cases {
                match case.kind {
                    "tail" => {
                        out.line(format!(
                            "case_tail_primary,{},{}",
                            case.m,
                            sci(case.primary.unwrap_or(0.0))
                        ));
                        out.line(format!(
                            "case_tail_secondary,{},{}",
                            case.m,
                            sci(case.secondary.unwrap_or(0.0))
                        ));
                    }
                    _ => out.line(format!(
                        "case,{},{}",
                        case.m,
                        sci(case.value.unwrap_or(0.0))
                    )),
                }
            }
            Ok(out.text)
        }
        Format::Plain => {
            out.line(format!(
                "separating multicurve volume bound: genus {genus}, boundaries \
                 {boundaries}, window {}",
                sci(window)
            ));
            out.line(format!(
                "  low complexity (m = 1)        = {}",
                sci(breakdown.low_complexity)
            ));
            out.line(format!(
                "  mid complexity (2 <= m <= {TAIL_EXPONENT}) = {}",
                sci(breakdown.mid_complexity)
            ));
            out.line(format!(
                "  tail primary (m > {TAIL_EXPONENT})         = {}",
                sci(breakdown.tail_primary)
            ));
            out.line(format!(
                "  tail secondary                = {}",
                sci(breakdown.tail_secondary)
            ));
            out.line(format!(
                "  total                         = {}",
                sci(breakdown.total)
            ));
            out.line("per-complexity cases:");
            for case in &cases {
                match case.kind {
                    "tail" => out.line(format!(
                        "  m >= {}: primary = {}, secondary = {}",
                        case.m,
                        sci(case.primary.unwrap_or(0.0)),
                        sci(case.secondary.unwrap_or(0.0))
                    )),
                    _ => out.line(format!(
                        "  m = {:>2} ({}): {}",
                        case.m,
                        case.kind,
                        sci(case.value.unwrap_or(0.0))
                    )),
                }
            }
            Ok(out.text)
        }
    }
}

// --- simulate ---------------------------------------------------------------

#[derive(Serialize)]
struct CdfRowJson {
    point: f64,
    fraction: f64,
    stderr: f64,
    survival: f64,
    model_survival: f64,
}

#[derive(Serialize)]
struct SimulateJson {
    trials: u64,
    seed: u64,
    window: f64,
    inversion_grid: u32,
    total_mass: f64,
    count_mean: f64,
    count_variance: f64,
    cdf: Vec<CdfRowJson>,
}

fn simulate(
    request: &Request,
    trials: u64,
    seed: u64,
    window: f64,
    points: &[f64],
    inversion_grid: u32,
) -> Result<String> {
    let config = SimConfig::new(trials, seed, window)?.with_inversion_grid(inversion_grid)?;
    let report = run_simulation(&config, points)?;
    let cfg = quad();
    let mut rows = Vec::with_capacity(report.cdf.len());
    for row in &report.cdf {
        rows.push(CdfRowJson {
            point: row.point,
            fraction: row.fraction,
            stderr: row.stderr,
            survival: 1.0 - row.fraction,
            model_survival: (-i_of(row.point, &cfg)?).exp(),
        });
    }

    let mut out = Output::new("simulate");
    match request.format {
        Format::Json => Ok(out.json(SimulateJson {
            trials,
            seed,
            window,
            inversion_grid,
            total_mass: report.total_mass,
            count_mean: report.count_mean,
            count_variance: report.count_variance,
            cdf: rows,
        })),
        Format::Csv => {
            out.line("point,fraction,stderr,survival,model_survival");
            for row in &rows {
                out.line(format!(
                    "{},{},{},{},{}",
                    sci(row.point),
                    sci(row.fraction),
                    sci(row.stderr),
                    sci(row.survival),
                    sci(row.model_survival)
                ));
            }
            Ok(out.text)
        }
        Format::Plain => {
            out.line(format!(
                "poisson length-spectrum simulation: trials {trials}, seed {seed}, \
                 window {}, grid {inversion_grid}",
                sci(window)
            ));
            out.line(format!("  total mass I(L) = {}", sci(report.total_mass)));
            out.line(format!("  count mean = {}", sci(report.count_mean)));
            out.line(format!(
                "  count variance = {}",
                sci(report.count_variance)
            ));
            out.line("systole distribution:");
            out.line("  t, P(sys <= t), stderr, P(sys > t), model e^-I(t)");
            for row in &rows {
                out.line(format!(
                    "  {}, {}, {}, {}, {}",
                    sci(row.point),
                    sci(row.fraction),
                    sci(row.stderr),
                    sci(row.survival),
                    sci(row.model_survival)
                ));
            }
            Ok(out.text)
        }
    }
}
