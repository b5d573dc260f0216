//! Exact Weil-Petersson volume polynomials.
//!
//! A volume polynomial for a bordered surface of genus `g` with `n` boundary
//! components is an even symmetric polynomial in the boundary lengths whose
//! coefficients are positive rationals times even powers of pi, of total
//! degree exactly `6g - 6 + 2n`.  The polynomials themselves are shipped as a
//! read-only JSON table (generated offline by an independent recursion) and
//! evaluated exactly: lengths are converted losslessly from `f64` to
//! rationals, the accumulation runs in `Q` grouped by pi-power, and a single
//! rounding per pi-power group happens at the very end.  Re-evaluating at the
//! same inputs therefore reproduces results bit-for-bit.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num::{BigInt, BigRational, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A topological type `(genus, boundary components)` of a bordered hyperbolic
/// surface; requires `2g - 2 + n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SurfaceType {
    genus: u32,
    boundaries: u32,
}

impl SurfaceType {
    pub fn new(genus: u32, boundaries: u32) -> Result<Self> {
        if 2 * genus as i64 - 2 + (boundaries as i64) < 1 {
            return Err(Error::InvalidParameter(format!(
                "({genus}, {boundaries}) is not a hyperbolic surface type: need 2g - 2 + n >= 1"
            )));
        }
        Ok(Self { genus, boundaries })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn boundaries(&self) -> u32 {
        self.boundaries
    }

    /// `2g - 2 + n`, the absolute Euler characteristic.
    pub fn complexity(&self) -> u32 {
        (2 * self.genus as i64 - 2 + self.boundaries as i64) as u32
    }

    /// Real dimension of the moduli space, `6g - 6 + 2n`; also the total
    /// degree of the volume polynomial.
    pub fn dimension(&self) -> u32 {
        (6 * self.genus as i64 - 6 + 2 * self.boundaries as i64) as u32
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.genus, self.boundaries)
    }
}

/// An exact value of the form `sum_j c_j pi^(2j)` with rational `c_j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PiPolynomial {
    coeffs: BTreeMap<u32, BigRational>,
}

impl PiPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add(&mut self, pi2pow: u32, coeff: &BigRational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(pi2pow).or_insert_with(BigRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.coeffs.remove(&pi2pow);
        }
    }

    pub fn coefficient(&self, pi2pow: u32) -> BigRational {
        self.coeffs.get(&pi2pow).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().map(|(j, c)| (*j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Float contribution of each group, in ascending pi-power order.  Each
    /// entry is `pi^(2j) * num / den` rounded once; summing them in this
    /// order reproduces [`Self::to_f64`] exactly.
    pub fn group_contributions(&self) -> Vec<(u32, f64)> {
        self.coeffs
            .iter()
            .map(|(j, coeff)| {
                let num = coeff.numer().to_f64().unwrap_or(f64::INFINITY);
                let den = coeff.denom().to_f64().unwrap_or(f64::INFINITY);
                (*j, std::f64::consts::PI.powi(2 * *j as i32) * num / den)
            })
            .collect()
    }

    /// The single rounding step: each group becomes
    /// `pi^(2j) * num / den` in f64, summed in ascending `j`.  This order is
    /// part of the output contract (it is what makes results reproducible).
    pub fn to_f64(&self) -> f64 {
        self.group_contributions()
            .into_iter()
            .map(|(_, value)| value)
            .sum()
    }
}

/// One term `coeff * prod_i x_i^(2 * xpow[i]) * pi^(2 * pi2pow)`.
type TermKey = (Vec<u32>, u32);

/// An even symmetric polynomial in `arity` boundary lengths over `Q[pi^2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumePolynomial {
    arity: usize,
    terms: BTreeMap<TermKey, BigRational>,
}

impl VolumePolynomial {
    pub(crate) fn from_terms(arity: usize, terms: BTreeMap<TermKey, BigRational>) -> Self {
        Self { arity, terms }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms as `(exponents of x_i^2, power of pi^2, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u32, &BigRational)> {
        self.terms.iter().map(|((xpow, j), c)| (xpow.as_slice(), *j, c))
    }

    /// Largest total degree `2 * (sum xpow + pi2pow)` over all terms.
    pub fn top_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(xpow, j)| 2 * (xpow.iter().sum::<u32>() + j))
            .max()
            .unwrap_or(0)
    }

    /// Exact evaluation at rational boundary lengths.
    pub fn evaluate_exact(&self, lengths: &[BigRational]) -> Result<PiPolynomial> {
        if lengths.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: lengths.len(),
            });
        }
        let mut out = PiPolynomial::zero();
        for ((xpow, j), coeff) in &self.terms {
            let mut value = coeff.clone();
            for (length, &power) in lengths.iter().zip(xpow) {
                for _ in 0..power {
                    value *= length * length;
                }
                if value.is_zero() {
                    break;
                }
            }
            out.add(*j, &value);
        }
        Ok(out)
    }

    /// Evaluation at nonnegative real lengths with the rational grouping kept:
    /// every finite `f64` converts losslessly to a rational, so the result is
    /// exact.
    pub fn evaluate_grouped(&self, lengths: &[f64]) -> Result<PiPolynomial> {
        self.evaluate_exact(&floats_to_rationals(lengths)?)
    }

    /// Evaluation at nonnegative real lengths through the exact path; the
    /// only rounding is the final per-pi-power conversion.
    pub fn evaluate(&self, lengths: &[f64]) -> Result<f64> {
        Ok(self.evaluate_grouped(lengths)?.to_f64())
    }
}

pub(crate) fn floats_to_rationals(lengths: &[f64]) -> Result<Vec<BigRational>> {
    lengths
        .iter()
        .map(|&x| {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "boundary lengths must be finite and nonnegative, got {x}"
                )));
            }
            Ok(BigRational::from_float(x).expect("finite f64 is rational"))
        })
        .collect()
}

/// `sinh(x/2) / (x/2)`, continuously extended to 1 at `x = 0`.
pub fn sinh_ratio(x: f64) -> f64 {
    let t = 0.5 * x;
    if t == 0.0 {
        1.0
    } else {
        t.sinh() / t
    }
}

// --- the table -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TableFileJson {
    version: u32,
    m_max: u32,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    g: u32,
    n: u32,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    xpow: Vec<u32>,
    pi2pow: u32,
    num: i64,
    den: i64,
}

/// Read-only table of volume polynomials covering every surface type with
/// complexity `2g - 2 + n` up to `m_max`.
#[derive(Debug, Clone)]
pub struct PolyTable {
    m_max: u32,
    entries: BTreeMap<SurfaceType, VolumePolynomial>,
}

static BUILTIN_JSON: &str = include_str!("../data/wp_table.json");
static BUILTIN: OnceLock<PolyTable> = OnceLock::new();

impl PolyTable {
    /// The table shipped with the library (complexity up to 4).
    pub fn builtin() -> &'static PolyTable {
        BUILTIN.get_or_init(|| {
            PolyTable::from_json_str(BUILTIN_JSON).expect("builtin table must validate")
        })
    }

    pub fn load(path: &std::path::Path) -> Result<PolyTable> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::TableIo {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<PolyTable> {
        let file: TableFileJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidTable(format!("malformed JSON: {e}")))?;
        if file.version != 1 {
            return Err(Error::InvalidTable(format!(
                "unsupported table version {}",
                file.version
            )));
        }
        if file.m_max < 2 {
            return Err(Error::InvalidTable(
                "table must cover at least complexity 2".into(),
            ));
        }

        let mut entries = BTreeMap::new();
        for entry in &file.entries {
            let surface = SurfaceType::new(entry.g, entry.n)
                .map_err(|_| Error::InvalidTable(format!("unstable type ({}, {})", entry.g, entry.n)))?;
            if surface.complexity() > file.m_max {
                return Err(Error::InvalidTable(format!(
                    "entry {surface} exceeds the declared complexity bound {}",
                    file.m_max
                )));
            }
            let mut terms: BTreeMap<TermKey, BigRational> = BTreeMap::new();
            for term in &entry.terms {
                if term.xpow.len() != entry.n as usize {
                    return Err(Error::InvalidTable(format!(
                        "term arity mismatch in entry {surface}"
                    )));
                }
                if term.num <= 0 || term.den <= 0 {
                    return Err(Error::InvalidTable(format!(
                        "nonpositive coefficient in entry {surface}"
                    )));
                }
                let coeff = BigRational::new(BigInt::from(term.num), BigInt::from(term.den));
                if terms
                    .insert((term.xpow.clone(), term.pi2pow), coeff)
                    .is_some()
                {
                    return Err(Error::InvalidTable(format!(
                        "duplicate term in entry {surface}"
                    )));
                }
            }
            let poly = VolumePolynomial::from_terms(entry.n as usize, terms);
            validate_polynomial(surface, &poly)?;
            if entries.insert(surface, poly).is_some() {
                return Err(Error::InvalidTable(format!("duplicate entry {surface}")));
            }
        }

        let table = PolyTable {
            m_max: file.m_max,
            entries,
        };
        table.validate_coverage()?;
        table.validate_pinned_entries()?;
        Ok(table)
    }

    /// Deterministic serialization in the same schema the generator writes.
    pub fn to_json_string(&self) -> String {
        let entries = {
            let mut sorted: Vec<&SurfaceType> = self.entries.keys().collect();
            sorted.sort_by_key(|t| (t.complexity(), t.genus(), t.boundaries()));
            sorted
                .into_iter()
                .map(|t| {
                    let poly = &self.entries[t];
                    EntryJson {
                        g: t.genus(),
                        n: t.boundaries(),
                        terms: poly
                            .terms()
                            .map(|(xpow, pi2pow, coeff)| TermJson {
                                xpow: xpow.to_vec(),
                                pi2pow,
                                num: coeff.numer().to_i64().expect("table coefficient fits i64"),
                                den: coeff.denom().to_i64().expect("table coefficient fits i64"),
                            })
                            .collect(),
                    }
                })
                .collect()
        };
        let file = TableFileJson {
            version: 1,
            m_max: self.m_max,
            entries,
        };
        let mut text = serde_json::to_string_pretty(&file).expect("serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    pub fn surface_types(&self) -> impl Iterator<Item = SurfaceType> + '_ {
        self.entries.keys().copied()
    }

    /// The volume polynomial for a surface type.
    pub fn polynomial(&self, surface: SurfaceType) -> Result<&VolumePolynomial> {
        self.entries.get(&surface).ok_or(Error::UnknownType {
            g: surface.genus(),
            n: surface.boundaries(),
            m_max: self.m_max,
        })
    }

    /// The constant `V_{g,n} = V_{g,n}(0, ..., 0)`.
    pub fn constant(&self, surface: SurfaceType) -> Result<f64> {
        let poly = self.polynomial(surface)?;
        let zeros = vec![BigRational::zero(); poly.arity()];
        Ok(poly.evaluate_exact(&zeros)?.to_f64())
    }

    /// The product upper bound
    /// `V_{g,n} * prod_i sinh(x_i/2)/(x_i/2)`, which dominates the polynomial
    /// at every nonnegative length vector (with equality at zero).
    pub fn sinh_ratio_bound(&self, surface: SurfaceType, lengths: &[f64]) -> Result<f64> {
        let poly = self.polynomial(surface)?;
        if lengths.len() != poly.arity() {
            return Err(Error::ArityMismatch {
                expected: poly.arity(),
                got: lengths.len(),
            });
        }
        for &x in lengths {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "boundary lengths must be finite and nonnegative, got {x}"
                )));
            }
        }
        let mut bound = self.constant(surface)?;
        for &x in lengths {
            bound *= sinh_ratio(x);
        }
        Ok(bound)
    }
}

fn validate_polynomial(surface: SurfaceType, poly: &VolumePolynomial) -> Result<()> {
    let dim = surface.dimension();
    if poly.top_degree() != dim {
        return Err(Error::InvalidTable(format!(
            "entry {surface} has top degree {} instead of {dim}",
            poly.top_degree()
        )));
    }
    for (xpow, j, _) in poly.terms() {
        if 2 * (xpow.iter().sum::<u32>() + j) > dim {
            return Err(Error::InvalidTable(format!(
                "entry {surface} has a term above total degree {dim}"
            )));
        }
    }
    // Symmetry under any permutation of the boundary variables is equivalent
    // to: sorting the exponent vector of every term lands on a term with the
    // same coefficient.
    for ((xpow, j), coeff) in &poly.terms {
        let mut sorted = xpow.clone();
        sorted.sort_unstable();
        match poly.terms.get(&(sorted, *j)) {
            Some(other) if other == coeff => {}
            _ => {
                return Err(Error::InvalidTable(format!(
                    "entry {surface} is not symmetric in its boundary variables"
                )))
            }
        }
    }
    Ok(())
}

impl PolyTable {
    fn validate_coverage(&self) -> Result<()> {
        for m in 1..=self.m_max {
            for g in 0..=((m + 2) / 2) {
                let n = m as i64 + 2 - 2 * g as i64;
                if n < 0 {
                    continue;
                }
                let surface = SurfaceType::new(g, n as u32)
                    .expect("complexity >= 1 implies a valid surface type");
                if !self.entries.contains_key(&surface) {
                    return Err(Error::InvalidTable(format!(
                        "missing entry {surface} (complexity {m})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The two classical anchors that pin the table's normalization: the
    /// thrice-punctured sphere is identically 1 and the once-punctured torus
    /// is `(x^2 + 4 pi^2)/24`.
    fn validate_pinned_entries(&self) -> Result<()> {
        let rat = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));

        let v03 = &self.entries[&SurfaceType::new(0, 3).unwrap()];
        let expect_v03: BTreeMap<TermKey, BigRational> =
            [((vec![0, 0, 0], 0), rat(1, 1))].into_iter().collect();
        if v03.terms != expect_v03 {
            return Err(Error::InvalidTable(
                "entry (0, 3) must be identically 1".into(),
            ));
        }

        let v11 = &self.entries[&SurfaceType::new(1, 1).unwrap()];
        let expect_v11: BTreeMap<TermKey, BigRational> =
            [((vec![1], 0), rat(1, 24)), ((vec![0], 1), rat(1, 6))]
                .into_iter()
                .collect();
        if v11.terms != expect_v11 {
            return Err(Error::InvalidTable(
                "entry (1, 1) must be (x^2 + 4 pi^2)/24".into(),
            ));
        }
        Ok(())
    }
}
