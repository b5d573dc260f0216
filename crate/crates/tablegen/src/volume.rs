//! Assembly of Weil-Petersson volume polynomials from intersection numbers,
//! plus the exact cross-identities used to validate every generated entry.
//!
//! A polynomial is stored as a map from `(xpow, pi2pow)` to a rational
//! coefficient, representing `coeff * prod_i b_i^(2 * xpow[i]) * pi^(2 * pi2pow)`.
//! The assembly is
//!
//! ```text
//! V_{g,n}(b) = sum_{|a| + m = 3g-3+n}  (2 pi^2)^m / (2^|a| a! m!)
//!              <tau_{a_1} ... tau_{a_n} kappa_1^m>_g  prod b_i^(2 a_i)
//! ```
//!
//! which yields the "stack" normalization.  The published tables the short
//! -geodesic literature works with differ in exactly one entry: the
//! once-punctured torus carries an extra factor 2 (its elliptic involution is
//! not quotiented out), so `V_{1,1}(b) = (b^2 + 4 pi^2)/24` there.  The stack
//! and table normalizations are kept separate so the cross-identities (which
//! hold in the stack normalization) stay exact.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::intersection::{factorial, Correlators};

/// Exact polynomial in `arity` boundary variables and pi^2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPolynomial {
    pub genus: u32,
    pub arity: usize,
    /// `(per-variable powers of b_i^2, power of pi^2) -> coefficient`.
    pub terms: BTreeMap<(Vec<u32>, u32), BigRational>,
}

impl ExactPolynomial {
    fn add_term(&mut self, xpow: Vec<u32>, pi2pow: u32, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry((xpow, pi2pow))
            .or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            // Re-borrowing to remove; cheap at these sizes.
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&mut self, factor: &BigRational) {
        for coeff in self.terms.values_mut() {
            *coeff *= factor;
        }
    }

    /// Total degree `2 * (sum xpow + pi2pow)` of the highest term.
    pub fn top_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(xpow, j)| 2 * (xpow.iter().sum::<u32>() + j))
            .max()
            .unwrap_or(0)
    }

    /// Substitute `b_last^2 -> -4 pi^2` (evaluation at 2 pi i), dropping the
    /// last variable.
    pub fn substitute_last_imaginary(&self) -> ExactPolynomial {
        assert!(self.arity >= 1);
        let mut out = ExactPolynomial {
            genus: self.genus,
            arity: self.arity - 1,
            terms: BTreeMap::new(),
        };
        for ((xpow, j), coeff) in &self.terms {
            let a = xpow[self.arity - 1];
            let mut factor = BigRational::one();
            for _ in 0..a {
                factor *= BigRational::from_integer(BigInt::from(-4));
            }
            out.add_term(xpow[..self.arity - 1].to_vec(), j + a, coeff * factor);
        }
        out
    }

    /// `d/db_last` evaluated at `b_last = 2 pi i`, with both sides of the
    /// dilaton identity pre-multiplied by `2 pi i` so the result stays in
    /// `Q[pi^2]`: returns `sum c * 2a * (-4)^a pi^(2a) * rest`.
    pub fn scaled_derivative_last_imaginary(&self) -> ExactPolynomial {
        assert!(self.arity >= 1);
        let mut out = ExactPolynomial {
            genus: self.genus,
            arity: self.arity - 1,
            terms: BTreeMap::new(),
        };
        for ((xpow, j), coeff) in &self.terms {
            let a = xpow[self.arity - 1];
            if a == 0 {
                continue;
            }
            let mut factor = BigRational::from_integer(BigInt::from(2 * a as i64));
            for _ in 0..a {
                factor *= BigRational::from_integer(BigInt::from(-4));
            }
            out.add_term(xpow[..self.arity - 1].to_vec(), j + a, coeff * factor);
        }
        out
    }

    /// `sum_k int_0^{b_k} y * self(.., y at k, ..) dy` — the right side of the
    /// string identity; same arity.
    pub fn string_integral_sum(&self) -> ExactPolynomial {
        let mut out = ExactPolynomial {
            genus: self.genus,
            arity: self.arity,
            terms: BTreeMap::new(),
        };
        for k in 0..self.arity {
            for ((xpow, j), coeff) in &self.terms {
                let mut new_pow = xpow.clone();
                new_pow[k] += 1;
                let denom = BigRational::from_integer(BigInt::from(2 * xpow[k] as i64 + 2));
                out.add_term(new_pow, *j, coeff / denom);
            }
        }
        out
    }
}

fn compositions_up_to(n: usize, max_sum: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fn rec(idx: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if idx == current.len() {
            out.push(current.clone());
            return;
        }
        for a in 0..=remaining {
            current[idx] = a;
            rec(idx + 1, remaining - a, current, out);
        }
        current[idx] = 0;
    }
    rec(0, max_sum, &mut current, &mut out);
    out
}

/// Stack-normalized volume polynomial.  Panics on unstable `(g, n)`.
pub fn volume_polynomial_stack(c: &mut Correlators, g: u32, n: u32) -> ExactPolynomial {
    assert!(
        2 * g as i64 - 2 + n as i64 > 0,
        "unstable surface type ({g}, {n})"
    );
    let dim = (3 * g as i64 - 3 + n as i64) as u32;
    let mut poly = ExactPolynomial {
        genus: g,
        arity: n as usize,
        terms: BTreeMap::new(),
    };
    for alpha in compositions_up_to(n as usize, dim) {
        let weight: u32 = alpha.iter().sum();
        let m = dim - weight;
        let corr = c.mixed(g, &alpha, m);
        if corr.is_zero() {
            continue;
        }
        let mut denom = BigInt::one() << weight; // 2^|alpha|
        for &a in &alpha {
            denom *= factorial(a);
        }
        denom *= factorial(m);
        let numer = BigInt::one() << m; // from (2 pi^2)^m
        let coeff = corr * BigRational::new(numer, denom);
        poly.add_term(alpha, m, coeff);
    }
    poly
}

/// Table-normalized volume polynomial (the `(1,1)` entry is doubled).
pub fn volume_polynomial(c: &mut Correlators, g: u32, n: u32) -> ExactPolynomial {
    let mut poly = volume_polynomial_stack(c, g, n);
    if g == 1 && n == 1 {
        poly.scale(&BigRational::from_integer(BigInt::from(2)));
    }
    poly
}

/// All surface types with `1 <= 2g - 2 + n <= m_max`, ordered by
/// `(complexity, g, n)`.
pub fn surface_types(m_max: u32) -> Vec<(u32, u32)> {
    let mut types = Vec::new();
    for m in 1..=m_max {
        for g in 0..=((m + 2) / 2) {
            let rest = m as i64 + 2 - 2 * g as i64;
            if rest >= 0 {
                types.push((g, rest as u32));
            }
        }
    }
    types
}

// --- JSON emission (schema shared with the consumer by construction) -------

#[derive(Serialize, Deserialize)]
pub struct TableFile {
    pub version: u32,
    pub m_max: u32,
    pub entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
pub struct EntryJson {
    pub g: u32,
    pub n: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct TermJson {
    pub xpow: Vec<u32>,
    pub pi2pow: u32,
    pub num: i64,
    pub den: i64,
}

pub fn generate_table(m_max: u32) -> TableFile {
    let mut c = Correlators::new();
    let mut entries = Vec::new();
    for (g, n) in surface_types(m_max) {
        let poly = volume_polynomial(&mut c, g, n);
        let mut terms = Vec::new();
        for ((xpow, pi2pow), coeff) in &poly.terms {
            let num = i64::try_from(coeff.numer().clone())
                .expect("table coefficient numerator exceeds i64");
            let den = i64::try_from(coeff.denom().clone())
                .expect("table coefficient denominator exceeds i64");
            assert!(den > 0 && num > 0, "table coefficients must be positive");
            terms.push(TermJson {
                xpow: xpow.clone(),
                pi2pow: *pi2pow,
                num,
                den,
            });
        }
        entries.push(EntryJson { g, n, terms });
    }
    TableFile {
        version: 1,
        m_max,
        entries,
    }
}

pub fn render_table(table: &TableFile) -> String {
    let mut out = serde_json::to_string_pretty(table).expect("table serialization cannot fail");
    out.push('\n');
    out
}
