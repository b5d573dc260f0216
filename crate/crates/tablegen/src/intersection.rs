//! Psi-class intersection numbers on moduli of stable curves, plus products
//! with powers of the first Mumford class.
//!
//! The generating recursion is the Virasoro (DVV) relation for the correlators
//! `<tau_{d_1} ... tau_{d_n}>_g`, seeded by `<tau_0^3>_0 = 1` and
//! `<tau_1>_1 = 1/24`.  Powers of kappa_1 are reduced to pure psi correlators
//! by trading one kappa power for one extra marked point at a time:
//!
//! ```text
//! <kappa_1^m X>_{g,n} = sum_{j=0}^{m-1} (-1)^(m-1-j) C(m-1, j)
//!                       <kappa_1^j tau_{m+1-j} X>_{g,n+1}
//! ```
//!
//! which follows from pushing forward along the forgetful map (the boundary
//! correction terms die against the psi^2 factor at the extra point).
//! Everything is exact rational arithmetic.

use std::collections::HashMap;

use num::{BigInt, BigRational, One, Zero};

/// Product of the odd integers down from `m` (so `df_odd(-1) = df_odd(1) = 1`).
fn df_odd(m: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = m;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// Memoized correlator store.
#[derive(Default)]
pub struct Correlators {
    psi_cache: HashMap<(u32, Vec<u32>), BigRational>,
    mixed_cache: HashMap<(u32, Vec<u32>, u32), BigRational>,
}

impl Correlators {
    pub fn new() -> Self {
        Self::default()
    }

    /// `<tau_{d_1} ... tau_{d_n}>_g`; zero unless the moduli space is stable
    /// and the powers sum to its dimension `3g - 3 + n`.
    pub fn psi(&mut self, g: u32, powers: &[u32]) -> BigRational {
        let n = powers.len() as i64;
        let gi = g as i64;
        if 2 * gi - 2 + n <= 0 {
            return BigRational::zero();
        }
        let dim = 3 * gi - 3 + n;
        let total: i64 = powers.iter().map(|&d| d as i64).sum();
        if total != dim {
            return BigRational::zero();
        }
        if g == 0 && n == 3 {
            return BigRational::one();
        }
        if g == 1 && n == 1 {
            return ratio(BigInt::one(), BigInt::from(24));
        }

        let mut key: Vec<u32> = powers.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        if let Some(v) = self.psi_cache.get(&(g, key.clone())) {
            return v.clone();
        }

        // Apply the recursion to the largest power; past the base cases the
        // dimension count forces it to be >= 1.
        let d1 = key[0] as i64;
        debug_assert!(d1 >= 1);
        let rest: Vec<u32> = key[1..].to_vec();
        let mut acc = BigRational::zero();

        // Join terms with each remaining marked point.
        for j in 0..rest.len() {
            let dj = rest[j] as i64;
            let weight = ratio(df_odd(2 * (d1 + dj) - 1), df_odd(2 * dj - 1));
            let mut sub: Vec<u32> = Vec::with_capacity(rest.len());
            sub.extend(rest.iter().take(j));
            sub.extend(rest.iter().skip(j + 1));
            sub.push((d1 + dj - 1) as u32);
            acc += weight * self.psi(g, &sub);
        }

        // Boundary terms: split tau_{d1} into tau_a tau_b over a node.
        let half = ratio(BigInt::one(), BigInt::from(2));
        for a in 0..=(d1 - 2).max(-1) {
            let b = d1 - 2 - a;
            if b < 0 {
                continue;
            }
            let weight = ratio(df_odd(2 * a + 1) * df_odd(2 * b + 1), BigInt::one());

            // Non-separating node.
            if g >= 1 {
                let mut sub = rest.clone();
                sub.push(a as u32);
                sub.push(b as u32);
                acc += half.clone() * weight.clone() * self.psi(g - 1, &sub);
            }

            // Separating node: all genus splits and all distributions of the
            // remaining marked points (ordered, hence the single 1/2 overall).
            for mask in 0u32..(1 << rest.len()) {
                let mut left: Vec<u32> = vec![a as u32];
                let mut right: Vec<u32> = vec![b as u32];
                for (i, &d) in rest.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        left.push(d);
                    } else {
                        right.push(d);
                    }
                }
                for gp in 0..=g {
                    let lv = self.psi(gp, &left);
                    if lv.is_zero() {
                        continue;
                    }
                    let rv = self.psi(g - gp, &right);
                    if rv.is_zero() {
                        continue;
                    }
                    acc += half.clone() * weight.clone() * lv * rv;
                }
            }
        }

        let res = acc / ratio(df_odd(2 * d1 + 1), BigInt::one());
        self.psi_cache.insert((g, key), res.clone());
        res
    }

    /// `<kappa_1^m tau_{d_1} ... tau_{d_n}>_g` via the forgetful-map reduction.
    pub fn mixed(&mut self, g: u32, taus: &[u32], m: u32) -> BigRational {
        if m == 0 {
            return self.psi(g, taus);
        }
        let mut key: Vec<u32> = taus.to_vec();
        key.sort_unstable();
        if let Some(v) = self.mixed_cache.get(&(g, key.clone(), m)) {
            return v.clone();
        }

        let mut acc = BigRational::zero();
        for j in 0..m {
            let coeff = ratio(binomial(m - 1, j), BigInt::one());
            let mut extended = taus.to_vec();
            extended.push(m + 1 - j);
            let term = coeff * self.mixed(g, &extended, j);
            if (m - 1 - j) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }

        self.mixed_cache.insert((g, key, m), acc.clone());
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn base_cases() {
        let mut c = Correlators::new();
        assert_eq!(c.psi(0, &[0, 0, 0]), rat(1, 1));
        assert_eq!(c.psi(1, &[1]), rat(1, 24));
        // Unstable or dimension-violating inputs vanish.
        assert_eq!(c.psi(0, &[0, 0]), rat(0, 1));
        assert_eq!(c.psi(1, &[0]), rat(0, 1));
        assert_eq!(c.psi(0, &[1, 0, 0]), rat(0, 1));
    }

    #[test]
    fn genus_zero_closed_form() {
        // <tau_{d_1}...tau_{d_n}>_0 = (n-3)! / prod d_i!  when sum d_i = n-3.
        let mut c = Correlators::new();
        let cases: &[(&[u32], i64, i64)] = &[
            (&[1, 0, 0, 0], 1, 1),
            (&[2, 0, 0, 0, 0], 1, 1),
            (&[1, 1, 0, 0, 0], 2, 1),
            (&[3, 0, 0, 0, 0, 0], 1, 1),
            (&[2, 1, 0, 0, 0, 0], 3, 1),
            (&[1, 1, 1, 0, 0, 0], 6, 1),
        ];
        for (powers, num, den) in cases {
            assert_eq!(c.psi(0, powers), rat(*num, *den), "powers {powers:?}");
        }
    }

    #[test]
    fn genus_one_and_two_textbook_values() {
        let mut c = Correlators::new();
        assert_eq!(c.psi(1, &[1, 1]), rat(1, 24));
        assert_eq!(c.psi(1, &[2, 0]), rat(1, 24));
        assert_eq!(c.psi(2, &[4]), rat(1, 1152));
        assert_eq!(c.psi(2, &[3, 2]), rat(29, 5760));
        assert_eq!(c.psi(2, &[2, 2, 2]), rat(7, 240));
    }

    #[test]
    fn kappa_reduction_known_values() {
        let mut c = Correlators::new();
        // kappa_1 = pushforward of psi^2: <kappa_1>_{1,1} = <tau_0 tau_2>_{1,2}.
        assert_eq!(c.mixed(1, &[0], 1), rat(1, 24));
        assert_eq!(c.mixed(0, &[0, 0, 0, 0], 1), rat(1, 1));
        // Assembled by hand from <tau_4>_2, <tau_3 tau_2>_2, <tau_2^3>_2.
        assert_eq!(c.mixed(2, &[], 3), rat(43, 2880));
    }
}
