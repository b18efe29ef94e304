//! Exact level statistics, density recurrences, the Pisot root and the
//! limit-matrix spectrum.
//!
//! Counts are `u128` with checked arithmetic. Densities are exact
//! [`BigRational`]s; floating point only appears in the growth diagnostics
//! and the spectral constants.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, Num, One, Signed, ToPrimitive};

use crate::block_pillar::pillar_stream;
use crate::budget::Budget;
use crate::error::{Error, Result};

/// Lengths and symbol-1 counts of `B_n` and `P_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub n: usize,
    /// `L_n = |B_n|`
    pub block_len: u128,
    /// `m_n = |P_n|`
    pub pillar_len: u128,
    /// `c_n`, ones in `B_n`
    pub block_ones: u128,
    /// `o_n`, ones in `P_n`
    pub pillar_ones: u128,
    /// `L_{n-1}`, absent at the first level.
    pub prev_block_len: Option<u128>,
}

fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl LevelStats {
    pub fn initial() -> LevelStats {
        LevelStats {
            n: 1,
            block_len: 11,
            pillar_len: 1,
            block_ones: 5,
            pillar_ones: 0,
            prev_block_len: None,
        }
    }

    /// Applies the length and count recurrences. `next_pillar_ones` is the
    /// sum of the even-indexed symbols of the current pillar.
    pub fn successor(&self, next_pillar_ones: u128) -> Result<LevelStats> {
        let level = self.n + 1;
        let overflow = || Error::Overflow { level };
        let block_len = self
            .block_len
            .checked_mul(2)
            .and_then(|x| x.checked_add(self.pillar_len))
            .ok_or_else(overflow)?;
        let pillar_len = self
            .pillar_len
            .checked_mul(3)
            .and_then(|x| x.checked_sub(self.pillar_ones.checked_mul(2)?))
            .ok_or_else(overflow)?;
        let block_ones = self
            .block_ones
            .checked_mul(2)
            .and_then(|x| x.checked_add(self.pillar_ones))
            .ok_or_else(overflow)?;
        Ok(LevelStats {
            n: level,
            block_len,
            pillar_len,
            block_ones,
            pillar_ones: next_pillar_ones,
            prev_block_len: Some(self.block_len),
        })
    }

    /// `d_n = c_n / L_n`
    pub fn block_density(&self) -> BigRational {
        ratio(self.block_ones, self.block_len)
    }

    /// `delta_n = o_n / m_n`
    pub fn pillar_density(&self) -> BigRational {
        ratio(self.pillar_ones, self.pillar_len)
    }

    /// `lambda_n = m_n / L_n`
    pub fn lambda(&self) -> BigRational {
        ratio(self.pillar_len, self.block_len)
    }

    /// `L_n / L_{n-1}`
    pub fn ratio_prev(&self) -> Option<BigRational> {
        self.prev_block_len.map(|p| ratio(self.block_len, p))
    }

    /// `m_n = L_n - 2 c_n`, with the subtraction done in signed arithmetic so
    /// that fabricated rows with `2 c_n > L_n` simply fail.
    pub fn identity_holds(&self) -> bool {
        let twice_c = BigInt::from(self.block_ones) * 2;
        BigInt::from(self.block_len) - twice_c == BigInt::from(self.pillar_len)
    }
}

/// Verdict of the fundamental identity for one row.
pub fn check_identity(stats: &LevelStats) -> bool {
    stats.identity_holds()
}

/// Statistics for levels `1..=max_n`.
///
/// `o_{n+1}` is the sum of the even-indexed symbols of `P_n`. A single pass
/// over `P_{max_n - 1}` tallies every lower pillar as a side effect, so the
/// whole table costs one pillar stream.
pub fn compute_stats(max_n: usize, budget: &Budget) -> Result<Vec<LevelStats>> {
    if max_n == 0 {
        return Err(Error::InvalidLevel);
    }
    let mut rows = vec![LevelStats::initial()];
    if max_n == 1 {
        return Ok(rows);
    }
    let tallies = pillar_stream(max_n - 1)?.drain(budget.chunk_size, &budget.start())?;
    for tally in &tallies {
        let prev = rows.last().expect("nonempty");
        debug_assert_eq!(tally.len as u128, prev.pillar_len);
        debug_assert_eq!(tally.first_letter as u128, prev.pillar_ones);
        let next = prev.successor(tally.even_sum as u128)?;
        rows.push(next);
    }
    Ok(rows)
}

fn unit_interval(name: &'static str, x: &BigRational) -> Result<()> {
    if x.is_negative() || *x > BigRational::one() {
        return Err(Error::OutOfRange {
            name,
            value: x.to_string(),
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `d_{n+1} = (2 d_n + delta_n (1 - 2 d_n)) / (3 - 2 d_n)`
pub fn density_step(d: &BigRational, delta: &BigRational) -> Result<BigRational> {
    unit_interval("d", d)?;
    unit_interval("delta", delta)?;
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    let lambda = &one - &two * d;
    Ok((&two * d + delta * &lambda) / (three - &two * d))
}

/// `d_{n+1} - d_n = (delta_n - d_n)(1 - 2 d_n) / (3 - 2 d_n)`
pub fn density_difference(d: &BigRational, delta: &BigRational) -> Result<BigRational> {
    unit_interval("d", d)?;
    unit_interval("delta", delta)?;
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    Ok((delta - d) * (one - &two * d) / (three - two * d))
}

/// Decimal rendering of an exact rational, rounded half to even.
pub fn to_decimal(x: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = x.abs() * BigRational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let frac = scaled - BigRational::from_integer(floor.clone());
    let half = BigRational::new(1.into(), 2.into());
    let rounded = if frac > half || (frac == half && floor.is_odd()) {
        floor + 1
    } else {
        floor
    };
    let digits = rounded.to_string();
    let digits = if digits.len() <= places {
        format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int, dec) = digits.split_at(digits.len() - places);
    let sign = if x.is_negative() && !rounded_is_zero(int, dec) {
        "-"
    } else {
        ""
    };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{dec}")
    }
}

fn rounded_is_zero(int: &str, dec: &str) -> bool {
    int.chars().chain(dec.chars()).all(|c| c == '0')
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

const ROOT_ITERATIONS: usize = 200;

/// Real root of `x^3 - 2x^2 - 1` by Newton's method kept inside the bracket
/// `[2, 3]`, falling back to bisection when a step leaves it.
pub fn pisot_root(tolerance: f64) -> Result<f64> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::OutOfRange {
            name: "tolerance",
            value: tolerance.to_string(),
            range: "(0, inf)",
        });
    }
    let f = |x: f64| x * x * x - 2.0 * x * x - 1.0;
    let df = |x: f64| 3.0 * x * x - 4.0 * x;
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    let mut x = 2.2;
    for _ in 0..ROOT_ITERATIONS {
        let fx = f(x);
        if fx.abs() < tolerance {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let next = x - fx / df(x);
        x = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NoConvergence {
        iterations: ROOT_ITERATIONS,
    })
}

/// `M = [[3, -2], [d, 2 - 2d]]` over any numeric type.
pub fn limit_matrix<T>(d: T) -> [[T; 2]; 2]
where
    T: Num + Clone + std::ops::Neg<Output = T>,
{
    let two = T::one() + T::one();
    let three = two.clone() + T::one();
    [[three, -two.clone()], [d.clone(), two.clone() - two * d]]
}

/// Coefficients `[1, -trace, det]` of `det(M - x I)`.
pub fn characteristic_polynomial<T>(m: &[[T; 2]; 2]) -> [T; 3]
where
    T: Num + Clone + std::ops::Neg<Output = T>,
{
    let trace = m[0][0].clone() + m[1][1].clone();
    let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
    [T::one(), -trace, det]
}

/// Limit matrix, its characteristic polynomial and its eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub d: f64,
    pub matrix: [[f64; 2]; 2],
    pub char_poly: [f64; 3],
    /// Descending.
    pub eigenvalues: [f64; 2],
}

pub fn limit_matrix_spectrum(d: f64) -> Result<Spectrum> {
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::OutOfRange {
            name: "d",
            value: d.to_string(),
            range: "(0, 1/2)",
        });
    }
    let matrix = limit_matrix(d);
    let char_poly = characteristic_polynomial(&matrix);
    // For a 2x2 matrix the discriminant is (a - d)^2 + 4bc, which avoids the
    // cancellation in trace^2 - 4 det.
    let [[m00, m01], [m10, m11]] = matrix;
    let disc = ((m00 - m11).powi(2) + 4.0 * m01 * m10).max(0.0);
    let trace = -char_poly[1];
    let q = 0.5 * (trace + trace.signum() * disc.sqrt());
    let (r1, r2) = (q, char_poly[2] / q);
    let eigenvalues = if r1 >= r2 { [r1, r2] } else { [r2, r1] };
    Ok(Spectrum {
        d,
        matrix,
        char_poly,
        eigenvalues,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralConstants {
    pub alpha: f64,
    /// `(3 - alpha) / 2`
    pub d_limit: f64,
    /// `|alpha^3 - 2 alpha^2 - 1|`
    pub residual: f64,
    pub spectrum: Spectrum,
}

pub fn spectral_constants(tolerance: f64) -> Result<SpectralConstants> {
    let alpha = pisot_root(tolerance)?;
    let d_limit = (3.0 - alpha) / 2.0;
    Ok(SpectralConstants {
        alpha,
        d_limit,
        residual: (alpha * alpha * alpha - 2.0 * alpha * alpha - 1.0).abs(),
        spectrum: limit_matrix_spectrum(d_limit)?,
    })
}

/// One level of [`growth_diagnostics`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    /// `L_n / L_{n-1}`
    pub block_ratio: Option<f64>,
    /// `m_n / m_{n-1}`
    pub pillar_ratio: Option<f64>,
    /// `|L_n / L_{n-1} - alpha|`
    pub deviation: Option<f64>,
    /// `11 * 2^(n-1)`
    pub lower_bound: u128,
    pub bound_holds: bool,
    /// `3 - 2 delta_n`
    pub pillar_factor: f64,
    /// `None` before the first level with `delta_n < 1/2`.
    pub factor_exceeds_two: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub alpha: f64,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    pub fn bounds_hold(&self) -> bool {
        self.rows.iter().all(|r| r.bound_holds)
    }

    pub fn factors_hold(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.factor_exceeds_two != Some(false))
    }
}

pub fn growth_diagnostics(stats: &[LevelStats], alpha: f64) -> Result<GrowthReport> {
    if stats.len() < 3 {
        return Err(Error::OutOfRange {
            name: "rows",
            value: stats.len().to_string(),
            range: "at least 3",
        });
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut factor_active = false;
    let mut rows = Vec::with_capacity(stats.len());
    for (i, s) in stats.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| &stats[j]);
        let block_ratio = s.ratio_prev().map(|r| to_f64(&r));
        let pillar_ratio = prev.map(|p| s.pillar_len as f64 / p.pillar_len as f64);
        let lower_bound = 1u128
            .checked_shl((s.n - 1) as u32)
            .and_then(|p| p.checked_mul(11))
            .ok_or(Error::Overflow { level: s.n })?;
        let delta = s.pillar_density();
        factor_active |= delta < half;
        let pillar_factor = 3.0 - 2.0 * to_f64(&delta);
        // 3 - 2 delta > 2 exactly when delta < 1/2; decide it on the rational.
        let factor_exceeds_two = factor_active.then(|| delta < half);
        rows.push(GrowthRow {
            n: s.n,
            block_ratio,
            pillar_ratio,
            deviation: block_ratio.map(|r| (r - alpha).abs()),
            lower_bound,
            bound_holds: s.block_len >= lower_bound,
            pillar_factor,
            factor_exceeds_two,
        });
    }
    Ok(GrowthReport { alpha, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn first_rows() {
        let rows = compute_stats(6, &Budget::default()).unwrap();
        let got: Vec<_> = rows
            .iter()
            .map(|r| (r.block_len, r.block_ones, r.pillar_len, r.pillar_ones))
            .collect();
        assert_eq!(
            got,
            vec![
                (11, 5, 1, 0),
                (23, 10, 3, 0),
                (49, 20, 9, 3),
                (107, 43, 21, 8),
                (235, 94, 47, 18),
                (517, 206, 105, 41),
            ]
        );
        assert_eq!(compute_stats(1, &Budget::default()).unwrap().len(), 1);
        assert!(compute_stats(0, &Budget::default()).is_err());
    }

    #[test]
    fn identity_cases() {
        let rows = compute_stats(6, &Budget::default()).unwrap();
        assert!(check_identity(&rows[0]));
        assert!(check_identity(&rows[5]));
        let fabricated = LevelStats {
            n: 1,
            block_len: 10,
            pillar_len: 1,
            block_ones: 5,
            pillar_ones: 0,
            prev_block_len: None,
        };
        assert!(!check_identity(&fabricated));
    }

    #[test]
    fn successor_reports_overflow_level() {
        let huge = LevelStats {
            n: 90,
            block_len: u128::MAX / 2 + 1,
            pillar_len: 1,
            block_ones: 0,
            pillar_ones: 0,
            prev_block_len: None,
        };
        assert_eq!(huge.successor(0), Err(Error::Overflow { level: 91 }));
    }

    #[test]
    fn density_step_examples() {
        assert_eq!(density_step(&q(5, 11), &q(0, 1)).unwrap(), q(10, 23));
        assert_eq!(density_step(&q(20, 49), &q(3, 9)).unwrap(), q(43, 107));
        let d = q(2, 5);
        assert_eq!(density_step(&d, &d).unwrap(), d);
        assert!(density_step(&q(-1, 2), &q(0, 1)).is_err());
        assert!(density_step(&q(1, 2), &q(3, 2)).is_err());
    }

    #[test]
    fn density_difference_examples() {
        assert_eq!(density_difference(&q(5, 11), &q(0, 1)).unwrap(), q(-5, 253));
        assert_eq!(
            density_difference(&q(20, 49), &q(1, 3)).unwrap(),
            q(43, 107) - q(20, 49)
        );
        let d = q(7, 19);
        assert!(density_difference(&d, &d).unwrap().is_zero());
    }

    #[test]
    fn decimal_rounding_is_half_even() {
        assert_eq!(to_decimal(&q(5, 11), 6), "0.454545");
        assert_eq!(to_decimal(&q(206, 517), 6), "0.398453");
        assert_eq!(to_decimal(&q(2, 5), 6), "0.400000");
        assert_eq!(to_decimal(&q(1, 8), 2), "0.12");
        assert_eq!(to_decimal(&q(3, 8), 2), "0.38");
        assert_eq!(to_decimal(&q(-5, 253), 6), "-0.019763");
        assert_eq!(to_decimal(&q(-1, 10_000_000), 6), "0.000000");
        assert_eq!(to_decimal(&q(517, 235), 0), "2");
    }

    #[test]
    fn pisot_root_values() {
        let alpha = pisot_root(1e-12).unwrap();
        assert_eq!(format!("{alpha:.5}"), "2.20557");
        assert!((alpha.powi(3) - 2.0 * alpha.powi(2) - 1.0).abs() < 1e-12);
        assert_eq!(format!("{:.6}", (3.0 - alpha) / 2.0), "0.397215");
        assert!(pisot_root(0.0).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let s = limit_matrix_spectrum(0.4).unwrap();
        assert!((s.char_poly[1] + 4.2).abs() < 1e-12);
        assert!((s.char_poly[2] - 4.4).abs() < 1e-12);
        assert!(s.eigenvalues[0] > s.eigenvalues[1]);
        // Vieta
        assert!((s.eigenvalues[0] + s.eigenvalues[1] - 4.2).abs() < 1e-12);
        assert!((s.eigenvalues[0] * s.eigenvalues[1] - 4.4).abs() < 1e-12);
        assert!(limit_matrix_spectrum(0.5).is_err());
        assert!(limit_matrix_spectrum(0.0).is_err());
    }

    #[test]
    fn exact_characteristic_polynomial() {
        for d in [q(2, 5), q(1, 3), q(397, 1000)] {
            let p = characteristic_polynomial(&limit_matrix(d.clone()));
            let two = q(2, 1);
            assert_eq!(p[1], -(q(5, 1) - &two * &d));
            assert_eq!(p[2], q(6, 1) - q(4, 1) * &d);
        }
    }

    #[test]
    fn growth_examples() {
        let rows = compute_stats(6, &Budget::default()).unwrap();
        let alpha = pisot_root(1e-12).unwrap();
        let g = growth_diagnostics(&rows, alpha).unwrap();
        let ratios: Vec<String> = g.rows[1..]
            .iter()
            .map(|r| format!("{:.4}", r.block_ratio.unwrap()))
            .collect();
        assert_eq!(ratios, ["2.0909", "2.1304", "2.1837", "2.1963", "2.2000"]);
        assert_eq!(g.rows[5].lower_bound, 352);
        assert!(g.bounds_hold());
        assert!(g.factors_hold());
        assert!(growth_diagnostics(&rows[..2], alpha).is_err());
    }
}
