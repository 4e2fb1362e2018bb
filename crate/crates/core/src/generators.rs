//! Generating functions for the partition statistics and their exhaustive
//! enumeration oracles.
//!
//! Six statistics are supported:
//!
//! - `P`: p(n), partitions of n.
//! - `PBar`: pbar(n), overpartitions of n (first occurrence of each distinct
//!   part may be overlined).
//! - `Spt`: spt(n), total multiplicity of the smallest part over all
//!   partitions of n. spt(5) = 14.
//! - `SptBar1`: sptbar1(n), smallest-part count over overpartitions of n with
//!   odd smallest part. sptbar1(4) = 20.
//! - `M2Spt`: m2spt(n), smallest-part count over partitions of n with no
//!   repeated odd part and even smallest part. m2spt(7) = 3.
//! - `POdd`: podd(n), partitions of n with no repeated odd part. podd(7) = 7.
//!
//! Each series is built from its Lambert-series formula with the bilateral
//! sums folded to n >= 1 (substituting n -> -n and clearing the negative
//! exponents with (1 - q^-n) = -q^-n (1 - q^n)), then multiplied by the
//! relevant Euler product. Products and quotients of Euler factors are
//! evaluated by long division against pentagonal-number polynomials, so a
//! series to N terms costs O(N^(3/2)) big-integer additions.
//!
//! The oracles generate partitions explicitly (no recurrences, no dynamic
//! programming) so they stay independent of the series pipeline they check.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::series::{QSeries, Rational, UNIT};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("oracle argument {n} exceeds the enumeration ceiling {ceiling}")]
    OracleCeilingExceeded { n: i64, ceiling: i64 },
}

/// Default cap for exhaustive enumeration; partitions of 60 are about 10^6.
pub const DEFAULT_ORACLE_CEILING: i64 = 60;

/// The six partition statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StatKind {
    P,
    PBar,
    Spt,
    SptBar1,
    M2Spt,
    POdd,
}

impl StatKind {
    pub const ALL: [StatKind; 6] = [
        StatKind::P,
        StatKind::PBar,
        StatKind::Spt,
        StatKind::SptBar1,
        StatKind::M2Spt,
        StatKind::POdd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StatKind::P => "p",
            StatKind::PBar => "pbar",
            StatKind::Spt => "spt",
            StatKind::SptBar1 => "sptbar1",
            StatKind::M2Spt => "m2spt",
            StatKind::POdd => "podd",
        }
    }

    pub fn parse(s: &str) -> Option<StatKind> {
        StatKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// A statistic series together with the range its enumeration oracle covered.
#[derive(Clone, Debug)]
pub struct PartitionStatistic {
    pub kind: StatKind,
    pub series: QSeries,
    pub oracle_range: i64,
}

/// Build the generating function of a statistic with every coefficient
/// stat(0), ..., stat(n_max) exact, and validate coefficients 1..=oracle_range
/// against the enumeration oracle.
pub fn validated_statistic(
    kind: StatKind,
    n_max: i64,
    oracle_range: i64,
) -> Result<PartitionStatistic, GeneratorError> {
    let series = statistic_series(kind, n_max);
    for n in 1..=oracle_range.min(n_max) {
        let expect = enumerate_oracle(kind, n, oracle_range)?;
        assert_eq!(
            series.coeff_q(n),
            Rational::from_integer(BigInt::from(expect)),
            "{} series disagrees with enumeration at n = {n}",
            kind.name()
        );
    }
    Ok(PartitionStatistic {
        kind,
        series,
        oracle_range: oracle_range.min(n_max),
    })
}

/// Generating function sum stat(n) q^n with coefficients exact for n <= n_max.
pub fn statistic_series(kind: StatKind, n_max: i64) -> QSeries {
    let len = (n_max + 1) as usize;
    let dense = match kind {
        StatKind::P => partition_vec(len),
        StatKind::PBar => overpartition_vec(len),
        StatKind::Spt => spt_vec(len),
        StatKind::SptBar1 => sptbar1_vec(len),
        StatKind::M2Spt => m2spt_vec(len),
        StatKind::POdd => podd_vec(len),
    };
    QSeries::from_terms(
        dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (n as i64 * UNIT, Rational::from_integer(c))),
        (n_max + 1) * UNIT,
    )
}

pub fn partition_series(n_max: i64) -> QSeries {
    statistic_series(StatKind::P, n_max)
}

pub fn spt_series(n_max: i64) -> QSeries {
    statistic_series(StatKind::Spt, n_max)
}

pub fn overpartition_series(n_max: i64) -> QSeries {
    statistic_series(StatKind::PBar, n_max)
}

pub fn sptbar1_series(n_max: i64) -> QSeries {
    statistic_series(StatKind::SptBar1, n_max)
}

pub fn m2spt_series(n_max: i64) -> QSeries {
    statistic_series(StatKind::M2Spt, n_max)
}

pub fn podd_series(n_max: i64) -> QSeries {
    statistic_series(StatKind::POdd, n_max)
}

// ---------------------------------------------------------------------------
// Dense integer engine.
//
// Series are Vec<BigInt> indexed by q-exponent. The only multiplications and
// divisions performed are against Euler products prod (1 - q^(t n)), whose
// truncations are pentagonal-number polynomials with O(sqrt(N)) terms of
// coefficient +-1.
// ---------------------------------------------------------------------------

/// Nonzero terms (exponent, sign) of prod_(n>=1) (1 - q^(t n)) below `len`,
/// by the pentagonal number theorem. Includes the constant term (0, +1).
fn pentagonal_terms(t: usize, len: usize) -> Vec<(usize, i64)> {
    let mut terms = vec![(0usize, 1i64)];
    let mut j = 1usize;
    loop {
        let g1 = t * (j * (3 * j - 1) / 2);
        if g1 >= len {
            break;
        }
        let sign = if j % 2 == 1 { -1 } else { 1 };
        terms.push((g1, sign));
        let g2 = t * (j * (3 * j + 1) / 2);
        if g2 < len {
            terms.push((g2, sign));
        }
        j += 1;
    }
    terms.sort_unstable();
    terms
}

/// Multiply a dense series by a sparse +-1 polynomial.
fn mul_sparse(a: &[BigInt], sparse: &[(usize, i64)]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len()];
    for &(e, s) in sparse {
        for (i, c) in a.iter().enumerate() {
            let k = i + e;
            if k >= out.len() {
                break;
            }
            if c.is_zero() {
                continue;
            }
            if s > 0 {
                out[k] += c;
            } else {
                out[k] -= c;
            }
        }
    }
    out
}

/// In-place long division by a sparse +-1 polynomial with constant term 1:
/// on return, a holds the quotient a / sparse to the full length.
fn div_sparse_inplace(a: &mut [BigInt], sparse: &[(usize, i64)]) {
    debug_assert_eq!(sparse[0], (0, 1));
    for i in 0..a.len() {
        for &(e, s) in &sparse[1..] {
            if e > i {
                break;
            }
            let (head, tail) = a.split_at_mut(i);
            let prev = &head[i - e];
            if prev.is_zero() {
                continue;
            }
            if s > 0 {
                tail[0] -= prev;
            } else {
                tail[0] += prev;
            }
        }
    }
}

fn unit_vec(len: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); len];
    v[0] = BigInt::one();
    v
}

fn from_i64(v: Vec<i64>) -> Vec<BigInt> {
    v.into_iter().map(BigInt::from).collect()
}

/// p(n): invert the Euler product.
fn partition_vec(len: usize) -> Vec<BigInt> {
    let mut v = unit_vec(len);
    div_sparse_inplace(&mut v, &pentagonal_terms(1, len));
    v
}

/// pbar(n): prod (1 + q^n)/(1 - q^n) = E(q^2) / E(q)^2 with E the Euler
/// product.
fn overpartition_vec(len: usize) -> Vec<BigInt> {
    let mut v = unit_vec(len);
    v = mul_sparse(&v, &pentagonal_terms(2, len));
    let e1 = pentagonal_terms(1, len);
    div_sparse_inplace(&mut v, &e1);
    div_sparse_inplace(&mut v, &e1);
    v
}

/// podd(n): prod (1 + q^(2n-1))/(1 - q^(2n)) = E(q^2) / (E(q) E(q^4)).
fn podd_vec(len: usize) -> Vec<BigInt> {
    let mut v = unit_vec(len);
    v = mul_sparse(&v, &pentagonal_terms(2, len));
    div_sparse_inplace(&mut v, &pentagonal_terms(1, len));
    div_sparse_inplace(&mut v, &pentagonal_terms(4, len));
    v
}

/// The spt Lambert kernel
/// sum n q^n/(1-q^n) + sum_(n>=1) (-1)^n (q^(n(3n+1)/2) + q^(n(3n+3)/2)) / (1-q^n)^2,
/// the second sum being the n -> -n fold of the bilateral sum, with
/// 1/(1-q^n)^2 = sum_(k>=1) k q^(n(k-1)).
pub(crate) fn spt_kernel(len: usize) -> Vec<i64> {
    let mut kernel = vec![0i64; len];
    // sum sigma_1(e) q^e
    for n in 1..len {
        let mut e = n;
        while e < len {
            kernel[e] += n as i64;
            e += n;
        }
    }
    // folded bilateral sum
    let mut n = 1usize;
    while n * (3 * n + 1) / 2 < len {
        let sign: i64 = if n % 2 == 1 { -1 } else { 1 };
        for base in [n * (3 * n + 1) / 2, n * (3 * n + 3) / 2] {
            let mut k = 1i64;
            let mut e = base;
            while e < len {
                kernel[e] += sign * k;
                k += 1;
                e += n;
            }
        }
        n += 1;
    }
    kernel
}

/// spt(n): p-product times the spt Lambert kernel.
fn spt_vec(len: usize) -> Vec<BigInt> {
    let mut v = from_i64(spt_kernel(len));
    div_sparse_inplace(&mut v, &pentagonal_terms(1, len));
    v
}

/// The sptbar1 Lambert kernel
/// sum 2n q^n/(1-q^(2n)) + folded bilateral sum of
/// 4 (-1)^n q^(n^2+n) (1 + q^(2n) + q^(3n)) / ((1-q^(2n))(1-q^(4n))).
///
/// Folding n -> -n turns the exponent offsets (n, 3n, 4n) beyond q^(n^2) into
/// (2n, 3n, 5n), so the combined sum runs over offsets n, 2n, 3n (twice), 4n,
/// 5n, with 1/((1-q^(2n))(1-q^(4n))) = sum_(m>=0) (floor(m/2)+1) q^(2nm).
pub(crate) fn sptbar1_kernel(len: usize) -> Vec<i64> {
    let mut kernel = vec![0i64; len];
    for n in 1..len {
        // 2n q^n / (1 - q^(2n)): exponents n(2k+1)
        let mut e = n;
        while e < len {
            kernel[e] += 2 * n as i64;
            e += 2 * n;
        }
    }
    let mut n = 1usize;
    while n * n + n < len {
        let sign: i64 = if n % 2 == 1 { -1 } else { 1 };
        for (off, mult) in [(n, 1i64), (2 * n, 1), (3 * n, 2), (4 * n, 1), (5 * n, 1)] {
            let base = n * n + off;
            if base >= len {
                continue;
            }
            let mut m = 0usize;
            let mut e = base;
            while e < len {
                let weight = (m / 2 + 1) as i64;
                kernel[e] += 4 * sign * mult * weight;
                m += 1;
                e += 2 * n;
            }
        }
        n += 1;
    }
    kernel
}

/// sptbar1(n): pbar-product times the sptbar1 Lambert kernel.
fn sptbar1_vec(len: usize) -> Vec<BigInt> {
    let mut v = from_i64(sptbar1_kernel(len));
    v = mul_sparse(&v, &pentagonal_terms(2, len));
    let e1 = pentagonal_terms(1, len);
    div_sparse_inplace(&mut v, &e1);
    div_sparse_inplace(&mut v, &e1);
    v
}

/// m2spt(n): podd-product times
/// sum n q^(2n)/(1-q^(2n)) + folded bilateral sum of
/// (-1)^n q^(2n^2+n) / (1-q^(2n))^2. The n -> -n fold contributes the same
/// terms with exponent base 2n^2+3n.
fn m2spt_vec(len: usize) -> Vec<BigInt> {
    let mut kernel = vec![0i64; len];
    for n in 1..len {
        let mut e = 2 * n;
        while e < len {
            kernel[e] += n as i64;
            e += 2 * n;
        }
        if 2 * n >= len {
            break;
        }
    }
    let mut n = 1usize;
    while 2 * n * n + n < len {
        let sign: i64 = if n % 2 == 1 { -1 } else { 1 };
        for base in [2 * n * n + n, 2 * n * n + 3 * n] {
            if base >= len {
                continue;
            }
            let mut k = 1i64;
            let mut e = base;
            while e < len {
                kernel[e] += sign * k;
                k += 1;
                e += 2 * n;
            }
        }
        n += 1;
    }
    let mut v = from_i64(kernel);
    v = mul_sparse(&v, &pentagonal_terms(2, len));
    div_sparse_inplace(&mut v, &pentagonal_terms(1, len));
    div_sparse_inplace(&mut v, &pentagonal_terms(4, len));
    v
}

// ---------------------------------------------------------------------------
// Enumeration oracles.
// ---------------------------------------------------------------------------

/// Count `stat(n)` by exhaustively generating partitions (with weights for
/// the overpartition statistics). Errors above the enumeration ceiling.
pub fn enumerate_oracle(kind: StatKind, n: i64, ceiling: i64) -> Result<u128, GeneratorError> {
    if n > ceiling {
        return Err(GeneratorError::OracleCeilingExceeded { n, ceiling });
    }
    if n < 0 {
        return Ok(0);
    }
    if n == 0 {
        // Only the empty partition: it has no smallest part.
        return Ok(match kind {
            StatKind::P | StatKind::PBar | StatKind::POdd => 1,
            _ => 0,
        });
    }
    let n = n as usize;
    Ok(match kind {
        StatKind::P => completions(n, 1, false).0,
        StatKind::POdd => completions(n, 1, true).0,
        StatKind::PBar => completions(n, 1, false).1,
        StatKind::Spt => {
            let mut total = 0u128;
            for s in 1..=n {
                for k in 1..=n / s {
                    total += k as u128 * completions(n - s * k, s + 1, false).0;
                }
            }
            total
        }
        StatKind::SptBar1 => {
            // Smallest part s odd with multiplicity k; the factor 2 is the
            // overline choice on s itself, and completions' weighted count
            // covers the larger parts.
            let mut total = 0u128;
            for s in (1..=n).step_by(2) {
                for k in 1..=n / s {
                    total += 2 * k as u128 * completions(n - s * k, s + 1, false).1;
                }
            }
            total
        }
        StatKind::M2Spt => {
            let mut total = 0u128;
            for s in (2..=n).step_by(2) {
                for k in 1..=n / s {
                    total += k as u128 * completions(n - s * k, s + 1, true).0;
                }
            }
            total
        }
    })
}

/// Exhaustively generate partitions of `rem` into parts >= `min_part`,
/// returning (count, sum over partitions of 2^(number of distinct parts)).
/// With `distinct_odd` set, odd parts may not repeat.
fn completions(rem: usize, min_part: usize, distinct_odd: bool) -> (u128, u128) {
    if rem == 0 {
        return (1, 1);
    }
    let mut count = 0u128;
    let mut weighted = 0u128;
    for p in min_part..=rem {
        let kmax = if distinct_odd && p % 2 == 1 { 1 } else { rem / p };
        for k in 1..=kmax {
            if p * k > rem {
                break;
            }
            let (c, w) = completions(rem - p * k, p + 1, distinct_odd);
            count += c;
            weighted += 2 * w;
        }
    }
    (count, weighted)
}
