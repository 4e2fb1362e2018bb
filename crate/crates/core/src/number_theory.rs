//! Scalar number-theoretic primitives: the full Kronecker symbol, l-adic
//! valuations, the progression constant delta(l, m), Hurwitz class numbers by
//! brute-force enumeration of reduced binary quadratic forms, Sturm bounds,
//! and divisor sums.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::series::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumberTheoryError {
    #[error("l-adic valuation of zero is undefined")]
    ZeroInput,
    #[error("Sturm bound requires an integral weight; got doubled weight {0}")]
    HalfIntegralWeightUnsupported(u64),
}

/// A real quadratic character n -> (d/n) given by the Kronecker symbol with a
/// fixed top entry.
///
/// The spt family uses d = 3; the overpartition and distinct-odd-parts
/// families use the trivial character d = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharacterSpec {
    pub top: i64,
}

impl CharacterSpec {
    pub fn new(top: i64) -> Self {
        CharacterSpec { top }
    }

    pub fn trivial() -> Self {
        CharacterSpec { top: 1 }
    }

    pub fn is_trivial(&self) -> bool {
        self.top == 1
    }

    /// chi(n) = (top/n).
    pub fn eval(&self, n: i64) -> i64 {
        kronecker(self.top, n)
    }
}

/// The Kronecker symbol (a/n), extended to all integer pairs.
///
/// Completely multiplicative in both arguments, with (a/2) = 0, 1, -1 for
/// a even, a = +-1 mod 8, a = +-3 mod 8, (a/-1) = sign(a), and (a/0) nonzero
/// only for a = +-1.
pub fn kronecker(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i64;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        n >>= twos;
        // a is odd here; (a/2) depends on a mod 8.
        let a8 = a.rem_euclid(8);
        if twos % 2 == 1 && (a8 == 3 || a8 == 5) {
            result = -result;
        }
    }
    if n == 1 {
        return result;
    }
    // Jacobi symbol for odd n > 1. (a/n) depends only on a mod n.
    a = a.rem_euclid(n);
    while a != 0 {
        let twos = a.trailing_zeros();
        if twos > 0 {
            a >>= twos;
            let n8 = n % 8;
            if twos % 2 == 1 && (n8 == 3 || n8 == 5) {
                result = -result;
            }
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// v_l(x) = v_l(numerator) - v_l(denominator) for a nonzero rational.
pub fn ell_adic_valuation(x: &Rational, ell: u64) -> Result<i64, NumberTheoryError> {
    if x.is_zero() {
        return Err(NumberTheoryError::ZeroInput);
    }
    Ok(int_valuation(x.numer(), ell) - int_valuation(x.denom(), ell))
}

fn int_valuation(x: &BigInt, ell: u64) -> i64 {
    let ell = BigInt::from(ell);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&ell);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// The least positive integer d with 24*d = 1 mod l^m, for gcd(24, l) = 1.
///
/// This constant converts exponent progressions on the q^(24n-1) lattice into
/// partition-argument progressions: delta(5,1) = 4 and delta(7,1) = 5 recover
/// the classical spt(5n+4) and spt(7n+5) congruence arguments.
pub fn delta(ell: u64, m: u32) -> u64 {
    assert!(ell >= 5 && ell % 2 == 1 && ell % 3 != 0, "need gcd(24, ell) = 1");
    let modulus = ell.pow(m);
    mod_inverse(24 % modulus, modulus)
}

fn mod_inverse(a: u64, modulus: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(modulus));
    assert!(e.gcd == BigInt::from(1u8), "argument not invertible");
    let m = BigInt::from(modulus);
    let r = e.x.mod_floor(&m);
    u64::try_from(r).expect("residue fits u64")
}

/// Hurwitz class number H(n) for n >= 0.
///
/// H(0) = -1/12 (the constant term of the weight 3/2 Eisenstein series of
/// Zagier), H(n) = 0 for n = 1, 2 mod 4, and otherwise H(n) is the number of
/// classes of positive definite binary quadratic forms of discriminant -n,
/// counting forms equivalent to a(x^2 + y^2) with weight 1/2 and forms
/// equivalent to a(x^2 + xy + y^2) with weight 1/3.
///
/// Computed by direct enumeration of reduced forms (a, b, c) with
/// -a < b <= a <= c and b >= 0 when a = c. Deliberately kept free of class
/// number formulas so it can serve as an independent oracle.
pub fn hurwitz_class_number(n: u64) -> Rational {
    if n == 0 {
        return Rational::new(BigInt::from(-1), BigInt::from(12));
    }
    match n % 4 {
        1 | 2 => return Rational::zero(),
        _ => {}
    }
    // Weight is accumulated in sixths: 6 for a generic class, 3 for the
    // square class a(x^2+y^2), 2 for the hexagonal class a(x^2+xy+y^2).
    let mut sixths = 0u64;
    let mut a = 1u64;
    while 3 * a * a <= n {
        let foura = 4 * a;
        let mut b = -(a as i64) + 1;
        while b <= a as i64 {
            let num = (b * b) as u64 + n;
            if num % foura == 0 {
                let c = num / foura;
                if c >= a && !(a == c && b < 0) {
                    sixths += if b == 0 && a == c {
                        3
                    } else if b == a as i64 && a == c {
                        2
                    } else {
                        6
                    };
                }
            }
            b += 1;
        }
        a += 1;
    }
    Rational::new(BigInt::from(sixths), BigInt::from(6))
}

/// Sturm bound floor(k * mu / 12) for integral weight k on Gamma_0(level),
/// where mu = level * prod_(p | level) (1 + 1/p) is the index of
/// Gamma_0(level) in SL_2(Z). The weight is passed doubled so callers working
/// with half-integral data fail loudly rather than silently rounding.
pub fn sturm_bound(weight_times_2: u64, level: u64) -> Result<u64, NumberTheoryError> {
    if weight_times_2 % 2 != 0 {
        return Err(NumberTheoryError::HalfIntegralWeightUnsupported(weight_times_2));
    }
    let k = weight_times_2 / 2;
    Ok(k * gamma0_index(level) / 12)
}

/// Index of Gamma_0(level) in SL_2(Z).
pub fn gamma0_index(level: u64) -> u64 {
    assert!(level >= 1);
    let mut mu = level;
    let mut rem = level;
    let mut p = 2;
    while p * p <= rem {
        if rem % p == 0 {
            mu = mu / p * (p + 1);
            while rem % p == 0 {
                rem /= p;
            }
        }
        p += 1;
    }
    if rem > 1 {
        mu = mu / rem * (rem + 1);
    }
    mu
}

/// Sum of the positive divisors of n.
pub fn sigma1(n: u64) -> u64 {
    assert!(n >= 1);
    let mut total = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            total += d;
            let q = n / d;
            if q != d {
                total += q;
            }
        }
        d += 1;
    }
    total
}

/// Sum of the odd positive divisors of n.
pub fn sigma1_odd(n: u64) -> u64 {
    let mut n = n;
    while n % 2 == 0 {
        n /= 2;
    }
    sigma1(n)
}
