//! Truncated Laurent q-series with exact rational coefficients.
//!
//! Every expansion in this crate lives on a single global exponent lattice of
//! step 1/24: a term c*q^x is stored under the integer index 24*x. Eta
//! quotients land on integer indices by construction (eta(d*tau) starts at
//! q^(d/24)), and series with integral q-exponents use indices divisible by
//! [`UNIT`].
//!
//! A series carries a precision index `prec`: coefficients at indices below
//! `prec` are exactly known (absent means zero), indices at or above `prec`
//! are unknown. Every operation computes the largest precision it can prove
//! for its result; optimistic precision is never reported. The principal part
//! is always finite, and zero coefficients are never stored, so structural
//! equality of equal-precision series is coefficientwise equality.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Lattice units per integral power of q.
pub const UNIT: i64 = 24;

/// Sentinel precision for series whose every coefficient is known (finite
/// linear combinations of monomials).
pub const PREC_EXACT: i64 = i64::MAX;

/// Exact rational scalar type used for all coefficients.
pub type Rational = BigRational;

/// Dense accumulation buffers larger than this fall back to map accumulation.
const DENSE_CAP: usize = 1 << 21;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    /// Inversion or division by a series with no nonzero coefficient.
    #[error("cannot invert or divide by a series with no nonzero coefficient")]
    ZeroLeadingCoefficient,
    /// An operation that needs integral q-exponents met index `0` (in 1/24
    /// units) not divisible by 24.
    #[error("lattice index {0} is not an integral power of q")]
    NonIntegralExponent(i64),
    /// A rescaling tau -> tau/t met a q-exponent not divisible by t.
    #[error("q-exponent {0} is not divisible by the rescaling factor")]
    IndivisibleExponent(i64),
    /// Modular reduction met a coefficient whose denominator the prime divides.
    #[error("coefficient at lattice index {index} has denominator divisible by {ell}")]
    DenominatorDivisibleByEll { index: i64, ell: u64 },
}

/// A truncated Laurent series sum c_i q^(i/24) + O(q^(prec/24)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: BTreeMap<i64, Rational>,
    prec: i64,
}

/// `p + d` where `p` may be the exact-precision sentinel.
fn padd(p: i64, d: i64) -> i64 {
    if p == PREC_EXACT || d == PREC_EXACT {
        PREC_EXACT
    } else {
        p + d
    }
}

/// Ceiling division on i64 (num-integer's trait would shadow the std method).
pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    let q = a.div_euclid(b);
    if a.rem_euclid(b) != 0 && b > 0 {
        q + 1
    } else {
        q
    }
}

fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl QSeries {
    /// The zero series known below the given lattice index.
    pub fn zero(prec: i64) -> Self {
        QSeries {
            coeffs: BTreeMap::new(),
            prec,
        }
    }

    /// The exactly-known zero series.
    pub fn exact_zero() -> Self {
        Self::zero(PREC_EXACT)
    }

    /// The multiplicative identity, exactly known.
    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// An exactly-known constant.
    pub fn constant(c: Rational) -> Self {
        Self::monomial_index(0, c)
    }

    /// The exactly-known monomial c*q^(index/24).
    pub fn monomial_index(index: i64, c: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(index, c);
        }
        QSeries {
            coeffs,
            prec: PREC_EXACT,
        }
    }

    /// The exactly-known monomial c*q^n for an integral exponent n.
    pub fn monomial_q(n: i64, c: Rational) -> Self {
        Self::monomial_index(n * UNIT, c)
    }

    /// Build a series from (lattice index, coefficient) terms. Zero
    /// coefficients and terms at or above `prec` are dropped.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Rational)>, prec: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for (idx, c) in terms {
            if idx < prec && !c.is_zero() {
                coeffs.insert(idx, c);
            }
        }
        QSeries { coeffs, prec }
    }

    /// Build a series on the integral lattice from (q-exponent, coefficient)
    /// terms, known below q-exponent `prec_q`.
    pub fn from_terms_q(terms: impl IntoIterator<Item = (i64, Rational)>, prec_q: i64) -> Self {
        Self::from_terms(
            terms.into_iter().map(|(n, c)| (n * UNIT, c)),
            padd(prec_q, 0).saturating_mul(UNIT),
        )
    }

    /// Precision lattice index: coefficients below it are exact.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Precision in whole q-exponents: q-exponent n is known iff n < prec_q().
    pub fn prec_q(&self) -> i64 {
        if self.prec == PREC_EXACT {
            PREC_EXACT
        } else {
            ceil_div(self.prec, UNIT)
        }
    }

    /// Smallest stored index, if any term is present.
    pub fn min_index(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Largest stored index, if any term is present.
    pub fn max_index(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Smallest index at which a nonzero coefficient could exist: the leading
    /// stored index, or `prec` for a series with no visible terms.
    fn eff_min(&self) -> i64 {
        self.min_index().unwrap_or(self.prec)
    }

    /// True if no coefficient is stored (zero to the known precision).
    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of stored (nonzero) terms.
    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Iterate stored terms in increasing index order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    /// Coefficient at a lattice index. Debug builds assert the index is below
    /// the precision bound; release builds return the stored value or zero.
    pub fn coeff_index(&self, index: i64) -> Rational {
        debug_assert!(
            index < self.prec,
            "coefficient query at index {index} beyond precision {}",
            self.prec
        );
        self.coeffs.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of q^n for integral n.
    pub fn coeff_q(&self, n: i64) -> Rational {
        self.coeff_index(n * UNIT)
    }

    /// Coefficient at a lattice index, or None if the index is not provably
    /// known.
    pub fn try_coeff_index(&self, index: i64) -> Option<Rational> {
        if index < self.prec {
            Some(self.coeffs.get(&index).cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    /// Restrict to indices below `prec` (never raises precision).
    pub fn truncate(&self, prec: i64) -> QSeries {
        let prec = prec.min(self.prec);
        QSeries {
            coeffs: self
                .coeffs
                .range(..prec)
                .map(|(&i, c)| (i, c.clone()))
                .collect(),
            prec,
        }
    }

    /// Leading (lowest-index) term.
    fn leading(&self) -> Option<(i64, &Rational)> {
        self.coeffs.iter().next().map(|(&i, c)| (i, c))
    }

    /// Gcd of the index differences within the support (0 for at most one term).
    fn lattice_gcd(&self) -> i64 {
        let mut it = self.coeffs.keys();
        let first = match it.next() {
            Some(&f) => f,
            None => return 0,
        };
        let mut g = 0i64;
        for &k in it {
            g = g.gcd(&(k - first));
        }
        g
    }

    /// Coefficientwise sum; precision is the minimum of the operands'.
    pub fn add(&self, other: &QSeries) -> QSeries {
        let prec = self.prec.min(other.prec);
        let mut coeffs = BTreeMap::new();
        for (&i, c) in self.coeffs.range(..prec) {
            coeffs.insert(i, c.clone());
        }
        for (&i, c) in other.coeffs.range(..prec) {
            match coeffs.entry(i) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
        QSeries { coeffs, prec }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|(&i, c)| (i, -c.clone())).collect(),
            prec: self.prec,
        }
    }

    /// Multiply every coefficient by a scalar.
    pub fn scale(&self, c: &Rational) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.prec);
        }
        QSeries {
            coeffs: self.coeffs.iter().map(|(&i, x)| (i, x * c)).collect(),
            prec: self.prec,
        }
    }

    pub fn scale_int(&self, c: i64) -> QSeries {
        self.scale(&rat_int(c))
    }

    /// Shift all exponents by delta lattice units (multiplication by
    /// q^(delta/24)).
    pub fn shifted(&self, delta: i64) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|(&i, c)| (i + delta, c.clone())).collect(),
            prec: padd(self.prec, delta),
        }
    }

    /// Precision of a product under the Cauchy-product truncation rule.
    fn mul_prec(&self, other: &QSeries) -> i64 {
        // A series that is exactly zero absorbs everything.
        if (self.prec == PREC_EXACT && self.coeffs.is_empty())
            || (other.prec == PREC_EXACT && other.coeffs.is_empty())
        {
            return PREC_EXACT;
        }
        padd(self.prec, other.eff_min()).min(padd(other.prec, self.eff_min()))
    }

    /// Cauchy product truncated to the provable precision
    /// min(a.prec + b.min, b.prec + a.min).
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let prec = self.mul_prec(other);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return QSeries::zero(prec);
        }
        let amin = self.min_index().unwrap();
        let amax = self.max_index().unwrap();
        let bmin = other.min_index().unwrap();
        let bmax = other.max_index().unwrap();
        let base = amin + bmin;
        let mut top = amax + bmax;
        if prec != PREC_EXACT {
            top = top.min(prec - 1);
        }
        if top < base {
            return QSeries::zero(prec);
        }
        let g = self.lattice_gcd().gcd(&other.lattice_gcd()).max(1);
        let len = ((top - base) / g + 1) as usize;

        let mut coeffs = BTreeMap::new();
        if len <= DENSE_CAP {
            let mut buf = vec![Rational::zero(); len];
            for (&i, a) in &self.coeffs {
                for (&j, b) in &other.coeffs {
                    let k = i + j;
                    if k > top {
                        break;
                    }
                    let slot = &mut buf[((k - base) / g) as usize];
                    *slot += a * b;
                }
            }
            for (off, c) in buf.into_iter().enumerate() {
                if !c.is_zero() {
                    coeffs.insert(base + off as i64 * g, c);
                }
            }
        } else {
            for (&i, a) in &self.coeffs {
                for (&j, b) in &other.coeffs {
                    let k = i + j;
                    if k > top {
                        break;
                    }
                    let entry = coeffs.entry(k).or_insert_with(Rational::zero);
                    *entry += a * b;
                }
            }
            coeffs.retain(|_, c| !c.is_zero());
        }
        QSeries { coeffs, prec }
    }

    /// Long division self / other, computed directly (not via `invert`) so
    /// division by a sparse series costs O(result terms * divisor terms).
    pub fn div(&self, other: &QSeries) -> Result<QSeries, SeriesError> {
        let (v, lead) = match other.leading() {
            Some((v, c)) => (v, c.clone()),
            None => return Err(SeriesError::ZeroLeadingCoefficient),
        };
        // Quotient precision matches mul(self, invert(other)):
        // invert(other) has min index -v and precision other.prec - 2v.
        let inv_prec = padd(other.prec, -2 * v);
        let prec = padd(self.prec, -v).min(padd(inv_prec, self.eff_min()));
        if self.coeffs.is_empty() {
            return Ok(QSeries::zero(prec));
        }
        if prec == PREC_EXACT && other.num_terms() > 1 {
            panic!("division by an exact multi-term series does not terminate; truncate first");
        }
        let amin = self.min_index().unwrap();
        let qmin = amin - v;
        if prec != PREC_EXACT && prec <= qmin {
            return Ok(QSeries::zero(prec));
        }
        let top = if prec == PREC_EXACT {
            // Single-term divisor: exact shift and scale.
            self.max_index().unwrap() - v
        } else {
            prec - 1
        };
        let g = self.lattice_gcd().gcd(&other.lattice_gcd()).max(1);
        let len = ((top - qmin) / g + 1) as usize;
        assert!(len <= DENSE_CAP * 8, "division result too large for dense buffer");

        // Divisor offsets above the leading term, on the shared lattice.
        let offsets: Vec<(i64, Rational)> = other
            .coeffs
            .iter()
            .skip(1)
            .map(|(&i, c)| (i - v, c.clone()))
            .collect();
        let lead_is_one = lead.is_one();

        let mut q = vec![Rational::zero(); len];
        for o in 0..len {
            let k = qmin + o as i64 * g;
            let mut acc = self
                .coeffs
                .get(&(k + v))
                .cloned()
                .unwrap_or_else(Rational::zero);
            for (off, bc) in &offsets {
                if *off > o as i64 * g {
                    break;
                }
                debug_assert_eq!(off % g, 0);
                let qq = &q[o - (*off / g) as usize];
                if !qq.is_zero() {
                    acc -= bc * qq;
                }
            }
            if !lead_is_one && !acc.is_zero() {
                acc /= &lead;
            }
            q[o] = acc;
        }

        let coeffs: BTreeMap<i64, Rational> = q
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(o, c)| (qmin + o as i64 * g, c))
            .collect();
        Ok(QSeries { coeffs, prec })
    }

    /// Multiplicative inverse to the provable precision. The leading index of
    /// the result is the negation of the leading index of self.
    pub fn invert(&self) -> Result<QSeries, SeriesError> {
        QSeries::one().div(self)
    }

    /// Integer power by repeated squaring; negative powers invert first.
    pub fn pow(&self, k: i64) -> Result<QSeries, SeriesError> {
        if k == 0 {
            return Ok(QSeries::one());
        }
        if k < 0 {
            return self.invert()?.pow(-k);
        }
        let mut base = self.clone();
        let mut acc: Option<QSeries> = None;
        let mut e = k as u64;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        Ok(acc.unwrap())
    }

    /// q d/dq: the term c*q^n maps to n*c*q^n. Requires integral q-exponents.
    pub fn q_derivative(&self) -> Result<QSeries, SeriesError> {
        let mut coeffs = BTreeMap::new();
        for (&i, c) in &self.coeffs {
            if i % UNIT != 0 {
                return Err(SeriesError::NonIntegralExponent(i));
            }
            let n = i / UNIT;
            if n != 0 {
                coeffs.insert(i, c * rat_int(n));
            }
        }
        Ok(QSeries {
            coeffs,
            prec: self.prec,
        })
    }

    /// Substitute tau -> t*tau: index n maps to t*n, precision scales by t.
    pub fn dilate(&self, t: i64) -> QSeries {
        assert!(t >= 1, "dilation factor must be positive");
        QSeries {
            coeffs: self.coeffs.iter().map(|(&i, c)| (i * t, c.clone())).collect(),
            prec: if self.prec == PREC_EXACT {
                PREC_EXACT
            } else {
                self.prec.saturating_mul(t)
            },
        }
    }

    /// Keep only terms whose integral q-exponent is congruent to r mod n.
    pub fn restrict_progression(&self, r: i64, n: i64) -> Result<QSeries, SeriesError> {
        assert!(n >= 1);
        let mut coeffs = BTreeMap::new();
        for (&i, c) in &self.coeffs {
            if i % UNIT != 0 {
                return Err(SeriesError::NonIntegralExponent(i));
            }
            if (i / UNIT).rem_euclid(n) == r.rem_euclid(n) {
                coeffs.insert(i, c.clone());
            }
        }
        Ok(QSeries {
            coeffs,
            prec: self.prec,
        })
    }

    /// Substitute tau -> tau/t on a series supported on q-exponents divisible
    /// by t: q^n maps to q^(n/t). Requires integral q-exponents.
    pub fn rescale_exponents(&self, t: i64) -> Result<QSeries, SeriesError> {
        assert!(t >= 1);
        let mut coeffs = BTreeMap::new();
        for (&i, c) in &self.coeffs {
            if i % UNIT != 0 {
                return Err(SeriesError::NonIntegralExponent(i));
            }
            let n = i / UNIT;
            if n % t != 0 {
                return Err(SeriesError::IndivisibleExponent(n));
            }
            coeffs.insert(n / t * UNIT, c.clone());
        }
        let prec = if self.prec == PREC_EXACT {
            PREC_EXACT
        } else {
            // Output q-exponent j is known iff j*t is below the input bound.
            ceil_div(self.prec_q(), t).saturating_mul(UNIT)
        };
        Ok(QSeries { coeffs, prec })
    }

    /// Reduce every coefficient to its canonical residue in [0, ell^m), using
    /// the inverse of the denominator mod ell^m. Errors if some denominator is
    /// divisible by ell.
    pub fn reduce_mod(&self, ell: u64, m: u32) -> Result<QSeries, SeriesError> {
        let modulus = BigInt::from(ell).pow(m);
        let mut coeffs = BTreeMap::new();
        for (&i, c) in &self.coeffs {
            let r = reduce_rational(c, &modulus)
                .ok_or(SeriesError::DenominatorDivisibleByEll { index: i, ell })?;
            if !r.is_zero() {
                coeffs.insert(i, Rational::from_integer(r));
            }
        }
        Ok(QSeries {
            coeffs,
            prec: self.prec,
        })
    }

    /// True if the two series have equal coefficients below the smaller
    /// precision.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        let p = self.prec.min(other.prec);
        let mut a = self.coeffs.range(..p);
        let mut b = other.coeffs.range(..p);
        loop {
            match (a.next(), b.next()) {
                (None, None) => return true,
                (Some((i, x)), Some((j, y))) => {
                    if i != j || x != y {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }

    /// First index below the shared precision where the two series differ.
    pub fn first_difference(&self, other: &QSeries) -> Option<i64> {
        let p = self.prec.min(other.prec);
        let mut keys: Vec<i64> = self.coeffs.range(..p).map(|(&i, _)| i).collect();
        keys.extend(other.coeffs.range(..p).map(|(&i, _)| i));
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().find(|&i| {
            self.coeffs.get(&i).cloned().unwrap_or_else(Rational::zero)
                != other.coeffs.get(&i).cloned().unwrap_or_else(Rational::zero)
        })
    }

    /// Serialize to the interchange JSON object
    /// `{"unit": 24, "precision": p, "terms": [[index, num, den], ...]}`
    /// with terms sorted by index. Round trips are bit-exact.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(&i, c)| {
                serde_json::Value::Array(vec![
                    serde_json::Value::Number(i.into()),
                    big_number(c.numer()),
                    big_number(c.denom()),
                ])
            })
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("unit".into(), serde_json::Value::Number(UNIT.into()));
        obj.insert("precision".into(), serde_json::Value::Number(self.prec.into()));
        obj.insert("terms".into(), serde_json::Value::Array(terms));
        serde_json::Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<QSeries, String> {
        let obj = v.as_object().ok_or("series JSON must be an object")?;
        let unit = obj
            .get("unit")
            .and_then(|u| u.as_i64())
            .ok_or("missing integer field: unit")?;
        if unit != UNIT {
            return Err(format!("unsupported exponent unit {unit}, expected {UNIT}"));
        }
        let prec = number_to_bigint(obj.get("precision").ok_or("missing field: precision")?)?
            .to_i64()
            .ok_or("precision out of range")?;
        let terms = obj
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or("missing array field: terms")?;
        let mut coeffs = BTreeMap::new();
        for t in terms {
            let triple = t.as_array().filter(|a| a.len() == 3).ok_or("term must be [index, num, den]")?;
            let idx = number_to_bigint(&triple[0])?
                .to_i64()
                .ok_or("term index out of range")?;
            let num = number_to_bigint(&triple[1])?;
            let den = number_to_bigint(&triple[2])?;
            if den.is_zero() || den.is_negative() {
                return Err("term denominator must be positive".into());
            }
            let c = Rational::new(num, den);
            if idx < prec && !c.is_zero() {
                coeffs.insert(idx, c);
            }
        }
        Ok(QSeries { coeffs, prec })
    }

    pub fn from_json_str(s: &str) -> Result<QSeries, String> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
        Self::from_json(&v)
    }

    /// Lossy CSV rendering: one `index,num/den` row per stored term.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("index,coefficient\n");
        for (&i, c) in &self.coeffs {
            out.push_str(&format!("{},{}/{}\n", i, c.numer(), c.denom()));
        }
        out
    }
}

/// Canonical residue of num/den mod `modulus` (positive), or None when the
/// denominator is not invertible.
pub(crate) fn reduce_rational(c: &Rational, modulus: &BigInt) -> Option<BigInt> {
    let den = c.denom().mod_floor(modulus);
    let e = den.extended_gcd(modulus);
    if !e.gcd.is_one() {
        return None;
    }
    let inv = e.x.mod_floor(modulus);
    Some((c.numer().mod_floor(modulus) * inv).mod_floor(modulus))
}

fn big_number(n: &BigInt) -> serde_json::Value {
    serde_json::Value::Number(
        serde_json::Number::from_str(&n.to_string()).expect("integer literal is a valid JSON number"),
    )
}

fn number_to_bigint(v: &serde_json::Value) -> Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => {
            BigInt::from_str(&n.to_string()).map_err(|_| format!("not an integer: {n}"))
        }
        _ => Err("expected a JSON number".into()),
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            for (k, (&i, c)) in self.coeffs.iter().enumerate() {
                let (sign, mag) = if c.is_negative() {
                    ("-", -c.clone())
                } else {
                    ("+", c.clone())
                };
                if k == 0 {
                    if sign == "-" {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {sign} ")?;
                }
                let g = i.gcd(&UNIT);
                let (num, den) = (i / g, UNIT / g);
                if i == 0 {
                    write!(f, "{mag}")?;
                } else {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if den == 1 {
                        write!(f, "q^{num}")?;
                    } else {
                        write!(f, "q^({num}/{den})")?;
                    }
                }
            }
        }
        if self.prec != PREC_EXACT {
            let g = self.prec.gcd(&UNIT);
            let (num, den) = (self.prec / g, UNIT / g);
            if den == 1 {
                write!(f, " + O(q^{num})")?;
            } else {
                write!(f, " + O(q^({num}/{den}))")?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl std::ops::Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl std::ops::Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl std::ops::Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly_q(terms: &[(i64, i64)], prec_q: i64) -> QSeries {
        QSeries::from_terms_q(terms.iter().map(|&(n, c)| (n, rat_int(c))), prec_q)
    }

    #[test]
    fn add_identity_and_cancellation() {
        let a = poly_q(&[(0, 1), (1, 1)], 10);
        let zero = QSeries::zero(10 * UNIT);
        assert!(a.add(&zero).agrees_with(&a));

        // q^-1 + (-q^-1 + q) leaves only q, with no stored zero at q^-1.
        let b = poly_q(&[(-1, 1)], 10);
        let c = poly_q(&[(-1, -1), (1, 1)], 10);
        let s = b.add(&c);
        assert_eq!(s.num_terms(), 1);
        assert_eq!(s.coeff_q(1), rat_int(1));
    }

    #[test]
    fn mul_inverse_pair_truncates_to_one() {
        // (1 - q) * (1 + q + q^2 + ...) = 1 to the available precision.
        let one_minus_q = poly_q(&[(0, 1), (1, -1)], 50);
        let geo = QSeries::from_terms_q((0..50).map(|n| (n, Rational::one())), 50);
        let prod = one_minus_q.mul(&geo);
        assert!(prod.agrees_with(&QSeries::one()));
        assert_eq!(prod.prec_q(), 50);
    }

    #[test]
    fn mul_precision_rule() {
        // a = q^2 + O(q^5), b = q^-1 + O(q^3): product precision is
        // min(5 + (-1), 3 + 2) = 4 in q-exponents.
        let a = poly_q(&[(2, 1)], 5);
        let b = poly_q(&[(-1, 1)], 3);
        let p = a.mul(&b);
        assert_eq!(p.prec_q(), 4);
        assert_eq!(p.coeff_q(1), Rational::one());
    }

    #[test]
    fn invert_geometric_series() {
        let one_minus_q = poly_q(&[(0, 1), (1, -1)], 30);
        let inv = one_minus_q.invert().unwrap();
        for n in 0..30 {
            assert_eq!(inv.coeff_q(n), Rational::one(), "coefficient of q^{n}");
        }
    }

    #[test]
    fn invert_shifted_unit() {
        // invert(q*(1+q)) = q^-1 * (1 - q + q^2 - ...), checked by long
        // division by hand.
        let f = poly_q(&[(1, 1), (2, 1)], 12);
        let inv = f.invert().unwrap();
        assert_eq!(inv.min_index(), Some(-UNIT));
        for n in -1..9 {
            let expect = if (n + 1) % 2 == 0 { 1 } else { -1 };
            assert_eq!(inv.coeff_q(n), rat_int(expect), "coefficient of q^{n}");
        }
        // precision drops by two leading units: 12 - 2*1 = 10
        assert_eq!(inv.prec_q(), 10);
    }

    #[test]
    fn invert_zero_is_an_error() {
        let z = QSeries::zero(5 * UNIT);
        assert_eq!(z.invert().unwrap_err(), SeriesError::ZeroLeadingCoefficient);
    }

    #[test]
    fn mul_then_div_round_trips() {
        let a = poly_q(&[(-2, 3), (0, 1), (3, -7)], 20);
        let b = poly_q(&[(0, 2), (1, 5), (4, 1)], 20);
        let q = a.mul(&b).div(&b).unwrap();
        assert!(q.agrees_with(&a));
    }

    #[test]
    fn pow_basics() {
        let any = poly_q(&[(0, 4), (2, -3)], 9);
        assert!(any.pow(0).unwrap().agrees_with(&QSeries::one()));

        let one_plus_q = poly_q(&[(0, 1), (1, 1)], 9);
        let sq = one_plus_q.pow(2).unwrap();
        assert_eq!(sq.coeff_q(0), rat_int(1));
        assert_eq!(sq.coeff_q(1), rat_int(2));
        assert_eq!(sq.coeff_q(2), rat_int(1));

        let neg = one_plus_q.pow(-2).unwrap();
        assert_eq!(neg.coeff_q(0), rat_int(1));
        assert_eq!(neg.coeff_q(1), rat_int(-2));
        assert_eq!(neg.coeff_q(2), rat_int(3));
    }

    #[test]
    fn q_derivative_drops_constants_and_checks_lattice() {
        let c = QSeries::constant(rat(7, 2));
        assert!(c.q_derivative().unwrap().is_zero_to_prec());

        let f = poly_q(&[(2, 3), (5, 1)], 10);
        let d = f.q_derivative().unwrap();
        assert_eq!(d.coeff_q(2), rat_int(6));
        assert_eq!(d.coeff_q(5), rat_int(5));

        let frac = QSeries::monomial_index(12, Rational::one());
        assert_eq!(
            frac.q_derivative().unwrap_err(),
            SeriesError::NonIntegralExponent(12)
        );
    }

    #[test]
    fn derivative_is_a_derivation() {
        let a = poly_q(&[(0, 2), (1, -1), (4, 5)], 12);
        let b = poly_q(&[(1, 3), (2, 7)], 12);
        let lhs = a.mul(&b).q_derivative().unwrap();
        let rhs = a.q_derivative().unwrap().mul(&b).add(&a.mul(&b.q_derivative().unwrap()));
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn dilate_and_rescale_invert_each_other() {
        let a = poly_q(&[(0, 1), (1, 5), (3, -2)], 7);
        let d = a.dilate(2);
        assert_eq!(d.coeff_q(2), rat_int(5));
        assert_eq!(d.prec_q(), 14);
        let back = d.rescale_exponents(2).unwrap();
        assert!(back.agrees_with(&a));
        assert_eq!(back.prec_q(), 7);
    }

    #[test]
    fn rescale_requires_divisible_exponents() {
        let a = poly_q(&[(0, 1), (3, 1)], 5);
        assert_eq!(
            a.rescale_exponents(2).unwrap_err(),
            SeriesError::IndivisibleExponent(3)
        );
        let ok = QSeries::monomial_q(24, Rational::one());
        assert_eq!(ok.rescale_exponents(24).unwrap().coeff_q(1), Rational::one());
    }

    #[test]
    fn restrict_progression_keeps_the_class() {
        let a = poly_q(&[(0, 1), (1, 1), (2, 1)], 5);
        let even = a.restrict_progression(0, 2).unwrap();
        assert_eq!(even.num_terms(), 2);
        assert_eq!(even.coeff_q(0), rat_int(1));
        assert_eq!(even.coeff_q(2), rat_int(1));
        assert!(even.coeff_q(1).is_zero());
    }

    #[test]
    fn reduce_mod_uses_denominator_inverse() {
        // 35/12 mod 5: 12^{-1} = 3 mod 5, 35*3 = 105 = 0 mod 5.
        let a = QSeries::from_terms_q([(1, rat(35, 12))], 10);
        let r = a.reduce_mod(5, 1).unwrap();
        assert!(r.is_zero_to_prec());

        let b = QSeries::from_terms_q([(0, rat(7, 3)), (2, rat_int(9))], 10);
        let r = b.reduce_mod(5, 2).unwrap();
        // 3^{-1} mod 25 = 17, 7*17 = 119 = 19 mod 25.
        assert_eq!(r.coeff_q(0), rat_int(19));
        assert_eq!(r.coeff_q(2), rat_int(9));

        let bad = QSeries::from_terms_q([(3, rat(1, 5))], 10);
        assert_eq!(
            bad.reduce_mod(5, 1).unwrap_err(),
            SeriesError::DenominatorDivisibleByEll { index: 72, ell: 5 }
        );
    }

    #[test]
    fn reduce_mod_kills_multiples() {
        let a = QSeries::from_terms_q([(0, rat_int(50)), (1, rat_int(-25))], 4);
        assert!(a.reduce_mod(5, 2).unwrap().is_zero_to_prec());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut big = BigInt::one();
        for k in 1..40 {
            big *= BigInt::from(k * 7 + 1);
        }
        let a = QSeries::from_terms(
            [
                (-24, Rational::one()),
                (552, Rational::new(-big.clone(), BigInt::from(12))),
                (600, Rational::new(BigInt::one(), big)),
            ],
            24_000,
        );
        let s = a.to_json_string();
        let b = QSeries::from_json_str(&s).unwrap();
        assert_eq!(a, b);
        // The emitted JSON is itself stable.
        assert_eq!(s, b.to_json_string());
    }

    #[test]
    fn exact_constants_do_not_degrade_precision() {
        let a = poly_q(&[(0, 1), (1, 4)], 17);
        let scaled = a.mul(&QSeries::constant(rat(1, 12)));
        assert_eq!(scaled.prec_q(), 17);
        assert_eq!(scaled.coeff_q(1), rat(1, 3));
    }

    #[test]
    fn display_renders_fractional_exponents() {
        let a = QSeries::from_terms([(-24, rat_int(1)), (1, rat_int(3))], 48);
        let s = format!("{a}");
        assert!(s.contains("q^-1"), "{s}");
        assert!(s.contains("q^(1/24)"), "{s}");
        assert!(s.contains("O(q^2)"), "{s}");
    }
}
