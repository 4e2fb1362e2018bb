//! The named modular and mock-modular q-expansions, assembled from eta
//! quotients, Eisenstein series, the partition statistics, and Hecke images.
//!
//! With q = e^(2 pi i tau) and E the Euler product prod (1 - q^n):
//!
//! - `S  = sum spt(n) q^(24n-1)` and `M = S + (1/12) sum (24n-1) p(n) q^(24n-1)`;
//!   `M* = -12 M = 1/q - 35 q^23 - ...` clears the denominators.
//! - `Pbar = eta(2 tau)/eta^2(tau)`, the overpartition generating function.
//! - `Sbar = sum sptbar1(n) q^n` and
//!   `Mbar = Sbar + (1/12) Pbar (E2(tau) - 4 E2(2 tau))`.
//! - `fbar = 4 Pbar sum_(n in Z) (-1)^n q^(n^2+n) / (1+q^n)^2`; the n = 0 term
//!   contributes 1/4 inside the sum and the identity 4 Mbar + fbar = 0 is one
//!   of the verified claims.
//! - `E = 2 E2(2 tau) - E2(tau)`, `hbar = E Pbar`, and the Fricke companion
//!   `gbar = E(8 tau) eta(8 tau)/eta^2(16 tau) = 1/q + O(q^7)`.
//! - `R = eta(8 tau)/eta^2(16 tau) = sum (-1)^n podd(n) q^(8n-1)`,
//!   `S2 = sum (-1)^n m2spt(n) q^(8n-1)`, and
//!   `M2 = S2 + (1/24) R (E2(16 tau) - E2(8 tau))`.
//! - `ZagierH = sum_(n = 0, 3 mod 4) H(n) q^n` with H(0) = -1/12.
//! - The ladders `G_(l,m) = M*|T(l^(2m)) - (3/l) M*|T(l^(2m-2)) - (3/l)^m l^m M*`,
//!   `F_(l,m) = eta^(l^(2m))(24 tau) G_(l,m)`, `H_(l,m) = F_(l,m)(tau/24)`, and
//!   their overpartition analogues built from gbar with trivial character.
//!
//! Each builder re-derives a prefix of its output through a second evaluation
//! order and fails with [`FormError::SelfCheck`] on disagreement.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::generators::{self, StatKind};
use crate::hecke::{HeckeError, HeckeTriple};
use crate::number_theory::{
    hurwitz_class_number,kronecker, sigma1, sigma1_odd, CharacterSpec,
};
use crate::series::{ceil_div, QSeries, Rational, SeriesError, UNIT};

#[derive(Debug, Error)]
pub enum FormError {
    #[error("insufficient source precision: need q-precision {required_q}, have {available_q}")]
    InsufficientPrecision { required_q: i64, available_q: i64 },
    #[error("self-check failed building {name}: first mismatch at lattice index {index}")]
    SelfCheck { name: String, index: i64 },
    #[error("decomposition mismatch at lattice index {index}")]
    DecompositionMismatch { index: i64 },
    #[error("form {0} takes (ell, m) parameters")]
    MissingParams(&'static str),
    #[error("form {0} takes no parameters")]
    UnexpectedParams(&'static str),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

/// How deep the second-order build checks look.
const SELF_CHECK_DEPTH: i64 = 120;

/// A formal eta quotient prod_i eta(delta_i tau)^(r_i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotientSpec {
    pub factors: Vec<(u32, i32)>,
}

impl EtaQuotientSpec {
    pub fn new(factors: &[(u32, i32)]) -> Self {
        EtaQuotientSpec {
            factors: factors.to_vec(),
        }
    }

    /// Leading exponent in 1/24 lattice units: sum delta_i r_i.
    pub fn leading_index(&self) -> i64 {
        self.factors
            .iter()
            .map(|&(d, r)| d as i64 * r as i64)
            .sum()
    }
}

/// Truncation of prod (1 - q^(delta n)) as a QSeries, by the pentagonal
/// number theorem.
fn euler_product(delta: u32, prec_index: i64) -> QSeries {
    let mut terms: Vec<(i64, Rational)> = vec![(0, Rational::one())];
    let d = delta as i64;
    let mut j = 1i64;
    loop {
        let g1 = d * UNIT * (j * (3 * j - 1) / 2);
        if g1 >= prec_index {
            break;
        }
        let sign = Rational::from_integer(BigInt::from(if j % 2 == 1 { -1 } else { 1 }));
        terms.push((g1, sign.clone()));
        let g2 = d * UNIT * (j * (3 * j + 1) / 2);
        if g2 < prec_index {
            terms.push((g2, sign));
        }
        j += 1;
    }
    QSeries::from_terms(terms, prec_index)
}

/// Expand an eta quotient to the requested q-exponent precision.
///
/// Factors are applied one eta power at a time, so quotients cost
/// O(terms * sqrt(precision)) per power instead of a dense square.
pub fn eta_quotient(spec: &EtaQuotientSpec, prec_q: i64) -> QSeries {
    let target = prec_q * UNIT;
    let lead = spec.leading_index();
    let factor_prec = target - lead;
    let mut acc = QSeries::monomial_index(lead, Rational::one());
    for &(delta, r) in &spec.factors {
        if r == 0 {
            continue;
        }
        let pent = euler_product(delta, factor_prec);
        for _ in 0..r.unsigned_abs() {
            acc = if r > 0 {
                acc.mul(&pent)
            } else {
                acc.div(&pent).expect("euler product has unit leading term")
            };
        }
    }
    acc.truncate(target)
}

/// Literal truncated product over (1 - q^(delta n))^r for delta n <= depth_q,
/// exact to q^depth_q. Used as the independent evaluation order when testing
/// the compiled expansion.
#[cfg(test)]
fn eta_quotient_naive(spec: &EtaQuotientSpec, depth_q: i64) -> QSeries {
    let prec_index = (depth_q + 1) * UNIT;
    let mut acc = QSeries::monomial_index(spec.leading_index(), Rational::one());
    for &(delta, r) in &spec.factors {
        let d = delta as i64;
        let mut n = 1i64;
        while d * n <= depth_q {
            let factor = QSeries::from_terms(
                [
                    (0, Rational::one()),
                    (d * n * UNIT, -Rational::one()),
                ],
                prec_index,
            );
            for _ in 0..r.unsigned_abs() {
                acc = if r > 0 {
                    acc.mul(&factor)
                } else {
                    acc.div(&factor).unwrap()
                };
            }
            n += 1;
        }
    }
    acc.truncate(spec.leading_index() + prec_index.min(depth_q * UNIT + 1))
}

/// E2(tau) = 1 - 24 sum sigma_1(n) q^n.
pub fn eisenstein_e2(prec_q: i64) -> QSeries {
    let mut terms = vec![(0i64, Rational::one())];
    for n in 1..prec_q {
        terms.push((
            n,
            Rational::from_integer(BigInt::from(-24i64 * sigma1(n as u64) as i64)),
        ));
    }
    QSeries::from_terms_q(terms, prec_q)
}

/// Theta(tau) = sum_(n in Z) q^(n^2) = 1 + 2 sum_(n>=1) q^(n^2).
pub fn theta(prec_q: i64) -> QSeries {
    let mut terms = vec![(0i64, Rational::one())];
    let mut n = 1i64;
    while n * n < prec_q {
        terms.push((n * n, Rational::from_integer(BigInt::from(2))));
        n += 1;
    }
    QSeries::from_terms_q(terms, prec_q)
}

/// The holomorphic part of the Zagier Eisenstein series:
/// sum_(n = 0, 3 mod 4) H(n) q^n with H(0) = -1/12.
pub fn zagier_class_series(prec_q: i64) -> QSeries {
    let mut terms = Vec::new();
    for n in 0..prec_q {
        if n % 4 == 0 || n % 4 == 3 {
            let h = hurwitz_class_number(n as u64);
            if !h.is_zero() {
                terms.push((n, h));
            }
        }
    }
    QSeries::from_terms_q(terms, prec_q)
}

/// Names of the assembled q-expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormName {
    S,
    M,
    MStar,
    PBar,
    SBar,
    MBar,
    FBar,
    E,
    HBar,
    GBar,
    R,
    S2,
    M2,
    ZagierH,
    GLm,
    FLm,
    HLm,
    GBarLm,
    FBarLm,
    HBarLm,
}

impl FormName {
    pub fn name(&self) -> &'static str {
        match self {
            FormName::S => "s",
            FormName::M => "m",
            FormName::MStar => "mstar",
            FormName::PBar => "pbar",
            FormName::SBar => "sbar",
            FormName::MBar => "mbar",
            FormName::FBar => "fbar",
            FormName::E => "e",
            FormName::HBar => "hbar",
            FormName::GBar => "gbar",
            FormName::R => "r",
            FormName::S2 => "s2",
            FormName::M2 => "m2",
            FormName::ZagierH => "zagierh",
            FormName::GLm => "g_lm",
            FormName::FLm => "f_lm",
            FormName::HLm => "h_lm",
            FormName::GBarLm => "gbar_lm",
            FormName::FBarLm => "fbar_lm",
            FormName::HBarLm => "hbar_lm",
        }
    }

    pub const ALL: [FormName; 20] = [
        FormName::S,
        FormName::M,
        FormName::MStar,
        FormName::PBar,
        FormName::SBar,
        FormName::MBar,
        FormName::FBar,
        FormName::E,
        FormName::HBar,
        FormName::GBar,
        FormName::R,
        FormName::S2,
        FormName::M2,
        FormName::ZagierH,
        FormName::GLm,
        FormName::FLm,
        FormName::HLm,
        FormName::GBarLm,
        FormName::FBarLm,
        FormName::HBarLm,
    ];

    pub fn parse(s: &str) -> Option<FormName> {
        FormName::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn takes_params(&self) -> bool {
        matches!(
            self,
            FormName::GLm
                | FormName::FLm
                | FormName::HLm
                | FormName::GBarLm
                | FormName::FBarLm
                | FormName::HBarLm
        )
    }
}

/// A built expansion with its parameters.
#[derive(Clone, Debug)]
pub struct NamedForm {
    pub name: FormName,
    pub params: Option<(u64, u32)>,
    pub series: QSeries,
}

/// Builds named forms, reusing preloaded statistic series when they are deep
/// enough. `FormBuilder::default()` builds everything from scratch.
#[derive(Default)]
pub struct FormBuilder {
    stats: std::collections::HashMap<StatKind, QSeries>,
}

impl FormBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Preload a statistic generating function (for sharing one deep build
    /// across many forms).
    pub fn preload_stat(&mut self, kind: StatKind, series: QSeries) {
        self.stats.insert(kind, series);
    }

    fn stat(&self, kind: StatKind, n_max: i64) -> QSeries {
        if let Some(s) = self.stats.get(&kind) {
            if s.prec_q() > n_max {
                return s.clone();
            }
        }
        generators::statistic_series(kind, n_max)
    }

    /// Build a named expansion exact below q^prec_q.
    pub fn build(
        &self,
        name: FormName,
        params: Option<(u64, u32)>,
        prec_q: i64,
    ) -> Result<NamedForm, FormError> {
        if name.takes_params() && params.is_none() {
            return Err(FormError::MissingParams(name.name()));
        }
        if !name.takes_params() && params.is_some() {
            return Err(FormError::UnexpectedParams(name.name()));
        }
        let series = match name {
            FormName::S => self.build_s(prec_q)?,
            FormName::M => self.build_m(prec_q)?,
            FormName::MStar => self.build_m(prec_q)?.scale_int(-12),
            FormName::PBar => self.build_pbar(prec_q)?,
            FormName::SBar => self.build_sbar(prec_q)?,
            FormName::MBar => self.build_mbar(prec_q)?,
            FormName::FBar => self.build_fbar(prec_q)?,
            FormName::E => build_e(prec_q)?,
            FormName::HBar => build_e(prec_q)?.mul(&self.build_pbar(prec_q)?),
            FormName::GBar => build_gbar(prec_q)?,
            FormName::R => self.build_r(prec_q)?,
            FormName::S2 => self.build_s2(prec_q)?,
            FormName::M2 => self.build_m2(prec_q)?,
            FormName::ZagierH => zagier_class_series(prec_q),
            FormName::GLm | FormName::FLm | FormName::HLm => {
                let (ell, m) = params.unwrap();
                let src_prec = spt_ladder_source_prec(ell, m, name, prec_q);
                let mstar = self.build_m(src_prec)?.scale_int(-12);
                match name {
                    FormName::GLm => g_lm(&mstar, ell, m, prec_q)?,
                    FormName::FLm => f_lm(&mstar, ell, m, prec_q)?,
                    _ => h_lm(&mstar, ell, m, prec_q)?,
                }
            }
            FormName::GBarLm | FormName::FBarLm | FormName::HBarLm => {
                let (ell, m) = params.unwrap();
                let src_prec = over_ladder_source_prec(ell, m, name, prec_q);
                let gbar = build_gbar(src_prec)?;
                match name {
                    FormName::GBarLm => gbar_lm(&gbar, ell, m, prec_q)?,
                    FormName::FBarLm => fbar_lm(&gbar, ell, m, prec_q)?,
                    _ => hbar_lm(&gbar, ell, m, prec_q)?,
                }
            }
        };
        Ok(NamedForm {
            name,
            params,
            series,
        })
    }

    fn build_s(&self, prec_q: i64) -> Result<QSeries, FormError> {
        let n_max = ceil_div(prec_q, 24).max(1);
        let spt = self.stat(StatKind::Spt, n_max);
        let s = spt.dilate(24).shifted(-UNIT).truncate(prec_q * UNIT);
        // Second order: the literal product formula, Euler product times the
        // Lambert kernel, multiplied out as series.
        let depth = SELF_CHECK_DEPTH.min(n_max);
        let p = self.stat(StatKind::P, depth);
        let kernel = QSeries::from_terms_q(
            generators::spt_kernel(depth as usize + 1)
                .into_iter()
                .enumerate()
                .map(|(n, c)| (n as i64, Rational::from_integer(BigInt::from(c)))),
            depth + 1,
        );
        let alt = p.mul(&kernel);
        if let Some(index) = spt.first_difference(&alt) {
            return Err(FormError::SelfCheck {
                name: "s".into(),
                index,
            });
        }
        Ok(s)
    }

    fn build_m(&self, prec_q: i64) -> Result<QSeries, FormError> {
        let n_max = ceil_div(prec_q, 24).max(1);
        let s = self.build_s(prec_q)?;
        let p = self.stat(StatKind::P, n_max);
        let p_shifted = p.dilate(24).shifted(-UNIT);
        let correction = p_shifted
            .q_derivative()?
            .scale(&Rational::new(BigInt::one(), BigInt::from(12)));
        // Second order: assemble the correction termwise from p(n) directly.
        let direct = QSeries::from_terms(
            p.terms().map(|(idx, c)| {
                let n = idx / UNIT;
                (
                    24 * n * UNIT - UNIT,
                    c * Rational::new(BigInt::from(24 * n - 1), BigInt::from(12)),
                )
            }),
            p.prec() * 24 - UNIT,
        );
        if let Some(index) = correction.first_difference(&direct) {
            return Err(FormError::SelfCheck {
                name: "m".into(),
                index,
            });
        }
        Ok(s.add(&correction).truncate(prec_q * UNIT))
    }

    fn build_pbar(&self, prec_q: i64) -> Result<QSeries, FormError> {
        let pbar = eta_quotient(&EtaQuotientSpec::new(&[(2, 1), (1, -2)]), prec_q);
        let depth = SELF_CHECK_DEPTH.min(prec_q - 1);
        let stat = self.stat(StatKind::PBar, depth);
        if let Some(index) = pbar.first_difference(&stat.truncate((depth + 1) * UNIT)) {
            return Err(FormError::SelfCheck {
                name: "pbar".into(),
                index,
            });
        }
        Ok(pbar)
    }

    fn build_sbar(&self, prec_q: i64) -> Result<QSeries, FormError> {
        let sbar = self.stat(StatKind::SptBar1, prec_q - 1).truncate(prec_q * UNIT);
        // Second order: compiled eta quotient times the Lambert kernel.
        let depth = SELF_CHECK_DEPTH.min(prec_q - 1);
        let kernel = QSeries::from_terms_q(
            generators::sptbar1_kernel(depth as usize + 1)
                .into_iter()
                .enumerate()
                .map(|(n, c)| (n as i64, Rational::from_integer(BigInt::from(c)))),
            depth + 1,
        );
        let pbar = eta_quotient(&EtaQuotientSpec::new(&[(2, 1), (1, -2)]), depth + 1);
        let alt = pbar.mul(&kernel);
        if let Some(index) = sbar.first_difference(&alt) {
            return Err(FormError::SelfCheck {
                name: "sbar".into(),
                index,
            });
        }
        Ok(sbar)
    }

    fn build_mbar(&self, prec_q: i64) -> Result<QSeries, FormError> {
        let sbar = self.build_sbar(prec_q)?;
        let pbar = self.build_pbar(prec_q)?;
        let e2 = eisenstein_e2(prec_q);
        let e2_two = eisenstein_e2(ceil_div(prec_q, 2)).dilate(2);
        let weight = e2.sub(&e2_two.scale_int(4));
        let mbar = sbar.add(
            &pbar
                .mul(&weight)
                .scale(&Rational::new(BigInt::one(), BigInt::from(12))),
        );
        // Second order: Mbar = Sbar + 2 q d/dq Pbar - hbar / 4.
        let depth = SELF_CHECK_DEPTH.min(prec_q);
        let pbar_d = pbar.truncate(depth * UNIT);
        let alt = sbar
            .add(&pbar_d.q_derivative()?.scale_int(2))
            .sub(&build_e(depth)?.mul(&pbar_d).scale(&Rational::new(
                BigInt::one(),
                BigInt::from(4),
            )));
        if let Some(index) = mbar.first_difference(&alt) {
            return Err(FormError::SelfCheck {
                name: "mbar".into(),
                index,
            });
        }
        Ok(mbar)
    }

    fn build_fbar(&self, prec_q: i64) -> Result<QSeries, FormError> {
        let pbar = self.build_pbar(prec_q)?;
        let kernel = fbar_kernel(prec_q);
        let fbar = pbar.mul(&kernel).scale_int(4);
        // Second order: run the quotient the other way around, dividing the
        // kernel by the eta factors instead of multiplying by Pbar.
        let depth = SELF_CHECK_DEPTH.min(prec_q - 1);
        let alt = fbar_kernel(depth + 1)
            .scale_int(4)
            .mul(&euler_product(2, (depth + 1) * UNIT))
            .div(&euler_product(1, (depth + 1) * UNIT))?
            .div(&euler_product(1, (depth + 1) * UNIT))?;
        if let Some(index) = fbar.first_difference(&alt) {
            return Err(FormError::SelfCheck {
                name: "fbar".into(),
                index,
            });
        }
        Ok(fbar)
    }

    fn build_r(&self, prec_q: i64) -> Result<QSeries, FormError> {
        let r = eta_quotient(&EtaQuotientSpec::new(&[(8, 1), (16, -2)]), prec_q);
        // R = sum (-1)^n podd(n) q^(8n-1).
        let depth = (SELF_CHECK_DEPTH * 8).min(prec_q - 1);
        let podd = self.stat(StatKind::POdd, ceil_div(depth + 1, 8));
        let twisted = QSeries::from_terms(
            podd.terms().map(|(idx, c)| {
                let n = idx / UNIT;
                let sign = if n % 2 == 0 { 1 } else { -1 };
                ((8 * n - 1) * UNIT, c * Rational::from_integer(sign.into()))
            }),
            (depth + 1) * UNIT,
        );
        if let Some(index) = r.truncate((depth + 1) * UNIT).first_difference(&twisted) {
            return Err(FormError::SelfCheck {
                name: "r".into(),
                index,
            });
        }
        Ok(r)
    }

    fn build_s2(&self, prec_q: i64) -> Result<QSeries, FormError> {
        let n_max = ceil_div(prec_q, 8).max(1);
        let m2 = self.stat(StatKind::M2Spt, n_max);
        Ok(QSeries::from_terms(
            m2.terms().map(|(idx, c)| {
                let n = idx / UNIT;
                let sign = if n % 2 == 0 { 1 } else { -1 };
                ((8 * n - 1) * UNIT, c * Rational::from_integer(sign.into()))
            }),
            prec_q * UNIT,
        ))
    }

    fn build_m2(&self, prec_q: i64) -> Result<QSeries, FormError> {
        let s2 = self.build_s2(prec_q)?;
        // R has a pole at q^-1, so build the factors one exponent deeper to
        // keep the product exact below q^prec_q.
        let r = self.build_r(prec_q + 1)?;
        let e2_8 = eisenstein_e2(ceil_div(prec_q, 8) + 1).dilate(8);
        let e2_16 = eisenstein_e2(ceil_div(prec_q, 16) + 1).dilate(16);
        let weight = e2_16.sub(&e2_8);
        let m2 = s2.add(
            &r.mul(&weight)
                .scale(&Rational::new(BigInt::one(), BigInt::from(24))),
        );
        // Second order: distribute the product before scaling.
        let depth = SELF_CHECK_DEPTH.min(prec_q);
        let r_d = r.truncate(depth * UNIT);
        let alt = s2.add(
            &r_d.mul(&e2_16)
                .sub(&r_d.mul(&e2_8))
                .scale(&Rational::new(BigInt::one(), BigInt::from(24))),
        );
        if let Some(index) = m2.first_difference(&alt) {
            return Err(FormError::SelfCheck {
                name: "m2".into(),
                index,
            });
        }
        Ok(m2)
    }
}

/// E(tau) = 2 E2(2 tau) - E2(tau) = 1 + 24 sum sigma_odd(n) q^n.
fn build_e(prec_q: i64) -> Result<QSeries, FormError> {
    let e = eisenstein_e2(ceil_div(prec_q, 2))
        .dilate(2)
        .scale_int(2)
        .sub(&eisenstein_e2(prec_q))
        .truncate(prec_q * UNIT);
    for (idx, c) in e.terms() {
        let n = idx / UNIT;
        let expect = if n == 0 {
            Rational::one()
        } else {
            Rational::from_integer(BigInt::from(24 * sigma1_odd(n as u64)))
        };
        if *c != expect {
            return Err(FormError::SelfCheck {
                name: "e".into(),
                index: idx,
            });
        }
    }
    Ok(e)
}

/// gbar = E(8 tau) eta(8 tau)/eta^2(16 tau).
fn build_gbar(prec_q: i64) -> Result<QSeries, FormError> {
    let base_prec = ceil_div(prec_q, 8) + 1;
    let gbar = build_e(base_prec)?
        .dilate(8)
        .mul(&eta_quotient(&EtaQuotientSpec::new(&[(8, 1), (16, -2)]), prec_q))
        .truncate(prec_q * UNIT);
    // Second order: assemble in the tau variable first, then dilate.
    let small = build_e(base_prec)?
        .mul(&eta_quotient(&EtaQuotientSpec::new(&[(1, 1), (2, -2)]), base_prec))
        .dilate(8);
    if let Some(index) = gbar.first_difference(&small) {
        return Err(FormError::SelfCheck {
            name: "gbar".into(),
            index,
        });
    }
    Ok(gbar)
}

/// sum_(n in Z) (-1)^n q^(n^2+n) / (1+q^n)^2 as a series: 1/4 from n = 0 and
/// a folded sum over n >= 1 (the n and -n terms coincide), with
/// 1/(1+q^n)^2 = sum_(k>=0) (-1)^k (k+1) q^(nk).
fn fbar_kernel(prec_q: i64) -> QSeries {
    let len = prec_q.max(1) as usize;
    let mut acc = vec![0i64; len];
    let mut n = 1usize;
    while n * n + n < len {
        let sign: i64 = if n % 2 == 1 { -1 } else { 1 };
        let mut k = 0i64;
        let mut e = n * n + n;
        while e < len {
            let ksign = if k % 2 == 0 { 1 } else { -1 };
            acc[e] += 2 * sign * ksign * (k + 1);
            k += 1;
            e += n;
        }
        n += 1;
    }
    let mut terms: Vec<(i64, Rational)> = vec![(0, Rational::new(BigInt::one(), BigInt::from(4)))];
    terms.extend(
        acc.into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(e, c)| (e as i64, Rational::from_integer(BigInt::from(c)))),
    );
    QSeries::from_terms_q(terms, prec_q)
}

/// Source q-precision needed so the spt-side ladder reaches prec_q.
fn spt_ladder_source_prec(ell: u64, m: u32, name: FormName, prec_q: i64) -> i64 {
    let l2m = (ell as i64).pow(2 * m);
    let g_prec = match name {
        FormName::GLm => prec_q,
        FormName::FLm => (prec_q - l2m).max(24),
        _ => (prec_q * 24 - l2m).max(24),
    };
    l2m * g_prec
}

fn over_ladder_source_prec(ell: u64, m: u32, name: FormName, prec_q: i64) -> i64 {
    let l2m = (ell as i64).pow(2 * m);
    let g_prec = match name {
        FormName::GBarLm => prec_q,
        FormName::FBarLm => (prec_q - l2m).max(8),
        _ => (prec_q * 8 - l2m).max(8),
    };
    l2m * g_prec
}

/// G_(l,m) = M*|T(l^(2m)) - (3/l) M*|T(l^(2m-2)) - (3/l)^m l^m M*, exact
/// below q^out_prec_q. Errors if the supplied M* is too shallow.
pub fn g_lm(mstar: &QSeries, ell: u64, m: u32, out_prec_q: i64) -> Result<QSeries, FormError> {
    assert!(m >= 1);
    let chi = CharacterSpec::new(3);
    let mut triple = HeckeTriple::new(mstar.clone(), ell, chi)?;
    let deep = triple.image_checked(m, out_prec_q)?;
    let shallow = triple.image(m - 1)?.clone();
    let chi_ell = kronecker(3, ell as i64);
    let eigen = chi_ell.pow(m) * (ell as i64).pow(m);
    Ok(deep
        .sub(&shallow.scale_int(chi_ell))
        .sub(&mstar.scale_int(eigen))
        .truncate(out_prec_q * UNIT))
}

/// F_(l,m) = eta^(l^(2m))(24 tau) G_(l,m).
pub fn f_lm(mstar: &QSeries, ell: u64, m: u32, out_prec_q: i64) -> Result<QSeries, FormError> {
    let l2m = (ell as i64).pow(2 * m);
    let g = g_lm(mstar, ell, m, (out_prec_q - l2m).max(24))?;
    let eta_pow = eta_quotient(
        &EtaQuotientSpec::new(&[(24, l2m as i32)]),
        out_prec_q + l2m,
    );
    Ok(eta_pow.mul(&g).truncate(out_prec_q * UNIT))
}

/// H_(l,m) = F_(l,m)(tau/24), exact below q^out_prec_q.
pub fn h_lm(mstar: &QSeries, ell: u64, m: u32, out_prec_q: i64) -> Result<QSeries, FormError> {
    let f = f_lm(mstar, ell, m, out_prec_q * 24)?;
    Ok(f.rescale_exponents(24)?)
}

/// Gbar_(l,m) = gbar|T(l^(2m)) - gbar|T(l^(2m-2)) with trivial character.
pub fn gbar_lm(gbar: &QSeries, ell: u64, m: u32, out_prec_q: i64) -> Result<QSeries, FormError> {
    assert!(m >= 1);
    let mut triple = HeckeTriple::new(gbar.clone(), ell, CharacterSpec::trivial())?;
    let deep = triple.image_checked(m, out_prec_q)?;
    let shallow = triple.image(m - 1)?.clone();
    Ok(deep.sub(&shallow).truncate(out_prec_q * UNIT))
}

/// Fbar_(l,m) = Gbar_(l,m) eta^(2 l^(2m))(16 tau) / eta^(l^(2m))(8 tau).
pub fn fbar_lm(gbar: &QSeries, ell: u64, m: u32, out_prec_q: i64) -> Result<QSeries, FormError> {
    let l2m = (ell as i64).pow(2 * m);
    let g = gbar_lm(gbar, ell, m, (out_prec_q - l2m).max(8))?;
    let eta_part = eta_quotient(
        &EtaQuotientSpec::new(&[(16, 2 * l2m as i32), (8, -(l2m as i32))]),
        out_prec_q + l2m,
    );
    Ok(eta_part.mul(&g).truncate(out_prec_q * UNIT))
}

/// Hbar_(l,m) = Fbar_(l,m)(tau/8), exact below q^out_prec_q.
pub fn hbar_lm(gbar: &QSeries, ell: u64, m: u32, out_prec_q: i64) -> Result<QSeries, FormError> {
    let f = fbar_lm(gbar, ell, m, out_prec_q * 8)?;
    Ok(f.rescale_exponents(8)?)
}

/// Convenience entry point: build with no preloaded statistics.
pub fn build(
    name: FormName,
    params: Option<(u64, u32)>,
    prec_q: i64,
) -> Result<NamedForm, FormError> {
    FormBuilder::new().build(name, params, prec_q)
}

/// Which statistic family a decomposition belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionKind {
    Spt,
    SptBar1,
    M2Spt,
}

/// Build the (M-form, S-form) pair for a family and assert its M - S
/// decomposition coefficientwise:
///
/// - Spt: M - S = (1/12) q d/dq (q^-1 P(q^24)), i.e. (24n-1) p(n) / 12.
/// - SptBar1: Mbar - Sbar = 2 q d/dq Pbar - hbar / 4.
/// - M2Spt: M2 - S2 = (1/16) (gbar + q d/dq R).
pub fn m_minus_s_decomposition(
    kind: DecompositionKind,
    prec_q: i64,
) -> Result<(NamedForm, NamedForm), FormError> {
    m_minus_s_decomposition_with(&FormBuilder::new(), kind, prec_q)
}

pub fn m_minus_s_decomposition_with(
    builder: &FormBuilder,
    kind: DecompositionKind,
    prec_q: i64,
) -> Result<(NamedForm, NamedForm), FormError> {
    let (m_form, s_form, expected) = match kind {
        DecompositionKind::Spt => {
            let m = builder.build(FormName::M, None, prec_q)?;
            let s = builder.build(FormName::S, None, prec_q)?;
            let p = builder.stat(StatKind::P, ceil_div(prec_q, 24).max(1));
            let expected = p
                .dilate(24)
                .shifted(-UNIT)
                .q_derivative()?
                .scale(&Rational::new(BigInt::one(), BigInt::from(12)));
            (m, s, expected)
        }
        DecompositionKind::SptBar1 => {
            let m = builder.build(FormName::MBar, None, prec_q)?;
            let s = builder.build(FormName::SBar, None, prec_q)?;
            let pbar = builder.build(FormName::PBar, None, prec_q)?.series;
            let hbar = builder.build(FormName::HBar, None, prec_q)?.series;
            let expected = pbar
                .q_derivative()?
                .scale_int(2)
                .sub(&hbar.scale(&Rational::new(BigInt::one(), BigInt::from(4))));
            (m, s, expected)
        }
        DecompositionKind::M2Spt => {
            let m = builder.build(FormName::M2, None, prec_q)?;
            let s = builder.build(FormName::S2, None, prec_q)?;
            let gbar = builder.build(FormName::GBar, None, prec_q)?.series;
            let r = builder.build(FormName::R, None, prec_q)?.series;
            let expected = gbar
                .add(&r.q_derivative()?)
                .scale(&Rational::new(BigInt::one(), BigInt::from(16)));
            (m, s, expected)
        }
    };
    let diff = m_form.series.sub(&s_form.series);
    if let Some(index) = diff.first_difference(&expected) {
        return Err(FormError::DecompositionMismatch { index });
    }
    Ok((m_form, s_form))
}
