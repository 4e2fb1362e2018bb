//! The verification harness: congruence families, Hecke-combination and
//! eigenform checks, coefficient identities, Sturm certificates, and the
//! cross-derivation closure check, all reported as machine-readable records.
//!
//! A [`Claim`] is a finite, explicitly-ranged check. Claims are assembled
//! into suites by [`suite_claims`], share expensive series through a
//! [`SuiteContext`], and run independently (in parallel when asked). Reports
//! are deterministic: serialization excludes wall times, claims are sorted by
//! id, and every arithmetic step is exact.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::forms::{
    self, eta_quotient, eisenstein_e2, DecompositionKind, EtaQuotientSpec, FormBuilder, FormName,
};
use crate::generators::{self, StatKind};
use crate::hecke::{apply_t_ell_squared, HeckeTriple};
use crate::number_theory::{
    hurwitz_class_number, kronecker, sturm_bound, CharacterSpec,
};
use crate::series::{ceil_div, reduce_rational, QSeries, Rational, UNIT};

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Counterexample,
    Skipped,
}

/// The first failing instance of a claim, with enough data to replay it.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Failure {
    /// Iteration variable (progression index or exponent) at the failure.
    pub n: i64,
    /// The coefficient argument or exponent actually tested.
    pub argument: i64,
    /// Deterministic description of the violated equation.
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub range: String,
    pub status: Status,
    /// Number of instances checked.
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<String>,
    /// Informational claims do not gate the suite exit status.
    pub asserted: bool,
    /// Wall time is reporting metadata only; it is excluded from the
    /// serialized payload so reports stay byte-identical across runs.
    #[serde(skip)]
    pub wall_time_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.asserted || self.status == Status::Verified
    }
}

/// Bundle reports into the interchange JSON document. Wall time lives in a
/// metadata block so the claims payload is deterministic.
pub fn reports_to_json(reports: &[VerificationReport], wall_time_ms: u64) -> serde_json::Value {
    serde_json::json!({
        "claims": reports,
        "meta": { "wall_time_ms": wall_time_ms },
    })
}

// ---------------------------------------------------------------------------
// Claims.
// ---------------------------------------------------------------------------

/// n maps to (mul*n + add)/div; instances where div does not divide are
/// outside the progression and are skipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub mul: i64,
    pub add: i64,
    pub div: i64,
}

impl AffineMap {
    pub fn new(mul: i64, add: i64, div: i64) -> Self {
        AffineMap { mul, add, div }
    }

    pub fn apply(&self, n: i64) -> Option<i64> {
        let raw = self.mul.checked_mul(n)?.checked_add(self.add)?;
        if raw.rem_euclid(self.div) == 0 {
            Some(raw / self.div)
        } else {
            None
        }
    }
}

/// Right-hand side of a congruence family.
#[derive(Clone, Debug)]
pub enum Comparison {
    /// a(map(n)) = 0 mod ell^m.
    ZeroMod,
    /// a(map(n)) = coeff * b(map2(n)) mod ell^m.
    Relative {
        source: StatKind,
        map: AffineMap,
        coeff: i64,
    },
}

/// An arithmetic-progression congruence claim on a statistic stream.
#[derive(Clone, Debug)]
pub struct CongruenceFamily {
    pub id: String,
    pub source: StatKind,
    pub map: AffineMap,
    /// Require kronecker(-n, ell) to equal this value, if present.
    pub side_kronecker: Option<i64>,
    pub comparison: Comparison,
    pub ell: u64,
    pub m: u32,
    /// Inclusive cap on the (left) coefficient argument.
    pub max_argument: i64,
}

/// Which ladder family a Sturm certificate belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SturmFamily {
    Spt,
    Overpartition,
}

/// Coefficient identities checked at pinned precisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityKind {
    /// 4 Mbar + fbar = 0 below q^400.
    FourMBarPlusFBar,
    /// M2 = sum H(8n-1) q^(8n-1) below q^2000.
    M2Hurwitz,
    /// sum_(n = 3 mod 8) 3 H(n) q^n = eta^6(16 tau)/eta^3(8 tau) below q^500.
    ClassNumberEta,
    /// M - S = (1/12) q d/dq (q^-1 P(q^24)) below q^300.
    SptDecomposition,
    /// Mbar - Sbar = 2 q d/dq Pbar - hbar/4 below q^300.
    QuarterH,
    /// M2 - S2 = (1/16)(gbar + q d/dq R) below q^300.
    M2Decomposition,
    /// q d/dq Pbar = (1/12) Pbar (E2(2 tau) - E2(tau)) below q^300.
    PBarDerivative,
    /// q d/dq R = (1/3) R (E2(8 tau) - 4 E2(16 tau)) below q^300.
    RDerivative,
}

impl IdentityKind {
    pub fn precision(&self) -> i64 {
        match self {
            IdentityKind::FourMBarPlusFBar => 400,
            IdentityKind::M2Hurwitz => 2000,
            IdentityKind::ClassNumberEta => 500,
            _ => 300,
        }
    }
}

/// One finite check.
#[derive(Clone, Debug)]
pub enum Claim {
    Family(CongruenceFamily),
    /// All coefficients of F0|T(l^(2m)) - chi(l) F0|T(l^(2m-2)) vanish mod
    /// l^m below q^prec_q.
    HeckeCombination {
        id: String,
        form: FormName,
        char_top: i64,
        ell: u64,
        m: u32,
        prec_q: i64,
    },
    /// F|T(l^2) = (l+1) F exactly below q^prec_q.
    Eigenform {
        id: String,
        form: FormName,
        ell: u64,
        prec_q: i64,
    },
    Identity {
        id: String,
        kind: IdentityKind,
    },
    /// G_(l,m) has principal part l^m q^(-l^(2m)) - (3/l)^m l^m q^(-1) and no
    /// other term below q^23.
    SptLadder { id: String, ell: u64, m: u32 },
    /// Gbar_(l,m) = l^m q^(-l^(2m)) + O(q^7), supported on 7 mod 8.
    OverLadder { id: String, ell: u64, m: u32 },
    Sturm {
        id: String,
        family: SturmFamily,
        ell: u64,
        m: u32,
    },
    /// The alternating combination
    /// a(l^(2m) x) + 2 sum_(k=1..m) (-1)^k (3/l)^k a(l^(2m-2k) x) mod l^m on
    /// the stratum kronecker(-x, l) = -1, on M* (asserted) or on
    /// S* = -12 S (recorded only; it is not expected to hold).
    MtildeAlternating {
        id: String,
        ell: u64,
        m: u32,
        prec_q: i64,
        use_stilde: bool,
    },
    /// mtilde*(l^(2m+1) x) = (3/l) mtilde*(l^(2m-1) x) mod l^m for all x.
    MtildeStep {
        id: String,
        ell: u64,
        m: u32,
        mstar_prec_q: i64,
    },
    /// Cross-check that the Hecke-side derivation of the prime-power spt
    /// congruence agrees with direct computation everywhere both apply.
    Closure {
        id: String,
        ell: u64,
        m: u32,
        max_argument: i64,
    },
}

impl Claim {
    pub fn id(&self) -> &str {
        match self {
            Claim::Family(f) => &f.id,
            Claim::HeckeCombination { id, .. }
            | Claim::Eigenform { id, .. }
            | Claim::Identity { id, .. }
            | Claim::SptLadder { id, .. }
            | Claim::OverLadder { id, .. }
            | Claim::Sturm { id, .. }
            | Claim::MtildeAlternating { id, .. }
            | Claim::MtildeStep { id, .. }
            | Claim::Closure { id, .. } => id,
        }
    }

    pub fn ell_m(&self) -> (Option<u64>, Option<u32>) {
        match self {
            Claim::Family(f) => (Some(f.ell), Some(f.m)),
            Claim::HeckeCombination { ell, m, .. }
            | Claim::Sturm { ell, m, .. }
            | Claim::SptLadder { ell, m, .. }
            | Claim::OverLadder { ell, m, .. }
            | Claim::MtildeAlternating { ell, m, .. }
            | Claim::MtildeStep { ell, m, .. }
            | Claim::Closure { ell, m, .. } => (Some(*ell), Some(*m)),
            Claim::Eigenform { ell, .. } => (Some(*ell), None),
            Claim::Identity { .. } => (None, None),
        }
    }
}

// ---------------------------------------------------------------------------
// Shared context.
// ---------------------------------------------------------------------------

/// External persistence hook for expensive series (the CLI backs this with a
/// cache directory). Loaded series are trusted as-is.
pub trait SeriesCache: Sync {
    fn load(&self, key: &str) -> Option<QSeries>;
    fn store(&self, key: &str, series: &QSeries);
}

/// Prebuilt series shared by the claims of a suite run.
pub struct SuiteContext {
    stats: HashMap<StatKind, QSeries>,
    forms: HashMap<FormName, QSeries>,
    builder: FormBuilder,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Requirements {
    /// Maximum coefficient argument needed per statistic.
    pub stat_args: HashMap<StatKind, i64>,
    /// Minimum q-precision needed per parameterless form.
    pub form_prec: HashMap<FormName, i64>,
}

impl Requirements {
    fn stat(&mut self, kind: StatKind, n: i64) {
        let e = self.stat_args.entry(kind).or_insert(0);
        *e = (*e).max(n);
    }

    fn form(&mut self, name: FormName, prec_q: i64) {
        let e = self.form_prec.entry(name).or_insert(0);
        *e = (*e).max(prec_q);
    }

    fn merge(&mut self, other: Requirements) {
        for (k, v) in other.stat_args {
            self.stat(k, v);
        }
        for (k, v) in other.form_prec {
            self.form(k, v);
        }
    }
}

fn lpow(ell: u64, e: u32) -> i64 {
    (ell as i64).pow(e)
}

impl Claim {
    /// What this claim needs prebuilt in the shared context.
    pub fn requirements(&self) -> Requirements {
        let mut r = Requirements::default();
        match self {
            Claim::Family(f) => {
                r.stat(f.source, f.max_argument);
                if let Comparison::Relative { source, .. } = &f.comparison {
                    r.stat(*source, f.max_argument);
                }
            }
            Claim::HeckeCombination {
                form, ell, m, prec_q, ..
            } => {
                r.form(*form, lpow(*ell, 2 * m) * prec_q);
            }
            Claim::Eigenform { form, ell, prec_q, .. } => {
                r.form(*form, lpow(*ell, 2) * prec_q);
            }
            Claim::Identity { kind, .. } => {
                let p = kind.precision();
                match kind {
                    IdentityKind::FourMBarPlusFBar => {
                        r.form(FormName::MBar, p);
                        r.form(FormName::FBar, p);
                    }
                    IdentityKind::M2Hurwitz => r.form(FormName::M2, p),
                    IdentityKind::ClassNumberEta => {}
                    IdentityKind::SptDecomposition => {
                        r.stat(StatKind::Spt, ceil_div(p, 24) + 1);
                        r.stat(StatKind::P, ceil_div(p, 24) + 1);
                    }
                    IdentityKind::QuarterH => {
                        r.stat(StatKind::SptBar1, p);
                        r.form(FormName::MBar, p);
                    }
                    IdentityKind::M2Decomposition => {
                        r.stat(StatKind::M2Spt, ceil_div(p, 8) + 1);
                        r.form(FormName::M2, p);
                        r.form(FormName::GBar, p);
                    }
                    IdentityKind::PBarDerivative | IdentityKind::RDerivative => {}
                }
            }
            Claim::SptLadder { ell, m, .. } => {
                r.form(FormName::MStar, 24 * lpow(*ell, 2 * m));
            }
            Claim::OverLadder { ell, m, .. } => {
                r.form(FormName::GBar, 8 * lpow(*ell, 2 * m));
            }
            Claim::Sturm { family, ell, m, .. } => {
                if let Some(req) = sturm_requirements(*family, *ell, *m) {
                    r.merge(req);
                }
            }
            Claim::MtildeAlternating {
                ell, m, prec_q, use_stilde, ..
            } => {
                let src = lpow(*ell, 2 * m) * prec_q;
                r.form(FormName::MStar, src);
                if *use_stilde {
                    r.stat(StatKind::Spt, ceil_div(src, 24) + 1);
                }
            }
            Claim::MtildeStep { mstar_prec_q, .. } => {
                r.form(FormName::MStar, *mstar_prec_q);
            }
            Claim::Closure { max_argument, .. } => {
                // The deepest coefficient read is at exponent just below
                // 24 * max_argument, on both the M* side and the F_m side.
                r.stat(StatKind::Spt, *max_argument);
                r.stat(StatKind::P, *max_argument);
                r.form(FormName::MStar, 24 * (*max_argument));
            }
        }
        r
    }
}

/// Sturm data: Sturm bound, claimed vanishing order, and the precision the
/// certificate needs, or None when the eta-power guard l^(2m) <= 700 trips.
struct SturmPlan {
    bound: i64,
    order: i64,
    h_prec_q: i64,
}

fn sturm_plan(family: SturmFamily, ell: u64, m: u32) -> Option<SturmPlan> {
    let l2m = lpow(ell, 2 * m);
    if l2m > 700 {
        return None;
    }
    let (level, step) = match family {
        SturmFamily::Spt => (1, 24),
        SturmFamily::Overpartition => (2, 8),
    };
    let bound = sturm_bound((l2m + 3) as u64, level).expect("integral weight") as i64;
    let order = (l2m + (step - 1)) / step + if (l2m + step - 1) % step == 0 { 0 } else { 0 };
    // l^(2m) = 1 mod 24 (and mod 8), so the order (l^(2m) + step - 1)/step is
    // exact integer division.
    debug_assert_eq!((l2m + step - 1) % step, 0);
    Some(SturmPlan {
        bound,
        order,
        h_prec_q: bound.max(order) + 1,
    })
}

fn sturm_requirements(family: SturmFamily, ell: u64, m: u32) -> Option<Requirements> {
    let plan = sturm_plan(family, ell, m)?;
    let l2m = lpow(ell, 2 * m);
    let mut r = Requirements::default();
    match family {
        SturmFamily::Spt => {
            let g_prec = (24 * plan.h_prec_q - l2m).max(24);
            r.form(FormName::MStar, l2m * g_prec);
        }
        SturmFamily::Overpartition => {
            let g_prec = (8 * plan.h_prec_q - l2m).max(8);
            r.form(FormName::GBar, l2m * g_prec);
        }
    }
    Some(r)
}

impl SuiteContext {
    /// Build every series the given claims need, loading from and populating
    /// the cache when one is supplied.
    pub fn prepare(claims: &[Claim], cache: Option<&dyn SeriesCache>) -> SuiteContext {
        let mut reqs = Requirements::default();
        for c in claims {
            reqs.merge(c.requirements());
        }
        // Forms are assembled from the statistics, so fold their needs in
        // before building the stats.
        for (&name, &prec_q) in &reqs.form_prec {
            let stat_needs: &[(StatKind, i64)] = match name {
                FormName::S | FormName::M | FormName::MStar => &[
                    (StatKind::Spt, 0),
                    (StatKind::P, 0),
                ],
                FormName::SBar | FormName::MBar => &[(StatKind::SptBar1, 1)],
                FormName::S2 | FormName::M2 => &[(StatKind::M2Spt, 2)],
                _ => &[],
            };
            for &(kind, mode) in stat_needs {
                let n = match mode {
                    0 => ceil_div(prec_q, 24) + 1,
                    1 => prec_q,
                    _ => ceil_div(prec_q, 8) + 1,
                };
                let e = reqs.stat_args.entry(kind).or_insert(0);
                *e = (*e).max(n);
            }
        }

        let mut stats = HashMap::new();
        let mut kinds: Vec<(StatKind, i64)> = reqs.stat_args.clone().into_iter().collect();
        kinds.sort_by_key(|(k, _)| k.name());
        for (kind, n_max) in kinds {
            let key = format!("stat-{}", kind.name());
            let series = load_or_build(cache, &key, (n_max + 1) * UNIT, || {
                generators::statistic_series(kind, n_max)
            });
            stats.insert(kind, series);
        }

        let mut builder = FormBuilder::new();
        for (kind, series) in &stats {
            builder.preload_stat(*kind, series.clone());
        }

        let mut forms = HashMap::new();
        let mut wanted: Vec<(FormName, i64)> = reqs.form_prec.clone().into_iter().collect();
        wanted.sort_by_key(|(n, _)| n.name());
        for (name, prec_q) in wanted {
            let key = format!("form-{}", name.name());
            let series = load_or_build(cache, &key, prec_q * UNIT, || {
                builder
                    .build(name, None, prec_q)
                    .expect("context form build")
                    .series
            });
            forms.insert(name, series);
        }

        SuiteContext {
            stats,
            forms,
            builder,
        }
    }

    pub fn stat(&self, kind: StatKind) -> Option<&QSeries> {
        self.stats.get(&kind)
    }

    pub fn form(&self, name: FormName) -> Option<&QSeries> {
        self.forms.get(&name)
    }

    pub fn builder(&self) -> &FormBuilder {
        &self.builder
    }
}

fn load_or_build(
    cache: Option<&dyn SeriesCache>,
    key: &str,
    min_prec_index: i64,
    build: impl FnOnce() -> QSeries,
) -> QSeries {
    if let Some(c) = cache {
        if let Some(s) = c.load(key) {
            if s.prec() >= min_prec_index {
                return s;
            }
        }
        let s = build();
        c.store(key, &s);
        s
    } else {
        build()
    }
}

// ---------------------------------------------------------------------------
// Claim execution.
// ---------------------------------------------------------------------------

struct Outcome {
    status: Status,
    checked: u64,
    first_failure: Option<Failure>,
    range: String,
    scaling: Option<String>,
}

impl Outcome {
    fn verified(checked: u64, range: String) -> Outcome {
        Outcome {
            status: Status::Verified,
            checked,
            first_failure: None,
            range,
            scaling: None,
        }
    }

    fn failed(checked: u64, range: String, failure: Failure) -> Outcome {
        Outcome {
            status: Status::Counterexample,
            checked,
            first_failure: Some(failure),
            range,
            scaling: None,
        }
    }

    fn skipped(range: String, why: String) -> Outcome {
        Outcome {
            status: Status::Skipped,
            checked: 0,
            first_failure: Some(Failure {
                n: 0,
                argument: 0,
                detail: why,
            }),
            range,
            scaling: None,
        }
    }
}

fn residue(value: &Rational, modulus: &BigInt) -> Option<BigInt> {
    reduce_rational(value, modulus)
}

impl Claim {
    pub fn run(&self, ctx: &SuiteContext) -> VerificationReport {
        let start = Instant::now();
        let outcome = self.execute(ctx);
        let (ell, m) = self.ell_m();
        let asserted = !matches!(
            self,
            Claim::MtildeAlternating { use_stilde: true, .. }
        );
        VerificationReport {
            id: self.id().to_string(),
            ell,
            m,
            range: outcome.range,
            status: outcome.status,
            checked: outcome.checked,
            first_failure: outcome.first_failure,
            scaling: outcome.scaling,
            asserted,
            wall_time_ms: start.elapsed().as_millis() as u64,
        }
    }

    fn execute(&self, ctx: &SuiteContext) -> Outcome {
        match self {
            Claim::Family(f) => run_family(ctx, f),
            Claim::HeckeCombination {
                form,
                char_top,
                ell,
                m,
                prec_q,
                ..
            } => run_hecke_combination(ctx, *form, *char_top, *ell, *m, *prec_q),
            Claim::Eigenform { form, ell, prec_q, .. } => {
                run_eigenform(ctx, *form, *ell, *prec_q)
            }
            Claim::Identity { kind, .. } => run_identity(ctx, *kind),
            Claim::SptLadder { ell, m, .. } => run_spt_ladder(ctx, *ell, *m),
            Claim::OverLadder { ell, m, .. } => run_over_ladder(ctx, *ell, *m),
            Claim::Sturm { family, ell, m, .. } => run_sturm(ctx, *family, *ell, *m),
            Claim::MtildeAlternating {
                ell,
                m,
                prec_q,
                use_stilde,
                ..
            } => run_mtilde_alternating(ctx, *ell, *m, *prec_q, *use_stilde),
            Claim::MtildeStep {
                ell, m, mstar_prec_q, ..
            } => run_mtilde_step(ctx, *ell, *m, *mstar_prec_q),
            Claim::Closure {
                ell, m, max_argument, ..
            } => run_closure(ctx, *ell, *m, *max_argument),
        }
    }
}

fn run_family(ctx: &SuiteContext, fam: &CongruenceFamily) -> Outcome {
    let range = format!("arguments <= {}", fam.max_argument);
    let Some(series) = ctx.stat(fam.source) else {
        return Outcome::skipped(range, format!("statistic {} not prepared", fam.source.name()));
    };
    let available = series.prec_q() - 1;
    if available < fam.max_argument {
        return Outcome::skipped(
            range,
            format!(
                "insufficient precision: need arguments <= {}, have {}",
                fam.max_argument, available
            ),
        );
    }
    let second = match &fam.comparison {
        Comparison::ZeroMod => None,
        Comparison::Relative { source, .. } => match ctx.stat(*source) {
            Some(s) => Some(s),
            None => {
                return Outcome::skipped(
                    range,
                    format!("statistic {} not prepared", source.name()),
                )
            }
        },
    };
    let modulus = BigInt::from(fam.ell).pow(fam.m);
    let mut checked = 0u64;
    let mut n = 0i64;
    loop {
        let Some(arg) = fam.map.apply(n).filter(|a| *a >= 0) else {
            n += 1;
            if fam.map.mul.checked_mul(n).map_or(true, |v| {
                v.checked_add(fam.map.add).map_or(true, |w| {
                    w / fam.map.div > fam.max_argument
                })
            }) {
                break;
            }
            continue;
        };
        if arg > fam.max_argument {
            break;
        }
        if let Some(target) = fam.side_kronecker {
            if kronecker(-n, fam.ell as i64) != target {
                n += 1;
                continue;
            }
        }
        let lhs = series.coeff_q(arg);
        let ok = match &fam.comparison {
            Comparison::ZeroMod => {
                let r = residue(&lhs, &modulus).expect("integer statistic");
                if !r.is_zero() {
                    return Outcome::failed(
                        checked,
                        range,
                        Failure {
                            n,
                            argument: arg,
                            detail: format!(
                                "{}({arg}) = {} mod {}, expected 0",
                                fam.source.name(),
                                r,
                                modulus
                            ),
                        },
                    );
                }
                true
            }
            Comparison::Relative { source, map, coeff } => {
                let arg2 = map.apply(n).filter(|a| *a >= 0);
                match arg2 {
                    None => true,
                    Some(arg2) => {
                        let rhs = second.unwrap().coeff_q(arg2);
                        let diff = lhs - rhs * Rational::from_integer(BigInt::from(*coeff));
                        let r = residue(&diff, &modulus).expect("integer statistic");
                        if !r.is_zero() {
                            return Outcome::failed(
                                checked,
                                range,
                                Failure {
                                    n,
                                    argument: arg,
                                    detail: format!(
                                        "{}({arg}) - {} * {}({arg2}) = {} mod {}, expected 0",
                                        fam.source.name(),
                                        coeff,
                                        source.name(),
                                        r,
                                        modulus
                                    ),
                                },
                            );
                        }
                        true
                    }
                }
            }
        };
        if ok {
            checked += 1;
        }
        n += 1;
    }
    Outcome::verified(checked, range)
}

fn run_hecke_combination(
    ctx: &SuiteContext,
    form: FormName,
    char_top: i64,
    ell: u64,
    m: u32,
    prec_q: i64,
) -> Outcome {
    let range = format!("exponents < {prec_q}");
    let Some(source) = ctx.form(form) else {
        return Outcome::skipped(range, format!("form {} not prepared", form.name()));
    };
    let required = lpow(ell, 2 * m) * prec_q;
    if source.prec_q() < required {
        return Outcome::skipped(
            range,
            format!(
                "insufficient precision: need q-precision {required}, have {}",
                source.prec_q()
            ),
        );
    }
    let chi = CharacterSpec::new(char_top);
    let mut triple = match HeckeTriple::new(source.clone(), ell, chi) {
        Ok(t) => t,
        Err(e) => return Outcome::skipped(range, e.to_string()),
    };
    let combo = match triple.f_combination(m) {
        Ok(c) => c,
        Err(e) => return Outcome::skipped(range, e.to_string()),
    };
    let truncated = combo.truncate(prec_q * UNIT);
    let reduced = match truncated.reduce_mod(ell, m) {
        Ok(r) => r,
        Err(e) => return Outcome::skipped(range, e.to_string()),
    };
    let scaling = (form == FormName::MStar)
        .then(|| "coefficients taken from M* = -12 M".to_string());
    let checked = truncated.prec_q().max(0) as u64;
    if let Some((idx, c)) = reduced.terms().next() {
        let n = idx / UNIT;
        return Outcome {
            status: Status::Counterexample,
            checked,
            first_failure: Some(Failure {
                n,
                argument: n,
                detail: format!(
                    "coefficient of q^{n} in the T({}^{}) combination is {} mod {}^{}",
                    ell,
                    2 * m,
                    c,
                    ell,
                    m
                ),
            }),
            range,
            scaling,
        };
    }
    Outcome {
        status: Status::Verified,
        checked,
        first_failure: None,
        range,
        scaling,
    }
}

fn run_eigenform(ctx: &SuiteContext, form: FormName, ell: u64, prec_q: i64) -> Outcome {
    let range = format!("exponents < {prec_q}");
    let Some(source) = ctx.form(form) else {
        return Outcome::skipped(range, format!("form {} not prepared", form.name()));
    };
    let required = (ell * ell) as i64 * prec_q;
    if source.prec_q() < required {
        return Outcome::skipped(
            range,
            format!(
                "insufficient precision: need q-precision {required}, have {}",
                source.prec_q()
            ),
        );
    }
    let image = match apply_t_ell_squared(source, ell, &CharacterSpec::trivial()) {
        Ok(t) => t,
        Err(e) => return Outcome::skipped(range, e.to_string()),
    };
    let diff = image
        .sub(&source.scale_int(ell as i64 + 1))
        .truncate(prec_q * UNIT);
    let first = diff.terms().next().map(|(idx, c)| (idx, c.clone()));
    match first {
        None => Outcome::verified(prec_q.max(0) as u64, range),
        Some((idx, c)) => {
            let n = idx / UNIT;
            Outcome::failed(
                0,
                range,
                Failure {
                    n,
                    argument: n,
                    detail: format!(
                        "(F|T({ell}^2) - {} F) has coefficient {c} at q^{n}",
                        ell + 1
                    ),
                },
            )
        }
    }
}

fn identity_outcome(range: String, lhs: &QSeries, rhs: &QSeries, prec_q: i64) -> Outcome {
    let l = lhs.truncate(prec_q * UNIT);
    let r = rhs.truncate(prec_q * UNIT);
    match l.first_difference(&r) {
        None => Outcome::verified(l.prec_q().min(r.prec_q()).max(0) as u64, range),
        Some(idx) => {
            let n = idx / UNIT;
            Outcome::failed(
                0,
                range,
                Failure {
                    n,
                    argument: n,
                    detail: format!(
                        "sides differ at q^{n}: {} vs {}",
                        l.coeff_index(idx),
                        r.coeff_index(idx)
                    ),
                },
            )
        }
    }
}

fn run_identity(ctx: &SuiteContext, kind: IdentityKind) -> Outcome {
    let p = kind.precision();
    let range = format!("exponents < {p}");
    let b = ctx.builder();
    let build = |name: FormName| -> Result<QSeries, forms::FormError> {
        if let Some(s) = ctx.form(name) {
            if s.prec_q() >= p {
                return Ok(s.clone());
            }
        }
        b.build(name, None, p).map(|f| f.series)
    };
    let result: Result<Outcome, forms::FormError> = (|| {
        Ok(match kind {
            IdentityKind::FourMBarPlusFBar => {
                let mbar = build(FormName::MBar)?;
                let fbar = build(FormName::FBar)?;
                identity_outcome(range.clone(), &mbar.scale_int(4).add(&fbar), &QSeries::zero(p * UNIT), p)
            }
            IdentityKind::M2Hurwitz => {
                let m2 = build(FormName::M2)?;
                let expected = QSeries::from_terms_q(
                    (1..).map(|n| (8 * n - 1, hurwitz_class_number((8 * n - 1) as u64)))
                        .take_while(|(e, _)| *e < p),
                    p,
                );
                identity_outcome(range.clone(), &m2, &expected, p)
            }
            IdentityKind::ClassNumberEta => {
                let quotient = eta_quotient(&EtaQuotientSpec::new(&[(16, 6), (8, -3)]), p);
                let expected = QSeries::from_terms_q(
                    (0..p).filter(|n| n % 8 == 3).map(|n| {
                        (
                            n,
                            hurwitz_class_number(n as u64)
                                * Rational::from_integer(BigInt::from(3)),
                        )
                    }),
                    p,
                );
                identity_outcome(range.clone(), &quotient, &expected, p)
            }
            IdentityKind::SptDecomposition => {
                decomposition_outcome(ctx, DecompositionKind::Spt, p, range.clone())
            }
            IdentityKind::QuarterH => {
                decomposition_outcome(ctx, DecompositionKind::SptBar1, p, range.clone())
            }
            IdentityKind::M2Decomposition => {
                decomposition_outcome(ctx, DecompositionKind::M2Spt, p, range.clone())
            }
            IdentityKind::PBarDerivative => {
                let pbar = b.build(FormName::PBar, None, p)?.series;
                let rhs = pbar
                    .mul(&eisenstein_e2(ceil_div(p, 2)).dilate(2).sub(&eisenstein_e2(p)))
                    .scale(&Rational::new(BigInt::one(), BigInt::from(12)));
                identity_outcome(range.clone(), &pbar.q_derivative()?, &rhs, p)
            }
            IdentityKind::RDerivative => {
                let r_form = b.build(FormName::R, None, p)?.series;
                let rhs = r_form
                    .mul(
                        &eisenstein_e2(ceil_div(p, 8))
                            .dilate(8)
                            .sub(&eisenstein_e2(ceil_div(p, 16)).dilate(16).scale_int(4)),
                    )
                    .scale(&Rational::new(BigInt::one(), BigInt::from(3)));
                identity_outcome(range.clone(), &r_form.q_derivative()?, &rhs, p)
            }
        })
    })();
    match result {
        Ok(o) => o,
        Err(e) => Outcome::skipped(range, e.to_string()),
    }
}

fn decomposition_outcome(
    ctx: &SuiteContext,
    kind: DecompositionKind,
    p: i64,
    range: String,
) -> Outcome {
    match forms::m_minus_s_decomposition_with(ctx.builder(), kind, p) {
        Ok(_) => Outcome::verified(p.max(0) as u64, range),
        Err(forms::FormError::DecompositionMismatch { index }) => Outcome::failed(
            0,
            range,
            Failure {
                n: index / UNIT,
                argument: index / UNIT,
                detail: format!("decomposition mismatch at lattice index {index}"),
            },
        ),
        Err(e) => Outcome::skipped(range, e.to_string()),
    }
}

fn run_spt_ladder(ctx: &SuiteContext, ell: u64, m: u32) -> Outcome {
    let l2m = lpow(ell, 2 * m);
    let range = format!("principal part through q^23, pole depth {l2m}");
    let Some(mstar) = ctx.form(FormName::MStar) else {
        return Outcome::skipped(range, "M* not prepared".into());
    };
    let g = match forms::g_lm(mstar, ell, m, 24) {
        Ok(g) => g,
        Err(e) => return Outcome::skipped(range, e.to_string()),
    };
    let chi_m = kronecker(3, ell as i64).pow(m);
    let lm = (ell as i64).pow(m);
    // Everything below q^23 must be exactly the two principal terms.
    let mut expected = vec![
        (-l2m, Rational::from_integer(BigInt::from(lm))),
        (-1, Rational::from_integer(BigInt::from(-chi_m * lm))),
    ];
    expected.sort_by_key(|(e, _)| *e);
    let truncated = g.truncate(23 * UNIT);
    let expected_series = QSeries::from_terms_q(expected, 23);
    match truncated.first_difference(&expected_series) {
        None => Outcome::verified((l2m + 24) as u64, range),
        Some(idx) => {
            let n = idx / UNIT;
            Outcome::failed(
                0,
                range,
                Failure {
                    n,
                    argument: n,
                    detail: format!(
                        "ladder combination has coefficient {} at q^{n}",
                        truncated.coeff_index(idx)
                    ),
                },
            )
        }
    }
}

fn run_over_ladder(ctx: &SuiteContext, ell: u64, m: u32) -> Outcome {
    let l2m = lpow(ell, 2 * m);
    let range = format!("principal part through q^7, pole depth {l2m}");
    let Some(gbar) = ctx.form(FormName::GBar) else {
        return Outcome::skipped(range, "gbar not prepared".into());
    };
    let g = match forms::gbar_lm(gbar, ell, m, 8) {
        Ok(g) => g,
        Err(e) => return Outcome::skipped(range, e.to_string()),
    };
    let lm = (ell as i64).pow(m);
    // l^m q^(-l^(2m)) + O(q^7), supported on 7 mod 8.
    let truncated = g.truncate(7 * UNIT);
    let expected = QSeries::from_terms_q(
        [(-l2m, Rational::from_integer(BigInt::from(lm)))],
        7,
    );
    if let Some(idx) = truncated.first_difference(&expected) {
        let n = idx / UNIT;
        return Outcome::failed(
            0,
            range,
            Failure {
                n,
                argument: n,
                detail: format!(
                    "gbar ladder has coefficient {} at q^{n}",
                    truncated.coeff_index(idx)
                ),
            },
        );
    }
    for (idx, _) in g.terms() {
        let n = idx / UNIT;
        if n.rem_euclid(8) != 7 {
            return Outcome::failed(
                0,
                range,
                Failure {
                    n,
                    argument: n,
                    detail: format!("support leaks off 7 mod 8 at q^{n}"),
                },
            );
        }
    }
    Outcome::verified((l2m + 8) as u64, range)
}

fn run_sturm(ctx: &SuiteContext, family: SturmFamily, ell: u64, m: u32) -> Outcome {
    let l2m = lpow(ell, 2 * m);
    let Some(plan) = sturm_plan(family, ell, m) else {
        return Outcome::skipped(
            format!("eta power {l2m}"),
            format!("guard exceeded: l^(2m) = {l2m} > 700"),
        );
    };
    let range = format!(
        "Sturm bound {}, claimed order {}, weight {}",
        plan.bound,
        plan.order,
        Rational::new(BigInt::from(l2m + 3), BigInt::from(2))
    );
    let h = match family {
        SturmFamily::Spt => {
            let Some(mstar) = ctx.form(FormName::MStar) else {
                return Outcome::skipped(range, "M* not prepared".into());
            };
            forms::h_lm(mstar, ell, m, plan.h_prec_q)
        }
        SturmFamily::Overpartition => {
            let Some(gbar) = ctx.form(FormName::GBar) else {
                return Outcome::skipped(range, "gbar not prepared".into());
            };
            forms::hbar_lm(gbar, ell, m, plan.h_prec_q)
        }
    };
    let h = match h {
        Ok(h) => h,
        Err(e) => {
            // A support violation is a real failure of the certificate, not a
            // configuration problem.
            return Outcome::failed(
                0,
                range,
                Failure {
                    n: 0,
                    argument: 0,
                    detail: format!("support/rescaling precondition failed: {e}"),
                },
            );
        }
    };
    if let Some(min) = h.min_index() {
        if min < 0 {
            return Outcome::failed(
                0,
                range,
                Failure {
                    n: min / UNIT,
                    argument: min / UNIT,
                    detail: "certificate form is not holomorphic at infinity".into(),
                },
            );
        }
    }
    let margin = plan.order - plan.bound;
    if margin <= 0 {
        return Outcome::failed(
            0,
            range,
            Failure {
                n: plan.bound,
                argument: plan.bound,
                detail: format!("claimed order {} does not clear the Sturm bound {}", plan.order, plan.bound),
            },
        );
    }
    // Coefficients up to the Sturm bound and up to the claimed order must both
    // vanish mod l^m; checking through max(bound, order - 1) covers both.
    let through = plan.bound.max(plan.order - 1);
    let reduced = match h.truncate((through + 1) * UNIT).reduce_mod(ell, m) {
        Ok(r) => r,
        Err(e) => return Outcome::skipped(range, e.to_string()),
    };
    if let Some((idx, c)) = reduced.terms().next() {
        let n = idx / UNIT;
        return Outcome::failed(
            0,
            range,
            Failure {
                n,
                argument: n,
                detail: format!("coefficient of q^{n} is {c} mod {ell}^{m}"),
            },
        );
    }
    let mut out = Outcome::verified((through + 1) as u64, range);
    out.scaling = Some(format!("margin {margin}"));
    out
}

fn run_mtilde_alternating(
    ctx: &SuiteContext,
    ell: u64,
    m: u32,
    prec_q: i64,
    use_stilde: bool,
) -> Outcome {
    let range = format!("exponents x < {prec_q}, kronecker(-x, {ell}) = -1");
    let source = if use_stilde {
        let Some(spt) = ctx.stat(StatKind::Spt) else {
            return Outcome::skipped(range, "spt statistic not prepared".into());
        };
        spt.dilate(24).shifted(-UNIT).scale_int(-12)
    } else {
        let Some(mstar) = ctx.form(FormName::MStar) else {
            return Outcome::skipped(range, "M* not prepared".into());
        };
        mstar.clone()
    };
    let required = lpow(ell, 2 * m) * prec_q;
    if source.prec_q() < required {
        return Outcome::skipped(
            range,
            format!(
                "insufficient precision: need q-precision {required}, have {}",
                source.prec_q()
            ),
        );
    }
    let modulus = BigInt::from(ell).pow(m);
    let chi_ell = kronecker(3, ell as i64);
    let mut checked = 0u64;
    let mut x = 23i64;
    while x < prec_q {
        if kronecker(-x, ell as i64) == -1 {
            let mut combo = source.coeff_q(lpow(ell, 2 * m) * x);
            for k in 1..=m {
                let sign = if k % 2 == 1 { -1 } else { 1 };
                let factor = 2 * sign * chi_ell.pow(k);
                combo += source.coeff_q(lpow(ell, 2 * (m - k)) * x)
                    * Rational::from_integer(BigInt::from(factor));
            }
            let r = residue(&combo, &modulus).expect("integral coefficients");
            if !r.is_zero() {
                return Outcome::failed(
                    checked,
                    range,
                    Failure {
                        n: x,
                        argument: x,
                        detail: format!("alternating combination = {r} mod {modulus} at x = {x}"),
                    },
                );
            }
            checked += 1;
        }
        x += 24;
    }
    let mut out = Outcome::verified(checked, range);
    out.scaling = Some(if use_stilde {
        "coefficients taken from -12 S (informational)".into()
    } else {
        "coefficients taken from M* = -12 M".into()
    });
    out
}

fn run_mtilde_step(ctx: &SuiteContext, ell: u64, m: u32, mstar_prec_q: i64) -> Outcome {
    let Some(mstar) = ctx.form(FormName::MStar) else {
        return Outcome::skipped("".into(), "M* not prepared".into());
    };
    if mstar.prec_q() < mstar_prec_q {
        return Outcome::skipped(
            format!("source precision {mstar_prec_q}"),
            format!(
                "insufficient precision: need q-precision {mstar_prec_q}, have {}",
                mstar.prec_q()
            ),
        );
    }
    let x_max = mstar_prec_q / lpow(ell, 2 * m + 1);
    let range = format!("exponents x <= {x_max}");
    let modulus = BigInt::from(ell).pow(m);
    let chi_ell = kronecker(3, ell as i64);
    let mut checked = 0u64;
    for x in 1..=x_max {
        if (lpow(ell, 2 * m + 1) * x).rem_euclid(24) != 23 {
            continue;
        }
        let lhs = mstar.coeff_q(lpow(ell, 2 * m + 1) * x);
        let rhs = mstar.coeff_q(lpow(ell, 2 * m - 1) * x)
            * Rational::from_integer(BigInt::from(chi_ell));
        let r = residue(&(lhs - rhs), &modulus).expect("integral coefficients");
        if !r.is_zero() {
            return Outcome::failed(
                checked,
                range,
                Failure {
                    n: x,
                    argument: lpow(ell, 2 * m + 1) * x,
                    detail: format!("step combination = {r} mod {modulus} at x = {x}"),
                },
            );
        }
        checked += 1;
    }
    let mut out = Outcome::verified(checked, range);
    out.scaling = Some("coefficients taken from M* = -12 M".into());
    out
}

fn run_closure(ctx: &SuiteContext, ell: u64, m: u32, max_argument: i64) -> Outcome {
    let range = format!("arguments <= {max_argument}");
    let (Some(mstar), Some(spt), Some(p)) = (
        ctx.form(FormName::MStar),
        ctx.stat(StatKind::Spt),
        ctx.stat(StatKind::P),
    ) else {
        return Outcome::skipped(range, "sources not prepared".into());
    };
    let l2m = lpow(ell, 2 * m);
    let required = 24 * max_argument;
    if mstar.prec_q() < required {
        return Outcome::skipped(
            range,
            format!(
                "insufficient precision: need q-precision {required}, have {}",
                mstar.prec_q()
            ),
        );
    }
    let chi = CharacterSpec::new(3);
    let mut triple = match HeckeTriple::new(mstar.clone(), ell, chi) {
        Ok(t) => t,
        Err(e) => return Outcome::skipped(range, e.to_string()),
    };
    let f_m = match triple.f_combination(m) {
        Ok(f) => f,
        Err(e) => return Outcome::skipped(range, e.to_string()),
    };
    let modulus = BigInt::from(ell).pow(m);
    let twelve = BigInt::from(12);
    let mut checked = 0u64;
    let mut x = 23i64;
    while l2m * x < 24 * max_argument {
        if kronecker(-x, ell as i64) != 1 {
            x += 24;
            continue;
        }
        let y = l2m * x;
        let arg = (y + 1) / 24;
        let fail = |detail: String, checked: u64| -> Outcome {
            Outcome::failed(
                checked,
                range.clone(),
                Failure {
                    n: x,
                    argument: arg,
                    detail,
                },
            )
        };
        // (1) On this stratum the combination collapses to the deep
        // coefficient: a_m(x) = a_0(l^(2m) x).
        let am = f_m.coeff_q(x);
        let a0_deep = mstar.coeff_q(y);
        if am != a0_deep {
            return fail(format!("a_m({x}) != a_0({y}): {am} vs {a0_deep}"), checked);
        }
        // (2) The combination vanishes mod l^m, so the deep coefficient does.
        let r = residue(&a0_deep, &modulus).expect("integral");
        if !r.is_zero() {
            return fail(format!("mtilde*({y}) = {r} mod {modulus}"), checked);
        }
        // (3) Structural translation back to the statistic:
        // mtilde*(y) = -12 spt(arg) - y p(arg).
        let lhs = a0_deep.clone();
        let rhs = spt.coeff_q(arg) * Rational::from_integer(-twelve.clone())
            - p.coeff_q(arg) * Rational::from_integer(BigInt::from(y));
        if lhs != rhs {
            return fail(format!("mtilde*({y}) != -12 spt({arg}) - {y} p({arg})"), checked);
        }
        // (4) The direct congruence agrees.
        let direct = residue(&spt.coeff_q(arg), &modulus).expect("integral");
        if !direct.is_zero() {
            return fail(format!("spt({arg}) = {direct} mod {modulus}"), checked);
        }
        checked += 1;
        x += 24;
    }
    let mut out = Outcome::verified(checked, range);
    out.scaling = Some("coefficients taken from M* = -12 M".into());
    out
}

// ---------------------------------------------------------------------------
// Suites.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteKind {
    PaperAll,
    Spt,
    Overpartition,
    M2,
    Sturm,
}

impl SuiteKind {
    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::PaperAll => "paper-all",
            SuiteKind::Spt => "spt",
            SuiteKind::Overpartition => "overpartition",
            SuiteKind::M2 => "m2",
            SuiteKind::Sturm => "sturm",
        }
    }

    pub fn parse(s: &str) -> Option<SuiteKind> {
        [
            SuiteKind::PaperAll,
            SuiteKind::Spt,
            SuiteKind::Overpartition,
            SuiteKind::M2,
            SuiteKind::Sturm,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Ranges and filters for a suite run. Defaults match the acceptance ranges.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Cap for classical congruence arguments.
    pub classical_max_arg: i64,
    /// Cap for prime-power spt congruence arguments.
    pub spt_max_arg: i64,
    /// Cap for overpartition congruence arguments.
    pub over_max_arg: i64,
    /// Cap for distinct-odd-parts congruence arguments.
    pub m2_max_arg: i64,
    /// Output precision for eigenform checks.
    pub eigen_prec_q: i64,
    /// Progression-variable cap for the Garvan composite check.
    pub garvan_n_max: i64,
    pub ell_filter: Option<u64>,
    pub m_filter: Option<u32>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            classical_max_arg: 50_000,
            spt_max_arg: 100_000,
            over_max_arg: 50_000,
            m2_max_arg: 50_000,
            eigen_prec_q: 200,
            garvan_n_max: 300,
            ell_filter: None,
            m_filter: None,
        }
    }
}

fn family(
    id: &str,
    source: StatKind,
    map: AffineMap,
    side: Option<i64>,
    comparison: Comparison,
    ell: u64,
    m: u32,
    max_argument: i64,
) -> Claim {
    Claim::Family(CongruenceFamily {
        id: id.to_string(),
        source,
        map,
        side_kronecker: side,
        comparison,
        ell,
        m,
        max_argument,
    })
}

/// The claim catalog of a suite, before ell/m filtering.
pub fn suite_claims(kind: SuiteKind, cfg: &SuiteConfig) -> Vec<Claim> {
    let mut claims = Vec::new();
    match kind {
        SuiteKind::PaperAll => {
            claims.extend(suite_claims(SuiteKind::Spt, cfg));
            claims.extend(suite_claims(SuiteKind::Overpartition, cfg));
            claims.extend(suite_claims(SuiteKind::M2, cfg));
            claims.extend(suite_claims(SuiteKind::Sturm, cfg));
        }
        SuiteKind::Spt => {
            for (ell, d) in [(5u64, 4i64), (7, 5), (13, 6)] {
                claims.push(family(
                    &format!("spt/classical/mod-{ell}"),
                    StatKind::Spt,
                    AffineMap::new(ell as i64, d, 1),
                    None,
                    Comparison::ZeroMod,
                    ell,
                    1,
                    cfg.classical_max_arg,
                ));
            }
            for (ell, m) in [(5u64, 1u32), (7, 1), (11, 1), (13, 1), (5, 2)] {
                claims.push(family(
                    &format!("spt/prime-power/zero/ell-{ell}-m-{m}"),
                    StatKind::Spt,
                    AffineMap::new(lpow(ell, 2 * m), 1, 24),
                    Some(1),
                    Comparison::ZeroMod,
                    ell,
                    m,
                    cfg.spt_max_arg,
                ));
            }
            for ell in [5u64, 7, 11, 13] {
                claims.push(family(
                    &format!("spt/prime-power/step/ell-{ell}"),
                    StatKind::Spt,
                    AffineMap::new(lpow(ell, 3), 1, 24),
                    None,
                    Comparison::Relative {
                        source: StatKind::Spt,
                        map: AffineMap::new(ell as i64, 1, 24),
                        coeff: kronecker(3, ell as i64),
                    },
                    ell,
                    1,
                    cfg.spt_max_arg,
                ));
            }
            // Explicit families from the prime-power congruence at strata
            // with kronecker(-delta, ell) = 1.
            for (ell, add) in [(11u64, 842i64), (17, 2878), (19, 4317)] {
                claims.push(family(
                    &format!("spt/family/mod-{ell}"),
                    StatKind::Spt,
                    AffineMap::new(lpow(ell, 3), add, 1),
                    None,
                    Comparison::ZeroMod,
                    ell,
                    1,
                    cfg.spt_max_arg,
                ));
            }
            // Composite Garvan-style check: spt(125 n + 99) + 5 spt(5 n + 4)
            // vanishes mod 125.
            claims.push(family(
                "spt/garvan/mod-125",
                StatKind::Spt,
                AffineMap::new(125, 99, 1),
                None,
                Comparison::Relative {
                    source: StatKind::Spt,
                    map: AffineMap::new(5, 4, 1),
                    coeff: -5,
                },
                5,
                3,
                125 * cfg.garvan_n_max + 99,
            ));
            for (ell, m, prec_q) in [(5u64, 1u32, 96i64), (5, 2, 96), (7, 1, 200)] {
                claims.push(Claim::HeckeCombination {
                    id: format!("spt/hecke/ell-{ell}-m-{m}"),
                    form: FormName::MStar,
                    char_top: 3,
                    ell,
                    m,
                    prec_q,
                });
            }
            for (ell, m) in [(5u64, 1u32), (5, 2), (7, 1), (7, 2), (11, 1), (11, 2), (13, 1), (13, 2)] {
                claims.push(Claim::SptLadder {
                    id: format!("spt/ladder/ell-{ell}-m-{m}"),
                    ell,
                    m,
                });
            }
            claims.push(Claim::Identity {
                id: "spt/identity/m-minus-s".into(),
                kind: IdentityKind::SptDecomposition,
            });
            for (ell, prec_q) in [(5u64, 2400i64), (7, 1224)] {
                claims.push(Claim::MtildeAlternating {
                    id: format!("spt/mtilde/alternating/ell-{ell}-m-1"),
                    ell,
                    m: 1,
                    prec_q,
                    use_stilde: false,
                });
            }
            claims.push(Claim::MtildeAlternating {
                id: "spt/stilde/alternating/ell-5-m-1".into(),
                ell: 5,
                m: 1,
                prec_q: 2400,
                use_stilde: true,
            });
            claims.push(Claim::MtildeStep {
                id: "spt/mtilde/step/ell-5-m-1".into(),
                ell: 5,
                m: 1,
                mstar_prec_q: 60_000,
            });
            claims.push(Claim::Closure {
                id: "spt/closure/ell-5-m-1".into(),
                ell: 5,
                m: 1,
                max_argument: 2_500,
            });
        }
        SuiteKind::Overpartition => {
            for (ell, m) in [(3u64, 1u32), (3, 2), (5, 1)] {
                claims.push(family(
                    &format!("over/prime-power/zero/ell-{ell}-m-{m}"),
                    StatKind::SptBar1,
                    AffineMap::new(lpow(ell, 2 * m), 0, 1),
                    Some(1),
                    Comparison::ZeroMod,
                    ell,
                    m,
                    cfg.over_max_arg,
                ));
            }
            for ell in [3u64, 5] {
                claims.push(family(
                    &format!("over/prime-power/step/ell-{ell}"),
                    StatKind::SptBar1,
                    AffineMap::new(lpow(ell, 3), 0, 1),
                    None,
                    Comparison::Relative {
                        source: StatKind::SptBar1,
                        map: AffineMap::new(ell as i64, 0, 1),
                        coeff: 1,
                    },
                    ell,
                    1,
                    cfg.over_max_arg,
                ));
            }
            for ell in [3u64, 5, 7] {
                claims.push(Claim::Eigenform {
                    id: format!("over/eigenform/mbar/ell-{ell}"),
                    form: FormName::MBar,
                    ell,
                    prec_q: cfg.eigen_prec_q,
                });
            }
            claims.push(Claim::HeckeCombination {
                id: "over/hecke/mbar/ell-3-m-1".into(),
                form: FormName::MBar,
                char_top: 1,
                ell: 3,
                m: 1,
                prec_q: 200,
            });
            for (ell, m, prec_q) in [(3u64, 1u32, 200i64), (5, 1, 120)] {
                claims.push(Claim::HeckeCombination {
                    id: format!("over/hecke/hbar/ell-{ell}-m-{m}"),
                    form: FormName::HBar,
                    char_top: 1,
                    ell,
                    m,
                    prec_q,
                });
            }
            for (ell, m, prec_q) in [(3u64, 1u32, 500i64), (3, 2, 120), (5, 1, 200)] {
                claims.push(Claim::HeckeCombination {
                    id: format!("over/hecke/gbar/ell-{ell}-m-{m}"),
                    form: FormName::GBar,
                    char_top: 1,
                    ell,
                    m,
                    prec_q,
                });
            }
            claims.push(Claim::Identity {
                id: "over/identity/four-mbar-plus-fbar".into(),
                kind: IdentityKind::FourMBarPlusFBar,
            });
            claims.push(Claim::Identity {
                id: "over/identity/quarter-h".into(),
                kind: IdentityKind::QuarterH,
            });
            claims.push(Claim::Identity {
                id: "over/identity/pbar-derivative".into(),
                kind: IdentityKind::PBarDerivative,
            });
            for (ell, m) in [(3u64, 1u32), (3, 2), (5, 1)] {
                claims.push(Claim::OverLadder {
                    id: format!("over/ladder/ell-{ell}-m-{m}"),
                    ell,
                    m,
                });
            }
        }
        SuiteKind::M2 => {
            for (ell, m) in [(3u64, 1u32), (3, 2), (5, 1)] {
                claims.push(family(
                    &format!("m2/prime-power/zero/ell-{ell}-m-{m}"),
                    StatKind::M2Spt,
                    AffineMap::new(lpow(ell, 2 * m), 1, 8),
                    Some(1),
                    Comparison::ZeroMod,
                    ell,
                    m,
                    cfg.m2_max_arg,
                ));
            }
            for ell in [3u64, 5] {
                claims.push(family(
                    &format!("m2/prime-power/step/ell-{ell}"),
                    StatKind::M2Spt,
                    AffineMap::new(lpow(ell, 3), 1, 8),
                    None,
                    Comparison::Relative {
                        source: StatKind::M2Spt,
                        map: AffineMap::new(ell as i64, 1, 8),
                        coeff: kronecker(2, ell as i64),
                    },
                    ell,
                    1,
                    cfg.m2_max_arg,
                ));
            }
            for ell in [3u64, 5, 7] {
                claims.push(Claim::Eigenform {
                    id: format!("m2/eigenform/m2/ell-{ell}"),
                    form: FormName::M2,
                    ell,
                    prec_q: cfg.eigen_prec_q,
                });
            }
            claims.push(Claim::Eigenform {
                id: "m2/eigenform/zagier/ell-3".into(),
                form: FormName::ZagierH,
                ell: 3,
                prec_q: cfg.eigen_prec_q,
            });
            for (ell, m, prec_q) in [(3u64, 1u32, 200i64), (3, 2, 120)] {
                claims.push(Claim::HeckeCombination {
                    id: format!("m2/hecke/m2/ell-{ell}-m-{m}"),
                    form: FormName::M2,
                    char_top: 1,
                    ell,
                    m,
                    prec_q,
                });
            }
            claims.push(Claim::Identity {
                id: "m2/identity/hurwitz".into(),
                kind: IdentityKind::M2Hurwitz,
            });
            claims.push(Claim::Identity {
                id: "m2/identity/class-number-eta".into(),
                kind: IdentityKind::ClassNumberEta,
            });
            claims.push(Claim::Identity {
                id: "m2/identity/m2-decomposition".into(),
                kind: IdentityKind::M2Decomposition,
            });
            claims.push(Claim::Identity {
                id: "m2/identity/r-derivative".into(),
                kind: IdentityKind::RDerivative,
            });
        }
        SuiteKind::Sturm => {
            for (ell, m) in [(5u64, 1u32), (7, 1)] {
                claims.push(Claim::Sturm {
                    id: format!("sturm/spt/ell-{ell}-m-{m}"),
                    family: SturmFamily::Spt,
                    ell,
                    m,
                });
            }
            for (ell, m) in [(3u64, 1u32), (3, 2), (5, 1)] {
                claims.push(Claim::Sturm {
                    id: format!("sturm/over/ell-{ell}-m-{m}"),
                    family: SturmFamily::Overpartition,
                    ell,
                    m,
                });
            }
        }
    }
    claims.retain(|c| {
        let (ell, m) = c.ell_m();
        cfg.ell_filter.map_or(true, |f| ell == Some(f))
            && cfg.m_filter.map_or(true, |f| m == Some(f))
    });
    claims
}

/// Run claims against a prepared context, in parallel when `jobs != Some(1)`,
/// and return reports sorted by claim id.
pub fn run_claims(
    ctx: &SuiteContext,
    claims: &[Claim],
    jobs: Option<usize>,
) -> Vec<VerificationReport> {
    let mut reports = match jobs {
        Some(1) => claims.iter().map(|c| c.run(ctx)).collect::<Vec<_>>(),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("thread pool")
            .install(|| claims.par_iter().map(|c| c.run(ctx)).collect()),
        None => claims.par_iter().map(|c| c.run(ctx)).collect(),
    };
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    reports
}

/// Prepare a context and run a whole suite.
pub fn run_suite(
    kind: SuiteKind,
    cfg: &SuiteConfig,
    cache: Option<&dyn SeriesCache>,
    jobs: Option<usize>,
) -> Vec<VerificationReport> {
    let claims = suite_claims(kind, cfg);
    let ctx = SuiteContext::prepare(&claims, cache);
    run_claims(&ctx, &claims, jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn small_cfg() -> SuiteConfig {
        SuiteConfig {
            classical_max_arg: 2_000,
            spt_max_arg: 4_000,
            over_max_arg: 2_000,
            m2_max_arg: 2_000,
            eigen_prec_q: 40,
            garvan_n_max: 10,
            ell_filter: None,
            m_filter: None,
        }
    }

    #[test]
    fn affine_map_filters_divisibility() {
        let m = AffineMap::new(25, 1, 24);
        assert_eq!(m.apply(23), Some(24));
        assert_eq!(m.apply(24), None);
        assert_eq!(m.apply(47), Some(49));
    }

    #[test]
    fn classical_family_small_range() {
        let claim = family(
            "spt/classical/mod-5",
            StatKind::Spt,
            AffineMap::new(5, 4, 1),
            None,
            Comparison::ZeroMod,
            5,
            1,
            500,
        );
        let ctx = SuiteContext::prepare(std::slice::from_ref(&claim), None);
        let report = claim.run(&ctx);
        assert_eq!(report.status, Status::Verified);
        assert_eq!(report.checked, 100);
    }

    #[test]
    fn family_counterexample_is_detected_and_replayable() {
        // spt(5n + 3) = 0 mod 5 is false; the first offender should be found
        // and re-verifiable.
        let claim = family(
            "bogus/mod-5",
            StatKind::Spt,
            AffineMap::new(5, 3, 1),
            None,
            Comparison::ZeroMod,
            5,
            1,
            500,
        );
        let ctx = SuiteContext::prepare(std::slice::from_ref(&claim), None);
        let report = claim.run(&ctx);
        assert_eq!(report.status, Status::Counterexample);
        let failure = report.first_failure.unwrap();
        // Replay: the same claim at the failing index still fails.
        let spt = ctx.stat(StatKind::Spt).unwrap();
        let r = spt.coeff_q(failure.argument).to_integer().mod_floor(&BigInt::from(5));
        assert!(!r.is_zero(), "replayed failure must still fail");
    }

    #[test]
    fn eigenform_claim_runs() {
        let claim = Claim::Eigenform {
            id: "m2/eigenform/m2/ell-3".into(),
            form: FormName::M2,
            ell: 3,
            prec_q: 40,
        };
        let ctx = SuiteContext::prepare(std::slice::from_ref(&claim), None);
        let report = claim.run(&ctx);
        assert_eq!(report.status, Status::Verified, "{:?}", report.first_failure);
    }

    #[test]
    fn hecke_combination_claim_runs() {
        let claim = Claim::HeckeCombination {
            id: "spt/hecke/ell-5-m-1".into(),
            form: FormName::MStar,
            char_top: 3,
            ell: 5,
            m: 1,
            prec_q: 48,
        };
        let ctx = SuiteContext::prepare(std::slice::from_ref(&claim), None);
        let report = claim.run(&ctx);
        assert_eq!(report.status, Status::Verified, "{:?}", report.first_failure);
        assert!(report.scaling.is_some());
    }

    #[test]
    fn sturm_certificates_small() {
        for (family, ell, m) in [
            (SturmFamily::Spt, 5u64, 1u32),
            (SturmFamily::Overpartition, 3, 1),
        ] {
            let claim = Claim::Sturm {
                id: format!("sturm/x/ell-{ell}-m-{m}"),
                family,
                ell,
                m,
            };
            let ctx = SuiteContext::prepare(std::slice::from_ref(&claim), None);
            let report = claim.run(&ctx);
            assert_eq!(report.status, Status::Verified, "{:?}", report.first_failure);
            assert_eq!(report.scaling.as_deref(), Some("margin 1"));
        }
    }

    #[test]
    fn sturm_guard_skips_oversized_eta_powers() {
        let claim = Claim::Sturm {
            id: "sturm/spt/ell-29-m-1".into(),
            family: SturmFamily::Spt,
            ell: 29,
            m: 1,
        };
        let ctx = SuiteContext::prepare(&[], None);
        let report = claim.run(&ctx);
        assert_eq!(report.status, Status::Skipped);
    }

    #[test]
    fn identity_claims_run_at_reduced_scale() {
        for kind in [
            IdentityKind::ClassNumberEta,
            IdentityKind::PBarDerivative,
            IdentityKind::RDerivative,
        ] {
            let claim = Claim::Identity {
                id: format!("test/{kind:?}"),
                kind,
            };
            let ctx = SuiteContext::prepare(std::slice::from_ref(&claim), None);
            let report = claim.run(&ctx);
            assert_eq!(report.status, Status::Verified, "{kind:?}: {:?}", report.first_failure);
        }
    }

    #[test]
    fn reports_serialize_deterministically() {
        let claim = family(
            "spt/classical/mod-5",
            StatKind::Spt,
            AffineMap::new(5, 4, 1),
            None,
            Comparison::ZeroMod,
            5,
            1,
            200,
        );
        let ctx = SuiteContext::prepare(std::slice::from_ref(&claim), None);
        let a = reports_to_json(&run_claims(&ctx, std::slice::from_ref(&claim), Some(1)), 0);
        let b = reports_to_json(&run_claims(&ctx, std::slice::from_ref(&claim), Some(2)), 0);
        assert_eq!(a["claims"], b["claims"]);
    }

    #[test]
    fn suite_filters_by_ell() {
        let mut cfg = small_cfg();
        cfg.ell_filter = Some(7);
        let claims = suite_claims(SuiteKind::Spt, &cfg);
        assert!(!claims.is_empty());
        for c in &claims {
            assert_eq!(c.ell_m().0, Some(7), "claim {}", c.id());
        }
    }

    #[test]
    fn spt_suite_small_ranges_all_verify() {
        let mut cfg = small_cfg();
        // Keep the heavyweight spt claims off this smoke run.
        cfg.spt_max_arg = 3_000;
        let claims: Vec<Claim> = suite_claims(SuiteKind::Spt, &cfg)
            .into_iter()
            .filter(|c| {
                !matches!(c, Claim::SptLadder { ell, m, .. } if lpow(*ell, 2 * m) > 49)
            })
            .collect();
        let ctx = SuiteContext::prepare(&claims, None);
        let reports = run_claims(&ctx, &claims, None);
        for r in &reports {
            assert!(
                r.passed(),
                "claim {} failed: {:?} {:?}",
                r.id,
                r.status,
                r.first_failure
            );
            assert_ne!(r.status, Status::Skipped, "claim {} skipped", r.id);
        }
    }
}
