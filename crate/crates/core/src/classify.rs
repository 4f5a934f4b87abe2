//! Verdict engine: semigroup tests, grid-based CP-divisibility and eternal
//! non-Markovianity certificates, and the closed-form dephasing predicate.
//!
//! Grid verdicts certify the sampled window only; the verdict records
//! `[t1, T]`. Closed-form predicates carry the unbounded claim.

use serde_json::json;

use crate::dynamics::{DynamicsError, MapRule, ProbabilityProfile, RateTable, TimeGrid};
use crate::phase_space::{PhasePoint, SubgroupHnf};
use crate::weyl::superoperator;

/// Default tolerance for rate-sign decisions: rates are O(c), so this is far
/// below double-precision formula noise.
pub const DEFAULT_RATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    MarkovianSemigroup,
    CPDivisible,
    NonMarkovian,
    EternallyNonMarkovian,
}

impl VerdictKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictKind::MarkovianSemigroup => "MarkovianSemigroup",
            VerdictKind::CPDivisible => "CPDivisible",
            VerdictKind::NonMarkovian => "NonMarkovian",
            VerdictKind::EternallyNonMarkovian => "EternallyNonMarkovian",
        }
    }
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub alpha: PhasePoint,
    pub t: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovVerdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    pub window: (f64, f64),
}

impl MarkovVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        let witness = match &self.witness {
            Some(w) => json!({
                "alpha": [w.alpha.i(), w.alpha.j()],
                "t": w.t,
                "gamma": w.gamma,
            }),
            None => serde_json::Value::Null,
        };
        json!({
            "verdict": self.kind.as_str(),
            "witness": witness,
            "window": [self.window.0, self.window.1],
        })
    }
}

/// True iff the profile is the exact Markovian-semigroup profile for an
/// isotropic map on `G`: exponential with amplitude `(|G|-1)/|G|` and
/// positive rate.
pub fn check_semigroup_form(g: &SubgroupHnf, profile: &ProbabilityProfile) -> bool {
    let order = g.order();
    if order < 2 {
        return false;
    }
    match profile {
        ProbabilityProfile::Exponential { r, c } => {
            let target = (order - 1) as f64 / order as f64;
            (r - target).abs() <= 1e-12 && *c > 0.0
        }
        ProbabilityProfile::Tabulated { .. } => false,
    }
}

/// Max-norm of `S(t+s) - S(t) S(s)` for the rule's superoperators.
pub fn semigroup_residual(rule: &MapRule, t: f64, s: f64) -> f64 {
    let big = superoperator(&rule.weights_at(t + s));
    let left = superoperator(&rule.weights_at(t));
    let right = superoperator(&rule.weights_at(s));
    big.max_norm_diff(&left.compose(&right))
}

/// Searches for two phase points whose map eigenvalues `1 - beta_v p` decay
/// with distinct nonzero coefficients `beta_v = 1 - sum_u w_u omega^{u ^ v}`.
/// Such a pair certifies that no single scalar `p(t)` can produce a
/// semigroup (the eigenvalues would need two different exponential laws).
pub fn anisotropic_obstruction(
    d: u64,
    weights: &[(PhasePoint, f64)],
) -> Option<(PhasePoint, PhasePoint)> {
    let betas: Vec<(PhasePoint, num_complex::Complex64)> = PhasePoint::all(d)
        .map(|v| {
            let char_sum: num_complex::Complex64 = weights
                .iter()
                .map(|(u, w)| {
                    crate::weyl::omega_pow(
                        d,
                        crate::phase_space::symplectic_product(u, &v).unwrap() as i64,
                    ) * *w
                })
                .sum();
            (v, num_complex::Complex64::new(1.0, 0.0) - char_sum)
        })
        .collect();
    for (i, (a, ba)) in betas.iter().enumerate() {
        if ba.norm() <= 1e-10 {
            continue;
        }
        for (b, bb) in betas.iter().skip(i + 1) {
            if bb.norm() > 1e-10 && (ba - bb).norm() > 1e-10 {
                return Some((*a, *b));
            }
        }
    }
    None
}

fn collect_tables(
    rates: impl Fn(f64) -> Result<RateTable, DynamicsError>,
    grid: &TimeGrid,
) -> Result<Vec<RateTable>, DynamicsError> {
    grid.points().iter().map(|&t| rates(t)).collect()
}

fn grade_tables(tables: &[RateTable], grid: &TimeGrid, tol: f64) -> MarkovVerdict {
    let window = grid.window();
    let d = tables[0].dim();
    // First sign violation in (time, channel-index) order.
    for (table, &t) in tables.iter().zip(grid.points()) {
        for alpha in 1..d * d {
            let gamma = table.get_index(alpha);
            if gamma < -tol {
                return MarkovVerdict {
                    kind: VerdictKind::NonMarkovian,
                    witness: Some(Witness {
                        alpha: PhasePoint::from_single_index(alpha, d),
                        t,
                        gamma,
                    }),
                    window,
                };
            }
        }
    }
    // All nonnegative; constant per channel upgrades to a semigroup.
    let constant = (1..d * d).all(|alpha| {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for table in tables {
            let g = table.get_index(alpha);
            lo = lo.min(g);
            hi = hi.max(g);
        }
        hi - lo < tol
    });
    MarkovVerdict {
        kind: if constant {
            VerdictKind::MarkovianSemigroup
        } else {
            VerdictKind::CPDivisible
        },
        witness: None,
        window,
    }
}

/// Grades the rate sign pattern on the grid: `CPDivisible` when all
/// `gamma_alpha(t) >= -tol`, upgraded to `MarkovianSemigroup` when each
/// channel is additionally constant; otherwise `NonMarkovian` with the
/// first violating `(alpha, t)` as witness.
pub fn cp_divisible_on_grid(
    rates: impl Fn(f64) -> Result<RateTable, DynamicsError>,
    grid: &TimeGrid,
    tol: f64,
) -> Result<MarkovVerdict, DynamicsError> {
    let tables = collect_tables(rates, grid)?;
    Ok(grade_tables(&tables, grid, tol))
}

/// `EternallyNonMarkovian` when some channel is below `-tol` at every grid
/// point and its rate vanishes in the `t -> 0+` limit (probed at `t=1e-9`);
/// otherwise delegates to the CP-divisibility grading.
pub fn enm_on_grid(
    rates: impl Fn(f64) -> Result<RateTable, DynamicsError>,
    grid: &TimeGrid,
    tol: f64,
) -> Result<MarkovVerdict, DynamicsError> {
    let tables = collect_tables(&rates, grid)?;
    let d = tables[0].dim();
    let window = grid.window();
    let limit = rates(1e-9)?;
    for alpha in 1..d * d {
        let eternal = tables.iter().all(|table| table.get_index(alpha) < -tol)
            && limit.get_index(alpha).abs() < 1e-8;
        if eternal {
            return Ok(MarkovVerdict {
                kind: VerdictKind::EternallyNonMarkovian,
                witness: Some(Witness {
                    alpha: PhasePoint::from_single_index(alpha, d),
                    t: grid.points()[0],
                    gamma: tables[0].get_index(alpha),
                }),
                window,
            });
        }
    }
    Ok(grade_tables(&tables, grid, tol))
}

/// Closed-form eternal-non-Markovianity test for the dephasing family
/// `p(t) = r (1 - e^{-ct})` on `<u>` of order `l`.
///
/// The rate on channel `y u` is `p_dot (-B)^{y-1} A^{l-1-y} / (A^l - (-B)^l)`
/// with `A = 1-p`, `B = p`, so a channel with even `y` is negative for all
/// `t > 0` whenever the denominator stays positive. That happens for every
/// odd `l >= 3` (denominator `A^l + B^l > 0`), and for even `l` when
/// `r <= 1/2` keeps `A > B`. Even `l` needs an even `y <= l-1`, i.e.
/// `l >= 4`: for `l = 2` the only channel has `y = 1` and stays positive,
/// so order-2 dephasing is never eternally non-Markovian.
pub fn enm_dephasing_predicate(u: &PhasePoint, r: f64) -> Result<bool, DynamicsError> {
    if u.is_identity() {
        return Err(DynamicsError::InvalidInput("dephasing point must be nonzero".into()));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(DynamicsError::InvalidInput(format!("amplitude r={r} outside (0, 1]")));
    }
    let ell = u.cyclic_order()?;
    Ok((ell >= 3 && ell % 2 == 1) || (ell >= 4 && ell % 2 == 0 && r <= 0.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParitySummary {
    /// Every non-identity element has odd order >= 3.
    EnmConstituents,
    /// Every non-identity element has even order.
    NonEnmConstituents,
    /// Both parities occur (possible for composite d).
    Mixed,
}

impl std::fmt::Display for ParitySummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ParitySummary::EnmConstituents => "ENMConstituents",
            ParitySummary::NonEnmConstituents => "NonENMConstituents",
            ParitySummary::Mixed => "Mixed",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Theorem1Report {
    /// `(u, order of u)` for each non-identity element of the subgroup.
    pub elements: Vec<(PhasePoint, u64)>,
    pub summary: ParitySummary,
}

/// Per-element order/parity breakdown for a subgroup of order >= 3.
pub fn theorem1_case(g: &SubgroupHnf) -> Result<Theorem1Report, DynamicsError> {
    if g.order() < 3 {
        return Err(DynamicsError::InvalidInput("report needs |G| >= 3".into()));
    }
    let mut elements = Vec::new();
    let (mut any_odd, mut any_even) = (false, false);
    for u in g.elements() {
        if u.is_identity() {
            continue;
        }
        let ell = u.cyclic_order()?;
        if ell % 2 == 1 {
            any_odd = true;
        } else {
            any_even = true;
        }
        elements.push((u, ell));
    }
    let summary = match (any_odd, any_even) {
        (true, false) => ParitySummary::EnmConstituents,
        (false, true) => ParitySummary::NonEnmConstituents,
        _ => ParitySummary::Mixed,
    };
    Ok(Theorem1Report { elements, summary })
}
