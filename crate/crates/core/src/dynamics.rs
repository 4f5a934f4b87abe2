//! Time-dependent machinery: mixing profiles `p(t)`, map eigenvalues
//! `lambda_v(t)`, generator eigenvalues `mu_v(t) = d/dt ln(lambda_v)`, and
//! decay rates `gamma_alpha(t)` via the inverse symplectic Fourier transform
//! and via closed forms.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase_space::{symplectic_product, PhasePoint, PhaseSpaceError, SubgroupHnf};
use crate::weyl::{omega_pow, WeylMapSpec};

/// Maps with any `|lambda_v|` at or below this are treated as noninvertible.
pub const INVERTIBILITY_THRESHOLD: f64 = 1e-10;

/// Largest imaginary residue tolerated when reporting a rate as real.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("map not invertible at t={t}: |lambda_({i},{j})| = {magnitude:.3e}")]
    Noninvertible { i: u64, j: u64, t: f64, magnitude: f64 },
    #[error("rate at alpha={alpha} has imaginary residue {residue:.3e}")]
    NonRealRate { alpha: u64, residue: f64 },
    #[error("singular denominator in {what} at t={t}")]
    Singularity { what: String, t: f64 },
    #[error("channel index y={y} outside [1, {order})")]
    IndexOutOfRange { y: u64, order: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    PhaseSpace(#[from] PhaseSpaceError),
}

/// The time-dependent mixing function `p(t)` with `p(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProbabilityProfile {
    /// `p(t) = r (1 - e^{-c t})` with analytic derivative.
    Exponential { r: f64, c: f64 },
    /// Piecewise-linear samples; derivative by central difference.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl ProbabilityProfile {
    pub fn exponential(r: f64, c: f64) -> Result<Self, DynamicsError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(DynamicsError::InvalidInput(format!(
                "amplitude r={r} outside [0, 1]"
            )));
        }
        if c <= 0.0 {
            return Err(DynamicsError::InvalidInput(format!("rate c={c} must be positive")));
        }
        Ok(ProbabilityProfile::Exponential { r, c })
    }

    pub fn tabulated(times: Vec<f64>, values: Vec<f64>) -> Result<Self, DynamicsError> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(DynamicsError::InvalidInput(
                "tabulated profile needs >= 2 aligned samples".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DynamicsError::InvalidInput(
                "tabulated times must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(DynamicsError::InvalidInput("p(t) must stay in [0, 1]".into()));
        }
        Ok(ProbabilityProfile::Tabulated { times, values })
    }

    pub fn p(&self, t: f64) -> f64 {
        match self {
            ProbabilityProfile::Exponential { r, c } => r * (1.0 - (-c * t).exp()),
            ProbabilityProfile::Tabulated { times, values } => interp(times, values, t),
        }
    }

    pub fn p_dot(&self, t: f64) -> f64 {
        match self {
            ProbabilityProfile::Exponential { r, c } => r * c * (-c * t).exp(),
            ProbabilityProfile::Tabulated { times, values } => {
                let h = 1e-6 * t.abs().max(1.0);
                (interp(times, values, t + h) - interp(times, values, t - h)) / (2.0 * h)
            }
        }
    }
}

fn interp(times: &[f64], values: &[f64], t: f64) -> f64 {
    if t <= times[0] {
        return values[0];
    }
    if t >= *times.last().unwrap() {
        return *values.last().unwrap();
    }
    let idx = times.partition_point(|&x| x < t);
    let (t0, t1) = (times[idx - 1], times[idx]);
    let (v0, v1) = (values[idx - 1], values[idx]);
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// Evaluation grid; `log_spaced` is the default window for rate scans.
#[derive(Debug, Clone)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn log_spaced(t_min: f64, t_max: f64, n: usize) -> Result<Self, DynamicsError> {
        if t_min <= 0.0 || t_max <= t_min || n < 2 {
            return Err(DynamicsError::InvalidInput(format!(
                "bad log grid: t_min={t_min}, t_max={t_max}, n={n}"
            )));
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        Ok(TimeGrid {
            points: (0..n)
                .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
                .collect(),
        })
    }

    pub fn linear_spaced(t_min: f64, t_max: f64, n: usize) -> Result<Self, DynamicsError> {
        if t_max <= t_min || n < 2 {
            return Err(DynamicsError::InvalidInput(format!(
                "bad linear grid: t_min={t_min}, t_max={t_max}, n={n}"
            )));
        }
        Ok(TimeGrid {
            points: (0..n)
                .map(|k| t_min + (t_max - t_min) * k as f64 / (n - 1) as f64)
                .collect(),
        })
    }

    /// 64 log-spaced points on `[1e-3, 10]`.
    pub fn default_grid() -> Self {
        TimeGrid::log_spaced(1e-3, 10.0, 64).unwrap()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn window(&self) -> (f64, f64) {
        (self.points[0], *self.points.last().unwrap())
    }
}

/// A Weyl map family `p_0(t) = 1 - p(t)`, `p_u(t) = p(t) w_u` for a fixed
/// normalized weight distribution `w` over nonzero phase points.
#[derive(Debug, Clone)]
pub struct MapRule {
    d: u64,
    support: Vec<(PhasePoint, f64)>,
    profile: ProbabilityProfile,
}

impl MapRule {
    pub fn new(
        d: u64,
        support: Vec<(PhasePoint, f64)>,
        profile: ProbabilityProfile,
    ) -> Result<Self, DynamicsError> {
        let mut total = 0.0;
        for (u, w) in &support {
            if u.dim() != d {
                return Err(DynamicsError::InvalidInput(format!(
                    "support point {u} has dimension {}, expected {d}",
                    u.dim()
                )));
            }
            if u.is_identity() {
                return Err(DynamicsError::InvalidInput(
                    "support must not contain the identity point".into(),
                ));
            }
            if *w < 0.0 {
                return Err(DynamicsError::InvalidInput(format!("negative weight at {u}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(DynamicsError::InvalidInput(format!(
                "support weights sum to {total}, expected 1"
            )));
        }
        Ok(MapRule { d, support, profile })
    }

    /// Dephasing map `(1-p) rho + p U_u rho U_u^dag`.
    pub fn dephasing(u: PhasePoint, profile: ProbabilityProfile) -> Result<Self, DynamicsError> {
        if u.is_identity() {
            return Err(DynamicsError::InvalidInput(
                "dephasing point must be nonzero".into(),
            ));
        }
        MapRule::new(u.dim(), vec![(u, 1.0)], profile)
    }

    /// Isotropic map with uniform weights `1/(|G|-1)` over `G \ {0}`.
    pub fn isotropic(g: &SubgroupHnf, profile: ProbabilityProfile) -> Result<Self, DynamicsError> {
        let order = g.order();
        if order < 2 {
            return Err(DynamicsError::InvalidInput(
                "isotropic map needs |G| >= 2".into(),
            ));
        }
        let w = 1.0 / (order - 1) as f64;
        let support = g
            .elements()
            .into_iter()
            .filter(|u| !u.is_identity())
            .map(|u| (u, w))
            .collect();
        MapRule::new(g.d, support, profile)
    }

    pub fn dim(&self) -> u64 {
        self.d
    }

    pub fn profile(&self) -> &ProbabilityProfile {
        &self.profile
    }

    pub fn support(&self) -> &[(PhasePoint, f64)] {
        &self.support
    }

    /// Snapshot of the weights at time `t` as a static map spec.
    pub fn weights_at(&self, t: f64) -> WeylMapSpec {
        let p = self.profile.p(t);
        let mut weights = vec![(PhasePoint::identity(self.d), 1.0 - p)];
        weights.extend(self.support.iter().map(|(u, w)| (*u, p * w)));
        WeylMapSpec::new(self.d, weights).expect("rule weights are normalized by construction")
    }

    /// Character sum `sum_u w_u omega^{u ^ v}` over the support.
    fn char_sum(&self, v: &PhasePoint) -> C64 {
        self.support
            .iter()
            .map(|(u, w)| omega_pow(self.d, symplectic_product(u, v).unwrap() as i64) * *w)
            .sum()
    }

    /// `lambda_v(t) = 1 - p(t) + p(t) sum_u w_u omega^{u ^ v}`.
    pub fn eigenvalue(&self, v: &PhasePoint, t: f64) -> C64 {
        let p = self.profile.p(t);
        C64::new(1.0 - p, 0.0) + self.char_sum(v) * p
    }

    pub fn eigenvalue_dot(&self, v: &PhasePoint, t: f64) -> C64 {
        (self.char_sum(v) - 1.0) * self.profile.p_dot(t)
    }

    /// `mu_v(t) = lambda_dot_v / lambda_v`; errors when the map is not
    /// invertible at `t`.
    pub fn generator_eigenvalue(&self, v: &PhasePoint, t: f64) -> Result<C64, DynamicsError> {
        let lambda = self.eigenvalue(v, t);
        if lambda.norm() <= INVERTIBILITY_THRESHOLD {
            return Err(DynamicsError::Noninvertible {
                i: v.i(),
                j: v.j(),
                t,
                magnitude: lambda.norm(),
            });
        }
        Ok(self.eigenvalue_dot(v, t) / lambda)
    }

    /// All decay rates at time `t` via the inverse symplectic Fourier
    /// transform of the generator eigenvalues.
    pub fn decay_rates(&self, t: f64) -> Result<RateTable, DynamicsError> {
        let d = self.d;
        let mut mu = Vec::with_capacity((d * d) as usize);
        for v in PhasePoint::all(d) {
            mu.push(self.generator_eigenvalue(&v, t)?);
        }
        let scale = 1.0 / (d * d) as f64;
        let mut rates = vec![0.0; (d * d) as usize];
        for alpha in PhasePoint::all(d).skip(1) {
            let mut acc = C64::new(0.0, 0.0);
            for (v, m) in PhasePoint::all(d).zip(&mu) {
                let phase = symplectic_product(&alpha, &v).unwrap() as i64;
                acc += omega_pow(d, -phase) * *m;
            }
            acc *= scale;
            if acc.im.abs() > IMAG_RESIDUE_TOL {
                return Err(DynamicsError::NonRealRate {
                    alpha: alpha.single_index(),
                    residue: acc.im.abs(),
                });
            }
            rates[alpha.single_index() as usize] = acc.re;
        }
        Ok(RateTable { d, t, rates })
    }
}

/// Decay rates at one time, indexed by `alpha = d*i + j`; the identity
/// channel entry is fixed at zero.
#[derive(Debug, Clone)]
pub struct RateTable {
    d: u64,
    t: f64,
    rates: Vec<f64>,
}

impl RateTable {
    pub fn zero(d: u64, t: f64) -> Self {
        RateTable {
            d,
            t,
            rates: vec![0.0; (d * d) as usize],
        }
    }

    pub fn from_rates(d: u64, t: f64, rates: Vec<f64>) -> Self {
        assert_eq!(rates.len(), (d * d) as usize);
        RateTable { d, t, rates }
    }

    pub fn dim(&self) -> u64 {
        self.d
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn get(&self, alpha: &PhasePoint) -> f64 {
        self.rates[alpha.single_index() as usize]
    }

    pub fn get_index(&self, alpha: u64) -> f64 {
        self.rates[alpha as usize]
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn min_rate(&self) -> (u64, f64) {
        self.rates
            .iter()
            .enumerate()
            .map(|(i, &g)| (i as u64, g))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    }
}

/// CSV trace of `gamma_alpha(t)` over a grid: header
/// `t,gamma_0,...,gamma_{d^2-1}`, one row per time, 12 significant digits.
pub fn rate_trace_csv(rule: &MapRule, grid: &TimeGrid) -> Result<String, DynamicsError> {
    rate_trace_csv_with(rule.dim(), grid, |t| rule.decay_rates(t))
}

/// Same CSV format fed by an arbitrary rate source (e.g. closed forms).
pub fn rate_trace_csv_with(
    d: u64,
    grid: &TimeGrid,
    rates: impl Fn(f64) -> Result<RateTable, DynamicsError>,
) -> Result<String, DynamicsError> {
    let mut out = String::from("t");
    for alpha in 0..d * d {
        out.push_str(&format!(",gamma_{alpha}"));
    }
    out.push('\n');
    for &t in grid.points() {
        let table = rates(t)?;
        out.push_str(&format!("{t:.11e}"));
        for alpha in 0..d * d {
            out.push_str(&format!(",{:.11e}", table.get_index(alpha)));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Closed-form dephasing rate on the cyclic subgroup `<u>` of order `l`,
/// at channel `alpha = y*u`:
/// `gamma_y = p_dot (-B)^{y-1} A^{l-1-y} / (A^l - (-B)^l)` with
/// `A = 1 - p(t)`, `B = p(t)`.
pub fn dephasing_rate_closed_form(
    u: &PhasePoint,
    y: u64,
    profile: &ProbabilityProfile,
    t: f64,
) -> Result<f64, DynamicsError> {
    let ell = u.cyclic_order()?;
    if y == 0 || y >= ell {
        return Err(DynamicsError::IndexOutOfRange { y, order: ell });
    }
    let a = 1.0 - profile.p(t);
    let b = profile.p(t);
    let denom = a.powi(ell as i32) - (-b).powi(ell as i32);
    if denom.abs() < 1e-12 {
        return Err(DynamicsError::Singularity {
            what: "dephasing rate denominator A^l - (-B)^l".into(),
            t,
        });
    }
    Ok(profile.p_dot(t) * (-b).powi(y as i32 - 1) * a.powi((ell - 1 - y) as i32) / denom)
}

/// Closed-form isotropic rates: `gamma = -(1/|G|) Lambda_dot / Lambda` on
/// `G \ {0}` with `Lambda = 1 - |G| p / (|G|-1)`, zero elsewhere.
pub fn isotropic_rate_closed_form(
    g: &SubgroupHnf,
    profile: &ProbabilityProfile,
    t: f64,
) -> Result<RateTable, DynamicsError> {
    let order = g.order();
    if order < 2 {
        return Err(DynamicsError::InvalidInput(
            "isotropic closed form needs |G| >= 2".into(),
        ));
    }
    let ratio = order as f64 / (order - 1) as f64;
    let lambda = 1.0 - ratio * profile.p(t);
    if lambda.abs() <= INVERTIBILITY_THRESHOLD {
        return Err(DynamicsError::Singularity {
            what: "isotropic eigenvalue Lambda".into(),
            t,
        });
    }
    let lambda_dot = -ratio * profile.p_dot(t);
    let gamma = -(lambda_dot / lambda) / order as f64;
    let mut rates = vec![0.0; (g.d * g.d) as usize];
    for u in g.elements() {
        if !u.is_identity() {
            rates[u.single_index() as usize] = gamma;
        }
    }
    Ok(RateTable { d: g.d, t, rates })
}

/// Residual of the partial-fraction identity
/// `1/(A + B z) = sum_m (-B)^m A^{n-1-m} z^m / (A^n - (-B)^n)` for `z^n = 1`.
pub fn polynomial_identity_check(
    a: f64,
    b: f64,
    z: C64,
    n: u32,
) -> Result<f64, DynamicsError> {
    if (z.powu(n) - 1.0).norm() > 1e-12 {
        return Err(DynamicsError::InvalidInput(format!("z^{n} != 1")));
    }
    let lhs_denom = a + b * z;
    if lhs_denom.norm() < 1e-14 {
        return Err(DynamicsError::Singularity {
            what: "A + B z".into(),
            t: 0.0,
        });
    }
    let denom = a.powi(n as i32) - (-b).powi(n as i32);
    if denom.abs() < 1e-14 {
        return Err(DynamicsError::Singularity {
            what: "A^n - (-B)^n".into(),
            t: 0.0,
        });
    }
    let mut num = C64::new(0.0, 0.0);
    for m in 0..n {
        num += (-b).powi(m as i32) * a.powi((n - 1 - m) as i32) * z.powu(m);
    }
    Ok((1.0 / lhs_denom - num / denom).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::PhasePoint;

    fn pt(i: i64, j: i64, d: u64) -> PhasePoint {
        PhasePoint::new(i, j, d)
    }

    fn exp_profile(r: f64, c: f64) -> ProbabilityProfile {
        ProbabilityProfile::exponential(r, c).unwrap()
    }

    #[test]
    fn eigenvalues_at_t_zero_are_one() {
        let rule = MapRule::dephasing(pt(1, 2, 5), exp_profile(0.7, 1.3)).unwrap();
        for v in PhasePoint::all(5) {
            assert!((rule.eigenvalue(&v, 0.0) - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn isotropic_eigenvalues_split_on_dual() {
        let g = SubgroupHnf::new(3, 1, 0, 3).unwrap();
        let rule = MapRule::isotropic(&g, exp_profile(2.0 / 3.0, 1.0)).unwrap();
        let t = 0.8;
        let p = rule.profile().p(t);
        let dual = g.dual().elements();
        let order = g.order() as f64;
        for v in PhasePoint::all(3) {
            let lambda = rule.eigenvalue(&v, t);
            if dual.contains(&v) {
                assert!((lambda - 1.0).norm() < 1e-14);
            } else {
                let expected = 1.0 - order * p / (order - 1.0);
                assert!((lambda - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dephasing_eigenvalue_formula() {
        let d = 4;
        let u = pt(1, 1, d);
        let rule = MapRule::dephasing(u, exp_profile(0.5, 2.0)).unwrap();
        let t = 0.6;
        let p = rule.profile().p(t);
        for v in PhasePoint::all(d) {
            let phase = omega_pow(d, symplectic_product(&u, &v).unwrap() as i64);
            let expected = C64::new(1.0, 0.0) - (C64::new(1.0, 0.0) - phase) * p;
            assert!((rule.eigenvalue(&v, t) - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn generator_eigenvalue_dephasing_formula() {
        let d = 3;
        let u = pt(1, 0, d);
        let rule = MapRule::dephasing(u, exp_profile(2.0 / 3.0, 1.0)).unwrap();
        let t = 1.2;
        let p = rule.profile().p(t);
        let pd = rule.profile().p_dot(t);
        for v in PhasePoint::all(d) {
            let phase = omega_pow(d, symplectic_product(&u, &v).unwrap() as i64);
            let expected = pd * (phase - 1.0) / (C64::new(1.0 - p, 0.0) + phase * p);
            let got = rule.generator_eigenvalue(&v, t).unwrap();
            assert!((got - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn generator_vanishes_on_dual() {
        let g = SubgroupHnf::new(4, 1, 1, 2).unwrap();
        let rule = MapRule::isotropic(&g, exp_profile(0.5, 1.0)).unwrap();
        for v in g.dual().elements() {
            let mu = rule.generator_eigenvalue(&v, 0.9).unwrap();
            assert!(mu.norm() < 1e-13);
        }
    }

    #[test]
    fn noninvertibility_detected() {
        // Qubit dephasing with r = 0.6 crosses lambda = 1 - 2p = 0 at
        // t = ln(2r/(2r-1)) = ln 6.
        let rule = MapRule::dephasing(pt(1, 0, 2), exp_profile(0.6, 1.0)).unwrap();
        let t_star = (2.0_f64 * 0.6 / (2.0 * 0.6 - 1.0)).ln();
        let err = rule.generator_eigenvalue(&pt(0, 1, 2), t_star).unwrap_err();
        assert!(matches!(err, DynamicsError::Noninvertible { .. }));
    }

    #[test]
    fn semigroup_rates_are_constant() {
        let g = SubgroupHnf::new(3, 1, 0, 3).unwrap();
        let order = g.order();
        let r = (order - 1) as f64 / order as f64;
        let c = 1.0;
        let rule = MapRule::isotropic(&g, exp_profile(r, c)).unwrap();
        for &t in TimeGrid::default_grid().points() {
            let table = rule.decay_rates(t).unwrap();
            for alpha in PhasePoint::all(3) {
                let expected = if g.contains(&alpha) && !alpha.is_identity() {
                    c / order as f64
                } else {
                    0.0
                };
                assert!(
                    (table.get(&alpha) - expected).abs() < 1e-12,
                    "alpha={alpha}, t={t}"
                );
            }
        }
    }

    #[test]
    fn zero_profile_gives_zero_rates() {
        let profile = ProbabilityProfile::tabulated(vec![0.0, 10.0], vec![0.0, 0.0]).unwrap();
        let rule = MapRule::dephasing(pt(1, 0, 3), profile).unwrap();
        let table = rule.decay_rates(1.0).unwrap();
        assert!(table.rates().iter().all(|&g| g.abs() < 1e-12));
    }

    #[test]
    fn rate_transform_round_trip() {
        // Forward transform of the inverse-DFT rates reconstructs mu_v.
        let d = 3;
        let rule = MapRule::new(
            d,
            vec![(pt(1, 0, d), 0.5), (pt(0, 1, d), 0.3), (pt(2, 2, d), 0.2)],
            exp_profile(0.4, 1.0),
        )
        .unwrap();
        let t = 0.7;
        let table = rule.decay_rates(t).unwrap();
        for v in PhasePoint::all(d) {
            let mut mu = C64::new(0.0, 0.0);
            for alpha in PhasePoint::all(d).skip(1) {
                let phase = omega_pow(d, symplectic_product(&alpha, &v).unwrap() as i64);
                mu += table.get(&alpha) * (phase - 1.0);
            }
            let expected = rule.generator_eigenvalue(&v, t).unwrap();
            assert!((mu - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn dephasing_closed_form_examples() {
        let profile = exp_profile(2.0 / 3.0, 1.0);
        let u = pt(1, 0, 3);
        // t -> 0+: gamma_1 -> p_dot(0) = r c.
        let g1 = dephasing_rate_closed_form(&u, 1, &profile, 1e-12).unwrap();
        assert!((g1 - 2.0 / 3.0).abs() < 1e-9);
        // Odd order, y = l-1 is nonpositive for all t.
        for &t in TimeGrid::default_grid().points() {
            let g2 = dephasing_rate_closed_form(&u, 2, &profile, t).unwrap();
            assert!(g2 <= 0.0);
        }
        // Cross-check vs inverse DFT at t = 1: alpha = 2u = (2,0).
        let rule = MapRule::dephasing(u, profile.clone()).unwrap();
        let table = rule.decay_rates(1.0).unwrap();
        let closed = dephasing_rate_closed_form(&u, 2, &profile, 1.0).unwrap();
        assert!((closed - table.get(&pt(2, 0, 3))).abs() < 1e-9);
    }

    #[test]
    fn dephasing_closed_form_singularity() {
        // Even order at p = 1/2 exactly.
        let profile = ProbabilityProfile::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 0.5]).unwrap();
        let err = dephasing_rate_closed_form(&pt(1, 0, 2), 1, &profile, 1.5).unwrap_err();
        assert!(matches!(err, DynamicsError::Singularity { .. }));
    }

    #[test]
    fn isotropic_closed_form_matches_dft() {
        let g = SubgroupHnf::new(3, 1, 0, 3).unwrap();
        let profile = exp_profile(0.5, 1.0);
        let rule = MapRule::isotropic(&g, profile.clone()).unwrap();
        let closed = isotropic_rate_closed_form(&g, &profile, 1.0).unwrap();
        let dft = rule.decay_rates(1.0).unwrap();
        for alpha in PhasePoint::all(3) {
            assert!((closed.get(&alpha) - dft.get(&alpha)).abs() < 1e-9);
        }
        // Pinned semigroup profile: constant c/|G|.
        let semi = exp_profile(2.0 / 3.0, 1.0);
        let table = isotropic_rate_closed_form(&g, &semi, 2.5).unwrap();
        for u in g.elements().iter().filter(|u| !u.is_identity()) {
            assert!((table.get(u) - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_identity_examples() {
        // B = 0: both sides are 1/A.
        let res = polynomial_identity_check(0.8, 0.0, C64::new(1.0, 0.0), 5).unwrap();
        assert!(res < 1e-14);
        // z = 1, n = 2, A + B = 1.
        let res = polynomial_identity_check(0.7, 0.3, C64::new(1.0, 0.0), 2).unwrap();
        assert!(res < 1e-14);
        // Invalid root of unity.
        assert!(polynomial_identity_check(0.7, 0.3, C64::new(0.5, 0.0), 2).is_err());
    }

    #[test]
    fn finite_difference_matches_analytic_derivative() {
        let profile = exp_profile(0.6, 1.7);
        for &t in &[0.01_f64, 0.3, 1.0, 4.0] {
            let h = 1e-6 * t.max(1.0);
            let numeric = (profile.p(t + h) - profile.p(t - h)) / (2.0 * h);
            let analytic = profile.p_dot(t);
            assert!((numeric - analytic).abs() / analytic.abs() < 1e-6);
        }
    }

    #[test]
    fn csv_trace_format() {
        let rule = MapRule::dephasing(pt(1, 0, 2), exp_profile(0.5, 1.0)).unwrap();
        let grid = TimeGrid::log_spaced(0.1, 1.0, 3).unwrap();
        let csv = rate_trace_csv(&rule, &grid).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,gamma_0,gamma_1,gamma_2,gamma_3");
        assert_eq!(lines.count(), 3);
        // Identity-channel column stays zero.
        for line in csv.lines().skip(1) {
            let gamma0: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(gamma0, 0.0);
        }
    }
}
