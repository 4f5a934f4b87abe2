//! Convex mixtures of isotropic Weyl semigroups: effective weights, mixture
//! spectra, phase-space coverage, admissible-count bounds, and closed-form
//! decay rates for the pinned semigroup profile, plus the d=3
//! generalized-Pauli embedding.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64 as C64;

use crate::dynamics::{DynamicsError, MapRule, ProbabilityProfile, RateTable};
use crate::phase_space::{count_subgroups, symplectic_product, PhasePoint, SubgroupHnf};
use crate::weyl::{omega_pow, WeylMapSpec};

/// Mixture `sum_k x_k E_k(t)` of isotropic maps on subgroups `G_k`, all
/// driven by one shared profile `p(t)`.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    d: u64,
    components: Vec<(f64, SubgroupHnf)>,
    profile: ProbabilityProfile,
    /// Duals `G_k^perp`, precomputed in component order.
    duals: Vec<BTreeSet<PhasePoint>>,
    /// Set when the profile is pinned to `r = (K-1)/K` with a common order K.
    theorem2_rate: Option<f64>,
}

impl MixtureSpec {
    pub fn new(
        d: u64,
        components: Vec<(f64, SubgroupHnf)>,
        profile: ProbabilityProfile,
    ) -> Result<Self, DynamicsError> {
        if components.is_empty() {
            return Err(DynamicsError::InvalidInput("mixture needs >= 1 component".into()));
        }
        let mut total = 0.0;
        let mut seen: Vec<BTreeSet<PhasePoint>> = Vec::new();
        for (x, g) in &components {
            if g.d != d {
                return Err(DynamicsError::InvalidInput(format!(
                    "component has dimension {}, expected {d}",
                    g.d
                )));
            }
            if g.order() < 2 {
                return Err(DynamicsError::InvalidInput(
                    "mixture components need |G| >= 2".into(),
                ));
            }
            if !(*x > 0.0 && *x < 1.0 || (*x - 1.0).abs() < 1e-12 && components.len() == 1) {
                return Err(DynamicsError::InvalidInput(format!(
                    "mixing weight {x} outside (0, 1)"
                )));
            }
            total += x;
            let elems = g.elements();
            if seen.contains(&elems) {
                return Err(DynamicsError::InvalidInput(
                    "mixture components must be pairwise distinct".into(),
                ));
            }
            seen.push(elems);
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(DynamicsError::InvalidInput(format!(
                "mixing weights sum to {total}, expected 1"
            )));
        }
        let duals = components.iter().map(|(_, g)| g.dual().elements()).collect();
        Ok(MixtureSpec {
            d,
            components,
            profile,
            duals,
            theorem2_rate: None,
        })
    }

    /// Theorem-2 mode: all components share an order K and the profile is
    /// pinned to `p(t) = ((K-1)/K)(1 - e^{-ct})`, so each constituent is a
    /// Markovian semigroup.
    pub fn theorem2(
        d: u64,
        components: Vec<(f64, SubgroupHnf)>,
        c: f64,
    ) -> Result<Self, DynamicsError> {
        let k = components
            .first()
            .map(|(_, g)| g.order())
            .ok_or_else(|| DynamicsError::InvalidInput("mixture needs >= 1 component".into()))?;
        if components.iter().any(|(_, g)| g.order() != k) {
            return Err(DynamicsError::InvalidInput(
                "Theorem-2 mode needs a common component order".into(),
            ));
        }
        let r = (k - 1) as f64 / k as f64;
        let mut mix = MixtureSpec::new(d, components, ProbabilityProfile::exponential(r, c)?)?;
        mix.theorem2_rate = Some(c);
        Ok(mix)
    }

    pub fn dim(&self) -> u64 {
        self.d
    }

    pub fn components(&self) -> &[(f64, SubgroupHnf)] {
        &self.components
    }

    pub fn profile(&self) -> &ProbabilityProfile {
        &self.profile
    }

    pub fn is_theorem2_mode(&self) -> bool {
        self.theorem2_rate.is_some()
    }

    /// Common component order, when all orders agree.
    pub fn common_order(&self) -> Option<u64> {
        let k = self.components[0].1.order();
        self.components.iter().all(|(_, g)| g.order() == k).then_some(k)
    }

    /// Dual multiplicity `X_u = sum_k x_k [u in G_k^perp]`.
    pub fn dual_multiplicity(&self, u: &PhasePoint) -> f64 {
        self.components
            .iter()
            .zip(&self.duals)
            .filter(|(_, dual)| dual.contains(u))
            .map(|((x, _), _)| x)
            .sum()
    }

    /// Static effective weights at time `t`: weight at `u != 0` is
    /// `p(t) sum_k x_k [u in G_k \ 0] / (|G_k|-1)`.
    pub fn effective_weights(&self, t: f64) -> WeylMapSpec {
        self.as_rule().weights_at(t)
    }

    /// The mixture as a single anisotropic rule over the union support.
    pub fn as_rule(&self) -> MapRule {
        let mut weights: BTreeMap<PhasePoint, f64> = BTreeMap::new();
        for (x, g) in &self.components {
            let w = x / (g.order() - 1) as f64;
            for u in g.elements() {
                if !u.is_identity() {
                    *weights.entry(u).or_insert(0.0) += w;
                }
            }
        }
        MapRule::new(self.d, weights.into_iter().collect(), self.profile.clone())
            .expect("mixture weights are normalized by construction")
    }

    /// Closed-form mixture eigenvalue `X_u + (1 - X_u) e^{-ct}`; requires
    /// Theorem-2 mode, where every constituent eigenvalue is 1 or `e^{-ct}`.
    pub fn mixture_eigenvalue(&self, u: &PhasePoint, t: f64) -> Result<f64, DynamicsError> {
        let c = self.theorem2_rate.ok_or_else(|| {
            DynamicsError::InvalidInput(
                "mixture_eigenvalue needs Theorem-2 mode; use as_rule().eigenvalue".into(),
            )
        })?;
        let x = self.dual_multiplicity(u);
        Ok(x + (1.0 - x) * (-c * t).exp())
    }

    /// Exact set-arithmetic coverage analysis.
    pub fn coverage_report(&self) -> CoverageReport {
        let mut covered = BTreeSet::new();
        for (_, g) in &self.components {
            covered.extend(g.elements().into_iter().filter(|u| !u.is_identity()));
        }
        let uncovered = PhasePoint::all(self.d)
            .skip(1)
            .filter(|u| !covered.contains(u))
            .collect();
        let mut dual_intersections = BTreeSet::new();
        for (i, a) in self.duals.iter().enumerate() {
            for b in self.duals.iter().skip(i + 1) {
                dual_intersections.extend(a.intersection(b).copied());
            }
        }
        let multiplicity = PhasePoint::all(self.d)
            .map(|u| (u, self.dual_multiplicity(&u)))
            .collect();
        CoverageReport {
            covered,
            uncovered,
            dual_intersections,
            multiplicity,
        }
    }

    /// Closed-form decay rate in Theorem-2 mode, via the spectral overlap
    /// decomposition with `f(x) = c x / (x + (1-x) e^{-ct})`:
    ///
    /// `gamma_alpha = (1/d^2) [ c + sum_k f(x_k)(|G_k^perp| [alpha in G_k] - 1)
    ///                - sum_{u in S_int \ 0} omega^{-alpha^u} M(u,t) ]`
    ///
    /// where `M(u,t) = sum_k f(x_k)[u in G_k^perp] - f(X_u)` is supported on
    /// the pairwise dual intersections `S_int`.
    pub fn mixture_rates_closed_form(
        &self,
        alpha: &PhasePoint,
        t: f64,
    ) -> Result<f64, DynamicsError> {
        let c = self.theorem2_rate.ok_or_else(|| {
            DynamicsError::InvalidInput(
                "closed-form rates need Theorem-2 mode; use the generic DFT path".into(),
            )
        })?;
        if alpha.is_identity() {
            return Ok(0.0);
        }
        let f = |x: f64| c * x / (x + (1.0 - x) * (-c * t).exp());
        let d2 = (self.d * self.d) as f64;
        let mut acc = C64::new(c, 0.0);
        for ((x, g), dual) in self.components.iter().zip(&self.duals) {
            let factor = if g.contains(alpha) {
                dual.len() as f64 - 1.0
            } else {
                -1.0
            };
            acc += f(*x) * factor;
        }
        let report_sint: BTreeSet<PhasePoint> = {
            let mut s = BTreeSet::new();
            for (i, a) in self.duals.iter().enumerate() {
                for b in self.duals.iter().skip(i + 1) {
                    s.extend(a.intersection(b).copied());
                }
            }
            s
        };
        for u in &report_sint {
            if u.is_identity() {
                continue;
            }
            let overlap_sum: f64 = self
                .components
                .iter()
                .zip(&self.duals)
                .filter(|(_, dual)| dual.contains(u))
                .map(|((x, _), _)| f(*x))
                .sum();
            let m = overlap_sum - f(self.dual_multiplicity(u));
            let phase = symplectic_product(alpha, u)? as i64;
            acc -= omega_pow(self.d, -phase) * m;
        }
        acc /= d2;
        if acc.im.abs() > 1e-10 {
            return Err(DynamicsError::NonRealRate {
                alpha: alpha.single_index(),
                residue: acc.im.abs(),
            });
        }
        Ok(acc.re)
    }

    /// All closed-form rates at `t` as a table.
    pub fn closed_form_rate_table(&self, t: f64) -> Result<RateTable, DynamicsError> {
        let mut rates = vec![0.0; (self.d * self.d) as usize];
        for alpha in PhasePoint::all(self.d).skip(1) {
            rates[alpha.single_index() as usize] = self.mixture_rates_closed_form(&alpha, t)?;
        }
        Ok(RateTable::from_rates(self.d, t, rates))
    }
}

/// Phase-space coverage of a mixture's components.
#[derive(Debug, Clone)]
pub struct CoverageReport {
    /// `S = union of G_k \ {0}`.
    pub covered: BTreeSet<PhasePoint>,
    /// Nonzero points outside S.
    pub uncovered: Vec<PhasePoint>,
    /// `S_int = union over i != j of G_i^perp intersect G_j^perp`.
    pub dual_intersections: BTreeSet<PhasePoint>,
    /// `X_u` per phase point.
    pub multiplicity: BTreeMap<PhasePoint, f64>,
}

impl CoverageReport {
    pub fn x_u(&self, u: &PhasePoint) -> f64 {
        self.multiplicity.get(u).copied().unwrap_or(0.0)
    }
}

/// Admissible mixture sizes for eternal non-Markovianity of K-order
/// mixtures: `2 <= N < min{(d^2-1)/(K-1), #subgroups of order K}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Bound {
    pub bound: f64,
    pub admissible: Vec<u64>,
}

pub fn theorem2_bound(d: u64, k: u64) -> Result<Theorem2Bound, DynamicsError> {
    if k < 2 || (d * d) % k != 0 {
        return Err(DynamicsError::InvalidInput(format!(
            "order K={k} must divide d^2 = {} and be >= 2",
            d * d
        )));
    }
    let count = count_subgroups(d, k).map_err(crate::dynamics::DynamicsError::PhaseSpace)?;
    let overlap = (d * d - 1) as f64 / (k - 1) as f64;
    let bound = overlap.min(count as f64);
    let admissible = (2..).take_while(|&n| (n as f64) < bound).collect();
    Ok(Theorem2Bound { bound, admissible })
}

/// Subadditivity self-test for `f(x) = c x / (x + (1-x) e^{-ct})`:
/// returns `sum_i f(x_i) - f(sum_i x_i)`, which is nonnegative since f is
/// concave on [0,1] with f(0) = 0.
pub fn subadditivity_gap(xs: &[f64], c: f64, t: f64) -> Result<f64, DynamicsError> {
    if xs.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(DynamicsError::InvalidInput("x_i must lie in [0, 1]".into()));
    }
    let total: f64 = xs.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(DynamicsError::InvalidInput("sum of x_i must be <= 1".into()));
    }
    let f = |x: f64| c * x / (x + (1.0 - x) * (-c * t).exp());
    Ok(xs.iter().map(|&x| f(x)).sum::<f64>() - f(total.min(1.0)))
}

/// d=3 generalized-Pauli channel as a Weyl map: `q_0` on the identity and
/// each remaining class split evenly over its two Weyl points
/// (single index alpha = 3i + j): q_1 on {1,2}, q_2 on {3,6}, q_3 on {4,8},
/// q_4 on {5,7}.
pub fn gp_embedding_d3(q: [f64; 5]) -> Result<WeylMapSpec, DynamicsError> {
    if q.iter().any(|&x| x < 0.0) || (q.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(DynamicsError::InvalidInput(
            "q must be a probability vector".into(),
        ));
    }
    let classes: [(usize, [u64; 2]); 4] = [(1, [1, 2]), (2, [3, 6]), (3, [4, 8]), (4, [5, 7])];
    let mut weights = vec![(PhasePoint::identity(3), q[0])];
    for (qi, alphas) in classes {
        for alpha in alphas {
            weights.push((PhasePoint::from_single_index(alpha, 3), q[qi] / 2.0));
        }
    }
    WeylMapSpec::new(3, weights).map_err(|e| DynamicsError::InvalidInput(e.to_string()))
}

/// Time-dependent two-parameter generalized-Pauli family
/// `q(t) = (1-p, x_1 p, x_2 p, 0, 0)` as a map rule: support
/// `{(0,1), (0,2)}` at `x_1/2` each and `{(1,0), (2,0)}` at `x_2/2` each.
pub fn gp_mixture_rule(
    x1: f64,
    x2: f64,
    profile: ProbabilityProfile,
) -> Result<MapRule, DynamicsError> {
    if x1 <= 0.0 || x2 <= 0.0 || (x1 + x2 - 1.0).abs() > 1e-12 {
        return Err(DynamicsError::InvalidInput(
            "need x1, x2 > 0 with x1 + x2 = 1".into(),
        ));
    }
    MapRule::new(
        3,
        vec![
            (PhasePoint::new(0, 1, 3), x1 / 2.0),
            (PhasePoint::new(0, 2, 3), x1 / 2.0),
            (PhasePoint::new(1, 0, 3), x2 / 2.0),
            (PhasePoint::new(2, 0, 3), x2 / 2.0),
        ],
        profile,
    )
}

/// The four order-3 subgroups of Z_3 x Z_3 in enumeration order.
pub fn qutrit_order3_subgroups() -> Vec<SubgroupHnf> {
    crate::phase_space::enumerate_subgroups(3, 3).unwrap()
}
