//! Exact integer arithmetic over the discrete phase space `Z_d x Z_d`:
//! symplectic products, Hermite-normal-form subgroups, type classification,
//! symplectic duals, enumeration, and counting.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseSpaceError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u64, u64),
    #[error("invalid HNF parameters d={d}, m={m}, w={w}, n={n}")]
    InvalidHnf { d: u64, m: u64, w: u64, n: u64 },
    #[error("order {k} does not divide d^2 = {square}", square = .d * .d)]
    OrderNotDividing { k: u64, d: u64 },
    #[error("the identity point generates the trivial subgroup")]
    IdentityPoint,
    #[error("subgroup d={d}, m={m}, w={w}, n={n} matches no type condition")]
    Unclassifiable { d: u64, m: u64, w: u64, n: u64 },
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g`, `g >= 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - (a.div_euclid(b)) * t)
    }
}

/// Divisors of `x` in increasing order.
pub fn divisors(x: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=x).filter(|k| x % k == 0).collect();
    out.sort_unstable();
    out
}

/// Divisor sum function `sigma_1`.
pub fn sigma1(d: u64) -> u64 {
    divisors(d).into_iter().sum()
}

/// An element `(i, j)` of `Z_d x Z_d`; the index of a Weyl operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhasePoint {
    d: u64,
    i: u64,
    j: u64,
}

impl PhasePoint {
    /// Builds the point `(i mod d, j mod d)`. Panics if `d < 2`.
    pub fn new(i: i64, j: i64, d: u64) -> Self {
        assert!(d >= 2, "phase space dimension must be >= 2");
        let d_ = d as i64;
        PhasePoint {
            d,
            i: i.rem_euclid(d_) as u64,
            j: j.rem_euclid(d_) as u64,
        }
    }

    pub fn identity(d: u64) -> Self {
        PhasePoint::new(0, 0, d)
    }

    pub fn i(&self) -> u64 {
        self.i
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn dim(&self) -> u64 {
        self.d
    }

    pub fn is_identity(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    /// Componentwise addition mod `d`. Panics on mismatched dimensions.
    pub fn add(&self, other: &PhasePoint) -> PhasePoint {
        assert_eq!(self.d, other.d, "phase points from different spaces");
        PhasePoint {
            d: self.d,
            i: (self.i + other.i) % self.d,
            j: (self.j + other.j) % self.d,
        }
    }

    pub fn neg(&self) -> PhasePoint {
        PhasePoint {
            d: self.d,
            i: (self.d - self.i) % self.d,
            j: (self.d - self.j) % self.d,
        }
    }

    pub fn scale(&self, k: u64) -> PhasePoint {
        PhasePoint {
            d: self.d,
            i: (self.i * (k % self.d)) % self.d,
            j: (self.j * (k % self.d)) % self.d,
        }
    }

    /// Row-major single index `alpha = d*i + j`.
    pub fn single_index(&self) -> u64 {
        self.d * self.i + self.j
    }

    pub fn from_single_index(alpha: u64, d: u64) -> Self {
        PhasePoint::new((alpha / d) as i64, (alpha % d) as i64, d)
    }

    /// All `d^2` phase points in row-major order.
    pub fn all(d: u64) -> impl Iterator<Item = PhasePoint> {
        (0..d * d).map(move |alpha| PhasePoint::from_single_index(alpha, d))
    }

    /// Order of the cyclic subgroup generated by this point: `d / gcd(i, j, d)`.
    pub fn cyclic_order(&self) -> Result<u64, PhaseSpaceError> {
        if self.is_identity() {
            return Err(PhaseSpaceError::IdentityPoint);
        }
        Ok(self.d / gcd(gcd(self.i, self.j), self.d))
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Symplectic inner product `u ^ v = j_u * i_v - i_u * j_v  (mod d)`.
pub fn symplectic_product(u: &PhasePoint, v: &PhasePoint) -> Result<u64, PhaseSpaceError> {
    if u.d != v.d {
        return Err(PhaseSpaceError::DimensionMismatch(u.d, v.d));
    }
    let d = u.d as i64;
    let prod = (u.j as i64 * v.i as i64 - u.i as i64 * v.j as i64).rem_euclid(d);
    Ok(prod as u64)
}

/// Structural type of a subgroup of `Z_d x Z_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SubgroupType {
    Cyclic,
    SplitRank2,
    NonSplitRank2,
}

impl fmt::Display for SubgroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SubgroupType::Cyclic => "cyclic",
            SubgroupType::SplitRank2 => "split-rank-2",
            SubgroupType::NonSplitRank2 => "non-split-rank-2",
        };
        write!(f, "{s}")
    }
}

/// A subgroup of `Z_d x Z_d` in canonical Hermite normal form, generated by
/// the rows of the upper-triangular matrix `(m w; 0 n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubgroupHnf {
    pub d: u64,
    pub m: u64,
    pub w: u64,
    pub n: u64,
}

/// True iff `m | d`, `n | d`, `0 <= w < n`, and `n | w*d/m`.
pub fn hnf_validate(d: u64, m: u64, w: u64, n: u64) -> bool {
    d >= 2
        && m >= 1
        && n >= 1
        && d % m == 0
        && d % n == 0
        && w < n
        && (w * (d / m)) % n == 0
}

impl SubgroupHnf {
    pub fn new(d: u64, m: u64, w: u64, n: u64) -> Result<Self, PhaseSpaceError> {
        if hnf_validate(d, m, w, n) {
            Ok(SubgroupHnf { d, m, w, n })
        } else {
            Err(PhaseSpaceError::InvalidHnf { d, m, w, n })
        }
    }

    /// The trivial subgroup `{(0,0)}`.
    pub fn trivial(d: u64) -> Self {
        SubgroupHnf { d, m: d, w: 0, n: d }
    }

    /// The full group `Z_d x Z_d`.
    pub fn full(d: u64) -> Self {
        SubgroupHnf { d, m: 1, w: 0, n: 1 }
    }

    pub fn order(&self) -> u64 {
        self.d * self.d / (self.m * self.n)
    }

    /// The two HNF generators `(m, w)` and `(0, n)`.
    pub fn generators(&self) -> [PhasePoint; 2] {
        [
            PhasePoint::new(self.m as i64, self.w as i64, self.d),
            PhasePoint::new(0, self.n as i64, self.d),
        ]
    }

    /// The element set `{(m*u, w*u + n*v) mod d}`, of cardinality `d^2/(m*n)`.
    pub fn elements(&self) -> BTreeSet<PhasePoint> {
        let mut set = BTreeSet::new();
        for u in 0..self.d / self.m {
            for v in 0..self.d / self.n {
                set.insert(PhasePoint::new(
                    (self.m * u) as i64,
                    (self.w * u + self.n * v) as i64,
                    self.d,
                ));
            }
        }
        set
    }

    /// Constant-time membership: `m | i` and `j = w*(i/m)  (mod n)`.
    pub fn contains(&self, p: &PhasePoint) -> bool {
        p.d == self.d && p.i % self.m == 0 && p.j % self.n == (self.w * (p.i / self.m)) % self.n
    }

    /// Redundancy threshold `nu = gcd(w*d/m, d)`.
    pub fn redundancy_threshold(&self) -> u64 {
        gcd(self.w * (self.d / self.m), self.d)
    }

    pub fn classify(&self) -> Result<SubgroupType, PhaseSpaceError> {
        let nu = self.redundancy_threshold();
        if self.n == nu {
            Ok(SubgroupType::Cyclic)
        } else if self.w == 0 && self.n < self.d {
            Ok(SubgroupType::SplitRank2)
        } else if self.w != 0 && self.n < nu {
            Ok(SubgroupType::NonSplitRank2)
        } else {
            // Unreachable for valid HNF triples (n always divides nu), kept as
            // an explicit error rather than a guess.
            Err(PhaseSpaceError::Unclassifiable {
                d: self.d,
                m: self.m,
                w: self.w,
                n: self.n,
            })
        }
    }

    /// Symplectic dual `G^perp`: all points commuting with every element of
    /// `G`. Orthogonality to the two HNF generators suffices.
    pub fn dual(&self) -> SubgroupHnf {
        let [g1, g2] = self.generators();
        let orthogonal: Vec<PhasePoint> = PhasePoint::all(self.d)
            .filter(|v| {
                symplectic_product(&g1, v).unwrap() == 0 && symplectic_product(&g2, v).unwrap() == 0
            })
            .collect();
        hnf_from_points(self.d, &orthogonal)
    }
}

impl fmt::Display for SubgroupHnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<({}, {}), (0, {})> in Z_{} x Z_{}",
            self.m, self.w, self.n, self.d, self.d
        )
    }
}

/// Canonical HNF of the subgroup generated by `points`, via integer row
/// reduction of the pre-image lattice (the generator rows augmented with
/// `(d, 0)` and `(0, d)`).
pub fn hnf_from_points(d: u64, points: &[PhasePoint]) -> SubgroupHnf {
    let mut rows: Vec<(i64, i64)> = points.iter().map(|p| (p.i as i64, p.j as i64)).collect();
    rows.push((d as i64, 0));
    rows.push((0, d as i64));

    let mut first: Option<(i64, i64)> = None;
    let mut n_acc: i64 = 0;
    for (x, y) in rows {
        match first {
            None if x != 0 => first = Some((x, y)),
            None => n_acc = gcd(n_acc.unsigned_abs(), y.unsigned_abs()) as i64,
            Some((a, b)) => {
                if x == 0 {
                    n_acc = gcd(n_acc.unsigned_abs(), y.unsigned_abs()) as i64;
                } else {
                    let (g, s, t) = ext_gcd(a, x);
                    let eliminated = (a / g) * y - (x / g) * b;
                    n_acc = gcd(n_acc.unsigned_abs(), eliminated.unsigned_abs()) as i64;
                    first = Some((g, s * b + t * y));
                }
            }
        }
    }
    let (m, b) = first.expect("(d, 0) row guarantees a pivot");
    let n = n_acc;
    debug_assert!(m > 0 && n > 0);
    let w = b.rem_euclid(n);
    SubgroupHnf {
        d,
        m: m as u64,
        w: w as u64,
        n: n as u64,
    }
}

/// All subgroups of order `K`, one canonical HNF per subgroup. For each
/// divisor pair `(m, n)` with `m*n = d^2/K`, the admissible offsets are the
/// multiples of `n/g` with `g = gcd(n, d/m)`.
pub fn enumerate_subgroups(d: u64, k: u64) -> Result<Vec<SubgroupHnf>, PhaseSpaceError> {
    if k == 0 || (d * d) % k != 0 {
        return Err(PhaseSpaceError::OrderNotDividing { k, d });
    }
    let target = d * d / k;
    let mut out = Vec::new();
    for m in divisors(d) {
        if target % m != 0 {
            continue;
        }
        let n = target / m;
        if d % n != 0 {
            continue;
        }
        let g = gcd(n, d / m);
        for x in 0..g {
            let w = x * (n / g);
            debug_assert!(hnf_validate(d, m, w, n));
            out.push(SubgroupHnf { d, m, w, n });
        }
    }
    Ok(out)
}

/// Number of subgroups of order `K`: the sum of `gcd(n, d/m)` over divisor
/// pairs with `m*n = d^2/K`. Equals `sigma_1(d)` at `K = d`.
pub fn count_subgroups(d: u64, k: u64) -> Result<u64, PhaseSpaceError> {
    if k == 0 || (d * d) % k != 0 {
        return Err(PhaseSpaceError::OrderNotDividing { k, d });
    }
    let target = d * d / k;
    let mut total = 0;
    for m in divisors(d) {
        if target % m != 0 {
            continue;
        }
        let n = target / m;
        if d % n != 0 {
            continue;
        }
        total += gcd(n, d / m);
    }
    Ok(total)
}

/// Serializes an element set as a sorted array of `[i, j]` pairs.
pub fn elements_to_json(set: &BTreeSet<PhasePoint>) -> serde_json::Value {
    serde_json::Value::Array(
        set.iter()
            .map(|p| serde_json::json!([p.i(), p.j()]))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(i: i64, j: i64, d: u64) -> PhasePoint {
        PhasePoint::new(i, j, d)
    }

    #[test]
    fn symplectic_product_examples() {
        assert_eq!(symplectic_product(&pt(1, 0, 3), &pt(0, 1, 3)).unwrap(), 2);
        assert_eq!(symplectic_product(&pt(1, 1, 3), &pt(1, 2, 3)).unwrap(), 2);
        for u in PhasePoint::all(5) {
            assert_eq!(symplectic_product(&u, &u).unwrap(), 0);
        }
    }

    #[test]
    fn symplectic_dimension_mismatch() {
        assert_eq!(
            symplectic_product(&pt(1, 0, 3), &pt(1, 0, 4)),
            Err(PhaseSpaceError::DimensionMismatch(3, 4))
        );
    }

    #[test]
    fn symplectic_antisymmetry() {
        let d = 6;
        for u in PhasePoint::all(d) {
            for v in PhasePoint::all(d) {
                let uv = symplectic_product(&u, &v).unwrap();
                let vu = symplectic_product(&v, &u).unwrap();
                assert_eq!(uv, (d - vu) % d);
            }
        }
    }

    #[test]
    fn hnf_validate_examples() {
        assert!(hnf_validate(4, 1, 1, 2));
        assert!(!hnf_validate(4, 1, 1, 3));
        assert!(hnf_validate(6, 2, 1, 3)); // w*d/m = 3, divisible by n = 3
    }

    #[test]
    fn subgroup_elements_examples() {
        let trivial = SubgroupHnf::new(3, 3, 0, 3).unwrap();
        assert_eq!(trivial.elements(), BTreeSet::from([pt(0, 0, 3)]));

        let g = SubgroupHnf::new(4, 1, 1, 2).unwrap();
        let els = g.elements();
        assert_eq!(els.len(), 8);
        assert_eq!(g.order(), 8);
        for p in [pt(1, 1, 4), pt(0, 2, 4), pt(2, 2, 4)] {
            assert!(els.contains(&p));
            assert!(g.contains(&p));
        }

        let h = SubgroupHnf::new(3, 1, 0, 3).unwrap();
        assert_eq!(
            h.elements(),
            BTreeSet::from([pt(0, 0, 3), pt(1, 0, 3), pt(2, 0, 3)])
        );
    }

    #[test]
    fn element_sets_are_closed() {
        for d in 2..=8u64 {
            for k in divisors(d * d) {
                for g in enumerate_subgroups(d, k).unwrap() {
                    let els = g.elements();
                    assert_eq!(els.len() as u64, g.order());
                    for a in &els {
                        for b in &els {
                            assert!(els.contains(&a.add(b)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let g = SubgroupHnf::new(3, 1, 0, 3).unwrap();
        assert_eq!(g.redundancy_threshold(), 3);
        assert_eq!(g.classify().unwrap(), SubgroupType::Cyclic);

        let g = SubgroupHnf::new(4, 1, 1, 2).unwrap();
        assert_eq!(g.redundancy_threshold(), 4);
        assert_eq!(g.classify().unwrap(), SubgroupType::NonSplitRank2);

        let g = SubgroupHnf::new(4, 2, 0, 2).unwrap();
        assert_eq!(g.classify().unwrap(), SubgroupType::SplitRank2);
    }

    #[test]
    fn classification_is_total_for_small_d() {
        for d in 2..=12u64 {
            for k in divisors(d * d) {
                for g in enumerate_subgroups(d, k).unwrap() {
                    g.classify().unwrap();
                }
            }
        }
    }

    #[test]
    fn dual_examples() {
        // d=3, G = <(1,0)> is self-dual.
        let g = SubgroupHnf::new(3, 1, 0, 3).unwrap();
        assert_eq!(g.dual().elements(), g.elements());

        // Trivial subgroup dualizes to the full group.
        let t = SubgroupHnf::trivial(5);
        assert_eq!(t.dual(), SubgroupHnf::full(5));

        // d=4 order-8 subgroup dualizes to order 2.
        let g = SubgroupHnf::new(4, 1, 1, 2).unwrap();
        let dual = g.dual();
        assert_eq!(dual.order(), 2);
        assert_eq!(g.order() * dual.order(), 16);
        // Brute-force scan agreement.
        let els = g.elements();
        let brute: BTreeSet<PhasePoint> = PhasePoint::all(4)
            .filter(|v| els.iter().all(|u| symplectic_product(u, v).unwrap() == 0))
            .collect();
        assert_eq!(dual.elements(), brute);
    }

    #[test]
    fn enumerate_examples() {
        let subs = enumerate_subgroups(3, 3).unwrap();
        assert_eq!(subs.len(), 4);
        let expected: BTreeSet<BTreeSet<PhasePoint>> = [
            vec![pt(1, 0, 3)],
            vec![pt(0, 1, 3)],
            vec![pt(1, 1, 3)],
            vec![pt(1, 2, 3)],
        ]
        .iter()
        .map(|gens| {
            let mut set = BTreeSet::from([pt(0, 0, 3)]);
            for g in gens {
                for k in 1..3 {
                    set.insert(g.scale(k));
                }
            }
            set
        })
        .collect();
        let got: BTreeSet<BTreeSet<PhasePoint>> = subs.iter().map(|s| s.elements()).collect();
        assert_eq!(got, expected);

        assert_eq!(enumerate_subgroups(2, 4).unwrap().len(), 1);
        assert_eq!(enumerate_subgroups(4, 4).unwrap().len(), 7);
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_subgroups(3, 3).unwrap(), 4);
        for d in 2..=10 {
            assert_eq!(count_subgroups(d, 1).unwrap(), 1);
            assert_eq!(count_subgroups(d, d * d).unwrap(), 1);
        }
        assert_eq!(count_subgroups(12, 12).unwrap(), 28);
        assert_eq!(sigma1(12), 28);
        assert!(matches!(
            count_subgroups(4, 5),
            Err(PhaseSpaceError::OrderNotDividing { k: 5, d: 4 })
        ));
    }

    #[test]
    fn count_maximized_at_k_equals_d() {
        for d in 2..=30u64 {
            let at_d = count_subgroups(d, d).unwrap();
            assert_eq!(at_d, sigma1(d));
            for k in divisors(d * d) {
                assert!(count_subgroups(d, k).unwrap() <= at_d);
            }
        }
    }

    #[test]
    fn cyclic_order_examples() {
        assert_eq!(pt(1, 0, 3).cyclic_order().unwrap(), 3);
        assert_eq!(pt(2, 2, 4).cyclic_order().unwrap(), 2);
        assert_eq!(pt(2, 4, 6).cyclic_order().unwrap(), 3);
        assert!(pt(0, 0, 4).cyclic_order().is_err());
        // Brute-force repeated addition.
        for d in 2..=9u64 {
            for u in PhasePoint::all(d).filter(|u| !u.is_identity()) {
                let mut acc = u;
                let mut steps = 1;
                while !acc.is_identity() {
                    acc = acc.add(&u);
                    steps += 1;
                }
                assert_eq!(u.cyclic_order().unwrap(), steps);
            }
        }
    }

    #[test]
    fn hnf_from_points_recanonicalizes() {
        for d in 2..=9u64 {
            for k in divisors(d * d) {
                for g in enumerate_subgroups(d, k).unwrap() {
                    let pts: Vec<PhasePoint> = g.elements().into_iter().collect();
                    assert_eq!(hnf_from_points(d, &pts), g);
                }
            }
        }
    }

    #[test]
    fn dual_is_involution() {
        for d in 2..=12u64 {
            for k in divisors(d * d) {
                for g in enumerate_subgroups(d, k).unwrap() {
                    let dual = g.dual();
                    assert_eq!(g.order() * dual.order(), d * d);
                    assert_eq!(dual.dual(), g);
                }
            }
        }
    }

    #[test]
    fn subgroup_json_round_trip() {
        let g = SubgroupHnf::new(4, 1, 1, 2).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"d":4,"m":1,"w":1,"n":2}"#);
        let back: SubgroupHnf = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}
