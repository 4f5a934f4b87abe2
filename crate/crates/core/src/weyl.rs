//! Dense complex-matrix realization of Weyl operators, random-unitary maps,
//! superoperators, and Choi matrices. Vectorization is column-stacking
//! throughout: `vec(A X B) = (B^T (x) A) vec(X)`.

use std::f64::consts::TAU;

use ndarray::{linalg::kron, Array1, Array2};
use ndarray_linalg::{Eig, Eigh, UPLO};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase_space::{symplectic_product, PhasePoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeylError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("map not invertible: |lambda_({i},{j})| = {magnitude:.3e}")]
    Noninvertible { i: u64, j: u64, magnitude: f64 },
}

/// `omega^e` with `omega = exp(2*pi*i/d)`; the exponent is reduced mod `d`
/// in integer arithmetic before exponentiation.
pub fn omega_pow(d: u64, e: i64) -> C64 {
    let e = e.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, TAU * e / d as f64)
}

/// The Weyl operator `U_{kl}` with entries `omega^{k m}` at `(m, m+l mod d)`.
#[derive(Debug, Clone)]
pub struct WeylOperator {
    pub k: u64,
    pub l: u64,
    pub matrix: Array2<C64>,
}

pub fn weyl_operator(k: i64, l: i64, d: u64) -> WeylOperator {
    let k = k.rem_euclid(d as i64) as u64;
    let l = l.rem_euclid(d as i64) as u64;
    let mut matrix = Array2::zeros((d as usize, d as usize));
    for m in 0..d {
        matrix[(m as usize, ((m + l) % d) as usize)] = omega_pow(d, (k * m) as i64);
    }
    WeylOperator { k, l, matrix }
}

pub fn weyl_operator_at(u: &PhasePoint) -> WeylOperator {
    weyl_operator(u.i() as i64, u.j() as i64, u.dim())
}

/// A weight assignment over phase points defining a random-unitary map
/// `rho -> sum_u p_u U_u rho U_u^dag`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "WeylMapSpecJson", into = "WeylMapSpecJson")]
pub struct WeylMapSpec {
    d: u64,
    weights: Vec<(PhasePoint, f64)>,
}

#[derive(Serialize, Deserialize)]
struct WeightEntry {
    i: u64,
    j: u64,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct WeylMapSpecJson {
    d: u64,
    weights: Vec<WeightEntry>,
}

impl TryFrom<WeylMapSpecJson> for WeylMapSpec {
    type Error = WeylError;
    fn try_from(js: WeylMapSpecJson) -> Result<Self, WeylError> {
        WeylMapSpec::new(
            js.d,
            js.weights
                .into_iter()
                .map(|e| (PhasePoint::new(e.i as i64, e.j as i64, js.d), e.p))
                .collect(),
        )
    }
}

impl From<WeylMapSpec> for WeylMapSpecJson {
    fn from(spec: WeylMapSpec) -> Self {
        WeylMapSpecJson {
            d: spec.d,
            weights: spec
                .weights
                .into_iter()
                .map(|(u, p)| WeightEntry { i: u.i(), j: u.j(), p })
                .collect(),
        }
    }
}

impl WeylMapSpec {
    /// Weights must be nonnegative and sum to 1 within 1e-12.
    pub fn new(d: u64, weights: Vec<(PhasePoint, f64)>) -> Result<Self, WeylError> {
        let mut total = 0.0;
        for (u, p) in &weights {
            if u.dim() != d {
                return Err(WeylError::DimensionMismatch {
                    expected: d as usize,
                    got: u.dim() as usize,
                });
            }
            if *p < 0.0 {
                return Err(WeylError::InvalidWeights(format!(
                    "negative weight {p} at {u}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(WeylError::InvalidWeights(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(WeylMapSpec { d, weights })
    }

    pub fn identity(d: u64) -> Self {
        WeylMapSpec {
            d,
            weights: vec![(PhasePoint::identity(d), 1.0)],
        }
    }

    pub fn dim(&self) -> u64 {
        self.d
    }

    pub fn weights(&self) -> &[(PhasePoint, f64)] {
        &self.weights
    }

    pub fn weight_at(&self, u: &PhasePoint) -> f64 {
        self.weights
            .iter()
            .filter(|(v, _)| v == u)
            .map(|(_, p)| p)
            .sum()
    }

    /// Map eigenvalue at index `v` from the symplectic Fourier sum
    /// `lambda_v = sum_u omega^{u ^ v} p_u`.
    pub fn eigenvalue(&self, v: &PhasePoint) -> C64 {
        self.weights
            .iter()
            .map(|(u, p)| omega_pow(self.d, symplectic_product(u, v).unwrap() as i64) * *p)
            .sum()
    }

    /// All `d^2` eigenvalues in row-major index order.
    pub fn spectrum(&self) -> Vec<C64> {
        PhasePoint::all(self.d).map(|v| self.eigenvalue(&v)).collect()
    }
}

/// Applies the map to a density matrix. Output stays Hermitian with unit
/// trace for valid inputs.
pub fn apply_map(spec: &WeylMapSpec, rho: &Array2<C64>) -> Result<Array2<C64>, WeylError> {
    let d = spec.d as usize;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(WeylError::DimensionMismatch {
            expected: d,
            got: rho.nrows(),
        });
    }
    let mut out = Array2::<C64>::zeros((d, d));
    for (u, p) in &spec.weights {
        let op = weyl_operator_at(u).matrix;
        let term = op.dot(rho).dot(&op.mapv(|z| z.conj()).t());
        out = out + term.mapv(|z| z * *p);
    }
    Ok(out)
}

/// A `d^2 x d^2` matrix acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub d: u64,
    pub matrix: Array2<C64>,
}

impl Superoperator {
    pub fn identity(d: u64) -> Self {
        Superoperator {
            d,
            matrix: Array2::eye((d * d) as usize),
        }
    }

    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            d: self.d,
            matrix: self.matrix.dot(&other.matrix),
        }
    }

    pub fn apply_vec(&self, v: &Array1<C64>) -> Array1<C64> {
        self.matrix.dot(v)
    }

    /// Dense complex eigenvalues (LAPACK `zgeev`); the numerical oracle for
    /// the symplectic Fourier spectrum.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let (evals, _) = self.matrix.eig().expect("eigendecomposition failed");
        evals.to_vec()
    }

    /// Entrywise max-norm of the difference.
    pub fn max_norm_diff(&self, other: &Superoperator) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Column-stacks a `d x d` matrix.
pub fn vectorize(m: &Array2<C64>) -> Array1<C64> {
    let d = m.nrows();
    Array1::from_iter((0..d * d).map(|idx| m[(idx % d, idx / d)]))
}

pub fn unvectorize(v: &Array1<C64>, d: usize) -> Array2<C64> {
    Array2::from_shape_fn((d, d), |(r, c)| v[c * d + r])
}

/// Superoperator of the map: `sum_u p_u (conj(U_u) (x) U_u)`.
pub fn superoperator(spec: &WeylMapSpec) -> Superoperator {
    let d = spec.d as usize;
    let mut matrix = Array2::<C64>::zeros((d * d, d * d));
    for (u, p) in &spec.weights {
        let op = weyl_operator_at(u).matrix;
        let conj = op.mapv(|z| z.conj());
        matrix = matrix + kron(&conj, &op).mapv(|z| z * *p);
    }
    Superoperator { d: spec.d, matrix }
}

/// Choi matrix `C = d * (E (x) id)(|Omega><Omega|)`, Hermitian with trace `d`
/// for CPTP maps.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub d: u64,
    pub matrix: Array2<C64>,
}

pub fn choi_matrix(spec: &WeylMapSpec) -> ChoiMatrix {
    let d = spec.d as usize;
    let mut matrix = Array2::<C64>::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            let mut basis = Array2::<C64>::zeros((d, d));
            basis[(i, j)] = C64::new(1.0, 0.0);
            let image = apply_map(spec, &basis).unwrap();
            for r in 0..d {
                for c in 0..d {
                    matrix[(r * d + i, c * d + j)] += image[(r, c)];
                }
            }
        }
    }
    ChoiMatrix { d: spec.d, matrix }
}

/// Choi matrix of an arbitrary superoperator, for CP tests on intermediate
/// maps that need not be random-unitary.
pub fn choi_of_superoperator(s: &Superoperator) -> ChoiMatrix {
    let d = s.d as usize;
    let mut matrix = Array2::<C64>::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            let mut basis = Array2::<C64>::zeros((d, d));
            basis[(i, j)] = C64::new(1.0, 0.0);
            let image = unvectorize(&s.apply_vec(&vectorize(&basis)), d);
            for r in 0..d {
                for c in 0..d {
                    matrix[(r * d + i, c * d + j)] += image[(r, c)];
                }
            }
        }
    }
    ChoiMatrix { d: s.d, matrix }
}

/// True iff the smallest eigenvalue of the (Hermitized) Choi matrix is
/// `>= -tol`.
pub fn is_cp(choi: &ChoiMatrix, tol: f64) -> bool {
    let herm = choi
        .matrix
        .iter()
        .zip(choi.matrix.t().iter())
        .map(|(a, b)| (a + b.conj()) * 0.5)
        .collect::<Vec<_>>();
    let n = choi.matrix.nrows();
    let herm = Array2::from_shape_vec((n, n), herm).unwrap();
    let evals = herm.eigh(UPLO::Lower).expect("Hermitian eigensolve failed").0;
    evals.iter().all(|&e| e >= -tol)
}

/// Intermediate map `E(t) E(s)^-1` built on the Weyl eigenbasis from the
/// eigenvalue ratios `lambda_v(t) / lambda_v(s)`.
pub fn intermediate_map(
    spec_t: &WeylMapSpec,
    spec_s: &WeylMapSpec,
) -> Result<Superoperator, WeylError> {
    let d = spec_t.d;
    if spec_s.d != d {
        return Err(WeylError::DimensionMismatch {
            expected: d as usize,
            got: spec_s.d as usize,
        });
    }
    let n = (d * d) as usize;
    let mut matrix = Array2::<C64>::zeros((n, n));
    for v in PhasePoint::all(d) {
        let num = spec_t.eigenvalue(&v);
        let den = spec_s.eigenvalue(&v);
        if den.norm() < 1e-10 {
            return Err(WeylError::Noninvertible {
                i: v.i(),
                j: v.j(),
                magnitude: den.norm(),
            });
        }
        let ratio = num / den;
        let vec = vectorize(&weyl_operator_at(&v).matrix);
        // Tr(U^dag U) = d, so vec(U)/sqrt(d) is orthonormal.
        for r in 0..n {
            for c in 0..n {
                matrix[(r, c)] += ratio * vec[r] * vec[c].conj() / d as f64;
            }
        }
    }
    Ok(Superoperator { d, matrix })
}
