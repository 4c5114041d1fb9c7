//! Orthonormal Hermitian operator bases and the real coefficient matrices of
//! matrix square roots expanded in them, plus the measurement matrix Gamma.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hilbert::{sqrt_psd, C64, CMat, DensityOperator};
use crate::measurement::ProjectiveMeasurement;

/// Orthonormal Hermitian operator basis of a `d`-dimensional system:
/// identity over sqrt(d) followed by the generalized Gell-Mann matrices
/// normalized to `Tr X^2 = 1`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<CMat>,
}

impl HermitianBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, k: usize) -> &CMat {
        &self.elements[k]
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    /// Expands a Hermitian operator in this basis: `a_k = Tr(A X_k)`.
    pub fn expand(&self, a: &CMat) -> Vec<f64> {
        self.elements.iter().map(|x| (a * x).trace().re).collect()
    }

    /// Rebuilds `sum_k a_k X_k`.
    pub fn assemble(&self, coeffs: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for (c, x) in coeffs.iter().zip(&self.elements) {
            out += x * C64::from(*c);
        }
        out
    }
}

/// Builds the orthonormal Hermitian basis for dimension `d >= 2`.
///
/// Element order is fixed for reproducibility: identity, symmetric pairs,
/// antisymmetric pairs, diagonal elements, each block in lexicographic
/// index order. For `d = 2` this is `{I, sx, sy, sz} / sqrt(2)`.
pub fn build_basis(d: usize) -> Result<HermitianBasis> {
    if d < 2 {
        return Err(Error::BasisDimTooSmall(d));
    }
    let mut elements = Vec::with_capacity(d * d);
    let inv_sqrt_d = C64::from(1.0 / (d as f64).sqrt());
    elements.push(CMat::identity(d, d) * inv_sqrt_d);
    let w = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMat::zeros(d, d);
            m[(j, k)] = w;
            m[(k, j)] = w;
            elements.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMat::zeros(d, d);
            m[(j, k)] = C64::new(0.0, -1.0) * w;
            m[(k, j)] = C64::new(0.0, 1.0) * w;
            elements.push(m);
        }
    }
    for l in 1..d {
        let c = C64::from(1.0 / ((l * (l + 1)) as f64).sqrt());
        let mut m = CMat::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = c;
        }
        m[(l, l)] = -c * C64::from(l as f64);
        elements.push(m);
    }
    Ok(HermitianBasis { dim: d, elements })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaKind {
    Ab,
    Cd,
    Joint,
}

impl LambdaKind {
    fn name(self) -> &'static str {
        match self {
            LambdaKind::Ab => "AB",
            LambdaKind::Cd => "CD",
            LambdaKind::Joint => "JOINT",
        }
    }
}

/// Real coefficient matrix of a matrix square root in a product operator
/// basis. For kind AB/CD the entry `(i, j)` is `Tr(sqrt(rho) X_i (x) Y_j)`;
/// the JOINT kind is the rearranged outer product used by the bound
/// computations, with rows indexed `(j, k)` and columns `(i, l)` row-major.
#[derive(Debug, Clone)]
pub struct LambdaMatrix {
    entries: DMatrix<f64>,
    kind: LambdaKind,
    /// basis sizes of the two factors: `(m^2, n^2)` for AB, `(u^2, v^2)`
    /// for CD, `(n^2 u^2, m^2 v^2)` row/col split for JOINT
    factor_sizes: (usize, usize),
}

impl LambdaMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn kind(&self) -> LambdaKind {
        self.kind
    }

    pub fn factor_sizes(&self) -> (usize, usize) {
        self.factor_sizes
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Eigenvalues of `L L^t` in increasing order.
    pub fn gram_eigenvalues_asc(&self) -> Vec<f64> {
        let gram = &self.entries * self.entries.transpose();
        let mut vals: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }
}

/// Coefficient matrix of `sqrt(rho)` for a bipartite state in the product of
/// two Hermitian bases.
pub fn lambda_of(
    rho: &DensityOperator,
    basis_left: &HermitianBasis,
    basis_right: &HermitianBasis,
    kind: LambdaKind,
) -> Result<LambdaMatrix> {
    rho.require_bipartite()?;
    if kind == LambdaKind::Joint {
        return Err(Error::WrongLambdaKind {
            expected: "AB or CD",
            got: kind.name(),
        });
    }
    if rho.dims()[0] != basis_left.dim() || rho.dims()[1] != basis_right.dim() {
        return Err(Error::DimensionMismatch(
            rho.dim(),
            basis_left.dim() * basis_right.dim(),
        ));
    }
    let root = sqrt_psd(rho)?;
    let (m2, n2) = (basis_left.len(), basis_right.len());
    let mut entries = DMatrix::zeros(m2, n2);
    for i in 0..m2 {
        for j in 0..n2 {
            let op = basis_left.element(i).kronecker(basis_right.element(j));
            entries[(i, j)] = (&root * op).trace().re;
        }
    }
    Ok(LambdaMatrix {
        entries,
        kind,
        factor_sizes: (m2, n2),
    })
}

/// Rearranged outer product `Lambda_{ab,cd}` of the two marginal lambda
/// matrices: entry `((j,k),(i,l)) = lambda^{ab}_{ij} lambda^{cd}_{kl}`.
pub fn joint_lambda(lab: &LambdaMatrix, lcd: &LambdaMatrix) -> Result<LambdaMatrix> {
    if lab.kind != LambdaKind::Ab {
        return Err(Error::WrongLambdaKind {
            expected: "AB",
            got: lab.kind.name(),
        });
    }
    if lcd.kind != LambdaKind::Cd {
        return Err(Error::WrongLambdaKind {
            expected: "CD",
            got: lcd.kind.name(),
        });
    }
    let (m2, n2) = lab.factor_sizes;
    let (u2, v2) = lcd.factor_sizes;
    let mut entries = DMatrix::zeros(n2 * u2, m2 * v2);
    for i in 0..m2 {
        for j in 0..n2 {
            let a = lab.entries[(i, j)];
            if a == 0.0 {
                continue;
            }
            for k in 0..u2 {
                for l in 0..v2 {
                    entries[(j * u2 + k, i * v2 + l)] = a * lcd.entries[(k, l)];
                }
            }
        }
    }
    Ok(LambdaMatrix {
        entries,
        kind: LambdaKind::Joint,
        factor_sizes: (n2 * u2, m2 * v2),
    })
}

/// Real matrix of a rank-1 complete measurement against a product operator
/// basis: `gamma_{h,(j,k)} = Tr(Pi_h (Y_j (x) P_k))`. Rows are orthonormal.
#[derive(Debug, Clone)]
pub struct GammaMatrix {
    entries: DMatrix<f64>,
}

impl GammaMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `Tr(Gamma M M^t Gamma^t)` for a JOINT lambda matrix; equals the
    /// affinity between the pre- and post-measurement square-root states.
    pub fn sandwich_trace(&self, joint: &LambdaMatrix) -> f64 {
        let gm = &self.entries * joint.entries();
        (&gm * gm.transpose()).trace()
    }
}

/// Builds the Gamma matrix of a rank-1 complete projective measurement on
/// the composite space of the two given bases.
pub fn gamma_of(
    meas: &ProjectiveMeasurement,
    basis_left: &HermitianBasis,
    basis_right: &HermitianBasis,
) -> Result<GammaMatrix> {
    let nu = basis_left.dim() * basis_right.dim();
    if meas.projector_dim() != nu {
        return Err(Error::DimensionMismatch(meas.projector_dim(), nu));
    }
    meas.require_rank_one()?;
    let (n2, u2) = (basis_left.len(), basis_right.len());
    let mut entries = DMatrix::zeros(meas.outcomes(), n2 * u2);
    for (h, p) in meas.projectors().iter().enumerate() {
        for j in 0..n2 {
            for k in 0..u2 {
                let op = basis_left.element(j).kronecker(basis_right.element(k));
                entries[(h, j * u2 + k)] = (p * op).trace().re;
            }
        }
    }
    Ok(GammaMatrix { entries })
}
