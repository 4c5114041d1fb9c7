//! Finite-dimensional complex Hilbert-space linear algebra: states, tensor
//! products, partial traces, spectral decompositions, PSD square roots,
//! Schmidt decomposition and affinity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Max elementwise deviation from Hermiticity tolerated on construction.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace-one tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues below `-PSD_TOL` are a hard error.
pub const PSD_TOL: f64 = 1e-10;
/// Ket normalization tolerance.
pub const KET_NORM_TOL: f64 = 1e-12;
/// Relative gap below which two eigenvalues count as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Eigenvalues in `[-PSD_TOL, SQRT_ZERO_CLIP)` are clipped to zero before
/// taking square roots. Spurious `~1e-17` eigenvalues of rank-deficient
/// states would otherwise inject `~1e-9` errors through their square roots.
pub const SQRT_ZERO_CLIP: f64 = 1e-12;
/// Total-dimension cap for all operations.
pub const DIMENSION_CAP: usize = 4096;

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Row-major strides for a list of subsystem dimensions.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Linear offsets contributed by every multi-index over `sub` (a subset of
/// subsystem positions), using the full-space strides.
pub(crate) fn subspace_offsets(dims: &[usize], sub: &[usize]) -> Vec<usize> {
    let full = strides(dims);
    let sub_dims: Vec<usize> = sub.iter().map(|&i| dims[i]).collect();
    let n = product(&sub_dims);
    let mut out = Vec::with_capacity(n);
    for lin in 0..n {
        let mut rem = lin;
        let mut off = 0;
        for (k, &d) in sub_dims.iter().enumerate().rev() {
            off += (rem % d) * full[sub[k]];
            rem /= d;
        }
        out.push(off);
    }
    out
}

pub(crate) fn check_subsystems(indices: &[usize], count: usize) -> Result<()> {
    let mut seen = vec![false; count];
    for &i in indices {
        if i >= count || seen[i] {
            return Err(Error::InvalidSubsystems {
                indices: indices.to_vec(),
                count,
            });
        }
        seen[i] = true;
    }
    Ok(())
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Hermitian eigendecomposition with eigenvalues sorted in decreasing order
/// and a fixed per-column phase convention for reproducibility.
pub fn eigh_desc(m: &CMat) -> (DVector<f64>, CMat) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut vals = DVector::zeros(n);
    let mut vecs = CMat::zeros(n, n);
    for (k, &idx) in order.iter().enumerate() {
        vals[k] = eig.eigenvalues[idx];
        let col = eig.eigenvectors.column(idx);
        // make the largest-magnitude component real and positive
        let mut pivot = 0;
        for i in 1..n {
            if col[i].norm() > col[pivot].norm() {
                pivot = i;
            }
        }
        let phase = if col[pivot].norm() > 0.0 {
            col[pivot].conj() / C64::from(col[pivot].norm())
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            vecs[(i, k)] = col[i] * phase;
        }
    }
    (vals, vecs)
}

/// Groups eigenvalues (sorted decreasing) into degenerate blocks.
/// Returns `(offset, len)` pairs covering the spectrum.
pub fn cluster_spectrum(eigs: &[f64]) -> Vec<(usize, usize)> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..eigs.len() {
        let gap = (eigs[i - 1] - eigs[i]).abs();
        if gap >= DEGENERACY_GAP * eigs[i - 1].abs().max(1.0) {
            blocks.push((start, i - start));
            start = i;
        }
    }
    if !eigs.is_empty() {
        blocks.push((start, eigs.len() - start));
    }
    blocks
}

/// Normalized pure state with an attached subsystem-dimension list.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: CVec,
    dims: Vec<usize>,
}

impl Ket {
    pub fn new(amplitudes: CVec, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) || product(&dims) != amplitudes.len() {
            return Err(Error::DimsMismatch {
                dims,
                len: amplitudes.len(),
            });
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::NotNormalized((norm2 - 1.0).abs()));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Computational basis state `|index>` in the given dimensions.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let d = product(&dims);
        if index >= d {
            return Err(Error::InvalidSubsystems {
                indices: vec![index],
                count: d,
            });
        }
        let mut amps = CVec::zeros(d);
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps, dims)
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Rank-1 density operator `|psi><psi|`.
    pub fn density(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator {
            matrix: m,
            dims: self.dims.clone(),
        }
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ket {
            amplitudes: DVector::from_column_slice(amps.as_slice()),
            dims,
        }
    }
}

/// Trace-one positive semidefinite operator with subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMat,
    dims: Vec<usize>,
}

impl DensityOperator {
    pub fn new(matrix: CMat, dims: Vec<usize>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if dims.is_empty() || dims.contains(&0) || product(&dims) != matrix.nrows() {
            return Err(Error::DimsMismatch {
                dims,
                len: matrix.nrows(),
            });
        }
        if matrix.nrows() > DIMENSION_CAP {
            return Err(Error::DimensionCap {
                dim: matrix.nrows(),
                cap: DIMENSION_CAP,
            });
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne((tr.re - 1.0).abs().max(tr.im.abs())));
        }
        let (vals, _) = eigh_desc(&matrix);
        let min = vals[vals.len() - 1];
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix, dims })
    }

    pub fn from_pure(psi: &Ket) -> Self {
        psi.density()
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d = product(&dims);
        let m = CMat::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        Self { matrix: m, dims }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_bipartite(&self) -> bool {
        self.dims.len() == 2
    }

    pub fn require_bipartite(&self) -> Result<()> {
        if self.is_bipartite() {
            Ok(())
        } else {
            Err(Error::NotBipartite(self.dims.len()))
        }
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Reinterprets the same matrix with a different factorization.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        if product(&dims) != self.dim() || dims.contains(&0) {
            return Err(Error::DimsMismatch {
                dims,
                len: self.dim(),
            });
        }
        Ok(Self {
            matrix: self.matrix.clone(),
            dims,
        })
    }

    pub fn eigenvalues_desc(&self) -> DVector<f64> {
        eigh_desc(&self.matrix).0
    }

    /// True when every eigenvalue sits in its own degeneracy block.
    pub fn is_nondegenerate(&self) -> bool {
        let vals = self.eigenvalues_desc();
        cluster_spectrum(vals.as_slice()).iter().all(|&(_, l)| l == 1)
    }
}

/// Kronecker product of two states, with concatenated dimension lists.
pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let m = a.matrix.kronecker(&b.matrix);
    if m.nrows() > DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim: m.nrows(),
            cap: DIMENSION_CAP,
        });
    }
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Ok(DensityOperator { matrix: m, dims })
}

/// Traces out every subsystem not listed in `keep`. Kept factors stay in
/// their original order. An empty `keep` yields the scalar full trace as a
/// one-dimensional state.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let dims = rho.dims();
    check_subsystems(keep, dims.len())?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_off = subspace_offsets(dims, &keep);
    let traced_off = subspace_offsets(dims, &traced);
    let out_dims: Vec<usize> = if keep.is_empty() {
        vec![1]
    } else {
        keep.iter().map(|&i| dims[i]).collect()
    };
    let n = keep_off.len();
    let mut out = CMat::zeros(n, n);
    let m = rho.matrix();
    for r in 0..n {
        for c in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += m[(keep_off[r] + t, keep_off[c] + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DensityOperator {
        matrix: out,
        dims: out_dims,
    })
}

/// Reorders subsystem factors: output factor `k` is input factor `perm[k]`.
pub fn permute_subsystems(rho: &DensityOperator, perm: &[usize]) -> Result<DensityOperator> {
    let dims = rho.dims();
    if perm.len() != dims.len() {
        return Err(Error::InvalidSubsystems {
            indices: perm.to_vec(),
            count: dims.len(),
        });
    }
    check_subsystems(perm, dims.len())?;
    let new_dims: Vec<usize> = perm.iter().map(|&i| dims[i]).collect();
    let d = rho.dim();
    let old_strides = strides(dims);
    let new_strides = strides(&new_dims);
    // map old linear index -> new linear index
    let mut map = vec![0usize; d];
    for (old, m) in map.iter_mut().enumerate() {
        let mut rem = old;
        let mut multi = vec![0usize; dims.len()];
        for (i, &dd) in dims.iter().enumerate() {
            multi[i] = rem / old_strides[i] % dd;
            let _ = dd;
            rem %= old_strides[i];
        }
        let mut new = 0;
        for k in 0..dims.len() {
            new += multi[perm[k]] * new_strides[k];
        }
        *m = new;
    }
    let mut out = CMat::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            out[(map[r], map[c])] = rho.matrix[(r, c)];
        }
    }
    Ok(DensityOperator {
        matrix: out,
        dims: new_dims,
    })
}

/// Swaps the two factors of a bipartite state.
pub fn swap_bipartite(rho: &DensityOperator) -> Result<DensityOperator> {
    rho.require_bipartite()?;
    permute_subsystems(rho, &[1, 0])
}

/// Hermitian PSD square root via spectral decomposition. Eigenvalues in
/// `[-PSD_TOL, SQRT_ZERO_CLIP)` are clipped to zero; anything more negative
/// is an error.
pub fn sqrt_psd(rho: &DensityOperator) -> Result<CMat> {
    let (vals, vecs) = eigh_desc(&rho.matrix);
    let n = vals.len();
    let mut roots = DVector::zeros(n);
    for i in 0..n {
        let v = vals[i];
        if v < -PSD_TOL {
            return Err(Error::NotPositive(v));
        }
        roots[i] = if v < SQRT_ZERO_CLIP { 0.0 } else { v.sqrt() };
    }
    let mut out = CMat::zeros(n, n);
    for k in 0..n {
        if roots[k] == 0.0 {
            continue;
        }
        let col = vecs.column(k);
        let w = C64::from(roots[k]);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += col[i] * col[j].conj() * w;
            }
        }
    }
    Ok(out)
}

/// Affinity `Tr(sqrt(rho) sqrt(sigma))` between two states of equal total
/// dimension. Symmetric in its arguments and multiplicative over tensor
/// products.
pub fn affinity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let a = sqrt_psd(rho)?;
    let b = sqrt_psd(sigma)?;
    Ok((a * b).trace().re)
}

/// Schmidt decomposition of a bipartite pure state.
///
/// Coefficients are the singular values of the amplitude matrix, reported in
/// nonincreasing order; their squares sum to one.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<CVec>,
    pub right_basis: Vec<CVec>,
}

impl SchmidtForm {
    /// Rebuilds `sum_k c_k |l_k> (x) |r_k>` as an amplitude vector.
    pub fn reconstruct(&self) -> CVec {
        let m = self.left_basis[0].len();
        let n = self.right_basis[0].len();
        let mut out = CVec::zeros(m * n);
        for (k, &c) in self.coefficients.iter().enumerate() {
            for i in 0..m {
                for j in 0..n {
                    out[i * n + j] += C64::from(c) * self.left_basis[k][i] * self.right_basis[k][j];
                }
            }
        }
        out
    }
}

/// Schmidt decomposition via SVD of the row-major amplitude matrix.
pub fn schmidt(psi: &Ket) -> Result<SchmidtForm> {
    if psi.dims().len() != 2 {
        return Err(Error::NotBipartite(psi.dims().len()));
    }
    let (m, n) = (psi.dims()[0], psi.dims()[1]);
    let mut a = CMat::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = psi.amplitudes()[i * n + j];
        }
    }
    let svd = a.svd(true, true);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].partial_cmp(&svd.singular_values[x]).unwrap());
    let mut coefficients = Vec::with_capacity(k);
    let mut left_basis = Vec::with_capacity(k);
    let mut right_basis = Vec::with_capacity(k);
    for &idx in &order {
        coefficients.push(svd.singular_values[idx]);
        left_basis.push(u.column(idx).clone_owned());
        right_basis.push(v_t.row(idx).transpose());
    }
    Ok(SchmidtForm {
        coefficients,
        left_basis,
        right_basis,
    })
}

fn complex_normal<R: rand::Rng>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * C64::from(std::f64::consts::FRAC_1_SQRT_2)
}

/// Haar-distributed pure state, deterministic under the seed.
pub fn random_ket(dims: &[usize], seed: u64) -> Result<Ket> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_ket_with_rng(dims, &mut rng)
}

pub fn random_ket_with_rng<R: rand::Rng>(dims: &[usize], rng: &mut R) -> Result<Ket> {
    let d = product(dims);
    let mut amps = CVec::zeros(d);
    for i in 0..d {
        amps[i] = complex_normal(rng);
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps /= C64::from(norm);
    Ket::new(amps, dims.to_vec())
}

/// Ginibre-induced random mixed state of the requested rank.
pub fn random_state(dims: &[usize], rank: usize, seed: u64) -> Result<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with_rng(dims, rank, &mut rng)
}

pub fn random_state_with_rng<R: rand::Rng>(
    dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    let d = product(dims);
    if rank == 0 || rank > d {
        return Err(Error::RankOutOfRange { rank, dim: d });
    }
    let mut g = CMat::zeros(d, rank);
    for i in 0..d {
        for j in 0..rank {
            g[(i, j)] = complex_normal(rng);
        }
    }
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= C64::from(tr);
    // re-symmetrize against rounding drift
    let m = (&m + m.adjoint()) * C64::from(0.5);
    DensityOperator::new(m, dims.to_vec())
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the standard
/// phase correction.
pub fn haar_unitary_with_rng<R: rand::Rng>(dim: usize, rng: &mut R) -> CMat {
    let mut g = CMat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = complex_normal(rng);
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / C64::from(rjj.norm())
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary(dim: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_with_rng(dim, &mut rng)
}

/// Haar-random local unitary `U_0 (x) U_1 (x) ...` matching the dims list.
pub fn random_local_unitary(dims: &[usize], seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = CMat::identity(1, 1);
    for &d in dims {
        u = u.kronecker(&haar_unitary_with_rng(d, &mut rng));
    }
    u
}

/// Conjugates a state by a (unitary) matrix: `U rho U^dag`.
pub fn conjugate(rho: &DensityOperator, u: &CMat) -> Result<DensityOperator> {
    if u.nrows() != rho.dim() || u.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch(u.nrows(), rho.dim()));
    }
    let m = u * &rho.matrix * u.adjoint();
    let m = (&m + m.adjoint()) * C64::from(0.5);
    DensityOperator::new(m, rho.dims().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statespec::{bell_phi_plus, example3_mix, example4_classical, ket00};
    use approx::assert_abs_diff_eq;

    fn frob_diff(a: &CMat, b: &CMat) -> f64 {
        (a - b).norm()
    }

    #[test]
    fn tensor_of_rank_one_projectors() {
        let zero = Ket::basis(vec![2], 0).unwrap().density();
        let prod = tensor(&zero, &zero).unwrap();
        let expected = Ket::basis(vec![2, 2], 0).unwrap().density();
        assert!(frob_diff(prod.matrix(), expected.matrix()) < 1e-14);
        assert_eq!(prod.dims(), &[2, 2]);
    }

    #[test]
    fn tensor_of_example4_inputs_is_diagonal_quarter() {
        let rho = example4_classical();
        let tau = tensor(&rho, &rho).unwrap();
        assert_eq!(tau.dim(), 16);
        // direct Kronecker expansion: entries 1/4 at |0000>, |0011>, |1100>, |1111>
        for i in 0..16 {
            for j in 0..16 {
                let expected = if i == j && matches!(i, 0 | 3 | 12 | 15) {
                    0.25
                } else {
                    0.0
                };
                assert_abs_diff_eq!(tau.matrix()[(i, j)].re, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(tau.matrix()[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn tensor_with_maximally_mixed_scales_spectrum() {
        let rho = random_state(&[4], 3, 7).unwrap().with_dims(vec![4]).unwrap();
        let mixed = DensityOperator::maximally_mixed(vec![3]);
        let prod = tensor(&rho, &mixed).unwrap();
        let mut spec_rho: Vec<f64> = rho.eigenvalues_desc().iter().map(|v| v / 3.0).collect();
        let mut spec_prod: Vec<f64> = prod.eigenvalues_desc().iter().copied().collect();
        spec_rho.sort_by(|a, b| b.partial_cmp(a).unwrap());
        spec_prod.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (i, &v) in spec_rho.iter().enumerate() {
            // each eigenvalue of rho appears 3 times scaled by 1/3
            assert_abs_diff_eq!(spec_prod[3 * i], v, epsilon = 1e-12);
            assert_abs_diff_eq!(spec_prod[3 * i + 2], v, epsilon = 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_double_bell_keep_bc_is_maximally_mixed() {
        let bell = bell_phi_plus().density();
        let tau = tensor(&bell, &bell).unwrap();
        let bc = partial_trace(&tau, &[1, 2]).unwrap();
        assert_eq!(bc.dims(), &[2, 2]);
        let expected = DensityOperator::maximally_mixed(vec![2, 2]);
        assert!(frob_diff(bc.matrix(), expected.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_keeping_nothing_is_full_trace() {
        let rho = random_state(&[2, 3], 4, 1).unwrap();
        let t = partial_trace(&rho, &[]).unwrap();
        assert_eq!(t.dim(), 1);
        assert_abs_diff_eq!(t.matrix()[(0, 0)].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_example4_marginal_is_maximally_mixed() {
        let rho = example4_classical();
        let a = partial_trace(&rho, &[0]).unwrap();
        let expected = DensityOperator::maximally_mixed(vec![2]);
        assert!(frob_diff(a.matrix(), expected.matrix()) < 1e-14);
    }

    #[test]
    fn partial_trace_undoes_tensor() {
        let rho = random_state(&[2, 2], 4, 3).unwrap();
        let sigma = random_state(&[3], 2, 4).unwrap();
        let prod = tensor(&rho, &sigma).unwrap();
        let back = partial_trace(&prod, &[0, 1]).unwrap();
        assert!(frob_diff(back.matrix(), rho.matrix()) < 1e-10);
    }

    #[test]
    fn partial_trace_rejects_bad_indices() {
        let rho = random_state(&[2, 2], 2, 5).unwrap();
        assert!(partial_trace(&rho, &[2]).is_err());
        assert!(partial_trace(&rho, &[0, 0]).is_err());
    }

    #[test]
    fn sqrt_of_example3_state_is_scaled_state() {
        let rho = example3_mix();
        let root = sqrt_psd(&rho).unwrap();
        let expected = rho.matrix() * C64::from(3.0f64.sqrt());
        assert!(frob_diff(&root, &expected) < 1e-12);
    }

    #[test]
    fn sqrt_of_pure_projector_is_itself() {
        let p = random_ket(&[2, 2], 11).unwrap().density();
        let root = sqrt_psd(&p).unwrap();
        assert!(frob_diff(&root, p.matrix()) < 1e-10);
    }

    #[test]
    fn sqrt_squares_back_to_state() {
        for seed in 0..10u64 {
            let rho = random_state(&[4], 4, seed).unwrap();
            let root = sqrt_psd(&rho).unwrap();
            assert!(frob_diff(&(&root * &root), rho.matrix()) < 1e-9);
        }
    }

    #[test]
    fn affinity_of_state_with_itself_is_one() {
        let rho = random_state(&[2, 2], 3, 9).unwrap();
        assert_abs_diff_eq!(affinity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn affinity_of_orthogonal_pure_states_is_zero() {
        let zero = Ket::basis(vec![2], 0).unwrap().density();
        let one = Ket::basis(vec![2], 1).unwrap().density();
        assert_abs_diff_eq!(affinity(&zero, &one).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn affinity_is_multiplicative_over_tensor_products() {
        for seed in 0..20u64 {
            let r1 = random_state(&[2], 2, 4 * seed).unwrap();
            let r2 = random_state(&[2], 2, 4 * seed + 1).unwrap();
            let s1 = random_state(&[2], 2, 4 * seed + 2).unwrap();
            let s2 = random_state(&[2], 2, 4 * seed + 3).unwrap();
            let lhs = affinity(&tensor(&r1, &r2).unwrap(), &tensor(&s1, &s2).unwrap()).unwrap();
            let rhs = affinity(&r1, &s1).unwrap() * affinity(&r2, &s2).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
        }
    }

    #[test]
    fn affinity_rejects_dimension_mismatch() {
        let a = random_state(&[2], 2, 0).unwrap();
        let b = random_state(&[3], 2, 0).unwrap();
        assert!(affinity(&a, &b).is_err());
    }

    #[test]
    fn schmidt_of_ket00() {
        let form = schmidt(&ket00()).unwrap();
        assert_abs_diff_eq!(form.coefficients[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(form.coefficients[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_of_bell_state() {
        let form = schmidt(&bell_phi_plus()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(form.coefficients[0], s, epsilon = 1e-12);
        assert_abs_diff_eq!(form.coefficients[1], s, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_of_product_ket_has_single_coefficient() {
        let phi = random_ket(&[2], 21).unwrap();
        let chi = random_ket(&[3], 22).unwrap();
        let prod = phi.tensor(&chi);
        let form = schmidt(&prod).unwrap();
        assert_abs_diff_eq!(form.coefficients[0], 1.0, epsilon = 1e-10);
        for &c in &form.coefficients[1..] {
            assert_abs_diff_eq!(c, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn schmidt_reconstruction() {
        for seed in 0..10u64 {
            let psi = random_ket(&[2, 3], 100 + seed).unwrap();
            let form = schmidt(&psi).unwrap();
            let rebuilt = form.reconstruct();
            let diff: f64 = (psi.amplitudes() - rebuilt).norm();
            assert!(diff < 1e-10, "seed {seed}: diff {diff}");
        }
    }

    #[test]
    fn schmidt_rejects_non_bipartite() {
        let psi = random_ket(&[2, 2, 2], 1).unwrap();
        assert!(schmidt(&psi).is_err());
    }

    #[test]
    fn random_rank_one_state_is_pure() {
        let rho = random_state(&[2, 2], 1, 5).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn random_state_is_deterministic_under_seed() {
        let a = random_state(&[2, 2], 3, 42).unwrap();
        let b = random_state(&[2, 2], 3, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let k1 = random_ket(&[2, 2], 42).unwrap();
        let k2 = random_ket(&[2, 2], 42).unwrap();
        assert_eq!(k1.amplitudes(), k2.amplitudes());
    }

    #[test]
    fn random_full_rank_states_are_mixed_on_average() {
        let mean: f64 = (0..100u64)
            .map(|s| random_state(&[4], 4, s).unwrap().purity())
            .sum::<f64>()
            / 100.0;
        assert!(mean < 1.0, "mean purity {mean}");
        assert!(mean > 0.25);
    }

    #[test]
    fn random_state_rejects_bad_rank() {
        assert!(random_state(&[2], 0, 1).is_err());
        assert!(random_state(&[2], 3, 1).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u = haar_unitary(4, 8);
        let defect = (u.adjoint() * &u - CMat::identity(4, 4)).norm();
        assert!(defect < 1e-12);
    }

    #[test]
    fn swap_is_an_involution() {
        let rho = random_state(&[2, 3], 4, 17).unwrap();
        let back = swap_bipartite(&swap_bipartite(&rho).unwrap()).unwrap();
        assert!(frob_diff(back.matrix(), rho.matrix()) < 1e-14);
        let swapped = swap_bipartite(&rho).unwrap();
        assert_eq!(swapped.dims(), &[3, 2]);
    }

    #[test]
    fn cluster_spectrum_merges_degenerate_levels() {
        let blocks = cluster_spectrum(&[0.5, 0.5, 0.25, 0.25]);
        assert_eq!(blocks, vec![(0, 2), (2, 2)]);
        let blocks = cluster_spectrum(&[0.7, 0.2, 0.1]);
        assert_eq!(blocks, vec![(0, 1), (1, 1), (2, 1)]);
        let blocks = cluster_spectrum(&[0.25; 4]);
        assert_eq!(blocks, vec![(0, 4)]);
    }

    #[test]
    fn density_operator_rejects_invalid_input() {
        let m = CMat::identity(2, 2);
        assert!(DensityOperator::new(m.clone(), vec![2]).is_err()); // trace 2
        let mut bad = m * C64::from(0.5);
        bad[(0, 1)] = C64::new(0.3, 0.1);
        assert!(DensityOperator::new(bad, vec![2]).is_err()); // not hermitian
        let mut neg = CMat::zeros(2, 2);
        neg[(0, 0)] = C64::from(1.5);
        neg[(1, 1)] = C64::from(-0.5);
        assert!(matches!(
            DensityOperator::new(neg, vec![2]),
            Err(Error::NotPositive(_))
        ));
    }
}
