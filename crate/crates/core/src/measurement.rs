//! Von Neumann projective measurements, the post-measurement map, and the
//! manifold of measurements leaving a designated marginal invariant.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::build_basis;
use crate::error::{Error, Result};
use crate::hilbert::{
    check_subsystems, cluster_spectrum, eigh_desc, haar_unitary_with_rng, subspace_offsets, C64,
    CMat, DensityOperator,
};

const PROJECTOR_TOL: f64 = 1e-10;

/// Complete set of mutually orthogonal projectors acting on a designated
/// subset of subsystem factors.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    target: Vec<usize>,
    projectors: Vec<CMat>,
}

impl ProjectiveMeasurement {
    pub fn new(target: Vec<usize>, projectors: Vec<CMat>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::InvalidProjectors(f64::INFINITY));
        }
        let d = projectors[0].nrows();
        let mut worst = 0.0f64;
        let mut sum = CMat::zeros(d, d);
        for p in &projectors {
            if p.nrows() != d || p.ncols() != d {
                return Err(Error::DimensionMismatch(p.nrows(), d));
            }
            let herm = crate::hilbert::hermiticity_defect(p);
            let idem = (p * p - p).camax();
            worst = worst.max(herm).max(idem);
            sum += p;
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                worst = worst.max((&projectors[i] * &projectors[j]).camax());
            }
        }
        worst = worst.max((sum - CMat::identity(d, d)).camax());
        if worst > PROJECTOR_TOL {
            return Err(Error::InvalidProjectors(worst));
        }
        Ok(Self { target, projectors })
    }

    /// Rank-1 measurement from the columns of an orthonormal basis matrix.
    pub fn from_basis_columns(target: Vec<usize>, basis: &CMat) -> Result<Self> {
        let mut projectors = Vec::with_capacity(basis.ncols());
        for j in 0..basis.ncols() {
            let col = basis.column(j);
            projectors.push(&col * col.adjoint());
        }
        Self::new(target, projectors)
    }

    /// Computational-basis measurement on a `dim`-dimensional target.
    pub fn computational(target: Vec<usize>, dim: usize) -> Self {
        let mut projectors = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut p = CMat::zeros(dim, dim);
            p[(k, k)] = C64::new(1.0, 0.0);
            projectors.push(p);
        }
        Self { target, projectors }
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    pub fn projectors(&self) -> &[CMat] {
        &self.projectors
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn projector_dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn is_rank_one(&self) -> bool {
        self.projectors
            .iter()
            .all(|p| (p.trace().re - 1.0).abs() < 1e-8)
    }

    pub fn require_rank_one(&self) -> Result<()> {
        for (h, p) in self.projectors.iter().enumerate() {
            let tr = p.trace().re;
            if (tr - 1.0).abs() > 1e-8 {
                return Err(Error::NotRankOne(h, tr));
            }
        }
        Ok(())
    }

    /// Projectors embedded into the full space described by `dims`, with
    /// identity on every non-target factor.
    pub fn embedded_projectors(&self, dims: &[usize]) -> Result<Vec<CMat>> {
        check_subsystems(&self.target, dims.len())?;
        let mut target = self.target.clone();
        target.sort_unstable();
        let target_dim: usize = target.iter().map(|&i| dims[i]).product();
        if target_dim != self.projector_dim() {
            return Err(Error::DimensionMismatch(target_dim, self.projector_dim()));
        }
        let other: Vec<usize> = (0..dims.len()).filter(|i| !target.contains(i)).collect();
        let t_off = subspace_offsets(dims, &target);
        let o_off = subspace_offsets(dims, &other);
        let full: usize = dims.iter().product();
        let mut out = Vec::with_capacity(self.projectors.len());
        for p in &self.projectors {
            let mut e = CMat::zeros(full, full);
            for (rt, &ro) in t_off.iter().enumerate() {
                for (ct, &co) in t_off.iter().enumerate() {
                    let val = p[(rt, ct)];
                    if val.norm_sqr() == 0.0 {
                        continue;
                    }
                    for &o in &o_off {
                        e[(ro + o, co + o)] = val;
                    }
                }
            }
            out.push(e);
        }
        Ok(out)
    }

    /// Post-measurement map `sum_k E_k X E_k` on an operator over the full
    /// space `dims`; preserves trace and Hermiticity.
    pub fn apply(&self, op: &CMat, dims: &[usize]) -> Result<CMat> {
        let full: usize = dims.iter().product();
        if op.nrows() != full || op.ncols() != full {
            return Err(Error::DimensionMismatch(op.nrows(), full));
        }
        let embedded = self.embedded_projectors(dims)?;
        let mut out = CMat::zeros(full, full);
        for e in &embedded {
            out += e * op * e;
        }
        Ok(out)
    }

    /// Post-measurement map with the projectors acting on the whole space.
    pub fn apply_local(&self, op: &CMat) -> Result<CMat> {
        let d = self.projector_dim();
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch(op.nrows(), d));
        }
        let mut out = CMat::zeros(d, d);
        for p in &self.projectors {
            out += p * op * p;
        }
        Ok(out)
    }

    /// Applies the map to a density operator and revalidates the result.
    pub fn apply_state(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let m = self.apply(rho.matrix(), rho.dims())?;
        let m = (&m + m.adjoint()) * C64::from(0.5);
        DensityOperator::new(m, rho.dims().to_vec())
    }
}

/// `exp(i H)` for Hermitian `H`, via spectral decomposition.
pub fn exp_i_hermitian(h: &CMat) -> CMat {
    debug_assert!(crate::hilbert::hermiticity_defect(h) < 1e-8);
    let (vals, vecs) = eigh_desc(h);
    let n = vals.len();
    let mut out = CMat::zeros(n, n);
    for k in 0..n {
        let w = C64::new(0.0, vals[k]).exp();
        let col = vecs.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += col[i] * col[j].conj() * w;
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
struct EigenBlock {
    eigenvalue: f64,
    offset: usize,
    dim: usize,
}

/// Parameterized manifold of rank-1 projective measurements that leave a
/// given marginal state invariant: all bases obtained by block-diagonal
/// unitaries over the marginal's degenerate eigenspaces.
#[derive(Debug, Clone)]
pub struct InvariantMeasurementFamily {
    marginal: DensityOperator,
    target: Vec<usize>,
    /// columns: orthonormal basis ordered block by block, each column
    /// inside a single eigenspace of the marginal
    base: CMat,
    blocks: Vec<EigenBlock>,
}

/// Constructs the invariant family of a marginal. Eigenvalues are clustered
/// into degenerate blocks by the relative-gap rule; produced measurements
/// carry `target` as their subsystem index set.
pub fn eigen_family(marginal: &DensityOperator, target: Vec<usize>) -> InvariantMeasurementFamily {
    let (vals, vecs) = eigh_desc(marginal.matrix());
    let clusters = cluster_spectrum(vals.as_slice());
    let blocks = clusters
        .iter()
        .map(|&(offset, dim)| EigenBlock {
            eigenvalue: vals[offset],
            offset,
            dim,
        })
        .collect();
    InvariantMeasurementFamily {
        marginal: marginal.clone(),
        target,
        base: vecs,
        blocks,
    }
}

impl InvariantMeasurementFamily {
    pub fn marginal(&self) -> &DensityOperator {
        &self.marginal
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    pub fn space_dim(&self) -> usize {
        self.base.nrows()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }

    pub fn block_eigenvalues(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.eigenvalue).collect()
    }

    /// Total real parameters: `sum d_block^2`.
    pub fn parameter_count(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// True when every block is one-dimensional; the family then contains a
    /// single measurement up to phases.
    pub fn is_trivial(&self) -> bool {
        self.blocks.iter().all(|b| b.dim == 1)
    }

    /// The measurement in the family's reference basis (zero parameters).
    pub fn base_measurement(&self) -> ProjectiveMeasurement {
        self.measurement_from_block_unitaries(&[]).unwrap()
    }

    /// Measurement at a parameter point: per block, the parameters are the
    /// real coefficients of a Hermitian generator in the block's operator
    /// basis and the block unitary is its exponential.
    pub fn measurement_at(&self, params: &[f64]) -> Result<ProjectiveMeasurement> {
        let expected = self.parameter_count();
        if params.len() != expected {
            return Err(Error::BadParameterCount {
                expected,
                got: params.len(),
            });
        }
        let mut unitaries = Vec::with_capacity(self.blocks.len());
        let mut cursor = 0;
        for b in &self.blocks {
            let n = b.dim * b.dim;
            let coeffs = &params[cursor..cursor + n];
            cursor += n;
            if b.dim == 1 {
                let u = CMat::from_element(1, 1, C64::new(0.0, coeffs[0]).exp());
                unitaries.push(u);
            } else {
                let basis = build_basis(b.dim).expect("block dim >= 2");
                let h = basis.assemble(coeffs);
                unitaries.push(exp_i_hermitian(&h));
            }
        }
        self.measurement_from_block_unitaries(&unitaries)
    }

    /// Haar-random measurement from the family, deterministic under seed.
    pub fn haar_sample(&self, seed: u64) -> ProjectiveMeasurement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unitaries: Vec<CMat> = self
            .blocks
            .iter()
            .map(|b| haar_unitary_with_rng(b.dim, &mut rng))
            .collect();
        self.measurement_from_block_unitaries(&unitaries)
            .expect("haar blocks match family")
    }

    /// Family with its reference basis rotated by Haar block unitaries.
    /// Zero parameters on the result reproduce `haar_sample(seed)`.
    pub fn rebased_haar(&self, seed: u64) -> InvariantMeasurementFamily {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let unitaries: Vec<CMat> = self
            .blocks
            .iter()
            .map(|b| haar_unitary_with_rng(b.dim, &mut rng))
            .collect();
        let base = self.rotated_base(&unitaries).expect("haar blocks match");
        InvariantMeasurementFamily {
            marginal: self.marginal.clone(),
            target: self.target.clone(),
            base,
            blocks: self.blocks.clone(),
        }
    }

    /// Reanchors the family at a candidate orthonormal basis, if each of its
    /// columns lies inside a single eigenspace block. Zero parameters on the
    /// result reproduce the candidate basis measurement.
    pub fn rebased(&self, candidate: &CMat) -> Result<InvariantMeasurementFamily> {
        let d = self.space_dim();
        if candidate.nrows() != d || candidate.ncols() != d {
            return Err(Error::DimensionMismatch(candidate.nrows(), d));
        }
        // coordinates of the candidate columns in the eigenbasis
        let coords = self.base.adjoint() * candidate;
        let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); self.blocks.len()];
        for col in 0..d {
            let mut found = None;
            for (bi, b) in self.blocks.iter().enumerate() {
                let mut w = 0.0;
                for r in b.offset..b.offset + b.dim {
                    w += coords[(r, col)].norm_sqr();
                }
                if w > 1.0 - 1e-9 {
                    found = Some(bi);
                    break;
                }
            }
            match found {
                Some(bi) => assigned[bi].push(col),
                None => return Err(Error::IncompatibleBasis),
            }
        }
        for (bi, b) in self.blocks.iter().enumerate() {
            if assigned[bi].len() != b.dim {
                return Err(Error::IncompatibleBasis);
            }
        }
        let mut base = CMat::zeros(d, d);
        let mut k = 0;
        for cols in &assigned {
            for &c in cols {
                base.set_column(k, &candidate.column(c));
                k += 1;
            }
        }
        Ok(InvariantMeasurementFamily {
            marginal: self.marginal.clone(),
            target: self.target.clone(),
            base,
            blocks: self.blocks.clone(),
        })
    }

    fn rotated_base(&self, unitaries: &[CMat]) -> Result<CMat> {
        let mut out = self.base.clone();
        if unitaries.is_empty() {
            return Ok(out);
        }
        if unitaries.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch(unitaries.len(), self.blocks.len()));
        }
        for (b, u) in self.blocks.iter().zip(unitaries) {
            if u.nrows() != b.dim {
                return Err(Error::DimensionMismatch(u.nrows(), b.dim));
            }
            let cols = self.base.columns(b.offset, b.dim);
            let rotated = &cols * u;
            for j in 0..b.dim {
                out.set_column(b.offset + j, &rotated.column(j));
            }
        }
        Ok(out)
    }

    fn measurement_from_block_unitaries(
        &self,
        unitaries: &[CMat],
    ) -> Result<ProjectiveMeasurement> {
        let basis = self.rotated_base(unitaries)?;
        ProjectiveMeasurement::from_basis_columns(self.target.clone(), &basis)
    }

    /// Frobenius deviation of the marginal under a measurement; must stay
    /// below 1e-9 for every member of the family.
    pub fn invariance_defect(&self, meas: &ProjectiveMeasurement) -> Result<f64> {
        let post = meas.apply_local(self.marginal.matrix())?;
        Ok((post - self.marginal.matrix()).norm())
    }
}

/// Bell basis of a 2x2 composite space, columns ordered
/// `(|00>+|11>, |00>-|11>, |01>+|10>, |01>-|10>) / sqrt(2)`.
pub fn bell_basis() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = C64::from(s);
    m[(3, 0)] = C64::from(s);
    m[(0, 1)] = C64::from(s);
    m[(3, 1)] = C64::from(-s);
    m[(1, 2)] = C64::from(s);
    m[(2, 2)] = C64::from(s);
    m[(1, 3)] = C64::from(s);
    m[(2, 3)] = C64::from(-s);
    m
}

/// Columns of `H (x) H` on a 2x2 composite space.
pub fn hadamard_product_basis() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMat::from_row_slice(
        2,
        2,
        &[C64::from(s), C64::from(s), C64::from(s), C64::from(-s)],
    );
    h.kronecker(&h)
}

/// Structured rank-1 bases worth seeding the optimizer with on a given
/// measured space: the Bell and Hadamard-product bases when the space is a
/// product of two qubits.
pub fn structured_bases(target_dims: &[usize]) -> Vec<(String, CMat)> {
    if target_dims == [2, 2] {
        vec![
            ("bell".to_string(), bell_basis()),
            ("hadamard".to_string(), hadamard_product_basis()),
        ]
    } else {
        Vec::new()
    }
}

/// Eigen-measurement of a nondegenerate state; errors when any degeneracy
/// block has dimension above one.
pub fn eigen_measurement(state: &DensityOperator, target: Vec<usize>) -> Result<ProjectiveMeasurement> {
    let family = eigen_family(state, target);
    if !family.is_trivial() {
        return Err(Error::DegenerateMarginal);
    }
    Ok(family.base_measurement())
}

impl std::fmt::Display for ProjectiveMeasurement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "target subsystems {:?}", self.target)?;
        for (h, p) in self.projectors.iter().enumerate() {
            writeln!(f, "outcome {h}:")?;
            for i in 0..p.nrows() {
                let row: Vec<String> = (0..p.ncols())
                    .map(|j| format!("{:+.6}{:+.6}i", p[(i, j)].re, p[(i, j)].im))
                    .collect();
                writeln!(f, "  [{}]", row.join(", "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{partial_trace, random_state, tensor, DensityOperator, Ket};
    use crate::statespec::{bell_phi_plus, example3_mix, example4_classical};
    use approx::assert_abs_diff_eq;

    #[test]
    fn computational_measurement_dephases() {
        let rho = bell_phi_plus().density();
        let meas = ProjectiveMeasurement::computational(vec![0], 2);
        let post = meas.apply_state(&rho).unwrap();
        // Bell state dephased on one qubit becomes the classical mixture
        assert!((post.matrix() - example4_classical().matrix()).norm() < 1e-12);
    }

    #[test]
    fn apply_preserves_trace_and_hermiticity() {
        let rho = random_state(&[2, 3], 5, 7).unwrap();
        let meas = ProjectiveMeasurement::computational(vec![1], 3);
        let post = meas.apply(rho.matrix(), rho.dims()).unwrap();
        assert_abs_diff_eq!(post.trace().re, 1.0, epsilon = 1e-12);
        assert!(crate::hilbert::hermiticity_defect(&post) < 1e-12);
    }

    #[test]
    fn apply_is_idempotent() {
        let rho = random_state(&[2, 2], 4, 11).unwrap();
        let meas = ProjectiveMeasurement::from_basis_columns(vec![0, 1], &bell_basis()).unwrap();
        let once = meas.apply(rho.matrix(), rho.dims()).unwrap();
        let twice = meas.apply(&once, rho.dims()).unwrap();
        assert!((twice - once).norm() < 1e-12);
    }

    #[test]
    fn embedded_projectors_commute_with_untouched_factors() {
        let rho_a = random_state(&[2], 2, 1).unwrap();
        let rho_b = random_state(&[3], 3, 2).unwrap();
        let joint = tensor(&rho_a, &rho_b).unwrap();
        let meas = ProjectiveMeasurement::computational(vec![0], 2);
        let post = meas.apply(joint.matrix(), joint.dims()).unwrap();
        let post_b = partial_trace(
            &DensityOperator::new(post, vec![2, 3]).unwrap(),
            &[1],
        )
        .unwrap();
        assert!((post_b.matrix() - rho_b.matrix()).norm() < 1e-12);
    }

    #[test]
    fn measurement_on_middle_pair_matches_permutation_free_oracle() {
        // measure subsystems [1, 2] of a 4-qubit state built as a product, and
        // compare against measuring factor order (b c) of the regrouped state
        let rho_ab = random_state(&[2, 2], 4, 21).unwrap();
        let rho_cd = random_state(&[2, 2], 4, 22).unwrap();
        let tau = tensor(&rho_ab, &rho_cd).unwrap();
        let meas = ProjectiveMeasurement::from_basis_columns(vec![1, 2], &bell_basis()).unwrap();
        let post = meas.apply(tau.matrix(), tau.dims()).unwrap();
        let post = DensityOperator::new(post, vec![2, 2, 2, 2]).unwrap();
        let bc = partial_trace(&post, &[1, 2]).unwrap();
        let bc_pre = partial_trace(&tau, &[1, 2]).unwrap();
        // the bc marginal of a product state is rho_b (x) rho_c; a rank-1
        // complete measurement maps it to its diagonal in the Bell basis
        let local = meas.apply_local(bc_pre.matrix()).unwrap();
        assert!((bc.matrix() - local).norm() < 1e-10);
    }

    #[test]
    fn invalid_projector_sets_are_rejected() {
        let p = CMat::identity(2, 2) * C64::from(0.5);
        assert!(ProjectiveMeasurement::new(vec![0], vec![p.clone(), p]).is_err());
        let mut q = CMat::zeros(2, 2);
        q[(0, 0)] = C64::from(1.0);
        assert!(ProjectiveMeasurement::new(vec![0], vec![q]).is_err()); // incomplete
        assert!(ProjectiveMeasurement::new(vec![0], vec![]).is_err());
    }

    #[test]
    fn require_rank_one_detects_coarse_projectors() {
        let mut p0 = CMat::zeros(4, 4);
        p0[(0, 0)] = C64::from(1.0);
        p0[(1, 1)] = C64::from(1.0);
        let mut p1 = CMat::zeros(4, 4);
        p1[(2, 2)] = C64::from(1.0);
        p1[(3, 3)] = C64::from(1.0);
        let meas = ProjectiveMeasurement::new(vec![0], vec![p0, p1]).unwrap();
        assert!(!meas.is_rank_one());
        assert!(meas.require_rank_one().is_err());
        assert!(ProjectiveMeasurement::computational(vec![0], 3)
            .require_rank_one()
            .is_ok());
    }

    #[test]
    fn exp_i_hermitian_is_unitary_and_matches_scalar_case() {
        let h = CMat::from_row_slice(
            2,
            2,
            &[
                C64::from(0.3),
                C64::new(0.1, -0.2),
                C64::new(0.1, 0.2),
                C64::from(-0.5),
            ],
        );
        let u = exp_i_hermitian(&h);
        assert!((u.adjoint() * &u - CMat::identity(2, 2)).norm() < 1e-12);
        let diag = CMat::from_diagonal(&nalgebra::DVector::from_row_slice(&[
            C64::from(1.0),
            C64::from(2.0),
        ]));
        let u = exp_i_hermitian(&diag);
        assert_abs_diff_eq!(u[(0, 0)].re, 1.0f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(u[(1, 1)].im, 2.0f64.sin(), epsilon = 1e-12);
    }

    #[test]
    fn family_of_nondegenerate_marginal_is_trivial() {
        let rho = DensityOperator::new(
            CMat::from_diagonal(&nalgebra::DVector::from_row_slice(&[
                C64::from(0.5),
                C64::from(0.3),
                C64::from(0.2),
            ])),
            vec![3],
        )
        .unwrap();
        let family = eigen_family(&rho, vec![0]);
        assert!(family.is_trivial());
        assert_eq!(family.block_dims(), vec![1, 1, 1]);
        assert_eq!(family.parameter_count(), 3);
        assert!(eigen_measurement(&rho, vec![0]).is_ok());
    }

    #[test]
    fn family_of_maximally_mixed_marginal_is_one_block() {
        let rho = DensityOperator::maximally_mixed(vec![4]);
        let family = eigen_family(&rho, vec![1, 2]);
        assert_eq!(family.block_dims(), vec![4]);
        assert_eq!(family.parameter_count(), 16);
        assert!(!family.is_trivial());
        assert!(eigen_measurement(&rho, vec![1, 2]).is_err());
    }

    #[test]
    fn example3_bc_marginal_blocks() {
        // bc marginal of the self-pair is rho^a (x) rho^a with rho^a mixed:
        // spectrum (1/4, 1/4, 1/4, 1/4) -> one 4-dim block
        let rho = example3_mix();
        let tau = tensor(&crate::hilbert::swap_bipartite(&rho).unwrap(), &rho).unwrap();
        let bc = partial_trace(&tau, &[1, 2]).unwrap();
        let family = eigen_family(&bc, vec![1, 2]);
        assert_eq!(family.block_dims(), vec![4]);
    }

    #[test]
    fn every_family_member_leaves_marginal_invariant() {
        for seed in 0..4u64 {
            let rho = random_state(&[2, 2], 2, 100 + seed).unwrap();
            let marg = partial_trace(&rho, &[0]).unwrap();
            let family = eigen_family(&marg, vec![0]);
            let n = family.parameter_count();
            let params: Vec<f64> = (0..n).map(|k| 0.37 * (k as f64 + 1.0)).collect();
            for meas in [
                family.base_measurement(),
                family.measurement_at(&params).unwrap(),
                family.haar_sample(seed),
            ] {
                assert!(family.invariance_defect(&meas).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn measurement_at_zero_matches_base() {
        let rho = DensityOperator::maximally_mixed(vec![2, 2]);
        let family = eigen_family(&rho, vec![1, 2]);
        let zero = vec![0.0; family.parameter_count()];
        let a = family.base_measurement();
        let b = family.measurement_at(&zero).unwrap();
        for (p, q) in a.projectors().iter().zip(b.projectors()) {
            assert!((p - q).norm() < 1e-12);
        }
        assert!(family.measurement_at(&[0.0]).is_err());
    }

    #[test]
    fn rebased_haar_zero_params_reproduce_haar_sample() {
        let rho = DensityOperator::maximally_mixed(vec![2, 2]);
        let family = eigen_family(&rho, vec![1, 2]);
        let direct = family.haar_sample(9);
        let rebased = family.rebased_haar(9);
        let via = rebased.base_measurement();
        for (p, q) in direct.projectors().iter().zip(via.projectors()) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn rebase_accepts_bell_basis_on_fully_degenerate_marginal() {
        let rho = DensityOperator::maximally_mixed(vec![2, 2]);
        let family = eigen_family(&rho, vec![1, 2]);
        let rebased = family.rebased(&bell_basis()).unwrap();
        let meas = rebased.base_measurement();
        let expected =
            ProjectiveMeasurement::from_basis_columns(vec![1, 2], &bell_basis()).unwrap();
        // projector sets agree up to column ordering within blocks
        for p in expected.projectors() {
            assert!(meas.projectors().iter().any(|q| (p - q).norm() < 1e-12));
        }
        assert!(family.invariance_defect(&meas).unwrap() < 1e-12);
    }

    #[test]
    fn rebase_rejects_block_crossing_basis() {
        let rho = DensityOperator::new(
            CMat::from_diagonal(&nalgebra::DVector::from_row_slice(&[
                C64::from(0.4),
                C64::from(0.3),
                C64::from(0.2),
                C64::from(0.1),
            ])),
            vec![2, 2],
        )
        .unwrap();
        let family = eigen_family(&rho, vec![0, 1]);
        assert!(family.is_trivial());
        assert!(matches!(
            family.rebased(&bell_basis()),
            Err(Error::IncompatibleBasis)
        ));
    }

    #[test]
    fn bell_and_hadamard_bases_are_orthonormal() {
        for b in [bell_basis(), hadamard_product_basis()] {
            assert!((b.adjoint() * &b - CMat::identity(4, 4)).norm() < 1e-14);
        }
        assert_eq!(structured_bases(&[2, 2]).len(), 2);
        assert!(structured_bases(&[2, 3]).is_empty());
        assert!(structured_bases(&[4]).is_empty());
    }

    #[test]
    fn haar_sample_is_deterministic() {
        let rho = DensityOperator::maximally_mixed(vec![3]);
        let family = eigen_family(&rho, vec![0]);
        let a = family.haar_sample(5);
        let b = family.haar_sample(5);
        for (p, q) in a.projectors().iter().zip(b.projectors()) {
            assert!((p - q).norm() == 0.0);
        }
    }

    #[test]
    fn eigen_family_reconstructs_marginal() {
        let rho = random_state(&[2, 2], 3, 55).unwrap();
        let marg = partial_trace(&rho, &[1]).unwrap();
        let family = eigen_family(&marg, vec![1]);
        let meas = family.base_measurement();
        let post = meas.apply_local(marg.matrix()).unwrap();
        assert!((post - marg.matrix()).norm() < 1e-10);
        // projector recombination with eigenvalues reconstructs the marginal
        let mut rebuilt = CMat::zeros(2, 2);
        let (vals, _) = crate::hilbert::eigh_desc(marg.matrix());
        for (k, p) in meas.projectors().iter().enumerate() {
            rebuilt += p * C64::from(vals[k]);
        }
        assert!((rebuilt - marg.matrix()).norm() < 1e-10);
    }

    #[test]
    fn basis_ket_state_helpers() {
        let k = Ket::basis(vec![2, 2], 3).unwrap();
        let meas = ProjectiveMeasurement::computational(vec![0, 1], 4);
        let post = meas.apply_state(&k.density()).unwrap();
        assert!((post.matrix() - k.density().matrix()).norm() < 1e-14);
    }
}
