//! Chain Hamiltonians and the states expectations are taken in.
//!
//! Two builders cover the models used downstream: the strong-coupling
//! pairing chain `H = eps * sum_i sz_i - (1/M) sum_ij sp_i sm_j` (every
//! site coupled to every site, so the interaction survives the mean-field
//! limit), and generic short-range chains assembled from an
//! [`InteractionSpec`] of on-site plus displaced pair terms.
//!
//! [`QuantumState`] is the expectation functional: homogeneous product
//! states are evaluated factor by factor (no 2^M density matrix is ever
//! materialized for them), while Gibbs and ground states are carried as
//! probability weights over the cached eigenbasis of their Hamiltonian.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::ops::{
    adjoint, embed, frobenius_norm, HermitianOperator, SiteObservable, MAX_SITES,
};
use crate::{Error, Result};

/// Eigenvalues below `E_min + GROUND_TOL` count as part of the ground
/// eigenspace when building a ground state.
pub const GROUND_TOL: f64 = 1e-9;

/// Boltzmann weights below this are skipped in eigenbasis sums.
const WEIGHT_CUTOFF: f64 = 1e-300;

/// One displaced two-site coupling: `coupling * left_i (x) right_(i+d)`,
/// entered symmetrized so the assembled Hamiltonian is Hermitian even for
/// non-Hermitian factors such as ladder operators.
#[derive(Debug, Clone)]
pub struct PairTerm {
    /// Displacement `d >= 1` between the two sites.
    pub displacement: usize,
    pub left: SiteObservable,
    pub right: SiteObservable,
    pub coupling: f64,
}

/// A translation-invariant interaction: optional on-site term plus a list
/// of displaced pair terms.
#[derive(Debug, Clone, Default)]
pub struct InteractionSpec {
    pub on_site: Option<SiteObservable>,
    pub pair_terms: Vec<PairTerm>,
}

impl InteractionSpec {
    /// Largest displacement appearing in the pair terms (0 if none).
    pub fn range(&self) -> usize {
        self.pair_terms
            .iter()
            .map(|t| t.displacement)
            .max()
            .unwrap_or(0)
    }
}

/// Assemble a short-range chain Hamiltonian on `sites` sites. Every pair
/// term enters as `(c/2) (L_i R_j + (L_i R_j)^dag)` with `j = i + d`
/// (wrapped around for periodic boundaries), so the result is Hermitian
/// by construction.
pub fn build_chain_hamiltonian(
    spec: &InteractionSpec,
    sites: usize,
    periodic: bool,
) -> Result<HermitianOperator> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::SizeCap {
            sites,
            max: MAX_SITES,
        });
    }
    for term in &spec.pair_terms {
        if term.displacement == 0 || term.displacement >= sites {
            return Err(Error::InvalidParameter(format!(
                "pair displacement {} must lie in 1..{} for {} sites",
                term.displacement, sites, sites
            )));
        }
    }
    let dim = 1 << sites;
    let mut h: Array2<C64> = Array2::zeros((dim, dim));
    if let Some(on_site) = &spec.on_site {
        for i in 0..sites {
            h = h + embed(on_site.op(), i, sites)?;
        }
    }
    for term in &spec.pair_terms {
        let d = term.displacement;
        let last = if periodic { sites } else { sites - d };
        for i in 0..last {
            let j = (i + d) % sites;
            let li = embed(term.left.op(), i, sites)?;
            let rj = embed(term.right.op(), j, sites)?;
            let prod = li.dot(&rj);
            let sym = (&prod + &adjoint(&prod)).mapv(|z| z * 0.5 * term.coupling);
            h = h + sym;
        }
    }
    HermitianOperator::new(h)
}

/// The strong-coupling pairing Hamiltonian on `M = 2*half_width + 1`
/// sites:
///
/// `H = eps * sum_i sz_i - (1/M) * sum_{i,j} sp_i sm_j`
///
/// with the double sum running over all pairs including `i = j`. The
/// interaction is built as `-(1/M) S_+ S_-` with `S_+ = sum_i sp_i`, so
/// Hermiticity is exact. Requires `0 < eps < 1/2` (the regime where the
/// gauge symmetry can break at low temperature).
pub fn build_bcs_hamiltonian(epsilon: f64, half_width: usize) -> Result<HermitianOperator> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let sites = 2 * half_width + 1;
    if sites > MAX_SITES {
        return Err(Error::SizeCap {
            sites,
            max: MAX_SITES,
        });
    }
    let p = crate::ops::pauli();
    let dim = 1 << sites;
    let mut sz_total: Array2<C64> = Array2::zeros((dim, dim));
    let mut sp_total: Array2<C64> = Array2::zeros((dim, dim));
    for i in 0..sites {
        sz_total = sz_total + embed(p.z.op(), i, sites)?;
        sp_total = sp_total + embed(p.plus.op(), i, sites)?;
    }
    let interaction = sp_total.dot(&adjoint(&sp_total));
    let h = sz_total.mapv(|z| z * epsilon) - interaction.mapv(|z| z / sites as f64);
    HermitianOperator::new(h)
}

/// A state to take expectations in.
///
/// Construct through [`product_state`], [`gibbs_state`], or
/// [`ground_state`]; the variants are public for pattern matching but the
/// constructors enforce the invariants (unit trace, positivity,
/// normalized weights).
#[derive(Debug, Clone)]
pub enum QuantumState {
    /// Homogeneous product `rho (x) rho (x) ... (x) rho` over `sites`
    /// factors. Expectations contract site by site.
    Product { rho_site: Array2<C64>, sites: usize },
    /// Thermal state `exp(-beta H)/Z` at finite `beta`, stored as
    /// normalized Boltzmann weights over the eigenbasis of `h`.
    Gibbs {
        hamiltonian: Arc<HermitianOperator>,
        beta: f64,
        weights: Array1<f64>,
    },
    /// Uniform mixture over the ground eigenspace (eigenvalues within
    /// [`GROUND_TOL`] of the minimum).
    Ground {
        hamiltonian: Arc<HermitianOperator>,
        degeneracy: usize,
        weights: Array1<f64>,
    },
}

/// Validate a one-site density matrix and build the homogeneous product
/// state over `sites` factors.
pub fn product_state(rho_site: Array2<C64>, sites: usize) -> Result<QuantumState> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::SizeCap {
            sites,
            max: MAX_SITES,
        });
    }
    if rho_site.dim() != (2, 2) {
        return Err(Error::NotSquare {
            rows: rho_site.nrows(),
            cols: rho_site.ncols(),
        });
    }
    let dev = frobenius_norm(&(&rho_site - &adjoint(&rho_site)));
    if dev > 1e-12 * frobenius_norm(&rho_site).max(1.0) {
        return Err(Error::InvalidDensity(format!(
            "not Hermitian (deviation {dev:.3e})"
        )));
    }
    let trace = rho_site[[0, 0]] + rho_site[[1, 1]];
    if (trace - C64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
    }
    // 2x2 Hermitian positivity: both eigenvalues >= -1e-12.
    let a = rho_site[[0, 0]].re;
    let d = rho_site[[1, 1]].re;
    let b2 = rho_site[[0, 1]].norm_sqr();
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b2).sqrt();
    if mean - rad < -1e-12 {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {:.3e}",
            mean - rad
        )));
    }
    Ok(QuantumState::Product { rho_site, sites })
}

/// Thermal state of `h` at finite inverse temperature `beta > 0`. The
/// spectrum is shifted by its minimum before exponentiating so large
/// `beta` cannot overflow.
pub fn gibbs_state(hamiltonian: Arc<HermitianOperator>, beta: f64) -> Result<QuantumState> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::BetaOutOfRange(beta));
    }
    let eig = hamiltonian.eig();
    let e_min = eig.values[0];
    let mut weights = eig.values.mapv(|e| (-beta * (e - e_min)).exp());
    let z: f64 = weights.sum();
    weights.mapv_inplace(|w| w / z);
    Ok(QuantumState::Gibbs {
        hamiltonian,
        beta,
        weights,
    })
}

/// Uniform mixture over the ground eigenspace of `h` (all eigenvalues
/// within [`GROUND_TOL`] of the minimum).
pub fn ground_state(hamiltonian: Arc<HermitianOperator>) -> Result<QuantumState> {
    let eig = hamiltonian.eig();
    let e_min = eig.values[0];
    let degeneracy = eig.values.iter().filter(|&&e| e - e_min <= GROUND_TOL).count();
    let dim = hamiltonian.dim();
    let mut weights = Array1::zeros(dim);
    for a in 0..degeneracy {
        weights[a] = 1.0 / degeneracy as f64;
    }
    Ok(QuantumState::Ground {
        hamiltonian,
        degeneracy,
        weights,
    })
}

/// Spectral payload shared by Gibbs and ground states: the Hamiltonian,
/// normalized weights over its eigenbasis, and the inverse temperature.
pub(crate) struct SpectralData<'a> {
    pub hamiltonian: &'a HermitianOperator,
    pub weights: &'a Array1<f64>,
    pub beta: crate::Beta,
}

impl QuantumState {
    pub fn sites(&self) -> usize {
        match self {
            QuantumState::Product { sites, .. } => *sites,
            QuantumState::Gibbs { hamiltonian, .. } | QuantumState::Ground { hamiltonian, .. } => {
                hamiltonian.dim().trailing_zeros() as usize
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Product { sites, .. } => 1 << sites,
            QuantumState::Gibbs { hamiltonian, .. } | QuantumState::Ground { hamiltonian, .. } => {
                hamiltonian.dim()
            }
        }
    }

    /// Short role name, used in error messages.
    pub fn kind(&self) -> &'static str {
        match self {
            QuantumState::Product { .. } => "product state",
            QuantumState::Gibbs { .. } => "Gibbs state",
            QuantumState::Ground { .. } => "ground state",
        }
    }

    pub fn hamiltonian(&self) -> Option<&Arc<HermitianOperator>> {
        match self {
            QuantumState::Product { .. } => None,
            QuantumState::Gibbs { hamiltonian, .. } | QuantumState::Ground { hamiltonian, .. } => {
                Some(hamiltonian)
            }
        }
    }

    pub(crate) fn spectral_data(&self) -> Option<SpectralData<'_>> {
        match self {
            QuantumState::Product { .. } => None,
            QuantumState::Gibbs {
                hamiltonian,
                beta,
                weights,
            } => Some(SpectralData {
                hamiltonian,
                weights,
                beta: crate::Beta::Finite(*beta),
            }),
            QuantumState::Ground {
                hamiltonian,
                weights,
                ..
            } => Some(SpectralData {
                hamiltonian,
                weights,
                beta: crate::Beta::Infinite,
            }),
        }
    }

    /// Expectation of a dense chain operator.
    ///
    /// Product states contract the operator one site at a time (cost of
    /// one pass over the matrix, no 2^M density matrix); spectral states
    /// sum `p_a <a| op |a>` over their weight vector.
    pub fn expectation(&self, op: &Array2<C64>) -> Result<C64> {
        let dim = self.dim();
        if op.dim() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: op.nrows(),
            });
        }
        match self {
            QuantumState::Product { rho_site, sites } => {
                Ok(product_expectation(rho_site, *sites, op))
            }
            _ => {
                let data = self.spectral_data().expect("spectral variant");
                let eig = data.hamiltonian.eig();
                let w = op.dot(&eig.vectors);
                let mut acc = C64::new(0.0, 0.0);
                for (a, &p) in data.weights.iter().enumerate() {
                    if p <= WEIGHT_CUTOFF {
                        continue;
                    }
                    let va = eig.vectors.column(a);
                    let wa = w.column(a);
                    let diag: C64 = va.iter().zip(wa.iter()).map(|(v, x)| v.conj() * x).sum();
                    acc += p * diag;
                }
                Ok(acc)
            }
        }
    }

    /// One-site expectation `w(A)`: the single factor for product states,
    /// the site-averaged reduced-density expectation for spectral states.
    pub fn site_expectation(&self, obs: &SiteObservable) -> Result<C64> {
        match self {
            QuantumState::Product { rho_site, .. } => Ok(trace_product(rho_site, obs.op())),
            _ => {
                let data = self.spectral_data().expect("spectral variant");
                let sites = self.sites();
                let mut acc = C64::new(0.0, 0.0);
                for site in 0..sites {
                    let rdm = site_rdm(data.hamiltonian, data.weights, site, sites);
                    acc += trace_product(&rdm, obs.op());
                }
                Ok(acc / sites as f64)
            }
        }
    }

    /// `ln Z` for Gibbs states (overflow-safe through the spectral shift).
    pub fn log_partition(&self) -> Option<f64> {
        match self {
            QuantumState::Gibbs {
                hamiltonian, beta, ..
            } => {
                let eig = hamiltonian.eig();
                let e_min = eig.values[0];
                let z_shifted: f64 = eig.values.iter().map(|e| (-beta * (e - e_min)).exp()).sum();
                Some(z_shifted.ln() - beta * e_min)
            }
            _ => None,
        }
    }

    pub fn degeneracy(&self) -> Option<usize> {
        match self {
            QuantumState::Ground { degeneracy, .. } => Some(*degeneracy),
            _ => None,
        }
    }
}

/// `tr(rho * a)` for 2x2 matrices.
fn trace_product(rho: &Array2<C64>, a: &Array2<C64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += rho[[i, j]] * a[[j, i]];
        }
    }
    acc
}

/// Contract `tr(rho^(x)M * op)` by tracing out the last site against
/// `rho` repeatedly: each pass halves the dimension, so the cost is a
/// constant factor times reading `op` once.
fn product_expectation(rho: &Array2<C64>, sites: usize, op: &Array2<C64>) -> C64 {
    let mut cur = op.to_owned();
    for _ in 0..sites {
        let half = cur.nrows() / 2;
        let mut next = Array2::zeros((half, half));
        for i in 0..half {
            for j in 0..half {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        acc += cur[[2 * i + a, 2 * j + b]] * rho[[b, a]];
                    }
                }
                next[[i, j]] = acc;
            }
        }
        cur = next;
    }
    cur[[0, 0]]
}

/// Reduced one-site density matrix of a spectral state at `site`,
/// accumulated straight from weighted eigenvectors (never forms the full
/// density matrix).
fn site_rdm(
    hamiltonian: &HermitianOperator,
    weights: &Array1<f64>,
    site: usize,
    sites: usize,
) -> Array2<C64> {
    let eig = hamiltonian.eig();
    let dim = hamiltonian.dim();
    let shift = sites - 1 - site; // bit position from the LSB
    let mask = 1usize << shift;
    let mut rdm = Array2::zeros((2, 2));
    for (a, &p) in weights.iter().enumerate() {
        if p <= WEIGHT_CUTOFF {
            continue;
        }
        let va = eig.vectors.column(a);
        for idx in 0..dim {
            let s = (idx >> shift) & 1;
            let v = va[idx];
            rdm[[s, s]] += p * v * v.conj();
            rdm[[s, 1 - s]] += p * v * va[idx ^ mask].conj();
        }
    }
    rdm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{commutator, heisenberg_evolve, max_abs_diff, pauli};
    use crate::testutil::random_hermitian;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn heisenberg_spec(coupling: f64) -> InteractionSpec {
        let p = pauli();
        InteractionSpec {
            on_site: None,
            pair_terms: vec![
                PairTerm {
                    displacement: 1,
                    left: p.x.clone(),
                    right: p.x.clone(),
                    coupling,
                },
                PairTerm {
                    displacement: 1,
                    left: p.y.clone(),
                    right: p.y.clone(),
                    coupling,
                },
                PairTerm {
                    displacement: 1,
                    left: p.z.clone(),
                    right: p.z.clone(),
                    coupling,
                },
            ],
        }
    }

    #[test]
    fn pairing_chain_trace_matches_term_accounting() {
        // Independent accounting: tr(sz_i) = 0 kills the on-site part;
        // in the double sum only i = j survives, each contributing
        // tr(sp sm) * 2^(M-1) = 2^(M-1), so tr(H) = -(1/M) * M * 2^(M-1)
        // = -2^(M-1).
        for half_width in 0..=1 {
            let sites = 2 * half_width + 1;
            let expected = -((1u64 << (sites - 1)) as f64);
            let h = build_bcs_hamiltonian(0.4, half_width).unwrap();
            let tr: C64 = (0..h.dim()).map(|i| h.matrix()[[i, i]]).sum();
            assert!((tr.re - expected).abs() <= 1e-12 * expected.abs().max(1.0));
            assert!(tr.im.abs() <= 1e-12);
        }
    }

    #[test]
    fn pairing_chain_commutes_with_total_sz() {
        let p = pauli();
        let h = build_bcs_hamiltonian(0.3, 1).unwrap();
        let sites = 3;
        let mut sz_total: Array2<C64> = Array2::zeros((8, 8));
        for i in 0..sites {
            sz_total = sz_total + embed(p.z.op(), i, sites).unwrap();
        }
        let comm = commutator(h.matrix(), &sz_total).unwrap();
        assert!(max_abs_diff(&comm, &Array2::zeros((8, 8))) <= 1e-12);
    }

    #[test]
    fn pairing_chain_validates_epsilon() {
        assert!(matches!(
            build_bcs_hamiltonian(0.5, 1),
            Err(Error::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            build_bcs_hamiltonian(0.0, 1),
            Err(Error::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            build_bcs_hamiltonian(0.4, 7),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn open_and_periodic_chains_differ_by_the_boundary_bond() {
        let spec = heisenberg_spec(1.0);
        let sites = 4;
        let open = build_chain_hamiltonian(&spec, sites, false).unwrap();
        let periodic = build_chain_hamiltonian(&spec, sites, true).unwrap();
        // Assemble the single wrap-around bond by hand.
        let p = pauli();
        let mut bond: Array2<C64> = Array2::zeros((16, 16));
        for obs in [&p.x, &p.y, &p.z] {
            let l = embed(obs.op(), 3, sites).unwrap();
            let r = embed(obs.op(), 0, sites).unwrap();
            bond = bond + l.dot(&r);
        }
        let diff = periodic.matrix() - open.matrix();
        assert!(max_abs_diff(&diff, &bond) <= 1e-12);
    }

    #[test]
    fn chain_builder_validates_displacement() {
        let mut spec = heisenberg_spec(1.0);
        spec.pair_terms[0].displacement = 4;
        assert!(build_chain_hamiltonian(&spec, 4, true).is_err());
    }

    #[test]
    fn product_state_validation() {
        // valid: diagonal density
        let rho = array![[c(0.25, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.75, 0.0)]];
        assert!(product_state(rho, 3).is_ok());
        // trace != 1
        let rho = array![[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.75, 0.0)]];
        assert!(matches!(
            product_state(rho, 2),
            Err(Error::InvalidDensity(_))
        ));
        // not positive
        let rho = array![[c(1.2, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.2, 0.0)]];
        assert!(matches!(
            product_state(rho, 2),
            Err(Error::InvalidDensity(_))
        ));
        // not Hermitian
        let rho = array![[c(0.5, 0.0), c(0.3, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]];
        assert!(matches!(
            product_state(rho, 2),
            Err(Error::InvalidDensity(_))
        ));
    }

    #[test]
    fn product_expectation_matches_dense_kron() {
        // Cross-check the factor-wise contraction against an explicitly
        // materialized product density matrix on 3 sites.
        let rho = array![[c(0.7, 0.0), c(0.1, 0.2)], [c(0.1, -0.2), c(0.3, 0.0)]];
        let state = product_state(rho.clone(), 3).unwrap();
        let dense_rho = ndarray::linalg::kron(&ndarray::linalg::kron(&rho, &rho), &rho);
        let op = random_hermitian(8, 5);
        let expected: C64 = {
            let prod = dense_rho.dot(&op);
            (0..8).map(|i| prod[[i, i]]).sum()
        };
        let got = state.expectation(&op).unwrap();
        assert!((got - expected).norm() <= 1e-12);
    }

    #[test]
    fn gibbs_matches_ground_at_large_beta() {
        let spec = InteractionSpec {
            on_site: Some(pauli().z.clone()),
            pair_terms: vec![PairTerm {
                displacement: 1,
                left: pauli().x.clone(),
                right: pauli().x.clone(),
                coupling: 0.3,
            }],
        };
        let h = Arc::new(build_chain_hamiltonian(&spec, 4, false).unwrap());
        let gibbs = gibbs_state(Arc::clone(&h), 1e3).unwrap();
        let ground = ground_state(Arc::clone(&h)).unwrap();
        assert_eq!(ground.degeneracy(), Some(1));
        let op = random_hermitian(16, 9);
        let a = gibbs.expectation(&op).unwrap();
        let b = ground.expectation(&op).unwrap();
        assert!(
            (a - b).norm() <= 1e-6,
            "gibbs vs ground gap {:.3e}",
            (a - b).norm()
        );
    }

    #[test]
    fn ground_state_counts_exact_degeneracy() {
        // H = sz on site 0 of a 3-site chain: ground eigenvalue -1 with
        // multiplicity 4.
        let h = Arc::new(
            HermitianOperator::new(embed(pauli().z.op(), 0, 3).unwrap()).unwrap(),
        );
        let ground = ground_state(h).unwrap();
        assert_eq!(ground.degeneracy(), Some(4));
    }

    #[test]
    fn gibbs_energy_is_minus_dbeta_log_z() {
        let spec = heisenberg_spec(1.0);
        let h = Arc::new(build_chain_hamiltonian(&spec, 3, true).unwrap());
        let beta = 0.8;
        let dh = 1e-3;
        let lz = |b: f64| {
            gibbs_state(Arc::clone(&h), b)
                .unwrap()
                .log_partition()
                .unwrap()
        };
        let numeric = -(lz(beta + dh) - lz(beta - dh)) / (2.0 * dh);
        let state = gibbs_state(Arc::clone(&h), beta).unwrap();
        let energy = state.expectation(h.matrix()).unwrap().re;
        assert!(
            (numeric - energy).abs() <= 1e-6,
            "dbeta log Z mismatch {:.3e}",
            (numeric - energy).abs()
        );
    }

    #[test]
    fn gibbs_is_stationary_under_its_own_dynamics() {
        let spec = heisenberg_spec(1.0);
        let h = Arc::new(build_chain_hamiltonian(&spec, 3, true).unwrap());
        let state = gibbs_state(Arc::clone(&h), 1.3).unwrap();
        let a = random_hermitian(8, 17);
        let at = heisenberg_evolve(&h, &a, 0.9).unwrap();
        let before = state.expectation(&a).unwrap();
        let after = state.expectation(&at).unwrap();
        assert!((before - after).norm() <= 1e-9);
    }

    #[test]
    fn gibbs_satisfies_the_boundary_condition() {
        // w(A B) = w(B alpha_{i beta} A) with alpha_{i beta} A
        // = exp(-beta H) A exp(beta H), on random unit-norm observables.
        let spec = heisenberg_spec(1.0);
        let h = Arc::new(build_chain_hamiltonian(&spec, 4, true).unwrap());
        let beta = 1.0;
        let state = gibbs_state(Arc::clone(&h), beta).unwrap();
        let eig = h.eig();
        let u = &eig.vectors;
        let ud = adjoint(u);
        for seed in [1u64, 2, 3] {
            let norm_a = {
                let a = random_hermitian(16, seed);
                let n = frobenius_norm(&a);
                a.mapv(|z| z / n)
            };
            let b = {
                let b = random_hermitian(16, seed + 100);
                let n = frobenius_norm(&b);
                b.mapv(|z| z / n)
            };
            // alpha_{i beta}(A) in the eigenbasis: exp(-beta E_a) A exp(beta E_b)
            let mut a_eig = ud.dot(&norm_a).dot(u);
            for ((p, q), z) in a_eig.indexed_iter_mut() {
                *z *= (-beta * (eig.values[p] - eig.values[q])).exp();
            }
            let a_shifted = u.dot(&a_eig).dot(&ud);
            let lhs = state.expectation(&norm_a.dot(&b)).unwrap();
            let rhs = state.expectation(&b.dot(&a_shifted)).unwrap();
            assert!(
                (lhs - rhs).norm() <= 1e-8,
                "boundary-condition gap {:.3e}",
                (lhs - rhs).norm()
            );
        }
    }

    #[test]
    fn site_expectation_is_translation_invariant_on_periodic_chains() {
        let spec = heisenberg_spec(1.0);
        let h = Arc::new(build_chain_hamiltonian(&spec, 3, true).unwrap());
        let state = gibbs_state(Arc::clone(&h), 0.7).unwrap();
        let p = pauli();
        let avg = state.site_expectation(&p.z).unwrap();
        // compare against each embedded site expectation
        for site in 0..3 {
            let op = embed(p.z.op(), site, 3).unwrap();
            let per_site = state.expectation(&op).unwrap();
            assert!((avg - per_site).norm() <= 1e-10);
        }
    }

    #[test]
    fn gibbs_rejects_bad_beta() {
        let h = Arc::new(build_bcs_hamiltonian(0.4, 0).unwrap());
        assert!(matches!(
            gibbs_state(Arc::clone(&h), 0.0),
            Err(Error::BetaOutOfRange(_))
        ));
        assert!(matches!(
            gibbs_state(h, f64::INFINITY),
            Err(Error::BetaOutOfRange(_))
        ));
    }
}
