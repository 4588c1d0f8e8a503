//! The strong-coupling pairing model in its mean-field closed form.
//!
//! The chain Hamiltonian `H_N = eps * sum_i sz_i - (1/M) sum_ij sp_i sm_j`
//! (built by [`crate::models::build_bcs_hamiltonian`]) has a gauge symmetry
//! `sp -> exp(i phi) sp` that breaks spontaneously at low temperature. In
//! the mean-field limit each site sees the effective one-site Hamiltonian
//!
//! `h = eps * sz - lambda * sp - conj(lambda) * sm`
//!
//! whose order parameter `lambda = w(sm)` must solve the self-consistency
//! ("gap") equation `tanh(beta mu) = 2 mu`, `mu = sqrt(eps^2 + |lambda|^2)`.
//! A nonzero solution exists exactly for `beta > beta_c = atanh(2 eps)/eps`
//! (and always at zero temperature, where `mu = 1/2`).
//!
//! Everything Goldstone-related then lives in the 4-dimensional algebra of
//! one-site operators. The commutant projectors `E_-`, `E_0`, `E_+` split
//! an operator into the parts that rotate with frequency `-2mu`, `0`,
//! `+2mu` under `[h, .]`; the partial transpose of the number operator,
//! `J = i(E_+ - E_-)`, pairs the broken-symmetry fluctuation `hat_z` with
//! its canonical conjugate. [`GoldstoneStatistics`] collects the variances,
//! commutators, and thermal occupancy of that pair, and
//! [`two_point_limit`] / [`finite_size_two_point`] give the dynamical
//! two-point function in the mean-field limit and on finite chains.

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::models::build_bcs_hamiltonian;
use crate::ops::{adjoint, embed, identity, pauli, trace};
use crate::{Beta, Error, Result};

/// Absolute width at which the gap-equation bisection stops.
const BISECTION_TOL: f64 = 1e-15;

/// Hard cap on bisection steps (the interval halves each step, so ~50
/// suffice; the cap only guards against pathological floating point).
const BISECTION_MAX_STEPS: usize = 200;

/// Inverse temperature at which the gauge symmetry starts to break:
/// `beta_c = atanh(2 eps) / eps`. Finite for every `eps` in `(0, 1/2)`.
pub fn critical_beta(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    Ok((2.0 * epsilon).atanh() / epsilon)
}

/// A solved mean-field problem: the order parameter, the effective
/// one-site Hamiltonian, and the one-site equilibrium state.
#[derive(Debug, Clone)]
pub struct GapSolution {
    /// On-site level splitting, in `(0, 1/2)`.
    pub epsilon: f64,
    /// Inverse temperature the equation was solved at.
    pub beta: Beta,
    /// Order parameter `lambda = w(sm)`; zero in the unbroken phase.
    pub lambda: C64,
    /// Effective level splitting `mu = sqrt(eps^2 + |lambda|^2)`.
    pub mu: f64,
    rho: Array2<C64>,
    h_eff: Array2<C64>,
}

impl GapSolution {
    /// The one-site equilibrium density matrix
    /// `rho = (1 - tanh(beta mu) h/mu) / 2`.
    pub fn rho(&self) -> &Array2<C64> {
        &self.rho
    }

    /// The effective one-site Hamiltonian
    /// `h = eps sz - lambda sp - conj(lambda) sm`.
    pub fn h_eff(&self) -> &Array2<C64> {
        &self.h_eff
    }

    /// `tanh(beta mu)` — the Bloch-vector length of `rho` (1 at zero
    /// temperature). Equals `2 mu` exactly when the symmetry is broken.
    pub fn polarization(&self) -> f64 {
        match self.beta {
            Beta::Infinite => 1.0,
            Beta::Finite(b) => (b * self.mu).tanh(),
        }
    }

    /// `|lambda|`.
    pub fn order_abs(&self) -> f64 {
        self.lambda.norm()
    }

    /// Whether the gauge symmetry is broken (`lambda != 0`).
    pub fn is_broken(&self) -> bool {
        self.order_abs() > 0.0
    }

    /// Self-consistency defect `|tr(rho sm) - lambda|`. Zero up to the
    /// bisection tolerance (exactly zero in the unbroken phase and at
    /// zero temperature).
    pub fn residual(&self) -> f64 {
        (self.rho[[0, 1]] - self.lambda).norm()
    }
}

/// Solve the gap equation at the given splitting and temperature. The
/// order parameter's modulus is fixed by the equation; its phase is the
/// free gauge angle supplied by the caller (every choice is an equivalent
/// equilibrium state).
pub fn solve_gap(epsilon: f64, beta: Beta, phase: f64) -> Result<GapSolution> {
    let beta_c = critical_beta(epsilon)?;
    if let Beta::Finite(b) = beta {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::BetaOutOfRange(b));
        }
    }
    let mu = match beta {
        Beta::Infinite => 0.5,
        Beta::Finite(b) if b > beta_c => {
            // tanh(b mu) - 2 mu is positive at mu = eps (that is what
            // b > beta_c means) and negative at mu = 1/2, with a single
            // root in between: bisect it down to BISECTION_TOL.
            let g = |m: f64| (b * m).tanh() - 2.0 * m;
            let mut lo = epsilon;
            let mut hi = 0.5;
            for _ in 0..BISECTION_MAX_STEPS {
                if hi - lo < BISECTION_TOL {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if g(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
        Beta::Finite(_) => epsilon, // unbroken phase: lambda = 0
    };
    let lambda_abs = (mu * mu - epsilon * epsilon).max(0.0).sqrt();
    let lambda = C64::from_polar(lambda_abs, phase);
    let h_eff = effective_hamiltonian(epsilon, lambda);
    let polarization = match beta {
        Beta::Infinite => 1.0,
        Beta::Finite(b) => (b * mu).tanh(),
    };
    let rho = (identity(2) - h_eff.mapv(|z| z * (polarization / mu))).mapv(|z| z * 0.5);
    Ok(GapSolution {
        epsilon,
        beta,
        lambda,
        mu,
        rho,
        h_eff,
    })
}

/// `h = eps sz - lambda sp - conj(lambda) sm` as a dense 2x2 matrix.
pub fn effective_hamiltonian(epsilon: f64, lambda: C64) -> Array2<C64> {
    let mut h = Array2::zeros((2, 2));
    h[[0, 0]] = C64::new(epsilon, 0.0);
    h[[0, 1]] = -lambda;
    h[[1, 0]] = -lambda.conj();
    h[[1, 1]] = C64::new(-epsilon, 0.0);
    h
}

/// Column-major vectorization of a 2x2 matrix.
fn vec2(a: &Array2<C64>) -> Array1<C64> {
    Array1::from(vec![a[[0, 0]], a[[1, 0]], a[[0, 1]], a[[1, 1]]])
}

/// Inverse of [`vec2`].
fn unvec2(v: &Array1<C64>) -> Array2<C64> {
    let mut a = Array2::zeros((2, 2));
    a[[0, 0]] = v[0];
    a[[1, 0]] = v[1];
    a[[0, 1]] = v[2];
    a[[1, 1]] = v[3];
    a
}

/// Apply a 4x4 superoperator (in the column-major vectorization
/// convention `vec(A X B) = kron(B^T, A) vec(X)`) to a 2x2 matrix.
pub fn apply_superop(s: &Array2<C64>, a: &Array2<C64>) -> Array2<C64> {
    unvec2(&s.dot(&vec2(a)))
}

/// The spectral decomposition of the one-site Liouvillian `[h, .]`.
///
/// `p_minus`/`p_plus` project onto the lower/upper level of `h`; the
/// superoperators `E_-(A) = P_- A P_+`, `E_0(A) = P_- A P_- + P_+ A P_+`,
/// `E_+(A) = P_+ A P_-` are the eigenprojections of `[h, .]` at
/// eigenvalues `-2mu, 0, +2mu`, and `J = i (E_+ - E_-)` is the
/// antisymmetric unit that rotates each oscillating component onto its
/// canonical conjugate (`J^2 = -(E_+ + E_-)`).
#[derive(Debug, Clone)]
pub struct SuperoperatorSpectrum {
    pub p_minus: Array2<C64>,
    pub p_plus: Array2<C64>,
    pub e_minus: Array2<C64>,
    pub e_zero: Array2<C64>,
    pub e_plus: Array2<C64>,
    pub j: Array2<C64>,
    /// Liouvillian gap `2 mu`: the oscillation frequency of the
    /// non-invariant components.
    pub frequency: f64,
    /// True in the unbroken phase, where the order parameter vanishes and
    /// the would-be Goldstone components `E_{+-} sz` degenerate to zero.
    pub degenerate: bool,
}

/// Build the Liouvillian eigenprojections of a solved mean-field problem.
pub fn superoperator_spectrum(sol: &GapSolution) -> SuperoperatorSpectrum {
    let unit_bloch = sol.h_eff.mapv(|z| z / sol.mu); // n.sigma with n unit
    let p_minus = (identity(2) - &unit_bloch).mapv(|z| z * 0.5);
    let p_plus = (identity(2) + &unit_bloch).mapv(|z| z * 0.5);
    let e_minus = kron(&p_plus.t(), &p_minus);
    let e_plus = kron(&p_minus.t(), &p_plus);
    let e_zero = kron(&p_minus.t(), &p_minus) + kron(&p_plus.t(), &p_plus);
    let j = (&e_plus - &e_minus).mapv(|z| z * C64::new(0.0, 1.0));
    SuperoperatorSpectrum {
        p_minus,
        p_plus,
        e_minus,
        e_zero,
        e_plus,
        j,
        frequency: 2.0 * sol.mu,
        degenerate: !sol.is_broken(),
    }
}

/// The symmetry-adapted split of the one-site observable `sz`.
///
/// `hat_z = (1 - E_0) sz` is the part of `sz` that oscillates under the
/// effective dynamics — the Goldstone coordinate; `j_hat_z = J hat_z` is
/// its canonical conjugate (up to the frequency normalization); and
/// `invariant_z = E_0 sz` is the leftover invariant component.
#[derive(Debug, Clone)]
pub struct SymmetryDecomposition {
    pub hat_z: Array2<C64>,
    pub invariant_z: Array2<C64>,
    pub j_hat_z: Array2<C64>,
}

/// Split `sz` through the Liouvillian eigenprojections of `sol`.
pub fn symmetry_decompose(sol: &GapSolution) -> SymmetryDecomposition {
    let spec = superoperator_spectrum(sol);
    let sz = pauli().z.op().clone();
    let invariant_z = apply_superop(&spec.e_zero, &sz);
    let hat_z = &sz - &invariant_z;
    let j_hat_z = apply_superop(&spec.j, &hat_z);
    SymmetryDecomposition {
        hat_z,
        invariant_z,
        j_hat_z,
    }
}

/// Closed form of the Goldstone coordinate:
/// `hat_z = (|lambda|^2/mu^2) sz + (eps/mu^2)(lambda sp + conj(lambda) sm)`.
pub fn hat_z_closed(sol: &GapSolution) -> Array2<C64> {
    let p = pauli();
    let mu2 = sol.mu * sol.mu;
    let v = sol.lambda.norm_sqr() / mu2;
    let w = sol.epsilon / mu2;
    p.z.op().mapv(|z| z * v)
        + p.plus.op().mapv(|z| z * (w * sol.lambda))
        + p.minus.op().mapv(|z| z * (w * sol.lambda.conj()))
}

/// Closed form of the conjugate coordinate:
/// `J hat_z = (i/mu)(lambda sp - conj(lambda) sm)`.
pub fn j_hat_z_closed(sol: &GapSolution) -> Array2<C64> {
    let p = pauli();
    let i_over_mu = C64::new(0.0, 1.0 / sol.mu);
    p.plus.op().mapv(|z| z * (i_over_mu * sol.lambda))
        - p.minus.op().mapv(|z| z * (i_over_mu * sol.lambda.conj()))
}

/// Equilibrium statistics of the Goldstone canonical pair
/// `Q = F(hat_z)`, `P = F(J hat_z) / (2 mu)` built from the fluctuations
/// of `hat_z` and its conjugate in the mean-field state.
///
/// All entries are exact closed-form consequences of the gap equation;
/// in the unbroken phase the pair degenerates and everything except
/// `frequency` and `var_invariant` vanishes.
#[derive(Debug, Clone, Copy)]
pub struct GoldstoneStatistics {
    /// Canonical-pair weight `c = 2 |lambda|^2 / mu^2`: `[Q, P] = i c`.
    pub coupling: f64,
    /// Oscillation frequency `2 mu` of the pair.
    pub frequency: f64,
    /// `var(Q) = w(hat_z^2) - w(hat_z)^2`.
    pub var_q: f64,
    /// `var(P) = var(Q) / (2 mu)^2`.
    pub var_p: f64,
    /// Variance of the invariant component `E_0 sz`.
    pub var_invariant: f64,
    /// `-i w([hat_z, J hat_z]) = 4 |lambda|^2 / mu` — the unnormalized
    /// commutator of the two fluctuation directions.
    pub commutator_ff: f64,
    /// `[Q, P]/i = commutator_ff / (2 mu)`; equals `coupling` (the two
    /// are computed by independent routes).
    pub commutator_qp: f64,
    /// Thermal occupancy `c / (exp(2 beta mu) - 1)`; zero at zero
    /// temperature.
    pub occupancy: f64,
}

/// Compute the Goldstone-pair statistics of a solved mean-field problem.
/// Variances and commutators are evaluated as one-site traces against
/// `rho`; only `coupling` and `occupancy` use the closed forms.
pub fn goldstone_statistics(sol: &GapSolution) -> GoldstoneStatistics {
    let decomp = symmetry_decompose(sol);
    let rho = sol.rho();
    let expect = |op: &Array2<C64>| trace(&rho.dot(op));
    let variance = |op: &Array2<C64>| {
        let mean = expect(op);
        (expect(&op.dot(op)) - mean * mean).re
    };
    let frequency = 2.0 * sol.mu;
    let var_q = variance(&decomp.hat_z);
    let p_op = decomp.j_hat_z.mapv(|z| z / frequency);
    let var_p = variance(&p_op);
    let var_invariant = variance(&decomp.invariant_z);
    let comm = decomp.hat_z.dot(&decomp.j_hat_z) - decomp.j_hat_z.dot(&decomp.hat_z);
    let commutator_ff = (expect(&comm) * C64::new(0.0, -1.0)).re;
    let commutator_qp = commutator_ff / frequency;
    let coupling = 2.0 * sol.lambda.norm_sqr() / (sol.mu * sol.mu);
    let occupancy = match sol.beta {
        Beta::Infinite => 0.0,
        Beta::Finite(b) => coupling / (frequency * b).exp_m1(),
    };
    GoldstoneStatistics {
        coupling,
        frequency,
        var_q,
        var_p,
        var_invariant,
        commutator_ff,
        commutator_qp,
        occupancy,
    }
}

/// Mean-field two-point function of the Goldstone coordinate:
///
/// `g(t) = w(hat_z alpha_t(hat_z))
///       = (|lambda|^2/mu^2) [p_- exp(2 i mu t) + p_+ exp(-2 i mu t)]`
///
/// with level weights `p_-/+ = (1 +/- tanh(beta mu))/2`. At zero
/// temperature only the `exp(+2 i mu t)` branch survives.
pub fn two_point_limit(sol: &GapSolution, t: f64) -> C64 {
    let v2 = sol.lambda.norm_sqr() / (sol.mu * sol.mu);
    let th = sol.polarization();
    let weight_lower = 0.5 * (1.0 + th);
    let weight_upper = 0.5 * (1.0 - th);
    let w = 2.0 * sol.mu * t;
    weight_lower * v2 * C64::new(0.0, w).exp() + weight_upper * v2 * C64::new(0.0, -w).exp()
}

/// The same two-point function on a finite chain of `2*half_width + 1`
/// sites: `g_N(t) = w(F alpha_t(F))` with `F` the site-averaged
/// fluctuation of `hat_z`, `alpha_t` the full chain dynamics, and `w`
/// the mean-field product state.
///
/// Comparing this against [`two_point_limit`] exposes the zero-mode
/// character of the uniform Goldstone fluctuation. The total symmetry
/// generator `sum_i sz_i` commutes with the chain Hamiltonian, so its
/// fluctuation is a constant of motion for every `N`; the interaction
/// cancels the one-site precession of `hat_z` order by order (exactly,
/// up to an `O(1/sqrt(M))` quadratic-in-fluctuations remainder). As the
/// chain grows, `g_N(t)` therefore flattens onto the plateau
/// `g_N(0) = var(Q)` instead of following the `exp(2 i mu t)` rotation
/// of the lifted one-site dynamics: at zero momentum the mode costs no
/// energy.
///
/// Evaluation runs in the chain eigenbasis: with `F' = U^dag F U`,
/// `D' = U^dag D U`, and `W_ab = (D'F')_ab F'_ba`, each time is the
/// bilinear `g(t) = u^dag W u` over the phase vector `u_a = exp(i t E_a)`.
pub fn finite_size_two_point(
    sol: &GapSolution,
    half_width: usize,
    times: &[f64],
) -> Result<Vec<C64>> {
    let chain = build_bcs_hamiltonian(sol.epsilon, half_width)?;
    let sites = 2 * half_width + 1;
    let dim = 1 << sites;
    let hat_z = symmetry_decompose(sol).hat_z;

    let mut fluct: Array2<C64> = Array2::zeros((dim, dim));
    for i in 0..sites {
        fluct = fluct + embed(&hat_z, i, sites)?;
    }
    let scale = 1.0 / (sites as f64).sqrt();
    fluct.mapv_inplace(|z| z * scale);

    let mut density = sol.rho().clone();
    for _ in 1..sites {
        density = kron(&density, sol.rho());
    }

    let eig = chain.eig();
    let u = &eig.vectors;
    let ud = adjoint(u);
    let fluct_eig = ud.dot(&fluct).dot(u);
    let density_eig = ud.dot(&density).dot(u);
    let weights = &density_eig.dot(&fluct_eig) * &fluct_eig.t();

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let phases = eig.values.mapv(|e| C64::new(0.0, t * e).exp());
        let wu = weights.dot(&phases);
        let g: C64 = phases.iter().zip(wu.iter()).map(|(p, x)| p.conj() * x).sum();
        out.push(g);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{commutator, heisenberg_evolve, max_abs_diff, HermitianOperator};
    use proptest::prelude::*;

    fn broken_solution() -> GapSolution {
        solve_gap(0.4, Beta::Infinite, 0.0).unwrap()
    }

    #[test]
    fn critical_beta_frozen_value() {
        // atanh(0.8)/0.4 = ln(9)/0.8
        let expected = 2.746_530_721_670_274_5;
        assert!((critical_beta(0.4).unwrap() - expected).abs() <= 1e-13);
        assert!(critical_beta(0.5).is_err());
        assert!(critical_beta(0.0).is_err());
    }

    #[test]
    fn zero_temperature_closed_form() {
        let sol = broken_solution();
        assert_eq!(sol.mu, 0.5);
        assert!((sol.order_abs() - 0.3).abs() <= 1e-15);
        assert!(sol.is_broken());
        assert!(sol.residual() <= 1e-15);
        // rho is the lower level of h: rho = p_minus at zero temperature
        let spec = superoperator_spectrum(&sol);
        assert!(max_abs_diff(sol.rho(), &spec.p_minus) <= 1e-14);
    }

    #[test]
    fn gap_equation_residual_is_tiny_across_the_broken_phase() {
        for &eps in &[0.1, 0.25, 0.4, 0.45] {
            let bc = critical_beta(eps).unwrap();
            for &mult in &[1.0000001, 1.2, 2.0, 5.0, 50.0] {
                let sol = solve_gap(eps, Beta::Finite(mult * bc), 0.0).unwrap();
                assert!(sol.is_broken(), "eps={eps} mult={mult} not broken");
                assert!(sol.mu > eps && sol.mu < 0.5);
                assert!(
                    sol.residual() <= 1e-11,
                    "eps={eps} mult={mult} residual={:.3e}",
                    sol.residual()
                );
                // gap equation itself
                assert!((sol.polarization() - 2.0 * sol.mu).abs() <= 1e-11);
            }
        }
    }

    #[test]
    fn unbroken_phase_below_critical_beta() {
        let bc = critical_beta(0.4).unwrap();
        let sol = solve_gap(0.4, Beta::Finite(0.9 * bc), 0.0).unwrap();
        assert!(!sol.is_broken());
        assert_eq!(sol.lambda, C64::new(0.0, 0.0));
        assert_eq!(sol.mu, 0.4);
        assert_eq!(sol.residual(), 0.0);
        assert!(superoperator_spectrum(&sol).degenerate);
        let stats = goldstone_statistics(&sol);
        assert_eq!(stats.coupling, 0.0);
        assert!(stats.var_q.abs() <= 1e-15);
        assert!(stats.occupancy.abs() <= 1e-15);
        // invariant part is all of sz: var = 1 - tanh(beta eps)^2
        let th = sol.polarization();
        assert!((stats.var_invariant - (1.0 - th * th)).abs() <= 1e-12);
    }

    #[test]
    fn solve_gap_validates_input() {
        assert!(matches!(
            solve_gap(0.6, Beta::Infinite, 0.0),
            Err(Error::EpsilonOutOfRange(_))
        ));
        assert!(matches!(
            solve_gap(0.3, Beta::Finite(-1.0), 0.0),
            Err(Error::BetaOutOfRange(_))
        ));
    }

    #[test]
    fn state_is_self_consistent_with_a_complex_phase() {
        let bc = critical_beta(0.3).unwrap();
        let sol = solve_gap(0.3, Beta::Finite(2.0 * bc), 0.7).unwrap();
        // w(sm) = lambda, including the phase
        let sm = pauli().minus;
        let got = trace(&sol.rho().dot(sm.op()));
        assert!((got - sol.lambda).norm() <= 1e-12);
        assert!((sol.lambda.arg() - 0.7).abs() <= 1e-12);
        // w(sz) = -2 eps via the gap equation
        let z = trace(&sol.rho().dot(pauli().z.op()));
        assert!((z.re + 2.0 * 0.3).abs() <= 1e-11);
        assert!(z.im.abs() <= 1e-14);
    }

    #[test]
    fn superoperators_resolve_the_identity_and_square_correctly() {
        let bc = critical_beta(0.35).unwrap();
        let sol = solve_gap(0.35, Beta::Finite(1.6 * bc), 0.7).unwrap();
        let spec = superoperator_spectrum(&sol);
        let total = &spec.e_minus + &spec.e_zero + &spec.e_plus;
        assert!(max_abs_diff(&total, &identity(4)) <= 1e-14);
        // J^2 = -(E_+ + E_-)
        let j2 = spec.j.dot(&spec.j);
        let rhs = (&spec.e_plus + &spec.e_minus).mapv(|z| -z);
        assert!(max_abs_diff(&j2, &rhs) <= 1e-14);
        // E_0 is idempotent
        assert!(max_abs_diff(&spec.e_zero.dot(&spec.e_zero), &spec.e_zero) <= 1e-14);
    }

    #[test]
    fn apply_matches_explicit_projector_sandwich() {
        // Validates the vectorization convention: E_-(A) = P_- A P_+.
        let sol = broken_solution();
        let spec = superoperator_spectrum(&sol);
        let a = crate::testutil::random_hermitian(2, 33);
        let via_superop = apply_superop(&spec.e_minus, &a);
        let direct = spec.p_minus.dot(&a).dot(&spec.p_plus);
        assert!(max_abs_diff(&via_superop, &direct) <= 1e-14);
    }

    #[test]
    fn j_commutes_with_the_adjoint() {
        let bc = critical_beta(0.25).unwrap();
        let sol = solve_gap(0.25, Beta::Finite(3.0 * bc), 1.1).unwrap();
        let spec = superoperator_spectrum(&sol);
        for seed in [5u64, 6, 7] {
            let mut a = crate::testutil::random_hermitian(2, seed);
            a[[0, 1]] += C64::new(0.0, 0.3); // make it non-Hermitian
            let lhs = adjoint(&apply_superop(&spec.j, &a));
            let rhs = apply_superop(&spec.j, &adjoint(&a));
            assert!(max_abs_diff(&lhs, &rhs) <= 1e-13);
        }
    }

    #[test]
    fn decomposition_matches_closed_forms() {
        for (eps, beta, phase) in [
            (0.4, Beta::Infinite, 0.0),
            (0.3, Beta::Finite(2.0 * critical_beta(0.3).unwrap()), 0.7),
            (0.45, Beta::Finite(1.3 * critical_beta(0.45).unwrap()), -2.1),
        ] {
            let sol = solve_gap(eps, beta, phase).unwrap();
            let decomp = symmetry_decompose(&sol);
            assert!(max_abs_diff(&decomp.hat_z, &hat_z_closed(&sol)) <= 1e-12);
            assert!(max_abs_diff(&decomp.j_hat_z, &j_hat_z_closed(&sol)) <= 1e-12);
            // the split is exact: hat_z + invariant_z = sz
            let total = &decomp.hat_z + &decomp.invariant_z;
            assert!(max_abs_diff(&total, pauli().z.op()) <= 1e-13);
        }
    }

    #[test]
    fn hat_z_rotates_onto_its_conjugate_under_the_dynamics() {
        let bc = critical_beta(0.3).unwrap();
        let sol = solve_gap(0.3, Beta::Finite(2.5 * bc), 0.4).unwrap();
        let decomp = symmetry_decompose(&sol);
        let two_mu = C64::new(0.0, 2.0 * sol.mu);
        // [h, hat_z] = -2 i mu (J hat_z)
        let lhs = commutator(sol.h_eff(), &decomp.hat_z).unwrap();
        let rhs = decomp.j_hat_z.mapv(|z| -two_mu * z);
        assert!(max_abs_diff(&lhs, &rhs) <= 1e-13);
        // [h, J hat_z] = +2 i mu hat_z
        let lhs = commutator(sol.h_eff(), &decomp.j_hat_z).unwrap();
        let rhs = decomp.hat_z.mapv(|z| two_mu * z);
        assert!(max_abs_diff(&lhs, &rhs) <= 1e-13);
    }

    #[test]
    fn goldstone_statistics_frozen_at_zero_temperature() {
        let stats = goldstone_statistics(&broken_solution());
        // eps = 0.4: mu = 1/2, |lambda|^2 = 0.09
        assert!((stats.var_q - 0.36).abs() <= 1e-12);
        assert!((stats.var_p - 0.36).abs() <= 1e-12);
        assert!((stats.coupling - 0.72).abs() <= 1e-12);
        assert!((stats.commutator_ff - 0.72).abs() <= 1e-12);
        assert!((stats.commutator_qp - 0.72).abs() <= 1e-12);
        assert!((stats.frequency - 1.0).abs() <= 1e-15);
        assert!(stats.var_invariant.abs() <= 1e-12);
        assert_eq!(stats.occupancy, 0.0);
    }

    #[test]
    fn variance_satisfies_the_oscillator_virial_relation() {
        // var(Q) = (c * freq / 2) * coth(beta * freq / 2), which the gap
        // equation turns into the closed |lambda|^2/mu^2.
        let bc = critical_beta(0.35).unwrap();
        let beta = 1.7 * bc;
        let sol = solve_gap(0.35, Beta::Finite(beta), 0.0).unwrap();
        let stats = goldstone_statistics(&sol);
        let coth = 1.0 / (beta * sol.mu).tanh();
        let virial = 0.5 * stats.coupling * stats.frequency * coth;
        assert!(
            (stats.var_q - virial).abs() <= 1e-11,
            "var_q {:.3e} vs virial {:.3e}",
            stats.var_q,
            virial
        );
        assert!((stats.var_q - sol.lambda.norm_sqr() / (sol.mu * sol.mu)).abs() <= 1e-11);
        // commutator route agrees with the closed-form coupling
        assert!((stats.commutator_qp - stats.coupling).abs() <= 1e-12);
    }

    #[test]
    fn two_point_limit_frozen_at_zero_temperature() {
        let sol = broken_solution();
        for &t in &[0.0, 0.3, 1.0, 2.5, 9.0] {
            let g = two_point_limit(&sol, t);
            assert!((g.re - 0.36 * t.cos()).abs() <= 1e-14);
            assert!((g.im - 0.36 * t.sin()).abs() <= 1e-14);
        }
    }

    #[test]
    fn two_point_limit_matches_dense_one_site_dynamics() {
        // Independent oracle: evolve hat_z with the dense 2x2 effective
        // Hamiltonian and trace against rho.
        let bc = critical_beta(0.3).unwrap();
        let sol = solve_gap(0.3, Beta::Finite(2.0 * bc), 0.4).unwrap();
        let h = HermitianOperator::new(sol.h_eff().clone()).unwrap();
        let hat_z = symmetry_decompose(&sol).hat_z;
        for &t in &[0.0, 0.7, 1.9, 6.0] {
            let evolved = heisenberg_evolve(&h, &hat_z, t).unwrap();
            let direct = trace(&sol.rho().dot(&hat_z.dot(&evolved)));
            let closed = two_point_limit(&sol, t);
            assert!(
                (direct - closed).norm() <= 1e-12,
                "t={t}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn finite_size_two_point_matches_direct_evolution_on_the_smallest_chain() {
        let sol = broken_solution();
        let times = [0.0, 0.5, 1.3];
        let got = finite_size_two_point(&sol, 1, &times).unwrap();
        // direct: g(t) = tr(D F alpha_t(F)) on 3 sites
        let chain = build_bcs_hamiltonian(sol.epsilon, 1).unwrap();
        let hat_z = symmetry_decompose(&sol).hat_z;
        let mut fluct: Array2<C64> = Array2::zeros((8, 8));
        for i in 0..3 {
            fluct = fluct + embed(&hat_z, i, 3).unwrap();
        }
        fluct.mapv_inplace(|z| z / 3f64.sqrt());
        let density = kron(&kron(sol.rho(), sol.rho()), sol.rho());
        for (i, &t) in times.iter().enumerate() {
            let evolved = heisenberg_evolve(&chain, &fluct, t).unwrap();
            let expected = trace(&density.dot(&fluct.dot(&evolved)));
            assert!(
                (got[i] - expected).norm() <= 1e-10,
                "t={t}: {} vs {expected}",
                got[i]
            );
        }
    }

    /// Centered momentum-zero fluctuation operator used by the frozen-mode
    /// tests below.
    fn uniform_fluctuation(op: &Array2<C64>, mean: C64, sites: usize) -> Array2<C64> {
        let dim = 1 << sites;
        let mut f: Array2<C64> = Array2::zeros((dim, dim));
        for i in 0..sites {
            f = f + embed(op, i, sites).unwrap();
        }
        f = f - identity(dim).mapv(|z| z * (mean * sites as f64));
        f.mapv(|z| z / (sites as f64).sqrt())
    }

    #[test]
    fn interaction_cancels_the_one_site_precession_of_uniform_fluctuations() {
        // Exact operator identities behind the frozen zero mode, with
        // F(a) the centered uniform fluctuation and lam the (real) order
        // parameter:
        //   i[H, F(sx)] = (i/sqrt(M)) (F(sp) F(sz) - F(sz) F(sm))
        //   i[H, F(sy)] = 2 lam F(sz) + (1/sqrt(M)) (F(sp) F(sz) + F(sz) F(sm))
        // The one-site terms (-2 eps F(sy) and +2 eps F(sx) + ...) are
        // cancelled by the interaction; only a quadratic-in-fluctuations
        // remainder of order 1/sqrt(M) survives, plus the drift along the
        // conserved density F(sz).
        let sol = broken_solution();
        let p = pauli();
        let lam = sol.lambda.re;
        let i = C64::new(0.0, 1.0);
        for half_width in [1usize, 2] {
            let sites = 2 * half_width + 1;
            let m = sites as f64;
            let h = build_bcs_hamiltonian(sol.epsilon, half_width).unwrap();
            let fx = uniform_fluctuation(p.x.op(), C64::new(2.0 * lam, 0.0), sites);
            let fy = uniform_fluctuation(p.y.op(), C64::new(0.0, 0.0), sites);
            let fz = uniform_fluctuation(p.z.op(), C64::new(-2.0 * sol.epsilon, 0.0), sites);
            let fp = uniform_fluctuation(p.plus.op(), C64::new(lam, 0.0), sites);
            let fm = uniform_fluctuation(p.minus.op(), C64::new(lam, 0.0), sites);

            let lhs = commutator(h.matrix(), &fx).unwrap().mapv(|z| z * i);
            let rhs = (fp.dot(&fz) - fz.dot(&fm)).mapv(|z| z * (i / m.sqrt()));
            assert!(max_abs_diff(&lhs, &rhs) <= 1e-13, "sx identity at M={sites}");

            let lhs = commutator(h.matrix(), &fy).unwrap().mapv(|z| z * i);
            let rhs = fz.mapv(|z| z * (2.0 * lam))
                + (fp.dot(&fz) + fz.dot(&fm)).mapv(|z| z / m.sqrt());
            assert!(max_abs_diff(&lhs, &rhs) <= 1e-13, "sy identity at M={sites}");
        }
    }

    #[test]
    fn finite_size_two_point_flattens_onto_the_variance_plateau() {
        // The uniform fluctuation of hat_z is asymptotically frozen: as N
        // grows, g_N stays closer and closer to its t=0 value var(Q),
        // while the lifted one-site dynamics rotates away from it.
        let sol = broken_solution();
        let var_q = goldstone_statistics(&sol).var_q;
        let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let mut plateau_devs = Vec::new();
        let mut limit_devs = Vec::new();
        for half_width in 1..=3 {
            let g = finite_size_two_point(&sol, half_width, &times).unwrap();
            assert!((g[0].re - var_q).abs() <= 1e-12, "g_N(0) is the variance");
            assert!(g[0].im.abs() <= 1e-12);
            let plateau = g
                .iter()
                .map(|gn| (gn - C64::new(var_q, 0.0)).norm())
                .fold(0.0, f64::max);
            plateau_devs.push(plateau);
            let vs_limit = g
                .iter()
                .zip(&times)
                .map(|(gn, &t)| (gn - two_point_limit(&sol, t)).norm())
                .fold(0.0, f64::max);
            limit_devs.push(vs_limit);
        }
        assert!(
            plateau_devs[0] > plateau_devs[1] && plateau_devs[1] > plateau_devs[2],
            "plateau deviations not decreasing: {plateau_devs:?}"
        );
        // ... and the one-site oscillation is NOT what g_N converges to:
        // its deviation stays above the swing of the rotating phase.
        for dev in &limit_devs {
            assert!(*dev > 0.5, "unexpected convergence to the lifted dynamics");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn broken_solutions_satisfy_gap_and_virial(
            eps in 0.05f64..0.45,
            mult in 1.05f64..10.0,
            phase in -3.0f64..3.0,
        ) {
            let bc = critical_beta(eps).unwrap();
            let sol = solve_gap(eps, Beta::Finite(mult * bc), phase).unwrap();
            prop_assert!(sol.is_broken());
            prop_assert!(sol.mu > eps && sol.mu < 0.5);
            prop_assert!(sol.residual() <= 1e-10);
            let stats = goldstone_statistics(&sol);
            prop_assert!(stats.var_q >= 0.0);
            prop_assert!(stats.occupancy >= 0.0);
            let coth = 1.0 / (mult * bc * sol.mu).tanh();
            let virial = 0.5 * stats.coupling * stats.frequency * coth;
            prop_assert!((stats.var_q - virial).abs() <= 1e-9);
        }
    }
}
