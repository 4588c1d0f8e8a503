//! Fluctuation operators on finite chains and their statistics.
//!
//! A local observable `A` on a window of `|L|` sites has the momentum-`k`
//! fluctuation
//!
//! ```text
//! F_k(A) = |L|^(-s) * sum_x cos(k x) (A_x - w(A))
//! ```
//!
//! with positions `x` counted from the window center, centering mean `w(A)`
//! taken in the supplied state, and scaling exponent `s = 1/2` unless
//! rescaled. This module computes, for such operators:
//!
//! * cumulants up to fourth order ([`cumulants`]), factor-wise in product
//!   states so windows far beyond the dense size cap stay cheap;
//! * characteristic functions against their Gaussian reference
//!   ([`characteristic_function`]), the finite-size shadow of the central
//!   limit theorem;
//! * the spectral measure of the Liouvillian `[H, .]` over Bohr frequencies
//!   ([`liouvillian_spectral_measure`]) and its susceptibility transform
//!   ([`dc_measure`]), related by the KMS weight symmetry
//!   `w(-l) = exp(-beta l) w(l)`;
//! * the Duhamel two-point function ([`duhamel`]), the susceptibility it
//!   induces ([`susceptibility`]), and the Bogoliubov inequality built from
//!   both ([`bogoliubov_check`]);
//! * the static structure factor ([`static_structure`]), the small-`k`
//!   limit of `w(F_k(A)^2)` assembled from two-point correlations.

use ndarray::Array2;

use crate::models::QuantumState;
use crate::ops::{
    adjoint, commutator, embed, identity, trace, HermitianOperator, SiteObservable, MAX_SITES,
};
use crate::{Beta, Error, Result, C64};

/// Bohr-frequency lines closer than this are treated as one spectral atom.
/// Dense eigensolvers split exactly degenerate Liouvillian lines at the
/// `1e-12` level; merging at `1e-9` restores them.
pub const MERGE_TOLERANCE: f64 = 1e-9;

/// Energy differences below this are treated as exactly degenerate, both in
/// the Duhamel kernel and when projecting out the invariant part of an
/// observable.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Weights below this are dropped from spectral measures outright.
const WEIGHT_FLOOR: f64 = 1e-300;

/// A centered, normalized momentum-`k` fluctuation of a one-site observable
/// over a finite window.
///
/// The window is decoupled from any particular state: a homogeneous product
/// state fixes only the one-site density matrix, so factor-wise evaluations
/// (cumulants, characteristic functions) accept windows far beyond the dense
/// size cap. States backed by a chain Hamiltonian pin the window to their
/// chain instead.
#[derive(Debug, Clone)]
pub struct FluctuationObservable {
    base: SiteObservable,
    sites: usize,
    momentum: f64,
    centered_mean: f64,
    scaling_exponent: f64,
}

impl FluctuationObservable {
    /// Fluctuation over the symmetric window of `2 * half_width + 1` sites.
    ///
    /// The centering mean is the per-site expectation of `base` in `state`;
    /// `momentum` must lie in `[0, pi]`. For Hamiltonian-backed states the
    /// window must cover the chain exactly.
    pub fn new(
        base: SiteObservable,
        state: &QuantumState,
        half_width: usize,
        momentum: f64,
    ) -> Result<Self> {
        Self::with_sites(base, state, 2 * half_width + 1, momentum)
    }

    /// Fluctuation over an explicit number of sites (use [`new`] for the
    /// odd, symmetric windows; this exists for even chains).
    ///
    /// [`new`]: FluctuationObservable::new
    pub fn with_sites(
        base: SiteObservable,
        state: &QuantumState,
        sites: usize,
        momentum: f64,
    ) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidParameter(
                "a fluctuation window needs at least one site".into(),
            ));
        }
        if !(0.0..=std::f64::consts::PI).contains(&momentum) {
            return Err(Error::InvalidParameter(format!(
                "momentum {momentum} outside [0, pi]"
            )));
        }
        if !base.is_hermitian() {
            return Err(Error::InvalidParameter(
                "fluctuations are built from Hermitian one-site observables".into(),
            ));
        }
        if state.hamiltonian().is_some() && sites != state.sites() {
            return Err(Error::InvalidParameter(format!(
                "window of {sites} sites does not cover the {}-site chain",
                state.sites()
            )));
        }
        let centered_mean = state.site_expectation(&base)?.re;
        Ok(Self {
            base,
            sites,
            momentum,
            centered_mean,
            scaling_exponent: 0.5,
        })
    }

    /// Replace the default `|L|^(-1/2)` normalization exponent, e.g. for
    /// the rescaled fluctuations of a critical mode.
    pub fn with_scaling(mut self, scaling_exponent: f64) -> Result<Self> {
        if !(scaling_exponent.is_finite() && scaling_exponent > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scaling exponent {scaling_exponent} must be positive and finite"
            )));
        }
        self.scaling_exponent = scaling_exponent;
        Ok(self)
    }

    pub fn base(&self) -> &SiteObservable {
        &self.base
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn momentum(&self) -> f64 {
        self.momentum
    }

    /// The per-site mean subtracted from every copy of the base observable.
    pub fn centered_mean(&self) -> f64 {
        self.centered_mean
    }

    pub fn scaling_exponent(&self) -> f64 {
        self.scaling_exponent
    }

    /// Coefficient `cos(k x) / |L|^s` multiplying the (centered) copy of the
    /// base observable at `site`, with `x` counted from the window center.
    pub fn coefficient(&self, site: usize) -> f64 {
        let x = site as f64 - (self.sites as f64 - 1.0) / 2.0;
        (self.momentum * x).cos() / (self.sites as f64).powf(self.scaling_exponent)
    }

    /// Dense chain matrix `sum_site coefficient * (A_site - mean)`.
    ///
    /// Only available within the dense size cap; the factor-wise paths in
    /// [`cumulants`] and [`characteristic_function`] have no such limit.
    pub fn matrix(&self) -> Result<HermitianOperator> {
        if self.sites > MAX_SITES {
            return Err(Error::SizeCap {
                sites: self.sites,
                max: MAX_SITES,
            });
        }
        let dim = 1usize << self.sites;
        let mut total: Array2<C64> = Array2::zeros((dim, dim));
        let centered = self.base.op() - &identity(2).mapv(|z| z * self.centered_mean);
        for site in 0..self.sites {
            let c = self.coefficient(site);
            if c != 0.0 {
                total = total + embed(&centered, site, self.sites)?.mapv(|z| z * c);
            }
        }
        HermitianOperator::new(total)
    }
}

/// Cumulants from raw moments `m[l] = w(X^(l+1))`, orders one through four.
fn cumulants_from_moments(m: &[f64; 4]) -> [f64; 4] {
    let (m1, m2, m3, m4) = (m[0], m[1], m[2], m[3]);
    [
        m1,
        m2 - m1 * m1,
        m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3),
        m4 - 4.0 * m1 * m3 - 3.0 * m2 * m2 + 12.0 * m1 * m1 * m2 - 6.0 * m1.powi(4),
    ]
}

/// Cumulants of the one-site base observable under a one-site density
/// matrix.
fn one_site_cumulants(rho: &Array2<C64>, op: &Array2<C64>) -> [f64; 4] {
    let mut moments = [0.0f64; 4];
    let mut power = op.clone();
    for (l, slot) in moments.iter_mut().enumerate() {
        if l > 0 {
            power = power.dot(op);
        }
        *slot = trace(&rho.dot(&power)).re;
    }
    cumulants_from_moments(&moments)
}

/// Cumulants of the fluctuation operator in `state`, orders `1..=max_order`
/// with `max_order <= 4`.
///
/// In a homogeneous product state the sites are independent, so cumulant
/// additivity gives `kappa_l(F) = (sum_x c_x^l) * kappa_l(A)` for `l >= 2`
/// without materializing any chain matrix — windows of any size stay cheap.
/// Hamiltonian-backed states go through the dense matrix powers instead
/// (and therefore inherit the size cap). The first cumulant vanishes by the
/// centering whenever the mean was taken in the same state.
pub fn cumulants(
    state: &QuantumState,
    fluctuation: &FluctuationObservable,
    max_order: usize,
) -> Result<Vec<f64>> {
    if !(1..=4).contains(&max_order) {
        return Err(Error::InvalidParameter(format!(
            "cumulant order {max_order} outside 1..=4"
        )));
    }
    let kappa = match state {
        QuantumState::Product { rho_site, .. } => {
            let site_kappa = one_site_cumulants(rho_site, fluctuation.base.op());
            let mut coeff_powers = [0.0f64; 4];
            for site in 0..fluctuation.sites {
                let c = fluctuation.coefficient(site);
                let mut cl = 1.0;
                for slot in coeff_powers.iter_mut() {
                    cl *= c;
                    *slot += cl;
                }
            }
            [
                coeff_powers[0] * (site_kappa[0] - fluctuation.centered_mean),
                coeff_powers[1] * site_kappa[1],
                coeff_powers[2] * site_kappa[2],
                coeff_powers[3] * site_kappa[3],
            ]
        }
        _ => {
            if fluctuation.sites != state.sites() {
                return Err(Error::DimensionMismatch {
                    left: 1 << fluctuation.sites,
                    right: state.dim(),
                });
            }
            let f = fluctuation.matrix()?;
            let mut moments = [0.0f64; 4];
            let mut power = f.matrix().clone();
            for (l, slot) in moments.iter_mut().enumerate() {
                if l > 0 {
                    power = power.dot(f.matrix());
                }
                *slot = state.expectation(&power)?.re;
            }
            cumulants_from_moments(&moments)
        }
    };
    Ok(kappa[..max_order].to_vec())
}

/// `tr(rho exp(i theta X))` for Hermitian 2x2 `X`, in closed form.
///
/// Splitting `X = a I + B` with `B` traceless, `B^2 = b^2 I`, so
/// `exp(i theta X) = exp(i theta a) (cos(theta b) I + i sin(theta b) B / b)`.
fn one_site_characteristic(rho: &Array2<C64>, x: &Array2<C64>, theta: f64) -> C64 {
    let a = 0.5 * trace(x).re;
    let b_mat = x - &identity(2).mapv(|z| z * a);
    let b = (0.5 * trace(&b_mat.dot(&b_mat)).re).max(0.0).sqrt();
    let rho_b = trace(&rho.dot(&b_mat)).re;
    let phase = C64::from_polar(1.0, theta * a);
    if b == 0.0 {
        return phase;
    }
    phase * ((theta * b).cos() + C64::new(0.0, 1.0) * (theta * b).sin() * rho_b / b)
}

/// Characteristic function of the fluctuation against its Gaussian
/// reference.
///
/// Returns one `(theta, |w(exp(i theta F))|, exp(-theta^2 s / 2))` row per
/// grid point, with `s` the second cumulant. Product states evaluate
/// factor-wise through the closed-form 2x2 exponential, so large windows
/// are cheap; Hamiltonian-backed states evaluate spectrally.
pub fn characteristic_function(
    state: &QuantumState,
    fluctuation: &FluctuationObservable,
    thetas: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let s = cumulants(state, fluctuation, 2)?[1];
    match state {
        QuantumState::Product { rho_site, .. } => {
            let centered =
                fluctuation.base.op() - &identity(2).mapv(|z| z * fluctuation.centered_mean);
            let factors: Vec<Array2<C64>> = (0..fluctuation.sites)
                .map(|site| centered.mapv(|z| z * fluctuation.coefficient(site)))
                .collect();
            Ok(thetas
                .iter()
                .map(|&theta| {
                    let char_val: C64 = factors
                        .iter()
                        .map(|x| one_site_characteristic(rho_site, x, theta))
                        .product();
                    (theta, char_val.norm(), (-0.5 * theta * theta * s).exp())
                })
                .collect())
        }
        _ => {
            let data = state.spectral_data().expect("non-product states are spectral");
            let f = fluctuation.matrix()?;
            let f_eig = f.eig();
            // q_m = sum_a p_a |<v_m|u_a>|^2: the distribution of F's
            // eigenvalues in the state.
            let overlap = adjoint(&f_eig.vectors).dot(&data.hamiltonian.eig().vectors);
            let q: Vec<f64> = (0..f.dim())
                .map(|m| {
                    (0..f.dim())
                        .map(|a| data.weights[a] * overlap[[m, a]].norm_sqr())
                        .sum()
                })
                .collect();
            Ok(thetas
                .iter()
                .map(|&theta| {
                    let char_val: C64 = q
                        .iter()
                        .zip(f_eig.values.iter())
                        .map(|(&qm, &fm)| C64::from_polar(qm, theta * fm))
                        .sum();
                    (theta, char_val.norm(), (-0.5 * theta * theta * s).exp())
                })
                .collect())
        }
    }
}

/// A purely atomic measure over Bohr frequencies.
///
/// Atoms are sorted by position, carry nonnegative weights, and no two
/// atoms sit closer than the merge tolerance.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
    merge_tolerance: f64,
}

impl SpectralMeasure {
    /// Build a measure from raw `(position, weight)` atoms: weights `<= 0`
    /// are dropped, atoms are sorted, and runs closer than
    /// `merge_tolerance` collapse onto their weighted-mean position.
    pub fn from_atoms(atoms: Vec<(f64, f64)>, merge_tolerance: f64) -> Self {
        let mut atoms: Vec<(f64, f64)> =
            atoms.into_iter().filter(|&(_, w)| w > WEIGHT_FLOOR).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (lambda, w) in atoms {
            match merged.last_mut() {
                Some((pos, weight)) if lambda - *pos <= merge_tolerance => {
                    let total = *weight + w;
                    *pos = (*pos * *weight + lambda * w) / total;
                    *weight = total;
                }
                _ => merged.push((lambda, w)),
            }
        }
        Self {
            atoms: merged,
            merge_tolerance,
        }
    }

    /// The `(position, weight)` atoms, sorted by position.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn merge_tolerance(&self) -> f64 {
        self.merge_tolerance
    }

    /// Total weight; for a Liouvillian measure this is `w(F^dag F)`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w).sum()
    }

    /// Integral of a test function against the measure.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(lambda, w)| w * f(lambda)).sum()
    }

    /// Total weight of the atoms within `tolerance` of `lambda`.
    pub fn weight_near(&self, lambda: f64, tolerance: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|&&(pos, _)| (pos - lambda).abs() <= tolerance)
            .map(|&(_, w)| w)
            .sum()
    }
}

/// Spectral data of a Hamiltonian-backed state, or the error naming what
/// was required.
fn spectral_or_err<'a>(
    state: &'a QuantumState,
    required: &'static str,
) -> Result<crate::models::SpectralData<'a>> {
    state.spectral_data().ok_or(Error::UnsupportedState {
        required,
        got: state.kind(),
    })
}

/// Transform a chain operator into the eigenbasis of `h`: `V^dag A V`.
fn to_eigenbasis(h: &HermitianOperator, op: &Array2<C64>) -> Array2<C64> {
    let v = &h.eig().vectors;
    adjoint(v).dot(op).dot(v)
}

/// Spectral measure of the Liouvillian `[H, .]` sampled by `op` in a Gibbs
/// or ground state: one atom per Bohr frequency `E_b - E_a` with weight
/// `sum p_a |<b|op|a>|^2`.
///
/// The total mass is `w(op^dag op)`; for a Gibbs state the weights obey the
/// KMS symmetry `w(-l) = exp(-beta l) w(l)`. Lines closer than
/// [`MERGE_TOLERANCE`] are merged.
pub fn liouvillian_spectral_measure(
    state: &QuantumState,
    op: &Array2<C64>,
) -> Result<SpectralMeasure> {
    let data = spectral_or_err(state, "a Gibbs or ground state")?;
    let dim = data.hamiltonian.dim();
    if op.dim() != (dim, dim) {
        return Err(Error::DimensionMismatch {
            left: op.nrows(),
            right: dim,
        });
    }
    let energies = &data.hamiltonian.eig().values;
    let op_eig = to_eigenbasis(data.hamiltonian, op);
    let mut atoms = Vec::new();
    for a in 0..dim {
        let p = data.weights[a];
        if p < WEIGHT_FLOOR {
            continue;
        }
        for b in 0..dim {
            let w = p * op_eig[[b, a]].norm_sqr();
            if w > WEIGHT_FLOOR {
                atoms.push((energies[b] - energies[a], w));
            }
        }
    }
    Ok(SpectralMeasure::from_atoms(atoms, MERGE_TOLERANCE))
}

/// Susceptibility transform of a Bohr-frequency measure: each atom at
/// `lambda > 0` is reweighted by `2 (1 - exp(-beta lambda)) / lambda`
/// (`2 / lambda` at `beta = inf`); atoms at `lambda <= 0` are dropped.
///
/// The zero line is the invariant subspace and deliberately gets no
/// `beta`-limit weight; project it out of the observable first (see
/// [`remove_invariant_part`]) when comparing the total mass against
/// `beta * duhamel`.
pub fn dc_measure(mu: &SpectralMeasure, beta: Beta) -> SpectralMeasure {
    let atoms = mu
        .atoms
        .iter()
        .filter(|&&(lambda, _)| lambda > mu.merge_tolerance)
        .map(|&(lambda, w)| {
            let factor = match beta {
                Beta::Finite(b) => 2.0 * (-(-b * lambda).exp_m1()) / lambda,
                Beta::Infinite => 2.0 / lambda,
            };
            (lambda, w * factor)
        })
        .collect();
    SpectralMeasure::from_atoms(atoms, mu.merge_tolerance)
}

/// The Duhamel two-point function and the inverse temperature it was taken
/// at.
///
/// The value is complex in general; for a Hermitian observable paired with
/// itself it is real and nonnegative, bounded by `w(A^dag A)`.
#[derive(Debug, Clone, Copy)]
pub struct DuhamelValue {
    pub value: C64,
    pub beta: f64,
}

/// Duhamel two-point function
/// `(A,B)~ = (1/beta) int_0^beta w(A^dag exp(-uH) B exp(uH)) du`
/// of a Gibbs state, evaluated spectrally:
///
/// ```text
/// (A,B)~ = sum_ab conj(A_ba) B_ba (p_a - p_b) / (beta (E_b - E_a))
/// ```
///
/// with the kernel replaced by its exact limit `p_a` on (near-)degenerate
/// pairs.
pub fn duhamel(state: &QuantumState, a: &Array2<C64>, b: &Array2<C64>) -> Result<DuhamelValue> {
    let data = spectral_or_err(state, "a Gibbs state")?;
    let Beta::Finite(beta) = data.beta else {
        return Err(Error::UnsupportedState {
            required: "a Gibbs state",
            got: state.kind(),
        });
    };
    let dim = data.hamiltonian.dim();
    if a.dim() != (dim, dim) || b.dim() != (dim, dim) {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    let energies = &data.hamiltonian.eig().values;
    let a_eig = to_eigenbasis(data.hamiltonian, a);
    let b_eig = to_eigenbasis(data.hamiltonian, b);
    let mut value = C64::new(0.0, 0.0);
    for row_a in 0..dim {
        for row_b in 0..dim {
            let gap = energies[row_b] - energies[row_a];
            let kernel = if gap.abs() < DEGENERACY_TOLERANCE {
                data.weights[row_a]
            } else {
                (data.weights[row_a] - data.weights[row_b]) / (beta * gap)
            };
            if kernel != 0.0 {
                value += a_eig[[row_b, row_a]].conj() * b_eig[[row_b, row_a]] * kernel;
            }
        }
    }
    Ok(DuhamelValue { value, beta })
}

/// Uniform (`k = 0`) or momentum-`k` susceptibility of a one-site
/// observable `q` over the chain of a Gibbs state: `(beta/2) * (F,F)~` at
/// `k = 0` and `beta * (F,F)~` at `k != 0`, with `F` the momentum-`k`
/// fluctuation of `q`.
///
/// The two normalizations are both conventional; the factor switch at
/// exactly `k = 0` is deliberate and documented rather than reconciled.
pub fn susceptibility(
    state: &QuantumState,
    q: &SiteObservable,
    half_width: usize,
    momentum: f64,
) -> Result<f64> {
    let fluct = FluctuationObservable::new(q.clone(), state, half_width, momentum)?;
    let f = fluct.matrix()?;
    let d = duhamel(state, f.matrix(), f.matrix())?;
    let factor = if momentum == 0.0 { d.beta / 2.0 } else { d.beta };
    Ok(factor * d.value.re)
}

/// Both sides of the Bogoliubov inequality and their difference.
#[derive(Debug, Clone, Copy)]
pub struct BogoliubovCheck {
    /// `|w([A^dag, B])|^2`.
    pub lhs: f64,
    /// `beta * w([A^dag, [H, A]]) * (B,B)~`.
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative up to floating-point noise for any Gibbs
    /// state.
    pub slack: f64,
}

/// Evaluate the Bogoliubov inequality
/// `|w([A^dag, B])|^2 <= beta * w([A^dag, [H, A]]) * (B,B)~`
/// in a Gibbs state, returning both sides and the slack.
pub fn bogoliubov_check(
    state: &QuantumState,
    a: &Array2<C64>,
    b: &Array2<C64>,
) -> Result<BogoliubovCheck> {
    let data = spectral_or_err(state, "a Gibbs state")?;
    let h = data.hamiltonian.matrix().clone();
    let a_dag = adjoint(a);
    let cross = state.expectation(&(a_dag.dot(b) - b.dot(&a_dag)))?;
    let lhs = cross.norm_sqr();
    let la = commutator(&h, a)?;
    let double = state.expectation(&(a_dag.dot(&la) - la.dot(&a_dag)))?.re;
    let d = duhamel(state, b, b)?;
    let rhs = d.beta * double * d.value.re;
    Ok(BogoliubovCheck {
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

/// Static structure factor `(1/2) sum_z C(z) cos(k z)` of a one-site
/// observable, with `C(z)` the connected two-point correlation between the
/// window center and displacement `z` (all displacements the chain
/// affords).
///
/// In a homogeneous product state only `z = 0` survives and the value is
/// `var(A) / 2` at every momentum. On a periodic, translation-invariant
/// chain at a grid momentum `k = 2 pi m / sites` (with `2k` not a multiple
/// of `2 pi`) it equals `w(F_k(A)^2)` exactly.
pub fn static_structure(state: &QuantumState, a: &SiteObservable, momentum: f64) -> Result<f64> {
    if !a.is_hermitian() {
        return Err(Error::InvalidParameter(
            "the structure factor takes Hermitian one-site observables".into(),
        ));
    }
    match state {
        QuantumState::Product { rho_site, .. } => {
            let mean = trace(&rho_site.dot(a.op())).re;
            let second = trace(&rho_site.dot(&a.op().dot(a.op()))).re;
            Ok(0.5 * (second - mean * mean))
        }
        _ => {
            let sites = state.sites();
            let center = (sites - 1) / 2;
            let embeds: Vec<Array2<C64>> = (0..sites)
                .map(|site| embed(a.op(), site, sites))
                .collect::<Result<_>>()?;
            let means: Vec<f64> = embeds
                .iter()
                .map(|op| state.expectation(op).map(|v| v.re))
                .collect::<Result<_>>()?;
            let mut value = 0.0;
            for site in 0..sites {
                let z = site as f64 - center as f64;
                let corr = state.expectation(&embeds[center].dot(&embeds[site]))?.re
                    - means[center] * means[site];
                value += 0.5 * corr * (momentum * z).cos();
            }
            Ok(value)
        }
    }
}

/// Project out the part of `op` commuting with the state's Hamiltonian:
/// matrix elements between (near-)degenerate energy levels are zeroed in
/// the eigenbasis.
///
/// The result samples no weight on the Liouvillian zero line, which is the
/// precondition for `beta * (F,F)~` to equal the total mass of the
/// susceptibility measure.
pub fn remove_invariant_part(state: &QuantumState, op: &Array2<C64>) -> Result<Array2<C64>> {
    let data = spectral_or_err(state, "a Gibbs or ground state")?;
    let dim = data.hamiltonian.dim();
    if op.dim() != (dim, dim) {
        return Err(Error::DimensionMismatch {
            left: op.nrows(),
            right: dim,
        });
    }
    let energies = &data.hamiltonian.eig().values;
    let mut op_eig = to_eigenbasis(data.hamiltonian, op);
    for a in 0..dim {
        for b in 0..dim {
            if (energies[a] - energies[b]).abs() <= DEGENERACY_TOLERANCE {
                op_eig[[a, b]] = C64::new(0.0, 0.0);
            }
        }
    }
    let v = &data.hamiltonian.eig().vectors;
    Ok(v.dot(&op_eig).dot(&adjoint(v)))
}
