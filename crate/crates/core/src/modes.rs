//! Harmonic normal modes built from spectral atoms.
//!
//! A positive atom `(eps, c)` of a susceptibility measure defines one
//! quantum harmonic mode: a canonical pair `(Q, P)` with
//!
//! ```text
//! [Q, P] = i c        var Q = (c eps / 2) coth(beta eps / 2)
//! var P  = var Q / eps^2
//! ```
//!
//! so `c` acts as the quantization parameter and the virial identity
//! `var Q = eps^2 var P` holds by construction. Occupation follows a
//! Bose–Einstein profile `c / (exp(beta eps) - 1)`, and time evolution is
//! the symplectic rotation of a free oscillator at frequency `eps`.
//!
//! Measures with many atoms aggregate into a [`ModeFamily`] (one mode per
//! atom; the virial holds per atom, not in aggregate). Sequences of
//! measures whose support collapses toward zero frequency model a gapless
//! branch: [`delta_limit_check`] verifies the collapse against delta-peak
//! test integrals, and [`limit_system`] takes the limit itself — a
//! squeezed-but-canonical ground pair at zero temperature
//! ([`NormalMode::renormalize_zero_temperature`]), a classical mode with
//! equipartition variance `c0 / beta` and vanishing commutator at finite
//! temperature. [`scaling_exponents`] gives the window exponents that
//! keep power-law-dispersed fluctuations finite.

use crate::fluctuations::SpectralMeasure;
use crate::{Beta, Error, Result, C64};

/// One harmonic mode: frequency `epsilon`, quantization parameter `c`, and
/// the inverse temperature its statistics are taken at.
#[derive(Debug, Clone, Copy)]
pub struct NormalMode {
    epsilon: f64,
    c: f64,
    beta: Beta,
}

/// Second moments and gauge data of a mode: `commutator` is the real
/// coefficient in `[Q, P] = i * commutator`, and the vanishing
/// `a_plus_a_plus`/`mean_a` record gauge invariance of the mode state.
#[derive(Debug, Clone, Copy)]
pub struct ModeStatistics {
    pub var_q: f64,
    pub var_p: f64,
    pub commutator: f64,
    pub occupancy: f64,
    pub a_plus_a_plus: f64,
    pub mean_a: f64,
}

/// Build the harmonic mode of a single spectral atom.
pub fn mode_from_atom(epsilon: f64, c: f64, beta: Beta) -> Result<NormalMode> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mode frequency {epsilon} must be positive and finite"
        )));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quantization parameter {c} must be positive and finite"
        )));
    }
    if let Beta::Finite(b) = beta {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::BetaOutOfRange(b));
        }
    }
    Ok(NormalMode { epsilon, c, beta })
}

impl NormalMode {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    /// Second moments of the canonical pair.
    ///
    /// The occupancy and the variances share one `exp_m1` evaluation, so
    /// the identity `(var_q + eps^2 var_p) / (2 eps) - c/2 = occupancy`
    /// holds to rounding at every parameter value, including `beta = inf`
    /// (occupancy `0`) and `beta eps` near zero (equipartition
    /// `var_q -> c / beta`).
    pub fn statistics(&self) -> ModeStatistics {
        let occupancy = match self.beta {
            Beta::Finite(b) => self.c / (b * self.epsilon).exp_m1(),
            Beta::Infinite => 0.0,
        };
        let var_q = self.epsilon * (0.5 * self.c + occupancy);
        ModeStatistics {
            var_q,
            var_p: var_q / (self.epsilon * self.epsilon),
            commutator: self.c,
            occupancy,
            a_plus_a_plus: 0.0,
            mean_a: 0.0,
        }
    }

    /// Symplectic time-`t` map on `(Q, P)`:
    /// `[[cos(eps t), eps sin(eps t)], [-sin(eps t)/eps, cos(eps t)]]`,
    /// determinant one, period `2 pi / eps`.
    pub fn evolve(&self, t: f64) -> [[f64; 2]; 2] {
        let phase = self.epsilon * t;
        [
            [phase.cos(), self.epsilon * phase.sin()],
            [-phase.sin() / self.epsilon, phase.cos()],
        ]
    }

    /// The squeezing-compensated ground pair `Q' = Q / sqrt(eps)`,
    /// `P' = P * sqrt(eps)`: at zero temperature both variances equal
    /// `c / 2` independent of the (vanishing) frequency, the commutator
    /// is unchanged, and the creation/annihilation content — hence the
    /// occupancy — is untouched.
    ///
    /// Finite-temperature modes have no such compensation (their limit is
    /// classical); they are rejected here and handled by [`limit_system`].
    pub fn renormalize_zero_temperature(&self) -> Result<ModeStatistics> {
        if self.beta != Beta::Infinite {
            return Err(Error::UnsupportedState {
                required: "a zero-temperature mode (beta = inf)",
                got: "a finite-temperature mode",
            });
        }
        Ok(ModeStatistics {
            var_q: 0.5 * self.c,
            var_p: 0.5 * self.c,
            commutator: self.c,
            occupancy: 0.0,
            a_plus_a_plus: 0.0,
            mean_a: 0.0,
        })
    }
}

/// One harmonic mode per atom of a gapped susceptibility measure.
///
/// Aggregate second moments are atom sums; the virial identity holds for
/// every atom separately but not for the aggregates, which is why both
/// views are exposed.
#[derive(Debug, Clone)]
pub struct ModeFamily {
    atoms: Vec<(f64, f64)>,
    beta: Beta,
}

/// Aggregate second moments of a mode family.
#[derive(Debug, Clone, Copy)]
pub struct FamilyStatistics {
    pub var_q: f64,
    pub var_p: f64,
    pub commutator: f64,
}

/// Interpret each `(frequency, weight)` atom of a measure as one harmonic
/// mode. Every atom must sit at strictly positive frequency.
pub fn mode_family_from_measure(dc: &SpectralMeasure, beta: Beta) -> Result<ModeFamily> {
    if dc.atoms().is_empty() {
        return Err(Error::InvalidParameter(
            "a mode family needs at least one spectral atom".into(),
        ));
    }
    for &(lambda, _) in dc.atoms() {
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mode families need a spectral gap; found an atom at {lambda}"
            )));
        }
    }
    if let Beta::Finite(b) = beta {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::BetaOutOfRange(b));
        }
    }
    Ok(ModeFamily {
        atoms: dc.atoms().to_vec(),
        beta,
    })
}

impl ModeFamily {
    /// Smallest mode frequency (the spectral gap).
    pub fn gap(&self) -> f64 {
        self.atoms
            .iter()
            .map(|&(lambda, _)| lambda)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    /// The constituent modes, one per atom.
    pub fn modes(&self) -> Vec<NormalMode> {
        self.atoms
            .iter()
            .map(|&(lambda, c)| NormalMode {
                epsilon: lambda,
                c,
                beta: self.beta,
            })
            .collect()
    }

    /// Atom-summed second moments.
    pub fn aggregate(&self) -> FamilyStatistics {
        let mut stats = FamilyStatistics {
            var_q: 0.0,
            var_p: 0.0,
            commutator: 0.0,
        };
        for mode in self.modes() {
            let s = mode.statistics();
            stats.var_q += s.var_q;
            stats.var_p += s.var_p;
            stats.commutator += s.commutator;
        }
        stats
    }
}

/// A Gaussian test function `exp(-((x - center) / width)^2)`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianBump {
    pub center: f64,
    pub width: f64,
}

impl GaussianBump {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bump width {width} must be positive and finite"
            )));
        }
        Ok(Self { center, width })
    }

    pub fn eval(&self, x: f64) -> f64 {
        (-((x - self.center) / self.width).powi(2)).exp()
    }
}

/// Convergence record of one test function across a measure sequence.
#[derive(Debug, Clone)]
pub struct DeltaLimitRow {
    pub bump: GaussianBump,
    /// `int f d(mu_k)` per measure, in sequence order.
    pub integrals: Vec<f64>,
    /// `|integral - c0 * f(0)|` per measure.
    pub deviations: Vec<f64>,
    /// Whether the deviations strictly decrease along the sequence.
    pub converged: bool,
}

/// Convergence report of [`delta_limit_check`].
#[derive(Debug, Clone)]
pub struct DeltaLimitReport {
    pub rows: Vec<DeltaLimitRow>,
}

impl DeltaLimitReport {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|row| row.converged)
    }
}

/// Test whether a sequence of measures collapses onto a delta peak of mass
/// `c0` at zero: for each bump `f`, the integrals `int f d(mu_k)` must
/// approach `c0 * f(0)` with strictly decreasing deviations. A sequence
/// whose support does not shrink is reported as non-convergent, not as an
/// error.
pub fn delta_limit_check(
    measures: &[SpectralMeasure],
    c0: f64,
    bumps: &[GaussianBump],
) -> Result<DeltaLimitReport> {
    if measures.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "a delta-limit check needs at least 3 measures, got {}",
            measures.len()
        )));
    }
    let rows = bumps
        .iter()
        .map(|&bump| {
            let target = c0 * bump.eval(0.0);
            let integrals: Vec<f64> = measures
                .iter()
                .map(|mu| mu.integrate(|x| bump.eval(x)))
                .collect();
            let deviations: Vec<f64> =
                integrals.iter().map(|&v| (v - target).abs()).collect();
            let converged = deviations.windows(2).all(|pair| pair[1] < pair[0]);
            DeltaLimitRow {
                bump,
                integrals,
                deviations,
                converged,
            }
        })
        .collect();
    Ok(DeltaLimitReport { rows })
}

/// The zero-frequency limit of a gapless mode branch.
#[derive(Debug, Clone)]
pub enum LimitSystem {
    /// Zero temperature: the squeezing-compensated pair survives as a
    /// minimum-uncertainty canonical pair, a ground state in rescaled
    /// time.
    QuantumGround {
        c0: f64,
        /// Renormalized variances, both `c0 / 2`.
        var_q: f64,
        var_p: f64,
        /// `[Q, P] = i * commutator`, equal to `c0`.
        commutator: f64,
        /// Always `0`: the limit is a ground state.
        occupancy: f64,
        /// Rescaled-time autocorrelation samples
        /// `(tau, (c0/2)(cos tau + i sin tau))`.
        correlator: Vec<(f64, C64)>,
    },
    /// Finite temperature: the commutators `c_k eps_k` die with the gap
    /// and only a classical mode with equipartition variance remains.
    ClassicalThermal {
        c0: f64,
        beta: f64,
        /// Limiting position variance `c0 / beta`.
        var_q: f64,
        /// The vanishing commutator scale `c_k eps_k` per sequence point.
        commutator_products: Vec<f64>,
    },
}

impl LimitSystem {
    pub fn c0(&self) -> f64 {
        match self {
            LimitSystem::QuantumGround { c0, .. } | LimitSystem::ClassicalThermal { c0, .. } => {
                *c0
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LimitSystem::QuantumGround { .. } => "quantum ground",
            LimitSystem::ClassicalThermal { .. } => "classical thermal",
        }
    }
}

/// Rescaled-time sample points for the ground-pair autocorrelation.
const CORRELATOR_TAUS: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_2,
    std::f64::consts::PI,
];

/// Take the zero-frequency limit of a `(eps_k, c_k)` mode sequence.
///
/// The frequencies must be strictly decreasing (the branch is gapless);
/// the quantization parameters must converge — their last value stands in
/// for `c0`. At `beta = inf` the limit is a quantum ground pair in
/// rescaled time `tau = eps_k t`; at finite `beta` the commutator scale
/// `c_k eps_k` must decrease strictly to zero and the limit is classical.
pub fn limit_system(sequence: &[(f64, f64)], beta: Beta) -> Result<LimitSystem> {
    if sequence.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "a limit system needs at least 3 sequence points, got {}",
            sequence.len()
        )));
    }
    for &(epsilon, c) in sequence {
        if !(epsilon.is_finite() && epsilon > 0.0 && c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sequence point ({epsilon}, {c}) is not a valid mode atom"
            )));
        }
    }
    if sequence
        .windows(2)
        .any(|pair| pair[1].0 >= pair[0].0)
    {
        return Err(Error::InvalidParameter(
            "mode frequencies must decrease strictly toward zero".into(),
        ));
    }
    let c0 = sequence.last().expect("nonempty").1;
    match beta {
        Beta::Infinite => {
            let correlator = CORRELATOR_TAUS
                .iter()
                .map(|&tau| (tau, C64::from_polar(0.5 * c0, tau)))
                .collect();
            Ok(LimitSystem::QuantumGround {
                c0,
                var_q: 0.5 * c0,
                var_p: 0.5 * c0,
                commutator: c0,
                occupancy: 0.0,
                correlator,
            })
        }
        Beta::Finite(b) => {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::BetaOutOfRange(b));
            }
            let products: Vec<f64> = sequence.iter().map(|&(eps, c)| c * eps).collect();
            if products.windows(2).any(|pair| pair[1] >= pair[0]) {
                return Err(Error::InvalidParameter(
                    "the commutator scale c_k * eps_k must decrease strictly".into(),
                ));
            }
            Ok(LimitSystem::ClassicalThermal {
                c0,
                beta: b,
                var_q: c0 / b,
                commutator_products: products,
            })
        }
    }
}

/// Window exponents for a fluctuation of a power-law-dispersed mode
/// (`eps_k ~ |k|^delta` in `nu` dimensions): the generator scales with
/// exponent `1/2 - delta/(2 nu)` and its conjugate with
/// `1/2 + delta/(2 nu)`. Finiteness requires `delta <= nu`.
pub fn scaling_exponents(delta: f64, nu: u32) -> Result<(f64, f64)> {
    if nu == 0 {
        return Err(Error::InvalidParameter(
            "the dimension must be a positive integer".into(),
        ));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dispersion exponent {delta} must be positive and finite"
        )));
    }
    if delta > nu as f64 {
        return Err(Error::InvalidRegime { delta, nu });
    }
    let shift = delta / (2.0 * nu as f64);
    Ok((0.5 - shift, 0.5 + shift))
}
