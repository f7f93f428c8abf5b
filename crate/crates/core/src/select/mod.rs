//! Greedy sampling-set selection under the five spectral objectives, in direct
//! and localized-operator form, with a random baseline and an exhaustive
//! oracle.
//!
//! Every objective is a function of the Gram spectrum of the selected
//! feature vectors. Direct form takes the features from rows of
//! `J^{-α,-β}[:, F]` (or columns of `J[F, :]`); localized form takes them
//! implicitly from the kernel matrix `T` (or `TᴴT`). With unitary `J` and the
//! ideal kernel both kernels equal the bandlimiting projector, so the two
//! forms select the same indices.

mod engine;
mod literal;

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::bandlimit::{band_factors, SpectralSupports};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::localized::{ideal_localized_operator, LocalizedOperator};
use crate::spectral::{JointTransform, MATERIALIZE_BUDGET};

pub use literal::objective_value;

/// Relative tolerance under which two objective values are tied.
pub const TIE_TOL: f64 = 1e-9;
/// Relative energy below which a candidate adds no new direction.
pub const RANK_TOL: f64 = 1e-10;
/// Largest number of subsets the oracle will scan.
pub const BRUTE_FORCE_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    MaxSigMin,
    MinTrac,
    MinPinv,
    MaxSig,
    MaxVol,
    Random,
}

impl Strategy {
    pub const GREEDY: [Strategy; 5] = [Strategy::MaxSigMin, Strategy::MinTrac, Strategy::MinPinv, Strategy::MaxSig, Strategy::MaxVol];

    /// Whether the reported objective value is maximized in `form`. The
    /// localized smallest-singular-value rule reports `1/σ_min`, a minimizer.
    pub fn maximizes(self, form: ObjectiveForm) -> bool {
        match self {
            Strategy::MaxSigMin => form == ObjectiveForm::Direct,
            Strategy::MaxSig | Strategy::MaxVol => true,
            _ => false,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::MaxSigMin => "maxsigmin",
            Strategy::MinTrac => "mintrac",
            Strategy::MinPinv => "minpinv",
            Strategy::MaxSig => "maxsig",
            Strategy::MaxVol => "maxvol",
            Strategy::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Strategy> {
        [Strategy::MaxSigMin, Strategy::MinTrac, Strategy::MinPinv, Strategy::MaxSig, Strategy::MaxVol, Strategy::Random]
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
    }

    /// Value returned for a set whose criterion is singular.
    pub fn singular_value(self, form: ObjectiveForm) -> f64 {
        if self.maximizes(form) {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum ObjectiveForm {
    #[default]
    Direct,
    Localized,
}

impl ObjectiveForm {
    pub fn name(self) -> &'static str {
        match self {
            ObjectiveForm::Direct => "direct",
            ObjectiveForm::Localized => "localized",
        }
    }

    pub fn parse(s: &str) -> Option<ObjectiveForm> {
        [ObjectiveForm::Direct, ObjectiveForm::Localized].into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }
}

/// An ordered sampling set with its per-step objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub indices: Vec<usize>,
    pub objective_trace: Vec<f64>,
    pub strategy: Strategy,
    pub form: ObjectiveForm,
    pub seed: Option<u64>,
    pub alpha: f64,
    pub beta: f64,
    pub band: Vec<usize>,
    /// How each greedy step was evaluated, recorded for reproducibility.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SelectOptions {
    /// Re-evaluate every candidate from the literal matrices instead of the
    /// incremental Gram updates.
    pub recompute: bool,
}

/// Everything a selection needs: the transform, the band, its synthesis and
/// analysis factors and, for localized form, the filtering operator.
#[derive(Debug, Clone)]
pub struct SamplingProblem {
    pub joint: JointTransform,
    pub band: SpectralSupports,
    /// `J^{-α,-β}[:, F]`, `NT × K`.
    pub synthesis: CMat,
    /// `J[F, :]`, `K × NT`.
    pub analysis: CMat,
    pub localized: Option<LocalizedOperator>,
    pub budget: usize,
}

impl SamplingProblem {
    pub fn new(joint: &JointTransform, band: &SpectralSupports) -> Result<Self> {
        if band.k_j == 0 {
            return Err(Error::EmptyBand);
        }
        let (synthesis, analysis) = band_factors(joint, band)?;
        Ok(SamplingProblem { joint: joint.clone(), band: band.clone(), synthesis, analysis, localized: None, budget: MATERIALIZE_BUDGET })
    }

    pub fn with_localized(mut self, op: LocalizedOperator) -> Self {
        self.localized = Some(op);
        self
    }

    pub fn size(&self) -> usize {
        self.joint.size()
    }

    /// The configured localized operator, or the ideal one.
    pub fn localized_operator(&self) -> Result<Cow<'_, LocalizedOperator>> {
        match &self.localized {
            Some(op) => Ok(Cow::Borrowed(op)),
            None => Ok(Cow::Owned(ideal_localized_operator(&self.joint, &self.band, self.budget)?)),
        }
    }

    /// Whether the incremental engine applies: it needs Hermitian kernels,
    /// which holds for unitary `J`.
    pub fn hermitian_kernels(&self) -> bool {
        self.joint.unitary
    }
}

fn plan(problem: &SamplingProblem, strategy: Strategy, form: ObjectiveForm, indices: Vec<usize>, trace: Vec<f64>, seed: Option<u64>, notes: Vec<String>) -> SamplingPlan {
    SamplingPlan {
        indices,
        objective_trace: trace,
        strategy,
        form,
        seed,
        alpha: problem.joint.alpha,
        beta: problem.joint.beta,
        band: problem.band.joint_band.clone(),
        notes,
    }
}

/// Greedy selection of `m` indices.
///
/// While fewer than rank-many indices are selected, a candidate that does not
/// enlarge the span of the selection makes the criterion singular and is
/// skipped. Ties within [`TIE_TOL`] go to the lowest flat index.
pub fn greedy_select(strategy: Strategy, form: ObjectiveForm, problem: &SamplingProblem, m: usize, opts: &SelectOptions) -> Result<SamplingPlan> {
    if strategy == Strategy::Random {
        return Err(Error::RandomHasNoObjective);
    }
    let nt = problem.size();
    if m == 0 || m > nt {
        return Err(Error::SampleCount { m, n: nt });
    }
    let mut notes = Vec::new();
    let (indices, trace) = if opts.recompute || !problem.hermitian_kernels() {
        notes.push(String::from("evaluation: full recompute"));
        if !problem.hermitian_kernels() {
            notes.push(String::from("non-unitary transform: outside the proved equivalence regime"));
        }
        literal::greedy(strategy, form, problem, m)?
    } else {
        notes.push(String::from("evaluation: incremental"));
        engine::greedy(strategy, form, problem, m)?
    };
    if strategy == Strategy::MaxSigMin {
        notes.push(String::from("sigma_min over min(|S|, K) singular values"));
    }
    Ok(plan(problem, strategy, form, indices, trace, None, notes))
}

/// Uniform random selection without replacement.
pub fn random_select(nt: usize, m: usize, seed: u64) -> Result<Vec<usize>> {
    if m > nt {
        return Err(Error::SampleCount { m, n: nt });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, nt, m).into_vec())
}

/// Random baseline as a plan with a zero objective trace.
pub fn random_plan(problem: &SamplingProblem, m: usize, seed: u64) -> Result<SamplingPlan> {
    let indices = random_select(problem.size(), m, seed)?;
    let trace = alloc::vec![0.0; m];
    Ok(plan(problem, Strategy::Random, ObjectiveForm::Direct, indices, trace, Some(seed), Vec::new()))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Exhaustive search over all `m`-subsets, lexicographically first optimum.
pub fn brute_force_select(strategy: Strategy, form: ObjectiveForm, problem: &SamplingProblem, m: usize) -> Result<(Vec<usize>, f64)> {
    if strategy == Strategy::Random {
        return Err(Error::RandomHasNoObjective);
    }
    let nt = problem.size();
    if m == 0 || m > nt {
        return Err(Error::SampleCount { m, n: nt });
    }
    let count = binomial(nt, m);
    if count > BRUTE_FORCE_BUDGET {
        return Err(Error::CombinatorialBudget { count, budget: BRUTE_FORCE_BUDGET });
    }
    let ctx = literal::Context::new(strategy, form, problem)?;
    let mut set: Vec<usize> = (0..m).collect();
    let mut best: Option<(Vec<usize>, f64, f64)> = None;
    loop {
        let value = ctx.value(&set);
        let score = score_of(strategy, form, value);
        let better = match &best {
            None => true,
            Some((_, _, s)) => beats(score, *s),
        };
        if better {
            best = Some((set.clone(), value, score));
        }
        // next combination in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                let (s, v, _) = best.expect("at least one subset");
                return Ok((s, v));
            }
            i -= 1;
            if set[i] < nt - m + i {
                set[i] += 1;
                for k in (i + 1)..m {
                    set[k] = set[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Score to maximize: the value for maximizers, its negation for minimizers,
/// and the logarithm of volumes so large and small determinants compare well.
pub(crate) fn score_of(strategy: Strategy, form: ObjectiveForm, value: f64) -> f64 {
    match strategy {
        Strategy::MaxVol => {
            if value > 0.0 {
                num_traits::Float::ln(value)
            } else {
                f64::NEG_INFINITY
            }
        }
        s if s.maximizes(form) => value,
        _ => -value,
    }
}

/// `a` is strictly better than `b` beyond the tie tolerance.
pub(crate) fn beats(a: f64, b: f64) -> bool {
    if b == f64::NEG_INFINITY {
        return a > b;
    }
    a > b + TIE_TOL * num_traits::Float::abs(b)
}

/// Pick the lowest index whose score is within the tie tolerance of the best.
pub(crate) fn pick(scores: &[(usize, f64)]) -> Option<usize> {
    let best = scores.iter().map(|&(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return None;
    }
    let floor = best - TIE_TOL * num_traits::Float::abs(best);
    scores.iter().filter(|&&(_, s)| s >= floor).map(|&(i, _)| i).min()
}
