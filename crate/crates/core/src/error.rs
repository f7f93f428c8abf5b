use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("non-finite edge weight on ({0}, {1})")]
    NonFiniteWeight(usize, usize),
    #[error("a time cycle needs at least 2 vertices, got {0}")]
    CycleTooShort(usize),
    #[error("kernel width must be positive, got {0}")]
    BadKernelWidth(f64),
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("points have inconsistent dimensions")]
    RaggedPoints,
    #[error("vertex {0} is isolated; normalized shifts are undefined")]
    IsolatedVertex(usize),
    #[error("negative weight on ({0}, {1}) not allowed for Laplacian shifts")]
    NegativeWeight(usize, usize),
    #[error("Laplacian shifts require an undirected graph with real weights")]
    LaplacianNeedsUndirectedReal,
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("matrix is not diagonalizable (residual {residual:e})")]
    NotDiagonalizable { residual: f64 },
    #[error("Hermite eigenvector residual {0:e} exceeds tolerance")]
    HermiteResidual(f64),
    #[error("transform size must be at least {needed}, got {found}")]
    SizeTooSmall { needed: usize, found: usize },
    #[error("zero eigenvalue with non-positive fractional order {0}")]
    ZeroEigenvalue(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("materializing {size}x{size} exceeds the budget of {budget}")]
    BudgetExceeded { size: usize, budget: usize },
    #[error("index {index} out of range [0, {bound})")]
    BandIndex { index: usize, bound: usize },
    #[error("index set must be strictly increasing")]
    UnsortedIndices,
    #[error("empty spectral band")]
    EmptyBand,
    #[error("sample count {m} out of range [1, {n}]")]
    SampleCount { m: usize, n: usize },
    #[error("empty sample set")]
    EmptySampleSet,
    #[error("every remaining candidate yields a singular criterion at step {step}")]
    AllCandidatesSingular { step: usize },
    #[error("{count} subsets exceed the brute-force budget of {budget}")]
    CombinatorialBudget { count: u128, budget: u128 },
    #[error("kernel entry {0} is negative or non-finite")]
    NegativeKernel(usize),
    #[error("kernel vanishes on the band (rho = 0) for a non-ideal kernel")]
    ZeroRho,
    #[error("random strategy has no greedy objective")]
    RandomHasNoObjective,
    #[error("reference signal is zero")]
    ZeroReference,
    #[error("noise standard deviation must be finite and nonnegative, got {0}")]
    BadSigma(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
