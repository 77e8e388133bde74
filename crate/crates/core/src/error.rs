use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter set or grid (hard precondition violations).
    #[error("configuration error: {0}")]
    Config(String),

    /// An eigenstate could not be assigned to a lattice site.
    #[error("basis construction failed: {source} (eigenvalue {eigenvalue})")]
    Localization { eigenvalue: f64, #[source] source: LocalizationFailure },

    /// The computed ladder violates the expected equal spacing.
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    /// Amplitude reached the edge of the truncated site window.
    #[error("site window overflow: edge amplitude {edge_amplitude:.3e} exceeds {edge_tol:.3e}")]
    WindowOverflow { edge_amplitude: f64, edge_tol: f64 },

    /// Integrator step size too large for the configured frequencies.
    #[error("step size {h} violates stability bound: h*max_frequency = {product:.3} > {bound}")]
    StabilityBound { h: f64, product: f64, bound: f64 },

    /// Wave-function amplitude leaked into the absorbing margin of the box.
    #[error("bounding-box margin contaminated at t = {time}: population {population:.3e}")]
    MarginContaminated { time: f64, population: f64 },

    /// Trajectories sampled on different time grids cannot be compared.
    #[error("time-grid mismatch: {0}")]
    TimeGridMismatch(String),

    /// Bessel sum cutoff below the convergence precondition.
    #[error("cutoff {cutoff} below required {required} for arguments of this size")]
    CutoffTooSmall { cutoff: i64, required: i64 },

    #[error("basis cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reasons a localized lowest-band state could not be extracted.
#[derive(Debug, Error)]
pub enum LocalizationFailure {
    #[error("no candidate state found for site {site}")]
    MissingSite { site: i64 },
    #[error("centroid {centroid} is ambiguous between sites")]
    AmbiguousCentroid { centroid: f64 },
    #[error("state spreads over {wells:.1} wells (limit {limit:.1})")]
    TooDelocalized { wells: f64, limit: f64 },
}
