use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid torus geometry: {0}")]
    InvalidSpec(&'static str),
    #[error("fields live on different torus specifications")]
    SpecMismatch,
    #[error("oversample factor must be at least 1, got {0}")]
    InvalidOversample(usize),
    #[error("inverse transform left an imaginary residue of {ratio:e} (relative); input is not Hermitian")]
    ImaginaryResidue { ratio: f64 },
    #[error("nonpositive mass {0}")]
    NonPositiveMass(f64),
    #[error("gain quadrature too coarse for N = {n}: need radial >= {min_radial} and sphere degree >= {min_degree}, got {radial} and {degree}")]
    QuadratureTooCoarse {
        n: usize,
        radial: usize,
        degree: usize,
        min_radial: usize,
        min_degree: usize,
    },
    #[error("non-finite value produced by the time step")]
    NonFinite,
    #[error("time step must be positive, got {0}")]
    InvalidTimeStep(f64),
}
