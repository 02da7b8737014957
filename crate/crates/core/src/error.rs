use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quasi-static pole: (eps+2)(mu+2) - kappa^2 vanishes at omega = {omega:e} rad/s")]
    QuasiStaticPole { omega: f64 },

    #[error("photon number diverges at omega = 0 for T = {temperature} K")]
    PhotonPole { temperature: f64 },

    #[error("singular radiative-correction matrix at omega = {omega:e} rad/s")]
    SingularMatrix { omega: f64 },

    #[error("numeric failure evaluating {what} at z = {re:e}{im:+e}i")]
    NumericFailure { what: &'static str, re: f64, im: f64 },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: worst panel [{a:e}, {b:e}] has error {error:e}"
    )]
    Convergence {
        subdivisions: usize,
        a: f64,
        b: f64,
        error: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("output error: {0}")]
    Output(String),
}

impl Error {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Output(_) => 4,
            Error::QuasiStaticPole { .. }
            | Error::PhotonPole { .. }
            | Error::SingularMatrix { .. }
            | Error::NumericFailure { .. }
            | Error::Convergence { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
