use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. The variant name doubles as the
/// diagnostic tag printed by the command line tool.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{axiom} fails at ({}, {}, {})", witness[0], witness[1], witness[2])]
    AxiomViolation {
        axiom: &'static str,
        witness: [usize; 3],
    },
    #[error("{0}")]
    SizeLimit(String),
    #[error("{0}")]
    GroupMismatch(String),
    #[error("map is not a homomorphism: image({a}*{b}) != image({a})*image({b})")]
    NotHomomorphism { a: usize, b: usize },
    #[error("no unramified Frobenius: {q} is not coprime to {p}")]
    Ramified { p: u64, q: u64 },
    #[error("{0}")]
    LevelOrder(String),
    #[error("bond {bond} is not surjective")]
    BondNotSurjective { bond: usize },
    #[error("components disagree under the bond into level {0}")]
    IncoherentAtLevel(usize),
    #[error("object belongs to a different tower")]
    TowerMismatch,
    #[error("code leaves the partition tree at bit index {index}")]
    InvalidCode { index: usize },
    #[error("lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("group is not abelian")]
    NotAbelian,
    #[error("{0}")]
    KindMismatch(String),
    #[error("{0}")]
    NotSymmetric(String),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::AxiomViolation { .. } => "AxiomViolation",
            Error::SizeLimit(_) => "SizeLimit",
            Error::GroupMismatch(_) => "GroupMismatch",
            Error::NotHomomorphism { .. } => "NotHomomorphism",
            Error::Ramified { .. } => "Ramified",
            Error::LevelOrder(_) => "LevelOrder",
            Error::BondNotSurjective { .. } => "BondNotSurjective",
            Error::IncoherentAtLevel(_) => "IncoherentAtLevel",
            Error::TowerMismatch => "TowerMismatch",
            Error::InvalidCode { .. } => "InvalidCode",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::EmptyInput => "EmptyInput",
            Error::NotAbelian => "NotAbelian",
            Error::KindMismatch(_) => "KindMismatch",
            Error::NotSymmetric(_) => "NotSymmetric",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Parse(_) => "Parse",
            Error::Usage(_) => "Usage",
            Error::Io(_) => "Io",
        }
    }

    /// Process exit status: 2 usage, 3 domain error, 4 size limit.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parse(_) => 2,
            Error::SizeLimit(_) => 4,
            _ => 3,
        }
    }

    /// `Name: message` on a single line.
    pub fn diagnostic(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("{}: {}", self.name(), msg)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
