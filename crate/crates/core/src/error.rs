use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    BadAlphabet(String),
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
    #[error("empty word has no factorization")]
    EmptyWord,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("vectors disagree in dimension or modulus")]
    VectorMismatch,
    #[error("degree-{degree} component expected, found word of length {found}")]
    NotHomogeneous { degree: usize, found: usize },
    #[error("enumeration cap exceeded: {size} > {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("matrix state space too wide to pack into 128 bits")]
    EncodingTooWide,
    #[error("generators disagree in size or modulus")]
    GroupContextMismatch,
    #[error("subset is not a subgroup")]
    NotSubgroup,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("constant term {0} is not a unit mod {1}")]
    NotUnit(u64, u64),
    #[error("need s < p for the Lyndon basis check, got s={s}, p={p}")]
    DegreeNotBelowP { s: usize, p: u64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}
