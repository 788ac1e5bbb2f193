use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("0/0 is not a fraction")]
    ZeroOverZero,

    #[error("{0} has no continued fraction")]
    NoContinuedFraction(String),

    #[error("invalid continued fraction: {0}")]
    InvalidContinuedFraction(String),

    #[error("{value} is outside the domain of {what}")]
    Domain { what: &'static str, value: String },

    #[error("{0} is an ancestor and has no tree level")]
    Ancestor(String),

    #[error("{value} is not a vertex of the {tree} tree")]
    NotAVertex { tree: &'static str, value: String },

    #[error("matrix {0} is not unimodular")]
    NotUnimodular(String),

    #[error("{what} = {requested} exceeds the cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("function is singular at {0}")]
    Singular(String),

    #[error("empty interval ({0}, {1})")]
    EmptyInterval(String, String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: impl ToString) -> Error {
    Error::Domain {
        what,
        value: value.to_string(),
    }
}

pub(crate) fn check_cap(what: &'static str, requested: u64, cap: u64) -> Result<()> {
    if requested > cap {
        Err(Error::CapExceeded {
            what,
            requested,
            cap,
        })
    } else {
        Ok(())
    }
}
