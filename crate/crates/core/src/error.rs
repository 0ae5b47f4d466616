use thiserror::Error;

use crate::rational::{show, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("unnormalizable: {0}")]
    Unnormalizable(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid cut {}: it lies in the closure of the set", show(.0))]
    InvalidCut(Rational),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("the set is not GCC")]
    NotGcc,
    #[error("the set is not compact")]
    NotCompact,
    #[error("{} is not a member of the set", show(.0))]
    NotMember(Rational),
    #[error("unsupported fixture configuration: {} height collisions", .0.len())]
    UnsupportedConfig(Vec<(u64, u64, u64)>),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid clopen chain: {0}")]
    InvalidChain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
