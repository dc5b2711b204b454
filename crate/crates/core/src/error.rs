use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BanditError {
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("arm {arm} out of range for {num_arms} arms")]
    ArmOutOfRange { arm: usize, num_arms: usize },
    #[error("expected {expected} means, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("means are not unimodal on the graph; violating arms (1-based): {0:?}")]
    NotUnimodal(Vec<usize>),
    #[error("observed arm {observed} but arm {selected} was selected")]
    UnexpectedArm { observed: usize, selected: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, BanditError>;

impl From<std::io::Error> for BanditError {
    fn from(err: std::io::Error) -> Self {
        BanditError::Io(err.to_string())
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(BanditError::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}
