use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cell {cell}, realization {realization}: {source}")]
    Cell {
        cell: usize,
        realization: usize,
        #[source]
        source: circuitlab_core::Error,
    },
    #[error(transparent)]
    Engine(#[from] circuitlab_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn engine(&self) -> Option<&circuitlab_core::Error> {
        match self {
            CliError::Cell { source, .. } | CliError::Engine(source) => Some(source),
            _ => None,
        }
    }

    /// 2 for configuration errors, 3 for numerical degeneracy, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use circuitlab_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            _ => match self.engine() {
                Some(E::InvalidParameter(_) | E::InvalidGeometry(_) | E::InvalidRegion(_) | E::CapExceeded { .. }) => 2,
                Some(E::NumericalDegeneracy(_) | E::NoCrossing | E::Fit(_) | E::NonConvexTension { .. }) => 3,
                _ => 1,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use circuitlab_core::Error as E;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Engine(E::InvalidParameter("p".into())).exit_code(), 2);
        let cell = |source| CliError::Cell { cell: 1, realization: 2, source };
        assert_eq!(cell(E::NumericalDegeneracy("tiny".into())).exit_code(), 3);
        assert_eq!(cell(E::NonUnitary { deviation: 1.0 }).exit_code(), 1);
        assert!(cell(E::NoCrossing).to_string().starts_with("cell 1, realization 2"));
    }
}
