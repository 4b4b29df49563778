//! Command failures mapped onto process exit codes:
//! 2 usage, 3 data validation, 4 numeric failure, 1 i/o or other.

use std::fmt;

use dipole_julia::csvio::CsvError;
use dipole_julia::ingest::IngestError;
use dipole_julia::limit::LimitError;
use dipole_julia::metric::MetricError;
use dipole_julia::render::RenderError;
use dipole_julia::rmap::MapError;

#[derive(Debug)]
pub enum Failure {
    Io(String),
    Usage(String),
    Data(String),
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Data(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Data(m) => write!(f, "invalid data: {m}"),
            Failure::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        match e {
            MapError::NoValidRadius => Failure::Numeric(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(io) => Failure::Io(io.to_string()),
            IngestError::BadPitch(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<LimitError> for Failure {
    fn from(e: LimitError) -> Self {
        match e {
            LimitError::TooFewCircleSamples(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Map(m) => m.into(),
            RenderError::Io(io) => Failure::Io(io.to_string()),
            RenderError::DegenerateGrid | RenderError::NoConvergence { .. } => {
                Failure::Numeric(e.to_string())
            }
            RenderError::FixedPointSeed | RenderError::BadRequest(_) => {
                Failure::Usage(e.to_string())
            }
            RenderError::InvalidPolynomial(_) => Failure::Data(e.to_string()),
        }
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<CsvError> for Failure {
    fn from(e: CsvError) -> Self {
        match e {
            CsvError::Io(io) => Failure::Io(io.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Data(e.to_string())
    }
}
