use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown letter '{letter}' in the image of '{source_letter}'")]
    UnknownLetter { letter: char, source_letter: char },
    #[error("letter '{0}' has an empty image")]
    EmptyImage(char),
    #[error("letter '{0}' is declared more than once")]
    DuplicateLetter(char),
    #[error("alphabet of size {0} is outside the supported range 1..=8")]
    AlphabetSize(usize),
    #[error("image of '{letter}' has {len} letters, above the cap of 64")]
    ImageTooLong { letter: char, len: usize },
    #[error("output would exceed the cap of {cap} letters")]
    LengthCap { cap: usize },
    #[error("no stabilization after {0} iterations")]
    IterationCap(usize),
    #[error("substitution is not primitive")]
    NotPrimitive,
    #[error("interval refinement cap reached while deciding a sign")]
    RefinementCap,
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{op}: {source}")]
    Context {
        op: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub fn context(self, op: &'static str) -> Self {
        Error::Context { op, source: Box::new(self) }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) trait ResultExt<T> {
    fn op(self, op: &'static str) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn op(self, op: &'static str) -> Result<T> {
        self.map_err(|e| e.context(op))
    }
}
