use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    SyntaxError {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("line {line}: unknown role `{role}`")]
    UnknownRole { line: usize, role: String },
    #[error("line {line}: unknown effect `{effect}`")]
    UnknownEffect { line: usize, effect: String },
    #[error("sprite `{class}` ({role}) is missing parameter `{key}`")]
    MissingParam {
        class: String,
        role: String,
        key: String,
    },
    #[error("sprite `{class}` ({role}) does not take parameter `{key}`")]
    UnexpectedParam {
        class: String,
        role: String,
        key: String,
    },
    #[error("sprite `{class}`: parameter `{key}` = {value} must be positive")]
    InvalidParam {
        class: String,
        key: String,
        value: i64,
    },
    #[error("sprite `{0}` declared more than once")]
    DuplicateSprite(String),
    #[error("no sprite class has role Avatar")]
    NoAvatar,
    #[error("{0} sprite classes have role Avatar, expected exactly one")]
    MultipleAvatars(usize),
    #[error("{count} sprite classes declared, at most {max} supported")]
    TooManyClasses { count: usize, max: usize },
    #[error("undeclared sprite `{name}` referenced at {site}")]
    UnboundName { name: String, site: String },
    #[error("invalid rule at {site}: {reason}")]
    InvalidRule { site: String, reason: String },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("level has no rows")]
    EmptyLevel,
    #[error("level row {row} has width {found}, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("unmapped character {ch:?} at row {row}, column {col}")]
    UnmappedChar { ch: char, row: usize, col: usize },
    #[error("level places {0} avatars, expected exactly one")]
    AvatarCountNotOne(usize),
}
