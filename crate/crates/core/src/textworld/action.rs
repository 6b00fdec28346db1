use std::fmt;

use thiserror::Error;

use super::ids::{IdError, ObjectId, ReceptacleId};

/// One of the nine text commands the environment understands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    GoTo(ReceptacleId),
    Open(ReceptacleId),
    Close(ReceptacleId),
    Take { object: ObjectId, from: ReceptacleId },
    Put { object: ObjectId, into: ReceptacleId },
    Clean { object: ObjectId, with: ReceptacleId },
    Heat { object: ObjectId, with: ReceptacleId },
    Cool { object: ObjectId, with: ReceptacleId },
    Use(ReceptacleId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("no command matches `{0}`")]
    NoMatch(String),
    #[error("malformed identifier in `{line}`: {source}")]
    MalformedId {
        line: String,
        #[source]
        source: IdError,
    },
}

impl ParseError {
    /// The offending input line.
    pub fn line(&self) -> &str {
        match self {
            ParseError::NoMatch(line) | ParseError::MalformedId { line, .. } => line,
        }
    }
}

/// Collapses runs of whitespace to single spaces and trims both ends.
pub fn normalize_whitespace(line: &str) -> String {
    line.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses a command line (without the leading `> `).
pub fn parse_action(line: &str) -> Result<Action, ParseError> {
    let normalized = normalize_whitespace(line);
    let tokens: Vec<&str> = normalized.split(' ').collect();
    let no_match = || ParseError::NoMatch(normalized.clone());
    let malformed = |source| ParseError::MalformedId { line: normalized.clone(), source };

    let recep = |ts: &[&str]| -> Result<ReceptacleId, ParseError> {
        if ts.is_empty() {
            return Err(no_match());
        }
        ts.join(" ").parse().map_err(malformed)
    };
    let object = |ts: &[&str]| -> Result<ObjectId, ParseError> {
        if ts.is_empty() {
            return Err(no_match());
        }
        ts.join(" ").parse().map_err(malformed)
    };
    // "<verb> <obj> <sep> <recep>"
    let pair = |sep: &str| -> Result<(ObjectId, ReceptacleId), ParseError> {
        let rest = &tokens[1..];
        let at = rest.iter().position(|t| *t == sep).ok_or_else(no_match)?;
        Ok((object(&rest[..at])?, recep(&rest[at + 1..])?))
    };

    match tokens[0] {
        "go" if tokens.get(1) == Some(&"to") => Ok(Action::GoTo(recep(&tokens[2..])?)),
        "open" => Ok(Action::Open(recep(&tokens[1..])?)),
        "close" => Ok(Action::Close(recep(&tokens[1..])?)),
        "use" => Ok(Action::Use(recep(&tokens[1..])?)),
        "take" => pair("from").map(|(object, from)| Action::Take { object, from }),
        "put" => pair("in/on").map(|(object, into)| Action::Put { object, into }),
        "clean" => pair("with").map(|(object, with)| Action::Clean { object, with }),
        "heat" => pair("with").map(|(object, with)| Action::Heat { object, with }),
        "cool" => pair("with").map(|(object, with)| Action::Cool { object, with }),
        _ => Err(no_match()),
    }
}

/// Canonical single-space rendering; the inverse of [`parse_action`].
pub fn format_action(action: &Action) -> String {
    action.to_string()
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::GoTo(r) => write!(f, "go to {r}"),
            Action::Open(r) => write!(f, "open {r}"),
            Action::Close(r) => write!(f, "close {r}"),
            Action::Take { object, from } => write!(f, "take {object} from {from}"),
            Action::Put { object, into } => write!(f, "put {object} in/on {into}"),
            Action::Clean { object, with } => write!(f, "clean {object} with {with}"),
            Action::Heat { object, with } => write!(f, "heat {object} with {with}"),
            Action::Cool { object, with } => write!(f, "cool {object} with {with}"),
            Action::Use(r) => write!(f, "use {r}"),
        }
    }
}

impl std::str::FromStr for Action {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_action(s)
    }
}
