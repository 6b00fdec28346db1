//! Observation sentence templates.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

const BUILTIN: &str = include_str!("../../data/observations.txt");

/// Semantic events the environment reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    ArriveOn,
    ArriveOpen,
    ArriveClosed,
    Open,
    Close,
    Take,
    Put,
    Clean,
    Heat,
    Cool,
    Use,
    Nothing,
    Empty,
}

impl Event {
    pub const ALL: [Event; 13] = [
        Event::ArriveOn,
        Event::ArriveOpen,
        Event::ArriveClosed,
        Event::Open,
        Event::Close,
        Event::Take,
        Event::Put,
        Event::Clean,
        Event::Heat,
        Event::Cool,
        Event::Use,
        Event::Nothing,
        Event::Empty,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Event::ArriveOn => "arrive_on",
            Event::ArriveOpen => "arrive_open",
            Event::ArriveClosed => "arrive_closed",
            Event::Open => "open",
            Event::Close => "close",
            Event::Take => "take",
            Event::Put => "put",
            Event::Clean => "clean",
            Event::Heat => "heat",
            Event::Cool => "cool",
            Event::Use => "use",
            Event::Nothing => "nothing",
            Event::Empty => "empty",
        }
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog line {line}: expected `event = template`")]
    Syntax { line: usize },
    #[error("catalog line {line}: unknown event `{key}`")]
    UnknownEvent { line: usize, key: String },
    #[error("catalog line {line}: duplicate event `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("catalog is missing events: {0:?}")]
    Missing(Vec<&'static str>),
    #[error("reading catalog: {0}")]
    Io(#[from] std::io::Error),
}

/// Maps each [`Event`] to its sentence template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    templates: BTreeMap<Event, String>,
}

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("builtin observation catalog is valid")
    }

    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let mut templates = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, template) =
                trimmed.split_once('=').ok_or(CatalogError::Syntax { line })?;
            let key = key.trim();
            let event = Event::ALL
                .into_iter()
                .find(|e| e.key() == key)
                .ok_or_else(|| CatalogError::UnknownEvent { line, key: key.to_string() })?;
            if templates.insert(event, template.trim().to_string()).is_some() {
                return Err(CatalogError::Duplicate { line, key: key.to_string() });
            }
        }
        let missing: Vec<_> = Event::ALL
            .into_iter()
            .filter(|e| !templates.contains_key(e))
            .map(Event::key)
            .collect();
        if !missing.is_empty() {
            return Err(CatalogError::Missing(missing));
        }
        Ok(Self { templates })
    }

    pub fn template(&self, event: Event) -> &str {
        &self.templates[&event]
    }

    /// Fills `{recep}`, `{obj}` and `{contents}` in the event's template.
    pub fn render(&self, event: Event, recep: &str, obj: &str, contents: &str) -> String {
        self.template(event)
            .replace("{recep}", recep)
            .replace("{obj}", obj)
            .replace("{contents}", contents)
    }

    /// Renders an item list, falling back to the `empty` entry.
    pub fn contents<I, T>(&self, items: I) -> String
    where
        I: IntoIterator<Item = T>,
        T: std::fmt::Display,
    {
        let items: Vec<String> = items.into_iter().map(|i| i.to_string()).collect();
        if items.is_empty() {
            self.template(Event::Empty).to_string()
        } else {
            article_list(&items)
        }
    }
}

impl Default for Catalog {
    fn default() -> Self {
        Self::builtin()
    }
}

/// `a x`, `a x, and a y`, `a x, a y, and a z`.
pub fn article_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [only] => format!("a {only}"),
        [init @ .., last] => {
            let mut out = String::new();
            for item in init {
                out.push_str("a ");
                out.push_str(item);
                out.push_str(", ");
            }
            out.push_str("and a ");
            out.push_str(last);
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_every_event() {
        let c = Catalog::builtin();
        assert_eq!(c.template(Event::Nothing), "Nothing happens.");
        assert_eq!(
            c.render(Event::Cool, "fridge 1", "pan 1", ""),
            "You cool the pan 1 using the fridge 1."
        );
    }

    #[test]
    fn list_separators() {
        let s = |v: &[&str]| article_list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        assert_eq!(s(&["fridge 1"]), "a fridge 1");
        assert_eq!(s(&["sofa 1", "armchair 1"]), "a sofa 1, and a armchair 1");
        assert_eq!(s(&["a 1", "b 1", "c 1"]), "a a 1, a b 1, and a c 1");
    }

    #[test]
    fn rejects_bad_catalogs() {
        assert!(matches!(Catalog::parse("nothing"), Err(CatalogError::Syntax { line: 1 })));
        assert!(matches!(
            Catalog::parse("bogus = x"),
            Err(CatalogError::UnknownEvent { .. })
        ));
        let doubled = format!("{BUILTIN}\nnothing = again");
        assert!(matches!(Catalog::parse(&doubled), Err(CatalogError::Duplicate { .. })));
        match Catalog::parse("nothing = Nothing happens.") {
            Err(CatalogError::Missing(m)) => assert_eq!(m.len(), 12),
            other => panic!("expected missing events, got {other:?}"),
        }
    }
}
