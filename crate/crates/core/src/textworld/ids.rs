use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error("identifier `{0}` is missing its index")]
    MissingIndex(String),
    #[error("identifier `{0}` has a non-integer or zero index")]
    BadIndex(String),
    #[error("identifier `{0}` has an invalid class name (expected lowercase letters only)")]
    BadClass(String),
}

/// Returns true for a valid class name: non-empty, lowercase ASCII letters.
pub fn is_class_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase())
}

fn split_id(s: &str) -> Result<(String, u32), IdError> {
    let mut parts = s.split_whitespace();
    let class = parts.next().ok_or_else(|| IdError::MissingIndex(s.to_string()))?;
    let index = parts.next().ok_or_else(|| IdError::MissingIndex(s.to_string()))?;
    if parts.next().is_some() {
        return Err(IdError::BadIndex(s.to_string()));
    }
    if !is_class_name(class) {
        return Err(IdError::BadClass(s.to_string()));
    }
    // Reject "+3" and "007"-style spellings so the rendering stays canonical.
    if index.starts_with('+') || (index.len() > 1 && index.starts_with('0')) {
        return Err(IdError::BadIndex(s.to_string()));
    }
    match index.parse::<u32>() {
        Ok(i) if i > 0 => Ok((class.to_string(), i)),
        _ => Err(IdError::BadIndex(s.to_string())),
    }
}

macro_rules! entity_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name {
            class: String,
            index: u32,
        }

        impl $name {
            /// Panics if `class` is not a valid class name or `index` is zero.
            pub fn new(class: &str, index: u32) -> Self {
                assert!(is_class_name(class), "invalid class name {class:?}");
                assert!(index > 0, "identifier index must be positive");
                Self { class: class.to_string(), index }
            }

            pub fn class(&self) -> &str {
                &self.class
            }

            pub fn index(&self) -> u32 {
                self.index
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} {}", self.class, self.index)
            }
        }

        impl FromStr for $name {
            type Err = IdError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let (class, index) = split_id(s)?;
                Ok(Self { class, index })
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

entity_id!(
    /// A portable object such as `pillow 2` or `tomato 1`.
    ObjectId
);

entity_id!(
    /// A fixed location such as `fridge 1` or `countertop 2`.
    ReceptacleId
);
