//! Name-keyed factories for interchangeable strategies.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type Factory<T, C> = fn(&C) -> Result<Box<T>>;

/// Maps a strategy name to a constructor taking a shared context `C`.
pub struct Registry<T: ?Sized, C> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Factory<T, C>>,
}

impl<T: ?Sized, C> Registry<T, C> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: Factory<T, C>) -> &mut Self {
        self.entries.insert(name, factory);
        self
    }

    pub fn with(mut self, name: &'static str, factory: Factory<T, C>) -> Self {
        self.register(name, factory);
        self
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn create(&self, name: &str, ctx: &C) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(factory) => factory(ctx),
            None => Err(Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            }),
        }
    }
}
