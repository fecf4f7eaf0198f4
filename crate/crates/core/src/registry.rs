//! Name-keyed registries of interchangeable solver strategies.

use crate::error::{Error, Result};

/// Trait objects registered under unique names and looked up at runtime.
pub struct Registry<T: ?Sized> {
    entries: Vec<(String, Box<T>)>,
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Registry { entries: Vec::new() }
    }
}

impl<T: ?Sized> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, item: Box<T>) -> Result<()> {
        if self.entries.iter().any(|(n, _)| n == name) {
            return Err(Error::InvalidInput(format!("strategy {name:?} registered twice")));
        }
        self.entries.push((name.to_string(), item));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, item)| item.as_ref())
            .ok_or_else(|| Error::InvalidInput(format!("unknown strategy {name:?}; available: {}", self.names().join(", "))))
    }

    /// Names in registration order.
    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }
}
