use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{Model, Value};

/// A total valuation of a model's attributes, `duration` included.
///
/// Attribute names are shared between all states of one model; values are
/// stored in declaration order.
#[derive(Debug, Clone)]
pub struct PlantState {
    names: Arc<[String]>,
    values: Vec<Value>,
}

impl PlantState {
    pub fn new(names: Arc<[String]>, values: Vec<Value>) -> Self {
        assert_eq!(names.len(), values.len(), "state arity mismatch");
        PlantState { names, values }
    }

    /// Builds a state for `model` from `(name, value)` pairs. Attributes
    /// not listed get their domain's default value; `duration` starts at 0.
    pub fn from_pairs<'a>(
        model: &Model,
        pairs: impl IntoIterator<Item = (&'a str, Value)>,
    ) -> Self {
        let names: Arc<[String]> = model.attributes.iter().map(|a| a.name.clone()).collect();
        let values = model
            .attributes
            .iter()
            .map(|a| match a.domain.contains(&Value::Int(0)) {
                true => Value::Int(0),
                false => a.domain.default_value(),
            })
            .collect();
        let mut state = PlantState::new(names, values);
        for (name, value) in pairs {
            assert!(state.set(name, value), "unknown attribute {name}");
        }
        state
    }

    pub fn names(&self) -> &Arc<[String]> {
        &self.names
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.index_of(name).map(|i| &self.values[i])
    }

    pub fn at(&self, index: usize) -> &Value {
        &self.values[index]
    }

    pub fn set_at(&mut self, index: usize, value: Value) {
        self.values[index] = value;
    }

    /// Returns false if the attribute does not exist.
    pub fn set(&mut self, name: &str, value: Value) -> bool {
        match self.index_of(name) {
            Some(i) => {
                self.values[i] = value;
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.names.iter().map(String::as_str).zip(self.values.iter())
    }

    pub fn duration(&self) -> Option<i64> {
        self.get(super::DURATION).and_then(Value::as_int)
    }
}

/// Deep, independent copy of a state.
pub fn snapshot(state: &PlantState) -> PlantState {
    state.clone()
}

impl PartialEq for PlantState {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
            && (Arc::ptr_eq(&self.names, &other.names) || self.names == other.names)
    }
}

impl Eq for PlantState {}

impl Hash for PlantState {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.values.hash(h);
    }
}

impl fmt::Display for PlantState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, value)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

impl Serialize for PlantState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.values.len()))?;
        for (name, value) in self.iter() {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}
