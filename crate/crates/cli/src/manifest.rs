//! Plain-text `key = value` manifests written next to datasets.

use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub const VERSION: &str = concat!("qbattery ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Self { entries: vec![("version".to_owned(), VERSION.to_owned())] }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = (String, String)>) -> &mut Self {
        self.entries.extend(entries);
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        f.write_all(self.render().as_bytes()).map_err(|e| CliError::io(path, e))
    }
}
