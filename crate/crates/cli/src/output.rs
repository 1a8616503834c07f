use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::args::{Cli, Format};
use crate::error::CliError;

/// Plot-ready rows; `header` names the comma-separated columns.
pub struct Table {
    pub header: &'static str,
    pub rows: Vec<String>,
}

impl Table {
    pub fn new(header: &'static str) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: String) {
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    command: &'a str,
    dim_cap: usize,
    config: &'a C,
    result: &'a R,
}

/// JSON envelope {command, dim_cap, config, result}, or CSV with the config
/// on a leading `#` line.
pub fn emit<C: Serialize, R: Serialize>(
    cli: &Cli,
    command: &str,
    config: &C,
    result: &R,
    table: Option<Table>,
) -> Result<(), CliError> {
    let envelope = Envelope {
        command,
        dim_cap: cli.dim_cap,
        config,
        result,
    };
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let table = table.ok_or_else(|| {
                CliError::Usage(format!("`{command}` has no CSV form; use --format json"))
            })?;
            let meta =
                serde_json::json!({ "command": command, "dim_cap": cli.dim_cap, "config": config });
            let mut s = format!("# {meta}\n{}\n", table.header);
            for row in &table.rows {
                s.push_str(row);
                s.push('\n');
            }
            s
        }
    };
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

/// Reads a bare artifact or the `result` of a report envelope.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text)?;
    let inner = match value {
        Value::Object(mut map) if map.contains_key("command") && map.contains_key("result") => {
            map.remove("result").unwrap_or(Value::Null)
        }
        other => other,
    };
    Ok(serde_json::from_value(inner)?)
}
