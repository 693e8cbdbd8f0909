//! Versioned report envelope shared by all commands.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::{Common, Format};

pub const SCHEMA: &str = "subcert-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Satisfied,
    NotSatisfied,
}

#[derive(Serialize)]
struct Timings {
    total_ms: f64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    system_sha256: &'a str,
    seed: u64,
    options: &'a Value,
    status: Status,
    result: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

pub struct Report {
    pub command: &'static str,
    pub system_sha256: String,
    pub options: Value,
    pub status: Status,
    pub result: Value,
    /// Human-readable summary lines.
    pub text: Vec<String>,
}

impl Report {
    pub fn render(&self, common: &Common, started: Instant) -> String {
        let timings = common.timings.then(|| Timings { total_ms: started.elapsed().as_secs_f64() * 1e3 });
        match common.format {
            Format::Json => {
                let env = Envelope {
                    schema: SCHEMA,
                    tool: "subcert",
                    version: env!("CARGO_PKG_VERSION"),
                    command: self.command,
                    system_sha256: &self.system_sha256,
                    seed: common.seed,
                    options: &self.options,
                    status: self.status,
                    result: &self.result,
                    timings,
                };
                let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = format!(
                    "subcert {} {} (system sha256 {})\n",
                    env!("CARGO_PKG_VERSION"),
                    self.command,
                    &self.system_sha256[..16.min(self.system_sha256.len())]
                );
                for line in &self.text {
                    s.push_str(line);
                    s.push('\n');
                }
                let status = match self.status {
                    Status::Satisfied => "satisfied",
                    Status::NotSatisfied => "not_satisfied",
                };
                s.push_str(&format!("status: {status}\n"));
                if let Some(t) = timings {
                    s.push_str(&format!("time: {:.1} ms\n", t.total_ms));
                }
                s
            }
        }
    }
}
