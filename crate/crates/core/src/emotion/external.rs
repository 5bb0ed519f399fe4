//! Client for an external valence/arousal scorer speaking a line-delimited
//! JSON protocol over a child process's standard streams.
//!
//! The child first prints `{"protocol":"poemotion-scorer","version":1}`.
//! Each request line `{"id":N,"text":"..."}` is answered, in order, by
//! `{"id":N,"valence":V,"arousal":A}` or `{"id":N,"error":"..."}`. Closing
//! the child's stdin ends the session and the child must exit with status 0.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::extract::SemanticSegment;

pub const PROTOCOL_NAME: &str = "poemotion-scorer";
pub const PROTOCOL_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("could not launch scorer {command:?}: {reason}")]
    Launch { command: String, reason: String },
    #[error("scorer timed out after {seconds}s waiting for {waiting_for}")]
    Timeout { seconds: f64, waiting_for: String },
    #[error("scorer protocol error: {0}")]
    Protocol(String),
}

#[derive(Serialize)]
struct Request<'a> {
    id: u64,
    text: &'a str,
}

/// A running scorer session. One request is in flight at a time.
pub struct ExternalScorer {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
    next_id: u64,
}

impl ExternalScorer {
    /// Launches `command` through `sh -c` and validates the handshake line.
    pub fn spawn(command: &str, timeout_s: f64) -> Result<Self, ScorerError> {
        let launch_err = |reason: String| ScorerError::Launch {
            command: command.to_string(),
            reason,
        };
        if !(timeout_s > 0.0 && timeout_s.is_finite()) {
            return Err(launch_err(format!("invalid timeout {timeout_s}")));
        }
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| launch_err(e.to_string()))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");

        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });

        let mut scorer = ExternalScorer {
            child,
            stdin,
            lines: rx,
            timeout: Duration::from_secs_f64(timeout_s),
            next_id: 0,
        };
        let hello = match scorer.read_line("the handshake line") {
            Err(ScorerError::Protocol(reason)) => return Err(launch_err(reason)),
            other => other?,
        };
        let hello: Value = serde_json::from_str(&hello)
            .map_err(|e| ScorerError::Protocol(format!("bad handshake {hello:?}: {e}")))?;
        if hello.get("protocol").and_then(Value::as_str) != Some(PROTOCOL_NAME)
            || hello.get("version").and_then(Value::as_u64) != Some(PROTOCOL_VERSION)
        {
            return Err(ScorerError::Protocol(format!(
                "expected {PROTOCOL_NAME} version {PROTOCOL_VERSION}, got {hello}"
            )));
        }
        Ok(scorer)
    }

    fn read_line(&mut self, waiting_for: &str) -> Result<String, ScorerError> {
        let deadline = Instant::now() + self.timeout;
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(left) {
                Ok(Ok(line)) if line.trim().is_empty() => continue,
                Ok(Ok(line)) => return Ok(line),
                Ok(Err(e)) => return Err(ScorerError::Protocol(format!("read failed: {e}"))),
                Err(RecvTimeoutError::Timeout) => {
                    let _ = self.child.kill();
                    return Err(ScorerError::Timeout {
                        seconds: self.timeout.as_secs_f64(),
                        waiting_for: waiting_for.to_string(),
                    });
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(ScorerError::Protocol(format!(
                        "scorer closed its output while waiting for {waiting_for}"
                    )))
                }
            }
        }
    }

    /// Scores one text, returning `(valence, arousal)`.
    pub fn score(&mut self, text: &str) -> Result<(f64, f64), ScorerError> {
        let id = self.next_id;
        self.next_id += 1;
        let request = serde_json::to_string(&Request { id, text }).expect("request serializes");
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| ScorerError::Protocol("session already closed".to_string()))?;
        writeln!(stdin, "{request}")
            .and_then(|_| stdin.flush())
            .map_err(|e| ScorerError::Protocol(format!("write of request {id} failed: {e}")))?;

        let line = self.read_line(&format!("response {id}"))?;
        parse_response(&line, id)
    }

    /// Closes the request stream and waits for a clean exit.
    pub fn finish(mut self) -> Result<(), ScorerError> {
        drop(self.stdin.take());
        let deadline = Instant::now() + self.timeout;
        loop {
            match self.child.try_wait() {
                Ok(Some(status)) if status.success() => return Ok(()),
                Ok(Some(status)) => {
                    return Err(ScorerError::Protocol(format!("scorer exited with {status}")))
                }
                Ok(None) if Instant::now() >= deadline => {
                    let _ = self.child.kill();
                    return Err(ScorerError::Timeout {
                        seconds: self.timeout.as_secs_f64(),
                        waiting_for: "scorer exit".to_string(),
                    });
                }
                Ok(None) => thread::sleep(Duration::from_millis(5)),
                Err(e) => return Err(ScorerError::Protocol(format!("wait failed: {e}"))),
            }
        }
    }
}

impl Drop for ExternalScorer {
    fn drop(&mut self) {
        if let Ok(None) = self.child.try_wait() {
            drop(self.stdin.take());
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}

fn parse_response(line: &str, expected_id: u64) -> Result<(f64, f64), ScorerError> {
    let protocol = |msg: String| ScorerError::Protocol(msg);
    let value: Value = serde_json::from_str(line)
        .map_err(|e| protocol(format!("malformed response {line:?}: {e}")))?;
    let id = value
        .get("id")
        .and_then(Value::as_u64)
        .ok_or_else(|| protocol(format!("response without integer id: {line}")))?;
    if id != expected_id {
        return Err(protocol(format!("expected response id {expected_id}, got {id}")));
    }
    if let Some(err) = value.get("error") {
        return Err(protocol(format!("scorer failed on request {id}: {err}")));
    }
    let field = |name: &str| -> Result<f64, ScorerError> {
        let x = value
            .get(name)
            .and_then(Value::as_f64)
            .ok_or_else(|| protocol(format!("response {id} lacks numeric {name}")))?;
        if !(-1.0..=1.0).contains(&x) {
            return Err(protocol(format!("response {id}: {name} {x} is outside [-1, 1]")));
        }
        Ok(x)
    };
    Ok((field("valence")?, field("arousal")?))
}

/// Scores every segment through one scorer session, preserving order.
pub fn score_segments_external(
    segments: &[SemanticSegment],
    scorer_command: &str,
    timeout_s: f64,
) -> Result<Vec<(f64, f64)>, ScorerError> {
    let mut scorer = ExternalScorer::spawn(scorer_command, timeout_s)?;
    let scores = segments
        .iter()
        .map(|s| scorer.score(&s.text))
        .collect::<Result<Vec<_>, _>>()?;
    scorer.finish()?;
    Ok(scores)
}
