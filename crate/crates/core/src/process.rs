//! Newline-delimited JSON request/response over a child process's standard
//! streams, shared by the external shape generator and the CFD adapter.
//!
//! A child first prints a `{"ready": true, ...}` handshake line. Each
//! request carries a fresh `id` which the response must echo. A timeout,
//! a closed stream or a mismatched response kills the child; the next call
//! on that slot spawns a replacement.

use std::io::{self, BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("failed to start {command:?}: {source}")]
    Spawn { command: String, source: io::Error },
    #[error("bad handshake: {0}")]
    Handshake(String),
    #[error("no response within {0:?}")]
    Timeout(Duration),
    #[error("child process closed its output")]
    Closed,
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("protocol error: {0}")]
    Protocol(String),
}

struct LineProcess {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<io::Result<String>>,
    /// Value of the handshake's `model` field, if any.
    model: Option<String>,
}

impl LineProcess {
    fn spawn(command: &[String], startup_timeout: Duration) -> Result<Self, ProcessError> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| ProcessError::Protocol("empty command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| ProcessError::Spawn {
                command: command.join(" "),
                source,
            })?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut proc = LineProcess {
            child,
            stdin,
            lines: rx,
            model: None,
        };
        let hello: Value = serde_json::from_str(&proc.recv(startup_timeout)?)
            .map_err(|e| ProcessError::Handshake(e.to_string()))?;
        if hello.get("ready") != Some(&Value::Bool(true)) {
            return Err(ProcessError::Handshake(format!("expected {{\"ready\": true}}, got {hello}")));
        }
        proc.model = hello.get("model").and_then(Value::as_str).map(str::to_owned);
        Ok(proc)
    }

    fn send(&mut self, line: &str) -> Result<(), ProcessError> {
        self.stdin.write_all(line.as_bytes())?;
        self.stdin.write_all(b"\n")?;
        self.stdin.flush()?;
        Ok(())
    }

    fn recv(&mut self, timeout: Duration) -> Result<String, ProcessError> {
        match self.lines.recv_timeout(timeout) {
            Ok(line) => Ok(line?),
            Err(RecvTimeoutError::Timeout) => Err(ProcessError::Timeout(timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(ProcessError::Closed),
        }
    }
}

impl Drop for LineProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A fixed number of child processes, each serving one request at a time.
pub struct ProcessPool {
    command: Vec<String>,
    timeout: Duration,
    startup_timeout: Duration,
    slots: Vec<Mutex<Option<LineProcess>>>,
    next_slot: AtomicUsize,
    next_id: AtomicU64,
    label: &'static str,
}

impl ProcessPool {
    pub fn new(label: &'static str, command: Vec<String>, size: usize, timeout: Duration, startup_timeout: Duration) -> Self {
        Self {
            command,
            timeout,
            startup_timeout,
            slots: (0..size.max(1)).map(|_| Mutex::new(None)).collect(),
            next_slot: AtomicUsize::new(0),
            next_id: AtomicU64::new(0),
            label,
        }
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }

    /// Sends one request built from a fresh id and returns the decoded
    /// response together with the `model` announced by the child.
    pub fn call<Req, Resp>(&self, build: impl FnOnce(String) -> Req) -> Result<(Resp, Option<String>), ProcessError>
    where
        Req: Serialize,
        Resp: DeserializeOwned,
    {
        let slot = self.next_slot.fetch_add(1, Ordering::Relaxed) % self.slots.len();
        let mut guard = self.slots[slot].lock().unwrap_or_else(|p| p.into_inner());
        if guard.is_none() {
            *guard = Some(LineProcess::spawn(&self.command, self.startup_timeout)?);
        }
        let id = format!("{}-{}", self.label, self.next_id.fetch_add(1, Ordering::Relaxed));
        let request = serde_json::to_string(&build(id.clone())).map_err(|e| ProcessError::Protocol(e.to_string()))?;

        let proc = guard.as_mut().expect("spawned above");
        let result = proc.send(&request).and_then(|_| proc.recv(self.timeout)).and_then(|line| {
            let value: Value =
                serde_json::from_str(&line).map_err(|e| ProcessError::Protocol(format!("unparseable response: {e}")))?;
            match value.get("id").and_then(Value::as_str) {
                Some(echo) if echo == id => {}
                other => return Err(ProcessError::Protocol(format!("response id {other:?} does not match {id:?}"))),
            }
            serde_json::from_value(value).map_err(|e| ProcessError::Protocol(e.to_string()))
        });
        match result {
            Ok(resp) => Ok((resp, proc.model.clone())),
            Err(e) => {
                // out of sync or dead: drop it so the next call starts clean
                *guard = None;
                Err(e)
            }
        }
    }
}
