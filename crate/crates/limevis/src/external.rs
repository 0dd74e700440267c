//! Newline-delimited JSON protocol for out-of-process models, carried over a
//! child process's stdin/stdout or HTTP `POST /predict`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use limevis_core::{ClassProbabilities, Predictor, RgbImage};
use serde_json::{json, Value};

use crate::error::{predictor_failure, LimevisError, Result};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    /// Shell command line; the child speaks the protocol on stdin/stdout.
    Command(String),
    /// Base URL or full `/predict` URL.
    Url(String),
}

trait Channel: Send {
    fn round_trip(&mut self, request: &str) -> Result<String>;
}

struct ProcessChannel {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ProcessChannel {
    fn spawn(command: &str, timeout: Duration) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| predictor_failure(format!("cannot spawn {command:?}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ProcessChannel { child, stdin, lines, timeout })
    }
}

impl Channel for ProcessChannel {
    fn round_trip(&mut self, request: &str) -> Result<String> {
        writeln!(self.stdin, "{request}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| predictor_failure(format!("write to predictor process failed: {e}")))?;
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(predictor_failure(format!("read from predictor process failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(predictor_failure(format!("no response within {:?}", self.timeout))),
            Err(RecvTimeoutError::Disconnected) => Err(predictor_failure("predictor process closed its output")),
        }
    }
}

impl Drop for ProcessChannel {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

struct HttpChannel {
    agent: ureq::Agent,
    url: String,
}

impl HttpChannel {
    fn new(url: &str, timeout: Duration) -> Self {
        let url = if url.ends_with("/predict") { url.to_string() } else { format!("{}/predict", url.trim_end_matches('/')) };
        HttpChannel { agent: ureq::AgentBuilder::new().timeout(timeout).build(), url }
    }
}

impl Channel for HttpChannel {
    fn round_trip(&mut self, request: &str) -> Result<String> {
        self.agent
            .post(&self.url)
            .set("Content-Type", "application/json")
            .send_string(request)
            .map_err(|e| predictor_failure(format!("POST {} failed: {e}", self.url)))?
            .into_string()
            .map_err(|e| predictor_failure(format!("reading response from {} failed: {e}", self.url)))
    }
}

/// Connections to one endpoint. Each connection carries one request at a
/// time; up to `max_connections` are opened on demand.
struct Pool {
    endpoint: Endpoint,
    timeout: Duration,
    max_connections: usize,
    state: Mutex<PoolState>,
    freed: Condvar,
}

struct PoolState {
    idle: Vec<Box<dyn Channel>>,
    open: usize,
}

impl Pool {
    fn new(endpoint: Endpoint, timeout: Duration, max_connections: usize) -> Self {
        Pool {
            endpoint,
            timeout,
            max_connections: max_connections.max(1),
            state: Mutex::new(PoolState { idle: Vec::new(), open: 0 }),
            freed: Condvar::new(),
        }
    }

    /// Opens a connection and performs the handshake.
    fn connect(&self) -> Result<(Box<dyn Channel>, serde_json::Map<String, Value>)> {
        let mut ch: Box<dyn Channel> = match &self.endpoint {
            Endpoint::Command(cmd) => Box::new(ProcessChannel::spawn(cmd, self.timeout)?),
            Endpoint::Url(url) => Box::new(HttpChannel::new(url, self.timeout)),
        };
        let reply = parse_object(&ch.round_trip(r#"{"hello":true}"#)?)?;
        Ok((ch, reply))
    }

    /// Runs `f` on a pooled connection. Connections that saw an error are dropped.
    fn with_channel<T>(&self, f: impl FnOnce(&mut dyn Channel) -> Result<T>) -> Result<T> {
        let mut ch = {
            let mut st = self.state.lock().unwrap();
            loop {
                if let Some(ch) = st.idle.pop() {
                    break Some(ch);
                }
                if st.open < self.max_connections {
                    st.open += 1;
                    break None;
                }
                st = self.freed.wait(st).unwrap();
            }
        };
        if ch.is_none() {
            match self.connect() {
                Ok((c, _)) => ch = Some(c),
                Err(e) => {
                    self.release(None);
                    return Err(e);
                }
            }
        }
        let mut ch = ch.unwrap();
        let out = f(ch.as_mut());
        self.release(out.is_ok().then_some(ch));
        out
    }

    fn release(&self, ch: Option<Box<dyn Channel>>) {
        let mut st = self.state.lock().unwrap();
        match ch {
            Some(c) => st.idle.push(c),
            None => st.open -= 1,
        }
        self.freed.notify_one();
    }
}

fn parse_object(line: &str) -> Result<serde_json::Map<String, Value>> {
    match serde_json::from_str::<Value>(line.trim()) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(predictor_failure("response is not a JSON object")),
        Err(e) => Err(predictor_failure(format!("response is not valid JSON: {e}"))),
    }
}

pub fn encode_request(id: u64, image: &RgbImage) -> String {
    json!({
        "id": id,
        "width": image.width(),
        "height": image.height(),
        "pixels_b64": B64.encode(image.to_rgb_bytes()),
    })
    .to_string()
}

/// Decodes a request line as a responder sees it.
pub fn decode_request(line: &str) -> Result<(u64, RgbImage)> {
    let bad = |m: &str| LimevisError::BadRequest(m.to_string());
    let v: Value = serde_json::from_str(line).map_err(|e| bad(&e.to_string()))?;
    let id = v["id"].as_u64().ok_or_else(|| bad("missing id"))?;
    let w = v["width"].as_u64().ok_or_else(|| bad("missing width"))? as usize;
    let h = v["height"].as_u64().ok_or_else(|| bad("missing height"))? as usize;
    let bytes = B64.decode(v["pixels_b64"].as_str().ok_or_else(|| bad("missing pixels_b64"))?).map_err(|e| bad(&e.to_string()))?;
    Ok((id, RgbImage::from_rgb_bytes(w, h, &bytes)?))
}

fn float_array(reply: &serde_json::Map<String, Value>, key: &str) -> Result<Vec<f64>> {
    reply
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| predictor_failure(format!("response has no {key} array")))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| predictor_failure(format!("non-numeric entry in {key}"))))
        .collect()
}

fn check_id(reply: &serde_json::Map<String, Value>, id: u64) -> Result<()> {
    match reply.get("id").and_then(Value::as_u64) {
        Some(got) if got == id => Ok(()),
        Some(got) => Err(predictor_failure(format!("response id {got} does not match request id {id}"))),
        None => Err(predictor_failure("response has no id")),
    }
}

/// A classifier reached through the external protocol.
pub struct ExternalPredictor {
    pool: Pool,
    class_names: Vec<String>,
    next_id: AtomicU64,
}

impl std::fmt::Debug for ExternalPredictor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalPredictor").field("endpoint", &self.pool.endpoint).field("class_names", &self.class_names).finish()
    }
}

impl ExternalPredictor {
    pub fn connect(endpoint: Endpoint) -> Result<Self> {
        Self::connect_with(endpoint, DEFAULT_TIMEOUT, 1)
    }

    /// Performs the handshake on a first connection.
    pub fn connect_with(endpoint: Endpoint, timeout: Duration, max_connections: usize) -> Result<Self> {
        let pool = Pool::new(endpoint, timeout, max_connections);
        let (ch, reply) = pool.connect()?;
        let class_names = parse_handshake(&reply)?;
        *pool.state.lock().unwrap() = PoolState { idle: vec![ch], open: 1 };
        Ok(ExternalPredictor { pool, class_names, next_id: AtomicU64::new(0) })
    }

    pub fn endpoint(&self) -> &Endpoint {
        &self.pool.endpoint
    }
}

fn parse_handshake(reply: &serde_json::Map<String, Value>) -> Result<Vec<String>> {
    let count = reply
        .get("class_count")
        .and_then(Value::as_u64)
        .filter(|&c| c >= 1)
        .ok_or_else(|| predictor_failure("handshake has no positive class_count"))? as usize;
    let names: Vec<String> = reply
        .get("class_names")
        .and_then(Value::as_array)
        .ok_or_else(|| predictor_failure("handshake has no class_names"))?
        .iter()
        .map(|n| n.as_str().map(String::from).ok_or_else(|| predictor_failure("class name is not a string")))
        .collect::<Result<_>>()?;
    if names.len() != count {
        return Err(predictor_failure(format!("class_count {count} but {} class names", names.len())));
    }
    Ok(names)
}

impl Predictor for ExternalPredictor {
    fn class_count(&self) -> usize {
        self.class_names.len()
    }

    fn class_names(&self) -> &[String] {
        &self.class_names
    }

    fn predict_batch(&self, images: &[RgbImage]) -> limevis_core::Result<Vec<ClassProbabilities>> {
        if images.is_empty() {
            return Ok(Vec::new());
        }
        let run = |ch: &mut dyn Channel| -> Result<Vec<ClassProbabilities>> {
            images
                .iter()
                .map(|img| {
                    let id = self.next_id.fetch_add(1, Ordering::Relaxed);
                    let reply = parse_object(&ch.round_trip(&encode_request(id, img))?)?;
                    check_id(&reply, id)?;
                    let probs = float_array(&reply, "probs")?;
                    if probs.len() != self.class_count() {
                        return Err(predictor_failure(format!(
                            "{} probabilities for {} classes",
                            probs.len(),
                            self.class_count()
                        )));
                    }
                    ClassProbabilities::new(probs).map_err(|e| predictor_failure(format!("invalid probabilities: {e}")))
                })
                .collect()
        };
        self.pool.with_channel(run).map_err(|e| match e {
            LimevisError::Core(c) => c,
            other => limevis_core::Error::ExternalPredictorFailure(other.to_string()),
        })
    }
}

/// A feature extractor reached through the same protocol; replies carry
/// `features` instead of `probs`.
pub struct ExternalExtractor {
    pool: Pool,
    next_id: AtomicU64,
}

impl ExternalExtractor {
    pub fn connect(endpoint: Endpoint) -> Result<Self> {
        Self::connect_with(endpoint, DEFAULT_TIMEOUT)
    }

    pub fn connect_with(endpoint: Endpoint, timeout: Duration) -> Result<Self> {
        Ok(ExternalExtractor { pool: Pool::new(endpoint, timeout, 1), next_id: AtomicU64::new(0) })
    }

    pub fn extract(&self, images: &[RgbImage]) -> Result<Vec<Vec<f64>>> {
        let rows = self.pool.with_channel(|ch| {
            images
                .iter()
                .map(|img| {
                    let id = self.next_id.fetch_add(1, Ordering::Relaxed);
                    let reply = parse_object(&ch.round_trip(&encode_request(id, img))?)?;
                    check_id(&reply, id)?;
                    let f = float_array(&reply, "features")?;
                    if f.is_empty() || f.iter().any(|x| !x.is_finite()) {
                        return Err(predictor_failure("features must be a nonempty finite vector"));
                    }
                    Ok(f)
                })
                .collect::<Result<Vec<_>>>()
        })?;
        if rows.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(predictor_failure("feature vectors differ in length"));
        }
        Ok(rows)
    }
}
