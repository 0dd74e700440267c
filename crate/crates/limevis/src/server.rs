//! HTTP API over one active session.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::thread::{self, JoinHandle};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use limevis_core::segmentation::boundary_mask;
use limevis_core::{Predictor, RgbImage};
use serde::Deserialize;
use serde_json::{json, Value};
use tiny_http::{Header, Method, Response, Server};

use crate::dataset::{resolve_category, LoadedDataset};
use crate::error::{LimevisError, Result};
use crate::formats::{write_ppm, SuperpixelMapJson};
use crate::handle::{FeatureSource, PredictorHandle};
use crate::session::{execute_category, ExecuteOptions, Session};
use crate::wire::ConfigSpec;

pub const BOUNDARY_COLOR: [u8; 3] = [255, 255, 0];

#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub status: u16,
    pub body: Value,
}

impl Reply {
    fn ok(body: Value) -> Self {
        Reply { status: 200, body }
    }

    fn error(e: &LimevisError) -> Self {
        let status = if matches!(e, LimevisError::NoSession) { 409 } else { 400 };
        Reply { status, body: json!({"error_code": e.code(), "message": e.to_string()}) }
    }

    fn not_found() -> Self {
        Reply { status: 404, body: json!({"error_code": "NotFound", "message": "no such endpoint"}) }
    }
}

fn ppm_b64(image: &RgbImage) -> String {
    B64.encode(write_ppm(image))
}

pub fn boundary_overlay(image: &RgbImage, spmap: &limevis_core::SuperpixelMap) -> RgbImage {
    let mut out = image.clone();
    for (px, edge) in out.pixels_mut().iter_mut().zip(boundary_mask(spmap)) {
        if edge {
            *px = BOUNDARY_COLOR;
        }
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExecuteRequest {
    category: Value,
    #[serde(default)]
    config: ConfigSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ToggleRequest {
    x: Option<usize>,
    y: Option<usize>,
    superpixel_id: Option<usize>,
}

pub struct AppState {
    pub data: LoadedDataset,
    pub predictor: PredictorHandle,
    pub features: FeatureSource,
    session: RwLock<Option<Session>>,
    executing: Mutex<()>,
    session_id: AtomicU64,
}

impl AppState {
    pub fn new(data: LoadedDataset, predictor: PredictorHandle, features: FeatureSource) -> Self {
        AppState {
            data,
            predictor,
            features,
            session: RwLock::new(None),
            executing: Mutex::new(()),
            session_id: AtomicU64::new(0),
        }
    }

    /// Routes one request. `url` may carry a query string.
    pub fn handle(&self, method: &str, url: &str, body: &[u8]) -> Reply {
        let (path, query) = url.split_once('?').unwrap_or((url, ""));
        let parts: Vec<&str> = path.trim_matches('/').split('/').collect();
        let result = match (method, parts.as_slice()) {
            ("GET", ["api", "categories"]) => Ok(json!({"categories": self.data.dataset.category_names})),
            ("POST", ["api", "execute"]) => self.execute(body),
            ("GET", ["api", "overview"]) => self.overview(query),
            ("GET", ["api", "embedding"]) => self.embedding(),
            ("GET", ["api", "image", id, "detail"]) => parse_id(id).and_then(|id| self.detail(id)),
            ("POST", ["api", "image", id, "toggle"]) => parse_id(id).and_then(|id| self.toggle(id, body)),
            ("POST", ["api", "image", id, "reset"]) => parse_id(id).and_then(|id| self.reset(id)),
            _ => return Reply::not_found(),
        };
        match result {
            Ok(v) => Reply::ok(v),
            Err(e) => Reply::error(&e),
        }
    }

    fn read<T>(&self, f: impl FnOnce(&Session) -> Result<T>) -> Result<T> {
        let guard = self.session.read().unwrap();
        f(guard.as_ref().ok_or(LimevisError::NoSession)?)
    }

    fn write<T>(&self, f: impl FnOnce(&mut Session) -> Result<T>) -> Result<T> {
        let mut guard = self.session.write().unwrap();
        f(guard.as_mut().ok_or(LimevisError::NoSession)?)
    }

    fn execute(&self, body: &[u8]) -> Result<Value> {
        let req: ExecuteRequest = parse_body(body)?;
        let category = match &req.category {
            Value::String(s) => resolve_category(&self.data.dataset, s)?,
            Value::Number(n) => resolve_category(&self.data.dataset, &n.to_string())?,
            other => return Err(LimevisError::BadRequest(format!("category must be a name or index, got {other}"))),
        };
        let config = req.config.to_config()?;
        let _one_at_a_time = self.executing.lock().unwrap();
        let session = execute_category(
            &self.data.dataset,
            category,
            &config,
            &self.predictor,
            &self.features,
            &ExecuteOptions::default(),
        )?;
        let cells = cells_json(&session, |_| json!({}));
        let id = self.session_id.fetch_add(1, Ordering::SeqCst) + 1;
        *self.session.write().unwrap() = Some(session);
        Ok(json!({"session_id": id, "cells": cells}))
    }

    fn overview(&self, query: &str) -> Result<Value> {
        let mode = query
            .split('&')
            .find_map(|kv| kv.strip_prefix("mode="))
            .unwrap_or("original");
        let lime = match mode {
            "original" => false,
            "lime" => true,
            other => return Err(LimevisError::BadRequest(format!("unknown overview mode {other:?}"))),
        };
        self.read(|s| {
            Ok(json!({"mode": mode, "cells": cells_json(s, |id| {
                let e = &s.entries[id];
                json!({"ppm_b64": ppm_b64(if lime { &e.lime_image } else { &e.original })})
            })}))
        })
    }

    fn embedding(&self) -> Result<Value> {
        self.read(|s| {
            let points: Vec<Value> = s
                .entries
                .iter()
                .zip(&s.embedding)
                .map(|(e, [x, y])| json!({"image_id": e.image_id, "x": x, "y": y, "correct": e.correct}))
                .collect();
            Ok(json!({"points": points}))
        })
    }

    fn detail(&self, id: usize) -> Result<Value> {
        self.read(|s| {
            let e = s.entry(id)?;
            Ok(json!({
                "image_id": id,
                "original": ppm_b64(&e.original),
                "lime": ppm_b64(&e.lime_image),
                "boundary_overlay": ppm_b64(&boundary_overlay(&e.original, &e.spmap)),
                "spmap": SuperpixelMapJson::from(&e.spmap),
                "original_probs": e.explanation.original_probs.as_slice(),
                "class_names": self.predictor.class_names(),
                "predicted_class": e.predicted_class,
                "correct": e.correct,
                "weights": e.explanation.weights,
                "selected": e.explanation.selected,
                "toggle": s.toggle_state(id)?,
            }))
        })
    }

    fn toggle(&self, id: usize, body: &[u8]) -> Result<Value> {
        let req: ToggleRequest = parse_body(body)?;
        self.write(|s| {
            let sp = match (req.superpixel_id, req.x, req.y) {
                (Some(sp), None, None) => sp,
                (None, Some(x), Some(y)) => s.pixel_to_superpixel(id, x, y)?,
                _ => return Err(LimevisError::BadRequest("send either {x, y} or {superpixel_id}".into())),
            };
            let out = s.toggle_superpixel(&self.predictor, id, sp)?;
            Ok(json!({
                "superpixel_id": sp,
                "toggle": out.toggle,
                "ppm_b64": ppm_b64(&out.masked),
                "current_probs": out.current.as_slice(),
            }))
        })
    }

    fn reset(&self, id: usize) -> Result<Value> {
        self.write(|s| {
            let (toggle, probs) = s.reset_toggles(id)?;
            Ok(json!({"toggle": toggle, "current_probs": probs.as_slice()}))
        })
    }
}

fn parse_id(s: &str) -> Result<usize> {
    s.parse().map_err(|_| LimevisError::BadRequest(format!("bad image id {s:?}")))
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T> {
    let body = if body.iter().all(u8::is_ascii_whitespace) { b"{}".as_slice() } else { body };
    serde_json::from_slice(body).map_err(|e| LimevisError::BadRequest(format!("invalid JSON body: {e}")))
}

fn cells_json(s: &Session, extra: impl Fn(usize) -> Value) -> Vec<Value> {
    s.overview()
        .into_iter()
        .map(|c| {
            let mut v = json!({"image_id": c.image_id, "row": c.row, "col": c.col, "correct": c.correct});
            if let (Value::Object(m), Value::Object(more)) = (&mut v, extra(c.image_id)) {
                m.extend(more);
            }
            v
        })
        .collect()
}

/// A running server; dropping it does not stop it, call [`ServerHandle::shutdown`].
pub struct ServerHandle {
    server: Arc<Server>,
    workers: Vec<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.server.server_addr().to_ip().expect("tcp listener")
    }

    pub fn shutdown(self) {
        for _ in &self.workers {
            self.server.unblock();
        }
        for w in self.workers {
            let _ = w.join();
        }
    }

    pub fn join(self) {
        for w in self.workers {
            let _ = w.join();
        }
    }
}

/// Binds `addr` and serves on `threads` worker threads.
pub fn spawn(state: Arc<AppState>, addr: &str, threads: usize) -> Result<ServerHandle> {
    let server = Arc::new(Server::http(addr).map_err(|e| LimevisError::Io(std::io::Error::other(e.to_string())))?);
    let workers = (0..threads.max(1))
        .map(|_| {
            let server = Arc::clone(&server);
            let state = Arc::clone(&state);
            thread::spawn(move || {
                while let Ok(mut req) = server.recv() {
                    let mut body = Vec::new();
                    let reply = match req.as_reader().read_to_end(&mut body) {
                        Ok(_) => {
                            let method = match req.method() {
                                Method::Get => "GET",
                                Method::Post => "POST",
                                _ => "OTHER",
                            };
                            state.handle(method, req.url(), &body)
                        }
                        Err(e) => Reply::error(&LimevisError::Io(e)),
                    };
                    let response = Response::from_string(reply.body.to_string())
                        .with_status_code(reply.status)
                        .with_header(Header::from_bytes("Content-Type", "application/json").unwrap())
                        .with_header(Header::from_bytes("Access-Control-Allow-Origin", "*").unwrap());
                    let _ = req.respond(response);
                }
            })
        })
        .collect();
    Ok(ServerHandle { server, workers })
}
