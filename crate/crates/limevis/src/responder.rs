//! Reference implementation of the responder side of the external protocol.
//! Used by `limevis-echo` and by the test suites.

use std::io::{BufRead, Write};

use serde_json::{json, Value};

use crate::external::decode_request;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EchoMode {
    /// `[1, 0, ..., 0]` for every image.
    First,
    /// Class 0 gets the mean byte value / 255, class 1 the rest.
    Brightness,
    /// Uniform probabilities summing to 0.8.
    BadSum,
    /// Replies with `features`: mean R, G, B / 255.
    Features,
}

impl std::str::FromStr for EchoMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "first" => Ok(EchoMode::First),
            "brightness" => Ok(EchoMode::Brightness),
            "bad-sum" => Ok(EchoMode::BadSum),
            "features" => Ok(EchoMode::Features),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Responder {
    pub classes: usize,
    pub mode: EchoMode,
}

impl Responder {
    pub fn reply(&self, line: &str) -> String {
        if serde_json::from_str::<Value>(line).ok().and_then(|v| v.get("hello").cloned()) == Some(json!(true)) {
            let names: Vec<String> = (0..self.classes).map(|i| format!("class_{i}")).collect();
            return json!({"class_count": self.classes, "class_names": names}).to_string();
        }
        let (id, image) = match decode_request(line) {
            Ok(r) => r,
            Err(e) => return json!({"error": e.to_string()}).to_string(),
        };
        let bytes = image.to_rgb_bytes();
        let c = self.classes;
        match self.mode {
            EchoMode::First => {
                let mut p = vec![0.0; c];
                p[0] = 1.0;
                json!({"id": id, "probs": p}).to_string()
            }
            EchoMode::Brightness => {
                let mean = bytes.iter().map(|&b| b as f64).sum::<f64>() / bytes.len() as f64 / 255.0;
                let mut p = vec![0.0; c];
                p[0] = mean;
                p[1 % c] += 1.0 - mean;
                json!({"id": id, "probs": p}).to_string()
            }
            EchoMode::BadSum => json!({"id": id, "probs": vec![0.8 / c as f64; c]}).to_string(),
            EchoMode::Features => {
                let mut f = [0.0; 3];
                for px in image.pixels() {
                    for k in 0..3 {
                        f[k] += px[k] as f64 / 255.0;
                    }
                }
                let n = image.len() as f64;
                json!({"id": id, "features": f.map(|v| v / n)}).to_string()
            }
        }
    }

    /// Serves requests line by line until `input` ends.
    pub fn serve_lines(&self, input: impl BufRead, mut output: impl Write) -> std::io::Result<()> {
        for line in input.lines() {
            writeln!(output, "{}", self.reply(&line?))?;
            output.flush()?;
        }
        Ok(())
    }
}
