mod common;

use std::sync::Arc;
use std::thread;
use std::time::Duration;

use common::random_image;
use limevis::external::{Endpoint, ExternalExtractor, ExternalPredictor};
use limevis::responder::{EchoMode, Responder};
use limevis_core::{Error, Predictor, RgbImage};

fn echo(mode: &str, classes: usize) -> Endpoint {
    Endpoint::Command(format!("{} --mode {mode} --classes {classes}", env!("CARGO_BIN_EXE_limevis-echo")))
}

fn brightness(img: &RgbImage) -> f64 {
    let b = img.to_rgb_bytes();
    b.iter().map(|&v| v as f64).sum::<f64>() / b.len() as f64 / 255.0
}

fn is_failure<T: std::fmt::Debug>(r: limevis_core::Result<T>) -> bool {
    matches!(r, Err(Error::ExternalPredictorFailure(_)))
}

#[test]
fn handshake_and_verbatim_probabilities() {
    let p = ExternalPredictor::connect(echo("first", 4)).unwrap();
    assert_eq!(p.class_count(), 4);
    assert_eq!(p.class_names(), ["class_0", "class_1", "class_2", "class_3"]);
    let probs = p.predict(&random_image(8, 8, 1)).unwrap();
    assert_eq!(probs.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    assert!(p.predict_batch(&[]).unwrap().is_empty());
}

#[test]
fn pixels_survive_the_wire() {
    let p = ExternalPredictor::connect(echo("brightness", 3)).unwrap();
    let images: Vec<RgbImage> = (0..20).map(|s| random_image(7 + s as usize, 5, s)).collect();
    let out = p.predict_batch(&images).unwrap();
    for (img, probs) in images.iter().zip(&out) {
        assert!((probs.get(0) - brightness(img)).abs() < 1e-12);
    }
}

#[test]
fn bad_sum_is_a_failure() {
    let p = ExternalPredictor::connect(echo("bad-sum", 10)).unwrap();
    assert!(is_failure(p.predict(&random_image(4, 4, 0))));
    assert!(is_failure(p.predict_batch(&[random_image(4, 4, 0), random_image(4, 4, 1)])));
}

const HELLO: &str = r#"echo '{"class_count":2,"class_names":["a","b"]}'"#;

#[test]
fn malformed_replies_are_failures() {
    let cases = [
        format!("read l; {HELLO}; read l; echo 'not json'"),
        format!(r#"read l; {HELLO}; read l; echo '{{"id":999,"probs":[0.5,0.5]}}'"#),
        format!(r#"read l; {HELLO}; read l; echo '{{"id":0,"probs":[1.0]}}'"#),
        format!(r#"read l; {HELLO}; read l; echo '{{"id":0,"probs":[1.5,-0.5]}}'"#),
        format!("read l; {HELLO}"),
    ];
    for cmd in cases {
        let p = ExternalPredictor::connect(Endpoint::Command(cmd.clone())).unwrap();
        assert!(is_failure(p.predict(&random_image(2, 2, 0))), "{cmd}");
    }
}

#[test]
fn bad_handshakes_are_rejected() {
    for cmd in [
        "read l; echo '{}'".to_string(),
        r#"read l; echo '{"class_count":3,"class_names":["a"]}'"#.to_string(),
        "exit 0".to_string(),
    ] {
        let r = ExternalPredictor::connect(Endpoint::Command(cmd.clone()));
        assert!(r.as_ref().is_err_and(|e| e.is_predictor_failure()), "{cmd}");
    }
}

#[test]
fn silent_responder_times_out() {
    let cmd = format!("read l; {HELLO}; sleep 30");
    let p = ExternalPredictor::connect_with(Endpoint::Command(cmd), Duration::from_millis(300), 1).unwrap();
    let start = std::time::Instant::now();
    assert!(is_failure(p.predict(&random_image(2, 2, 0))));
    assert!(start.elapsed() < Duration::from_secs(10));
}

#[test]
fn parallel_connections_agree_with_serial() {
    let serial = ExternalPredictor::connect(echo("brightness", 2)).unwrap();
    let pooled = Arc::new(ExternalPredictor::connect_with(echo("brightness", 2), Duration::from_secs(30), 3).unwrap());
    let images: Vec<RgbImage> = (0..12).map(|s| random_image(6, 6, s)).collect();
    let expect = serial.predict_batch(&images).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let p = Arc::clone(&pooled);
            let imgs = images.clone();
            thread::spawn(move || p.predict_batch(&imgs).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), expect);
    }
}

fn http_responder(responder: Responder) -> (String, Arc<tiny_http::Server>) {
    let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").unwrap());
    let addr = server.server_addr().to_ip().unwrap();
    let s = Arc::clone(&server);
    thread::spawn(move || {
        while let Ok(mut req) = s.recv() {
            assert_eq!(req.url(), "/predict");
            let mut body = String::new();
            req.as_reader().read_to_string(&mut body).unwrap();
            let _ = req.respond(tiny_http::Response::from_string(responder.reply(&body)));
        }
    });
    (format!("http://{addr}"), server)
}

#[test]
fn http_transport() {
    let (url, server) = http_responder(Responder { classes: 3, mode: EchoMode::Brightness });
    let p = ExternalPredictor::connect(Endpoint::Url(url.clone())).unwrap();
    assert_eq!(p.class_count(), 3);
    let img = random_image(9, 9, 4);
    assert!((p.predict(&img).unwrap().get(0) - brightness(&img)).abs() < 1e-12);
    server.unblock();

    let (bad_url, bad) = http_responder(Responder { classes: 3, mode: EchoMode::BadSum });
    let p = ExternalPredictor::connect(Endpoint::Url(format!("{bad_url}/predict"))).unwrap();
    assert!(is_failure(p.predict(&img)));
    bad.unblock();
}

#[test]
fn unreachable_url_fails() {
    let r = ExternalPredictor::connect_with(Endpoint::Url("http://127.0.0.1:9".into()), Duration::from_secs(2), 1);
    assert!(r.is_err_and(|e| e.is_predictor_failure()));
}

#[test]
fn external_features() {
    let x = ExternalExtractor::connect(echo("features", 2)).unwrap();
    let img = RgbImage::filled(3, 3, [255, 0, 51]);
    let f = x.extract(&[img]).unwrap();
    assert_eq!(f.len(), 1);
    assert!((f[0][0] - 1.0).abs() < 1e-12 && f[0][1] == 0.0 && (f[0][2] - 0.2).abs() < 1e-12);
    // A probability responder is not a feature extractor.
    let wrong = ExternalExtractor::connect(echo("first", 2)).unwrap();
    assert!(wrong.extract(&[RgbImage::filled(2, 2, [0, 0, 0])]).is_err());
}
