//! Minimal scripted HTTP/1.1 stub server for exercising the gateway
//! without network access.
//!
//! Shared by several test targets, each of which uses a different slice
//! of the helpers.
#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::thread::JoinHandle;
use std::time::Duration;

pub struct StubResponse {
    pub status: u16,
    pub body: String,
    pub delay: Option<Duration>,
}

impl StubResponse {
    pub fn ok(body: &str) -> Self {
        Self {
            status: 200,
            body: body.to_string(),
            delay: None,
        }
    }

    pub fn status(status: u16, body: &str) -> Self {
        Self {
            status,
            body: body.to_string(),
            delay: None,
        }
    }

    /// A well-formed chat completion whose first choice says `content`.
    pub fn completion(content: &str) -> Self {
        Self::ok(&format!(
            r#"{{"id":"stub","choices":[{{"index":0,"message":{{"role":"assistant","content":"{content}"}}}}]}}"#
        ))
    }
}

#[derive(Debug, Clone)]
pub struct ReceivedRequest {
    pub head: String,
    pub body: String,
}

impl ReceivedRequest {
    pub fn header(&self, name: &str) -> Option<String> {
        let prefix = format!("{}:", name.to_lowercase());
        self.head
            .lines()
            .find(|l| l.to_lowercase().starts_with(&prefix))
            .map(|l| l[name.len() + 1..].trim().to_string())
    }
}

pub struct StubServer {
    addr: SocketAddr,
    handle: JoinHandle<Vec<ReceivedRequest>>,
}

impl StubServer {
    /// Serve the scripted responses, one connection each, then stop.
    pub fn start(responses: Vec<StubResponse>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            let mut received = Vec::new();
            for response in responses {
                let (stream, _) = listener.accept().expect("accept");
                received.push(serve_one(stream, &response));
            }
            received
        });
        Self { addr, handle }
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Wait for all scripted exchanges and return what the client sent.
    pub fn finish(self) -> Vec<ReceivedRequest> {
        self.handle.join().expect("stub server thread")
    }
}

fn serve_one(mut stream: TcpStream, response: &StubResponse) -> ReceivedRequest {
    stream
        .set_read_timeout(Some(Duration::from_secs(5)))
        .unwrap();
    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    let header_end = loop {
        match stream.read(&mut chunk) {
            Ok(0) => break buf.len(),
            Ok(n) => {
                buf.extend_from_slice(&chunk[..n]);
                if let Some(pos) = find_header_end(&buf) {
                    break pos;
                }
            }
            Err(_) => break buf.len(),
        }
    };
    let head = String::from_utf8_lossy(&buf[..header_end]).to_string();
    let content_length = head
        .lines()
        .find(|l| l.to_lowercase().starts_with("content-length:"))
        .and_then(|l| l.split(':').nth(1))
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let body_start = (header_end + 4).min(buf.len());
    while buf.len() - body_start < content_length {
        match stream.read(&mut chunk) {
            Ok(0) => break,
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
            Err(_) => break,
        }
    }
    let body = String::from_utf8_lossy(&buf[body_start..]).to_string();

    if let Some(delay) = response.delay {
        std::thread::sleep(delay);
    }
    let reason = match response.status {
        200 => "OK",
        429 => "Too Many Requests",
        400 => "Bad Request",
        _ => "Error",
    };
    let payload = format!(
        "HTTP/1.1 {} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        response.status,
        reason,
        response.body.len(),
        response.body
    );
    let _ = stream.write_all(payload.as_bytes());
    let _ = stream.flush();
    ReceivedRequest { head, body }
}

fn find_header_end(buf: &[u8]) -> Option<usize> {
    buf.windows(4).position(|w| w == b"\r\n\r\n")
}
