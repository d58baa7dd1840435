//! Test support: a tiny HTTP/1.1 server standing in for an OpenAI-compatible
//! chat endpoint. Replies are scripted in order; once the script runs out the
//! fallback reply is used for every further request.

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct Hit {
    pub at: Instant,
    pub path: String,
    pub authorization: Option<String>,
    pub body: String,
}

#[derive(Debug, Clone)]
pub struct Reply {
    pub status: u16,
    pub body: String,
}

impl Reply {
    pub fn ok(content: &str) -> Self {
        Self { status: 200, body: completion(content) }
    }

    pub fn status(status: u16) -> Self {
        Self { status, body: format!("{{\"error\":{{\"message\":\"status {status}\"}}}}") }
    }
}

/// An OpenAI-style chat-completion body whose message content is `content`.
pub fn completion(content: &str) -> String {
    serde_json::json!({
        "id": "cmpl-mock",
        "object": "chat.completion",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}],
    })
    .to_string()
}

pub struct MockServer {
    pub base_url: String,
    hits: Arc<Mutex<Vec<Hit>>>,
}

impl MockServer {
    pub fn start(script: Vec<Reply>, fallback: Reply) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind mock server");
        let base_url = format!("http://{}/v1", listener.local_addr().unwrap());
        let hits = Arc::new(Mutex::new(Vec::new()));
        let script = Arc::new(Mutex::new(VecDeque::from(script)));
        let log = Arc::clone(&hits);
        std::thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let (log, script, fallback) = (Arc::clone(&log), Arc::clone(&script), fallback.clone());
                std::thread::spawn(move || {
                    let _ = serve(stream, &log, &script, &fallback);
                });
            }
        });
        Self { base_url, hits }
    }

    pub fn hits(&self) -> Vec<Hit> {
        self.hits.lock().unwrap().clone()
    }
}

fn serve(stream: TcpStream, log: &Mutex<Vec<Hit>>, script: &Mutex<VecDeque<Reply>>, fallback: &Reply) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let path = request_line.split_whitespace().nth(1).unwrap_or_default().to_owned();
    let mut length = 0usize;
    let mut authorization = None;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 || line == "\r\n" {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            let value = value.trim().to_owned();
            match name.trim().to_ascii_lowercase().as_str() {
                "content-length" => length = value.parse().unwrap_or(0),
                "authorization" => authorization = Some(value),
                _ => {}
            }
        }
    }
    let mut body = vec![0u8; length];
    reader.read_exact(&mut body)?;
    let hit = Hit { at: Instant::now(), path, authorization, body: String::from_utf8_lossy(&body).into_owned() };
    // Pick the reply and log the hit under one lock so order matches arrival.
    let reply = {
        let mut hits = log.lock().unwrap();
        hits.push(hit);
        script.lock().unwrap().pop_front().unwrap_or_else(|| fallback.clone())
    };
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {} MOCK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        reply.status,
        reply.body.len(),
        reply.body
    )?;
    stream.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post(url: &str, body: &str) -> String {
        let addr = url.trim_start_matches("http://").split('/').next().unwrap();
        let mut s = TcpStream::connect(addr).unwrap();
        write!(
            s,
            "POST /v1/chat/completions HTTP/1.1\r\nHost: {addr}\r\nAuthorization: Bearer k\r\nContent-Length: {}\r\n\r\n{body}",
            body.len()
        )
        .unwrap();
        let mut out = String::new();
        s.read_to_string(&mut out).unwrap();
        out
    }

    #[test]
    fn replies_follow_the_script_then_the_fallback() {
        let server = MockServer::start(vec![Reply::status(429)], Reply::ok("fine"));
        assert!(post(&server.base_url, "{}").starts_with("HTTP/1.1 429"));
        let second = post(&server.base_url, "{\"a\":1}");
        assert!(second.starts_with("HTTP/1.1 200") && second.contains("fine"));
        let hits = server.hits();
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[1].body, "{\"a\":1}");
        assert_eq!(hits[0].authorization.as_deref(), Some("Bearer k"));
        assert_eq!(hits[0].path, "/v1/chat/completions");
    }
}
