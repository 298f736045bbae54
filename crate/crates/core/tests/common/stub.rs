//! One-connection-per-reply HTTP server for endpoint client tests.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::mpsc;
use std::thread::JoinHandle;

pub enum Reply {
    /// 200 with the request's user message echoed as the completion.
    Echo,
    Status(u16, String),
}

pub struct Request {
    pub path: String,
    pub authorization: Option<String>,
    pub body: serde_json::Value,
}

pub struct Stub {
    pub base_url: String,
    pub requests: mpsc::Receiver<Request>,
    handle: JoinHandle<()>,
}

impl Stub {
    /// Serves `replies` in order, one per connection, then stops.
    pub fn start(replies: Vec<Reply>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let base_url = format!("http://{}/v1", listener.local_addr().unwrap());
        let (tx, requests) = mpsc::channel();
        let handle = std::thread::spawn(move || {
            for reply in replies {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let path = line.split_whitespace().nth(1).unwrap_or("").to_string();
                let mut length = 0;
                let mut authorization = None;
                loop {
                    line.clear();
                    reader.read_line(&mut line).unwrap();
                    let l = line.trim_end();
                    if l.is_empty() {
                        break;
                    }
                    let (name, value) = l.split_once(':').unwrap();
                    match name.to_ascii_lowercase().as_str() {
                        "content-length" => length = value.trim().parse().unwrap(),
                        "authorization" => authorization = Some(value.trim().to_string()),
                        _ => {}
                    }
                }
                let mut body = vec![0; length];
                reader.read_exact(&mut body).unwrap();
                let body: serde_json::Value = serde_json::from_slice(&body).unwrap();
                let (status, payload) = match reply {
                    Reply::Echo => {
                        let prompt = body["messages"][0]["content"].as_str().unwrap_or("").to_string();
                        let payload = serde_json::json!({"choices": [{"message": {"role": "assistant", "content": prompt}}]});
                        (200, payload.to_string())
                    }
                    Reply::Status(code, text) => (code, text),
                };
                let _ = tx.send(Request {
                    path,
                    authorization,
                    body,
                });
                let mut stream = stream;
                let head = format!(
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                    payload.len()
                );
                stream.write_all(head.as_bytes()).unwrap();
                stream.write_all(payload.as_bytes()).unwrap();
            }
        });
        Self {
            base_url,
            requests,
            handle,
        }
    }

    pub fn finish(self) -> Vec<Request> {
        self.handle.join().unwrap();
        self.requests.try_iter().collect()
    }
}
