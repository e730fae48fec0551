//! A minimal in-process HTTP server for crawler tests.
//!
//! Serves a fixed route table over real TCP on an ephemeral port and
//! records every request it sees. One request per connection; the accept
//! loop runs on a detached thread that dies with the test process.
//!
//! Compiled separately into every integration-test target, so not every
//! target uses every helper.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};

pub struct Route {
    pub status: u16,
    pub content_type: &'static str,
    pub body: String,
}

impl Route {
    /// A 200 text/html response.
    pub fn html(body: &str) -> Route {
        Route {
            status: 200,
            content_type: "text/html; charset=utf-8",
            body: body.to_string(),
        }
    }

    /// A bodyless response with the given status.
    pub fn status(status: u16) -> Route {
        Route {
            status,
            content_type: "text/plain",
            body: String::new(),
        }
    }

    /// A 200 response with an arbitrary content type.
    pub fn typed(content_type: &'static str, body: &str) -> Route {
        Route {
            status: 200,
            content_type,
            body: body.to_string(),
        }
    }
}

/// One observed request.
#[derive(Debug, Clone)]
pub struct Hit {
    pub path: String,
    pub user_agent: String,
}

pub struct TestServer {
    port: u16,
    hits: Arc<Mutex<Vec<Hit>>>,
}

impl TestServer {
    pub fn start(routes: BTreeMap<String, Route>) -> TestServer {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind an ephemeral port");
        let port = listener.local_addr().expect("local address").port();
        let hits: Arc<Mutex<Vec<Hit>>> = Arc::new(Mutex::new(Vec::new()));
        let recorded = Arc::clone(&hits);
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(mut stream) = stream else { continue };
                let mut reader = BufReader::new(&mut stream);
                let mut request_line = String::new();
                if reader.read_line(&mut request_line).is_err() || request_line.is_empty() {
                    continue;
                }
                let mut user_agent = String::new();
                loop {
                    let mut line = String::new();
                    match reader.read_line(&mut line) {
                        Ok(0) => break,
                        Ok(_) if line == "\r\n" || line == "\n" => break,
                        Ok(_) => {
                            if let Some(value) = line
                                .strip_prefix("user-agent:")
                                .or_else(|| line.strip_prefix("User-Agent:"))
                            {
                                user_agent = value.trim().to_string();
                            }
                        }
                        Err(_) => break,
                    }
                }
                let path = request_line
                    .split_whitespace()
                    .nth(1)
                    .unwrap_or("/")
                    .to_string();
                recorded.lock().expect("hit log").push(Hit {
                    path: path.clone(),
                    user_agent,
                });
                let response = match routes.get(&path) {
                    Some(route) => format!(
                        "HTTP/1.1 {} {}\r\nContent-Type: {}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                        route.status,
                        reason(route.status),
                        route.content_type,
                        route.body.len(),
                        route.body
                    ),
                    None => {
                        "HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\nConnection: close\r\n\r\n"
                            .to_string()
                    }
                };
                let _ = stream.write_all(response.as_bytes());
                let _ = stream.flush();
            }
        });
        TestServer { port, hits }
    }

    /// Absolute URL for a path on this server.
    pub fn url(&self, path: &str) -> String {
        format!("http://127.0.0.1:{}{path}", self.port)
    }

    pub fn hits(&self) -> Vec<Hit> {
        self.hits.lock().expect("hit log").clone()
    }

    pub fn hit_paths(&self) -> Vec<String> {
        self.hits().into_iter().map(|h| h.path).collect()
    }

    pub fn hit_count(&self) -> usize {
        self.hits.lock().expect("hit log").len()
    }
}

fn reason(status: u16) -> &'static str {
    match status {
        200 => "OK",
        404 => "Not Found",
        500 => "Internal Server Error",
        _ => "Status",
    }
}
