//! Newline-delimited JSON access to environments.
//!
//! Every request is one JSON object with an `op` field and an optional `id`
//! that is echoed back. Responses carry `"v"`, the echoed `id` and either
//! the result fields or `{"error": {"code", "message"}}`.

use std::collections::HashMap;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{TcpListener, ToSocketAddrs};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use serde::Deserialize;
use serde_json::{json, Value};

use super::dataset::{DatasetRecord, FORMAT_VERSION};
use crate::axioms::AxiomSet;
use crate::env::{Action, Env, EnvConfig, EnvError};
use crate::generator::{generate_batch, GeneratorConfig, DEFAULT_MAX_RETRIES};

fn default_num() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum Request {
    Generate {
        #[serde(default)]
        axioms: Option<AxiomSet>,
        k: usize,
        l: usize,
        #[serde(default)]
        degree: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_num")]
        num: usize,
    },
    Reset {
        theorem: DatasetRecord,
    },
    Step {
        session: u64,
        action: Action,
    },
    ActionSpaceSize {
        session: u64,
    },
    Close {
        session: u64,
    },
}

struct Failure {
    code: &'static str,
    message: String,
}

impl Failure {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

/// Session table shared by every connection.
pub struct Server {
    config: EnvConfig,
    sessions: Mutex<HashMap<u64, Arc<Mutex<Env>>>>,
    next_session: AtomicU64,
}

impl Default for Server {
    fn default() -> Self {
        Server::new(EnvConfig::default())
    }
}

impl Server {
    pub fn new(config: EnvConfig) -> Self {
        Server { config, sessions: Mutex::new(HashMap::new()), next_session: AtomicU64::new(1) }
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session table lock").len()
    }

    fn session(&self, id: u64) -> Result<Arc<Mutex<Env>>, Failure> {
        self.sessions
            .lock()
            .expect("session table lock")
            .get(&id)
            .cloned()
            .ok_or_else(|| Failure::new("SESSION_NOT_FOUND", format!("no session {id}")))
    }

    fn dispatch(&self, req: Request) -> Result<Value, Failure> {
        match req {
            Request::Generate { axioms, k, l, degree, seed, num } => {
                let cfg = GeneratorConfig {
                    axiom_set: axioms.unwrap_or(AxiomSet::OrderedField),
                    k,
                    l,
                    degree,
                    seed,
                    max_retries: DEFAULT_MAX_RETRIES,
                };
                let theorems =
                    generate_batch(&cfg, num).map_err(|e| Failure::new("GENERATION_FAILED", e.to_string()))?;
                let records: Vec<DatasetRecord> = theorems.iter().map(DatasetRecord::from_theorem).collect();
                Ok(json!({ "records": records }))
            }
            Request::Reset { theorem } => {
                let mut env = Env::new(self.config.clone());
                let observation = env.reset(&theorem.to_theorem());
                let done = env.is_done();
                let reward = if done { env.reset_reward() } else { 0.0 };
                let id = self.next_session.fetch_add(1, Ordering::Relaxed);
                self.sessions.lock().expect("session table lock").insert(id, Arc::new(Mutex::new(env)));
                Ok(json!({ "session": id, "observation": observation, "reward": reward, "done": done }))
            }
            Request::Step { session, action } => {
                let env = self.session(session)?;
                let mut env = env.lock().expect("session lock");
                let t = env.step(&action).map_err(|e| match e {
                    EnvError::EpisodeFinished => Failure::new("EPISODE_FINISHED", e.to_string()),
                    EnvError::NotReset => Failure::new("SESSION_NOT_FOUND", e.to_string()),
                })?;
                Ok(json!({ "observation": t.observation, "reward": t.reward, "done": t.done, "info": t.info }))
            }
            Request::ActionSpaceSize { session } => {
                let env = self.session(session)?;
                let size = env.lock().expect("session lock").action_space_size().map_err(|e| {
                    Failure::new("SESSION_NOT_FOUND", e.to_string())
                })?;
                Ok(json!({ "size": size }))
            }
            Request::Close { session } => {
                let removed = self.sessions.lock().expect("session table lock").remove(&session);
                match removed {
                    Some(_) => Ok(json!({ "closed": session })),
                    None => Err(Failure::new("SESSION_NOT_FOUND", format!("no session {session}"))),
                }
            }
        }
    }

    /// Handles one request line and returns the response line (without a
    /// trailing newline).
    pub fn handle_line(&self, line: &str) -> String {
        let (id, result) = match serde_json::from_str::<Value>(line) {
            Err(e) => (Value::Null, Err(Failure::new("BAD_REQUEST", e.to_string()))),
            Ok(v) => {
                let id = v.get("id").cloned().unwrap_or(Value::Null);
                let result = match serde_json::from_value::<Request>(v) {
                    Ok(req) => self.dispatch(req),
                    Err(e) => Err(Failure::new("BAD_REQUEST", e.to_string())),
                };
                (id, result)
            }
        };
        let mut out = match result {
            Ok(Value::Object(body)) => body,
            Ok(other) => {
                let mut m = serde_json::Map::new();
                m.insert("result".into(), other);
                m
            }
            Err(f) => {
                let mut m = serde_json::Map::new();
                m.insert("error".into(), json!({ "code": f.code, "message": f.message }));
                m
            }
        };
        out.insert("v".into(), json!(FORMAT_VERSION));
        out.insert("id".into(), id);
        Value::Object(out).to_string()
    }
}

/// Answers each non-empty input line with one output line until EOF.
pub fn serve_lines<R: BufRead, W: Write>(server: &Server, reader: R, mut writer: W) -> io::Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(writer, "{}", server.handle_line(&line))?;
        writer.flush()?;
    }
    Ok(())
}

pub fn serve_stdio(server: &Server) -> io::Result<()> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    serve_lines(server, stdin.lock(), stdout.lock())
}

/// Serves every accepted connection on its own thread; sessions are shared.
pub fn serve_listener(listener: TcpListener, server: Arc<Server>) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let server = Arc::clone(&server);
        thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(s) => BufReader::new(s),
                Err(_) => return,
            };
            let _ = serve_lines(&server, reader, BufWriter::new(stream));
        });
    }
    Ok(())
}

pub fn serve_tcp<A: ToSocketAddrs>(addr: A, server: Arc<Server>) -> io::Result<()> {
    serve_listener(TcpListener::bind(addr)?, server)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(server: &Server, req: Value) -> Value {
        serde_json::from_str(&server.handle_line(&req.to_string())).unwrap()
    }

    #[test]
    fn malformed_and_unknown() {
        let s = Server::default();
        let r: Value = serde_json::from_str(&s.handle_line("{not json")).unwrap();
        assert_eq!(r["error"]["code"], "BAD_REQUEST");
        assert_eq!(r["v"], 1);
        let r = call(&s, json!({"op": "step", "id": 7, "session": 99, "action": {"axiom": "AC", "args": ["g0.l"]}}));
        assert_eq!(r["error"]["code"], "SESSION_NOT_FOUND");
        assert_eq!(r["id"], 7);
        let r = call(&s, json!({"op": "dance"}));
        assert_eq!(r["error"]["code"], "BAD_REQUEST");
    }

    #[test]
    fn generate_reset_step_close() {
        let s = Server::default();
        let r = call(&s, json!({"op": "generate", "axioms": "field", "k": 2, "l": 3, "seed": 1, "num": 2}));
        let records = r["records"].as_array().unwrap();
        assert_eq!(records.len(), 2);
        let rec: DatasetRecord = serde_json::from_value(records[0].clone()).unwrap();
        let r = call(&s, json!({"op": "reset", "theorem": rec}));
        let session = r["session"].as_u64().unwrap();
        assert_eq!(r["done"], false);
        let r = call(&s, json!({"op": "action_space_size", "session": session}));
        assert!(r["size"].as_u64().unwrap() > 0);
        let mut last = Value::Null;
        for step in &rec.proof {
            last = call(&s, json!({"op": "step", "session": session, "action": step}));
        }
        assert_eq!(last["done"], true);
        assert_eq!(last["reward"], 1.0);
        let r = call(&s, json!({"op": "step", "session": session, "action": rec.proof[0]}));
        assert_eq!(r["error"]["code"], "EPISODE_FINISHED");
        let r = call(&s, json!({"op": "close", "session": session}));
        assert_eq!(r["closed"], session);
        assert_eq!(s.session_count(), 0);
    }
}
