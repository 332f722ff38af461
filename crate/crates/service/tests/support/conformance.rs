//! HTTP conformance checks against a running session server.

use std::collections::BTreeSet;
use std::time::Duration;

use futures::StreamExt;
use serde_json::{json, Value};

type Check = Result<(), String>;

fn fail<T>(m: impl Into<String>) -> Result<T, String> {
    Err(m.into())
}

/// Minimal server-sent-events reader over a streaming response.
pub struct SseReader {
    stream: futures::stream::BoxStream<'static, reqwest::Result<bytes::Bytes>>,
    buf: String,
}

impl SseReader {
    pub async fn open(client: &reqwest::Client, url: &str, last_id: Option<u64>) -> Result<SseReader, String> {
        let mut req = client.get(url).header("accept", "text/event-stream");
        if let Some(id) = last_id {
            req = req.header("last-event-id", id.to_string());
        }
        let resp = req.send().await.map_err(|e| e.to_string())?;
        if !resp.status().is_success() {
            return fail(format!("events: HTTP {}", resp.status()));
        }
        Ok(SseReader {
            stream: resp.bytes_stream().boxed(),
            buf: String::new(),
        })
    }

    /// Next event's JSON data, skipping keep-alive comments.
    pub async fn next(&mut self, wait: Duration) -> Result<Value, String> {
        loop {
            if let Some(end) = self.buf.find("\n\n") {
                let block: String = self.buf.drain(..end + 2).collect();
                let data: Vec<&str> = block
                    .lines()
                    .filter_map(|l| l.strip_prefix("data:"))
                    .map(str::trim_start)
                    .collect();
                if data.is_empty() {
                    continue;
                }
                return serde_json::from_str(&data.join("\n")).map_err(|e| e.to_string());
            }
            match tokio::time::timeout(wait, self.stream.next()).await {
                Err(_) => return fail("timed out waiting for an event"),
                Ok(None) => return fail("event stream closed"),
                Ok(Some(Err(e))) => return fail(e.to_string()),
                Ok(Some(Ok(chunk))) => self.buf.push_str(&String::from_utf8_lossy(&chunk).replace("\r\n", "\n")),
            }
        }
    }
}

pub struct Client {
    pub http: reqwest::Client,
    pub base: String,
}

impl Client {
    pub fn new(base: &str) -> Client {
        Client {
            http: reqwest::Client::new(),
            base: base.trim_end_matches('/').to_string(),
        }
    }

    pub async fn post(&self, path: &str, body: Value) -> Result<(u16, Value), String> {
        let r = self
            .http
            .post(format!("{}{path}", self.base))
            .json(&body)
            .send()
            .await
            .map_err(|e| e.to_string())?;
        let status = r.status().as_u16();
        Ok((status, r.json().await.map_err(|e| e.to_string())?))
    }

    pub async fn get(&self, path: &str) -> Result<(u16, Value), String> {
        let r = self
            .http
            .get(format!("{}{path}", self.base))
            .send()
            .await
            .map_err(|e| e.to_string())?;
        let status = r.status().as_u16();
        Ok((status, r.json().await.map_err(|e| e.to_string())?))
    }

    pub async fn create(&self, body: Value) -> Result<Value, String> {
        match self.post("/sessions", body).await? {
            (201, snap) => Ok(snap),
            (s, b) => fail(format!("create: HTTP {s} {b}")),
        }
    }

    pub async fn state(&self, id: &str) -> Result<Value, String> {
        match self.get(&format!("/sessions/{id}")).await? {
            (200, snap) => Ok(snap),
            (s, b) => fail(format!("state: HTTP {s} {b}")),
        }
    }

    /// Polls until the human is to move or the game is over.
    pub async fn await_turn(&self, id: &str) -> Result<Value, String> {
        for _ in 0..2000 {
            let snap = self.state(id).await?;
            if snap["game_over"] == true || snap["engine_thinking"] == false {
                return Ok(snap);
            }
            tokio::time::sleep(Duration::from_millis(10)).await;
        }
        fail("engine never replied")
    }

    pub async fn submit(&self, id: &str, mv: &str) -> Result<(u16, Value), String> {
        self.post(&format!("/sessions/{id}/moves"), json!({ "move": mv })).await
    }
}

/// Pawn moves only, so the game cannot repeat.
const SCRIPT: [&str; 10] = [
    "d2-d3", "e2-e3", "a2-a3", "h2-h3", "c2-c3", "b2-b4", "a3-a4", "h3-h4", "b4-b5", "c3-c4",
];

/// The scripted move when it is legal, else the first legal move.
fn pick_move(snap: &Value, i: usize) -> Result<String, String> {
    if snap["legal_moves"].as_array().into_iter().flatten().any(|m| m == SCRIPT[i]) {
        return Ok(SCRIPT[i].to_string());
    }
    snap["legal_moves"][0]
        .as_str()
        .map(String::from)
        .ok_or_else(|| format!("no legal move in {snap}"))
}

/// Creates a session, plays ten moves, checks an illegal move leaves the state untouched and
/// that the event stream stays gapless across a reconnect.
pub async fn run(base: &str) -> Check {
    let c = Client::new(base);
    let snap = c
        .create(json!({
            "variant": "STANDARD_8x8",
            "human_color": "white",
            "engine": { "kind": "builtin", "depth": 1 },
        }))
        .await?;
    let id = snap["id"].as_str().ok_or("no id")?.to_string();
    if snap["seq"] != 0 || snap["ply"] != 0 {
        return fail(format!("fresh session not at seq 0: {snap}"));
    }
    let events_url = format!("{}/sessions/{id}/events", c.base);
    let mut sse = SseReader::open(&c.http, &format!("{events_url}?from=0"), None).await?;

    let mut seen = Vec::new();
    let mut snap = snap;
    for i in 0..10 {
        let mv = pick_move(&snap, i)?;
        let (status, body) = c.submit(&id, &mv).await?;
        if status != 202 {
            return fail(format!("move {} {mv:?}: HTTP {status} {body}", i + 1));
        }
        snap = c.await_turn(&id).await?;
        if snap["game_over"] == true {
            return fail(format!("game ended after {} moves: {:?}", i + 1, snap["history"]));
        }
        if i == 4 {
            // Read part of the backlog, then drop the connection.
            for _ in 0..3 {
                seen.push(sse.next(Duration::from_secs(5)).await?);
            }
            drop(sse);
            sse = SseReader::open(&c.http, &events_url, Some(seen.last().unwrap()["seq"].as_u64().unwrap())).await?;
        }
    }
    if snap["ply"] != 20 {
        return fail(format!("expected 20 plies, snapshot has {}", snap["ply"]));
    }

    let before = c.state(&id).await?;
    let (status, body) = c.submit(&id, "Ng1-g3").await?;
    if status != 422 || body["code"] != "IllegalMove" {
        return fail(format!("illegal move answered HTTP {status} {body}"));
    }
    let after = c.state(&id).await?;
    if before != after {
        return fail("illegal move changed the session");
    }

    let last = after["seq"].as_u64().unwrap();
    while seen.last().map_or(0, |e| e["seq"].as_u64().unwrap()) < last {
        seen.push(sse.next(Duration::from_secs(5)).await?);
    }
    let seqs: Vec<u64> = seen.iter().map(|e| e["seq"].as_u64().unwrap()).collect();
    let unique: BTreeSet<u64> = seqs.iter().copied().collect();
    if unique.into_iter().collect::<Vec<_>>() != (1..=last).collect::<Vec<_>>() {
        return fail(format!("event seqs not gapless: {seqs:?}"));
    }
    if seqs.windows(2).any(|w| w[1] != w[0] + 1) {
        return fail(format!("duplicate or reordered events after reconnect: {seqs:?}"));
    }
    let applied = seen.iter().filter(|e| e["kind"] == "MoveApplied").count();
    if applied != 20 {
        return fail(format!("{applied} MoveApplied events for 20 plies"));
    }
    Ok(())
}
