//! `eth_getLogs` fetcher over JSON-RPC 2.0 / HTTP.

use std::collections::HashMap;
use std::time::Duration;

use serde_json::{Value, json};
use thiserror::Error;

use super::decode::{RawLogEvent, erc1155_batch_topic, erc1155_single_topic, erc721_transfer_topic};
use super::files::LogObject;
use super::hexfmt::{format_quantity, parse_quantity};
use crate::types::lower_hex_b256;

#[derive(Debug, Clone)]
pub struct RpcConfig {
    pub endpoint: String,
    pub from_block: u64,
    pub to_block: u64,
    /// Blocks per `eth_getLogs` window.
    pub chunk: u64,
    pub max_retries: u32,
    pub backoff_base: Duration,
    pub backoff_cap: Duration,
    pub request_timeout: Duration,
}

impl RpcConfig {
    pub fn new(endpoint: impl Into<String>, from_block: u64, to_block: u64, chunk: u64) -> Self {
        RpcConfig {
            endpoint: endpoint.into(),
            from_block,
            to_block,
            chunk,
            max_retries: 5,
            backoff_base: Duration::from_millis(250),
            backoff_cap: Duration::from_secs(8),
            request_timeout: Duration::from_secs(60),
        }
    }
}

#[derive(Debug, Error)]
pub enum RpcError {
    #[error("invalid fetch request: {0}")]
    Precondition(String),
    #[error("endpoint unreachable after {attempts} attempts: {message}")]
    Network { attempts: u32, message: String },
    #[error("rpc error {code}: {message}")]
    Rpc { code: i64, message: String },
    #[error("provider rejects even a single-block window at block {block}: {message}")]
    WindowExhausted { block: u64, message: String },
    #[error("malformed rpc response: {0}")]
    Malformed(String),
}

enum CallError {
    Transient(String),
    Rpc { code: i64, message: String },
    Malformed(String),
}

/// Provider errors that mean "narrow the block range and try again".
fn is_response_too_large(code: i64, message: &str) -> bool {
    let m = message.to_ascii_lowercase();
    code == -32005
        || ["too large", "too many", "more than", "exceed", "limit"]
            .iter()
            .any(|p| m.contains(p))
}

pub struct RpcFetcher {
    client: reqwest::blocking::Client,
    config: RpcConfig,
    timestamps: HashMap<u64, u64>,
    next_id: u64,
}

impl RpcFetcher {
    pub fn new(config: RpcConfig) -> Result<Self, RpcError> {
        if config.from_block > config.to_block {
            return Err(RpcError::Precondition(format!(
                "from_block {} > to_block {}",
                config.from_block, config.to_block
            )));
        }
        if config.chunk == 0 {
            return Err(RpcError::Precondition("chunk must be at least 1".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(config.request_timeout)
            .build()
            .map_err(|e| RpcError::Precondition(e.to_string()))?;
        Ok(RpcFetcher {
            client,
            config,
            timestamps: HashMap::new(),
            next_id: 1,
        })
    }

    fn call_once(&mut self, method: &str, params: &Value) -> Result<Value, CallError> {
        let id = self.next_id;
        self.next_id += 1;
        let body = json!({"jsonrpc": "2.0", "id": id, "method": method, "params": params});
        let resp = self
            .client
            .post(&self.config.endpoint)
            .json(&body)
            .send()
            .map_err(|e| CallError::Transient(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(CallError::Transient(format!("http status {status}")));
        }
        let v: Value = resp
            .json()
            .map_err(|e| CallError::Malformed(format!("{method}: {e}")))?;
        if let Some(err) = v.get("error") {
            return Err(CallError::Rpc {
                code: err.get("code").and_then(Value::as_i64).unwrap_or(0),
                message: err
                    .get("message")
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_string(),
            });
        }
        v.get("result")
            .cloned()
            .ok_or_else(|| CallError::Malformed(format!("{method}: response without result")))
    }

    /// Retries transient failures with capped exponential backoff.
    fn call(&mut self, method: &str, params: Value) -> Result<Value, CallError> {
        let mut attempt = 0u32;
        loop {
            match self.call_once(method, &params) {
                Err(CallError::Transient(msg)) if attempt < self.config.max_retries => {
                    let delay = self
                        .config
                        .backoff_base
                        .saturating_mul(1u32 << attempt.min(16))
                        .min(self.config.backoff_cap);
                    tracing::warn!(method, attempt, ?delay, %msg, "transient rpc failure, retrying");
                    std::thread::sleep(delay);
                    attempt += 1;
                }
                Err(CallError::Transient(msg)) => {
                    return Err(CallError::Transient(format!("{msg} (after {} attempts)", attempt + 1)));
                }
                other => return other,
            }
        }
    }

    fn lift(&self, e: CallError) -> RpcError {
        match e {
            CallError::Transient(message) => RpcError::Network {
                attempts: self.config.max_retries + 1,
                message,
            },
            CallError::Rpc { code, message } => RpcError::Rpc { code, message },
            CallError::Malformed(m) => RpcError::Malformed(m),
        }
    }

    fn get_logs(&mut self, from: u64, to: u64) -> Result<Vec<LogObject>, CallError> {
        let topics = [erc721_transfer_topic(), erc1155_single_topic(), erc1155_batch_topic()]
            .iter()
            .map(lower_hex_b256)
            .collect::<Vec<_>>();
        let params = json!([{
            "fromBlock": format_quantity(from),
            "toBlock": format_quantity(to),
            "topics": [topics],
        }]);
        let result = self.call("eth_getLogs", params)?;
        serde_json::from_value(result).map_err(|e| CallError::Malformed(format!("eth_getLogs: {e}")))
    }

    pub fn block_timestamp(&mut self, block: u64) -> Result<u64, RpcError> {
        if let Some(t) = self.timestamps.get(&block) {
            return Ok(*t);
        }
        let result = self
            .call("eth_getBlockByNumber", json!([format_quantity(block), false]))
            .map_err(|e| self.lift(e))?;
        let ts = result
            .get("timestamp")
            .and_then(Value::as_str)
            .ok_or_else(|| RpcError::Malformed(format!("block {block} has no timestamp")))?;
        let ts = parse_quantity(ts).map_err(|e| RpcError::Malformed(e.to_string()))?;
        self.timestamps.insert(block, ts);
        Ok(ts)
    }

    /// Fetches every NFT transfer log in the configured range, ordered by
    /// `(block_number, log_index)`, with block timestamps attached.
    pub fn fetch(&mut self) -> Result<Vec<RawLogEvent>, RpcError> {
        let (first, last) = (self.config.from_block, self.config.to_block);
        let mut window = self.config.chunk;
        let mut start = first;
        let mut objects = Vec::new();
        while start <= last {
            let end = start.saturating_add(window - 1).min(last);
            match self.get_logs(start, end) {
                Ok(logs) => {
                    tracing::debug!(start, end, n = logs.len(), "fetched window");
                    objects.extend(logs);
                    if end == u64::MAX {
                        break;
                    }
                    start = end + 1;
                }
                Err(CallError::Rpc { code, message }) if is_response_too_large(code, &message) => {
                    if window == 1 {
                        return Err(RpcError::WindowExhausted { block: start, message });
                    }
                    window = (window / 2).max(1);
                    tracing::info!(window, "provider rejected window, halving");
                }
                Err(e) => return Err(self.lift(e)),
            }
        }
        let mut events = Vec::with_capacity(objects.len());
        for obj in objects {
            let block = obj
                .block_number
                .value()
                .map_err(|e| RpcError::Malformed(e.to_string()))?;
            let ts = match &obj.timestamp {
                Some(q) => q.value().map_err(|e| RpcError::Malformed(e.to_string()))?,
                None => self.block_timestamp(block)?,
            };
            events.push(obj.to_event(Some(ts)).map_err(RpcError::Malformed)?);
        }
        events.sort_by_key(|e| (e.block_number, e.log_index));
        Ok(events)
    }

    pub fn cached_timestamps(&self) -> usize {
        self.timestamps.len()
    }
}

/// One-shot fetch of `[from_block, to_block]`.
pub fn fetch_logs_rpc(config: RpcConfig) -> Result<Vec<RawLogEvent>, RpcError> {
    RpcFetcher::new(config)?.fetch()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_large_classification() {
        assert!(is_response_too_large(-32005, "whatever"));
        assert!(is_response_too_large(-32000, "query returned more than 10000 results"));
        assert!(is_response_too_large(-32602, "Log response size exceeded"));
        assert!(!is_response_too_large(-32601, "method not found"));
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            RpcFetcher::new(RpcConfig::new("http://127.0.0.1:1", 5, 4, 10)),
            Err(RpcError::Precondition(_))
        ));
        assert!(matches!(
            RpcFetcher::new(RpcConfig::new("http://127.0.0.1:1", 1, 4, 0)),
            Err(RpcError::Precondition(_))
        ));
    }
}
