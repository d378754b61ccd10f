//! Discogs master-release fetching with an on-disk response cache and a
//! sliding-window rate limiter.
//!
//! The HTTP transport and the clock are injected so the whole pipeline can be
//! driven from canned payloads.

use std::collections::{HashSet, VecDeque};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::ingest::{AssociationRecord, Dataset, MAX_YEAR, MIN_YEAR};

pub const TOKEN_ENV: &str = "DISCOGS_TOKEN";
pub const DEFAULT_BASE_URL: &str = "https://api.discogs.com";
pub const MAIN_ARTIST_ROLE: &str = "Main Artist";
pub const MAX_ATTEMPTS: u32 = 3;
const USER_AGENT: &str = concat!("collabnet/", env!("CARGO_PKG_VERSION"));
const WINDOW: Duration = Duration::from_secs(60);

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("invalid fetch configuration: {0}")]
    Config(String),
    #[error("the API requires authentication; set {TOKEN_ENV} or pass a token")]
    MissingAuth,
    #[error("cache directory {path}: {source}")]
    Cache {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct FetchPlan {
    pub release_ids: Vec<String>,
    pub cache_dir: PathBuf,
    pub requests_per_minute: u32,
    pub auth_token: Option<String>,
}

impl FetchPlan {
    /// The explicit token, else a non-empty `DISCOGS_TOKEN`.
    pub fn resolved_token(&self) -> Option<String> {
        self.auth_token
            .clone()
            .or_else(|| std::env::var(TOKEN_ENV).ok())
            .filter(|t| !t.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

pub trait Transport {
    /// Performs one GET. `Err` means the request itself failed (DNS, timeout, ...).
    fn get(&mut self, url: &str, token: Option<&str>) -> Result<HttpResponse, String>;
}

pub trait Clock {
    /// Monotonic time since an arbitrary origin.
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock {
            origin: Instant::now(),
        }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// At most `per_minute` acquisitions in any 60-second window.
#[derive(Debug)]
pub struct RateLimiter {
    per_minute: usize,
    recent: VecDeque<Duration>,
}

impl RateLimiter {
    pub fn new(per_minute: u32) -> Self {
        RateLimiter {
            per_minute: per_minute.max(1) as usize,
            recent: VecDeque::new(),
        }
    }

    /// Blocks (via `clock`) until a request may be sent, then records it.
    pub fn acquire(&mut self, clock: &dyn Clock) -> Duration {
        loop {
            let now = clock.now();
            while let Some(&t) = self.recent.front() {
                if now >= t + WINDOW {
                    self.recent.pop_front();
                } else {
                    break;
                }
            }
            if self.recent.len() < self.per_minute {
                self.recent.push_back(now);
                return now;
            }
            let oldest = *self.recent.front().expect("window is full");
            clock.sleep(oldest + WINDOW - now);
        }
    }
}

/// Blocking HTTPS transport.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl Default for HttpTransport {
    fn default() -> Self {
        let config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(30)))
            .user_agent(USER_AGENT)
            .build();
        HttpTransport {
            agent: config.into(),
        }
    }
}

impl Transport for HttpTransport {
    fn get(&mut self, url: &str, token: Option<&str>) -> Result<HttpResponse, String> {
        let mut request = self.agent.get(url);
        if let Some(token) = token {
            request = request.header("Authorization", &format!("Discogs token={token}"));
        }
        let mut response = request.call().map_err(|e| e.to_string())?;
        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| e.to_string())?;
        Ok(HttpResponse { status, body })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FetchFailure {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FetchReport {
    pub fetched: usize,
    pub cache_hits: usize,
    pub failures: Vec<FetchFailure>,
    /// Network requests issued, retries included.
    pub requests: usize,
}

pub struct Fetcher<'a> {
    pub transport: &'a mut dyn Transport,
    pub clock: &'a dyn Clock,
    pub base_url: String,
}

impl<'a> Fetcher<'a> {
    pub fn new(transport: &'a mut dyn Transport, clock: &'a dyn Clock) -> Self {
        Fetcher {
            transport,
            clock,
            base_url: DEFAULT_BASE_URL.to_string(),
        }
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id != "."
        && id != ".."
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

fn cache_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}

fn prepare_cache_dir(dir: &Path) -> Result<(), FetchError> {
    let wrap = |source| FetchError::Cache {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(wrap)?;
    let probe = dir.join(".write-probe");
    fs::File::create(&probe).map_err(wrap)?;
    fs::remove_file(&probe).map_err(wrap)?;
    Ok(())
}

/// Write-then-rename so a cache file is either complete or absent.
fn write_atomic(path: &Path, body: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(body.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

enum Outcome {
    Body(String),
    Failed(String),
}

impl Fetcher<'_> {
    fn download(
        &mut self,
        id: &str,
        token: Option<&str>,
        limiter: &mut RateLimiter,
        report: &mut FetchReport,
    ) -> Result<Outcome, FetchError> {
        let url = format!("{}/masters/{}", self.base_url.trim_end_matches('/'), id);
        let mut last = String::new();
        for attempt in 0..MAX_ATTEMPTS {
            if attempt > 0 {
                self.clock.sleep(Duration::from_secs(1 << attempt));
            }
            limiter.acquire(self.clock);
            report.requests += 1;
            match self.transport.get(&url, token) {
                Ok(resp) => match resp.status {
                    200..=299 => return Ok(Outcome::Body(resp.body)),
                    404 => return Ok(Outcome::Failed("not found".into())),
                    401 | 403 if token.is_none() => return Err(FetchError::MissingAuth),
                    401 | 403 => return Ok(Outcome::Failed("unauthorized".into())),
                    429 | 500..=599 => last = format!("http {}", resp.status),
                    s => return Ok(Outcome::Failed(format!("http {s}"))),
                },
                Err(e) => last = format!("transport: {e}"),
            }
        }
        Ok(Outcome::Failed(format!("{last} after {MAX_ATTEMPTS} attempts")))
    }

    /// Fetches every id in the plan, serving cached responses from disk.
    ///
    /// Per-release problems are collected in the report; only configuration
    /// and cache-directory problems abort the run.
    pub fn fetch_releases(&mut self, plan: &FetchPlan) -> Result<(Dataset, FetchReport), FetchError> {
        if plan.requests_per_minute == 0 {
            return Err(FetchError::Config("requests_per_minute must be at least 1".into()));
        }
        prepare_cache_dir(&plan.cache_dir)?;
        let token = plan.resolved_token();
        let mut limiter = RateLimiter::new(plan.requests_per_minute);
        let mut report = FetchReport::default();
        let mut records = Vec::new();

        for id in &plan.release_ids {
            let fail = |report: &mut FetchReport, reason: String| {
                report.failures.push(FetchFailure {
                    id: id.clone(),
                    reason,
                })
            };
            if !valid_id(id) {
                fail(&mut report, "invalid id".into());
                continue;
            }
            let path = cache_path(&plan.cache_dir, id);
            let body = if path.is_file() {
                match fs::read_to_string(&path) {
                    Ok(body) => {
                        report.cache_hits += 1;
                        body
                    }
                    Err(e) => {
                        fail(&mut report, format!("unreadable cache file: {e}"));
                        continue;
                    }
                }
            } else {
                match self.download(id, token.as_deref(), &mut limiter, &mut report)? {
                    Outcome::Body(body) => {
                        write_atomic(&path, &body).map_err(|source| FetchError::Cache {
                            path: path.clone(),
                            source,
                        })?;
                        report.fetched += 1;
                        body
                    }
                    Outcome::Failed(reason) => {
                        fail(&mut report, reason);
                        continue;
                    }
                }
            };
            match parse_release_payload(id, &body) {
                Ok(mut rows) => records.append(&mut rows),
                Err(reason) => fail(&mut report, format!("malformed payload: {reason}")),
            }
        }
        Ok((Dataset::from_records(records), report))
    }
}

/// Convenience wrapper over [`Fetcher`] with the default base URL.
pub fn fetch_releases(
    plan: &FetchPlan,
    transport: &mut dyn Transport,
    clock: &dyn Clock,
) -> Result<(Dataset, FetchReport), FetchError> {
    Fetcher::new(transport, clock).fetch_releases(plan)
}

fn artist_id(credit: &Value) -> Option<String> {
    match credit.get("id") {
        Some(Value::Number(n)) if n.as_u64() != Some(0) => Some(n.to_string()),
        Some(Value::String(s)) if !s.is_empty() => Some(s.clone()),
        _ => credit
            .get("name")
            .and_then(Value::as_str)
            .filter(|n| !n.is_empty())
            .map(|n| format!("name:{n}")),
    }
}

fn credits<'v>(v: &'v Value, key: &str) -> impl Iterator<Item = &'v Value> {
    v.get(key)
        .and_then(Value::as_array)
        .map(|a| a.iter())
        .into_iter()
        .flatten()
}

/// Turns one master-release payload into association records.
///
/// Release-level artists are credited as "Main Artist"; release-level and
/// track-level `extraartists` contribute their raw role strings. Repeated
/// (collaborator, role) credits collapse to one record.
pub fn parse_release_payload(album_id: &str, body: &str) -> Result<Vec<AssociationRecord>, String> {
    let v: Value = serde_json::from_str(body).map_err(|e| e.to_string())?;
    if !v.is_object() {
        return Err("expected a JSON object".into());
    }
    let title = v
        .get("title")
        .and_then(Value::as_str)
        .ok_or("missing `title`")?
        .to_string();
    let release_year = v
        .get("year")
        .and_then(Value::as_i64)
        .filter(|y| (MIN_YEAR as i64..=MAX_YEAR as i64).contains(y))
        .map(|y| y as i32);
    let main_artist = credits(&v, "artists")
        .filter_map(|a| a.get("name").and_then(Value::as_str))
        .collect::<Vec<_>>()
        .join(", ");

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    let mut push = |credit: &Value, role: &str| {
        let role = role.trim();
        let Some(collaborator_id) = artist_id(credit) else {
            return;
        };
        if role.is_empty() || !seen.insert((collaborator_id.clone(), role.to_string())) {
            return;
        }
        records.push(AssociationRecord {
            album_id: album_id.to_string(),
            album_title: title.clone(),
            main_artist: main_artist.clone(),
            release_year,
            collaborator_id,
            collaborator_name: credit
                .get("name")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            role_raw: role.to_string(),
        });
    };

    for artist in credits(&v, "artists") {
        push(artist, MAIN_ARTIST_ROLE);
    }
    let release_extra = credits(&v, "extraartists");
    let track_extra = credits(&v, "tracklist").flat_map(|t| credits(t, "extraartists"));
    for credit in release_extra.chain(track_extra) {
        let role = credit.get("role").and_then(Value::as_str).unwrap_or_default();
        push(credit, role);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    #[derive(Default)]
    struct FakeClock {
        now: Cell<Duration>,
    }

    impl Clock for FakeClock {
        fn now(&self) -> Duration {
            self.now.get()
        }
        fn sleep(&self, d: Duration) {
            self.now.set(self.now.get() + d);
        }
    }

    #[test]
    fn limiter_respects_window() {
        let clock = FakeClock::default();
        let mut limiter = RateLimiter::new(5);
        let stamps: Vec<Duration> = (0..23).map(|_| limiter.acquire(&clock)).collect();
        for (i, &t) in stamps.iter().enumerate() {
            let in_window = stamps[i..].iter().filter(|&&s| s < t + WINDOW).count();
            assert!(in_window <= 5, "{in_window} requests in window starting {t:?}");
        }
        // 23 requests at 5/min need four full waits.
        assert_eq!(*stamps.last().unwrap(), Duration::from_secs(240));
    }

    #[test]
    fn payload_roles() {
        let body = r#"{
            "id": 1, "title": "Album", "year": 1971,
            "artists": [{"name": "Band", "id": 10}],
            "extraartists": [
                {"name": "Ann", "id": 20, "role": "Producer"},
                {"name": "Ann", "id": 20, "role": "Engineer"}
            ],
            "tracklist": [{"title": "t", "extraartists": [{"name": "Ann", "id": 20, "role": "Producer"}]}]
        }"#;
        let rows = parse_release_payload("1", body).unwrap();
        let got: Vec<(&str, &str)> = rows
            .iter()
            .map(|r| (r.collaborator_id.as_str(), r.role_raw.as_str()))
            .collect();
        assert_eq!(got, vec![("10", "Main Artist"), ("20", "Producer"), ("20", "Engineer")]);
        assert_eq!(rows[0].main_artist, "Band");
        assert_eq!(rows[0].release_year, Some(1971));
    }

    #[test]
    fn payload_year_zero_is_absent() {
        let rows = parse_release_payload("x", r#"{"title":"T","year":0,"artists":[{"name":"A","id":1}]}"#)
            .unwrap();
        assert_eq!(rows[0].release_year, None);
    }

    #[test]
    fn malformed_payloads() {
        assert!(parse_release_payload("x", "not json").is_err());
        assert!(parse_release_payload("x", "[1,2]").is_err());
        assert!(parse_release_payload("x", r#"{"year":1970}"#).is_err());
    }

    #[test]
    fn ids_are_path_safe() {
        assert!(valid_id("12345"));
        assert!(!valid_id("../etc"));
        assert!(!valid_id(""));
        assert!(!valid_id("a/b"));
    }
}
