use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Original,
    Retweet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sentiment {
    Negative,
    Neutral,
    Positive,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Negative, Sentiment::Neutral, Sentiment::Positive];

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
            Sentiment::Positive => "positive",
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sentiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" => Ok(Sentiment::Negative),
            "neutral" => Ok(Sentiment::Neutral),
            "positive" => Ok(Sentiment::Positive),
            other => Err(Error::InvalidInput(format!("unknown sentiment `{other}`"))),
        }
    }
}

/// One tweet or retweet.
///
/// `retweeted_text` and `retweeted_urls` are optional extensions carrying
/// the content of the retweeted status; they are needed for topic matching
/// on retweeted text and for the retweets-with-news variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub id: String,
    #[serde(with = "rfc3339_seconds")]
    pub created_at: DateTime<Utc>,
    pub author_id: String,
    pub text: String,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweeted_author_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweeted_status_id: Option<String>,
    #[serde(default)]
    pub urls: Vec<String>,
    pub like_count: u64,
    pub retweet_count: u64,
    pub reply_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<Sentiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweeted_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweeted_urls: Option<Vec<String>>,
}

impl InteractionEvent {
    pub fn is_retweet(&self) -> bool {
        self.kind == EventKind::Retweet
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.author_id.is_empty() {
            return Err("empty author_id".into());
        }
        let present = |v: &Option<String>| v.as_deref().is_some_and(|s| !s.is_empty());
        match self.kind {
            EventKind::Retweet => {
                if !present(&self.retweeted_author_id) || !present(&self.retweeted_status_id) {
                    return Err("retweet without retweeted_author_id/retweeted_status_id".into());
                }
            }
            EventKind::Original => {
                if self.retweeted_author_id.is_some() || self.retweeted_status_id.is_some() {
                    return Err("original tweet carries retweeted_* fields".into());
                }
            }
        }
        Ok(())
    }
}

pub(crate) mod rfc3339_seconds {
    use chrono::{DateTime, SecondsFormat, Timelike, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        parse(&raw).map_err(serde::de::Error::custom)
    }

    pub fn parse(raw: &str) -> Result<DateTime<Utc>, String> {
        let t = DateTime::parse_from_rfc3339(raw.trim())
            .map_err(|e| format!("bad timestamp `{raw}`: {e}"))?
            .with_timezone(&Utc);
        Ok(t.with_nanosecond(0).unwrap_or(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFormat {
    Jsonl,
    Csv,
}

impl FromStr for EventFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" | "ndjson" => Ok(EventFormat::Jsonl),
            "csv" => Ok(EventFormat::Csv),
            other => Err(Error::Config(format!("unknown event format `{other}`"))),
        }
    }
}

impl EventFormat {
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => EventFormat::Csv,
            _ => EventFormat::Jsonl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub parsed: usize,
    pub rejected: usize,
    pub errors: Vec<LineError>,
}

impl ParseReport {
    pub fn counts(&self) -> (usize, usize) {
        (self.parsed, self.rejected)
    }

    fn reject(&mut self, line: usize, reason: impl Into<String>) {
        self.rejected += 1;
        self.errors.push(LineError { line, reason: reason.into() });
    }
}

/// Loose mirror of the wire record, so counts can be range-checked with a
/// useful message instead of a generic type error.
#[derive(Debug, Deserialize)]
struct RawEvent {
    id: String,
    created_at: String,
    author_id: String,
    #[serde(default)]
    text: String,
    kind: EventKind,
    #[serde(default)]
    retweeted_author_id: Option<String>,
    #[serde(default)]
    retweeted_status_id: Option<String>,
    #[serde(default)]
    urls: Vec<String>,
    like_count: i64,
    retweet_count: i64,
    reply_count: i64,
    #[serde(default)]
    sentiment: Option<Sentiment>,
    #[serde(default)]
    retweeted_text: Option<String>,
    #[serde(default)]
    retweeted_urls: Option<Vec<String>>,
}

impl RawEvent {
    fn into_event(self) -> std::result::Result<InteractionEvent, String> {
        let count = |name: &str, v: i64| u64::try_from(v).map_err(|_| format!("{name} must be non-negative, got {v}"));
        let event = InteractionEvent {
            created_at: rfc3339_seconds::parse(&self.created_at)?,
            like_count: count("like_count", self.like_count)?,
            retweet_count: count("retweet_count", self.retweet_count)?,
            reply_count: count("reply_count", self.reply_count)?,
            id: self.id,
            author_id: self.author_id,
            text: self.text,
            kind: self.kind,
            retweeted_author_id: self.retweeted_author_id,
            retweeted_status_id: self.retweeted_status_id,
            urls: self.urls,
            sentiment: self.sentiment,
            retweeted_text: self.retweeted_text,
            retweeted_urls: self.retweeted_urls,
        };
        event.validate()?;
        Ok(event)
    }
}

/// CSV row; list fields are space separated and empty optional cells mean
/// "absent", except `retweeted_urls` on retweets: when the column exists, an
/// empty cell is an empty list.
#[derive(Debug, Deserialize)]
struct CsvRow {
    id: String,
    created_at: String,
    author_id: String,
    #[serde(default)]
    text: String,
    kind: EventKind,
    #[serde(default)]
    retweeted_author_id: String,
    #[serde(default)]
    retweeted_status_id: String,
    #[serde(default)]
    urls: String,
    like_count: i64,
    retweet_count: i64,
    reply_count: i64,
    #[serde(default)]
    sentiment: String,
    #[serde(default)]
    retweeted_text: String,
    #[serde(default)]
    retweeted_urls: String,
}

impl CsvRow {
    fn into_raw(self, has_retweeted_urls: bool) -> std::result::Result<RawEvent, String> {
        let opt = |s: String| (!s.is_empty()).then_some(s);
        let list = |s: &str| s.split_whitespace().map(str::to_owned).collect::<Vec<_>>();
        let sentiment = match self.sentiment.as_str() {
            "" => None,
            s => Some(s.parse::<Sentiment>().map_err(|e| e.to_string())?),
        };
        Ok(RawEvent {
            urls: list(&self.urls),
            retweeted_urls: (!self.retweeted_urls.is_empty() || has_retweeted_urls && self.kind == EventKind::Retweet)
                .then(|| list(&self.retweeted_urls)),
            id: self.id,
            created_at: self.created_at,
            author_id: self.author_id,
            text: self.text,
            kind: self.kind,
            retweeted_author_id: opt(self.retweeted_author_id),
            retweeted_status_id: opt(self.retweeted_status_id),
            like_count: self.like_count,
            retweet_count: self.retweet_count,
            reply_count: self.reply_count,
            sentiment,
            retweeted_text: opt(self.retweeted_text),
        })
    }
}

/// Streaming event parser that tracks duplicate ids and rejections.
pub struct EventParser {
    seen: HashSet<String>,
    report: ParseReport,
}

impl Default for EventParser {
    fn default() -> Self {
        Self::new()
    }
}

impl EventParser {
    pub fn new() -> Self {
        Self { seen: HashSet::new(), report: ParseReport::default() }
    }

    fn accept(&mut self, line: usize, raw: std::result::Result<RawEvent, String>) -> Option<InteractionEvent> {
        match raw.and_then(RawEvent::into_event) {
            Ok(event) => {
                if self.seen.insert(event.id.clone()) {
                    self.report.parsed += 1;
                    Some(event)
                } else {
                    self.report.reject(line, format!("duplicate id `{}`", event.id));
                    None
                }
            }
            Err(reason) => {
                self.report.reject(line, reason);
                None
            }
        }
    }

    /// Parses one source and appends the accepted events to `out`.
    pub fn parse_into<R: BufRead>(
        &mut self,
        mut source: R,
        format: EventFormat,
        out: &mut Vec<InteractionEvent>,
    ) -> Result<()> {
        match format {
            EventFormat::Jsonl => {
                let mut buf = Vec::new();
                let mut line_no = 0;
                loop {
                    buf.clear();
                    if source.read_until(b'\n', &mut buf)? == 0 {
                        break;
                    }
                    line_no += 1;
                    let line = match std::str::from_utf8(&buf) {
                        Ok(l) => l.trim(),
                        Err(e) => {
                            self.report.reject(line_no, format!("invalid utf-8: {e}"));
                            continue;
                        }
                    };
                    if line.is_empty() {
                        continue;
                    }
                    let raw = serde_json::from_str::<RawEvent>(line).map_err(|e| e.to_string());
                    if let Some(ev) = self.accept(line_no, raw) {
                        out.push(ev);
                    }
                }
            }
            EventFormat::Csv => {
                let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(source);
                let headers = rdr.headers()?.clone();
                let has_retweeted_urls = headers.iter().any(|h| h == "retweeted_urls");
                let mut record = csv::StringRecord::new();
                let mut line_no = 1;
                loop {
                    line_no += 1;
                    match rdr.read_record(&mut record) {
                        Ok(false) => break,
                        Ok(true) => {
                            let raw = record
                                .deserialize::<CsvRow>(Some(&headers))
                                .map_err(|e| e.to_string())
                                .and_then(|row| row.into_raw(has_retweeted_urls));
                            if let Some(ev) = self.accept(line_no, raw) {
                                out.push(ev);
                            }
                        }
                        Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => return Err(e.into()),
                        Err(e) => self.report.reject(line_no, e.to_string()),
                    }
                }
            }
        }
        Ok(())
    }

    pub fn report(&self) -> &ParseReport {
        &self.report
    }

    pub fn finish(self) -> ParseReport {
        self.report
    }
}

/// Parses a whole source. Malformed records are reported, not fatal.
pub fn parse_events<R: BufRead>(source: R, format: EventFormat) -> Result<(Vec<InteractionEvent>, ParseReport)> {
    let mut parser = EventParser::new();
    let mut events = Vec::new();
    parser.parse_into(source, format, &mut events)?;
    Ok((events, parser.finish()))
}

pub fn write_events_jsonl<W: Write>(events: &[InteractionEvent], mut out: W) -> Result<()> {
    for ev in events {
        serde_json::to_writer(&mut out, ev)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// The `retweeted_urls` column is written only when every retweet carries
/// it, since an empty cell reads back as "no URLs".
pub fn write_events_csv<W: Write>(events: &[InteractionEvent], out: W) -> Result<()> {
    let with_rt_urls = events.iter().all(|e| !e.is_retweet() || e.retweeted_urls.is_some());
    let mut w = csv::Writer::from_writer(out);
    let header = [
        "id",
        "created_at",
        "author_id",
        "text",
        "kind",
        "retweeted_author_id",
        "retweeted_status_id",
        "urls",
        "like_count",
        "retweet_count",
        "reply_count",
        "sentiment",
        "retweeted_text",
        "retweeted_urls",
    ];
    w.write_record(&header[..header.len() - usize::from(!with_rt_urls)])?;
    for ev in events {
        let kind = match ev.kind {
            EventKind::Original => "original",
            EventKind::Retweet => "retweet",
        };
        let rt_urls = ev.retweeted_urls.as_ref().map(|u| u.join(" ")).unwrap_or_default();
        let record = [
            ev.id.as_str(),
            &ev.created_at.to_rfc3339_opts(SecondsFormat::Secs, true),
            &ev.author_id,
            &ev.text,
            kind,
            ev.retweeted_author_id.as_deref().unwrap_or(""),
            ev.retweeted_status_id.as_deref().unwrap_or(""),
            &ev.urls.join(" "),
            &ev.like_count.to_string(),
            &ev.retweet_count.to_string(),
            &ev.reply_count.to_string(),
            ev.sentiment.map(Sentiment::as_str).unwrap_or(""),
            ev.retweeted_text.as_deref().unwrap_or(""),
            &rt_urls,
        ];
        w.write_record(&record[..record.len() - usize::from(!with_rt_urls)])?;
    }
    w.flush()?;
    Ok(())
}
