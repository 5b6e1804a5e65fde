//! News URL canonicalization.
//!
//! Rules: scheme and fragment are dropped, the host is lowercased and
//! leading `www.`/`m.` labels are stripped, tracking query parameters are
//! removed and the remaining parameters sorted. The outlet is the stripped
//! host; the article key is `outlet + [:port] + path + [?query]`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use url::Url;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct UrlPolicy {
    /// Query parameters to drop. A trailing `*` makes the entry a prefix.
    pub strip_params: Vec<String>,
    /// When non-empty, only these outlets count as news.
    pub outlet_allow: BTreeSet<String>,
    pub outlet_deny: BTreeSet<String>,
}

impl Default for UrlPolicy {
    fn default() -> Self {
        Self {
            strip_params: ["utm_*", "fbclid", "share", "ref"].map(String::from).to_vec(),
            outlet_allow: BTreeSet::new(),
            outlet_deny: BTreeSet::new(),
        }
    }
}

impl UrlPolicy {
    fn strips(&self, key: &str) -> bool {
        let key = key.to_ascii_lowercase();
        self.strip_params.iter().any(|p| match p.strip_suffix('*') {
            Some(prefix) => key.starts_with(prefix),
            None => key == *p,
        })
    }

    fn admits(&self, outlet: &str) -> bool {
        (self.outlet_allow.is_empty() || self.outlet_allow.contains(outlet)) && !self.outlet_deny.contains(outlet)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalUrl {
    pub outlet: String,
    pub article_key: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UrlRejection {
    Unparseable(String),
    Scheme(String),
    NoHost,
    Filtered(String),
}

impl fmt::Display for UrlRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UrlRejection::Unparseable(e) => write!(f, "unparseable url: {e}"),
            UrlRejection::Scheme(s) => write!(f, "unsupported scheme `{s}`"),
            UrlRejection::NoHost => f.write_str("url has no host"),
            UrlRejection::Filtered(o) => write!(f, "outlet `{o}` excluded by policy"),
        }
    }
}

fn strip_host(host: &str) -> &str {
    let mut h = host.trim_end_matches('.');
    loop {
        if let Some(rest) = h.strip_prefix("www.").or_else(|| h.strip_prefix("m.")) {
            if rest.contains('.') {
                h = rest;
                continue;
            }
        }
        return h;
    }
}

/// Looks like `scheme:` rather than `host:port`.
fn has_foreign_scheme(raw: &str) -> bool {
    match raw.split_once(':') {
        Some((scheme, rest)) => {
            !scheme.is_empty()
                && scheme.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
                && !rest.starts_with(|c: char| c.is_ascii_digit())
        }
        None => false,
    }
}

pub fn canonicalize_url(raw: &str, policy: &UrlPolicy) -> Result<CanonicalUrl, UrlRejection> {
    let raw = raw.trim();
    let parsed = if raw.contains("://") {
        Url::parse(raw).map_err(|e| UrlRejection::Unparseable(e.to_string()))?
    } else if has_foreign_scheme(raw) {
        let scheme = raw.split(':').next().unwrap_or_default();
        return Err(UrlRejection::Scheme(scheme.to_ascii_lowercase()));
    } else {
        // Scheme-less input, e.g. an article key being re-canonicalized.
        Url::parse(&format!("http://{raw}")).map_err(|e| UrlRejection::Unparseable(e.to_string()))?
    };
    match parsed.scheme() {
        "http" | "https" => {}
        other => return Err(UrlRejection::Scheme(other.to_owned())),
    }
    let host = parsed.host_str().filter(|h| !h.is_empty()).ok_or(UrlRejection::NoHost)?;
    let outlet = strip_host(&host.to_lowercase()).to_owned();
    if !policy.admits(&outlet) {
        return Err(UrlRejection::Filtered(outlet));
    }

    let mut params: Vec<(String, String)> = parsed
        .query_pairs()
        .filter(|(k, _)| !policy.strips(k))
        .map(|(k, v)| (k.into_owned(), v.into_owned()))
        .collect();
    params.sort();

    let mut key = outlet.clone();
    if let Some(port) = parsed.port() {
        key.push(':');
        key.push_str(&port.to_string());
    }
    key.push_str(parsed.path());
    if !params.is_empty() {
        let query = url::form_urlencoded::Serializer::new(String::new()).extend_pairs(&params).finish();
        key.push('?');
        key.push_str(&query);
    }
    Ok(CanonicalUrl { outlet, article_key: key })
}
