//! Event parsing, topic classification and time windowing.

mod event;
mod topics;
mod window;

pub use event::{
    parse_events, write_events_csv, write_events_jsonl, EventFormat, EventKind, EventParser, InteractionEvent,
    LineError, ParseReport, Sentiment,
};
pub use topics::{
    load_topic_config, match_topics, mentions_any, parse_keyword_list, parse_topic_config, split_journalism,
    TopicConfig, TopicMatcher,
};
pub use window::{
    parse_timezone, validate_periods, window_events, window_of, windows_for, StudyPeriod, TimeWindow, WindowScheme,
    WindowedEvents,
};

/// Simple (one-to-one) case folding, applied char by char.
///
/// Characters whose lowercase form expands to several chars are kept as is,
/// so the folded text has the same number of chars as the input.
pub fn casefold(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c == 'ς' {
                return 'σ';
            }
            let mut lower = c.to_lowercase();
            match (lower.next(), lower.next()) {
                (Some(l), None) => l,
                _ => c,
            }
        })
        .collect()
}
