//! Deterministic synthetic generators and brute-force oracles.
//!
//! All randomness comes from [`crate::rng`], so a spec and its seed pin the
//! output byte for byte.

mod corpus;
mod news;
mod oracle;
mod planted;

pub use corpus::{gen_corpus, Corpus, CorpusBloc, CorpusParty, CorpusPeriod, CorpusSpec, CorpusTopic};
pub use news::{gen_news_sharing_events, ArticleSpec, EngagementSpec, NewsBlocSpec, NewsStreamSpec, SentimentMix};
pub use oracle::{oracle_count_tables, ORACLE_BUDGET};
pub use planted::{gen_planted_density_graph, gen_planted_retweet_stream, BlocSize, PlantedStream, PlantedStreamSpec};
