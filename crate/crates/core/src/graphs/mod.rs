//! Endorsement graphs, user/news graphs and the event filters feeding them.

mod endorsement;
mod filters;
mod news;
mod participation;
mod url;

pub use endorsement::{build_endorsement_graph, Edge, EndorsementGraph};
pub use filters::{filter_accounts, is_news_retweet, restrict_to_news_retweets, AccountFilter};
pub use news::{build_user_news_graph, NewsArticle, NewsBuildReport, NewsEdge, UserNewsGraph};
pub use participation::{participation, Participation};
pub use url::{canonicalize_url, CanonicalUrl, UrlPolicy, UrlRejection};
