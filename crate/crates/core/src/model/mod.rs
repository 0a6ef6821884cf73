//! URL and JSON schema records, URL parsing, deduplication and statistics.

mod json;
mod site;
mod stats;
mod text;
mod url;

pub use json::{JsonNode, JsonSchema};
pub use site::{ExtractionSite, Header, HttpMethod, LibraryId};
pub use stats::{round2, stats, AggregateStats};
pub use text::{render_json_record, render_url_record};
pub use url::{dedup, parse_url, Endpoint, Scheme, UrlError, WebApiUrl};
