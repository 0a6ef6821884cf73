use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::{Scheme, WebApiUrl};

/// Corpus statistics. Every endpoint under a base URL counts as one URL.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AggregateStats {
    pub total_urls: usize,
    pub distinct_urls: usize,
    pub scheme_counts: BTreeMap<Scheme, usize>,
    pub segment_histogram: BTreeMap<usize, usize>,
    pub query_histogram: BTreeMap<usize, usize>,
    pub fragment_histogram: BTreeMap<usize, usize>,
    /// Rounded to 2 decimals.
    pub mean_segments: f64,
    /// Rounded to 2 decimals.
    pub mean_query_pairs: f64,
    /// URLs with at least one fragment.
    pub fragments_used: usize,
}

impl Default for AggregateStats {
    fn default() -> Self {
        AggregateStats {
            total_urls: 0,
            distinct_urls: 0,
            scheme_counts: Scheme::ALL.iter().map(|s| (*s, 0)).collect(),
            segment_histogram: BTreeMap::new(),
            query_histogram: BTreeMap::new(),
            fragment_histogram: BTreeMap::new(),
            mean_segments: 0.0,
            mean_query_pairs: 0.0,
            fragments_used: 0,
        }
    }
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn stats(urls: &[WebApiUrl]) -> AggregateStats {
    let mut s = AggregateStats::default();
    let mut seen = HashSet::new();
    let (mut seg_sum, mut query_sum) = (0usize, 0usize);
    for u in urls {
        for e in &u.endpoints {
            s.total_urls += 1;
            *s.scheme_counts.entry(u.scheme).or_default() += 1;
            *s.segment_histogram.entry(e.path_segments.len()).or_default() += 1;
            *s.query_histogram.entry(e.queries.len()).or_default() += 1;
            *s.fragment_histogram.entry(e.fragments.len()).or_default() += 1;
            seg_sum += e.path_segments.len();
            query_sum += e.queries.len();
            if !e.fragments.is_empty() {
                s.fragments_used += 1;
            }
            let single = WebApiUrl {
                endpoints: vec![e.clone()],
                provenance: Vec::new(),
                ..u.clone()
            };
            seen.insert(single.dedup_key());
        }
    }
    s.distinct_urls = seen.len();
    if s.total_urls > 0 {
        s.mean_segments = round2(seg_sum as f64 / s.total_urls as f64);
        s.mean_query_pairs = round2(query_sum as f64 / s.total_urls as f64);
    }
    s
}
