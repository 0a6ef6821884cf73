use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::StringValue;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimilarityConfig {
    /// Winkler prefix scale, kept within [0, 0.25].
    pub prefix_scale: f64,
    pub max_prefix: usize,
    pub accept_threshold: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            prefix_scale: 0.1,
            max_prefix: 4,
            accept_threshold: 0.85,
        }
    }
}

/// Jaro similarity over Unicode scalar values.
///
/// The transposition count is half the number of out-of-order matches,
/// rounded down. Two empty strings are identical (1.0).
pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut b_used = vec![false; b.len()];
    let mut a_matched = Vec::with_capacity(a.len());
    for (i, &ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_used[j] && b[j] == ca {
                b_used[j] = true;
                a_matched.push(ca);
                break;
            }
        }
    }
    let m = a_matched.len();
    if m == 0 {
        return 0.0;
    }
    let b_matched = b.iter().zip(&b_used).filter(|(_, u)| **u).map(|(c, _)| *c);
    let half_transposed = a_matched.iter().zip(b_matched).filter(|(x, y)| *x != y).count() / 2;
    let m = m as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - half_transposed as f64) / m) / 3.0
}

pub fn jaro_winkler(a: &str, b: &str, cfg: &SimilarityConfig) -> f64 {
    let sim = jaro(a, b);
    let p = cfg.prefix_scale.clamp(0.0, 0.25);
    let prefix = a
        .chars()
        .zip(b.chars())
        .take_while(|(x, y)| x == y)
        .take(cfg.max_prefix)
        .count();
    (sim + prefix as f64 * p * (1.0 - sim)).min(1.0)
}

/// Best-scoring candidate at or above the threshold; ties go to the
/// lexicographically smaller key.
pub fn guess_value(
    name: &str,
    candidates: &BTreeMap<String, StringValue>,
    cfg: &SimilarityConfig,
) -> Option<StringValue> {
    let mut best: Option<(f64, &StringValue)> = None;
    for (key, value) in candidates {
        let score = jaro_winkler(name, key, cfg);
        if score < cfg.accept_threshold {
            continue;
        }
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, value));
        }
    }
    best.map(|(_, v)| v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Written independently of `jaro`: signed index arithmetic over
    /// all pairs, explicit transposition enumeration.
    fn oracle_jaro(a: &str, b: &str) -> f64 {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        match (a.len(), b.len()) {
            (0, 0) => return 1.0,
            (0, _) | (_, 0) => return 0.0,
            _ => {}
        }
        let longest = std::cmp::max(a.len(), b.len()) as i64;
        let window = std::cmp::max(0, longest / 2 - 1);
        let mut taken_in_b: Vec<Option<usize>> = vec![None; b.len()];
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..a.len() {
            let hit = (0..b.len())
                .find(|&j| (i as i64 - j as i64).abs() <= window && taken_in_b[j].is_none() && a[i] == b[j]);
            if let Some(j) = hit {
                taken_in_b[j] = Some(i);
                pairs.push((i, j));
            }
        }
        if pairs.is_empty() {
            return 0.0;
        }
        let seq_a: String = pairs.iter().map(|&(i, _)| a[i]).collect();
        let mut js: Vec<usize> = pairs.iter().map(|&(_, j)| j).collect();
        js.sort_unstable();
        let seq_b: String = js.iter().map(|&j| b[j]).collect();
        let mut out_of_order = 0u32;
        for (x, y) in seq_a.chars().zip(seq_b.chars()) {
            if x != y {
                out_of_order += 1;
            }
        }
        let t = (out_of_order / 2) as f64;
        let m = pairs.len() as f64;
        (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
    }

    fn oracle_jw(a: &str, b: &str) -> f64 {
        let sim = oracle_jaro(a, b);
        let mut l = 0;
        for (x, y) in a.chars().zip(b.chars()) {
            if x != y || l == 4 {
                break;
            }
            l += 1;
        }
        sim + l as f64 * 0.1 * (1.0 - sim)
    }

    #[test]
    fn known_values() {
        let cfg = SimilarityConfig::default();
        assert_eq!(jaro_winkler("abc", "abc", &cfg), 1.0);
        assert_eq!(jaro_winkler("abc", "xyz", &cfg), 0.0);
        assert!((jaro_winkler("MARTHA", "MARHTA", &cfg) - 0.9611).abs() < 1e-4);
        assert!((oracle_jw("MARTHA", "MARHTA") - 0.9611).abs() < 1e-4);
        assert_eq!(jaro("", ""), 1.0);
        assert_eq!(jaro("", "a"), 0.0);
    }

    #[test]
    fn guesses() {
        let cfg = SimilarityConfig::default();
        let mut c = BTreeMap::new();
        assert_eq!(guess_value("baseUrl", &c, &cfg), None);
        c.insert("baseURL".to_string(), StringValue::literal("http://a.com"));
        assert!(jaro_winkler("baseUrl", "baseURL", &cfg) >= 0.85);
        assert_eq!(
            guess_value("baseUrl", &c, &cfg),
            Some(StringValue::literal("http://a.com"))
        );
        assert!(jaro_winkler("counter", "baseURL", &cfg) < 0.85);
        assert_eq!(guess_value("counter", &c, &cfg), None);
    }

    #[test]
    fn ties_prefer_smaller_key() {
        let cfg = SimilarityConfig::default();
        let mut c = BTreeMap::new();
        c.insert("hostB".to_string(), StringValue::literal("b"));
        c.insert("hostA".to_string(), StringValue::literal("a"));
        assert_eq!(guess_value("hostC", &c, &cfg), Some(StringValue::literal("a")));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn similarity_properties(a in "[a-dA-D_]{0,12}", b in "[a-dA-D_]{0,12}") {
            let cfg = SimilarityConfig::default();
            let ab = jaro_winkler(&a, &b, &cfg);
            prop_assert!((ab - jaro_winkler(&b, &a, &cfg)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(jaro_winkler(&a, &a, &cfg), 1.0);
            prop_assert!((ab - oracle_jw(&a, &b)).abs() < 1e-12);
        }
    }
}
