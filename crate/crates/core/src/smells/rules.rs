use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::sync::OnceLock;

use regex::{Regex, RegexBuilder};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EmbeddedLanguage {
    Bash,
    Html,
    Javascript,
    Php,
    Python,
    Ruby,
    Sql,
}

impl EmbeddedLanguage {
    pub const ALL: [EmbeddedLanguage; 7] = [
        EmbeddedLanguage::Bash,
        EmbeddedLanguage::Html,
        EmbeddedLanguage::Javascript,
        EmbeddedLanguage::Php,
        EmbeddedLanguage::Python,
        EmbeddedLanguage::Ruby,
        EmbeddedLanguage::Sql,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EmbeddedLanguage::Bash => "BASH",
            EmbeddedLanguage::Html => "HTML",
            EmbeddedLanguage::Javascript => "JAVASCRIPT",
            EmbeddedLanguage::Php => "PHP",
            EmbeddedLanguage::Python => "PYTHON",
            EmbeddedLanguage::Ruby => "RUBY",
            EmbeddedLanguage::Sql => "SQL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for EmbeddedLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The detection table. The typeset source escapes metacharacters with `%`;
/// each `%x` is read as `\x` here, so `%.sh` is `\.sh`.
pub const TABLE: &[(EmbeddedLanguage, &str)] = &[
    (EmbeddedLanguage::Bash, r"sh[ ]+"),
    (EmbeddedLanguage::Bash, r"\.sh"),
    (EmbeddedLanguage::Html, r"\<[ ]*html[ ]*\>"),
    (EmbeddedLanguage::Javascript, r"function[^\(]*\([^\)]*\)"),
    (EmbeddedLanguage::Javascript, r"\<[ ]*script"),
    (EmbeddedLanguage::Javascript, r"js[ ]*="),
    (EmbeddedLanguage::Php, r"\<\?"),
    (EmbeddedLanguage::Python, r"import[ ]+\(.*\)"),
    (EmbeddedLanguage::Ruby, r"require[ ]*\(.*\)"),
    (EmbeddedLanguage::Sql, r"alter[ ]+table"),
    (EmbeddedLanguage::Sql, r"create[ ]+.*index"),
    (EmbeddedLanguage::Sql, r"create[ ]+.*table"),
    (EmbeddedLanguage::Sql, r"create[ ]+.*trigger"),
    (EmbeddedLanguage::Sql, r"create[ ]+.*view"),
    (EmbeddedLanguage::Sql, r"delete[ ]+from"),
    (EmbeddedLanguage::Sql, r"drop[ ]+index"),
    (EmbeddedLanguage::Sql, r"drop[ ]+table"),
    (EmbeddedLanguage::Sql, r"drop[ ]+trigger"),
    (EmbeddedLanguage::Sql, r"drop[ ]+view"),
    (EmbeddedLanguage::Sql, r"insert[ ]+.*into"),
    (EmbeddedLanguage::Sql, r"replace[ ]+into"),
    (EmbeddedLanguage::Sql, r"select[ ]+.*[ ]+from"),
    (EmbeddedLanguage::Sql, r"update[ ]+.+[ ]+set"),
];

#[derive(Debug, thiserror::Error)]
pub enum RuleError {
    #[error("line {line}: expected `language<TAB>pattern`")]
    Format { line: usize },
    #[error("line {line}: unknown language `{name}`")]
    Language { line: usize, name: String },
    #[error("line {line}: {source}")]
    Pattern {
        line: usize,
        #[source]
        source: regex::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A single detection rule. `pattern` is kept exactly as written in the
/// table or rules file.
#[derive(Debug, Clone)]
pub struct RegexRule {
    pub language: EmbeddedLanguage,
    pub pattern: String,
    pub case_insensitive: bool,
    regex: Regex,
}

/// `\<` and `\>` are word-boundary assertions in the regex crate but plain
/// angle brackets in the Java dialect the table is written for.
fn translate(pattern: &str) -> String {
    let mut out = String::with_capacity(pattern.len());
    let mut chars = pattern.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some(n @ ('<' | '>')) => out.push(n),
            Some(n) => {
                out.push('\\');
                out.push(n);
            }
            None => out.push('\\'),
        }
    }
    out
}

impl RegexRule {
    pub fn new(language: EmbeddedLanguage, pattern: &str) -> Result<Self, regex::Error> {
        let regex = RegexBuilder::new(&translate(pattern)).case_insensitive(true).build()?;
        Ok(RegexRule {
            language,
            pattern: pattern.to_string(),
            case_insensitive: true,
            regex,
        })
    }

    pub fn regex(&self) -> &Regex {
        &self.regex
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.regex.is_match(text)
    }
}

/// One rule hit inside a scanned string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageMatch {
    pub language: EmbeddedLanguage,
    /// Index into the rule set.
    pub rule: usize,
    pub span: Range<usize>,
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<RegexRule>,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet {
            rules: TABLE
                .iter()
                .map(|(l, p)| RegexRule::new(*l, p).expect("table pattern compiles"))
                .collect(),
        }
    }
}

impl RuleSet {
    /// The compiled default table, shared.
    pub fn table() -> &'static RuleSet {
        static TABLE_RULES: OnceLock<RuleSet> = OnceLock::new();
        TABLE_RULES.get_or_init(RuleSet::default)
    }

    pub fn rules(&self) -> &[RegexRule] {
        &self.rules
    }

    /// Reads `language<TAB>pattern` lines. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let (lang, pattern) = raw.split_once('\t').ok_or(RuleError::Format { line })?;
            let language = EmbeddedLanguage::parse(lang).ok_or_else(|| RuleError::Language {
                line,
                name: lang.to_string(),
            })?;
            let rule = RegexRule::new(language, pattern).map_err(|source| RuleError::Pattern { line, source })?;
            rules.push(rule);
        }
        Ok(RuleSet { rules })
    }

    pub fn load(path: &Path) -> Result<Self, RuleError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        self.rules
            .iter()
            .map(|r| format!("{}\t{}\n", r.language, r.pattern))
            .collect()
    }

    /// Every match of every rule. Matches from different rules may overlap.
    pub fn scan(&self, text: &str) -> Vec<LanguageMatch> {
        let mut out = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            for m in r.regex.find_iter(text) {
                out.push(LanguageMatch {
                    language: r.language,
                    rule: i,
                    span: m.range(),
                });
            }
        }
        out.sort_by_key(|m| (m.span.start, m.rule));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_escapes_are_literal() {
        assert_eq!(translate(r"\<[ ]*html[ ]*\>"), "<[ ]*html[ ]*>");
        assert_eq!(translate(r"\<\?"), r"<\?");
        assert_eq!(translate(r"\.sh"), r"\.sh");
    }

    #[test]
    fn rules_file_round_trip() {
        let set = RuleSet::default();
        let again = RuleSet::parse(&set.to_text()).unwrap();
        let a: Vec<_> = set.rules().iter().map(|r| (r.language, r.pattern.clone())).collect();
        let b: Vec<_> = again.rules().iter().map(|r| (r.language, r.pattern.clone())).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn rules_file_errors() {
        assert!(matches!(
            RuleSet::parse("SQL select"),
            Err(RuleError::Format { line: 1 })
        ));
        assert!(matches!(
            RuleSet::parse("# c\nCOBOL\tx"),
            Err(RuleError::Language { line: 2, .. })
        ));
        assert!(matches!(
            RuleSet::parse("sql\t("),
            Err(RuleError::Pattern { line: 1, .. })
        ));
        assert_eq!(RuleSet::parse("sql\tfoo\n\n").unwrap().rules().len(), 1);
    }
}
