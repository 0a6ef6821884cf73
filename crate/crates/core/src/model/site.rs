use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::reconstruct::StringValue;
use crate::source::{Expr, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LibraryId {
    #[serde(rename = "JAVA_NET_URLCONNECTION")]
    JavaNetUrlConnection,
    #[serde(rename = "JAVA_NET_HTTPURLCONNECTION")]
    JavaNetHttpUrlConnection,
    #[serde(rename = "JAVA_NET_HTTPSURLCONNECTION")]
    JavaNetHttpsUrlConnection,
    JavaNetSocket,
    #[serde(rename = "OKHTTP")]
    OkHttp,
    Retrofit,
    Volley,
    Glide,
    Ion,
    ApacheHttpclient,
    Loopj,
    OrgJson,
    Gson,
    Moshi,
}

impl LibraryId {
    pub const ALL: [LibraryId; 14] = [
        LibraryId::JavaNetUrlConnection,
        LibraryId::JavaNetHttpUrlConnection,
        LibraryId::JavaNetHttpsUrlConnection,
        LibraryId::JavaNetSocket,
        LibraryId::OkHttp,
        LibraryId::Retrofit,
        LibraryId::Volley,
        LibraryId::Glide,
        LibraryId::Ion,
        LibraryId::ApacheHttpclient,
        LibraryId::Loopj,
        LibraryId::OrgJson,
        LibraryId::Gson,
        LibraryId::Moshi,
    ];

    /// Name shown on the `Library:` line of text reports.
    pub fn label(self) -> &'static str {
        match self {
            LibraryId::JavaNetUrlConnection => "java.net.URLConnection",
            LibraryId::JavaNetHttpUrlConnection => "java.net.HttpURLConnection",
            LibraryId::JavaNetHttpsUrlConnection => "java.net.HttpsURLConnection",
            LibraryId::JavaNetSocket => "java.net.Socket",
            LibraryId::OkHttp => "com.squareup.okhttp",
            LibraryId::Retrofit => "com.squareup.retrofit",
            LibraryId::Volley => "com.android.volley",
            LibraryId::Glide => "com.github.bumptech.glide",
            LibraryId::Ion => "com.koushikdutta.ion",
            LibraryId::ApacheHttpclient => "org.apache.httpcomponents",
            LibraryId::Loopj => "com.loopj.android",
            LibraryId::OrgJson => "org.json",
            LibraryId::Gson => "com.google.gson",
            LibraryId::Moshi => "com.squareup.moshi",
        }
    }

    pub fn is_json(self) -> bool {
        matches!(self, LibraryId::OrgJson | LibraryId::Gson | LibraryId::Moshi)
    }

    pub fn name(self) -> &'static str {
        match self {
            LibraryId::JavaNetUrlConnection => "JAVA_NET_URLCONNECTION",
            LibraryId::JavaNetHttpUrlConnection => "JAVA_NET_HTTPURLCONNECTION",
            LibraryId::JavaNetHttpsUrlConnection => "JAVA_NET_HTTPSURLCONNECTION",
            LibraryId::JavaNetSocket => "JAVA_NET_SOCKET",
            LibraryId::OkHttp => "OKHTTP",
            LibraryId::Retrofit => "RETROFIT",
            LibraryId::Volley => "VOLLEY",
            LibraryId::Glide => "GLIDE",
            LibraryId::Ion => "ION",
            LibraryId::ApacheHttpclient => "APACHE_HTTPCLIENT",
            LibraryId::Loopj => "LOOPJ",
            LibraryId::OrgJson => "ORG_JSON",
            LibraryId::Gson => "GSON",
            LibraryId::Moshi => "MOSHI",
        }
    }
}

impl fmt::Display for LibraryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum HttpMethod {
    Get,
    Post,
    Put,
    Delete,
    Patch,
    Head,
}

impl HttpMethod {
    pub fn parse(s: &str) -> Option<HttpMethod> {
        Some(match s.to_ascii_uppercase().as_str() {
            "GET" => HttpMethod::Get,
            "POST" => HttpMethod::Post,
            "PUT" => HttpMethod::Put,
            "DELETE" => HttpMethod::Delete,
            "PATCH" => HttpMethod::Patch,
            "HEAD" => HttpMethod::Head,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HttpMethod::Get => "GET",
            HttpMethod::Post => "POST",
            HttpMethod::Put => "PUT",
            HttpMethod::Delete => "DELETE",
            HttpMethod::Patch => "PATCH",
            HttpMethod::Head => "HEAD",
        }
    }
}

impl fmt::Display for HttpMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Header {
    pub key: StringValue,
    pub value: StringValue,
}

/// The call site a record was extracted from.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractionSite {
    pub library: LibraryId,
    pub unit_path: PathBuf,
    pub type_name: String,
    pub method_name: Option<String>,
    pub span: Span,
    #[serde(skip)]
    pub raw_expr: Option<Expr>,
    pub http_method: Option<HttpMethod>,
    pub headers: Vec<Header>,
}

impl ExtractionSite {
    pub fn new(library: LibraryId, unit_path: impl Into<PathBuf>, type_name: impl Into<String>) -> Self {
        ExtractionSite {
            library,
            unit_path: unit_path.into(),
            type_name: type_name.into(),
            method_name: None,
            span: Span::default(),
            raw_expr: None,
            http_method: None,
            headers: Vec::new(),
        }
    }

    fn key(&self) -> (&PathBuf, usize, usize, LibraryId) {
        (&self.unit_path, self.span.start, self.span.end, self.library)
    }
}

impl PartialEq for ExtractionSite {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
            && self.type_name == other.type_name
            && self.method_name == other.method_name
            && self.http_method == other.http_method
            && self.headers == other.headers
    }
}

impl Eq for ExtractionSite {}

impl PartialOrd for ExtractionSite {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sorted by file, then source position.
impl Ord for ExtractionSite {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key()
            .cmp(&other.key())
            .then_with(|| self.type_name.cmp(&other.type_name))
            .then_with(|| self.method_name.cmp(&other.method_name))
            .then_with(|| self.http_method.cmp(&other.http_method))
            .then_with(|| self.headers.cmp(&other.headers))
    }
}
